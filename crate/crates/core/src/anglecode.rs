//! 180-bin angle labels: Gaussian-window CSL and aspect-ratio-aware AR-CSL.
//!
//! Bin `i` represents exactly `i` degrees. A target angle is assigned to its
//! nearest bin (wrapping 179.5.. to bin 0) and every bin's value depends only
//! on its integer circular distance to that bin, so the encoders are exactly
//! shift-equivariant.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{domain, Error, Result};
use crate::skewiou;

pub const NUM_BINS: usize = 180;

/// The CSL window is cut to zero beyond this many radii.
pub const CSL_CUTOFF_RADII: f64 = 4.0;

/// AR-CSL profiles are memoized per aspect ratio quantized to this step.
pub const K_QUANTUM: f64 = 1e-3;

/// Soft angle label over 180 one-degree bins, every value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleLabelVector {
    bins: Box<[f64; NUM_BINS]>,
}

impl AngleLabelVector {
    pub fn from_bins(bins: &[f64]) -> Result<Self> {
        if bins.len() != NUM_BINS {
            return Err(Error::Dimension(format!("expected {NUM_BINS} bins, got {}", bins.len())));
        }
        if let Some((i, v)) = bins.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(domain(format!("bin {i} = {v} outside [0, 1]")));
        }
        let mut out = Box::new([0.0; NUM_BINS]);
        out.copy_from_slice(bins);
        Ok(Self { bins: out })
    }

    pub fn bins(&self) -> &[f64; NUM_BINS] {
        &self.bins
    }

    pub fn get(&self, bin: usize) -> f64 {
        self.bins[bin % NUM_BINS]
    }

    /// One CSV row of 180 comma-separated values.
    pub fn to_csv_row(&self) -> String {
        self.bins.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    fn from_fn(f: impl Fn(usize) -> f64) -> Self {
        let mut bins = Box::new([0.0; NUM_BINS]);
        for (i, b) in bins.iter_mut().enumerate() {
            *b = f(i);
        }
        Self { bins }
    }
}

/// Nearest bin of an angle in `[0, 180)`.
pub fn angle_bin(theta: f64) -> usize {
    (theta.round() as usize) % NUM_BINS
}

/// Circular distance in bins.
pub fn bin_distance(a: usize, b: usize) -> usize {
    let d = a.abs_diff(b) % NUM_BINS;
    d.min(NUM_BINS - d)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..180.0).contains(&theta) {
        return Err(domain(format!("angle must lie in [0, 180), got {theta}")));
    }
    Ok(())
}

/// Circular Smooth Label with a Gaussian window of the given radius.
///
/// `g(d) = exp(-d² / (2 r²))` for `d <= 4 r`, zero beyond.
pub fn csl_encode(theta: f64, radius: f64) -> Result<AngleLabelVector> {
    check_theta(theta)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(domain(format!("window radius must be positive, got {radius}")));
    }
    let center = angle_bin(theta);
    Ok(AngleLabelVector::from_fn(|i| {
        let d = bin_distance(i, center) as f64;
        if d <= CSL_CUTOFF_RADII * radius {
            (-d * d / (2.0 * radius * radius)).exp()
        } else {
            0.0
        }
    }))
}

type Profile = Arc<[f64; 91]>;

fn profile_cache() -> &'static RwLock<HashMap<u64, Profile>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Profile>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Min-max normalized same-center SkewIoU at integer deviations `0..=90`.
///
/// Values are computed at `k` rounded to [`K_QUANTUM`] and memoized, so
/// results are independent of call order.
pub fn arcsl_profile(k: f64) -> Result<Profile> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(domain(format!("aspect ratio must be finite and >= 1, got {k}")));
    }
    let key = (k / K_QUANTUM).round() as u64;
    if let Some(p) = profile_cache().read().expect("profile cache poisoned").get(&key) {
        return Ok(Arc::clone(p));
    }
    let kq = (key as f64 * K_QUANTUM).max(1.0);
    let m = skewiou::min_skewiou(kq)?.min;
    let mut values = [0.0; 91];
    values[0] = 1.0;
    for (d, v) in values.iter_mut().enumerate().skip(1) {
        let s = skewiou::skewiou_same_center(kq, d as f64)?;
        *v = ((s - m) / (1.0 - m)).clamp(0.0, 1.0);
    }
    let profile: Profile = Arc::new(values);
    let mut cache = profile_cache().write().expect("profile cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(profile)))
}

/// Aspect-ratio-aware CSL: bin value is the min-max normalized SkewIoU of a
/// box of aspect ratio `k` at that bin's deviation from `theta`.
pub fn arcsl_encode(theta: f64, k: f64) -> Result<AngleLabelVector> {
    check_theta(theta)?;
    let profile = arcsl_profile(k)?;
    let center = angle_bin(theta);
    Ok(AngleLabelVector::from_fn(|i| profile[bin_distance(i, center)]))
}

/// Angle of the highest bin; ties go to the smallest index.
pub fn decode(label: &AngleLabelVector) -> Result<f64> {
    let mut best = 0;
    for (i, &v) in label.bins.iter().enumerate() {
        if v > label.bins[best] {
            best = i;
        }
    }
    if label.bins[best] <= 0.0 {
        return Err(Error::NoPeak);
    }
    Ok(best as f64)
}
