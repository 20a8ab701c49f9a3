//! Angle and box noise for denoising queries.
//!
//! Randomness comes from [`NoiseRng`]: xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`), with uniforms formed as `((x >> 11) + 0.5) * 2^-53`,
//! i.e. open-interval `(0, 1)` doubles. Both algorithms are fixed so a seed
//! reproduces the same stream on any platform.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rbox::{sin_cos_deg, wrap_angle, RBox};

/// Number of angle categories; the angle noise bound is `lambda * ANGLE_RANGE`.
pub const ANGLE_RANGE: f64 = 180.0;

/// Smallest size factor applied by [`box_noise`].
const MIN_SIZE_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct NoiseRng(Xoshiro256PlusPlus);

impl NoiseRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform double in the open interval `(0, 1)`.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in the open interval `(-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_open01() - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    lambda: f64,
    box_center_scale: f64,
    box_size_scale: f64,
    seed: u64,
}

impl NoiseConfig {
    pub fn new(lambda: f64, box_center_scale: f64, box_size_scale: f64, seed: u64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(domain(format!("angle noise scale must lie in (0, 1], got {lambda}")));
        }
        for (name, v) in [("center", box_center_scale), ("size", box_size_scale)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("box {name} scale must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { lambda, box_center_scale, box_size_scale, seed })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn box_center_scale(&self) -> f64 {
        self.box_center_scale
    }

    pub fn box_size_scale(&self) -> f64 {
        self.box_size_scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator for this configuration's seed.
    pub fn rng(&self) -> NoiseRng {
        NoiseRng::seed_from_u64(self.seed)
    }

    /// Largest absolute angle offset (exclusive), in degrees.
    pub fn angle_bound(&self) -> f64 {
        self.lambda * ANGLE_RANGE
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { lambda: 0.1, box_center_scale: 0.4, box_size_scale: 0.4, seed: 0 }
    }
}

/// Draws `delta` uniformly from `(-lambda * 180, lambda * 180)`.
pub fn sample_angle_delta(cfg: &NoiseConfig, rng: &mut NoiseRng) -> f64 {
    rng.next_symmetric() * cfg.angle_bound()
}

/// The periodic wrap `g(theta + delta)` into `[0, 180)`.
pub fn apply_angle_delta(theta: f64, delta: f64) -> f64 {
    wrap_angle(theta + delta)
}

/// Noisy angle `g(theta + delta)` with a freshly drawn `delta`.
pub fn angle_noise(theta: f64, cfg: &NoiseConfig, rng: &mut NoiseRng) -> f64 {
    apply_angle_delta(theta, sample_angle_delta(cfg, rng))
}

/// Jitters center (in the box's own frame, up to `scale * (w, h) / 2`) and
/// sizes (factor in `1 ± size_scale`); the angle is left to [`angle_noise`].
pub fn box_noise(b: &RBox, cfg: &NoiseConfig, rng: &mut NoiseRng) -> Result<RBox> {
    let du = rng.next_symmetric() * cfg.box_center_scale * b.w() / 2.0;
    let dv = rng.next_symmetric() * cfg.box_center_scale * b.h() / 2.0;
    let fw = (1.0 + rng.next_symmetric() * cfg.box_size_scale).max(MIN_SIZE_FACTOR);
    let fh = (1.0 + rng.next_symmetric() * cfg.box_size_scale).max(MIN_SIZE_FACTOR);
    let (s, c) = sin_cos_deg(b.theta());
    RBox::new(b.cx() + c * du - s * dv, b.cy() + s * du + c * dv, b.w() * fw, b.h() * fh, b.theta())
}

/// Box jitter followed by angle noise.
pub fn noisy_query(b: &RBox, cfg: &NoiseConfig, rng: &mut NoiseRng) -> Result<RBox> {
    let jittered = box_noise(b, cfg, rng)?;
    let theta = angle_noise(jittered.theta(), cfg, rng);
    jittered.with_theta(theta)
}
