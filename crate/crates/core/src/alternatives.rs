//! Samplers for rotation, mixture and generalized rotation alternatives,
//! and the six named power-study presets.
//!
//! Every sampler draws its base pair from one seeded uniform stream, so a
//! fixed seed yields the same underlying `Y` across families.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{RankError, Result};
use crate::sample::PairedSample;
use crate::seed;

const MAX_PROPOSALS: usize = 1_000_000;

/// Maps a uniform draw on `(0, 1)` to a marginal variate.
pub trait MarginGenerator: Sync {
    fn inverse_cdf(&self, u: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Margin {
    StandardGaussian,
    Uniform { lo: f64, hi: f64 },
}

impl Margin {
    /// Uniform on `[-1, 1]`, with distribution function `Ψ(t) = (t + 1) / 2`.
    pub const SYMMETRIC_UNIFORM: Margin = Margin::Uniform { lo: -1.0, hi: 1.0 };

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Margin::StandardGaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Margin::Uniform { lo, hi } if (lo..=hi).contains(&x) => 1.0 / (hi - lo),
            Margin::Uniform { .. } => 0.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Margin::StandardGaussian => Normal::standard().cdf(x),
            Margin::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }
}

impl MarginGenerator for Margin {
    fn inverse_cdf(&self, u: f64) -> f64 {
        match *self {
            Margin::StandardGaussian => Normal::standard().inverse_cdf(u),
            Margin::Uniform { lo, hi } => lo + (hi - lo) * u,
        }
    }
}

/// Uniform on the open interval `(0, 1)`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.random::<u64>() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn base_pair(rng: &mut ChaCha8Rng, f1: &impl MarginGenerator, f2: &impl MarginGenerator) -> (f64, f64) {
    (f1.inverse_cdf(open_unit(rng)), f2.inverse_cdf(open_unit(rng)))
}

fn sampler_stream(seed: u64) -> ChaCha8Rng {
    seed::stream(seed, "alternative")
}

/// `X = A_Δ Y` with `A_Δ = [[1, Δ], [Δ, 1]]`.
pub fn sample_rotation(
    f1: &impl MarginGenerator,
    f2: &impl MarginGenerator,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<PairedSample> {
    if delta.is_nan() || delta.abs() >= 1.0 {
        return Err(RankError::InvalidDelta(delta));
    }
    let mut rng = sampler_stream(seed);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let (y1, y2) = base_pair(&mut rng, f1, f2);
            (y1 + delta * y2, delta * y1 + y2)
        })
        .collect();
    PairedSample::from_pairs(&pairs)
}

/// `F = (1 - Δ) F₀ + Δ G`; draws from `G` by rejection from `F₀` with
/// acceptance probability `g / (c f₀)`. A ratio above one means the
/// declared envelope `c` is wrong and is reported, not clipped.
pub fn sample_mixture<S, G, F>(
    f0_sampler: S,
    g_density: G,
    f0_density: F,
    envelope_c: f64,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<PairedSample>
where
    S: Fn(&mut ChaCha8Rng) -> (f64, f64),
    G: Fn(f64, f64) -> f64,
    F: Fn(f64, f64) -> f64,
{
    if !(0.0..=1.0).contains(&delta) {
        return Err(RankError::InvalidDelta(delta));
    }
    let mut rng = sampler_stream(seed);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let x = f0_sampler(&mut rng);
        if rng.random::<f64>() >= delta {
            pairs.push(x);
            continue;
        }
        let mut proposal = x;
        let mut tries = 0;
        loop {
            let (x1, x2) = proposal;
            let ratio = g_density(x1, x2) / (envelope_c * f0_density(x1, x2));
            if ratio > 1.0 {
                return Err(RankError::EnvelopeViolation { ratio, x1, x2 });
            }
            if rng.random::<f64>() < ratio {
                pairs.push(proposal);
                break;
            }
            tries += 1;
            if tries == MAX_PROPOSALS {
                return Err(RankError::Config(format!(
                    "rejection sampler accepted nothing in {MAX_PROPOSALS} proposals"
                )));
            }
            proposal = f0_sampler(&mut rng);
        }
    }
    PairedSample::from_pairs(&pairs)
}

/// `(Y⁽¹⁾, Δ g(Y⁽¹⁾) + Y⁽²⁾)`.
pub fn sample_generalized_rotation(
    f1: &impl MarginGenerator,
    f2: &impl MarginGenerator,
    g_map: impl Fn(f64) -> f64,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<PairedSample> {
    if !delta.is_finite() {
        return Err(RankError::InvalidDelta(delta));
    }
    let mut rng = sampler_stream(seed);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let (y1, y2) = base_pair(&mut rng, f1, f2);
            (y1, delta * g_map(y1) + y2)
        })
        .collect();
    PairedSample::from_pairs(&pairs)
}

/// Dependent mixture components on the square `[-1, 1]²` with uniform margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DependentDensity {
    /// `G = Ψ₁Ψ₂[1 + (1 - Ψ₁)(1 - Ψ₂)]`, density `¼(1 + x₁x₂)`.
    Farlie,
    /// Density `ψψ[1 + |1 - 2Ψ(x₁)|(1 - 2Ψ(x₂))] = ¼(1 - |x₁| x₂)`.
    AbsoluteFarlie,
}

impl DependentDensity {
    pub fn density(self, x1: f64, x2: f64) -> f64 {
        if x1.abs() > 1.0 || x2.abs() > 1.0 {
            return 0.0;
        }
        // 1 - 2Ψ(t) = -t on [-1, 1]
        let (h1, h2) = match self {
            DependentDensity::Farlie => (-x1, -x2),
            DependentDensity::AbsoluteFarlie => (x1.abs(), -x2),
        };
        0.25 * (1.0 + h1 * h2)
    }
}

/// The map `g` of a generalized rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Perturbation {
    /// `-3, 2, -4, -3` on `[-1,-0.5), [-0.5,0), [0,0.5), [0.5,1]`.
    Step,
    /// `|t + 0.5| I(t < 0) + |t - 0.5| I(t >= 0)`.
    WShape,
    /// `cos(2πt)`.
    Cosine,
}

impl Perturbation {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Perturbation::Step => match t {
                t if t < -0.5 => -3.0,
                t if t < 0.0 => 2.0,
                t if t < 0.5 => -4.0,
                _ => -3.0,
            },
            Perturbation::WShape if t < 0.0 => (t + 0.5).abs(),
            Perturbation::WShape => (t - 0.5).abs(),
            Perturbation::Cosine => (2.0 * PI * t).cos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AlternativeModel {
    Rotation {
        f1: Margin,
        f2: Margin,
    },
    /// Mixture of the uniform product on `[-1, 1]²` with a dependent `G`.
    Mixture {
        g: DependentDensity,
        envelope: f64,
    },
    GeneralizedRotation {
        f1: Margin,
        f2: Margin,
        map: Perturbation,
    },
}

impl AlternativeModel {
    pub fn family(&self) -> &'static str {
        match self {
            AlternativeModel::Rotation { .. } => "rotation",
            AlternativeModel::Mixture { .. } => "mixture",
            AlternativeModel::GeneralizedRotation { .. } => "generalized rotation",
        }
    }

    pub fn sample(&self, delta: f64, n: usize, seed: u64) -> Result<PairedSample> {
        match *self {
            AlternativeModel::Rotation { f1, f2 } => sample_rotation(&f1, &f2, delta, n, seed),
            AlternativeModel::Mixture { g, envelope } => {
                let u = Margin::SYMMETRIC_UNIFORM;
                sample_mixture(
                    |rng| base_pair(rng, &u, &u),
                    |a, b| g.density(a, b),
                    |a, b| u.density(a) * u.density(b),
                    envelope,
                    delta,
                    n,
                    seed,
                )
            }
            AlternativeModel::GeneralizedRotation { f1, f2, map } => {
                sample_generalized_rotation(&f1, &f2, |t| map.apply(t), delta, n, seed)
            }
        }
    }
}

/// `Δₙ = Δ₀ / √n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalSchedule {
    pub delta0: f64,
    pub n: usize,
}

impl LocalSchedule {
    /// `delta0 = 0` is allowed and gives null data for size studies.
    pub fn new(delta0: f64, n: usize) -> Result<Self> {
        if !(delta0.is_finite() && delta0 >= 0.0) {
            return Err(RankError::InvalidDelta(delta0));
        }
        Ok(Self { delta0, n })
    }

    pub fn delta_n(&self) -> f64 {
        self.delta0 / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preset {
    pub name: char,
    pub model: AlternativeModel,
    pub delta0: f64,
}

impl Preset {
    pub fn schedule(&self, n: usize) -> LocalSchedule {
        LocalSchedule {
            delta0: self.delta0,
            n,
        }
    }

    /// Draws `n` pairs at `Δₙ = Δ₀/√n`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<PairedSample> {
        self.model.sample(self.schedule(n).delta_n(), n, seed)
    }

    pub fn with_delta0(self, delta0: f64) -> Result<Self> {
        LocalSchedule::new(delta0, 1)?;
        Ok(Self { delta0, ..self })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

pub const PRESET_NAMES: [char; 6] = ['a', 'b', 'c', 'd', 'e', 'f'];

pub fn preset(name: &str) -> Result<Preset> {
    let uniform = Margin::SYMMETRIC_UNIFORM;
    let gauss = Margin::StandardGaussian;
    let generalized = |map| AlternativeModel::GeneralizedRotation {
        f1: uniform,
        f2: gauss,
        map,
    };
    let (model, delta0) = match name.trim().to_ascii_lowercase().as_str() {
        "a" => (AlternativeModel::Rotation { f1: gauss, f2: gauss }, 2.0),
        "b" => (
            AlternativeModel::Mixture {
                g: DependentDensity::Farlie,
                envelope: 2.0,
            },
            10.0,
        ),
        "c" => (
            AlternativeModel::Mixture {
                g: DependentDensity::AbsoluteFarlie,
                envelope: 2.0,
            },
            20.0,
        ),
        "d" => (generalized(Perturbation::Step), 3.0),
        "e" => (generalized(Perturbation::WShape), 60.0),
        "f" => (generalized(Perturbation::Cosine), 12.0),
        _ => return Err(RankError::UnknownPreset(name.to_string())),
    };
    Ok(Preset {
        name: name.trim().to_ascii_lowercase().chars().next().expect("matched a letter"),
        model,
        delta0,
    })
}
