//! The five rank correlation coefficients, each paired with a literal
//! brute-force evaluation used as its oracle.

mod bkr;
mod brute;
mod hoeffding;
mod kernel;
mod taustar;
mod xi;
mod xi_star;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bkr::{r_n, r_n_brute, r_n_pairwise};
pub use hoeffding::{d_n_brute, d_n_fast};
pub use kernel::{check_kernel, Kernel, KernelCheck, KernelSpec, Triweight};
pub use taustar::{taustar_n, taustar_n_brute};
pub use xi::{xi_n, xi_n_untied};
pub use xi_star::{default_grid, simpson_2d, xi_star_from_integrand, xi_star_n, zeta_n};

use crate::error::{RankError, Result};
use crate::ranks::{compute_rank_artifacts, RankArtifacts};
use crate::sample::PairedSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoefficientKind {
    Xi,
    XiStar,
    D,
    R,
    TauStar,
}

impl CoefficientKind {
    pub const ALL: [CoefficientKind; 5] = [
        CoefficientKind::Xi,
        CoefficientKind::XiStar,
        CoefficientKind::D,
        CoefficientKind::R,
        CoefficientKind::TauStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoefficientKind::Xi => "xi",
            CoefficientKind::XiStar => "xi_star",
            CoefficientKind::D => "d",
            CoefficientKind::R => "r",
            CoefficientKind::TauStar => "tau_star",
        }
    }
}

impl fmt::Display for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientKind {
    type Err = RankError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .replace('*', "star")
            .chars()
            .filter(|c| !matches!(c, '_' | '-'))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "xi" => Ok(CoefficientKind::Xi),
            "xistar" => Ok(CoefficientKind::XiStar),
            "d" => Ok(CoefficientKind::D),
            "r" => Ok(CoefficientKind::R),
            "taustar" | "tau" => Ok(CoefficientKind::TauStar),
            _ => Err(RankError::Config(format!("unknown coefficient '{s}'"))),
        }
    }
}

/// A computed coefficient with the code path that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    pub kind: CoefficientKind,
    pub value: f64,
    pub n: usize,
    pub algorithm: &'static str,
}

/// Evaluates `kind` with its default fast algorithm. `seed` only matters for
/// ties in the first coordinate (ξ and ξ*), which are broken at random.
pub fn estimate(kind: CoefficientKind, sample: &PairedSample, seed: u64) -> Result<CoefficientEstimate> {
    match kind {
        CoefficientKind::TauStar => taustar_n(sample),
        _ => {
            let artifacts = compute_rank_artifacts(sample, seed)?;
            estimate_with(kind, sample, &artifacts)
        }
    }
}

/// As [`estimate`], reusing precomputed rank artifacts.
pub fn estimate_with(
    kind: CoefficientKind,
    sample: &PairedSample,
    artifacts: &RankArtifacts,
) -> Result<CoefficientEstimate> {
    match kind {
        CoefficientKind::Xi => xi_n(artifacts),
        CoefficientKind::XiStar => {
            let n = artifacts.n();
            xi_star_n(artifacts, &KernelSpec::default_for(n), default_grid(n))
        }
        CoefficientKind::D => d_n_fast(artifacts),
        CoefficientKind::R => r_n(sample, artifacts),
        CoefficientKind::TauStar => taustar_n(sample),
    }
}

/// `n (n-1) ... (n-k+1)` as an exact integer.
pub(crate) fn falling_factorial(n: usize, k: usize) -> u128 {
    (0..k).map(|i| (n - i) as u128).product()
}

pub(crate) fn require_n(n: usize, required: usize) -> Result<()> {
    if n < required {
        Err(RankError::InsufficientData {
            required,
            actual: n,
        })
    } else {
        Ok(())
    }
}
