use crate::error::{RankError, Result};

/// A symmetric smoothing kernel supported on `[-1, 1]`.
pub trait Kernel: Send + Sync {
    fn name(&self) -> &'static str;

    /// Kernel density `K(x)`.
    fn density(&self, x: f64) -> f64;

    /// Integrated kernel `K̄(x) = ∫_{-∞}^x K(t) dt`.
    fn cdf(&self, x: f64) -> f64;
}

/// `K(x) = 35/32 (1 - x²)³` on `[-1, 1]`; twice continuously differentiable
/// at the support boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Triweight;

impl Kernel for Triweight {
    fn name(&self) -> &'static str {
        "triweight"
    }

    #[inline]
    fn density(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let t = 1.0 - x * x;
        35.0 / 32.0 * t * t * t
    }

    #[inline]
    fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let x2 = x * x;
        // x - x³ + 3x⁵/5 - x⁷/7 in Horner form
        let poly = x * (1.0 + x2 * (-1.0 + x2 * (0.6 - x2 / 7.0)));
        0.5 + 35.0 / 32.0 * poly
    }
}

/// Kernel plus the two bandwidths of the copula-derivative estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec<K = Triweight> {
    pub kernel: K,
    pub h1: f64,
    pub h2: f64,
}

impl KernelSpec<Triweight> {
    /// Triweight kernel with `h1 = h2 = n^{-3/10}`.
    pub fn default_for(n: usize) -> Self {
        let h = (n as f64).powf(-0.3);
        Self {
            kernel: Triweight,
            h1: h,
            h2: h,
        }
    }
}

impl<K: Kernel> KernelSpec<K> {
    pub fn new(kernel: K, h1: f64, h2: f64) -> Result<Self> {
        for h in [h1, h2] {
            if !(h.is_finite() && h > 0.0) {
                return Err(RankError::InvalidBandwidth(h));
            }
        }
        Ok(Self { kernel, h1, h2 })
    }
}

/// Outcome of the numerical kernel validity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck {
    pub integral: f64,
    pub max_asymmetry: f64,
    pub cdf_monotone: bool,
    pub cdf_limits: (f64, f64),
    pub max_cdf_error: f64,
}

impl KernelCheck {
    pub fn passes(&self) -> bool {
        (self.integral - 1.0).abs() <= 1e-8
            && self.max_asymmetry <= 1e-14
            && self.cdf_monotone
            && self.cdf_limits == (0.0, 1.0)
            && self.max_cdf_error <= 1e-8
    }
}

/// Checks `∫K = 1`, `K(-x) = K(x)` on a grid, and that `K̄` rises
/// monotonically from 0 to 1 while agreeing with the running integral of `K`.
pub fn check_kernel<K: Kernel>(kernel: &K) -> KernelCheck {
    const STEPS: usize = 4000;
    let h = 2.0 / STEPS as f64;
    let mut running = 0.0;
    let mut max_cdf_error: f64 = 0.0;
    // Simpson on each pair of panels, comparing with K̄ at even nodes
    for j in 0..STEPS / 2 {
        let a = -1.0 + 2.0 * j as f64 * h;
        running += h / 3.0
            * (kernel.density(a) + 4.0 * kernel.density(a + h) + kernel.density(a + 2.0 * h));
        max_cdf_error = max_cdf_error.max((kernel.cdf(a + 2.0 * h) - running).abs());
    }
    let grid: Vec<f64> = (0..=STEPS).map(|i| -1.5 + 3.0 * i as f64 / STEPS as f64).collect();
    let max_asymmetry = grid
        .iter()
        .map(|&x| (kernel.density(x) - kernel.density(-x)).abs())
        .fold(0.0, f64::max);
    let cdf_monotone = grid
        .windows(2)
        .all(|w| kernel.cdf(w[0]) <= kernel.cdf(w[1]));
    KernelCheck {
        integral: running,
        max_asymmetry,
        cdf_monotone,
        cdf_limits: (kernel.cdf(-1.5), kernel.cdf(1.5)),
        max_cdf_error,
    }
}
