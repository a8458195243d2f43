use statrs::distribution::{ContinuousCDF, Normal};

use super::NullModel;

/// Limiting variance of `√n ξₙ` under independence.
pub const XI_NULL_VARIANCE: f64 = 0.4;

fn standard() -> Normal {
    Normal::standard()
}

pub fn standard_normal_quantile(p: f64) -> f64 {
    standard().inverse_cdf(p)
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    standard().cdf(x)
}

pub fn normal_xi_null() -> NullModel {
    NullModel::NormalXi {
        variance: XI_NULL_VARIANCE,
    }
}
