use rankdep::alternatives::*;
use rankdep::coefficients::taustar_n;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `∫ h(x) dx` over `[a, b]` for the two factor shapes used below.
fn integral_abs(a: f64, b: f64) -> f64 {
    // cells never straddle zero
    (b * b - a * a).abs() / 2.0
}

fn integral_linear(a: f64, b: f64) -> f64 {
    (b * b - a * a) / 2.0
}

/// Chi-square goodness of fit of `draws` from `G` on a 20×20 grid.
fn histogram_p_value(g: DependentDensity, draws: usize, seed: u64) -> f64 {
    let model = AlternativeModel::Mixture { g, envelope: 2.0 };
    let s = model.sample(1.0, draws, seed).unwrap();
    let k = 20;
    let cell = |x: f64| (((x + 1.0) / 2.0 * k as f64) as usize).min(k - 1);
    let mut counts = vec![0usize; k * k];
    for (a, b) in s.x1().iter().zip(s.x2()) {
        counts[cell(*a) * k + cell(*b)] += 1;
    }
    let edge = |i: usize| -1.0 + 2.0 * i as f64 / k as f64;
    let mut stat = 0.0;
    for i in 0..k {
        for j in 0..k {
            let (a1, b1, a2, b2) = (edge(i), edge(i + 1), edge(j), edge(j + 1));
            let area = (b1 - a1) * (b2 - a2);
            let mass = 0.25
                * match g {
                    DependentDensity::Farlie => area + integral_linear(a1, b1) * integral_linear(a2, b2),
                    DependentDensity::AbsoluteFarlie => area - integral_abs(a1, b1) * integral_linear(a2, b2),
                };
            let expected = mass * draws as f64;
            let observed = counts[i * k + j] as f64;
            stat += (observed - expected).powi(2) / expected;
        }
    }
    ChiSquared::new((k * k - 1) as f64).unwrap().sf(stat)
}

#[test]
fn mixture_components_fit_their_densities() {
    for (g, seed) in [(DependentDensity::Farlie, 1), (DependentDensity::AbsoluteFarlie, 2)] {
        let p = histogram_p_value(g, 100_000, seed);
        assert!(p > 0.01, "{g:?}: p = {p}");
    }
}

#[test]
fn envelope_holds_over_a_million_proposals() {
    // at Δ = 1 every pair is a rejection draw, two proposals on average
    for name in ["b", "c"] {
        let p = preset(name).unwrap();
        assert!(p.model.sample(1.0, 500_000, 9).is_ok());
    }
}

#[test]
fn null_presets_center_tau_star() {
    for name in PRESET_NAMES {
        let p = preset(&name.to_string()).unwrap().with_delta0(0.0).unwrap();
        let reps = 300;
        let values: Vec<f64> = (0..reps)
            .map(|r| taustar_n(&p.sample(100, r).unwrap()).unwrap().value)
            .collect();
        let mean = values.iter().sum::<f64>() / reps as f64;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        assert!(mean.abs() < 4.0 * sd / (reps as f64).sqrt(), "{name}: {mean}");
    }
}

#[test]
fn sinusoid_preset_shape() {
    let f = preset("f").unwrap();
    assert_eq!(f.schedule(500).delta_n(), 12.0 / 500f64.sqrt());
    let s = f.sample(500, 3).unwrap();
    assert_eq!(s.len(), 500);
    assert!(s.x1().iter().all(|v| (-1.0..=1.0).contains(v)));
}
