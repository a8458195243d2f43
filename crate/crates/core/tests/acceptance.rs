//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test -p rankdep --test acceptance -- 1 3`.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rankdep::coefficients::{
    d_n_brute, d_n_fast, estimate, r_n_brute, r_n_pairwise, taustar_n, taustar_n_brute, xi_n,
    xi_n_untied, xi_star_n, default_grid, CoefficientKind, KernelSpec,
};
use rankdep::independence::{test_mu, test_permutation, test_xi};
use rankdep::null::{uniform_null_sample, EigenGrid, EigenKind, NullModel, XI_NULL_VARIANCE};
use rankdep::seed::replicate_stream;
use rankdep::study::{bank_seed, load_or_build_bank, run_bench, run_power_study, PowerStudyConfig, ResultTable};
use rankdep::{compute_rank_artifacts, PairedSample};
use statrs::distribution::{ContinuousCDF, Normal};

const SEED: u64 = 20_240_601;
const TRUNCATION: usize = 100;
const DRAWS: usize = 1_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Random sample of size `n` with distinct values in both coordinates.
fn untied_sample(rng: &mut impl Rng, n: usize) -> PairedSample {
    let x1: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let x2: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    PairedSample::new(x1, x2).unwrap()
}

fn c1_oracle_equivalence() -> Outcome {
    let mut rng = replicate_stream(SEED, "acceptance-1", 0);
    let mut worst: f64 = 0.0;
    let mut xi_forms_equal = true;
    for _ in 0..200 {
        let n = rng.random_range(5..=12);
        let s = untied_sample(&mut rng, n);
        let a = compute_rank_artifacts(&s, 0).unwrap();
        worst = worst
            .max((d_n_fast(&a).unwrap().value - d_n_brute(&s).unwrap().value).abs())
            .max((taustar_n(&s).unwrap().value - taustar_n_brute(&s).unwrap().value).abs());
        // R needs six points
        if n >= 6 {
            let brute = r_n_brute(&s).unwrap().value;
            worst = worst
                .max((r_n_pairwise(&s).unwrap().value - brute).abs())
                .max((estimate(CoefficientKind::R, &s, 0).unwrap().value - brute).abs());
        }
        xi_forms_equal &= (xi_n(&a).unwrap().value - xi_n_untied(&a).unwrap().value).abs() <= 1e-12;
    }
    outcome(
        worst <= 1e-12 && xi_forms_equal,
        format!("200 samples, n in [5,12] (R from n=6): max |fast - brute| = {worst:.1e}, xi tie form == untied form: {xi_forms_equal}"),
    )
}

fn c2_identity() -> Outcome {
    let mut rng = replicate_stream(SEED, "acceptance-2", 0);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(6..=2000);
        let s = untied_sample(&mut rng, n);
        let a = compute_rank_artifacts(&s, 0).unwrap();
        // R from its own pairwise route, not from the identity
        let d = d_n_fast(&a).unwrap().value;
        let r = r_n_pairwise(&s).unwrap().value;
        let t = taustar_n(&s).unwrap().value;
        worst = worst.max((12.0 * d + 24.0 * r - t).abs());
    }
    outcome(worst <= 1e-12, format!("500 samples, n in [6,2000]: max |12D + 24R - tau*| = {worst:.1e}"))
}

fn c3_comonotone() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [4usize, 10, 100] {
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let a = compute_rank_artifacts(&PairedSample::new(x.clone(), x).unwrap(), 0).unwrap();
        let xi = xi_n(&a).unwrap().value;
        let target = 1.0 - 3.0 / (n as f64 + 1.0);
        ok &= (xi - target).abs() <= 1e-15;
        parts.push(format!("xi_{n} = {xi}"));
    }
    let x = vec![1.0, 2.0, 3.0, 4.0];
    let co = taustar_n(&PairedSample::new(x.clone(), x.clone()).unwrap()).unwrap().value;
    let counter = taustar_n(&PairedSample::new(x.clone(), x.iter().rev().copied().collect()).unwrap()).unwrap().value;
    ok &= (co - 2.0 / 3.0).abs() <= 1e-15 && (counter - 2.0 / 3.0).abs() <= 1e-15;
    parts.push(format!("tau*_4 = {co} / {counter}"));
    outcome(ok, parts.join(", "))
}

fn chisq_null(kind: EigenKind, bank_dir: &Path) -> NullModel {
    load_or_build_bank(EigenKind::DOrR, TRUNCATION, DRAWS, bank_seed(SEED), Some(bank_dir))
        .unwrap()
        .rescaled(kind)
        .unwrap()
}

fn c4_null_calibration(bank_dir: &Path) -> Outcome {
    let d_null = chisq_null(EigenKind::DOrR, bank_dir);
    let t_null = chisq_null(EigenKind::TauStar, bank_dir);
    let reps = 2000;
    let mut rejections = [0usize; 4];
    for rep in 0..reps {
        let s = uniform_null_sample(1000, SEED ^ 4, rep as u64).unwrap();
        rejections[0] += usize::from(test_xi(&s, 0.05, 0).unwrap().reject);
        rejections[1] += usize::from(test_mu(&s, CoefficientKind::D, 0.05, &d_null, 0).unwrap().reject);
        rejections[2] += usize::from(test_mu(&s, CoefficientKind::R, 0.05, &d_null, 0).unwrap().reject);
        rejections[3] += usize::from(test_mu(&s, CoefficientKind::TauStar, 0.05, &t_null, 0).unwrap().reject);
    }
    let sizes: Vec<f64> = rejections.iter().map(|&r| r as f64 / reps as f64).collect();
    let ok = sizes.iter().all(|s| (0.03..=0.07).contains(s));
    outcome(
        ok,
        format!(
            "n=1000, 2000 reps: size xi {:.3}, D {:.3}, R {:.3}, tau* {:.3} (band [0.03, 0.07])",
            sizes[0], sizes[1], sizes[2], sizes[3]
        ),
    )
}

/// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
fn ks_p_value(mut values: Vec<f64>, cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let d = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let p = (1..=100)
        .map(|k| {
            let k = f64::from(k);
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum::<f64>();
    (d, p.clamp(0.0, 1.0))
}

fn c5_normal_limit() -> Outcome {
    let n = 2000;
    let values: Vec<f64> = (0..2000)
        .map(|rep| {
            let s = uniform_null_sample(n, SEED ^ 5, rep).unwrap();
            (n as f64).sqrt() * xi_n(&compute_rank_artifacts(&s, 0).unwrap()).unwrap().value
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    let normal = Normal::new(0.0, XI_NULL_VARIANCE.sqrt()).unwrap();
    let (d, p) = ks_p_value(values, |x| normal.cdf(x));
    outcome(
        (0.36..=0.44).contains(&var) && p > 0.01,
        format!("n=2000, 2000 reps: var(sqrt(n) xi) = {var:.4} (band [0.36, 0.44]), KS D = {d:.4}, p = {p:.3} (> 0.01)"),
    )
}

fn c6_degeneracy() -> Outcome {
    let n = 500;
    let spec = KernelSpec::default_for(n);
    let grid = default_grid(n);
    let (mut sum_star, mut sum_xi, mut mean_star) = (0.0, 0.0, 0.0);
    let reps = 500;
    for rep in 0..reps {
        let s = uniform_null_sample(n, SEED ^ 6, rep).unwrap();
        let a = compute_rank_artifacts(&s, 0).unwrap();
        let root_n = (n as f64).sqrt();
        let star = xi_star_n(&a, &spec, grid).unwrap().value;
        sum_star += (root_n * star).abs();
        mean_star += star;
        sum_xi += (root_n * xi_n(&a).unwrap().value).abs();
    }
    let (m_star, m_xi) = (sum_star / reps as f64, sum_xi / reps as f64);
    outcome(
        m_star < 0.75 * m_xi,
        format!(
            "n=500, 500 reps: mean |sqrt(n) xi*| = {m_star:.3} vs 0.75 * mean |sqrt(n) xi| = {:.3}; mean xi* = {:.4}",
            0.75 * m_xi,
            mean_star / reps as f64
        ),
    )
}

/// Reference empirical powers at n = 500 and 1000: xi, xi*, D, R, tau*.
const TABLE: [(&str, usize, [f64; 5]); 12] = [
    ("a", 500, [0.103, 0.178, 0.954, 0.955, 0.957]),
    ("a", 1000, [0.067, 0.106, 0.956, 0.956, 0.956]),
    ("b", 500, [0.087, 0.138, 0.898, 0.896, 0.897]),
    ("b", 1000, [0.067, 0.089, 0.900, 0.900, 0.899]),
    ("c", 500, [0.088, 0.559, 0.412, 0.404, 0.410]),
    ("c", 1000, [0.066, 0.408, 0.390, 0.391, 0.396]),
    ("d", 500, [0.443, 0.122, 0.913, 0.921, 0.919]),
    ("d", 1000, [0.285, 0.111, 0.923, 0.928, 0.927]),
    ("e", 500, [0.719, 1.000, 0.654, 0.635, 0.643]),
    ("e", 1000, [0.486, 1.000, 0.700, 0.682, 0.692]),
    ("f", 500, [0.688, 1.000, 0.635, 0.603, 0.611]),
    ("f", 1000, [0.459, 1.000, 0.669, 0.655, 0.660]),
];

fn power_table(bank_dir: &Path) -> ResultTable {
    let config = PowerStudyConfig {
        presets: ["a", "b", "c", "d", "e", "f"].map(String::from).to_vec(),
        sizes: vec![500, 1000],
        replicates: 1000,
        alpha: 0.05,
        seed: SEED,
        coefficients: CoefficientKind::ALL.to_vec(),
        delta0: None,
        truncation: TRUNCATION,
        draws: DRAWS,
        xi_star_null_reps: 1000,
        xi_star_max_n: 500,
        bank_dir: Some(bank_dir.to_path_buf()),
        workers: None,
    };
    run_power_study(&config).unwrap()
}

fn c7_table_reproduction(table: &ResultTable) -> Outcome {
    let order = [
        CoefficientKind::Xi,
        CoefficientKind::XiStar,
        CoefficientKind::D,
        CoefficientKind::R,
        CoefficientKind::TauStar,
    ];
    let mut misses = Vec::new();
    let mut compared = 0;
    for (preset, n, reference) in TABLE {
        let row = table.row(preset, n).unwrap();
        let mut line = format!("    ({preset}) n={n:<5}");
        for (kind, &target) in order.iter().zip(&reference) {
            let cell = row.cell(*kind).unwrap();
            let Some(rate) = cell.rate() else {
                line.push_str(&format!(" {}=skip", kind.name()));
                continue;
            };
            // xi* is compared only where the desk-scale sweep covers it
            let checked = *kind != CoefficientKind::XiStar || (n == 500 && ["b", "c", "e", "f"].contains(&preset));
            let off = (rate - target).abs() > 0.05;
            line.push_str(&format!(
                " {}={rate:.3}/{target:.3}{}",
                kind.name(),
                if !checked { "(info)" } else if off { "!" } else { "" }
            ));
            if checked {
                compared += 1;
                if off {
                    misses.push(format!("({preset}) n={n} {}: {rate:.3} vs {target:.3}", kind.name()));
                }
            }
        }
        println!("{line}");
    }
    outcome(
        misses.is_empty(),
        format!(
            "{} of {compared} entries within +-0.05 of the reference powers{}",
            compared - misses.len(),
            if misses.is_empty() { String::new() } else { format!("; outside: {}", misses.join(", ")) }
        ),
    )
}

fn c8_rate_gap(table: &ResultTable) -> Outcome {
    let row = table.row("a", 1000).unwrap();
    let rate = |k| row.cell(k).unwrap().rate().unwrap();
    let xi = rate(CoefficientKind::Xi);
    let others = [rate(CoefficientKind::D), rate(CoefficientKind::R), rate(CoefficientKind::TauStar)];
    outcome(
        xi < 0.15 && others.iter().all(|&p| p > 0.85),
        format!(
            "preset a, n=1000, 1000 reps: xi {xi:.3} (< 0.15), D {:.3}, R {:.3}, tau* {:.3} (> 0.85)",
            others[0], others[1], others[2]
        ),
    )
}

fn c9_permutation_validity() -> Outcome {
    let kinds = [CoefficientKind::Xi, CoefficientKind::D, CoefficientKind::R, CoefficientKind::TauStar];
    let datasets = 1000;
    let mut rejections = [0usize; 4];
    let mut xi_star_note = String::new();
    for rep in 0..datasets {
        let u = uniform_null_sample(200, SEED ^ 9, rep as u64).unwrap();
        let level = |v: &[f64]| v.iter().map(|x| (x * 3.0).floor() + 1.0).collect::<Vec<_>>();
        let s = PairedSample::new(level(u.x1()), level(u.x2())).unwrap();
        for (count, &kind) in rejections.iter_mut().zip(&kinds) {
            *count += usize::from(test_permutation(&s, kind, 0.05, 199, rep as u64).unwrap().reject);
        }
        if rep == 0 {
            if let Err(e) = test_permutation(&s, CoefficientKind::XiStar, 0.05, 199, 0) {
                xi_star_note = format!("; xi* not applicable to tied data ({e})");
            }
        }
    }
    let bound = 0.05 + 3.0 * (0.05 * 0.95 / datasets as f64).sqrt();
    let sizes: Vec<f64> = rejections.iter().map(|&r| r as f64 / datasets as f64).collect();
    outcome(
        sizes.iter().all(|&s| s <= bound),
        format!(
            "n=200 on {{1,2,3}}^2, 1000 datasets, P=199: size xi {:.3}, D {:.3}, R {:.3}, tau* {:.3} (<= {bound:.4}){xi_star_note}",
            sizes[0], sizes[1], sizes[2], sizes[3]
        ),
    )
}

fn c10_benchmark() -> Outcome {
    let kinds = [CoefficientKind::Xi, CoefficientKind::XiStar, CoefficientKind::D];
    let rows = run_bench(&[5000, 10_000], &kinds, 50, SEED).unwrap();
    let total = |k, n| rows.iter().find(|r| r.coefficient == k && r.n == n).unwrap().total_seconds;
    let star_ratio = total(CoefficientKind::XiStar, 5000) / total(CoefficientKind::Xi, 5000);
    let xi_growth = total(CoefficientKind::Xi, 10_000) / total(CoefficientKind::Xi, 5000);
    let d_growth = total(CoefficientKind::D, 10_000) / total(CoefficientKind::D, 5000);
    outcome(
        star_ratio >= 10.0 && xi_growth < 3.0 && d_growth < 3.0,
        format!(
            "50 reps: xi*/xi at n=5000 = {star_ratio:.1}x (>= 10), n 5000 -> 10000 growth xi {xi_growth:.2}, D {d_growth:.2} (< 3)"
        ),
    )
}

/// Null variance of `n τ*ₙ` at n = 5000, logged for the eigenvalue audit.
fn audit_tau_star_variance() {
    let n = 5000;
    let reps = 200;
    let values: Vec<f64> = (0..reps)
        .map(|rep| n as f64 * taustar_n(&uniform_null_sample(n, SEED ^ 11, rep).unwrap()).unwrap().value)
        .collect();
    let mean = values.iter().sum::<f64>() / reps as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let grid = EigenGrid::new(EigenKind::TauStar, TRUNCATION).unwrap();
    println!(
        "audit: n=5000, {reps} null reps: mean(n tau*) = {mean:.4}, var(n tau*) = {var:.4}; \
         2 sum lambda^2 with lambda = 36/(pi^4 v1^2 v2^2): {:.4}; with sum lambda^2 = 1/225: {:.4}",
        2.0 * grid.weight_square_sum(),
        2.0 / 225.0
    );
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wants = |i: usize| selected.is_empty() || selected.contains(&i);
    let bank_dir = tempfile::tempdir().unwrap();
    let mut failures = 0;
    let mut report = |id: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        if !wants(id) {
            return;
        }
        let start = Instant::now();
        let o = run();
        failures += usize::from(!o.pass);
        println!(
            "criterion {id:>2} {} {name} [{:.1}s]: {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    };
    report(1, "oracle equivalence", &mut c1_oracle_equivalence);
    report(2, "12D + 24R = tau* identity", &mut c2_identity);
    report(3, "comonotone checkpoints", &mut c3_comonotone);
    report(4, "null calibration", &mut || c4_null_calibration(bank_dir.path()));
    report(5, "normal limit of xi", &mut c5_normal_limit);
    report(6, "xi* faster-than-root-n degeneracy", &mut c6_degeneracy);
    let table = (wants(7) || wants(8)).then(|| power_table(bank_dir.path()));
    if let Some(table) = &table {
        report(7, "power table reproduction", &mut || c7_table_reproduction(table));
        report(8, "rate sub-optimality gap", &mut || c8_rate_gap(table));
    }
    report(9, "permutation validity on tied data", &mut c9_permutation_validity);
    report(10, "benchmark ratios", &mut c10_benchmark);
    if selected.is_empty() || selected.contains(&11) {
        audit_tau_star_variance();
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
