//! Seeded power and timing studies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::alternatives::{preset, Preset};
use crate::coefficients::{estimate, CoefficientKind, KernelSpec};
use crate::error::{RankError, Result};
use crate::independence::{default_xi_star_null, eigen_kind_for, test_mu, test_xi, test_xi_star};
use crate::null::{
    read_bank, weighted_chisq_null, write_bank, EigenKind, NullModel, DEFAULT_DRAWS,
    DEFAULT_TRUNCATION,
};
use crate::seed::{derive_seed, label_hash};

pub const MIN_STUDY_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerStudyConfig {
    pub presets: Vec<String>,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub coefficients: Vec<CoefficientKind>,
    /// Replaces every preset's `Δ₀`; zero gives a size study.
    pub delta0: Option<f64>,
    pub truncation: usize,
    pub draws: usize,
    /// Monte Carlo replicates behind each ξ* critical value.
    pub xi_star_null_reps: usize,
    /// ξ* is skipped at `n` above this unless raised.
    pub xi_star_max_n: usize,
    #[serde(skip)]
    pub bank_dir: Option<PathBuf>,
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for PowerStudyConfig {
    fn default() -> Self {
        Self {
            presets: ["a", "b", "c", "d", "e", "f"].map(String::from).to_vec(),
            sizes: vec![500, 1000],
            replicates: 500,
            alpha: 0.05,
            seed: 20_240_601,
            coefficients: CoefficientKind::ALL.to_vec(),
            delta0: None,
            truncation: DEFAULT_TRUNCATION,
            draws: DEFAULT_DRAWS,
            xi_star_null_reps: 1000,
            xi_star_max_n: 1000,
            bank_dir: None,
            workers: None,
        }
    }
}

impl PowerStudyConfig {
    pub fn validate(&self) -> Result<Vec<Preset>> {
        if self.replicates == 0 {
            return Err(RankError::Config("replicates must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(RankError::InvalidAlpha(self.alpha));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < MIN_STUDY_N) {
            return Err(RankError::Config(format!(
                "sample sizes must be given and at least {MIN_STUDY_N}"
            )));
        }
        if self.coefficients.is_empty() {
            return Err(RankError::Config("no coefficients requested".into()));
        }
        if self.workers == Some(0) {
            return Err(RankError::Config("workers must be at least 1".into()));
        }
        self.presets
            .iter()
            .map(|name| {
                let p = preset(name)?;
                match self.delta0 {
                    Some(d0) => p.with_delta0(d0),
                    None => Ok(p),
                }
            })
            .collect()
    }

    /// SHA-256 over every setting that can change the results.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)
            .iter()
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    fn runs_xi_star(&self, n: usize) -> bool {
        self.coefficients.contains(&CoefficientKind::XiStar) && n <= self.xi_star_max_n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub coefficient: CoefficientKind,
    pub rejections: usize,
    /// Replicates that produced a decision.
    pub replicates: usize,
    pub skipped: bool,
    pub error: Option<String>,
}

impl CellResult {
    pub fn rate(&self) -> Option<f64> {
        (self.replicates > 0).then(|| self.rejections as f64 / self.replicates as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub preset: String,
    pub n: usize,
    pub delta0: f64,
    pub cells: Vec<CellResult>,
    pub seconds: f64,
}

impl ResultRow {
    pub fn cell(&self, kind: CoefficientKind) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.coefficient == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub config: PowerStudyConfig,
    pub digest: String,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, preset: &str, n: usize) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.preset == preset && r.n == n)
    }

    /// One line per `(preset, n)`, one column per coefficient; rates to
    /// three decimals, `-` for skipped cells and `NA` for failed ones.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("preset\tn\treps");
        for k in &self.config.coefficients {
            out.push('\t');
            out.push_str(k.name());
        }
        out.push_str("\tseconds\n");
        for row in &self.rows {
            let _ = write!(out, "{}\t{}\t{}", row.preset, row.n, self.config.replicates);
            for cell in &row.cells {
                match (cell.skipped, cell.rate()) {
                    (true, _) => out.push_str("\t-"),
                    (false, Some(rate)) => {
                        let _ = write!(out, "\t{rate:.3}");
                    }
                    (false, None) => out.push_str("\tNA"),
                }
            }
            let _ = writeln!(out, "\t{:.2}", row.seconds);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Seed for replicate `rep` of cell `(preset, n)`.
pub fn replicate_seed(master: u64, preset: &str, n: usize, rep: usize) -> u64 {
    derive_seed(master, &[label_hash(preset), n as u64, rep as u64])
}

/// Seed of the weighted chi-square draws used by a study with this master seed.
pub fn bank_seed(master: u64) -> u64 {
    derive_seed(master, &[label_hash("weighted-chisq")])
}

/// Cache file for a bank with these parameters inside `dir`.
pub fn bank_path(dir: &Path, kind: EigenKind, v: usize, b: usize, seed: u64) -> PathBuf {
    let name = match kind {
        EigenKind::DOrR => "d_or_r",
        EigenKind::TauStar => "tau_star",
    };
    dir.join(format!("{name}-V{v}-B{b}-{seed:016x}.bank"))
}

/// Builds a weighted chi-square bank, reusing a cached file in `dir` when
/// one exists for the same kind, truncation, draw count and seed.
pub fn load_or_build_bank(
    kind: EigenKind,
    truncation: usize,
    draws: usize,
    seed: u64,
    dir: Option<&Path>,
) -> Result<NullModel> {
    let Some(dir) = dir else {
        return weighted_chisq_null(kind, truncation, draws, seed);
    };
    let path = bank_path(dir, kind, truncation, draws, seed);
    if path.exists() {
        return read_bank(&path);
    }
    let null = weighted_chisq_null(kind, truncation, draws, seed)?;
    std::fs::create_dir_all(dir).map_err(|e| RankError::BankFormat(format!("{}: {e}", dir.display())))?;
    write_bank(&path, &null)?;
    Ok(null)
}

struct Nulls {
    chisq: BTreeMap<EigenKind, NullModel>,
    xi_star: BTreeMap<usize, NullModel>,
}

fn build_nulls(config: &PowerStudyConfig) -> Result<Nulls> {
    // one simulation serves both grids; they differ by a constant factor
    let mut chisq = BTreeMap::new();
    let kinds: Vec<EigenKind> = config.coefficients.iter().filter_map(|&k| eigen_kind_for(k)).collect();
    if !kinds.is_empty() {
        let base = load_or_build_bank(
            EigenKind::DOrR,
            config.truncation,
            config.draws,
            bank_seed(config.seed),
            config.bank_dir.as_deref(),
        )?;
        for kind in kinds {
            chisq.insert(kind, base.rescaled(kind).expect("weighted chi-square bank"));
        }
    }
    let mut xi_star = BTreeMap::new();
    for &n in &config.sizes {
        if config.runs_xi_star(n) && !xi_star.contains_key(&n) {
            let seed = derive_seed(config.seed, &[label_hash("xi-star-null"), n as u64]);
            xi_star.insert(n, default_xi_star_null(n, config.xi_star_null_reps, seed)?);
        }
    }
    Ok(Nulls { chisq, xi_star })
}

/// Decision of each requested test on one shared dataset.
fn replicate_decisions(
    config: &PowerStudyConfig,
    nulls: &Nulls,
    preset: &Preset,
    n: usize,
    seed: u64,
) -> Vec<Option<Result<bool>>> {
    let sample = preset.sample(n, seed);
    config
        .coefficients
        .iter()
        .map(|&kind| {
            if kind == CoefficientKind::XiStar && !config.runs_xi_star(n) {
                return None;
            }
            let sample = match &sample {
                Ok(s) => s,
                Err(e) => return Some(Err(e.clone())),
            };
            let result = match kind {
                CoefficientKind::Xi => test_xi(sample, config.alpha, seed),
                CoefficientKind::XiStar => test_xi_star(
                    sample,
                    config.alpha,
                    &KernelSpec::default_for(n),
                    &nulls.xi_star[&n],
                    seed,
                ),
                _ => {
                    let grid = eigen_kind_for(kind).expect("asymptotic kinds have grids");
                    test_mu(sample, kind, config.alpha, &nulls.chisq[&grid], seed)
                }
            };
            Some(result.map(|r| r.reject))
        })
        .collect()
}

fn run_cell(config: &PowerStudyConfig, nulls: &Nulls, preset: &Preset, n: usize) -> ResultRow {
    let start = Instant::now();
    let name = preset.name.to_string();
    let per_rep: Vec<Vec<Option<Result<bool>>>> = (0..config.replicates)
        .into_par_iter()
        .map(|rep| replicate_decisions(config, nulls, preset, n, replicate_seed(config.seed, &name, n, rep)))
        .collect();
    let cells = config
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, &coefficient)| {
            let mut cell = CellResult {
                coefficient,
                rejections: 0,
                replicates: 0,
                skipped: false,
                error: None,
            };
            for decisions in &per_rep {
                match &decisions[j] {
                    None => cell.skipped = true,
                    Some(Ok(reject)) => {
                        cell.replicates += 1;
                        cell.rejections += usize::from(*reject);
                    }
                    Some(Err(e)) => {
                        cell.error.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            cell
        })
        .collect();
    ResultRow {
        preset: name,
        n,
        delta0: preset.delta0,
        cells,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs every `(preset, n)` cell. A failing replicate is recorded in its
/// cell without affecting other cells; results do not depend on `workers`.
pub fn run_power_study(config: &PowerStudyConfig) -> Result<ResultTable> {
    let presets = config.validate()?;
    let run = || -> Result<ResultTable> {
        let nulls = build_nulls(config)?;
        let rows = presets
            .iter()
            .flat_map(|p| config.sizes.iter().map(move |&n| (p, n)))
            .map(|(p, n)| run_cell(config, &nulls, p, n))
            .collect();
        Ok(ResultTable {
            config: config.clone(),
            digest: config.digest(),
            rows,
        })
    };
    match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| RankError::Config(e.to_string()))?
            .install(run),
        None => run(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub coefficient: CoefficientKind,
    pub n: usize,
    pub reps: usize,
    /// Wall-clock seconds summed over all replicates.
    pub total_seconds: f64,
}

/// Times each coefficient on `reps` rotation-alternative datasets per size.
/// Datasets are generated outside the timed region; evaluation is serial.
pub fn run_bench(
    sizes: &[usize],
    coefficients: &[CoefficientKind],
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if coefficients.is_empty() {
        return Err(RankError::Config("no coefficients requested".into()));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < 2) {
        return Err(RankError::InsufficientData {
            required: 2,
            actual: n,
        });
    }
    let model = preset("a")?;
    let mut rows = Vec::new();
    for &n in sizes {
        let mut totals = vec![0.0; coefficients.len()];
        for rep in 0..reps {
            let rep_seed = replicate_seed(seed, "bench", n, rep);
            let sample = model.sample(n, rep_seed)?;
            for (total, &kind) in totals.iter_mut().zip(coefficients) {
                let start = Instant::now();
                std::hint::black_box(estimate(kind, &sample, rep_seed)?);
                *total += start.elapsed().as_secs_f64();
            }
        }
        rows.extend(coefficients.iter().zip(totals).map(|(&coefficient, total_seconds)| BenchRow {
            coefficient,
            n,
            reps,
            total_seconds,
        }));
    }
    Ok(rows)
}
