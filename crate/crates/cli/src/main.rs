use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rankdep::coefficients::{d_n_fast, r_n_pairwise, taustar_n, CoefficientEstimate};
use rankdep::independence::{default_xi_star_null, test_auto, test_permutation};
use rankdep::null::{write_bank, weighted_chisq_null, EigenKind, NullModel, DEFAULT_DRAWS, DEFAULT_TRUNCATION};
use rankdep::study::{bank_path, bank_seed, load_or_build_bank, run_bench, run_power_study, PowerStudyConfig};
use rankdep::{coefficients, compute_rank_artifacts, CoefficientKind, PairedSample, RankError, TestResult};

const USAGE: u8 = 2;
const DATA: u8 = 3;
const NUMERIC: u8 = 4;

/// An error paired with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: USAGE, error: anyhow!(msg.into()) }
    }

    fn data(error: anyhow::Error) -> Self {
        Self { code: DATA, error }
    }
}

fn exit_code(e: &RankError) -> u8 {
    match e {
        RankError::InvalidAlpha(_)
        | RankError::InvalidTruncation { .. }
        | RankError::InvalidDrawCount { .. }
        | RankError::InvalidGrid(_)
        | RankError::InvalidBandwidth(_)
        | RankError::InvalidDelta(_)
        | RankError::UnknownPreset(_)
        | RankError::KindMismatch(_)
        | RankError::NullMismatch(_)
        | RankError::Config(_) => USAGE,
        RankError::InsufficientData { .. }
        | RankError::LengthMismatch { .. }
        | RankError::NonFinite { .. }
        | RankError::DegenerateMarginal
        | RankError::TiesUnsupported(_)
        | RankError::TooLargeForBruteForce { .. }
        | RankError::BankFormat(_) => DATA,
        RankError::EnvelopeViolation { .. } => NUMERIC,
        RankError::Replicate { source, .. } => exit_code(source),
    }
}

impl From<RankError> for Failure {
    fn from(e: RankError) -> Self {
        Self { code: exit_code(&e), error: e.into() }
    }
}

type CliResult<T> = Result<T, Failure>;

#[derive(Parser)]
#[command(name = "rankdep", version, about = "Rank correlations and tests of independence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute coefficients on a two-column CSV file.
    Corr(CorrArgs),
    /// Test independence on a two-column CSV file.
    Test(TestArgs),
    /// Run a seeded power (or, with --delta0 0, size) study.
    Power(PowerArgs),
    /// Time the coefficient estimators.
    Bench(BenchArgs),
    /// Build and cache a weighted chi-square null bank.
    NullBank(NullBankArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Args)]
struct InputArgs {
    /// Two comma-separated numeric columns.
    #[arg(long)]
    input: PathBuf,
    /// Treat the first row as data.
    #[arg(long)]
    no_header: bool,
}

#[derive(Args)]
struct CorrArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Coefficients to compute (xi, xi_star, d, r, tau_star).
    #[arg(long, value_delimiter = ',', default_values_t = CoefficientKind::ALL.to_vec())]
    coeff: Vec<CoefficientKind>,
    /// Seed for breaking ties in the first column.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Args)]
struct NullArgs {
    /// Cache directory for weighted chi-square banks.
    #[arg(long)]
    bank_dir: Option<PathBuf>,
    /// Eigenvalue grid truncation V.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    /// Weighted chi-square draws B.
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    draws: usize,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Coefficient to test (xi, xi_star, d, r, tau_star).
    #[arg(long)]
    coeff: CoefficientKind,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Force a permutation test with this many permutations.
    #[arg(long)]
    permutation: Option<usize>,
    /// Permutations used when ties rule out the asymptotic null.
    #[arg(long, default_value_t = 999)]
    fallback_permutations: usize,
    /// Monte Carlo replicates for the xi* null.
    #[arg(long, default_value_t = 1000)]
    xi_star_reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    null: NullArgs,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["a", "b", "c", "d", "e", "f"].map(String::from).to_vec())]
    preset: Vec<String>,
    #[arg(long = "n", value_delimiter = ',', default_values_t = vec![500, 1000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Override every preset's Δ₀ (0 gives a size study).
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = CoefficientKind::ALL.to_vec())]
    coeff: Vec<CoefficientKind>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    null: NullArgs,
    /// Monte Carlo replicates behind each xi* critical value.
    #[arg(long, default_value_t = 1000)]
    xi_star_reps: usize,
    /// Skip xi* above this sample size.
    #[arg(long, default_value_t = 1000)]
    xi_star_max_n: usize,
    /// Write PREFIX.tsv and PREFIX.json instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = vec![500, 1000, 5000, 10000])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = CoefficientKind::ALL.to_vec())]
    coeff: Vec<CoefficientKind>,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct NullBankArgs {
    /// d, r or tau_star.
    #[arg(long)]
    coeff: CoefficientKind,
    #[command(flatten)]
    null: NullArgs,
    /// Master seed; `power` with the same seed and bank directory reuses the file.
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    /// Output file; defaults to the canonical name inside --bank-dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_sample(args: &InputArgs) -> CliResult<PairedSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(!args.no_header)
        .trim(csv::Trim::All)
        .from_path(&args.input)
        .with_context(|| format!("cannot open {}", args.input.display()))
        .map_err(Failure::data)?;
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record
            .with_context(|| format!("malformed CSV in {}", args.input.display()))
            .map_err(Failure::data)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Failure::usage(format!("line {line}: expected 2 columns, found {}", record.len())));
        }
        let cell = |i: usize| -> CliResult<f64> {
            record[i].parse::<f64>().map_err(|_| {
                Failure::usage(format!("line {line}: column {}: '{}' is not a number", i + 1, &record[i]))
            })
        };
        pairs.push((cell(0)?, cell(1)?));
    }
    Ok(PairedSample::from_pairs(&pairs)?)
}

fn corr(args: CorrArgs) -> CliResult<()> {
    if args.coeff.is_empty() {
        return Err(Failure::usage("no coefficients requested"));
    }
    let sample = read_sample(&args.input)?;
    let artifacts = compute_rank_artifacts(&sample, args.seed)?;
    let estimates = args
        .coeff
        .iter()
        .map(|&k| coefficients::estimate_with(k, &sample, &artifacts))
        .collect::<Result<Vec<CoefficientEstimate>, _>>()?;
    let tied = sample.has_ties_x1() || sample.has_ties_x2();
    let wants = |k| args.coeff.contains(&k);
    // R through its own exact route so the check is not circular
    let residual = if !tied && wants(CoefficientKind::D) && wants(CoefficientKind::R) && wants(CoefficientKind::TauStar) {
        let d = d_n_fast(&artifacts)?.value;
        let r = r_n_pairwise(&sample)?.value;
        Some(12.0 * d + 24.0 * r - taustar_n(&sample)?.value)
    } else {
        None
    };
    if estimates.iter().any(|e| !e.value.is_finite()) {
        return Err(Failure { code: NUMERIC, error: anyhow!("non-finite coefficient value") });
    }
    match args.format {
        Format::Tsv => {
            let mut out = String::from("coefficient\tvalue\tn\tties_x1\tties_x2\talgorithm\n");
            for e in &estimates {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    e.kind, e.value, e.n, sample.has_ties_x1(), sample.has_ties_x2(), e.algorithm
                );
            }
            if let Some(r) = residual {
                let _ = writeln!(out, "identity_residual\t{r:e}");
            }
            print!("{out}");
        }
        Format::Json => {
            let json = serde_json::json!({
                "n": sample.len(),
                "ties_x1": sample.has_ties_x1(),
                "ties_x2": sample.has_ties_x2(),
                "estimates": estimates,
                "identity_residual": residual,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
        }
    }
    Ok(())
}

fn print_test(result: &TestResult, format: Format) {
    match format {
        Format::Tsv => {
            println!("coefficient\t{}", result.kind);
            println!("statistic\t{}", result.statistic);
            println!("critical_value\t{}", result.critical_value);
            println!("p_value\t{}", result.p_value);
            println!("alpha\t{}", result.alpha);
            println!("reject\t{}", result.reject);
            println!("null\t{:?}", result.null_kind);
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(result).expect("serializable")),
    }
}

fn test(args: TestArgs) -> CliResult<()> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Failure::usage(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let sample = read_sample(&args.input)?;
    let result = if let Some(p) = args.permutation {
        test_permutation(&sample, args.coeff, args.alpha, p, args.seed)?
    } else {
        let tied = sample.has_ties_x1() || sample.has_ties_x2();
        let null: Option<NullModel> = match args.coeff {
            _ if tied => None,
            CoefficientKind::Xi => None,
            CoefficientKind::XiStar => Some(default_xi_star_null(sample.len(), args.xi_star_reps, args.seed)?),
            kind => {
                let grid = rankdep::independence::eigen_kind_for(kind).expect("asymptotic kind");
                let base = load_or_build_bank(
                    EigenKind::DOrR,
                    args.null.truncation,
                    args.null.draws,
                    bank_seed(args.seed),
                    args.null.bank_dir.as_deref(),
                )?;
                base.rescaled(grid)
            }
        };
        test_auto(&sample, args.coeff, args.alpha, null.as_ref(), args.fallback_permutations, args.seed)?
    };
    print_test(&result, args.format);
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::data)
}

fn power(args: PowerArgs) -> CliResult<()> {
    let config = PowerStudyConfig {
        presets: args.preset,
        sizes: args.sizes,
        replicates: args.reps,
        alpha: args.alpha,
        seed: args.seed,
        coefficients: args.coeff,
        delta0: args.delta0,
        truncation: args.null.truncation,
        draws: args.null.draws,
        xi_star_null_reps: args.xi_star_reps,
        xi_star_max_n: args.xi_star_max_n,
        bank_dir: args.null.bank_dir,
        workers: args.workers,
    };
    let table = run_power_study(&config)?;
    match args.out {
        Some(prefix) => {
            write_file(&prefix.with_extension("tsv"), &table.to_tsv())?;
            write_file(&prefix.with_extension("json"), &table.to_json())?;
            eprintln!("wrote {0}.tsv and {0}.json (digest {1})", prefix.display(), table.digest);
        }
        None => match args.format {
            Format::Tsv => print!("{}", table.to_tsv()),
            Format::Json => println!("{}", table.to_json()),
        },
    }
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult<()> {
    if args.coeff.is_empty() {
        return Err(Failure::usage("no coefficients requested"));
    }
    let rows = run_bench(&args.sizes, &args.coeff, args.reps, args.seed)?;
    println!("coefficient\tn\treps\ttotal_seconds");
    for r in rows {
        println!("{}\t{}\t{}\t{:.6}", r.coefficient, r.n, r.reps, r.total_seconds);
    }
    Ok(())
}

fn null_bank(args: NullBankArgs) -> CliResult<()> {
    let kind = rankdep::independence::eigen_kind_for(args.coeff)
        .ok_or_else(|| Failure::usage(format!("{} has no weighted chi-square limit", args.coeff)))?;
    let seed = bank_seed(args.seed);
    let path = match (args.out, args.null.bank_dir) {
        (Some(path), _) => path,
        (None, Some(dir)) => {
            fs::create_dir_all(&dir)
                .with_context(|| format!("cannot create {}", dir.display()))
                .map_err(Failure::data)?;
            bank_path(&dir, kind, args.null.truncation, args.null.draws, seed)
        }
        (None, None) => return Err(Failure::usage("give --out or --bank-dir")),
    };
    let null = weighted_chisq_null(kind, args.null.truncation, args.null.draws, seed)?;
    write_bank(&path, &null)?;
    println!("bank\t{}", path.display());
    let bank = null.bank().expect("weighted chi-square bank");
    for alpha in [0.10, 0.05, 0.01] {
        println!("q_{:.2}\t{}", 1.0 - alpha, bank.upper_critical(alpha));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Corr(a) => corr(a),
        Command::Test(a) => test(a),
        Command::Power(a) => power(a),
        Command::Bench(a) => bench(a),
        Command::NullBank(a) => null_bank(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
