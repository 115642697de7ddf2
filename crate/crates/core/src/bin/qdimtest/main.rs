//! Command-line front end for the dimension test: bound evaluation, the
//! certified-qubits sweep, Monte-Carlo simulation, and the numerical
//! verification suites.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdimtest::bounds::{
    bound_exact, bound_mub_extractor, bound_pairwise, bound_stirling, BasisFamily, BoundReport,
    ProtocolParams,
};
use qdimtest::format::g12;
use qdimtest::noise::{certified_sweep, scale_noise, NoiseParams, PipelineOptions, SweepRow};
use qdimtest::oracle;
use qdimtest::sim::{
    confidence_lower_hoeffding, run_trials, run_trials_logged, EmpiricalPass, Strategy, TrialRecord,
};

#[derive(Parser)]
#[command(
    name = "qdimtest",
    version,
    about = "Certified quantum-dimension lower bounds: bounds, sweeps, simulation, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the dimension bounds for one (n, t, p) instance.
    Bound(BoundArgs),
    /// Certified qubits over a range of n and total noise rates.
    Sweep(SweepArgs),
    /// Monte-Carlo protocol simulation with a chosen prover strategy.
    Simulate(SimulateArgs),
    /// Numerical verification of the underlying entropy inequalities.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Xz,
    Xyz,
    Bb84,
    SixState,
    Mub,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Jsonl,
}

#[derive(Args)]
struct BoundArgs {
    /// Number of protocol qubits.
    #[arg(long)]
    n: u64,
    /// Mismatch threshold t (exclusive with --alpha).
    #[arg(long, conflicts_with = "alpha")]
    t: Option<u64>,
    /// Threshold fraction alpha in [0, 1/2); t = floor(alpha n).
    #[arg(long)]
    alpha: Option<f64>,
    /// Pass probability.
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum, default_value = "xz")]
    family: FamilyArg,
    /// Qudit dimension for --family mub (prime power).
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 5)]
    n_min: u64,
    #[arg(long, default_value_t = 90)]
    n_max: u64,
    /// Total noise rates, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.001, 0.005, 0.01])]
    totals: Vec<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Apply gate depolarizing even to identity encode/decode steps.
    #[arg(long)]
    depolarize_identity: bool,
    /// Charge the two-gate encoding HX two depolarizing applications.
    #[arg(long)]
    per_gate_depolarizing: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, conflicts_with = "alpha")]
    t: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Total noise rate split in the base profile proportions.
    #[arg(long, conflicts_with = "noise")]
    total: Option<f64>,
    /// Explicit rates p1,p2,p3,p4.
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "honest")]
    strategy: StrategyArg,
    /// Stored qubits for --strategy store-k.
    #[arg(long)]
    k: Option<u64>,
    /// Fixed answer bit-string (qubit 0 first) for --strategy fixed.
    #[arg(long)]
    answer: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Run seed; defaults to QDIMTEST_SEED when set.
    #[arg(long, env = "QDIMTEST_SEED", default_value_t = 0)]
    seed: u64,
    /// One-sided confidence level is 1 - delta.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Report the Hoeffding lower bound instead of Clopper-Pearson.
    #[arg(long)]
    hoeffding: bool,
    /// Write the per-trial log as JSON lines.
    #[arg(long)]
    trial_log: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[arg(long)]
    depolarize_identity: bool,
    #[arg(long)]
    per_gate_depolarizing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Honest,
    StoreK,
    ClassicalGuess,
    Fixed,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, env = "QDIMTEST_SEED", default_value_t = 0)]
    seed: u64,
    /// Instances per suite.
    #[arg(long, default_value_t = 500)]
    count: u64,
    /// Restrict instances to one Alice size n (suite dependent).
    #[arg(long)]
    n: Option<u64>,
    /// Directory for violation dumps (default: current directory).
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Uncertainty,
    Logdim,
    DataProcessing,
    Fano,
    Averaged,
    SelfTest,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode, Box<dyn std::error::Error>> {
    match Cli::parse().command {
        Command::Bound(args) => cmd_bound(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn resolve_threshold(n: u64, t: Option<u64>, alpha: Option<f64>) -> Result<u64, String> {
    match (t, alpha) {
        (Some(t), None) => Ok(t),
        (None, Some(a)) => {
            if !(0.0..=0.5).contains(&a) {
                return Err(format!("--alpha {a} outside [0, 0.5]"));
            }
            Ok(qdimtest::entropy::threshold_from_alpha(n, a))
        }
        (None, None) => Err("exactly one of --t or --alpha is required".into()),
        (Some(_), Some(_)) => Err("--t and --alpha are mutually exclusive".into()),
    }
}

fn family_of(arg: FamilyArg, d: u32) -> BasisFamily {
    match arg {
        FamilyArg::Xz => BasisFamily::Xz,
        FamilyArg::Xyz => BasisFamily::Xyz,
        FamilyArg::Bb84 => BasisFamily::Bb84,
        FamilyArg::SixState => BasisFamily::SixState,
        FamilyArg::Mub => BasisFamily::Mub(d),
    }
}

const BOUND_COLUMNS: &str =
    "variant,n,t,alpha,p,log2_dim_lower,certified_qubits,vacuous,asymptotic,outside_regime";

fn bound_csv_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.variant.name(),
        r.n,
        r.t,
        g12(r.t as f64 / r.n as f64),
        g12(r.p),
        g12(r.log2_dim_lower),
        g12(r.certified_qubits),
        r.vacuous,
        r.asymptotic,
        r.outside_regime
    )
}

fn bound_json_row(r: &BoundReport) -> String {
    format!(
        "{{\"variant\":\"{}\",\"n\":{},\"t\":{},\"alpha\":{},\"p\":{},\"log2_dim_lower\":{},\"certified_qubits\":{},\"vacuous\":{},\"asymptotic\":{},\"outside_regime\":{}}}",
        r.variant.name(),
        r.n,
        r.t,
        g12(r.t as f64 / r.n as f64),
        g12(r.p),
        g12(r.log2_dim_lower),
        g12(r.certified_qubits),
        r.vacuous,
        r.asymptotic,
        r.outside_regime
    )
}

fn bound_text_row(r: &BoundReport) -> String {
    let mut caveats = Vec::new();
    if r.vacuous {
        caveats.push("vacuous threshold: M = 2^n, the bound carries no information");
    }
    if r.asymptotic {
        caveats.push("asymptotic: derived for sufficiently large n");
    }
    if r.outside_regime {
        caveats.push("t >= n/2, outside the stated threshold regime");
    }
    let caveats = if caveats.is_empty() {
        String::new()
    } else {
        format!("  [{}]", caveats.join("; "))
    };
    format!(
        "{:<22} log2_dim_lower = {:<18} certified_qubits = {}{}",
        r.variant.name(),
        g12(r.log2_dim_lower),
        g12(r.certified_qubits),
        caveats
    )
}

fn cmd_bound(args: BoundArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let t = resolve_threshold(args.n, args.t, args.alpha)?;
    let family = family_of(args.family, args.d);
    let params = ProtocolParams::new(args.n, t, family)?;
    let reports: Vec<BoundReport> = match family {
        BasisFamily::Xz => vec![
            bound_exact(&params, args.p)?,
            bound_stirling(&params, args.p)?,
        ],
        BasisFamily::Xyz | BasisFamily::Bb84 | BasisFamily::SixState => {
            vec![bound_pairwise(&params, args.p)?]
        }
        BasisFamily::Mub(_) => vec![bound_mub_extractor(&params, args.p)?],
    };
    match args.format {
        OutputFormat::Text => {
            println!(
                "n = {}  t = {}  alpha = {}  p = {}  family = {}",
                params.n(),
                params.t(),
                g12(params.alpha()),
                g12(args.p),
                family.name()
            );
            for r in &reports {
                println!("{}", bound_text_row(r));
            }
            if reports.iter().any(|r| r.vacuous) {
                eprintln!(
                    "warning: M = 2^n at t = {}; the bound is vacuous",
                    params.t()
                );
            }
        }
        OutputFormat::Csv => {
            println!("{BOUND_COLUMNS}");
            for r in &reports {
                println!("{}", bound_csv_row(r));
            }
        }
        OutputFormat::Jsonl => {
            for r in &reports {
                println!("{}", bound_json_row(r));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

const SWEEP_COLUMNS: &str = "n,total,t_star,alpha_star,p_X,p_Z,p,certified_qubits";

fn sweep_csv_row(r: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.n,
        g12(r.total),
        r.t_star,
        g12(r.alpha_star),
        g12(r.p_x),
        g12(r.p_z),
        g12(r.p),
        g12(r.certified_qubits)
    )
}

fn sweep_json_row(r: &SweepRow) -> String {
    format!(
        "{{\"n\":{},\"total\":{},\"t_star\":{},\"alpha_star\":{},\"p_X\":{},\"p_Z\":{},\"p\":{},\"certified_qubits\":{}}}",
        r.n,
        g12(r.total),
        r.t_star,
        g12(r.alpha_star),
        g12(r.p_x),
        g12(r.p_z),
        g12(r.p),
        g12(r.certified_qubits)
    )
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let opts = PipelineOptions {
        depolarize_identity: args.depolarize_identity,
        per_gate_depolarizing: args.per_gate_depolarizing,
    };
    let rows = certified_sweep(args.n_min, args.n_max, &args.totals, opts)?;
    let mut out = String::new();
    match args.format {
        OutputFormat::Csv | OutputFormat::Text => {
            out.push_str(SWEEP_COLUMNS);
            out.push('\n');
            for r in &rows {
                out.push_str(&sweep_csv_row(r));
                out.push('\n');
            }
        }
        OutputFormat::Jsonl => {
            for r in &rows {
                out.push_str(&sweep_json_row(r));
                out.push('\n');
            }
        }
    }
    match args.out {
        Some(path) => fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_bits(s: &str) -> Result<u128, String> {
    if s.is_empty() || s.len() > 128 || s.bytes().any(|b| b != b'0' && b != b'1') {
        return Err(format!("invalid bit-string {s:?}"));
    }
    // Qubit 0 is the first character.
    Ok(s.bytes()
        .enumerate()
        .fold(0u128, |acc, (i, b)| acc | (u128::from(b - b'0') << i)))
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let t = resolve_threshold(args.n, args.t, args.alpha)?;
    let params = ProtocolParams::new(args.n, t, BasisFamily::Xz)?;
    let noise = match (&args.total, &args.noise) {
        (Some(total), None) => scale_noise(*total)?,
        (None, Some(rates)) => {
            if rates.len() != 4 {
                return Err("--noise requires four rates p1,p2,p3,p4".into());
            }
            NoiseParams::new(rates[0], rates[1], rates[2], rates[3])?
        }
        (None, None) => NoiseParams::zero(),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let strategy = match args.strategy {
        StrategyArg::Honest => Strategy::HonestMatched,
        StrategyArg::StoreK => {
            let k = args.k.ok_or("--strategy store-k requires --k")?;
            Strategy::StoreK(k)
        }
        StrategyArg::ClassicalGuess => Strategy::ClassicalGuess,
        StrategyArg::Fixed => {
            let answer = args
                .answer
                .as_deref()
                .ok_or("--strategy fixed requires --answer")?;
            Strategy::FixedAnswer(parse_bits(answer)?)
        }
    };
    let opts = PipelineOptions {
        depolarize_identity: args.depolarize_identity,
        per_gate_depolarizing: args.per_gate_depolarizing,
    };

    let stats: EmpiricalPass;
    if let Some(log_path) = &args.trial_log {
        let (s, records) = run_trials_logged(
            &params,
            &noise,
            &strategy,
            args.trials,
            args.seed,
            args.delta,
            opts,
        )?;
        stats = s;
        let mut file = fs::File::create(log_path)?;
        for r in &records {
            writeln!(file, "{}", trial_json(r, args.n))?;
        }
    } else {
        stats = run_trials(
            &params,
            &noise,
            &strategy,
            args.trials,
            args.seed,
            args.delta,
            opts,
        )?;
    }

    let p_lower = if args.hoeffding {
        confidence_lower_hoeffding(stats.passes, stats.trials, args.delta)?
    } else {
        stats.p_lower
    };
    let bound = bound_exact(&params, p_lower)?;
    let method = if args.hoeffding {
        "hoeffding"
    } else {
        "clopper-pearson"
    };

    match args.format {
        OutputFormat::Text => {
            println!(
                "n = {}  t = {}  trials = {}  seed = {}  delta = {}",
                params.n(),
                params.t(),
                stats.trials,
                args.seed,
                g12(args.delta)
            );
            println!(
                "p_hat = {}  (passes {} / {})",
                g12(stats.p_hat),
                stats.passes,
                stats.trials
            );
            println!(
                "per basis: Z {} / {}  ({}),  X {} / {}  ({})",
                stats.passes_z,
                stats.trials_z,
                g12(stats.passes_z as f64 / stats.trials_z.max(1) as f64),
                stats.passes_x,
                stats.trials_x,
                g12(stats.passes_x as f64 / stats.trials_x.max(1) as f64)
            );
            println!(
                "p_lower ({method}, confidence {}) = {}",
                g12(1.0 - args.delta),
                g12(p_lower)
            );
            println!(
                "bound at p_lower: log2_dim_lower = {}  certified_qubits = {}",
                g12(bound.log2_dim_lower),
                g12(bound.certified_qubits)
            );
        }
        OutputFormat::Csv => {
            println!(
                "n,t,trials,seed,delta,p_hat,passes,trials_z,passes_z,trials_x,passes_x,method,p_lower,log2_dim_lower,certified_qubits"
            );
            println!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                params.n(),
                params.t(),
                stats.trials,
                args.seed,
                g12(args.delta),
                g12(stats.p_hat),
                stats.passes,
                stats.trials_z,
                stats.passes_z,
                stats.trials_x,
                stats.passes_x,
                method,
                g12(p_lower),
                g12(bound.log2_dim_lower),
                g12(bound.certified_qubits)
            );
        }
        OutputFormat::Jsonl => {
            println!(
                "{{\"n\":{},\"t\":{},\"trials\":{},\"seed\":{},\"delta\":{},\"p_hat\":{},\"passes\":{},\"trials_z\":{},\"passes_z\":{},\"trials_x\":{},\"passes_x\":{},\"method\":\"{}\",\"p_lower\":{},\"log2_dim_lower\":{},\"certified_qubits\":{}}}",
                params.n(),
                params.t(),
                stats.trials,
                args.seed,
                g12(args.delta),
                g12(stats.p_hat),
                stats.passes,
                stats.trials_z,
                stats.passes_z,
                stats.trials_x,
                stats.passes_x,
                method,
                g12(p_lower),
                g12(bound.log2_dim_lower),
                g12(bound.certified_qubits)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn trial_json(r: &TrialRecord, n: u64) -> String {
    format!(
        "{{\"trial\":{},\"theta\":\"{}\",\"s\":\"{}\",\"s_prime\":\"{}\",\"mismatches\":{},\"passed\":{}}}",
        r.trial,
        r.theta.name(),
        TrialRecord::bits(r.s, n),
        TrialRecord::bits(r.s_prime, n),
        r.mismatches,
        r.passed
    )
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let report = match args.suite {
        SuiteArg::All => oracle::run_all_suites(args.seed, args.count, args.n)?,
        SuiteArg::Uncertainty => oracle::run_uncertainty_suite(args.seed, args.count, args.n)?,
        SuiteArg::Logdim => oracle::run_logdim_suite(args.seed, args.count, args.n)?,
        SuiteArg::DataProcessing => {
            oracle::run_data_processing_suite(args.seed, args.count, args.n)?
        }
        SuiteArg::Fano => oracle::run_fano_suite(args.seed, args.count, args.n)?,
        SuiteArg::Averaged => oracle::run_averaged_suite(args.seed, args.count, args.n)?,
        SuiteArg::SelfTest => oracle::self_test_violation(args.seed)?,
    };
    println!(
        "suite = {}  checks = {}  violations = {}  [{}]",
        report.suite,
        report.checks,
        report.violations.len(),
        if report.passed() { "ok" } else { "FAIL" }
    );
    if !report.passed() {
        let dir = args.dump_dir.unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        let path = dir.join(format!("qdimtest-violations-{}.jsonl", report.suite));
        let mut file = fs::File::create(&path)?;
        for v in &report.violations {
            writeln!(file, "{}", serde_json::to_string(v)?)?;
        }
        eprintln!(
            "{} violation(s); dump written to {}",
            report.violations.len(),
            path.display()
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
