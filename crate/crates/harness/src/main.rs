use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use goalrec_core::obsgen::ObservationSpec;
use goalrec_core::recognition::{Method, PartitionTest, RecognitionResult};
use goalrec_harness::bundle::{parse_hypotheses, BundlePaths};
use goalrec_harness::dataset::generate_bundle;
use goalrec_harness::error::{HarnessError, Result};
use goalrec_harness::evaluate::{default_timeout, evaluate, run_bundle, EvalConfig};
use goalrec_harness::report::{write_report, ReportFormat};
use goalrec_harness::suite::{generate_suite, Family, Scale};
use goalrec_harness::load_bundle;

#[derive(Parser)]
#[command(name = "goalrec", version, about = "Landmark-based goal recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recognize the goal of one bundle.
    Recognize(RecognizeArgs),
    /// Evaluate every bundle below a root directory.
    Evaluate(EvaluateArgs),
    /// Build a bundle by planning for a problem's goal.
    GenDataset(GenDatasetArgs),
    /// Write a generated suite of bundles.
    GenSuite(GenSuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gc,
    Uniq,
    Filter,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gc => Method::Gc,
            MethodArg::Uniq => Method::Uniq,
            MethodArg::Filter => Method::Filter,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionArg {
    LandmarkAware,
    Literal,
    Off,
}

impl From<PartitionArg> for PartitionTest {
    fn from(p: PartitionArg) -> Self {
        match p {
            PartitionArg::LandmarkAware => PartitionTest::LandmarkAware,
            PartitionArg::Literal => PartitionTest::Literal,
            PartitionArg::Off => PartitionTest::Off,
        }
    }
}

#[derive(Args)]
struct RecognizerFlags {
    /// Count disjunctive landmarks in the heuristics.
    #[arg(long)]
    include_disjunctive: bool,
    #[arg(long, value_enum, default_value = "landmark-aware")]
    partition_test: PartitionArg,
    /// Per-problem timeout in seconds [default: $GOALREC_TIMEOUT_S or 1200].
    #[arg(long)]
    timeout: Option<f64>,
}

impl RecognizerFlags {
    fn timeout(&self) -> Duration {
        self.timeout.map_or_else(default_timeout, Duration::from_secs_f64)
    }
}

#[derive(Args)]
struct RecognizeArgs {
    #[arg(short = 'd', long)]
    domain: PathBuf,
    #[arg(short = 't', long)]
    template: PathBuf,
    #[arg(short = 'y', long)]
    hyps: PathBuf,
    #[arg(short = 'o', long)]
    obs: PathBuf,
    #[arg(short = 'r', long)]
    real: Option<PathBuf>,
    #[arg(short = 'm', long, value_enum, default_value = "filter")]
    method: MethodArg,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Each observation line is a set of facts.
    #[arg(long)]
    facts_obs: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    flags: RecognizerFlags,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(short = 'R', long)]
    root: PathBuf,
    #[arg(short = 'm', long = "methods", value_enum, value_delimiter = ',', default_values = ["gc", "uniq", "filter"])]
    methods: Vec<MethodArg>,
    #[arg(long, value_delimiter = ',', default_values = ["0"])]
    theta_list: Vec<f64>,
    /// Worker threads, 0 for one per core.
    #[arg(short = 'j', long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Report file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    facts_obs: bool,
    #[command(flatten)]
    flags: RecognizerFlags,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, default_value_t = 1.0)]
    observability: f64,
    #[arg(long, default_value_t = 0)]
    noise: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenDatasetArgs {
    #[arg(short = 'd', long)]
    domain: PathBuf,
    /// Problem whose goal is the hidden goal.
    #[arg(short = 'p', long)]
    problem: PathBuf,
    /// Candidate goals; the hidden goal is added when missing.
    #[arg(short = 'y', long)]
    hyps: Option<PathBuf>,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenSuiteArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_values = ["blocks", "ferry", "logistics", "grid"])]
    families: Vec<String>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, value_delimiter = ',', default_values = ["1.0"])]
    observability: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    noise: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "small")]
    scale: String,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn print_result(r: &RecognitionResult, real: Option<usize>) {
    println!("method {} theta {:.3}", r.method, r.theta);
    for i in r.ranking() {
        let mark = if r.is_returned(i) { '*' } else { ' ' };
        let tag = if real == Some(i) { " (real)" } else { "" };
        println!("{mark} {:.4} {}{tag}", r.scores[i], r.goals[i]);
    }
    if r.anomaly {
        println!("every goal was pruned; partition tests ignored");
    }
    for u in &r.unresolved_observations {
        println!("unresolved observation {u}");
    }
    println!(
        "returned {} of {} in {:.3}s",
        r.returned.len(),
        r.goals.len(),
        r.timing.total_s()
    );
}

fn recognize(args: RecognizeArgs) -> Result<ExitCode> {
    let paths = BundlePaths {
        domain: args.domain,
        template: args.template,
        hyps: args.hyps,
        obs: args.obs,
        real_hyp: args.real,
        meta: None,
    };
    let bundle = load_bundle(&paths, args.facts_obs)?;
    let config = EvalConfig {
        methods: vec![args.method.into()],
        thetas: vec![args.theta],
        timeout: args.flags.timeout(),
        include_disjunctive: args.flags.include_disjunctive,
        partition_test: args.flags.partition_test.into(),
        ..EvalConfig::default()
    };
    let result = run_bundle(&bundle, &config)?.remove(0);
    if args.json {
        println!("{}", result.to_json());
    } else {
        print_result(&result, bundle.real);
    }
    Ok(match bundle.real {
        Some(real) if !result.is_returned(real) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

fn run_evaluate(args: EvaluateArgs) -> Result<ExitCode> {
    let format: ReportFormat = args.format.parse()?;
    let config = EvalConfig {
        methods: args.methods.into_iter().map(Into::into).collect(),
        thetas: args.theta_list,
        workers: args.workers,
        timeout: args.flags.timeout(),
        facts_obs: args.facts_obs,
        include_disjunctive: args.flags.include_disjunctive,
        partition_test: args.flags.partition_test.into(),
    };
    let report = evaluate(&args.root, &config)?;
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            write_report(&report, format, io::BufWriter::new(file))?;
        }
        None => write_report(&report, format, io::stdout().lock())?,
    }
    for a in &report.aggregates {
        eprintln!(
            "{} obs={} {} theta={:.3}: accuracy {:.3} spread {:.3} over {}",
            a.domain,
            a.observability.map_or("-".into(), |o| format!("{o:.3}")),
            a.method,
            a.theta,
            a.accuracy,
            a.mean_spread,
            a.problems
        );
    }
    if !report.failures.is_empty() {
        eprintln!("{} problems failed", report.failures.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn gen_dataset(args: GenDatasetArgs) -> Result<ExitCode> {
    let spec = ObservationSpec::new(args.spec.observability, args.spec.noise, args.spec.seed)?;
    let hyps = args.hyps.as_deref().map(read).transpose()?;
    let hyps = hyps.as_deref().map(parse_hypotheses).transpose()?;
    let files = generate_bundle(&read(&args.domain)?, &read(&args.problem)?, hyps.as_deref(), &spec)?;
    files.write(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn gen_suite(args: GenSuiteArgs) -> Result<ExitCode> {
    let families = args
        .families
        .iter()
        .map(|f| f.parse())
        .collect::<Result<Vec<Family>>>()?;
    let scale = match args.scale.as_str() {
        "tiny" => Scale::Tiny,
        "small" => Scale::Small,
        "large" => Scale::Large,
        other => return Err(HarnessError::Invalid(format!("unknown scale `{other}`"))),
    };
    let problems = generate_suite(&families, scale, args.count, args.seed)?;
    let mut written = 0;
    for p in &problems {
        for (i, &o) in args.observability.iter().enumerate() {
            let spec = ObservationSpec::new(o, args.noise, args.seed.wrapping_add(i as u64))?;
            let dir = args
                .out
                .join(p.family.to_string())
                .join(format!("{:03}", (o * 100.0).round() as u32))
                .join(&p.name);
            p.bundle(&spec)?.write(&dir)?;
            written += 1;
        }
    }
    writeln!(io::stderr(), "wrote {written} bundles").ok();
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Recognize(a) => recognize(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::GenDataset(a) => gen_dataset(a),
        Command::GenSuite(a) => gen_suite(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
