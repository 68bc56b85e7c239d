use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqaug::canon::canonicalize;
use eqaug::oracle::{OracleConfig, Verdict};
use eqaug::pipeline::{
    augment, is_failure, load_records, read_augmented, stats_json, stats_table, verify_corpus, write_augmented,
    write_report, AugStats, AugmentOptions, CodePosition, InputFormat, ReportVerdict,
};
use eqaug::prefix::prefix_string;
use eqaug::transforms::apply;
use eqaug::{
    parse_equation, print_display, print_infix, uet_from_set, CodeStyle, ControlCode, EquationSet, Execution, Lang,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Control-code equation augmentation for math word problem corpora.
#[derive(Parser, Debug)]
#[command(name = "eqaug", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse equations and print their infix and prefix forms.
    Parse {
        /// Equations of one problem, e.g. "x_1 = n_1 + n_2".
        #[arg(required = true)]
        equations: Vec<String>,
    },
    /// Print the canonical form of a problem's equations.
    Canon {
        #[arg(required = true)]
        equations: Vec<String>,
    },
    /// Apply one control code to a problem's equations.
    Transform {
        /// One of add, mul, sol, equ, var.
        #[arg(long)]
        code: ControlCode,
        #[arg(required = true)]
        equations: Vec<String>,
    },
    /// Build an augmented corpus from a source corpus.
    Augment(AugmentArgs),
    /// Re-verify an augmented corpus against its source corpus.
    Verify(VerifyArgs),
    /// Count an augmented corpus by control code.
    Stats {
        /// Augmented JSONL.
        #[arg(long)]
        input: PathBuf,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Run seed; per-check seeds derive from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Relative tolerance for both pointwise and solution checks.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Valid random samples required per check.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl OracleArgs {
    fn config(&self) -> Result<OracleConfig, String> {
        let base = OracleConfig { samples: self.samples, seed: self.seed, ..OracleConfig::default() };
        let cfg = match self.tolerance {
            Some(t) => base.with_tolerance(t),
            None => base,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    fn execution(&self) -> Result<Execution, String> {
        if self.jobs == 1 {
            return Ok(Execution::Sequential);
        }
        #[cfg(feature = "parallel")]
        {
            if self.jobs > 1 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(self.jobs)
                    .build_global()
                    .map_err(|e| format!("cannot start {} workers: {e}", self.jobs))?;
            }
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        {
            log::warn!("built without parallel support; running sequentially");
            Ok(Execution::Sequential)
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StyleArg {
    Token,
    Description,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LangArg {
    En,
    Zh,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PositionArg {
    Front,
    Back,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    /// Source corpus.
    #[arg(long)]
    input: PathBuf,
    /// Augmented JSONL to write.
    #[arg(long)]
    output: PathBuf,
    /// Stats JSON to write.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Verification report JSONL to write.
    #[arg(long)]
    report: Option<PathBuf>,
    /// normalized-jsonl, math23k-json, draw1k-json or hmwp-json.
    #[arg(long, default_value = "normalized-jsonl")]
    format: InputFormat,
    /// Comma-separated codes to try; orig is always emitted.
    #[arg(long, value_delimiter = ',', default_value = "add,mul,sol,equ,var")]
    codes: Vec<ControlCode>,
    /// Render control codes as tokens or as descriptions.
    #[arg(long, value_enum, default_value_t = StyleArg::Token)]
    style: StyleArg,
    /// Language of descriptions.
    #[arg(long, value_enum, default_value_t = LangArg::En)]
    lang: LangArg,
    /// Where the control code goes relative to the problem text.
    #[arg(long, value_enum, default_value_t = PositionArg::Front)]
    code_position: PositionArg,
    /// Verify every output with the oracle (default).
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    /// Skip verification; outputs are marked unverified.
    #[arg(long)]
    no_verify: bool,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Augmented JSONL.
    #[arg(long)]
    input: PathBuf,
    /// Source corpus the augmented file was built from.
    #[arg(long)]
    original: PathBuf,
    /// Report JSONL to write; stdout if absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Format of the source corpus.
    #[arg(long, default_value = "normalized-jsonl")]
    format: InputFormat,
    #[command(flatten)]
    oracle: OracleArgs,
}

enum Failure {
    Usage(String),
    Io(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Verify(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Verify(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn io_fail(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn parse_set(equations: &[String]) -> Result<EquationSet, Failure> {
    let eqs = equations
        .iter()
        .map(|s| parse_equation(s).map_err(|e| Failure::Usage(format!("{s:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    EquationSet::new(eqs).map_err(|e| Failure::Usage(e.to_string()))
}

fn print_set(set: &EquationSet, display: bool) {
    for eq in set {
        println!("{}", if display { print_display(eq) } else { print_infix(eq) });
    }
    println!("{}", prefix_string(&uet_from_set(set)));
}

/// Writes `path` only once `fill` has produced all its bytes.
fn write_file(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Outcome {
    let mut buf = Vec::new();
    fill(&mut buf).map_err(io_fail(path))?;
    let file = fs::File::create(path).map_err(io_fail(path))?;
    let mut w = BufWriter::new(file);
    w.write_all(&buf).and_then(|_| w.flush()).map_err(io_fail(path))
}

fn cmd_augment(args: AugmentArgs) -> Outcome {
    let oracle = args.oracle.config().map_err(Failure::Usage)?;
    let opts = AugmentOptions {
        codes: args.codes.into_iter().filter(|&c| c != ControlCode::Orig).collect(),
        style: match args.style {
            StyleArg::Token => CodeStyle::Token,
            StyleArg::Description => CodeStyle::Description,
        },
        lang: match args.lang {
            LangArg::En => Lang::En,
            LangArg::Zh => Lang::Zh,
        },
        position: match args.code_position {
            PositionArg::Front => CodePosition::Front,
            PositionArg::Back => CodePosition::Back,
        },
        oracle,
        verify: !args.no_verify,
        execution: args.oracle.execution().map_err(Failure::Usage)?,
        fault: None,
    };

    let loaded = load_records(&args.input, args.format).map_err(|e| Failure::Io(e.to_string()))?;
    for e in &loaded.errors {
        log::warn!("skipped {e}");
    }
    for w in &loaded.warnings {
        log::warn!("{w}");
    }
    if loaded.records.is_empty() && !loaded.errors.is_empty() {
        return Err(Failure::Io(format!(
            "{}: no record could be parsed ({} failures)",
            args.input.display(),
            loaded.errors.len()
        )));
    }

    let mut out = augment(&loaded.records, &opts);
    out.stats.parse_failures = loaded.errors.len();
    for w in &out.warnings {
        log::warn!("{w}");
    }

    write_file(&args.output, |buf| write_augmented(&out.records, buf))?;
    if let Some(path) = &args.stats {
        write_file(path, |buf| {
            serde_json::to_writer_pretty(&mut *buf, &stats_json(&out.stats))?;
            buf.push(b'\n');
            Ok(())
        })?;
    }
    if let Some(path) = &args.report {
        write_file(path, |buf| write_report(&out.report, buf))?;
    }
    print!("{}", stats_table(&out.stats));
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Outcome {
    let cfg = args.oracle.config().map_err(Failure::Usage)?;
    let execution = args.oracle.execution().map_err(Failure::Usage)?;
    let file = fs::File::open(&args.input).map_err(io_fail(&args.input))?;
    let (augmented, errors) = read_augmented(BufReader::new(file)).map_err(io_fail(&args.input))?;
    let sources = load_records(&args.original, args.format).map_err(|e| Failure::Io(e.to_string()))?;
    for e in errors.iter().chain(&sources.errors) {
        log::warn!("skipped {e}");
    }

    let report = verify_corpus(&augmented, &sources.records, &cfg, execution);
    match &args.report {
        Some(path) => write_file(path, |buf| write_report(&report, buf))?,
        None => {
            let stdout = io::stdout();
            write_report(&report, stdout.lock()).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }

    let failures = report.iter().filter(|l| is_failure(l)).count();
    let inconclusive = report
        .iter()
        .filter(|l| matches!(l.verdict, ReportVerdict::Oracle(Verdict::Inconclusive { .. })))
        .count();
    eprintln!("{} checked, {failures} failed, {inconclusive} inconclusive", report.len());
    if failures > 0 || !errors.is_empty() {
        return Err(Failure::Verify(format!("{failures} failed checks, {} unreadable lines", errors.len())));
    }
    Ok(())
}

fn cmd_stats(input: &Path, json: bool) -> Outcome {
    let file = fs::File::open(input).map_err(io_fail(input))?;
    let (records, errors) = read_augmented(BufReader::new(file)).map_err(io_fail(input))?;
    for e in &errors {
        log::warn!("skipped {e}");
    }
    let mut stats = AugStats::from_augmented(&records);
    stats.parse_failures = errors.len();
    if json {
        println!("{}", serde_json::to_string_pretty(&stats_json(&stats)).expect("stats serialize"));
    } else {
        print!("{}", stats_table(&stats));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Parse { equations } => {
            print_set(&parse_set(&equations)?, false);
            Ok(())
        }
        Command::Canon { equations } => {
            print_set(&canonicalize(&parse_set(&equations)?), false);
            Ok(())
        }
        Command::Transform { code, equations } => {
            let set = parse_set(&equations)?;
            match apply(code, &set).into_changed() {
                Some(out) => print_set(&out, true),
                None => println!("unchanged"),
            }
            Ok(())
        }
        Command::Augment(args) => cmd_augment(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Stats { input, json } => cmd_stats(&input, json),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
