//! The `simplicial` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! configuration, usage or infeasibility errors, 3 for I/O and internal
//! errors. Errors go to stderr as `error[<kind>]: <message>`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use simplicial_core::geometry::count_representations;

use crate::cache::CopyCache;
use crate::config::ExperimentConfig;
use crate::error::{ExperimentError, Result};
use crate::experiments::{Context, Experiment, ExperimentRegistry};
use crate::report::{write_atomic, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Log lines go to stderr; the level comes from `SIMPLICIAL_LOG`
/// (`error`, `warn`, `info`, `debug`, `trace`), default `info`.
struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata<'_>) -> bool {
        metadata.level() <= log::max_level()
    }

    fn log(&self, record: &log::Record<'_>) {
        if self.enabled(record.metadata()) {
            eprintln!(
                "{}: {}",
                record.level().as_str().to_lowercase(),
                record.args()
            );
        }
    }

    fn flush(&self) {}
}

fn init_logging() {
    static LOGGER: StderrLogger = StderrLogger;
    if log::set_logger(&LOGGER).is_ok() {
        let level = std::env::var("SIMPLICIAL_LOG")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(log::LevelFilter::Info);
        log::set_max_level(level);
    }
}

fn experiment_command(e: &dyn Experiment) -> Command {
    Command::new(e.name())
        .about(e.about())
        .arg(
            Arg::new("config")
                .long("config")
                .short('c')
                .value_name("FILE")
                .value_parser(value_parser!(PathBuf))
                .help("TOML configuration; the bundled default when omitted"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .short('o')
                .value_name("DIR")
                .value_parser(value_parser!(PathBuf))
                .help("Output directory, overriding output_dir"),
        )
        .arg(
            Arg::new("cache-dir")
                .long("cache-dir")
                .value_name("DIR")
                .value_parser(value_parser!(PathBuf))
                .help("Copy-set cache directory, overriding SIMPLICIAL_CACHE_DIR and cache_dir"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("SEED")
                .value_parser(value_parser!(u64))
                .help("Override the configured seed"),
        )
        .arg(
            Arg::new("stable")
                .long("stable")
                .action(ArgAction::SetTrue)
                .help("Omit timestamps so identical runs give identical files"),
        )
}

pub fn command(registry: &ExperimentRegistry) -> Command {
    let mut cmd = Command::new("simplicial")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Experiments on discrete simplicial averages")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for e in registry.iter() {
        cmd = cmd.subcommand(experiment_command(e.as_ref()));
    }
    cmd.subcommand(
        Command::new("count")
            .about("Write m, r_n(m) as CSV: representations as sums of n squares")
            .arg(
                Arg::new("n")
                    .long("n")
                    .required(true)
                    .value_parser(value_parser!(usize)),
            )
            .arg(
                Arg::new("m-max")
                    .long("m-max")
                    .required(true)
                    .value_parser(value_parser!(u64)),
            )
            .arg(
                Arg::new("out")
                    .long("out")
                    .short('o')
                    .value_name("FILE")
                    .value_parser(value_parser!(PathBuf))
                    .help("CSV file; stdout when omitted"),
            ),
    )
    .subcommand(
        Command::new("report")
            .about("Recompute the aggregates and checks of saved reports")
            .arg(
                Arg::new("reports")
                    .required(true)
                    .num_args(1..)
                    .value_parser(value_parser!(PathBuf)),
            ),
    )
}

fn print_error(e: &ExperimentError) {
    eprintln!("error[{}]: {e}", e.kind());
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let registry = ExperimentRegistry::with_builtins();
    let matches = match command(&registry).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_PASS;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
                return EXIT_USAGE;
            }
            let text = e.render().to_string();
            eprint!(
                "error[usage]: {}",
                text.strip_prefix("error: ").unwrap_or(&text)
            );
            return EXIT_USAGE;
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let outcome = match name {
        "count" => run_count(sub),
        "report" => run_report(sub),
        _ => {
            let experiment = registry.get(name).expect("registered subcommand");
            run_experiment(experiment.as_ref(), sub)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            print_error(&e);
            e.exit_code()
        }
    }
}

fn run_experiment(experiment: &dyn Experiment, args: &ArgMatches) -> Result<i32> {
    let mut config = match args.get_one::<PathBuf>("config") {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::bundled(),
    };
    if let Some(&seed) = args.get_one::<u64>("seed") {
        config.seed = seed;
    }
    let stable = args.get_flag("stable");
    let cache_dir = CopyCache::resolve_dir(
        args.get_one::<PathBuf>("cache-dir").map(PathBuf::as_path),
        config.cache_dir.as_deref(),
    );
    let cache = CopyCache::new(cache_dir)?;
    let ctx = Context {
        config: &config,
        source: &cache,
        stable,
    };
    let report = experiment.run(&ctx);
    let stats = cache.stats();
    eprintln!("cache: {} hits, {} misses", stats.hits, stats.misses);
    let report = report?;

    let out = args
        .get_one::<PathBuf>("out")
        .cloned()
        .unwrap_or_else(|| config.output_dir.clone());
    let files = report.write(&out)?;
    print_summary(&report, &files[0]);
    Ok(if report.passed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    })
}

fn format_number(v: f64) -> String {
    if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn format_value(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), format_number)
}

fn print_summary(report: &Report, path: &Path) {
    let mut out = std::io::stdout().lock();
    let status = if report.passed { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "{}: {status}", report.experiment);
    for a in &report.aggregates {
        let _ = writeln!(out, "  {} = {}", a.name, format_value(a.value));
    }
    for c in &report.checks {
        let value = report.aggregate(&c.aggregate);
        let _ = writeln!(
            out,
            "  [{}] {}: {} = {} {} {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.aggregate,
            format_value(value),
            c.comparison.symbol(),
            format_number(c.threshold)
        );
    }
    for n in &report.notes {
        let _ = writeln!(out, "  note: {n}");
    }
    let _ = writeln!(out, "report: {}", path.display());
}

fn run_count(args: &ArgMatches) -> Result<i32> {
    let n = *args.get_one::<usize>("n").expect("required");
    let m_max = *args.get_one::<u64>("m-max").expect("required");
    let mut csv = String::from("m,count\n");
    for m in 0..=m_max {
        let c = count_representations(n, m)
            .map_err(|e| ExperimentError::config(format!("count: {e}")))?;
        csv.push_str(&format!("{m},{c}\n"));
    }
    match args.get_one::<PathBuf>("out") {
        Some(path) => write_atomic(path, csv.as_bytes())?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv.as_bytes())
                .map_err(|e| ExperimentError::io("<stdout>", e))?;
        }
    }
    Ok(EXIT_PASS)
}

fn run_report(args: &ArgMatches) -> Result<i32> {
    let mut code = EXIT_PASS;
    for path in args.get_many::<PathBuf>("reports").expect("required") {
        let report = Report::read(path)?;
        let mismatches = report.verify();
        for m in &mismatches {
            eprintln!(
                "error[report]: {}: {} stored {} but recomputes to {}",
                path.display(),
                m.name,
                m.stored,
                m.recomputed
            );
        }
        let mut fresh = report.clone();
        fresh.recompute();
        print_summary(&fresh, path);
        if !mismatches.is_empty() || !fresh.passed {
            code = EXIT_CHECK_FAILED;
        }
    }
    Ok(code)
}
