//! Command-line front end: `select` on a CSV file and `simulate` for studies.
//!
//! Exit codes: 0 on success, 2 for invalid input (arguments, files, config,
//! data, study spec), 3 when estimation or the selection engine fails.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{load_config, load_dataset, load_signs, SelectionConfig, SignExpectation};
use crate::error::Error;
use crate::report::RunReport;
use crate::selection::run_csslr;
use crate::simulation::{run_study, CountingRule, StudySpec};

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "CSSLR_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "csslr", version, about = "Stepwise logistic regression selection on several criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select models on a CSV dataset.
    Select(SelectArgs),
    /// Run a Monte Carlo selection study.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Text,
    Structured,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Name of the 0/1 response column (1 = bad).
    #[arg(long)]
    response: String,
    /// Config file, or one of the profile names CSSLR1a, CSSLR1b, CSSLR2a, CSSLR2b.
    #[arg(long)]
    config: String,
    /// CSV with columns name,expected_sign.
    #[arg(long)]
    signs: Option<PathBuf>,
    /// Output directory (default: $CSSLR_OUT_DIR, else ./csslr-out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    trace_format: TraceFormat,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Built-in study (table3, table4, table5, table6) or a TOML spec file.
    #[arg(long)]
    study: String,
    #[arg(long)]
    n_strong: Option<usize>,
    #[arg(long)]
    n_weak: Option<usize>,
    #[arg(long)]
    n_nuisance: Option<usize>,
    #[arg(long)]
    mu_strong: Option<f64>,
    #[arg(long)]
    mu_weak: Option<f64>,
    /// Observations per class.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated method names.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Count the max-AUC leader only, or every variable of the final set.
    #[arg(long, value_enum)]
    counting: Option<Counting>,
    /// CSV output file (default: <$CSSLR_OUT_DIR>/<study>.csv when the variable is set).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Counting {
    Representative,
    Union,
}

/// A failure together with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularMatrix
            | Error::LengthMismatch(..)
            | Error::NotNested
            | Error::NonPositiveDf(_)
            | Error::InvalidStdError(_)
            | Error::NotConverged
            | Error::EmptyModelSet => EXIT_ENGINE,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn resolve_config(arg: &str) -> Result<SelectionConfig, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return load_config(path).map_err(with_path(path));
    }
    SelectionConfig::profile(arg).ok_or_else(|| {
        Failure::invalid(format!(
            "config '{arg}' is neither a readable file nor a profile name (CSSLR1a, CSSLR1b, CSSLR2a, CSSLR2b)"
        ))
    })
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("csslr-out"), PathBuf::from)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn cmd_select(args: SelectArgs) -> Result<(), Failure> {
    let config = resolve_config(&args.config)?;
    let data = load_dataset(&args.data, &args.response).map_err(with_path(&args.data))?;
    let signs = match &args.signs {
        Some(p) => load_signs(p, &data).map_err(with_path(p))?,
        None => SignExpectation::new(),
    };
    let out = args.out.unwrap_or_else(default_out_dir);
    fs::create_dir_all(&out).map_err(|e| Failure::invalid(format!("{}: {e}", out.display())))?;

    let result = run_csslr(&data, &signs, &config).map_err(|e| Failure {
        code: EXIT_ENGINE,
        message: e.to_string(),
    })?;
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let report = RunReport::new(&data, &config, &result, timestamp)?;

    write_file(&out.join("report.txt"), &report.to_text())?;
    let trace_path = match args.trace_format {
        TraceFormat::Text => {
            let p = out.join("trace.txt");
            write_file(&p, &report.trace_text())?;
            p
        }
        TraceFormat::Structured => {
            let p = out.join("trace.jsonl");
            write_file(&p, &report.to_jsonl())?;
            p
        }
    };

    println!(
        "{} final model(s) after {} step(s), {:?}",
        report.final_models.len(),
        report.trace.len(),
        report.terminated_by
    );
    print!("{}", report.models_text());
    println!("report: {}", out.join("report.txt").display());
    println!("trace: {}", trace_path.display());
    Ok(())
}

fn study_spec(args: &SimulateArgs) -> Result<StudySpec, Failure> {
    let mut spec = match StudySpec::builtin(&args.study) {
        Some(s) => s,
        None => {
            let path = Path::new(&args.study);
            if !path.is_file() {
                return Err(Failure::invalid(format!(
                    "study '{}' is neither a built-in study (table3, table4, table5, table6) nor a readable file",
                    args.study
                )));
            }
            let text = fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            StudySpec::from_toml(&text).map_err(with_path(path))?
        }
    };
    if let Some(v) = args.n_strong {
        spec.n_strong = v;
    }
    if let Some(v) = args.n_weak {
        spec.n_weak = v;
    }
    if let Some(v) = args.n_nuisance {
        spec.n_nuisance = v;
    }
    if let Some(v) = args.mu_strong {
        spec.mu_strong = v;
    }
    if let Some(v) = args.mu_weak {
        spec.mu_weak = v;
    }
    if let Some(v) = args.k {
        spec.k = v;
    }
    if let Some(v) = args.replications {
        spec.replications = v;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = &args.methods {
        spec.methods = v.clone();
    }
    if let Some(c) = args.counting {
        spec.counting = match c {
            Counting::Representative => CountingRule::Representative,
            Counting::Union => CountingRule::Union,
        };
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let spec = study_spec(&args)?;
    if args.jobs == Some(0) {
        return Err(Failure::invalid("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure {
            code: EXIT_ENGINE,
            message: e.to_string(),
        })?;
    let result = pool.install(|| run_study(&spec, &BTreeMap::new()))?;

    print!("{}", result.to_table());
    let out = args.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| {
            let stem = Path::new(&args.study)
                .file_stem()
                .map_or_else(|| "study".into(), |s| s.to_string_lossy().into_owned());
            PathBuf::from(dir).join(format!("{stem}.csv"))
        })
    });
    if let Some(path) = out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Failure::invalid(format!("{}: {e}", dir.display())))?;
        }
        write_file(&path, &result.to_csv())?;
        println!("csv: {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["csslr"]), EXIT_INVALID);
        assert_eq!(run(["csslr", "select", "--data", "x.csv", "--config", "CSSLR1a"]), EXIT_INVALID);
        assert_eq!(run(["csslr", "--version"]), EXIT_OK);
    }

    #[test]
    fn unknown_study_and_method_exit_2() {
        assert_eq!(run(["csslr", "simulate", "--study", "table9"]), EXIT_INVALID);
        assert_eq!(
            run(["csslr", "simulate", "--study", "table6", "--replications", "1", "--methods", "Lasso1"]),
            EXIT_INVALID
        );
        assert_eq!(run(["csslr", "simulate", "--study", "table6", "--jobs", "0"]), EXIT_INVALID);
    }

    #[test]
    fn profile_names_resolve() {
        assert_eq!(resolve_config("CSSLR2b").ok(), Some(SelectionConfig::csslr2b()));
        assert_eq!(resolve_config("nope").err().map(|f| f.code), Some(EXIT_INVALID));
    }
}
