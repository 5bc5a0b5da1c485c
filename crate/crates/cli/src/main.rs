mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use siegel_renorm::geometry::{TuneConfig, TuneMode};
use siegel_renorm::{Precision, Real, TwoFloat};

use commands::{parse_complex, parse_pair, parse_size, parse_window, Theta};
use config::Config;
use error::CliError;
use output::Session;

#[derive(Parser, Debug)]
#[command(
    name = "siegel-renorm",
    version,
    about = "Renormalization lab for golden-mean semi-Siegel Hénon maps"
)]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config and SIEGEL_RENORM_PRECISION.
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionArg>,
    #[arg(long, global = true)]
    epsilon_bar: Option<f64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Caps the worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Extra `key=value` config entries.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Ray,
    Complex,
}

#[derive(clap::Args, Debug)]
struct TuneArgs {
    /// `|b|` interval `lo,hi`; defaults to `(0.005, epsilon_bar)`.
    #[arg(long)]
    bracket: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    tol: f64,
    #[arg(long, value_enum, default_value = "ray")]
    mode: ModeArg,
    #[arg(long, default_value_t = 8)]
    cells: usize,
    #[arg(long, default_value_t = 40)]
    max_iter: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continued fraction expansion and convergents.
    Cf {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, default_value_t = 8)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hénon parameters from the multipliers and their residuals.
    HenonSolve {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Escape-time image of the quadratic Siegel disk (PPM).
    Render {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, default_value = "600x400")]
        size: String,
        #[arg(long, default_value = "0,0,3", allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit of the cap, sampling the Siegel boundary (CSV).
    TraceBoundary {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 987)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builds the renormalization pyramid.
    Renorm {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Binary coefficient cache written next to the report.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Tables of the universal Jacobian profiles and cap factors.
    Universality {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Reads the pyramid from a cache instead of building it.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Three-scale probe of the boundary at `(n, k)`.
    Probe {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tunes b towards the cancellation locus of `(n, k)`.
    TuneB {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Argument of b; the seed root nearest to it is used.
        #[arg(long = "arg", default_value_t = 0.0, allow_hyphen_values = true)]
        arg_b: f64,
        /// `|b|` of the pyramid on which chi(1) is measured.
        #[arg(long, default_value_t = 0.05)]
        b_ref: f64,
        #[command(flatten)]
        tune: TuneArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quasisymmetry constant of a traced curve.
    Qs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// renorm, universality, tune-b, probe, trace-boundary and qs in one run.
    All {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        tune: TuneArgs,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cf { .. } => "cf",
            Command::HenonSolve { .. } => "henon-solve",
            Command::Render { .. } => "render",
            Command::TraceBoundary { .. } => "trace-boundary",
            Command::Renorm { .. } => "renorm",
            Command::Universality { .. } => "universality",
            Command::Probe { .. } => "probe",
            Command::TuneB { .. } => "tune-b",
            Command::Qs { .. } => "qs",
            Command::All { .. } => "all",
        }
    }
}

/// Config file, then the environment, then flags.
fn resolve_config(cli: &Cli) -> Result<Config, CliError> {
    let mut c = match &cli.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Arg(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        c.set(k.trim(), v.trim())?;
    }
    if let Some(p) = Precision::from_env().map_err(|e| CliError::Config(e.to_string()))? {
        c.precision = p;
    }
    if let Some(p) = cli.precision {
        c.precision = match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        };
    }
    if let Some(v) = cli.epsilon_bar {
        c.epsilon_bar = v;
    }
    if let Some(v) = &cli.out_dir {
        c.out_dir = v.clone();
    }
    if let Some(v) = cli.threads {
        c.threads = Some(v);
    }
    c.validate()?;
    Ok(c)
}

fn tune_config(t: &TuneArgs, eps_bar: f64) -> Result<TuneConfig, CliError> {
    let bracket = match &t.bracket {
        Some(s) => parse_pair(s)?,
        None => (0.005, eps_bar),
    };
    Ok(TuneConfig {
        bracket,
        tol: t.tol,
        mode: match t.mode {
            ModeArg::Ray => TuneMode::Ray,
            ModeArg::Complex => TuneMode::Complex,
        },
        cells: t.cells,
        max_iter: t.max_iter,
    })
}

fn run<T: Real>(cmd: &Command, s: &mut Session) -> Result<(), CliError> {
    let eps_bar = s.config.epsilon_bar;
    match cmd {
        Command::Cf { theta, terms, out } => {
            commands::cf::<T>(s, Theta::parse(theta)?, *terms, out.as_deref())
        }
        Command::HenonSolve { theta, b, out } => {
            commands::henon_solve::<T>(s, Theta::parse(theta)?, parse_complex(b)?, out.as_deref())
        }
        Command::Render {
            theta,
            size,
            window,
            iters,
            out,
        } => commands::render(
            s,
            Theta::parse(theta)?,
            parse_size(size)?,
            parse_window(window)?,
            *iters,
            out.as_deref(),
        ),
        Command::TraceBoundary {
            theta,
            b,
            depth,
            count,
            out,
        } => commands::trace_boundary::<T>(
            s,
            Theta::parse(theta)?,
            parse_complex(b)?,
            *depth,
            *count,
            out.as_deref(),
        ),
        Command::Renorm {
            theta,
            b,
            depth,
            out,
            cache,
        } => commands::renorm::<T>(
            s,
            Theta::parse(theta)?,
            parse_complex(b)?,
            *depth,
            out.as_deref(),
            cache.as_deref(),
        )
        .map(|_| ()),
        Command::Universality {
            theta,
            b,
            depth,
            cache,
            out,
        } => {
            let pyr = commands::load_or_build::<T>(
                s,
                Theta::parse(theta)?,
                parse_complex(b)?,
                *depth,
                cache.as_deref(),
            )?;
            commands::universality(s, &pyr, out.as_deref(), None).map(|_| ())
        }
        Command::Probe {
            theta,
            b,
            n,
            k,
            cache,
            out,
        } => {
            let depth = (n + k + 1).max(s.config.chi_level + 1);
            let pyr = commands::load_or_build::<T>(
                s,
                Theta::parse(theta)?,
                parse_complex(b)?,
                depth,
                cache.as_deref(),
            )?;
            commands::probe_run(s, &pyr, *n, *k, out.as_deref()).map(|_| ())
        }
        Command::TuneB {
            theta,
            n,
            k,
            arg_b,
            b_ref,
            tune,
            out,
        } => {
            let cfg = tune_config(tune, eps_bar)?;
            let r = commands::tune::<T>(
                s,
                Theta::parse(theta)?,
                *n,
                *k,
                *arg_b,
                &cfg,
                *b_ref,
                out.as_deref(),
            )?;
            if !r.passed {
                return Err(siegel_renorm::Error::NoCancellation {
                    achieved: r.achieved,
                    required: r.required,
                    detail: format!("(n, k) = ({n}, {k}), best |b| = {:.6}", r.b.norm()),
                }
                .into());
            }
            Ok(())
        }
        Command::Qs { input, budget, out } => {
            commands::qs(s, input, *budget, out.as_deref()).map(|_| ())
        }
        Command::All {
            theta,
            b,
            n,
            k,
            depth,
            tune,
            budget,
        } => {
            let cfg = tune_config(tune, eps_bar)?;
            commands::all::<T>(
                s,
                Theta::parse(theta)?,
                parse_complex(b)?,
                *n,
                *k,
                *depth,
                &cfg,
                *budget,
            )
        }
    }
}

#[derive(serde::Serialize)]
struct Diagnostic<'a> {
    command: &'a str,
    exit_code: i32,
    error: String,
    detail: &'a str,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("warning: thread pool already initialized: {e}");
        }
    }
    let name = cli.command.name();
    let mut session = Session::new(name, cfg);
    let result = match session.config.precision {
        Precision::Double => run::<f64>(&cli.command, &mut session),
        Precision::Extended => run::<TwoFloat>(&cli.command, &mut session),
    };
    let outputs: Vec<PathBuf> = session.outputs().iter().map(|f| f.path.clone()).collect();
    let out_dir = session.config.out_dir.clone();
    let manifest = session.finish();
    match (result, manifest) {
        (Ok(()), Ok(m)) => {
            // A closed pipe is not an error of the run.
            let mut so = std::io::stdout().lock();
            for p in outputs.iter().chain([&m]) {
                let _ = writeln!(so, "{}", p.display());
            }
            ExitCode::SUCCESS
        }
        (Err(e), _) => {
            let code = e.exit_code();
            eprintln!("error: {e}");
            if code == 3 {
                let d = Diagnostic {
                    command: name,
                    exit_code: code,
                    error: e.to_string(),
                    detail: "numeric regime",
                };
                let path = out_dir.join(format!("{name}.error.json"));
                match output::to_json(&d) {
                    Ok(bytes) => {
                        if let Err(w) = std::fs::write(&path, bytes) {
                            eprintln!("error: could not write {}: {w}", path.display());
                        }
                    }
                    Err(j) => eprintln!("error: {j}"),
                }
            }
            ExitCode::from(code as u8)
        }
        (Ok(()), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
