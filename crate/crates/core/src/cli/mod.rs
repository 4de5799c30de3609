//! The `monowave` command line: configuration, manifests, reports.
//!
//! Exit codes: 0 success, 2 validation error, 3 tolerance breach, 4 I/O error.

pub mod commands;
pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{Outcome, Outputs};
pub use config::{Anchor, ExperimentConfig, ExperimentKind, RunManifest, WitnessConfig, MANIFEST_FILE, MANIFEST_SCHEMA};

use crate::ensemble::{DirectionScheme, FieldKind, FieldSpec, WaveSample};
use crate::field::Field;
use crate::nodal::testfields::TestField;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("tolerance breach: {0}")]
    Tolerance(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Tolerance(_) => EXIT_TOLERANCE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "monowave", version, about = "Monochromatic random waves: sampling, nodal topology, identity checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON experiment configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed of the ensemble spec (and of the special-function checks)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (created if missing)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Window side lengths "a,b[,c]" (one value: a cube)
    #[arg(long, global = true)]
    pub window: Option<String>,
    #[arg(long, global = true)]
    pub spacing: Option<f64>,
    #[arg(long, global = true, env = "MONOWAVE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EnsembleArg {
    PlaneWave,
    P1,
    Sphere,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TestFieldArg {
    BesselRing,
    SincSphere,
    SineLattice,
    Torus,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Scaling,
    Concentration,
}

/// Ensemble selection; `--ensemble` replaces any spec from the config.
#[derive(Debug, Args, Default)]
pub struct SpecArgs {
    #[arg(long, value_enum)]
    pub ensemble: Option<EnsembleArg>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Number of ±ξ pairs (plane-wave ensembles)
    #[arg(long, default_value_t = 64, allow_negative_numbers = true)]
    pub n_dirs: i64,
    /// Inner spectral radius; 1 gives monochromatic waves
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// i.i.d. uniform directions instead of the equidistributed set
    #[arg(long)]
    pub iid: bool,
    #[arg(long, default_value_t = 20, allow_negative_numbers = true)]
    pub max_degree: i64,
    /// Degree of the sphere ensemble
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    pub ell: i64,
    #[arg(long, value_enum)]
    pub test_field: Option<TestFieldArg>,
    /// Cells per side of the sine lattice
    #[arg(long, default_value_t = 4)]
    pub cells: u32,
    /// A WaveSample JSON file to use as the field
    #[arg(long)]
    pub sample: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the special-function identity suites
    SpecfunCheck {
        #[arg(long)]
        ell_max: Option<u32>,
        /// Multiply the closed-form transform (fault injection for testing the checker)
        #[arg(long, hide = true)]
        inject_ft_scale: Option<f64>,
    },
    /// Draw a realization and write it as JSON
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        /// Also write the rasterized grid
        #[arg(long)]
        grid: bool,
    },
    /// Extract and classify the nodal set of a field
    Nodal {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Monte Carlo experiments over a window schedule
    Experiment {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[command(flatten)]
        spec: SpecArgs,
        /// Window schedule: comma-separated side lengths
        #[arg(long)]
        windows: Option<String>,
        /// Windows span [0, side] instead of being centred
        #[arg(long)]
        origin: bool,
        #[arg(long)]
        bootstrap: Option<usize>,
    },
    /// Build and verify a trigonometric sum whose zero set has a spherical component
    Witness {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        n_dirs: Option<usize>,
    },
    /// Repeat a run from its manifest
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Evaluate a field at one point
    Spot {
        #[command(flatten)]
        spec: SpecArgs,
        /// "x,y[,z]"
        #[arg(long)]
        point: String,
    },
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Validation(format!("{what}: cannot parse {t:?} in {s:?}"))))
        .collect()
}

fn test_field(arg: TestFieldArg, cells: u32) -> TestField {
    match arg {
        TestFieldArg::BesselRing => TestField::BesselRing,
        TestFieldArg::SincSphere => TestField::SincSphere,
        TestFieldArg::SineLattice => TestField::SineLattice { cells },
        TestFieldArg::Torus => TestField::Torus,
    }
}

fn apply_spec_args(cfg: &mut ExperimentConfig, a: &SpecArgs) -> Result<(), CliError> {
    if let Some(t) = a.test_field {
        cfg.test_field = Some(test_field(t, a.cells));
        if matches!(t, TestFieldArg::SineLattice) && cfg.window.is_none() {
            cfg.anchor = Anchor::Origin;
        }
    }
    if let Some(path) = &a.sample {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        cfg.sample = Some(WaveSample::from_json(&text).map_err(|e| CliError::Validation(e.to_string()))?);
    }
    if let Some(e) = a.ensemble {
        let seed = cfg.spec.as_ref().map(|s| s.seed).unwrap_or(0);
        let kind = match e {
            EnsembleArg::PlaneWave => FieldKind::PlaneWave {
                n_dirs: a.n_dirs,
                alpha: a.alpha,
                directions: if a.iid { DirectionScheme::IidRandom } else { DirectionScheme::Equidistributed },
            },
            EnsembleArg::P1 => FieldKind::P1Truncated { max_degree: a.max_degree },
            EnsembleArg::Sphere => FieldKind::SphereEnsemble { ell: a.ell },
        };
        let dim = if matches!(e, EnsembleArg::Sphere) { 3 } else { a.dim };
        cfg.spec = Some(FieldSpec { dim, kind, seed });
    }
    Ok(())
}

/// Folds the command line into the configuration.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    match &cli.command {
        Command::SpecfunCheck { ell_max, inject_ft_scale } => {
            if let Some(l) = ell_max {
                cfg.specfun.ell_max = *l;
            }
            if let Some(s) = inject_ft_scale {
                cfg.specfun.ft_scale = *s;
            }
        }
        Command::Sample { spec, grid } => {
            apply_spec_args(&mut cfg, spec)?;
            cfg.grid_dump |= *grid;
        }
        Command::Nodal { spec } | Command::Spot { spec, .. } => apply_spec_args(&mut cfg, spec)?,
        Command::Experiment { kind, spec, windows, origin, bootstrap } => {
            apply_spec_args(&mut cfg, spec)?;
            if let Some(k) = kind {
                cfg.experiment = Some(match k {
                    KindArg::Scaling => ExperimentKind::Scaling,
                    KindArg::Concentration => ExperimentKind::Concentration,
                });
            }
            if let Some(w) = windows {
                cfg.windows = parse_list(w, "--windows")?;
            }
            if *origin {
                cfg.anchor = Anchor::Origin;
            }
            if let Some(b) = bootstrap {
                cfg.bootstrap_resamples = *b;
            }
        }
        Command::Witness { dim, n_dirs } => {
            if let Some(d) = dim {
                cfg.witness.dim = *d;
            }
            if let Some(n) = n_dirs {
                cfg.witness.n_dirs = *n;
            }
        }
        Command::Replay { .. } => {}
    }
    if let Some(seed) = g.seed {
        if let Some(s) = cfg.spec.as_mut() {
            s.seed = seed;
        }
        cfg.specfun.seed = seed;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if let Some(w) = &g.window {
        cfg.window = Some(parse_list(w, "--window")?);
    }
    if let Some(h) = g.spacing {
        cfg.spacing = Some(h);
    }
    if let Some(o) = &g.out {
        cfg.out_dir = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub const DEFAULT_OUT: &str = "monowave-out";

/// Runs one command with a resolved configuration and writes its manifest.
pub fn run_command(command: &str, cfg: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let out = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let started = unix_now();
    let outcome = match command {
        "specfun-check" => commands::cmd_specfun_check(cfg, &out)?,
        "sample" => commands::cmd_sample(cfg, &out)?,
        "nodal" => commands::cmd_nodal(cfg, &out)?,
        "experiment" => commands::cmd_experiment(cfg, &out)?,
        "witness" => commands::cmd_witness(cfg, &out)?,
        other => return Err(CliError::Validation(format!("unknown command {other:?}"))),
    };
    let mut config = cfg.clone();
    config.out_dir = Some(out.clone());
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config,
        seed_rule: outcome.seed_rule,
        derived_seeds: outcome.derived_seeds,
        threads: rayon::current_num_threads(),
        started_unix: started,
        finished_unix: unix_now(),
        outputs: outcome.files,
    };
    let mut o = Outputs::create(&out)?;
    o.write_json(MANIFEST_FILE, &manifest)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

/// Repeats the run described by a manifest, optionally into another directory.
pub fn replay(manifest: &Path, out: Option<&Path>) -> Result<RunManifest, CliError> {
    let m = RunManifest::load(manifest)?;
    let mut cfg = m.config.clone();
    if let Some(o) = out {
        cfg.out_dir = Some(o.to_path_buf());
    }
    run_command(&m.command, &cfg)
}

fn spot(cfg: &ExperimentConfig, point: &str) -> Result<(), CliError> {
    let x = parse_list(point, "--point")?;
    let value = if let Some(t) = &cfg.test_field {
        if x.len() != t.dim() {
            return Err(CliError::Validation(format!("point must have {} coordinates", t.dim())));
        }
        t.value(&x)
    } else {
        let s = match &cfg.sample {
            Some(s) => s.clone(),
            None => crate::ensemble::sample(cfg.spec.as_ref().ok_or_else(|| {
                CliError::Validation("no field source: give an ensemble spec, a sample or a test field".into())
            })?)
            .map_err(|e| CliError::Validation(e.to_string()))?,
        };
        s.evaluate(&x).map_err(|e| CliError::Validation(e.to_string()))?
    };
    println!("{}", serde_json::json!({ "point": x, "value": value }));
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::SpecfunCheck { .. } => "specfun-check",
        Command::Sample { .. } => "sample",
        Command::Nodal { .. } => "nodal",
        Command::Experiment { .. } => "experiment",
        Command::Witness { .. } => "witness",
        Command::Replay { .. } => "replay",
        Command::Spot { .. } => "spot",
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.global.threads {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Replay { manifest } => replay(manifest, cli.global.out.as_deref()).map(|_| ()),
        c => resolve_config(&cli).and_then(|cfg| match c {
            Command::Spot { point, .. } => spot(&cfg, point),
            _ => run_command(command_name(c), &cfg).map(|_| ()),
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("monowave: {e}");
            e.exit_code()
        }
    }
}
