//! The `hyperbif` command line: argument parsing, config layering
//! (flags over file over defaults), exit codes and structured errors.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use config::{parse_group_kind, RunConfig, OUTPUT_DIR_ENV};
pub use output::{csv_table, Artifacts};

use crate::error::{Error, ErrorKind, Result};
use crate::harmonics::SymmetryGroup;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Validation => EXIT_VALIDATION,
        ErrorKind::Solver => EXIT_SOLVER,
        ErrorKind::Violation => EXIT_VIOLATION,
    }
}

#[derive(Debug, Parser)]
#[command(name = "hyperbif", version, about = "Ground states, DtN eigenvalue curves and bifurcation radii for -Δu + u = u^p on exterior domains of hyperbolic space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the exterior ground state w_R and check its qualitative properties.
    SolveRadial {
        #[command(flatten)]
        common: Common,
        /// Inner radius R.
        #[arg(long = "R")]
        radius: Option<f64>,
    },
    /// Qualitative checks (g-sign, energy, single peak, peak bound, decay) only.
    Qualitative {
        #[command(flatten)]
        common: Common,
        #[arg(long = "R")]
        radius: Option<f64>,
    },
    /// Radial spectrum of the linearized operator at u_λ.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        n_eigs: Option<usize>,
        /// Randomized trials of the constrained form.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Sample σ_i(λ) for the first invariant degrees.
    SigmaCurve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
        /// Number of invariant degrees.
        #[arg(long)]
        degrees: Option<usize>,
    },
    /// Locate and certify Λ*, then emit perturbed boundary shapes.
    FindBifurcation {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
        /// Shape amplitudes; repeat or separate with commas.
        #[arg(long = "epsilon", value_delimiter = ',', allow_negative_numbers = true)]
        epsilons: Vec<f64>,
        #[arg(long)]
        shape_samples: Option<usize>,
        /// Print the group spectrum and the (G1) verdict without solving.
        #[arg(long)]
        check_group_only: bool,
    },
    /// Invariant degrees, multiplicities and the (G1) condition.
    CheckGroup {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Weighted H¹ distance from w_R to the whole-space ground state.
    ConvergenceStudy {
        #[command(flatten)]
        common: Common,
        /// Strictly decreasing radii, comma separated.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
}

#[derive(Debug, Args, Default, Clone)]
pub struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// icosahedral, octahedral, tetrahedral, hyper-icosahedral, trivial or dihedral:<m>.
    #[arg(long)]
    pub group: Option<String>,
    /// Keep only the proper rotations of a polyhedral group.
    #[arg(long)]
    pub rotations_only: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $HYPERBIF_OUTPUT_DIR, then the current directory).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Use all cores for λ sweeps; results are identical to a serial run.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args, Default, Clone)]
pub struct Sweep {
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(n) = self.n {
            cfg.params.n = n;
        }
        if let Some(p) = self.p {
            cfg.params.p = p;
        }
        if let Some(name) = &self.group {
            let kind = parse_group_kind(name)?;
            cfg.group = Some(SymmetryGroup {
                kind,
                ambient_n: cfg.params.n,
                rotations_only: false,
            });
        }
        if self.rotations_only {
            let mut g = cfg.symmetry_group()?;
            g.rotations_only = true;
            cfg.group = Some(g);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = Some(d.clone());
        }
        if self.parallel {
            cfg.parallel = true;
        }
        Ok(())
    }
}

impl Sweep {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.lambda_min.is_some() {
            cfg.lambda_min = self.lambda_min;
        }
        if let Some(x) = self.lambda_max {
            cfg.lambda_max = x;
        }
        if let Some(x) = self.grid_points {
            cfg.grid_points = x;
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::SolveRadial { common, .. }
            | Command::Qualitative { common, .. }
            | Command::Spectrum { common, .. }
            | Command::SigmaCurve { common, .. }
            | Command::FindBifurcation { common, .. }
            | Command::CheckGroup { common, .. }
            | Command::ConvergenceStudy { common, .. } => common,
        }
    }

    /// Defaults, then the config file, then the flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let common = self.common();
        let mut cfg = match &common.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        common.apply(&mut cfg)?;
        match self {
            Command::SolveRadial { radius, .. } | Command::Qualitative { radius, .. } => {
                if let Some(r) = radius {
                    cfg.radius = *r;
                }
            }
            Command::Spectrum { lambda, n_eigs, trials, .. } => {
                if let Some(x) = lambda {
                    cfg.lambda = *x;
                }
                if let Some(x) = n_eigs {
                    cfg.n_eigs = *x;
                }
                if let Some(x) = trials {
                    cfg.trials = *x;
                }
            }
            Command::SigmaCurve { sweep, degrees, .. } => {
                sweep.apply(&mut cfg);
                if let Some(d) = degrees {
                    cfg.degrees = *d;
                }
            }
            Command::FindBifurcation { sweep, epsilons, shape_samples, .. } => {
                sweep.apply(&mut cfg);
                if !epsilons.is_empty() {
                    cfg.epsilons = epsilons.clone();
                }
                if let Some(s) = shape_samples {
                    cfg.shape_samples = *s;
                }
            }
            Command::CheckGroup { k_max, .. } => {
                if let Some(k) = k_max {
                    cfg.k_max = *k;
                }
            }
            Command::ConvergenceStudy { radii, .. } => {
                if !radii.is_empty() {
                    cfg.radii = radii.clone();
                }
            }
        }
        if cfg.output_dir.is_none() {
            cfg.output_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
        }
        Ok(cfg)
    }
}

/// Parse `args` (including the program name), run the command and return
/// the process exit code. Failures are reported as JSON on stderr and in
/// `error.json` when the output directory is known.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = cli.command.resolve();
    let out_dir = cfg
        .as_ref()
        .ok()
        .map(|c| c.output_dir.clone().unwrap_or_else(|| PathBuf::from(".")));
    let outcome = cfg.and_then(|c| {
        c.validate()?;
        with_pool(c.parallel, || commands::dispatch(&cli.command, &c))
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(e.kind());
            let doc = json!({
                "error": {
                    "kind": format!("{:?}", e.kind()).to_lowercase(),
                    "exit_code": code,
                    "message": e.to_string(),
                }
            });
            let text = serde_json::to_string_pretty(&doc).expect("error serializes");
            eprintln!("{text}");
            if let Some(dir) = out_dir {
                if std::fs::create_dir_all(&dir).is_ok() {
                    let _ = std::fs::write(dir.join("error.json"), format!("{text}\n"));
                }
            }
            code
        }
    }
}

/// Run `f` on the global pool, or on a single-thread pool for serial runs.
fn with_pool<T: Send>(parallel: bool, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if parallel {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("hyperbif").chain(args.iter().copied()))
            .unwrap()
            .command
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"params": {"N": 2, "p": 2.0}, "seed": 9, "lambda_max": 30.0}"#).unwrap();
        let c = parse(&["sigma-curve", "--config", path.to_str().unwrap(), "--p", "3", "--grid-points", "12"])
            .resolve()
            .unwrap();
        assert_eq!((c.params.n, c.params.p, c.seed), (2, 3.0, 9));
        assert_eq!((c.lambda_max, c.grid_points), (30.0, 12));
        assert_eq!(c.degrees, RunConfig::default().degrees);
    }

    #[test]
    fn group_flags_resolve_against_dimension() {
        let c = parse(&["check-group", "--N", "2", "--group", "dihedral:4"]).resolve().unwrap();
        assert_eq!(c.symmetry_group().unwrap().kind, crate::harmonics::GroupKind::Dihedral(4));
        let c = parse(&["check-group", "--group", "octahedral", "--rotations-only"]).resolve().unwrap();
        assert!(c.symmetry_group().unwrap().rotations_only);
        assert!(parse(&["check-group", "--group", "nonsense"]).resolve().is_err());
    }

    #[test]
    fn list_flags_split_on_commas() {
        let c = parse(&["find-bifurcation", "--epsilon", "0.1,-0.1"]).resolve().unwrap();
        assert_eq!(c.epsilons, vec![0.1, -0.1]);
        let c = parse(&["convergence-study", "--radii", "2,1"]).resolve().unwrap();
        assert_eq!(c.radii, vec![2.0, 1.0]);
    }
}
