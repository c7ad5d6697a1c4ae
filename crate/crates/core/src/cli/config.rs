//! Run configuration: a JSON file layered under command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harmonics::{GroupKind, SymmetryGroup};
use crate::model::{ModelParams, NumericsConfig};

/// Environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "HYPERBIF_OUTPUT_DIR";

/// Everything a subcommand needs. Fields absent from a config file take the
/// defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    /// `None` selects the standard group for the dimension.
    pub group: Option<SymmetryGroup>,
    pub numerics: NumericsConfig,
    pub seed: u64,
    /// Excluded from the config hash.
    pub output_dir: Option<PathBuf>,
    /// Excluded from the config hash; results do not depend on it.
    pub parallel: bool,
    /// Inner radius `R` of the exterior domain.
    pub radius: f64,
    /// `λ` at which `spectrum` evaluates the linearized operator.
    pub lambda: f64,
    pub n_eigs: usize,
    pub trials: usize,
    pub lambda_min: Option<f64>,
    pub lambda_max: f64,
    pub grid_points: usize,
    /// Number of invariant degrees swept by `sigma-curve`.
    pub degrees: usize,
    /// Largest harmonic degree considered for group spectra.
    pub k_max: usize,
    pub epsilons: Vec<f64>,
    pub shape_samples: usize,
    pub radii: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ModelParams { n: 3, p: 3.0 },
            group: None,
            numerics: NumericsConfig::default(),
            seed: 0,
            output_dir: None,
            parallel: false,
            radius: 1.0,
            lambda: 1.0,
            n_eigs: 3,
            trials: 200,
            lambda_min: None,
            lambda_max: 50.0,
            grid_points: 40,
            degrees: 3,
            k_max: 15,
            epsilons: vec![0.05, -0.05],
            shape_samples: 400,
            radii: vec![1.0, 0.5, 0.25, 0.1],
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// The configured group, or icosahedral in `R³`, dihedral `D₃` in `R²`,
    /// the 600-cell group in `R⁴` and the trivial group otherwise.
    pub fn symmetry_group(&self) -> Result<SymmetryGroup> {
        let n = self.params.n;
        let group = match self.group {
            Some(g) => g,
            None => {
                let kind = match n {
                    2 => GroupKind::Dihedral(3),
                    3 => GroupKind::Icosahedral,
                    4 => GroupKind::HyperIcosahedral,
                    _ => GroupKind::Full,
                };
                SymmetryGroup::new(kind, n)?
            }
        };
        if group.ambient_n != n {
            return Err(Error::Incompatible(format!("group acts on R^{} but N = {n}", group.ambient_n)));
        }
        group.validate()?;
        Ok(group)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.numerics.validate()?;
        self.symmetry_group()?;
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be positive and finite, got {x}")))
            }
        };
        positive("radius", self.radius)?;
        positive("lambda", self.lambda)?;
        positive("lambda_max", self.lambda_max)?;
        if let Some(lo) = self.lambda_min {
            positive("lambda_min", lo)?;
            if lo >= self.lambda_max {
                return Err(Error::InvalidParams("lambda_min must be below lambda_max".into()));
            }
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidParams("grid_points must be at least 2".into()));
        }
        if self.degrees == 0 || self.k_max == 0 || self.n_eigs == 0 || self.trials == 0 {
            return Err(Error::InvalidParams("degrees, k_max, n_eigs and trials must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of this config with `output_dir` and
    /// `parallel` cleared, in lowercase hex.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        canonical.parallel = false;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse `icosahedral`, `octahedral`, `tetrahedral`, `hyper-icosahedral`,
/// `trivial` or `dihedral:<m>` (also `dihedral(<m>)`, `d<m>`).
pub fn parse_group_kind(s: &str) -> Result<GroupKind> {
    let t = s.trim().to_ascii_lowercase();
    let kind = match t.as_str() {
        "icosahedral" | "ico" => GroupKind::Icosahedral,
        "octahedral" | "oct" => GroupKind::Octahedral,
        "tetrahedral" | "tet" => GroupKind::Tetrahedral,
        "hyper-icosahedral" | "hypericosahedral" | "600-cell" => GroupKind::HyperIcosahedral,
        "trivial" | "full" | "none" => GroupKind::Full,
        _ => {
            let order = t
                .strip_prefix("dihedral:")
                .or_else(|| t.strip_prefix("dihedral(").and_then(|x| x.strip_suffix(')')))
                .or_else(|| t.strip_prefix('d'))
                .and_then(|x| x.parse::<usize>().ok())
                .ok_or_else(|| Error::Config(format!("unknown group '{s}'")))?;
            GroupKind::Dihedral(order)
        }
    };
    Ok(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_names_parse() {
        assert_eq!(parse_group_kind("Icosahedral").unwrap(), GroupKind::Icosahedral);
        assert_eq!(parse_group_kind("dihedral:3").unwrap(), GroupKind::Dihedral(3));
        assert_eq!(parse_group_kind("dihedral(5)").unwrap(), GroupKind::Dihedral(5));
        assert_eq!(parse_group_kind("d4").unwrap(), GroupKind::Dihedral(4));
        assert!(parse_group_kind("cubic").is_err());
    }

    #[test]
    fn hash_ignores_output_dir_and_parallelism() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output_dir = Some("/tmp/x".into());
        b.parallel = true;
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"params": {"N": 2, "p": 3.0}}"#).unwrap();
        assert_eq!(c.params.n, 2);
        assert_eq!(c.grid_points, 40);
        assert_eq!(c.symmetry_group().unwrap().kind, GroupKind::Dihedral(3));
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
