//! Experiment specifications and named presets.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fdd,
    LltLattice,
    LltNonlattice,
    Tech1,
    Range,
    Omega,
    Nontight,
    OracleCheck,
    StableSelftest,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Fdd,
        Experiment::LltLattice,
        Experiment::LltNonlattice,
        Experiment::Tech1,
        Experiment::Range,
        Experiment::Omega,
        Experiment::Nontight,
        Experiment::OracleCheck,
        Experiment::StableSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fdd => "fdd",
            Experiment::LltLattice => "llt-lattice",
            Experiment::LltNonlattice => "llt-nonlattice",
            Experiment::Tech1 => "tech1",
            Experiment::Range => "range",
            Experiment::Omega => "omega",
            Experiment::Nontight => "nontight",
            Experiment::OracleCheck => "oracle-check",
            Experiment::StableSelftest => "stable-selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Quick,
    Standard,
    Deep,
}

/// A Monte Carlo experiment. The JSON config format has exactly these fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub walk: String,
    pub scenery: String,
    pub n_grid: Vec<u64>,
    pub trials: u64,
    #[serde(default)]
    pub checkpoint_times: Vec<f64>,
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub x: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub gamma_omega: Option<f64>,
    pub seed: u64,
    pub workers: usize,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let spec: ExperimentSpec =
            serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Structural checks; model names are resolved when the experiment runs.
    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if self.n_grid.is_empty() {
            return bad("n_grid is empty".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "n_grid {:?} must be strictly increasing",
                self.n_grid
            ));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        let t = &self.checkpoint_times;
        if t.windows(2).any(|w| !(w[0] < w[1])) || t.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return bad(format!(
                "checkpoint_times {t:?} must increase within (0, 1]"
            ));
        }
        if self.experiment == Experiment::Tech1 {
            let m = self.checkpoint_times.len().max(1);
            if !self.thetas.is_empty() && self.thetas.len() != m {
                return bad(format!("{} thetas for {m} checkpoints", self.thetas.len()));
            }
        }
        if let (Some(a), Some(b)) = (self.a, self.b) {
            if !(a < b) {
                return bad(format!("need a < b, got [{a}, {b}]"));
            }
        }
        let min_n = match self.experiment {
            Experiment::OracleCheck | Experiment::StableSelftest => 1,
            Experiment::Omega => 16,
            _ => 2,
        };
        if self.n_grid[0] < min_n {
            return bad(format!("{} needs n ≥ {min_n}", self.experiment.name()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Default spec for `experiment` at `preset`.
    pub fn preset(experiment: Experiment, preset: Preset) -> Self {
        let base = |walk: &str, scenery: &str| ExperimentSpec {
            experiment,
            walk: walk.into(),
            scenery: scenery.into(),
            n_grid: vec![],
            trials: 0,
            checkpoint_times: vec![],
            thetas: vec![],
            gamma: None,
            x: None,
            a: None,
            b: None,
            gamma_omega: None,
            seed: 1,
            workers: 1,
        };
        let pick = |q: (Vec<u64>, u64), s: (Vec<u64>, u64), d: (Vec<u64>, u64)| match preset {
            Preset::Quick => q,
            Preset::Standard => s,
            Preset::Deep => d,
        };
        let mut spec = match experiment {
            Experiment::Fdd => ExperimentSpec {
                checkpoint_times: vec![0.5, 1.0],
                ..base("srw2d", "gaussian")
            },
            Experiment::LltLattice => ExperimentSpec {
                x: Some(0.0),
                ..base("srw2d", "rademacher")
            },
            Experiment::LltNonlattice => ExperimentSpec {
                x: Some(0.0),
                a: Some(-1.0),
                b: Some(1.0),
                ..base("srw2d", "gaussian")
            },
            Experiment::Tech1 => ExperimentSpec {
                checkpoint_times: vec![1.0],
                thetas: vec![1.0],
                gamma: Some(2.0),
                ..base("srw2d", "gaussian")
            },
            Experiment::Range => base("srw2d", "gaussian"),
            Experiment::Omega => ExperimentSpec {
                gamma_omega: Some(0.5),
                ..base("srw2d", "gaussian")
            },
            Experiment::Nontight => base("srw2d", "cauchy-cont"),
            Experiment::OracleCheck => base("srw1d", "rademacher"),
            Experiment::StableSelftest => base("srw2d", "stable(1.5,1,0.3)"),
        };
        let (n_grid, trials) = match experiment {
            Experiment::Fdd => pick(
                (vec![10_000], 2_000),
                (vec![1_000_000], 10_000),
                (vec![100_000, 1_000_000], 100_000),
            ),
            Experiment::LltLattice => pick(
                (vec![1_000, 10_000], 100_000),
                (vec![1_000, 100_000], 1_000_000),
                (vec![1_000, 100_000, 1_000_000], 1_000_000),
            ),
            Experiment::LltNonlattice => pick(
                (vec![10_000], 100_000),
                (vec![100_000], 1_000_000),
                (vec![100_000, 1_000_000], 1_000_000),
            ),
            Experiment::Tech1 => pick(
                (vec![1_000, 10_000, 100_000], 20),
                (vec![10_000, 100_000, 1_000_000], 50),
                (vec![10_000, 100_000, 1_000_000, 10_000_000], 200),
            ),
            Experiment::Range => pick(
                (vec![1_000, 10_000, 100_000], 50),
                (vec![10_000, 100_000, 1_000_000], 100),
                (vec![10_000, 100_000, 1_000_000, 10_000_000], 400),
            ),
            Experiment::Omega => pick(
                (vec![10_000], 200),
                (vec![100_000], 1_000),
                (vec![100_000, 1_000_000], 10_000),
            ),
            Experiment::Nontight => pick(
                (vec![10_000], 200),
                (vec![100_000], 500),
                (vec![100_000, 1_000_000], 5_000),
            ),
            Experiment::OracleCheck => pick(
                (vec![1, 2, 3, 5, 8], 100_000),
                (vec![1, 2, 3, 5, 8], 1_000_000),
                (vec![1, 2, 3, 5, 8, 10], 10_000_000),
            ),
            Experiment::StableSelftest => pick(
                (vec![1], 100_000),
                (vec![1], 1_000_000),
                (vec![1], 10_000_000),
            ),
        };
        spec.n_grid = n_grid;
        spec.trials = trials;
        spec
    }
}
