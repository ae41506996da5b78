use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use corred_core::models::{JcmParams, SpinPairParams};
use corred_core::reduction::{CorrelatedOptions, UpdateScheme};
use corred_core::Side;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{MethodArgs, MethodKind, SchemeArg, SideArg};
use crate::error::{CliError, Result};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default)]
    pub time_grid: TimeGrid,
    #[serde(default)]
    pub reduction: ReductionSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "params", rename_all = "snake_case")]
pub enum Experiment {
    /// The static two-qubit singlet.
    Epr,
    SpinPair(SpinPairExperiment),
    JcmVacuum(JcmParams),
    Custom(CustomExperiment),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinPairExperiment {
    #[serde(flatten)]
    pub model: SpinPairParams,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomExperiment {
    pub state: PathBuf,
    pub dims: [usize; 2],
    /// Composite hamiltonian (matrix JSON); the state is static without one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub include_ties: bool,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 0.0, steps: 1, include_ties: false }
    }
}

impl TimeGrid {
    /// Cell midpoints by default, so exact tie points on a regular grid are
    /// skipped; endpoints (`steps + 1` points) with `include_ties`.
    pub fn points(&self) -> Vec<f64> {
        let dt = (self.stop - self.start) / self.steps as f64;
        if self.include_ties {
            (0..=self.steps).map(|k| self.start + k as f64 * dt).collect()
        } else {
            (0..self.steps).map(|k| self.start + (k as f64 + 0.5) * dt).collect()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ReductionSpec {
    #[default]
    Neumann,
    Projective {
        level: usize,
    },
    Conditioned {
        state: PathBuf,
        #[serde(default = "beta")]
        given: Side,
    },
    Correlated {
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default)]
        seed: SeedSpec,
        #[serde(default)]
        scheme: UpdateScheme,
    },
}

fn beta() -> Side {
    Side::Beta
}

fn default_tol() -> f64 {
    CorrelatedOptions::default().tol
}

fn default_max_iter() -> usize {
    CorrelatedOptions::default().max_iter
}


#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SeedSpec {
    #[default]
    Neumann,
    MinimumInformation,
    File(PathBuf),
}

impl FromStr for SeedSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "neumann" => Ok(SeedSpec::Neumann),
            "minimum_information" => Ok(SeedSpec::MinimumInformation),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(SeedSpec::File(PathBuf::from(p))),
                _ => Err(format!("seed must be neumann, minimum_information or file:<path>, got {s:?}")),
            },
        }
    }
}

impl TryFrom<String> for SeedSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSpec::Neumann => f.write_str("neumann"),
            SeedSpec::MinimumInformation => f.write_str("minimum_information"),
            SeedSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl From<SeedSpec> for String {
    fn from(s: SeedSpec) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl ExperimentConfig {
    /// Parse, resolve input paths against the config's directory and validate.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Experiment::Custom(c) = &mut cfg.experiment {
            resolve(base, &mut c.state);
            if let Some(h) = &mut c.hamiltonian {
                resolve(base, h);
            }
        }
        match &mut cfg.reduction {
            ReductionSpec::Conditioned { state, .. } => resolve(base, state),
            ReductionSpec::Correlated { seed: SeedSpec::File(p), .. } => resolve(base, p),
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.time_grid;
        if g.steps == 0 {
            return Err(CliError::Config("time_grid.steps must be at least 1".into()));
        }
        if !g.start.is_finite() || !g.stop.is_finite() || g.stop < g.start {
            return Err(CliError::Config(format!("time_grid needs start <= stop, got [{}, {}]", g.start, g.stop)));
        }
        if let ReductionSpec::Correlated { tol, max_iter, .. } = self.reduction {
            if tol.is_nan() || tol <= 0.0 {
                return Err(CliError::Config(format!("tol must be positive, got {tol}")));
            }
            if max_iter == 0 {
                return Err(CliError::Config("max_iter must be at least 1".into()));
            }
        }
        if let Experiment::JcmVacuum(p) = &self.experiment {
            if p.n_max == 0 {
                return Err(CliError::Config("n_max must be at least 1".into()));
            }
        }
        if let Experiment::Custom(c) = &self.experiment {
            if c.dims.contains(&0) {
                return Err(CliError::Config("custom dims must be positive".into()));
            }
        }
        Ok(())
    }
}

impl MethodArgs {
    /// Flags layered over `base`. Switching method starts from that method's defaults.
    pub fn apply(&self, base: ReductionSpec) -> Result<ReductionSpec> {
        let mut spec = match (self.method, &base) {
            (None, _)
            | (Some(MethodKind::Neumann), ReductionSpec::Neumann)
            | (Some(MethodKind::Projective), ReductionSpec::Projective { .. })
            | (Some(MethodKind::Conditioned), ReductionSpec::Conditioned { .. })
            | (Some(MethodKind::Correlated), ReductionSpec::Correlated { .. }) => base,
            (Some(MethodKind::Neumann), _) => ReductionSpec::Neumann,
            (Some(MethodKind::Projective), _) => ReductionSpec::Projective {
                level: self.level.ok_or_else(|| CliError::Config("--method projective needs --level".into()))?,
            },
            (Some(MethodKind::Conditioned), _) => ReductionSpec::Conditioned {
                state: self.given.clone().ok_or_else(|| CliError::Config("--method conditioned needs --given".into()))?,
                given: Side::Beta,
            },
            (Some(MethodKind::Correlated), _) => ReductionSpec::Correlated {
                tol: default_tol(),
                max_iter: default_max_iter(),
                seed: SeedSpec::Neumann,
                scheme: UpdateScheme::default(),
            },
        };
        match &mut spec {
            ReductionSpec::Neumann => {}
            ReductionSpec::Projective { level } => {
                if let Some(l) = self.level {
                    *level = l;
                }
            }
            ReductionSpec::Conditioned { state, given } => {
                if let Some(p) = &self.given {
                    *state = p.clone();
                }
                if let Some(s) = self.given_side {
                    *given = match s {
                        SideArg::Alpha => Side::Alpha,
                        SideArg::Beta => Side::Beta,
                    };
                }
            }
            ReductionSpec::Correlated { tol, max_iter, seed, scheme } => {
                if let Some(t) = self.tol {
                    *tol = t;
                }
                if let Some(m) = self.max_iter {
                    *max_iter = m;
                }
                if let Some(s) = &self.seed {
                    *seed = s.parse().map_err(CliError::Config)?;
                }
                if let Some(s) = self.scheme {
                    *scheme = match s {
                        SchemeArg::GaussSeidel => UpdateScheme::GaussSeidel,
                        SchemeArg::Jacobi => UpdateScheme::Jacobi,
                    };
                }
            }
        }
        if let ReductionSpec::Correlated { tol, max_iter, .. } = spec {
            if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
                return Err(CliError::Config(format!("need tol > 0 and max_iter >= 1, got {tol}, {max_iter}")));
            }
        }
        Ok(spec)
    }
}
