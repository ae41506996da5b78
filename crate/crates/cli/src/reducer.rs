use corred_core::reduction::{
    conditioned_reduce, correlated_reduce, neumann_reduce, projective_reduce, reconstruction_error,
    CorrelatedOptions, IterationReport, Method, ReductionResult, Seed,
};
use corred_core::{BipartiteSystem, CoreError, DensityMatrix, Side};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::config::{read_json, ReductionSpec, SeedSpec};
use crate::error::{CliError, Result};

/// Either a one-shot reduction or the report of the correlated iteration.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Reduced {
    Single(ReductionResult),
    Iterated(IterationReport),
}

impl Reduced {
    pub fn result(&self) -> &ReductionResult {
        match self {
            Reduced::Single(r) => r,
            Reduced::Iterated(rep) => &rep.result,
        }
    }
}

/// A previous result used as the starting pair; extra fields are ignored.
#[derive(Deserialize)]
struct SeedFile {
    rho_alpha: DensityMatrix,
    #[serde(default)]
    rho_beta: Option<DensityMatrix>,
}

enum Plan {
    Neumann,
    Projective(usize),
    Conditioned(DensityMatrix, Side),
    Correlated(CorrelatedOptions, Vec<Seed>),
}

/// A reduction with its input files loaded once, reusable across states.
pub struct Reducer {
    plan: Plan,
}

impl Reducer {
    pub fn new(spec: &ReductionSpec, sys: &BipartiteSystem) -> Result<Self> {
        let plan = match spec {
            ReductionSpec::Neumann => Plan::Neumann,
            ReductionSpec::Projective { level } => {
                if *level >= sys.dim_beta() {
                    return Err(CliError::Config(format!("level {level} out of range for dim {}", sys.dim_beta())));
                }
                Plan::Projective(*level)
            }
            ReductionSpec::Conditioned { state, given } => {
                let sigma: DensityMatrix = read_json(state)?;
                if sigma.dim() != sys.dim(*given) {
                    return Err(CliError::Config(format!(
                        "{}: dimension {} does not match subsystem dimension {}",
                        state.display(),
                        sigma.dim(),
                        sys.dim(*given)
                    )));
                }
                Plan::Conditioned(sigma, *given)
            }
            ReductionSpec::Correlated { tol, max_iter, seed, scheme } => {
                let opts = CorrelatedOptions { tol: *tol, max_iter: *max_iter, scheme: *scheme };
                let first = match seed {
                    SeedSpec::Neumann => Seed::Neumann,
                    SeedSpec::MinimumInformation => Seed::MinimumInformation,
                    SeedSpec::File(p) => {
                        let f: SeedFile = read_json(p)?;
                        Seed::Result(ReductionResult {
                            rho_alpha: f.rho_alpha,
                            rho_beta: f.rho_beta,
                            method: Method::Correlated,
                            reconstruction_error: None,
                        })
                    }
                };
                // retry order after a degenerate first sweep
                let mut seeds = vec![first];
                if !matches!(seeds[0], Seed::MinimumInformation) {
                    seeds.push(Seed::MinimumInformation);
                }
                if !matches!(seeds[0], Seed::Neumann) {
                    seeds.push(Seed::Neumann);
                }
                Plan::Correlated(opts, seeds)
            }
        };
        Ok(Self { plan })
    }

    pub fn reduce(&self, rho: &DensityMatrix, sys: &BipartiteSystem) -> Result<Reduced> {
        match &self.plan {
            Plan::Neumann => Ok(Reduced::Single(neumann_reduce(rho, sys)?)),
            Plan::Projective(level) => Ok(Reduced::Single(projective_reduce(rho, sys, *level)?)),
            Plan::Conditioned(sigma, given) => {
                let out = conditioned_reduce(rho, sys, sigma, *given)?;
                let (alpha, beta) = match given {
                    Side::Beta => (out, sigma.clone()),
                    Side::Alpha => (sigma.clone(), out),
                };
                let err = reconstruction_error(rho.matrix(), alpha.matrix(), beta.matrix())?;
                Ok(Reduced::Single(ReductionResult {
                    rho_alpha: alpha,
                    rho_beta: Some(beta),
                    method: Method::Conditioned,
                    reconstruction_error: Some(err),
                }))
            }
            Plan::Correlated(opts, seeds) => {
                let mut last = None;
                for (k, seed) in seeds.iter().enumerate() {
                    match correlated_reduce(rho, sys, seed, opts) {
                        Ok(rep) => return Ok(Reduced::Iterated(rep)),
                        Err(e @ CoreError::DegenerateOverlap { .. }) => {
                            warn!("seed {k} is orthogonal to the state ({e}); retrying");
                            last = Some(e);
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                Err(last.expect("at least one seed").into())
            }
        }
    }
}
