use std::path::Path;

use corred_core::ensembles::{
    epr_decomposition, spin_pair_initial_decomposition, spin_pair_reduced_decomposition, triplet_decomposition,
    verify_ensemble, Ensemble, VerificationReport,
};
use corred_core::models::{spin_pair_density, ModelParams, SpinPairParams};
use corred_core::states::{epr_state, spin_pair_initial, triplet_state};
use corred_core::{BipartiteSystem, ComplexMatrix, DensityMatrix, Validation};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{DecomposeArgs, DecompositionKind, ReduceArgs, ValidateArgs, ValidationArg};
use crate::config::{read_json, Experiment, ExperimentConfig, ReductionSpec};
use crate::error::{CliError, Result};
use crate::output::Sink;
use crate::reducer::Reducer;

fn infer_dims(n: usize) -> Result<BipartiteSystem> {
    let root = (n as f64).sqrt().round() as usize;
    if root * root != n {
        return Err(CliError::Config(format!("cannot split dimension {n} into equal factors; pass --dims")));
    }
    Ok(BipartiteSystem::new(root, root)?)
}

pub fn reduce(args: &ReduceArgs) -> Result<()> {
    let rho: DensityMatrix = read_json(&args.state)?;
    let sys = match args.dims.as_deref() {
        Some([na, nb]) => BipartiteSystem::new(*na, *nb)?,
        Some(_) => return Err(CliError::Config("--dims takes two values".into())),
        None => infer_dims(rho.dim())?,
    };
    if sys.composite_dim() != rho.dim() {
        return Err(CliError::Config(format!("state has dimension {}, dims give {}", rho.dim(), sys.composite_dim())));
    }
    let spec = args.method.apply(ReductionSpec::Neumann)?;
    let reduced = Reducer::new(&spec, &sys)?.reduce(&rho, &sys)?;
    Sink::new(args.out.clone()).write_json(&reduced)
}

#[derive(Serialize)]
struct Decomposition<'a> {
    kind: &'a str,
    ensemble: &'a Ensemble,
    verification: &'a VerificationReport,
}

pub fn decompose(args: &DecomposeArgs) -> Result<()> {
    let (ensemble, target, kind) = match args.kind {
        DecompositionKind::Epr => (epr_decomposition(args.theta), epr_state(), "epr"),
        DecompositionKind::Triplet => (triplet_decomposition(args.theta), triplet_state(), "triplet"),
        DecompositionKind::SpinPairInitial => (
            spin_pair_initial_decomposition(args.phi, args.theta),
            spin_pair_initial(args.phi),
            "spin_pair_initial",
        ),
        DecompositionKind::SpinPairT => {
            let p = SpinPairParams {
                omega: args.omega,
                j_coupling: args.j_coupling,
                c_coupling: args.c_coupling,
                d_coupling: args.d_coupling,
            };
            (
                spin_pair_reduced_decomposition(args.phi, p.c_coupling, args.t, args.theta)?,
                spin_pair_density(&p, args.phi, args.t),
                "spin_pair_t",
            )
        }
    };
    let report = verify_ensemble(&ensemble, &target, args.tol)?;
    Sink::new(args.out.clone()).write_json(&Decomposition { kind, ensemble: &ensemble, verification: &report })?;
    if report.passed || args.report_only {
        Ok(())
    } else {
        Err(CliError::Verification { max_error: report.max_error, tolerance: args.tol })
    }
}

fn check_config(path: &Path) -> Result<Value> {
    let cfg = ExperimentConfig::load(path)?;
    let sys = match &cfg.experiment {
        Experiment::Epr | Experiment::SpinPair(_) => BipartiteSystem::qubit_pair(),
        Experiment::JcmVacuum(p) => p.labeling()?.system(),
        Experiment::Custom(c) => {
            let sys = BipartiteSystem::new(c.dims[0], c.dims[1])?;
            let rho: DensityMatrix = read_json(&c.state)?;
            if rho.dim() != sys.composite_dim() {
                return Err(CliError::Config(format!("{}: dimension mismatch", c.state.display())));
            }
            if let Some(h) = &c.hamiltonian {
                let h: ComplexMatrix = read_json(h)?;
                if !h.is_hermitian(corred_core::linalg::DEFAULT_TOL) || h.rows() != rho.dim() {
                    return Err(CliError::Config("hamiltonian must be hermitian and match the state".into()));
                }
            }
            sys
        }
    };
    // loads any referenced state or seed files
    Reducer::new(&cfg.reduction, &sys)?;
    let seed = match &cfg.reduction {
        ReductionSpec::Correlated { seed, .. } => Some(seed.to_string()),
        _ => None,
    };
    Ok(json!({
        "kind": "config",
        "time_points": cfg.time_grid.points().len(),
        "dims": [sys.dim_alpha(), sys.dim_beta()],
        "reduction": cfg.reduction,
        "seed": seed,
    }))
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let value: Value = read_json(&args.path)?;
    let summary = if value.get("experiment").is_some() {
        check_config(&args.path)?
    } else if value.get("terms").is_some() {
        let e: Ensemble = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        json!({"kind": "ensemble", "terms": e.terms().len(), "dims": [e.system().dim_alpha(), e.system().dim_beta()]})
    } else if value.get("model").is_some() {
        let m: ModelParams = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        let h = m.hamiltonian()?;
        json!({"kind": "model", "model": m, "dim": h.rows()})
    } else if value.get("data").is_some() {
        let rho = match args.validation {
            None => serde_json::from_value::<DensityMatrix>(value).map_err(|e| CliError::Config(e.to_string()))?,
            Some(level) => {
                let m: ComplexMatrix = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
                let level = match level {
                    ValidationArg::Strict => Validation::Strict,
                    ValidationArg::Relaxed => Validation::Relaxed,
                };
                DensityMatrix::new(m, level)?
            }
        };
        json!({
            "kind": "density",
            "dim": rho.dim(),
            "validation": rho.validation(),
            "min_eigenvalue": rho.min_eigenvalue(),
            "purity": rho.purity(),
        })
    } else {
        return Err(CliError::Config(format!("{}: not a config, ensemble, model or density file", args.path.display())));
    };
    let mut summary = summary;
    summary["ok"] = Value::Bool(true);
    Sink::new(None).write_json(&summary)
}
