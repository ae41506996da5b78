use std::io::Write;

use corred_core::linalg::{evolve_operator, ComplexMatrix};
use corred_core::models::{jcm_vacuum_density, spin_pair_density};
use corred_core::states::epr_state;
use corred_core::{BipartiteSystem, DensityMatrix, Validation, Verdict};
use log::info;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{read_json, Experiment, ExperimentConfig, OutputFormat};
use crate::error::{CliError, Result};
use crate::output::Sink;
use crate::reducer::{Reduced, Reducer};

/// One evaluated time point.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub t: f64,
    pub alpha_populations: Vec<f64>,
    pub beta_populations: Vec<f64>,
    pub alpha_coherence: f64,
    pub beta_coherence: f64,
    pub reconstruction_error: Option<f64>,
    pub verdict: Option<Verdict>,
    pub iterations: usize,
}

impl Row {
    fn new(t: f64, reduced: &Reduced) -> Self {
        let r = reduced.result();
        let beta = r.rho_beta.as_ref();
        let (verdict, iterations) = match reduced {
            Reduced::Single(_) => (None, 0),
            Reduced::Iterated(rep) => (Some(rep.verdict), rep.iterations),
        };
        Row {
            t,
            alpha_populations: r.rho_alpha.populations(),
            beta_populations: beta.map(DensityMatrix::populations).unwrap_or_default(),
            alpha_coherence: r.rho_alpha.max_coherence(),
            beta_coherence: beta.map(DensityMatrix::max_coherence).unwrap_or(f64::NAN),
            reconstruction_error: r.reconstruction_error,
            verdict,
            iterations,
        }
    }
}

/// Produces the composite state at time `t`.
enum Source {
    Static(DensityMatrix),
    Spin(corred_core::models::SpinPairParams, f64),
    Jcm(corred_core::JcmParams),
    Evolved(DensityMatrix, ComplexMatrix),
}

impl Source {
    fn build(exp: &Experiment) -> Result<(Self, BipartiteSystem)> {
        Ok(match exp {
            Experiment::Epr => (Source::Static(epr_state()), BipartiteSystem::qubit_pair()),
            Experiment::SpinPair(s) => (Source::Spin(s.model, s.phi), BipartiteSystem::qubit_pair()),
            Experiment::JcmVacuum(p) => (Source::Jcm(*p), p.labeling()?.system()),
            Experiment::Custom(c) => {
                let sys = BipartiteSystem::new(c.dims[0], c.dims[1])?;
                let rho: DensityMatrix = read_json(&c.state)?;
                if rho.dim() != sys.composite_dim() {
                    return Err(CliError::Config(format!(
                        "{}: dimension {} does not match dims {:?}",
                        c.state.display(),
                        rho.dim(),
                        c.dims
                    )));
                }
                let src = match &c.hamiltonian {
                    None => Source::Static(rho),
                    Some(path) => {
                        let h: ComplexMatrix = read_json(path)?;
                        if h.rows() != rho.dim() || h.cols() != rho.dim() {
                            return Err(CliError::Config(format!(
                                "{}: hamiltonian is {}x{}, state is {}x{}",
                                path.display(),
                                h.rows(),
                                h.cols(),
                                rho.dim(),
                                rho.dim()
                            )));
                        }
                        Source::Evolved(rho, h)
                    }
                };
                (src, sys)
            }
        })
    }

    fn at(&self, t: f64) -> Result<DensityMatrix> {
        Ok(match self {
            Source::Static(rho) => rho.clone(),
            Source::Spin(p, phi) => spin_pair_density(p, *phi, t),
            Source::Jcm(p) => jcm_vacuum_density(p, t)?,
            Source::Evolved(rho0, h) => {
                let u = evolve_operator(h, t, 1.0)?;
                DensityMatrix::normalized(&u.sandwich(rho0.matrix())?, Validation::Relaxed)?
            }
        })
    }
}

pub fn evaluate(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let (source, sys) = Source::build(&cfg.experiment)?;
    let reducer = Reducer::new(&cfg.reduction, &sys)?;
    let times = cfg.time_grid.points();
    info!("evaluating {} time points", times.len());
    times.into_par_iter().map(|t| Ok(Row::new(t, &reducer.reduce(&source.at(t)?, &sys)?))).collect()
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(out: &mut dyn Write, cfg: &ExperimentConfig, rows: &[Row]) -> std::io::Result<()> {
    let cfg_json = serde_json::to_string(cfg).expect("config serializes");
    writeln!(out, "# config: {cfg_json}")?;
    let (na, nb) = rows.first().map(|r| (r.alpha_populations.len(), r.beta_populations.len())).unwrap_or((0, 0));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..na).map(|k| format!("alpha_{k}")));
    header.extend((0..nb).map(|k| format!("beta_{k}")));
    header.extend(
        ["alpha_coherence", "beta_coherence", "reconstruction_error", "verdict", "iterations"].map(String::from),
    );
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![num(r.t)];
        rec.extend(r.alpha_populations.iter().map(|&x| num(x)));
        rec.extend(r.beta_populations.iter().map(|&x| num(x)));
        rec.push(num(r.alpha_coherence));
        rec.push(num(r.beta_coherence));
        rec.push(r.reconstruction_error.map(num).unwrap_or_default());
        rec.push(r.verdict.map(|v| v.as_str().to_string()).unwrap_or_default());
        rec.push(r.iterations.to_string());
        w.write_record(&rec)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    config: &'a ExperimentConfig,
    rows: &'a [Row],
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<()> {
    let rows = evaluate(cfg)?;
    let sink = Sink::new(cfg.output.path.clone());
    match cfg.output.format {
        OutputFormat::Csv => sink.write_with(|w| write_csv(w, cfg, &rows)),
        OutputFormat::Json => sink.write_json(&JsonOutput { config: cfg, rows: &rows }),
    }
}
