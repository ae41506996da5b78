//! Weighted sums of product terms that assemble a bipartite state.
//!
//! Terms are unit-trace hermitian matrices but need not be positive: the
//! four-term decompositions of the two-qubit singlet and triplet carry
//! off-diagonal entries of magnitude `1/√2` on pure diagonals.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg::{kron, BipartiteSystem, ComplexMatrix, MatrixWire, Side};
use crate::states::DensityMatrix;

const WEIGHT_TOL: f64 = 1e-12;

/// Below this `|cos 2φ|` the spin-pair decompositions delegate to the
/// singlet or triplet ensemble.
pub const BALANCED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTerm {
    pub weight: f64,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    terms: Vec<EnsembleTerm>,
    system: BipartiteSystem,
    label: String,
}

impl Ensemble {
    /// Checks shapes, weights (nonnegative, summing to 1) and unit traces.
    pub fn new(terms: Vec<EnsembleTerm>, system: BipartiteSystem, label: impl Into<String>) -> Result<Self> {
        if terms.is_empty() {
            return Err(CoreError::InvalidEnsemble("no terms".into()));
        }
        let mut total = 0.0;
        for (n, t) in terms.iter().enumerate() {
            system.check_local(&t.left, Side::Alpha)?;
            system.check_local(&t.right, Side::Beta)?;
            if t.weight.is_nan() || t.weight < 0.0 {
                return Err(CoreError::InvalidEnsemble(format!("term {n}: weight {} is negative", t.weight)));
            }
            for (name, m) in [("left", &t.left), ("right", &t.right)] {
                let tr = m.trace();
                if (tr - C64::new(1.0, 0.0)).norm() > WEIGHT_TOL {
                    return Err(CoreError::InvalidEnsemble(format!("term {n}: {name} trace {tr}")));
                }
            }
            total += t.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(CoreError::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { terms, system, label: label.into() })
    }

    pub fn terms(&self) -> &[EnsembleTerm] {
        &self.terms
    }

    pub fn system(&self) -> BipartiteSystem {
        self.system
    }

    /// Which construction (or branch of it) produced the ensemble.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Weighted average of `f(left_diag, right_diag)` over the terms, where
    /// the arguments are the real diagonal entries at `level` of each factor.
    pub fn diagonal_average(&self, level: usize, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
        let (na, nb) = (self.system.dim_alpha(), self.system.dim_beta());
        if level >= na.min(nb) {
            return Err(CoreError::IndexOutOfRange { index: level, dim: na.min(nb) });
        }
        Ok(self.terms.iter().map(|t| t.weight * f(t.left[(level, level)].re, t.right[(level, level)].re)).sum())
    }
}

/// `Σ p_i left_i ⊗ right_i`.
pub fn assemble(e: &Ensemble) -> ComplexMatrix {
    let n = e.system.composite_dim();
    e.terms.iter().fold(ComplexMatrix::zeros(n, n), |acc, t| &acc + &kron(&t.left, &t.right).scale_real(t.weight))
}

/// Two-level term with diagonal `(upper, 1 − upper)` and coherence
/// `e^{iθ}/√2` in the upper-right slot.
fn phased(upper: f64, theta: f64) -> ComplexMatrix {
    let z = C64::from_polar(FRAC_1_SQRT_2, theta);
    ComplexMatrix::from_rows(&[&[C64::new(upper, 0.0), z], &[z.conj(), C64::new(1.0 - upper, 0.0)]])
}

fn quarter_terms(pairs: [(f64, f64, f64, f64); 4]) -> Vec<EnsembleTerm> {
    pairs
        .iter()
        .map(|&(ua, pa, ub, pb)| EnsembleTerm { weight: 0.25, left: phased(ua, pa), right: phased(ub, pb) })
        .collect()
}

/// Four equiprobable product terms assembling the singlet `epr_state` for any `theta`.
pub fn epr_decomposition(theta: f64) -> Ensemble {
    let terms = quarter_terms([
        (1.0, theta, 0.0, theta + PI),
        (1.0, theta + PI, 0.0, theta),
        (0.0, theta + FRAC_PI_2, 1.0, theta + 3.0 * FRAC_PI_2),
        (0.0, theta + 3.0 * FRAC_PI_2, 1.0, theta + FRAC_PI_2),
    ]);
    Ensemble::new(terms, BipartiteSystem::qubit_pair(), "singlet").expect("weights and traces are exact")
}

/// Four equiprobable product terms assembling `triplet_state`; each term
/// carries the same phase on both sides.
pub fn triplet_decomposition(theta: f64) -> Ensemble {
    let terms = quarter_terms([
        (1.0, theta, 0.0, theta),
        (0.0, theta + FRAC_PI_2, 1.0, theta + FRAC_PI_2),
        (1.0, theta + PI, 0.0, theta + PI),
        (0.0, theta + 3.0 * FRAC_PI_2, 1.0, theta + 3.0 * FRAC_PI_2),
    ]);
    Ensemble::new(terms, BipartiteSystem::qubit_pair(), "triplet").expect("weights and traces are exact")
}

fn upper() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, 0.0])
}

fn lower() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[0.0, 1.0])
}

/// Two diagonal product terms; zero weights are dropped.
fn diagonal_pair(first: (f64, bool), second: (f64, bool), label: &str) -> Ensemble {
    // `true` is |21⟩ (α up, β down), `false` is |12⟩
    let term = |(w, up_down): (f64, bool)| EnsembleTerm {
        weight: w,
        left: if up_down { upper() } else { lower() },
        right: if up_down { lower() } else { upper() },
    };
    let mut terms: Vec<_> = [first, second].into_iter().filter(|(w, _)| *w > 0.0).map(term).collect();
    // both weights cannot vanish, but guard against rounding the survivor away from 1
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    for t in &mut terms {
        t.weight /= total;
    }
    Ensemble::new(terms, BipartiteSystem::qubit_pair(), label).expect("diagonal product terms are valid")
}

fn balanced(phi: f64, theta: f64) -> Option<Ensemble> {
    if (2.0 * phi).cos().abs() >= BALANCED_TOL {
        return None;
    }
    Some(if (2.0 * phi).sin() > 0.0 { epr_decomposition(theta) } else { triplet_decomposition(theta) })
}

/// Product-term approximation of `spin_pair_initial(phi)`, branch by `|tan φ|`.
///
/// The unbalanced branches reproduce the printed assignment, which places
/// `cos²φ` on `|12⟩` when `|tan φ| < 1`; the initial state has `sin²φ` there,
/// so [`verify_ensemble`] reports the mismatch.
pub fn spin_pair_initial_decomposition(phi: f64, theta: f64) -> Ensemble {
    if let Some(e) = balanced(phi, theta) {
        return e;
    }
    let (c2, s2) = (phi.cos().powi(2), phi.sin().powi(2));
    if (2.0 * phi).cos() < 0.0 {
        diagonal_pair((c2, true), (s2, false), "|tan phi| > 1")
    } else {
        diagonal_pair((c2, false), (s2, true), "|tan phi| < 1")
    }
}

/// Two-term diagonal ensemble matching the populations of the evolved spin
/// pair: weight `(1 + C)/2` on `|21⟩` and `(1 − C)/2` on `|12⟩`, with
/// `C = cos 2φ · cos 2ct`. The sign of `C` selects which term leads.
pub fn spin_pair_reduced_decomposition(phi: f64, c: f64, t: f64, theta: f64) -> Result<Ensemble> {
    if let Some(e) = balanced(phi, theta) {
        return Ok(e);
    }
    let cc = (2.0 * phi).cos() * (2.0 * c * t).cos();
    if cc.abs() < BALANCED_TOL {
        return Err(CoreError::TieUndefined(cc));
    }
    let (p, m) = ((1.0 + cc) / 2.0, (1.0 - cc) / 2.0);
    Ok(if cc > 0.0 {
        diagonal_pair((p, true), (m, false), "C > 0")
    } else {
        diagonal_pair((m, false), (p, true), "C < 0")
    })
}

/// Elementwise comparison of an assembled ensemble with a target state.
///
/// Entries `ρ[(i,k),(j,l)]` are grouped as diagonal (`i = j`, `k = l`),
/// off-diagonal (`i ≠ j`, `k ≠ l`) and cross (exactly one side off-diagonal).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub label: String,
    pub max_error: f64,
    pub diagonal_error: f64,
    pub off_diagonal_error: f64,
    pub cross_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn verify_ensemble(e: &Ensemble, target: &DensityMatrix, tol: f64) -> Result<VerificationReport> {
    let sys = e.system;
    sys.check_composite(target.matrix())?;
    let assembled = assemble(e);
    let n = sys.composite_dim();
    let (mut diag, mut off, mut cross) = (0.0f64, 0.0f64, 0.0f64);
    for r in 0..n {
        for c in 0..n {
            let err = (assembled[(r, c)] - target.matrix()[(r, c)]).norm();
            let ((i, k), (j, l)) = (sys.split(r), sys.split(c));
            let slot = match (i == j, k == l) {
                (true, true) => &mut diag,
                (false, false) => &mut off,
                _ => &mut cross,
            };
            *slot = slot.max(err);
        }
    }
    let max_error = diag.max(off).max(cross);
    Ok(VerificationReport {
        label: e.label.clone(),
        max_error,
        diagonal_error: diag,
        off_diagonal_error: off,
        cross_error: cross,
        tolerance: tol,
        passed: max_error < tol,
    })
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    p: f64,
    left: MatrixWire,
    right: MatrixWire,
}

#[derive(Serialize, Deserialize)]
struct EnsembleWire {
    #[serde(default)]
    label: String,
    terms: Vec<TermWire>,
    dims: [usize; 2],
}

impl Serialize for Ensemble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnsembleWire {
            label: self.label.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermWire { p: t.weight, left: (&t.left).into(), right: (&t.right).into() })
                .collect(),
            dims: [self.system.dim_alpha(), self.system.dim_beta()],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let w = EnsembleWire::deserialize(d)?;
        let sys = BipartiteSystem::new(w.dims[0], w.dims[1]).map_err(D::Error::custom)?;
        let terms = w
            .terms
            .into_iter()
            .map(|t| {
                Ok(EnsembleTerm {
                    weight: t.p,
                    left: t.left.try_into().map_err(D::Error::custom)?,
                    right: t.right.try_into().map_err(D::Error::custom)?,
                })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ensemble::new(terms, sys, w.label).map_err(D::Error::custom)
    }
}
