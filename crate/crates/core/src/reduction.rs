//! Reduction of a bipartite state to its subsystems.
//!
//! Every reduction here is an instance of the conditioned reduction
//!
//! ```text
//! ρ_α = Sp_β[ρ (1 ⊗ σ_β)] / Sp_αβ[ρ (1 ⊗ σ_β)]
//! ```
//!
//! for some assumed state `σ_β` of the unobserved side: the maximally mixed
//! state gives the partial trace, a basis projector gives the projective
//! (nondemolition) reduction, and the self-consistent pair solving both
//! directions at once gives the correlated reduction.

use log::debug;
use num_complex::Complex64 as C64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CoreError, Result};
use crate::linalg::{kron, partial_trace, BipartiteSystem, ComplexMatrix, Side};
use crate::states::{
    minimum_information_state, projector_state, state_from_observable, DensityMatrix, Observable, Validation,
};

/// Overlaps below this are treated as an orthogonal conditioning state.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Overlaps below this are reported as near-degenerate.
pub const NEAR_DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Neumann means below this make the factorized correlator forms unavailable.
pub const ZERO_MEAN_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Neumann,
    Conditioned,
    Projective,
    Correlated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionResult {
    pub rho_alpha: DensityMatrix,
    pub rho_beta: Option<DensityMatrix>,
    pub method: Method,
    /// `max |ρ − ρ_α ⊗ ρ_β|`, present when both sides are.
    pub reconstruction_error: Option<f64>,
}

impl ReductionResult {
    fn paired(rho: &DensityMatrix, alpha: DensityMatrix, beta: DensityMatrix, method: Method) -> Result<Self> {
        let err = reconstruction_error(rho.matrix(), alpha.matrix(), beta.matrix())?;
        Ok(Self { rho_alpha: alpha, rho_beta: Some(beta), method, reconstruction_error: Some(err) })
    }
}

/// `max |ρ − a ⊗ b|`.
pub fn reconstruction_error(rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    rho.max_abs_diff(&kron(a, b))
}

/// Von Neumann reduction: both partial traces.
pub fn neumann_reduce(rho: &DensityMatrix, sys: &BipartiteSystem) -> Result<ReductionResult> {
    let alpha = DensityMatrix::new(partial_trace(rho.matrix(), sys, Side::Beta)?, Validation::Relaxed)?;
    let beta = DensityMatrix::new(partial_trace(rho.matrix(), sys, Side::Alpha)?, Validation::Relaxed)?;
    ReductionResult::paired(rho, alpha, beta, Method::Neumann)
}

/// The composite operator the partial trace implicitly substitutes for `ρ`:
/// the reduced state of `observed` times the maximally mixed state of the
/// other side.
pub fn replacement_operator(rho: &DensityMatrix, sys: &BipartiteSystem, observed: Side) -> Result<ComplexMatrix> {
    let other = minimum_information_state(sys.dim(observed.other()));
    replacement_operator_with(rho, sys, observed, &other)
}

/// As [`replacement_operator`] with an explicit state of the unobserved side,
/// e.g. a thermal state.
pub fn replacement_operator_with(
    rho: &DensityMatrix,
    sys: &BipartiteSystem,
    observed: Side,
    unobserved: &DensityMatrix,
) -> Result<ComplexMatrix> {
    sys.check_local(unobserved.matrix(), observed.other())?;
    let reduced = partial_trace(rho.matrix(), sys, observed.other())?;
    Ok(match observed {
        Side::Alpha => kron(&reduced, unobserved.matrix()),
        Side::Beta => kron(unobserved.matrix(), &reduced),
    })
}

/// Unnormalized `Sp_given[ρ · extend(σ)]`, contracted directly.
fn condition_raw(rho: &ComplexMatrix, sys: &BipartiteSystem, sigma: &ComplexMatrix, given: Side) -> ComplexMatrix {
    let (na, nb) = (sys.dim_alpha(), sys.dim_beta());
    match given {
        Side::Beta => ComplexMatrix::from_fn(na, na, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..nb {
                for l in 0..nb {
                    acc += rho[(sys.index(i, k), sys.index(j, l))] * sigma[(l, k)];
                }
            }
            acc
        }),
        Side::Alpha => ComplexMatrix::from_fn(nb, nb, |k, l| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..na {
                for j in 0..na {
                    acc += rho[(sys.index(i, k), sys.index(j, l))] * sigma[(j, i)];
                }
            }
            acc
        }),
    }
}

/// Normalized, hermitized conditioned reduction plus the overlap
/// `Sp_αβ[ρ · extend(σ)]`.
fn condition(
    rho: &ComplexMatrix,
    sys: &BipartiteSystem,
    sigma: &ComplexMatrix,
    given: Side,
) -> Result<(ComplexMatrix, f64)> {
    sys.check_composite(rho)?;
    sys.check_local(sigma, given)?;
    let raw = condition_raw(rho, sys, sigma, given).hermitize();
    let overlap = raw.trace().re;
    if overlap.abs() < DEGENERACY_THRESHOLD {
        return Err(CoreError::DegenerateOverlap { overlap });
    }
    Ok((raw.scale_real(1.0 / overlap), overlap))
}

/// Reduce to the side opposite `given_side`, assuming that side is in state `sigma`.
pub fn conditioned_reduce(
    rho: &DensityMatrix,
    sys: &BipartiteSystem,
    sigma: &DensityMatrix,
    given_side: Side,
) -> Result<DensityMatrix> {
    let (m, _) = condition(rho.matrix(), sys, sigma.matrix(), given_side)?;
    DensityMatrix::new(m, Validation::Relaxed)
}

/// Conditioned reduction with β projected onto basis level `level`.
pub fn projective_reduce(rho: &DensityMatrix, sys: &BipartiteSystem, level: usize) -> Result<ReductionResult> {
    let probe = projector_state(sys.dim_beta(), level)?;
    let alpha = conditioned_reduce(rho, sys, &probe, Side::Beta)?;
    ReductionResult::paired(rho, alpha, probe, Method::Projective)
}

/// Starting pair for the correlated iteration.
#[derive(Debug, Clone)]
pub enum Seed {
    /// Both partial traces.
    Neumann,
    /// Maximally mixed states on both sides.
    MinimumInformation,
    /// A previous reduction; a missing β side falls back to its partial trace.
    Result(ReductionResult),
}

/// Order of the two half-updates within one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateScheme {
    /// β from the current α, then α from the new β.
    #[default]
    GaussSeidel,
    /// Both sides from the previous pair.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub scheme: UpdateScheme,
}

impl Default for CorrelatedOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 10_000, scheme: UpdateScheme::GaussSeidel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    MaxIter,
    Oscillating,
    Degenerate,
}

impl Verdict {
    /// Same spelling as the JSON form.
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::MaxIter => "max_iter",
            Verdict::Oscillating => "oscillating",
            Verdict::Degenerate => "degenerate",
        }
    }
}

/// Trajectory and outcome of a correlated reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iterations: usize,
    pub verdict: Verdict,
    /// Max-abs change of the iterates on either side, one entry per sweep.
    pub residual_history: Vec<f64>,
    pub scheme: UpdateScheme,
    pub warnings: Vec<String>,
    pub result: ReductionResult,
}

impl IterationReport {
    pub fn rho_alpha(&self) -> &DensityMatrix {
        &self.result.rho_alpha
    }

    pub fn rho_beta(&self) -> &DensityMatrix {
        self.result.rho_beta.as_ref().expect("correlated reduction always has both sides")
    }

    pub fn reconstruction_error(&self) -> f64 {
        self.result.reconstruction_error.unwrap_or(f64::NAN)
    }

    /// Ratio of the last two residuals; close to 1 means slow convergence.
    pub fn contraction_ratio(&self) -> Option<f64> {
        match self.residual_history.as_slice() {
            [.., a, b] if *a > 0.0 => Some(b / a),
            _ => None,
        }
    }
}

impl Serialize for IterationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("IterationReport", 8)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("iterations", &self.iterations)?;
        st.serialize_field("residuals", &self.residual_history)?;
        st.serialize_field("rho_alpha", &self.result.rho_alpha)?;
        st.serialize_field("rho_beta", &self.result.rho_beta)?;
        st.serialize_field("reconstruction_error", &self.result.reconstruction_error)?;
        st.serialize_field("scheme", &self.scheme)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

/// Ratio above which a converged run is flagged as slow.
const SLOW_CONTRACTION: f64 = 0.9;

/// Self-consistent pair `(ρ_αC, ρ_βC)` by successive conditioned reductions.
///
/// A degenerate overlap on the first sweep is returned as an error; later
/// ones stop the iteration with [`Verdict::Degenerate`] and keep the last
/// pair of iterates.
pub fn correlated_reduce(
    rho: &DensityMatrix,
    sys: &BipartiteSystem,
    seed: &Seed,
    opts: &CorrelatedOptions,
) -> Result<IterationReport> {
    sys.check_composite(rho.matrix())?;
    let r = rho.matrix();
    let (mut alpha, mut beta) = match seed {
        Seed::Neumann => (partial_trace(r, sys, Side::Beta)?, partial_trace(r, sys, Side::Alpha)?),
        Seed::MinimumInformation => (
            minimum_information_state(sys.dim_alpha()).into_matrix(),
            minimum_information_state(sys.dim_beta()).into_matrix(),
        ),
        Seed::Result(res) => {
            let a = res.rho_alpha.matrix().clone();
            let b = match &res.rho_beta {
                Some(b) => b.matrix().clone(),
                None => partial_trace(r, sys, Side::Alpha)?,
            };
            sys.check_local(&a, Side::Alpha)?;
            sys.check_local(&b, Side::Beta)?;
            (a, b)
        }
    };

    let max_iter = opts.max_iter.max(1);
    let mut history: Vec<f64> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut previous: Option<(ComplexMatrix, ComplexMatrix)> = None;
    let mut verdict = Verdict::MaxIter;

    for n in 1..=max_iter {
        let sweep = match opts.scheme {
            UpdateScheme::GaussSeidel => condition(r, sys, &alpha, Side::Alpha).and_then(|(b, ob)| {
                condition(r, sys, &b, Side::Beta).map(|(a, oa)| (a, b, ob.min(oa)))
            }),
            UpdateScheme::Jacobi => condition(r, sys, &beta, Side::Beta).and_then(|(a, oa)| {
                condition(r, sys, &alpha, Side::Alpha).map(|(b, ob)| (a, b, oa.min(ob)))
            }),
        };
        let (new_alpha, new_beta, overlap) = match sweep {
            Ok(v) => v,
            Err(e @ CoreError::DegenerateOverlap { .. }) if n == 1 => return Err(e),
            Err(CoreError::DegenerateOverlap { overlap }) => {
                warnings.push(format!("degenerate overlap {overlap:e} at sweep {n}"));
                verdict = Verdict::Degenerate;
                break;
            }
            Err(e) => return Err(e),
        };
        if overlap.abs() < NEAR_DEGENERACY_THRESHOLD && !warnings.iter().any(|w| w.starts_with("near-degenerate")) {
            warnings.push(format!("near-degenerate overlap {overlap:e} at sweep {n}"));
        }

        let residual = new_alpha.max_abs_diff(&alpha)?.max(new_beta.max_abs_diff(&beta)?);
        history.push(residual);

        let cycling = match &previous {
            Some((pa, pb)) if history.len() >= 2 => {
                let stagnant = (history[history.len() - 2] - residual).abs() < opts.tol.max(1e-3 * residual);
                stagnant && new_alpha.max_abs_diff(pa)? < opts.tol && new_beta.max_abs_diff(pb)? < opts.tol
            }
            _ => false,
        };

        previous = Some((std::mem::replace(&mut alpha, new_alpha), std::mem::replace(&mut beta, new_beta)));

        if residual < opts.tol {
            verdict = Verdict::Converged;
            break;
        }
        if cycling {
            verdict = Verdict::Oscillating;
            break;
        }
    }

    let iterations = history.len();
    debug!("correlated reduction: {verdict:?} after {iterations} sweeps");
    let report_partial = IterationReport {
        iterations,
        verdict,
        residual_history: history,
        scheme: opts.scheme,
        warnings,
        result: ReductionResult::paired(
            rho,
            DensityMatrix::new(alpha, Validation::Relaxed)?,
            DensityMatrix::new(beta, Validation::Relaxed)?,
            Method::Correlated,
        )?,
    };
    let mut report = report_partial;
    if report.verdict == Verdict::Converged {
        if let Some(q) = report.contraction_ratio() {
            if q > SLOW_CONTRACTION {
                report.warnings.push(format!("slow convergence: contraction ratio {q:.6} over {iterations} sweeps"));
            }
        }
    }
    Ok(report)
}

/// `Tr(ρ A)`; real within roundoff for hermitian `A`.
pub fn mean_value(rho_sub: &DensityMatrix, a: &Observable) -> Result<C64> {
    a.matrix().check_square(rho_sub.dim())?;
    let (r, m) = (rho_sub.matrix(), a.matrix());
    let n = rho_sub.dim();
    Ok((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| r[(i, j)] * m[(j, i)]).sum())
}

/// Exact correlator `Sp_αβ ρ (A ⊗ B)` and its two factorized forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorBreakdown {
    pub exact: f64,
    pub mean_a_neumann: f64,
    pub mean_b_neumann: f64,
    /// `⟨A⟩` with β conditioned on `B / Tr B`.
    pub mean_a_given_b: f64,
    /// `⟨B⟩` with α conditioned on `A / Tr A`.
    pub mean_b_given_a: f64,
}

impl CorrelatorBreakdown {
    /// `⟨A⟩_B · ⟨B⟩_N`
    pub fn via_beta_state(&self) -> f64 {
        self.mean_a_given_b * self.mean_b_neumann
    }

    /// `⟨A⟩_N · ⟨B⟩_A`
    pub fn via_alpha_state(&self) -> f64 {
        self.mean_a_neumann * self.mean_b_given_a
    }

    pub fn max_discrepancy(&self) -> f64 {
        (self.exact - self.via_beta_state()).abs().max((self.exact - self.via_alpha_state()).abs())
    }
}

pub fn correlator(rho: &DensityMatrix, sys: &BipartiteSystem, a: &Observable, b: &Observable) -> Result<CorrelatorBreakdown> {
    sys.check_composite(rho.matrix())?;
    sys.check_local(a.matrix(), Side::Alpha)?;
    sys.check_local(b.matrix(), Side::Beta)?;
    let ab = kron(a.matrix(), b.matrix());
    let exact = rho.matrix().matmul(&ab)?.trace().re;

    let neumann = neumann_reduce(rho, sys)?;
    let mean_a_neumann = mean_value(&neumann.rho_alpha, a)?.re;
    let mean_b_neumann = mean_value(neumann.rho_beta.as_ref().expect("paired"), b)?.re;
    if mean_a_neumann.abs() < ZERO_MEAN_THRESHOLD || mean_b_neumann.abs() < ZERO_MEAN_THRESHOLD {
        return Err(CoreError::ZeroNeumannMean { exact });
    }

    let state_b = state_from_observable(b)?;
    let state_a = state_from_observable(a)?;
    let alpha_given_b = conditioned_reduce(rho, sys, &state_b, Side::Beta)?;
    let beta_given_a = conditioned_reduce(rho, sys, &state_a, Side::Alpha)?;

    Ok(CorrelatorBreakdown {
        exact,
        mean_a_neumann,
        mean_b_neumann,
        mean_a_given_b: mean_value(&alpha_given_b, a)?.re,
        mean_b_given_a: mean_value(&beta_given_a, b)?.re,
    })
}

/// `(⟨A⟩_C, ⟨B⟩_C, ⟨A⟩_C·⟨B⟩_C)` from a converged correlated reduction.
pub fn correlated_mean_pair(report: &IterationReport, a: &Observable, b: &Observable) -> Result<(f64, f64, f64)> {
    if report.verdict != Verdict::Converged {
        return Err(CoreError::NotConverged(report.verdict));
    }
    let ma = mean_value(report.rho_alpha(), a)?.re;
    let mb = mean_value(report.rho_beta(), b)?.re;
    Ok((ma, mb, ma * mb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::extend;
    use crate::states::epr_state;

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(v)
    }

    fn state(m: ComplexMatrix) -> DensityMatrix {
        DensityMatrix::new(m, Validation::Strict).unwrap()
    }

    fn mixed_qubit(p: f64, re: f64, im: f64) -> DensityMatrix {
        state(ComplexMatrix::from_rows(&[
            &[C64::new(p, 0.0), C64::new(re, im)],
            &[C64::new(re, -im), C64::new(1.0 - p, 0.0)],
        ]))
    }

    fn product(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
        state(kron(a.matrix(), b.matrix()))
    }

    #[test]
    fn raw_contraction_matches_literal_partial_trace() {
        // oracle: Sp_given(ρ · extend(σ)) through explicit matrices
        let sys = BipartiteSystem::new(2, 3).unwrap();
        let rho = ComplexMatrix::from_fn(6, 6, |i, j| C64::new((i * 7 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.3));
        let sb = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(1.0 + (i + 2 * j) as f64, 0.5 * i as f64));
        let sa = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(0.3 + (3 * i + j) as f64, -0.2 * j as f64));
        let lit_a = partial_trace(&rho.matmul(&extend(&sb, &sys, Side::Beta).unwrap()).unwrap(), &sys, Side::Beta).unwrap();
        let lit_b = partial_trace(&rho.matmul(&extend(&sa, &sys, Side::Alpha).unwrap()).unwrap(), &sys, Side::Alpha).unwrap();
        assert!(condition_raw(&rho, &sys, &sb, Side::Beta).approx_eq(&lit_a, 1e-12));
        assert!(condition_raw(&rho, &sys, &sa, Side::Alpha).approx_eq(&lit_b, 1e-12));
    }

    #[test]
    fn neumann_on_product_and_epr() {
        let sys = BipartiteSystem::qubit_pair();
        let (a, b) = (mixed_qubit(0.3, 0.1, 0.2), mixed_qubit(0.8, -0.05, 0.0));
        let r = neumann_reduce(&product(&a, &b), &sys).unwrap();
        assert!(r.rho_alpha.matrix().approx_eq(a.matrix(), 1e-15));
        assert!(r.rho_beta.as_ref().unwrap().matrix().approx_eq(b.matrix(), 1e-15));
        assert!(r.reconstruction_error.unwrap() < 1e-12);

        let e = neumann_reduce(&epr_state(), &sys).unwrap();
        let half = diag(&[0.5, 0.5]);
        assert!(e.rho_alpha.matrix().approx_eq(&half, 1e-15));
        assert!(e.rho_beta.unwrap().matrix().approx_eq(&half, 1e-15));
        // |−½ − 0| on the coherence dominates |½ − ¼| on the diagonal
        assert!((e.reconstruction_error.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn replacement_operators() {
        let sys = BipartiteSystem::qubit_pair();
        let rr = replacement_operator(&epr_state(), &sys, Side::Alpha).unwrap();
        assert!(rr.approx_eq(&ComplexMatrix::identity(4).scale_real(0.25), 1e-15));

        let a = mixed_qubit(0.3, 0.1, 0.2);
        let prod = product(&a, &minimum_information_state(2));
        let fixed = replacement_operator(&prod, &sys, Side::Alpha).unwrap();
        assert!(fixed.approx_eq(prod.matrix(), 1e-15));

        // printed block pattern: ½ [[a, 0, b, 0], [0, a, 0, b], [c, 0, d, 0], [0, c, 0, d]]
        let rho = state(
            ComplexMatrix::from_fn(4, 4, |i, j| {
                if i == j {
                    C64::new([0.1, 0.2, 0.3, 0.4][i], 0.0)
                } else {
                    C64::new(0.01 * (i + j) as f64, 0.005 * (j as f64 - i as f64))
                }
            })
            .hermitize(),
        );
        let m = rho.matrix();
        let r = replacement_operator(&rho, &sys, Side::Alpha).unwrap();
        let aa = m[(0, 0)] + m[(1, 1)];
        let ab = m[(0, 2)] + m[(1, 3)];
        let ba = m[(2, 0)] + m[(3, 1)];
        let bb = m[(2, 2)] + m[(3, 3)];
        let z = C64::new(0.0, 0.0);
        let printed = ComplexMatrix::from_rows(&[&[aa, z, ab, z], &[z, aa, z, ab], &[ba, z, bb, z], &[z, ba, z, bb]])
            .scale_real(0.5);
        assert!(r.approx_eq(&printed, 1e-15));
        let rb = replacement_operator(&rho, &sys, Side::Beta).unwrap();
        let c11 = m[(0, 0)] + m[(2, 2)];
        let c12 = m[(0, 1)] + m[(2, 3)];
        let c21 = m[(1, 0)] + m[(3, 2)];
        let c22 = m[(1, 1)] + m[(3, 3)];
        let printed_b =
            ComplexMatrix::from_rows(&[&[c11, c12, z, z], &[c21, c22, z, z], &[z, z, c11, c12], &[z, z, c21, c22]])
                .scale_real(0.5);
        assert!(rb.approx_eq(&printed_b, 1e-15));
    }

    #[test]
    fn conditioned_cases() {
        let sys = BipartiteSystem::qubit_pair();
        let epr = epr_state();
        let mi = conditioned_reduce(&epr, &sys, &minimum_information_state(2), Side::Beta).unwrap();
        assert!(mi.matrix().approx_eq(&diag(&[0.5, 0.5]), 1e-15));

        let lower = projector_state(2, 1).unwrap();
        let up = conditioned_reduce(&epr, &sys, &lower, Side::Beta).unwrap();
        assert!(up.matrix().approx_eq(&diag(&[1.0, 0.0]), 1e-15));

        let (a, b) = (mixed_qubit(0.3, 0.1, 0.2), mixed_qubit(0.8, -0.05, 0.0));
        let sigma = mixed_qubit(0.6, 0.2, -0.1);
        let got = conditioned_reduce(&product(&a, &b), &sys, &sigma, Side::Beta).unwrap();
        assert!(got.matrix().approx_eq(a.matrix(), 1e-14));
        let got_b = conditioned_reduce(&product(&a, &b), &sys, &sigma, Side::Alpha).unwrap();
        assert!(got_b.matrix().approx_eq(b.matrix(), 1e-14));
    }

    #[test]
    fn conditioned_errors() {
        let sys = BipartiteSystem::qubit_pair();
        // |21⟩⟨21| conditioned on β = |2⟩ has no weight
        let rho = state(diag(&[0.0, 1.0, 0.0, 0.0]));
        let upper = projector_state(2, 0).unwrap();
        assert!(matches!(
            conditioned_reduce(&rho, &sys, &upper, Side::Beta),
            Err(CoreError::DegenerateOverlap { .. })
        ));
        let wrong = minimum_information_state(3);
        assert!(matches!(
            conditioned_reduce(&rho, &sys, &wrong, Side::Beta),
            Err(CoreError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projective_epr() {
        let sys = BipartiteSystem::qubit_pair();
        let r = projective_reduce(&epr_state(), &sys, 1).unwrap();
        assert_eq!(r.method, Method::Projective);
        assert!(r.rho_alpha.matrix().approx_eq(&diag(&[1.0, 0.0]), 1e-15));
        assert!(r.rho_beta.unwrap().matrix().approx_eq(&diag(&[0.0, 1.0]), 1e-15));
        assert!(projective_reduce(&epr_state(), &sys, 2).is_err());
    }

    #[test]
    fn correlated_product_fixed_point() {
        let sys = BipartiteSystem::qubit_pair();
        let (a, b) = (mixed_qubit(0.3, 0.1, 0.2), mixed_qubit(0.8, -0.05, 0.0));
        let rep = correlated_reduce(&product(&a, &b), &sys, &Seed::Neumann, &CorrelatedOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.residual_history.len(), rep.iterations);
        assert!(rep.reconstruction_error() < 1e-12);
        assert!(rep.rho_alpha().matrix().approx_eq(a.matrix(), 1e-13));
    }

    #[test]
    fn correlated_epr_from_neumann_is_stationary() {
        let sys = BipartiteSystem::qubit_pair();
        let rep = correlated_reduce(&epr_state(), &sys, &Seed::Neumann, &CorrelatedOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converged);
        assert!(rep.rho_alpha().matrix().approx_eq(&diag(&[0.5, 0.5]), 1e-15));
        assert!(rep.rho_beta().matrix().approx_eq(&diag(&[0.5, 0.5]), 1e-15));
    }

    #[test]
    fn correlated_epr_arbitrary_seed_gives_mirror_relations() {
        // From any α seed the first β half-step yields β11 = α22, β21 = −α21,
        // after which the pair no longer moves.
        let sys = BipartiteSystem::qubit_pair();
        let seed_a = mixed_qubit(0.7, 0.1, -0.2);
        let seed = Seed::Result(ReductionResult {
            rho_alpha: seed_a.clone(),
            rho_beta: Some(minimum_information_state(2)),
            method: Method::Neumann,
            reconstruction_error: None,
        });
        let rep = correlated_reduce(&epr_state(), &sys, &seed, &CorrelatedOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Converged);
        assert!(rep.iterations <= 2);
        let (a, b) = (rep.rho_alpha().matrix(), rep.rho_beta().matrix());
        assert!(a.approx_eq(seed_a.matrix(), 1e-14));
        assert!((b[(1, 1)] - a[(0, 0)]).norm() < 1e-14);
        assert!((b[(1, 0)] + a[(1, 0)]).norm() < 1e-14);
    }

    #[test]
    fn jacobi_detects_two_cycle() {
        let sys = BipartiteSystem::qubit_pair();
        let up = projector_state(2, 0).unwrap();
        let seed = Seed::Result(ReductionResult {
            rho_alpha: up.clone(),
            rho_beta: Some(up),
            method: Method::Projective,
            reconstruction_error: None,
        });
        let opts = CorrelatedOptions { scheme: UpdateScheme::Jacobi, ..Default::default() };
        let rep = correlated_reduce(&epr_state(), &sys, &seed, &opts).unwrap();
        assert_eq!(rep.verdict, Verdict::Oscillating);
        assert!(rep.iterations < 5);

        let gs = correlated_reduce(&epr_state(), &sys, &seed, &CorrelatedOptions::default()).unwrap();
        assert_eq!(gs.verdict, Verdict::Converged);
    }

    #[test]
    fn max_iter_verdict() {
        // slow geometric approach to a product of projectors
        let sys = BipartiteSystem::qubit_pair();
        let rho = state(ComplexMatrix::from_real_rows(&[
            &[0.55, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.45],
        ]));
        let opts = CorrelatedOptions { max_iter: 3, ..Default::default() };
        let rep = correlated_reduce(&rho, &sys, &Seed::Neumann, &opts).unwrap();
        assert_eq!(rep.verdict, Verdict::MaxIter);
        assert_eq!(rep.iterations, 3);
        assert_eq!(rep.residual_history.len(), 3);
        let err = correlated_mean_pair(&rep, &Observable::new(diag(&[1.0, 0.0]), "a").unwrap(), &Observable::new(diag(&[1.0, 0.0]), "b").unwrap());
        assert!(matches!(err, Err(CoreError::NotConverged(Verdict::MaxIter))));
    }

    #[test]
    fn degenerate_seed_is_an_error() {
        let sys = BipartiteSystem::qubit_pair();
        let rho = state(diag(&[0.0, 1.0, 0.0, 0.0]));
        // α seed |1⟩ has no overlap with |21⟩
        let seed = Seed::Result(ReductionResult {
            rho_alpha: projector_state(2, 1).unwrap(),
            rho_beta: None,
            method: Method::Projective,
            reconstruction_error: None,
        });
        let res = correlated_reduce(&rho, &sys, &seed, &CorrelatedOptions::default());
        assert!(matches!(res, Err(CoreError::DegenerateOverlap { .. })));
    }

    #[test]
    fn means() {
        let sz = Observable::new(diag(&[1.0, -1.0]), "sz").unwrap();
        assert!(mean_value(&minimum_information_state(2), &sz).unwrap().norm() < 1e-15);
        assert_eq!(mean_value(&projector_state(2, 0).unwrap(), &sz).unwrap().re, 1.0);
        assert!(mean_value(&minimum_information_state(3), &sz).is_err());
    }

    #[test]
    fn correlator_cases() {
        let sys = BipartiteSystem::qubit_pair();
        let up = Observable::new(diag(&[1.0, 0.0]), "up").unwrap();
        let one = Observable::new(ComplexMatrix::identity(2), "1").unwrap();

        let bd = correlator(&epr_state(), &sys, &up, &up).unwrap();
        assert!(bd.exact.abs() < 1e-15);
        assert!(bd.max_discrepancy() < 1e-12);

        let rho = product(&mixed_qubit(0.3, 0.1, 0.2), &mixed_qubit(0.8, -0.05, 0.0));
        let bd = correlator(&rho, &sys, &up, &one).unwrap();
        assert!((bd.mean_a_given_b - bd.mean_a_neumann).abs() < 1e-14);
        assert!((bd.exact - bd.mean_a_neumann).abs() < 1e-14);
        assert!((bd.exact - 0.3 * 1.0).abs() < 1e-14);

        let lower = Observable::new(diag(&[0.0, 1.0]), "down").unwrap();
        let pure = state(diag(&[1.0, 0.0, 0.0, 0.0]));
        assert!(matches!(correlator(&pure, &sys, &lower, &up), Err(CoreError::ZeroNeumannMean { exact }) if exact == 0.0));
        let neg = Observable::new(diag(&[1.0, -1.0]), "sz").unwrap();
        assert!(matches!(correlator(&rho, &sys, &neg, &up), Err(CoreError::NotNonnegative { .. })));
    }

    #[test]
    fn correlated_means_epr_gap() {
        let sys = BipartiteSystem::qubit_pair();
        let up = Observable::new(diag(&[1.0, 0.0]), "up").unwrap();
        let rep = correlated_reduce(&epr_state(), &sys, &Seed::Neumann, &CorrelatedOptions::default()).unwrap();
        let (ma, mb, prod) = correlated_mean_pair(&rep, &up, &up).unwrap();
        assert!((ma - 0.5).abs() < 1e-15 && (mb - 0.5).abs() < 1e-15);
        assert!((prod - 0.25).abs() < 1e-15);
        assert!(correlator(&epr_state(), &sys, &up, &up).unwrap().exact.abs() < 1e-15);
    }

    #[test]
    fn report_json_shape() {
        let sys = BipartiteSystem::qubit_pair();
        let rep = correlated_reduce(&epr_state(), &sys, &Seed::Neumann, &CorrelatedOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        for key in ["verdict", "iterations", "residuals", "rho_alpha", "rho_beta", "reconstruction_error"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["verdict"], "converged");
        assert_eq!(v["rho_alpha"]["rows"], 2);
    }
}
