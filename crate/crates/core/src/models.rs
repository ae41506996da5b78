//! Two dynamical models with closed-form propagators (ħ = 1):
//! a coupled pair of spins-½ and the resonant Jaynes-Cummings model.
//!
//! The spin-pair propagator uses the outer-block frequency
//! `Ω = √(ω² + d²)`, the eigenfrequency of the `{|22⟩, |11⟩}` block
//! about its mean energy `J`.
//!
//! The JCM field is truncated at `n_max` photons. Its local basis is
//! ordered by descending photon number, matching the descending-energy
//! convention of the atom, so local index `k` holds `n_max − k` photons.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg::{kron, BipartiteSystem, ComplexMatrix};
use crate::states::{spin_pair_initial, DensityMatrix, Validation};

/// Which of `U(t)` and `U†(t) = U(−t)` a propagator evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    Adjoint,
}

impl Direction {
    fn signed(self, t: f64) -> f64 {
        match self {
            Direction::Forward => t,
            Direction::Adjoint => -t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinPairParams {
    pub omega: f64,
    #[serde(default)]
    pub j_coupling: f64,
    #[serde(default)]
    pub c_coupling: f64,
    #[serde(default)]
    pub d_coupling: f64,
}

impl SpinPairParams {
    /// Outer-block frequency `√(ω² + d²)`.
    pub fn outer_frequency(&self) -> f64 {
        self.omega.hypot(self.d_coupling)
    }
}

/// Basis `|22⟩, |21⟩, |12⟩, |11⟩`.
pub fn spin_pair_hamiltonian(p: &SpinPairParams) -> ComplexMatrix {
    let SpinPairParams { omega: w, j_coupling: j, c_coupling: c, d_coupling: d } = *p;
    ComplexMatrix::from_real_rows(&[
        &[w + j, 0.0, 0.0, d],
        &[0.0, -j, c, 0.0],
        &[0.0, c, -j, 0.0],
        &[d, 0.0, 0.0, -w + j],
    ])
}

pub fn spin_pair_evolution(p: &SpinPairParams, t: f64) -> ComplexMatrix {
    spin_pair_propagator(p, t, Direction::Forward)
}

/// `exp(∓iHt)` in closed form.
pub fn spin_pair_propagator(p: &SpinPairParams, t: f64, dir: Direction) -> ComplexMatrix {
    let t = dir.signed(t);
    let SpinPairParams { omega: w, j_coupling: j, c_coupling: c, d_coupling: d } = *p;
    let big = p.outer_frequency();
    let (cos_o, sinc) = if big == 0.0 { (1.0, t) } else { ((big * t).cos(), (big * t).sin() / big) };
    let outer_phase = C64::from_polar(1.0, -j * t);
    let inner_phase = C64::from_polar(1.0, j * t);
    let i = C64::i();
    let z = C64::new(0.0, 0.0);

    let u00 = outer_phase * (cos_o - i * w * sinc);
    let u33 = outer_phase * (cos_o + i * w * sinc);
    let u03 = -i * d * sinc * outer_phase;
    let u11 = inner_phase * (c * t).cos();
    let u12 = -i * inner_phase * (c * t).sin();
    ComplexMatrix::from_rows(&[&[u00, z, z, u03], &[z, u11, u12, z], &[z, u12, u11, z], &[u03, z, z, u33]])
}

/// `U(t) ρ(0) U†(t)` starting from `spin_pair_initial(phi)`.
pub fn spin_pair_density(p: &SpinPairParams, phi: f64, t: f64) -> DensityMatrix {
    let rho0 = spin_pair_initial(phi);
    let u = spin_pair_evolution(p, t);
    let rho = u.sandwich(rho0.matrix()).expect("4x4 operands");
    DensityMatrix::normalized(&rho, Validation::Strict).expect("unitary evolution preserves a density matrix")
}

/// `cos 2φ · cos 2ct`: the population imbalance of the evolved spin pair.
pub fn spin_pair_imbalance(phi: f64, c: f64, t: f64) -> f64 {
    (2.0 * phi).cos() * (2.0 * c * t).cos()
}

fn default_n_max() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcmParams {
    pub omega: f64,
    pub rabi: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

impl JcmParams {
    pub fn labeling(&self) -> Result<CompositeLabeling> {
        CompositeLabeling::new(self.n_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomLevel {
    Upper,
    Lower,
}

impl AtomLevel {
    pub fn index(self) -> usize {
        match self {
            AtomLevel::Upper => 0,
            AtomLevel::Lower => 1,
        }
    }
}

/// Atom ⊗ truncated field, in the layout of [`BipartiteSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeLabeling {
    n_max: usize,
}

impl CompositeLabeling {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(CoreError::dims("n_max >= 1", "0"));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn system(&self) -> BipartiteSystem {
        BipartiteSystem::new(2, self.n_max + 1).expect("positive dimensions")
    }

    /// Local field index holding `photons` photons.
    pub fn field_index(&self, photons: usize) -> usize {
        debug_assert!(photons <= self.n_max);
        self.n_max - photons
    }

    /// Photon number at local field index `k`.
    pub fn photons(&self, k: usize) -> usize {
        self.n_max - k
    }

    pub fn index(&self, atom: AtomLevel, photons: usize) -> usize {
        self.system().index(atom.index(), self.field_index(photons))
    }

    fn field_diag(&self, f: impl Fn(usize) -> C64) -> ComplexMatrix {
        let d: Vec<C64> = (0..=self.n_max).map(|k| f(self.photons(k))).collect();
        ComplexMatrix::from_diag(&d)
    }

    /// Truncated lowering operator `a`.
    pub fn lowering(&self) -> ComplexMatrix {
        let n = self.n_max + 1;
        // a|m⟩ = √m |m−1⟩
        ComplexMatrix::from_fn(n, n, |r, c| {
            let (to, from) = (self.photons(r), self.photons(c));
            if from >= 1 && to == from - 1 {
                C64::new((from as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `(a†a + 1)^{-1/2} a`; a partial isometry on the truncated space.
    fn phase_down(&self) -> ComplexMatrix {
        self.field_diag(|m| C64::new(1.0 / ((m + 1) as f64).sqrt(), 0.0))
            .matmul(&self.lowering())
            .expect("square field operators")
    }
}

/// Atomic transition operator `|a⟩⟨b|`.
fn atom_op(a: AtomLevel, b: AtomLevel) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(a.index(), b.index())] = C64::new(1.0, 0.0);
    m
}

/// `(ω/2)(P22 − P11) + ω(a†a + ½) + (iΩ/2)(P21 a − P12 a†)` on the truncated space.
pub fn jcm_hamiltonian(p: &JcmParams) -> Result<ComplexMatrix> {
    let lab = p.labeling()?;
    let (up, lo) = (AtomLevel::Upper, AtomLevel::Lower);
    let atom = ComplexMatrix::from_real_diag(&[p.omega / 2.0, -p.omega / 2.0]);
    // symmetrized number term, exact on every level including the top one
    let field = lab.field_diag(|m| C64::new(p.omega * (m as f64 + 0.5), 0.0));
    let a = lab.lowering();
    let half_i_rabi = C64::new(0.0, p.rabi / 2.0);
    let coupling = &kron(&atom_op(up, lo), &a) - &kron(&atom_op(lo, up), &a.adjoint());
    let h = &(&kron(&atom, &ComplexMatrix::identity(lab.n_max + 1)) + &kron(&ComplexMatrix::identity(2), &field))
        + &coupling.scale(half_i_rabi);
    Ok(h)
}

pub fn jcm_evolution(p: &JcmParams, t: f64) -> Result<ComplexMatrix> {
    jcm_propagator(p, t, Direction::Forward)
}

/// Closed-form JCM propagator in the number basis.
///
/// Exact on every dressed pair `{|2,n⟩, |1,n+1⟩}` with `n < n_max` and on
/// `|1,0⟩`; the column of `|2,n_max⟩` loses the amplitude that would leave
/// the truncated space.
pub fn jcm_propagator(p: &JcmParams, t: f64, dir: Direction) -> Result<ComplexMatrix> {
    let lab = p.labeling()?;
    let t = dir.signed(t);
    let half = p.rabi * t / 2.0;
    let phase = |m: f64| C64::from_polar(1.0, -p.omega * t * m);
    let (up, lo) = (AtomLevel::Upper, AtomLevel::Lower);

    // field factors as functions of the photon number m, with a a† = m + 1
    let upper_diag = lab.field_diag(|m| phase((m + 1) as f64) * (half * ((m + 1) as f64).sqrt()).cos());
    let lower_diag = lab.field_diag(|m| phase(m as f64) * (half * (m as f64).sqrt()).cos());
    let raise_sin = lab.field_diag(|m| C64::new((half * (m as f64).sqrt()).sin(), 0.0));
    let lower_sin = lab.field_diag(|m| C64::new((half * ((m + 1) as f64).sqrt()).sin(), 0.0));
    let upper_phase = lab.field_diag(|m| phase((m + 1) as f64));
    let lower_phase = lab.field_diag(|m| phase(m as f64));

    let down = lab.phase_down();
    let up_shift = down.adjoint();
    let f21 = upper_phase.matmul(&down)?.matmul(&raise_sin)?;
    let f12 = lower_phase.matmul(&up_shift)?.matmul(&lower_sin)?;

    let u = &(&(&kron(&atom_op(up, up), &upper_diag) + &kron(&atom_op(lo, lo), &lower_diag))
        + &kron(&atom_op(up, lo), &f21))
        - &kron(&atom_op(lo, up), &f12);
    Ok(u)
}

/// `U(t) (P22 ⊗ |0⟩⟨0|) U†(t)`.
pub fn jcm_vacuum_density(p: &JcmParams, t: f64) -> Result<DensityMatrix> {
    let lab = p.labeling()?;
    let n = lab.system().composite_dim();
    let mut rho0 = ComplexMatrix::zeros(n, n);
    let start = lab.index(AtomLevel::Upper, 0);
    rho0[(start, start)] = C64::new(1.0, 0.0);
    let rho = jcm_evolution(p, t)?.sandwich(&rho0)?;
    DensityMatrix::normalized(&rho, Validation::Strict)
}

/// Tolerance on `cos Ωt` for the equal-weight case of the step limit.
pub const STEP_TIE_TOL: f64 = 1e-12;

/// Limit of the correlated iteration on the vacuum-Rabi state: the upper
/// atomic population and its complement. The population is 1 while
/// `cos²(Ωt/2) > sin²(Ωt/2)`, 0 while it is smaller, and ½ at equality.
pub fn jcm_correlated_limit(t: f64, p: &JcmParams) -> (f64, f64) {
    let balance = (p.rabi * t).cos();
    let upper = if balance.abs() < STEP_TIE_TOL {
        0.5
    } else if balance > 0.0 {
        1.0
    } else {
        0.0
    };
    (upper, 1.0 - upper)
}

/// Model parameter file contents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
pub enum ModelParams {
    SpinPair(SpinPairParams),
    Jcm(JcmParams),
}

impl ModelParams {
    pub fn hamiltonian(&self) -> Result<ComplexMatrix> {
        match self {
            ModelParams::SpinPair(p) => Ok(spin_pair_hamiltonian(p)),
            ModelParams::Jcm(p) => jcm_hamiltonian(p),
        }
    }

    pub fn system(&self) -> Result<BipartiteSystem> {
        match self {
            ModelParams::SpinPair(_) => Ok(BipartiteSystem::qubit_pair()),
            ModelParams::Jcm(p) => Ok(p.labeling()?.system()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{evolve_operator, hermitian_eig, partial_trace, spectral_norm, Side};
    use std::f64::consts::PI;

    const P: SpinPairParams = SpinPairParams { omega: 1.0, j_coupling: 0.1, c_coupling: 0.2, d_coupling: 0.3 };

    fn unitarity_error(u: &ComplexMatrix) -> f64 {
        let n = u.rows();
        u.matmul(&u.adjoint()).unwrap().max_abs_diff(&ComplexMatrix::identity(n)).unwrap()
    }

    #[test]
    fn spin_hamiltonian_uncoupled() {
        let h = spin_pair_hamiltonian(&SpinPairParams { omega: 1.0, j_coupling: 0.0, c_coupling: 0.0, d_coupling: 0.0 });
        assert_eq!(h, ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, -1.0]));
        let e = hermitian_eig(&h).unwrap().eigenvalues;
        assert_eq!(e, vec![-1.0, 0.0, 0.0, 1.0]);
        assert!(spin_pair_hamiltonian(&P).is_hermitian(0.0));
    }

    #[test]
    fn spin_propagator_matches_exponential() {
        let h = spin_pair_hamiltonian(&P);
        for t in [0.5, 2.0, 10.0] {
            let diff = &spin_pair_evolution(&P, t) - &evolve_operator(&h, t, 1.0).unwrap();
            assert!(spectral_norm(&diff) < 1e-9, "t={t}");
        }
        assert_eq!(spin_pair_evolution(&P, 0.0), ComplexMatrix::identity(4));
    }

    #[test]
    fn spin_adjoint_direction() {
        let u = spin_pair_evolution(&P, 1.3);
        let ud = spin_pair_propagator(&P, 1.3, Direction::Adjoint);
        assert!(ud.approx_eq(&u.adjoint(), 1e-14));
        assert!(unitarity_error(&u) < 1e-14);
    }

    #[test]
    fn spin_zero_outer_frequency_limit() {
        let p = SpinPairParams { omega: 0.0, j_coupling: 0.4, c_coupling: 0.5, d_coupling: 0.0 };
        let h = spin_pair_hamiltonian(&p);
        let diff = &spin_pair_evolution(&p, 1.7) - &evolve_operator(&h, 1.7, 1.0).unwrap();
        assert!(spectral_norm(&diff) < 1e-12);
    }

    #[test]
    fn spin_density_against_closed_form() {
        for &phi in &[0.0, 0.3, 1.0, 2.2] {
            for &t in &[0.0, 0.4, 3.3] {
                let r = spin_pair_density(&P, phi, t);
                let m = r.matrix();
                let c = P.c_coupling;
                let big_p = 1.0 + spin_pair_imbalance(phi, c, t);
                assert!((m[(1, 1)].re - big_p / 2.0).abs() < 1e-12);
                let coh = C64::new(-(2.0 * phi).sin(), (2.0 * phi).cos() * (2.0 * c * t).sin()) / 2.0;
                assert!((m[(1, 2)] - coh).norm() < 1e-12);
                assert!((r.purity() - 1.0).abs() < 1e-12);
            }
        }
        assert!(spin_pair_density(&P, 0.7, 0.0).matrix().approx_eq(spin_pair_initial(0.7).matrix(), 1e-15));
    }

    const J: JcmParams = JcmParams { omega: 1.0, rabi: 0.3, n_max: 16 };

    #[test]
    fn labeling_layout() {
        let lab = CompositeLabeling::new(3).unwrap();
        assert_eq!(lab.system().composite_dim(), 8);
        assert_eq!(lab.index(AtomLevel::Upper, 3), 0);
        assert_eq!(lab.index(AtomLevel::Upper, 0), 3);
        assert_eq!(lab.index(AtomLevel::Lower, 0), 7);
        assert!(CompositeLabeling::new(0).is_err());
        let a = lab.lowering();
        // a|2⟩ = √2|1⟩
        assert_eq!(a[(lab.field_index(1), lab.field_index(2))], C64::new(2f64.sqrt(), 0.0));
    }

    #[test]
    fn jcm_hamiltonian_structure() {
        let h = jcm_hamiltonian(&J).unwrap();
        assert!(h.is_hermitian(1e-12));
        let lab = J.labeling().unwrap();
        let (e, g) = (lab.index(AtomLevel::Upper, 0), lab.index(AtomLevel::Lower, 1));
        assert!((h[(e, g)].norm() - J.rabi / 2.0).abs() < 1e-15);
        // |1,0⟩ is uncoupled
        let ground = lab.index(AtomLevel::Lower, 0);
        for k in 0..h.rows() {
            if k != ground {
                assert_eq!(h[(k, ground)].norm(), 0.0);
            }
        }
    }

    fn without_top(m: &ComplexMatrix, lab: &CompositeLabeling) -> ComplexMatrix {
        let top = lab.index(AtomLevel::Upper, lab.n_max());
        let keep: Vec<usize> = (0..m.rows()).filter(|&k| k != top).collect();
        ComplexMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
    }

    #[test]
    fn jcm_propagator_matches_exponential_off_the_edge() {
        let lab = J.labeling().unwrap();
        let h = jcm_hamiltonian(&J).unwrap();
        for t in [0.0, 0.8, 5.1, 23.0] {
            let closed = jcm_evolution(&J, t).unwrap();
            let exact = evolve_operator(&h, t, 1.0).unwrap();
            let diff = &without_top(&closed, &lab) - &without_top(&exact, &lab);
            assert!(diff.max_abs() < 1e-9, "t={t}");
        }
        assert_eq!(jcm_evolution(&J, 0.0).unwrap(), ComplexMatrix::identity(34));
        let u = jcm_evolution(&J, 1.1).unwrap();
        assert!(jcm_propagator(&J, 1.1, Direction::Adjoint).unwrap().approx_eq(&u.adjoint(), 1e-14));
    }

    #[test]
    fn jcm_excited_vacuum_amplitudes() {
        let lab = J.labeling().unwrap();
        let t = 2.3;
        let u = jcm_evolution(&J, t).unwrap();
        let col = lab.index(AtomLevel::Upper, 0);
        let ph = C64::from_polar(1.0, -J.omega * t);
        let half = J.rabi * t / 2.0;
        assert!((u[(col, col)] - ph * half.cos()).norm() < 1e-14);
        assert!((u[(lab.index(AtomLevel::Lower, 1), col)] + ph * half.sin()).norm() < 1e-14);
    }

    #[test]
    fn jcm_vacuum_reductions() {
        for n_max in [1, 16] {
            let p = JcmParams { n_max, ..J };
            let lab = p.labeling().unwrap();
            let sys = lab.system();
            for t in [0.0, 1.0, 4.0, 9.5] {
                let r = jcm_vacuum_density(&p, t).unwrap();
                let (c2, s2) = ((p.rabi * t / 2.0).cos().powi(2), (p.rabi * t / 2.0).sin().powi(2));
                let atom = partial_trace(r.matrix(), &sys, Side::Beta).unwrap();
                assert!(atom.approx_eq(&ComplexMatrix::from_real_diag(&[c2, s2]), 1e-12));
                let field = partial_trace(r.matrix(), &sys, Side::Alpha).unwrap();
                assert!((field[(lab.field_index(0), lab.field_index(0))].re - c2).abs() < 1e-12);
                assert!((field[(lab.field_index(1), lab.field_index(1))].re - s2).abs() < 1e-12);
                assert!((r.purity() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn step_limit_cases() {
        let p = JcmParams { omega: 1.0, rabi: 2.0, n_max: 1 };
        // Ωt/2 = π/8, π/4, 3π/8
        assert_eq!(jcm_correlated_limit(PI / 8.0, &p), (1.0, 0.0));
        assert_eq!(jcm_correlated_limit(PI / 4.0, &p), (0.5, 0.5));
        assert_eq!(jcm_correlated_limit(3.0 * PI / 8.0, &p), (0.0, 1.0));
        assert_eq!(jcm_correlated_limit(PI, &p), (1.0, 0.0));
    }

    #[test]
    fn params_json() {
        let v: ModelParams =
            serde_json::from_str(r#"{"model":"jcm","params":{"omega":1.0,"rabi":0.5}}"#).unwrap();
        assert_eq!(v, ModelParams::Jcm(JcmParams { omega: 1.0, rabi: 0.5, n_max: 16 }));
        let s = serde_json::to_value(ModelParams::SpinPair(P)).unwrap();
        assert_eq!(s["model"], "spin_pair");
        assert_eq!(s["params"]["d_coupling"], 0.3);
        assert_eq!(ModelParams::SpinPair(P).system().unwrap(), BipartiteSystem::qubit_pair());
    }
}
