//! Hermitian eigendecomposition and the matrix functions built on it.

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;

use super::dense::{ComplexMatrix, DEFAULT_TOL};
use crate::error::{CoreError, Result};

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| C64::new(l, 0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<Spectrum> {
    hermitian_eig_with_tol(h, DEFAULT_TOL)
}

pub fn hermitian_eig_with_tol(h: &ComplexMatrix, tol: f64) -> Result<Spectrum> {
    let deviation = h.hermiticity_error();
    if deviation > tol {
        return Err(CoreError::NotHermitian { deviation });
    }
    let n = h.rows();
    if n == 0 {
        return Ok(Spectrum { eigenvalues: vec![], eigenvectors: ComplexMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::new(h.hermitize().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// `exp(-i t H / ħ)` computed from the spectrum of `H`.
pub fn evolve_operator(h: &ComplexMatrix, t: f64, hbar: f64) -> Result<ComplexMatrix> {
    evolve_operator_with_tol(h, t, hbar, DEFAULT_TOL)
}

pub fn evolve_operator_with_tol(h: &ComplexMatrix, t: f64, hbar: f64, tol: f64) -> Result<ComplexMatrix> {
    if t == 0.0 {
        h.check_square(h.rows())?;
        if h.hermiticity_error() > tol {
            return Err(CoreError::NotHermitian { deviation: h.hermiticity_error() });
        }
        return Ok(ComplexMatrix::identity(h.rows()));
    }
    let spec = hermitian_eig_with_tol(h, tol)?;
    Ok(spec.apply(|e| C64::from_polar(1.0, -e * t / hbar)))
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    let gram = m.adjoint().matmul(m).expect("A^H A is always conformable");
    hermitian_eig_with_tol(&gram, f64::INFINITY)
        .map(|s| s.max_eigenvalue().max(0.0).sqrt())
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum_sorted() {
        let s = hermitian_eig(&ComplexMatrix::from_real_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_x_spectrum() {
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = hermitian_eig(&sx).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(s.reconstruct().approx_eq(&sx, 1e-14));
    }

    #[test]
    fn complex_hermitian_reconstruction() {
        let h = ComplexMatrix::from_rows(&[
            &[C64::new(1.0, 0.0), C64::new(0.3, 0.7), C64::new(-0.2, 0.1)],
            &[C64::new(0.3, -0.7), C64::new(-0.5, 0.0), C64::new(0.0, 0.4)],
            &[C64::new(-0.2, -0.1), C64::new(0.0, -0.4), C64::new(2.0, 0.0)],
        ]);
        let s = hermitian_eig(&h).unwrap();
        assert!(s.reconstruct().approx_eq(&h, 1e-13));
        let vtv = s.eigenvectors.adjoint().matmul(&s.eigenvectors).unwrap();
        assert!(vtv.approx_eq(&ComplexMatrix::identity(3), 1e-13));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(CoreError::NotHermitian { .. })));
        assert!(evolve_operator(&m, 1.0, 1.0).is_err());
        assert!(evolve_operator(&m, 0.0, 1.0).is_err());
    }

    #[test]
    fn evolution_of_diagonal_generator() {
        let e = [0.7, -1.3, 2.0];
        let h = ComplexMatrix::from_real_diag(&e);
        assert_eq!(evolve_operator(&h, 0.0, 1.0).unwrap(), ComplexMatrix::identity(3));
        let t = 0.9;
        let u = evolve_operator(&h, t, 1.0).unwrap();
        let expect = ComplexMatrix::from_diag(&e.map(|x| C64::from_polar(1.0, -x * t)));
        assert!(u.approx_eq(&expect, 1e-14));
        // ħ rescales time
        let u2 = evolve_operator(&h, 2.0 * t, 2.0).unwrap();
        assert!(u2.approx_eq(&expect, 1e-14));
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = ComplexMatrix::from_diag(&[C64::new(0.0, -3.0), C64::new(2.0, 0.0)]);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
    }
}
