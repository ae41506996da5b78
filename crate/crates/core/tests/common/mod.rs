#![allow(dead_code)]

use corred_core::linalg::{kron, ComplexMatrix};
use corred_core::{Complex64, DensityMatrix, Observable, Validation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `G G† / Tr(G G†)` for a random square `G`: full rank almost surely.
pub fn random_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let g = random_matrix(rng, n, n);
    let m = g.matmul(&g.adjoint()).unwrap();
    DensityMatrix::normalized(&m, Validation::Strict).unwrap()
}

pub fn random_product(rng: &mut impl Rng, na: usize, nb: usize) -> (DensityMatrix, DensityMatrix, DensityMatrix) {
    let a = random_density(rng, na);
    let b = random_density(rng, nb);
    let ab = DensityMatrix::new(kron(a.matrix(), b.matrix()), Validation::Strict).unwrap();
    (a, b, ab)
}

/// Positive-semidefinite `G G†` with a random scale.
pub fn random_nonnegative_observable(rng: &mut impl Rng, n: usize) -> Observable {
    let g = random_matrix(rng, n, n);
    let scale = rng.gen_range(0.2..3.0);
    Observable::new(g.matmul(&g.adjoint()).unwrap().hermitize().scale_real(scale), "random").unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    u.matmul(&u.adjoint()).unwrap().max_abs_diff(&ComplexMatrix::identity(u.rows())).unwrap()
}
