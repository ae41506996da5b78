//! Bipartite tensor algebra: Kronecker products, partial traces and
//! extended operators.
//!
//! Composite basis states are indexed by the pair `(i, i')`, `i` labelling
//! subsystem α and `i'` subsystem β, mapped to `i * dim_beta + i'`. Local
//! indices list levels in descending energy, so for two two-level systems
//! the composite order is `|22⟩, |21⟩, |12⟩, |11⟩`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::dense::ComplexMatrix;
use crate::error::{CoreError, Result};

/// One of the two subsystems of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alpha,
    Beta,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Alpha => Side::Beta,
            Side::Beta => Side::Alpha,
        }
    }
}

/// Dimension pair `(N_α, N_β)` of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteSystem {
    dim_alpha: usize,
    dim_beta: usize,
}

impl BipartiteSystem {
    pub fn new(dim_alpha: usize, dim_beta: usize) -> Result<Self> {
        if dim_alpha == 0 || dim_beta == 0 {
            return Err(CoreError::dims("subsystem dimensions >= 1", format!("({dim_alpha}, {dim_beta})")));
        }
        Ok(Self { dim_alpha, dim_beta })
    }

    /// Two coupled two-level systems.
    pub fn qubit_pair() -> Self {
        Self { dim_alpha: 2, dim_beta: 2 }
    }

    pub fn dim_alpha(&self) -> usize {
        self.dim_alpha
    }

    pub fn dim_beta(&self) -> usize {
        self.dim_beta
    }

    pub fn dim(&self, side: Side) -> usize {
        match side {
            Side::Alpha => self.dim_alpha,
            Side::Beta => self.dim_beta,
        }
    }

    pub fn composite_dim(&self) -> usize {
        self.dim_alpha * self.dim_beta
    }

    /// Composite index of the pair `(i, i')`.
    pub fn index(&self, alpha: usize, beta: usize) -> usize {
        debug_assert!(alpha < self.dim_alpha && beta < self.dim_beta);
        alpha * self.dim_beta + beta
    }

    /// Inverse of [`BipartiteSystem::index`].
    pub fn split(&self, composite: usize) -> (usize, usize) {
        (composite / self.dim_beta, composite % self.dim_beta)
    }

    /// Re-express a composite operator with both local orders reversed
    /// (descending <-> ascending energy). The map is an involution.
    pub fn reverse_order(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.composite_dim();
        op.check_square(n)?;
        // Reversing both local indices reverses the composite index.
        Ok(ComplexMatrix::from_fn(n, n, |i, j| op[(n - 1 - i, n - 1 - j)]))
    }

    pub(crate) fn check_composite(&self, m: &ComplexMatrix) -> Result<()> {
        m.check_square(self.composite_dim())
    }

    pub(crate) fn check_local(&self, m: &ComplexMatrix, side: Side) -> Result<()> {
        m.check_square(self.dim(side))
    }
}

/// Kronecker product: block `(i, j)` of the result is `a[i, j] · b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * p, a.cols() * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

/// Trace over subsystem `over`, returning the operator on the other side.
pub fn partial_trace(rho: &ComplexMatrix, sys: &BipartiteSystem, over: Side) -> Result<ComplexMatrix> {
    sys.check_composite(rho)?;
    let (na, nb) = (sys.dim_alpha(), sys.dim_beta());
    let out = match over {
        Side::Beta => ComplexMatrix::from_fn(na, na, |i, j| {
            (0..nb).map(|k| rho[(sys.index(i, k), sys.index(j, k))]).sum::<C64>()
        }),
        Side::Alpha => ComplexMatrix::from_fn(nb, nb, |i, j| {
            (0..na).map(|k| rho[(sys.index(k, i), sys.index(k, j))]).sum::<C64>()
        }),
    };
    Ok(out)
}

/// Extended operator: `A ⊗ 1_β` for `side = Alpha`, `1_α ⊗ B` for `Beta`.
pub fn extend(op: &ComplexMatrix, sys: &BipartiteSystem, side: Side) -> Result<ComplexMatrix> {
    sys.check_local(op, side)?;
    Ok(match side {
        Side::Alpha => kron(op, &ComplexMatrix::identity(sys.dim_beta())),
        Side::Beta => kron(&ComplexMatrix::identity(sys.dim_alpha()), op),
    })
}
