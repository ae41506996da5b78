//! Density operators and observables.
//!
//! Units: ħ = k_B = 1 throughout, so temperatures are energies.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};
use crate::linalg::{hermitian_eig, hermitian_eig_with_tol, ComplexMatrix, MatrixWire, DEFAULT_TOL};

/// Eigenvalue floor for positivity in strict validation.
pub const POSITIVITY_FLOOR: f64 = -1e-10;

/// Eigenvalue floor tolerated by relaxed validation.
pub const RELAXED_POSITIVITY_FLOOR: f64 = -1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    Strict,
    Relaxed,
}

/// Outcome of checking a matrix against the density-operator axioms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    pub fn check(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(CoreError::dims("square matrix", format!("{}x{}", m.rows(), m.cols())));
        }
        let hermiticity_error = m.hermiticity_error();
        let trace_error = (m.trace() - C64::new(1.0, 0.0)).norm();
        let min_eigenvalue = hermitian_eig_with_tol(&m.hermitize(), f64::INFINITY)?.min_eigenvalue();
        Ok(Self { hermiticity_error, trace_error, min_eigenvalue })
    }

    /// Whether the report satisfies `level` with hermiticity/trace tolerance `tol`.
    pub fn passes(&self, level: Validation, tol: f64) -> bool {
        let floor = match level {
            Validation::Strict => POSITIVITY_FLOOR.min(-tol),
            Validation::Relaxed => RELAXED_POSITIVITY_FLOOR,
        };
        self.hermiticity_error <= tol && self.trace_error <= tol && self.min_eigenvalue >= floor
    }
}

/// A validated density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    validation: Validation,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, validation: Validation) -> Result<Self> {
        Self::with_tol(matrix, validation, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: ComplexMatrix, validation: Validation, tol: f64) -> Result<Self> {
        let report = ValidationReport::check(&matrix)?;
        if !report.passes(validation, tol) {
            return Err(CoreError::InvalidState(format!(
                "hermiticity error {:e}, trace error {:e}, min eigenvalue {:e} ({validation:?})",
                report.hermiticity_error, report.trace_error, report.min_eigenvalue
            )));
        }
        Ok(Self { matrix, validation, min_eigenvalue: report.min_eigenvalue })
    }

    /// Hermitize and renormalize the trace before validating.
    pub fn normalized(matrix: &ComplexMatrix, validation: Validation) -> Result<Self> {
        let h = matrix.hermitize();
        let tr = h.trace().re;
        if tr.abs() < f64::MIN_POSITIVE {
            return Err(CoreError::ZeroTrace);
        }
        Self::new(h.scale_real(1.0 / tr), validation)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Diagonal entries (real parts).
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Largest off-diagonal magnitude.
    pub fn max_coherence(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.matrix[(i, j)].norm());
                }
            }
        }
        m
    }

    /// Tr(ρ²), equal to the squared Frobenius norm for hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct DensityWire {
    #[serde(flatten)]
    matrix: MatrixWire,
    #[serde(default = "density_kind")]
    kind: String,
    #[serde(default = "strict")]
    validation: Validation,
}

fn density_kind() -> String {
    "density".into()
}

fn strict() -> Validation {
    Validation::Strict
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityWire { matrix: MatrixWire::from(&self.matrix), kind: density_kind(), validation: self.validation }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let wire = DensityWire::deserialize(d)?;
        if wire.kind != "density" {
            return Err(D::Error::custom(format!("expected kind \"density\", found {:?}", wire.kind)));
        }
        let m = ComplexMatrix::try_from(wire.matrix).map_err(D::Error::custom)?;
        DensityMatrix::new(m, wire.validation).map_err(D::Error::custom)
    }
}

/// Hermitian operator of an observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    matrix: ComplexMatrix,
    label: String,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let deviation = matrix.hermiticity_error();
        if deviation > DEFAULT_TOL {
            return Err(CoreError::NotHermitian { deviation });
        }
        Ok(Self { matrix, label: label.into() })
    }

    /// Projector onto basis level `level`.
    pub fn projector(dim: usize, level: usize, label: impl Into<String>) -> Result<Self> {
        Ok(Self { matrix: projector(dim, level)?, label: label.into() })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

fn projector(dim: usize, level: usize) -> Result<ComplexMatrix> {
    if level >= dim {
        return Err(CoreError::IndexOutOfRange { index: level, dim });
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    m[(level, level)] = C64::new(1.0, 0.0);
    Ok(m)
}

fn trusted(matrix: ComplexMatrix) -> DensityMatrix {
    DensityMatrix::new(matrix, Validation::Strict).expect("constructor produced an invalid state")
}

/// Maximally mixed state `(1/N)·1`.
pub fn minimum_information_state(dim: usize) -> DensityMatrix {
    assert!(dim >= 1, "dimension must be at least 1");
    DensityMatrix {
        matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        validation: Validation::Strict,
        min_eigenvalue: 1.0 / dim as f64,
    }
}

/// Gibbs state `exp(-H/T) / Tr exp(-H/T)`; `T = ∞` gives the maximally mixed state.
pub fn thermal_state(h: &ComplexMatrix, temperature: f64) -> Result<DensityMatrix> {
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(CoreError::NonPositiveTemperature(temperature));
    }
    let spec = hermitian_eig(h)?;
    if temperature.is_infinite() {
        return Ok(minimum_information_state(h.rows()));
    }
    let e0 = spec.min_eigenvalue();
    // shift by the ground energy so the largest weight is 1
    let z: f64 = spec.eigenvalues.iter().map(|&e| (-(e - e0) / temperature).exp()).sum();
    let rho = spec.apply(|e| C64::new((-(e - e0) / temperature).exp() / z, 0.0)).hermitize();
    DensityMatrix::new(rho, Validation::Strict)
}

/// Basis-state projector `|level⟩⟨level|`.
pub fn projector_state(dim: usize, level: usize) -> Result<DensityMatrix> {
    Ok(trusted(projector(dim, level)?))
}

/// Singlet-like entangled pair: ½ on |21⟩⟨21|, |12⟩⟨12| and −½ coherences.
pub fn epr_state() -> DensityMatrix {
    trusted(ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.5, -0.5, 0.0],
        &[0.0, -0.5, 0.5, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ]))
}

/// Triplet-like entangled pair: as [`epr_state`] with +½ coherences.
pub fn triplet_state() -> DensityMatrix {
    trusted(ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.5, 0.5, 0.0],
        &[0.0, 0.5, 0.5, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ]))
}

/// Pure state `cos φ |21⟩ − sin φ |12⟩`.
pub fn spin_pair_initial(phi: f64) -> DensityMatrix {
    let (s, c) = phi.sin_cos();
    trusted(ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, c * c, -s * c, 0.0],
        &[0.0, -s * c, s * s, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ]))
}

/// Unit-trace normalization `A / Tr A` of a nonnegative observable.
pub fn state_from_observable(a: &Observable) -> Result<DensityMatrix> {
    let min_eigenvalue = hermitian_eig(a.matrix())?.min_eigenvalue();
    if min_eigenvalue < POSITIVITY_FLOOR {
        return Err(CoreError::NotNonnegative { min_eigenvalue });
    }
    let tr = a.matrix().trace().re;
    if tr.abs() <= DEFAULT_TOL {
        return Err(CoreError::ZeroTrace);
    }
    DensityMatrix::new(a.matrix().hermitize().scale_real(1.0 / tr), Validation::Strict)
}
