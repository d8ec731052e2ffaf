//! Dense complex-matrix kernel: Hermitian eigendecomposition, operator
//! norms, resolvents, functional calculus and commutators.

mod eigen;
mod matrix;
mod norm;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::tolerance::Tolerances;

pub use eigen::{eigh, eigh_with, EigenMethod, SpectralDecomposition, JACOBI_MAX_DIM};
pub use matrix::{ComplexMatrix, JsonComplex};
pub use norm::{lanczos_max_eigenvalue, operator_norm, top_singular_pair, DENSE_NORM_MAX_DIM};

/// Square matrix that is Hermitian up to `hermitian` tolerance.
///
/// [`HermitianOperator::new`] validates and stores the exact Hermitian part.
/// Deserialized and [`from_matrix_unchecked`](Self::from_matrix_unchecked)
/// values keep their raw entries so that validation reports can measure the
/// defect; [`eigh`] re-checks before decomposing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let op = Self { matrix };
        op.check_hermitian(tol.hermitian)?;
        Ok(Self { matrix: op.matrix.hermitian_part() })
    }

    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(n, n) }
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

    /// `‖M − M*‖_F`, or infinity for a non-square matrix.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.matrix.is_square() {
            return f64::INFINITY;
        }
        (&self.matrix - &self.matrix.adjoint()).frobenius_norm()
    }

    pub(crate) fn check_hermitian(&self, tol: f64) -> Result<()> {
        if !self.matrix.is_square() {
            return validation(format!(
                "operator must be square, got {}x{}",
                self.matrix.rows(),
                self.matrix.cols()
            ));
        }
        let residual = self.hermitian_residual();
        if residual > tol * self.matrix.frobenius_norm() {
            return validation(format!("operator is not Hermitian: ‖M − M*‖_F = {residual:e}"));
        }
        Ok(())
    }
}

/// Tall (or square) matrix `I` with `I*I = 1`, mapping a source space of
/// dimension `cols` into a target of dimension `rows`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Isometry {
    matrix: ComplexMatrix,
}

impl Isometry {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let iso = Self { matrix };
        let residual = iso.residual();
        if residual > tol.validation {
            return validation(format!("matrix is not an isometry: ‖I*I − 1‖ = {residual:e}"));
        }
        Ok(iso)
    }

    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `‖I*I − 1‖` (operator norm).
    pub fn residual(&self) -> f64 {
        let gram = &self.matrix.adjoint() * &self.matrix;
        operator_norm(&(&gram - &ComplexMatrix::identity(self.source_dim())))
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn after(&self, inner: &Isometry) -> Result<Isometry> {
        Ok(Isometry { matrix: self.matrix.checked_mul(&inner.matrix)? })
    }

    /// `I X I*`: an operator on the source pushed to the target.
    pub fn push_forward(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let left = self.matrix.checked_mul(x)?;
        left.checked_mul(&self.matrix.adjoint())
    }

    /// `I* Y I`: an operator on the target compressed to the source.
    pub fn compress(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let right = y.checked_mul(&self.matrix)?;
        self.matrix.adjoint().checked_mul(&right)
    }

    /// The range projection `I I*`.
    pub fn range_projection(&self) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(&self.matrix * &self.matrix.adjoint())
    }

    /// `P X = I (I* X)` without forming `P`.
    pub fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let inner = self.matrix.adjoint().checked_mul(x)?;
        self.matrix.checked_mul(&inner)
    }
}

/// `(H − λ)^{-1}` computed as `U diag((λ_n − λ)^{-1}) U*`.
///
/// Non-real `λ` are the intended use; a `λ` (real or not) within
/// `rank · max(1, ‖H‖)` of the spectrum is rejected rather than regularized.
pub fn resolvent(h: &HermitianOperator, lambda: Complex64, tol: &Tolerances) -> Result<ComplexMatrix> {
    let d = eigh(h, tol)?;
    resolvent_from(&d, lambda, tol)
}

/// Resolvent from an existing decomposition.
pub fn resolvent_from(d: &SpectralDecomposition, lambda: Complex64, tol: &Tolerances) -> Result<ComplexMatrix> {
    let weights = resolvent_weights(d.eigenvalues(), lambda, tol)?;
    Ok(d.synthesize(&weights))
}

pub(crate) fn resolvent_weights(eigenvalues: &[f64], lambda: Complex64, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let distance = eigenvalues
        .iter()
        .map(|&x| (Complex64::new(x, 0.0) - lambda).norm())
        .fold(f64::INFINITY, f64::min);
    let scale = eigenvalues.iter().map(|x| x.abs()).fold(1.0, f64::max);
    if distance <= tol.rank * scale {
        return Err(Error::Singular { lambda, distance });
    }
    Ok(eigenvalues.iter().map(|&x| (Complex64::new(x, 0.0) - lambda).inv()).collect())
}

/// Real functional calculus `f(H) = U diag(f(λ_n)) U*`.
///
/// Only real-valued `f` is accepted; use [`resolvent`] for `1/(x − λ)`.
pub fn apply_function(
    h: &HermitianOperator,
    f: &dyn Fn(f64) -> f64,
    tol: &Tolerances,
) -> Result<HermitianOperator> {
    let d = eigh(h, tol)?;
    apply_function_from(&d, f)
}

pub fn apply_function_from(d: &SpectralDecomposition, f: &dyn Fn(f64) -> f64) -> Result<HermitianOperator> {
    let mut values = Vec::with_capacity(d.dim());
    for &x in d.eigenvalues() {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Numeric(format!("function is not finite at eigenvalue {x}")));
        }
        values.push(Complex64::new(y, 0.0));
    }
    Ok(HermitianOperator::from_matrix_unchecked(d.synthesize(&values).hermitian_part()))
}

/// `AB − BA` for square matrices of equal size.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.shape() != b.shape() {
        return validation(format!(
            "commutator needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        ));
    }
    Ok(&(a * b) - &(b * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_resolvent_at_i() {
        // (0 − i)^{-1} = i
        let r = resolvent(&HermitianOperator::zeros(1), c(0.0, 1.0), &Tolerances::default()).unwrap();
        assert!((r[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_resolvent() {
        let h = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[1.0, 2.0]), &Tolerances::default())
            .unwrap();
        let lambda = c(0.0, 1.0);
        let r = resolvent(&h, lambda, &Tolerances::default()).unwrap();
        assert!((r[(0, 0)] - (c(1.0, 0.0) - lambda).inv()).norm() < 1e-15);
        assert!((r[(1, 1)] - (c(2.0, 0.0) - lambda).inv()).norm() < 1e-15);
        assert!(r[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn real_lambda_on_spectrum_is_singular() {
        let h = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[1.0, 2.0]), &Tolerances::default())
            .unwrap();
        assert!(matches!(
            resolvent(&h, c(2.0, 0.0), &Tolerances::default()),
            Err(Error::Singular { .. })
        ));
        assert!(resolvent(&h, c(1.5, 0.0), &Tolerances::default()).is_ok());
    }

    #[test]
    fn lorentzian_on_diagonal() {
        let h = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[0.0, 3.0]), &Tolerances::default())
            .unwrap();
        let f = apply_function(&h, &|x| 1.0 / (1.0 + x * x), &Tolerances::default()).unwrap();
        assert!((f.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((f.matrix()[(1, 1)].re - 0.1).abs() < 1e-15);
    }

    #[test]
    fn non_finite_function_value_names_the_eigenvalue() {
        let h = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[0.0, 3.0]), &Tolerances::default())
            .unwrap();
        let err = apply_function(&h, &|x| 1.0 / x, &Tolerances::default()).unwrap_err();
        assert!(err.to_string().contains("eigenvalue 0"));
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(HermitianOperator::new(m.clone(), &Tolerances::default()).is_err());
        let raw = HermitianOperator::from_matrix_unchecked(m);
        assert!(matches!(eigh(&raw, &Tolerances::default()), Err(Error::Validation(_))));
    }

    #[test]
    fn commuting_diagonals_commute() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diagonal(&[3.0, -1.0]);
        assert_eq!(commutator(&a, &b).unwrap().max_abs(), 0.0);
        assert!(commutator(&a, &ComplexMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn isometry_helpers() {
        let i = Isometry::new(ComplexMatrix::from_real_rows(&[vec![1.0], vec![0.0]]), &Tolerances::default())
            .unwrap();
        assert_eq!(i.residual(), 0.0);
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0], vec![1.0]]);
        assert!(Isometry::new(bad, &Tolerances::default()).is_err());
        let p = i.range_projection();
        assert_eq!(p.matrix(), &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
    }
}
