use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{ComplexMatrix, HermitianOperator};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Largest dimension handled by the cyclic Jacobi solver under
/// [`EigenMethod::Auto`].
pub const JACOBI_MAX_DIM: usize = 64;

/// Jacobi stops once the off-diagonal Frobenius mass is below this fraction
/// of `‖H‖_F`.
pub const JACOBI_OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;

/// Iteration cap handed to the tridiagonal QR solver.
const TRIDIAGONAL_MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EigenMethod {
    /// Jacobi up to [`JACOBI_MAX_DIM`], tridiagonal QR above.
    #[default]
    Auto,
    /// Cyclic Jacobi rotations.
    Jacobi,
    /// Householder tridiagonalization followed by implicit QR.
    Tridiagonal,
}

/// Eigendecomposition `H = U diag(λ) U*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    groups: Vec<Range<usize>>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Index ranges of clusters of (numerically) equal eigenvalues.
    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvectors of one cluster as an `N × m` matrix.
    pub fn group_vectors(&self, group: usize) -> ComplexMatrix {
        self.eigenvectors.columns(self.groups[group].clone())
    }

    /// Orthogonal projection onto the span of one cluster.
    pub fn group_projection(&self, group: usize) -> ComplexMatrix {
        let v = self.group_vectors(group);
        &v * &v.adjoint()
    }

    /// `U diag(d) U*` for arbitrary complex `d`.
    pub fn synthesize(&self, d: &[Complex64]) -> ComplexMatrix {
        assert_eq!(d.len(), self.dim());
        let scaled = self.eigenvectors.scale_columns(d);
        &scaled * &self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<Complex64> = self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.synthesize(&d)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    fn from_unsorted(values: Vec<f64>, vectors: ComplexMatrix, group_tol: f64) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
        let n = vectors.rows();
        let eigenvectors = ComplexMatrix::from_fn(n, order.len(), |i, j| vectors[(i, order[j])]);
        let scale = eigenvalues.iter().map(|x| x.abs()).fold(1.0, f64::max);
        let groups = cluster(&eigenvalues, group_tol * scale);
        Self { eigenvalues, eigenvectors, groups }
    }
}

/// Groups sorted values so that every cluster spans at most `width` and
/// each cluster starts more than `width` above the previous cluster's start.
fn cluster(sorted: &[f64], width: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..sorted.len() {
        if sorted[i] - sorted[start] > width {
            groups.push(start..i);
            start = i;
        }
    }
    if !sorted.is_empty() {
        groups.push(start..sorted.len());
    }
    groups
}

/// Eigendecomposition of a Hermitian operator with the default method.
pub fn eigh(h: &HermitianOperator, tol: &Tolerances) -> Result<SpectralDecomposition> {
    eigh_with(h, EigenMethod::Auto, tol)
}

pub fn eigh_with(
    h: &HermitianOperator,
    method: EigenMethod,
    tol: &Tolerances,
) -> Result<SpectralDecomposition> {
    h.check_hermitian(tol.hermitian)?;
    let m = h.matrix();
    let method = match method {
        EigenMethod::Auto if m.rows() <= JACOBI_MAX_DIM => EigenMethod::Jacobi,
        EigenMethod::Auto => EigenMethod::Tridiagonal,
        other => other,
    };
    let (values, vectors) = match method {
        EigenMethod::Jacobi => jacobi(m, tol.max_sweeps)?,
        _ => tridiagonal(m)?,
    };
    Ok(SpectralDecomposition::from_unsorted(values, vectors, tol.group))
}

/// Cyclic Jacobi for complex Hermitian matrices.
///
/// Each rotation is `G = [[c, s·e], [−s·ē, c]]` on the `(p, q)` plane where
/// `e` is the phase of `a_pq`; it makes the pair real and then annihilates it
/// with the classical symmetric rotation.
fn jacobi(m: &ComplexMatrix, max_sweeps: usize) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_DIAGONAL_THRESHOLD * a.frobenius_norm();

    let off_diagonal = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_diagonal(&a) > threshold {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[(p, q)];
                let abs_g = g.norm();
                if abs_g < f64::MIN_POSITIVE {
                    continue;
                }
                let e = g / abs_g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * abs_g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let se = e * s;
                let se_conj = se.conj();

                for k in 0..n {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    a[(k, p)] = x * c - se_conj * y;
                    a[(k, q)] = se * x + y * c;
                }
                for k in 0..n {
                    let x = a[(p, k)];
                    let y = a[(q, k)];
                    a[(p, k)] = x * c - se * y;
                    a[(q, k)] = se_conj * x + y * c;
                }
                for k in 0..n {
                    let x = v[(k, p)];
                    let y = v[(k, q)];
                    v[(k, p)] = x * c - se_conj * y;
                    v[(k, q)] = se * x + y * c;
                }
                a[(p, p)] = Complex64::new(app - t * abs_g, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * abs_g, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((values, v))
}

/// Householder tridiagonalization plus implicit QR, backed by nalgebra.
/// Real input takes the (roughly four times cheaper) real symmetric path.
fn tridiagonal(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.rows();
    let h = m.hermitian_part();
    let fail = || Error::NoConvergence { iterations: TRIDIAGONAL_MAX_ITERATIONS };
    if h.is_real() {
        let dm = DMatrix::<f64>::from_fn(n, n, |i, j| h[(i, j)].re);
        let eig = SymmetricEigen::try_new(dm, f64::EPSILON, TRIDIAGONAL_MAX_ITERATIONS).ok_or_else(fail)?;
        let vectors = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(eig.eigenvectors[(i, j)], 0.0));
        Ok((eig.eigenvalues.iter().copied().collect(), vectors))
    } else {
        let dm = DMatrix::<Complex64>::from_fn(n, n, |i, j| h[(i, j)]);
        let eig = SymmetricEigen::try_new(dm, f64::EPSILON, TRIDIAGONAL_MAX_ITERATIONS).ok_or_else(fail)?;
        let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)]);
        Ok((eig.eigenvalues.iter().copied().collect(), vectors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(rows: &[Vec<f64>]) -> HermitianOperator {
        HermitianOperator::new(ComplexMatrix::from_real_rows(rows), &Tolerances::default()).unwrap()
    }

    #[test]
    fn identity_is_one_cluster() {
        let d = eigh(&HermitianOperator::identity(3), &Tolerances::default()).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 1.0, 1.0]);
        assert_eq!(d.groups(), std::slice::from_ref(&(0..3)));
    }

    #[test]
    fn antidiagonal_block_has_plus_minus_three() {
        // characteristic polynomial x² − 9
        let d = eigh(&herm(&[vec![0.0, 3.0], vec![3.0, 0.0]]), &Tolerances::default()).unwrap();
        assert!((d.eigenvalues()[0] + 3.0).abs() < 1e-14);
        assert!((d.eigenvalues()[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn near_equal_eigenvalues_share_a_group() {
        let eps = 1e-12;
        let h = HermitianOperator::new(
            ComplexMatrix::from_real_diagonal(&[1.0, 1.0 + eps, 5.0]),
            &Tolerances::default(),
        )
        .unwrap();
        let d = eigh(&h, &Tolerances::default()).unwrap();
        assert_eq!(d.groups(), &[0..2, 2..3]);
    }

    #[test]
    fn complex_pair_is_diagonalized() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let h = HermitianOperator::new(m.clone(), &Tolerances::default()).unwrap();
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let d = eigh_with(&h, method, &Tolerances::default()).unwrap();
            assert!(d.eigenvalues()[0].abs() < 1e-14);
            assert!((d.eigenvalues()[1] - 2.0).abs() < 1e-14);
            assert!((&d.reconstruct() - &m).max_abs() < 1e-14);
        }
    }

    #[test]
    fn sweep_cap_surfaces_as_no_convergence() {
        let h = herm(&[vec![1.0, 2.0, 0.5], vec![2.0, -1.0, 0.3], vec![0.5, 0.3, 4.0]]);
        let tol = Tolerances { max_sweeps: 0, ..Tolerances::default() };
        match eigh_with(&h, EigenMethod::Jacobi, &tol) {
            Err(Error::NoConvergence { iterations: 0 }) => {}
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn cluster_widths() {
        assert_eq!(cluster(&[0.0, 0.5, 0.9, 2.0], 1.0), vec![0..3, 3..4]);
        assert_eq!(cluster(&[], 1.0), Vec::<Range<usize>>::new());
    }
}
