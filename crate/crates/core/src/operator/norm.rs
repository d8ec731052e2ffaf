use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::{eigh_with, EigenMethod};
use super::{ComplexMatrix, HermitianOperator};
use crate::tolerance::Tolerances;

/// Above this size the operator norm switches from a dense Gram
/// eigendecomposition to Lanczos iteration on the implicit Gram operator.
pub const DENSE_NORM_MAX_DIM: usize = 64;

const LANCZOS_RELATIVE_RESIDUAL: f64 = 1e-14;
const LANCZOS_SEED: u64 = 0x5eed_1a2c;

/// Largest singular value of `m`.
///
/// For Hermitian input this is the spectral radius.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.max_abs() == 0.0 {
        return 0.0;
    }
    let (rows, cols) = m.shape();
    let small = rows.min(cols);
    if small <= DENSE_NORM_MAX_DIM {
        let gram = if cols <= rows { &m.adjoint() * m } else { m * &m.adjoint() };
        let gram = HermitianOperator::from_matrix_unchecked(gram.hermitian_part());
        let tol = Tolerances::default();
        return match eigh_with(&gram, EigenMethod::Jacobi, &tol) {
            Ok(d) => d.eigenvalues().last().copied().unwrap_or(0.0).max(0.0).sqrt(),
            // Gram matrices are Hermitian; only a sweep-cap failure can land here
            Err(_) => lanczos_norm(m),
        };
    }
    lanczos_norm(m)
}

fn lanczos_norm(m: &ComplexMatrix) -> f64 {
    let (rows, cols) = m.shape();
    let top = if cols <= rows {
        lanczos_max_eigenvalue(cols, |x| m.adjoint_mul_vec(&m.mul_vec(x)))
    } else {
        lanczos_max_eigenvalue(rows, |x| m.mul_vec(&m.adjoint_mul_vec(x)))
    };
    top.max(0.0).sqrt()
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator given by
/// its action, via Lanczos with full reorthogonalization.
///
/// Terminates when the Ritz residual `β_k |s_k|` of the top Ritz pair falls
/// below `1e-14 · θ` or when the Krylov space becomes invariant, so
/// operators with few distinct eigenvalues converge in few steps.
pub fn lanczos_max_eigenvalue(n: usize, apply: impl Fn(&[Complex64]) -> Vec<Complex64>) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut q: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    normalize(&mut q);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut theta = 0.0;

    for k in 0..n {
        let mut w = apply(&q);
        let alpha = dot(&q, &w).re;
        axpy(&mut w, -alpha, &q);
        if let (Some(prev), Some(&beta)) = (basis.last(), betas.last()) {
            axpy(&mut w, -beta, prev);
        }
        basis.push(q);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        alphas.push(alpha);
        let beta = norm(&w);

        let check = k < 32 || k % 4 == 3 || k + 1 == n;
        if check {
            let (top, last_component) = tridiagonal_top(&alphas, &betas);
            theta = top;
            let scale = top.abs().max(f64::MIN_POSITIVE);
            if beta <= LANCZOS_RELATIVE_RESIDUAL * scale
                || beta * last_component.abs() <= LANCZOS_RELATIVE_RESIDUAL * scale
            {
                return theta;
            }
        }
        if beta == 0.0 {
            return tridiagonal_top(&alphas, &betas).0;
        }
        betas.push(beta);
        q = w.into_iter().map(|z| z / beta).collect();
    }
    theta
}

fn tridiagonal_top(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j || j + 1 == i {
            betas[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, top) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    (top, eig.eigenvectors[(k - 1, idx)])
}

/// Largest singular value with left and right singular vectors:
/// `m v = σ u`.
pub fn top_singular_pair(m: &ComplexMatrix) -> (f64, Vec<Complex64>, Vec<Complex64>) {
    let gram = HermitianOperator::from_matrix_unchecked((&m.adjoint() * m).hermitian_part());
    let d = eigh_with(&gram, EigenMethod::Auto, &Tolerances::default())
        .expect("Gram matrices are Hermitian");
    let last = d.dim() - 1;
    let v = d.eigenvectors().column(last);
    let sigma = d.eigenvalues()[last].max(0.0).sqrt();
    let mut u = m.mul_vec(&v);
    if sigma > 0.0 {
        u.iter_mut().for_each(|z| *z /= sigma);
    }
    (sigma, u, v)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn normalize(a: &mut [Complex64]) {
    let n = norm(a);
    a.iter_mut().for_each(|z| *z /= n);
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}
