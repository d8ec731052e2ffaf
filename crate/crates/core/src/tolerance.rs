use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// All values are relative to the scale named in the field documentation.
/// Defaults suit double-precision kernels on desk-scale, well-conditioned
/// problems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// `‖M − M*‖_F ≤ hermitian · ‖M‖_F`.
    pub hermitian: f64,
    /// Eigenvalues closer than `group · max(1, ‖H‖)` share a cluster.
    pub group: f64,
    /// An eigenprojection `Q` counts as contained in `range(P)` when
    /// `‖Q − PQ‖ ≤ contain`.
    pub contain: f64,
    /// Pass/fail threshold for validation residuals (absolute, scaled by
    /// `max(1, ‖D‖)` where a Dirac operator is involved).
    pub validation: f64,
    /// Numerical rank threshold for orthonormalization and injectivity.
    pub rank: f64,
    /// Sweep cap for the cyclic Jacobi eigensolver.
    pub max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            group: 1e-8,
            contain: 1e-8,
            validation: 1e-10,
            rank: 1e-10,
            max_sweeps: 100,
        }
    }
}
