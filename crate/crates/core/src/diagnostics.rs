//! Convergence diagnostics on level-`J` realizations.
//!
//! Compact resolvent (ST1) is probed through the gaps
//! `‖I_{j,J} R_λ(D_j) I_{j,J}* − R_λ(D_J)‖` and `‖I_{j,J} f(D_j) I_{j,J}* − f(D_J)‖`,
//! each computed twice: by a direct operator norm and by the
//! eigenprojection formula `sup{|λ_n − λ|^{-1} : Q_{j,λ_n} ≠ Q_{λ_n}}`.
//! Bounded commutators (ST2) are probed through the sequences
//! `‖[D_k, π_k(φ_{j,k}(a))]‖`, `k ≥ j`. Verdicts are heuristics on finite
//! trends and say so.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{hom_apply, AlgebraElement};
use crate::error::{validation, Error, Result};
use crate::inductive::{InductiveSystem, Provenance, Realization};
use crate::operator::{
    lanczos_max_eigenvalue, operator_norm, resolvent, ComplexMatrix, HermitianOperator, JsonComplex,
    DENSE_NORM_MAX_DIM,
};
use crate::operator::resolvent_weights;
use crate::triple::{commutator_norm, commutator_with_dirac};

/// Default ST1 verdict threshold on the last tail gap.
pub const DEFAULT_THRESHOLD: f64 = 1e-3;
/// Default number of trailing entries inspected by verdicts.
pub const DEFAULT_WINDOW: usize = 5;
/// A nonincreasing ST1 tail above the threshold still counts as decaying
/// when its last value is at most this fraction of its first.
pub const DECAY_RATIO: f64 = 0.75;
/// Relative slack for monotonicity of commutator series.
pub const MONOTONE_SLACK: f64 = 1e-9;
/// Relative slack for monotonicity of gap tails.
const TREND_SLACK: f64 = 1e-12;
/// Default ST2 probes per algebra level.
pub const DEFAULT_GENERATORS_PER_LEVEL: usize = 8;

pub const CAVEAT: &str = "heuristic: a finite truncation exhibits trends only and cannot prove or refute a statement about the inductive limit";

/// Continuous functions vanishing at infinity used as probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeFunction {
    /// `1/(1+x²)`
    Lorentzian,
    /// `exp(−x²)`
    Gaussian,
    /// `x/(1+x²)`
    OddLorentzian,
}

impl ProbeFunction {
    pub const ALL: [ProbeFunction; 3] = [Self::Lorentzian, Self::Gaussian, Self::OddLorentzian];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lorentzian => "lorentzian",
            Self::Gaussian => "gaussian",
            Self::OddLorentzian => "odd-lorentzian",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::Validation(format!("unknown probe function {name:?}; expected lorentzian, gaussian or odd-lorentzian")))
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Lorentzian => 1.0 / (1.0 + x * x),
            Self::Gaussian => (-x * x).exp(),
            Self::OddLorentzian => x / (1.0 + x * x),
        }
    }
}

/// What a gap series measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GapProbe {
    Resolvent { lambda: JsonComplex },
    Function { name: ProbeFunction },
}

impl GapProbe {
    pub fn resolvent(lambda: Complex64) -> Self {
        Self::Resolvent { lambda: lambda.into() }
    }

    pub fn function(f: ProbeFunction) -> Self {
        Self::Function { name: f }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub j: usize,
    /// Direct operator norm.
    pub gap: f64,
    /// Eigenprojection formula.
    pub eigen_gap: f64,
    /// `|gap − eigen_gap|`.
    pub cross_check: f64,
    /// Closed-form upper bound for recognized examples.
    pub analytic_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSeries {
    pub probe: GapProbe,
    pub ambient_level: usize,
    pub entries: Vec<GapEntry>,
}

/// `‖[D_k, π_k(φ_{j,k}(a))]‖` for `k = j, j+1, …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorSeries {
    pub base_level: usize,
    /// Index into `hermitian_generators()` of `A_j` when the element is one.
    pub generator: Option<usize>,
    pub element: AlgebraElement,
    pub entries: Vec<CommutatorEntry>,
    /// Nondecreasing within `MONOTONE_SLACK`.
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorEntry {
    pub k: usize,
    pub norm: f64,
}

impl CommutatorSeries {
    pub fn sup(&self) -> f64 {
        self.entries.iter().map(|e| e.norm).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct St1Evidence {
    pub probe: GapProbe,
    pub threshold: f64,
    pub window: usize,
    /// Levels of the inspected tail (all `< J`).
    pub tail_levels: Vec<usize>,
    pub tail: Vec<f64>,
    pub last_value: Option<f64>,
    pub max_value: Option<f64>,
    pub nonincreasing: bool,
    pub nondecreasing: bool,
    /// `last / first` over the tail.
    pub tail_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvidence {
    pub base_level: usize,
    pub generator: Option<usize>,
    pub sup: f64,
    pub last_value: f64,
    pub monotone: bool,
    pub stable: bool,
    pub growing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct St2Evidence {
    pub window: usize,
    pub bound: Option<f64>,
    pub series: Vec<SeriesEvidence>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum Evidence {
    St1(St1Evidence),
    St2(St2Evidence),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub classification: Classification,
    pub evidence: Evidence,
    pub caveat: String,
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return validation(format!("λ = {lambda} is not finite"));
    }
    if lambda.im == 0.0 {
        return validation(format!("λ = {} is real; probes must lie in ℂ∖ℝ", lambda.re));
    }
    Ok(())
}

fn function_weights(eigenvalues: &[f64], f: &dyn Fn(f64) -> f64) -> Result<Vec<Complex64>> {
    eigenvalues
        .iter()
        .map(|&x| {
            let y = f(x);
            if y.is_finite() {
                Ok(Complex64::new(y, 0.0))
            } else {
                Err(Error::Numeric(format!("function is not finite at eigenvalue {x}")))
            }
        })
        .collect()
}

/// Operator norm of the `n × n` operator given by its action and the action
/// of its adjoint: dense for small `n`, Lanczos on `X*X` otherwise.
fn implicit_norm(
    n: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64> + Sync,
    apply_adjoint: impl Fn(&[Complex64]) -> Vec<Complex64> + Sync,
) -> f64 {
    if n <= DENSE_NORM_MAX_DIM {
        let columns: Vec<Vec<Complex64>> = (0..n)
            .map(|c| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[c] = Complex64::new(1.0, 0.0);
                apply(&e)
            })
            .collect();
        return operator_norm(&ComplexMatrix::from_columns(n, &columns));
    }
    lanczos_max_eigenvalue(n, |x| apply_adjoint(&apply(x))).max(0.0).sqrt()
}

/// `‖W diag(a) W* − U diag(b) U*‖` without forming either operator.
fn spectral_difference_norm(w: &ComplexMatrix, a: &[Complex64], u: &ComplexMatrix, b: &[Complex64]) -> f64 {
    let act = |x: &[Complex64], conj: bool| {
        let pick = |z: Complex64| if conj { z.conj() } else { z };
        let mut left: Vec<Complex64> = w.adjoint_mul_vec(x);
        left.iter_mut().zip(a).for_each(|(v, s)| *v *= pick(*s));
        let mut right: Vec<Complex64> = u.adjoint_mul_vec(x);
        right.iter_mut().zip(b).for_each(|(v, s)| *v *= pick(*s));
        let mut y = w.mul_vec(&left);
        y.iter_mut().zip(u.mul_vec(&right)).for_each(|(p, q)| *p -= q);
        y
    };
    implicit_norm(u.rows(), |x| act(x, false), |x| act(x, true))
}

fn direct_gap(r: &Realization, j: usize, weights: &dyn Fn(&[f64]) -> Result<Vec<Complex64>>) -> Result<f64> {
    r.check_level(j)?;
    if j == r.level() {
        // E_J = I: both operators are the same
        return Ok(0.0);
    }
    let level = r.level_spectrum(j)?;
    let ambient = r.ambient_spectrum();
    let a = weights(level.decomposition.eigenvalues())?;
    let b = weights(ambient.eigenvalues())?;
    Ok(spectral_difference_norm(&level.lifted, &a, ambient.eigenvectors(), &b))
}

fn eigen_gap(r: &Realization, j: usize, value: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let containment = r.cluster_containment(j)?;
    let d = r.ambient_spectrum();
    let contain = r.tolerances().contain;
    let mut sup: f64 = 0.0;
    for (g, range) in d.groups().iter().enumerate() {
        if containment[g] > contain {
            for &x in &d.eigenvalues()[range.clone()] {
                sup = sup.max(value(x)?);
            }
        }
    }
    Ok(sup)
}

/// `‖I_{j,J} R_λ(D_j) I_{j,J}* − R_λ(D_J)‖` by direct norm computation.
pub fn resolvent_gap(r: &Realization, j: usize, lambda: Complex64) -> Result<f64> {
    check_lambda(lambda)?;
    let tol = *r.tolerances();
    direct_gap(r, j, &|ev| resolvent_weights(ev, lambda, &tol))
}

/// `sup{|λ_n − λ|^{-1}}` over eigenvalue clusters of `D_J` whose
/// eigenprojection `Q` is not inside `range(P_j)`, i.e.
/// `‖Q − P_j Q‖ > contain_tol`; zero when every cluster is contained.
pub fn resolvent_gap_eigen(r: &Realization, j: usize, lambda: Complex64) -> Result<f64> {
    check_lambda(lambda)?;
    eigen_gap(r, j, &|x| Ok(1.0 / (Complex64::new(x, 0.0) - lambda).norm()))
}

/// `‖I_{j,J} f(D_j) I_{j,J}* − f(D_J)‖` for real `f` vanishing at infinity.
pub fn function_gap(r: &Realization, j: usize, f: &dyn Fn(f64) -> f64) -> Result<f64> {
    direct_gap(r, j, &|ev| function_weights(ev, f))
}

/// `sup{|f(λ_n)|}` over clusters of `D_J` not contained in `range(P_j)`.
pub fn function_gap_eigen(r: &Realization, j: usize, f: &dyn Fn(f64) -> f64) -> Result<f64> {
    eigen_gap(r, j, &|x| {
        let y = f(x);
        if y.is_finite() {
            Ok(y.abs())
        } else {
            Err(Error::Numeric(format!("function is not finite at eigenvalue {x}")))
        }
    })
}

/// Closed-form resolvent gap bounds of the two worked examples: `ℓ_j` for
/// the Cantor system (valid for purely imaginary `λ`), and
/// `max_{j<k≤J} |α_k − λ|^{-1}` for the AF system.
pub fn analytic_bound(r: &Realization, j: usize, probe: &GapProbe) -> Option<f64> {
    let GapProbe::Resolvent { lambda } = probe else {
        return None;
    };
    let lambda = Complex64::from(*lambda);
    match r.provenance() {
        Provenance::Cantor { gaps } if lambda.re == 0.0 && j < gaps.len() => Some(gaps.length(j)),
        Provenance::ChristensenIvan { alphas } if r.level() <= alphas.len() => Some(
            alphas[j..r.level()]
                .iter()
                .map(|&a| 1.0 / (Complex64::new(a, 0.0) - lambda).norm())
                .fold(0.0, f64::max),
        ),
        _ => None,
    }
}

/// Gap series over `levels` for one probe. Levels are evaluated in parallel
/// and returned in ascending order.
pub fn gap_series(r: &Realization, probe: &GapProbe, levels: RangeInclusive<usize>) -> Result<GapSeries> {
    if levels.is_empty() || *levels.end() > r.level() {
        return validation(format!(
            "level range {}..{} must be nonempty and end at most at {}",
            levels.start(),
            levels.end(),
            r.level()
        ));
    }
    let entries = levels
        .into_par_iter()
        .map(|j| {
            let (gap, eigen_gap) = match *probe {
                GapProbe::Resolvent { lambda } => {
                    let lambda = Complex64::from(lambda);
                    (resolvent_gap(r, j, lambda)?, resolvent_gap_eigen(r, j, lambda)?)
                }
                GapProbe::Function { name } => {
                    let f = |x| name.eval(x);
                    (function_gap(r, j, &f)?, function_gap_eigen(r, j, &f)?)
                }
            };
            Ok(GapEntry {
                j,
                gap,
                eigen_gap,
                cross_check: (gap - eigen_gap).abs(),
                analytic_bound: analytic_bound(r, j, probe),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GapSeries { probe: *probe, ambient_level: r.level(), entries })
}

/// `‖[D_k, π_k(φ_{j,k}(a))]‖` for `k = j..=k_max`.
pub fn commutator_series(s: &InductiveSystem, j: usize, a: &AlgebraElement, k_max: usize) -> Result<CommutatorSeries> {
    if j > k_max || k_max > s.top_level() {
        return validation(format!("need j ≤ k_max ≤ {}, got j = {j}, k_max = {k_max}", s.top_level()));
    }
    if a.algebra() != s.triple(j).algebra() {
        return validation(format!("element does not belong to A_{j}"));
    }
    let mut images = vec![a.clone()];
    for k in j..k_max {
        let next = hom_apply(&s.links()[k].phi, images.last().expect("nonempty"))?;
        images.push(next);
    }
    let entries = images
        .par_iter()
        .enumerate()
        .map(|(i, b)| Ok(CommutatorEntry { k: j + i, norm: commutator_norm(s.triple(j + i), b)? }))
        .collect::<Result<Vec<_>>>()?;
    let monotone = entries.windows(2).all(|w| w[1].norm >= w[0].norm - MONOTONE_SLACK * w[0].norm.max(1.0));
    Ok(CommutatorSeries { base_level: j, generator: None, element: a.clone(), entries, monotone })
}

/// Commutator series for the first `per_level` Hermitian generators of each
/// `A_j`, `j ∈ levels`, up to `k_max`.
pub fn generator_series(
    s: &InductiveSystem,
    levels: RangeInclusive<usize>,
    k_max: usize,
    per_level: usize,
) -> Result<Vec<CommutatorSeries>> {
    let probes: Vec<(usize, usize, AlgebraElement)> = levels
        .flat_map(|j| {
            s.triple(j.min(s.top_level()))
                .algebra()
                .hermitian_generators()
                .into_iter()
                .take(per_level)
                .enumerate()
                .map(move |(i, a)| (j, i, a))
        })
        .collect();
    probes
        .par_iter()
        .map(|(j, i, a)| {
            let mut series = commutator_series(s, *j, a, k_max)?;
            series.generator = Some(*i);
            Ok(series)
        })
        .collect()
}

fn nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + TREND_SLACK * w[0].abs().max(f64::MIN_POSITIVE))
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - TREND_SLACK * w[0].abs())
}

/// Heuristic ST1 classification from the last `window` gaps with `j < J`.
///
/// Consistent: the tail is nonincreasing and either ends below `threshold`
/// or has decayed to at most `DECAY_RATIO` of its first value.
/// Inconsistent: the tail stays at or above `threshold` and does not
/// decrease. Anything else, including tails shorter than two, is
/// inconclusive.
pub fn st1_verdict(series: &GapSeries, threshold: f64, window: usize) -> Verdict {
    let below: Vec<&GapEntry> = series.entries.iter().filter(|e| e.j < series.ambient_level).collect();
    let tail = &below[below.len().saturating_sub(window.max(1))..];
    let values: Vec<f64> = tail.iter().map(|e| e.gap).collect();
    let first = values.first().copied();
    let last = values.last().copied();
    let max = values.iter().copied().reduce(f64::max);
    let min = values.iter().copied().reduce(f64::min);
    let down = nonincreasing(&values);
    let up = nondecreasing(&values);
    let classification = match (first, last, min) {
        (Some(f), Some(l), Some(m)) if values.len() >= 2 => {
            if down && (l < threshold || l <= DECAY_RATIO * f) {
                Classification::Consistent
            } else if m >= threshold && up {
                Classification::Inconsistent
            } else {
                Classification::Inconclusive
            }
        }
        _ => Classification::Inconclusive,
    };
    Verdict {
        classification,
        evidence: Evidence::St1(St1Evidence {
            probe: series.probe,
            threshold,
            window,
            tail_levels: tail.iter().map(|e| e.j).collect(),
            tail: values.clone(),
            last_value: last,
            max_value: max,
            nonincreasing: down,
            nondecreasing: up,
            tail_ratio: match (first, last) {
                (Some(f), Some(l)) if f > 0.0 => Some(l / f),
                _ => None,
            },
        }),
        caveat: CAVEAT.to_string(),
    }
}

/// Heuristic ST2 classification of commutator series.
///
/// A series tail (last `window` entries) is stable when it varies by at
/// most `1e-9` relative and growing when it strictly increases. Inconsistent
/// if some series grows past `bound` (or grows at all without a bound);
/// consistent if every series is stable or stays within `bound`.
pub fn st2_verdict(series: &[CommutatorSeries], window: usize, bound: Option<f64>) -> Verdict {
    let evidence: Vec<SeriesEvidence> = series
        .iter()
        .filter(|s| s.entries.len() >= 2)
        .map(|s| {
            let norms: Vec<f64> = s.entries.iter().map(|e| e.norm).collect();
            let tail = &norms[norms.len().saturating_sub(window.max(2))..];
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            SeriesEvidence {
                base_level: s.base_level,
                generator: s.generator,
                sup: s.sup(),
                last_value: *norms.last().expect("nonempty"),
                monotone: s.monotone,
                stable: hi - lo <= MONOTONE_SLACK * hi.abs().max(1.0),
                growing: tail.windows(2).all(|w| w[1] > w[0] + MONOTONE_SLACK * w[0].abs().max(1.0)),
            }
        })
        .collect();
    let within = |e: &SeriesEvidence| bound.is_some_and(|b| e.sup <= b);
    let classification = if evidence.is_empty() {
        Classification::Inconclusive
    } else if evidence.iter().any(|e| e.growing && !within(e)) {
        Classification::Inconsistent
    } else if evidence.iter().all(|e| e.stable || within(e)) {
        Classification::Consistent
    } else {
        Classification::Inconclusive
    };
    Verdict {
        classification,
        evidence: Evidence::St2(St2Evidence { window, bound, series: evidence }),
        caveat: CAVEAT.to_string(),
    }
}

/// `‖I_{j,J} R_λ(D_j) I_{j,J}* − P_j R_λ(D_J) P_j‖`.
pub fn strong_resolvent_residual(r: &Realization, j: usize, lambda: Complex64) -> Result<f64> {
    check_lambda(lambda)?;
    let tol = *r.tolerances();
    let level = r.level_spectrum(j)?;
    let ambient = r.ambient_spectrum();
    let a = resolvent_weights(level.decomposition.eigenvalues(), lambda, &tol)?;
    let b = resolvent_weights(ambient.eigenvalues(), lambda, &tol)?;
    let e = r.embedding(j).matrix();
    let w = &level.lifted;
    let u = ambient.eigenvectors();
    let act = |x: &[Complex64], conj: bool| {
        let pick = |z: Complex64| if conj { z.conj() } else { z };
        let mut left = w.adjoint_mul_vec(x);
        left.iter_mut().zip(&a).for_each(|(v, s)| *v *= pick(*s));
        let px = e.mul_vec(&e.adjoint_mul_vec(x));
        let mut mid = u.adjoint_mul_vec(&px);
        mid.iter_mut().zip(&b).for_each(|(v, s)| *v *= pick(*s));
        let right = u.mul_vec(&mid);
        let right = e.mul_vec(&e.adjoint_mul_vec(&right));
        let mut y = w.mul_vec(&left);
        y.iter_mut().zip(right).for_each(|(p, q)| *p -= q);
        y
    };
    Ok(implicit_norm(r.dim(), |x| act(x, false), |x| act(x, true)))
}

/// Residuals of the padded resolvent identity at level `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaddedResolventResidual {
    /// `‖R_λ(E D_j E*) − E R_λ(D_j) E* + λ^{-1} P_j^⊥‖`.
    pub corrected: f64,
    /// `‖R_λ(E D_j E*) − E R_λ(D_j) E* − λ P_j^⊥‖`.
    pub printed: f64,
}

/// Compares the resolvent of the zero-padded operator `E D_j E*`, computed
/// from its own dense eigendecomposition, with `E R_λ(D_j) E*` plus a
/// multiple of `P_j^⊥`. Dense `O(N³)` in the ambient dimension.
pub fn padded_resolvent_residual(r: &Realization, j: usize, lambda: Complex64) -> Result<PaddedResolventResidual> {
    check_lambda(lambda)?;
    r.check_level(j)?;
    let tol = r.tolerances();
    let e = r.embedding(j);
    let padded = HermitianOperator::from_matrix_unchecked(e.push_forward(r.triple(j).dirac().matrix())?.hermitian_part());
    let lhs = resolvent(&padded, lambda, tol)?;
    let inner = resolvent(r.triple(j).dirac(), lambda, tol)?;
    let lifted = e.push_forward(&inner)?;
    let n = r.dim();
    let complement = &ComplexMatrix::identity(n) - e.range_projection().matrix();
    let base = &lhs - &lifted;
    let corrected = &base + &complement.scale(lambda.inv());
    let printed = &base - &complement.scale(lambda);
    Ok(PaddedResolventResidual { corrected: operator_norm(&corrected), printed: operator_norm(&printed) })
}

/// `‖[P_k, [D_J, π_J(φ_{j,J}(a))]]‖` for `a ∈ A_j`.
pub fn projection_commutator_residual(r: &Realization, j: usize, a: &AlgebraElement, k: usize) -> Result<f64> {
    r.check_level(j)?;
    r.check_level(k)?;
    let image = hom_apply(r.phi(j), a)?;
    let c = commutator_with_dirac(r.ambient(), &image)?;
    let e = r.embedding(k);
    let pc = e.project(&c)?;
    let cp = c.checked_mul(e.matrix())?.checked_mul(&e.matrix().adjoint())?;
    Ok(operator_norm(&(&pc - &cp)))
}
