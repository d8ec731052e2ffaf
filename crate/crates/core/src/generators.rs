//! Generators for the worked examples: the Cantor-set system built from a
//! gap sequence and the AF-algebra system built from a chain of finite
//! C*-algebras with a faithful state, plus synthetic systems used as
//! controls and test inputs.
//!
//! Cantor basis order: at every level the basis vector `2n` is `δ` at the
//! right gap endpoint `x_{n,+}` and `2n + 1` is `δ` at the left endpoint
//! `x_{n,−}`; the point `m` of `Λ_j` is `x_{m,+}`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{gns, hom_validate, subspace_basis, FiniteCStarAlgebra, State, StarHomomorphism};
use crate::error::{validation, Result};
use crate::inductive::{InductiveSystem, Link, Provenance};
use crate::operator::{ComplexMatrix, HermitianOperator, Isometry};
use crate::tolerance::Tolerances;
use crate::triple::{FiniteSpectralTriple, Representation};

/// Relative slack when checking that gap lengths do not increase; lengths
/// are differences of rounded endpoints.
const LENGTH_ORDER_SLACK: f64 = 1e-12;

/// Gap data of a Cantor set `Λ = [x_{0,+}, x_{0,−}] ∖ ⋃_{n≥1} (x_{n,−}, x_{n,+})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GapRepr", into = "GapRepr")]
pub struct GapSequence {
    x0_plus: f64,
    x0_minus: f64,
    /// `(x_{n,−}, x_{n,+})` for `n ≥ 1`.
    gaps: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct GapRepr {
    x0_plus: f64,
    x0_minus: f64,
    gaps: Vec<[f64; 2]>,
}

impl TryFrom<GapRepr> for GapSequence {
    type Error = crate::Error;

    fn try_from(r: GapRepr) -> Result<Self> {
        GapSequence::new(r.x0_plus, r.x0_minus, r.gaps.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<GapSequence> for GapRepr {
    fn from(g: GapSequence) -> Self {
        Self { x0_plus: g.x0_plus, x0_minus: g.x0_minus, gaps: g.gaps.into_iter().map(|(a, b)| [a, b]).collect() }
    }
}

impl GapSequence {
    /// Validates ordering, containment, disjointness and nonincreasing
    /// lengths (`ℓ_0 = x0_minus − x0_plus` included).
    pub fn new(x0_plus: f64, x0_minus: f64, gaps: Vec<(f64, f64)>) -> Result<Self> {
        if !(x0_plus.is_finite() && x0_minus.is_finite() && x0_plus < x0_minus) {
            return validation(format!("hull [{x0_plus}, {x0_minus}] must be a nondegenerate interval"));
        }
        for (i, &(a, b)) in gaps.iter().enumerate() {
            let n = i + 1;
            if a.is_nan() || b.is_nan() || a >= b {
                return validation(format!("gap {n} = ({a}, {b}) is empty"));
            }
            if !(x0_plus < a && b < x0_minus) {
                return validation(format!("gap {n} = ({a}, {b}) is not inside ({x0_plus}, {x0_minus})"));
            }
        }
        let mut sorted = gaps.clone();
        sorted.sort_by(|p, q| p.0.total_cmp(&q.0));
        if let Some(w) = sorted.windows(2).find(|w| w[0].1 >= w[1].0) {
            return validation(format!(
                "gaps ({}, {}) and ({}, {}) overlap or share an endpoint",
                w[0].0, w[0].1, w[1].0, w[1].1
            ));
        }
        let g = Self { x0_plus, x0_minus, gaps };
        let lengths = g.lengths();
        if let Some(n) = (1..lengths.len()).find(|&n| lengths[n] > lengths[n - 1] * (1.0 + LENGTH_ORDER_SLACK)) {
            return validation(format!(
                "gap lengths must not increase: ℓ_{n} = {} > ℓ_{} = {}",
                lengths[n],
                n - 1,
                lengths[n - 1]
            ));
        }
        Ok(g)
    }

    /// Number of gaps counting `n = 0`.
    pub fn len(&self) -> usize {
        self.gaps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `x_{n,+}`.
    pub fn plus(&self, n: usize) -> f64 {
        if n == 0 {
            self.x0_plus
        } else {
            self.gaps[n - 1].1
        }
    }

    /// `x_{n,−}`.
    pub fn minus(&self, n: usize) -> f64 {
        if n == 0 {
            self.x0_minus
        } else {
            self.gaps[n - 1].0
        }
    }

    /// `ℓ_n = x_{n,+} − x_{n,−}` for `n ≥ 1`, `ℓ_0 = x_{0,−} − x_{0,+}`.
    pub fn length(&self, n: usize) -> f64 {
        if n == 0 {
            self.x0_minus - self.x0_plus
        } else {
            self.plus(n) - self.minus(n)
        }
    }

    pub fn lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.length(n)).collect()
    }

    /// `θ_j(x) = max{x_{m,+} ≤ x : m ≤ j}`, returned as the index `m`.
    pub fn theta(&self, j: usize, x: f64) -> Result<usize> {
        if j >= self.len() {
            return validation(format!("level {j} needs {} gaps, only {} available", j + 1, self.len()));
        }
        (0..=j)
            .filter(|&m| self.plus(m) <= x)
            .max_by(|&a, &b| self.plus(a).total_cmp(&self.plus(b)))
            .ok_or_else(|| crate::Error::Validation(format!("{x} lies below x_(0,+) = {}", self.x0_plus)))
    }

    /// Coordinates of the points `x_{m,+}`, `m ≤ j`, of `Λ_j`.
    pub fn level_points(&self, j: usize) -> Vec<f64> {
        (0..=j).map(|m| self.plus(m)).collect()
    }

    /// Coordinates of the basis `E_j` in basis order.
    pub fn level_basis(&self, j: usize) -> Vec<f64> {
        (0..=j).flat_map(|n| [self.plus(n), self.minus(n)]).collect()
    }

    /// The first `count` gaps (including `n = 0`).
    pub fn truncate(&self, count: usize) -> Self {
        Self { x0_plus: self.x0_plus, x0_minus: self.x0_minus, gaps: self.gaps[..count.saturating_sub(1)].to_vec() }
    }
}

/// Middle-thirds Cantor set on `[0, 1]` with gaps `1..=levels`, in
/// nonincreasing length order with ties broken by ascending left endpoint.
///
/// Gap `n ≥ 1` sits at depth `k = ⌊log₂ n⌋ + 1` and is the middle third of
/// the `(n − 2^{k−1})`-th interval of the depth-`k−1` construction.
pub fn middle_thirds(levels: usize) -> GapSequence {
    let gaps = (1..=levels)
        .map(|n| {
            let k = usize::BITS - n.leading_zeros();
            let i = n - (1 << (k - 1));
            // left end of interval i at depth k−1, times 3^{k−1}: ternary
            // digits 0/2 given by the bits of i
            let mut a: u128 = 0;
            for bit in (0..k - 1).rev() {
                a = 3 * a + 2 * ((i >> bit) & 1) as u128;
            }
            let scale = 3f64.powi(k as i32);
            ((3 * a + 1) as f64 / scale, (3 * a + 2) as f64 / scale)
        })
        .collect();
    GapSequence::new(0.0, 1.0, gaps).expect("middle-thirds gaps are valid")
}

/// Cantor system with levels `0..=levels`: `D_j ξ(x_{n,±}) = ξ(x_{n,∓})/ℓ_n`,
/// `π_j(f) ξ(x) = f(θ_j(x)) ξ(x)`, and `I_{j,j+1}` the coordinate inclusion.
/// With `grading`, the swap `γ ξ(x_{n,±}) = ξ(x_{n,∓})` is attached.
pub fn cantor_system(g: &GapSequence, levels: usize, grading: bool) -> Result<InductiveSystem> {
    if g.len() < levels + 1 {
        return validation(format!("{levels} levels need {} gaps, the sequence has {}", levels + 1, g.len()));
    }
    let tol = Tolerances::default();
    let mut triples = Vec::with_capacity(levels + 1);
    for j in 0..=levels {
        triples.push(Arc::new(cantor_triple(g, j, grading, &tol)?));
    }
    let mut links = Vec::with_capacity(levels);
    for j in 0..levels {
        let map = (0..=j + 1).map(|t| g.theta(j, g.plus(t))).collect::<Result<Vec<_>>>()?;
        let phi = StarHomomorphism::spectrum_map(j + 1, map)?;
        let inclusion = ComplexMatrix::from_fn(2 * (j + 2), 2 * (j + 1), |r, c| real(if r == c { 1.0 } else { 0.0 }));
        links.push(Link { phi, iso: Isometry::new(inclusion, &tol)? });
    }
    InductiveSystem::new(triples, links, Provenance::Cantor { gaps: g.truncate(levels + 1) })
}

fn cantor_triple(g: &GapSequence, j: usize, grading: bool, tol: &Tolerances) -> Result<FiniteSpectralTriple> {
    let n = 2 * (j + 1);
    let mut d = ComplexMatrix::zeros(n, n);
    let mut swap = ComplexMatrix::zeros(n, n);
    let mut labels = Vec::with_capacity(n);
    for m in 0..=j {
        let inv = 1.0 / g.length(m);
        d[(2 * m, 2 * m + 1)] = real(inv);
        d[(2 * m + 1, 2 * m)] = real(inv);
        swap[(2 * m, 2 * m + 1)] = real(1.0);
        swap[(2 * m + 1, 2 * m)] = real(1.0);
        labels.push(g.theta(j, g.plus(m))?);
        labels.push(g.theta(j, g.minus(m))?);
    }
    let gamma = if grading { Some(HermitianOperator::new(swap, tol)?) } else { None };
    FiniteSpectralTriple::new(
        FiniteCStarAlgebra::commutative(j + 1)?,
        Representation::Diagonal { labels },
        HermitianOperator::new(d, tol)?,
        gamma,
    )
}

/// `ℂ = A_0 ⊆ A_1 ⊆ … ⊆ A_top` with a faithful state on `A_top` and nonzero
/// reals `α_1, …, α_top`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AfChain {
    algebras: Vec<FiniteCStarAlgebra>,
    inclusions: Vec<StarHomomorphism>,
    state: State,
    alphas: Vec<f64>,
}

impl AfChain {
    pub fn new(
        algebras: Vec<FiniteCStarAlgebra>,
        inclusions: Vec<StarHomomorphism>,
        state: State,
        alphas: Vec<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if algebras.first().map(FiniteCStarAlgebra::dim) != Some(1) {
            return validation("the chain must start with A_0 = ℂ");
        }
        if inclusions.len() + 1 != algebras.len() {
            return validation(format!("{} algebras need {} inclusions", algebras.len(), algebras.len() - 1));
        }
        for (i, phi) in inclusions.iter().enumerate() {
            if phi.source() != algebras[i] || phi.target() != algebras[i + 1] {
                return validation(format!("inclusion {i} does not map A_{i} into A_{}", i + 1));
            }
            let report = hom_validate(phi, tol);
            if !report.passed {
                return validation(format!("inclusion {i}: {}", report.failures.join(", ")));
            }
        }
        if state.algebra() != algebras.last().expect("nonempty") {
            return validation("the state must live on the top algebra");
        }
        if alphas.len() != inclusions.len() {
            return validation(format!("{} levels need {} alphas, got {}", inclusions.len(), inclusions.len(), alphas.len()));
        }
        if let Some(i) = alphas.iter().position(|a| *a == 0.0 || !a.is_finite()) {
            return validation(format!("alpha_{} must be a nonzero real", i + 1));
        }
        Ok(Self { algebras, inclusions, state, alphas })
    }

    pub fn top(&self) -> usize {
        self.algebras.len() - 1
    }

    pub fn algebras(&self) -> &[FiniteCStarAlgebra] {
        &self.algebras
    }

    pub fn inclusions(&self) -> &[StarHomomorphism] {
        &self.inclusions
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    /// `α_1, …, α_top`.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

/// Commutative chain `ℂ^{n_0} ⊆ ℂ^{n_1} ⊆ …` from point surjections
/// `surjections[i]: points of level i+1 → points of level i`, with point
/// weights on the top level.
pub fn commutative_af_chain(surjections: &[Vec<usize>], weights: &[f64], alphas: &[f64]) -> Result<AfChain> {
    let tol = Tolerances::default();
    let mut algebras = vec![FiniteCStarAlgebra::commutative(1)?];
    let mut inclusions = Vec::with_capacity(surjections.len());
    for (i, map) in surjections.iter().enumerate() {
        let below = algebras.last().expect("nonempty").dim();
        let mut hit = vec![false; below];
        for &s in map {
            if s >= below {
                return validation(format!("map {i} sends a point to {s}, level {i} has {below} points"));
            }
            hit[s] = true;
        }
        if let Some(p) = hit.iter().position(|h| !h) {
            return validation(format!("map {i} is not surjective: point {p} of level {i} has an empty fiber"));
        }
        inclusions.push(StarHomomorphism::spectrum_map(below, map.clone())?);
        algebras.push(FiniteCStarAlgebra::commutative(map.len())?);
    }
    if weights.len() != algebras.last().expect("nonempty").dim() {
        return validation(format!("the top level has {} points, got {} weights", algebras.last().unwrap().dim(), weights.len()));
    }
    if let Some(p) = weights.iter().position(|w| w.is_nan() || *w <= 0.0) {
        return validation(format!("state is not faithful: weight of point {p} is {}", weights[p]));
    }
    let state = State::from_weights(weights, &tol)?;
    AfChain::new(algebras, inclusions, state, alphas.to_vec(), &tol)
}

/// Binary tree chain `ℂ ⊆ ℂ² ⊆ ℂ⁴ ⊆ …` with the uniform state.
pub fn binary_chain(alphas: &[f64]) -> Result<AfChain> {
    let levels = alphas.len();
    let surjections: Vec<Vec<usize>> = (1..=levels).map(|i| (0..1usize << i).map(|t| t / 2).collect()).collect();
    let top = 1usize << levels;
    commutative_af_chain(&surjections, &vec![1.0 / top as f64; top], alphas)
}

/// `ℂ ⊆ M_2` with the normalized trace.
pub fn matrix_chain(alpha: f64) -> Result<AfChain> {
    let tol = Tolerances::default();
    let one = FiniteCStarAlgebra::commutative(1)?;
    let m2 = FiniteCStarAlgebra::full_matrix(2)?;
    let unit = ComplexMatrix::from_fn(4, 1, |r, _| real(if r == 0 || r == 3 { 1.0 } else { 0.0 }));
    let inclusion = StarHomomorphism::explicit_linear(one.clone(), m2.clone(), unit)?;
    let state = State::normalized_trace(&m2);
    AfChain::new(vec![one, m2], vec![inclusion], state, vec![alpha], &tol)
}

/// AF system with levels `0..=levels`: `H_j = η(A_j)` inside the GNS space
/// of `A_levels`, `D_j = Σ_{i≤j} α_i (P_i − P_{i−1})` restricted to `H_j`,
/// `π_j` the restricted left multiplication and `I_{j,j+1}` the inclusion
/// `H_j ⊆ H_{j+1}`.
pub fn ci_system(chain: &AfChain, levels: usize, tol: &Tolerances) -> Result<InductiveSystem> {
    if levels > chain.top() {
        return validation(format!("{levels} levels requested, the chain has {}", chain.top()));
    }
    // ψ_{j,J}: A_j → A_J
    let mut psis = vec![StarHomomorphism::identity(&chain.algebras[levels])];
    for j in (0..levels).rev() {
        let next = chain.inclusions[j].then(psis.last().expect("nonempty"))?;
        psis.push(next);
    }
    psis.reverse();
    let mut state = chain.state.clone();
    for i in (levels..chain.top()).rev() {
        state = state.pullback(&chain.inclusions[i], tol)?;
    }
    let ambient_algebra = &chain.algebras[levels];
    let g = gns(ambient_algebra, &state)?;
    let rep = g.representation();
    let bases = psis.iter().map(|psi| subspace_basis(&g, psi, tol)).collect::<Result<Vec<_>>>()?;
    let projections: Vec<ComplexMatrix> = bases.iter().map(|v| v.range_projection().into_matrix()).collect();

    let n = g.dim();
    let mut d = ComplexMatrix::zeros(n, n);
    for i in 1..=levels {
        let step = &projections[i] - &projections[i - 1];
        d = &d + &step.scale_real(chain.alphas[i - 1]);
    }

    let mut triples = Vec::with_capacity(levels + 1);
    for (j, v) in bases.iter().enumerate() {
        let dj = v.compress(&d)?.hermitian_part();
        let pi = rep.restrict(ambient_algebra, &psis[j], v)?;
        triples.push(Arc::new(FiniteSpectralTriple::new(
            chain.algebras[j].clone(),
            pi,
            HermitianOperator::new(dj, tol)?,
            None,
        )?));
    }
    let links = (0..levels)
        .map(|j| {
            let iso = bases[j + 1].matrix().adjoint().checked_mul(bases[j].matrix())?;
            Ok(Link { phi: chain.inclusions[j].clone(), iso: Isometry::from_matrix_unchecked(iso) })
        })
        .collect::<Result<Vec<_>>>()?;
    InductiveSystem::new(triples, links, Provenance::ChristensenIvan { alphas: chain.alphas[..levels].to_vec() })
}

/// Negative control for the bounded-commutator condition: `A_k = ℂ²` acting
/// on `ℂ^{2(k+1)}` with basis vector `i` over point `i mod 2`, and
/// `D_k = ⊕_{n≤k} (n+1) σ_x`. Every link is a valid isometric morphism, yet
/// `‖[D_k, π(δ_0)]‖ = k + 1` grows linearly.
pub fn growing_commutator_system(levels: usize) -> Result<InductiveSystem> {
    let tol = Tolerances::default();
    let triples = (0..=levels)
        .map(|k| {
            let n = 2 * (k + 1);
            let mut d = ComplexMatrix::zeros(n, n);
            for m in 0..=k {
                d[(2 * m, 2 * m + 1)] = real((m + 1) as f64);
                d[(2 * m + 1, 2 * m)] = real((m + 1) as f64);
            }
            Ok(Arc::new(FiniteSpectralTriple::new(
                FiniteCStarAlgebra::commutative(2)?,
                Representation::Diagonal { labels: (0..n).map(|i| i % 2).collect() },
                HermitianOperator::new(d, &tol)?,
                None,
            )?))
        })
        .collect::<Result<Vec<_>>>()?;
    let links = (0..levels)
        .map(|k| {
            let inclusion = ComplexMatrix::from_fn(2 * (k + 2), 2 * (k + 1), |r, c| real(if r == c { 1.0 } else { 0.0 }));
            Ok(Link { phi: StarHomomorphism::spectrum_map(2, vec![0, 1])?, iso: Isometry::new(inclusion, &tol)? })
        })
        .collect::<Result<Vec<_>>>()?;
    InductiveSystem::new(triples, links, Provenance::LinearGrowth)
}

/// Random valid commutative system with levels `0..=levels` and Hilbert
/// dimension at most `max_dim`.
///
/// Each level refines the points of the previous one along a random
/// surjection, lifts the old basis vectors into the fibers over their
/// points, and appends new basis vectors carrying a random Hermitian block:
/// `D_{k+1} = D_k ⊕ E_k`. Generation stops early when the next level would
/// exceed `max_dim`.
pub fn random_commutative_system(rng: &mut impl Rng, levels: usize, max_dim: usize) -> Result<InductiveSystem> {
    let tol = Tolerances::default();
    let points0 = rng.random_range(1..=3usize);
    let dim0 = (points0 + rng.random_range(0..=2usize)).min(max_dim).max(points0);
    let mut labels: Vec<usize> = (0..dim0).map(|i| if i < points0 { i } else { rng.random_range(0..points0) }).collect();
    labels.shuffle(rng);
    let mut points = points0;
    let mut d = random_hermitian(rng, dim0);
    let mut triples = vec![Arc::new(FiniteSpectralTriple::new(
        FiniteCStarAlgebra::commutative(points)?,
        Representation::Diagonal { labels: labels.clone() },
        HermitianOperator::new(d.clone(), &tol)?,
        None,
    )?)];
    let mut links = Vec::new();
    for _ in 0..levels {
        let extra = rng.random_range(0..=2usize);
        let next_points = points + extra;
        let theta: Vec<usize> =
            (0..next_points).map(|t| if t < points { t } else { rng.random_range(0..points) }).collect();
        let mut next_labels: Vec<usize> = labels
            .iter()
            .map(|&p| {
                let fiber: Vec<usize> = (0..next_points).filter(|&t| theta[t] == p).collect();
                fiber[rng.random_range(0..fiber.len())]
            })
            .collect();
        let mut uncovered: Vec<usize> = (0..next_points).filter(|t| !next_labels.contains(t)).collect();
        let fresh = rng.random_range(1..=3usize).max(uncovered.len());
        if labels.len() + fresh > max_dim {
            break;
        }
        for _ in 0..fresh {
            next_labels.push(uncovered.pop().unwrap_or_else(|| rng.random_range(0..next_points)));
        }
        let old = d.rows();
        let n = old + fresh;
        let block = random_hermitian(rng, fresh);
        d = ComplexMatrix::from_fn(n, n, |r, c| match (r < old, c < old) {
            (true, true) => d[(r, c)],
            (false, false) => block[(r - old, c - old)],
            _ => Complex64::new(0.0, 0.0),
        });
        triples.push(Arc::new(FiniteSpectralTriple::new(
            FiniteCStarAlgebra::commutative(next_points)?,
            Representation::Diagonal { labels: next_labels.clone() },
            HermitianOperator::new(d.clone(), &tol)?,
            None,
        )?));
        let inclusion = ComplexMatrix::from_fn(n, old, |r, c| real(if r == c { 1.0 } else { 0.0 }));
        links.push(Link { phi: StarHomomorphism::spectrum_map(points, theta)?, iso: Isometry::new(inclusion, &tol)? });
        labels = next_labels;
        points = next_points;
    }
    InductiveSystem::new(triples, links, Provenance::Random)
}

/// Hermitian matrix with entries uniform in the unit square, scaled by 3.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))
    });
    raw.hermitian_part()
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
