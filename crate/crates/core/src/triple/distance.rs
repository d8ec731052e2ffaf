//! Spectral distance `d(x, y) = sup{|f(x) − f(y)| : f real, ‖[D, π(f)]‖ ≤ 1}`
//! on commutative triples.
//!
//! With basis vector `i` over point `labels[i]`, the commutator of a real
//! function is `C(f)_kl = D_kl (f_{labels[l]} − f_{labels[k]})`. When the
//! cross-point entries of `D` form a matching, `C(f)` splits into 2×2
//! blocks and the constraint becomes `|f_p − f_q| ≤ 1/|D_kl|` per entry, so
//! `d` is a shortest-path length. Otherwise the norm ball is approximated by
//! a cutting-plane LP.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, SolveOutcome};
use num_complex::Complex64;
use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

use super::FiniteSpectralTriple;
use crate::error::{validation, Error, Result};
use crate::operator::{top_singular_pair, ComplexMatrix};

const CUTTING_PLANE_MAX_ITERATIONS: usize = 200;
const CUTTING_PLANE_RELATIVE_GAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    /// Shortest path when the constraints decouple, cutting plane otherwise.
    #[default]
    Auto,
    ShortestPath,
    CuttingPlane,
}

/// Result of a distance computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    /// `f64::INFINITY` when `x` and `y` lie in different components of the
    /// constraint graph.
    pub value: f64,
    /// Certified feasible value; equals `value`.
    pub lower: f64,
    /// Relaxation value; equals `value` for shortest paths.
    pub upper: f64,
    pub method: DistanceMethod,
    /// Points along a certifying shortest path.
    pub path: Option<Vec<usize>>,
    pub iterations: usize,
    pub converged: bool,
}

impl Distance {
    fn exact(value: f64, method: DistanceMethod, path: Option<Vec<usize>>) -> Self {
        Self { value, lower: value, upper: value, method, path, iterations: 0, converged: true }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

pub fn connes_distance(t: &FiniteSpectralTriple, x: usize, y: usize) -> Result<Distance> {
    connes_distance_with(t, x, y, DistanceMethod::Auto)
}

pub fn connes_distance_with(
    t: &FiniteSpectralTriple,
    x: usize,
    y: usize,
    method: DistanceMethod,
) -> Result<Distance> {
    let Some(labels) = t.representation().point_labels(t.algebra(), 1e-12) else {
        return Err(Error::Unsupported(
            "spectral distance needs a commutative algebra acting diagonally".to_string(),
        ));
    };
    let points = t.algebra().dim();
    if x >= points || y >= points {
        return validation(format!("points {x}, {y} out of range for {points} points"));
    }
    let d = t.dirac().matrix();
    let cross = cross_entries(d, &labels);
    let decoupled = is_matching(&cross, d.rows());
    let method = match method {
        DistanceMethod::Auto if decoupled => DistanceMethod::ShortestPath,
        DistanceMethod::Auto => DistanceMethod::CuttingPlane,
        DistanceMethod::ShortestPath if !decoupled => {
            return Err(Error::Unsupported(
                "commutator constraints do not decouple into pairwise bounds".to_string(),
            ))
        }
        m => m,
    };
    if x == y {
        return Ok(Distance::exact(0.0, method, Some(vec![x])));
    }
    let bounds = pair_bounds(&cross, &labels, d);
    match method {
        DistanceMethod::ShortestPath => Ok(shortest_path(points, &bounds, x, y)),
        _ => cutting_plane(d, &labels, points, &bounds, x, y),
    }
}

/// Entries `(k, l)`, `k < l`, of `D` joining basis vectors over different
/// points.
fn cross_entries(d: &ComplexMatrix, labels: &[usize]) -> Vec<(usize, usize)> {
    let n = d.rows();
    let mut out = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            if labels[k] != labels[l] && (d[(k, l)] != Complex64::new(0.0, 0.0) || d[(l, k)] != Complex64::new(0.0, 0.0)) {
                out.push((k, l));
            }
        }
    }
    out
}

fn is_matching(entries: &[(usize, usize)], n: usize) -> bool {
    let mut used = vec![false; n];
    for &(k, l) in entries {
        if used[k] || used[l] {
            return false;
        }
        used[k] = true;
        used[l] = true;
    }
    true
}

/// `(p, q, w)`: every entry over `{p, q}` gives `|f_p − f_q| ≤ 1/|D_kl|`; `w`
/// is the largest such `|D_kl|`.
fn pair_bounds(entries: &[(usize, usize)], labels: &[usize], d: &ComplexMatrix) -> Vec<(usize, usize, f64)> {
    let mut out: Vec<(usize, usize, f64)> = Vec::new();
    for &(k, l) in entries {
        let (p, q) = (labels[k].min(labels[l]), labels[k].max(labels[l]));
        let w = d[(k, l)].norm().max(d[(l, k)].norm());
        match out.iter_mut().find(|e| e.0 == p && e.1 == q) {
            Some(e) => e.2 = e.2.max(w),
            None => out.push((p, q, w)),
        }
    }
    out
}

fn shortest_path(points: usize, bounds: &[(usize, usize, f64)], x: usize, y: usize) -> Distance {
    let mut g = UnGraph::<(), f64>::with_capacity(points, bounds.len());
    let nodes: Vec<NodeIndex> = (0..points).map(|_| g.add_node(())).collect();
    for &(p, q, w) in bounds {
        g.add_edge(nodes[p], nodes[q], 1.0 / w);
    }
    match astar(&g, nodes[x], |n| n == nodes[y], |e| *e.weight(), |_| 0.0) {
        Some((cost, path)) => Distance::exact(
            cost,
            DistanceMethod::ShortestPath,
            Some(path.into_iter().map(NodeIndex::index).collect()),
        ),
        None => Distance::exact(f64::INFINITY, DistanceMethod::ShortestPath, None),
    }
}

fn component(points: usize, bounds: &[(usize, usize, f64)], start: usize) -> Vec<bool> {
    let mut seen = vec![false; points];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(p) = stack.pop() {
        for &(a, b, _) in bounds {
            let next = if a == p { b } else if b == p { a } else { continue };
            if !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    seen
}

/// Kelley's cutting-plane method on `max f_x − f_y` over the norm ball.
///
/// Starts from the entrywise bounds `|D_kl| |f_p − f_q| ≤ 1`, which contain
/// the ball since every entry is bounded by the norm. Each round adds the
/// supporting half-space `Re⟨u, C(f) v⟩ ≤ 1` at the top singular pair of the
/// current LP optimum. The LP value is an upper bound and the rescaled
/// optimum `f / max(1, ‖C(f)‖)` a feasible lower bound.
fn cutting_plane(
    d: &ComplexMatrix,
    labels: &[usize],
    points: usize,
    bounds: &[(usize, usize, f64)],
    x: usize,
    y: usize,
) -> Result<Distance> {
    let reach = component(points, bounds, x);
    if !reach[y] {
        return Ok(Distance::exact(f64::INFINITY, DistanceMethod::CuttingPlane, None));
    }
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<Option<microlp::Variable>> = (0..points)
        .map(|p| {
            reach[p].then(|| {
                let obj = if p == x { 1.0 } else { 0.0 };
                let range = if p == y { (0.0, 0.0) } else { (f64::NEG_INFINITY, f64::INFINITY) };
                problem.add_var(obj, range)
            })
        })
        .collect();
    for &(p, q, w) in bounds {
        let (Some(vp), Some(vq)) = (vars[p], vars[q]) else { continue };
        problem.add_constraint([(vp, 1.0), (vq, -1.0)], ComparisonOp::Le, 1.0 / w);
        problem.add_constraint([(vp, -1.0), (vq, 1.0)], ComparisonOp::Le, 1.0 / w);
    }
    let lp_error = |e: microlp::Error| Error::Numeric(format!("distance LP failed: {e}"));
    let mut solution = match problem.solve().map_err(lp_error)? {
        SolveOutcome::Solution(s) => s,
        SolveOutcome::Interrupted(_) => return Err(Error::Numeric("distance LP interrupted".to_string())),
    };
    let n = d.rows();
    let mut lower: f64 = 0.0;
    let mut upper = f64::INFINITY;
    for iteration in 1..=CUTTING_PLANE_MAX_ITERATIONS {
        let f: Vec<f64> = (0..points).map(|p| vars[p].map_or(0.0, |v| solution.var_value(v))).collect();
        upper = solution.objective();
        let c = ComplexMatrix::from_fn(n, n, |k, l| d[(k, l)] * (f[labels[l]] - f[labels[k]]));
        let (sigma, u, v) = top_singular_pair(&c);
        lower = lower.max((f[x] - f[y]) / sigma.max(1.0));
        if upper - lower <= CUTTING_PLANE_RELATIVE_GAP * upper.max(1.0) {
            return Ok(Distance {
                value: lower,
                lower,
                upper,
                method: DistanceMethod::CuttingPlane,
                path: None,
                iterations: iteration,
                converged: true,
            });
        }
        // Re⟨u, C(f) v⟩ = Σ_p f_p Re Σ_kl ū_k D_kl v_l (δ_{labels[l], p} − δ_{labels[k], p})
        let mut coeffs = vec![0.0; points];
        for k in 0..n {
            for l in 0..n {
                let z = (u[k].conj() * d[(k, l)] * v[l]).re;
                coeffs[labels[l]] += z;
                coeffs[labels[k]] -= z;
            }
        }
        let mut expr = LinearExpr::empty();
        for (p, &a) in coeffs.iter().enumerate() {
            if let (Some(var), true) = (vars[p], a != 0.0) {
                expr.add(var, a);
            }
        }
        solution = match solution.add_constraint(expr, ComparisonOp::Le, 1.0).map_err(lp_error)? {
            SolveOutcome::Solution(s) => s,
            SolveOutcome::Interrupted(_) => return Err(Error::Numeric("distance LP interrupted".to_string())),
        };
    }
    Ok(Distance {
        value: lower,
        lower,
        upper,
        method: DistanceMethod::CuttingPlane,
        path: None,
        iterations: CUTTING_PLANE_MAX_ITERATIONS,
        converged: false,
    })
}
