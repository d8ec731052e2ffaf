//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_limits::algebra::{gns, hom_validate, AlgebraElement, StarHomomorphism, State};
use spectral_limits::diagnostics::{
    commutator_series, function_gap, gap_series, generator_series, padded_resolvent_residual, resolvent_gap,
    resolvent_gap_eigen, st1_verdict, strong_resolvent_residual, Classification, GapProbe, DEFAULT_THRESHOLD,
    DEFAULT_WINDOW,
};
use spectral_limits::generators::{
    binary_chain, cantor_system, ci_system, commutative_af_chain, growing_commutator_system, matrix_chain,
    middle_thirds, random_commutative_system,
};
use spectral_limits::inductive::{realize, system_validate, InductiveSystem, Realization};
use spectral_limits::operator::{eigh, Isometry};
use spectral_limits::triple::{connes_distance_with, DistanceMethod};
use spectral_limits::{Error, Tolerances};

/// `Unattainable` marks a criterion whose stated value contradicts the exact
/// result; it prints FAIL without failing the run.
enum Fail {
    Hard(String),
    Unattainable(String),
}

impl From<String> for Fail {
    fn from(msg: String) -> Self {
        Self::Hard(msg)
    }
}

type Outcome = Result<String, Fail>;
type Criterion = (&'static str, fn() -> Outcome);

const LAMBDAS: [Complex64; 3] = [Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)];
const I: Complex64 = Complex64::new(0.0, 1.0);
const RANDOM_SYSTEMS: u64 = 100;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cantor(levels: usize) -> InductiveSystem {
    cantor_system(&middle_thirds(levels), levels, false).unwrap()
}

fn ci_linear(levels: usize) -> InductiveSystem {
    let alphas: Vec<f64> = (1..=levels).map(|j| j as f64).collect();
    ci_system(&binary_chain(&alphas).unwrap(), levels, &tol()).unwrap()
}

fn ci_alternating(levels: usize) -> InductiveSystem {
    let alphas: Vec<f64> = (1..=levels).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    ci_system(&binary_chain(&alphas).unwrap(), levels, &tol()).unwrap()
}

/// Random commutative systems of dimension at most 64.
fn random_systems() -> Vec<InductiveSystem> {
    (0..RANDOM_SYSTEMS)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let levels = rng.random_range(1..=5);
            random_commutative_system(&mut rng, levels, 64).unwrap()
        })
        .collect()
}

fn top(s: &InductiveSystem) -> Realization {
    realize(s, s.top_level(), &tol()).unwrap()
}

/// Probed systems for the resolvent identities.
fn probed_systems() -> Vec<InductiveSystem> {
    let mut systems = vec![cantor(10), ci_linear(8), ci_alternating(8)];
    systems.extend(random_systems());
    systems
}

fn criterion_1() -> Outcome {
    let g = middle_thirds(10);
    let r = top(&cantor(10));
    let mut worst = f64::NEG_INFINITY;
    for j in 0..10 {
        let gap = resolvent_gap(&r, j, I).map_err(|e| e.to_string())?;
        worst = worst.max(gap - g.length(j));
    }
    ensure(worst <= 0.0, || format!("gap exceeds ℓ_j by {worst:e}"))?;
    let gap1 = resolvent_gap(&r, 1, I).map_err(|e| e.to_string())?;
    let exact = 1.0 / 82f64.sqrt();
    ensure((gap1 - exact).abs() <= 1e-9, || format!("gap(1, i) = {gap1}, expected {exact}"))?;
    Ok(format!("max(gap − ℓ_j) = {worst:.3e}, gap(1, i) = {gap1:.15}"))
}

fn criterion_2() -> Outcome {
    let mut systems = vec![cantor(10), ci_linear(10)];
    systems.extend(random_systems());
    let mut worst: f64 = 0.0;
    for s in &systems {
        let r = top(s);
        for j in 0..=r.level() {
            for lambda in LAMBDAS {
                let direct = resolvent_gap(&r, j, lambda).map_err(|e| e.to_string())?;
                let eigen = resolvent_gap_eigen(&r, j, lambda).map_err(|e| e.to_string())?;
                worst = worst.max((direct - eigen).abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("oracles differ by {worst:e}"))?;
    Ok(format!("{} systems, max |direct − eigen| = {worst:.3e}", systems.len()))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in probed_systems() {
        let r = top(&s);
        for j in 0..=r.level() {
            for lambda in LAMBDAS {
                worst = worst.max(strong_resolvent_residual(&r, j, lambda).map_err(|e| e.to_string())?);
            }
        }
    }
    ensure(worst <= 1e-10, || format!("residual {worst:e}"))?;
    Ok(format!("max residual = {worst:.3e}"))
}

fn criterion_4() -> Outcome {
    let (mut worst, mut printed) = (0.0f64, f64::INFINITY);
    for s in probed_systems() {
        let r = top(&s);
        for j in 0..r.level() {
            for lambda in LAMBDAS {
                let p = padded_resolvent_residual(&r, j, lambda).map_err(|e| e.to_string())?;
                worst = worst.max(p.corrected);
                if lambda != I {
                    printed = printed.min(p.printed);
                }
            }
        }
    }
    ensure(worst <= 1e-10, || format!("corrected residual {worst:e}"))?;
    Ok(format!("max corrected residual = {worst:.3e}, min printed-sign residual off ±i = {printed:.3e}"))
}

fn criterion_5() -> Outcome {
    let levels = 10;
    let r = top(&ci_linear(levels));
    let series = gap_series(&r, &GapProbe::resolvent(I), 0..=levels).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for e in series.entries.iter().filter(|e| e.j < levels) {
        let alpha = (e.j + 1) as f64;
        worst = worst.max((e.gap - 1.0 / (1.0 + alpha * alpha).sqrt()).abs());
    }
    ensure(worst <= 1e-9, || format!("linear gap off by {worst:e}"))?;
    let v = st1_verdict(&series, DEFAULT_THRESHOLD, DEFAULT_WINDOW);
    ensure(v.classification == Classification::Consistent, || format!("linear verdict {:?}", v.classification))?;

    let r = top(&ci_alternating(levels));
    let series = gap_series(&r, &GapProbe::resolvent(I), 0..=levels).map_err(|e| e.to_string())?;
    let stall = series
        .entries
        .iter()
        .filter(|e| e.j < levels)
        .map(|e| (e.gap - 0.5f64.sqrt()).abs())
        .fold(0.0, f64::max);
    ensure(stall <= 1e-9, || format!("alternating gap leaves 1/√2 by {stall:e}"))?;
    let w = st1_verdict(&series, DEFAULT_THRESHOLD, DEFAULT_WINDOW);
    ensure(w.classification == Classification::Inconsistent, || format!("alternating verdict {:?}", w.classification))?;
    Ok(format!("α_j = j consistent (max error {worst:.1e}); α_j = (−1)^j inconsistent (stall error {stall:.1e})"))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for (seed, s) in random_systems().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64 ^ 0xabc);
        for j in 0..=s.top_level() {
            let values: Vec<f64> = (0..s.triple(j).algebra().dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let a = AlgebraElement::from_real_function(&values).unwrap();
            let series = commutator_series(s, j, &a, s.top_level()).map_err(|e| e.to_string())?;
            for w in series.entries.windows(2) {
                ensure(w[1].norm >= w[0].norm - 1e-9, || format!("random system {seed}: series decreases at k = {}", w[1].k))?;
            }
            checked += 1;
        }
    }
    let mut spread: f64 = 0.0;
    for s in [cantor(10), ci_linear(8)] {
        for series in generator_series(&s, 0..=s.top_level(), s.top_level(), 8).map_err(|e| e.to_string())? {
            let base = series.entries[0].norm;
            spread = series.entries.iter().map(|e| (e.norm - base).abs()).fold(spread, f64::max);
            checked += 1;
        }
    }
    ensure(spread <= 1e-10, || format!("Cantor/CI series vary by {spread:e}"))?;
    Ok(format!("{checked} series nondecreasing; Cantor/CI spread = {spread:.3e}"))
}

fn criterion_7() -> Outcome {
    let g = middle_thirds(10);
    let r = top(&cantor(10));
    let f = |x: f64| 1.0 / (1.0 + x * x);
    let gaps: Vec<f64> = (0..=10).map(|j| function_gap(&r, j, &f)).collect::<Result<_, _>>().map_err(|e: Error| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (j, gap) in gaps.iter().enumerate().take(10) {
        let l = g.length(j + 1);
        worst = worst.max((gap - 1.0 / (1.0 + l.powi(-2))).abs());
    }
    ensure(worst <= 1e-9, || format!("function gap off by {worst:e}"))?;
    ensure(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12), || format!("not nonincreasing: {gaps:?}"))?;
    ensure(gaps[10] == 0.0, || format!("gap at J = {}", gaps[10]))?;
    Ok(format!("max error {worst:.3e}, gap(0) = {:.3e}, gap(9) = {:.3e}", gaps[0], gaps[9]))
}

fn criterion_8() -> Outcome {
    let s = ci_system(&matrix_chain(5.0).unwrap(), 1, &tol()).map_err(|e| e.to_string())?;
    let d = eigh(s.triple(1).dirac(), &tol()).map_err(|e| e.to_string())?;
    let expected = [0.0, 5.0, 5.0, 5.0];
    let spec_err = d.eigenvalues().iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(d.eigenvalues().len() == 4 && spec_err <= 1e-10, || format!("spec(D_1) = {:?}", d.eigenvalues()))?;

    let chain = matrix_chain(5.0).unwrap();
    let algebra = &chain.algebras()[1];
    let g = gns(algebra, chain.state()).map_err(|e| e.to_string())?;
    let mut gram_err: f64 = 0.0;
    for k in 0..algebra.dim() {
        for l in 0..algebra.dim() {
            let (a, b) = (algebra.basis_element(k), algebra.basis_element(l));
            let inner = g.inner(&a, &b).map_err(|e| e.to_string())?;
            let tau = chain.state().evaluate(&a.adjoint().mul(&b).unwrap()).map_err(|e| e.to_string())?;
            gram_err = gram_err.max((inner - tau).norm());
        }
    }
    ensure(gram_err <= 1e-15, || format!("gram error {gram_err:e}"))?;
    Ok(format!("spec(D_1) error {spec_err:.1e}, gram error {gram_err:.1e}"))
}

fn criterion_9() -> Outcome {
    let mut systems = vec![
        cantor(10),
        cantor_system(&middle_thirds(6), 6, true).unwrap(),
        ci_linear(8),
        ci_alternating(8),
        ci_system(&matrix_chain(5.0).unwrap(), 1, &tol()).unwrap(),
        growing_commutator_system(6).unwrap(),
    ];
    systems.extend(random_systems());
    let mut worst: f64 = 0.0;
    for s in &systems {
        let report = system_validate(s, &tol()).map_err(|e| e.to_string())?;
        ensure(report.passed, || format!("{:?}", report.failures))?;
        for t in &report.triples {
            let rep = &t.representation;
            worst = [worst, t.hermitian_residual, rep.unit_residual, rep.multiplicative_residual, rep.star_residual]
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
        }
        for m in &report.links {
            let h = &m.homomorphism;
            worst = [
                worst,
                m.isometry_residual,
                m.algebra_intertwining,
                m.dirac_intertwining,
                h.unit_residual,
                h.multiplicative_residual,
                h.star_residual,
            ]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    ensure(worst <= 1e-11, || format!("residual {worst:e}"))?;

    let s = cantor(3);
    let mut links = s.links().to_vec();
    let mut m = links[2].iso.matrix().clone();
    m[(1, 1)] = Complex64::new(0.5, 0.0);
    links[2].iso = Isometry::from_matrix_unchecked(m);
    let broken = InductiveSystem::new(s.triples().to_vec(), links, s.provenance().clone()).map_err(|e| e.to_string())?;
    let report = system_validate(&broken, &tol()).map_err(|e| e.to_string())?;
    ensure(!report.passed && report.failures.iter().any(|f| f.contains("link 2")), || {
        format!("corrupted isometry not named: {:?}", report.failures)
    })?;

    ensure(matches!(State::from_weights(&[0.5, 0.5, 0.0], &tol()), Err(Error::Validation(_))), || {
        "zero-weight state accepted".into()
    })?;
    ensure(
        matches!(commutative_af_chain(&[vec![0, 0]], &[1.0, 0.0], &[1.0]), Err(Error::Validation(_))),
        || "chain with a non-faithful state accepted".into(),
    )?;
    ensure(
        // no point of level 2 lies over point 1 of level 1
        matches!(commutative_af_chain(&[vec![0, 0], vec![0, 0, 0]], &[0.25, 0.25, 0.5], &[1.0, 2.0]), Err(Error::Validation(_))),
        || "non-surjective chain accepted".into(),
    )?;
    let phi = StarHomomorphism::spectrum_map(3, vec![0, 1, 1]).map_err(|e| e.to_string())?;
    let h = hom_validate(&phi, &tol());
    ensure(!h.passed && h.injectivity_margin == 0.0, || "non-surjective spectrum map passed".into())?;
    Ok(format!("{} systems, max residual {worst:.3e}; negative controls rejected", systems.len()))
}

/// Criterion 10 as stated requires `d(0, 2/3) = 1/3` on every level `≥ 1`.
/// From level 2 on, `θ_j(1/3)` moves off `0` and the exact finite distance is
/// the total length of the gaps present at level `j` inside `[0, 2/3]`
/// (`4/9` at level 2). That part is reported as unattainable; route
/// agreement, the gap-sum oracle and the triangle inequality are hard checks.
fn criterion_10() -> Outcome {
    let g = middle_thirds(4);
    let s = cantor(4);
    let mut triples = 0;
    let mut observed = Vec::new();
    for level in 1..=4 {
        let t = s.triple(level);
        let points = g.level_points(level);
        let x = points.iter().position(|&p| p == 0.0).unwrap();
        let y = points.iter().position(|&p| (p - 2.0 / 3.0).abs() < 1e-15).unwrap();
        let sp = connes_distance_with(t, x, y, DistanceMethod::ShortestPath).map_err(|e| e.to_string())?;
        let lp = connes_distance_with(t, x, y, DistanceMethod::CuttingPlane).map_err(|e| e.to_string())?;
        ensure((sp.value - lp.value).abs() <= 1e-9, || format!("level {level}: {} vs {}", sp.value, lp.value))?;
        let gap_sum: f64 = (1..=level)
            .filter(|&n| g.plus(n) <= 2.0 / 3.0 + 1e-15)
            .map(|n| g.length(n))
            .sum();
        ensure((sp.value - gap_sum).abs() <= 1e-12, || format!("level {level}: d = {}, gap sum {gap_sum}", sp.value))?;
        observed.push(sp.value);

        let n = points.len();
        let d: Vec<Vec<f64>> = (0..n)
            .map(|a| (0..n).map(|b| connes_distance_with(t, a, b, DistanceMethod::ShortestPath).unwrap().value).collect())
            .collect();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    ensure(d[a][c] <= d[a][b] + d[b][c] + 1e-12, || format!("level {level}: triangle fails at {a},{b},{c}"))?;
                    triples += 1;
                }
            }
        }
    }
    ensure((observed[0] - 1.0 / 3.0).abs() <= 1e-9, || format!("level 1: d = {}", observed[0]))?;
    let summary = format!("routes agree, gap-sum oracle holds, {triples} triangles hold; d(0, 2/3) on levels 1..=4 = {observed:.6?}");
    if observed.iter().any(|d| (d - 1.0 / 3.0).abs() > 1e-9) {
        return Err(Fail::Unattainable(format!("{summary}; 1/3 holds only on level 1")));
    }
    Ok(summary)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Cantor ST1 bound", criterion_1),
        ("gap oracle equivalence", criterion_2),
        ("strong-resolvent identity", criterion_3),
        ("corrected padded-resolvent identity", criterion_4),
        ("CI ST1 dichotomy", criterion_5),
        ("commutator monotonicity", criterion_6),
        ("function-gap probe", criterion_7),
        ("GNS correctness", criterion_8),
        ("morphism/system validation", criterion_9),
        ("distance", criterion_10),
    ];
    let mut hard_failures = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err(Fail::Hard("panicked".into())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS ({secs:.2}s) {name}: {detail}", n + 1),
            Err(Fail::Hard(detail)) => {
                hard_failures += 1;
                println!("criterion {:>2} FAIL ({secs:.2}s) {name}: {detail}", n + 1);
            }
            Err(Fail::Unattainable(detail)) => {
                println!("criterion {:>2} FAIL ({secs:.2}s) {name} [unattainable as stated]: {detail}", n + 1)
            }
        }
    }
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
