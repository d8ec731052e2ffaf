//! Property tests over random commutative systems and random operators.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_limits::algebra::{hom_apply, AlgebraElement, FiniteCStarAlgebra};
use spectral_limits::diagnostics::{commutator_series, resolvent_gap, resolvent_gap_eigen, MONOTONE_SLACK};
use spectral_limits::generators::{random_commutative_system, random_hermitian};
use spectral_limits::inductive::{embed, realize, system_validate, InductiveSystem};
use spectral_limits::operator::{eigh, operator_norm, resolvent, ComplexMatrix, HermitianOperator};
use spectral_limits::triple::{
    commutator_norm, compose_morphisms, connes_distance, connes_distance_with, validate_morphism, DistanceMethod,
    FiniteSpectralTriple, Representation,
};
use spectral_limits::Tolerances;

const LAMBDAS: [Complex64; 3] = [Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)];

fn random_system(seed: u64) -> InductiveSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = rng.random_range(1..=4);
    random_commutative_system(&mut rng, levels, 64).unwrap()
}

fn random_function(rng: &mut ChaCha8Rng, points: usize) -> AlgebraElement {
    let values: Vec<f64> = (0..points).map(|_| rng.random_range(-2.0..2.0)).collect();
    AlgebraElement::from_real_function(&values).unwrap()
}

/// Commutative triple whose off-diagonal Dirac entries between different
/// points form a matching, so the distance constraints decouple.
fn decoupled_triple(rng: &mut ChaCha8Rng, points: usize) -> FiniteSpectralTriple {
    let n = 2 * points;
    let labels: Vec<usize> = (0..n).map(|i| if i < points { i } else { rng.random_range(0..points) }).collect();
    let mut d = ComplexMatrix::zeros(n, n);
    for k in 0..points {
        let (a, b) = (2 * k % n, (2 * k + 1) % n);
        let z = Complex64::new(rng.random_range(0.2..3.0), rng.random_range(-1.0..1.0));
        d[(a, b)] = z;
        d[(b, a)] = z.conj();
    }
    for i in 0..n {
        d[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
    }
    FiniteSpectralTriple::new(
        FiniteCStarAlgebra::commutative(points).unwrap(),
        Representation::Diagonal { labels },
        HermitianOperator::new(d, &Tolerances::default()).unwrap(),
        None,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_systems_validate(seed in any::<u64>()) {
        let s = random_system(seed);
        let report = system_validate(&s, &Tolerances::default()).unwrap();
        prop_assert!(report.passed, "{:?}", report.failures);
    }

    #[test]
    fn commutator_series_are_nondecreasing(seed in any::<u64>()) {
        let s = random_system(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for j in 0..=s.top_level() {
            let a = random_function(&mut rng, s.triple(j).algebra().dim());
            let series = commutator_series(&s, j, &a, s.top_level()).unwrap();
            for w in series.entries.windows(2) {
                prop_assert!(w[1].norm >= w[0].norm - MONOTONE_SLACK * w[0].norm.max(1.0));
            }
            prop_assert!(series.monotone);
        }
    }

    #[test]
    fn gap_oracles_agree(seed in any::<u64>()) {
        let s = random_system(seed);
        let r = realize(&s, s.top_level(), &Tolerances::default()).unwrap();
        for j in 0..=r.level() {
            for lambda in LAMBDAS {
                let direct = resolvent_gap(&r, j, lambda).unwrap();
                let eigen = resolvent_gap_eigen(&r, j, lambda).unwrap();
                prop_assert!((direct - eigen).abs() <= 1e-9, "j={j} λ={lambda}: {direct} vs {eigen}");
            }
        }
    }

    #[test]
    fn pullback_contracts_commutators(seed in any::<u64>()) {
        let s = random_system(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let top = s.top_level();
        let m = embed(&s, 0, top).unwrap();
        let a = random_function(&mut rng, s.triple(0).algebra().dim());
        let below = commutator_norm(s.triple(0), &a).unwrap();
        let image = hom_apply(&m.phi, &a).unwrap();
        let c = spectral_limits::triple::commutator_with_dirac(s.triple(top), &image).unwrap();
        let compressed = m.iso.compress(&c).unwrap();
        prop_assert!((operator_norm(&compressed) - below).abs() <= 1e-9 * below.max(1.0));
        prop_assert!(below <= operator_norm(&c) + 1e-9 * below.max(1.0));
    }

    #[test]
    fn composed_morphisms_validate(seed in any::<u64>()) {
        let s = random_system(seed);
        let mut m = s.link_morphism(0);
        for l in 1..s.top_level() {
            m = compose_morphisms(&m, &s.link_morphism(l)).unwrap();
        }
        let report = validate_morphism(&m, &Tolerances::default()).unwrap();
        prop_assert!(report.passed, "{:?}", report.failures);
    }

    /// True distances lie in `[lower, upper]`; the cutting plane stops at a
    /// relative gap of 1e-9, so the inequality is checked on the certified
    /// bracket: `lower(x, z) ≤ upper(x, y) + upper(y, z)`.
    #[test]
    fn distance_triangle_inequality(seed in any::<u64>()) {
        let s = random_system(seed);
        let t = s.triple(s.top_level());
        let points = t.algebra().dim().min(5);
        let mut d = Vec::new();
        for x in 0..points {
            d.push((0..points).map(|y| connes_distance(t, x, y).unwrap()).collect::<Vec<_>>());
        }
        for x in 0..points {
            for y in 0..points {
                let (a, b) = (&d[x][y], &d[y][x]);
                prop_assert!(a.converged);
                if a.is_infinite() {
                    prop_assert!(b.is_infinite());
                } else {
                    prop_assert!(a.lower <= b.upper + 1e-9 * a.value.max(1.0));
                    prop_assert!(b.lower <= a.upper + 1e-9 * a.value.max(1.0));
                }
                for z in 0..points {
                    let via = d[x][y].upper + d[y][z].upper;
                    prop_assert!(d[x][z].lower <= via + 1e-9 * via.max(1.0), "{x},{y},{z}: {} > {via}", d[x][z].lower);
                }
            }
        }
    }

    #[test]
    fn shortest_path_matches_lp(seed in any::<u64>(), points in 2usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = decoupled_triple(&mut rng, points);
        let (x, y) = (rng.random_range(0..points), rng.random_range(0..points));
        let sp = connes_distance_with(&t, x, y, DistanceMethod::ShortestPath).unwrap();
        let lp = connes_distance_with(&t, x, y, DistanceMethod::CuttingPlane).unwrap();
        if sp.is_infinite() {
            prop_assert!(lp.is_infinite());
        } else {
            prop_assert!((sp.value - lp.value).abs() <= 1e-9 * sp.value.max(1.0), "{} vs {}", sp.value, lp.value);
        }
    }

    #[test]
    fn eigh_reconstructs(seed in any::<u64>(), n in 1usize..=80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = HermitianOperator::new(random_hermitian(&mut rng, n), &Tolerances::default()).unwrap();
        let d = eigh(&h, &Tolerances::default()).unwrap();
        let scale = operator_norm(h.matrix()).max(1.0);
        prop_assert!(operator_norm(&(&d.reconstruct() - h.matrix())) <= 1e-10 * scale);
        let u = d.eigenvectors();
        prop_assert!(operator_norm(&(&(&u.adjoint() * u) - &ComplexMatrix::identity(n))) <= 1e-10);
        prop_assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((operator_norm(h.matrix()) - d.spectral_radius()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn resolvent_identities(seed in any::<u64>(), n in 1usize..=40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = Tolerances::default();
        let h = HermitianOperator::new(random_hermitian(&mut rng, n), &tol).unwrap();
        let id = ComplexMatrix::identity(n);
        let shifted = |l: Complex64| h.matrix() - &id.scale(l);
        for lambda in LAMBDAS {
            let r = resolvent(&h, lambda, &tol).unwrap();
            prop_assert!(operator_norm(&(&(&shifted(lambda) * &r) - &id)) <= 1e-10);
        }
        let (l, m) = (LAMBDAS[0], LAMBDAS[2]);
        let (rl, rm) = (resolvent(&h, l, &tol).unwrap(), resolvent(&h, m, &tol).unwrap());
        let rhs = (&rl * &rm).scale(l - m);
        prop_assert!(operator_norm(&(&(&rl - &rm) - &rhs)) <= 1e-9);
    }
}
