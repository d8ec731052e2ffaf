//! Systems survive a JSON round trip with identical diagnostics.

use num_complex::Complex64;

use spectral_limits::diagnostics::{gap_series, GapProbe};
use spectral_limits::generators::{binary_chain, cantor_system, ci_system, matrix_chain, middle_thirds};
use spectral_limits::inductive::{realize, system_validate, InductiveSystem};
use spectral_limits::Tolerances;

fn round_trip(s: &InductiveSystem) -> InductiveSystem {
    serde_json::from_str(&serde_json::to_string(s).unwrap()).unwrap()
}

#[test]
fn generated_systems_round_trip() {
    let tol = Tolerances::default();
    let systems = [
        cantor_system(&middle_thirds(5), 5, true).unwrap(),
        ci_system(&binary_chain(&[1.0, -2.0, 3.0]).unwrap(), 3, &tol).unwrap(),
        ci_system(&matrix_chain(5.0).unwrap(), 1, &tol).unwrap(),
    ];
    for s in &systems {
        let back = round_trip(s);
        assert_eq!(&back, s);
        assert!(system_validate(&back, &tol).unwrap().passed);
        let top = s.top_level();
        let probe = GapProbe::resolvent(Complex64::new(0.0, 1.0));
        let before = gap_series(&realize(s, top, &tol).unwrap(), &probe, 0..=top).unwrap();
        let after = gap_series(&realize(&back, top, &tol).unwrap(), &probe, 0..=top).unwrap();
        assert_eq!(before, after);
    }
}
