//! Invariant-based property suites: brackets, volume identity, energy,
//! smoothed tetragons, pb4+ axioms, chords and separation robustness.

mod common;

use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;
use tetralab::chord::{find_chord, ChordSearchConfig};
use tetralab::contact::ContactModel;
use tetralab::scenarios::perturbation::measured_delta;
use tetralab::scenarios::{
    hyperbolic, run_reeb_chord, run_superconductivity, run_unstable_equilibrium, EquilibriumConfig,
    PerturbationSpec, ReebConfig, SuperconductivityConfig, WallBump,
};
use tetralab::separation::SeparationConfig;
use tetralab::tetragon::{build_tetragon, smooth_tetragon};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_antisymmetry_is_exact(seed in any::<u64>()) {
        prop_assert_eq!(antisymmetry_defect(seed), 0.0);
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        prop_assert!(jacobi_defect(seed) <= 1e-5);
    }

    #[test]
    fn volume_identity(seed in any::<u64>()) {
        prop_assert!(volume_defect(seed) <= 1e-8);
    }

    #[test]
    fn smoothed_tetragon_is_lagrangian(which in 0usize..4, eps in 0.01f64..0.12) {
        let (model, t) = tetragon_models()[which];
        prop_assert!(smoothed_residual(model, t, eps) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn energy_is_conserved(seed in any::<u64>(), which in 0usize..4) {
        let (name, h) = &energy_systems()[which];
        let x0 = energy_start(seed, h.chart().dim(), *name == "hyperbolic");
        let drift = energy_drift(&**h, &x0);
        prop_assert!(drift <= 1e-8, "{}: drift {:e}", name, drift);
    }

    #[test]
    fn separation_robustness(seed in any::<u64>()) {
        let (sum, g, f) = robustness(seed);
        prop_assert!(sum >= g - f.abs() - 1e-9, "Δ(G+F) = {} < {} − |{}|", sum, g, f);
    }

    #[test]
    fn measured_delta_is_monotone_in_amplitude(a in 0.01f64..0.5, b in 0.01f64..0.5) {
        let tet = build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).unwrap();
        let shape = WallBump::for_tetragon(&tet, &PerturbationSpec::default()).unwrap();
        let sep = SeparationConfig { samples: 256, ..SeparationConfig::default() };
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(measured_delta(&shape, lo, &tet, &sep) <= measured_delta(&shape, hi, &tet, &sep) + 1e-12);
    }
}

#[test]
fn volume_identity_at_a_thousand_points() {
    let worst = (0..1000).map(volume_defect).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn smoothing_rejects_oversized_radius() {
    let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
    assert!(smooth_tetragon(&tet, 0.125).is_err());
    assert!(smooth_tetragon(&tet, 0.0).is_err());
}

#[test]
fn pb4_axioms_with_warm_starts() {
    let c = pb4_chain(96, 0.25, &quick_pb4());
    // Anti-symmetry, as estimator consistency.
    assert!((c.a - c.b).abs() <= 0.05 * c.a, "{c:?}");
    // Monotonicity and semi-continuity: the dilated optimum is feasible for
    // the thinner masks, so the warm start reproduces it exactly.
    assert_eq!(c.thin_initial, c.thick, "{c:?}");
    assert!(c.thin <= c.thick, "{c:?}");
    // The bracket scales inversely with R1 − R0 on the doubled window.
    assert!((c.scaled_initial - 0.5 * c.a).abs() <= 1e-12 * c.a, "{c:?}");
    assert!(c.scaled <= c.scaled_initial, "{c:?}");
}

#[test]
fn mean_value_along_chords() {
    let chords = mean_value_chords(&[16, 64, 256]);
    assert_eq!(chords.len(), 3);
    for (max, tau) in chords {
        assert!(max >= 1.0 / tau - 1e-6, "max {{F,G}} = {max} < 1/{tau}");
    }
}

#[test]
fn autonomized_chord_lands_in_ceiling() {
    let (dist, drift) = autonomized_chord();
    assert!(dist <= 1e-6, "{dist:e}");
    assert!(drift <= 1e-8, "{drift:e}");
}

#[test]
fn larger_budget_keeps_chord() {
    let tet = build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).unwrap();
    let h = hyperbolic(1);
    let cfg = ChordSearchConfig {
        seeds: 16,
        ..ChordSearchConfig::default()
    };
    let mut found_before = false;
    for budget in [0.3, 0.35, 0.5, FRAC_PI_4, 2.0] {
        let r = find_chord(&*h, &tet.floor, &tet.ceiling, budget, &cfg).unwrap();
        let found = r.chord().is_some();
        assert!(found || !found_before, "lost the chord at budget {budget}");
        found_before |= found;
        if let Some(c) = r.chord() {
            assert!(c.time_length <= budget);
        }
    }
    assert!(found_before);
}

#[test]
fn reports_recompute_their_verdict() {
    let reports = [
        run_unstable_equilibrium(&EquilibriumConfig::default()).unwrap(),
        run_superconductivity(&SuperconductivityConfig::default()).unwrap(),
        run_reeb_chord(&ReebConfig::default()).unwrap(),
    ];
    for r in &reports {
        assert!(r.pass, "{}", r.scenario);
        assert_eq!(r.verdict(), r.pass);
        let mut tampered = r.clone();
        tampered.budget = r.time_length.unwrap() * 0.5;
        assert!(!tampered.verdict(), "{}", r.scenario);
    }
}
