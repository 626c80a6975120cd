//! End-to-end agreement between the exact, variational and finite-difference paths.

use qes_core::qes::{assemble_wavefunction, solve_exact_spectrum, QesModel};
use qes_core::reference::reference_spectrum;
use qes_core::variational::{identify_states, DeltaMode, Parity};

#[test]
fn exact_levels_sit_in_the_reference_spectrum() {
    let m = QesModel::double_well();
    let exact = solve_exact_spectrum(&m).unwrap();
    let reference = reference_spectrum(&m, 5.0, 2000, 6, 1e-10).unwrap();
    for e in &exact.entries {
        assert!((reference.eigenvalues[e.node_count] - e.energy).abs() < 1e-4, "{e:?}");
    }
}

#[test]
fn barrier_levels_match_reference_on_the_half_line() {
    let m = QesModel::with_barrier(1.0, 2.0, 2).unwrap();
    let exact = solve_exact_spectrum(&m).unwrap();
    let reference = reference_spectrum(&m, 5.0, 2000, 2, 1e-10).unwrap();
    for (e, r) in exact.energies().iter().zip(&reference.eigenvalues) {
        assert!((e - r).abs() < 1e-3, "{e} vs {r}");
    }
}

#[test]
fn variational_even_scan_recovers_exact_sector() {
    let m = QesModel::double_well();
    let id = identify_states(&m, Parity::Even, 12, (-12.0, 12.0), 0.01, DeltaMode::Raw).unwrap();
    let found: Vec<(usize, f64)> = id.states.iter().map(|s| (s.level, s.energy)).collect();
    for (level, e) in [(0, -8.0), (2, 0.0), (4, 8.0)] {
        assert!(found.iter().any(|&(k, x)| k == level && (x - e).abs() < 1e-6), "{found:?}");
    }
}

#[test]
fn normalized_mode_keeps_first_excited_level() {
    let m = QesModel::double_well();
    let raw = identify_states(&m, Parity::Odd, 9, (-12.0, -4.0), 0.01, DeltaMode::Raw).unwrap();
    let norm = identify_states(&m, Parity::Odd, 9, (-12.0, -4.0), 0.01, DeltaMode::Normalized).unwrap();
    // zeros of the residual do not move under a positive rescaling
    assert!((raw.states[0].energy - norm.states[0].energy).abs() < 1e-9);
}

#[test]
fn wavefunctions_have_expected_nodes() {
    let m = QesModel::double_well();
    let s = solve_exact_spectrum(&m).unwrap();
    for e in &s.entries {
        let w = assemble_wavefunction(&m, e).unwrap();
        assert_eq!(w.node_count(), e.node_count);
        assert!(w.norm_squared() > 0.0);
    }
}
