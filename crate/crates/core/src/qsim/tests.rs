use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

use num_complex::Complex;

use super::*;
use crate::error::Error;
use crate::rng::RandomSource;

fn amps(values: &[(usize, f64)], n: usize) -> StateVector<f64> {
    let mut v = vec![Complex::new(0.0, 0.0); 1 << n];
    for &(i, a) in values {
        v[i] = Complex::new(a, 0.0);
    }
    StateVector::from_amplitudes(v).unwrap()
}

#[test]
fn zero_state_basics() {
    let s = StateVector::<f64>::zero_state(3).unwrap();
    assert_eq!(s.amplitude(0), Complex::new(1.0, 0.0));
    assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    assert_eq!(StateVector::<f64>::zero_state(16).unwrap().norm(), 1.0);
    assert!(matches!(StateVector::<f64>::zero_state(0), Err(Error::Capacity { .. })));
    assert!(matches!(StateVector::<f64>::zero_state(25), Err(Error::Capacity { .. })));
}

#[test]
fn hadamard_and_bell() {
    let mut s = StateVector::<f64>::zero_state(2).unwrap();
    s.apply_unitary(&Unitary::h(), &[0]).unwrap();
    assert!((s.amplitude(1).re - FRAC_1_SQRT_2).abs() < 1e-15);
    s.apply_unitary(&Unitary::cnot(), &[0, 1]).unwrap();
    let bell = amps(&[(0, FRAC_1_SQRT_2), (3, FRAC_1_SQRT_2)], 2);
    assert!(s.max_distance(&bell) < 1e-15);
}

#[test]
fn x_on_second_qubit_of_ghz_like_state() {
    let (a, b) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
    let mut s = amps(&[(0, a), (7, b)], 3);
    s.apply_unitary(&Unitary::x(), &[1]).unwrap();
    // oracle: dense (I (x) X (x) I) with qubit 1 the middle bit
    let mut dense = vec![Complex::new(0.0, 0.0); 8];
    for (i, amp) in [(0usize, a), (7, b)] {
        dense[i ^ 0b010] = Complex::new(amp, 0.0);
    }
    let expected = StateVector::from_amplitudes(dense).unwrap();
    assert!(s.max_distance(&expected) < 1e-15);
    assert_eq!(ket_label(0b010, 3), "|010>");
    assert_eq!(ket_label(0b101, 3), "|101>");
}

#[test]
fn apply_unitary_rejects_bad_targets() {
    let mut s = StateVector::<f64>::zero_state(2).unwrap();
    assert!(matches!(
        s.apply_unitary(&Unitary::cnot(), &[1, 1]),
        Err(Error::DuplicateQubit(1))
    ));
    assert!(matches!(
        s.apply_unitary(&Unitary::h(), &[2]),
        Err(Error::QubitIndex { .. })
    ));
    assert!(s.apply_unitary(&Unitary::h(), &[0, 1]).is_err());
}

#[test]
fn measurement_statistics() {
    let mut one = StateVector::<f64>::basis_state(1, 1).unwrap();
    let (bit, post) = measure_z(one.clone(), 0, &mut RandomSource::new(1).generator()).unwrap();
    assert!(bit);
    assert!(post.max_distance(&one) < 1e-15);

    let psi = amps(&[(0, FRAC_PI_8.cos()), (1, FRAC_PI_8.sin())], 1);
    let p0 = 1.0 - psi.probability_one(0).unwrap();
    assert!((p0 - 0.8535533905932737).abs() < 1e-12);

    let bell = amps(&[(0, FRAC_1_SQRT_2), (3, FRAC_1_SQRT_2)], 2);
    for seed in 0..50 {
        let mut rng = RandomSource::new(seed).generator();
        let mut s = bell.clone();
        let a = s.measure(0, &mut rng).unwrap();
        let b = s.measure(1, &mut rng).unwrap();
        assert_eq!(a, b);
    }
    one.reset(0, &mut RandomSource::new(0).generator()).unwrap();
    assert_eq!(one.amplitude(0).re, 1.0);
}

#[test]
fn degenerate_branch_never_selected() {
    let s = StateVector::<f64>::zero_state(1).unwrap();
    for seed in 0..200 {
        let (bit, _) = measure_z(s.clone(), 0, &mut RandomSource::new(seed).generator()).unwrap();
        assert!(!bit);
    }
}

#[test]
fn sampling_counts() {
    let zero = StateVector::<f64>::zero_state(1).unwrap();
    let counts = zero.sample_counts(&[0], 8192, &RandomSource::new(3)).unwrap();
    assert_eq!(counts.get("0"), Some(&8192));
    let one_shot = zero.sample_counts(&[0], 1, &RandomSource::new(3)).unwrap();
    assert_eq!(one_shot.values().sum::<u64>(), 1);
    assert!(zero.sample_counts(&[0], 0, &RandomSource::new(3)).is_err());

    let mut plus = zero.clone();
    plus.apply_unitary(&Unitary::h(), &[0]).unwrap();
    let counts = plus.sample_counts(&[0], 8192, &RandomSource::new(11)).unwrap();
    let frac = *counts.get("0").unwrap_or(&0) as f64 / 8192.0;
    assert!((frac - 0.5).abs() <= 3.0 * (0.25f64 / 8192.0).sqrt());
}

#[test]
fn density_examples() {
    let zero = StateVector::<f64>::zero_state(1).unwrap();
    let rho = pure_density(&zero);
    assert_eq!(rho.get(0, 0).re, 1.0);
    assert_eq!(rho.get(1, 1).re, 0.0);

    let bell = amps(&[(0, FRAC_1_SQRT_2), (3, FRAC_1_SQRT_2)], 2);
    let reduced = partial_trace(&pure_density(&bell), &[0]).unwrap();
    assert!(reduced.max_distance(&DensityMatrix::maximally_mixed(1)) < 1e-15);
    assert!(matches!(
        partial_trace(&pure_density(&bell), &[]),
        Err(Error::Validation(_))
    ));

    let (a, b) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
    let ghz = amps(&[(0, a), (7, b)], 3);
    let r = partial_trace(&pure_density(&ghz), &[0]).unwrap();
    assert!((r.get(0, 0).re - 0.8535533905932737).abs() < 1e-12);
    assert!((r.get(1, 1).re - 0.14644660940672624).abs() < 1e-12);
    assert!(r.get(0, 1).norm() < 1e-15);
    r.validate().unwrap();
}

#[test]
fn fidelity_examples() {
    let zero = StateVector::<f64>::zero_state(1).unwrap();
    assert!((fidelity_pure(&pure_density(&zero), &zero).unwrap() - 1.0).abs() < 1e-15);
    let mixed = DensityMatrix::<f64>::maximally_mixed(1);
    let psi = amps(&[(0, FRAC_PI_8.cos()), (1, FRAC_PI_8.sin())], 1);
    assert!((fidelity_pure(&mixed, &psi).unwrap() - 0.5).abs() < 1e-15);
    let diag = DensityMatrix::from_entries(
        1,
        vec![
            Complex::new(0.9, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.1, 0.0),
        ],
    )
    .unwrap();
    assert!((fidelity_pure(&diag, &zero).unwrap() - 0.9).abs() < 1e-15);
    let two = StateVector::<f64>::zero_state(2).unwrap();
    assert!(matches!(
        fidelity_pure(&diag, &two),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn pure_density_has_single_unit_eigenvalue() {
    let (a, b) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
    let mut s = amps(&[(0, a), (7, b)], 3);
    s.apply_unitary(&Unitary::s(), &[1]).unwrap();
    s.apply_unitary(&Unitary::h(), &[1]).unwrap();
    let ev = pure_density(&s).eigenvalues();
    assert!((ev[7] - 1.0).abs() < 1e-8);
    assert!(ev[..7].iter().all(|e| e.abs() < 1e-8));
}

#[test]
fn projection_is_idempotent_on_physical_states() {
    let (a, b) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
    let psi = amps(&[(0, a), (3, b)], 2);
    let rho = pure_density(&psi);
    let (projected, moved) = rho.project_physical();
    assert!(rho.max_distance(&projected) < 1e-12);
    assert!(moved < 1e-9);
}

#[test]
fn pauli_expectations() {
    let zero = StateVector::<f64>::zero_state(1).unwrap();
    assert!((zero.pauli_expectation("Z").unwrap() - 1.0).abs() < 1e-15);
    let bell = amps(&[(0, FRAC_1_SQRT_2), (3, FRAC_1_SQRT_2)], 2);
    assert!((bell.pauli_expectation("ZZ").unwrap() - 1.0).abs() < 1e-15);
    assert!((bell.pauli_expectation("XX").unwrap() - 1.0).abs() < 1e-15);
    assert!((bell.pauli_expectation("YY").unwrap() + 1.0).abs() < 1e-15);
    assert!(matches!(
        bell.pauli_expectation("ZQ"),
        Err(Error::InvalidPauli('Q'))
    ));
    assert!(bell.pauli_expectation("Z").is_err());
}

#[test]
fn pauli_expectation_matches_dense_oracle() {
    let mut s = StateVector::<f64>::zero_state(3).unwrap();
    s.apply_unitary(&Unitary::ry(0.3), &[0]).unwrap();
    s.apply_unitary(&Unitary::h(), &[1]).unwrap();
    s.apply_unitary(&Unitary::t(), &[1]).unwrap();
    s.apply_unitary(&Unitary::cnot(), &[1, 2]).unwrap();
    s.apply_unitary(&Unitary::ry(1.1), &[2]).unwrap();
    for p in ["XYZ", "YIZ", "ZZX", "IYY", "XXX"] {
        let ps: PauliString = p.parse().unwrap();
        let dense = ps.to_dense::<f64>();
        let amps = s.amplitudes();
        let mut acc = Complex::new(0.0, 0.0);
        for r in 0..8 {
            for c in 0..8 {
                acc += amps[r].conj() * dense[r * 8 + c] * amps[c];
            }
        }
        assert!((s.pauli_expectation(p).unwrap() - acc.re).abs() < 1e-12, "{p}");
    }
}

#[test]
fn single_precision_path() {
    let mut s = StateVector::<f32>::zero_state(2).unwrap();
    s.apply_unitary(&Unitary::h(), &[0]).unwrap();
    s.apply_unitary(&Unitary::cnot(), &[0, 1]).unwrap();
    assert!((s.pauli_expectation("ZZ").unwrap() - 1.0).abs() < 1e-6);
    let r = partial_trace(&pure_density(&s), &[1]).unwrap();
    assert!((r.get(0, 0).re - 0.5).abs() < 1e-6);
}
