use num_complex::Complex;

use super::*;
use crate::channels::{erase, inject, ErasureMode, ErrorSpec, NoiseModel, DEFAULT_MARKER};
use crate::circuit::{exact_state, Circuit, SimOptions};
use crate::error::Error;

const TOL: f64 = 1e-10;

fn amp(a: f64) -> Complex<f64> {
    Complex::new(a, 0.0)
}

fn fresh(n: usize, frag: &Circuit, prep: Option<f64>) -> StateVector<f64> {
    let mut c = Circuit::new(n, 0);
    if let Some(theta) = prep {
        c.ry(0, theta).unwrap();
    }
    c.append(frag).unwrap();
    exact_state(&c).unwrap()
}

/// Direct amplitude oracle for the parity-code codeword of `a|0>+b|1>`:
/// pairs (0,1) and (2,3) each in |00> or |11>, and the `b` term picks up a
/// sign per pair in |11>.
fn parity4_oracle(a: f64, b: f64) -> Vec<Complex<f64>> {
    (0..16usize)
        .map(|idx| {
            let pair = |lo: usize| (idx >> lo & 1, idx >> (lo + 1) & 1);
            let (p, q) = (pair(0), pair(2));
            if p.0 != p.1 || q.0 != q.1 {
                return amp(0.0);
            }
            let sign = if (p.0 + q.0) % 2 == 1 { -1.0 } else { 1.0 };
            amp(0.5 * (a + sign * b))
        })
        .collect()
}

#[test]
fn repetition_encoding_matches_amplitudes() {
    let msg = MessageParams::default();
    let s = fresh(3, &encode_repetition3(), Some(msg.theta()));
    let mut want = vec![amp(0.0); 8];
    want[0] = amp(msg.alpha);
    want[7] = amp(msg.beta);
    let oracle = StateVector::from_amplitudes(want).unwrap();
    assert!(s.max_distance(&oracle) < TOL);
}

#[test]
fn logical_bell_3_is_ghz6() {
    let s = fresh(6, &prepare_logical_bell_3(), None);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut want = vec![amp(0.0); 64];
    want[0] = amp(r);
    want[63] = amp(r);
    assert!(s.max_distance(&StateVector::from_amplitudes(want).unwrap()) < TOL);
}

#[test]
fn parity4_encoding_matches_oracle() {
    for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)] {
        let theta = 2.0 * f64::atan2(b, a);
        let s = fresh(4, &encode_parity4(), Some(theta));
        let want = StateVector::from_amplitudes(parity4_oracle(a, b)).unwrap();
        assert!(s.max_distance(&want) < TOL, "a={a} b={b}");
    }
}

#[test]
fn parity4_decoder_inverts_encoder() {
    let mut c = encode_parity4();
    c.append(&decode_parity4()).unwrap();
    let u = crate::circuit::unitary_of::<f64>(&c).unwrap();
    assert!(u.max_distance(&crate::qsim::Unitary::identity(16)) < TOL);
}

#[test]
fn bitflip_syndrome_table() {
    let cases = [(None, (false, false)), (Some(0), (true, true)), (Some(1), (true, false)), (Some(2), (false, true))];
    for (q, (a1, a2)) in cases {
        let spec = q.map_or_else(ErrorSpec::none, ErrorSpec::bit_flip);
        let tec = build_bitflip_tec_circuit(&spec, &TecOptions::default()).unwrap();
        assert_eq!(syndrome_record(&tec).unwrap(), SyndromeRecord { a1, a2 }, "{spec}");
    }
}

#[test]
fn single_flips_are_corrected() {
    for q in 0..3 {
        let tec = build_bitflip_tec_circuit(&ErrorSpec::bit_flip(q), &TecOptions::default()).unwrap();
        assert!((decoded_fidelity(&tec).unwrap() - 1.0).abs() < TOL);
        let tec = build_phaseflip_tec_circuit(&ErrorSpec::phase_flip(q), &TecOptions::default()).unwrap();
        assert!((decoded_fidelity(&tec).unwrap() - 1.0).abs() < TOL);
    }
    let tec = build_bitflip_tec_circuit(&ErrorSpec::none(), &TecOptions::default()).unwrap();
    assert!((decoded_fidelity(&tec).unwrap() - 1.0).abs() < TOL);
}

#[test]
fn double_flip_defeats_the_code() {
    let tec = build_bitflip_tec_circuit(&ErrorSpec::none(), &TecOptions::default()).unwrap();
    let c = inject(&tec.circuit, &ErrorSpec::bit_flip(0)).unwrap();
    let c = inject(&c, &ErrorSpec::bit_flip(1)).unwrap();
    let tec = TecCircuit { circuit: c, ..tec };
    assert!((decoded_fidelity(&tec).unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn phaseflip_code_ignores_bit_flips_as_errors() {
    // Built with no error, then an X injected: the phase code cannot see it.
    let tec = build_phaseflip_tec_circuit(&ErrorSpec::none(), &TecOptions::default()).unwrap();
    let c = inject(&tec.circuit, &ErrorSpec::bit_flip(0)).unwrap();
    let tec = TecCircuit { circuit: c, ..tec };
    assert!((decoded_fidelity(&tec).unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn builders_reject_foreign_error_kinds() {
    let o = TecOptions::default();
    assert!(matches!(build_bitflip_tec_circuit(&ErrorSpec::phase_flip(0), &o), Err(Error::ErrorSpec(_))));
    assert!(matches!(build_phaseflip_tec_circuit(&ErrorSpec::bit_flip(0), &o), Err(Error::ErrorSpec(_))));
    assert!(matches!(build_erasure_tec_circuit(&ErrorSpec::bit_flip(0), &o), Err(Error::ErrorSpec(_))));
}

#[test]
fn erasure_is_corrected_in_both_modes() {
    for mode in [ErasureMode::GateRemoval, ErasureMode::ResetAndFlag] {
        for q in 0..4 {
            let tec = build_erasure_tec_circuit(&ErrorSpec::erasure(q, mode), &TecOptions::default()).unwrap();
            let f = decoded_fidelity(&tec).unwrap();
            assert!((f - 1.0).abs() < 1e-9, "erase {q} {mode:?}: {f}");
            let dec = tec.erasure.as_ref().unwrap();
            assert_eq!(dec.flag, ErasureFlag::single(q));
            assert!(!dec.x_rep.support().contains(&q) && !dec.z_rep.support().contains(&q));
        }
    }
    let tec = build_erasure_tec_circuit(&ErrorSpec::none(), &TecOptions::default()).unwrap();
    assert!((decoded_fidelity(&tec).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn device_faithful_erasure_pipeline() {
    let opts = TecOptions {
        device_faithful: true,
        ..TecOptions::default()
    };
    for q in 0..4 {
        let tec = build_erasure_tec_circuit(&ErrorSpec::erasure(q, ErasureMode::GateRemoval), &opts).unwrap();
        assert_eq!(tec.circuit.num_qubits(), 14);
        assert!((decoded_fidelity(&tec).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn clean_qnd_signature_is_deterministic() {
    let tec = build_erasure_tec_circuit(&ErrorSpec::none(), &TecOptions::default()).unwrap();
    let sig = &tec.erasure.unwrap().qnd.unwrap().signature;
    assert_eq!(sig.len(), 1);
    assert!((sig["0000"] - 1.0).abs() < TOL);
}

#[test]
fn second_erasure_is_refused() {
    let tec = build_erasure_tec_circuit(&ErrorSpec::erasure(0, ErasureMode::GateRemoval), &TecOptions::default()).unwrap();
    assert!(matches!(
        erase(&tec.circuit, DEFAULT_MARKER, 2, ErasureMode::GateRemoval),
        Err(Error::ErrorSpec(_))
    ));
    let two = ErasureFlag {
        erased: [0, 2].into_iter().collect(),
    };
    assert!(matches!(select_logical_representatives(&two), Err(Error::Uncorrectable(_))));
}

#[test]
fn representatives_are_logical_operators() {
    let stabilizers: Vec<crate::qsim::PauliString> =
        ["ZZII", "IIZZ", "XXXX"].iter().map(|s| s.parse().unwrap()).collect();
    for flag in [ErasureFlag::none(), ErasureFlag::single(0), ErasureFlag::single(1), ErasureFlag::single(2), ErasureFlag::single(3)] {
        let (x, z) = select_logical_representatives(&flag).unwrap();
        for s in &stabilizers {
            assert!(x.commutes_with(s) && z.commutes_with(s));
        }
        assert!(!x.commutes_with(&z));
        for q in &flag.erased {
            assert!(!x.support().contains(q) && !z.support().contains(q));
        }
    }
}

#[test]
fn extraction_rule() {
    let none = ErasureFlag::none();
    assert_eq!(extract_erasure_flag(&[false, false], &none).unwrap(), none);
    assert_eq!(extract_erasure_flag(&[true, false], &ErasureFlag::single(1)).unwrap(), ErasureFlag::single(1));
    assert_eq!(extract_erasure_flag(&[false, false], &ErasureFlag::single(3)).unwrap(), ErasureFlag::single(3));
    assert!(matches!(extract_erasure_flag(&[true, true], &none), Err(Error::Uncorrectable(_))));
    assert!(matches!(extract_erasure_flag(&[true, false], &ErasureFlag::single(2)), Err(Error::Validation(_))));
    assert!(matches!(extract_erasure_flag(&[false, true], &none), Err(Error::Validation(_))));
}

fn p1(msg: &MessageParams) -> f64 {
    msg.beta * msg.beta
}

#[test]
fn pauli_frame_matches_coherent_readout() {
    let msg = MessageParams::default();
    let specs_bf = [ErrorSpec::none(), ErrorSpec::bit_flip(0), ErrorSpec::bit_flip(2)];
    for spec in &specs_bf {
        for readout in [Readout::Block, Readout::PauliFrame, Readout::Decoded] {
            let tec = build_bitflip_tec_circuit(spec, &TecOptions::with_readout(readout)).unwrap();
            let d = logical_distribution(&tec).unwrap();
            assert!((d[1] - p1(&msg)).abs() < 1e-9, "{spec} {readout:?}: {d:?}");
        }
    }
    // The parity code reads its logical Z in the X basis of the output.
    for q in 0..4 {
        let spec = ErrorSpec::erasure(q, ErasureMode::GateRemoval);
        let block = build_erasure_tec_circuit(&spec, &TecOptions::with_readout(Readout::Block)).unwrap();
        let frame = build_erasure_tec_circuit(&spec, &TecOptions::with_readout(Readout::PauliFrame)).unwrap();
        let (b, f) = (logical_distribution(&block).unwrap(), logical_distribution(&frame).unwrap());
        assert!((b[1] - f[1]).abs() < 1e-9, "erase {q}: {b:?} vs {f:?}");
        let dec = build_erasure_tec_circuit(&spec, &TecOptions::with_readout(Readout::Decoded)).unwrap();
        assert!((logical_distribution(&dec).unwrap()[1] - p1(&msg)).abs() < 1e-9);
    }
}

#[test]
fn sampled_counts_are_reproducible() {
    let tec = build_bitflip_tec_circuit(&ErrorSpec::bit_flip(1), &TecOptions::with_readout(Readout::Decoded)).unwrap();
    let a = logical_counts(&tec, &SimOptions::sampled(2000, 7)).unwrap();
    let b = logical_counts(&tec, &SimOptions::sampled(2000, 7)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[0] + a[1], 2000);
    let frac = a[1] as f64 / 2000.0;
    assert!((frac - p1(&MessageParams::default())).abs() < 0.04);
}

#[test]
fn zero_noise_trajectories_are_exact() {
    let tec = build_bitflip_tec_circuit(&ErrorSpec::none(), &TecOptions::default()).unwrap();
    let rho = noisy_decoded_density(&tec, &NoiseModel::default(), 4, 1).unwrap();
    assert!((rho.fidelity_pure(&tec.target).unwrap() - 1.0).abs() < 1e-9);
    let noisy = NoiseModel::new(0.05, 0.05, 0.0).unwrap();
    let f = noisy_decoded_density(&tec, &noisy, 64, 1).unwrap().fidelity_pure(&tec.target).unwrap();
    assert!(f < 1.0 && f > 0.4);
}

#[test]
fn gate_sequence_prepares_plus_i() {
    let c = prepare_message(&MessageParams::default(), PrepMode::GateSequence).unwrap();
    let s = exact_state::<f64>(&c).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let want = StateVector::from_amplitudes(vec![amp(r), Complex::new(0.0, r)]).unwrap();
    assert!(s.distance_up_to_phase(&want).unwrap() < TOL);
}

#[test]
fn state_readout_is_required_for_density() {
    let tec = build_bitflip_tec_circuit(&ErrorSpec::none(), &TecOptions::with_readout(Readout::Block)).unwrap();
    assert!(matches!(decoded_fidelity(&tec), Err(Error::Unsupported(_))));
}
