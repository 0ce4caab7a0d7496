use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use super::*;
use crate::qsim::{StateVector, Unitary};

fn bell_builder() -> Circuit {
    let mut c = Circuit::new(2, 0);
    c.h(0).unwrap().cnot(0, 1).unwrap();
    c
}

#[test]
fn builder_accepts_valid_ops() {
    let c = bell_builder();
    assert_eq!(c.len(), 2);
    c.validate().unwrap();
}

#[test]
fn builder_rejects_bad_ops() {
    let mut c = Circuit::new(3, 1);
    assert!(matches!(c.toffoli(0, 1, 1), Err(Error::DuplicateQubit(1))));
    assert!(matches!(
        c.push(GateOp::new(GateKind::Cnot, vec![0])),
        Err(Error::Arity { expected: 2, got: 1, .. })
    ));
    assert!(matches!(c.h(3), Err(Error::QubitIndex { index: 3, .. })));
    assert!(matches!(c.measure(0, 1), Err(Error::CbitIndex { .. })));
    c.measure(0, 0).unwrap();
    assert!(matches!(c.measure(1, 0), Err(Error::CbitReassigned(0))));
    c.marker("ε", &[0, 1, 2]).unwrap();
    assert!(matches!(c.marker("ε", &[0]), Err(Error::DuplicateMarker(_))));
    assert!(c.ry(0, f64::NAN).is_err());
    assert_eq!(c.len(), 2);
}

#[test]
fn sampled_hadamard() {
    let mut c = Circuit::new(1, 1);
    c.h(0).unwrap().measure(0, 0).unwrap();
    let r = simulate(&c, 8192, 17).unwrap();
    assert_eq!(r.counts.values().sum::<u64>(), 8192);
    assert_eq!(r.cbit_values.len(), 8192);
    let p0 = r.counts["0"] as f64 / 8192.0;
    assert!((p0 - 0.5).abs() <= 3.0 * (0.25f64 / 8192.0).sqrt());
}

#[test]
fn empty_circuit_is_zero_state() {
    let r = simulate(&Circuit::new(1, 0), 0, 0).unwrap();
    assert_eq!(r.final_state.unwrap(), StateVector::zero_state(1).unwrap());
}

#[test]
fn capacity_error_above_24_qubits() {
    assert!(matches!(
        simulate(&Circuit::new(25, 0), 0, 0),
        Err(Error::Capacity { .. })
    ));
}

#[test]
fn exact_mode_matches_gate_composition() {
    let mut c = Circuit::new(3, 0);
    c.ry(0, 0.4).unwrap().h(1).unwrap().cnot(1, 2).unwrap().t(2).unwrap().cz(0, 2).unwrap();
    let via_sim = simulate(&c, 0, 0).unwrap().final_state.unwrap();
    let mut direct = StateVector::<f64>::zero_state(3).unwrap();
    direct.apply_unitary(&Unitary::ry(0.4), &[0]).unwrap();
    direct.apply_unitary(&Unitary::h(), &[1]).unwrap();
    direct.apply_unitary(&Unitary::cnot(), &[1, 2]).unwrap();
    direct.apply_unitary(&Unitary::t(), &[2]).unwrap();
    direct.apply_unitary(&Unitary::cz(), &[0, 2]).unwrap();
    assert!(via_sim.max_distance(&direct) < 1e-12);
}

#[test]
fn exact_distribution_of_bell_measurement() {
    let mut c = bell_builder();
    let mut m = Circuit::new(2, 2);
    m.append(&c).unwrap().measure(0, 0).unwrap().measure(1, 1).unwrap();
    let dist = exact_distribution::<f64>(&m, 0.0).unwrap();
    assert_eq!(dist.len(), 2);
    assert!((dist["00"] - 0.5).abs() < 1e-15 && (dist["11"] - 0.5).abs() < 1e-15);
    let noisy = exact_distribution::<f64>(&m, 0.1).unwrap();
    assert!((noisy["01"] - 0.5 * 0.1 * 0.9 * 2.0).abs() < 1e-15);
    c.x(1).unwrap();
    assert_eq!(c.len(), 3);
}

#[test]
fn mid_circuit_measurement_branches() {
    // measure, then act on the measured qubit again
    let mut c = Circuit::new(2, 2);
    c.h(0).unwrap().measure(0, 0).unwrap().cnot(0, 1).unwrap().h(0).unwrap().measure(1, 1).unwrap();
    let branches = exact_branches::<f64>(&c).unwrap();
    assert_eq!(branches.len(), 2);
    let dist = exact_distribution::<f64>(&c, 0.0).unwrap();
    assert!((dist["00"] - 0.5).abs() < 1e-15 && (dist["11"] - 0.5).abs() < 1e-15);
    let r = simulate(&c, 400, 5).unwrap();
    assert!(r.final_state.is_none());
    assert!(r.counts.keys().all(|k| k == "00" || k == "11"));
}

#[test]
fn reset_returns_to_zero() {
    let mut c = Circuit::new(2, 0);
    c.h(0).unwrap().cnot(0, 1).unwrap().reset(0).unwrap();
    let rho = exact_reduced_density::<f64>(&c, &[0]).unwrap();
    assert!((rho.get(0, 0).re - 1.0).abs() < 1e-15);
    let rho1 = exact_reduced_density::<f64>(&c, &[1]).unwrap();
    assert!((rho1.get(1, 1).re - 0.5).abs() < 1e-15);
}

#[test]
fn same_seed_same_histogram() {
    let mut c = Circuit::new(3, 3);
    c.ry(0, 1.0).unwrap().h(1).unwrap().cnot(1, 2).unwrap();
    for q in 0..3 {
        c.measure(q, q).unwrap();
    }
    let a = simulate(&c, 2000, 99).unwrap();
    let b = simulate(&c, 2000, 99).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let threaded = pool.install(|| simulate(&c, 2000, 99).unwrap());
    assert_eq!(a, threaded);
}

#[test]
fn unitary_of_examples() {
    let mut x = Circuit::new(1, 0);
    x.x(0).unwrap();
    assert!(unitary_of::<f64>(&x).unwrap().max_distance(&Unitary::x()) < 1e-15);
    let mut hh = Circuit::new(1, 0);
    hh.h(0).unwrap().h(0).unwrap();
    assert!(unitary_of::<f64>(&hh).unwrap().max_distance(&Unitary::identity(2)) < 1e-12);
    let mut cc = Circuit::new(2, 0);
    cc.cnot(0, 1).unwrap().cnot(0, 1).unwrap();
    assert!(unitary_of::<f64>(&cc).unwrap().max_distance(&Unitary::identity(4)) < 1e-15);
    let mut m = Circuit::new(1, 1);
    m.measure(0, 0).unwrap();
    assert!(matches!(unitary_of::<f64>(&m), Err(Error::Unsupported(_))));
    assert!(matches!(unitary_of::<f64>(&Circuit::new(11, 0)), Err(Error::Capacity { .. })));
}

#[test]
fn markers_act_as_identity() {
    let mut c = Circuit::new(3, 0);
    c.ry(0, FRAC_PI_4).unwrap().cnot(0, 1).unwrap();
    c.marker("ε", &[0, 1, 2]).unwrap().cnot(0, 2).unwrap();
    let with = exact_state::<f64>(&c).unwrap();
    let without = exact_state::<f64>(&c.without_markers()).unwrap();
    assert_eq!(with, without);
}

#[test]
fn json_round_trip_and_layout() {
    let mut c = Circuit::new(3, 1);
    c.h(0).unwrap().ry(0, FRAC_PI_4).unwrap().cnot(0, 1).unwrap();
    c.marker("ε", &[0, 1, 2]).unwrap().measure(2, 0).unwrap();
    c.set_metadata("pipeline", "demo");
    let text = c.to_json();
    assert!(text.contains("\"theta\": 0.7853981633974483"));
    assert!(text.contains("\"version\": 1"));
    assert_eq!(Circuit::from_json(&text).unwrap(), c);
    let compact = r#"{"version":1,"num_qubits":3,"num_cbits":1,"ops":[{"kind":"H","qubits":[0]},{"kind":"Ry","theta":0.7853981633974483,"qubits":[0]},{"kind":"CNOT","qubits":[0,1]},{"kind":"Measure","qubits":[2],"cbit":0},{"kind":"Marker","label":"ε","qubits":[0,1,2]}],"metadata":{}}"#;
    let parsed = Circuit::from_json(compact).unwrap();
    assert_eq!(parsed.len(), 5);
    assert_eq!(parsed.ops()[1].kind, GateKind::Ry { theta: FRAC_PI_4 });
}

#[test]
fn json_diagnostics() {
    let bad_kind = r#"{"version":1,"num_qubits":1,"num_cbits":0,"ops":[{"kind":"Hadamard","qubits":[0]}]}"#;
    match Circuit::from_json(bad_kind) {
        Err(Error::Parse { location, message }) => {
            assert_eq!(location, "ops[0].kind");
            assert!(message.contains("Hadamard"));
        }
        other => panic!("unexpected {other:?}"),
    }
    let no_version = r#"{"num_qubits":1,"num_cbits":0,"ops":[]}"#;
    match Circuit::from_json(no_version) {
        Err(Error::Parse { message, .. }) => assert!(message.contains("version")),
        other => panic!("unexpected {other:?}"),
    }
    let wrong_version = r#"{"version":2,"num_qubits":1,"num_cbits":0,"ops":[]}"#;
    assert!(matches!(Circuit::from_json(wrong_version), Err(Error::Parse { location, .. }) if location == "version"));
    let unknown_field = "{\"version\":1,\"num_qubits\":1,\"num_cbits\":0,\n\"ops\":[{\"kind\":\"H\",\"qubits\":[0],\"angle\":1}]}";
    match Circuit::from_json(unknown_field) {
        Err(Error::Parse { location, message }) => {
            assert!(location.starts_with("line 2"));
            assert!(message.contains("angle"));
        }
        other => panic!("unexpected {other:?}"),
    }
    let stray_theta = r#"{"version":1,"num_qubits":1,"num_cbits":0,"ops":[{"kind":"H","theta":1.0,"qubits":[0]}]}"#;
    assert!(matches!(Circuit::from_json(stray_theta), Err(Error::Parse { location, .. }) if location == "ops[0].theta"));
    let out_of_range = r#"{"version":1,"num_qubits":1,"num_cbits":0,"ops":[{"kind":"X","qubits":[4]}]}"#;
    assert!(Circuit::from_json(out_of_range).is_err());
}

#[test]
fn final_state_of_plus_state() {
    let mut c = Circuit::new(1, 0);
    c.h(0).unwrap();
    let s = simulate(&c, 0, 0).unwrap().final_state.unwrap();
    assert!((s.amplitude(1).re - FRAC_1_SQRT_2).abs() < 1e-15);
}
