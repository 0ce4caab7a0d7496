use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::circuit::unitary_of;
use crate::tec::{build_bitflip_tec_circuit, build_erasure_tec_circuit, TecOptions};
use crate::channels::ErrorSpec;

fn melbourne_literal() -> BTreeSet<(usize, usize)> {
    // Q1->[Q0,Q2], Q2->Q3, Q4->Q10, Q5->[Q9,Q6,Q4], Q6->Q8, Q7->Q8,
    // Q9->[Q8,Q10], Q11->[Q12,Q10,Q3], Q12->Q2, Q13->[Q12,Q1]
    let lists: [(usize, &[usize]); 10] = [
        (1, &[0, 2]),
        (2, &[3]),
        (4, &[10]),
        (5, &[9, 6, 4]),
        (6, &[8]),
        (7, &[8]),
        (9, &[8, 10]),
        (11, &[12, 10, 3]),
        (12, &[2]),
        (13, &[12, 1]),
    ];
    lists
        .iter()
        .flat_map(|(c, ts)| ts.iter().map(move |&t| (*c, t)))
        .collect()
}

#[test]
fn melbourne_matches_literal_list() {
    let m = melbourne_map();
    assert_eq!(m.edges(), &melbourne_literal());
    assert_eq!(m.edges().len(), 17);
    assert!(m.has_edge(5, 9) && !m.has_edge(9, 5));
    assert!(m.has_edge(1, 0) && !m.has_edge(0, 1));
    assert!(m.is_connected());
    assert_eq!(m.annotations()[&0].freq_ghz, 5.1);
}

#[test]
fn coupling_map_json_round_trip() {
    let m = melbourne_map();
    let text = m.to_json();
    assert!(text.contains("\"freq_ghz\": 5.1"));
    assert_eq!(CouplingMap::from_json(&text).unwrap(), m);
    assert!(CouplingMap::new(2, [(1, 1)]).is_err());
    assert!(CouplingMap::new(2, [(0, 2)]).is_err());
}

#[test]
fn validation_policies() {
    let m = melbourne_map();
    let mut c = Circuit::new(3, 0);
    c.cnot(1, 0).unwrap();
    assert!(validate(&c, &m, DirectionPolicy::Strict).unwrap().is_empty());
    let mut c = Circuit::new(3, 0);
    c.cnot(0, 1).unwrap();
    assert_eq!(validate(&c, &m, DirectionPolicy::Strict).unwrap().len(), 1);
    assert!(validate(&c, &m, DirectionPolicy::AllowReversed).unwrap().is_empty());
    let mut c = Circuit::new(3, 0);
    c.toffoli(0, 1, 2).unwrap();
    let v = validate(&c, &m, DirectionPolicy::AllowReversed).unwrap();
    assert_eq!(v[0].reason, "requires decomposition");
    assert!(matches!(validate(&Circuit::new(15, 0), &m, DirectionPolicy::Strict), Err(Error::Capacity { .. })));
}

#[test]
fn toffoli_network_matches_matrix() {
    let mut c = Circuit::new(3, 0);
    c.toffoli(0, 1, 2).unwrap();
    let d = decompose_toffoli(&c);
    assert_eq!(d.ops().len(), 15);
    let u = unitary_of::<f64>(&d).unwrap();
    assert!(u.max_distance(&unitary_of::<f64>(&c).unwrap()) < 1e-10);
    assert_eq!(decompose_toffoli(&d), d);
    let mut plain = Circuit::new(2, 0);
    plain.h(0).unwrap().cnot(0, 1).unwrap();
    assert_eq!(decompose_toffoli(&plain), plain);
}

#[test]
fn valid_circuit_routes_unchanged() {
    let m = melbourne_map();
    let mut c = Circuit::new(4, 0);
    c.h(1).unwrap().cnot(1, 2).unwrap().cnot(2, 3).unwrap();
    let r = route(&c, &m).unwrap();
    assert_eq!(r.swaps_inserted, 0);
    assert_eq!(r.final_layout, r.initial_layout);
    assert_eq!(r.circuit.ops(), c.ops());
}

#[test]
fn unchanged_route_has_no_equivalence_error() {
    // Norm rounding of ~1e-16 must not show up as a ~1e-8 error.
    let m = CouplingMap::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
    let mut c = Circuit::new(4, 0);
    c.ry(0, 2.834790743439407).unwrap();
    let r = route(&c, &m).unwrap();
    assert_eq!(routing_equivalence_error(&c, &r).unwrap(), 0.0);
}

#[test]
fn long_cnot_walks_the_chain() {
    let m = melbourne_map();
    assert_eq!(m.shortest_path(0, 3).unwrap(), vec![0, 1, 2, 3]);
    let mut c = Circuit::new(4, 0);
    c.h(0).unwrap().cnot(0, 3).unwrap();
    let r = route(&c, &m).unwrap();
    assert_eq!(r.swaps_inserted, 2);
    assert_eq!(&r.final_layout[..4], &[2, 0, 1, 3]);
    assert!(validate(&r.circuit, &m, DirectionPolicy::Strict).unwrap().is_empty());
    assert!(routing_equivalence_error(&c, &r).unwrap() < 1e-8);
}

#[test]
fn unroutable_on_disconnected_map() {
    let m = CouplingMap::new(4, [(0, 1), (2, 3)]).unwrap();
    let mut c = Circuit::new(4, 0);
    c.cnot(0, 3).unwrap();
    assert!(matches!(route(&c, &m), Err(Error::Routing(_))));
    let mut t = Circuit::new(3, 0);
    t.toffoli(0, 1, 2).unwrap();
    assert!(matches!(route(&t, &melbourne_map()), Err(Error::Routing(_))));
}

fn random_connected_map(rng: &mut ChaCha8Rng, n: usize) -> CouplingMap {
    let mut edges = Vec::new();
    for q in 1..n {
        let p = rng.gen_range(0..q);
        edges.push(if rng.gen() { (p, q) } else { (q, p) });
    }
    for _ in 0..rng.gen_range(0..n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && !edges.contains(&(b, a)) {
            edges.push((a, b));
        }
    }
    CouplingMap::new(n, edges).unwrap()
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n, 0);
    for _ in 0..len {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n);
        while n > 1 && b == a {
            b = rng.gen_range(0..n);
        }
        match rng.gen_range(0..7) {
            0 => c.h(a),
            1 => c.t(a),
            2 => c.ry(a, rng.gen_range(0.0..6.3)),
            3 | 4 if n > 1 => c.cnot(a, b),
            5 if n > 1 => c.cz(a, b),
            6 if n > 1 => c.swap(a, b),
            _ => c.s(a),
        }
        .unwrap();
    }
    c
}

#[test]
fn random_routing_preserves_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let n = rng.gen_range(2..=6);
        let map = random_connected_map(&mut rng, n);
        let c = random_circuit(&mut rng, n, 24);
        let r = route(&c, &map).unwrap();
        assert!(validate(&r.circuit, &map, DirectionPolicy::Strict).unwrap().is_empty());
        let err = routing_equivalence_error(&c, &r).unwrap();
        assert!(err < 1e-8, "case {case}: error {err}");
    }
}

#[test]
fn routed_pipelines_validate() {
    let m = melbourne_map();
    let bitflip = build_bitflip_tec_circuit(&ErrorSpec::none(), &TecOptions::default()).unwrap();
    let faithful = TecOptions {
        device_faithful: true,
        ..TecOptions::default()
    };
    let erasure = build_erasure_tec_circuit(&ErrorSpec::none(), &faithful).unwrap();
    // Swap counts are regression numbers for the greedy router, not optima.
    for (c, swaps) in [(&bitflip.circuit, 69), (&erasure.circuit, 82)] {
        let r = route(&decompose_toffoli(c), &m).unwrap();
        assert_eq!(r.swaps_inserted, swaps);
        assert!(validate(&r.circuit, &m, DirectionPolicy::AllowReversed).unwrap().is_empty());
        let t = truncate(&decompose_toffoli(c), 8);
        let rt = route(&t, &m).unwrap();
        assert!(routing_equivalence_error(&t, &rt).unwrap() < 1e-8);
    }
}
