mod common;

use common::{overlap_fidelity, RefSim};
use proptest::prelude::*;
use qmem_core::statevec::{GateKind, GateSpec, StateVector};
use qmem_core::{rng_from_seed, Error};

const N: usize = 4;

fn kind() -> impl Strategy<Value = GateKind<f64>> {
    let a = -6.3f64..6.3;
    prop_oneof![
        Just(GateKind::H),
        Just(GateKind::X),
        Just(GateKind::Y),
        Just(GateKind::Z),
        Just(GateKind::S),
        Just(GateKind::Sdg),
        Just(GateKind::T),
        Just(GateKind::Tdg),
        a.clone().prop_map(GateKind::Phase),
        a.clone().prop_map(GateKind::Rx),
        a.clone().prop_map(GateKind::Ry),
        a.clone().prop_map(GateKind::Rz),
        (1u32..6).prop_map(GateKind::Rk),
        (a.clone(), a.clone(), a).prop_map(|(theta, phi, lambda)| GateKind::U { theta, phi, lambda }),
        Just(GateKind::Swap),
    ]
}

/// A gate on distinct qubits of an `N`-qubit register with up to two controls of each polarity.
fn gate() -> impl Strategy<Value = GateSpec<f64>> {
    (kind(), Just((0..N).collect::<Vec<_>>()).prop_shuffle(), 0usize..3, 0usize..2).prop_map(|(k, order, nc, nn)| {
        let arity = k.arity();
        let nc = nc.min(N - arity);
        let nn = nn.min(N - arity - nc);
        GateSpec::new(k, order[..arity].to_vec())
            .controlled(&order[arity..arity + nc])
            .neg_controlled(&order[arity + nc..arity + nc + nn])
    })
}

fn to_ref(s: &StateVector<f64>) -> RefSim {
    RefSim { amps: s.amplitudes().to_vec(), n: s.num_qubits() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gates_match_reference_simulator(gates in prop::collection::vec(gate(), 1..12), seed in any::<u64>()) {
        let mut s = StateVector::<f64>::random(N, &mut rng_from_seed(seed));
        let mut r = to_ref(&s);
        for g in &gates {
            s.apply_gate(g).unwrap();
            r.apply(g);
        }
        prop_assert!(overlap_fidelity(s.amplitudes(), &r.amps) > 1.0 - 1e-12);
    }

    #[test]
    fn norm_is_preserved(gates in prop::collection::vec(gate(), 1..20), seed in any::<u64>()) {
        let mut s = StateVector::<f64>::random(N, &mut rng_from_seed(seed));
        for g in &gates {
            s.apply_gate(g).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn inverse_sequence_restores_state(gates in prop::collection::vec(gate(), 1..12), seed in any::<u64>()) {
        let start = StateVector::<f64>::random(N, &mut rng_from_seed(seed));
        let mut s = start.clone();
        for g in &gates {
            s.apply_gate(g).unwrap();
        }
        for g in gates.iter().rev() {
            s.apply_gate(&g.inverse()).unwrap();
        }
        prop_assert!(s.fidelity(&start).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in any::<u64>(), b in any::<u64>()) {
        let x = StateVector::<f64>::random(N, &mut rng_from_seed(a));
        let y = StateVector::<f64>::random(N, &mut rng_from_seed(b));
        let f = x.fidelity(&y).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - y.fidelity(&x).unwrap()).abs() < 1e-12);
        prop_assert!((x.fidelity(&x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_collapses_and_reports_probability(seed in any::<u64>(), q in 0..N) {
        let mut rng = rng_from_seed(seed);
        let mut s = StateVector::<f64>::random(N, &mut rng);
        let p1 = s.prob_one(q).unwrap();
        let (outcome, p) = s.measure(q, &mut rng).unwrap();
        let want = if outcome == 1 { p1 } else { 1.0 - p1 };
        prop_assert!((p - want).abs() < 1e-12);
        prop_assert!((s.prob_one(q).unwrap() - outcome as f64).abs() < 1e-12);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn purity_of_subsets_lies_in_range(seed in any::<u64>(), mask in 1u32..(1 << N) - 1) {
        let s = StateVector::<f64>::random(N, &mut rng_from_seed(seed));
        let subset: Vec<usize> = (0..N).filter(|q| mask >> q & 1 == 1).collect();
        let rest: Vec<usize> = (0..N).filter(|q| mask >> q & 1 == 0).collect();
        let p = s.reduced_purity(&subset).unwrap();
        let lower = 1.0 / (1u64 << subset.len().min(rest.len())) as f64;
        prop_assert!(p >= lower - 1e-9 && p <= 1.0 + 1e-9);
        // pure global state: both halves have equal purity
        prop_assert!((p - s.reduced_purity(&rest).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn product_states_have_unit_purity(a in any::<u64>(), b in any::<u64>()) {
        let x = StateVector::<f64>::random(2, &mut rng_from_seed(a));
        let y = StateVector::<f64>::random(2, &mut rng_from_seed(b));
        let s = x.tensor(&y);
        prop_assert!((s.reduced_purity(&[0, 1]).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn bell_pair_halves_are_maximally_mixed() {
    let mut s = StateVector::<f64>::basis(2, 0).unwrap();
    s.apply_gate(&GateSpec::h(0)).unwrap();
    s.apply_gate(&GateSpec::cnot(0, 1)).unwrap();
    assert!((s.reduced_purity(&[0]).unwrap() - 0.5).abs() < 1e-9);
    assert!((s.reduced_purity(&[1]).unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn forced_measurement_of_impossible_outcome_fails() {
    let mut s = StateVector::<f64>::basis(1, 0).unwrap();
    assert!(matches!(s.measure_forced(0, 1), Err(Error::PostSelection { .. })));
}

#[test]
fn budget_is_enforced() {
    assert!(matches!(StateVector::<f64>::basis_with_budget(10, 0, 8), Err(Error::Resource(_))));
}

#[test]
fn single_precision_tracks_double() {
    let mut a = StateVector::<f64>::basis(3, 0).unwrap();
    let mut b = StateVector::<f32>::basis(3, 0).unwrap();
    for q in 0..3 {
        a.apply_gate(&GateSpec::h(q)).unwrap();
        b.apply_gate(&GateSpec::h(q)).unwrap();
    }
    a.apply_gate(&GateSpec::rk(3, 2).unwrap().controlled(&[0])).unwrap();
    b.apply_gate(&GateSpec::rk(3, 2).unwrap().controlled(&[0])).unwrap();
    for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
        assert!((x.re - y.re as f64).abs() < 1e-6 && (x.im - y.im as f64).abs() < 1e-6);
    }
}
