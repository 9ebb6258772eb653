mod common;

use common::oracle_is_exact;

use proptest::prelude::*;
use qmem_core::qram::{entanglement_profile, generic_input, run_check, Pattern, QramDevice, QramMode};
use qmem_core::statevec::StateVector;
use qmem_core::{rng_from_seed, Error};
use rand::Rng;

fn random_data(cells: usize, seed: u64) -> Vec<bool> {
    let mut rng = rng_from_seed(seed);
    (0..cells).map(|_| rng.random()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn oracle_maps_addresses_to_data(n in 1usize..5, seed in any::<u64>()) {
        prop_assert!(oracle_is_exact(n, &random_data(1 << n, seed)));
    }

    #[test]
    fn second_query_uncomputes_bus(n in 1usize..4, seed in any::<u64>()) {
        let mut dev = QramDevice::new(n, 1).unwrap();
        dev.qinit_load(&random_data(1 << n, seed)).unwrap();
        let addr: Vec<usize> = (0..n).collect();
        let mut s = StateVector::<f64>::random(n, &mut rng_from_seed(seed)).pad_zero_qubits(1).unwrap();
        let start = s.clone();
        dev.oracle_query(&mut s, &addr, &[n]).unwrap();
        dev.oracle_query(&mut s, &addr, &[n]).unwrap();
        prop_assert!(s.fidelity(&start).unwrap() > 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circuit_backend_matches_functional(n in 1usize..4, mode in 0usize..8, seed in any::<u64>()) {
        let line = run_check(n, QramMode::all()[mode], seed).unwrap();
        prop_assert!(line.fidelity >= 1.0 - 1e-9, "{}", line);
        prop_assert!(line.ancillas_restored(), "{}", line);
    }
}

#[test]
fn word_lengths_above_one() {
    let mut dev = QramDevice::new(2, 3).unwrap();
    let x: Vec<bool> = (0..12).map(|k| k % 3 == 1 || k == 11).collect();
    dev.qinit_load(&x).unwrap();
    for j in 0..4 {
        let mut s = StateVector::<f64>::basis(5, j).unwrap();
        dev.oracle_query(&mut s, &[0, 1], &[2, 3, 4]).unwrap();
        let word = (0..3).fold(0, |w, i| w | (x[j * 3 + i] as usize) << i);
        assert!((s.amplitude(j | word << 2).re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn data_length_must_match() {
    let mut dev = QramDevice::new(4, 1).unwrap();
    assert!(dev.qinit_load(&[true; 15]).is_err());
    assert!(dev.qinit_load(&[true; 16]).is_ok());
}

#[test]
fn entanglement_patterns_on_generic_inputs() {
    for mode in QramMode::all() {
        let line = run_check(2, mode, 11).unwrap();
        assert_eq!(line.pattern, mode.expected_pattern(), "{line}");
        assert_ne!(line.pattern, Pattern::Unclassified);
    }
}

#[test]
fn read_classical_leaves_memory_untouched() {
    let mode = QramMode::all()[0];
    let (mut s, x) = generic_input(2, mode, &mut rng_from_seed(5));
    let mut dev = QramDevice::new(2, 1).unwrap().with_memory(vec![3, 4, 5, 6]).unwrap();
    dev.qinit_load(&x).unwrap();
    dev.apply_mode(&mut s, mode, &[0, 1], &[2]).unwrap();
    let p = entanglement_profile(&s, &dev, &[0, 1], &[2]).unwrap();
    assert!(p.memory > 1.0 - 1e-9);
    assert!(p.bus < 1.0 - 1e-3);
}

#[test]
fn circuit_budget_is_enforced() {
    assert!(matches!(run_check(5, QramMode::all()[0], 0), Err(Error::Resource(_))));
}
