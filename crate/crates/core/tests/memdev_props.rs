mod common;

use common::{exhaustive_fifo_check, overlap_fidelity, RefSim};
use proptest::prelude::*;
use qmem_core::memdev::{cell_purity, qmc_swap, CellStatus, OccupiedPolicy, RaqmDevice};
use qmem_core::statevec::{GateSpec, StateVector};
use qmem_core::{rng_from_seed, Error};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn store_then_load_is_identity(seed in any::<u64>(), addr in 0i64..3, bus in 0usize..2) {
        // qubits 0..2 hold a random entangled state, 2..5 are cells
        let amps = common::random_amplitudes(2, seed);
        let mut start = StateVector::<f64>::from_amplitudes(amps).unwrap().pad_zero_qubits(3).unwrap();
        let mut s = start.clone();
        let mut dev = RaqmDevice::new(vec![2, 3, 4]);
        dev.store(&mut s, addr, bus).unwrap();
        prop_assert_eq!(dev.status(addr as usize), CellStatus::Occupied);
        prop_assert!(s.prob_one(bus).unwrap() < 1e-12);
        dev.load(&mut s, addr, bus).unwrap();
        prop_assert_eq!(dev.status(addr as usize), CellStatus::Reset);
        start.set_label(0, s.labels()[0].clone());
        prop_assert!(s.fidelity(&start).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn store_matches_reference_swap(seed in any::<u64>(), addr in 0i64..2) {
        let amps = common::random_amplitudes(3, seed);
        let mut s = StateVector::<f64>::from_amplitudes(amps).unwrap().pad_zero_qubits(2).unwrap();
        let mut r = RefSim { amps: s.amplitudes().to_vec(), n: 5 };
        RaqmDevice::new(vec![3, 4]).store(&mut s, addr, 1).unwrap();
        r.apply(&GateSpec::swap(1, 3 + addr as usize));
        prop_assert!(overlap_fidelity(s.amplitudes(), &r.amps) > 1.0 - 1e-12);
    }

    #[test]
    fn swap_is_an_involution(seed in any::<u64>(), a in 0usize..4, b in 0usize..4) {
        prop_assume!(a != b);
        let start = StateVector::<f64>::random(4, &mut rng_from_seed(seed));
        let mut s = start.clone();
        qmc_swap(&mut s, a, b).unwrap();
        qmc_swap(&mut s, a, b).unwrap();
        prop_assert!(s.fidelity(&start).unwrap() > 1.0 - 1e-12);
    }
}

#[test]
fn stored_bell_half_is_maximally_mixed() {
    let mut s = StateVector::<f64>::basis(3, 0).unwrap();
    s.apply_gate(&GateSpec::h(0)).unwrap();
    s.apply_gate(&GateSpec::cnot(0, 1)).unwrap();
    let mut dev = RaqmDevice::new(vec![2]);
    dev.store(&mut s, 0, 1).unwrap();
    assert!((cell_purity(&s, 2).unwrap() - 0.5).abs() < 1e-9);
    assert!(dev.dump(&s).unwrap().contains("entangled"));
}

#[test]
fn occupied_cell_policy() {
    let mut s = StateVector::<f64>::basis(3, 0b011).unwrap();
    let mut strict = RaqmDevice::new(vec![2]);
    strict.store(&mut s, 0, 0).unwrap();
    assert!(matches!(strict.store(&mut s, 0, 1), Err(Error::Policy(_))));

    let mut s = StateVector::<f64>::basis(3, 0b001).unwrap();
    let mut lax = RaqmDevice::new(vec![2]).with_policy(OccupiedPolicy::Swap);
    lax.store(&mut s, 0, 0).unwrap();
    lax.store(&mut s, 0, 1).unwrap();
    // bus 1 received the old contents (|1⟩), cell now holds |0⟩ from bus 1
    assert!((s.prob_one(1).unwrap() - 1.0).abs() < 1e-12);
    assert!(s.prob_one(2).unwrap() < 1e-12);
}

#[test]
fn out_of_range_address() {
    let mut s = StateVector::<f64>::basis(2, 0).unwrap();
    let mut dev = RaqmDevice::new(vec![1]);
    assert!(matches!(dev.store(&mut s, 1, 0), Err(Error::Address { addr: 1, size: 1 })));
    assert!(matches!(dev.load(&mut s, -1, 0), Err(Error::Address { .. })));
}

#[test]
fn mreset_clears_cells() {
    let mut s = StateVector::<f64>::basis(3, 0).unwrap();
    s.apply_gate(&GateSpec::h(0)).unwrap();
    let mut dev = RaqmDevice::new(vec![1, 2]);
    dev.store(&mut s, 1, 0).unwrap();
    let out = dev.reset(&mut s, None, &mut rng_from_seed(3)).unwrap();
    assert_eq!(out.len(), 2);
    assert!(s.prob_one(2).unwrap() < 1e-12);
    assert_eq!(dev.status(1), CellStatus::Reset);
}

#[test]
fn buffer_fifo_exhaustive() {
    // capacities 1..=3, every sequence of up to 6 operations
    assert_eq!(exhaustive_fifo_check(3, 6), 3 * 127);
}
