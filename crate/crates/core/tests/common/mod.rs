//! Independent reference simulator and numeric helpers shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use qmem_core::statevec::{GateKind, GateSpec};

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Matrix of a single-target gate, written out from the textbook definitions.
pub fn reference_matrix(kind: &GateKind<f64>) -> [[C; 2]; 2] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ph = |a: f64| C::from_polar(1.0, a);
    match *kind {
        GateKind::U { theta, phi, lambda } => {
            let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            [[c(co, 0.0), -ph(lambda) * si], [ph(phi) * si, ph(phi + lambda) * co]]
        }
        GateKind::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        GateKind::X => [[o, l], [l, o]],
        GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        GateKind::Z => [[l, o], [o, -l]],
        GateKind::S => [[l, o], [o, c(0.0, 1.0)]],
        GateKind::Sdg => [[l, o], [o, c(0.0, -1.0)]],
        GateKind::T => [[l, o], [o, ph(PI / 4.0)]],
        GateKind::Tdg => [[l, o], [o, ph(-PI / 4.0)]],
        GateKind::Phase(a) => [[l, o], [o, ph(a)]],
        GateKind::Rx(a) => {
            let (co, si) = ((a / 2.0).cos(), (a / 2.0).sin());
            [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]]
        }
        GateKind::Ry(a) => {
            let (co, si) = ((a / 2.0).cos(), (a / 2.0).sin());
            [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]]
        }
        GateKind::Rz(a) => [[ph(-a / 2.0), o], [o, ph(a / 2.0)]],
        GateKind::Rk(k) => [[l, o], [o, ph(2.0 * PI / 2f64.powi(k as i32))]],
        GateKind::Swap => unreachable!("two-qubit gate"),
    }
}

/// Dense reference simulator over plain complex vectors.
#[derive(Debug, Clone)]
pub struct RefSim {
    pub amps: Vec<C>,
    pub n: usize,
}

impl RefSim {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        RefSim { amps, n }
    }

    fn fires(g: &GateSpec<f64>, i: usize) -> bool {
        g.controls.iter().all(|&q| i >> q & 1 == 1) && g.neg_controls.iter().all(|&q| i >> q & 1 == 0)
    }

    pub fn apply(&mut self, g: &GateSpec<f64>) {
        let old = self.amps.clone();
        match g.kind {
            GateKind::Swap => {
                let (a, b) = (g.targets[0], g.targets[1]);
                for i in 0..old.len() {
                    if Self::fires(g, i) {
                        let (ba, bb) = (i >> a & 1, i >> b & 1);
                        let j = (i & !(1 << a) & !(1 << b)) | (bb << a) | (ba << b);
                        self.amps[j] = old[i];
                    }
                }
            }
            ref k => {
                let m = reference_matrix(k);
                let t = g.targets[0];
                for i in 0..old.len() {
                    if Self::fires(g, i) {
                        let bit = i >> t & 1;
                        let i0 = i & !(1 << t);
                        let i1 = i0 | (1 << t);
                        self.amps[i] = m[bit][0] * old[i0] + m[bit][1] * old[i1];
                    }
                }
            }
        }
    }

    /// Projects qubit `q` onto `outcome` and renormalizes.
    pub fn project(&mut self, q: usize, outcome: u8) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> q & 1) as u8 != outcome {
                *a = c(0.0, 0.0);
            }
        }
        let norm = self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
    }

    pub fn flip(&mut self, q: usize) {
        let old = self.amps.clone();
        for (i, a) in old.into_iter().enumerate() {
            self.amps[i ^ (1 << q)] = a;
        }
    }
}

pub fn overlap_fidelity(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm_sqr()
}

/// `(1/√N) Σ_y e^{+2πi jy/N}` applied to `v`, by direct summation.
pub fn dft(v: &[C]) -> Vec<C> {
    let n = v.len();
    (0..n)
        .map(|y| {
            v.iter()
                .enumerate()
                .map(|(j, a)| a * C::from_polar(1.0, 2.0 * PI * (j * y) as f64 / n as f64))
                .sum::<C>()
                / (n as f64).sqrt()
        })
        .collect()
}

/// Amplitudes of the sub-register `qubits` (listed LSB first) when every other
/// qubit is in a fixed basis state. Returns `None` if the rest is not a product.
pub fn register_state(amps: &[C], qubits: &[usize]) -> Option<Vec<C>> {
    let mask: usize = qubits.iter().map(|q| 1 << q).sum();
    let mut rest = None;
    let mut out = vec![c(0.0, 0.0); 1 << qubits.len()];
    for (i, a) in amps.iter().enumerate() {
        if a.norm_sqr() < 1e-20 {
            continue;
        }
        let r = i & !mask;
        if *rest.get_or_insert(r) != r {
            return None;
        }
        let k = qubits.iter().enumerate().fold(0, |k, (b, &q)| k | ((i >> q & 1) << b));
        out[k] = *a;
    }
    Some(out)
}

/// Haar-ish random normalized vector from a simple LCG, independent of the library RNG.
pub fn random_amplitudes(n: usize, seed: u64) -> Vec<C> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut v: Vec<C> = (0..1 << n).map(|_| c(next(), next())).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}

/// Runs every read/write sequence up to `max_len` against a buffer of each
/// capacity `1..=max_cap` and an in-test FIFO model. Each write carries a
/// distinct single-qubit state; each successful read must return the state the
/// model predicts. Returns the number of sequences checked.
pub fn exhaustive_fifo_check(max_cap: usize, max_len: usize) -> usize {
    use qmem_core::memdev::{BufferDevice, BufferStatus};
    use qmem_core::statevec::StateVector;
    use std::collections::VecDeque;

    let mut checked = 0;
    for cap in 1..=max_cap {
        for len in 0..=max_len {
            for ops in 0..1u32 << len {
                let bus = cap;
                let mut s = StateVector::<f64>::basis(cap + 1, 0).unwrap();
                let mut dev = BufferDevice::new((0..cap).collect());
                let mut model: VecDeque<usize> = VecDeque::new();
                let mut rng = qmem_core::rng_from_seed(ops as u64);
                for step in 0..len {
                    let write = ops >> step & 1 == 1;
                    if write {
                        let g = tag_gate(step, bus);
                        s.apply_gate(&g).unwrap();
                        let st = dev.write(&mut s, bus).unwrap();
                        if model.len() < cap {
                            assert_eq!(st, BufferStatus::WriteStored);
                            assert_eq!(st.sf_bit(), 0);
                            model.push_back(step);
                        } else {
                            assert_eq!(st, BufferStatus::WriteOverflow);
                            assert_eq!(st.sf_bit(), 1);
                            // rejected state stays on the bus
                            let got = s.single_qubit_state(bus, 1e-9).unwrap().expect("bus is a product state");
                            assert!(qubit_overlap(&got, &tag_state(step)) > 1.0 - 1e-12);
                        }
                    } else {
                        let st = dev.read(&mut s, bus).unwrap();
                        match model.pop_front() {
                            Some(tag) => {
                                assert_eq!(st, BufferStatus::ReadSuccess);
                                assert_eq!(st.sf_bit(), 1);
                                let got = s.single_qubit_state(bus, 1e-9).unwrap().expect("bus is a product state");
                                assert!(qubit_overlap(&got, &tag_state(tag)) > 1.0 - 1e-12, "cap {cap} ops {ops:b}");
                            }
                            None => {
                                assert_eq!(st, BufferStatus::ReadUnderflow);
                                assert_eq!(st.sf_bit(), 0);
                                assert!(s.prob_one(bus).unwrap() < 1e-12);
                            }
                        }
                    }
                    assert_eq!(dev.len(), model.len());
                    s.reset_qubit(bus, &mut rng).unwrap();
                }
                checked += 1;
            }
        }
    }
    checked
}

fn tag_angles(step: usize) -> (f64, f64) {
    (0.3 + 0.4 * step as f64, 0.7 * step as f64 + 0.1)
}

fn tag_gate(step: usize, q: usize) -> GateSpec<f64> {
    let (theta, phi) = tag_angles(step);
    GateSpec::u(theta, phi, 0.0, q)
}

fn tag_state(step: usize) -> [C; 2] {
    let (theta, phi) = tag_angles(step);
    [c((theta / 2.0).cos(), 0.0), C::from_polar((theta / 2.0).sin(), phi)]
}

pub fn qubit_overlap(a: &[C; 2], b: &[C; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// Checks the oracle on every basis address and on the uniform superposition.
pub fn oracle_is_exact(n: usize, x: &[bool]) -> bool {
    let addr: Vec<usize> = (0..n).collect();
    let bus = [n];
    let mut dev = qmem_core::qram::QramDevice::new(n, 1).unwrap();
    dev.qinit_load(x).unwrap();
    for j in 0..1usize << n {
        let mut s = qmem_core::statevec::StateVector::<f64>::basis(n + 1, j).unwrap();
        dev.oracle_query(&mut s, &addr, &bus).unwrap();
        let want = j | (x[j] as usize) << n;
        if (s.amplitude(want).re - 1.0).abs() > 1e-10 {
            return false;
        }
    }
    let mut s = qmem_core::statevec::StateVector::<f64>::basis(n + 1, 0).unwrap();
    for &q in &addr {
        s.apply_gate(&GateSpec::h(q)).unwrap();
    }
    dev.oracle_query(&mut s, &addr, &bus).unwrap();
    let a = 2f64.powf(-(n as f64) / 2.0);
    (0..1usize << (n + 1)).all(|i| {
        let j = i & ((1 << n) - 1);
        let expected = if i >> n & 1 == x[j] as usize { a } else { 0.0 };
        (s.amplitude(i).re - expected).abs() < 1e-10 && s.amplitude(i).im.abs() < 1e-10
    })
}
