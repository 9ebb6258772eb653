//! Router-tree gate sequence.
//!
//! Router `(l, p)` (level `l`, position `p` in `[0, 2^l)`) stores address bit
//! `a_{n-1-l}`, so the root routes on the most significant bit and leaf `p`
//! is address `p`. Address bits and the bus travel down one shared channel
//! qubit per depth; a move into router or leaf `(l, p)` is conditioned on the
//! routers along the path to `p`.

use super::{Coupling, Direction, QramDevice, QramMode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::statevec::GateSpec;

/// Qubit assignment for one circuit-backend query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouterLayout {
    pub addr: Vec<usize>,
    pub bus: Vec<usize>,
    pub memory: Vec<usize>,
    pub routers: Vec<usize>,
    pub channels: Vec<usize>,
}

impl RouterLayout {
    /// Packs address, bus, memory, routers and channels consecutively from 0.
    pub fn standard(addr_len: usize, word_len: usize) -> Self {
        let mut next = 0usize;
        let mut take = |k: usize| {
            let v: Vec<usize> = (next..next + k).collect();
            next += k;
            v
        };
        let cells = 1usize << addr_len;
        let addr = take(addr_len);
        let bus = take(word_len);
        let memory = take(cells * word_len);
        let routers = take(cells - 1);
        let channels = take(addr_len);
        RouterLayout { addr, bus, memory, routers, channels }
    }

    pub fn total_qubits(&self) -> usize {
        self.addr.len() + self.bus.len() + self.memory.len() + self.routers.len() + self.channels.len()
    }

    /// Qubits of the data path (address, bus, memory).
    pub fn data_qubits(&self) -> Vec<usize> {
        self.addr.iter().chain(&self.bus).chain(&self.memory).copied().collect()
    }

    /// Routers followed by channels.
    pub fn ancilla_qubits(&self) -> Vec<usize> {
        self.routers.iter().chain(&self.channels).copied().collect()
    }

    fn router(&self, level: usize, pos: usize) -> usize {
        self.routers[(1 << level) - 1 + pos]
    }

    /// Positive and negative controls selecting node `p` at depth `depth`.
    fn path(&self, depth: usize, p: usize) -> (Vec<usize>, Vec<usize>) {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for d in 0..depth {
            let r = self.router(d, p >> (depth - d));
            if (p >> (depth - 1 - d)) & 1 == 1 {
                pos.push(r);
            } else {
                neg.push(r);
            }
        }
        (pos, neg)
    }

    /// Channel qubit at depth `d` (1-based).
    fn channel(&self, d: usize) -> usize {
        self.channels[d - 1]
    }

    /// Moves `src` down to the channel at `depth`.
    fn descend<T: Scalar>(&self, src: usize, depth: usize, out: &mut Vec<GateSpec<T>>) {
        out.push(GateSpec::swap(src, self.channel(1)));
        for d in 1..depth {
            out.push(GateSpec::swap(self.channel(d), self.channel(d + 1)));
        }
    }
}

/// Gate sequence realizing `mode` on `layout`; every router and channel
/// returns to |0⟩ when it starts there.
pub fn build_router_program<T: Scalar>(
    device: &QramDevice,
    mode: QramMode,
    layout: &RouterLayout,
) -> Result<Vec<GateSpec<T>>> {
    let n = device.addr_len();
    let w = device.word_len();
    let cells = device.cells();
    if layout.total_qubits() > device.max_qubits() {
        return Err(Error::Resource(format!(
            "router circuit for {n} address bits needs {} qubits, qubit budget is {}",
            layout.total_qubits(),
            device.max_qubits()
        )));
    }
    if layout.addr.len() != n
        || layout.bus.len() != w
        || layout.memory.len() != cells * w
        || layout.routers.len() != cells - 1
        || layout.channels.len() != n
    {
        return Err(Error::Argument("router layout does not match device shape".into()));
    }
    let mut all: Vec<usize> = layout.data_qubits();
    all.extend(layout.ancilla_qubits());
    all.sort_unstable();
    if all.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Argument("router layout reuses a qubit".into()));
    }

    let mut load: Vec<GateSpec<T>> = Vec::new();
    for l in 0..n {
        let a = layout.addr[n - 1 - l];
        if l == 0 {
            load.push(GateSpec::swap(a, layout.router(0, 0)));
            continue;
        }
        layout.descend(a, l, &mut load);
        for p in 0..1usize << l {
            let (pos, neg) = layout.path(l, p);
            load.push(
                GateSpec::swap(layout.channel(l), layout.router(l, p))
                    .controlled(&pos)
                    .neg_controlled(&neg),
            );
        }
    }

    let mut program = load.clone();
    for (i, &b) in layout.bus.iter().enumerate() {
        let mut down = Vec::new();
        layout.descend(b, n, &mut down);
        program.extend(down.iter().cloned());
        let leaf = layout.channel(n);
        for p in 0..cells {
            let (pos, neg) = layout.path(n, p);
            let cell = layout.memory[p * w + i];
            let coupling = match (mode.direction, mode.coupling) {
                (Direction::Read, Coupling::Cnot) => GateSpec::cnot(cell, leaf),
                (Direction::Write, Coupling::Cnot) => GateSpec::cnot(leaf, cell),
                (_, Coupling::Swap) => GateSpec::swap(leaf, cell),
            };
            program.push(coupling.controlled(&pos).neg_controlled(&neg));
        }
        program.extend(down.into_iter().rev());
    }
    program.extend(load.into_iter().rev());
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::StateVector;

    #[test]
    fn standard_layout_sizes() {
        let l = RouterLayout::standard(3, 1);
        assert_eq!(l.total_qubits(), 22);
        assert_eq!(l.routers.len(), 7);
        assert_eq!(l.channels.len(), 3);
    }

    #[test]
    fn budget_limits_address_bits() {
        let d = QramDevice::new(4, 1).unwrap();
        let l = RouterLayout::standard(4, 1);
        let mode = QramMode::all()[0];
        assert!(matches!(build_router_program::<f64>(&d, mode, &l), Err(Error::Resource(_))));
    }

    #[test]
    fn single_address_bit_circuit() {
        let d = QramDevice::new(1, 1).unwrap();
        let l = RouterLayout::standard(1, 1);
        let mode: QramMode = "read-quantum-swap".parse().unwrap();
        let prog = build_router_program::<f64>(&d, mode, &l).unwrap();
        // load, bus in, two leaf couplings, bus out, unload
        assert_eq!(prog.len(), 6);
        // addr=|1⟩, memory cell 1 = |1⟩: the bus picks it up
        let (a, b, m1) = (l.addr[0], l.bus[0], l.memory[1]);
        let mut s = StateVector::<f64>::basis(l.total_qubits(), (1 << a) | (1 << m1)).unwrap();
        s.apply_all(&prog).unwrap();
        assert_eq!(s, StateVector::basis(l.total_qubits(), (1 << a) | (1 << b)).unwrap());
    }
}
