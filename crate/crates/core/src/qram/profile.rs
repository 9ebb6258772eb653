use super::{Pattern, QramDevice};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::statevec::StateVector;

/// Purity at or above this marks a product subsystem.
pub const PRODUCT_MIN: f64 = 1.0 - 1e-6;
/// Purity at or below this marks an entangled subsystem.
pub const ENTANGLED_MAX: f64 = 1.0 - 1e-3;

/// Reduced purities of the named partitions after a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementProfile<T> {
    pub addr: T,
    pub bus: T,
    pub memory: T,
    pub addr_bus: T,
    pub addr_memory: T,
}

impl<T: Scalar> EntanglementProfile<T> {
    pub fn entries(&self) -> [(&'static str, T); 5] {
        [
            ("addr", self.addr),
            ("bus", self.bus),
            ("memory", self.memory),
            ("addr+bus", self.addr_bus),
            ("addr+memory", self.addr_memory),
        ]
    }

    pub fn classify(&self) -> Pattern {
        let product = |p: T| p.to_f64().unwrap_or(0.0) >= PRODUCT_MIN;
        let entangled = |p: T| p.to_f64().unwrap_or(1.0) <= ENTANGLED_MAX;
        if product(self.memory) && entangled(self.addr) && entangled(self.bus) {
            Pattern::AddrBus
        } else if product(self.bus) && entangled(self.addr) && entangled(self.memory) {
            Pattern::AddrQmc
        } else if entangled(self.addr) && entangled(self.bus) && entangled(self.memory) {
            Pattern::All
        } else {
            Pattern::Unclassified
        }
    }
}

fn purity<T: Scalar>(state: &StateVector<T>, subset: &[usize]) -> Result<T> {
    if subset.is_empty() || subset.len() == state.num_qubits() {
        return Ok(T::one());
    }
    state.reduced_purity(subset)
}

/// Purities of address, bus and memory partitions. Without materialized
/// memory the memory is classical and reported as product.
pub fn entanglement_profile<T: Scalar>(
    state: &StateVector<T>,
    device: &QramDevice,
    addr: &[usize],
    bus: &[usize],
) -> Result<EntanglementProfile<T>> {
    let mem: Vec<usize> = device.memory_qubits().map(<[usize]>::to_vec).unwrap_or_default();
    let cat = |a: &[usize], b: &[usize]| a.iter().chain(b).copied().collect::<Vec<_>>();
    Ok(EntanglementProfile {
        addr: purity(state, addr)?,
        bus: purity(state, bus)?,
        memory: purity(state, &mem)?,
        addr_bus: purity(state, &cat(addr, bus))?,
        addr_memory: purity(state, &cat(addr, &mem))?,
    })
}
