use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Read,
    Write,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataKind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Cnot,
    Swap,
}

/// One of the eight read/write operation modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QramMode {
    pub direction: Direction,
    pub data_kind: DataKind,
    pub coupling: Coupling,
}

/// Entanglement structure left behind by a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// Address and bus entangled, memory product.
    AddrBus,
    /// Address, bus and memory all entangled.
    All,
    /// Address and memory entangled, bus product.
    AddrQmc,
    Unclassified,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::AddrBus => "addr, b",
            Pattern::All => "all",
            Pattern::AddrQmc => "addr, QMC",
            Pattern::Unclassified => "unclassified",
        })
    }
}

impl QramMode {
    pub const fn new(direction: Direction, data_kind: DataKind, coupling: Coupling) -> Self {
        QramMode { direction, data_kind, coupling }
    }

    /// All eight modes in table order.
    pub fn all() -> [QramMode; 8] {
        use Coupling::*;
        use DataKind::*;
        use Direction::*;
        [
            Self::new(Read, Classical, Cnot),
            Self::new(Read, Classical, Swap),
            Self::new(Read, Quantum, Cnot),
            Self::new(Read, Quantum, Swap),
            Self::new(Write, Classical, Cnot),
            Self::new(Write, Classical, Swap),
            Self::new(Write, Quantum, Cnot),
            Self::new(Write, Quantum, Swap),
        ]
    }

    pub fn index(&self) -> usize {
        Self::all().iter().position(|m| m == self).expect("mode is listed")
    }

    /// Entanglement pattern expected on generic inputs.
    pub fn expected_pattern(&self) -> Pattern {
        match (self.direction, self.data_kind, self.coupling) {
            (Direction::Read, DataKind::Classical, Coupling::Cnot) => Pattern::AddrBus,
            (Direction::Read, _, _) => Pattern::All,
            (Direction::Write, _, Coupling::Cnot) => Pattern::All,
            (Direction::Write, _, Coupling::Swap) => Pattern::AddrQmc,
        }
    }

    /// Whether the mode needs memory qubits in the state.
    pub fn needs_memory(&self) -> bool {
        !(self.direction == Direction::Read
            && self.data_kind == DataKind::Classical
            && self.coupling == Coupling::Cnot)
    }
}

impl fmt::Display for QramMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Read => "read",
            Direction::Write => "write",
        };
        let k = match self.data_kind {
            DataKind::Classical => "classical",
            DataKind::Quantum => "quantum",
        };
        let c = match self.coupling {
            Coupling::Cnot => "cnot",
            Coupling::Swap => "swap",
        };
        write!(f, "{d}-{k}-{c}")
    }
}

impl FromStr for QramMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        QramMode::all()
            .into_iter()
            .find(|m| m.to_string() == lower)
            .ok_or_else(|| Error::Argument(format!("unknown QRAM mode `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_distinct_modes_round_trip() {
        let all = QramMode::all();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 8);
        for m in all {
            assert_eq!(m.to_string().parse::<QramMode>().unwrap(), m);
        }
        assert!("read-classical".parse::<QramMode>().is_err());
    }

    #[test]
    fn table_patterns() {
        let got: Vec<String> = QramMode::all().iter().map(|m| m.expected_pattern().to_string()).collect();
        assert_eq!(
            got,
            vec!["addr, b", "all", "all", "all", "all", "addr, QMC", "all", "addr, QMC"]
        );
    }
}
