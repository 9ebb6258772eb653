use crate::scalar::Scalar;
use crate::statevec::{GateKind, GateSpec};

/// Built-in gates: name, angle parameters, qubit operands.
pub const BUILTIN_GATES: &[(&str, usize, usize)] = &[
    ("U", 3, 1),
    ("u", 3, 1),
    ("u3", 3, 1),
    ("id", 0, 1),
    ("h", 0, 1),
    ("x", 0, 1),
    ("y", 0, 1),
    ("z", 0, 1),
    ("s", 0, 1),
    ("sdg", 0, 1),
    ("t", 0, 1),
    ("tdg", 0, 1),
    ("p", 1, 1),
    ("phase", 1, 1),
    ("u1", 1, 1),
    ("rx", 1, 1),
    ("ry", 1, 1),
    ("rz", 1, 1),
    ("cx", 0, 2),
    ("CX", 0, 2),
    ("cy", 0, 2),
    ("cz", 0, 2),
    ("ch", 0, 2),
    ("cp", 1, 2),
    ("cphase", 1, 2),
    ("crx", 1, 2),
    ("cry", 1, 2),
    ("crz", 1, 2),
    ("swap", 0, 2),
    ("ccx", 0, 3),
    ("cswap", 0, 3),
];

pub fn builtin_shape(name: &str) -> Option<(usize, usize)> {
    BUILTIN_GATES.iter().find(|(n, _, _)| *n == name).map(|&(_, p, q)| (p, q))
}

/// Expands a built-in gate; `None` for `id`. Shape must already match.
pub fn builtin_gate<T: Scalar>(name: &str, p: &[T], q: &[usize]) -> Option<GateSpec<T>> {
    let one = |k: GateKind<T>| GateSpec::new(k, vec![q[0]]);
    let ctl = |k: GateKind<T>| GateSpec::new(k, vec![q[1]]).controlled(&[q[0]]);
    Some(match name {
        "U" | "u" | "u3" => GateSpec::u(p[0], p[1], p[2], q[0]),
        "id" => return None,
        "h" => one(GateKind::H),
        "x" => one(GateKind::X),
        "y" => one(GateKind::Y),
        "z" => one(GateKind::Z),
        "s" => one(GateKind::S),
        "sdg" => one(GateKind::Sdg),
        "t" => one(GateKind::T),
        "tdg" => one(GateKind::Tdg),
        "p" | "phase" | "u1" => one(GateKind::Phase(p[0])),
        "rx" => one(GateKind::Rx(p[0])),
        "ry" => one(GateKind::Ry(p[0])),
        "rz" => one(GateKind::Rz(p[0])),
        "cx" | "CX" => ctl(GateKind::X),
        "cy" => ctl(GateKind::Y),
        "cz" => ctl(GateKind::Z),
        "ch" => ctl(GateKind::H),
        "cp" | "cphase" => ctl(GateKind::Phase(p[0])),
        "crx" => ctl(GateKind::Rx(p[0])),
        "cry" => ctl(GateKind::Ry(p[0])),
        "crz" => ctl(GateKind::Rz(p[0])),
        "swap" => GateSpec::swap(q[0], q[1]),
        "ccx" => GateSpec::x(q[2]).controlled(&[q[0], q[1]]),
        "cswap" => GateSpec::swap(q[1], q[2]).controlled(&[q[0]]),
        _ => return None,
    })
}
