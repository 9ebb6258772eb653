//! Gate descriptions and their 2x2 matrices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major single-qubit matrix.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind<T> {
    /// OpenQASM 3 `U(θ, φ, λ)`.
    U { theta: T, phi: T, lambda: T },
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    /// `diag(1, e^{iλ})`.
    Phase(T),
    Rx(T),
    Ry(T),
    Rz(T),
    /// `diag(1, e^{i2π/2^k})`, `k ≥ 1`.
    Rk(u32),
    Swap,
}

/// A gate kind bound to qubits.
///
/// `controls` fire on |1⟩, `neg_controls` fire on |0⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec<T> {
    pub kind: GateKind<T>,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
    pub neg_controls: Vec<usize>,
}

fn c<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

impl<T: Scalar> GateKind<T> {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::U { .. } => "u",
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Phase(_) => "p",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Rk(_) => "rk",
            GateKind::Swap => "swap",
        }
    }

    /// Single-qubit matrix, `None` for two-qubit kinds.
    pub fn matrix(&self) -> Option<Mat2<T>> {
        let zero = T::zero();
        let one = T::one();
        let two = T::lit(2.0);
        let phase = |a: T| Complex::from_polar(one, a);
        let m = match *self {
            GateKind::U { theta, phi, lambda } => {
                let (s, co) = ((theta / two).sin(), (theta / two).cos());
                [
                    [c(co, zero), -phase(lambda) * s],
                    [phase(phi) * s, phase(phi + lambda) * co],
                ]
            }
            GateKind::H => {
                let h = T::FRAC_1_SQRT_2();
                [[c(h, zero), c(h, zero)], [c(h, zero), c(-h, zero)]]
            }
            GateKind::X => [[c(zero, zero), c(one, zero)], [c(one, zero), c(zero, zero)]],
            GateKind::Y => [[c(zero, zero), c(zero, -one)], [c(zero, one), c(zero, zero)]],
            GateKind::Z => diag(c(-one, zero)),
            GateKind::S => diag(c(zero, one)),
            GateKind::Sdg => diag(c(zero, -one)),
            GateKind::T => diag(phase(T::FRAC_PI_4())),
            GateKind::Tdg => diag(phase(-T::FRAC_PI_4())),
            GateKind::Phase(l) => diag(phase(l)),
            GateKind::Rx(a) => {
                let (s, co) = ((a / two).sin(), (a / two).cos());
                [[c(co, zero), c(zero, -s)], [c(zero, -s), c(co, zero)]]
            }
            GateKind::Ry(a) => {
                let (s, co) = ((a / two).sin(), (a / two).cos());
                [[c(co, zero), c(-s, zero)], [c(s, zero), c(co, zero)]]
            }
            GateKind::Rz(a) => [
                [phase(-a / two), c(zero, zero)],
                [c(zero, zero), phase(a / two)],
            ],
            GateKind::Rk(k) => diag(phase(rk_angle::<T>(k))),
            GateKind::Swap => return None,
        };
        Some(m)
    }

    /// Kind of the adjoint gate.
    pub fn inverse(&self) -> GateKind<T> {
        match *self {
            GateKind::U { theta, phi, lambda } => GateKind::U { theta: -theta, phi: -lambda, lambda: -phi },
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Phase(a) => GateKind::Phase(-a),
            GateKind::Rx(a) => GateKind::Rx(-a),
            GateKind::Ry(a) => GateKind::Ry(-a),
            GateKind::Rz(a) => GateKind::Rz(-a),
            GateKind::Rk(k) => GateKind::Phase(-rk_angle::<T>(k)),
            other => other,
        }
    }
}

/// Phase angle `2π/2^k` of `R_k`.
pub fn rk_angle<T: Scalar>(k: u32) -> T {
    T::TAU() / T::lit(2.0).powi(k as i32)
}

fn diag<T: Scalar>(d: Complex<T>) -> Mat2<T> {
    [
        [c(T::one(), T::zero()), c(T::zero(), T::zero())],
        [c(T::zero(), T::zero()), d],
    ]
}

impl<T: Scalar> GateSpec<T> {
    pub fn new(kind: GateKind<T>, targets: Vec<usize>) -> Self {
        GateSpec { kind, targets, controls: Vec::new(), neg_controls: Vec::new() }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }

    pub fn u(theta: T, phi: T, lambda: T, q: usize) -> Self {
        Self::new(GateKind::U { theta, phi, lambda }, vec![q])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::x(target).controlled(&[control])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b])
    }

    /// `R_k` on `q`; `k` must be at least 1.
    pub fn rk(k: u32, q: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("R_k requires k >= 1".into()));
        }
        Ok(Self::new(GateKind::Rk(k), vec![q]))
    }

    /// Adds positive controls.
    pub fn controlled(mut self, controls: &[usize]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    /// Adds controls that fire when the qubit is |0⟩.
    pub fn neg_controlled(mut self, controls: &[usize]) -> Self {
        self.neg_controls.extend_from_slice(controls);
        self
    }

    pub fn inverse(&self) -> Self {
        GateSpec { kind: self.kind.inverse(), ..self.clone() }
    }

    /// All qubits the gate touches.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().chain(&self.controls).chain(&self.neg_controls).copied()
    }

    /// Checks arity, range and distinctness against an `n`-qubit register.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::Argument(format!(
                "gate {} expects {} target(s), got {}",
                self.kind.name(),
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if let GateKind::Rk(0) = self.kind {
            return Err(Error::Argument("R_k requires k >= 1".into()));
        }
        let mut seen = 0u128;
        let mut seen_big = std::collections::HashSet::new();
        for q in self.qubits() {
            if q >= n {
                return Err(Error::Argument(format!("qubit index {q} out of range for {n} qubits")));
            }
            let dup = if q < 128 {
                let dup = seen & (1 << q) != 0;
                seen |= 1 << q;
                dup
            } else {
                !seen_big.insert(q)
            };
            if dup {
                return Err(Error::Argument(format!("qubit {q} repeated among gate operands")));
            }
        }
        Ok(())
    }
}

impl<T: Scalar> std::fmt::Display for GateSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for _ in &self.controls {
            write!(f, "c")?;
        }
        for _ in &self.neg_controls {
            write!(f, "n")?;
        }
        write!(f, "{}", self.kind.name())?;
        match self.kind {
            GateKind::U { theta, phi, lambda } => write!(f, "({theta},{phi},{lambda})")?,
            GateKind::Phase(a) | GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) => write!(f, "({a})")?,
            GateKind::Rk(k) => write!(f, "({k})")?,
            _ => {}
        }
        let qs: Vec<String> = self
            .controls
            .iter()
            .chain(&self.neg_controls)
            .chain(&self.targets)
            .map(|q| format!("q{q}"))
            .collect();
        write!(f, " {}", qs.join(","))
    }
}
