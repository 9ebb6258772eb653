//! Dense statevector simulation.
//!
//! Qubit 0 is the least-significant bit of the basis index. Gates are applied
//! in place by enumerating only the basis indices whose fixed bits (targets and
//! controls) take the required values.

mod gate;

pub use gate::{rk_angle, GateKind, GateSpec, Mat2};

use std::fmt::Write as _;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default ceiling on the number of simulated qubits.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Amplitudes below this magnitude are omitted from dumps.
pub const DUMP_THRESHOLD: f64 = 1e-12;

/// Smallest probability accepted for a forced measurement outcome.
pub const POST_SELECT_MIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
    labels: Vec<String>,
}

/// Inserts a zero bit at each position of `fixed` (ascending) into `k`.
#[inline]
fn deposit(mut k: usize, fixed: &[usize]) -> usize {
    for &p in fixed {
        let low = k & ((1usize << p) - 1);
        k = ((k ^ low) << 1) | low;
    }
    k
}

/// Scatters the bits of `k` onto `positions` (bit i of `k` goes to `positions[i]`).
#[inline]
pub(crate) fn scatter(k: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | (((k >> i) & 1) << p))
}

/// Gathers the bits at `positions` of `index` into a compact integer.
#[inline]
pub(crate) fn gather(index: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | (((index >> p) & 1) << i))
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

impl<T: Scalar> StateVector<T> {
    /// Basis state `|basis_index⟩` under the default qubit budget.
    pub fn basis(num_qubits: usize, basis_index: usize) -> Result<Self> {
        Self::basis_with_budget(num_qubits, basis_index, DEFAULT_MAX_QUBITS)
    }

    pub fn basis_with_budget(num_qubits: usize, basis_index: usize, max_qubits: usize) -> Result<Self> {
        if num_qubits > max_qubits {
            return Err(Error::Resource(format!(
                "{num_qubits} qubits requested, qubit budget is {max_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(Error::Argument(format!(
                "basis index {basis_index} outside [0, {dim})"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[basis_index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { num_qubits, amps, labels: default_labels(num_qubits) })
    }

    /// Wraps amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Argument(format!("amplitude count {dim} is not a power of two")));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        let sv = StateVector { num_qubits, amps, labels: default_labels(num_qubits) };
        let drift = (sv.norm_sqr() - T::one()).abs();
        if drift > T::norm_tolerance() {
            return Err(Error::State(format!("amplitudes not normalized (|norm² - 1| = {drift:e})")));
        }
        Ok(sv)
    }

    /// Haar-like random state from normalized complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << num_qubits;
        let raw: Vec<(f64, f64)> = (0..dim)
            .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        let amps = raw
            .into_iter()
            .map(|(a, b)| Complex::new(T::lit(a / norm), T::lit(b / norm)))
            .collect();
        StateVector { num_qubits, amps, labels: default_labels(num_qubits) }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_label(&mut self, qubit: usize, label: impl Into<String>) {
        self.labels[qubit] = label.into();
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::Argument(format!(
                "qubit index {q} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply_gate(&mut self, gate: &GateSpec<T>) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let fixed_mask = gate.qubits().fold(0usize, |m, q| m | (1 << q));
        let cmask = gate.controls.iter().fold(0usize, |m, &q| m | (1 << q));
        let dim = self.amps.len();
        // Walks every index whose fixed bits are all zero.
        let bases = || {
            std::iter::successors(Some(0usize), move |&i| {
                let next = ((i | fixed_mask) + 1) & !fixed_mask;
                (next != 0 && next < dim).then_some(next)
            })
        };
        match gate.kind {
            GateKind::Swap => {
                let (a, b) = (1usize << gate.targets[0], 1usize << gate.targets[1]);
                for base in bases() {
                    let base = base | cmask;
                    self.amps.swap(base | a, base | b);
                }
            }
            GateKind::X => {
                let t = 1usize << gate.targets[0];
                for base in bases() {
                    let base = base | cmask;
                    self.amps.swap(base, base | t);
                }
            }
            kind => {
                let m = kind.matrix().expect("single-qubit kind");
                let t = 1usize << gate.targets[0];
                let zero = Complex::new(T::zero(), T::zero());
                let diagonal = m[0][1] == zero && m[1][0] == zero;
                for base in bases() {
                    let i0 = base | cmask;
                    let i1 = i0 | t;
                    let (a0, a1) = (self.amps[i0], self.amps[i1]);
                    if diagonal {
                        self.amps[i0] = m[0][0] * a0;
                        self.amps[i1] = m[1][1] * a1;
                    } else {
                        self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                        self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_all<'a, I>(&mut self, gates: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a GateSpec<T>>,
    {
        for g in gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Applies a basis permutation: amplitude at `i` moves to `f(i)`.
    ///
    /// `f` must be a bijection on `[0, 2^n)`.
    pub fn permute_basis(&mut self, f: impl Fn(usize) -> usize) {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            out[f(i)] = *a;
        }
        debug_assert!((self.norm_sqr() - out.iter().map(|a| a.norm_sqr()).sum::<T>()).abs() < T::norm_tolerance());
        self.amps = out;
    }

    /// Probability of reading 1 on `q`.
    pub fn prob_one(&self, q: usize) -> Result<T> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn project(&mut self, q: usize, outcome: u8, prob: T) {
        let bit = 1usize << q;
        let scale = T::one() / prob.sqrt();
        let keep = if outcome == 1 { bit } else { 0 };
        let zero = Complex::new(T::zero(), T::zero());
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit == keep {
                *a = *a * scale;
            } else {
                *a = zero;
            }
        }
    }

    /// Born-rule measurement of `q`; returns the outcome and its probability.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<(u8, T)> {
        let p1 = self.prob_one(q)?;
        let u: f64 = rng.random();
        let outcome = if T::lit(u) < p1 { 1 } else { 0 };
        let p = if outcome == 1 { p1 } else { T::one() - p1 };
        self.project(q, outcome, p);
        Ok((outcome, p))
    }

    /// Forces `outcome` on `q` and renormalizes; returns its probability.
    pub fn measure_forced(&mut self, q: usize, outcome: u8) -> Result<T> {
        let p1 = self.prob_one(q)?;
        let p = if outcome == 1 { p1 } else { T::one() - p1 };
        if p.to_f64().unwrap_or(0.0) < POST_SELECT_MIN {
            return Err(Error::PostSelection { probability: p.to_f64().unwrap_or(0.0) });
        }
        self.project(q, outcome, p);
        Ok(p)
    }

    /// Measures `q` and flips it back to |0⟩; returns the discarded outcome.
    pub fn reset_qubit<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        let (outcome, _) = self.measure(q, rng)?;
        if outcome == 1 {
            self.apply_gate(&GateSpec::x(q))?;
        }
        Ok(outcome)
    }

    /// Reduced density matrix of one qubit.
    pub fn reduced_density_1q(&self, q: usize) -> Result<Mat2<T>> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        let zero = Complex::new(T::zero(), T::zero());
        let mut rho = [[zero; 2]; 2];
        for k in 0..self.amps.len() / 2 {
            let i0 = deposit(k, &[q]);
            let (a0, a1) = (self.amps[i0], self.amps[i0 | bit]);
            rho[0][0] = rho[0][0] + a0 * a0.conj();
            rho[0][1] = rho[0][1] + a0 * a1.conj();
            rho[1][0] = rho[1][0] + a1 * a0.conj();
            rho[1][1] = rho[1][1] + a1 * a1.conj();
        }
        Ok(rho)
    }

    /// Pure state of qubit `q` when its purity is at least `1 - tol`, with the
    /// first non-negligible amplitude made real and positive.
    pub fn single_qubit_state(&self, q: usize, tol: T) -> Result<Option<[Complex<T>; 2]>> {
        let rho = self.reduced_density_1q(q)?;
        let purity = rho.iter().flatten().map(|z| z.norm_sqr()).sum::<T>();
        if purity < T::one() - tol {
            return Ok(None);
        }
        let (p0, p1) = (rho[0][0].re, rho[1][1].re);
        let mut v = if p0 >= p1 {
            let s = p0.sqrt();
            [Complex::new(s, T::zero()), rho[1][0] / s]
        } else {
            let s = p1.sqrt();
            [rho[0][1] / s, Complex::new(s, T::zero())]
        };
        let lead = if v[0].norm() > T::lit(1e-12) { v[0] } else { v[1] };
        let fix = lead.conj() / lead.norm();
        v[0] = v[0] * fix;
        v[1] = v[1] * fix;
        Ok(Some(v))
    }

    /// `Tr(ρ_A²)` for the reduced state on `subset`.
    pub fn reduced_purity(&self, subset: &[usize]) -> Result<T> {
        let n = self.num_qubits;
        if subset.is_empty() || subset.len() >= n {
            return Err(Error::Argument(format!(
                "purity subset must be nonempty and proper (got {} of {n} qubits)",
                subset.len()
            )));
        }
        let mut in_a = vec![false; n];
        for &q in subset {
            self.check_qubit(q)?;
            if in_a[q] {
                return Err(Error::Argument(format!("qubit {q} repeated in subset")));
            }
            in_a[q] = true;
        }
        let mut a: Vec<usize> = (0..n).filter(|&q| in_a[q]).collect();
        let mut b: Vec<usize> = (0..n).filter(|&q| !in_a[q]).collect();
        // Pure global state: both reductions share a spectrum, use the smaller one.
        if a.len() > b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        let off_a: Vec<usize> = (0..1usize << a.len()).map(|k| scatter(k, &a)).collect();
        let off_b: Vec<usize> = (0..1usize << b.len()).map(|k| scatter(k, &b)).collect();

        let eps = T::lit(1e-30);
        let active: Vec<usize> = off_a
            .iter()
            .copied()
            .filter(|&oa| off_b.iter().map(|&ob| self.amps[oa | ob].norm_sqr()).sum::<T>() > eps)
            .collect();
        let d = active.len();
        let zero = Complex::new(T::zero(), T::zero());
        let mut rho = vec![zero; d * d];
        let mut v = vec![zero; d];
        for &ob in &off_b {
            for (slot, &oa) in v.iter_mut().zip(&active) {
                *slot = self.amps[oa | ob];
            }
            for i in 0..d {
                if v[i] == zero {
                    continue;
                }
                for j in 0..d {
                    rho[i * d + j] = rho[i * d + j] + v[i] * v[j].conj();
                }
            }
        }
        Ok(rho.iter().map(|z| z.norm_sqr()).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Argument(format!(
                "dimension mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        if self.labels != other.labels {
            return Err(Error::Argument("qubit label ordering differs".into()));
        }
        let ip = self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        Ok(ip.norm_sqr())
    }

    /// `self ⊗ other`, with `self` on the low qubits. Labels are reset to
    /// the defaults `q0, q1, ...`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(*a * *b);
            }
        }
        let num_qubits = self.num_qubits + other.num_qubits;
        StateVector { num_qubits, amps, labels: default_labels(num_qubits) }
    }

    /// Appends `extra` qubits in |0⟩ above the existing ones.
    pub fn pad_zero_qubits(&self, extra: usize) -> Result<Self> {
        let total = self.num_qubits + extra;
        if total > DEFAULT_MAX_QUBITS.max(self.num_qubits) {
            return Err(Error::Resource(format!(
                "{total} qubits requested, qubit budget is {DEFAULT_MAX_QUBITS}"
            )));
        }
        let mut amps = self.amps.clone();
        amps.resize(1 << total, Complex::new(T::zero(), T::zero()));
        let mut labels = self.labels.clone();
        labels.extend((self.num_qubits..total).map(|i| format!("q{i}")));
        Ok(StateVector { num_qubits: total, amps, labels })
    }

    /// Amplitudes of the `keep` qubits conditioned on every other qubit taking
    /// the value given in `assignment`. Returns the normalized conditional
    /// state (qubit `i` of the result is `keep[i]`) and the branch probability.
    pub fn branch_state(&self, keep: &[usize], assignment: &[(usize, bool)]) -> Result<(Self, T)> {
        let n = self.num_qubits;
        let mut covered = vec![false; n];
        for &q in keep.iter().chain(assignment.iter().map(|(q, _)| q)) {
            self.check_qubit(q)?;
            if covered[q] {
                return Err(Error::Argument(format!("qubit {q} listed twice")));
            }
            covered[q] = true;
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::Argument("keep and assignment must cover every qubit".into()));
        }
        let fixed = assignment.iter().fold(0usize, |m, &(q, v)| if v { m | (1 << q) } else { m });
        let amps: Vec<Complex<T>> = (0..1usize << keep.len())
            .map(|k| self.amps[scatter(k, keep) | fixed])
            .collect();
        let p: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if p.to_f64().unwrap_or(0.0) < POST_SELECT_MIN {
            return Err(Error::PostSelection { probability: p.to_f64().unwrap_or(0.0) });
        }
        let s = T::one() / p.sqrt();
        let amps = amps.into_iter().map(|a| a * s).collect::<Vec<_>>();
        let mut out = StateVector { num_qubits: keep.len(), amps, labels: Vec::new() };
        out.labels = keep.iter().map(|&q| self.labels[q].clone()).collect();
        Ok((out, p))
    }

    /// Text dump: `index\tbitstring\tre\tim`, bitstring MSB first.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let thr = T::lit(DUMP_THRESHOLD);
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < thr {
                continue;
            }
            let bits: String = (0..self.num_qubits)
                .rev()
                .map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' })
                .collect();
            let _ = writeln!(out, "{i}\t{bits}\t{:.12}\t{:.12}", a.re, a.im);
        }
        out
    }
}
