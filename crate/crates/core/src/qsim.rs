//! A small state-vector simulator for the quantum paired transform (QPT).
//!
//! Basis index `i` of an `m`-qubit state is the binary number
//! `q_{m-1} .. q_1 q_0`; qubit 0 is least significant. A convolution
//! superposition over `r + k` qubits stores the position `n` in the top `r`
//! qubits and the lifted window in the low `k` qubits, so the amplitude of
//! `|n>|j>` sits at index `(n << k) | j`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conv_schemes::{lift_window, ConvolutionScheme};
use crate::error::{Error, Result};
use crate::paired_transform::Signal;

/// Largest register the simulator will allocate (16M amplitudes).
pub const MAX_QUBITS: usize = 24;

pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// The computational basis state `|index>`.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { qubits, amplitudes })
    }

    /// Normalizes `values` (length `2^m`) into a unit state.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        let qubits = qubits_for_len(values.len())?;
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = values
            .iter()
            .map(|&v| Complex64::new(v / norm, 0.0))
            .collect();
        Ok(QuantumState { qubits, amplitudes })
    }

    /// Builds a state from amplitudes that are already normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubits = qubits_for_len(amplitudes.len())?;
        let state = QuantumState { qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    /// In-place gate application.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubits)?;
        let bit = 1usize << gate.target;
        let (mask, pattern) = gate.control_pattern();
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || i & mask != pattern {
                continue;
            }
            let j = i | bit;
            let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
            match gate.kind {
                GateKind::H => {
                    self.amplitudes[i] = (a + b) * FRAC_1_SQRT_2;
                    self.amplitudes[j] = (a - b) * FRAC_1_SQRT_2;
                }
                GateKind::X => {
                    self.amplitudes[i] = b;
                    self.amplitudes[j] = a;
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.qubits > self.qubits {
            return Err(Error::QubitMismatch {
                state: self.qubits,
                other: circuit.qubits,
            });
        }
        circuit.gates.iter().try_for_each(|g| self.apply(g))
    }
}

fn check_qubits(qubits: usize) -> Result<()> {
    if qubits > MAX_QUBITS {
        Err(Error::TooManyQubits(qubits))
    } else {
        Ok(())
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::InvalidSize(len, 1));
    }
    let q = len.trailing_zeros() as usize;
    check_qubits(q)?;
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    /// Hadamard, `(1/sqrt 2)[[1, 1], [1, -1]]`.
    H,
    /// NOT.
    X,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    /// `(qubit, required value)`; the gate acts only where all match.
    pub controls: Vec<(usize, bool)>,
}

impl Gate {
    pub fn h(target: usize) -> Gate {
        Gate {
            kind: GateKind::H,
            target,
            controls: Vec::new(),
        }
    }

    pub fn x(target: usize) -> Gate {
        Gate {
            kind: GateKind::X,
            target,
            controls: Vec::new(),
        }
    }

    pub fn controlled(mut self, qubit: usize, value: bool) -> Gate {
        self.controls.push((qubit, value));
        self
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        for q in std::iter::once(self.target).chain(self.controls.iter().map(|c| c.0)) {
            if q >= qubits {
                return Err(Error::QubitOutOfRange { index: q, qubits });
            }
        }
        if self.controls.iter().any(|&(q, _)| q == self.target) {
            return Err(Error::TargetIsControl(self.target));
        }
        Ok(())
    }

    fn control_pattern(&self) -> (usize, usize) {
        self.controls
            .iter()
            .fold((0, 0), |(mask, pattern), &(q, v)| {
                (mask | 1 << q, pattern | (usize::from(v) << q))
            })
    }
}

/// Gate-by-gate state update. Consumes and returns the state.
pub fn apply_gate(mut state: QuantumState, gate: &Gate) -> Result<QuantumState> {
    state.apply(gate)?;
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn hadamard_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::H).count()
    }

    /// Composed unitary as a dense row-major `2^m x 2^m` matrix.
    pub fn unitary(&self) -> Result<Vec<Vec<Complex64>>> {
        let dim = 1usize << self.qubits;
        let mut columns = Vec::with_capacity(dim);
        for col in 0..dim {
            let mut s = QuantumState::basis(self.qubits, col)?;
            s.apply_circuit(self)?;
            columns.push(s.amplitudes);
        }
        Ok((0..dim)
            .map(|row| columns.iter().map(|c| c[row]).collect())
            .collect())
    }
}

/// Gate-level QPT on qubits `0..k`.
///
/// `QPT_1 = X H`; `QPT_k` applies H to the top qubit, then `QPT_{k-1}` on the
/// lower qubits controlled on the top qubit being 0, then X on the top qubit.
/// The composed unitary is the orthonormal DPT of size `2^k`, with exactly `k`
/// Hadamard gates.
pub fn qpt_circuit(k: usize) -> Result<Circuit> {
    if k == 0 {
        return Err(Error::NoQubits);
    }
    check_qubits(k)?;
    Ok(Circuit {
        qubits: k,
        gates: qpt_gates(k),
    })
}

fn qpt_gates(k: usize) -> Vec<Gate> {
    let top = k - 1;
    let mut gates = vec![Gate::h(top)];
    if k > 1 {
        gates.extend(
            qpt_gates(k - 1)
                .into_iter()
                .map(|g| g.controlled(top, false)),
        );
    }
    gates.push(Gate::x(top));
    gates
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperpositionMode {
    /// Each position carries its own normalized window:
    /// `(1/sqrt N) sum_n |n>|y_n>/A(n)`.
    Standard,
    /// One global normalization: `(1/C) sum_n |n> y_n`.
    Psi,
}

/// Output of [`prepare_conv_superposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    pub state: QuantumState,
    /// Suffix qubit count `k`.
    pub suffix_qubits: usize,
    /// Global normalizer `C` (psi mode) or the per-prefix weight `1/sqrt(N')`
    /// inverse (standard mode), so that amplitudes are `y_n / normalizer`
    /// (psi) or `y_n / (A(n) * normalizer)` (standard).
    pub normalizer: f64,
    /// Positions whose window is all zero.
    pub zero_prefixes: Vec<usize>,
}

/// Prepares the `(r + k)`-qubit superposition of all lifted windows.
///
/// In standard mode, positions with an all-zero window cannot be normalized;
/// they get zero amplitude and the other positions share the prefix
/// probability uniformly.
pub fn prepare_conv_superposition(
    scheme: &ConvolutionScheme,
    f: &Signal,
    mode: SuperpositionMode,
) -> Result<PreparedState> {
    let k = scheme.qubits;
    let qubits = f.qubits() + k;
    check_qubits(qubits)?;
    let windows: Vec<_> = (0..f.len()).map(|n| lift_window(scheme, f, n)).collect();
    let zero_prefixes: Vec<usize> = windows
        .iter()
        .filter(|w| w.norm == 0.0)
        .map(|w| w.point)
        .collect();
    if zero_prefixes.len() == windows.len() {
        return Err(Error::ZeroNorm);
    }

    let mut amplitudes = Vec::with_capacity(1 << qubits);
    let normalizer = match mode {
        SuperpositionMode::Psi => {
            let c = windows.iter().map(|w| w.norm * w.norm).sum::<f64>().sqrt();
            for w in &windows {
                amplitudes.extend(w.amplitudes.iter().map(|&a| Complex64::new(a / c, 0.0)));
            }
            c
        }
        SuperpositionMode::Standard => {
            let live = (windows.len() - zero_prefixes.len()) as f64;
            let prefix = live.sqrt();
            for w in &windows {
                if w.norm == 0.0 {
                    amplitudes.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), 1 << k));
                } else {
                    let d = w.norm * prefix;
                    amplitudes.extend(w.amplitudes.iter().map(|&a| Complex64::new(a / d, 0.0)));
                }
            }
            prefix
        }
    };
    Ok(PreparedState {
        state: QuantumState { qubits, amplitudes },
        suffix_qubits: k,
        normalizer,
        zero_prefixes,
    })
}

/// Applies the `k`-qubit QPT to the low `k` qubits, identity on the rest.
pub fn apply_qpt_suffix(mut state: QuantumState, k: usize) -> Result<QuantumState> {
    let circuit = qpt_circuit(k)?;
    state.apply_circuit(&circuit)?;
    Ok(state)
}

/// Sampled measurement outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub shots: u64,
    /// Outcome basis index to count; outcomes never observed are absent.
    pub counts: BTreeMap<usize, u64>,
}

impl Histogram {
    pub fn count(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: usize) -> f64 {
        self.count(outcome) as f64 / self.shots as f64
    }

    /// `outcome,count` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count\n");
        for (outcome, count) in &self.counts {
            writeln!(out, "{outcome},{count}").unwrap();
        }
        out
    }
}

/// Samples `shots` i.i.d. outcomes from `|amplitude|^2`.
pub fn measure(state: &QuantumState, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let dist = WeightedIndex::new(state.probabilities()).map_err(|_| Error::ZeroNorm)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    Ok(Histogram { shots, counts })
}

/// Distribution of the low `k` qubits given the top qubits read `prefix`.
pub fn conditional_suffix_distribution(
    state: &QuantumState,
    k: usize,
    prefix: usize,
) -> Result<Vec<f64>> {
    if k > state.qubits {
        return Err(Error::QubitMismatch {
            state: state.qubits,
            other: k,
        });
    }
    let count = 1usize << (state.qubits - k);
    if prefix >= count {
        return Err(Error::PrefixOutOfRange { prefix, count });
    }
    let block = &state.amplitudes[prefix << k..(prefix + 1) << k];
    let probs: Vec<f64> = block.iter().map(Complex64::norm_sqr).collect();
    let total: f64 = probs.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroProbabilityPrefix(prefix));
    }
    Ok(probs.into_iter().map(|p| p / total).collect())
}
