//! Dense statevector engine.
//!
//! Amplitudes are indexed little-endian: bit `i` of the basis index is
//! qubit `i`. A register holds `2^n` complex doubles, so `n` is capped at
//! [`MAX_QUBITS`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::observables::{bit, OraclePredicate};
use crate::rng::rng_from_seed;

pub const MAX_QUBITS: usize = 24;

/// Tolerance on `Σ|amp|² = 1` for states that claim to be normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    H {
        qubit: usize,
    },
    X {
        qubit: usize,
    },
    Ry {
        qubit: usize,
        theta: f64,
    },
    Rz {
        qubit: usize,
        phi: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Cz {
        a: usize,
        b: usize,
    },
    /// Multiplies every marked amplitude by -1.
    PhaseOracle {
        predicate: OraclePredicate,
    },
    /// `2|s><s| - I` with `|s>` the uniform superposition.
    Diffusion,
}

impl Gate {
    /// Qubits the gate acts on, or `None` for register-wide blocks.
    pub fn qubits(&self) -> Option<Vec<usize>> {
        match *self {
            Gate::H { qubit } | Gate::X { qubit } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => {
                Some(vec![qubit])
            }
            Gate::Cnot { control, target } => Some(vec![control, target]),
            Gate::Cz { a, b } => Some(vec![a, b]),
            Gate::PhaseOracle { .. } | Gate::Diffusion => None,
        }
    }

    pub fn is_elementary(&self) -> bool {
        !matches!(self, Gate::PhaseOracle { .. } | Gate::Diffusion)
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let in_range = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::arg(format!(
                    "qubit index {q} out of range for {n_qubits} qubits"
                )))
            }
        };
        match self {
            Gate::H { qubit } | Gate::X { qubit } => in_range(*qubit),
            Gate::Ry { qubit, theta: angle } | Gate::Rz { qubit, phi: angle } => {
                in_range(*qubit)?;
                if !angle.is_finite() {
                    return Err(Error::arg("rotation angle must be finite"));
                }
                Ok(())
            }
            Gate::Cnot { control: a, target: b } | Gate::Cz { a, b } => {
                in_range(*a)?;
                in_range(*b)?;
                if a == b {
                    return Err(Error::arg(format!("two-qubit gate on repeated qubit {a}")));
                }
                Ok(())
            }
            Gate::PhaseOracle { predicate } => predicate.validate(n_qubits),
            Gate::Diffusion => Ok(()),
        }
    }
}

/// Single-qubit Pauli operator, used for error insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
    /// Set on vectors produced by a projection; these are not normalized and
    /// cannot be sampled.
    is_projected: bool,
}

fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count",
            min: 1,
            max: MAX_QUBITS,
            got: n_qubits,
        });
    }
    Ok(())
}

/// `|0...0>` on `n` qubits.
pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    check_capacity(n_qubits)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        n_qubits,
        amplitudes,
        is_projected: false,
    })
}

/// Returns `gate` applied to a copy of `state`.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Left fold of [`apply_gate`] over the circuit.
pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_circuit(circuit)?;
    Ok(out)
}

/// Haar-random pure state: i.i.d. standard complex Gaussians, normalized.
pub fn haar_random_state(n_qubits: usize, seed: u64) -> Result<StateVector> {
    check_capacity(n_qubits)?;
    let mut rng = rng_from_seed(seed);
    let mut amplitudes: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    Ok(StateVector {
        n_qubits,
        amplitudes,
        is_projected: false,
    })
}

/// Draws `shots` computational-basis outcomes from `|amp_z|²`.
pub fn measure_sample(state: &StateVector, shots: u64, seed: u64) -> Result<ShotHistogram> {
    if state.is_projected {
        return Err(Error::Contract(
            "cannot sample from a projected (unnormalized) vector".into(),
        ));
    }
    state.check_normalized()?;
    sample_distribution(state.n_qubits, &state.probabilities(), shots, seed)
}

/// Draws `shots` outcomes from an explicit probability vector over `2^n` states.
pub fn sample_distribution(n_qubits: usize, probabilities: &[f64], shots: u64, seed: u64) -> Result<ShotHistogram> {
    check_capacity(n_qubits)?;
    if probabilities.len() != 1 << n_qubits {
        return Err(Error::arg("probability vector length does not match register"));
    }
    if shots == 0 {
        return Err(Error::arg("shots must be at least 1"));
    }
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in probabilities {
        if p.is_nan() || p < 0.0 {
            return Err(Error::arg("negative or NaN probability"));
        }
        acc += p;
        cdf.push(acc);
    }
    if (acc - 1.0).abs() > 1e-8 {
        return Err(Error::Contract(format!("probabilities sum to {acc}, not 1")));
    }
    let mut rng = rng_from_seed(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        // First index whose cumulative mass exceeds u; zero-probability
        // states are never selected.
        let z = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        *counts.entry(z).or_insert(0u64) += 1;
    }
    Ok(ShotHistogram {
        n_qubits,
        counts,
        total_shots: shots,
        seed: Some(seed),
    })
}

impl StateVector {
    /// Wraps raw amplitudes; they must have length `2^n` and unit norm.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::arg(format!(
                "{} amplitudes given for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let state = StateVector {
            n_qubits,
            amplitudes,
            is_projected: false,
        };
        state.check_normalized()?;
        Ok(state)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::arg("cannot normalize a zero or non-finite vector"));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::from_amplitudes(n_qubits, amplitudes)
    }

    pub fn basis(n_qubits: usize, z: usize) -> Result<Self> {
        let mut s = zero_state(n_qubits)?;
        if z >= s.amplitudes.len() {
            return Err(Error::arg(format!("basis index {z} out of range")));
        }
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[z] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_projected(&self) -> bool {
        self.is_projected
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Contract(format!("state norm² is {n}, expected 1")));
        }
        Ok(())
    }

    /// `P↑|ψ>` on `qubit`: zeroes every amplitude whose bit reads 1.
    pub fn project_up(&self, qubit: usize) -> Result<StateVector> {
        if qubit >= self.n_qubits {
            return Err(Error::arg(format!("projector qubit {qubit} out of range")));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(z, &a)| if bit(z, qubit) { Complex64::new(0.0, 0.0) } else { a })
            .collect();
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes,
            is_projected: true,
        })
    }

    /// `|<a|b>|²` for two states on the same register.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate {
            Gate::H { qubit } => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_single(*qubit, [[h, h], [h, -h]]);
            }
            Gate::X { qubit } => self.apply_pauli(*qubit, Pauli::X),
            Gate::Ry { qubit, theta } => {
                let (s, c) = (theta / 2.0).sin_cos();
                let (s, c) = (Complex64::new(s, 0.0), Complex64::new(c, 0.0));
                self.apply_single(*qubit, [[c, -s], [s, c]]);
            }
            Gate::Rz { qubit, phi } => {
                let lo = Complex64::from_polar(1.0, -phi / 2.0);
                let hi = Complex64::from_polar(1.0, phi / 2.0);
                let mask = 1usize << qubit;
                for (z, a) in self.amplitudes.iter_mut().enumerate() {
                    *a *= if z & mask == 0 { lo } else { hi };
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1usize << control, 1usize << target);
                for z in 0..self.amplitudes.len() {
                    if z & c != 0 && z & t == 0 {
                        self.amplitudes.swap(z, z | t);
                    }
                }
            }
            Gate::Cz { a, b } => {
                let m = (1usize << a) | (1usize << b);
                for (z, amp) in self.amplitudes.iter_mut().enumerate() {
                    if z & m == m {
                        *amp = -*amp;
                    }
                }
            }
            Gate::PhaseOracle { predicate } => {
                for (z, amp) in self.amplitudes.iter_mut().enumerate() {
                    if predicate.marks(z) {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Diffusion => {
                let mean = self.amplitudes.iter().sum::<Complex64>() / self.amplitudes.len() as f64;
                let twice = mean * 2.0;
                for amp in &mut self.amplitudes {
                    *amp = twice - *amp;
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::arg(format!(
                "circuit has {} qubits, state has {}",
                circuit.n_qubits(),
                self.n_qubits
            )));
        }
        for gate in circuit.gates() {
            self.apply(gate)?;
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        let mask = 1usize << qubit;
        match pauli {
            Pauli::X => {
                for z in 0..self.amplitudes.len() {
                    if z & mask == 0 {
                        self.amplitudes.swap(z, z | mask);
                    }
                }
            }
            Pauli::Y => {
                let i = Complex64::new(0.0, 1.0);
                for z in 0..self.amplitudes.len() {
                    if z & mask == 0 {
                        let (a0, a1) = (self.amplitudes[z], self.amplitudes[z | mask]);
                        self.amplitudes[z] = -i * a1;
                        self.amplitudes[z | mask] = i * a0;
                    }
                }
            }
            Pauli::Z => {
                for (z, a) in self.amplitudes.iter_mut().enumerate() {
                    if z & mask != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let stride = 1usize << qubit;
        for block in self.amplitudes.chunks_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
    }
}

/// Measurement counts keyed by basis index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "HistogramRepr", try_from = "HistogramRepr")]
pub struct ShotHistogram {
    pub n_qubits: usize,
    pub counts: BTreeMap<usize, u64>,
    pub total_shots: u64,
    /// Seed that produced the draws, when sampled here.
    pub seed: Option<u64>,
}

impl ShotHistogram {
    pub fn from_counts(n_qubits: usize, counts: BTreeMap<usize, u64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        if let Some((&z, _)) = counts.iter().next_back() {
            if z >= 1 << n_qubits {
                return Err(Error::arg(format!("outcome {z} out of range")));
            }
        }
        let total_shots = counts.values().sum();
        if total_shots == 0 {
            return Err(Error::arg("histogram has no shots"));
        }
        Ok(ShotHistogram {
            n_qubits,
            counts,
            total_shots,
            seed: None,
        })
    }

    pub fn count(&self, z: usize) -> u64 {
        self.counts.get(&z).copied().unwrap_or(0)
    }

    /// Empirical distribution `counts / total` over all `2^n` states.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1 << self.n_qubits];
        for (&z, &c) in &self.counts {
            p[z] = c as f64 / self.total_shots as f64;
        }
        p
    }

    /// Outcome label with qubit `n-1` leftmost and qubit 0 rightmost.
    pub fn bitstring(&self, z: usize) -> String {
        format!("{:0width$b}", z, width = self.n_qubits)
    }
}

/// Serialized histogram form: counts keyed by bitstring (qubit 0 rightmost).
#[derive(Serialize, Deserialize)]
struct HistogramRepr {
    n_qubits: usize,
    total_shots: u64,
    seed: Option<u64>,
    counts: BTreeMap<String, u64>,
}

impl From<ShotHistogram> for HistogramRepr {
    fn from(h: ShotHistogram) -> Self {
        HistogramRepr {
            n_qubits: h.n_qubits,
            total_shots: h.total_shots,
            seed: h.seed,
            counts: h.counts.iter().map(|(&z, &c)| (h.bitstring(z), c)).collect(),
        }
    }
}

impl TryFrom<HistogramRepr> for ShotHistogram {
    type Error = Error;

    fn try_from(r: HistogramRepr) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (k, c) in r.counts {
            if k.len() != r.n_qubits {
                return Err(Error::arg(format!("bitstring `{k}` has wrong width")));
            }
            let z = usize::from_str_radix(&k, 2).map_err(|_| Error::arg(format!("`{k}` is not a bitstring")))?;
            counts.insert(z, c);
        }
        let mut h = ShotHistogram::from_counts(r.n_qubits, counts)?;
        if h.total_shots != r.total_shots {
            return Err(Error::arg("counts do not sum to total_shots"));
        }
        h.seed = r.seed;
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{explicit_oracle, DiagonalObservable};
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_state_layout() {
        let s = zero_state(2).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(zero_state(1).unwrap().amplitudes(), &[c(1.0), c(0.0)]);
        let s = zero_state(12).unwrap();
        assert_eq!(s.dim(), 4096);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(matches!(zero_state(0), Err(Error::Capacity { .. })));
        assert!(matches!(zero_state(25), Err(Error::Capacity { .. })));
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate(&zero_state(1).unwrap(), &Gate::H { qubit: 0 }).unwrap();
        assert!(close(s.amplitudes()[0], c(FRAC_1_SQRT_2), 1e-15));
        assert!(close(s.amplitudes()[1], c(FRAC_1_SQRT_2), 1e-15));
    }

    #[test]
    fn oracle_then_diffusion_finds_marked() {
        let mut s = zero_state(2).unwrap();
        s.apply(&Gate::H { qubit: 0 }).unwrap();
        s.apply(&Gate::H { qubit: 1 }).unwrap();
        s.apply(&Gate::PhaseOracle {
            predicate: explicit_oracle(&[0]),
        })
        .unwrap();
        let expect = [c(-0.5), c(0.5), c(0.5), c(0.5)];
        for (a, b) in s.amplitudes().iter().zip(expect) {
            assert!(close(*a, b, 1e-15));
        }
        // Dense 2|s><s| - I built entry by entry.
        let dim = 4;
        let mut out = vec![c(0.0); dim];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, a) in s.amplitudes().iter().enumerate() {
                let d = 2.0 / dim as f64 - if i == j { 1.0 } else { 0.0 };
                *o += a * d;
            }
        }
        s.apply(&Gate::Diffusion).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&out) {
            assert!(close(*a, *b, 1e-12));
        }
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_argument_errors() {
        let mut s = zero_state(2).unwrap();
        assert!(matches!(s.apply(&Gate::H { qubit: 2 }), Err(Error::Argument(_))));
        assert!(s.apply(&Gate::Cnot { control: 1, target: 1 }).is_err());
        assert!(s.apply(&Gate::Cz { a: 0, b: 3 }).is_err());
        assert!(s
            .apply(&Gate::PhaseOracle {
                predicate: explicit_oracle(&[7])
            })
            .is_err());
    }

    #[test]
    fn cnot_and_cz_truth_tables() {
        for z in 0..4usize {
            let mut s = StateVector::basis(2, z).unwrap();
            s.apply(&Gate::Cnot { control: 0, target: 1 }).unwrap();
            let expect = if z & 1 == 1 { z ^ 2 } else { z };
            assert_eq!(s.amplitudes()[expect], c(1.0));

            let mut s = StateVector::basis(2, z).unwrap();
            s.apply(&Gate::Cz { a: 0, b: 1 }).unwrap();
            assert_eq!(s.amplitudes()[z], c(if z == 3 { -1.0 } else { 1.0 }));
        }
    }

    #[test]
    fn projected_vectors_cannot_be_sampled() {
        let mut s = zero_state(2).unwrap();
        s.apply(&Gate::H { qubit: 1 }).unwrap();
        let p = s.project_up(1).unwrap();
        assert!(p.is_projected());
        assert!((p.norm_sqr() - 0.5).abs() < 1e-15);
        assert!(matches!(measure_sample(&p, 10, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn basis_state_sampling_is_deterministic() {
        let s = StateVector::basis(3, 5).unwrap();
        let h = measure_sample(&s, 8192, 11).unwrap();
        assert_eq!(h.counts.len(), 1);
        assert_eq!(h.count(5), 8192);
        assert_eq!(h.total_shots, 8192);
    }

    #[test]
    fn uniform_sampling_within_binomial_band() {
        let mut s = zero_state(2).unwrap();
        s.apply(&Gate::H { qubit: 0 }).unwrap();
        s.apply(&Gate::H { qubit: 1 }).unwrap();
        let mut inside = 0;
        for seed in 0..200 {
            let h = measure_sample(&s, 8192, seed).unwrap();
            assert_eq!(h.counts.values().sum::<u64>(), 8192);
            if (0..4).all(|z| (h.count(z) as i64 - 2048).abs() <= 135) {
                inside += 1;
            }
        }
        // Per-count 3σ band; four counts jointly stay inside ~99% of the time.
        assert!(inside >= 194, "{inside}/200");
    }

    #[test]
    fn sampling_reproducible() {
        let s = haar_random_state(5, 3).unwrap();
        assert_eq!(
            measure_sample(&s, 1000, 9).unwrap(),
            measure_sample(&s, 1000, 9).unwrap()
        );
        assert_eq!(haar_random_state(5, 3).unwrap(), s);
        assert_ne!(haar_random_state(5, 4).unwrap(), s);
    }

    #[test]
    fn histogram_json_uses_bitstrings() {
        let s = StateVector::basis(3, 0b110).unwrap();
        let h = measure_sample(&s, 4, 0).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"110\":4"), "{json}");
        let back: ShotHistogram = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn haar_single_state_projector_mass() {
        let mut inside = 0;
        for seed in 0..100 {
            let s = haar_random_state(12, seed).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let mass: f64 = s
                .probabilities()
                .iter()
                .enumerate()
                .filter(|(z, _)| !bit(*z, 1))
                .map(|(_, p)| p)
                .sum();
            if (0.45..=0.55).contains(&mass) {
                inside += 1;
            }
        }
        assert!(inside >= 99);
    }

    #[test]
    fn haar_first_moment_per_amplitude() {
        // Mean of |amp_z|² over seeds is 1/4096 with standard error sd/√M.
        let m = 1000;
        let z = 17;
        let samples: Vec<f64> = (0..m)
            .map(|s| haar_random_state(12, s).unwrap().amplitudes()[z].norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / m as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let se = (var / m as f64).sqrt();
        assert!((mean - 1.0 / 4096.0).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn haar_zstring_moments_scale_down() {
        let var_at = |n: usize| {
            let a = DiagonalObservable::zstring(n, &[0]).unwrap();
            let xs: Vec<f64> = (0..1000u64)
                .map(|seed| {
                    let s = haar_random_state(n, seed).unwrap();
                    s.probabilities().iter().enumerate().map(|(z, p)| p * a.value(z)).sum()
                })
                .collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            (mean, var, (var / xs.len() as f64).sqrt())
        };
        let (m6, v6, se6) = var_at(6);
        let (m10, v10, se10) = var_at(10);
        assert!(m6.abs() < 3.0 * se6);
        assert!(m10.abs() < 3.0 * se10);
        assert!(v10 < v6);
    }

    fn arb_state(n: usize) -> impl Strategy<Value = StateVector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("nonzero", move |v| {
            let amps = v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
            StateVector::normalized(n, amps).ok()
        })
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        let q = 0..n;
        prop_oneof![
            q.clone().prop_map(|qubit| Gate::H { qubit }),
            q.clone().prop_map(|qubit| Gate::X { qubit }),
            (q.clone(), -7.0f64..7.0).prop_map(|(qubit, theta)| Gate::Ry { qubit, theta }),
            (q.clone(), -7.0f64..7.0).prop_map(|(qubit, phi)| Gate::Rz { qubit, phi }),
            (q.clone(), 1..n).prop_map(move |(c, d)| Gate::Cnot {
                control: c,
                target: (c + d) % n
            }),
            (q.clone(), 1..n).prop_map(move |(a, d)| Gate::Cz { a, b: (a + d) % n }),
            prop::collection::vec(0..(1usize << n), 1..4).prop_map(|m| Gate::PhaseOracle {
                predicate: explicit_oracle(&m)
            }),
            Just(Gate::Diffusion),
        ]
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(s in arb_state(4), g in arb_gate(4)) {
            let out = apply_gate(&s, &g).unwrap();
            prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-10);
        }

        #[test]
        fn oracle_is_an_involution(s in arb_state(4), marked in prop::collection::vec(0usize..16, 1..6)) {
            let g = Gate::PhaseOracle { predicate: explicit_oracle(&marked) };
            let twice = apply_gate(&apply_gate(&s, &g).unwrap(), &g).unwrap();
            for (a, b) in twice.amplitudes().iter().zip(s.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn diffusion_is_a_reflection(s in arb_state(5)) {
            let twice = apply_gate(&apply_gate(&s, &Gate::Diffusion).unwrap(), &Gate::Diffusion).unwrap();
            for (a, b) in twice.amplitudes().iter().zip(s.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-9);
            }
        }
    }
}
