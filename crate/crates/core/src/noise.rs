//! Depolarizing noise by stochastic Pauli trajectories.
//!
//! Each trajectory runs the lowered circuit and, after every elementary
//! gate, depolarizes the touched qubits with probability `p1` (one-qubit
//! gates) or `p2` (two-qubit gates): a Pauli drawn uniformly from the full
//! group on those qubits is applied. The identity is part of the draw, so a
//! non-identity error occurs with probability `3p/4` or `15p/16`, and
//! `p = 1` maps every state to the maximally mixed one on average.
//! There is no readout error.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{lower_circuit, Circuit};
use crate::error::{Error, Result};
use crate::estimators::{average_metrics, mean_and_variance, metrics_from_probabilities, Metrics};
use crate::observables::{DiagonalObservable, UpProjector};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::statevec::{Pauli, StateVector};

pub const DEFAULT_TRAJECTORIES: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
    pub trajectories: u32,
}

impl NoiseParams {
    pub fn new(p1: f64, p2: f64, trajectories: u32) -> Result<Self> {
        let n = NoiseParams { p1, p2, trajectories };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::arg(format!("{name} = {p} is not a probability")));
            }
        }
        if self.trajectories == 0 {
            return Err(Error::arg("trajectories must be at least 1"));
        }
        Ok(())
    }

    /// Both error rates multiplied by `factor` (clamped to 1).
    pub fn scaled(&self, factor: f64) -> Self {
        NoiseParams {
            p1: (self.p1 * factor).min(1.0),
            p2: (self.p2 * factor).min(1.0),
            trajectories: self.trajectories,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

/// Parses `p1,p2,trajectories`; the trajectory count may be omitted.
impl FromStr for NoiseParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse {
            input: s.to_string(),
            message: m.to_string(),
        };
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let (p1, p2, traj) = match parts.as_slice() {
            [a, b] => (a, b, None),
            [a, b, t] => (a, b, Some(t)),
            _ => return Err(bad("expected p1,p2[,trajectories]")),
        };
        let p1 = p1.parse().map_err(|_| bad("p1 is not a number"))?;
        let p2 = p2.parse().map_err(|_| bad("p2 is not a number"))?;
        let trajectories = match traj {
            Some(t) => t.parse().map_err(|_| bad("trajectories is not an integer"))?,
            None => DEFAULT_TRAJECTORIES,
        };
        NoiseParams::new(p1, p2, trajectories).map_err(|e| bad(&e.to_string()))
    }
}

impl fmt::Display for NoiseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.p1, self.p2, self.trajectories)
    }
}

const PAULIS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

fn depolarize(rng: &mut SimRng, qubits: &[usize], state: &mut StateVector) {
    match *qubits {
        [q] => {
            let k = rng.random_range(0..4usize);
            if k > 0 {
                state.apply_pauli(q, PAULIS[k - 1]);
            }
        }
        [a, b] => {
            // Index 0 is the two-qubit identity.
            let k = rng.random_range(0..16usize);
            for (q, idx) in [(a, k / 4), (b, k % 4)] {
                if idx > 0 {
                    state.apply_pauli(q, PAULIS[idx - 1]);
                }
            }
        }
        _ => unreachable!("elementary gates touch one or two qubits"),
    }
}

fn run_one(state: &StateVector, lowered: &Circuit, noise: &NoiseParams, seed: u64) -> Result<StateVector> {
    let mut rng = rng_from_seed(seed);
    let mut s = state.clone();
    for gate in lowered.gates() {
        s.apply(gate)?;
        let qubits = gate.qubits().expect("lowered gate");
        let p = if qubits.len() == 1 { noise.p1 } else { noise.p2 };
        if p > 0.0 && rng.random::<f64>() < p {
            depolarize(&mut rng, &qubits, &mut s);
        }
    }
    Ok(s)
}

/// Runs every trajectory and maps its final state through `f`. Results come
/// back in trajectory order regardless of thread scheduling.
pub fn map_trajectories<T, F>(
    state: &StateVector,
    circuit: &Circuit,
    noise: &NoiseParams,
    seed: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&StateVector) -> T + Sync,
{
    noise.validate()?;
    if circuit.n_qubits() != state.n_qubits() {
        return Err(Error::arg("circuit and state sizes differ"));
    }
    let lowered = lower_circuit(circuit)?;
    (0..noise.trajectories as u64)
        .into_par_iter()
        .map(|i| run_one(state, &lowered, noise, derive_seed(seed, i)).map(|s| f(&s)))
        .collect()
}

/// Trajectory-averaged outcome distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyDistribution {
    pub n_qubits: usize,
    pub trajectories: u32,
    /// Mean of `|amp_z|²` over trajectories: the diagonal of the noisy
    /// density matrix, up to sampling error.
    pub probabilities: Vec<f64>,
}

const REDUCE_CHUNK: u64 = 64;

/// Runs `circuit` on `state` under `noise` and averages the outcome
/// distributions. Summation order is fixed by trajectory index.
pub fn apply_noisy_circuit(
    state: &StateVector,
    circuit: &Circuit,
    noise: &NoiseParams,
    seed: u64,
) -> Result<NoisyDistribution> {
    noise.validate()?;
    if circuit.n_qubits() != state.n_qubits() {
        return Err(Error::arg("circuit and state sizes differ"));
    }
    let lowered = lower_circuit(circuit)?;
    let total = noise.trajectories as u64;
    let mut sum = vec![0.0; state.dim()];
    let mut start = 0;
    while start < total {
        let end = (start + REDUCE_CHUNK).min(total);
        let chunk = (start..end)
            .into_par_iter()
            .map(|i| run_one(state, &lowered, noise, derive_seed(seed, i)).map(|s| s.probabilities()))
            .collect::<Result<Vec<_>>>()?;
        for probs in chunk {
            for (acc, p) in sum.iter_mut().zip(probs) {
                *acc += p;
            }
        }
        start = end;
    }
    for p in &mut sum {
        *p /= total as f64;
    }
    Ok(NoisyDistribution {
        n_qubits: state.n_qubits(),
        trajectories: noise.trajectories,
        probabilities: sum,
    })
}

/// Per-trajectory estimator values and their average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyEstimates {
    pub per_trajectory: Vec<Metrics>,
    pub mean: Metrics,
    /// Standard error of the mean `c_ab_projected`.
    pub standard_error: f64,
}

impl NoisyEstimates {
    pub fn c_ab_projected(&self) -> Vec<f64> {
        self.per_trajectory.iter().map(|m| m.c_ab_projected).collect()
    }
}

pub fn noisy_estimates(
    state: &StateVector,
    circuit: &Circuit,
    noise: &NoiseParams,
    seed: u64,
    obs: &DiagonalObservable,
    proj: UpProjector,
) -> Result<NoisyEstimates> {
    let per_trajectory = map_trajectories(state, circuit, noise, seed, |s| {
        metrics_from_probabilities(&s.probabilities(), obs, proj)
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (_, var) = mean_and_variance(&per_trajectory.iter().map(|m| m.c_ab_projected).collect::<Vec<_>>());
    let standard_error = var.map_or(0.0, |v| (v / per_trajectory.len() as f64).sqrt());
    Ok(NoisyEstimates {
        mean: average_metrics(&per_trajectory),
        per_trajectory,
        standard_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_grover, build_shallow, ShallowSpec};
    use crate::estimators::state_metrics;
    use crate::observables::{conjunction_oracle, BitConstraint};
    use crate::statevec::{apply_circuit, zero_state, Gate};

    #[test]
    fn parse_noise_flag() {
        let n: NoiseParams = "0.001,0.01,500".parse().unwrap();
        assert_eq!(
            n,
            NoiseParams {
                p1: 0.001,
                p2: 0.01,
                trajectories: 500
            }
        );
        assert_eq!(n.to_string().parse::<NoiseParams>().unwrap(), n);
        let n: NoiseParams = "0.1,0.2".parse().unwrap();
        assert_eq!(n.trajectories, DEFAULT_TRAJECTORIES);
        assert!("1.5,0.1,10".parse::<NoiseParams>().is_err());
        assert!("0.1,0.1,0".parse::<NoiseParams>().is_err());
        assert!("0.1".parse::<NoiseParams>().is_err());
    }

    #[test]
    fn zero_noise_is_noiseless() {
        let n = 4;
        let obs = DiagonalObservable::zstring(n, &[0]).unwrap();
        let spec = ShallowSpec::biased_parity(&DiagonalObservable::zstring(n, &[0, 2]).unwrap());
        let c = build_shallow(n, &spec).unwrap();
        let z = zero_state(n).unwrap();
        let clean = apply_circuit(&z, &c).unwrap();
        let noise = NoiseParams::new(0.0, 0.0, 7).unwrap();
        let states = map_trajectories(&z, &c, &noise, 1, |s| s.clone()).unwrap();
        assert_eq!(states.len(), 7);
        for s in states {
            assert!(1.0 - s.fidelity(&clean) < 1e-12);
        }
        let dist = apply_noisy_circuit(&z, &c, &noise, 1).unwrap();
        for (a, b) in dist.probabilities.iter().zip(clean.probabilities()) {
            assert!((a - b).abs() < 1e-12);
        }
        let est = noisy_estimates(&z, &c, &noise, 1, &obs, UpProjector::new(1)).unwrap();
        let exact = state_metrics(&clean, &obs, UpProjector::new(1)).unwrap();
        assert!((est.mean.c_ab_projected - exact.c_ab_projected).abs() < 1e-12);
    }

    #[test]
    fn full_depolarization_kills_z() {
        // One X gate on |0>, then a Pauli error with certainty.
        let c = Circuit::from_gates(1, vec![Gate::X { qubit: 0 }]).unwrap();
        let noise = NoiseParams::new(1.0, 1.0, 10_000).unwrap();
        let zs = map_trajectories(&zero_state(1).unwrap(), &c, &noise, 9, |s| {
            let p = s.probabilities();
            p[0] - p[1]
        })
        .unwrap();
        let (mean, var) = mean_and_variance(&zs);
        let se = (var.unwrap() / zs.len() as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn deterministic_given_seed() {
        let n = 4;
        let pred = conjunction_oracle(&[
            BitConstraint { qubit: 0, value: false },
            BitConstraint { qubit: 1, value: false },
        ])
        .unwrap();
        let c = build_grover(n, &pred, 1).unwrap();
        let noise = NoiseParams::new(0.01, 0.05, 40).unwrap();
        let z = zero_state(n).unwrap();
        let a = apply_noisy_circuit(&z, &c, &noise, 3).unwrap();
        let b = apply_noisy_circuit(&z, &c, &noise, 3).unwrap();
        assert_eq!(a, b);
        let total: f64 = a.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
