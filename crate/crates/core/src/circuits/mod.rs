//! Peaked-state circuit builders and Grover analytics.

mod lower;
mod qasm;

pub use lower::{lower_circuit, lower_gate, multi_controlled_z};
pub use qasm::export_qasm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{DiagonalObservable, OraclePredicate};
use crate::statevec::{Gate, MAX_QUBITS};

pub const MAX_GROVER_ITERATIONS: u32 = 64;

/// What produced a circuit, with the builder's inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum CircuitMetadata {
    Custom,
    Grover {
        iterations: u32,
        predicate_id: String,
        marked: u64,
    },
    Shallow {
        spec: ShallowSpec,
    },
    Lowered {
        source: Box<CircuitMetadata>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    metadata: CircuitMetadata,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubit count",
                min: 1,
                max: MAX_QUBITS,
                got: n_qubits,
            });
        }
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
            metadata: CircuitMetadata::Custom,
        })
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::new(n_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn metadata(&self) -> &CircuitMetadata {
        &self.metadata
    }

    pub fn with_metadata(mut self, metadata: CircuitMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    /// Layer count under as-soon-as-possible scheduling. Oracle and
    /// diffusion blocks occupy every qubit.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        for g in &self.gates {
            let qubits = g.qubits().unwrap_or_else(|| (0..self.n_qubits).collect());
            let next = qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qubits {
                level[q] = next;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    pub fn is_elementary(&self) -> bool {
        self.gates.iter().all(Gate::is_elementary)
    }
}

/// `n` Hadamards followed by `iterations` rounds of oracle and diffusion.
pub fn build_grover(n_qubits: usize, predicate: &OraclePredicate, iterations: u32) -> Result<Circuit> {
    if iterations > MAX_GROVER_ITERATIONS {
        return Err(Error::arg(format!(
            "{iterations} Grover iterations exceeds the limit of {MAX_GROVER_ITERATIONS}"
        )));
    }
    let mut c = Circuit::new(n_qubits)?;
    predicate.validate(n_qubits)?;
    let marked = predicate.marked_count(n_qubits);
    let space = 1u64 << n_qubits;
    if marked == 0 || marked == space {
        return Err(Error::DegenerateOracle {
            predicate: predicate.id(),
            marked,
            space,
        });
    }
    for qubit in 0..n_qubits {
        c.push(Gate::H { qubit })?;
    }
    for _ in 0..iterations {
        c.push(Gate::PhaseOracle {
            predicate: predicate.clone(),
        })?;
        c.push(Gate::Diffusion)?;
    }
    Ok(c.with_metadata(CircuitMetadata::Grover {
        iterations,
        predicate_id: predicate.id(),
        marked,
    }))
}

fn grover_angle(marked: u64, space: u64) -> Result<f64> {
    if marked == 0 || marked >= space {
        return Err(Error::arg(format!("marked count {marked} must lie in [1, {space})")));
    }
    Ok((marked as f64 / space as f64).sqrt().asin())
}

/// `sin²((2T+1)·asin(√(M/N)))`.
pub fn grover_success_probability(marked: u64, space: u64, iterations: u32) -> Result<f64> {
    let theta = grover_angle(marked, space)?;
    Ok(((2.0 * iterations as f64 + 1.0) * theta).sin().powi(2))
}

/// `floor(π / (4θ))`, stepped down while the smaller count does at least
/// as well (the `M/N = 1/2` plateau resolves to 0).
pub fn optimal_iterations(marked: u64, space: u64) -> Result<u32> {
    let theta = grover_angle(marked, space)?;
    let mut t = (std::f64::consts::PI / (4.0 * theta)).floor() as u32;
    let p = |t: u32| ((2.0 * t as f64 + 1.0) * theta).sin().powi(2);
    while t > 0 && p(t - 1) >= p(t) - 1e-12 {
        t -= 1;
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub qubit: usize,
    pub axis: Axis,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglerKind {
    Cnot,
    Cz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entangler {
    pub control: usize,
    pub target: usize,
    pub kind: EntanglerKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShift {
    pub qubit: usize,
    pub angle: f64,
}

/// Inputs of the shallow peaked-circuit builder.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShallowSpec {
    #[serde(default)]
    pub hadamard_set: Vec<usize>,
    #[serde(default)]
    pub rotations: Vec<Rotation>,
    #[serde(default)]
    pub entangling_pairs: Vec<Entangler>,
    #[serde(default)]
    pub final_phases: Vec<PhaseShift>,
}

impl ShallowSpec {
    /// Ry(π/4) on each supported qubit, then a CNOT chain along the support.
    pub fn biased_parity(obs: &DiagonalObservable) -> ShallowSpec {
        let support = obs.support();
        ShallowSpec {
            hadamard_set: Vec::new(),
            rotations: support
                .iter()
                .map(|&qubit| Rotation {
                    qubit,
                    axis: Axis::Y,
                    angle: std::f64::consts::FRAC_PI_4,
                })
                .collect(),
            entangling_pairs: support
                .windows(2)
                .map(|w| Entangler {
                    control: w[0],
                    target: w[1],
                    kind: EntanglerKind::Cnot,
                })
                .collect(),
            final_phases: Vec::new(),
        }
    }
}

/// Hadamards, then rotations in listed order, then entanglers, then phases.
pub fn build_shallow(n_qubits: usize, spec: &ShallowSpec) -> Result<Circuit> {
    let mut c = Circuit::new(n_qubits)?;
    let mut seen = vec![false; n_qubits];
    for &qubit in &spec.hadamard_set {
        if qubit < n_qubits && std::mem::replace(&mut seen[qubit], true) {
            return Err(Error::arg(format!("qubit {qubit} listed twice in hadamard_set")));
        }
        c.push(Gate::H { qubit })?;
    }
    for r in &spec.rotations {
        c.push(match r.axis {
            Axis::Y => Gate::Ry {
                qubit: r.qubit,
                theta: r.angle,
            },
            Axis::Z => Gate::Rz {
                qubit: r.qubit,
                phi: r.angle,
            },
        })?;
    }
    for e in &spec.entangling_pairs {
        c.push(match e.kind {
            EntanglerKind::Cnot => Gate::Cnot {
                control: e.control,
                target: e.target,
            },
            EntanglerKind::Cz => Gate::Cz {
                a: e.control,
                b: e.target,
            },
        })?;
    }
    for p in &spec.final_phases {
        c.push(Gate::Rz {
            qubit: p.qubit,
            phi: p.angle,
        })?;
    }
    Ok(c.with_metadata(CircuitMetadata::Shallow { spec: spec.clone() }))
}
