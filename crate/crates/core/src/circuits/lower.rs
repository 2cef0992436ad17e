//! Lowering of oracle and diffusion blocks to {h, x, ry, rz, cx, cz}.
//!
//! Lowered circuits agree with the abstract ones up to a global phase.

use std::f64::consts::PI;

use crate::circuits::{Circuit, CircuitMetadata};
use crate::error::{Error, Result};
use crate::observables::{BitConstraint, OraclePredicate};
use crate::statevec::Gate;

/// Phase flip on the all-ones state of `qubits`, without ancillas.
///
/// For three or more qubits this expands `π·x₁⋯x_k` as a sum of parity
/// terms, `x₁⋯x_k = 2^{1-k} Σ_{S≠∅} (-1)^{|S|-1} ⊕_{i∈S} x_i`, and realizes
/// each term with one `rz` on a qubit holding that parity. Subsets are
/// grouped by their highest member, which holds the parity, and walked in
/// Gray-code order over the lower members so every step costs one `cx`.
/// Total: `2^k - 1` rotations and about `2^k` CNOTs.
pub fn multi_controlled_z(qubits: &[usize]) -> Vec<Gate> {
    match qubits {
        [] => Vec::new(),
        [q] => vec![Gate::Rz { qubit: *q, phi: PI }],
        [a, b] => vec![Gate::Cz { a: *a, b: *b }],
        _ => {
            let k = qubits.len();
            let scale = PI / (1u64 << (k - 1)) as f64;
            let angle = |size: u32| if size % 2 == 1 { scale } else { -scale };
            let mut gates = Vec::with_capacity(1 << (k + 1));
            for (h, &holder) in qubits.iter().enumerate() {
                gates.push(Gate::Rz {
                    qubit: holder,
                    phi: angle(1),
                });
                let mut prev = 0usize;
                for i in 1..1usize << h {
                    let gray = i ^ (i >> 1);
                    let flipped = (gray ^ prev).trailing_zeros() as usize;
                    gates.push(Gate::Cnot {
                        control: qubits[flipped],
                        target: holder,
                    });
                    gates.push(Gate::Rz {
                        qubit: holder,
                        phi: angle(1 + gray.count_ones()),
                    });
                    prev = gray;
                }
                if h > 0 {
                    // Gray sequence ends on the single bit h-1.
                    gates.push(Gate::Cnot {
                        control: qubits[h - 1],
                        target: holder,
                    });
                }
            }
            gates
        }
    }
}

fn flip_zeros(constraints: &[BitConstraint]) -> Vec<Gate> {
    constraints
        .iter()
        .filter(|c| !c.value)
        .map(|c| Gate::X { qubit: c.qubit })
        .collect()
}

fn conjunction(constraints: &[BitConstraint]) -> Vec<Gate> {
    let wrap = flip_zeros(constraints);
    let qubits: Vec<usize> = constraints.iter().map(|c| c.qubit).collect();
    let mut gates = wrap.clone();
    gates.extend(multi_controlled_z(&qubits));
    gates.extend(wrap);
    gates
}

/// Folds the parity of `support` into its last qubit (self-inverse).
fn parity_ladder(support: &[usize]) -> Vec<Gate> {
    let (&last, rest) = support.split_last().expect("nonempty support");
    rest.iter()
        .map(|&q| Gate::Cnot {
            control: q,
            target: last,
        })
        .collect()
}

fn lower_oracle(predicate: &OraclePredicate, n_qubits: usize) -> Result<Vec<Gate>> {
    let unsupported = || Error::UnsupportedOracle(predicate.id());
    match predicate {
        OraclePredicate::SignPositive { observable } => {
            if !observable.is_zstring() {
                return Err(unsupported());
            }
            let support = observable.support();
            if support.is_empty() {
                return Ok(Vec::new());
            }
            let ladder = parity_ladder(support);
            let last = *support.last().unwrap();
            let mut gates = ladder.clone();
            gates.extend(conjunction(&[BitConstraint {
                qubit: last,
                value: false,
            }]));
            gates.extend(ladder.into_iter().rev());
            Ok(gates)
        }
        OraclePredicate::SignPositiveAndUp { observable, projector } => {
            if !observable.is_zstring() {
                return Err(unsupported());
            }
            let support = observable.support();
            let up = BitConstraint {
                qubit: projector.qubit,
                value: false,
            };
            if support.is_empty() {
                return Ok(conjunction(&[up]));
            }
            let ladder = parity_ladder(support);
            let last = *support.last().unwrap();
            let mut gates = ladder.clone();
            gates.extend(conjunction(&[
                BitConstraint {
                    qubit: last,
                    value: false,
                },
                up,
            ]));
            gates.extend(ladder.into_iter().rev());
            Ok(gates)
        }
        OraclePredicate::Conjunction { constraints } => Ok(conjunction(constraints)),
        OraclePredicate::ExplicitSet { marked } => match marked.as_slice() {
            [z] => {
                let constraints: Vec<BitConstraint> = (0..n_qubits)
                    .map(|q| BitConstraint {
                        qubit: q,
                        value: (z >> q) & 1 == 1,
                    })
                    .collect();
                Ok(conjunction(&constraints))
            }
            _ => Err(unsupported()),
        },
    }
}

/// Elementary-gate expansion of one gate on an `n_qubits` register.
pub fn lower_gate(gate: &Gate, n_qubits: usize) -> Result<Vec<Gate>> {
    gate.validate(n_qubits)?;
    match gate {
        Gate::PhaseOracle { predicate } => lower_oracle(predicate, n_qubits),
        Gate::Diffusion => {
            let all: Vec<usize> = (0..n_qubits).collect();
            let h: Vec<Gate> = all.iter().map(|&qubit| Gate::H { qubit }).collect();
            let x: Vec<Gate> = all.iter().map(|&qubit| Gate::X { qubit }).collect();
            let mut gates = h.clone();
            gates.extend(x.iter().cloned());
            gates.extend(multi_controlled_z(&all));
            gates.extend(x);
            gates.extend(h);
            Ok(gates)
        }
        g => Ok(vec![g.clone()]),
    }
}

/// Circuit with every abstract block replaced by elementary gates.
pub fn lower_circuit(circuit: &Circuit) -> Result<Circuit> {
    let n = circuit.n_qubits();
    let mut gates = Vec::with_capacity(circuit.len());
    for g in circuit.gates() {
        gates.extend(lower_gate(g, n)?);
    }
    let source = match circuit.metadata() {
        CircuitMetadata::Lowered { source } => source.clone(),
        other => Box::new(other.clone()),
    };
    Ok(Circuit::from_gates(n, gates)?.with_metadata(CircuitMetadata::Lowered { source }))
}
