//! OpenQASM 2.0 text output.

use std::fmt::Write;

use crate::circuits::{lower_circuit, Circuit};
use crate::error::Result;
use crate::statevec::Gate;

pub const QASM_HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

/// Lowers `circuit` and prints it against a single register `q`.
/// Qubit `i` of the simulator is `q[i]`.
pub fn export_qasm(circuit: &Circuit) -> Result<String> {
    let lowered = lower_circuit(circuit)?;
    let mut out = String::from(QASM_HEADER);
    writeln!(out, "qreg q[{}];", lowered.n_qubits()).unwrap();
    for g in lowered.gates() {
        match g {
            Gate::H { qubit } => writeln!(out, "h q[{qubit}];"),
            Gate::X { qubit } => writeln!(out, "x q[{qubit}];"),
            Gate::Ry { qubit, theta } => writeln!(out, "ry({theta:?}) q[{qubit}];"),
            Gate::Rz { qubit, phi } => writeln!(out, "rz({phi:?}) q[{qubit}];"),
            Gate::Cnot { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            Gate::Cz { a, b } => writeln!(out, "cz q[{a}],q[{b}];"),
            Gate::PhaseOracle { .. } | Gate::Diffusion => unreachable!("lowered circuit"),
        }
        .unwrap();
    }
    Ok(out)
}
