//! Peaked-state preparation and infinite-temperature correlation estimators
//! on a dense statevector simulator.
//!
//! The crate prepares states whose probability mass concentrates on basis
//! states that contribute constructively to `Σ_z |<z|P↑|r>|² a_z`, and
//! compares them against Haar-random states:
//!
//! * [`statevec`]: dense amplitudes, gates, Haar sampling, shot sampling
//! * [`observables`]: Pauli-Z strings, the up-projector, oracle predicates
//! * [`circuits`]: Grover and shallow builders, lowering, OpenQASM 2.0 export
//! * [`estimators`]: projected and full ITCF estimators, `S_A`, `E_A`
//! * [`noise`]: depolarizing Pauli trajectories
//! * [`harness`]: experiment configs, sweeps, comparisons, CSV/JSON output
//!
//! Basis index bit `i` is qubit `i` throughout.

pub mod circuits;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod noise;
pub mod observables;
pub mod rng;
pub mod statevec;

pub use circuits::{
    build_grover, build_shallow, export_qasm, grover_success_probability, lower_circuit, optimal_iterations, Circuit,
    CircuitMetadata, ShallowSpec,
};
pub use error::{Error, Result};
pub use estimators::{
    biased_ratio, exact_trace_itcf, haar_average_itcf, itcf_full, itcf_projected, projected_weights, shot_estimates,
    support_overlap, EstimateReport, Method, Metrics, ShotsUsed,
};
pub use harness::{compare_methods, run_experiment, sweep_grover_iterations, ExperimentConfig, ExperimentMethod};
pub use noise::{apply_noisy_circuit, noisy_estimates, NoiseParams};
pub use observables::{conjoined_oracle, heaviside_oracle, DiagonalObservable, OraclePredicate, UpProjector};
pub use statevec::{
    apply_circuit, apply_gate, haar_random_state, measure_sample, zero_state, Gate, ShotHistogram, StateVector,
};
