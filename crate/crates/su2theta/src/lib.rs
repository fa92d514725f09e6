//! Workbench for a single-vertex SU(2) lattice gauge model.
//!
//! The gauge-invariant Hilbert space of one 6-valent vertex reduces to spin
//! triples on a Θ-graph. This crate provides the exact recoupling kernel
//! (Wigner 3j/6j), the truncated Hamiltonian and its dense spectra, a qubit
//! encoding with Pauli decomposition, a gate-level simulator with
//! depolarizing trajectory noise, symmetry-preserving and hardware-efficient
//! ansatz families, a chip-topology transpiler, a multi-start Powell VQE
//! driver, and symmetry-based error mitigation.

pub mod ansatz;
pub mod circuit;
pub mod encoding;
pub mod exec;
pub mod half;
pub mod linalg;
pub mod mitigate;
pub mod powell;
pub mod sim;
pub mod theta;
pub mod transpile;
pub mod vqe;
pub mod wigner;

use half::Half;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("magnetic number {m} has wrong parity for spin {j}")]
    MagneticParity { j: Half, m: Half },
    #[error("spin arguments exceed the exact factorial range (total spin ≤ {max})")]
    SpinRange { max: Half },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("coupling λ = {lambda} outside [0, 1]")]
    BadCoupling { lambda: f64 },
    #[error("state has norm {norm}, expected 1")]
    Unnormalized { norm: f64 },
    #[error("convergence cutoff {j_conv} must exceed reference cutoff {j_ref}")]
    BadCutoffPair { j_ref: Half, j_conv: Half },
    #[error("penalty {penalty} must be non-negative")]
    BadPenalty { penalty: f64 },
    #[error("qubit registers hold spins up to 3/2, got cutoff {j_max}")]
    EncodingCutoff { j_max: Half },
    #[error("circuit text line {line}: {msg}")]
    CircuitParse { line: usize, msg: String },
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("measurement gate in pure statevector mode")]
    MeasureInPureMode,
    #[error("post-selection accepted nothing")]
    AllShotsRejected,
    #[error("post-selection condition on non-ancilla or missing ancilla (qubit {qubit})")]
    NonAncillaCondition { qubit: usize },
    #[error("probability {p} outside [0, 0.5]")]
    BadProbability { p: f64 },
    #[error("noisy simulation needs at least one trajectory")]
    NoTrajectories,
    #[error("noisy simulation needs a transpiled circuit, found {kind}")]
    NotTranspiled { kind: &'static str },
    #[error("unknown ansatz `{id}`")]
    UnknownAnsatz { id: String },
    #[error("coupling map is not connected")]
    DisconnectedMap,
    #[error("layout infeasible: {msg}")]
    BadLayout { msg: String },
    #[error("projector support lost (⟨P⟩ = {weight})")]
    ProjectorSupportLost { weight: f64 },
    #[error("observable does not commute with the symmetry projector")]
    NotProjectable,
    #[error("scaling fit needs at least 3 positive points, got {got}")]
    FitUnderdetermined { got: usize },
}
