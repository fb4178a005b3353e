//! Simulation and estimation toolkit for randomized gate-sequence
//! experiments on few-qubit systems.
//!
//! The crate covers the full loop of a sequence-shadow experiment:
//!
//! * exact Pauli/Clifford algebra ([`pauli`], [`clifford`]) and the
//!   Pauli-basis (Liouville) picture of states, effects and channels
//!   ([`liouville`]);
//! * Markovian gate noise and SPAM models ([`noise`]) applied to random
//!   gate sequences to produce synthetic single-shot records
//!   ([`experiment`], [`shadow_io`]);
//! * classical post-processing: sequence correlators for unitary, local
//!   and Pauli probes ([`probe`], [`correlate`]), robust mean estimation
//!   and exponential fitting ([`estimate`], [`fit`]), and exact
//!   finite-sampling theory ([`moments`], [`theory`]);
//! * applications built on the estimators: coherent-error learning,
//!   cross-talk tomography, Pauli-eigenvalue extraction and unital-channel
//!   reconstruction ([`applications`]).
//!
//! All dense linear algebra is `f64` over the normalized Pauli basis
//! (`τ_P = 2^{-n/2} P`, index `(x << n) | z` with qubit 0 as the most
//! significant bit), so transfer matrices of Hermiticity-preserving maps
//! are real.

pub mod clifford;
pub mod correlate;
pub mod error;
pub mod experiment;
pub mod liouville;
pub mod moments;
pub mod noise;
pub mod pauli;
pub mod probe;
pub mod shadow_io;

pub use clifford::{
    c1_index_of, c1_to_clifford, enumerate_local_cliffords, sample_clifford,
    sample_local_clifford, sample_pauli, CliffordElement, LocalCliffordElement,
    PauliPermutation,
};
pub use error::{Error, Result};
pub use liouville::{IrrepKind, IrrepProjector, PauliVec, SuperOperator};
pub use pauli::{Axis, PauliString};
