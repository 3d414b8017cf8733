//! Invariants of the finite Heisenberg group `H_N` acting on `C^N`, and
//! recovery of a generic signal's orbit from them.
//!
//! The invariant bundle of a signal `x` consists of the bispectrum of its
//! squared moduli `y_j = |x_j|²`, the bispectrum of its squared Fourier
//! moduli `z_k = |x̂[k]|²`, and the power sum `I_N(x) = Σ x_j^N`.
//! [`recover_orbit`] inverts both bispectra, solves the resulting phase
//! retrieval problem and fixes the global phase with `I_N`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cyclic;
pub mod error;
pub mod group;
pub mod invariants;
pub mod inversion;
pub mod phase_retrieval;
pub mod pipeline;
pub mod spectral;

pub use error::{Error, Result};
pub use group::{act, enumerate_group, inverse, multiply, orbit_distance, orbit_equivalent, GroupElement};
pub use invariants::{
    fourier_modulus_bispectrum, fourier_modulus_vector, heisenberg_invariants, invariant_distance,
    is_generic, modulus_bispectrum, modulus_vector, power_invariant, unitary_bispectrum,
    BispectrumMatrix, GenericityReport, HeisenbergInvariants,
};
pub use inversion::{invert_bispectrum, invert_bispectrum_within, invert_real_bispectrum, InversionResult};
pub use phase_retrieval::{
    best_global_phase, magnitudes_match, retrieve_phase, PhaseRetrievalConfig, RecoveryReport,
};
pub use pipeline::{recover_orbit, verify_against_truth, OrbitRecoveryReport, Verification};
pub use spectral::{
    cyclic_shift, dft, idft, principal_nth_root, sample_random_signal, ComplexVector, RealVector,
    ToleranceConfig,
};

pub use num_complex::Complex64;
