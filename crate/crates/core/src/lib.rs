//! Heralded Schrödinger-cat states of a mechanical resonator in pulsed cavity
//! optomechanics.
//!
//! The protocol has three stages:
//!
//! 1. a red/blue pulse pair drives the resonator into a squeezed (thermal)
//!    steady state ([`gaussian`]);
//! 2. a second red pulse acts as a beam splitter between the mechanics and a
//!    cavity temporal mode, and detecting `n` photons heralds a non-Gaussian
//!    mechanical state ([`conditioning`], [`phase_space`]);
//! 3. the state is stored under thermal damping and swapped onto a cavity
//!    output pulse for verification ([`decoherence`]).
//!
//! Every analytic formula is cross-checked against a brute-force truncated
//! Fock-space model in [`fock`]. The [`pipeline`] module strings the stages
//! together, runs the fidelity optimizer and writes result tables.

pub mod conditioning;
pub mod decoherence;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod params;
pub mod phase_space;
pub mod pipeline;
pub mod special;

pub use conditioning::{detection_probability, ConditionalChi};

pub use error::{Error, Result};
pub use decoherence::{ReadoutField, ReadoutMap, StorageReadout, StoredState};
pub use gaussian::{
    assemble_output_covariance, squeezed_thermal_moments, steady_state_squeezing, ModeKind,
    SingleModeGaussian, SqueezedThermalSpec, TwoModeCovariance,
};
pub use params::{PhysicalParams, PulseSchedule, Transmissivity};
pub use phase_space::{
    fidelity_chi_overlap, negativity, wigner_from_chi, CatState, CharacteristicFunction,
    GaussianChi, GridSpec, Parity, WignerGrid,
};

pub use num_complex::Complex64;
