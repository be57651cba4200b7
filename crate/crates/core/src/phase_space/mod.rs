//! Phase-space representations: characteristic functions, Wigner functions,
//! negativity and overlap fidelities.

mod chi;
mod fidelity;
pub mod quadrature;
mod wigner;

pub use chi::{CatState, CharacteristicFunction, ChiSamples, FnChi, GaussianChi, Parity, Rotated};
pub(crate) use chi::gaussian_half_width;
pub(crate) use fidelity::check_overlap;
pub use fidelity::fidelity_chi_overlap;
pub use wigner::{negativity, wigner_at, wigner_from_chi, GridSpec, WignerGrid, WignerMeta};
