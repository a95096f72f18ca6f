//! Wavepackets of charged leptons built from Volkov states whose probability-density
//! peak moves at a designed velocity inside a plane-wave field.
//!
//! Natural units with the lepton mass m = 1 throughout; lengths are in m⁻¹.

pub mod algebra;
pub mod error;
pub mod field;
pub mod kinematics;
pub mod lifetime;
pub mod quadrature;
pub mod run;
pub mod scenario;
pub mod spectral;
pub mod synthesis;
pub mod trajectory;

pub use error::{Error, Result};
