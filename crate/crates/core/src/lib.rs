//! Collective spin of `N` bosonic qubits driven by a phase-imprint field and
//! colored Gaussian noise.
//!
//! The crate builds the Dicke-basis angular-momentum algebra, the orthonormal
//! spherical-tensor operator basis, decay-rate integrals of stationary noise,
//! two independent engines for the averaged density matrix (second-cumulant
//! closed form and Monte-Carlo trajectory averaging), probe states and the
//! Fisher-information calculators used for phase estimation.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. IO, the CLI and the parallel Monte-Carlo driver live in the
//! companion `memspin` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod evolution;
pub mod metrology;
pub mod montecarlo;
pub mod noise;
pub mod quadrature;
pub mod spin;
pub mod states;
pub mod tensor;
pub mod tolerance;

pub use error::{Error, Result};
pub use spin::{CMatrix, SpinSystem};
