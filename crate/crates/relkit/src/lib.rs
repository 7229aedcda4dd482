//! Numerical toolkit for the constructive objects of relativistic kinetic
//! theory near the Newtonian and hydrodynamic limits: modified Bessel
//! closures, Jüttner Maxwellians and their momentum moments, the relativistic
//! Boltzmann collision operator in the center-of-momentum and Glassey-Strauss
//! frames, curved characteristics under electromagnetic fields, the
//! Glassey-Strauss angular field kernels, and the Euler-Poisson /
//! Euler-Maxwell fluid hierarchy with its curl-div and remainder structure.
//!
//! Every closed form ships with an independent check (quadrature oracle,
//! finite differences, or a second algebraic route), and the `verify` module
//! aggregates those checks into named pass/fail suites.

pub mod bessel;
pub mod characteristics;
pub mod collision;
pub mod config;
pub mod error;
pub mod field_kernels;
pub mod fluid;
pub mod grid;
pub mod moments;
pub mod quadrature;
pub mod sweep;
pub mod thermo;
pub mod verify;

pub use error::{Error, Result};

/// 3-vectors throughout are `nalgebra` fixed-size vectors.
pub type Vec3 = nalgebra::Vector3<f64>;
