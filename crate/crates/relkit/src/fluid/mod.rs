//! The Newtonian-limit fluid hierarchy: classical Euler-Poisson, its
//! linearization, the relativistic Euler-Maxwell system in 1D electrostatic
//! reduction, the curl-div system for the first magnetic correction on the
//! torus, remainder residuals of the c⁻¹ expansion, and the symmetric
//! matrices of the first-order reformulation.

pub mod curl_div;
pub mod ep;
pub mod linear;
pub mod matrices;
pub mod rem;
pub mod residuals;

pub use curl_div::{curl_div_solve, CurlDivSolution};
pub use ep::{ep_step, plasma_dispersion, EpParams, EpState};
pub use linear::{linearized_ep_step, LinearEpState};
pub use matrices::{assemble_macro_matrices, positive_definiteness_check, MacroMatrixSet};
pub use rem::{rem_step_1d, IsentropeTable, RemParams, RemState};
pub use residuals::{remainder_residuals, ExpansionTier, RemainderResiduals};
