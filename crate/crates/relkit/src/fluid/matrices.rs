//! The symmetric matrices `A₀, A_i` of the first-order macroscopic
//! reformulation, built entrywise from the Bessel-closure coefficients
//! `h = c²K₃/K₂`, `h₁ = n(6K₃ + γK₂)/(γK₂)`, `h₂ = nK₃/(γK₂)`, and the
//! leading-principal-minor positive-definiteness check that underwrites the
//! energy estimates.

use crate::bessel::k_ratio;
use crate::error::{Error, Result};
use crate::thermo::{energy_density, pressure, FluidState, LightSpeed};
use crate::Vec3;
use nalgebra::SMatrix;

pub type Matrix5 = SMatrix<f64, 5, 5>;

/// `A₀` and the three flux matrices, with the field context they were
/// evaluated at.
#[derive(Debug, Clone)]
pub struct MacroMatrixSet {
    pub a0: Matrix5,
    pub a: [Matrix5; 3],
    pub e0: Vec3,
    pub b0: Vec3,
}

/// Builds the 5×5 symmetric system matrices at a fluid state. Symmetric
/// entries are written from one computed value, so symmetry is bitwise.
pub fn assemble_macro_matrices(
    state: &FluidState,
    e0: Vec3,
    b0: Vec3,
    c: LightSpeed,
) -> Result<MacroMatrixSet> {
    if state.u.norm() > 0.25 * c.0 {
        return Err(Error::Domain("matrices are assembled for |u| ≤ c/4".into()));
    }
    let gamma = state.gamma(c);
    let r = k_ratio(3, gamma)?;
    let cc = c.0;
    let c2 = cc * cc;
    let n = state.n;
    let u = state.u;
    let u0 = state.u0(c);
    let uu = u.norm_squared();
    let h = c2 * r;
    // h₁ = n(6K₃ + γK₂)/(γK₂) = n(1 + 6 r T/c²), h₂ = n K₃/(γK₂) = n r T/c²
    let h2 = n * r * state.temperature / c2;
    let h1 = n + 6.0 * h2;
    let e = energy_density(state, c)?;
    let p = pressure(state);

    let mut a0 = Matrix5::zeros();
    a0[(0, 0)] = n * u0 / cc;
    for i in 0..3 {
        let v = n * u0 * h * u[i] / (c2 * cc);
        a0[(0, i + 1)] = v;
        a0[(i + 1, 0)] = v;
        for j in i..3 {
            let d = if i == j { 1.0 } else { 0.0 };
            let v = (h1 / cc * u[i] * u[j] + cc * h2 * d) * u0;
            a0[(i + 1, j + 1)] = v;
            a0[(j + 1, i + 1)] = v;
        }
        let v = (h1 / c2 * u0 * u0 - h2) * u[i];
        a0[(i + 1, 4)] = v;
        a0[(4, i + 1)] = v;
    }
    let v04 = (e * u0 * u0 + p * uu) / (c2 * c2);
    a0[(0, 4)] = v04;
    a0[(4, 0)] = v04;
    a0[(4, 4)] = (h1 / (c2 * cc) * u0 * u0 - 3.0 * h2 / cc) * u0;

    let mut a = [Matrix5::zeros(), Matrix5::zeros(), Matrix5::zeros()];
    for (idx, ai) in a.iter_mut().enumerate() {
        ai[(0, 0)] = n * u[idx];
        for j in 0..3 {
            let d_ij = if idx == j { 1.0 } else { 0.0 };
            let v = n * h * u[idx] * u[j] / c2 + p * d_ij;
            ai[(0, j + 1)] = v;
            ai[(j + 1, 0)] = v;
            for k in j..3 {
                let d_jk = if j == k { 1.0 } else { 0.0 };
                let d_ik = if idx == k { 1.0 } else { 0.0 };
                // h₁ u_i u⊗u + c²h₂(u_i I + Ã_i), (Ã_i)_{jk} = δ_ij u_k + δ_ik u_j
                let v = h1 * u[idx] * u[j] * u[k]
                    + c2 * h2 * (u[idx] * d_jk + d_ij * u[k] + d_ik * u[j]);
                ai[(j + 1, k + 1)] = v;
                ai[(k + 1, j + 1)] = v;
            }
            let v = (h1 / cc * u[idx] * u[j] + cc * h2 * d_ij) * u0;
            ai[(j + 1, 4)] = v;
            ai[(4, j + 1)] = v;
        }
        let v = n * h * u0 * u[idx] / (c2 * cc);
        ai[(0, 4)] = v;
        ai[(4, 0)] = v;
        ai[(4, 4)] = (h1 / c2 * u0 * u0 - h2) * u[idx];
    }
    Ok(MacroMatrixSet { a0, a, e0, b0 })
}

/// Leading principal minors and the positive-definite verdict of a
/// symmetric matrix (Cholesky as the factorization route, minors by
/// Sylvester for the report).
pub fn positive_definiteness_check(m: &Matrix5) -> Result<(bool, [f64; 5])> {
    let asym = (m - m.transpose()).norm();
    if asym > 1e-12 * m.norm().max(1.0) {
        return Err(Error::Domain(format!(
            "matrix is not symmetric: ‖A - Aᵗ‖ = {asym:e}"
        )));
    }
    let mut minors = [0.0; 5];
    for k in 1..=5 {
        let sub = m.view((0, 0), (k, k)).clone_owned();
        minors[k - 1] = sub.determinant();
    }
    let verdict = nalgebra::Cholesky::new(*m).is_some();
    Ok((verdict, minors))
}
