//! The linear curl-div system for the first magnetic correction on the
//! torus: `div B₁ = 0`, `∇×B₁ = f` with `f = ∂_t E₀ - 4π n₀ u₀`.
//!
//! In Fourier space `B̂₁(k) = i k × f̂(k) / |k|²` (k ≠ 0), which produces
//! `div B₁ = 0` identically and `∇×B₁ = P f`, the divergence-free part of
//! `f`. Consistent Euler-Poisson inputs satisfy `div f = 0` exactly, so the
//! curl reproduces `f` itself.

use crate::error::{Error, Result};
use crate::grid::{max_abs, max_abs_vec, Field3, Grid3Periodic, Spectral3, VecField3};
use ndarray::Array3;
use rustfft::num_complex::Complex64;

/// Solution fields and diagnostics of one curl-div solve.
pub struct CurlDivSolution {
    pub b1: VecField3,
    pub forcing: VecField3,
    /// `‖div f‖∞` of the supplied forcing (should vanish for consistent
    /// inputs).
    pub div_f_max: f64,
    pub div_b1_max: f64,
    pub curl_residual_max: f64,
}

/// Solves the curl-div system given order-zero fields; `u0` must be
/// irrotational to the stated tolerance, and the means of `(n₀-n̄)u₀` enter
/// only the k = 0 gauge (dropped).
pub fn curl_div_solve(
    n0: &Field3,
    u0: &VecField3,
    dt_e0: &VecField3,
    grid: Grid3Periodic,
    curl_u0_tol: f64,
    div_f_tol: f64,
) -> Result<CurlDivSolution> {
    let sp = Spectral3::new(grid);
    let curl_u0 = max_abs_vec(&sp.curl(u0));
    if curl_u0 > curl_u0_tol {
        return Err(Error::Domain(format!(
            "u0 must be irrotational; ‖∇×u0‖∞ = {curl_u0:e}"
        )));
    }
    let n = grid.n;
    let four_pi = 4.0 * std::f64::consts::PI;
    let forcing: VecField3 = [
        &dt_e0[0] - &(four_pi * (n0 * &u0[0])),
        &dt_e0[1] - &(four_pi * (n0 * &u0[1])),
        &dt_e0[2] - &(four_pi * (n0 * &u0[2])),
    ];
    let div_f_max = max_abs(&sp.divergence(&forcing));
    if div_f_max > div_f_tol {
        return Err(Error::Gauge(format!(
            "forcing has a divergence-free-projection residual ‖div f‖∞ = {div_f_max:e}; \
             the continuity equation of consistent inputs would annihilate it"
        )));
    }
    let modes: Vec<Array3<Complex64>> = forcing.iter().map(|fc| sp.forward(fc)).collect();
    let mut out = [
        Array3::from_elem((n, n, n), Complex64::new(0.0, 0.0)),
        Array3::from_elem((n, n, n), Complex64::new(0.0, 0.0)),
        Array3::from_elem((n, n, n), Complex64::new(0.0, 0.0)),
    ];
    let wav = |idx: usize| -> f64 {
        if idx <= n / 2 {
            idx as f64
        } else {
            idx as f64 - n as f64
        }
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let kv = [wav(i), wav(j), wav(k)];
                let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
                if k2 == 0.0 {
                    continue;
                }
                let f = [
                    modes[0][(i, j, k)],
                    modes[1][(i, j, k)],
                    modes[2][(i, j, k)],
                ];
                // B̂₁ = i k × f̂ / |k|²
                let ik = |a: f64, z: Complex64| Complex64::new(0.0, a / k2) * z;
                out[0][(i, j, k)] = ik(kv[1], f[2]) - ik(kv[2], f[1]);
                out[1][(i, j, k)] = ik(kv[2], f[0]) - ik(kv[0], f[2]);
                out[2][(i, j, k)] = ik(kv[0], f[1]) - ik(kv[1], f[0]);
            }
        }
    }
    let b1: VecField3 = [
        sp.inverse(&out[0]),
        sp.inverse(&out[1]),
        sp.inverse(&out[2]),
    ];
    let div_b1_max = max_abs(&sp.divergence(&b1));
    let curl_b1 = sp.curl(&b1);
    let mut curl_residual_max = 0.0f64;
    for comp in 0..3 {
        for (a, b) in curl_b1[comp].iter().zip(forcing[comp].iter()) {
            curl_residual_max = curl_residual_max.max((a - b).abs());
        }
    }
    Ok(CurlDivSolution {
        b1,
        forcing,
        div_f_max,
        div_b1_max,
        curl_residual_max,
    })
}

/// Manufactures Euler-Poisson-consistent order-zero fields on the torus:
/// `u₀ = ∇(sin x₁ sin x₂ sin x₃)` (irrotational), `n₀ = n̄ + a cos x₁`, and
/// `∂_t E₀ = 4π ∇Δ⁻¹ div(n₀u₀)` from the continuity equation, so that
/// `div f = 0` holds exactly.
pub fn manufactured_ep_fields(
    grid: Grid3Periodic,
    n_bar: f64,
    amplitude: f64,
) -> Result<(Field3, VecField3, VecField3)> {
    let sp = Spectral3::new(grid);
    let n0 = grid.field(|x, _, _| n_bar + amplitude * x.cos());
    let potential = grid.field(|x, y, z| x.sin() * y.sin() * z.sin());
    let u0 = sp.gradient(&potential);
    let nu: VecField3 = [&n0 * &u0[0], &n0 * &u0[1], &n0 * &u0[2]];
    let div_nu = sp.divergence(&nu);
    let psi = sp.inv_laplacian(&div_nu, 1e-8)?;
    let grad_psi = sp.gradient(&psi);
    let four_pi = 4.0 * std::f64::consts::PI;
    let dt_e0: VecField3 = [
        four_pi * &grad_psi[0],
        four_pi * &grad_psi[1],
        four_pi * &grad_psi[2],
    ];
    Ok((n0, u0, dt_e0))
}

/// The scalar-potential part of the paper's forcing decomposition,
/// `Φ = ∂_t φ - 4π n̄ φ₀`, whose gradient annihilates divergence-free test
/// fields; returns `∇Φ` so pairings can be checked directly.
pub fn forcing_gradient_part(
    n0: &Field3,
    u0: &VecField3,
    grid: Grid3Periodic,
    n_bar: f64,
) -> Result<VecField3> {
    let sp = Spectral3::new(grid);
    // ∂_t φ from Δ∂_tφ = 4π div(n₀u₀) (time derivative of the Poisson
    // equation through continuity)
    let nu: VecField3 = [n0 * &u0[0], n0 * &u0[1], n0 * &u0[2]];
    let div_nu = sp.divergence(&nu);
    let four_pi = 4.0 * std::f64::consts::PI;
    let dt_phi = sp.inv_laplacian(&(four_pi * &div_nu), 1e-8)?;
    // φ₀ with u₀ = ∇φ₀: Δφ₀ = div u₀
    let div_u0 = sp.divergence(u0);
    let phi0 = sp.inv_laplacian(&div_u0, 1e-8)?;
    let big_phi = &dt_phi - &(four_pi * n_bar * &phi0);
    Ok(sp.gradient(&big_phi))
}
