//! Linearized Euler-Poisson about a background `(n₀, u₀)`:
//! `∂_t n₁ + ∂_x(n₀u₁ + n₁u₀) = 0`,
//! `∂_t u₁ + u₀∂_x u₁ + u₁∂_x u₀ + (5/2)∂_x(T₀'(n₀) n₁) = -E₁`,
//! `∂_x E₁ = -4π n₁` (curl-free is automatic in 1D).
//!
//! Spectral derivatives + SSP-RK3; `E₁` is re-solved from the constraint at
//! every stage, so the Gauss law cannot drift.

use crate::error::Result;
use crate::fluid::ep::EpParams;
use crate::grid::{Grid1D, Spectral1D};

/// Perturbation fields `(n₁, u₁)`; `E₁` is derived from `n₁`.
#[derive(Debug, Clone)]
pub struct LinearEpState {
    pub n1: Vec<f64>,
    pub u1: Vec<f64>,
    pub grid: Grid1D,
    pub time: f64,
}

impl LinearEpState {
    pub fn electric_field(&self, spectral: &Spectral1D) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self
            .n1
            .iter()
            .map(|n| -4.0 * std::f64::consts::PI * n)
            .collect();
        spectral.antiderivative_mean_zero(&rhs, 1e-9)
    }
}

/// Background sampler: `(n₀, u₀)` at a requested time.
pub type Background<'a> = dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + 'a;

fn rhs(
    state: &LinearEpState,
    bg: &Background,
    params: &EpParams,
    spectral: &Spectral1D,
    t: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n0, u0) = bg(t);
    let n = state.grid.n;
    let e1 = state.electric_field(spectral)?;
    // flux n₀u₁ + n₁u₀ differentiated spectrally
    let flux: Vec<f64> = (0..n)
        .map(|i| n0[i] * state.u1[i] + state.n1[i] * u0[i])
        .collect();
    let dflux = spectral.derivative(&flux);
    let du1 = spectral.derivative(&state.u1);
    let du0 = spectral.derivative(&u0);
    // (5/2) T₀'(n₀) n₁ differentiated spectrally; T₀'(ρ) = (2/3)K ρ^{-1/3}
    let press: Vec<f64> = (0..n)
        .map(|i| 2.5 * (2.0 / 3.0) * params.k_poly * n0[i].powf(-1.0 / 3.0) * state.n1[i])
        .collect();
    let dpress = spectral.derivative(&press);
    let dn1: Vec<f64> = dflux.iter().map(|v| -v).collect();
    let du1_dt: Vec<f64> = (0..n)
        .map(|i| -u0[i] * du1[i] - state.u1[i] * du0[i] - dpress[i] - e1[i])
        .collect();
    Ok((dn1, du1_dt))
}

/// One SSP-RK3 step with the background sampled at the stage times.
pub fn linearized_ep_step(
    state: &LinearEpState,
    bg: &Background,
    dt: f64,
    params: &EpParams,
    spectral: &Spectral1D,
) -> Result<LinearEpState> {
    let combine = |a: &[f64], b: &[f64], wa: f64, wb: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
    };
    let t = state.time;
    let k1 = rhs(state, bg, params, spectral, t)?;
    let s1 = LinearEpState {
        n1: combine(&state.n1, &k1.0, 1.0, dt),
        u1: combine(&state.u1, &k1.1, 1.0, dt),
        grid: state.grid,
        time: t + dt,
    };
    let k2 = rhs(&s1, bg, params, spectral, t + dt)?;
    let s2 = LinearEpState {
        n1: combine(&combine(&state.n1, &s1.n1, 0.75, 0.25), &k2.0, 1.0, 0.25 * dt),
        u1: combine(&combine(&state.u1, &s1.u1, 0.75, 0.25), &k2.1, 1.0, 0.25 * dt),
        grid: state.grid,
        time: t + 0.5 * dt,
    };
    let k3 = rhs(&s2, bg, params, spectral, t + 0.5 * dt)?;
    let w = 2.0 / 3.0;
    Ok(LinearEpState {
        n1: combine(&combine(&state.n1, &s2.n1, 1.0 / 3.0, w), &k3.0, 1.0, w * dt),
        u1: combine(&combine(&state.u1, &s2.u1, 1.0 / 3.0, w), &k3.1, 1.0, w * dt),
        grid: state.grid,
        time: t + dt,
    })
}
