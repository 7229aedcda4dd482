//! Classical isentropic Euler-Poisson in one periodic dimension:
//! `∂_t ρ + ∂_x(ρ𝔲) = 0`, `∂_t(ρ𝔲) + ∂_x(ρ𝔲² + 𝒫) = -ρ ∂_x φ`,
//! `Δφ = 4π(ρ̄ - ρ)`, with the polytrope `𝒫 = K ρ^{5/3}`,
//! `K = (2π)⁻¹ e^{-5/3 + (2/3)S}`.
//!
//! Finite-volume local Lax-Friedrichs fluxes, SSP-RK3 in time, and the
//! electric field re-solved spectrally at every stage (constraint-preserving
//! by construction).

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Spectral1D};
use crate::thermo::EntropyConstant;

/// Solver parameters: polytrope constant and the ion background.
#[derive(Debug, Clone, Copy)]
pub struct EpParams {
    pub k_poly: f64,
    pub rho_bar: f64,
}

impl EpParams {
    pub fn from_entropy(entropy: EntropyConstant, rho_bar: f64) -> Self {
        EpParams {
            k_poly: (2.0 * std::f64::consts::PI).recip()
                * ((2.0 / 3.0) * entropy.0 - 5.0 / 3.0).exp(),
            rho_bar,
        }
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.k_poly * rho.powf(5.0 / 3.0)
    }

    /// `𝒫'(ρ) = (5/3) K ρ^{2/3}` (the squared sound speed).
    pub fn sound_speed_sq(&self, rho: f64) -> f64 {
        5.0 / 3.0 * self.k_poly * rho.powf(2.0 / 3.0)
    }
}

/// Conserved state (ρ, ρ𝔲) on a periodic grid.
#[derive(Debug, Clone)]
pub struct EpState {
    pub rho: Vec<f64>,
    pub momentum: Vec<f64>,
    pub grid: Grid1D,
    pub time: f64,
}

impl EpState {
    pub fn new(rho: Vec<f64>, velocity: &[f64], grid: Grid1D) -> Result<Self> {
        if rho.len() != grid.n || velocity.len() != grid.n {
            return Err(Error::Domain("field length must match the grid".into()));
        }
        let momentum = rho.iter().zip(velocity).map(|(r, u)| r * u).collect();
        Ok(EpState {
            rho,
            momentum,
            grid,
            time: 0.0,
        })
    }

    pub fn velocity(&self) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.momentum)
            .map(|(r, m)| m / r)
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn max_wave_speed(&self, params: &EpParams) -> f64 {
        self.rho
            .iter()
            .zip(&self.momentum)
            .map(|(r, m)| (m / r).abs() + params.sound_speed_sq(*r).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Electric field `E = ∂_x φ` with `Δφ = 4π(ρ̄ - ρ)`, i.e.
/// `∂_x E = 4π(ρ̄ - ρ)` in the mean-zero gauge.
pub fn electric_field(
    rho: &[f64],
    params: &EpParams,
    spectral: &Spectral1D,
) -> Result<Vec<f64>> {
    let rhs: Vec<f64> = rho
        .iter()
        .map(|r| 4.0 * std::f64::consts::PI * (params.rho_bar - r))
        .collect();
    spectral.antiderivative_mean_zero(&rhs, 1e-10)
}

/// Potential φ for callers that want it (`Δφ = 4π(ρ̄ - ρ)`, mean-zero).
pub fn poisson_solve(rho: &[f64], params: &EpParams, spectral: &Spectral1D) -> Result<Vec<f64>> {
    let rhs: Vec<f64> = rho
        .iter()
        .map(|r| 4.0 * std::f64::consts::PI * (params.rho_bar - r))
        .collect();
    spectral.solve_poisson(&rhs, 1e-10)
}

fn flux(rho: f64, mom: f64, params: &EpParams) -> (f64, f64) {
    let u = mom / rho;
    (mom, mom * u + params.pressure(rho))
}

fn rhs(state: &EpState, params: &EpParams, spectral: &Spectral1D) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = state.grid.n;
    let dx = state.grid.dx();
    let e = electric_field(&state.rho, params, spectral)?;
    let mut d_rho = vec![0.0; n];
    let mut d_mom = vec![0.0; n];
    // local Lax-Friedrichs fluxes at the i+1/2 interfaces
    let mut f_rho = vec![0.0; n];
    let mut f_mom = vec![0.0; n];
    for i in 0..n {
        let j = (i + 1) % n;
        let (fl_r, fl_m) = flux(state.rho[i], state.momentum[i], params);
        let (fr_r, fr_m) = flux(state.rho[j], state.momentum[j], params);
        let lam_l = (state.momentum[i] / state.rho[i]).abs()
            + params.sound_speed_sq(state.rho[i]).sqrt();
        let lam_r = (state.momentum[j] / state.rho[j]).abs()
            + params.sound_speed_sq(state.rho[j]).sqrt();
        let lam = lam_l.max(lam_r);
        f_rho[i] = 0.5 * (fl_r + fr_r) - 0.5 * lam * (state.rho[j] - state.rho[i]);
        f_mom[i] = 0.5 * (fl_m + fr_m) - 0.5 * lam * (state.momentum[j] - state.momentum[i]);
    }
    for i in 0..n {
        let im = (i + n - 1) % n;
        d_rho[i] = -(f_rho[i] - f_rho[im]) / dx;
        d_mom[i] = -(f_mom[i] - f_mom[im]) / dx - state.rho[i] * e[i];
    }
    Ok((d_rho, d_mom))
}

/// One SSP-RK3 step; rejects the step if the CFL condition
/// `Δt ≤ 0.4 Δx / max(|𝔲| + a)` is violated or vacuum is approached.
pub fn ep_step(
    state: &EpState,
    dt: f64,
    params: &EpParams,
    spectral: &Spectral1D,
) -> Result<EpState> {
    let cfl = 0.4 * state.grid.dx() / state.max_wave_speed(params);
    if dt > cfl {
        return Err(Error::Solver(format!(
            "CFL violation: dt = {dt:e} exceeds {cfl:e}"
        )));
    }
    let floor = 1e-8 * params.rho_bar;
    let apply = |rho: &[f64], mom: &[f64], d: &(Vec<f64>, Vec<f64>), w: f64| {
        let r: Vec<f64> = rho.iter().zip(&d.0).map(|(a, b)| a + w * b).collect();
        let m: Vec<f64> = mom.iter().zip(&d.1).map(|(a, b)| a + w * b).collect();
        (r, m)
    };
    let check = |rho: &[f64]| -> Result<()> {
        if rho.iter().any(|r| *r <= floor || !r.is_finite()) {
            Err(Error::Solver("density reached the vacuum floor".into()))
        } else {
            Ok(())
        }
    };
    let mut s = state.clone();
    let k1 = rhs(&s, params, spectral)?;
    let (r1, m1) = apply(&s.rho, &s.momentum, &k1, dt);
    check(&r1)?;
    let s1 = EpState {
        rho: r1,
        momentum: m1,
        grid: s.grid,
        time: s.time + dt,
    };
    let k2 = rhs(&s1, params, spectral)?;
    let (r2a, m2a) = apply(&s1.rho, &s1.momentum, &k2, dt);
    let r2: Vec<f64> = s
        .rho
        .iter()
        .zip(&r2a)
        .map(|(a, b)| 0.75 * a + 0.25 * b)
        .collect();
    let m2: Vec<f64> = s
        .momentum
        .iter()
        .zip(&m2a)
        .map(|(a, b)| 0.75 * a + 0.25 * b)
        .collect();
    check(&r2)?;
    let s2 = EpState {
        rho: r2,
        momentum: m2,
        grid: s.grid,
        time: s.time + 0.5 * dt,
    };
    let k3 = rhs(&s2, params, spectral)?;
    let (r3a, m3a) = apply(&s2.rho, &s2.momentum, &k3, dt);
    let rho_new: Vec<f64> = s
        .rho
        .iter()
        .zip(&r3a)
        .map(|(a, b)| a / 3.0 + 2.0 / 3.0 * b)
        .collect();
    let mom_new: Vec<f64> = s
        .momentum
        .iter()
        .zip(&m3a)
        .map(|(a, b)| a / 3.0 + 2.0 / 3.0 * b)
        .collect();
    check(&rho_new)?;
    s.rho = rho_new;
    s.momentum = mom_new;
    s.time = state.time + dt;
    Ok(s)
}

/// Plasma-oscillation dispersion experiment: evolve a small single-mode
/// perturbation about `(ρ̄, 0)` and measure the oscillation frequency of the
/// mode amplitude against `ω² = 4πρ̄ + 𝒫'(ρ̄)k²`.
///
/// Returns `(ω_measured, ω_predicted)`.
pub fn plasma_dispersion(
    params: &EpParams,
    grid: Grid1D,
    mode: usize,
    amplitude: f64,
    dt: f64,
    t_end: f64,
) -> Result<(f64, f64)> {
    let spectral = Spectral1D::new(grid);
    let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length;
    let xs = grid.centers();
    let rho: Vec<f64> = xs
        .iter()
        .map(|x| params.rho_bar * (1.0 + amplitude * (k * x).cos()))
        .collect();
    let mut state = EpState::new(rho, &vec![0.0; grid.n], grid)?;
    let mut crossings = Vec::new();
    let mut prev_amp = mode_amplitude(&state, k);
    let mut prev_t = 0.0;
    while state.time < t_end {
        state = ep_step(&state, dt, params, &spectral)?;
        let amp = mode_amplitude(&state, k);
        if prev_amp != 0.0 && amp * prev_amp < 0.0 {
            // linear interpolation of the zero crossing
            let frac = prev_amp / (prev_amp - amp);
            crossings.push(prev_t + frac * (state.time - prev_t));
        }
        prev_amp = amp;
        prev_t = state.time;
    }
    if crossings.len() < 3 {
        return Err(Error::Solver(
            "not enough oscillation crossings to measure a frequency".into(),
        ));
    }
    // successive zero crossings are half periods apart
    let first = crossings[0];
    let last = *crossings.last().unwrap();
    let omega = std::f64::consts::PI * (crossings.len() - 1) as f64 / (last - first);
    let omega_pred = (4.0 * std::f64::consts::PI * params.rho_bar
        + params.sound_speed_sq(params.rho_bar) * k * k)
        .sqrt();
    Ok((omega, omega_pred))
}

fn mode_amplitude(state: &EpState, k: f64) -> f64 {
    let xs = state.grid.centers();
    let mut acc = 0.0;
    for (x, r) in xs.iter().zip(&state.rho) {
        acc += (k * x).cos() * r;
    }
    2.0 * acc / state.grid.n as f64
}
