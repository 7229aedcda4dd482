//! Relativistic Euler-Maxwell in 1D electrostatic slab symmetry
//! (`B ≡ 0`, `E = E(x) e₁`, `u = u(x) e₁`), in the conserved form
//!
//! `∂_t D + ∂_x(n u) = 0`,            `D = n u⁰/c`,
//! `∂_t M + ∂_x(n h u²/c² + P) = -D E`,  `M = n h u⁰ u/c³`,
//! `∂_x E = 4π(n̄ - D)`,
//!
//! with the Bessel-closure enthalpy `h(n)` on the isentrope. The scheme is
//! the same finite-volume machinery as the Euler-Poisson solver (local
//! Lax-Friedrichs, SSP-RK3, elliptic field solve per stage), and its 1/c → 0
//! limit coincides with that solver term by term, so c-sweeps measure the
//! physical gap rather than scheme differences.

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Spectral1D};
use crate::thermo::{
    enthalpy, enthalpy_derivative, solve_temperature, EntropyConstant, FluidState, LightSpeed,
};

/// Isentrope closure table: cubic interpolation of T, h, h' and the
/// relativistic sound speed against n, built once per (c, S) from the exact
/// thermo solves (the per-cell root solve would dominate the runtime).
#[derive(Debug, Clone)]
pub struct IsentropeTable {
    n_lo: f64,
    dn: f64,
    temperature: Vec<f64>,
    h: Vec<f64>,
    h_prime: Vec<f64>,
    pub c: LightSpeed,
}

impl IsentropeTable {
    pub fn build(
        n_lo: f64,
        n_hi: f64,
        samples: usize,
        entropy: EntropyConstant,
        c: LightSpeed,
    ) -> Result<Self> {
        if !(n_lo > 0.0 && n_hi > n_lo && samples >= 8) {
            return Err(Error::Domain("bad isentrope table range".into()));
        }
        let dn = (n_hi - n_lo) / (samples - 1) as f64;
        let mut temperature = Vec::with_capacity(samples);
        let mut h = Vec::with_capacity(samples);
        let mut h_prime = Vec::with_capacity(samples);
        for i in 0..samples {
            let n = n_lo + dn * i as f64;
            let t = solve_temperature(n, entropy, c)?;
            let state = FluidState::rest(n, t)?;
            temperature.push(t);
            h.push(enthalpy(&state, c)?);
            h_prime.push(enthalpy_derivative(&state, c)?);
        }
        Ok(IsentropeTable {
            n_lo,
            dn,
            temperature,
            h,
            h_prime,
            c,
        })
    }

    fn interp(&self, table: &[f64], n: f64) -> Result<f64> {
        let pos = (n - self.n_lo) / self.dn;
        if !(pos.is_finite()) || pos < 1.0 || pos > (table.len() - 3) as f64 {
            return Err(Error::Solver(format!(
                "density {n} left the isentrope table range"
            )));
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        // exact 4-point Lagrange cubic on the uniform grid (O(Δn⁴))
        let (a, b, c, d) = (table[i - 1], table[i], table[i + 1], table[i + 2]);
        Ok(-t * (t - 1.0) * (t - 2.0) / 6.0 * a
            + (t * t - 1.0) * (t - 2.0) / 2.0 * b
            - t * (t + 1.0) * (t - 2.0) / 2.0 * c
            + t * (t * t - 1.0) / 6.0 * d)
    }

    pub fn temperature(&self, n: f64) -> Result<f64> {
        self.interp(&self.temperature, n)
    }

    pub fn enthalpy(&self, n: f64) -> Result<f64> {
        self.interp(&self.h, n)
    }

    pub fn enthalpy_derivative(&self, n: f64) -> Result<f64> {
        self.interp(&self.h_prime, n)
    }

    pub fn pressure(&self, n: f64) -> Result<f64> {
        Ok(n * self.temperature(n)?)
    }

    /// Relativistic sound speed `a = c sqrt(n h'/h) < c/√3`.
    pub fn sound_speed(&self, n: f64) -> Result<f64> {
        Ok(self.c.0 * (n * self.enthalpy_derivative(n)? / self.enthalpy(n)?).sqrt())
    }
}

/// Solver parameters: light speed, closure table and ion background.
pub struct RemParams {
    pub c: LightSpeed,
    pub table: IsentropeTable,
    pub n_bar: f64,
}

/// Conserved state `(D, M)` with primitive caches `(n, u)`.
#[derive(Debug, Clone)]
pub struct RemState {
    pub d: Vec<f64>,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    pub u: Vec<f64>,
    pub grid: Grid1D,
    pub time: f64,
}

impl RemState {
    /// Builds the conserved state from primitive profiles.
    pub fn from_primitives(
        n: Vec<f64>,
        u: Vec<f64>,
        grid: Grid1D,
        params: &RemParams,
    ) -> Result<Self> {
        if n.len() != grid.n || u.len() != grid.n {
            return Err(Error::Domain("field length must match the grid".into()));
        }
        let c = params.c.0;
        let mut d = vec![0.0; grid.n];
        let mut m = vec![0.0; grid.n];
        for i in 0..grid.n {
            if u[i].abs() >= 0.5 * c {
                return Err(Error::Solver("|u| must stay below c/2".into()));
            }
            let u0 = (c * c + u[i] * u[i]).sqrt();
            let h = params.table.enthalpy(n[i])?;
            d[i] = n[i] * u0 / c;
            m[i] = n[i] * h * u0 * u[i] / (c * c * c);
        }
        Ok(RemState {
            d,
            m,
            n,
            u,
            grid,
            time: 0.0,
        })
    }

    /// Electric field from the Gauss constraint `∂_x E = 4π(n̄ - D)`,
    /// mean-zero gauge.
    pub fn electric_field(&self, params: &RemParams, spectral: &Spectral1D) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self
            .d
            .iter()
            .map(|d| 4.0 * std::f64::consts::PI * (params.n_bar - d))
            .collect();
        spectral.antiderivative_mean_zero(&rhs, 1e-9)
    }

    /// Gauss-law residual `‖∂_x E - 4π(n̄ - D)‖∞` for a given field.
    pub fn gauss_residual(&self, e: &[f64], params: &RemParams, spectral: &Spectral1D) -> f64 {
        let de = spectral.derivative(e);
        de.iter()
            .zip(&self.d)
            .map(|(d, dd)| (d - 4.0 * std::f64::consts::PI * (params.n_bar - dd)).abs())
            .fold(0.0, f64::max)
    }
}

/// Primitive recovery: given `(D, M)` solve `h(n(u)) u/c² = M/D` with
/// `n(u) = D c/u⁰` by safeguarded Newton (monotone in u for admissible
/// states); returns `(n, u)`.
fn recover_primitives(d: f64, m: f64, params: &RemParams) -> Result<(f64, f64)> {
    if !(d > 0.0) {
        return Err(Error::Solver("non-positive mass variable".into()));
    }
    let c = params.c.0;
    let w = m / d; // h u / c²
    // classical guess u = w (h → c²)
    let mut u = w;
    let n_of = |u: f64| d * c / (c * c + u * u).sqrt();
    for _ in 0..50 {
        let n = n_of(u);
        let h = params.table.enthalpy(n)?;
        let f = h * u / (c * c) - w;
        let hp = params.table.enthalpy_derivative(n)?;
        let dn_du = -n * u / (c * c + u * u);
        let df = h / (c * c) + u * hp * dn_du / (c * c);
        let step = f / df;
        u -= step;
        if step.abs() <= 1e-14 * (1.0 + u.abs()) {
            break;
        }
    }
    let n = n_of(u);
    if u.abs() >= 0.5 * c {
        return Err(Error::Solver("|u| reached c/2 during recovery".into()));
    }
    Ok((n, u))
}

struct Fluxes {
    f_d: Vec<f64>,
    f_m: Vec<f64>,
}

fn rhs(
    state: &RemState,
    params: &RemParams,
    spectral: &Spectral1D,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = state.grid;
    let n_cells = grid.n;
    let dx = grid.dx();
    let c = params.c.0;
    let e = state.electric_field(params, spectral)?;
    // pointwise fluxes and wave speeds from the cached primitives
    let mut flux_d = vec![0.0; n_cells];
    let mut flux_m = vec![0.0; n_cells];
    let mut speed = vec![0.0; n_cells];
    for i in 0..n_cells {
        let (n, u) = (state.n[i], state.u[i]);
        let h = params.table.enthalpy(n)?;
        flux_d[i] = n * u;
        flux_m[i] = n * h * u * u / (c * c) + params.table.pressure(n)?;
        let a = params.table.sound_speed(n)?;
        let u_hat = c * u / (c * c + u * u).sqrt();
        speed[i] = (u_hat.abs() + a) / (1.0 + u_hat.abs() * a / (c * c));
    }
    let mut f = Fluxes {
        f_d: vec![0.0; n_cells],
        f_m: vec![0.0; n_cells],
    };
    for i in 0..n_cells {
        let j = (i + 1) % n_cells;
        let lam = speed[i].max(speed[j]);
        f.f_d[i] = 0.5 * (flux_d[i] + flux_d[j]) - 0.5 * lam * (state.d[j] - state.d[i]);
        f.f_m[i] = 0.5 * (flux_m[i] + flux_m[j]) - 0.5 * lam * (state.m[j] - state.m[i]);
    }
    let mut d_d = vec![0.0; n_cells];
    let mut d_m = vec![0.0; n_cells];
    for i in 0..n_cells {
        let im = (i + n_cells - 1) % n_cells;
        d_d[i] = -(f.f_d[i] - f.f_d[im]) / dx;
        d_m[i] = -(f.f_m[i] - f.f_m[im]) / dx - state.d[i] * e[i];
    }
    Ok((d_d, d_m))
}

fn rebuild(d: Vec<f64>, m: Vec<f64>, grid: Grid1D, time: f64, params: &RemParams) -> Result<RemState> {
    let n_cells = grid.n;
    let mut n = vec![0.0; n_cells];
    let mut u = vec![0.0; n_cells];
    for i in 0..n_cells {
        let (ni, ui) = recover_primitives(d[i], m[i], params)?;
        n[i] = ni;
        u[i] = ui;
    }
    Ok(RemState {
        d,
        m,
        n,
        u,
        grid,
        time,
    })
}

/// One SSP-RK3 step of the electrostatic system; CFL with relativistic wave
/// speeds, admissibility guard |u| < c/2.
pub fn rem_step_1d(
    state: &RemState,
    dt: f64,
    params: &RemParams,
    spectral: &Spectral1D,
) -> Result<RemState> {
    let c = params.c.0;
    let mut max_speed = 0.0f64;
    for i in 0..state.grid.n {
        let a = params.table.sound_speed(state.n[i])?;
        let u_hat = c * state.u[i] / (c * c + state.u[i] * state.u[i]).sqrt();
        max_speed = max_speed.max((u_hat.abs() + a) / (1.0 + u_hat.abs() * a / (c * c)));
    }
    let cfl = 0.4 * state.grid.dx() / max_speed;
    if dt > cfl {
        return Err(Error::Solver(format!(
            "CFL violation: dt = {dt:e} exceeds {cfl:e}"
        )));
    }
    let grid = state.grid;
    let combine = |a: &[f64], b: &[f64], wa: f64, wb: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
    };
    let k1 = rhs(state, params, spectral)?;
    let s1 = rebuild(
        combine(&state.d, &k1.0, 1.0, dt),
        combine(&state.m, &k1.1, 1.0, dt),
        grid,
        state.time + dt,
        params,
    )?;
    let k2 = rhs(&s1, params, spectral)?;
    let s2 = rebuild(
        combine(
            &combine(&state.d, &s1.d, 0.75, 0.25),
            &k2.0,
            1.0,
            0.25 * dt,
        ),
        combine(
            &combine(&state.m, &s1.m, 0.75, 0.25),
            &k2.1,
            1.0,
            0.25 * dt,
        ),
        grid,
        state.time + 0.5 * dt,
        params,
    )?;
    let k3 = rhs(&s2, params, spectral)?;
    let two_thirds = 2.0 / 3.0;
    rebuild(
        combine(
            &combine(&state.d, &s2.d, 1.0 / 3.0, two_thirds),
            &k3.0,
            1.0,
            two_thirds * dt,
        ),
        combine(
            &combine(&state.m, &s2.m, 1.0 / 3.0, two_thirds),
            &k3.1,
            1.0,
            two_thirds * dt,
        ),
        grid,
        state.time + dt,
        params,
    )
}
