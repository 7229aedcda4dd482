//! The Newtonian-limit rate experiment: march the 1D electrostatic
//! relativistic system and the Euler-Poisson system from matched data and
//! record the sup-norm gap as a function of the light speed.
//!
//! Initial data follow the expansion framework: the relativistic run starts
//! from `n = n₀ + n̂/c`, `u = u₀ + û/c` with fixed first-order profiles
//! (set `first_order_amplitude = 0` for strictly identical data — the 1D
//! electrostatic system is even in 1/c, so that variant superconverges at
//! rate c⁻² instead of the theorem's generic c⁻¹).

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::fluid::ep::{electric_field, ep_step, EpParams, EpState};
use crate::fluid::rem::{rem_step_1d, IsentropeTable, RemParams, RemState};
use crate::grid::{Grid1D, Spectral1D};
use crate::thermo::{EntropyConstant, LightSpeed};
use rayon::prelude::*;

/// One sweep row: light speed and the sup-norm gap over the run.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub c: f64,
    pub sup_error: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Log-log slope of the error against c (absent for single-c sweeps).
    pub slope: Option<f64>,
}

struct EpTrajectory {
    rho: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
    e: Vec<Vec<f64>>,
}

fn initial_profiles(cfg: &SolverConfig, grid: &Grid1D) -> (Vec<f64>, Vec<f64>) {
    let k = 2.0 * std::f64::consts::PI * cfg.mode as f64 / cfg.length;
    let xs = grid.centers();
    let n: Vec<f64> = xs
        .iter()
        .map(|x| 1.0 + cfg.amplitude * (k * x).cos())
        .collect();
    let u: Vec<f64> = xs
        .iter()
        .map(|x| cfg.velocity_amplitude * (k * x).sin())
        .collect();
    (n, u)
}

fn first_order_profiles(cfg: &SolverConfig, grid: &Grid1D) -> (Vec<f64>, Vec<f64>) {
    let k = 2.0 * std::f64::consts::PI * cfg.mode as f64 / cfg.length;
    let xs = grid.centers();
    let n_hat: Vec<f64> = xs
        .iter()
        .map(|x| cfg.first_order_amplitude * (2.0 * k * x).cos())
        .collect();
    let u_hat: Vec<f64> = xs
        .iter()
        .map(|x| cfg.first_order_amplitude * (2.0 * k * x).sin())
        .collect();
    (n_hat, u_hat)
}

/// Time step shared by every run of a sweep, so the discrete dynamics agree
/// in the 1/c → 0 limit and the measured gap is the physical one.
fn shared_dt(cfg: &SolverConfig, params: &EpParams, state: &EpState) -> f64 {
    if cfg.dt > 0.0 {
        return cfg.dt;
    }
    0.2 * state.grid.dx() / (state.max_wave_speed(params) * 1.5)
}

fn run_ep(cfg: &SolverConfig, dt: f64) -> Result<(EpTrajectory, EpParams)> {
    let grid = Grid1D::new(cfg.grid_n, cfg.length)?;
    let spectral = Spectral1D::new(grid);
    let (n, u) = initial_profiles(cfg, &grid);
    let mut params = EpParams::from_entropy(EntropyConstant(cfg.entropy), 1.0);
    let mut state = EpState::new(n, &u, grid)?;
    params.rho_bar = state.rho.iter().sum::<f64>() / grid.n as f64;
    let mut traj = EpTrajectory {
        rho: vec![state.rho.clone()],
        u: vec![state.velocity()],
        e: vec![electric_field(&state.rho, &params, &spectral)?],
    };
    let steps = (cfg.t_max / dt).ceil() as usize;
    for _ in 0..steps {
        state = ep_step(&state, dt, &params, &spectral)?;
        traj.rho.push(state.rho.clone());
        traj.u.push(state.velocity());
        traj.e.push(electric_field(&state.rho, &params, &spectral)?);
    }
    Ok((traj, params))
}

fn run_rem_against(
    cfg: &SolverConfig,
    c: f64,
    dt: f64,
    ep: &EpTrajectory,
) -> Result<f64> {
    let grid = Grid1D::new(cfg.grid_n, cfg.length)?;
    let spectral = Spectral1D::new(grid);
    let light = LightSpeed::new(c)?;
    let entropy = EntropyConstant(cfg.entropy);
    let span = 1.0 + cfg.amplitude.abs() + cfg.first_order_amplitude.abs() / c;
    let table = IsentropeTable::build(1.0 / (2.0 * span), 2.0 * span, 1024, entropy, light)?;
    let mut params = RemParams {
        c: light,
        table,
        n_bar: 1.0,
    };
    let (n0, u0) = initial_profiles(cfg, &grid);
    let (n_hat, u_hat) = first_order_profiles(cfg, &grid);
    let n: Vec<f64> = n0.iter().zip(&n_hat).map(|(a, b)| a + b / c).collect();
    let u: Vec<f64> = u0.iter().zip(&u_hat).map(|(a, b)| a + b / c).collect();
    let mut state = RemState::from_primitives(n, u, grid, &params)?;
    params.n_bar = state.d.iter().sum::<f64>() / grid.n as f64;
    let mut sup: f64 = 0.0;
    let mut compare = |state: &RemState, step: usize| -> Result<()> {
        let e = state.electric_field(&params, &spectral)?;
        for i in 0..grid.n {
            sup = sup.max((state.n[i] - ep.rho[step][i]).abs());
            sup = sup.max((state.u[i] - ep.u[step][i]).abs());
            sup = sup.max((e[i] - ep.e[step][i]).abs());
        }
        Ok(())
    };
    compare(&state, 0)?;
    for step in 1..ep.rho.len() {
        state = rem_step_1d(&state, dt, &params, &spectral)?;
        compare(&state, step)?;
    }
    Ok(sup)
}

fn fit_slope(rows: &[SweepRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = rows.iter().map(|r| r.c.ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.sup_error.ln()).collect();
    let n = lx.len() as f64;
    let sx: f64 = lx.iter().sum();
    let sy: f64 = ly.iter().sum();
    let sxx: f64 = lx.iter().map(|v| v * v).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Runs a full rate sweep; relativistic runs execute concurrently, rows are
/// collected in the order of `c_list` (deterministic output).
pub fn run_sweep(cfg: &SolverConfig, c_list: &[f64]) -> Result<SweepResult> {
    if c_list.is_empty() {
        return Err(Error::Config("sweep needs at least one light speed".into()));
    }
    let grid = Grid1D::new(cfg.grid_n, cfg.length)?;
    let (n, u) = initial_profiles(cfg, &grid);
    let mut params = EpParams::from_entropy(EntropyConstant(cfg.entropy), 1.0);
    let probe = EpState::new(n, &u, grid)?;
    params.rho_bar = probe.rho.iter().sum::<f64>() / grid.n as f64;
    let dt = shared_dt(cfg, &params, &probe);
    let (ep, _) = run_ep(cfg, dt)?;
    let rows: Vec<SweepRow> = c_list
        .par_iter()
        .map(|&c| {
            run_rem_against(cfg, c, dt, &ep).map(|sup_error| SweepRow { c, sup_error })
        })
        .collect::<Result<_>>()?;
    let slope = fit_slope(&rows);
    Ok(SweepResult { rows, slope })
}

/// CSV with a header and one row per c; the ε column is reserved for
/// collisional sweeps and left empty. The slope column repeats the global
/// fit (empty for single-c sweeps).
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("c,epsilon,sup_error,slope\n");
    for row in &result.rows {
        match result.slope {
            Some(s) => out.push_str(&format!("{},,{},{}\n", row.c, row.sup_error, s)),
            None => out.push_str(&format!("{},,{},\n", row.c, row.sup_error)),
        }
    }
    out
}
