//! Thin command-line front end; every subcommand dispatches straight into
//! the library. `RELKIT_THREADS` caps the worker pool.

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relkit::collision::{
    collision_frequency, collision_invariants, MomentumPair, MomentumQuadrature,
};
use relkit::config::{RawConfig, SolverConfig, CURL_DIV_KEYS};
use relkit::error::{Error, Result};
use relkit::fluid::curl_div::{curl_div_solve, manufactured_ep_fields};
use relkit::fluid::ep::{ep_step, plasma_dispersion, EpParams, EpState};
use relkit::fluid::rem::{rem_step_1d, IsentropeTable, RemParams, RemState};
use relkit::grid::{Grid1D, Grid3Periodic, Spectral1D};
use relkit::quadrature::SphereQuadrature;
use relkit::sweep::{run_sweep, sweep_csv};
use relkit::thermo::{truncation_radius, EntropyConstant, FluidState, LightSpeed};
use relkit::verify::{run_verify, Suite};
use relkit::Vec3;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "relkit",
    about = "Verification toolkit for relativistic kinetic closures and fluid limits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites and report pass/fail per named check.
    Verify {
        /// Suites to run (default: all of bessel, thermo, moments,
        /// collision, characteristics, field-kernels, fluid).
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<String>,
        /// Machine-readable `check,value,tol,pass` output file.
        #[arg(long, default_value = "verify_report.csv")]
        report: PathBuf,
    },
    /// Newtonian-limit rate sweep over a list of light speeds.
    SweepC {
        #[arg(long = "c-list", value_delimiter = ',', required = true)]
        c_list: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// March one solver and emit a CSV time series.
    Solve {
        /// `ep` or `rem`.
        system: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve the torus curl-div system and report its residuals.
    CurlDiv {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Emit sampled (p, q, g, s, v_φ, ν_c) rows.
    CollisionTable {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Plasma-oscillation dispersion measurement vs the analytic relation.
    Dispersion {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("RELKIT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn load_solver_config(path: &Option<PathBuf>) -> Result<SolverConfig> {
    match path {
        None => Ok(SolverConfig::defaults()),
        Some(p) => SolverConfig::from_raw(&RawConfig::load(p)?),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify { suites, report } => {
            let chosen: Vec<Suite> = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites
                    .iter()
                    .map(|name| {
                        Suite::from_name(name).ok_or_else(|| {
                            Error::Config(format!(
                                "unknown suite `{name}` (expected one of {})",
                                Suite::ALL.map(|s| s.name()).join(", ")
                            ))
                        })
                    })
                    .collect::<Result<_>>()?
            };
            let result = run_verify(&chosen);
            print!("{}", result.table());
            std::fs::write(&report, result.machine_readable())?;
            println!(
                "{} checks, {} failed; report at {}",
                result.checks.len(),
                result.checks.iter().filter(|c| !c.pass).count(),
                report.display()
            );
            Ok(if result.all_pass() { 0 } else { 1 })
        }
        Command::SweepC { c_list, out, config } => {
            let cfg = load_solver_config(&config)?;
            let result = run_sweep(&cfg, &c_list)?;
            std::fs::write(&out, sweep_csv(&result))?;
            for row in &result.rows {
                println!("c = {:>8}: sup error {}", row.c, row.sup_error);
            }
            if let Some(slope) = result.slope {
                println!("fitted slope {slope}");
            }
            Ok(0)
        }
        Command::Solve { system, config } => {
            let cfg = load_solver_config(&config)?;
            match system.as_str() {
                "ep" => solve_ep(&cfg),
                "rem" => solve_rem(&cfg),
                other => Err(Error::Config(format!("unknown system `{other}` (ep|rem)"))),
            }
        }
        Command::CurlDiv { config } => {
            let (n, nbar, amplitude, out) = match config {
                None => (32usize, 1.0, 0.1, "curl_div.csv".to_string()),
                Some(p) => {
                    let raw = RawConfig::load(&p)?;
                    raw.check_keys(CURL_DIV_KEYS)?;
                    (
                        raw.usize_or("grid.n", 32)?,
                        raw.f64_or("physics.nbar", 1.0)?,
                        raw.f64_or("init.amplitude", 0.1)?,
                        raw.string_or("output.path", "curl_div.csv"),
                    )
                }
            };
            let grid = Grid3Periodic::new(n)?;
            let (n0, u0, dt_e0) = manufactured_ep_fields(grid, nbar, amplitude)?;
            let sol = curl_div_solve(&n0, &u0, &dt_e0, grid, 1e-10, 1e-8)?;
            let csv = format!(
                "quantity,value\ndiv_b1_max,{}\ncurl_residual_max,{}\ndiv_f_max,{}\n",
                sol.div_b1_max, sol.curl_residual_max, sol.div_f_max
            );
            std::fs::write(&out, csv)?;
            println!(
                "div B1 = {:e}, curl residual = {:e} (written to {out})",
                sol.div_b1_max, sol.curl_residual_max
            );
            Ok(0)
        }
        Command::CollisionTable { c, samples, out, seed } => {
            let light = LightSpeed::new(c)?;
            let state = FluidState::rest(1.0, 1.0)?;
            let quad = MomentumQuadrature::new(
                64,
                truncation_radius(&state),
                SphereQuadrature::lebedev50(),
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut csv = String::from("px,py,pz,qx,qy,qz,g,s,v_phi,nu_c\n");
            for _ in 0..samples {
                let mut sample = || -> Vec3 {
                    Vec3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    ) * c
                };
                let p = sample();
                let q = sample();
                let pair = MomentumPair::new(p, q, light)?;
                let inv = collision_invariants(&pair, light)?;
                let nu = collision_frequency(&state, p, light, &quad)?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    p.x, p.y, p.z, q.x, q.y, q.z, inv.g, inv.s, inv.moller, nu
                ));
            }
            std::fs::write(&out, csv)?;
            println!("{samples} rows written to {}", out.display());
            Ok(0)
        }
        Command::Dispersion { config, out } => {
            let cfg = load_solver_config(&config)?;
            let params = EpParams::from_entropy(EntropyConstant(cfg.entropy), 1.0);
            let grid = Grid1D::new(cfg.grid_n, cfg.length)?;
            let mut csv = String::from("k,omega_measured,omega_predicted,rel_error\n");
            for mode in 1..=3usize {
                let (measured, predicted) =
                    plasma_dispersion(&params, grid, mode, 1e-4, 2.0e-3, 8.0)?;
                let k = 2.0 * std::f64::consts::PI * mode as f64 / cfg.length;
                let rel = (measured - predicted).abs() / predicted;
                println!("k = {k}: measured {measured}, predicted {predicted}");
                csv.push_str(&format!("{k},{measured},{predicted},{rel}\n"));
            }
            if let Some(path) = out {
                std::fs::write(&path, csv)?;
            }
            Ok(0)
        }
    }
}

fn write_series(path: &str, rows: &[(f64, f64, f64, f64, f64)]) -> Result<()> {
    let mut csv = String::from("t,min_density,max_density,max_speed,total_mass\n");
    for (t, lo, hi, v, m) in rows {
        csv.push_str(&format!("{t},{lo},{hi},{v},{m}\n"));
    }
    std::fs::write(path, csv)?;
    Ok(())
}

fn series_row(t: f64, density: &[f64], speed: &[f64], dx: f64) -> (f64, f64, f64, f64, f64) {
    let lo = density.iter().cloned().fold(f64::MAX, f64::min);
    let hi = density.iter().cloned().fold(f64::MIN, f64::max);
    let v = speed.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let mass = density.iter().sum::<f64>() * dx;
    (t, lo, hi, v, mass)
}

fn solve_ep(cfg: &SolverConfig) -> Result<i32> {
    let grid = Grid1D::new(cfg.grid_n, cfg.length)?;
    let spectral = Spectral1D::new(grid);
    let k = 2.0 * std::f64::consts::PI * cfg.mode as f64 / cfg.length;
    let xs = grid.centers();
    let rho: Vec<f64> = xs
        .iter()
        .map(|x| 1.0 + cfg.amplitude * (k * x).cos())
        .collect();
    let u: Vec<f64> = xs
        .iter()
        .map(|x| cfg.velocity_amplitude * (k * x).sin())
        .collect();
    let mut params = EpParams::from_entropy(EntropyConstant(cfg.entropy), 1.0);
    let mut state = EpState::new(rho, &u, grid)?;
    params.rho_bar = state.rho.iter().sum::<f64>() / grid.n as f64;
    let dt = if cfg.dt > 0.0 {
        cfg.dt
    } else {
        0.3 * grid.dx() / state.max_wave_speed(&params)
    };
    let mut rows = vec![series_row(0.0, &state.rho, &state.velocity(), grid.dx())];
    while state.time < cfg.t_max {
        state = ep_step(&state, dt, &params, &spectral)?;
        rows.push(series_row(state.time, &state.rho, &state.velocity(), grid.dx()));
    }
    write_series(&cfg.output, &rows)?;
    println!("{} steps written to {}", rows.len() - 1, cfg.output);
    Ok(0)
}

fn solve_rem(cfg: &SolverConfig) -> Result<i32> {
    let grid = Grid1D::new(cfg.grid_n, cfg.length)?;
    let spectral = Spectral1D::new(grid);
    let light = LightSpeed::new(cfg.c)?;
    let entropy = EntropyConstant(cfg.entropy);
    let span = 1.0 + cfg.amplitude.abs() + cfg.first_order_amplitude.abs();
    let table = IsentropeTable::build(1.0 / (2.0 * span), 2.0 * span, 1024, entropy, light)?;
    let mut params = RemParams {
        c: light,
        table,
        n_bar: 1.0,
    };
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
    let mut state = RemState::from_primitives(n, u, grid, &params)?;
    params.n_bar = state.d.iter().sum::<f64>() / grid.n as f64;
    let dt = if cfg.dt > 0.0 {
        cfg.dt
    } else {
        let a0 = params.table.sound_speed(1.0)?;
        0.3 * grid.dx() / (a0 + cfg.velocity_amplitude.abs())
    };
    let mut rows = vec![series_row(0.0, &state.n, &state.u, grid.dx())];
    while state.time < cfg.t_max {
        state = rem_step_1d(&state, dt, &params, &spectral)?;
        rows.push(series_row(state.time, &state.n, &state.u, grid.dx()));
    }
    write_series(&cfg.output, &rows)?;
    println!("{} steps written to {}", rows.len() - 1, cfg.output);
    Ok(0)
}
