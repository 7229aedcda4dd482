//! Named verification checks grouped into suites, the machine-readable
//! report, and the orchestration used by both the CLI and the acceptance
//! tests. Every check pins its tolerance in code; a check is a measured
//! value, a tolerance, and the comparison — nothing is recalibrated at run
//! time.

use crate::bessel;
use crate::characteristics::{jacobian_bounds_check, FieldSampler};
use crate::collision::{self, MomentumPair, MomentumQuadrature};
use crate::config::SolverConfig;
use crate::field_kernels;
use crate::fluid::curl_div::{curl_div_solve, forcing_gradient_part, manufactured_ep_fields};
use crate::fluid::ep::{plasma_dispersion, EpParams};
use crate::fluid::matrices::{assemble_macro_matrices, positive_definiteness_check};
use crate::fluid::residuals::{manufactured_tier, remainder_residuals};
use crate::grid::{inner_product_vec, Grid1D, Grid3Periodic, Spectral3};
use crate::moments::{
    boosted_third_moment, contracted_third_moment, first_second_moments, LorentzBoost,
    MomentQuadrature,
};
use crate::quadrature::SphereQuadrature;
use crate::sweep::run_sweep;
use crate::thermo::{
    energy_density_pair, enthalpy_derivative, log_isentrope_density,
    newtonian_temperature_order0, solve_temperature, EntropyConstant, FluidState,
    JuttnerEvaluator, LightSpeed,
};
use crate::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::time::Instant;

/// One named check: a measured value compared against its pinned tolerance.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seconds: f64,
}

impl Check {
    /// `value` must not exceed `tolerance`.
    fn at_most(name: &str, value: f64, tolerance: f64, started: Instant) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
            seconds: started.elapsed().as_secs_f64(),
        }
    }

    /// `value` must lie inside `[lo, hi]`; the tolerance column records the
    /// half-width.
    fn within(name: &str, value: f64, lo: f64, hi: f64, started: Instant) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance: 0.5 * (hi - lo),
            pass: value.is_finite() && lo <= value && value <= hi,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Bessel,
    Thermo,
    Moments,
    Collision,
    Characteristics,
    FieldKernels,
    Fluid,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Bessel,
        Suite::Thermo,
        Suite::Moments,
        Suite::Collision,
        Suite::Characteristics,
        Suite::FieldKernels,
        Suite::Fluid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Bessel => "bessel",
            Suite::Thermo => "thermo",
            Suite::Moments => "moments",
            Suite::Collision => "collision",
            Suite::Characteristics => "characteristics",
            Suite::FieldKernels => "field-kernels",
            Suite::Fluid => "fluid",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Line-oriented `check,value,tol,pass` format.
    pub fn machine_readable(&self) -> String {
        let mut out = String::from("check,value,tol,pass\n");
        for c in &self.checks {
            let _ = writeln!(out, "{},{},{},{}", c.name, c.value, c.tolerance, c.pass);
        }
        out
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<42} {:>14} {:>12} {:>6} {:>8}", "check", "value", "tol", "pass", "sec");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<42} {:>14.6e} {:>12.2e} {:>6} {:>8.2}",
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" },
                c.seconds
            );
        }
        out
    }
}

/// Runs the requested suites; suites execute concurrently, checks within a
/// suite sequentially, and report ordering follows the request order.
pub fn run_verify(suites: &[Suite]) -> VerifyReport {
    let groups: Vec<Vec<Check>> = suites.par_iter().map(|s| run_suite(*s)).collect();
    VerifyReport {
        checks: groups.into_iter().flatten().collect(),
    }
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Bessel => bessel_suite(),
        Suite::Thermo => thermo_suite(),
        Suite::Moments => moments_suite(),
        Suite::Collision => collision_suite(),
        Suite::Characteristics => characteristics_suite(),
        Suite::FieldKernels => field_kernel_suite(),
        Suite::Fluid => fluid_suite(),
    }
}

fn log_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

pub fn bessel_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let zs = log_samples(0.5, 500.0, 60);
    let t = Instant::now();
    let report = bessel::bessel_identity_suite(&zs).expect("bessel domain");
    checks.push(Check::at_most(
        "bessel-recurrence",
        report.max_recurrence_rel,
        1e-12,
        t,
    ));
    let t = Instant::now();
    checks.push(Check::at_most(
        "bessel-derivative-identity",
        report.max_derivative_abs,
        1e-7,
        t,
    ));
    let t = Instant::now();
    checks.push(Check::at_most(
        "bessel-monotonicity-violations",
        report.monotone_violations as f64,
        0.0,
        t,
    ));
    // asymptotic remainder inside the γ bound
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for j in 0..=4u32 {
        for n in [1usize, 2, 3, 5] {
            for &z in &zs {
                if z < 2.0 * j as f64 {
                    continue;
                }
                let exact = bessel::bessel_k(j, z).expect("domain");
                let asy = bessel::bessel_k_asymptotic(j, z, n).expect("domain");
                let bound = asy.estimated_abs_error + exact.estimated_abs_error;
                worst = worst.max((exact.value - asy.value).abs() / bound);
            }
        }
    }
    checks.push(Check::at_most("bessel-asymptotic-remainder", worst, 1.0, t));
    checks
}

pub fn thermo_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    // energy-density route agreement across states
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [0.5, 1.0, 2.0] {
        for temp in [0.5, 1.0, 2.0] {
            for c in [1.0, 10.0, 100.0, 1000.0] {
                let s = FluidState::rest(n, temp).expect("state");
                let (a, b) = energy_density_pair(&s, LightSpeed(c)).expect("bessel");
                worst = worst.max((a - b).abs() / b.abs());
            }
        }
    }
    checks.push(Check::at_most("thermo-energy-density-routes", worst, 1e-12, t));
    // isentropic identity P'(n) = n h'(n) by finite differences
    let t = Instant::now();
    let c = LightSpeed(20.0);
    let entropy = EntropyConstant(0.0);
    let dn = 1e-5;
    let p_of = |nn: f64| nn * solve_temperature(nn, entropy, c).expect("solve");
    let dp = (p_of(1.0 + dn) - p_of(1.0 - dn)) / (2.0 * dn);
    let temp = solve_temperature(1.0, entropy, c).expect("solve");
    let state = FluidState::rest(1.0, temp).expect("state");
    let nh = enthalpy_derivative(&state, c).expect("bessel");
    checks.push(Check::at_most(
        "thermo-isentropic-identity-fd",
        (dp - nh).abs() / nh.abs(),
        1e-5,
        t,
    ));
    // temperature round trip
    let t = Instant::now();
    let n_of = |temp: f64| log_isentrope_density(temp, entropy, c).expect("domain").exp();
    let n_ref = n_of(1.0);
    let t_back = solve_temperature(n_ref, entropy, c).expect("solve");
    checks.push(Check::at_most(
        "thermo-temperature-round-trip",
        (n_of(t_back) - n_ref).abs() / n_ref,
        1e-8,
        t,
    ));
    // Newtonian temperature expansion rate (slope ≈ -2 within ±0.2)
    let t = Instant::now();
    let t0 = newtonian_temperature_order0(1.0, entropy);
    let cs = [10.0, 20.0, 40.0, 80.0];
    let resid: Vec<f64> = cs
        .iter()
        .map(|&cv| (solve_temperature(1.0, entropy, LightSpeed(cv)).expect("solve") - t0).abs())
        .collect();
    let slope = slope_of(&cs, &resid);
    checks.push(Check::within("thermo-newtonian-t-slope", slope, -2.2, -1.8, t));
    checks
}

pub fn moments_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let c = LightSpeed(10.0);
    let quad = MomentQuadrature::default();
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let states: Vec<FluidState> = (0..4)
        .map(|_| {
            let u = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalize()
                * rng.gen_range(0.0..c.0 / 4.0);
            FluidState::new(rng.gen_range(0.5..2.0), u, rng.gen_range(0.5..2.0)).expect("state")
        })
        .collect();
    for s in &states {
        let (i_cf, t2_cf) = first_second_moments(s, c).expect("bessel");
        let t3_cf = boosted_third_moment(s, c).expect("bessel");
        let (i_q, t2_q, t3_q) = quad.moments(s, c).expect("bessel");
        let scale1 = i_cf.0[0].abs();
        for a in 0..4 {
            worst = worst.max((i_cf.0[a] - i_q.0[a]).abs() / scale1);
        }
        let scale2 = t2_cf[(0, 0)].abs();
        for a in 0..4 {
            for b in 0..4 {
                worst = worst.max((t2_cf[(a, b)] - t2_q[(a, b)]).abs() / scale2);
            }
        }
        worst = worst.max(t3_cf.max_abs_diff(&t3_q) / t3_cf.max_abs());
    }
    checks.push(Check::at_most("moments-closed-form-vs-quadrature", worst, 1e-5, t));
    // Λ̄ metric orthogonality and contraction equivalence
    let t = Instant::now();
    let mut defect: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    for s in &states {
        defect = defect.max(LorentzBoost::new(s.u, c).metric_defect());
        let direct = boosted_third_moment(s, c).expect("bessel");
        let contracted = contracted_third_moment(s, c).expect("bessel");
        contraction = contraction.max(direct.max_abs_diff(&contracted) / direct.max_abs());
    }
    checks.push(Check::at_most("moments-boost-metric-defect", defect, 1e-12, t));
    let t = Instant::now();
    checks.push(Check::at_most(
        "moments-contraction-equivalence",
        contraction,
        1e-10,
        t,
    ));
    checks
}

fn sample_momentum(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
    let dir = loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm_squared() > 1e-6 && v.norm_squared() <= 1.0 {
            break v.normalize();
        }
    };
    dir * (scale * rng.gen_range(0.01..2.5f64))
}

pub fn collision_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    // conservation over 10⁴ trials per frame per c
    let t = Instant::now();
    let mut momentum_defect: f64 = 0.0;
    let mut energy_defect: f64 = 0.0;
    let mut s_identity: f64 = 0.0;
    for cval in [1.0, 10.0, 100.0] {
        let c = LightSpeed(cval);
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + cval as u64);
        for _ in 0..10_000 {
            let p = sample_momentum(&mut rng, cval);
            let q = sample_momentum(&mut rng, cval);
            let pair = MomentumPair::new(p, q, c).expect("finite");
            let omega = sample_momentum(&mut rng, 1.0).normalize();
            let inv = collision::collision_invariants(&pair, c).expect("finite");
            s_identity = s_identity
                .max((inv.s - (inv.g * inv.g + 4.0 * cval * cval)).abs() / inv.s);
            let cm = collision::post_cm(&pair, omega, c).expect("unit omega");
            momentum_defect = momentum_defect
                .max(collision::conservation_defect_ulps(p + q, cm.p_out, cm.q_out));
            let e_in = pair.p0 + pair.q0;
            energy_defect = energy_defect.max((cm.p0_out + cm.q0_out - e_in).abs() / e_in);
            let gs = collision::post_gs(&pair, omega, c).expect("unit omega");
            momentum_defect = momentum_defect
                .max(collision::conservation_defect_ulps(p + q, gs.p_out, gs.q_out));
            energy_defect = energy_defect.max((gs.p0_out + gs.q0_out - e_in).abs() / e_in);
        }
    }
    checks.push(Check::at_most(
        "collision-momentum-conservation-ulps",
        momentum_defect,
        1.0,
        t,
    ));
    let t = Instant::now();
    checks.push(Check::at_most(
        "collision-energy-conservation",
        energy_defect,
        1e-10,
        t,
    ));
    let t = Instant::now();
    checks.push(Check::at_most("collision-s-identity", s_identity, 1e-12, t));
    // Jacobian identity on 100 configurations
    let t = Instant::now();
    let c = LightSpeed(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut jac_worst: f64 = 0.0;
    for _ in 0..100 {
        let pair = MomentumPair::new(
            sample_momentum(&mut rng, 2.0),
            sample_momentum(&mut rng, 2.0),
            c,
        )
        .expect("finite");
        let omega = sample_momentum(&mut rng, 1.0).normalize();
        let (fd, closed) = collision::jacobian_gs_check(&pair, omega, c).expect("fd");
        jac_worst = jac_worst.max((fd - closed).abs() / closed.abs());
    }
    checks.push(Check::at_most("collision-gs-jacobian", jac_worst, 1e-5, t));
    // frame equivalence on 20 random (pair, G)
    let t = Instant::now();
    let c5 = LightSpeed(5.0);
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let mut frame_worst: f64 = 0.0;
    for trial in 0..20 {
        let pair = MomentumPair::new(
            sample_momentum(&mut rng, 1.5),
            sample_momentum(&mut rng, 1.5),
            c5,
        )
        .expect("finite");
        let (w0, w1, w2) = (
            rng.gen_range(0.2..1.0),
            rng.gen_range(0.2..1.0),
            rng.gen_range(0.2..1.0),
        );
        let g = move |p: Vec3, q: Vec3, po: Vec3, qo: Vec3| {
            (-(w0 * po.norm_squared() + w1 * qo.norm_squared())).exp()
                * (1.0 + w2 * (p + q).x * 0.1)
        };
        let (lhs, rhs) = collision::frame_equivalence(g, &pair, c5, 48, 64).expect("quad");
        frame_worst = frame_worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        let _ = trial;
    }
    checks.push(Check::at_most("collision-frame-equivalence", frame_worst, 1e-8, t));
    // Maxwellian annihilation pointwise
    let t = Instant::now();
    let c2 = LightSpeed(2.0);
    let state = FluidState::new(1.0, Vec3::new(0.2, 0.0, 0.0), 1.0).expect("state");
    let ev = JuttnerEvaluator::new(&state, c2).expect("bessel");
    let radius = crate::thermo::truncation_radius(&state);
    let quad = MomentumQuadrature::new(48, radius, SphereQuadrature::lebedev50());
    let nu_quad = MomentumQuadrature::new(64, radius, SphereQuadrature::lebedev50());
    let omega_quad = SphereQuadrature::lebedev50();
    let mut ann_worst: f64 = 0.0;
    for p in [Vec3::zeros(), Vec3::new(1.0, 0.5, 0.0), Vec3::new(-2.0, 0.0, 1.0)] {
        let q_val = collision::q_collision(|x| ev.eval(x), |x| ev.eval(x), p, c2, &quad, &omega_quad)
            .expect("quad");
        let nu = collision::collision_frequency(&state, p, c2, &nu_quad).expect("quad");
        ann_worst = ann_worst.max(q_val.abs() / (nu * ev.eval(p)));
    }
    checks.push(Check::at_most("collision-maxwellian-annihilation", ann_worst, 1e-6, t));
    // collision-invariant moments of Q on a perturbed Maxwellian
    let t = Instant::now();
    let moments = collision_invariant_moments(&state, c2);
    checks.push(Check::at_most("collision-invariant-moments", moments, 1e-5, t));
    // collision frequency regimes at c = 100
    let t = Instant::now();
    let (low, high) = frequency_regime_spreads();
    checks.push(Check::at_most("collision-frequency-regime-low", low, 100.0, t));
    let t = Instant::now();
    checks.push(Check::at_most("collision-frequency-regime-high", high, 100.0, t));
    checks
}

/// max over ψ ∈ {1, p, p⁰} of |∫ Q(F,F) ψ dp| for a perturbed Maxwellian,
/// by direct nested quadrature (the cancellation is the point: nothing in
/// the chain knows the moments should vanish).
pub fn collision_invariant_moments(state: &FluidState, c: LightSpeed) -> f64 {
    let ev = JuttnerEvaluator::new(state, c).expect("bessel");
    let perturbed = move |p: Vec3| ev.eval(p) * (1.0 + 0.1 * (-p.norm_squared()).exp());
    let radius = crate::thermo::truncation_radius(state);
    let p_quad = MomentumQuadrature::new(28, radius, SphereQuadrature::lebedev50());
    let q_quad = MomentumQuadrature::new(28, radius, SphereQuadrature::lebedev50());
    let omega_quad = SphereQuadrature::product(12, 24);
    // parallelize over the outer radial shells
    let shell_sums: Vec<[f64; 5]> = p_quad
        .radial
        .par_iter()
        .map(|&(rad, wr)| {
            let mut acc = [0.0; 5];
            for (node, wq) in p_quad.sphere.nodes.iter().zip(&p_quad.sphere.weights) {
                let p = node * rad;
                let q_val = collision::q_collision(
                    perturbed, perturbed, p, c, &q_quad, &omega_quad,
                )
                .expect("quad");
                let w = wr * rad * rad * wq * q_val;
                let p0 = (c.0 * c.0 + p.norm_squared()).sqrt();
                acc[0] += w;
                acc[1] += w * p.x;
                acc[2] += w * p.y;
                acc[3] += w * p.z;
                acc[4] += w * p0;
            }
            acc
        })
        .collect();
    let mut total = [0.0; 5];
    for s in shell_sums {
        for i in 0..5 {
            total[i] += s[i];
        }
    }
    total.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Sampled sup/inf of ν_c(p)/(1+|p|) on |p| ≤ c and ν_c(p)/c on |p| ≥ c at
/// c = 100 for the state (1, 0, 1).
pub fn frequency_regime_spreads() -> (f64, f64) {
    let c = LightSpeed(100.0);
    let state = FluidState::rest(1.0, 1.0).expect("state");
    let quad = MomentumQuadrature::new(
        96,
        crate::thermo::truncation_radius(&state),
        SphereQuadrature::lebedev50(),
    );
    let dir = Vec3::new(0.6, -0.64, 0.48).normalize();
    let spread = |ps: &[f64], scale: &dyn Fn(f64) -> f64| -> f64 {
        let ratios: Vec<f64> = ps
            .iter()
            .map(|&pn| {
                let nu =
                    collision::collision_frequency(&state, dir * pn, c, &quad).expect("quad");
                nu / scale(pn)
            })
            .collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    };
    let low = spread(&[0.0, 1.0, 5.0, 20.0, 50.0, 100.0], &|pn| 1.0 + pn);
    let high = spread(&[100.0, 200.0, 400.0, 1000.0], &|_| c.0);
    (low, high)
}

pub fn characteristics_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let c = LightSpeed(10.0);
    // zero-field exactness
    let t = Instant::now();
    let fields = FieldSampler::vacuum();
    let p = Vec3::new(1.0, 2.0, -0.5);
    let x = Vec3::new(0.3, 0.0, 1.0);
    let init = crate::characteristics::PhaseState { x, p, t: 1.0 };
    let traj =
        crate::characteristics::integrate_characteristics(&init, &fields, 0.0, c, 512).expect("ode");
    let p0 = (c.0 * c.0 + p.norm_squared()).sqrt();
    let mut worst: f64 = 0.0;
    for s in &traj {
        worst = worst.max((s.p - p).norm() / p.norm());
        let expect = x + p * (c.0 / p0) * (s.t - 1.0);
        worst = worst.max((s.x - expect).norm() / (1.0 + expect.norm()));
    }
    checks.push(Check::at_most("characteristics-zero-field", worst, 1e-12, t));
    // variational vs finite differences
    let t = Instant::now();
    let fields = FieldSampler::manufactured(0.3);
    let base = crate::characteristics::PhaseState {
        x: Vec3::new(0.4, -0.2, 0.9),
        p: Vec3::new(1.5, 0.7, -0.3),
        t: 0.6,
    };
    let steps = 1024;
    let traj = crate::characteristics::integrate_variational(&base, &fields, 0.1, c, steps, true)
        .expect("ode");
    let last = *traj.last().unwrap();
    let h = 1e-6;
    let mut fd_worst: f64 = 0.0;
    for i in 0..3 {
        let mut dp = Vec3::zeros();
        dp[i] = h;
        let plus = crate::characteristics::integrate_characteristics(
            &crate::characteristics::PhaseState { p: base.p + dp, ..base },
            &fields,
            0.1,
            c,
            steps,
        )
        .expect("ode");
        let minus = crate::characteristics::integrate_characteristics(
            &crate::characteristics::PhaseState { p: base.p - dp, ..base },
            &fields,
            0.1,
            c,
            steps,
        )
        .expect("ode");
        let fd_x = (plus.last().unwrap().x - minus.last().unwrap().x) / (2.0 * h);
        let fd_p = (plus.last().unwrap().p - minus.last().unwrap().p) / (2.0 * h);
        for j in 0..3 {
            fd_worst = fd_worst.max((last.dxdp[(j, i)] - fd_x[j]).abs());
            fd_worst = fd_worst.max((last.dpdp[(j, i)] - fd_p[j]).abs());
        }
    }
    checks.push(Check::at_most("characteristics-variational-fd", fd_worst, 1e-6, t));
    // two-sided Jacobian bound on the admissible horizon
    let t = Instant::now();
    let fields = FieldSampler::manufactured(0.5);
    let t_bar = 0.05f64;
    let momenta: Vec<Vec3> = (0..12)
        .map(|k| {
            let a = k as f64 / 12.0 * std::f64::consts::TAU;
            Vec3::new(4.0 * a.cos(), 4.0 * a.sin(), 2.0 * (2.0 * a).sin())
        })
        .collect();
    let sup = 2.0 * 0.5 * 3.0f64.sqrt();
    let report = jacobian_bounds_check(&fields, c, &momenta, t_bar, sup).expect("ode");
    checks.push(Check::at_most(
        "characteristics-jacobian-bound-constant",
        report.c_measured,
        4.0,
        t,
    ));
    let t = Instant::now();
    checks.push(Check::at_most(
        "characteristics-correction-proxy",
        report.correction_norm,
        0.25,
        t,
    ));
    let t = Instant::now();
    checks.push(Check::within(
        "characteristics-energy-lower-bound",
        report.energy_ratio_min,
        0.5,
        f64::INFINITY,
        t,
    ));
    checks
}

/// Optional sign flip injected into a_A for the mutation test of the
/// harness (the named check must fail when this is set).
pub fn field_kernel_suite_with(flip_a_sign: bool) -> Vec<Check> {
    let mut checks = Vec::new();
    let quad = SphereQuadrature::product(24, 48);
    // null identities on 30 random (p, c, i, j)
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut null_a: f64 = 0.0;
    let mut null_b: f64 = 0.0;
    for _ in 0..30 {
        let c = LightSpeed(rng.gen_range(0.5..4.0));
        let p = sample_momentum(&mut rng, 3.0 * c.0);
        let i = rng.gen_range(0..3usize);
        let j = rng.gen_range(0..3usize);
        let (ia, ib) = field_kernels::angular_null_check(p, c, &quad, i, j).expect("quad");
        let ia = if flip_a_sign {
            // mutated kernel: a_A with the δ_ij term's sign flipped
            let wrong = quad.integrate(|omega| {
                let k = field_kernels::eval_kernels(omega, p, c, i, j).unwrap();
                let p0 = (c.0 * c.0 + p.norm_squared()).sqrt();
                let denom = 1.0 + p.dot(&omega) / p0;
                let gamma2 = 1.0 + p.norm_squared() / (c.0 * c.0);
                k.a_e + 2.0 * ((i == j) as i32 as f64) * denom * denom / (gamma2 * denom.powi(4))
            });
            wrong
        } else {
            ia
        };
        null_a = null_a.max(ia.abs());
        null_b = null_b.max(ib.abs());
    }
    checks.push(Check::at_most("angular-null-aA", null_a, 1e-8, t));
    let t = Instant::now();
    checks.push(Check::at_most("angular-null-aB", null_b, 1e-8, t));
    // reference integral I₂ = 4π, c-independent
    let t = Instant::now();
    let four_pi = 4.0 * std::f64::consts::PI;
    let mut i2_worst: f64 = 0.0;
    let mut i3_worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(607);
    for _ in 0..10 {
        let c = LightSpeed(rng.gen_range(0.5..4.0));
        let p = sample_momentum(&mut rng, 2.0 * c.0);
        let (i2, i3) = field_kernels::reference_integrals(p, c, &quad);
        i2_worst = i2_worst.max((i2 - four_pi).abs() / four_pi);
        i3_worst = i3_worst.max((i3 - p * four_pi).norm() / (four_pi * (1.0 + p.norm())));
    }
    checks.push(Check::at_most("field-reference-integral-i2", i2_worst, 1e-10, t));
    let t = Instant::now();
    checks.push(Check::at_most("field-reference-integral-i3", i3_worst, 1e-9, t));
    // growth exponent ≤ 8
    let t = Instant::now();
    let slope = field_kernels::kernel_growth_exponent(LightSpeed(1.0), &quad);
    checks.push(Check::within("field-kernel-growth-exponent", slope, 0.0, 8.2, t));
    checks
}

pub fn field_kernel_suite() -> Vec<Check> {
    field_kernel_suite_with(false)
}

pub fn fluid_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    // Newtonian limit rate
    let t = Instant::now();
    let mut cfg = SolverConfig::defaults();
    cfg.grid_n = 512;
    cfg.t_max = 0.5;
    let sweep = run_sweep(&cfg, &[10.0, 20.0, 40.0, 80.0]).expect("sweep");
    checks.push(Check::within(
        "newtonian-rate-slope",
        sweep.slope.unwrap_or(f64::NAN),
        -1.2,
        -0.8,
        t,
    ));
    // curl-div identities at N = 32
    let t = Instant::now();
    let grid = Grid3Periodic::new(32).expect("grid");
    let (n0, u0, dt_e0) = manufactured_ep_fields(grid, 1.0, 0.1).expect("fields");
    let sol = curl_div_solve(&n0, &u0, &dt_e0, grid, 1e-10, 1e-8).expect("solve");
    checks.push(Check::at_most("curl-div-divergence", sol.div_b1_max, 1e-10, t));
    let t = Instant::now();
    checks.push(Check::at_most(
        "curl-div-curl-residual",
        sol.curl_residual_max,
        1e-8,
        t,
    ));
    // gradient-part annihilation against divergence-free tests
    let t = Instant::now();
    let sp = Spectral3::new(grid);
    let grad_phi = forcing_gradient_part(&n0, &u0, grid, 1.0).expect("fields");
    let mut pairing_worst: f64 = 0.0;
    for seed in 0..5u32 {
        let s = seed as f64;
        let a = grid.vector_field(|x, y, z| {
            [
                ((1.0 + s) * y).sin() * z.cos(),
                (x + s).cos() * z.sin(),
                (x + (1.0 + s) * y).sin(),
            ]
        });
        let w = sp.curl(&a);
        let pairing = inner_product_vec(&grad_phi, &w, grid.n);
        let scale = (inner_product_vec(&grad_phi, &grad_phi, grid.n)
            * inner_product_vec(&w, &w, grid.n))
        .sqrt()
        .max(1.0);
        pairing_worst = pairing_worst.max(pairing.abs() / scale);
    }
    checks.push(Check::at_most(
        "curl-div-gradient-annihilation",
        pairing_worst,
        1e-10,
        t,
    ));
    // remainder residual identities and c-slope
    let t = Instant::now();
    let tier_grid = Grid3Periodic::new(24).expect("grid");
    let tier = manufactured_tier(tier_grid, 1.0).expect("fields");
    let res = remainder_residuals(&tier, tier_grid, LightSpeed(20.0)).expect("residuals");
    checks.push(Check::at_most(
        "remainder-gauss-identity",
        res.gauss_identity_residual,
        1e-8,
        t,
    ));
    let t = Instant::now();
    checks.push(Check::at_most("remainder-div-rb", res.div_rb_max, 1e-8, t));
    let t = Instant::now();
    let cs = [10.0, 20.0, 40.0, 80.0];
    let norms: Vec<f64> = cs
        .iter()
        .map(|&cv| {
            remainder_residuals(&tier, tier_grid, LightSpeed(cv))
                .expect("residuals")
                .sup_norm
        })
        .collect();
    let slope = slope_of(&cs, &norms);
    checks.push(Check::within("remainder-norm-slope", slope, -1.1, -0.9, t));
    // positive definiteness of A₀ on 100 admissible states at c = 50
    let t = Instant::now();
    let c50 = LightSpeed(50.0);
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut failures = 0usize;
    for _ in 0..100 {
        let u = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
        .normalize()
            * rng.gen_range(0.0..c50.0 / 4.0);
        let s =
            FluidState::new(rng.gen_range(0.5..2.0), u, rng.gen_range(0.5..2.0)).expect("state");
        let set = assemble_macro_matrices(&s, Vec3::zeros(), Vec3::zeros(), c50).expect("matrix");
        let (ok, minors) = positive_definiteness_check(&set.a0).expect("symmetric");
        if !ok || minors.iter().any(|m| *m <= 0.0) {
            failures += 1;
        }
    }
    checks.push(Check::at_most(
        "symmetrizer-positive-definite-failures",
        failures as f64,
        0.0,
        t,
    ));
    // plasma dispersion at N = 512
    let t = Instant::now();
    let params = EpParams::from_entropy(EntropyConstant(0.0), 1.0);
    let grid1 = Grid1D::new(512, 2.0 * std::f64::consts::PI).expect("grid");
    let (measured, predicted) =
        plasma_dispersion(&params, grid1, 1, 1e-4, 2.0e-3, 8.0).expect("dispersion");
    checks.push(Check::at_most(
        "ep-dispersion-relative-error",
        (measured - predicted).abs() / predicted,
        0.02,
        t,
    ));
    checks
}

fn slope_of(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let sx: f64 = lx.iter().sum();
    let sy: f64 = ly.iter().sum();
    let sxx: f64 = lx.iter().map(|v| v * v).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }

    #[test]
    fn report_serialization() {
        let report = VerifyReport {
            checks: vec![Check {
                name: "demo".into(),
                value: 1e-13,
                tolerance: 1e-12,
                pass: true,
                seconds: 0.1,
            }],
        };
        let text = report.machine_readable();
        assert!(text.starts_with("check,value,tol,pass\n"));
        assert!(text.contains("demo,"));
        assert!(report.all_pass());
    }

    #[test]
    fn mutation_trips_the_named_check() {
        let checks = field_kernel_suite_with(true);
        let null_a = checks.iter().find(|c| c.name == "angular-null-aA").unwrap();
        assert!(!null_a.pass, "sign flip must fail the named check");
        let null_b = checks.iter().find(|c| c.name == "angular-null-aB").unwrap();
        assert!(null_b.pass);
    }
}
