//! Curved relativistic characteristics under prescribed electromagnetic
//! fields, the variational equations for the momentum derivatives of the
//! flow, and the two-sided Jacobian-determinant bounds they imply.
//!
//! The characteristic system through `(t, x, p)` is
//! `dX/dτ = c P/P⁰`, `dP/dτ = -E(τ,X) - (P/P⁰) × B(τ,X)`,
//! integrated by a fixed-step classical fourth-order scheme (deterministic
//! by construction; smooth fields need no adaptivity).

use crate::error::{Error, Result};
use crate::thermo::LightSpeed;
use crate::Vec3;
use nalgebra::Matrix3;

/// Position/momentum state on a characteristic.
#[derive(Debug, Clone, Copy)]
pub struct PhaseState {
    pub x: Vec3,
    pub p: Vec3,
    pub t: f64,
}

/// Prescribed electromagnetic fields with spatial gradients and an
/// advertised Lipschitz bound. Gradients feed the variational system;
/// samplers built from closed-form fields supply them analytically.
pub struct FieldSampler {
    pub e_field: Box<dyn Fn(f64, Vec3) -> Vec3 + Sync>,
    pub b_field: Box<dyn Fn(f64, Vec3) -> Vec3 + Sync>,
    /// Row j is ∇ₓ E_j.
    pub grad_e: Box<dyn Fn(f64, Vec3) -> Matrix3<f64> + Sync>,
    pub grad_b: Box<dyn Fn(f64, Vec3) -> Matrix3<f64> + Sync>,
    pub lipschitz: f64,
}

impl FieldSampler {
    pub fn vacuum() -> Self {
        FieldSampler {
            e_field: Box::new(|_, _| Vec3::zeros()),
            b_field: Box::new(|_, _| Vec3::zeros()),
            grad_e: Box::new(|_, _| Matrix3::zeros()),
            grad_b: Box::new(|_, _| Matrix3::zeros()),
            lipschitz: 0.0,
        }
    }

    pub fn uniform_magnetic(b0: Vec3) -> Self {
        FieldSampler {
            e_field: Box::new(|_, _| Vec3::zeros()),
            b_field: Box::new(move |_, _| b0),
            grad_e: Box::new(|_, _| Matrix3::zeros()),
            grad_b: Box::new(|_, _| Matrix3::zeros()),
            lipschitz: 0.0,
        }
    }

    /// Smooth periodic test fields of amplitude `amp` with analytic
    /// gradients; each field component and each gradient entry is bounded
    /// by `amp`.
    pub fn manufactured(amp: f64) -> Self {
        let e = move |_t: f64, x: Vec3| amp * Vec3::new(x.y.sin(), x.z.sin(), x.x.sin());
        let b = move |_t: f64, x: Vec3| amp * Vec3::new(x.z.cos(), x.x.cos(), x.y.cos());
        let ge = move |_t: f64, x: Vec3| {
            let mut m = Matrix3::zeros();
            m[(0, 1)] = amp * x.y.cos();
            m[(1, 2)] = amp * x.z.cos();
            m[(2, 0)] = amp * x.x.cos();
            m
        };
        let gb = move |_t: f64, x: Vec3| {
            let mut m = Matrix3::zeros();
            m[(0, 2)] = -amp * x.z.sin();
            m[(1, 0)] = -amp * x.x.sin();
            m[(2, 1)] = -amp * x.y.sin();
            m
        };
        FieldSampler {
            e_field: Box::new(e),
            b_field: Box::new(b),
            grad_e: Box::new(ge),
            grad_b: Box::new(gb),
            lipschitz: amp,
        }
    }
}

/// Phase state plus the variational matrices ∂X/∂p and ∂P/∂p
/// (at τ = t: ∂X/∂p = 0, ∂P/∂p = I).
#[derive(Debug, Clone, Copy)]
pub struct VariationalState {
    pub x: Vec3,
    pub p: Vec3,
    pub dxdp: Matrix3<f64>,
    pub dpdp: Matrix3<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy)]
struct Rhs {
    dx: Vec3,
    dp: Vec3,
    ddxdp: Matrix3<f64>,
    ddpdp: Matrix3<f64>,
}

/// Right-hand side; with the variational block:
/// `d(∂X)/dτ = c ∂(P/P⁰)` and
/// `d(∂P_j)/dτ = -∇E_j·∂X - [v × (∇B·∂X)]_j - [(∂v) × B]_j`, v = P/P⁰.
fn rhs(
    fields: &FieldSampler,
    tau: f64,
    s: &VariationalState,
    c: LightSpeed,
    with_variational: bool,
) -> Rhs {
    let p = s.p;
    let p0 = (c.0 * c.0 + p.norm_squared()).sqrt();
    let v = p / p0;
    let e = (fields.e_field)(tau, s.x);
    let b = (fields.b_field)(tau, s.x);
    let dx = v * c.0;
    let dp = -e - v.cross(&b);
    if !with_variational {
        return Rhs {
            dx,
            dp,
            ddxdp: Matrix3::zeros(),
            ddpdp: Matrix3::zeros(),
        };
    }
    let dv_dp = (Matrix3::identity() * (p0 * p0) - p * p.transpose()) / (p0 * p0 * p0);
    let dv = dv_dp * s.dpdp; // column i: ∂v/∂p_i
    let ge = (fields.grad_e)(tau, s.x);
    let gb = (fields.grad_b)(tau, s.x);
    let mut ddpdp = Matrix3::zeros();
    for i in 0..3 {
        let dxi = s.dxdp.column(i).into_owned();
        let dvi = dv.column(i).into_owned();
        let col = -(ge * dxi) - v.cross(&(gb * dxi)) - dvi.cross(&b);
        for j in 0..3 {
            ddpdp[(j, i)] = col[j];
        }
    }
    Rhs {
        dx,
        dp,
        ddxdp: dv * c.0,
        ddpdp,
    }
}

fn advance(
    fields: &FieldSampler,
    s: &VariationalState,
    h: f64,
    c: LightSpeed,
    with_variational: bool,
) -> VariationalState {
    let add = |k: &Rhs, w: f64| VariationalState {
        x: s.x + k.dx * w,
        p: s.p + k.dp * w,
        dxdp: s.dxdp + k.ddxdp * w,
        dpdp: s.dpdp + k.ddpdp * w,
        tau: s.tau + w,
    };
    let k1 = rhs(fields, s.tau, s, c, with_variational);
    let s2 = add(&k1, 0.5 * h);
    let k2 = rhs(fields, s.tau + 0.5 * h, &s2, c, with_variational);
    let s3 = add(&k2, 0.5 * h);
    let k3 = rhs(fields, s.tau + 0.5 * h, &s3, c, with_variational);
    let s4 = add(&k3, h);
    let k4 = rhs(fields, s.tau + h, &s4, c, with_variational);
    VariationalState {
        x: s.x + (k1.dx + k2.dx * 2.0 + k3.dx * 2.0 + k4.dx) * (h / 6.0),
        p: s.p + (k1.dp + k2.dp * 2.0 + k3.dp * 2.0 + k4.dp) * (h / 6.0),
        dxdp: s.dxdp + (k1.ddxdp + k2.ddxdp * 2.0 + k3.ddxdp * 2.0 + k4.ddxdp) * (h / 6.0),
        dpdp: s.dpdp + (k1.ddpdp + k2.ddpdp * 2.0 + k3.ddpdp * 2.0 + k4.ddpdp) * (h / 6.0),
        tau: s.tau + h,
    }
}

/// Default step count for a τ-span (fixed step, test-reproducible).
pub const DEFAULT_STEPS: usize = 2048;

/// Integrates the characteristic through `init` to `τ_end` (either
/// direction). The terminal conditions `X(t) = x`, `P(t) = p` hold exactly
/// at the first trajectory point.
pub fn integrate_characteristics(
    init: &PhaseState,
    fields: &FieldSampler,
    tau_end: f64,
    c: LightSpeed,
    steps: usize,
) -> Result<Vec<PhaseState>> {
    let traj = integrate_variational(init, fields, tau_end, c, steps, false)?;
    Ok(traj
        .into_iter()
        .map(|s| PhaseState {
            x: s.x,
            p: s.p,
            t: s.tau,
        })
        .collect())
}

/// Co-integrates the characteristic and its variational matrices.
pub fn integrate_variational(
    init: &PhaseState,
    fields: &FieldSampler,
    tau_end: f64,
    c: LightSpeed,
    steps: usize,
    with_variational: bool,
) -> Result<Vec<VariationalState>> {
    if steps == 0 {
        return Err(Error::Solver("need at least one step".into()));
    }
    let h = (tau_end - init.t) / steps as f64;
    let mut s = VariationalState {
        x: init.x,
        p: init.p,
        dxdp: Matrix3::zeros(),
        dpdp: Matrix3::identity(),
        tau: init.t,
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s);
    for _ in 0..steps {
        s = advance(fields, &s, h, c, with_variational);
        if !(s.x.iter().all(|v| v.is_finite()) && s.p.iter().all(|v| v.is_finite())) {
            return Err(Error::Solver(format!(
                "integration failed; last good tau = {}",
                s.tau - h
            )));
        }
        out.push(s);
    }
    Ok(out)
}

/// Report of the two-sided Jacobian bound check over sampled trajectories.
#[derive(Debug, Clone, Default)]
pub struct JacobianBoundReport {
    /// max over samples of max(|det|/V, V/|det|), V = c⁵|t-τ|³/(p⁰)⁵.
    pub c_measured: f64,
    /// max spectral norm of the (τ-t)p⁰/(2c)·d²(∂X/∂p)/dτ² correction.
    pub correction_norm: f64,
    /// min over trajectories of P⁰(τ)/p⁰.
    pub energy_ratio_min: f64,
    /// max of |P(τ) - p| / (|t-τ|·sup|(E,B)|).
    pub drift_ratio_max: f64,
    pub samples: usize,
}

/// Verifies the two-sided bound
/// `c⁵|t-τ|³/(2(p⁰)⁵) ≲ |det ∂X/∂p| ≲ 2c⁵|t-τ|³/(p⁰)⁵`
/// on sampled initial momenta over the backward horizon `τ ∈ [t - T̄, t]`,
/// together with the perturbation proxy
/// `‖(τ-t)p⁰/(2c)·d²(∂X/∂p)/dτ²‖ ≤ 1/4` and `P⁰(τ) ≥ p⁰/2`.
pub fn jacobian_bounds_check(
    fields: &FieldSampler,
    c: LightSpeed,
    momenta: &[Vec3],
    t_bar: f64,
    field_sup: f64,
) -> Result<JacobianBoundReport> {
    let mut report = JacobianBoundReport {
        energy_ratio_min: f64::INFINITY,
        ..Default::default()
    };
    let t_start = 0.3;
    for &p in momenta {
        let init = PhaseState {
            x: Vec3::new(0.2, -0.1, 0.4),
            p,
            t: t_start,
        };
        let steps = 512;
        let traj = integrate_variational(&init, fields, t_start - t_bar, c, steps, true)?;
        let p0 = (c.0 * c.0 + p.norm_squared()).sqrt();
        let h = -t_bar / steps as f64;
        for (k, s) in traj.iter().enumerate() {
            let dt = (s.tau - t_start).abs();
            let p0_tau = (c.0 * c.0 + s.p.norm_squared()).sqrt();
            report.energy_ratio_min = report.energy_ratio_min.min(p0_tau / p0);
            if field_sup > 0.0 && dt > 0.0 {
                report.drift_ratio_max = report
                    .drift_ratio_max
                    .max((s.p - p).norm() / (dt * field_sup));
            }
            if dt < 0.25 * t_bar {
                continue; // the determinant comparison needs a lever arm
            }
            let det = s.dxdp.determinant().abs();
            let central = c.0.powi(5) * dt.powi(3) / p0.powi(5);
            if det > 0.0 && central > 0.0 {
                let ratio = (det / central).max(central / det);
                report.c_measured = report.c_measured.max(ratio);
            }
            if k > 0 && k + 1 < traj.len() {
                let d_prev = rhs(fields, traj[k - 1].tau, &traj[k - 1], c, true).ddxdp;
                let d_next = rhs(fields, traj[k + 1].tau, &traj[k + 1], c, true).ddxdp;
                let second = (d_next - d_prev) / (2.0 * h);
                let proxy = second * ((s.tau - t_start) * p0 / (2.0 * c.0));
                report.correction_norm = report.correction_norm.max(proxy.norm());
            }
            report.samples += 1;
        }
    }
    Ok(report)
}
