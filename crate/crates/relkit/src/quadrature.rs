//! Quadrature rules: Gauss-Legendre on intervals, adaptive refinement for
//! the Bessel integrals, and angular rules on the unit sphere.
//!
//! Two independent sphere rules are provided so angular integrals can be
//! cross-checked: the classical 50-point Lebedev rule (polynomial degree 11,
//! exact rational weights) and Gauss-Legendre-in-`cos θ` × uniform-in-`φ`
//! product rules of arbitrary degree. A clustered variant of the product
//! rule handles the forward-peaked kernels that appear when `|p| ≫ c`.

use crate::error::{Error, Result};
use crate::Vec3;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Computed by Newton iteration on the Legendre recurrence; accurate to a
/// few ulps for the orders used here (n ≤ 512).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (p2, d2) = legendre_and_derivative(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_and_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, w * half))
            .collect()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive composite Gauss-Legendre integration on `[a, b]`.
///
/// Error is estimated per panel from the difference between 15- and 31-point
/// rules; panels are bisected until the accumulated estimate meets
/// `rel_tol * |I| + abs_tol`. Returns `(value, error_estimate)`.
pub fn adaptive_integrate<F: Fn(f64) -> f64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    let lo = GaussLegendre::new(15);
    let hi = GaussLegendre::new(31);
    let mut stack = vec![(a, b)];
    let mut value = 0.0f64;
    let mut err = 0.0f64;
    // First pass estimate of the magnitude for the relative target.
    let rough = hi.integrate(a, b, f).abs();
    let mut panels = 0usize;
    while let Some((x0, x1)) = stack.pop() {
        panels += 1;
        if panels > 4000 {
            return Err(Error::QuadratureNonConvergence(format!(
                "adaptive rule exceeded panel budget on [{a}, {b}]"
            )));
        }
        let coarse = lo.integrate(x0, x1, f);
        let fine = hi.integrate(x0, x1, f);
        let e = (fine - coarse).abs();
        let tol_here = (rel_tol * rough.max(value.abs()) + abs_tol) * (x1 - x0) / (b - a);
        if e <= tol_here || (x1 - x0) < 1e-14 * (b - a).abs() {
            value += fine;
            err += e;
        } else {
            let mid = 0.5 * (x0 + x1);
            stack.push((x0, mid));
            stack.push((mid, x1));
        }
    }
    if !value.is_finite() {
        return Err(Error::Numeric("non-finite quadrature value".into()));
    }
    Ok((value, err))
}

/// Quadrature nodes and weights on the unit sphere; weights sum to 4π.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Highest spherical-harmonic degree integrated exactly.
    pub degree: usize,
}

impl SphereQuadrature {
    /// Classical 50-point Lebedev rule, exact through degree 11.
    ///
    /// Weights are the exact rationals 4/315, 64/2835, 27/1280 and
    /// 11⁴/725760 of the octahedrally symmetric rule.
    pub fn lebedev50() -> Self {
        let four_pi = 4.0 * std::f64::consts::PI;
        let mut nodes = Vec::with_capacity(50);
        let mut weights = Vec::with_capacity(50);
        let w1 = 4.0 / 315.0 * four_pi;
        for d in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = Vec3::zeros();
                v[d] = s;
                nodes.push(v);
                weights.push(w1);
            }
        }
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let w2 = 64.0 / 2835.0 * four_pi;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            for si in [1.0, -1.0] {
                for sj in [1.0, -1.0] {
                    let mut v = Vec3::zeros();
                    v[i] = si * a;
                    v[j] = sj * a;
                    nodes.push(v);
                    weights.push(w2);
                }
            }
        }
        let b = 1.0 / 3.0_f64.sqrt();
        let w3 = 27.0 / 1280.0 * four_pi;
        for sx in [1.0, -1.0] {
            for sy in [1.0, -1.0] {
                for sz in [1.0, -1.0] {
                    nodes.push(Vec3::new(sx * b, sy * b, sz * b));
                    weights.push(w3);
                }
            }
        }
        // (l, l, m) orbit with l = 1/sqrt(11), m = 3/sqrt(11).
        let l = 1.0 / 11.0_f64.sqrt();
        let m = 3.0 / 11.0_f64.sqrt();
        let w4 = 14641.0 / 725760.0 * four_pi;
        for perm in 0..3 {
            for sl1 in [1.0, -1.0] {
                for sl2 in [1.0, -1.0] {
                    for sm in [1.0, -1.0] {
                        let (x, y, z) = match perm {
                            0 => (sl1 * l, sl2 * l, sm * m),
                            1 => (sl1 * l, sm * m, sl2 * l),
                            _ => (sm * m, sl1 * l, sl2 * l),
                        };
                        nodes.push(Vec3::new(x, y, z));
                        weights.push(w4);
                    }
                }
            }
        }
        SphereQuadrature {
            nodes,
            weights,
            degree: 11,
        }
    }

    /// Product rule: `n_mu`-point Gauss-Legendre in cos θ × `n_phi` uniform
    /// points in φ. Exact for spherical harmonics of degree ≤ min(2·n_mu - 1,
    /// n_phi - 1).
    pub fn product(n_mu: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::new(n_mu);
        let mut nodes = Vec::with_capacity(n_mu * n_phi);
        let mut weights = Vec::with_capacity(n_mu * n_phi);
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        for (mu, wmu) in gl.nodes.iter().zip(&gl.weights) {
            let s = (1.0 - mu * mu).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = dphi * k as f64;
                nodes.push(Vec3::new(s * phi.cos(), s * phi.sin(), *mu));
                weights.push(wmu * dphi);
            }
        }
        SphereQuadrature {
            nodes,
            weights,
            degree: (2 * n_mu - 1).min(n_phi.saturating_sub(1)),
        }
    }

    /// Product rule rotated so its polar axis is `axis`.
    pub fn product_about(axis: Vec3, n_mu: usize, n_phi: usize) -> Self {
        let mut q = Self::product(n_mu, n_phi);
        let rot = rotation_to(axis);
        for v in &mut q.nodes {
            *v = rot * *v;
        }
        q.degree = (2 * n_mu - 1).min(n_phi.saturating_sub(1));
        q
    }

    /// Rule for integrands with a near-pole of the form `(A + β μ)^{-m}`
    /// along `axis` (μ = cos θ in the `axis` frame, 0 ≤ β < A). Nodes follow
    /// the linear-fractional substitution v = 1/(A + βμ), which clusters them
    /// where the integrand peaks; exact polynomial degree is not advertised.
    pub fn clustered(axis: Vec3, big_a: f64, beta: f64, n_mu: usize, n_phi: usize) -> Self {
        assert!(big_a > beta.abs());
        if beta.abs() < 1e-3 * big_a {
            return Self::product_about(axis, n_mu, n_phi);
        }
        let gl = GaussLegendre::new(n_mu);
        let rot = rotation_to(axis);
        let v_lo = 1.0 / (big_a + beta);
        let v_hi = 1.0 / (big_a - beta);
        let mut nodes = Vec::with_capacity(n_mu * n_phi);
        let mut weights = Vec::with_capacity(n_mu * n_phi);
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        for (t, wt) in gl.mapped(v_lo, v_hi) {
            let mu = ((1.0 / t - big_a) / beta).clamp(-1.0, 1.0);
            // dμ = dv / (β v²)
            let wmu = wt / (beta * t * t);
            let s = (1.0 - mu * mu).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = dphi * k as f64;
                nodes.push(rot * Vec3::new(s * phi.cos(), s * phi.sin(), mu));
                weights.push(wmu * dphi);
            }
        }
        SphereQuadrature {
            nodes,
            weights,
            degree: 0,
        }
    }

    /// Two product rules joined at the equator of `axis`, for integrands with
    /// a |μ|-type kink there (each open hemisphere is smooth).
    pub fn hemisphere_split(axis: Vec3, n_mu: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::new(n_mu);
        let rot = rotation_to(axis);
        let mut nodes = Vec::with_capacity(2 * n_mu * n_phi);
        let mut weights = Vec::with_capacity(2 * n_mu * n_phi);
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        for half in [(-1.0, 0.0), (0.0, 1.0)] {
            for (mu, wmu) in gl.mapped(half.0, half.1) {
                let s = (1.0 - mu * mu).max(0.0).sqrt();
                for k in 0..n_phi {
                    let phi = dphi * k as f64;
                    nodes.push(rot * Vec3::new(s * phi.cos(), s * phi.sin(), mu));
                    weights.push(wmu * dphi);
                }
            }
        }
        SphereQuadrature {
            nodes,
            weights,
            degree: 0,
        }
    }

    pub fn integrate<F: Fn(Vec3) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(n, w)| w * f(*n))
            .sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Rotation taking ê₃ to `axis` (any unit vector; for ‖axis‖ ≈ 0 the
/// identity is returned).
pub fn rotation_to(axis: Vec3) -> nalgebra::Matrix3<f64> {
    let n = axis.norm();
    if n < 1e-300 {
        return nalgebra::Matrix3::identity();
    }
    let e3 = axis / n;
    // Pick the coordinate direction least aligned with e3 to seed the frame.
    let seed = if e3.x.abs() <= e3.y.abs() && e3.x.abs() <= e3.z.abs() {
        Vec3::x()
    } else if e3.y.abs() <= e3.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (seed - e3 * seed.dot(&e3)).normalize();
    let e2 = e3.cross(&e1);
    nalgebra::Matrix3::from_columns(&[e1, e2, e3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_polynomial_exactness() {
        // 8 nodes are exact through degree 15.
        let gl = GaussLegendre::new(8);
        let val = gl.integrate(-1.0, 1.0, |x| x.powi(14));
        assert!((val - 2.0 / 15.0).abs() < 1e-14, "{val}");
        let val15 = gl.integrate(-1.0, 1.0, |x| x.powi(15));
        assert!(val15.abs() < 1e-15);
    }

    #[test]
    fn adaptive_matches_analytic() {
        let (v, e) = adaptive_integrate(|x: f64| (-x).exp(), 0.0, 30.0, 1e-14, 1e-300).unwrap();
        assert!((v - (1.0 - (-30.0f64).exp())).abs() < 1e-13);
        assert!(e < 1e-10);
    }

    #[test]
    fn lebedev50_weights_and_exactness() {
        let q = SphereQuadrature::lebedev50();
        assert_eq!(q.nodes.len(), 50);
        let four_pi = 4.0 * std::f64::consts::PI;
        assert!((q.weight_sum() - four_pi).abs() < 1e-13 * four_pi);
        for v in &q.nodes {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        // Exact for x^a y^b z^c with a+b+c ≤ 11: spot-check a few monomials.
        let cases: [(i32, i32, i32, f64); 4] = [
            (2, 0, 0, four_pi / 3.0),
            (4, 2, 0, four_pi / 35.0),
            (2, 2, 2, four_pi / 105.0),
            (6, 4, 0, four_pi / 231.0),
        ];
        for (a, b, c, exact) in cases {
            let val = q.integrate(|v| v.x.powi(a) * v.y.powi(b) * v.z.powi(c));
            assert!(
                (val - exact).abs() < 1e-13 * exact.abs().max(1.0),
                "x^{a} y^{b} z^{c}: {val} vs {exact}"
            );
        }
        // Odd monomials vanish by symmetry.
        assert!(q.integrate(|v| v.x * v.y * v.z).abs() < 1e-15);
    }

    #[test]
    fn product_rule_high_degree() {
        let q = SphereQuadrature::product(16, 32);
        assert!(q.degree >= 20);
        let four_pi = 4.0 * std::f64::consts::PI;
        assert!((q.weight_sum() - four_pi).abs() < 1e-13 * four_pi);
        // ∫ z^20 dω = 4π/21
        let val = q.integrate(|v| v.z.powi(20));
        assert!((val - four_pi / 21.0).abs() < 1e-13);
    }

    #[test]
    fn clustered_rule_resolves_near_pole() {
        // ∫ (A + βμ)^{-2} dω = 4π / (A² - β²)
        let a = 1.02;
        let beta = 1.0;
        let axis = Vec3::new(0.3, -0.5, 0.81).normalize();
        let q = SphereQuadrature::clustered(axis, a, beta, 48, 8);
        let val = q.integrate(|v| {
            let mu = v.dot(&axis);
            1.0 / (a + beta * mu).powi(2)
        });
        let exact = 4.0 * std::f64::consts::PI / (a * a - beta * beta);
        assert!((val - exact).abs() < 1e-10 * exact, "{val} vs {exact}");
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = rotation_to(Vec3::new(0.1, 0.2, -0.97));
        let should_be_identity = r.transpose() * r;
        assert!((should_be_identity - nalgebra::Matrix3::identity()).norm() < 1e-14);
    }
}
