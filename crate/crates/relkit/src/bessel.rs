//! Modified Bessel functions of the second kind `K_j` for integer orders,
//! their recurrence/derivative identities, and large-argument asymptotic
//! expansions with certified remainder bounds.
//!
//! `K_j(z) = (z/2)^j Γ(1/2)/Γ(j+1/2) ∫_1^∞ e^{-zt} (t²-1)^{j-1/2} dt`.
//!
//! The main evaluator substitutes `t = 1 + v²/z`, which regularizes both the
//! endpoint and the exponential tail, and refines adaptively to a 1e-13
//! relative target. Everything thermodynamics needs at large argument is
//! exposed in scaled or log form so that `γ = c²/T ~ 10⁶` never underflows:
//! `e^z K_j(z)`, `ln K_j(z)`, the ratio `K_3/K_2`, and two cancellation-free
//! combinations of that ratio that appear in the isentropic closures.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_integrate;

/// Threshold beyond which `e^{-z}` underflows and plain values switch to the
/// asymptotic series; scaled and log forms are unaffected.
pub const DIRECT_EVAL_LIMIT: f64 = 700.0;

/// Large-argument series switch for the ratio combinations.
const SERIES_SWITCH: f64 = 30.0;

/// A value together with an estimated absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValue {
    pub value: f64,
    pub estimated_abs_error: f64,
}

/// Coefficients `A_{j,m}` of the large-z expansion
/// `K_j(z) ~ sqrt(π/2z) e^{-z} Σ_m A_{j,m} z^{-m}`.
///
/// `A_{j,0} = 1` and `A_{j,m} = (4j²-1)(4j²-3²)···(4j²-(2m-1)²) / (m! 8^m)`.
#[derive(Debug, Clone)]
pub struct BesselSeries {
    pub order: u32,
    pub coefficients: Vec<f64>,
    pub truncation: usize,
}

impl BesselSeries {
    pub fn new(order: u32, truncation: usize) -> Self {
        assert!(truncation >= 1);
        let fourj2 = 4.0 * (order as f64) * (order as f64);
        let mut coefficients = Vec::with_capacity(truncation + 1);
        coefficients.push(1.0);
        for m in 1..=truncation {
            let mf = m as f64;
            let prev = coefficients[m - 1];
            coefficients.push(prev * (fourj2 - (2.0 * mf - 1.0).powi(2)) / (8.0 * mf));
        }
        BesselSeries {
            order,
            coefficients,
            truncation,
        }
    }

    /// Partial sum `Σ_{m<n} A_{j,m} z^{-m}` for `n = truncation`.
    pub fn partial_sum(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        let mut zp = 1.0;
        for m in 0..self.truncation {
            acc += self.coefficients[m] * zp;
            zp /= z;
        }
        acc
    }
}

/// `1/(2j-1)!!`, the prefactor √π / (Γ(j+1/2) 2^j).
fn inv_double_factorial(j: u32) -> f64 {
    let mut acc = 1.0;
    let mut k = 1i64;
    while k <= 2 * j as i64 - 1 {
        acc *= k as f64;
        k += 2;
    }
    1.0 / acc
}

/// Scaled value `e^z K_j(z)` by adaptive quadrature; valid for all `z > 0`.
pub fn bessel_k_scaled(j: u32, z: f64) -> Result<BesselValue> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("bessel_k requires z > 0, got {z}")));
    }
    // t = 1 + v²/z turns the integral into
    //   e^z K_j = pref_j z^{-1/2} · 2 ∫_0^∞ e^{-v²} v^{2j} (2 + v²/z)^{j-1/2} dv.
    let jj = j as f64;
    let integrand = move |v: f64| {
        let v2 = v * v;
        2.0 * (-v2).exp() * v2.powi(j as i32) * (2.0 + v2 / z).powf(jj - 0.5)
    };
    let (raw, raw_err) = adaptive_integrate(integrand, 0.0, 9.0, 1e-14, 1e-300)?;
    let pref = inv_double_factorial(j) / z.sqrt();
    let value = pref * raw;
    // Truncation of the v-range contributes below e^{-81}; fold it in anyway.
    let tail = (-81.0f64).exp() * pref;
    Ok(BesselValue {
        value,
        estimated_abs_error: pref * raw_err + tail + 1e-15 * value.abs(),
    })
}

/// `ln K_j(z)`, stable for arbitrarily large `z`.
pub fn log_bessel_k(j: u32, z: f64) -> Result<f64> {
    if z <= DIRECT_EVAL_LIMIT {
        Ok(bessel_k_scaled(j, z)?.value.ln() - z)
    } else {
        let series = BesselSeries::new(j, 5);
        let s = series.partial_sum(z);
        Ok(0.5 * (std::f64::consts::PI / (2.0 * z)).ln() - z + s.ln())
    }
}

/// `K_j(z)` with an error estimate.
///
/// Above `z = 700` the plain value is taken from the 5-term asymptotic
/// series (the quadrature value would be fine too, but this keeps the
/// documented underflow-guard branch in one place); ratios should use
/// [`log_bessel_k`] or [`k_ratio`] instead.
pub fn bessel_k(j: u32, z: f64) -> Result<BesselValue> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("bessel_k requires z > 0, got {z}")));
    }
    if z > DIRECT_EVAL_LIMIT {
        return bessel_k_asymptotic(j, z, 5);
    }
    let scaled = bessel_k_scaled(j, z)?;
    let damp = (-z).exp();
    Ok(BesselValue {
        value: scaled.value * damp,
        estimated_abs_error: scaled.estimated_abs_error * damp,
    })
}

/// Truncated asymptotic expansion with the `γ_{j,n}` remainder bound:
/// `|γ_{j,n}(z)| ≤ 2|A_{j,n}| exp((j²-1/4)/z)`, sharpened to `|A_{j,n}|`
/// when `j ≤ n + 1/2`.
pub fn bessel_k_asymptotic(j: u32, z: f64, n: usize) -> Result<BesselValue> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("bessel_k requires z > 0, got {z}")));
    }
    if n < 1 {
        return Err(Error::Domain("asymptotic truncation must be ≥ 1".into()));
    }
    let series = BesselSeries::new(j, n);
    let pref = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
    let value = pref * series.partial_sum(z);
    let a_n = BesselSeries::new(j, n + 1).coefficients[n].abs();
    let jj = j as f64;
    let gamma_bound = if jj <= n as f64 + 0.5 {
        a_n
    } else {
        2.0 * a_n * ((jj * jj - 0.25) / z).exp()
    };
    Ok(BesselValue {
        value,
        estimated_abs_error: pref * gamma_bound * z.powi(-(n as i32)),
    })
}

/// Asymptotic-series ratio `Σ A_{num,m} z^{-m} / Σ A_{den,m} z^{-m}` as power
/// series coefficients (formal division).
fn series_ratio_coefficients(num: &[f64], den: &[f64]) -> Vec<f64> {
    let n = num.len().min(den.len());
    let mut rho = vec![0.0; n];
    for m in 0..n {
        let mut acc = num[m];
        for k in 1..=m {
            acc -= den[k] * rho[m - k];
        }
        rho[m] = acc; // den[0] = 1
    }
    rho
}

/// Evaluate `Σ_{m≥m0} c_m z^{-m}` with optimal truncation; returns the sum
/// and the magnitude of the first omitted term.
fn evaluate_asymptotic(c: &[f64], z: f64, m0: usize) -> (f64, f64) {
    let mut acc = 0.0;
    let mut best = f64::INFINITY;
    let mut zp = z.powi(-(m0 as i32));
    for (m, cm) in c.iter().enumerate().skip(m0) {
        let term = cm * zp;
        if term.abs() > best {
            return (acc, term.abs());
        }
        acc += term;
        best = term.abs();
        zp /= z;
        let _ = m;
    }
    (acc, best)
}

const RATIO_TERMS: usize = 18;

fn ratio_32_series() -> Vec<f64> {
    let a3 = BesselSeries::new(3, RATIO_TERMS).coefficients;
    let a2 = BesselSeries::new(2, RATIO_TERMS).coefficients;
    series_ratio_coefficients(&a3, &a2)
}

/// Ratio `K_{j}/K_{2}` for j ∈ {1, 3}, stable at any argument size.
pub fn k_ratio(j: u32, z: f64) -> Result<f64> {
    assert!(j == 1 || j == 3, "ratios are provided against K_2 only");
    if z <= DIRECT_EVAL_LIMIT {
        let num = bessel_k_scaled(j, z)?.value;
        let den = bessel_k_scaled(2, z)?.value;
        Ok(num / den)
    } else {
        let r3 = {
            let rho = ratio_32_series();
            evaluate_asymptotic(&rho, z, 0).0
        };
        if j == 3 {
            Ok(r3)
        } else {
            // K_1/K_2 = K_3/K_2 - 4/z
            Ok(r3 - 4.0 / z)
        }
    }
}

/// `K_3/K_2 - 1`, free of cancellation at large argument (the closure terms
/// `γ (K_3/K_2 - 1)` need all the relative accuracy they can get).
pub fn k_ratio_32_minus_one(z: f64) -> Result<f64> {
    if z < SERIES_SWITCH {
        let r = k_ratio(3, z)?;
        Ok(r - 1.0)
    } else {
        let rho = ratio_32_series();
        Ok(evaluate_asymptotic(&rho, z, 1).0)
    }
}

/// The pair `(r² - (5/z) r - 1, r² - (5/z) r + 1/z² - 1)` with `r = K_3/K_2`.
///
/// Both combinations are `O(z^{-2})` and suffer catastrophic cancellation if
/// assembled from `r` directly; above the series switch they are evaluated
/// from formal series whose constant and `z^{-1}` coefficients vanish
/// identically. The quotient is the enthalpy derivative up to a factor `T/n`.
pub fn k_ratio_combos(z: f64) -> Result<(f64, f64)> {
    if z < SERIES_SWITCH {
        let r = k_ratio(3, z)?;
        let n = r * r - 5.0 / z * r - 1.0;
        Ok((n, n + 1.0 / (z * z)))
    } else {
        let rho = ratio_32_series();
        // σ = ρ*ρ - 5·(ρ shifted by one power) - 1
        let n = RATIO_TERMS;
        let mut sigma = vec![0.0; n];
        for m in 0..n {
            let mut acc = 0.0;
            for k in 0..=m {
                acc += rho[k] * rho[m - k];
            }
            if m >= 1 {
                acc -= 5.0 * rho[m - 1];
            }
            if m == 0 {
                acc -= 1.0;
            }
            sigma[m] = acc;
        }
        // σ_0 = σ_1 = 0 analytically; enforce exactly.
        sigma[0] = 0.0;
        sigma[1] = 0.0;
        let num = evaluate_asymptotic(&sigma, z, 2).0;
        Ok((num, num + 1.0 / (z * z)))
    }
}

/// Report from the identity suite: max residuals over the sampled points.
#[derive(Debug, Clone, Default)]
pub struct IdentityReport {
    pub max_recurrence_rel: f64,
    pub max_derivative_abs: f64,
    pub monotone_violations: usize,
}

/// Checks, for each sample `z`, the recurrence
/// `K_{j+1} = (2j/z) K_j + K_{j-1}` (j = 1, 2), the derivative identity
/// `d/dz (K_j/z^j) = -K_{j+1}/z^j` by 5-point central differences, and the
/// monotonicity `K_j < K_{j+1}`.
pub fn bessel_identity_suite(z_samples: &[f64]) -> Result<IdentityReport> {
    let mut report = IdentityReport::default();
    for &z in z_samples {
        if z <= 0.0 {
            return Err(Error::Domain("identity suite requires z > 0".into()));
        }
        let k: Vec<f64> = (0..5)
            .map(|j| bessel_k(j, z).map(|b| b.value))
            .collect::<Result<_>>()?;
        for j in 1..=2usize {
            let lhs = k[j + 1];
            let rhs = 2.0 * j as f64 / z * k[j] + k[j - 1];
            let rel = (lhs - rhs).abs() / lhs.abs();
            report.max_recurrence_rel = report.max_recurrence_rel.max(rel);
        }
        for j in 0..=2u32 {
            // K decays on an O(1) scale for large z and on an O(z) scale
            // below 1, so the step follows min(z, 1).
            let h = 1e-3 * z.min(1.0);
            let g = |x: f64| -> Result<f64> { Ok(bessel_k(j, x)?.value / x.powi(j as i32)) };
            // 5-point central difference
            let d = (g(z - 2.0 * h)? - 8.0 * g(z - h)? + 8.0 * g(z + h)? - g(z + 2.0 * h)?)
                / (12.0 * h);
            let target = -k[(j + 1) as usize] / z.powi(j as i32);
            let scale = target.abs().max(1e-300);
            report.max_derivative_abs = report.max_derivative_abs.max((d - target).abs() / scale);
        }
        for j in 0..4usize {
            if !(k[j] < k[j + 1]) {
                report.monotone_violations += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Frozen reference computed by the independent cosh-representation
    /// oracle in `tests/common` (K_j(z) = ∫_0^∞ e^{-z cosh t} cosh(jt) dt,
    /// tanh-sinh quadrature) before this module was written; cross-checked
    /// against the literature value of K_2(1).
    const K2_OF_1: f64 = 1.6248388986351774;

    #[test]
    fn k2_at_one_matches_frozen_oracle_value() {
        let v = bessel_k(2, 1.0).unwrap();
        assert!(
            (v.value - K2_OF_1).abs() <= 1e-10 * K2_OF_1,
            "K_2(1) = {:.16e}",
            v.value
        );
        assert!(v.estimated_abs_error <= 1e-12 * K2_OF_1.max(1.0));
    }

    #[test]
    fn recurrence_residual_small() {
        // |K_3(5) - (4/5) K_2(5) - K_1(5)| ≤ 1e-12 K_3(5)
        let k1 = bessel_k(1, 5.0).unwrap().value;
        let k2 = bessel_k(2, 5.0).unwrap().value;
        let k3 = bessel_k(3, 5.0).unwrap().value;
        assert!((k3 - 0.8 * k2 - k1).abs() <= 1e-12 * k3);
    }

    #[test]
    fn asymptotic_normalization_at_large_z() {
        // K_2(z) e^z sqrt(2z/π) → 1; within 1e-2 of 1 at z = 200.
        let z = 200.0;
        let prod = bessel_k_scaled(2, z).unwrap().value * (2.0 * z / std::f64::consts::PI).sqrt();
        assert!((prod - 1.0).abs() < 1e-2, "{prod}");
    }

    #[test]
    fn asymptotic_leading_coefficient_is_one() {
        for j in 0..6 {
            assert_eq!(BesselSeries::new(j, 3).coefficients[0], 1.0);
        }
        // Spot-check the tabulated K_2 and K_3 expansion coefficients.
        let a2 = BesselSeries::new(2, 5).coefficients;
        assert!((a2[1] - 15.0 / 8.0).abs() < 1e-15);
        assert!((a2[2] - 105.0 / 128.0).abs() < 1e-13);
        assert!((a2[3] + 945.0 / 3072.0).abs() < 1e-12);
        let a3 = BesselSeries::new(3, 5).coefficients;
        assert!((a3[1] - 35.0 / 8.0).abs() < 1e-14);
        assert!((a3[2] - 945.0 / 128.0).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_remainder_within_gamma_bound() {
        // |K_j(z) - truncated series| ≤ estimated_abs_error for z ≥ 2j.
        for j in 0..=4u32 {
            for n in [1usize, 2, 3, 5] {
                for z in [2.0 * j as f64 + 1.0, 10.0, 25.0, 60.0, 300.0] {
                    let exact = bessel_k(j, z).unwrap();
                    let asy = bessel_k_asymptotic(j, z, n).unwrap();
                    let diff = (exact.value - asy.value).abs();
                    assert!(
                        diff <= asy.estimated_abs_error + exact.estimated_abs_error,
                        "j={j} n={n} z={z}: diff {diff:e} vs bound {:e}",
                        asy.estimated_abs_error
                    );
                }
            }
        }
    }

    #[test]
    fn ratio_expansion_order() {
        // (K_3/K_2)(z) - 1 - 5/(2z) - 15/(8z²) + 15/(8z³) = O(z^{-4}):
        // fitted log-log slope over z ∈ {10, 20, 40, 80, 160}.
        let zs = [10.0, 20.0, 40.0, 80.0, 160.0];
        let resid: Vec<f64> = zs
            .iter()
            .map(|&z| {
                let r = k_ratio(3, z).unwrap();
                (r - 1.0 - 2.5 / z - 15.0 / (8.0 * z * z) + 15.0 / (8.0 * z * z * z)).abs()
            })
            .collect();
        let slope = fit_slope(&zs, &resid);
        assert!(
            (-4.35..=-3.65).contains(&slope),
            "slope {slope}, residuals {resid:?}"
        );
    }

    #[test]
    fn identity_suite_over_wide_range() {
        let zs: Vec<f64> = (0..40)
            .map(|i| 0.5 * (500.0f64 / 0.5).powf(i as f64 / 39.0))
            .collect();
        let report = bessel_identity_suite(&zs).unwrap();
        assert!(report.max_recurrence_rel <= 1e-12, "{report:?}");
        assert!(report.max_derivative_abs <= 1e-7, "{report:?}");
        assert_eq!(report.monotone_violations, 0);
    }

    #[test]
    fn derivative_identity_at_z3() {
        // z = 3, j = 2, step 1e-3: residual ≤ 1e-7.
        let z = 3.0f64;
        let h = 1e-3;
        let g = |x: f64| bessel_k(2, x).unwrap().value / x.powi(2);
        let d = (g(z - 2.0 * h) - 8.0 * g(z - h) + 8.0 * g(z + h) - g(z + 2.0 * h)) / (12.0 * h);
        let target = -bessel_k(3, z).unwrap().value / z.powi(2);
        assert!((d - target).abs() <= 1e-7 * target.abs());
    }

    #[test]
    fn log_form_consistent_and_huge_argument_ratios() {
        let z = 50.0;
        let lk = log_bessel_k(2, z).unwrap();
        assert!((lk.exp() - bessel_k(2, z).unwrap().value).abs() < 1e-12 * lk.exp());
        // ratio at z beyond the underflow threshold
        let r = k_ratio(3, 2.0e6).unwrap();
        let expect = 1.0 + 2.5 / 2.0e6 + 15.0 / (8.0 * 4.0e12);
        assert!((r - expect).abs() < 1e-14, "{r} vs {expect}");
    }

    #[test]
    fn ratio_combo_consistency_across_switch() {
        // Direct and series paths must agree in the crossover region.
        for z in [25.0, 29.0, 31.0, 40.0] {
            let r = k_ratio(3, z).unwrap();
            let direct = r * r - 5.0 / z * r - 1.0;
            let (combo, combo_d) = k_ratio_combos(z).unwrap();
            assert!(
                (combo - direct).abs() < 1e-10 * direct.abs(),
                "z={z}: {combo} vs {direct}"
            );
            assert!((combo_d - (direct + 1.0 / (z * z))).abs() < 1e-10 * direct.abs());
        }
        // Known leading behavior -5/(2z²) and -3/(2z²).
        let z = 1e5;
        let (n, d) = k_ratio_combos(z).unwrap();
        assert!((n * z * z + 2.5).abs() < 1e-3);
        assert!((d * z * z + 1.5).abs() < 1e-3);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(2, 0.0).is_err());
        assert!(bessel_k(2, -1.0).is_err());
        assert!(bessel_k_asymptotic(2, 1.0, 0).is_err());
    }

    fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        let n = lx.len() as f64;
        let sx: f64 = lx.iter().sum();
        let sy: f64 = ly.iter().sum();
        let sxx: f64 = lx.iter().map(|v| v * v).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}
