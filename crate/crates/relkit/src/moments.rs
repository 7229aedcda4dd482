//! Momentum moments of the Jüttner Maxwellian: closed forms for the first,
//! second and third moments, the Lorentz boost generating the moving-frame
//! expressions from the rest frame, and a product-quadrature oracle that
//! validates every closed form.
//!
//! Index conventions: Minkowski metric `diag(-1, 1, 1, 1)`, Greek indices
//! 0..3, summation over repeated up-down pairs.

use crate::bessel::k_ratio;
use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, SphereQuadrature};
use crate::thermo::{
    energy_density, pressure, truncation_radius, FluidState, JuttnerEvaluator, LightSpeed,
};
use crate::Vec3;
use nalgebra::Matrix4;

pub const METRIC_DIAG: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Contravariant 4-vector; lowering multiplies the time component by -1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub fn lower(&self) -> FourVector {
        let mut out = self.0;
        out[0] = -out[0];
        FourVector(out)
    }

    /// Lorentz inner product `a^μ b_μ`.
    pub fn contract(&self, other: &FourVector) -> f64 {
        let lowered = self.lower();
        lowered.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// The boost `Λ̄` taking the rest frame to the frame with bulk velocity `u`:
/// `Λ̄ (c, 0, 0, 0)ᵗ = (u⁰, u₁, u₂, u₃)ᵗ` and `Λ̄ᵗ g Λ̄ = g`.
///
/// Built from `r̃ = u⁰/c`, `v_i = c u_i / u⁰`. The would-be 0/0 factor
/// `(r̃ - 1)/|v|²` is evaluated by its algebraic rationalization
/// `(u⁰)² / (c³ (u⁰ + c))`, regular for every `u` including zero.
#[derive(Debug, Clone, Copy)]
pub struct LorentzBoost {
    pub matrix: Matrix4<f64>,
}

impl LorentzBoost {
    pub fn new(u: Vec3, c: LightSpeed) -> Self {
        let u0 = (c.0 * c.0 + u.norm_squared()).sqrt();
        let k = u0 * u0 / (c.0.powi(3) * (u0 + c.0));
        let mut m = Matrix4::zeros();
        m[(0, 0)] = u0 / c.0;
        for i in 0..3 {
            m[(0, i + 1)] = u[i] / c.0;
            m[(i + 1, 0)] = u[i] / c.0;
            for j in 0..3 {
                let vij = (c.0 * u[i] / u0) * (c.0 * u[j] / u0);
                m[(i + 1, j + 1)] = if i == j { 1.0 } else { 0.0 } + k * vij;
            }
        }
        LorentzBoost { matrix: m }
    }

    /// `‖Λ̄ᵗ g Λ̄ - g‖`, which should vanish.
    pub fn metric_defect(&self) -> f64 {
        let g = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0));
        (self.matrix.transpose() * g * self.matrix - g).norm()
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let x = nalgebra::Vector4::from_column_slice(&v.0);
        let y = self.matrix * x;
        FourVector([y[0], y[1], y[2], y[3]])
    }
}

/// Rank-3 tensor with indices in 0..3, stored densely; the moment tensors
/// kept here are symmetric under all index permutations.
#[derive(Debug, Clone)]
pub struct Rank3(pub [[[f64; 4]; 4]; 4]);

impl Rank3 {
    pub fn zeros() -> Self {
        Rank3([[[0.0; 4]; 4]; 4])
    }

    pub fn max_asymmetry(&self) -> f64 {
        let t = &self.0;
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for g in 0..4 {
                    let v = t[a][b][g];
                    for w in [t[a][g][b], t[b][a][g], t[b][g][a], t[g][a][b], t[g][b][a]] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Rank3) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for g in 0..4 {
                    worst = worst.max((self.0[a][b][g] - other.0[a][b][g]).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for g in 0..4 {
                    worst = worst.max(self.0[a][b][g].abs());
                }
            }
        }
        worst
    }
}

/// First moment `I^α = n u^α / c` and second moment
/// `T^{αβ} = (e+P)/c³ u^α u^β + (P/c) g^{αβ}`.
pub fn first_second_moments(
    state: &FluidState,
    c: LightSpeed,
) -> Result<(FourVector, Matrix4<f64>)> {
    let u0 = state.u0(c);
    let i = FourVector([
        state.n * u0 / c.0,
        state.n * state.u.x / c.0,
        state.n * state.u.y / c.0,
        state.n * state.u.z / c.0,
    ]);
    let e = energy_density(state, c)?;
    let p = pressure(state);
    let coef = (e + p) / c.0.powi(3);
    let u4 = [u0, state.u.x, state.u.y, state.u.z];
    let mut t2 = Matrix4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let metric = if a == b { METRIC_DIAG[a] } else { 0.0 };
            t2[(a, b)] = coef * u4[a] * u4[b] + p / c.0 * metric;
        }
    }
    Ok((i, t2))
}

/// Rest-frame third moment `T̄^{αβγ}`: only `T̄^{000} = n c²(3K_3+γK_2)/(γK_2)`
/// and the patterns `(0,i,i)`, `(i,i,0)`, `(i,0,i)` with value
/// `n c² K_3/(γ K_2)` survive; everything else vanishes.
pub fn rest_frame_third_moment(state: &FluidState, c: LightSpeed) -> Result<Rank3> {
    if state.u.norm() != 0.0 {
        return Err(Error::Domain(
            "rest-frame third moment requires u = 0".into(),
        ));
    }
    let gamma = state.gamma(c);
    let r = k_ratio(3, gamma)?;
    // c² K_3/(γK_2) = T r, so the off component is n T r and
    // T̄^{000} = n (c² + 3 T r).
    let off = state.n * state.temperature * r;
    let t000 = state.n * (c.0 * c.0 + 3.0 * state.temperature * r);
    let mut t = Rank3::zeros();
    t.0[0][0][0] = t000;
    for i in 1..4 {
        t.0[0][i][i] = off;
        t.0[i][i][0] = off;
        t.0[i][0][i] = off;
    }
    Ok(t)
}

/// Moving-frame third moment `T^{αβγ}[M_c]` by the closed forms
/// (prefactors `n K_3/(c γ K_2)` and `n/c` on the `K_3`- and `γK_2`-weighted
/// parts respectively).
pub fn boosted_third_moment(state: &FluidState, c: LightSpeed) -> Result<Rank3> {
    if state.u.norm() >= c.0 {
        return Err(Error::Domain("|u| must be below the light speed".into()));
    }
    let gamma = state.gamma(c);
    let r = k_ratio(3, gamma)?;
    let u0 = state.u0(c);
    let uu = state.u.norm_squared();
    let pref3 = state.n * state.temperature * r / c.0.powi(3); // n K_3/(c γ K_2)
    let pref2 = state.n / c.0; // n γK_2/(c γ K_2)
    let u = state.u;
    let c2 = c.0 * c.0;
    let mut t = Rank3::zeros();
    t.0[0][0][0] = pref3 * (3.0 * u0.powi(3) + 3.0 * u0 * uu) + pref2 * u0.powi(3);
    for i in 0..3 {
        let t00i = pref3 * (5.0 * u0 * u0 * u[i] + uu * u[i]) + pref2 * u0 * u0 * u[i];
        t.0[0][0][i + 1] = t00i;
        t.0[0][i + 1][0] = t00i;
        t.0[i + 1][0][0] = t00i;
        // fill sorted index triples once and mirror, so permutation symmetry
        // holds bitwise rather than to rounding
        for j in i..3 {
            let d_ij = if i == j { 1.0 } else { 0.0 };
            let t0ij = pref3 * (6.0 * u0 * u[i] * u[j] + c2 * u0 * d_ij) + pref2 * u0 * u[i] * u[j];
            for perm in permutations3(0, i + 1, j + 1) {
                t.0[perm[0]][perm[1]][perm[2]] = t0ij;
            }
            for k in j..3 {
                let d_ik = if i == k { 1.0 } else { 0.0 };
                let d_jk = if j == k { 1.0 } else { 0.0 };
                let tijk = pref3
                    * (6.0 * u[i] * u[j] * u[k]
                        + c2 * (u[i] * d_jk + u[j] * d_ik + u[k] * d_ij))
                    + pref2 * u[i] * u[j] * u[k];
                for perm in permutations3(i + 1, j + 1, k + 1) {
                    t.0[perm[0]][perm[1]][perm[2]] = tijk;
                }
            }
        }
    }
    Ok(t)
}

fn permutations3(a: usize, b: usize, c: usize) -> [[usize; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

/// Third moment by boosting the rest-frame tensor,
/// `T^{αβγ} = Λ̄^α_{α'} Λ̄^β_{β'} Λ̄^γ_{γ'} T̄^{α'β'γ'}` — the independent
/// route against which the closed forms are checked.
pub fn contracted_third_moment(state: &FluidState, c: LightSpeed) -> Result<Rank3> {
    let rest = FluidState::rest(state.n, state.temperature)?;
    let tbar = rest_frame_third_moment(&rest, c)?;
    let boost = LorentzBoost::new(state.u, c).matrix;
    let mut t = Rank3::zeros();
    for a in 0..4 {
        for b in 0..4 {
            for g in 0..4 {
                let mut acc = 0.0;
                for ap in 0..4 {
                    for bp in 0..4 {
                        for gp in 0..4 {
                            let v = tbar.0[ap][bp][gp];
                            if v != 0.0 {
                                acc += boost[(a, ap)] * boost[(b, bp)] * boost[(g, gp)] * v;
                            }
                        }
                    }
                }
                t.0[a][b][g] = acc;
            }
        }
    }
    Ok(t)
}

/// Quadrature oracle for `∫ p^α p^β p^γ / p⁰ M_c dp` over the truncated
/// ball: radial Gauss-Legendre composed with a Gauss-Legendre-in-cos θ ×
/// uniform-in-φ sphere rule.
pub struct MomentQuadrature {
    shells: Vec<(f64, f64)>,
    sphere: SphereQuadrature,
}

impl Default for MomentQuadrature {
    fn default() -> Self {
        Self::new(200, 64, 128)
    }
}

impl MomentQuadrature {
    pub fn new(n_radial: usize, n_mu: usize, n_phi: usize) -> Self {
        MomentQuadrature {
            shells: GaussLegendre::new(n_radial).mapped(0.0, 1.0),
            sphere: SphereQuadrature::product(n_mu, n_phi),
        }
    }

    /// First, second and third moments in one sweep.
    pub fn moments(
        &self,
        state: &FluidState,
        c: LightSpeed,
    ) -> Result<(FourVector, Matrix4<f64>, Rank3)> {
        let ev = JuttnerEvaluator::new(state, c)?;
        let radius = truncation_radius(state);
        let mut m1 = [0.0; 4];
        let mut m2 = Matrix4::zeros();
        let mut m3 = Rank3::zeros();
        for &(x, wx) in &self.shells {
            let rad = x * radius;
            let wr = wx * radius * rad * rad;
            for (node, wo) in self.sphere.nodes.iter().zip(&self.sphere.weights) {
                let p = node * rad;
                let p0 = (c.0 * c.0 + p.norm_squared()).sqrt();
                let w = wr * wo * ev.eval(p) / p0;
                let p4 = [p0, p.x, p.y, p.z];
                for a in 0..4 {
                    let wa = w * p4[a];
                    m1[a] += wa;
                    for b in 0..4 {
                        let wab = wa * p4[b];
                        m2[(a, b)] += wab;
                        for g in 0..4 {
                            m3.0[a][b][g] += wab * p4[g];
                        }
                    }
                }
            }
        }
        Ok((FourVector(m1), m2, m3))
    }
}
