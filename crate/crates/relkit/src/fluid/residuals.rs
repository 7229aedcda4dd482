//! Remainder residuals of the c⁻¹ expansion: the defect fields left when
//! the two-term ansatz is inserted into the full system,
//!
//! `R_n = (1/c²) div(n₁u₁)`,
//! `R_u = (1/c²)(u₁·∇)u₁ + (1/c²) u₀×B₁ + (1/c³) u₁×B₁`,
//! `R_E = (1/c)∂_t E₁ - (4π/c)(n₁u₀ + n₀u₁) - (4π/c²) n₁u₁`,
//! `R_B = (1/c)∂_t B₁`,
//!
//! together with the structural identities `div R_E = -4π R_n`,
//! `div R_B = 0` and the `O(c⁻¹)` size of the whole quadruple.
//! (`B₀ ≡ 0` under the far-field gauge, so its terms are dropped.)

use crate::error::Result;
use crate::grid::{max_abs, max_abs_vec, Field3, Grid3Periodic, Spectral3, VecField3};
use crate::thermo::LightSpeed;

/// The expansion tier: order-0 and order-1 fields plus the time derivatives
/// of the first-order electromagnetic pair (manufactured analytically or
/// supplied by a solver).
pub struct ExpansionTier {
    pub n0: Field3,
    pub u0: VecField3,
    pub n1: Field3,
    pub u1: VecField3,
    pub e1: VecField3,
    pub b1: VecField3,
    pub dt_e1: VecField3,
    pub dt_b1: VecField3,
}

impl ExpansionTier {
    /// Reconstruction at order one: `n_e ≈ n₀ + n₁/c`, `u_e ≈ u₀ + u₁/c`
    /// (the remainders are what [`remainder_residuals`] measures).
    pub fn reconstruct_density(&self, c: LightSpeed) -> Field3 {
        &self.n0 + &(&self.n1 / c.0)
    }
}

pub struct RemainderResiduals {
    pub r_n: Field3,
    pub r_u: VecField3,
    pub r_e: VecField3,
    pub r_b: VecField3,
    /// `‖div R_E + 4π R_n‖∞` (spectral derivatives).
    pub gauss_identity_residual: f64,
    /// `‖div R_B‖∞`.
    pub div_rb_max: f64,
    /// max over the four residual fields of their sup norms.
    pub sup_norm: f64,
}

fn cross(a: &VecField3, b: &VecField3) -> VecField3 {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

pub fn remainder_residuals(
    tier: &ExpansionTier,
    grid: Grid3Periodic,
    c: LightSpeed,
) -> Result<RemainderResiduals> {
    let sp = Spectral3::new(grid);
    let c1 = 1.0 / c.0;
    let c2 = c1 * c1;
    let c3 = c2 * c1;
    let four_pi = 4.0 * std::f64::consts::PI;

    let n1u1: VecField3 = [
        &tier.n1 * &tier.u1[0],
        &tier.n1 * &tier.u1[1],
        &tier.n1 * &tier.u1[2],
    ];
    let r_n = sp.divergence(&n1u1).mapv(|v| v * c2);

    // (u₁·∇)u₁
    let mut advect: VecField3 = [
        Field3::zeros((grid.n, grid.n, grid.n)),
        Field3::zeros((grid.n, grid.n, grid.n)),
        Field3::zeros((grid.n, grid.n, grid.n)),
    ];
    for comp in 0..3 {
        let grad = sp.gradient(&tier.u1[comp]);
        let mut acc = Field3::zeros((grid.n, grid.n, grid.n));
        for k in 0..3 {
            acc = &acc + &(&tier.u1[k] * &grad[k]);
        }
        advect[comp] = acc;
    }
    let u0xb1 = cross(&tier.u0, &tier.b1);
    let u1xb1 = cross(&tier.u1, &tier.b1);
    let r_u: VecField3 = [
        (&advect[0] * c2) + &(&u0xb1[0] * c2) + &(&u1xb1[0] * c3),
        (&advect[1] * c2) + &(&u0xb1[1] * c2) + &(&u1xb1[1] * c3),
        (&advect[2] * c2) + &(&u0xb1[2] * c2) + &(&u1xb1[2] * c3),
    ];

    let mut r_e: VecField3 = [
        Field3::zeros((grid.n, grid.n, grid.n)),
        Field3::zeros((grid.n, grid.n, grid.n)),
        Field3::zeros((grid.n, grid.n, grid.n)),
    ];
    for comp in 0..3 {
        let transport = &(&tier.n1 * &tier.u0[comp]) + &(&tier.n0 * &tier.u1[comp]);
        r_e[comp] = (&tier.dt_e1[comp] * c1)
            - &(transport * (four_pi * c1))
            - &(&n1u1[comp] * (four_pi * c2));
    }
    let r_b: VecField3 = [
        &tier.dt_b1[0] * c1,
        &tier.dt_b1[1] * c1,
        &tier.dt_b1[2] * c1,
    ];

    let div_re = sp.divergence(&r_e);
    let gauss = &div_re + &r_n.mapv(|v| four_pi * v);
    let gauss_identity_residual = max_abs(&gauss);
    let div_rb_max = max_abs(&sp.divergence(&r_b));
    let sup_norm = max_abs(&r_n)
        .max(max_abs_vec(&r_u))
        .max(max_abs_vec(&r_e))
        .max(max_abs_vec(&r_b));
    Ok(RemainderResiduals {
        r_n,
        r_u,
        r_e,
        r_b,
        gauss_identity_residual,
        div_rb_max,
        sup_norm,
    })
}

/// Manufactures a smooth consistent tier: irrotational `u₀`, mean-zero
/// `n₁`, `E₁` from its Gauss constraint, `∂_t E₁` from the linearized
/// continuity equation, and solenoidal `B₁`, `∂_t B₁` from vector
/// potentials. The structural identities then hold exactly at the spectral
/// level.
pub fn manufactured_tier(grid: Grid3Periodic, n_bar: f64) -> Result<ExpansionTier> {
    let sp = Spectral3::new(grid);
    let n0 = grid.field(|x, y, _| n_bar + 0.08 * x.cos() + 0.05 * (y + x).sin());
    let pot0 = grid.field(|x, y, z| 0.3 * x.sin() * y.sin() * z.sin() + 0.1 * (y + z).cos());
    let u0 = sp.gradient(&pot0);
    let n1 = grid.field(|x, y, z| 0.12 * (x + y).sin() + 0.07 * (z).cos() * (x).sin());
    let u1 = grid.vector_field(|x, y, z| {
        [
            0.09 * (y + z).sin(),
            0.05 * (x).cos() * (z).sin(),
            0.11 * (x + 2.0 * y).cos(),
        ]
    });
    let four_pi = 4.0 * std::f64::consts::PI;
    // E₁ = ∇ψ with Δψ = -4π n₁ (div E₁ = -4πn₁, curl-free)
    let psi = sp.inv_laplacian(&n1.mapv(|v| -four_pi * v), 1e-8)?;
    let e1 = sp.gradient(&psi);
    // ∂_t n₁ = -div(n₀u₁ + n₁u₀) drives ∂_t E₁ through the same constraint
    let transport: VecField3 = [
        &(&n0 * &u1[0]) + &(&n1 * &u0[0]),
        &(&n0 * &u1[1]) + &(&n1 * &u0[1]),
        &(&n0 * &u1[2]) + &(&n1 * &u0[2]),
    ];
    let dt_n1 = sp.divergence(&transport).mapv(|v| -v);
    let psi_t = sp.inv_laplacian(&dt_n1.mapv(|v| -four_pi * v), 1e-8)?;
    let dt_e1 = sp.gradient(&psi_t);
    // solenoidal B₁ and ∂_t B₁ from vector potentials
    let a1 = grid.vector_field(|x, y, z| {
        [0.2 * (y).sin() * z.cos(), 0.15 * (x + z).sin(), 0.1 * (x * 1.0 + y).cos()]
    });
    let b1 = sp.curl(&a1);
    let a2 = grid.vector_field(|x, y, z| {
        [0.05 * (2.0 * y).cos(), 0.12 * (x).sin() * (z).sin(), 0.08 * (y + z).sin()]
    });
    let dt_b1 = sp.curl(&a2);
    Ok(ExpansionTier {
        n0,
        u0,
        n1,
        u1,
        e1,
        b1,
        dt_e1,
        dt_b1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_first_order_gives_zero_residuals() {
        let grid = Grid3Periodic::new(8).unwrap();
        let zero_v = || grid.vector_field(|_, _, _| [0.0; 3]);
        let tier = ExpansionTier {
            n0: grid.field(|x, _, _| 1.0 + 0.1 * x.cos()),
            u0: grid.vector_field(|_, y, _| [y.sin(), 0.0, 0.0]),
            n1: grid.field(|_, _, _| 0.0),
            u1: zero_v(),
            e1: zero_v(),
            b1: zero_v(),
            dt_e1: zero_v(),
            dt_b1: zero_v(),
        };
        let res = remainder_residuals(&tier, grid, LightSpeed(10.0)).unwrap();
        assert!(res.sup_norm < 1e-15);
        assert!(res.gauss_identity_residual < 1e-15);
    }

    #[test]
    fn structural_identities_on_manufactured_tier() {
        let grid = Grid3Periodic::new(24).unwrap();
        let tier = manufactured_tier(grid, 1.0).unwrap();
        let res = remainder_residuals(&tier, grid, LightSpeed(20.0)).unwrap();
        assert!(
            res.gauss_identity_residual <= 1e-8,
            "div R_E + 4πR_n = {:e}",
            res.gauss_identity_residual
        );
        assert!(res.div_rb_max <= 1e-8, "div R_B = {:e}", res.div_rb_max);
        assert!(res.sup_norm > 0.0);
    }

    #[test]
    fn residual_norm_decays_like_one_over_c() {
        let grid = Grid3Periodic::new(16).unwrap();
        let tier = manufactured_tier(grid, 1.0).unwrap();
        let cs = [10.0, 20.0, 40.0, 80.0];
        let norms: Vec<f64> = cs
            .iter()
            .map(|&c| {
                remainder_residuals(&tier, grid, LightSpeed(c))
                    .unwrap()
                    .sup_norm
            })
            .collect();
        let lx: Vec<f64> = cs.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
        let n = lx.len() as f64;
        let sx: f64 = lx.iter().sum();
        let sy: f64 = ly.iter().sum();
        let sxx: f64 = lx.iter().map(|v| v * v).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(
            (-1.1..=-0.9).contains(&slope),
            "slope {slope}, norms {norms:?}"
        );
    }
}
