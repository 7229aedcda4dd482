//! Discrete field storage and spectral operators: periodic 1D grids for the
//! fluid solvers and the N³ periodic torus for the curl-div and remainder
//! machinery. All spectral derivatives are exact on band-limited data.

use crate::error::{Error, Result};
use ndarray::Array3;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Uniform periodic 1D grid of `n` cells on `[0, length)`.
#[derive(Debug, Clone, Copy)]
pub struct Grid1D {
    pub n: usize,
    pub length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::Domain("grid needs at least 8 cells".into()));
        }
        if !(length > 0.0) {
            return Err(Error::Domain("domain length must be positive".into()));
        }
        Ok(Grid1D { n, length })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n).map(|i| (i as f64 + 0.5) * dx).collect()
    }
}

/// Spectral workhorse on a [`Grid1D`].
pub struct Spectral1D {
    pub grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral1D {
    pub fn new(grid: Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Spectral1D {
            grid,
            forward: planner.plan_fft_forward(grid.n),
            inverse: planner.plan_fft_inverse(grid.n),
        }
    }

    fn to_modes(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn to_values(&self, mut modes: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut modes);
        let scale = 1.0 / self.grid.n as f64;
        modes.iter().map(|z| z.re * scale).collect()
    }

    fn wavenumber(&self, idx: usize) -> f64 {
        let n = self.grid.n;
        let k = if idx <= n / 2 {
            idx as isize
        } else {
            idx as isize - n as isize
        };
        2.0 * std::f64::consts::PI / self.grid.length * k as f64
    }

    /// Spectral derivative (Nyquist mode zeroed).
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let mut modes = self.to_modes(f);
        for (idx, m) in modes.iter_mut().enumerate() {
            if idx == n / 2 {
                *m = Complex64::new(0.0, 0.0);
            } else {
                *m *= Complex64::new(0.0, self.wavenumber(idx));
            }
        }
        self.to_values(modes)
    }

    /// Solves `∂_x E = rhs` with the mean-zero gauge. Errors if the rhs has
    /// a mean beyond `tol` (non-neutral data has no periodic antiderivative).
    pub fn antiderivative_mean_zero(&self, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
        let mut modes = self.to_modes(rhs);
        let mean = modes[0].re / self.grid.n as f64;
        if mean.abs() > tol {
            return Err(Error::Gauge(format!(
                "periodic antiderivative needs zero-mean rhs; mean = {mean:e}"
            )));
        }
        modes[0] = Complex64::new(0.0, 0.0);
        let n = self.grid.n;
        for idx in 1..n {
            if idx == n / 2 {
                modes[idx] = Complex64::new(0.0, 0.0);
            } else {
                modes[idx] /= Complex64::new(0.0, self.wavenumber(idx));
            }
        }
        Ok(self.to_values(modes))
    }

    /// Solves `Δφ = rhs` with the mean-zero gauge (same neutrality proviso).
    pub fn solve_poisson(&self, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
        let mut modes = self.to_modes(rhs);
        let mean = modes[0].re / self.grid.n as f64;
        if mean.abs() > tol {
            return Err(Error::Gauge(format!(
                "periodic Poisson needs zero-mean rhs; mean = {mean:e}"
            )));
        }
        modes[0] = Complex64::new(0.0, 0.0);
        let n = self.grid.n;
        for idx in 1..n {
            let k = self.wavenumber(idx);
            if idx == n / 2 || k == 0.0 {
                modes[idx] = Complex64::new(0.0, 0.0);
            } else {
                modes[idx] /= -k * k;
            }
        }
        Ok(self.to_values(modes))
    }
}

/// Whole-line Poisson on a truncated interval by the 1D Green's function
/// `G(x, y) = |x - y|/2` (decay gauge; O(N²), for cross-checks).
pub fn poisson_greens_1d(rhs: &[f64], dx: f64) -> Vec<f64> {
    let n = rhs.len();
    let mut phi = vec![0.0; n];
    for (i, slot) in phi.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &r) in rhs.iter().enumerate() {
            acc += 0.5 * (i as isize - j as isize).unsigned_abs() as f64 * dx * r;
        }
        *slot = acc * dx;
    }
    phi
}

/// N³ periodic torus `[0, 2π)³` (integer wavenumbers).
#[derive(Debug, Clone, Copy)]
pub struct Grid3Periodic {
    pub n: usize,
}

pub type Field3 = Array3<f64>;
pub type VecField3 = [Array3<f64>; 3];

impl Grid3Periodic {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::Domain("torus grid needs at least 8 nodes".into()));
        }
        Ok(Grid3Periodic { n })
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / self.n as f64)
            .collect()
    }

    pub fn field<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> Field3 {
        let xs = self.coords();
        Array3::from_shape_fn((self.n, self.n, self.n), |(i, j, k)| f(xs[i], xs[j], xs[k]))
    }

    pub fn vector_field<F: Fn(f64, f64, f64) -> [f64; 3]>(&self, f: F) -> VecField3 {
        let xs = self.coords();
        let build = |comp: usize| {
            Array3::from_shape_fn((self.n, self.n, self.n), |(i, j, k)| {
                f(xs[i], xs[j], xs[k])[comp]
            })
        };
        [build(0), build(1), build(2)]
    }
}

type Modes3 = Array3<Complex64>;

/// Spectral operators on the torus.
pub struct Spectral3 {
    pub grid: Grid3Periodic,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral3 {
    pub fn new(grid: Grid3Periodic) -> Self {
        let mut planner = FftPlanner::new();
        Spectral3 {
            grid,
            forward: planner.plan_fft_forward(grid.n),
            inverse: planner.plan_fft_inverse(grid.n),
        }
    }

    fn wavenumber(&self, idx: usize) -> f64 {
        let n = self.grid.n;
        if idx <= n / 2 {
            idx as f64
        } else {
            idx as f64 - n as f64
        }
    }

    fn fft_axis(&self, data: &mut Modes3, axis: usize, inverse: bool) {
        let n = self.grid.n;
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                for (k, slot) in line.iter_mut().enumerate() {
                    let idx = match axis {
                        0 => (k, i, j),
                        1 => (i, k, j),
                        _ => (i, j, k),
                    };
                    *slot = data[idx];
                }
                plan.process(&mut line);
                for (k, slot) in line.iter().enumerate() {
                    let idx = match axis {
                        0 => (k, i, j),
                        1 => (i, k, j),
                        _ => (i, j, k),
                    };
                    data[idx] = *slot;
                }
            }
        }
    }

    pub fn forward(&self, f: &Field3) -> Modes3 {
        let mut data = f.mapv(|v| Complex64::new(v, 0.0));
        for axis in 0..3 {
            self.fft_axis(&mut data, axis, false);
        }
        data
    }

    pub fn inverse(&self, modes: &Modes3) -> Field3 {
        let mut data = modes.clone();
        for axis in 0..3 {
            self.fft_axis(&mut data, axis, true);
        }
        let scale = 1.0 / (self.grid.n as f64).powi(3);
        data.mapv(|z| z.re * scale)
    }

    fn k_vec(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.wavenumber(i), self.wavenumber(j), self.wavenumber(k)]
    }

    fn is_nyquist(&self, i: usize, j: usize, k: usize) -> bool {
        let h = self.grid.n / 2;
        i == h || j == h || k == h
    }

    pub fn gradient(&self, f: &Field3) -> VecField3 {
        let modes = self.forward(f);
        let build = |comp: usize| {
            let mut m = modes.clone();
            for ((i, j, k), v) in m.indexed_iter_mut() {
                if self.is_nyquist(i, j, k) {
                    *v = Complex64::new(0.0, 0.0);
                    continue;
                }
                let kv = self.k_vec(i, j, k);
                *v *= Complex64::new(0.0, kv[comp]);
            }
            self.inverse(&m)
        };
        [build(0), build(1), build(2)]
    }

    pub fn divergence(&self, f: &VecField3) -> Field3 {
        let n = self.grid.n;
        let mut acc = Array3::from_elem((n, n, n), Complex64::new(0.0, 0.0));
        for (comp, fc) in f.iter().enumerate() {
            let modes = self.forward(fc);
            for ((i, j, k), v) in modes.indexed_iter() {
                if self.is_nyquist(i, j, k) {
                    continue;
                }
                let kv = self.k_vec(i, j, k);
                acc[(i, j, k)] += v * Complex64::new(0.0, kv[comp]);
            }
        }
        self.inverse(&acc)
    }

    pub fn curl(&self, f: &VecField3) -> VecField3 {
        let n = self.grid.n;
        let modes: Vec<Modes3> = f.iter().map(|fc| self.forward(fc)).collect();
        let mut out = [
            Array3::from_elem((n, n, n), Complex64::new(0.0, 0.0)),
            Array3::from_elem((n, n, n), Complex64::new(0.0, 0.0)),
            Array3::from_elem((n, n, n), Complex64::new(0.0, 0.0)),
        ];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.is_nyquist(i, j, k) {
                        continue;
                    }
                    let kv = self.k_vec(i, j, k);
                    let f0 = modes[0][(i, j, k)];
                    let f1 = modes[1][(i, j, k)];
                    let f2 = modes[2][(i, j, k)];
                    let ik = |a: f64, z: Complex64| Complex64::new(0.0, a) * z;
                    out[0][(i, j, k)] = ik(kv[1], f2) - ik(kv[2], f1);
                    out[1][(i, j, k)] = ik(kv[2], f0) - ik(kv[0], f2);
                    out[2][(i, j, k)] = ik(kv[0], f1) - ik(kv[1], f0);
                }
            }
        }
        [
            self.inverse(&out[0]),
            self.inverse(&out[1]),
            self.inverse(&out[2]),
        ]
    }

    /// Solves `Δφ = rhs` (mean-zero gauge); errors on non-neutral rhs.
    pub fn inv_laplacian(&self, rhs: &Field3, tol: f64) -> Result<Field3> {
        let n = self.grid.n;
        let mut modes = self.forward(rhs);
        let mean = modes[(0, 0, 0)].re / (n as f64).powi(3);
        if mean.abs() > tol {
            return Err(Error::Gauge(format!(
                "torus Poisson needs zero-mean rhs; mean = {mean:e}"
            )));
        }
        for ((i, j, k), v) in modes.indexed_iter_mut() {
            let kv = self.k_vec(i, j, k);
            let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
            if k2 == 0.0 {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v /= -k2;
            }
        }
        Ok(self.inverse(&modes))
    }

    /// Leray projection onto divergence-free fields: `P v = v - ∇Δ⁻¹ div v`.
    pub fn div_free_projection(&self, f: &VecField3) -> VecField3 {
        let n = self.grid.n;
        let modes: Vec<Modes3> = f.iter().map(|fc| self.forward(fc)).collect();
        let mut out = modes.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let kv = self.k_vec(i, j, k);
                    let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
                    if k2 == 0.0 {
                        continue;
                    }
                    let kdotf = Complex64::new(kv[0], 0.0) * modes[0][(i, j, k)]
                        + Complex64::new(kv[1], 0.0) * modes[1][(i, j, k)]
                        + Complex64::new(kv[2], 0.0) * modes[2][(i, j, k)];
                    for comp in 0..3 {
                        out[comp][(i, j, k)] -= Complex64::new(kv[comp] / k2, 0.0) * kdotf;
                    }
                }
            }
        }
        [
            self.inverse(&out[0]),
            self.inverse(&out[1]),
            self.inverse(&out[2]),
        ]
    }
}

pub fn max_abs(f: &Field3) -> f64 {
    f.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn max_abs_vec(f: &VecField3) -> f64 {
    f.iter().map(max_abs).fold(0.0, f64::max)
}

/// L² inner product of two vector fields by the (spectrally exact)
/// node sum on the torus.
pub fn inner_product_vec(a: &VecField3, b: &VecField3, n: usize) -> f64 {
    let dv = (2.0 * std::f64::consts::PI / n as f64).powi(3);
    let mut acc = 0.0;
    for comp in 0..3 {
        for (x, y) in a[comp].iter().zip(b[comp].iter()) {
            acc += x * y;
        }
    }
    acc * dv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivative_1d() {
        let grid = Grid1D::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let sp = Spectral1D::new(grid);
        let xs = grid.centers();
        let f: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
        let df = sp.derivative(&f);
        for (x, d) in xs.iter().zip(&df) {
            assert!((d - 3.0 * (3.0 * x).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn poisson_1d_single_mode() {
        // Δφ = 4π(ρ̄ - ρ) with ρ - ρ̄ = ε cos x gives φ = 4πε cos x.
        let grid = Grid1D::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let sp = Spectral1D::new(grid);
        let eps = 0.3;
        let xs = grid.centers();
        let rhs: Vec<f64> = xs
            .iter()
            .map(|x| -4.0 * std::f64::consts::PI * eps * x.cos())
            .collect();
        let phi = sp.solve_poisson(&rhs, 1e-12).unwrap();
        for (x, p) in xs.iter().zip(&phi) {
            assert!(
                (p - 4.0 * std::f64::consts::PI * eps * x.cos()).abs() < 1e-10,
                "phi({x}) = {p}"
            );
        }
        let lap = sp.derivative(&sp.derivative(&phi));
        for (l, r) in lap.iter().zip(&rhs) {
            assert!((l - r).abs() < 1e-10);
        }
        let zero = sp.solve_poisson(&vec![0.0; grid.n], 1e-12).unwrap();
        assert!(zero.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn poisson_greens_matches_second_derivative() {
        let n = 400;
        let dx = 0.05;
        // compactly supported neutral source
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                let x = (i as f64 - n as f64 / 2.0) * dx;
                if x.abs() < 3.0 {
                    (std::f64::consts::PI * x / 3.0).cos() * x.signum()
                } else {
                    0.0
                }
            })
            .collect();
        let phi = poisson_greens_1d(&rhs, dx);
        for i in n / 2 - 40..n / 2 + 40 {
            let lap = (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) / (dx * dx);
            assert!((lap - rhs[i]).abs() < 2e-3, "at {i}: {lap} vs {}", rhs[i]);
        }
    }

    #[test]
    fn gauge_error_on_non_neutral_data() {
        let grid = Grid1D::new(32, 1.0).unwrap();
        let sp = Spectral1D::new(grid);
        assert!(sp.solve_poisson(&vec![1.0; 32], 1e-12).is_err());
    }

    #[test]
    fn torus_operators_on_plane_waves() {
        let grid = Grid3Periodic::new(16).unwrap();
        let sp = Spectral3::new(grid);
        let f = grid.field(|x, y, z| x.sin() * (2.0 * y).cos() + z.sin());
        let grad = sp.gradient(&f);
        let expect = grid.vector_field(|x, y, z| {
            [
                x.cos() * (2.0 * y).cos(),
                -2.0 * x.sin() * (2.0 * y).sin(),
                z.cos(),
            ]
        });
        for comp in 0..3 {
            for (a, b) in grad[comp].iter().zip(expect[comp].iter()) {
                assert!((a - b).abs() < 1e-11);
            }
        }
        // div ∘ curl = 0 and curl ∘ grad = 0 at spectral exactness
        let v = grid.vector_field(|x, y, z| [y.sin() * z.cos(), x.cos(), (x + z).sin()]);
        let curl_v = sp.curl(&v);
        assert!(max_abs(&sp.divergence(&curl_v)) < 1e-11);
        let curl_grad = sp.curl(&grad);
        assert!(max_abs_vec(&curl_grad) < 1e-11);
    }

    #[test]
    fn torus_poisson_and_projection() {
        let grid = Grid3Periodic::new(16).unwrap();
        let sp = Spectral3::new(grid);
        let rhs = grid.field(|x, y, _| (x + 2.0 * y).sin());
        let phi = sp.inv_laplacian(&rhs, 1e-12).unwrap();
        // the single mode (1,2,0) has k² = 5
        for (p, r) in phi.iter().zip(rhs.iter()) {
            assert!((p * (-5.0) - r).abs() < 1e-11);
        }
        let grad = sp.gradient(&rhs);
        let proj = sp.div_free_projection(&grad);
        assert!(max_abs_vec(&proj) < 1e-11);
        let v = grid.vector_field(|x, _, z| [z.sin(), (2.0 * x).cos(), x.sin()]);
        let curl_v = sp.curl(&v);
        let proj2 = sp.div_free_projection(&curl_v);
        for comp in 0..3 {
            for (a, b) in proj2[comp].iter().zip(curl_v[comp].iter()) {
                assert!((a - b).abs() < 1e-11);
            }
        }
    }
}
