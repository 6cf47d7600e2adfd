//! Uniform periodic grids on `[-L, L)^n` with a unitary Fourier calculus.
//!
//! Samples live at the nodes `x_i = -L + i h`, `h = 2L / N`; node `x_i` is the
//! midpoint of the cell `[x_i - h/2, x_i + h/2)`, so midpoint quadrature uses the
//! equal weight `h^n`. The node `x = 0` sits at index `N / 2` on every axis.
//!
//! The Fourier transform approximates
//! `Ff(ξ) = (2π)^{-n/2} ∫ f(x) e^{-i x·ξ} dx` on the dual grid `ξ_k = k π / L`,
//! `k ∈ [-N/2, N/2)`. Frequency samples are stored in FFT order.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// A uniform periodic grid of `N^dim` nodes on `[-L, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 2, got {n}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        Ok(Self { dim, n, half_width })
    }

    pub fn one_d(n: usize, half_width: f64) -> Result<Self> {
        Self::new(1, n, half_width)
    }

    pub fn two_d(n: usize, half_width: f64) -> Result<Self> {
        Self::new(2, n, half_width)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Total number of samples, `N^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing `h = 2L / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total measure of the torus, `(2L)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    /// Dual grid spacing `π / L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_width
    }

    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / (2.0 * self.half_width)
    }

    /// Doubles the number of points per axis, keeping `L`.
    pub fn refined(&self) -> Self {
        Self { n: self.n * 2, ..*self }
    }

    /// Per-axis indices of a flat (row-major) sample index.
    pub fn axis_indices(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    pub fn flat_index(&self, axes: [usize; 2]) -> usize {
        if self.dim == 1 {
            axes[0]
        } else {
            axes[0] * self.n + axes[1]
        }
    }

    /// Coordinates of node `idx`; only the first `dim` entries are meaningful.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        let a = self.axis_indices(idx);
        let x = |i: usize| -self.half_width + i as f64 * h;
        if self.dim == 1 {
            [x(a[0]), 0.0]
        } else {
            [x(a[0]), x(a[1])]
        }
    }

    /// Signed integer frequency index of FFT slot `k`.
    pub fn signed_mode(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Frequency vector at flat FFT-ordered index `idx`.
    pub fn frequency(&self, idx: usize) -> [f64; 2] {
        let a = self.axis_indices(idx);
        let dxi = self.freq_spacing();
        if self.dim == 1 {
            [self.signed_mode(a[0]) as f64 * dxi, 0.0]
        } else {
            [self.signed_mode(a[0]) as f64 * dxi, self.signed_mode(a[1]) as f64 * dxi]
        }
    }

    pub fn frequency_norm(&self, idx: usize) -> f64 {
        let xi = self.frequency(idx);
        (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
    }

    /// `|ξ|` at every frequency sample, FFT order.
    pub fn frequency_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.frequency_norm(i)).collect()
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Unnormalized in-place DFT over every axis.
    pub(crate) fn dft(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.len());
        let n = self.n;
        let fft = plan(n, inverse);
        if self.dim == 1 {
            fft.process(data);
            return;
        }
        for row in data.chunks_exact_mut(n) {
            fft.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = data[r * n + c];
            }
            fft.process(&mut col);
            for r in 0..n {
                data[r * n + c] = col[r];
            }
        }
    }

    /// `(-1)^{k_1 + ... + k_dim}` for FFT slot `idx`; accounts for nodes starting at `-L`.
    fn parity(&self, idx: usize) -> f64 {
        let a = self.axis_indices(idx);
        let s = if self.dim == 1 { a[0] } else { a[0] + a[1] };
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Samples of a function on a [`Grid`], row-major over axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                point: grid.point(i)[..grid.dim()].to_vec(),
                value: samples[i].to_string(),
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Evaluates a real closure at every node. The closure receives `dim` coordinates.
    pub fn sample<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::sample_complex(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn sample_complex<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let d = grid.dim();
        let mut samples = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let p = grid.point(i);
            let v = f(&p[..d]);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite {
                    point: p[..d].to_vec(),
                    value: v.to_string(),
                });
            }
            samples.push(v);
        }
        Ok(Self { grid, samples })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn abs(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|z| z * c)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&x, &y)| x * a + y * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.axpby(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.axpby(1.0, other, -1.0)
    }

    /// Plain discrete L² norm `(h^n Σ |f_i|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Midpoint quadrature of the real part, `h^n Σ Re f_i`.
pub fn integrate(f: &GridFunction) -> f64 {
    integrate_complex(f).re
}

pub fn integrate_complex(f: &GridFunction) -> Complex64 {
    f.samples.iter().sum::<Complex64>() * f.grid.cell_volume()
}

/// Samples of a Fourier transform on the dual grid, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} frequency samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples a symbol `ψ(ξ)` on the dual grid of `grid`.
    pub fn from_symbol<F: Fn(&[f64]) -> f64>(grid: Grid, symbol: F) -> Self {
        let d = grid.dim();
        let values = (0..grid.len())
            .map(|i| Complex64::new(symbol(&grid.frequency(i)[..d]), 0.0))
            .collect();
        Self { grid, values }
    }

    /// Samples a radial symbol `ψ(|ξ|)`.
    pub fn from_radial<F: Fn(f64) -> f64>(grid: Grid, profile: F) -> Self {
        let values = (0..grid.len())
            .map(|i| Complex64::new(profile(grid.frequency_norm(i)), 0.0))
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `((π/L)^n Σ |F_k|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.freq_spacing().powi(self.grid.dim() as i32))
            .sqrt()
    }

    /// Pointwise product of two spectra on the same grid.
    pub fn mul(&self, other: &Spectrum) -> Result<Spectrum> {
        self.grid.check_same(&other.grid)?;
        Ok(Spectrum {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }
}

/// Unitary forward transform, `(2π)^{-n/2} h^n Σ_i f(x_i) e^{-i x_i·ξ}`.
pub fn fft_forward(f: &GridFunction) -> Spectrum {
    let grid = f.grid;
    let mut data = f.samples.clone();
    grid.dft(&mut data, false);
    let scale = (grid.spacing() / (2.0 * PI).sqrt()).powi(grid.dim() as i32);
    for (i, z) in data.iter_mut().enumerate() {
        *z *= scale * grid.parity(i);
    }
    Spectrum { grid, values: data }
}

/// Unitary inverse transform, `(2π)^{-n/2} (π/L)^n Σ_k F(ξ_k) e^{i x·ξ_k}`.
pub fn fft_inverse(spectrum: &Spectrum) -> GridFunction {
    let grid = spectrum.grid;
    let mut data: Vec<Complex64> = spectrum
        .values
        .iter()
        .enumerate()
        .map(|(i, &z)| z * grid.parity(i))
        .collect();
    grid.dft(&mut data, true);
    let scale = (grid.freq_spacing() / (2.0 * PI).sqrt()).powi(grid.dim() as i32);
    for z in data.iter_mut() {
        *z *= scale;
    }
    GridFunction { grid, samples: data }
}

/// Inverse transform that first checks the spectrum lives on `grid`.
pub fn fft_inverse_on(grid: &Grid, spectrum: &Spectrum) -> Result<GridFunction> {
    grid.check_same(&spectrum.grid)?;
    Ok(fft_inverse(spectrum))
}

/// Applies a symbol sampled on the dual grid: `F^{-1}[ψ F f]`.
///
/// The transform normalizations cancel, so this works on the raw DFT.
pub(crate) fn apply_symbol(f: &GridFunction, symbol: &[f64]) -> GridFunction {
    let grid = f.grid;
    let mut data = f.samples.clone();
    grid.dft(&mut data, false);
    let inv_n = 1.0 / grid.len() as f64;
    for (z, &s) in data.iter_mut().zip(symbol) {
        *z *= s * inv_n;
    }
    grid.dft(&mut data, true);
    GridFunction { grid, samples: data }
}

/// Raw (unnormalized) DFT coefficients; cheap path for repeated multipliers.
pub(crate) fn raw_dft(f: &GridFunction) -> Vec<Complex64> {
    let mut data = f.samples.clone();
    f.grid.dft(&mut data, false);
    data
}

/// Inverse of [`raw_dft`] after multiplying by `symbol`.
pub(crate) fn raw_synthesize(grid: Grid, coeffs: &[Complex64], symbol: &[f64]) -> GridFunction {
    let inv_n = 1.0 / grid.len() as f64;
    let mut data: Vec<Complex64> = coeffs.iter().zip(symbol).map(|(&z, &s)| z * (s * inv_n)).collect();
    grid.dft(&mut data, true);
    GridFunction { grid, samples: data }
}

pub(crate) fn raw_synthesize_complex(grid: Grid, coeffs: &[Complex64]) -> GridFunction {
    let inv_n = 1.0 / grid.len() as f64;
    let mut data: Vec<Complex64> = coeffs.iter().map(|&z| z * inv_n).collect();
    grid.dft(&mut data, true);
    GridFunction { grid, samples: data }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fn(grid: Grid, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = (0..grid.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        GridFunction::new(grid, s).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(3, 16, 1.0).is_err());
        assert!(Grid::new(1, 12, 1.0).is_err());
        assert!(Grid::new(1, 16, 0.0).is_err());
        let g = Grid::one_d(512, 8.0).unwrap();
        assert_eq!(g.spacing() * 512.0, 16.0);
        assert!((g.nyquist() - PI * 512.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn sample_basics() {
        let g = Grid::one_d(64, 4.0).unwrap();
        let z = GridFunction::sample(g, |_| 0.0).unwrap();
        assert!(z.samples().iter().all(|v| v.norm() == 0.0));

        let h = g.spacing();
        let ind = GridFunction::sample(g, |x| if x[0] >= 0.0 && x[0] < h { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(ind.samples().iter().filter(|v| v.norm() > 0.0).count(), 1);

        let err = GridFunction::sample(g, |x| if x[0] == 0.0 { f64::NAN } else { 1.0 });
        match err {
            Err(Error::NonFinite { point, .. }) => assert_eq!(point, vec![0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gaussian_is_symmetric_and_integrates_to_one() {
        let g = Grid::one_d(512, 8.0).unwrap();
        let f = GridFunction::sample(g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let n = g.points_per_axis();
        for i in 1..n {
            let a = f.samples()[i].re;
            let b = f.samples()[n - i].re;
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
        }
        assert!((integrate(&f) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn integrate_indicator_and_zero() {
        let g = Grid::two_d(32, 2.0).unwrap();
        let f = GridFunction::sample(g, |x| {
            if (0.0..0.5).contains(&x[0]) && (0.0..0.25).contains(&x[1]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let m = f.samples().iter().filter(|v| v.re > 0.0).count() as f64;
        assert_eq!(integrate(&f), m * g.cell_volume());
        assert!((integrate(&f) - 0.125).abs() < 1e-14);
        assert_eq!(integrate(&GridFunction::zeros(g)), 0.0);
    }

    #[test]
    fn quadrature_is_linear() {
        let g = Grid::one_d(128, 3.0).unwrap();
        let f = random_fn(g, 1);
        let h = random_fn(g, 2);
        let lhs = integrate(&f.axpby(2.5, &h, -0.75).unwrap());
        let rhs = 2.5 * integrate(&f) - 0.75 * integrate(&h);
        assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn fft_roundtrip_and_parseval() {
        for g in [Grid::one_d(256, 5.0).unwrap(), Grid::two_d(32, 3.0).unwrap()] {
            let f = random_fn(g, 3);
            let back = fft_inverse(&fft_forward(&f));
            let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-12, "roundtrip error {err}");
            let s = fft_forward(&f);
            assert!((s.l2_norm() - f.l2_norm()).abs() <= 1e-10 * f.l2_norm());
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = Grid::one_d(512, 10.0).unwrap();
        let f = GridFunction::sample(g, |x| (-x[0] * x[0] / 2.0).exp()).unwrap();
        let s = fft_forward(&f);
        for (i, v) in s.values().iter().enumerate() {
            let xi = g.frequency(i)[0];
            if xi.abs() < 0.5 * g.nyquist() {
                assert!((v - Complex64::new((-xi * xi / 2.0).exp(), 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn real_even_has_real_transform() {
        let g = Grid::two_d(64, 4.0).unwrap();
        let f = GridFunction::sample(g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp()).unwrap();
        let s = fft_forward(&f);
        let imag = s.values().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(imag < 1e-10 * f.l2_norm());
    }

    #[test]
    fn shift_becomes_modulation() {
        let g = Grid::two_d(32, 2.0).unwrap();
        let f = random_fn(g, 9);
        let n = g.points_per_axis();
        let (m0, m1) = (5usize, 3usize);
        let shifted: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let a = g.axis_indices(i);
                f.samples()[g.flat_index([(a[0] + n - m0) % n, (a[1] + n - m1) % n])]
            })
            .collect();
        let shifted = GridFunction::new(g, shifted).unwrap();
        let z = [m0 as f64 * g.spacing(), m1 as f64 * g.spacing()];
        let sf = fft_forward(&f);
        let ss = fft_forward(&shifted);
        for i in 0..g.len() {
            let xi = g.frequency(i);
            let phase = Complex64::from_polar(1.0, -(z[0] * xi[0] + z[1] * xi[1]));
            assert!((ss.values()[i] - phase * sf.values()[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let a = Grid::one_d(64, 1.0).unwrap();
        let b = Grid::one_d(64, 2.0).unwrap();
        let s = fft_forward(&GridFunction::zeros(a));
        assert!(matches!(fft_inverse_on(&b, &s), Err(Error::GridMismatch(_))));
    }
}
