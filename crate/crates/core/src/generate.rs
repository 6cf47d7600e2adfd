//! Seeded test inputs: band-limited Gaussian fields, single-band dyadic
//! functions and random step functions in time.
//!
//! Random fields draw one complex normal coefficient per lattice frequency in the
//! annulus, in a fixed order that does not depend on `N`. Refining a grid with the
//! same `L` therefore samples the same trigonometric polynomial.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::timegrid::{HalfLineFunction, TimeGrid};

/// Frequency annulus `lo ≤ |ξ| ≤ hi` with amplitude weight `|ξ|^{-slope}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub slope: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64, slope: f64) -> Result<Self> {
        let b = Self { lo, hi, slope };
        if !(lo > 0.0 && hi >= lo && hi.is_finite() && slope.is_finite()) {
            return Err(Error::Parameter(format!("invalid frequency band {b:?}")));
        }
        Ok(b)
    }

    /// Integer modes (per axis) inside the annulus, in canonical order.
    fn modes(&self, grid: &Grid) -> Result<Vec<[i64; 2]>> {
        if self.hi > grid.nyquist() * (1.0 - 1e-12) {
            return Err(Error::Parameter(format!(
                "band upper edge {} reaches the Nyquist frequency {}",
                self.hi,
                grid.nyquist()
            )));
        }
        let dxi = grid.freq_spacing();
        let m = (self.hi / dxi + 1e-9).floor() as i64;
        let inside = |r: f64| r >= self.lo * (1.0 - 1e-12) && r <= self.hi * (1.0 + 1e-12);
        let mut out = Vec::new();
        if grid.dim() == 1 {
            for a in -m..=m {
                if inside(a.abs() as f64 * dxi) {
                    out.push([a, 0]);
                }
            }
        } else {
            for a in -m..=m {
                for b in -m..=m {
                    if inside(((a * a + b * b) as f64).sqrt() * dxi) {
                        out.push([a, b]);
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Parameter(format!("band {self:?} contains no lattice frequency")));
        }
        Ok(out)
    }
}

/// `Σ c_m e^{i m·x Δξ}` sampled on `grid`, given integer modes.
fn synthesize(grid: &Grid, terms: &[([i64; 2], Complex64)]) -> GridFunction {
    let n = grid.points_per_axis() as i64;
    let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
    for &(m, c) in terms {
        let slot = |k: i64| k.rem_euclid(n) as usize;
        // nodes start at -L and e^{-i m π} = (-1)^m
        let sign = if (m[0] + m[1]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let idx = if grid.dim() == 1 {
            slot(m[0])
        } else {
            grid.flat_index([slot(m[0]), slot(m[1])])
        };
        data[idx] += c * sign;
    }
    grid.dft(&mut data, true);
    GridFunction::from_parts_unchecked(*grid, data)
}

/// Real band-limited Gaussian field with unit `L²` norm.
pub fn band_limited(grid: &Grid, band: Band, seed: u64) -> Result<GridFunction> {
    let modes = band.modes(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dxi = grid.freq_spacing();
    let terms: Vec<_> = modes
        .into_iter()
        .map(|m| {
            let r = ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt() * dxi;
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            (m, Complex64::new(re, im) * r.powf(-band.slope))
        })
        .collect();
    let f = synthesize(grid, &terms).map(|z| Complex64::new(z.re, 0.0));
    normalize(f)
}

/// `|f|` for a band-limited field `f`; no longer band-limited.
pub fn band_limited_nonneg(grid: &Grid, band: Band, seed: u64) -> Result<GridFunction> {
    Ok(band_limited(grid, band, seed)?.map(|z| Complex64::new(z.norm(), 0.0)))
}

fn normalize(f: GridFunction) -> Result<GridFunction> {
    let n = f.l2_norm();
    if !(n > 0.0) {
        return Err(Error::ZeroDenominator("generated field vanishes".into()));
    }
    Ok(f.scale(1.0 / n))
}

/// Multipliers of `2^{j0}` used by [`single_band`].
pub const SINGLE_BAND_MULTIPLES: [f64; 3] = [2.0, 3.0, 4.0];
const SINGLE_BAND_AMPLITUDES: [f64; 3] = [1.0, 0.7, 0.5];
const SINGLE_BAND_PHASES: [f64; 3] = [0.3, 1.1, 2.0];

/// `Σ_c a_c cos(c 2^{j0} x_1 + θ_c)` over `c ∈ {2, 3, 4}`.
///
/// Fixed amplitudes and phases make the inputs for different `j0` exact
/// dilations of each other.
pub fn single_band(grid: &Grid, j0: i32) -> Result<GridFunction> {
    let base = 2f64.powi(j0);
    let dxi = grid.freq_spacing();
    let mut terms = Vec::new();
    for ((c, a), th) in SINGLE_BAND_MULTIPLES
        .iter()
        .zip(SINGLE_BAND_AMPLITUDES)
        .zip(SINGLE_BAND_PHASES)
    {
        let xi = c * base;
        let m = (xi / dxi).round();
        if (m * dxi - xi).abs() > 1e-9 * xi || xi >= grid.nyquist() {
            return Err(Error::Parameter(format!(
                "frequency {xi} is not a lattice frequency below Nyquist on {grid:?}"
            )));
        }
        let m = m as i64;
        let half = Complex64::from_polar(0.5 * a, th);
        terms.push(([m, 0], half));
        terms.push(([-m, 0], half.conj()));
    }
    Ok(synthesize(grid, &terms).map(|z| Complex64::new(z.re, 0.0)))
}

/// Non-negative random step function with occasional spikes.
pub fn random_step(grid: &TimeGrid, rng: &mut impl Rng) -> HalfLineFunction {
    let spike = rng.random_range(0.0..0.2);
    let values = (0..grid.cells())
        .map(|_| {
            let u: f64 = rng.random_range(0.0..1.0);
            if rng.random_bool(spike) {
                10.0 * u
            } else {
                u * u * u
            }
        })
        .collect();
    HalfLineFunction::new(grid.clone(), values).expect("finite non-negative values")
}

/// Smooth decaying time profile `(1 + b t) e^{-a t} cos(ω t)` sampled at cell
/// midpoints; the parameters come from `rng`.
pub fn time_profile(rng: &mut impl Rng) -> impl Fn(f64) -> f64 {
    let a = rng.random_range(0.05..1.0);
    let b = rng.random_range(0.0..2.0);
    let w = rng.random_range(0.0..PI);
    move |t: f64| (1.0 + b * t) * (-a * t).exp() * (w * t).cos()
}
