//! Heat equation `∂_t u − Δu = f` on the torus: an exact-in-time Duhamel solver
//! and the mixed time-space norms behind the maximal regularity estimates.
//!
//! Forcing terms are piecewise constant on the cells of a [`TimeGrid`]. On each
//! cell every Fourier mode solves a linear ODE with constant input, so
//!
//! `û(e_k) = e^{−w a} û(e_{k−1}) + (1 − e^{−w a}) / a · f̂_k`, `a = |ξ|²`, `w` the cell width,
//!
//! is exact and free of any stability restriction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::besov::{aggregate_blocks, besov_norm, BesovParams, LPFamily};
use crate::error::{Error, Result};
use crate::grid::{self, fft_inverse, Grid, GridFunction, Spectrum};
use crate::operators::{exp_kernel_integral_from, hl_maximal_at, hl_maximal_halfline};
use crate::spaces::{lebesgue_norm, Rearrangement, SpaceSpec};
use crate::timegrid::{HalfLineFunction, TimeGrid};

/// One spatial frame per time cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    time: TimeGrid,
    frames: Vec<GridFunction>,
}

impl SpaceTimeField {
    pub fn new(time: TimeGrid, frames: Vec<GridFunction>) -> Result<Self> {
        if frames.len() != time.cells() {
            return Err(Error::Parameter(format!(
                "expected {} frames, got {}",
                time.cells(),
                frames.len()
            )));
        }
        let first = frames.first().ok_or(Error::EmptyTimeGrid)?;
        for f in &frames[1..] {
            first.grid().check_same(f.grid())?;
        }
        Ok(Self { time, frames })
    }

    pub fn zeros(time: TimeGrid, grid: Grid) -> Self {
        let frames = vec![GridFunction::zeros(grid); time.cells()];
        Self { time, frames }
    }

    /// `p(t) g(x)` with `p` evaluated at cell midpoints.
    pub fn separable<P: Fn(f64) -> f64>(time: TimeGrid, profile: P, shape: &GridFunction) -> Self {
        let frames = (0..time.cells())
            .map(|k| shape.scale(profile(time.midpoint(k))))
            .collect();
        Self { time, frames }
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn grid(&self) -> &Grid {
        self.frames[0].grid()
    }

    pub fn frames(&self) -> &[GridFunction] {
        &self.frames
    }

    pub fn add(&self, other: &SpaceTimeField) -> Result<Self> {
        if self.time != other.time {
            return Err(Error::GridMismatch("fields on different time grids".into()));
        }
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.time.clone(), frames)
    }

    pub fn map_frames<F: Fn(&GridFunction) -> GridFunction>(&self, f: F) -> Self {
        Self {
            time: self.time.clone(),
            frames: self.frames.iter().map(f).collect(),
        }
    }

    /// `max_k ‖f_k‖₂`.
    pub fn max_l2(&self) -> f64 {
        self.frames.iter().map(|f| f.l2_norm()).fold(0.0, f64::max)
    }
}

/// Solver output in raw DFT coefficients; frame `k` belongs to the edge `e_{k+1}`.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    grid: Grid,
    time: TimeGrid,
    pub u: Vec<Vec<Complex64>>,
    pub lap_u: Vec<Vec<Complex64>>,
    pub dt_u: Vec<Vec<Complex64>>,
    /// Forcing coefficients, cell by cell.
    pub f: Vec<Vec<Complex64>>,
    /// `max_k ‖(u(e_k) − u(e_{k−1}))/w_k − ∂_t u(midpoint_k)‖₂`.
    pub residual: f64,
}

impl SpectralSolution {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    fn field(&self, coeffs: &[Vec<Complex64>]) -> SpaceTimeField {
        let frames = coeffs
            .par_iter()
            .map(|c| grid::raw_synthesize_complex(self.grid, c))
            .collect();
        SpaceTimeField {
            time: self.time.clone(),
            frames,
        }
    }
}

/// Physical-space solution fields at the sample times.
#[derive(Debug, Clone)]
pub struct DuhamelSolution {
    pub u: SpaceTimeField,
    pub dt_u: SpaceTimeField,
    pub lap_u: SpaceTimeField,
    pub residual: f64,
}

/// `L²` norm from raw DFT coefficients (Parseval).
fn coeff_l2(grid: &Grid, c: &[Complex64]) -> f64 {
    let s: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    (s * grid.cell_volume() / grid.len() as f64).sqrt()
}

/// `(1 − e^{−w a}) / a`, equal to `w` at `a = 0`.
fn phi1(a: f64, w: f64) -> f64 {
    if a == 0.0 {
        w
    } else {
        -(-a * w).exp_m1() / a
    }
}

pub fn duhamel_solve_spectral(u0: &GridFunction, f: &SpaceTimeField) -> Result<SpectralSolution> {
    u0.grid().check_same(f.grid())?;
    let grid = *u0.grid();
    let time = f.time().clone();
    let a: Vec<f64> = grid.frequency_norms().iter().map(|r| r * r).collect();
    let fc: Vec<Vec<Complex64>> = f.frames().par_iter().map(grid::raw_dft).collect();
    let mut prev = grid::raw_dft(u0);
    let cells = time.cells();
    let mut u = Vec::with_capacity(cells);
    let mut lap = Vec::with_capacity(cells);
    let mut dt = Vec::with_capacity(cells);
    let mut residual: f64 = 0.0;
    let mut diff = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, fk) in fc.iter().enumerate() {
        let w = time.width(k);
        let mut next = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let ai = a[i];
            let un = prev[i] * (-ai * w).exp() + fk[i] * phi1(ai, w);
            // exact ∂_t u at the cell midpoint against the difference quotient
            let um = prev[i] * (-ai * w / 2.0).exp() + fk[i] * phi1(ai, w / 2.0);
            let dmid = fk[i] - um * ai;
            diff[i] = (un - prev[i]) / w - dmid;
            next.push(un);
        }
        residual = residual.max(coeff_l2(&grid, &diff));
        let l: Vec<Complex64> = next.iter().zip(&a).map(|(z, ai)| -z * ai).collect();
        dt.push(l.iter().zip(fk).map(|(x, y)| x + y).collect());
        lap.push(l);
        u.push(next.clone());
        prev = next;
    }
    Ok(SpectralSolution {
        grid,
        time,
        u,
        lap_u: lap,
        dt_u: dt,
        f: fc,
        residual,
    })
}

/// Solves `∂_t u − Δu = f`, `u(0) = u0`, and returns `u`, `∂_t u`, `Δu` at the
/// right edge of every cell.
pub fn duhamel_solve(u0: &GridFunction, f: &SpaceTimeField) -> Result<DuhamelSolution> {
    let s = duhamel_solve_spectral(u0, f)?;
    Ok(DuhamelSolution {
        u: s.field(&s.u),
        dt_u: s.field(&s.dt_u),
        lap_u: s.field(&s.lap_u),
        residual: s.residual,
    })
}

/// Mixed time norm: `L^ρ` or Lorentz `L^{ρ,w}` on `(0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TimeNorm {
    Lebesgue {
        #[serde(with = "crate::spaces::exponent")]
        rho: f64,
    },
    Lorentz {
        #[serde(with = "crate::spaces::exponent")]
        rho: f64,
        #[serde(with = "crate::spaces::exponent")]
        w: f64,
    },
}

impl TimeNorm {
    pub fn rho(&self) -> f64 {
        match *self {
            TimeNorm::Lebesgue { rho } | TimeNorm::Lorentz { rho, .. } => rho,
        }
    }

    /// Second index; equals `ρ` for the Lebesgue norm.
    pub fn w(&self) -> f64 {
        match *self {
            TimeNorm::Lebesgue { rho } => rho,
            TimeNorm::Lorentz { w, .. } => w,
        }
    }

    pub fn eval(&self, values: &[f64], weights: &[f64]) -> Result<f64> {
        match *self {
            TimeNorm::Lebesgue { rho } => time_lebesgue_norm(values, weights, rho),
            TimeNorm::Lorentz { rho, w } => time_lorentz_norm(values, weights, rho, w),
        }
    }
}

/// `(Σ_k |v_k|^ρ w_k)^{1/ρ}`, or `max_k |v_k|` for `ρ = ∞`.
pub fn time_lebesgue_norm(values: &[f64], weights: &[f64], rho: f64) -> Result<f64> {
    if !(rho >= 1.0) || values.len() != weights.len() {
        return Err(Error::Parameter(format!(
            "invalid time norm L^{rho} over {} samples",
            values.len()
        )));
    }
    if rho.is_infinite() {
        return Ok(values.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    Ok(values
        .iter()
        .zip(weights)
        .map(|(v, w)| v.abs().powf(rho) * w)
        .sum::<f64>()
        .powf(1.0 / rho))
}

/// Lorentz norm of a weighted step series through its decreasing rearrangement.
///
/// Needs `1 < ρ < ∞` and `1 ≤ w ≤ ∞`, or `w = ρ ∈ [1, ∞]`.
pub fn time_lorentz_norm(values: &[f64], weights: &[f64], rho: f64, w: f64) -> Result<f64> {
    let diagonal = w == rho && rho >= 1.0;
    let general = rho > 1.0 && rho.is_finite() && w >= 1.0;
    if !(diagonal || general) || values.len() != weights.len() {
        return Err(Error::Parameter(format!("invalid time norm L^({rho},{w})")));
    }
    if rho.is_infinite() {
        return Ok(values.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    Ok(Rearrangement::from_weighted(values, weights).lorentz_norm(rho, w))
}

/// `‖φ_j(D) F(t)‖_X` for every frame and block.
fn block_series(frames: &[Vec<Complex64>], family: &LPFamily, spec: &SpaceSpec) -> Result<Vec<Vec<f64>>> {
    frames
        .par_iter()
        .map(|c| family.block_norms_of_coeffs(c, None, spec))
        .collect()
}

fn besov_series(blocks: &[Vec<f64>], j_min: i32, sigma: f64) -> Vec<f64> {
    blocks.iter().map(|b| aggregate_blocks(b, j_min, 0.0, sigma)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub rho: f64,
    pub w: f64,
    pub sigma: f64,
    pub spec: SpaceSpec,
    /// Smoothness `2 − 2/ρ` of the initial-data norm.
    pub s: f64,
    pub dt_norm: f64,
    pub lap_norm: f64,
    pub u0_norm: f64,
    pub f_norm: f64,
    pub ratio: f64,
    pub residual: f64,
    /// Time-norm infinities are maxima over the samples.
    pub approximate_sup: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn check_family(grid: &Grid, family: &LPFamily) -> Result<()> {
    grid.check_same(family.grid())
}

/// Block norms of `∂_t u`, `Δu`, `f` and `u0` for one solve; any
/// `(ρ, w, σ)` combination is then a cheap aggregation.
#[derive(Debug, Clone)]
pub struct RegularityProfile {
    spec: SpaceSpec,
    j_min: i32,
    weights: Vec<f64>,
    dt_blocks: Vec<Vec<f64>>,
    lap_blocks: Vec<Vec<f64>>,
    f_blocks: Vec<Vec<f64>>,
    u0_blocks: Vec<f64>,
    residual: f64,
    warnings: Vec<String>,
}

impl RegularityProfile {
    pub fn new(u0: &GridFunction, f: &SpaceTimeField, spec: &SpaceSpec, family: &LPFamily) -> Result<Self> {
        check_family(u0.grid(), family)?;
        spec.validate()?;
        let sol = duhamel_solve_spectral(u0, f)?;
        let u0_coeffs = grid::raw_dft(u0);
        let mut warnings = Vec::new();
        let leak = family.leakage_of_coeffs(&u0_coeffs);
        if leak > crate::besov::LEAKAGE_TOLERANCE {
            warnings.push(format!("initial data leaks {leak:.3e} outside the covered annulus"));
        }
        Ok(Self {
            spec: *spec,
            j_min: family.j_range().0,
            weights: sol.time().weights(),
            dt_blocks: block_series(&sol.dt_u, family, spec)?,
            lap_blocks: block_series(&sol.lap_u, family, spec)?,
            f_blocks: block_series(&sol.f, family, spec)?,
            u0_blocks: family.block_norms_of_coeffs(&u0_coeffs, None, spec)?,
            residual: sol.residual,
            warnings,
        })
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `(‖∂_t u‖ + ‖Δu‖) / (‖u0‖_{Ḃ^{2−2/ρ}_{X,w}} + ‖f‖)` with the time-space
    /// norms in `time_norm(Ḃ^0_{X,σ})`.
    pub fn report(&self, time_norm: TimeNorm, sigma: f64) -> Result<RegularityReport> {
        if !(sigma >= 1.0) {
            return Err(Error::Parameter(format!("σ must be at least 1, got {sigma}")));
        }
        let (rho, w) = (time_norm.rho(), time_norm.w());
        let norm = |blocks: &[Vec<f64>]| time_norm.eval(&besov_series(blocks, self.j_min, sigma), &self.weights);
        let dt_norm = norm(&self.dt_blocks)?;
        let lap_norm = norm(&self.lap_blocks)?;
        let f_norm = norm(&self.f_blocks)?;
        let s = if rho.is_infinite() { 2.0 } else { 2.0 - 2.0 / rho };
        let u0_norm = aggregate_blocks(&self.u0_blocks, self.j_min, s, w);
        let rhs = u0_norm + f_norm;
        if rhs == 0.0 {
            return Err(Error::ZeroDenominator("initial data and forcing both vanish".into()));
        }
        Ok(RegularityReport {
            rho,
            w,
            sigma,
            spec: self.spec,
            s,
            dt_norm,
            lap_norm,
            u0_norm,
            f_norm,
            ratio: (dt_norm + lap_norm) / rhs,
            residual: self.residual,
            approximate_sup: rho.is_infinite() || sigma.is_infinite(),
            warnings: self.warnings.clone(),
        })
    }
}

pub fn maxreg_ratio_with(
    u0: &GridFunction,
    f: &SpaceTimeField,
    time_norm: TimeNorm,
    sigma: f64,
    spec: &SpaceSpec,
    family: &LPFamily,
) -> Result<RegularityReport> {
    // validates (ρ, w) before any work
    time_norm.eval(&[], &[])?;
    RegularityProfile::new(u0, f, spec, family)?.report(time_norm, sigma)
}

/// Lorentz-in-time variant; `w = ρ` is the plain `L^ρ` estimate evaluated through
/// the rearrangement.
#[allow(clippy::too_many_arguments)]
pub fn maxreg_ratio(
    u0: &GridFunction,
    f: &SpaceTimeField,
    rho: f64,
    w: f64,
    sigma: f64,
    spec: &SpaceSpec,
    family: &LPFamily,
) -> Result<RegularityReport> {
    maxreg_ratio_with(u0, f, TimeNorm::Lorentz { rho, w }, sigma, spec, family)
}

/// `t ↦ ‖Δe^{tΔ}u0‖_{Ḃ^0_{X,1}}` at the sample times.
pub fn linear_term_series(u0: &GridFunction, spec: &SpaceSpec, family: &LPFamily, time: &TimeGrid) -> Result<Vec<f64>> {
    check_family(u0.grid(), family)?;
    let f = SpaceTimeField::zeros(time.clone(), *u0.grid());
    let sol = duhamel_solve_spectral(u0, &f)?;
    Ok(besov_series(
        &block_series(&sol.lap_u, family, spec)?,
        family.j_range().0,
        1.0,
    ))
}

/// `(‖Δe^{tΔ}u0‖_{L^τ(Ḃ^0_{X,1})}, ‖u0‖_{Ḃ^{2−2/τ}_{X,τ}})` on the given time grid.
pub fn linear_term_check(
    u0: &GridFunction,
    tau: f64,
    spec: &SpaceSpec,
    family: &LPFamily,
    time: &TimeGrid,
) -> Result<(f64, f64)> {
    let series = linear_term_series(u0, spec, family, time)?;
    linear_term_from_series(u0, &series, tau, spec, family, time)
}

/// [`linear_term_check`] reusing a series from [`linear_term_series`].
pub fn linear_term_from_series(
    u0: &GridFunction,
    series: &[f64],
    tau: f64,
    spec: &SpaceSpec,
    family: &LPFamily,
    time: &TimeGrid,
) -> Result<(f64, f64)> {
    let lhs = time_lebesgue_norm(series, &time.weights(), tau)?;
    let s = if tau.is_infinite() { 2.0 } else { 2.0 - 2.0 / tau };
    let rhs = besov_norm(u0, &BesovParams::new(s, tau, *spec)?, family)?;
    Ok((lhs, rhs))
}

/// `‖F^{-1}[Φ_j e^{−t|ξ|²}]‖_{L¹} / e^{−4^j t}`, evaluated from the symbol
/// `Φ_j(ξ) e^{−t(|ξ|² − 4^j)}` so that large `4^j t` does not underflow.
pub fn kernel_decay_ratio(family: &LPFamily, j: i32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("kernel time must be positive, got {t}")));
    }
    let big = family.big_phi_j(j)?;
    let grid = *family.grid();
    let shift = 4f64.powi(j);
    let values = big
        .iter()
        .zip(grid.frequency_norms())
        .map(|(p, r)| {
            Complex64::new(
                if *p == 0.0 {
                    0.0
                } else {
                    p * (-t * (r * r - shift)).exp()
                },
                0.0,
            )
        })
        .collect();
    let kernel = fft_inverse(&Spectrum::new(grid, values)?);
    Ok(lebesgue_norm(&kernel, 1.0))
}

/// `(measured, bound) = (‖F^{-1}[Φ_j e^{−t|ξ|²}]‖_{L¹}, e^{−4^j t})`.
pub fn kernel_decay_check(family: &LPFamily, j: i32, t: f64) -> Result<(f64, f64)> {
    let ratio = kernel_decay_ratio(family, j, t)?;
    let bound = (-4f64.powi(j) * t).exp();
    Ok((ratio * bound, bound))
}

/// `(∫_s^T 4^j e^{−4^j(t−s)} g(t) dt, Mg(s))` with `s = e_k` a cell edge.
pub fn duality_exp_check(j: i32, g: &HalfLineFunction, k: usize) -> Result<(f64, f64)> {
    let m = g.values().len();
    if k > m {
        return Err(Error::Parameter(format!("edge index {k} outside 0..={m}")));
    }
    let a = 4f64.powi(j);
    Ok((exp_kernel_integral_from(a, g, k), hl_maximal_at(g, k)))
}

/// `(‖(Σ_j (Mf_j)^σ)^{1/σ}‖_{L^ρ}, ‖(Σ_j f_j^σ)^{1/σ}‖_{L^ρ})` on the shared grid;
/// `Mf_j` is taken at the right edge of each cell.
pub fn fs_vector_check(fs: &[HalfLineFunction], rho: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(rho > 1.0 && rho.is_finite()) || !(sigma > 1.0) {
        return Err(Error::Parameter(format!(
            "need 1 < ρ < ∞ and 1 < σ ≤ ∞, got ρ={rho}, σ={sigma}"
        )));
    }
    let first = fs.first().ok_or_else(|| Error::Parameter("empty family".into()))?;
    let time = first.grid();
    if fs.iter().any(|f| f.grid() != time) {
        return Err(Error::GridMismatch("family on different time grids".into()));
    }
    let maxes: Vec<HalfLineFunction> = fs.par_iter().map(hl_maximal_halfline).collect();
    let inner = |rows: Vec<&[f64]>| -> Vec<f64> {
        (0..time.cells())
            .map(|k| {
                if sigma.is_infinite() {
                    rows.iter().map(|r| r[k]).fold(0.0, f64::max)
                } else {
                    rows.iter().map(|r| r[k].powf(sigma)).sum::<f64>().powf(1.0 / sigma)
                }
            })
            .collect()
    };
    let weights = time.weights();
    let lhs = time_lebesgue_norm(&inner(maxes.iter().map(|f| f.values()).collect()), &weights, rho)?;
    let rhs = time_lebesgue_norm(&inner(fs.iter().map(|f| f.values()).collect()), &weights, rho)?;
    Ok((lhs, rhs))
}

/// Outcome of the `ρ = 1` check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FubiniCheck {
    /// `‖Δ ∫_0^t e^{(t−s)Δ} f(s) ds‖_{L¹(Ḃ^0_{X,1})}`.
    pub lhs: f64,
    /// `‖f‖_{L¹(Ḃ^0_{X,1})}`.
    pub rhs: f64,
    /// Number of `(j, s)` tail integrals checked.
    pub tail_checks: usize,
    /// Tail integrals above one, or off their closed form `1 − e^{−4^j(T−s)}`.
    pub tail_violations: usize,
}

pub fn rho1_fubini_check(f: &SpaceTimeField, spec: &SpaceSpec, family: &LPFamily) -> Result<FubiniCheck> {
    check_family(f.grid(), family)?;
    let sol = duhamel_solve_spectral(&GridFunction::zeros(*f.grid()), f)?;
    let weights = sol.time().weights();
    let j_min = family.j_range().0;
    let lhs = time_lebesgue_norm(
        &besov_series(&block_series(&sol.lap_u, family, spec)?, j_min, 1.0),
        &weights,
        1.0,
    )?;
    let rhs = time_lebesgue_norm(
        &besov_series(&block_series(&sol.f, family, spec)?, j_min, 1.0),
        &weights,
        1.0,
    )?;

    let time = f.time();
    let one = HalfLineFunction::constant(time.clone(), 1.0)?;
    let t_max = time.t_max();
    let mut checks = 0;
    let mut violations = 0;
    for j in family.indices() {
        let a = 4f64.powi(j);
        for (k, &s) in time.edges()[..time.cells()].iter().enumerate() {
            let tail = exp_kernel_integral_from(a, &one, k);
            let closed = -(-a * (t_max - s)).exp_m1();
            checks += 1;
            if tail > 1.0 + 1e-12 || (tail - closed).abs() > 1e-12 {
                violations += 1;
            }
        }
    }
    Ok(FubiniCheck {
        lhs,
        rhs,
        tail_checks: checks,
        tail_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besov::build_lp_family;
    use crate::generate::{band_limited, single_band, Band};
    use crate::operators::{heat_semigroup, shift_cells};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::one_d(256, 8.0 * PI).unwrap()
    }

    fn l2() -> SpaceSpec {
        SpaceSpec::lebesgue(2.0).unwrap()
    }

    #[test]
    fn free_evolution_is_the_heat_semigroup() {
        let g = grid();
        let tg = TimeGrid::geometric(8.0, 64, 1e-3).unwrap();
        let u0 = band_limited(&g, Band::new(0.25, 8.0, 0.0).unwrap(), 1).unwrap();
        let sol = duhamel_solve(&u0, &SpaceTimeField::zeros(tg.clone(), g)).unwrap();
        for (k, t) in tg.times().iter().enumerate().step_by(9) {
            let exact = heat_semigroup(&u0, *t).unwrap();
            assert!(sol.u.frames()[k].sub(&exact).unwrap().max_abs() < 1e-10);
            assert!(sol.dt_u.frames()[k].sub(&sol.lap_u.frames()[k]).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn constant_single_mode_forcing_matches_closed_form() {
        let g = grid();
        let tg = TimeGrid::geometric(16.0, 128, 1e-4).unwrap();
        let xi = 12.0 * g.freq_spacing();
        let shape = GridFunction::sample(g, |x| (xi * x[0]).cos()).unwrap();
        let f = SpaceTimeField::separable(tg.clone(), |_| 1.0, &shape);
        let sol = duhamel_solve(&GridFunction::zeros(g), &f).unwrap();
        let a = xi * xi;
        for (k, t) in tg.times().iter().enumerate() {
            let expect = shape.scale(-(-t * a).exp_m1() / a);
            assert!(sol.u.frames()[k].sub(&expect).unwrap().max_abs() < 1e-10);
        }
        assert!(duhamel_solve(&GridFunction::zeros(Grid::one_d(64, 1.0).unwrap()), &f).is_err());
    }

    #[test]
    fn finite_difference_residual_is_small() {
        let g = grid();
        let tg = TimeGrid::standard();
        let profiles: [fn(f64) -> f64; 4] = [|_| 1.0, |t| (-t).exp(), |t| (-t / 8.0).exp(), |t| 1.0 / (1.0 + t)];
        for hi in [2.0, 4.0] {
            let shape = band_limited(&g, Band::new(0.25, hi, 0.0).unwrap(), 2).unwrap();
            for p in profiles {
                let f = SpaceTimeField::separable(tg.clone(), p, &shape);
                let sol = duhamel_solve(&GridFunction::zeros(g), &f).unwrap();
                assert!(sol.residual <= 1e-3 * f.max_l2(), "{} vs {}", sol.residual, f.max_l2());
            }
        }
    }

    #[test]
    fn time_norm_examples() {
        let w = [0.5, 1.5, 2.0];
        let chi = [1.0, 1.0, 0.0];
        assert!((time_lorentz_norm(&chi, &w, 2.0, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        for (rho, q) in [(2.0f64, 1.0f64), (3.0, 2.0), (1.5, 4.0)] {
            let expect = (rho / q).powf(1.0 / q) * 2f64.powf(1.0 / rho);
            assert!((time_lorentz_norm(&chi, &w, rho, q).unwrap() - expect).abs() < 1e-12);
        }
        let v = [3.0, 0.2, 1.1];
        let base = time_lorentz_norm(&v, &w, 3.0, 1.5).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| 2.5 * x).collect();
        assert!((time_lorentz_norm(&scaled, &w, 3.0, 1.5).unwrap() - 2.5 * base).abs() < 1e-12 * base);
        for rho in [1.0, 1.5, 2.0, 4.0] {
            let a = time_lorentz_norm(&v, &w, rho, rho).unwrap();
            let b = time_lebesgue_norm(&v, &w, rho).unwrap();
            assert!((a - b).abs() <= 1e-10 * b);
        }
        assert!(time_lorentz_norm(&v, &w, 1.0, 2.0).is_err());
        assert!(time_lorentz_norm(&v, &w, 2.0, 0.5).is_err());
        assert_eq!(time_lorentz_norm(&v, &w, f64::INFINITY, f64::INFINITY).unwrap(), 3.0);
    }

    #[test]
    fn maxreg_degenerate_and_linear_consistency() {
        let g = grid();
        let fam = build_lp_family(g, -3, 2).unwrap();
        let tg = TimeGrid::geometric(64.0, 128, 1e-4).unwrap();
        let zero = SpaceTimeField::zeros(tg.clone(), g);
        assert!(matches!(
            maxreg_ratio(&GridFunction::zeros(g), &zero, 2.0, 2.0, 1.0, &l2(), &fam),
            Err(Error::ZeroDenominator(_))
        ));
        let u0 = single_band(&g, 0).unwrap();
        let rep = maxreg_ratio(&u0, &zero, 2.0, 2.0, 1.0, &l2(), &fam).unwrap();
        let (lhs, rhs) = linear_term_check(&u0, 2.0, &l2(), &fam, &tg).unwrap();
        assert!((rep.ratio - 2.0 * lhs / rhs).abs() <= 1e-10 * rep.ratio);
        assert!(rep.ratio.is_finite());
    }

    #[test]
    fn linear_term_tau_one_is_the_mass_of_the_kernel() {
        // ∫_0^T |ξ|² e^{−t|ξ|²} dt = 1 − e^{−T|ξ|²} per mode
        let g = grid();
        let fam = build_lp_family(g, -3, 2).unwrap();
        let tg = TimeGrid::geometric(256.0, 2048, 1e-6).unwrap();
        let xi = 16.0 * g.freq_spacing();
        let u0 = GridFunction::sample(g, |x| (xi * x[0]).cos()).unwrap();
        let (lhs, rhs) = linear_term_check(&u0, 1.0, &l2(), &fam, &tg).unwrap();
        // single mode: every block norm is φ_j(ξ)‖u0‖₂ on both sides
        assert!((lhs / rhs - 1.0).abs() < 1e-2, "{}", lhs / rhs);
    }

    #[test]
    fn maxreg_is_translation_invariant() {
        let g = grid();
        let fam = build_lp_family(g, -3, 2).unwrap();
        let tg = TimeGrid::geometric(64.0, 64, 1e-3).unwrap();
        let band = Band::new(0.25, 12.0, 0.0).unwrap();
        let u0 = band_limited(&g, band, 3).unwrap();
        let f = SpaceTimeField::separable(tg, |t| (-t).exp(), &band_limited(&g, band, 4).unwrap());
        for spec in [l2(), SpaceSpec::morrey(2.0, 1.0).unwrap()] {
            let a = maxreg_ratio(&u0, &f, 3.0, 2.0, 2.0, &spec, &fam).unwrap();
            let moved = maxreg_ratio(
                &shift_cells(&u0, &[17]),
                &f.map_frames(|x| shift_cells(x, &[17])),
                3.0,
                2.0,
                2.0,
                &spec,
                &fam,
            )
            .unwrap();
            assert!((a.ratio - moved.ratio).abs() <= 1e-8 * a.ratio);
            let diag = maxreg_ratio(&u0, &f, 2.0, 2.0, 2.0, &spec, &fam).unwrap();
            let leb = maxreg_ratio_with(&u0, &f, TimeNorm::Lebesgue { rho: 2.0 }, 2.0, &spec, &fam).unwrap();
            assert!((diag.ratio - leb.ratio).abs() <= 1e-10 * leb.ratio);
        }
    }

    #[test]
    fn kernel_decay_examples() {
        let g = Grid::one_d(2048, 32.0 * PI).unwrap();
        let fam = build_lp_family(g, -4, 3).unwrap();
        // Φ only reaches 1 at |ξ| = 1.5, so the ratio decays in t rather than
        // staying within a fixed band
        let ratios: Vec<f64> = [0.25, 1.0, 4.0]
            .iter()
            .map(|t| kernel_decay_ratio(&fam, 0, *t).unwrap())
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        assert!(ratios[0] < 4.0);
        let (m, b) = kernel_decay_check(&fam, 0, 1e-4).unwrap();
        assert!(b > 0.999 && m.is_finite());
        assert!(kernel_decay_check(&fam, 9, 1.0).is_err());
    }

    #[test]
    fn duality_examples() {
        let tg = TimeGrid::geometric(32.0, 128, 1e-3).unwrap();
        let c = HalfLineFunction::constant(tg.clone(), 2.0).unwrap();
        for (j, k) in [(-2, 10), (0, 64), (3, 127)] {
            let (lhs, rhs) = duality_exp_check(j, &c, k).unwrap();
            let s = tg.edges()[k];
            let expect = 2.0 * -(-(4f64.powi(j)) * (32.0 - s)).exp_m1();
            assert!((lhs - expect).abs() < 1e-12);
            assert!((rhs - 2.0).abs() < 1e-12);
        }
        // mass near T, far from s = e_10
        let vals: Vec<f64> = (0..128).map(|i| if i > 120 { 1.0 } else { 0.0 }).collect();
        let far = HalfLineFunction::new(tg, vals).unwrap();
        let (lhs, rhs) = duality_exp_check(2, &far, 10).unwrap();
        assert!(lhs < 1e-12 && rhs > 0.0);
    }

    #[test]
    fn fs_vector_examples() {
        use crate::generate::random_step;
        use rand::SeedableRng;
        let tg = TimeGrid::geometric(16.0, 96, 1e-3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let f = random_step(&tg, &mut rng);
        let (l1, r1) = fs_vector_check(std::slice::from_ref(&f), 2.0, 2.0).unwrap();
        let (l8, r8) = fs_vector_check(&vec![f.clone(); 8], 2.0, 2.0).unwrap();
        assert!((l1 / r1 - l8 / r8).abs() < 1e-12);
        assert!(l1 >= r1);
        let fam: Vec<_> = (0..8).map(|_| random_step(&tg, &mut rng)).collect();
        for (rho, sigma) in [(2.0, 2.0), (3.0, 1.5), (2.0, f64::INFINITY)] {
            let (l, r) = fs_vector_check(&fam, rho, sigma).unwrap();
            assert!((l / r).is_finite() && l >= r * (1.0 - 1e-12));
        }
        assert!(fs_vector_check(&fam, 1.0, 2.0).is_err());
        assert!(fs_vector_check(&fam, 2.0, 1.0).is_err());
    }

    #[test]
    fn fubini_tail_and_truncation() {
        let g = grid();
        let fam = build_lp_family(g, -3, 2).unwrap();
        let shape = single_band(&g, 1).unwrap();
        let pulse = |t: f64| if (1.0..2.0).contains(&t) { 1.0 } else { 0.0 };
        let run = |t_max: f64| {
            let tg = TimeGrid::geometric(t_max, 256, 1e-4).unwrap();
            rho1_fubini_check(&SpaceTimeField::separable(tg, pulse, &shape), &l2(), &fam).unwrap()
        };
        let a = run(64.0);
        assert_eq!(a.tail_violations, 0);
        assert!(a.tail_checks > 0);
        assert!((a.lhs / a.rhs).is_finite());
        let b = run(128.0);
        assert!(((b.lhs / b.rhs) / (a.lhs / a.rhs) - 1.0).abs() < 0.02);
    }
}
