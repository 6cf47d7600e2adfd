//! Littlewood–Paley families and homogeneous Besov norms `Ḃ^s_{X,r}`.
//!
//! Profiles are radial and built from the smoothstep `3u² − 2u³`:
//!
//! * `φ`: 0 on `[0, 1.5]`, rises on `[1.5, 2]`, 1 on `[2, 4]`, falls on `[4, 8]`;
//! * `Φ`: 0 on `[0, 1]`, rises on `[1, 1.5]`, 1 on `[1.5, 8]`, falls on `[8, 12]`.
//!
//! So `χ_{B(4)∖B(2)} ≤ φ ≤ χ_{B(8)∖B(1)}`, `Φ` vanishes on `B(1)` and `Φ = 1` on
//! `supp φ`. Blocks use `φ_j(ξ) = φ(2^{-j}|ξ|)` for `j` in a finite range, which
//! also hides every frequency below `2^{j_min}` (the polynomial quotient).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, Grid, GridFunction};
use crate::spaces::{x_norm, SpaceSpec};

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Radial profile of `φ`.
pub fn phi(r: f64) -> f64 {
    if r <= 1.5 {
        0.0
    } else if r < 2.0 {
        smoothstep((r - 1.5) / 0.5)
    } else if r <= 4.0 {
        1.0
    } else if r < 8.0 {
        1.0 - smoothstep((r - 4.0) / 4.0)
    } else {
        0.0
    }
}

/// Radial profile of `Φ`.
pub fn big_phi(r: f64) -> f64 {
    if r <= 1.0 {
        0.0
    } else if r < 1.5 {
        smoothstep((r - 1.0) / 0.5)
    } else if r <= 8.0 {
        1.0
    } else if r < 12.0 {
        1.0 - smoothstep((r - 8.0) / 4.0)
    } else {
        0.0
    }
}

/// Counts from the pointwise legality scan of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Legality {
    pub sandwich_violations: usize,
    pub dominance_violations: usize,
    pub covering_violations: usize,
    pub covering_min: f64,
    pub covering_max: f64,
    /// Frequency samples inside the covered annulus.
    pub covered_samples: usize,
}

impl Legality {
    pub fn ok(&self) -> bool {
        self.sandwich_violations == 0 && self.dominance_violations == 0 && self.covering_violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct LPFamily {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    phi: Vec<Vec<f64>>,
    big_phi: Vec<Vec<f64>>,
    legality: Legality,
}

impl LPFamily {
    /// Family for `j_min ≤ j ≤ j_max`. The covered annulus
    /// `[2^{j_min+1}, 2^{j_max+2}]` must lie between the first nonzero lattice
    /// frequency and the Nyquist frequency.
    pub fn new(grid: Grid, j_min: i32, j_max: i32) -> Result<Self> {
        let range_err = |reason: String| Error::DyadicRange { j_min, j_max, reason };
        if j_min >= j_max {
            return Err(range_err("j_min must be below j_max".into()));
        }
        let lo = 2f64.powi(j_min + 1);
        let hi = 2f64.powi(j_max + 2);
        let dxi = grid.freq_spacing();
        let nyq = grid.nyquist();
        if lo < dxi * (1.0 - 1e-12) || hi > nyq * (1.0 + 1e-12) {
            let best_min = ((dxi * (1.0 - 1e-12)).log2().ceil() as i32) - 1;
            let best_max = ((nyq * (1.0 + 1e-12)).log2().floor() as i32) - 2;
            return Err(range_err(format!(
                "covered annulus [{lo}, {hi}] must lie in [{dxi}, {nyq}]; achievable range is [{best_min}, {best_max}]"
            )));
        }
        let norms = grid.frequency_norms();
        let eval = |prof: fn(f64) -> f64, j: i32| -> Vec<f64> {
            let s = 2f64.powi(-j);
            norms.iter().map(|r| prof(r * s)).collect()
        };
        let phi_j: Vec<Vec<f64>> = (j_min..=j_max).map(|j| eval(phi, j)).collect();
        let big_phi_j: Vec<Vec<f64>> = (j_min..=j_max).map(|j| eval(big_phi, j)).collect();
        let mut family = Self {
            grid,
            j_min,
            j_max,
            phi: phi_j,
            big_phi: big_phi_j,
            legality: Legality {
                sandwich_violations: 0,
                dominance_violations: 0,
                covering_violations: 0,
                covering_min: f64::INFINITY,
                covering_max: 0.0,
                covered_samples: 0,
            },
        };
        family.legality = family.scan(&norms);
        if !family.legality.ok() {
            return Err(range_err(format!("legality scan failed: {:?}", family.legality)));
        }
        Ok(family)
    }

    fn scan(&self, norms: &[f64]) -> Legality {
        let (lo, hi) = self.covered_annulus();
        let mut leg = self.legality.clone();
        for (i, &r) in norms.iter().enumerate() {
            let mut sum = 0.0;
            for (idx, j) in (self.j_min..=self.j_max).enumerate() {
                let eta = r * 2f64.powi(-j);
                let p = self.phi[idx][i];
                let big = self.big_phi[idx][i];
                let lower = if (2.0..=4.0).contains(&eta) { 1.0 } else { 0.0 };
                let upper = if eta > 1.0 && eta < 8.0 { 1.0 } else { 0.0 };
                if !(lower <= p && p <= upper) {
                    leg.sandwich_violations += 1;
                }
                if (eta <= 1.0 && big != 0.0) || (p > 0.0 && big != 1.0) {
                    leg.dominance_violations += 1;
                }
                sum += p;
            }
            if r >= lo && r <= hi {
                leg.covered_samples += 1;
                leg.covering_min = leg.covering_min.min(sum);
                leg.covering_max = leg.covering_max.max(sum);
                if !(1.0..=3.0).contains(&sum) {
                    leg.covering_violations += 1;
                }
            }
        }
        leg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// `[2^{j_min+1}, 2^{j_max+2}]`, where `1 ≤ Σ_j φ_j ≤ 3`.
    pub fn covered_annulus(&self) -> (f64, f64) {
        (2f64.powi(self.j_min + 1), 2f64.powi(self.j_max + 2))
    }

    pub fn legality(&self) -> &Legality {
        &self.legality
    }

    fn slot(&self, j: i32) -> Result<usize> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::DyadicRange {
                j_min: self.j_min,
                j_max: self.j_max,
                reason: format!("block index {j} outside the family"),
            });
        }
        Ok((j - self.j_min) as usize)
    }

    /// Sampled symbol `φ_j`.
    pub fn phi_j(&self, j: i32) -> Result<&[f64]> {
        Ok(&self.phi[self.slot(j)?])
    }

    /// Sampled symbol `Φ_j`.
    pub fn big_phi_j(&self, j: i32) -> Result<&[f64]> {
        Ok(&self.big_phi[self.slot(j)?])
    }

    /// Relative `L²` mass of `f` outside the covered annulus.
    pub fn leakage(&self, f: &GridFunction) -> f64 {
        let coeffs = grid::raw_dft(f);
        self.leakage_of_coeffs(&coeffs)
    }

    pub(crate) fn leakage_of_coeffs(&self, coeffs: &[Complex64]) -> f64 {
        let (lo, hi) = self.covered_annulus();
        let (mut out, mut total) = (0.0, 0.0);
        for (i, c) in coeffs.iter().enumerate() {
            let r = self.grid.frequency_norm(i);
            let m = c.norm_sqr();
            total += m;
            if r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12) {
                out += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            (out / total).sqrt()
        }
    }

    /// `‖φ_j(D) f‖_X` for every `j`, from raw DFT coefficients, optionally after an
    /// extra multiplier.
    pub(crate) fn block_norms_of_coeffs(
        &self,
        coeffs: &[Complex64],
        extra: Option<&[f64]>,
        spec: &SpaceSpec,
    ) -> Result<Vec<f64>> {
        self.phi
            .iter()
            .map(|p| {
                if p.iter()
                    .zip(coeffs)
                    .all(|(s, c)| *s == 0.0 || *c == Complex64::new(0.0, 0.0))
                {
                    return Ok(0.0);
                }
                let block = match extra {
                    Some(e) => {
                        let sym: Vec<f64> = p.iter().zip(e).map(|(a, b)| a * b).collect();
                        grid::raw_synthesize(self.grid, coeffs, &sym)
                    }
                    None => grid::raw_synthesize(self.grid, coeffs, p),
                };
                x_norm(&block, spec)
            })
            .collect()
    }
}

pub fn build_lp_family(grid: Grid, j_min: i32, j_max: i32) -> Result<LPFamily> {
    LPFamily::new(grid, j_min, j_max)
}

/// `F^{-1}[φ_j F f]`.
pub fn lp_block(f: &GridFunction, family: &LPFamily, j: i32) -> Result<GridFunction> {
    f.grid().check_same(family.grid())?;
    let sym = family.phi_j(j)?;
    Ok(grid::apply_symbol(f, sym))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    #[serde(with = "crate::spaces::exponent")]
    pub r: f64,
    pub spec: SpaceSpec,
}

impl BesovParams {
    pub fn new(s: f64, r: f64, spec: SpaceSpec) -> Result<Self> {
        let p = Self { s, r, spec };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 1.0) || !self.s.is_finite() {
            return Err(Error::Parameter(format!(
                "Besov parameters need r ≥ 1 and finite s, got {self:?}"
            )));
        }
        self.spec.validate()
    }
}

/// `(Σ_j (2^{js} n_j)^r)^{1/r}` with `n_j` listed from `j_min`; maximum for `r = ∞`.
pub fn aggregate_blocks(norms: &[f64], j_min: i32, s: f64, r: f64) -> f64 {
    let terms = norms
        .iter()
        .enumerate()
        .map(|(i, n)| 2f64.powf((j_min + i as i32) as f64 * s) * n);
    if r.is_infinite() {
        terms.fold(0.0, f64::max)
    } else if r == 1.0 {
        terms.sum()
    } else {
        terms.map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Besov norm together with any leakage warning.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovNorm {
    pub value: f64,
    pub block_norms: Vec<f64>,
    pub warning: Option<String>,
}

pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

pub fn besov_norm_detailed(f: &GridFunction, params: &BesovParams, family: &LPFamily) -> Result<BesovNorm> {
    params.validate()?;
    f.grid().check_same(family.grid())?;
    let coeffs = grid::raw_dft(f);
    let leak = family.leakage_of_coeffs(&coeffs);
    let warning =
        (leak > LEAKAGE_TOLERANCE).then(|| format!("relative spectral mass {leak:.3e} outside the covered annulus"));
    let block_norms = family.block_norms_of_coeffs(&coeffs, None, &params.spec)?;
    let value = aggregate_blocks(&block_norms, family.j_min, params.s, params.r);
    Ok(BesovNorm {
        value,
        block_norms,
        warning,
    })
}

/// `‖f‖_{Ḃ^s_{X,r}}` over the family's dyadic range.
pub fn besov_norm(f: &GridFunction, params: &BesovParams, family: &LPFamily) -> Result<f64> {
    Ok(besov_norm_detailed(f, params, family)?.value)
}

/// Multiplier `|ξ|^{2α}` on nonzero frequencies.
pub fn lift_symbol(grid: &Grid, alpha: f64) -> Vec<f64> {
    grid.frequency_norms()
        .into_iter()
        .map(|r| if r == 0.0 { 0.0 } else { r.powf(2.0 * alpha) })
        .collect()
}

/// `(‖(−Δ)^α f‖_{Ḃ^{s−2α}_{X,r}}, ‖f‖_{Ḃ^s_{X,r}})`.
pub fn lift_check(f: &GridFunction, alpha: f64, params: &BesovParams, family: &LPFamily) -> Result<(f64, f64)> {
    if !(-2.0..=2.0).contains(&alpha) {
        return Err(Error::Parameter(format!(
            "lift exponent must lie in [-2, 2], got {alpha}"
        )));
    }
    params.validate()?;
    f.grid().check_same(family.grid())?;
    let coeffs = grid::raw_dft(f);
    let lifted = family.block_norms_of_coeffs(&coeffs, Some(&lift_symbol(f.grid(), alpha)), &params.spec)?;
    let plain = family.block_norms_of_coeffs(&coeffs, None, &params.spec)?;
    Ok((
        aggregate_blocks(&lifted, family.j_min, params.s - 2.0 * alpha, params.r),
        aggregate_blocks(&plain, family.j_min, params.s, params.r),
    ))
}

/// Parallel block norms for many functions sharing a family.
pub fn block_norms_many(fs: &[GridFunction], spec: &SpaceSpec, family: &LPFamily) -> Result<Vec<Vec<f64>>> {
    fs.par_iter()
        .map(|f| {
            f.grid().check_same(family.grid())?;
            family.block_norms_of_coeffs(&grid::raw_dft(f), None, spec)
        })
        .collect()
}
