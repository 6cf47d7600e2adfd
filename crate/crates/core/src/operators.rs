//! Translations, convolution, maximal operators, Fourier multipliers and the heat
//! semigroup, plus the Young-inequality experiments in both directions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{self, fft_forward, fft_inverse, Grid, GridFunction, Spectrum};
use crate::report::{param, CaseRow, ExperimentReport};
use crate::spaces::{lebesgue_norm, x_norm, BallFamily, SpaceSpec};
use crate::timegrid::HalfLineFunction;

/// Result of a translation by a possibly off-lattice vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Shifted {
    pub function: GridFunction,
    /// Lattice vector actually applied, in cells per axis.
    pub cells: Vec<isize>,
    /// `applied − requested`, per axis.
    pub rounding: Vec<f64>,
}

/// Circular shift by whole cells: `out(x) = f(x − m h)`.
pub fn shift_cells(f: &GridFunction, cells: &[isize]) -> GridFunction {
    let grid = *f.grid();
    let n = grid.points_per_axis() as isize;
    let m0 = cells.first().copied().unwrap_or(0);
    let m1 = cells.get(1).copied().unwrap_or(0);
    let s = f.samples();
    let out = (0..grid.len())
        .map(|i| {
            let a = grid.axis_indices(i);
            let i0 = (a[0] as isize - m0).rem_euclid(n) as usize;
            let i1 = if grid.dim() == 2 {
                (a[1] as isize - m1).rem_euclid(n) as usize
            } else {
                0
            };
            s[grid.flat_index([i0, i1])]
        })
        .collect();
    GridFunction::from_parts_unchecked(grid, out)
}

/// `f(· − z)` on the torus; `z` is rounded to the nearest lattice vector.
pub fn translate(f: &GridFunction, z: &[f64]) -> Result<Shifted> {
    let grid = f.grid();
    if z.len() != grid.dim() {
        return Err(Error::Parameter(format!(
            "shift has {} components on a {}-dimensional grid",
            z.len(),
            grid.dim()
        )));
    }
    let h = grid.spacing();
    let cells: Vec<isize> = z.iter().map(|&v| (v / h).round() as isize).collect();
    let rounding = cells.iter().zip(z).map(|(&c, &v)| c as f64 * h - v).collect();
    Ok(Shifted {
        function: shift_cells(f, &cells),
        cells,
        rounding,
    })
}

/// Torus convolution `∫ f(x − y) g(y) dy = F^{-1}[(2π)^{n/2} Ff Fg]`.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.grid().check_same(g.grid())?;
    let grid = *f.grid();
    let c = (2.0 * PI).powf(grid.dim() as f64 / 2.0);
    let prod = fft_forward(f).mul(&fft_forward(g))?;
    let scaled = Spectrum::new(grid, prod.into_values().into_iter().map(|z| z * c).collect())?;
    Ok(fft_inverse(&scaled))
}

/// `‖f ∗ g‖_X / (‖f‖_X ‖g‖_{L¹})`.
pub fn young_ratio(f: &GridFunction, g: &GridFunction, spec: &SpaceSpec) -> Result<f64> {
    let nf = x_norm(f, spec)?;
    let ng = lebesgue_norm(g, 1.0);
    if nf == 0.0 || ng == 0.0 {
        return Err(Error::ZeroDenominator(format!("‖f‖_X = {nf}, ‖g‖_L1 = {ng}")));
    }
    Ok(x_norm(&convolve(f, g)?, spec)? / (nf * ng))
}

/// Unit-mass box `k^n χ_{[0,1/k)^n}(· − z)`, renormalized so that its quadrature
/// is exactly one.
pub fn make_box_mollifier(k: u32, z: &[f64], grid: &Grid) -> Result<GridFunction> {
    if k == 0 {
        return Err(Error::Parameter("mollifier index k must be positive".into()));
    }
    if z.len() != grid.dim() {
        return Err(Error::Parameter("shift dimension does not match grid".into()));
    }
    let h = grid.spacing();
    let width = 1.0 / k as f64;
    if width < h * (1.0 - 1e-12) {
        return Err(Error::UnresolvedMollifier { k, spacing: h });
    }
    let period = 2.0 * grid.half_width();
    // snap tiny negative offsets to the box edge
    let inside = |x: f64, z: f64| {
        let mut d = (x - z).rem_euclid(period);
        if period - d < 1e-9 * h {
            d = 0.0;
        }
        d < width - 1e-9 * h
    };
    let d = grid.dim();
    let mask: Vec<f64> = (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            if (0..d).all(|a| inside(p[a], z[a])) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let count: f64 = mask.iter().sum();
    if count == 0.0 {
        return Err(Error::UnresolvedMollifier { k, spacing: h });
    }
    let height = 1.0 / (count * grid.cell_volume());
    GridFunction::from_real(*grid, &mask.iter().map(|m| m * height).collect::<Vec<_>>())
}

const ANCHOR_YOUNG: &str = "Young inequality ‖f∗g‖_X ≤ C‖f‖_X‖g‖_L1";
const ANCHOR_CONVERSE: &str = "Young inequality implies translation bound (mollifier limit)";

/// Converse direction: `‖f(· − z)‖_X` against `‖f ∗ g_k‖_X` for increasing `k`.
///
/// One row per `k` with `lhs = ‖f(· − z)‖_X`, `rhs = ‖f ∗ g_k‖_X`. A row passes
/// when `|ratio − 1|` has not grown compared with the previous `k`.
pub fn converse_young_check(f: &GridFunction, z: &[f64], spec: &SpaceSpec, ks: &[u32]) -> Result<ExperimentReport> {
    if ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("mollifier indices must increase".into()));
    }
    let shifted = translate(f, z)?;
    let target = x_norm(&shifted.function, spec)?;
    let mut rows = Vec::with_capacity(ks.len());
    let mut prev_gap = f64::INFINITY;
    for (i, &k) in ks.iter().enumerate() {
        let params = vec![param("spec", spec.label()), param("k", k)];
        let row = make_box_mollifier(k, z, f.grid())
            .and_then(|g| convolve(f, &g))
            .and_then(|avg| {
                let n_avg = x_norm(&avg, spec)?;
                let dist = x_norm(&avg.sub(&shifted.function)?, spec)?;
                Ok((n_avg, dist))
            });
        match row {
            Ok((n_avg, dist)) => {
                let ratio = target / n_avg;
                let gap = (ratio - 1.0).abs();
                let ok = gap <= prev_gap * (1.0 + 1e-9) + 1e-14;
                prev_gap = gap;
                let mut params = params;
                params.push(param("distance", crate::report::fmt_f64(dist)));
                rows.push(CaseRow::measured(i as u64, params, target, n_avg, ok, ANCHOR_CONVERSE));
            }
            Err(e) => rows.push(CaseRow::failed(i as u64, params, ANCHOR_CONVERSE, e.to_string())),
        }
    }
    let mut report = ExperimentReport::from_cases("converse-young", rows, None);
    if shifted.rounding.iter().any(|r| *r != 0.0) {
        report.note(format!("shift rounded to lattice by {:?}", shifted.rounding));
    }
    Ok(report)
}

/// Young sweep over caller-supplied pairs; rows pass when the ratio is at most
/// `ceiling`.
pub fn young_sweep<F>(spec: &SpaceSpec, count: u64, ceiling: f64, pairs: F) -> ExperimentReport
where
    F: Fn(u64) -> (GridFunction, GridFunction) + Sync,
{
    use rayon::prelude::*;
    let rows: Vec<CaseRow> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (f, g) = pairs(i);
            let params = vec![param("spec", spec.label()), param("sample", i)];
            let res = (|| -> Result<(f64, f64)> {
                let lhs = x_norm(&convolve(&f, &g)?, spec)?;
                let rhs = x_norm(&f, spec)? * lebesgue_norm(&g, 1.0);
                if rhs == 0.0 {
                    return Err(Error::ZeroDenominator("‖f‖_X‖g‖_L1 = 0".into()));
                }
                Ok((lhs, rhs))
            })();
            match res {
                Ok((lhs, rhs)) => CaseRow::bound(i, params, lhs, rhs, ceiling, ANCHOR_YOUNG),
                Err(e) => CaseRow::failed(i, params, ANCHOR_YOUNG, e.to_string()),
            }
        })
        .collect();
    ExperimentReport::from_cases("young", rows, Some(ceiling))
}

/// One-dimensional Hardy–Littlewood maximal function at every sample time.
///
/// At the sample time `e_k` (a cell edge) the supremum over open intervals
/// `(a, b) ∋ e_k` of the average of the step function is attained, or approached,
/// with `a`, `b` cell edges and `a ≤ e_k ≤ b`; all such pairs are scanned.
pub fn hl_maximal_halfline(f: &HalfLineFunction) -> HalfLineFunction {
    let m = f.values().len();
    let edges = f.grid().edges();
    let cum = f.cumulative();
    let mut best = vec![0.0f64; m + 1];
    let mut suffix = vec![0.0f64; m + 2];
    for a in 0..m {
        suffix[m + 1] = f64::NEG_INFINITY;
        for b in (a + 1..=m).rev() {
            let avg = (cum[b] - cum[a]) / (edges[b] - edges[a]);
            suffix[b] = suffix[b + 1].max(avg);
        }
        for k in a.max(1)..=m {
            let v = suffix[k.max(a + 1)];
            if v > best[k] {
                best[k] = v;
            }
        }
    }
    HalfLineFunction::new(f.grid().clone(), best[1..].to_vec()).expect("averages of valid data")
}

/// `Mf(e_k)` for a single sample index `k` (1-based edge index).
pub fn hl_maximal_at(f: &HalfLineFunction, k: usize) -> f64 {
    let edges = f.grid().edges();
    let cum = f.cumulative();
    let m = f.values().len();
    let mut best: f64 = 0.0;
    for a in 0..=k.min(m) {
        for b in k.max(a + 1)..=m {
            best = best.max((cum[b] - cum[a]) / (edges[b] - edges[a]));
        }
    }
    best
}

/// Maximal function over the ball family shared with the Morrey norm:
/// `Mf(x) = max { avg_B |f| : B in the family, x ∈ B }`.
pub fn hl_maximal_grid(f: &GridFunction) -> GridFunction {
    hl_maximal_grid_with(f, &BallFamily::new(*f.grid()))
}

pub fn hl_maximal_grid_with(f: &GridFunction, family: &BallFamily) -> GridFunction {
    let grid = *f.grid();
    let abs = f.abs();
    let mask = family.center_mask();
    let mut out = vec![0.0f64; grid.len()];
    for &r in family.radii_cells() {
        let count = family.ball_count(r) as f64;
        let avgs: Vec<f64> = family
            .ball_sums(&abs, r)
            .into_iter()
            .map(|s| s.max(0.0) / count)
            .collect();
        let offsets = disk_offsets(&grid, r);
        let n = grid.points_per_axis() as isize;
        for (x, o) in out.iter_mut().enumerate() {
            let a = grid.axis_indices(x);
            for &(d0, d1) in &offsets {
                let c0 = (a[0] as isize + d0).rem_euclid(n) as usize;
                let c1 = if grid.dim() == 2 {
                    (a[1] as isize + d1).rem_euclid(n) as usize
                } else {
                    0
                };
                let c = grid.flat_index([c0, c1]);
                if mask[c] && avgs[c] > *o {
                    *o = avgs[c];
                }
            }
        }
    }
    GridFunction::from_real(grid, &out).expect("finite averages")
}

fn disk_offsets(grid: &Grid, r: usize) -> Vec<(isize, isize)> {
    let r = r as isize;
    let mut out = Vec::new();
    for d0 in -(r - 1)..=(r - 1) {
        if grid.dim() == 1 {
            out.push((d0, 0));
            continue;
        }
        for d1 in -(r - 1)..=(r - 1) {
            if d0 * d0 + d1 * d1 < r * r {
                out.push((d0, d1));
            }
        }
    }
    out
}

/// `∫_0^{e_k} a e^{-a(e_k − s)} f(s) ds`, exact per cell.
pub fn exp_kernel_integral(a: f64, f: &HalfLineFunction, k: usize) -> f64 {
    let edges = f.grid().edges();
    let t = edges[k];
    let mut acc = 0.0;
    for (c, v) in f.values()[..k].iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let w = edges[c + 1] - edges[c];
        // e^{-a(t - e_{c+1})} (1 - e^{-a w})
        acc += v * (-a * (t - edges[c + 1])).exp() * (-(-a * w).exp_m1());
    }
    acc
}

/// `∫_{e_k}^{T} a e^{-a(t − e_k)} f(t) dt`, exact per cell.
pub fn exp_kernel_integral_from(a: f64, f: &HalfLineFunction, k: usize) -> f64 {
    let edges = f.grid().edges();
    let s = edges[k];
    let mut acc = 0.0;
    for (c, v) in f.values().iter().enumerate().skip(k) {
        if *v == 0.0 {
            continue;
        }
        let w = edges[c + 1] - edges[c];
        acc += v * (-a * (edges[c] - s)).exp() * (-(-a * w).exp_m1());
    }
    acc
}

pub const EXP_KERNEL_CONSTANT: f64 = 1.0 + 0.36787944117144233;

/// `(∫_0^t a e^{-a(t−s)} f(s) ds, (1 + e^{-1}) Mf(t))` at the sample time
/// `t = e_k`, `k` a 1-based edge index.
pub fn exp_kernel_bound_check(a: f64, f: &HalfLineFunction, k: usize) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("decay rate must be positive, got {a}")));
    }
    if k == 0 || k > f.values().len() {
        return Err(Error::Parameter(format!(
            "time index {k} outside 1..={}",
            f.values().len()
        )));
    }
    Ok((exp_kernel_integral(a, f, k), EXP_KERNEL_CONSTANT * hl_maximal_at(f, k)))
}

/// `ψ(D) f = F^{-1}[ψ F f]` for a symbol sampled on the dual grid of `f`.
pub fn fourier_multiplier(symbol: &Spectrum, f: &GridFunction) -> Result<GridFunction> {
    f.grid().check_same(symbol.grid())?;
    let grid = *f.grid();
    let mut coeffs = grid::raw_dft(f);
    for (c, s) in coeffs.iter_mut().zip(symbol.values()) {
        *c *= s;
    }
    Ok(grid::raw_synthesize_complex(grid, &coeffs))
}

/// Real symbol given as a radial profile.
pub fn radial_multiplier<P: Fn(f64) -> f64>(f: &GridFunction, profile: P) -> GridFunction {
    let grid = *f.grid();
    let symbol: Vec<f64> = (0..grid.len()).map(|i| profile(grid.frequency_norm(i))).collect();
    grid::apply_symbol(f, &symbol)
}

/// `e^{tΔ} f`, the multiplier `e^{-t|ξ|²}`.
pub fn heat_semigroup(f: &GridFunction, t: f64) -> Result<GridFunction> {
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("heat time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(radial_multiplier(f, |r| (-t * r * r).exp()))
}

/// `|ξ|^{2α}` with the zero frequency mapped to zero.
pub fn fractional_laplacian(f: &GridFunction, alpha: f64) -> GridFunction {
    radial_multiplier(f, |r| if r == 0.0 { 0.0 } else { r.powf(2.0 * alpha) })
}

/// `Δf`, the multiplier `−|ξ|²`.
pub fn laplacian(f: &GridFunction) -> GridFunction {
    radial_multiplier(f, |r| -r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::integrate;
    use crate::timegrid::TimeGrid;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fn(grid: Grid, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        GridFunction::from_real(grid, &v).unwrap()
    }

    fn specs() -> Vec<SpaceSpec> {
        vec![
            SpaceSpec::lebesgue(2.0).unwrap(),
            SpaceSpec::lorentz(2.0, 1.0).unwrap(),
            SpaceSpec::morrey(2.0, 1.0).unwrap(),
        ]
    }

    /// Direct-sum oracle `Σ_j f(x_i − y_j) g(y_j) h^n` in 1D.
    fn direct_convolution(f: &GridFunction, g: &GridFunction) -> Vec<Complex64> {
        let grid = f.grid();
        let n = grid.points_per_axis();
        let h = grid.spacing();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        // x_i − y_j = (i − j) h is the node with index i − j + N/2
                        let idx = (i + n / 2 + n - j) % n;
                        f.samples()[idx] * g.samples()[j]
                    })
                    .sum::<Complex64>()
                    * h
            })
            .collect()
    }

    #[test]
    fn translate_basics() {
        let g = Grid::one_d(64, 2.0).unwrap();
        let f = random_fn(g, 1);
        assert_eq!(translate(&f, &[0.0]).unwrap().function, f);
        let z = 7.0 * g.spacing();
        let back = translate(&translate(&f, &[z]).unwrap().function, &[-z]).unwrap();
        assert_eq!(back.function, f);
        let off = translate(&f, &[0.3 * g.spacing()]).unwrap();
        assert_eq!(off.cells, vec![0]);
        assert!((off.rounding[0] + 0.3 * g.spacing()).abs() < 1e-15);
        assert!(translate(&f, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn translation_preserves_every_norm() {
        let g = Grid::one_d(128, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_fn(g, 2);
        for spec in specs() {
            let nf = x_norm(&f, &spec).unwrap();
            for _ in 0..20 {
                let z = rng.random_range(-4.0..4.0);
                let s = translate(&f, &[z]).unwrap().function;
                assert!((x_norm(&s, &spec).unwrap() - nf).abs() <= 1e-12 * nf);
            }
        }
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let g = Grid::one_d(64, 3.0).unwrap();
        let f = random_fn(g, 3);
        let k = random_fn(g, 4);
        let fast = convolve(&f, &k).unwrap();
        let slow = direct_convolution(&f, &k);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in fast.samples().iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-10 * scale);
        }
        let rev = convolve(&k, &f).unwrap();
        assert!(fast.sub(&rev).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn discrete_identity_and_tent() {
        let g = Grid::one_d(256, 4.0).unwrap();
        let h = g.spacing();
        let delta = GridFunction::sample(g, |x| if x[0] == 0.0 { 1.0 / h } else { 0.0 }).unwrap();
        let f = random_fn(g, 6);
        let c = convolve(&f, &delta).unwrap();
        assert!(c.sub(&f).unwrap().max_abs() < 1e-13);
        assert!((young_ratio(&f, &delta, &SpaceSpec::lebesgue(2.0).unwrap()).unwrap() - 1.0).abs() < 1e-12);

        // symmetric box of 2K+1 nodes: the tent is h·max(0, 2K+1−|i|) at x = i h
        let k = 20.0;
        let chi = GridFunction::sample(g, |x| if (x[0] / h).round().abs() <= k { 1.0 } else { 0.0 }).unwrap();
        let tent = convolve(&chi, &chi).unwrap();
        for (i, v) in tent.samples().iter().enumerate() {
            let m = (g.point(i)[0] / h).round().abs();
            assert!((v.re - h * (2.0 * k + 1.0 - m).max(0.0)).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn young_l2_against_direct_oracle() {
        let g = Grid::one_d(64, 3.0).unwrap();
        for seed in 0..20 {
            let f = random_fn(g, seed);
            let k = random_fn(g, seed + 99).map(|z| Complex64::new(z.norm(), 0.0));
            let direct = GridFunction::new(g, direct_convolution(&f, &k)).unwrap();
            let ratio = lebesgue_norm(&direct, 2.0) / (lebesgue_norm(&f, 2.0) * lebesgue_norm(&k, 1.0));
            assert!(ratio <= 1.0 + 1e-8);
            let r = young_ratio(&f, &k, &SpaceSpec::lebesgue(2.0).unwrap()).unwrap();
            assert!((r - ratio).abs() < 1e-10);
        }
        let zero = GridFunction::zeros(g);
        assert!(matches!(
            young_ratio(&zero, &random_fn(g, 1), &SpaceSpec::lebesgue(2.0).unwrap()),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn young_holds_for_morrey_sweep() {
        let g = Grid::one_d(128, 4.0).unwrap();
        let spec = SpaceSpec::morrey(2.0, 1.0).unwrap();
        let report = young_sweep(&spec, 100, 1.0 + 1e-6, |i| {
            (
                random_fn(g, i),
                random_fn(g, 1000 + i).map(|z| Complex64::new(z.re.abs(), 0.0)),
            )
        });
        assert!(report.passed, "sup {}", report.aggregate.empirical_sup);
    }

    #[test]
    fn young_l1_constant_one() {
        let g = Grid::two_d(32, 2.0).unwrap();
        for seed in 0..10 {
            let f = random_fn(g, seed).map(|z| Complex64::new(z.re.abs(), 0.0));
            let k = random_fn(g, seed + 7).map(|z| Complex64::new(z.re.abs(), 0.0));
            let r = young_ratio(&f, &k, &SpaceSpec::lebesgue(1.0).unwrap()).unwrap();
            assert!(r <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn mollifier_mass_and_support() {
        let g = Grid::one_d(1024, 16.0).unwrap();
        for k in [1, 2, 4, 8, 32] {
            let m = make_box_mollifier(k, &[0.5], &g).unwrap();
            assert!((integrate(&m) - 1.0).abs() < 1e-12);
            assert!(m.samples().iter().all(|z| z.re >= 0.0));
            let support = m.samples().iter().filter(|z| z.re > 0.0).count() as f64 * g.spacing();
            assert!((support - 1.0 / k as f64).abs() <= g.spacing());
        }
        assert!(matches!(
            make_box_mollifier(64, &[0.0], &g),
            Err(Error::UnresolvedMollifier { .. })
        ));
        let g2 = Grid::two_d(64, 2.0).unwrap();
        let m = make_box_mollifier(2, &[0.0, 0.25], &g2).unwrap();
        assert!((integrate(&m) - 1.0).abs() < 1e-12);
        let support = m.samples().iter().filter(|z| z.re > 0.0).count() as f64 * g2.cell_volume();
        assert!((support - 0.25).abs() < 1e-12);
    }

    #[test]
    fn mollified_function_approaches_translate() {
        let g = Grid::one_d(1024, 16.0).unwrap();
        let f = GridFunction::sample(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let z = [1.0];
        let target = translate(&f, &z).unwrap().function;
        for spec in specs() {
            let mut prev = f64::INFINITY;
            for k in [2, 4, 8, 16] {
                let avg = convolve(&f, &make_box_mollifier(k, &z, &g).unwrap()).unwrap();
                let d = x_norm(&avg.sub(&target).unwrap(), &spec).unwrap();
                assert!(d < prev, "{spec:?} k={k}");
                prev = d;
            }
        }
    }

    #[test]
    fn converse_profile_and_box_contraction() {
        let g = Grid::one_d(1024, 16.0).unwrap();
        let bump = GridFunction::sample(g, |x| {
            let r = x[0] / 3.0;
            if r.abs() < 1.0 {
                (-1.0 / (1.0 - r * r)).exp()
            } else {
                0.0
            }
        })
        .unwrap();
        for spec in specs() {
            let rep = converse_young_check(&bump, &[1.5], &spec, &[2, 4, 8, 16]).unwrap();
            assert!(rep.passed, "{spec:?}");
            let last = rep.cases.last().unwrap();
            assert!((last.ratio - 1.0).abs() < 1e-3, "{spec:?}: {}", last.ratio);
        }
        let chi = GridFunction::sample(g, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let spec = SpaceSpec::lebesgue(2.0).unwrap();
        let rep = converse_young_check(&chi, &[0.0], &spec, &[1, 2, 4, 8]).unwrap();
        for c in &rep.cases {
            assert!(c.rhs <= c.lhs * (1.0 + 1e-12));
        }
    }

    /// Triple-loop oracle: every pair of edges around the sample time.
    fn maximal_brute(f: &HalfLineFunction) -> Vec<f64> {
        let e = f.grid().edges();
        let v = f.values();
        let m = v.len();
        (1..=m)
            .map(|k| {
                let mut best: f64 = 0.0;
                for a in 0..=k {
                    for b in k..=m {
                        if b > a {
                            let s: f64 = (a..b).map(|c| v[c] * (e[c + 1] - e[c])).sum();
                            best = best.max(s / (e[b] - e[a]));
                        }
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn halfline_maximal_matches_brute_force() {
        let tg = TimeGrid::geometric(8.0, 40, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let vals: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..1.0f64).powi(3)).collect();
            let f = HalfLineFunction::new(tg.clone(), vals).unwrap();
            let fast = hl_maximal_halfline(&f);
            let slow = maximal_brute(&f);
            for (k, (a, b)) in fast.values().iter().zip(&slow).enumerate() {
                assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
                assert!((hl_maximal_at(&f, k + 1) - b).abs() <= 1e-12 * b.max(1e-300));
            }
        }
    }

    #[test]
    fn halfline_maximal_examples() {
        let tg = TimeGrid::from_edges((0..=40).map(|i| i as f64 * 0.1).collect()).unwrap();
        let c = HalfLineFunction::constant(tg.clone(), 2.5).unwrap();
        assert!(hl_maximal_halfline(&c).values().iter().all(|v| (v - 2.5).abs() < 1e-12));

        let chi = HalfLineFunction::new(tg.clone(), (0..40).map(|i| if i < 10 { 1.0 } else { 0.0 }).collect()).unwrap();
        // t = 2 is edge 20
        assert!((hl_maximal_at(&chi, 20) - 0.5).abs() < 1e-12);

        let geo = TimeGrid::geometric(4.0, 64, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = HalfLineFunction::new(geo.clone(), (0..64).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
        let g = HalfLineFunction::new(geo, (0..64).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
        let mf = hl_maximal_halfline(&f);
        let mg = hl_maximal_halfline(&g);
        let mfg = hl_maximal_halfline(&f.add(&g).unwrap());
        for k in 0..64 {
            assert!(mf.values()[k] >= f.values()[k] * (1.0 - 1e-12));
            assert!(mfg.values()[k] <= (mf.values()[k] + mg.values()[k]) * (1.0 + 1e-12));
        }
    }

    /// Brute force over the ball family for the grid maximal function.
    fn grid_maximal_brute(f: &GridFunction) -> Vec<f64> {
        let fam = BallFamily::new(*f.grid());
        let abs = f.abs();
        let len = f.grid().len();
        (0..len)
            .map(|x| {
                let mut best: f64 = 0.0;
                for c in fam.centers() {
                    for &r in fam.radii_cells() {
                        if fam.contains(c, r, x) {
                            let (mut s, mut n) = (0.0, 0.0);
                            for (y, v) in abs.iter().enumerate() {
                                if fam.contains(c, r, y) {
                                    s += v;
                                    n += 1.0;
                                }
                            }
                            best = best.max(s / n);
                        }
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn grid_maximal_examples() {
        for g in [Grid::one_d(32, 2.0).unwrap(), Grid::two_d(16, 2.0).unwrap()] {
            let one = GridFunction::sample(g, |_| 1.0).unwrap();
            assert!(hl_maximal_grid(&one)
                .samples()
                .iter()
                .all(|z| (z.re - 1.0).abs() < 1e-12));

            let spike = GridFunction::sample(g, |x| if x.iter().all(|v| *v == 0.0) { 1.0 } else { 0.0 }).unwrap();
            let fast = hl_maximal_grid(&spike);
            for (a, b) in fast.samples().iter().zip(grid_maximal_brute(&spike)) {
                assert!((a.re - b).abs() < 1e-12);
            }

            let f = random_fn(g, 12);
            let mf = hl_maximal_grid(&f);
            for (a, b) in mf.samples().iter().zip(grid_maximal_brute(&f)) {
                assert!((a.re - b).abs() < 1e-12);
            }
            for (m, v) in mf.samples().iter().zip(f.samples()) {
                assert!(m.re >= v.norm() * (1.0 - 1e-12));
            }
            let cells: Vec<isize> = vec![3; g.dim()];
            let lhs = hl_maximal_grid(&shift_cells(&f, &cells));
            let rhs = shift_cells(&mf, &cells);
            assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn exp_kernel_bound_examples() {
        let tg = TimeGrid::geometric(16.0, 128, 1e-3).unwrap();
        let one = HalfLineFunction::constant(tg.clone(), 1.0).unwrap();
        for (a, k) in [(0.5, 60), (3.0, 128), (50.0, 10)] {
            let (lhs, rhs) = exp_kernel_bound_check(a, &one, k).unwrap();
            let t = tg.edges()[k];
            assert!((lhs - (1.0 - (-a * t).exp())).abs() < 1e-12);
            assert!((rhs - EXP_KERNEL_CONSTANT).abs() < 1e-12);
        }
        // pulse just before t with a large decay rate captures its mass
        let k = 100;
        let vals: Vec<f64> = (0..128).map(|c| if c == k - 1 { 1.0 } else { 0.0 }).collect();
        let f = HalfLineFunction::new(tg.clone(), vals).unwrap();
        let (lhs, rhs) = exp_kernel_bound_check(1e4, &f, k).unwrap();
        let w = tg.width(k - 1);
        assert!((lhs - (1.0 - (-1e4 * w).exp())).abs() < 1e-12);
        assert!(lhs <= rhs);
        assert!(exp_kernel_bound_check(-1.0, &f, 3).is_err());
        assert!(exp_kernel_bound_check(1.0, &f, 0).is_err());
    }

    #[test]
    fn multiplier_examples() {
        let g = Grid::one_d(128, 4.0).unwrap();
        let f = random_fn(g, 21);
        let id = Spectrum::from_radial(g, |_| 1.0);
        assert!(fourier_multiplier(&id, &f).unwrap().sub(&f).unwrap().max_abs() < 1e-13);

        let omega = 5.0 * g.freq_spacing();
        let s = GridFunction::sample(g, |x| (omega * x[0]).sin()).unwrap();
        let sq = Spectrum::from_radial(g, |r| r * r);
        let out = fourier_multiplier(&sq, &s).unwrap();
        assert!(out.sub(&s.scale(omega * omega)).unwrap().max_abs() < 1e-10);

        let a = Spectrum::from_radial(g, |r| (-r).exp());
        let b = Spectrum::from_radial(g, |r| 1.0 / (1.0 + r * r));
        let two = fourier_multiplier(&a, &fourier_multiplier(&b, &f).unwrap()).unwrap();
        let one = fourier_multiplier(&a.mul(&b).unwrap(), &f).unwrap();
        assert!(two.sub(&one).unwrap().max_abs() < 1e-12);

        let other = Spectrum::from_radial(Grid::one_d(64, 4.0).unwrap(), |_| 1.0);
        assert!(fourier_multiplier(&other, &f).is_err());
    }

    #[test]
    fn heat_semigroup_properties() {
        let g = Grid::one_d(512, 16.0).unwrap();
        let f = random_fn(g, 30);
        assert_eq!(heat_semigroup(&f, 0.0).unwrap(), f);
        assert!(heat_semigroup(&f, -1.0).is_err());
        let st = heat_semigroup(&heat_semigroup(&f, 0.3).unwrap(), 0.7).unwrap();
        let direct = heat_semigroup(&f, 1.0).unwrap();
        assert!(st.sub(&direct).unwrap().max_abs() < 1e-10);
        assert!((integrate(&direct) - integrate(&f)).abs() < 1e-10);

        let (s, t) = (0.5, 1.5);
        let gauss = GridFunction::sample(g, |x| (-x[0] * x[0] / (4.0 * s)).exp()).unwrap();
        let evolved = heat_semigroup(&gauss, t).unwrap();
        let expect =
            GridFunction::sample(g, |x| (s / (s + t)).sqrt() * (-x[0] * x[0] / (4.0 * (s + t))).exp()).unwrap();
        for (i, (a, b)) in evolved.samples().iter().zip(expect.samples()).enumerate() {
            if g.point(i)[0].abs() < 8.0 {
                assert!((a - b).norm() < 1e-6);
            }
        }
    }
}
