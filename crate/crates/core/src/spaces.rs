//! Norms of the concrete function spaces `X` and sampled checks of their axioms.
//!
//! Three families are implemented: Lebesgue `L^p`, Lorentz `L^{p,q}` (through the
//! decreasing rearrangement) and Morrey `M^p_q` (supremum over a finite family of
//! balls). Every norm is invariant under grid-aligned torus shifts, which is the
//! discrete form of uniform translation boundedness with constant one.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::report::{param, CaseRow, ExperimentReport};

/// The concrete space `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceSpec {
    Lebesgue {
        #[serde(with = "exponent")]
        p: f64,
    },
    Lorentz {
        #[serde(with = "exponent")]
        p: f64,
        #[serde(with = "exponent")]
        q: f64,
    },
    Morrey {
        #[serde(with = "exponent")]
        p: f64,
        #[serde(with = "exponent")]
        q: f64,
    },
}

impl SpaceSpec {
    pub fn lebesgue(p: f64) -> Result<Self> {
        Self::Lebesgue { p }.validated()
    }

    pub fn lorentz(p: f64, q: f64) -> Result<Self> {
        Self::Lorentz { p, q }.validated()
    }

    pub fn morrey(p: f64, q: f64) -> Result<Self> {
        Self::Morrey { p, q }.validated()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        match *self {
            Self::Lebesgue { p } => {
                if !(p >= 1.0) {
                    return bad(format!("Lebesgue exponent must lie in [1, ∞], got {p}"));
                }
            }
            Self::Lorentz { p, q } => {
                if !(p > 1.0 && p.is_finite()) {
                    return bad(format!("Lorentz p must lie in (1, ∞), got {p}"));
                }
                if !(q >= 1.0) {
                    return bad(format!("Lorentz q must lie in [1, ∞], got {q}"));
                }
            }
            Self::Morrey { p, q } => {
                if !(q >= 1.0 && q <= p && p.is_finite()) {
                    return bad(format!("Morrey exponents need 1 ≤ q ≤ p < ∞, got p={p}, q={q}"));
                }
            }
        }
        Ok(())
    }

    fn validated(self) -> Result<Self> {
        self.validate().map(|_| self)
    }

    /// Short label used in report parameters.
    pub fn label(&self) -> String {
        let e = |x: f64| {
            if x.is_infinite() {
                "inf".to_string()
            } else {
                x.to_string()
            }
        };
        match *self {
            Self::Lebesgue { p } => format!("L{}", e(p)),
            Self::Lorentz { p, q } => format!("L{},{}", e(p), e(q)),
            Self::Morrey { p, q } => format!("M{},{}", e(p), e(q)),
        }
    }
}

/// Serde helper accepting numbers or the strings `"inf"` / `"infinity"`.
pub mod exponent {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") => Ok(f64::INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad exponent {s:?}"))),
        }
    }
}

/// Decreasing rearrangement of a step function: non-increasing values, each
/// carried on a set of the given measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rearrangement {
    /// Sorts `|values|` in descending order, keeping each weight attached.
    pub fn from_weighted(values: &[f64], weights: &[f64]) -> Self {
        let mut pairs: Vec<(f64, f64)> = values.iter().map(|v| v.abs()).zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (values, weights) = pairs.into_iter().unzip();
        Self { values, weights }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn lebesgue_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.first().copied().unwrap_or(0.0);
        }
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v.powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// `(∫_0^∞ (t^{1/p} f*(t))^q dt/t)^{1/q}`, integrated exactly per step;
    /// `sup_t t^{1/p} f*(t)` for `q = ∞`.
    pub fn lorentz_norm(&self, p: f64, q: f64) -> f64 {
        if q.is_infinite() {
            let mut t = 0.0;
            let mut best: f64 = 0.0;
            for (v, w) in self.values.iter().zip(&self.weights) {
                t += w;
                let tp = if p.is_infinite() { 1.0 } else { t.powf(1.0 / p) };
                best = best.max(v * tp);
            }
            return best;
        }
        if p.is_infinite() {
            // only finite when f = 0
            return if self.values.iter().all(|&v| v == 0.0) {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let a = q / p;
        let mut t_prev: f64 = 0.0;
        let mut acc = 0.0;
        for (v, w) in self.values.iter().zip(&self.weights) {
            // t_k^a - t_{k-1}^a without cancellation
            let diff = if t_prev == 0.0 {
                w.powf(a)
            } else {
                t_prev.powf(a) * (a * (w / t_prev).ln_1p()).exp_m1()
            };
            if *v > 0.0 {
                acc += v.powf(q) * diff;
            }
            t_prev += w;
        }
        (acc * p / q).powf(1.0 / q)
    }
}

pub fn decreasing_rearrangement(f: &GridFunction) -> Rearrangement {
    let w = f.grid().cell_volume();
    let abs = f.abs();
    let weights = vec![w; abs.len()];
    Rearrangement::from_weighted(&abs, &weights)
}

/// Finite family of periodic balls `B(c, r)`: centers on every `center_stride`-th
/// node per axis, radii `2^k h` for `0 ≤ k ≤ log2(N/4)`. A ball contains the nodes
/// at Euclidean distance `< r` from its center.
#[derive(Debug, Clone, PartialEq)]
pub struct BallFamily {
    grid: Grid,
    center_stride: usize,
    radii_cells: Vec<usize>,
}

impl BallFamily {
    /// All nodes as centers; closed under every grid-aligned shift.
    pub fn new(grid: Grid) -> Self {
        Self::with_stride(grid, 1)
    }

    pub fn with_stride(grid: Grid, center_stride: usize) -> Self {
        let n = grid.points_per_axis();
        let kmax = (n / 4).max(1).trailing_zeros() as usize;
        Self {
            grid,
            center_stride: center_stride.max(1),
            radii_cells: (0..=kmax).map(|k| 1usize << k).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn radii_cells(&self) -> &[usize] {
        &self.radii_cells
    }

    pub fn centers(&self) -> Vec<usize> {
        let n = self.grid.points_per_axis();
        let s = self.center_stride;
        if self.grid.dim() == 1 {
            (0..n).step_by(s).collect()
        } else {
            let mut out = Vec::new();
            for a in (0..n).step_by(s) {
                for b in (0..n).step_by(s) {
                    out.push(self.grid.flat_index([a, b]));
                }
            }
            out
        }
    }

    /// Row half-widths of the discrete disk of radius `r` cells: for each row
    /// offset `dy ∈ (-r, r)`, the largest `dx` with `dx² + dy² < r²`.
    fn disk_rows(r: usize) -> Vec<(isize, usize)> {
        let r = r as isize;
        (-(r - 1)..=(r - 1))
            .map(|dy| {
                let mut w = 0isize;
                while (w + 1) * (w + 1) + dy * dy < r * r {
                    w += 1;
                }
                (dy, w as usize)
            })
            .collect()
    }

    /// Number of nodes in a ball of radius `r` cells.
    pub fn ball_count(&self, r: usize) -> usize {
        if self.grid.dim() == 1 {
            2 * r - 1
        } else {
            Self::disk_rows(r).iter().map(|(_, w)| 2 * w + 1).sum()
        }
    }

    pub fn ball_measure(&self, r: usize) -> f64 {
        self.ball_count(r) as f64 * self.grid.cell_volume()
    }

    /// Sums of `values` over every ball of radius `r` centered at every node.
    /// Returned in flat node order.
    pub fn ball_sums(&self, values: &[f64], r: usize) -> Vec<f64> {
        let n = self.grid.points_per_axis();
        if self.grid.dim() == 1 {
            let prefix = circular_prefix(values);
            (0..n)
                .map(|c| window_sum(&prefix, n, c as isize - (r as isize - 1), 2 * r - 1))
                .collect()
        } else {
            let rows: Vec<Vec<f64>> = values.chunks_exact(n).map(circular_prefix).collect();
            let disk = Self::disk_rows(r);
            let mut out = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    let mut s = 0.0;
                    for &(dy, w) in &disk {
                        let row = (a as isize + dy).rem_euclid(n as isize) as usize;
                        s += window_sum(&rows[row], n, b as isize - w as isize, 2 * w + 1);
                    }
                    out[a * n + b] = s;
                }
            }
            out
        }
    }

    /// Whether node `x` lies in the ball of radius `r` cells around node `c`.
    pub fn contains(&self, c: usize, r: usize, x: usize) -> bool {
        let n = self.grid.points_per_axis() as isize;
        let ca = self.grid.axis_indices(c);
        let xa = self.grid.axis_indices(x);
        let wrap = |d: isize| {
            let d = d.rem_euclid(n);
            d.min(n - d)
        };
        let d0 = wrap(xa[0] as isize - ca[0] as isize);
        let d1 = if self.grid.dim() == 2 {
            wrap(xa[1] as isize - ca[1] as isize)
        } else {
            0
        };
        d0 * d0 + d1 * d1 < (r * r) as isize
    }

    /// Indicator samples of the ball of radius `r` cells around node `c`.
    pub fn indicator(&self, c: usize, r: usize) -> GridFunction {
        let v: Vec<f64> = (0..self.grid.len())
            .map(|x| if self.contains(c, r, x) { 1.0 } else { 0.0 })
            .collect();
        GridFunction::from_real(self.grid, &v).expect("finite")
    }

    fn is_center(&self, idx: usize) -> bool {
        let a = self.grid.axis_indices(idx);
        a[0].is_multiple_of(self.center_stride) && (self.grid.dim() == 1 || a[1].is_multiple_of(self.center_stride))
    }

    pub(crate) fn center_mask(&self) -> Vec<bool> {
        (0..self.grid.len()).map(|i| self.is_center(i)).collect()
    }
}

fn circular_prefix(values: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(values.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v;
        p.push(acc);
    }
    p
}

/// Sum of `len ≤ n` consecutive circular entries starting at `start`.
fn window_sum(prefix: &[f64], n: usize, start: isize, len: usize) -> f64 {
    let s = start.rem_euclid(n as isize) as usize;
    let e = s + len;
    if e <= n {
        prefix[e] - prefix[s]
    } else {
        (prefix[n] - prefix[s]) + prefix[e - n]
    }
}

/// Morrey norm over the given ball family.
pub fn morrey_norm_with(f: &GridFunction, p: f64, q: f64, family: &BallFamily) -> f64 {
    let grid = f.grid();
    let vals: Vec<f64> = f.abs().iter().map(|v| v.powf(q)).collect();
    let mask = family.center_mask();
    let mut best: f64 = 0.0;
    for &r in family.radii_cells() {
        let measure = family.ball_measure(r);
        let scale = measure.powf(1.0 / p - 1.0 / q);
        let sums = family.ball_sums(&vals, r);
        for (i, s) in sums.iter().enumerate() {
            if mask[i] {
                let integral = s.max(0.0) * grid.cell_volume();
                best = best.max(scale * integral.powf(1.0 / q));
            }
        }
    }
    best
}

/// Lebesgue norm `(h^n Σ |f_i|^p)^{1/p}`, or the maximum for `p = ∞`.
pub fn lebesgue_norm(f: &GridFunction, p: f64) -> f64 {
    lebesgue_norm_of_abs(&f.abs(), f.grid().cell_volume(), p)
}

pub(crate) fn lebesgue_norm_of_abs(abs: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        abs.iter().copied().fold(0.0, f64::max)
    } else if p == 1.0 {
        abs.iter().sum::<f64>() * cell
    } else if p == 2.0 {
        (abs.iter().map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else {
        (abs.iter().map(|v| v.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

/// `‖f‖_X` for the given space.
pub fn x_norm(f: &GridFunction, spec: &SpaceSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match *spec {
        SpaceSpec::Lebesgue { p } => lebesgue_norm(f, p),
        SpaceSpec::Lorentz { p, q } => decreasing_rearrangement(f).lorentz_norm(p, q),
        SpaceSpec::Morrey { p, q } => morrey_norm_with(f, p, q, &BallFamily::new(*f.grid())),
    })
}

/// Conjugate exponent `p' = p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `(∫|fg|, ‖f‖_{L^p}‖g‖_{L^{p'}})`.
pub fn holder_pair_check(f: &GridFunction, g: &GridFunction, p: f64) -> Result<(f64, f64)> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("Hölder exponent must lie in [1, ∞], got {p}")));
    }
    f.grid().check_same(g.grid())?;
    let lhs = f
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(a, b)| a.norm() * b.norm())
        .sum::<f64>()
        * f.grid().cell_volume();
    let rhs = lebesgue_norm(f, p) * lebesgue_norm(g, conjugate(p));
    Ok((lhs, rhs))
}

const LATTICE_TOL: f64 = 1e-12;
const FATOU_TOL: f64 = 1e-8;

/// Sampled checks of the lattice, Fatou, ball-indicator and ball local
/// integrability axioms. `family(i)` yields the i-th random function; `count`
/// functions are drawn. The ball for (BSi)/(BLI) is `B(0, 1)`.
pub fn axiom_suite<F>(spec: &SpaceSpec, count: u64, family: F) -> Result<ExperimentReport>
where
    F: Fn(u64) -> GridFunction + Sync,
{
    use rayon::prelude::*;
    spec.validate()?;
    let label = spec.label();
    let rows: Vec<Vec<CaseRow>> = (0..count)
        .into_par_iter()
        .map(|i| axiom_case(spec, &label, i, &family(i)))
        .collect();
    let rows: Vec<CaseRow> = rows.into_iter().flatten().collect();
    let best_c = rows
        .iter()
        .filter(|r| r.anchor == ANCHOR_BLI && r.error.is_none())
        .map(|r| r.ratio)
        .fold(0.0, f64::max);
    let mut report = ExperimentReport::from_cases("axioms", rows, None);
    report.note(format!(
        "{label}: measured local integrability constant on B(0,1): {best_c:.6e}"
    ));
    Ok(report)
}

const ANCHOR_LATTICE: &str = "lattice property";
const ANCHOR_FATOU: &str = "Fatou property";
const ANCHOR_BSI: &str = "ball indicators belong to X";
const ANCHOR_BLI: &str = "local integrability on balls";

fn axiom_case(spec: &SpaceSpec, label: &str, i: u64, f: &GridFunction) -> Vec<CaseRow> {
    let grid = *f.grid();
    let norm = |g: &GridFunction| x_norm(g, spec).expect("validated");
    let base = |check: &str| vec![param("spec", label), param("check", check), param("sample", i)];
    let nf = norm(f);

    // |g| ≤ |f| via a deterministic damping profile
    let g = GridFunction::new(
        grid,
        f.samples()
            .iter()
            .enumerate()
            .map(|(k, z)| z * (0.5 + 0.5 * ((k as f64 * 0.7 + i as f64).sin())))
            .collect(),
    )
    .expect("finite");
    let ng = norm(&g);
    let lattice = CaseRow::bound(4 * i, base("lattice"), ng, nf, 1.0 + LATTICE_TOL, ANCHOR_LATTICE);

    let abs = f.abs();
    let top = abs.iter().copied().fold(0.0, f64::max);
    let mut prev = 0.0;
    let mut monotone = true;
    let mut last = 0.0;
    for level in 1..=8 {
        let cap = top * level as f64 / 8.0;
        let trunc: Vec<f64> = abs.iter().map(|v| v.min(cap)).collect();
        let v = norm(&GridFunction::from_real(grid, &trunc).expect("finite"));
        monotone &= v >= prev * (1.0 - LATTICE_TOL);
        prev = v;
        last = v;
    }
    let fatou = CaseRow::measured(
        4 * i + 1,
        base("fatou"),
        last,
        nf,
        monotone && (last - nf).abs() <= FATOU_TOL * nf,
        ANCHOR_FATOU,
    );

    let ball: Vec<f64> = (0..grid.len())
        .map(|k| {
            let x = grid.point(k);
            if x[0] * x[0] + x[1] * x[1] < 1.0 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let chi = GridFunction::from_real(grid, &ball).expect("finite");
    let n_chi = norm(&chi);
    let bsi = CaseRow::measured(
        4 * i + 2,
        base("ball-indicator"),
        n_chi,
        1.0,
        n_chi.is_finite() && n_chi > 0.0,
        ANCHOR_BSI,
    );

    let local: f64 = abs.iter().zip(&ball).map(|(a, b)| a * b).sum::<f64>() * grid.cell_volume();
    let bli = CaseRow::measured(
        4 * i + 3,
        base("local-integral"),
        local,
        nf,
        local.is_finite(),
        ANCHOR_BLI,
    );
    vec![lattice, fatou, bsi, bli]
}
