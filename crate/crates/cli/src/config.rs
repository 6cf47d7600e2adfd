//! JSON run configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bfslab::besov::{build_lp_family, LPFamily};
use bfslab::{Grid, SpaceSpec, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Axioms,
    Young,
    ConverseYoung,
    Maximal,
    Besov,
    LinearTerm,
    DuhamelTerm,
    Maxreg,
    KernelDecay,
    All,
}

impl SuiteName {
    pub const ALL: [SuiteName; 10] = [
        SuiteName::Axioms,
        SuiteName::Young,
        SuiteName::ConverseYoung,
        SuiteName::Maximal,
        SuiteName::Besov,
        SuiteName::LinearTerm,
        SuiteName::DuhamelTerm,
        SuiteName::Maxreg,
        SuiteName::KernelDecay,
        SuiteName::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Axioms => "axioms",
            SuiteName::Young => "young",
            SuiteName::ConverseYoung => "converse-young",
            SuiteName::Maximal => "maximal",
            SuiteName::Besov => "besov",
            SuiteName::LinearTerm => "linear-term",
            SuiteName::DuhamelTerm => "duhamel-term",
            SuiteName::Maxreg => "maxreg",
            SuiteName::KernelDecay => "kernel-decay",
            SuiteName::All => "all",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            SuiteName::Axioms => "lattice, Fatou, ball indicator and local integrability checks per space",
            SuiteName::Young => "‖f∗g‖_X ≤ ‖f‖_X‖g‖_L1 on random band-limited pairs",
            SuiteName::ConverseYoung => "mollifier averages converge to the translate of a bump",
            SuiteName::Maximal => "exponential kernel bounds and the half-line duality estimate",
            SuiteName::Besov => "Besov embedding in the summation index",
            SuiteName::LinearTerm => "free heat evolution against the initial-data Besov norm, per dyadic band",
            SuiteName::DuhamelTerm => "Duhamel term against the forcing, zero initial data",
            SuiteName::Maxreg => "full maximal regularity ratio, Lebesgue and Lorentz in time",
            SuiteName::KernelDecay => "L1 norm of the localized heat kernel against e^{-4^j t}",
            SuiteName::All => "every suite above, merged",
        }
    }

    /// The concrete suites this name expands to.
    pub fn expand(self) -> Vec<SuiteName> {
        match self {
            SuiteName::All => Self::ALL[..Self::ALL.len() - 1].to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

fn default_dim() -> usize {
    1
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            n: 1024,
            l: 8.0 * PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub t: f64,
    pub cells: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { t: 64.0, cells: 512 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpConfig {
    pub j_min: i32,
    pub j_max: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_count")]
    pub count: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_count() -> u64 {
    20
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            count: default_count(),
            seed: 0,
        }
    }
}

fn default_spaces() -> Vec<SpaceSpec> {
    vec![SpaceSpec::Lebesgue { p: 2.0 }]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: SuiteName,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default = "default_spaces")]
    pub spaces: Vec<SpaceSpec>,
    /// Defaults to the widest range the grid represents.
    #[serde(default)]
    pub lp: Option<LpConfig>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub ceilings: BTreeMap<SuiteName, f64>,
    pub output: PathBuf,
}

/// Environment variable overriding `output`.
pub const OUTPUT_ENV: &str = "BFSLAB_OUTPUT";

/// Validated configuration with the derived grid objects.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: SuiteConfig,
    pub grid: Grid,
    pub time: TimeGrid,
    pub family: LPFamily,
}

/// Default first time cell on the standard `T = 64` grid, scaled with `T`.
const FIRST_CELL_FRACTION: f64 = 1e-5 / 64.0;

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config {
                path,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(out) = std::env::var_os(OUTPUT_ENV) {
            cfg.output = PathBuf::from(out);
        }
        Ok(cfg)
    }

    /// Checks every field and builds the grid, time grid and LP family.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let bad = |path: &str, message: String| CliError::Config {
            path: path.into(),
            message,
        };
        let grid = Grid::new(self.grid.dim, self.grid.n, self.grid.l).map_err(|e| bad("grid", e.to_string()))?;
        let time = self.time_grid().map_err(|e| bad("time", e.to_string()))?;
        if self.spaces.is_empty() {
            return Err(bad("spaces", "at least one space is required".into()));
        }
        for (i, s) in self.spaces.iter().enumerate() {
            s.validate().map_err(|e| bad(&format!("spaces[{i}]"), e.to_string()))?;
        }
        let (j_min, j_max) = match self.lp {
            Some(lp) => (lp.j_min, lp.j_max),
            None => widest_range(&grid),
        };
        let family = build_lp_family(grid, j_min, j_max).map_err(|e| bad("lp", e.to_string()))?;
        if self.sweep.count == 0 {
            return Err(bad("sweep.count", "must be positive".into()));
        }
        for (name, c) in &self.ceilings {
            if *name == SuiteName::All {
                return Err(bad("ceilings.all", "ceilings apply to individual suites".into()));
            }
            if !(c.is_finite() && *c > 0.0) {
                return Err(bad(
                    &format!("ceilings.{name}"),
                    format!("must be a positive number, got {c}"),
                ));
            }
        }
        if self.output.as_os_str().is_empty() {
            return Err(bad("output", "empty path prefix".into()));
        }
        Ok(Resolved {
            config: self.clone(),
            grid,
            time,
            family,
        })
    }

    fn time_grid(&self) -> bfslab::Result<TimeGrid> {
        TimeGrid::geometric(self.time.t, self.time.cells, self.time.t * FIRST_CELL_FRACTION)
    }

    /// Same run with `N` and the time cells doubled.
    pub fn refined(&self) -> Self {
        let mut c = self.clone();
        c.grid.n *= 2;
        c.time.cells *= 2;
        c
    }

    pub fn ceiling(&self, suite: SuiteName) -> Option<f64> {
        self.ceilings.get(&suite).copied()
    }
}

/// `[j_min, j_max]` with the covered annulus between `Δξ` and the Nyquist frequency.
pub fn widest_range(grid: &Grid) -> (i32, i32) {
    let lo = (grid.freq_spacing() * (1.0 - 1e-12)).log2().ceil() as i32 - 1;
    let hi = (grid.nyquist() * (1.0 + 1e-12)).log2().floor() as i32 - 2;
    (lo, hi)
}
