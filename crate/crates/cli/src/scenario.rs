//! Scenario files: TOML with one section per pipeline stage.
//!
//! ```toml
//! name = "ge-ex"
//!
//! [net]
//! kind = "coin"              # coin | dem-zei | iid-mean | measures
//!
//! [window]
//! t_max = 1e-2
//! t_min = 1e-6
//!
//! [free_energy]
//! g = [-3.0, 3.0]
//! resolution = 59
//! support = "truncated"      # bounded | truncated
//!
//! [family]
//! two_slope = { lambda = [-4.0, 4.0], nu = [-4.0, 4.0], resolution = 17 }
//!
//! [rate]
//! grid = [-2.0, 2.0, 41]     # lo, hi, points
//!
//! [[checks]]
//! id = "ellis"
//! ```
//!
//! Omitted keys take the values in [`defaults`]; the resolved scenario is
//! echoed into every report.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// The single table of defaults.
pub mod defaults {
    pub const T_MAX: f64 = 1e-2;
    pub const T_MIN: f64 = 1e-6;
    pub const SAMPLES: usize = 41;
    pub const STRIDE: usize = 1;
    /// Convergence tolerance of window estimates.
    pub const LIMIT_TOL: f64 = 1e-3;
    /// Tolerance of every check comparison.
    pub const CHECK_TOL: f64 = 1e-3;
    /// Growth under family doubling above which a conjugate value is `+∞`.
    pub const DOUBLING_TOL: f64 = 1e-3;
    /// Slack of the sandwich chain.
    pub const SANDWICH_TOL: f64 = 1e-6;
    /// Ball radii `2^-from … 2^-to`.
    pub const DELTA_FROM: i32 = 1;
    pub const DELTA_TO: i32 = 10;
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub net: NetSpec,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub tolerance: Tolerances,
    pub free_energy: FreeEnergyConfig,
    #[serde(default)]
    pub family: FamilyConfig,
    pub rate: RateConfig,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NetSpec {
    Coin,
    DemZei,
    IidMean {
        /// `[location, mass]` pairs of the one-step law.
        base: Vec<[f64; 2]>,
        max_n: usize,
    },
    /// One measure file per index, with the matching powers.
    Measures {
        files: Vec<PathBuf>,
        t: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    #[serde(default = "d_t_max")]
    pub t_max: f64,
    #[serde(default = "d_t_min")]
    pub t_min: f64,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default = "d_stride")]
    pub stride: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            t_max: defaults::T_MAX,
            t_min: defaults::T_MIN,
            samples: defaults::SAMPLES,
            stride: defaults::STRIDE,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "d_limit")]
    pub limit: f64,
    #[serde(default = "d_check")]
    pub check: f64,
    #[serde(default = "d_doubling")]
    pub doubling: f64,
    #[serde(default = "d_sandwich")]
    pub sandwich: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            limit: defaults::LIMIT_TOL,
            check: defaults::CHECK_TOL,
            doubling: defaults::DOUBLING_TOL,
            sandwich: defaults::SANDWICH_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SupportSpec {
    #[default]
    Bounded,
    Truncated,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FreeEnergyConfig {
    /// Open interval `G`.
    pub g: [f64; 2],
    pub resolution: usize,
    #[serde(default)]
    pub support: SupportSpec,
    /// Separate window for `L` (e.g. where `L_n` is already exact).
    #[serde(default)]
    pub window: Option<WindowConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    /// Include the linear tilts on `G` sampled like `L`.
    #[serde(default)]
    pub linear: bool,
    #[serde(default)]
    pub two_slope: Option<TwoSlopeSpec>,
    #[serde(default)]
    pub qn: Option<u32>,
    /// Labels of compiled-in custom tilts.
    #[serde(default)]
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TwoSlopeSpec {
    pub lambda: [f64; 2],
    pub nu: [f64; 2],
    pub resolution: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    /// `[lo, hi, points]`, endpoints included.
    pub grid: [f64; 3],
    #[serde(default)]
    pub deltas: DeltaSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeltaSpec {
    pub from: i32,
    pub to: i32,
}

impl Default for DeltaSpec {
    fn default() -> Self {
        Self {
            from: defaults::DELTA_FROM,
            to: defaults::DELTA_TO,
        }
    }
}

impl DeltaSpec {
    pub fn radii(&self) -> Vec<f64> {
        (self.from..=self.to).map(|i| 0.5f64.powi(i)).collect()
    }
}

/// A requested check. `id` is a condition id (`ellis`, `GE-b`,
/// `open-problem-d`, …) or one of `vague-ldp`, `sandwich`,
/// `exponential-tightness`, `ldp-bounds`, `varadhan`, `derivative-bound`,
/// `tail-condition`, `essential-smoothness`, `rate-comparison`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub id: String,
    /// Alternative `G` for condition checks; `L` is resampled on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    /// `[lo, hi]` regions; `open` selects the lower bound.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub closed: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub open: Vec<[f64; 2]>,
    /// Tilts: `h[λ]`, `h[λ,ν]` or a custom label such as `q3`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tilts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

fn d_t_max() -> f64 {
    defaults::T_MAX
}
fn d_t_min() -> f64 {
    defaults::T_MIN
}
fn d_samples() -> usize {
    defaults::SAMPLES
}
fn d_stride() -> usize {
    defaults::STRIDE
}
fn d_limit() -> f64 {
    defaults::LIMIT_TOL
}
fn d_check() -> f64 {
    defaults::CHECK_TOL
}
fn d_doubling() -> f64 {
    defaults::DOUBLING_TOL
}
fn d_sandwich() -> f64 {
    defaults::SANDWICH_TOL
}

impl Scenario {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).with_context(|| format!("in scenario {origin}"))?;
        s.validate().with_context(|| format!("in scenario {origin}"))?;
        Ok(s)
    }

    /// Loads a scenario; relative measure paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut s = Self::parse(&text, &path.display().to_string())?;
        if let NetSpec::Measures { files, .. } = &mut s.net {
            let dir = path.parent().unwrap_or(Path::new("."));
            for f in files.iter_mut() {
                if f.is_relative() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerance;
        for (name, v) in [
            ("tolerance.limit", t.limit),
            ("tolerance.check", t.check),
            ("tolerance.doubling", t.doubling),
            ("tolerance.sandwich", t.sandwich),
        ] {
            if !(v > 0.0) {
                bail!("{name} must be positive, got {v}");
            }
        }
        let windows = std::iter::once(&self.window).chain(self.free_energy.window.as_ref());
        for w in windows {
            if !(w.t_max > w.t_min && w.t_min > 0.0) {
                bail!("window needs t_max > t_min > 0, got [{}, {}]", w.t_min, w.t_max);
            }
            if w.samples < 2 || w.stride == 0 {
                bail!("window needs samples ≥ 2 and stride ≥ 1");
            }
        }
        let [lo, hi] = self.free_energy.g;
        if !(lo < hi) {
            bail!("free_energy.g must satisfy lo < hi");
        }
        let [rlo, rhi, n] = self.rate.grid;
        if !(rlo < rhi) || n < 2.0 || n.fract() != 0.0 {
            bail!("rate.grid must be [lo, hi, points] with lo < hi and at least 2 points");
        }
        if self.rate.deltas.from > self.rate.deltas.to {
            bail!("rate.deltas needs from ≤ to");
        }
        if let NetSpec::Measures { files, t } = &self.net {
            if files.len() != t.len() || files.is_empty() {
                bail!("net.files and net.t must be non-empty and of equal length");
            }
        }
        Ok(())
    }

    pub fn rate_grid(&self) -> Vec<f64> {
        let [lo, hi, n] = self.rate.grid;
        ldp_core::tilt::closed_grid(lo, hi, n as usize)
    }
}
