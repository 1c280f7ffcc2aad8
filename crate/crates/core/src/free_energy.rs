//! Window estimates of `Λ̲(h)`, `Λ̄(h)` and `Λ(h)` along a net.
//!
//! The liminf/limsup of `t·log ∫ e^{h/t} dμ` are approximated by the min/max
//! over the tail of a window of indices. The window is sampled at
//! logarithmically spaced indices; the tail is the part of the sample at or
//! beyond the geometric midpoint of the window.

use rayon::prelude::*;

use crate::abstract_conjugate::FamilyEvaluation;
use crate::convex::{EntryFlag, GridFunction};
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, NEG_INF, POS_INF};
use crate::measure::{exp_power_integral, tail_power_integral};
use crate::net::{NetPoint, ScaledMeasureNet};
use crate::tilt::{linear_family, OpenInterval, TiltFamily, TiltFunction};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 41;
/// Values beyond this, strictly increasing over [`DIVERGENCE_RUN`] samples,
/// classify as `+∞`.
pub const OVERFLOW_THRESHOLD: f64 = 1e12;
pub const DIVERGENCE_RUN: usize = 5;

/// Index window `[start, end]` sampled at `samples` log-spaced indices, each
/// rounded to a multiple of `stride`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub start_index: usize,
    pub end_index: usize,
    pub samples: usize,
    pub stride: usize,
}

impl WindowSpec {
    pub fn new(start_index: usize, end_index: usize) -> Result<Self> {
        Self::with_samples(start_index, end_index, DEFAULT_SAMPLES, 1)
    }

    pub fn with_samples(start_index: usize, end_index: usize, samples: usize, stride: usize) -> Result<Self> {
        if !(start_index >= 1 && start_index < end_index) {
            return Err(Error::InvalidWindow(format!(
                "need 1 ≤ start < end, got [{start_index}, {end_index}]"
            )));
        }
        if samples < 2 || stride == 0 {
            return Err(Error::InvalidWindow("need at least 2 samples and stride ≥ 1".into()));
        }
        Ok(Self {
            start_index,
            end_index,
            samples,
            stride,
        })
    }

    /// The window of indices whose powers lie in `[t_min, t_max]`.
    pub fn for_powers(net: &ScaledMeasureNet, t_max: f64, t_min: f64, samples: usize, stride: usize) -> Result<Self> {
        if !(0.0 < t_min && t_min < t_max) {
            return Err(Error::InvalidWindow(format!("bad power range [{t_min}, {t_max}]")));
        }
        let start = first_index(net, |t| t <= t_max * (1.0 + 1e-12))
            .ok_or_else(|| Error::InvalidWindow(format!("no index with t ≤ {t_max}")))?;
        let end = first_index(net, |t| t < t_min * (1.0 - 1e-12))
            .map(|k| k - 1)
            .or(net.max_index())
            .ok_or_else(|| Error::InvalidWindow("unbounded window".into()))?;
        let start = start.div_ceil(stride) * stride;
        let end = end / stride * stride;
        Self::with_samples(start, end, samples, stride)
    }

    pub fn check(&self, net: &ScaledMeasureNet) -> Result<()> {
        if !net.contains_index(self.start_index) || !net.contains_index(self.end_index) {
            return Err(Error::InvalidWindow(format!(
                "window [{}, {}] outside the range of net `{}`",
                self.start_index,
                self.end_index,
                net.name()
            )));
        }
        Ok(())
    }

    /// Sampled indices, strictly increasing, first = start and last = end.
    pub fn indices(&self) -> Vec<usize> {
        let (a, b) = (self.start_index as f64, self.end_index as f64);
        let mut out: Vec<usize> = Vec::with_capacity(self.samples);
        for i in 0..self.samples {
            let f = i as f64 / (self.samples - 1) as f64;
            let raw = (a.ln() + f * (b.ln() - a.ln())).exp().round() as usize;
            let k = (raw / self.stride * self.stride).clamp(self.start_index, self.end_index);
            if out.last().is_none_or(|&l| k > l) {
                out.push(k);
            }
        }
        if out.last() != Some(&self.end_index) {
            out.push(self.end_index);
        }
        out
    }

    /// Position in [`indices`](Self::indices) where the tail begins.
    pub fn tail_start(&self, indices: &[usize]) -> usize {
        let mid = ((self.start_index as f64).ln() + (self.end_index as f64).ln()) / 2.0;
        let pos = indices.partition_point(|&k| (k as f64).ln() < mid - 1e-12);
        pos.min(indices.len().saturating_sub(2))
    }
}

fn first_index(net: &ScaledMeasureNet, pred: impl Fn(f64) -> bool) -> Option<usize> {
    let mut hi = 1usize;
    loop {
        if !net.contains_index(hi) {
            let m = net.max_index()?;
            if pred(net.t(m)) {
                hi = m;
                break;
            }
            return None;
        }
        if pred(net.t(hi)) {
            break;
        }
        hi = hi.checked_mul(2)?;
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Some(hi);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(net.t(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// The measures of a window, materialized once for bulk evaluation.
#[derive(Debug, Clone)]
pub struct WindowSample {
    pub window: WindowSpec,
    pub points: Vec<NetPoint>,
    pub tail_start: usize,
}

impl WindowSample {
    pub fn collect(net: &ScaledMeasureNet, window: WindowSpec) -> Result<Self> {
        window.check(net)?;
        let idx = window.indices();
        let tail_start = window.tail_start(&idx);
        let points = idx.into_par_iter().map(|k| net.at(k)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            window,
            points,
            tail_start,
        })
    }

    pub fn tail(&self) -> &[NetPoint] {
        &self.points[self.tail_start..]
    }

    /// Estimates the limit of an arbitrary per-point quantity.
    pub fn estimate<F>(&self, tol: f64, f: F) -> LimitEstimate
    where
        F: Fn(&NetPoint) -> ExtReal,
    {
        let samples: Vec<(f64, ExtReal)> = self.points.iter().map(|p| (p.t, f(p))).collect();
        LimitEstimate::from_samples(samples, self.tail_start, tol)
    }
}

/// `(liminf, limsup, converged)` triple with the raw samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub liminf_est: ExtReal,
    pub limsup_est: ExtReal,
    pub converged: bool,
    pub spread: f64,
    pub samples: Vec<(f64, ExtReal)>,
    pub divergent: bool,
}

impl LimitEstimate {
    /// `samples` ordered by increasing index (decreasing `t`).
    pub fn from_samples(samples: Vec<(f64, ExtReal)>, tail_start: usize, tol: f64) -> Self {
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let tail = &values[tail_start.min(values.len().saturating_sub(1))..];
        let divergence = detect_divergence(&values);
        let (lo, hi) = match divergence {
            Some(v) => (v, v),
            None => (
                tail.iter().copied().fold(POS_INF, f64::min),
                tail.iter().copied().fold(NEG_INF, f64::max),
            ),
        };
        let (spread, converged) = if lo.is_infinite() || hi.is_infinite() {
            (if lo == hi { 0.0 } else { POS_INF }, lo == hi)
        } else {
            (hi - lo, hi - lo <= tol)
        };
        Self {
            liminf_est: lo,
            limsup_est: hi,
            converged,
            spread,
            samples,
            divergent: divergence.is_some(),
        }
    }

    /// The limit estimate: the last sample, or the common infinity.
    pub fn value(&self) -> Option<ExtReal> {
        if !self.converged {
            return None;
        }
        if self.liminf_est.is_infinite() {
            return Some(self.liminf_est);
        }
        self.samples.last().map(|s| s.1)
    }

    /// Last sample regardless of convergence.
    pub fn last(&self) -> ExtReal {
        if self.divergent {
            return self.limsup_est;
        }
        self.samples.last().map_or(NEG_INF, |s| s.1)
    }
}

/// `Some(±∞)` when the sequence runs off monotonically: any infinite last
/// value, a strictly monotone run of [`DIVERGENCE_RUN`] increments beyond the
/// overflow threshold, or such a run whose increments do not shrink.
fn detect_divergence(values: &[f64]) -> Option<f64> {
    let last = *values.last()?;
    if last.is_infinite() {
        return Some(last);
    }
    if values.len() <= DIVERGENCE_RUN {
        return None;
    }
    let run = &values[values.len() - DIVERGENCE_RUN - 1..];
    if run.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let incs: Vec<f64> = run.windows(2).map(|w| w[1] - w[0]).collect();
    for sign in [1.0, -1.0] {
        let d: Vec<f64> = incs.iter().map(|i| sign * i).collect();
        // rounding noise on a constant sequence is not a trend
        let scale = 1.0 + run.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if d.iter().all(|&i| i > 1e-9 * scale) {
            let over = run.iter().all(|v| sign * v > OVERFLOW_THRESHOLD);
            let steady = d.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
            if over || steady {
                return Some(sign * POS_INF);
            }
        }
    }
    None
}

/// Estimates `Λ̲(h)`, `Λ̄(h)` over the window.
pub fn lambda_of(net: &ScaledMeasureNet, h: &TiltFunction, window: WindowSpec, tol: f64) -> Result<LimitEstimate> {
    let ws = WindowSample::collect(net, window)?;
    Ok(lambda_on(&ws, h, tol))
}

pub fn lambda_on(ws: &WindowSample, h: &TiltFunction, tol: f64) -> LimitEstimate {
    ws.estimate(tol, |p| exp_power_integral(&p.measure, h, p.t))
}

/// `L` on the interior grid of `G`, with per-entry estimates.
#[derive(Debug, Clone)]
pub struct FreeEnergyGrid {
    pub function: GridFunction,
    pub estimates: Vec<LimitEstimate>,
}

impl FreeEnergyGrid {
    pub fn all_converged(&self) -> bool {
        self.estimates.iter().all(|e| e.converged)
    }
}

/// Grid values for a list of estimates: the limit when converged (infinite
/// ones flagged), the last sample otherwise.
pub fn grid_from_estimates(xs: Vec<f64>, estimates: &[LimitEstimate], label: &str) -> Result<GridFunction> {
    let mut values = Vec::with_capacity(estimates.len());
    let mut flags = Vec::with_capacity(estimates.len());
    for e in estimates {
        match e.value() {
            Some(v) if v == POS_INF => {
                values.push(POS_INF);
                flags.push(EntryFlag::Divergent);
            }
            Some(v) => {
                values.push(v);
                flags.push(EntryFlag::Exact);
            }
            None => {
                values.push(e.last());
                flags.push(EntryFlag::NotConverged);
            }
        }
    }
    Ok(GridFunction::new(xs, values, label)?.with_flags(flags))
}

pub fn l_grid(
    net: &ScaledMeasureNet,
    g: OpenInterval,
    resolution: usize,
    window: WindowSpec,
    tol: f64,
) -> Result<FreeEnergyGrid> {
    let ws = WindowSample::collect(net, window)?;
    l_grid_on(&ws, g, resolution, tol)
}

pub fn l_grid_on(ws: &WindowSample, g: OpenInterval, resolution: usize, tol: f64) -> Result<FreeEnergyGrid> {
    let family = linear_family(g, resolution)?;
    let members = family.members();
    let xs: Vec<f64> = g.interior_grid(resolution);
    let estimates: Vec<LimitEstimate> = members.par_iter().map(|h| lambda_on(ws, h, tol)).collect();
    let function = grid_from_estimates(xs, &estimates, "L")?;
    Ok(FreeEnergyGrid { function, estimates })
}

pub fn lambda_family_table(
    net: &ScaledMeasureNet,
    family: &TiltFamily,
    window: WindowSpec,
    tol: f64,
) -> Result<FamilyEvaluation> {
    let ws = WindowSample::collect(net, window)?;
    Ok(lambda_family_table_on(&ws, family, tol))
}

pub fn lambda_family_table_on(ws: &WindowSample, family: &TiltFamily, tol: f64) -> FamilyEvaluation {
    let members = family.members();
    let lambdas: Vec<LimitEstimate> = members.par_iter().map(|h| lambda_on(ws, h, tol)).collect();
    FamilyEvaluation::new(family.clone(), members, lambdas)
}

/// Outcome of the tail condition over a family.
#[derive(Debug, Clone)]
pub struct TailReport {
    pub holds: bool,
    /// Members whose estimated `limsup (∫_{h>M} e^{h/t} dμ)^t` reaches `ε`,
    /// with that estimate.
    pub witnesses: Vec<(String, f64)>,
}

/// `limsup (∫_{h>M} e^{h/t} dμ)^t < ε` for every member.
pub fn tail_condition_check(ws: &WindowSample, family: &TiltFamily, level: f64, eps: f64) -> Result<TailReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidFamily(format!("ε must be positive, got {eps}")));
    }
    let members = family.members();
    let estimates: Vec<f64> = members
        .par_iter()
        .map(|h| {
            ws.estimate(0.0, |p| tail_power_integral(&p.measure, h, level, p.t))
                .limsup_est
                .exp()
        })
        .collect();
    let witnesses: Vec<(String, f64)> = members
        .iter()
        .zip(estimates)
        .filter(|(_, v)| *v >= eps)
        .map(|(h, v)| (h.label(), v))
        .collect();
    Ok(TailReport {
        holds: witnesses.is_empty(),
        witnesses,
    })
}
