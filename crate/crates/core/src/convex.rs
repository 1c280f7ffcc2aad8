//! Grid-based convex analysis on the real line.
//!
//! A [`GridFunction`] is read as the piecewise-linear interpolation of its
//! finite samples between consecutive finite grid points, and `+∞` elsewhere.
//! When its [`Support`] is `Truncated` the grid is a window onto a function
//! that continues past the grid; conjugate values attained only at a grid edge
//! are then reported as `+∞` (flagged [`EntryFlag::Truncated`]).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::extreal::{self, ExtReal, NEG_INF, POS_INF};
use crate::measure::RegionSet;
use crate::tilt::OpenInterval;

/// `|left − right| ≤ KINK_TOL·(1 + |left| + |right|)` never counts as a kink.
pub const KINK_TOL: f64 = 1e-6;
/// A slope jump counts as a kink only if it also exceeds the neighbouring
/// jumps by this factor (sampled smooth functions have uniform jumps).
pub const KINK_RATIO: f64 = 4.0;
/// `|slope| ≥` this at the last cell before a domain boundary counts as `→ ∞`.
pub const DIVERGENCE_SLOPE: f64 = 1e6;
const SLOPE_EPS: f64 = 1e-9;

/// Provenance of a grid value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryFlag {
    Exact,
    /// Window estimate did not settle within tolerance.
    NotConverged,
    /// Classified as `+∞` by divergence detection.
    Divergent,
    /// Conjugate attained only at a truncated grid edge; reported as `+∞`.
    Truncated,
}

/// How the function behaves off its grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Support {
    /// `+∞` outside `[min xs, max xs]`.
    #[default]
    Bounded,
    /// The grid truncates a function defined beyond it.
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    xs: Vec<f64>,
    values: Vec<ExtReal>,
    flags: Vec<EntryFlag>,
    label: String,
    support: Support,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, values: Vec<ExtReal>, label: impl Into<String>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} points but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        check_increasing(&xs)?;
        if let Some(v) = values.iter().find(|v| v.is_nan()) {
            return Err(Error::InvalidGrid(format!("value {v}")));
        }
        let flags = vec![EntryFlag::Exact; xs.len()];
        Ok(Self {
            xs,
            values,
            flags,
            label: label.into(),
            support: Support::Bounded,
        })
    }

    pub fn from_fn(xs: Vec<f64>, label: impl Into<String>, f: impl Fn(f64) -> ExtReal) -> Result<Self> {
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values, label)
    }

    pub fn with_flags(mut self, flags: Vec<EntryFlag>) -> Self {
        assert_eq!(flags.len(), self.xs.len());
        self.flags = flags;
        self
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn flags(&self) -> &[EntryFlag] {
        &self.flags
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite()) && !self.values.contains(&NEG_INF)
    }

    /// Grid index closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let p = self.xs.partition_point(|&g| g < x);
        if p == 0 {
            0
        } else if p == self.xs.len() || x - self.xs[p - 1] <= self.xs[p] - x {
            p - 1
        } else {
            p
        }
    }

    /// Value of the piecewise-linear extension at an arbitrary point.
    pub fn eval(&self, x: f64) -> ExtReal {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return POS_INF;
        }
        let p = self.xs.partition_point(|&g| g < x);
        if p < self.xs.len() && self.xs[p] == x {
            return self.values[p];
        }
        let (a, b) = (p - 1, p);
        let (fa, fb) = (self.values[a], self.values[b]);
        if fa.is_infinite() || fb.is_infinite() {
            return POS_INF;
        }
        let w = (x - self.xs[a]) / (self.xs[b] - self.xs[a]);
        fa + w * (fb - fa)
    }

    fn finite_points(&self) -> Vec<(f64, f64)> {
        self.xs
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.is_finite())
            .map(|(&x, &v)| (x, v))
            .collect()
    }

    fn require_proper(&self) -> Result<()> {
        if self.values.contains(&NEG_INF) {
            return Err(Error::Improper(format!("`{}` takes the value −∞", self.label)));
        }
        if !self.values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper(format!("`{}` is identically +∞", self.label)));
        }
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,value\n");
        for (x, v) in self.xs.iter().zip(&self.values) {
            let _ = writeln!(s, "{x:?},{}", extreal::format(*v));
        }
        s
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    pub fn parse_csv(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: origin.to_string(),
            line,
            msg,
        };
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || (i == 0 && line.starts_with('x')) {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| err(i + 1, format!("expected `x,value`, got `{line}`")))?;
            let x: f64 = a
                .trim()
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| err(i + 1, format!("bad grid point `{}`", a.trim())))?;
            let v = extreal::parse(b).ok_or_else(|| err(i + 1, format!("bad value `{}`", b.trim())))?;
            if let Some(&prev) = xs.last() {
                if !(x > prev) {
                    return Err(err(i + 1, format!("grid point {x} not increasing")));
                }
            }
            xs.push(x);
            vs.push(v);
        }
        Self::new(xs, vs, origin.to_string()).map_err(|e| err(0, e.to_string()))
    }
}

fn check_increasing(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("grid points must be finite".into()));
    }
    if let Some(w) = xs.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid(format!(
            "grid not strictly increasing at {} → {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Lower convex hull (monotone chain) of points sorted by `x`.
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the chord a→p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Exact conjugate `f*(x) = sup_λ {λx − f(λ)}` of the piecewise-linear
/// extension of `f`, evaluated on `dual_grid`.
///
/// Builds the lower hull of the finite samples, then sweeps the dual grid
/// against the hull slopes. Ties go to the smaller `λ`.
pub fn lf_transform(f: &GridFunction, dual_grid: &[f64]) -> Result<GridFunction> {
    f.require_proper()?;
    check_increasing(dual_grid)?;
    let hull = lower_hull(&f.finite_points());
    let slopes: Vec<f64> = hull.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let mut values = Vec::with_capacity(dual_grid.len());
    let mut flags = Vec::with_capacity(dual_grid.len());
    let mut j = 0usize;
    for &x in dual_grid {
        while j < slopes.len() && x > slopes[j] {
            j += 1;
        }
        let (l, fl) = hull[j];
        let outside = match (slopes.first(), slopes.last()) {
            (Some(&lo), Some(&hi)) => x < lo - SLOPE_EPS * (1.0 + lo.abs()) || x > hi + SLOPE_EPS * (1.0 + hi.abs()),
            _ => true,
        };
        if f.support == Support::Truncated && outside {
            values.push(POS_INF);
            flags.push(EntryFlag::Truncated);
        } else {
            values.push(l * x - fl);
            flags.push(EntryFlag::Exact);
        }
    }
    Ok(GridFunction::new(dual_grid.to_vec(), values, format!("{}*", f.label))?.with_flags(flags))
}

/// Direct `O(n·m)` conjugate over the finite samples; the test oracle for
/// [`lf_transform`].
pub fn brute_force_conjugate(f: &GridFunction, dual_grid: &[f64]) -> Result<GridFunction> {
    f.require_proper()?;
    check_increasing(dual_grid)?;
    let pts = f.finite_points();
    let mut values = Vec::with_capacity(dual_grid.len());
    let mut flags = Vec::with_capacity(dual_grid.len());
    for &x in dual_grid {
        let mut best = NEG_INF;
        let mut arg = 0usize;
        for (i, &(l, v)) in pts.iter().enumerate() {
            let c = l * x - v;
            if c > best {
                best = c;
                arg = i;
            }
        }
        let at_edge = arg == 0 || arg + 1 == pts.len();
        let runner_up = pts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != arg)
            .map(|(_, &(l, v))| l * x - v)
            .fold(NEG_INF, f64::max);
        let strict = best - runner_up > SLOPE_EPS * (1.0 + best.abs());
        if f.support == Support::Truncated && (pts.len() == 1 || (at_edge && strict)) {
            values.push(POS_INF);
            flags.push(EntryFlag::Truncated);
        } else {
            values.push(best);
            flags.push(EntryFlag::Exact);
        }
    }
    Ok(GridFunction::new(dual_grid.to_vec(), values, format!("{}*", f.label))?.with_flags(flags))
}

/// Greatest convex minorant on the grid: the lower hull of the finite samples,
/// `+∞` outside their span.
pub fn convex_lsc_hull(f: &GridFunction) -> Result<GridFunction> {
    f.require_proper()?;
    let hull = lower_hull(&f.finite_points());
    let (lo, hi) = (hull[0].0, hull[hull.len() - 1].0);
    let values =
        f.xs.iter()
            .map(|&x| {
                if x < lo || x > hi {
                    return POS_INF;
                }
                if hull.len() == 1 {
                    return hull[0].1;
                }
                let p = hull.partition_point(|h| h.0 < x).clamp(1, hull.len() - 1);
                let (a, b) = (hull[p - 1], hull[p]);
                if x == b.0 {
                    return b.1;
                }
                a.1 + (x - a.0) * (b.1 - a.1) / (b.0 - a.0)
            })
            .collect();
    Ok(GridFunction::new(f.xs.clone(), values, format!("conv {}", f.label))?.with_support(f.support))
}

/// Finite-difference slopes to the neighbouring grid points. A missing or
/// infinite neighbour gives `−∞` on the left and `+∞` on the right.
pub fn one_sided_derivatives(f: &GridFunction, at: usize) -> Result<(ExtReal, ExtReal)> {
    let v = *f
        .values
        .get(at)
        .ok_or_else(|| Error::InvalidGrid(format!("index {at} out of range")))?;
    if !v.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "`{}` is infinite at x = {}",
            f.label, f.xs[at]
        )));
    }
    let left = if at == 0 || !f.values[at - 1].is_finite() {
        NEG_INF
    } else {
        (v - f.values[at - 1]) / (f.xs[at] - f.xs[at - 1])
    };
    let right = if at + 1 == f.len() || !f.values[at + 1].is_finite() {
        POS_INF
    } else {
        (f.values[at + 1] - v) / (f.xs[at + 1] - f.xs[at])
    };
    Ok((left, right))
}

/// Kink test for the slope jump `chords[j] − chords[j−1]` at the point between
/// consecutive chords.
fn is_kink(chords: &[f64], j: usize) -> bool {
    let (l, r) = (chords[j - 1], chords[j]);
    let jump = r - l;
    if jump <= KINK_TOL * (1.0 + l.abs() + r.abs()) {
        return false;
    }
    let mut neighbour: f64 = 0.0;
    if j >= 2 {
        neighbour = neighbour.max(chords[j - 1] - chords[j - 2]);
    }
    if j + 1 < chords.len() {
        neighbour = neighbour.max(chords[j + 1] - chords[j]);
    }
    jump > KINK_RATIO * neighbour
}

/// Sorted disjoint closed intervals (possibly degenerate) of slopes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerivativeRange {
    pub components: Vec<(f64, f64)>,
    /// Always set: gaps between slopes are filled wherever no kink separates
    /// them, so the result is the closure of the attained slope set.
    pub closure_used: bool,
}

impl DerivativeRange {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.components.iter().any(|&(a, b)| a - slack <= x && x <= b + slack)
    }

    pub fn min(&self) -> Option<f64> {
        self.components.first().map(|c| c.0)
    }

    pub fn max(&self) -> Option<f64> {
        self.components.last().map(|c| c.1)
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Closure of `ran f'₋ ∪ ran f'₊` for the restriction of `f` to `G`.
pub fn derivative_range(f: &GridFunction, g: OpenInterval) -> Result<DerivativeRange> {
    let idx: Vec<usize> = (0..f.len()).filter(|&i| g.contains(f.xs[i])).collect();
    if idx.is_empty() {
        return Err(Error::InvalidGrid(format!(
            "({}, {}) contains no grid point of `{}`",
            g.lo, g.hi, f.label
        )));
    }
    if let Some(&i) = idx.iter().find(|&&i| !f.values[i].is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "`{}` is not finite at x = {} in G",
            f.label, f.xs[i]
        )));
    }
    if idx.len() == 1 {
        return Ok(DerivativeRange {
            components: Vec::new(),
            closure_used: true,
        });
    }
    let chords: Vec<f64> = idx
        .windows(2)
        .map(|w| (f.values[w[1]] - f.values[w[0]]) / (f.xs[w[1]] - f.xs[w[0]]))
        .collect();
    let mut components = Vec::new();
    let mut start = chords[0];
    for j in 1..chords.len() {
        if is_kink(&chords, j) {
            components.push((start, chords[j - 1]));
            start = chords[j];
        }
    }
    components.push((start, *chords.last().unwrap()));
    // chords of a convex function are nondecreasing; guard against noise
    for c in components.iter_mut() {
        if c.0 > c.1 {
            *c = (c.1, c.0);
        }
    }
    components.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(DerivativeRange {
        components,
        closure_used: true,
    })
}

/// Maximal runs `[a, b]` (grid indices) of finite values.
pub fn finite_runs(f: &GridFunction) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for (i, v) in f.values.iter().enumerate() {
        match (v.is_finite(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, f.len() - 1));
    }
    runs
}

/// `Dom(f) = {f < +∞}` as a union of closed intervals between grid points.
pub fn effective_domain(f: &GridFunction) -> RegionSet {
    finite_runs(f)
        .into_iter()
        .map(|(a, b)| RegionSet::closed(f.xs[a], f.xs[b]))
        .fold(RegionSet::empty(), |acc, r| acc.union(&r))
}

/// `int Dom(f)`: the open runs of [`effective_domain`]; isolated points drop.
pub fn interior_effective_domain(f: &GridFunction) -> RegionSet {
    finite_runs(f)
        .into_iter()
        .filter(|(a, b)| a < b)
        .map(|(a, b)| RegionSet::open(f.xs[a], f.xs[b]))
        .fold(RegionSet::empty(), |acc, r| acc.union(&r))
}

/// Grid points in `Dom(f)`.
pub fn domain_mask(f: &GridFunction) -> Vec<bool> {
    f.values.iter().map(|v| *v < POS_INF).collect()
}

/// Grid points strictly inside a finite run.
pub fn interior_domain_mask(f: &GridFunction) -> Vec<bool> {
    let mut mask = vec![false; f.len()];
    for (a, b) in finite_runs(f) {
        for m in mask.iter_mut().take(b).skip(a + 1) {
            *m = true;
        }
    }
    mask
}

/// `true` when consecutive finite chords are nondecreasing within `tol`.
pub fn is_convex_on_grid(f: &GridFunction, tol: f64) -> bool {
    finite_runs(f).into_iter().all(|(a, b)| {
        let chords: Vec<f64> = (a..b)
            .map(|i| (f.values[i + 1] - f.values[i]) / (f.xs[i + 1] - f.xs[i]))
            .collect();
        chords.windows(2).all(|w| w[1] >= w[0] - tol * (1.0 + w[0].abs()))
    }) && finite_runs(f).len() <= 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    pub holds: bool,
    pub interior_nonempty: bool,
    /// Interior grid points where the slope jumps.
    pub kinks: Vec<f64>,
    /// Finite domain boundaries where the adjacent slope stays below the
    /// divergence threshold, with that slope.
    pub bounded_boundary_slopes: Vec<(f64, f64)>,
}

/// Grid diagnostic for essential smoothness. The grid edges are treated as
/// truncation, not as boundaries of the effective domain.
pub fn essential_smoothness_check(f: &GridFunction) -> SmoothnessReport {
    let runs: Vec<(usize, usize)> = finite_runs(f).into_iter().filter(|(a, b)| a < b).collect();
    let interior_nonempty = !runs.is_empty();
    let mut kinks = Vec::new();
    let mut bounded = Vec::new();
    for &(a, b) in &runs {
        let chords: Vec<f64> = (a..b)
            .map(|i| (f.values[i + 1] - f.values[i]) / (f.xs[i + 1] - f.xs[i]))
            .collect();
        for j in 1..chords.len() {
            if is_kink(&chords, j) {
                kinks.push(f.xs[a + j]);
            }
        }
        if a > 0 && chords[0].abs() < DIVERGENCE_SLOPE {
            bounded.push((f.xs[a], chords[0]));
        }
        if b + 1 < f.len() && chords[chords.len() - 1].abs() < DIVERGENCE_SLOPE {
            bounded.push((f.xs[b], chords[chords.len() - 1]));
        }
    }
    SmoothnessReport {
        holds: interior_nonempty && kinks.is_empty() && bounded.is_empty() && runs.len() == 1,
        interior_nonempty,
        kinks,
        bounded_boundary_slopes: bounded,
    }
}

/// Infimum of the piecewise-linear extension over the closed interval
/// `[lo, hi]`, restricted to cells (and isolated points when `points`).
fn inf_over_span(f: &GridFunction, lo: f64, hi: f64, lo_open: bool, hi_open: bool, points: bool) -> ExtReal {
    let mut best = POS_INF;
    let inside = |x: f64| (if lo_open { x > lo } else { x >= lo }) && (if hi_open { x < hi } else { x <= hi });
    for i in 0..f.len() {
        let v = f.values[i];
        if !v.is_finite() {
            continue;
        }
        let isolated = (i == 0 || !f.values[i - 1].is_finite()) && (i + 1 == f.len() || !f.values[i + 1].is_finite());
        if inside(f.xs[i]) && (points || !isolated) {
            best = best.min(v);
        }
        if i + 1 < f.len() && f.values[i + 1].is_finite() {
            let a = f.xs[i].max(lo);
            let b = f.xs[i + 1].min(hi);
            if a < b || (a == b && inside(a)) {
                best = best.min(f.eval(a)).min(f.eval(b));
            }
        }
    }
    best
}

/// `inf_{y ∈ G} f(y)` for the piecewise-linear extension.
pub fn inf_over_open(f: &GridFunction, g: &RegionSet) -> ExtReal {
    g.intervals()
        .iter()
        .map(|iv| inf_over_span(f, iv.lo, iv.hi, iv.lo_open, iv.hi_open, true))
        .fold(POS_INF, f64::min)
}

/// `inf_{y ∈ G ∩ int Dom f} f(y)`.
pub fn inf_over_open_interior(f: &GridFunction, g: &RegionSet) -> ExtReal {
    let mut best = POS_INF;
    for (a, b) in finite_runs(f).into_iter().filter(|(a, b)| a < b) {
        let (da, db) = (f.xs[a], f.xs[b]);
        for iv in g.intervals() {
            let lo = iv.lo.max(da);
            let hi = iv.hi.min(db);
            if lo < hi {
                best = best.min(inf_over_span(f, lo, hi, true, true, false));
            }
        }
    }
    best
}

/// Both infima of the convexity lemma and whether they agree within `tol`.
pub fn conv_lemma_check(f: &GridFunction, g: &RegionSet, tol: f64) -> (bool, ExtReal, ExtReal) {
    let a = inf_over_open(f, g);
    let b = inf_over_open_interior(f, g);
    (extreal::approx_eq(a, b, tol), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilt::closed_grid;
    use approx::assert_abs_diff_eq;

    fn abs_fn() -> GridFunction {
        GridFunction::from_fn(closed_grid(-3.0, 3.0, 61), "abs", f64::abs).unwrap()
    }

    #[test]
    fn conjugate_of_abs() {
        let dual = closed_grid(-2.0, 2.0, 81);
        let plain = lf_transform(&abs_fn(), &dual).unwrap();
        for (x, v) in dual.iter().zip(plain.values()) {
            let expect = if x.abs() <= 1.0 { 0.0 } else { 3.0 * (x.abs() - 1.0) };
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-12);
        }
        let trunc = lf_transform(&abs_fn().with_support(Support::Truncated), &dual).unwrap();
        for (x, v) in dual.iter().zip(trunc.values()) {
            if x.abs() <= 1.0 + 1e-12 {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
            } else {
                assert_eq!(*v, POS_INF);
            }
        }
        let brute = brute_force_conjugate(&abs_fn().with_support(Support::Truncated), &dual).unwrap();
        for (a, b) in trunc.values().iter().zip(brute.values()) {
            assert!(extreal::approx_eq(*a, *b, 1e-12));
        }
    }

    #[test]
    fn parabola_is_self_conjugate() {
        let f = GridFunction::from_fn(closed_grid(-5.0, 5.0, 2001), "sq", |x| x * x / 2.0).unwrap();
        let dual = closed_grid(-3.0, 3.0, 61);
        let c = lf_transform(&f, &dual).unwrap();
        for (x, v) in dual.iter().zip(c.values()) {
            // interpolation error of the chord is h²/8 with h = 0.005
            assert!((v - x * x / 2.0).abs() <= 0.005f64.powi(2) / 8.0 + 1e-12);
        }
    }

    #[test]
    fn brute_force_special_cases() {
        let mut vals = vec![POS_INF; 5];
        vals[2] = 1.5;
        let f = GridFunction::new(closed_grid(-1.0, 1.0, 5), vals, "pt").unwrap();
        let dual = closed_grid(-2.0, 2.0, 9);
        let c = brute_force_conjugate(&f, &dual).unwrap();
        for (x, v) in dual.iter().zip(c.values()) {
            assert_abs_diff_eq!(*v, 0.0 * x - 1.5, epsilon = 1e-15);
        }
        let zero = GridFunction::from_fn(closed_grid(-1.0, 1.0, 21), "0", |_| 0.0).unwrap();
        let c = brute_force_conjugate(&zero, &dual).unwrap();
        for (x, v) in dual.iter().zip(c.values()) {
            assert_abs_diff_eq!(*v, x.abs(), epsilon = 1e-15);
        }
        let c2 = lf_transform(&zero, &dual).unwrap();
        assert_eq!(c.values(), c2.values());
        let improper = GridFunction::new(vec![0.0, 1.0], vec![POS_INF, POS_INF], "inf").unwrap();
        assert!(lf_transform(&improper, &dual).is_err());
        assert!(brute_force_conjugate(&improper, &dual).is_err());
    }

    #[test]
    fn hull_of_two_vs() {
        // min(|x+1|, |x−1|) on 5 points
        let xs = closed_grid(-2.0, 2.0, 5);
        let f = GridFunction::from_fn(xs, "w", |x| (x + 1.0).abs().min((x - 1.0).abs())).unwrap();
        let h = convex_lsc_hull(&f).unwrap();
        assert_eq!(h.values(), &[1.0, 0.0, 0.0, 0.0, 1.0]);
        let convex = abs_fn();
        for (a, b) in convex_lsc_hull(&convex).unwrap().values().iter().zip(convex.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
        for (a, b) in h.values().iter().zip(f.values()) {
            assert!(a <= b);
        }
    }

    #[test]
    fn one_sided() {
        let f = abs_fn();
        let zero_idx = f.nearest_index(0.0);
        let (l, r) = one_sided_derivatives(&f, zero_idx).unwrap();
        assert_abs_diff_eq!(l, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-9);
        let sq = GridFunction::from_fn(closed_grid(-1.0, 1.0, 201), "sq", |x| x * x / 2.0).unwrap();
        let (l, r) = one_sided_derivatives(&sq, 150).unwrap();
        assert!((l - 0.5).abs() <= 0.01 && (r - 0.5).abs() <= 0.01 && l <= r);
        let flat = GridFunction::from_fn(closed_grid(-2.0, 2.0, 5), "flat", |x| {
            if x.abs() <= 1.0 {
                0.0
            } else {
                POS_INF
            }
        })
        .unwrap();
        assert_eq!(one_sided_derivatives(&flat, 3).unwrap(), (0.0, POS_INF));
        assert!(one_sided_derivatives(&flat, 4).is_err());
    }

    #[test]
    fn derivative_ranges() {
        let g = OpenInterval::new(-2.0, 2.0).unwrap();
        let r = derivative_range(&abs_fn(), g).unwrap();
        assert_eq!(r.components.len(), 2);
        assert_abs_diff_eq!(r.components[0].0, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.components[0].1, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.components[1].0, 1.0, epsilon = 1e-9);
        let zero = GridFunction::from_fn(closed_grid(-1.0, 1.0, 41), "0", |_| 0.0).unwrap();
        let r = derivative_range(&zero, OpenInterval::new(-1.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.components, vec![(0.0, 0.0)]);
        let sq = GridFunction::from_fn(closed_grid(-1.0, 1.0, 401), "sq", |x| x * x / 2.0).unwrap();
        let r = derivative_range(&sq, OpenInterval::new(-1.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.components.len(), 1);
        assert!((r.components[0].0 + 1.0).abs() < 0.01 && (r.components[0].1 - 1.0).abs() < 0.01);
        assert!(derivative_range(&sq, OpenInterval::new(5.0, 6.0).unwrap()).is_err());
    }

    #[test]
    fn domains() {
        let mut vals = vec![POS_INF; 7];
        vals[3] = 0.0;
        let f = GridFunction::new(closed_grid(-3.0, 3.0, 7), vals, "pt").unwrap();
        assert_eq!(effective_domain(&f), RegionSet::point(0.0));
        assert!(interior_effective_domain(&f).is_empty());
        let full = abs_fn();
        assert_eq!(effective_domain(&full), RegionSet::closed(-3.0, 3.0));
        assert_eq!(interior_effective_domain(&full), RegionSet::open(-3.0, 3.0));
        let m = interior_domain_mask(&full);
        assert!(!m[0] && m[1] && !m[60]);
    }

    #[test]
    fn smoothness() {
        assert!(!essential_smoothness_check(&abs_fn()).holds);
        assert_eq!(essential_smoothness_check(&abs_fn()).kinks.len(), 1);
        let sq = GridFunction::from_fn(closed_grid(-3.0, 3.0, 301), "sq", |x| x * x / 2.0).unwrap();
        assert!(essential_smoothness_check(&sq).holds);
        let flat = GridFunction::from_fn(closed_grid(-2.0, 2.0, 41), "flat", |x| {
            if x.abs() <= 1.0 + 1e-12 {
                0.0
            } else {
                POS_INF
            }
        })
        .unwrap();
        let rep = essential_smoothness_check(&flat);
        assert!(!rep.holds);
        assert_eq!(rep.bounded_boundary_slopes.len(), 2);
    }

    #[test]
    fn conv_lemma_examples() {
        let f = abs_fn();
        let (ok, a, b) = conv_lemma_check(&f, &RegionSet::open(0.5, 3.0), 1e-12);
        assert!(ok);
        assert_abs_diff_eq!(a, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.5, epsilon = 1e-12);
        let dom = GridFunction::from_fn(closed_grid(-2.0, 2.0, 41), "d", |x| {
            if x.abs() <= 1.0 + 1e-12 {
                -x
            } else {
                POS_INF
            }
        })
        .unwrap();
        let (ok, a, b) = conv_lemma_check(&dom, &RegionSet::open(0.95, 2.0), 1e-12);
        assert!(ok);
        assert_abs_diff_eq!(a, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, -1.0, epsilon = 1e-12);
        let (ok, a, b) = conv_lemma_check(&dom, &RegionSet::open(5.0, 6.0), 1e-12);
        assert!(ok && a == POS_INF && b == POS_INF);
    }

    #[test]
    fn csv_roundtrip_and_errors() {
        let mut f = abs_fn();
        f = GridFunction::new(
            f.xs().to_vec(),
            {
                let mut v = f.values().to_vec();
                v[0] = POS_INF;
                v
            },
            "abs",
        )
        .unwrap();
        let back = GridFunction::parse_csv(&f.to_csv(), "mem").unwrap();
        assert_eq!(back.xs(), f.xs());
        assert_eq!(back.values(), f.values());
        let e = GridFunction::parse_csv("x,value\n0,1\n1,zz\n", "bad.csv").unwrap_err();
        assert!(e.to_string().contains("bad.csv:3"), "{e}");
        assert!(GridFunction::parse_csv("x,value\n1,0\n0,1\n", "m").is_err());
    }
}
