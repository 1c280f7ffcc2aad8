//! Window estimates of the local rate functions and checks of the large
//! deviation bounds, Varadhan's identity and the derivative-range conditions.
//!
//! `l₀(x) = −log inf_{G∋x} limsup μ^t(G)` and `l₁(x) = −log inf_{G∋x} liminf μ^t(G)`
//! are approximated with open balls `B(x, δ)` over a decreasing δ schedule.

use rayon::prelude::*;

use crate::convex::{
    derivative_range, domain_mask, interior_domain_mask, is_convex_on_grid, DerivativeRange, EntryFlag, GridFunction,
};
use crate::error::{Error, Result};
use crate::extreal::{self, ExtReal, NEG_INF, POS_INF};
use crate::free_energy::{lambda_on, LimitEstimate, WindowSample, WindowSpec};
use crate::measure::{region_log_power_mass, RegionSet};
use crate::tilt::{OpenInterval, TiltFunction};

/// Strict-inequality slack for the filter `{l₁ > −Λ̄(0)}`.
pub const FILTER_TOL: f64 = 1e-9;
/// Label carried by derivative-bound reports: the check uses the rate
/// estimate of the whole net, not of a subnet.
pub const SURROGATE_LABEL: &str = "full-net surrogate";

/// `{2⁻¹, …, 2⁻¹⁰}`.
pub fn default_deltas() -> Vec<f64> {
    (1..=10).map(|i| 0.5f64.powi(i)).collect()
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGrid(
            "deltas must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    /// `l₀`, from the limsup of ball masses.
    Lower,
    /// `l₁`, from the liminf of ball masses.
    Upper,
}

/// Per-δ estimates of `−t·log μ(B(x, δ))`: `(δ, l₀-candidate, l₁-candidate)`.
pub fn local_rate_profile(ws: &WindowSample, x: f64, deltas: &[f64]) -> Vec<(f64, ExtReal, ExtReal)> {
    deltas
        .iter()
        .map(|&d| {
            let ball = RegionSet::ball(x, d);
            let e = ws.estimate(0.0, |p| -region_log_power_mass(&p.measure, &ball, p.t));
            (d, e.liminf_est, e.limsup_est)
        })
        .collect()
}

pub fn local_rate_on(ws: &WindowSample, x: f64, deltas: &[f64], mode: RateMode) -> Result<ExtReal> {
    check_deltas(deltas)?;
    let profile = local_rate_profile(ws, x, deltas);
    Ok(extreal::sup(profile.iter().map(|&(_, lo, hi)| match mode {
        RateMode::Lower => lo,
        RateMode::Upper => hi,
    })))
}

pub fn local_rate(
    net: &crate::net::ScaledMeasureNet,
    x: f64,
    deltas: &[f64],
    window: WindowSpec,
    mode: RateMode,
) -> Result<ExtReal> {
    local_rate_on(&WindowSample::collect(net, window)?, x, deltas, mode)
}

#[derive(Debug, Clone)]
pub struct RateFunctionEstimate {
    pub grid: Vec<f64>,
    pub l0: GridFunction,
    pub l1: GridFunction,
    pub delta_schedule: Vec<f64>,
    pub window: WindowSpec,
}

pub fn rate_grid(
    net: &crate::net::ScaledMeasureNet,
    grid: &[f64],
    deltas: &[f64],
    window: WindowSpec,
) -> Result<RateFunctionEstimate> {
    rate_grid_on(&WindowSample::collect(net, window)?, grid, deltas)
}

pub fn rate_grid_on(ws: &WindowSample, grid: &[f64], deltas: &[f64]) -> Result<RateFunctionEstimate> {
    check_deltas(deltas)?;
    let pairs: Vec<(ExtReal, ExtReal)> = grid
        .par_iter()
        .map(|&x| {
            let p = local_rate_profile(ws, x, deltas);
            (extreal::sup(p.iter().map(|r| r.1)), extreal::sup(p.iter().map(|r| r.2)))
        })
        .collect();
    let (l0, l1): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(RateFunctionEstimate {
        grid: grid.to_vec(),
        l0: GridFunction::new(grid.to_vec(), l0, "l0")?,
        l1: GridFunction::new(grid.to_vec(), l1, "l1")?,
        delta_schedule: deltas.to_vec(),
        window: ws.window,
    })
}

#[derive(Debug, Clone)]
pub struct VagueLdp {
    pub holds: bool,
    /// `l₀`, the rate function when the check holds.
    pub j: GridFunction,
    pub max_gap: f64,
    pub witnesses: Vec<(f64, String)>,
}

/// A vague principle holds iff `l₀ = l₁`.
pub fn vague_ldp_check(rfe: &RateFunctionEstimate, tol: f64) -> VagueLdp {
    let mut witnesses = Vec::new();
    let mut max_gap: f64 = 0.0;
    for ((&x, &a), &b) in rfe.grid.iter().zip(rfe.l0.values()).zip(rfe.l1.values()) {
        let d = extreal::distance(a, b);
        max_gap = max_gap.max(d);
        if d > tol {
            witnesses.push((x, format!("l0 = {}, l1 = {}", extreal::format(a), extreal::format(b))));
        }
    }
    VagueLdp {
        holds: witnesses.is_empty(),
        j: rfe.l0.clone().with_label("J"),
        max_gap,
        witnesses,
    }
}

#[derive(Debug, Clone)]
pub struct TightnessReport {
    pub holds: bool,
    /// `(ε, smallest R that works, estimated limsup of μ^t([−R,R]ᶜ) at that R)`.
    pub table: Vec<(f64, Option<f64>, f64)>,
}

pub fn exponential_tightness_check(ws: &WindowSample, eps_list: &[f64], r_schedule: &[f64]) -> TightnessReport {
    let masses: Vec<f64> = r_schedule
        .iter()
        .map(|&r| {
            let out = RegionSet::outside(r);
            let e = ws.estimate(0.0, |p| region_log_power_mass(&p.measure, &out, p.t));
            e.limsup_est.exp()
        })
        .collect();
    let table: Vec<(f64, Option<f64>, f64)> = eps_list
        .iter()
        .map(|&eps| match r_schedule.iter().zip(&masses).find(|(_, &m)| m < eps) {
            Some((&r, &m)) => (eps, Some(r), m),
            None => (eps, None, masses.last().copied().unwrap_or(1.0)),
        })
        .collect();
    TightnessReport {
        holds: table.iter().all(|r| r.1.is_some()),
        table,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Open,
    Closed,
}

#[derive(Debug, Clone)]
pub struct BoundRow {
    pub kind: RegionKind,
    pub region: RegionSet,
    /// limsup (closed) or liminf (open) estimate of `μ^t(region)`.
    pub measured: f64,
    /// `sup_{x ∈ region} e^{−J(x)}` over grid points.
    pub capacity: f64,
    pub holds: bool,
    pub violation: f64,
}

/// Upper bound on closed sets, lower bound on open sets.
pub fn ldp_bounds_check(
    ws: &WindowSample,
    j: &GridFunction,
    regions: &[(RegionSet, RegionKind)],
    tol: f64,
) -> Vec<BoundRow> {
    regions
        .iter()
        .map(|(r, kind)| {
            let capacity = j
                .xs()
                .iter()
                .zip(j.values())
                .filter(|(x, _)| r.contains(**x))
                .map(|(_, &v)| (-v).exp())
                .fold(0.0, f64::max);
            let e = ws.estimate(0.0, |p| region_log_power_mass(&p.measure, r, p.t));
            let (measured, violation) = match kind {
                RegionKind::Closed => {
                    let m = e.limsup_est.exp();
                    (m, m - capacity)
                }
                RegionKind::Open => {
                    let m = e.liminf_est.exp();
                    (m, capacity - m)
                }
            };
            BoundRow {
                kind: *kind,
                region: r.clone(),
                measured,
                capacity,
                holds: violation <= tol,
                violation: violation.max(0.0),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct VaradhanReport {
    pub holds: bool,
    /// `Λ(h)`.
    pub lhs: ExtReal,
    /// `sup_x {h(x) − l₁(x)}` over the rate grid.
    pub rhs: ExtReal,
}

pub fn varadhan_identity_check(
    ws: &WindowSample,
    h: &TiltFunction,
    rfe: &RateFunctionEstimate,
    tol: f64,
) -> Result<VaradhanReport> {
    let est: LimitEstimate = lambda_on(ws, h, tol);
    let lhs = est
        .value()
        .ok_or_else(|| Error::NotConverged(format!("Λ({}) spread {:.3e}", h.label(), est.spread)))?;
    let rhs = extreal::sup(
        rfe.grid
            .iter()
            .zip(rfe.l1.values())
            .map(|(&x, &l)| extreal::sub(h.eval(x), l)),
    );
    Ok(VaradhanReport {
        holds: extreal::approx_eq(lhs, rhs, tol),
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone)]
pub struct SlopeBound {
    pub side: &'static str,
    pub slope: ExtReal,
    /// Rate-grid point used in place of the slope.
    pub snapped: f64,
    pub l1: ExtReal,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct DerivativeBoundReport {
    pub holds: bool,
    pub lambda0: f64,
    pub rows: Vec<SlopeBound>,
    pub label: &'static str,
}

/// `l₁(s) ≤ λ₀s − L(λ₀)` for both one-sided slopes `s` of `L` at grid index
/// `at`. Infinite slopes at the ends of `L`'s grid carry no information and
/// are skipped.
pub fn derivative_bound_check(
    l: &GridFunction,
    rfe: &RateFunctionEstimate,
    at: usize,
    tol: f64,
) -> Result<DerivativeBoundReport> {
    let (left, right) = crate::convex::one_sided_derivatives(l, at)?;
    let lambda0 = l.xs()[at];
    let l_at = l.values()[at];
    let (lo, hi) = (rfe.grid[0], *rfe.grid.last().unwrap());
    let step = rfe.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let mut rows = Vec::new();
    for (side, s) in [("left", left), ("right", right)] {
        if s.is_infinite() {
            continue;
        }
        if s < lo - step || s > hi + step {
            return Err(Error::InvalidGrid(format!(
                "{side} slope {s} at λ0 = {lambda0} lies outside the rate grid [{lo}, {hi}]"
            )));
        }
        let i = rfe.l1.nearest_index(s);
        let snapped = rfe.grid[i];
        let l1 = rfe.l1.values()[i];
        let bound = lambda0 * snapped - l_at;
        rows.push(SlopeBound {
            side,
            slope: s,
            snapped,
            l1,
            bound,
            holds: l1 <= bound + tol,
        });
    }
    Ok(DerivativeBoundReport {
        holds: rows.iter().all(|r| r.holds),
        lambda0,
        rows,
        label: SURROGATE_LABEL,
    })
}

/// Grid functions the derivative-range conditions refer to, all on the rate grid.
#[derive(Debug, Clone)]
pub struct RangeTargets<'a> {
    pub l0: &'a GridFunction,
    pub l1: &'a GridFunction,
    /// `Λ|𝒮*` for the family in use.
    pub abstract_star: Option<&'a GridFunction>,
    /// `L|G*`.
    pub l_star: Option<&'a GridFunction>,
    /// The rate function when a vague principle was confirmed.
    pub j: Option<&'a GridFunction>,
}

#[derive(Debug, Clone)]
pub struct ConclusionCheck {
    pub claim_id: String,
    pub holds: bool,
    pub max_violation: f64,
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub condition_id: String,
    pub hypothesis_holds: bool,
    pub witnesses: Vec<(f64, String)>,
    pub conclusions_checked: Vec<ConclusionCheck>,
    /// Inclusion slack in `x` (one rate-grid cell).
    pub slack: f64,
    pub closure_used: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Base {
    L0,
    AbstractStar,
    LStar,
}

struct Condition {
    id: &'static str,
    base: Base,
    interior: bool,
    filter: bool,
    /// Which set of conclusions follows from the hypothesis.
    part: char,
}

const CONDITIONS: &[Condition] = &[
    Condition {
        id: "open-problem-a",
        base: Base::L0,
        interior: false,
        filter: true,
        part: 'a',
    },
    Condition {
        id: "open-problem-b",
        base: Base::L0,
        interior: false,
        filter: false,
        part: 'b',
    },
    Condition {
        id: "open-problem-c",
        base: Base::AbstractStar,
        interior: false,
        filter: true,
        part: 'c',
    },
    Condition {
        id: "open-problem-d",
        base: Base::AbstractStar,
        interior: false,
        filter: false,
        part: 'd',
    },
    Condition {
        id: "open-problem-e-a",
        base: Base::L0,
        interior: true,
        filter: true,
        part: 'a',
    },
    Condition {
        id: "open-problem-e-b",
        base: Base::L0,
        interior: true,
        filter: false,
        part: 'b',
    },
    Condition {
        id: "open-problem-f-c",
        base: Base::AbstractStar,
        interior: true,
        filter: true,
        part: 'c',
    },
    Condition {
        id: "open-problem-f-d",
        base: Base::AbstractStar,
        interior: true,
        filter: false,
        part: 'd',
    },
    Condition {
        id: "GE-a",
        base: Base::LStar,
        interior: true,
        filter: false,
        part: 'g',
    },
    Condition {
        id: "GE-b",
        base: Base::LStar,
        interior: true,
        filter: true,
        part: 'G',
    },
    Condition {
        id: "ellis",
        base: Base::AbstractStar,
        interior: false,
        filter: true,
        part: 'e',
    },
];

/// Every condition identifier understood by [`range_condition_check`].
pub fn condition_ids() -> Vec<&'static str> {
    CONDITIONS.iter().map(|c| c.id).collect()
}

fn check_shared_grid(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.xs() != b.xs() {
        return Err(Error::GridMismatch(format!(
            "`{}` and `{}` live on different grids",
            a.label(),
            b.label()
        )));
    }
    Ok(())
}

fn mask_points(f: &GridFunction, mask: &[bool]) -> Vec<f64> {
    f.xs().iter().zip(mask).filter(|(_, &m)| m).map(|(&x, _)| x).collect()
}

/// Checks the derivative-range inclusion `ran L|G'₋ ∪ ran L|G'₊ ⊇ target` for
/// `condition_id`, and, when it holds and the needed functions are present,
/// the equalities the corresponding statement concludes.
pub fn range_condition_check(
    l_on_g: &GridFunction,
    g: OpenInterval,
    targets: &RangeTargets<'_>,
    lambda0_bar: ExtReal,
    condition_id: &str,
    tol: f64,
) -> Result<ConditionReport> {
    let cond = CONDITIONS
        .iter()
        .find(|c| c.id == condition_id)
        .ok_or_else(|| Error::InvalidFamily(format!("unknown condition `{condition_id}`")))?;
    let rate = targets.l1;
    check_shared_grid(targets.l0, rate)?;
    for f in [targets.abstract_star, targets.l_star, targets.j].into_iter().flatten() {
        check_shared_grid(f, rate)?;
    }
    let range = derivative_range(l_on_g, g)?;
    let xs = rate.xs();
    let slack = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let mut notes = Vec::new();
    let mut witnesses = Vec::new();

    let base = match cond.base {
        Base::L0 => Some(targets.l0),
        Base::AbstractStar => targets.abstract_star,
        Base::LStar => targets.l_star,
    }
    .ok_or_else(|| Error::GridMismatch(format!("`{condition_id}` needs a function that was not computed")))?;

    // the interior variants carry convexity hypotheses of their own
    let convex_needed = match (cond.interior, cond.base) {
        (true, Base::L0) => Some("l0 proper convex"),
        (true, Base::AbstractStar) => Some("Λ|S* proper convex lsc"),
        _ => None,
    };
    let mut extra_ok = true;
    if let Some(what) = convex_needed {
        let ok = base.is_proper() && is_convex_on_grid(base, 1e-9);
        notes.push(format!(
            "{what}: {}",
            if ok { "yes (grid test)" } else { "no (grid test)" }
        ));
        if !ok {
            extra_ok = false;
            witnesses.push((NEG_INF, format!("{what} fails on the grid")));
        }
    }
    let zero_in_g = g.contains(0.0);
    if matches!(cond.part, 'G' | 'e') && !zero_in_g {
        extra_ok = false;
        witnesses.push((0.0, "0 is not in G".to_string()));
    }

    let mut target = if cond.interior {
        interior_domain_mask(base)
    } else {
        domain_mask(base)
    };
    if cond.filter {
        let floor = -lambda0_bar;
        for (m, &v) in target.iter_mut().zip(rate.values()) {
            *m = *m && v > floor + FILTER_TOL;
        }
    }
    for x in mask_points(rate, &target) {
        if !range.contains(x, slack) {
            witnesses.push((x, "not in the closure of the derivative range".into()));
        }
    }
    witnesses.sort_by(|a, b| a.0.total_cmp(&b.0));
    let hypothesis_holds = extra_ok && witnesses.is_empty();
    if range.closure_used {
        notes.push("closure used".into());
    }

    let mut conclusions = Vec::new();
    if hypothesis_holds {
        if let Some(j) = targets.j {
            conclusions = conclusions_for(cond.part, j, targets, lambda0_bar, zero_in_g, cond.interior, tol);
        } else {
            notes.push("conclusions not checked: J unavailable".into());
        }
    }
    Ok(ConditionReport {
        condition_id: cond.id.to_string(),
        hypothesis_holds,
        witnesses,
        conclusions_checked: conclusions,
        slack,
        closure_used: range.closure_used,
        notes,
    })
}

/// The derivative range used by [`range_condition_check`], exposed for reports.
pub fn condition_range(l_on_g: &GridFunction, g: OpenInterval) -> Result<DerivativeRange> {
    derivative_range(l_on_g, g)
}

fn conclusions_for(
    part: char,
    j: &GridFunction,
    t: &RangeTargets<'_>,
    lambda0_bar: ExtReal,
    zero_in_g: bool,
    interior: bool,
    tol: f64,
) -> Vec<ConclusionCheck> {
    let floor = -lambda0_bar;
    let all = vec![true; j.len()];
    let dom_j = if interior {
        interior_domain_mask(j)
    } else {
        domain_mask(j)
    };
    let above: Vec<bool> = j.values().iter().map(|&v| v > floor + FILTER_TOL).collect();
    let and = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(x, y)| *x && *y).collect::<Vec<bool>>();
    let mut out = Vec::new();
    let mut push = |id: &str, other: Option<&GridFunction>, mask: &[bool]| {
        if let Some(o) = other {
            out.push(compare_on_mask(id, j, o, mask, tol));
        }
    };
    match part {
        'a' | 'b' => {
            let mask = if part == 'a' && !zero_in_g {
                and(&dom_j, &above)
            } else {
                dom_j.clone()
            };
            push("J=L|G* on Dom(J)", t.l_star, &mask);
            push("J=Λ|S* on Dom(J)", t.abstract_star, &mask);
        }
        'c' | 'd' | 'e' => {
            if let Some(s) = t.abstract_star {
                let dom_s = if interior {
                    interior_domain_mask(s)
                } else {
                    domain_mask(s)
                };
                if part == 'c' && !zero_in_g {
                    push("J=Λ|S* on {J>−Λ(0)}", t.abstract_star, &above);
                    push("J=L|G* on Dom(Λ|S*)∩{J>−Λ(0)}", t.l_star, &and(&dom_s, &above));
                } else {
                    push("J=Λ|S*", t.abstract_star, &all);
                    push("J=L|G* on Dom(J)", t.l_star, &dom_j);
                }
            }
        }
        _ => push("J=L|G*", t.l_star, &all),
    }
    out
}

/// `max |a − b|` over the grid points in `mask`, with matching infinities
/// counting as equal.
pub fn compare_on_mask(claim_id: &str, a: &GridFunction, b: &GridFunction, mask: &[bool], tol: f64) -> ConclusionCheck {
    let max_violation = a
        .values()
        .iter()
        .zip(b.values())
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((&x, &y), _)| extreal::distance(x, y))
        .fold(0.0, f64::max);
    ConclusionCheck {
        claim_id: claim_id.to_string(),
        holds: max_violation <= tol,
        max_violation,
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub claim_id: String,
    pub mask: String,
    pub holds: bool,
    pub max_violation: f64,
    /// Largest difference outside the mask; informational, since the
    /// statements allow disagreement there.
    pub outside_difference: f64,
}

/// Compares `J` with `L|G*` and `Λ|𝒮*` on each named region.
pub fn rate_comparison(
    j: &GridFunction,
    l_star: &GridFunction,
    abstract_star: Option<&GridFunction>,
    masks: &[(String, RegionSet)],
    tol: f64,
) -> Result<Vec<ComparisonRow>> {
    check_shared_grid(j, l_star)?;
    if let Some(s) = abstract_star {
        check_shared_grid(j, s)?;
    }
    let mut rows = Vec::new();
    for (name, region) in masks {
        let mask: Vec<bool> = j.xs().iter().map(|&x| region.contains(x)).collect();
        let outside: Vec<bool> = mask.iter().map(|m| !m).collect();
        let mut others = vec![("J=L|G*", l_star)];
        if let Some(s) = abstract_star {
            others.push(("J=Λ|S*", s));
        }
        for (id, other) in others {
            let inside = compare_on_mask(id, j, other, &mask, tol);
            let out = compare_on_mask(id, j, other, &outside, tol);
            rows.push(ComparisonRow {
                claim_id: id.to_string(),
                mask: name.clone(),
                holds: inside.holds,
                max_violation: inside.max_violation,
                outside_difference: out.max_violation,
            });
        }
    }
    Ok(rows)
}

/// Entries flagged `+∞` by divergence detection or truncation.
pub fn flagged_infinite(f: &GridFunction) -> Vec<bool> {
    f.values()
        .iter()
        .zip(f.flags())
        .map(|(&v, &fl)| v == POS_INF && fl != EntryFlag::NotConverged)
        .collect()
}
