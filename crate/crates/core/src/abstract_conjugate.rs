//! The abstract conjugate `Λ|𝒮*(x) = sup_{h∈𝒮} {h(x) − Λ(h)}` over finite
//! tilt families.

use rayon::prelude::*;

use crate::convex::{lf_transform, EntryFlag, GridFunction, Support};
use crate::error::{Error, Result};
use crate::extreal::{self, ExtReal, NEG_INF, POS_INF};
use crate::free_energy::{grid_from_estimates, lambda_family_table_on, LimitEstimate, WindowSample};
use crate::tilt::{TiltFamily, TiltFunction};

/// `Λ` evaluated on every member of a family.
#[derive(Debug, Clone)]
pub struct FamilyEvaluation {
    pub family: TiltFamily,
    pub members: Vec<TiltFunction>,
    pub lambdas: Vec<LimitEstimate>,
    pub all_exist: bool,
}

impl FamilyEvaluation {
    pub fn new(family: TiltFamily, members: Vec<TiltFunction>, lambdas: Vec<LimitEstimate>) -> Self {
        assert_eq!(members.len(), lambdas.len());
        let all_exist = lambdas.iter().all(|l| l.converged);
        Self {
            family,
            members,
            lambdas,
            all_exist,
        }
    }

    fn values(&self) -> Result<Vec<ExtReal>> {
        self.members
            .iter()
            .zip(&self.lambdas)
            .map(|(h, e)| {
                e.value().ok_or_else(|| {
                    Error::NotConverged(format!(
                        "Λ({}) did not settle: spread {:.3e} over the window",
                        h.label(),
                        e.spread
                    ))
                })
            })
            .collect()
    }
}

/// Raw sup of `h(x) − Λ(h)` on `x_grid`; no clamping at `−Λ̄(0)`.
pub fn abstract_lf(fe: &FamilyEvaluation, x_grid: &[f64]) -> Result<GridFunction> {
    let lambdas = fe.values()?;
    let values: Vec<ExtReal> = x_grid
        .par_iter()
        .map(|&x| {
            extreal::sup(
                fe.members
                    .iter()
                    .zip(&lambdas)
                    .map(|(h, &l)| extreal::sub(h.eval(x), l)),
            )
        })
        .collect();
    GridFunction::new(x_grid.to_vec(), values, "Λ|S*")
}

/// `L|G*` through the grid transform of the sampled `L`, for a family that is
/// a single linear block on `G`.
pub fn linear_restriction_conjugate(fe: &FamilyEvaluation, x_grid: &[f64], support: Support) -> Result<GridFunction> {
    let g = fe
        .family
        .linear_interval()
        .ok_or_else(|| Error::InvalidFamily("family is not a single linear block".into()))?;
    fe.values()?;
    let xs: Vec<f64> = fe.members.iter().map(|h| h.slopes().map_or(0.0, |s| s.0)).collect();
    let l = grid_from_estimates(xs, &fe.lambdas, "L")?.with_support(support);
    let out = lf_transform(&l, x_grid)?;
    let label = format!("L|({:?},{:?})*", g.lo, g.hi);
    Ok(out.with_label(label))
}

/// [`abstract_lf`] on a family and on its doubled version.
#[derive(Debug, Clone)]
pub struct StableConjugate {
    /// Doubled-family values, with growing entries replaced by `+∞`.
    pub function: GridFunction,
    pub base: GridFunction,
    pub doubled: GridFunction,
    /// `doubled − base` per grid point.
    pub growth: Vec<f64>,
}

impl StableConjugate {
    /// Largest change among entries kept finite.
    pub fn max_finite_growth(&self) -> f64 {
        self.growth
            .iter()
            .zip(self.function.values())
            .filter(|(_, v)| v.is_finite())
            .map(|(g, _)| *g)
            .fold(0.0, f64::max)
    }
}

/// Declares `+∞` wherever doubling the family bounds raises the sup by more
/// than `tol`. Finite values that do not move are kept.
pub fn abstract_lf_stable(ws: &WindowSample, family: &TiltFamily, x_grid: &[f64], tol: f64) -> Result<StableConjugate> {
    let base = abstract_lf(&lambda_family_table_on(ws, family, tol), x_grid)?;
    let doubled = abstract_lf(&lambda_family_table_on(ws, &family.doubled(), tol), x_grid)?;
    let mut values = Vec::with_capacity(x_grid.len());
    let mut flags = Vec::with_capacity(x_grid.len());
    let mut growth = Vec::with_capacity(x_grid.len());
    for (&b, &d) in base.values().iter().zip(doubled.values()) {
        let g = if b.is_finite() && d.is_finite() {
            d - b
        } else if b == d {
            0.0
        } else {
            POS_INF
        };
        growth.push(g);
        if d == POS_INF || g > tol {
            values.push(POS_INF);
            flags.push(if d == POS_INF {
                EntryFlag::Exact
            } else {
                EntryFlag::Divergent
            });
        } else {
            values.push(d);
            flags.push(EntryFlag::Exact);
        }
    }
    debug_assert!(!values.contains(&NEG_INF) || base.values().contains(&NEG_INF));
    let function = GridFunction::new(x_grid.to_vec(), values, "Λ|S*")?.with_flags(flags);
    Ok(StableConjugate {
        function,
        base,
        doubled,
        growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_energy::WindowSpec;
    use crate::net::{coin_example_net, demzei_example_net, DemZeiSchedule};
    use crate::tilt::{closed_grid, linear_family, qn_family, two_slope_family, OpenInterval};
    use approx::assert_abs_diff_eq;

    fn exact(v: f64) -> LimitEstimate {
        LimitEstimate::from_samples(vec![(1.0, v), (0.5, v)], 0, 1e-9)
    }

    #[test]
    fn zero_tilt_gives_zero() {
        let fe = FamilyEvaluation::new(TiltFamily::empty(), vec![TiltFunction::zero()], vec![exact(0.0)]);
        let f = abstract_lf(&fe, &closed_grid(-2.0, 2.0, 9)).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn extended_arithmetic() {
        let fe = FamilyEvaluation::new(
            TiltFamily::empty(),
            vec![TiltFunction::Linear(1.0), TiltFunction::Linear(-1.0)],
            vec![exact(POS_INF), exact(0.5)],
        );
        let f = abstract_lf(&fe, &[2.0]).unwrap();
        assert_eq!(f.values(), &[-2.5]);
        let fe = FamilyEvaluation::new(TiltFamily::empty(), vec![TiltFunction::zero()], vec![exact(NEG_INF)]);
        assert_eq!(abstract_lf(&fe, &[0.0]).unwrap().values(), &[POS_INF]);
        let bad = LimitEstimate::from_samples(vec![(1.0, 0.0), (0.5, 1.0)], 0, 1e-9);
        let fe = FamilyEvaluation::new(TiltFamily::empty(), vec![TiltFunction::zero()], vec![bad]);
        assert!(!fe.all_exist);
        assert!(abstract_lf(&fe, &[0.0]).is_err());
    }

    #[test]
    fn single_member_is_linear() {
        let g = OpenInterval::new(0.0, 1.0).unwrap();
        let family = linear_family(g, 2).unwrap();
        let members = family.members();
        let fe = FamilyEvaluation::new(family, members.clone(), vec![exact(0.25), exact(POS_INF)]);
        let xs = closed_grid(-1.0, 1.0, 5);
        let f = abstract_lf(&fe, &xs).unwrap();
        let l0 = members[0].slopes().unwrap().0;
        for (x, v) in xs.iter().zip(f.values()) {
            assert_abs_diff_eq!(*v, l0 * x - 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn coin_two_slope_family() {
        let ws = WindowSample::collect(&coin_example_net(), WindowSpec::new(100, 1_000_000).unwrap()).unwrap();
        let family = two_slope_family((-2.0, 2.0), (-2.0, 2.0), 9).unwrap();
        let xs = closed_grid(-1.5, 1.5, 7);
        let s = abstract_lf_stable(&ws, &family, &xs, 1e-3).unwrap();
        for (x, v) in xs.iter().zip(s.function.values()) {
            if x.abs() == 1.0 {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-3);
            } else {
                assert_eq!(*v, POS_INF, "x = {x}");
            }
        }
    }

    #[test]
    fn demzei_qn_family() {
        let net = demzei_example_net(DemZeiSchedule::default()).unwrap();
        let ws = WindowSample::collect(&net, WindowSpec::new(100, 1_000_000).unwrap()).unwrap();
        let g = OpenInterval::new(-1.0, 1.0).unwrap();
        let family = qn_family(10).unwrap().union(linear_family(g, 21).unwrap());
        let xs = closed_grid(-1.0, 1.0, 9);
        let s = abstract_lf_stable(&ws, &family, &xs, 1e-3).unwrap();
        for (x, v) in xs.iter().zip(s.function.values()) {
            if *x == 0.0 {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-3);
            } else {
                assert_eq!(*v, POS_INF, "x = {x}");
            }
        }
        let lin = lambda_family_table_on(&ws, &linear_family(g, 21).unwrap(), 1e-3);
        let l = linear_restriction_conjugate(&lin, &xs, Support::Bounded).unwrap();
        let top = 1.0 - 2.0 / 22.0;
        for (x, v) in xs.iter().zip(l.values()) {
            assert_abs_diff_eq!(*v, top * x.abs(), epsilon = 1e-6);
        }
    }
}
