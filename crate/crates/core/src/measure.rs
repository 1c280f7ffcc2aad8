//! Finite-support sub-probability measures and the powered quantities
//! `t·log ∫ e^{h/t} dμ` and `μ(Y)^t`.
//!
//! Masses are held in log scale: the example nets carry masses such as
//! `e^{−k²}` which vanish in linear scale long before the window ends.

use std::path::Path;

use crate::error::{Error, Result};
use crate::extreal::{self, ExtReal, NEG_INF, POS_INF};
use crate::tilt::TiltFunction;

/// Atoms closer than this are merged at construction.
pub const MERGE_TOL: f64 = 1e-12;
const MASS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSupportMeasure {
    locations: Vec<f64>,
    log_masses: Vec<f64>,
}

impl FiniteSupportMeasure {
    pub fn zero() -> Self {
        Self {
            locations: Vec::new(),
            log_masses: Vec::new(),
        }
    }

    pub fn dirac(at: f64, mass: f64) -> Result<Self> {
        Self::from_atoms(vec![(at, mass)])
    }

    /// Builds a measure from `(location, mass)` pairs in any order.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut logs = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::InvalidMeasure(format!("mass {m} at {x} is not positive")));
            }
            logs.push((x, m.ln()));
        }
        Self::from_log_atoms(logs)
    }

    /// Builds a measure from `(location, log mass)` pairs in any order.
    pub fn from_log_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, lm) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidMeasure(format!("location {x} is not finite")));
            }
            if lm.is_nan() || lm == NEG_INF || lm == POS_INF {
                return Err(Error::InvalidMeasure(format!("log mass {lm} at {x}")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut locations: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut log_masses: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, lm) in atoms {
            match locations.last() {
                Some(&last) if (x - last).abs() <= MERGE_TOL => {
                    let i = log_masses.len() - 1;
                    log_masses[i] = extreal::log_add_exp(log_masses[i], lm);
                }
                _ => {
                    locations.push(x);
                    log_masses.push(lm);
                }
            }
        }
        let m = Self { locations, log_masses };
        if m.log_total_mass() > MASS_SLACK {
            return Err(Error::InvalidMeasure(format!(
                "total mass {} exceeds 1",
                m.total_mass()
            )));
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn log_masses(&self) -> &[f64] {
        &self.log_masses
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.locations
            .iter()
            .zip(&self.log_masses)
            .map(|(&x, &lm)| (x, lm.exp()))
    }

    pub fn log_total_mass(&self) -> ExtReal {
        extreal::log_sum_exp_slice(&self.log_masses)
    }

    pub fn total_mass(&self) -> f64 {
        self.log_total_mass().exp()
    }

    /// `log μ(r)`.
    pub fn log_mass_in(&self, r: &RegionSet) -> ExtReal {
        let mut terms = Vec::new();
        for iv in &r.intervals {
            let (a, b) = iv.index_range(&self.locations);
            terms.extend_from_slice(&self.log_masses[a..b]);
        }
        extreal::log_sum_exp_slice(&terms)
    }

    /// `t·log ∫ e^{h/t} dμ`.
    pub fn exp_power_integral(&self, h: &TiltFunction, t: f64) -> ExtReal {
        exp_power_integral(self, h, t)
    }
}

/// `t·log Σᵢ mᵢ e^{h(xᵢ)/t}`, computed with the maximal exponent shifted out.
///
/// Returns `−∞` for the zero measure or when `h ≡ −∞` on the support.
pub fn exp_power_integral(m: &FiniteSupportMeasure, h: &TiltFunction, t: f64) -> ExtReal {
    debug_assert!(t > 0.0);
    let exps: Vec<f64> = m
        .locations
        .iter()
        .zip(&m.log_masses)
        .map(|(&x, &lm)| {
            let hx = h.eval(x);
            if hx == NEG_INF {
                NEG_INF
            } else {
                lm + hx / t
            }
        })
        .collect();
    let lse = extreal::log_sum_exp_slice(&exps);
    if lse == NEG_INF {
        NEG_INF
    } else {
        t * lse
    }
}

/// `t·log ∫_{h > M} e^{h/t} dμ`, the restricted integral of the tail condition.
pub fn tail_power_integral(m: &FiniteSupportMeasure, h: &TiltFunction, level: f64, t: f64) -> ExtReal {
    let exps: Vec<f64> = m
        .locations
        .iter()
        .zip(&m.log_masses)
        .filter_map(|(&x, &lm)| {
            let hx = h.eval(x);
            (hx > level).then(|| lm + hx / t)
        })
        .collect();
    let lse = extreal::log_sum_exp_slice(&exps);
    if lse == NEG_INF {
        NEG_INF
    } else {
        t * lse
    }
}

/// `t·log μ(r)`, the log of [`region_power_mass`].
pub fn region_log_power_mass(m: &FiniteSupportMeasure, r: &RegionSet, t: f64) -> ExtReal {
    let lm = m.log_mass_in(r);
    if lm == NEG_INF {
        NEG_INF
    } else {
        t * lm
    }
}

/// `μ(r)^t` with `0^t = 0`.
pub fn region_power_mass(m: &FiniteSupportMeasure, r: &RegionSet, t: f64) -> f64 {
    region_log_power_mass(m, r, t).exp()
}

/// Loads a measure file: one `location,mass` pair per line, `#` comments,
/// strictly increasing locations.
pub fn load_measure(path: &Path) -> Result<FiniteSupportMeasure> {
    let text = std::fs::read_to_string(path)?;
    parse_measure(&text, &path.display().to_string())
}

pub fn parse_measure(text: &str, origin: &str) -> Result<FiniteSupportMeasure> {
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut atoms = Vec::new();
    let mut last: Option<f64> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| err(i + 1, format!("expected `location,mass`, got `{line}`")))?;
        let x: f64 = a
            .trim()
            .parse()
            .map_err(|_| err(i + 1, format!("bad location `{}`", a.trim())))?;
        let m: f64 = b
            .trim()
            .parse()
            .map_err(|_| err(i + 1, format!("bad mass `{}`", b.trim())))?;
        if let Some(prev) = last {
            if !(x > prev) {
                return Err(err(i + 1, format!("location {x} not increasing")));
            }
        }
        if !(m > 0.0) {
            return Err(err(i + 1, format!("mass {m} not positive")));
        }
        last = Some(x);
        atoms.push((x, m));
    }
    FiniteSupportMeasure::from_atoms(atoms).map_err(|e| err(0, e.to_string()))
}

/// An interval with extended-real endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: ExtReal,
    pub hi: ExtReal,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    /// Index range `[a, b)` of the sorted slice falling inside the interval.
    fn index_range(&self, xs: &[f64]) -> (usize, usize) {
        let a = if self.lo_open {
            xs.partition_point(|&x| x <= self.lo)
        } else {
            xs.partition_point(|&x| x < self.lo)
        };
        let b = if self.hi_open {
            xs.partition_point(|&x| x < self.hi)
        } else {
            xs.partition_point(|&x| x <= self.hi)
        };
        (a, b.max(a))
    }
}

/// A finite union of disjoint intervals, sorted by position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegionSet {
    intervals: Vec<Interval>,
}

impl RegionSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn whole() -> Self {
        Self::open(NEG_INF, POS_INF)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::from_intervals(vec![Interval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }])
    }

    pub fn open(lo: ExtReal, hi: ExtReal) -> Self {
        Self::from_intervals(vec![Interval {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }])
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    /// Open ball `(x − δ, x + δ)`.
    pub fn ball(x: f64, delta: f64) -> Self {
        Self::open(x - delta, x + delta)
    }

    /// `ℝ \ [−r, r]`.
    pub fn outside(r: f64) -> Self {
        Self::open(NEG_INF, -r).union(&Self::open(r, POS_INF))
    }

    /// Normalizes arbitrary intervals into a sorted disjoint union.
    pub fn from_intervals(mut ivs: Vec<Interval>) -> Self {
        ivs.retain(|iv| !iv.is_empty());
        ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.lo_open.cmp(&b.lo_open)));
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            if let Some(last) = out.last_mut() {
                let touches = iv.lo < last.hi || (iv.lo == last.hi && !(iv.lo_open && last.hi_open));
                if touches {
                    if iv.hi > last.hi || (iv.hi == last.hi && !iv.hi_open) {
                        last.hi = iv.hi;
                        last.hi_open = iv.hi_open;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        Self { intervals: out }
    }

    pub fn union(&self, other: &RegionSet) -> Self {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        Self::from_intervals(v)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn is_open(&self) -> bool {
        self.intervals
            .iter()
            .all(|iv| (iv.lo_open || iv.lo == NEG_INF) && (iv.hi_open || iv.hi == POS_INF))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn coin() -> FiniteSupportMeasure {
        FiniteSupportMeasure::from_atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn exp_power_integral_examples() {
        let v = exp_power_integral(&coin(), &TiltFunction::Linear(1.0), 0.01);
        // 1 + 0.01·log((1 + e^{−200})/2)
        assert_abs_diff_eq!(v, 1.0 + 0.01 * (0.5f64).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(v, 0.9930685, epsilon = 1e-7);
        assert_eq!(exp_power_integral(&coin(), &TiltFunction::zero(), 0.3), 0.0);
        let d = FiniteSupportMeasure::dirac(0.0, 0.5).unwrap();
        assert_abs_diff_eq!(
            exp_power_integral(&d, &TiltFunction::zero(), 0.5),
            -0.34657359,
            epsilon = 1e-8
        );
        assert_eq!(
            exp_power_integral(&FiniteSupportMeasure::zero(), &TiltFunction::Linear(2.0), 0.1),
            NEG_INF
        );
        let minus_inf = TiltFunction::custom("ninf", |_| NEG_INF);
        assert_eq!(exp_power_integral(&coin(), &minus_inf, 0.1), NEG_INF);
    }

    #[test]
    fn stable_for_huge_exponents() {
        let v = exp_power_integral(&coin(), &TiltFunction::Linear(1e6), 0.01);
        assert!(v.is_finite());
        assert_abs_diff_eq!(v, 1e6 + 0.01 * 0.5f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn region_power_mass_examples() {
        assert_abs_diff_eq!(
            region_power_mass(&coin(), &RegionSet::closed(0.5, 2.0), 0.1),
            0.933033,
            epsilon = 1e-6
        );
        assert_eq!(region_power_mass(&coin(), &RegionSet::empty(), 0.1), 0.0);
        assert_abs_diff_eq!(
            region_power_mass(&coin(), &RegionSet::whole(), 0.37),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn construction_invariants() {
        assert!(FiniteSupportMeasure::from_atoms(vec![(0.0, 0.7), (1.0, 0.7)]).is_err());
        assert!(FiniteSupportMeasure::from_atoms(vec![(0.0, 0.0)]).is_err());
        let m = FiniteSupportMeasure::from_atoms(vec![(1.0, 0.25), (0.0, 0.25), (1.0 + 1e-13, 0.25)]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.locations(), &[0.0, 1.0]);
        assert_abs_diff_eq!(m.atoms().nth(1).unwrap().1, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn region_algebra() {
        let r = RegionSet::open(0.0, 1.0).union(&RegionSet::closed(1.0, 2.0));
        assert_eq!(r.intervals().len(), 1);
        assert!(!r.contains(0.0) && r.contains(1.0) && r.contains(2.0));
        let out = RegionSet::outside(1.0);
        assert!(!out.contains(1.0) && out.contains(1.0001) && out.contains(-5.0));
        assert!(out.is_open());
        let split = RegionSet::open(0.0, 1.0).union(&RegionSet::open(1.0, 2.0));
        assert_eq!(split.intervals().len(), 2);
        assert!(!split.contains(1.0));
    }

    #[test]
    fn parse_measure_file() {
        let m = parse_measure("# coin\n-1, 0.5\n1,0.5 # right\n\n", "coin.txt").unwrap();
        assert_eq!(m.len(), 2);
        let e = parse_measure("1,0.5\n0,0.5\n", "bad.txt").unwrap_err();
        assert!(e.to_string().contains("bad.txt:2"), "{e}");
        assert!(parse_measure("1;0.5\n", "x").is_err());
        assert!(parse_measure("0,0.6\n1,0.6\n", "x").is_err());
    }
}
