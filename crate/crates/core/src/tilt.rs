//! Tilt functions `h` and the finite families over which free energies and
//! abstract conjugates are taken.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

type EvalFn = Arc<dyn Fn(f64) -> ExtReal + Send + Sync>;

/// A function `h : ℝ → [−∞, +∞)`.
#[derive(Clone)]
pub enum TiltFunction {
    /// `x ↦ λx`.
    Linear(f64),
    /// `x ↦ λx` for `x ≤ 0`, `νx` for `x ≥ 0`.
    TwoSlope(f64, f64),
    /// A compiled-in function identified by its label.
    Custom { label: String, eval: EvalFn },
}

impl TiltFunction {
    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> ExtReal + Send + Sync + 'static,
    {
        TiltFunction::Custom {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    /// `Q_n(x) = n|x|e^{−|x|} − x`.
    pub fn q(n: u32) -> Self {
        let nf = f64::from(n);
        Self::custom(format!("Q{n}"), move |x: f64| nf * x.abs() * (-x.abs()).exp() - x)
    }

    pub fn zero() -> Self {
        TiltFunction::Linear(0.0)
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        let v = match self {
            TiltFunction::Linear(l) => l * x,
            TiltFunction::TwoSlope(l, n) => {
                if x <= 0.0 {
                    l * x
                } else {
                    n * x
                }
            }
            TiltFunction::Custom { eval, .. } => eval(x),
        };
        debug_assert!(v < f64::INFINITY && !v.is_nan(), "tilt returned {v}");
        v
    }

    /// Stable identifier used in reports.
    pub fn label(&self) -> String {
        match self {
            TiltFunction::Linear(l) => format!("h[{l:?}]"),
            TiltFunction::TwoSlope(l, n) => format!("h[{l:?},{n:?}]"),
            TiltFunction::Custom { label, .. } => label.clone(),
        }
    }

    /// Slope pair `(λ, ν)` for the linear and two-slope kinds.
    pub fn slopes(&self) -> Option<(f64, f64)> {
        match *self {
            TiltFunction::Linear(l) => Some((l, l)),
            TiltFunction::TwoSlope(l, n) => Some((l, n)),
            TiltFunction::Custom { .. } => None,
        }
    }
}

impl fmt::Debug for TiltFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Looks up a compiled-in custom tilt by label: `zero`, `abs`, or `qN`.
pub fn registered_custom(label: &str) -> Option<TiltFunction> {
    match label {
        "zero" => Some(TiltFunction::custom("zero", |_| 0.0)),
        "abs" => Some(TiltFunction::custom("abs", f64::abs)),
        _ => label
            .strip_prefix(['q', 'Q'])
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&n| n >= 1)
            .map(TiltFunction::q),
    }
}

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidFamily(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// `resolution` evenly spaced points strictly inside the interval.
    pub fn interior_grid(&self, resolution: usize) -> Vec<f64> {
        let step = (self.hi - self.lo) / (resolution as f64 + 1.0);
        (1..=resolution).map(|i| self.lo + step * i as f64).collect()
    }
}

/// One block of a family; parametric blocks expand deterministically.
#[derive(Debug, Clone)]
pub enum FamilyPart {
    Linear {
        g: OpenInterval,
        resolution: usize,
    },
    TwoSlope {
        lambda: (f64, f64),
        nu: (f64, f64),
        resolution: usize,
    },
    Qn {
        n_max: u32,
    },
    Members(Vec<TiltFunction>),
}

/// A finite family of tilt functions.
#[derive(Debug, Clone, Default)]
pub struct TiltFamily {
    pub parts: Vec<FamilyPart>,
}

/// `resolution` evenly spaced points on the closed range, endpoints included.
pub fn closed_grid(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    if resolution == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (resolution - 1) as f64;
    (0..resolution)
        .map(|i| if i + 1 == resolution { hi } else { lo + step * i as f64 })
        .collect()
}

impl TiltFamily {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_members(members: Vec<TiltFunction>) -> Self {
        Self {
            parts: vec![FamilyPart::Members(members)],
        }
    }

    pub fn union(mut self, other: TiltFamily) -> Self {
        self.parts.extend(other.parts);
        self
    }

    pub fn members(&self) -> Vec<TiltFunction> {
        let mut out = Vec::new();
        for part in &self.parts {
            match part {
                FamilyPart::Linear { g, resolution } => {
                    out.extend(g.interior_grid(*resolution).into_iter().map(TiltFunction::Linear))
                }
                FamilyPart::TwoSlope { lambda, nu, resolution } => {
                    for l in closed_grid(lambda.0, lambda.1, *resolution) {
                        for n in closed_grid(nu.0, nu.1, *resolution) {
                            out.push(TiltFunction::TwoSlope(l, n));
                        }
                    }
                }
                FamilyPart::Qn { n_max } => out.extend((1..=*n_max).map(TiltFunction::q)),
                FamilyPart::Members(m) => out.extend(m.iter().cloned()),
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.parts
            .iter()
            .map(|p| match p {
                FamilyPart::Linear { resolution, .. } => *resolution,
                FamilyPart::TwoSlope { resolution, .. } => resolution * resolution,
                FamilyPart::Qn { n_max } => *n_max as usize,
                FamilyPart::Members(m) => m.len(),
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The family with every truncation bound doubled: two-slope ranges double
    /// with the same spacing (so the original grid is a subset) and `Q_n`
    /// blocks double `n_max`. Linear blocks live on a fixed open interval and
    /// explicit members are kept as they are.
    pub fn doubled(&self) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|p| match p {
                FamilyPart::TwoSlope { lambda, nu, resolution } => FamilyPart::TwoSlope {
                    lambda: (2.0 * lambda.0, 2.0 * lambda.1),
                    nu: (2.0 * nu.0, 2.0 * nu.1),
                    resolution: 2 * (resolution - 1) + 1,
                },
                FamilyPart::Qn { n_max } => FamilyPart::Qn { n_max: 2 * n_max },
                other => other.clone(),
            })
            .collect();
        Self { parts }
    }

    /// `Some(G)` when the family is a single linear block.
    pub fn linear_interval(&self) -> Option<OpenInterval> {
        match self.parts.as_slice() {
            [FamilyPart::Linear { g, .. }] => Some(*g),
            _ => None,
        }
    }
}

/// `{h_λ : λ ∈ G}` sampled at `resolution` interior points.
pub fn linear_family(g: OpenInterval, resolution: usize) -> Result<TiltFamily> {
    if resolution < 2 {
        return Err(Error::InvalidFamily("resolution must be at least 2".into()));
    }
    Ok(TiltFamily {
        parts: vec![FamilyPart::Linear { g, resolution }],
    })
}

/// Cartesian grid of two-slope tilts over `λ_range × ν_range`.
pub fn two_slope_family(lambda: (f64, f64), nu: (f64, f64), resolution: usize) -> Result<TiltFamily> {
    if resolution < 2 {
        return Err(Error::InvalidFamily("resolution must be at least 2".into()));
    }
    if !(lambda.0 <= lambda.1 && nu.0 <= nu.1) {
        return Err(Error::InvalidFamily("reversed slope range".into()));
    }
    Ok(TiltFamily {
        parts: vec![FamilyPart::TwoSlope { lambda, nu, resolution }],
    })
}

/// `{Q_1, …, Q_{n_max}}`.
pub fn qn_family(n_max: u32) -> Result<TiltFamily> {
    if n_max < 1 {
        return Err(Error::InvalidFamily("n_max must be at least 1".into()));
    }
    Ok(TiltFamily {
        parts: vec![FamilyPart::Qn { n_max }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_family_interior_spacing() {
        let f = linear_family(OpenInterval::new(-1.0, 1.0).unwrap(), 3).unwrap();
        let ls: Vec<f64> = f.members().iter().map(|m| m.slopes().unwrap().0).collect();
        assert_eq!(ls, vec![-0.5, 0.0, 0.5]);
        let f = linear_family(OpenInterval::new(0.0, 1.0).unwrap(), 2).unwrap();
        let ls: Vec<f64> = f.members().iter().map(|m| m.slopes().unwrap().0).collect();
        assert_abs_diff_eq!(ls[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ls[1], 2.0 / 3.0, epsilon = 1e-15);
        assert!(f.members().iter().all(|m| matches!(m, TiltFunction::Linear(_))));
        assert!(OpenInterval::new(1.0, 1.0).is_err());
        assert!(linear_family(OpenInterval::new(0.0, 1.0).unwrap(), 1).is_err());
    }

    #[test]
    fn two_slope_members() {
        let f = two_slope_family((-2.0, 2.0), (-2.0, 2.0), 5).unwrap();
        assert_eq!(f.members().len(), 25);
        assert_eq!(f.len(), 25);
        let h = TiltFunction::TwoSlope(-1.0, 2.0);
        assert_eq!(h.eval(-3.0), 3.0);
        assert_eq!(h.eval(2.0), 4.0);
        let d = TiltFunction::TwoSlope(1.0, 1.0);
        for x in [-2.0, -0.1, 0.0, 0.7, 3.0] {
            assert_eq!(d.eval(x), TiltFunction::Linear(1.0).eval(x));
        }
    }

    #[test]
    fn qn_values() {
        assert_eq!(TiltFunction::q(2).eval(0.0), 0.0);
        assert_abs_diff_eq!(TiltFunction::q(1).eval(1.0), (-1f64).exp() - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(TiltFunction::q(3).eval(-1.0), 2.103638, epsilon = 1e-6);
        assert_eq!(qn_family(4).unwrap().members().len(), 4);
        assert!(qn_family(0).is_err());
    }

    #[test]
    fn doubling_contains_original_grid() {
        let f = two_slope_family((-4.0, 4.0), (-4.0, 4.0), 17).unwrap();
        let d = f.doubled();
        let big: Vec<(f64, f64)> = d.members().iter().map(|m| m.slopes().unwrap()).collect();
        for m in f.members() {
            let s = m.slopes().unwrap();
            assert!(big
                .iter()
                .any(|b| (b.0 - s.0).abs() < 1e-12 && (b.1 - s.1).abs() < 1e-12));
        }
        assert_eq!(d.len(), 33 * 33);
    }

    #[test]
    fn registry() {
        assert_eq!(registered_custom("q3").unwrap().label(), "Q3");
        assert!(registered_custom("q0").is_none());
        assert!(registered_custom("nope").is_none());
        assert_eq!(registered_custom("abs").unwrap().eval(-2.0), 2.0);
    }

    #[test]
    fn two_slope_continuity_at_zero() {
        for (l, n) in [(3.0, -2.0), (-1.5, 4.0)] {
            let h = TiltFunction::TwoSlope(l, n);
            for d in [1e-1, 1e-3, 1e-6] {
                let jump: f64 = (h.eval(-d) - h.eval(d)).abs();
                assert!(jump <= (f64::abs(l) + f64::abs(n)) * d + 1e-15);
            }
        }
    }
}
