//! Nets `k ↦ (μ_k, t_k)` realized as sequences with `t_k ↓ 0`, and the
//! built-in example families.

use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::extreal;
use crate::measure::FiniteSupportMeasure;

type MeasureFn = Arc<dyn Fn(usize) -> Result<FiniteSupportMeasure> + Send + Sync>;
type ScheduleFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// One element of a net.
#[derive(Debug, Clone)]
pub struct NetPoint {
    pub index: usize,
    pub measure: FiniteSupportMeasure,
    pub t: f64,
}

/// Indexed family of measures with scaling powers; indices start at 1.
#[derive(Clone)]
pub struct ScaledMeasureNet {
    name: String,
    max_index: Option<usize>,
    measure: MeasureFn,
    schedule: ScheduleFn,
}

impl fmt::Debug for ScaledMeasureNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScaledMeasureNet")
            .field("name", &self.name)
            .field("max_index", &self.max_index)
            .finish()
    }
}

impl ScaledMeasureNet {
    pub fn from_fn<M, S>(name: impl Into<String>, max_index: Option<usize>, measure: M, schedule: S) -> Self
    where
        M: Fn(usize) -> Result<FiniteSupportMeasure> + Send + Sync + 'static,
        S: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            max_index,
            measure: Arc::new(measure),
            schedule: Arc::new(schedule),
        }
    }

    /// A finite net from explicit measures and powers; the powers must be
    /// positive and strictly decreasing.
    pub fn from_measures(name: impl Into<String>, points: Vec<(FiniteSupportMeasure, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidNet("no measures".into()));
        }
        for w in points.windows(2) {
            if !(w[1].1 < w[0].1) {
                return Err(Error::InvalidNet("powers must be strictly decreasing".into()));
            }
        }
        if points.iter().any(|p| !(p.1 > 0.0)) {
            return Err(Error::InvalidNet("powers must be positive".into()));
        }
        let n = points.len();
        let points = Arc::new(points);
        let ts = Arc::clone(&points);
        Ok(Self::from_fn(
            name,
            Some(n),
            move |k| Ok(points[k - 1].0.clone()),
            move |k| ts[k - 1].1,
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `None` for unbounded nets.
    pub fn max_index(&self) -> Option<usize> {
        self.max_index
    }

    pub fn contains_index(&self, k: usize) -> bool {
        k >= 1 && self.max_index.is_none_or(|m| k <= m)
    }

    pub fn t(&self, k: usize) -> f64 {
        (self.schedule)(k)
    }

    pub fn at(&self, k: usize) -> Result<NetPoint> {
        if !self.contains_index(k) {
            return Err(Error::InvalidNet(format!(
                "index {k} outside the range of net `{}`",
                self.name
            )));
        }
        let t = self.t(k);
        if !(t > 0.0) {
            return Err(Error::InvalidNet(format!("power t({k}) = {t} is not positive")));
        }
        Ok(NetPoint {
            index: k,
            measure: (self.measure)(k)?,
            t,
        })
    }
}

/// `μ_k = ½δ₋₁ + ½δ₁`, `t_k = 1/k`.
pub fn coin_example_net() -> ScaledMeasureNet {
    ScaledMeasureNet::from_fn(
        "coin",
        None,
        |_| FiniteSupportMeasure::from_atoms(vec![(-1.0, 0.5), (1.0, 0.5)]),
        |k| 1.0 / k as f64,
    )
}

/// Schedule `k ↦ (ε_k, log p(ε_k))` for the three-atom family.
#[derive(Clone)]
pub struct DemZeiSchedule {
    pub eps: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
    pub log_p: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Default for DemZeiSchedule {
    /// `ε_k = 1/k`, `p(ε) = e^{−1/ε²}`.
    fn default() -> Self {
        Self {
            eps: Arc::new(|k| 1.0 / k as f64),
            log_p: Arc::new(|e| -1.0 / (e * e)),
        }
    }
}

const SCHEDULE_PROBE: usize = 64;

/// `μ_ε = (1 − 2p)δ₀ + p δ_{−ε log p} + p δ_{ε log p}` with power `ε`.
pub fn demzei_example_net(schedule: DemZeiSchedule) -> Result<ScaledMeasureNet> {
    for k in 1..=SCHEDULE_PROBE {
        let e = (schedule.eps)(k);
        let lp = (schedule.log_p)(e);
        if !(lp <= -std::f64::consts::LN_2) {
            return Err(Error::InvalidNet(format!("2p(ε) > 1 at ε = {e} (log p = {lp})")));
        }
    }
    let s = schedule.clone();
    Ok(ScaledMeasureNet::from_fn(
        "dem-zei",
        None,
        move |k| {
            let e = (s.eps)(k);
            let lp = (s.log_p)(e);
            if !(lp <= -std::f64::consts::LN_2) {
                return Err(Error::InvalidNet(format!("2p(ε) > 1 at ε = {e}")));
            }
            let centre = (-2.0 * lp.exp()).ln_1p();
            let mut atoms = vec![(e * lp, lp), (-e * lp, lp)];
            if centre > extreal::NEG_INF {
                atoms.push((0.0, centre));
            }
            FiniteSupportMeasure::from_log_atoms(atoms)
        },
        move |k| (schedule.eps)(k),
    ))
}

/// Law of the empirical mean of `n` iid draws from `base`, with `t_n = 1/n`.
///
/// Two-atom bases use the binomial closed form of the n-fold convolution;
/// larger bases are convolved in log scale.
pub fn iid_mean_example_net(base: FiniteSupportMeasure, max_n: usize) -> Result<ScaledMeasureNet> {
    if base.is_empty() || base.log_total_mass().abs() > 1e-12 {
        return Err(Error::InvalidNet(format!(
            "base must be a probability measure (mass {})",
            base.total_mass()
        )));
    }
    if max_n == 0 {
        return Err(Error::InvalidNet("max_n must be positive".into()));
    }
    let base = Arc::new(base);
    Ok(ScaledMeasureNet::from_fn(
        "iid-mean",
        Some(max_n),
        move |n| empirical_mean_law(&base, n),
        |n| 1.0 / n as f64,
    ))
}

fn empirical_mean_law(base: &FiniteSupportMeasure, n: usize) -> Result<FiniteSupportMeasure> {
    let xs = base.locations();
    let lms = base.log_masses();
    let nf = n as f64;
    if xs.len() == 1 {
        return FiniteSupportMeasure::from_log_atoms(vec![(xs[0], 0.0)]);
    }
    if xs.len() == 2 {
        let (a, b) = (xs[0], xs[1]);
        let (la, lb) = (lms[0], lms[1]);
        let ln_n = ln_gamma(nf + 1.0);
        let mut atoms: Vec<(f64, f64)> = (0..=n)
            .map(|k| {
                let kf = k as f64;
                let ln_choose = ln_n - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0);
                let loc = a + (b - a) * (kf / nf);
                (loc, ln_choose + kf * lb + (nf - kf) * la)
            })
            .collect();
        // ln_gamma rounding drifts the total by ~1e-11 at large n
        let total = extreal::log_sum_exp(atoms.iter().map(|a| a.1));
        for a in atoms.iter_mut() {
            a.1 -= total;
        }
        return FiniteSupportMeasure::from_log_atoms(atoms);
    }
    // Sums of n draws, then rescaled.
    let mut sums: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for _ in 0..n {
        let mut next: Vec<(f64, f64)> = Vec::with_capacity(sums.len() * xs.len());
        for &(s, ls) in &sums {
            for (&x, &lm) in xs.iter().zip(lms) {
                next.push((s + x, ls + lm));
            }
        }
        next.sort_by(|p, q| p.0.total_cmp(&q.0));
        sums.clear();
        for (s, l) in next {
            match sums.last_mut() {
                Some(last) if (s - last.0).abs() <= 1e-9 * (1.0 + s.abs()) => last.1 = extreal::log_add_exp(last.1, l),
                _ => sums.push((s, l)),
            }
        }
    }
    FiniteSupportMeasure::from_log_atoms(sums.into_iter().map(|(s, l)| (s / nf, l)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coin_net() {
        let net = coin_example_net();
        let p = net.at(4).unwrap();
        assert_eq!(p.t, 0.25);
        assert_eq!(p.measure.locations(), &[-1.0, 1.0]);
        assert_abs_diff_eq!(net.at(1).unwrap().measure.total_mass(), 1.0, epsilon = 1e-15);
        for k in 1..=100 {
            assert!(net.t(k + 1) < net.t(k));
        }
        assert!(net.at(0).is_err());
    }

    #[test]
    fn demzei_net() {
        let net = demzei_example_net(DemZeiSchedule::default()).unwrap();
        let p = net.at(2).unwrap();
        assert_eq!(p.t, 0.5);
        assert_eq!(p.measure.locations(), &[-2.0, 0.0, 2.0]);
        let masses: Vec<f64> = p.measure.atoms().map(|a| a.1).collect();
        assert_abs_diff_eq!(masses[0], (-4f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(masses[1], 1.0 - 2.0 * (-4f64).exp(), epsilon = 1e-15);
        for k in [1, 3, 10, 1000, 1_000_000] {
            let p = net.at(k).unwrap();
            assert_abs_diff_eq!(p.measure.total_mass(), 1.0, epsilon = 1e-12);
            // ε log p(ε) = −k
            assert_abs_diff_eq!(p.measure.locations()[0], -(k as f64), epsilon = 1e-6);
        }
    }

    #[test]
    fn demzei_rejects_heavy_schedule() {
        let bad = DemZeiSchedule {
            eps: Arc::new(|k| 1.0 / k as f64),
            log_p: Arc::new(|_| (0.6f64).ln()),
        };
        assert!(demzei_example_net(bad).is_err());
    }

    #[test]
    fn iid_bernoulli() {
        let base = FiniteSupportMeasure::from_atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let net = iid_mean_example_net(base.clone(), 50).unwrap();
        let two = net.at(2).unwrap().measure;
        let atoms: Vec<(f64, f64)> = two.atoms().collect();
        assert_eq!(atoms.len(), 3);
        for ((x, m), (ex, em)) in atoms.iter().zip([(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)]) {
            assert_abs_diff_eq!(*x, ex, epsilon = 1e-15);
            assert_abs_diff_eq!(*m, em, epsilon = 1e-12);
        }
        assert_eq!(net.at(1).unwrap().measure.locations(), base.locations());
        assert_eq!(net.at(37).unwrap().measure.len(), 38);
        assert!(net.at(51).is_err());
        let sub = FiniteSupportMeasure::from_atoms(vec![(0.0, 0.5)]).unwrap();
        assert!(iid_mean_example_net(sub, 5).is_err());
    }

    #[test]
    fn iid_three_atoms_matches_enumeration() {
        let base = FiniteSupportMeasure::from_atoms(vec![(-1.0, 0.2), (0.5, 0.3), (2.0, 0.5)]).unwrap();
        let net = iid_mean_example_net(base.clone(), 10).unwrap();
        let m = net.at(3).unwrap().measure;
        // brute-force enumeration of the 27 triples
        let atoms: Vec<(f64, f64)> = base.atoms().collect();
        let mut brute: Vec<(f64, f64)> = Vec::new();
        for a in &atoms {
            for b in &atoms {
                for c in &atoms {
                    brute.push(((a.0 + b.0 + c.0) / 3.0, a.1 * b.1 * c.1));
                }
            }
        }
        let brute = FiniteSupportMeasure::from_atoms(brute).unwrap();
        assert_eq!(m.len(), brute.len());
        for ((x, p), (y, q)) in m.atoms().zip(brute.atoms()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            assert_abs_diff_eq!(p, q, epsilon = 1e-12);
        }
    }

    #[test]
    fn large_binomial_masses_are_normalized() {
        let base = FiniteSupportMeasure::from_atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let net = iid_mean_example_net(base, 100_000).unwrap();
        let m = net.at(50_000).unwrap().measure;
        assert_abs_diff_eq!(m.log_total_mass(), 0.0, epsilon = 1e-9);
    }
}
