//! Scenario execution: net → `L` → conjugates → rates → checks.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};

use ldp_core::abstract_conjugate::{abstract_lf_stable, StableConjugate};
use ldp_core::convex::{effective_domain, essential_smoothness_check, lf_transform, GridFunction, Support};
use ldp_core::extreal::{self, POS_INF};
use ldp_core::free_energy::{
    l_grid_on, lambda_family_table_on, lambda_on, tail_condition_check, FreeEnergyGrid, WindowSample, WindowSpec,
};
use ldp_core::ldp::{
    self, derivative_bound_check, exponential_tightness_check, ldp_bounds_check, range_condition_check,
    rate_comparison, rate_grid_on, vague_ldp_check, varadhan_identity_check, ConditionReport, RangeTargets,
    RateFunctionEstimate, RegionKind, VagueLdp,
};
use ldp_core::measure::{load_measure, FiniteSupportMeasure, RegionSet};
use ldp_core::net::{coin_example_net, demzei_example_net, iid_mean_example_net, DemZeiSchedule, ScaledMeasureNet};
use ldp_core::tilt::{
    linear_family, qn_family, registered_custom, two_slope_family, OpenInterval, TiltFamily, TiltFunction,
};

use crate::report::{encode, grid_table, Report, SCHEMA_VERSION};
use crate::scenario::{CheckSpec, NetSpec, Scenario, SupportSpec, WindowConfig};

pub fn build_net(spec: &NetSpec) -> Result<ScaledMeasureNet> {
    Ok(match spec {
        NetSpec::Coin => coin_example_net(),
        NetSpec::DemZei => demzei_example_net(DemZeiSchedule::default())?,
        NetSpec::IidMean { base, max_n } => {
            let base = FiniteSupportMeasure::from_atoms(base.iter().map(|a| (a[0], a[1])).collect())?;
            iid_mean_example_net(base, *max_n)?
        }
        NetSpec::Measures { files, t } => {
            let points = files
                .iter()
                .zip(t)
                .map(|(f, &t)| Ok((load_measure(f)?, t)))
                .collect::<ldp_core::Result<Vec<_>>>()?;
            ScaledMeasureNet::from_measures("measures", points)?
        }
    })
}

fn support(s: SupportSpec) -> Support {
    match s {
        SupportSpec::Bounded => Support::Bounded,
        SupportSpec::Truncated => Support::Truncated,
    }
}

fn window_for(net: &ScaledMeasureNet, w: &WindowConfig) -> Result<WindowSpec> {
    WindowSpec::for_powers(net, w.t_max, w.t_min, w.samples, w.stride)
        .with_context(|| format!("window t ∈ [{}, {}] on net `{}`", w.t_min, w.t_max, net.name()))
}

/// Parses `h[λ]`, `h[λ,ν]` or a compiled-in custom label.
pub fn parse_tilt(s: &str) -> Result<TiltFunction> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("h[").and_then(|r| r.strip_suffix(']')) {
        let parts: Vec<f64> = inner
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| anyhow!("tilt `{s}`: {e}"))?;
        return match parts.as_slice() {
            [l] => Ok(TiltFunction::Linear(*l)),
            [l, n] => Ok(TiltFunction::TwoSlope(*l, *n)),
            _ => bail!("tilt `{s}` needs one or two slopes"),
        };
    }
    registered_custom(s).ok_or_else(|| anyhow!("unknown tilt `{s}` (expected h[λ], h[λ,ν], zero, abs or qN)"))
}

fn interval(g: [f64; 2]) -> Result<OpenInterval> {
    Ok(OpenInterval::new(g[0], g[1])?)
}

/// Everything computed once per scenario and shared by the checks.
pub struct Pipeline {
    pub scenario: Scenario,
    pub net: ScaledMeasureNet,
    pub ws: WindowSample,
    /// Window for `L` and for `Λ` over the family.
    pub ws_fe: WindowSample,
    pub g: OpenInterval,
    pub l: FreeEnergyGrid,
    pub x_grid: Vec<f64>,
    /// Conjugate of `L` with the scenario's support convention.
    pub l_star: GridFunction,
    /// Conjugate of `L` extended by `+∞` off `G`.
    pub l_star_bounded: GridFunction,
    pub family: TiltFamily,
    pub abstract_star: Option<StableConjugate>,
    pub rfe: RateFunctionEstimate,
    pub vague: VagueLdp,
    /// `Λ̄(0)`.
    pub lambda0_bar: f64,
}

impl Pipeline {
    pub fn new(scenario: Scenario) -> Result<Self> {
        let net = build_net(&scenario.net).context("building the net")?;
        let tol = scenario.tolerance.limit;
        let ws = WindowSample::collect(&net, window_for(&net, &scenario.window)?)?;
        let ws_fe = match &scenario.free_energy.window {
            Some(w) => WindowSample::collect(&net, window_for(&net, w)?)?,
            None => ws.clone(),
        };
        let g = interval(scenario.free_energy.g)?;
        let sup = support(scenario.free_energy.support);
        let mut l = l_grid_on(&ws_fe, g, scenario.free_energy.resolution, tol).context("free energy")?;
        l.function = l.function.with_support(sup);
        let x_grid = scenario.rate_grid();
        let l_star = lf_transform(&l.function, &x_grid).context("conjugate of L")?;
        let l_star_bounded = lf_transform(&l.function.clone().with_support(Support::Bounded), &x_grid)?;
        let family = build_family(&scenario, g)?;
        let abstract_star = if family.is_empty() {
            None
        } else {
            Some(
                abstract_lf_stable(&ws_fe, &family, &x_grid, scenario.tolerance.doubling)
                    .context("abstract conjugate")?,
            )
        };
        let rfe = rate_grid_on(&ws, &x_grid, &scenario.rate.deltas.radii())?;
        let vague = vague_ldp_check(&rfe, scenario.tolerance.check);
        let lambda0_bar = lambda_on(&ws, &TiltFunction::zero(), tol).limsup_est;
        Ok(Self {
            scenario,
            net,
            ws,
            ws_fe,
            g,
            l,
            x_grid,
            l_star,
            l_star_bounded,
            family,
            abstract_star,
            rfe,
            vague,
            lambda0_bar,
        })
    }

    fn abstract_fn(&self) -> Option<&GridFunction> {
        self.abstract_star.as_ref().map(|s| &s.function)
    }

    /// `L` and its conjugate on an alternative `G`.
    fn l_on(&self, spec: &CheckSpec) -> Result<(OpenInterval, GridFunction, GridFunction)> {
        match spec.g {
            None => Ok((self.g, self.l.function.clone(), self.l_star.clone())),
            Some(g) => {
                let g = interval(g)?;
                let sup = support(spec.support.unwrap_or_default());
                let l = l_grid_on(
                    &self.ws_fe,
                    g,
                    self.scenario.free_energy.resolution,
                    self.scenario.tolerance.limit,
                )?
                .function
                .with_support(sup);
                let star = lf_transform(&l, &self.x_grid)?;
                Ok((g, l, star))
            }
        }
    }

    pub fn run_check(&self, spec: &CheckSpec) -> Result<Value> {
        let tol = self.scenario.tolerance.check;
        let id = spec.id.as_str();
        let mut out = Map::new();
        out.insert("id".into(), json!(id));
        if let Some(g) = spec.g {
            out.insert("g".into(), json!([encode(g[0]), encode(g[1])]));
        }
        let holds = match id {
            "vague-ldp" => {
                out.insert("max_gap".into(), encode(self.vague.max_gap));
                out.insert("witnesses".into(), witnesses(&self.vague.witnesses));
                self.vague.holds
            }
            "sandwich" => self.sandwich(&mut out),
            "exponential-tightness" => {
                let eps = if spec.eps.is_empty() {
                    vec![0.1, 0.01]
                } else {
                    spec.eps.clone()
                };
                let radii = if spec.radii.is_empty() {
                    vec![1.0, 2.0, 4.0, 8.0, 16.0]
                } else {
                    spec.radii.clone()
                };
                let r = exponential_tightness_check(&self.ws, &eps, &radii);
                let rows: Vec<Value> = r
                    .table
                    .iter()
                    .map(|(e, rr, m)| json!({"eps": encode(*e), "radius": rr.map_or(Value::Null, encode), "mass": encode(*m)}))
                    .collect();
                out.insert("table".into(), Value::Array(rows));
                r.holds
            }
            "ldp-bounds" => {
                let regions: Vec<(RegionSet, RegionKind)> = spec
                    .closed
                    .iter()
                    .map(|r| (RegionSet::closed(r[0], r[1]), RegionKind::Closed))
                    .chain(
                        spec.open
                            .iter()
                            .map(|r| (RegionSet::open(r[0], r[1]), RegionKind::Open)),
                    )
                    .collect();
                let rows = ldp_bounds_check(&self.ws, &self.vague.j, &regions, tol);
                let vals: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "region": region_label(&r.region),
                            "kind": if r.kind == RegionKind::Open { "open" } else { "closed" },
                            "measured": encode(r.measured),
                            "capacity": encode(r.capacity),
                            "holds": r.holds,
                        })
                    })
                    .collect();
                out.insert("rows".into(), Value::Array(vals));
                rows.iter().all(|r| r.holds)
            }
            "varadhan" => {
                let mut all = true;
                let mut rows = Vec::new();
                for t in &spec.tilts {
                    let h = parse_tilt(t)?;
                    let r = varadhan_identity_check(&self.ws, &h, &self.rfe, tol)?;
                    all &= r.holds;
                    rows.push(json!({"tilt": h.label(), "lambda": encode(r.lhs), "sup_h_minus_l1": encode(r.rhs), "holds": r.holds}));
                }
                out.insert("rows".into(), Value::Array(rows));
                all
            }
            "derivative-bound" => {
                let (_, l, _) = self.l_on(spec)?;
                let mut all = true;
                let mut worst = f64::NEG_INFINITY;
                let mut fails = Vec::new();
                for at in 0..l.len() {
                    let r = derivative_bound_check(&l, &self.rfe, at, tol)?;
                    for row in &r.rows {
                        worst = worst.max(row.l1 - row.bound);
                        if !row.holds {
                            fails.push((
                                r.lambda0,
                                format!(
                                    "{} slope {}: l1 = {}, bound {}",
                                    row.side,
                                    row.slope,
                                    extreal::format(row.l1),
                                    row.bound
                                ),
                            ));
                        }
                    }
                    all &= r.holds;
                }
                out.insert("label".into(), json!(ldp::SURROGATE_LABEL));
                out.insert("points".into(), json!(l.len()));
                out.insert("max_excess".into(), encode(worst));
                out.insert("witnesses".into(), witnesses(&fails));
                all
            }
            "tail-condition" => {
                let family = if spec.tilts.is_empty() {
                    self.family.clone()
                } else {
                    TiltFamily::from_members(spec.tilts.iter().map(|t| parse_tilt(t)).collect::<Result<_>>()?)
                };
                let level = spec.level.unwrap_or(0.0);
                let eps = spec.eps.first().copied().unwrap_or(1.0);
                let r = tail_condition_check(&self.ws, &family, level, eps)?;
                out.insert("level".into(), encode(level));
                out.insert("eps".into(), encode(eps));
                let w: Vec<Value> = r.witnesses.iter().map(|(h, v)| json!([h, encode(*v)])).collect();
                out.insert("witnesses".into(), Value::Array(w));
                r.holds
            }
            "essential-smoothness" => {
                let (_, l, _) = self.l_on(spec)?;
                let r = essential_smoothness_check(&l);
                out.insert("interior_nonempty".into(), json!(r.interior_nonempty));
                out.insert(
                    "kinks".into(),
                    Value::Array(r.kinks.iter().map(|&k| encode(k)).collect()),
                );
                let b: Vec<Value> = r
                    .bounded_boundary_slopes
                    .iter()
                    .map(|(x, s)| json!([encode(*x), encode(*s)]))
                    .collect();
                out.insert("bounded_boundary_slopes".into(), Value::Array(b));
                r.holds
            }
            "rate-comparison" => {
                let (_, _, star) = self.l_on(spec)?;
                let j = &self.vague.j;
                let masks = vec![("Dom(J)".to_string(), effective_domain(j))];
                let rows = rate_comparison(j, &star, self.abstract_fn(), &masks, tol)?;
                let vals: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "claim": r.claim_id,
                            "mask": r.mask,
                            "holds": r.holds,
                            "max_violation": encode(r.max_violation),
                            "outside_difference": encode(r.outside_difference),
                            "outside_note": "allowed: the statements only assert equality on the mask",
                        })
                    })
                    .collect();
                out.insert("rows".into(), Value::Array(vals));
                self.vague.holds && rows.iter().all(|r| r.holds)
            }
            cond if ldp::condition_ids().contains(&cond) => {
                let (g, l, star) = self.l_on(spec)?;
                let targets = RangeTargets {
                    l0: &self.rfe.l0,
                    l1: &self.rfe.l1,
                    abstract_star: self.abstract_fn(),
                    l_star: Some(&star),
                    j: self.vague.holds.then_some(&self.vague.j),
                };
                let r = range_condition_check(&l, g, &targets, self.lambda0_bar, cond, tol)?;
                let range = ldp::condition_range(&l, g)?;
                out.insert(
                    "derivative_range".into(),
                    Value::Array(
                        range
                            .components
                            .iter()
                            .map(|c| json!([encode(c.0), encode(c.1)]))
                            .collect(),
                    ),
                );
                condition_json(&r, &mut out);
                r.hypothesis_holds && r.conclusions_checked.iter().all(|c| c.holds)
            }
            other => bail!("unknown check `{other}`"),
        };
        let mut obj = Map::new();
        obj.insert("id".into(), out.remove("id").unwrap());
        obj.insert("holds".into(), json!(holds));
        obj.insert("tol".into(), encode(tol));
        obj.extend(out);
        Ok(Value::Object(obj))
    }

    /// `L|G* ≤ Λ|𝒮* ≤ l₀ ≤ l₁` pointwise.
    fn sandwich(&self, out: &mut Map<String, Value>) -> bool {
        let slack = self.scenario.tolerance.sandwich;
        let mut chain: Vec<(&str, &GridFunction)> = vec![("L|G*", &self.l_star_bounded)];
        if let Some(s) = self.abstract_fn() {
            chain.push(("Λ|S*", s));
        }
        chain.push(("l0", &self.rfe.l0));
        chain.push(("l1", &self.rfe.l1));
        let mut fails = Vec::new();
        let mut worst: f64 = 0.0;
        for pair in chain.windows(2) {
            let (na, a) = pair[0];
            let (nb, b) = pair[1];
            for ((&x, &u), &v) in self.x_grid.iter().zip(a.values()).zip(b.values()) {
                let excess = if u == POS_INF && v == POS_INF { 0.0 } else { u - v };
                if excess.is_nan() {
                    continue;
                }
                worst = worst.max(excess);
                if excess > slack {
                    fails.push((
                        x,
                        format!("{na} = {} > {nb} = {}", extreal::format(u), extreal::format(v)),
                    ));
                }
            }
        }
        out.insert("slack".into(), encode(slack));
        out.insert("chain".into(), json!(chain.iter().map(|c| c.0).collect::<Vec<_>>()));
        out.insert("max_excess".into(), encode(worst));
        out.insert("witnesses".into(), witnesses(&fails));
        fails.is_empty()
    }

    /// Runs every requested check and assembles the report.
    pub fn report(&self) -> Result<Report> {
        let mut checks = Vec::new();
        for c in &self.scenario.checks {
            checks.push(self.run_check(c).with_context(|| format!("check `{}`", c.id))?);
        }
        let tables = self.tables();
        let verdict = verdict(&checks, self.g.contains(0.0));
        let mut root = Map::new();
        root.insert("schema_version".into(), json!(SCHEMA_VERSION));
        root.insert("scenario".into(), serde_json::to_value(&self.scenario)?);
        root.insert("tables".into(), tables);
        root.insert("checks".into(), Value::Array(checks));
        root.insert("verdict".into(), verdict);
        Ok(Report {
            json: Value::Object(root),
            csv: self.csv_tables(),
        })
    }

    fn window_json(ws: &WindowSample) -> Value {
        let w = ws.window;
        let first = ws.points.first().map_or(0.0, |p| p.t);
        let last = ws.points.last().map_or(0.0, |p| p.t);
        json!({"start_index": w.start_index, "end_index": w.end_index, "samples": ws.points.len(), "t_first": encode(first), "t_last": encode(last)})
    }

    fn tables(&self) -> Value {
        let tol = self.scenario.tolerance.limit;
        let main = Self::window_json(&self.ws);
        let fe = Self::window_json(&self.ws_fe);
        let mut t = Map::new();
        t.insert("L".into(), grid_table(&self.l.function, &fe, tol));
        t.insert("L_star".into(), grid_table(&self.l_star, &fe, tol));
        if let Some(s) = &self.abstract_star {
            let mut v = grid_table(&s.function, &fe, self.scenario.tolerance.doubling);
            if let Value::Object(m) = &mut v {
                m.insert("family_size".into(), json!(self.family.len()));
                m.insert("doubled_family_size".into(), json!(self.family.doubled().len()));
                m.insert("max_finite_growth".into(), encode(s.max_finite_growth()));
            }
            t.insert("abstract_star".into(), v);
            let fe_tab = lambda_family_table_on(&self.ws_fe, &self.family, tol);
            let rows: Vec<Value> = fe_tab
                .members
                .iter()
                .zip(&fe_tab.lambdas)
                .map(|(h, e)| {
                    json!({
                        "tilt": h.label(),
                        "value": encode(e.value().unwrap_or(e.last())),
                        "converged": e.converged,
                    })
                })
                .collect();
            t.insert(
                "lambda_family".into(),
                json!({"window": fe, "tol": encode(tol), "rows": rows}),
            );
        }
        let ctol = self.scenario.tolerance.check;
        t.insert("l0".into(), grid_table(&self.rfe.l0, &main, ctol));
        t.insert("l1".into(), grid_table(&self.rfe.l1, &main, ctol));
        t.insert("J".into(), grid_table(&self.vague.j, &main, ctol));
        t.insert(
            "deltas".into(),
            Value::Array(self.rfe.delta_schedule.iter().map(|&d| encode(d)).collect()),
        );
        t.insert("lambda0_bar".into(), encode(self.lambda0_bar));
        Value::Object(t)
    }

    fn csv_tables(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("L".to_string(), self.l.function.to_csv()),
            ("L_star".to_string(), self.l_star.to_csv()),
            ("l0".to_string(), self.rfe.l0.to_csv()),
            ("l1".to_string(), self.rfe.l1.to_csv()),
            ("J".to_string(), self.vague.j.to_csv()),
        ];
        if let Some(s) = self.abstract_fn() {
            v.push(("abstract_star".to_string(), s.to_csv()));
        }
        v
    }
}

fn build_family(s: &Scenario, g: OpenInterval) -> Result<TiltFamily> {
    let f = &s.family;
    let mut family = TiltFamily::empty();
    if f.linear {
        family = family.union(linear_family(g, s.free_energy.resolution)?);
    }
    if let Some(ts) = &f.two_slope {
        family = family.union(two_slope_family(
            (ts.lambda[0], ts.lambda[1]),
            (ts.nu[0], ts.nu[1]),
            ts.resolution,
        )?);
    }
    if let Some(n) = f.qn {
        family = family.union(qn_family(n)?);
    }
    if !f.members.is_empty() {
        let m = f.members.iter().map(|t| parse_tilt(t)).collect::<Result<Vec<_>>>()?;
        family = family.union(TiltFamily::from_members(m));
    }
    Ok(family)
}

fn witnesses(w: &[(f64, String)]) -> Value {
    Value::Array(w.iter().map(|(x, d)| json!([encode(*x), d])).collect())
}

fn region_label(r: &RegionSet) -> String {
    if r.is_empty() {
        return "∅".into();
    }
    r.intervals()
        .iter()
        .map(|iv| {
            format!(
                "{}{}, {}{}",
                if iv.lo_open { "(" } else { "[" },
                extreal::format(iv.lo),
                extreal::format(iv.hi),
                if iv.hi_open { ")" } else { "]" }
            )
        })
        .collect::<Vec<_>>()
        .join(" ∪ ")
}

fn condition_json(r: &ConditionReport, out: &mut Map<String, Value>) {
    out.insert("hypothesis_holds".into(), json!(r.hypothesis_holds));
    out.insert("slack".into(), encode(r.slack));
    out.insert("closure_used".into(), json!(r.closure_used));
    out.insert("witness_count".into(), json!(r.witnesses.len()));
    out.insert("witnesses".into(), witnesses(&r.witnesses));
    let c: Vec<Value> = r
        .conclusions_checked
        .iter()
        .map(|c| json!({"claim": c.claim_id, "holds": c.holds, "max_violation": encode(c.max_violation)}))
        .collect();
    out.insert("conclusions".into(), Value::Array(c));
    out.insert("notes".into(), json!(r.notes));
}

fn statement(id: &str) -> Option<&'static str> {
    Some(match id {
        "open-problem-a" | "open-problem-e-a" => "vague LDP; J = L|G* = Λ|S* on Dom(J) ∩ {J > −Λ̄(0)}",
        "open-problem-b" | "open-problem-e-b" => "vague LDP; J = L|G* = Λ|S* on Dom(J)",
        "open-problem-c" | "open-problem-f-c" => {
            "vague LDP; J = Λ|S* on {J > −Λ̄(0)}; J = L|G* on Dom(Λ|S*) ∩ {J > −Λ̄(0)}"
        }
        "open-problem-d" | "open-problem-f-d" => "vague LDP with J = Λ|S*; J = L|G* on Dom(J)",
        "GE-a" => "vague LDP with rate function L|G*",
        "GE-b" => "LDP with rate function L|G*",
        "ellis" => "LDP with J = Λ|S*; J = L|G* on Dom(J)",
        _ => return None,
    })
}

fn verdict(checks: &[Value], zero_in_g: bool) -> Value {
    let mut held = Vec::new();
    let mut failed = Vec::new();
    let mut applies = Vec::new();
    for c in checks {
        let id = c["id"].as_str().unwrap_or_default().to_string();
        let label = match c.get("g") {
            Some(g) => format!("{id} on G = ({}, {})", g[0], g[1]),
            None => id.clone(),
        };
        if c["holds"].as_bool() == Some(true) {
            held.push(label.clone());
            if let Some(s) = statement(&id) {
                let narrow = zero_in_g && !id.starts_with("GE-a");
                applies.push(json!({"check": label, "conclusion": s, "narrow": narrow}));
            }
        } else {
            failed.push(label);
        }
    }
    json!({
        "all_hold": failed.is_empty(),
        "held": held,
        "failed": failed,
        "applies": applies,
    })
}

/// Loads, runs and reports.
pub fn run_scenario(path: &Path) -> Result<Report> {
    let s = Scenario::load(path)?;
    Pipeline::new(s)?.report()
}

/// `L` on `G` and `Λ` over the family, without rates or checks.
pub fn free_energy_report(s: Scenario) -> Result<Report> {
    let net = build_net(&s.net)?;
    let w = s.free_energy.window.unwrap_or(s.window);
    let ws = WindowSample::collect(&net, window_for(&net, &w)?)?;
    let g = interval(s.free_energy.g)?;
    let l = l_grid_on(&ws, g, s.free_energy.resolution, s.tolerance.limit)?;
    let family = build_family(&s, g)?;
    let win = Pipeline::window_json(&ws);
    let mut tables = Map::new();
    tables.insert("L".into(), grid_table(&l.function, &win, s.tolerance.limit));
    let fe = lambda_family_table_on(&ws, &family, s.tolerance.limit);
    let rows: Vec<Value> = fe
        .members
        .iter()
        .zip(&fe.lambdas)
        .map(|(h, e)| json!({"tilt": h.label(), "value": encode(e.value().unwrap_or(e.last())), "converged": e.converged}))
        .collect();
    tables.insert(
        "lambda_family".into(),
        json!({"window": win, "tol": encode(s.tolerance.limit), "rows": rows}),
    );
    let all = l.all_converged() && fe.all_exist;
    let mut root = Map::new();
    root.insert("schema_version".into(), json!(SCHEMA_VERSION));
    root.insert("scenario".into(), serde_json::to_value(&s)?);
    root.insert("tables".into(), Value::Object(tables));
    root.insert("checks".into(), json!([]));
    root.insert("verdict".into(), json!({"all_hold": all, "all_converged": all}));
    Ok(Report {
        json: Value::Object(root),
        csv: vec![("L".into(), l.function.to_csv())],
    })
}
