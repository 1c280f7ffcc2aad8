//! Canned scenarios for the two worked examples and their committed reports.

use anyhow::{bail, Result};
use serde_json::Value;

use crate::pipeline::Pipeline;
use crate::report::{diff, Report};
use crate::scenario::Scenario;

/// Relative tolerance of golden comparisons.
pub const GOLDEN_TOL: f64 = 1e-9;

pub const NAMES: [&str; 2] = ["ge-ex", "dem-zei"];

pub fn scenario_text(name: &str) -> Result<&'static str> {
    Ok(match name {
        "ge-ex" => include_str!("../scenarios/ge-ex.toml"),
        "dem-zei" => include_str!("../scenarios/dem-zei.toml"),
        other => bail!("unknown example `{other}`; valid names: {}", NAMES.join(", ")),
    })
}

pub fn golden_text(name: &str) -> Result<&'static str> {
    Ok(match name {
        "ge-ex" => include_str!("../goldens/ge-ex.json"),
        "dem-zei" => include_str!("../goldens/dem-zei.json"),
        other => bail!("unknown example `{other}`; valid names: {}", NAMES.join(", ")),
    })
}

pub struct Reproduction {
    pub report: Report,
    /// Empty when the report matches the golden.
    pub differences: Vec<String>,
}

pub fn reproduce(name: &str) -> Result<Reproduction> {
    let scenario = Scenario::parse(scenario_text(name)?, &format!("{name}.toml"))?;
    let report = Pipeline::new(scenario)?.report()?;
    let golden: Value = serde_json::from_str(golden_text(name)?)?;
    let differences = diff(&golden, &report.json, GOLDEN_TOL);
    Ok(Reproduction { report, differences })
}
