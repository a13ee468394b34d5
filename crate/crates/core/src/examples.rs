//! Worked-example regression suite behind `nlpot verify-examples`.
//!
//! Each example is a table of expected outcomes (verdict states or values)
//! checked against freshly computed ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{exact_radial, variational_radial, CapacityQuery, VariationalOptions};
use crate::classify::{gradient_in_lt, green_bounded, green_in_ltau, is_parabolic, VerdictState};
use crate::error::{Error, Result};
use crate::exponents::{analytic_exponents, critical_exponents};
use crate::measures::{builtin_ahlfors, builtin_log, builtin_power, induced_growth, AssumptionProfile, RadialMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleId {
    ExPower,
    ExLog,
    #[serde(rename = "ex-log-2")]
    ExLog2,
    Newtonian,
    ParabolicityGrid,
}

impl ExampleId {
    pub const ALL: [ExampleId; 5] =
        [ExampleId::ExPower, ExampleId::ExLog, ExampleId::ExLog2, ExampleId::Newtonian, ExampleId::ParabolicityGrid];

    pub fn tag(self) -> &'static str {
        match self {
            ExampleId::ExPower => "ex-power",
            ExampleId::ExLog => "ex-log",
            ExampleId::ExLog2 => "ex-log-2",
            ExampleId::Newtonian => "newtonian",
            ExampleId::ParabolicityGrid => "parabolicity-grid",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown example id {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Outcome {
    State { state: VerdictState },
    Value { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub label: String,
    pub expected: Outcome,
    pub observed: Outcome,
    /// Relative tolerance for value rows.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl ExampleRow {
    fn state(label: String, expected: VerdictState, observed: VerdictState) -> Self {
        Self {
            label,
            expected: Outcome::State { state: expected },
            observed: Outcome::State { state: observed },
            tolerance: None,
            pass: expected == observed,
        }
    }

    fn value(label: String, expected: f64, observed: f64, tolerance: f64) -> Self {
        let rel = (observed - expected).abs() / expected.abs();
        Self {
            label,
            expected: Outcome::Value { value: expected },
            observed: Outcome::Value { value: observed },
            tolerance: Some(tolerance),
            pass: rel < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub id: ExampleId,
    pub rows: Vec<ExampleRow>,
    pub pass: bool,
}

/// Suite knobs. `inject_beta` replaces the log exponent of the log-model
/// examples while keeping their expected tables, which must then fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerance: f64,
    pub inject_beta: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 0x5eed, tolerance: 1e-8, inject_beta: None }
    }
}

pub fn run_suite(ids: &[ExampleId], cfg: &SuiteConfig) -> Result<Vec<ExampleReport>> {
    ids.par_iter().map(|&id| run_example(id, cfg)).collect()
}

pub fn run_example(id: ExampleId, cfg: &SuiteConfig) -> Result<ExampleReport> {
    let rows = match id {
        ExampleId::ExPower => ex_power(cfg)?,
        ExampleId::ExLog => ex_log(cfg)?,
        ExampleId::ExLog2 => ex_log_2(cfg)?,
        ExampleId::Newtonian => newtonian(cfg)?,
        ExampleId::ParabolicityGrid => parabolicity_grid()?,
    };
    let pass = rows.iter().all(|r| r.pass);
    Ok(ExampleReport { id, rows, pass })
}

/// Power weights `|x|^{-α}` on `ℝ³`: every exponent equals `n - α`, and
/// with no logarithmic factor the critical `L^τ` test is never passed.
fn ex_power(cfg: &SuiteConfig) -> Result<Vec<ExampleRow>> {
    let mut rows = Vec::new();
    for alpha in [0.5, 1.0, 1.5] {
        let g = induced_growth(&builtin_power(3, alpha)?)?;
        let rep = analytic_exponents(&g)?;
        let q = 3.0 - alpha;
        for (name, v) in [("lq0", rep.lq0), ("ls0", rep.ls0), ("us0", rep.us0), ("uq0", rep.uq0)] {
            rows.push(ExampleRow::value(format!("alpha={alpha} {name}"), q, v, cfg.tolerance));
        }
        let p = 1.0 + 0.5 * (q - 1.0);
        let crit = critical_exponents(&rep, p)?;
        let tau_p = q * (p - 1.0) / (q - p);
        rows.push(ExampleRow::value(
            format!("alpha={alpha} p={p} tau_p"),
            tau_p,
            crit.tau_p.unwrap_or(f64::NAN),
            cfg.tolerance,
        ));
        let v = green_in_ltau(&g, p, tau_p)?;
        rows.push(ExampleRow::state(format!("alpha={alpha} p={p} u in L^tau_p"), VerdictState::BorderlineOut, v.state));
    }
    Ok(rows)
}

fn log_measure(beta: f64, cfg: &SuiteConfig) -> Result<RadialMeasure> {
    builtin_log(3, 3.0, cfg.inject_beta.unwrap_or(beta))
}

/// `s = 3`, `n = 3`: `u ∈ L^{τ_p}` iff `s/(1+β) < p < s`, and `u` is bounded
/// at `p = s` iff `β > s - 1`.
fn ex_log(cfg: &SuiteConfig) -> Result<Vec<ExampleRow>> {
    let mut rows = Vec::new();
    let g = induced_growth(&log_measure(1.0, cfg)?)?;
    for (p, expected) in [
        (1.2, VerdictState::BorderlineOut),
        (1.4, VerdictState::BorderlineOut),
        (1.6, VerdictState::BorderlineIn),
        (2.0, VerdictState::BorderlineIn),
        (2.9, VerdictState::BorderlineIn),
    ] {
        let tau_p = 3.0 * (p - 1.0) / (3.0 - p);
        let v = green_in_ltau(&g, p, tau_p)?;
        rows.push(ExampleRow::state(format!("beta=1 p={p} u in L^tau_p"), expected, v.state));
    }
    for (beta, expected) in [(1.0, VerdictState::NonMember), (2.5, VerdictState::Member)] {
        let g = induced_growth(&log_measure(beta, cfg)?)?;
        let v = green_bounded(&g, 3.0)?;
        rows.push(ExampleRow::state(format!("beta={beta} p=3 u bounded"), expected, v.state));
    }
    Ok(rows)
}

/// `s = 3`, `n = 3`: `g_u ∈ L^{t_p}` iff `β > s - 1`, for every `p`.
fn ex_log_2(cfg: &SuiteConfig) -> Result<Vec<ExampleRow>> {
    let mut rows = Vec::new();
    for (beta, expected) in [
        (1.0, VerdictState::NonMember),
        (2.0, VerdictState::NonMember),
        (2.5, VerdictState::Member),
        (3.0, VerdictState::Member),
    ] {
        let g = induced_growth(&log_measure(beta, cfg)?)?;
        for p in [1.5, 2.0, 2.5] {
            let t_p = 3.0 * (p - 1.0) / 2.0;
            let v = gradient_in_lt(&g, p, t_p, &AssumptionProfile::default())?;
            rows.push(ExampleRow::state(format!("beta={beta} p={p} g_u in L^t_p"), expected, v.state));
        }
    }
    Ok(rows)
}

/// Newtonian condensers in `ℝ³`: `cap_2 = 4π rR/(R - r)`.
fn newtonian(cfg: &SuiteConfig) -> Result<Vec<ExampleRow>> {
    let m = RadialMeasure::unweighted(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for i in 0..10 {
        let a: f64 = 0.01 * 1000f64.powf(rng.gen::<f64>());
        let b: f64 = 0.01 * 1000f64.powf(rng.gen::<f64>());
        let (r, big_r) = if a < b { (a, b) } else { (b, a) };
        let value = exact_radial(&m, &CapacityQuery::new(2.0, r, big_r)?)?.value;
        let expected = 4.0 * std::f64::consts::PI * r * big_r / (big_r - r);
        rows.push(ExampleRow::value(format!("exact #{i} r={r:.6} R={big_r:.6}"), expected, value, cfg.tolerance));
    }
    let q = CapacityQuery::new(2.0, 1.0, 2.0)?;
    let v = variational_radial(&m, &q, &VariationalOptions::with_n(4096))?;
    rows.push(ExampleRow::value("variational N=4096 r=1 R=2".into(), 8.0 * std::f64::consts::PI, v.result.value, 5e-3));
    Ok(rows)
}

/// Ahlfors-regular growth `ρ^Q`: `p`-parabolic iff `Q ≤ p`.
fn parabolicity_grid() -> Result<Vec<ExampleRow>> {
    let hyp = AssumptionProfile { poincare_large_radii: vec![1.0], ..AssumptionProfile::default() };
    let mut rows = Vec::new();
    for q in [1.5, 2.0, 2.5, 3.0, 3.5] {
        for p in [2.0, 3.0] {
            let expected = if q <= p { VerdictState::Member } else { VerdictState::NonMember };
            let v = is_parabolic(&builtin_ahlfors(q)?, p, &hyp)?;
            rows.push(ExampleRow::state(format!("Q={q} p={p} parabolic"), expected, v.state));
        }
    }
    Ok(rows)
}
