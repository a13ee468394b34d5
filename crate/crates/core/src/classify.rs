//! Decision procedures at the point `x₀`: zero capacity of the singleton,
//! `p`-parabolicity, boundedness and `L^τ` integrability of the Green
//! function, and `L^t` integrability of its gradient.
//!
//! Every convergence decision goes through the power-log rule in
//! [`crate::asymptotics`]. Negative answers that rest on Poincaré
//! inequalities are only given when the caller declares them in an
//! [`AssumptionProfile`]; otherwise the verdict is `Inconclusive`.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{exponents_equal, series_converges, PowerLog};
use crate::error::{Error, Result};
use crate::exponents::{analytic_exponents, critical_exponents, ExponentReport};
use crate::green::lnorm_gradient;
use crate::measures::{AssumptionProfile, AsymptoticClass, GrowthFunction};
use crate::serde_ext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Question {
    SingletonZero,
    IsParabolic,
    GreenBounded,
    GreenInLtau,
    GradientInLt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictState {
    Member,
    NonMember,
    BorderlineIn,
    BorderlineOut,
    Inconclusive,
}

/// The rule that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// `∫_0 (ρ/μ(B_ρ))^{1/(p-1)} dρ` decided by the power-log rule.
    IntegralAtZero,
    /// `∫^∞ (ρ/μ(B_ρ))^{1/(p-1)} dρ` decided by the power-log rule.
    IntegralAtInfinity,
    /// `p > us0`: the Green function is bounded.
    BoundedGreen,
    /// Exponent strictly below the critical one.
    BelowCritical,
    /// Exponent strictly above the critical one.
    AboveCritical,
    /// `τ = τ_p`, `p < us0`: `Σ_k (2^{-k us0}/μ(B_{2^{-k}}))^{p/(us0-p)}`.
    DyadicSeries,
    /// `τ = τ_p = ∞`, `p = us0`: the series with exponent `1/(us0-1)`.
    LogarithmicSeries,
    /// `p = us0`: `g_u ∈ L^t` iff `t < p` when the singleton has zero capacity.
    ZeroCapacityGradient,
    /// `p = us0` with positive singleton capacity: `u` has finite energy.
    FiniteEnergy,
    /// Nonintegrability above `t_p` under a `t`-Poincaré inequality.
    PoincareNonintegrability,
    /// `t = t_p`, `p < q̂`, with a `t_p`-Poincaré inequality.
    BorderlineBelowQHat,
    /// `t = t_p`, `q̂ ≤ p < us0`, with a Poincaré inequality below `t_p`.
    BorderlineAboveQHat,
    /// Exact norm of the radial gradient.
    RadialExact,
    MissingHypothesis,
    MissingAsymptotics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisKind {
    PoincareAtX0,
    PoincareLargeRadii,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisUse {
    pub kind: HypothesisKind,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub question: Question,
    pub state: VerdictState,
    pub basis: Basis,
    pub hypotheses_used: Vec<HypothesisUse>,
    /// The critical exponent the query was compared against, if any.
    #[serde(default, with = "serde_ext::extended_opt", skip_serializing_if = "Option::is_none")]
    pub critical_exponent: Option<f64>,
}

impl Verdict {
    fn new(question: Question, state: VerdictState, basis: Basis) -> Self {
        Self { question, state, basis, hypotheses_used: Vec::new(), critical_exponent: None }
    }

    fn using(mut self, kind: HypothesisKind, exponent: f64) -> Self {
        self.hypotheses_used.push(HypothesisUse { kind, exponent });
        self
    }

    fn at(mut self, critical: f64) -> Self {
        self.critical_exponent = Some(critical);
        self
    }

    /// Member or BorderlineIn.
    pub fn is_in(&self) -> bool {
        matches!(self.state, VerdictState::Member | VerdictState::BorderlineIn)
    }

    /// NonMember or BorderlineOut.
    pub fn is_out(&self) -> bool {
        matches!(self.state, VerdictState::NonMember | VerdictState::BorderlineOut)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("p must lie in (1, ∞), got {p}")))
    }
}

/// `(ρ/f)^{1/(p-1)}` for `f ~ C ρ^a |log ρ|^b`.
fn capacity_integrand(class: &AsymptoticClass, p: f64) -> PowerLog {
    PowerLog::new(1.0 - class.exponent_a, -class.log_exponent_b).powf(1.0 / (p - 1.0))
}

/// Whether `∫_0 (ρ/μ(B_ρ))^{1/(p-1)} dρ` converges, i.e. the singleton
/// has positive capacity.
fn capacity_integral_converges(g: &GrowthFunction, p: f64) -> Option<bool> {
    g.at_zero.map(|c| capacity_integrand(&c, p).at_zero().converges)
}

/// `Member` when `C_p({x₀}) = 0`.
pub fn singleton_zero(g: &GrowthFunction, p: f64, hyp: &AssumptionProfile) -> Result<Verdict> {
    check_p(p)?;
    hyp.validate()?;
    let q = Question::SingletonZero;
    Ok(match capacity_integral_converges(g, p) {
        None => Verdict::new(q, VerdictState::Inconclusive, Basis::MissingAsymptotics),
        Some(false) => Verdict::new(q, VerdictState::Member, Basis::IntegralAtZero),
        Some(true) => match hyp.poincare_witness_below(p) {
            Some(t0) => {
                Verdict::new(q, VerdictState::NonMember, Basis::IntegralAtZero).using(HypothesisKind::PoincareAtX0, t0)
            }
            None => Verdict::new(q, VerdictState::Inconclusive, Basis::MissingHypothesis),
        },
    })
}

/// `Member` when the Green function with pole `x₀` is bounded, which holds
/// exactly when `∫_0 (ρ/μ(B_ρ))^{1/(p-1)} dρ < ∞`.
pub fn green_bounded(g: &GrowthFunction, p: f64) -> Result<Verdict> {
    check_p(p)?;
    let q = Question::GreenBounded;
    Ok(match capacity_integral_converges(g, p) {
        None => Verdict::new(q, VerdictState::Inconclusive, Basis::MissingAsymptotics),
        Some(true) => Verdict::new(q, VerdictState::Member, Basis::IntegralAtZero),
        Some(false) => Verdict::new(q, VerdictState::NonMember, Basis::IntegralAtZero),
    })
}

/// `Member` when the space is `p`-parabolic, i.e.
/// `∫^∞ (ρ/μ(B_ρ))^{1/(p-1)} dρ = ∞`. The converse needs doubling and a
/// Poincaré inequality for large radii, declared with an exponent below `p`.
pub fn is_parabolic(g: &GrowthFunction, p: f64, hyp: &AssumptionProfile) -> Result<Verdict> {
    check_p(p)?;
    hyp.validate()?;
    let q = Question::IsParabolic;
    let Some(class) = g.at_infinity else {
        return Ok(Verdict::new(q, VerdictState::Inconclusive, Basis::MissingAsymptotics));
    };
    if !capacity_integrand(&class, p).at_infinity().converges {
        return Ok(Verdict::new(q, VerdictState::Member, Basis::IntegralAtInfinity));
    }
    Ok(match hyp.large_radii_witness_below(p) {
        Some(t0) => Verdict::new(q, VerdictState::NonMember, Basis::IntegralAtInfinity)
            .using(HypothesisKind::PoincareLargeRadii, t0),
        None => Verdict::new(q, VerdictState::Inconclusive, Basis::MissingHypothesis),
    })
}

fn exponents_of(g: &GrowthFunction) -> Option<(ExponentReport, f64)> {
    let rep = analytic_exponents(g).ok()?;
    Some((rep, g.at_zero?.log_exponent_b))
}

/// Whether `u ∈ L^τ` near the pole. `τ = ∞` is accepted and asks for
/// boundedness at `p = us0`.
pub fn green_in_ltau(g: &GrowthFunction, p: f64, tau: f64) -> Result<Verdict> {
    check_p(p)?;
    if !(tau > 0.0) || tau.is_nan() {
        return Err(Error::domain(format!("tau must be positive, got {tau}")));
    }
    let q = Question::GreenInLtau;
    let Some((rep, b)) = exponents_of(g) else {
        return Ok(Verdict::new(q, VerdictState::Inconclusive, Basis::MissingAsymptotics));
    };
    let us0 = rep.us0;
    let crit = critical_exponents(&rep, p)?;
    let Some(tau_p) = crit.tau_p else {
        return Ok(Verdict::new(q, VerdictState::Member, Basis::BoundedGreen));
    };
    if !exponents_equal(tau, tau_p) {
        let state = if tau < tau_p { VerdictState::Member } else { VerdictState::NonMember };
        let basis = if tau < tau_p { Basis::BelowCritical } else { Basis::AboveCritical };
        return Ok(Verdict::new(q, state, basis).at(tau_p));
    }
    let (converges, basis) = if tau_p.is_infinite() {
        (series_converges(b / (us0 - 1.0)), Basis::LogarithmicSeries)
    } else {
        (series_converges(b * p / (us0 - p)), Basis::DyadicSeries)
    };
    let state = if converges { VerdictState::BorderlineIn } else { VerdictState::BorderlineOut };
    Ok(Verdict::new(q, state, basis).at(tau_p))
}

/// Exact answer from the radial norm, when the model is radial.
fn radial_route(g: &GrowthFunction, p: f64, t: f64, critical: f64) -> Result<Verdict> {
    let q = Question::GradientInLt;
    Ok(match g.radial() {
        Some(m) => {
            let norm = lnorm_gradient(m, p, t)?;
            let state = if norm.is_finite() { VerdictState::Member } else { VerdictState::NonMember };
            Verdict::new(q, state, Basis::RadialExact).at(critical)
        }
        None => Verdict::new(q, VerdictState::Inconclusive, Basis::MissingHypothesis).at(critical),
    })
}

/// Whether `g_u ∈ L^t` near the pole.
pub fn gradient_in_lt(g: &GrowthFunction, p: f64, t: f64, hyp: &AssumptionProfile) -> Result<Verdict> {
    check_p(p)?;
    hyp.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive and finite, got {t}")));
    }
    let q = Question::GradientInLt;
    let Some((rep, b)) = exponents_of(g) else {
        return Ok(Verdict::new(q, VerdictState::Inconclusive, Basis::MissingAsymptotics));
    };
    let us0 = rep.us0;
    let crit = critical_exponents(&rep, p)?;
    let t_p = crit.t_p;

    if crit.tau_p.is_none() {
        // p > us0: u has finite p-energy
        if t <= p {
            return Ok(Verdict::new(q, VerdictState::Member, Basis::BoundedGreen));
        }
        return radial_route(g, p, t, t_p);
    }
    if t < t_p && !exponents_equal(t, t_p) {
        return Ok(Verdict::new(q, VerdictState::Member, Basis::BelowCritical).at(t_p));
    }
    if exponents_equal(p, us0) {
        // here t_p = p and t ≥ p
        let positive_capacity = capacity_integral_converges(g, p).unwrap_or(false);
        if !positive_capacity {
            return Ok(Verdict::new(q, VerdictState::NonMember, Basis::ZeroCapacityGradient).at(t_p));
        }
        if exponents_equal(t, p) {
            return Ok(Verdict::new(q, VerdictState::Member, Basis::FiniteEnergy).at(t_p));
        }
        return radial_route(g, p, t, t_p);
    }

    if !exponents_equal(t, t_p) {
        if t >= 1.0 {
            if let Some(t0) = hyp.poincare_witness(t) {
                return Ok(Verdict::new(q, VerdictState::NonMember, Basis::PoincareNonintegrability)
                    .at(t_p)
                    .using(HypothesisKind::PoincareAtX0, t0));
            }
        }
        return radial_route(g, p, t, t_p);
    }

    // t = t_p with p < us0
    let not_only_upper = !(b > 0.0);
    let q_hat = crit.q_hat;
    if not_only_upper && p < q_hat && !exponents_equal(p, q_hat) && t_p >= 1.0 {
        if let Some(t0) = hyp.poincare_witness(t_p) {
            return Ok(Verdict::new(q, VerdictState::BorderlineOut, Basis::BorderlineBelowQHat)
                .at(t_p)
                .using(HypothesisKind::PoincareAtX0, t0));
        }
    }
    if not_only_upper && (q_hat <= p || exponents_equal(p, q_hat)) && rep.lq0 > 1.0 {
        if let Some(t0) = hyp.poincare_witness_below(t_p) {
            return Ok(Verdict::new(q, VerdictState::BorderlineOut, Basis::BorderlineAboveQHat)
                .at(t_p)
                .using(HypothesisKind::PoincareAtX0, t0));
        }
    }
    radial_route(g, p, t, t_p)
}

/// Integrability at the critical exponent propagates upward in `p`: if
/// `u_{p1} ∈ L^{τ_{p1}}` then `u_{p2} ∈ L^{τ_{p2}}` for `p1 < p2 < us0`.
/// Returns whether the implication holds for `g`.
pub fn tau_monotonicity_check(g: &GrowthFunction, p1: f64, p2: f64) -> Result<bool> {
    let us0 = analytic_exponents(g)?.us0;
    if !(1.0 < p1 && p1 < p2 && p2 < us0) {
        return Err(Error::domain(format!("need 1 < p1 < p2 < us0 = {us0}, got p1 = {p1}, p2 = {p2}")));
    }
    let at_critical = |p: f64| -> Result<Verdict> {
        let tau_p = critical_exponents(&analytic_exponents(g)?, p)?.tau_p.unwrap_or(f64::INFINITY);
        green_in_ltau(g, p, tau_p)
    };
    let v1 = at_critical(p1)?;
    let v2 = at_critical(p2)?;
    Ok(v1.state != VerdictState::BorderlineIn || v2.state == VerdictState::BorderlineIn)
}

/// Dispatches a question with its exponent (`τ` or `t` where relevant).
pub fn classify(
    question: Question,
    g: &GrowthFunction,
    p: f64,
    exponent: Option<f64>,
    hyp: &AssumptionProfile,
) -> Result<Verdict> {
    let need = |name: &str| exponent.ok_or_else(|| Error::invalid(format!("question needs an exponent {name}")));
    match question {
        Question::SingletonZero => singleton_zero(g, p, hyp),
        Question::IsParabolic => is_parabolic(g, p, hyp),
        Question::GreenBounded => green_bounded(g, p),
        Question::GreenInLtau => green_in_ltau(g, p, need("tau")?),
        Question::GradientInLt => gradient_in_lt(g, p, need("t")?, hyp),
    }
}
