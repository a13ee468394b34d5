//! Radial `p`-harmonic Green profiles on the unit ball and their norms.
//!
//! The profile is `u(ρ) = ∫_ρ^1 D(s)^{1/(1-p)} ds` with the line density
//! `D(s) = w(s) s^{n-1}`, taken without the sphere area `ω_{n-1}`. Superlevel
//! sets `{u ≥ b}` then have capacity `ω_{n-1} b^{1-p}`;
//! [`normalized_green_value`] rescales by `ω_{n-1}^{1/(1-p)}` so that the
//! capacity becomes exactly `b^{1-p}`.

pub mod numeric;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{exponents_equal, Convergence, PowerLog};
use crate::capacity::growth_integral;
use crate::error::{Error, Result};
use crate::exponents::ExponentReport;
use crate::measures::{GrowthFunction, RadialMeasure};
use crate::quad;
use crate::serde_ext;

pub use numeric::NumericNorm;

const PROFILE_REL_TOL: f64 = 1e-12;

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("p must lie in (1, ∞), got {p}")))
    }
}

fn check_radius(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("radius must lie in (0, 1], got {rho}")))
    }
}

/// `u(ρ) = ∫_ρ^1 (w(s) s^{n-1})^{1/(1-p)} ds`.
pub fn radial_green_value(m: &RadialMeasure, p: f64, rho: f64) -> Result<f64> {
    check_p(p)?;
    check_radius(rho)?;
    let e = 1.0 / (1.0 - p);
    let q = quad::integrate_log_with_kinks(
        |s| (e * m.ln_line_density(s.ln())).exp(),
        rho,
        1.0,
        &m.kinks(),
        PROFILE_REL_TOL,
    )?;
    Ok(q.value)
}

/// `ω_{n-1}^{1/(1-p)} u(ρ)`, whose superlevel sets `{G ≥ b}` have capacity
/// `b^{1-p}` relative to the unit ball.
pub fn normalized_green_value(m: &RadialMeasure, p: f64, rho: f64) -> Result<f64> {
    Ok(m.omega.powf(1.0 / (1.0 - p)) * radial_green_value(m, p, rho)?)
}

/// `g_u(ρ) = (w(ρ) ρ^{n-1})^{1/(1-p)} = -u'(ρ)`.
pub fn radial_green_gradient(m: &RadialMeasure, p: f64, rho: f64) -> Result<f64> {
    check_p(p)?;
    check_radius(rho)?;
    Ok((m.ln_line_density(rho.ln()) / (1.0 - p)).exp())
}

/// Immutable `(model, p)` pair with the profile accessors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenProfile {
    pub model: RadialMeasure,
    pub p: f64,
}

impl GreenProfile {
    pub fn new(model: RadialMeasure, p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self { model, p })
    }

    pub fn value(&self, rho: f64) -> Result<f64> {
        radial_green_value(&self.model, self.p, rho)
    }

    pub fn normalized_value(&self, rho: f64) -> Result<f64> {
        normalized_green_value(&self.model, self.p, rho)
    }

    pub fn gradient(&self, rho: f64) -> Result<f64> {
        radial_green_gradient(&self.model, self.p, rho)
    }
}

/// `∫_r^R (ρ/μ(B_ρ))^{1/(p-1)} dρ`, comparable to the Green function at
/// distance `r` from the pole when `R` is the ball radius.
pub fn growth_estimate(g: &GrowthFunction, p: f64, r: f64, big_r: f64) -> Result<f64> {
    check_p(p)?;
    if !(r > 0.0 && big_r >= r && big_r.is_finite()) {
        return Err(Error::domain(format!("need 0 < r <= R, got r = {r}, R = {big_r}")));
    }
    Ok(growth_integral(g, p, r, big_r)?.value)
}

/// `A (inf_u + ∫_r^R (ρ/μ(B_ρ))^{1/(p-1)} dρ)`; for Green functions
/// `inf_u` may be taken as 0.
pub fn pole_profile_estimate(g: &GrowthFunction, p: f64, r: f64, big_r: f64, inf_u: f64, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::domain(format!("scale must be positive, got {scale}")));
    }
    if !(inf_u >= 0.0) {
        return Err(Error::domain(format!("inf_u must be nonnegative, got {inf_u}")));
    }
    Ok(scale * (inf_u + growth_estimate(g, p, r, big_r)?))
}

/// Which pointwise estimate governs `u` near the pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointwiseRegime {
    /// `p < lq0`: `u(x) ≃ (r^p/μ(B_r))^{1/(p-1)}`.
    BelowLq0,
    /// `p = lq0`: two-sided logarithmic bounds.
    AtLq0,
    /// `lq0 < p ≤ us0`: only the integral `∫_r^1 (ρ/μ(B_ρ))^{1/(p-1)} dρ`.
    AboveLq0,
    /// `p > us0`: the Green function is bounded.
    BoundedCase,
}

impl PointwiseRegime {
    pub fn estimate(self) -> &'static str {
        match self {
            PointwiseRegime::BelowLq0 => "u(x) ~ (r^p/mu(B_r))^(1/(p-1))",
            PointwiseRegime::AtLq0 => "u(x) ~ log(1/r) up to two-sided log factors",
            PointwiseRegime::AboveLq0 => "u(x) ~ int_r^1 (rho/mu(B_rho))^(1/(p-1)) drho",
            PointwiseRegime::BoundedCase => "u bounded near the pole",
        }
    }
}

pub fn pointwise_regime(rep: &ExponentReport, p: f64) -> Result<PointwiseRegime> {
    check_p(p)?;
    if p > rep.us0 && !exponents_equal(p, rep.us0) {
        return Ok(PointwiseRegime::BoundedCase);
    }
    Ok(if exponents_equal(p, rep.lq0) {
        PointwiseRegime::AtLq0
    } else if p < rep.lq0 {
        PointwiseRegime::BelowLq0
    } else {
        PointwiseRegime::AboveLq0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    FunctionNorm,
    GradientNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    /// `None` for a divergent integral, written `"divergent"`.
    #[serde(with = "serde_ext::finite_or_divergent")]
    pub value: Option<f64>,
    pub exponent: f64,
    pub kind: NormKind,
    /// Power-log shape of the integrand at 0 that decided convergence.
    pub integrand_shape: PowerLog,
    /// The power sat at the critical value and the log exponent decided.
    pub borderline: bool,
    pub numeric: NumericNorm,
}

impl NormResult {
    pub fn is_finite(&self) -> bool {
        self.value.is_some()
    }
}

/// Shape of `u` near 0, or `None` when `u` stays bounded.
///
/// `u(ρ) = ∫_ρ^1 s^e |log s|^f ds` grows like `ρ^{e+1}|log ρ|^f` for
/// `e < -1` and like `|log ρ|^{f+1}` for `e = -1`, `f > -1`. At `f = -1`
/// the growth is `log|log ρ|`, slower than every power of `|log ρ|`, and is
/// represented by the constant shape with `borderline` set.
fn profile_growth(m: &RadialMeasure, p: f64) -> (Option<PowerLog>, bool) {
    let integrand = m.line_density_shape().powf(1.0 / (1.0 - p));
    let conv = integrand.at_zero();
    if conv.converges {
        return (None, conv.borderline);
    }
    if exponents_equal(integrand.power, -1.0) {
        if exponents_equal(integrand.log_power, -1.0) {
            (Some(PowerLog::new(0.0, 0.0)), true)
        } else {
            (Some(PowerLog::new(0.0, integrand.log_power + 1.0)), true)
        }
    } else {
        (Some(PowerLog::new(integrand.power + 1.0, integrand.log_power)), false)
    }
}

fn function_norm_shape(m: &RadialMeasure, p: f64, tau: f64) -> (PowerLog, Convergence) {
    let d = m.line_density_shape();
    let (growth, growth_borderline) = profile_growth(m, p);
    let shape = match growth {
        Some(u) => u.powf(tau) * d,
        None => d,
    };
    let mut conv = shape.at_zero();
    conv.borderline |= growth_borderline && growth.is_some();
    (shape, conv)
}

/// The numeric shell test for `‖u‖_τ^τ`, independent of the power-log rule.
pub fn numeric_lnorm_u(m: &RadialMeasure, p: f64, tau: f64) -> Result<NumericNorm> {
    check_p(p)?;
    check_exponent(tau)?;
    Ok(numeric::function_norm_test(|x| m.ln_line_density(x), m.omega.ln(), p, tau))
}

/// The numeric shell test for `‖g_u‖_t^t`.
pub fn numeric_lnorm_gradient(m: &RadialMeasure, p: f64, t: f64) -> Result<NumericNorm> {
    check_p(p)?;
    check_exponent(t)?;
    Ok(numeric::gradient_norm_test(|x| m.ln_line_density(x), m.omega.ln(), p, t))
}

fn check_exponent(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("norm exponent must be positive and finite, got {x}")))
    }
}

/// `ω_{n-1} ∫_0^1 u(ρ)^τ w(ρ) ρ^{n-1} dρ`. Convergence is decided by the
/// power-log rule; finite values come from the shell quadrature.
pub fn lnorm_u(m: &RadialMeasure, p: f64, tau: f64) -> Result<NormResult> {
    let numeric = numeric_lnorm_u(m, p, tau)?;
    let (shape, conv) = function_norm_shape(m, p, tau);
    Ok(NormResult {
        value: if conv.converges { numeric.value_estimate.or(Some(numeric.ln_partial_sum.exp())) } else { None },
        exponent: tau,
        kind: NormKind::FunctionNorm,
        integrand_shape: shape,
        borderline: conv.borderline,
        numeric,
    })
}

/// `ω_{n-1} ∫_0^1 (w(ρ) ρ^{n-1})^{1 - t/(p-1)} dρ`, the `t`-th power of
/// the `L^t` norm of `g_u` over the unit ball.
pub fn lnorm_gradient(m: &RadialMeasure, p: f64, t: f64) -> Result<NormResult> {
    let numeric = numeric_lnorm_gradient(m, p, t)?;
    let shape = m.line_density_shape().powf(1.0 - t / (p - 1.0));
    let conv = shape.at_zero();
    Ok(NormResult {
        value: if conv.converges { numeric.value_estimate.or(Some(numeric.ln_partial_sum.exp())) } else { None },
        exponent: t,
        kind: NormKind::GradientNorm,
        integrand_shape: shape,
        borderline: conv.borderline,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{exact_radial, CapacityQuery};
    use crate::exponents::{analytic_exponents, critical_exponents};
    use crate::measures::{builtin_ahlfors, builtin_log, builtin_power, induced_growth};
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    fn unweighted(n: u32) -> RadialMeasure {
        RadialMeasure::unweighted(n).unwrap()
    }

    #[test]
    fn newtonian_profile() {
        let m = unweighted(3);
        assert_relative_eq!(radial_green_value(&m, 2.0, 0.5).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(normalized_green_value(&m, 2.0, 0.5).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-12);
        assert_relative_eq!(radial_green_gradient(&m, 2.0, 0.5).unwrap(), 4.0, max_relative = 1e-14);
        assert_eq!(radial_green_value(&m, 2.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn planar_log_profile() {
        let m = unweighted(2);
        assert_relative_eq!(radial_green_value(&m, 2.0, 1.0 / E).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn log_model_gradient_closed_form() {
        let m = builtin_log(3, 3.0, 1.0).unwrap();
        let g = radial_green_gradient(&m, 2.0, (-2.0f64).exp()).unwrap();
        assert_relative_eq!(g, E.powi(4) / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn gradient_is_minus_derivative() {
        let m = builtin_power(3, 1.0).unwrap();
        for &rho in &[1e-6, 1e-3, 0.2, 0.7] {
            let h = 1e-4 * rho;
            let fd = (radial_green_value(&m, 2.5, rho + h).unwrap() - radial_green_value(&m, 2.5, rho - h).unwrap())
                / (2.0 * h);
            assert_relative_eq!(-fd, radial_green_gradient(&m, 2.5, rho).unwrap(), max_relative = 1e-6);
        }
    }

    /// Radius where `u` takes the value `b`, by bisection in `ln ρ`.
    fn level_radius(m: &RadialMeasure, p: f64, b: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0f64, 0.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if radial_green_value(m, p, mid.exp()).unwrap() > b {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    #[test]
    fn superlevel_capacities_match_both_normalizations() {
        for (m, p) in
            [(unweighted(3), 2.0), (builtin_power(3, 1.0).unwrap(), 1.7), (builtin_log(3, 3.0, 1.0).unwrap(), 2.0)]
        {
            for &b in &[0.5, 3.0, 20.0] {
                let rho_b = level_radius(&m, p, b);
                let cap = exact_radial(&m, &CapacityQuery::new(p, rho_b, 1.0).unwrap()).unwrap().value;
                assert_relative_eq!(cap, m.omega * b.powf(1.0 - p), max_relative = 1e-8);

                let scale = m.omega.powf(1.0 / (1.0 - p));
                let g = normalized_green_value(&m, p, rho_b).unwrap();
                assert_relative_eq!(g, scale * b, max_relative = 1e-8);
                assert_relative_eq!(cap, g.powf(1.0 - p), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn growth_estimate_ahlfors() {
        let g3 = builtin_ahlfors(3.0).unwrap();
        let v = growth_estimate(&g3, 2.0, 0.1, 1.0).unwrap();
        assert_relative_eq!(v, 9.0, max_relative = 1e-9);
        // p < Q: ((p-1)/(Q-p)) (r^{(p-Q)/(p-1)} - R^{(p-Q)/(p-1)})
        let v = growth_estimate(&g3, 2.5, 0.01, 0.5).unwrap();
        let e = (2.5 - 3.0) / 1.5;
        assert_relative_eq!(v, (1.5 / 0.5) * (0.01f64.powf(e) - 0.5f64.powf(e)), max_relative = 1e-9);
        let g2 = builtin_ahlfors(2.0).unwrap();
        assert_relative_eq!(growth_estimate(&g2, 2.0, 0.01, 1.0).unwrap(), 100f64.ln(), max_relative = 1e-9);
        assert_eq!(growth_estimate(&g2, 2.0, 0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn pole_estimate() {
        let g3 = builtin_ahlfors(3.0).unwrap();
        assert_relative_eq!(pole_profile_estimate(&g3, 2.0, 0.1, 1.0, 5.0, 2.0).unwrap(), 28.0, max_relative = 1e-9);
        assert_eq!(pole_profile_estimate(&g3, 2.0, 0.4, 0.4, 5.0, 2.0).unwrap(), 10.0);
        assert!(pole_profile_estimate(&g3, 2.0, 0.1, 1.0, 5.0, 0.0).is_err());
    }

    #[test]
    fn regimes() {
        let mut rep = analytic_exponents(&builtin_ahlfors(3.0).unwrap()).unwrap();
        assert_eq!(pointwise_regime(&rep, 2.0).unwrap(), PointwiseRegime::BelowLq0);
        assert_eq!(pointwise_regime(&rep, 3.0).unwrap(), PointwiseRegime::AtLq0);
        rep.us0 = 2.0;
        rep.lq0 = 1.5;
        assert_eq!(pointwise_regime(&rep, 2.5).unwrap(), PointwiseRegime::BoundedCase);
        assert_eq!(pointwise_regime(&rep, 1.8).unwrap(), PointwiseRegime::AboveLq0);
    }

    #[test]
    fn function_norms_unweighted() {
        let m = unweighted(3);
        // u = 1/ρ - 1: ω ∫ (1-ρ)² dρ = 4π/3
        let r = lnorm_u(&m, 2.0, 2.0).unwrap();
        assert_relative_eq!(r.value.unwrap(), 4.0 * PI / 3.0, max_relative = 1e-6);
        assert!(r.numeric.finite);
        let r = lnorm_u(&m, 2.0, 3.0).unwrap();
        assert!(r.value.is_none());
        assert!(!r.numeric.finite);
        let r = lnorm_u(&m, 2.0, 1e-9).unwrap();
        assert_relative_eq!(r.value.unwrap(), 4.0 * PI / 3.0, max_relative = 1e-6);
    }

    #[test]
    fn function_norm_finiteness_is_monotone_in_tau() {
        let m = builtin_log(3, 3.0, 1.0).unwrap();
        let tau_p =
            critical_exponents(&analytic_exponents(&induced_growth(&m).unwrap()).unwrap(), 2.0).unwrap().tau_p.unwrap();
        let mut seen_divergent = false;
        for &tau in &[0.5, 1.0, 2.0, 2.5, tau_p, tau_p + 0.1, 4.0, 6.0] {
            let r = lnorm_u(&m, 2.0, tau).unwrap();
            if seen_divergent {
                assert!(!r.is_finite(), "tau {tau}");
            }
            seen_divergent |= !r.is_finite();
            assert_eq!(r.is_finite(), r.numeric.finite, "tau {tau}");
        }
        assert!(lnorm_u(&m, 2.0, tau_p).unwrap().is_finite());
        assert!(!lnorm_u(&m, 2.0, tau_p + 0.1).unwrap().is_finite());
    }

    #[test]
    fn gradient_norms() {
        let m = unweighted(3);
        // t = 1, p = 2: ω ∫_0^1 dρ
        let r = lnorm_gradient(&m, 2.0, 1.0).unwrap();
        assert_relative_eq!(r.value.unwrap(), 4.0 * PI, max_relative = 1e-8);

        for (beta, finite) in [(1.0, false), (2.0, false), (2.5, true), (3.0, true)] {
            let m = builtin_log(3, 3.0, beta).unwrap();
            for &p in &[1.5, 2.0, 2.5] {
                let t_p = 3.0 * (p - 1.0) / 2.0;
                let r = lnorm_gradient(&m, p, t_p).unwrap();
                assert_eq!(r.is_finite(), finite, "beta {beta}, p {p}");
                assert!(r.borderline);
                assert_eq!(r.numeric.finite, finite, "beta {beta}, p {p}: {:?}", r.numeric);
            }
        }
    }

    #[test]
    fn gradient_norm_independent_of_p_at_critical_exponent() {
        let m = builtin_log(3, 3.0, 3.0).unwrap();
        let vals: Vec<f64> = [1.5, 2.0, 2.5]
            .iter()
            .map(|&p| lnorm_gradient(&m, p, 3.0 * (p - 1.0) / 2.0).unwrap().value.unwrap())
            .collect();
        assert_relative_eq!(vals[0], vals[1], max_relative = 1e-12);
        assert_relative_eq!(vals[1], vals[2], max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = unweighted(3);
        assert!(radial_green_value(&m, 1.0, 0.5).is_err());
        assert!(radial_green_value(&m, 2.0, 1.5).is_err());
        assert!(lnorm_u(&m, 2.0, 0.0).is_err());
    }
}
