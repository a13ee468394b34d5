//! Annulus `p`-capacities `cap_p(B_r, B_R)`.
//!
//! Five routes are offered. Only [`exact_radial`] and [`variational_radial`]
//! compute the capacity itself (for radial weights); the others are
//! estimators whose multiplicative constants are set to 1, so they agree
//! with the capacity only up to a bounded factor.

mod variational;

use serde::{Deserialize, Serialize};

pub use variational::{variational_radial, VariationalOptions, VariationalSolution};

use crate::error::{Error, Result};
use crate::measures::{GrowthFunction, RadialMeasure};
use crate::quad;

/// Relative tolerance for the inner integrals.
pub const INNER_REL_TOL: f64 = 1e-9;
const EXACT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityQuery {
    pub p: f64,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl CapacityQuery {
    pub fn new(p: f64, r: f64, big_r: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::domain(format!("p must lie in (1, ∞), got {p}")));
        }
        if !(r > 0.0 && big_r > r && big_r.is_finite()) {
            return Err(Error::domain(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
        }
        Ok(Self { p, r, big_r })
    }

    /// `2r ≤ R`, required by the two-sided integral estimate.
    pub fn separated(&self) -> bool {
        2.0 * self.r <= self.big_r * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityMethod {
    IntegralEstimate,
    ExactRadial,
    DyadicUpper,
    Variational,
    InterpolationLower,
}

impl CapacityMethod {
    pub fn tag(self) -> &'static str {
        match self {
            CapacityMethod::IntegralEstimate => "integral-estimate",
            CapacityMethod::ExactRadial => "exact-radial",
            CapacityMethod::DyadicUpper => "dyadic-upper",
            CapacityMethod::Variational => "variational",
            CapacityMethod::InterpolationLower => "interpolation-lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub value: f64,
    pub method: CapacityMethod,
    pub abs_error_estimate: f64,
    /// False when the query violates a hypothesis of the method (e.g.
    /// `2r > R` for the integral estimate); the value is still returned.
    pub hypothesis_ok: bool,
}

/// `I^{1-p}` with the error of `I` propagated to first order.
fn power_of_integral(inner: quad::Quad, p: f64) -> (f64, f64) {
    let value = inner.value.powf(1.0 - p);
    let err = (p - 1.0) * value * inner.abs_error / inner.value;
    (value, err)
}

/// `∫_r^R (ρ / f(ρ))^{1/(p-1)} dρ`.
pub(crate) fn growth_integral(g: &GrowthFunction, p: f64, r: f64, big_r: f64) -> Result<quad::Quad> {
    let e = 1.0 / (p - 1.0);
    quad::integrate_log(
        |rho| match g.evaluate(rho) {
            Ok(f) => (rho / f).powf(e),
            Err(_) => f64::NAN,
        },
        r,
        big_r,
        INNER_REL_TOL,
    )
}

/// `(∫_r^R (ρ/μ(B_ρ))^{1/(p-1)} dρ)^{1-p}`, comparable to the capacity
/// when `2r ≤ R`.
pub fn integral_estimate(g: &GrowthFunction, q: &CapacityQuery) -> Result<CapacityResult> {
    let inner = growth_integral(g, q.p, q.r, q.big_r)?;
    let (value, abs_error_estimate) = power_of_integral(inner, q.p);
    Ok(CapacityResult {
        value,
        method: CapacityMethod::IntegralEstimate,
        abs_error_estimate,
        hypothesis_ok: q.separated(),
    })
}

/// `(∫_r^R f'(ρ)^{1/(1-p)} dρ)^{1-p}` with `f' = ω_{n-1} w(ρ) ρ^{n-1}`;
/// exact for every annulus.
pub fn exact_radial(m: &RadialMeasure, q: &CapacityQuery) -> Result<CapacityResult> {
    let ln_omega = m.omega.ln();
    let e = 1.0 / (1.0 - q.p);
    let inner = quad::integrate_log_with_kinks(
        |rho| ((ln_omega + m.ln_line_density(rho.ln())) * e).exp(),
        q.r,
        q.big_r,
        &m.kinks(),
        EXACT_REL_TOL,
    )?;
    let (value, abs_error_estimate) = power_of_integral(inner, q.p);
    Ok(CapacityResult { value, method: CapacityMethod::ExactRadial, abs_error_estimate, hypothesis_ok: true })
}

/// Number of full dyadic steps `⌊log₂(R/r)⌋`.
fn dyadic_steps(r: f64, big_r: f64) -> u32 {
    ((big_r / r).log2() + 1e-12).floor().max(0.0) as u32
}

/// `(Σ_{k=1}^{k₀} (r_k^p / f(r_k))^{1/(p-1)})^{1-p}` with `r_k = 2^k r`,
/// the chaining bound over dyadic annuli.
pub fn dyadic_upper(g: &GrowthFunction, q: &CapacityQuery) -> Result<CapacityResult> {
    let k0 = dyadic_steps(q.r, q.big_r);
    if k0 == 0 {
        return Err(Error::domain(format!("dyadic bound needs 2r <= R, got r = {}, R = {}", q.r, q.big_r)));
    }
    let e = 1.0 / (q.p - 1.0);
    let mut sum = 0.0;
    let mut rk = q.r;
    for _ in 0..k0 {
        rk *= 2.0;
        sum += (rk.powf(q.p) / g.evaluate(rk)?).powf(e);
    }
    Ok(CapacityResult {
        value: sum.powf(1.0 - q.p),
        method: CapacityMethod::DyadicUpper,
        abs_error_estimate: 0.0,
        hypothesis_ok: true,
    })
}

/// Hölder interpolation lower bound for `cap_t` from exponents `q < t < p`:
/// `est_p^{1-α} · (∫_r^R (ρ/f)^{1/(q-1)} dρ)^{α(1-q)}`, `α = (p-t)/(p-q)`.
pub fn interpolation_lower(g: &GrowthFunction, p: f64, q: f64, t: f64, r: f64, big_r: f64) -> Result<CapacityResult> {
    if !(1.0 < q && q < t && t < p && p.is_finite()) {
        return Err(Error::domain(format!("need 1 < q < t < p, got q = {q}, t = {t}, p = {p}")));
    }
    let query_p = CapacityQuery::new(p, r, big_r)?;
    let alpha = (p - t) / (p - q);
    let upper = integral_estimate(g, &query_p)?;
    let inner_q = growth_integral(g, q, r, big_r)?;
    let (lower_q, lower_q_err) = power_of_integral(inner_q, q);
    let value = upper.value.powf(1.0 - alpha) * lower_q.powf(alpha);
    let rel_err = (1.0 - alpha) * upper.abs_error_estimate / upper.value + alpha * lower_q_err / lower_q;
    Ok(CapacityResult {
        value,
        method: CapacityMethod::InterpolationLower,
        abs_error_estimate: value * rel_err,
        hypothesis_ok: query_p.separated(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{builtin_ahlfors, builtin_log, builtin_power, induced_growth};
    use approx::assert_relative_eq;
    use std::f64::consts::{E, LN_2, PI};

    fn unweighted(n: u32) -> RadialMeasure {
        RadialMeasure::unweighted(n).unwrap()
    }

    #[test]
    fn integral_estimate_examples() {
        let g3 = induced_growth(&unweighted(3)).unwrap();
        let c = integral_estimate(&g3, &CapacityQuery::new(2.0, 1.0, 2.0).unwrap()).unwrap();
        assert_relative_eq!(c.value, 8.0 * PI / 3.0, max_relative = 1e-9);
        assert!(c.hypothesis_ok);

        let q2 = builtin_ahlfors(2.0).unwrap();
        let c = integral_estimate(&q2, &CapacityQuery::new(2.0, 1.0, E).unwrap()).unwrap();
        assert_relative_eq!(c.value, 1.0, max_relative = 1e-9);

        let pw = induced_growth(&builtin_power(3, 1.0).unwrap()).unwrap();
        let c = integral_estimate(&pw, &CapacityQuery::new(2.0, 0.5, 1.0).unwrap()).unwrap();
        assert_relative_eq!(c.value, 2.0 * PI / LN_2, max_relative = 1e-9);
    }

    #[test]
    fn integral_estimate_flags_close_radii() {
        let g3 = induced_growth(&unweighted(3)).unwrap();
        let c = integral_estimate(&g3, &CapacityQuery::new(2.0, 1.0, 1.5).unwrap()).unwrap();
        assert!(!c.hypothesis_ok);
        assert!(c.value > 0.0);
    }

    #[test]
    fn exact_radial_examples() {
        let c = exact_radial(&unweighted(3), &CapacityQuery::new(2.0, 1.0, 2.0).unwrap()).unwrap();
        assert_relative_eq!(c.value, 8.0 * PI, max_relative = 1e-10);
        let c = exact_radial(&unweighted(2), &CapacityQuery::new(2.0, 1.0, E).unwrap()).unwrap();
        assert_relative_eq!(c.value, 2.0 * PI, max_relative = 1e-10);
        // n = p = 4: ω₃ (log(R/r))^{-3}
        let c = exact_radial(&unweighted(4), &CapacityQuery::new(4.0, 0.3, 5.0).unwrap()).unwrap();
        let expect = 2.0 * PI * PI * (5.0f64 / 0.3).ln().powi(-3);
        assert_relative_eq!(c.value, expect, max_relative = 1e-10);
    }

    #[test]
    fn exact_radial_planar_p3() {
        // (∫_1^2 (2πρ)^{-1/2} dρ)^{-2} with antiderivative 2√ρ/√(2π)
        let inner = 2.0 * (2.0f64.sqrt() - 1.0) / (2.0 * PI).sqrt();
        let c = exact_radial(&unweighted(2), &CapacityQuery::new(3.0, 1.0, 2.0).unwrap()).unwrap();
        assert_relative_eq!(c.value, inner.powi(-2), max_relative = 1e-10);
    }

    #[test]
    fn dyadic_examples() {
        let q2 = builtin_ahlfors(2.0).unwrap();
        let c = dyadic_upper(&q2, &CapacityQuery::new(2.0, 1.0, 4.0).unwrap()).unwrap();
        assert_relative_eq!(c.value, 0.5, max_relative = 1e-14);

        let g3 = induced_growth(&unweighted(3)).unwrap();
        let c = dyadic_upper(&g3, &CapacityQuery::new(2.0, 1.0, 2.0).unwrap()).unwrap();
        assert_relative_eq!(c.value, 8.0 * PI / 3.0, max_relative = 1e-13);

        let pw = induced_growth(&builtin_power(3, 1.0).unwrap()).unwrap();
        let c = dyadic_upper(&pw, &CapacityQuery::new(2.0, 1.0, 8.0).unwrap()).unwrap();
        assert_relative_eq!(c.value, 2.0 * PI / 3.0, max_relative = 1e-13);

        assert!(dyadic_upper(&pw, &CapacityQuery::new(2.0, 1.0, 1.9).unwrap()).is_err());
    }

    #[test]
    fn interpolation_examples() {
        // f = ρ³, q = 2, t = 2.5, p = 3 on [1, 2]: α = 1/2,
        // est_3 = (ln 2)^{-2}, ∫ρ^{-2} = 1/2, so value = (ln 2)^{-1} · 2^{1/2}.
        let q3 = builtin_ahlfors(3.0).unwrap();
        let c = interpolation_lower(&q3, 3.0, 2.0, 2.5, 1.0, 2.0).unwrap();
        assert_relative_eq!(c.value, 2.0f64.sqrt() / LN_2, max_relative = 1e-9);
        assert!(c.hypothesis_ok);

        let g = induced_growth(&builtin_log(3, 3.0, 1.0).unwrap()).unwrap();
        let (r, big_r) = (1e-4, 1e-2);
        let est = |p| integral_estimate(&g, &CapacityQuery::new(p, r, big_r).unwrap()).unwrap().value;
        let near_p = interpolation_lower(&g, 3.0, 2.0, 3.0 - 1e-9, r, big_r).unwrap().value;
        assert_relative_eq!(near_p, est(3.0), max_relative = 1e-6);
        let near_q = interpolation_lower(&g, 3.0, 2.0, 2.0 + 1e-9, r, big_r).unwrap().value;
        assert_relative_eq!(near_q, est(2.0), max_relative = 1e-6);

        assert!(interpolation_lower(&q3, 3.0, 2.5, 2.0, 1.0, 2.0).is_err());
        assert!(interpolation_lower(&q3, 3.0, 1.0, 2.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn newtonian_capacity_random_radii() {
        let m = unweighted(3);
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let a = 0.01 * 1000f64.powf(next());
            let b = 0.01 * 1000f64.powf(next());
            let (r, big_r) = if a < b { (a, b) } else { (b, a) };
            let c = exact_radial(&m, &CapacityQuery::new(2.0, r, big_r).unwrap()).unwrap();
            assert_relative_eq!(c.value, 4.0 * PI * r * big_r / (big_r - r), max_relative = 1e-8);
        }
    }

    #[test]
    fn query_validation() {
        assert!(CapacityQuery::new(1.0, 1.0, 2.0).is_err());
        assert!(CapacityQuery::new(2.0, 2.0, 2.0).is_err());
        assert!(CapacityQuery::new(2.0, 0.0, 2.0).is_err());
    }
}
