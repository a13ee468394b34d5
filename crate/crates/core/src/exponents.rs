//! Pointwise exponent endpoints at `x₀` and the critical exponents derived
//! from them.

use serde::{Deserialize, Serialize};

use crate::asymptotics::exponents_equal;
use crate::error::{Error, Result};
use crate::measures::GrowthFunction;
use crate::serde_ext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentSource {
    Analytic,
    Empirical,
}

/// Endpoints of the lower/upper `S` and `Q` exponent sets at `x₀`.
///
/// Membership flags are `None` when they cannot be derived (empirical fits,
/// asymptotics outside the power-log class).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub ls0: f64,
    pub us0: f64,
    pub lq0: f64,
    pub uq0: f64,
    #[serde(rename = "us0_in_uS0")]
    pub us0_in_upper_s: Option<bool>,
    #[serde(rename = "us0_in_lS0")]
    pub us0_in_lower_s: Option<bool>,
    #[serde(rename = "lq0_in_lQ0")]
    pub lq0_in_lower_q: Option<bool>,
    pub source: ExponentSource,
}

impl ExponentReport {
    /// `lq0 ≤ ls0 ≤ us0 ≤ uq0`.
    pub fn chain_holds(&self) -> bool {
        self.lq0 <= self.ls0 && self.ls0 <= self.us0 && self.us0 <= self.uq0
    }

    /// `us0 ∈ uS₀ ∖ lS₀`, the case several nonintegrability results exclude.
    pub fn us0_only_upper(&self) -> Option<bool> {
        Some(self.us0_in_upper_s? && !self.us0_in_lower_s?)
    }
}

/// Exponents for `f ~ C ρ^a |log ρ|^b` at 0: every endpoint equals `a`,
/// `a ∈ uS₀` iff `b ≥ 0`, and `a ∈ lS₀` (and `lQ₀`) iff `b ≤ 0`.
pub fn analytic_exponents(g: &GrowthFunction) -> Result<ExponentReport> {
    let class = g.at_zero.ok_or_else(|| Error::UnsupportedAsymptotics("model has no asymptotic class at 0".into()))?;
    let (a, b) = (class.exponent_a, class.log_exponent_b);
    Ok(ExponentReport {
        ls0: a,
        us0: a,
        lq0: a,
        uq0: a,
        us0_in_upper_s: Some(b >= 0.0),
        us0_in_lower_s: Some(b <= 0.0),
        lq0_in_lower_q: Some(b <= 0.0),
        source: ExponentSource::Analytic,
    })
}

/// Least-squares slope of `ln f` against `ln ρ` on `k` log-spaced radii.
pub fn empirical_exponents(g: &GrowthFunction, r_lo: f64, r_hi: f64, k: usize) -> Result<ExponentReport> {
    if k < 8 {
        return Err(Error::invalid(format!("need at least 8 samples, got {k}")));
    }
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(Error::invalid(format!("need 0 < r_lo < r_hi, got {r_lo}, {r_hi}")));
    }
    if r_hi / r_lo < 4.0 {
        return Err(Error::invalid(format!("degenerate grid: r_hi/r_lo = {} < 4", r_hi / r_lo)));
    }
    if r_hi > g.anchor_radius * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("r_hi = {r_hi} exceeds the anchor radius {}", g.anchor_radius)));
    }
    let (x0, x1) = (r_lo.ln(), r_hi.ln());
    let mut xs = Vec::with_capacity(k);
    let mut ys = Vec::with_capacity(k);
    for i in 0..k {
        let x = x0 + (x1 - x0) * i as f64 / (k - 1) as f64;
        xs.push(x);
        ys.push(g.evaluate(x.exp())?.ln());
    }
    let slope = least_squares_slope(&xs, &ys);
    Ok(ExponentReport {
        ls0: slope,
        us0: slope,
        lq0: slope,
        uq0: slope,
        us0_in_upper_s: None,
        us0_in_lower_s: None,
        lq0_in_lower_q: None,
        source: ExponentSource::Empirical,
    })
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Critical integrability exponents at a given `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponents {
    pub p: f64,
    /// `us0(p-1)/(us0-p)`; `inf` at `p = us0`; absent for `p > us0`
    /// (the Green function is then bounded).
    #[serde(with = "serde_ext::extended_opt")]
    pub tau_p: Option<f64>,
    pub t_p: f64,
    pub q_hat: f64,
}

pub fn critical_exponents(rep: &ExponentReport, p: f64) -> Result<CriticalExponents> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("p must lie in (1, ∞), got {p}")));
    }
    let us0 = rep.us0;
    let tau_p = if exponents_equal(p, us0) {
        Some(f64::INFINITY)
    } else if p < us0 {
        Some(us0 * (p - 1.0) / (us0 - p))
    } else {
        None
    };
    Ok(CriticalExponents { p, tau_p, t_p: us0 * (p - 1.0) / (us0 - 1.0), q_hat: rep.lq0 + 1.0 - rep.lq0 / us0 })
}

/// Thresholds for general superharmonic functions from the global
/// exponent `utheta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum SuperharmonicThresholds {
    /// `u ∈ L^τ_loc` for `τ < tau_bound` and `G_u ∈ L^t_loc` for `t < t_bound`.
    Integrable {
        #[serde(with = "serde_ext::extended")]
        tau_bound: f64,
        t_bound: f64,
    },
    /// `p > utheta`: continuous, hence locally bounded.
    LocallyBounded,
}

pub fn superharmonic_thresholds(utheta: f64, p: f64) -> Result<SuperharmonicThresholds> {
    if !(utheta >= 1.0 && utheta.is_finite()) {
        return Err(Error::domain(format!("global exponent must be >= 1, got {utheta}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("p must lie in (1, ∞), got {p}")));
    }
    if exponents_equal(p, utheta) {
        return Ok(SuperharmonicThresholds::Integrable {
            tau_bound: f64::INFINITY,
            t_bound: utheta * (p - 1.0) / (utheta - 1.0),
        });
    }
    if p > utheta {
        return Ok(SuperharmonicThresholds::LocallyBounded);
    }
    Ok(SuperharmonicThresholds::Integrable {
        tau_bound: utheta * (p - 1.0) / (utheta - p),
        t_bound: utheta * (p - 1.0) / (utheta - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{builtin_ahlfors, builtin_log, builtin_power, induced_growth};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn report(lq0: f64, us0: f64) -> ExponentReport {
        ExponentReport {
            ls0: lq0,
            us0,
            lq0,
            uq0: us0,
            us0_in_upper_s: Some(true),
            us0_in_lower_s: Some(true),
            lq0_in_lower_q: Some(true),
            source: ExponentSource::Analytic,
        }
    }

    #[test]
    fn power_model_endpoints() {
        let g = induced_growth(&builtin_power(3, 1.0).unwrap()).unwrap();
        let r = analytic_exponents(&g).unwrap();
        assert_eq!((r.ls0, r.us0, r.lq0, r.uq0), (2.0, 2.0, 2.0, 2.0));
        assert_eq!((r.us0_in_upper_s, r.us0_in_lower_s), (Some(true), Some(true)));
    }

    #[test]
    fn log_model_endpoints() {
        let g = induced_growth(&builtin_log(3, 3.0, 1.0).unwrap()).unwrap();
        let r = analytic_exponents(&g).unwrap();
        assert_eq!(r.us0, 3.0);
        assert_eq!(r.us0_in_upper_s, Some(true));
        assert_eq!(r.us0_in_lower_s, Some(false));
        assert_eq!(r.us0_only_upper(), Some(true));
    }

    #[test]
    fn ahlfors_endpoints() {
        let r = analytic_exponents(&builtin_ahlfors(2.5).unwrap()).unwrap();
        assert_eq!(r.us0, 2.5);
        assert_eq!(r.us0_only_upper(), Some(false));
        assert!(r.chain_holds());
    }

    #[test]
    fn missing_class_is_unsupported() {
        let g = crate::measures::table_growth(&[[0.1, 1e-3], [0.2, 8e-3]], None, None, None).unwrap();
        assert!(matches!(analytic_exponents(&g), Err(Error::UnsupportedAsymptotics(_))));
    }

    #[test]
    fn empirical_slopes() {
        let q3 = builtin_ahlfors(3.0).unwrap();
        let r = empirical_exponents(&q3, 1e-6, 1e-2, 32).unwrap();
        assert_relative_eq!(r.us0, 3.0, epsilon = 1e-9);
        assert_eq!(r.source, ExponentSource::Empirical);
        assert!(r.us0_in_upper_s.is_none());

        let pw = induced_growth(&builtin_power(3, 1.0).unwrap()).unwrap();
        assert_relative_eq!(empirical_exponents(&pw, 1e-6, 1e-2, 32).unwrap().us0, 2.0, epsilon = 1e-9);

        // The |log ρ| factor shrinks as ρ grows, so it biases the slope
        // downward: d ln f / d ln ρ = 1/J(L) with J(L) > 1/s.
        let lg = induced_growth(&builtin_log(3, 3.0, 1.0).unwrap()).unwrap();
        let slope = empirical_exponents(&lg, 1e-8, 1e-3, 32).unwrap().us0;
        assert!(slope > 2.75 && slope < 3.0, "slope {slope}");
    }

    #[test]
    fn empirical_rejects_bad_grids() {
        let q3 = builtin_ahlfors(3.0).unwrap();
        assert!(empirical_exponents(&q3, 1e-3, 2e-3, 32).is_err());
        assert!(empirical_exponents(&q3, 1e-3, 1e-1, 4).is_err());
        assert!(empirical_exponents(&q3, 1e-3, 10.0, 16).is_err());
    }

    #[test]
    fn critical_values() {
        let c = critical_exponents(&report(3.0, 3.0), 2.0).unwrap();
        assert_eq!(c.tau_p, Some(3.0));
        assert_eq!(c.t_p, 1.5);
        let c = critical_exponents(&report(3.0, 3.0), 3.0).unwrap();
        assert_eq!(c.tau_p, Some(f64::INFINITY));
        assert_eq!(c.t_p, 3.0);
        assert_eq!(c.q_hat, 3.0);
        assert_eq!(critical_exponents(&report(2.0, 2.0), 2.5).unwrap().tau_p, None);
        assert!(critical_exponents(&report(2.0, 2.0), 1.0).is_err());
    }

    #[test]
    fn t_p_below_lq0_iff_p_below_q_hat_at_sample_points() {
        let rep = report(3.0, 3.0);
        for (p, expect) in [(2.9, true), (3.0, false)] {
            let c = critical_exponents(&rep, p).unwrap();
            assert_eq!(c.t_p < rep.lq0, expect);
            assert_eq!(p < c.q_hat, expect);
        }
    }

    #[test]
    fn superharmonic_examples() {
        assert_eq!(
            superharmonic_thresholds(3.0, 2.0).unwrap(),
            SuperharmonicThresholds::Integrable { tau_bound: 3.0, t_bound: 1.5 }
        );
        assert_eq!(
            superharmonic_thresholds(2.0, 2.0).unwrap(),
            SuperharmonicThresholds::Integrable { tau_bound: f64::INFINITY, t_bound: 2.0 }
        );
        assert_eq!(superharmonic_thresholds(2.0, 3.0).unwrap(), SuperharmonicThresholds::LocallyBounded);
        assert!(superharmonic_thresholds(0.5, 2.0).is_err());
    }

    #[test]
    fn infinite_tau_serializes_as_inf() {
        let c = critical_exponents(&report(3.0, 3.0), 3.0).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"tau_p\":\"inf\""), "{json}");
        let back: CriticalExponents = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #[test]
        fn t_p_below_tau_p(us0 in 1.05f64..8.0, frac in 0.01f64..0.99) {
            let p = 1.0 + frac * (us0 - 1.0);
            let c = critical_exponents(&report(us0, us0), p).unwrap();
            let tau = c.tau_p.unwrap();
            prop_assert!(c.t_p < tau);
            prop_assert!((c.t_p - p * tau / (tau + 1.0)).abs() <= 1e-9 * c.t_p.max(1.0));
        }

        #[test]
        fn t_p_at_least_one_iff_p_large(us0 in 1.05f64..8.0, p in 1.001f64..8.0) {
            let c = critical_exponents(&report(us0, us0), p).unwrap();
            let threshold = 2.0 - 1.0 / us0;
            prop_assume!((p - threshold).abs() > 1e-9);
            prop_assert_eq!(c.t_p >= 1.0, p >= threshold);
        }

        #[test]
        fn t_p_below_lq0_iff_p_below_q_hat(us0 in 1.05f64..8.0, lq_frac in 0.2f64..1.0, p in 1.001f64..8.0) {
            let lq0 = 1.0 + lq_frac * (us0 - 1.0);
            let c = critical_exponents(&report(lq0, us0), p).unwrap();
            prop_assume!((p - c.q_hat).abs() > 1e-9);
            prop_assert_eq!(c.t_p < lq0, p < c.q_hat);
        }

        #[test]
        fn analytic_chain(a in 0.1f64..10.0, b in -3.0f64..3.0) {
            let g = crate::measures::table_growth(
                &[[0.01, 1e-6], [0.1, 1e-3]],
                Some(crate::measures::AsymptoticClass::new(a, b, 1.0, crate::measures::Side::AtZero).unwrap()),
                None,
                None,
            ).unwrap();
            prop_assert!(analytic_exponents(&g).unwrap().chain_holds());
        }
    }
}
