//! Power-log asymptotic classes `ρ^c |log ρ|^d` and the single convergence
//! rule every borderline decision in the crate routes through.

use serde::{Deserialize, Serialize};

/// Relative tolerance under which two exponents count as equal.
pub const EXPONENT_EQ_TOL: f64 = 1e-12;

pub fn exponents_equal(x: f64, y: f64) -> bool {
    if x.is_infinite() || y.is_infinite() {
        return x == y;
    }
    (x - y).abs() <= EXPONENT_EQ_TOL * x.abs().max(y.abs()).max(1.0)
}

/// Shape `ρ^power · |log ρ|^log_power` near an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLog {
    pub power: f64,
    pub log_power: f64,
}

/// Outcome of the convergence rule, remembering whether the log factor
/// had to break the tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergence {
    pub converges: bool,
    /// True when the power sits exactly at the critical value and the
    /// verdict was decided by the logarithmic exponent.
    pub borderline: bool,
}

impl PowerLog {
    pub const fn new(power: f64, log_power: f64) -> Self {
        Self { power, log_power }
    }

    pub fn powf(self, e: f64) -> Self {
        Self::new(self.power * e, self.log_power * e)
    }

    /// `∫_0 ρ^c |log ρ|^d dρ` diverges iff `c < -1`, or `c = -1` and `d ≥ -1`.
    pub fn at_zero(self) -> Convergence {
        if exponents_equal(self.power, -1.0) {
            Convergence { converges: self.log_power < -1.0 && !exponents_equal(self.log_power, -1.0), borderline: true }
        } else {
            Convergence { converges: self.power > -1.0, borderline: false }
        }
    }

    /// `∫^∞ ρ^c (log ρ)^d dρ` diverges iff `c > -1`, or `c = -1` and `d ≥ -1`.
    pub fn at_infinity(self) -> Convergence {
        if exponents_equal(self.power, -1.0) {
            Convergence { converges: self.log_power < -1.0 && !exponents_equal(self.log_power, -1.0), borderline: true }
        } else {
            Convergence { converges: self.power < -1.0, borderline: false }
        }
    }
}

impl std::ops::Mul for PowerLog {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        Self::new(self.power + other.power, self.log_power + other.log_power)
    }
}

/// `Σ_k k^{-e}` converges iff `e > 1`. Equivalent to [`PowerLog::at_zero`]
/// for `ρ^{-1} |log ρ|^{-e}` under `ρ = 2^{-k}`.
pub fn series_converges(decay: f64) -> bool {
    PowerLog::new(-1.0, -decay).at_zero().converges
}
