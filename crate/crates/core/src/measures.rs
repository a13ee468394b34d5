//! Volume-growth models: abstract growth functions `ρ ↦ μ(B_ρ)` carrying
//! declared asymptotics, and radial weights `w(|x|) dx` on `ℝⁿ` that
//! induce them exactly.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::asymptotics::PowerLog;
use crate::error::{Error, Result};
use crate::quad;

const MASS_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    AtZero,
    AtInfinity,
}

/// `f(ρ) ~ C ρ^a |log ρ|^b` on one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticClass {
    pub exponent_a: f64,
    pub log_exponent_b: f64,
    pub constant_c: f64,
    pub side: Side,
}

impl AsymptoticClass {
    pub fn new(exponent_a: f64, log_exponent_b: f64, constant_c: f64, side: Side) -> Result<Self> {
        if !(constant_c > 0.0 && constant_c.is_finite()) {
            return Err(Error::domain(format!("asymptotic constant must be positive, got {constant_c}")));
        }
        if !(exponent_a.is_finite() && log_exponent_b.is_finite()) {
            return Err(Error::domain("asymptotic exponents must be finite"));
        }
        if side == Side::AtZero && exponent_a <= 0.0 {
            return Err(Error::domain(format!("a mass class at zero needs a > 0, got {exponent_a}")));
        }
        Ok(Self { exponent_a, log_exponent_b, constant_c, side })
    }

    pub fn shape(&self) -> PowerLog {
        PowerLog::new(self.exponent_a, self.log_exponent_b)
    }

    /// `C ρ^a |log ρ|^b`.
    pub fn evaluate(&self, rho: f64) -> f64 {
        let lg = rho.ln().abs();
        self.constant_c * rho.powf(self.exponent_a) * lg.powf(self.log_exponent_b)
    }
}

/// Surface area `ω_{n-1} = 2 π^{n/2} / Γ(n/2)` of the unit sphere in `ℝⁿ`.
pub fn sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// `Γ(n/2)` for a positive integer `n`.
fn gamma_half_integer(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        // Γ(k) = (k-1)!
        (1..n / 2).map(|i| i as f64).product()
    } else {
        // Γ(k + 1/2) = (k - 1/2)(k - 3/2)···(1/2)·√π
        let k = n / 2;
        (0..k).map(|i| i as f64 + 0.5).product::<f64>() * PI.sqrt()
    }
}

/// Radial weight profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    Unweighted,
    /// `w(ρ) = ρ^{-α}`.
    Power {
        alpha: f64,
    },
    /// `w(ρ) = ρ^{s-n} |log ρ|^β` for `ρ ≤ 1/e`, `ρ^{s-n}` beyond.
    Log {
        s: f64,
        beta: f64,
    },
}

/// `dμ = w(|x|) dx` on `ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasure {
    pub n: u32,
    pub weight: Weight,
    pub omega: f64,
}

impl RadialMeasure {
    fn build(n: u32, weight: Weight) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {n}")));
        }
        Ok(Self { n, weight, omega: sphere_area(n) })
    }

    pub fn unweighted(n: u32) -> Result<Self> {
        Self::build(n, Weight::Unweighted)
    }

    pub fn power(n: u32, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < n as f64) {
            return Err(Error::domain(format!("power weight needs 0 < alpha < n = {n}, got {alpha}")));
        }
        Self::build(n, Weight::Power { alpha })
    }

    pub fn log(n: u32, s: f64, beta: f64) -> Result<Self> {
        if !(s > 1.0 && s.is_finite()) {
            return Err(Error::domain(format!("log weight needs s > 1, got {s}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!("log weight needs beta > 0, got {beta}")));
        }
        Self::build(n, Weight::Log { s, beta })
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// `ln w(ρ)` given `ln ρ`; exact for radii far below `f64` range.
    pub fn ln_weight(&self, ln_rho: f64) -> f64 {
        match self.weight {
            Weight::Unweighted => 0.0,
            Weight::Power { alpha } => -alpha * ln_rho,
            Weight::Log { s, beta } => {
                let base = (s - self.dim()) * ln_rho;
                if ln_rho <= -1.0 {
                    base + beta * (-ln_rho).ln()
                } else {
                    base
                }
            }
        }
    }

    pub fn weight(&self, rho: f64) -> f64 {
        self.ln_weight(rho.ln()).exp()
    }

    /// `ln(w(ρ) ρ^{n-1})`, the radial line density without `ω_{n-1}`.
    pub fn ln_line_density(&self, ln_rho: f64) -> f64 {
        self.ln_weight(ln_rho) + (self.dim() - 1.0) * ln_rho
    }

    /// `f'(ρ) = ω_{n-1} w(ρ) ρ^{n-1}`.
    pub fn density(&self, rho: f64) -> f64 {
        self.omega * self.ln_line_density(rho.ln()).exp()
    }

    /// Asymptotic class of `w` itself.
    pub fn weight_class(&self, side: Side) -> AsymptoticClass {
        let (a, b) = match (self.weight, side) {
            (Weight::Unweighted, _) => (0.0, 0.0),
            (Weight::Power { alpha }, _) => (-alpha, 0.0),
            (Weight::Log { s, beta }, Side::AtZero) => (s - self.dim(), beta),
            (Weight::Log { s, .. }, Side::AtInfinity) => (s - self.dim(), 0.0),
        };
        AsymptoticClass { exponent_a: a, log_exponent_b: b, constant_c: 1.0, side }
    }

    /// Shape of `w(ρ) ρ^{n-1}` near 0.
    pub fn line_density_shape(&self) -> PowerLog {
        let w = self.weight_class(Side::AtZero);
        PowerLog::new(w.exponent_a + self.dim() - 1.0, w.log_exponent_b)
    }

    /// `μ(B_ρ)` from the closed form (power weights) or the log-model
    /// representation `ω ρ^s L^β ∫_0^∞ e^{-sv}(1+v/L)^β dv`, `L = -ln ρ`.
    pub fn mass(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::domain(format!("radius must be positive, got {rho}")));
        }
        let n = self.dim();
        match self.weight {
            Weight::Unweighted => Ok(self.omega * rho.powf(n) / n),
            Weight::Power { alpha } => Ok(self.omega * rho.powf(n - alpha) / (n - alpha)),
            Weight::Log { s, beta } => {
                if rho <= 1.0 / E {
                    let l = -rho.ln();
                    let j = log_model_tail_factor(s, beta, l)?;
                    Ok(self.omega * rho.powf(s) * l.powf(beta) * j)
                } else {
                    let at_break = self.omega * (-s).exp() * log_model_tail_factor(s, beta, 1.0)?;
                    Ok(at_break + self.omega * (rho.powf(s) - (-s).exp()) / s)
                }
            }
        }
    }

    /// `μ(B_ρ)` by direct quadrature of `ω ∫_0^ρ w(t) t^{n-1} dt`, treating
    /// 0 as an open endpoint via `t = e^{-u}`.
    pub fn mass_by_quadrature(&self, rho: f64, rel_tol: f64) -> Result<f64> {
        let shape = self.line_density_shape();
        if shape.power <= -1.0 {
            return Err(Error::Quadrature(format!("w(ρ)ρ^(n-1) is not integrable at 0 (power {})", shape.power)));
        }
        let l0 = -rho.ln();
        // ∫_{l0}^∞ exp(ln_line_density(-u) - u) du
        let scale = self.ln_line_density(-l0) - l0;
        let q = quad::integrate_semi_infinite(|u| (self.ln_line_density(-u) - u - scale).exp(), l0, rel_tol)?;
        Ok(self.omega * scale.exp() * q.value)
    }

    /// Declared class of the induced `f` on a side: with `w ~ ρ^{a_w}|log ρ|^{b_w}`,
    /// `f ~ ω ρ^{a_w+n} |log ρ|^{b_w} / (a_w + n)`.
    pub fn mass_class(&self, side: Side) -> Result<AsymptoticClass> {
        let w = self.weight_class(side);
        let a = w.exponent_a + self.dim();
        if a <= 0.0 {
            return Err(Error::Quadrature(format!("weight not integrable at 0 (a_w + n = {a})")));
        }
        AsymptoticClass::new(a, w.log_exponent_b, self.omega / a, side)
    }

    pub fn anchor_radius(&self) -> f64 {
        match self.weight {
            Weight::Log { .. } => 1.0 / E,
            _ => 1.0,
        }
    }

    /// Radii where `w` switches branch and is only continuous.
    pub fn kinks(&self) -> Vec<f64> {
        match self.weight {
            Weight::Log { .. } => vec![1.0 / E],
            _ => Vec::new(),
        }
    }
}

/// `∫_0^∞ e^{-s v} (1 + v/L)^β dv`, which tends to `1/s` as `L → ∞`.
fn log_model_tail_factor(s: f64, beta: f64, l: f64) -> Result<f64> {
    let q = quad::integrate_semi_infinite(|v| (-s * v + beta * (v / l).ln_1p()).exp(), 0.0, MASS_REL_TOL)?;
    Ok(q.value)
}

/// Tabulated growth function, interpolated linearly in log-log coordinates
/// and extrapolated with the slopes of the end segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableGrowth {
    ln_rho: Vec<f64>,
    ln_mass: Vec<f64>,
}

impl TableGrowth {
    pub fn new(points: &[[f64; 2]]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Spec("table needs at least two (rho, f) points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p[0] > 0.0 && p[1] > 0.0 && p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::Spec(format!("table point {i}: rho and f must be positive and finite")));
            }
            if i > 0 {
                let q = points[i - 1];
                if p[0] <= q[0] {
                    return Err(Error::Spec(format!("table point {i}: radii must strictly increase")));
                }
                if p[1] < q[1] {
                    return Err(Error::Spec(format!("table point {i}: f must be nondecreasing")));
                }
            }
        }
        Ok(Self {
            ln_rho: points.iter().map(|p| p[0].ln()).collect(),
            ln_mass: points.iter().map(|p| p[1].ln()).collect(),
        })
    }

    fn evaluate(&self, rho: f64) -> f64 {
        let x = rho.ln();
        let n = self.ln_rho.len();
        let i = match self.ln_rho.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.ln_rho[i], self.ln_rho[i + 1]);
        let (y0, y1) = (self.ln_mass[i], self.ln_mass[i + 1]);
        (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).exp()
    }

    pub fn last_radius(&self) -> f64 {
        self.ln_rho.last().copied().unwrap_or(0.0).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GrowthModel {
    /// `f(ρ) = ρ^Q`.
    Ahlfors {
        q: f64,
    },
    Radial(RadialMeasure),
    Table(TableGrowth),
}

/// `ρ ↦ μ(B_ρ)` with its declared asymptotics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFunction {
    pub model: GrowthModel,
    pub at_zero: Option<AsymptoticClass>,
    pub at_infinity: Option<AsymptoticClass>,
    /// Radius up to which `at_zero` is accurate within the band `[1/κ, κ]`.
    pub anchor_radius: f64,
    pub kappa: f64,
}

impl GrowthFunction {
    pub fn evaluate(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::domain(format!("radius must be positive, got {rho}")));
        }
        match &self.model {
            GrowthModel::Ahlfors { q } => Ok(rho.powf(*q)),
            GrowthModel::Radial(m) => m.mass(rho),
            GrowthModel::Table(t) => Ok(t.evaluate(rho)),
        }
    }

    pub fn radial(&self) -> Option<&RadialMeasure> {
        match &self.model {
            GrowthModel::Radial(m) => Some(m),
            _ => None,
        }
    }

    /// Whether borderline questions can be settled exactly from `at_zero`.
    pub fn is_symbolic(&self) -> bool {
        self.at_zero.is_some()
    }

    fn with_declared_kappa(mut self) -> Result<Self> {
        self.kappa = match self.at_zero {
            Some(class) => measure_kappa(&self, &class)?,
            None => 1.0,
        };
        Ok(self)
    }
}

/// Largest ratio `max(f/g, g/f)` between `f` and its class on a log grid
/// from `1e-12` to the anchor radius, padded by a relative `1e-9`.
fn measure_kappa(g: &GrowthFunction, class: &AsymptoticClass) -> Result<f64> {
    let lo = 1e-12f64.ln();
    let hi = g.anchor_radius.ln();
    let mut kappa: f64 = 1.0;
    let steps = 240;
    for i in 0..=steps {
        let rho = (lo + (hi - lo) * i as f64 / steps as f64).exp();
        let ratio = g.evaluate(rho)? / class.evaluate(rho);
        kappa = kappa.max(ratio).max(1.0 / ratio);
    }
    Ok(kappa * (1.0 + 1e-9))
}

/// `w(ρ) = ρ^{-α}` on `ℝⁿ`.
pub fn builtin_power(n: u32, alpha: f64) -> Result<RadialMeasure> {
    RadialMeasure::power(n, alpha)
}

/// The piecewise log weight with breakpoint `1/e`.
pub fn builtin_log(n: u32, s: f64, beta: f64) -> Result<RadialMeasure> {
    RadialMeasure::log(n, s, beta)
}

/// `f(ρ) = ρ^Q` with identical classes at 0 and ∞.
pub fn builtin_ahlfors(q: f64) -> Result<GrowthFunction> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::domain(format!("Ahlfors exponent must exceed 1, got {q}")));
    }
    Ok(GrowthFunction {
        model: GrowthModel::Ahlfors { q },
        at_zero: Some(AsymptoticClass::new(q, 0.0, 1.0, Side::AtZero)?),
        at_infinity: Some(AsymptoticClass::new(q, 0.0, 1.0, Side::AtInfinity)?),
        anchor_radius: 1.0,
        kappa: 1.0,
    })
}

/// Growth function `f(ρ) = μ(B_ρ)` induced by a radial measure.
pub fn induced_growth(m: &RadialMeasure) -> Result<GrowthFunction> {
    GrowthFunction {
        model: GrowthModel::Radial(*m),
        at_zero: Some(m.mass_class(Side::AtZero)?),
        at_infinity: Some(m.mass_class(Side::AtInfinity)?),
        anchor_radius: m.anchor_radius(),
        kappa: 1.0,
    }
    .with_declared_kappa()
}

/// Growth function backed by a table of `(ρ, f(ρ))` samples.
pub fn table_growth(
    points: &[[f64; 2]],
    at_zero: Option<AsymptoticClass>,
    at_infinity: Option<AsymptoticClass>,
    anchor_radius: Option<f64>,
) -> Result<GrowthFunction> {
    let table = TableGrowth::new(points)?;
    let anchor_radius = anchor_radius.unwrap_or_else(|| table.last_radius());
    if !(anchor_radius > 0.0) {
        return Err(Error::Spec("anchor_radius must be positive".into()));
    }
    GrowthFunction { model: GrowthModel::Table(table), at_zero, at_infinity, anchor_radius, kappa: 1.0 }
        .with_declared_kappa()
}

/// Maximum of `f(2ρ)/f(ρ)` over `ρ = r_min·2^k ≤ r_max`.
pub fn doubling_ratio_scan(g: &GrowthFunction, r_min: f64, r_max: f64) -> Result<f64> {
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(Error::invalid(format!("need 0 < r_min < r_max, got {r_min}, {r_max}")));
    }
    let mut rho = r_min;
    let mut worst: f64 = 0.0;
    while rho <= r_max * (1.0 + 1e-12) {
        worst = worst.max(g.evaluate(2.0 * rho)? / g.evaluate(rho)?);
        rho *= 2.0;
    }
    Ok(worst)
}

/// Hypotheses a caller asserts about the space at `x₀`; never computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssumptionProfile {
    /// Exponents `t` with a `t`-Poincaré inequality at `x₀` for small radii.
    #[serde(default)]
    pub poincare_at_x0: Vec<f64>,
    /// Exponents with a Poincaré inequality (plus doubling and
    /// reverse-doubling) at `x₀` for large radii.
    #[serde(default)]
    pub poincare_large_radii: Vec<f64>,
    #[serde(default = "default_lambda")]
    pub dilation_lambda: f64,
    #[serde(default = "default_xi")]
    pub reverse_doubling_xi: f64,
}

fn default_lambda() -> f64 {
    1.0
}

fn default_xi() -> f64 {
    2.0
}

impl Default for AssumptionProfile {
    fn default() -> Self {
        Self {
            poincare_at_x0: Vec::new(),
            poincare_large_radii: Vec::new(),
            dilation_lambda: default_lambda(),
            reverse_doubling_xi: default_xi(),
        }
    }
}

impl AssumptionProfile {
    pub fn with_poincare(exponents: &[f64]) -> Self {
        Self { poincare_at_x0: exponents.to_vec(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for &t in self.poincare_at_x0.iter().chain(&self.poincare_large_radii) {
            if !(t >= 1.0 && t.is_finite()) {
                return Err(Error::invalid(format!("Poincaré exponents must be finite and >= 1, got {t}")));
            }
        }
        if !(self.dilation_lambda > 0.0) {
            return Err(Error::invalid("dilation_lambda must be positive"));
        }
        if !(self.reverse_doubling_xi > 1.0) {
            return Err(Error::invalid("reverse_doubling_xi must exceed 1"));
        }
        Ok(())
    }

    /// A `t₀`-Poincaré inequality implies the `t`-version for every `t ≥ t₀`.
    pub fn poincare_witness(&self, t: f64) -> Option<f64> {
        smallest_at_most(&self.poincare_at_x0, t, false)
    }

    /// Declared exponent `1 ≤ t₀ < t`, if any.
    pub fn poincare_witness_below(&self, t: f64) -> Option<f64> {
        smallest_at_most(&self.poincare_at_x0, t, true)
    }

    pub fn large_radii_witness_below(&self, t: f64) -> Option<f64> {
        smallest_at_most(&self.poincare_large_radii, t, true)
    }
}

fn smallest_at_most(set: &[f64], t: f64, strict: bool) -> Option<f64> {
    set.iter().copied().filter(|&t0| if strict { t0 < t } else { t0 <= t }).min_by(f64::total_cmp)
}

/// Asymptotic class as written in a model spec file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default = "one")]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

/// Model spec file contents, discriminated by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Lebesgue {
        n: u32,
    },
    Power {
        n: u32,
        alpha: f64,
    },
    Log {
        n: u32,
        s: f64,
        beta: f64,
    },
    Ahlfors {
        #[serde(alias = "Q")]
        q: f64,
    },
    Table {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        at_zero: Option<ClassSpec>,
        #[serde(default)]
        at_infinity: Option<ClassSpec>,
        #[serde(default)]
        anchor_radius: Option<f64>,
    },
}

/// A built model: radial measures keep their weight so exact routes apply.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub growth: GrowthFunction,
    pub radial: Option<RadialMeasure>,
}

impl Model {
    pub fn from_radial(m: RadialMeasure) -> Result<Self> {
        Ok(Self { growth: induced_growth(&m)?, radial: Some(m) })
    }

    pub fn from_growth(growth: GrowthFunction) -> Self {
        let radial = growth.radial().copied();
        Self { growth, radial }
    }
}

impl ModelSpec {
    /// Parses JSON, reporting serde's line/column on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<Model> {
        match self {
            ModelSpec::Lebesgue { n } => Model::from_radial(RadialMeasure::unweighted(*n)?),
            ModelSpec::Power { n, alpha } => Model::from_radial(builtin_power(*n, *alpha)?),
            ModelSpec::Log { n, s, beta } => Model::from_radial(builtin_log(*n, *s, *beta)?),
            ModelSpec::Ahlfors { q } => Ok(Model::from_growth(builtin_ahlfors(*q)?)),
            ModelSpec::Table { points, at_zero, at_infinity, anchor_radius } => {
                let class = |c: &ClassSpec, side| AsymptoticClass::new(c.a, c.b, c.c, side);
                let zero = at_zero.as_ref().map(|c| class(c, Side::AtZero)).transpose()?;
                let inf = at_infinity.as_ref().map(|c| class(c, Side::AtInfinity)).transpose()?;
                Ok(Model::from_growth(table_growth(points, zero, inf, *anchor_radius)?))
            }
        }
    }
}
