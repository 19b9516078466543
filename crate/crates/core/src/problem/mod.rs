//! The nonlinearity `f`, the potential `V`, and sampled validators for the
//! structural hypotheses the theory places on them.
//!
//! Hypotheses on `f` (with `F(ξ) = ∫_0^ξ f`):
//!
//! * (f0) `f(ξ) ≥ 0` for `ξ ≥ 0` and `f(ξ) = 0` for `ξ ≤ 0`;
//! * (f1) `ξ ↦ f(ξ)/ξ` strictly increasing on `ξ > 0` and tending to 0 at 0⁺;
//! * (f2) some `θ > 2` with `0 < θF(ξ) ≤ ξf(ξ)` (checked on `ξ > 0` only,
//!   since (f0) forces `F = 0` on the negative axis);
//! * (f3) `f(ξ)/ξ^{p0} → 0` for some `p0 + 1 > θ`.
//!
//! Hypotheses on `V`:
//!
//! * (V1) `V ≥ V0 > 0`;
//! * (V2) `liminf V ≥ V∞`, (V3) `liminf V = V∞`, proxied by the outer tenth of
//!   the grid;
//! * (V4) `V ≤ V∞` and not identically equal;
//! * (V5) `V` even and nondecreasing in `|t|`.
//!
//! All checks are sampled. They validate inputs, they do not prove anything.

mod expr;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use expr::Expr;

use crate::spectral::{FractionalOrder, Grid};
use crate::{Error, Result};

/// The named structural hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Hypothesis {
    F0,
    F1,
    F2,
    F3,
    V1,
    V2,
    V3,
    V4,
    V5,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::F0 => "(f0)",
            Self::F1 => "(f1)",
            Self::F2 => "(f2)",
            Self::F3 => "(f3)",
            Self::V1 => "(V1)",
            Self::V2 => "(V2)",
            Self::V3 => "(V3)",
            Self::V4 => "(V4)",
            Self::V5 => "(V5)",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    /// Not applicable, e.g. a flag-dependent hypothesis with the flag unset.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    fn push(&mut self, hypothesis: Hypothesis, status: CheckStatus) {
        self.checks.push(HypothesisCheck { hypothesis, status });
    }

    pub fn status(&self, h: Hypothesis) -> Option<&CheckStatus> {
        self.checks.iter().find(|c| c.hypothesis == h).map(|c| &c.status)
    }

    pub fn passed(&self, h: Hypothesis) -> bool {
        matches!(self.status(h), Some(CheckStatus::Pass))
    }

    pub fn first_failure(&self) -> Option<(Hypothesis, &str)> {
        self.checks.iter().find_map(|c| match &c.status {
            CheckStatus::Fail(msg) => Some((c.hypothesis, msg.as_str())),
            _ => None,
        })
    }

    pub fn is_ok(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            Some((hypothesis, detail)) => Err(Error::Hypothesis {
                hypothesis,
                detail: detail.to_string(),
            }),
            None => Ok(self),
        }
    }
}

// ---------------------------------------------------------------------------
// Nonlinearity
// ---------------------------------------------------------------------------

/// Tabulated `f` on `ξ ≥ 0` with derivative values, interpolated by cubic
/// Hermite segments. Beyond the last node `f` continues as the power law
/// matching value and slope there.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    xi: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
    // F at each node, by Gauss-Legendre quadrature of the interpolant.
    big_f: Vec<f64>,
    tail_exponent: f64,
}

const GL3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

impl Table {
    pub fn new(xi: Vec<f64>, f: Vec<f64>, df: Vec<f64>) -> Result<Self> {
        let n = xi.len();
        if n < 2 || f.len() != n || df.len() != n {
            return Err(Error::Config(
                "table needs at least two nodes and equal-length xi, f, df".into(),
            ));
        }
        if xi[0] != 0.0 {
            return Err(Error::Config("table must start at xi = 0".into()));
        }
        if xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("table nodes must be strictly increasing".into()));
        }
        if xi.iter().chain(&f).chain(&df).any(|v| !v.is_finite()) {
            return Err(Error::Config("table entries must be finite".into()));
        }
        let (last_x, last_f, last_df) = (xi[n - 1], f[n - 1], df[n - 1]);
        if last_f <= 0.0 {
            return Err(Error::Config("table must end with f > 0".into()));
        }
        let tail_exponent = last_x * last_df / last_f;
        let mut t = Self {
            xi,
            f,
            df,
            big_f: vec![0.0; n],
            tail_exponent,
        };
        for i in 1..n {
            let seg = t.segment_integral(i - 1, t.xi[i]);
            t.big_f[i] = t.big_f[i - 1] + seg;
        }
        Ok(t)
    }

    fn hermite(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xi[i], self.xi[i + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.f[i] + h10 * h * self.df[i] + h01 * self.f[i + 1] + h11 * h * self.df[i + 1]
    }

    fn hermite_derivative(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xi[i], self.xi[i + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        d00 * self.f[i] + d10 * self.df[i] + d01 * self.f[i + 1] + d11 * self.df[i + 1]
    }

    /// `∫_{xi[i]}^{x} f` for `x` inside segment `i`.
    fn segment_integral(&self, i: usize, x: f64) -> f64 {
        let a = self.xi[i];
        let half = 0.5 * (x - a);
        let mid = 0.5 * (x + a);
        GL3_NODES
            .iter()
            .zip(GL3_WEIGHTS)
            .map(|(&s, w)| w * self.hermite(i, mid + half * s))
            .sum::<f64>()
            * half
    }

    fn segment(&self, x: f64) -> usize {
        match self.xi.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xi.len() - 2),
            Err(i) => i - 1,
        }
    }

    fn last(&self) -> (f64, f64, f64) {
        let n = self.xi.len() - 1;
        (self.xi[n], self.f[n], self.big_f[n])
    }

    fn value(&self, x: f64) -> f64 {
        let (xn, fnode, _) = self.last();
        if x >= xn {
            return fnode * (x / xn).powf(self.tail_exponent);
        }
        self.hermite(self.segment(x), x)
    }

    fn derivative(&self, x: f64) -> f64 {
        let (xn, fnode, _) = self.last();
        if x >= xn {
            return fnode * self.tail_exponent / xn * (x / xn).powf(self.tail_exponent - 1.0);
        }
        self.hermite_derivative(self.segment(x), x)
    }

    fn primitive(&self, x: f64) -> f64 {
        let (xn, fnode, big_fn) = self.last();
        if x >= xn {
            let q = self.tail_exponent;
            return big_fn + fnode * xn / (q + 1.0) * ((x / xn).powf(q + 1.0) - 1.0);
        }
        let i = self.segment(x);
        self.big_f[i] + self.segment_integral(i, x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NonlinearityKind {
    /// `f(ξ) = ξ₊^p`.
    Power {
        p: f64,
    },
    Tabulated(Table),
}

/// The nonlinearity `f` with its superquadraticity exponent `θ` and growth
/// exponent `p0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    theta: f64,
    p0: f64,
}

impl Nonlinearity {
    /// `f(ξ) = ξ₊^p` with `θ = p + 1`.
    pub fn power(p: f64, p0: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Config(format!("power exponent must be positive, got {p}")));
        }
        if !p0.is_finite() {
            return Err(Error::Config(format!("p0 must be finite, got {p0}")));
        }
        Ok(Self {
            kind: NonlinearityKind::Power { p },
            theta: p + 1.0,
            p0,
        })
    }

    pub fn tabulated(table: Table, theta: f64, p0: f64) -> Result<Self> {
        if !(theta.is_finite() && p0.is_finite()) {
            return Err(Error::Config("theta and p0 must be finite".into()));
        }
        Ok(Self {
            kind: NonlinearityKind::Tabulated(table),
            theta,
            p0,
        })
    }

    /// Overrides the declared `θ`.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Exponent `p` for the power family.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            NonlinearityKind::Power { p } => Some(p),
            NonlinearityKind::Tabulated(_) => None,
        }
    }

    #[inline]
    pub fn f(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            NonlinearityKind::Power { p } => pow_pos(xi, *p),
            NonlinearityKind::Tabulated(t) => t.value(xi),
        }
    }

    /// `F(ξ) = ∫_0^ξ f`.
    #[inline]
    pub fn primitive(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            NonlinearityKind::Power { p } => pow_pos(xi, p + 1.0) / (p + 1.0),
            NonlinearityKind::Tabulated(t) => t.primitive(xi),
        }
    }

    #[inline]
    pub fn derivative(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            NonlinearityKind::Power { p } => p * pow_pos(xi, p - 1.0),
            NonlinearityKind::Tabulated(t) => t.derivative(xi),
        }
    }
}

#[inline]
fn pow_pos(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// Log-spaced sample of `n` points on `[1e-6, 1e3]`.
pub fn log_sample(n: usize) -> Vec<f64> {
    let (lo, hi) = (1e-6f64.ln(), 1e3f64.ln());
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

// Local log-slope thresholds used as sampled proxies for limits.
const VANISHING_SLOPE: f64 = 1e-3;
const RATIO_FLOOR: f64 = 1e-12;
// Power laws sit exactly on the (f2) boundary; tabulated ones reach it only
// up to interpolation and quadrature roundoff.
const F2_REL_TOL: f64 = 1e-9;

/// Checks (f0)-(f3) on a log-spaced sample of `ξ ∈ [1e-6, 1e3]`.
pub fn validate_nonlinearity(f: &Nonlinearity, sample_count: usize) -> Result<ValidationReport> {
    if sample_count < 100 {
        return Err(Error::Config(format!(
            "sample_count must be at least 100, got {sample_count}"
        )));
    }
    let xs = log_sample(sample_count);
    let mut report = ValidationReport::default();

    // (f0)
    let f0 = if f.f(0.0) != 0.0 {
        CheckStatus::Fail("f(0) != 0".into())
    } else if let Some(&x) = xs.iter().find(|&&x| !(f.f(x) >= 0.0)) {
        CheckStatus::Fail(format!("f({x:e}) = {} < 0", f.f(x)))
    } else if let Some(&x) = xs.iter().find(|&&x| f.f(-x) != 0.0) {
        CheckStatus::Fail(format!("f({:e}) = {} != 0", -x, f.f(-x)))
    } else {
        CheckStatus::Pass
    };
    report.push(Hypothesis::F0, f0);

    // (f1)
    let ratios: Vec<f64> = xs.iter().map(|&x| f.f(x) / x).collect();
    let f1 = if let Some(i) = (1..xs.len()).find(|&i| !(ratios[i] > ratios[i - 1])) {
        CheckStatus::Fail(format!(
            "f(ξ)/ξ not strictly increasing at ξ = {:e} ({} -> {})",
            xs[i],
            ratios[i - 1],
            ratios[i]
        ))
    } else {
        let slope = (ratios[1] / ratios[0]).ln() / (xs[1] / xs[0]).ln();
        if ratios[0] <= RATIO_FLOOR || slope >= VANISHING_SLOPE {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(format!(
                "f(ξ)/ξ = {} at ξ = {:e} does not tend to 0 (log-slope {slope:e})",
                ratios[0], xs[0]
            ))
        }
    };
    report.push(Hypothesis::F1, f1);

    // (f2)
    let theta = f.theta();
    let f2 = if !(theta > 2.0) {
        CheckStatus::Fail(format!("θ = {theta} is not > 2"))
    } else if let Some(&x) = xs.iter().find(|&&x| {
        let big = theta * f.primitive(x);
        let rhs = x * f.f(x);
        !(big > 0.0 && big <= rhs * (1.0 + F2_REL_TOL))
    }) {
        CheckStatus::Fail(format!(
            "θF(ξ) = {} vs ξf(ξ) = {} at ξ = {x:e}",
            theta * f.primitive(x),
            x * f.f(x)
        ))
    } else {
        CheckStatus::Pass
    };
    report.push(Hypothesis::F2, f2);

    // (f3)
    let p0 = f.p0();
    let f3 = if !(p0 + 1.0 > theta) {
        CheckStatus::Fail(format!("p0 + 1 = {} is not > θ = {theta}", p0 + 1.0))
    } else {
        let slope = growth_slope(f, p0, &xs);
        if slope <= -VANISHING_SLOPE {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(format!("f(ξ)/ξ^p0 does not decay at large ξ (log-slope {slope:e})"))
        }
    };
    report.push(Hypothesis::F3, f3);

    Ok(report)
}

/// Log-slope of `f(ξ)/ξ^{p0}` over the last decade of the sample.
fn growth_slope(f: &Nonlinearity, p0: f64, xs: &[f64]) -> f64 {
    let hi = *xs.last().expect("nonempty sample");
    let lo = hi / 10.0;
    let r = |x: f64| f.f(x) / x.powf(p0);
    (r(hi) / r(lo)).ln() / 10f64.ln()
}

/// Result of [`growth_bound_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthBound {
    pub epsilon: f64,
    /// Smallest sampled `C_ε` with `|f(ξ)| ≤ ε|ξ| + C_ε|ξ|^{p0}`.
    pub c_epsilon: f64,
    /// Sample point attaining the constant (0 if the bound holds with `C_ε = 0`).
    pub argmax: f64,
}

/// Smallest sampled constant in the growth bound `|f| ≤ ε|ξ| + C_ε|ξ|^{p0}`,
/// after confirming the integrated bound
/// `|F| ≤ (ε/2)|ξ|² + C_ε/(p0+1)|ξ|^{p0+1}` on the same sample.
pub fn growth_bound_check(f: &Nonlinearity, epsilon: f64) -> Result<GrowthBound> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let p0 = f.p0();
    let xs = log_sample(1000);
    let slope = growth_slope(f, p0, &xs);
    if slope > VANISHING_SLOPE {
        return Err(Error::Hypothesis {
            hypothesis: Hypothesis::F3,
            detail: format!("f(ξ)/ξ^p0 grows without bound (log-slope {slope:e})"),
        });
    }
    let (mut c, mut argmax) = (0.0f64, 0.0);
    for &x in &xs {
        let r = (f.f(x).abs() - epsilon * x) / x.powf(p0);
        if r > c {
            c = r;
            argmax = x;
        }
    }
    if !c.is_finite() {
        return Err(Error::Hypothesis {
            hypothesis: Hypothesis::F3,
            detail: "growth constant is not finite".into(),
        });
    }
    for &x in &xs {
        let lhs = f.primitive(x).abs();
        let rhs = 0.5 * epsilon * x * x + c / (p0 + 1.0) * x.powf(p0 + 1.0);
        if lhs > rhs * (1.0 + 1e-12) {
            return Err(Error::Hypothesis {
                hypothesis: Hypothesis::F3,
                detail: format!("integrated growth bound fails at ξ = {x:e}: {lhs} > {rhs}"),
            });
        }
    }
    Ok(GrowthBound {
        epsilon,
        c_epsilon: c,
        argmax,
    })
}

// ---------------------------------------------------------------------------
// Potential
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PotentialFlags {
    /// Declares (V5): even and nondecreasing in `|t|`.
    pub radial_increasing: bool,
    /// Declares (V4): `V ≤ V∞`, strictly somewhere.
    pub below_v_inf: bool,
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The potential `V` with its floor `V0` and asymptotic constant `V∞`.
#[derive(Clone)]
pub struct Potential {
    eval: Evaluator,
    label: String,
    constant: Option<f64>,
    v0: f64,
    v_inf: f64,
    flags: PotentialFlags,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("v0", &self.v0)
            .field("v_inf", &self.v_inf)
            .field("flags", &self.flags)
            .finish()
    }
}

impl Potential {
    /// `V ≡ value`, with `V0 = V∞ = value` and the radial flag set.
    pub fn constant(value: f64) -> Self {
        Self {
            eval: Arc::new(move |_| value),
            label: format!("{value}"),
            constant: Some(value),
            v0: value,
            v_inf: value,
            flags: PotentialFlags {
                radial_increasing: true,
                below_v_inf: false,
            },
        }
    }

    pub fn from_fn(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v0: f64,
        v_inf: f64,
        flags: PotentialFlags,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            label: label.into(),
            constant: None,
            v0,
            v_inf,
            flags,
        }
    }

    pub fn from_expr(source: &str, v0: f64, v_inf: f64, flags: PotentialFlags) -> Result<Self> {
        let e = Expr::parse(source)?;
        Ok(Self::from_fn(source, move |t| e.eval(t), v0, v_inf, flags))
    }

    /// Piecewise-linear interpolation of `(t, V)` pairs, constant beyond the
    /// ends.
    pub fn from_table(t: Vec<f64>, v: Vec<f64>, v0: f64, v_inf: f64, flags: PotentialFlags) -> Result<Self> {
        if t.len() < 2 || t.len() != v.len() {
            return Err(Error::Config("potential table needs matching t and V arrays".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) || t.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::Config("potential table must be finite with increasing t".into()));
        }
        let label = format!("table[{}]", t.len());
        Ok(Self::from_fn(
            label,
            move |x| {
                if x <= t[0] {
                    return v[0];
                }
                let n = t.len();
                if x >= t[n - 1] {
                    return v[n - 1];
                }
                let i = t.partition_point(|&s| s <= x) - 1;
                let s = (x - t[i]) / (t[i + 1] - t[i]);
                v[i] + s * (v[i + 1] - v[i])
            },
            v0,
            v_inf,
            flags,
        ))
    }

    /// `V + ε` with floor and asymptote shifted alike.
    pub fn shifted(&self, eps: f64) -> Self {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |t| inner(t) + eps),
            label: format!("{} + {eps}", self.label),
            constant: self.constant.map(|c| c + eps),
            v0: self.v0 + eps,
            v_inf: self.v_inf + eps,
            flags: self.flags,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.points().map(|t| self.eval(t)).collect()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn v_inf(&self) -> f64 {
        self.v_inf
    }

    pub fn flags(&self) -> PotentialFlags {
        self.flags
    }

    pub fn with_flags(mut self, flags: PotentialFlags) -> Self {
        self.flags = flags;
        self
    }
}

/// Default tolerance (relative to `max(1, |V∞|)`) of the asymptotic proxy.
pub const ASYMPTOTIC_TOL: f64 = 1e-2;

/// [`validate_potential_with`] at [`ASYMPTOTIC_TOL`].
pub fn validate_potential(v: &Potential, grid: &Grid) -> ValidationReport {
    validate_potential_with(v, grid, ASYMPTOTIC_TOL)
}

/// Evaluates `V` on the grid and checks (V1)-(V5). (V2)/(V3) look at the
/// minimum over the outer 10% of the grid; (V4)/(V5) are checked only when the
/// corresponding flag is set.
pub fn validate_potential_with(v: &Potential, grid: &Grid, asymptotic_tol: f64) -> ValidationReport {
    let samples = v.sample(grid);
    let mut report = ValidationReport::default();

    let v1 = if !(v.v0() > 0.0) {
        CheckStatus::Fail(format!("floor V0 = {} is not positive", v.v0()))
    } else if let Some(j) = samples.iter().position(|&s| !(s >= v.v0())) {
        CheckStatus::Fail(format!("V({}) = {} below floor {}", grid.point(j), samples[j], v.v0()))
    } else {
        CheckStatus::Pass
    };
    report.push(Hypothesis::V1, v1);

    let tol = asymptotic_tol * v.v_inf().abs().max(1.0);
    let outer = 0.9 * grid.half_length();
    let outer_min = grid
        .points()
        .zip(&samples)
        .filter(|(t, _)| t.abs() >= outer)
        .map(|(_, &s)| s)
        .fold(f64::INFINITY, f64::min);
    let v2 = if outer_min >= v.v_inf() - tol {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail(format!(
            "min over |t| ≥ {outer} is {outer_min}, below V∞ = {}",
            v.v_inf()
        ))
    };
    let v3 = match &v2 {
        CheckStatus::Pass if outer_min <= v.v_inf() + tol => CheckStatus::Pass,
        CheckStatus::Pass => CheckStatus::Fail(format!(
            "min over |t| ≥ {outer} is {outer_min}, above V∞ = {}",
            v.v_inf()
        )),
        other => other.clone(),
    };
    report.push(Hypothesis::V2, v2);
    report.push(Hypothesis::V3, v3);

    let v4 = if v.flags().below_v_inf {
        let scale = v.v_inf().abs().max(1.0) * 1e-12;
        if let Some(j) = samples.iter().position(|&s| s > v.v_inf() + scale) {
            CheckStatus::Fail(format!(
                "V({}) = {} exceeds V∞ = {}",
                grid.point(j),
                samples[j],
                v.v_inf()
            ))
        } else if samples.iter().all(|&s| s >= v.v_inf() - scale) {
            CheckStatus::Fail("V is identically V∞ on the grid".into())
        } else {
            CheckStatus::Pass
        }
    } else {
        CheckStatus::Skipped
    };
    report.push(Hypothesis::V4, v4);

    let v5 = if v.flags().radial_increasing {
        radial_check(grid, &samples)
    } else {
        CheckStatus::Skipped
    };
    report.push(Hypothesis::V5, v5);
    report
}

fn radial_check(grid: &Grid, samples: &[f64]) -> CheckStatus {
    let c = grid.center_index();
    let n = grid.len();
    let tol = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(1.0);
    for k in 1..c {
        let (l, r) = (samples[c - k], samples[c + k]);
        if (l - r).abs() > tol(l, r) {
            return CheckStatus::Fail(format!("V(-{0}) = {l} but V({0}) = {r}", grid.point(c + k)));
        }
        let inner = samples[c + k - 1];
        if r < inner - tol(r, inner) {
            return CheckStatus::Fail(format!(
                "V decreases from {inner} to {r} at |t| = {}",
                grid.point(c + k)
            ));
        }
    }
    // x_0 = -L has no mirror image on the periodic grid.
    let (edge, inner) = (samples[0], samples[n - 1]);
    if edge < inner - tol(edge, inner) {
        return CheckStatus::Fail(format!("V decreases from {inner} to {edge} at |t| = L"));
    }
    CheckStatus::Pass
}

// ---------------------------------------------------------------------------
// Problem bundle
// ---------------------------------------------------------------------------

/// Everything the functional needs: order, grid, `f`, and `V` sampled on the
/// grid.
#[derive(Clone, Debug)]
pub struct Problem {
    alpha: FractionalOrder,
    grid: Grid,
    nonlinearity: Arc<Nonlinearity>,
    potential: Potential,
    v: Arc<[f64]>,
}

impl Problem {
    pub fn new(alpha: FractionalOrder, grid: Grid, nonlinearity: Nonlinearity, potential: Potential) -> Self {
        let v = potential.sample(&grid).into();
        Self {
            alpha,
            grid,
            nonlinearity: Arc::new(nonlinearity),
            potential,
            v,
        }
    }

    /// Runs both validators and fails on the first violated hypothesis.
    pub fn validate(&self, sample_count: usize) -> Result<()> {
        validate_nonlinearity(&self.nonlinearity, sample_count)?.into_result()?;
        validate_potential(&self.potential, &self.grid).into_result()?;
        Ok(())
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// `V` sampled on the grid.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn with_potential(&self, potential: Potential) -> Self {
        let v = potential.sample(&self.grid).into();
        Self {
            potential,
            v,
            ..self.clone()
        }
    }

    pub fn with_alpha(&self, alpha: FractionalOrder) -> Self {
        Self { alpha, ..self.clone() }
    }

    pub fn with_nonlinearity(&self, nonlinearity: Nonlinearity) -> Self {
        Self {
            nonlinearity: Arc::new(nonlinearity),
            ..self.clone()
        }
    }

    pub fn on_grid(&self, grid: Grid) -> Self {
        let v = self.potential.sample(&grid).into();
        Self {
            grid,
            v,
            ..self.clone()
        }
    }

    /// The limiting problem with `V` replaced by `V∞`.
    pub fn at_infinity(&self) -> Self {
        self.with_potential(Potential::constant(self.potential.v_inf()))
    }

    /// Whether `V ≡ V∞` on the grid.
    pub fn is_at_infinity(&self) -> bool {
        let vi = self.potential.v_inf();
        self.v.iter().all(|&s| s == vi)
    }
}
