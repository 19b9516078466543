//! Fibering maps `ψ(σ) = I(σu)`, the Nehari projection and the ground-state
//! level `c = inf_𝒩 I` together with its comparison properties.
//!
//! Along a ray `σ ↦ σu` the functional reads `ψ(σ) = ½σ²‖u‖²_X - ∫F(σu)`, and
//! `ψ'(σ) = 0` is equivalent to the mismatch
//!
//! ```text
//!   m(σ) = ‖u‖²_X - (1/σ) ∫ f(σu) u
//! ```
//!
//! vanishing. When `f(ξ)/ξ` is strictly increasing, `m` is strictly
//! decreasing, so the root `σ_u` is unique and `σ_u u` maximises `ψ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::problem::{Potential, Problem};
use crate::solver::{self, SolverConfig};
use crate::spaces::norm_x_sq;
use crate::spectral::Field;
use crate::{Error, Result};

/// Absolute tolerance on levels when comparing them.
pub const LEVEL_TOL: f64 = 1e-6;

/// Relative tolerance `|m(σ)| ≤ MISMATCH_TOL · ‖u‖²_X` of the projection.
pub const MISMATCH_TOL: f64 = 1e-12;

const MAX_BRACKET_STEPS: usize = 200;
const MAX_ROOT_STEPS: usize = 200;

/// `ψ` and `m` along the ray through a fixed field.
pub struct FiberingMap<'a> {
    u: &'a Field,
    prob: &'a Problem,
    norm_x_sq: f64,
}

impl<'a> FiberingMap<'a> {
    pub fn new(u: &'a Field, prob: &'a Problem) -> Self {
        Self {
            u,
            prob,
            norm_x_sq: norm_x_sq(u, prob.alpha(), prob.v()),
        }
    }

    pub fn norm_x_sq(&self) -> f64 {
        self.norm_x_sq
    }

    /// `ψ(σ) = I(σu)`.
    pub fn psi(&self, sigma: f64) -> f64 {
        let f = self.prob.nonlinearity();
        let nl: f64 = self.u.values().iter().map(|&x| f.primitive(sigma * x)).sum();
        0.5 * sigma * sigma * self.norm_x_sq - self.u.grid().dx() * nl
    }

    pub fn mismatch(&self, sigma: f64) -> f64 {
        let f = self.prob.nonlinearity();
        let s: f64 = self.u.values().iter().map(|&x| f.f(sigma * x) * x).sum();
        self.norm_x_sq - self.u.grid().dx() * s / sigma
    }

    fn mismatch_and_slope(&self, sigma: f64) -> (f64, f64) {
        let f = self.prob.nonlinearity();
        let (mut a, mut b) = (0.0, 0.0);
        for &x in self.u.values() {
            let y = sigma * x;
            if y > 0.0 {
                a += f.f(y) * x;
                b += f.derivative(y) * x * x;
            }
        }
        let dx = self.u.grid().dx();
        let m = self.norm_x_sq - dx * a / sigma;
        let dm = -dx * (b / sigma - a / (sigma * sigma));
        (m, dm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberingReport {
    pub sigma_u: f64,
    /// `ψ(σ_u) = I(σ_u u)`.
    pub psi_max: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `I'(σ_u u)(σ_u u)`.
    pub nehari_residual: f64,
    /// `‖u‖²_X` of the input field.
    pub norm_x_sq: f64,
}

impl FiberingReport {
    /// Applies the projection to `u`.
    pub fn project(&self, u: &Field) -> Field {
        u.scaled(self.sigma_u)
    }
}

/// Finds the unique `σ_u > 0` with `σ_u u ∈ 𝒩`.
///
/// Brackets by doubling or halving from `σ = 1` until `m` changes sign, then
/// runs Newton safeguarded by bisection until `|m| ≤ 1e-12‖u‖²_X`.
pub fn nehari_project(u: &Field, prob: &Problem) -> Result<FiberingReport> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    if !u.values().iter().any(|&x| x > 0.0) {
        return Err(Error::NoProjection);
    }
    let map = FiberingMap::new(u, prob);
    let tol = MISMATCH_TOL * map.norm_x_sq;

    let mut iterations = 0;
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let m1 = map.mismatch(1.0);
    if m1 > 0.0 {
        let mut m = m1;
        while m > 0.0 {
            lo = hi;
            hi *= 2.0;
            m = map.mismatch(hi);
            iterations += 1;
            if iterations > MAX_BRACKET_STEPS || !m.is_finite() {
                return Err(Error::Bracket(format!(
                    "mismatch still {m:e} at σ = {hi:e} (‖u‖²_X = {:e})",
                    map.norm_x_sq
                )));
            }
        }
    } else {
        let mut m = m1;
        while m <= 0.0 {
            hi = lo;
            lo *= 0.5;
            m = map.mismatch(lo);
            iterations += 1;
            if iterations > MAX_BRACKET_STEPS || !m.is_finite() {
                return Err(Error::Bracket(format!(
                    "mismatch still {m:e} at σ = {lo:e} (‖u‖²_X = {:e})",
                    map.norm_x_sq
                )));
            }
        }
    }
    let bracket = (lo, hi);

    let mut sigma = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..MAX_ROOT_STEPS {
        iterations += 1;
        let (m, dm) = map.mismatch_and_slope(sigma);
        if m.abs() <= tol {
            converged = true;
            break;
        }
        if m > 0.0 {
            lo = sigma;
        } else {
            hi = sigma;
        }
        let newton = sigma - m / dm;
        sigma = if dm < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            converged = map.mismatch(sigma).abs() <= tol;
            break;
        }
    }
    if !converged {
        let m = map.mismatch(sigma);
        // Round-off floor: accept when the bracket has collapsed.
        if !(hi - lo <= 4.0 * f64::EPSILON * hi && m.abs() <= 1e3 * tol) {
            return Err(Error::Bracket(format!(
                "root refinement stalled at σ = {sigma:e} with m = {m:e}"
            )));
        }
    }
    let m = map.mismatch(sigma);
    Ok(FiberingReport {
        sigma_u: sigma,
        psi_max: map.psi(sigma),
        bracket,
        iterations,
        nehari_residual: sigma * sigma * m,
        norm_x_sq: map.norm_x_sq,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LevelMethod {
    NehariMin,
}

#[derive(Clone, Debug)]
pub struct LevelEstimate {
    pub c: f64,
    pub minimizer: Field,
    pub method: LevelMethod,
    /// `|c_{2N} - c_N| / |c_N|`, when a refined run was requested.
    pub refinement_drift: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `c = inf_𝒩 I`, minimised by Nehari-projected descent from each start. The
/// best converged run wins; if none converged the best run is returned with
/// `converged = false`.
pub fn level_c(prob: &Problem, starts: &[Field], cfg: &SolverConfig, refine: bool) -> Result<LevelEstimate> {
    let mut best: Option<solver::Descent> = None;
    let mut last_err = None;
    for s in starts {
        match solver::descend(prob, s, cfg) {
            Ok(d) => {
                let better = match &best {
                    None => true,
                    Some(b) => (d.converged && !b.converged) || (d.converged == b.converged && d.c < b.c),
                };
                if better {
                    best = Some(d);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let best = match best {
        Some(b) => b,
        None => return Err(last_err.unwrap_or_else(|| Error::InadmissibleStart("no starts given".into()))),
    };
    let refinement_drift = if refine {
        let fine = prob.on_grid(prob.grid().refined());
        let seed = best.u.resample(fine.grid());
        let d = solver::descend(&fine, &seed, cfg)?;
        Some(((d.c - best.c) / best.c).abs())
    } else {
        None
    };
    Ok(LevelEstimate {
        c: best.c,
        minimizer: best.u,
        method: LevelMethod::NehariMin,
        refinement_drift,
        residual: best.residual,
        iterations: best.iterations,
        converged: best.converged,
    })
}

/// `c∞`, the level of the limit problem `V ≡ V∞`.
pub fn level_c_infinity(prob: &Problem, starts: &[Field], cfg: &SolverConfig, refine: bool) -> Result<LevelEstimate> {
    level_c(&prob.at_infinity(), starts, cfg, refine)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelComparison {
    pub c_a: f64,
    pub c_b: f64,
    /// `c_a ≥ c_b - LEVEL_TOL`.
    pub ordered: bool,
    pub converged: bool,
}

/// Levels of two potentials with `V_a ≥ V_b` pointwise; larger potential,
/// larger level.
pub fn compare_levels(v_a: &Potential, v_b: &Potential, prob: &Problem, cfg: &SolverConfig) -> Result<LevelComparison> {
    let (sa, sb) = (v_a.sample(prob.grid()), v_b.sample(prob.grid()));
    if let Some(j) = sa.iter().zip(&sb).position(|(a, b)| a < b) {
        return Err(Error::Precondition(format!(
            "V_a < V_b at t = {} ({} < {})",
            prob.grid().point(j),
            sa[j],
            sb[j]
        )));
    }
    let (pa, pb) = (prob.with_potential(v_a.clone()), prob.with_potential(v_b.clone()));
    let (ra, rb) = rayon::join(|| level_from_config(&pa, cfg), || level_from_config(&pb, cfg));
    let (ra, rb) = (ra?, rb?);
    Ok(LevelComparison {
        c_a: ra.c,
        c_b: rb.c,
        ordered: ra.c >= rb.c - LEVEL_TOL,
        converged: ra.converged && rb.converged,
    })
}

fn level_from_config(prob: &Problem, cfg: &SolverConfig) -> Result<LevelEstimate> {
    let start = solver::start_field(prob, cfg)?;
    level_c(prob, &[start], cfg, false)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub c: f64,
    pub iterations: usize,
    pub refinement_drift: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuitySweep {
    /// `c_V` of the unshifted potential.
    pub c_base: f64,
    /// One row per requested `ε`, in input order.
    pub rows: Vec<SweepRow>,
    /// Levels nondecreasing in `ε` (within [`LEVEL_TOL`]).
    pub monotone: bool,
    /// `|c_{V+ε} - c_V|` shrinking as `ε → 0`.
    pub converging: bool,
}

impl ContinuitySweep {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epsilon,c,iterations,refinement_drift\n");
        for r in &self.rows {
            let drift = r
                .refinement_drift
                .map_or_else(|| "nan".to_string(), |d| format!("{d:.16e}"));
            s.push_str(&format!("{:.16e},{:.16e},{},{}\n", r.epsilon, r.c, r.iterations, drift));
        }
        s
    }
}

/// Levels of `V + ε` for each `ε`. Runs in parallel; rows keep input order.
pub fn continuity_sweep(
    v: &Potential,
    epsilons: &[f64],
    prob: &Problem,
    cfg: &SolverConfig,
    refine: bool,
) -> Result<ContinuitySweep> {
    let base = prob.with_potential(v.clone());
    let vmin = base.v().iter().copied().fold(f64::INFINITY, f64::min);
    if let Some(&e) = epsilons.iter().find(|&&e| !(vmin + e > 0.0)) {
        return Err(Error::Hypothesis {
            hypothesis: crate::Hypothesis::V1,
            detail: format!("V + ε has minimum {} for ε = {e}", vmin + e),
        });
    }
    let start = solver::start_field(&base, cfg)?;
    let c_base = level_c(&base, std::slice::from_ref(&start), cfg, false)?.c;
    let rows = epsilons
        .par_iter()
        .map(|&e| {
            let p = prob.with_potential(v.shifted(e));
            let est = level_c(&p, std::slice::from_ref(&start), cfg, refine)?;
            Ok(SweepRow {
                epsilon: e,
                c: est.c,
                iterations: est.iterations,
                refinement_drift: est.refinement_drift,
                converged: est.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut by_eps: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.c)).collect();
    by_eps.push((0.0, c_base));
    by_eps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = by_eps.windows(2).all(|w| w[1].1 >= w[0].1 - LEVEL_TOL);
    let mut pos: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.epsilon > 0.0)
        .map(|r| (r.epsilon, (r.c - c_base).abs()))
        .collect();
    pos.sort_by(|a, b| a.0.total_cmp(&b.0));
    let converging = pos.windows(2).all(|w| w[0].1 < w[1].1);
    Ok(ContinuitySweep {
        c_base,
        rows,
        monotone,
        converging,
    })
}
