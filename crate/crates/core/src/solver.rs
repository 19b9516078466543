//! Ground states by Nehari-projected descent, and the diagnostics that go
//! with them: nonnegativity, the gap between `c` and `c∞`, and symmetry.
//!
//! Each iteration keeps the iterate on the Nehari manifold:
//!
//! 1. `g = I'(u)` as an L² field;
//! 2. direction `d = -P g`, with `P` either the identity or the Sobolev
//!    preconditioner `(|w|^{2α} + μ)^{-1}` (`μ` the mean of `V`);
//! 3. trial `v = u + τd`, projected back by [`nehari_project`]; with
//!    backtracking, the trial `τ` is the Barzilai-Borwein step from the last
//!    two iterates and shrinks by `β` until `I(σ_v v) ≤ I(u) + c₁τ⟨g, d⟩`.
//!
//! Because `I'(u)u = 0` on the manifold, the derivative of
//! `u ↦ max_σ I(σu)` at a Nehari point is `I'(u)` itself, so `⟨g, d⟩ < 0` is a
//! genuine descent slope for the projected functional.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::energy::{energy_and_gradient, evaluate_i, residual_from_gradient};
use crate::nehari::{self, nehari_project, LEVEL_TOL};
use crate::problem::Problem;
use crate::rearrange::rearrange;
use crate::sampling::{gaussian_bump, random_start};
use crate::spaces::l2_norm;
use crate::spectral::{forward_transform, l2_dot, Field};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum StepRule {
    Fixed { tau: f64 },
    Backtracking { beta: f64, c1: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Preconditioner {
    /// Plain L² gradient.
    Identity,
    /// `(|w|^{2α} + mean V)^{-1}` applied in Fourier space.
    Sobolev,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Start {
    GaussianBump {
        center: f64,
        width: f64,
    },
    /// [`random_start`] seeded from the config seed.
    Random,
    Custom(Field),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_rule: StepRule,
    pub seed: u64,
    pub start: Start,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-6,
            step_rule: StepRule::Backtracking { beta: 0.5, c1: 1e-4 },
            seed: 0,
            start: Start::GaussianBump {
                center: 0.0,
                width: 1.0,
            },
            preconditioner: Preconditioner::Sobolev,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::Config(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        match self.step_rule {
            StepRule::Fixed { tau } if !(tau > 0.0) => {
                Err(Error::Config(format!("fixed step must be positive, got {tau}")))
            }
            StepRule::Backtracking { beta, c1 } if !(beta > 0.0 && beta < 1.0 && c1 > 0.0 && c1 < 1.0) => Err(
                Error::Config(format!("backtracking needs 0 < beta, c1 < 1, got {beta}, {c1}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Builds the start profile on the problem grid.
pub fn start_field(prob: &Problem, cfg: &SolverConfig) -> Result<Field> {
    match &cfg.start {
        Start::GaussianBump { center, width } => {
            if !(*width > 0.0) {
                return Err(Error::Config(format!("bump width must be positive, got {width}")));
            }
            Ok(gaussian_bump(prob.grid(), *center, *width))
        }
        Start::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            Ok(random_start(prob.grid(), &mut rng))
        }
        Start::Custom(f) => {
            if f.grid() == prob.grid() {
                Ok(f.clone())
            } else {
                Ok(f.resample(prob.grid()))
            }
        }
    }
}

/// Raw output of a descent run.
#[derive(Clone, Debug)]
pub struct Descent {
    pub u: Field,
    pub c: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `I` on the manifold after projection of the start and after each
    /// accepted step.
    pub history: Vec<f64>,
}

// Smallest step before declaring a stall.
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 100.0;

/// Minimises `I` over the Nehari manifold from `start`.
pub fn descend(prob: &Problem, start: &Field, cfg: &SolverConfig) -> Result<Descent> {
    cfg.validate()?;
    if start.grid() != prob.grid() {
        return Err(Error::GridMismatch);
    }
    if !start.values().iter().any(|&x| x > 0.0) {
        return Err(Error::InadmissibleStart("start has no positive part".into()));
    }
    let proj = nehari_project(start, prob)?;
    let mut u = proj.project(start);
    let mut level = proj.psi_max;
    let mut history = vec![level];

    let grid = prob.grid().clone();
    let multiplier: Option<Vec<f64>> = match cfg.preconditioner {
        Preconditioner::Identity => None,
        Preconditioner::Sobolev => {
            let mu = prob.v().iter().sum::<f64>() / prob.v().len() as f64;
            let two_a = 2.0 * prob.alpha().value();
            Some(
                grid.frequencies()
                    .iter()
                    .map(|w| 1.0 / (w.abs().powf(two_a) + mu))
                    .collect(),
            )
        }
    };

    let mut tau = match cfg.step_rule {
        StepRule::Fixed { tau } => tau,
        StepRule::Backtracking { .. } => 1.0,
    };
    let mut iterations = 0;
    // previous iterate, gradient and preconditioned gradient, for the trial step
    let mut prev: Option<(Field, Field, Field)> = None;
    loop {
        let (_, grad) = energy_and_gradient(&u, prob);
        let residual = residual_from_gradient(&u, &grad, prob);
        if residual <= cfg.grad_tol {
            let c = evaluate_i(&u, prob).total;
            return Ok(Descent {
                u,
                c,
                residual,
                iterations,
                converged: true,
                history,
            });
        }
        if iterations >= cfg.max_iters {
            let c = evaluate_i(&u, prob).total;
            return Ok(Descent {
                u,
                c,
                residual,
                iterations,
                converged: false,
                history,
            });
        }

        let dir = match &multiplier {
            None => grad.scaled(-1.0),
            Some(m) => {
                let mut spec = forward_transform(&grad);
                for (c, &s) in spec.iter_mut().zip(m) {
                    *c *= Complex64::new(-s, 0.0);
                }
                Field::new(&grid, grid.inverse_real(&spec)).expect("finite direction")
            }
        };
        let slope = l2_dot(&grad, &dir);
        if let (StepRule::Backtracking { .. }, Some((pu, pg, pd))) = (cfg.step_rule, &prev) {
            // Barzilai-Borwein trial step ⟨s, y⟩ / ⟨y, P y⟩ in the preconditioned metric
            let s_k = u.add_scaled(-1.0, pu)?;
            let y_k = grad.add_scaled(-1.0, pg)?;
            let py_k = pd.add_scaled(-1.0, &dir)?;
            let bb = l2_dot(&s_k, &y_k) / l2_dot(&y_k, &py_k);
            if bb.is_finite() && bb > 0.0 {
                tau = bb.min(MAX_STEP);
            }
        }
        prev = Some((u.clone(), grad.clone(), dir.clone()));

        let accepted = match cfg.step_rule {
            StepRule::Fixed { tau } => {
                let v = u.add_scaled(tau, &dir)?;
                match nehari_project(&v, prob) {
                    Ok(p) => Some((p.project(&v), p.psi_max)),
                    Err(Error::NoProjection) => None,
                    Err(e) => return Err(e),
                }
            }
            StepRule::Backtracking { beta, c1 } => {
                let mut found = None;
                while tau >= MIN_STEP {
                    let v = u.add_scaled(tau, &dir)?;
                    match nehari_project(&v, prob) {
                        Ok(p) if p.psi_max <= level + c1 * tau * slope => {
                            found = Some((p.project(&v), p.psi_max));
                            break;
                        }
                        Ok(_) | Err(Error::NoProjection) => tau *= beta,
                        Err(e) => return Err(e),
                    }
                }
                if found.is_some() {
                    tau = (tau / beta).min(MAX_STEP);
                }
                found
            }
        };

        match accepted {
            Some((next, next_level)) => {
                u = next;
                level = next_level;
                history.push(level);
                iterations += 1;
            }
            None => {
                // Stalled: no admissible step decreases the level.
                let c = evaluate_i(&u, prob).total;
                return Ok(Descent {
                    u,
                    c,
                    residual,
                    iterations,
                    converged: false,
                    history,
                });
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateReport {
    pub u: Field,
    pub c: f64,
    pub residual: f64,
    /// `‖u₋‖_{L²} / ‖u‖_{L²}`.
    pub nonneg_violation: f64,
    /// `‖u - u*‖_{L²} / ‖u‖_{L²}`.
    pub symmetry_defect: f64,
    pub c_infinity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

impl GroundStateReport {
    pub fn scalars(&self) -> GroundStateScalars {
        GroundStateScalars {
            c: self.c,
            c_infinity: self.c_infinity,
            residual: self.residual,
            nonneg_violation: self.nonneg_violation,
            symmetry_defect: self.symmetry_defect,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

/// Scalar part of a [`GroundStateReport`], as serialised.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroundStateScalars {
    pub c: f64,
    pub c_infinity: f64,
    pub residual: f64,
    pub nonneg_violation: f64,
    pub symmetry_defect: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn nonneg_violation(u: &Field) -> f64 {
    let norm = l2_norm(u);
    if norm == 0.0 {
        return 0.0;
    }
    l2_norm(&u.map(|x| x.min(0.0))) / norm
}

pub fn symmetry_defect(u: &Field) -> f64 {
    let norm = l2_norm(u);
    if norm == 0.0 {
        return 0.0;
    }
    let star = rearrange(u);
    l2_norm(&u.add_scaled(-1.0, &star).expect("same grid")) / norm
}

/// Runs the descent from the configured start and fills in all diagnostics.
/// `c∞` comes from a second run on the limit problem unless `V ≡ V∞`.
///
/// Non-convergence is reported through `converged = false`, not as an error.
pub fn ground_state(prob: &Problem, cfg: &SolverConfig) -> Result<GroundStateReport> {
    let start = start_field(prob, cfg)?;
    let d = descend(prob, &start, cfg)?;
    let c_infinity = if prob.is_at_infinity() {
        d.c
    } else {
        descend(&prob.at_infinity(), &start, cfg)?.c
    };
    Ok(GroundStateReport {
        nonneg_violation: nonneg_violation(&d.u),
        symmetry_defect: symmetry_defect(&d.u),
        u: d.u,
        c: d.c,
        residual: d.residual,
        c_infinity,
        iterations: d.iterations,
        converged: d.converged,
        history: d.history,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonnegativityCheck {
    pub violation: f64,
    pub pass: bool,
}

pub const NONNEG_TOL: f64 = 1e-6;

pub fn check_nonnegativity(report: &GroundStateReport) -> NonnegativityCheck {
    let violation = nonneg_violation(&report.u);
    NonnegativityCheck {
        violation,
        pass: violation <= NONNEG_TOL,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttainmentVerdict {
    pub c: f64,
    pub c_inf: f64,
    /// `c∞ - c`.
    pub gap: f64,
    /// `gap ≥ 10 LEVEL_TOL`: the signature of an attained level.
    pub strict: bool,
    pub converged: bool,
}

/// Levels of `V` and of the limit `V∞` from the same start. Requires the
/// `below_v_inf` flag (or `V ≡ V∞`), and `V ≤ V∞` on the grid.
pub fn compare_c_to_c_infinity(prob: &Problem, cfg: &SolverConfig) -> Result<AttainmentVerdict> {
    if !prob.potential().flags().below_v_inf && !prob.is_at_infinity() {
        return Err(Error::Precondition("potential is not flagged below_v_inf".into()));
    }
    let v_inf = prob.potential().v_inf();
    let scale = v_inf.abs().max(1.0) * 1e-12;
    if let Some(j) = prob.v().iter().position(|&v| v > v_inf + scale) {
        return Err(Error::Precondition(format!(
            "V({}) = {} exceeds V∞ = {v_inf}",
            prob.grid().point(j),
            prob.v()[j]
        )));
    }
    let start = start_field(prob, cfg)?;
    let inf = prob.at_infinity();
    let (a, b) = rayon::join(|| descend(prob, &start, cfg), || descend(&inf, &start, cfg));
    let (a, b) = (a?, b?);
    let gap = b.c - a.c;
    Ok(AttainmentVerdict {
        c: a.c,
        c_inf: b.c,
        gap,
        strict: gap >= 10.0 * LEVEL_TOL,
        converged: a.converged && b.converged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryDiagnostic {
    pub symmetry_defect: f64,
    pub energy: f64,
    pub energy_rearranged: f64,
    /// `I(u*) ≤ I(u) + LEVEL_TOL`.
    pub energy_not_raised: bool,
}

/// Distance of the ground state from its symmetric decreasing rearrangement,
/// and the energy check `I(u*) ≤ I(u)`. Requires the radial flag on `V`.
pub fn symmetry_diagnostic(report: &GroundStateReport, prob: &Problem) -> Result<SymmetryDiagnostic> {
    if !prob.potential().flags().radial_increasing {
        return Err(Error::Precondition("potential is not flagged radial_increasing".into()));
    }
    let star = rearrange(&report.u);
    let energy = evaluate_i(&report.u, prob).total;
    let energy_rearranged = evaluate_i(&star, prob).total;
    Ok(SymmetryDiagnostic {
        symmetry_defect: symmetry_defect(&report.u),
        energy,
        energy_rearranged,
        energy_not_raised: energy_rearranged <= energy + LEVEL_TOL,
    })
}

/// Best level over `count` seeded random starts plus the configured start.
pub fn multistart(prob: &Problem, cfg: &SolverConfig, count: usize) -> Result<nehari::LevelEstimate> {
    let mut starts = vec![start_field(prob, cfg)?];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..count {
        starts.push(random_start(prob.grid(), &mut rng));
    }
    nehari::level_c(prob, &starts, cfg, false)
}
