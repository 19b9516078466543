//! The action functional
//!
//! ```text
//!   I(u) = ½ ∫ |-∞D^α u|² + ½ ∫ V u² - ∫ F(u)
//! ```
//!
//! its limit `I∞` (same with `V ≡ V∞`), and the L² representative of `I'(u)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::problem::Problem;
use crate::spaces::{l2_norm, norm_x_sq};
use crate::spectral::{forward_transform, Field};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `½ ∫ |-∞D^α u|²`
    pub kinetic: f64,
    /// `½ ∫ V u²`
    pub potential_term: f64,
    /// `∫ F(u)`
    pub nonlinear: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(kinetic: f64, potential_term: f64, nonlinear: f64) -> Self {
        Self {
            kinetic,
            potential_term,
            nonlinear,
            total: kinetic + potential_term - nonlinear,
        }
    }
}

fn kinetic_from_spectrum(u: &Field, spec: &[Complex64], two_a: f64) -> f64 {
    let g = u.grid();
    let s: f64 = spec
        .iter()
        .zip(g.frequencies())
        .map(|(c, &w)| {
            if w == 0.0 {
                0.0
            } else {
                w.abs().powf(two_a) * c.norm_sqr()
            }
        })
        .sum();
    0.5 * s / (2.0 * g.half_length())
}

fn energy_with(u: &Field, prob: &Problem, weights: &[f64]) -> EnergyBreakdown {
    debug_assert!(u.grid() == prob.grid());
    let two_a = 2.0 * prob.alpha().value();
    let kinetic = kinetic_from_spectrum(u, &forward_transform(u), two_a);
    let dx = u.grid().dx();
    let f = prob.nonlinearity();
    let (mut pot, mut nl) = (0.0, 0.0);
    for (&x, &w) in u.values().iter().zip(weights) {
        pot += w * x * x;
        nl += f.primitive(x);
    }
    EnergyBreakdown::new(kinetic, 0.5 * dx * pot, dx * nl)
}

/// `I(u)`: kinetic part frequency side, the rest by grid quadrature.
pub fn evaluate_i(u: &Field, prob: &Problem) -> EnergyBreakdown {
    energy_with(u, prob, prob.v())
}

/// `I∞(u)`, i.e. `I` with `V` replaced by the constant `V∞`.
pub fn evaluate_i_infinity(u: &Field, prob: &Problem) -> EnergyBreakdown {
    let weights = vec![prob.potential().v_inf(); u.len()];
    energy_with(u, prob, &weights)
}

/// Energy and gradient from a single forward transform.
pub fn energy_and_gradient(u: &Field, prob: &Problem) -> (EnergyBreakdown, Field) {
    debug_assert!(u.grid() == prob.grid());
    let g = u.grid();
    let two_a = 2.0 * prob.alpha().value();
    let mut spec = forward_transform(u);
    let kinetic = kinetic_from_spectrum(u, &spec, two_a);
    for (c, &w) in spec.iter_mut().zip(g.frequencies()) {
        *c *= if w == 0.0 { 0.0 } else { w.abs().powf(two_a) };
    }
    let au = g.inverse_real(&spec);
    let f = prob.nonlinearity();
    let dx = g.dx();
    let (mut pot, mut nl) = (0.0, 0.0);
    let grad: Vec<f64> = au
        .iter()
        .zip(u.values())
        .zip(prob.v())
        .map(|((&a, &x), &v)| {
            pot += v * x * x;
            nl += f.primitive(x);
            a + v * x - f.f(x)
        })
        .collect();
    let energy = EnergyBreakdown::new(kinetic, 0.5 * dx * pot, dx * nl);
    (energy, Field::new(g, grad).expect("finite gradient"))
}

/// L² representative `g = (composed operator) u + V u - f(u)` of `I'(u)`, so
/// that `I'(u)φ = ∫ g φ` for every grid function `φ`.
pub fn gradient_i(u: &Field, prob: &Problem) -> Field {
    energy_and_gradient(u, prob).1
}

/// `I'(u)u = ‖u‖²_X - ∫ f(u) u`; zero exactly on the Nehari manifold.
pub fn nehari_functional(u: &Field, prob: &Problem) -> f64 {
    let f = prob.nonlinearity();
    let fu: f64 = u.values().iter().map(|&x| f.f(x) * x).sum();
    norm_x_sq(u, prob.alpha(), prob.v()) - u.grid().dx() * fu
}

/// `‖g‖_{L²} / ‖u‖_X`, the convergence measure for weak solutions.
pub fn weak_residual_norm(u: &Field, prob: &Problem) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    Ok(residual_from_gradient(u, &gradient_i(u, prob), prob))
}

pub(crate) fn residual_from_gradient(u: &Field, grad: &Field, prob: &Problem) -> f64 {
    l2_norm(grad) / norm_x_sq(u, prob.alpha(), prob.v()).sqrt()
}
