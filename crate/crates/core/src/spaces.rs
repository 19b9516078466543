//! Fractional Sobolev seminorm, the H^α norm and the potential-weighted X^α
//! inner product.
//!
//! The seminorm is normalised so that it equals the physical-side quadratic
//! form, `|u|²_α = ∫ |-∞D^α u|² = (1/2π) ∫ |w|^{2α} |û|² dw`. On the grid the
//! frequency measure is `dw = π/L`, giving `(1/2L) Σ |w_k|^{2α} |û_k|²`.

use serde::Serialize;

use crate::problem::Potential;
use crate::spectral::{composed_operator, forward_transform, l2_dot, Field, FractionalOrder};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub l2: f64,
    pub seminorm_alpha: f64,
    pub norm_alpha: f64,
    pub norm_x: f64,
    pub sup_norm: f64,
}

/// `|u|²_α`, frequency side.
pub fn seminorm_alpha_sq(u: &Field, alpha: FractionalOrder) -> f64 {
    let two_a = 2.0 * alpha.value();
    let g = u.grid();
    let spec = forward_transform(u);
    let sum: f64 = spec
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
    sum / (2.0 * g.half_length())
}

pub fn seminorm_alpha(u: &Field, alpha: FractionalOrder) -> f64 {
    seminorm_alpha_sq(u, alpha).sqrt()
}

/// `|u|²_α` as the physical-side quadratic form `∫ u · (composed operator) u`.
pub fn seminorm_alpha_sq_physical(u: &Field, alpha: FractionalOrder) -> f64 {
    l2_dot(u, &composed_operator(u, alpha))
}

pub fn l2_norm(u: &Field) -> f64 {
    l2_dot(u, u).sqrt()
}

/// `(∫|u|^q)^{1/q}` by the rectangle rule.
pub fn lq_norm(u: &Field, q: f64) -> f64 {
    let s: f64 = u.values().iter().map(|v| v.abs().powf(q)).sum();
    (u.grid().dx() * s).powf(1.0 / q)
}

pub fn sup_norm(u: &Field) -> f64 {
    u.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `‖u‖_α = (‖u‖²_{L²} + |u|²_α)^{1/2}`.
pub fn norm_alpha(u: &Field, alpha: FractionalOrder) -> f64 {
    (l2_dot(u, u) + seminorm_alpha_sq(u, alpha)).sqrt()
}

/// `⟨u, v⟩_X = ∫ (-∞D^α u)(-∞D^α v) + ∫ V u v` with `V` given by its samples.
///
/// The kinetic part is evaluated frequency side as
/// `(1/2L) Σ |w|^{2α} Re(û conj(v̂))`.
pub fn inner_product_weighted(u: &Field, v: &Field, alpha: FractionalOrder, weights: &[f64]) -> Result<f64> {
    u.same_grid(v)?;
    let g = u.grid();
    if weights.len() != g.len() {
        return Err(Error::GridMismatch);
    }
    let two_a = 2.0 * alpha.value();
    let (su, sv) = (forward_transform(u), forward_transform(v));
    let kinetic: f64 = su
        .iter()
        .zip(&sv)
        .zip(g.frequencies())
        .map(|((a, b), &w)| {
            if w == 0.0 {
                0.0
            } else {
                w.abs().powf(two_a) * (a * b.conj()).re
            }
        })
        .sum::<f64>()
        / (2.0 * g.half_length());
    let potential: f64 = g.dx()
        * u.values()
            .iter()
            .zip(v.values())
            .zip(weights)
            .map(|((a, b), w)| w * a * b)
            .sum::<f64>();
    Ok(kinetic + potential)
}

/// `⟨u, v⟩_{X^α}` for a potential evaluated on the fields' grid.
pub fn inner_product_x(u: &Field, v: &Field, alpha: FractionalOrder, pot: &Potential) -> Result<f64> {
    inner_product_weighted(u, v, alpha, &pot.sample(u.grid()))
}

/// `‖u‖²_X = |u|²_α + ∫ V u²`.
pub fn norm_x_sq(u: &Field, alpha: FractionalOrder, weights: &[f64]) -> f64 {
    let pot: f64 = u.grid().dx() * u.values().iter().zip(weights).map(|(a, w)| w * a * a).sum::<f64>();
    seminorm_alpha_sq(u, alpha) + pot
}

pub fn norm_report(u: &Field, alpha: FractionalOrder, pot: &Potential) -> NormReport {
    let l2sq = l2_dot(u, u);
    let semi_sq = seminorm_alpha_sq(u, alpha);
    let weights = pot.sample(u.grid());
    NormReport {
        l2: l2sq.sqrt(),
        seminorm_alpha: semi_sq.sqrt(),
        norm_alpha: (l2sq + semi_sq).sqrt(),
        norm_x: norm_x_sq(u, alpha, &weights).sqrt(),
        sup_norm: sup_norm(u),
    }
}

/// `‖u‖_∞ / ‖u‖_α`, an empirical lower bound for the embedding constant.
pub fn embedding_ratio(u: &Field, alpha: FractionalOrder) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    Ok(sup_norm(u) / norm_alpha(u, alpha))
}
