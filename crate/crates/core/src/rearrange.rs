//! Discrete symmetric decreasing rearrangement.
//!
//! On a uniform grid the layer-cake definition reduces to a sort: the values
//! `|u_i|` in descending order are laid out center-out, `N/2, N/2-1, N/2+1,
//! N/2-2, …`, with the leftover cell `0` last. Equal values keep their
//! original index order. Equimeasurability therefore holds exactly at the
//! multiset level; `layer_cake_check` ties the sort back to level sets.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::problem::{Potential, Problem};
use crate::spaces::{lq_norm, seminorm_alpha_sq};
use crate::spectral::{Field, FractionalOrder};
use crate::{Error, Result};

/// Grid indices ordered by distance from the center, left first on ties.
pub fn center_out_order(n: usize) -> Vec<usize> {
    let c = n / 2;
    let mut order = Vec::with_capacity(n);
    order.push(c);
    for k in 1..=c {
        order.push(c - k);
        if c + k < n {
            order.push(c + k);
        }
    }
    order
}

/// `u*` on the same grid.
pub fn rearrange(u: &Field) -> Field {
    let vals = u.values();
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[b].abs().total_cmp(&vals[a].abs()).then(a.cmp(&b)));
    let mut out = vec![0.0; vals.len()];
    for (slot, src) in center_out_order(vals.len()).into_iter().zip(idx) {
        out[slot] = vals[src].abs();
    }
    Field::new(u.grid(), out).expect("rearrangement keeps finite values")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RearrangementReport {
    #[serde(skip)]
    pub u_star: Field,
    /// `q ↦ |‖u*‖_q - ‖u‖_q| / ‖u‖_q`.
    pub lp_drift: BTreeMap<u32, f64>,
    /// `∫V u² - ∫V (u*)²`, when a problem is given.
    pub potential_gain: Option<f64>,
    /// `|u|²_α - |u*|²_α`, when a problem is given.
    pub seminorm_gain: Option<f64>,
}

pub const LP_EXPONENTS: [u32; 3] = [1, 2, 4];

pub fn rearrangement_report(u: &Field, prob: Option<&Problem>) -> RearrangementReport {
    let u_star = rearrange(u);
    let lp_drift = LP_EXPONENTS
        .iter()
        .map(|&q| {
            let a = lq_norm(u, q as f64);
            let b = lq_norm(&u_star, q as f64);
            let d = if a == 0.0 { b } else { (a - b).abs() / a };
            (q, d)
        })
        .collect();
    let (potential_gain, seminorm_gain) = match prob {
        Some(p) if p.grid() == u.grid() => {
            let pot = weighted_square(u, p.v()) - weighted_square(&u_star, p.v());
            let semi = seminorm_alpha_sq(u, p.alpha()) - seminorm_alpha_sq(&u_star, p.alpha());
            (Some(pot), Some(semi))
        }
        _ => (None, None),
    };
    RearrangementReport {
        u_star,
        lp_drift,
        potential_gain,
        seminorm_gain,
    }
}

fn weighted_square(u: &Field, w: &[f64]) -> f64 {
    u.grid().dx() * u.values().iter().zip(w).map(|(a, v)| v * a * a).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub holds: bool,
}

pub const POLYA_SZEGO_SLACK: f64 = 1e-9;

/// `|u*|²_α ≤ |u|²_α`, with relative slack [`POLYA_SZEGO_SLACK`].
pub fn polya_szego_check(u: &Field, alpha: FractionalOrder) -> Result<InequalityCheck> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let lhs = seminorm_alpha_sq(&rearrange(u), alpha);
    let rhs = seminorm_alpha_sq(u, alpha);
    Ok(InequalityCheck {
        lhs,
        rhs,
        margin: rhs - lhs,
        holds: lhs <= rhs + POLYA_SZEGO_SLACK * rhs,
    })
}

/// `∫V (u*)² ≤ ∫V u²` for radially nondecreasing `V` and `u ≥ 0`.
pub fn potential_monotonicity_check(u: &Field, v: &Potential) -> Result<InequalityCheck> {
    if !v.flags().radial_increasing {
        return Err(Error::Precondition("potential is not flagged radial_increasing".into()));
    }
    if u.values().iter().any(|&x| x < 0.0) {
        return Err(Error::Precondition("field has negative values".into()));
    }
    let w = v.sample(u.grid());
    let lhs = weighted_square(&rearrange(u), &w);
    let rhs = weighted_square(u, &w);
    Ok(InequalityCheck {
        lhs,
        rhs,
        margin: rhs - lhs,
        holds: lhs <= rhs + 1e-12 * rhs.abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LayerCakeCheck {
    /// `max_i |u_i - Σ_k h χ_{u ≥ t_k}(x_i)|` on the uniform level grid.
    pub max_deviation: f64,
    /// Whether `#{u* > t} = #{u > t}` at every sampled level.
    pub level_counts_equal: bool,
}

/// Rebuilds `u` from `levels` level-set indicators with step
/// `h = max u / levels`, sampled at `t_k = k h`, `k = 1..=levels`.
pub fn layer_cake_check(u: &Field, levels: usize) -> Result<LayerCakeCheck> {
    if u.values().iter().any(|&x| x < 0.0) {
        return Err(Error::Precondition("field has negative values".into()));
    }
    if levels == 0 {
        return Err(Error::Config("levels must be positive".into()));
    }
    let top = u.values().iter().fold(0.0_f64, |m, &x| m.max(x));
    let star = rearrange(u);
    let h = top / levels as f64;
    let thresholds: Vec<f64> = (1..=levels).map(|k| k as f64 * h).collect();

    let max_deviation = u
        .values()
        .iter()
        .map(|&x| {
            let count = thresholds.iter().filter(|&&t| x >= t).count();
            (x - h * count as f64).abs()
        })
        .fold(0.0, f64::max);

    let count_above = |f: &Field, t: f64| f.values().iter().filter(|&&x| x > t).count();
    let level_counts_equal = std::iter::once(0.0)
        .chain(thresholds.iter().copied())
        .chain(thresholds.iter().map(|t| t - 0.5 * h))
        .all(|t| count_above(u, t) == count_above(&star, t));

    Ok(LayerCakeCheck {
        max_deviation,
        level_counts_equal,
    })
}
