//! Seeded random fields used by multistart runs and the property suites.

use std::f64::consts::PI;

use rand::Rng;

use crate::spectral::{Field, Grid};

/// Sum of the first `modes` Fourier modes with standard-normal-ish
/// coefficients (uniform on `[-1, 1]`) and random phases.
pub fn random_band_limited(grid: &Grid, modes: usize, rng: &mut impl Rng) -> Field {
    let l = grid.half_length();
    let coeffs: Vec<(f64, f64)> = (0..=modes)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)))
        .collect();
    Field::from_fn(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &(a, phi))| a * (PI * k as f64 * x / l + phi).cos())
            .sum()
    })
}

/// A few positive Gaussian bumps at random centres in the middle half of the
/// interval.
pub fn random_bumps(grid: &Grid, count: usize, rng: &mut impl Rng) -> Field {
    let l = grid.half_length();
    let bumps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            (
                rng.random_range(0.2..2.0),
                rng.random_range(-0.25 * l..0.25 * l),
                rng.random_range(0.3..2.0),
            )
        })
        .collect();
    Field::from_fn(grid, |x| {
        bumps.iter().map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum()
    })
}

/// `exp(-((x - center)/width)^2)`.
pub fn gaussian_bump(grid: &Grid, center: f64, width: f64) -> Field {
    Field::from_fn(grid, |x| (-((x - center) / width).powi(2)).exp())
}

/// Random start for multistart runs: bumps plus a small band-limited
/// perturbation, localised by a Gaussian envelope. May have a negative part.
pub fn random_start(grid: &Grid, rng: &mut impl Rng) -> Field {
    let bumps = random_bumps(grid, 3, rng);
    let noise = random_band_limited(grid, 12, rng);
    let l = grid.half_length();
    let env = Field::from_fn(grid, |x| (-(x / (0.25 * l)).powi(2)).exp());
    let values = bumps
        .values()
        .iter()
        .zip(noise.values())
        .zip(env.values())
        .map(|((b, n), e)| b + 0.2 * n * e)
        .collect();
    Field::new(grid, values).expect("finite samples")
}
