//! Periodic grid, transform convention and Liouville-Weyl multipliers.
//!
//! The line is truncated to `[-L, L)` with `N` equispaced samples
//! `x_j = -L + j dx`, `dx = 2L/N`. The continuous transform
//! `û(w) = ∫ e^{-ixw} u(x) dx` is approximated by
//!
//! ```text
//!   û_k = dx Σ_j u_j e^{-i w_k x_j},   w_k = π k / L,
//! ```
//!
//! with `k` running over `-N/2 .. N/2-1` in DFT order. The inverse carries the
//! factor `1/(2L)` so that the pair is exact on the grid and the discrete
//! Parseval identity reads `dx Σ u_j² = (1/2L) Σ |û_k|²`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Order of the one-sided derivatives, restricted to `(1/2, 1]`.
///
/// `α = 1` is admitted as the classical limit.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.5 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Config(format!(
                "fractional order must lie in (1/2, 1], got {alpha}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Uniform periodic grid on `[-L, L)` together with its frequency lattice and
/// cached FFT plans.
#[derive(Clone)]
pub struct Grid {
    half_length: f64,
    n: usize,
    dx: f64,
    freqs: Arc<[f64]>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::Config(format!(
                "half length must be positive and finite, got {half_length}"
            )));
        }
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "point count must be even and at least 8, got {n}"
            )));
        }
        let half = n / 2;
        let freqs: Arc<[f64]> = (0..n)
            .map(|k| {
                let signed = if k < half { k as f64 } else { k as f64 - n as f64 };
                PI * signed / half_length
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            half_length,
            n,
            dx: 2.0 * half_length / n as f64,
            freqs,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
        })
    }

    #[inline]
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Frequencies `w_k = πk/L` in DFT order.
    #[inline]
    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    /// Index of the unpaired Nyquist mode `k = -N/2`.
    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Index of the grid point `x = 0`.
    #[inline]
    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Same interval, twice the resolution.
    pub fn refined(&self) -> Self {
        Self::new(self.half_length, 2 * self.n).expect("refining a valid grid")
    }

    /// Twice the interval at the same spacing.
    pub fn extended(&self) -> Self {
        Self::new(2.0 * self.half_length, 2 * self.n).expect("extending a valid grid")
    }

    /// Scaled forward transform of real samples.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            // e^{i w_k L} = (-1)^k accounts for the grid starting at -L.
            let s = if k % 2 == 0 { self.dx } else { -self.dx };
            *c *= s;
        }
        buf
    }

    /// Inverse of [`Grid::forward`]; returns complex samples.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(spectrum.len(), self.n);
        let scale = 1.0 / (2.0 * self.half_length);
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c * scale } else { -c * scale })
            .collect();
        self.ifft.process(&mut buf);
        buf
    }

    /// Inverse transform keeping only the real part.
    pub fn inverse_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        self.inverse(spectrum).into_iter().map(|c| c.re).collect()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("n", &self.n)
            .field("dx", &self.dx)
            .finish()
    }
}

/// Real samples on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite sample at index {j}")));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x_j)`. Panics if `f` produces a non-finite value.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.points().map(f).collect();
        assert!(values.iter().all(|v| v.is_finite()), "non-finite sample");
        Self {
            grid: grid.clone(),
            values,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Field) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect(),
        })
    }

    /// Cyclic shift by `cells` grid points towards larger `x`.
    pub fn shifted(&self, cells: isize) -> Self {
        let n = self.len() as isize;
        let mut values = vec![0.0; self.len()];
        for (j, &v) in self.values.iter().enumerate() {
            values[(j as isize + cells).rem_euclid(n) as usize] = v;
        }
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Transfers the field onto another grid by trigonometric interpolation.
    /// Target points outside `[-L, L)` of the source receive zero.
    pub fn resample(&self, target: &Grid) -> Self {
        let src = &self.grid;
        if src == target {
            return self.clone();
        }
        // Evaluate the band-limited interpolant directly; the source spectrum is
        // Nyquist-symmetrised so the interpolant is real.
        let spec = forward_transform(self);
        let freqs = src.frequencies();
        let nyq = src.nyquist_index();
        let scale = 1.0 / (2.0 * src.half_length());
        let values = target
            .points()
            .map(|x| {
                if x < -src.half_length() || x >= src.half_length() {
                    return 0.0;
                }
                let mut acc = 0.0;
                for (k, (&c, &w)) in spec.iter().zip(freqs).enumerate() {
                    let phase = Complex64::from_polar(1.0, w * x);
                    let term = (c * phase).re;
                    acc += if k == nyq {
                        term * 0.5 + (c * phase.conj()).re * 0.5
                    } else {
                        term
                    };
                }
                acc * scale
            })
            .collect();
        Self {
            grid: target.clone(),
            values,
        }
    }

    pub(crate) fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Real and imaginary parts of a complex-valued physical-side result.
#[derive(Clone, Debug)]
pub struct ComplexPair {
    pub re: Field,
    pub im: Field,
}

/// Scaled discrete approximation of `û(w)`.
pub fn forward_transform(u: &Field) -> Vec<Complex64> {
    u.grid.forward(&u.values)
}

/// Inverse of [`forward_transform`], keeping both parts.
pub fn inverse_transform(grid: &Grid, spectrum: &[Complex64]) -> ComplexPair {
    let out = grid.inverse(spectrum);
    ComplexPair {
        re: Field {
            grid: grid.clone(),
            values: out.iter().map(|c| c.re).collect(),
        },
        im: Field {
            grid: grid.clone(),
            values: out.iter().map(|c| c.im).collect(),
        },
    }
}

/// Multiplies the spectrum of `u` by `symbol(w)` and returns the physical
/// result.
pub fn apply_symbol(u: &Field, symbol: impl Fn(f64) -> Complex64) -> ComplexPair {
    let mut spec = forward_transform(u);
    for (c, &w) in spec.iter_mut().zip(u.grid.frequencies()) {
        *c *= symbol(w);
    }
    inverse_transform(&u.grid, &spec)
}

/// `(±iw)^α` on the principal branch; zero at `w = 0`.
fn one_sided_symbol(w: f64, alpha: f64, sign: f64) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(w.abs().powf(alpha), sign * alpha * 0.5 * PI * w.signum())
}

fn one_sided(u: &Field, alpha: FractionalOrder, sign: f64) -> ComplexPair {
    let a = alpha.value();
    let mut spec = forward_transform(u);
    // The phase of the odd symbol is ill defined on the unpaired Nyquist mode.
    spec[u.grid.nyquist_index()] = Complex64::new(0.0, 0.0);
    for (c, &w) in spec.iter_mut().zip(u.grid.frequencies()) {
        *c *= one_sided_symbol(w, a, sign);
    }
    inverse_transform(&u.grid, &spec)
}

/// Left Liouville-Weyl derivative `-∞D^α_x u`, symbol `(iw)^α`.
///
/// The imaginary part of the result is a discretisation diagnostic; it
/// vanishes for real band-limited input.
pub fn left_lw_derivative(u: &Field, alpha: FractionalOrder) -> ComplexPair {
    one_sided(u, alpha, 1.0)
}

/// Right Liouville-Weyl derivative `xD^α_∞ u`, symbol `(-iw)^α`.
pub fn right_lw_derivative(u: &Field, alpha: FractionalOrder) -> ComplexPair {
    one_sided(u, alpha, -1.0)
}

/// `tD^α_∞ ( -∞D^α_t u )`, the real even multiplier `|w|^{2α}`.
pub fn composed_operator(u: &Field, alpha: FractionalOrder) -> Field {
    composed_operator_pair(u, alpha).re
}

/// [`composed_operator`] keeping the imaginary round-off residue.
pub fn composed_operator_pair(u: &Field, alpha: FractionalOrder) -> ComplexPair {
    let two_a = 2.0 * alpha.value();
    apply_symbol(u, |w| Complex64::new(w.abs().powf(two_a), 0.0))
}

/// Rectangle rule `dx Σ u_j`, exact for trigonometric polynomials below
/// Nyquist.
pub fn integrate(u: &Field) -> f64 {
    u.grid.dx() * u.values.iter().sum::<f64>()
}

/// `dx Σ a_j b_j`.
pub fn l2_dot(a: &Field, b: &Field) -> f64 {
    debug_assert!(a.grid == b.grid);
    a.grid.dx() * a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum::<f64>()
}
