//! Functions on the unit circle sampled on a uniform grid.
//!
//! Everything here works on `M` samples at `theta_j = 2 pi j / M` with `M` a
//! power of two. Conjugation and the Schwarz extension are Fourier
//! multipliers; the Nyquist coefficient `n = M/2` is dropped whenever an
//! analytic series is formed from the data.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HqrError, Result};
use crate::fft;
use crate::series::AnalyticSeries;

/// Relative tolerance for treating a sampled signal as real-valued.
pub const REAL_TOL: f64 = 1e-12;

/// Number of evaluation angles used by [`schwarz_derivative_bound`].
pub const BOUND_THETA_SAMPLES: usize = 1024;

/// Uniform samples of a function on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySignal {
    values: Vec<Complex64>,
}

impl BoundarySignal {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let m = values.len();
        if m < 8 || !m.is_power_of_two() {
            return Err(HqrError::domain(format!(
                "boundary signal needs a power-of-two sample count >= 8, got {m}"
            )));
        }
        Ok(BoundarySignal { values })
    }

    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `phi(theta_j)` for a real function of the angle in `[0, 2 pi)`.
    pub fn from_fn(m: usize, phi: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_real((0..m).map(|j| phi(grid_angle(j, m))).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn theta(&self, j: usize) -> f64 {
        grid_angle(j, self.len())
    }

    pub fn is_real(&self) -> bool {
        let scale = self.values.iter().map(|v| v.re.abs()).fold(1.0, f64::max);
        self.values.iter().all(|v| v.im.abs() <= REAL_TOL * scale)
    }

    /// Real parts, failing if any sample carries a non-negligible imaginary part.
    pub fn real_values(&self) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(HqrError::domain("boundary signal must be real-valued"));
        }
        Ok(self.values.iter().map(|v| v.re).collect())
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.len() as f64
    }

    /// Writes `theta,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let vals = self.real_values()?;
        writeln!(out, "theta,value")?;
        for (j, v) in vals.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.theta(j), v)?;
        }
        Ok(())
    }

    /// Reads the `theta,value` format. Rows must sit on the uniform grid.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut vals = Vec::new();
        let mut thetas = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with("theta") {
                continue;
            }
            let mut cols = t.split(',');
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(HqrError::Parse(format!("line {}: expected two columns", lineno + 1)));
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| HqrError::Parse(format!("line {}: {e}", lineno + 1)))
            };
            thetas.push(parse(a)?);
            vals.push(parse(b)?);
        }
        let m = vals.len();
        let sig = Self::from_real(vals)?;
        for (j, th) in thetas.iter().enumerate() {
            if (th - grid_angle(j, m)).abs() > 1e-9 {
                return Err(HqrError::Parse(format!(
                    "row {j}: theta {th} is not the uniform grid angle {}",
                    grid_angle(j, m)
                )));
            }
        }
        Ok(sig)
    }
}

fn grid_angle(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

/// Discrete Fourier coefficients `c_n`, `n = -M/2+1 ..= M/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs {
    // stored in FFT order: index n mod M
    raw: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn m(&self) -> usize {
        self.raw.len()
    }

    pub fn min_index(&self) -> i64 {
        -(self.m() as i64) / 2 + 1
    }

    pub fn max_index(&self) -> i64 {
        self.m() as i64 / 2
    }

    /// Coefficient of `e^{i n theta}`; zero outside the stored band.
    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.min_index() || n > self.max_index() {
            return Complex64::new(0.0, 0.0);
        }
        self.raw[n.rem_euclid(self.m() as i64) as usize]
    }

    /// `(n, c_n)` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        (self.min_index()..=self.max_index()).map(move |n| (n, self.get(n)))
    }

    /// Inverse transform back to grid samples.
    pub fn synthesize(&self) -> BoundarySignal {
        let mut buf = self.raw.clone();
        fft::inverse(&mut buf);
        BoundarySignal { values: buf }
    }
}

/// `c_n = (1/M) sum_j phi_j e^{-i n theta_j}`.
pub fn fourier_analyze(s: &BoundarySignal) -> FourierCoeffs {
    let mut buf = s.values.clone();
    fft::forward(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    FourierCoeffs { raw: buf }
}

/// Analytic completion of real boundary data via the Schwarz integral,
/// normalized by `Im F(0) = 0`: `F_0 = c_0`, `F_n = 2 c_n` for `1 <= n < M/2`.
pub fn schwarz_extension(u: &BoundarySignal) -> Result<AnalyticSeries> {
    u.real_values()?;
    let c = fourier_analyze(u);
    let half = c.m() / 2;
    let mut coeffs = Vec::with_capacity(half);
    coeffs.push(Complex64::new(c.raw[0].re, 0.0));
    coeffs.extend(c.raw[1..half].iter().map(|&cn| cn * 2.0));
    Ok(AnalyticSeries::new(coeffs))
}

/// Boundary values of the harmonic conjugate `v` with `v(0) = 0`.
///
/// Multiplier `-i sgn(n)` on the Fourier side; the mean and the Nyquist
/// coefficient are removed.
pub fn conjugate_signal(u: &BoundarySignal) -> Result<BoundarySignal> {
    u.real_values()?;
    let mut c = fourier_analyze(u).raw;
    let m = c.len();
    let half = m / 2;
    c[0] = Complex64::new(0.0, 0.0);
    c[half] = Complex64::new(0.0, 0.0);
    let minus_i = Complex64::new(0.0, -1.0);
    for (idx, cn) in c.iter_mut().enumerate().skip(1) {
        if idx < half {
            *cn *= minus_i;
        } else if idx > half {
            *cn *= -minus_i;
        }
    }
    fft::inverse(&mut c);
    BoundarySignal::from_real(c.into_iter().map(|v| v.re).collect())
}

/// Sampled modulus of continuity `omega(delta)` for each requested gap.
///
/// `omega(delta)` is the largest `|phi_i - phi_j|` over sample pairs whose
/// cyclic index distance is at most `round(delta M / 2 pi)`.
pub fn modulus_of_continuity(s: &BoundarySignal, deltas: &[f64]) -> Result<Vec<(f64, f64)>> {
    let m = s.len();
    let h = 2.0 * PI / m as f64;
    let mut gaps = Vec::with_capacity(deltas.len());
    for &d in deltas {
        if !(d >= h * (1.0 - 1e-12)) {
            return Err(HqrError::domain(format!(
                "gap {d} is below the grid resolution {h}"
            )));
        }
        gaps.push(((d / h).round() as usize).clamp(1, m / 2));
    }
    let max_gap = gaps.iter().copied().max().unwrap_or(0);
    // best[k] = max over pairs at index distance exactly k
    let vals = &s.values;
    let exact: Vec<f64> = (1..=max_gap)
        .into_par_iter()
        .map(|k| {
            (0..m)
                .map(|i| (vals[(i + k) % m] - vals[i]).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let mut running = Vec::with_capacity(max_gap + 1);
    running.push(0.0);
    for (k, e) in exact.iter().enumerate() {
        let prev = running[k];
        running.push(f64::max(prev, *e));
    }
    Ok(deltas
        .iter()
        .zip(&gaps)
        .map(|(&d, &g)| (d, running[g]))
        .collect())
}

/// `1 - 2 r cos t + r^2`, the Poisson denominator.
pub fn poisson_denominator(r: f64, t: f64) -> f64 {
    1.0 - 2.0 * r * t.cos() + r * r
}

/// The same denominator written as `(1 - r)^2 + 4 r sin^2(t/2)`.
pub fn poisson_denominator_half_angle(r: f64, t: f64) -> f64 {
    let s = (0.5 * t).sin();
    (1.0 - r) * (1.0 - r) + 4.0 * r * s * s
}

struct BoundKernel {
    u: Vec<f64>,
    weights: Vec<f64>,
}

impl BoundKernel {
    fn new(u: &BoundarySignal, r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(HqrError::domain(format!("radius {r} must lie in [0, 1)")));
        }
        let vals = u.real_values()?;
        let m = vals.len();
        // (1/pi) * (2 pi / M) / D(t_j)
        let weights = (0..m)
            .map(|j| 2.0 / (m as f64 * poisson_denominator(r, grid_angle(j, m))))
            .collect();
        Ok(BoundKernel { u: vals, weights })
    }

    fn at(&self, i: usize) -> f64 {
        let ui = self.u[i];
        let (tail, head) = self.u.split_at(i);
        head.iter()
            .chain(tail)
            .zip(&self.weights)
            .map(|(&uj, &w)| (uj - ui).abs() * w)
            .sum::<f64>()
    }
}

/// Trapezoidal value of
/// `(1/pi) int_0^{2pi} |u(theta + t) - u(theta)| / (1 - 2 r cos t + r^2) dt`
/// at the grid angle with index `theta_index`.
pub fn schwarz_derivative_bound_at(u: &BoundarySignal, r: f64, theta_index: usize) -> Result<f64> {
    let k = BoundKernel::new(u, r)?;
    if theta_index >= u.len() {
        return Err(HqrError::domain("angle index out of range"));
    }
    Ok(k.at(theta_index))
}

/// Maximum of the derivative bound over the evaluation angles.
///
/// The `t` quadrature always uses the full grid. The bound is evaluated at
/// every `M / BOUND_THETA_SAMPLES`-th grid angle (all angles when `M` is
/// smaller), which always includes `theta = 0`.
pub fn schwarz_derivative_bound(u: &BoundarySignal, r: f64) -> Result<f64> {
    let k = BoundKernel::new(u, r)?;
    let stride = (u.len() / BOUND_THETA_SAMPLES).max(1);
    let idx: Vec<usize> = (0..u.len()).step_by(stride).collect();
    Ok(idx.par_iter().map(|&i| k.at(i)).reduce(|| 0.0, f64::max))
}
