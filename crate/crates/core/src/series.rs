//! Truncated power series on the unit disk and harmonic maps `f = h + conj(g)`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HqrError, Result};
use crate::fft;

/// Guard for the dilatation quotient: `|h'(z)| <= DIV_TOL * (1 + |g'(z)|)`
/// is treated as a critical point of `h`.
pub const DIV_TOL: f64 = 1e-13;

/// Truncated power series `sum_{n=0}^{N} c_n z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticSeries {
    coeffs: Vec<Complex64>,
}

impl AnalyticSeries {
    /// An empty coefficient list is read as the zero series.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        AnalyticSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        AnalyticSeries { coeffs: vec![c] }
    }

    /// The identity map `z`.
    pub fn identity() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
        coeffs[m] = Complex64::new(1.0, 0.0);
        AnalyticSeries { coeffs }
    }

    /// Truncation degree `N`; the series stores `N + 1` coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Horner evaluation at a point of the open disk.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(HqrError::OutsideDisk { z });
        }
        Ok(self.horner(z))
    }

    fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Termwise derivative: coefficient `n` of the result is `(n+1) c_{n+1}`.
    pub fn derivative(&self) -> AnalyticSeries {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| c * n as f64)
            .collect();
        AnalyticSeries { coeffs }
    }

    /// Antiderivative vanishing at the origin.
    pub fn integral(&self) -> AnalyticSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| c / (n + 1) as f64),
        );
        AnalyticSeries { coeffs }
    }

    pub fn scale(&self, s: Complex64) -> AnalyticSeries {
        AnalyticSeries {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Series with the constant term replaced.
    pub fn with_constant(&self, c0: Complex64) -> AnalyticSeries {
        let mut out = self.clone();
        out.coeffs[0] = c0;
        out
    }

    /// Samples `S(r e^{2 pi i j / m})`, `j = 0..m`.
    ///
    /// Coefficients `c_n r^n` are folded modulo `m` and pushed through one
    /// inverse FFT, so the grid values are exact for any truncation degree
    /// (no aliasing at the sample points).
    pub fn eval_on_circle(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        if !(0.0..1.0).contains(&r) {
            return Err(HqrError::OutsideDisk {
                z: Complex64::new(r, 0.0),
            });
        }
        self.fold_and_synthesize(r, m)
    }

    /// Values of the truncated series on the unit circle at `m` grid angles.
    ///
    /// Only meaningful for the truncation itself (a polynomial); this is how
    /// boundary data built by a Schwarz extension are read back.
    pub fn eval_on_unit_circle(&self, m: usize) -> Result<Vec<Complex64>> {
        self.fold_and_synthesize(1.0, m)
    }

    fn fold_and_synthesize(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        if m == 0 {
            return Err(HqrError::domain("circle needs at least one sample"));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut powers = radial_powers(r);
        'fold: for chunk in self.coeffs.chunks(m) {
            for (b, &c) in buf.iter_mut().zip(chunk) {
                let rn = powers.next().unwrap_or(0.0);
                if rn == 0.0 {
                    break 'fold;
                }
                *b += c * rn;
            }
        }
        fft::inverse(&mut buf);
        Ok(buf)
    }
}

/// `r^n` for `n = 0, 1, ...`, re-anchored with `powi` so the running product
/// does not drift over very long series.
fn radial_powers(r: f64) -> impl Iterator<Item = f64> {
    let mut n: i32 = 0;
    let mut cur = 1.0_f64;
    std::iter::from_fn(move || {
        let out = cur;
        n = n.saturating_add(1);
        cur = if n % 256 == 0 { r.powi(n) } else { cur * r };
        Some(out)
    })
}

fn zip_pad(a: &[Complex64], b: &[Complex64], op: impl Fn(Complex64, Complex64) -> Complex64) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    (0..a.len().max(b.len()))
        .map(|n| {
            op(
                a.get(n).copied().unwrap_or(zero),
                b.get(n).copied().unwrap_or(zero),
            )
        })
        .collect()
}

impl Add for &AnalyticSeries {
    type Output = AnalyticSeries;

    fn add(self, rhs: &AnalyticSeries) -> AnalyticSeries {
        AnalyticSeries::new(zip_pad(&self.coeffs, &rhs.coeffs, |a, b| a + b))
    }
}

impl Sub for &AnalyticSeries {
    type Output = AnalyticSeries;

    fn sub(self, rhs: &AnalyticSeries) -> AnalyticSeries {
        AnalyticSeries::new(zip_pad(&self.coeffs, &rhs.coeffs, |a, b| a - b))
    }
}

impl Neg for &AnalyticSeries {
    type Output = AnalyticSeries;

    fn neg(self) -> AnalyticSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Full Cauchy product; the result keeps every term (degree `N1 + N2`).
impl Mul for &AnalyticSeries {
    type Output = AnalyticSeries;

    fn mul(self, rhs: &AnalyticSeries) -> AnalyticSeries {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (&self.coeffs, &rhs.coeffs)
        } else {
            (&rhs.coeffs, &self.coeffs)
        };
        let mut out = vec![Complex64::new(0.0, 0.0); long.len() + short.len() - 1];
        for (i, &s) in short.iter().enumerate() {
            if s == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &l) in long.iter().enumerate() {
                out[i + j] += s * l;
            }
        }
        AnalyticSeries::new(out)
    }
}

/// Harmonic map `f = h + conj(g)` with `g(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicMap {
    h: AnalyticSeries,
    g: AnalyticSeries,
}

impl HarmonicMap {
    pub fn new(h: AnalyticSeries, g: AnalyticSeries) -> Result<Self> {
        if g.coeff(0) != Complex64::new(0.0, 0.0) {
            return Err(HqrError::domain(format!(
                "co-analytic part must vanish at the origin, got g(0) = {}",
                g.coeff(0)
            )));
        }
        Ok(HarmonicMap { h, g })
    }

    /// Analytic map viewed as a harmonic one (`g = 0`).
    pub fn analytic(h: AnalyticSeries) -> Self {
        HarmonicMap {
            h,
            g: AnalyticSeries::zero(),
        }
    }

    /// Map with prescribed dilatation: `g = integral of omega * h'`.
    ///
    /// The product is kept at full degree, so `g' = omega h'` holds exactly
    /// for the stored series.
    pub fn from_dilatation(h: AnalyticSeries, omega: &AnalyticSeries) -> Self {
        let g = (omega * &h.derivative()).integral();
        HarmonicMap { h, g }
    }

    pub fn h(&self) -> &AnalyticSeries {
        &self.h
    }

    pub fn g(&self) -> &AnalyticSeries {
        &self.g
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.h.eval(z)? + self.g.eval(z)?.conj())
    }

    /// Complex dilatation `omega = g'/h'` at `z`.
    pub fn dilatation(&self, z: Complex64) -> Result<Complex64> {
        let hp = self.h.derivative().eval(z)?;
        let gp = self.g.derivative().eval(z)?;
        quotient(gp, hp, z)
    }

    /// `F = h + g`, the analytic function with `Re F = Re f`.
    pub fn analytic_completion(&self) -> AnalyticSeries {
        &self.h + &self.g
    }

    /// Samples of `f` on the circle of radius `r`.
    pub fn eval_on_circle(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        let h = self.h.eval_on_circle(r, m)?;
        let g = self.g.eval_on_circle(r, m)?;
        Ok(h.iter().zip(&g).map(|(a, b)| a + b.conj()).collect())
    }

    /// Unit-circle values of the truncated map; see
    /// [`AnalyticSeries::eval_on_unit_circle`].
    pub fn eval_on_unit_circle(&self, m: usize) -> Result<Vec<Complex64>> {
        let h = self.h.eval_on_unit_circle(m)?;
        let g = self.g.eval_on_unit_circle(m)?;
        Ok(h.iter().zip(&g).map(|(a, b)| a + b.conj()).collect())
    }

    /// Fails unless `|h'| > |g'|` at every sample on the circle.
    pub fn check_sense_preserving(&self, r: f64, m: usize) -> Result<()> {
        let hp = self.h.derivative().eval_on_circle(r, m)?;
        let gp = self.g.derivative().eval_on_circle(r, m)?;
        let (j, margin) = hp
            .iter()
            .zip(&gp)
            .map(|(a, b)| a.norm() - b.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |best, (j, d)| if d < best.1 { (j, d) } else { best });
        if margin > 0.0 {
            Ok(())
        } else {
            Err(HqrError::NotSensePreserving {
                r,
                theta: 2.0 * PI * j as f64 / m as f64,
                margin,
            })
        }
    }

    /// Estimates the quasiregularity constants from circle samples of `omega`.
    pub fn qr_constants(&self, r_grid: &[f64], n_theta: usize) -> Result<QrReport> {
        if n_theta < 64 {
            return Err(HqrError::domain(format!(
                "qr_constants needs at least 64 angles, got {n_theta}"
            )));
        }
        if r_grid.is_empty() {
            return Err(HqrError::domain("empty radius grid"));
        }
        let hd = self.h.derivative();
        let gd = self.g.derivative();
        let mut k_hat = 0.0;
        let mut argmax = (r_grid[0], 0.0);
        let mut r_checked = 0.0_f64;
        for &r in r_grid {
            let hp = hd.eval_on_circle(r, n_theta)?;
            let gp = gd.eval_on_circle(r, n_theta)?;
            for (j, (&a, &b)) in hp.iter().zip(&gp).enumerate() {
                let theta = 2.0 * PI * j as f64 / n_theta as f64;
                let w = quotient(b, a, Complex64::from_polar(r, theta))?.norm();
                if w > k_hat {
                    k_hat = w;
                    argmax = (r, theta);
                }
            }
            r_checked = r_checked.max(r);
        }
        if k_hat >= 1.0 {
            return Err(HqrError::NotQuasiregular { k_hat });
        }
        Ok(QrReport {
            k_hat,
            big_k_hat: dilatation_to_distortion(k_hat),
            r_checked,
            argmax_r: argmax.0,
            argmax_theta: argmax.1,
        })
    }
}

fn quotient(gp: Complex64, hp: Complex64, z: Complex64) -> Result<Complex64> {
    if hp.norm() <= DIV_TOL * (1.0 + gp.norm()) {
        return Err(HqrError::CriticalPoint { z });
    }
    Ok(gp / hp)
}

/// `K = (1 + k) / (1 - k)`.
pub fn dilatation_to_distortion(k: f64) -> f64 {
    (1.0 + k) / (1.0 - k)
}

/// `k = (K - 1) / (K + 1)`.
pub fn distortion_to_dilatation(big_k: f64) -> f64 {
    (big_k - 1.0) / (big_k + 1.0)
}

/// Measured quasiregularity constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QrReport {
    pub k_hat: f64,
    #[serde(rename = "K_hat")]
    pub big_k_hat: f64,
    pub r_checked: f64,
    pub argmax_r: f64,
    pub argmax_theta: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_series(rng: &mut ChaCha8Rng, degree: usize) -> AnalyticSeries {
        AnalyticSeries::new(
            (0..=degree)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    #[test]
    fn unit_circle_samples_match_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_series(&mut rng, 40);
        let m = 32;
        let w = s.eval_on_unit_circle(m).unwrap();
        for (j, &x) in w.iter().enumerate() {
            let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            let direct: Complex64 = s.coeffs().iter().enumerate().map(|(n, &a)| a * z.powu(n as u32)).sum();
            assert!((x - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn eval_trivial_cases() {
        let one = AnalyticSeries::from_real(&[1.0]);
        assert_eq!(one.eval(c(0.3, 0.4)).unwrap(), c(1.0, 0.0));
        let id = AnalyticSeries::identity();
        assert_eq!(id.eval(c(0.0, 0.5)).unwrap(), c(0.0, 0.5));
    }

    #[test]
    fn eval_geometric_series() {
        let geo = AnalyticSeries::from_real(&[1.0; 64]);
        // tail 0.5^64 / (1 - 0.5)
        let v = geo.eval(c(0.5, 0.0)).unwrap();
        assert!((v - c(2.0, 0.0)).norm() <= 2.0 * 0.5_f64.powi(64) + 1e-15);
    }

    #[test]
    fn eval_outside_disk_is_domain_error() {
        let s = AnalyticSeries::identity();
        assert!(matches!(s.eval(c(1.0, 0.0)), Err(HqrError::OutsideDisk { .. })));
        assert!(matches!(s.eval(c(0.8, 0.8)), Err(HqrError::OutsideDisk { .. })));
        assert!(s.eval_on_circle(1.0, 16).is_err());
    }

    #[test]
    fn derivative_cases() {
        assert_eq!(
            AnalyticSeries::from_real(&[5.0]).derivative(),
            AnalyticSeries::from_real(&[0.0])
        );
        assert_eq!(
            AnalyticSeries::from_real(&[0.0, 0.0, 1.0]).derivative(),
            AnalyticSeries::from_real(&[0.0, 2.0])
        );
        let geo = AnalyticSeries::from_real(&[1.0; 100]);
        let d = geo.derivative();
        assert_eq!(d.degree(), 98);
        for (n, &cn) in d.coeffs().iter().enumerate() {
            assert_eq!(cn, c((n + 1) as f64, 0.0));
        }
    }

    #[test]
    fn integral_inverts_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_series(&mut rng, 10).with_constant(c(0.0, 0.0));
        let back = s.derivative().integral();
        for (a, b) in s.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn circle_samples_match_horner_even_when_folded() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_series(&mut rng, 200);
        // m < degree forces folding of the coefficient array
        let m = 64;
        let r = 0.9;
        let samples = s.eval_on_circle(r, m).unwrap();
        for (j, w) in samples.iter().enumerate() {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
            assert!((w - s.eval(z).unwrap()).norm() < 1e-11);
        }
    }

    #[test]
    fn harmonic_eval_cases() {
        let f = HarmonicMap::new(AnalyticSeries::identity(), AnalyticSeries::zero()).unwrap();
        assert_eq!(f.eval(c(0.0, 0.5)).unwrap(), c(0.0, 0.5));
        let f = HarmonicMap::new(
            AnalyticSeries::identity(),
            AnalyticSeries::from_real(&[0.0, 0.5]),
        )
        .unwrap();
        assert_abs_diff_eq!(f.eval(c(0.6, 0.0)).unwrap().re, 0.9, epsilon = 1e-15);
        let w = f.eval(c(0.0, 0.6)).unwrap();
        assert_abs_diff_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn harmonic_map_rejects_nonzero_g0() {
        let r = HarmonicMap::new(AnalyticSeries::identity(), AnalyticSeries::from_real(&[1.0]));
        assert!(matches!(r, Err(HqrError::Domain(_))));
    }

    #[test]
    fn dilatation_cases() {
        let h = AnalyticSeries::from_real(&[2.0, 1.0, 0.3]);
        let g = (&h - &AnalyticSeries::from_real(&[2.0])).scale(c(0.5, 0.0));
        let f = HarmonicMap::new(h, g).unwrap();
        for z in [c(0.1, 0.2), c(-0.7, 0.1), c(0.0, 0.0)] {
            assert!((f.dilatation(z).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        }

        let f = HarmonicMap::new(
            AnalyticSeries::identity(),
            AnalyticSeries::from_real(&[0.0, 0.0, 0.25]),
        )
        .unwrap();
        let w = f.dilatation(Complex64::from_polar(0.3, PI)).unwrap();
        assert!((w - c(-0.15, 0.0)).norm() < 1e-15);

        let f = HarmonicMap::analytic(AnalyticSeries::monomial(2));
        assert!(matches!(
            f.dilatation(c(0.0, 0.0)),
            Err(HqrError::CriticalPoint { .. })
        ));
    }

    #[test]
    fn qr_constants_cases() {
        let h = AnalyticSeries::from_real(&[0.0, 1.0, 0.2]);
        let g = h.scale(c(0.5, 0.0));
        let rep = HarmonicMap::new(h.clone(), g)
            .unwrap()
            .qr_constants(&[0.5, 0.9], 64)
            .unwrap();
        assert_abs_diff_eq!(rep.k_hat, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.big_k_hat, 3.0, epsilon = 1e-12);

        let rep = HarmonicMap::analytic(h).qr_constants(&[0.5, 0.9], 64).unwrap();
        assert_eq!(rep.k_hat, 0.0);
        assert_eq!(rep.big_k_hat, 1.0);

        // omega(z) = z
        let f = HarmonicMap::new(
            AnalyticSeries::identity(),
            AnalyticSeries::from_real(&[0.0, 0.0, 0.5]),
        )
        .unwrap();
        let rep = f.qr_constants(&[0.3, 0.6, 0.9], 128).unwrap();
        assert_abs_diff_eq!(rep.k_hat, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.big_k_hat, 19.0, epsilon = 1e-9);
        assert_eq!(rep.argmax_r, 0.9);
        assert_eq!(rep.r_checked, 0.9);
    }

    #[test]
    fn qr_constants_errors() {
        let f = HarmonicMap::analytic(AnalyticSeries::identity());
        assert!(f.qr_constants(&[0.5], 32).is_err());
        // omega = 2z reaches |omega| = 1.6 at r = 0.8
        let g = AnalyticSeries::from_real(&[0.0, 0.0, 1.0]);
        let f = HarmonicMap::new(AnalyticSeries::identity(), g).unwrap();
        assert!(matches!(
            f.qr_constants(&[0.8], 64),
            Err(HqrError::NotQuasiregular { .. })
        ));
        let f = HarmonicMap::analytic(AnalyticSeries::from_real(&[0.0, 0.0, 1.0]));
        assert!(matches!(
            f.qr_constants(&[0.0], 64),
            Err(HqrError::CriticalPoint { .. })
        ));
    }

    #[test]
    fn sense_preserving_check() {
        let ok = HarmonicMap::new(
            AnalyticSeries::identity(),
            AnalyticSeries::from_real(&[0.0, 0.0, 0.25]),
        )
        .unwrap();
        assert!(ok.check_sense_preserving(0.9, 128).is_ok());
        let bad = HarmonicMap::new(
            AnalyticSeries::identity(),
            AnalyticSeries::from_real(&[0.0, 0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(
            bad.check_sense_preserving(0.9, 128),
            Err(HqrError::NotSensePreserving { .. })
        ));
    }

    #[test]
    fn analytic_completion_cases() {
        let f = HarmonicMap::new(
            AnalyticSeries::identity(),
            AnalyticSeries::from_real(&[0.0, 0.5]),
        )
        .unwrap();
        assert_eq!(f.analytic_completion(), AnalyticSeries::from_real(&[0.0, 1.5]));
        let h = AnalyticSeries::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(HarmonicMap::analytic(h.clone()).analytic_completion(), h);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_series(&mut rng, 8);
        let g = random_series(&mut rng, 8).with_constant(c(0.0, 0.0));
        let f = HarmonicMap::new(h, g).unwrap();
        let big_f = f.analytic_completion();
        let fs = f.eval_on_circle(0.7, 256).unwrap();
        let bs = big_f.eval_on_circle(0.7, 256).unwrap();
        let err = fs
            .iter()
            .zip(&bs)
            .map(|(a, b)| (a.re - b.re).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn variable_dilatation_map() {
        let h = AnalyticSeries::from_real(&[0.0, 1.0, 0.1, 0.05]);
        let omega = AnalyticSeries::from_real(&[0.1, 0.3]);
        let f = HarmonicMap::from_dilatation(h, &omega);
        for z in [c(0.2, 0.1), c(-0.5, 0.4)] {
            let w = f.dilatation(z).unwrap();
            assert!((w - omega.eval(z).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn distortion_roundtrip() {
        for k in [0.0, 0.2, 0.5, 0.8] {
            assert_abs_diff_eq!(
                distortion_to_dilatation(dilatation_to_distortion(k)),
                k,
                epsilon = 1e-15
            );
        }
    }
}
