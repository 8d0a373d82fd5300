//! Integral means `M_p(r, f)` over circles and radial profiles.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HqrError, Result};
use crate::series::{AnalyticSeries, HarmonicMap};

/// Lower bound on circle samples.
pub const MIN_CIRCLE_SAMPLES: usize = 4096;
/// Upper bound on automatically chosen circle samples.
pub const MAX_CIRCLE_SAMPLES: usize = 1 << 20;

/// `((1/M) sum |w_j|^p)^{1/p}`, or `max |w_j|` for `p = inf`.
pub fn integral_mean(values: &[Complex64], p: f64) -> Result<f64> {
    check_samples(values.len(), p)?;
    Ok(match p {
        f64::INFINITY => values.iter().map(|w| w.norm()).fold(0.0, f64::max),
        2.0 => mean(values.iter().map(|w| w.norm_sqr()), values.len()).sqrt(),
        1.0 => mean(values.iter().map(|w| w.norm()), values.len()),
        0.5 => mean(values.iter().map(|w| w.norm().sqrt()), values.len()).powi(2),
        _ => mean(values.iter().map(|w| w.norm_sqr().powf(0.5 * p)), values.len()).powf(1.0 / p),
    })
}

/// Same as [`integral_mean`] for real samples.
pub fn integral_mean_real(values: &[f64], p: f64) -> Result<f64> {
    check_samples(values.len(), p)?;
    Ok(match p {
        f64::INFINITY => values.iter().map(|w| w.abs()).fold(0.0, f64::max),
        _ => mean(values.iter().map(|w| w.abs().powf(p)), values.len()).powf(1.0 / p),
    })
}

fn check_samples(len: usize, p: f64) -> Result<()> {
    check_exponent(p)?;
    if len == 0 {
        return Err(HqrError::domain("integral mean of an empty sample set"));
    }
    Ok(())
}

fn mean(terms: impl Iterator<Item = f64>, len: usize) -> f64 {
    terms.sum::<f64>() / len as f64
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 {
        Ok(())
    } else {
        Err(HqrError::domain(format!("exponent p must be positive, got {p}")))
    }
}

/// Which real or complex quantity of a map is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// The complex value `f`.
    Full,
    /// `u = Re f`.
    Re,
    /// `v = Im f`.
    Im,
    /// `|f|` (same means as `Full`).
    Abs,
}

impl Part {
    pub fn apply(self, w: Complex64) -> Complex64 {
        match self {
            Part::Full => w,
            Part::Re => Complex64::new(w.re, 0.0),
            Part::Im => Complex64::new(w.im, 0.0),
            Part::Abs => Complex64::new(w.norm(), 0.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Part::Full => "f",
            Part::Re => "re",
            Part::Im => "im",
            Part::Abs => "abs",
        }
    }
}

impl std::str::FromStr for Part {
    type Err = HqrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "f" => Ok(Part::Full),
            "re" => Ok(Part::Re),
            "im" => Ok(Part::Im),
            "abs" => Ok(Part::Abs),
            other => Err(HqrError::Parse(format!("unknown part `{other}`"))),
        }
    }
}

/// Anything that can be sampled on a circle `|z| = r`.
pub trait CircleSubject: Sync {
    fn label(&self) -> String;

    fn sample_circle(&self, r: f64, m: usize) -> Result<Vec<Complex64>>;

    /// Degree of the underlying truncated series, when there is one.
    fn degree_hint(&self) -> Option<usize> {
        None
    }
}

impl CircleSubject for AnalyticSeries {
    fn label(&self) -> String {
        format!("series[N={}]", self.degree())
    }

    fn sample_circle(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        self.eval_on_circle(r, m)
    }

    fn degree_hint(&self) -> Option<usize> {
        Some(self.degree())
    }
}

impl CircleSubject for HarmonicMap {
    fn label(&self) -> String {
        format!("harmonic[N={}]", self.h().degree().max(self.g().degree()))
    }

    fn sample_circle(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        self.eval_on_circle(r, m)
    }

    fn degree_hint(&self) -> Option<usize> {
        Some(self.h().degree().max(self.g().degree()))
    }
}

/// A subject restricted to one [`Part`].
pub struct PartOf<'a, S: CircleSubject + ?Sized> {
    pub subject: &'a S,
    pub part: Part,
}

impl<'a, S: CircleSubject + ?Sized> PartOf<'a, S> {
    pub fn new(subject: &'a S, part: Part) -> Self {
        PartOf { subject, part }
    }
}

impl<S: CircleSubject + ?Sized> CircleSubject for PartOf<'_, S> {
    fn label(&self) -> String {
        format!("{}({})", self.part.label(), self.subject.label())
    }

    fn sample_circle(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        let mut w = self.subject.sample_circle(r, m)?;
        w.iter_mut().for_each(|x| *x = self.part.apply(*x));
        Ok(w)
    }

    fn degree_hint(&self) -> Option<usize> {
        self.subject.degree_hint()
    }
}

/// Pointwise-evaluated subject, e.g. a closed form.
pub struct PointwiseSubject<F> {
    pub label: String,
    pub eval: F,
}

impl<F> CircleSubject for PointwiseSubject<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn label(&self) -> String {
        self.label.clone()
    }

    fn sample_circle(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        (0..m)
            .map(|j| {
                let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
                (self.eval)(z)
            })
            .collect()
    }
}

/// How many samples to put on each circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircleResolution {
    Fixed(usize),
    /// Chosen per radius by [`auto_circle_samples`].
    Auto,
}

/// Samples for a circle of radius `r` carrying a degree-`degree` series.
///
/// `4 (N + 1)` samples make `p = 2` means exact; near the boundary the
/// integrand varies on the scale `1 - r`, and `32 / (1 - r)` samples put the
/// trapezoidal error near `e^{-32}`. The smaller of the two is used, clamped
/// to `[MIN_CIRCLE_SAMPLES, MAX_CIRCLE_SAMPLES]`.
pub fn auto_circle_samples(degree: Option<usize>, r: f64) -> usize {
    let resolution = (32.0 / (1.0 - r).max(1e-12)).ceil() as usize;
    let need = match degree {
        Some(n) => resolution.min(4 * (n + 1)),
        None => resolution,
    };
    need.next_power_of_two()
        .clamp(MIN_CIRCLE_SAMPLES, MAX_CIRCLE_SAMPLES)
}

/// `r_j = 1 - 2^{-j}` for `j = j_min..=j_max`.
pub fn geometric_r_grid(j_min: u32, j_max: u32) -> Vec<f64> {
    (j_min..=j_max).map(|j| 1.0 - 0.5_f64.powi(j as i32)).collect()
}

/// The default grid `j = 1..=12`.
pub fn default_r_grid() -> Vec<f64> {
    geometric_r_grid(1, 12)
}

/// `r = 1 - 2^{-t}` for `t = 0, 1/steps, ..., j_max`; starts at `r = 0`.
pub fn dense_r_grid(j_max: u32, steps_per_octave: u32) -> Vec<f64> {
    let n = j_max * steps_per_octave;
    (0..=n)
        .map(|i| 1.0 - 0.5_f64.powf(i as f64 / steps_per_octave as f64))
        .collect()
}

/// `M_p(r)` sampled along a radius grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub p: f64,
    pub subject: String,
    entries: Vec<(f64, f64)>,
}

impl RadialProfile {
    pub fn new(p: f64, subject: impl Into<String>, entries: Vec<(f64, f64)>) -> Result<Self> {
        check_exponent(p)?;
        if entries.is_empty() {
            return Err(HqrError::domain("radial profile needs at least one entry"));
        }
        for w in entries.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(HqrError::domain("radii must be strictly increasing"));
            }
        }
        for &(r, m) in &entries {
            if !(0.0..1.0).contains(&r) {
                return Err(HqrError::domain(format!("radius {r} outside [0, 1)")));
            }
            if !(m.is_finite() && m >= 0.0) {
                return Err(HqrError::domain(format!("mean {m} at r = {r} is not finite and nonnegative")));
            }
        }
        Ok(RadialProfile {
            p,
            subject: subject.into(),
            entries,
        })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn radii(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    /// Entries with `lo <= r <= hi` (relative slack `1e-12`).
    pub fn restrict(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .copied()
            .filter(|&(r, _)| r >= lo - 1e-12 && r <= hi + 1e-12)
            .collect()
    }

    /// `# p=`, `# subject=` comments, then `r,Mp` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# p={}", format_exponent(self.p))?;
        writeln!(out, "# subject={}", self.subject)?;
        writeln!(out, "r,Mp")?;
        for &(r, m) in &self.entries {
            writeln!(out, "{r:.16e},{m:.16e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut p = None;
        let mut subject = String::new();
        let mut entries = Vec::new();
        for line in input.lines() {
            let line = line?;
            let t = line.trim();
            if let Some(rest) = t.strip_prefix("# p=") {
                p = Some(parse_exponent(rest)?);
            } else if let Some(rest) = t.strip_prefix("# subject=") {
                subject = rest.to_string();
            } else if t.is_empty() || t.starts_with('#') || t == "r,Mp" {
                continue;
            } else {
                let (a, b) = t
                    .split_once(',')
                    .ok_or_else(|| HqrError::Parse(format!("bad profile row `{t}`")))?;
                let pf = |s: &str| s.trim().parse::<f64>().map_err(|e| HqrError::Parse(e.to_string()));
                entries.push((pf(a)?, pf(b)?));
            }
        }
        let p = p.ok_or_else(|| HqrError::Parse("missing `# p=` header".into()))?;
        Self::new(p, subject, entries)
    }
}

pub fn format_exponent(p: f64) -> String {
    if p == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

pub fn parse_exponent(s: &str) -> Result<f64> {
    let s = s.trim();
    let p = match s {
        "inf" | "infinity" | "Inf" => f64::INFINITY,
        _ => {
            if let Some((a, b)) = s.split_once('/') {
                let num: f64 = a.trim().parse().map_err(|_| HqrError::Parse(format!("bad exponent `{s}`")))?;
                let den: f64 = b.trim().parse().map_err(|_| HqrError::Parse(format!("bad exponent `{s}`")))?;
                num / den
            } else {
                s.parse().map_err(|_| HqrError::Parse(format!("bad exponent `{s}`")))?
            }
        }
    };
    check_exponent(p)?;
    Ok(p)
}

/// Sweeps [`integral_mean`] over the circles of `r_grid`.
pub fn radial_profile(
    subject: &(impl CircleSubject + ?Sized),
    p: f64,
    r_grid: &[f64],
    resolution: CircleResolution,
) -> Result<RadialProfile> {
    check_exponent(p)?;
    let entries = r_grid
        .par_iter()
        .map(|&r| {
            let m = match resolution {
                CircleResolution::Fixed(m) => m,
                CircleResolution::Auto => auto_circle_samples(subject.degree_hint(), r),
            };
            subject
                .sample_circle(r, m)
                .and_then(|w| integral_mean(&w, p))
                .map(|v| (r, v))
                .map_err(|e| HqrError::AtRadius { r, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    RadialProfile::new(p, subject.label(), entries)
}

/// Profiles for several exponents from one pass of circle samples.
pub fn radial_profiles(
    subject: &(impl CircleSubject + ?Sized),
    ps: &[f64],
    r_grid: &[f64],
    resolution: CircleResolution,
) -> Result<Vec<RadialProfile>> {
    for &p in ps {
        check_exponent(p)?;
    }
    let rows = r_grid
        .par_iter()
        .map(|&r| {
            let m = match resolution {
                CircleResolution::Fixed(m) => m,
                CircleResolution::Auto => auto_circle_samples(subject.degree_hint(), r),
            };
            let w = subject
                .sample_circle(r, m)
                .map_err(|e| HqrError::AtRadius { r, source: Box::new(e) })?;
            ps.iter().map(|&p| integral_mean(&w, p)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ps.iter()
        .enumerate()
        .map(|(i, &p)| {
            let entries = r_grid.iter().zip(&rows).map(|(&r, row)| (r, row[i])).collect();
            RadialProfile::new(p, subject.label(), entries)
        })
        .collect()
}

/// Result of [`hardy_norm_estimate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyEstimate {
    /// Supremum of the profile values.
    pub value: f64,
    /// False when some mean is smaller than an earlier one.
    pub monotone: bool,
    /// Largest relative drop below the running maximum.
    pub max_relative_drop: f64,
}

/// `sup_r M_p(r)`, with a flag for non-monotone profiles.
pub fn hardy_norm_estimate(profile: &RadialProfile) -> HardyEstimate {
    let mut running = 0.0_f64;
    let mut drop = 0.0_f64;
    for &(_, m) in profile.entries() {
        if running > 0.0 {
            drop = drop.max((running - m) / running);
        }
        running = running.max(m);
    }
    HardyEstimate {
        value: running,
        monotone: drop <= 1e-12,
        max_relative_drop: drop.max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn cayley(n: usize) -> AnalyticSeries {
        let mut c = vec![2.0; n + 1];
        c[0] = 1.0;
        AnalyticSeries::from_real(&c)
    }

    #[test]
    fn identity_has_constant_modulus() {
        let z = AnalyticSeries::identity();
        for &r in &[0.1, 0.5, 0.9] {
            let w = z.eval_on_circle(r, 256).unwrap();
            for p in [0.5, 1.0, 2.0, 3.7, f64::INFINITY] {
                assert_abs_diff_eq!(integral_mean(&w, p).unwrap(), r, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn parseval_two_terms() {
        let h = AnalyticSeries::from_real(&[1.0, 1.0]);
        for &r in &[0.2, 0.7, 0.99] {
            let w = h.eval_on_circle(r, 64).unwrap();
            assert_abs_diff_eq!(
                integral_mean(&w, 2.0).unwrap(),
                (1.0 + r * r).sqrt(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn half_mean_against_dense_oracle() {
        // M_{1/2}(1, 1 + z/2) by a 10^6-node midpoint oracle
        let n = 1_000_000;
        let oracle = ((0..n)
            .map(|j| {
                let t = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                Complex64::new(1.0 + 0.5 * t.cos(), 0.5 * t.sin()).norm().sqrt()
            })
            .sum::<f64>()
            / n as f64)
            .powi(2);
        let m = 8192;
        let w: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new(1.0, 0.0) + Complex64::from_polar(0.5, 2.0 * PI * j as f64 / m as f64))
            .collect();
        let v = integral_mean(&w, 0.5).unwrap();
        assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
    }

    #[test]
    fn nonpositive_exponent_is_rejected() {
        let w = vec![Complex64::new(1.0, 0.0); 4];
        assert!(integral_mean(&w, 0.0).is_err());
        assert!(integral_mean(&w, -1.0).is_err());
        assert!(integral_mean(&[], 1.0).is_err());
    }

    #[test]
    fn profile_of_identity() {
        let prof = radial_profile(
            &AnalyticSeries::identity(),
            1.0,
            &[0.1, 0.5, 0.9],
            CircleResolution::Fixed(64),
        )
        .unwrap();
        for &(r, m) in prof.entries() {
            assert_abs_diff_eq!(m, r, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(hardy_norm_estimate(&prof).value, 0.9, epsilon = 1e-14);
    }

    #[test]
    fn profile_of_pole_at_infinity_exponent() {
        let geo = AnalyticSeries::from_real(&vec![1.0; 1 << 18]);
        let prof = radial_profile(&geo, f64::INFINITY, &geometric_r_grid(1, 10), CircleResolution::Auto).unwrap();
        for &(r, m) in prof.entries() {
            let exact = 1.0 / (1.0 - r);
            assert!((m - exact).abs() / exact < 1e-9, "r = {r}");
        }
    }

    #[test]
    fn poisson_kernel_has_unit_mean() {
        let f = cayley(1 << 18);
        let u = PartOf::new(&f, Part::Re);
        let prof = radial_profile(&u, 1.0, &default_r_grid(), CircleResolution::Auto).unwrap();
        for &(_, m) in prof.entries() {
            assert!((m - 1.0).abs() < 1e-10, "{m}");
        }
        assert!((hardy_norm_estimate(&prof).value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pole_is_in_half_hardy_space() {
        let geo = AnalyticSeries::from_real(&vec![1.0; 1 << 18]);
        let a = radial_profile(&geo, 0.5, &geometric_r_grid(1, 10), CircleResolution::Auto).unwrap();
        let b = radial_profile(&geo, 0.5, &geometric_r_grid(1, 12), CircleResolution::Auto).unwrap();
        let na = hardy_norm_estimate(&a).value;
        let nb = hardy_norm_estimate(&b).value;
        assert!(((nb - na) / nb).abs() < 0.01, "{na} {nb}");
        assert!(hardy_norm_estimate(&b).monotone);
    }

    #[test]
    fn power_mean_inequality() {
        let f = cayley(4096);
        for &r in &[0.3, 0.9, 0.99] {
            let w = f.eval_on_circle(r, 1 << 15).unwrap();
            let ps = [0.25, 0.5, 1.0, 1.5, 2.0, 4.0, f64::INFINITY];
            let ms: Vec<f64> = ps.iter().map(|&p| integral_mean(&w, p).unwrap()).collect();
            assert!(ms.windows(2).all(|x| x[0] <= x[1] * (1.0 + 1e-12)), "{ms:?}");
        }
    }

    #[test]
    fn profile_validation() {
        assert!(RadialProfile::new(1.0, "x", vec![]).is_err());
        assert!(RadialProfile::new(1.0, "x", vec![(0.5, 1.0), (0.5, 2.0)]).is_err());
        assert!(RadialProfile::new(1.0, "x", vec![(1.0, 1.0)]).is_err());
        assert!(RadialProfile::new(1.0, "x", vec![(0.5, f64::NAN)]).is_err());
        assert!(RadialProfile::new(0.0, "x", vec![(0.5, 1.0)]).is_err());
    }

    #[test]
    fn hardy_flags_non_monotone_tail() {
        let prof = RadialProfile::new(0.5, "v", vec![(0.1, 1.0), (0.5, 2.0), (0.9, 1.5)]).unwrap();
        let est = hardy_norm_estimate(&prof);
        assert_eq!(est.value, 2.0);
        assert!(!est.monotone);
        assert_abs_diff_eq!(est.max_relative_drop, 0.25);
    }

    #[test]
    fn errors_carry_radius() {
        let err = radial_profile(
            &AnalyticSeries::identity(),
            1.0,
            &[0.5, 1.0],
            CircleResolution::Fixed(16),
        )
        .unwrap_err();
        assert!(matches!(err, HqrError::AtRadius { r, .. } if r == 1.0));
    }

    #[test]
    fn csv_roundtrip_and_exponent_parsing() {
        let prof = RadialProfile::new(f64::INFINITY, "cayley", vec![(0.5, 3.0), (0.75, 7.0)]).unwrap();
        let mut buf = Vec::new();
        prof.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# p=inf\n# subject=cayley\nr,Mp\n"));
        assert_eq!(RadialProfile::read_csv(buf.as_slice()).unwrap(), prof);
        assert_eq!(parse_exponent("1/2").unwrap(), 0.5);
        assert_eq!(parse_exponent("inf").unwrap(), f64::INFINITY);
        assert!(parse_exponent("-1").is_err());
    }

    #[test]
    fn auto_samples() {
        assert_eq!(auto_circle_samples(Some(10), 0.5), MIN_CIRCLE_SAMPLES);
        assert_eq!(auto_circle_samples(Some(1 << 18), 1.0 - 2f64.powi(-12)), 1 << 17);
        assert_eq!(auto_circle_samples(Some(4096), 1.0 - 2f64.powi(-12)), 1 << 15);
        assert_eq!(auto_circle_samples(None, 0.999_999_999), MAX_CIRCLE_SAMPLES);
    }
}
