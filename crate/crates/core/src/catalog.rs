//! Named example families.
//!
//! Subjects are addressed by strings of the form `name:key=value,...`:
//!
//! ```text
//! power_singularity:beta=<x>
//! const_dilatation:k=<x>,h=<name>[,<params of h>]
//! cayley
//! abs_theta
//! holder:alpha=<x>
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::boundary::{schwarz_extension, BoundarySignal};
use crate::error::{HqrError, Result};
use crate::series::{AnalyticSeries, HarmonicMap};

/// Truncation degree for the singular families. At `r = 1 - 2^{-12}` the
/// tail `r^N` is `e^{-64}`.
pub const DEFAULT_N: usize = 1 << 18;
/// Boundary samples for the `|theta|^alpha` families, whose coefficients
/// decay only like `n^{-1-alpha}`.
pub const DEFAULT_M: usize = 1 << 16;

/// Coefficients of `(1 - z)^{-beta}` up to degree `n`.
pub fn make_power_singularity(beta: f64, n: usize) -> Result<AnalyticSeries> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(HqrError::domain(format!("beta must be positive, got {beta}")));
    }
    let mut c = Vec::with_capacity(n + 1);
    let mut cur = 1.0;
    for k in 0..=n {
        c.push(Complex64::new(cur, 0.0));
        cur *= (k as f64 + beta) / (k as f64 + 1.0);
    }
    Ok(AnalyticSeries::new(c))
}

/// Bound on the truncation tail of `(1 - z)^{-beta}` at `0 <= r < 1`.
///
/// The coefficient ratio `(n + beta) / (n + 1)` is monotone in `n`, so the
/// tail is dominated by a geometric series from the first omitted term.
pub fn power_singularity_tail(beta: f64, n: usize, r: f64) -> f64 {
    let mut c = 1.0;
    for k in 0..=n {
        c *= (k as f64 + beta) / (k as f64 + 1.0);
    }
    let first = c * r.powi(n as i32 + 1);
    let m = (n + 1) as f64;
    let q = r * ((m + beta) / (m + 1.0)).max(1.0);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    first / (1.0 - q)
}

/// `f = h + k conj(h - h(0))`, the map with constant dilatation `k`.
pub fn make_constant_dilatation_qr(h: &AnalyticSeries, k: f64) -> Result<HarmonicMap> {
    if !(k >= 0.0) {
        return Err(HqrError::domain(format!("dilatation must be nonnegative, got {k}")));
    }
    if k >= 1.0 {
        return Err(HqrError::NotQuasiregular { k_hat: k });
    }
    let g = h.with_constant(Complex64::new(0.0, 0.0)).scale(Complex64::new(k, 0.0));
    HarmonicMap::new(h.clone(), g)
}

/// `(1 + z) / (1 - z)` up to degree `n`.
pub fn make_cayley(n: usize) -> AnalyticSeries {
    let mut c = vec![Complex64::new(2.0, 0.0); n + 1];
    c[0] = Complex64::new(1.0, 0.0);
    AnalyticSeries::new(c)
}

/// `|theta|` on `(-pi, pi]`, sampled on `m` grid points.
pub fn make_abs_theta_boundary(m: usize) -> Result<BoundarySignal> {
    make_holder_boundary(1.0, m)
}

/// `|theta|^alpha` on `(-pi, pi]`, sampled on `m` grid points.
pub fn make_holder_boundary(alpha: f64, m: usize) -> Result<BoundarySignal> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(HqrError::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if m < 8 || !m.is_power_of_two() {
        return Err(HqrError::domain(format!("M must be a power of two >= 8, got {m}")));
    }
    // index distance to 0, so that j and m - j give identical values
    let values = (0..m)
        .map(|j| {
            let d = j.min(m - j) as f64;
            let t = 2.0 * PI * d / m as f64;
            if alpha == 1.0 {
                t
            } else {
                t.powf(alpha)
            }
        })
        .collect();
    BoundarySignal::from_real(values)
}

/// A constructed catalog member.
#[derive(Clone, Debug)]
pub enum Subject {
    Analytic(AnalyticSeries),
    Harmonic(HarmonicMap),
    Boundary(BoundarySignal),
}

impl Subject {
    /// Harmonic map view. Boundary signals are lifted by the Schwarz
    /// extension.
    pub fn to_harmonic(&self) -> Result<HarmonicMap> {
        Ok(match self {
            Subject::Analytic(s) => HarmonicMap::analytic(s.clone()),
            Subject::Harmonic(f) => f.clone(),
            Subject::Boundary(u) => HarmonicMap::analytic(schwarz_extension(u)?),
        })
    }

    /// Analytic series `h` (the analytic part for harmonic maps).
    pub fn analytic_part(&self) -> Result<AnalyticSeries> {
        Ok(match self {
            Subject::Analytic(s) => s.clone(),
            Subject::Harmonic(f) => f.h().clone(),
            Subject::Boundary(u) => schwarz_extension(u)?,
        })
    }
}

/// A parsed subject address.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    /// Truncation degree for series families.
    pub n: usize,
    /// Boundary samples for boundary families.
    pub m: usize,
}

const NAMES: [&str; 5] = ["power_singularity", "const_dilatation", "cayley", "abs_theta", "holder"];

impl ExampleSpec {
    pub fn with_resolution(mut self, n: Option<usize>, m: Option<usize>) -> Self {
        if let Some(n) = n {
            self.n = n;
        }
        if let Some(m) = m {
            self.m = m;
        }
        self
    }

    fn real(&self, key: &str) -> Result<f64> {
        let s = self
            .params
            .get(key)
            .ok_or_else(|| HqrError::Parse(format!("`{}` needs parameter `{key}`", self.name)))?;
        s.parse::<f64>()
            .map_err(|_| HqrError::Parse(format!("parameter `{key}` is not a number: `{s}`")))
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(HqrError::Parse(format!(
                "`{}` does not take parameter `{k}`",
                self.name
            ))),
            None => Ok(()),
        }
    }

    pub fn build(&self) -> Result<Subject> {
        match self.name.as_str() {
            "power_singularity" => {
                self.allow(&["beta"])?;
                Ok(Subject::Analytic(make_power_singularity(self.real("beta")?, self.n)?))
            }
            "cayley" => {
                self.allow(&[])?;
                Ok(Subject::Analytic(make_cayley(self.n)))
            }
            "abs_theta" => {
                self.allow(&[])?;
                Ok(Subject::Boundary(make_abs_theta_boundary(self.m)?))
            }
            "holder" => {
                self.allow(&["alpha"])?;
                Ok(Subject::Boundary(make_holder_boundary(self.real("alpha")?, self.m)?))
            }
            "const_dilatation" => {
                let k = self.real("k")?;
                let inner_name = self
                    .params
                    .get("h")
                    .ok_or_else(|| HqrError::Parse("`const_dilatation` needs parameter `h`".into()))?;
                if inner_name == "const_dilatation" {
                    return Err(HqrError::Parse("`h` must name an analytic or boundary family".into()));
                }
                let mut inner = self.clone();
                inner.name = inner_name.clone();
                inner.params.remove("k");
                inner.params.remove("h");
                let h = inner.build()?.analytic_part()?;
                Ok(Subject::Harmonic(make_constant_dilatation_qr(&h, k)?))
            }
            other => Err(HqrError::Parse(format!("unknown catalog name `{other}`"))),
        }
    }
}

impl FromStr for ExampleSpec {
    type Err = HqrError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b)),
            None => (s.trim(), None),
        };
        if !NAMES.contains(&name) {
            return Err(HqrError::Parse(format!("unknown catalog name `{name}`")));
        }
        let mut params = BTreeMap::new();
        for kv in rest.into_iter().flat_map(|r| r.split(',')).filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| HqrError::Parse(format!("expected key=value, got `{kv}`")))?;
            if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(HqrError::Parse(format!("parameter `{}` given twice", k.trim())));
            }
        }
        Ok(ExampleSpec {
            name: name.to_string(),
            params,
            n: DEFAULT_N,
            m: DEFAULT_M,
        })
    }
}

impl fmt::Display for ExampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        let mut sep = ':';
        for (k, v) in &self.params {
            write!(f, "{sep}{k}={v}")?;
            sep = ',';
        }
        Ok(())
    }
}

/// One line per registered family.
pub fn catalog_listing() -> String {
    [
        "power_singularity:beta=<x>          analytic (1 - z)^(-beta), beta > 0, degree N",
        "const_dilatation:k=<x>,h=<name>     harmonic h + k conj(h - h(0)), 0 <= k < 1, h any other family with its parameters",
        "cayley                              analytic (1 + z) / (1 - z), degree N",
        "abs_theta                           boundary |theta| on (-pi, pi], M samples",
        "holder:alpha=<x>                    boundary |theta|^alpha, 0 < alpha <= 1, M samples",
    ]
    .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{conjugate_signal, modulus_of_continuity};
    use crate::analysis::fit_holder_exponent;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn power_singularity_integer_cases() {
        let s = make_power_singularity(1.0, 50).unwrap();
        assert!(s.coeffs().iter().all(|&x| x == c(1.0)));
        let s = make_power_singularity(2.0, 50).unwrap();
        for (n, &x) in s.coeffs().iter().enumerate() {
            assert_abs_diff_eq!(x.re, n as f64 + 1.0, epsilon = 1e-12);
        }
        assert!(make_power_singularity(0.0, 4).is_err());
    }

    #[test]
    fn power_singularity_half_at_099() {
        let s = make_power_singularity(0.5, 4096).unwrap();
        let v = s.eval(c(0.99)).unwrap();
        assert!((v.re - 10.0).abs() < 1e-3);
        assert!(10.0 - v.re <= power_singularity_tail(0.5, 4096, 0.99) + 1e-12);
    }

    #[test]
    fn power_singularity_tail_brackets_closed_form() {
        for &beta in &[0.5, 1.0, 1.5, 3.0] {
            let s = make_power_singularity(beta, 2000).unwrap();
            for &r in &[0.5_f64, 0.9, 0.995] {
                let exact = (1.0 - r).powf(-beta);
                let gap = exact - s.eval(c(r)).unwrap().re;
                let bound = power_singularity_tail(beta, 2000, r);
                assert!(gap >= -1e-9 * exact && gap <= bound * (1.0 + 1e-9) + 1e-9 * exact);
            }
        }
    }

    #[test]
    fn constant_dilatation_properties() {
        let h = make_power_singularity(1.0, 256).unwrap();
        let f0 = make_constant_dilatation_qr(&h, 0.0).unwrap();
        assert!(f0.g().coeffs().iter().all(|x| x.norm() == 0.0));

        let f = make_constant_dilatation_qr(&h, 0.5).unwrap();
        let rep = f.qr_constants(&[0.3, 0.6, 0.9], 256).unwrap();
        assert_abs_diff_eq!(rep.k_hat, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.big_k_hat, 3.0, epsilon = 1e-10);

        let z = Complex64::from_polar(0.7, 1.1);
        assert_abs_diff_eq!(f.eval(z).unwrap().im, 0.5 * h.eval(z).unwrap().im, epsilon = 1e-12);

        assert!(matches!(
            make_constant_dilatation_qr(&h, 1.0),
            Err(HqrError::NotQuasiregular { .. })
        ));
    }

    #[test]
    fn cayley_coefficients_and_mean_value() {
        let s = make_cayley(16);
        assert_eq!(s.coeff(0), c(1.0));
        assert!(s.coeffs()[1..].iter().all(|&x| x == c(2.0)));
        assert_eq!(s.eval(c(0.0)).unwrap(), c(1.0));
    }

    #[test]
    fn abs_theta_grid_values() {
        let m = 1024;
        let u = make_abs_theta_boundary(m).unwrap();
        let v = u.real_values().unwrap();
        assert_eq!(v[0], 0.0);
        assert_abs_diff_eq!(v[m / 2], PI, epsilon = 1e-15);
        for j in 1..m {
            assert_eq!(v[j], v[m - j]);
        }
        let w = modulus_of_continuity(&u, &[0.01, 0.1, 1.0]).unwrap();
        for (d, om) in w {
            let d_grid = (d * m as f64 / (2.0 * PI)).round() * 2.0 * PI / m as f64;
            assert_abs_diff_eq!(om, d_grid, epsilon = 1e-12);
        }
    }

    #[test]
    fn holder_boundary_cases() {
        let m = 1 << 14;
        assert_eq!(make_holder_boundary(1.0, m).unwrap(), make_abs_theta_boundary(m).unwrap());
        let u = make_holder_boundary(0.5, m).unwrap();
        let w = modulus_of_continuity(&u, &[0.04]).unwrap();
        assert!((w[0].1 - 0.2).abs() < 5e-3, "{}", w[0].1);

        let ds: Vec<f64> = (0..9).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect();
        let u = make_holder_boundary(0.8, m).unwrap();
        let fit = fit_holder_exponent(&modulus_of_continuity(&u, &ds).unwrap(), false).unwrap();
        assert!((fit.exponent_hat - 0.8).abs() < 0.02, "{}", fit.exponent_hat);

        assert!(make_holder_boundary(0.0, m).is_err());
        assert!(make_holder_boundary(1.5, m).is_err());
    }

    #[test]
    fn boundary_conjugates_have_zero_mean() {
        for a in [0.3, 0.5, 1.0] {
            let u = make_holder_boundary(a, 4096).unwrap();
            assert!(u.is_real());
            let v = conjugate_signal(&u).unwrap();
            assert!(v.mean().norm() < 1e-12);
        }
    }

    #[test]
    fn spec_parsing_and_building() {
        let s: ExampleSpec = "power_singularity:beta=1.5".parse().unwrap();
        assert_eq!(s.name, "power_singularity");
        assert_eq!(s.to_string(), "power_singularity:beta=1.5");
        let s = s.with_resolution(Some(64), None);
        match s.build().unwrap() {
            Subject::Analytic(a) => assert_eq!(a.degree(), 64),
            _ => panic!("expected analytic"),
        }

        let q: ExampleSpec = "const_dilatation:k=0.5,h=power_singularity,beta=1".parse().unwrap();
        match q.with_resolution(Some(32), None).build().unwrap() {
            Subject::Harmonic(f) => assert_eq!(f.g().coeff(1), c(0.5)),
            _ => panic!("expected harmonic"),
        }
        let q: ExampleSpec = "const_dilatation:k=0.2,h=abs_theta".parse().unwrap();
        assert!(matches!(
            q.with_resolution(None, Some(256)).build().unwrap(),
            Subject::Harmonic(_)
        ));

        for bad in [
            "nope",
            "cayley:beta=1",
            "power_singularity",
            "power_singularity:beta",
            "power_singularity:beta=x",
            "holder:alpha=2",
            "const_dilatation:k=1,h=cayley",
            "const_dilatation:k=0.5,h=const_dilatation",
        ] {
            let r = bad.parse::<ExampleSpec>().and_then(|s| s.with_resolution(Some(8), Some(64)).build());
            assert!(r.is_err(), "{bad}");
        }
    }

    #[test]
    fn catalog_series_at_origin() {
        for name in ["power_singularity:beta=0.5", "cayley", "const_dilatation:k=0.5,h=cayley"] {
            let f = name.parse::<ExampleSpec>().unwrap().with_resolution(Some(128), None);
            let h = f.build().unwrap().to_harmonic().unwrap();
            assert_eq!(h.eval(c(0.0)).unwrap(), h.h().coeff(0));
        }
    }

    #[test]
    fn listing_has_one_line_per_name() {
        let l = catalog_listing();
        assert_eq!(l.lines().count(), NAMES.len());
        for n in NAMES {
            assert!(l.lines().any(|x| x.starts_with(n)));
        }
    }
}
