//! Exponent fits and inequality checks on radial profiles and moduli of
//! continuity.
//!
//! All fits are ordinary least squares. The reported `stderr` is the slope's
//! standard error under homoscedastic residuals (zero when only the minimum
//! number of points is available and they are collinear).

use serde::{Deserialize, Serialize};

use crate::boundary::{schwarz_extension, BoundarySignal};
use crate::error::{HqrError, Result};
use crate::means::{radial_profile, CircleResolution, RadialProfile};

/// Slope standard error above which a fit is considered unconverged.
pub const CONVERGED_STDERR: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `log M` against `log 1/(1-r)`.
    PowerGrowth,
    /// `M^p` against `log 1/(1-r)`.
    LogPower,
    /// `log omega` against `log delta`.
    Holder,
    /// `omega / delta` against `log 1/delta`.
    HolderLog,
}

/// Outcome of one regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FitModel,
    pub exponent_hat: f64,
    pub intercept_hat: f64,
    pub stderr: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub residual_max: f64,
    /// Set when the data were degenerate (constant signal) and the exponent
    /// was assigned by convention.
    #[serde(skip)]
    pub degenerate: bool,
}

/// Supremum of a ratio of two profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub sup_ratio: f64,
    pub argmax_r: f64,
    pub left_label: String,
    pub right_label: String,
}

/// Closed radius window `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusWindow {
    pub lo: f64,
    pub hi: f64,
}

impl RadiusWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        RadiusWindow { lo, hi }
    }

    /// Radii `1 - 2^{-j}` for `j_lo <= j <= j_hi`.
    pub fn from_j(j_lo: u32, j_hi: u32) -> Self {
        RadiusWindow {
            lo: 1.0 - 0.5_f64.powi(j_lo as i32),
            hi: 1.0 - 0.5_f64.powi(j_hi as i32),
        }
    }

    /// Default fit window `j = 3..=12`.
    pub fn default_growth() -> Self {
        Self::from_j(3, 12)
    }

    /// Splits a `j`-window into a lower and an upper half.
    pub fn halves_j(j_lo: u32, j_hi: u32) -> (Self, Self) {
        let mid = (j_lo + j_hi) / 2;
        (Self::from_j(j_lo, mid), Self::from_j(mid + 1, j_hi))
    }
}

struct Ols {
    slope: f64,
    intercept: f64,
    stderr: f64,
    residual_max: f64,
}

fn ols(x: &[f64], y: &[f64]) -> Result<Ols> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return Err(HqrError::Fit("regression needs at least two points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return Err(HqrError::Fit("regressor has zero spread".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    let sse: f64 = resid.iter().map(|e| e * e).sum();
    let stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(Ols {
        slope,
        intercept,
        stderr,
        residual_max: resid.iter().map(|e| e.abs()).fold(0.0, f64::max),
    })
}

fn windowed(profile: &RadialProfile, window: RadiusWindow) -> Result<(Vec<(f64, f64)>, f64, f64)> {
    let pts = profile.restrict(window.lo, window.hi);
    if pts.len() < 4 {
        return Err(HqrError::Fit(format!(
            "window [{}, {}] holds {} points, need at least 4",
            window.lo,
            window.hi,
            pts.len()
        )));
    }
    let lo = pts[0].0;
    let hi = pts[pts.len() - 1].0;
    Ok((pts, lo, hi))
}

fn log_inv_gap(r: f64) -> f64 {
    -(1.0 - r).ln()
}

/// Growth order `beta` in `M_p(r) = O((1 - r)^{-beta})`: least-squares slope
/// of `log M_p` against `log 1/(1 - r)` over the window.
pub fn fit_growth_exponent(profile: &RadialProfile, window: RadiusWindow) -> Result<FitReport> {
    let (pts, lo, hi) = windowed(profile, window)?;
    if let Some(&(r, _)) = pts.iter().find(|&&(_, m)| !(m > 0.0)) {
        return Err(HqrError::Fit(format!("nonpositive mean at r = {r}")));
    }
    let x: Vec<f64> = pts.iter().map(|&(r, _)| log_inv_gap(r)).collect();
    let y: Vec<f64> = pts.iter().map(|&(_, m)| m.ln()).collect();
    let fit = ols(&x, &y)?;
    Ok(FitReport {
        model: FitModel::PowerGrowth,
        exponent_hat: fit.slope,
        intercept_hat: fit.intercept,
        stderr: fit.stderr,
        window_lo: lo,
        window_hi: hi,
        residual_max: fit.residual_max,
        degenerate: false,
    })
}

/// Slope `c` in `M_p^p ~ c log 1/(1 - r) + b`, the logarithmic growth model.
pub fn fit_log_power(profile: &RadialProfile, window: RadiusWindow) -> Result<FitReport> {
    let p = profile.p;
    if !p.is_finite() {
        return Err(HqrError::domain("log-power model needs a finite exponent"));
    }
    let (pts, lo, hi) = windowed(profile, window)?;
    if let Some(&(r, _)) = pts.iter().find(|&&(_, m)| !(m > 0.0)) {
        return Err(HqrError::Fit(format!("nonpositive mean at r = {r}")));
    }
    let x: Vec<f64> = pts.iter().map(|&(r, _)| log_inv_gap(r)).collect();
    let y: Vec<f64> = pts.iter().map(|&(_, m)| m.powf(p)).collect();
    let fit = ols(&x, &y)?;
    Ok(FitReport {
        model: FitModel::LogPower,
        exponent_hat: fit.slope,
        intercept_hat: fit.intercept,
        stderr: fit.stderr,
        window_lo: lo,
        window_hi: hi,
        residual_max: fit.residual_max,
        degenerate: false,
    })
}

/// `sup_r M_p(r, v) / M_p(r, u)` over a shared grid.
pub fn riesz_ratio(u: &RadialProfile, v: &RadialProfile) -> Result<RatioReport> {
    if u.p != v.p {
        return Err(HqrError::Pairing(format!("exponents differ: {} vs {}", u.p, v.p)));
    }
    if u.entries().len() != v.entries().len()
        || u.entries().iter().zip(v.entries()).any(|(a, b)| a.0 != b.0)
    {
        return Err(HqrError::Pairing("radius grids differ".into()));
    }
    let mut best = (0.0_f64, u.entries()[0].0);
    for (&(r, mu), &(_, mv)) in u.entries().iter().zip(v.entries()) {
        if !(mu > 0.0) {
            return Err(HqrError::domain(format!("denominator mean vanishes at r = {r}")));
        }
        let q = mv / mu;
        if q > best.0 {
            best = (q, r);
        }
    }
    Ok(RatioReport {
        sup_ratio: best.0,
        argmax_r: best.1,
        left_label: v.subject.clone(),
        right_label: u.subject.clone(),
    })
}

/// Exponent gap between a derivative profile and its base profile.
pub fn hl_derivative_check(base: &FitReport, deriv: &FitReport) -> Result<f64> {
    for (which, f) in [("base", base), ("derivative", deriv)] {
        if !(f.stderr < CONVERGED_STDERR) {
            return Err(HqrError::Unconverged {
                which: which.into(),
                stderr: f.stderr,
            });
        }
    }
    Ok(deriv.exponent_hat - base.exponent_hat)
}

/// `fp_norm / int_0^{r_max} (1 - r)^{p-1} M_p^p(r, h') dr`.
///
/// `fp_norm` is `||f||_p^p`. On each subinterval the weight `(1 - r)^{p-1}`
/// is integrated exactly against the average of the endpoint values of
/// `M_p^p`, which keeps the singular weight at `r = 1` under control.
pub fn lemma_dk3_functional(hprime: &RadialProfile, fp_norm: f64) -> Result<f64> {
    let p = hprime.p;
    if !(p > 0.0 && p < 1.0) {
        return Err(HqrError::domain(format!("functional needs 0 < p < 1, got {p}")));
    }
    let e = hprime.entries();
    if e.len() < 2 {
        return Err(HqrError::domain("functional needs at least two radii"));
    }
    let integral: f64 = e
        .windows(2)
        .map(|w| {
            let (r0, m0) = w[0];
            let (r1, m1) = w[1];
            let weight = ((1.0 - r0).powf(p) - (1.0 - r1).powf(p)) / p;
            0.5 * (m0.powf(p) + m1.powf(p)) * weight
        })
        .sum();
    if !(integral > 0.0) {
        return Err(HqrError::domain("functional integral vanishes"));
    }
    Ok(fp_norm / integral)
}

/// Fits a Hölder exponent to sampled moduli of continuity.
///
/// The plain model regresses `log omega` on `log delta`. With
/// `log_correction`, `omega / delta` is regressed on `log 1/delta`; a positive
/// slope indicates a `delta log(1/delta)` modulus.
pub fn fit_holder_exponent(moduli: &[(f64, f64)], log_correction: bool) -> Result<FitReport> {
    if moduli.len() < 4 {
        return Err(HqrError::Fit(format!(
            "need at least 4 gaps, got {}",
            moduli.len()
        )));
    }
    let dmin = moduli.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
    let dmax = moduli.iter().map(|m| m.0).fold(0.0, f64::max);
    if !(dmin > 0.0) || dmax / dmin < 100.0 * (1.0 - 1e-9) {
        return Err(HqrError::Fit(format!(
            "gaps must span two decades, got [{dmin}, {dmax}]"
        )));
    }
    let zeros = moduli.iter().filter(|m| m.1 == 0.0).count();
    if zeros == moduli.len() {
        if log_correction {
            return Err(HqrError::domain("constant signal has no logarithmic modulus"));
        }
        return Ok(FitReport {
            model: FitModel::Holder,
            exponent_hat: 1.0,
            intercept_hat: f64::NEG_INFINITY,
            stderr: 0.0,
            window_lo: dmin,
            window_hi: dmax,
            residual_max: 0.0,
            degenerate: true,
        });
    }
    if zeros > 0 || moduli.iter().any(|m| !(m.1 >= 0.0)) {
        return Err(HqrError::Fit("moduli must all be positive".into()));
    }
    let (model, x, y): (FitModel, Vec<f64>, Vec<f64>) = if log_correction {
        (
            FitModel::HolderLog,
            moduli.iter().map(|m| -m.0.ln()).collect(),
            moduli.iter().map(|m| m.1 / m.0).collect(),
        )
    } else {
        (
            FitModel::Holder,
            moduli.iter().map(|m| m.0.ln()).collect(),
            moduli.iter().map(|m| m.1.ln()).collect(),
        )
    };
    let fit = ols(&x, &y)?;
    Ok(FitReport {
        model,
        exponent_hat: fit.slope,
        intercept_hat: fit.intercept,
        stderr: fit.stderr,
        window_lo: dmin,
        window_hi: dmax,
        residual_max: fit.residual_max,
        degenerate: false,
    })
}

/// Growth exponent of `M_inf(r, F')` for the Schwarz extension `F` of `u`.
///
/// For `u` in the Hölder class of order `alpha_claim < 1` the expected
/// exponent is `1 - alpha_claim`.
pub fn holder_derivative_check(
    u: &BoundarySignal,
    alpha_claim: f64,
    r_grid: &[f64],
    window: RadiusWindow,
) -> Result<FitReport> {
    if !(alpha_claim > 0.0 && alpha_claim < 1.0) {
        return Err(HqrError::domain(format!(
            "claimed Hölder exponent must lie in (0, 1), got {alpha_claim}"
        )));
    }
    let fprime = schwarz_extension(u)?.derivative();
    let profile = radial_profile(&fprime, f64::INFINITY, r_grid, CircleResolution::Auto)?;
    fit_growth_exponent(&profile, window)
}

/// Full-window fit plus the two half-window fits used to reject transients.
#[derive(Clone, Debug, PartialEq)]
pub struct StableFit {
    pub full: FitReport,
    pub lower: FitReport,
    pub upper: FitReport,
}

impl StableFit {
    /// Half-window estimates agree within `2 * tol`.
    pub fn is_stable(&self, tol: f64) -> bool {
        (self.lower.exponent_hat - self.upper.exponent_hat).abs() <= 2.0 * tol
    }

    /// Full estimate within `tol` of `target` and stable.
    pub fn confirms(&self, target: f64, tol: f64) -> bool {
        (self.full.exponent_hat - target).abs() <= tol && self.is_stable(tol)
    }
}

/// Growth fit on `j_lo..=j_hi` and on both halves of that range.
pub fn stable_growth_fit(profile: &RadialProfile, j_lo: u32, j_hi: u32) -> Result<StableFit> {
    let (a, b) = RadiusWindow::halves_j(j_lo, j_hi);
    Ok(StableFit {
        full: fit_growth_exponent(profile, RadiusWindow::from_j(j_lo, j_hi))?,
        lower: fit_growth_exponent(profile, a)?,
        upper: fit_growth_exponent(profile, b)?,
    })
}

/// Log-power fit on `j_lo..=j_hi` and on both halves.
pub fn stable_log_power_fit(profile: &RadialProfile, j_lo: u32, j_hi: u32) -> Result<StableFit> {
    let (a, b) = RadiusWindow::halves_j(j_lo, j_hi);
    Ok(StableFit {
        full: fit_log_power(profile, RadiusWindow::from_j(j_lo, j_hi))?,
        lower: fit_log_power(profile, a)?,
        upper: fit_log_power(profile, b)?,
    })
}
