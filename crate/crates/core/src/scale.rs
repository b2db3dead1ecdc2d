//! Two-time-scale self-similarity estimation and confidence-interval assembly.

use crate::block::{f_n_tilde, variance_tilde};
use crate::error::{Error, Result};
use crate::process::SeriesWindow;
use serde::Serialize;

/// H from Theorem 1: 1 - p(beta - 1/2) in the non-central regime
/// (p(2beta-1) < 1), 1/2 in the central regime (p(2beta-1) > 1).
pub fn theoretical_h(p: u32, beta: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::Config("power rank p must be >= 1".into()));
    }
    if !(beta > 0.5) {
        return Err(Error::Config(format!("beta must exceed 1/2, got {beta}")));
    }
    let gap = p as f64 * (2.0 * beta - 1.0);
    if gap < 1.0 {
        Ok(1.0 - p as f64 * (beta - 0.5))
    } else if gap > 1.0 {
        Ok(0.5)
    } else {
        Err(Error::UnsupportedBoundary { p, beta })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScaleEstimates {
    pub s_l_tilde: f64,
    pub s_2l_tilde: f64,
    pub h_hat: f64,
    pub c0_hat: f64,
    pub sigma_n_hat: f64,
    pub l: usize,
    pub n: usize,
}

impl ScaleEstimates {
    /// Assembles the derived quantities from the two raw scales.
    pub fn from_scales(s_l_tilde: f64, s_2l_tilde: f64, l: usize, n: usize) -> Result<Self> {
        if !(s_l_tilde > 0.0) || !(s_2l_tilde > 0.0) {
            return Err(Error::DegenerateScale(format!(
                "s~_l = {s_l_tilde}, s~_2l = {s_2l_tilde}"
            )));
        }
        let h_hat = (s_2l_tilde.ln() - s_l_tilde.ln()) / std::f64::consts::LN_2;
        let c0_hat = s_l_tilde / (l as f64).powf(h_hat);
        let sigma_n_hat = (n as f64).powf(h_hat) * c0_hat;
        Ok(Self {
            s_l_tilde,
            s_2l_tilde,
            h_hat,
            c0_hat,
            sigma_n_hat,
            l,
            n,
        })
    }
}

/// s~_l, s~_2l, H^, c0^, sigma^_n from one window. Needs a past block of at
/// least 2l-1 values so both scales use all n backward windows.
pub fn estimate_scales(y: &SeriesWindow, l: usize) -> Result<ScaleEstimates> {
    if 2 * l > y.n() {
        return Err(Error::SeriesTooShort {
            n: y.n(),
            need: 2 * l,
        });
    }
    let s_l = variance_tilde(y, l)?.sqrt();
    let s_2l = variance_tilde(y, 2 * l)?.sqrt();
    ScaleEstimates::from_scales(s_l, s_2l, l, y.n())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    TwoSided,
    /// [Ybar - q~_{1-alpha} sigma/n, +inf)
    UpperOneSided,
    /// (-inf, Ybar - q~_alpha sigma/n]
    LowerOneSided,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConfidenceInterval {
    pub kind: IntervalKind,
    /// nominal level 1 - alpha
    pub level: f64,
    /// None = unbounded below
    pub lo: Option<f64>,
    /// None = unbounded above
    pub hi: Option<f64>,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo.map_or(true, |lo| x >= lo) && self.hi.map_or(true, |hi| x <= hi)
    }
}

/// Shared interval assembly: endpoints Ybar - q~ * sigma / n per the recipe.
pub(crate) fn assemble_interval(
    ybar: f64,
    quantile: impl Fn(f64) -> Result<f64>,
    sigma: f64,
    n: usize,
    alpha: f64,
    kind: IntervalKind,
) -> Result<ConfidenceInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let endpoint = |a: f64| -> Result<f64> { Ok(ybar - quantile(a)? * sigma / n as f64) };
    let (lo, hi) = match kind {
        IntervalKind::TwoSided => (
            Some(endpoint(1.0 - alpha / 2.0)?),
            Some(endpoint(alpha / 2.0)?),
        ),
        IntervalKind::UpperOneSided => (Some(endpoint(1.0 - alpha)?), None),
        IntervalKind::LowerOneSided => (None, Some(endpoint(alpha)?)),
    };
    if let (Some(a), Some(b)) = (lo, hi) {
        debug_assert!(a <= b + 1e-12 * (1.0 + b.abs()));
    }
    Ok(ConfidenceInterval {
        kind,
        level: 1.0 - alpha,
        lo,
        hi,
    })
}

/// The H^-based confidence interval of §-style recipe: quantiles from F~_n,
/// scale sigma^_n from the two-time-scale estimate.
pub fn ci_mean(
    y: &SeriesWindow,
    l: usize,
    alpha: f64,
    kind: IntervalKind,
) -> Result<ConfidenceInterval> {
    let scales = estimate_scales(y, l)?;
    let (dist, _s_l) = f_n_tilde(y, l)?;
    assemble_interval(
        y.ybar(),
        |a| dist.quantile(a),
        scales.sigma_n_hat,
        y.n(),
        alpha,
        kind,
    )
}
