//! Overlapping block sums, the sampling distributions F_n / F~_n, and the
//! two variance estimators s^_l^2 (known mean) and s~_l^2 (centered).

use crate::empirical::EmpiricalDist;
use crate::error::{Error, Result};
use crate::process::SeriesWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockConvention {
    /// B_{i,l} = Y_i + ... + Y_{i-l+1} for i = 1..n; needs l-1 past values.
    BackwardWithPast,
    /// sum_{j=i}^{i+l-1} Y_j for i = 1..n-l+1; observed values only.
    ForwardInterior,
}

fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0.0);
    for &v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// Window sums in index order.
pub fn block_sums(y: &SeriesWindow, l: usize, conv: BlockConvention) -> Result<Vec<f64>> {
    if l == 0 {
        return Err(Error::Config("block length l must be >= 1".into()));
    }
    match conv {
        BlockConvention::BackwardWithPast => {
            if y.past_len() + 1 < l {
                return Err(Error::InsufficientPast {
                    need: l - 1,
                    have: y.past_len(),
                });
            }
            let p = prefix_sums(y.all());
            let past = y.past_len();
            Ok((1..=y.n()).map(|i| p[past + i] - p[past + i - l]).collect())
        }
        BlockConvention::ForwardInterior => forward_sums(y.observed(), l),
    }
}

/// Forward window sums over a raw slice.
pub fn forward_sums(y: &[f64], l: usize) -> Result<Vec<f64>> {
    if l == 0 {
        return Err(Error::Config("block length l must be >= 1".into()));
    }
    if y.len() < l {
        return Err(Error::SeriesTooShort { n: y.len(), need: l });
    }
    let p = prefix_sums(y);
    Ok((0..=y.len() - l).map(|i| p[i + l] - p[i]).collect())
}

/// F_n: the empirical distribution of B_{i,l}/s_l, i = 1..n (backward).
pub fn f_n(y: &SeriesWindow, l: usize, s_l: f64) -> Result<EmpiricalDist> {
    if !(s_l > 0.0) {
        return Err(Error::DegenerateScale(format!("s_l = {s_l}")));
    }
    let sums = block_sums(y, l, BlockConvention::BackwardWithPast)?;
    EmpiricalDist::new(sums.into_iter().map(|b| b / s_l).collect())
}

/// F~_n: blocks centered by l*Ybar_n and scaled by s~_l. Returns the
/// distribution together with s~_l.
pub fn f_n_tilde(y: &SeriesWindow, l: usize) -> Result<(EmpiricalDist, f64)> {
    if y.n() < 2 {
        return Err(Error::SeriesTooShort { n: y.n(), need: 2 });
    }
    let sums = block_sums(y, l, BlockConvention::BackwardWithPast)?;
    let ybar = y.ybar();
    let centered: Vec<f64> = sums.iter().map(|b| b - l as f64 * ybar).collect();
    let s2 = centered.iter().map(|c| c * c).sum::<f64>() / y.n() as f64;
    if !(s2 > 0.0) {
        return Err(Error::DegenerateScale(
            "all centered block sums vanish (constant series?)".into(),
        ));
    }
    let s = s2.sqrt();
    let dist = EmpiricalDist::new(centered.into_iter().map(|c| c / s).collect())?;
    Ok((dist, s))
}

/// F~_n under the data-only forward convention: n-l+1 interior windows,
/// centered by l*Ybar and scaled by their root mean square.
pub fn f_n_tilde_forward(y: &[f64], l: usize) -> Result<(EmpiricalDist, f64)> {
    let sums = forward_sums(y, l)?;
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let centered: Vec<f64> = sums.iter().map(|b| b - l as f64 * ybar).collect();
    let s2 = centered.iter().map(|c| c * c).sum::<f64>() / centered.len() as f64;
    if !(s2 > 0.0) {
        return Err(Error::DegenerateScale(
            "all centered block sums vanish (constant series?)".into(),
        ));
    }
    let s = s2.sqrt();
    let dist = EmpiricalDist::new(centered.into_iter().map(|c| c / s).collect())?;
    Ok((dist, s))
}

/// s^_l^2 = (1/n) sum B_{i,l}^2 — unbiased for Var(S_l) when mu = 0
/// (the caller asserts the known mean).
pub fn variance_hat(y: &SeriesWindow, l: usize) -> Result<f64> {
    let sums = block_sums(y, l, BlockConvention::BackwardWithPast)?;
    Ok(sums.iter().map(|b| b * b).sum::<f64>() / y.n() as f64)
}

/// s~_l^2 = (1/n) sum (B_{i,l} - l*Ybar_n)^2 (backward windows with past).
pub fn variance_tilde(y: &SeriesWindow, l: usize) -> Result<f64> {
    let sums = block_sums(y, l, BlockConvention::BackwardWithPast)?;
    let ybar = y.ybar();
    Ok(sums
        .iter()
        .map(|b| {
            let c = b - l as f64 * ybar;
            c * c
        })
        .sum::<f64>()
        / y.n() as f64)
}

/// Forward-window centered variance over a raw slice, divisor n-l+1
/// (the data-only convention; no past block required).
pub fn variance_tilde_forward(y: &[f64], l: usize) -> Result<f64> {
    let sums = forward_sums(y, l)?;
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let m = sums.len() as f64;
    Ok(sums
        .iter()
        .map(|b| {
            let c = b - l as f64 * ybar;
            c * c
        })
        .sum::<f64>()
        / m)
}
