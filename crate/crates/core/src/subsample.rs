//! Subsampling-based inference that avoids estimating H: auxiliary scales
//! (n1, l1) with l1/n1 ~ l/n, locally studentized block sums F~*_l, and the
//! derived confidence intervals.

use crate::block::{forward_sums, variance_tilde, variance_tilde_forward};
use crate::empirical::EmpiricalDist;
use crate::error::{Error, Result};
use crate::process::SeriesWindow;
use crate::scale::{assemble_interval, ConfidenceInterval, IntervalKind};
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SubsampleScales {
    pub n: usize,
    pub l: usize,
    pub n1: usize,
    pub l1: usize,
    /// |l1/n1 - l/n|
    pub ratio_error: f64,
}

/// n1 = floor(n^0.9), l1 = max(2, floor(l * n1 / n)).
pub fn choose_scales(n: usize, l: usize) -> Result<SubsampleScales> {
    if l == 0 || l >= n {
        return Err(Error::Config(format!(
            "need 1 <= l < n, got l = {l}, n = {n}"
        )));
    }
    let n1 = (n as f64).powf(0.9).floor() as usize;
    let l1 = ((l * n1) / n).max(2);
    if l1 >= n1 {
        return Err(Error::Config(format!(
            "degenerate subsample scales: l1 = {l1} >= n1 = {n1}"
        )));
    }
    let ratio_error = (l1 as f64 / n1 as f64 - l as f64 / n as f64).abs();
    Ok(SubsampleScales {
        n,
        l,
        n1,
        l1,
        ratio_error,
    })
}

/// s~^2_{l1,i} = (1/(l-l1+1)) sum_{j=1}^{l-l1+1}
///   (Y_{i+j-1} + ... + Y_{i+j+l1-2} - l1*ybar)^2,
/// the centered local variance over window [i, i+l-1] (i is 1-based).
pub fn local_variance(y: &[f64], i: usize, l: usize, l1: usize, ybar: f64) -> Result<f64> {
    if i == 0 || i + l - 1 > y.len() {
        return Err(Error::Config(format!(
            "window [{i}, {}] outside observed range 1..={}",
            i + l - 1,
            y.len()
        )));
    }
    if l1 > l {
        return Err(Error::Config(format!("l1 = {l1} exceeds l = {l}")));
    }
    let window = &y[i - 1..i + l - 1];
    let sums = forward_sums(window, l1)?;
    let m = (l - l1 + 1) as f64;
    Ok(sums
        .iter()
        .map(|s| {
            let c = s - l1 as f64 * ybar;
            c * c
        })
        .sum::<f64>()
        / m)
}

/// F~*_l: empirical distribution of
/// (sum_{j=i}^{i+l-1} Y_j - l*ybar) / s~_{l1,i}, i = 1..n-l+1.
/// Normalized over the n-l+1 windows that exist (proper CDF).
pub fn f_l_star(y: &[f64], scales: &SubsampleScales) -> Result<EmpiricalDist> {
    let (l, l1) = (scales.l, scales.l1);
    let n = y.len();
    if n < l {
        return Err(Error::SeriesTooShort { n, need: l });
    }
    let ybar = y.iter().sum::<f64>() / n as f64;
    let big = forward_sums(y, l)?;
    let small = forward_sums(y, l1)?;
    // rolling sums of the centered-squared l1-window terms
    let sq: Vec<f64> = small
        .iter()
        .map(|s| {
            let c = s - l1 as f64 * ybar;
            c * c
        })
        .collect();
    let mut prefix = Vec::with_capacity(sq.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for v in &sq {
        acc += v;
        prefix.push(acc);
    }
    let m = l - l1 + 1;
    let mut atoms = Vec::with_capacity(big.len());
    for (idx, b) in big.iter().enumerate() {
        let s2 = (prefix[idx + m] - prefix[idx]) / m as f64;
        if !(s2 > 0.0) {
            return Err(Error::DegenerateScale(format!(
                "local variance vanished at window i = {}",
                idx + 1
            )));
        }
        atoms.push((b - l as f64 * ybar) / s2.sqrt());
    }
    EmpiricalDist::new(atoms)
}

/// Subsampling confidence interval: quantiles from F~*_l, scale s~_{n1}.
/// When the window carries at least n1-1 past values s~_{n1} uses backward
/// windows; otherwise the data-only forward convention.
pub fn ci_mean_subsample(
    y: &SeriesWindow,
    scales: &SubsampleScales,
    alpha: f64,
    kind: IntervalKind,
) -> Result<ConfidenceInterval> {
    let dist = f_l_star(y.observed(), scales)?;
    let s_n1_sq = if y.past_len() + 1 >= scales.n1 {
        variance_tilde(y, scales.n1)?
    } else {
        variance_tilde_forward(y.observed(), scales.n1)?
    };
    if !(s_n1_sq > 0.0) {
        return Err(Error::DegenerateScale("s~_{n1} = 0".into()));
    }
    assemble_interval(
        y.ybar(),
        |a| dist.quantile(a),
        s_n1_sq.sqrt(),
        y.n(),
        alpha,
        kind,
    )
}
