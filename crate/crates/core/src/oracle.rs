//! Limit-distribution oracles: normalized Volterra partial sums approximating
//! Hermite-process marginals Z_{r,beta}(1), the zeta variance constant by
//! quadrature, and exact partial-sum variances from coefficient sums.

use crate::empirical::EmpiricalDist;
use crate::error::{Error, Result};
use crate::fftconv::{autocorrelation, convolve_valid};
use crate::process::{CoefficientSeq, InnovationLaw};
use crate::quad::{gauss_legendre_unit, integrate};
use crate::rng::substream;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Discretization spec for a Hermite-marginal sampler.
#[derive(Debug, Clone, Serialize)]
pub struct HermiteSpec {
    pub r: u32,
    pub beta: f64,
    /// grid length of the partial sum
    pub n: usize,
    pub truncation: usize,
}

impl HermiteSpec {
    pub fn new(r: u32, beta: f64, n: usize, truncation: usize) -> Result<Self> {
        if !(r == 1 || r == 2) {
            return Err(Error::UnsupportedOrder(r));
        }
        let upper = 0.5 + 0.5 / r as f64;
        if !(beta > 0.5 && beta < upper) {
            return Err(Error::Config(format!(
                "order r = {r} needs 1/2 < beta < {upper}, got {beta}"
            )));
        }
        if n == 0 {
            return Err(Error::Config("grid length n must be >= 1".into()));
        }
        Ok(Self {
            r,
            beta,
            n,
            truncation,
        })
    }

    pub fn coeffs(&self) -> Result<CoefficientSeq> {
        CoefficientSeq::allow_tail_excess(self.beta, 1.0, self.truncation)
    }

    /// Self-similar index of the limit: H = 1 - r(beta - 1/2).
    pub fn h(&self) -> f64 {
        1.0 - self.r as f64 * (self.beta - 0.5)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZetaConstant {
    pub r: u32,
    pub beta: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// T_{n,r} = sum_{i=1}^n U_{i,r} over the truncated coefficient support.
/// `eps` carries eps_{1-M} ..= eps_n in index order (length >= n + M);
/// r = 1 is the plain linear partial sum, r = 2 the off-diagonal double sum
/// sum_{0 <= j1 < j2} a_{j1} a_{j2} eps_{i-j1} eps_{i-j2}, accumulated by the
/// convolutional identity U_{i,2} = (X_i^2 - sum_j a_j^2 eps_{i-j}^2) / 2.
pub fn volterra_sum(r: u32, coeffs: &CoefficientSeq, eps: &[f64], n: usize) -> Result<f64> {
    if !(r == 1 || r == 2) {
        return Err(Error::UnsupportedOrder(r));
    }
    if n == 0 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    let m = coeffs.truncation;
    if eps.len() < n + m {
        return Err(Error::SeriesTooShort {
            n: eps.len(),
            need: n + m,
        });
    }
    let eps = &eps[..n + m];
    let kernel = coeffs.as_vec();
    let x = convolve_valid(eps, &kernel);
    if r == 1 {
        return Ok(x.iter().sum());
    }
    let kernel_sq: Vec<f64> = kernel.iter().map(|a| a * a).collect();
    let eps_sq: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let v = convolve_valid(&eps_sq, &kernel_sq);
    Ok(x.iter()
        .zip(v.iter())
        .map(|(xi, vi)| (xi * xi - vi) / 2.0)
        .sum())
}

/// Brute-force reference for `volterra_sum` (same eps layout); O(n M^r).
pub fn volterra_sum_direct(r: u32, coeffs: &CoefficientSeq, eps: &[f64], n: usize) -> Result<f64> {
    if !(r == 1 || r == 2) {
        return Err(Error::UnsupportedOrder(r));
    }
    let m = coeffs.truncation as i64;
    if eps.len() < n + m as usize {
        return Err(Error::SeriesTooShort {
            n: eps.len(),
            need: n + m as usize,
        });
    }
    // eps_i lives at eps[i - 1 + M] for i = 1-M ..= n
    let e = |i: i64| eps[(i - 1 + m) as usize];
    let mut total = 0.0;
    for i in 1..=n as i64 {
        if r == 1 {
            for j in 0..=m {
                total += coeffs.coefficient(j) * e(i - j);
            }
        } else {
            for j1 in 0..=m {
                for j2 in j1 + 1..=m {
                    total +=
                        coeffs.coefficient(j1) * coeffs.coefficient(j2) * e(i - j1) * e(i - j2);
                }
            }
        }
    }
    Ok(total)
}

/// Exact Var(T_{n,r}) from coefficient sums, for unit-variance innovations:
/// Var = sum_{|h| < n} (n - |h|) gamma_r(h) with
/// gamma_1(h) = sum_j a_j a_{j+h} and gamma_2(h) = (gamma_1(h)^2 - delta(h)) / 2,
/// delta(h) = sum_j a_j^2 a_{j+h}^2 (the excluded diagonal).
pub fn exact_variance(r: u32, coeffs: &CoefficientSeq, n: usize) -> Result<f64> {
    if !(r == 1 || r == 2) {
        return Err(Error::UnsupportedOrder(r));
    }
    let kernel = coeffs.as_vec();
    let hmax = (n - 1).min(coeffs.truncation);
    let g = autocorrelation(&kernel, hmax);
    let gamma: Vec<f64> = if r == 1 {
        g
    } else {
        let kernel_sq: Vec<f64> = kernel.iter().map(|a| a * a).collect();
        let delta = autocorrelation(&kernel_sq, hmax);
        g.iter()
            .zip(delta.iter())
            .map(|(gh, dh)| (gh * gh - dh) / 2.0)
            .collect()
    };
    let mut var = n as f64 * gamma[0];
    for (h, &gh) in gamma.iter().enumerate().skip(1) {
        var += 2.0 * (n - h) as f64 * gh;
    }
    Ok(var)
}

/// Var(T_{n,1}) for the *untruncated* coefficients a_k = (1+k)^(-beta),
/// unit-variance innovations. gamma_1(h) is summed directly up to
/// J = max(20000, 30 h) and closed with a binomial-series tail
/// sum_{m>J} m^(-beta) (m+h)^(-beta) ~ sum_t C(-beta, t) h^t (J+1/2)^(1-p)/(p-1),
/// p = 2 beta + t.
pub fn untruncated_variance_r1(beta: f64, n: usize) -> Result<f64> {
    if !(beta > 0.5) {
        return Err(Error::Config(format!("beta must exceed 1/2, got {beta}")));
    }
    const J_MIN: usize = 20_000;
    const J_FAC: usize = 30;
    const TAIL_TERMS: usize = 6;
    let j_max = J_MIN.max(J_FAC * n) + n + 2;
    let powtab: Vec<f64> = (1..=j_max + 1).map(|m| (m as f64).powf(-beta)).collect();
    // binomial coefficients C(-beta, t)
    let mut bc = [0.0; TAIL_TERMS];
    bc[0] = 1.0;
    for t in 1..TAIL_TERMS {
        bc[t] = bc[t - 1] * (-beta - (t - 1) as f64) / t as f64;
    }
    let gamma_h = |h: usize| -> f64 {
        let j = J_MIN.max(J_FAC * h.max(1));
        let body: f64 = (0..j).map(|i| powtab[i] * powtab[i + h]).sum();
        let j1 = j as f64 + 0.5;
        let tail: f64 = (0..TAIL_TERMS)
            .map(|t| {
                let p = 2.0 * beta + t as f64;
                bc[t] * (h as f64).powi(t as i32) * j1.powf(1.0 - p) / (p - 1.0)
            })
            .sum();
        body + tail
    };
    let gamma: Vec<f64> = (0..n).into_par_iter().map(gamma_h).collect();
    let mut var = n as f64 * gamma[0];
    for (h, &gh) in gamma.iter().enumerate().skip(1) {
        var += 2.0 * (n - h) as f64 * gh;
    }
    Ok(var)
}

/// `reps` independent draws of T_{n,r} / sd(T_{n,r}) with Gaussian innovations;
/// the normalization is the exact coefficient-sum standard deviation, not an
/// estimate. Replicate k uses substream (seed, k).
pub fn sample_limit(spec: &HermiteSpec, reps: usize, seed: u64) -> Result<EmpiricalDist> {
    if reps == 0 {
        return Err(Error::Config("reps must be >= 1".into()));
    }
    let coeffs = spec.coeffs()?;
    let sd = exact_variance(spec.r, &coeffs, spec.n)?.sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateScale(format!("sd(T_n,{}) = {sd}", spec.r)));
    }
    let count = spec.n + spec.truncation;
    let draws: Result<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k);
            let eps: Vec<f64> = (0..count)
                .map(|_| InnovationLaw::Gaussian.sample(&mut rng))
                .collect();
            Ok(volterra_sum(spec.r, &coeffs, &eps, spec.n)? / sd)
        })
        .collect();
    EmpiricalDist::new(draws?)
}

/// zeta_{beta,...,beta} = ||Z_{r,beta}(1)||^2, the integral over the simplex
/// {u_1 < ... < u_r < 1} of [int_0^1 prod_k (v - u_k)_+^(-beta) dv]^2.
pub fn zeta(r: u32, beta: f64, tol: f64) -> Result<ZetaConstant> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let upper = match r {
        1 | 2 => 0.5 + 0.5 / r as f64,
        other => return Err(Error::UnsupportedOrder(other)),
    };
    if !(beta > 0.5 && beta < upper) {
        return Err(Error::Config(format!(
            "zeta(r = {r}) needs 1/2 < beta < {upper}, got {beta}"
        )));
    }
    let (value, error_estimate) = match r {
        1 => zeta_r1(beta, tol)?,
        _ => zeta_r2(beta, tol)?,
    };
    Ok(ZetaConstant {
        r,
        beta,
        value,
        error_estimate,
    })
}

/// r = 1: the u in (0,1) part has the closed form 1/((3-2b)(1-b)^2); the
/// u = -s < 0 part is int_0^inf [((1+s)^(1-b) - s^(1-b))/(1-b)]^2 ds, split at
/// s = 1 with the tail mapped by s = w^(-1/(2b-1)) (bounded integrand).
fn zeta_r1(b: f64, tol: f64) -> Result<(f64, f64)> {
    let part1 = 1.0 / ((3.0 - 2.0 * b) * (1.0 - b) * (1.0 - b));
    // (1+s)^(1-b) - s^(1-b) = s^(1-b) * expm1((1-b) ln1p(1/s)), stable for
    // large s where the direct difference cancels catastrophically
    let f = |s: f64| {
        let d = if s == 0.0 {
            1.0
        } else {
            s.powf(1.0 - b) * ((1.0 - b) * (1.0 / s).ln_1p()).exp_m1() / (1.0 - b)
        };
        d * d
    };
    let (head, e1) = integrate(&f, 0.0, 1.0, tol / 2.0)?;
    let q = 1.0 / (2.0 * b - 1.0);
    let (tail, e2) = integrate(
        |w: f64| f(w.powf(-q)) * q * w.powf(-q - 1.0),
        0.0,
        1.0,
        tol / 2.0,
    )?;
    Ok((part1 + head + tail, e1 + e2))
}

/// r = 2 integrand after substitutions: u2 = 1 - s with s = t/(1-t),
/// u1 = u2 - w with w = y^(1/(3-4b)) (flattening the w -> 0 singularity
/// w^(2(1-2b))) and y = q/(1-q). The inner dv integral removes its v -> u2
/// singularity by v = u2 + (1-u2) t^(1/(1-b)) when u2 >= 0. Evaluated by
/// iterated Gauss-Legendre at increasing orders until successive values agree
/// within tol.
fn zeta_r2(b: f64, tol: f64) -> Result<(f64, f64)> {
    let (ix, iw) = gauss_legendre_unit(80);
    let inner = |u1: f64, u2: f64| -> f64 {
        if u2 >= 0.0 {
            let scale = (1.0 - u2).powf(1.0 - b) / (1.0 - b);
            let s: f64 = ix
                .iter()
                .zip(&iw)
                .map(|(&t, &w)| {
                    let v = u2 + (1.0 - u2) * t.powf(1.0 / (1.0 - b));
                    w * (v - u1).powf(-b)
                })
                .sum();
            s * scale
        } else {
            ix.iter()
                .zip(&iw)
                .map(|(&v, &w)| w * (v - u1).powf(-b) * (v - u2).powf(-b))
                .sum()
        }
    };
    let kap = 1.0 / (3.0 - 4.0 * b);
    let eval = |order: usize| -> f64 {
        let (xs, ws) = gauss_legendre_unit(order);
        xs.par_iter()
            .zip(ws.par_iter())
            .map(|(&ti, &wi)| {
                let s = ti / (1.0 - ti);
                let js = 1.0 / ((1.0 - ti) * (1.0 - ti));
                let u2 = 1.0 - s;
                let row: f64 = xs
                    .iter()
                    .zip(&ws)
                    .map(|(&qi, &wj)| {
                        let y = qi / (1.0 - qi);
                        let w = y.powf(kap);
                        let jw = kap * y.powf(kap - 1.0) / ((1.0 - qi) * (1.0 - qi));
                        let i = inner(u2 - w, u2);
                        wj * i * i * jw
                    })
                    .sum();
                wi * row * js
            })
            .sum()
    };
    let mut prev = eval(96);
    let mut err = f64::INFINITY;
    for order in [160, 240, 320] {
        let cur = eval(order);
        err = (cur - prev).abs();
        prev = cur;
        if err <= tol {
            return Ok((cur, err));
        }
    }
    Err(Error::Tolerance {
        requested: tol,
        achieved: err,
        estimate: prev,
    })
}

/// Phi(x), the standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}
