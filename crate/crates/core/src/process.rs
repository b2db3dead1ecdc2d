//! Model definitions and sample-path generation for Y_i = K(X_i), where
//! X_i = sum_{j=0}^{M} a_j eps_{i-j} is a truncated causal linear process.

use crate::error::{Error, Result};
use crate::fftconv::convolve_valid;
use crate::rng::substream;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Default cap on tail variance relative to the post-lag-0 variance.
pub const TAIL_TOL: f64 = 1e-3;

const RESOURCE_CAP: usize = 1 << 26;

/// Fixed substream namespace for the mean-estimation Monte Carlo, so that
/// `true_mean` is a pure function of the model.
const MEAN_MC_SEED: u64 = 0xB10C_5EED_0000_0001;
const MEAN_MC_LEN: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InnovationLaw {
    Gaussian,
    StudentT { df: u32 },
    Rademacher,
}

impl InnovationLaw {
    pub fn validate(self) -> Result<()> {
        if let InnovationLaw::StudentT { df } = self {
            if df <= 2 {
                return Err(Error::Config(format!(
                    "student_t requires df >= 3 for finite variance, got df = {df}"
                )));
            }
        }
        Ok(())
    }

    /// E eps^2 (all laws here have mean zero).
    pub fn variance(self) -> f64 {
        match self {
            InnovationLaw::Gaussian | InnovationLaw::Rademacher => 1.0,
            InnovationLaw::StudentT { df } => df as f64 / (df as f64 - 2.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            InnovationLaw::Gaussian => StandardNormal.sample(rng),
            InnovationLaw::StudentT { df } => {
                StudentT::new(df as f64).expect("validated df").sample(rng)
            }
            InnovationLaw::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// CDF of the innovation law, used by the Rao-Blackwellized mean estimate.
    pub fn cdf(self, u: f64) -> f64 {
        match self {
            InnovationLaw::Gaussian => Normal::standard().cdf(u),
            InnovationLaw::StudentT { df } => StudentsT::new(0.0, 1.0, df as f64)
                .expect("validated df")
                .cdf(u),
            InnovationLaw::Rademacher => {
                if u < -1.0 {
                    0.0
                } else if u < 1.0 {
                    0.5
                } else {
                    1.0
                }
            }
        }
    }
}

/// a_k = c0 (1+k)^(-beta) for 0 <= k <= M, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeq {
    pub beta: f64,
    pub c0: f64,
    pub truncation: usize,
    /// true when the constructor was told to accept a tail above `TAIL_TOL`
    pub tail_excess_allowed: bool,
}

impl CoefficientSeq {
    pub fn new(beta: f64, c0: f64, truncation: usize) -> Result<Self> {
        let seq = Self::unchecked(beta, c0, truncation)?;
        let ratio = seq.tail_ratio();
        if ratio > TAIL_TOL {
            return Err(Error::Config(format!(
                "truncation M = {truncation} leaves tail variance ratio {ratio:.3e} > {TAIL_TOL:e} \
                 for beta = {beta}; increase M or construct with allow_tail_excess",
            )));
        }
        Ok(seq)
    }

    /// Accepts any tail; the bound stays auditable through `tail_bound`.
    pub fn allow_tail_excess(beta: f64, c0: f64, truncation: usize) -> Result<Self> {
        let mut seq = Self::unchecked(beta, c0, truncation)?;
        seq.tail_excess_allowed = true;
        Ok(seq)
    }

    fn unchecked(beta: f64, c0: f64, truncation: usize) -> Result<Self> {
        if !(beta > 0.5) {
            return Err(Error::Config(format!(
                "beta must exceed 1/2 (square-summable coefficients), got {beta}"
            )));
        }
        if truncation == 0 && c0 == 0.0 {
            return Err(Error::Config("all coefficients vanish".into()));
        }
        Ok(Self {
            beta,
            c0,
            truncation,
            tail_excess_allowed: false,
        })
    }

    pub fn coefficient(&self, k: i64) -> f64 {
        if k < 0 || k as usize > self.truncation {
            0.0
        } else {
            self.c0 * (1.0 + k as f64).powf(-self.beta)
        }
    }

    pub fn as_vec(&self) -> Vec<f64> {
        (0..=self.truncation as i64)
            .map(|k| self.coefficient(k))
            .collect()
    }

    /// Closed-form bound on A_M = sum_{k>M} a_k^2:
    /// A_M <= c0^2 M^(1-2beta) / (2beta - 1).
    pub fn tail_bound(&self) -> f64 {
        let m = self.truncation.max(1) as f64;
        self.c0 * self.c0 * m.powf(1.0 - 2.0 * self.beta) / (2.0 * self.beta - 1.0)
    }

    /// Bound on A_M / A_0 where A_0 = sum_{k>0} a_k^2.
    pub fn tail_ratio(&self) -> f64 {
        let tail = self.tail_bound();
        let body: f64 = (1..=self.truncation as i64)
            .map(|k| self.coefficient(k).powi(2))
            .sum();
        tail / (body + tail)
    }

    /// sum_{k=0}^{M} a_k^2 (the truncated process variance divided by E eps^2).
    pub fn sum_sq(&self) -> f64 {
        (0..=self.truncation as i64)
            .map(|k| self.coefficient(k).powi(2))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TransformKind {
    Identity,
    IndicatorLeq { threshold: f64 },
    Square,
}

impl TransformKind {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            TransformKind::Identity => x,
            TransformKind::IndicatorLeq { threshold } => {
                if x <= threshold {
                    1.0
                } else {
                    0.0
                }
            }
            TransformKind::Square => x * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    /// supplied, not computed
    pub power_rank: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub innovations: InnovationLaw,
    pub coeffs: CoefficientSeq,
    pub transform: TransformSpec,
    pub mu_known: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelName {
    ModelI,
    ModelII,
    ModelIII,
    ModelIV,
}

impl ModelName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "model-i" => Ok(ModelName::ModelI),
            "model-ii" => Ok(ModelName::ModelII),
            "model-iii" => Ok(ModelName::ModelIII),
            "model-iv" => Ok(ModelName::ModelIV),
            other => Err(Error::Config(format!(
                "unknown model '{other}' (expected model-i .. model-iv)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::ModelI => "model-i",
            ModelName::ModelII => "model-ii",
            ModelName::ModelIII => "model-iii",
            ModelName::ModelIV => "model-iv",
        }
    }
}

impl std::fmt::Display for ModelName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl ModelSpec {
    /// The four named configurations. The strongly dependent betas cannot meet
    /// `TAIL_TOL` at any feasible truncation, so presets accept the excess and
    /// keep the bound reported.
    pub fn preset(name: ModelName, beta: f64, truncation: usize) -> Result<Self> {
        let coeffs = CoefficientSeq::allow_tail_excess(beta, 1.0, truncation)?;
        let spec = match name {
            ModelName::ModelI => ModelSpec {
                innovations: InnovationLaw::Gaussian,
                coeffs,
                transform: TransformSpec {
                    kind: TransformKind::Identity,
                    power_rank: 1,
                },
                mu_known: Some(0.0),
            },
            ModelName::ModelII => ModelSpec {
                innovations: InnovationLaw::StudentT { df: 7 },
                coeffs,
                transform: TransformSpec {
                    kind: TransformKind::IndicatorLeq { threshold: 1.0 },
                    power_rank: 1,
                },
                mu_known: None,
            },
            ModelName::ModelIII => ModelSpec {
                innovations: InnovationLaw::StudentT { df: 7 },
                coeffs,
                transform: TransformSpec {
                    kind: TransformKind::IndicatorLeq { threshold: 0.0 },
                    power_rank: 2,
                },
                mu_known: None,
            },
            ModelName::ModelIV => {
                let mu = CoefficientSeq::allow_tail_excess(beta, 1.0, truncation)?.sum_sq();
                ModelSpec {
                    innovations: InnovationLaw::Rademacher,
                    coeffs,
                    transform: TransformSpec {
                        kind: TransformKind::Square,
                        power_rank: 2,
                    },
                    mu_known: Some(mu),
                }
            }
        };
        spec.innovations.validate()?;
        Ok(spec)
    }
}

/// A realized path Y_{-past+1}, ..., Y_n.
#[derive(Debug, Clone)]
pub struct SeriesWindow {
    values: Vec<f64>,
    n: usize,
    past: usize,
    pub seed: u64,
    pub model: Option<ModelSpec>,
}

impl SeriesWindow {
    /// Builds a window from raw values (e.g. observed data or test fixtures).
    pub fn from_parts(past_values: &[f64], observed: &[f64]) -> Result<Self> {
        if observed.is_empty() {
            return Err(Error::Config("observed series is empty".into()));
        }
        let mut values = past_values.to_vec();
        values.extend_from_slice(observed);
        Ok(Self {
            n: observed.len(),
            past: past_values.len(),
            values,
            seed: 0,
            model: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn past_len(&self) -> usize {
        self.past
    }

    /// Y_1 ..= Y_n.
    pub fn observed(&self) -> &[f64] {
        &self.values[self.past..]
    }

    /// Y_{-past+1} ..= Y_0.
    pub fn past_values(&self) -> &[f64] {
        &self.values[..self.past]
    }

    /// The full path Y_{-past+1} ..= Y_n.
    pub fn all(&self) -> &[f64] {
        &self.values
    }

    pub fn ybar(&self) -> f64 {
        self.observed().iter().sum::<f64>() / self.n as f64
    }

    /// CSV export (columns: index, y), index running from -past+1 to n.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,y")?;
        let offset = self.past as i64 - 1;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", j as i64 - offset, v)?;
        }
        Ok(())
    }
}

/// Draws `count` iid innovations from substream (`seed`, `substream_id`).
pub fn draw_innovations(
    law: InnovationLaw,
    count: usize,
    seed: u64,
    substream_id: u64,
) -> Result<Vec<f64>> {
    law.validate()?;
    let mut rng = substream(seed, substream_id);
    Ok((0..count).map(|_| law.sample(&mut rng)).collect())
}

/// Simulates Y_i = K(X_i^(M)) for i = -past+1 ..= n.
pub fn simulate_window(model: &ModelSpec, n: usize, past: usize, seed: u64) -> Result<SeriesWindow> {
    if n == 0 {
        return Err(Error::Config("window length n must be >= 1".into()));
    }
    model.innovations.validate()?;
    let m = model.coeffs.truncation;
    let total = n + past;
    if total + m > RESOURCE_CAP {
        return Err(Error::ResourceBound(format!(
            "n + past + M = {} exceeds cap {RESOURCE_CAP}",
            total + m
        )));
    }
    let eps = {
        let mut rng = substream(seed, 0);
        let mut v = Vec::with_capacity(total + m);
        for _ in 0..total + m {
            v.push(model.innovations.sample(&mut rng));
        }
        v
    };
    let kernel = model.coeffs.as_vec();
    let x = convolve_valid(&eps, &kernel);
    debug_assert_eq!(x.len(), total);
    let values = x.iter().map(|&xi| model.transform.kind.apply(xi)).collect();
    Ok(SeriesWindow {
        values,
        n,
        past,
        seed,
        model: Some(model.clone()),
    })
}

/// A Monte Carlo mean with its uncertainty, or an exact value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanEstimate {
    pub value: f64,
    pub std_error: Option<f64>,
    pub mc_reps: Option<usize>,
}

/// mu = E K(X_0).
///
/// Identity and square transforms have closed forms under the truncated
/// coefficients. Indicator transforms are estimated by a Rao-Blackwellized
/// Monte Carlo over one long stationary path: P(X <= t) = E F_eps((t - R)/a_0)
/// with R = X - a_0 eps, which is smooth in R and therefore far lower-variance
/// than averaging raw indicators. The standard error uses batch means to stay
/// honest under long-range dependence.
pub fn true_mean(model: &ModelSpec) -> Result<MeanEstimate> {
    match model.transform.kind {
        TransformKind::Identity => Ok(MeanEstimate {
            value: 0.0,
            std_error: None,
            mc_reps: None,
        }),
        TransformKind::Square => Ok(MeanEstimate {
            value: model.innovations.variance() * model.coeffs.sum_sq(),
            std_error: None,
            mc_reps: None,
        }),
        TransformKind::IndicatorLeq { threshold } => {
            indicator_mean_mc(model, threshold, MEAN_MC_LEN)
        }
    }
}

fn indicator_mean_mc(model: &ModelSpec, threshold: f64, len: usize) -> Result<MeanEstimate> {
    let m = model.coeffs.truncation;
    let a0 = model.coeffs.coefficient(0);
    if a0 == 0.0 {
        return Err(Error::Config("a_0 = 0: conditional CDF undefined".into()));
    }
    let eps: Vec<f64> = {
        let mut rng = substream(MEAN_MC_SEED, 0);
        (0..len + m)
            .map(|_| model.innovations.sample(&mut rng))
            .collect()
    };
    let kernel = model.coeffs.as_vec();
    let x = convolve_valid(&eps, &kernel);
    // R_i = X_i - a_0 eps_i; eps_i aligns with eps[i + m]
    let vals: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let r = xi - a0 * eps[i + m];
            model.innovations.cdf((threshold - r) / a0)
        })
        .collect();
    let value = vals.iter().sum::<f64>() / vals.len() as f64;
    let batches = 1024;
    let bsize = vals.len() / batches;
    let bmeans: Vec<f64> = (0..batches)
        .map(|b| vals[b * bsize..(b + 1) * bsize].iter().sum::<f64>() / bsize as f64)
        .collect();
    let bvar = bmeans
        .iter()
        .map(|&v| (v - value) * (v - value))
        .sum::<f64>()
        / (batches - 1) as f64;
    Ok(MeanEstimate {
        value,
        std_error: Some((bvar / batches as f64).sqrt()),
        mc_reps: Some(len),
    })
}

/// Closed-form autocovariance gamma_h = E(eps^2) sum_j a_j a_{j+h} of the
/// truncated linear process.
pub fn truncated_autocov(model: &ModelSpec, h: usize) -> f64 {
    let m = model.coeffs.truncation;
    if h > m {
        return 0.0;
    }
    let s: f64 = (0..=(m - h) as i64)
        .map(|j| model.coeffs.coefficient(j) * model.coeffs.coefficient(j + h as i64))
        .sum();
    model.innovations.variance() * s
}
