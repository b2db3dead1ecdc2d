//! Config-driven Monte Carlo coverage studies, single-run estimation, and
//! sweep/CSV plumbing.

use crate::block::{f_n_tilde_forward, variance_tilde_forward};
use crate::error::{Error, Result};
use crate::process::{simulate_window, true_mean, ModelName, ModelSpec, SeriesWindow};
use crate::rng::derive_seed;
use crate::scale::{
    ci_mean, estimate_scales, ConfidenceInterval, IntervalKind, ScaleEstimates,
};
use crate::subsample::{choose_scales, ci_mean_subsample, f_l_star, SubsampleScales};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_TRUNCATION: usize = 10_000;
pub const DEFAULT_REPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    HHat,
    Subsampling,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "h_hat" => Ok(Method::HHat),
            "subsampling" => Ok(Method::Subsampling),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected h_hat or subsampling)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::HHat => "h_hat",
            Method::Subsampling => "subsampling",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelName,
    pub beta: f64,
    pub n: usize,
    /// block-size multiplier: l = floor(c * n^0.5)
    pub c: f64,
    pub method: Method,
    pub alpha: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub truncation: usize,
    /// replicate substream ids start here (split-and-pool support)
    pub rep_offset: u64,
}

impl ExperimentConfig {
    pub fn block_len(&self) -> Result<usize> {
        let l = (self.c * (self.n as f64).sqrt()).floor();
        if !(l >= 2.0) {
            return Err(Error::Config(format!(
                "block size l = floor({} * sqrt({})) = {l} must be >= 2",
                self.c, self.n
            )));
        }
        Ok(l as usize)
    }

    pub fn validate(&self) -> Result<usize> {
        if self.reps == 0 {
            return Err(Error::Config("reps must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        let l = self.block_len()?;
        match self.method {
            Method::HHat => {
                if 2 * l > self.n {
                    return Err(Error::Config(format!(
                        "h_hat needs 2l <= n; l = {l}, n = {}",
                        self.n
                    )));
                }
            }
            Method::Subsampling => {
                choose_scales(self.n, l)?;
            }
        }
        // fail fast on a bad model/beta combination
        self.model_spec()?;
        Ok(l)
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        ModelSpec::preset(self.model, self.beta, self.truncation)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub config: ExperimentConfig,
    /// coverage of the interval bounded below, [Ybar - q~_{1-alpha} sigma/n, inf)
    pub lower_coverage: f64,
    /// coverage of the interval bounded above, (-inf, Ybar - q~_alpha sigma/n]
    pub upper_coverage: f64,
    pub mc_se_lower: f64,
    pub mc_se_upper: f64,
    pub degenerate_count: usize,
    pub wall_time_s: f64,
}

/// One replicate: simulate, build both one-sided intervals, test mu-coverage.
/// Ok(None) marks a degenerate replicate (zero scale somewhere).
fn replicate_coverage(
    model: &ModelSpec,
    mu: f64,
    n: usize,
    l: usize,
    past: usize,
    method: Method,
    scales: Option<&SubsampleScales>,
    alpha: f64,
    seed: u64,
) -> Result<Option<(bool, bool)>> {
    let w = simulate_window(model, n, past, seed)?;
    let build = |kind: IntervalKind| -> Result<ConfidenceInterval> {
        match method {
            Method::HHat => ci_mean(&w, l, alpha, kind),
            Method::Subsampling => {
                ci_mean_subsample(&w, scales.expect("validated upfront"), alpha, kind)
            }
        }
    };
    let lower = match build(IntervalKind::UpperOneSided) {
        Ok(ci) => ci.contains(mu),
        Err(Error::DegenerateScale(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let upper = match build(IntervalKind::LowerOneSided) {
        Ok(ci) => ci.contains(mu),
        Err(Error::DegenerateScale(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(Some((lower, upper)))
}

/// Monte Carlo coverage of both one-sided 1-alpha intervals. Replicate k draws
/// from substream (master_seed, rep_offset + k); results are deterministic for
/// a fixed seed regardless of worker count.
pub fn run_coverage(cfg: &ExperimentConfig) -> Result<CoverageReport> {
    let start = Instant::now();
    let l = cfg.validate()?;
    let model = cfg.model_spec()?;
    let mu = true_mean(&model)?.value;
    let (past, sub_scales) = match cfg.method {
        Method::HHat => (2 * l, None),
        Method::Subsampling => (0, Some(choose_scales(cfg.n, l)?)),
    };
    let outcomes: Result<Vec<Option<(bool, bool)>>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(cfg.master_seed, cfg.rep_offset + k);
            replicate_coverage(
                &model,
                mu,
                cfg.n,
                l,
                past,
                cfg.method,
                sub_scales.as_ref(),
                cfg.alpha,
                seed,
            )
        })
        .collect();
    let outcomes = outcomes?;
    let degenerate_count = outcomes.iter().filter(|o| o.is_none()).count();
    let ok = cfg.reps - degenerate_count;
    if ok == 0 {
        return Err(Error::DegenerateScale(
            "every replicate had a degenerate scale".into(),
        ));
    }
    let lower_hits = outcomes.iter().flatten().filter(|(lo, _)| *lo).count();
    let upper_hits = outcomes.iter().flatten().filter(|(_, up)| *up).count();
    let p_lo = lower_hits as f64 / ok as f64;
    let p_up = upper_hits as f64 / ok as f64;
    let se = |p: f64| (p * (1.0 - p) / ok as f64).sqrt();
    Ok(CoverageReport {
        config: cfg.clone(),
        lower_coverage: p_lo,
        upper_coverage: p_up,
        mc_se_lower: se(p_lo),
        mc_se_upper: se(p_up),
        degenerate_count,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Diagnostics from a single-series run.
#[derive(Debug, Clone, Serialize)]
pub struct SingleRun {
    pub two_sided: ConfidenceInterval,
    pub lower_bounded: ConfidenceInterval,
    pub upper_bounded: ConfidenceInterval,
    pub scales: Option<ScaleEstimates>,
    pub subsample: Option<SubsampleScales>,
    #[serde(skip)]
    pub dist: crate::empirical::EmpiricalDist,
    pub ybar: f64,
}

/// Runs one method on one series. Simulated windows may carry a past block
/// (backward convention); data-only windows (past = 0) fall back to the
/// forward convention throughout. Requires n >= 4l.
pub fn run_single(y: &SeriesWindow, method: Method, l: usize, alpha: f64) -> Result<SingleRun> {
    if y.n() < 4 * l {
        return Err(Error::SeriesTooShort {
            n: y.n(),
            need: 4 * l,
        });
    }
    match method {
        Method::HHat => {
            let backward = y.past_len() + 1 >= 2 * l;
            let (scales, dist) = if backward {
                let scales = estimate_scales(y, l)?;
                let (dist, _) = crate::block::f_n_tilde(y, l)?;
                (scales, dist)
            } else {
                let s_l = variance_tilde_forward(y.observed(), l)?.sqrt();
                let s_2l = variance_tilde_forward(y.observed(), 2 * l)?.sqrt();
                let scales = ScaleEstimates::from_scales(s_l, s_2l, l, y.n())?;
                let (dist, _) = f_n_tilde_forward(y.observed(), l)?;
                (scales, dist)
            };
            let ci = |kind| {
                crate::scale::assemble_interval(
                    y.ybar(),
                    |a| dist.quantile(a),
                    scales.sigma_n_hat,
                    y.n(),
                    alpha,
                    kind,
                )
            };
            Ok(SingleRun {
                two_sided: ci(IntervalKind::TwoSided)?,
                lower_bounded: ci(IntervalKind::UpperOneSided)?,
                upper_bounded: ci(IntervalKind::LowerOneSided)?,
                scales: Some(scales),
                subsample: None,
                dist,
                ybar: y.ybar(),
            })
        }
        Method::Subsampling => {
            let scales = choose_scales(y.n(), l)?;
            let dist = f_l_star(y.observed(), &scales)?;
            Ok(SingleRun {
                two_sided: ci_mean_subsample(y, &scales, alpha, IntervalKind::TwoSided)?,
                lower_bounded: ci_mean_subsample(y, &scales, alpha, IntervalKind::UpperOneSided)?,
                upper_bounded: ci_mean_subsample(y, &scales, alpha, IntervalKind::LowerOneSided)?,
                scales: None,
                subsample: Some(scales),
                dist,
                ybar: y.ybar(),
            })
        }
    }
}

/// One sweep row: the report, or the error message for a failed config.
#[derive(Debug)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub outcome: std::result::Result<CoverageReport, String>,
}

/// Runs every config in input order; per-row failures are recorded, not fatal.
pub fn sweep(configs: &[ExperimentConfig]) -> Result<Vec<SweepRow>> {
    if configs.is_empty() {
        return Err(Error::Config("sweep needs at least one config".into()));
    }
    Ok(configs
        .iter()
        .map(|cfg| SweepRow {
            config: cfg.clone(),
            outcome: run_coverage(cfg).map_err(|e| e.to_string()),
        })
        .collect())
}

pub const SWEEP_HEADER: &str = "model,beta,n,c,method,alpha,reps,lower_cov,upper_cov,mc_se_lower,mc_se_upper,degenerate,seed,wall_time_s,error";

/// Fixed-column CSV ('.' decimal, no locale dependence).
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for row in rows {
        let c = &row.config;
        let prefix = format!(
            "{},{},{},{},{},{},{}",
            c.model, c.beta, c.n, c.c, c.method.as_str(), c.alpha, c.reps
        );
        match &row.outcome {
            Ok(r) => writeln!(
                w,
                "{prefix},{},{},{},{},{},{},{:.3},",
                r.lower_coverage,
                r.upper_coverage,
                r.mc_se_lower,
                r.mc_se_upper,
                r.degenerate_count,
                c.master_seed,
                r.wall_time_s
            )?,
            Err(msg) => writeln!(
                w,
                "{prefix},,,,,,{},,{}",
                c.master_seed,
                msg.replace([',', '\n'], ";")
            )?,
        }
    }
    Ok(())
}

/// Flat key=value config files with optional [section] headers. Root-level
/// keys set defaults; each section yields one ExperimentConfig overriding
/// them. Without sections the root keys form a single config. '#' starts a
/// comment; blank lines are ignored.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>> {
    let mut root: BTreeMap<String, String> = BTreeMap::new();
    let mut sections: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {}: unterminated section header", lineno + 1)))?;
            sections.push((name.trim().to_string(), BTreeMap::new()));
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key = value, got '{line}'", lineno + 1))
        })?;
        let target = sections.last_mut().map(|(_, m)| m).unwrap_or(&mut root);
        target.insert(key.trim().to_string(), value.trim().to_string());
    }
    let mut configs = Vec::new();
    if sections.is_empty() {
        configs.push(config_from_map(&root)?);
    } else {
        for (name, overrides) in &sections {
            let mut merged = root.clone();
            merged.extend(overrides.clone());
            configs.push(config_from_map(&merged).map_err(|e| {
                Error::Config(format!("section [{name}]: {e}"))
            })?);
        }
    }
    Ok(configs)
}

fn config_from_map(map: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let get = |key: &str| -> Result<&str> {
        map.get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    };
    let parse_num = |key: &str, v: &str| -> Result<f64> {
        v.parse()
            .map_err(|_| Error::Config(format!("key '{key}': invalid number '{v}'")))
    };
    for key in map.keys() {
        if !matches!(
            key.as_str(),
            "model" | "beta" | "n" | "c" | "method" | "alpha" | "reps" | "seed" | "truncation"
        ) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
    }
    let opt_num = |key: &str, default: f64| -> Result<f64> {
        match map.get(key) {
            Some(v) => parse_num(key, v),
            None => Ok(default),
        }
    };
    let cfg = ExperimentConfig {
        model: ModelName::parse(get("model")?)?,
        beta: parse_num("beta", get("beta")?)?,
        n: parse_num("n", get("n")?)? as usize,
        c: parse_num("c", get("c")?)?,
        method: Method::parse(get("method")?)?,
        alpha: opt_num("alpha", DEFAULT_ALPHA)?,
        reps: opt_num("reps", DEFAULT_REPS as f64)? as usize,
        master_seed: opt_num("seed", 0.0)? as u64,
        truncation: opt_num("truncation", DEFAULT_TRUNCATION as f64)? as usize,
        rep_offset: 0,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            model: ModelName::ModelI,
            beta: 2.0,
            n: 400,
            c: 1.0,
            method: Method::HHat,
            alpha: 0.1,
            reps: 60,
            master_seed: 17,
            truncation: 500,
            rep_offset: 0,
        }
    }

    #[test]
    fn block_len_examples() {
        let mut c = cfg();
        assert_eq!(c.block_len().unwrap(), 20);
        c.c = 0.5;
        assert_eq!(c.block_len().unwrap(), 10);
        c.n = 4;
        assert!(c.block_len().is_err()); // l = 1 < 2
    }

    #[test]
    fn coverage_smoke_and_determinism() {
        let c = cfg();
        let a = run_coverage(&c).unwrap();
        let b = run_coverage(&c).unwrap();
        assert_eq!(a.lower_coverage, b.lower_coverage);
        assert_eq!(a.upper_coverage, b.upper_coverage);
        assert!(a.lower_coverage >= 0.0 && a.lower_coverage <= 1.0);
        assert!(a.degenerate_count == 0);
        // a nominal-90% interval should cover far more often than not
        assert!(a.lower_coverage > 0.5 && a.upper_coverage > 0.5);
    }

    #[test]
    fn split_and_pool_equals_one_run() {
        let mut c = cfg();
        c.reps = 40;
        let full = run_coverage(&c).unwrap();
        let mut first = c.clone();
        first.reps = 20;
        let mut second = c.clone();
        second.reps = 20;
        second.rep_offset = 20;
        let (a, b) = (run_coverage(&first).unwrap(), run_coverage(&second).unwrap());
        let pooled_lower = (a.lower_coverage * 20.0 + b.lower_coverage * 20.0) / 40.0;
        let pooled_upper = (a.upper_coverage * 20.0 + b.upper_coverage * 20.0) / 40.0;
        assert!((pooled_lower - full.lower_coverage).abs() < 1e-12);
        assert!((pooled_upper - full.upper_coverage).abs() < 1e-12);
    }

    #[test]
    fn run_single_errors() {
        let y = SeriesWindow::from_parts(&[], &[1.0; 10]).unwrap();
        match run_single(&y, Method::HHat, 5, 0.1) {
            Err(Error::SeriesTooShort { need: 20, .. }) => {}
            other => panic!("expected series-too-short, got {other:?}"),
        }
        let constant = SeriesWindow::from_parts(&[], &[2.0; 100]).unwrap();
        match run_single(&constant, Method::HHat, 5, 0.1) {
            Err(Error::DegenerateScale(msg)) => assert!(!msg.is_empty()),
            other => panic!("expected degenerate-scale, got {other:?}"),
        }
    }

    #[test]
    fn run_single_simulated_contains_truth() {
        let model = ModelSpec::preset(ModelName::ModelI, 2.0, 2000).unwrap();
        let w = simulate_window(&model, 2000, 2 * 44, 314).unwrap();
        let run = run_single(&w, Method::HHat, 44, 0.1).unwrap();
        assert!(run.two_sided.contains(0.0), "{:?}", run.two_sided);
        let sub = run_single(&w, Method::Subsampling, 44, 0.1).unwrap();
        assert!(sub.subsample.is_some());
    }

    #[test]
    fn sweep_rows_and_errors() {
        assert!(sweep(&[]).is_err());
        let good = cfg();
        let mut bad = cfg();
        bad.alpha = 1.5; // config error recorded per-row
        let rows = sweep(&[good.clone(), bad, good.clone()]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].outcome.is_ok());
        assert!(rows[1].outcome.is_err());
        // determinism: identical configs give identical rows
        let (a, b) = (rows[0].outcome.as_ref().unwrap(), rows[2].outcome.as_ref().unwrap());
        assert_eq!(a.lower_coverage, b.lower_coverage);
        let mut out = Vec::new();
        write_sweep_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("model,beta,n,c,method"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn config_parsing() {
        let text = "
# defaults
model = model-i
beta = 2
c = 1
method = h_hat
reps = 10
seed = 3
truncation = 100

[cell-a]
n = 400

[cell-b]
n = 900
method = subsampling
";
        let cfgs = parse_config(text).unwrap();
        assert_eq!(cfgs.len(), 2);
        assert_eq!(cfgs[0].n, 400);
        assert_eq!(cfgs[0].alpha, DEFAULT_ALPHA);
        assert_eq!(cfgs[1].method, Method::Subsampling);

        assert!(parse_config("model = model-i\n").is_err()); // missing keys
        assert!(parse_config("bogus = 1\n").is_err()); // unknown key
        let single = parse_config("model=model-i\nbeta=2\nn=400\nc=1\nmethod=h_hat\n").unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].reps, DEFAULT_REPS);
    }
}
