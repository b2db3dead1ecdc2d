//! Sorted-multiset empirical distributions with generalized-inverse quantiles
//! and Kolmogorov-Smirnov distances.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDist {
    values: Vec<f64>,
}

impl EmpiricalDist {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empirical distribution needs >= 1 value".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("NaN in empirical distribution".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees >= 1 value
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// F(x) = #{v <= x} / m.
    pub fn cdf(&self, x: f64) -> f64 {
        self.count_leq(x) as f64 / self.values.len() as f64
    }

    fn count_leq(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v <= x)
    }

    /// quantile(alpha) = inf { x : F(x) >= alpha }, alpha in (0, 1].
    /// For m atoms this is values[ceil(alpha * m) - 1].
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1], got {alpha}"
            )));
        }
        let m = self.values.len() as f64;
        let idx = (alpha * m).ceil() as usize;
        Ok(self.values[idx.max(1) - 1])
    }

    /// sup_x |F(x) - F_ref(x)| against a reference CDF, evaluated at both
    /// one-sided limits of every atom.
    pub fn ks_to_cdf<F: Fn(f64) -> f64>(&self, reference: F) -> f64 {
        let m = self.values.len() as f64;
        let mut sup: f64 = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let r = reference(v);
            let above = ((i + 1) as f64 / m - r).abs();
            let below = (i as f64 / m - r).abs();
            sup = sup.max(above).max(below);
        }
        sup
    }

    /// KS distance between two empirical distributions.
    pub fn ks_to_empirical(&self, other: &EmpiricalDist) -> f64 {
        let mut sup: f64 = 0.0;
        let check = |points: &[f64], sup: &mut f64| {
            for &x in points {
                let d = (self.cdf(x) - other.cdf(x)).abs();
                if d > *sup {
                    *sup = d;
                }
            }
        };
        check(&self.values, &mut sup);
        check(&other.values, &mut sup);
        sup
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> EmpiricalDist {
        EmpiricalDist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cdf_bounds() {
        let d = dist(&[-1.0, 0.0, 1.0]);
        assert_eq!(d.cdf(0.0), 2.0 / 3.0);
        assert_eq!(d.cdf(5.0), 1.0);
        assert_eq!(d.cdf(-5.0), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let d = dist(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.quantile(0.5).unwrap(), 2.0);
        assert_eq!(d.quantile(1.0).unwrap(), 4.0);
        let single = dist(&[7.0]);
        assert_eq!(single.quantile(0.01).unwrap(), 7.0);
        assert_eq!(single.quantile(0.99).unwrap(), 7.0);
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.5).is_err());
    }

    #[test]
    fn galois_connection_on_grid() {
        let d = dist(&[0.5, 0.5, 1.0, 2.0, 2.0, 3.5]);
        for i in 1..=20 {
            let alpha = i as f64 / 20.0;
            let q = d.quantile(alpha).unwrap();
            for &x in d.values() {
                assert_eq!(q <= x, alpha <= d.cdf(x), "alpha={alpha} x={x}");
            }
        }
    }

    #[test]
    fn ks_examples() {
        let d = dist(&[0.2, 0.4, 0.6, 0.8, 1.0]);
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        assert!((d.ks_to_cdf(uniform) - 0.2).abs() < 1e-12);

        let atom = dist(&[0.0]);
        let phi = |x: f64| statrs::distribution::ContinuousCDF::cdf(
            &statrs::distribution::Normal::standard(),
            x,
        );
        assert!((atom.ks_to_cdf(phi) - 0.5).abs() < 1e-12);

        let a = dist(&[1.0, 2.0, 3.0]);
        assert_eq!(a.ks_to_empirical(&a.clone()), 0.0);
    }
}
