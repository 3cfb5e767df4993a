use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
}

impl GroupStats {
    pub fn from_samples(label: impl Into<String>, xs: &[f64]) -> Result<Self> {
        let label = label.into();
        if xs.len() < 2 {
            return Err(Error::SmallGroup(label));
        }
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        Ok(Self {
            label,
            n,
            mean,
            sd: (ss / (n as f64 - 1.0)).sqrt(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Unequal-variance two-sample t-test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(g1: &[f64], g2: &[f64]) -> Result<WelchResult> {
    let a = GroupStats::from_samples("g1", g1)?;
    let b = GroupStats::from_samples("g2", g2)?;
    welch_from_stats(&a, &b)
}

pub fn welch_from_stats(a: &GroupStats, b: &GroupStats) -> Result<WelchResult> {
    if a.n < 2 {
        return Err(Error::SmallGroup(a.label.clone()));
    }
    if b.n < 2 {
        return Err(Error::SmallGroup(b.label.clone()));
    }
    let va = a.sd * a.sd / a.n as f64;
    let vb = b.sd * b.sd / b.n as f64;
    let se2 = va + vb;
    let diff = a.mean - b.mean;
    if se2 == 0.0 {
        if diff == 0.0 {
            return Err(Error::DegenerateGroup);
        }
        return Ok(WelchResult {
            t: diff.signum() * f64::INFINITY,
            df: (a.n + b.n - 2) as f64,
            p: 0.0,
        });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.n as f64 - 1.0) + vb * vb / (b.n as f64 - 1.0));
    let p = beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0);
    Ok(WelchResult { t, df, p })
}
