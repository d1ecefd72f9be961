use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{domain, Result};

/// Exact (Clopper–Pearson) two-sided binomial interval for `s` successes in
/// `m` trials at confidence `level`.
///
/// The boundary cases use the closed forms `hi = 1 − (α/2)^{1/m}` for `s = 0`
/// and `lo = (α/2)^{1/m}` for `s = m`.
pub fn clopper_pearson(s: u64, m: u64, level: f64) -> Result<(f64, f64)> {
    if m == 0 || s > m {
        return Err(domain(format!("need 0 <= s <= m and m >= 1, got s={s}, m={m}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    let half = 0.5 * (1.0 - level);
    let (sf, mf) = (s as f64, m as f64);
    let lo = if s == 0 {
        0.0
    } else if s == m {
        half.powf(1.0 / mf)
    } else {
        Beta::new(sf, mf - sf + 1.0).expect("positive shapes").inverse_cdf(half)
    };
    let hi = if s == m {
        1.0
    } else if s == 0 {
        1.0 - half.powf(1.0 / mf)
    } else {
        Beta::new(sf + 1.0, mf - sf).expect("positive shapes").inverse_cdf(1.0 - half)
    };
    Ok((lo, hi))
}

/// Interval used for every [`ProbabilityEstimate`]: always the exact one.
pub fn wilson_or_exact_interval(s: u64, m: u64, level: f64) -> Result<(f64, f64)> {
    clopper_pearson(s, m, level)
}

/// Binomial estimate of `P(τ_R ≤ T)` for one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub horizon: f64,
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub lo: f64,
    pub hi: f64,
    /// Some trajectory of the cell failed (budget); counts cover the rest.
    #[serde(default)]
    pub incomplete: bool,
    /// Trajectories stopped by the resolution monitor before crossing.
    #[serde(default)]
    pub unresolved: u64,
}

impl ProbabilityEstimate {
    pub const LEVEL: f64 = 0.95;

    pub fn new(horizon: f64, successes: u64, trials: u64) -> Result<Self> {
        let (lo, hi) = clopper_pearson(successes, trials, Self::LEVEL)?;
        Ok(Self {
            horizon,
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            lo,
            hi,
            incomplete: false,
            unresolved: 0,
        })
    }
}
