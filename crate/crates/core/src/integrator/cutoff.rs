use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Smooth monotone step `θ`: exactly 1 on `[0, onset]`, exactly 0 on
/// `[vanish, ∞)`.
///
/// On the transition band, with `y = (x − onset)/(vanish − onset)` and
/// `q(y) = exp(−1/y)` for `y > 0` (else 0):
///
/// ```text
///     θ(x) = q(1 − y) / (q(1 − y) + q(y))
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub onset: f64,
    pub vanish: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { onset: 1.0, vanish: 2.0 }
    }
}

impl CutoffSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.onset >= 0.0 && self.vanish > self.onset && self.vanish.is_finite()) {
            return Err(domain(format!(
                "cutoff needs 0 <= onset < vanish, got ({}, {})",
                self.onset, self.vanish
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(domain(format!("cutoff argument must be >= 0, got {x}")));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        if x <= self.onset {
            return 1.0;
        }
        if x >= self.vanish {
            return 0.0;
        }
        let y = (x - self.onset) / (self.vanish - self.onset);
        let up = bump(1.0 - y);
        let down = bump(y);
        up / (up + down)
    }
}

fn bump(y: f64) -> f64 {
    if y > 0.0 {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

/// `θ(x)` for the given cutoff.
pub fn theta_eval(spec: &CutoffSpec, x: f64) -> Result<f64> {
    spec.eval(x)
}
