use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    /// `N → W → L(dt)`
    Lie,
    /// `L(dt/2) → N → W → L(dt/2)`
    #[default]
    Strang,
}

/// Sign `μ` in front of the power nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    Focusing,
    Defocusing,
    /// No power nonlinearity (linear Schrödinger with noise).
    Off,
}

impl Nonlinearity {
    pub fn mu(self) -> f64 {
        match self {
            Nonlinearity::Focusing => 1.0,
            Nonlinearity::Defocusing => -1.0,
            Nonlinearity::Off => 0.0,
        }
    }
}

fn default_power() -> f64 {
    3.0
}

fn default_max_steps() -> u64 {
    10_000_000
}

fn default_radius() -> f64 {
    f64::INFINITY
}

fn is_infinite(x: &f64) -> bool {
    x.is_infinite()
}

/// Time stepping and model parameters for one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    #[serde(default)]
    pub splitting: Splitting,
    /// Exponent `p` of `|u|^{p−1}u`.
    #[serde(default = "default_power")]
    pub power: f64,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
    /// Multiply the nonlinearity by `θ(‖u‖_{X¹([0,t])}/R)`.
    #[serde(default)]
    pub truncation: bool,
    /// Radius `R` of the stopping time; infinite means never stop on norm.
    #[serde(default = "default_radius", skip_serializing_if = "is_infinite")]
    pub radius: f64,
    /// Zero modes with `|m|_∞ > N/3` after every step.
    #[serde(default)]
    pub dealias: bool,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
}

impl SolverConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            splitting: Splitting::Strang,
            power: default_power(),
            nonlinearity: Nonlinearity::Focusing,
            truncation: false,
            radius: f64::INFINITY,
            dealias: false,
            max_steps: default_max_steps(),
        }
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    pub fn with_nonlinearity(mut self, nonlinearity: Nonlinearity) -> Self {
        self.nonlinearity = nonlinearity;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_truncation(mut self, radius: f64) -> Self {
        self.truncation = true;
        self.radius = radius;
        self
    }

    pub fn with_splitting(mut self, splitting: Splitting) -> Self {
        self.splitting = splitting;
        self
    }

    pub fn mu(&self) -> f64 {
        self.nonlinearity.mu()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(domain(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.power.is_finite() && self.power >= 3.0) {
            return Err(domain(format!("nonlinearity power must be >= 3, got {}", self.power)));
        }
        if !(self.radius > 0.0) {
            return Err(domain(format!("radius must be positive, got {}", self.radius)));
        }
        if self.truncation && !self.radius.is_finite() {
            return Err(domain("truncation needs a finite radius"));
        }
        Ok(())
    }

    /// Mass-critical exponent `1 + 4/d`.
    pub fn critical_power(dim: usize) -> f64 {
        1.0 + 4.0 / dim as f64
    }

    pub fn criticality(&self, dim: usize) -> Criticality {
        let pc = Self::critical_power(dim);
        if (self.power - pc).abs() < 1e-12 {
            Criticality::MassCritical
        } else if self.power > pc {
            Criticality::MassSupercritical
        } else {
            Criticality::MassSubcritical
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    MassSubcritical,
    MassCritical,
    MassSupercritical,
}
