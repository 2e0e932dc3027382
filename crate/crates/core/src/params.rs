//! Model parameters of the Ising-phase XXZ chain.
//!
//! The chain is `H = Σ h_{x,x+1} + Σ ν_x N_x` with the anisotropy fixed in the
//! regime `Δ > 1` and the Ising coupling normalized to one. Everything that
//! depends on `Δ` through hyperbolic closed forms uses `ρ = arccosh Δ`, which is
//! computed once here.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};

/// Nonnegative on-site field `ν_x`, stored densely from `origin` and zero
/// everywhere else.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Field {
    origin: i64,
    values: Vec<f64>,
}

impl Field {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Field values for the consecutive sites `origin, origin + 1, ...`.
    pub fn new(origin: i64, values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(param_err(
                "field",
                format!("site value {bad} is not a finite nonnegative number"),
            ));
        }
        Ok(Self { origin, values })
    }

    pub fn at(&self, site: i64) -> f64 {
        let offset = site - self.origin;
        if offset < 0 {
            return 0.0;
        }
        self.values.get(offset as usize).copied().unwrap_or(0.0)
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// `arccosh Δ`, evaluated as `ln(Δ + √(Δ² − 1))` in a form that keeps full
/// relative accuracy for `Δ` close to one.
pub fn rho_of(delta: f64) -> f64 {
    let dm1 = delta - 1.0;
    (dm1 + (dm1 * (delta + 1.0)).sqrt()).ln_1p()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    delta: f64,
    rho: f64,
    n: usize,
    field: Field,
}

impl ModelParams {
    /// Field-free parameters for `n` particles at anisotropy `delta`.
    pub fn new(delta: f64, n: usize) -> Result<Self> {
        if !(delta.is_finite() && delta > 1.0) {
            return Err(param_err(
                "delta",
                format!("anisotropy must satisfy delta > 1, got {delta}"),
            ));
        }
        if n == 0 {
            return Err(param_err("n", "particle number must be at least 1"));
        }
        Ok(Self {
            delta,
            rho: rho_of(delta),
            n,
            field: Field::zero(),
        })
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    /// Same anisotropy and field with a different particle number.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(param_err("n", "particle number must be at least 1"));
        }
        Ok(Self { n, ..self.clone() })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Hopping amplitude `−1/(2Δ)` shared by every representation.
    pub fn hopping(&self) -> f64 {
        -0.5 / self.delta
    }

    /// Operator-norm bound `N(1 + 1/Δ + ν_max)`.
    pub fn norm_bound(&self) -> f64 {
        self.n as f64 * (1.0 + 1.0 / self.delta + self.field.max())
    }
}
