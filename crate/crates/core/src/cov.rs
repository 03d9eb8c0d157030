//! Radial changes of variables used to compare sets with the integer lattice.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Monotone radial map `F` with explicit inverse.
///
/// * `Identity`
/// * `GAlpha`: `y -> sgn(y) |y|^(1/alpha)`, one dimension only
/// * `PhiAlphaC`: `x -> (x/|x|) exp((|x|/c)^(1/alpha))`, undefined at the origin,
///   with inverse `xi -> c (log|xi|)^alpha xi/|xi|` for `|xi| > 1`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ChangeOfVariables {
    #[serde(rename = "identity")]
    Identity,
    #[serde(rename = "G_alpha")]
    GAlpha { alpha: f64 },
    #[serde(rename = "Phi_alpha_c")]
    PhiAlphaC { alpha: f64, c: f64 },
}

impl ChangeOfVariables {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            ChangeOfVariables::Identity => Ok(()),
            ChangeOfVariables::GAlpha { alpha } => {
                ensure(alpha.is_finite() && alpha > 0.0, || {
                    Error::Parameter(format!("alpha must be positive, got {alpha}"))
                })?;
                ensure(dim == 1, || Error::Domain("G_alpha is defined only for d = 1".into()))
            }
            ChangeOfVariables::PhiAlphaC { alpha, c } => {
                ensure(alpha.is_finite() && alpha > 0.0, || {
                    Error::Parameter(format!("alpha must be positive, got {alpha}"))
                })?;
                ensure(c.is_finite() && c > 0.0, || {
                    Error::Parameter(format!("c must be positive, got {c}"))
                })
            }
        }
    }

    /// Radial profile `|F(x)|` as a function of `|x|`.
    pub fn radial(&self, r: f64) -> f64 {
        match *self {
            ChangeOfVariables::Identity => r,
            ChangeOfVariables::GAlpha { alpha } => r.powf(1.0 / alpha),
            ChangeOfVariables::PhiAlphaC { alpha, c } => ((r / c).powf(1.0 / alpha)).exp(),
        }
    }

    /// Inverse of [`radial`](Self::radial).
    pub fn radial_inverse(&self, rho: f64) -> f64 {
        match *self {
            ChangeOfVariables::Identity => rho,
            ChangeOfVariables::GAlpha { alpha } => rho.powf(alpha),
            ChangeOfVariables::PhiAlphaC { alpha, c } => c * rho.ln().powf(alpha),
        }
    }

    /// Derivative of the radial profile.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        match *self {
            ChangeOfVariables::Identity => 1.0,
            ChangeOfVariables::GAlpha { alpha } => r.powf(1.0 / alpha - 1.0) / alpha,
            ChangeOfVariables::PhiAlphaC { alpha, c } => {
                let t = (r / c).powf(1.0 / alpha);
                t.exp() * t / (alpha * r)
            }
        }
    }

    /// Infimum of `|F(x)|`; image points never lie inside this radius.
    pub fn image_inner_radius(&self) -> f64 {
        match self {
            ChangeOfVariables::PhiAlphaC { .. } => 1.0,
            _ => 0.0,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.validate(x.len())?;
        let r = norm(x);
        match self {
            ChangeOfVariables::Identity => Ok(x.to_vec()),
            ChangeOfVariables::GAlpha { .. } => {
                Ok(vec![x[0].signum() * self.radial(r) * (r > 0.0) as u8 as f64])
            }
            ChangeOfVariables::PhiAlphaC { .. } => {
                ensure(r > 0.0, || Error::Domain("Phi is undefined at the origin".into()))?;
                let rho = self.radial(r);
                ensure(rho.is_finite(), || Error::Domain(format!("Phi overflows at |x| = {r}")))?;
                Ok(x.iter().map(|v| v * (rho / r)).collect())
            }
        }
    }

    pub fn inverse(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.validate(xi.len())?;
        let rho = norm(xi);
        match self {
            ChangeOfVariables::Identity => Ok(xi.to_vec()),
            ChangeOfVariables::GAlpha { .. } => {
                Ok(vec![xi[0].signum() * self.radial_inverse(rho) * (rho > 0.0) as u8 as f64])
            }
            ChangeOfVariables::PhiAlphaC { .. } => {
                ensure(rho > 1.0, || {
                    Error::Domain(format!("Phi inverse needs |xi| > 1, got {rho}"))
                })?;
                let scale = self.radial_inverse(rho) / rho;
                Ok(xi.iter().map(|v| v * scale).collect())
            }
        }
    }

    /// `F'(x)` in one dimension.
    pub fn derivative_1d(&self, x: f64) -> Result<f64> {
        self.validate(1)?;
        if let ChangeOfVariables::PhiAlphaC { .. } = self {
            ensure(x != 0.0, || Error::Domain("Phi is undefined at the origin".into()))?;
        }
        Ok(self.radial_derivative(x.abs()))
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
