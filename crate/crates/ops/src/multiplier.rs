use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use upfrac_core::{norm, Error, Result};

/// Radial Fourier multipliers `m(xi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Multiplier {
    /// `|xi|^{2s}`
    FracLaplacian { s: f64 },
    /// `(|xi|^2 + lambda)^s`
    ShiftedFrac { s: f64, lambda: f64 },
    /// `exp(i (|xi|^2 + lambda)^s)`
    Unimodular { s: f64, lambda: f64 },
    /// `exp(i |xi|^{2s}) / (1 + |xi|^2)^{gamma/2}`
    Mixed { s: f64, gamma: f64 },
    /// Piecewise-linear profile in `|xi|` given as `[r, re, im]` rows,
    /// held constant beyond the last row.
    CustomRadial { profile: Vec<[f64; 3]> },
}

/// A multiplier together with the dimension it acts in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    #[serde(flatten)]
    pub kind: Multiplier,
    #[serde(default = "one", rename = "d")]
    pub dim: usize,
}

fn one() -> usize {
    1
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive, got {v}")))
    }
}

impl MultiplierSpec {
    pub fn new(kind: Multiplier, dim: usize) -> Result<Self> {
        let spec = Self { kind, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn frac_laplacian(s: f64, dim: usize) -> Result<Self> {
        Self::new(Multiplier::FracLaplacian { s }, dim)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("multiplier config: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("multiplier serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Parameter("multiplier dimension must be >= 1".into()));
        }
        match &self.kind {
            Multiplier::FracLaplacian { s } => positive("s", *s),
            Multiplier::ShiftedFrac { s, lambda } | Multiplier::Unimodular { s, lambda } => {
                positive("s", *s)?;
                if lambda.is_finite() && *lambda >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("lambda must be >= 0, got {lambda}")))
                }
            }
            Multiplier::Mixed { s, gamma } => {
                positive("s", *s)?;
                positive("gamma", *gamma)
            }
            Multiplier::CustomRadial { profile } => {
                if profile.len() < 2 {
                    return Err(Error::Parameter("custom profile needs at least two rows".into()));
                }
                if profile.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::Symbol("custom profile has non-finite entries".into()));
                }
                if profile[0][0] != 0.0 || profile.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(Error::Parameter(
                        "custom profile radii must start at 0 and increase".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `m` as a function of `|xi|`.
    pub fn radial(&self, r: f64) -> Complex64 {
        match &self.kind {
            Multiplier::FracLaplacian { s } => Complex64::new(r.powf(2.0 * s), 0.0),
            Multiplier::ShiftedFrac { s, lambda } => Complex64::new((r * r + lambda).powf(*s), 0.0),
            Multiplier::Unimodular { s, lambda } => Complex64::from_polar(1.0, (r * r + lambda).powf(*s)),
            Multiplier::Mixed { s, gamma } => {
                Complex64::from_polar((1.0 + r * r).powf(-0.5 * gamma), r.powf(2.0 * s))
            }
            Multiplier::CustomRadial { profile } => {
                let i = profile.partition_point(|row| row[0] <= r);
                if i >= profile.len() {
                    let last = profile[profile.len() - 1];
                    return Complex64::new(last[1], last[2]);
                }
                let (lo, hi) = (profile[i - 1], profile[i]);
                let t = (r - lo[0]) / (hi[0] - lo[0]);
                Complex64::new(lo[1] + t * (hi[1] - lo[1]), lo[2] + t * (hi[2] - lo[2]))
            }
        }
    }

    pub fn symbol(&self, xi: &[f64]) -> Complex64 {
        self.radial(norm(xi))
    }

    /// Exponent `p` with `|m(xi)| <= C (1 + |xi|)^p`.
    pub fn growth_exponent(&self) -> f64 {
        match &self.kind {
            Multiplier::FracLaplacian { s } | Multiplier::ShiftedFrac { s, .. } => 2.0 * s,
            Multiplier::Mixed { gamma, .. } => -gamma,
            Multiplier::Unimodular { .. } | Multiplier::CustomRadial { .. } => 0.0,
        }
    }
}
