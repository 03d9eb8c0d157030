use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

/// Uniform tensor grid on `[-L, L)^d` with `N` nodes per axis.
///
/// Node `j` on each axis sits at `-L + j h` with `h = 2L / N`. Flattened
/// storage is row-major: the last axis varies fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    n: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        ensure(dim >= 1, || Error::Parameter("grid dimension must be >= 1".into()))?;
        ensure(half_width.is_finite() && half_width > 0.0, || {
            Error::Parameter(format!("grid half-width must be positive, got {half_width}"))
        })?;
        ensure(n >= 2 && n % 2 == 0, || {
            Error::Parameter(format!("points per axis must be even and >= 2, got {n}"))
        })?;
        ensure((n as f64).powi(dim as i32) < 1e9, || {
            Error::Parameter("grid too large".into())
        })?;
        Ok(Self { dim, half_width, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node `j` along any axis.
    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Frequency of DFT bin `k` in standard FFT ordering.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.n as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 / (2.0 * self.half_width)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rem % self.n;
            rem /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).into_iter().map(|j| self.node(j)).collect()
    }

    /// Index of the node nearest to `x`, if `x` lies on the grid to within `tol`.
    pub fn locate(&self, x: &[f64], tol: f64) -> Option<usize> {
        if x.len() != self.dim {
            return None;
        }
        let h = self.spacing();
        let mut idx = Vec::with_capacity(self.dim);
        for &xi in x {
            let t = (xi + self.half_width) / h;
            let j = t.round();
            if j < 0.0 || j >= self.n as f64 || (t - j).abs() * h > tol {
                return None;
            }
            idx.push(j as usize);
        }
        Some(self.flat_index(&idx))
    }

    /// True when the node touches the outer shell of the grid.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .any(|&j| j == 0 || j == self.n - 1)
    }
}

/// A-priori decay information used to bound truncated integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `|f(x)| <= amplitude * exp(-rate |x|^2)`.
    Gaussian { amplitude: f64, rate: f64 },
    /// `|f(x)| <= amplitude * (1 + |x|)^(-exponent)`.
    Power { amplitude: f64, exponent: f64 },
    /// `f` vanishes outside the ball of this radius.
    Compact { radius: f64 },
    Unknown,
}

impl Decay {
    /// Upper bound for `|f|` at radius `r`.
    pub fn bound(&self, r: f64) -> f64 {
        match *self {
            Decay::Gaussian { amplitude, rate } => amplitude * (-rate * r * r).exp(),
            Decay::Power { amplitude, exponent } => amplitude * (1.0 + r).powf(-exponent),
            Decay::Compact { radius } => {
                if r > radius {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Decay::Unknown => f64::INFINITY,
        }
    }
}

type Evaluator = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A named pointwise evaluator with known decay.
#[derive(Clone)]
pub struct ClosedForm {
    name: String,
    dim: usize,
    decay: Decay,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedForm")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("decay", &self.decay)
            .finish()
    }
}

impl ClosedForm {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        decay: Decay,
        eval: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), dim, decay, eval: Arc::new(eval) }
    }

    /// `exp(-pi |x|^2)`, its own Fourier transform.
    pub fn gaussian(dim: usize) -> Self {
        let decay = Decay::Gaussian { amplitude: 1.0, rate: std::f64::consts::PI };
        Self::new("gaussian", dim, decay, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-std::f64::consts::PI * r2).exp(), 0.0)
        })
    }

    /// `exp(2 pi i a x) exp(-pi x^2)` on the line.
    pub fn modulated_gaussian(a: f64) -> Self {
        let decay = Decay::Gaussian { amplitude: 1.0, rate: std::f64::consts::PI };
        Self::new(format!("modulated_gaussian(a={a})"), 1, decay, move |x| {
            let t = x[0];
            let pi = std::f64::consts::PI;
            Complex64::from_polar((-pi * t * t).exp(), 2.0 * pi * a * t)
        })
    }

    /// `1 / (1 + x^2)` on the line.
    pub fn lorentzian() -> Self {
        let decay = Decay::Power { amplitude: 2.0, exponent: 2.0 };
        Self::new("lorentzian", 1, decay, |x| Complex64::new(1.0 / (1.0 + x[0] * x[0]), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.eval)(x)
    }
}

/// Samples of a function on a [`Grid`], optionally paired with an exact evaluator.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub closed_form: Option<ClosedForm>,
}

impl SampledFunction {
    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        ensure(values.len() == grid.len(), || {
            Error::Parameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            ))
        })?;
        Ok(Self { grid, values, closed_form: None })
    }

    pub fn from_closed_form(grid: Grid, closed_form: ClosedForm) -> Result<Self> {
        ensure(closed_form.dim() == grid.dim(), || {
            Error::Parameter("closed form and grid dimensions differ".into())
        })?;
        let values = (0..grid.len()).map(|i| closed_form.eval(&grid.point(i))).collect();
        Ok(Self { grid, values, closed_form: Some(closed_form) })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest relative disagreement between samples and the closed form.
    pub fn closed_form_mismatch(&self) -> Option<f64> {
        let cf = self.closed_form.as_ref()?;
        let mut worst: f64 = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let exact = cf.eval(&self.grid.point(i));
            worst = worst.max((v - exact).norm() / (1.0 + exact.norm()));
        }
        Some(worst)
    }
}
