//! Pointwise fractional Laplacian from the hypersingular integral
//!
//! ```text
//! (-Delta)^s f(x) = c(d,s) p.v. int (f(x) - f(w)) / |x - w|^{d+2s} dw
//! ```
//!
//! evaluated in polar coordinates around `x` with the symmetric second
//! difference `2 f(x) - f(x + r theta) - f(x - r theta)`. Near the origin the
//! difference is fitted by `a2 r^2 + a4 r^4` and integrated exactly; the rest
//! uses geometric then uniform Gauss-Legendre panels, and the far tail where
//! only `2 f(x)` survives is integrated in closed form.
//!
//! `c(d,s)` normalizes the operator with symbol `|2 pi xi|^{2s}`. The
//! evaluators here return the operator with symbol `|xi|^{2s}`, matching
//! [`crate::apply_multiplier`], so the integral is scaled by `(2 pi)^{-2s}`.

use num_complex::Complex64;
use statrs::function::gamma::gamma;
use upfrac_core::{ClosedForm, Decay, Error, GaussLegendre, Result, SampledFunction};

/// Normalizing constant `c(d,s) = 4^s Gamma(d/2 + s) / (pi^{d/2} |Gamma(-s)|)`.
pub fn frac_laplacian_constant(dim: usize, s: f64) -> Result<f64> {
    check_s(s)?;
    let d = dim as f64;
    Ok(4f64.powf(s) * gamma(0.5 * d + s) / (std::f64::consts::PI.powf(0.5 * d) * gamma(-s).abs()))
}

/// `C_s = 2^{2s-1} Gamma(s) / Gamma(1-s)`.
pub fn extension_constant(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(2f64.powf(2.0 * s - 1.0) * gamma(s) / gamma(1.0 - s))
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("s must lie in (0, 1), got {s}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// End of the geometrically graded near field.
    pub near_radius: f64,
    /// Start of the closed-form tail; chosen from the decay bound when `None`.
    pub far_radius: Option<f64>,
    /// Gauss-Legendre order per panel, at least 4.
    pub panel_order: usize,
    /// Width of the uniform panels between the near field and the tail.
    pub panel_width: f64,
    /// Trapezoid nodes on the half circle (`d = 2`) or azimuthal nodes (`d = 3`).
    pub angular_nodes: usize,
    /// Pair `y` with `-y`. Only the symmetric form is implemented.
    pub pv_symmetric: bool,
    /// Absolute error target; larger estimates raise an accuracy error.
    pub target: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            near_radius: 1.0,
            far_radius: None,
            panel_order: 16,
            panel_width: 0.25,
            angular_nodes: 256,
            pv_symmetric: true,
            target: 1e-6,
        }
    }
}

/// Value with a refinement-based error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

fn far_radius(decay: Decay, x_norm: f64, q: &QuadratureConfig) -> Result<f64> {
    if let Some(r) = q.far_radius {
        return Ok(r);
    }
    let r = match decay {
        Decay::Gaussian { rate, .. } => x_norm + (42.0 / rate).sqrt(),
        Decay::Compact { radius } => x_norm + radius,
        Decay::Power { .. } => x_norm + 1e4,
        Decay::Unknown => {
            return Err(Error::Evaluator(
                "decay of the evaluator is unknown; set far_radius explicitly".into(),
            ))
        }
    };
    Ok(r.max(q.near_radius + q.panel_width))
}

/// Radial integral of `D(r) r^{-1-2s}` over `(0, far)` for one direction.
fn radial_integral(
    diff: &dyn Fn(f64) -> Complex64,
    s: f64,
    near: f64,
    far: f64,
    gl: &GaussLegendre,
    width: f64,
    refine: usize,
) -> Complex64 {
    let eps = 1e-3 * near;
    let weight = |r: f64| r.powf(-1.0 - 2.0 * s);
    // D(r) ~ a2 r^2 + a4 r^4 on (0, eps]
    let p = diff(eps);
    let q = diff(0.5 * eps);
    let a4e4 = (p - q * 4.0) * (4.0 / 3.0);
    let a2e2 = p - a4e4;
    let mut total = (a2e2 / (2.0 - 2.0 * s) + a4e4 / (4.0 - 2.0 * s)) * eps.powf(-2.0 * s);

    let mut panel = |lo: f64, hi: f64| {
        let h = (hi - lo) / refine as f64;
        for j in 0..refine {
            let a = lo + j as f64 * h;
            for (r, w) in gl.mapped(a, a + h) {
                total += diff(r) * (w * weight(r));
            }
        }
    };
    let mut lo = eps;
    while lo < near {
        let hi = (2.0 * lo).min(near);
        panel(lo, hi);
        lo = hi;
    }
    let count = ((far - near) / width).ceil().max(1.0) as usize;
    let h = (far - near) / count as f64;
    for j in 0..count {
        panel(near + j as f64 * h, near + (j + 1) as f64 * h);
    }
    total
}

fn directions(dim: usize, m: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let pi = std::f64::consts::PI;
    match dim {
        // both signs give the same symmetric difference
        1 => Ok(vec![(vec![1.0], 1.0)]),
        // theta and theta + pi coincide, so half the circle suffices
        2 => Ok((0..m)
            .map(|j| {
                let t = pi * j as f64 / m as f64;
                (vec![t.cos(), t.sin()], pi / m as f64)
            })
            .collect()),
        3 => {
            let gl = GaussLegendre::new(m / 2);
            let mut out = Vec::new();
            for (z, wz) in gl.mapped(-1.0, 1.0) {
                let rho = (1.0 - z * z).sqrt();
                for j in 0..m {
                    let t = 2.0 * pi * j as f64 / m as f64;
                    out.push((vec![rho * t.cos(), rho * t.sin(), z], 0.5 * wz * 2.0 * pi / m as f64));
                }
            }
            Ok(out)
        }
        _ => Err(Error::Parameter(format!(
            "singular quadrature is implemented for d <= 3, got {dim}"
        ))),
    }
}

fn evaluate(
    f: &ClosedForm,
    s: f64,
    x: &[f64],
    q: &QuadratureConfig,
    far: f64,
    refine: usize,
    angular: usize,
) -> Result<Complex64> {
    let gl = GaussLegendre::new(q.panel_order);
    let fx = f.eval(x);
    let dim = x.len();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut plus = vec![0.0; dim];
    let mut minus = vec![0.0; dim];
    for (theta, w) in directions(dim, angular)? {
        let diff = |r: f64| {
            let mut p = plus.clone();
            let mut m = minus.clone();
            for i in 0..dim {
                p[i] = x[i] + r * theta[i];
                m[i] = x[i] - r * theta[i];
            }
            fx * 2.0 - f.eval(&p) - f.eval(&m)
        };
        let radial = radial_integral(&diff, s, q.near_radius, far, &gl, q.panel_width, refine);
        // tail where f(x +- r theta) is negligible
        let tail = fx * (2.0 * far.powf(-2.0 * s) / (2.0 * s));
        sum += (radial + tail) * w;
        plus.iter_mut().for_each(|v| *v = 0.0);
        minus.iter_mut().for_each(|v| *v = 0.0);
    }
    Ok(sum * symbol_normalized_constant(dim, s)?)
}

fn symbol_normalized_constant(dim: usize, s: f64) -> Result<f64> {
    Ok(frac_laplacian_constant(dim, s)? * (2.0 * std::f64::consts::PI).powf(-2.0 * s))
}

/// `(-Delta)^s f(x)` for an evaluator with known decay.
pub fn frac_laplacian_at(
    f: &ClosedForm,
    s: f64,
    x: &[f64],
    q: &QuadratureConfig,
) -> Result<Estimate> {
    check_s(s)?;
    if x.len() != f.dim() {
        return Err(Error::Parameter("point and evaluator dimensions differ".into()));
    }
    if q.panel_order < 4 {
        return Err(Error::Parameter("panel order must be at least 4".into()));
    }
    if !q.pv_symmetric {
        return Err(Error::Parameter(
            "only the symmetric principal-value pairing is supported".into(),
        ));
    }
    if !(q.near_radius > 0.0 && q.panel_width > 0.0 && q.angular_nodes >= 8) {
        return Err(Error::Parameter("invalid quadrature configuration".into()));
    }
    let x_norm = upfrac_core::norm(x);
    let far = far_radius(f.decay(), x_norm, q)?;
    if far <= q.near_radius {
        return Err(Error::Parameter("far radius must exceed near radius".into()));
    }
    let coarse = evaluate(f, s, x, q, far, 1, q.angular_nodes / 2)?;
    let fine = evaluate(f, s, x, q, far, 2, q.angular_nodes)?;
    // contribution of f(x +- r theta) beyond the far radius
    let escaped = f.decay().bound((far - x_norm).max(0.0));
    let tail_bound = symbol_normalized_constant(x.len(), s)? * 2.0 * escaped * far.powf(-2.0 * s) / (2.0 * s)
        * if x.len() == 1 { 1.0 } else { std::f64::consts::PI * 2.0 };
    let floor = 1e-14 * (1.0 + fine.norm());
    let error = (fine - coarse).norm() + tail_bound + floor;
    if error > q.target {
        return Err(Error::Accuracy { estimate: error, target: q.target });
    }
    Ok(Estimate { value: fine, error })
}

/// Singular-integral evaluation at `x` using the closed form attached to `f`.
pub fn frac_laplacian_singular(
    f: &SampledFunction,
    s: f64,
    x: &[f64],
    q: &QuadratureConfig,
) -> Result<Estimate> {
    let cf = f
        .closed_form
        .as_ref()
        .ok_or_else(|| Error::Evaluator("sampled function has no closed form".into()))?;
    frac_laplacian_at(cf, s, x, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let pi = std::f64::consts::PI;
        assert!((frac_laplacian_constant(1, 0.5).unwrap() - 1.0 / pi).abs() < 1e-15);
        // c(2, 1/2) = Gamma(3/2) * 2 / (pi * 2 sqrt(pi)) = 1 / (2 pi)
        assert!((frac_laplacian_constant(2, 0.5).unwrap() - 0.5 / pi).abs() < 1e-15);
        assert!((extension_constant(0.5).unwrap() - 1.0).abs() < 1e-15);
        let c = extension_constant(0.25).unwrap();
        assert!((c - 2.092_098_3).abs() < 1e-6, "{c}");
        for bad in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(extension_constant(bad), Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn gaussian_at_origin() {
        let g = ClosedForm::gaussian(1);
        let e = frac_laplacian_at(&g, 0.5, &[0.0], &QuadratureConfig::default()).unwrap();
        assert!((e.value.re - 1.0 / std::f64::consts::PI).abs() < 1e-10, "{e:?}");
    }

    #[test]
    fn missing_evaluator() {
        let grid = upfrac_core::Grid::new(1, 4.0, 16).unwrap();
        let f = SampledFunction::from_values(grid, vec![Complex64::new(0.0, 0.0); 16]).unwrap();
        assert!(matches!(
            frac_laplacian_singular(&f, 0.5, &[0.0], &QuadratureConfig::default()),
            Err(Error::Evaluator(_))
        ));
    }

    #[test]
    fn unreachable_target() {
        let g = ClosedForm::gaussian(1);
        let q = QuadratureConfig { target: 1e-30, ..Default::default() };
        assert!(matches!(frac_laplacian_at(&g, 0.5, &[0.3], &q), Err(Error::Accuracy { .. })));
    }
}
