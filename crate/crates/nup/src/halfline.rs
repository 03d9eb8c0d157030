use num_complex::Complex64;
use upfrac_core::{ClosedForm, Decay, Error, GaussLegendre, Grid, Result, SampledFunction};

const ORDER: usize = 16;

fn profile(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn check(a: f64, width: f64) -> Result<()> {
    if !(width.is_finite() && width > 0.0 && a.is_finite()) {
        return Err(Error::Parameter("a and width must be finite with width > 0".into()));
    }
    if a <= width {
        return Err(Error::Domain(format!("support [{}, {}] touches zero", a - width, a + width)));
    }
    Ok(())
}

/// `f(x) = int b((xi - a)/width) exp(2 pi i x xi) dxi` with the smooth bump
/// `b(t) = exp(-1/(1 - t^2))`, so `supp f^ = [a - width, a + width]`.
/// Evaluated by composite Gauss-Legendre with panels scaled to `|x|`.
pub fn halfline_closed_form(a: f64, width: f64) -> Result<ClosedForm> {
    check(a, width)?;
    let gl = GaussLegendre::new(ORDER);
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(ClosedForm::new(format!("halfline(a={a},width={width})"), 1, Decay::Unknown, move |x| {
        let panels = 16 + (2.0 * width * x[0].abs()).ceil() as usize;
        let h = 2.0 / panels as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            for (t, w) in gl.mapped(-1.0 + p as f64 * h, -1.0 + (p + 1) as f64 * h) {
                sum += Complex64::from_polar(width * w * profile(t), two_pi * x[0] * (a + width * t));
            }
        }
        sum
    }))
}

/// Samples of the half-line test function on `[-128, 128)` with `2^14` points.
pub fn halfline_test_function(a: f64, width: f64) -> Result<SampledFunction> {
    halfline_test_function_on(a, width, Grid::new(1, 128.0, 1 << 14)?)
}

/// Samples on `grid` from the trapezoid rule on the grid's own frequencies,
/// which is the `2L`-periodization of `f`; the DFT spectrum is then exactly
/// the sampled `f^` and has no negative part.
pub fn halfline_test_function_on(a: f64, width: f64, grid: Grid) -> Result<SampledFunction> {
    check(a, width)?;
    let nyquist = 0.5 / grid.spacing();
    if grid.dim() != 1 || a + width >= nyquist {
        let required = (4.0 * (a + width) * grid.half_width()).ceil() as usize;
        return Err(Error::Resolution { required, given: grid.points_per_axis() });
    }
    let dxi = 1.0 / (2.0 * grid.half_width());
    let first = ((a - width) / dxi).ceil() as i64;
    let last = ((a + width) / dxi).floor() as i64;
    let bins: Vec<(f64, f64)> = (first..=last)
        .map(|k| {
            let xi = k as f64 * dxi;
            (xi, dxi * profile((xi - a) / width))
        })
        .filter(|b| b.1 > 0.0)
        .collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    let values = (0..grid.len())
        .map(|j| {
            let x = grid.node(j);
            bins.iter().map(|&(xi, w)| Complex64::from_polar(w, two_pi * xi * x)).sum()
        })
        .collect();
    let mut f = SampledFunction::from_values(grid, values)?;
    f.closed_form = Some(halfline_closed_form(a, width)?);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use upfrac_ops::{negative_frequency_mass, verify_halfline_identities, SpectralConfig};

    #[test]
    fn support_must_avoid_zero() {
        assert!(matches!(halfline_test_function(1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn identities_hold() {
        let f = halfline_test_function(2.0, 1.0).unwrap();
        assert!(f.sup_norm() > 0.1);
        assert!(negative_frequency_mass(&f) <= 1e-12);
        let r = verify_halfline_identities(&f, &SpectralConfig::default()).unwrap();
        assert!(r.max_normalized() <= 1e-8, "{r:?}");
    }

    #[test]
    fn samples_match_the_integral() {
        let f = halfline_test_function(2.0, 1.0).unwrap();
        let m = f.closed_form_mismatch().unwrap();
        assert!(m <= 1e-12 * f.sup_norm(), "{m}");
    }
}
