//! DFT-based application of Fourier multipliers on a periodic box.
//!
//! With `f^(xi) = int f(x) exp(-2 pi i xi.x) dx`, bin `k` of the DFT on
//! `[-L, L)^d` carries frequency `k / (2L)`. Applying `m` means scaling each
//! bin by `m(xi_k)`; the phase from the offset `-L` cancels between the
//! forward and inverse transforms.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use upfrac_core::{Error, Grid, Result, SampledFunction};

use crate::multiplier::MultiplierSpec;

/// Tolerances for spectral operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    /// Largest allowed ratio `max_boundary |f| / max |f|`.
    pub tail_tolerance: f64,
    /// Largest allowed fraction of spectral energy at negative frequency
    /// for the half-line identities.
    pub negative_mass_tolerance: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { tail_tolerance: 1e-10, negative_mass_tolerance: 1e-10 }
    }
}

/// In-place multidimensional DFT over a row-major tensor grid.
pub fn fft_nd(values: &mut [Complex64], n: usize, dim: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    let total = values.len();
    debug_assert_eq!(total, n.pow(dim as u32));
    // last axis is contiguous
    fft.process(values);
    if dim == 1 {
        return;
    }
    let batch = 64;
    let mut buf = vec![Complex64::new(0.0, 0.0); n * batch];
    for axis in 0..dim - 1 {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        let lines: Vec<usize> = (0..total / block)
            .flat_map(|outer| (0..stride).map(move |inner| outer * block + inner))
            .collect();
        for chunk in lines.chunks(batch) {
            let used = &mut buf[..chunk.len() * n];
            for (l, &start) in chunk.iter().enumerate() {
                for j in 0..n {
                    used[l * n + j] = values[start + j * stride];
                }
            }
            fft.process(used);
            for (l, &start) in chunk.iter().enumerate() {
                for j in 0..n {
                    values[start + j * stride] = used[l * n + j];
                }
            }
        }
    }
}

fn check_tail(f: &SampledFunction, tol: f64) -> Result<f64> {
    let sup = f.sup_norm();
    if sup == 0.0 {
        return Ok(0.0);
    }
    let edge = f
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| f.grid.is_boundary(*i))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let ratio = edge / sup;
    if ratio > tol {
        return Err(Error::TailMass { ratio, tol });
    }
    Ok(ratio)
}

fn frequency_vector(grid: &Grid, flat: usize) -> Vec<f64> {
    grid.multi_index(flat).into_iter().map(|k| grid.frequency(k)).collect()
}

/// Applies an arbitrary symbol to the samples. The symbol sees the frequency vector.
pub fn apply_symbol(
    f: &SampledFunction,
    cfg: &SpectralConfig,
    symbol: impl Fn(&[f64]) -> Complex64,
) -> Result<SampledFunction> {
    check_tail(f, cfg.tail_tolerance)?;
    let grid = f.grid;
    let n = grid.points_per_axis();
    let mut data = f.values.clone();
    fft_nd(&mut data, n, grid.dim(), FftDirection::Forward);
    for (k, v) in data.iter_mut().enumerate() {
        let m = symbol(&frequency_vector(&grid, k));
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::Symbol(format!(
                "symbol is not finite at frequency {:?}",
                frequency_vector(&grid, k)
            )));
        }
        *v *= m;
    }
    fft_nd(&mut data, n, grid.dim(), FftDirection::Inverse);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    SampledFunction::from_values(grid, data)
}

/// `(T_m f)^ = m f^` on the grid.
pub fn apply_multiplier(
    f: &SampledFunction,
    m: &MultiplierSpec,
    cfg: &SpectralConfig,
) -> Result<SampledFunction> {
    m.validate()?;
    if m.dim != f.grid.dim() {
        return Err(Error::Parameter(format!(
            "multiplier acts in d = {}, function lives in d = {}",
            m.dim,
            f.grid.dim()
        )));
    }
    apply_symbol(f, cfg, |xi| m.symbol(xi))
}

fn require_line(f: &SampledFunction) -> Result<()> {
    if f.grid.dim() != 1 {
        return Err(Error::Parameter("operation is defined on the line only".into()));
    }
    Ok(())
}

/// Hilbert transform with symbol `-i sgn(xi)`, `sgn(0) = 0`.
pub fn hilbert_transform(f: &SampledFunction, cfg: &SpectralConfig) -> Result<SampledFunction> {
    require_line(f)?;
    apply_symbol(f, cfg, |xi| Complex64::new(0.0, -sign(xi[0])))
}

/// Spectral derivative, symbol `2 pi i xi`.
pub fn derivative(f: &SampledFunction, cfg: &SpectralConfig) -> Result<SampledFunction> {
    require_line(f)?;
    apply_symbol(f, cfg, |xi| Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi[0]))
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Fraction of spectral energy carried by negative frequencies.
pub fn negative_frequency_mass(f: &SampledFunction) -> f64 {
    let grid = f.grid;
    let mut data = f.values.clone();
    fft_nd(&mut data, grid.points_per_axis(), grid.dim(), FftDirection::Forward);
    let mut neg = 0.0;
    let mut total = 0.0;
    for (k, v) in data.iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        if grid.frequency(k) < 0.0 {
            neg += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        neg / total
    }
}

/// Sup-norm residuals of the half-line identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalflineResiduals {
    /// `|| H f + i f ||`
    pub hilbert: f64,
    /// `|| 2 pi (-Delta)^{1/2} f - (H f)' ||`
    pub half_laplacian_vs_hilbert: f64,
    /// `|| (-Delta)^{1/2} f - f' / (2 pi i) ||`
    pub half_laplacian_vs_derivative: f64,
    pub sup_norm: f64,
    pub negative_mass: f64,
}

impl HalflineResiduals {
    /// Largest residual relative to `||f||_inf`.
    pub fn max_normalized(&self) -> f64 {
        self.hilbert
            .max(self.half_laplacian_vs_hilbert)
            .max(self.half_laplacian_vs_derivative)
            / self.sup_norm
    }
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Checks the three identities satisfied by functions with spectrum in `[0, inf)`.
pub fn verify_halfline_identities(
    f: &SampledFunction,
    cfg: &SpectralConfig,
) -> Result<HalflineResiduals> {
    require_line(f)?;
    let negative_mass = negative_frequency_mass(f);
    if negative_mass > cfg.negative_mass_tolerance {
        return Err(Error::Precondition(format!(
            "negative-frequency energy fraction {negative_mass:.3e} exceeds {:.1e}",
            cfg.negative_mass_tolerance
        )));
    }
    let sup_norm = f.sup_norm();
    if sup_norm == 0.0 {
        return Err(Error::Degenerate("function is identically zero".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let half = MultiplierSpec::frac_laplacian(0.5, 1)?;
    let hf = hilbert_transform(f, cfg)?;
    let df = derivative(f, cfg)?;
    let dhf = apply_symbol(&hf, &SpectralConfig { tail_tolerance: f64::INFINITY, ..*cfg }, |xi| {
        Complex64::new(0.0, two_pi * xi[0])
    })?;
    let lap = apply_multiplier(f, &half, cfg)?;

    let minus_if: Vec<Complex64> = f.values.iter().map(|v| -Complex64::i() * v).collect();
    let scaled_lap: Vec<Complex64> = lap.values.iter().map(|v| v * two_pi).collect();
    let df_over: Vec<Complex64> = df.values.iter().map(|v| v / Complex64::new(0.0, two_pi)).collect();
    Ok(HalflineResiduals {
        hilbert: sup_diff(&hf.values, &minus_if),
        half_laplacian_vs_hilbert: sup_diff(&scaled_lap, &dhf.values),
        half_laplacian_vs_derivative: sup_diff(&lap.values, &df_over),
        sup_norm,
        negative_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use upfrac_core::ClosedForm;

    fn gaussian(dim: usize, l: f64, n: usize) -> SampledFunction {
        SampledFunction::from_closed_form(Grid::new(dim, l, n).unwrap(), ClosedForm::gaussian(dim)).unwrap()
    }

    #[test]
    fn fft_round_trip_2d() {
        let f = gaussian(2, 4.0, 16);
        let mut v = f.values.clone();
        fft_nd(&mut v, 16, 2, FftDirection::Forward);
        fft_nd(&mut v, 16, 2, FftDirection::Inverse);
        for (a, b) in v.iter().zip(&f.values) {
            assert!((a / 256.0 - b).norm() < 1e-14);
        }
    }

    #[test]
    fn half_laplacian_of_gaussian_at_origin() {
        let f = gaussian(1, 512.0, 1 << 15);
        let m = MultiplierSpec::frac_laplacian(0.5, 1).unwrap();
        let g = apply_multiplier(&f, &m, &SpectralConfig::default()).unwrap();
        let i0 = f.grid.locate(&[0.0], 1e-12).unwrap();
        // the periodic image sum adds roughly (2/pi) sum 1/(2Lk)^2 ~ 1e-6
        assert!((g.values[i0].re - 1.0 / std::f64::consts::PI).abs() < 2e-6);
    }

    #[test]
    fn identity_symbol_is_identity() {
        let f = gaussian(2, 5.0, 32);
        let g = apply_symbol(&f, &SpectralConfig::default(), |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(sup_diff(&f.values, &g.values) < 1e-14);
    }

    #[test]
    fn tail_mass_rejected() {
        let grid = Grid::new(1, 2.0, 64).unwrap();
        let f = SampledFunction::from_closed_form(grid, ClosedForm::lorentzian()).unwrap();
        let m = MultiplierSpec::frac_laplacian(0.5, 1).unwrap();
        assert!(matches!(
            apply_multiplier(&f, &m, &SpectralConfig::default()),
            Err(Error::TailMass { .. })
        ));
    }

    #[test]
    fn non_finite_symbol_rejected() {
        let f = gaussian(1, 8.0, 64);
        let r = apply_symbol(&f, &SpectralConfig::default(), |xi| Complex64::new(1.0 / xi[0], 0.0));
        assert!(matches!(r, Err(Error::Symbol(_))));
    }

    #[test]
    fn dimension_mismatch() {
        let f = gaussian(1, 8.0, 64);
        let m = MultiplierSpec::frac_laplacian(0.5, 2).unwrap();
        assert!(matches!(apply_multiplier(&f, &m, &SpectralConfig::default()), Err(Error::Parameter(_))));
    }

    #[test]
    fn modulated_gaussian_identities() {
        let grid = Grid::new(1, 12.0, 1024).unwrap();
        let f = SampledFunction::from_closed_form(grid, ClosedForm::modulated_gaussian(6.0)).unwrap();
        let r = verify_halfline_identities(&f, &SpectralConfig::default()).unwrap();
        assert!(r.max_normalized() <= 1e-6, "{r:?}");
    }

    #[test]
    fn plain_gaussian_fails_halfline_precondition() {
        let f = gaussian(1, 12.0, 256);
        assert!(matches!(
            verify_halfline_identities(&f, &SpectralConfig::default()),
            Err(Error::Precondition(_))
        ));
    }
}
