use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use upfrac_core::{Error, GaussLegendre, Result};

use crate::construction::{periodize, NupFunction, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingMode {
    /// Gauss-Legendre on the support of each translate `v_j + Q_A`, with the
    /// same nodes relative to each cell.
    DirectQuadrature,
    /// Integrates the periodized sums `F_A`, `G_A` over `Q_A`.
    Periodization,
    /// Composite Gauss-Legendre over the hull of `B_A`'s support, with panel
    /// edges not aligned to the cells.
    Unaligned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub order: usize,
    /// Panels per axis on one bump support; `None` scales with `K`.
    pub panels: Option<usize>,
    /// Half-width (in lattice coordinates) of the grid `x = A theta`,
    /// `theta in Z^d / 4`, used to estimate `||f||_inf`.
    pub norm_window: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { order: 16, panels: None, norm_window: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingRow {
    pub k: Vec<i64>,
    pub f_residual: f64,
    pub tf_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub mode: VanishingMode,
    pub k_max: i64,
    pub nodes_per_axis: usize,
    pub f_norm: f64,
    pub tf_norm: f64,
    pub rows: Vec<VanishingRow>,
    pub max_f_residual: f64,
    pub max_tf_residual: f64,
}

impl VanishingReport {
    pub fn max_residual(&self) -> f64 {
        self.max_f_residual.max(self.max_tf_residual)
    }

    /// CSV with columns `k_index,f_residual,Tf_residual`; multi-indices are
    /// joined with `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k_index,f_residual,Tf_residual\n");
        for r in &self.rows {
            let k: Vec<String> = r.k.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{},{:.6e},{:.6e}", k.join(";"), r.f_residual, r.tf_residual);
        }
        out
    }
}

/// Tensor-product box of Gauss-Legendre nodes in cell coordinates.
struct TensorBox {
    /// `(u, weight)` per axis.
    axes: Vec<Vec<(f64, f64)>>,
    /// Integrand samples, row-major with the last axis fastest.
    f: Vec<Complex64>,
    tf: Vec<Complex64>,
}

fn panel_nodes(lo: f64, hi: f64, panels: usize, gl: &GaussLegendre) -> Vec<(f64, f64)> {
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|p| gl.mapped(lo + p as f64 * h, lo + (p + 1) as f64 * h).collect::<Vec<_>>())
        .collect()
}

impl TensorBox {
    /// Samples `integrand(u) * weight` on the box `[lo, hi]` with `panels[i]` panels on axis `i`.
    fn new(
        lo: &[f64],
        hi: &[f64],
        panels: &[usize],
        gl: &GaussLegendre,
        mut integrand: impl FnMut(&[f64]) -> (Complex64, Complex64),
    ) -> Self {
        let d = lo.len();
        let axes: Vec<Vec<(f64, f64)>> = (0..d).map(|i| panel_nodes(lo[i], hi[i], panels[i], gl)).collect();
        let total: usize = axes.iter().map(|a| a.len()).product();
        let mut f = Vec::with_capacity(total);
        let mut tf = Vec::with_capacity(total);
        let mut u = vec![0.0; d];
        for flat in 0..total {
            let mut rest = flat;
            let mut w = 1.0;
            for axis in (0..d).rev() {
                let (x, wx) = axes[axis][rest % axes[axis].len()];
                u[axis] = x;
                w *= wx;
                rest /= axes[axis].len();
            }
            let (a, b) = integrand(&u);
            f.push(a * w);
            tf.push(b * w);
        }
        Self { axes, f, tf }
    }

    /// `sum_nodes value * exp(2 pi i theta . u)`, contracting one axis at a time.
    fn eval(&self, theta: &[f64]) -> (Complex64, Complex64) {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut f = self.f.clone();
        let mut tf = self.tf.clone();
        for axis in (0..self.axes.len()).rev() {
            let phases: Vec<Complex64> =
                self.axes[axis].iter().map(|&(u, _)| Complex64::from_polar(1.0, two_pi * theta[axis] * u)).collect();
            let n = phases.len();
            let outer = f.len() / n;
            let mut nf = Vec::with_capacity(outer);
            let mut ntf = Vec::with_capacity(outer);
            for o in 0..outer {
                let (mut a, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for (j, p) in phases.iter().enumerate() {
                    a += f[o * n + j] * p;
                    b += tf[o * n + j] * p;
                }
                nf.push(a);
                ntf.push(b);
            }
            f = nf;
            tf = ntf;
        }
        (f[0], tf[0])
    }
}

fn eval_all(boxes: &[TensorBox], theta: &[f64]) -> (Complex64, Complex64) {
    boxes.iter().map(|b| b.eval(theta)).fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |acc, v| {
        (acc.0 + v.0, acc.1 + v.1)
    })
}

/// Smallest number of nodes per axis that resolves `|theta_i| <= k` over an
/// interval of length `len`.
fn required_nodes(k: f64, len: f64, order: usize) -> usize {
    (4.0 * k * len).ceil() as usize + order
}

pub fn verify_lattice_vanishing(nup: &NupFunction, k_max: i64, mode: VanishingMode) -> Result<VanishingReport> {
    verify_lattice_vanishing_with(nup, k_max, mode, &VerifyConfig::default())
}

pub fn verify_lattice_vanishing_with(
    nup: &NupFunction,
    k_max: i64,
    mode: VanishingMode,
    cfg: &VerifyConfig,
) -> Result<VanishingReport> {
    if k_max < 1 {
        return Err(Error::Parameter(format!("K must be >= 1, got {k_max}")));
    }
    if cfg.order < 2 || !(cfg.norm_window > 0.0) {
        return Err(Error::Parameter("quadrature order must be >= 2 and the norm window positive".into()));
    }
    let d = nup.dim();
    let lattice = &nup.lattice;
    let a = lattice.matrix();
    // support of the bump in cell coordinates
    let cu = lattice.cell_coords(&nup.bump.center);
    let half: Vec<f64> = (0..d).map(|i| nup.bump.radius * a.column(i).norm()).collect();
    let lo: Vec<f64> = (0..d).map(|i| (cu[i] - half[i]).max(0.0)).collect();
    let hi: Vec<f64> = (0..d).map(|i| (cu[i] + half[i]).min(1.0)).collect();
    let len = (0..d).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    let k_theta = (k_max as f64).max(cfg.norm_window);
    let panels = cfg.panels.unwrap_or_else(|| 4 + (k_theta * len).ceil() as usize);
    let gl = GaussLegendre::new(cfg.order);
    let per_support = panels * cfg.order;
    let required = required_nodes(k_theta, len, cfg.order);

    let jac = 1.0 / lattice.det().abs();
    let direct = |xi: &[f64]| (nup.fhat(xi) * jac, nup.t_fhat(xi) * jac);
    let fa = periodize(nup, Weight::One);
    let ga = periodize(nup, Weight::Symbol(&nup.op));
    let shifted_boxes = || -> Vec<TensorBox> {
        nup.shifts
            .iter()
            .map(|s| {
                let l: Vec<f64> = (0..d).map(|i| lo[i] + s[i] as f64).collect();
                let h: Vec<f64> = (0..d).map(|i| hi[i] + s[i] as f64).collect();
                TensorBox::new(&l, &h, &vec![panels; d], &gl, |u| direct(&lattice.from_cell_coords(u)))
            })
            .collect()
    };
    let nodes_per_axis;
    let boxes: Vec<TensorBox> = match mode {
        VanishingMode::DirectQuadrature | VanishingMode::Periodization => {
            if per_support < required {
                return Err(Error::Resolution { required, given: per_support });
            }
            nodes_per_axis = per_support;
            if mode == VanishingMode::Periodization {
                vec![TensorBox::new(&lo, &hi, &vec![panels; d], &gl, |u| {
                    let xi = lattice.from_cell_coords(u);
                    (fa(&xi) * jac, ga(&xi) * jac)
                })]
            } else {
                shifted_boxes()
            }
        }
        VanishingMode::Unaligned => {
            let hl: Vec<f64> =
                (0..d).map(|i| nup.shifts.iter().map(|s| lo[i] + s[i] as f64).fold(f64::INFINITY, f64::min)).collect();
            let hh: Vec<f64> = (0..d)
                .map(|i| nup.shifts.iter().map(|s| hi[i] + s[i] as f64).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            let hull_panels: Vec<usize> =
                (0..d).map(|i| ((panels as f64) * (hh[i] - hl[i]) / (hi[i] - lo[i])).ceil() as usize + 1).collect();
            for i in 0..d {
                let given = hull_panels[i] * cfg.order;
                let required = required_nodes(k_theta, hh[i] - hl[i], cfg.order);
                if given < required {
                    return Err(Error::Resolution { required, given });
                }
            }
            nodes_per_axis = hull_panels.iter().max().unwrap() * cfg.order;
            vec![TensorBox::new(&hl, &hh, &hull_panels, &gl, |u| direct(&lattice.from_cell_coords(u)))]
        }
    };

    // the periodized integrand is zero and carries no information about |f|
    let norm_boxes = if mode == VanishingMode::Periodization { Some(shifted_boxes()) } else { None };
    let nb = norm_boxes.as_deref().unwrap_or(&boxes);
    let steps = (4.0 * cfg.norm_window).round() as i64;
    let (mut f_norm, mut tf_norm) = (0.0f64, 0.0f64);
    for_each_index(d, steps, |j| {
        let theta: Vec<f64> = j.iter().map(|&v| v as f64 / 4.0).collect();
        let (f, tf) = eval_all(nb, &theta);
        f_norm = f_norm.max(f.norm());
        tf_norm = tf_norm.max(tf.norm());
    });
    if f_norm == 0.0 || tf_norm == 0.0 {
        return Err(Error::Degenerate("witness is numerically zero".into()));
    }

    let mut rows = Vec::new();
    for_each_index(d, k_max, |k| {
        let theta: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let (f, tf) = eval_all(&boxes, &theta);
        rows.push(VanishingRow { k: k.to_vec(), f_residual: f.norm() / f_norm, tf_residual: tf.norm() / tf_norm });
    });
    let max_f_residual = rows.iter().map(|r| r.f_residual).fold(0.0, f64::max);
    let max_tf_residual = rows.iter().map(|r| r.tf_residual).fold(0.0, f64::max);
    Ok(VanishingReport { mode, k_max, nodes_per_axis, f_norm, tf_norm, rows, max_f_residual, max_tf_residual })
}

fn for_each_index(d: usize, k: i64, mut f: impl FnMut(&[i64])) {
    let mut idx = vec![-k; d];
    loop {
        f(&idx);
        let mut axis = d;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if idx[axis] < k {
                idx[axis] += 1;
                for j in axis + 1..d {
                    idx[j] = -k;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{build_nup, choose_bump};
    use upfrac_core::LatticeSpec;
    use upfrac_ops::MultiplierSpec;

    fn witness(s: f64) -> NupFunction {
        let l = LatticeSpec::identity(1);
        let b = choose_bump(&l, &l.dual_vector(0)).unwrap();
        build_nup(&l, &MultiplierSpec::frac_laplacian(s, 1).unwrap(), &b).unwrap()
    }

    #[test]
    fn all_modes_vanish() {
        let n = witness(0.5);
        for mode in [VanishingMode::DirectQuadrature, VanishingMode::Periodization, VanishingMode::Unaligned] {
            let r = verify_lattice_vanishing(&n, 20, mode).unwrap();
            assert_eq!(r.rows.len(), 41);
            assert!(r.max_residual() <= 1e-8, "{mode:?} {}", r.max_residual());
        }
    }

    #[test]
    fn origin_vanishes() {
        let r = verify_lattice_vanishing(&witness(0.25), 1, VanishingMode::DirectQuadrature).unwrap();
        assert!(r.rows[1].f_residual < 1e-14);
    }

    #[test]
    fn under_resolved() {
        let cfg = VerifyConfig { panels: Some(1), ..VerifyConfig::default() };
        let r = verify_lattice_vanishing_with(&witness(0.5), 40, VanishingMode::DirectQuadrature, &cfg);
        assert!(matches!(r, Err(Error::Resolution { .. })));
    }

    #[test]
    fn csv_layout() {
        let r = verify_lattice_vanishing(&witness(0.5), 1, VanishingMode::DirectQuadrature).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("k_index,f_residual,Tf_residual\n-1,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
