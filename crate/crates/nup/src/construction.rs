use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use upfrac_core::{Error, LatticeSpec, Result};
use upfrac_ops::MultiplierSpec;

use crate::bump::{hyperplane_hv, BumpSpec};

/// Which nonvanishing condition on `g_2, g_3` was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certified {
    /// Nonzero on the whole cell `Q_A` (grid check).
    WholeCell,
    /// Nonzero on the closed bump support only.
    Support,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Dual-lattice coefficients of `v_1, v_2, v_3`; `None` gives `e_1, 2e_1, 3e_1`.
    pub shifts: Option<[Vec<i64>; 3]>,
    /// Smallest admissible `|g_2| / max|m|` on the checked set.
    pub denominator_margin: f64,
    /// Grid points per axis for the nonvanishing checks.
    pub check_points: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self { shifts: None, denominator_margin: 1e-6, check_points: 41 }
    }
}

/// The witness `f` with `f(Ak) = T f(Ak) = 0`, described by its Fourier
/// transform on `B_A = (v_1 + Q_A) u (v_2 + Q_A) u (v_3 + Q_A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NupFunction {
    pub lattice: LatticeSpec,
    pub op: MultiplierSpec,
    pub shifts: [Vec<i64>; 3],
    pub v: [Vec<f64>; 3],
    pub bump: BumpSpec,
    pub certified: Certified,
    /// `min |g_2|` and `min |g_3|` over the bump support grid.
    pub min_g: [f64; 2],
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl NupFunction {
    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// `(g_2, g_3)` at `xi`.
    pub fn g(&self, xi: &[f64]) -> (Complex64, Complex64) {
        let m1 = self.op.symbol(&add(xi, &self.v[0]));
        (m1 - self.op.symbol(&add(xi, &self.v[1])), m1 - self.op.symbol(&add(xi, &self.v[2])))
    }

    /// `(a_1, a_2, a_3)` at `xi` in `Q_A`.
    pub fn coefficients(&self, xi: &[f64]) -> [Complex64; 3] {
        let phi = self.bump.eval(xi);
        if phi == 0.0 {
            return [Complex64::new(0.0, 0.0); 3];
        }
        let (g2, g3) = self.g(xi);
        let a3 = Complex64::new(phi, 0.0);
        let a2 = -a3 * g3 / g2;
        [-a2 - a3, a2, a3]
    }

    /// `f^(xi) = sum_j 1_{v_j + Q_A}(xi) a_j(xi - v_j)`.
    pub fn fhat(&self, xi: &[f64]) -> Complex64 {
        let (m, r) = self.lattice.reduce(xi);
        match self.shifts.iter().position(|s| *s == m) {
            Some(j) => self.coefficients(&r)[j],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Fourier transform of `T f`.
    pub fn t_fhat(&self, xi: &[f64]) -> Complex64 {
        let v = self.fhat(xi);
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v * self.op.symbol(xi)
        }
    }

    pub fn in_hat_support(&self, xi: &[f64]) -> bool {
        let (m, _) = self.lattice.reduce(xi);
        self.shifts.contains(&m)
    }

    /// Both rows of the linear system at `xi`: `sum a_j` and `sum m(xi + v_j) a_j`.
    pub fn system_residuals(&self, xi: &[f64]) -> (Complex64, Complex64) {
        let a = self.coefficients(xi);
        let first = a[0] + a[1] + a[2];
        let second = (0..3).map(|j| self.op.symbol(&add(xi, &self.v[j])) * a[j]).sum();
        (first, second)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("nup function serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text).map_err(|e| Error::Input(format!("nup artifact: {e}")))?;
        let cfg = BuildConfig { shifts: Some(raw.shifts.clone()), ..BuildConfig::default() };
        build_nup_with(&raw.lattice, &raw.op, &raw.bump, &cfg)
    }
}

/// Grid over the closed ball, including its boundary sphere in each axis direction.
fn ball_grid(bump: &BumpSpec, n: usize) -> Vec<Vec<f64>> {
    let d = bump.center.len();
    let mut out = Vec::new();
    let total = n.pow(d as u32);
    for flat in 0..total {
        let mut rest = flat;
        let mut p = vec![0.0; d];
        for axis in (0..d).rev() {
            let t = -1.0 + 2.0 * (rest % n) as f64 / (n - 1) as f64;
            p[axis] = t;
            rest /= n;
        }
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12 {
            out.push(bump.center.iter().zip(&p).map(|(c, t)| c + bump.radius * t).collect());
        }
    }
    out
}

fn cell_grid(lattice: &LatticeSpec, n: usize) -> Vec<Vec<f64>> {
    let d = lattice.dim();
    (0..n.pow(d as u32))
        .map(|flat| {
            let mut rest = flat;
            let mut u = vec![0.0; d];
            for axis in (0..d).rev() {
                u[axis] = (rest % n) as f64 / n as f64;
                rest /= n;
            }
            lattice.from_cell_coords(&u)
        })
        .collect()
}

/// Builds the witness for `(-Delta)^s` with the default triple.
pub fn build_nup(lattice: &LatticeSpec, op: &MultiplierSpec, bump: &BumpSpec) -> Result<NupFunction> {
    build_nup_with(lattice, op, bump, &BuildConfig::default())
}

pub fn build_nup_with(
    lattice: &LatticeSpec,
    op: &MultiplierSpec,
    bump: &BumpSpec,
    cfg: &BuildConfig,
) -> Result<NupFunction> {
    let d = lattice.dim();
    op.validate()?;
    bump.validate()?;
    if op.dim != d || bump.center.len() != d {
        return Err(Error::Parameter("lattice, operator and bump dimensions differ".into()));
    }
    if cfg.check_points < 2 {
        return Err(Error::Parameter("check_points must be >= 2".into()));
    }
    let shifts = cfg.shifts.clone().unwrap_or_else(|| {
        let e = |k: i64| (0..d).map(|i| if i == 0 { k } else { 0 }).collect::<Vec<i64>>();
        [e(1), e(2), e(3)]
    });
    if shifts.iter().any(|s| s.len() != d) {
        return Err(Error::Parameter("shift dimension mismatch".into()));
    }
    if shifts[0] == shifts[1] || shifts[1] == shifts[2] || shifts[0] == shifts[2] {
        return Err(Error::Parameter("shifts must be distinct".into()));
    }
    let v = [lattice.dual_point(&shifts[0]), lattice.dual_point(&shifts[1]), lattice.dual_point(&shifts[2])];
    let h = hyperplane_hv(&v[0])?;
    if !(lattice.in_cell(&bump.center) && lattice.distance_to_cell_boundary(&bump.center) > bump.radius) {
        return Err(Error::Precondition("bump support is not inside the open cell".into()));
    }
    let is_frac_default = cfg.shifts.is_none() && matches!(op.kind, upfrac_ops::Multiplier::FracLaplacian { .. });
    if is_frac_default && h.distance(&bump.center) <= bump.radius {
        return Err(Error::Precondition("bump support meets H_v".into()));
    }

    let mut nup = NupFunction {
        lattice: lattice.clone(),
        op: op.clone(),
        shifts,
        v,
        bump: bump.clone(),
        certified: Certified::Support,
        min_g: [0.0; 2],
    };
    let min_over = |pts: &[Vec<f64>]| -> ([f64; 2], f64) {
        let mut mins = [f64::INFINITY; 2];
        let mut scale = 0.0f64;
        for p in pts {
            let (g2, g3) = nup.g(p);
            mins[0] = mins[0].min(g2.norm());
            mins[1] = mins[1].min(g3.norm());
            for vj in &nup.v {
                scale = scale.max(nup.op.symbol(&add(p, vj)).norm());
            }
        }
        (mins, scale)
    };
    let (support_min, scale) = min_over(&ball_grid(bump, cfg.check_points));
    let margin = cfg.denominator_margin * scale.max(f64::MIN_POSITIVE);
    if !(support_min[0] > margin) {
        return Err(Error::Denominator { min: support_min[0], margin });
    }
    let (cell_min, cell_scale) = min_over(&cell_grid(lattice, cfg.check_points));
    let cell_margin = cfg.denominator_margin * cell_scale.max(f64::MIN_POSITIVE);
    if cell_min[0] > cell_margin && cell_min[1] > cell_margin {
        nup.certified = Certified::WholeCell;
    }
    nup.min_g = support_min;
    Ok(nup)
}

/// Weight in the periodized sums.
#[derive(Debug, Clone, Copy)]
pub enum Weight<'a> {
    One,
    Symbol(&'a MultiplierSpec),
}

/// `F_A(xi) = sum_l w(xi + l) f^(xi + l)` over dual lattice vectors whose
/// cell index lies in the bounding box of the three shifts.
pub fn periodize<'a>(nup: &'a NupFunction, weight: Weight<'a>) -> impl Fn(&[f64]) -> Complex64 + 'a {
    let d = nup.dim();
    let lo: Vec<i64> = (0..d).map(|i| nup.shifts.iter().map(|s| s[i]).min().unwrap() - 1).collect();
    let hi: Vec<i64> = (0..d).map(|i| nup.shifts.iter().map(|s| s[i]).max().unwrap() + 1).collect();
    move |xi: &[f64]| {
        let mut total = Complex64::new(0.0, 0.0);
        let mut m = lo.clone();
        loop {
            let l = nup.lattice.dual_point(&m);
            let p = add(xi, &l);
            let f = nup.fhat(&p);
            if f != Complex64::new(0.0, 0.0) {
                total += match weight {
                    Weight::One => f,
                    Weight::Symbol(s) => s.symbol(&p) * f,
                };
            }
            let mut axis = d;
            loop {
                if axis == 0 {
                    return total;
                }
                axis -= 1;
                if m[axis] < hi[axis] {
                    m[axis] += 1;
                    for j in axis + 1..d {
                        m[j] = lo[j];
                    }
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::choose_bump;
    use upfrac_ops::Multiplier;

    fn default_1d(s: f64) -> NupFunction {
        let l = LatticeSpec::identity(1);
        let b = choose_bump(&l, &l.dual_vector(0)).unwrap();
        build_nup(&l, &MultiplierSpec::frac_laplacian(s, 1).unwrap(), &b).unwrap()
    }

    #[test]
    fn half_laplacian_coefficient() {
        let n = default_1d(0.5);
        let a = n.coefficients(&[0.5]);
        let phi = n.bump.eval(&[0.5]);
        assert!((a[1].re + 2.0 * phi).abs() < 1e-15 && a[1].im == 0.0);
        assert_eq!(a[0] + a[1] + a[2], Complex64::new(0.0, 0.0));
        assert_eq!(n.certified, Certified::WholeCell);
    }

    #[test]
    fn shift_formula_places_coefficients() {
        let n = default_1d(0.25);
        let a = n.coefficients(&[0.4]);
        for j in 0..3 {
            assert!((n.fhat(&[j as f64 + 1.4]) - a[j]).norm() < 1e-14);
        }
        assert_eq!(n.fhat(&[0.4]), Complex64::new(0.0, 0.0));
        assert_eq!(n.fhat(&[4.4]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn vanishing_denominator_is_reported() {
        // m constant on [1, 3]: g_2 = 0 everywhere on the cell
        let m = MultiplierSpec::new(
            Multiplier::CustomRadial { profile: vec![[0.0, 1.0, 0.0], [10.0, 1.0, 0.0]] },
            1,
        )
        .unwrap();
        let l = LatticeSpec::identity(1);
        let b = choose_bump(&l, &[1.0]).unwrap();
        assert!(matches!(build_nup(&l, &m, &b), Err(Error::Denominator { .. })));
    }

    #[test]
    fn json_round_trip() {
        let n = default_1d(0.75);
        let back = NupFunction::from_json(&n.to_json()).unwrap();
        assert_eq!(back, n);
    }

    #[test]
    fn periodized_sums_vanish() {
        let n = default_1d(0.5);
        let f = periodize(&n, Weight::One);
        let g = periodize(&n, Weight::Symbol(&n.op));
        for x in [0.3, 0.5, 0.61] {
            assert!(f(&[x]).norm() <= 1e-14 * n.bump.sup_norm());
            assert!(g(&[x]).norm() <= 1e-14 * n.bump.sup_norm());
        }
        let other = MultiplierSpec::frac_laplacian(0.3, 1).unwrap();
        assert!(periodize(&n, Weight::Symbol(&other))(&[0.5]).norm() > 1e-3);
    }
}
