use serde::{Deserialize, Serialize};
use upfrac_core::{Error, LatticeSpec, Result};

/// The affine hyperplane `{xi : xi . normal = offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn contains(&self, xi: &[f64]) -> bool {
        dot(xi, &self.normal) == self.offset
    }

    pub fn distance(&self, xi: &[f64]) -> f64 {
        (dot(xi, &self.normal) - self.offset).abs() / dot(&self.normal, &self.normal).sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `H_v = {xi : |xi + 2v| = |xi + v|} = {xi : xi . v = -(3/2)|v|^2}`.
pub fn hyperplane_hv(v: &[f64]) -> Result<Hyperplane> {
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::Degenerate("H_v needs a nonzero vector".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("non-finite vector".into()));
    }
    Ok(Hyperplane { normal: v.to_vec(), offset: -1.5 * dot(v, v) })
}

/// Bump `amplitude * exp(-1/(1 - |u|^2))` with `u = (xi - center)/radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl BumpSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Parameter(format!("bump radius must be positive, got {}", self.radius)));
        }
        if !(self.amplitude.is_finite() && self.amplitude != 0.0) {
            return Err(Error::Parameter("bump amplitude must be finite and nonzero".into()));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("bump center must be finite".into()));
        }
        Ok(())
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let u2: f64 = xi.iter().zip(&self.center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>()
            / (self.radius * self.radius);
        if u2 < 1.0 {
            self.amplitude * (-1.0 / (1.0 - u2)).exp()
        } else {
            0.0
        }
    }

    /// `||phi||_inf`, attained at the center.
    pub fn sup_norm(&self) -> f64 {
        self.amplitude.abs() * (-1.0f64).exp()
    }

    /// Whether the closed support ball lies in the open cell and misses `h`.
    pub fn admissible(&self, lattice: &LatticeSpec, h: &Hyperplane) -> bool {
        lattice.in_cell(&self.center)
            && lattice.distance_to_cell_boundary(&self.center) > self.radius
            && h.distance(&self.center) > self.radius
    }
}

const COARSE: usize = 65;

/// Deterministic bump placement: the point of a `65^d` grid of cell
/// coordinates that is farthest from `H_v` and the cell boundary, with half
/// that distance as radius.
pub fn choose_bump(lattice: &LatticeSpec, v: &[f64]) -> Result<BumpSpec> {
    let d = lattice.dim();
    if v.len() != d {
        return Err(Error::Parameter("vector dimension does not match the lattice".into()));
    }
    let h = hyperplane_hv(v)?;
    let total = COARSE.pow(d as u32);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut u = vec![0.0; d];
    for flat in 0..total {
        let mut rest = flat;
        for axis in (0..d).rev() {
            u[axis] = (rest % COARSE) as f64 / (COARSE - 1) as f64;
            rest /= COARSE;
        }
        let xi = lattice.from_cell_coords(&u);
        let dist = lattice.distance_to_cell_boundary(&xi).min(h.distance(&xi));
        if best.as_ref().map_or(true, |b| dist > b.0) {
            best = Some((dist, xi));
        }
    }
    let (dist, center) = best.expect("grid is non-empty");
    if !(dist > 0.0) {
        return Err(Error::Degenerate("no interior point avoids H_v".into()));
    }
    Ok(BumpSpec { center, radius: 0.5 * dist, amplitude: 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperplanes() {
        let h = hyperplane_hv(&[1.0]).unwrap();
        assert!(h.contains(&[-1.5]) && !h.contains(&[-1.4]));
        let h = hyperplane_hv(&[1.0, 0.0]).unwrap();
        assert!(h.contains(&[-1.5, 7.0]));
        let h = hyperplane_hv(&[1.0, 1.0]).unwrap();
        assert_eq!(h.offset, -3.0);
        assert!(h.contains(&[-1.0, -2.0]));
        assert!(matches!(hyperplane_hv(&[0.0, 0.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn default_bumps() {
        let l1 = LatticeSpec::identity(1);
        let b = choose_bump(&l1, &l1.dual_vector(0)).unwrap();
        assert_eq!(b.center, vec![0.5]);
        assert_eq!(b.radius, 0.25);
        let l2 = LatticeSpec::identity(2);
        let b = choose_bump(&l2, &l2.dual_vector(0)).unwrap();
        assert_eq!(b.center, vec![0.5, 0.5]);
        let h = hyperplane_hv(&l2.dual_vector(0)).unwrap();
        assert!(b.admissible(&l2, &h));
    }

    #[test]
    fn sheared_bump_is_admissible() {
        let l = LatticeSpec::parse("1,0.3;0,1").unwrap();
        let v = l.dual_vector(0);
        let b = choose_bump(&l, &v).unwrap();
        assert!(b.admissible(&l, &hyperplane_hv(&v).unwrap()));
        assert!(b.radius > 0.2);
    }

    #[test]
    fn bump_profile() {
        let b = BumpSpec { center: vec![0.5], radius: 0.25, amplitude: 2.0 };
        assert_eq!(b.eval(&[0.5]), b.sup_norm());
        assert_eq!(b.eval(&[0.75]), 0.0);
        assert!(b.eval(&[0.7]) > 0.0);
    }
}
