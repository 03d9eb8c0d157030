use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Lattice `A Z^d` with dual `A^{-T} Z^d` and fundamental cell `Q_A = A^{-T} [0,1)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct LatticeSpec {
    a: DMatrix<f64>,
    dual: DMatrix<f64>,
    det: f64,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    dim: usize,
    /// Row-major entries of `A`.
    a: Vec<f64>,
}

impl TryFrom<LatticeRepr> for LatticeSpec {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Self> {
        LatticeSpec::from_row_major(r.dim, &r.a)
    }
}

impl From<LatticeSpec> for LatticeRepr {
    fn from(l: LatticeSpec) -> Self {
        LatticeRepr { dim: l.dim(), a: l.row_major() }
    }
}

impl LatticeSpec {
    pub fn from_row_major(dim: usize, entries: &[f64]) -> Result<Self> {
        ensure(dim >= 1, || Error::Parameter("lattice dimension must be >= 1".into()))?;
        ensure(entries.len() == dim * dim, || {
            Error::Parameter(format!("expected {} matrix entries, got {}", dim * dim, entries.len()))
        })?;
        ensure(entries.iter().all(|v| v.is_finite()), || {
            Error::Parameter("matrix entries must be finite".into())
        })?;
        let a = DMatrix::from_row_slice(dim, dim, entries);
        let det = a.determinant();
        let scale = a.norm().max(f64::MIN_POSITIVE).powi(dim as i32);
        ensure(det.abs() > 1e-12 * scale, || {
            Error::Parameter("lattice matrix is singular".into())
        })?;
        let inv = a.clone().try_inverse().ok_or_else(|| {
            Error::Parameter("lattice matrix is singular".into())
        })?;
        Ok(Self { dual: inv.transpose(), a, det })
    }

    pub fn identity(dim: usize) -> Self {
        let mut e = vec![0.0; dim * dim];
        for i in 0..dim {
            e[i * dim + i] = 1.0;
        }
        Self::from_row_major(dim, &e).expect("identity is invertible")
    }

    /// Parses `"a11,a12;a21,a22"` (rows separated by `;`). A bare number is a 1x1 matrix.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Input(format!("bad matrix entry '{v}'")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let dim = rows.len();
        ensure(rows.iter().all(|r| r.len() == dim), || {
            Error::Input(format!("matrix '{text}' is not square"))
        })?;
        Self::from_row_major(dim, &rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn dual_matrix(&self) -> &DMatrix<f64> {
        &self.dual
    }

    pub fn row_major(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d * d).map(|i| self.a[(i / d, i % d)]).collect()
    }

    pub fn lattice_point(&self, k: &[i64]) -> Vec<f64> {
        mat_vec(&self.a, k)
    }

    pub fn dual_point(&self, m: &[i64]) -> Vec<f64> {
        mat_vec(&self.dual, m)
    }

    /// `A^{-T} e_i`.
    pub fn dual_vector(&self, i: usize) -> Vec<f64> {
        self.dual.column(i).iter().copied().collect()
    }

    /// Coordinates `u = A^T xi` of `xi` in the dual basis.
    pub fn cell_coords(&self, xi: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(xi);
        (self.a.transpose() * v).iter().copied().collect()
    }

    pub fn from_cell_coords(&self, u: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(u);
        (&self.dual * v).iter().copied().collect()
    }

    pub fn in_cell(&self, xi: &[f64]) -> bool {
        self.cell_coords(xi).iter().all(|&u| (0.0..1.0).contains(&u))
    }

    /// Splits `xi = l + r` with `l` in the dual lattice and `r` in `Q_A`.
    pub fn reduce(&self, xi: &[f64]) -> (Vec<i64>, Vec<f64>) {
        let u = self.cell_coords(xi);
        let m: Vec<i64> = u.iter().map(|v| v.floor() as i64).collect();
        let l = self.dual_point(&m);
        let r = xi.iter().zip(&l).map(|(a, b)| a - b).collect();
        (m, r)
    }

    /// Euclidean distance from `xi` (assumed inside the cell) to the cell boundary.
    pub fn distance_to_cell_boundary(&self, xi: &[f64]) -> f64 {
        let u = self.cell_coords(xi);
        let mut best = f64::INFINITY;
        for (i, ui) in u.iter().enumerate() {
            // u_i = (A e_i) . xi, so faces are hyperplanes with normal A e_i.
            let col_norm = self.a.column(i).norm();
            best = best.min(ui / col_norm).min((1.0 - ui) / col_norm);
        }
        best
    }
}

fn mat_vec(m: &DMatrix<f64>, k: &[i64]) -> Vec<f64> {
    let d = m.nrows();
    (0..d)
        .map(|i| (0..d).map(|j| m[(i, j)] * k[j] as f64).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_pairing_is_integral() {
        let l = LatticeSpec::parse("1,0.3;0,1").unwrap();
        let x = l.lattice_point(&[3, -2]);
        let xi = l.dual_point(&[1, 4]);
        let dot: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
        assert!((dot - (3 + -8) as f64).abs() < 1e-12);
    }

    #[test]
    fn reduce_lands_in_cell() {
        let l = LatticeSpec::parse("2,0.5;-0.3,1").unwrap();
        let (m, r) = l.reduce(&[3.7, -1.2]);
        assert!(l.in_cell(&r));
        let back: Vec<f64> = l.dual_point(&m).iter().zip(&r).map(|(a, b)| a + b).collect();
        assert!((back[0] - 3.7).abs() < 1e-12 && (back[1] + 1.2).abs() < 1e-12);
    }

    #[test]
    fn singular_and_malformed() {
        assert!(matches!(LatticeSpec::parse("1,2;2,4"), Err(Error::Parameter(_))));
        assert!(matches!(LatticeSpec::parse("1,2;3"), Err(Error::Input(_))));
        assert!(matches!(LatticeSpec::parse("x"), Err(Error::Input(_))));
    }
}
