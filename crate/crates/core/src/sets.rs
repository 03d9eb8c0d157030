//! Discrete frequency sets and their windowed generation.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cov::norm;
use crate::error::{ensure, Error, Result};
use crate::lattice::LatticeSpec;

/// Default cap on the number of generated points.
pub const DEFAULT_POINT_CAP: u64 = 10_000_000;

/// Rule that produced a [`DiscreteSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator")]
pub enum Generator {
    /// `{ +-n^alpha : n >= 1 }` on the line.
    #[serde(rename = "Z_alpha")]
    ZAlpha { alpha: f64 },
    /// `{ c (log|k|)^alpha k/|k| : k in Z^d, |k| > 1 }`.
    #[serde(rename = "Lambda_alpha_c")]
    LambdaAlphaC { alpha: f64, c: f64 },
    #[serde(rename = "lattice")]
    Lattice { lattice: LatticeSpec },
    #[serde(rename = "explicit")]
    Explicit,
}

impl Generator {
    pub fn tag(&self) -> &'static str {
        match self {
            Generator::ZAlpha { .. } => "Z_alpha",
            Generator::LambdaAlphaC { .. } => "Lambda_alpha_c",
            Generator::Lattice { .. } => "lattice",
            Generator::Explicit => "explicit",
        }
    }

    fn params_field(&self) -> String {
        match self {
            Generator::ZAlpha { alpha } => format!("alpha={alpha:?}"),
            Generator::LambdaAlphaC { alpha, c } => format!("alpha={alpha:?};c={c:?}"),
            Generator::Lattice { lattice } => {
                let entries: Vec<String> = lattice.row_major().iter().map(|v| format!("{v:?}")).collect();
                format!("A={}", entries.join(" "))
            }
            Generator::Explicit => String::new(),
        }
    }

    fn from_fields(dim: usize, tag: &str, params: &str) -> Result<Self> {
        let lookup = |key: &str| -> Result<String> {
            params
                .split(';')
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .map(str::to_string)
                .ok_or_else(|| Error::Input(format!("missing parameter '{key}'")))
        };
        let num = |key: &str| -> Result<f64> {
            lookup(key)?
                .parse()
                .map_err(|_| Error::Input(format!("bad value for '{key}'")))
        };
        match tag {
            "Z_alpha" => Ok(Generator::ZAlpha { alpha: num("alpha")? }),
            "Lambda_alpha_c" => Ok(Generator::LambdaAlphaC { alpha: num("alpha")?, c: num("c")? }),
            "lattice" => {
                let entries = lookup("A")?
                    .split_whitespace()
                    .map(|v| v.parse::<f64>().map_err(|_| Error::Input(format!("bad entry '{v}'"))))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(Generator::Lattice { lattice: LatticeSpec::from_row_major(dim, &entries)? })
            }
            "explicit" => Ok(Generator::Explicit),
            other => Err(Error::Input(format!("unknown generator '{other}'"))),
        }
    }
}

/// Finite window `{ x in Gamma : |x| <= R }` of a discrete set.
///
/// Points are sorted lexicographically and free of duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSet {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub generator: Generator,
    pub window_radius: f64,
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl DiscreteSet {
    /// Builds a set from arbitrary points, keeping those inside the window.
    pub fn explicit(dim: usize, points: Vec<Vec<f64>>, window_radius: f64) -> Result<Self> {
        ensure(points.iter().all(|p| p.len() == dim), || {
            Error::Parameter("point dimension mismatch".into())
        })?;
        ensure(points.iter().flatten().all(|v| v.is_finite()), || {
            Error::Parameter("points must be finite".into())
        })?;
        let pts = points.into_iter().filter(|p| norm(p) <= window_radius).collect();
        Ok(Self::normalized(dim, pts, Generator::Explicit, window_radius))
    }

    fn normalized(dim: usize, mut points: Vec<Vec<f64>>, generator: Generator, r: f64) -> Self {
        points.sort_by(|a, b| lex(a, b));
        points.dedup();
        Self { dim, points, generator, window_radius: r }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of a one-dimensional set.
    pub fn coords_1d(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0]).collect()
    }

    /// CSV with a metadata header and one point per row at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,generator,params,R\n");
        let _ = writeln!(
            out,
            "{},{},{},{:?}",
            self.dim,
            self.generator.tag(),
            self.generator.params_field(),
            self.window_radius
        );
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Input("empty set file".into()))?;
        ensure(header.trim() == "dim,generator,params,R", || {
            Error::Input(format!("unexpected header '{header}'"))
        })?;
        let meta = lines.next().ok_or_else(|| Error::Input("missing metadata row".into()))?;
        let fields: Vec<&str> = meta.split(',').collect();
        ensure(fields.len() == 4, || Error::Input(format!("bad metadata row '{meta}'")))?;
        let dim: usize = fields[0].parse().map_err(|_| Error::Input("bad dim".into()))?;
        let generator = Generator::from_fields(dim, fields[1], fields[2])?;
        let r: f64 = fields[3].parse().map_err(|_| Error::Input("bad R".into()))?;
        let mut points = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let p = line
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad coordinate '{v}'"))))
                .collect::<Result<Vec<f64>>>()?;
            ensure(p.len() == dim, || Error::Input(format!("row '{line}' has wrong dimension")))?;
            points.push(p);
        }
        Ok(Self::normalized(dim, points, generator, r))
    }
}

/// All generator points with `|x| <= radius`, capped at [`DEFAULT_POINT_CAP`].
pub fn generate_set(generator: &Generator, dim: usize, radius: f64) -> Result<DiscreteSet> {
    generate_set_capped(generator, dim, radius, DEFAULT_POINT_CAP)
}

pub fn generate_set_capped(
    generator: &Generator,
    dim: usize,
    radius: f64,
    cap: u64,
) -> Result<DiscreteSet> {
    ensure(dim >= 1, || Error::Parameter("dimension must be >= 1".into()))?;
    ensure(radius.is_finite() && radius >= 0.0, || {
        Error::Parameter(format!("window radius must be non-negative, got {radius}"))
    })?;
    let points = match generator {
        Generator::ZAlpha { alpha } => z_alpha(*alpha, dim, radius, cap)?,
        Generator::LambdaAlphaC { alpha, c } => lambda_alpha_c(*alpha, *c, dim, radius, cap)?,
        Generator::Lattice { lattice } => lattice_points(lattice, dim, radius, cap)?,
        Generator::Explicit => {
            return Err(Error::Parameter("explicit sets are built with DiscreteSet::explicit".into()))
        }
    };
    Ok(DiscreteSet::normalized(dim, points, generator.clone(), radius))
}

fn check_cap(requested: f64, cap: u64) -> Result<()> {
    ensure(requested <= cap as f64, || Error::Capacity {
        requested: requested.min(u64::MAX as f64) as u64,
        cap,
    })
}

fn z_alpha(alpha: f64, dim: usize, radius: f64, cap: u64) -> Result<Vec<Vec<f64>>> {
    ensure(alpha.is_finite() && alpha > 0.0, || {
        Error::Parameter(format!("alpha must be positive, got {alpha}"))
    })?;
    ensure(dim == 1, || Error::Parameter("Z_alpha is one-dimensional".into()))?;
    let approx = radius.powf(1.0 / alpha).floor();
    check_cap(2.0 * approx, cap)?;
    let mut n_max = approx as u64;
    while ((n_max + 1) as f64).powf(alpha) <= radius {
        n_max += 1;
    }
    while n_max > 0 && (n_max as f64).powf(alpha) > radius {
        n_max -= 1;
    }
    check_cap(2.0 * n_max as f64, cap)?;
    let mut pts = Vec::with_capacity(2 * n_max as usize);
    for n in 1..=n_max {
        let v = (n as f64).powf(alpha);
        pts.push(vec![v]);
        pts.push(vec![-v]);
    }
    Ok(pts)
}

fn unit_ball_volume(dim: usize) -> f64 {
    let pi = std::f64::consts::PI;
    // V_d = pi^{d/2} / Gamma(d/2 + 1) via the two-step recurrence
    let mut v = if dim % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if dim % 2 == 0 { 0 } else { 1 };
    while k < dim {
        k += 2;
        v *= 2.0 * pi / k as f64;
    }
    v
}

/// Visits every integer vector in the box `[-m, m]^dim`.
fn for_each_in_box(dim: usize, m: i64, mut f: impl FnMut(&[i64])) {
    let mut k = vec![-m; dim];
    loop {
        f(&k);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if k[axis] < m {
                k[axis] += 1;
                for v in k.iter_mut().skip(axis + 1) {
                    *v = -m;
                }
                break;
            }
        }
    }
}

fn lambda_alpha_c(alpha: f64, c: f64, dim: usize, radius: f64, cap: u64) -> Result<Vec<Vec<f64>>> {
    ensure(alpha.is_finite() && alpha > 0.0, || {
        Error::Parameter(format!("alpha must be positive, got {alpha}"))
    })?;
    ensure(c.is_finite() && c > 0.0, || Error::Parameter(format!("c must be positive, got {c}")))?;
    let exponent = (radius / c).powf(1.0 / alpha);
    check_cap(unit_ball_volume(dim) * exponent.min(700.0).exp().powi(dim as i32), cap)?;
    let k_max = exponent.exp();
    let m = k_max.floor() as i64;
    let map = |k: &[i64]| -> Option<Vec<f64>> {
        let r = k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
        if r <= 1.0 {
            return None;
        }
        let rho = c * r.ln().powf(alpha);
        (rho <= radius).then(|| k.iter().map(|&v| rho * v as f64 / r).collect())
    };
    let mut pts = Vec::new();
    if dim == 1 {
        for n in 2..=m {
            for s in [-1, 1] {
                if let Some(p) = map(&[s * n]) {
                    pts.push(p);
                }
            }
        }
    } else {
        for_each_in_box(dim, m, |k| {
            if let Some(p) = map(k) {
                pts.push(p);
            }
        });
    }
    check_cap(pts.len() as f64, cap)?;
    Ok(pts)
}

fn lattice_points(lattice: &LatticeSpec, dim: usize, radius: f64, cap: u64) -> Result<Vec<Vec<f64>>> {
    ensure(lattice.dim() == dim, || Error::Parameter("lattice dimension mismatch".into()))?;
    // |k| <= ||A^{-1}|| |Ak|; the dual matrix is A^{-T}, which has the same norm.
    let inv_norm = lattice.dual_matrix().norm();
    let m = (radius * inv_norm).floor();
    let expected = unit_ball_volume(dim) * radius.powi(dim as i32) / lattice.det().abs();
    check_cap(expected, cap)?;
    check_cap((2.0 * m + 1.0).powi(dim as i32), cap.saturating_mul(64))?;
    let mut pts = Vec::new();
    for_each_in_box(dim, m as i64, |k| {
        let x = lattice.lattice_point(k);
        if norm(&x) <= radius {
            pts.push(x);
        }
    });
    check_cap(pts.len() as f64, cap)?;
    Ok(pts)
}
