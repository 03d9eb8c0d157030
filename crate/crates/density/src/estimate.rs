use std::collections::HashMap;
use std::fmt::Write as _;

use upfrac_core::{norm, ChangeOfVariables, DiscreteSet, Error, Result};

/// Extremal counts over intervals (d = 1) or balls (d >= 2) of volume `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub r_values: Vec<f64>,
    pub sup_counts: Vec<u64>,
    pub inf_counts: Vec<u64>,
    /// `sup_count / r` at the largest window.
    pub upper: f64,
    /// `inf_count / r` at the largest window.
    pub lower: f64,
    pub trend: Trend,
}

/// Whether the upper and lower ratios close in as `r` grows.
#[derive(Debug, Clone, PartialEq)]
pub struct Trend {
    pub spread: Vec<f64>,
    pub converging: bool,
}

impl DensityEstimate {
    pub fn sup_ratios(&self) -> Vec<f64> {
        self.sup_counts.iter().zip(&self.r_values).map(|(c, r)| *c as f64 / r).collect()
    }

    pub fn inf_ratios(&self) -> Vec<f64> {
        self.inf_counts.iter().zip(&self.r_values).map(|(c, r)| *c as f64 / r).collect()
    }

    /// CSV with columns `r,sup_ratio,inf_ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,sup_ratio,inf_ratio\n");
        for ((r, s), i) in self.r_values.iter().zip(self.sup_ratios()).zip(self.inf_ratios()) {
            let _ = writeln!(out, "{r:.16e},{s:.16e},{i:.16e}");
        }
        out
    }
}

pub(crate) fn images(set: &DiscreteSet, map: &ChangeOfVariables) -> Result<Vec<Vec<f64>>> {
    map.validate(set.dim)?;
    set.points.iter().map(|p| map.forward(p)).collect()
}

/// Admissible region for windows of volume `r`, as radial bounds `[inner, outer]`.
fn admissible(set: &DiscreteSet, map: &ChangeOfVariables, r: f64) -> (f64, f64) {
    let outer = map.radial(set.window_radius);
    let inner = if map.image_inner_radius() > 0.0 {
        map.image_inner_radius() + r.powf(1.0 / set.dim as f64)
    } else {
        0.0
    };
    (inner, outer)
}

/// Estimates upper and lower Beurling densities of `F(Gamma)`.
///
/// In one dimension every closed interval `[t, t + r]` inside the covered
/// image is considered; the count only changes at image points and at image
/// points shifted by `r`, so those events and the midpoints between them are
/// exhaustive. In higher dimension closed balls of volume `r` are centred on
/// a grid of pitch `r^{1/d}/8` and on the image points.
pub fn estimate_density(
    set: &DiscreteSet,
    map: &ChangeOfVariables,
    r_values: &[f64],
) -> Result<DensityEstimate> {
    if r_values.is_empty() || r_values.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Parameter("window sizes must be positive".into()));
    }
    let mut rs = r_values.to_vec();
    rs.sort_by(f64::total_cmp);
    let pts = images(set, map)?;
    let mut sup_counts = Vec::new();
    let mut inf_counts = Vec::new();
    if set.dim == 1 {
        let mut ys: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        ys.sort_by(f64::total_cmp);
        for &r in &rs {
            let (inner, outer) = admissible(set, map, r);
            let (s, i) = extremes_1d(&ys, r, inner, outer)?;
            sup_counts.push(s);
            inf_counts.push(i);
        }
    } else {
        for &r in &rs {
            let (inner, outer) = admissible(set, map, r);
            let (s, i) = extremes_balls(&pts, set.dim, r, inner, outer)?;
            sup_counts.push(s);
            inf_counts.push(i);
        }
    }
    let last = rs.len() - 1;
    let spread: Vec<f64> = (0..rs.len())
        .map(|k| (sup_counts[k] as f64 - inf_counts[k] as f64) / rs[k])
        .collect();
    let converging = spread.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok(DensityEstimate {
        upper: sup_counts[last] as f64 / rs[last],
        lower: inf_counts[last] as f64 / rs[last],
        r_values: rs,
        sup_counts,
        inf_counts,
        trend: Trend { spread, converging },
    })
}

fn count_closed(ys: &[f64], lo: f64, hi: f64) -> u64 {
    (ys.partition_point(|&y| y <= hi) - ys.partition_point(|&y| y < lo)) as u64
}

fn extremes_1d(ys: &[f64], r: f64, inner: f64, outer: f64) -> Result<(u64, u64)> {
    // admissible placements t of [t, t + r]
    let mut pieces = Vec::new();
    if inner == 0.0 {
        if 2.0 * outer >= r {
            pieces.push((-outer, outer - r));
        }
    } else if outer - inner >= r {
        pieces.push((-outer, -inner - r));
        pieces.push((inner, outer - r));
    }
    if pieces.is_empty() {
        return Err(Error::Coverage(format!(
            "window of length {r} does not fit in the covered image (radius {outer})"
        )));
    }
    let mut events: Vec<f64> = ys.iter().flat_map(|&y| [y, y - r]).collect();
    events.sort_by(f64::total_cmp);
    events.dedup();
    let mut sup = 0;
    let mut inf = u64::MAX;
    for (a, b) in pieces {
        let mut visit = |t: f64| {
            let c = count_closed(ys, t, t + r);
            sup = sup.max(c);
            inf = inf.min(c);
        };
        visit(a);
        visit(b);
        let start = events.partition_point(|&e| e < a);
        let end = events.partition_point(|&e| e <= b);
        let inside = &events[start..end];
        for &e in inside {
            visit(e);
        }
        let mut prev = a;
        for &e in inside.iter().chain(std::iter::once(&b)) {
            if e > prev {
                visit(0.5 * (prev + e));
            }
            prev = e;
        }
    }
    Ok((sup, inf))
}

fn unit_ball_volume(dim: usize) -> f64 {
    let mut v = if dim % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if dim % 2 == 0 { 0 } else { 1 };
    while k < dim {
        k += 2;
        v *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v
}

/// Uniform bucket grid for radius queries.
pub(crate) struct Buckets<'a> {
    cell: f64,
    map: HashMap<Vec<i64>, Vec<&'a [f64]>>,
}

impl<'a> Buckets<'a> {
    pub(crate) fn new(pts: &'a [Vec<f64>], cell: f64) -> Self {
        let mut map: HashMap<Vec<i64>, Vec<&[f64]>> = HashMap::new();
        for p in pts {
            map.entry(Self::key(p, cell)).or_default().push(p);
        }
        Self { cell, map }
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|v| (v / cell).floor() as i64).collect()
    }

    /// Calls `f` on every stored point within `reach` cells of `c`.
    pub(crate) fn visit(&self, c: &[f64], reach: i64, mut f: impl FnMut(&[f64])) {
        let base = Self::key(c, self.cell);
        let d = base.len();
        let mut off = vec![-reach; d];
        loop {
            let k: Vec<i64> = base.iter().zip(&off).map(|(a, b)| a + b).collect();
            if let Some(v) = self.map.get(&k) {
                v.iter().for_each(|p| f(p));
            }
            let mut axis = d;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if off[axis] < reach {
                    off[axis] += 1;
                    off.iter_mut().skip(axis + 1).for_each(|o| *o = -reach);
                    break;
                }
            }
        }
    }
}

fn extremes_balls(pts: &[Vec<f64>], dim: usize, r: f64, inner: f64, outer: f64) -> Result<(u64, u64)> {
    let rho = (r / unit_ball_volume(dim)).powf(1.0 / dim as f64);
    let fits = |c: &[f64]| {
        let n = norm(c);
        n + rho <= outer && (inner == 0.0 || n - rho > inner)
    };
    let pitch = r.powf(1.0 / dim as f64) / 8.0;
    let steps = (outer / pitch).floor() as i64;
    let total = (2 * steps + 1) as f64;
    if total.powi(dim as i32) > 2e7 {
        return Err(Error::Capacity { requested: total.powi(dim as i32) as u64, cap: 20_000_000 });
    }
    let mut centres: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![-steps; dim];
    loop {
        let c: Vec<f64> = idx.iter().map(|&i| i as f64 * pitch).collect();
        if fits(&c) {
            centres.push(c);
        }
        let mut axis = dim;
        let mut done = true;
        while axis > 0 {
            axis -= 1;
            if idx[axis] < steps {
                idx[axis] += 1;
                idx.iter_mut().skip(axis + 1).for_each(|v| *v = -steps);
                done = false;
                break;
            }
        }
        if done {
            break;
        }
    }
    centres.extend(pts.iter().filter(|p| fits(p)).cloned());
    if centres.is_empty() {
        return Err(Error::Coverage(format!(
            "no ball of volume {r} fits inside the covered image (radius {outer})"
        )));
    }
    let buckets = Buckets::new(pts, rho);
    let mut sup = 0;
    let mut inf = u64::MAX;
    for c in &centres {
        let mut count = 0u64;
        buckets.visit(c, 1, |p| {
            let d2: f64 = p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 <= rho * rho {
                count += 1;
            }
        });
        sup = sup.max(count);
        inf = inf.min(count);
    }
    Ok((sup, inf))
}
