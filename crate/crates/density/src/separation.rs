use upfrac_core::{norm, ChangeOfVariables, DiscreteSet, Error, Result};

use crate::estimate::{images, Buckets};

/// Minimal spacing of `F(Gamma)` with a per-shell breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    /// True when the window is separated and gaps do not shrink towards its edge.
    pub separated: bool,
    pub min_gap: f64,
    /// Image point where the minimal gap is attained.
    pub argmin: Vec<f64>,
    /// `(lower radius, minimal gap)` per dyadic shell of image radius.
    pub shell_gaps: Vec<(f64, f64)>,
    /// Minimal gaps decay geometrically over the outer shells.
    pub shrinking: bool,
}

fn shell_of(r: f64) -> i32 {
    if r < 1.0 {
        0
    } else {
        r.log2().floor() as i32 + 1
    }
}

/// Nearest-neighbour gaps of `F(Gamma)` as `(location, gap)` pairs.
fn neighbour_gaps(pts: &[Vec<f64>], dim: usize) -> Vec<(Vec<f64>, f64)> {
    if dim == 1 {
        let mut ys: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        ys.sort_by(f64::total_cmp);
        return ys.windows(2).map(|w| (vec![0.5 * (w[0] + w[1])], w[1] - w[0])).collect();
    }
    // bucket by the typical spacing, widening the search until a neighbour appears
    let extent = pts.iter().map(|p| norm(p)).fold(0.0, f64::max).max(1.0);
    let cell = extent * (pts.len() as f64).powf(-1.0 / dim as f64);
    let buckets = Buckets::new(pts, cell);
    pts.iter()
        .map(|p| {
            let mut reach = 1;
            loop {
                let mut best = f64::INFINITY;
                buckets.visit(p, reach, |q| {
                    let d = norm(&p.iter().zip(q).map(|(a, b)| a - b).collect::<Vec<_>>());
                    if d > 0.0 {
                        best = best.min(d);
                    }
                });
                if best <= reach as f64 * cell || reach as f64 * cell > 2.0 * extent {
                    return (p.clone(), best);
                }
                reach *= 2;
            }
        })
        .collect()
}

pub fn check_separated(set: &DiscreteSet, map: &ChangeOfVariables) -> Result<SeparationReport> {
    if set.len() < 2 {
        return Err(Error::Size("separation needs at least two points".into()));
    }
    let pts = images(set, map)?;
    let gaps = neighbour_gaps(&pts, set.dim);
    let (argmin, min_gap) = gaps
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .expect("at least one gap");
    let mut shells: Vec<(i32, f64)> = Vec::new();
    for (loc, g) in &gaps {
        let k = shell_of(norm(loc));
        match shells.iter_mut().find(|(s, _)| *s == k) {
            Some(entry) => entry.1 = entry.1.min(*g),
            None => shells.push((k, *g)),
        }
    }
    shells.sort_by_key(|s| s.0);
    let shell_gaps: Vec<(f64, f64)> = shells
        .iter()
        .map(|(k, g)| (if *k == 0 { 0.0 } else { 2f64.powi(k - 1) }, *g))
        .collect();
    let tail: Vec<f64> = shell_gaps.iter().rev().take(3).map(|s| s.1).collect();
    let shrinking = tail.len() == 3 && tail[0] < tail[1] && tail[1] < tail[2] && tail[2] > 1.5 * tail[0];
    Ok(SeparationReport {
        separated: min_gap > 0.0 && !shrinking,
        min_gap,
        argmin,
        shell_gaps,
        shrinking,
    })
}

/// Values `F'(lambda_j) (lambda_{j+1} - lambda_j)` over consecutive points.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// `(lambda_j, value)` for every consecutive pair.
    pub values: Vec<(f64, f64)>,
    /// Extremes over pairs in the outer half of the window.
    pub limsup: f64,
    pub liminf: f64,
    /// `(outer radius, min, max)` over dyadic shells `R/2^{k+1} <= |x| < R/2^k`.
    pub shells: Vec<(f64, f64, f64)>,
}

pub fn gap_criterion(set: &DiscreteSet, map: &ChangeOfVariables) -> Result<GapReport> {
    if set.dim != 1 {
        return Err(Error::Parameter("the gap criterion is one-dimensional".into()));
    }
    if set.len() < 2 {
        return Err(Error::Size("the gap criterion needs at least two points".into()));
    }
    let mut xs = set.coords_1d();
    xs.sort_by(f64::total_cmp);
    let mut values = Vec::with_capacity(xs.len() - 1);
    for w in xs.windows(2) {
        values.push((w[0], map.derivative_1d(w[0])? * (w[1] - w[0])));
    }
    let half = 0.5 * set.window_radius;
    let outer: Vec<f64> = values
        .iter()
        .filter(|(x, _)| x.abs() >= half)
        .map(|v| v.1)
        .collect();
    let pool: Vec<f64> = if outer.is_empty() { values.iter().map(|v| v.1).collect() } else { outer };
    let mut shells = Vec::new();
    let mut top = set.window_radius;
    while shells.len() < 16 {
        let inside: Vec<f64> = values
            .iter()
            .filter(|(x, _)| x.abs() < top && x.abs() >= 0.5 * top)
            .map(|v| v.1)
            .collect();
        if inside.is_empty() {
            break;
        }
        let lo = inside.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        shells.push((top, lo, hi));
        top *= 0.5;
    }
    Ok(GapReport {
        limsup: pool.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        liminf: pool.iter().copied().fold(f64::INFINITY, f64::min),
        values,
        shells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use upfrac_core::{generate_set, Generator, LatticeSpec};

    #[test]
    fn integers_are_separated() {
        let set = generate_set(&Generator::ZAlpha { alpha: 1.0 }, 1, 500.0).unwrap();
        let r = check_separated(&set, &ChangeOfVariables::Identity).unwrap();
        assert!(r.separated && (r.min_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_roots_crowd_at_the_edge() {
        let set = generate_set(&Generator::ZAlpha { alpha: 0.5 }, 1, 100.0).unwrap();
        let r = check_separated(&set, &ChangeOfVariables::Identity).unwrap();
        let edge = 100.0 - 9999f64.sqrt();
        assert!((r.min_gap - edge).abs() < 1e-9, "{}", r.min_gap);
        assert!(r.shrinking && !r.separated);
        let straightened = check_separated(&set, &ChangeOfVariables::GAlpha { alpha: 0.5 }).unwrap();
        assert!(straightened.separated);
        assert!((straightened.min_gap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn planar_lattice_gap() {
        let set = generate_set(&Generator::Lattice { lattice: LatticeSpec::parse("2,0;0,3").unwrap() }, 2, 30.0).unwrap();
        let r = check_separated(&set, &ChangeOfVariables::Identity).unwrap();
        assert!((r.min_gap - 2.0).abs() < 1e-12 && r.separated);
    }

    #[test]
    fn gap_values() {
        let set = generate_set(&Generator::ZAlpha { alpha: 1.0 }, 1, 50.0).unwrap();
        let g = gap_criterion(&set, &ChangeOfVariables::Identity).unwrap();
        assert_eq!((g.limsup, g.liminf), (1.0, 1.0));
        let (inner, outer) = g.shells.split_last().unwrap();
        assert!(outer.len() >= 4 && outer.iter().all(|s| s.1 == 1.0 && s.2 == 1.0));
        // the origin is not in the set, so -1 and 1 are adjacent
        assert_eq!((inner.1, inner.2), (1.0, 2.0));

        let set = generate_set(&Generator::ZAlpha { alpha: 0.5 }, 1, 100.0).unwrap();
        let g = gap_criterion(&set, &ChangeOfVariables::GAlpha { alpha: 0.5 }).unwrap();
        assert!((g.limsup - 1.0).abs() < 1e-3 && (g.liminf - 1.0).abs() < 1e-3);

        let tiny = upfrac_core::DiscreteSet::explicit(1, vec![vec![1.0]], 2.0).unwrap();
        assert!(matches!(gap_criterion(&tiny, &ChangeOfVariables::Identity), Err(Error::Size(_))));
    }
}
