use std::fmt::Write as _;

use upfrac_core::{norm, ChangeOfVariables, DiscreteSet, Error, Result};

/// Exact nearest-point queries against a (possibly infinite) set.
pub trait NearestPoint {
    fn dim(&self) -> usize;
    /// Nearest point and its distance, or a coverage error when the answer
    /// cannot be certified.
    fn nearest(&self, y: &[f64]) -> Result<(Vec<f64>, f64)>;
}

impl NearestPoint for DiscreteSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn nearest(&self, y: &[f64]) -> Result<(Vec<f64>, f64)> {
        if self.is_empty() {
            return Err(Error::Coverage("empty window".into()));
        }
        let best = if self.dim == 1 {
            // points are sorted
            let i = self.points.partition_point(|p| p[0] < y[0]);
            [i.saturating_sub(1), i.min(self.len() - 1)]
                .iter()
                .map(|&j| (self.points[j].clone(), (self.points[j][0] - y[0]).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty")
        } else {
            self.points
                .iter()
                .map(|p| (p.clone(), distance(p, y)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty")
        };
        // anything outside the window is farther than R - |y|
        if best.1 > self.window_radius - norm(y) {
            return Err(Error::Coverage(format!(
                "probe at radius {} is too close to the window edge {}",
                norm(y),
                self.window_radius
            )));
        }
        Ok(best)
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The full set `{ c (log|k|)^alpha k/|k| : |k| > 1 }`, queried through its
/// preimage lattice instead of a stored window.
///
/// A first candidate `k0 = round(Phi(y))` gives a radius `D`. Every point
/// within `D` of `y` has preimage inside `Phi(B(y, D))`, which sits in an
/// annular sector whose bounding box is searched exhaustively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLatticeSet {
    pub dim: usize,
    pub alpha: f64,
    pub c: f64,
}

impl LogLatticeSet {
    pub fn new(dim: usize, alpha: f64, c: f64) -> Result<Self> {
        ChangeOfVariables::PhiAlphaC { alpha, c }.validate(dim)?;
        if dim == 0 {
            return Err(Error::Parameter("dimension must be >= 1".into()));
        }
        Ok(Self { dim, alpha, c })
    }

    fn map(&self) -> ChangeOfVariables {
        ChangeOfVariables::PhiAlphaC { alpha: self.alpha, c: self.c }
    }

    fn point(&self, k: &[i64]) -> Option<Vec<f64>> {
        let r = k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
        if r <= 1.0 {
            return None;
        }
        let rho = self.c * r.ln().powf(self.alpha);
        Some(k.iter().map(|&v| rho * v as f64 / r).collect())
    }
}

impl NearestPoint for LogLatticeSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn nearest(&self, y: &[f64]) -> Result<(Vec<f64>, f64)> {
        if y.len() != self.dim {
            return Err(Error::Parameter("probe dimension mismatch".into()));
        }
        let map = self.map();
        let ny = norm(y);
        if ny == 0.0 {
            return Err(Error::Domain("probe at the origin".into()));
        }
        let xi = map.forward(y)?;
        let mut k0: Vec<i64> = xi.iter().map(|v| v.round() as i64).collect();
        if k0.iter().map(|v| v * v).sum::<i64>() <= 1 {
            k0 = vec![0; self.dim];
            k0[0] = 2;
        }
        let first = self.point(&k0).expect("|k0| > 1");
        let d0 = distance(&first, y) * (1.0 + 1e-12);
        // preimages of B(y, d0) have radius in [rho1, rho2] and angle <= delta from y
        let rho1 = if ny > d0 { map.radial(ny - d0) } else { 0.0 };
        let rho2 = map.radial(ny + d0);
        let delta = if d0 < ny { (d0 / ny).asin() } else { std::f64::consts::PI };
        let yhat: Vec<f64> = y.iter().map(|v| v / ny).collect();
        let rc = 0.5 * (rho1 + rho2);
        let half = if delta >= std::f64::consts::FRAC_PI_2 {
            rho2 + rc
        } else {
            0.5 * (rho2 - rho1) + rho2 * delta
        };
        let lo: Vec<i64> = yhat.iter().map(|u| (rc * u - half).floor() as i64).collect();
        let hi: Vec<i64> = yhat.iter().map(|u| (rc * u + half).ceil() as i64).collect();
        let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
        if volume > 5e7 {
            return Err(Error::Capacity { requested: volume as u64, cap: 50_000_000 });
        }
        let mut best = (first, d0);
        let mut k = lo.clone();
        loop {
            if let Some(p) = self.point(&k) {
                let d = distance(&p, y);
                if d < best.1 {
                    best = (p, d);
                }
            }
            let mut axis = self.dim;
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                if k[axis] < hi[axis] {
                    k[axis] += 1;
                    for j in axis + 1..self.dim {
                        k[j] = lo[j];
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
        if best.1 == d0 {
            best.1 = distance(&best.0, y);
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshRow {
    pub probe_norm: f64,
    pub nn_distance: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Nearest-point distances against the envelope `exp(-delta (|y|/c)^{1/alpha})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshAudit {
    pub rows: Vec<MeshRow>,
    /// Largest observed ratio.
    pub c_fit: f64,
    /// Probes whose ratio exceeds `slack` times every earlier block maximum.
    pub violations: usize,
    /// `(mean |y|, max ratio)` over blocks of probes ordered by radius.
    pub block_maxima: Vec<(f64, f64)>,
    /// Least-squares slope of `log(block max)` against `|y|`.
    pub trend_slope: f64,
}

impl MeshAudit {
    /// CSV with columns `probe_norm,nn_distance,bound,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe_norm,nn_distance,bound,ratio\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.probe_norm, r.nn_distance, r.bound, r.ratio);
        }
        out
    }
}

const BLOCKS: usize = 5;
const SLACK: f64 = 4.0;

pub fn mesh_bound_audit(
    set: &impl NearestPoint,
    map: &ChangeOfVariables,
    delta: f64,
    probes: &[Vec<f64>],
) -> Result<MeshAudit> {
    let (alpha, c) = match *map {
        ChangeOfVariables::PhiAlphaC { alpha, c } => (alpha, c),
        _ => return Err(Error::Parameter("mesh audit needs a Phi_alpha_c map".into())),
    };
    map.validate(set.dim())?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    if probes.is_empty() {
        return Err(Error::Size("no probes".into()));
    }
    let mut rows = Vec::with_capacity(probes.len());
    for y in probes {
        if y.len() != set.dim() {
            return Err(Error::Parameter("probe dimension mismatch".into()));
        }
        let (_, d) = set.nearest(y)?;
        let r = norm(y);
        let bound = (-delta * (r / c).powf(1.0 / alpha)).exp();
        rows.push(MeshRow { probe_norm: r, nn_distance: d, bound, ratio: d / bound });
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|a, b| rows[*a].probe_norm.total_cmp(&rows[*b].probe_norm));
    let blocks = BLOCKS.min(rows.len());
    let mut block_maxima = Vec::new();
    let mut violations = 0;
    let mut running = 0.0f64;
    for b in 0..blocks {
        let slice = &order[b * order.len() / blocks..(b + 1) * order.len() / blocks];
        let max = slice.iter().map(|&i| rows[i].ratio).fold(0.0, f64::max);
        let mean = slice.iter().map(|&i| rows[i].probe_norm).sum::<f64>() / slice.len() as f64;
        if b > 0 {
            violations += slice.iter().filter(|&&i| rows[i].ratio > SLACK * running).count();
        }
        running = running.max(max);
        block_maxima.push((mean, max));
    }
    let trend_slope = slope(&block_maxima);
    Ok(MeshAudit {
        c_fit: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        rows,
        violations,
        block_maxima,
        trend_slope,
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = pts.iter().filter(|p| p.1 > 0.0).map(|p| (p.0, p.1.ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
