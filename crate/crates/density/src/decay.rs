use upfrac_core::{Error, Result};

/// Envelope family requested for an audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModelKind {
    /// `log|v| ~ log A - b |x|^p`
    ExpPower,
    /// `log|v| ~ log A + q log|x|`
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayModel {
    Zero,
    ExpPower { amplitude: f64, rate: f64, exponent: f64 },
    Poly { amplitude: f64, exponent: f64 },
}

impl DecayModel {
    pub fn name(&self) -> &'static str {
        match self {
            DecayModel::Zero => "zero",
            DecayModel::ExpPower { .. } => "exp_power",
            DecayModel::Poly { .. } => "poly",
        }
    }

    /// `log` of the envelope at `|x|`.
    pub fn log_envelope(&self, x: f64) -> f64 {
        let x = x.abs();
        match *self {
            DecayModel::Zero => f64::NEG_INFINITY,
            DecayModel::ExpPower { amplitude, rate, exponent } => amplitude.ln() - rate * x.powf(exponent),
            DecayModel::Poly { amplitude, exponent } => amplitude.ln() + exponent * x.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayEnvelope {
    pub model: DecayModel,
    /// Largest `log|v| - log envelope` over all nonzero samples, clamped at 0.
    pub residual: f64,
    /// Number of samples on the decreasing upper envelope used in the fit.
    pub envelope_points: usize,
}

impl DecayEnvelope {
    pub fn passes(&self, slack: f64) -> bool {
        self.residual <= slack
    }
}

const MIN_SAMPLES: usize = 10;

/// Fits the model to the decreasing upper envelope of `|value|` by least
/// squares in log scale.
pub fn decay_audit(samples: &[(f64, f64)], kind: DecayModelKind) -> Result<DecayEnvelope> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Size(format!("need at least {MIN_SAMPLES} samples, got {}", samples.len())));
    }
    if samples.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
        return Err(Error::Input("non-finite sample".into()));
    }
    if samples.iter().all(|s| s.1 == 0.0) {
        return Ok(DecayEnvelope { model: DecayModel::Zero, residual: 0.0, envelope_points: 0 });
    }
    let usable: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(x, v)| (x.abs(), v.abs()))
        .filter(|&(x, v)| v > 0.0 && (kind == DecayModelKind::ExpPower || x > 0.0))
        .collect();
    let lo = usable.iter().map(|s| s.0).filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    let hi = usable.iter().map(|s| s.0).fold(0.0, f64::max);
    if !(hi >= 10.0 * lo) {
        return Err(Error::Size("samples must span at least one decade of |x|".into()));
    }

    let mut env = usable.clone();
    env.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = f64::NEG_INFINITY;
    env.retain(|&(_, v)| {
        let keep = v > best;
        best = best.max(v);
        keep
    });
    env.reverse();
    let pts: Vec<(f64, f64)> = env.iter().map(|&(x, v)| (x, v.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::Degenerate("upper envelope has fewer than two points".into()));
    }

    let model = match kind {
        DecayModelKind::Poly => {
            let lx: Vec<(f64, f64)> = pts.iter().map(|&(x, l)| (x.ln(), l)).collect();
            let (a, q) = line_fit(&lx)?;
            DecayModel::Poly { amplitude: a.exp(), exponent: q }
        }
        DecayModelKind::ExpPower => {
            let (a, b, p) = fit_exp_power(&pts)?;
            DecayModel::ExpPower { amplitude: a.exp(), rate: b, exponent: p }
        }
    };
    let residual = usable
        .iter()
        .map(|&(x, v)| v.ln() - model.log_envelope(x))
        .fold(0.0, f64::max);
    Ok(DecayEnvelope { model, residual, envelope_points: pts.len() })
}

/// Least squares `y = a + b t`.
fn line_fit(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::Degenerate("all envelope abscissae coincide".into()));
    }
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let b = sty / stt;
    Ok((my - b * mt, b))
}

fn sse_for_exponent(pts: &[(f64, f64)], p: f64) -> (f64, f64, f64) {
    let t: Vec<(f64, f64)> = pts.iter().map(|&(x, l)| (x.powf(p), l)).collect();
    match line_fit(&t) {
        Ok((a, slope)) => {
            let sse = t.iter().map(|&(u, l)| (l - a - slope * u).powi(2)).sum();
            (sse, a, -slope)
        }
        Err(_) => (f64::INFINITY, 0.0, 0.0),
    }
}

fn fit_exp_power(pts: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    // golden section on the exponent, then Gauss-Newton on all three parameters
    let (mut lo, mut hi) = (0.05f64, 4.0f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = sse_for_exponent(pts, x1).0;
    let mut f2 = sse_for_exponent(pts, x2).0;
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = sse_for_exponent(pts, x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = sse_for_exponent(pts, x2).0;
        }
    }
    let mut p = 0.5 * (lo + hi);
    let (mut sse, mut a, mut b) = sse_for_exponent(pts, p);
    if !sse.is_finite() {
        return Err(Error::Degenerate("exp_power fit failed".into()));
    }
    for _ in 0..30 {
        // J^T J and J^T r for residual r = l - (a - b x^p)
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(x, l) in pts {
            let xp = x.powf(p);
            let lx = if x > 0.0 { x.ln() } else { 0.0 };
            let j = [1.0, -xp, -b * xp * lx];
            let r = l - (a - b * xp);
            for i in 0..3 {
                jtr[i] += j[i] * r;
                for k in 0..3 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }
        let Some(step) = solve3(jtj, jtr) else { break };
        let (na, nb, np) = (a + step[0], b + step[1], p + step[2]);
        if !(np > 0.0) {
            break;
        }
        let nsse: f64 = pts.iter().map(|&(x, l)| (l - na + nb * x.powf(np)).powi(2)).sum();
        if !(nsse < sse) {
            break;
        }
        (a, b, p, sse) = (na, nb, np, nsse);
    }
    Ok((a, b, p))
}

fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = v[r];
        }
        *o = det(&mc) / d;
    }
    Some(out)
}
