use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use upfrac_core::{Error, Result};

use crate::sequence::{condition_sum, phase_derivative, Evaluation, PhaseSequence};

/// Normalized derivative ratios `|phi^{(k)}(x)| / (ell (1+|x|)^{k(beta-1)})` over samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub alpha: f64,
    pub ell: u32,
    pub k: u32,
    pub window: f64,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub tail_bounds: Vec<f64>,
    /// Extremes `[c, C]` of the ratios.
    pub band: (f64, f64),
    /// Growth of the band from the inner half of the window to the whole
    /// window: ratio of spreads `C/c` for (P1), of maxima `C` for (P2).
    pub drift: f64,
    /// Certified sums `sum Im z_n / |x - z_n|^{2k+2}` at each sample; empty for (P1).
    pub condition: Vec<Evaluation>,
    pub pass: bool,
}

impl PhaseReport {
    pub fn spread(&self) -> f64 {
        self.band.1 / self.band.0
    }

    /// CSV with columns `x,phi_prime,ratio,tail_bound` (`phi_k` for `k >= 2`).
    pub fn to_csv(&self) -> String {
        let col = if self.k == 1 { "phi_prime".to_string() } else { format!("phi_{}", self.k) };
        let mut out = format!("x,{col},ratio,tail_bound\n");
        for i in 0..self.xs.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.6e}",
                self.xs[i], self.values[i], self.ratios[i], self.tail_bounds[i]
            );
        }
        out
    }
}

/// `samples` points in `[0, X]`, equally spaced in `log(1 + x)`.
pub fn log_samples(window: f64, samples: usize) -> Vec<f64> {
    let top = window.ln_1p();
    (0..samples)
        .map(|j| if j + 1 == samples { window } else { (top * j as f64 / (samples - 1) as f64).exp_m1() })
        .collect()
}

fn check_window(window: f64, samples: usize) -> Result<()> {
    if !(window.is_finite() && window >= 2.0) {
        return Err(Error::Parameter(format!("window radius must be >= 2, got {window}")));
    }
    if samples < 4 {
        return Err(Error::Parameter("at least four samples are needed".into()));
    }
    Ok(())
}

fn band(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn ratios_report(seq: &PhaseSequence, k: u32, window: f64, samples: usize) -> Result<PhaseReport> {
    let xs = log_samples(window, samples);
    let mut values = Vec::with_capacity(samples);
    let mut ratios = Vec::with_capacity(samples);
    let mut tails = Vec::with_capacity(samples);
    for &x in &xs {
        let e = phase_derivative(seq, x, k)?;
        values.push(e.value);
        ratios.push(e.value.abs() / seq.envelope(x, k));
        tails.push(e.tail_bound);
    }
    let whole = band(&ratios);
    let inner: Vec<f64> = xs.iter().zip(&ratios).filter(|(x, _)| **x <= 0.5 * window).map(|(_, r)| *r).collect();
    let half = band(&inner);
    let drift = (whole.1 / whole.0) / (half.1 / half.0);
    Ok(PhaseReport {
        alpha: seq.alpha,
        ell: seq.ell,
        k,
        window,
        xs,
        values,
        ratios,
        tail_bounds: tails,
        band: whole,
        drift,
        condition: Vec::new(),
        pass: false,
    })
}

/// (P1): `phi'` against `ell (1+|x|)^{beta-1}`. Passes when the ratios are
/// positive and finite and their spread grows by less than 10x from `[0, X/2]` to `[0, X]`.
pub fn verify_p1(seq: &PhaseSequence, window: f64, samples: usize) -> Result<PhaseReport> {
    check_window(window, samples)?;
    let mut r = ratios_report(seq, 1, window, samples)?;
    r.pass = r.band.0 > 0.0 && r.band.1.is_finite() && r.drift < 10.0;
    Ok(r)
}

/// (P2): `|phi^{(k)}|` against `ell (1+|x|)^{k(beta-1)}` with the convergence
/// condition certified at every sample.
pub fn verify_p2(seq: &PhaseSequence, k: u32, window: f64, samples: usize) -> Result<PhaseReport> {
    check_window(window, samples)?;
    if !(1..=6).contains(&k) {
        return Err(Error::Parameter(format!("k must lie in 1..=6, got {k}")));
    }
    let mut r = ratios_report(seq, k, window, samples)?;
    let inner = r.xs.iter().zip(&r.ratios).filter(|(x, _)| **x <= 0.5 * window).map(|(_, v)| *v);
    r.drift = r.band.1 / inner.fold(0.0, f64::max);
    for &x in &r.xs {
        r.condition.push(condition_sum(seq, x, k, 1024)?);
    }
    let certified = r.condition.iter().all(|c| (c.value + c.tail_bound).is_finite());
    r.pass = certified && r.band.1.is_finite() && r.drift < 10.0;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_cover_window() {
        let xs = log_samples(100.0, 5);
        assert_eq!(xs[0], 0.0);
        assert_eq!(xs[4], 100.0);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn csv_header() {
        let s = PhaseSequence::new(0.5, 1).unwrap();
        let r = verify_p1(&s, 4.0, 4).unwrap();
        assert!(r.to_csv().starts_with("x,phi_prime,ratio,tail_bound\n0.0000000000000000e0,"));
        assert!(verify_p1(&s, 1.0, 4).is_err());
        assert!(verify_p2(&s, 7, 4.0, 4).is_err());
    }
}
