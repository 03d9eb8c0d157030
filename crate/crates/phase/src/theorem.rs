use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use upfrac_core::{ChangeOfVariables, DiscreteSet, Error, Result};
use upfrac_density::{check_separated, estimate_density};

use crate::blaschke::blaschke_eval;
use crate::sequence::{condition_sum, phase_derivative, Evaluation, PhaseSequence};

/// Right-hand side constant of the pointwise bound for `f^{(k)}(x0)`, `f` of unit norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBound {
    pub k: u32,
    pub x0: f64,
    pub bound: f64,
    /// `((k!)^2 / 2 i pi) sum_j Theta^{(j)} conj(Theta^{(2k+1-j)}) / (j! (2k+1-j)!)`.
    pub bracket: Complex64,
    /// Bound on the error of `bracket` from the truncated derivatives of `phi`.
    pub bracket_error: f64,
    pub phi_derivatives: Vec<Evaluation>,
    pub condition: Evaluation,
}

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![1.0]];
    for i in 1..=n {
        let prev = &c[i - 1];
        let mut row = vec![1.0; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        c.push(row);
    }
    c
}

/// Complete Bell polynomials `Y_0..Y_n` at `a_1..a_n` (`a[0]` unused).
fn bell<T>(a: &[T], n: usize, binom: &[Vec<f64>]) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + std::ops::Mul<f64, Output = T> + From<f64>,
{
    let mut y = vec![T::from(1.0)];
    for m in 0..n {
        let mut acc = T::from(0.0);
        for i in 0..=m {
            acc = acc + y[m - i] * a[i + 1] * binom[m][i];
        }
        y.push(acc);
    }
    y
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// Evaluates the derivative bound with `Theta = e^{2 i phi}` on the real line,
/// so `Theta^{(n)} = Theta Y_n(2i phi', ..., 2i phi^{(n)})` and the unimodular
/// factor cancels in each product. As printed the bracket is `-||K||^2`; the
/// bound is the square root of its modulus.
pub fn theorem_b_bound(seq: &PhaseSequence, x0: f64, k: u32) -> Result<DerivativeBound> {
    let condition = condition_sum(seq, x0, k, 1024)?;
    if !(condition.value + condition.tail_bound).is_finite() {
        return Err(Error::Precondition(format!(
            "sum Im z_n / |x0 - z_n|^{} is not certified finite at x0 = {x0}",
            2 * k + 2
        )));
    }
    let n = 2 * k as usize + 1;
    let mut phi = Vec::with_capacity(n);
    for j in 1..=n {
        phi.push(phase_derivative(seq, x0, j as u32)?);
    }
    let binom = binomials(n);
    let mut a = vec![Complex64::new(0.0, 0.0)];
    let mut mag = vec![0.0];
    let mut mag_hi = vec![0.0];
    for e in &phi {
        a.push(Complex64::new(0.0, 2.0 * e.value));
        mag.push(2.0 * e.value.abs());
        mag_hi.push(2.0 * (e.value.abs() + e.tail_bound));
    }
    let y = bell(&a, n, &binom);
    let m = bell(&mag, n, &binom);
    let m_hi = bell(&mag_hi, n, &binom);
    let kf = factorial(k as usize);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for j in 0..=k as usize {
        let r = n - j;
        let scale = 1.0 / (factorial(j) * factorial(r));
        sum += y[j] * y[r].conj() * scale;
        err += (m_hi[j] * m_hi[r] - m[j] * m[r]) * scale;
    }
    let pre = kf * kf / (2.0 * std::f64::consts::PI);
    let bracket = sum * Complex64::new(0.0, -pre);
    // rounding in the Bell recurrences
    let bracket_error = pre * err + 64.0 * f64::EPSILON * pre * (0..=k as usize)
        .map(|j| m[j] * m[n - j] / (factorial(j) * factorial(n - j)))
        .sum::<f64>();
    Ok(DerivativeBound {
        k,
        x0,
        bound: bracket.norm().sqrt(),
        bracket,
        bracket_error,
        phi_derivatives: phi,
        condition,
    })
}

/// `|f(x0)|` for `f` the normalized reproducing kernel of the model space of
/// `Theta_N` at `w = x0 + i h`, `K_w(z) = i (1 - conj(Theta(w)) Theta(z)) / (2 pi (z - conj(w)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub value: f64,
    pub bound: f64,
}

pub fn kernel_check(seq: &PhaseSequence, x0: f64, h: f64, n: u64) -> Result<KernelCheck> {
    if !(h > 0.0) {
        return Err(Error::Parameter("kernel point must lie in the upper half-plane".into()));
    }
    let w = Complex64::new(x0, h);
    let tw = blaschke_eval(seq, w, n)?.value;
    let tx = blaschke_eval(seq, Complex64::new(x0, 0.0), n)?.value;
    let norm_sq = (1.0 - tw.norm_sqr()) / (4.0 * std::f64::consts::PI * h);
    if !(norm_sq > 0.0) {
        return Err(Error::Degenerate("model-space kernel has zero norm".into()));
    }
    let kx = Complex64::i() * (1.0 - tw.conj() * tx) / (2.0 * std::f64::consts::PI * (Complex64::new(x0, 0.0) - w.conj()));
    let bound = theorem_b_bound(seq, x0, 0)?.bound;
    Ok(KernelCheck { value: kx.norm() / norm_sq.sqrt(), bound })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremAConfig {
    /// Window lengths in the image; defaults scale with the image radius.
    pub r_values: Option<Vec<f64>>,
    /// Largest admissible `mu(2I)/mu(I)`.
    pub doubling_bound: f64,
    /// Smallest dyadic length in the doubling scan.
    pub min_scale: f64,
}

impl Default for TheoremAConfig {
    fn default() -> Self {
        Self { r_values: None, doubling_bound: 64.0, min_scale: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingDiag {
    pub max_ratio: f64,
    /// Dyadic interval attaining `max_ratio`.
    pub worst: (f64, f64),
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremAReport {
    pub phi_separated: bool,
    pub min_gap: f64,
    pub upper_density: f64,
    pub lower_density: f64,
    pub r_values: Vec<f64>,
    pub sup_ratios: Vec<f64>,
    pub doubling: DoublingDiag,
    /// Largest tail bound among the `phi` evaluations.
    pub max_phase_error: f64,
    pub pass: bool,
}

/// Checks separation and upper density of `phi(Gamma)` and the doubling
/// property of `phi' dx` on the window of `set`.
pub fn theorem_a_hypotheses(set: &DiscreteSet, seq: &PhaseSequence, cfg: &TheoremAConfig) -> Result<TheoremAReport> {
    if set.dim != 1 {
        return Err(Error::Parameter("phase hypotheses are one-dimensional".into()));
    }
    let mut max_err: f64 = 0.0;
    let mut phi = |x: f64| -> Result<f64> {
        let e = phase_derivative(seq, x, 0)?;
        max_err = max_err.max(e.tail_bound);
        Ok(e.value)
    };
    let mut image = Vec::with_capacity(set.len());
    for p in &set.points {
        image.push(vec![phi(p[0])?]);
    }
    let radius = set.window_radius;
    let image_radius = phi(radius)?;
    let image_set = DiscreteSet::explicit(1, image, image_radius)?;
    let sep = check_separated(&image_set, &ChangeOfVariables::Identity)?;
    let r_values = cfg
        .r_values
        .clone()
        .unwrap_or_else(|| [64.0, 16.0, 4.0].iter().map(|d| 2.0 * image_radius / d).collect());
    let dens = estimate_density(&image_set, &ChangeOfVariables::Identity, &r_values)?;

    // dyadic scan on [-R, R]; phi is tabulated on multiples of min_scale / 2
    let step = 0.5 * cfg.min_scale;
    let steps = (radius / step).floor() as i64;
    let mut table = Vec::with_capacity(2 * steps as usize + 1);
    for i in -steps..=steps {
        table.push(phi(i as f64 * step)?);
    }
    let at = |i: i64| table[(i + steps) as usize];
    let mut max_ratio: f64 = 0.0;
    let mut worst = (0.0, 0.0);
    let mut intervals = 0;
    let mut len = 2i64; // in units of step
    while len as f64 * step * 2.0 <= 2.0 * radius {
        let half = len / 2;
        let mut a = -steps - steps.rem_euclid(len);
        while a + len <= steps {
            let (lo2, hi2) = (a - half, a + len + half);
            if a >= -steps && lo2 >= -steps && hi2 <= steps {
                let mu = at(a + len) - at(a);
                let mu2 = at(hi2) - at(lo2);
                let ratio = mu2 / mu;
                intervals += 1;
                if ratio > max_ratio {
                    max_ratio = ratio;
                    worst = (a as f64 * step, (a + len) as f64 * step);
                }
            }
            a += len;
        }
        len *= 2;
    }
    if intervals == 0 {
        return Err(Error::Coverage("window too small for the doubling scan".into()));
    }
    let upper = dens.upper;
    let pass = sep.separated && upper < 1.0 / std::f64::consts::PI && max_ratio <= cfg.doubling_bound;
    Ok(TheoremAReport {
        phi_separated: sep.separated,
        min_gap: sep.min_gap,
        upper_density: upper,
        lower_density: dens.lower,
        sup_ratios: dens.sup_ratios(),
        r_values: dens.r_values,
        doubling: DoublingDiag { max_ratio, worst, intervals },
        max_phase_error: max_err,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_polynomials() {
        let binom = binomials(4);
        let a = [0.0, 1.0, 1.0, 1.0, 1.0];
        // Bell numbers
        assert_eq!(bell(&a, 4, &binom), vec![1.0, 1.0, 2.0, 5.0, 15.0]);
    }

    #[test]
    fn zeroth_order_reduces_to_phase_derivative() {
        let s = PhaseSequence::new(0.5, 1).unwrap();
        let b = theorem_b_bound(&s, 1.3, 0).unwrap();
        let p = b.phi_derivatives[0].value;
        assert!((b.bracket.re + p / std::f64::consts::PI).abs() < 1e-14 * p);
        assert!(b.bracket.im.abs() < 1e-15 * p);
        assert!((b.bound - (p / std::f64::consts::PI).sqrt()).abs() < 1e-14);
    }
}
