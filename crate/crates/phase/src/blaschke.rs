use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use upfrac_core::{Error, Result};

use crate::sequence::PhaseSequence;

const POLE_TOL: f64 = 1e-12;

/// Truncated Blaschke product `Theta_N(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeValue {
    pub value: Complex64,
    /// For `Im z > 0`, `|Theta(z)| <= modulus_bound`: every omitted factor
    /// has modulus at most one in the upper half-plane.
    pub modulus_bound: Option<f64>,
    pub n_used: u64,
}

fn pairwise_product(mut factors: Vec<Complex64>) -> Complex64 {
    if factors.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    while factors.len() > 1 {
        factors = factors
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0] * c[1] } else { c[0] })
            .collect();
    }
    factors[0]
}

/// `[prod_{n <= N} (1 - z/z_n)/(1 - z/conj(z_n))]^ell` over the zeros `+-x_n + i y_n`.
pub fn blaschke_eval(seq: &PhaseSequence, z: Complex64, n: u64) -> Result<BlaschkeValue> {
    seq.validate()?;
    if !(z.re.is_finite() && z.im.is_finite()) || z.im < 0.0 {
        return Err(Error::Domain(format!("Blaschke product is evaluated on Im z >= 0, got {z}")));
    }
    if n > seq.n_max {
        return Err(Error::Truncation { bound: f64::INFINITY, tol: seq.tolerance, suggested: n });
    }
    let mut factors = Vec::with_capacity(2 * n as usize);
    for j in 1..=n {
        let (xn, yn) = seq.zero(j);
        for zn in [Complex64::new(xn, yn), Complex64::new(-xn, yn)] {
            let pole = zn.conj();
            if (z - pole).norm() < POLE_TOL {
                return Err(Error::Evaluator(format!("z = {z} is within {POLE_TOL} of the pole {pole}")));
            }
            // (1 - z/z_n)/(1 - z/conj(z_n)) = (conj(z_n)/z_n) (z_n - z)/(conj(z_n) - z)
            factors.push((pole / zn) * (zn - z) / (pole - z));
        }
    }
    let value = pairwise_product(factors).powu(seq.ell);
    let modulus_bound = (z.im > 0.0).then(|| value.norm());
    Ok(BlaschkeValue { value, modulus_bound, n_used: n })
}

/// Partial sums `sum_{n <= N} Im z_n / |z_n|^2` over both zeros of each index
/// at the requested checkpoints, and a bound on the full sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeCondition {
    pub checkpoints: Vec<u64>,
    pub partial_sums: Vec<f64>,
    /// Largest partial sum plus its integral tail bound.
    pub closed_bound: f64,
}

pub fn blaschke_condition(seq: &PhaseSequence, checkpoints: &[u64]) -> Result<BlaschkeCondition> {
    seq.validate()?;
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    if cps.is_empty() || cps[0] == 0 {
        return Err(Error::Parameter("checkpoints must be positive".into()));
    }
    let mut sums = Vec::with_capacity(cps.len());
    let mut acc = crate::sequence::Neumaier::default();
    let mut next = 0;
    for j in 1..=*cps.last().unwrap() {
        let (xn, yn) = seq.zero(j);
        acc.add(2.0 * yn / (xn * xn + yn * yn));
        if j == cps[next] {
            sums.push(acc.total());
            next += 1;
        }
    }
    let last = crate::sequence::condition_sum(seq, 0.0, 0, *cps.last().unwrap())?;
    Ok(BlaschkeCondition {
        checkpoints: cps,
        partial_sums: sums,
        closed_bound: last.value + last.tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_at_first_zero() {
        let s = PhaseSequence::new(0.5, 2).unwrap();
        let v = blaschke_eval(&s, Complex64::new(1.0, 1.0), 10).unwrap();
        assert!(v.value.norm() < 1e-15);
    }

    #[test]
    fn unit_modulus_on_line() {
        let s = PhaseSequence::new(0.5, 1).unwrap();
        for x in [-3.7, 0.0, 0.4, 25.0] {
            let v = blaschke_eval(&s, Complex64::new(x, 0.0), 1000).unwrap();
            assert!((v.value.norm() - 1.0).abs() < 1e-13);
            assert!(v.modulus_bound.is_none());
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        let s = PhaseSequence::new(0.5, 1).unwrap();
        assert!(blaschke_eval(&s, Complex64::new(0.0, -1.0), 5).is_err());
    }

    #[test]
    fn condition_sums_increase() {
        let s = PhaseSequence::new(0.5, 1).unwrap();
        let c = blaschke_condition(&s, &[10, 100, 1000]).unwrap();
        assert!(c.partial_sums.windows(2).all(|w| w[1] > w[0]));
        assert!(*c.partial_sums.last().unwrap() < c.closed_bound);
    }
}
