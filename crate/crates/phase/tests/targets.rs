use num_complex::Complex64;
use upfrac_core::{generate_set, Generator};
use upfrac_phase::*;

/// Riemann zeta for real `s > 1` by Euler-Maclaurin with cut-off 20.
fn zeta(s: f64) -> f64 {
    const B: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let m = 20.0f64;
    let mut sum: f64 = (1..20).map(|n| (n as f64).powf(-s)).sum();
    sum += m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in B.iter().enumerate() {
        let p = 2 * j as i32 + 1;
        sum += b / fact * rising * m.powf(-s - p as f64);
        rising *= (s + p as f64) * (s + p as f64 + 1.0);
        fact *= ((p + 2) * (p + 3)) as f64;
    }
    sum
}

#[test]
fn zeta_reference_values() {
    assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
    assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-14);
}

#[test]
fn phase_derivative_at_origin_matches_zeta_series() {
    // 2 sum n^{-3/2} / (1 + n^{-2}) = 2 (1/2 + sum_j (-1)^j (zeta(3/2 + 2j) - 1))
    let series: f64 = (0..40).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * (zeta(1.5 + 2.0 * j as f64) - 1.0)).sum();
    let oracle = 2.0 * (0.5 + series);
    let s = PhaseSequence::new(0.5, 1).unwrap();
    let e = phase_derivative(&s, 0.0, 1).unwrap();
    assert!((e.value - oracle).abs() <= e.tail_bound + 1e-13, "{} {} {}", e.value, oracle, e.tail_bound);
    let fixed = phase_derivative_fixed(&s, 0.0, 1, 1_000_000).unwrap();
    assert!((fixed.value - oracle).abs() <= fixed.tail_bound + 1e-13);
    assert!(fixed.tail_bound < 1e-12);
}

#[test]
fn p1_bands() {
    for alpha in [0.4, 0.5, 0.75] {
        let s = PhaseSequence::new(alpha, 1).unwrap().with_n_max(1 << 28);
        let small = verify_p1(&s, 1e2, 24).unwrap();
        let large = verify_p1(&s, 1e3, 24).unwrap();
        assert!(small.pass && large.pass, "{alpha} {:?} {:?}", small.band, large.band);
        assert!(large.spread() / small.spread() < 10.0);
        assert!(large.band.0 > 0.5 && large.band.1 < 10.0, "{alpha} {:?}", large.band);
    }
}

#[test]
fn p2_bounded_and_consistent_with_p1() {
    let s = PhaseSequence::new(0.5, 1).unwrap();
    let p1 = verify_p1(&s, 1e2, 16).unwrap();
    let p2 = verify_p2(&s, 1, 1e2, 16).unwrap();
    assert_eq!(p1.ratios, p2.ratios);
    let k2 = verify_p2(&s, 2, 1e2, 16).unwrap();
    assert!(k2.pass && k2.band.1 < 10.0, "{:?}", k2.band);
    assert!(k2.condition.iter().all(|c| c.value.is_finite() && c.tail_bound.is_finite()));
}

#[test]
fn condition_sum_at_origin() {
    let s = PhaseSequence::new(0.5, 1).unwrap().with_n_max(1 << 20);
    let c = condition_sum(&s, 0.0, 1, 4096).unwrap();
    // both zeros of index n contribute n^{-1/2} / (n + 1/n)^2
    let direct: f64 = (1..=4096).map(|n| {
        let n = n as f64;
        2.0 * n.powf(-0.5) / (n + 1.0 / n).powi(2)
    }).sum();
    assert!((c.value - direct).abs() < 1e-14);
    // comparison with sum n^{-5/2}
    let longer = condition_sum(&s, 0.0, 1, 1 << 20).unwrap();
    assert!(longer.value > c.value && longer.value <= c.value + c.tail_bound);
    for k in 0..=3 {
        let c = condition_sum(&s, 0.0, k, 1024).unwrap();
        assert!((c.value + c.tail_bound).is_finite());
    }
}

#[test]
fn blaschke_unit_modulus_and_contraction() {
    let s = PhaseSequence::new(0.5, 1).unwrap().with_n_max(10_000);
    for i in 0..1000 {
        let x = -50.0 + 0.1 * i as f64 + 0.013;
        let v = blaschke_eval(&s, Complex64::new(x, 0.0), 10_000).unwrap();
        assert!((v.value.norm() - 1.0).abs() < 1e-12, "{x}");
    }
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..100 {
        let z = Complex64::new(20.0 * next() - 10.0, 5.0 * next() + 1e-3);
        let v = blaschke_eval(&s, z, 2000).unwrap();
        assert!(v.value.norm() < 1.0);
        assert!(v.modulus_bound.unwrap() < 1.0);
    }
    let z1 = Complex64::new(1.0, 1.0);
    assert_eq!(blaschke_eval(&s, z1, 5).unwrap().value.norm(), 0.0);
}

#[test]
fn blaschke_condition_partial_sums() {
    for alpha in [0.4, 0.5, 0.75] {
        let s = PhaseSequence::new(alpha, 1).unwrap();
        let c = blaschke_condition(&s, &[10, 100, 1000, 10_000]).unwrap();
        assert!(c.partial_sums.windows(2).all(|w| w[1] > w[0]));
        assert!(c.partial_sums.iter().all(|v| *v < c.closed_bound));
    }
}

#[test]
fn derivative_bound_reductions() {
    let s = PhaseSequence::new(0.5, 1).unwrap();
    for x0 in [0.0, 0.7, 5.0] {
        let b = theorem_b_bound(&s, x0, 0).unwrap();
        let phi1 = phase_derivative(&s, x0, 1).unwrap().value;
        assert!((b.bound - (phi1 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        let doubled = theorem_b_bound(&s.clone().with_ell(2), x0, 0).unwrap();
        assert!((doubled.bound / b.bound - 2f64.sqrt()).abs() < 1e-12);
        let check = kernel_check(&s, x0, 1.0, 5000).unwrap();
        assert!(check.value <= check.bound, "{x0} {check:?}");
    }
    for k in 1..=3 {
        let b = theorem_b_bound(&s, 0.5, k).unwrap();
        assert!(b.bound.is_finite() && b.bound > 0.0);
        assert!(b.bracket.re < 0.0 && b.bracket.im.abs() <= 1e-12 * b.bracket.norm() + b.bracket_error);
        assert!(b.bracket_error < 1e-2 * b.bracket.norm(), "{k} {b:?}");
    }
}

#[test]
fn hypotheses_for_square_root_set() {
    let set = generate_set(&Generator::ZAlpha { alpha: 0.5 }, 1, 30.0).unwrap();
    let cfg = TheoremAConfig::default();
    let mut upper = Vec::new();
    let mut first_pass = None;
    for ell in [1u32, 2, 4, 8] {
        let s = PhaseSequence::new(0.5, ell).unwrap();
        let r = theorem_a_hypotheses(&set, &s, &cfg).unwrap();
        assert!(r.doubling.max_ratio < 16.0, "{:?}", r.doubling);
        if r.pass && first_pass.is_none() {
            first_pass = Some(ell);
        }
        upper.push(r.upper_density);
    }
    assert!(first_pass.is_some_and(|l| l <= 2), "{upper:?}");
    for w in upper.windows(2) {
        assert!(w[1] <= 0.6 * w[0], "{upper:?}");
    }
}
