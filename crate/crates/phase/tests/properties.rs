use num_complex::Complex64;
use proptest::prelude::*;
use upfrac_phase::*;

fn alphas() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.4), Just(0.5), Just(0.6), Just(0.75)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unit_modulus_on_real_line(alpha in alphas(), x in -200.0f64..200.0, n in 1u64..3000) {
        let s = PhaseSequence::new(alpha, 1).unwrap();
        let v = blaschke_eval(&s, Complex64::new(x, 0.0), n).unwrap();
        prop_assert!((v.value.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_in_upper_half_plane(alpha in alphas(), x in -20.0f64..20.0, y in 1e-3f64..10.0, ell in 1u32..4) {
        let s = PhaseSequence::new(alpha, ell).unwrap();
        let v = blaschke_eval(&s, Complex64::new(x, y), 500).unwrap();
        prop_assert!(v.value.norm() < 1.0);
    }

    #[test]
    fn linear_in_ell(alpha in alphas(), x in -50.0f64..50.0, k in 0u32..4, ell in 2u32..9) {
        let one = PhaseSequence::new(alpha, 1).unwrap();
        let many = PhaseSequence::new(alpha, ell).unwrap();
        let n = 1 << 12;
        let n = if k >= 2 { n.max(((2.0 * x.abs() + 2.0).powf(1.0 / alpha)).ceil() as u64) } else { n.max(((x.abs() + 2.0).powf(1.0 / alpha)).ceil() as u64) };
        let a = phase_derivative_fixed(&one, x, k, n).unwrap();
        let b = phase_derivative_fixed(&many, x, k, n).unwrap();
        prop_assert_eq!(b.value, ell as f64 * a.value);
        prop_assert_eq!(b.tail_bound, ell as f64 * a.tail_bound);
    }

    #[test]
    fn parity(alpha in alphas(), x in 0.0f64..60.0, k in 0u32..5) {
        let s = PhaseSequence::new(alpha, 1).unwrap().with_n_max(1 << 24);
        let a = phase_derivative(&s, x, k).unwrap();
        let b = phase_derivative(&s, -x, k).unwrap();
        // phi', phi''' even; phi, phi'', phi'''' odd
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        prop_assert!((a.value - sign * b.value).abs() <= a.tail_bound + b.tail_bound + 1e-13 * a.value.abs());
    }

    #[test]
    fn tail_bounds_are_sound_under_doubling(alpha in alphas(), x in -40.0f64..40.0, k in 0u32..4) {
        let s = PhaseSequence::new(alpha, 1).unwrap().with_n_max(1 << 26);
        let far = if k >= 2 { 2.0 * x.abs() + 2.0 } else { x.abs() + 2.0 };
        let mut n = (far.powf(1.0 / alpha).ceil() as u64).max(16);
        let mut prev = phase_derivative_fixed(&s, x, k, n).unwrap();
        for _ in 0..4 {
            n *= 2;
            let next = phase_derivative_fixed(&s, x, k, n).unwrap();
            prop_assert!((next.value - prev.value).abs() <= prev.tail_bound * (1.0 + 1e-12) + 1e-14 * prev.value.abs(),
                "{} {} {}", prev.value, next.value, prev.tail_bound);
            prop_assert!(next.tail_bound <= prev.tail_bound);
            prev = next;
        }
    }

    #[test]
    fn phase_is_increasing(alpha in alphas(), a in -80.0f64..80.0, h in 1e-3f64..5.0) {
        let s = PhaseSequence::new(alpha, 1).unwrap().with_n_max(1 << 24);
        let lo = phase_derivative(&s, a, 0).unwrap();
        let hi = phase_derivative(&s, a + h, 0).unwrap();
        prop_assert!(hi.value - hi.tail_bound > lo.value + lo.tail_bound);
    }

    #[test]
    fn first_derivative_positive(alpha in alphas(), x in -500.0f64..500.0) {
        let s = PhaseSequence::new(alpha, 1).unwrap().with_n_max(1 << 26);
        let e = phase_derivative(&s, x, 1).unwrap();
        prop_assert!(e.value - e.tail_bound > 0.0);
    }

    #[test]
    fn zero_imaginary_parts_positive(alpha in 0.05f64..0.95, n in 1u64..1_000_000) {
        let s = PhaseSequence::new(alpha, 1).unwrap();
        prop_assert!(s.zero(n).1 > 0.0);
    }
}

#[test]
fn json_config_round_trip() {
    let s = PhaseSequence::from_json(r#"{"alpha":0.5,"ell":3,"n_max":5000}"#).unwrap();
    assert_eq!((s.alpha, s.ell, s.n_max), (0.5, 3, 5000));
    assert!(PhaseSequence::from_json(r#"{"alpha":1.5,"ell":1}"#).is_err());
    assert!(PhaseSequence::from_json(r#"{"alpha":"x"}"#).is_err());
}
