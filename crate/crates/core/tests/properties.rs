use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use upfrac_core::{generate_set, norm, ChangeOfVariables, Generator, LatticeSpec};

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(1.0)
}

#[test]
fn round_trips_on_ten_thousand_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let maps = [
        (ChangeOfVariables::GAlpha { alpha: 0.5 }, 1),
        (ChangeOfVariables::GAlpha { alpha: 1.7 }, 1),
        (ChangeOfVariables::PhiAlphaC { alpha: 1.0, c: 1.0 }, 1),
        (ChangeOfVariables::PhiAlphaC { alpha: 0.5, c: 2.0 }, 2),
        (ChangeOfVariables::PhiAlphaC { alpha: 2.0, c: 0.5 }, 3),
    ];
    for (map, dim) in maps {
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-6.0..6.0)).collect();
            if norm(&x) < 1e-3 {
                continue;
            }
            let back = map.inverse(&map.forward(&x).unwrap()).unwrap();
            worst = worst.max(rel_err(&back, &x));
            // the inverse direction starts from image points outside the unit ball
            let xi: Vec<f64> = x.iter().map(|v| v * (1.0 + 1.0 / norm(&x))).collect();
            let again = map.forward(&map.inverse(&xi).unwrap()).unwrap();
            worst = worst.max(rel_err(&again, &xi));
        }
        assert!(worst < 1e-10, "{map:?}: worst round-trip error {worst:e}");
    }
}

#[test]
fn regeneration_is_bit_identical() {
    let lat = LatticeSpec::parse("1,0.3;0,1").unwrap();
    for (g, d, r) in [
        (Generator::ZAlpha { alpha: 0.5 }, 1, 30.0),
        (Generator::LambdaAlphaC { alpha: 0.5, c: 1.0 }, 2, 2.0),
        (Generator::Lattice { lattice: lat }, 2, 12.0),
    ] {
        let a = generate_set(&g, d, r).unwrap();
        let b = generate_set(&g, d, r).unwrap();
        let bits = |s: &upfrac_core::DiscreteSet| -> Vec<u64> {
            s.points.iter().flatten().map(|v| v.to_bits()).collect()
        };
        assert_eq!(bits(&a), bits(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radial_profiles_are_increasing(
        alpha in 0.2f64..3.0,
        c in 0.3f64..3.0,
        r1 in 0.01f64..5.0,
        dr in 1e-6f64..2.0,
    ) {
        for map in [
            ChangeOfVariables::GAlpha { alpha },
            ChangeOfVariables::PhiAlphaC { alpha, c },
        ] {
            let r2 = r1 + dr;
            let Ok(b) = map.forward(&[r2]) else { continue };
            let (a, b) = (map.forward(&[r1]).unwrap()[0], b[0]);
            prop_assert!(b > a);
            prop_assert!(map.forward(&[-r2]).unwrap()[0] < map.forward(&[-r1]).unwrap()[0]);
        }
    }

    #[test]
    fn dual_cell_tiles_space(
        a11 in 0.5f64..2.0, a12 in -0.8f64..0.8,
        a21 in -0.8f64..0.8, a22 in 0.5f64..2.0,
        x in -7.0f64..7.0, y in -7.0f64..7.0,
    ) {
        let lat = LatticeSpec::from_row_major(2, &[a11, a12, a21, a22]);
        prop_assume!(lat.is_ok());
        let lat = lat.unwrap();
        let (m, _) = lat.reduce(&[x, y]);
        let mut hits = Vec::new();
        for i in -25..=25i64 {
            for j in -25..=25i64 {
                let l = lat.dual_point(&[i, j]);
                if lat.in_cell(&[x - l[0], y - l[1]]) {
                    hits.push(vec![i, j]);
                }
            }
        }
        prop_assert_eq!(hits, vec![m]);
    }

    #[test]
    fn z_alpha_windows_are_nested(alpha in 0.3f64..2.0, r in 1.0f64..40.0) {
        let g = Generator::ZAlpha { alpha };
        let small = generate_set(&g, 1, r).unwrap();
        let big = generate_set(&g, 1, 2.0 * r).unwrap();
        prop_assert!(small.points.iter().all(|p| big.points.contains(p)));
        prop_assert!(small.points.windows(2).all(|w| w[0][0] < w[1][0]));
    }
}
