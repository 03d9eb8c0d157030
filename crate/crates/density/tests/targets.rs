use upfrac_core::{generate_set, ChangeOfVariables, Error, Generator, LatticeSpec};
use upfrac_density::{
    check_separated, decay_audit, estimate_density, gap_criterion, mesh_bound_audit, DecayModel, DecayModelKind,
    LogLatticeSet, NearestPoint,
};

fn distance_to_one(e: &upfrac_density::DensityEstimate, k: usize) -> f64 {
    let s = e.sup_ratios()[k];
    let i = e.inf_ratios()[k];
    (s - 1.0).abs().max((i - 1.0).abs())
}

fn assert_unit_density(set: &upfrac_core::DiscreteSet, map: &ChangeOfVariables) {
    let e = estimate_density(set, map, &[100.0, 1000.0, 5000.0]).unwrap();
    assert!(distance_to_one(&e, 1) <= 0.02, "{e:?}");
    assert!(distance_to_one(&e, 0) >= distance_to_one(&e, 1));
    assert!(distance_to_one(&e, 1) >= distance_to_one(&e, 2));
    assert!(e.trend.converging);
}

#[test]
fn straightened_square_roots_have_unit_density() {
    let set = generate_set(&Generator::ZAlpha { alpha: 0.5 }, 1, 120.0).unwrap();
    assert_unit_density(&set, &ChangeOfVariables::GAlpha { alpha: 0.5 });
}

#[test]
fn straightened_log_sets_have_unit_density() {
    for (alpha, c) in [(0.5, 1.0), (1.0, 2.0)] {
        // image radius about 1.5e4
        let radius = c * (1.5e4f64).ln().powf(alpha);
        let set = generate_set(&Generator::LambdaAlphaC { alpha, c }, 1, radius).unwrap();
        assert_unit_density(&set, &ChangeOfVariables::PhiAlphaC { alpha, c });
    }
}

#[test]
fn integer_window() {
    let set = generate_set(&Generator::Lattice { lattice: LatticeSpec::identity(1) }, 1, 1e4).unwrap();
    let e = estimate_density(&set, &ChangeOfVariables::Identity, &[1000.0]).unwrap();
    assert!((e.upper - 1.0).abs() <= 1e-3 && (e.lower - 1.0).abs() <= 1e-3);
}

#[test]
fn planar_log_set_density() {
    let radius = (60.0f64).ln();
    let set = generate_set(&Generator::LambdaAlphaC { alpha: 1.0, c: 1.0 }, 2, radius).unwrap();
    let e = estimate_density(&set, &ChangeOfVariables::PhiAlphaC { alpha: 1.0, c: 1.0 }, &[300.0]).unwrap();
    assert!(e.upper >= 1.0 && e.lower <= 1.0);
    assert!(e.upper < 1.3 && e.lower > 0.7, "{e:?}");
}

#[test]
fn gap_criterion_examples() {
    let set = generate_set(&Generator::ZAlpha { alpha: 0.5 }, 1, 100.0).unwrap();
    let g = gap_criterion(&set, &ChangeOfVariables::GAlpha { alpha: 0.5 }).unwrap();
    let edge = 2.0 * 9999f64.sqrt() * (100.0 - 9999f64.sqrt());
    assert!(g.values.iter().any(|v| (v.1 - edge).abs() < 1e-9));
    assert!((g.limsup - 1.0).abs() < 1e-3 && (g.liminf - 1.0).abs() < 1e-3);
    // shells approach 1 from below
    let errs: Vec<f64> = g.shells.iter().map(|s| (1.0 - s.1).abs()).collect();
    assert!(errs.windows(2).all(|w| w[0] <= w[1]));

    let set = generate_set(&Generator::LambdaAlphaC { alpha: 1.0, c: 1.0 }, 1, 15.0).unwrap();
    let g = gap_criterion(&set, &ChangeOfVariables::PhiAlphaC { alpha: 1.0, c: 1.0 }).unwrap();
    assert!((g.limsup - 1.0).abs() < 1e-3 && (g.liminf - 1.0).abs() < 1e-3, "{} {}", g.limsup, g.liminf);
}

#[test]
fn log_sets_are_phi_separated() {
    let set = generate_set(&Generator::LambdaAlphaC { alpha: 1.0, c: 1.0 }, 1, 10.0).unwrap();
    let plain = check_separated(&set, &ChangeOfVariables::Identity).unwrap();
    assert!(!plain.separated && plain.shrinking);
    let mapped = check_separated(&set, &ChangeOfVariables::PhiAlphaC { alpha: 1.0, c: 1.0 }).unwrap();
    assert!(mapped.separated && (mapped.min_gap - 1.0).abs() < 1e-6);
}

fn radial_probes(dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let r = 2.0 + 6.0 * i as f64 / (count - 1) as f64;
            if dim == 1 {
                vec![if i % 2 == 0 { r } else { -r }]
            } else {
                let t = 2.399963229728653 * i as f64;
                vec![r * t.cos(), r * t.sin()]
            }
        })
        .collect()
}

#[test]
fn mesh_bound_line() {
    let phi = ChangeOfVariables::PhiAlphaC { alpha: 1.0, c: 1.0 };
    let window = generate_set(&Generator::LambdaAlphaC { alpha: 1.0, c: 1.0 }, 1, 9.0).unwrap();
    let probes = radial_probes(1, 100);
    let a = mesh_bound_audit(&window, &phi, 0.5, &probes).unwrap();
    let b = mesh_bound_audit(&LogLatticeSet::new(1, 1.0, 1.0).unwrap(), &phi, 0.5, &probes).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.violations, 0);
    assert!(a.c_fit < 1.0 && a.trend_slope <= 0.0, "{} {}", a.c_fit, a.trend_slope);
}

#[test]
fn mesh_bound_plane() {
    let phi = ChangeOfVariables::PhiAlphaC { alpha: 1.0, c: 1.0 };
    let set = LogLatticeSet::new(2, 1.0, 1.0).unwrap();
    let a = mesh_bound_audit(&set, &phi, 0.5, &radial_probes(2, 100)).unwrap();
    assert_eq!(a.violations, 0);
    assert!(a.c_fit.is_finite() && a.trend_slope <= 0.0, "{} {}", a.c_fit, a.trend_slope);
    assert!(a.to_csv().starts_with("probe_norm,nn_distance,bound,ratio\n"));
}

#[test]
fn mesh_probe_on_the_set() {
    let phi = ChangeOfVariables::PhiAlphaC { alpha: 1.0, c: 1.0 };
    let set = LogLatticeSet::new(2, 1.0, 1.0).unwrap();
    let y = vec![0.0, (7.0f64).ln()];
    let a = mesh_bound_audit(&set, &phi, 0.5, &[y.clone()]).unwrap();
    assert_eq!(a.rows[0].nn_distance, 0.0);
    assert_eq!(a.rows[0].ratio, 0.0);
    let window = generate_set(&Generator::LambdaAlphaC { alpha: 1.0, c: 1.0 }, 2, 3.0).unwrap();
    assert!(matches!(window.nearest(&[2.999, 0.0]), Err(Error::Coverage(_))));
}

#[test]
fn gaussian_fractional_laplacian_decays_polynomially() {
    // large-|x| profile of (-Delta)^s exp(-pi x^2) in one dimension is |x|^{-1-2s}
    let s = 0.5;
    let samples: Vec<(f64, f64)> = (0..40)
        .map(|i| 3.0 * 1.1f64.powi(i))
        .map(|x: f64| {
            let oracle = -1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI) * x.powf(-1.0 - 2.0 * s);
            (x, oracle * (1.0 + (-x * x).exp()))
        })
        .collect();
    let e = decay_audit(&samples, DecayModelKind::Poly).unwrap();
    let DecayModel::Poly { exponent, .. } = e.model else { panic!() };
    assert!((exponent + 1.0 + 2.0 * s).abs() < 1e-3, "{exponent}");
}
