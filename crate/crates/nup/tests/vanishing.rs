use std::time::Instant;

use upfrac_core::LatticeSpec;
use upfrac_nup::{
    build_nup, choose_bump, verify_lattice_vanishing, verify_lattice_vanishing_with, Certified, NupFunction,
    VanishingMode, VerifyConfig,
};
use upfrac_ops::{Multiplier, MultiplierSpec};

fn witness(lattice: &LatticeSpec, op: MultiplierSpec) -> NupFunction {
    let bump = choose_bump(lattice, &lattice.dual_vector(0)).unwrap();
    build_nup(lattice, &op, &bump).unwrap()
}

const MODES: [VanishingMode; 3] =
    [VanishingMode::DirectQuadrature, VanishingMode::Periodization, VanishingMode::Unaligned];

fn doubling(n: &NupFunction, k: i64) -> (f64, f64) {
    let coarse = VerifyConfig { panels: Some(4 + k as usize / 2), ..VerifyConfig::default() };
    let fine = VerifyConfig { panels: coarse.panels.map(|p| 2 * p), ..coarse.clone() };
    let a = verify_lattice_vanishing_with(n, k, VanishingMode::Unaligned, &coarse).unwrap().max_residual();
    let b = verify_lattice_vanishing_with(n, k, VanishingMode::Unaligned, &fine).unwrap().max_residual();
    (a, b)
}

#[test]
fn line_fractional_laplacians() {
    let l = LatticeSpec::identity(1);
    for s in [0.25, 0.5, 0.75] {
        let n = witness(&l, MultiplierSpec::frac_laplacian(s, 1).unwrap());
        for mode in MODES {
            let t = Instant::now();
            let r = verify_lattice_vanishing(&n, 20, mode).unwrap();
            println!("s={s} {mode:?} residual {:.3e} in {:?}", r.max_residual(), t.elapsed());
            assert!(r.max_residual() <= 1e-8);
        }
        let (a, b) = doubling(&n, 20);
        println!("s={s} doubling {a:.3e} -> {b:.3e}");
        assert!(b <= a.max(1e-13));
    }
}

#[test]
fn sheared_plane() {
    let l = LatticeSpec::parse("1,0.3;0,1").unwrap();
    let n = witness(&l, MultiplierSpec::frac_laplacian(0.75, 2).unwrap());
    for mode in MODES {
        let t = Instant::now();
        let r = verify_lattice_vanishing(&n, 8, mode).unwrap();
        println!("{mode:?} residual {:.3e} in {:?}", r.max_residual(), t.elapsed());
        assert!(r.max_residual() <= 1e-6);
        assert_eq!(r.rows.len(), 17 * 17);
    }
    let (a, b) = doubling(&n, 8);
    println!("plane doubling {a:.3e} -> {b:.3e}");
    assert!(b <= a.max(1e-13));
}

#[test]
fn catalog_multipliers() {
    let l = LatticeSpec::identity(1);
    for kind in [Multiplier::ShiftedFrac { s: 0.5, lambda: 1.0 }, Multiplier::Mixed { s: 0.5, gamma: 2.0 }] {
        let n = witness(&l, MultiplierSpec::new(kind.clone(), 1).unwrap());
        assert!(n.min_g[0] > 0.0);
        println!("{kind:?} certified {:?} min g {:?}", n.certified, n.min_g);
        for mode in MODES {
            let r = verify_lattice_vanishing(&n, 20, mode).unwrap();
            println!("{kind:?} {mode:?} residual {:.3e}", r.max_residual());
            assert!(r.max_residual() <= 1e-8);
        }
        let (a, b) = doubling(&n, 20);
        assert!(b <= a.max(1e-13));
    }
}

#[test]
fn unimodular_change_of_basis() {
    let a = LatticeSpec::parse("1,0.3;0,1").unwrap();
    // A U with U = [[1,1],[0,1]]
    let au = LatticeSpec::parse("1,1.3;0,1").unwrap();
    for l in [a, au] {
        let n = witness(&l, MultiplierSpec::frac_laplacian(0.5, 2).unwrap());
        let r = verify_lattice_vanishing(&n, 4, VanishingMode::Unaligned).unwrap();
        assert!(r.max_residual() <= 1e-6, "{}", r.max_residual());
        assert_eq!(n.certified, Certified::WholeCell);
    }
}
