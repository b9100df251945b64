use std::f64::consts::PI;

use fracgreen::symbol::{
    check_mu_transmission, compute_transmission, reduced_symbol, regularize, Cutoff, HomogeneousSymbol, SymbolSpec,
};
use fracgreen::C64;
use proptest::prelude::*;

/// arctan by its Taylor series, independent of libm.
fn atan_series(x: f64) -> f64 {
    assert!(x.abs() < 0.9);
    let mut s = 0.0;
    let mut p = x;
    for k in 0..200 {
        s += p / (2 * k + 1) as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
        p *= x * x;
    }
    s
}

fn presets(dim: usize) -> Vec<HomogeneousSymbol> {
    let mut v = vec![
        HomogeneousSymbol::frac_laplacian(dim, 0.35).unwrap(),
        HomogeneousSymbol::frac_laplacian_drift(dim, 0.5, if dim == 1 { &[0.5][..] } else { &[0.2, 0.5] }).unwrap(),
    ];
    if dim == 1 {
        v.push(HomogeneousSymbol::odd_mix_1d(0.5, 1.0).unwrap());
    }
    v
}

#[test]
fn preset_values() {
    let l = HomogeneousSymbol::frac_laplacian(2, 0.5).unwrap();
    assert!((l.eval(&[0.0, 2.0]).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-14);
    let m = HomogeneousSymbol::odd_mix_1d(0.5, 1.0).unwrap();
    assert!((m.eval(&[-3.0]).unwrap() - C64::new(3.0, -3.0)).norm() < 1e-14);
    let d = HomogeneousSymbol::frac_laplacian_drift(2, 0.5, &[0.0, 0.5]).unwrap();
    assert!((d.eval(&[0.0, 1.0]).unwrap() - C64::new(1.0, 0.5)).norm() < 1e-14);
}

#[test]
fn eval_rejects_wrong_dimension() {
    let l = HomogeneousSymbol::frac_laplacian(2, 0.5).unwrap();
    assert!(l.eval(&[1.0]).is_err());
}

#[test]
fn from_spec_matches_constructor() {
    let s = HomogeneousSymbol::from_spec(&SymbolSpec::new("frac_laplacian_drift", 0.5, vec![0.5]), 1).unwrap();
    let d = HomogeneousSymbol::frac_laplacian_drift(1, 0.5, &[0.5]).unwrap();
    for xi in [-2.0, 0.3, 5.0] {
        assert_eq!(s.eval(&[xi]).unwrap(), d.eval(&[xi]).unwrap());
    }
    assert!(HomogeneousSymbol::from_spec(&SymbolSpec::new("nope", 0.5, vec![]), 1).is_err());
}

#[test]
fn transmission_of_even_symbol() {
    for a in [0.2, 0.5, 0.9] {
        let td = compute_transmission(&HomogeneousSymbol::frac_laplacian(2, a).unwrap()).unwrap();
        assert_eq!(td.delta, 0.0);
        assert_eq!(td.mu, a);
        assert_eq!(td.mu_star, a);
        assert!((td.s0 - 1.0).abs() < 1e-15);
    }
}

#[test]
fn transmission_of_odd_mix() {
    let td = compute_transmission(&HomogeneousSymbol::odd_mix_1d(0.5, 1.0).unwrap()).unwrap();
    assert!((td.delta - 0.25).abs() < 1e-15);
    assert!((td.mu - 0.75).abs() < 1e-15);
    assert!((td.mu_star - 0.25).abs() < 1e-15);
    assert!((td.s0 - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn transmission_of_drift() {
    let td = compute_transmission(&HomogeneousSymbol::frac_laplacian_drift(1, 0.5, &[0.5]).unwrap()).unwrap();
    let oracle = atan_series(0.5) / PI;
    assert!((td.delta - oracle).abs() < 1e-14);
    assert!((td.delta - 0.1475836).abs() < 5e-8);
    assert!((td.mu - 0.6475836).abs() < 5e-8);
    assert!((td.mu + td.mu_star - 1.0).abs() < 1e-15);
}

#[test]
fn nonpositive_real_part_is_rejected() {
    let s = HomogeneousSymbol::custom(1, 0.5, &[-1.0], &[0.0]).unwrap();
    assert!(compute_transmission(&s).is_err());
}

#[test]
fn mu_condition() {
    let l = HomogeneousSymbol::frac_laplacian(1, 0.5).unwrap();
    assert!(check_mu_transmission(&l, 0.5) < 1e-12);
    // |1 - e^{-0.2 i pi}|
    let z = C64::new(1.0, 0.0) - C64::new((0.2 * PI).cos(), -(0.2 * PI).sin());
    assert!((check_mu_transmission(&l, 0.6) - z.norm()).abs() < 1e-12);
    assert!((z.norm() - 2.0 * (0.1 * PI).sin()).abs() < 1e-14);
    for dim in [1, 2] {
        for s in presets(dim) {
            let td = compute_transmission(&s).unwrap();
            assert!(check_mu_transmission(&s, td.mu) < 1e-12);
        }
    }
}

#[test]
fn reduced_symbol_far_limit() {
    for s in presets(2) {
        let td = compute_transmission(&s).unwrap();
        let q = reduced_symbol(&s, &td, Some(Cutoff::default()));
        let up = q.at(0.0, 1e6);
        let dn = q.at(0.0, -1e6);
        assert!((up - td.s0).norm() < 1e-3 * td.s0, "{} up {up}", s.preset_id());
        assert!((dn - td.s0).norm() < 1e-3 * td.s0, "{} down {dn}", s.preset_id());
    }
}

#[test]
fn reduced_symbol_closed_form() {
    let s = HomogeneousSymbol::frac_laplacian(1, 0.5).unwrap();
    let td = compute_transmission(&s).unwrap();
    let q = reduced_symbol(&s, &td, None);
    for xi in [0.3f64, 1.0, -2.5, 40.0] {
        let exact = xi.abs() / (1.0 + xi * xi).sqrt();
        assert!((q.at(0.0, xi) - exact).norm() < 1e-12, "xi={xi}");
    }
    assert!((q.at(0.0, 1.0).re - 0.70711).abs() < 5e-6);
}

#[test]
fn order_reducing_symbol_reduces_to_constant() {
    let s0 = 1.7;
    let s = HomogeneousSymbol::order_reducing(2, 0.5, 0.15, s0).unwrap();
    let td = compute_transmission(&s).unwrap();
    assert!((td.s0 - s0).abs() < 1e-12);
    let q = reduced_symbol(&s, &td, None);
    for (xp, xn) in [(0.0, 0.5), (2.0, -3.0), (-7.0, 11.0), (0.1, -0.01)] {
        assert!((q.at(xp, xn) - s0).norm() < 1e-12, "({xp},{xn})");
    }
}

#[test]
fn cutoff_support() {
    let s = HomogeneousSymbol::frac_laplacian_drift(2, 0.5, &[0.2, 0.5]).unwrap();
    let r = regularize(&s, Cutoff::default());
    assert_eq!(r.at(0.0, 0.0), C64::new(0.0, 0.0));
    for (xp, xn) in [(1.0, 0.0), (0.6, 0.8), (-3.0, 2.0)] {
        assert_eq!(r.at(xp, xn), s.at(xp, xn));
    }
    let inner = r.at(0.3, 0.3).norm();
    assert!(inner < s.at(0.3, 0.3).norm());
}

#[test]
fn reduced_symbol_is_bounded() {
    for dim in [1, 2] {
        for s in presets(dim) {
            let td = compute_transmission(&s).unwrap();
            let q = reduced_symbol(&s, &td, Some(Cutoff::default()));
            let mut sup: f64 = 0.0;
            for i in -40..=40 {
                for j in -200..=200 {
                    let xp = if dim == 1 { 0.0 } else { i as f64 * 0.5 };
                    sup = sup.max(q.at(xp, j as f64 * 0.25).norm());
                }
            }
            assert!(sup <= 10.0 * td.s0, "{} sup {sup}", s.preset_id());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn homogeneity_and_parity(xp in -50.0f64..50.0, xn in -50.0f64..50.0, t in 0.01f64..100.0) {
        prop_assume!(xn.abs() > 1e-6);
        for dim in [1usize, 2] {
            for s in presets(dim) {
                let xi: Vec<f64> = if dim == 1 { vec![xn] } else { vec![xp, xn] };
                let l = s.eval(&xi).unwrap();
                let scaled: Vec<f64> = xi.iter().map(|v| v * t).collect();
                let lt = s.eval(&scaled).unwrap();
                let expect = l * t.powf(2.0 * s.a());
                prop_assert!((lt - expect).norm() <= 1e-12 * expect.norm().max(1e-300));
                let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
                let ln = s.eval(&neg).unwrap();
                prop_assert!((ln - l.conj()).norm() <= 1e-12 * l.norm());
            }
        }
    }
}
