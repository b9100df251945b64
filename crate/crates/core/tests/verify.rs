use std::f64::consts::PI;

use fracgreen::grid::{Grid, GridField, Support};
use fracgreen::muspace::{make_mu_function, BumpSpec, MuConfig, MuFunction};
use fracgreen::symbol::{compute_transmission, Cutoff, HomogeneousSymbol};
use fracgreen::verify::{
    apply_l, convergence_sweep, fft_reference, oracle_apply, ApplyOptions, IdentityId, Route, Verifier,
};
use fracgreen::C64;

fn bump_u() -> BumpSpec {
    BumpSpec::gaussian(1.0, vec![0.5], vec![1.0])
}

fn bump_v() -> BumpSpec {
    BumpSpec { poly: vec![1.0, 0.3], ..BumpSpec::gaussian(0.8, vec![0.2], vec![0.9]) }
}

fn mu_fn(g: &Grid, e: f64, b: &BumpSpec, s: C64) -> MuFunction {
    make_mu_function(g, e, b, s, &MuConfig::default()).unwrap()
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn drift() -> HomogeneousSymbol {
    HomogeneousSymbol::frac_laplacian_drift(1, 0.5, &[0.5]).unwrap()
}

fn restricted_w(g: &Grid) -> GridField {
    GridField::from_fn(g, Support::RestrictedUpper, |_, x| C64::new((-(x - 0.3f64).powi(2)).exp() * (1.0 + 0.2 * x), 0.0))
}

#[test]
fn identity_names_round_trip() {
    for id in IdentityId::ALL {
        assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
    }
    assert!("lemma42".parse::<IdentityId>().is_err());
}

#[test]
fn sides_are_linear_in_the_first_argument() {
    let g = Grid::new(1, 1024, 8.0).unwrap();
    let v = Verifier::new(&drift(), &g, ApplyOptions::default()).unwrap();
    let td = v.td;
    let c = C64::new(2.0, 1.0);
    let check = |a: (C64, C64), b: (C64, C64)| {
        assert!((b.0 - a.0 * c).norm() <= 1e-12 * b.0.norm(), "lhs {} vs {}", b.0, a.0 * c);
        assert!((b.1 - a.1 * c).norm() <= 1e-12 * b.1.norm(), "rhs {} vs {}", b.1, a.1 * c);
    };
    let up = mu_fn(&g, td.mu_star, &bump_v(), one());
    let r1 = v.ibp_general(&mu_fn(&g, td.mu, &bump_u(), one()), &up).unwrap();
    let r2 = v.ibp_general(&mu_fn(&g, td.mu, &bump_u(), c), &up).unwrap();
    check((r1.lhs, r1.rhs), (r2.lhs, r2.rhs));
    let r1 = v.halfways_green(&mu_fn(&g, td.mu - 1.0, &bump_u(), one()), &up).unwrap();
    let r2 = v.halfways_green(&mu_fn(&g, td.mu - 1.0, &bump_u(), c), &up).unwrap();
    check((r1.lhs, r1.rhs), (r2.lhs, r2.rhs));
    // antilinear in the second argument
    let r3 = v.halfways_green(&mu_fn(&g, td.mu - 1.0, &bump_u(), one()), &mu_fn(&g, td.mu_star, &bump_v(), c.conj())).unwrap();
    check((r1.lhs, r1.rhs), (r3.lhs, r3.rhs));
}

#[test]
fn flipping_v_flips_both_sides() {
    let g = Grid::new(1, 1024, 8.0).unwrap();
    let v = Verifier::new(&drift(), &g, ApplyOptions::default()).unwrap();
    let td = v.td;
    let u = mu_fn(&g, td.mu - 1.0, &bump_u(), one());
    let a = v.halfways_green(&u, &mu_fn(&g, td.mu_star, &bump_v(), one())).unwrap();
    let b = v.halfways_green(&u, &mu_fn(&g, td.mu_star, &bump_v(), -one())).unwrap();
    assert_eq!(a.lhs, -b.lhs);
    assert_eq!(a.rhs, -b.rhs);
}

#[test]
fn zero_data_gives_zero() {
    let g = Grid::new(1, 512, 8.0).unwrap();
    let v = Verifier::new(&drift(), &g, ApplyOptions::default()).unwrap();
    let td = v.td;
    let zero = GridField::from_fn(&g, Support::RestrictedUpper, |_, _| C64::new(0.0, 0.0));
    let r = v.lemma41(&zero, &mu_fn(&g, td.mu, &bump_v(), one())).unwrap();
    assert_eq!(r.lhs.norm() + r.rhs.norm(), 0.0);
    let r = v.zero_identity(&mu_fn(&g, td.mu, &bump_u(), C64::new(0.0, 0.0)), &mu_fn(&g, td.mu_star, &bump_v(), one())).unwrap();
    assert_eq!(r.abs_residual, 0.0);
    let r = v.ibp_special(&mu_fn(&g, td.mu, &bump_u(), C64::new(0.0, 0.0)), &mu_fn(&g, td.mu_star, &bump_v(), one())).unwrap();
    assert_eq!(r.lhs.norm() + r.rhs.norm(), 0.0);
}

#[test]
fn symmetric_case_is_real() {
    let s = HomogeneousSymbol::frac_laplacian(1, 0.5).unwrap();
    let g = Grid::new(1, 1024, 8.0).unwrap();
    let v = Verifier::new(&s, &g, ApplyOptions::default()).unwrap();
    let r = v.ibp_special(&mu_fn(&g, 0.5, &bump_u(), one()), &mu_fn(&g, 0.5, &bump_v(), one())).unwrap();
    assert!(r.lhs.im.abs() <= 1e-10 * r.lhs.norm(), "{}", r.lhs);
    assert!(r.rhs.im.abs() <= 1e-10 * r.rhs.norm(), "{}", r.rhs);
}

#[test]
fn order_shift_pairing_with_negative_exponent() {
    // a = 1/4, delta = -0.45, mu = -0.2
    let s = HomogeneousSymbol::odd_mix_1d(0.25, (-0.45 * PI).tan()).unwrap();
    let td = compute_transmission(&s).unwrap();
    assert!((td.mu + 0.2).abs() < 1e-12);
    let sweep = convergence_sweep(&[512, 1024, 2048, 4096], |n| {
        let g = Grid::new(1, n, 8.0)?;
        let v = Verifier::new(&s, &g, ApplyOptions::default())?;
        v.lemma41(&restricted_w(&g), &mu_fn(&g, td.mu, &bump_v(), one()))
    })
    .unwrap();
    let res: Vec<f64> = sweep.reports.iter().map(|r| r.rel_residual).collect();
    assert!(sweep.finest().rel_residual <= 2e-2, "{res:?}");
}

#[test]
fn factored_route_matches_direct() {
    let s = HomogeneousSymbol::frac_laplacian(1, 0.5).unwrap();
    let g = Grid::new(1, 2048, 8.0).unwrap();
    let u = mu_fn(&g, 0.5, &bump_u(), one());
    let a = apply_l(&s, &u.field, &ApplyOptions::default()).unwrap().values();
    let b = apply_l(&s, &u.field, &ApplyOptions { route: Route::Factored, ..ApplyOptions::default() }).unwrap().values();
    let h = g.hn();
    let (mut d, mut m) = (0.0f64, 0.0f64);
    for j in 0..g.n {
        let x = g.xn(j);
        if x >= 4.0 * h && x <= 4.0 {
            d = d.max((a[j] - b[j]).norm());
            m = m.max(a[j].norm());
        }
    }
    assert!(d <= 1e-4 * m, "{}", d / m);
    let whole = GridField::from_fn(&g, Support::Whole, |_, x| C64::new((-x * x).exp(), 0.0));
    assert!(apply_l(&s, &whole, &ApplyOptions { route: Route::Factored, ..ApplyOptions::default() }).is_err());
}

fn gauss(x: f64) -> C64 {
    C64::new((-x * x).exp(), 0.0)
}

#[test]
fn oracle_symmetry_and_translation() {
    let s = HomogeneousSymbol::frac_laplacian(1, 0.5).unwrap();
    let cut = Cutoff::default();
    let xs = [-1.5, -0.7, -0.2, 0.2, 0.7, 1.5];
    let o = oracle_apply(&s, cut, &gauss, &xs, 8.0).unwrap();
    for i in 0..3 {
        assert!((o[i] - o[5 - i]).norm() <= 1e-12 * o[i].norm().max(1e-3), "{} vs {}", o[i], o[5 - i]);
    }
    let shift = 0.37;
    let moved = oracle_apply(&s, cut, &|x| gauss(x - shift), &xs.map(|x| x + shift), 8.0).unwrap();
    for (a, b) in o.iter().zip(&moved) {
        assert!((a - b).norm() <= 1e-8, "{a} vs {b}");
    }
}

#[test]
fn oracle_against_fft() {
    let s = HomogeneousSymbol::frac_laplacian(1, 0.5).unwrap();
    let cut = Cutoff::default();
    let g = Grid::new(1, 2048, 16.0).unwrap();
    let f = GridField::from_fn(&g, Support::Whole, |_, x| gauss(x));
    let r = fft_reference(&s, cut, &f).unwrap().values();
    let idx: Vec<usize> = (0..g.n).filter(|&j| g.xn(j).abs() <= 1.5 && j % 16 == 0).collect();
    let xs: Vec<f64> = idx.iter().map(|&j| g.xn(j)).collect();
    let o = oracle_apply(&s, cut, &gauss, &xs, 8.0).unwrap();
    let m = o.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (k, &j) in idx.iter().enumerate() {
        assert!((o[k] - r[j]).norm() <= 1e-3 * m, "x={}: {} vs {}", xs[k], o[k], r[j]);
    }
    assert!(oracle_apply(&HomogeneousSymbol::frac_laplacian(2, 0.5).unwrap(), cut, &gauss, &[0.0], 8.0).is_err());
}

#[test]
fn sweep_needs_three_grids() {
    let g = |n| {
        let g = Grid::new(1, n, 8.0)?;
        let v = Verifier::new(&drift(), &g, ApplyOptions::default())?;
        v.zero_identity(&mu_fn(&g, v.td.mu, &bump_u(), one()), &mu_fn(&g, v.td.mu_star, &bump_v(), one()))
    };
    assert!(convergence_sweep(&[512, 1024], g).is_err());
}

#[test]
fn halfways_green_needs_positive_exponents() {
    let s = HomogeneousSymbol::odd_mix_1d(0.25, (-0.3 * PI).tan()).unwrap();
    let g = Grid::new(1, 256, 8.0).unwrap();
    let v = Verifier::new(&s, &g, ApplyOptions::default()).unwrap();
    let u = mu_fn(&g, -0.5, &bump_u(), one());
    assert!(v.halfways_green(&u, &mu_fn(&g, v.td.mu_star, &bump_v(), one())).is_err());
    assert!(v.full_green(&u, &u, None).is_err());
}

#[test]
fn mismatched_grids_are_rejected() {
    let g = Grid::new(1, 256, 8.0).unwrap();
    let other = Grid::new(1, 512, 8.0).unwrap();
    let v = Verifier::new(&drift(), &g, ApplyOptions::default()).unwrap();
    let u = mu_fn(&other, v.td.mu, &bump_u(), one());
    assert!(v.zero_identity(&u, &u).is_err());
    assert!(Verifier::new(&HomogeneousSymbol::frac_laplacian(2, 0.5).unwrap(), &g, ApplyOptions::default()).is_err());
}
