use fracgreen::grid::Grid;
use fracgreen::symbol::{compute_transmission, reduced_symbol, Cutoff, HomogeneousSymbol, ReducedSymbol};
use fracgreen::wiener_hopf::{
    boundary_jump_symbol, log_plus, log_plus2, log_plus_at_zero, plus_integral, wh_decompose, wh_decompose_table,
    PlusHint, WhConfig,
};
use fracgreen::C64;

const PI: f64 = std::f64::consts::PI;

fn reduced(sym: &HomogeneousSymbol) -> ReducedSymbol {
    let td = compute_transmission(sym).unwrap();
    reduced_symbol(sym, &td, Some(Cutoff::default()))
}

/// Composite Gauss-Legendre (5 points per panel) on `[0, 1]`.
fn integrate01(f: impl Fn(f64) -> C64) -> C64 {
    let x = [0.0, -0.538_469_310_105_683, 0.538_469_310_105_683, -0.906_179_845_938_664, 0.906_179_845_938_664];
    let w = [0.568_888_888_888_889, 0.478_628_670_499_366, 0.478_628_670_499_366, 0.236_926_885_056_189, 0.236_926_885_056_189];
    let panels = 400;
    let hp = 1.0 / panels as f64;
    let mut s = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * hp;
        for i in 0..5 {
            s += f(mid + 0.5 * hp * x[i]) * (0.5 * hp * w[i]);
        }
    }
    s
}

#[test]
fn log_pair_transforms() {
    // E1(s x) = int_1^oo e^{-s x t} dt / t, so the half-line transforms reduce to integrals over u = 1/t in (0, 1]
    for sigma in [0.5, 1.0, 3.0] {
        for xi in [-20.0, -1.0, -0.04, 1e-5, 0.3, 7.0] {
            let g = integrate01(|u| C64::new(sigma, xi * u).inv()) / PI;
            assert!((log_plus(sigma, xi) - g).norm() < 1e-10 * g.norm(), "g+ at sigma={sigma} xi={xi}");
            let w = integrate01(|u| C64::new(sigma, xi * u).powi(-2) * u) / PI;
            assert!((log_plus2(sigma, xi) - w).norm() < 1e-10 * w.norm(), "w+ at sigma={sigma} xi={xi}");
        }
        let w0 = 1.0 / (2.0 * PI * sigma * sigma);
        assert!((log_plus2(sigma, 1e-7) - w0).norm() < 1e-6 * w0);
        assert!((log_plus(sigma, 0.0) - 1.0 / (PI * sigma)).norm() < 1e-15);
        // E1(y) + ln y -> -0.5772156649...
        let b = -(0.577_215_664_901_532_9 + sigma.ln()) / PI;
        assert!((log_plus_at_zero(sigma) - b).abs() < 1e-15);
    }
}

#[test]
fn plus_integral_of_zero() {
    let g = Grid::new(1, 1024, 8.0).unwrap();
    let f = vec![C64::new(0.0, 0.0); g.n];
    for hint in [PlusHint::FitContinuous, PlusHint::Discrete { zero_in: true }, PlusHint::Discrete { zero_in: false }] {
        let p = plus_integral(&g, &f, &hint);
        assert_eq!(p.quadrature, C64::new(0.0, 0.0));
        assert_eq!(p.extrapolated, C64::new(0.0, 0.0));
    }
}

#[test]
fn plus_integral_of_exponential() {
    // 1/(1 + i xi) is the transform of e^{-x} on x > 0, whose value at 0+ is 1
    for n in [1024, 4096] {
        let g = Grid::new(1, n, 16.0).unwrap();
        let f: Vec<C64> = (0..n).map(|k| C64::new(1.0, g.xi_n(k)).inv()).collect();
        let p = plus_integral(&g, &f, &PlusHint::FitContinuous);
        assert!((p.quadrature - 1.0).norm() < 1e-4, "N={n} quadrature {}", p.quadrature);
        assert!((p.extrapolated - 1.0).norm() < 1e-4, "N={n} extrapolated {}", p.extrapolated);
        let exact = PlusHint::Model { sigma: 1.0, coeffs: vec![C64::new(1.0, 0.0)], log: [C64::new(0.0, 0.0); 2], zero_in: true };
        let p = plus_integral(&g, &f, &exact);
        assert!((p.value() - 1.0).norm() < 1e-12);
    }
}

#[test]
fn constant_symbol_has_no_parts() {
    let s = HomogeneousSymbol::order_reducing(2, 0.5, 0.2, 1.3).unwrap();
    let g = Grid::new(2, 64, 8.0).unwrap();
    let dec = wh_decompose(&reduced(&s), &g, &WhConfig::default()).unwrap();
    for line in &dec.lines {
        assert!(line.f_plus.iter().chain(&line.f_minus).all(|v| v.norm() < 1e-12));
    }
    let b = boundary_jump_symbol(&dec).unwrap();
    assert!(b.b_vals.iter().chain(&b.b_jump).all(|v| v.norm() < 1e-12));
}

#[test]
fn reconstruction() {
    let syms = [
        (HomogeneousSymbol::frac_laplacian(1, 0.25).unwrap(), 1024),
        (HomogeneousSymbol::frac_laplacian_drift(1, 0.5, &[0.5]).unwrap(), 1024),
        (HomogeneousSymbol::odd_mix_1d(0.5, 1.0).unwrap(), 1024),
        (HomogeneousSymbol::frac_laplacian_drift(2, 0.5, &[0.3, 0.5]).unwrap(), 64),
    ];
    for (s, n) in syms {
        let g = Grid::new(s.dim(), n, 8.0).unwrap();
        let q = reduced(&s);
        let dec = wh_decompose(&q, &g, &WhConfig::default()).unwrap();
        assert!(dec.residual_recon <= 1e-10 * dec.s0, "{}: {}", s.preset_id(), dec.residual_recon);
        assert!(dec.leak < 1e-8, "{}: leak {}", s.preset_id(), dec.leak);
    }
}

#[test]
fn self_convergence_in_normal_frequency() {
    let s = HomogeneousSymbol::frac_laplacian(1, 0.25).unwrap();
    let q = reduced(&s);
    // the kernel decays like |x|^-3 (C^2 cutoff), so a wide box keeps its edge value out of the comparison
    let (n, bx) = (32768, 64.0);
    let a = wh_decompose(&q, &Grid::new(1, n, bx).unwrap(), &WhConfig::default()).unwrap();
    // doubling N with the same box keeps the frequency spacing and doubles the band
    let b = wh_decompose(&q, &Grid::new(1, 2 * n, bx).unwrap(), &WhConfig::default()).unwrap();
    let (fa, fb) = (&a.lines[0].f_plus, &b.lines[0].f_plus);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..n / 2 {
        let kk = [(k, k), (n - 1 - k, 2 * n - 1 - k)];
        for (i, j) in kk {
            worst = worst.max((fa[i] - fb[j]).norm());
            scale = scale.max(fb[j].norm());
        }
    }
    assert!(worst <= 1e-6 * scale, "relative difference {}", worst / scale);
}

#[test]
fn decomposition_is_idempotent() {
    for (s, n) in [
        (HomogeneousSymbol::frac_laplacian_drift(1, 0.5, &[0.5]).unwrap(), 1024),
        (HomogeneousSymbol::frac_laplacian_drift(2, 0.5, &[0.3, 0.5]).unwrap(), 64),
    ] {
        let g = Grid::new(s.dim(), n, 8.0).unwrap();
        let dec = wh_decompose(&reduced(&s), &g, &WhConfig::default()).unwrap();
        let (vals, series, logs) = dec.plus_symbol();
        let again = wh_decompose_table(&g, &vals, &series, &logs, dec.s0, &WhConfig::default()).unwrap();
        for (l0, l1) in dec.lines.iter().zip(&again.lines) {
            for (x, y) in l0.f_plus.iter().zip(&l1.f_plus) {
                assert!((x - y).norm() <= 1e-10 * dec.s0);
            }
            assert!(l1.f_minus.iter().all(|v| v.norm() <= 1e-10 * dec.s0));
        }
    }
}

/// The jump of the kernel of `q - s0` is the coefficient of `1/(i xi_n)`, read off the odd part far out.
fn jump_oracle(q: &ReducedSymbol, xp: f64) -> C64 {
    let t = 1e6;
    C64::new(0.0, t / 2.0) * (q.at(xp, t) - q.at(xp, -t))
}

#[test]
fn boundary_symbol_against_far_field_oracle() {
    let cases = [
        (HomogeneousSymbol::frac_laplacian_drift(1, 0.5, &[0.5]).unwrap(), 2048),
        (HomogeneousSymbol::odd_mix_1d(0.5, 1.0).unwrap(), 2048),
        (HomogeneousSymbol::frac_laplacian_drift(2, 0.5, &[0.3, 0.5]).unwrap(), 2048),
    ];
    for (s, n) in cases {
        let g = Grid::new(s.dim(), n, 8.0).unwrap();
        let q = reduced(&s);
        let dec = wh_decompose(&q, &g, &WhConfig::default()).unwrap();
        let b = boundary_jump_symbol(&dec).unwrap();
        let mut checked = 0;
        for l in 0..g.lines() {
            if !b.resolved[l] {
                continue;
            }
            checked += 1;
            let o = jump_oracle(&q, g.xi_p(l));
            let tol = 1e-4 * dec.s0;
            assert!((b.b_vals[l] - o).norm() < tol, "{} line {l}: b {} oracle {o}", s.preset_id(), b.b_vals[l]);
            assert!((b.b_jump[l] - o).norm() < tol, "{} line {l}: jump {} oracle {o}", s.preset_id(), b.b_jump[l]);
        }
        assert!(checked > 0);
        assert!(b.route_residual <= 1e-4, "{}: routes {}", s.preset_id(), b.route_residual);
    }
}

#[test]
fn even_symbol_has_no_jump() {
    let s = HomogeneousSymbol::frac_laplacian(1, 0.5).unwrap();
    let g = Grid::new(1, 2048, 8.0).unwrap();
    let dec = wh_decompose(&reduced(&s), &g, &WhConfig::default()).unwrap();
    let b = boundary_jump_symbol(&dec).unwrap();
    assert!(b.b_vals[0].norm() < 1e-4, "{}", b.b_vals[0]);
    assert!(b.b_jump[0].norm() < 1e-4, "{}", b.b_jump[0]);
}

#[test]
fn coarse_frequency_box_is_reported() {
    let s = HomogeneousSymbol::frac_laplacian_drift(1, 0.5, &[0.5]).unwrap();
    let g = Grid::new(1, 8, 64.0).unwrap();
    let cfg = WhConfig { tail_tol: 1e-6, ..WhConfig::default() };
    assert!(wh_decompose(&reduced(&s), &g, &cfg).is_err());
}

#[test]
fn boundary_symbol_is_first_order() {
    let s = HomogeneousSymbol::frac_laplacian_drift(2, 0.5, &[0.3, 0.5]).unwrap();
    let g = Grid::new(2, 512, 8.0).unwrap();
    let q = reduced(&s);
    let dec = wh_decompose(&q, &g, &WhConfig::default()).unwrap();
    let b = boundary_jump_symbol(&dec).unwrap();
    // largest doubling pair l, 2l on which b still matches the far-field oracle to 1%
    let close = |l: usize| (b.b_vals[l] - jump_oracle(&q, g.xi_p(l))).norm() <= 1e-2 * b.b_vals[l].norm();
    let l = (1..g.n / 4).filter(|&l| close(l) && close(2 * l)).max().unwrap();
    assert!(g.xi_p(l) >= 3.0, "only resolved up to xi' = {}", g.xi_p(l));
    let ratio = b.b_vals[2 * l].norm() / b.b_vals[l].norm();
    assert!((ratio - 2.0).abs() <= 0.05 * 2.0, "ratio {ratio} at xi' = {}", g.xi_p(l));
}
