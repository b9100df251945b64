//! Quadrature on the upper halfspace.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use super::{fft, EdgeGroup, GridField};
use crate::error::{Error, Result};
use crate::special::gamma;

fn legendre8() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| crate::verify::gauss_legendre(8))
}

/// `int_a^b x^beta (x - a)^k dx` for `k <= P`.
fn moments(a: f64, b: f64, beta: f64) -> [f64; P + 1] {
    if a == 0.0 {
        return std::array::from_fn(|k| b.powf(beta + k as f64 + 1.0) / (beta + k as f64 + 1.0));
    }
    // x^beta is smooth away from 0, so Gauss-Legendre is exact to rounding here
    let (x, w) = legendre8();
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut out = [0.0; P + 1];
    for (xi, wi) in x.iter().zip(w) {
        let t = m + r * xi;
        let mut p = t.powf(beta) * wi * r;
        for o in out.iter_mut() {
            *o += p;
            p *= t - a;
        }
    }
    out
}

/// Degree of the local interpolant.
const P: usize = 3;

/// Weights of `int_a^{a+ph} x^beta f dx` on the nodes `a + i h`, from the moments.
fn panel_weights(mom: &[f64], p: usize, h: f64) -> Vec<f64> {
    // Lagrange basis on d = x - a: solve sum_i w_i (i h)^k = mom[k], k = 0..=p
    let m = p + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (k, row) in a.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().take(m).enumerate() {
            *v = (i as f64).powi(k as i32);
        }
        row[m] = mom[k] / h.powi(k as i32);
    }
    for c in 0..m {
        let piv = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        for r in 0..m {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=m {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    (0..m).map(|i| a[i][m] / a[i][i]).collect()
}

/// `int_0^{(M-1)h} x^beta f(x) dx` with `f` interpolated by cubics on groups of three panels
/// (lower degree closes the last group).
pub fn prod_trap(f: &[C64], beta: f64, h: f64) -> C64 {
    let m = f.len();
    let mut s = C64::new(0.0, 0.0);
    let mut j = 0;
    while j + 1 < m {
        let p = P.min(m - 1 - j);
        let a = j as f64 * h;
        let mom = moments(a, a + p as f64 * h, beta);
        for (i, w) in panel_weights(&mom, p, h).into_iter().enumerate() {
            s += f[j + i] * w;
        }
        j += p;
    }
    s
}

fn trap(f: &[C64], h: f64) -> C64 {
    prod_trap(f, 0.0, h)
}

fn group_pair(grid: &super::Grid, a: &EdgeGroup, b: &EdgeGroup, l: usize) -> Result<C64> {
    let sa = a.sigma_at(grid, l);
    let sb = b.sigma_at(grid, l);
    let mut s = C64::new(0.0, 0.0);
    for (k1, c1) in a.coeffs.iter().enumerate() {
        if c1[l].norm() == 0.0 {
            continue;
        }
        for (k2, c2) in b.coeffs.iter().enumerate() {
            if c2[l].norm() == 0.0 {
                continue;
            }
            let e = a.beta + b.beta + (k1 + k2) as f64;
            if e <= -1.0 {
                return Err(Error::Precondition(format!("product exponent {e:.3} is not integrable at x_n = 0")));
            }
            s += c1[l] * c2[l].conj() * gamma(e + 1.0) / (sa + sb).powf(e + 1.0);
        }
    }
    Ok(s)
}

/// `int_{x_n > 0} f conj(g) dx`, edge groups integrated with exact weights.
pub fn halfspace_inner(f: &GridField, g: &GridField) -> Result<C64> {
    f.grid.check_same(&g.grid)?;
    let grid = &f.grid;
    let n = grid.n;
    let j0 = grid.j0();
    let h = grid.hn();
    let fr = fft::to_lines(grid, &f.rem);
    let gr = fft::to_lines(grid, &g.rem);
    for grp in f.groups.iter().chain(&g.groups) {
        if grp.beta <= -1.0 {
            return Err(Error::Precondition(format!("group exponent {:.3} is not integrable", grp.beta)));
        }
    }
    let xs: Vec<f64> = (j0..n).map(|j| grid.xn(j)).collect();
    let mut total = C64::new(0.0, 0.0);
    for l in 0..grid.lines() {
        let a = &fr[l * n + j0..(l + 1) * n];
        let b = &gr[l * n + j0..(l + 1) * n];
        let prod: Vec<C64> = a.iter().zip(b).map(|(x, y)| x * y.conj()).collect();
        let mut t = trap(&prod, h);
        for grp in &f.groups {
            let v: Vec<C64> = xs.iter().zip(b).map(|(x, y)| grp.smooth_at(grid, l, *x) * y.conj()).collect();
            t += prod_trap(&v, grp.beta, h);
        }
        for grp in &g.groups {
            let v: Vec<C64> = xs.iter().zip(a).map(|(x, y)| y * grp.smooth_at(grid, l, *x).conj()).collect();
            t += prod_trap(&v, grp.beta, h);
        }
        for ga in &f.groups {
            for gb in &g.groups {
                t += group_pair(grid, ga, gb, l)?;
            }
        }
        total += t;
    }
    Ok(total * grid.line_weight())
}
