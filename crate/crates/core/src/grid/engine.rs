//! Structured application of Fourier multipliers.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{fft, EdgeGroup, Grid, GridField, SigmaMode, Support};
use crate::error::{Error, Result};
use crate::series::{group_series, pm_split, to_basis, AsymSeries, Side};
use crate::special::{gamma, rgamma};
use crate::symbol::{ReducedSymbol, RegularizedSymbol};

/// Tabulated multiplier with its far-field expansion on every line.
#[derive(Clone, Debug)]
pub struct LineTable {
    /// `values[l * N + k]`, FFT order in `xi_n`.
    pub values: Vec<C64>,
    pub series: Vec<AsymSeries>,
    /// Whether the table is the transform of a function supported in `x_n >= 0`.
    pub plus: bool,
}

#[derive(Clone, Debug)]
pub enum Factor {
    /// `(<xi'> + i xi_n)^t`
    XiPlus(f64),
    /// `(<xi'> - i xi_n)^t`
    XiMinus(f64),
    /// `i xi_n`
    Dn,
    Const(C64),
    Symbol(RegularizedSymbol),
    Reduced(ReducedSymbol),
    Table(Arc<LineTable>),
}

#[derive(Clone, Debug, Default)]
pub struct Multiplier {
    pub factors: Vec<Factor>,
}

impl Multiplier {
    pub fn new(factors: Vec<Factor>) -> Self {
        Multiplier { factors }
    }

    pub fn xi_plus(t: f64) -> Self {
        Self::new(vec![Factor::XiPlus(t)])
    }

    pub fn xi_minus(t: f64) -> Self {
        Self::new(vec![Factor::XiMinus(t)])
    }

    pub fn symbol(s: &RegularizedSymbol) -> Self {
        Self::new(vec![Factor::Symbol(s.clone())])
    }

    pub fn then(mut self, f: Factor) -> Self {
        self.factors.push(f);
        self
    }

    /// Maps plus-supported inputs to plus-supported outputs.
    pub fn preserves_plus(&self) -> bool {
        self.factors.iter().all(|f| match f {
            Factor::XiPlus(_) | Factor::Dn | Factor::Const(_) => true,
            Factor::Table(t) => t.plus,
            _ => false,
        })
    }

    pub fn line_values(&self, grid: &Grid, l: usize) -> Vec<C64> {
        let n = grid.n;
        let xp = grid.xi_p(l);
        let s = grid.bessel(l);
        let mut v = vec![C64::new(1.0, 0.0); n];
        for f in &self.factors {
            for (k, vk) in v.iter_mut().enumerate() {
                let xn = grid.xi_n(k);
                *vk *= match f {
                    Factor::XiPlus(t) => C64::new(s, xn).powf(*t),
                    Factor::XiMinus(t) => C64::new(s, -xn).powf(*t),
                    Factor::Dn => C64::new(0.0, xn),
                    Factor::Const(c) => *c,
                    Factor::Symbol(sym) => sym.at(xp, xn),
                    Factor::Reduced(q) => q.at(xp, xn),
                    Factor::Table(t) => t.values[l * n + k],
                };
            }
        }
        v
    }

    pub fn line_series(&self, grid: &Grid, l: usize, j: usize) -> AsymSeries {
        let xp = grid.xi_p(l);
        let s = grid.bessel(l);
        let mut acc = AsymSeries::constant(C64::new(1.0, 0.0), j);
        for f in &self.factors {
            let fs = match f {
                Factor::XiPlus(t) => AsymSeries::xi_power(Side::Plus, *t, s, j),
                Factor::XiMinus(t) => AsymSeries::xi_power(Side::Minus, *t, s, j),
                Factor::Dn => AsymSeries::dn(j),
                Factor::Const(c) => AsymSeries::constant(*c, j),
                Factor::Symbol(sym) => sym.sym.line_series(xp, j),
                Factor::Reduced(q) => q.line_series(xp, j),
                Factor::Table(t) => {
                    let mut s = t.series[l].clone();
                    s.plus.resize(j, C64::new(0.0, 0.0));
                    s.minus.resize(j, C64::new(0.0, 0.0));
                    s
                }
            };
            acc = acc.mul(&fs);
        }
        acc
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    /// Far-field terms subtracted per group.
    pub terms: usize,
    /// Decay rate of output groups.
    pub sigma_out: f64,
    /// Decay rate of groups created by re-expansion.
    pub sigma_fit: f64,
    /// Polynomial degree + 1 of the boundary fit for restricted inputs.
    pub fit_terms: usize,
    /// Samples used by that fit.
    pub fit_points: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { terms: 5, sigma_out: 6.0, sigma_fit: 6.0, fit_terms: 7, fit_points: 16 }
    }
}

/// Transform of a group on line `l` at every `xi_n`.
fn group_hat(grid: &Grid, g: &EdgeGroup, l: usize) -> Vec<C64> {
    let s = g.sigma_at(grid, l);
    let c = g.line_coeffs(l);
    let gam: Vec<f64> = (0..c.len()).map(|k| gamma(g.beta + k as f64 + 1.0)).collect();
    (0..grid.n)
        .map(|k| {
            let z = C64::new(s, grid.xi_n(k));
            c.iter()
                .enumerate()
                .filter(|(_, ck)| ck.norm() > 0.0)
                .map(|(kk, ck)| ck * gam[kk] * z.powf(-g.beta - 1.0 - kk as f64))
                .sum()
        })
        .collect()
}

/// Least-squares polynomial coefficients of `y(x_j)`, `x_j = j h`.
fn poly_fit(y: &[C64], h: f64, terms: usize) -> Vec<C64> {
    let m = y.len();
    let scale = m as f64 * h;
    // modified Gram-Schmidt on the Vandermonde matrix in t = x / scale
    let mut q: Vec<Vec<f64>> = (0..terms).map(|k| (0..m).map(|j| (j as f64 * h / scale).powi(k as i32)).collect()).collect();
    let mut r = vec![vec![0.0; terms]; terms];
    for k in 0..terms {
        for i in 0..k {
            let d: f64 = (0..m).map(|j| q[i][j] * q[k][j]).sum();
            r[i][k] = d;
            for j in 0..m {
                q[k][j] -= d * q[i][j];
            }
        }
        let nrm = q[k].iter().map(|v| v * v).sum::<f64>().sqrt();
        r[k][k] = nrm;
        for v in q[k].iter_mut() {
            *v /= nrm;
        }
    }
    let qty: Vec<C64> = (0..terms).map(|k| (0..m).map(|j| y[j] * q[k][j]).sum()).collect();
    let mut c = vec![C64::new(0.0, 0.0); terms];
    for k in (0..terms).rev() {
        let mut v = qty[k];
        for i in k + 1..terms {
            v -= c[i] * r[k][i];
        }
        c[k] = v / r[k][k];
    }
    c.iter().enumerate().map(|(k, v)| v / scale.powi(k as i32)).collect()
}

/// Coefficients of `p(x + d)`.
fn shift_poly(p: &[C64], d: f64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.len()];
    for (k, pk) in p.iter().enumerate() {
        let mut b = 1.0;
        for i in 0..=k {
            // binom(k, i) d^{k-i}
            out[i] += pk * b * d.powi((k - i) as i32);
            b = b * (k - i) as f64 / (i + 1) as f64;
        }
    }
    out
}

/// Taylor coefficients of `e^{sigma x} p(x)`.
fn times_exp(p: &[C64], sigma: f64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.len()];
    let mut f = vec![1.0; p.len()];
    for i in 1..p.len() {
        f[i] = f[i - 1] * sigma / i as f64;
    }
    for n in 0..p.len() {
        for k in 0..=n {
            out[n] += p[k] * f[n - k];
        }
    }
    out
}

/// Turns a field into an input on the upper halfspace: the remainder is cut to
/// `x_n >= 0`, after a polynomial boundary fit has been moved into a group for
/// restricted fields.
pub fn prepare_input(f: &GridField, cfg: &EngineConfig) -> Result<GridField> {
    let g = &f.grid;
    let n = g.n;
    let j0 = g.j0();
    let mut out = f.clone();
    match f.support {
        Support::Whole => return Ok(out),
        Support::SupportedUpper => {}
        Support::RestrictedUpper => {
            let h = g.hn();
            // the x_n = 0 sample is not used: restricted data live on the open halfline
            let m = cfg.fit_points.min(n - j0 - 1);
            let mut lines = fft::to_lines(g, &f.rem);
            let mut coeffs = vec![vec![C64::new(0.0, 0.0); g.lines()]; cfg.fit_terms];
            for l in 0..g.lines() {
                let y = &lines[l * n + j0 + 1..l * n + j0 + 1 + m];
                let p = shift_poly(&poly_fit(y, h, cfg.fit_terms), -h);
                let c = times_exp(&p, cfg.sigma_fit);
                for (k, ck) in c.iter().enumerate() {
                    coeffs[k][l] = *ck;
                }
            }
            let grp = EdgeGroup { beta: 0.0, sigma: SigmaMode::Const(cfg.sigma_fit), coeffs };
            for l in 0..g.lines() {
                for j in j0 + 1..n {
                    lines[l * n + j] -= grp.value_at(g, l, g.xn(j));
                }
                lines[l * n + j0] = lines[l * n + j0 + 1] * 2.0 - lines[l * n + j0 + 2];
            }
            out.rem = fft::from_lines(g, &lines);
            out.groups.push(grp);
        }
    }
    for i in 0..g.lines() {
        for j in 0..j0 {
            out.rem[i * n + j] = C64::new(0.0, 0.0);
        }
    }
    out.support = Support::SupportedUpper;
    out.smooth_across = true;
    Ok(out)
}

struct LineOut {
    spec: Vec<C64>,
    /// Per input group: output exponent and coefficients.
    groups: Vec<Option<(f64, Vec<C64>)>>,
}

/// `Op(mult) f`, with the far-field of the image removed analytically.
///
/// Inputs tagged restricted or supported are read as their extension by zero.
pub fn apply(mult: &Multiplier, f: &GridField, cfg: &EngineConfig) -> Result<GridField> {
    let input = prepare_input(f, cfg)?;
    let g = &input.grid;
    let n = g.n;
    let rhat = fft::to_spectrum(g, &input.rem);
    let j = cfg.terms;
    let sm = cfg.sigma_out;
    let per_line: Vec<LineOut> = (0..g.lines())
        .into_par_iter()
        .map(|l| {
            let ell = mult.line_values(g, l);
            let mser = mult.line_series(g, l, j);
            let mut u: Vec<C64> = rhat[l * n..(l + 1) * n].to_vec();
            for grp in &input.groups {
                for (a, b) in u.iter_mut().zip(group_hat(g, grp, l)) {
                    *a += b;
                }
            }
            let mut spec: Vec<C64> = ell.iter().zip(&u).map(|(a, b)| a * b).collect();
            let mut outs = Vec::with_capacity(input.groups.len());
            for grp in &input.groups {
                let gs = group_series(grp.beta, grp.sigma_at(g, l), &grp.line_coeffs(l), j);
                let ps = mser.mul(&gs);
                let p0 = ps.p0;
                let pm = pm_split(&ps);
                let pb = to_basis(p0, &pm.plus, sm);
                let mb = to_basis(p0, &pm.minus, sm);
                for (k, v) in spec.iter_mut().enumerate() {
                    let xn = g.xi_n(k);
                    let zp = C64::new(sm, xn);
                    let zm = C64::new(sm, -xn);
                    for r in 0..j {
                        let e = p0 - r as f64;
                        if mb[r].norm() > 0.0 {
                            *v -= mb[r] * zm.powf(e);
                        }
                        if pb[r].norm() > 0.0 {
                            *v -= pb[r] * zp.powf(e);
                        }
                    }
                }
                let scale = ps.max_abs();
                let coef: Vec<C64> = (0..j)
                    .map(|r| {
                        if pb[r].norm() > 1e-11 * scale {
                            pb[r] * rgamma(-(p0 - r as f64))
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                if coef.iter().any(|c| c.norm() > 0.0) {
                    outs.push(Some((-p0 - 1.0, coef)));
                } else {
                    outs.push(None);
                }
            }
            LineOut { spec, groups: outs }
        })
        .collect();

    let mut spec = vec![C64::new(0.0, 0.0); g.len()];
    for (l, lo) in per_line.iter().enumerate() {
        spec[l * n..(l + 1) * n].copy_from_slice(&lo.spec);
    }
    let rem = fft::from_spectrum(g, &spec);
    let mut groups: Vec<EdgeGroup> = Vec::new();
    for gi in 0..input.groups.len() {
        let beta = per_line.iter().find_map(|lo| lo.groups[gi].as_ref().map(|(b, _)| *b));
        let Some(beta) = beta else { continue };
        let mut coeffs = vec![vec![C64::new(0.0, 0.0); g.lines()]; j];
        for (l, lo) in per_line.iter().enumerate() {
            if let Some((b, c)) = &lo.groups[gi] {
                if (b - beta).abs() > 1e-9 {
                    return Err(Error::Precondition("line-dependent output exponent".into()));
                }
                for (k, ck) in c.iter().enumerate() {
                    coeffs[k][l] = *ck;
                }
            }
        }
        let mut beta = beta;
        while coeffs.len() > 1 && coeffs[0].iter().all(|v| v.norm() == 0.0) {
            coeffs.remove(0);
            beta += 1.0;
        }
        merge_group(&mut groups, EdgeGroup { beta, sigma: SigmaMode::Const(sm), coeffs });
    }
    let support = match input.support {
        Support::Whole => Support::Whole,
        _ if mult.preserves_plus() => Support::SupportedUpper,
        _ => Support::RestrictedUpper,
    };
    let mut out = GridField { grid: g.clone(), support, rem, groups, leak: 0.0, smooth_across: true };
    if support == Support::SupportedUpper {
        out.leak = out.lower_mass();
    }
    Ok(out)
}

fn merge_group(groups: &mut Vec<EdgeGroup>, g: EdgeGroup) {
    for h in groups.iter_mut() {
        let shift = g.beta - h.beta;
        if h.sigma == g.sigma && (shift - shift.round()).abs() < 1e-9 && shift.round() >= 0.0 {
            let s = shift.round() as usize;
            let need = g.coeffs.len() + s;
            let nl = g.coeffs[0].len();
            if h.coeffs.len() < need {
                h.coeffs.resize(need, vec![C64::new(0.0, 0.0); nl]);
            }
            for (k, c) in g.coeffs.iter().enumerate() {
                for (a, b) in h.coeffs[k + s].iter_mut().zip(c) {
                    *a += b;
                }
            }
            return;
        }
    }
    groups.push(g);
}
