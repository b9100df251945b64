//! Sum decomposition `q = s0 + f_+ + f_-`, plus-integrals, the boundary
//! symbol `b(xi')` and the Poisson operators `K_0`, `K_0^{mu-1}`.
//!
//! The slowly decaying part of `q - s0` is taken out in closed form as
//! `m = sum_r X_r (sigma + i xi_n)^{-1-r}` (a plus function) before the kernel is
//! sampled, so that the discrete kernel is free of Gibbs ringing at `x_n = 0`.
//! An even `|xi_n|^{-1}` term of `q` gives a kernel with `log|x_n|` at the
//! boundary; it is split as `e (g_+ + g_-)` with
//! `g_+(xi) = (log(sigma + i xi) - log sigma) / (pi i xi)`, the transform of
//! `E_1(sigma x_n) / pi` on `x_n > 0`, and `g_-(xi) = conj g_+(xi)`. Likewise an odd
//! `sgn(xi_n) |xi_n|^{-2}` term is carried by `w_+ = i g_+'` (kernel `x_n E_1(sigma x_n) / pi`)
//! and `conj w_+`. Plus-integrals then return the bounded part of the boundary value.
//!
//! What is left has a kernel that is continuous at `x_n = 0` but not zero there.
//! Its boundary value `J` is moved into `J a(x_n)` on the plus side and `J a(-x_n)` on the
//! minus side, `a(x) = e^{-sigma x} sum_{k<4} (sigma x)^k / k!`, so the sampled halves both
//! start at 0 and the split costs no first-order term in `h`. The pair `a(|x|)` is smooth up to
//! its fifth derivative, so its band-limited samples are accurate.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{
    apply, fft, BoundaryField, EdgeGroup, EngineConfig, Grid, GridField, LineTable, Multiplier, SigmaMode, Support,
};
use crate::series::{pm_split, to_basis, AsymSeries, Side};
use crate::special::gamma;
use crate::symbol::ReducedSymbol;

const MODEL_TERMS: usize = 4;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `g_+(xi)`, see the module notes.
pub fn log_plus(sigma: f64, xi: f64) -> C64 {
    if xi.abs() < 0.1 * sigma {
        return small_z_series(C64::new(0.0, xi / sigma), |k| 1.0 / (k + 1.0)) / (std::f64::consts::PI * sigma);
    }
    (C64::new(sigma, xi).ln() - sigma.ln()) / C64::new(0.0, std::f64::consts::PI * xi)
}

/// Terms in the boundary split pair.
const SPLIT_TERMS: usize = 4;

/// Transform of `e^{-sigma x} sum_{k<4} (sigma x)^k / k!` on `x > 0`.
fn split_pair(sigma: f64, xi: f64) -> C64 {
    let z = C64::new(sigma, xi).inv();
    (0..SPLIT_TERMS).map(|k| z.powi(k as i32 + 1) * sigma.powi(k as i32)).sum()
}

/// `sum_k (-z)^k c(k)` for `|z| <= 0.1`; avoids the cancellation in the closed forms.
fn small_z_series(z: C64, c: impl Fn(f64) -> f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut p = C64::new(1.0, 0.0);
    for k in 0..24 {
        acc += p * c(k as f64);
        p *= -z;
    }
    acc
}

/// Bounded part of `E_1(sigma x) / pi` at `x = 0+`.
pub fn log_plus_at_zero(sigma: f64) -> f64 {
    -(EULER_GAMMA + sigma.ln()) / std::f64::consts::PI
}

/// `w_+(xi) = i g_+'(xi)`.
pub fn log_plus2(sigma: f64, xi: f64) -> C64 {
    let pi = std::f64::consts::PI;
    if xi.abs() < 0.1 * sigma {
        return small_z_series(C64::new(0.0, xi / sigma), |k| (k + 1.0) / (k + 2.0)) / (pi * sigma * sigma);
    }
    let z = C64::new(0.0, xi);
    -(z * C64::new(sigma, xi) * pi).inv() + (C64::new(sigma, xi).ln() - sigma.ln()) / (z * z * pi)
}

/// Coefficients of `(i xi)^{-2-m}` in `w_+` once `log(i xi) / (pi (i xi)^2)` is removed.
fn log_plus2_powers(sigma: f64, j: usize) -> Vec<f64> {
    let c = log_plus_powers(sigma, j);
    (0..j).map(|m| c[m] - (-sigma).powi(m as i32) / std::f64::consts::PI).collect()
}

/// Coefficients of `(i xi)^{-1-m}` in `g_+` once `log(i xi) / (pi i xi)` is removed.
fn log_plus_powers(sigma: f64, j: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    (0..j)
        .map(|m| if m == 0 { -sigma.ln() / pi } else { (-1f64).powi(m as i32 + 1) * sigma.powi(m as i32) / (m as f64 * pi) })
        .collect()
}

#[derive(Clone, Debug)]
pub struct WhLine {
    /// Decay rate of the closed-form model.
    pub sigma: f64,
    /// Coefficients of `(sigma + i xi_n)^{-1-r}` in the model.
    pub model: Vec<C64>,
    /// Coefficient of `g_+` in `f_plus`.
    pub log_coef: C64,
    /// Coefficient of `w_+` in `f_plus`.
    pub log_coef2: C64,
    /// `f_minus` carries `m[0] conj g_+ - m[1] conj w_+`; equal to the plus pair unless the input had plus-only logs.
    pub minus_log: [C64; 2],
    /// Boundary value of the remainder kernel, carried by `split * split_pair(sigma, +-xi_n)` on each side.
    pub split: C64,
    /// FFT order in `xi_n`.
    pub f_plus: Vec<C64>,
    pub f_minus: Vec<C64>,
}

impl WhLine {
    /// Closed-form part of `f_plus`.
    pub fn model_at(&self, xi: f64) -> C64 {
        let z = C64::new(self.sigma, xi);
        let m: C64 = self.plus_coeffs().iter().enumerate().map(|(r, x)| x * z.powi(-1 - r as i32)).sum();
        m + self.log_coef * log_plus(self.sigma, xi) + self.log_coef2 * log_plus2(self.sigma, xi)
    }

    /// Closed-form part of `f_minus`.
    pub fn minus_model_at(&self, xi: f64) -> C64 {
        self.split * split_pair(self.sigma, -xi) + self.minus_log[0] * log_plus(self.sigma, xi).conj()
            - self.minus_log[1] * log_plus2(self.sigma, xi).conj()
    }

    /// Coefficients of `(sigma + i xi_n)^{-1-r}` in `f_plus`.
    pub fn plus_coeffs(&self) -> Vec<C64> {
        let mut c = self.model.clone();
        c.resize(c.len().max(SPLIT_TERMS), C64::new(0.0, 0.0));
        for k in 0..SPLIT_TERMS {
            c[k] += self.split * self.sigma.powi(k as i32);
        }
        c
    }

    /// Same for `conj f_minus`.
    pub fn minus_conj_coeffs(&self) -> Vec<C64> {
        (0..SPLIT_TERMS).map(|k| self.split.conj() * self.sigma.powi(k as i32)).collect()
    }

    /// Log-term coefficients of `f_plus` and of `conj f_minus` for [`PlusHint::Model`].
    pub fn log_terms(&self, plus: bool) -> [C64; 2] {
        if plus {
            [self.log_coef, self.log_coef2]
        } else {
            [self.minus_log[0].conj(), -self.minus_log[1].conj()]
        }
    }

    /// Far-field of `f_plus`, without the `log|xi_n| / xi_n` term.
    pub fn plus_series(&self, j: usize) -> AsymSeries {
        let mut acc = AsymSeries::zero(-1.0, j);
        for (r, x) in self.plus_coeffs().iter().enumerate() {
            if r < j {
                acc.add_shifted(&AsymSeries::xi_power(Side::Plus, -1.0 - r as f64, self.sigma, j - r).scale(*x), r);
            }
        }
        acc.add(&log_series(self.log_terms(true), self.sigma, j));
        acc
    }

    /// Far-field of `conj f_minus`, without the log terms.
    pub fn minus_conj_series(&self, j: usize) -> AsymSeries {
        let mut acc = log_series(self.log_terms(false), self.sigma, j);
        for (k, c) in self.minus_conj_coeffs().into_iter().enumerate() {
            if k < j {
                acc.add_shifted(&AsymSeries::xi_power(Side::Plus, -1.0 - k as f64, self.sigma, j - k).scale(c), k);
            }
        }
        acc
    }
}

/// Power part of `e[0] g_+ + e[1] w_+`.
fn log_series(e: [C64; 2], sigma: f64, j: usize) -> AsymSeries {
    let mut acc = AsymSeries::zero(-1.0, j);
    if e[0].norm() != 0.0 {
        for (m, c) in log_plus_powers(sigma, j).into_iter().enumerate() {
            acc.add_shifted(&AsymSeries::xi_power(Side::Plus, -1.0 - m as f64, 0.0, j - m).scale(e[0] * c), m);
        }
    }
    if e[1].norm() != 0.0 && j > 1 {
        for (m, c) in log_plus2_powers(sigma, j - 1).into_iter().enumerate() {
            acc.add_shifted(&AsymSeries::xi_power(Side::Plus, -2.0 - m as f64, 0.0, j - 1 - m).scale(e[1] * c), m + 1);
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct SymbolDecomposition {
    pub grid: Grid,
    pub s0: f64,
    pub lines: Vec<WhLine>,
    /// `max |q - s0 - f_+ - f_-|`.
    pub residual_recon: f64,
    /// Relative lower-half mass of the inverse transform of `f_+` (and upper of `f_-`).
    pub leak: f64,
    /// `max |xi| |f_+-(xi)| / s0` at the grid ends.
    pub tail: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct WhConfig {
    /// Allowed `|q - s0| / s0` at the largest `|xi_n|`.
    pub tail_tol: f64,
    /// Allowed disagreement between plus-integral routes, relative to `s0`.
    pub route_tol: f64,
}

impl Default for WhConfig {
    fn default() -> Self {
        WhConfig { tail_tol: 0.25, route_tol: 1e-4 }
    }
}

fn idft_centered(planner: &mut FftPlanner<f64>, spec: &[C64], h: f64) -> Vec<C64> {
    let mut v = spec.to_vec();
    fft::inverse_1d(planner, &mut v, h);
    v
}

fn dft_centered(planner: &mut FftPlanner<f64>, vals: &[C64], h: f64) -> Vec<C64> {
    let mut v = vals.to_vec();
    fft::forward_1d(planner, &mut v, h);
    v
}

/// Closed-form model of the far field of `q - s0` on one line: basis coefficients and the two log coefficients.
/// `plus_log` are log-pair coefficients known to sit on the plus side only; `series` holds their power part.
fn far_field_model(series: &AsymSeries, sigma: f64, plus_log: [C64; 2]) -> (Vec<C64>, C64, C64) {
    let tail = AsymSeries { p0: series.p0 - 1.0, plus: series.plus[1..].to_vec(), minus: series.minus[1..].to_vec() };
    let pm = pm_split(&tail);
    let mut d = pm.plus.clone();
    let (mut e, mut c2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    if (tail.p0 + 1.0).abs() < 1e-9 && !d.is_empty() {
        e = pm.unresolved[0];
        // power terms of the log pairs are taken out of the basis part
        for (m, c) in log_plus_powers(sigma, d.len()).into_iter().enumerate() {
            d[m] -= e * c * (1.0 + (-1f64).powi(m as i32 + 1));
        }
        if d.len() > 1 {
            c2 = C64::i() * pm.unresolved[1];
            for (m, c) in log_plus2_powers(sigma, d.len() - 1).into_iter().enumerate() {
                d[m + 1] -= c2 * c * (1.0 - (-1f64).powi(m as i32));
            }
        }
        for (m, c) in log_plus_powers(sigma, d.len()).into_iter().enumerate() {
            d[m] -= plus_log[0] * c;
        }
        if d.len() > 1 {
            for (m, c) in log_plus2_powers(sigma, d.len() - 1).into_iter().enumerate() {
                d[m + 1] -= plus_log[1] * c;
            }
        }
    }
    (to_basis(tail.p0, &d, sigma), e, c2)
}

/// Decomposes a bounded multiplier given by its values (`[l * N + k]`) and line series.
/// `plus_log` (one pair per line, or empty) lists `g_+`, `w_+` coefficients the input carries on the plus side
/// only, as in the output of [`SymbolDecomposition::plus_symbol`].
pub fn wh_decompose_table(
    grid: &Grid,
    values: &[C64],
    series: &[AsymSeries],
    plus_log: &[[C64; 2]],
    s0: f64,
    cfg: &WhConfig,
) -> Result<SymbolDecomposition> {
    let n = grid.n;
    let h = grid.hn();
    let j0 = grid.j0();
    let mut planner = FftPlanner::new();
    let mut lines = Vec::with_capacity(grid.lines());
    let (mut recon, mut leak_num, mut leak_den, mut tail) = (0.0f64, 0.0, 0.0, 0.0f64);
    for l in 0..grid.lines() {
        let q = &values[l * n..(l + 1) * n];
        let knyq = n / 2;
        let worst = (q[knyq] - s0).norm().max((q[knyq - 1] - s0).norm()).max((q[knyq + 1] - s0).norm());
        // q depends on xi_n / <xi'>, so only lines well inside the frequency box can be held to it
        let xi_max = grid.xi_n(knyq - 1);
        if grid.bessel(l) <= (xi_max / 4.0).max(1.0) && worst > cfg.tail_tol * s0 {
            return Err(Error::Resolution { what: "insufficient frequency extent: |q - s0| at the grid end", value: worst / s0, tol: cfg.tail_tol });
        }
        let sigma = grid.bessel(l);
        let extra = plus_log.get(l).copied().unwrap_or_default();
        let (model, e, c2) = far_field_model(&series[l], sigma, extra);
        let mut line = WhLine {
            sigma,
            model,
            log_coef: e + extra[0],
            log_coef2: c2 + extra[1],
            minus_log: [e, c2],
            split: C64::new(0.0, 0.0),
            f_plus: vec![],
            f_minus: vec![],
        };
        let g: Vec<C64> =
            (0..n).map(|k| q[k] - s0 - line.model_at(grid.xi_n(k)) - line.minus_model_at(grid.xi_n(k))).collect();
        let mut kr = idft_centered(&mut planner, &g, h);
        let pair: Vec<C64> = (0..n).map(|k| split_pair(sigma, grid.xi_n(k)) + split_pair(sigma, -grid.xi_n(k))).collect();
        let pk = idft_centered(&mut planner, &pair, h);
        line.split = kr[j0] / pk[j0];
        for (a, b) in kr.iter_mut().zip(&pk) {
            *a -= line.split * b;
        }
        let m: Vec<C64> = (0..n).map(|k| line.model_at(grid.xi_n(k))).collect();
        let mm: Vec<C64> = (0..n).map(|k| line.minus_model_at(grid.xi_n(k))).collect();
        let kp: Vec<C64> = (0..n).map(|j| if j >= j0 { kr[j] } else { C64::new(0.0, 0.0) }).collect();
        let km: Vec<C64> = (0..n).map(|j| if j < j0 { kr[j] } else { C64::new(0.0, 0.0) }).collect();
        let dp = dft_centered(&mut planner, &kp, h);
        let dm = dft_centered(&mut planner, &km, h);
        let f_plus: Vec<C64> = dp.iter().zip(&m).map(|(a, b)| a + b).collect();
        let f_minus: Vec<C64> = dm.iter().zip(&mm).map(|(a, b)| a + b).collect();
        for k in 0..n {
            recon = recon.max((q[k] - s0 - f_plus[k] - f_minus[k]).norm());
        }
        // the model part is supported in x_n >= 0 exactly
        let back_p = idft_centered(&mut planner, &dp, h);
        let back_m = idft_centered(&mut planner, &dm, h);
        for j in 0..n {
            leak_den += back_p[j].norm_sqr() + back_m[j].norm_sqr();
            if j < j0 {
                leak_num += back_p[j].norm_sqr();
            } else {
                leak_num += back_m[j].norm_sqr();
            }
        }
        for k in [knyq - 1, knyq + 1] {
            let xi = grid.xi_n(k).abs();
            tail = tail.max(xi * f_plus[k].norm() / s0).max(xi * f_minus[k].norm() / s0);
        }
        lines.push(WhLine { f_plus, f_minus, ..line });
    }
    let leak = if leak_den > 0.0 { (leak_num / leak_den).sqrt() } else { 0.0 };
    Ok(SymbolDecomposition { grid: grid.clone(), s0, lines, residual_recon: recon, leak, tail })
}

/// `q(xi', .) = s0 + f_+ + f_-` on every tangential line.
pub fn wh_decompose(q: &ReducedSymbol, grid: &Grid, cfg: &WhConfig) -> Result<SymbolDecomposition> {
    let n = grid.n;
    let mut values = vec![C64::new(0.0, 0.0); grid.len()];
    let mut series = Vec::with_capacity(grid.lines());
    for l in 0..grid.lines() {
        let xp = grid.xi_p(l);
        for k in 0..n {
            values[l * n + k] = q.at(xp, grid.xi_n(k));
        }
        series.push(q.line_series(xp, MODEL_TERMS + 1));
    }
    wh_decompose_table(grid, &values, &series, &[], q.td.s0, cfg)
}

impl SymbolDecomposition {
    /// `s0 + f_+` as a table with its series and plus-side log pairs, for re-decomposition.
    pub fn plus_symbol(&self) -> (Vec<C64>, Vec<AsymSeries>, Vec<[C64; 2]>) {
        let mut v = Vec::with_capacity(self.grid.len());
        let mut s = Vec::new();
        let logs = self.lines.iter().map(|l| l.log_terms(true)).collect();
        for line in &self.lines {
            v.extend(line.f_plus.iter().map(|x| x + self.s0));
            let mut ser = AsymSeries::constant(C64::new(self.s0, 0.0), MODEL_TERMS + 1);
            let ps = line.plus_series(MODEL_TERMS);
            ser.add_shifted(&ps, 1);
            s.push(ser);
        }
        (v, s, logs)
    }

    /// `f_+` or `conj f_-` as a multiplier table.
    pub fn table(&self, plus: bool) -> LineTable {
        let mut values = Vec::with_capacity(self.grid.len());
        let mut series = Vec::new();
        for line in &self.lines {
            if plus {
                values.extend_from_slice(&line.f_plus);
                series.push(line.plus_series(MODEL_TERMS));
            } else {
                values.extend(line.f_minus.iter().map(|v| v.conj()));
                series.push(line.minus_conj_series(MODEL_TERMS));
            }
        }
        LineTable { values, series, plus: true }
    }
}

/// How the array handed to [`plus_integral`] was produced.
#[derive(Clone, Debug)]
pub enum PlusHint {
    /// Known closed-form far field `sum_r coeffs[r] (sigma + i xi)^{-1-r} + log[0] g_+ + log[1] w_+`;
    /// `zero_in` tells whether the remaining sequence includes its `x_n = 0` sample.
    Model { sigma: f64, coeffs: Vec<C64>, log: [C64; 2], zero_in: bool },
    /// Samples of a continuous function; a two-term model is fitted to the tail.
    FitContinuous,
    /// Transform of a grid sequence; `zero_in` tells whether the `x_n = 0` sample belongs to it.
    Discrete { zero_in: bool },
}

#[derive(Clone, Copy, Debug)]
pub struct PlusIntegral {
    /// Route (i): frequency quadrature with tail correction.
    pub quadrature: C64,
    /// Route (ii): inverse transform near `0+` with linear extrapolation.
    pub extrapolated: C64,
}

impl PlusIntegral {
    pub fn value(&self) -> C64 {
        self.extrapolated
    }

    pub fn disagreement(&self) -> f64 {
        (self.quadrature - self.extrapolated).norm()
    }
}

fn fit_model(grid: &Grid, f: &[C64]) -> Vec<C64> {
    // least squares on the band xi_max/16 <= |xi| <= xi_max/2 with basis (1 + i xi)^{-1}, (1 + i xi)^{-2}
    let n = grid.n;
    let xmax = grid.xi_n(n / 2 - 1);
    let (mut a11, mut a12, mut a22) = (0.0, C64::new(0.0, 0.0), 0.0);
    let (mut b1, mut b2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for k in 0..n {
        let xi = grid.xi_n(k);
        if xi.abs() < xmax / 16.0 || xi.abs() > xmax / 2.0 {
            continue;
        }
        let p1 = C64::new(1.0, xi).inv();
        let p2 = p1 * p1;
        a11 += p1.norm_sqr();
        a12 += p1.conj() * p2;
        a22 += p2.norm_sqr();
        b1 += p1.conj() * f[k];
        b2 += p2.conj() * f[k];
    }
    let det = a11 * a22 - a12.norm_sqr();
    let x1 = (b1 * a22 - a12 * b2) / det;
    let x2 = (b2 * a11 - a12.conj() * b1) / det;
    vec![x1, x2]
}

/// `(1/2 pi) int^+ f dxi_n = lim_{x_n -> 0+} F^{-1} f`.
pub fn plus_integral(grid: &Grid, f: &[C64], hint: &PlusHint) -> PlusIntegral {
    let n = grid.n;
    let h = grid.hn();
    let j0 = grid.j0();
    let zero = C64::new(0.0, 0.0);
    let (sigma, coeffs, log, zero_in) = match hint {
        PlusHint::Model { sigma, coeffs, log, zero_in } => (*sigma, coeffs.clone(), *log, *zero_in),
        PlusHint::FitContinuous => (1.0, fit_model(grid, f), [zero; 2], true),
        PlusHint::Discrete { zero_in } => (1.0, vec![], [zero; 2], *zero_in),
    };
    let model = |xi: f64| -> C64 {
        let z = C64::new(sigma, xi);
        let m: C64 = coeffs.iter().enumerate().map(|(r, x)| x * z.powi(-1 - r as i32)).sum();
        m + log[0] * log_plus(sigma, xi) + log[1] * log_plus2(sigma, xi)
    };
    let r: Vec<C64> = (0..n).map(|k| f[k] - model(grid.xi_n(k))).collect();
    // the w_+ kernel vanishes at the boundary
    let x0 = coeffs.first().copied().unwrap_or_default() + log[0] * log_plus_at_zero(sigma);
    let q = |eps: f64| -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (k, rk) in r.iter().enumerate() {
            let xi = grid.xi_n(k);
            if k == n / 2 {
                s += rk * (eps * xi).cos();
            } else {
                s += rk * C64::from_polar(1.0, eps * xi);
            }
        }
        s / (n as f64 * h)
    };
    let quad = if zero_in && !matches!(hint, PlusHint::FitContinuous) {
        // the residual is the transform of a grid sequence, so the band sum is already complete
        q(0.0)
    } else if zero_in {
        // even part ~ d / xi^2 on the last decade, integrated analytically beyond the grid
        let xmax = grid.xi_n(n / 2 - 1);
        let (mut num, mut den) = (C64::new(0.0, 0.0), 0.0);
        for k in 1..n / 2 {
            let xi = grid.xi_n(k);
            if xi < xmax / 10.0 {
                continue;
            }
            let even = (r[k] + r[n - k]) * 0.5;
            let b = 1.0 / (xi * xi);
            num += even * b;
            den += b * b;
        }
        let d = if den > 0.0 { num / den } else { C64::new(0.0, 0.0) };
        q(0.0) + d / (std::f64::consts::PI * xmax)
    } else {
        q(h) * 2.0 - q(2.0 * h)
    };
    let seq = idft_centered(&mut FftPlanner::new(), &r, h);
    let ext = seq[j0 + 1] * 2.0 - seq[j0 + 2];
    PlusIntegral { quadrature: quad + x0, extrapolated: ext + x0 }
}

#[derive(Clone, Debug)]
pub struct BoundarySymbol {
    /// Per tangential line.
    pub b_vals: Vec<C64>,
    pub frak_b: Vec<C64>,
    pub frak_b_prime: Vec<C64>,
    /// Jump of the inverse transform of `q - s0` at `x_n = 0`, evaluated directly.
    pub b_jump: Vec<C64>,
    /// `b` with `frak_b` taken from the quadrature route.
    pub b_quad: Vec<C64>,
    /// Plus-integral route disagreement per line, relative to `s0`.
    pub route_per_line: Vec<f64>,
    /// Whether the line's kernel scale `1/<xi'>` spans at least [`RESOLVED_SAMPLES`] grid steps.
    pub resolved: Vec<bool>,
    /// Largest route disagreement over resolved lines.
    pub route_residual: f64,
}

/// Grid steps per kernel decay length below which route agreement is not expected.
pub const RESOLVED_SAMPLES: f64 = 64.0;

/// `b = frak_b - conj(frak_b')` per `xi'`, cross-checked against the kernel jump.
pub fn boundary_jump_symbol(dec: &SymbolDecomposition) -> Result<BoundarySymbol> {
    let g = &dec.grid;
    let n = g.n;
    let h = g.hn();
    let j0 = g.j0();
    let mut planner = FftPlanner::new();
    let mut out = BoundarySymbol {
        b_vals: vec![],
        frak_b: vec![],
        frak_b_prime: vec![],
        b_jump: vec![],
        b_quad: vec![],
        route_per_line: vec![],
        resolved: vec![],
        route_residual: 0.0,
    };
    for line in &dec.lines {
        let hint = PlusHint::Model { sigma: line.sigma, coeffs: line.plus_coeffs(), log: line.log_terms(true), zero_in: true };
        let fb = plus_integral(g, &line.f_plus, &hint);
        let cm: Vec<C64> = line.f_minus.iter().map(|v| v.conj()).collect();
        let hint =
            PlusHint::Model { sigma: line.sigma, coeffs: line.minus_conj_coeffs(), log: line.log_terms(false), zero_in: false };
        let fbp = plus_integral(g, &cm, &hint);
        let route = (fb.disagreement() / dec.s0).max(fbp.disagreement() / dec.s0);
        let resolved = line.sigma * h * RESOLVED_SAMPLES <= 1.0;
        if resolved {
            out.route_residual = out.route_residual.max(route);
        }
        out.route_per_line.push(route);
        out.resolved.push(resolved);
        out.frak_b.push(fb.value());
        out.frak_b_prime.push(fbp.value());
        out.b_vals.push(fb.value() - fbp.value().conj());
        out.b_quad.push(fb.quadrature - fbp.value().conj());
        let g_r: Vec<C64> = (0..n)
            .map(|k| line.f_plus[k] + line.f_minus[k] - line.model_at(g.xi_n(k)) - line.minus_model_at(g.xi_n(k)))
            .collect();
        let kr = idft_centered(&mut planner, &g_r, h);
        let right = kr[j0] * 2.0 - kr[j0 + 1];
        let right = if j0 + 2 < n { kr[j0 + 1] * 2.0 - kr[j0 + 2] } else { right };
        let left = kr[j0 - 1] * 2.0 - kr[j0 - 2];
        out.b_jump.push(line.model.first().copied().unwrap_or_default() + right - left);
    }
    Ok(out)
}

/// `e^+ K_0 p`: per line `p_hat(xi') e^{-<xi'> x_n}` on `x_n >= 0`.
pub fn poisson_k0(p: &BoundaryField) -> GridField {
    let g = &p.grid;
    let grp = EdgeGroup { beta: 0.0, sigma: SigmaMode::Bessel, coeffs: vec![p.to_lines()] };
    GridField {
        grid: g.clone(),
        support: Support::SupportedUpper,
        rem: vec![C64::new(0.0, 0.0); g.len()],
        groups: vec![grp],
        leak: 0.0,
        smooth_across: true,
    }
}

#[derive(Clone, Debug)]
pub struct PoissonMu {
    /// `x_n^{mu-1} / Gamma(mu) K_0 p`.
    pub field: GridField,
    /// The route through `Xi_+^{1-mu} e^+ K_0 p`.
    pub via_xi: GridField,
    /// Max relative difference on `x_n >= 4h`.
    pub route_residual: f64,
}

pub fn poisson_k0_mu(p: &BoundaryField, mu: f64, cfg: &EngineConfig) -> Result<PoissonMu> {
    if mu <= 0.0 {
        return Err(Error::Precondition("K_0^{mu-1} needs mu > 0".into()));
    }
    let g = &p.grid;
    let k0 = poisson_k0(p);
    let via_xi = apply(&Multiplier::xi_plus(1.0 - mu), &k0, cfg)?;
    let lines: Vec<C64> = p.to_lines().iter().map(|v| v / gamma(mu)).collect();
    let grp = EdgeGroup { beta: mu - 1.0, sigma: SigmaMode::Bessel, coeffs: vec![lines] };
    let field = GridField { groups: vec![grp], ..k0 };
    let a = field.values();
    let b = via_xi.values();
    let x_min = 4.0 * g.hn();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in 0..g.lines() {
        for j in 0..g.n {
            if g.xn(j) >= x_min - 1e-12 {
                let k = i * g.n + j;
                num = num.max((a[k] - b[k]).norm());
                den = den.max(a[k].norm());
            }
        }
    }
    let route_residual = if den > 0.0 { num / den } else { 0.0 };
    Ok(PoissonMu { field, via_xi, route_residual })
}
