//! Grids, sampled fields on the halfspace and the structured operator engine.
//!
//! A [`GridField`] is a sum of analytic edge groups
//! `x_n^beta e^{-sigma x_n} sum_k c_k(x') x_n^k` (kept on `x_n > 0`) and a
//! sampled remainder. Operators act on the groups through their exact transforms
//! and on the remainder through the FFT, after the far-field of the image has
//! been subtracted in closed form.

pub mod engine;
pub mod fft;
pub mod ops;
pub mod quad;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::japanese;

pub use engine::{apply, prepare_input, EngineConfig, Factor, LineTable, Multiplier};
pub use ops::*;
pub use quad::{halfspace_inner, prod_trap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    /// Points per axis (same on every axis).
    pub n: usize,
    /// Half-width per axis; the last axis is normal.
    pub halfwidth: Vec<f64>,
}

impl Grid {
    pub fn new(dim: usize, n: usize, halfwidth: f64) -> Result<Self> {
        Self::with_widths(dim, n, vec![halfwidth; dim])
    }

    pub fn with_widths(dim: usize, n: usize, halfwidth: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::Param(format!("dimension {dim} not supported")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::Param(format!("grid size {n} must be even and >= 8")));
        }
        if halfwidth.len() != dim || halfwidth.iter().any(|w| *w <= 0.0) {
            return Err(Error::Param("bad box half-widths".into()));
        }
        Ok(Grid { dim, n, halfwidth })
    }

    pub fn h(&self, axis: usize) -> f64 {
        2.0 * self.halfwidth[axis] / self.n as f64
    }

    pub fn hn(&self) -> f64 {
        self.h(self.dim - 1)
    }

    pub fn xn_halfwidth(&self) -> f64 {
        self.halfwidth[self.dim - 1]
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of tangential lines (1 in one dimension).
    pub fn lines(&self) -> usize {
        if self.dim == 1 {
            1
        } else {
            self.n
        }
    }

    /// Index of `x_n = 0`.
    pub fn j0(&self) -> usize {
        self.n / 2
    }

    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.h(axis)
    }

    pub fn xn(&self, j: usize) -> f64 {
        self.coord(self.dim - 1, j)
    }

    pub fn xp(&self, i: usize) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            self.coord(0, i)
        }
    }

    /// Frequency of FFT index `k` along `axis`.
    pub fn freq(&self, axis: usize, k: usize) -> f64 {
        let n = self.n as i64;
        let kk = if (k as i64) < n / 2 { k as i64 } else { k as i64 - n };
        2.0 * PI * kk as f64 / (n as f64 * self.h(axis))
    }

    pub fn xi_n(&self, k: usize) -> f64 {
        self.freq(self.dim - 1, k)
    }

    /// Tangential frequency of line `l`.
    pub fn xi_p(&self, l: usize) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            self.freq(0, l)
        }
    }

    /// `<xi'>` on line `l`.
    pub fn bessel(&self, l: usize) -> f64 {
        japanese(self.xi_p(l))
    }

    /// Parseval weight turning line-space sums into tangential integrals.
    pub fn line_weight(&self) -> f64 {
        if self.dim == 1 {
            1.0
        } else {
            1.0 / (self.n as f64 * self.h(0))
        }
    }

    pub fn check_same(&self, o: &Grid) -> Result<()> {
        if self != o {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self, o)));
        }
        Ok(())
    }
}

/// Values on the boundary grid `x_n = 0`.
#[derive(Clone, Debug)]
pub struct BoundaryField {
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl BoundaryField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, o: &BoundaryField) -> BoundaryField {
        BoundaryField { grid: self.grid.clone(), values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect() }
    }

    pub fn to_lines(&self) -> Vec<C64> {
        fft::boundary_forward(&self.grid, &self.values)
    }

    pub fn from_lines(grid: &Grid, lines: &[C64]) -> Self {
        BoundaryField { grid: grid.clone(), values: fft::boundary_inverse(grid, lines) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    Whole,
    /// Meaningful on `x_n >= 0` only.
    RestrictedUpper,
    /// Vanishes on `x_n < 0` up to the recorded leak.
    SupportedUpper,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaMode {
    Const(f64),
    /// `sigma = <xi'>` line by line.
    Bessel,
}

/// `x_n^beta e^{-sigma x_n} sum_k c_k x_n^k`, coefficients in line space `[k][line]`.
#[derive(Clone, Debug)]
pub struct EdgeGroup {
    pub beta: f64,
    pub sigma: SigmaMode,
    pub coeffs: Vec<Vec<C64>>,
}

impl EdgeGroup {
    pub fn sigma_at(&self, grid: &Grid, l: usize) -> f64 {
        match self.sigma {
            SigmaMode::Const(s) => s,
            SigmaMode::Bessel => grid.bessel(l),
        }
    }

    pub fn line_coeffs(&self, l: usize) -> Vec<C64> {
        self.coeffs.iter().map(|c| c[l]).collect()
    }

    /// Smooth factor `e^{-sigma x} sum_k c_k x^k` on line `l`.
    pub fn smooth_at(&self, grid: &Grid, l: usize, x: f64) -> C64 {
        let s = self.sigma_at(grid, l);
        let p = self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c[l]);
        p * (-s * x).exp()
    }

    pub fn value_at(&self, grid: &Grid, l: usize, x: f64) -> C64 {
        if x > 0.0 {
            return self.smooth_at(grid, l, x) * x.powf(self.beta);
        }
        if x < 0.0 {
            return C64::new(0.0, 0.0);
        }
        // boundary sample: only x^0 terms survive
        let mut v = C64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if (self.beta + k as f64).abs() < 1e-12 {
                v += c[l];
            }
        }
        v
    }

    /// Whether some nonzero term is singular at `x_n = 0`.
    pub fn singular(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .any(|(k, c)| self.beta + (k as f64) < -1e-12 && c.iter().any(|v| v.norm() > 0.0))
    }

    pub fn scale(&mut self, s: C64) {
        for c in self.coeffs.iter_mut() {
            for v in c.iter_mut() {
                *v *= s;
            }
        }
    }

    /// Analytic normal derivative.
    pub fn derivative(&self, grid: &Grid) -> EdgeGroup {
        let k = self.coeffs.len();
        let nl = grid.lines();
        let mut d = vec![vec![C64::new(0.0, 0.0); nl]; k + 1];
        for l in 0..nl {
            let s = self.sigma_at(grid, l);
            for (j, dj) in d.iter_mut().enumerate() {
                let mut v = C64::new(0.0, 0.0);
                if j < k {
                    v += self.coeffs[j][l] * (self.beta + j as f64);
                }
                if j >= 1 {
                    v -= self.coeffs[j - 1][l] * s;
                }
                dj[l] = v;
            }
        }
        let mut beta = self.beta - 1.0;
        // a vanishing leading term would leave a spurious pole
        while d.len() > 1 && d[0].iter().all(|v| v.norm() == 0.0) {
            d.remove(0);
            beta += 1.0;
        }
        EdgeGroup { beta, sigma: self.sigma, coeffs: d }
    }
}

/// A sampled field with optional analytic edge structure.
#[derive(Clone, Debug)]
pub struct GridField {
    pub grid: Grid,
    pub support: Support,
    /// Sampled remainder, physical layout `values[i' * N + i_n]`.
    pub rem: Vec<C64>,
    pub groups: Vec<EdgeGroup>,
    /// Relative `l2` mass on `x_n < 0` for supported fields.
    pub leak: f64,
    /// Whether `rem` is smooth across `x_n = 0`.
    pub smooth_across: bool,
}

impl GridField {
    pub fn from_values(grid: &Grid, values: Vec<C64>, support: Support) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for a grid of {}", values.len(), grid.len())));
        }
        Ok(GridField {
            grid: grid.clone(),
            support,
            rem: values,
            groups: vec![],
            leak: 0.0,
            smooth_across: support == Support::Whole,
        })
    }

    pub fn from_fn(grid: &Grid, support: Support, f: impl Fn(f64, f64) -> C64) -> Self {
        let n = grid.n;
        let mut v = vec![C64::new(0.0, 0.0); grid.len()];
        for i in 0..grid.lines() {
            for j in 0..n {
                v[i * n + j] = f(grid.xp(i), grid.xn(j));
            }
        }
        GridField::from_values(grid, v, support).expect("sized by construction")
    }

    pub fn is_structured(&self) -> bool {
        !self.groups.is_empty()
    }

    /// Edge groups realized on the grid (line space).
    pub fn groups_lines(&self) -> Vec<C64> {
        let g = &self.grid;
        let n = g.n;
        let mut out = vec![C64::new(0.0, 0.0); g.len()];
        for grp in &self.groups {
            for l in 0..g.lines() {
                for j in g.j0()..n {
                    out[l * n + j] += grp.value_at(g, l, g.xn(j));
                }
            }
        }
        out
    }

    /// Point samples of the whole field.
    pub fn values(&self) -> Vec<C64> {
        let mut v = self.rem.clone();
        if !self.groups.is_empty() {
            let gv = fft::from_lines(&self.grid, &self.groups_lines());
            for (a, b) in v.iter_mut().zip(gv) {
                *a += b;
            }
        }
        v
    }

    /// Values in line space, i.e. transformed in `x'`.
    pub fn lines(&self) -> Vec<C64> {
        let mut v = fft::to_lines(&self.grid, &self.rem);
        if !self.groups.is_empty() {
            for (a, b) in v.iter_mut().zip(self.groups_lines()) {
                *a += b;
            }
        }
        v
    }

    /// Trace at `x_n = 0` from the representation.
    pub fn boundary(&self) -> Result<BoundaryField> {
        let g = &self.grid;
        if self.groups.iter().any(|gr| gr.singular()) {
            return Err(Error::Precondition("field is singular at x_n = 0".into()));
        }
        let mut lines = vec![C64::new(0.0, 0.0); g.lines()];
        for gr in &self.groups {
            for (l, v) in lines.iter_mut().enumerate() {
                *v += gr.value_at(g, l, 0.0);
            }
        }
        let mut b = BoundaryField::from_lines(g, &lines);
        let j0 = g.j0();
        for (i, v) in b.values.iter_mut().enumerate() {
            *v += self.rem[i * g.n + j0];
        }
        Ok(b)
    }

    /// Boundary value with the sampled part extrapolated from the first three
    /// interior lines. Regular edge groups contribute their exact value;
    /// singular ones are left in the extrapolated samples.
    pub fn boundary_extrapolated(&self) -> BoundaryField {
        let g = &self.grid;
        let singular = self.groups.iter().any(|gr| gr.singular());
        let v = if singular { self.values() } else { self.rem.clone() };
        let j0 = g.j0();
        let vals = (0..g.lines())
            .map(|i| {
                let r = i * g.n + j0;
                v[r + 1] * 3.0 - v[r + 2] * 3.0 + v[r + 3]
            })
            .collect();
        let mut b = BoundaryField { grid: g.clone(), values: vals };
        if !singular && !self.groups.is_empty() {
            let mut lines = vec![C64::new(0.0, 0.0); g.lines()];
            for gr in &self.groups {
                for (l, v) in lines.iter_mut().enumerate() {
                    *v += gr.value_at(g, l, 0.0);
                }
            }
            for (a, e) in b.values.iter_mut().zip(BoundaryField::from_lines(g, &lines).values) {
                *a += e;
            }
        }
        b
    }

    pub fn scale(&mut self, s: C64) {
        for v in self.rem.iter_mut() {
            *v *= s;
        }
        for g in self.groups.iter_mut() {
            g.scale(s);
        }
    }

    /// Sum of two fields on the same grid.
    pub fn add(&self, o: &GridField) -> Result<GridField> {
        self.grid.check_same(&o.grid)?;
        let mut out = self.clone();
        for (a, b) in out.rem.iter_mut().zip(&o.rem) {
            *a += b;
        }
        out.groups.extend(o.groups.iter().cloned());
        out.support = if self.support == o.support { self.support } else { Support::RestrictedUpper };
        out.smooth_across = self.smooth_across && o.smooth_across;
        out.leak = self.leak.max(o.leak);
        Ok(out)
    }

    /// Max modulus on `x_n >= x_min`.
    pub fn max_abs_upper(&self, x_min: f64) -> f64 {
        let g = &self.grid;
        let v = self.values();
        let mut m: f64 = 0.0;
        for i in 0..g.lines() {
            for j in 0..g.n {
                if g.xn(j) >= x_min - 1e-12 {
                    m = m.max(v[i * g.n + j].norm());
                }
            }
        }
        m
    }

    /// Relative `l2` mass of the samples on `x_n < 0`.
    pub fn lower_mass(&self) -> f64 {
        let g = &self.grid;
        let v = self.values();
        let (mut lo, mut all) = (0.0, 0.0);
        for i in 0..g.lines() {
            for j in 0..g.n {
                let a = v[i * g.n + j].norm_sqr();
                all += a;
                if j < g.j0() {
                    lo += a;
                }
            }
        }
        if all == 0.0 {
            0.0
        } else {
            (lo / all).sqrt()
        }
    }
}
