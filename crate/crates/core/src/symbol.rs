//! Homogeneous symbols, their transmission data and regularizations.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{AsymSeries, Side};
use crate::special::binom;

/// Serializable description of a symbol.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SymbolSpec {
    pub preset: String,
    pub a: f64,
    /// Drift vector, `[c]` for odd_mix_1d, `[delta, s0]` for order_reducing.
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub even: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub odd: Vec<f64>,
}

impl SymbolSpec {
    pub fn new(preset: &str, a: f64, params: Vec<f64>) -> Self {
        SymbolSpec { preset: preset.into(), a, params, even: vec![], odd: vec![] }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    FracLaplacian,
    Drift(Vec<f64>),
    OddMix(f64),
    Custom(Custom),
    /// `s0 (<xi'> - i xi_n)^{mu*} (<xi'> + i xi_n)^{mu}`, not homogeneous but with
    /// homogeneous principal part.
    OrderReducing { delta: f64, s0: f64 },
}

#[derive(Clone, Debug)]
enum Custom {
    Line { a: f64, b: f64 },
    Plane { even: PeriodicSpline, odd: PeriodicSpline },
}

/// A symbol `L = A + iB` homogeneous of degree `2a` with `A` even and `B` odd.
#[derive(Clone, Debug)]
pub struct HomogeneousSymbol {
    dim: usize,
    a: f64,
    kind: Kind,
    conj: bool,
}

impl HomogeneousSymbol {
    pub fn frac_laplacian(dim: usize, a: f64) -> Result<Self> {
        Self::build(dim, a, Kind::FracLaplacian)
    }

    /// `|xi|^{2a} + i (b . xi) |xi|^{2a-1}`.
    pub fn frac_laplacian_drift(dim: usize, a: f64, b: &[f64]) -> Result<Self> {
        if b.len() != dim {
            return Err(Error::Param(format!("drift needs {dim} components, got {}", b.len())));
        }
        Self::build(dim, a, Kind::Drift(b.to_vec()))
    }

    /// `|xi|^{2a} (1 + i c sgn xi)` on the line.
    pub fn odd_mix_1d(a: f64, c: f64) -> Result<Self> {
        Self::build(1, a, Kind::OddMix(c))
    }

    /// Tabulated sphere values. In one dimension `even = [A(1)]`, `odd = [B(1)]`;
    /// in two, samples at angles `k pi / m`, `k < m`, measured from the `xi'` axis.
    pub fn custom(dim: usize, a: f64, even: &[f64], odd: &[f64]) -> Result<Self> {
        let c = match dim {
            1 => {
                if even.len() != 1 || odd.len() != 1 {
                    return Err(Error::Param("1-d custom tables need one even and one odd value".into()));
                }
                Custom::Line { a: even[0], b: odd[0] }
            }
            2 => {
                let m = even.len();
                if m < 4 || odd.len() != m {
                    return Err(Error::Param("2-d custom tables need matching lengths >= 4".into()));
                }
                let mut ye = even.to_vec();
                ye.extend_from_slice(even);
                let mut yo = odd.to_vec();
                yo.extend(odd.iter().map(|v| -v));
                Custom::Plane { even: PeriodicSpline::new(ye), odd: PeriodicSpline::new(yo) }
            }
            _ => return Err(Error::Dimension { preset: "custom", dim }),
        };
        Self::build(dim, a, Kind::Custom(c))
    }

    pub fn order_reducing(dim: usize, a: f64, delta: f64, s0: f64) -> Result<Self> {
        if delta.abs() >= 0.5 || s0 <= 0.0 {
            return Err(Error::Param("order_reducing needs |delta| < 1/2 and s0 > 0".into()));
        }
        Self::build(dim, a, Kind::OrderReducing { delta, s0 })
    }

    pub fn from_spec(spec: &SymbolSpec, dim: usize) -> Result<Self> {
        let p = &spec.params;
        match spec.preset.as_str() {
            "frac_laplacian" => Self::frac_laplacian(dim, spec.a),
            "frac_laplacian_drift" => Self::frac_laplacian_drift(dim, spec.a, p),
            "odd_mix_1d" => {
                if dim != 1 {
                    return Err(Error::Dimension { preset: "odd_mix_1d", dim });
                }
                Self::odd_mix_1d(spec.a, *p.first().ok_or_else(|| Error::Param("odd_mix_1d needs c".into()))?)
            }
            "custom" => Self::custom(dim, spec.a, &spec.even, &spec.odd),
            "order_reducing" => {
                if p.len() != 2 {
                    return Err(Error::Param("order_reducing needs [delta, s0]".into()));
                }
                Self::order_reducing(dim, spec.a, p[0], p[1])
            }
            other => Err(Error::UnknownPreset(other.into())),
        }
    }

    fn build(dim: usize, a: f64, kind: Kind) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Order(2.0 * a));
        }
        if dim == 0 || dim > 2 {
            return Err(Error::Param(format!("dimension {dim} not supported (1 or 2)")));
        }
        let s = HomogeneousSymbol { dim, a, kind, conj: false };
        let m = if dim == 1 { 2 } else { 720 };
        let mut worst = f64::INFINITY;
        for k in 0..m {
            let th = 2.0 * PI * k as f64 / m as f64;
            let (xp, xn) = if dim == 1 { (0.0, th.cos().signum()) } else { (th.cos(), th.sin()) };
            worst = worst.min(s.principal(xp, xn).norm());
        }
        if worst < 1e-10 {
            return Err(Error::NotElliptic { value: worst });
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn order(&self) -> f64 {
        2.0 * self.a
    }

    pub fn is_conjugated(&self) -> bool {
        self.conj
    }

    pub fn preset_id(&self) -> &'static str {
        match self.kind {
            Kind::FracLaplacian => "frac_laplacian",
            Kind::Drift(_) => "frac_laplacian_drift",
            Kind::OddMix(_) => "odd_mix_1d",
            Kind::Custom(_) => "custom",
            Kind::OrderReducing { .. } => "order_reducing",
        }
    }

    /// Symbol of the formal adjoint.
    pub fn adjoint(&self) -> Self {
        let mut s = self.clone();
        s.conj = !s.conj;
        s
    }

    /// Whether `q` reduces to the constant `s0`.
    pub fn is_order_reducing(&self) -> bool {
        matches!(self.kind, Kind::OrderReducing { .. })
    }

    /// Point value; errors at the origin.
    pub fn eval(&self, xi: &[f64]) -> Result<C64> {
        if xi.len() != self.dim {
            return Err(Error::Param(format!("expected {} components", self.dim)));
        }
        let (xp, xn) = split(xi);
        if xp == 0.0 && xn == 0.0 {
            return Err(Error::Origin);
        }
        Ok(self.at(xp, xn))
    }

    /// Value at `(xi', xi_n)`, continuous extension (0) at the origin.
    pub fn at(&self, xp: f64, xn: f64) -> C64 {
        let v = self.raw(xp, xn);
        if self.conj {
            v.conj()
        } else {
            v
        }
    }

    fn raw(&self, xp: f64, xn: f64) -> C64 {
        let r = xp.hypot(xn);
        if r == 0.0 && !matches!(self.kind, Kind::OrderReducing { .. }) {
            return C64::new(0.0, 0.0);
        }
        let ra = r.powf(2.0 * self.a);
        match &self.kind {
            Kind::FracLaplacian => C64::new(ra, 0.0),
            Kind::Drift(b) => {
                let bx = if self.dim == 1 { b[0] * xn } else { b[0] * xp + b[1] * xn };
                C64::new(ra, bx * r.powf(2.0 * self.a - 1.0))
            }
            Kind::OddMix(c) => C64::new(ra, ra * c * xn.signum()),
            Kind::Custom(Custom::Line { a, b }) => C64::new(ra * a, ra * b * xn.signum()),
            Kind::Custom(Custom::Plane { even, odd }) => {
                let th = xn.atan2(xp).rem_euclid(2.0 * PI);
                C64::new(ra * even.eval(th), ra * odd.eval(th))
            }
            Kind::OrderReducing { delta, s0 } => {
                let s = (1.0 + xp * xp).sqrt();
                let (mu, mus) = (self.a + delta, self.a - delta);
                C64::new(s, -xn).powf(mus) * C64::new(s, xn).powf(mu) * *s0
            }
        }
    }

    /// Homogeneous principal part (equal to the symbol except for order_reducing).
    pub fn principal(&self, xp: f64, xn: f64) -> C64 {
        let v = match &self.kind {
            Kind::OrderReducing { delta, s0 } => {
                let (mu, mus) = (self.a + delta, self.a - delta);
                if xp == 0.0 && xn == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                C64::new(xp.abs(), -xn).powf(mus) * C64::new(xp.abs(), xn).powf(mu) * *s0
            }
            _ => self.raw(xp, xn),
        };
        if self.conj {
            v.conj()
        } else {
            v
        }
    }

    /// Expansion along the line `xi' = xp` as `|xi_n| -> infinity`, `j` terms.
    pub fn line_series(&self, xp: f64, j: usize) -> AsymSeries {
        let mut s = AsymSeries::zero(2.0 * self.a, j);
        if let Kind::OrderReducing { delta, s0 } = self.kind {
            let sg = (1.0 + xp * xp).sqrt();
            let m = AsymSeries::xi_power(Side::Minus, self.a - delta, sg, j);
            let p = AsymSeries::xi_power(Side::Plus, self.a + delta, sg, j);
            s = m.mul(&p).scale(C64::new(s0, 0.0));
        } else {
            for (side, sgn) in [(0usize, 1.0), (1usize, -1.0)] {
                let t = self.pole_taylor(sgn, j);
                for (k, tk) in t.into_iter().enumerate() {
                    let v = tk * xp.powi(k as i32);
                    if side == 0 {
                        s.plus[k] = v;
                    } else {
                        s.minus[k] = v;
                    }
                }
            }
        }
        if self.conj {
            s.conj()
        } else {
            s
        }
    }

    /// Taylor coefficients of `eps -> L(eps, sgn)` (unit tangential direction).
    fn pole_taylor(&self, sgn: f64, j: usize) -> Vec<C64> {
        let a = self.a;
        let z = C64::new(0.0, 0.0);
        let mut t = vec![z; j];
        // (1 + eps^2)^p as a list of coefficients
        let radial = |p: f64| {
            let mut c = vec![0.0; j];
            for m in 0..j.div_ceil(2) {
                if 2 * m < j {
                    c[2 * m] = binom(p, m);
                }
            }
            c
        };
        match &self.kind {
            Kind::FracLaplacian => {
                for (k, v) in radial(a).into_iter().enumerate() {
                    t[k] = C64::new(v, 0.0);
                }
            }
            Kind::Drift(b) => {
                let r0 = radial(a);
                let r1 = radial(a - 0.5);
                let (bp, bn) = if self.dim == 1 { (0.0, b[0]) } else { (b[0], b[1]) };
                for k in 0..j {
                    let mut im = sgn * bn * r1[k];
                    if k >= 1 {
                        im += bp * r1[k - 1];
                    }
                    t[k] = C64::new(r0[k], im);
                }
            }
            Kind::OddMix(c) => {
                if j > 0 {
                    t[0] = C64::new(1.0, c * sgn);
                }
            }
            Kind::Custom(Custom::Line { a: ca, b: cb }) => {
                if j > 0 {
                    t[0] = C64::new(*ca, cb * sgn);
                }
            }
            Kind::Custom(Custom::Plane { .. }) => {
                let g = |e: f64| self.raw(e, sgn);
                let eta = 1e-3;
                let (gm, g0, gp) = (g(-eta), g(0.0), g(eta));
                let d = [g0, (gp - gm) / (2.0 * eta), (gp - g0 * 2.0 + gm) / (2.0 * eta * eta)];
                for (k, v) in d.iter().enumerate().take(j) {
                    t[k] = *v;
                }
            }
            Kind::OrderReducing { .. } => unreachable!(),
        }
        t
    }
}

fn split(xi: &[f64]) -> (f64, f64) {
    match xi.len() {
        1 => (0.0, xi[0]),
        _ => (xi[0], xi[1]),
    }
}

/// Uniform periodic cubic spline on `[0, 2 pi)`.
#[derive(Clone, Debug)]
struct PeriodicSpline {
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl PeriodicSpline {
    fn new(y: Vec<f64>) -> Self {
        let n = y.len();
        let h = 2.0 * PI / n as f64;
        // circulant system m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2
        let mut rhs: Vec<C64> = (0..n)
            .map(|i| C64::new(6.0 * (y[(i + 1) % n] - 2.0 * y[i] + y[(i + n - 1) % n]) / (h * h), 0.0))
            .collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut rhs);
        for (k, v) in rhs.iter_mut().enumerate() {
            *v /= 4.0 + 2.0 * (2.0 * PI * k as f64 / n as f64).cos();
        }
        planner.plan_fft_inverse(n).process(&mut rhs);
        let m = rhs.iter().map(|v| v.re / n as f64).collect();
        PeriodicSpline { h, y, m }
    }

    fn eval(&self, th: f64) -> f64 {
        let n = self.y.len();
        let s = th / self.h;
        let i = (s.floor() as usize) % n;
        let t = s - s.floor();
        let j = (i + 1) % n;
        let (a, b) = (1.0 - t, t);
        let h2 = self.h * self.h;
        a * self.y[i] + b * self.y[j] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[j]) * h2 / 6.0
    }
}

/// Transmission parameters read off the pole values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmissionData {
    pub a: f64,
    pub delta: f64,
    pub mu: f64,
    pub mu_star: f64,
    pub s0: f64,
}

pub fn compute_transmission(sym: &HomogeneousSymbol) -> Result<TransmissionData> {
    let l = sym.principal(0.0, 1.0);
    if l.re <= 0.0 {
        return Err(Error::Param(format!("Re L(0,1) = {:.3e} must be positive", l.re)));
    }
    let delta = (l.im / l.re).atan() / PI;
    let a = sym.a;
    Ok(TransmissionData { a, delta, mu: a + delta, mu_star: a - delta, s0: l.norm() })
}

/// `|L(0,-1) - e^{i pi (2a - 2mu)} L(0,1)|`.
pub fn check_mu_transmission(sym: &HomogeneousSymbol, mu: f64) -> f64 {
    let lp = sym.principal(0.0, 1.0);
    let lm = sym.principal(0.0, -1.0);
    (lm - C64::from_polar(1.0, PI * (2.0 * sym.a - 2.0 * mu)) * lp).norm()
}

/// Quintic smoothstep on `[0, 1]`.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// Low-frequency cutoff `phi`: 1 on `|xi| <= R/2`, 0 on `|xi| >= R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub radius: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { radius: 1.0 }
    }
}

impl Cutoff {
    pub fn phi(&self, r: f64) -> f64 {
        let h = self.radius / 2.0;
        1.0 - smoothstep((r - h) / h)
    }
}

/// `L_phi = (1 - phi) L`, smooth at the origin.
#[derive(Clone, Debug)]
pub struct RegularizedSymbol {
    pub sym: HomogeneousSymbol,
    pub cutoff: Option<Cutoff>,
}

pub fn regularize(sym: &HomogeneousSymbol, cutoff: Cutoff) -> RegularizedSymbol {
    // order_reducing is already smooth
    let cutoff = if sym.is_order_reducing() { None } else { Some(cutoff) };
    RegularizedSymbol { sym: sym.clone(), cutoff }
}

impl RegularizedSymbol {
    pub fn at(&self, xp: f64, xn: f64) -> C64 {
        let v = self.sym.at(xp, xn);
        match self.cutoff {
            Some(c) => v * (1.0 - c.phi(xp.hypot(xn))),
            None => v,
        }
    }

    pub fn eval(&self, xi: &[f64]) -> Result<C64> {
        let (xp, xn) = split(xi);
        if self.cutoff.is_none() && xp == 0.0 && xn == 0.0 && !self.sym.is_order_reducing() {
            return Err(Error::Origin);
        }
        Ok(self.at(xp, xn))
    }

    pub fn adjoint(&self) -> Self {
        RegularizedSymbol { sym: self.sym.adjoint(), cutoff: self.cutoff }
    }
}

/// `q = (<xi'> - i xi_n)^{-mu*} L (<xi'> + i xi_n)^{-mu}`, bounded with limit `s0`.
#[derive(Clone, Debug)]
pub struct ReducedSymbol {
    pub l: RegularizedSymbol,
    pub td: TransmissionData,
}

pub fn reduced_symbol(sym: &HomogeneousSymbol, td: &TransmissionData, smoothing: Option<Cutoff>) -> ReducedSymbol {
    let cutoff = if sym.is_order_reducing() { None } else { smoothing };
    ReducedSymbol { l: RegularizedSymbol { sym: sym.clone(), cutoff }, td: *td }
}

pub fn japanese(xp: f64) -> f64 {
    (1.0 + xp * xp).sqrt()
}

impl ReducedSymbol {
    pub fn at(&self, xp: f64, xn: f64) -> C64 {
        let s = japanese(xp);
        if self.l.sym.is_order_reducing() && !self.l.sym.is_conjugated() {
            return C64::new(self.td.s0, 0.0);
        }
        C64::new(s, -xn).powf(-self.td.mu_star) * self.l.at(xp, xn) * C64::new(s, xn).powf(-self.td.mu)
    }

    pub fn line_series(&self, xp: f64, j: usize) -> AsymSeries {
        let s = japanese(xp);
        let m = AsymSeries::xi_power(Side::Minus, -self.td.mu_star, s, j);
        let p = AsymSeries::xi_power(Side::Plus, -self.td.mu, s, j);
        m.mul(&self.l.sym.line_series(xp, j)).mul(&p)
    }
}
