//! Far-field expansions of multipliers along a line.
//!
//! `AsymSeries { p0, plus, minus }` stands for
//! `l(xi) ~ sum_j c_j |xi|^(p0 - j)` with `c = plus` for `xi > 0` and
//! `c = minus` for `xi < 0`.

use num_complex::Complex64 as C64;

use crate::special::{binom, gamma};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `sigma + i xi`
    Plus,
    /// `sigma - i xi`
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AsymSeries {
    pub p0: f64,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

impl AsymSeries {
    pub fn zero(p0: f64, j: usize) -> Self {
        AsymSeries { p0, plus: vec![C64::new(0.0, 0.0); j], minus: vec![C64::new(0.0, 0.0); j] }
    }

    pub fn constant(c: C64, j: usize) -> Self {
        let mut s = Self::zero(0.0, j);
        if j > 0 {
            s.plus[0] = c;
            s.minus[0] = c;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    /// Expansion of `(sigma +- i xi)^t`.
    pub fn xi_power(side: Side, t: f64, sigma: f64, j: usize) -> Self {
        let s = side.sign();
        let mut out = Self::zero(t, j);
        for m in 0..j {
            let b = binom(t, m) * sigma.powi(m as i32);
            let ph = std::f64::consts::PI * s * (t - m as f64) / 2.0;
            out.plus[m] = C64::from_polar(b, ph);
            out.minus[m] = C64::from_polar(b, -ph);
        }
        out
    }

    /// Expansion of `i xi`.
    pub fn dn(j: usize) -> Self {
        let mut s = Self::zero(1.0, j);
        if j > 0 {
            s.plus[0] = C64::i();
            s.minus[0] = -C64::i();
        }
        s
    }

    pub fn mul(&self, o: &AsymSeries) -> AsymSeries {
        let j = self.len().min(o.len());
        let mut out = Self::zero(self.p0 + o.p0, j);
        for a in 0..j {
            for b in 0..j - a {
                out.plus[a + b] += self.plus[a] * o.plus[b];
                out.minus[a + b] += self.minus[a] * o.minus[b];
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> AsymSeries {
        AsymSeries {
            p0: self.p0,
            plus: self.plus.iter().map(|v| v * c).collect(),
            minus: self.minus.iter().map(|v| v * c).collect(),
        }
    }

    pub fn conj(&self) -> AsymSeries {
        AsymSeries {
            p0: self.p0,
            plus: self.plus.iter().map(|v| v.conj()).collect(),
            minus: self.minus.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Adds `o` whose leading power sits `shift` orders below ours.
    pub fn add_shifted(&mut self, o: &AsymSeries, shift: usize) {
        debug_assert!((self.p0 - shift as f64 - o.p0).abs() < 1e-9);
        let n = self.len();
        for j in 0..o.len() {
            if j + shift < n {
                self.plus[j + shift] += o.plus[j];
                self.minus[j + shift] += o.minus[j];
            }
        }
    }

    pub fn add(&mut self, o: &AsymSeries) {
        let shift = (self.p0 - o.p0).round();
        if shift >= 0.0 {
            self.add_shifted(o, shift as usize);
        } else {
            let mut n = o.clone();
            n.add_shifted(self, (-shift) as usize);
            n.plus.truncate(self.len());
            n.minus.truncate(self.len());
            *self = n;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.plus.iter().chain(&self.minus).map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluates the truncated series at a nonzero frequency.
    pub fn eval(&self, xi: f64) -> C64 {
        let c = if xi > 0.0 { &self.plus } else { &self.minus };
        let a = xi.abs();
        c.iter().enumerate().map(|(j, v)| v * a.powf(self.p0 - j as f64)).sum()
    }
}

/// Expansion of one edge group `sum_k c_k Gamma(beta+k+1) (sigma + i xi)^(-beta-1-k)`.
pub fn group_series(beta: f64, sigma: f64, c: &[C64], j: usize) -> AsymSeries {
    let mut acc = AsymSeries::zero(-beta - 1.0, j);
    for (k, ck) in c.iter().enumerate().take(j) {
        if ck.norm() == 0.0 {
            continue;
        }
        let g = gamma(beta + k as f64 + 1.0);
        let s = AsymSeries::xi_power(Side::Plus, -beta - 1.0 - k as f64, sigma, j - k).scale(ck * g);
        acc.add_shifted(&s, k);
    }
    acc
}

/// Coefficients of `(i xi)^p` and `(-i xi)^p` at each order.
#[derive(Clone, Debug)]
pub struct PmSplit {
    pub p0: f64,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
    /// Polynomial or non-representable leftovers, kept in the remainder.
    pub unresolved: Vec<C64>,
}

pub fn pm_split(s: &AsymSeries) -> PmSplit {
    let j = s.len();
    let z = C64::new(0.0, 0.0);
    let mut out = PmSplit { p0: s.p0, plus: vec![z; j], minus: vec![z; j], unresolved: vec![z; j] };
    for r in 0..j {
        let p = s.p0 - r as f64;
        let (cp, cm) = (s.plus[r], s.minus[r]);
        let e = C64::from_polar(1.0, std::f64::consts::PI * p / 2.0);
        if (std::f64::consts::PI * p).sin().abs() < 1e-9 {
            let ip = p.round() as i32;
            let parity = if ip.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let rep = (cp + cm * parity) / 2.0;
            out.unresolved[r] = cp - rep;
            if ip >= 0 {
                out.unresolved[r] = cp;
                continue;
            }
            // (i xi)^p = |xi|^p e^{i pi p/2} for xi > 0
            out.plus[r] = rep / e;
        } else {
            let det = e * e - 1.0 / (e * e);
            out.plus[r] = (cp * e - cm / e) / det;
            out.minus[r] = (cm * e - cp / e) / det;
        }
    }
    out
}

/// Rewrites `sum_r D_r (+-i xi)^(p0-r)` as `sum_l X_l (sigma +- i xi)^(p0-l)` to the same order.
pub fn to_basis(p0: f64, d: &[C64], sigma: f64) -> Vec<C64> {
    let mut x: Vec<C64> = Vec::with_capacity(d.len());
    for r in 0..d.len() {
        let mut v = d[r];
        for (l, xl) in x.iter().enumerate() {
            v -= xl * binom(p0 - l as f64, r - l) * sigma.powi((r - l) as i32);
        }
        x.push(v);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_power_matches_far_field() {
        let s = AsymSeries::xi_power(Side::Minus, 0.37, 2.0, 8);
        for xi in [-400.0, 350.0] {
            let exact = C64::new(2.0, -xi).powf(0.37);
            assert!((s.eval(xi) - exact).norm() < 1e-14 * exact.norm() * 1e3);
        }
    }

    #[test]
    fn split_recovers_pure_parts() {
        let a = AsymSeries::xi_power(Side::Plus, -1.3, 0.0, 3).scale(C64::new(0.5, 1.0));
        let b = AsymSeries::xi_power(Side::Minus, -1.3, 0.0, 3).scale(C64::new(-2.0, 0.25));
        let mut s = a.clone();
        s.add(&b);
        let pm = pm_split(&s);
        assert!((pm.plus[0] - C64::new(0.5, 1.0)).norm() < 1e-13);
        assert!((pm.minus[0] - C64::new(-2.0, 0.25)).norm() < 1e-13);
    }

    #[test]
    fn basis_change_is_consistent() {
        let d = vec![C64::new(1.0, 0.0), C64::new(0.3, -0.2), C64::new(-0.1, 0.4)];
        let x = to_basis(-0.6, &d, 3.0);
        let mut acc = AsymSeries::zero(-0.6, 3);
        for (l, xl) in x.iter().enumerate() {
            acc.add_shifted(&AsymSeries::xi_power(Side::Plus, -0.6 - l as f64, 3.0, 3 - l).scale(*xl), l);
        }
        let direct = d.iter().enumerate().fold(AsymSeries::zero(-0.6, 3), |mut a, (r, dr)| {
            a.add_shifted(&AsymSeries::xi_power(Side::Plus, -0.6 - r as f64, 0.0, 3 - r).scale(*dr), r);
            a
        });
        for r in 0..3 {
            assert!((acc.plus[r] - direct.plus[r]).norm() < 1e-13);
        }
    }
}
