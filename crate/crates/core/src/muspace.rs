//! Functions of the form `x_n^beta w(x)` with `w` smooth, their weighted traces
//! and expansions.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    apply, fft, normal_derivative, tangential_bessel, BoundaryField, EdgeGroup, EngineConfig, Grid, GridField,
    Multiplier, SigmaMode, Support,
};
use crate::jet::Jet;
use crate::special::{factorial, gamma};
use crate::symbol::smoothstep;

/// Smooth factor `amp * prod_i exp(-((x_i - c_i)/w_i)^2) * poly(x_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub width: Vec<f64>,
    /// Coefficients of `poly(x_n)`, lowest first; empty means 1.
    #[serde(default)]
    pub poly: Vec<f64>,
}

impl BumpSpec {
    pub fn gaussian(amplitude: f64, center: Vec<f64>, width: Vec<f64>) -> Self {
        BumpSpec { amplitude, center, width, poly: vec![] }
    }

    fn poly(&self) -> Vec<f64> {
        if self.poly.is_empty() {
            vec![1.0]
        } else {
            self.poly.clone()
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let d = grid.dim;
        if self.center.len() != d || self.width.len() != d {
            return Err(Error::Param(format!("bump needs {d} centers and widths")));
        }
        for i in 0..d {
            if self.width[i] <= 0.0 {
                return Err(Error::Param("bump widths must be positive".into()));
            }
            if self.center[i].abs() + 4.5 * self.width[i] > 0.75 * grid.halfwidth[i] {
                return Err(Error::Precondition(format!(
                    "bump on axis {i} reaches past the window plateau 0.75 X = {:.3}",
                    0.75 * grid.halfwidth[i]
                )));
            }
        }
        Ok(())
    }

    /// `partial_n` of the bump, again of the same family.
    pub fn derivative_n(&self) -> BumpSpec {
        let p = self.poly();
        let c = *self.center.last().unwrap();
        let w2 = self.width.last().unwrap().powi(2);
        let mut q = vec![0.0; p.len() + 1];
        for (k, pk) in p.iter().enumerate() {
            if k >= 1 {
                q[k - 1] += k as f64 * pk;
            }
            // -2 (x - c) / w^2 * p
            q[k + 1] += -2.0 / w2 * pk;
            q[k] += 2.0 * c / w2 * pk;
        }
        BumpSpec { poly: q, ..self.clone() }
    }

    /// `x_n` times the bump.
    pub fn times_xn(&self) -> BumpSpec {
        let mut q = vec![0.0];
        q.extend(self.poly());
        BumpSpec { poly: q, ..self.clone() }
    }

    fn normal_factor(&self, x: f64) -> f64 {
        let c = *self.center.last().unwrap();
        let w = *self.width.last().unwrap();
        let p = self.poly().iter().rev().fold(0.0, |a, v| a * x + v);
        p * (-((x - c) / w).powi(2)).exp()
    }

    fn tangential_factor(&self, xp: f64) -> f64 {
        if self.center.len() == 1 {
            1.0
        } else {
            (-((xp - self.center[0]) / self.width[0]).powi(2)).exp()
        }
    }

    /// Taylor coefficients in `x_n` at 0 of the normal factor.
    pub fn normal_jet(&self, order: usize) -> Jet {
        let c = *self.center.last().unwrap();
        let w = *self.width.last().unwrap();
        let t = Jet::variable(-c / w, order).scale(1.0);
        // (x - c)/w with x the jet variable: slope 1/w
        let mut s = t;
        if order > 1 {
            s.0[1] = 1.0 / w;
        }
        s.mul(&s).scale(-1.0).exp().mul(&Jet::from_poly(&self.poly(), order))
    }
}

/// Per-axis window: 1 on `|x| <= 0.75 X`, quintic taper to 0 at `0.95 X`.
pub fn window(x: f64, halfwidth: f64) -> f64 {
    1.0 - smoothstep((x.abs() - 0.75 * halfwidth) / (0.2 * halfwidth))
}

#[derive(Clone, Copy, Debug)]
pub struct MuConfig {
    /// Taylor terms carried by the edge group.
    pub terms: usize,
    pub sigma: f64,
}

impl Default for MuConfig {
    fn default() -> Self {
        MuConfig { terms: 8, sigma: 6.0 }
    }
}

/// `u = x_n^beta w` on the upper halfspace (`beta = mu` for members of `E_mu`).
#[derive(Clone, Debug)]
pub struct MuFunction {
    pub exponent: f64,
    pub bump: BumpSpec,
    pub scale: C64,
    pub field: GridField,
}

pub fn make_mu_function(grid: &Grid, exponent: f64, bump: &BumpSpec, scale: C64, cfg: &MuConfig) -> Result<MuFunction> {
    if exponent <= -1.0 {
        return Err(Error::Precondition(format!("exponent {exponent} must exceed -1")));
    }
    bump.validate(grid)?;
    let n = grid.n;
    let j0 = grid.j0();
    let amp = bump.amplitude;
    let tang: Vec<C64> = (0..grid.lines())
        .map(|i| {
            let xp = grid.xp(i);
            let wv = if grid.dim == 1 { 1.0 } else { window(xp, grid.halfwidth[0]) };
            C64::new(bump.tangential_factor(xp) * wv, 0.0)
        })
        .collect();
    let tang_lines = fft::boundary_forward(grid, &tang);
    let jet = bump.normal_jet(cfg.terms);
    let e = Jet(
        (0..cfg.terms).map(|k| cfg.sigma.powi(k as i32) / factorial(k)).collect(),
    );
    let c = jet.mul(&e);
    let coeffs: Vec<Vec<C64>> =
        c.0.iter().map(|ck| tang_lines.iter().map(|t| t * ck * amp * scale).collect()).collect();
    let group = EdgeGroup { beta: exponent, sigma: SigmaMode::Const(cfg.sigma), coeffs };
    let xw = grid.xn_halfwidth();
    let mut vals = vec![C64::new(0.0, 0.0); grid.len()];
    // with exponent 0 the boundary sample is the one-sided limit, matching the group
    let first = if exponent == 0.0 { j0 } else { j0 + 1 };
    for i in 0..grid.lines() {
        for j in first..n {
            let x = grid.xn(j);
            vals[i * n + j] = tang[i] * (x.powf(exponent) * bump.normal_factor(x) * window(x, xw) * amp) * scale;
        }
    }
    let mut field = GridField::from_values(grid, vals, Support::SupportedUpper)?;
    field.groups.push(group);
    let gv = fft::from_lines(grid, &field.groups_lines());
    for (a, b) in field.rem.iter_mut().zip(gv) {
        *a -= b;
    }
    field.smooth_across = true;
    Ok(MuFunction { exponent, bump: bump.clone(), scale, field })
}

impl MuFunction {
    pub fn grid(&self) -> &Grid {
        &self.field.grid
    }

    /// `mu` such that `u` lies in `E_{mu-1}`.
    pub fn mu(&self) -> f64 {
        self.exponent + 1.0
    }

    pub fn eval(&self, xp: f64, xn: f64) -> C64 {
        if xn <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.smooth(xp, xn) * xn.powf(self.exponent)
    }

    /// The smooth factor `w`, window included.
    pub fn smooth(&self, xp: f64, xn: f64) -> C64 {
        let g = self.grid();
        let mut v = self.bump.amplitude * self.bump.normal_factor(xn) * window(xn, g.xn_halfwidth());
        if g.dim == 2 {
            v *= self.bump.tangential_factor(xp) * window(xp, g.halfwidth[0]);
        }
        self.scale * v
    }

    /// `k`-th Taylor coefficient of `w` in `x_n` at the boundary.
    pub fn taylor(&self, k: usize) -> BoundaryField {
        let g = self.grid();
        let jk = self.bump.normal_jet(k + 1).0[k];
        let values = (0..g.lines())
            .map(|i| {
                let xp = g.xp(i);
                let t = if g.dim == 1 { 1.0 } else { self.bump.tangential_factor(xp) * window(xp, g.halfwidth[0]) };
                self.scale * (self.bump.amplitude * jk * t)
            })
            .collect();
        BoundaryField { grid: g.clone(), values }
    }

    pub fn derivative_n(&self) -> Result<GridField> {
        normal_derivative(&self.field)
    }

    /// Same function seen as a member of `E_{beta-1}` with vanishing leading trace.
    pub fn lowered(&self, cfg: &MuConfig) -> Result<MuFunction> {
        make_mu_function(self.grid(), self.exponent - 1.0, &self.bump.times_xn(), self.scale, cfg)
    }
}

/// `gamma_k^{mu-1} u = Gamma(mu + k) partial_n^k (u / x_n^{mu-1})|_{x_n=0}`.
pub fn weighted_trace(u: &MuFunction, k: usize) -> Result<BoundaryField> {
    let mu = u.mu();
    if mu <= 0.0 {
        return Err(Error::Precondition("weighted traces need mu > 0".into()));
    }
    if k > 1 {
        return Err(Error::Precondition("only Dirichlet and Neumann weighted traces are defined".into()));
    }
    let mut b = u.taylor(k);
    let s = gamma(mu + k as f64) * factorial(k);
    for v in b.values.iter_mut() {
        *v *= s;
    }
    Ok(b)
}

/// `gamma_k` of `Xi_+^{mu-1} u`, read off the grid by extrapolation from `x_n = h, 2h, 3h`.
/// With `mu = 1` the plain trace is read directly.
pub fn trace_via_order_reduction(u: &MuFunction, k: usize, cfg: &EngineConfig) -> Result<BoundaryField> {
    let t = u.mu() - 1.0;
    // Xi_+^0 is the identity
    if t == 0.0 && k == 0 {
        return u.field.boundary();
    }
    let mut v = if t == 0.0 { u.field.clone() } else { apply(&Multiplier::xi_plus(t), &u.field, cfg)? };
    for _ in 0..k {
        v = normal_derivative(&v)?;
    }
    Ok(v.boundary_extrapolated())
}

#[derive(Clone, Debug)]
pub struct ExpansionCoeffs {
    pub u0: BoundaryField,
    pub u1: BoundaryField,
    pub phi0: BoundaryField,
    pub phi1: BoundaryField,
    /// `U_0 + U_1`, a single edge group with `sigma = <xi'>`.
    pub leading: GridField,
    pub remainder: GridField,
}

/// `u = U_0 + U_1 + r` with `U_k = F^{-1}[phi_k (<xi'> + i xi_n)^{-mu-k}]`.
pub fn expansion_terms(u: &MuFunction) -> Result<ExpansionCoeffs> {
    let mu = u.mu();
    let g = u.grid().clone();
    let u0 = weighted_trace(u, 0)?;
    let u1 = weighted_trace(u, 1)?;
    let phi0 = u0.clone();
    let b = tangential_bessel(&u0, 1.0);
    let phi1 = BoundaryField {
        grid: g.clone(),
        values: u1.values.iter().zip(&b.values).map(|(a, c)| a + c * mu).collect(),
    };
    let p0 = phi0.to_lines();
    let p1 = phi1.to_lines();
    let coeffs = vec![
        p0.iter().map(|v| v / gamma(mu)).collect::<Vec<_>>(),
        p1.iter().map(|v| v / gamma(mu + 1.0)).collect(),
    ];
    let grp = EdgeGroup { beta: mu - 1.0, sigma: SigmaMode::Bessel, coeffs };
    let leading = GridField {
        grid: g.clone(),
        support: Support::SupportedUpper,
        rem: vec![C64::new(0.0, 0.0); g.len()],
        groups: vec![grp.clone()],
        leak: 0.0,
        smooth_across: true,
    };
    let mut neg = grp;
    neg.scale(C64::new(-1.0, 0.0));
    let mut remainder = u.field.clone();
    remainder.groups.push(neg);
    Ok(ExpansionCoeffs { u0, u1, phi0, phi1, leading, remainder })
}

/// Taylor coefficients of `f / x_n^beta` at the boundary from the edge groups, line space.
pub fn edge_taylor(f: &GridField, beta: f64, order: usize) -> Result<Vec<Vec<C64>>> {
    let g = &f.grid;
    let mut out = vec![vec![C64::new(0.0, 0.0); g.lines()]; order];
    for grp in &f.groups {
        let shift = grp.beta - beta;
        if (shift - shift.round()).abs() > 1e-9 || shift.round() < 0.0 {
            return Err(Error::Precondition("group exponent does not match the weight".into()));
        }
        let s = shift.round() as usize;
        for l in 0..g.lines() {
            let sg = grp.sigma_at(g, l);
            let e: Vec<f64> = (0..order).map(|k| (-sg).powi(k as i32) / factorial(k)).collect();
            for (k, ck) in grp.coeffs.iter().enumerate() {
                for (m, em) in e.iter().enumerate() {
                    let idx = s + k + m;
                    if idx < order {
                        out[idx][l] += ck[l] * em;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `u = partial_n U + U_1` with `U, U_1` in `E_mu`.
pub fn split_large(u: &MuFunction, cfg: &MuConfig) -> Result<(MuFunction, MuFunction)> {
    let mu = u.mu();
    if mu <= 0.0 {
        return Err(Error::Precondition("split_large needs mu > 0".into()));
    }
    let big = make_mu_function(u.grid(), mu, &u.bump, u.scale / mu, cfg)?;
    let rest = make_mu_function(u.grid(), mu, &u.bump.derivative_n(), -u.scale / mu, cfg)?;
    Ok((big, rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_function() {
        let b = BumpSpec { amplitude: 1.0, center: vec![0.3], width: vec![0.8], poly: vec![1.0, 0.5] };
        let j = b.normal_jet(6);
        let x = 1e-3;
        assert!((j.eval(x) - b.normal_factor(x)).abs() < 1e-15);
        let d = b.derivative_n();
        let fd = (b.normal_factor(0.2 + 1e-6) - b.normal_factor(0.2 - 1e-6)) / 2e-6;
        assert!((d.normal_factor(0.2) - fd).abs() < 1e-8);
    }
}
