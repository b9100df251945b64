//! Both sides of the halfspace identities on concrete fields, refinement
//! sweeps and a singular-integral oracle for `n = 1`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    apply, boundary_inner, fft_apply, halfspace_inner, BoundaryField, EngineConfig, Factor, Grid, GridField,
    Multiplier, Support,
};
use crate::muspace::MuFunction;
use crate::special::gamma;
use crate::symbol::{
    compute_transmission, reduced_symbol, regularize, Cutoff, HomogeneousSymbol, TransmissionData,
};
use crate::wiener_hopf::BoundarySymbol;

pub const REL_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    Lemma41,
    IbpSpecial,
    IbpGeneral,
    ZeroIdentity,
    HalfwaysGreen,
    FullGreen,
}

impl IdentityId {
    pub const ALL: [IdentityId; 6] = [
        IdentityId::Lemma41,
        IdentityId::IbpSpecial,
        IdentityId::IbpGeneral,
        IdentityId::ZeroIdentity,
        IdentityId::HalfwaysGreen,
        IdentityId::FullGreen,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityId::Lemma41 => "lemma41",
            IdentityId::IbpSpecial => "ibp_special",
            IdentityId::IbpGeneral => "ibp_general",
            IdentityId::ZeroIdentity => "zero_identity",
            IdentityId::HalfwaysGreen => "halfways_green",
            IdentityId::FullGreen => "full_green",
        }
    }
}

impl std::str::FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown identity `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "box")]
    pub box_halfwidth: f64,
}

impl GridParams {
    pub fn of(g: &Grid) -> Self {
        GridParams { dim: g.dim, n: g.n, box_halfwidth: g.xn_halfwidth() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub preset: String,
    pub a: f64,
    pub delta: f64,
    pub mu: f64,
    pub grid: GridParams,
    pub lhs: C64,
    pub rhs: C64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// Magnitude the absolute residual is measured against.
    pub scale: f64,
    #[serde(default)]
    pub convergence_order: Option<f64>,
}

impl IdentityReport {
    fn new(id: IdentityId, v: &Verifier, lhs: C64, rhs: C64, scale: Option<f64>) -> Self {
        let abs_residual = (lhs - rhs).norm();
        let scale = scale.unwrap_or_else(|| lhs.norm().max(rhs.norm()));
        IdentityReport {
            identity_id: id,
            preset: v.sym.preset_id().to_string(),
            a: v.td.a,
            delta: v.td.delta,
            mu: v.td.mu,
            grid: GridParams::of(&v.grid),
            lhs,
            rhs,
            abs_residual,
            rel_residual: abs_residual / scale.max(REL_FLOOR),
            scale,
            convergence_order: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Fft,
    Factored,
}

#[derive(Clone, Copy, Debug)]
pub struct ApplyOptions {
    pub route: Route,
    pub cutoff: Cutoff,
    pub engine: EngineConfig,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        ApplyOptions { route: Route::Fft, cutoff: Cutoff::default(), engine: EngineConfig::default() }
    }
}

/// `r^+ L_phi e^+ f`.
pub fn apply_l(sym: &HomogeneousSymbol, f: &GridField, opts: &ApplyOptions) -> Result<GridField> {
    let l = regularize(sym, opts.cutoff);
    match opts.route {
        Route::Fft => apply(&Multiplier::symbol(&l), f, &opts.engine),
        Route::Factored => {
            if f.support == Support::Whole {
                return Err(Error::Precondition("the factored route needs a field on the upper halfspace".into()));
            }
            let td = compute_transmission(sym)?;
            let q = reduced_symbol(sym, &td, l.cutoff);
            // a delta at x_n = 0 (large solutions) stays in the spectrum and is removed by r^+
            let mut w = apply(&Multiplier::new(vec![Factor::XiPlus(td.mu), Factor::Reduced(q)]), f, &opts.engine)?;
            w.support = Support::RestrictedUpper;
            apply(&Multiplier::xi_minus(td.mu_star), &w, &opts.engine)
        }
    }
}

/// Evaluates the identities for one symbol on one grid.
#[derive(Clone, Debug)]
pub struct Verifier {
    pub sym: HomogeneousSymbol,
    pub td: TransmissionData,
    pub grid: Grid,
    pub opts: ApplyOptions,
}

impl Verifier {
    pub fn new(sym: &HomogeneousSymbol, grid: &Grid, opts: ApplyOptions) -> Result<Self> {
        if sym.dim() != grid.dim {
            return Err(Error::GridMismatch(format!("symbol in dimension {} on a grid of dimension {}", sym.dim(), grid.dim)));
        }
        let td = compute_transmission(sym)?;
        Ok(Verifier { sym: sym.clone(), td, grid: grid.clone(), opts })
    }

    fn check(&self, u: &MuFunction) -> Result<()> {
        self.grid.check_same(u.grid())
    }

    pub fn l(&self, f: &GridField) -> Result<GridField> {
        apply_l(&self.sym, f, &self.opts)
    }

    pub fn l_star(&self, f: &GridField) -> Result<GridField> {
        apply_l(&self.sym.adjoint(), f, &self.opts)
    }

    /// `int_{x_n > 0} G conj(partial_n v)` with `G = r^+ op(f)` restricted.
    ///
    /// For `v` of exponent `nu <= 0` the derivative is not integrable and the
    /// pairing is moved through `Xi_-^{a - nu}` / `Xi_+^{nu - a}`.
    fn pair_deriv(&self, g: GridField, v: &MuFunction) -> Result<C64> {
        let nu = v.exponent;
        if nu > 0.0 {
            return halfspace_inner(&g, &v.derivative_n()?);
        }
        let s = self.td.a - nu;
        let mut g = g;
        g.support = Support::RestrictedUpper;
        let left = apply(&Multiplier::xi_minus(s), &g, &self.opts.engine)?;
        let right = apply(&Multiplier::new(vec![Factor::Dn, Factor::XiPlus(-s)]), &v.field, &self.opts.engine)?;
        halfspace_inner(&left, &right)
    }

    /// `int Xi_-^mu e^+ w conj(partial_n u') = (gamma_0 w, gamma_0 w') + (w, partial_n w')`, `w' = r^+ Xi_+^mu u'`.
    pub fn lemma41(&self, w: &GridField, uprime: &MuFunction) -> Result<IdentityReport> {
        self.check(uprime)?;
        let mu = uprime.exponent;
        let mut w = w.clone();
        w.support = Support::RestrictedUpper;
        let xw = apply(&Multiplier::xi_minus(mu), &w, &self.opts.engine)?;
        let lhs = self.pair_deriv(xw, uprime)?;
        let wp = apply(&Multiplier::xi_plus(mu), &uprime.field, &self.opts.engine)?;
        let dwp = crate::grid::normal_derivative(&wp)?;
        let rhs = boundary_inner(&w.boundary()?, &wp.boundary()?)? + halfspace_inner(&w, &dwp)?;
        let mut rep = IdentityReport::new(IdentityId::Lemma41, self, lhs, rhs, None);
        rep.mu = mu;
        Ok(rep)
    }

    /// Same form as [`Verifier::ibp_general`] for `Xi_-^{mu*} Xi_+^{mu}`.
    pub fn ibp_special(&self, u: &MuFunction, uprime: &MuFunction) -> Result<IdentityReport> {
        let p = HomogeneousSymbol::order_reducing(self.sym.dim(), self.td.a, self.td.delta, 1.0)?;
        let v = Verifier { sym: p, td: TransmissionData { s0: 1.0, ..self.td }, grid: self.grid.clone(), opts: self.opts };
        let mut rep = v.ibp_general(u, uprime)?;
        rep.identity_id = IdentityId::IbpSpecial;
        rep.preset = self.sym.preset_id().to_string();
        Ok(rep)
    }

    /// `int Lu conj(partial_n u') + int partial_n u conj(L* u') = Gamma(mu+1) Gamma(mu*+1) s0 (gamma_0(u/x^mu), gamma_0(u'/x^mu*))`.
    pub fn ibp_general(&self, u: &MuFunction, uprime: &MuFunction) -> Result<IdentityReport> {
        self.check(u)?;
        self.check(uprime)?;
        let td = &self.td;
        let t1 = self.pair_deriv(self.l(&u.field)?, uprime)?;
        let t2 = self.pair_deriv(self.l_star(&uprime.field)?, u)?.conj();
        let lhs = t1 + t2;
        let rhs = boundary_inner(&u.taylor(0), &uprime.taylor(0))? * (gamma(td.mu + 1.0) * gamma(td.mu_star + 1.0) * td.s0);
        Ok(IdentityReport::new(IdentityId::IbpGeneral, self, lhs, rhs, None))
    }

    /// `int Lw conj(w') - int w conj(L* w') = 0`; measured against the larger integral.
    pub fn zero_identity(&self, w: &MuFunction, wprime: &MuFunction) -> Result<IdentityReport> {
        self.check(w)?;
        self.check(wprime)?;
        let i1 = halfspace_inner(&self.l(&w.field)?, &wprime.field)?;
        let i2 = halfspace_inner(&w.field, &self.l_star(&wprime.field)?)?;
        let scale = i1.norm().max(i2.norm());
        Ok(IdentityReport::new(IdentityId::ZeroIdentity, self, i1 - i2, C64::new(0.0, 0.0), Some(scale)))
    }

    fn green_lhs(&self, u: &MuFunction, v: &MuFunction) -> Result<C64> {
        Ok(halfspace_inner(&self.l(&u.field)?, &v.field)? - halfspace_inner(&u.field, &self.l_star(&v.field)?)?)
    }

    /// `u` of exponent `mu - 1`, `v` of exponent `mu*`.
    pub fn halfways_green(&self, u: &MuFunction, v: &MuFunction) -> Result<IdentityReport> {
        self.check(u)?;
        self.check(v)?;
        let td = &self.td;
        if td.mu <= 0.0 || td.mu_star <= 0.0 {
            return Err(Error::Precondition("halfways Green needs mu, mu* > 0".into()));
        }
        let lhs = self.green_lhs(u, v)?;
        let rhs = -boundary_inner(&u.taylor(0), &v.taylor(0))? * (gamma(td.mu) * gamma(td.mu_star + 1.0) * td.s0);
        Ok(IdentityReport::new(IdentityId::HalfwaysGreen, self, lhs, rhs, None))
    }

    /// `u` of exponent `mu - 1`, `v` of exponent `mu* - 1`; `b` from `bsym`.
    pub fn full_green(&self, u: &MuFunction, v: &MuFunction, bsym: Option<&BoundarySymbol>) -> Result<IdentityReport> {
        self.check(u)?;
        self.check(v)?;
        let td = &self.td;
        if td.mu <= 0.0 || td.mu_star <= 0.0 {
            return Err(Error::Precondition("full Green needs mu, mu* > 0".into()));
        }
        let bsym = bsym.ok_or_else(|| Error::Precondition("full Green needs the boundary symbol".into()))?;
        let g = &self.grid;
        if bsym.b_vals.len() != g.lines() {
            return Err(Error::GridMismatch("boundary symbol computed on another grid".into()));
        }
        let lhs = self.green_lhs(u, v)?;
        let (u0, u1, v0, v1) = (u.taylor(0), u.taylor(1), v.taylor(0), v.taylor(1));
        let s0 = td.s0;
        let (mu, mus) = (td.mu, td.mu_star);
        let mut rhs = boundary_inner(&u1, &v0)? * (s0 * gamma(mu + 1.0) * gamma(mus))
            - boundary_inner(&u0, &v1)? * (s0 * gamma(mu) * gamma(mus + 1.0));
        let ul = u0.to_lines();
        let vl = v0.to_lines();
        let mut t = C64::new(0.0, 0.0);
        for l in 0..g.lines() {
            let sym = C64::new(s0 * (mu - mus) * g.bessel(l), 0.0) + bsym.b_vals[l];
            t += sym * ul[l] * vl[l].conj();
        }
        rhs += t * (g.line_weight() * gamma(mu) * gamma(mus));
        Ok(IdentityReport::new(IdentityId::FullGreen, self, lhs, rhs, None))
    }
}

/// Result of a refinement sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sweep {
    pub reports: Vec<IdentityReport>,
    /// Fitted decay rate of the residual in `N`; `None` when at the floor.
    pub order: Option<f64>,
    pub at_floor: bool,
    pub monotone: bool,
}

impl Sweep {
    pub fn order_label(&self) -> String {
        match self.order {
            Some(p) => format!("{p:.2}"),
            None => "floor".into(),
        }
    }

    pub fn finest(&self) -> &IdentityReport {
        self.reports.last().expect("sweep is non-empty")
    }
}

/// Runs `run` on every `N` and fits `log residual` against `log N`.
pub fn convergence_sweep(ns: &[usize], run: impl Fn(usize) -> Result<IdentityReport>) -> Result<Sweep> {
    if ns.len() < 3 {
        return Err(Error::Config("a sweep needs at least three grids".into()));
    }
    let mut reports = ns.iter().map(|&n| run(n)).collect::<Result<Vec<_>>>()?;
    let res: Vec<f64> = reports.iter().map(|r| r.rel_residual).collect();
    let at_floor = res.iter().all(|r| *r < 1e-12);
    let monotone = res.windows(2).all(|w| w[1] < w[0]);
    let order = if at_floor {
        None
    } else {
        let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
        let ys: Vec<f64> = res.iter().map(|r| r.max(1e-300).ln()).collect();
        let m = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        Some(-sxy / sxx)
    };
    for r in reports.iter_mut() {
        r.convergence_order = order;
    }
    Ok(Sweep { reports, order, at_floor, monotone })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { 1.0 } else { p1 };
            dp = m as f64 * (z * pm - p0) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite rule on `[a, b]` with `panels` panels of `m` nodes.
fn composite(a: f64, b: f64, panels: usize, m: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(m);
    let d = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * m);
    for p in 0..panels {
        let lo = a + p as f64 * d;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * d * (xi + 1.0), 0.5 * d * wi));
        }
    }
    out
}

/// `n = 1` principal-value evaluation of `Op(L_phi) f` at the points `xs`.
///
/// `f` must be smooth and negligible beyond `|x| > reach`. The homogeneous
/// kernel `|y|^{-1-2a}(k_e + k_o sgn y)` is integrated in closed form near
/// `y = 0` and by Gauss-Legendre in `log y`; the low-frequency part `phi L`
/// is convolved with its kernel by the trapezoid rule.
pub fn oracle_apply(
    sym: &HomogeneousSymbol,
    cutoff: Cutoff,
    f: &dyn Fn(f64) -> C64,
    xs: &[f64],
    reach: f64,
) -> Result<Vec<C64>> {
    if sym.dim() != 1 {
        return Err(Error::Dimension { preset: "oracle", dim: sym.dim() });
    }
    if sym.is_order_reducing() {
        return Err(Error::Param("the oracle needs a homogeneous symbol".into()));
    }
    let a = sym.a();
    let l1 = sym.principal(0.0, 1.0);
    let (ca, cb) = (l1.re, l1.im);
    let odd_is_derivative = (2.0 * a - 1.0).abs() < 1e-12;
    if 2.0 * a > 1.0 + 1e-12 && cb.abs() > 0.0 {
        return Err(Error::Param("oracle: odd part of order above 1 is not supported".into()));
    }
    let k_e = ca * 4f64.powf(a) * gamma(0.5 + a) / (PI.sqrt() * gamma(-a).abs());
    let k_o = if odd_is_derivative { 0.0 } else { cb / (2.0 * gamma(-2.0 * a) * (PI * a).sin()) };

    // low-frequency kernel k_phi(z) = (1/pi) int_0^R phi xi^{2a} (A cos z xi - B sin z xi) d xi, xi = R s^2
    let r = cutoff.radius;
    let xi_nodes: Vec<(f64, f64)> = composite(0.0, 1.0, 16, 12)
        .into_iter()
        .map(|(s, w)| {
            let xi = r * s * s;
            (xi, w * 2.0 * r * s * cutoff.phi(xi) * xi.powf(2.0 * a) / PI)
        })
        .collect();
    let k_phi = |z: f64| -> f64 { xi_nodes.iter().map(|(xi, w)| w * (ca * (z * xi).cos() - cb * (z * xi).sin())).sum() };
    let dz = 1.0 / 64.0;
    let xmax = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let zmax = xmax + reach;
    let nz = (zmax / dz).ceil() as i64;
    let kz: Vec<f64> = (-nz..=nz).map(|j| k_phi(j as f64 * dz)).collect();

    let y0: f64 = 1e-2;
    let step = 1e-3;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let fx = f(x);
        let d1 = (f(x + step) - f(x - step)) / (2.0 * step);
        let d2 = (f(x + step) - fx * 2.0 + f(x - step)) / (step * step);
        let big_y = reach + x.abs();
        // near zero: Taylor in y
        let mut acc = -d2 * k_e * y0.powf(2.0 - 2.0 * a) / (2.0 - 2.0 * a);
        if k_o != 0.0 {
            acc -= d1 * (2.0 * k_o * y0.powf(1.0 - 2.0 * a) / (1.0 - 2.0 * a));
        }
        // y in [y0, Y], y = y0 e^t
        let tmax = (big_y / y0).ln();
        for (t, w) in composite(0.0, tmax, (tmax * 24.0).ceil() as usize, 10) {
            let y = y0 * t.exp();
            let (fp, fm) = (f(x + y), f(x - y));
            let ker = y.powf(-2.0 * a) * w;
            acc += ((fx * 2.0 - fp - fm) * k_e + (fm - fp) * k_o) * ker;
        }
        // y > Y: f(x +- y) negligible
        acc += fx * (2.0 * k_e * big_y.powf(-2.0 * a) / (2.0 * a));
        if odd_is_derivative {
            acc += d1 * cb;
        }
        // minus the low-frequency part
        let mut conv = C64::new(0.0, 0.0);
        for (j, k) in kz.iter().enumerate() {
            let z = (j as i64 - nz) as f64 * dz;
            conv += f(x - z) * *k;
        }
        out.push(acc - conv * dz);
    }
    Ok(out)
}

/// `Op(L_phi) f` on a whole-line field by the plain FFT, for comparison with the oracle.
pub fn fft_reference(sym: &HomogeneousSymbol, cutoff: Cutoff, f: &GridField) -> Result<GridField> {
    fft_apply(f, &Multiplier::symbol(&regularize(sym, cutoff)))
}

/// Max relative difference of two boundary fields.
pub fn boundary_rel_diff(a: &BoundaryField, b: &BoundaryField) -> f64 {
    let d = a.sub(b).max_abs();
    d / a.max_abs().max(b.max_abs()).max(REL_FLOOR)
}
