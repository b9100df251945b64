//! Campaign configuration, the `verify` / `decompose` / `traces` commands and report files.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{EngineConfig, Grid, GridField, Support};
use crate::muspace::{
    expansion_terms, make_mu_function, trace_via_order_reduction, weighted_trace, BumpSpec, MuConfig, MuFunction,
};
use crate::symbol::{check_mu_transmission, compute_transmission, reduced_symbol, Cutoff, HomogeneousSymbol, SymbolSpec};
use crate::verify::{apply_l, ApplyOptions, IdentityId, IdentityReport, Route, Verifier};
use crate::wiener_hopf::{boundary_jump_symbol, wh_decompose, WhConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    /// Points per axis, one grid per entry.
    pub n: Vec<usize>,
    #[serde(rename = "box", default = "default_box")]
    pub box_halfwidth: f64,
}

fn default_box() -> f64 {
    8.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bumps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<BumpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_prime: Option<BumpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<BumpSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_route_tol")]
    pub route_tol: f64,
    #[serde(default = "default_leak_tol")]
    pub leak_tol: f64,
    /// Relative residual allowed at the finest grid; missing identities use the built-in table.
    #[serde(default)]
    pub identity: BTreeMap<IdentityId, f64>,
}

fn default_route_tol() -> f64 {
    1e-4
}

fn default_leak_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { route_tol: default_route_tol(), leak_tol: default_leak_tol(), identity: BTreeMap::new() }
    }
}

impl Tolerances {
    pub fn for_identity(&self, id: IdentityId) -> f64 {
        self.identity.get(&id).copied().unwrap_or(match id {
            IdentityId::Lemma41 | IdentityId::IbpSpecial | IdentityId::IbpGeneral => 1e-2,
            IdentityId::ZeroIdentity => 1e-3,
            IdentityId::HalfwaysGreen => 2e-2,
            IdentityId::FullGreen => 3e-2,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub symbol: SymbolSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub bumps: Bumps,
    /// Empty means all identities.
    #[serde(default)]
    pub identities: Vec<IdentityId>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_route")]
    pub route: Route,
    #[serde(default = "default_radius")]
    pub cutoff_radius: f64,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Only for transmission experiments: the residual of the condition at this `mu` is logged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_override: Option<f64>,
}

fn default_route() -> Route {
    Route::Fft
}

fn default_radius() -> f64 {
    1.0
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: CampaignConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.build_symbol()?;
        if self.grid.n.is_empty() {
            return Err(Error::Config("grid.n is empty".into()));
        }
        for &n in &self.grid.n {
            if !n.is_power_of_two() || n < 8 {
                return Err(Error::Config(format!("grid size {n} is not a power of two >= 8")));
            }
        }
        if self.grid.box_halfwidth <= 0.0 {
            return Err(Error::Config("box must be positive".into()));
        }
        if self.cutoff_radius <= 0.0 {
            return Err(Error::Config("cutoff_radius must be positive".into()));
        }
        Ok(())
    }

    pub fn build_symbol(&self) -> Result<HomogeneousSymbol> {
        HomogeneousSymbol::from_spec(&self.symbol, self.grid.dim)
    }

    pub fn selected(&self) -> Vec<IdentityId> {
        let mut ids = if self.identities.is_empty() { IdentityId::ALL.to_vec() } else { self.identities.clone() };
        ids.sort();
        ids.dedup();
        ids
    }

    fn options(&self) -> ApplyOptions {
        ApplyOptions { route: self.route, cutoff: Cutoff { radius: self.cutoff_radius }, engine: EngineConfig::default() }
    }

    fn bump(&self, which: &str) -> BumpSpec {
        let d = self.grid.dim;
        let given = match which {
            "u" => &self.bumps.u,
            "u_prime" => &self.bumps.u_prime,
            _ => &self.bumps.v,
        };
        if let Some(b) = given {
            return b.clone();
        }
        match (which, d) {
            ("u", 1) => BumpSpec::gaussian(1.0, vec![0.5], vec![1.0]),
            ("u", _) => BumpSpec::gaussian(1.0, vec![0.0, 0.5], vec![1.0, 1.0]),
            (_, 1) => BumpSpec { poly: vec![1.0, 0.3], ..BumpSpec::gaussian(0.8, vec![0.2], vec![0.9]) },
            _ => BumpSpec { poly: vec![1.0, 0.3], ..BumpSpec::gaussian(0.8, vec![0.3, 0.2], vec![0.9, 0.9]) },
        }
    }

    /// Replaces the grid list from a `N=512,1024` override.
    pub fn apply_grid_override(&mut self, spec: &str) -> Result<()> {
        let list = spec
            .strip_prefix("N=")
            .ok_or_else(|| Error::Config(format!("grid override '{spec}' must look like N=512,1024")))?;
        let n: std::result::Result<Vec<usize>, _> = list.split(',').map(|s| s.trim().parse::<usize>()).collect();
        self.grid.n = n.map_err(|e| Error::Config(format!("grid override '{spec}': {e}")))?;
        self.validate()
    }
}

#[derive(Parser, Debug)]
#[command(name = "fracgreen", about = "Halfspace identity campaigns for nonsymmetric fractional multipliers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory, overrides the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent cases.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Replace the grid list, e.g. `N=512,1024`.
    #[arg(long = "grid-override", global = true)]
    pub grid_override: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the selected identities on every grid.
    Verify { config: PathBuf },
    /// Export f+ / f- slices and boundary-symbol tables.
    Decompose { config: PathBuf },
    /// Export weighted trace tables.
    Traces { config: PathBuf },
}

/// Process exit status: 0 all tolerances met, 2 a tolerance failed, 1 configuration or runtime error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Runtime = 1,
    Tolerance = 2,
}

pub fn run() -> ! {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            Exit::Runtime
        }
    };
    std::process::exit(code as i32)
}

pub fn dispatch(cli: &Cli) -> Result<Exit> {
    let path = match &cli.command {
        Command::Verify { config } | Command::Decompose { config } | Command::Traces { config } => config,
    };
    let mut cfg = CampaignConfig::load(path)?;
    if let Some(o) = &cli.grid_override {
        cfg.apply_grid_override(o)?;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Verify { .. } => cmd_verify(&cfg),
        Command::Decompose { .. } => cmd_decompose(&cfg),
        Command::Traces { .. } => cmd_traces(&cfg),
    })
}

fn grid_label(g: &Grid) -> String {
    format!("n={} N={} box={}", g.dim, g.n, g.xn_halfwidth())
}

fn case_error(id: &str, g: &Grid, e: Error) -> Error {
    Error::Config(format!("{id} on grid {}: {e}", grid_label(g)))
}

/// One identity on one grid, with the config's functions.
pub fn run_identity(cfg: &CampaignConfig, id: IdentityId, n: usize) -> Result<IdentityReport> {
    let sym = cfg.build_symbol()?;
    let g = Grid::new(cfg.grid.dim, n, cfg.grid.box_halfwidth)?;
    let opts = cfg.options();
    let v = Verifier::new(&sym, &g, opts)?;
    let td = v.td;
    let mc = MuConfig::default();
    let (bu, bp, bv) = (cfg.bump("u"), cfg.bump("u_prime"), cfg.bump("v"));
    let mf = |e: f64, b: &BumpSpec| make_mu_function(&g, e, b, C64::new(1.0, 0.0), &mc);
    let r = match id {
        IdentityId::Lemma41 => {
            let s = mf(0.0, &bu)?;
            let w = GridField::from_fn(&g, Support::RestrictedUpper, |xp, x| s.smooth(xp, x));
            v.lemma41(&w, &mf(td.mu, &bp)?)
        }
        IdentityId::IbpSpecial => v.ibp_special(&mf(td.mu, &bu)?, &mf(td.mu_star, &bp)?),
        IdentityId::IbpGeneral => v.ibp_general(&mf(td.mu, &bu)?, &mf(td.mu_star, &bp)?),
        IdentityId::ZeroIdentity => v.zero_identity(&mf(td.mu, &bu)?, &mf(td.mu_star, &bp)?),
        IdentityId::HalfwaysGreen => v.halfways_green(&mf(td.mu - 1.0, &bu)?, &mf(td.mu_star, &bv)?),
        IdentityId::FullGreen => {
            let q = reduced_symbol(&sym, &td, Some(opts.cutoff));
            let bs = boundary_jump_symbol(&wh_decompose(&q, &g, &WhConfig::default())?)?;
            v.full_green(&mf(td.mu - 1.0, &bu)?, &mf(td.mu_star - 1.0, &bv)?, Some(&bs))
        }
    };
    r.map_err(|e| case_error(id.as_str(), &g, e))
}

/// Row of the CSV summary.
#[derive(Serialize)]
struct CsvRow<'a> {
    identity_id: &'a str,
    preset: &'a str,
    a: f64,
    delta: f64,
    mu: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "box")]
    box_halfwidth: f64,
    lhs_re: f64,
    lhs_im: f64,
    rhs_re: f64,
    rhs_im: f64,
    abs_residual: f64,
    rel_residual: f64,
}

impl<'a> From<&'a IdentityReport> for CsvRow<'a> {
    fn from(r: &'a IdentityReport) -> Self {
        CsvRow {
            identity_id: r.identity_id.as_str(),
            preset: &r.preset,
            a: r.a,
            delta: r.delta,
            mu: r.mu,
            n: r.grid.n,
            box_halfwidth: r.grid.box_halfwidth,
            lhs_re: r.lhs.re,
            lhs_im: r.lhs.im,
            rhs_re: r.rhs.re,
            rhs_im: r.rhs.im,
            abs_residual: r.abs_residual,
            rel_residual: r.rel_residual,
        }
    }
}

pub fn write_reports(dir: &Path, reports: &[IdentityReport]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut jl = OpenOptions::new().create(true).append(true).open(dir.join("reports.jsonl"))?;
    for r in reports {
        writeln!(jl, "{}", serde_json::to_string(r)?)?;
    }
    let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(std::io::Error::from)?;
    for r in reports {
        w.serialize(CsvRow::from(r)).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

/// Relative defect of `L(alpha f + beta g) - alpha L f - beta L g` with seeded coefficients.
pub fn linearity_defect(cfg: &CampaignConfig, n: usize) -> Result<f64> {
    let sym = cfg.build_symbol()?;
    let td = compute_transmission(&sym)?;
    let g = Grid::new(cfg.grid.dim, n, cfg.grid.box_halfwidth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = || C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let (al, be) = (c(), c());
    let mc = MuConfig::default();
    let one = C64::new(1.0, 0.0);
    let f = make_mu_function(&g, td.mu, &cfg.bump("u"), one, &mc)?.field;
    let h = make_mu_function(&g, td.mu, &cfg.bump("u_prime"), one, &mc)?.field;
    let opts = cfg.options();
    let (mut fa, mut hb) = (f.clone(), h.clone());
    fa.scale(al);
    hb.scale(be);
    let lhs = apply_l(&sym, &fa.add(&hb)?, &opts)?;
    let (mut lf, mut lh) = (apply_l(&sym, &f, &opts)?, apply_l(&sym, &h, &opts)?);
    lf.scale(al);
    lh.scale(be);
    let rhs = lf.add(&lh)?;
    let (a, b) = (lhs.values(), rhs.values());
    let (mut d, mut m) = (0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(&b) {
        d = d.max((x - y).norm());
        m = m.max(y.norm());
    }
    Ok(d / m.max(f64::MIN_POSITIVE))
}

pub fn cmd_verify(cfg: &CampaignConfig) -> Result<Exit> {
    let sym = cfg.build_symbol()?;
    if let Some(mu) = cfg.mu_override {
        eprintln!("transmission residual at mu = {mu}: {:.3e}", check_mu_transmission(&sym, mu));
    }
    let ids = cfg.selected();
    let mut ns = cfg.grid.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let cases: Vec<(IdentityId, usize)> = ids.iter().flat_map(|&id| ns.iter().map(move |&n| (id, n))).collect();
    let results: Vec<((IdentityId, usize), Result<IdentityReport>)> =
        cases.par_iter().map(|&(id, n)| ((id, n), run_identity(cfg, id, n))).collect();
    let mut reports = vec![];
    let mut failed = false;
    let mut errors = vec![];
    for ((id, n), r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push(format!("{} at N={n}: {e}", id.as_str())),
        }
    }
    if !errors.is_empty() {
        return Err(Error::Config(errors.join("; ")));
    }
    reports.sort_by(|a, b| (a.identity_id, a.grid.n).cmp(&(b.identity_id, b.grid.n)));
    // observed order from consecutive grids
    for id in &ids {
        let idx: Vec<usize> = (0..reports.len()).filter(|&i| reports[i].identity_id == *id).collect();
        for w in idx.windows(2) {
            let (c, f) = (&reports[w[0]], &reports[w[1]]);
            let ratio = (c.grid.n as f64 / f.grid.n as f64).ln();
            if c.rel_residual > 0.0 && f.rel_residual > 0.0 {
                reports[w[1]].convergence_order = Some((f.rel_residual / c.rel_residual).ln() / ratio);
            }
        }
        if let Some(&last) = idx.last() {
            let r = &reports[last];
            let tol = cfg.tolerances.for_identity(*id);
            let g = Grid::new(cfg.grid.dim, r.grid.n, cfg.grid.box_halfwidth)?;
            if r.rel_residual > tol {
                failed = true;
                eprintln!("FAIL {} on grid {}: relative residual {:.3e} > {tol:.1e}", id.as_str(), grid_label(&g), r.rel_residual);
            } else {
                eprintln!("ok   {} on grid {}: relative residual {:.3e}", id.as_str(), grid_label(&g), r.rel_residual);
            }
        }
    }
    let lin = linearity_defect(cfg, ns[0])?;
    if lin > 1e-10 {
        failed = true;
        eprintln!("FAIL linearity on N={}: defect {lin:.3e}", ns[0]);
    }
    write_reports(&cfg.output_dir, &reports)?;
    Ok(if failed { Exit::Tolerance } else { Exit::Ok })
}

pub fn cmd_decompose(cfg: &CampaignConfig) -> Result<Exit> {
    let sym = cfg.build_symbol()?;
    let td = compute_transmission(&sym)?;
    let cut = Cutoff { radius: cfg.cutoff_radius };
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let mut failed = false;
    for &n in &cfg.grid.n {
        let g = Grid::new(cfg.grid.dim, n, cfg.grid.box_halfwidth)?;
        let q = reduced_symbol(&sym, &td, Some(cut));
        let wc = WhConfig { route_tol: cfg.tolerances.route_tol, ..WhConfig::default() };
        let dec = wh_decompose(&q, &g, &wc).map_err(|e| case_error("decompose", &g, e))?;
        let bs = boundary_jump_symbol(&dec).map_err(|e| case_error("decompose", &g, e))?;

        let mut w = csv::Writer::from_path(dir.join(format!("fpm_N{n}.csv"))).map_err(std::io::Error::from)?;
        w.write_record(["xi_p", "xi_n", "f_plus_re", "f_plus_im", "f_minus_re", "f_minus_im"]).map_err(std::io::Error::from)?;
        for (l, line) in dec.lines.iter().enumerate() {
            for k in 0..n {
                let rec = [g.xi_p(l), g.xi_n(k), line.f_plus[k].re, line.f_plus[k].im, line.f_minus[k].re, line.f_minus[k].im];
                w.write_record(rec.iter().map(|v| format!("{v:?}"))).map_err(std::io::Error::from)?;
            }
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join(format!("b_N{n}.csv"))).map_err(std::io::Error::from)?;
        w.write_record(["xi_p", "b_re", "b_im", "b_integral_re", "b_integral_im", "b_jump_re", "b_jump_im", "route_diff", "resolved"])
            .map_err(std::io::Error::from)?;
        let mut worst = 0.0f64;
        let mut checked = 0;
        for l in 0..dec.lines.len() {
            let (b, bi, bj) = (bs.b_vals[l], bs.b_quad[l], bs.b_jump[l]);
            let d = (bi - bj).norm() / dec.s0;
            if bs.resolved[l] {
                worst = worst.max(d);
                checked += 1;
            }
            let mut rec: Vec<String> = [g.xi_p(l), b.re, b.im, bi.re, bi.im, bj.re, bj.im, d].iter().map(|v| format!("{v:?}")).collect();
            rec.push(bs.resolved[l].to_string());
            w.write_record(&rec).map_err(std::io::Error::from)?;
        }
        w.flush()?;
        if checked == 0 {
            eprintln!("note decompose on grid {}: no tangential line is resolved, route checks skipped", grid_label(&g));
        }

        let checks = [
            ("b jump/integral routes", worst, cfg.tolerances.route_tol),
            ("half-line leak", dec.leak, cfg.tolerances.leak_tol),
        ];
        for (what, val, tol) in checks {
            let ok = val <= tol;
            failed |= !ok;
            eprintln!("{} decompose {what} on grid {}: {val:.3e} (tol {tol:.1e})", if ok { "ok  " } else { "FAIL" }, grid_label(&g));
        }
    }
    Ok(if failed { Exit::Tolerance } else { Exit::Ok })
}

pub fn cmd_traces(cfg: &CampaignConfig) -> Result<Exit> {
    let sym = cfg.build_symbol()?;
    let td = compute_transmission(&sym)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let mut failed = false;
    let tol = 1e-3;
    for &n in &cfg.grid.n {
        let g = Grid::new(cfg.grid.dim, n, cfg.grid.box_halfwidth)?;
        let u: MuFunction = make_mu_function(&g, td.mu - 1.0, &cfg.bump("u"), C64::new(1.0, 0.0), &MuConfig::default())
            .map_err(|e| case_error("traces", &g, e))?;
        let t0 = weighted_trace(&u, 0)?;
        let t0r = trace_via_order_reduction(&u, 0, &EngineConfig::default()).map_err(|e| case_error("traces", &g, e))?;
        let t1 = weighted_trace(&u, 1)?;
        let ex = expansion_terms(&u)?;
        let mut w = csv::Writer::from_path(dir.join(format!("traces_N{n}.csv"))).map_err(std::io::Error::from)?;
        w.write_record([
            "x_p", "gamma0_re", "gamma0_im", "gamma0_reduced_re", "gamma0_reduced_im", "gamma1_re", "gamma1_im",
            "phi0_re", "phi0_im", "phi1_re", "phi1_im",
        ])
        .map_err(std::io::Error::from)?;
        for i in 0..g.lines() {
            let (a, b, c, p0, p1) = (t0.values[i], t0r.values[i], t1.values[i], ex.phi0.values[i], ex.phi1.values[i]);
            let rec = [g.xp(i), a.re, a.im, b.re, b.im, c.re, c.im, p0.re, p0.im, p1.re, p1.im];
            w.write_record(rec.iter().map(|v| format!("{v:?}"))).map_err(std::io::Error::from)?;
        }
        w.flush()?;
        let scale = t0.max_abs().max(f64::MIN_POSITIVE);
        let d = t0.sub(&t0r).max_abs() / scale;
        let ok = d <= tol || t0.sub(&t0r).max_abs() <= 1e-12;
        failed |= !ok;
        eprintln!("{} trace routes on grid {}: {d:.3e} (tol {tol:.0e})", if ok { "ok  " } else { "FAIL" }, grid_label(&g));
    }
    Ok(if failed { Exit::Tolerance } else { Exit::Ok })
}
