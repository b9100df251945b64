//! Grid-level operations.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;

use super::engine::{apply, EngineConfig, Factor, Multiplier};
use super::{fft, BoundaryField, Grid, GridField, Support};
use crate::error::{Error, Result};

/// Plain FFT application `F^{-1} m F f` of the sampled values, no edge treatment.
pub fn fft_apply(f: &GridField, mult: &Multiplier) -> Result<GridField> {
    for fac in &mult.factors {
        if let Factor::Symbol(s) = fac {
            if s.cutoff.is_none() && !s.sym.is_order_reducing() {
                return Err(Error::Origin);
            }
        }
    }
    let g = &f.grid;
    let n = g.n;
    let mut spec = fft::to_spectrum(g, &f.values());
    for l in 0..g.lines() {
        let m = mult.line_values(g, l);
        for (v, mk) in spec[l * n..(l + 1) * n].iter_mut().zip(m) {
            *v *= mk;
        }
    }
    let support = match f.support {
        Support::SupportedUpper if mult.preserves_plus() => Support::SupportedUpper,
        Support::Whole => Support::Whole,
        _ => Support::RestrictedUpper,
    };
    let mut out = GridField::from_values(g, fft::from_spectrum(g, &spec), support)?;
    out.smooth_across = f.support == Support::Whole;
    if support == Support::SupportedUpper {
        out.leak = out.lower_mass();
    }
    Ok(out)
}

/// `Xi_+^t f`. Structured inputs go through the engine, plain ones through the FFT.
pub fn xi_plus(f: &GridField, t: f64, cfg: &EngineConfig) -> Result<GridField> {
    let m = Multiplier::xi_plus(t);
    if f.is_structured() {
        apply(&m, f, cfg)
    } else {
        fft_apply(f, &m)
    }
}

/// `r^+ Xi_-^t e^+ f` for a field known on `x_n >= 0`.
pub fn xi_minus_restricted(f: &GridField, t: f64, cfg: &EngineConfig) -> Result<GridField> {
    if f.support == Support::Whole {
        return Err(Error::Precondition("xi_minus_restricted needs a field on the upper halfspace".into()));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    apply(&Multiplier::xi_minus(t), f, cfg)
}

/// `int_{R^{n-1}} p conj(q) dx'`.
pub fn boundary_inner(p: &BoundaryField, q: &BoundaryField) -> Result<C64> {
    p.grid.check_same(&q.grid)?;
    let w = if p.grid.dim == 1 { 1.0 } else { p.grid.h(0) };
    Ok(p.values.iter().zip(&q.values).map(|(a, b)| a * b.conj()).sum::<C64>() * w)
}

/// `int p conj(q) dx'` evaluated from line-space data.
pub fn boundary_inner_lines(grid: &Grid, p: &[C64], q: &[C64]) -> C64 {
    p.iter().zip(q).map(|(a, b)| a * b.conj()).sum::<C64>() * grid.line_weight()
}

/// `partial_n f`: edge groups analytically, the remainder spectrally.
pub fn normal_derivative(f: &GridField) -> Result<GridField> {
    if !f.smooth_across {
        return Err(Error::Precondition("field has no edge structure near x_n = 0".into()));
    }
    let g = &f.grid;
    let n = g.n;
    let mut spec = fft::to_spectrum(g, &f.rem);
    for l in 0..g.lines() {
        for k in 0..n {
            spec[l * n + k] *= C64::new(0.0, g.xi_n(k));
        }
    }
    let mut out = f.clone();
    out.rem = fft::from_spectrum(g, &spec);
    out.groups = f.groups.iter().map(|gr| gr.derivative(g)).collect();
    Ok(out)
}

/// `Op(<xi'>^s)` on the boundary.
pub fn tangential_bessel(p: &BoundaryField, s: f64) -> BoundaryField {
    let g = &p.grid;
    let lines: Vec<C64> = p.to_lines().iter().enumerate().map(|(l, v)| v * g.bessel(l).powf(s)).collect();
    BoundaryField::from_lines(g, &lines)
}

pub fn dump_field_csv(path: &Path, f: &GridField) -> Result<()> {
    let g = &f.grid;
    let v = f.values();
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    if g.dim == 1 {
        writeln!(w, "x_n,re,im")?;
    } else {
        writeln!(w, "x_1,x_n,re,im")?;
    }
    for i in 0..g.lines() {
        for j in 0..g.n {
            let z = v[i * g.n + j];
            if g.dim == 1 {
                writeln!(w, "{:.12e},{:.16e},{:.16e}", g.xn(j), z.re, z.im)?;
            } else {
                writeln!(w, "{:.12e},{:.12e},{:.16e},{:.16e}", g.xp(i), g.xn(j), z.re, z.im)?;
            }
        }
    }
    Ok(())
}

pub fn dump_boundary_csv(path: &Path, p: &BoundaryField) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x_1,re,im")?;
    for (i, z) in p.values.iter().enumerate() {
        writeln!(w, "{:.12e},{:.16e},{:.16e}", p.grid.xp(i), z.re, z.im)?;
    }
    Ok(())
}
