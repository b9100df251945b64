//! Centered-grid Fourier transforms.
//!
//! Physical samples sit at `x_j = (j - N/2) h`; spectra are in FFT order with
//! `F u(xi) = h sum_j u_j e^{-i xi x_j}`.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::Grid;

pub fn ifftshift<T: Copy>(v: &mut [T]) {
    let n = v.len();
    v.rotate_left(n / 2);
}

pub fn fftshift<T: Copy>(v: &mut [T]) {
    let n = v.len();
    v.rotate_right(n / 2);
}

/// Forward transform of one centered line in place.
pub fn forward_1d(planner: &mut FftPlanner<f64>, v: &mut [C64], h: f64) {
    ifftshift(v);
    planner.plan_fft_forward(v.len()).process(v);
    for x in v.iter_mut() {
        *x *= h;
    }
}

pub fn inverse_1d(planner: &mut FftPlanner<f64>, v: &mut [C64], h: f64) {
    planner.plan_fft_inverse(v.len()).process(v);
    let s = 1.0 / (v.len() as f64 * h);
    for x in v.iter_mut() {
        *x *= s;
    }
    fftshift(v);
}

fn along_tangential(grid: &Grid, data: &mut [C64], forward: bool) {
    if grid.dim == 1 {
        return;
    }
    let n = grid.n;
    let hp = grid.h(0);
    let mut planner = FftPlanner::new();
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        if forward {
            forward_1d(&mut planner, &mut col, hp);
        } else {
            inverse_1d(&mut planner, &mut col, hp);
        }
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

fn along_normal(grid: &Grid, data: &mut [C64], forward: bool) {
    let n = grid.n;
    let hn = grid.hn();
    let mut planner = FftPlanner::new();
    for row in data.chunks_mut(n) {
        if forward {
            forward_1d(&mut planner, row, hn);
        } else {
            inverse_1d(&mut planner, row, hn);
        }
    }
}

/// Physical values to line space (transform in `x'` only).
pub fn to_lines(grid: &Grid, values: &[C64]) -> Vec<C64> {
    let mut d = values.to_vec();
    along_tangential(grid, &mut d, true);
    d
}

pub fn from_lines(grid: &Grid, lines: &[C64]) -> Vec<C64> {
    let mut d = lines.to_vec();
    along_tangential(grid, &mut d, false);
    d
}

pub fn to_spectrum(grid: &Grid, values: &[C64]) -> Vec<C64> {
    let mut d = values.to_vec();
    along_normal(grid, &mut d, true);
    along_tangential(grid, &mut d, true);
    d
}

pub fn from_spectrum(grid: &Grid, spec: &[C64]) -> Vec<C64> {
    let mut d = spec.to_vec();
    along_tangential(grid, &mut d, false);
    along_normal(grid, &mut d, false);
    d
}

/// Line-space spectrum (transform in `x_n` of line-space data).
pub fn lines_to_spectrum(grid: &Grid, lines: &[C64]) -> Vec<C64> {
    let mut d = lines.to_vec();
    along_normal(grid, &mut d, true);
    d
}

pub fn spectrum_to_lines(grid: &Grid, spec: &[C64]) -> Vec<C64> {
    let mut d = spec.to_vec();
    along_normal(grid, &mut d, false);
    d
}

/// Tangential transform of a boundary array.
pub fn boundary_forward(grid: &Grid, v: &[C64]) -> Vec<C64> {
    let mut d = v.to_vec();
    if grid.dim == 2 {
        forward_1d(&mut FftPlanner::new(), &mut d, grid.h(0));
    }
    d
}

pub fn boundary_inverse(grid: &Grid, v: &[C64]) -> Vec<C64> {
    let mut d = v.to_vec();
    if grid.dim == 2 {
        inverse_1d(&mut FftPlanner::new(), &mut d, grid.h(0));
    }
    d
}
