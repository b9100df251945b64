//! Numerical workbench for Green-type formulas of nonsymmetric homogeneous
//! Fourier multipliers on the halfspace `x_n > 0`, in one and two dimensions.

pub mod cli;
pub mod error;
pub mod grid;
pub mod jet;
pub mod muspace;
pub mod series;
pub mod special;
pub mod symbol;
pub mod verify;
pub mod wiener_hopf;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
