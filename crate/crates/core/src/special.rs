//! Gamma-type helpers on the real line.

use statrs::function::gamma::gamma as sgamma;

pub fn is_nonpos_int(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-12
}

pub fn gamma(x: f64) -> f64 {
    if is_nonpos_int(x) {
        return f64::INFINITY;
    }
    sgamma(x)
}

/// Reciprocal gamma, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpos_int(x) {
        0.0
    } else {
        1.0 / sgamma(x)
    }
}

/// Generalized binomial coefficient `t choose m`.
pub fn binom(t: f64, m: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..m {
        b *= (t - i as f64) / (i as f64 + 1.0);
    }
    b
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_and_poles() {
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma(-0.5) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert_eq!(rgamma(-2.0), 0.0);
        assert!((binom(0.5, 2) + 0.125).abs() < 1e-15);
    }
}
