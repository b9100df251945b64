//! Truncated Taylor arithmetic in one variable.

#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order];
        if order > 0 {
            c[0] = v;
        }
        Jet(c)
    }

    /// The variable `x0 + t`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Jet::constant(x0, order);
        if order > 1 {
            j.0[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn from_poly(p: &[f64], order: usize) -> Self {
        let mut c = vec![0.0; order];
        for (k, v) in p.iter().enumerate().take(order) {
            c[k] = *v;
        }
        Jet(c)
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.order().min(o.order());
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }

    pub fn exp(&self) -> Jet {
        // e' = a' e, solved term by term
        let n = self.order();
        let mut e = vec![0.0; n];
        if n == 0 {
            return Jet(e);
        }
        e[0] = self.0[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.0[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}
