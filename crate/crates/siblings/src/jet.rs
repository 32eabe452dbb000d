//! Truncated Taylor-jet arithmetic.
//!
//! [`Jet2`] carries a value together with its exact gradient and Hessian at a
//! point; composing jets through the usual calculus rules yields machine
//! precision first and second derivatives of any expression built from the
//! supported primitives. [`Jet1`] is the first-order analogue, used where only
//! one extra differentiation pass is needed (e.g. derivatives of Christoffel
//! symbols whose inputs already carry Hessians).

use crate::error::EvalError;

/// Index into the packed upper triangle of a symmetric `n x n` matrix.
#[inline]
pub fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

/// Number of entries in the packed upper triangle.
#[inline]
pub fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Second-order Taylor jet: value, gradient, and symmetric Hessian
/// (stored as a packed upper triangle).
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub dim: usize,
    pub value: f64,
    pub grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(dim: usize, value: f64) -> Self {
        Jet2 {
            dim,
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; tri_len(dim)],
        }
    }

    /// Seed jet for coordinate `index`: value `x`, unit gradient, zero Hessian.
    pub fn coordinate(dim: usize, index: usize, x: f64) -> Self {
        let mut j = Jet2::constant(dim, x);
        j.grad[index] = 1.0;
        j
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri_index(self.dim, i, j)]
    }

    #[inline]
    pub fn set_hess(&mut self, i: usize, j: usize, v: f64) {
        self.hess[tri_index(self.dim, i, j)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }

    pub fn neg(&self) -> Jet2 {
        Jet2 {
            dim: self.dim,
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }

    pub fn add(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            dim: self.dim,
            value: self.value + o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a + b),
            hess: zip(&self.hess, &o.hess, |a, b| a + b),
        }
    }

    pub fn sub(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            dim: self.dim,
            value: self.value - o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a - b),
            hess: zip(&self.hess, &o.hess, |a, b| a - b),
        }
    }

    pub fn mul(&self, o: &Jet2) -> Jet2 {
        let n = self.dim;
        let mut out = Jet2::constant(n, self.value * o.value);
        for i in 0..n {
            out.grad[i] = self.value * o.grad[i] + o.value * self.grad[i];
        }
        for i in 0..n {
            for j in i..n {
                let h = self.value * o.hess(i, j)
                    + o.value * self.hess(i, j)
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i];
                out.set_hess(i, j, h);
            }
        }
        out
    }

    pub fn div(&self, o: &Jet2) -> Result<Jet2, EvalError> {
        if o.value == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(self.mul(&o.recip()))
    }

    fn recip(&self) -> Jet2 {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    /// Compose with a scalar function given its value and first two
    /// derivatives at `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let n = self.dim;
        let mut out = Jet2::constant(n, f0);
        for i in 0..n {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..n {
            for j in i..n {
                out.set_hess(i, j, f1 * self.hess(i, j) + f2 * self.grad[i] * self.grad[j]);
            }
        }
        out
    }

    /// Integer power by binary exponentiation (exact jet products).
    pub fn powi(&self, e: i64) -> Result<Jet2, EvalError> {
        if e == 0 {
            return Ok(Jet2::constant(self.dim, 1.0));
        }
        if e < 0 {
            if self.value == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            return Ok(self.powi(-e)?.recip());
        }
        let mut base = self.clone();
        let mut acc: Option<Jet2> = None;
        let mut e = e as u64;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base),
                    None => base.clone(),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(acc.unwrap())
    }

    /// Real power via exp(p * ln x); requires a positive base.
    pub fn powf(&self, p: f64) -> Result<Jet2, EvalError> {
        if self.value <= 0.0 {
            return Err(EvalError::NonPositivePower(self.value));
        }
        Ok(self.ln()?.scale(p).exp())
    }

    pub fn scale(&self, c: f64) -> Jet2 {
        Jet2 {
            dim: self.dim,
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
            hess: self.hess.iter().map(|h| c * h).collect(),
        }
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Jet2 {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn sinh(&self) -> Jet2 {
        self.chain(self.value.sinh(), self.value.cosh(), self.value.sinh())
    }

    pub fn cosh(&self) -> Jet2 {
        self.chain(self.value.cosh(), self.value.sinh(), self.value.cosh())
    }

    pub fn tanh(&self) -> Jet2 {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Result<Jet2, EvalError> {
        if self.value <= 0.0 {
            return Err(EvalError::NonPositiveLog(self.value));
        }
        let v = self.value;
        Ok(self.chain(v.ln(), 1.0 / v, -1.0 / (v * v)))
    }

    pub fn sqrt(&self) -> Result<Jet2, EvalError> {
        if self.value <= 0.0 {
            return Err(EvalError::NonPositiveSqrt(self.value));
        }
        let s = self.value.sqrt();
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * self.value)))
    }

    pub fn abs(&self) -> Result<Jet2, EvalError> {
        if self.value == 0.0 {
            return Err(EvalError::AbsAtZero);
        }
        let sign = self.value.signum();
        Ok(self.chain(self.value.abs(), sign, 0.0))
    }
}

/// First-order jet: value plus gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Jet1 {
    pub fn constant(dim: usize, value: f64) -> Self {
        Jet1 {
            value,
            grad: vec![0.0; dim],
        }
    }

    /// Jet of a quantity whose value and gradient are already known
    /// (e.g. `d_i g_jl` from a [`Jet2`]'s gradient and Hessian rows).
    pub fn new(value: f64, grad: Vec<f64>) -> Self {
        Jet1 { value, grad }
    }

    pub fn add(&self, o: &Jet1) -> Jet1 {
        Jet1 {
            value: self.value + o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a + b),
        }
    }

    pub fn sub(&self, o: &Jet1) -> Jet1 {
        Jet1 {
            value: self.value - o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a - b),
        }
    }

    pub fn mul(&self, o: &Jet1) -> Jet1 {
        Jet1 {
            value: self.value * o.value,
            grad: self
                .grad
                .iter()
                .zip(&o.grad)
                .map(|(a, b)| self.value * b + o.value * a)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Jet1 {
        Jet1 {
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
        }
    }
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(v: f64, g: [f64; 2], h: [f64; 3]) -> Jet2 {
        let mut out = Jet2::constant(2, v);
        out.grad = g.to_vec();
        out.set_hess(0, 0, h[0]);
        out.set_hess(0, 1, h[1]);
        out.set_hess(1, 1, h[2]);
        out
    }

    #[test]
    fn leibniz_rule() {
        let f = j(2.0, [1.0, -3.0], [0.5, 2.0, 1.0]);
        let g = j(-1.5, [4.0, 0.25], [1.0, -1.0, 3.0]);
        let p = f.mul(&g);
        for i in 0..2 {
            let expect = f.value * g.grad[i] + g.value * f.grad[i];
            assert!((p.grad[i] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn coordinate_seed() {
        let x = Jet2::coordinate(3, 1, 7.0);
        assert_eq!(x.value, 7.0);
        assert_eq!(x.grad, vec![0.0, 1.0, 0.0]);
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(x.hess(i, k), 0.0);
            }
        }
    }

    #[test]
    fn powi_matches_mul_chain() {
        let x = Jet2::coordinate(1, 0, 2.0);
        let cubed = x.powi(3).unwrap();
        assert_eq!(cubed.value, 8.0);
        assert_eq!(cubed.grad[0], 12.0);
        assert_eq!(cubed.hess(0, 0), 12.0);
        let inv = x.powi(-2).unwrap();
        assert!((inv.value - 0.25).abs() < 1e-16);
        assert!((inv.grad[0] + 0.25).abs() < 1e-15);
        assert!((inv.hess(0, 0) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let one = Jet2::constant(1, 1.0);
        let zero = Jet2::constant(1, 0.0);
        assert!(one.div(&zero).is_err());
    }
}
