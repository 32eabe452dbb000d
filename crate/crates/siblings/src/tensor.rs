//! Pointwise multilinear algebra: symmetric 2-tensors, covariant 4-tensors
//! with Riemann symmetries, index contraction, and the Kulkarni-Nomizu
//! product.
//!
//! The Kulkarni-Nomizu sign convention is pinned so that, for a unit vector
//! `T` and unit `X` orthogonal to it,
//! `(g kn (T# ⊗ T#))(X,T,T,X) = +1` and `(1/2 g kn g)(X,T,T,X) = +1`.
//! With the curvature sign `Rm(a,b,c,d) = g(R(a,b)c, d)` this makes a space
//! form satisfy `Rm = 1/2 lambda g kn g` with sectional curvature `lambda`.

use crate::error::TensorError;
use crate::jet::{tri_index, tri_len};
use crate::linalg::Matrix;

/// Symmetric bilinear form at a point, stored as a packed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBilinear {
    dim: usize,
    data: Vec<f64>,
}

impl SymBilinear {
    pub fn zeros(dim: usize) -> SymBilinear {
        SymBilinear {
            dim,
            data: vec![0.0; tri_len(dim)],
        }
    }

    pub fn identity(dim: usize) -> SymBilinear {
        let mut s = SymBilinear::zeros(dim);
        for i in 0..dim {
            s.set(i, i, 1.0);
        }
        s
    }

    /// Build from any matrix function; entries are symmetrized as
    /// `(f(i,j) + f(j,i)) / 2` for off-diagonal pairs.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> SymBilinear {
        let mut s = SymBilinear::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = if i == j {
                    f(i, i)
                } else {
                    0.5 * (f(i, j) + f(j, i))
                };
                s.set(i, j, v);
            }
        }
        s
    }

    /// Rank-1 symmetric tensor `w ⊗ w`.
    pub fn outer(w: &[f64]) -> SymBilinear {
        SymBilinear::from_fn(w.len(), |i, j| w[i] * w[j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[tri_index(self.dim, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[tri_index(self.dim, i, j)] = v;
    }

    pub fn add(&self, o: &SymBilinear) -> SymBilinear {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &SymBilinear) -> SymBilinear {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> SymBilinear {
        SymBilinear {
            dim: self.dim,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    fn zip(&self, o: &SymBilinear, f: impl Fn(f64, f64) -> f64) -> SymBilinear {
        assert_eq!(self.dim, o.dim);
        SymBilinear {
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Evaluate on a pair of vectors.
    pub fn apply(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j) * u[i] * v[j];
            }
        }
        s
    }

    /// Lower a vector: `(self . v)_i = sum_j self_ij v^j`.
    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

/// Covariant 4-tensor with Riemann symmetries, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature4 {
    dim: usize,
    data: Vec<f64>,
}

impl Curvature4 {
    pub fn zeros(dim: usize) -> Curvature4 {
        Curvature4 {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let i = self.idx(a, b, c, d);
        self.data[i] = v;
    }

    pub fn add(&self, o: &Curvature4) -> Curvature4 {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Curvature4) -> Curvature4 {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Curvature4 {
        Curvature4 {
            dim: self.dim,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    fn zip(&self, o: &Curvature4, f: impl Fn(f64, f64) -> f64) -> Curvature4 {
        assert_eq!(self.dim, o.dim);
        Curvature4 {
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Frobenius inner product.
    pub fn dot(&self, o: &Curvature4) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| a * b).sum()
    }

    /// Evaluate on four vectors.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        s += self.get(a, b, c, d) * x[a] * y[b] * z[c] * w[d];
                    }
                }
            }
        }
        s
    }

    /// The symmetric 2-tensor `(Y,Z) -> R(V, Y, Z, V)` for a fixed vector V.
    pub fn sandwich(&self, v: &[f64]) -> SymBilinear {
        let n = self.dim;
        SymBilinear::from_fn(n, |y, z| {
            let mut s = 0.0;
            for a in 0..n {
                for d in 0..n {
                    s += self.get(a, y, z, d) * v[a] * v[d];
                }
            }
            s
        })
    }
}

/// Kulkarni-Nomizu product of two symmetric 2-tensors:
///
/// `(A kn B)(x,y,z,w) = A(x,w)B(y,z) + A(y,z)B(x,w) - A(x,z)B(y,w) - A(y,w)B(x,z)`
pub fn kn_product(a: &SymBilinear, b: &SymBilinear) -> Result<Curvature4, TensorError> {
    if a.dim() != b.dim() {
        return Err(TensorError::DimensionMismatch(a.dim(), b.dim()));
    }
    let n = a.dim();
    let mut out = Curvature4::zeros(n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let v = a.get(x, w) * b.get(y, z) + a.get(y, z) * b.get(x, w)
                        - a.get(x, z) * b.get(y, w)
                        - a.get(y, w) * b.get(x, z);
                    out.set(x, y, z, w, v);
                }
            }
        }
    }
    debug_assert!({
        let rep = check_riemann_symmetries(&out, 1e-12);
        rep.passed
    });
    Ok(out)
}

/// Contract two slots of a 4-tensor with the inverse metric.
///
/// With the default slots `(0, 3)` on a Riemann tensor this is the Ricci
/// tensor: `Ric(Y,Z) = g^{ab} R(e_a, Y, Z, e_b)`.
pub fn trace_with_metric(
    r: &Curvature4,
    g_inv: &SymBilinear,
    slots: (usize, usize),
) -> Result<SymBilinear, TensorError> {
    if r.dim() != g_inv.dim() {
        return Err(TensorError::DimensionMismatch(r.dim(), g_inv.dim()));
    }
    let n = r.dim();
    let (s0, s1) = slots;
    assert!(s0 < 4 && s1 < 4 && s0 != s1, "invalid contraction slots");
    let free: Vec<usize> = (0..4).filter(|s| *s != s0 && *s != s1).collect();
    Ok(SymBilinear::from_fn(n, |y, z| {
        let mut sum = 0.0;
        for a in 0..n {
            for b in 0..n {
                let gi = g_inv.get(a, b);
                if gi == 0.0 {
                    continue;
                }
                let mut idx = [0usize; 4];
                idx[s0] = a;
                idx[s1] = b;
                idx[free[0]] = y;
                idx[free[1]] = z;
                sum += gi * r.get(idx[0], idx[1], idx[2], idx[3]);
            }
        }
        sum
    }))
}

/// Max residuals of the three Riemann symmetry families, scale-normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// Antisymmetry in the first and in the last index pair.
    pub antisymmetry: f64,
    /// Pair symmetry `R(a,b,c,d) = R(c,d,a,b)`.
    pub pair_symmetry: f64,
    /// First Bianchi identity.
    pub first_bianchi: f64,
    pub passed: bool,
}

pub fn check_riemann_symmetries(r: &Curvature4, tol: f64) -> SymmetryReport {
    let n = r.dim();
    let mut anti = 0.0f64;
    let mut pair = 0.0f64;
    let mut bianchi = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = r.get(a, b, c, d);
                    anti = anti.max((v + r.get(b, a, c, d)).abs());
                    anti = anti.max((v + r.get(a, b, d, c)).abs());
                    pair = pair.max((v - r.get(c, d, a, b)).abs());
                    bianchi = bianchi
                        .max((v + r.get(b, c, a, d) + r.get(c, a, b, d)).abs());
                }
            }
        }
    }
    let scale = 1.0 + r.max_abs();
    let threshold = tol * scale;
    SymmetryReport {
        antisymmetry: anti,
        pair_symmetry: pair,
        first_bianchi: bianchi,
        passed: anti < threshold && pair < threshold && bianchi < threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kn_with_zero_is_zero() {
        let a = SymBilinear::from_fn(3, |i, j| (i + j) as f64 + 1.0);
        let b = SymBilinear::zeros(3);
        let r = kn_product(&a, &b).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn pinned_sign_convention_components() {
        // n=3, g = delta, T# = the first coordinate 1-form (slot 0)
        let g = SymBilinear::identity(3);
        let t = SymBilinear::outer(&[1.0, 0.0, 0.0]);
        let r = kn_product(&g, &t).unwrap();
        // (g kn T#⊗T#)(X_i, T, T, X_i) = +1; X_2 is slot 1
        assert_eq!(r.get(1, 0, 0, 1), 1.0);
        // half g kn g on the same plane
        let gg = kn_product(&g, &g).unwrap().scale(0.5);
        assert_eq!(gg.get(1, 0, 0, 1), 1.0);
    }

    #[test]
    fn shape_operator_square_component() {
        // A = diag(0, 2, 3): (A kn A)(X_i, X_j, X_j, X_i) = 2 lambda_i lambda_j
        let a = SymBilinear::from_fn(3, |i, j| {
            if i == j {
                [0.0, 2.0, 3.0][i]
            } else {
                0.0
            }
        });
        let r = kn_product(&a, &a).unwrap();
        assert_eq!(r.get(1, 2, 2, 1), 12.0);
    }

    #[test]
    fn rank_one_square_vanishes() {
        let w = [0.3, -1.7, 2.5, 0.9];
        let a = SymBilinear::outer(&w);
        let r = kn_product(&a, &a).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn constant_curvature_ricci() {
        // R = 1/2 g kn g on n=3, g = delta: Ric = (n-1) delta
        let g = SymBilinear::identity(3);
        let r = kn_product(&g, &g).unwrap().scale(0.5);
        let ric = trace_with_metric(&r, &g, (0, 3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { 0.0 };
                assert!((ric.get(i, j) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn trace_of_zero_is_zero() {
        let r = Curvature4::zeros(4);
        let g = SymBilinear::identity(4);
        let ric = trace_with_metric(&r, &g, (0, 3)).unwrap();
        assert_eq!(ric.max_abs(), 0.0);
    }

    #[test]
    fn symmetry_report_on_zero_and_kn() {
        let rep = check_riemann_symmetries(&Curvature4::zeros(3), 1e-12);
        assert_eq!(rep.antisymmetry, 0.0);
        assert_eq!(rep.pair_symmetry, 0.0);
        assert_eq!(rep.first_bianchi, 0.0);
        assert!(rep.passed);

        let a = SymBilinear::from_fn(4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let b = SymBilinear::from_fn(4, |i, j| ((i + 2 * j) % 3) as f64 + 0.5);
        let r = kn_product(&a, &b).unwrap();
        let rep = check_riemann_symmetries(&r, 1e-12);
        assert!(rep.passed);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = SymBilinear::identity(3);
        let b = SymBilinear::identity(4);
        assert!(matches!(
            kn_product(&a, &b),
            Err(TensorError::DimensionMismatch(3, 4))
        ));
    }
}
