//! The Riemannian-Lorentzian bridge.
//!
//! Given a unit vector field T, a metric of either signature has a sibling of
//! the opposite signature sharing the same Levi-Civita data along T:
//! `g_L = g - 2 T# ⊗ T#` and back `g = g_L + 2 T#_L ⊗ T#_L`. The transform
//! composes expression trees, so the sibling is a first-class [`MetricField`]
//! whose curvature can be evaluated with exact jets.

use crate::error::SiblingError;
use crate::expr::Expr;
use crate::geometry::{christoffel, Chart, Christoffel, MetricField, Signature, VectorFieldSpec};
use crate::jet::Jet1;
use crate::linalg::{jacobi_eigen, Matrix};
use crate::tensor::SymBilinear;

/// Tolerance on |g(T,T) - 1| when constructing a sibling.
const UNIT_TOL: f64 = 1e-8;
/// Near-dependence threshold in the Gram-Schmidt recipe.
const GS_TOL: f64 = 1e-8;
/// Shape-operator symmetry residual above which the spectrum is refused.
const SYMMETRY_TOL: f64 = 1e-6;

/// A Riemannian metric, its Lorentzian sibling, and the shared unit field.
#[derive(Debug, Clone, PartialEq)]
pub struct SiblingPair {
    pub g: MetricField,
    pub g_l: MetricField,
    pub t: VectorFieldSpec,
}

impl SiblingPair {
    /// Build the pair from a metric of either signature, deriving the other
    /// sibling symbolically. `check_points` are used to validate unit length
    /// and signatures.
    pub fn new(
        m: MetricField,
        t: VectorFieldSpec,
        check_points: &[Vec<f64>],
    ) -> Result<SiblingPair, SiblingError> {
        let other = sibling_metric(&m, &t, check_points)?;
        let (g, g_l) = match m.signature {
            Signature::Riemannian => (m, other),
            Signature::Lorentzian => (other, m),
        };
        Ok(SiblingPair { g, g_l, t })
    }

    pub fn chart(&self) -> &Chart {
        &self.g.chart
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }
}

/// The sibling transform: `m -/+ 2 (m T) ⊗ (m T)` with the sign chosen by
/// the input signature. Components are composed as expression trees.
pub fn sibling_metric(
    m: &MetricField,
    t: &VectorFieldSpec,
    check_points: &[Vec<f64>],
) -> Result<MetricField, SiblingError> {
    let n = m.dim();
    assert_eq!(t.dim(), n, "vector field over a different chart");

    // unit check: g(T,T) = +1 (riemannian) or -1 (lorentzian)
    let target = match m.signature {
        Signature::Riemannian => 1.0,
        Signature::Lorentzian => -1.0,
    };
    let mut worst = 0.0f64;
    let mut worst_point = Vec::new();
    for p in check_points {
        let g = m.eval(p)?;
        let tv = t.eval(p)?;
        let residual = (g.apply(&tv, &tv) - target).abs();
        if residual > worst {
            worst = residual;
            worst_point = p.clone();
        }
    }
    if worst > UNIT_TOL {
        return Err(SiblingError::NotUnit {
            residual: worst,
            point: worst_point,
        });
    }

    // T#_i = sum_j m_ij T^j as an AST
    let tflat: Vec<Expr> = (0..n)
        .map(|i| {
            let mut acc = Expr::constant(n, 0.0);
            for j in 0..n {
                acc = acc.add(&m.component(i, j).mul(&t.components[j]));
            }
            acc
        })
        .collect();

    let sign = match m.signature {
        Signature::Riemannian => -2.0,
        Signature::Lorentzian => 2.0,
    };
    let mut upper = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            upper.push(m.component(i, j).add(&tflat[i].mul(&tflat[j]).scale(sign)));
        }
    }
    let out = MetricField::from_upper(m.chart.clone(), upper, m.signature.flipped());
    for p in check_points {
        out.validate_signature(p).map_err(SiblingError::from)?;
    }
    Ok(out)
}

/// Residuals of the three defining properties of T (plus the symmetry of
/// `nabla T#`, which is equivalent to geodesic flow + integrability).
#[derive(Debug, Clone, PartialEq)]
pub struct TFieldReport {
    pub unit_residual: f64,
    pub geodesic_residual: f64,
    pub symmetry_residual: f64,
    pub integrability_residual: f64,
}

impl TFieldReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }

    pub fn max_residual(&self) -> f64 {
        self.unit_residual
            .max(self.geodesic_residual)
            .max(self.symmetry_residual)
            .max(self.integrability_residual)
    }
}

/// Pointwise data for a (metric, T) pair reused by several operations.
pub(crate) struct TPointData {
    pub g: SymBilinear,
    pub gamma: Christoffel,
    pub t_value: Vec<f64>,
    /// `dt[i][k] = d_i T^k`
    pub dt: Vec<Vec<f64>>,
    /// `nabla T#` as a full (possibly asymmetric) matrix.
    pub nabla_t_flat: Matrix,
    /// `(nabla_T T)^k`
    pub t_geodesic_defect: Vec<f64>,
    /// First-order jets of the lowered field T#.
    pub tflat_jets: Vec<Jet1>,
}

pub(crate) fn t_point_data(
    m: &MetricField,
    t: &VectorFieldSpec,
    p: &[f64],
) -> Result<TPointData, SiblingError> {
    let n = m.dim();
    let gjets = m.eval_jets(p)?;
    let gamma = christoffel(m, p)?;
    let tjets = t.eval_jets(p)?;
    let t_value: Vec<f64> = tjets.iter().map(|j| j.value).collect();
    let dt: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| tjets[k].grad[i]).collect())
        .collect();

    let nabla_t_flat = Matrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            let mut cov = dt[i][k];
            for l in 0..n {
                cov += gamma.get(k, i, l) * t_value[l];
            }
            s += gjets.g.get(j, k) * cov;
        }
        s
    });

    let t_geodesic_defect = gamma.covariant_derivative(&t_value, &t_value, &dt);

    // T#_j = g_jk T^k carried as a first-order jet
    let tflat_jets: Vec<Jet1> = (0..n)
        .map(|j| {
            let mut acc = Jet1::constant(n, 0.0);
            for k in 0..n {
                let gjet = m.component(j, k).eval_jet(p).map_err(crate::error::GeometryError::from)?;
                let g1 = Jet1::new(gjet.value, gjet.grad.clone());
                let t1 = Jet1::new(tjets[k].value, tjets[k].grad.clone());
                acc = acc.add(&g1.mul(&t1));
            }
            Ok::<_, SiblingError>(acc)
        })
        .collect::<Result<_, _>>()?;

    Ok(TPointData {
        g: gjets.g,
        gamma,
        t_value,
        dt,
        nabla_t_flat,
        t_geodesic_defect,
        tflat_jets,
    })
}

/// g-orthonormal basis of the complement of `t`: drop the coordinate vector
/// most parallel to T, project the rest, and run modified Gram-Schmidt in
/// fixed index order. Deterministic and smooth near generic points.
pub fn orthonormal_complement(g: &SymBilinear, t: &[f64]) -> Vec<Vec<f64>> {
    let n = t.len();
    let tflat = g.lower(t);
    let gtt = g.apply(t, t);
    let mut drop = 0;
    for i in 1..n {
        if tflat[i].abs() > tflat[drop].abs() {
            drop = i;
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i == drop {
            continue;
        }
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        let coeff = tflat[i] / gtt;
        for k in 0..n {
            w[k] -= coeff * t[k];
        }
        for b in &basis {
            let c = g.apply(&w, b);
            for k in 0..n {
                w[k] -= c * b[k];
            }
        }
        let norm2 = g.apply(&w, &w);
        if norm2 <= GS_TOL {
            continue;
        }
        let inv = 1.0 / norm2.sqrt();
        for x in &mut w {
            *x *= inv;
        }
        basis.push(w);
    }
    basis
}

/// Check T's unit length, geodesic flow, `nabla T#` symmetry, and the
/// integrability of the normal bundle over a sample set.
pub fn verify_t_properties(
    m: &MetricField,
    t: &VectorFieldSpec,
    samples: &[Vec<f64>],
) -> Result<TFieldReport, SiblingError> {
    let target = match m.signature {
        Signature::Riemannian => 1.0,
        Signature::Lorentzian => -1.0,
    };
    let mut unit = 0.0f64;
    let mut geod = 0.0f64;
    let mut symm = 0.0f64;
    let mut integ = 0.0f64;
    for p in samples {
        let d = t_point_data(m, t, p)?;
        unit = unit.max((d.g.apply(&d.t_value, &d.t_value) - target).abs());
        let defect_norm = d.g.apply(&d.t_geodesic_defect, &d.t_geodesic_defect).abs().sqrt();
        geod = geod.max(defect_norm);
        symm = symm.max(d.nabla_t_flat.asymmetry());

        // g(T,[X,Y]) = -dT#(X,Y) for frame fields of the normal bundle
        let frame = orthonormal_complement(&d.g, &d.t_value);
        let n = m.dim();
        for a in 0..frame.len() {
            for b in a + 1..frame.len() {
                let mut v = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let d_tflat = d.tflat_jets[j].grad[i] - d.tflat_jets[i].grad[j];
                        v += d_tflat * frame[a][i] * frame[b][j];
                    }
                }
                integ = integ.max(v.abs());
            }
        }
    }
    Ok(TFieldReport {
        unit_residual: unit,
        geodesic_residual: geod,
        symmetry_residual: symm,
        integrability_residual: integ,
    })
}

/// Full matrix of `nabla T# (X,Y) = g(nabla_X T, Y)` in coordinates;
/// symmetric exactly when T has geodesic flow and integrable normal bundle.
pub fn nabla_t_flat(
    m: &MetricField,
    t: &VectorFieldSpec,
    p: &[f64],
) -> Result<Matrix, SiblingError> {
    Ok(t_point_data(m, t, p)?.nabla_t_flat)
}

/// Eigenvalues and g-orthonormal eigenframe of the shape operator
/// `D: X -> nabla_X T` on the complement of T.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpectrum {
    pub point: Vec<f64>,
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvalues.len()` coordinate vectors spanning the complement of T.
    pub eigenframe: Vec<Vec<f64>>,
    pub t_value: Vec<f64>,
}

pub fn shape_spectrum(
    m: &MetricField,
    t: &VectorFieldSpec,
    p: &[f64],
) -> Result<ShapeSpectrum, SiblingError> {
    let d = t_point_data(m, t, p)?;
    let asym = d.nabla_t_flat.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(SiblingError::NotSymmetric(asym));
    }
    let frame = orthonormal_complement(&d.g, &d.t_value);
    let k = frame.len();
    let n = m.dim();
    // shape operator in the orthonormal frame, symmetrized
    let mut dmat = Matrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += frame[a][i] * d.nabla_t_flat.get(i, j) * frame[b][j];
                }
            }
            dmat.set(a, b, s);
        }
    }
    let sym = Matrix::from_fn(k, k, |a, b| 0.5 * (dmat.get(a, b) + dmat.get(b, a)));
    let (eigenvalues, vectors) = jacobi_eigen(&sym);
    let eigenframe: Vec<Vec<f64>> = (0..k)
        .map(|r| {
            let mut v = vec![0.0; n];
            for a in 0..k {
                for i in 0..n {
                    v[i] += vectors.get(r, a) * frame[a][i];
                }
            }
            v
        })
        .collect();
    Ok(ShapeSpectrum {
        point: p.to_vec(),
        eigenvalues,
        eigenframe,
        t_value: d.t_value,
    })
}

/// Residuals of the four covariant-derivative relations between the two
/// Levi-Civita connections, evaluated in the shape-operator eigenframe.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionReport {
    /// `nabla^L_T T = -nabla_T T`, both vanishing.
    pub t_geodesic: f64,
    /// `nabla^L_{X_i} T = nabla_{X_i} T`.
    pub frame_t: f64,
    /// `nabla^L_T X_i = nabla_T X_i`.
    pub t_frame: f64,
    /// `nabla^L_{X_i} X_j = 2 lambda_i delta_ij T + nabla_{X_i} X_j`.
    pub frame_frame: f64,
}

impl ConnectionReport {
    pub fn max_residual(&self) -> f64 {
        self.t_geodesic
            .max(self.frame_t)
            .max(self.t_frame)
            .max(self.frame_frame)
    }
}

/// The relations only constrain connection coefficients, so derivatives of
/// the frame fields cancel and everything is evaluated pointwise.
pub fn check_connection_relations(
    pair: &SiblingPair,
    p: &[f64],
) -> Result<ConnectionReport, SiblingError> {
    let n = pair.dim();
    let d = t_point_data(&pair.g, &pair.t, p)?;
    let gamma_l = christoffel(&pair.g_l, p)?;
    let spectrum = shape_spectrum(&pair.g, &pair.t, p)?;
    let tv = &d.t_value;
    let norm = |v: &[f64]| d.g.apply(v, v).abs().sqrt();

    // both covariant derivatives of the T field
    let nab_tt = &d.t_geodesic_defect;
    let nab_l_tt = gamma_l.covariant_derivative(tv, tv, &d.dt);
    let sum: Vec<f64> = nab_tt.iter().zip(&nab_l_tt).map(|(a, b)| a + b).collect();
    let t_geodesic = norm(nab_tt).max(norm(&nab_l_tt)).max(norm(&sum));

    let mut frame_t = 0.0f64;
    let mut t_frame = 0.0f64;
    let mut frame_frame = 0.0f64;
    let delta = |k: usize, a: usize, b: usize| gamma_l.get(k, a, b) - d.gamma.get(k, a, b);
    for (i, xi) in spectrum.eigenframe.iter().enumerate() {
        // nabla^L_X T - nabla_X T = X^a T^j (Gamma_L - Gamma)^k_aj
        let diff: Vec<f64> = (0..n)
            .map(|k| {
                let mut s = 0.0;
                for a in 0..n {
                    for j in 0..n {
                        s += xi[a] * tv[j] * delta(k, a, j);
                    }
                }
                s
            })
            .collect();
        frame_t = frame_t.max(norm(&diff));

        let diff: Vec<f64> = (0..n)
            .map(|k| {
                let mut s = 0.0;
                for a in 0..n {
                    for j in 0..n {
                        s += tv[a] * xi[j] * delta(k, a, j);
                    }
                }
                s
            })
            .collect();
        t_frame = t_frame.max(norm(&diff));

        for (j, xj) in spectrum.eigenframe.iter().enumerate() {
            let expected = if i == j { 2.0 * spectrum.eigenvalues[i] } else { 0.0 };
            let diff: Vec<f64> = (0..n)
                .map(|k| {
                    let mut s = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            s += xi[a] * xj[b] * delta(k, a, b);
                        }
                    }
                    s - expected * tv[k]
                })
                .collect();
            frame_frame = frame_frame.max(norm(&diff));
        }
    }

    Ok(ConnectionReport {
        t_geodesic,
        frame_t,
        t_frame,
        frame_frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Func;
    use crate::sample::halton_box;

    fn flat_chart(n: usize) -> Chart {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Chart::new(&refs, vec![-2.0; n], vec![2.0; n])
    }

    fn euclidean(n: usize) -> MetricField {
        let ones = (0..n).map(|_| Expr::constant(n, 1.0)).collect();
        MetricField::diagonal(flat_chart(n), ones, Signature::Riemannian)
    }

    fn unit_x0_field(n: usize, chart: Chart) -> VectorFieldSpec {
        let mut comps = vec![Expr::constant(n, 0.0); n];
        comps[0] = Expr::constant(n, 1.0);
        VectorFieldSpec::new(chart, comps)
    }

    #[test]
    fn flat_sibling_is_minkowski() {
        let g = euclidean(3);
        let t = unit_x0_field(3, g.chart.clone());
        let samples = halton_box(&g.chart, 10);
        let gl = sibling_metric(&g, &t, &samples).unwrap();
        assert_eq!(gl.signature, Signature::Lorentzian);
        let at = gl.eval(&[0.3, -1.0, 0.5]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = match (i, j) {
                    (0, 0) => -1.0,
                    _ if i == j => 1.0,
                    _ => 0.0,
                };
                assert!((at.get(i, j) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sibling_transform_is_an_involution() {
        let g = euclidean(3);
        let t = unit_x0_field(3, g.chart.clone());
        let samples = halton_box(&g.chart, 10);
        let gl = sibling_metric(&g, &t, &samples).unwrap();
        let back = sibling_metric(&gl, &t, &samples).unwrap();
        assert_eq!(back.signature, Signature::Riemannian);
        for p in &samples {
            let a = g.eval(p).unwrap();
            let b = back.eval(p).unwrap();
            assert!(a.sub(&b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn non_unit_field_is_rejected() {
        let g = euclidean(2);
        let mut comps = vec![Expr::constant(2, 0.0); 2];
        comps[0] = Expr::constant(2, 2.0);
        let t = VectorFieldSpec::new(g.chart.clone(), comps);
        let samples = halton_box(&g.chart, 5);
        assert!(matches!(
            sibling_metric(&g, &t, &samples),
            Err(SiblingError::NotUnit { .. })
        ));
    }

    #[test]
    fn parallel_field_passes_all_properties() {
        let g = euclidean(3);
        let t = unit_x0_field(3, g.chart.clone());
        let samples = halton_box(&g.chart, 20);
        let rep = verify_t_properties(&g, &t, &samples).unwrap();
        assert!(rep.max_residual() < 1e-12, "{rep:?}");
        let m = nabla_t_flat(&g, &t, &samples[0]).unwrap();
        assert_eq!(m.max_abs(), 0.0);
    }

    #[test]
    fn rotating_unit_field_fails_geodesic_and_symmetry() {
        // T = cos(x1^2) e0 + sin(x1^2) e1: unit everywhere, not geodesic
        let g = euclidean(3);
        let sq = Expr::coord(3, 1).powi(2);
        let comps = vec![
            sq.call(Func::Cos),
            sq.call(Func::Sin),
            Expr::constant(3, 0.0),
        ];
        let t = VectorFieldSpec::new(g.chart.clone(), comps);
        let samples = halton_box(&g.chart, 40);
        let rep = verify_t_properties(&g, &t, &samples).unwrap();
        assert!(rep.unit_residual < 1e-12);
        assert!(rep.geodesic_residual > 0.1, "{rep:?}");
        assert!(rep.symmetry_residual > 0.1, "{rep:?}");
    }

    #[test]
    fn parallel_field_spectrum_is_zero() {
        let g = euclidean(4);
        let t = unit_x0_field(4, g.chart.clone());
        let s = shape_spectrum(&g, &t, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(s.eigenvalues.len(), 3);
        for l in &s.eigenvalues {
            assert!(l.abs() < 1e-14);
        }
        // eigenframe is g-orthonormal and orthogonal to T
        for (i, v) in s.eigenframe.iter().enumerate() {
            let g_at = g.eval(&s.point).unwrap();
            assert!((g_at.apply(v, v) - 1.0).abs() < 1e-12);
            assert!(g_at.apply(v, &s.t_value).abs() < 1e-12);
            for w in s.eigenframe.iter().skip(i + 1) {
                assert!(g_at.apply(v, w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_connection_relations_vanish() {
        let g = euclidean(3);
        let t = unit_x0_field(3, g.chart.clone());
        let samples = halton_box(&g.chart, 5);
        let pair = SiblingPair::new(g, t, &samples).unwrap();
        let rep = check_connection_relations(&pair, &samples[0]).unwrap();
        assert!(rep.max_residual() < 1e-10, "{rep:?}");
    }

    #[test]
    fn gram_schmidt_recipe_is_frame_complete() {
        // a non-diagonal metric and an oblique unit field
        let chart = flat_chart(3);
        let g = MetricField::from_upper(
            chart.clone(),
            vec![
                Expr::constant(3, 2.0),
                Expr::constant(3, 0.5),
                Expr::constant(3, 0.0),
                Expr::constant(3, 1.5),
                Expr::constant(3, 0.25),
                Expr::constant(3, 1.0),
            ],
            Signature::Riemannian,
        );
        let gv = g.eval(&[0.0, 0.0, 0.0]).unwrap();
        let raw = [1.0, 1.0, 0.5];
        let norm = gv.apply(&raw, &raw).sqrt();
        let t: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        let basis = orthonormal_complement(&gv, &t);
        assert_eq!(basis.len(), 2);
        for (i, v) in basis.iter().enumerate() {
            assert!((gv.apply(v, v) - 1.0).abs() < 1e-12);
            assert!(gv.apply(v, &t).abs() < 1e-12);
            for w in basis.iter().skip(i + 1) {
                assert!(gv.apply(v, w).abs() < 1e-12);
            }
        }
    }
}
