//! Chart-based metric geometry: Christoffel symbols, Riemann/Ricci/scalar
//! curvature, covariant Hessians, and a fixed-step geodesic integrator.
//!
//! Curvature uses the sign convention `Rm(a,b,c,d) = g(R(a,b)c, d)` with
//! `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`, so a
//! round sphere of radius r has `Rm = 1/2 (1/r^2) g kn g` in the pinned
//! Kulkarni-Nomizu convention.
//!
//! Derivatives of the Christoffel symbols are obtained by evaluating the
//! Levi-Civita formula in first-order jet arithmetic with metric entries that
//! carry exact gradients and Hessians; no finite differencing is involved
//! anywhere in the curvature path.

use crate::error::GeometryError;
use crate::expr::Expr;
use crate::jet::{Jet1, Jet2};
use crate::linalg::{invert, jacobi_eigen, Matrix};
use crate::tensor::{check_riemann_symmetries, trace_with_metric, Curvature4, SymBilinear};

/// Determinant threshold below which a metric counts as singular.
pub const SINGULAR_DET_TOL: f64 = 1e-10;

/// Coordinate chart with a finite sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub coord_names: Vec<String>,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

impl Chart {
    pub fn new(names: &[&str], box_lo: Vec<f64>, box_hi: Vec<f64>) -> Chart {
        assert!(names.len() >= 2, "charts need dimension >= 2");
        assert_eq!(names.len(), box_lo.len());
        assert_eq!(names.len(), box_hi.len());
        let mut seen = std::collections::HashSet::new();
        for n in names {
            assert!(seen.insert(*n), "duplicate coordinate name `{n}`");
        }
        Chart {
            coord_names: names.iter().map(|s| s.to_string()).collect(),
            box_lo,
            box_hi,
        }
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.coord_names.iter().map(|s| s.as_str()).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.box_lo.iter().zip(&self.box_hi))
                .all(|(x, (lo, hi))| x >= lo && x <= hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

impl Signature {
    pub fn flipped(self) -> Signature {
        match self {
            Signature::Riemannian => Signature::Lorentzian,
            Signature::Lorentzian => Signature::Riemannian,
        }
    }

    /// Expected number of negative eigenvalues.
    fn negatives(self) -> usize {
        match self {
            Signature::Riemannian => 0,
            Signature::Lorentzian => 1,
        }
    }
}

/// Symmetric 2-tensor field given by closed-form components on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    pub chart: Chart,
    /// Packed upper triangle of component expressions.
    components: Vec<Expr>,
    pub signature: Signature,
}

impl MetricField {
    /// Build from the upper triangle listed row by row:
    /// `[g00, g01, .., g0n, g11, g12, ..]`.
    pub fn from_upper(chart: Chart, upper: Vec<Expr>, signature: Signature) -> MetricField {
        let n = chart.dim();
        assert_eq!(upper.len(), n * (n + 1) / 2);
        for e in &upper {
            assert_eq!(e.dim(), n, "component over wrong chart dimension");
        }
        MetricField {
            chart,
            components: upper,
            signature,
        }
    }

    /// Diagonal metric.
    pub fn diagonal(chart: Chart, diag: Vec<Expr>, signature: Signature) -> MetricField {
        let n = chart.dim();
        assert_eq!(diag.len(), n);
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                if i == j {
                    upper.push(diag[i].clone());
                } else {
                    upper.push(Expr::constant(n, 0.0));
                }
            }
        }
        MetricField::from_upper(chart, upper, signature)
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[crate::jet::tri_index(self.dim(), i, j)]
    }

    pub fn components_upper(&self) -> &[Expr] {
        &self.components
    }

    /// Component values at a point.
    pub fn eval(&self, p: &[f64]) -> Result<SymBilinear, GeometryError> {
        let n = self.dim();
        let mut g = SymBilinear::zeros(n);
        for i in 0..n {
            for j in i..n {
                g.set(i, j, self.component(i, j).eval(p)?);
            }
        }
        Ok(g)
    }

    /// Component jets (value, gradient, Hessian) at a point.
    pub fn eval_jets(&self, p: &[f64]) -> Result<MetricJets, GeometryError> {
        let n = self.dim();
        let mut jets = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                jets.push(self.component(i, j).eval_jet(p)?);
            }
        }
        MetricJets::new(n, jets)
    }

    /// Hard signature check via eigenvalue signs of g at `p`.
    pub fn validate_signature(&self, p: &[f64]) -> Result<(), GeometryError> {
        let g = self.eval(p)?;
        let (vals, _) = jacobi_eigen(&g.to_matrix());
        let negatives = vals.iter().filter(|v| **v < 0.0).count();
        if vals.iter().any(|v| v.abs() <= SINGULAR_DET_TOL) {
            return Err(GeometryError::SingularMetric {
                det: vals.iter().product(),
            });
        }
        if negatives != self.signature.negatives() {
            return Err(GeometryError::SignatureError {
                negative: negatives,
                dim: self.dim(),
            });
        }
        Ok(())
    }
}

/// Contravariant vector field with closed-form components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSpec {
    pub chart: Chart,
    pub components: Vec<Expr>,
}

impl VectorFieldSpec {
    pub fn new(chart: Chart, components: Vec<Expr>) -> VectorFieldSpec {
        assert_eq!(chart.dim(), components.len());
        VectorFieldSpec { chart, components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>, GeometryError> {
        self.components
            .iter()
            .map(|c| c.eval(p).map_err(GeometryError::from))
            .collect()
    }

    pub fn eval_jets(&self, p: &[f64]) -> Result<Vec<Jet2>, GeometryError> {
        self.components
            .iter()
            .map(|c| c.eval_jet(p).map_err(GeometryError::from))
            .collect()
    }
}

/// Metric component jets at a point, with the inverse metric and its
/// first derivatives precomputed.
pub struct MetricJets {
    pub dim: usize,
    jets: Vec<Jet2>,
    pub g: SymBilinear,
    pub g_inv: SymBilinear,
    pub det: f64,
    /// d_m of the inverse metric: `dginv[m]` is a full matrix.
    dginv: Vec<Matrix>,
}

impl MetricJets {
    fn new(dim: usize, jets: Vec<Jet2>) -> Result<MetricJets, GeometryError> {
        let mut g = SymBilinear::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                g.set(i, j, jets[crate::jet::tri_index(dim, i, j)].value);
            }
        }
        let (inv, det) = invert(&g.to_matrix())
            .ok_or(GeometryError::SingularMetric { det: 0.0 })?;
        if det.abs() <= SINGULAR_DET_TOL {
            return Err(GeometryError::SingularMetric { det });
        }
        let g_inv = SymBilinear::from_fn(dim, |i, j| inv.get(i, j));
        // d_m G^{-1} = -G^{-1} (d_m G) G^{-1}
        let mut dginv = Vec::with_capacity(dim);
        for m in 0..dim {
            let dg = Matrix::from_fn(dim, dim, |i, j| {
                jets[crate::jet::tri_index(dim, i, j)].grad[m]
            });
            let mut out = Matrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    let mut s = 0.0;
                    for a in 0..dim {
                        for b in 0..dim {
                            s += inv.get(i, a) * dg.get(a, b) * inv.get(b, j);
                        }
                    }
                    out.set(i, j, -s);
                }
            }
            dginv.push(out);
        }
        Ok(MetricJets {
            dim,
            jets,
            g,
            g_inv,
            det,
            dginv,
        })
    }

    #[inline]
    fn jet(&self, i: usize, j: usize) -> &Jet2 {
        &self.jets[crate::jet::tri_index(self.dim, i, j)]
    }

    /// `d_i g_{jl}` as a value.
    #[inline]
    pub fn dg(&self, i: usize, j: usize, l: usize) -> f64 {
        self.jet(j, l).grad[i]
    }

    /// `d_i g_{jl}` as a first-order jet (its gradient comes from the
    /// component Hessian).
    fn dg_jet(&self, i: usize, j: usize, l: usize) -> Jet1 {
        let jet = self.jet(j, l);
        let grad = (0..self.dim).map(|m| jet.hess(i, m)).collect();
        Jet1::new(jet.grad[i], grad)
    }

    fn ginv_jet(&self, i: usize, j: usize) -> Jet1 {
        let grad = (0..self.dim).map(|m| self.dginv[m].get(i, j)).collect();
        Jet1::new(self.g_inv.get(i, j), grad)
    }
}

/// Christoffel symbols `Gamma^k_{ij}` at a point (symmetric in i, j).
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    fn zeros(dim: usize) -> Christoffel {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(nabla_u v)^k` for point values `u`, `v` of vector fields, given the
    /// coordinate derivative matrix `dv[i][k] = d_i v^k` (pass zeros for a
    /// pointwise vector).
    pub fn covariant_derivative(&self, u: &[f64], v: &[f64], dv: &[Vec<f64>]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    s += u[i] * dv[i][k];
                    for j in 0..n {
                        s += self.get(k, i, j) * u[i] * v[j];
                    }
                }
                s
            })
            .collect()
    }
}

/// Christoffel symbols and their coordinate derivatives
/// `d Gamma[m][k][i][j] = d_m Gamma^k_{ij}`.
pub struct ChristoffelJet {
    pub gamma: Christoffel,
    dgamma: Vec<f64>,
}

impl ChristoffelJet {
    #[inline]
    pub fn d(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.gamma.dim;
        self.dgamma[((m * n + k) * n + i) * n + j]
    }
}

/// Levi-Civita connection coefficients at `p`.
pub fn christoffel(m: &MetricField, p: &[f64]) -> Result<Christoffel, GeometryError> {
    let jets = m.eval_jets(p)?;
    Ok(christoffel_from_jets(&jets))
}

fn christoffel_from_jets(jets: &MetricJets) -> Christoffel {
    let n = jets.dim;
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += jets.g_inv.get(k, l)
                        * (jets.dg(i, j, l) + jets.dg(j, i, l) - jets.dg(l, i, j));
                }
                let v = 0.5 * s;
                gamma.set(k, i, j, v);
                gamma.set(k, j, i, v);
            }
        }
    }
    gamma
}

/// Christoffel symbols together with their first derivatives, both exact
/// (the metric jets carry Hessians, so `d Gamma` needs no differencing).
pub fn christoffel_jet(m: &MetricField, p: &[f64]) -> Result<ChristoffelJet, GeometryError> {
    let jets = m.eval_jets(p)?;
    Ok(christoffel_jet_from(&jets))
}

fn christoffel_jet_from(jets: &MetricJets) -> ChristoffelJet {
    let n = jets.dim;
    let mut gamma = Christoffel::zeros(n);
    let mut dgamma = vec![0.0; n * n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = Jet1::constant(n, 0.0);
                for l in 0..n {
                    let bracket = jets
                        .dg_jet(i, j, l)
                        .add(&jets.dg_jet(j, i, l))
                        .sub(&jets.dg_jet(l, i, j));
                    acc = acc.add(&jets.ginv_jet(k, l).mul(&bracket));
                }
                let acc = acc.scale(0.5);
                gamma.set(k, i, j, acc.value);
                gamma.set(k, j, i, acc.value);
                for m in 0..n {
                    dgamma[((m * n + k) * n + i) * n + j] = acc.grad[m];
                    dgamma[((m * n + k) * n + j) * n + i] = acc.grad[m];
                }
            }
        }
    }
    ChristoffelJet { gamma, dgamma }
}

/// Full curvature record at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGeometry {
    pub point: Vec<f64>,
    pub g: SymBilinear,
    pub g_inv: SymBilinear,
    pub christoffel: Christoffel,
    pub riemann: Curvature4,
    pub ricci: SymBilinear,
    pub scalar: f64,
}

/// Riemann, Ricci, and scalar curvature at `p`.
pub fn riemann_at(m: &MetricField, p: &[f64]) -> Result<PointGeometry, GeometryError> {
    let jets = m.eval_jets(p)?;
    let cj = christoffel_jet_from(&jets);
    let n = jets.dim;
    let gamma = &cj.gamma;

    // R^m_{kij} = d_i Gamma^m_{jk} - d_j Gamma^m_{ik}
    //           + Gamma^m_{ip} Gamma^p_{jk} - Gamma^m_{jp} Gamma^p_{ik},
    // lowered with g: Rm_{ijkl} = g_{lm} R^m_{kij}.
    let mut riemann = Curvature4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for mm in 0..n {
                        let mut upper = cj.d(i, mm, j, k) - cj.d(j, mm, i, k);
                        for pidx in 0..n {
                            upper += gamma.get(mm, i, pidx) * gamma.get(pidx, j, k)
                                - gamma.get(mm, j, pidx) * gamma.get(pidx, i, k);
                        }
                        s += jets.g.get(l, mm) * upper;
                    }
                    riemann.set(i, j, k, l, s);
                }
            }
        }
    }

    let ricci = trace_with_metric(&riemann, &jets.g_inv, (0, 3))?;
    let mut scalar = 0.0;
    for a in 0..n {
        for b in 0..n {
            scalar += jets.g_inv.get(a, b) * ricci.get(a, b);
        }
    }

    debug_assert!(check_riemann_symmetries(&riemann, 1e-9).passed);

    Ok(PointGeometry {
        point: p.to_vec(),
        g: jets.g,
        g_inv: jets.g_inv,
        christoffel: gamma.clone(),
        riemann,
        ricci,
        scalar,
    })
}

/// Sectional curvature of the plane spanned by `u`, `v`.
pub fn sectional(pg: &PointGeometry, u: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
    let area = pg.g.apply(u, u) * pg.g.apply(v, v) - pg.g.apply(u, v).powi(2);
    if area.abs() <= 1e-10 {
        return Err(GeometryError::DegeneratePlane(area.abs()));
    }
    Ok(pg.riemann.apply(u, v, v, u) / area)
}

/// Covariant Hessian of a scalar field:
/// `Hess f (i,j) = d_i d_j f - Gamma^k_{ij} d_k f`.
pub fn hessian(m: &MetricField, f: &Expr, p: &[f64]) -> Result<SymBilinear, GeometryError> {
    let gamma = christoffel(m, p)?;
    let jf = f.eval_jet(p)?;
    let n = m.dim();
    Ok(SymBilinear::from_fn(n, |i, j| {
        let mut s = jf.hess(i, j);
        for k in 0..n {
            s -= gamma.get(k, i, j) * jf.grad[k];
        }
        s
    }))
}

/// Geodesic trajectory, one state per accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `(point, velocity)` at parameter `s = step * index`.
    pub states: Vec<(Vec<f64>, Vec<f64>)>,
    /// False when the integrator left the sampling box or hit a singular
    /// metric before finishing.
    pub completed: bool,
}

/// Classic fixed-step RK4 on the geodesic equation
/// `x''^k = -Gamma^k_{ij} x'^i x'^j`.
pub fn integrate_geodesic(
    m: &MetricField,
    p0: &[f64],
    v0: &[f64],
    step: f64,
    n_steps: usize,
) -> Result<Trajectory, GeometryError> {
    assert!(step > 0.0, "step must be positive");
    let accel = |x: &[f64], v: &[f64]| -> Result<Vec<f64>, GeometryError> {
        let gamma = christoffel(m, x)?;
        let n = m.dim();
        Ok((0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s -= gamma.get(k, i, j) * v[i] * v[j];
                    }
                }
                s
            })
            .collect())
    };
    rk4_second_order(p0, v0, step, n_steps, &m.chart, accel)
}

/// RK4 driver shared by the geodesic equation and flow-line integration.
pub(crate) fn rk4_second_order(
    p0: &[f64],
    v0: &[f64],
    step: f64,
    n_steps: usize,
    chart: &Chart,
    accel: impl Fn(&[f64], &[f64]) -> Result<Vec<f64>, GeometryError>,
) -> Result<Trajectory, GeometryError> {
    let n = p0.len();
    let mut x = p0.to_vec();
    let mut v = v0.to_vec();
    let mut states = vec![(x.clone(), v.clone())];
    for _ in 0..n_steps {
        let stage = |x: &[f64], v: &[f64]| -> Result<(Vec<f64>, Vec<f64>), GeometryError> {
            Ok((v.to_vec(), accel(x, v)?))
        };
        let advanced = (|| -> Result<(Vec<f64>, Vec<f64>), GeometryError> {
            let (k1x, k1v) = stage(&x, &v)?;
            let (k2x, k2v) = stage(
                &axpy(&x, 0.5 * step, &k1x),
                &axpy(&v, 0.5 * step, &k1v),
            )?;
            let (k3x, k3v) = stage(
                &axpy(&x, 0.5 * step, &k2x),
                &axpy(&v, 0.5 * step, &k2v),
            )?;
            let (k4x, k4v) = stage(&axpy(&x, step, &k3x), &axpy(&v, step, &k3v))?;
            let mut nx = vec![0.0; n];
            let mut nv = vec![0.0; n];
            for i in 0..n {
                nx[i] = x[i] + step / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                nv[i] = v[i] + step / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
            Ok((nx, nv))
        })();
        match advanced {
            Ok((nx, nv)) => {
                if !chart.contains(&nx) {
                    return Ok(Trajectory {
                        states,
                        completed: false,
                    });
                }
                x = nx;
                v = nv;
                states.push((x.clone(), v.clone()));
            }
            Err(GeometryError::SingularMetric { .. }) | Err(GeometryError::Eval(_)) => {
                return Ok(Trajectory {
                    states,
                    completed: false,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory {
        states,
        completed: true,
    })
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| xi + a * yi).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kn_product;

    fn euclidean(n: usize) -> MetricField {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let chart = Chart::new(&name_refs, vec![-10.0; n], vec![10.0; n]);
        let ones = (0..n).map(|_| Expr::constant(n, 1.0)).collect();
        MetricField::diagonal(chart, ones, Signature::Riemannian)
    }

    /// Round 2-sphere of radius r in polar coordinates (theta, phi).
    fn sphere(r: f64) -> MetricField {
        let chart = Chart::new(&["theta", "phi"], vec![0.2, 0.2], vec![2.9, 6.0]);
        let gtt = Expr::constant(2, r * r);
        let gpp = Expr::coord(2, 0)
            .call(crate::expr::Func::Sin)
            .powi(2)
            .scale(r * r);
        MetricField::diagonal(chart, vec![gtt, gpp], Signature::Riemannian)
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let m = euclidean(3);
        let gamma = christoffel(&m, &[0.3, -1.2, 2.0]).unwrap();
        assert_eq!(gamma.max_abs(), 0.0);
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let m = euclidean(3);
        let pg = riemann_at(&m, &[1.0, 2.0, -0.5]).unwrap();
        assert_eq!(pg.riemann.max_abs(), 0.0);
        assert_eq!(pg.ricci.max_abs(), 0.0);
        assert_eq!(pg.scalar, 0.0);
    }

    #[test]
    fn round_sphere_is_a_space_form() {
        for r in [1.0, 2.0] {
            let m = sphere(r);
            let lambda = 1.0 / (r * r);
            for p in [[0.7, 1.3], [1.9, 4.2], [2.5, 0.4]] {
                let pg = riemann_at(&m, &p).unwrap();
                let expected = kn_product(&pg.g, &pg.g).unwrap().scale(0.5 * lambda);
                let resid = pg.riemann.sub(&expected).max_abs();
                assert!(resid < 1e-9, "sphere residual {resid} at {p:?}");
                let rep = check_riemann_symmetries(&pg.riemann, 1e-10);
                assert!(rep.passed);
            }
        }
    }

    #[test]
    fn sphere_sectional_curvature_is_one() {
        let m = sphere(1.0);
        let pg = riemann_at(&m, &[1.1, 2.3]).unwrap();
        let k = sectional(&pg, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k - 1.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let m = euclidean(3);
        let pg = riemann_at(&m, &[0.0, 0.0, 0.0]).unwrap();
        let u = [1.0, 2.0, 0.0];
        assert!(matches!(
            sectional(&pg, &u, &u),
            Err(GeometryError::DegeneratePlane(_))
        ));
    }

    #[test]
    fn flat_hessian_of_square_norm() {
        let m = euclidean(3);
        let f = Expr::parse("x0^2 + x1^2 + x2^2", &["x0", "x1", "x2"]).unwrap();
        let h = hessian(&m, &f, &[0.4, -0.9, 1.7]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { 0.0 };
                assert!((h.get(i, j) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn flat_geodesics_are_straight_lines() {
        let m = euclidean(3);
        let p0 = [0.1, -0.2, 0.3];
        let v0 = [1.0, 0.5, -0.25];
        let traj = integrate_geodesic(&m, &p0, &v0, 0.01, 100).unwrap();
        assert!(traj.completed);
        let (x, v) = traj.states.last().unwrap();
        for i in 0..3 {
            assert!((x[i] - (p0[i] + v0[i])).abs() < 1e-12);
            assert!((v[i] - v0[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn geodesic_speed_is_conserved_on_the_sphere() {
        let m = sphere(1.0);
        let p0 = [1.2, 1.0];
        let v0 = [0.3, 0.7];
        let g0 = m.eval(&p0).unwrap();
        let speed0 = g0.apply(&v0, &v0);
        let traj = integrate_geodesic(&m, &p0, &v0, 1e-3, 1000).unwrap();
        for (x, v) in &traj.states {
            let g = m.eval(x).unwrap();
            let speed = g.apply(v, v);
            assert!((speed - speed0).abs() < 1e-6);
        }
    }

    #[test]
    fn geodesic_stops_at_the_box_edge() {
        let m = euclidean(2);
        let traj = integrate_geodesic(&m, &[9.5, 0.0], &[1.0, 0.0], 0.1, 100).unwrap();
        assert!(!traj.completed);
        assert!(traj.states.len() < 101);
    }

    #[test]
    fn signature_validation_catches_mismatch() {
        let chart = Chart::new(&["t", "x"], vec![-1.0, -1.0], vec![1.0, 1.0]);
        let m = MetricField::diagonal(
            chart,
            vec![Expr::constant(2, -1.0), Expr::constant(2, 1.0)],
            Signature::Riemannian,
        );
        assert!(matches!(
            m.validate_signature(&[0.0, 0.0]),
            Err(GeometryError::SignatureError { negative: 1, .. })
        ));
    }

    #[test]
    fn singular_metric_is_an_error() {
        let chart = Chart::new(&["x", "y"], vec![-1.0, -1.0], vec![1.0, 1.0]);
        let m = MetricField::diagonal(
            chart,
            vec![Expr::coord(2, 0), Expr::constant(2, 1.0)],
            Signature::Riemannian,
        );
        assert!(matches!(
            christoffel(&m, &[0.0, 0.0]),
            Err(GeometryError::SingularMetric { .. })
        ));
    }

    /// Jet-based Christoffels cross-checked against central differences of
    /// the metric on the sphere chart.
    #[test]
    fn christoffel_matches_finite_differences() {
        let m = sphere(1.5);
        let p = [1.3, 2.1];
        let gamma = christoffel(&m, &p).unwrap();
        let h = 1e-5;
        let n = 2;
        // finite-difference dg
        let mut dg = vec![SymBilinear::zeros(n); n];
        for a in 0..n {
            let mut pp = p;
            let mut pm = p;
            pp[a] += h;
            pm[a] -= h;
            let gp = m.eval(&pp).unwrap();
            let gm = m.eval(&pm).unwrap();
            dg[a] = gp.sub(&gm).scale(0.5 / h);
        }
        let g = m.eval(&p).unwrap();
        let (ginv, _) = invert(&g.to_matrix()).unwrap();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += ginv.get(k, l)
                            * (dg[i].get(j, l) + dg[j].get(i, l) - dg[l].get(i, j));
                    }
                    let expect = 0.5 * s;
                    assert!(
                        (gamma.get(k, i, j) - expect).abs() < 1e-6,
                        "Gamma^{k}_{i}{j}: jet {} vs fd {expect}",
                        gamma.get(k, i, j)
                    );
                }
            }
        }
    }
}
