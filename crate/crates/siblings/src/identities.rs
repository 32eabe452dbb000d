//! Numerical verification of the curvature identities relating a Riemannian
//! metric, its Lorentzian sibling, and the shared unit field T.
//!
//! Every check maps over a sample set (in parallel when the `parallel`
//! feature is on), evaluates both sides of an identity with exact jets, and
//! reduces to a scale-normalized max-norm residual. Hypothesis failures are
//! first-class errors, never skipped checks: the central identity is false
//! without them.

use serde::{Deserialize, Serialize};

use crate::error::{GalleryError, SiblingError};
use crate::expr::Expr;
use crate::geometry::{hessian, riemann_at, sectional, MetricField};
use crate::par::try_map;
use crate::sibling::{
    shape_spectrum, t_point_data, verify_t_properties, SiblingPair,
};
use crate::tensor::{kn_product, trace_with_metric, Curvature4, SymBilinear};

/// Residual tolerance below which T's hypotheses must hold before the
/// curvature identities are meaningful.
pub const T_HYPOTHESIS_TOL: f64 = 1e-6;

/// Aggregated residual of one identity over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub identity_name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub worst_point: Vec<f64>,
}

impl IdentityResult {
    fn from_residuals(
        name: &str,
        tolerance: f64,
        residuals: Vec<(f64, Vec<f64>)>,
    ) -> IdentityResult {
        let samples = residuals.len();
        let (max_residual, worst_point) = residuals
            .into_iter()
            .fold((0.0, Vec::new()), |(m, wp), (r, p)| {
                if r > m {
                    (r, p)
                } else {
                    (m, wp)
                }
            });
        IdentityResult {
            identity_name: name.into(),
            samples,
            max_residual,
            tolerance,
            passed: max_residual < tolerance,
            worst_point,
        }
    }
}

/// One-parameter least-squares fit of `Rm ~ 1/2 lambda g kn g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCurvatureFit {
    pub lambda_hat: f64,
    /// Scale-normalized max-norm of `Rm - 1/2 lambda_hat g kn g` over samples.
    pub residual: f64,
}

fn scaled(diff: &Curvature4, scale_source: f64) -> f64 {
    diff.max_abs() / (1.0 + scale_source)
}

fn require_t_hypotheses(pair: &SiblingPair, samples: &[Vec<f64>]) -> Result<(), SiblingError> {
    let rep = verify_t_properties(&pair.g, &pair.t, samples)?;
    if !rep.passes(T_HYPOTHESIS_TOL) {
        return Err(SiblingError::TPropertiesViolated {
            residual: rep.max_residual(),
        });
    }
    Ok(())
}

/// Symmetrized `nabla T#` at a point, as a symmetric 2-tensor.
fn shape_tensor(pair: &SiblingPair, p: &[f64]) -> Result<SymBilinear, SiblingError> {
    let d = t_point_data(&pair.g, &pair.t, p)?;
    let m = &d.nabla_t_flat;
    Ok(SymBilinear::from_fn(pair.dim(), |i, j| m.get(i, j)))
}

/// `Rm_L = Rm + nabla T# kn nabla T#`, the bridge between the two
/// curvature tensors.
pub fn check_proposition(
    pair: &SiblingPair,
    samples: &[Vec<f64>],
    tolerance: f64,
) -> Result<IdentityResult, SiblingError> {
    require_t_hypotheses(pair, samples)?;
    let residuals = try_map(samples, |p| {
        let rm = riemann_at(&pair.g, p)?.riemann;
        let rm_l = riemann_at(&pair.g_l, p)?.riemann;
        let shape = shape_tensor(pair, p)?;
        let kn = kn_product(&shape, &shape).map_err(crate::error::GeometryError::from)?;
        let diff = rm_l.sub(&rm).sub(&kn);
        let scale = rm_l.max_abs().max(rm.max_abs());
        Ok::<_, SiblingError>((scaled(&diff, scale), p.clone()))
    })?;
    Ok(IdentityResult::from_residuals(
        "proposition",
        tolerance,
        residuals,
    ))
}

/// Both routes of the space-form characterization: residual A is the
/// Riemannian-side formula
/// `Rm = 1/2 lambda g kn g - 2 lambda g kn (T# ⊗ T#) - nabla T# kn nabla T#`,
/// residual B is constant curvature of the sibling,
/// `Rm_L = 1/2 lambda g_L kn g_L`. The two must pass or fail together.
pub fn check_theorem_eq1(
    pair: &SiblingPair,
    lambda: f64,
    samples: &[Vec<f64>],
    tolerance: f64,
) -> Result<(IdentityResult, IdentityResult), SiblingError> {
    require_t_hypotheses(pair, samples)?;
    let residuals = try_map(samples, |p| {
        let pg = riemann_at(&pair.g, p)?;
        let tv = pair.t.eval(p)?;
        let tflat = pg.g.lower(&tv);
        let ttf = SymBilinear::outer(&tflat);
        let shape = shape_tensor(pair, p)?;
        let gg = kn_product(&pg.g, &pg.g).map_err(crate::error::GeometryError::from)?;
        let gt = kn_product(&pg.g, &ttf).map_err(crate::error::GeometryError::from)?;
        let ss = kn_product(&shape, &shape).map_err(crate::error::GeometryError::from)?;
        let diff_a = pg
            .riemann
            .sub(&gg.scale(0.5 * lambda))
            .add(&gt.scale(2.0 * lambda))
            .add(&ss);
        let res_a = scaled(&diff_a, pg.riemann.max_abs());

        let pgl = riemann_at(&pair.g_l, p)?;
        let gg_l = kn_product(&pgl.g, &pgl.g).map_err(crate::error::GeometryError::from)?;
        let diff_b = pgl.riemann.sub(&gg_l.scale(0.5 * lambda));
        let res_b = scaled(&diff_b, pgl.riemann.max_abs());
        Ok::<_, SiblingError>(((res_a, p.clone()), (res_b, p.clone())))
    })?;
    let (a, b): (Vec<_>, Vec<_>) = residuals.into_iter().unzip();
    Ok((
        IdentityResult::from_residuals("theorem-eq1-riemannian", tolerance, a),
        IdentityResult::from_residuals("theorem-eq1-lorentzian", tolerance, b),
    ))
}

/// Closed-form least squares for the best constant curvature.
pub fn fit_constant_curvature(
    m: &MetricField,
    samples: &[Vec<f64>],
) -> Result<ConstantCurvatureFit, SiblingError> {
    let per_point = try_map(samples, |p| {
        let pg = riemann_at(m, p)?;
        let half_gg = kn_product(&pg.g, &pg.g)
            .map_err(crate::error::GeometryError::from)?
            .scale(0.5);
        Ok::<_, SiblingError>((pg.riemann, half_gg))
    })?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (rm, k) in &per_point {
        num += rm.dot(k);
        den += k.dot(k);
    }
    let lambda_hat = if den == 0.0 { 0.0 } else { num / den };
    let mut residual = 0.0f64;
    for (rm, k) in &per_point {
        let diff = rm.sub(&k.scale(lambda_hat));
        residual = residual.max(scaled(&diff, rm.max_abs()));
    }
    Ok(ConstantCurvatureFit {
        lambda_hat,
        residual,
    })
}

/// `Ric = Ric_L + 2 Rm_L(T,.,.,T) - tr_g(nabla T# kn nabla T#)`, with the
/// trace contracting the outer slots against the inverse of g. Also asserts
/// `Ric(T,T) = Ric_L(T,T)` at the same tolerance.
pub fn check_ricci_relation(
    pair: &SiblingPair,
    samples: &[Vec<f64>],
    tolerance: f64,
) -> Result<IdentityResult, SiblingError> {
    require_t_hypotheses(pair, samples)?;
    let n = pair.dim();
    let residuals = try_map(samples, |p| {
        let pg = riemann_at(&pair.g, p)?;
        let pgl = riemann_at(&pair.g_l, p)?;
        let tv = pair.t.eval(p)?;
        let shape = shape_tensor(pair, p)?;
        let kn = kn_product(&shape, &shape).map_err(crate::error::GeometryError::from)?;
        let tr = trace_with_metric(&kn, &pg.g_inv, (0, 3))
            .map_err(crate::error::GeometryError::from)?;
        let sandwich = pgl.riemann.sandwich(&tv);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let lhs = pg.ricci.get(i, j);
                let rhs = pgl.ricci.get(i, j) + 2.0 * sandwich.get(i, j) - tr.get(i, j);
                worst = worst.max((lhs - rhs).abs());
            }
        }
        let tt = (pg.ricci.apply(&tv, &tv) - pgl.ricci.apply(&tv, &tv)).abs();
        let scale = 1.0 + pg.ricci.max_abs().max(pgl.ricci.max_abs());
        Ok::<_, SiblingError>((worst.max(tt) / scale, p.clone()))
    })?;
    Ok(IdentityResult::from_residuals(
        "ricci-relation",
        tolerance,
        residuals,
    ))
}

/// Outcome of the Bochner flow check along one integral curve of T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BochnerReport {
    pub result: IdentityResult,
    /// Smallest value of `-Ric(T,T) - (div T)^2/(n-1) - T(div T)` along the
    /// curve; the Schwarz inequality requires it to be >= -1e-8.
    pub min_inequality_gap: f64,
    /// Largest such value (zero in the umbilic case, strictly positive when
    /// the principal curvatures differ).
    pub max_inequality_gap: f64,
}

/// Flow-parameter step used when resampling integral curves of T.
pub const BOCHNER_FLOW_STEP: f64 = 1e-3;

/// Verifies `T(div T) = -Ric(T,T) - sum lambda_i^2` along an integral curve
/// of T and the Schwarz-inequality consequence
/// `T(div T) <= -Ric(T,T) - (div T)^2 / (n-1)`.
pub fn check_bochner(
    pair: &SiblingPair,
    start: &[f64],
    n_steps: usize,
    tolerance: f64,
) -> Result<BochnerReport, SiblingError> {
    let n = pair.dim();
    let g = &pair.g;
    let t = &pair.t;
    require_t_hypotheses(pair, std::slice::from_ref(&start.to_vec()))?;

    // first-order flow x' = T(x), classic RK4
    let mut points = vec![start.to_vec()];
    let mut x = start.to_vec();
    for _ in 0..n_steps {
        let k1 = t.eval(&x)?;
        let k2 = t.eval(&axpy(&x, 0.5 * BOCHNER_FLOW_STEP, &k1))?;
        let k3 = t.eval(&axpy(&x, 0.5 * BOCHNER_FLOW_STEP, &k2))?;
        let k4 = t.eval(&axpy(&x, BOCHNER_FLOW_STEP, &k3))?;
        for i in 0..n {
            x[i] += BOCHNER_FLOW_STEP / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !g.chart.contains(&x) {
            break;
        }
        points.push(x.clone());
    }
    if points.len() < 5 {
        return Err(SiblingError::Geometry(
            crate::error::GeometryError::SingularMetric { det: 0.0 },
        ));
    }

    // per-point data along the curve
    let data = try_map(&points, |p| {
        let d = t_point_data(g, t, p)?;
        let pg = riemann_at(g, p)?;
        let spectrum = shape_spectrum(g, t, p)?;
        let mut div_t = 0.0;
        for i in 0..n {
            for j in 0..n {
                div_t += pg.g_inv.get(i, j) * d.nabla_t_flat.get(i, j);
            }
        }
        let sum_sq: f64 = spectrum.eigenvalues.iter().map(|l| l * l).sum();
        let ric_tt = pg.ricci.apply(&d.t_value, &d.t_value);
        Ok::<_, SiblingError>((div_t, ric_tt, sum_sq, p.clone()))
    })?;

    let h = BOCHNER_FLOW_STEP;
    let mut residuals = Vec::new();
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    for i in 2..data.len() - 2 {
        // quartic 5-point stencil for d(div T)/ds
        let deriv = (-data[i + 2].0 + 8.0 * data[i + 1].0 - 8.0 * data[i - 1].0
            + data[i - 2].0)
            / (12.0 * h);
        let (_, ric_tt, sum_sq, ref p) = data[i];
        let rhs = -ric_tt - sum_sq;
        residuals.push(((deriv - rhs).abs(), p.clone()));

        let gap = -ric_tt - data[i].0 * data[i].0 / (n as f64 - 1.0) - deriv;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
    }
    let result = IdentityResult::from_residuals("bochner", tolerance, residuals);
    Ok(BochnerReport {
        result,
        min_inequality_gap: min_gap,
        max_inequality_gap: max_gap,
    })
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| xi + a * yi).collect()
}

/// Residual of `u(s) = (n-1) sqrt(lambda) tanh(sqrt(lambda) s + c)` against
/// the equality-case Riccati equation
/// `u' = (n-1) lambda - u^2/(n-1)`, with `u'` evaluated analytically.
pub fn riccati_residual(
    n: usize,
    lambda: f64,
    c: f64,
    s_grid: &[f64],
) -> Result<f64, GalleryError> {
    if n < 2 {
        return Err(GalleryError::BadParameters(format!(
            "Riccati check needs n >= 2, got {n}"
        )));
    }
    if lambda <= 0.0 {
        return Err(GalleryError::BadParameters(format!(
            "Riccati check needs lambda > 0, got {lambda}"
        )));
    }
    let amp = (n as f64 - 1.0) * lambda.sqrt();
    let mut worst = 0.0f64;
    for &s in s_grid {
        let arg = lambda.sqrt() * s + c;
        let u = amp * arg.tanh();
        let u_prime = (n as f64 - 1.0) * lambda * (1.0 - arg.tanh().powi(2));
        let rhs = (n as f64 - 1.0) * lambda - u * u / (n as f64 - 1.0);
        worst = worst.max((u_prime - rhs).abs());
    }
    Ok(worst)
}

/// Residual of the constant solutions `u = +/- (n-1) sqrt(lambda)`; exact
/// fixed points of the Riccati flow.
pub fn riccati_constant_residual(n: usize, lambda: f64, sign: f64) -> Result<f64, GalleryError> {
    if n < 2 || lambda <= 0.0 {
        return Err(GalleryError::BadParameters(
            "need n >= 2 and lambda > 0".into(),
        ));
    }
    let u = sign.signum() * (n as f64 - 1.0) * lambda.sqrt();
    let rhs = (n as f64 - 1.0) * lambda - u * u / (n as f64 - 1.0);
    Ok(rhs.abs())
}

/// Vanishing of the Bakry-Emery tensor at synthetic dimension 7/2 on a
/// pp-wave: `Ric_L + Hess u + 2 du ⊗ du = 0` (since `1/(7/2 - 4) = -2`).
pub fn check_bakry_emery(
    pair: &SiblingPair,
    samples: &[Vec<f64>],
    tolerance: f64,
) -> Result<IdentityResult, SiblingError> {
    let n = pair.dim();
    assert_eq!(n, 4, "Bakry-Emery check targets the (v,u,x,y) chart");
    let u_expr = Expr::coord(n, 1);
    let mut du = vec![0.0; n];
    du[1] = 1.0;
    let dudu = SymBilinear::outer(&du);
    let residuals = try_map(samples, |p| {
        let pgl = riemann_at(&pair.g_l, p)?;
        let hess_u = hessian(&pair.g_l, &u_expr, p)?;
        let total = pgl.ricci.add(&hess_u).add(&dudu.scale(2.0));
        let scale = 1.0 + pgl.ricci.max_abs();
        Ok::<_, SiblingError>((total.max_abs() / scale, p.clone()))
    })?;
    Ok(IdentityResult::from_residuals(
        "bakry-emery",
        tolerance,
        residuals,
    ))
}

/// The pp-wave integrability system on profiles over `(v,u,x,y)`:
/// `h_x = f_y`, `f f_x + h f_y - f_u = H_x/2`, `h h_y + f h_x - h_u = H_y/2`.
/// Profiles must not reference the `v` coordinate.
pub fn check_big3(
    f: &Expr,
    h: &Expr,
    big_h: &Expr,
    samples: &[Vec<f64>],
) -> Result<IdentityResult, GalleryError> {
    const U: usize = 1;
    const X: usize = 2;
    const Y: usize = 3;
    for (name, e) in [("f", f), ("h", h), ("H", big_h)] {
        if !e.independent_of(0) {
            return Err(GalleryError::BadParameters(format!(
                "profile `{name}` must not depend on v"
            )));
        }
    }
    let mut residuals = Vec::with_capacity(samples.len());
    for p in samples {
        let jf = f
            .eval_jet(p)
            .map_err(|e| GalleryError::BadParameters(e.to_string()))?;
        let jh = h
            .eval_jet(p)
            .map_err(|e| GalleryError::BadParameters(e.to_string()))?;
        let jbh = big_h
            .eval_jet(p)
            .map_err(|e| GalleryError::BadParameters(e.to_string()))?;
        let r1 = (jh.grad[X] - jf.grad[Y]).abs();
        let r2 = (jf.value * jf.grad[X] + jh.value * jf.grad[Y] - jf.grad[U]
            - 0.5 * jbh.grad[X])
            .abs();
        let r3 = (jh.value * jh.grad[Y] + jf.value * jh.grad[X] - jh.grad[U]
            - 0.5 * jbh.grad[Y])
            .abs();
        residuals.push((r1.max(r2).max(r3), p.clone()));
    }
    Ok(IdentityResult::from_residuals("big3", 1e-8, residuals))
}

/// Sectional curvatures in the shape-operator eigenframe:
/// planes containing T have curvature `-lambda`, planes `{X_i, X_j}` have
/// `lambda - 2 lambda_i lambda_j`.
pub fn check_remark1_sectionals(
    pair: &SiblingPair,
    lambda: f64,
    samples: &[Vec<f64>],
    tolerance: f64,
) -> Result<IdentityResult, SiblingError> {
    require_t_hypotheses(pair, samples)?;
    let residuals = try_map(samples, |p| {
        let pg = riemann_at(&pair.g, p)?;
        let spectrum = shape_spectrum(&pair.g, &pair.t, p)?;
        let mut worst = 0.0f64;
        for (i, xi) in spectrum.eigenframe.iter().enumerate() {
            let sec_t = sectional(&pg, &spectrum.t_value, xi)?;
            worst = worst.max((sec_t + lambda).abs());
            for (j, xj) in spectrum.eigenframe.iter().enumerate().skip(i + 1) {
                let sec_ij = sectional(&pg, xi, xj)?;
                let expect = lambda - 2.0 * spectrum.eigenvalues[i] * spectrum.eigenvalues[j];
                worst = worst.max((sec_ij - expect).abs());
            }
        }
        Ok::<_, SiblingError>((worst, p.clone()))
    })?;
    Ok(IdentityResult::from_residuals(
        "remark1-sectionals",
        tolerance,
        residuals,
    ))
}
