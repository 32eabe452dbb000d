//! Built-in example geometries, each wired into a full [`SiblingPair`].
//!
//! Entries are constructed deterministically from their parameters: the same
//! inputs always yield byte-identical expression trees and sampling boxes.

use crate::error::GalleryError;
use crate::expr::{Expr, Func};
use crate::geometry::{Chart, MetricField, Signature, VectorFieldSpec};
use crate::identities::check_big3;
use crate::sample::halton_box;
use crate::sibling::SiblingPair;

/// Dimension cap keeping nested-polar expression trees small.
const MAX_DIM: usize = 6;
/// Angle margin keeping samples away from polar coordinate singularities.
const POLE_MARGIN: f64 = 0.2;
/// Validation samples drawn when wiring a pair.
const VALIDATION_SAMPLES: usize = 25;

/// A named example geometry with its expected constant curvature (if any).
#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub parameters: Vec<(String, f64)>,
    pub pair: SiblingPair,
    /// Constant curvature of the Lorentzian sibling, when it is a space form.
    pub lambda: Option<f64>,
}

/// de Sitter spacetime as a warped product over a round sphere:
/// `g_L = -dt^2 + r^2 cosh^2(t/r) g_round`, `T = -d/dt`, and the Riemannian
/// sibling `g = dt^2 + r^2 cosh^2(t/r) g_round`.
pub fn de_sitter(n: usize, r: f64) -> Result<GalleryEntry, GalleryError> {
    if n < 3 {
        return Err(GalleryError::BadParameters(format!(
            "de Sitter needs dimension >= 3, got {n}"
        )));
    }
    if n > MAX_DIM {
        return Err(GalleryError::BadParameters(format!(
            "dimension capped at {MAX_DIM}, got {n}"
        )));
    }
    if r <= 0.0 {
        return Err(GalleryError::BadParameters(format!(
            "radius must be positive, got {r}"
        )));
    }
    let mut names: Vec<String> = vec!["t".into()];
    for i in 1..n {
        names.push(format!("th{i}"));
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut lo = vec![-2.0];
    let mut hi = vec![2.0];
    for _ in 1..n {
        lo.push(POLE_MARGIN);
        hi.push(std::f64::consts::PI - POLE_MARGIN);
    }
    let chart = Chart::new(&refs, lo, hi);

    // warp factor r cosh(t/r), squared
    let warp2 = Expr::coord(n, 0)
        .scale(1.0 / r)
        .call(Func::Cosh)
        .powi(2)
        .scale(r * r);
    let mut diag = vec![Expr::constant(n, 1.0)];
    for i in 1..n {
        // round-sphere factor: product of sin^2 over earlier angles
        let mut entry = warp2.clone();
        for j in 1..i {
            entry = entry.mul(&Expr::coord(n, j).call(Func::Sin).powi(2));
        }
        diag.push(entry);
    }
    let g = MetricField::diagonal(chart.clone(), diag, Signature::Riemannian);
    let mut t_comps = vec![Expr::constant(n, -1.0)];
    t_comps.extend((1..n).map(|_| Expr::constant(n, 0.0)));
    let t = VectorFieldSpec::new(chart.clone(), t_comps);
    let samples = halton_box(&chart, VALIDATION_SAMPLES);
    let pair = SiblingPair::new(g, t, &samples)?;
    Ok(GalleryEntry {
        name: "de-sitter".into(),
        parameters: vec![("n".into(), n as f64), ("r".into(), r)],
        pair,
        lambda: Some(1.0 / (r * r)),
    })
}

/// The 3-dimensional Einstein metric with `Ric_L = g_L`:
/// off-diagonal null form with `H(x1) = (x1 + a)^2 / 2` and
/// `T` the Lorentzian gradient of `f(x1) = sqrt(2) ln((x1 + a)/2)`.
pub fn example2(a: f64) -> Result<GalleryEntry, GalleryError> {
    let n = 3;
    let chart = Chart::new(
        &["x1", "x2", "x3"],
        vec![-a + 0.5, -2.0, -2.0],
        vec![-a + 4.0, 2.0, 2.0],
    );
    let x1a = Expr::coord(n, 0).add(&Expr::constant(n, a));
    let h = x1a.powi(2).scale(0.5);
    let zero = Expr::constant(n, 0.0);
    let upper = vec![
        zero.clone(),               // g11
        Expr::constant(n, 1.0),     // g12
        zero.clone(),               // g13
        h.clone(),                  // g22
        zero.clone(),               // g23
        h.scale(0.5),               // g33
    ];
    let g_l = MetricField::from_upper(chart.clone(), upper, Signature::Lorentzian);

    // f' = sqrt(2) / (x1 + a); T = grad_L f = (-(f'/2)(x1+a)^2, f', 0)
    let fprime = Expr::constant(n, std::f64::consts::SQRT_2).div(&x1a);
    let t = VectorFieldSpec::new(
        chart.clone(),
        vec![
            fprime.scale(-0.5).mul(&x1a.powi(2)),
            fprime,
            zero,
        ],
    );
    let samples = halton_box(&chart, VALIDATION_SAMPLES);
    let pair = SiblingPair::new(g_l, t, &samples)?;
    Ok(GalleryEntry {
        name: "example2".into(),
        parameters: vec![("a".into(), a)],
        pair,
        // Einstein with Ric_L = g_L; in dimension 3 that is sectional
        // curvature 1/(n-1) = 1/2.
        lambda: Some(0.5),
    })
}

/// pp-wave metric `H du^2 + 2 du dv + dx^2 + dy^2` on chart `(v,u,x,y)` with
/// `T = (H + f^2 + h^2 + 1)/2 d_v - d_u + f d_x + h d_y`. The profile
/// functions must satisfy the integrability system (checked, else
/// `Big3Violated`).
pub fn pp_wave(f: Expr, h: Expr, big_h: Expr) -> Result<GalleryEntry, GalleryError> {
    let n = 4;
    for e in [&f, &h, &big_h] {
        assert_eq!(e.dim(), n, "profiles must live on the (v,u,x,y) chart");
    }
    let chart = Chart::new(&["v", "u", "x", "y"], vec![-1.5; 4], vec![1.5; 4]);
    let samples = halton_box(&chart, VALIDATION_SAMPLES);

    let big3 = check_big3(&f, &h, &big_h, &samples)?;
    if !big3.passed {
        return Err(GalleryError::Big3Violated(big3.max_residual));
    }

    let zero = Expr::constant(n, 0.0);
    let one = Expr::constant(n, 1.0);
    let upper = vec![
        zero.clone(),  // g_vv
        one.clone(),   // g_vu
        zero.clone(),  // g_vx
        zero.clone(),  // g_vy
        big_h.clone(), // g_uu
        zero.clone(),  // g_ux
        zero.clone(),  // g_uy
        one.clone(),   // g_xx
        zero.clone(),  // g_xy
        one,           // g_yy
    ];
    let g_l = MetricField::from_upper(chart.clone(), upper, Signature::Lorentzian);

    let t0 = big_h
        .add(&f.powi(2))
        .add(&h.powi(2))
        .add(&Expr::constant(n, 1.0))
        .scale(0.5);
    let t = VectorFieldSpec::new(
        chart.clone(),
        vec![t0, Expr::constant(n, -1.0), f, h],
    );
    let pair = SiblingPair::new(g_l, t, &samples)?;
    Ok(GalleryEntry {
        name: "pp-wave".into(),
        parameters: vec![],
        pair,
        lambda: None,
    })
}

/// The plane wave `f = y, h = x, H = x^2 + y^2`; geodesically complete with
/// vanishing Bakry-Emery tensor at synthetic dimension 7/2.
pub fn plane_wave() -> Result<GalleryEntry, GalleryError> {
    let coords = ["v", "u", "x", "y"];
    let f = Expr::parse("y", &coords)?;
    let h = Expr::parse("x", &coords)?;
    let big_h = Expr::parse("x^2 + y^2", &coords)?;
    let mut entry = pp_wave(f, h, big_h)?;
    entry.name = "plane-wave".into();
    Ok(entry)
}

/// Flat product `R x R^{n-1}` with the parallel field `T = d/dt`.
pub fn flat_product(n: usize) -> Result<GalleryEntry, GalleryError> {
    if n < 2 {
        return Err(GalleryError::BadParameters(format!(
            "flat product needs dimension >= 2, got {n}"
        )));
    }
    if n > MAX_DIM {
        return Err(GalleryError::BadParameters(format!(
            "dimension capped at {MAX_DIM}, got {n}"
        )));
    }
    let mut names: Vec<String> = vec!["t".into()];
    for i in 1..n {
        names.push(format!("x{i}"));
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let chart = Chart::new(&refs, vec![-2.0; n], vec![2.0; n]);
    let ones = (0..n).map(|_| Expr::constant(n, 1.0)).collect();
    let g = MetricField::diagonal(chart.clone(), ones, Signature::Riemannian);
    let mut t_comps = vec![Expr::constant(n, 1.0)];
    t_comps.extend((1..n).map(|_| Expr::constant(n, 0.0)));
    let t = VectorFieldSpec::new(chart.clone(), t_comps);
    let samples = halton_box(&chart, VALIDATION_SAMPLES);
    let pair = SiblingPair::new(g, t, &samples)?;
    Ok(GalleryEntry {
        name: "flat-product".into(),
        parameters: vec![("n".into(), n as f64)],
        pair,
        lambda: Some(0.0),
    })
}

/// Names addressable from the CLI.
pub const GALLERY_NAMES: [&str; 5] = [
    "de-sitter",
    "example2",
    "plane-wave",
    "pp-wave",
    "flat-product",
];

/// Look up an entry by name with optional parameter overrides.
pub fn by_name(name: &str, params: &[(String, f64)]) -> Result<GalleryEntry, GalleryError> {
    let get = |key: &str, default: f64| -> f64 {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .unwrap_or(default)
    };
    match name {
        "de-sitter" => de_sitter(get("n", 3.0) as usize, get("r", 1.0)),
        "example2" => example2(get("a", 2.0)),
        "plane-wave" => plane_wave(),
        "pp-wave" => {
            // default profiles: f = y^2, h = 2xy, H = f^2 + h^2
            let coords = ["v", "u", "x", "y"];
            let f = Expr::parse("y^2", &coords)?;
            let h = Expr::parse("2*x*y", &coords)?;
            let big_h = Expr::parse("(y^2)^2 + (2*x*y)^2", &coords)?;
            pp_wave(f, h, big_h)
        }
        "flat-product" => flat_product(get("n", 3.0) as usize),
        other => Err(GalleryError::BadParameters(format!(
            "unknown gallery entry `{other}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sibling::verify_t_properties;

    #[test]
    fn de_sitter_rejects_bad_parameters() {
        assert!(de_sitter(2, 1.0).is_err());
        assert!(de_sitter(3, 0.0).is_err());
        assert!(de_sitter(7, 1.0).is_err());
    }

    #[test]
    fn de_sitter_pair_is_wired() {
        let e = de_sitter(3, 1.0).unwrap();
        assert_eq!(e.lambda, Some(1.0));
        let samples = halton_box(e.pair.chart(), 30);
        let rep = verify_t_properties(&e.pair.g, &e.pair.t, &samples).unwrap();
        assert!(rep.max_residual() < 1e-6, "{rep:?}");
        // sibling components satisfy g_L = g - 2 T# ⊗ T# as matrices
        for p in &samples {
            let g = e.pair.g.eval(p).unwrap();
            let gl = e.pair.g_l.eval(p).unwrap();
            let tv = e.pair.t.eval(p).unwrap();
            let tflat = g.lower(&tv);
            let expect = g.sub(&crate::tensor::SymBilinear::outer(&tflat).scale(2.0));
            assert!(gl.sub(&expect).max_abs() < 1e-12);
        }
    }

    #[test]
    fn example2_field_is_unit_timelike() {
        let e = example2(2.0).unwrap();
        let samples = halton_box(e.pair.chart(), 30);
        for p in &samples {
            let gl = e.pair.g_l.eval(p).unwrap();
            let tv = e.pair.t.eval(p).unwrap();
            assert!((gl.apply(&tv, &tv) + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn plane_wave_constructs_and_bad_profile_fails() {
        assert!(plane_wave().is_ok());
        let coords = ["v", "u", "x", "y"];
        let f = Expr::parse("y", &coords).unwrap();
        let h = Expr::parse("x", &coords).unwrap();
        let bad_h = Expr::parse("x^2", &coords).unwrap();
        assert!(matches!(
            pp_wave(f, h, bad_h),
            Err(GalleryError::Big3Violated(_))
        ));
    }

    #[test]
    fn flat_product_is_parallel() {
        let e = flat_product(3).unwrap();
        assert_eq!(e.lambda, Some(0.0));
        let p = vec![0.3, -0.7, 1.1];
        let m = crate::sibling::nabla_t_flat(&e.pair.g, &e.pair.t, &p).unwrap();
        assert_eq!(m.max_abs(), 0.0);
    }

    #[test]
    fn gallery_construction_is_deterministic() {
        let a = de_sitter(4, 2.0).unwrap();
        let b = de_sitter(4, 2.0).unwrap();
        assert_eq!(a.pair, b.pair);
    }
}
