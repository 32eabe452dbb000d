//! TOML run configuration and verification reports.
//!
//! A config names a geometry (gallery entry or inline metric), a sampling
//! plan, and the list of identity checks to run. Reports echo the config,
//! record one entry per check, and serialize back to TOML losslessly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::expr::Expr;
use crate::gallery::{self, GalleryEntry};
use crate::geometry::{Chart, MetricField, Signature, VectorFieldSpec};
use crate::identities::{
    check_bakry_emery, check_bochner, check_proposition, check_remark1_sectionals,
    check_ricci_relation, check_theorem_eq1, fit_constant_curvature, IdentityResult,
};
use crate::sample::{grid_box, halton_box};
use crate::sibling::{check_connection_relations, verify_t_properties, SiblingPair};

/// Default identity tolerance when the config does not set one.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Default sample count.
pub const DEFAULT_SAMPLES: usize = 100;
/// Integral-curve starts / steps used by the `bochner` check.
const BOCHNER_STARTS: usize = 5;
const BOCHNER_STEPS: usize = 400;

/// All check names accepted in `[checks] run`, in report order.
pub const CHECK_NAMES: [&str; 9] = [
    "t-properties",
    "proposition",
    "theorem-eq1",
    "ricci-relation",
    "remark1-sectionals",
    "constant-curvature-fit",
    "connection-relations",
    "bochner",
    "bakry-emery",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStrategy {
    Halton,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesConfig {
    #[serde(default = "default_strategy")]
    pub strategy: SampleStrategy,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_strategy() -> SampleStrategy {
    SampleStrategy::Halton
}

fn default_count() -> usize {
    DEFAULT_SAMPLES
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl Default for SamplesConfig {
    fn default() -> Self {
        SamplesConfig {
            strategy: SampleStrategy::Halton,
            count: DEFAULT_SAMPLES,
        }
    }
}

/// Inline metric given as a full matrix of expression strings. The matrix
/// must be symmetric *as written*: entry (i,j) and (j,i) must be the same
/// string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineGeometry {
    pub coords: Vec<String>,
    /// "riemannian" or "lorentzian" — the signature of the *given* metric.
    pub signature: String,
    pub metric: Vec<Vec<String>>,
    /// Components of the distinguished unit field T.
    pub t: Vec<String>,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Gallery entry name; mutually exclusive with `inline`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gallery: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<InlineGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Check names to run, in order; empty means the default set.
    #[serde(default)]
    pub run: Vec<String>,
    /// Expected constant curvature of the Lorentzian sibling, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            tolerance: DEFAULT_TOLERANCE,
            run: Vec::new(),
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub samples: SamplesConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
}

impl RunConfig {
    pub fn from_toml(source: &str) -> Result<RunConfig, ConfigError> {
        Ok(toml::from_str(source)?)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        RunConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Shorthand config that just names a gallery entry with its defaults.
    pub fn for_gallery(name: &str) -> RunConfig {
        RunConfig {
            geometry: GeometryConfig {
                gallery: Some(name.to_string()),
                parameters: BTreeMap::new(),
                inline: None,
            },
            samples: SamplesConfig::default(),
            checks: ChecksConfig::default(),
        }
    }
}

/// A config resolved into a live geometry plus its sample set.
pub struct Scenario {
    pub name: String,
    pub pair: SiblingPair,
    pub lambda: Option<f64>,
    pub samples: Vec<Vec<f64>>,
}

fn build_inline(inline: &InlineGeometry) -> Result<(SiblingPair, Vec<Vec<f64>>), ConfigError> {
    let n = inline.coords.len();
    let field = |f: &str, msg: String| ConfigError::Invalid {
        field: f.into(),
        message: msg,
    };
    if n == 0 {
        return Err(field("coords", "need at least one coordinate".into()));
    }
    if inline.metric.len() != n || inline.metric.iter().any(|row| row.len() != n) {
        return Err(field("metric", format!("expected a {n}x{n} matrix")));
    }
    if inline.t.len() != n {
        return Err(field("t", format!("expected {n} components")));
    }
    if inline.box_lo.len() != n || inline.box_hi.len() != n {
        return Err(field("box_lo/box_hi", format!("expected {n} bounds each")));
    }
    for (i, row) in inline.metric.iter().enumerate() {
        for (j, entry) in row.iter().enumerate().skip(i + 1) {
            if *entry != inline.metric[j][i] {
                return Err(ConfigError::AsymmetricMetric {
                    i: j,
                    j: i,
                    lower: inline.metric[j][i].clone(),
                    upper: entry.clone(),
                });
            }
        }
    }
    let signature = match inline.signature.as_str() {
        "riemannian" => Signature::Riemannian,
        "lorentzian" => Signature::Lorentzian,
        other => {
            return Err(field(
                "signature",
                format!("expected `riemannian` or `lorentzian`, got `{other}`"),
            ))
        }
    };
    let refs: Vec<&str> = inline.coords.iter().map(|s| s.as_str()).collect();
    let chart = Chart::new(&refs, inline.box_lo.clone(), inline.box_hi.clone());
    let mut upper = Vec::new();
    for i in 0..n {
        for j in i..n {
            upper.push(Expr::parse(&inline.metric[i][j], &refs)?);
        }
    }
    let metric = MetricField::from_upper(chart.clone(), upper, signature);
    let t_components = inline
        .t
        .iter()
        .map(|s| Expr::parse(s, &refs))
        .collect::<Result<Vec<_>, _>>()?;
    let t = VectorFieldSpec::new(chart.clone(), t_components);
    let samples = halton_box(&chart, DEFAULT_SAMPLES.min(50));
    Ok((SiblingPair::new(metric, t, &samples)?, samples))
}

/// Resolve a config into a [`Scenario`].
pub fn build_scenario(config: &RunConfig) -> Result<Scenario, ConfigError> {
    let (name, pair, lambda) = match (&config.geometry.gallery, &config.geometry.inline) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Invalid {
                field: "geometry".into(),
                message: "set either `gallery` or `inline`, not both".into(),
            })
        }
        (None, None) => {
            return Err(ConfigError::Invalid {
                field: "geometry".into(),
                message: "set one of `gallery` or `inline`".into(),
            })
        }
        (Some(g), None) => {
            let params: Vec<(String, f64)> = config
                .geometry
                .parameters
                .iter()
                .map(|(k, v)| (k.clone(), *v))
                .collect();
            let GalleryEntry {
                name, pair, lambda, ..
            } = gallery::by_name(g, &params)?;
            (name, pair, lambda)
        }
        (None, Some(inline)) => {
            let (pair, _) = build_inline(inline)?;
            ("inline".to_string(), pair, None)
        }
    };
    let samples = match config.samples.strategy {
        SampleStrategy::Halton => halton_box(pair.chart(), config.samples.count),
        SampleStrategy::Grid => grid_box(pair.chart(), config.samples.count),
    };
    Ok(Scenario {
        name,
        pair,
        lambda: config.checks.lambda.or(lambda),
        samples,
    })
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub worst_point: Vec<f64>,
}

impl CheckRecord {
    fn from_identity(r: IdentityResult) -> CheckRecord {
        CheckRecord {
            name: r.identity_name,
            passed: r.passed,
            samples: r.samples,
            max_residual: r.max_residual,
            tolerance: r.tolerance,
            detail: None,
            worst_point: r.worst_point,
        }
    }

    fn failure(name: &str, tolerance: f64, detail: String) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            passed: false,
            samples: 0,
            max_residual: f64::NAN,
            tolerance,
            detail: Some(detail),
            worst_point: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub geometry: String,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    /// Wall-clock seconds; the only non-deterministic field.
    pub wall_time_seconds: f64,
}

impl VerificationReport {
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_toml(source: &str) -> Result<VerificationReport, ConfigError> {
        Ok(toml::from_str(source)?)
    }
}

fn default_checks(lambda: Option<f64>) -> Vec<String> {
    let mut names = vec![
        "t-properties".to_string(),
        "proposition".to_string(),
        "ricci-relation".to_string(),
        "connection-relations".to_string(),
    ];
    if lambda.is_some() {
        names.insert(2, "theorem-eq1".to_string());
        names.push("remark1-sectionals".to_string());
        names.push("constant-curvature-fit".to_string());
    }
    names
}

fn need_lambda(name: &str) -> Result<(), ConfigError> {
    Err(ConfigError::Invalid {
        field: "checks.lambda".into(),
        message: format!("check `{name}` needs a constant curvature value"),
    })
}

fn run_one(
    name: &str,
    scenario: &Scenario,
    tol: f64,
) -> Result<Vec<CheckRecord>, ConfigError> {
    let pair = &scenario.pair;
    let samples = &scenario.samples;
    let lambda = scenario.lambda;
    let records = match name {
        "t-properties" => {
            let rep = verify_t_properties(&pair.g, &pair.t, samples)?;
            vec![CheckRecord {
                name: name.into(),
                passed: rep.passes(tol.max(1e-6)),
                samples: samples.len(),
                max_residual: rep.max_residual(),
                tolerance: tol.max(1e-6),
                detail: Some(format!(
                    "unit {:.3e}, geodesic {:.3e}, symmetry {:.3e}, integrability {:.3e}",
                    rep.unit_residual,
                    rep.geodesic_residual,
                    rep.symmetry_residual,
                    rep.integrability_residual
                )),
                worst_point: Vec::new(),
            }]
        }
        "proposition" => vec![CheckRecord::from_identity(check_proposition(
            pair, samples, tol,
        )?)],
        "theorem-eq1" => {
            let Some(l) = lambda else {
                return need_lambda(name).map(|_| Vec::new());
            };
            let (a, b) = check_theorem_eq1(pair, l, samples, tol)?;
            vec![CheckRecord::from_identity(a), CheckRecord::from_identity(b)]
        }
        "ricci-relation" => vec![CheckRecord::from_identity(check_ricci_relation(
            pair, samples, tol,
        )?)],
        "remark1-sectionals" => {
            let Some(l) = lambda else {
                return need_lambda(name).map(|_| Vec::new());
            };
            vec![CheckRecord::from_identity(check_remark1_sectionals(
                pair, l, samples, tol,
            )?)]
        }
        "constant-curvature-fit" => {
            let fit = fit_constant_curvature(&pair.g_l, samples)?;
            let lambda_ok = lambda.map_or(true, |l| (l - fit.lambda_hat).abs() < 1e-6);
            vec![CheckRecord {
                name: name.into(),
                passed: fit.residual < tol && lambda_ok,
                samples: samples.len(),
                max_residual: fit.residual,
                tolerance: tol,
                detail: Some(format!("lambda_hat = {:.12}", fit.lambda_hat)),
                worst_point: Vec::new(),
            }]
        }
        "connection-relations" => {
            let mut worst = 0.0f64;
            let mut worst_point = Vec::new();
            for p in samples {
                let rep = check_connection_relations(pair, p)?;
                if rep.max_residual() > worst {
                    worst = rep.max_residual();
                    worst_point = p.clone();
                }
            }
            vec![CheckRecord {
                name: name.into(),
                passed: worst < tol,
                samples: samples.len(),
                max_residual: worst,
                tolerance: tol,
                detail: None,
                worst_point,
            }]
        }
        "bochner" => {
            let tol_b = tol.max(1e-6);
            let mut worst = 0.0f64;
            let mut min_gap = f64::INFINITY;
            let mut count = 0;
            for start in samples.iter().take(BOCHNER_STARTS) {
                let rep = check_bochner(pair, start, BOCHNER_STEPS, tol_b)?;
                worst = worst.max(rep.result.max_residual);
                min_gap = min_gap.min(rep.min_inequality_gap);
                count += rep.result.samples;
            }
            vec![CheckRecord {
                name: name.into(),
                passed: worst < tol_b && min_gap > -1e-8,
                samples: count,
                max_residual: worst,
                tolerance: tol_b,
                detail: Some(format!("min inequality gap {min_gap:.3e}")),
                worst_point: Vec::new(),
            }]
        }
        "bakry-emery" => {
            if pair.dim() != 4 {
                return Err(ConfigError::Invalid {
                    field: "checks.run".into(),
                    message: "bakry-emery needs a 4-dimensional (v,u,x,y) chart".into(),
                });
            }
            vec![CheckRecord::from_identity(check_bakry_emery(
                pair, samples, tol,
            )?)]
        }
        other => return Err(ConfigError::UnknownCheck(other.to_string())),
    };
    Ok(records)
}

/// Execute every configured check. Hypothesis violations inside a check are
/// reported as failing records rather than aborting the run.
pub fn run_verification(config: &RunConfig) -> Result<VerificationReport, ConfigError> {
    let started = std::time::Instant::now();
    let scenario = build_scenario(config)?;
    let names = if config.checks.run.is_empty() {
        default_checks(scenario.lambda)
    } else {
        for n in &config.checks.run {
            if !CHECK_NAMES.contains(&n.as_str()) {
                return Err(ConfigError::UnknownCheck(n.clone()));
            }
        }
        config.checks.run.clone()
    };
    let tol = config.checks.tolerance;
    let mut checks = Vec::new();
    for name in &names {
        match run_one(name, &scenario, tol) {
            Ok(mut records) => checks.append(&mut records),
            Err(ConfigError::Sibling(e)) => {
                checks.push(CheckRecord::failure(name, tol, e.to_string()))
            }
            Err(e) => return Err(e),
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        geometry: scenario.name,
        config: config.clone(),
        checks,
        passed,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}
