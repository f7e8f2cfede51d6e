//! Declarative system configuration: JSON schema, validation with
//! field-path error messages, and the embedded presets.
//!
//! A config document fully determines a run: the metric, the affine maps,
//! the generator/gap pair used by the certificates, the iteration
//! parameters, and the seed set. Validation collects *all* problems before
//! reporting, so a config with three mistakes produces three messages, each
//! prefixed with the offending field path.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fhutch_core::compact::read_point_set;
use fhutch_core::metric::FKind;
use fhutch_core::{
    AffineMap, BMetric, FGenerator, IfsSystem, IterateParams, Point, PointSet, TauGenerator,
};

pub const PRESET_SIERPINSKI: &str = include_str!("../presets/sierpinski.json");
pub const PRESET_CANTOR: &str = include_str!("../presets/cantor.json");
pub const PRESET_SQUARE: &str = include_str!("../presets/square.json");

/// Raw document as written by the user. Field names and nesting mirror the
/// on-disk JSON exactly; semantic checks happen in [`parse_config`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub dimension: usize,
    pub metric: MetricSpec,
    pub maps: Vec<MapSpec>,
    #[serde(rename = "F")]
    pub f: FSpec,
    pub tau: TauSpec,
    pub iterate: IterateSpec,
    pub seed: SeedSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub kind: String,
    /// Snowflake exponent; only meaningful for `kind = "snowflake"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Optional declared relaxation constant, cross-checked against the
    /// kind (`1` for ordinary metrics, `2^(p-1)` for snowflakes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub matrix: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FSpec {
    pub kind: String,
    /// Tameness exponent; defaults to the kind's canonical value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSpec {
    /// `constant`, `expr`, or `auto` (gap derived from declared Lipschitz
    /// constants under the `log` generator).
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub liminf_floor: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateSpec {
    pub tol: f64,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<f64>,
}

/// Exactly one of the three fields must be present.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

/// A validated configuration, ready to run.
#[derive(Debug)]
pub struct SystemConfig {
    pub raw: RawConfig,
    pub system: IfsSystem,
    pub params: IterateParams,
    pub seed: PointSet,
}

impl SystemConfig {
    /// The accepted document as a JSON value. Re-parsing its text yields an
    /// equivalent system.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.raw).expect("config schema is plain data")
    }
}

/// All validation problems found in one pass, each tagged with the field
/// path that caused it.
#[derive(Debug)]
pub struct ConfigErrors(pub Vec<String>);

impl std::fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Resolve a `-c` argument: `preset:NAME` loads an embedded config, any
/// other value is read from disk.
pub fn load_config_text(arg: &str) -> Result<String, String> {
    if let Some(name) = arg.strip_prefix("preset:") {
        return match name {
            "sierpinski" => Ok(PRESET_SIERPINSKI.to_string()),
            "cantor" => Ok(PRESET_CANTOR.to_string()),
            "square" => Ok(PRESET_SQUARE.to_string()),
            other => Err(format!(
                "unknown preset `{other}` (expected sierpinski, cantor, or square)"
            )),
        };
    }
    fs::read_to_string(arg).map_err(|e| format!("cannot read config `{arg}`: {e}"))
}

/// Parse and validate a config document, reporting every problem found.
pub fn parse_config(text: &str) -> Result<SystemConfig, ConfigErrors> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| ConfigErrors(vec![format!("config: {e}")]))?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<SystemConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let dim = raw.dimension;
    if dim == 0 {
        errors.push("dimension: must be at least 1".to_string());
    }

    let metric = build_metric(&raw.metric, dim, &mut errors);
    let maps = build_maps(&raw.maps, dim, &mut errors);
    let f = build_f(&raw.f, &mut errors);
    validate_iterate(&raw.iterate, &mut errors);
    let seed = build_seed(&raw.seed, dim, &mut errors);

    // `auto` needs the finished system to derive its gap, so gap
    // construction happens in two stages.
    let tau_auto = raw.tau.kind == "auto";
    let tau = if tau_auto {
        validate_auto_tau(&raw.tau, &mut errors);
        TauGenerator::constant(1.0).ok()
    } else {
        build_tau(&raw.tau, &mut errors)
    };

    let (Some(metric), Some(f), Some(tau), Some(seed)) = (metric, f, tau, seed) else {
        return Err(ConfigErrors(errors));
    };
    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }

    let system = match IfsSystem::new(metric, maps, f, tau) {
        Ok(s) => s,
        Err(e) => return Err(ConfigErrors(vec![format!("maps: {e}")])),
    };
    let system = if tau_auto {
        match system.derived_log_tau() {
            Some(gap) => {
                let (metric, maps, f) = (system.metric().clone(), system.maps().to_vec(), *system.f());
                IfsSystem::new(metric, maps, f, gap).expect("rebuilding a valid system")
            }
            None => {
                return Err(ConfigErrors(vec![
                    "tau: auto needs the log generator, a euclidean-power metric, declared \
                     lipschitz constants on every map, and strictly contractive maps"
                        .to_string(),
                ]))
            }
        }
    } else {
        system
    };

    if seed.dim() != dim {
        return Err(ConfigErrors(vec![format!(
            "seed: dimension {} does not match config dimension {dim}",
            seed.dim()
        )]));
    }

    let params = IterateParams {
        tol: raw.iterate.tol,
        max_iter: raw.iterate.max_iter,
        cell: raw.iterate.cell,
    };
    Ok(SystemConfig { raw, system, params, seed })
}

fn build_metric(spec: &MetricSpec, dim: usize, errors: &mut Vec<String>) -> Option<BMetric> {
    let base = match spec.kind.as_str() {
        "euclidean" => Some(BMetric::Euclidean),
        "abs-diff" => {
            if dim != 1 {
                errors.push(format!(
                    "metric.kind: abs-diff is one-dimensional (dimension is {dim})"
                ));
            }
            Some(BMetric::AbsDiff)
        }
        "snowflake" => None,
        other => {
            errors.push(format!(
                "metric.kind: unknown kind `{other}` (expected euclidean, abs-diff, or snowflake)"
            ));
            return None;
        }
    };

    let metric = if spec.kind == "snowflake" {
        let Some(p) = spec.p else {
            errors.push("metric.p: snowflake needs an exponent p > 1".to_string());
            return None;
        };
        // Snowflakes of abs-diff and of euclidean coincide in 1-D; euclidean
        // is the base everywhere.
        match BMetric::snowflake(BMetric::Euclidean, p) {
            Ok(m) => m,
            Err(e) => {
                errors.push(format!("metric.p: {e}"));
                return None;
            }
        }
    } else {
        if spec.p.is_some() {
            errors.push("metric.p: only the snowflake kind takes an exponent".to_string());
        }
        base?
    };

    if let Some(declared) = spec.b {
        let expected = metric.b();
        if (declared - expected).abs() > 1e-12 {
            match &metric {
                BMetric::Snowflake { p, .. } => {
                    errors.push(format!("metric.b: expected 2^(p-1)={expected} for p={p}"))
                }
                _ => errors.push(format!("metric.b: expected {expected} for kind {}", spec.kind)),
            }
        }
    }
    Some(metric)
}

fn build_maps(specs: &[MapSpec], dim: usize, errors: &mut Vec<String>) -> Vec<AffineMap> {
    if specs.is_empty() {
        errors.push("maps: must be non-empty".to_string());
        return Vec::new();
    }
    let mut maps = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let shape_ok = spec.matrix.len() == dim && spec.matrix.iter().all(|r| r.len() == dim);
        if !shape_ok {
            errors.push(format!("maps[{i}].matrix: expected {dim} rows of {dim} entries"));
            continue;
        }
        if spec.translation.len() != dim {
            errors.push(format!("maps[{i}].translation: expected {dim} entries"));
            continue;
        }
        match AffineMap::new(spec.matrix.clone(), spec.translation.clone(), spec.lipschitz) {
            Ok(m) => maps.push(m),
            Err(e) => errors.push(format!("maps[{i}]: {e}")),
        }
    }
    maps
}

fn build_f(spec: &FSpec, errors: &mut Vec<String>) -> Option<FGenerator> {
    let Some(kind) = FKind::from_name(&spec.kind) else {
        let names: Vec<&str> = FKind::ALL.iter().map(|k| k.name()).collect();
        errors.push(format!(
            "F.kind: unknown generator `{}` (expected {})",
            spec.kind,
            names.join(", ")
        ));
        return None;
    };
    match spec.h {
        None => Some(FGenerator::with_default_h(kind)),
        Some(h) => match FGenerator::new(kind, h) {
            Ok(f) => Some(f),
            Err(e) => {
                errors.push(format!("F.h: {e}"));
                None
            }
        },
    }
}

fn build_tau(spec: &TauSpec, errors: &mut Vec<String>) -> Option<TauGenerator> {
    match spec.kind.as_str() {
        "constant" => {
            if spec.expr.is_some() {
                errors.push("tau.expr: a constant gap takes no expression".to_string());
            }
            let Some(c) = spec.c else {
                errors.push("tau.c: a constant gap needs a value".to_string());
                return None;
            };
            match TauGenerator::constant(c) {
                Ok(t) => Some(t),
                Err(e) => {
                    errors.push(format!("tau.c: {e}"));
                    None
                }
            }
        }
        "expr" => {
            if spec.c.is_some() {
                errors.push("tau.c: an expression gap takes no constant".to_string());
            }
            let Some(src) = &spec.expr else {
                errors.push("tau.expr: an expression gap needs a formula in t".to_string());
                return None;
            };
            match TauGenerator::from_expr(src, spec.liminf_floor) {
                Ok(t) => Some(t),
                Err(e) => {
                    errors.push(format!("tau.expr: {e}"));
                    None
                }
            }
        }
        other => {
            errors.push(format!(
                "tau.kind: unknown kind `{other}` (expected constant, expr, or auto)"
            ));
            None
        }
    }
}

fn validate_auto_tau(spec: &TauSpec, errors: &mut Vec<String>) {
    if spec.c.is_some() || spec.expr.is_some() {
        errors.push("tau: auto derives its gap and takes neither c nor expr".to_string());
    }
}

fn validate_iterate(spec: &IterateSpec, errors: &mut Vec<String>) {
    if !(spec.tol.is_finite() && spec.tol > 0.0) {
        errors.push("iterate.tol: must be positive and finite".to_string());
    }
    if spec.max_iter == 0 {
        errors.push("iterate.max_iter: must be at least 1".to_string());
    }
    if let Some(c) = spec.cell {
        if !(c.is_finite() && c > 0.0) {
            errors.push("iterate.cell: must be positive and finite".to_string());
        }
    }
}

fn build_seed(spec: &SeedSpec, dim: usize, errors: &mut Vec<String>) -> Option<PointSet> {
    let given = [spec.points.is_some(), spec.csv.is_some(), spec.preset.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        errors.push("seed: exactly one of points, csv, preset".to_string());
        return None;
    }

    if let Some(rows) = &spec.points {
        if rows.is_empty() {
            errors.push("seed.points: must be non-empty".to_string());
            return None;
        }
        let mut pts = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                errors.push(format!("seed.points[{i}]: expected {dim} coordinates"));
                return None;
            }
            match Point::new(row.clone()) {
                Ok(p) => pts.push(p),
                Err(e) => {
                    errors.push(format!("seed.points[{i}]: {e}"));
                    return None;
                }
            }
        }
        return match PointSet::new(pts) {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(format!("seed.points: {e}"));
                None
            }
        };
    }

    if let Some(path) = &spec.csv {
        let file = match fs::File::open(Path::new(path)) {
            Ok(f) => f,
            Err(e) => {
                errors.push(format!("seed.csv: cannot read `{path}`: {e}"));
                return None;
            }
        };
        return match read_point_set(BufReader::new(file)) {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(format!("seed.csv: {e}"));
                None
            }
        };
    }

    match spec.preset.as_deref() {
        Some("origin") => PointSet::from_rows(&[&vec![0.0; dim]]).ok(),
        Some("unit-interval") => {
            if dim != 1 {
                errors.push("seed.preset: unit-interval requires dimension 1".to_string());
                return None;
            }
            PointSet::from_rows(&[&[0.0], &[1.0]]).ok()
        }
        Some("unit-square") => {
            if dim != 2 {
                errors.push("seed.preset: unit-square requires dimension 2".to_string());
                return None;
            }
            PointSet::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).ok()
        }
        Some(other) => {
            errors.push(format!(
                "seed.preset: unknown preset `{other}` (expected origin, unit-interval, unit-square)"
            ));
            None
        }
        None => unreachable!("exactly-one check above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "dimension": 2,
            "metric": {"kind": "euclidean"},
            "maps": [
                {"matrix": [[0.5, 0.0], [0.0, 0.5]], "translation": [0.0, 0.0]},
                {"matrix": [[0.5, 0.0], [0.0, 0.5]], "translation": [0.5, 0.0]},
                {"matrix": [[0.5, 0.0], [0.0, 0.5]], "translation": [0.25, 0.5]}
            ],
            "F": {"kind": "log", "h": 0.5},
            "tau": {"kind": "constant", "c": 0.6},
            "iterate": {"tol": 0.01, "max_iter": 50, "cell": 0.01},
            "seed": {"preset": "origin"}
        })
    }

    #[test]
    fn minimal_config_builds_a_three_map_system() {
        let cfg = parse_config(&minimal().to_string()).unwrap();
        assert_eq!(cfg.system.maps().len(), 3);
        assert_eq!(cfg.system.dim(), 2);
        assert_eq!(cfg.params.max_iter, 50);
        assert_eq!(cfg.seed.len(), 1);
    }

    #[test]
    fn zero_maps_is_a_named_error() {
        let mut doc = minimal();
        doc["maps"] = serde_json::json!([]);
        let err = parse_config(&doc.to_string()).unwrap_err();
        assert!(err.0.iter().any(|e| e == "maps: must be non-empty"), "{err}");
    }

    #[test]
    fn snowflake_with_wrong_declared_b_is_rejected() {
        let mut doc = minimal();
        doc["metric"] = serde_json::json!({"kind": "snowflake", "p": 2.0, "b": 3.0});
        let err = parse_config(&doc.to_string()).unwrap_err();
        assert!(
            err.0.iter().any(|e| e.starts_with("metric.b: expected 2^(p-1)=2")),
            "{err}"
        );
    }

    #[test]
    fn all_errors_are_collected_in_one_pass() {
        let mut doc = minimal();
        doc["maps"] = serde_json::json!([]);
        doc["F"] = serde_json::json!({"kind": "nope"});
        doc["iterate"]["tol"] = serde_json::json!(-1.0);
        let err = parse_config(&doc.to_string()).unwrap_err();
        assert!(err.0.len() >= 3, "three independent mistakes, three messages: {err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut doc = minimal();
        doc["surprise"] = serde_json::json!(1);
        let err = parse_config(&doc.to_string()).unwrap_err();
        assert!(err.0[0].contains("unknown field"), "{err}");
    }

    #[test]
    fn auto_gap_derives_from_declared_lipschitz() {
        let mut doc = minimal();
        doc["maps"].as_array_mut().unwrap().iter_mut().for_each(|m| {
            m["lipschitz"] = serde_json::json!(0.5);
        });
        doc["tau"] = serde_json::json!({"kind": "auto"});
        let cfg = parse_config(&doc.to_string()).unwrap();
        let gap = cfg.system.tau().as_constant().expect("auto derives a constant");
        assert!((gap - (2.0_f64.ln() - 1e-3)).abs() < 1e-12, "gap {gap}");
    }

    #[test]
    fn auto_gap_without_lipschitz_is_an_error() {
        let mut doc = minimal();
        doc["tau"] = serde_json::json!({"kind": "auto"});
        let err = parse_config(&doc.to_string()).unwrap_err();
        assert!(err.0[0].starts_with("tau: auto needs"), "{err}");
    }

    #[test]
    fn seed_must_pick_exactly_one_source() {
        let mut doc = minimal();
        doc["seed"] = serde_json::json!({"preset": "origin", "points": [[0.0, 0.0]]});
        let err = parse_config(&doc.to_string()).unwrap_err();
        assert!(err.0.iter().any(|e| e.starts_with("seed: exactly one")), "{err}");
    }

    #[test]
    fn presets_parse_and_validate() {
        for (name, text) in [
            ("sierpinski", PRESET_SIERPINSKI),
            ("cantor", PRESET_CANTOR),
            ("square", PRESET_SQUARE),
        ] {
            let cfg = parse_config(text)
                .unwrap_or_else(|e| panic!("preset {name} must validate: {e}"));
            assert!(!cfg.system.maps().is_empty(), "{name}");
        }
    }

    #[test]
    fn accepted_config_round_trips_through_json() {
        let cfg = parse_config(PRESET_SIERPINSKI).unwrap();
        let again = parse_config(&cfg.to_json().to_string()).unwrap();
        assert_eq!(again.system.maps().len(), cfg.system.maps().len());
        assert_eq!(again.seed, cfg.seed);
        assert_eq!(again.params, cfg.params);
        assert_eq!(cfg.to_json(), again.to_json(), "serialization is a fixed point");
    }
}
