//! Configuration files: mirrors, billiard order, seed boxes, tolerances,
//! an optional real body and command parameters.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::invisibility::{build_two_parabola_body, Body, BodySpec, ORay};
use crate::mirrors::{Mirror, MirrorSpec};
use crate::orbits::Billiard;
use crate::reflectivity::SeedBox;
use crate::tol::Tolerances;

/// How the body of `trace-invisible` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyConfig {
    TwoParabola { scale: f64 },
    Arcs(BodySpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub origin: [f64; 2],
    pub direction: [f64; 2],
}

/// Command parameters; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_reflections: Option<usize>,
}

/// The configuration document as written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub mirrors: Vec<MirrorSpec>,
    /// Mirror labels in billiard order; defaults to the order of `mirrors`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
    #[serde(default)]
    pub seed_boxes: Vec<SeedBox>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<RaySpec>>,
    #[serde(default)]
    pub params: Params,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub file: ConfigFile,
    pub billiard: Option<Billiard>,
    pub body: Option<Body>,
    pub rays: Option<Vec<ORay>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config is not UTF-8 (byte {0})")]
    Utf8(usize),
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("at {path}: {source}")]
    Invalid { path: String, source: crate::Error },
}

fn invalid(path: impl Into<String>, source: crate::Error) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        source,
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => schema(path, inner.to_string()),
            _ => ConfigError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            },
        }
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(bytes: &[u8]) -> Result<Config, ConfigError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ConfigError::Utf8(e.valid_up_to()))?;
    let file: ConfigFile = from_json(text)?;
    validate(file)
}

/// Replaces tolerance fields by those of a JSON object.
pub fn apply_tolerance_overrides(cfg: &mut Config, json: &str) -> Result<(), ConfigError> {
    let overrides: Value = from_json(json)?;
    let Value::Object(map) = overrides else {
        return Err(schema("tolerance-overrides", "expected a JSON object"));
    };
    let mut current = serde_json::to_value(cfg.file.tolerances).expect("tolerances serialize");
    for (k, v) in map {
        current[k] = v;
    }
    let t: Tolerances = from_json(&current.to_string())
        .map_err(|e| schema("tolerance-overrides", e.to_string()))?;
    if let Some(name) = t.first_invalid() {
        return Err(schema(
            format!("tolerance-overrides.{name}"),
            "tolerances must be positive",
        ));
    }
    cfg.file.tolerances = t;
    Ok(())
}

fn validate(file: ConfigFile) -> Result<Config, ConfigError> {
    if let Some(name) = file.tolerances.first_invalid() {
        return Err(schema(
            format!("tolerances.{name}"),
            "tolerances must be positive",
        ));
    }
    for (i, b) in file.seed_boxes.iter().enumerate() {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
        if !(ok(b.re) && ok(b.im)) {
            return Err(schema(
                format!("seed_boxes[{i}]"),
                "ranges must be finite with min <= max",
            ));
        }
    }
    let mut mirrors: Vec<Mirror> = Vec::with_capacity(file.mirrors.len());
    for (i, spec) in file.mirrors.iter().enumerate() {
        if mirrors.iter().any(|m| m.label == spec.label) {
            return Err(schema(
                format!("mirrors[{i}].label"),
                format!("duplicate label {}", spec.label),
            ));
        }
        mirrors.push(Mirror::from_spec(spec).map_err(|e| invalid(format!("mirrors[{i}]"), e))?);
    }
    let billiard = if mirrors.is_empty() {
        if file.order.is_some() {
            return Err(schema("order", "no mirrors are defined"));
        }
        None
    } else {
        let ordered = match &file.order {
            None => mirrors.clone(),
            Some(labels) => labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    mirrors
                        .iter()
                        .find(|m| &m.label == l)
                        .cloned()
                        .ok_or_else(|| {
                            schema(format!("order[{i}]"), format!("unknown mirror label {l}"))
                        })
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        Some(Billiard::new(ordered).map_err(|e| invalid("order", e))?)
    };
    let body = match &file.body {
        None => None,
        Some(BodyConfig::TwoParabola { scale }) => {
            Some(build_two_parabola_body(*scale).map_err(|e| invalid("body.two_parabola", e))?)
        }
        Some(BodyConfig::Arcs(spec)) => {
            Some(Body::from_spec(spec).map_err(|e| invalid("body.arcs", e))?)
        }
    };
    if billiard.is_none() && body.is_none() {
        return Err(schema("", "config defines neither mirrors nor a body"));
    }
    let rays = match &file.rays {
        None => None,
        Some(rs) => Some(
            rs.iter()
                .enumerate()
                .map(|(i, r)| {
                    ORay::new(r.origin, r.direction).map_err(|e| invalid(format!("rays[{i}]"), e))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    Ok(Config {
        file,
        billiard,
        body,
        rays,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIPLE: &str = r#"{
        "mirrors": [{"label": "c", "degree": 2,
                     "coeffs": [[2, 0, [1, 0]], [0, 2, [1, 0]], [0, 0, [-1, 0]]]}],
        "order": ["c", "c", "c"],
        "params": {"period": 3}
    }"#;

    #[test]
    fn circle_triple() {
        let cfg = parse_config(TRIPLE.as_bytes()).unwrap();
        assert_eq!(cfg.billiard.as_ref().unwrap().len(), 3);
        assert_eq!(cfg.file.params.period, Some(3));
    }

    #[test]
    fn isotropic_line_is_rejected() {
        // y = i x, i.e. i x - y = 0
        let text = r#"{"mirrors": [{"label": "l", "degree": 1, "coeffs": [[1, 0, [0, 1]], [0, 1, [-1, 0]]]},
                                   {"label": "m", "degree": 1, "coeffs": [[1, 0, [1, 0]]]}]}"#;
        let err = parse_config(text.as_bytes()).unwrap_err();
        assert!(
            err.to_string().contains("mirror is an isotropic line"),
            "{err}"
        );
        assert!(matches!(err, ConfigError::Invalid { ref path, .. } if path == "mirrors[0]"));
    }

    #[test]
    fn truncated_json_reports_position() {
        let err = parse_config(&TRIPLE.as_bytes()[..40]).unwrap_err();
        assert!(
            matches!(err, ConfigError::Syntax { line: 2, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn unknown_fields_carry_a_path() {
        let text = TRIPLE.replace("\"period\"", "\"perido\"");
        let err = parse_config(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, ConfigError::Schema { ref path, .. } if path.starts_with("params")),
            "{err:?}"
        );
    }

    #[test]
    fn tolerance_overrides() {
        let mut cfg = parse_config(TRIPLE.as_bytes()).unwrap();
        apply_tolerance_overrides(&mut cfg, r#"{"rank_ratio": 1e-7}"#).unwrap();
        assert_eq!(cfg.file.tolerances.rank_ratio, 1e-7);
        assert!(apply_tolerance_overrides(&mut cfg, r#"{"rank_ratio": -1}"#).is_err());
        assert!(apply_tolerance_overrides(&mut cfg, r#"{"bogus": 1}"#).is_err());
        let err = parse_config(
            TRIPLE
                .replace(
                    "\"params\"",
                    "\"tolerances\": {\"isotropy\": 0}, \"params\"",
                )
                .as_bytes(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn body_only_config() {
        let cfg = parse_config(br#"{"body": {"two_parabola": {"scale": 1.0}}}"#).unwrap();
        assert!(cfg.billiard.is_none());
        assert!(cfg.body.is_some());
        assert!(parse_config(b"{}").is_err());
    }
}
