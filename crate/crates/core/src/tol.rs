//! Numerical thresholds shared across the crate.
//!
//! The constants are the defaults; [`Tolerances`] bundles the ones a
//! configuration file may override.

use serde::{Deserialize, Serialize};

/// Projective equality: chordal distance between normalized triples.
pub const PROJ_EQ: f64 = 1e-12;
/// Relative isotropy test `|u.u| < ISOTROPY * |u|^2`.
pub const ISOTROPY: f64 = 1e-10;
/// Chordal tolerance used when comparing an edge's infinity point with I1/I2.
pub const EDGE_CHORDAL: f64 = 1e-8;
/// Root clustering radius for multiplicity detection.
pub const ROOT_CLUSTER: f64 = 1e-7;
/// Gradient-norm guard relative to the coefficient scale.
pub const SINGULAR_GUARD: f64 = 1e-8;
/// A converged periodic orbit.
pub const RESIDUAL_CONVERGED: f64 = 1e-11;
/// A valid periodic orbit.
pub const RESIDUAL_VALID: f64 = 1e-9;
/// Relative singular-value threshold for the numerical rank.
pub const RANK_RATIO: f64 = 1e-6;
/// Ray-tracing epsilon: minimum ray parameter and corner radius.
pub const RAY_EPS: f64 = 1e-9;

/// Overridable tolerances. Every field must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual_converged: f64,
    pub residual_valid: f64,
    pub rank_ratio: f64,
    pub isotropy: f64,
    pub edge_chordal: f64,
    pub sample_radius: f64,
    pub ray_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual_converged: RESIDUAL_CONVERGED,
            residual_valid: RESIDUAL_VALID,
            rank_ratio: RANK_RATIO,
            isotropy: ISOTROPY,
            edge_chordal: EDGE_CHORDAL,
            sample_radius: 1e-3,
            ray_eps: RAY_EPS,
        }
    }
}

impl Tolerances {
    /// Name of the first non-positive (or non-finite) field, if any.
    pub fn first_invalid(&self) -> Option<&'static str> {
        let fields = [
            ("residual_converged", self.residual_converged),
            ("residual_valid", self.residual_valid),
            ("rank_ratio", self.rank_ratio),
            ("isotropy", self.isotropy),
            ("edge_chordal", self.edge_chordal),
            ("sample_radius", self.sample_radius),
            ("ray_eps", self.ray_eps),
        ];
        fields
            .iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(n, _)| *n)
    }
}
