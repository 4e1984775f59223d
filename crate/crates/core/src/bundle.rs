//! The JSON document every command emits.

use serde::{Deserialize, Serialize};

use crate::invisibility::{BodySpec, Trajectory, Visibility};
use crate::mirrors::MirrorSpec;
use crate::orbits::Orbit;
use crate::reflectivity::{ChainResult, ReflectivityReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropicFlags {
    pub label: String,
    pub i1: bool,
    pub i2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Reflectivity(ReflectivityReport),
    Solve {
        period: usize,
        seeds: usize,
        converged: usize,
        rejected: usize,
        failed: usize,
    },
    Chains {
        period: usize,
        results: Vec<ChainResult>,
    },
    IsotropicInfinity {
        mirrors: Vec<IsotropicFlags>,
    },
    Trace {
        rays: usize,
        invisible: usize,
        visible: usize,
        missed: usize,
        aborted: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracedRay {
    pub trajectory: Trajectory,
    pub visibility: Visibility,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBundle {
    pub command: String,
    /// Distinct mirrors of the billiard, kept for rendering.
    #[serde(default)]
    pub mirrors: Vec<MirrorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    #[serde(default)]
    pub orbits: Vec<Orbit>,
    #[serde(default)]
    pub reports: Vec<Report>,
    #[serde(default)]
    pub trajectories: Vec<TracedRay>,
    #[serde(default)]
    pub svg: Vec<String>,
}

impl OutputBundle {
    pub fn new(command: &str) -> Self {
        OutputBundle {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<OutputBundle> {
        serde_json::from_str(text)
    }

    /// Closed chains found by `chain` commands.
    pub fn chains(&self) -> impl Iterator<Item = &ChainResult> {
        self.reports.iter().flat_map(|r| match r {
            Report::Chains { results, .. } => results.as_slice(),
            _ => &[],
        })
    }

    pub fn is_empty(&self) -> bool {
        self.mirrors.is_empty()
            && self.body.is_none()
            && self.orbits.is_empty()
            && self.trajectories.is_empty()
            && self.chains().next().is_none()
    }
}
