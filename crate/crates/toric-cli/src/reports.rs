//! Serialized report shapes shared by the commands.
//!
//! Field order is fixed by declaration order, every rational is a string,
//! and optional sections are omitted instead of null, so an emitted report
//! parses back into the same type and re-emits byte-identically.

use serde::{Deserialize, Serialize};
use toric::fan::{ClassGroup, FanData, Wall};
use toric::intersection::CurveClass;
use toric::linalg::rat_to_string;
use toric::positivity::PositiveRelation;

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ErrorJson {
    pub error: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ValidateJson {
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessJson {
    pub indices: Vec<usize>,
    pub coeffs: Vec<String>,
}

impl WitnessJson {
    pub fn from_relation(rel: &PositiveRelation) -> Self {
        WitnessJson {
            indices: rel.support.clone(),
            coeffs: rel.coeffs.iter().map(rat_to_string).collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DaggerJson {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SignJson {
    pub sign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NefJson {
    pub nef: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_wall: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WallJson {
    pub facet: Vec<usize>,
    pub cones: [usize; 2],
    pub class: Vec<String>,
}

impl WallJson {
    pub fn new(wall: &Wall, class: &CurveClass) -> Self {
        WallJson {
            facet: wall.facet.clone(),
            cones: [wall.cones.0, wall.cones.1],
            class: class.intersections.iter().map(rat_to_string).collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WallsJson {
    pub walls: Vec<WallJson>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PcolsJson {
    pub collections: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_sum: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassGroupJson {
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl ClassGroupJson {
    pub fn new(group: &ClassGroup) -> Self {
        ClassGroupJson {
            free_rank: group.free_rank,
            torsion: group.torsion.iter().map(|t| t.to_string()).collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AnalysisReport {
    pub fan: String,
    pub valid: bool,
    pub dim: usize,
    pub rays: usize,
    pub simplicial: bool,
    pub smooth: bool,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projective: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_group: Option<ClassGroupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dagger: Option<DaggerJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seshadri_sign: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walls: Option<Vec<WallJson>>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CorpusEntryJson {
    pub fan: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projective_space: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_sum_collection: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Theorem1Json {
    pub checked: usize,
    pub applicable: usize,
    pub passed: usize,
    pub results: Vec<CorpusEntryJson>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScanJson {
    pub seed: u64,
    pub budget: usize,
    pub corpus_size: usize,
    pub candidates: usize,
    pub skipped: usize,
    pub findings: Vec<FanData>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GenCorpusJson {
    pub dir: String,
    pub written: Vec<String>,
}
