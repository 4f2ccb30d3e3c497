//! Serializable documents for single-direction verdicts, witnesses and
//! system summaries.

use serde::{Deserialize, Serialize};

use crate::ifs::{certify_ssc, rotation_group, similarity_dimension, Ifs, SscVerdict};
use crate::exec::Execution;
use crate::projection::{DirectionVerdict, Exactness, IntervalVerdict, GROUP_CAP};
use crate::witness::{AuditResult, EveryLineVerdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapDocument {
    pub lo: String,
    pub hi: String,
    pub center: f64,
    pub half_width: f64,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub name: String,
    pub t: String,
    pub theta_rad: f64,
    /// `interval`, `gap`, `undecided`, or `no-interval` for systems with an
    /// infinite rotation group.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exactness: Option<Exactness>,
    /// Normalized hull of the projection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_sq: Option<String>,
    /// Unnormalized hull under `x + t*y` (or `y`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl VerdictDocument {
    pub fn new(name: &str, v: &DirectionVerdict) -> Self {
        let (lo, hi) = v.normalized();
        let mut doc = VerdictDocument {
            name: name.to_string(),
            t: v.direction.to_string(),
            theta_rad: v.direction.theta(),
            verdict: String::new(),
            exactness: None,
            interval: Some([lo, hi]),
            length: Some(hi - lo),
            length_sq: Some(v.length_sq().to_string()),
            hull: Some([v.hull.0.to_string(), v.hull.1.to_string()]),
            gap: None,
            depth: None,
        };
        match &v.verdict {
            IntervalVerdict::Interval { exactness, .. } => {
                doc.verdict = "interval".into();
                doc.exactness = Some(exactness.clone());
            }
            IntervalVerdict::Gap(g) => {
                doc.verdict = "gap".into();
                doc.depth = Some(g.depth);
                doc.gap = Some(GapDocument {
                    lo: g.lo.to_string(),
                    hi: g.hi.to_string(),
                    center: g.center,
                    half_width: g.half_width,
                    depth: g.depth,
                });
            }
            IntervalVerdict::Undecided { depth } => {
                doc.verdict = "undecided".into();
                doc.depth = Some(*depth);
            }
        }
        doc
    }

    pub fn no_interval(name: &str, d: &crate::projection::Direction) -> Self {
        VerdictDocument {
            name: name.to_string(),
            t: d.to_string(),
            theta_rad: d.theta(),
            verdict: "no-interval".into(),
            exactness: None,
            interval: None,
            length: None,
            length_sq: None,
            hull: None,
            gap: None,
            depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineDocument {
    pub normal: [String; 2],
    pub offset: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EveryLineDocument {
    /// `certified`, `counterexample` or `undecided`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<LineDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unresolved: Vec<String>,
    pub audit: AuditResult,
}

impl EveryLineDocument {
    pub fn new(v: &EveryLineVerdict, audit: AuditResult) -> Self {
        match v {
            EveryLineVerdict::Certified => {
                EveryLineDocument { verdict: "certified".into(), line: None, unresolved: vec![], audit }
            }
            EveryLineVerdict::CounterexampleLine(l) => EveryLineDocument {
                verdict: "counterexample".into(),
                line: Some(LineDocument {
                    normal: [l.normal.x.to_string(), l.normal.y.to_string()],
                    offset: l.offset.to_string(),
                }),
                unresolved: vec![],
                audit,
            },
            EveryLineVerdict::Undecided { directions } => EveryLineDocument {
                verdict: "undecided".into(),
                line: None,
                unresolved: directions.iter().map(|d| d.to_string()).collect(),
                audit,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaWitnessDocument {
    pub t: String,
    pub witness: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub name: String,
    pub vertices: Vec<[String; 2]>,
    pub invariant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaWitnessDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub every_line: Option<EveryLineDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SscDocument {
    /// `separated`, `not-separated` or `undecided`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_gap: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub common_point: Option<[String; 2]>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionDocument {
    pub name: String,
    pub dimension: String,
    pub dimension_value: f64,
    pub ssc: SscDocument,
    /// `None` when the group exceeds the search cap.
    pub rotation_group_order: Option<usize>,
    pub rotation_group_cap: usize,
}

impl DimensionDocument {
    pub fn analyze(ifs: &Ifs, max_depth: usize, exec: Execution) -> Self {
        let dim = similarity_dimension(ifs, 1e-14);
        let ssc = match certify_ssc(ifs, max_depth, exec) {
            SscVerdict::Separated { min_gap, depth } => SscDocument {
                verdict: "separated".into(),
                min_gap: Some(min_gap.to_string()),
                common_point: None,
                depth,
            },
            SscVerdict::NotSeparated { point, .. } => SscDocument {
                verdict: "not-separated".into(),
                min_gap: None,
                common_point: Some([point.x.to_string(), point.y.to_string()]),
                depth: 0,
            },
            SscVerdict::Undecided { depth } => {
                SscDocument { verdict: "undecided".into(), min_gap: None, common_point: None, depth }
            }
        };
        DimensionDocument {
            name: ifs.name().to_string(),
            dimension: dim.to_string(),
            dimension_value: dim.to_f64(),
            ssc,
            rotation_group_order: rotation_group(ifs, GROUP_CAP).order(),
            rotation_group_cap: GROUP_CAP,
        }
    }
}
