//! End-to-end evaluation of bundle map data: classification and closed-form
//! MF, the one-parameter trace of the routed cellular model, and the exact
//! fixed set of the routed homotopy.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cells::build_model;
use crate::classify::{evaluate_mf, route_model, validate, BundleMapData, Case, MfEvaluation, Routing, Violation};
use crate::error::ClassifyError;
use crate::hochschild::Chain1;
use crate::lattice::{canonical_marker, IntVec2};
use crate::oracle::{circle_count, fixed_set, model_homotopy, straight_line, AffinePiece, FixedCircle};
use crate::ring::{Endo, Monomial};
use crate::trace::trace_report;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub marker: Monomial,
    #[serde(with = "crate::serde_util::bigint")]
    pub index: BigInt,
}

/// Trace results, in the coordinates of the routed model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub r_chain: Chain1,
    pub indices: Vec<IndexEntry>,
    pub nielsen: usize,
    #[serde(with = "crate::serde_util::int_pair")]
    pub lefschetz: IntVec2,
}

/// Fixed set of the straight-line homotopy between the model's end maps, in
/// model coordinates with canonical class markers, plus the circle count of
/// the two-branch model homotopy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub homotopy: Vec<AffinePiece>,
    pub circles: Vec<FixedCircle>,
    pub circle_count: usize,
    pub two_branch_circle_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Agree,
    Disagree,
    Invalid,
    Unsupported,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Agree => 0,
            Status::Disagree => 2,
            Status::Invalid => 3,
            Status::Unsupported => 4,
        }
    }
}

/// Pairwise comparisons; None when either side is undefined.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub mf_nielsen: Option<bool>,
    pub nielsen_circles: Option<bool>,
    pub mf_circles: Option<bool>,
    pub all: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub input: BundleMapData,
    pub violations: Vec<Violation>,
    pub classification: Option<MfEvaluation>,
    pub routing: Option<Routing>,
    pub trace: Option<TraceSummary>,
    pub oracle: Option<OracleSummary>,
    pub agreement: Agreement,
    pub errors: Vec<String>,
    pub status: Status,
}

impl Evaluation {
    pub fn case(&self) -> Option<Case> {
        self.classification.as_ref().map(|c| c.label.case)
    }

    pub fn mf(&self) -> Option<&BigInt> {
        self.classification.as_ref().and_then(|c| c.mf.as_ref())
    }

    pub fn nielsen(&self) -> Option<usize> {
        self.trace.as_ref().map(|t| t.nielsen)
    }

    pub fn circle_count(&self) -> Option<usize> {
        self.oracle.as_ref().map(|o| o.circle_count)
    }
}

fn run_trace(r: &Routing) -> Result<TraceSummary, String> {
    let rep = trace_report(&build_model(&r.params)).map_err(|e| e.to_string())?;
    let indices =
        rep.indices.entries.iter().map(|(c, i)| IndexEntry { marker: c.rep.clone(), index: i.clone() }).collect();
    Ok(TraceSummary { r_chain: rep.r_chain, indices, nielsen: rep.nielsen, lefschetz: rep.lefschetz })
}

fn run_oracle(r: &Routing) -> Result<OracleSummary, String> {
    let printed = model_homotopy(&r.params);
    let homotopy = straight_line(&printed).map_err(|e| e.to_string())?;
    let phi = Endo::from_matrix(&r.params.fiber_matrix());
    let mut circles = fixed_set(&homotopy).map_err(|e| e.to_string())?;
    for c in &mut circles {
        c.class_marker = c.class_marker.as_ref().map(|m| canonical_marker(m, &phi));
    }
    Ok(OracleSummary {
        circle_count: circles.len(),
        two_branch_circle_count: circle_count(&printed).map_err(|e| e.to_string())?,
        homotopy,
        circles,
    })
}

pub fn evaluate(d: &BundleMapData) -> Evaluation {
    let mut ev = Evaluation {
        input: d.clone(),
        violations: validate(d),
        classification: None,
        routing: None,
        trace: None,
        oracle: None,
        agreement: Agreement::default(),
        errors: Vec::new(),
        status: Status::Invalid,
    };
    if !ev.violations.is_empty() {
        return ev;
    }
    match evaluate_mf(d) {
        Ok(c) => ev.classification = Some(c),
        Err(ClassifyError::NoMatch(msg)) => {
            ev.errors.push(msg);
            ev.status = Status::Unsupported;
            return ev;
        }
        Err(e) => {
            ev.errors.push(e.to_string());
            return ev;
        }
    }
    if matches!(ev.case(), Some(Case::IV | Case::V)) {
        ev.status = Status::Unsupported;
        return ev;
    }
    ev.routing = route_model(d).unwrap_or_else(|e| {
        ev.errors.push(e.to_string());
        None
    });
    if let Some(r) = &ev.routing {
        match run_trace(r) {
            Ok(t) => ev.trace = Some(t),
            Err(e) => ev.errors.push(format!("trace: {e}")),
        }
        match run_oracle(r) {
            Ok(o) => ev.oracle = Some(o),
            Err(e) => ev.errors.push(format!("oracle: {e}")),
        }
    }
    let mf = ev.mf().cloned();
    let n = ev.nielsen().map(BigInt::from);
    let k = ev.circle_count().map(BigInt::from);
    let cmp = |a: &Option<BigInt>, b: &Option<BigInt>| Some(a.as_ref()? == b.as_ref()?);
    ev.agreement.mf_nielsen = cmp(&mf, &n);
    ev.agreement.nielsen_circles = cmp(&n, &k);
    ev.agreement.mf_circles = cmp(&mf, &k);
    let a = &ev.agreement;
    ev.agreement.all =
        ev.errors.is_empty() && [a.mf_nielsen, a.nielsen_circles, a.mf_circles].iter().all(|x| *x != Some(false));
    ev.status = if ev.agreement.all { Status::Agree } else { Status::Disagree };
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntMatrix2;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d)
    }

    #[test]
    fn square_report() {
        let ev = evaluate(&BundleMapData::new(IntMatrix2::identity(), m(1, 0, 0, 3), 2, 0));
        assert_eq!(ev.case(), Some(Case::II));
        assert_eq!(ev.mf(), Some(&BigInt::from(4)));
        assert_eq!((ev.nielsen(), ev.circle_count()), (Some(4), Some(4)));
        assert_eq!(ev.status, Status::Agree);
    }

    #[test]
    fn case_one_and_failures() {
        let ev = evaluate(&BundleMapData::new(IntMatrix2::identity(), IntMatrix2::identity(), 5, 5));
        assert_eq!((ev.case(), ev.mf().cloned()), (Some(Case::I), Some(BigInt::from(0))));
        assert!(ev.trace.is_none() && ev.oracle.is_none());
        assert_eq!(ev.status, Status::Agree);
        let ev = evaluate(&BundleMapData::new(m(2, 0, 0, 1), IntMatrix2::identity(), 0, 0));
        assert_eq!(ev.status.exit_code(), 3);
        let ev = evaluate(&BundleMapData::new(m(-1, 0, 0, -1), m(1, 0, 0, 2), 1, 0));
        assert_eq!(ev.status.exit_code(), 4);
        let ev = evaluate(&BundleMapData::new(IntMatrix2::identity(), m(2, 1, 1, 1), 1, 0));
        assert_eq!(ev.status, Status::Unsupported);
    }

    #[test]
    fn triangulated_report() {
        let d = BundleMapData::new(m(1, 1, 0, -1), m(1, 1, 0, -1), 1, -3);
        let ev = evaluate(&d);
        assert_eq!(ev.mf(), Some(&BigInt::from(1)));
        let o = ev.oracle.as_ref().unwrap();
        assert_eq!((o.circle_count, o.two_branch_circle_count), (1, 5));
        assert_eq!(ev.status, Status::Agree);
    }
}
