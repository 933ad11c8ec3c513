//! Executable reproduction cases. Every case returns a report listing each
//! claim with its status and residual; failures are reported, never thrown.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::expr::Expr;
use crate::noether::SymmetryVerdict;

mod cases;
pub mod numeric;
pub mod report;

pub use numeric::{drift, numeric_validate, NumericError, Trajectory};
pub use report::{emit_report, emit_reports, ReportFormat};

/// Seed used for the random witnesses of negative claims.
pub const WITNESS_SEED: u64 = 0x00c0_ffee;
/// Drift bound for verified first integrals.
pub const DRIFT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
}

impl CaseId {
    pub const ALL: [CaseId; 7] = [
        CaseId::C1,
        CaseId::C2,
        CaseId::C3,
        CaseId::C4,
        CaseId::C5,
        CaseId::C6,
        CaseId::C7,
    ];

    pub fn title(self) -> &'static str {
        match self {
            CaseId::C1 => "homogeneity first integrals",
            CaseId::C2 => "transformed Lagrangians",
            CaseId::C3 => "variational and divergence symmetry algebras",
            CaseId::C4 => "solution symmetries and the natural Lagrangian",
            CaseId::C5 => "sl(2) generators and the natural Lagrangian",
            CaseId::C6 => "nonlinear fourth-order example",
            CaseId::C7 => "equivalent Lagrangians",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for CaseId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown case `{s}` (expected C1..C7 or all)"))
    }
}

impl Serialize for CaseId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClaimStatus {
    #[serde(rename = "verified")]
    Verified,
    #[serde(rename = "refuted-witness")]
    RefutedWitness,
    #[serde(rename = "skipped")]
    Skipped,
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimStatus::Verified => "verified",
            ClaimStatus::RefutedWitness => "refuted-witness",
            ClaimStatus::Skipped => "skipped",
        })
    }
}

/// One checked statement. `residual` is the printed expression that had to
/// vanish (or, for numeric claims, the measured quantity); `paper_ref` names
/// the reproduced result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub id: String,
    pub status: ClaimStatus,
    pub residual: String,
    pub paper_ref: String,
    pub millis: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: Option<CaseId>,
    pub claims: Vec<Claim>,
}

impl CaseReport {
    pub fn all_verified(&self) -> bool {
        self.claims.iter().all(|c| c.status == ClaimStatus::Verified)
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }
}

/// Outcome of a claim body before timing is attached.
pub(crate) enum Outcome {
    /// `residual` must vanish identically.
    Zero(Expr),
    /// `witness` must be certified non-zero at random points.
    NonZero(Expr),
    /// A measured value and whether it meets its bound.
    Measured(f64, bool),
}

pub(crate) struct Recorder {
    claims: Vec<Claim>,
}

impl Recorder {
    pub(crate) fn new() -> Self {
        Recorder { claims: Vec::new() }
    }

    pub(crate) fn check<E: fmt::Display>(
        &mut self,
        id: impl Into<String>,
        label: impl Into<String>,
        body: impl FnOnce() -> Result<Outcome, E>,
    ) {
        let start = Instant::now();
        let (status, residual) = match body() {
            Err(e) => (ClaimStatus::RefutedWitness, format!("error: {e}")),
            Ok(Outcome::Zero(r)) => match r.zero_test() {
                Ok(true) => (ClaimStatus::Verified, "0".to_string()),
                Ok(false) => (ClaimStatus::RefutedWitness, r.to_string()),
                Err(e) => (ClaimStatus::Skipped, format!("{e}: {r}")),
            },
            Ok(Outcome::NonZero(w)) => {
                let numeric = w.numeric_witness(WITNESS_SEED);
                if numeric.certifies_nonzero() {
                    (ClaimStatus::Verified, "0".to_string())
                } else if w.zero_test().unwrap_or(false) {
                    (
                        ClaimStatus::RefutedWitness,
                        "0 (expected a non-zero expression)".to_string(),
                    )
                } else {
                    (ClaimStatus::Skipped, format!("no certifying sample for {w}"))
                }
            }
            Ok(Outcome::Measured(v, ok)) => {
                let status = if ok {
                    ClaimStatus::Verified
                } else {
                    ClaimStatus::RefutedWitness
                };
                (status, format!("{v:e}"))
            }
        };
        self.claims.push(Claim {
            id: id.into(),
            status,
            residual,
            paper_ref: label.into(),
            millis: start.elapsed().as_millis() as u64,
        });
    }

    /// Symmetry verdict with an expected answer.
    pub(crate) fn verdict<E: fmt::Display>(
        &mut self,
        id: impl Into<String>,
        label: impl Into<String>,
        expected: bool,
        body: impl FnOnce() -> Result<SymmetryVerdict, E>,
    ) {
        self.check(id, label, || {
            body().map(|v| {
                if expected {
                    Outcome::Zero(v.witness)
                } else {
                    Outcome::NonZero(v.witness)
                }
            })
        })
    }

    pub(crate) fn finish(self, case: CaseId) -> CaseReport {
        CaseReport {
            case: Some(case),
            claims: self.claims,
        }
    }
}

pub fn run_case(id: CaseId) -> CaseReport {
    let mut rec = Recorder::new();
    match id {
        CaseId::C1 => cases::homogeneity_integrals(&mut rec),
        CaseId::C2 => cases::transformed_lagrangians(&mut rec),
        CaseId::C3 => cases::symmetry_algebras(&mut rec),
        CaseId::C4 => cases::solution_symmetries(&mut rec),
        CaseId::C5 => cases::sl2_families(&mut rec),
        CaseId::C6 => cases::nonlinear_example(&mut rec),
        CaseId::C7 => cases::equivalent_lagrangians(&mut rec),
    }
    rec.finish(id)
}

/// Runs cases concurrently; reports come back in the order of `ids`.
pub fn run_cases(ids: &[CaseId]) -> Vec<CaseReport> {
    std::thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|&id| s.spawn(move || run_case(id))).collect();
        handles.into_iter().map(|h| h.join().expect("case panicked")).collect()
    })
}
