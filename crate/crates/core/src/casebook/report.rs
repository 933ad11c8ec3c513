use std::fmt::Write;

use super::{CaseReport, ClaimStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

pub fn emit_report(report: &CaseReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string(report).expect("report serializes"),
        ReportFormat::Text => text(report),
    }
}

/// Several reports: a JSON array, or text blocks separated by blank lines.
pub fn emit_reports(reports: &[CaseReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string(reports).expect("report serializes"),
        ReportFormat::Text => reports.iter().map(text).collect::<Vec<_>>().join("\n"),
    }
}

fn text(report: &CaseReport) -> String {
    let mut out = String::new();
    match report.case {
        Some(c) => writeln!(out, "case {c}: {}", c.title()).unwrap(),
        None => writeln!(out, "case -").unwrap(),
    }
    for claim in &report.claims {
        writeln!(
            out,
            "  {:<16} {}  [{}]  {} ms",
            claim.status.to_string(),
            claim.id,
            claim.paper_ref,
            claim.millis
        )
        .unwrap();
        if claim.status != ClaimStatus::Verified || claim.residual != "0" {
            writeln!(out, "      residual: {}", claim.residual).unwrap();
        }
    }
    let verified = report
        .claims
        .iter()
        .filter(|c| c.status == ClaimStatus::Verified)
        .count();
    writeln!(out, "  {verified}/{} verified", report.claims.len()).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::casebook::{CaseId, Claim};

    fn sample() -> CaseReport {
        CaseReport {
            case: Some(CaseId::C1),
            claims: vec![
                Claim {
                    id: "a".into(),
                    status: ClaimStatus::Verified,
                    residual: "0".into(),
                    paper_ref: "first".into(),
                    millis: 3,
                },
                Claim {
                    id: "b".into(),
                    status: ClaimStatus::RefutedWitness,
                    residual: "q*y".into(),
                    paper_ref: "second".into(),
                    millis: 1,
                },
            ],
        }
    }

    #[test]
    fn empty_report() {
        assert_eq!(
            emit_report(&CaseReport::default(), ReportFormat::Json),
            r#"{"case":null,"claims":[]}"#
        );
    }

    #[test]
    fn json_field_order() {
        let json = emit_report(&sample(), ReportFormat::Json);
        assert!(json.starts_with(
            r#"{"case":"C1","claims":[{"id":"a","status":"verified","residual":"0","paper_ref":"first","millis":3}"#
        ));
        assert!(json.contains(r#""status":"refuted-witness","residual":"q*y""#));
    }

    #[test]
    fn text_shows_residual_of_refuted_claims() {
        let t = emit_report(&sample(), ReportFormat::Text);
        assert!(t.contains("residual: q*y"));
        assert!(t.contains("1/2 verified"));
    }
}
