//! Deterministic report assembly: the `{header, checks}` schema shared by
//! every command, plus canonical JSON views of the module-level reports.
//!
//! Reports must be byte-identical across runs on identical inputs, so every
//! value rendered here is either exact (rationals and polynomials as
//! strings) or produced by the platform-independent float formatter of the
//! JSON serializer.  Nothing in the body carries a timestamp; the optional
//! stamp line lives outside it.  The dataset digest ties a report to the
//! canonical serialization of its input.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    CompanionReport, GenericPolygon, KoshikawaReport, SemicontinuityReport,
    SemicontinuityViolationKind, SlopeGapReport, StrataReport,
};
use crate::frobdata::FrobeniusDataset;
use crate::lfunction::{GosReport, RationalFunction, SlopeConsistencyReport};
use crate::newton::NewtonPolygon;
use crate::weights::{PlainnessReport, SlopeBoundReading, SlopeBoundReport, WeightReport};
use crate::{RatPoly, RatSeries, Result};

/// Outcome of a single named check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Pure computation with nothing to pass or fail.
    Info,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }

    /// Collapses a boolean verdict.
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One entry of the report body: a stable name, a verdict, and whatever
/// structured data backs it.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub data: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict, data: Value) -> Self {
        Check {
            name: name.into(),
            verdict,
            data,
        }
    }
}

/// Configuration echo at the top of every report.
#[derive(Clone, Debug)]
pub struct ReportHeader {
    pub command: String,
    /// Content hash of the canonical input serialization, when there is one.
    pub dataset_digest: Option<String>,
    /// The place the command worked at, rendered `p#index`.
    pub place: Option<String>,
    pub truncation: usize,
    pub precision: u32,
    pub tolerance: f64,
}

/// A full report: header plus checks, rendered as
/// `{"header": {...}, "checks": [{name, verdict, data}, ...]}`.
#[derive(Clone, Debug)]
pub struct Report {
    pub header: ReportHeader,
    pub checks: Vec<Check>,
}

impl Report {
    /// No check failed (info checks never fail).
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "header": {
                "command": self.header.command,
                "dataset_digest": self.header.dataset_digest,
                "place": self.header.place,
                "truncation": self.header.truncation,
                "precision": self.header.precision,
                "tolerance": self.header.tolerance,
            },
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "verdict": c.verdict.as_str(),
                "data": c.data,
            })).collect::<Vec<_>>(),
        })
    }

    /// The canonical rendering: pretty JSON with sorted object keys (the
    /// serializer's map ordering) and a trailing newline.
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value())
            .expect("report values contain no non-serializable data");
        s.push('\n');
        s
    }
}

/// SHA-256 of the dataset's canonical serialization, as lowercase hex.
pub fn dataset_digest(d: &FrobeniusDataset) -> Result<String> {
    let canonical = crate::frobdata::to_json_string(d)?;
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

// ---------------------------------------------------------------------------
// Canonical views of values and module reports.

/// Ascending coefficient strings of a polynomial — the exact, readable form.
pub fn poly_value(p: &RatPoly) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

/// Vertices, slope multiset, and denominator bound of a polygon.
pub fn polygon_value(p: &NewtonPolygon) -> Value {
    json!({
        "vertices": p.vertices().iter()
            .map(|(x, y)| json!([x, y.to_string()]))
            .collect::<Vec<_>>(),
        "slopes": p.slope_multiset().iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>(),
        "denominator_bound": p.denominator_bound().to_string(),
    })
}

/// Truncated series as coefficient strings.
pub fn series_value(s: &RatSeries) -> Value {
    Value::Array(
        (0..=s.order())
            .map(|i| Value::String(s.coeff(i).to_string()))
            .collect(),
    )
}

pub fn rational_function_value(f: &RationalFunction) -> Value {
    json!({
        "numerator": poly_value(f.numerator()),
        "denominator": poly_value(f.denominator()),
    })
}

pub fn strata_value(r: &StrataReport) -> Value {
    json!({
        "generic": polygon_value(&r.generic),
        "generic_count": r.generic_count,
        "jumping": r.jumping.iter().map(|p| json!({
            "id": p.id,
            "degree": p.degree,
            "polygon": polygon_value(&p.polygon),
        })).collect::<Vec<_>>(),
        "jumping_degree": r.jumping_degree,
        "residue_q": r.residue_q,
        "base_q": r.base_q,
        "linear_bound": r.linear_bound,
        "exterior_bound": r.exterior_bound,
        "within_linear": r.within_linear,
        "within_exterior": r.within_exterior,
    })
}

pub fn generic_polygon_value(g: &GenericPolygon) -> Value {
    match g {
        GenericPolygon::Determinate(p) => json!({
            "determinate": true,
            "polygon": polygon_value(p),
        }),
        GenericPolygon::Indeterminate { antichain } => json!({
            "determinate": false,
            "antichain": antichain.iter().map(|(id, p)| json!({
                "id": id,
                "polygon": polygon_value(p),
            })).collect::<Vec<_>>(),
        }),
    }
}

pub fn semicontinuity_value(r: &SemicontinuityReport) -> Value {
    json!({
        "generic": polygon_value(&r.generic),
        "nongeneric_count": r.nongeneric_count,
        "max_nongeneric_degree": r.max_nongeneric_degree,
        "violations": r.violations.iter().map(|v| json!({
            "id": v.id,
            "kind": match v.kind {
                SemicontinuityViolationKind::BelowGeneric => "below-generic",
                SemicontinuityViolationKind::EndpointMismatch => "locally-constant",
            },
            "polygon": polygon_value(&v.polygon),
        })).collect::<Vec<_>>(),
    })
}

pub fn slope_gap_value(r: &SlopeGapReport) -> Value {
    json!({
        "max_gap": r.max_gap.to_string(),
        "bound_met": r.bound_met,
        "applicable": r.applicable,
    })
}

pub fn koshikawa_value(r: &KoshikawaReport) -> Value {
    json!({
        "characteristic": r.characteristic,
        "unit_root": r.unit_root,
        "p_plain": r.p_plain,
        "pure_weight_zero": r.pure_weight_zero,
        "applicable": r.applicable,
        "all_cyclotomic": r.all_cyclotomic,
        "distinct_polynomials": r.distinct_polynomials.iter()
            .map(poly_value)
            .collect::<Vec<_>>(),
        "detail": r.detail,
    })
}

pub fn companion_value(r: &CompanionReport) -> Value {
    json!({
        "conjugated": r.conjugated,
        "points_compared": r.points_compared,
        "mismatch": r.mismatch.as_ref().map(|m| json!({
            "id": m.id,
            "left": poly_value(&m.left),
            "right": poly_value(&m.right),
        })),
    })
}

/// Purity summary: everything except the full per-point weight table, which
/// only the dedicated weights command emits.
pub fn purity_value(r: &WeightReport) -> Value {
    json!({
        "target_weight": r.target_weight,
        "tolerance": r.tolerance,
        "points": r.per_point.len(),
        "worst_deviation": r.worst_deviation,
        "violations": r.violations.iter().map(|v| json!({
            "id": v.id,
            "weight": v.weight,
            "deviation": v.deviation,
        })).collect::<Vec<_>>(),
        "flagged": r.flagged.iter().map(|f| json!({
            "id": f.id,
            "detail": f.detail,
        })).collect::<Vec<_>>(),
    })
}

/// The per-point certified weight table.
pub fn weight_table_value(r: &WeightReport) -> Value {
    Value::Array(
        r.per_point
            .iter()
            .map(|p| {
                json!({
                    "id": p.id,
                    "degree": p.degree,
                    "weights": p.weights.iter()
                        .map(|w| w.to_string())
                        .collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn plainness_value(r: &PlainnessReport) -> Value {
    json!({
        "primes": r.primes,
        "failures": r.failures.iter().map(|f| json!({
            "id": f.id,
            "ell": f.ell,
            "factor_index": f.factor_index,
            "detail": f.detail,
        })).collect::<Vec<_>>(),
    })
}

pub fn slope_bound_value(r: &SlopeBoundReport) -> Value {
    let reading = |b: SlopeBoundReading| match b {
        SlopeBoundReading::Plain => "plain",
        SlopeBoundReading::RefinedRaw => "refined-raw",
        SlopeBoundReading::RefinedCentered => "refined-centered",
    };
    json!({
        "points_checked": r.points_checked,
        "plain_pass": r.plain_pass,
        "refined_raw_pass": r.refined_raw_pass,
        "refined_centered_pass": r.refined_centered_pass,
        "violations": r.violations.iter().map(|v| json!({
            "id": v.id,
            "reading": reading(v.reading),
            "index": v.index,
            "bound": v.bound.to_string(),
            "attained": v.attained.to_string(),
        })).collect::<Vec<_>>(),
    })
}

pub fn gos_value(r: &GosReport) -> Value {
    json!({
        "chi_l_function": r.chi_l_function,
        "chi_formula": r.chi_formula,
        "swan_term": r.swan_term,
    })
}

pub fn slope_consistency_value(r: &SlopeConsistencyReport) -> Value {
    json!({
        "slopes": r.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "point_failures": r.point_failures,
        "l_product_consistent": r.l_product_consistent,
        "precision_used": r.precision_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::jumping_locus;
    use crate::ingest::build_legendre_dataset;
    use crate::nf::Place;

    fn sample_report() -> Report {
        let d = build_legendre_dataset(7, 2).unwrap();
        let strata = jumping_locus(&d, &Place::new(7, 0)).unwrap();
        Report {
            header: ReportHeader {
                command: "strata".into(),
                dataset_digest: Some(dataset_digest(&d).unwrap()),
                place: Some("7#0".into()),
                truncation: 12,
                precision: 10,
                tolerance: 1e-9,
            },
            checks: vec![Check::new(
                "jumping-locus",
                Verdict::from_pass(strata.pass()),
                strata_value(&strata),
            )],
        }
    }

    #[test]
    fn reports_render_identically_across_runs() {
        let a = sample_report().render_json();
        let b = sample_report().render_json();
        assert_eq!(a, b);
        assert!(a.ends_with('\n'));
        let parsed: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["checks"][0]["verdict"], "pass");
        assert_eq!(parsed["checks"][0]["data"]["jumping_degree"], 3);
        assert_eq!(parsed["header"]["tolerance"], 1e-9);
    }

    #[test]
    fn digests_are_stable_under_round_trips() {
        let d = build_legendre_dataset(5, 2).unwrap();
        let digest = dataset_digest(&d).unwrap();
        assert_eq!(digest.len(), 64);
        assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
        let text = crate::frobdata::to_json_string(&d).unwrap();
        let reloaded = crate::frobdata::from_json_str(&text).unwrap();
        assert_eq!(dataset_digest(&reloaded).unwrap(), digest);
    }

    #[test]
    fn failing_checks_fail_the_report() {
        let mut r = sample_report();
        assert!(r.pass());
        r.checks.push(Check::new("broken", Verdict::Fail, json!({})));
        assert!(!r.pass());
        r.checks.push(Check::new("note", Verdict::Info, json!(null)));
        assert!(!r.pass());
    }
}
