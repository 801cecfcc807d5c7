//! CSV and JSON renderings of decay reports.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::lab::run::{CollisionBoundReport, DecayReport};

pub const CSV_HEADER: &str = "model,n,event,replicates,hits,phat,ci_lo,ci_hi";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per cell with a header, LF line endings.
pub fn write_csv(report: &DecayReport, mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in &report.cells {
        let e = &c.estimate;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            csv_field(c.model.tag()),
            c.n,
            csv_field(&c.event),
            e.replicates,
            e.hits,
            e.phat,
            e.ci_lo,
            e.ci_hi
        )?;
    }
    Ok(())
}

pub fn csv_string(report: &DecayReport) -> String {
    let mut buf = Vec::new();
    write_csv(report, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[derive(Serialize)]
struct Summary<'a> {
    report: &'a DecayReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    collision_bound: Option<&'a CollisionBoundReport>,
}

/// Pretty-printed JSON with fits, slope gaps, warnings and, when present,
/// the collision bound comparison.
pub fn summary_json(report: &DecayReport, bound: Option<&CollisionBoundReport>) -> String {
    let mut s = serde_json::to_string_pretty(&Summary { report, collision_bound: bound }).expect("serialisable report");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::plan::{Coefficient, EventSpec, ExperimentPlan, PRule};
    use crate::lab::run::run_plan;
    use crate::{Execution, Model};

    #[test]
    fn csv_shape() {
        let plan = ExperimentPlan {
            n_grid: vec![4, 5],
            p_rule: PRule::Constant { p: Coefficient::Shared(0.5) },
            k: 1,
            event: EventSpec::SumOdd { graph: 0 },
            replicates: 100,
            seed: 1,
            models: vec![Model::B, Model::EPrime],
            allow_out_of_regime: true,
        };
        let report = run_plan(&plan, Execution::default()).unwrap();
        let csv = csv_string(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("Eprime,4,sum-odd[0],100,0,0,0,0.03"));
        assert!(!csv.contains('\r') && csv.ends_with('\n'));
        let json: serde_json::Value = serde_json::from_str(&summary_json(&report, None)).unwrap();
        assert_eq!(json["report"]["cells"][0]["model"], "B");
        assert!(json.get("collision_bound").is_none());
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
