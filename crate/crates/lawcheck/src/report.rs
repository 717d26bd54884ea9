//! Text and JSON rendering of run reports.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::laws;
use crate::runner::{Report, Status};

pub fn to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}

/// The report with timings zeroed, for comparing runs.
pub fn without_timing(report: &Report) -> Report {
    let mut r = report.clone();
    for x in &mut r.results {
        x.elapsed_ms = 0.0;
    }
    r
}

pub fn to_text(report: &Report) -> String {
    let mut per_law: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    let mut ms: BTreeMap<&str, f64> = BTreeMap::new();
    for r in &report.results {
        let c = per_law.entry(&r.law_id).or_default();
        c[r.status as usize] += 1;
        *ms.entry(&r.law_id).or_default() += r.elapsed_ms;
    }
    let width = per_law.keys().map(|k| k.len()).max().unwrap_or(3).max(3);
    let mut out = String::new();
    writeln!(out, "{:width$}  {:>6} {:>6} {:>7} {:>10}", "law", "pass", "fail", "skipped", "ms").unwrap();
    for (law, [p, f, s]) in &per_law {
        let mark = if *f > 0 { "FAIL" } else { "ok" };
        writeln!(out, "{law:width$}  {p:>6} {f:>6} {s:>7} {:>10.1}  {mark}", ms[law]).unwrap();
    }
    let failures: Vec<_> = report.results.iter().filter(|r| r.status == Status::Fail).collect();
    if !failures.is_empty() {
        writeln!(out, "\nfailures:").unwrap();
        for r in failures {
            let statement = laws::find(&r.law_id).map_or("", |l| l.statement);
            writeln!(out, "- {} on {}\n  law: {statement}", r.law_id, r.instance_id).unwrap();
            if let Some(w) = &r.witness {
                writeln!(out, "  witness: {w}").unwrap();
            }
        }
    }
    let skipped: Vec<_> = report.results.iter().filter(|r| r.status == Status::Skipped).collect();
    let capped = skipped.iter().filter(|r| r.reason.as_deref().is_some_and(|s| s.starts_with("cap"))).count();
    let s = &report.summary;
    writeln!(out, "\n{} passed, {} failed, {} skipped ({capped} by caps)", s.pass, s.fail, s.skipped).unwrap();
    out
}
