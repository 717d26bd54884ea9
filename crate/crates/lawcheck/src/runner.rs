//! Runs laws over their families or over a single document.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use qf_core::Caps;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::doc::StructureDoc;
use crate::families::{Instance, Skips};
use crate::laws::{self, Law, Outcome};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("law `{law}` does not apply to a {kind} document")]
    NotApplicable { law: String, kind: &'static str },
    #[error("no law applies to a {0} document")]
    NothingApplies(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawResult {
    pub law_id: String,
    pub instance_id: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// The serialized instance, present on failures so they can be replayed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<StructureDoc>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub caps: Value,
    /// The `--cap` override, if any.
    pub bound: Option<usize>,
    pub summary: Summary,
    pub results: Vec<LawResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn for_law<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a LawResult> + 'a {
        self.results.iter().filter(move |r| r.law_id == id)
    }
}

#[derive(Clone, Debug)]
pub enum Scope {
    /// Each law's own instance family.
    Enumerate,
    Document(Box<StructureDoc>),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub law: Option<String>,
    pub bound: Option<usize>,
    pub scope: Scope,
    pub caps: Caps,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { law: None, bound: None, scope: Scope::Enumerate, caps: Caps::default() }
    }
}

pub fn caps_json(c: &Caps) -> Value {
    json!({
        "lattice_enum": c.lattice_enum,
        "endo_enum": c.endo_enum,
        "form_cells": c.form_cells,
        "endo_quantale": c.endo_quantale,
        "form_quantale_cells": c.form_quantale_cells,
        "monoid": c.monoid,
    })
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".to_string())
}

pub fn check_one(law: &Law, inst: &Instance, caps: &Caps) -> LawResult {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (law.check)(&inst.doc, caps)))
        .unwrap_or_else(|p| Outcome::Fail(json!({ "panic": panic_message(p) })));
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let (status, reason, witness, instance) = match outcome {
        Outcome::Pass => (Status::Pass, None, None, None),
        Outcome::Skipped(r) => (Status::Skipped, Some(r), None, None),
        Outcome::Fail(w) => (Status::Fail, None, Some(w), Some(inst.doc.clone())),
    };
    LawResult {
        law_id: law.id.to_string(),
        instance_id: inst.id.clone(),
        status,
        reason,
        witness,
        instance,
        elapsed_ms,
    }
}

fn skipped(law: &Law, id: String, reason: String) -> LawResult {
    LawResult {
        law_id: law.id.to_string(),
        instance_id: id,
        status: Status::Skipped,
        reason: Some(format!("cap: {reason}")),
        witness: None,
        instance: None,
        elapsed_ms: 0.0,
    }
}

pub fn selected_laws(law: Option<&str>) -> Result<Vec<&'static Law>, RunError> {
    match law {
        Some(id) => laws::find(id).map(|l| vec![l]).ok_or_else(|| RunError::UnknownLaw(id.to_string())),
        None => Ok(laws::registry().iter().collect()),
    }
}

pub fn run(opts: &RunOptions) -> Result<Report, RunError> {
    let selected = selected_laws(opts.law.as_deref())?;
    let mut tasks: Vec<(&Law, Instance)> = Vec::new();
    let mut results = Vec::new();
    match &opts.scope {
        Scope::Enumerate => {
            for &law in &selected {
                let mut skips: Skips = Vec::new();
                let bound = opts.bound.unwrap_or(law.default_bound);
                for inst in (law.family)(bound, &opts.caps, &mut skips) {
                    tasks.push((law, inst));
                }
                results.extend(skips.into_iter().map(|(id, why)| skipped(law, id, why)));
            }
        }
        Scope::Document(doc) => {
            let kind = doc.kind();
            let applicable: Vec<&Law> = selected.iter().copied().filter(|l| laws::accepts(l, doc)).collect();
            if applicable.is_empty() {
                return Err(match &opts.law {
                    Some(id) => RunError::NotApplicable { law: id.clone(), kind: kind.name() },
                    None => RunError::NothingApplies(kind.name()),
                });
            }
            let id = if doc.name.is_empty() { kind.name().to_string() } else { doc.name.clone() };
            for law in applicable {
                tasks.push((law, Instance { id: id.clone(), doc: (**doc).clone() }));
            }
        }
    }
    results.par_extend(tasks.par_iter().map(|(law, inst)| check_one(law, inst, &opts.caps)));
    Ok(assemble(results, &opts.caps, opts.bound))
}

pub fn assemble(mut results: Vec<LawResult>, caps: &Caps, bound: Option<usize>) -> Report {
    results.sort_by(|a, b| (&a.law_id, &a.instance_id).cmp(&(&b.law_id, &b.instance_id)));
    let mut summary = Summary::default();
    for r in &results {
        match r.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Skipped => summary.skipped += 1,
        }
    }
    Report { schema_version: SCHEMA_VERSION, caps: caps_json(caps), bound, summary, results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate;

    #[test]
    fn single_document_scope() {
        let doc = generate("sierpinski_form", &[]).unwrap();
        let opts = RunOptions { scope: Scope::Document(Box::new(doc)), ..RunOptions::default() };
        let report = run(&opts).unwrap();
        assert!(report.passed());
        assert!(report.for_law("prop-formsvsGalois").count() == 1);
        assert!(report.results.windows(2).all(|w| w[0].law_id <= w[1].law_id));
    }

    #[test]
    fn unknown_and_inapplicable() {
        let doc = generate("chain", &["2".to_string()]).unwrap();
        let opts = RunOptions { law: Some("nope".into()), ..RunOptions::default() };
        assert!(matches!(run(&opts), Err(RunError::UnknownLaw(_))));
        let opts = RunOptions {
            law: Some("thm-comparison".into()),
            scope: Scope::Document(Box::new(doc)),
            ..RunOptions::default()
        };
        assert!(matches!(run(&opts), Err(RunError::NotApplicable { .. })));
    }

    #[test]
    fn cap_overrides_bound() {
        let opts = RunOptions { law: Some("prop-formsvsGalois".into()), bound: Some(2), ..RunOptions::default() };
        let report = run(&opts).unwrap();
        // one form on each product with a trivial side, two on C2 × C2
        assert_eq!(report.summary.pass, 1 + 1 + 1 + 2);
    }
}
