//! Named example generators.
//!
//! Arguments that denote a lattice or quantale are either a short token
//! (`chain:3`, `powerset:2`, `diamond`, `two`, `min:3`, `cyclic:2`) or a
//! path to a JSON document of the right kind.

use std::path::Path;
use std::sync::Arc;

use qf_core::qmodules::phi_n_form;
use qf_core::quantales::{cyclic_group, endo_quantale, powerset_monoid_quantale};
use qf_core::{Caps, Lattice, Quantale, TwoForm};
use thiserror::Error;

use crate::doc::{Structure, StructureDoc};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("bad parameters for `{name}`: {message}")]
    BadParams { name: String, message: String },
    #[error("generated structure is invalid: {0}")]
    ValidationFailed(String),
}

pub const GENERATORS: &[(&str, &str)] = &[
    ("chain", "chain <n>: the n-element chain"),
    ("powerset", "powerset <k>: subsets of a k-element set"),
    ("diamond", "diamond: 0 < a, b < 1"),
    ("sierpinski_form", "sierpinski_form: subsets against opens of the Sierpinski space"),
    ("relation_form", "relation_form <json matrix>: X ⊥ Y iff every x in X relates to every y in Y"),
    ("monoid_quantale", "monoid_quantale <json table>: the powerset of a finite monoid"),
    ("group_quantale", "group_quantale <n>: the powerset of Z/n"),
    ("min_quantale", "min_quantale <n>: the n-chain under min"),
    ("endo_quantale", "endo_quantale <lattice>: join endomorphisms, f ⊙ g = g ∘ f"),
    ("phi_n", "phi_n <quantale> <n>: x ⊥ y iff x ⊙ y ≤ n, on Q × Q"),
];

fn bad(name: &str, message: impl Into<String>) -> GenerateError {
    GenerateError::BadParams { name: name.to_string(), message: message.into() }
}

fn arity(name: &str, params: &[String], n: usize) -> Result<(), GenerateError> {
    if params.len() == n {
        Ok(())
    } else {
        Err(bad(name, format!("expected {n} parameter(s), got {}", params.len())))
    }
}

fn number(name: &str, s: &str, range: std::ops::RangeInclusive<usize>) -> Result<usize, GenerateError> {
    let v: usize = s.parse().map_err(|_| bad(name, format!("`{s}` is not a number")))?;
    if range.contains(&v) {
        Ok(v)
    } else {
        Err(bad(name, format!("{v} is outside {}..={}", range.start(), range.end())))
    }
}

fn json<T: serde::de::DeserializeOwned>(name: &str, s: &str) -> Result<T, GenerateError> {
    serde_json::from_str(s).map_err(|e| bad(name, format!("cannot parse `{s}`: {e}")))
}

fn load(name: &str, path: &str) -> Result<Structure, GenerateError> {
    let doc = StructureDoc::load(Path::new(path)).map_err(|e| bad(name, e.to_string()))?;
    Structure::from_doc(&doc).map_err(|e| GenerateError::ValidationFailed(e.to_string()))
}

pub fn lattice_arg(name: &str, arg: &str) -> Result<Arc<Lattice>, GenerateError> {
    let (head, rest) = arg.split_once(':').unwrap_or((arg, ""));
    match head {
        "chain" => Ok(Arc::new(Lattice::chain(number(name, rest, 1..=8)?))),
        "powerset" => Ok(Arc::new(Lattice::powerset(number(name, rest, 0..=3)?))),
        "diamond" => Ok(Arc::new(Lattice::diamond())),
        _ => match load(name, arg)? {
            Structure::Lattice(l) => Ok(l),
            _ => Err(bad(name, format!("{arg} is not a lattice document"))),
        },
    }
}

pub fn quantale_arg(name: &str, arg: &str) -> Result<Arc<Quantale>, GenerateError> {
    let (head, rest) = arg.split_once(':').unwrap_or((arg, ""));
    match head {
        "two" => Ok(Arc::new(Quantale::two())),
        "min" => Ok(Arc::new(Quantale::min_quantale(number(name, rest, 1..=6)?))),
        "cyclic" => powerset_monoid_quantale(&cyclic_group(number(name, rest, 1..=4)?), &Caps::default())
            .map(Arc::new)
            .map_err(|e| GenerateError::ValidationFailed(e.to_string())),
        _ => match load(name, arg)? {
            Structure::Quantale(q) => Ok(q),
            _ => Err(bad(name, format!("{arg} is not a quantale document"))),
        },
    }
}

fn relation_matrix(name: &str, s: &str) -> Result<Vec<Vec<bool>>, GenerateError> {
    let v: Vec<Vec<serde_json::Value>> = json(name, s)?;
    v.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| match c {
                    serde_json::Value::Bool(b) => Ok(b),
                    serde_json::Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
                    serde_json::Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
                    other => Err(bad(name, format!("relation entries must be 0/1 or booleans, got {other}"))),
                })
                .collect()
        })
        .collect()
}

pub fn generate(name: &str, params: &[String]) -> Result<StructureDoc, GenerateError> {
    let caps = Caps::default();
    let invalid = |e: &dyn std::fmt::Display| GenerateError::ValidationFailed(e.to_string());
    let structure = match name {
        "chain" => {
            arity(name, params, 1)?;
            Structure::Lattice(Arc::new(Lattice::chain(number(name, &params[0], 1..=8)?)))
        }
        "powerset" => {
            arity(name, params, 1)?;
            Structure::Lattice(Arc::new(Lattice::powerset(number(name, &params[0], 0..=3)?)))
        }
        "diamond" => {
            arity(name, params, 0)?;
            Structure::Lattice(Arc::new(Lattice::diamond()))
        }
        "sierpinski_form" => {
            arity(name, params, 0)?;
            Structure::Form(TwoForm::sierpinski())
        }
        "relation_form" => {
            arity(name, params, 1)?;
            let rel = relation_matrix(name, &params[0])?;
            if rel.len() > 3 || rel.iter().any(|r| r.len() > 3) {
                return Err(bad(name, "relations are limited to 3 × 3"));
            }
            Structure::Form(TwoForm::relation_form(&rel).map_err(|e| invalid(&e))?)
        }
        "monoid_quantale" => {
            arity(name, params, 1)?;
            let table: Vec<Vec<usize>> = json(name, &params[0])?;
            Structure::Quantale(Arc::new(powerset_monoid_quantale(&table, &caps).map_err(|e| invalid(&e))?))
        }
        "group_quantale" => {
            arity(name, params, 1)?;
            let n = number(name, &params[0], 1..=caps.monoid)?;
            Structure::Quantale(Arc::new(powerset_monoid_quantale(&cyclic_group(n), &caps).map_err(|e| invalid(&e))?))
        }
        "min_quantale" => {
            arity(name, params, 1)?;
            Structure::Quantale(Arc::new(Quantale::min_quantale(number(name, &params[0], 1..=6)?)))
        }
        "endo_quantale" => {
            arity(name, params, 1)?;
            let l = lattice_arg(name, &params[0])?;
            Structure::Quantale(Arc::new(endo_quantale(&l, &caps).map_err(|e| invalid(&e))?.quantale))
        }
        "phi_n" => {
            arity(name, params, 2)?;
            let q = quantale_arg(name, &params[0])?;
            let n = number(name, &params[1], 0..=q.len().saturating_sub(1))?;
            Structure::BalancedForm(phi_n_form(&q, n))
        }
        _ => return Err(GenerateError::UnknownGenerator(name.to_string())),
    };
    let label = if params.is_empty() { name.to_string() } else { format!("{name}({})", params.join(", ")) };
    Ok(structure.to_doc(&label))
}
