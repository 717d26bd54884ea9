//! Exhaustively enumerated instance families. Every instance carries a
//! stable id and a document from which it can be rebuilt.

use std::sync::Arc;

use qf_core::forms::enumerate_two_forms;
use qf_core::lattice::enumerate_sup_lattices;
use qf_core::qmodules::{check_balanced, enumerate_modules_on};
use qf_core::quantales::{cyclic_group, enumerate_quantales_on, powerset_monoid_quantale};
use qf_core::{Caps, Lattice, Module, Quantale, Side, TwoForm};

use crate::doc::{balanced_body, form_doc, involutive_body, Structure, StructureDoc};
use crate::generate::generate;

#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub doc: StructureDoc,
}

/// Parts of a family that the library caps excluded: `(id, reason)`.
pub type Skips = Vec<(String, String)>;

impl Instance {
    pub fn new(id: impl Into<String>, doc: StructureDoc) -> Self {
        let id = id.into();
        Instance { doc: StructureDoc { name: id.clone(), ..doc }, id }
    }
}

/// Lattices with at most `max_n` elements, named `L<n>.<i>`.
pub fn named_lattices(max_n: usize, caps: &Caps, skips: &mut Skips) -> Vec<(String, Arc<Lattice>)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        match enumerate_sup_lattices(n, caps) {
            Ok(ls) => out.extend(ls.into_iter().enumerate().map(|(i, l)| (format!("L{n}.{i}"), Arc::new(l)))),
            Err(e) => skips.push((format!("lattice/L{n}"), e.to_string())),
        }
    }
    out
}

fn forms_on(ln: &str, l: &Arc<Lattice>, rn: &str, r: &Arc<Lattice>, caps: &Caps, skips: &mut Skips) -> Vec<TwoForm> {
    enumerate_two_forms(l, r, caps).unwrap_or_else(|e| {
        skips.push((format!("form/{ln}x{rn}"), e.to_string()));
        Vec::new()
    })
}

/// The quantales the module laws range over.
pub fn module_quantales() -> Vec<(String, Arc<Quantale>)> {
    vec![
        ("two".to_string(), Arc::new(Quantale::two())),
        ("min3".to_string(), Arc::new(Quantale::min_quantale(3))),
        (
            "pz2".to_string(),
            Arc::new(powerset_monoid_quantale(&cyclic_group(2), &Caps::default()).expect("P(Z/2) is a quantale")),
        ),
    ]
}

pub fn lattices(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    named_lattices(bound, caps, skips)
        .into_iter()
        .map(|(id, l)| Instance::new(format!("lattice/{id}"), Structure::Lattice(l).to_doc("")))
        .collect()
}

/// Chains up to `bound` elements and the diamond.
pub fn endo_shapes(bound: usize) -> Vec<Instance> {
    let mut out: Vec<Instance> = (1..=bound)
        .map(|n| Instance::new(format!("lattice/C{n}"), Structure::Lattice(Arc::new(Lattice::chain(n))).to_doc("")))
        .collect();
    out.push(Instance::new("lattice/diamond", Structure::Lattice(Arc::new(Lattice::diamond())).to_doc("")));
    out
}

pub fn named_forms(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<(String, TwoForm)> {
    let ls = named_lattices(bound, caps, skips);
    let mut out = Vec::new();
    for (ln, l) in &ls {
        for (rn, r) in &ls {
            for (k, f) in forms_on(ln, l, rn, r, caps, skips).into_iter().enumerate() {
                out.push((format!("{ln}x{rn}#{k:02}"), f));
            }
        }
    }
    out
}

/// All 2-forms on pairs of lattices with at most `bound` elements.
pub fn forms(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    named_forms(bound, caps, skips)
        .into_iter()
        .map(|(id, f)| Instance::new(format!("form/{id}"), form_doc("", &f)))
        .collect()
}

pub fn dense_forms(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    named_forms(bound, caps, skips)
        .into_iter()
        .filter(|(_, f)| f.classify().dense())
        .map(|(id, f)| Instance::new(format!("form/{id}"), form_doc("", &f)))
        .collect()
}

pub fn symmetric_forms(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<(String, TwoForm)> {
    named_forms(bound, caps, skips).into_iter().filter(|(_, f)| f.left() == f.right() && f.is_symmetric()).collect()
}

/// Ordered pairs of forms from [`forms`].
pub fn form_pairs(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    let fs = named_forms(bound, caps, skips);
    let mut out = Vec::with_capacity(fs.len() * fs.len());
    for (a, fa) in &fs {
        for (b, fb) in &fs {
            out.push(Instance::new(
                format!("pair/{a}/{b}"),
                StructureDoc::pair("", form_doc("src", fa), form_doc("dst", fb)),
            ));
        }
    }
    out
}

pub fn named_quantales(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<(String, Arc<Quantale>)> {
    let mut out = Vec::new();
    for n in 1..=bound {
        let carriers: Vec<Arc<Lattice>> = match enumerate_sup_lattices(n, caps) {
            Ok(ls) => ls.into_iter().map(Arc::new).collect(),
            Err(e) => {
                skips.push((format!("quantale/Q{n}"), e.to_string()));
                continue;
            }
        };
        let qs = carriers.iter().flat_map(enumerate_quantales_on);
        out.extend(qs.enumerate().map(|(k, q)| (format!("Q{n}.{k:03}"), Arc::new(q))));
    }
    out
}

/// All quantales on lattices with at most `bound` elements, each
/// multiplication once plain and once per valid involution.
pub fn quantales(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    named_quantales(bound, caps, skips)
        .into_iter()
        .map(|(id, q)| Instance::new(format!("quantale/{id}"), Structure::Quantale(q).to_doc("")))
        .collect()
}

pub fn module_quantale_docs() -> Vec<Instance> {
    module_quantales()
        .into_iter()
        .map(|(id, q)| Instance::new(format!("quantale/{id}"), Structure::Quantale(q).to_doc("")))
        .collect()
}

/// All left and right modules over the module quantales on carriers with at
/// most `bound` elements.
pub fn modules(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    let mut out = Vec::new();
    for (qn, q) in module_quantales() {
        for side in [Side::Left, Side::Right] {
            let s = if side == Side::Left { "left" } else { "right" };
            for (k, m) in modules_over(&q, side, bound, caps, skips).into_iter().enumerate() {
                out.push(Instance::new(format!("module/{qn}/{s}/{k:03}"), Structure::Module(m).to_doc("")));
            }
        }
    }
    out
}

/// Carrier bound for balanced candidates: larger quantales get smaller carriers.
fn balanced_bound(q: &Quantale, bound: usize) -> usize {
    if q.len() <= 2 {
        bound
    } else {
        bound.saturating_sub(1).max(1)
    }
}

fn modules_over(q: &Arc<Quantale>, side: Side, bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Module> {
    let mut none = Skips::new();
    let ls = named_lattices(bound, caps, &mut none);
    skips.extend(none.into_iter().map(|(id, e)| (format!("module/{side:?}/{id}"), e)));
    ls.iter().flat_map(|(_, l)| enumerate_modules_on(q, l, side)).collect()
}

/// Every (right module, left module, form) triple over the module
/// quantales, balanced or not.
pub fn balanced_candidates(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    balanced_family(bound, caps, skips, false)
}

/// The balanced triples only.
pub fn balanced_forms(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    balanced_family(bound, caps, skips, true)
}

fn balanced_family(bound: usize, caps: &Caps, skips: &mut Skips, only_balanced: bool) -> Vec<Instance> {
    let mut out = Vec::new();
    for (qn, q) in module_quantales() {
        let b = balanced_bound(&q, bound);
        let lefts = modules_over(&q, Side::Right, b, caps, skips);
        let rights = modules_over(&q, Side::Left, b, caps, skips);
        for (i, lm) in lefts.iter().enumerate() {
            for (j, rm) in rights.iter().enumerate() {
                for (k, f) in forms_on(&format!("{i}"), lm.carrier(), &format!("{j}"), rm.carrier(), caps, skips)
                    .into_iter()
                    .enumerate()
                {
                    let balanced = check_balanced(lm, rm, &f).map(|(b, _)| b.is_some()).unwrap_or(false);
                    if only_balanced && !balanced {
                        continue;
                    }
                    let id = format!("balanced/{qn}/{i:02}.{j:02}#{k:02}");
                    out.push(Instance::new(id, StructureDoc::new("", balanced_body(lm, rm, &f))));
                }
            }
        }
    }
    out
}

fn involutive_quantales(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<(String, Arc<Quantale>)> {
    named_quantales(bound, caps, skips).into_iter().filter(|(_, q)| q.involution().is_some()).collect()
}

/// Left modules over involutive quantales paired with symmetric forms on
/// their carriers, whether or not the involutive law holds.
pub fn involutive_candidates(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    involutive_family(bound, caps, skips, false)
}

pub fn involutive_modules(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    involutive_family(bound, caps, skips, true)
}

fn involutive_family(bound: usize, caps: &Caps, skips: &mut Skips, only_valid: bool) -> Vec<Instance> {
    let ls = named_lattices(bound, caps, skips);
    let mut out = Vec::new();
    for (qn, q) in involutive_quantales(bound, caps, skips) {
        for (ln, l) in &ls {
            let forms: Vec<TwoForm> =
                forms_on(ln, l, ln, l, caps, skips).into_iter().filter(TwoForm::is_symmetric).collect();
            for (i, m) in enumerate_modules_on(&q, l, Side::Left).into_iter().enumerate() {
                for (k, f) in forms.iter().enumerate() {
                    let valid = qf_core::involutive::involutive_report(&m, f).is_ok_and(|r| r.law);
                    if only_valid && !valid {
                        continue;
                    }
                    let id = format!("involutive/{qn}/{ln}/{i:02}#{k:02}");
                    out.push(Instance::new(id, StructureDoc::new("", involutive_body(&m, f))));
                }
            }
        }
    }
    out
}

/// (involutive quantale, symmetric form) pairs.
pub fn bijection_pairs(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    let qs: Vec<_> =
        involutive_quantales(bound.min(3), caps, skips).into_iter().filter(|(_, q)| q.len() <= 2).collect();
    let forms = symmetric_forms(bound, caps, skips);
    let mut out = Vec::new();
    for (qn, q) in &qs {
        for (fname, f) in &forms {
            let doc = StructureDoc::pair("", Structure::Quantale(q.clone()).to_doc("q"), form_doc("form", f));
            out.push(Instance::new(format!("pair/{qn}/{fname}"), doc));
        }
    }
    out
}

pub fn symmetric_form_docs(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    symmetric_forms(bound, caps, skips)
        .into_iter()
        .map(|(id, f)| Instance::new(format!("form/{id}"), form_doc("", &f)))
        .collect()
}

pub fn involutive_quantale_docs(bound: usize, caps: &Caps, skips: &mut Skips) -> Vec<Instance> {
    involutive_quantales(bound, caps, skips)
        .into_iter()
        .map(|(id, q)| Instance::new(format!("quantale/{id}"), Structure::Quantale(q).to_doc("")))
        .collect()
}

/// The outputs of the named generators.
pub fn generated() -> Vec<Instance> {
    let calls: &[(&str, &[&str])] = &[
        ("chain", &["1"]),
        ("chain", &["2"]),
        ("chain", &["3"]),
        ("powerset", &["2"]),
        ("diamond", &[]),
        ("sierpinski_form", &[]),
        ("relation_form", &["[[0,1],[1,0]]"]),
        ("group_quantale", &["2"]),
        ("min_quantale", &["3"]),
        ("endo_quantale", &["chain:3"]),
        ("phi_n", &["min:3", "1"]),
    ];
    calls
        .iter()
        .map(|(name, params)| {
            let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
            let doc = generate(name, &params).expect("built-in generator calls are valid");
            Instance::new(format!("generated/{}", doc.name), doc)
        })
        .collect()
}
