//! The law registry. Each law has a stable id, the statement it checks, the
//! document kinds it applies to and a default instance family.

use std::collections::BTreeSet;

use qf_core::forms::{
    continuity_conditions, continuous_partners, extend_to_continuous, forms_isomorphic, galois_report,
    orthogonal_quotient, respects_closures, Orthomorphism,
};
use qf_core::involutive::{
    involution_on_form_quantale, involutive_report, involutive_structure_bijection, self_adjoint_orthogonalizer,
    self_dual_adjoint, symvsinv_report, upseg_ann_involutive, InvolutiveError,
};
use qf_core::lattice::{enumerate_join_endos, enumerate_join_homs};
use qf_core::qmodules::{
    balance_report, balanced_orthogonal_quotient, dense_quotient_factorization, generator_analysis, orth,
    orthogonalizer, principal_density, principal_orthoquotient, principal_report, segment_modules,
    upsegment_restricted_form,
};
use qf_core::quantales::{
    annihilator_map, comparison_hom, constant_map, endo_quantale, enumerate_nuclei, form_quantale, phi_of_quantale,
    QuantaleError,
};
use qf_core::residuation::check_residuation_identities;
use qf_core::{BalancedForm, Caps, Module, Side, TwoForm};
use serde_json::{json, Value};

use crate::doc::{balanced_parts, involutive_parts, DocBody, Kind, Structure, StructureDoc};
use crate::families::{self as fam, Instance, Skips};

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Pass,
    Fail(Value),
    Skipped(String),
}

pub struct Law {
    pub id: &'static str,
    pub statement: &'static str,
    pub accepts: &'static [Kind],
    pub default_bound: usize,
    pub family: fn(usize, &Caps, &mut Skips) -> Vec<Instance>,
    pub check: fn(&StructureDoc, &Caps) -> Outcome,
}

impl std::fmt::Debug for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Law").field("id", &self.id).finish_non_exhaustive()
    }
}

const ALL_KINDS: &[Kind] =
    &[Kind::Lattice, Kind::Form, Kind::Quantale, Kind::Module, Kind::InvolutiveModule, Kind::BalancedForm, Kind::Pair];
const BIMORPHIC: &[Kind] =
    &[Kind::Form, Kind::Quantale, Kind::Module, Kind::InvolutiveModule, Kind::BalancedForm, Kind::Pair];

pub fn registry() -> &'static [Law] {
    REGISTRY
}

pub fn find(id: &str) -> Option<&'static Law> {
    REGISTRY.iter().find(|l| l.id == id)
}

static REGISTRY: &[Law] = &[
    Law {
        id: "def-axioms",
        statement: "every document validates against the defining axioms of its kind",
        accepts: ALL_KINDS,
        default_bound: 0,
        family: |_, _, _| fam::generated(),
        check: check_axioms,
    },
    Law {
        id: "residuation-identities",
        statement: "residuals of a bimorphism satisfy the adjunction laws, (z/y)*y ≤ z through x*(x\\(x*y)) = x*y",
        accepts: BIMORPHIC,
        default_bound: 4,
        family: |b, c, s| {
            let mut v = fam::forms(b, c, s);
            v.extend(fam::quantales(b, c, s));
            v.extend(fam::modules(b, c, s));
            v
        },
        check: check_residuation,
    },
    Law {
        id: "prop-formsvsGalois",
        statement: "2-forms are Galois connections; density, faithfulness and nonsingularity each have equivalent characterizations",
        accepts: &[Kind::Form],
        default_bound: 4,
        family: fam::forms,
        check: check_formsvsgalois,
    },
    Law {
        id: "prop-pseudo",
        statement: "for an orthomorphism (f, g): g surjective gives g(x^⊥) = f(x)^⊥, f surjective gives f(^⊥y) = ^⊥g(y)",
        accepts: &[Kind::Pair],
        default_bound: 4,
        family: fam::form_pairs,
        check: |d, _| check_orthomorphisms(d, &["commutes_right", "commutes_left"]),
    },
    Law {
        id: "prop-surjvsembed",
        statement: "g surjective and the source faithful on the left make f an order embedding (and mirrored); quotients of faithful forms are isomorphisms",
        accepts: &[Kind::Pair],
        default_bound: 4,
        family: fam::form_pairs,
        check: |d, _| check_orthomorphisms(d, &["f_embedding", "g_embedding", "isomorphism_if_faithful"]),
    },
    Law {
        id: "prop-dense-orthomorphisms",
        statement: "strong and surjective orthomorphism components transport density, and g strong with a dense-left source makes f dense",
        accepts: &[Kind::Pair],
        default_bound: 4,
        family: fam::form_pairs,
        check: |d, _| {
            check_orthomorphisms(
                d,
                &[
                    "preserves_density_right",
                    "reflects_density_right",
                    "preserves_density_left",
                    "reflects_density_left",
                    "f_dense",
                    "g_dense",
                ],
            )
        },
    },
    Law {
        id: "prop-orthoquotient",
        statement: "restricting a form to its double-orthogonal fixed points gives a faithful form and a quotient orthomorphism",
        accepts: &[Kind::Form],
        default_bound: 4,
        family: fam::forms,
        check: check_orthoquotient,
    },
    Law {
        id: "prop-continuities",
        statement: "for (f, g) between forms, the continuity condition is equivalent to each of its four adjoint and orthogonality forms",
        accepts: &[Kind::Pair],
        default_bound: 4,
        family: fam::form_pairs,
        check: check_continuities,
    },
    Law {
        id: "prop-uniquedet",
        statement: "between forms faithful on the right, f has a continuous partner g iff it respects the double-orthogonal closures, and g is unique",
        accepts: &[Kind::Pair],
        default_bound: 4,
        family: fam::form_pairs,
        check: check_uniquedet,
    },
    Law {
        id: "thm-phi-of-Q-of-phi",
        statement: "a dense form φ and Φ(Q(φ)) are isomorphic 2-forms",
        accepts: &[Kind::Form],
        default_bound: 4,
        family: fam::dense_forms,
        check: check_reconstruction,
    },
    Law {
        id: "lemma-sidedisos",
        statement: "for a dense form on L × R, ls(Q(φ)) ≅ L, rs(Q(φ)) ≅ R and Q(φ) is a factor quantale",
        accepts: &[Kind::Form],
        default_bound: 4,
        family: fam::dense_forms,
        check: check_sidedisos,
    },
    Law {
        id: "ex-endo-quantale",
        statement: "ls(Q(S)) ≅ S and rs(Q(S)) ≅ S^op, the left-sided maps are the constants and the right-sided maps the annihilators",
        accepts: &[Kind::Lattice],
        default_bound: 4,
        family: |b, _, _| fam::endo_shapes(b),
        check: check_endo_quantale,
    },
    Law {
        id: "thm-comparison",
        statement: "κ: Q → Q(Φ(Q)) is a quantale homomorphism, unital and involutive when Q is, and injective iff Q is faithful",
        accepts: &[Kind::Quantale],
        default_bound: 4,
        family: fam::quantales,
        check: check_comparison,
    },
    Law {
        id: "quantic-nucleus-quotient",
        statement: "the fixed points of a quantic nucleus j form a quantale under j(a ⊙ b), and j is a surjective homomorphism onto it",
        accepts: &[Kind::Quantale],
        default_bound: 4,
        family: fam::quantales,
        check: check_nuclei,
    },
    Law {
        id: "prop-updownsegments",
        statement: "m is invariant iff x ↦ x ∨ m is a module nucleus iff ↓m is a submodule",
        accepts: &[Kind::Module],
        default_bound: 4,
        family: fam::modules,
        check: check_updownsegments,
    },
    Law {
        id: "prop-invvsleftsided",
        statement: "ann(x) is sided, sided elements act on x to invariants, residuals by x of invariants are sided, and for generators this is a correspondence",
        accepts: &[Kind::Module],
        default_bound: 4,
        family: fam::modules,
        check: check_invvsleftsided,
    },
    Law {
        id: "prop-densequotient",
        statement: "for a generator x, a ↦ a·x factors as Q → ↑ann(x) → M with the second map a dense surjective homomorphism",
        accepts: &[Kind::Module],
        default_bound: 4,
        family: fam::modules,
        check: check_densequotient,
    },
    Law {
        id: "prop-principalmodules",
        statement: "quotients of principal modules are principal, and over a unital quantale the unital principal modules are the quotients of Q",
        accepts: &[Kind::Module],
        default_bound: 4,
        family: fam::modules,
        check: check_principalmodules,
    },
    Law {
        id: "thm-irreducible",
        statement: "a module that is everywhere principal, or has a generator with maximal sided annihilator, is irreducible",
        accepts: &[Kind::Module],
        default_bound: 4,
        family: fam::modules,
        check: check_irreducible,
    },
    Law {
        id: "prop-equivalentformsoverQ",
        statement: "a form between a right and a left Q-module is balanced iff each of its four residuation and orthogonality reformulations holds",
        accepts: &[Kind::BalancedForm],
        default_bound: 4,
        family: fam::balanced_candidates,
        check: check_equivalent_forms,
    },
    Law {
        id: "lemma-phi-n",
        statement: "φ_n(x, y) = 0 iff x ⊙ y ≤ n defines a balanced form on Q × Q, and orth(e, e) = n when Q is unital",
        accepts: &[Kind::Quantale],
        default_bound: 4,
        family: fam::quantales,
        check: check_phi_n,
    },
    Law {
        id: "thm-principalforms",
        statement: "a principal balanced form with generators x, y is a Q-orthoquotient of φ_n for n = orth(x, y) = (x^⊥)/y = x\\(^⊥y)",
        accepts: &[Kind::BalancedForm],
        default_bound: 4,
        family: fam::balanced_forms,
        check: check_principalforms,
    },
    Law {
        id: "lemma-denseforms",
        statement: "the restriction of φ_n to ↑r × ↑l is balanced, and dense on the right only if l is the greatest left-sided element below n (iff, for unital Q)",
        accepts: &[Kind::Quantale],
        default_bound: 4,
        family: fam::quantales,
        check: check_denseforms,
    },
    Law {
        id: "thm-upsegment-density",
        statement: "a principal balanced form is dense on the right only if ann(y) is the greatest left-sided element below orth(x, y) (iff, when unital)",
        accepts: &[Kind::BalancedForm],
        default_bound: 4,
        family: fam::balanced_forms,
        check: check_upsegment_density,
    },
    Law {
        id: "thm-simpleQquotient",
        statement: "the orthogonal quotient of a balanced form is balanced over the quotient module structures",
        accepts: &[Kind::BalancedForm],
        default_bound: 4,
        family: fam::balanced_forms,
        check: check_simple_quotient,
    },
    Law {
        id: "prop-symvsinv",
        statement: "a symmetric form makes Q(φ) involutive by (f, g)* = (g, f), and for involutive Q, Φ(Q) is symmetric up to a ↦ a* with the induced involution on Q(Φ(Q))",
        accepts: &[Kind::Form, Kind::Quantale],
        default_bound: 4,
        family: |b, c, s| {
            let mut v = fam::symmetric_form_docs(b, c, s);
            v.extend(fam::involutive_quantale_docs(b, c, s));
            v
        },
        check: check_symvsinv,
    },
    Law {
        id: "prop-involutive-residuation",
        statement: "⟨a*x|y⟩ = ⟨x|ay⟩ holds iff (a*x)^⊥ = a\\(x^⊥), and for faithful forms iff a*x = (a\\(x^⊥))^⊥",
        accepts: &[Kind::InvolutiveModule],
        default_bound: 4,
        family: fam::involutive_candidates,
        check: check_involutive_residuation,
    },
    Law {
        id: "prop-involutive-bijection",
        statement: "involutive left Q-module structures on (M, φ) correspond bijectively to involution-preserving homomorphisms Q → Q(φ)",
        accepts: &[Kind::Pair],
        default_bound: 4,
        family: fam::bijection_pairs,
        check: check_bijection,
    },
    Law {
        id: "prop-selfadjoint-orth",
        statement: "in an involutive module, orth(x, x) is self-adjoint for every generator x",
        accepts: &[Kind::InvolutiveModule],
        default_bound: 4,
        family: fam::involutive_modules,
        check: check_selfadjoint,
    },
    Law {
        id: "prop-upsegannx",
        statement: "↑ann(x) with a ⊥ b iff a* ⊙ b ≤ orth(x, x) is involutive and a ↦ a·x is a surjective involutive homomorphism onto M, an isomorphism when that form is faithful",
        accepts: &[Kind::InvolutiveModule],
        default_bound: 4,
        family: fam::involutive_modules,
        check: check_upsegannx,
    },
];

fn invalid(e: impl std::fmt::Display) -> Outcome {
    Outcome::Fail(json!({ "invalid": e.to_string() }))
}

fn dbg(v: &impl std::fmt::Debug) -> String {
    format!("{v:?}")
}

fn pass_if(ok: bool, witness: impl FnOnce() -> Value) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(witness())
    }
}

macro_rules! build {
    ($doc:expr, $pat:pat => $out:expr) => {
        match Structure::from_doc($doc) {
            Ok($pat) => $out,
            Ok(_) => return Outcome::Skipped(format!("not applicable to {}", $doc.kind().name())),
            Err(e) => return invalid(e),
        }
    };
}

macro_rules! cap_or {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) if is_cap(&e) => return Outcome::Skipped(format!("cap: {e}")),
            Err(e) => return invalid(e),
        }
    };
}

trait CapError: std::fmt::Display {
    fn is_cap(&self) -> bool;
}

impl CapError for QuantaleError {
    fn is_cap(&self) -> bool {
        matches!(self, QuantaleError::CapExceeded { .. })
    }
}

impl CapError for InvolutiveError {
    fn is_cap(&self) -> bool {
        matches!(self, InvolutiveError::Quantale(QuantaleError::CapExceeded { .. }))
    }
}

fn is_cap<E: CapError>(e: &E) -> bool {
    e.is_cap()
}

fn check_axioms(doc: &StructureDoc, _: &Caps) -> Outcome {
    match Structure::from_doc(doc) {
        Ok(_) => Outcome::Pass,
        Err(e) => invalid(e),
    }
}

fn residuation_of(s: &Structure) -> Result<(), Value> {
    let r = |res: Result<(), qf_core::residuation::ResiduationViolation>, what: &str| {
        res.map_err(|v| json!({ "bimorphism": what, "identity": v.identity, "x": v.x, "y": v.y, "z": v.z }))
    };
    match s {
        Structure::Lattice(_) => Ok(()),
        Structure::Form(f) => r(check_residuation_identities(f), "form"),
        Structure::Quantale(q) => r(check_residuation_identities(q.as_ref()), "multiplication"),
        Structure::Module(m) => {
            r(check_residuation_identities(m), "action")?;
            r(check_residuation_identities(m.over().as_ref()), "multiplication")
        }
        Structure::InvolutiveModule(im) => {
            r(check_residuation_identities(&im.module), "action")?;
            r(check_residuation_identities(&im.form), "form")
        }
        Structure::BalancedForm(bf) => {
            r(check_residuation_identities(&bf.left), "left action")?;
            r(check_residuation_identities(&bf.right), "right action")?;
            r(check_residuation_identities(&bf.form), "form")
        }
        Structure::Pair(a, b) => {
            residuation_of(a)?;
            residuation_of(b)
        }
    }
}

fn check_residuation(doc: &StructureDoc, _: &Caps) -> Outcome {
    // candidates that fail balance or the involutive law are still bimorphisms
    let s = match &doc.body {
        DocBody::BalancedForm { .. } => match balanced_parts(doc) {
            Ok((l, r, f)) => Structure::Pair(
                Box::new(Structure::Pair(Box::new(Structure::Module(l)), Box::new(Structure::Module(r)))),
                Box::new(Structure::Form(f)),
            ),
            Err(e) => return invalid(e),
        },
        DocBody::InvolutiveModule { .. } => match involutive_parts(doc) {
            Ok((m, f)) => Structure::Pair(Box::new(Structure::Module(m)), Box::new(Structure::Form(f))),
            Err(e) => return invalid(e),
        },
        _ => match Structure::from_doc(doc) {
            Ok(s) => s,
            Err(e) => return invalid(e),
        },
    };
    match residuation_of(&s) {
        Ok(()) => Outcome::Pass,
        Err(w) => Outcome::Fail(w),
    }
}

fn check_formsvsgalois(doc: &StructureDoc, _: &Caps) -> Outcome {
    let form = build!(doc, Structure::Form(f) => f);
    let rep = galois_report(&form);
    pass_if(rep.consistent(), || json!({ "report": dbg(&rep) }))
}

fn form_pair(doc: &StructureDoc) -> Result<(TwoForm, TwoForm), Outcome> {
    match Structure::from_doc(doc) {
        Ok(Structure::Pair(a, b)) => match (*a, *b) {
            (Structure::Form(a), Structure::Form(b)) => Ok((a, b)),
            _ => Err(Outcome::Skipped("needs a pair of forms".into())),
        },
        Ok(_) => Err(Outcome::Skipped(format!("not applicable to {}", doc.kind().name()))),
        Err(e) => Err(invalid(e)),
    }
}

fn check_orthomorphisms(doc: &StructureDoc, facts: &[&str]) -> Outcome {
    let (src, dst) = match form_pair(doc) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let gs = enumerate_join_homs(src.right(), dst.right());
    for f in enumerate_join_homs(src.left(), dst.left()) {
        for g in &gs {
            let Ok(m) = Orthomorphism::new(f.clone(), g.clone(), &src, &dst) else { continue };
            let bad: Vec<&str> = m.facts().violations().into_iter().filter(|v| facts.contains(v)).collect();
            if !bad.is_empty() {
                return Outcome::Fail(json!({ "f": f.table(), "g": g.table(), "violated": bad }));
            }
        }
    }
    Outcome::Pass
}

fn check_orthoquotient(doc: &StructureDoc, _: &Caps) -> Outcome {
    let form = build!(doc, Structure::Form(f) => f);
    let oq = orthogonal_quotient(&form);
    if !oq.form.classify().faithful() {
        return Outcome::Fail(json!({ "quotient_not_faithful": dbg(&oq.form.classify()) }));
    }
    if !oq.map.is_quotient() {
        return Outcome::Fail(json!({ "map_not_quotient": [oq.map.f.table(), oq.map.g.table()] }));
    }
    let again = orthogonal_quotient(&oq.form);
    if !forms_isomorphic(&again.form, &oq.form) {
        return Outcome::Fail(json!({ "not_idempotent": true }));
    }
    if form.classify().faithful()
        && (oq.form.left().len(), oq.form.right().len()) != (form.left().len(), form.right().len())
    {
        return Outcome::Fail(json!({ "faithful_form_changed": true }));
    }
    Outcome::Pass
}

fn check_continuities(doc: &StructureDoc, _: &Caps) -> Outcome {
    let (src, dst) = match form_pair(doc) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let gs = enumerate_join_homs(dst.right(), src.right());
    for f in enumerate_join_homs(src.left(), dst.left()) {
        for g in &gs {
            let c = continuity_conditions(&f, g, &src, &dst).expect("endpoints match by construction");
            if !c.all_agree() {
                return Outcome::Fail(json!({ "f": f.table(), "g": g.table(), "conditions": dbg(&c) }));
            }
        }
    }
    Outcome::Pass
}

fn check_uniquedet(doc: &StructureDoc, _: &Caps) -> Outcome {
    let (src, dst) = match form_pair(doc) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let (sf, df) = (src.classify(), dst.classify());
    if !(sf.faithful_right && df.faithful_right) {
        return Outcome::Skipped("hypothesis: both forms faithful on the right".into());
    }
    for f in enumerate_join_homs(src.left(), dst.left()) {
        let partners = continuous_partners(&f, &src, &dst);
        let ext = match extend_to_continuous(&f, &src, &dst) {
            Ok(e) => e,
            Err(e) => return invalid(e),
        };
        let respects = respects_closures(&f, &src, &dst);
        let ok = partners.len() <= 1
            && ext.is_some() == respects
            && ext.as_ref() == partners.first()
            && (!sf.faithful_left || ext.is_some());
        if !ok {
            return Outcome::Fail(json!({
                "f": f.table(),
                "partners": partners.iter().map(|g| g.table().to_vec()).collect::<Vec<_>>(),
                "extension": ext.map(|g| g.table().to_vec()),
                "respects_closures": respects,
            }));
        }
    }
    Outcome::Pass
}

fn dense_form(doc: &StructureDoc) -> Result<TwoForm, Outcome> {
    match Structure::from_doc(doc) {
        Ok(Structure::Form(f)) if f.classify().dense() => Ok(f),
        Ok(Structure::Form(_)) => Err(Outcome::Skipped("hypothesis: dense form".into())),
        Ok(_) => Err(Outcome::Skipped(format!("not applicable to {}", doc.kind().name()))),
        Err(e) => Err(invalid(e)),
    }
}

fn check_reconstruction(doc: &StructureDoc, caps: &Caps) -> Outcome {
    let form = match dense_form(doc) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let fq = cap_or!(form_quantale(&form, caps));
    let phi = phi_of_quantale(&fq.quantale);
    pass_if(forms_isomorphic(&phi.form, &form), || json!({ "phi": phi.form.orthogonality_matrix() }))
}

fn check_sidedisos(doc: &StructureDoc, caps: &Caps) -> Outcome {
    let form = match dense_form(doc) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let fq = cap_or!(form_quantale(&form, caps));
    let q = &fq.quantale;
    let (ls, rs) = (q.ls(), q.rs());
    let ok = [ls.lattice.is_isomorphic(form.left()), rs.lattice.is_isomorphic(form.right()), q.is_factor()];
    pass_if(ok.iter().all(|&b| b), || json!({ "ls_iso": ok[0], "rs_iso": ok[1], "factor": ok[2] }))
}

fn check_endo_quantale(doc: &StructureDoc, caps: &Caps) -> Outcome {
    let s = build!(doc, Structure::Lattice(l) => l);
    let e = cap_or!(endo_quantale(&s, caps));
    let q = &e.quantale;
    let count = match enumerate_join_endos(&s, caps) {
        Ok(v) => v.len(),
        Err(e) => return Outcome::Skipped(format!("cap: {e}")),
    };
    let (ls, rs) = (q.ls(), q.rs());
    let constants: BTreeSet<usize> = s.elements().filter_map(|v| e.index_of(&constant_map(&s, v))).collect();
    let annihilators: BTreeSet<usize> = s.elements().filter_map(|v| e.index_of(&annihilator_map(&s, v))).collect();
    let checks = json!({
        "size": q.len() == count,
        "ls_iso": ls.lattice.is_isomorphic(&s),
        "rs_iso_dual": rs.lattice.is_isomorphic(&s.dual()),
        "left_sided_are_constants": ls.embed.iter().copied().collect::<BTreeSet<_>>() == constants,
        "right_sided_are_annihilators": rs.embed.iter().copied().collect::<BTreeSet<_>>() == annihilators,
    });
    let ok = checks.as_object().unwrap().values().all(|v| v == &Value::Bool(true));
    pass_if(ok, || checks)
}

fn check_comparison(doc: &StructureDoc, caps: &Caps) -> Outcome {
    let q = build!(doc, Structure::Quantale(q) => q);
    let k = cap_or!(comparison_hom(&q, caps));
    let ok = k.preserves.joins
        && k.preserves.mult
        && (q.unit().is_none() || k.preserves.unit == Some(true))
        && (q.involution().is_none() || (k.target_involutive == Some(true) && k.preserves.involution == Some(true)))
        && k.injective == k.faithful;
    pass_if(ok, || {
        json!({
            "map": k.map,
            "preserves": dbg(&k.preserves),
            "target_involutive": k.target_involutive,
            "injective": k.injective,
            "faithful": k.faithful,
        })
    })
}

fn check_nuclei(doc: &StructureDoc, _: &Caps) -> Outcome {
    let q = build!(doc, Structure::Quantale(q) => q);
    for j in enumerate_nuclei(&q) {
        let quot = j.quotient();
        let p = &quot.projection;
        for a in q.elements() {
            for b in q.elements() {
                if p[q.mul(a, b)] != quot.quantale.mul(p[a], p[b]) {
                    return Outcome::Fail(json!({ "nucleus": j.closure.table(), "a": a, "b": b }));
                }
            }
        }
    }
    Outcome::Pass
}

fn check_updownsegments(doc: &StructureDoc, _: &Caps) -> Outcome {
    let m = build!(doc, Structure::Module(m) => m);
    for x in m.elements() {
        let rep = segment_modules(&m, x);
        if !rep.consistent() {
            return Outcome::Fail(json!({
                "m": x,
                "invariant": rep.invariant,
                "join_nucleus": rep.join_nucleus,
                "down_closed": rep.down_closed,
            }));
        }
    }
    Outcome::Pass
}

fn check_invvsleftsided(doc: &StructureDoc, _: &Caps) -> Outcome {
    let m = build!(doc, Structure::Module(m) => m);
    for x in m.elements() {
        let g = generator_analysis(&m, x);
        if !(g.ann_sided && g.sided_to_invariant && g.invariant_to_sided && g.reflects != Some(false)) {
            return Outcome::Fail(json!({ "x": x, "report": dbg(&g) }));
        }
    }
    Outcome::Pass
}

fn check_densequotient(doc: &StructureDoc, _: &Caps) -> Outcome {
    let m = build!(doc, Structure::Module(m) => m);
    for x in m.generators() {
        let d = match dense_quotient_factorization(&m, x) {
            Ok(d) => d,
            Err(e) => return Outcome::Fail(json!({ "x": x, "error": e.to_string() })),
        };
        let flags = [d.factors, d.projection_is_hom, d.dense_hom_is_hom, d.dense, d.surjective, d.residual_iso];
        if !flags.iter().all(|&b| b) {
            return Outcome::Fail(json!({
                "x": x,
                "factors": d.factors,
                "projection_is_hom": d.projection_is_hom,
                "dense_hom_is_hom": d.dense_hom_is_hom,
                "dense": d.dense,
                "surjective": d.surjective,
                "residual_iso": d.residual_iso,
            }));
        }
    }
    Outcome::Pass
}

fn check_principalmodules(doc: &StructureDoc, _: &Caps) -> Outcome {
    let m = build!(doc, Structure::Module(m) => m);
    let p = principal_report(&m);
    let unital = m.over().unit().is_some() && m.is_unital();
    let ok = (!p.principal
        || (p.quotients_principal == Some(true) && p.orbit_map_is_quotient == Some(true) && p.quotient_of_regular))
        && (!unital || p.principal == p.quotient_of_regular);
    pass_if(ok, || json!({ "report": dbg(&p), "unital": unital }))
}

fn check_irreducible(doc: &StructureDoc, _: &Caps) -> Outcome {
    let m = build!(doc, Structure::Module(m) => m);
    let (ep, mx) = (m.is_everywhere_principal(), m.has_generator_with_maximal_annihilator());
    pass_if(
        !(ep || mx) || m.is_irreducible(),
        || json!({ "everywhere_principal": ep, "maximal_annihilator": mx, "invariants": m.invariants() }),
    )
}

fn check_equivalent_forms(doc: &StructureDoc, _: &Caps) -> Outcome {
    let (l, r, f) = match balanced_parts(doc) {
        Ok(p) => p,
        Err(e) => return invalid(e),
    };
    match balance_report(&l, &r, &f) {
        Ok(rep) => pass_if(rep.all_agree(), || json!({ "conditions": rep.conditions(), "witness": rep.witness })),
        Err(e) => invalid(e),
    }
}

fn check_phi_n(doc: &StructureDoc, _: &Caps) -> Outcome {
    let q = build!(doc, Structure::Quantale(q) => q);
    let l = q.carrier().clone();
    let (right, left) = (Module::regular(&q, Side::Right), Module::regular(&q, Side::Left));
    for n in q.elements() {
        let form = match TwoForm::from_orthogonality(l.clone(), l.clone(), |x, y| l.leq(q.mul(x, y), n)) {
            Ok(f) => f,
            Err(e) => return Outcome::Fail(json!({ "n": n, "not_a_form": e.to_string() })),
        };
        let rep = match balance_report(&right, &left, &form) {
            Ok(r) => r,
            Err(e) => return invalid(e),
        };
        if !rep.balanced || !rep.all_agree() {
            return Outcome::Fail(json!({ "n": n, "conditions": rep.conditions(), "witness": rep.witness }));
        }
        if let Some(e) = q.unit() {
            let bf = BalancedForm { left: right.clone(), right: left.clone(), form };
            // ⋁{a : e ⊙ (a ⊙ e) ≤ n}
            let direct = l.join(q.elements().filter(|&a| l.leq(q.mul(e, q.mul(a, e)), n)));
            let o = orth(&bf, e, e);
            if o != n || direct != n {
                return Outcome::Fail(json!({ "n": n, "orth": o, "direct": direct }));
            }
        }
    }
    Outcome::Pass
}

fn balanced(doc: &StructureDoc) -> Result<BalancedForm, Outcome> {
    match Structure::from_doc(doc) {
        Ok(Structure::BalancedForm(bf)) => Ok(bf),
        Ok(_) => Err(Outcome::Skipped(format!("not applicable to {}", doc.kind().name()))),
        Err(e) => Err(invalid(e)),
    }
}

fn check_principalforms(doc: &StructureDoc, _: &Caps) -> Outcome {
    let bf = match balanced(doc) {
        Ok(b) => b,
        Err(o) => return o,
    };
    if !bf.is_principal() {
        return Outcome::Skipped("hypothesis: principal".into());
    }
    for x in bf.left.generators() {
        for y in bf.right.generators() {
            let o = match orthogonalizer(&bf, x, y) {
                Ok(o) => o,
                Err(e) => return invalid(e),
            };
            if o.value != o.via_right || o.value != o.via_left {
                return Outcome::Fail(json!({ "x": x, "y": y, "orthogonalizer": dbg(&o) }));
            }
            match principal_orthoquotient(&bf, x, y) {
                Ok(p) if p.holds() => {}
                Ok(p) => {
                    return Outcome::Fail(json!({
                        "x": x, "y": y, "n": p.n, "f": p.f, "g": p.g,
                        "surjective": p.surjective, "module_homs": p.module_homs, "orthomorphism": p.map.is_some(),
                    }))
                }
                Err(e) => return invalid(e),
            }
        }
    }
    Outcome::Pass
}

fn check_denseforms(doc: &StructureDoc, _: &Caps) -> Outcome {
    let q = build!(doc, Structure::Quantale(q) => q);
    let unital = q.unit().is_some();
    for n in q.elements() {
        for r in q.elements().filter(|&r| q.is_right_sided(r)) {
            for l in q.elements().filter(|&l| q.is_left_sided(l)) {
                if !q.carrier().leq(q.carrier().join2(r, l), n) {
                    continue;
                }
                let s = match upsegment_restricted_form(&q, n, r, l) {
                    Ok(s) => s,
                    Err(e) => return Outcome::Fail(json!({ "n": n, "r": r, "l": l, "error": e.to_string() })),
                };
                let ok = s.quotient_map.is_some()
                    && s.quotient_is_module_map
                    && s.orthogonal_quotient_factors
                    && s.right_implication(l)
                    && s.left_implication(r)
                    && (!unital || (s.right_equivalence(l) && s.left_equivalence(r)));
                if !ok {
                    return Outcome::Fail(json!({
                        "n": n, "r": r, "l": l,
                        "dense_right": s.dense_right, "dense_left": s.dense_left,
                        "greatest_left_sided": s.greatest_left_sided, "greatest_right_sided": s.greatest_right_sided,
                        "quotient_map": s.quotient_map.is_some(), "module_map": s.quotient_is_module_map,
                        "factors": s.orthogonal_quotient_factors,
                    }));
                }
            }
        }
    }
    Outcome::Pass
}

fn check_upsegment_density(doc: &StructureDoc, _: &Caps) -> Outcome {
    let bf = match balanced(doc) {
        Ok(b) => b,
        Err(o) => return o,
    };
    if !bf.is_principal() {
        return Outcome::Skipped("hypothesis: principal".into());
    }
    let unital = bf.quantale().unit().is_some() && bf.is_unital();
    for x in bf.left.generators() {
        for y in bf.right.generators() {
            let d = match principal_density(&bf, x, y) {
                Ok(d) => d,
                Err(e) => return invalid(e),
            };
            let ok = d.right_implication()
                && d.left_implication()
                && (!unital || (d.right_equivalence() && d.left_equivalence()));
            if !ok {
                return Outcome::Fail(json!({ "x": x, "y": y, "density": dbg(&d) }));
            }
        }
    }
    Outcome::Pass
}

fn check_simple_quotient(doc: &StructureDoc, _: &Caps) -> Outcome {
    let bf = match balanced(doc) {
        Ok(b) => b,
        Err(o) => return o,
    };
    let bq = balanced_orthogonal_quotient(&bf);
    pass_if(bq.holds(), || {
        json!({
            "left_nucleus": bq.left_nucleus,
            "right_nucleus": bq.right_nucleus,
            "report": bq.report.as_ref().map(|r| r.conditions().to_vec()),
        })
    })
}

fn check_symvsinv(doc: &StructureDoc, caps: &Caps) -> Outcome {
    match Structure::from_doc(doc) {
        Ok(Structure::Form(form)) => {
            if !(form.left() == form.right() && form.is_symmetric()) {
                return Outcome::Skipped("hypothesis: symmetric form".into());
            }
            let fq = cap_or!(involution_on_form_quantale(&form, caps));
            let inv = fq.quantale.involution().expect("swap involution attached");
            let faithful = form.classify().faithful();
            for (i, (f, g)) in fq.pairs.iter().enumerate() {
                let (f2, g2) = &fq.pairs[inv[i]];
                if f2 != g || g2 != f {
                    return Outcome::Fail(json!({ "pair": i, "image": inv[i] }));
                }
                if faithful && self_dual_adjoint(&form, f) != g.table() {
                    return Outcome::Fail(
                        json!({ "f": f.table(), "g": g.table(), "formula": self_dual_adjoint(&form, f) }),
                    );
                }
            }
            Outcome::Pass
        }
        Ok(Structure::Quantale(q)) => {
            if q.involution().is_none() {
                return Outcome::Skipped("hypothesis: involutive quantale".into());
            }
            let rep = cap_or!(symvsinv_report(&q, caps));
            pass_if(
                rep.symmetric_via_star && rep.phi_involution_valid && rep.matches_swap,
                || json!({ "report": dbg(&rep) }),
            )
        }
        Ok(_) => Outcome::Skipped(format!("not applicable to {}", doc.kind().name())),
        Err(e) => invalid(e),
    }
}

fn check_involutive_residuation(doc: &StructureDoc, _: &Caps) -> Outcome {
    let (m, f) = match involutive_parts(doc) {
        Ok(p) => p,
        Err(e) => return invalid(e),
    };
    match involutive_report(&m, &f) {
        Ok(rep) => pass_if(rep.consistent(), || json!({ "report": dbg(&rep) })),
        Err(InvolutiveError::NotInvolutive) => Outcome::Skipped("hypothesis: involutive quantale".into()),
        Err(InvolutiveError::NotSymmetric) => Outcome::Skipped("hypothesis: symmetric form".into()),
        Err(e) => invalid(e),
    }
}

fn check_bijection(doc: &StructureDoc, caps: &Caps) -> Outcome {
    let (q, form) = match Structure::from_doc(doc) {
        Ok(Structure::Pair(a, b)) => match (*a, *b) {
            (Structure::Quantale(q), Structure::Form(f)) => (q, f),
            _ => return Outcome::Skipped("needs a (quantale, form) pair".into()),
        },
        Ok(_) => return Outcome::Skipped(format!("not applicable to {}", doc.kind().name())),
        Err(e) => return invalid(e),
    };
    if q.involution().is_none() {
        return Outcome::Skipped("hypothesis: involutive quantale".into());
    }
    if form.left() != form.right() || !form.is_symmetric() {
        return Outcome::Skipped("hypothesis: symmetric form".into());
    }
    let rep = cap_or!(involutive_structure_bijection(&q, &form, caps));
    pass_if(rep.holds(), || {
        json!({
            "structures": rep.structures.len(),
            "homs": rep.homs.len(),
            "structures_to_homs": rep.structures_to_homs,
            "homs_to_structures": rep.homs_to_structures,
            "round_trips": rep.round_trips,
        })
    })
}

fn involutive(doc: &StructureDoc) -> Result<qf_core::involutive::InvolutiveModule, Outcome> {
    match Structure::from_doc(doc) {
        Ok(Structure::InvolutiveModule(im)) => Ok(im),
        Ok(_) => Err(Outcome::Skipped(format!("not applicable to {}", doc.kind().name()))),
        Err(e) => Err(invalid(e)),
    }
}

fn check_selfadjoint(doc: &StructureDoc, _: &Caps) -> Outcome {
    let im = match involutive(doc) {
        Ok(im) => im,
        Err(o) => return o,
    };
    for x in im.module.elements() {
        let s = self_adjoint_orthogonalizer(&im, x);
        if s.generator && !s.self_adjoint {
            return Outcome::Fail(json!({ "x": x, "orth": s.value, "star": im.quantale().star(s.value) }));
        }
    }
    Outcome::Pass
}

/// Generators whose `↑ann(x)` segment form is faithful, for coverage checks.
pub fn faithful_segment_generators(doc: &StructureDoc) -> usize {
    let Ok(im) = involutive(doc) else { return 0 };
    im.module
        .generators()
        .into_iter()
        .filter(|&x| upseg_ann_involutive(&im, x).is_ok_and(|u| u.segment_faithful && u.isomorphism == Some(true)))
        .count()
}

fn check_upsegannx(doc: &StructureDoc, _: &Caps) -> Outcome {
    let im = match involutive(doc) {
        Ok(im) => im,
        Err(o) => return o,
    };
    for x in im.module.generators() {
        match upseg_ann_involutive(&im, x) {
            Ok(u) if u.holds() => {}
            Ok(u) => {
                return Outcome::Fail(json!({
                    "x": x, "ann": u.ann, "n": u.n, "ann_below_n": u.ann_below_n, "map": u.map,
                    "surjective": u.surjective, "involutive_hom": u.involutive_hom,
                    "segment_faithful": u.segment_faithful, "isomorphism": u.isomorphism,
                }))
            }
            Err(e) => return Outcome::Fail(json!({ "x": x, "error": e.to_string() })),
        }
    }
    Outcome::Pass
}

pub fn accepts(law: &Law, doc: &StructureDoc) -> bool {
    law.accepts.contains(&doc.kind())
}
