//! Involutive quantales acting on symmetric forms.
//!
//! An [`InvolutiveModule`] is a left module `M` over an involutive quantale
//! together with a symmetric form on `M × M` such that
//! `⟨a*·x|y⟩ = ⟨x|a·y⟩`. Reading `x·a = a*·x` turns it into a balanced form,
//! so the orthogonalizer and segment constructions of [`crate::qmodules`]
//! apply.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::forms::{FormError, Orthomorphism, TwoForm};
use crate::lattice::{enumerate_join_homs, enumerate_sup_lattices, JoinHom, Lattice};
use crate::qmodules::{self, enumerate_modules_on, BalancedForm, Module, ModuleError};
use crate::quantales::{
    check_quantale_hom, form_quantale, phi_involution, phi_of_quantale, FormQuantale, Quantale, QuantaleError,
};
use crate::{Caps, Elem, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvolutiveError {
    #[error("the form is not symmetric")]
    NotSymmetric,
    #[error("the quantale has no involution")]
    NotInvolutive,
    #[error("module, form and quantale do not fit: {0}")]
    Mismatch(&'static str),
    #[error("<a*x|y> differs from <x|ay> at (a, x, y) = ({a}, {x}, {y})")]
    LawViolated { a: Elem, x: Elem, y: Elem },
    #[error("{0} is not a generator")]
    NotAGenerator(Elem),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `Q(φ)` of a symmetric form with `(f, g)* = (g, f)`.
pub fn involution_on_form_quantale(form: &TwoForm, caps: &Caps) -> Result<FormQuantale, InvolutiveError> {
    if !form.is_symmetric() {
        return Err(InvolutiveError::NotSymmetric);
    }
    let mut fq = form_quantale(form, caps)?;
    let index: HashMap<(&[Elem], &[Elem]), Elem> =
        fq.pairs.iter().enumerate().map(|(i, (f, g))| ((f.table(), g.table()), i)).collect();
    let swap: Vec<Elem> = fq
        .pairs
        .iter()
        .map(|(f, g)| *index.get(&(g.table(), f.table())).expect("swapped pairs stay continuous"))
        .collect();
    fq.quantale = fq.quantale.clone().with_involution(swap)?;
    Ok(fq)
}

/// `f*(y) = (⋁{x : f(x) ≤ y^⊥})^⊥` for a symmetric form.
pub fn self_dual_adjoint(form: &TwoForm, f: &JoinHom) -> Vec<Elem> {
    let f_star = f.right_adjoint();
    form.left().elements().map(|y| form.right_orth(f_star[form.right_orth(y)])).collect()
}

/// Facts about `Φ(Q)` for an involutive `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymVsInvReport {
    /// `(id, *)` is an isomorphism from `Φ(Q)` onto a symmetric form on `ls(Q)`.
    pub symmetric_via_star: bool,
    /// `(f, g) ↦ (g', f')` validates as an involution on `Q(Φ(Q))`.
    pub phi_involution_valid: bool,
    /// It agrees with the swap involution transported along `(id, *)`.
    pub matches_swap: bool,
}

pub fn symvsinv_report(q: &Quantale, caps: &Caps) -> Result<SymVsInvReport, InvolutiveError> {
    let inv = q.involution().ok_or(InvolutiveError::NotInvolutive)?;
    let phi = phi_of_quantale(q);
    let (ls, rs) = (&phi.ls, &phi.rs);
    // a ↦ a* carries ls onto rs
    let star: Option<Vec<Elem>> = ls.lattice.elements().map(|a| rs.local(inv[ls.parent(a)])).collect();
    let Some(star) = star else {
        return Ok(SymVsInvReport { symmetric_via_star: false, phi_involution_valid: false, matches_swap: false });
    };
    let sym = TwoForm::from_fn(ls.lattice.clone(), ls.lattice.clone(), |a, b| phi.form.value(a, star[b]))?;
    let star_iso = JoinHom::new(ls.lattice.clone(), rs.lattice.clone(), star.clone())
        .map(|h| h.is_order_isomorphism())
        .unwrap_or(false);
    let symmetric_via_star = star_iso && sym.is_symmetric();

    let fq = form_quantale(&phi.form, caps)?;
    let phi_inv = phi_involution(q, &phi, &fq);
    let phi_involution_valid = phi_inv.as_ref().is_some_and(|t| fq.quantale.clone().with_involution(t.clone()).is_ok());

    let matches_swap = symmetric_via_star
        && phi_inv.is_some_and(|t| {
            let unstar: Vec<Elem> = (0..star.len()).map(|b| star.iter().position(|&s| s == b).unwrap()).collect();
            let index: HashMap<(&[Elem], &[Elem]), Elem> =
                fq.pairs.iter().enumerate().map(|(i, (f, g))| ((f.table(), g.table()), i)).collect();
            fq.pairs.iter().enumerate().all(|(i, (f, g))| {
                // transport g: rs → rs to ls → ls, swap, transport back
                let g_ls: Vec<Elem> = ls.lattice.elements().map(|a| unstar[g.apply(star[a])]).collect();
                let f_rs: Vec<Elem> = rs.lattice.elements().map(|b| star[f.apply(unstar[b])]).collect();
                index.get(&(g_ls.as_slice(), f_rs.as_slice())) == Some(&t[i])
            })
        });
    Ok(SymVsInvReport { symmetric_via_star, phi_involution_valid, matches_swap })
}

/// Whether `Φ(Q)` is isomorphic to some symmetric form (by search).
pub fn phi_isomorphic_to_symmetric(q: &Quantale) -> bool {
    let phi = phi_of_quantale(q);
    let (l, r) = (phi.form.left().clone(), phi.form.right().clone());
    let Some(iso) = r.find_isomorphism(&l) else { return false };
    // for each automorphism of L, test symmetry of the transported form
    let mut found = false;
    l.for_each_isomorphism(&l, &mut |auto| {
        let t = TwoForm::from_fn(l.clone(), l.clone(), |a, b| {
            let y = (0..iso.len()).find(|&y| iso[y] == auto[b]).unwrap();
            phi.form.value(a, y)
        });
        if t.is_ok_and(|t| t.is_symmetric()) {
            found = true;
            return false;
        }
        true
    });
    found
}

/// The defining law and its residuation characterizations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveReport {
    pub law: bool,
    /// `(a*x)^⊥ = a\(x^⊥)`
    pub residuation: bool,
    /// For faithful forms: `a*x = (a\(x^⊥))^⊥`.
    pub faithful_formula: Option<bool>,
    pub witness: Option<(Elem, Elem, Elem)>,
}

impl InvolutiveReport {
    pub fn consistent(&self) -> bool {
        self.law == self.residuation && self.faithful_formula.is_none_or(|f| f == self.law)
    }
}

pub fn involutive_report(module: &Module, form: &TwoForm) -> Result<InvolutiveReport, InvolutiveError> {
    let q = module.over().clone();
    let inv = q.involution().ok_or(InvolutiveError::NotInvolutive)?;
    if module.side() != Side::Left {
        return Err(InvolutiveError::Mismatch("involutive modules are left modules"));
    }
    if form.left() != module.carrier() || form.right() != module.carrier() {
        return Err(InvolutiveError::Mismatch("form lattices differ from the module carrier"));
    }
    if !form.is_symmetric() {
        return Err(InvolutiveError::NotSymmetric);
    }
    let mut witness = None;
    'outer: for a in q.elements() {
        for x in module.elements() {
            for y in module.elements() {
                if form.value(module.act(inv[a], x), y) != form.value(x, module.act(a, y)) {
                    witness = Some((a, x, y));
                    break 'outer;
                }
            }
        }
    }
    let residuation = q.elements().all(|a| {
        module
            .elements()
            .all(|x| form.right_orth(module.act(inv[a], x)) == module.carrier_residual(a, form.right_orth(x)))
    });
    let faithful_formula = form.classify().faithful().then(|| {
        q.elements().all(|a| {
            module
                .elements()
                .all(|x| module.act(inv[a], x) == form.right_orth(module.carrier_residual(a, form.right_orth(x))))
        })
    });
    Ok(InvolutiveReport { law: witness.is_none(), residuation, faithful_formula, witness })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveModule {
    pub module: Module,
    pub form: TwoForm,
}

impl InvolutiveModule {
    pub fn new(module: Module, form: TwoForm) -> Result<Self, InvolutiveError> {
        let rep = involutive_report(&module, &form)?;
        if let Some((a, x, y)) = rep.witness {
            return Err(InvolutiveError::LawViolated { a, x, y });
        }
        Ok(InvolutiveModule { module, form })
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        self.module.over()
    }

    pub fn report(&self) -> InvolutiveReport {
        involutive_report(&self.module, &self.form).expect("validated")
    }

    /// The balanced form with `x·a = a*·x` on the left copy of `M`.
    pub fn as_balanced(&self) -> BalancedForm {
        let q = self.quantale().clone();
        let m = &self.module;
        let right = Module::from_fn(Side::Right, q.clone(), m.carrier().clone(), |a, x| m.act(q.star(a), x))
            .expect("a*x is a right action");
        BalancedForm::new(right, m.clone(), self.form.clone()).expect("involutive modules are balanced")
    }

    /// `orth(x, y) = ⋁{a : x ⊥ a·y}`.
    pub fn orth(&self, x: Elem, y: Elem) -> Elem {
        let q = self.quantale().carrier();
        q.join(q.elements().filter(|&a| self.form.orthogonal(x, self.module.act(a, y))))
    }
}

/// `check_involutive_module`: validates and reports.
pub fn check_involutive_module(
    module: &Module,
    form: &TwoForm,
) -> Result<(InvolutiveModule, InvolutiveReport), InvolutiveError> {
    let im = InvolutiveModule::new(module.clone(), form.clone())?;
    let rep = im.report();
    Ok((im, rep))
}

/// Module homomorphism `f` with `⟨f(x)|f(y)⟩ = ⟨x|y⟩`.
pub fn is_involutive_hom(src: &InvolutiveModule, dst: &InvolutiveModule, table: &[Elem]) -> bool {
    src.module.is_hom_to(&dst.module, table)
        && src
            .module
            .elements()
            .all(|x| src.module.elements().all(|y| dst.form.value(table[x], table[y]) == src.form.value(x, y)))
}

/// Both sides of the correspondence between involutive structures on
/// `(M, φ)` and involution-preserving homomorphisms `Q → Q(φ)`, each found
/// by its own exhaustive search.
#[derive(Clone, Debug)]
pub struct BijectionReport {
    /// Action tables (row per quantale element) of the involutive structures.
    pub structures: Vec<Vec<Vec<Elem>>>,
    /// Homomorphisms as tables into the elements of `Q(φ)`.
    pub homs: Vec<Vec<Elem>>,
    /// Each structure's `a ↦ (x ↦ a*x, y ↦ ay)` is one of the homs.
    pub structures_to_homs: bool,
    /// Each hom's second components form one of the structures.
    pub homs_to_structures: bool,
    pub round_trips: bool,
}

impl BijectionReport {
    pub fn holds(&self) -> bool {
        self.structures_to_homs
            && self.homs_to_structures
            && self.round_trips
            && self.structures.len() == self.homs.len()
    }
}

pub fn involutive_structure_bijection(
    q: &Arc<Quantale>,
    form: &TwoForm,
    caps: &Caps,
) -> Result<BijectionReport, InvolutiveError> {
    let inv = q.involution().ok_or(InvolutiveError::NotInvolutive)?.to_vec();
    let fq = involution_on_form_quantale(form, caps)?;
    let m = form.left().clone();

    let structures: Vec<Vec<Vec<Elem>>> = enumerate_modules_on(q, &m, Side::Left)
        .into_iter()
        .filter(|md| involutive_report(md, form).is_ok_and(|r| r.law))
        .map(|md| md.action_table())
        .collect();

    let homs: Vec<Vec<Elem>> = enumerate_join_homs(q.carrier(), fq.quantale.carrier())
        .into_iter()
        .map(|h| h.table().to_vec())
        .filter(|t| {
            let c = check_quantale_hom(q, &fq.quantale, t);
            c.mult && c.involution == Some(true)
        })
        .collect();

    let to_hom = |action: &Vec<Vec<Elem>>| -> Option<Vec<Elem>> {
        q.elements()
            .map(|a| {
                let f: Vec<Elem> = m.elements().map(|x| action[inv[a]][x]).collect();
                let g: Vec<Elem> = m.elements().map(|y| action[a][y]).collect();
                fq.pairs.iter().position(|(pf, pg)| pf.table() == f.as_slice() && pg.table() == g.as_slice())
            })
            .collect()
    };
    let to_structure =
        |h: &Vec<Elem>| -> Vec<Vec<Elem>> { q.elements().map(|a| fq.pairs[h[a]].1.table().to_vec()).collect() };
    let hom_set: BTreeSet<&Vec<Elem>> = homs.iter().collect();
    let structure_set: BTreeSet<&Vec<Vec<Elem>>> = structures.iter().collect();
    let structures_to_homs = structures.iter().all(|s| to_hom(s).is_some_and(|h| hom_set.contains(&h)));
    let homs_to_structures = homs.iter().all(|h| structure_set.contains(&to_structure(h)));
    let round_trips = structures.iter().all(|s| to_hom(s).is_some_and(|h| &to_structure(&h) == s))
        && homs.iter().all(|h| to_hom(&to_structure(h)).as_ref() == Some(h));
    Ok(BijectionReport { structures, homs, structures_to_homs, homs_to_structures, round_trips })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelfAdjoint {
    pub value: Elem,
    pub self_adjoint: bool,
    pub generator: bool,
}

pub fn self_adjoint_orthogonalizer(im: &InvolutiveModule, x: Elem) -> SelfAdjoint {
    let value = im.orth(x, x);
    SelfAdjoint { value, self_adjoint: im.quantale().star(value) == value, generator: im.module.is_generator(x) }
}

/// `↑m` as a left module quotient of `Q`, with `a ⊥ b ⟺ a* ⊙ b ≤ n`.
pub fn upsegment_involutive(
    q: &Arc<Quantale>,
    m: Elem,
    n: Elem,
) -> Result<(InvolutiveModule, Vec<Elem>), InvolutiveError> {
    let inv = q.involution().ok_or(InvolutiveError::NotInvolutive)?;
    let l = q.carrier();
    if !q.is_left_sided(m) {
        return Err(InvolutiveError::PreconditionViolated("m must be left-sided"));
    }
    if inv[n] != n {
        return Err(InvolutiveError::PreconditionViolated("n must be self-adjoint"));
    }
    if !l.leq(m, n) {
        return Err(InvolutiveError::PreconditionViolated("m must lie below n"));
    }
    let report = qmodules::segment_modules(&Module::regular(q, Side::Left), m);
    let seg = report.up.ok_or(InvolutiveError::PreconditionViolated("m must be invariant"))?;
    let embed = seg.embed.clone();
    let form = TwoForm::from_orthogonality(seg.module.carrier().clone(), seg.module.carrier().clone(), |a, b| {
        l.leq(q.mul(inv[embed[a]], embed[b]), n)
    })?;
    Ok((InvolutiveModule::new(seg.module, form)?, seg.embed))
}

/// `↑ann(x)` with `a ⊥_x b ⟺ a* ⊙ b ≤ orth(x, x)` and the map `a ↦ a·x`.
#[derive(Clone, Debug)]
pub struct UpsegAnn {
    pub ann: Elem,
    pub n: Elem,
    pub ann_below_n: bool,
    pub segment: InvolutiveModule,
    /// Parent element of each segment element.
    pub embed: Vec<Elem>,
    /// `a ↦ a·x` in segment-local indices.
    pub map: Vec<Elem>,
    pub surjective: bool,
    pub involutive_hom: bool,
    pub segment_faithful: bool,
    /// For faithful segment forms: the map is an isomorphism of involutive modules.
    pub isomorphism: Option<bool>,
}

impl UpsegAnn {
    pub fn holds(&self) -> bool {
        self.ann_below_n && self.surjective && self.involutive_hom && self.isomorphism != Some(false)
    }
}

pub fn upseg_ann_involutive(im: &InvolutiveModule, x: Elem) -> Result<UpsegAnn, InvolutiveError> {
    if !im.module.is_generator(x) {
        return Err(InvolutiveError::NotAGenerator(x));
    }
    let q = im.quantale().clone();
    let ann = im.module.ann(x);
    let n = im.orth(x, x);
    let ann_below_n = q.carrier().leq(ann, n);
    let (segment, embed) = upsegment_involutive(&q, ann, n)?;
    let map: Vec<Elem> = embed.iter().map(|&a| im.module.act(a, x)).collect();
    let surjective = map.iter().collect::<BTreeSet<_>>().len() == im.module.len();
    let involutive_hom = is_involutive_hom(&segment, im, &map);
    let segment_faithful = segment.form.classify().faithful();
    let isomorphism = segment_faithful.then(|| {
        let bijective = surjective && map.len() == im.module.len();
        bijective
            && JoinHom::new(segment.module.carrier().clone(), im.module.carrier().clone(), map.clone())
                .is_ok_and(|h| h.is_order_isomorphism())
            && involutive_hom
    });
    Ok(UpsegAnn { ann, n, ann_below_n, segment, embed, map, surjective, involutive_hom, segment_faithful, isomorphism })
}

/// `upseg_ann_involutive` checked as an orthomorphism of forms.
pub fn upseg_map_orthomorphism(u: &UpsegAnn, im: &InvolutiveModule) -> Option<Orthomorphism> {
    let f = JoinHom::new(u.segment.module.carrier().clone(), im.module.carrier().clone(), u.map.clone()).ok()?;
    Orthomorphism::new(f.clone(), f, &u.segment.form, &im.form).ok()
}

/// All involutive modules over `q` on lattices with at most `max_n` elements.
pub fn enumerate_involutive_modules(
    q: &Arc<Quantale>,
    max_n: usize,
    caps: &Caps,
) -> Result<Vec<InvolutiveModule>, InvolutiveError> {
    if q.involution().is_none() {
        return Err(InvolutiveError::NotInvolutive);
    }
    let mut out = Vec::new();
    for k in 1..=max_n {
        for l in enumerate_sup_lattices(k, caps).map_err(ModuleError::from)? {
            let l = Arc::new(l);
            let forms: Vec<TwoForm> =
                crate::forms::enumerate_two_forms(&l, &l, caps)?.into_iter().filter(TwoForm::is_symmetric).collect();
            for m in enumerate_modules_on(q, &l, Side::Left) {
                for f in &forms {
                    if let Ok(im) = InvolutiveModule::new(m.clone(), f.clone()) {
                        out.push(im);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Symmetric forms on `L × L`.
pub fn symmetric_forms(l: &Arc<Lattice>, caps: &Caps) -> Result<Vec<TwoForm>, InvolutiveError> {
    Ok(crate::forms::enumerate_two_forms(l, l, caps)?.into_iter().filter(TwoForm::is_symmetric).collect())
}
