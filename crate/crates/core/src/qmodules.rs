//! Left and right quantale modules, principal modules, and 2-forms over a
//! quantale.
//!
//! A [`Module`] stores its action as a table indexed by quantale element and
//! carrier element, whatever its side: for a left module the entry at
//! `(a, x)` is `a·x`, for a right module it is `x·a`. Most predicates are
//! side-generic: "sided" means left-sided for left modules and right-sided for
//! right modules, and the quantale-valued residual of `m` by `x` is `m/x`
//! for left modules and `x\m` for right ones.
//!
//! A [`BalancedForm`] is a 2-form `L × R → 2` with `L` a right module and `R`
//! a left module over the same quantale, satisfying `⟨x·a|y⟩ = ⟨x|a·y⟩`.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::forms::{orthogonal_quotient, FormError, Orthomorphism, TwoForm};
use crate::lattice::{
    enumerate_join_homs, enumerate_sup_lattices, ClosureOperator, JoinHom, Lattice, LatticeError, SubLattice,
};
use crate::quantales::{Quantale, QuantaleError};
use crate::residuation::{check_bimorphism, Bimorphism, BimorphismViolation};
use crate::{Caps, Elem, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("action table has the wrong shape: expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize },
    #[error("action entry {value} is out of range")]
    OutOfRange { value: usize },
    #[error("action is not a bimorphism: {0:?}")]
    NotBimorphic(BimorphismViolation),
    #[error("action is not associative at ({0}, {1}, {2})")]
    NotAssociativeAction(Elem, Elem, Elem),
    #[error("{0} is not a generator")]
    NotAGenerator(Elem),
    #[error("module has no generator")]
    NotPrincipal,
    #[error("module sides or quantales do not fit: {0}")]
    Mismatch(&'static str),
    #[error("not balanced: <{x}a|{y}> differs from <{x}|a{y}> at a = {a}")]
    NotBalanced { x: Elem, a: Elem, y: Elem },
    #[error("not a module nucleus at ({a}, {x})")]
    NotNucleus { a: Elem, x: Elem },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Module {
    side: Side,
    over: Arc<Quantale>,
    carrier: Arc<Lattice>,
    action: Vec<Elem>,
}

impl Bimorphism for Module {
    fn left(&self) -> &Lattice {
        match self.side {
            Side::Left => self.over.carrier(),
            Side::Right => &self.carrier,
        }
    }
    fn right(&self) -> &Lattice {
        match self.side {
            Side::Left => &self.carrier,
            Side::Right => self.over.carrier(),
        }
    }
    fn target(&self) -> &Lattice {
        &self.carrier
    }
    fn apply(&self, u: Elem, v: Elem) -> Elem {
        match self.side {
            Side::Left => self.act(u, v),
            Side::Right => self.act(v, u),
        }
    }
}

impl Module {
    /// Validates an action table; `action[a][x]` is `a·x` (left) or `x·a` (right).
    pub fn new(
        side: Side,
        over: Arc<Quantale>,
        carrier: Arc<Lattice>,
        action: &[Vec<Elem>],
    ) -> Result<Self, ModuleError> {
        if action.len() != over.len() || action.iter().any(|r| r.len() != carrier.len()) {
            return Err(ModuleError::ShapeMismatch { rows: over.len(), cols: carrier.len() });
        }
        Self::from_flat(side, over, carrier, action.concat())
    }

    pub fn from_fn(
        side: Side,
        over: Arc<Quantale>,
        carrier: Arc<Lattice>,
        f: impl Fn(Elem, Elem) -> Elem,
    ) -> Result<Self, ModuleError> {
        let mut action = Vec::with_capacity(over.len() * carrier.len());
        for a in over.elements() {
            for x in carrier.elements() {
                action.push(f(a, x));
            }
        }
        Self::from_flat(side, over, carrier, action)
    }

    fn from_flat(
        side: Side,
        over: Arc<Quantale>,
        carrier: Arc<Lattice>,
        action: Vec<Elem>,
    ) -> Result<Self, ModuleError> {
        if action.len() != over.len() * carrier.len() {
            return Err(ModuleError::ShapeMismatch { rows: over.len(), cols: carrier.len() });
        }
        if let Some(&value) = action.iter().find(|&&v| v >= carrier.len()) {
            return Err(ModuleError::OutOfRange { value });
        }
        let m = Module { side, over, carrier, action };
        check_bimorphism(&m).map_err(ModuleError::NotBimorphic)?;
        let q = &m.over;
        for a in q.elements() {
            for b in q.elements() {
                let ab = q.mul(a, b);
                for x in m.carrier.elements() {
                    let ok = match side {
                        Side::Left => m.act(ab, x) == m.act(a, m.act(b, x)),
                        Side::Right => m.act(ab, x) == m.act(b, m.act(a, x)),
                    };
                    if !ok {
                        return Err(ModuleError::NotAssociativeAction(a, b, x));
                    }
                }
            }
        }
        Ok(m)
    }

    /// `Q` acting on itself by multiplication.
    pub fn regular(q: &Arc<Quantale>, side: Side) -> Self {
        let f = |a, x| match side {
            Side::Left => q.mul(a, x),
            Side::Right => q.mul(x, a),
        };
        Self::from_fn(side, q.clone(), q.carrier().clone(), f).expect("multiplication is an action")
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn over(&self) -> &Arc<Quantale> {
        &self.over
    }

    pub fn carrier(&self) -> &Arc<Lattice> {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        self.carrier.elements()
    }

    /// `a·x` for left modules, `x·a` for right modules.
    #[inline]
    pub fn act(&self, a: Elem, x: Elem) -> Elem {
        self.action[a * self.carrier.len() + x]
    }

    pub fn action_table(&self) -> Vec<Vec<Elem>> {
        self.action.chunks(self.carrier.len().max(1)).map(|r| r.to_vec()).collect()
    }

    /// Whether the unit acts as the identity (false over non-unital quantales).
    pub fn is_unital(&self) -> bool {
        self.over.unit().is_some_and(|e| self.elements().all(|x| self.act(e, x) == x))
    }

    /// Left-sided for left modules, right-sided for right modules.
    pub fn is_sided(&self, a: Elem) -> bool {
        match self.side {
            Side::Left => self.over.is_left_sided(a),
            Side::Right => self.over.is_right_sided(a),
        }
    }

    /// `m/x` (left) or `x\m` (right): `⋁{a ∈ Q : a acting on x ≤ m}`.
    pub fn quantale_residual(&self, x: Elem, m: Elem) -> Elem {
        let q = self.over.carrier();
        q.join(q.elements().filter(|&a| self.carrier.leq(self.act(a, x), m)))
    }

    /// `a\z` (left) or `z/a` (right): `⋁{x ∈ M : a acting on x ≤ z}`.
    pub fn carrier_residual(&self, a: Elem, z: Elem) -> Elem {
        self.carrier.join(self.elements().filter(|&x| self.carrier.leq(self.act(a, x), z)))
    }

    /// `ann(x)`: `0/x` for left modules, `x\0` for right modules.
    pub fn ann(&self, x: Elem) -> Elem {
        self.quantale_residual(x, self.carrier.bottom())
    }

    pub fn is_invariant(&self, x: Elem) -> bool {
        self.over.elements().all(|a| self.carrier.leq(self.act(a, x), x))
    }

    pub fn invariants(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.is_invariant(x)).collect()
    }

    /// `Qx`
    pub fn orbit(&self, x: Elem) -> BTreeSet<Elem> {
        self.over.elements().map(|a| self.act(a, x)).collect()
    }

    pub fn is_generator(&self, x: Elem) -> bool {
        self.orbit(x).len() == self.len()
    }

    pub fn generators(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.is_generator(x)).collect()
    }

    /// The lowest-index generator.
    pub fn first_generator(&self) -> Option<Elem> {
        self.elements().find(|&x| self.is_generator(x))
    }

    pub fn is_principal(&self) -> bool {
        self.first_generator().is_some()
    }

    /// No invariant elements besides `0` and `1`.
    pub fn is_irreducible(&self) -> bool {
        let ends: BTreeSet<Elem> = [self.carrier.bottom(), self.carrier.top()].into();
        self.invariants().into_iter().collect::<BTreeSet<_>>() == ends
    }

    /// Every nonzero element lies above a generator.
    pub fn is_everywhere_principal(&self) -> bool {
        let gens = self.generators();
        self.elements().filter(|&m| m != self.carrier.bottom()).all(|m| gens.iter().any(|&x| self.carrier.leq(x, m)))
    }

    /// Whether `a` is a maximal proper sided element of `Q` (sided in the
    /// module's handedness).
    pub fn is_maximal_sided(&self, a: Elem) -> bool {
        let q = self.over.as_ref();
        let top = q.top();
        a != top && self.is_sided(a) && q.elements().all(|s| !(self.is_sided(s) && q.carrier().lt(a, s)) || s == top)
    }

    /// Some generator `x` has `ann(x)` maximal among proper sided elements.
    pub fn has_generator_with_maximal_annihilator(&self) -> bool {
        self.generators().into_iter().any(|x| self.is_maximal_sided(self.ann(x)))
    }

    /// Whether `table` is a homomorphism of modules `self → dst`.
    pub fn is_hom_to(&self, dst: &Module, table: &[Elem]) -> bool {
        self.side == dst.side
            && self.over == dst.over
            && JoinHom::new(self.carrier.clone(), dst.carrier.clone(), table.to_vec()).is_ok()
            && self.over.elements().all(|a| self.elements().all(|x| table[self.act(a, x)] == dst.act(a, table[x])))
    }

    /// Whether `elems` is a submodule: join-closed, contains `0`, closed under the action.
    pub fn is_submodule(&self, elems: &[Elem]) -> bool {
        let set: BTreeSet<Elem> = elems.iter().copied().collect();
        SubLattice::join_closed(&self.carrier, elems).is_ok()
            && set.iter().all(|&x| self.over.elements().all(|a| set.contains(&self.act(a, x))))
    }

    /// The submodule on `elems` with the restricted action.
    pub fn submodule(&self, elems: &[Elem]) -> Option<Segment> {
        if !self.is_submodule(elems) {
            return None;
        }
        let sub = SubLattice::join_closed(&self.carrier, elems).ok()?;
        let module = Module::from_fn(self.side, self.over.clone(), sub.lattice.clone(), |a, x| {
            sub.local(self.act(a, sub.parent(x))).expect("closed under the action")
        })
        .ok()?;
        Some(Segment { module, embed: sub.embed })
    }
}

/// A module built on a subset of a parent module's carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub module: Module,
    /// Parent element of each local element.
    pub embed: Vec<Elem>,
}

impl Segment {
    pub fn local(&self, parent: Elem) -> Option<Elem> {
        self.embed.binary_search(&parent).ok()
    }
}

/// `validate_module` as a free function.
pub fn validate_module(
    q: &Arc<Quantale>,
    carrier: &Arc<Lattice>,
    action: &[Vec<Elem>],
    side: Side,
) -> Result<Module, ModuleError> {
    Module::new(side, q.clone(), carrier.clone(), action)
}

/// A nucleus on a module: a closure `k` with `a·k(x) ≤ k(a·x)` (or the
/// mirror for right modules).
#[derive(Clone, Debug)]
pub struct ModuleNucleus {
    pub module: Module,
    pub closure: ClosureOperator,
}

impl ModuleNucleus {
    pub fn new(module: &Module, table: Vec<Elem>) -> Result<Self, ModuleError> {
        let closure = ClosureOperator::new(module.carrier.clone(), table)?;
        Self::from_closure(module, closure)
    }

    pub fn from_closure(module: &Module, closure: ClosureOperator) -> Result<Self, ModuleError> {
        for a in module.over.elements() {
            for x in module.elements() {
                if !module.carrier.leq(module.act(a, closure.apply(x)), closure.apply(module.act(a, x))) {
                    return Err(ModuleError::NotNucleus { a, x });
                }
            }
        }
        Ok(ModuleNucleus { module: module.clone(), closure })
    }

    /// The quotient module on the fixed points, with action `k(a·x)`, and
    /// the projection `x ↦ k(x)` in local indices.
    pub fn quotient(&self) -> (Segment, Vec<Elem>) {
        let cq = self.closure.quotient();
        let fixed = cq.fixed;
        let m = &self.module;
        let module = Module::from_fn(m.side, m.over.clone(), fixed.lattice.clone(), |a, x| {
            fixed.local(self.closure.apply(m.act(a, fixed.parent(x)))).expect("closed")
        })
        .expect("quotients by module nuclei are modules");
        (Segment { module, embed: fixed.embed }, cq.projection.table().to_vec())
    }
}

/// All nuclei on a module.
pub fn enumerate_module_nuclei(m: &Module) -> Vec<ModuleNucleus> {
    let l = m.carrier.clone();
    let mut out = Vec::new();
    fn rec(m: &Module, l: &Lattice, i: usize, table: &mut Vec<Elem>, out: &mut Vec<ModuleNucleus>) {
        if i == l.len() {
            if let Ok(n) = ModuleNucleus::new(m, table.clone()) {
                out.push(n);
            }
            return;
        }
        for v in l.up_set(i) {
            table[i] = v;
            rec(m, l, i + 1, table, out);
        }
    }
    rec(m, &l, 0, &mut vec![0; l.len()], &mut out);
    out
}

/// The three conditions on `m` that are supposed to coincide, and the
/// segment modules when `m` is invariant.
#[derive(Clone, Debug)]
pub struct SegmentReport {
    pub invariant: bool,
    /// `x ↦ x ∨ m` is a module nucleus.
    pub join_nucleus: bool,
    /// `↓m` is closed under the action.
    pub down_closed: bool,
    /// `↑m` with action `a·x ∨ m`.
    pub up: Option<Segment>,
    /// `↓m` with the restricted action.
    pub down: Option<Segment>,
}

impl SegmentReport {
    pub fn consistent(&self) -> bool {
        self.invariant == self.join_nucleus
            && self.invariant == self.down_closed
            && self.up.is_some() == self.invariant
            && self.down.is_some() == self.invariant
    }
}

/// `↑m` as the quotient by `x ↦ x ∨ m`, built without checking invariance.
fn up_segment_unchecked(module: &Module, m: Elem) -> Result<Segment, ModuleError> {
    let l = &module.carrier;
    let sub = SubLattice::induced(l, &l.up_set(m))?;
    let seg = Module::from_fn(module.side, module.over.clone(), sub.lattice.clone(), |a, x| {
        sub.local(l.join2(module.act(a, sub.parent(x)), m)).expect("lands above m")
    })?;
    Ok(Segment { module: seg, embed: sub.embed })
}

pub fn segment_modules(module: &Module, m: Elem) -> SegmentReport {
    let l = &module.carrier;
    let invariant = module.is_invariant(m);
    let join_closure =
        ClosureOperator::new(l.clone(), l.elements().map(|x| l.join2(x, m)).collect()).expect("x ↦ x ∨ m is a closure");
    let join_nucleus = ModuleNucleus::from_closure(module, join_closure).is_ok();
    let down_closed = module.is_submodule(&l.down_set(m));
    let (up, down) =
        if invariant { (up_segment_unchecked(module, m).ok(), module.submodule(&l.down_set(m))) } else { (None, None) };
    SegmentReport { invariant, join_nucleus, down_closed, up, down }
}

/// Facts about one element `x` of a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorReport {
    pub is_generator: bool,
    pub ann: Elem,
    pub ann_sided: bool,
    /// Sided elements act on `x` to give invariants.
    pub sided_to_invariant: bool,
    /// The residual by `x` sends invariants to sided elements.
    pub invariant_to_sided: bool,
    /// For generators: `m` invariant iff its residual by `x` is sided.
    pub reflects: Option<bool>,
    /// `(↑ann(x))x = M`
    pub upper_orbit_is_all: bool,
}

pub fn generator_analysis(module: &Module, x: Elem) -> GeneratorReport {
    let q = module.over.as_ref();
    let is_generator = module.is_generator(x);
    let ann = module.ann(x);
    let sided_to_invariant =
        q.elements().filter(|&a| module.is_sided(a)).all(|a| module.is_invariant(module.act(a, x)));
    let invariant_to_sided = module.invariants().into_iter().all(|m| module.is_sided(module.quantale_residual(x, m)));
    let reflects = is_generator
        .then(|| module.elements().all(|m| module.is_invariant(m) == module.is_sided(module.quantale_residual(x, m))));
    let upper: BTreeSet<Elem> = q.carrier().up_set(ann).into_iter().map(|a| module.act(a, x)).collect();
    GeneratorReport {
        is_generator,
        ann,
        ann_sided: module.is_sided(ann),
        sided_to_invariant,
        invariant_to_sided,
        reflects,
        upper_orbit_is_all: upper.len() == module.len(),
    }
}

/// `(-)x: Q → M` factored as `Q → ↑ann(x) → M`.
#[derive(Clone, Debug)]
pub struct DenseQuotient {
    /// `↑ann(x)` as a quotient of the regular module on the same side.
    pub up: Segment,
    /// `a ↦ a ∨ ann(x)`, into local indices of `up`.
    pub projection: Vec<Elem>,
    /// `a ↦ a·x` on `↑ann(x)`.
    pub dense_hom: Vec<Elem>,
    pub factors: bool,
    pub projection_is_hom: bool,
    pub dense_hom_is_hom: bool,
    pub dense: bool,
    pub surjective: bool,
    /// `m ↦ m/x` is an order isomorphism from `M` onto `{m/x : m ∈ M}`.
    pub residual_iso: bool,
}

pub fn dense_quotient_factorization(module: &Module, x: Elem) -> Result<DenseQuotient, ModuleError> {
    if !module.is_generator(x) {
        return Err(ModuleError::NotAGenerator(x));
    }
    let q = module.over.clone();
    let ql = q.carrier().clone();
    let ann = module.ann(x);
    let regular = Module::regular(&q, module.side);
    let up = up_segment_unchecked(&regular, ann)?;
    let projection: Vec<Elem> = ql.elements().map(|a| up.local(ql.join2(a, ann)).expect("above ann")).collect();
    let dense_hom: Vec<Elem> = up.embed.iter().map(|&a| module.act(a, x)).collect();
    let factors = ql.elements().all(|a| dense_hom[projection[a]] == module.act(a, x));
    let projection_is_hom = regular.is_hom_to(&up.module, &projection);
    let dense_hom_is_hom = up.module.is_hom_to(module, &dense_hom);
    let dense =
        dense_hom.iter().enumerate().all(|(i, &v)| v != module.carrier.bottom() || i == up.module.carrier.bottom());
    let surjective = dense_hom.iter().collect::<BTreeSet<_>>().len() == module.len();
    let res: Vec<Elem> = module.elements().map(|m| module.quantale_residual(x, m)).collect();
    let residual_iso =
        module.elements().all(|m| module.elements().all(|m2| module.carrier.leq(m, m2) == ql.leq(res[m], res[m2])));
    Ok(DenseQuotient {
        up,
        projection,
        dense_hom,
        factors,
        projection_is_hom,
        dense_hom_is_hom,
        dense,
        surjective,
        residual_iso,
    })
}

/// Principal-module facts: quotients of a principal module are principal,
/// and (over unital quantales) principal ⟺ quotient of the regular module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalReport {
    pub principal: bool,
    /// Every quotient by a module nucleus is principal (checked when principal).
    pub quotients_principal: Option<bool>,
    /// `a ↦ a·x` is a surjective module hom from `Q` for a generator `x`.
    pub orbit_map_is_quotient: Option<bool>,
    /// Some surjective module hom `Q → M` exists.
    pub quotient_of_regular: bool,
}

pub fn principal_report(module: &Module) -> PrincipalReport {
    let gen = module.first_generator();
    let quotients_principal =
        gen.map(|_| enumerate_module_nuclei(module).iter().all(|k| k.quotient().0.module.is_principal()));
    let regular = Module::regular(&module.over, module.side);
    let orbit_map_is_quotient = gen.map(|x| {
        let t: Vec<Elem> = module.over.elements().map(|a| module.act(a, x)).collect();
        regular.is_hom_to(module, &t) && t.iter().collect::<BTreeSet<_>>().len() == module.len()
    });
    let quotient_of_regular = enumerate_join_homs(module.over.carrier(), &module.carrier)
        .iter()
        .any(|h| h.is_surjective() && regular.is_hom_to(module, h.table()));
    PrincipalReport { principal: gen.is_some(), quotients_principal, orbit_map_is_quotient, quotient_of_regular }
}

/// All modules on a given carrier and side over `q`.
pub fn enumerate_modules_on(q: &Arc<Quantale>, carrier: &Arc<Lattice>, side: Side) -> Vec<Module> {
    let (nq, nm) = (q.len(), carrier.len());
    let cells: Vec<(Elem, Elem)> = q
        .elements()
        .filter(|&a| a != q.bottom())
        .flat_map(|a| carrier.elements().filter(|&x| x != carrier.bottom()).map(move |x| (a, x)))
        .collect();
    let mut out = Vec::new();
    let mut action = vec![carrier.bottom(); nq * nm];
    fn rec(
        q: &Arc<Quantale>,
        carrier: &Arc<Lattice>,
        side: Side,
        cells: &[(Elem, Elem)],
        k: usize,
        action: &mut Vec<Elem>,
        out: &mut Vec<Module>,
    ) {
        let nm = carrier.len();
        if k == cells.len() {
            if let Ok(m) = Module::from_flat(side, q.clone(), carrier.clone(), action.clone()) {
                out.push(m);
            }
            return;
        }
        let (a, x) = cells[k];
        let (ql, l) = (q.carrier(), carrier);
        for v in l.elements() {
            let ok = cells[..k].iter().all(|&(b, y)| {
                let w = action[b * nm + y];
                (!(ql.leq(b, a) && l.leq(y, x)) || l.leq(w, v)) && (!(ql.leq(a, b) && l.leq(x, y)) || l.leq(v, w))
            });
            if ok {
                action[a * nm + x] = v;
                rec(q, carrier, side, cells, k + 1, action, out);
            }
        }
        action[a * nm + x] = l.bottom();
    }
    rec(q, carrier, side, &cells, 0, &mut action, &mut out);
    out
}

/// Modules of the given side on every lattice with at most `max_n` elements.
pub fn enumerate_modules(q: &Arc<Quantale>, side: Side, max_n: usize, caps: &Caps) -> Result<Vec<Module>, ModuleError> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for l in enumerate_sup_lattices(n, caps)? {
            out.extend(enumerate_modules_on(q, &Arc::new(l), side));
        }
    }
    Ok(out)
}

/// A 2-form over a quantale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedForm {
    /// Right module on the left lattice.
    pub left: Module,
    /// Left module on the right lattice.
    pub right: Module,
    pub form: TwoForm,
}

/// The five equivalent formulations of balance, each evaluated independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    /// `a\(x^⊥) = (xa)^⊥`
    pub right_residual_form: bool,
    /// `(^⊥y)/a = ^⊥(ay)`
    pub left_residual_form: bool,
    /// `xa ⊥ a\(x^⊥)` and `x ⊥ a((xa)^⊥)`
    pub right_orthogonality_form: bool,
    /// `(^⊥y)/a ⊥ ay` and `(^⊥(ay))a ⊥ y`
    pub left_orthogonality_form: bool,
    pub balanced: bool,
    /// A triple `(x, a, y)` with `⟨xa|y⟩ ≠ ⟨x|ay⟩`.
    pub witness: Option<(Elem, Elem, Elem)>,
}

impl BalanceReport {
    pub fn conditions(&self) -> [bool; 5] {
        [
            self.right_residual_form,
            self.left_residual_form,
            self.right_orthogonality_form,
            self.left_orthogonality_form,
            self.balanced,
        ]
    }

    pub fn all_agree(&self) -> bool {
        self.conditions().iter().all(|&c| c == self.balanced)
    }
}

fn check_fit(left: &Module, right: &Module, form: &TwoForm) -> Result<(), ModuleError> {
    if left.side != Side::Right || right.side != Side::Left {
        return Err(ModuleError::Mismatch("the left lattice needs a right action and vice versa"));
    }
    if left.over != right.over {
        return Err(ModuleError::Mismatch("modules over different quantales"));
    }
    if form.left() != &left.carrier || form.right() != &right.carrier {
        return Err(ModuleError::Mismatch("form lattices differ from module carriers"));
    }
    Ok(())
}

pub fn balance_report(left: &Module, right: &Module, form: &TwoForm) -> Result<BalanceReport, ModuleError> {
    check_fit(left, right, form)?;
    let q = left.over.clone();
    let (l, r) = (form.left(), form.right());
    let mut witness = None;
    'outer: for x in l.elements() {
        for a in q.elements() {
            for y in r.elements() {
                if form.value(left.act(a, x), y) != form.value(x, right.act(a, y)) {
                    witness = Some((x, a, y));
                    break 'outer;
                }
            }
        }
    }
    let xa = |x, a| left.act(a, x);
    let ay = |a, y| right.act(a, y);
    // a\z on R and w/a on L
    let under = |a, z| right.carrier_residual(a, z);
    let over = |w, a| left.carrier_residual(a, w);
    let right_residual_form =
        l.elements().all(|x| q.elements().all(|a| under(a, form.right_orth(x)) == form.right_orth(xa(x, a))));
    let left_residual_form =
        r.elements().all(|y| q.elements().all(|a| over(form.left_orth(y), a) == form.left_orth(ay(a, y))));
    let right_orthogonality_form = l.elements().all(|x| {
        q.elements().all(|a| {
            form.orthogonal(xa(x, a), under(a, form.right_orth(x)))
                && form.orthogonal(x, ay(a, form.right_orth(xa(x, a))))
        })
    });
    let left_orthogonality_form = r.elements().all(|y| {
        q.elements().all(|a| {
            form.orthogonal(over(form.left_orth(y), a), ay(a, y)) && form.orthogonal(xa(form.left_orth(ay(a, y)), a), y)
        })
    });
    Ok(BalanceReport {
        right_residual_form,
        left_residual_form,
        right_orthogonality_form,
        left_orthogonality_form,
        balanced: witness.is_none(),
        witness,
    })
}

impl BalancedForm {
    pub fn new(left: Module, right: Module, form: TwoForm) -> Result<Self, ModuleError> {
        let rep = balance_report(&left, &right, &form)?;
        if let Some((x, a, y)) = rep.witness {
            return Err(ModuleError::NotBalanced { x, a, y });
        }
        Ok(BalancedForm { left, right, form })
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.left.over
    }

    pub fn report(&self) -> BalanceReport {
        balance_report(&self.left, &self.right, &self.form).expect("validated")
    }

    pub fn is_principal(&self) -> bool {
        self.left.is_principal() && self.right.is_principal()
    }

    /// Both modules unital.
    pub fn is_unital(&self) -> bool {
        self.left.is_unital() && self.right.is_unital()
    }
}

/// `check_balanced`: the balance report for a candidate, plus the validated
/// form when balanced.
pub fn check_balanced(
    left: &Module,
    right: &Module,
    form: &TwoForm,
) -> Result<(Option<BalancedForm>, BalanceReport), ModuleError> {
    let rep = balance_report(left, right, form)?;
    let bf = rep.balanced.then(|| BalancedForm { left: left.clone(), right: right.clone(), form: form.clone() });
    Ok((bf, rep))
}

/// `φ_n` on `Q × Q`: `x ⊥ y ⟺ x ⊙ y ≤ n`, with `Q` acting on itself.
pub fn phi_n_form(q: &Arc<Quantale>, n: Elem) -> BalancedForm {
    let l = q.carrier().clone();
    let form =
        TwoForm::from_orthogonality(l.clone(), l.clone(), |x, y| l.leq(q.mul(x, y), n)).expect("φ_n is a 2-form");
    BalancedForm::new(Module::regular(q, Side::Right), Module::regular(q, Side::Left), form).expect("φ_n is balanced")
}

/// `orth(x, y) = ⋁{a ∈ Q : x ⊥ ay}`, with no generator requirement.
pub fn orth(bf: &BalancedForm, x: Elem, y: Elem) -> Elem {
    let q = bf.quantale().carrier();
    q.join(q.elements().filter(|&a| bf.form.orthogonal(x, bf.right.act(a, y))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orthogonalizer {
    pub value: Elem,
    /// `(x^⊥)/y`
    pub via_right: Elem,
    /// `x\(^⊥y)`
    pub via_left: Elem,
}

pub fn orthogonalizer(bf: &BalancedForm, x: Elem, y: Elem) -> Result<Orthogonalizer, ModuleError> {
    if !bf.left.is_generator(x) {
        return Err(ModuleError::NotAGenerator(x));
    }
    if !bf.right.is_generator(y) {
        return Err(ModuleError::NotAGenerator(y));
    }
    Ok(Orthogonalizer {
        value: orth(bf, x, y),
        via_right: bf.right.quantale_residual(y, bf.form.right_orth(x)),
        via_left: bf.left.quantale_residual(x, bf.form.left_orth(y)),
    })
}

/// The `Q`-orthoquotient `φ_n → φ` for `n = orth(x, y)`.
#[derive(Clone, Debug)]
pub struct PrincipalQuotient {
    pub n: Elem,
    pub source: BalancedForm,
    /// `a ↦ x·a`
    pub f: Vec<Elem>,
    /// `b ↦ b·y`
    pub g: Vec<Elem>,
    pub surjective: bool,
    pub module_homs: bool,
    pub map: Option<Orthomorphism>,
}

impl PrincipalQuotient {
    pub fn holds(&self) -> bool {
        self.surjective && self.module_homs && self.map.is_some()
    }
}

pub fn principal_orthoquotient(bf: &BalancedForm, x: Elem, y: Elem) -> Result<PrincipalQuotient, ModuleError> {
    if !bf.is_principal() {
        return Err(ModuleError::NotPrincipal);
    }
    let n = orthogonalizer(bf, x, y)?.value;
    let q = bf.quantale().clone();
    let source = phi_n_form(&q, n);
    let f: Vec<Elem> = q.elements().map(|a| bf.left.act(a, x)).collect();
    let g: Vec<Elem> = q.elements().map(|b| bf.right.act(b, y)).collect();
    let surjective = f.iter().collect::<BTreeSet<_>>().len() == bf.left.len()
        && g.iter().collect::<BTreeSet<_>>().len() == bf.right.len();
    let module_homs = source.left.is_hom_to(&bf.left, &f) && source.right.is_hom_to(&bf.right, &g);
    let map = match (
        JoinHom::new(q.carrier().clone(), bf.left.carrier.clone(), f.clone()),
        JoinHom::new(q.carrier().clone(), bf.right.carrier.clone(), g.clone()),
    ) {
        (Ok(fh), Ok(gh)) => Orthomorphism::new(fh, gh, &source.form, &bf.form).ok(),
        _ => None,
    };
    Ok(PrincipalQuotient { n, source, f, g, surjective, module_homs, map })
}

/// The orthogonal quotient of a balanced form with the quotient module
/// structures from the double-orthogonal closures.
#[derive(Clone, Debug)]
pub struct BalancedQuotient {
    pub left_nucleus: bool,
    pub right_nucleus: bool,
    pub quotient: Option<(Module, Module, TwoForm)>,
    pub report: Option<BalanceReport>,
}

impl BalancedQuotient {
    pub fn holds(&self) -> bool {
        self.left_nucleus && self.right_nucleus && self.report.as_ref().is_some_and(|r| r.balanced)
    }
}

pub fn balanced_orthogonal_quotient(bf: &BalancedForm) -> BalancedQuotient {
    let kl = ModuleNucleus::from_closure(&bf.left, bf.form.left_closure());
    let kr = ModuleNucleus::from_closure(&bf.right, bf.form.right_closure());
    let (left_nucleus, right_nucleus) = (kl.is_ok(), kr.is_ok());
    let (quotient, report) = match (kl, kr) {
        (Ok(kl), Ok(kr)) => {
            let (lm, rm) = (kl.quotient().0.module, kr.quotient().0.module);
            let oq = orthogonal_quotient(&bf.form);
            let rep = balance_report(&lm, &rm, &oq.form).ok();
            (Some((lm, rm, oq.form)), rep)
        }
        _ => (None, None),
    };
    BalancedQuotient { left_nucleus, right_nucleus, quotient, report }
}

/// Greatest left-sided element below `n`.
pub fn greatest_left_sided_below(q: &Quantale, n: Elem) -> Elem {
    q.carrier().join(q.elements().filter(|&a| q.is_left_sided(a) && q.carrier().leq(a, n)))
}

/// Greatest right-sided element below `n`.
pub fn greatest_right_sided_below(q: &Quantale, n: Elem) -> Elem {
    q.carrier().join(q.elements().filter(|&a| q.is_right_sided(a) && q.carrier().leq(a, n)))
}

/// The restriction `ψ` of `φ_n` to `↑r × ↑l` and its density facts.
#[derive(Clone, Debug)]
pub struct SegmentForm {
    pub form: BalancedForm,
    pub left_segment: Segment,
    pub right_segment: Segment,
    /// `(a ↦ a ∨ r, b ↦ b ∨ l)` as a `Q`-orthomorphism out of `φ_n`.
    pub quotient_map: Option<Orthomorphism>,
    pub quotient_is_module_map: bool,
    /// The orthogonal quotient projections of `φ_n` factor through `ψ`.
    pub orthogonal_quotient_factors: bool,
    pub dense_right: bool,
    pub dense_left: bool,
    pub greatest_left_sided: Elem,
    pub greatest_right_sided: Elem,
}

impl SegmentForm {
    /// dense on the right ⟹ `l` is the greatest left-sided element below `n`.
    pub fn right_implication(&self, l: Elem) -> bool {
        !self.dense_right || l == self.greatest_left_sided
    }

    pub fn left_implication(&self, r: Elem) -> bool {
        !self.dense_left || r == self.greatest_right_sided
    }

    pub fn right_equivalence(&self, l: Elem) -> bool {
        self.dense_right == (l == self.greatest_left_sided)
    }

    pub fn left_equivalence(&self, r: Elem) -> bool {
        self.dense_left == (r == self.greatest_right_sided)
    }
}

fn kernel_contained(p: &[Elem], q: &[Elem]) -> bool {
    (0..p.len()).all(|a| (0..p.len()).all(|b| p[a] != p[b] || q[a] == q[b]))
}

pub fn upsegment_restricted_form(q: &Arc<Quantale>, n: Elem, r: Elem, l: Elem) -> Result<SegmentForm, ModuleError> {
    let ql = q.carrier().clone();
    if !q.is_right_sided(r) {
        return Err(ModuleError::PreconditionViolated("r must be right-sided"));
    }
    if !q.is_left_sided(l) {
        return Err(ModuleError::PreconditionViolated("l must be left-sided"));
    }
    if !ql.leq(ql.join2(r, l), n) {
        return Err(ModuleError::PreconditionViolated("r ∨ l must lie below n"));
    }
    let phi = phi_n_form(q, n);
    let left_segment = up_segment_unchecked(&phi.left, r)?;
    let right_segment = up_segment_unchecked(&phi.right, l)?;
    let (ls, rs) = (&left_segment, &right_segment);
    let psi = TwoForm::from_fn(ls.module.carrier.clone(), rs.module.carrier.clone(), |x, y| {
        phi.form.value(ls.embed[x], rs.embed[y])
    })?;
    let form = BalancedForm::new(ls.module.clone(), rs.module.clone(), psi)?;
    let fp: Vec<Elem> = ql.elements().map(|a| ls.local(ql.join2(a, r)).expect("above r")).collect();
    let gp: Vec<Elem> = ql.elements().map(|b| rs.local(ql.join2(b, l)).expect("above l")).collect();
    let quotient_is_module_map = phi.left.is_hom_to(&ls.module, &fp) && phi.right.is_hom_to(&rs.module, &gp);
    let quotient_map = match (
        JoinHom::new(ql.clone(), ls.module.carrier.clone(), fp.clone()),
        JoinHom::new(ql.clone(), rs.module.carrier.clone(), gp.clone()),
    ) {
        (Ok(f), Ok(g)) => Orthomorphism::new(f, g, &phi.form, &form.form).ok(),
        _ => None,
    };
    let oq = orthogonal_quotient(&phi.form);
    let orthogonal_quotient_factors =
        kernel_contained(&fp, oq.map.f.table()) && kernel_contained(&gp, oq.map.g.table());
    let flags = form.form.classify();
    Ok(SegmentForm {
        dense_right: flags.dense_right,
        dense_left: flags.dense_left,
        greatest_left_sided: greatest_left_sided_below(q, n),
        greatest_right_sided: greatest_right_sided_below(q, n),
        form,
        left_segment,
        right_segment,
        quotient_map,
        quotient_is_module_map,
        orthogonal_quotient_factors,
    })
}

/// Density of a principal balanced form against the annihilators of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalDensity {
    pub n: Elem,
    /// `ann(x) = x\0` in the right module `L` (right-sided).
    pub ann_x: Elem,
    /// `ann(y) = 0/y` in the left module `R` (left-sided).
    pub ann_y: Elem,
    pub dense_right: bool,
    pub dense_left: bool,
    pub greatest_left_sided: Elem,
    pub greatest_right_sided: Elem,
}

impl PrincipalDensity {
    pub fn right_implication(&self) -> bool {
        !self.dense_right || self.ann_y == self.greatest_left_sided
    }
    pub fn left_implication(&self) -> bool {
        !self.dense_left || self.ann_x == self.greatest_right_sided
    }
    pub fn right_equivalence(&self) -> bool {
        self.dense_right == (self.ann_y == self.greatest_left_sided)
    }
    pub fn left_equivalence(&self) -> bool {
        self.dense_left == (self.ann_x == self.greatest_right_sided)
    }
}

pub fn principal_density(bf: &BalancedForm, x: Elem, y: Elem) -> Result<PrincipalDensity, ModuleError> {
    let n = orthogonalizer(bf, x, y)?.value;
    let q = bf.quantale();
    let flags = bf.form.classify();
    Ok(PrincipalDensity {
        n,
        ann_x: bf.left.ann(x),
        ann_y: bf.right.ann(y),
        dense_right: flags.dense_right,
        dense_left: flags.dense_left,
        greatest_left_sided: greatest_left_sided_below(q, n),
        greatest_right_sided: greatest_right_sided_below(q, n),
    })
}

/// All balanced forms between right and left modules on lattices with at
/// most `max_n` elements.
pub fn enumerate_balanced_forms(
    q: &Arc<Quantale>,
    max_n: usize,
    caps: &Caps,
) -> Result<Vec<BalancedForm>, ModuleError> {
    let lefts = enumerate_modules(q, Side::Right, max_n, caps)?;
    let rights = enumerate_modules(q, Side::Left, max_n, caps)?;
    let mut out = Vec::new();
    for lm in &lefts {
        for rm in &rights {
            for form in crate::forms::enumerate_two_forms(&lm.carrier, &rm.carrier, caps)? {
                if let (Some(bf), _) = check_balanced(lm, rm, &form)? {
                    out.push(bf);
                }
            }
        }
    }
    Ok(out)
}
