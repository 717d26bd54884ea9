//! Finite quantales: sup-lattices with an associative multiplication that
//! preserves joins in each variable, optionally unital and involutive.
//!
//! Also here are the standard constructions relating quantales and 2-forms:
//! the endomorphism quantale `Q(S)`, powerset quantales of monoids, the form
//! `Φ(Q)` on sided elements, the quantale `Q(φ)` of continuous endomaps, the
//! comparison homomorphism `κ: Q → Q(Φ(Q))`, and quantic nuclei.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::forms::{FormError, TwoForm};
use crate::lattice::{
    enumerate_join_endos, enumerate_join_homs, enumerate_sup_lattices, ClosureOperator, JoinHom, Lattice, LatticeError,
    SubLattice,
};
use crate::residuation::{check_bimorphism, Bimorphism, BimorphismViolation};
use crate::{Caps, Elem, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantaleError {
    #[error("table has the wrong shape for a carrier of size {n}")]
    ShapeMismatch { n: usize },
    #[error("table entry {value} is out of range")]
    OutOfRange { value: usize },
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(Elem, Elem, Elem),
    #[error("multiplication is not a bimorphism: {0:?}")]
    NotBimorphic(BimorphismViolation),
    #[error("{0} is not a two-sided unit")]
    BadUnit(Elem),
    #[error("involution fails {law} at {witness:?}")]
    BadInvolution { law: &'static str, witness: Vec<Elem> },
    #[error("not a monoid: {0}")]
    NotAMonoid(&'static str),
    #[error("size {size} exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("not a quantic nucleus: j({a})j({b}) is not below j({a}{b})")]
    NotNucleus { a: Elem, b: Elem },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A finite quantale. Multiplication is stored row-major: `mult[a * n + b]`
/// is `a ⊙ b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quantale {
    carrier: Arc<Lattice>,
    mult: Vec<Elem>,
    unit: Option<Elem>,
    involution: Option<Vec<Elem>>,
}

impl Bimorphism for Quantale {
    fn left(&self) -> &Lattice {
        &self.carrier
    }
    fn right(&self) -> &Lattice {
        &self.carrier
    }
    fn target(&self) -> &Lattice {
        &self.carrier
    }
    fn apply(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, b)
    }
}

/// Sided elements of a quantale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidedElements {
    /// `1 ⊙ a ≤ a`
    pub left: Vec<Elem>,
    /// `a ⊙ 1 ≤ a`
    pub right: Vec<Elem>,
    pub two_sided: Vec<Elem>,
    pub is_factor: bool,
}

fn find_unit(carrier: &Lattice, mult: &[Elem]) -> Option<Elem> {
    let n = carrier.len();
    carrier.elements().find(|&e| carrier.elements().all(|a| mult[e * n + a] == a && mult[a * n + e] == a))
}

impl Quantale {
    /// Validates a multiplication table (`mult[a][b]` is `a ⊙ b`).
    pub fn new(
        carrier: Arc<Lattice>,
        mult: &[Vec<Elem>],
        unit: Option<Elem>,
        involution: Option<Vec<Elem>>,
    ) -> Result<Self, QuantaleError> {
        let n = carrier.len();
        if mult.len() != n || mult.iter().any(|r| r.len() != n) {
            return Err(QuantaleError::ShapeMismatch { n });
        }
        Self::from_flat(carrier, mult.concat(), unit, involution)
    }

    pub fn from_fn(
        carrier: Arc<Lattice>,
        f: impl Fn(Elem, Elem) -> Elem,
        unit: Option<Elem>,
        involution: Option<Vec<Elem>>,
    ) -> Result<Self, QuantaleError> {
        let mult =
            carrier.elements().flat_map(|a| carrier.elements().map(move |b| (a, b))).map(|(a, b)| f(a, b)).collect();
        Self::from_flat(carrier, mult, unit, involution)
    }

    fn from_flat(
        carrier: Arc<Lattice>,
        mult: Vec<Elem>,
        unit: Option<Elem>,
        involution: Option<Vec<Elem>>,
    ) -> Result<Self, QuantaleError> {
        let n = carrier.len();
        if mult.len() != n * n {
            return Err(QuantaleError::ShapeMismatch { n });
        }
        if let Some(&value) = mult.iter().find(|&&v| v >= n) {
            return Err(QuantaleError::OutOfRange { value });
        }
        let q = Quantale { carrier, mult, unit: None, involution: None };
        check_bimorphism(&q).map_err(QuantaleError::NotBimorphic)?;
        for a in q.carrier.elements() {
            for b in q.carrier.elements() {
                let ab = q.mul(a, b);
                for c in q.carrier.elements() {
                    if q.mul(ab, c) != q.mul(a, q.mul(b, c)) {
                        return Err(QuantaleError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        let q = match unit {
            Some(e) => q.with_unit(e)?,
            None => q,
        };
        match involution {
            Some(inv) => q.with_involution(inv),
            None => Ok(q),
        }
    }

    pub fn with_unit(mut self, e: Elem) -> Result<Self, QuantaleError> {
        if e >= self.len() {
            return Err(QuantaleError::OutOfRange { value: e });
        }
        if self.carrier.elements().any(|a| self.mul(e, a) != a || self.mul(a, e) != a) {
            return Err(QuantaleError::BadUnit(e));
        }
        self.unit = Some(e);
        Ok(self)
    }

    /// Attaches the unit if the multiplication has one.
    pub fn with_detected_unit(mut self) -> Self {
        self.unit = find_unit(&self.carrier, &self.mult);
        self
    }

    /// Validates an involution: `a** = a`, `(a ⊙ b)* = b* ⊙ a*`, and
    /// preservation of joins.
    pub fn with_involution(mut self, inv: Vec<Elem>) -> Result<Self, QuantaleError> {
        let l = self.carrier.clone();
        if inv.len() != l.len() {
            return Err(QuantaleError::ShapeMismatch { n: l.len() });
        }
        if let Some(&value) = inv.iter().find(|&&v| v >= l.len()) {
            return Err(QuantaleError::OutOfRange { value });
        }
        let bad = |law, witness: Vec<Elem>| Err(QuantaleError::BadInvolution { law, witness });
        for a in l.elements() {
            if inv[inv[a]] != a {
                return bad("a** = a", vec![a]);
            }
        }
        if inv[l.bottom()] != l.bottom() {
            return bad("0* = 0", vec![l.bottom()]);
        }
        for a in l.elements() {
            for b in l.elements() {
                if inv[l.join2(a, b)] != l.join2(inv[a], inv[b]) {
                    return bad("(a v b)* = a* v b*", vec![a, b]);
                }
                if inv[self.mul(a, b)] != self.mul(inv[b], inv[a]) {
                    return bad("(ab)* = b*a*", vec![a, b]);
                }
            }
        }
        self.involution = Some(inv);
        Ok(self)
    }

    pub fn without_involution(mut self) -> Self {
        self.involution = None;
        self
    }

    /// The chain `0 < 1 < ... < n-1` with `a ⊙ b = min(a, b)` and unit `n-1`.
    pub fn min_quantale(n: usize) -> Self {
        let l = Arc::new(Lattice::chain(n));
        Self::from_fn(l, |a, b| a.min(b), Some(n - 1), None).expect("min is a unital quantale on a chain")
    }

    /// The two-element quantale `2` (multiplication is meet).
    pub fn two() -> Self {
        Self::min_quantale(2)
    }

    /// The zero multiplication on a lattice.
    pub fn zero(carrier: &Arc<Lattice>) -> Self {
        let b = carrier.bottom();
        Self::from_fn(carrier.clone(), |_, _| b, None, None).expect("zero multiplication")
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

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mult[a * self.carrier.len() + b]
    }

    pub fn mult_table(&self) -> Vec<Vec<Elem>> {
        self.mult.chunks(self.len().max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn unit(&self) -> Option<Elem> {
        self.unit
    }

    pub fn involution(&self) -> Option<&[Elem]> {
        self.involution.as_deref()
    }

    /// `a*`; panics if the quantale has no involution.
    pub fn star(&self, a: Elem) -> Elem {
        self.involution.as_ref().expect("involutive quantale")[a]
    }

    pub fn top(&self) -> Elem {
        self.carrier.top()
    }

    pub fn bottom(&self) -> Elem {
        self.carrier.bottom()
    }

    pub fn is_left_sided(&self, a: Elem) -> bool {
        self.carrier.leq(self.mul(self.top(), a), a)
    }

    pub fn is_right_sided(&self, a: Elem) -> bool {
        self.carrier.leq(self.mul(a, self.top()), a)
    }

    pub fn sided_elements(&self) -> SidedElements {
        let left: Vec<Elem> = self.elements().filter(|&a| self.is_left_sided(a)).collect();
        let right: Vec<Elem> = self.elements().filter(|&a| self.is_right_sided(a)).collect();
        let two_sided: Vec<Elem> = left.iter().copied().filter(|&a| self.is_right_sided(a)).collect();
        let ends: BTreeSet<Elem> = [self.bottom(), self.top()].into();
        let is_factor = two_sided.iter().copied().collect::<BTreeSet<_>>() == ends;
        SidedElements { left, right, two_sided, is_factor }
    }

    pub fn is_factor(&self) -> bool {
        self.sided_elements().is_factor
    }

    /// `ls(Q)` as a sub-sup-lattice of `Q`.
    pub fn ls(&self) -> SubLattice {
        SubLattice::join_closed(&self.carrier, &self.sided_elements().left)
            .expect("left-sided elements are closed under joins")
    }

    /// `rs(Q)` as a sub-sup-lattice of `Q`.
    pub fn rs(&self) -> SubLattice {
        SubLattice::join_closed(&self.carrier, &self.sided_elements().right)
            .expect("right-sided elements are closed under joins")
    }

    pub fn is_commutative(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// `z / y`
    pub fn left_residual(&self, z: Elem, y: Elem) -> Elem {
        Bimorphism::left_residual(self, z, y)
    }

    /// `x \ z`
    pub fn right_residual(&self, x: Elem, z: Elem) -> Elem {
        Bimorphism::right_residual(self, x, z)
    }

    /// Residual on the given side: `Left` is `z / y` with `(x, z) = (y, z)`,
    /// `Right` is `x \ z`.
    pub fn residuate(&self, side: Side, x: Elem, z: Elem) -> Elem {
        match side {
            Side::Left => self.left_residual(z, x),
            Side::Right => self.right_residual(x, z),
        }
    }

    /// The faithfulness condition: `a` is determined by the maps
    /// `x ↦ x ⊙ a` on `ls(Q)` and `y ↦ a ⊙ y` on `rs(Q)`.
    pub fn is_faithful(&self) -> bool {
        let s = self.sided_elements();
        let sig = |a: Elem| -> (Vec<Elem>, Vec<Elem>) {
            (s.left.iter().map(|&x| self.mul(x, a)).collect(), s.right.iter().map(|&y| self.mul(a, y)).collect())
        };
        let sigs: BTreeSet<_> = self.elements().map(sig).collect();
        sigs.len() == self.len()
    }

    pub fn relabel(&self, perm: &[Elem]) -> Quantale {
        let n = self.len();
        let carrier = Arc::new(self.carrier.relabel(perm));
        let mut mult = vec![0; n * n];
        for a in self.elements() {
            for b in self.elements() {
                mult[perm[a] * n + perm[b]] = perm[self.mul(a, b)];
            }
        }
        let involution = self.involution.as_ref().map(|inv| {
            let mut out = vec![0; n];
            for a in 0..n {
                out[perm[a]] = perm[inv[a]];
            }
            out
        });
        Quantale { carrier, mult, unit: self.unit.map(|e| perm[e]), involution }
    }
}

/// What a map between quantales preserves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantaleHomCheck {
    pub joins: bool,
    pub mult: bool,
    /// `None` unless both quantales are unital.
    pub unit: Option<bool>,
    /// `None` unless both quantales are involutive.
    pub involution: Option<bool>,
}

impl QuantaleHomCheck {
    /// Join and multiplication preserving.
    pub fn is_hom(&self) -> bool {
        self.joins && self.mult
    }
}

pub fn check_quantale_hom(src: &Quantale, dst: &Quantale, table: &[Elem]) -> QuantaleHomCheck {
    let joins = JoinHom::new(src.carrier.clone(), dst.carrier.clone(), table.to_vec()).is_ok();
    let mult = table.len() == src.len()
        && src.elements().all(|a| src.elements().all(|b| table[src.mul(a, b)] == dst.mul(table[a], table[b])));
    let unit = match (src.unit, dst.unit) {
        (Some(e), Some(e2)) => Some(table[e] == e2),
        _ => None,
    };
    let involution = match (src.involution(), dst.involution()) {
        (Some(i), Some(j)) => Some(src.elements().all(|a| table[i[a]] == j[table[a]])),
        _ => None,
    };
    QuantaleHomCheck { joins, mult, unit, involution }
}

/// An isomorphism of quantales (carrier order, multiplication, unit and
/// involution all preserved).
pub fn find_quantale_isomorphism(a: &Quantale, b: &Quantale) -> Option<Vec<Elem>> {
    if a.unit.is_some() != b.unit.is_some() || a.involution.is_some() != b.involution.is_some() {
        return None;
    }
    let mut found = None;
    a.carrier.for_each_isomorphism(&b.carrier, &mut |m| {
        let c = check_quantale_hom(a, b, m);
        if c.mult && c.unit != Some(false) && c.involution != Some(false) {
            found = Some(m.to_vec());
            return false;
        }
        true
    });
    found
}

pub fn quantales_isomorphic(a: &Quantale, b: &Quantale) -> bool {
    find_quantale_isomorphism(a, b).is_some()
}

/// `c_s`: `0 ↦ 0`, everything else `↦ s`.
pub fn constant_map(l: &Arc<Lattice>, s: Elem) -> JoinHom {
    let table = l.elements().map(|x| if x == l.bottom() { l.bottom() } else { s }).collect();
    JoinHom::new(l.clone(), l.clone(), table).expect("constant maps preserve joins")
}

/// `a_s`: `x ↦ 0` if `x ≤ s`, else `1`.
pub fn annihilator_map(l: &Arc<Lattice>, s: Elem) -> JoinHom {
    let table = l.elements().map(|x| if l.leq(x, s) { l.bottom() } else { l.top() }).collect();
    JoinHom::new(l.clone(), l.clone(), table).expect("annihilator maps preserve joins")
}

/// The quantale `Q(S)` of join-endomorphisms with `f ⊙ g = g ∘ f`, and the
/// map each element stands for.
#[derive(Clone, Debug)]
pub struct EndoQuantale {
    pub quantale: Quantale,
    pub maps: Vec<JoinHom>,
    pub lattice: Arc<Lattice>,
}

impl EndoQuantale {
    pub fn index_of(&self, f: &JoinHom) -> Option<Elem> {
        self.maps.iter().position(|g| g == f)
    }
}

pub fn endo_quantale(s: &Arc<Lattice>, caps: &Caps) -> Result<EndoQuantale, QuantaleError> {
    if s.len() > caps.endo_quantale {
        return Err(QuantaleError::CapExceeded { size: s.len(), cap: caps.endo_quantale });
    }
    let maps = enumerate_join_endos(s, &Caps { endo_enum: caps.endo_quantale.max(caps.endo_enum), ..*caps })?;
    let index: HashMap<&[Elem], Elem> = maps.iter().enumerate().map(|(i, f)| (f.table(), i)).collect();
    let carrier = Arc::new(Lattice::from_fn(maps.len(), |i, j| maps[i].leq_pointwise(&maps[j]))?);
    let unit = index[JoinHom::identity(s).table()];
    let q = Quantale::from_fn(carrier, |i, j| index[maps[i].then(&maps[j]).table()], Some(unit), None)?;
    Ok(EndoQuantale { quantale: q, maps, lattice: s.clone() })
}

/// `P(M)` with setwise multiplication, elements as bitmasks over `M`.
pub fn powerset_monoid_quantale(table: &[Vec<usize>], caps: &Caps) -> Result<Quantale, QuantaleError> {
    let m = table.len();
    if m > caps.monoid {
        return Err(QuantaleError::CapExceeded { size: m, cap: caps.monoid });
    }
    if m == 0 || table.iter().any(|r| r.len() != m) {
        return Err(QuantaleError::NotAMonoid("table must be square and nonempty"));
    }
    if table.iter().flatten().any(|&v| v >= m) {
        return Err(QuantaleError::NotAMonoid("entry out of range"));
    }
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if table[table[x][y]][z] != table[x][table[y][z]] {
                    return Err(QuantaleError::NotAMonoid("not associative"));
                }
            }
        }
    }
    let e = (0..m)
        .find(|&e| (0..m).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or(QuantaleError::NotAMonoid("no identity"))?;
    let carrier = Arc::new(Lattice::powerset(m));
    let product = |xs: usize, ys: usize| {
        let mut out = 0;
        for x in (0..m).filter(|x| xs >> x & 1 == 1) {
            for y in (0..m).filter(|y| ys >> y & 1 == 1) {
                out |= 1 << table[x][y];
            }
        }
        out
    };
    Quantale::from_fn(carrier, product, Some(1 << e), None)
}

/// The cyclic group `Z/n` as a monoid table.
pub fn cyclic_group(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// `Φ(Q)`: the form on `ls(Q) × rs(Q)` with `a ⊥ b ⟺ a ⊙ b = 0`.
#[derive(Clone, Debug)]
pub struct PhiOfQuantale {
    pub form: TwoForm,
    pub ls: SubLattice,
    pub rs: SubLattice,
}

pub fn phi_of_quantale(q: &Quantale) -> PhiOfQuantale {
    let (ls, rs) = (q.ls(), q.rs());
    let form = TwoForm::from_orthogonality(ls.lattice.clone(), rs.lattice.clone(), |a, b| {
        q.mul(ls.parent(a), rs.parent(b)) == q.bottom()
    })
    .expect("the multiplication restricted to sided elements is a form");
    PhiOfQuantale { form, ls, rs }
}

/// `Q(φ)`: continuous endomaps `(f, g)` of `φ` with
/// `(f, g) ⊙ (f', g') = (f' ∘ f, g ∘ g')`.
#[derive(Clone, Debug)]
pub struct FormQuantale {
    pub quantale: Quantale,
    pub pairs: Vec<(JoinHom, JoinHom)>,
    pub form: TwoForm,
}

impl FormQuantale {
    pub fn index_of(&self, f: &JoinHom, g: &JoinHom) -> Option<Elem> {
        self.pairs.iter().position(|(a, b)| a == f && b == g)
    }

    fn index_map(&self) -> HashMap<(Vec<Elem>, Vec<Elem>), Elem> {
        self.pairs.iter().enumerate().map(|(i, (f, g))| ((f.table().to_vec(), g.table().to_vec()), i)).collect()
    }
}

pub fn form_quantale(form: &TwoForm, caps: &Caps) -> Result<FormQuantale, QuantaleError> {
    let (l, r) = (form.left(), form.right());
    let cells = l.len() * r.len();
    if cells > caps.form_quantale_cells {
        return Err(QuantaleError::CapExceeded { size: cells, cap: caps.form_quantale_cells });
    }
    let fs = enumerate_join_homs(l, l);
    let gs = enumerate_join_homs(r, r);
    let mut pairs = Vec::new();
    for f in &fs {
        for g in &gs {
            let continuous =
                l.elements().all(|x| r.elements().all(|y| form.value(f.apply(x), y) == form.value(x, g.apply(y))));
            if continuous {
                pairs.push((f.clone(), g.clone()));
            }
        }
    }
    let index: HashMap<(Vec<Elem>, Vec<Elem>), Elem> =
        pairs.iter().enumerate().map(|(i, (f, g))| ((f.table().to_vec(), g.table().to_vec()), i)).collect();
    // componentwise joins must stay continuous
    for (f, g) in &pairs {
        for (f2, g2) in &pairs {
            let jf: Vec<Elem> = l.elements().map(|x| l.join2(f.apply(x), f2.apply(x))).collect();
            let jg: Vec<Elem> = r.elements().map(|y| r.join2(g.apply(y), g2.apply(y))).collect();
            assert!(index.contains_key(&(jf, jg)), "continuous endomaps are closed under joins");
        }
    }
    let carrier = Arc::new(Lattice::from_fn(pairs.len(), |i, j| {
        pairs[i].0.leq_pointwise(&pairs[j].0) && pairs[i].1.leq_pointwise(&pairs[j].1)
    })?);
    let unit = index[&(l.elements().collect::<Vec<_>>(), r.elements().collect::<Vec<_>>())];
    let mult = |i: Elem, j: Elem| {
        let (f, g) = &pairs[i];
        let (f2, g2) = &pairs[j];
        index[&(f.then(f2).table().to_vec(), g2.then(g).table().to_vec())]
    };
    let quantale = Quantale::from_fn(carrier, mult, Some(unit), None)?;
    Ok(FormQuantale { quantale, pairs, form: form.clone() })
}

/// The involution `(f, g)* = (g', f')` on `Q(Φ(Q))` of an involutive `Q`,
/// where `f'(y) = f(y*)*` and `g'(x) = g(x*)*`.
pub fn phi_involution(q: &Quantale, phi: &PhiOfQuantale, fq: &FormQuantale) -> Option<Vec<Elem>> {
    let inv = q.involution()?;
    let (ls, rs) = (&phi.ls, &phi.rs);
    let index = fq.index_map();
    let mut out = Vec::with_capacity(fq.pairs.len());
    for (f, g) in &fq.pairs {
        // g' acts on ls: x ↦ g(x*)*, with x* ∈ rs
        let g_new: Option<Vec<Elem>> = ls
            .lattice
            .elements()
            .map(|x| rs.local(inv[ls.parent(x)]).and_then(|y| ls.local(inv[rs.parent(g.apply(y))])))
            .collect();
        let f_new: Option<Vec<Elem>> = rs
            .lattice
            .elements()
            .map(|y| ls.local(inv[rs.parent(y)]).and_then(|x| rs.local(inv[ls.parent(f.apply(x))])))
            .collect();
        out.push(*index.get(&(g_new?, f_new?))?);
    }
    Some(out)
}

/// `κ: Q → Q(Φ(Q))`, `a ↦ ((-) ⊙ a, a ⊙ (-))`, with what it preserves.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub phi: PhiOfQuantale,
    /// `Q(Φ(Q))`, carrying the induced involution when `Q` is involutive
    /// and that involution validates.
    pub target: FormQuantale,
    pub map: Vec<Elem>,
    pub preserves: QuantaleHomCheck,
    /// For involutive `Q`: whether `(f, g) ↦ (g', f')` is an involution on the target.
    pub target_involutive: Option<bool>,
    pub injective: bool,
    pub faithful: bool,
}

pub fn comparison_hom(q: &Quantale, caps: &Caps) -> Result<Comparison, QuantaleError> {
    let phi = phi_of_quantale(q);
    let mut target = form_quantale(&phi.form, caps)?;
    let (ls, rs) = (&phi.ls, &phi.rs);
    let index = target.index_map();
    let mut map = Vec::with_capacity(q.len());
    for a in q.elements() {
        let f: Vec<Elem> =
            ls.lattice.elements().map(|x| ls.local(q.mul(ls.parent(x), a)).expect("ls is a right module")).collect();
        let g: Vec<Elem> =
            rs.lattice.elements().map(|y| rs.local(q.mul(a, rs.parent(y))).expect("rs is a left module")).collect();
        map.push(*index.get(&(f, g)).expect("κ(a) is continuous"));
    }
    let target_involutive = q.involution().map(|_| match phi_involution(q, &phi, &target) {
        Some(inv) => match target.quantale.clone().with_involution(inv) {
            Ok(t) => {
                target.quantale = t;
                true
            }
            Err(_) => false,
        },
        None => false,
    });
    let preserves = check_quantale_hom(q, &target.quantale, &map);
    let injective = map.iter().collect::<BTreeSet<_>>().len() == map.len();
    Ok(Comparison { faithful: q.is_faithful(), phi, target, map, preserves, target_involutive, injective })
}

/// A quantic nucleus: a closure operator with `j(a) ⊙ j(b) ≤ j(a ⊙ b)`.
#[derive(Clone, Debug)]
pub struct QuanticNucleus {
    pub quantale: Arc<Quantale>,
    pub closure: ClosureOperator,
}

/// `Q_j` with `a * b = j(a ⊙ b)` and the projection `a ↦ j(a)` (local indices).
#[derive(Clone, Debug)]
pub struct NucleusQuotient {
    pub quantale: Quantale,
    pub fixed: SubLattice,
    pub projection: Vec<Elem>,
}

impl QuanticNucleus {
    pub fn new(q: &Arc<Quantale>, table: Vec<Elem>) -> Result<Self, QuantaleError> {
        let closure = ClosureOperator::new(q.carrier.clone(), table)?;
        for a in q.elements() {
            for b in q.elements() {
                let lhs = q.mul(closure.apply(a), closure.apply(b));
                if !q.carrier.leq(lhs, closure.apply(q.mul(a, b))) {
                    return Err(QuantaleError::NotNucleus { a, b });
                }
            }
        }
        Ok(QuanticNucleus { quantale: q.clone(), closure })
    }

    pub fn identity(q: &Arc<Quantale>) -> Self {
        QuanticNucleus { quantale: q.clone(), closure: ClosureOperator::identity(q.carrier()) }
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.closure.apply(a)
    }

    pub fn quotient(&self) -> NucleusQuotient {
        let q = &self.quantale;
        let cq = self.closure.quotient();
        let fixed = cq.fixed;
        let j = |a| self.closure.apply(a);
        let local = |a| fixed.local(j(a)).expect("closure lands in its fixed points");
        let unit = q.unit.map(local);
        let quantale =
            Quantale::from_fn(fixed.lattice.clone(), |a, b| local(q.mul(fixed.parent(a), fixed.parent(b))), unit, None)
                .expect("quotients by quantic nuclei are quantales");
        let projection = cq.projection.table().to_vec();
        NucleusQuotient { quantale, fixed, projection }
    }
}

pub fn nucleus_quotient(j: &QuanticNucleus) -> NucleusQuotient {
    j.quotient()
}

/// All quantic nuclei on a quantale, by filtering closure operators.
pub fn enumerate_nuclei(q: &Arc<Quantale>) -> Vec<QuanticNucleus> {
    let l = q.carrier();
    let mut out = Vec::new();
    let mut table = vec![0; l.len()];
    fn rec(q: &Arc<Quantale>, i: usize, table: &mut Vec<Elem>, out: &mut Vec<QuanticNucleus>) {
        let l = q.carrier();
        if i == l.len() {
            if let Ok(n) = QuanticNucleus::new(q, table.clone()) {
                out.push(n);
            }
            return;
        }
        for v in l.up_set(i) {
            table[i] = v;
            rec(q, i + 1, table, out);
        }
    }
    rec(q, 0, &mut table, &mut out);
    out
}

/// Every quantale on a lattice: each associative bimorphic table, once
/// without involution and once with each valid involution. The unit is
/// attached when it exists.
pub fn enumerate_quantales_on(carrier: &Arc<Lattice>) -> Vec<Quantale> {
    let l = carrier.as_ref();
    let n = l.len();
    let cells: Vec<(Elem, Elem)> = l
        .elements()
        .filter(|&a| a != l.bottom())
        .flat_map(|a| l.elements().filter(|&b| b != l.bottom()).map(move |b| (a, b)))
        .collect();
    let mut tables = Vec::new();
    let mut mult = vec![l.bottom(); n * n];
    fn rec(l: &Lattice, cells: &[(Elem, Elem)], k: usize, mult: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if k == cells.len() {
            out.push(mult.clone());
            return;
        }
        let n = l.len();
        let (a, b) = cells[k];
        for v in l.elements() {
            // monotonicity against cells already assigned (earlier in row-major order)
            let ok = cells[..k].iter().all(|&(c, d)| {
                let w = mult[c * n + d];
                (!(l.leq(c, a) && l.leq(d, b)) || l.leq(w, v)) && (!(l.leq(a, c) && l.leq(b, d)) || l.leq(v, w))
            });
            if ok {
                mult[a * n + b] = v;
                rec(l, cells, k + 1, mult, out);
            }
        }
        mult[a * n + b] = l.bottom();
    }
    rec(l, &cells, 0, &mut mult, &mut tables);
    let autos: Vec<Vec<Elem>> = {
        let mut v = Vec::new();
        l.for_each_isomorphism(l, &mut |m| {
            v.push(m.to_vec());
            true
        });
        v
    };
    let mut out = Vec::new();
    for t in tables {
        let Ok(q) = Quantale::from_flat(carrier.clone(), t, None, None) else { continue };
        let q = q.with_detected_unit();
        for inv in &autos {
            if let Ok(qi) = q.clone().with_involution(inv.clone()) {
                out.push(qi);
            }
        }
        out.push(q);
    }
    out
}

/// Quantales on every sup-lattice with at most `max_n` elements.
pub fn enumerate_quantales(max_n: usize, caps: &Caps) -> Result<Vec<Quantale>, QuantaleError> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for l in enumerate_sup_lattices(n, caps)? {
            out.extend(enumerate_quantales_on(&Arc::new(l)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn validation_examples() {
        let two = Quantale::two();
        assert_eq!(two.unit(), Some(1));
        let c3 = Quantale::min_quantale(3);
        assert_eq!(c3.mul(1, 2), 1);
        let zero = Quantale::zero(&Arc::new(Lattice::chain(2)));
        assert_eq!(zero.mul(1, 1), 0);
        assert_eq!(zero.unit(), None);

        let l = Arc::new(Lattice::chain(2));
        assert!(matches!(
            Quantale::new(l.clone(), &[vec![0, 1], vec![1, 1]], None, None),
            Err(QuantaleError::NotBimorphic(_))
        ));
        assert_eq!(Quantale::new(l.clone(), &[vec![0, 0], vec![0, 1]], Some(0), None), Err(QuantaleError::BadUnit(0)));
        let c3l = Arc::new(Lattice::chain(3));
        // (1·2)·1 = 0 but 1·(2·1) = 1
        let t = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 2, 2]];
        assert!(matches!(Quantale::new(c3l, &t, None, None), Err(QuantaleError::NotAssociative(..))));
        assert!(matches!(
            Quantale::two().with_involution(vec![1, 0]),
            Err(QuantaleError::BadInvolution { law: "0* = 0", .. })
        ));
    }

    #[test]
    fn sided_elements_examples() {
        let s = Quantale::two().sided_elements();
        assert_eq!((s.left.clone(), s.right.clone(), s.is_factor), (vec![0, 1], vec![0, 1], true));
        let z = Quantale::zero(&Arc::new(Lattice::chain(2))).sided_elements();
        assert!(z.is_factor);
        let z3 = Quantale::zero(&Arc::new(Lattice::chain(3))).sided_elements();
        assert_eq!(z3.two_sided, vec![0, 1, 2]);
        assert!(!z3.is_factor);
        let e = endo_quantale(&Arc::new(Lattice::chain(2)), &caps()).unwrap();
        assert!(e.quantale.is_factor());
    }

    #[test]
    fn residuation_examples() {
        let two = Quantale::two();
        assert_eq!(two.left_residual(0, 1), 0);
        for q in [Quantale::two(), Quantale::min_quantale(3)] {
            for z in q.elements() {
                assert_eq!(q.left_residual(z, q.bottom()), q.top());
            }
        }
        let c3 = Quantale::min_quantale(3);
        assert_eq!(c3.right_residual(1, 0), 0);
        assert_eq!(c3.right_residual(1, 1), 2);
        assert_eq!(c3.residuate(Side::Right, 1, 1), 2);
    }

    #[test]
    fn endo_quantales() {
        let c2 = Arc::new(Lattice::chain(2));
        let e2 = endo_quantale(&c2, &caps()).unwrap();
        assert_eq!(e2.quantale.len(), 2);
        assert!(quantales_isomorphic(&e2.quantale, &Quantale::two()));
        assert_eq!(e2.quantale.unit(), Some(e2.quantale.top()));

        let c3 = Arc::new(Lattice::chain(3));
        let e3 = endo_quantale(&c3, &caps()).unwrap();
        assert_eq!(e3.quantale.len(), 6);
        assert!(e3.quantale.ls().lattice.is_isomorphic(&c3));
        assert!(e3.quantale.rs().lattice.is_isomorphic(&c3.dual()));
        // left-sided elements are the constant maps, right-sided the annihilators
        let ls: BTreeSet<Elem> = c3.elements().map(|s| e3.index_of(&constant_map(&c3, s)).unwrap()).collect();
        let rs: BTreeSet<Elem> = c3.elements().map(|s| e3.index_of(&annihilator_map(&c3, s)).unwrap()).collect();
        let sided = e3.quantale.sided_elements();
        assert_eq!(ls, sided.left.iter().copied().collect());
        assert_eq!(rs, sided.right.iter().copied().collect());

        let one = endo_quantale(&Arc::new(Lattice::one()), &caps()).unwrap();
        assert_eq!(one.quantale.len(), 1);
        assert!(endo_quantale(&Arc::new(Lattice::chain(6)), &caps()).is_err());
    }

    #[test]
    fn powerset_quantales() {
        let trivial = powerset_monoid_quantale(&[vec![0]], &caps()).unwrap();
        assert!(quantales_isomorphic(&trivial, &Quantale::two()));
        let z2 = powerset_monoid_quantale(&cyclic_group(2), &caps()).unwrap();
        assert_eq!(z2.len(), 4);
        // {1} is bitmask 0b10, {0} is 0b01
        assert_eq!(z2.mul(0b10, 0b10), 0b01);
        assert_eq!(z2.unit(), Some(0b01));
        let ez = powerset_monoid_quantale(&[vec![0, 1], vec![1, 1]], &caps()).unwrap();
        assert_eq!(ez.mul(0b10, 0b10), 0b10);
        assert_eq!(
            powerset_monoid_quantale(&[vec![1, 1], vec![1, 1]], &caps()),
            Err(QuantaleError::NotAMonoid("no identity"))
        );
    }

    #[test]
    fn phi_examples() {
        let p = phi_of_quantale(&Quantale::two());
        let c2 = Arc::new(Lattice::chain(2));
        let meet = TwoForm::from_orthogonality(c2.clone(), c2.clone(), |x, y| x.min(y) == 0).unwrap();
        assert_eq!(p.form, meet);
        let e = endo_quantale(&c2, &caps()).unwrap();
        assert!(crate::forms::forms_isomorphic(&phi_of_quantale(&e.quantale).form, &meet));
        let z = phi_of_quantale(&Quantale::zero(&Arc::new(Lattice::chain(3))));
        assert!(z.form.orthogonality_matrix().iter().flatten().all(|&b| b));
    }

    #[test]
    fn form_quantale_examples() {
        let c2 = Arc::new(Lattice::chain(2));
        let meet = TwoForm::from_orthogonality(c2.clone(), c2.clone(), |x, y| x.min(y) == 0).unwrap();
        let fq = form_quantale(&meet, &caps()).unwrap();
        let e = endo_quantale(&c2, &caps()).unwrap();
        assert!(quantales_isomorphic(&fq.quantale, &e.quantale));

        let z = TwoForm::all_orthogonal(&c2, &c2);
        let fq = form_quantale(&z, &caps()).unwrap();
        assert_eq!(fq.quantale.len(), 4);
        let prod = Lattice::product(&Lattice::chain(2), &Lattice::chain(2));
        assert!(fq.quantale.carrier().is_isomorphic(&prod));

        let one = Arc::new(Lattice::one());
        let fq = form_quantale(&TwoForm::all_orthogonal(&one, &one), &caps()).unwrap();
        assert_eq!(fq.quantale.len(), 1);
    }

    #[test]
    fn comparison_examples() {
        let k = comparison_hom(&Quantale::two(), &caps()).unwrap();
        assert!(k.injective && k.faithful && k.preserves.is_hom());
        assert_eq!(k.preserves.unit, Some(true));

        let k = comparison_hom(&Quantale::zero(&Arc::new(Lattice::chain(2))), &caps()).unwrap();
        assert!(!k.injective && !k.faithful && k.preserves.is_hom());

        let k = comparison_hom(&Quantale::zero(&Arc::new(Lattice::one())), &caps()).unwrap();
        assert!(k.injective && k.map.len() == 1);

        let inv = Quantale::two().with_involution(vec![0, 1]).unwrap();
        let k = comparison_hom(&inv, &caps()).unwrap();
        assert_eq!((k.target_involutive, k.preserves.involution), (Some(true), Some(true)));
    }

    #[test]
    fn nuclei() {
        let z2 = Arc::new(powerset_monoid_quantale(&cyclic_group(2), &caps()).unwrap());
        let id = QuanticNucleus::identity(&z2).quotient();
        assert!(quantales_isomorphic(&id.quantale, &z2));

        let two = Arc::new(Quantale::two());
        let top = QuanticNucleus::new(&two, vec![1, 1]).unwrap().quotient();
        assert_eq!(top.quantale.len(), 1);

        // X ↦ X ∪ {e} is a closure but not quantic: j({1}) ⊙ j(∅) = {0,1} ⊄ j(∅) = {0}
        let with_e = (0..4).map(|x| x | 0b01).collect();
        assert!(matches!(QuanticNucleus::new(&z2, with_e), Err(QuantaleError::NotNucleus { .. })));

        let support = QuanticNucleus::new(&z2, vec![0, 3, 3, 3]).unwrap();
        let q = support.quotient();
        assert!(quantales_isomorphic(&q.quantale, &Quantale::two()));
        let proj = check_quantale_hom(&z2, &q.quantale, &q.projection);
        assert!(proj.is_hom() && proj.unit == Some(true));
    }

    #[test]
    fn quantale_enumeration() {
        let c2 = enumerate_quantales_on(&Arc::new(Lattice::chain(2)));
        // 1 ⊙ 1 ∈ {0, 1}, each with the identity involution or none
        assert_eq!(c2.len(), 4);
        let all = enumerate_quantales(3, &caps()).unwrap();
        assert!(all.iter().all(|q| check_bimorphism(q).is_ok()));
        assert!(all.iter().any(|q| q == &Quantale::min_quantale(3)));
    }
}
