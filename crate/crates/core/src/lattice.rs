//! Finite sup-lattices.
//!
//! A [`Lattice`] stores its order as a dense boolean matrix over the element
//! indices `0..n`, together with precomputed binary join and meet tables.
//! Validation follows the finite completeness criterion: a finite poset is a
//! sup-lattice as soon as it has a bottom and every pair of elements has a
//! least upper bound.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::{Caps, Elem};

/// Reason a candidate relation failed to be a partial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderViolation {
    Reflexivity(Elem),
    Antisymmetry(Elem, Elem),
    Transitivity(Elem, Elem, Elem),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("order matrix is not square (row {row} has {len} entries, expected {n})")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("not a partial order: {0:?}")]
    NotAPartialOrder(OrderViolation),
    #[error("poset has no bottom element")]
    NoBottom,
    #[error("elements {0} and {1} have no join")]
    MissingJoin(Elem, Elem),
    #[error("table has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("entry {value} at position {index} is not an element of the target")]
    OutOfRange { index: usize, value: Elem },
    #[error("bottom is not preserved")]
    BottomNotPreserved,
    #[error("join of {0} and {1} is not preserved")]
    NotJoinPreserving(Elem, Elem),
    #[error("map is not monotone on {0} <= {1}")]
    NotMonotone(Elem, Elem),
    #[error("map is not inflationary at {0}")]
    NotInflationary(Elem),
    #[error("map is not idempotent at {0}")]
    NotIdempotent(Elem),
    #[error("subset is not closed under joins: {0} v {1}")]
    NotJoinClosed(Elem, Elem),
    #[error("subset does not contain the bottom element")]
    MissingBottom,
    #[error("size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
}

/// A finite sup-lattice on the elements `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    n: usize,
    leq: Vec<bool>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    bottom: Elem,
    top: Elem,
}

impl Lattice {
    /// Validates a raw order matrix, where `rows[x][y]` means `x <= y`.
    pub fn from_order(rows: &[Vec<bool>]) -> Result<Self, LatticeError> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(LatticeError::NotSquare { row, len: r.len(), n });
            }
        }
        let leq: Vec<bool> = rows.iter().flatten().copied().collect();
        Self::from_flat(n, leq)
    }

    pub fn from_fn(n: usize, f: impl Fn(Elem, Elem) -> bool) -> Result<Self, LatticeError> {
        let mut leq = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                leq.push(f(x, y));
            }
        }
        Self::from_flat(n, leq)
    }

    fn from_flat(n: usize, leq: Vec<bool>) -> Result<Self, LatticeError> {
        let at = |x: Elem, y: Elem| leq[x * n + y];
        for x in 0..n {
            if !at(x, x) {
                return Err(LatticeError::NotAPartialOrder(OrderViolation::Reflexivity(x)));
            }
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if at(x, y) && at(y, x) {
                    return Err(LatticeError::NotAPartialOrder(OrderViolation::Antisymmetry(x, y)));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !at(x, y) {
                    continue;
                }
                for z in 0..n {
                    if at(y, z) && !at(x, z) {
                        return Err(LatticeError::NotAPartialOrder(OrderViolation::Transitivity(x, y, z)));
                    }
                }
            }
        }
        let bottom = (0..n).find(|&b| (0..n).all(|x| at(b, x))).ok_or(LatticeError::NoBottom)?;

        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in x..n {
                let uppers: Vec<Elem> = (0..n).filter(|&u| at(x, u) && at(y, u)).collect();
                let lub = uppers
                    .iter()
                    .copied()
                    .find(|&u| uppers.iter().all(|&v| at(u, v)))
                    .ok_or(LatticeError::MissingJoin(x, y))?;
                join[x * n + y] = lub;
                join[y * n + x] = lub;
            }
        }
        let top = (0..n).fold(bottom, |acc, x| join[acc * n + x]);

        // meets as joins of common lower bounds
        let mut meet = vec![0; n * n];
        for x in 0..n {
            for y in x..n {
                let glb = (0..n).filter(|&l| at(l, x) && at(l, y)).fold(bottom, |acc, l| join[acc * n + l]);
                meet[x * n + y] = glb;
                meet[y * n + x] = glb;
            }
        }
        Ok(Lattice { n, leq, join, meet, bottom, top })
    }

    /// The one-element lattice.
    pub fn one() -> Self {
        Self::chain(1)
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1, "a sup-lattice has at least one element");
        Self::from_fn(n, |x, y| x <= y).expect("chains are lattices")
    }

    /// The powerset of a `k`-element set; element `i` is the subset with bitmask `i`.
    pub fn powerset(k: usize) -> Self {
        Self::from_fn(1 << k, |x, y| x & !y == 0).expect("powersets are lattices")
    }

    /// `{0, a, b, 1}` with `a`, `b` incomparable (indices 0, 1, 2, 3).
    pub fn diamond() -> Self {
        Self::from_fn(4, |x, y| x == y || x == 0 || y == 3).expect("the diamond is a lattice")
    }

    /// Cartesian product; element `(a, b)` has index `a * right.len() + b`.
    pub fn product(left: &Lattice, right: &Lattice) -> Self {
        let m = right.n;
        Self::from_fn(left.n * m, |x, y| left.leq(x / m, y / m) && right.leq(x % m, y % m))
            .expect("products of lattices are lattices")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.n
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.leq[x * self.n + y]
    }

    #[inline]
    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn join2(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.n + y]
    }

    #[inline]
    pub fn meet2(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.n + y]
    }

    /// Join of an arbitrary set; the empty join is the bottom.
    pub fn join<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Elem {
        xs.into_iter().fold(self.bottom, |acc, x| self.join2(acc, x))
    }

    /// Meet of an arbitrary set, computed as the join of its common lower
    /// bounds; the empty meet is the top.
    pub fn meet<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Elem {
        let xs: Vec<Elem> = xs.into_iter().collect();
        self.join(self.elements().filter(|&l| xs.iter().all(|&x| self.leq(l, x))))
    }

    /// The order-dual lattice on the same indices.
    pub fn dual(&self) -> Self {
        let n = self.n;
        let mut leq = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                leq[x * n + y] = self.leq(y, x);
            }
        }
        Lattice { n, leq, join: self.meet.clone(), meet: self.join.clone(), bottom: self.top, top: self.bottom }
    }

    pub fn order_matrix(&self) -> Vec<Vec<bool>> {
        self.leq.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn down_set(&self, m: Elem) -> Vec<Elem> {
        self.elements().filter(|&x| self.leq(x, m)).collect()
    }

    pub fn up_set(&self, m: Elem) -> Vec<Elem> {
        self.elements().filter(|&x| self.leq(m, x)).collect()
    }

    /// Covering pairs `(x, y)`, i.e. the transitive reduction of `<`.
    pub fn hasse_edges(&self) -> Vec<(Elem, Elem)> {
        let mut edges = Vec::new();
        for x in self.elements() {
            for y in self.elements() {
                if self.lt(x, y) && !self.elements().any(|z| self.lt(x, z) && self.lt(z, y)) {
                    edges.push((x, y));
                }
            }
        }
        edges
    }

    /// Applies a relabeling: element `i` of the result is `perm[i]` of `self`.
    pub fn relabel(&self, perm: &[Elem]) -> Self {
        Self::from_fn(self.n, |i, j| self.leq(perm[i], perm[j])).expect("relabeling preserves the lattice property")
    }

    /// Canonical representative of the isomorphism class: the lexicographically
    /// least order matrix (row-major, `false < true`) over all relabelings
    /// that list elements along a linear extension of the order.
    pub fn canonical_form(&self) -> (Lattice, Vec<Elem>) {
        let mut best: Option<(Vec<bool>, Vec<Elem>)> = None;
        let mut perm = Vec::with_capacity(self.n);
        let mut used = vec![false; self.n];
        self.linear_extensions(&mut perm, &mut used, &mut |p| {
            let key: Vec<bool> = (0..p.len())
                .flat_map(|i| (0..p.len()).map(move |j| (i, j)))
                .map(|(i, j)| self.leq(p[i], p[j]))
                .collect();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, p.to_vec()));
            }
        });
        let (_, perm) = best.expect("every finite poset has a linear extension");
        (self.relabel(&perm), perm)
    }

    fn linear_extensions(&self, perm: &mut Vec<Elem>, used: &mut [bool], visit: &mut dyn FnMut(&[Elem])) {
        if perm.len() == self.n {
            visit(perm);
            return;
        }
        for x in self.elements() {
            if used[x] || self.elements().any(|y| !used[y] && self.lt(y, x)) {
                continue;
            }
            used[x] = true;
            perm.push(x);
            self.linear_extensions(perm, used, visit);
            perm.pop();
            used[x] = false;
        }
    }

    /// Calls `visit` with every order isomorphism `self -> other` (as a table)
    /// until it returns `false`.
    pub fn for_each_isomorphism(&self, other: &Lattice, visit: &mut dyn FnMut(&[Elem]) -> bool) {
        if self.n != other.n {
            return;
        }
        let degree = |l: &Lattice, x: Elem| {
            let below = l.elements().filter(|&y| l.leq(y, x)).count();
            let above = l.elements().filter(|&y| l.leq(x, y)).count();
            (below, above)
        };
        let candidates: Vec<Vec<Elem>> = self
            .elements()
            .map(|x| {
                let d = degree(self, x);
                other.elements().filter(|&y| degree(other, y) == d).collect()
            })
            .collect();
        let mut map = vec![usize::MAX; self.n];
        let mut taken = vec![false; self.n];
        self.iso_search(other, &candidates, 0, &mut map, &mut taken, visit);
    }

    fn iso_search(
        &self,
        other: &Lattice,
        candidates: &[Vec<Elem>],
        x: Elem,
        map: &mut Vec<Elem>,
        taken: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[Elem]) -> bool,
    ) -> bool {
        if x == self.n {
            return visit(map);
        }
        for &y in &candidates[x] {
            if taken[y] {
                continue;
            }
            let consistent =
                (0..x).all(|w| self.leq(w, x) == other.leq(map[w], y) && self.leq(x, w) == other.leq(y, map[w]));
            if !consistent {
                continue;
            }
            map[x] = y;
            taken[y] = true;
            let go_on = self.iso_search(other, candidates, x + 1, map, taken, visit);
            taken[y] = false;
            map[x] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }

    pub fn find_isomorphism(&self, other: &Lattice) -> Option<Vec<Elem>> {
        let mut found = None;
        self.for_each_isomorphism(other, &mut |m| {
            found = Some(m.to_vec());
            false
        });
        found
    }

    pub fn is_isomorphic(&self, other: &Lattice) -> bool {
        self.find_isomorphism(other).is_some()
    }

    /// Graphviz rendering of the Hasse diagram, bottom at the bottom.
    pub fn to_dot(&self, name: &str, label: &dyn Fn(Elem) -> String) -> String {
        let mut out = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
        for x in self.elements() {
            out.push_str(&format!("  n{x} [label=\"{}\"];\n", label(x)));
        }
        for (x, y) in self.hasse_edges() {
            out.push_str(&format!("  n{x} -> n{y};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// A subset of a parent lattice carrying its own lattice structure, with the
/// embedding back into the parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubLattice {
    pub lattice: Arc<Lattice>,
    /// `embed[i]` is the parent element represented by local element `i`.
    pub embed: Vec<Elem>,
}

impl SubLattice {
    /// The subset (sorted by parent index) with the induced order, which must
    /// itself be a sup-lattice.
    pub fn induced(parent: &Lattice, elems: &[Elem]) -> Result<Self, LatticeError> {
        let embed: Vec<Elem> = elems.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let lattice = Lattice::from_fn(embed.len(), |i, j| parent.leq(embed[i], embed[j]))?;
        Ok(SubLattice { lattice: Arc::new(lattice), embed })
    }

    /// A sub-sup-lattice: must contain the bottom and be closed under binary
    /// joins, so its joins agree with the parent's.
    pub fn join_closed(parent: &Lattice, elems: &[Elem]) -> Result<Self, LatticeError> {
        let set: BTreeSet<Elem> = elems.iter().copied().collect();
        if !set.contains(&parent.bottom()) {
            return Err(LatticeError::MissingBottom);
        }
        for &x in &set {
            for &y in &set {
                if !set.contains(&parent.join2(x, y)) {
                    return Err(LatticeError::NotJoinClosed(x, y));
                }
            }
        }
        Self::induced(parent, elems)
    }

    pub fn len(&self) -> usize {
        self.embed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.embed.is_empty()
    }

    pub fn contains(&self, parent_elem: Elem) -> bool {
        self.embed.binary_search(&parent_elem).is_ok()
    }

    /// Local index of a parent element, if it belongs to the subset.
    pub fn local(&self, parent_elem: Elem) -> Option<Elem> {
        self.embed.binary_search(&parent_elem).ok()
    }

    pub fn parent(&self, local: Elem) -> Elem {
        self.embed[local]
    }
}

/// Boolean flags of a join-homomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomFlags {
    pub strong: bool,
    pub dense: bool,
}

/// A join-preserving map between finite sup-lattices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JoinHom {
    src: Arc<Lattice>,
    dst: Arc<Lattice>,
    table: Vec<Elem>,
}

impl JoinHom {
    /// Validates a candidate table against the bottom and all binary joins.
    pub fn new(src: Arc<Lattice>, dst: Arc<Lattice>, table: Vec<Elem>) -> Result<Self, LatticeError> {
        if table.len() != src.len() {
            return Err(LatticeError::LengthMismatch { expected: src.len(), got: table.len() });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= dst.len()) {
            return Err(LatticeError::OutOfRange { index, value });
        }
        if table[src.bottom()] != dst.bottom() {
            return Err(LatticeError::BottomNotPreserved);
        }
        for x in src.elements() {
            for y in x..src.len() {
                if table[src.join2(x, y)] != dst.join2(table[x], table[y]) {
                    return Err(LatticeError::NotJoinPreserving(x, y));
                }
            }
        }
        Ok(JoinHom { src, dst, table })
    }

    pub fn identity(l: &Arc<Lattice>) -> Self {
        JoinHom { src: l.clone(), dst: l.clone(), table: l.elements().collect() }
    }

    pub fn zero(src: &Arc<Lattice>, dst: &Arc<Lattice>) -> Self {
        JoinHom { src: src.clone(), dst: dst.clone(), table: vec![dst.bottom(); src.len()] }
    }

    pub fn src(&self) -> &Arc<Lattice> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Lattice> {
        &self.dst
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &JoinHom) -> JoinHom {
        assert_eq!(self.dst.len(), then.src.len(), "composable homomorphisms");
        JoinHom {
            src: self.src.clone(),
            dst: then.dst.clone(),
            table: self.table.iter().map(|&y| then.table[y]).collect(),
        }
    }

    pub fn is_strong(&self) -> bool {
        self.table[self.src.top()] == self.dst.top()
    }

    pub fn is_dense(&self) -> bool {
        self.src.elements().all(|x| self.table[x] != self.dst.bottom() || x == self.src.bottom())
    }

    pub fn flags(&self) -> HomFlags {
        HomFlags { strong: self.is_strong(), dense: self.is_dense() }
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.dst.len()];
        for &y in &self.table {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        let set: BTreeSet<Elem> = self.table.iter().copied().collect();
        set.len() == self.table.len()
    }

    /// `x <= y` iff `f(x) <= f(y)`.
    pub fn is_order_embedding(&self) -> bool {
        self.src
            .elements()
            .all(|x| self.src.elements().all(|y| self.src.leq(x, y) == self.dst.leq(self.table[x], self.table[y])))
    }

    pub fn is_order_isomorphism(&self) -> bool {
        self.is_order_embedding() && self.is_surjective()
    }

    pub fn image(&self) -> Vec<Elem> {
        self.table.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Pointwise order on homomorphisms with the same endpoints.
    pub fn leq_pointwise(&self, other: &JoinHom) -> bool {
        self.table.iter().zip(&other.table).all(|(&a, &b)| self.dst.leq(a, b))
    }

    /// The right adjoint `y ↦ ⋁{x : f(x) <= y}` as a table `dst -> src`.
    pub fn right_adjoint(&self) -> Vec<Elem> {
        self.dst
            .elements()
            .map(|y| self.src.join(self.src.elements().filter(|&x| self.dst.leq(self.table[x], y))))
            .collect()
    }
}

/// Whether `table: src -> dst` preserves binary meets and the empty meet.
pub fn preserves_meets(table: &[Elem], src: &Lattice, dst: &Lattice) -> bool {
    table[src.top()] == dst.top()
        && src.elements().all(|x| src.elements().all(|y| table[src.meet2(x, y)] == dst.meet2(table[x], table[y])))
}

/// Whether `(f, g)` form an adjunction `f(x) <= y  ⟺  x <= g(y)`.
pub fn is_adjunction(f: &JoinHom, g: &[Elem]) -> bool {
    f.src().elements().all(|x| f.dst().elements().all(|y| f.dst().leq(f.apply(x), y) == f.src().leq(x, g[y])))
}

/// A closure operator: monotone, inflationary and idempotent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureOperator {
    carrier: Arc<Lattice>,
    table: Vec<Elem>,
}

/// Fixed points of a closure operator together with the projection onto them.
#[derive(Clone, Debug)]
pub struct ClosureQuotient {
    pub fixed: SubLattice,
    pub projection: JoinHom,
}

impl ClosureOperator {
    pub fn new(carrier: Arc<Lattice>, table: Vec<Elem>) -> Result<Self, LatticeError> {
        let l = &carrier;
        if table.len() != l.len() {
            return Err(LatticeError::LengthMismatch { expected: l.len(), got: table.len() });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= l.len()) {
            return Err(LatticeError::OutOfRange { index, value });
        }
        for x in l.elements() {
            if !l.leq(x, table[x]) {
                return Err(LatticeError::NotInflationary(x));
            }
            if table[table[x]] != table[x] {
                return Err(LatticeError::NotIdempotent(x));
            }
            for y in l.elements() {
                if l.leq(x, y) && !l.leq(table[x], table[y]) {
                    return Err(LatticeError::NotMonotone(x, y));
                }
            }
        }
        Ok(ClosureOperator { carrier, table })
    }

    pub fn identity(l: &Arc<Lattice>) -> Self {
        ClosureOperator { carrier: l.clone(), table: l.elements().collect() }
    }

    pub fn carrier(&self) -> &Arc<Lattice> {
        &self.carrier
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x]
    }

    pub fn fixed_points(&self) -> Vec<Elem> {
        self.carrier.elements().filter(|&x| self.table[x] == x).collect()
    }

    /// The lattice of fixed points (joins `j(⋁X)`) and the surjection `x ↦ j(x)`.
    pub fn quotient(&self) -> ClosureQuotient {
        let fixed = SubLattice::induced(&self.carrier, &self.fixed_points())
            .expect("fixed points of a closure operator form a sup-lattice");
        let table = self.table.iter().map(|&y| fixed.local(y).expect("closure lands in its fixed points")).collect();
        let projection = JoinHom::new(self.carrier.clone(), fixed.lattice.clone(), table)
            .expect("closure projections preserve joins");
        ClosureQuotient { fixed, projection }
    }
}

/// `closure_quotient` as a free function.
pub fn closure_quotient(j: &ClosureOperator) -> ClosureQuotient {
    j.quotient()
}

/// All join-homomorphisms `src -> dst`, in lexicographic order of tables.
pub fn enumerate_join_homs(src: &Arc<Lattice>, dst: &Arc<Lattice>) -> Vec<JoinHom> {
    let mut out = Vec::new();
    let mut table = vec![usize::MAX; src.len()];
    hom_search(src, dst, 0, &mut table, &mut |t| {
        out.push(JoinHom { src: src.clone(), dst: dst.clone(), table: t.to_vec() });
    });
    out
}

fn hom_search(src: &Lattice, dst: &Lattice, x: Elem, table: &mut Vec<Elem>, visit: &mut dyn FnMut(&[Elem])) {
    if x == src.len() {
        visit(table);
        return;
    }
    for v in dst.elements() {
        if x == src.bottom() && v != dst.bottom() {
            continue;
        }
        table[x] = v;
        // every pair whose operands and join are already assigned must agree
        let ok = (0..=x).all(|a| {
            (0..=x).all(|b| {
                let j = src.join2(a, b);
                j > x || table[j] == dst.join2(table[a], table[b])
            })
        });
        if ok {
            hom_search(src, dst, x + 1, table, visit);
        }
    }
    table[x] = usize::MAX;
}

/// All join-endomorphisms of `l`.
pub fn enumerate_join_endos(l: &Arc<Lattice>, caps: &Caps) -> Result<Vec<JoinHom>, LatticeError> {
    if l.len() > caps.endo_enum {
        return Err(LatticeError::CapExceeded { size: l.len(), cap: caps.endo_enum });
    }
    Ok(enumerate_join_homs(l, l))
}

/// Every `n`-element sup-lattice up to isomorphism, each in canonical form,
/// sorted by order matrix.
pub fn enumerate_sup_lattices(n: usize, caps: &Caps) -> Result<Vec<Lattice>, LatticeError> {
    if n > caps.lattice_enum {
        return Err(LatticeError::CapExceeded { size: n, cap: caps.lattice_enum });
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![Lattice::one()]),
        _ => {}
    }
    // every poset has a linear extension, so it suffices to relate i < j
    let middles: Vec<Elem> = (1..n - 1).collect();
    let pairs: Vec<(Elem, Elem)> =
        middles.iter().flat_map(|&i| middles.iter().filter(move |&&j| j > i).map(move |&j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let related = |x: Elem, y: Elem| -> bool {
            if x == y || x == 0 || y == n - 1 {
                return true;
            }
            pairs.iter().position(|&p| p == (x, y)).is_some_and(|k| mask >> k & 1 == 1)
        };
        if let Ok(l) = Lattice::from_fn(n, related) {
            let (canon, _) = l.canonical_form();
            seen.insert(canon.order_matrix());
        }
    }
    Ok(seen.into_iter().map(|m| Lattice::from_order(&m).expect("canonical forms are lattices")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(l: Lattice) -> Arc<Lattice> {
        Arc::new(l)
    }

    #[test]
    fn one_element_lattice() {
        let l = Lattice::from_order(&[vec![true]]).unwrap();
        assert_eq!((l.len(), l.bottom(), l.top()), (1, 0, 0));
    }

    #[test]
    fn two_chain() {
        let l = Lattice::from_order(&[vec![true, true], vec![false, true]]).unwrap();
        assert_eq!((l.bottom(), l.top()), (0, 1));
        assert_eq!(l, Lattice::chain(2));
    }

    #[test]
    fn vee_without_top_misses_a_join() {
        let rows = vec![vec![true, true, true], vec![false, true, false], vec![false, false, true]];
        assert_eq!(Lattice::from_order(&rows), Err(LatticeError::MissingJoin(1, 2)));
    }

    #[test]
    fn rejects_non_orders() {
        let not_reflexive = vec![vec![false]];
        assert!(matches!(
            Lattice::from_order(&not_reflexive),
            Err(LatticeError::NotAPartialOrder(OrderViolation::Reflexivity(0)))
        ));
        let cycle = vec![vec![true, true], vec![true, true]];
        assert!(matches!(
            Lattice::from_order(&cycle),
            Err(LatticeError::NotAPartialOrder(OrderViolation::Antisymmetry(0, 1)))
        ));
        let intransitive = vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]];
        assert!(matches!(
            Lattice::from_order(&intransitive),
            Err(LatticeError::NotAPartialOrder(OrderViolation::Transitivity(0, 1, 2)))
        ));
        let antichain = vec![vec![true, false], vec![false, true]];
        assert_eq!(Lattice::from_order(&antichain), Err(LatticeError::NoBottom));
        assert!(matches!(Lattice::from_order(&[vec![true, true]]), Err(LatticeError::NotSquare { .. })));
    }

    #[test]
    fn joins_and_meets() {
        let c3 = Lattice::chain(3);
        let d = Lattice::diamond();
        assert_eq!(c3.join([]), 0);
        assert_eq!(d.join([1, 2]), 3);
        assert_eq!(c3.join([1]), 1);
        assert_eq!(d.meet([1, 2]), 0);
        assert_eq!(c3.meet([]), 2);
        assert_eq!(Lattice::chain(2).meet([0, 1]), 0);
    }

    #[test]
    fn duals() {
        let c2 = Lattice::chain(2);
        let d = c2.dual();
        assert_eq!((d.bottom(), d.top()), (1, 0));
        assert!(d.is_isomorphic(&c2));
        let dd = Lattice::diamond().dual();
        assert!(dd.is_isomorphic(&Lattice::diamond()));
        assert_eq!(dd.join2(1, 2), 0);
        assert_eq!(Lattice::diamond().dual().dual(), Lattice::diamond());
    }

    #[test]
    fn hom_flags() {
        let c2 = arc(Lattice::chain(2));
        let id = JoinHom::identity(&c2);
        assert_eq!(id.flags(), HomFlags { strong: true, dense: true });
        let zero = JoinHom::new(c2.clone(), c2.clone(), vec![0, 0]).unwrap();
        assert_eq!(zero.flags(), HomFlags { strong: false, dense: false });
        let c3 = arc(Lattice::chain(3));
        let f = JoinHom::new(c3, c2, vec![0, 1, 1]).unwrap();
        assert_eq!(f.flags(), HomFlags { strong: true, dense: true });
    }

    #[test]
    fn hom_errors() {
        let c2 = arc(Lattice::chain(2));
        let d = arc(Lattice::diamond());
        assert_eq!(JoinHom::new(c2.clone(), c2.clone(), vec![1, 1]), Err(LatticeError::BottomNotPreserved));
        // a and b go to the two atoms' join but the top goes elsewhere
        assert_eq!(JoinHom::new(d.clone(), d.clone(), vec![0, 1, 2, 1]), Err(LatticeError::NotJoinPreserving(1, 2)));
        assert!(matches!(JoinHom::new(c2.clone(), c2.clone(), vec![0]), Err(LatticeError::LengthMismatch { .. })));
        assert!(matches!(
            JoinHom::new(c2.clone(), c2, vec![0, 5]),
            Err(LatticeError::OutOfRange { index: 1, value: 5 })
        ));
    }

    #[test]
    fn right_adjoints() {
        let c2 = arc(Lattice::chain(2));
        assert_eq!(JoinHom::identity(&c2).right_adjoint(), vec![0, 1]);
        assert_eq!(JoinHom::zero(&c2, &c2).right_adjoint(), vec![1, 1]);
        let c3 = arc(Lattice::chain(3));
        let f = JoinHom::new(c3, c2, vec![0, 1, 1]).unwrap();
        assert_eq!(f.right_adjoint(), vec![0, 2]);
    }

    #[test]
    fn closure_quotients() {
        let c3 = arc(Lattice::chain(3));
        let q = ClosureOperator::identity(&c3).quotient();
        assert_eq!(*q.fixed.lattice, *c3);
        assert_eq!(q.projection.table(), &[0, 1, 2]);

        let c2 = arc(Lattice::chain(2));
        let top = ClosureOperator::new(c2, vec![1, 1]).unwrap().quotient();
        assert_eq!(top.fixed.len(), 1);

        // closed sets of X = {1,2} with {1} open: ∅, {2}, X (bitmasks 0, 2, 3)
        let p = arc(Lattice::powerset(2));
        let j = ClosureOperator::new(p, vec![0, 3, 2, 3]).unwrap();
        let q = j.quotient();
        assert_eq!(q.fixed.embed, vec![0, 2, 3]);
        assert_eq!(*q.fixed.lattice, Lattice::chain(3));
        assert!(q.projection.is_surjective());
    }

    #[test]
    fn closure_operator_errors() {
        let c3 = arc(Lattice::chain(3));
        assert_eq!(ClosureOperator::new(c3.clone(), vec![0, 0, 2]), Err(LatticeError::NotInflationary(1)));
        let d = arc(Lattice::diamond());
        assert_eq!(ClosureOperator::new(d, vec![0, 3, 2, 3]).map(|_| ()), Ok(()));
        assert_eq!(ClosureOperator::new(c3, vec![1, 2, 2]), Err(LatticeError::NotIdempotent(0)));
    }

    #[test]
    fn endo_counts() {
        let caps = Caps::default();
        assert_eq!(enumerate_join_endos(&arc(Lattice::chain(2)), &caps).unwrap().len(), 2);
        assert_eq!(enumerate_join_endos(&arc(Lattice::chain(3)), &caps).unwrap().len(), 6);
        assert_eq!(enumerate_join_endos(&arc(Lattice::one()), &caps).unwrap().len(), 1);
        let small = Caps { endo_enum: 2, ..Caps::default() };
        assert!(matches!(
            enumerate_join_endos(&arc(Lattice::chain(3)), &small),
            Err(LatticeError::CapExceeded { size: 3, cap: 2 })
        ));
    }

    #[test]
    fn endos_are_sorted_and_valid() {
        let d = arc(Lattice::diamond());
        let endos = enumerate_join_homs(&d, &d);
        // join-endos of the four-element boolean algebra are 2x2 boolean matrices
        assert_eq!(endos.len(), 16);
        for w in endos.windows(2) {
            assert!(w[0].table() < w[1].table());
        }
        for f in &endos {
            JoinHom::new(d.clone(), d.clone(), f.table().to_vec()).unwrap();
        }
    }

    #[test]
    fn lattice_counts() {
        let caps = Caps { lattice_enum: 7, ..Caps::default() };
        let counts: Vec<usize> = (1..=7).map(|n| enumerate_sup_lattices(n, &caps).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 5, 15, 53]);
        assert!(matches!(enumerate_sup_lattices(6, &Caps::default()), Err(LatticeError::CapExceeded { .. })));
    }

    #[test]
    fn enumerated_lattices_are_pairwise_non_isomorphic() {
        let caps = Caps::default();
        for n in 1..=5 {
            let ls = enumerate_sup_lattices(n, &caps).unwrap();
            for (i, a) in ls.iter().enumerate() {
                assert_eq!(a.bottom(), 0);
                for b in &ls[i + 1..] {
                    assert!(!a.is_isomorphic(b));
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_an_isomorphism_invariant() {
        let d = Lattice::diamond();
        let shuffled = d.relabel(&[3, 1, 0, 2]);
        assert_eq!(d.canonical_form().0, shuffled.canonical_form().0);
        let (canon, perm) = shuffled.canonical_form();
        assert_eq!(canon, shuffled.relabel(&perm));
    }

    #[test]
    fn hasse_diagrams() {
        assert_eq!(Lattice::chain(2).hasse_edges(), vec![(0, 1)]);
        assert_eq!(Lattice::diamond().hasse_edges().len(), 4);
        assert_eq!(Lattice::powerset(3).hasse_edges().len(), 12);
    }

    #[test]
    fn sub_lattices() {
        let d = Lattice::diamond();
        assert_eq!(SubLattice::join_closed(&d, &[1, 2]), Err(LatticeError::MissingBottom));
        assert_eq!(SubLattice::join_closed(&d, &[0, 1, 2]), Err(LatticeError::NotJoinClosed(1, 2)));
        let s = SubLattice::join_closed(&d, &[0, 1, 3]).unwrap();
        assert_eq!(*s.lattice, Lattice::chain(3));
        assert_eq!(s.local(3), Some(2));
        assert_eq!(s.parent(1), 1);
    }
}
