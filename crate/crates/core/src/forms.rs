//! 2-forms between finite sup-lattices.
//!
//! A [`TwoForm`] is a bimorphism `L × R → 2`. The value `0` means the two
//! elements are orthogonal. The orthogonal images
//!
//! ```text
//! x^⊥ = ⋁{y ∈ R : x ⊥ y}          ^⊥y = ⋁{x ∈ L : x ⊥ y}
//! ```
//!
//! form a Galois connection, and every Galois connection arises this way.
//! Besides the forms themselves this module covers orthomorphisms (covariant
//! pairs preserving the form), continuous maps (contravariant pairs
//! satisfying `⟨f(x)|y⟩ = ⟨x|g(y)⟩`) and the orthogonal quotient.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{enumerate_join_homs, ClosureOperator, JoinHom, Lattice, LatticeError, SubLattice};
use crate::residuation::{check_bimorphism, Bimorphism, BimorphismViolation, TWO};
use crate::{Caps, Elem, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("value matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error("the bottom of the {side:?} lattice is not orthogonal to {other}")]
    BottomViolation { side: Side, other: Elem },
    #[error("join of {pair:?} in the {side:?} argument is not preserved at {witness}")]
    JoinViolation { side: Side, pair: (Elem, Elem), witness: Elem },
    #[error("not a Galois connection: {0:?}")]
    NotGalois(GaloisViolation),
    #[error("endpoints of the maps do not match the forms")]
    EndpointMismatch,
    #[error("not an orthomorphism: <f({x})|g({y})> differs from <{x}|{y}>")]
    NotOrthomorphism { x: Elem, y: Elem },
    #[error("not continuous: <f({x})|{y}> differs from <{x}|g({y})>")]
    NotContinuous { x: Elem, y: Elem },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("size {size} exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<BimorphismViolation> for FormError {
    fn from(v: BimorphismViolation) -> Self {
        match v {
            BimorphismViolation::Bottom { side, other } => FormError::BottomViolation { side, other },
            BimorphismViolation::Join { side, a, b, other } => {
                FormError::JoinViolation { side, pair: (a, b), witness: other }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaloisViolation {
    /// `r` is not antitone on `x <= x'`.
    RightNotAntitone(Elem, Elem),
    /// `l` is not antitone on `y <= y'`.
    LeftNotAntitone(Elem, Elem),
    /// `x <= l(r(x))` fails.
    LeftUnit(Elem),
    /// `y <= r(l(y))` fails.
    RightUnit(Elem),
    /// A table has the wrong length or an out-of-range entry.
    BadTable,
}

/// A 2-form `L × R → 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoForm {
    left: Arc<Lattice>,
    right: Arc<Lattice>,
    values: Vec<bool>,
}

impl Bimorphism for TwoForm {
    fn left(&self) -> &Lattice {
        &self.left
    }
    fn right(&self) -> &Lattice {
        &self.right
    }
    fn target(&self) -> &Lattice {
        &TWO
    }
    fn apply(&self, x: Elem, y: Elem) -> Elem {
        usize::from(self.value(x, y))
    }
}

/// Definitional flags of a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FormFlags {
    pub dense_left: bool,
    pub dense_right: bool,
    pub faithful_left: bool,
    pub faithful_right: bool,
    pub symmetric: bool,
}

impl FormFlags {
    pub fn dense(&self) -> bool {
        self.dense_left && self.dense_right
    }
    pub fn faithful(&self) -> bool {
        self.faithful_left && self.faithful_right
    }
}

/// The two orthogonal-image tables of a form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthImages {
    /// `x ↦ x^⊥`, indexed by `L`.
    pub right: Vec<Elem>,
    /// `y ↦ ^⊥y`, indexed by `R`.
    pub left: Vec<Elem>,
}

impl TwoForm {
    /// Validates a value matrix (`values[x][y]` is `⟨x|y⟩`).
    pub fn new(left: Arc<Lattice>, right: Arc<Lattice>, values: &[Vec<bool>]) -> Result<Self, FormError> {
        let shape_err = || FormError::ShapeMismatch {
            rows: values.len(),
            cols: values.first().map_or(0, Vec::len),
            expected_rows: left.len(),
            expected_cols: right.len(),
        };
        if values.len() != left.len() || values.iter().any(|r| r.len() != right.len()) {
            return Err(shape_err());
        }
        let flat = values.iter().flatten().copied().collect();
        Self::from_flat(left, right, flat)
    }

    pub fn from_fn(left: Arc<Lattice>, right: Arc<Lattice>, f: impl Fn(Elem, Elem) -> bool) -> Result<Self, FormError> {
        let mut values = Vec::with_capacity(left.len() * right.len());
        for x in left.elements() {
            for y in right.elements() {
                values.push(f(x, y));
            }
        }
        Self::from_flat(left, right, values)
    }

    /// Builds a form from its orthogonality relation.
    pub fn from_orthogonality(
        left: Arc<Lattice>,
        right: Arc<Lattice>,
        perp: impl Fn(Elem, Elem) -> bool,
    ) -> Result<Self, FormError> {
        Self::from_fn(left, right, |x, y| !perp(x, y))
    }

    fn from_flat(left: Arc<Lattice>, right: Arc<Lattice>, values: Vec<bool>) -> Result<Self, FormError> {
        let form = TwoForm { left, right, values };
        check_bimorphism(&form)?;
        Ok(form)
    }

    /// The form with every pair orthogonal.
    pub fn all_orthogonal(left: &Arc<Lattice>, right: &Arc<Lattice>) -> Self {
        TwoForm { left: left.clone(), right: right.clone(), values: vec![false; left.len() * right.len()] }
    }

    /// `x ⊥ y ⟺ x ≤ y` on `L × L^op`.
    pub fn order_form(l: &Arc<Lattice>) -> Self {
        Self::from_orthogonality(l.clone(), Arc::new(l.dual()), |x, y| l.leq(x, y))
            .expect("the order relation of L defines a form on L × L^op")
    }

    /// `x ⊥ y ⟺ x ≤ y` on `L × (L_j)^op` for a closure operator `j`; the right
    /// lattice is the dual of the fixed-point lattice.
    pub fn closure_form(j: &ClosureOperator) -> (Self, SubLattice) {
        let q = j.quotient();
        let l = j.carrier().clone();
        let fixed = q.fixed.clone();
        let right = Arc::new(fixed.lattice.dual());
        let form = Self::from_orthogonality(l.clone(), right, |x, y| l.leq(x, fixed.parent(y)))
            .expect("closure forms are bimorphisms");
        (form, q.fixed)
    }

    /// `X ⊥ Y ⟺ x ρ y for all x ∈ X, y ∈ Y` on `P(S) × P(T)`, with
    /// `relation[s][t]` giving `s ρ t`.
    pub fn relation_form(relation: &[Vec<bool>]) -> Result<Self, FormError> {
        let s = relation.len();
        let t = relation.first().map_or(0, Vec::len);
        if relation.iter().any(|r| r.len() != t) {
            return Err(FormError::ShapeMismatch { rows: s, cols: t, expected_rows: s, expected_cols: t });
        }
        let left = Arc::new(Lattice::powerset(s));
        let right = Arc::new(Lattice::powerset(t));
        Self::from_orthogonality(left, right, |xs, ys| {
            (0..s).filter(|i| xs >> i & 1 == 1).all(|i| (0..t).filter(|j| ys >> j & 1 == 1).all(|j| relation[i][j]))
        })
    }

    /// The form of a finite topological space: `S ⊥ U ⟺ S ∩ U = ∅` between
    /// `P(X)` (bitmasks) and the lattice of opens, given as bitmasks.
    pub fn space_form(points: usize, opens: &[usize]) -> Result<(Self, Vec<usize>), FormError> {
        let mut opens: Vec<usize> = opens.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        opens.sort_by_key(|u| (u.count_ones(), *u));
        let topology = Lattice::from_fn(opens.len(), |i, j| opens[i] & !opens[j] == 0)?;
        let left = Arc::new(Lattice::powerset(points));
        let right = Arc::new(topology);
        let form = Self::from_orthogonality(left, right, |s, u| s & opens[u] == 0)?;
        Ok((form, opens))
    }

    /// The Sierpiński space `X = {1, 2}` with opens `∅, {1}, X`.
    pub fn sierpinski() -> Self {
        Self::space_form(2, &[0b00, 0b01, 0b11]).expect("Sierpinski space").0
    }

    pub fn left(&self) -> &Arc<Lattice> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Lattice> {
        &self.right
    }

    /// `⟨x|y⟩` as a boolean (`true` is the value 1).
    #[inline]
    pub fn value(&self, x: Elem, y: Elem) -> bool {
        self.values[x * self.right.len() + y]
    }

    #[inline]
    pub fn orthogonal(&self, x: Elem, y: Elem) -> bool {
        !self.value(x, y)
    }

    pub fn values(&self) -> Vec<Vec<bool>> {
        self.values.chunks(self.right.len().max(1)).map(|r| r.to_vec()).collect()
    }

    /// The orthogonality matrix, `orthogonal[x][y] = (⟨x|y⟩ == 0)`.
    pub fn orthogonality_matrix(&self) -> Vec<Vec<bool>> {
        self.left.elements().map(|x| self.right.elements().map(|y| self.orthogonal(x, y)).collect()).collect()
    }

    /// `x^⊥`
    pub fn right_orth(&self, x: Elem) -> Elem {
        self.right.join(self.right.elements().filter(|&y| self.orthogonal(x, y)))
    }

    /// `^⊥y`
    pub fn left_orth(&self, y: Elem) -> Elem {
        self.left.join(self.left.elements().filter(|&x| self.orthogonal(x, y)))
    }

    pub fn orth_images(&self) -> OrthImages {
        OrthImages {
            right: self.left.elements().map(|x| self.right_orth(x)).collect(),
            left: self.right.elements().map(|y| self.left_orth(y)).collect(),
        }
    }

    /// `x ↦ ^⊥(x^⊥)`
    pub fn left_closure(&self) -> ClosureOperator {
        let t = self.left.elements().map(|x| self.left_orth(self.right_orth(x))).collect();
        ClosureOperator::new(self.left.clone(), t).expect("double orthogonals are closures")
    }

    /// `y ↦ (^⊥y)^⊥`
    pub fn right_closure(&self) -> ClosureOperator {
        let t = self.right.elements().map(|y| self.right_orth(self.left_orth(y))).collect();
        ClosureOperator::new(self.right.clone(), t).expect("double orthogonals are closures")
    }

    /// The same form read as `R × L → 2`.
    pub fn transpose(&self) -> TwoForm {
        TwoForm::from_fn(self.right.clone(), self.left.clone(), |y, x| self.value(x, y))
            .expect("transposes of forms are forms")
    }

    pub fn is_symmetric(&self) -> bool {
        self.left == self.right
            && self.left.elements().all(|x| self.left.elements().all(|y| self.value(x, y) == self.value(y, x)))
    }

    pub fn classify(&self) -> FormFlags {
        let (l, r) = (&self.left, &self.right);
        let dense_right = r.elements().all(|y| !self.orthogonal(l.top(), y) || y == r.bottom());
        let dense_left = l.elements().all(|x| !self.orthogonal(x, r.top()) || x == l.bottom());
        let faithful_right = r
            .elements()
            .all(|y| r.elements().all(|y2| y == y2 || l.elements().any(|z| self.value(z, y) != self.value(z, y2))));
        let faithful_left = l
            .elements()
            .all(|x| l.elements().all(|x2| x == x2 || r.elements().any(|z| self.value(x, z) != self.value(x2, z))));
        FormFlags { dense_left, dense_right, faithful_left, faithful_right, symmetric: self.is_symmetric() }
    }

    /// Restriction to sub-lattices of the two sides.
    pub fn restrict(&self, left: &SubLattice, right: &SubLattice) -> Result<TwoForm, FormError> {
        TwoForm::from_fn(left.lattice.clone(), right.lattice.clone(), |x, y| {
            self.value(left.parent(x), right.parent(y))
        })
    }
}

/// The form determined by a Galois connection `(r, l)`: `x ⊥ y ⟺ x ≤ l(y)`.
pub fn form_from_galois(
    left: &Arc<Lattice>,
    right: &Arc<Lattice>,
    r: &[Elem],
    l: &[Elem],
) -> Result<TwoForm, FormError> {
    if r.len() != left.len()
        || l.len() != right.len()
        || r.iter().any(|&v| v >= right.len())
        || l.iter().any(|&v| v >= left.len())
    {
        return Err(FormError::NotGalois(GaloisViolation::BadTable));
    }
    for x in left.elements() {
        for x2 in left.elements() {
            if left.leq(x, x2) && !right.leq(r[x2], r[x]) {
                return Err(FormError::NotGalois(GaloisViolation::RightNotAntitone(x, x2)));
            }
        }
        if !left.leq(x, l[r[x]]) {
            return Err(FormError::NotGalois(GaloisViolation::LeftUnit(x)));
        }
    }
    for y in right.elements() {
        for y2 in right.elements() {
            if right.leq(y, y2) && !left.leq(l[y2], l[y]) {
                return Err(FormError::NotGalois(GaloisViolation::LeftNotAntitone(y, y2)));
            }
        }
        if !right.leq(y, r[l[y]]) {
            return Err(FormError::NotGalois(GaloisViolation::RightUnit(y)));
        }
    }
    TwoForm::from_orthogonality(left.clone(), right.clone(), |x, y| left.leq(x, l[y]))
}

/// `orth_images` as a free function.
pub fn orth_images(form: &TwoForm) -> OrthImages {
    form.orth_images()
}

/// Every clause of the Galois correspondence and its density/faithfulness
/// characterizations, each evaluated independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisReport {
    pub antitone: bool,
    pub galois: bool,
    /// `x ⊥ y ⟺ x ≤ ^⊥y ⟺ y ≤ x^⊥` on all pairs.
    pub orthogonality_matches: bool,
    pub round_trip: bool,
    /// dense on the right; `1^⊥ = 0`; `0` is the only `y` with `^⊥y = 1`.
    pub dense_right: [bool; 3],
    /// dense on the left; `^⊥1 = 0`; `0` is the only `x` with `x^⊥ = 1`.
    pub dense_left: [bool; 3],
    /// faithful on the right; `(-)^⊥` surjective; `^⊥(-)` injective; `(^⊥y)^⊥ = y`.
    pub faithful_right: [bool; 4],
    /// faithful on the left; `(-)^⊥` injective; `^⊥(-)` surjective; `^⊥(x^⊥) = x`.
    pub faithful_left: [bool; 4],
    /// faithful iff `(-)^⊥` is an antitone order isomorphism.
    pub nonsingular: [bool; 2],
}

impl GaloisReport {
    /// Whether every clause agrees with its siblings and the connection laws hold.
    pub fn consistent(&self) -> bool {
        fn same<const N: usize>(v: &[bool; N]) -> bool {
            v.iter().all(|&b| b == v[0])
        }
        self.antitone
            && self.galois
            && self.orthogonality_matches
            && self.round_trip
            && same(&self.dense_right)
            && same(&self.dense_left)
            && same(&self.faithful_right)
            && same(&self.faithful_left)
            && same(&self.nonsingular)
    }
}

fn is_surjective(table: &[Elem], n: usize) -> bool {
    table.iter().copied().collect::<BTreeSet<_>>().len() == n
}

fn is_injective(table: &[Elem]) -> bool {
    table.iter().copied().collect::<BTreeSet<_>>().len() == table.len()
}

pub fn galois_report(form: &TwoForm) -> GaloisReport {
    let (l, r) = (form.left().as_ref(), form.right().as_ref());
    let OrthImages { right: ro, left: lo } = form.orth_images();
    let flags = form.classify();
    let antitone = l.elements().all(|x| l.elements().all(|x2| !l.leq(x, x2) || r.leq(ro[x2], ro[x])))
        && r.elements().all(|y| r.elements().all(|y2| !r.leq(y, y2) || l.leq(lo[y2], lo[y])));
    let galois = l.elements().all(|x| l.leq(x, lo[ro[x]])) && r.elements().all(|y| r.leq(y, ro[lo[y]]));
    let orthogonality_matches = l.elements().all(|x| {
        r.elements().all(|y| {
            let perp = form.orthogonal(x, y);
            perp == l.leq(x, lo[y]) && perp == r.leq(y, ro[x])
        })
    });
    let round_trip = form_from_galois(form.left(), form.right(), &ro, &lo).as_ref() == Ok(form);
    let dense_right =
        [flags.dense_right, ro[l.top()] == r.bottom(), r.elements().filter(|&y| lo[y] == l.top()).eq([r.bottom()])];
    let dense_left =
        [flags.dense_left, lo[r.top()] == l.bottom(), l.elements().filter(|&x| ro[x] == r.top()).eq([l.bottom()])];
    let faithful_right =
        [flags.faithful_right, is_surjective(&ro, r.len()), is_injective(&lo), r.elements().all(|y| ro[lo[y]] == y)];
    let faithful_left =
        [flags.faithful_left, is_injective(&ro), is_surjective(&lo, l.len()), l.elements().all(|x| lo[ro[x]] == x)];
    // antitone order isomorphism: a bijection with x ≤ x' ⟺ x'^⊥ ≤ x^⊥
    let anti_iso = is_injective(&ro)
        && is_surjective(&ro, r.len())
        && l.elements().all(|x| l.elements().all(|x2| l.leq(x, x2) == r.leq(ro[x2], ro[x])));
    GaloisReport {
        antitone,
        galois,
        orthogonality_matches,
        round_trip,
        dense_right,
        dense_left,
        faithful_right,
        faithful_left,
        nonsingular: [flags.faithful(), anti_iso],
    }
}

/// All 2-forms on `L × R`, by filtering boolean matrices (bottom row and
/// column fixed to 0), in lexicographic order of the value matrix.
pub fn enumerate_two_forms(left: &Arc<Lattice>, right: &Arc<Lattice>, caps: &Caps) -> Result<Vec<TwoForm>, FormError> {
    let cells = left.len() * right.len();
    if cells > caps.form_cells {
        return Err(FormError::CapExceeded { size: cells, cap: caps.form_cells });
    }
    let free: Vec<(Elem, Elem)> = left
        .elements()
        .filter(|&x| x != left.bottom())
        .flat_map(|x| right.elements().filter(|&y| y != right.bottom()).map(move |y| (x, y)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut values = vec![false; cells];
        for (k, &(x, y)) in free.iter().enumerate() {
            values[x * right.len() + y] = mask >> k & 1 == 1;
        }
        if let Ok(f) = TwoForm::from_flat(left.clone(), right.clone(), values) {
            out.push(f);
        }
    }
    out.sort_by(|a, b| a.values.cmp(&b.values));
    Ok(out)
}

/// Pairs of order isomorphisms `(L ≅ L', R ≅ R')` commuting with the values.
pub fn find_form_isomorphism(a: &TwoForm, b: &TwoForm) -> Option<(Vec<Elem>, Vec<Elem>)> {
    let mut right_isos = Vec::new();
    a.right.for_each_isomorphism(&b.right, &mut |m| {
        right_isos.push(m.to_vec());
        true
    });
    if right_isos.is_empty() {
        return None;
    }
    let mut found = None;
    a.left.for_each_isomorphism(&b.left, &mut |ml| {
        for mr in &right_isos {
            let commutes =
                a.left.elements().all(|x| a.right.elements().all(|y| a.value(x, y) == b.value(ml[x], mr[y])));
            if commutes {
                found = Some((ml.to_vec(), mr.clone()));
                return false;
            }
        }
        true
    });
    found
}

pub fn forms_isomorphic(a: &TwoForm, b: &TwoForm) -> bool {
    find_form_isomorphism(a, b).is_some()
}

/// A covariant pair `(f, g)` with `⟨f(x)|g(y)⟩ = ⟨x|y⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orthomorphism {
    pub f: JoinHom,
    pub g: JoinHom,
    pub src: TwoForm,
    pub dst: TwoForm,
}

/// Consequences of the orthomorphism law. Each entry is `None` when its
/// hypotheses do not hold, otherwise whether the conclusion holds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrthoFacts {
    /// `g` surjective ⟹ `g(x^⊥) = f(x)^⊥`.
    pub commutes_right: Option<bool>,
    /// `f` surjective ⟹ `f(^⊥y) = ^⊥g(y)`.
    pub commutes_left: Option<bool>,
    /// `g` surjective, `f` strong, source dense right ⟹ target dense right.
    pub preserves_density_right: Option<bool>,
    /// `g` surjective and dense, `f` strong ⟹ (source dense right ⟺ target dense right).
    pub reflects_density_right: Option<bool>,
    /// `f` surjective, `g` strong, source dense left ⟹ target dense left.
    pub preserves_density_left: Option<bool>,
    /// `f` surjective and dense, `g` strong ⟹ (source dense left ⟺ target dense left).
    pub reflects_density_left: Option<bool>,
    /// `g` surjective, source faithful left ⟹ `f` order embedding.
    pub f_embedding: Option<bool>,
    /// `f` surjective, source faithful right ⟹ `g` order embedding.
    pub g_embedding: Option<bool>,
    /// `g` strong, source dense left ⟹ `f` dense.
    pub f_dense: Option<bool>,
    /// `f` strong, source dense right ⟹ `g` dense.
    pub g_dense: Option<bool>,
    /// quotient orthomorphism out of a faithful form ⟹ both order isomorphisms.
    pub isomorphism_if_faithful: Option<bool>,
}

impl OrthoFacts {
    pub fn entries(&self) -> [(&'static str, Option<bool>); 11] {
        [
            ("commutes_right", self.commutes_right),
            ("commutes_left", self.commutes_left),
            ("preserves_density_right", self.preserves_density_right),
            ("reflects_density_right", self.reflects_density_right),
            ("preserves_density_left", self.preserves_density_left),
            ("reflects_density_left", self.reflects_density_left),
            ("f_embedding", self.f_embedding),
            ("g_embedding", self.g_embedding),
            ("f_dense", self.f_dense),
            ("g_dense", self.g_dense),
            ("isomorphism_if_faithful", self.isomorphism_if_faithful),
        ]
    }

    /// Names of consequences whose hypotheses hold but conclusion fails.
    pub fn violations(&self) -> Vec<&'static str> {
        self.entries().into_iter().filter(|(_, v)| *v == Some(false)).map(|(n, _)| n).collect()
    }
}

fn when(hyp: bool, concl: impl FnOnce() -> bool) -> Option<bool> {
    hyp.then(concl)
}

impl Orthomorphism {
    pub fn new(f: JoinHom, g: JoinHom, src: &TwoForm, dst: &TwoForm) -> Result<Self, FormError> {
        if f.src() != src.left() || f.dst() != dst.left() || g.src() != src.right() || g.dst() != dst.right() {
            return Err(FormError::EndpointMismatch);
        }
        for x in src.left.elements() {
            for y in src.right.elements() {
                if dst.value(f.apply(x), g.apply(y)) != src.value(x, y) {
                    return Err(FormError::NotOrthomorphism { x, y });
                }
            }
        }
        Ok(Orthomorphism { f, g, src: src.clone(), dst: dst.clone() })
    }

    pub fn identity(form: &TwoForm) -> Self {
        Orthomorphism {
            f: JoinHom::identity(form.left()),
            g: JoinHom::identity(form.right()),
            src: form.clone(),
            dst: form.clone(),
        }
    }

    pub fn is_quotient(&self) -> bool {
        self.f.is_surjective() && self.g.is_surjective()
    }

    pub fn facts(&self) -> OrthoFacts {
        let (f, g, src, dst) = (&self.f, &self.g, &self.src, &self.dst);
        let (sf, df) = (src.classify(), dst.classify());
        let (fs, gs) = (f.is_surjective(), g.is_surjective());
        OrthoFacts {
            commutes_right: when(gs, || {
                src.left.elements().all(|x| g.apply(src.right_orth(x)) == dst.right_orth(f.apply(x)))
            }),
            commutes_left: when(fs, || {
                src.right.elements().all(|y| f.apply(src.left_orth(y)) == dst.left_orth(g.apply(y)))
            }),
            preserves_density_right: when(gs && f.is_strong() && sf.dense_right, || df.dense_right),
            reflects_density_right: when(gs && f.is_strong() && g.is_dense(), || sf.dense_right == df.dense_right),
            preserves_density_left: when(fs && g.is_strong() && sf.dense_left, || df.dense_left),
            reflects_density_left: when(fs && g.is_strong() && f.is_dense(), || sf.dense_left == df.dense_left),
            f_embedding: when(gs && sf.faithful_left, || f.is_order_embedding()),
            g_embedding: when(fs && sf.faithful_right, || g.is_order_embedding()),
            f_dense: when(g.is_strong() && sf.dense_left, || f.is_dense()),
            g_dense: when(f.is_strong() && sf.dense_right, || g.is_dense()),
            isomorphism_if_faithful: when(fs && gs && sf.faithful(), || {
                f.is_order_isomorphism() && g.is_order_isomorphism()
            }),
        }
    }
}

/// `check_orthomorphism`: validates the pair and reports the derived facts.
pub fn check_orthomorphism(
    f: JoinHom,
    g: JoinHom,
    src: &TwoForm,
    dst: &TwoForm,
) -> Result<(Orthomorphism, OrthoFacts), FormError> {
    let o = Orthomorphism::new(f, g, src, dst)?;
    let facts = o.facts();
    Ok((o, facts))
}

/// The faithful quotient of a form and the closure pair onto it.
#[derive(Clone, Debug)]
pub struct OrthogonalQuotient {
    pub form: TwoForm,
    /// Fixed points of `x ↦ ^⊥(x^⊥)` in `L`.
    pub left: SubLattice,
    /// Fixed points of `y ↦ (^⊥y)^⊥` in `R`.
    pub right: SubLattice,
    pub map: Orthomorphism,
}

pub fn orthogonal_quotient(form: &TwoForm) -> OrthogonalQuotient {
    let lq = form.left_closure().quotient();
    let rq = form.right_closure().quotient();
    let quotient = form.restrict(&lq.fixed, &rq.fixed).expect("restrictions to closed elements are forms");
    let map = Orthomorphism::new(lq.projection, rq.projection, form, &quotient)
        .expect("the closure pair is an orthomorphism");
    OrthogonalQuotient { form: quotient, left: lq.fixed, right: rq.fixed, map }
}

/// A contravariant pair `f: L → L'`, `g: R' → R` with `⟨f(x)|y⟩ = ⟨x|g(y)⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuousMap {
    pub f: JoinHom,
    pub g: JoinHom,
    pub src: TwoForm,
    pub dst: TwoForm,
}

/// The continuity condition and its four reformulations, each evaluated
/// independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContinuityConditions {
    pub definition: bool,
    /// `g_*(x^⊥) = f(x)^⊥` for all `x`.
    pub right_adjoint_form: bool,
    /// `f_*(^⊥y) = ^⊥g(y)` for all `y`.
    pub left_adjoint_form: bool,
    /// `f(x) ⊥ g_*(x^⊥)` and `x ⊥ g(f(x)^⊥)` for all `x`.
    pub right_orthogonality_form: bool,
    /// `f_*(^⊥y) ⊥ g(y)` and `f(^⊥g(y)) ⊥ y` for all `y`.
    pub left_orthogonality_form: bool,
}

impl ContinuityConditions {
    pub fn all_agree(&self) -> bool {
        let d = self.definition;
        self.right_adjoint_form == d
            && self.left_adjoint_form == d
            && self.right_orthogonality_form == d
            && self.left_orthogonality_form == d
    }
}

fn check_continuous_endpoints(f: &JoinHom, g: &JoinHom, src: &TwoForm, dst: &TwoForm) -> Result<(), FormError> {
    if f.src() != src.left() || f.dst() != dst.left() || g.src() != dst.right() || g.dst() != src.right() {
        return Err(FormError::EndpointMismatch);
    }
    Ok(())
}

pub fn continuity_conditions(
    f: &JoinHom,
    g: &JoinHom,
    src: &TwoForm,
    dst: &TwoForm,
) -> Result<ContinuityConditions, FormError> {
    check_continuous_endpoints(f, g, src, dst)?;
    let (l, r) = (src.left(), dst.right());
    let f_star = f.right_adjoint();
    let g_star = g.right_adjoint();
    let definition = l.elements().all(|x| r.elements().all(|y| dst.value(f.apply(x), y) == src.value(x, g.apply(y))));
    let right_adjoint_form = l.elements().all(|x| g_star[src.right_orth(x)] == dst.right_orth(f.apply(x)));
    let left_adjoint_form = r.elements().all(|y| f_star[dst.left_orth(y)] == src.left_orth(g.apply(y)));
    let right_orthogonality_form = l.elements().all(|x| {
        dst.orthogonal(f.apply(x), g_star[src.right_orth(x)]) && src.orthogonal(x, g.apply(dst.right_orth(f.apply(x))))
    });
    let left_orthogonality_form = r.elements().all(|y| {
        src.orthogonal(f_star[dst.left_orth(y)], g.apply(y)) && dst.orthogonal(f.apply(src.left_orth(g.apply(y))), y)
    });
    Ok(ContinuityConditions {
        definition,
        right_adjoint_form,
        left_adjoint_form,
        right_orthogonality_form,
        left_orthogonality_form,
    })
}

impl ContinuousMap {
    pub fn new(f: JoinHom, g: JoinHom, src: &TwoForm, dst: &TwoForm) -> Result<Self, FormError> {
        check_continuous_endpoints(&f, &g, src, dst)?;
        for x in src.left.elements() {
            for y in dst.right.elements() {
                if dst.value(f.apply(x), y) != src.value(x, g.apply(y)) {
                    return Err(FormError::NotContinuous { x, y });
                }
            }
        }
        Ok(ContinuousMap { f, g, src: src.clone(), dst: dst.clone() })
    }

    pub fn identity(form: &TwoForm) -> Self {
        ContinuousMap {
            f: JoinHom::identity(form.left()),
            g: JoinHom::identity(form.right()),
            src: form.clone(),
            dst: form.clone(),
        }
    }

    /// `next ∘ self = (f' ∘ f, g ∘ g')`.
    pub fn then(&self, next: &ContinuousMap) -> ContinuousMap {
        assert_eq!(self.dst, next.src, "composable continuous maps");
        ContinuousMap { f: self.f.then(&next.f), g: next.g.then(&self.g), src: self.src.clone(), dst: next.dst.clone() }
    }

    pub fn conditions(&self) -> ContinuityConditions {
        continuity_conditions(&self.f, &self.g, &self.src, &self.dst).expect("endpoints were validated")
    }
}

/// `check_continuous`: validates the pair and evaluates all reformulations.
pub fn check_continuous(
    f: JoinHom,
    g: JoinHom,
    src: &TwoForm,
    dst: &TwoForm,
) -> Result<(ContinuousMap, ContinuityConditions), FormError> {
    let m = ContinuousMap::new(f, g, src, dst)?;
    let c = m.conditions();
    Ok((m, c))
}

/// `f(^⊥(x^⊥)) ≤ ^⊥(f(x)^⊥)` for all `x`.
pub fn respects_closures(f: &JoinHom, src: &TwoForm, dst: &TwoForm) -> bool {
    let (j, k) = (src.left_closure(), dst.left_closure());
    src.left.elements().all(|x| dst.left.leq(f.apply(j.apply(x)), k.apply(f.apply(x))))
}

/// Every `g: R' → R` making `(f, g)` continuous, by exhaustive search.
pub fn continuous_partners(f: &JoinHom, src: &TwoForm, dst: &TwoForm) -> Vec<JoinHom> {
    enumerate_join_homs(dst.right(), src.right())
        .into_iter()
        .filter(|g| ContinuousMap::new(f.clone(), g.clone(), src, dst).is_ok())
        .collect()
}

/// For forms faithful on the right, the unique `g` with `(f, g)` continuous,
/// or `None` when `f` does not respect the double-orthogonal closures. The
/// candidate is `y ↦ (f_*(^⊥y))^⊥`.
pub fn extend_to_continuous(f: &JoinHom, src: &TwoForm, dst: &TwoForm) -> Result<Option<JoinHom>, FormError> {
    if !src.classify().faithful_right || !dst.classify().faithful_right {
        return Err(FormError::PreconditionViolated("both forms must be faithful on the right"));
    }
    if f.src() != src.left() || f.dst() != dst.left() {
        return Err(FormError::EndpointMismatch);
    }
    if !respects_closures(f, src, dst) {
        return Ok(None);
    }
    let f_star = f.right_adjoint();
    let table = dst.right.elements().map(|y| src.right_orth(f_star[dst.left_orth(y)])).collect();
    let g = JoinHom::new(dst.right().clone(), src.right().clone(), table)?;
    let m = ContinuousMap::new(f.clone(), g, src, dst)?;
    Ok(Some(m.g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::chain(n))
    }

    fn meet_form_c2() -> TwoForm {
        TwoForm::from_orthogonality(c(2), c(2), |x, y| x.min(y) == 0).unwrap()
    }

    #[test]
    fn validation_examples() {
        let z = TwoForm::new(c(2), c(2), &[vec![false, false], vec![false, false]]).unwrap();
        assert_eq!(z, TwoForm::all_orthogonal(&c(2), &c(2)));
        let m = TwoForm::new(c(2), c(2), &[vec![false, false], vec![false, true]]).unwrap();
        assert_eq!(m, meet_form_c2());
        assert_eq!(
            TwoForm::new(c(2), c(2), &[vec![false, true], vec![false, true]]),
            Err(FormError::BottomViolation { side: Side::Left, other: 1 })
        );
        assert!(matches!(TwoForm::new(c(2), c(2), &[vec![false, false]]), Err(FormError::ShapeMismatch { .. })));
        let d = Arc::new(Lattice::diamond());
        // ⟨x|1⟩ = 1 only at the top of the diamond: a ∨ b is not preserved
        assert_eq!(
            TwoForm::from_fn(d, c(2), |x, y| x == 3 && y == 1),
            Err(FormError::JoinViolation { side: Side::Left, pair: (1, 2), witness: 1 })
        );
    }

    #[test]
    fn orthogonal_images() {
        let rho = TwoForm::relation_form(&[vec![false, true], vec![true, false]]).unwrap();
        // {1} is bitmask 0b01, {2} is 0b10
        assert_eq!(rho.right_orth(0b01), 0b10);
        assert_eq!(rho.right_orth(0), 3);
        let s = TwoForm::sierpinski();
        assert_eq!(s.right_orth(0), s.right().top());
        // opens are ∅, {1}, X at indices 0, 1, 2
        assert_eq!(s.right_orth(0b10), 1);
    }

    #[test]
    fn galois_examples() {
        let l = c(2);
        let r = Arc::new(l.dual());
        let form = form_from_galois(&l, &r, &[0, 1], &[0, 1]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(form.orthogonal(x, y), x <= y);
            }
        }
        assert_eq!(form, TwoForm::order_form(&l));

        let top_r = vec![r.top(); 2];
        let top_l = vec![l.top(); 2];
        assert_eq!(form_from_galois(&l, &r, &top_r, &top_l).unwrap(), TwoForm::all_orthogonal(&l, &r));

        let p = Arc::new(Lattice::powerset(2));
        let complement = vec![3, 2, 1, 0];
        let form = form_from_galois(&p, &p, &complement, &complement).unwrap();
        let rho = TwoForm::relation_form(&[vec![false, true], vec![true, false]]).unwrap();
        assert_eq!(form, rho);
        assert_eq!(rho.orth_images().right, complement);
    }

    #[test]
    fn galois_errors() {
        let l = c(2);
        assert_eq!(
            form_from_galois(&l, &l, &[0, 1], &[1, 0]),
            Err(FormError::NotGalois(GaloisViolation::RightNotAntitone(0, 1)))
        );
        assert_eq!(form_from_galois(&l, &l, &[1, 0], &[0, 0]), Err(FormError::NotGalois(GaloisViolation::LeftUnit(1))));
    }

    #[test]
    fn classification_examples() {
        let f = TwoForm::sierpinski().classify();
        assert!(f.faithful_right && f.dense_left && !f.faithful_left);
        let m = meet_form_c2().classify();
        assert_eq!(
            m,
            FormFlags {
                dense_left: true,
                dense_right: true,
                faithful_left: true,
                faithful_right: true,
                symmetric: true
            }
        );
        assert_eq!(
            TwoForm::all_orthogonal(&c(2), &c(2)).classify(),
            FormFlags { symmetric: true, ..FormFlags::default() }
        );
    }

    #[test]
    fn galois_reports_are_consistent() {
        for form in [TwoForm::sierpinski(), meet_form_c2(), TwoForm::order_form(&Arc::new(Lattice::diamond()))] {
            let rep = galois_report(&form);
            assert!(rep.consistent(), "{rep:?}");
        }
    }

    #[test]
    fn orthomorphism_examples() {
        let s = TwoForm::sierpinski();
        let (_, facts) =
            check_orthomorphism(JoinHom::identity(s.left()), JoinHom::identity(s.right()), &s, &s).unwrap();
        assert!(facts.violations().is_empty());

        let q = orthogonal_quotient(&s);
        assert!(q.map.is_quotient());
        assert!(q.map.facts().violations().is_empty());

        let (m, z) = (meet_form_c2(), TwoForm::all_orthogonal(&c(2), &c(2)));
        let id = JoinHom::identity(&c(2));
        assert_eq!(Orthomorphism::new(id.clone(), id, &m, &z), Err(FormError::NotOrthomorphism { x: 1, y: 1 }));
    }

    #[test]
    fn orthogonal_quotients() {
        let m = meet_form_c2();
        let q = orthogonal_quotient(&m);
        assert_eq!(q.form, m);
        assert_eq!(q.map, Orthomorphism::identity(&m));

        let s = TwoForm::sierpinski();
        let q = orthogonal_quotient(&s);
        // closed sets of the Sierpinski space: ∅, {2}, X
        assert_eq!(q.left.embed, vec![0b00, 0b10, 0b11]);
        assert_eq!(q.right.len(), 3);
        assert!(q.form.classify().faithful());

        let z = TwoForm::all_orthogonal(&c(3), &c(2));
        let q = orthogonal_quotient(&z);
        assert_eq!((q.form.left().len(), q.form.right().len()), (1, 1));
    }

    /// Opens of X = {1,2} with {1} open, as 2-forms.
    fn sierpinski_maps() -> (TwoForm, Arc<Lattice>) {
        let s = TwoForm::sierpinski();
        let p = s.left().clone();
        (s, p)
    }

    fn direct_image(p: &Arc<Lattice>, map: [usize; 2]) -> JoinHom {
        let table =
            (0..4usize).map(|s| (0..2).filter(|i| s >> i & 1 == 1).fold(0, |acc, i| acc | 1 << map[i])).collect();
        JoinHom::new(p.clone(), p.clone(), table).unwrap()
    }

    fn preimage(opens: &[usize], map: [usize; 2]) -> Option<Vec<Elem>> {
        opens
            .iter()
            .map(|&u| {
                let pre = (0..2).filter(|&i| u >> map[i] & 1 == 1).fold(0, |acc, i| acc | 1 << i);
                opens.iter().position(|&o| o == pre)
            })
            .collect()
    }

    #[test]
    fn continuity_examples() {
        let (s, p) = sierpinski_maps();
        let (_, cond) = check_continuous(JoinHom::identity(s.left()), JoinHom::identity(s.right()), &s, &s).unwrap();
        assert!(cond.definition && cond.all_agree());

        let opens = [0b00, 0b01, 0b11];
        // constant map onto point 1 is continuous
        let g = preimage(&opens, [0, 0]).unwrap();
        let g = JoinHom::new(s.right().clone(), s.right().clone(), g).unwrap();
        check_continuous(direct_image(&p, [0, 0]), g, &s, &s).unwrap();

        // swapping the points is not: the preimage of {1} is {2}
        assert!(preimage(&opens, [1, 0]).is_none());
        let swap = direct_image(&p, [1, 0]);
        assert!(continuous_partners(&swap, &s, &s).is_empty());
        assert!(matches!(
            ContinuousMap::new(swap, JoinHom::identity(s.right()), &s, &s),
            Err(FormError::NotContinuous { .. })
        ));
    }

    #[test]
    fn extension_examples() {
        let m = meet_form_c2();
        let g = extend_to_continuous(&JoinHom::identity(m.left()), &m, &m).unwrap();
        assert_eq!(g, Some(JoinHom::identity(m.right())));

        // source faithful on both sides: every f extends
        let o = TwoForm::order_form(&Arc::new(Lattice::diamond()));
        for f in enumerate_join_homs(o.left(), o.left()) {
            let g = extend_to_continuous(&f, &o, &o).unwrap().expect("faithful source");
            assert_eq!(continuous_partners(&f, &o, &o), vec![g]);
        }

        // C3 with the closure 0 ↦ 0, a ↦ 1, 1 ↦ 1 against the faithful order form
        let c3 = c(3);
        let (src, _) = TwoForm::closure_form(&ClosureOperator::new(c3.clone(), vec![0, 2, 2]).unwrap());
        let dst = TwoForm::order_form(&c3);
        let id = JoinHom::identity(&c3);
        assert!(src.classify().faithful_right && dst.classify().faithful_right);
        assert_eq!(extend_to_continuous(&id, &src, &dst).unwrap(), None);
        assert!(continuous_partners(&id, &src, &dst).is_empty());

        let z = TwoForm::all_orthogonal(&c(2), &c(2));
        assert!(matches!(
            extend_to_continuous(&JoinHom::identity(&c(2)), &z, &z),
            Err(FormError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn form_enumeration() {
        let caps = Caps::default();
        let count = |a, b| enumerate_two_forms(&c(a), &c(b), &caps).unwrap().len();
        // forms L × R → 2 correspond to join-homs L → R^op
        assert_eq!(count(2, 2), 2);
        assert_eq!(count(3, 3), 6);
        assert_eq!(count(1, 3), 1);
        let p = Arc::new(Lattice::powerset(2));
        assert!(enumerate_two_forms(&p, &Arc::new(Lattice::powerset(3)), &caps).is_err());
    }

    #[test]
    fn form_isomorphisms() {
        let l = c(2);
        let order = TwoForm::order_form(&l);
        // relabeled: ⟨x|y⟩ = 1 iff x = 1 and y = 1 on C2 × C2
        assert!(forms_isomorphic(&order, &meet_form_c2()));
        assert!(!forms_isomorphic(&order, &TwoForm::all_orthogonal(&l, &l)));
    }
}
