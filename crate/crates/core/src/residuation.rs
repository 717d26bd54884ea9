//! Sup-lattice bimorphisms `L × R → M` and their residuations.
//!
//! For a bimorphism `*` the residuals are the right adjoints of `(-) * y`
//! and `x * (-)`:
//!
//! ```text
//! z / y = ⋁{x ∈ L : x * y ≤ z}        x \ z = ⋁{y ∈ R : x * y ≤ z}
//! ```
//!
//! Quantale multiplications, module actions and 2-forms (valued in the
//! two-element lattice) all implement [`Bimorphism`].

use std::sync::LazyLock;

use crate::lattice::Lattice;
use crate::{Elem, Side};

/// The two-element lattice `{0 < 1}` that 2-forms take values in.
pub static TWO: LazyLock<Lattice> = LazyLock::new(|| Lattice::chain(2));

/// A failed bimorphism check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BimorphismViolation {
    /// `bottom * y` (side `Left`) or `x * bottom` (side `Right`) is not bottom.
    Bottom { side: Side, other: Elem },
    /// Joins of `a` and `b` in the `side` argument are not preserved at `other`.
    Join { side: Side, a: Elem, b: Elem, other: Elem },
}

pub trait Bimorphism {
    fn left(&self) -> &Lattice;
    fn right(&self) -> &Lattice;
    fn target(&self) -> &Lattice;
    fn apply(&self, x: Elem, y: Elem) -> Elem;

    /// `z / y`
    fn left_residual(&self, z: Elem, y: Elem) -> Elem {
        let (l, t) = (self.left(), self.target());
        l.join(l.elements().filter(|&x| t.leq(self.apply(x, y), z)))
    }

    /// `x \ z`
    fn right_residual(&self, x: Elem, z: Elem) -> Elem {
        let (r, t) = (self.right(), self.target());
        r.join(r.elements().filter(|&y| t.leq(self.apply(x, y), z)))
    }

    /// `ann(y) = 0 / y`
    fn annihilator_of_right(&self, y: Elem) -> Elem {
        self.left_residual(self.target().bottom(), y)
    }

    /// `ann(x) = x \ 0`
    fn annihilator_of_left(&self, x: Elem) -> Elem {
        self.right_residual(x, self.target().bottom())
    }
}

/// Checks join preservation in each variable via the bottom and binary joins.
pub fn check_bimorphism<B: Bimorphism + ?Sized>(b: &B) -> Result<(), BimorphismViolation> {
    let (l, r, t) = (b.left(), b.right(), b.target());
    for y in r.elements() {
        if b.apply(l.bottom(), y) != t.bottom() {
            return Err(BimorphismViolation::Bottom { side: Side::Left, other: y });
        }
    }
    for x in l.elements() {
        if b.apply(x, r.bottom()) != t.bottom() {
            return Err(BimorphismViolation::Bottom { side: Side::Right, other: x });
        }
    }
    for a in l.elements() {
        for c in a + 1..l.len() {
            for y in r.elements() {
                if b.apply(l.join2(a, c), y) != t.join2(b.apply(a, y), b.apply(c, y)) {
                    return Err(BimorphismViolation::Join { side: Side::Left, a, b: c, other: y });
                }
            }
        }
    }
    for a in r.elements() {
        for c in a + 1..r.len() {
            for x in l.elements() {
                if b.apply(x, r.join2(a, c)) != t.join2(b.apply(x, a), b.apply(x, c)) {
                    return Err(BimorphismViolation::Join { side: Side::Right, a, b: c, other: x });
                }
            }
        }
    }
    Ok(())
}

/// A failed residuation identity, with the elements it failed at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduationViolation {
    pub identity: &'static str,
    pub x: Elem,
    pub y: Elem,
    pub z: Elem,
}

/// Checks the adjunctions `y ≤ x\z ⟺ x*y ≤ z ⟺ x ≤ z/y` (and the annihilator
/// case) together with the derived (in)equalities, on all triples.
pub fn check_residuation_identities<B: Bimorphism + ?Sized>(b: &B) -> Result<(), ResiduationViolation> {
    let (l, r, t) = (b.left(), b.right(), b.target());
    let zero = t.bottom();
    let fail = |identity, x, y, z| Err(ResiduationViolation { identity, x, y, z });
    let over: Vec<Vec<Elem>> = t.elements().map(|z| r.elements().map(|y| b.left_residual(z, y)).collect()).collect();
    let under: Vec<Vec<Elem>> = l.elements().map(|x| t.elements().map(|z| b.right_residual(x, z)).collect()).collect();
    for x in l.elements() {
        for y in r.elements() {
            let xy = b.apply(x, y);
            for z in t.elements() {
                let le = t.leq(xy, z);
                if r.leq(y, under[x][z]) != le {
                    return fail("y <= x\\z iff x*y <= z", x, y, z);
                }
                if l.leq(x, over[z][y]) != le {
                    return fail("x <= z/y iff x*y <= z", x, y, z);
                }
                if !t.leq(b.apply(over[z][y], y), z) {
                    return fail("(z/y)*y <= z", x, y, z);
                }
                if !t.leq(b.apply(x, under[x][z]), z) {
                    return fail("x*(x\\z) <= z", x, y, z);
                }
            }
            let ann_y = over[zero][y];
            let ann_x = under[x][zero];
            if (r.leq(y, ann_x)) != (xy == zero) || (l.leq(x, ann_y)) != (xy == zero) {
                return fail("y <= ann(x) iff x*y = 0 iff x <= ann(y)", x, y, zero);
            }
            if b.apply(ann_y, y) != zero {
                return fail("ann(y)*y = 0", x, y, zero);
            }
            if b.apply(x, ann_x) != zero {
                return fail("x*ann(x) = 0", x, y, zero);
            }
            if !l.leq(x, over[xy][y]) {
                return fail("x <= (x*y)/y", x, y, xy);
            }
            if !r.leq(y, under[x][xy]) {
                return fail("y <= x\\(x*y)", x, y, xy);
            }
            if b.apply(over[xy][y], y) != xy {
                return fail("((x*y)/y)*y = x*y", x, y, xy);
            }
            if b.apply(x, under[x][xy]) != xy {
                return fail("x*(x\\(x*y)) = x*y", x, y, xy);
            }
        }
    }
    Ok(())
}

/// A bimorphism given by a plain function, for tests and ad-hoc checks.
pub struct FnBimorphism<'a, F: Fn(Elem, Elem) -> Elem> {
    pub left: &'a Lattice,
    pub right: &'a Lattice,
    pub target: &'a Lattice,
    pub f: F,
}

impl<F: Fn(Elem, Elem) -> Elem> Bimorphism for FnBimorphism<'_, F> {
    fn left(&self) -> &Lattice {
        self.left
    }
    fn right(&self) -> &Lattice {
        self.right
    }
    fn target(&self) -> &Lattice {
        self.target
    }
    fn apply(&self, x: Elem, y: Elem) -> Elem {
        (self.f)(x, y)
    }
}
