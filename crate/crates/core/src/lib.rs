//! Finite sup-lattices, 2-forms (Galois connections), quantales, quantale
//! modules and involutive structures, with exhaustive enumerators for small
//! instances.
//!
//! Every structure is a validated, immutable value over dense element indices
//! `0..n`. Constructors check the defining laws and return a typed error with
//! a witness when a law fails.

pub mod forms;
pub mod involutive;
pub mod lattice;
pub mod qmodules;
pub mod quantales;
pub mod residuation;

/// Element index within a finite structure.
pub type Elem = usize;

/// Which argument (or which side of a form) a statement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn mirror(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Size limits for the exhaustive enumerators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest `n` for which all `n`-element lattices are enumerated.
    pub lattice_enum: usize,
    /// Largest lattice whose join-endomorphisms are enumerated.
    pub endo_enum: usize,
    /// Largest `|L|·|R|` for which all 2-forms on `L × R` are enumerated.
    pub form_cells: usize,
    /// Largest lattice for which the endomorphism quantale is built.
    pub endo_quantale: usize,
    /// Largest `|L|·|R|` for which the quantale of a 2-form is built.
    pub form_quantale_cells: usize,
    /// Largest monoid for the powerset quantale.
    pub monoid: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { lattice_enum: 5, endo_enum: 6, form_cells: 16, endo_quantale: 5, form_quantale_cells: 16, monoid: 4 }
    }
}

pub use forms::TwoForm;
pub use lattice::{JoinHom, Lattice, SubLattice};
pub use qmodules::{BalancedForm, Module};
pub use quantales::Quantale;
