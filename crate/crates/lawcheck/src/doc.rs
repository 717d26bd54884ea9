//! JSON documents for structures.
//!
//! A document is parsed without any law checking; [`Structure::from_doc`]
//! validates it. Laws that study candidates (balance, the involutive law)
//! use the `*_parts` builders, which only check the underlying modules and
//! form.

use std::fmt;
use std::sync::Arc;

use qf_core::involutive::InvolutiveModule;
use qf_core::{BalancedForm, Lattice, Module, Quantale, Side, TwoForm};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("cannot parse document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid {kind}: {message}")]
    Invalid { kind: &'static str, message: String },
}

fn invalid(kind: &'static str, e: impl fmt::Display) -> DocError {
    DocError::Invalid { kind, message: e.to_string() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub leq: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantaleSpec {
    pub carrier: LatticeSpec,
    pub mult: Vec<Vec<usize>>,
    pub unit: Option<usize>,
    pub involution: Option<Vec<usize>>,
}

/// A carrier with an action table `action[a][x]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub carrier: LatticeSpec,
    pub action: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideSpec {
    Left,
    Right,
}

impl From<SideSpec> for Side {
    fn from(s: SideSpec) -> Side {
        match s {
            SideSpec::Left => Side::Left,
            SideSpec::Right => Side::Right,
        }
    }
}

impl From<Side> for SideSpec {
    fn from(s: Side) -> SideSpec {
        match s {
            Side::Left => SideSpec::Left,
            Side::Right => SideSpec::Right,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DocBody {
    Lattice(LatticeSpec),
    Form {
        left: LatticeSpec,
        right: LatticeSpec,
        /// `orthogonal[x][y]` is true when the form is 0 at `(x, y)`.
        orthogonal: Vec<Vec<bool>>,
    },
    Quantale(QuantaleSpec),
    Module {
        side: SideSpec,
        quantale: QuantaleSpec,
        carrier: LatticeSpec,
        action: Vec<Vec<usize>>,
    },
    InvolutiveModule {
        quantale: QuantaleSpec,
        carrier: LatticeSpec,
        action: Vec<Vec<usize>>,
        orthogonal: Vec<Vec<bool>>,
    },
    /// A right module on the left lattice, a left module on the right one,
    /// and a form between them.
    BalancedForm {
        quantale: QuantaleSpec,
        left: ActionSpec,
        right: ActionSpec,
        orthogonal: Vec<Vec<bool>>,
    },
    Pair {
        first: Box<StructureDoc>,
        second: Box<StructureDoc>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Lattice,
    Form,
    Quantale,
    Module,
    InvolutiveModule,
    BalancedForm,
    Pair,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Lattice => "lattice",
            Kind::Form => "form",
            Kind::Quantale => "quantale",
            Kind::Module => "module",
            Kind::InvolutiveModule => "involutive-module",
            Kind::BalancedForm => "balanced-form",
            Kind::Pair => "pair",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub name: String,
    #[serde(flatten)]
    pub body: DocBody,
}

impl StructureDoc {
    pub fn new(name: impl Into<String>, body: DocBody) -> Self {
        StructureDoc { name: name.into(), body }
    }

    pub fn kind(&self) -> Kind {
        match self.body {
            DocBody::Lattice(_) => Kind::Lattice,
            DocBody::Form { .. } => Kind::Form,
            DocBody::Quantale(_) => Kind::Quantale,
            DocBody::Module { .. } => Kind::Module,
            DocBody::InvolutiveModule { .. } => Kind::InvolutiveModule,
            DocBody::BalancedForm { .. } => Kind::BalancedForm,
            DocBody::Pair { .. } => Kind::Pair,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, DocError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, DocError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| DocError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn pair(name: impl Into<String>, first: StructureDoc, second: StructureDoc) -> Self {
        StructureDoc::new(name, DocBody::Pair { first: Box::new(first), second: Box::new(second) })
    }

    /// The document rebuilt from its validated structure.
    pub fn canonicalize(&self) -> Result<StructureDoc, DocError> {
        Ok(Structure::from_doc(self)?.to_doc(&self.name))
    }
}

/// A validated structure.
#[derive(Clone, Debug)]
pub enum Structure {
    Lattice(Arc<Lattice>),
    Form(TwoForm),
    Quantale(Arc<Quantale>),
    Module(Module),
    InvolutiveModule(InvolutiveModule),
    BalancedForm(BalancedForm),
    Pair(Box<Structure>, Box<Structure>),
}

pub fn lattice_spec(l: &Lattice) -> LatticeSpec {
    LatticeSpec { n: l.len(), leq: l.order_matrix() }
}

pub fn quantale_spec(q: &Quantale) -> QuantaleSpec {
    QuantaleSpec {
        carrier: lattice_spec(q.carrier()),
        mult: q.mult_table(),
        unit: q.unit(),
        involution: q.involution().map(<[usize]>::to_vec),
    }
}

pub fn orthogonality(form: &TwoForm) -> Vec<Vec<bool>> {
    form.orthogonality_matrix()
}

pub fn build_lattice(spec: &LatticeSpec) -> Result<Arc<Lattice>, DocError> {
    if spec.leq.len() != spec.n || spec.leq.iter().any(|r| r.len() != spec.n) {
        return Err(invalid("lattice", format!("leq must be {0}×{0}", spec.n)));
    }
    Lattice::from_order(&spec.leq).map(Arc::new).map_err(|e| invalid("lattice", e))
}

pub fn build_quantale(spec: &QuantaleSpec) -> Result<Arc<Quantale>, DocError> {
    let carrier = build_lattice(&spec.carrier)?;
    Quantale::new(carrier, &spec.mult, spec.unit, spec.involution.clone())
        .map(Arc::new)
        .map_err(|e| invalid("quantale", e))
}

pub fn build_form(left: &LatticeSpec, right: &LatticeSpec, orthogonal: &[Vec<bool>]) -> Result<TwoForm, DocError> {
    let (l, r) = (build_lattice(left)?, build_lattice(right)?);
    if orthogonal.len() != l.len() || orthogonal.iter().any(|row| row.len() != r.len()) {
        return Err(invalid("form", format!("orthogonal must be {}×{}", l.len(), r.len())));
    }
    let values: Vec<Vec<bool>> = orthogonal.iter().map(|row| row.iter().map(|&o| !o).collect()).collect();
    TwoForm::new(l, r, &values).map_err(|e| invalid("form", e))
}

fn build_module(
    side: Side,
    q: &Arc<Quantale>,
    carrier: &LatticeSpec,
    action: &[Vec<usize>],
) -> Result<Module, DocError> {
    let l = build_lattice(carrier)?;
    Module::new(side, q.clone(), l, action).map_err(|e| invalid("module", e))
}

/// The module and symmetric form of an involutive-module document, without
/// checking the involutive law.
pub fn involutive_parts(doc: &StructureDoc) -> Result<(Module, TwoForm), DocError> {
    let DocBody::InvolutiveModule { quantale, carrier, action, orthogonal } = &doc.body else {
        return Err(invalid("involutive-module", "wrong kind"));
    };
    let q = build_quantale(quantale)?;
    let m = build_module(Side::Left, &q, carrier, action)?;
    let form = build_form(carrier, carrier, orthogonal)?;
    // share the carrier so the form and module agree on identity
    let form =
        TwoForm::new(m.carrier().clone(), m.carrier().clone(), &form.values()).map_err(|e| invalid("form", e))?;
    Ok((m, form))
}

/// The right module, left module and form of a balanced-form document,
/// without checking balance.
pub fn balanced_parts(doc: &StructureDoc) -> Result<(Module, Module, TwoForm), DocError> {
    let DocBody::BalancedForm { quantale, left, right, orthogonal } = &doc.body else {
        return Err(invalid("balanced-form", "wrong kind"));
    };
    let q = build_quantale(quantale)?;
    let lm = build_module(Side::Right, &q, &left.carrier, &left.action)?;
    let rm = build_module(Side::Left, &q, &right.carrier, &right.action)?;
    let form = build_form(&left.carrier, &right.carrier, orthogonal)?;
    let form =
        TwoForm::new(lm.carrier().clone(), rm.carrier().clone(), &form.values()).map_err(|e| invalid("form", e))?;
    Ok((lm, rm, form))
}

impl Structure {
    pub fn from_doc(doc: &StructureDoc) -> Result<Structure, DocError> {
        Ok(match &doc.body {
            DocBody::Lattice(spec) => Structure::Lattice(build_lattice(spec)?),
            DocBody::Form { left, right, orthogonal } => Structure::Form(build_form(left, right, orthogonal)?),
            DocBody::Quantale(spec) => Structure::Quantale(build_quantale(spec)?),
            DocBody::Module { side, quantale, carrier, action } => {
                let q = build_quantale(quantale)?;
                Structure::Module(build_module((*side).into(), &q, carrier, action)?)
            }
            DocBody::InvolutiveModule { .. } => {
                let (m, form) = involutive_parts(doc)?;
                Structure::InvolutiveModule(
                    InvolutiveModule::new(m, form).map_err(|e| invalid("involutive-module", e))?,
                )
            }
            DocBody::BalancedForm { .. } => {
                let (lm, rm, form) = balanced_parts(doc)?;
                Structure::BalancedForm(BalancedForm::new(lm, rm, form).map_err(|e| invalid("balanced-form", e))?)
            }
            DocBody::Pair { first, second } => {
                Structure::Pair(Box::new(Structure::from_doc(first)?), Box::new(Structure::from_doc(second)?))
            }
        })
    }

    pub fn to_doc(&self, name: &str) -> StructureDoc {
        let body = match self {
            Structure::Lattice(l) => DocBody::Lattice(lattice_spec(l)),
            Structure::Form(f) => DocBody::Form {
                left: lattice_spec(f.left()),
                right: lattice_spec(f.right()),
                orthogonal: orthogonality(f),
            },
            Structure::Quantale(q) => DocBody::Quantale(quantale_spec(q)),
            Structure::Module(m) => DocBody::Module {
                side: m.side().into(),
                quantale: quantale_spec(m.over()),
                carrier: lattice_spec(m.carrier()),
                action: m.action_table(),
            },
            Structure::InvolutiveModule(im) => DocBody::InvolutiveModule {
                quantale: quantale_spec(im.quantale()),
                carrier: lattice_spec(im.module.carrier()),
                action: im.module.action_table(),
                orthogonal: orthogonality(&im.form),
            },
            Structure::BalancedForm(bf) => balanced_body(&bf.left, &bf.right, &bf.form),
            Structure::Pair(a, b) => DocBody::Pair {
                first: Box::new(a.to_doc(&format!("{name}.0"))),
                second: Box::new(b.to_doc(&format!("{name}.1"))),
            },
        };
        StructureDoc::new(name, body)
    }
}

pub fn form_doc(name: impl Into<String>, f: &TwoForm) -> StructureDoc {
    Structure::Form(f.clone()).to_doc(&name.into())
}

pub fn balanced_body(left: &Module, right: &Module, form: &TwoForm) -> DocBody {
    DocBody::BalancedForm {
        quantale: quantale_spec(left.over()),
        left: ActionSpec { carrier: lattice_spec(left.carrier()), action: left.action_table() },
        right: ActionSpec { carrier: lattice_spec(right.carrier()), action: right.action_table() },
        orthogonal: orthogonality(form),
    }
}

pub fn involutive_body(module: &Module, form: &TwoForm) -> DocBody {
    DocBody::InvolutiveModule {
        quantale: quantale_spec(module.over()),
        carrier: lattice_spec(module.carrier()),
        action: module.action_table(),
        orthogonal: orthogonality(form),
    }
}
