//! Derivations in the equational theory and their certificates.
//!
//! A [`Proof`] is a tree of inference rules over the axioms. [`check`]
//! computes the equation a proof establishes, [`certify_canonicalize`] emits a
//! proof that an expression equals its canonical form, and certificates are
//! read and written as s-expressions.
//!
//! The ring axioms are nine fixed equations over `x`, `y`, `z`:
//!
//! ```text
//! add-assoc  (x + y) + z = x + (y + z)      mul-assoc  (x*y)*z = x*(y*z)
//! add-comm   x + y = y + x                  mul-comm   x*y = y*x
//! add-zero   x + 0 = x                      mul-one    x*1 = x
//! add-neg    x + -1*x = 0                   mul-zero   x*0 = 0
//! distrib    x*(y + z) = x*y + x*z
//! ```
//!
//! `const-add r1 r2 r3` and `const-mul r1 r2 r3` state `r1 + r2 = r3` and
//! `r1*r2 = r3` and are only accepted when the arithmetic is right. The
//! differentiation axioms are
//!
//! ```text
//! diff-add   D[x](x + y) = 1
//! diff-mul   D[x](y*x) = y
//! chain2     D[x](f(g0(x), g1(x))) = D[x0](f(x0, g1(x)); g0(x))*D[x](g0(x))
//!                                  + D[x1](f(g0(x), x1); g1(x))*D[x](g1(x))
//! commute    D[y](D[x](f(x, y))) = D[x](D[y](f(x, y)))
//! ```

mod certify;
mod check;
mod sexpr;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::term::{parse, Abstract, Expr, FnVar, Rat, VarName};

pub use certify::certify_canonicalize;
pub use check::{check, check_with, CheckError, Mode};
pub use sexpr::{parse_proof, print_proof, ProofParseError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AxiomId {
    AddAssoc,
    AddComm,
    AddZero,
    AddNeg,
    MulAssoc,
    MulComm,
    MulOne,
    MulZero,
    Distrib,
    ConstAdd(Rat, Rat, Rat),
    ConstMul(Rat, Rat, Rat),
    DiffAdd,
    DiffMul,
    Chain2,
    Commute,
}

const NAMED: [(AxiomId, &str, &str, &str); 13] = [
    (AxiomId::AddAssoc, "add-assoc", "(x + y) + z", "x + (y + z)"),
    (AxiomId::AddComm, "add-comm", "x + y", "y + x"),
    (AxiomId::AddZero, "add-zero", "x + 0", "x"),
    (AxiomId::AddNeg, "add-neg", "x + -1*x", "0"),
    (AxiomId::MulAssoc, "mul-assoc", "(x*y)*z", "x*(y*z)"),
    (AxiomId::MulComm, "mul-comm", "x*y", "y*x"),
    (AxiomId::MulOne, "mul-one", "x*1", "x"),
    (AxiomId::MulZero, "mul-zero", "x*0", "0"),
    (AxiomId::Distrib, "distrib", "x*(y + z)", "x*y + x*z"),
    (AxiomId::DiffAdd, "diff-add", "D[x](x + y)", "1"),
    (AxiomId::DiffMul, "diff-mul", "D[x](y*x)", "y"),
    (
        AxiomId::Chain2,
        "chain2",
        "D[x](f(g0(x), g1(x)))",
        "D[x0](f(x0, g1(x)); g0(x))*D[x](g0(x)) + D[x1](f(g0(x), x1); g1(x))*D[x](g1(x))",
    ),
    (
        AxiomId::Commute,
        "commute",
        "D[y](D[x](f(x, y)))",
        "D[x](D[y](f(x, y)))",
    ),
];

impl AxiomId {
    /// The axioms without parameters, with their certificate names.
    pub fn named() -> impl Iterator<Item = (AxiomId, &'static str)> {
        NAMED.iter().map(|(id, name, _, _)| (id.clone(), *name))
    }

    pub fn from_name(name: &str) -> Option<AxiomId> {
        NAMED
            .iter()
            .find(|(_, n, _, _)| *n == name)
            .map(|(id, _, _, _)| id.clone())
    }

    pub fn name(&self) -> &'static str {
        match self {
            AxiomId::ConstAdd(..) => "const-add",
            AxiomId::ConstMul(..) => "const-mul",
            _ => {
                NAMED
                    .iter()
                    .find(|(id, _, _, _)| id == self)
                    .expect("every parameterless axiom is listed")
                    .1
            }
        }
    }

    /// True for the axioms allowed in the fragment with commutativity as the
    /// only differentiation axiom.
    pub fn is_rtc(&self) -> bool {
        !matches!(self, AxiomId::DiffAdd | AxiomId::DiffMul | AxiomId::Chain2)
    }

    /// The equation stated, or `None` for a table entry with wrong arithmetic.
    pub fn statement(&self) -> Option<(Expr, Expr)> {
        match self {
            AxiomId::ConstAdd(a, b, c) => (a + b == *c).then(|| {
                (
                    Expr::sum(Expr::constant(a.clone()), Expr::constant(b.clone())),
                    Expr::constant(c.clone()),
                )
            }),
            AxiomId::ConstMul(a, b, c) => (a * b == *c).then(|| {
                (
                    Expr::prod(Expr::constant(a.clone()), Expr::constant(b.clone())),
                    Expr::constant(c.clone()),
                )
            }),
            _ => {
                static PARSED: OnceLock<Vec<(Expr, Expr)>> = OnceLock::new();
                let all = PARSED.get_or_init(|| {
                    NAMED
                        .iter()
                        .map(|(_, _, l, r)| (parse(l).expect("axiom"), parse(r).expect("axiom")))
                        .collect()
                });
                let k = NAMED.iter().position(|(id, _, _, _)| id == self)?;
                Some(all[k].clone())
            }
        }
    }
}

/// One inference step. Premises are shared, so a lemma used many times is
/// stored and checked once.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    Axiom(AxiomId),
    Refl(Expr),
    Sym(Proof),
    Trans(Proof, Proof),
    CongSum(Proof, Proof),
    CongProd(Proof, Proof),
    CongApp(FnVar, Vec<Proof>),
    /// From `e0 = e1` and `a0 = a1`, `D[x](e0; a0) = D[x](e1; a1)`.
    CongPDiff(VarName, Proof, Proof),
    SubstVar(Proof, BTreeMap<VarName, Expr>),
    SubstFn(Proof, BTreeMap<FnVar, Abstract>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Proof(Arc<Rule>);

impl Proof {
    pub fn new(rule: Rule) -> Self {
        Proof(Arc::new(rule))
    }

    pub fn rule(&self) -> &Rule {
        &self.0
    }

    pub fn axiom(id: AxiomId) -> Self {
        Proof::new(Rule::Axiom(id))
    }

    pub fn refl(e: Expr) -> Self {
        Proof::new(Rule::Refl(e))
    }

    pub fn sym(p: Proof) -> Self {
        Proof::new(Rule::Sym(p))
    }

    pub fn trans(p: Proof, q: Proof) -> Self {
        Proof::new(Rule::Trans(p, q))
    }

    pub fn cong_sum(p: Proof, q: Proof) -> Self {
        Proof::new(Rule::CongSum(p, q))
    }

    pub fn cong_prod(p: Proof, q: Proof) -> Self {
        Proof::new(Rule::CongProd(p, q))
    }

    pub fn cong_app(f: FnVar, ps: Vec<Proof>) -> Self {
        Proof::new(Rule::CongApp(f, ps))
    }

    pub fn cong_pdiff(x: VarName, body: Proof, at: Proof) -> Self {
        Proof::new(Rule::CongPDiff(x, body, at))
    }

    pub fn subst_var(p: Proof, b: BTreeMap<VarName, Expr>) -> Self {
        Proof::new(Rule::SubstVar(p, b))
    }

    pub fn subst_fn(p: Proof, b: BTreeMap<FnVar, Abstract>) -> Self {
        Proof::new(Rule::SubstFn(p, b))
    }

    /// Number of distinct rule nodes, counting shared subproofs once.
    pub fn node_count(&self) -> usize {
        fn go(p: &Proof, seen: &mut std::collections::HashSet<*const Rule>) {
            if !seen.insert(Arc::as_ptr(&p.0)) {
                return;
            }
            for c in p.premises() {
                go(c, seen);
            }
        }
        let mut seen = std::collections::HashSet::new();
        go(self, &mut seen);
        seen.len()
    }

    pub fn premises(&self) -> Vec<&Proof> {
        match self.rule() {
            Rule::Axiom(_) | Rule::Refl(_) => vec![],
            Rule::Sym(p) | Rule::SubstVar(p, _) | Rule::SubstFn(p, _) => vec![p],
            Rule::Trans(p, q)
            | Rule::CongSum(p, q)
            | Rule::CongProd(p, q)
            | Rule::CongPDiff(_, p, q) => {
                vec![p, q]
            }
            Rule::CongApp(_, ps) => ps.iter().collect(),
        }
    }

    /// True when some axiom outside the commutativity fragment is used.
    pub fn uses_non_rtc_axiom(&self) -> bool {
        match self.rule() {
            Rule::Axiom(id) => !id.is_rtc(),
            _ => self.premises().iter().any(|p| p.uses_non_rtc_axiom()),
        }
    }
}
