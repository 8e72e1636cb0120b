//! The expression language: rationals, variables, sums, products, applications
//! of function variables, and the binding construct `PDiff(x. body, at)`.
//!
//! Terms are stored locally nameless: a binder introduced by `PDiff` is
//! referred to inside its body by a de Bruijn index, and only free variables
//! carry names. Two α-equivalent expressions therefore have identical
//! representations, and `==` on [`Expr`] is α-equivalence.

mod parse;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::BigRational;

pub use parse::{parse, parse_with, ParseError, ParseOptions};
pub use print::print;
pub(crate) use print::print_rat;
pub use subst::{subst_fnvars, subst_vars};

/// Exact rational constants. Always kept in lowest terms with a positive
/// denominator by `num`.
pub type Rat = BigRational;

/// A term variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName(Arc<str>);

impl VarName {
    pub fn new(name: impl AsRef<str>) -> Self {
        VarName(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when `name` is a lexically valid identifier: an ASCII letter
    /// followed by ASCII letters, digits or underscores.
    pub fn is_identifier(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> Self {
        VarName::new(s)
    }
}

/// A function variable `f : n`. The arity is part of its identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FnVar {
    name: Arc<str>,
    arity: usize,
}

impl FnVar {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        FnVar {
            name: Arc::from(name.as_ref()),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for FnVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Debug for FnVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// One node of an expression.
///
/// `Bound(i)` refers to the `i`-th enclosing `PDiff` binder (0 is the
/// innermost). Values built through the [`Expr`] constructors never contain
/// a dangling index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Node {
    Const(Rat),
    Var(VarName),
    Bound(usize),
    Sum(Expr, Expr),
    Prod(Expr, Expr),
    App(FnVar, Vec<Expr>),
    /// `PDiff(body, at)`: the derivative of `body` with respect to the bound
    /// variable (index 0 inside `body`), evaluated at `at`.
    PDiff(Expr, Expr),
}

/// An expression of the term language, identified up to α-equivalence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

/// Arity mismatch when building an application.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("function variable {fnvar} applied to {given} argument(s)")]
pub struct ArityError {
    pub fnvar: FnVar,
    pub given: usize,
}

impl Expr {
    fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(r: Rat) -> Self {
        Expr::from_node(Node::Const(r))
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Rat::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn var(name: impl Into<VarName>) -> Self {
        Expr::from_node(Node::Var(name.into()))
    }

    pub fn sum(a: Expr, b: Expr) -> Self {
        Expr::from_node(Node::Sum(a, b))
    }

    pub fn prod(a: Expr, b: Expr) -> Self {
        Expr::from_node(Node::Prod(a, b))
    }

    /// Right-nested sum `e0 + (e1 + (... + en))`; the empty sum is `0`.
    pub fn sum_all(terms: Vec<Expr>) -> Self {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => Expr::zero(),
            Some(last) => it.fold(last, |acc, t| Expr::sum(t, acc)),
        }
    }

    pub fn app(f: FnVar, args: Vec<Expr>) -> Result<Self, ArityError> {
        if args.len() != f.arity() {
            return Err(ArityError {
                given: args.len(),
                fnvar: f,
            });
        }
        Ok(Expr::from_node(Node::App(f, args)))
    }

    /// `PDiff(x. body, at)`: binds every free occurrence of `x` in `body`.
    pub fn pdiff(x: &VarName, body: Expr, at: Expr) -> Self {
        Expr::from_node(Node::PDiff(body.close(x, 0), at))
    }

    /// `D[x](body)`, i.e. the derivative evaluated at `x` itself.
    pub fn diff(x: &VarName, body: Expr) -> Self {
        Expr::pdiff(x, body, Expr::var(x.clone()))
    }

    /// For a `PDiff` node, its body with the bound variable replaced by `x`.
    /// `x` should not occur free in the body.
    pub fn open_body(&self, x: &VarName) -> Option<Expr> {
        match self.node() {
            Node::PDiff(body, _) => Some(body.open(&Expr::var(x.clone()), 0)),
            _ => None,
        }
    }

    fn close(&self, x: &VarName, depth: usize) -> Expr {
        match self.node() {
            Node::Var(y) if y == x => Expr::from_node(Node::Bound(depth)),
            Node::Const(_) | Node::Var(_) | Node::Bound(_) => self.clone(),
            Node::Sum(a, b) => Expr::sum(a.close(x, depth), b.close(x, depth)),
            Node::Prod(a, b) => Expr::prod(a.close(x, depth), b.close(x, depth)),
            Node::App(f, args) => Expr::from_node(Node::App(
                f.clone(),
                args.iter().map(|a| a.close(x, depth)).collect(),
            )),
            Node::PDiff(body, at) => {
                Expr::from_node(Node::PDiff(body.close(x, depth + 1), at.close(x, depth)))
            }
        }
    }

    /// Replaces index `depth` by `with`, which must be locally closed.
    fn open(&self, with: &Expr, depth: usize) -> Expr {
        match self.node() {
            Node::Bound(i) if *i == depth => with.clone(),
            Node::Const(_) | Node::Var(_) | Node::Bound(_) => self.clone(),
            Node::Sum(a, b) => Expr::sum(a.open(with, depth), b.open(with, depth)),
            Node::Prod(a, b) => Expr::prod(a.open(with, depth), b.open(with, depth)),
            Node::App(f, args) => Expr::from_node(Node::App(
                f.clone(),
                args.iter().map(|a| a.open(with, depth)).collect(),
            )),
            Node::PDiff(body, at) => Expr::from_node(Node::PDiff(
                body.open(with, depth + 1),
                at.open(with, depth),
            )),
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self.node(), Node::Const(_))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) | Node::Bound(_) => 1,
            Node::Sum(a, b) | Node::Prod(a, b) | Node::PDiff(a, b) => 1 + a.size() + b.size(),
            Node::App(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<VarName>) {
        match self.node() {
            Node::Var(x) => {
                out.insert(x.clone());
            }
            Node::Const(_) | Node::Bound(_) => {}
            Node::Sum(a, b) | Node::Prod(a, b) | Node::PDiff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Node::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn has_free_var(&self, x: &VarName) -> bool {
        match self.node() {
            Node::Var(y) => y == x,
            Node::Const(_) | Node::Bound(_) => false,
            Node::Sum(a, b) | Node::Prod(a, b) | Node::PDiff(a, b) => {
                a.has_free_var(x) || b.has_free_var(x)
            }
            Node::App(_, args) => args.iter().any(|a| a.has_free_var(x)),
        }
    }

    pub fn fn_vars(&self) -> BTreeSet<FnVar> {
        let mut out = BTreeSet::new();
        self.collect_fn_vars(&mut out);
        out
    }

    pub(crate) fn collect_fn_vars(&self, out: &mut BTreeSet<FnVar>) {
        match self.node() {
            Node::Const(_) | Node::Var(_) | Node::Bound(_) => {}
            Node::Sum(a, b) | Node::Prod(a, b) | Node::PDiff(a, b) => {
                a.collect_fn_vars(out);
                b.collect_fn_vars(out);
            }
            Node::App(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.collect_fn_vars(out));
            }
        }
    }

    /// True when the expression contains neither function variables nor
    /// partial differentiation.
    pub fn is_polynomial(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Var(_) => true,
            Node::Bound(_) | Node::App(..) | Node::PDiff(..) => false,
            Node::Sum(a, b) | Node::Prod(a, b) => a.is_polynomial() && b.is_polynomial(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty() && self.fn_vars().is_empty()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", print(self))
    }
}

/// α-equivalence. Structural, because bound variables are nameless.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    a == b
}

pub fn free_vars(e: &Expr) -> BTreeSet<VarName> {
    e.free_vars()
}

pub fn fn_vars(e: &Expr) -> BTreeSet<FnVar> {
    e.fn_vars()
}

/// Two function variables sharing a name but not an arity.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("function variable `{name}` used with arities {first} and {second}")]
pub struct ArityConflict {
    pub name: String,
    pub first: usize,
    pub second: usize,
}

/// Records name/arity pairs and reports the first conflicting use.
#[derive(Debug, Default, Clone)]
pub struct ArityTable(BTreeMap<String, usize>);

impl ArityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, f: &FnVar) -> Result<(), ArityConflict> {
        match self.0.get(f.name()) {
            Some(&n) if n != f.arity() => Err(ArityConflict {
                name: f.name().to_string(),
                first: n,
                second: f.arity(),
            }),
            Some(_) => Ok(()),
            None => {
                self.0.insert(f.name().to_string(), f.arity());
                Ok(())
            }
        }
    }

    pub fn record_expr(&mut self, e: &Expr) -> Result<(), ArityConflict> {
        e.fn_vars().iter().try_for_each(|f| self.record(f))
    }
}

/// Checks that no function-variable name is used at two arities in `exprs`.
pub fn check_arities<'a>(exprs: impl IntoIterator<Item = &'a Expr>) -> Result<(), ArityConflict> {
    let mut table = ArityTable::new();
    exprs.into_iter().try_for_each(|e| table.record_expr(e))
}

/// An abstract `(x0, ..., x(n-1)). body`, the unit substituted for a function
/// variable of arity `n`.
#[derive(Clone)]
pub struct Abstract {
    params: Vec<VarName>,
    body: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("abstract parameter `{0}` listed twice")]
pub struct DuplicateParam(pub VarName);

impl Abstract {
    pub fn new(params: Vec<VarName>, body: Expr) -> Result<Self, DuplicateParam> {
        let mut seen = BTreeSet::new();
        for p in &params {
            if !seen.insert(p.clone()) {
                return Err(DuplicateParam(p.clone()));
            }
        }
        Ok(Abstract { params, body })
    }

    pub fn params(&self) -> &[VarName] {
        &self.params
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// The body with every parameter closed over, so that α-equivalent
    /// abstracts yield equal keys.
    fn alpha_key(&self) -> Expr {
        self.params.iter().fold(self.body.clone(), |acc, p| {
            Expr::pdiff(p, acc, Expr::zero())
        })
    }

    /// Instantiates the parameters with `args`.
    pub fn apply(&self, args: &[Expr]) -> Expr {
        let map: BTreeMap<VarName, Expr> = self
            .params
            .iter()
            .cloned()
            .zip(args.iter().cloned())
            .collect();
        subst_vars(&self.body, &map)
    }
}

impl PartialEq for Abstract {
    fn eq(&self, other: &Self) -> bool {
        self.arity() == other.arity() && self.alpha_key() == other.alpha_key()
    }
}

impl Eq for Abstract {}

impl fmt::Debug for Abstract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<&str> = self.params.iter().map(VarName::as_str).collect();
        write!(f, "({}).{}", ps.join(", "), self.body)
    }
}

/// Supplies variable names that avoid a fixed set. Each operation that needs
/// fresh names owns its own supply, seeded from the terms it works on.
#[derive(Debug, Clone)]
pub struct Fresh {
    prefix: String,
    next: usize,
    avoid: BTreeSet<String>,
}

impl Fresh {
    pub fn new(prefix: &str) -> Self {
        Fresh {
            prefix: prefix.to_string(),
            next: 0,
            avoid: BTreeSet::new(),
        }
    }

    pub fn avoiding<'a>(prefix: &str, names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut fresh = Fresh::new(prefix);
        fresh.avoid.extend(names.into_iter().map(str::to_string));
        fresh
    }

    pub fn avoid(&mut self, name: &str) {
        self.avoid.insert(name.to_string());
    }

    pub fn avoid_expr(&mut self, e: &Expr) {
        for v in e.free_vars() {
            self.avoid.insert(v.as_str().to_string());
        }
    }

    pub fn next_name(&mut self) -> String {
        loop {
            let candidate = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if self.avoid.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    pub fn var(&mut self) -> VarName {
        VarName::new(self.next_name())
    }
}
