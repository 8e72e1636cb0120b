//! Exact evaluation under polynomial function environments.
//!
//! A function variable `f : n` denotes a polynomial in the parameters
//! `x0, ..., x(n-1)`. Every expression then denotes a polynomial in its free
//! variables, so differentiation is done symbolically and evaluation is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;

use crate::poly::{monomials_up_to, Poly};
use crate::term::{parse, parse_with, Expr, FnVar, Fresh, Node, ParseOptions, Rat, VarName};

/// Name of the `i`-th parameter of a function environment entry.
pub fn param(i: usize) -> VarName {
    VarName::new(format!("x{i}"))
}

pub fn params(n: usize) -> Vec<VarName> {
    (0..n).map(param).collect()
}

/// Variable environment: a finite map, every other variable is `0`.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct VarEnv(BTreeMap<VarName, Rat>);

impl VarEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &VarName) -> Rat {
        self.0.get(x).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, x: VarName, r: Rat) {
        self.0.insert(x, r);
    }

    pub fn with(mut self, x: impl Into<VarName>, r: Rat) -> Self {
        self.set(x.into(), r);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarName, &Rat)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(VarName, Rat)> for VarEnv {
    fn from_iter<I: IntoIterator<Item = (VarName, Rat)>>(it: I) -> Self {
        VarEnv(it.into_iter().collect())
    }
}

/// Function environment: a finite map to polynomials over `x0, ...`; every
/// other function variable denotes `0`. Entries may also mention other
/// variables, which then act as symbolic coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FnEnv(BTreeMap<FnVar, Poly>);

impl FnEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, f: &FnVar) -> Option<&Poly> {
        self.0.get(f)
    }

    pub fn insert(&mut self, f: FnVar, p: Poly) {
        self.0.insert(f, p);
    }

    pub fn with(mut self, f: FnVar, p: Poly) -> Self {
        self.insert(f, p);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FnVar, &Poly)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every variable occurring in an entry.
    pub fn vars(&self) -> BTreeSet<VarName> {
        self.0.values().flat_map(Poly::vars).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("function variable {0} has no entry in the environment")]
pub struct UnboundFn(pub FnVar);

/// The denotation of `e` as a polynomial in its free variables. Every function
/// variable of `e` must be bound in `phi`.
pub fn eval_sym(e: &Expr, phi: &FnEnv) -> Result<Poly, UnboundFn> {
    let mut ev = Evaluator::new(e, phi, BTreeMap::new(), true);
    ev.go(e)
}

/// The exact value of `e`. Missing entries default to `0`, including any
/// variable other than a parameter that occurs in an entry of `phi`.
pub fn eval(e: &Expr, phi: &FnEnv, rho: &VarEnv) -> Rat {
    let point: BTreeMap<VarName, Rat> = e
        .free_vars()
        .into_iter()
        .map(|x| {
            let r = rho.get(&x);
            (x, r)
        })
        .collect();
    let mut ev = Evaluator::new(e, phi, point, false);
    let p = ev.go(e).expect("missing functions default to zero");
    let rest: BTreeMap<VarName, Rat> = p.vars().into_iter().map(|x| (x, Rat::zero())).collect();
    p.eval(&rest).expect("every remaining variable is set")
}

struct Evaluator<'a> {
    phi: &'a FnEnv,
    point: BTreeMap<VarName, Rat>,
    strict: bool,
    fresh: Fresh,
}

impl<'a> Evaluator<'a> {
    fn new(e: &Expr, phi: &'a FnEnv, point: BTreeMap<VarName, Rat>, strict: bool) -> Self {
        let mut fresh = Fresh::new("d");
        fresh.avoid_expr(e);
        phi.vars().iter().for_each(|x| fresh.avoid(x.as_str()));
        Evaluator {
            phi,
            point,
            strict,
            fresh,
        }
    }

    fn go(&mut self, e: &Expr) -> Result<Poly, UnboundFn> {
        Ok(match e.node() {
            Node::Const(r) => Poly::constant(r.clone()),
            Node::Var(x) => match self.point.get(x) {
                Some(r) => Poly::constant(r.clone()),
                None => Poly::var(x.clone()),
            },
            Node::Bound(_) => unreachable!("evaluation sees only locally closed terms"),
            Node::Sum(a, b) => &self.go(a)? + &self.go(b)?,
            Node::Prod(a, b) => &self.go(a)? * &self.go(b)?,
            Node::App(f, args) => {
                let body = match self.phi.get(f) {
                    Some(p) => p.clone(),
                    None if self.strict => return Err(UnboundFn(f.clone())),
                    None => return Ok(Poly::zero()),
                };
                let mut bindings = BTreeMap::new();
                for (i, a) in args.iter().enumerate() {
                    bindings.insert(param(i), self.go(a)?);
                }
                body.subst(&bindings)
            }
            Node::PDiff(_, at) => {
                let z = self.fresh.var();
                let body = e.open_body(&z).expect("pdiff node");
                let d = self.go(&body)?.derive(&z);
                let at = self.go(at)?;
                d.subst(&[(z, at)].into())
            }
        })
    }
}

/// Assigns every function variable of `exprs` a polynomial of total degree at
/// most `degree` whose coefficients are distinct fresh variables `a0, a1,
/// ...`, numbered in order of function variable and then ascending monomial.
pub fn generic_env<'a>(exprs: impl IntoIterator<Item = &'a Expr>, degree: u32) -> FnEnv {
    let exprs: Vec<&Expr> = exprs.into_iter().collect();
    let mut fresh = Fresh::new("a");
    let mut fns = BTreeSet::new();
    for e in &exprs {
        fresh.avoid_expr(e);
        fns.extend(e.fn_vars());
    }
    let mut env = FnEnv::new();
    for f in fns {
        let mut p = Poly::zero();
        for m in monomials_up_to(&params(f.arity()), degree) {
            let coeff = Poly::var(fresh.var());
            p = &p + &(&coeff * &Poly::monomial(m, Rat::from_integer(1.into())));
        }
        env.insert(f, p);
    }
    env
}

/// Generic-coefficient check: both sides evaluate to the same polynomial in
/// term variables and coefficients. Only a `false` answer is conclusive.
pub fn oracle_equal(e: &Expr, e2: &Expr, degree: u32) -> bool {
    let phi = generic_env([e, e2], degree);
    let l = eval_sym(e, &phi).expect("generic env binds every function variable");
    let r = eval_sym(e2, &phi).expect("generic env binds every function variable");
    l == r
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct EnvError {
    pub line: usize,
    pub msg: String,
}

/// Reads environment bindings, one per line: `f/2 := x0*x1 + 3` or
/// `x := 5/2`. Blank lines and text after `#` are ignored. Polynomial bodies
/// may use `^` with a natural exponent.
pub fn parse_env(text: &str) -> Result<(FnEnv, VarEnv), EnvError> {
    let mut phi = FnEnv::new();
    let mut rho = VarEnv::new();
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| EnvError { line, msg };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (lhs, rhs) = content
            .split_once(":=")
            .ok_or_else(|| err("expected `name := value`".into()))?;
        let lhs = lhs.trim();
        if let Some((name, arity)) = lhs.split_once('/') {
            let name = name.trim();
            if !VarName::is_identifier(name) {
                return Err(err(format!("bad function name `{name}`")));
            }
            let arity: usize = arity
                .trim()
                .parse()
                .map_err(|_| err(format!("bad arity `{}`", arity.trim())))?;
            if let Some(&old) = names.get(name) {
                if old != arity {
                    return Err(err(format!(
                        "function variable `{name}` used with arities {old} and {arity}"
                    )));
                }
            }
            names.insert(name.to_string(), arity);
            let e = parse_with(rhs, ParseOptions { allow_power: true })
                .map_err(|e| err(e.to_string()))?;
            let p = Poly::from_expr(&e).map_err(|e| err(e.to_string()))?;
            let allowed: BTreeSet<VarName> = params(arity).into_iter().collect();
            if let Some(x) = p.vars().into_iter().find(|x| !allowed.contains(x)) {
                return Err(err(format!(
                    "`{x}` is not a parameter of {name}/{arity} (expected x0..x{})",
                    arity.saturating_sub(1)
                )));
            }
            phi.insert(FnVar::new(name, arity), p);
        } else {
            if !VarName::is_identifier(lhs) {
                return Err(err(format!("bad variable name `{lhs}`")));
            }
            let e = parse(rhs).map_err(|e| err(e.to_string()))?;
            let r = Poly::from_expr(&e)
                .ok()
                .and_then(|p| p.as_constant())
                .ok_or_else(|| err(format!("`{}` is not a constant", rhs.trim())))?;
            rho.set(VarName::new(lhs), r);
        }
    }
    Ok((phi, rho))
}

impl fmt::Display for FnEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, p) in &self.0 {
            writeln!(f, "{g} := {p}")?;
        }
        Ok(())
    }
}

impl fmt::Display for VarEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, r) in &self.0 {
            writeln!(f, "{x} := {}", crate::term::print_rat(r))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FnEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().map(|(g, p)| (g, p.to_string())))
            .finish()
    }
}

impl fmt::Debug for VarEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().map(|(x, r)| (x, r.to_string())))
            .finish()
    }
}
