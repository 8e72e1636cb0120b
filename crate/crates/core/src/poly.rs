//! Sparse multivariate polynomials over the rationals in normal form.
//!
//! A polynomial is a map from monomials to nonzero coefficients, and a
//! monomial is a sorted list of variables with positive exponents. The
//! representation is unique, so `==` is ring equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};

use crate::term::{Expr, Node, Rat, VarName};

/// A power product `x0^e0 * ... * xk^ek` with strictly increasing variable
/// names and positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarName, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(x: VarName) -> Self {
        Monomial(vec![(x, 1)])
    }

    /// Builds a monomial from arbitrary factors, merging repeats and dropping
    /// zero exponents.
    pub fn from_factors(factors: impl IntoIterator<Item = (VarName, u32)>) -> Self {
        let mut map: BTreeMap<VarName, u32> = BTreeMap::new();
        for (x, e) in factors {
            *map.entry(x).or_default() += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn factors(&self) -> &[(VarName, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, x: &VarName) -> u32 {
        self.0.iter().find(|(y, _)| y == x).map_or(0, |(_, e)| *e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_factors(self.0.iter().chain(other.0.iter()).cloned())
    }

    fn without(&self, x: &VarName) -> Monomial {
        Monomial(self.0.iter().filter(|(y, _)| y != x).cloned().collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// alphabetically first variable where the two differ.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), other.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some((x, a)), Some((y, b))) => match x.cmp(y) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match a.cmp(b) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            ord => return ord,
                        },
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (x, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{x}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no value for variable `{0}`")]
pub struct MissingVar(pub VarName);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a polynomial: `{subterm}`")]
pub struct NotPolynomial {
    pub subterm: Expr,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(r: Rat) -> Self {
        Poly::monomial(Monomial::one(), r)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Rat::from_integer(n.into()))
    }

    pub fn var(x: impl Into<VarName>) -> Self {
        Poly::monomial(Monomial::var(x.into()), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| i64::from(m.degree()))
            .max()
            .unwrap_or(-1)
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(x, _)| x.clone()))
            .collect()
    }

    /// Ring equality.
    pub fn equiv(&self, other: &Poly) -> bool {
        self == other
    }

    pub fn scale(&self, r: &Rat) -> Poly {
        if r.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact value at `point`, which must cover every variable.
    pub fn eval(&self, point: &BTreeMap<VarName, Rat>) -> Result<Rat, MissingVar> {
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, e) in &m.0 {
                let r = point.get(x).ok_or_else(|| MissingVar(x.clone()))?;
                v *= num::pow(r.clone(), *e as usize);
            }
            total += v;
        }
        Ok(total)
    }

    /// Substitutes the variables bound in `point` by their values and keeps the
    /// rest symbolic.
    pub fn eval_partial(&self, point: &BTreeMap<VarName, Rat>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (x, e) in &m.0 {
                match point.get(x) {
                    Some(r) => coeff *= num::pow(r.clone(), *e as usize),
                    None => rest.push((x.clone(), *e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Formal partial derivative.
    pub fn derive(&self, x: &VarName) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(x);
            if e == 0 {
                continue;
            }
            let rest = m.without(x);
            let m2 = if e > 1 {
                rest.mul(&Monomial(vec![(x.clone(), e - 1)]))
            } else {
                rest
            };
            out.add_term(m2, c * Rat::from_integer(e.into()));
        }
        out
    }

    /// Simultaneous substitution of polynomials for variables.
    pub fn subst(&self, bindings: &BTreeMap<VarName, Poly>) -> Poly {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            let mut kept = Vec::new();
            for (x, e) in &m.0 {
                match bindings.get(x) {
                    Some(q) => term = &term * &q.pow(*e),
                    None => kept.push((x.clone(), *e)),
                }
            }
            term = &term * &Poly::monomial(Monomial(kept), Rat::one());
            out = &out + &term;
        }
        out
    }

    /// Normal form of an expression with no function variables and no
    /// differentiation.
    pub fn from_expr(e: &Expr) -> Result<Poly, NotPolynomial> {
        match e.node() {
            Node::Const(r) => Ok(Poly::constant(r.clone())),
            Node::Var(x) => Ok(Poly::var(x.clone())),
            Node::Sum(a, b) => Ok(&Poly::from_expr(a)? + &Poly::from_expr(b)?),
            Node::Prod(a, b) => Ok(&Poly::from_expr(a)? * &Poly::from_expr(b)?),
            Node::Bound(_) | Node::App(..) | Node::PDiff(..) => {
                Err(NotPolynomial { subterm: e.clone() })
            }
        }
    }

    /// An expression denoting this polynomial: a sum of coefficient times
    /// power products, in descending monomial order.
    pub fn to_expr(&self) -> Expr {
        let terms: Vec<Expr> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let powers =
                    m.0.iter()
                        .flat_map(|(x, e)| std::iter::repeat_n(Expr::var(x.clone()), *e as usize));
                let mut factors: Vec<Expr> = Vec::new();
                if !c.is_one() || m.is_one() {
                    factors.push(Expr::constant(c.clone()));
                }
                factors.extend(powers);
                let mut it = factors.into_iter();
                let first = it.next().expect("nonempty");
                it.fold(first, Expr::prod)
            })
            .collect();
        Expr::sum_all(terms)
    }

    /// True when every coefficient is a natural number.
    pub fn is_natural(&self) -> bool {
        self.terms
            .values()
            .all(|c| c.is_integer() && !c.is_negative())
    }
}

/// Every monomial in `vars` of total degree at most `d`, ascending.
pub fn monomials_up_to(vars: &[VarName], d: u32) -> Vec<Monomial> {
    fn go(vars: &[VarName], left: u32, acc: &mut Vec<(VarName, u32)>, out: &mut Vec<Monomial>) {
        match vars.split_first() {
            None => out.push(Monomial::from_factors(acc.iter().cloned())),
            Some((x, rest)) => {
                for e in 0..=left {
                    acc.push((x.clone(), e));
                    go(rest, left - e, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(vars, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, other: Poly) -> Poly {
                (&self).$f(&other)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    /// Descending graded-lex order, e.g. `3*x^2*y + -1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let c_str = crate::term::print_rat(c);
            if m.is_one() {
                f.write_str(&c_str)?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c_str}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
