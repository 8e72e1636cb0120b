//! Canonical forms: sums and products of rationals and atoms, where an atom
//! is a variable or a differentiated function application `f_m(c0, ..., cn)`
//! with canonical arguments. Every expression is provably equal to one.

mod equiv;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};

use crate::term::{print_rat, Expr, FnVar, Fresh, Node, Rat, VarName};

pub use equiv::{
    atom_equiv, canon_equiv, decide, node_poly, Equiv, MissingAtom, NamingScheme, SepAssign,
};

/// A multiset of argument positions, stored sorted so that permuted
/// sequences compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct DerivIndex(Vec<usize>);

impl DerivIndex {
    pub fn empty() -> Self {
        DerivIndex(Vec::new())
    }

    pub fn from_seq(seq: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = seq.into_iter().collect();
        v.sort_unstable();
        DerivIndex(v)
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// The index of `i·m`, one more derivative in position `i`.
    pub fn with(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        let at = v.partition_point(|&j| j <= i);
        v.insert(at, i);
        DerivIndex(v)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(VarName),
    FApp {
        f: FnVar,
        m: DerivIndex,
        args: Vec<Canon>,
    },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Canon {
    Atom(Arc<Atom>),
    Const(Rat),
    Sum(Arc<Canon>, Arc<Canon>),
    Prod(Arc<Canon>, Arc<Canon>),
}

/// `f_m` applied to arguments of the wrong length or with a position out of
/// range.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad application of {f}: {reason}")]
pub struct BadAtom {
    pub f: FnVar,
    pub reason: String,
}

impl Atom {
    pub fn fapp(f: FnVar, m: DerivIndex, args: Vec<Canon>) -> Result<Atom, BadAtom> {
        if args.len() != f.arity() {
            return Err(BadAtom {
                reason: format!("{} argument(s)", args.len()),
                f,
            });
        }
        if let Some(&i) = m.0.iter().find(|&&i| i >= f.arity()) {
            return Err(BadAtom {
                reason: format!("derivative position {i} out of range"),
                f,
            });
        }
        Ok(Atom::FApp { f, m, args })
    }
}

impl Canon {
    pub fn constant(r: Rat) -> Self {
        Canon::Const(r)
    }

    pub fn int(n: i64) -> Self {
        Canon::Const(Rat::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Canon::int(0)
    }

    pub fn one() -> Self {
        Canon::int(1)
    }

    pub fn atom(a: Atom) -> Self {
        Canon::Atom(Arc::new(a))
    }

    pub fn var(x: impl Into<VarName>) -> Self {
        Canon::atom(Atom::Var(x.into()))
    }

    pub fn sum(a: Canon, b: Canon) -> Self {
        Canon::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn prod(a: Canon, b: Canon) -> Self {
        Canon::Prod(Arc::new(a), Arc::new(b))
    }

    /// Right-nested sum; the empty sum is `0`.
    pub fn sum_all(terms: Vec<Canon>) -> Self {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => Canon::zero(),
            Some(last) => it.fold(last, |acc, t| Canon::sum(t, acc)),
        }
    }

    pub fn has_free_var(&self, x: &VarName) -> bool {
        match self {
            Canon::Const(_) => false,
            Canon::Sum(a, b) | Canon::Prod(a, b) => a.has_free_var(x) || b.has_free_var(x),
            Canon::Atom(a) => match &**a {
                Atom::Var(y) => y == x,
                Atom::FApp { args, .. } => args.iter().any(|c| c.has_free_var(x)),
            },
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Var(x) = a {
                out.insert(x.clone());
            }
        });
        out
    }

    pub fn fn_vars(&self) -> BTreeSet<FnVar> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::FApp { f, .. } = a {
                out.insert(f.clone());
            }
        });
        out
    }

    /// Visits every atom, including those nested in arguments.
    fn visit_atoms(&self, visit: &mut impl FnMut(&Atom)) {
        match self {
            Canon::Const(_) => {}
            Canon::Sum(a, b) | Canon::Prod(a, b) => {
                a.visit_atoms(visit);
                b.visit_atoms(visit);
            }
            Canon::Atom(a) => {
                visit(a);
                if let Atom::FApp { args, .. } = &**a {
                    args.iter().for_each(|c| c.visit_atoms(visit));
                }
            }
        }
    }

    pub fn is_atom_free(&self) -> bool {
        match self {
            Canon::Const(_) => true,
            Canon::Atom(_) => false,
            Canon::Sum(a, b) | Canon::Prod(a, b) => a.is_atom_free() && b.is_atom_free(),
        }
    }

    /// Value of an atom-free canonical form.
    pub fn const_value(&self) -> Option<Rat> {
        match self {
            Canon::Const(r) => Some(r.clone()),
            Canon::Atom(_) => None,
            Canon::Sum(a, b) => Some(a.const_value()? + b.const_value()?),
            Canon::Prod(a, b) => Some(a.const_value()? * b.const_value()?),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Canon::Const(_) => 1,
            Canon::Sum(a, b) | Canon::Prod(a, b) => 1 + a.size() + b.size(),
            Canon::Atom(a) => match &**a {
                Atom::Var(_) => 1,
                Atom::FApp { args, .. } => 1 + args.iter().map(Canon::size).sum::<usize>(),
            },
        }
    }

    /// `self[with/x]`, replacing the variable atom `x`.
    pub fn subst_var(&self, x: &VarName, with: &Canon) -> Canon {
        if !self.has_free_var(x) {
            return self.clone();
        }
        match self {
            Canon::Const(_) => self.clone(),
            Canon::Sum(a, b) => Canon::sum(a.subst_var(x, with), b.subst_var(x, with)),
            Canon::Prod(a, b) => Canon::prod(a.subst_var(x, with), b.subst_var(x, with)),
            Canon::Atom(a) => match &**a {
                Atom::Var(_) => with.clone(),
                Atom::FApp { f, m, args } => Canon::atom(Atom::FApp {
                    f: f.clone(),
                    m: m.clone(),
                    args: args.iter().map(|c| c.subst_var(x, with)).collect(),
                }),
            },
        }
    }
}

/// Immediate atomic subexpressions: atoms reachable without entering an
/// application's arguments.
pub fn immediate_atoms(c: &Canon) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    collect_immediate(c, &mut out);
    out
}

pub(crate) fn collect_immediate(c: &Canon, out: &mut BTreeSet<Atom>) {
    match c {
        Canon::Const(_) => {}
        Canon::Atom(a) => {
            out.insert((**a).clone());
        }
        Canon::Sum(a, b) | Canon::Prod(a, b) => {
            collect_immediate(a, out);
            collect_immediate(b, out);
        }
    }
}

/// The expression `D[x_i1](... D[x_ik](f(x0, ..., xn); x_ik) ...; x_i1)` with
/// `args` substituted for the parameters. `seq` is taken in the given order,
/// its first position outermost.
pub fn fm_expr(f: &FnVar, seq: &[usize], args: &[Expr]) -> Expr {
    let params: Vec<VarName> = (0..f.arity())
        .map(|i| VarName::new(format!("x{i}")))
        .collect();
    let mut body = Expr::app(
        f.clone(),
        params.iter().map(|p| Expr::var(p.clone())).collect(),
    )
    .expect("parameter count is the arity");
    for &i in seq.iter().rev() {
        body = Expr::diff(&params[i], body);
    }
    let bindings: BTreeMap<VarName, Expr> = params.into_iter().zip(args.iter().cloned()).collect();
    crate::term::subst_vars(&body, &bindings)
}

pub fn to_expr(c: &Canon) -> Expr {
    match c {
        Canon::Const(r) => Expr::constant(r.clone()),
        Canon::Sum(a, b) => Expr::sum(to_expr(a), to_expr(b)),
        Canon::Prod(a, b) => Expr::prod(to_expr(a), to_expr(b)),
        Canon::Atom(a) => atom_to_expr(a),
    }
}

pub fn atom_to_expr(a: &Atom) -> Expr {
    match a {
        Atom::Var(x) => Expr::var(x.clone()),
        Atom::FApp { f, m, args } => {
            let args: Vec<Expr> = args.iter().map(to_expr).collect();
            fm_expr(f, m.positions(), &args)
        }
    }
}

/// A canonical form of `D[x](c; at)`.
///
/// Constants and other variables give `0` and `x` gives `1`; sums map to sums
/// of derivatives; `a*b` gives `b[at/x]*a' + a[at/x]*b'`; and `f_m(c0, ...)`
/// gives the right-nested sum over `i` of `f_(i·m)(c0[at/x], ...) * ci'`.
/// Any `c` without `x` gives `0` directly.
pub fn deriv_at(c: &Canon, x: &VarName, at: &Canon) -> Canon {
    if !c.has_free_var(x) {
        return Canon::zero();
    }
    match c {
        Canon::Const(_) => Canon::zero(),
        Canon::Sum(a, b) => Canon::sum(deriv_at(a, x, at), deriv_at(b, x, at)),
        Canon::Prod(a, b) => Canon::sum(
            Canon::prod(b.subst_var(x, at), deriv_at(a, x, at)),
            Canon::prod(a.subst_var(x, at), deriv_at(b, x, at)),
        ),
        Canon::Atom(a) => match &**a {
            Atom::Var(_) => Canon::one(),
            Atom::FApp { f, m, args } => {
                let moved: Vec<Canon> = args.iter().map(|c| c.subst_var(x, at)).collect();
                let terms = args
                    .iter()
                    .enumerate()
                    .map(|(i, ci)| {
                        let head = Canon::atom(Atom::FApp {
                            f: f.clone(),
                            m: m.with(i),
                            args: moved.clone(),
                        });
                        Canon::prod(head, deriv_at(ci, x, at))
                    })
                    .collect();
                Canon::sum_all(terms)
            }
        },
    }
}

/// A canonical form provably equal to `e`. Subterms whose canonical form
/// contains no atom are folded into a single rational.
pub fn canonicalize(e: &Expr) -> Canon {
    let mut fresh = Fresh::new("z");
    fresh.avoid_expr(e);
    canonicalize_with(e, &mut fresh)
}

pub(crate) fn canonicalize_with(e: &Expr, fresh: &mut Fresh) -> Canon {
    let c = match e.node() {
        Node::Const(r) => Canon::Const(r.clone()),
        Node::Var(x) => Canon::var(x.clone()),
        Node::Bound(_) => unreachable!("canonicalize sees only locally closed terms"),
        Node::Sum(a, b) => Canon::sum(canonicalize_with(a, fresh), canonicalize_with(b, fresh)),
        Node::Prod(a, b) => Canon::prod(canonicalize_with(a, fresh), canonicalize_with(b, fresh)),
        Node::App(f, args) => Canon::atom(Atom::FApp {
            f: f.clone(),
            m: DerivIndex::empty(),
            args: args.iter().map(|a| canonicalize_with(a, fresh)).collect(),
        }),
        Node::PDiff(_, at) => {
            let z = fresh.var();
            let body = e.open_body(&z).expect("pdiff node");
            let c0 = canonicalize_with(&body, fresh);
            let c1 = canonicalize_with(at, fresh);
            deriv_at(&c0, &z, &c1)
        }
    };
    fold_if_closed(c)
}

pub(crate) fn fold_if_closed(c: Canon) -> Canon {
    match (&c, c.const_value()) {
        (Canon::Const(_), _) | (_, None) => c,
        (_, Some(r)) => Canon::Const(r),
    }
}

/// Least superset of `cs` closed under immediate atoms and application
/// arguments.
pub fn saturate(cs: &BTreeSet<Canon>) -> BTreeSet<Canon> {
    let mut out = BTreeSet::new();
    let mut todo: Vec<Canon> = cs.iter().cloned().collect();
    while let Some(c) = todo.pop() {
        if !out.insert(c.clone()) {
            continue;
        }
        for a in immediate_atoms(&c) {
            if let Atom::FApp { args, .. } = &a {
                todo.extend(args.iter().cloned());
            }
            todo.push(Canon::atom(a));
        }
    }
    out
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(x) => write!(f, "{x}"),
            Atom::FApp { f: g, m, args } => {
                let m: Vec<String> = m.0.iter().map(usize::to_string).collect();
                write!(f, "{}_[{}](", g.name(), m.join(","))?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Canon::Const(r) => f.write_str(&print_rat(r)),
            Canon::Atom(a) => write!(f, "{a}"),
            Canon::Sum(a, b) => {
                write!(f, "{a} + ")?;
                if matches!(**b, Canon::Sum(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Canon::Prod(a, b) => {
                if matches!(**a, Canon::Sum(..)) {
                    write!(f, "({a})*")?;
                } else {
                    write!(f, "{a}*")?;
                }
                if matches!(**b, Canon::Sum(..) | Canon::Prod(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Canon {
    pub fn is_zero_const(&self) -> bool {
        matches!(self, Canon::Const(r) if r.is_zero())
    }

    pub fn is_one_const(&self) -> bool {
        matches!(self, Canon::Const(r) if r.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn fapp(name: &str, m: &[usize], args: Vec<Canon>) -> Canon {
        let f = FnVar::new(name, args.len());
        Canon::atom(Atom::fapp(f, DerivIndex::from_seq(m.iter().copied()), args).unwrap())
    }

    #[test]
    fn fm_unfolds_outermost_first() {
        let c = fapp("f", &[0], vec![Canon::var("x")]);
        assert_eq!(to_expr(&c), p("D[z](f(z); x)"));
        let c = fapp("f", &[1, 0], vec![Canon::var("x"), Canon::var("y")]);
        assert_eq!(to_expr(&c), p("D[u](D[v](f(u, v); y); x)"));
        let f = FnVar::new("f", 2);
        let e = fm_expr(&f, &[1, 0], &[p("x"), p("y")]);
        assert_eq!(e, p("D[u](D[v](f(v, u); x); y)"));
    }

    #[test]
    fn immediate_atoms_stop_at_applications() {
        assert!(immediate_atoms(&Canon::int(3)).is_empty());
        let inner = Canon::sum(Canon::var("x"), Canon::var("y"));
        let c = fapp("f", &[], vec![inner]);
        assert_eq!(immediate_atoms(&c).len(), 1);
        let c = Canon::sum(
            Canon::var("x"),
            Canon::prod(fapp("f", &[], vec![Canon::var("y")]), Canon::int(2)),
        );
        assert_eq!(immediate_atoms(&c).len(), 2);
    }

    #[test]
    fn derivative_of_application() {
        let c = fapp("f", &[], vec![Canon::var("x")]);
        let got = deriv_at(&c, &VarName::new("x"), &Canon::var("y"));
        let want = Canon::prod(fapp("f", &[0], vec![Canon::var("y")]), Canon::one());
        assert_eq!(got, want);
        assert_eq!(
            deriv_at(&c, &VarName::new("q"), &Canon::var("y")),
            Canon::zero()
        );
    }

    #[test]
    fn closed_terms_fold() {
        assert_eq!(
            canonicalize(&p("D[x](x*x; 3) + 1/2")),
            Canon::constant(Rat::new(13.into(), 2.into()))
        );
        assert_eq!(
            canonicalize(&p("x + y")),
            Canon::sum(Canon::var("x"), Canon::var("y"))
        );
    }

    #[test]
    fn saturation() {
        let c = fapp(
            "f",
            &[],
            vec![Canon::prod(Canon::var("x"), Canon::var("y"))],
        );
        let s = saturate(&[c].into());
        assert_eq!(s.len(), 4);
        assert_eq!(saturate(&s), s);
        assert_eq!(saturate(&[Canon::int(3)].into()).len(), 1);
    }

    #[test]
    fn display() {
        let c = fapp("f", &[1, 0], vec![Canon::var("x"), Canon::int(-2)]);
        assert_eq!(c.to_string(), "f_[0,1](x, -2)");
    }
}
