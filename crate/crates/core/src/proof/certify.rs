//! Proofs that expressions equal their canonical forms.
//!
//! The construction follows canonicalization node by node. Derivatives of
//! canonical forms are handled by one chain rule per arity, obtained from the
//! binary axiom: the nullary and unary rules by plugging in constant inner
//! functions, and the rule for `n + 1` arguments from the diagonal instance
//! `D[x](f(x, x))` together with the rules for `1` and `n`. Placeholder
//! function variables `Hn` and `Gi` stand for the outer and inner functions;
//! one substitution instantiates them all at once.

use std::collections::{BTreeMap, HashMap};

use super::check::conclude;
use super::{AxiomId, Proof, Rule};
use crate::canon::{deriv_at, fm_expr, to_expr, Atom, Canon, DerivIndex};
use crate::term::{print, Abstract, Expr, FnVar, Fresh, Node, VarName};

/// A proof of `e = to_expr(canonicalize(e))`.
pub fn certify_canonicalize(e: &Expr) -> Proof {
    let mut fresh = Fresh::new("z");
    fresh.avoid_expr(e);
    let t = fresh.var();
    let s = fresh.var();
    let mut c = Certifier {
        t,
        s,
        fresh,
        k0: None,
        v: None,
        diag: None,
        chain: HashMap::new(),
        perms: HashMap::new(),
        derivs: HashMap::new(),
    };
    c.cert(e).0.proof
}

#[derive(Clone)]
struct Thm {
    proof: Proof,
    lhs: Expr,
    rhs: Expr,
}

fn rule(r: Rule, premises: &[&Thm]) -> Thm {
    let concl: Vec<(Expr, Expr)> = premises
        .iter()
        .map(|t| (t.lhs.clone(), t.rhs.clone()))
        .collect();
    let (lhs, rhs) =
        conclude(&r, &concl).unwrap_or_else(|msg| panic!("certificate step failed: {msg}"));
    Thm {
        proof: Proof::new(r),
        lhs,
        rhs,
    }
}

fn ax(id: AxiomId) -> Thm {
    rule(Rule::Axiom(id), &[])
}

fn refl(e: Expr) -> Thm {
    rule(Rule::Refl(e), &[])
}

fn sym(a: &Thm) -> Thm {
    rule(Rule::Sym(a.proof.clone()), &[a])
}

fn trans(a: &Thm, b: &Thm) -> Thm {
    assert!(
        a.rhs == b.lhs,
        "certificate chain broken between `{}` and `{}`",
        print(&a.rhs),
        print(&b.lhs)
    );
    rule(Rule::Trans(a.proof.clone(), b.proof.clone()), &[a, b])
}

fn cong_sum(a: &Thm, b: &Thm) -> Thm {
    rule(Rule::CongSum(a.proof.clone(), b.proof.clone()), &[a, b])
}

fn cong_prod(a: &Thm, b: &Thm) -> Thm {
    rule(Rule::CongProd(a.proof.clone(), b.proof.clone()), &[a, b])
}

fn cong_pdiff(x: &VarName, body: &Thm, at: &Thm) -> Thm {
    rule(
        Rule::CongPDiff(x.clone(), body.proof.clone(), at.proof.clone()),
        &[body, at],
    )
}

fn sv(a: &Thm, b: &[(&VarName, Expr)]) -> Thm {
    let map: BTreeMap<VarName, Expr> = b.iter().map(|(x, e)| ((*x).clone(), e.clone())).collect();
    rule(Rule::SubstVar(a.proof.clone(), map), &[a])
}

fn sf(a: &Thm, b: Vec<(FnVar, Abstract)>) -> Thm {
    rule(
        Rule::SubstFn(a.proof.clone(), b.into_iter().collect()),
        &[a],
    )
}

fn name(s: &str) -> VarName {
    VarName::new(s)
}

fn var(x: &VarName) -> Expr {
    Expr::var(x.clone())
}

fn app(f: &FnVar, args: Vec<Expr>) -> Expr {
    Expr::app(f.clone(), args).expect("placeholder arity")
}

fn abs(params: &[VarName], body: Expr) -> Abstract {
    Abstract::new(params.to_vec(), body).expect("distinct parameters")
}

fn outer(n: usize) -> FnVar {
    FnVar::new(format!("H{n}"), n)
}

fn inner(i: usize) -> FnVar {
    FnVar::new(format!("G{i}"), 1)
}

fn params(n: usize, prefix: &str) -> Vec<VarName> {
    (0..n)
        .map(|i| VarName::new(format!("{prefix}{i}")))
        .collect()
}

fn split_sum(e: &Expr) -> (Expr, Expr) {
    match e.node() {
        Node::Sum(a, b) => (a.clone(), b.clone()),
        _ => panic!("expected a sum, got `{}`", print(e)),
    }
}

fn split_prod(e: &Expr) -> (Expr, Expr) {
    match e.node() {
        Node::Prod(a, b) => (a.clone(), b.clone()),
        _ => panic!("expected a product, got `{}`", print(e)),
    }
}

/// `t*d = 0` from `d = 0`.
fn kill(t: &Expr, d_zero: &Thm) -> Thm {
    trans(
        &cong_prod(&refl(t.clone()), d_zero),
        &sv(&ax(AxiomId::MulZero), &[(&name("x"), t.clone())]),
    )
}

/// `t*d = t` from `d = 1`.
fn drop_one(t: &Expr, d_one: &Thm) -> Thm {
    trans(
        &cong_prod(&refl(t.clone()), d_one),
        &sv(&ax(AxiomId::MulOne), &[(&name("x"), t.clone())]),
    )
}

/// `1*e = e`.
fn one_mul(e: &Expr) -> Thm {
    trans(
        &sv(
            &ax(AxiomId::MulComm),
            &[(&name("x"), Expr::one()), (&name("y"), e.clone())],
        ),
        &sv(&ax(AxiomId::MulOne), &[(&name("x"), e.clone())]),
    )
}

struct Certifier {
    /// The point variable of the chain rules.
    t: VarName,
    /// Bound variable for rewriting under a derivative.
    s: VarName,
    fresh: Fresh,
    k0: Option<Thm>,
    v: Option<Thm>,
    diag: Option<Thm>,
    chain: HashMap<usize, Thm>,
    perms: HashMap<(FnVar, Vec<usize>), Thm>,
    derivs: HashMap<(Canon, VarName), Thm>,
}

impl Certifier {
    /// `D[t](0; t) = 0`.
    fn k0(&mut self) -> Thm {
        if let Some(th) = &self.k0 {
            return th.clone();
        }
        let x = name("x");
        let zero_x = trans(
            &sv(
                &ax(AxiomId::MulComm),
                &[(&x, Expr::zero()), (&name("y"), var(&x))],
            ),
            &ax(AxiomId::MulZero),
        );
        let under = cong_pdiff(&x, &sym(&zero_x), &refl(var(&x)));
        let th = trans(
            &under,
            &sv(&ax(AxiomId::DiffMul), &[(&name("y"), Expr::zero())]),
        );
        let th = sv(&th, &[(&x, var(&self.t))]);
        self.k0 = Some(th.clone());
        th
    }

    /// `D[t](t; t) = 1`.
    fn v(&mut self) -> Thm {
        if let Some(th) = &self.v {
            return th.clone();
        }
        let x = name("x");
        let under = cong_pdiff(&x, &sym(&ax(AxiomId::AddZero)), &refl(var(&x)));
        let th = trans(
            &under,
            &sv(&ax(AxiomId::DiffAdd), &[(&name("y"), Expr::zero())]),
        );
        let th = sv(&th, &[(&x, var(&self.t))]);
        self.v = Some(th.clone());
        th
    }

    /// `D[t](f(t, t); t) = D[a](f(a, t); t) + D[b](f(t, b); t)`.
    fn diag(&mut self) -> Thm {
        if let Some(th) = &self.diag {
            return th.clone();
        }
        let x = name("x");
        let w = name("w");
        let id = abs(std::slice::from_ref(&w), var(&w));
        let a = sf(
            &ax(AxiomId::Chain2),
            vec![(inner_axiom(0), id.clone()), (inner_axiom(1), id)],
        );
        let (s0, s1) = split_sum(&a.rhs);
        let vx = sv(&self.v(), &[(&self.t, var(&x))]);
        let b = cong_sum(
            &drop_one(&split_prod(&s0).0, &vx),
            &drop_one(&split_prod(&s1).0, &vx),
        );
        let th = sv(&trans(&a, &b), &[(&x, var(&self.t))]);
        self.diag = Some(th.clone());
        th
    }

    /// The chain rule for `n` arguments:
    /// `D[t](Hn(G0(t), ...); t) = sum_i D[p](Hn(..., p, ...); Gi(t)) * D[t](Gi(t); t)`,
    /// right-nested, and `0` for `n = 0`.
    fn chain(&mut self, n: usize) -> Thm {
        if let Some(th) = self.chain.get(&n) {
            return th.clone();
        }
        let x = name("x");
        let w = name("w");
        let uv = params(2, "u");
        let t = self.t.clone();
        let th = match n {
            0 | 1 => {
                let body = if n == 0 {
                    app(&outer(0), vec![])
                } else {
                    app(&outer(1), vec![var(&uv[0])])
                };
                let g0 = if n == 0 {
                    abs(std::slice::from_ref(&w), Expr::zero())
                } else {
                    abs(std::slice::from_ref(&w), app(&inner(0), vec![var(&w)]))
                };
                let a = sf(
                    &ax(AxiomId::Chain2),
                    vec![
                        (FnVar::new("f", 2), abs(&uv, body)),
                        (inner_axiom(0), g0),
                        (inner_axiom(1), abs(std::slice::from_ref(&w), Expr::zero())),
                    ],
                );
                let (s0, s1) = split_sum(&a.rhs);
                let kx = sv(&self.k0(), &[(&t, var(&x))]);
                let z1 = kill(&split_prod(&s1).0, &kx);
                let b = if n == 0 {
                    let z0 = kill(&split_prod(&s0).0, &kx);
                    trans(
                        &cong_sum(&z0, &z1),
                        &sv(&ax(AxiomId::AddZero), &[(&x, Expr::zero())]),
                    )
                } else {
                    trans(
                        &cong_sum(&refl(s0.clone()), &z1),
                        &sv(&ax(AxiomId::AddZero), &[(&x, s0)]),
                    )
                };
                sv(&trans(&a, &b), &[(&x, var(&t))])
            }
            2 => {
                let a = sf(
                    &ax(AxiomId::Chain2),
                    vec![
                        (
                            FnVar::new("f", 2),
                            abs(&uv, app(&outer(2), uv.iter().map(var).collect())),
                        ),
                        (
                            inner_axiom(0),
                            abs(std::slice::from_ref(&w), app(&inner(0), vec![var(&w)])),
                        ),
                        (
                            inner_axiom(1),
                            abs(std::slice::from_ref(&w), app(&inner(1), vec![var(&w)])),
                        ),
                    ],
                );
                sv(&a, &[(&x, var(&t))])
            }
            _ => {
                let m = n - 1;
                let h = outer(n);
                let (u, v) = (&uv[0], &uv[1]);
                let mut split_args = vec![app(&inner(0), vec![var(u)])];
                split_args.extend((1..n).map(|i| app(&inner(i), vec![var(v)])));
                let split = sf(
                    &self.diag(),
                    vec![(FnVar::new("f", 2), abs(&uv, app(&h, split_args)))],
                );
                let q = params(m, "q");
                let mut first_args = vec![var(&q[0])];
                first_args.extend((1..n).map(|i| app(&inner(i), vec![var(&t)])));
                let first = sf(
                    &self.chain(1),
                    vec![(outer(1), abs(&q[..1], app(&h, first_args)))],
                );
                let mut rest_args = vec![app(&inner(0), vec![var(&t)])];
                rest_args.extend(q.iter().map(var));
                let mut b = vec![(outer(m), abs(&q, app(&h, rest_args)))];
                b.extend((0..m).map(|i| {
                    (
                        inner(i),
                        abs(std::slice::from_ref(&w), app(&inner(i + 1), vec![var(&w)])),
                    )
                }));
                let rest = sf(&self.chain(m), b);
                trans(&split, &cong_sum(&first, &rest))
            }
        };
        self.chain.insert(n, th.clone());
        th
    }

    /// `D[z](e[a/p]; z) = sum_i D[p_i](e[a_j/p_j, j != i]; a_i) * D[z](a_i; z)`,
    /// for `z` free in `e` at most through `p`.
    fn subst_diff(&mut self, e: &Expr, p: &[VarName], a: &[Expr], z: &VarName) -> Thm {
        let n = p.len();
        let mut b = vec![(outer(n), abs(p, e.clone()))];
        b.extend(
            a.iter()
                .enumerate()
                .map(|(i, ai)| (inner(i), abs(std::slice::from_ref(z), ai.clone()))),
        );
        let th = sf(&self.chain(n), b);
        sv(&th, &[(&self.t, var(z))])
    }

    /// `D[z](a + b; z) = D[z](a; z) + D[z](b; z)`.
    fn sum_rule(&mut self, a: &Expr, b: &Expr, z: &VarName) -> Thm {
        let p = params(2, "x");
        let sum = Expr::sum(var(&p[0]), var(&p[1]));
        let th = self.subst_diff(&sum, &p, &[a.clone(), b.clone()], z);
        let (t0, t1) = split_sum(&th.rhs);
        let (_, da) = split_prod(&t0);
        let (_, db) = split_prod(&t1);
        let (x, y, s) = (name("x"), name("y"), self.s.clone());
        let c0 = sv(&ax(AxiomId::DiffAdd), &[(&x, a.clone()), (&y, b.clone())]);
        let swapped = cong_pdiff(
            &s,
            &sv(&ax(AxiomId::AddComm), &[(&x, a.clone()), (&y, var(&s))]),
            &refl(var(&s)),
        );
        let c1 = trans(
            &swapped,
            &sv(&ax(AxiomId::DiffAdd), &[(&x, var(&s)), (&y, a.clone())]),
        );
        let c1 = sv(&c1, &[(&s, b.clone())]);
        let r0 = trans(&cong_prod(&c0, &refl(da.clone())), &one_mul(&da));
        let r1 = trans(&cong_prod(&c1, &refl(db.clone())), &one_mul(&db));
        trans(&th, &cong_sum(&r0, &r1))
    }

    /// `D[z](a*b; z) = b*D[z](a; z) + a*D[z](b; z)`.
    fn prod_rule(&mut self, a: &Expr, b: &Expr, z: &VarName) -> Thm {
        let p = params(2, "x");
        let prod = Expr::prod(var(&p[0]), var(&p[1]));
        let th = self.subst_diff(&prod, &p, &[a.clone(), b.clone()], z);
        let (t0, t1) = split_sum(&th.rhs);
        let (_, da) = split_prod(&t0);
        let (_, db) = split_prod(&t1);
        let (x, y, s) = (name("x"), name("y"), self.s.clone());
        let swapped = cong_pdiff(
            &s,
            &sv(&ax(AxiomId::MulComm), &[(&x, var(&s)), (&y, b.clone())]),
            &refl(var(&s)),
        );
        let c0 = trans(
            &swapped,
            &sv(&ax(AxiomId::DiffMul), &[(&x, var(&s)), (&y, b.clone())]),
        );
        let c0 = sv(&c0, &[(&s, a.clone())]);
        let c1 = sv(&ax(AxiomId::DiffMul), &[(&x, b.clone()), (&y, a.clone())]);
        let r0 = cong_prod(&c0, &refl(da));
        let r1 = cong_prod(&c1, &refl(db));
        trans(&th, &cong_sum(&r0, &r1))
    }

    /// `f_seq = f_sorted(seq)` over the parameters, by adjacent swaps.
    fn perm(&mut self, f: &FnVar, seq: &[usize]) -> Thm {
        let key = (f.clone(), seq.to_vec());
        if let Some(th) = self.perms.get(&key) {
            return th.clone();
        }
        let p = params(f.arity(), "x");
        let pv: Vec<Expr> = p.iter().map(var).collect();
        let mut cur = seq.to_vec();
        let mut th = refl(fm_expr(f, &cur, &pv));
        while let Some(j) = (0..cur.len().saturating_sub(1)).find(|&j| cur[j] > cur[j + 1]) {
            let (pa, pb) = (&p[cur[j]], &p[cur[j + 1]]);
            let rest = fm_expr(f, &cur[j + 2..], &pv);
            let swap = sv(
                &ax(AxiomId::Commute),
                &[(&name("x"), var(pb)), (&name("y"), var(pa))],
            );
            let mut step = sf(
                &swap,
                vec![(FnVar::new("f", 2), abs(&[pb.clone(), pa.clone()], rest))],
            );
            for &k in cur[..j].iter().rev() {
                step = cong_pdiff(&p[k], &step, &refl(var(&p[k])));
            }
            th = trans(&th, &step);
            cur.swap(j, j + 1);
        }
        self.perms.insert(key, th.clone());
        th
    }

    /// `D[z](c; z) = deriv_at(c, z, z)`, both sides as expressions.
    fn deriv(&mut self, c: &Canon, z: &VarName) -> Thm {
        let key = (c.clone(), z.clone());
        if let Some(th) = self.derivs.get(&key) {
            return th.clone();
        }
        let th = if !c.has_free_var(z) {
            self.subst_diff(&to_expr(c), &[], &[], z)
        } else {
            match c {
                Canon::Const(_) => unreachable!("constants have no free variable"),
                Canon::Sum(a, b) => {
                    let rule = self.sum_rule(&to_expr(a), &to_expr(b), z);
                    let parts = cong_sum(&self.deriv(a, z), &self.deriv(b, z));
                    trans(&rule, &parts)
                }
                Canon::Prod(a, b) => {
                    let (ea, eb) = (to_expr(a), to_expr(b));
                    let rule = self.prod_rule(&ea, &eb, z);
                    let da = self.deriv(a, z);
                    let db = self.deriv(b, z);
                    let parts = cong_sum(&cong_prod(&refl(eb), &da), &cong_prod(&refl(ea), &db));
                    trans(&rule, &parts)
                }
                Canon::Atom(atom) => match &**atom {
                    Atom::Var(_) => sv(&self.v(), &[(&self.t, var(z))]),
                    Atom::FApp { f, m, args } => {
                        let p = params(f.arity(), "x");
                        let pv: Vec<Expr> = p.iter().map(var).collect();
                        let a: Vec<Expr> = args.iter().map(to_expr).collect();
                        let body = fm_expr(f, m.positions(), &pv);
                        let rule = self.subst_diff(&body, &p, &a, z);
                        let binding: Vec<(&VarName, Expr)> =
                            p.iter().zip(a.iter().cloned()).collect();
                        let mut terms = Vec::new();
                        for (i, ci) in args.iter().enumerate() {
                            let mut seq = vec![i];
                            seq.extend_from_slice(m.positions());
                            let head = sv(&self.perm(f, &seq), &binding);
                            terms.push(cong_prod(&head, &self.deriv(ci, z)));
                        }
                        let last = terms.pop().expect("an argument mentions z");
                        let parts = terms.iter().rev().fold(last, |acc, t| cong_sum(t, &acc));
                        trans(&rule, &parts)
                    }
                },
            }
        };
        self.derivs.insert(key, th.clone());
        th
    }

    /// `c = r` for an atom-free `c` with value `r`.
    fn fold(c: &Canon) -> Thm {
        match c {
            Canon::Const(r) => refl(Expr::constant(r.clone())),
            Canon::Sum(a, b) | Canon::Prod(a, b) => {
                let (va, vb) = (
                    a.const_value().expect("closed"),
                    b.const_value().expect("closed"),
                );
                let id = if matches!(c, Canon::Sum(..)) {
                    AxiomId::ConstAdd(va.clone(), vb.clone(), &va + &vb)
                } else {
                    AxiomId::ConstMul(va.clone(), vb.clone(), &va * &vb)
                };
                let parts = if matches!(c, Canon::Sum(..)) {
                    cong_sum(&Self::fold(a), &Self::fold(b))
                } else {
                    cong_prod(&Self::fold(a), &Self::fold(b))
                };
                trans(&parts, &ax(id))
            }
            Canon::Atom(_) => unreachable!("atom-free input"),
        }
    }

    fn cert(&mut self, e: &Expr) -> (Thm, Canon) {
        let (th, c) = match e.node() {
            Node::Const(r) => (refl(e.clone()), Canon::Const(r.clone())),
            Node::Var(x) => (refl(e.clone()), Canon::var(x.clone())),
            Node::Bound(_) => unreachable!("only locally closed terms are certified"),
            Node::Sum(a, b) => {
                let (ta, ca) = self.cert(a);
                let (tb, cb) = self.cert(b);
                (cong_sum(&ta, &tb), Canon::sum(ca, cb))
            }
            Node::Prod(a, b) => {
                let (ta, ca) = self.cert(a);
                let (tb, cb) = self.cert(b);
                (cong_prod(&ta, &tb), Canon::prod(ca, cb))
            }
            Node::App(f, args) => {
                let (ths, cs): (Vec<Thm>, Vec<Canon>) = args.iter().map(|a| self.cert(a)).unzip();
                let refs: Vec<&Thm> = ths.iter().collect();
                let th = rule(
                    Rule::CongApp(f.clone(), ths.iter().map(|t| t.proof.clone()).collect()),
                    &refs,
                );
                let c = Canon::atom(Atom::FApp {
                    f: f.clone(),
                    m: DerivIndex::empty(),
                    args: cs,
                });
                (th, c)
            }
            Node::PDiff(_, at) => {
                let z = self.fresh.var();
                let body = e.open_body(&z).expect("pdiff node");
                let (t0, c0) = self.cert(&body);
                let (t1, c1) = self.cert(at);
                let outer = cong_pdiff(&z, &t0, &t1);
                let d = sv(&self.deriv(&c0, &z), &[(&z, to_expr(&c1))]);
                (trans(&outer, &d), deriv_at(&c0, &z, &c1))
            }
        };
        if matches!(c, Canon::Const(_)) || !c.is_atom_free() {
            return (th, c);
        }
        let folded = trans(&th, &Self::fold(&c));
        let value = c.const_value().expect("atom-free");
        (folded, Canon::Const(value))
    }
}

/// The inner function variables of the binary chain axiom.
fn inner_axiom(i: usize) -> FnVar {
    FnVar::new(format!("g{i}"), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::proof::{check, check_with, Mode};
    use crate::term::parse;

    fn certified(s: &str) -> Proof {
        let e = parse(s).unwrap();
        let proof = certify_canonicalize(&e);
        let (l, r) = check(&proof).unwrap();
        assert_eq!(l, e, "{s}");
        assert_eq!(r, to_expr(&canonicalize(&e)), "{s}");
        proof
    }

    #[test]
    fn identity_derivative() {
        certified("D[x](x)");
    }

    #[test]
    fn unary_chain_rule() {
        certified("D[x](f(g(x)))");
    }

    #[test]
    fn every_chain_arity_up_to_four() {
        certified("D[x](c())");
        certified("D[x](h(x, x*x))");
        certified("D[x](k(x, 1, x*y))");
        certified("D[x](m(x, y, x, x + 2))");
    }

    #[test]
    fn repeated_and_swapped_derivatives() {
        certified("D[y](D[x](f(x, y)))");
        certified("D[x](D[y](D[x](f(x, y, x*y); 3); 2))");
        certified("D[x](D[x](x*x*x; y); 2) + D[z](z; 1)*5");
    }

    #[test]
    fn closed_subterms_fold() {
        certified("1/2 + 3*4");
        certified("D[x](f(x) + 2*3; 0)");
    }

    #[test]
    fn certificates_use_differentiation_axioms() {
        let p = certified("D[x](x + 1)");
        assert!(check_with(&p, Mode::Rtc).is_err());
        assert!(p.uses_non_rtc_axiom());
    }
}
