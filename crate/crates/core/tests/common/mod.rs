//! Seeded generators and hand-built equation families shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use pdiff::canon::{canonicalize, to_expr};
use pdiff::poly::{monomials_up_to, Poly};
use pdiff::semantics::{params, FnEnv, VarEnv};
use pdiff::term::{parse, subst_vars, Expr, FnVar, Rat, VarName};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn v(x: &str) -> VarName {
    VarName::new(x)
}

pub fn r(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub const FREE: [&str; 3] = ["x", "y", "z"];
const BINDERS: [&str; 5] = ["x", "y", "z", "u", "w"];

/// At most two function variables `f`, `g` of arity at most two.
pub fn random_sig(rng: &mut TestRng) -> Vec<FnVar> {
    let n = rng.gen_range(0..=2);
    ["f", "g"][..n]
        .iter()
        .map(|name| FnVar::new(name, rng.gen_range(0..=2)))
        .collect()
}

pub fn random_const(rng: &mut TestRng) -> Rat {
    let n = rng.gen_range(-3..=3);
    if rng.gen_bool(0.25) {
        r(n, rng.gen_range(2..=3))
    } else {
        r(n, 1)
    }
}

/// Splits `total` into `k` positive parts.
fn split(rng: &mut TestRng, total: usize, k: usize) -> Vec<usize> {
    let mut parts = vec![1; k];
    for _ in k..total {
        let i = rng.gen_range(0..k);
        parts[i] += 1;
    }
    parts
}

/// An expression with at most `size` nodes over the given function variables
/// and free variables.
pub fn random_expr(rng: &mut TestRng, size: usize, fns: &[FnVar], free: &[&str]) -> Expr {
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    gen(rng, size.max(1), fns, &mut scope)
}

fn leaf(rng: &mut TestRng, fns: &[FnVar], scope: &[String]) -> Expr {
    let nullary: Vec<&FnVar> = fns.iter().filter(|f| f.arity() == 0).collect();
    match rng.gen_range(0..6) {
        0..=2 if !scope.is_empty() => Expr::var(v(scope.choose(rng).unwrap())),
        3 if !nullary.is_empty() => {
            Expr::app((*nullary.choose(rng).unwrap()).clone(), vec![]).unwrap()
        }
        _ => Expr::constant(random_const(rng)),
    }
}

fn gen(rng: &mut TestRng, size: usize, fns: &[FnVar], scope: &mut Vec<String>) -> Expr {
    if size <= 1 {
        return leaf(rng, fns, scope);
    }
    let apps: Vec<&FnVar> = fns
        .iter()
        .filter(|f| f.arity() >= 1 && f.arity() < size)
        .collect();
    let mut kinds = vec![];
    if size >= 3 {
        kinds.extend([0, 1, 3, 3]);
    }
    if !apps.is_empty() {
        kinds.extend([2, 2]);
    }
    match kinds.choose(rng) {
        None => leaf(rng, fns, scope),
        Some(&k @ (0 | 1)) => {
            let parts = split(rng, size - 1, 2);
            let a = gen(rng, parts[0], fns, scope);
            let b = gen(rng, parts[1], fns, scope);
            if k == 0 {
                Expr::sum(a, b)
            } else {
                Expr::prod(a, b)
            }
        }
        Some(2) => {
            let f = (*apps.choose(rng).unwrap()).clone();
            let parts = split(rng, size - 1, f.arity());
            let args = parts.iter().map(|&n| gen(rng, n, fns, scope)).collect();
            Expr::app(f, args).unwrap()
        }
        Some(_) => {
            let parts = split(rng, size - 1, 2);
            let x = v(BINDERS.choose(rng).unwrap());
            scope.push(x.as_str().to_string());
            let body = gen(rng, parts[0], fns, scope);
            scope.pop();
            let at = gen(rng, parts[1], fns, scope);
            Expr::pdiff(&x, body, at)
        }
    }
}

/// A corpus entry: size at most 8, at most two function variables, arity at
/// most two.
pub fn corpus_expr(rng: &mut TestRng) -> Expr {
    let fns = random_sig(rng);
    let size = rng.gen_range(1..=8);
    random_expr(rng, size, &fns, &FREE)
}

pub fn corpus(seed: u64, n: usize) -> Vec<Expr> {
    let mut rng = rng(seed);
    (0..n).map(|_| corpus_expr(&mut rng)).collect()
}

/// Expressions without free variables or function variables.
pub fn closed_expr(rng: &mut TestRng, size: usize) -> Expr {
    random_expr(rng, size, &[], &[])
}

pub fn random_poly(rng: &mut TestRng, vars: &[VarName], degree: u32, natural: bool) -> Poly {
    let mut terms = vec![];
    for m in monomials_up_to(vars, degree) {
        if rng.gen_bool(0.5) {
            let c = if natural {
                r(rng.gen_range(0..=3), 1)
            } else {
                random_const(rng)
            };
            terms.push((m, c));
        }
    }
    Poly::from_terms(terms)
}

/// Polynomials of degree at most 3 for every function variable of `es`, and
/// rational values for `x`, `y`, `z` and every other free variable.
pub fn random_env(rng: &mut TestRng, es: &[&Expr]) -> (FnEnv, VarEnv) {
    let mut phi = FnEnv::new();
    let mut rho = VarEnv::new();
    for e in es {
        for f in e.fn_vars() {
            if phi.get(&f).is_none() {
                let q = random_poly(rng, &params(f.arity()), 3, false);
                phi.insert(f, q);
            }
        }
        for x in e.free_vars().into_iter().chain(FREE.iter().map(|s| v(s))) {
            if !rho.iter().any(|(y, _)| *y == x) {
                let c = random_const(rng);
                rho.set(x, c);
            }
        }
    }
    (phi, rho)
}

fn app(f: &str, args: Vec<Expr>) -> Expr {
    Expr::app(FnVar::new(f, args.len()), args).unwrap()
}

fn unary(g: &str, e: Expr) -> Expr {
    app(g, vec![e])
}

/// `D[x](f(g0(x), ..., g(n-1)(x))) = sum_i D[xi](f(..., xi, ...); gi(x)) * D[x](gi(x))`.
pub fn chain_rule(n: usize) -> (Expr, Expr) {
    let x = v("x");
    let gs: Vec<Expr> = (0..n)
        .map(|i| unary(&format!("g{i}"), Expr::var(x.clone())))
        .collect();
    let lhs = Expr::diff(&x, app("f", gs.clone()));
    let terms = (0..n)
        .map(|i| {
            let xi = v(&format!("x{i}"));
            let mut args = gs.clone();
            args[i] = Expr::var(xi.clone());
            let partial = Expr::pdiff(&xi, app("f", args), gs[i].clone());
            Expr::prod(partial, Expr::diff(&x, gs[i].clone()))
        })
        .collect();
    (lhs, Expr::sum_all(terms))
}

/// `f_m(e0, ...)` built directly: the derivative positions in `m`, first
/// outermost, applied to `args`.
pub fn fm(f: &str, m: &[usize], args: &[Expr]) -> Expr {
    let ps: Vec<VarName> = (0..args.len()).map(|i| v(&format!("p{i}"))).collect();
    let mut body = app(f, ps.iter().map(|p| Expr::var(p.clone())).collect());
    for &i in m.iter().rev() {
        body = Expr::diff(&ps[i], body);
    }
    let b: BTreeMap<VarName, Expr> = ps.into_iter().zip(args.iter().cloned()).collect();
    subst_vars(&body, &b)
}

/// `D[x](f_m(e0, ...)) = sum_i f_(i m)(e0, ...) * D[x](ei)`.
pub fn diffap(f: &str, m: &[usize], args: &[Expr]) -> (Expr, Expr) {
    let x = v("x");
    let lhs = Expr::diff(&x, fm(f, m, args));
    let terms = (0..args.len())
        .map(|i| {
            let mut im = vec![i];
            im.extend_from_slice(m);
            Expr::prod(fm(f, &im, args), Expr::diff(&x, args[i].clone()))
        })
        .collect();
    (lhs, Expr::sum_all(terms))
}

/// `D[x](e[es/ps]) = sum_i (D[pi](e; pi))[es/ps] * D[x](ei)`, for `x` free
/// in `e` only through the `ps`.
pub fn subdiff(e: &Expr, ps: &[&str], es: &[Expr]) -> (Expr, Expr) {
    let x = v("x");
    let b: BTreeMap<VarName, Expr> = ps.iter().map(|s| v(s)).zip(es.iter().cloned()).collect();
    let lhs = Expr::diff(&x, subst_vars(e, &b));
    let terms = ps
        .iter()
        .zip(es)
        .map(|(pi, ei)| {
            let d = Expr::diff(&v(pi), e.clone());
            Expr::prod(subst_vars(&d, &b), Expr::diff(&x, ei.clone()))
        })
        .collect();
    (lhs, Expr::sum_all(terms))
}

/// A pair provable by construction, drawn from several rule shapes.
pub fn equal_pair(rng: &mut TestRng) -> (Expr, Expr) {
    let fns = random_sig(rng);
    let e = |rng: &mut TestRng, n: usize| random_expr(rng, n, &fns, &FREE);
    let (x, y) = (v("x"), v("y"));
    match rng.gen_range(0..8) {
        0 => {
            let a = e(rng, 6);
            let c = to_expr(&canonicalize(&a));
            (a, c)
        }
        1 => {
            let (a, b) = (e(rng, 3), e(rng, 3));
            (Expr::sum(a.clone(), b.clone()), Expr::sum(b, a))
        }
        2 => {
            let (a, b, c) = (e(rng, 2), e(rng, 2), e(rng, 2));
            (
                Expr::prod(a.clone(), Expr::sum(b.clone(), c.clone())),
                Expr::sum(Expr::prod(a.clone(), b), Expr::prod(a, c)),
            )
        }
        3 => {
            let (a, b, t) = (e(rng, 3), e(rng, 3), e(rng, 2));
            (
                Expr::pdiff(&x, Expr::sum(a.clone(), b.clone()), t.clone()),
                Expr::sum(Expr::pdiff(&x, a, t.clone()), Expr::pdiff(&x, b, t)),
            )
        }
        4 => {
            let a = e(rng, 5);
            (
                Expr::diff(&x, Expr::diff(&y, a.clone())),
                Expr::diff(&y, Expr::diff(&x, a)),
            )
        }
        5 => {
            let (a, b, t) = (e(rng, 3), e(rng, 3), e(rng, 2));
            let at: BTreeMap<VarName, Expr> = [(x.clone(), t.clone())].into();
            (
                Expr::pdiff(&x, Expr::prod(a.clone(), b.clone()), t.clone()),
                Expr::sum(
                    Expr::prod(subst_vars(&b, &at), Expr::pdiff(&x, a.clone(), t.clone())),
                    Expr::prod(subst_vars(&a, &at), Expr::pdiff(&x, b, t)),
                ),
            )
        }
        6 => {
            let (a, t) = (e(rng, 4), e(rng, 2));
            (Expr::pdiff(&v("w"), a, t), Expr::zero())
        }
        _ => {
            let n = rng.gen_range(0..=3);
            let es: Vec<Expr> = (0..n).map(|_| e(rng, 2)).collect();
            let ps: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
            let names: Vec<&str> = ps.iter().map(String::as_str).collect();
            let body = random_expr(rng, 4, &[], &names);
            subdiff(&body, &names, &es)
        }
    }
}

/// Two independently drawn expressions over the same signature.
pub fn random_pair(rng: &mut TestRng) -> (Expr, Expr) {
    let fns = random_sig(rng);
    let (n, m) = (rng.gen_range(1..=7), rng.gen_range(1..=7));
    let a = random_expr(rng, n, &fns, &FREE);
    let b = random_expr(rng, m, &fns, &FREE);
    (a, b)
}

/// Deepest nesting of function applications.
pub fn app_depth(e: &Expr) -> usize {
    use pdiff::term::Node;
    match e.node() {
        Node::Const(_) | Node::Var(_) | Node::Bound(_) => 0,
        Node::Sum(a, b) | Node::Prod(a, b) | Node::PDiff(a, b) => app_depth(a).max(app_depth(b)),
        Node::App(_, args) => 1 + args.iter().map(app_depth).max().unwrap_or(0),
    }
}
