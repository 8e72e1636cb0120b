use std::collections::BTreeMap;

use super::{Abstract, ArityError, Expr, FnVar, Fresh, Node, VarName};

/// Simultaneous, capture-avoiding substitution of expressions for free
/// variables.
///
/// Binders are nameless, so a free variable of a replacement can never be
/// captured; no renaming is needed.
pub fn subst_vars(e: &Expr, bindings: &BTreeMap<VarName, Expr>) -> Expr {
    if bindings.is_empty() {
        return e.clone();
    }
    go_vars(e, bindings)
}

fn go_vars(e: &Expr, b: &BTreeMap<VarName, Expr>) -> Expr {
    match e.node() {
        Node::Var(x) => b.get(x).cloned().unwrap_or_else(|| e.clone()),
        Node::Const(_) | Node::Bound(_) => e.clone(),
        Node::Sum(l, r) => Expr::sum(go_vars(l, b), go_vars(r, b)),
        Node::Prod(l, r) => Expr::prod(go_vars(l, b), go_vars(r, b)),
        Node::App(f, args) => Expr::from_node(Node::App(
            f.clone(),
            args.iter().map(|a| go_vars(a, b)).collect(),
        )),
        Node::PDiff(body, at) => Expr::from_node(Node::PDiff(go_vars(body, b), go_vars(at, b))),
    }
}

/// Simultaneous substitution of abstracts for function variables.
///
/// An application `f(e0, ..., en)` with `f` bound to `(x0, ..., xn). body`
/// becomes `body[e0'/x0, ..., en'/xn]`, where the `ei'` are the already
/// substituted arguments. Binders are opened with names fresh for the whole
/// operation, so neither the abstract bodies nor the arguments get captured.
pub fn subst_fnvars(e: &Expr, bindings: &BTreeMap<FnVar, Abstract>) -> Result<Expr, ArityError> {
    for (f, abs) in bindings {
        if abs.arity() != f.arity() {
            return Err(ArityError {
                fnvar: f.clone(),
                given: abs.arity(),
            });
        }
    }
    if bindings.is_empty() {
        return Ok(e.clone());
    }
    let mut fresh = Fresh::new("b");
    fresh.avoid_expr(e);
    for abs in bindings.values() {
        fresh.avoid_expr(abs.body());
        abs.params().iter().for_each(|p| fresh.avoid(p.as_str()));
    }
    Ok(go_fns(e, bindings, &mut fresh))
}

fn go_fns(e: &Expr, b: &BTreeMap<FnVar, Abstract>, fresh: &mut Fresh) -> Expr {
    match e.node() {
        Node::Const(_) | Node::Var(_) | Node::Bound(_) => e.clone(),
        Node::Sum(l, r) => Expr::sum(go_fns(l, b, fresh), go_fns(r, b, fresh)),
        Node::Prod(l, r) => Expr::prod(go_fns(l, b, fresh), go_fns(r, b, fresh)),
        Node::App(f, args) => {
            let args: Vec<Expr> = args.iter().map(|a| go_fns(a, b, fresh)).collect();
            match b.get(f) {
                Some(abs) => abs.apply(&args),
                None => Expr::from_node(Node::App(f.clone(), args)),
            }
        }
        Node::PDiff(_, at) => {
            let z = fresh.var();
            let body = e.open_body(&z).expect("pdiff node");
            Expr::pdiff(&z, go_fns(&body, b, fresh), go_fns(at, b, fresh))
        }
    }
}
