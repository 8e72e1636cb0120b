use std::collections::BTreeSet;
use std::fmt::Write;

use super::{Expr, Node, Rat};

/// Prints `e` in the concrete syntax accepted by [`super::parse`].
///
/// The binder at nesting depth `k` is named by the `k`-th entry of `v0, v1,
/// ...` after skipping names free in `e`, so α-equivalent inputs print
/// identically. Subtraction is never printed; `a + -1*b` stays as it is.
pub fn print(e: &Expr) -> String {
    let free: BTreeSet<String> = e
        .free_vars()
        .into_iter()
        .map(|v| v.as_str().to_string())
        .collect();
    let mut p = Printer {
        free,
        names: Vec::new(),
        next: 0,
        scope: Vec::new(),
        out: String::new(),
    };
    p.expr(e);
    p.out
}

pub(crate) fn print_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

struct Printer {
    free: BTreeSet<String>,
    /// Binder names by depth, extended on demand.
    names: Vec<String>,
    next: usize,
    scope: Vec<usize>,
    out: String,
}

impl Printer {
    fn binder_name(&mut self, depth: usize) -> String {
        while self.names.len() <= depth {
            let candidate = format!("v{}", self.next);
            self.next += 1;
            if !self.free.contains(&candidate) {
                self.names.push(candidate);
            }
        }
        self.names[depth].clone()
    }

    fn expr(&mut self, e: &Expr) {
        match e.node() {
            Node::Sum(a, b) => {
                self.expr(a);
                self.out.push_str(" + ");
                self.wrap(b, matches!(b.node(), Node::Sum(..)));
            }
            _ => self.term(e),
        }
    }

    fn term(&mut self, e: &Expr) {
        match e.node() {
            Node::Prod(a, b) => {
                self.wrap(a, matches!(a.node(), Node::Sum(..)));
                self.out.push('*');
                self.wrap(b, matches!(b.node(), Node::Sum(..) | Node::Prod(..)));
            }
            Node::Sum(..) => self.wrap(e, true),
            _ => self.factor(e),
        }
    }

    fn wrap(&mut self, e: &Expr, parens: bool) {
        if parens {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        } else {
            self.term(e);
        }
    }

    fn factor(&mut self, e: &Expr) {
        match e.node() {
            Node::Const(r) => self.out.push_str(&print_rat(r)),
            Node::Var(x) => self.out.push_str(x.as_str()),
            Node::Bound(i) => {
                let depth = self.scope[self.scope.len() - 1 - i];
                let name = self.binder_name(depth);
                self.out.push_str(&name);
            }
            Node::App(f, args) => {
                let _ = write!(self.out, "{}(", f.name());
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.expr(a);
                }
                self.out.push(')');
            }
            Node::PDiff(body, at) => {
                let depth = self.scope.len();
                let name = self.binder_name(depth);
                let _ = write!(self.out, "D[{name}](");
                self.scope.push(depth);
                self.expr(body);
                self.scope.pop();
                self.out.push_str("; ");
                self.expr(at);
                self.out.push(')');
            }
            Node::Sum(..) | Node::Prod(..) => self.wrap(e, true),
        }
    }
}
