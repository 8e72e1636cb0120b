use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{AxiomId, Proof, Rule};
use crate::term::{check_arities, print, subst_fnvars, subst_vars, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Full,
    /// Only ring axioms, constant tables and commutativity of partials.
    Rtc,
}

/// Position of a node as the premise indices followed from the root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodePath(pub Vec<usize>);

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "root/{}", parts.join("/"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("{rule} at {path}: {msg}")]
    Rule {
        path: NodePath,
        rule: &'static str,
        msg: String,
    },
    #[error("axiom {axiom} at {path} is not allowed in rtc mode")]
    Rtc { path: NodePath, axiom: &'static str },
}

/// The equation proved by `p` under every axiom.
pub fn check(p: &Proof) -> Result<(Expr, Expr), CheckError> {
    check_with(p, Mode::Full)
}

pub fn check_with(p: &Proof, mode: Mode) -> Result<(Expr, Expr), CheckError> {
    let mut checker = Checker {
        mode,
        memo: HashMap::new(),
        path: Vec::new(),
    };
    checker.go(p)
}

struct Checker {
    mode: Mode,
    memo: HashMap<*const Rule, (Expr, Expr)>,
    path: Vec<usize>,
}

impl Checker {
    fn go(&mut self, p: &Proof) -> Result<(Expr, Expr), CheckError> {
        let key = Arc::as_ptr(&p.0);
        if let Some(done) = self.memo.get(&key) {
            return Ok(done.clone());
        }
        if let Rule::Axiom(id) = p.rule() {
            if self.mode == Mode::Rtc && !id.is_rtc() {
                return Err(CheckError::Rtc {
                    path: NodePath(self.path.clone()),
                    axiom: id.name(),
                });
            }
        }
        let mut premises = Vec::new();
        for (i, q) in p.premises().into_iter().enumerate() {
            self.path.push(i);
            let r = self.go(q);
            self.path.pop();
            premises.push(r?);
        }
        let out = conclude(p.rule(), &premises).map_err(|msg| CheckError::Rule {
            path: NodePath(self.path.clone()),
            rule: rule_name(p.rule()),
            msg,
        })?;
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

pub(crate) fn rule_name(r: &Rule) -> &'static str {
    match r {
        Rule::Axiom(_) => "axiom",
        Rule::Refl(_) => "refl",
        Rule::Sym(_) => "sym",
        Rule::Trans(..) => "trans",
        Rule::CongSum(..) => "cong-sum",
        Rule::CongProd(..) => "cong-prod",
        Rule::CongApp(..) => "cong-app",
        Rule::CongPDiff(..) => "cong-pdiff",
        Rule::SubstVar(..) => "subst-var",
        Rule::SubstFn(..) => "subst-fn",
    }
}

/// The conclusion of one rule from the conclusions of its premises, in order.
pub(crate) fn conclude(rule: &Rule, premises: &[(Expr, Expr)]) -> Result<(Expr, Expr), String> {
    let (l, r) = match rule {
        Rule::Axiom(id) => id.statement().ok_or_else(|| match id {
            AxiomId::ConstAdd(a, b, c) | AxiomId::ConstMul(a, b, c) => {
                format!("wrong arithmetic in {} {a} {b} {c}", id.name())
            }
            _ => unreachable!("only table axioms can be false"),
        })?,
        Rule::Refl(e) => (e.clone(), e.clone()),
        Rule::Sym(_) => (premises[0].1.clone(), premises[0].0.clone()),
        Rule::Trans(..) => {
            let ((a, b), (c, d)) = (&premises[0], &premises[1]);
            if b != c {
                return Err(format!(
                    "middle terms differ: `{}` and `{}`",
                    print(b),
                    print(c)
                ));
            }
            (a.clone(), d.clone())
        }
        Rule::CongSum(..) => (
            Expr::sum(premises[0].0.clone(), premises[1].0.clone()),
            Expr::sum(premises[0].1.clone(), premises[1].1.clone()),
        ),
        Rule::CongProd(..) => (
            Expr::prod(premises[0].0.clone(), premises[1].0.clone()),
            Expr::prod(premises[0].1.clone(), premises[1].1.clone()),
        ),
        Rule::CongApp(f, _) => {
            let ls = premises.iter().map(|(l, _)| l.clone()).collect();
            let rs = premises.iter().map(|(_, r)| r.clone()).collect();
            let l = Expr::app(f.clone(), ls).map_err(|e| e.to_string())?;
            let r = Expr::app(f.clone(), rs).map_err(|e| e.to_string())?;
            (l, r)
        }
        Rule::CongPDiff(x, ..) => {
            let ((b0, b1), (a0, a1)) = (&premises[0], &premises[1]);
            (
                Expr::pdiff(x, b0.clone(), a0.clone()),
                Expr::pdiff(x, b1.clone(), a1.clone()),
            )
        }
        Rule::SubstVar(_, b) => (subst_vars(&premises[0].0, b), subst_vars(&premises[0].1, b)),
        Rule::SubstFn(_, b) => (
            subst_fnvars(&premises[0].0, b).map_err(|e| e.to_string())?,
            subst_fnvars(&premises[0].1, b).map_err(|e| e.to_string())?,
        ),
    };
    check_arities([&l, &r]).map_err(|e| e.to_string())?;
    Ok((l, r))
}
