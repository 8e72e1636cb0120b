use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{BigUint, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::enum_counterexample;
use super::hermite::{hermite_solve, HermiteError, HermiteProblem};
use super::search::separate_polys;
use crate::canon::{
    canonicalize, decide, immediate_atoms, node_poly, saturate, Atom, Canon, DerivIndex, Equiv,
};
use crate::poly::Poly;
use crate::semantics::{eval, eval_sym, FnEnv, VarEnv};
use crate::term::{Expr, FnVar, Fresh, Rat, VarName};

/// Environments separating a saturated set, with the value each element
/// takes under them.
#[derive(Debug, Clone)]
pub struct Separation {
    pub fn_env: FnEnv,
    pub var_env: VarEnv,
    pub values: BTreeMap<Canon, Rat>,
}

/// Builds environments under which inequivalent members of `cs`, and of its
/// saturation, take distinct values.
///
/// Each equivalence class of atoms gets a separation variable, the node
/// polynomials are separated at a natural point, and every function variable
/// is interpolated so that each of its atoms takes the value chosen for it.
pub fn build_separation(cs: &BTreeSet<Canon>) -> Result<Separation, HermiteError> {
    let sat = saturate(cs);
    let atoms: BTreeSet<Atom> = sat.iter().flat_map(immediate_atoms).collect();
    let w = Equiv::new().sep_assign(&atoms);

    let polys: Vec<(Canon, Poly)> = sat
        .iter()
        .map(|c| {
            (
                c.clone(),
                node_poly(c, &w).expect("saturated set covers its atoms"),
            )
        })
        .collect();
    let mut distinct: Vec<Poly> = Vec::new();
    let mut index: HashMap<Poly, usize> = HashMap::new();
    for (_, p) in &polys {
        if !index.contains_key(p) {
            index.insert(p.clone(), distinct.len());
            distinct.push(p.clone());
        }
    }
    let point: BTreeMap<VarName, Rat> = separate_polys(&distinct)
        .expect("distinct polynomials")
        .into_iter()
        .map(|(x, v)| (x, Rat::from_integer(v.into())))
        .collect();
    let values: BTreeMap<Canon, Rat> = polys
        .into_iter()
        .map(|(c, p)| {
            let v = p
                .eval(&point)
                .expect("point covers every separation variable");
            (c, v)
        })
        .collect();
    let value = |c: &Canon| values[c].clone();

    let mut var_env = VarEnv::new();
    let mut problems: BTreeMap<FnVar, BTreeMap<Vec<Rat>, Vec<(DerivIndex, Rat)>>> = BTreeMap::new();
    for a in &atoms {
        let r = value(&Canon::atom(a.clone()));
        match a {
            Atom::Var(x) => var_env.set(x.clone(), r),
            Atom::FApp { f, m, args } => {
                let node: Vec<Rat> = args.iter().map(value).collect();
                problems
                    .entry(f.clone())
                    .or_default()
                    .entry(node)
                    .or_default()
                    .push((m.clone(), r));
            }
        }
    }
    let mut fn_env = FnEnv::new();
    for (f, nodes) in problems {
        let mut prob = HermiteProblem::new(f.arity());
        for (node, conds) in nodes {
            prob.add_node(node, conds);
        }
        fn_env.insert(f, hermite_solve(&prob)?);
    }
    Ok(Separation {
        fn_env,
        var_env,
        values,
    })
}

/// Natural-number environments under which two expressions differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub fn_assign: FnEnv,
    pub var_assign: BTreeMap<VarName, BigUint>,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl Counterexample {
    pub fn var_env(&self) -> VarEnv {
        self.var_assign
            .iter()
            .map(|(x, v)| (x.clone(), Rat::from_integer(v.clone().into())))
            .collect()
    }

    /// Re-evaluates both sides and checks the recorded values, that they
    /// differ, and that all data is natural.
    pub fn validates(&self, e: &Expr, e2: &Expr) -> bool {
        let rho = self.var_env();
        let l = eval(e, &self.fn_assign, &rho);
        let r = eval(e2, &self.fn_assign, &rho);
        l == self.lhs
            && r == self.rhs
            && l != r
            && self.fn_assign.iter().all(|(_, p)| p.is_natural())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("both sides evaluate to {0}")]
pub struct NotSeparated(pub Rat);

fn is_natural(r: &Rat) -> bool {
    r.is_integer() && !r.is_negative()
}

/// Turns separating environments into natural-number ones.
///
/// Every coefficient that is not a natural number is replaced by a fresh
/// variable; both sides are then evaluated symbolically, and a natural point
/// over those variables and the term variables separating the two results is
/// searched for. Environments that are already natural are kept.
pub fn naturalize(
    e: &Expr,
    e2: &Expr,
    phi: &FnEnv,
    rho: &VarEnv,
) -> Result<Counterexample, NotSeparated> {
    let lhs = eval(e, phi, rho);
    let rhs = eval(e2, phi, rho);
    if lhs == rhs {
        return Err(NotSeparated(lhs));
    }
    let fns: BTreeSet<FnVar> = e.fn_vars().into_iter().chain(e2.fn_vars()).collect();
    let vars: BTreeSet<VarName> = e.free_vars().into_iter().chain(e2.free_vars()).collect();

    let natural = fns.iter().all(|f| phi.get(f).is_none_or(Poly::is_natural))
        && vars.iter().all(|x| is_natural(&rho.get(x)));
    if natural {
        let mut fn_assign = FnEnv::new();
        for f in &fns {
            fn_assign.insert(f.clone(), phi.get(f).cloned().unwrap_or_else(Poly::zero));
        }
        let var_assign = vars
            .iter()
            .map(|x| {
                (
                    x.clone(),
                    rho.get(x).to_integer().to_biguint().expect("natural"),
                )
            })
            .collect();
        return Ok(Counterexample {
            fn_assign,
            var_assign,
            lhs,
            rhs,
        });
    }

    let mut fresh = Fresh::new("y");
    fresh.avoid_expr(e);
    fresh.avoid_expr(e2);
    phi.vars().iter().for_each(|x| fresh.avoid(x.as_str()));
    let mut abstracted = FnEnv::new();
    for f in &fns {
        let p = phi.get(f).cloned().unwrap_or_else(Poly::zero);
        let mut q = Poly::zero();
        for (m, c) in p.terms() {
            let term = if is_natural(c) {
                Poly::monomial(m.clone(), c.clone())
            } else {
                &Poly::var(fresh.var()) * &Poly::monomial(m.clone(), Rat::from_integer(1.into()))
            };
            q = &q + &term;
        }
        abstracted.insert(f.clone(), q);
    }
    let coeff_vars: Vec<VarName> = abstracted
        .iter()
        .flat_map(|(f, q)| q.vars().into_iter().filter(|x| !is_param(x, f.arity())))
        .collect();
    if let Some(cx) = probe(e, e2, &abstracted, &coeff_vars, &vars) {
        return Ok(cx);
    }
    let de = eval_sym(e, &abstracted).expect("every function variable bound");
    let de2 = eval_sym(e2, &abstracted).expect("every function variable bound");
    let point = separate_polys(&[de, de2]).expect("the two sides differ at the original data");
    let at: BTreeMap<VarName, Rat> = point
        .iter()
        .map(|(x, v)| (x.clone(), Rat::from_integer(v.clone().into())))
        .collect();

    let mut fn_assign = FnEnv::new();
    for (f, q) in abstracted.iter() {
        let coeffs: BTreeMap<VarName, Rat> = q
            .vars()
            .into_iter()
            .filter(|x| !is_param(x, f.arity()))
            .map(|x| {
                let v = at
                    .get(&x)
                    .cloned()
                    .unwrap_or_else(|| Rat::from_integer(0.into()));
                (x, v)
            })
            .collect();
        fn_assign.insert(f.clone(), q.eval_partial(&coeffs));
    }
    let var_assign: BTreeMap<VarName, BigUint> = vars
        .iter()
        .map(|x| (x.clone(), point.get(x).cloned().unwrap_or_default()))
        .collect();
    let cx = Counterexample {
        lhs: Rat::from_integer(0.into()),
        rhs: Rat::from_integer(0.into()),
        fn_assign,
        var_assign,
    };
    let rho_n = cx.var_env();
    let lhs = eval(e, &cx.fn_assign, &rho_n);
    let rhs = eval(e2, &cx.fn_assign, &rho_n);
    debug_assert_ne!(lhs, rhs);
    Ok(Counterexample { lhs, rhs, ..cx })
}

/// Tries seeded random natural points for the abstracted coefficients and the
/// term variables, evaluating numerically. Symbolic evaluation with unknown
/// coefficients grows exponentially with nested applications, while a
/// nonzero difference vanishes at a random point of a large enough box only
/// with small probability. Boxes grow from `0..=2` to `0..=4096`.
fn probe(
    e: &Expr,
    e2: &Expr,
    abstracted: &FnEnv,
    coeff_vars: &[VarName],
    vars: &BTreeSet<VarName>,
) -> Option<Counterexample> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for round in 0..48u32 {
        let bound = 2u64 << (round / 4);
        let mut draw = || BigUint::from(rng.gen_range(0..=bound));
        let coeffs: BTreeMap<VarName, Rat> = coeff_vars
            .iter()
            .map(|y| (y.clone(), Rat::from_integer(draw().into())))
            .collect();
        let var_assign: BTreeMap<VarName, BigUint> =
            vars.iter().map(|x| (x.clone(), draw())).collect();
        let mut fn_assign = FnEnv::new();
        for (f, q) in abstracted.iter() {
            fn_assign.insert(f.clone(), q.eval_partial(&coeffs));
        }
        let cx = Counterexample {
            fn_assign,
            var_assign,
            lhs: Rat::zero(),
            rhs: Rat::zero(),
        };
        let rho = cx.var_env();
        let (lhs, rhs) = (eval(e, &cx.fn_assign, &rho), eval(e2, &cx.fn_assign, &rho));
        if lhs != rhs {
            return Some(Counterexample { lhs, rhs, ..cx });
        }
    }
    None
}

fn is_param(x: &VarName, arity: usize) -> bool {
    crate::semantics::params(arity).contains(x)
}

/// A natural-number counterexample to `e = e2`, or `None` when the equation
/// is provable.
pub fn counterexample(e: &Expr, e2: &Expr) -> Option<Counterexample> {
    if decide(e, e2) {
        return None;
    }
    let c1 = canonicalize(e);
    let c2 = canonicalize(e2);
    let sep =
        build_separation(&[c1, c2].into()).unwrap_or_else(|err| panic!("separation failed: {err}"));
    let cx = naturalize(e, e2, &sep.fn_env, &sep.var_env)
        .unwrap_or_else(|err| panic!("separating environments do not separate: {err}"));
    Some(cx)
}

/// Like [`counterexample`], but first tries a brute-force search limited to
/// `budget` configurations, which tends to find smaller witnesses.
pub fn counterexample_preferring_small(e: &Expr, e2: &Expr, budget: u64) -> Option<Counterexample> {
    if decide(e, e2) {
        return None;
    }
    match enum_counterexample(e, e2, budget) {
        Ok(cx) => Some(cx),
        Err(_) => counterexample(e, e2),
    }
}
