mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use pdiff::canon::{canon_equiv, canonicalize, decide, to_expr, DerivIndex};
use pdiff::semantics::{eval, params};
use pdiff::separate::{
    build_separation, counterexample, enum_counterexample, hermite_solve, satisfies, HermiteProblem,
};
use pdiff::term::{Rat, VarName};
use proptest::prelude::*;
use rand::Rng;

/// A consistent problem: the conditions are read off a random polynomial.
fn hermite_problem(g: &mut TestRng) -> HermiteProblem {
    let dim = g.gen_range(1..=3);
    let ps = params(dim);
    let source = random_poly(g, &ps, 4, false);
    let mut prob = HermiteProblem::new(dim);
    let mut seen = BTreeSet::new();
    for _ in 0..g.gen_range(1..=4) {
        let node: Vec<Rat> = (0..dim).map(|_| random_const(g)).collect();
        if !seen.insert(node.clone()) {
            continue;
        }
        let point: BTreeMap<VarName, Rat> = ps.iter().cloned().zip(node.iter().cloned()).collect();
        let mut conds = vec![];
        for _ in 0..g.gen_range(1..=4) {
            let order = g.gen_range(0..=2);
            let m = DerivIndex::from_seq((0..order).map(|_| g.gen_range(0..dim)));
            if conds.iter().any(|(k, _)| *k == m) {
                continue;
            }
            let d = m
                .positions()
                .iter()
                .fold(source.clone(), |q, &i| q.derive(&ps[i]));
            conds.push((m, d.eval(&point).unwrap()));
        }
        prob.add_node(node, conds);
    }
    prob
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hermite_interpolant_meets_every_condition(seed in any::<u64>()) {
        let prob = hermite_problem(&mut rng(seed));
        let h = hermite_solve(&prob).unwrap();
        prop_assert!(satisfies(&h, &prob));
        prop_assert!(h.degree() <= prob.degree_bound(), "{} > {}", h.degree(), prob.degree_bound());
    }

    #[test]
    fn separation_reproduces_its_values(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = random_pair(&mut g);
        let cs: BTreeSet<_> = [canonicalize(&a), canonicalize(&b)].into();
        let sep = build_separation(&cs).unwrap();
        for (c, r) in &sep.values {
            prop_assert_eq!(&eval(&to_expr(c), &sep.fn_env, &sep.var_env), r, "{}", c);
        }
        for (c, r) in &sep.values {
            for (d, s) in &sep.values {
                prop_assert!(r != s || canon_equiv(c, d), "{c} and {d} share {r}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn counterexamples_exist_exactly_for_non_theorems(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = if g.gen_bool(0.5) { equal_pair(&mut g) } else { random_pair(&mut g) };
        match counterexample(&a, &b) {
            Some(cx) => {
                prop_assert!(!decide(&a, &b));
                prop_assert!(cx.validates(&a, &b), "{a} = {b}: {cx:?}");
            }
            None => prop_assert!(decide(&a, &b), "{a} = {b}"),
        }
    }

    #[test]
    fn enumeration_agrees_with_decide(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = if g.gen_bool(0.5) { equal_pair(&mut g) } else { random_pair(&mut g) };
        let equal = decide(&a, &b);
        if let Ok(cx) = enum_counterexample(&a, &b, 400) {
            prop_assert!(!equal, "witness for a theorem {a} = {b}");
            prop_assert!(cx.validates(&a, &b));
        }
    }
}
