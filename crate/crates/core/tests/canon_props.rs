mod common;

use std::collections::BTreeMap;

use common::*;
use pdiff::canon::{canonicalize, decide, to_expr, Equiv, NamingScheme};
use pdiff::semantics::eval;
use pdiff::term::{parse, print, subst_fnvars, subst_vars, Abstract, Expr, FnVar, VarName};
use proptest::prelude::*;
use rand::Rng;

/// Plugs `hole` into a random one-hole context.
fn context(g: &mut TestRng, hole: Expr) -> Expr {
    let other = random_expr(g, 3, &[], &FREE);
    let h = FnVar::new("h", 2);
    match g.gen_range(0..6) {
        0 => Expr::sum(other, hole),
        1 => Expr::prod(hole, other),
        2 => Expr::app(h, vec![other, hole]).unwrap(),
        3 => Expr::diff(&v("x"), hole),
        4 => Expr::pdiff(&v("y"), hole, other),
        _ => Expr::pdiff(&v("x"), other, hole),
    }
}

fn sample(seed: u64) -> Expr {
    corpus_expr(&mut rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonicalize_is_sound(seed in any::<u64>()) {
        let mut g = rng(seed);
        let e = corpus_expr(&mut g);
        let c = to_expr(&canonicalize(&e));
        for _ in 0..5 {
            let (phi, rho) = random_env(&mut g, &[&e, &c]);
            prop_assert_eq!(eval(&e, &phi, &rho), eval(&c, &phi, &rho), "{} vs {}", e, c);
        }
    }

    #[test]
    fn canonicalize_keeps_free_and_function_variables(seed in any::<u64>()) {
        let e = sample(seed);
        let c = canonicalize(&e);
        prop_assert!(c.free_vars().is_subset(&e.free_vars()), "{e}");
        prop_assert!(c.fn_vars().is_subset(&e.fn_vars()), "{e}");
    }

    #[test]
    fn decide_is_reflexive_and_alpha_invariant(seed in any::<u64>()) {
        let e = sample(seed);
        let renamed = parse(&print(&e)).unwrap();
        prop_assert!(decide(&e, &e));
        prop_assert!(decide(&e, &renamed));
    }

    #[test]
    fn decide_is_symmetric_and_transitive(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = if g.gen_bool(0.5) { equal_pair(&mut g) } else { random_pair(&mut g) };
        let ab = decide(&a, &b);
        prop_assert_eq!(ab, decide(&b, &a));
        // the canonical form of b is provably equal to b
        let c = to_expr(&canonicalize(&b));
        prop_assert!(decide(&b, &c));
        prop_assert_eq!(ab, decide(&a, &c));
    }

    #[test]
    fn decide_is_a_congruence(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = equal_pair(&mut g);
        prop_assert!(decide(&a, &b), "{a} = {b}");
        let mut g2 = g.clone();
        let (ca, cb) = (context(&mut g, a), context(&mut g2, b));
        prop_assert!(decide(&ca, &cb), "{ca} = {cb}");
    }

    #[test]
    fn decide_is_stable_under_substitution(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = equal_pair(&mut g);
        let t = random_expr(&mut g, 3, &[], &FREE);
        let bv: BTreeMap<VarName, Expr> = [(v(FREE[g.gen_range(0..3)]), t)].into();
        let (a1, b1) = (subst_vars(&a, &bv), subst_vars(&b, &bv));
        prop_assert!(decide(&a1, &b1), "{a1} = {b1}");

        let mut fns = a.fn_vars();
        fns.extend(b.fn_vars());
        let bf: BTreeMap<FnVar, Abstract> = fns
            .into_iter()
            .map(|f| {
                let ps: Vec<VarName> = (0..f.arity()).map(|i| v(&format!("p{i}"))).collect();
                let mut scope: Vec<&str> = ps.iter().map(|p| p.as_str()).collect();
                scope.push("y");
                let body = random_expr(&mut g, 4, &[], &scope);
                (f, Abstract::new(ps, body).unwrap())
            })
            .collect();
        let (a2, b2) = (subst_fnvars(&a, &bf).unwrap(), subst_fnvars(&b, &bf).unwrap());
        prop_assert!(decide(&a2, &b2), "{a2} = {b2}");
    }

    #[test]
    fn equivalence_ignores_naming_scheme(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = if g.gen_bool(0.5) { equal_pair(&mut g) } else { random_pair(&mut g) };
        let (c, d) = (canonicalize(&a), canonicalize(&b));
        let default = Equiv::new().canon_equiv(&c, &d);
        let other = Equiv::with_scheme(NamingScheme("sep".into())).canon_equiv(&c, &d);
        prop_assert_eq!(default, other);
    }
}

#[test]
fn derived_rules_are_decided_equal() {
    for n in 0..=4 {
        let (l, r) = chain_rule(n);
        assert!(decide(&l, &r), "chain rule {n}");
    }
    let args = [p("x*y"), p("g(x)"), p("x + 1")];
    for (m, k) in [
        (vec![], 1),
        (vec![0], 2),
        (vec![1, 0], 2),
        (vec![2, 0, 2], 3),
    ] {
        let (l, r) = diffap("f", &m, &args[..k]);
        assert!(decide(&l, &r), "{l} = {r}");
    }
    for (a, b) in [
        ("D[x](x + y)", "1"),
        ("D[x](y)", "0"),
        ("D[x](x*x; 3)", "6"),
        ("D[x](D[y](f(x, y)))", "D[y](D[x](f(x, y)))"),
        ("D[x](f(x)*g(x))", "D[x](f(x))*g(x) + f(x)*D[x](g(x))"),
    ] {
        assert!(decide(&p(a), &p(b)), "{a} = {b}");
    }
    assert!(!decide(&p("D[x](f(x))"), &p("f(x)")));
}
