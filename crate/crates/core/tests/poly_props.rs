mod common;

use std::collections::BTreeMap;

use common::*;
use pdiff::poly::Poly;
use pdiff::term::{Rat, VarName};
use proptest::prelude::*;
use rand::Rng;

fn vars() -> Vec<VarName> {
    FREE.iter().map(|x| v(x)).collect()
}

fn polys(seed: u64) -> (TestRng, Poly, Poly, Poly) {
    let mut g = rng(seed);
    let vs = vars();
    let next = |g: &mut TestRng| {
        let d = g.gen_range(0..=3);
        random_poly(g, &vs, d, false)
    };
    let (a, b, c) = (next(&mut g), next(&mut g), next(&mut g));
    (g, a, b, c)
}

fn point(g: &mut TestRng) -> BTreeMap<VarName, Rat> {
    vars().into_iter().map(|x| (x, random_const(g))).collect()
}

proptest! {
    #[test]
    fn ring_laws(seed in any::<u64>()) {
        let (_, a, b, c) = polys(seed);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &Poly::zero(), a.clone());
        prop_assert_eq!(&a * &Poly::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn eval_is_a_homomorphism(seed in any::<u64>()) {
        let (mut g, a, b, _) = polys(seed);
        let pt = point(&mut g);
        let (ea, eb) = (a.eval(&pt).unwrap(), b.eval(&pt).unwrap());
        prop_assert_eq!((&a * &b).eval(&pt).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).eval(&pt).unwrap(), ea + eb);
    }

    #[test]
    fn leibniz(seed in any::<u64>(), i in 0usize..3) {
        let (_, a, b, _) = polys(seed);
        let x = v(FREE[i]);
        let lhs = (&a * &b).derive(&x);
        let rhs = &(&a.derive(&x) * &b) + &(&a * &b.derive(&x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn schwarz(seed in any::<u64>(), i in 0usize..3, j in 0usize..3) {
        let (_, a, _, _) = polys(seed);
        let (x, y) = (v(FREE[i]), v(FREE[j]));
        prop_assert_eq!(a.derive(&x).derive(&y), a.derive(&y).derive(&x));
    }

    #[test]
    fn chain_rule(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (x, t) = (v("x"), v("t"));
        let dp = g.gen_range(0..=4);
        let dq = g.gen_range(0..=3);
        let p = random_poly(&mut g, std::slice::from_ref(&x), dp, false);
        let q = random_poly(&mut g, std::slice::from_ref(&t), dq, false);
        let at_q: BTreeMap<VarName, Poly> = [(x.clone(), q.clone())].into();
        let lhs = p.subst(&at_q).derive(&t);
        let rhs = &p.derive(&x).subst(&at_q) * &q.derive(&t);
        prop_assert_eq!(lhs, rhs);
    }
}
