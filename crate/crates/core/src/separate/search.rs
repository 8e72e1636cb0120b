use std::collections::{BTreeMap, BTreeSet, HashSet};

use num::BigUint;

use crate::poly::Poly;
use crate::term::{Rat, VarName};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("polynomials {0} and {1} are equal and cannot be separated")]
pub struct NotSeparable(pub usize, pub usize);

/// A natural point at which the polynomials take pairwise distinct values.
///
/// Variables are fixed one at a time in alphabetical order, each to the
/// smallest natural number that keeps the partially evaluated polynomials
/// pairwise different. A nonzero difference vanishes identically for only
/// finitely many values of one variable, so every step succeeds and no step
/// is ever undone.
pub fn separate_polys(ps: &[Poly]) -> Result<BTreeMap<VarName, BigUint>, NotSeparable> {
    for i in 0..ps.len() {
        if let Some(j) = (0..i).find(|&j| ps[j] == ps[i]) {
            return Err(NotSeparable(j, i));
        }
    }
    let vars: BTreeSet<VarName> = ps.iter().flat_map(Poly::vars).collect();
    let mut current = ps.to_vec();
    let mut point = BTreeMap::new();
    for x in vars {
        let (v, next) = (0u64..)
            .find_map(|v| {
                let at: BTreeMap<VarName, Rat> = [(x.clone(), Rat::from_integer(v.into()))].into();
                let next: Vec<Poly> = current.iter().map(|p| p.eval_partial(&at)).collect();
                pairwise_distinct(&next).then_some((v, next))
            })
            .expect("a nonzero polynomial has finitely many roots");
        current = next;
        point.insert(x, BigUint::from(v));
    }
    Ok(point)
}

fn pairwise_distinct(ps: &[Poly]) -> bool {
    let mut seen = HashSet::with_capacity(ps.len());
    ps.iter().all(|p| seen.insert(p))
}
