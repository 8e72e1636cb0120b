use std::collections::{BTreeMap, BTreeSet};

use num::BigUint;

use super::construct::Counterexample;
use crate::poly::{monomials_up_to, Monomial, Poly};
use crate::semantics::{eval_sym, params, FnEnv};
use crate::term::{Expr, FnVar, Rat, VarName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no counterexample within {0} configurations")]
pub struct BudgetExhausted(pub u64);

/// Brute-force search for a natural-number counterexample.
///
/// Level `L` covers every assignment of polynomials of degree at most `L`
/// with coefficients at most `L` and variable values at most `L`; levels are
/// searched in increasing order, skipping what a lower level already covered.
/// Each pair of function assignment and point counts once against `budget`.
pub fn enum_counterexample(
    e: &Expr,
    e2: &Expr,
    budget: u64,
) -> Result<Counterexample, BudgetExhausted> {
    let fns: Vec<FnVar> = e
        .fn_vars()
        .into_iter()
        .chain(e2.fn_vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let vars: Vec<VarName> = e
        .free_vars()
        .into_iter()
        .chain(e2.free_vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut spent = 0u64;
    for level in 0u32.. {
        if level > 0 && fns.is_empty() && vars.is_empty() {
            // a single configuration, already tried
            return Err(BudgetExhausted(budget));
        }
        let monos: Vec<Vec<Monomial>> = fns
            .iter()
            .map(|f| monomials_up_to(&params(f.arity()), level))
            .collect();
        let slots: usize = monos.iter().map(Vec::len).sum();
        let mut coeffs = vec![0u32; slots];
        loop {
            let coeff_old = level > 0
                && coeffs.iter().all(|&c| c < level)
                && monos
                    .iter()
                    .flatten()
                    .zip(&coeffs)
                    .all(|(m, &c)| c == 0 || m.degree() < level);
            let phi = build_env(&fns, &monos, &coeffs);
            let sides = (eval_sym(e, &phi), eval_sym(e2, &phi));
            let (l, r) = (sides.0.expect("all bound"), sides.1.expect("all bound"));
            if l != r {
                let mut point = vec![0u32; vars.len()];
                loop {
                    let old = coeff_old && point.iter().all(|&v| v < level);
                    if !old {
                        if spent >= budget {
                            return Err(BudgetExhausted(budget));
                        }
                        spent += 1;
                        let at: BTreeMap<VarName, Rat> = vars
                            .iter()
                            .cloned()
                            .zip(point.iter().map(|&v| Rat::from_integer(v.into())))
                            .collect();
                        let lv = l.eval(&at).expect("point covers free variables");
                        let rv = r.eval(&at).expect("point covers free variables");
                        if lv != rv {
                            return Ok(Counterexample {
                                fn_assign: phi,
                                var_assign: vars
                                    .iter()
                                    .cloned()
                                    .zip(point.iter().map(|&v| BigUint::from(v)))
                                    .collect(),
                                lhs: lv,
                                rhs: rv,
                            });
                        }
                    }
                    if !step(&mut point, level) {
                        break;
                    }
                }
            } else {
                // every point is a configuration; count them without evaluating
                let points = (u64::from(level) + 1).saturating_pow(vars.len() as u32);
                let old_points = if coeff_old {
                    u64::from(level).saturating_pow(vars.len() as u32)
                } else {
                    0
                };
                spent = spent.saturating_add(points - old_points);
                if spent > budget {
                    return Err(BudgetExhausted(budget));
                }
            }
            if !step(&mut coeffs, level) {
                break;
            }
        }
    }
    unreachable!()
}

/// Advances an odometer with digits in `0..=max`; false after the last value.
fn step(digits: &mut [u32], max: u32) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < max {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

fn build_env(fns: &[FnVar], monos: &[Vec<Monomial>], coeffs: &[u32]) -> FnEnv {
    let mut env = FnEnv::new();
    let mut k = 0;
    for (f, ms) in fns.iter().zip(monos) {
        let terms = ms.iter().map(|m| {
            let c = Rat::from_integer(coeffs[k].into());
            k += 1;
            (m.clone(), c)
        });
        env.insert(f.clone(), Poly::from_terms(terms.collect::<Vec<_>>()));
    }
    env
}
