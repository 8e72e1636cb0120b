use std::collections::BTreeMap;

use num::{One, Zero};

use super::linalg;
use crate::canon::DerivIndex;
use crate::poly::{monomials_up_to, Monomial, Poly};
use crate::semantics::params;
use crate::term::Rat;

/// Values of a function and its partial derivatives at finitely many nodes of
/// `Q^dim`. The interpolant is a polynomial in `x0, ..., x(dim-1)`.
#[derive(Debug, Clone, Default)]
pub struct HermiteProblem {
    pub dim: usize,
    pub nodes: Vec<Vec<Rat>>,
    /// Per node: derivative index and prescribed value.
    pub conditions: Vec<Vec<(DerivIndex, Rat)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HermiteError {
    #[error("node {0} has the wrong dimension")]
    Dimension(usize),
    #[error("nodes {0} and {1} coincide")]
    DuplicateNode(usize, usize),
    #[error("derivative position out of range at node {0}")]
    BadIndex(usize),
    #[error("conflicting values for the same derivative at node {0}")]
    Inconsistent(usize),
    #[error("no interpolant of degree at most {0}; the problem was consistent, so this is a bug")]
    Infeasible(i64),
}

impl HermiteProblem {
    pub fn new(dim: usize) -> Self {
        HermiteProblem {
            dim,
            ..Default::default()
        }
    }

    pub fn add_node(&mut self, node: Vec<Rat>, conditions: Vec<(DerivIndex, Rat)>) {
        self.nodes.push(node);
        self.conditions.push(conditions);
    }

    /// `k (max|m| + 1) - 1` for `k` nodes; `-1` without nodes.
    pub fn degree_bound(&self) -> i64 {
        let k = self.nodes.len() as i64;
        let order = self
            .conditions
            .iter()
            .flatten()
            .map(|(m, _)| m.order())
            .max()
            .unwrap_or(0) as i64;
        k * (order + 1) - 1
    }

    /// Checks the shape and consistency conditions and merges repeated
    /// conditions.
    fn validated(&self) -> Result<Vec<BTreeMap<DerivIndex, Rat>>, HermiteError> {
        for (i, node) in self.nodes.iter().enumerate() {
            if node.len() != self.dim {
                return Err(HermiteError::Dimension(i));
            }
            if let Some(j) = self.nodes[..i].iter().position(|n| n == node) {
                return Err(HermiteError::DuplicateNode(j, i));
            }
        }
        let mut merged = Vec::with_capacity(self.nodes.len());
        for (i, conds) in self.conditions.iter().enumerate() {
            let mut map: BTreeMap<DerivIndex, Rat> = BTreeMap::new();
            for (m, v) in conds {
                if m.positions().iter().any(|&p| p >= self.dim) {
                    return Err(HermiteError::BadIndex(i));
                }
                match map.get(m) {
                    Some(old) if old != v => return Err(HermiteError::Inconsistent(i)),
                    Some(_) => {}
                    None => {
                        map.insert(m.clone(), v.clone());
                    }
                }
            }
            merged.push(map);
        }
        Ok(merged)
    }
}

/// `D_m(mono)` evaluated at `node`.
fn derivative_at(mono: &Monomial, m: &DerivIndex, node: &[Rat], dim: usize) -> Rat {
    let mut counts = vec![0u32; dim];
    for &p in m.positions() {
        counts[p] += 1;
    }
    let names = params(dim);
    let mut value = Rat::one();
    for (j, x) in names.iter().enumerate() {
        let e = mono.exponent(x);
        let c = counts[j];
        if e < c {
            return Rat::zero();
        }
        for k in 0..c {
            value *= Rat::from_integer((e - k).into());
        }
        value *= num::pow(node[j].clone(), (e - c) as usize);
    }
    value
}

/// An interpolant of total degree at most [`HermiteProblem::degree_bound`],
/// found by solving for the coefficients of every monomial up to that degree.
pub fn hermite_solve(prob: &HermiteProblem) -> Result<Poly, HermiteError> {
    let conds = prob.validated()?;
    let bound = prob.degree_bound();
    if bound < 0 {
        return Ok(Poly::zero());
    }
    let monos = monomials_up_to(&params(prob.dim), bound as u32);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (node, map) in prob.nodes.iter().zip(&conds) {
        for (m, v) in map {
            rows.push(
                monos
                    .iter()
                    .map(|mono| derivative_at(mono, m, node, prob.dim))
                    .collect(),
            );
            rhs.push(v.clone());
        }
    }
    let coeffs = linalg::solve(rows, rhs, monos.len()).ok_or(HermiteError::Infeasible(bound))?;
    Ok(Poly::from_terms(monos.into_iter().zip(coeffs)))
}

/// True when `h` meets every condition of `prob`.
pub fn satisfies(h: &Poly, prob: &HermiteProblem) -> bool {
    let names = params(prob.dim);
    prob.nodes
        .iter()
        .zip(&prob.conditions)
        .all(|(node, conds)| {
            let point: BTreeMap<_, _> = names.iter().cloned().zip(node.iter().cloned()).collect();
            conds.iter().all(|(m, v)| {
                let d = m
                    .positions()
                    .iter()
                    .fold(h.clone(), |acc, &p| acc.derive(&names[p]));
                d.eval(&point).map(|got| &got == v).unwrap_or(false)
            })
        })
}
