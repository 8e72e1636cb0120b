use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{canonicalize, collect_immediate, Atom, Canon};
use crate::poly::Poly;
use crate::term::{Expr, Fresh, VarName};

/// How separation variables are named: `prefix0`, `prefix1`, ..., skipping
/// any name free in the atoms being classified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamingScheme(pub String);

impl Default for NamingScheme {
    fn default() -> Self {
        NamingScheme("w".to_string())
    }
}

/// A partition of a finite atom set into equivalence classes, with one
/// separation variable per class.
#[derive(Debug, Clone)]
pub struct SepAssign {
    class_of: BTreeMap<Atom, usize>,
    vars: Vec<VarName>,
    reps: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("atom `{0}` has no separation variable")]
pub struct MissingAtom(pub Atom);

impl SepAssign {
    pub fn class_of(&self, a: &Atom) -> Option<usize> {
        self.class_of.get(a).copied()
    }

    pub fn var_of(&self, a: &Atom) -> Option<&VarName> {
        self.class_of(a).map(|k| &self.vars[k])
    }

    pub fn class_count(&self) -> usize {
        self.vars.len()
    }

    /// Separation variable of each class, by class number.
    pub fn vars(&self) -> &[VarName] {
        &self.vars
    }

    /// One atom per class, by class number.
    pub fn representatives(&self) -> &[Atom] {
        &self.reps
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, usize)> {
        self.class_of.iter().map(|(a, k)| (a, *k))
    }
}

/// Decides equivalence of atoms and canonical forms, caching atom results for
/// the lifetime of the value.
#[derive(Default)]
pub struct Equiv {
    scheme: NamingScheme,
    memo: HashMap<(Atom, Atom), bool>,
}

impl Equiv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_scheme(scheme: NamingScheme) -> Self {
        Equiv {
            scheme,
            memo: HashMap::new(),
        }
    }

    pub fn atom_equiv(&mut self, a: &Atom, b: &Atom) -> bool {
        match (a, b) {
            (Atom::Var(x), Atom::Var(y)) => x == y,
            (
                Atom::FApp { f, m, args },
                Atom::FApp {
                    f: g,
                    m: n,
                    args: brgs,
                },
            ) => {
                if f != g || m != n {
                    return false;
                }
                if a == b {
                    return true;
                }
                let key = if a <= b {
                    (a.clone(), b.clone())
                } else {
                    (b.clone(), a.clone())
                };
                if let Some(&known) = self.memo.get(&key) {
                    return known;
                }
                let result = args.iter().zip(brgs).all(|(c, d)| self.canon_equiv(c, d));
                self.memo.insert(key, result);
                result
            }
            _ => false,
        }
    }

    /// Partitions `atoms` by [`Equiv::atom_equiv`]. Each atom is compared with
    /// one representative per existing class, which suffices because the
    /// relation is an equivalence.
    pub fn sep_assign<'a>(&mut self, atoms: impl IntoIterator<Item = &'a Atom>) -> SepAssign {
        let atoms: BTreeSet<&Atom> = atoms.into_iter().collect();
        let mut fresh = Fresh::new(&self.scheme.0);
        for a in &atoms {
            for x in Canon::atom((*a).clone()).free_vars() {
                fresh.avoid(x.as_str());
            }
        }
        let mut reps: Vec<Atom> = Vec::new();
        let mut class_of = BTreeMap::new();
        for a in atoms {
            let k = match (0..reps.len()).find(|&k| self.atom_equiv(&reps[k], a)) {
                Some(k) => k,
                None => {
                    reps.push(a.clone());
                    reps.len() - 1
                }
            };
            class_of.insert(a.clone(), k);
        }
        let vars = (0..reps.len()).map(|_| fresh.var()).collect();
        SepAssign {
            class_of,
            vars,
            reps,
        }
    }

    pub fn canon_equiv(&mut self, c: &Canon, d: &Canon) -> bool {
        if c == d {
            return true;
        }
        let mut atoms = BTreeSet::new();
        collect_immediate(c, &mut atoms);
        collect_immediate(d, &mut atoms);
        let w = self.sep_assign(&atoms);
        let pc = node_poly(c, &w).expect("atoms collected above");
        let pd = node_poly(d, &w).expect("atoms collected above");
        pc == pd
    }
}

/// The node polynomial of `c`: each immediate atom replaced by the
/// separation variable of its class.
pub fn node_poly(c: &Canon, w: &SepAssign) -> Result<Poly, MissingAtom> {
    Ok(match c {
        Canon::Const(r) => Poly::constant(r.clone()),
        Canon::Atom(a) => Poly::var(
            w.var_of(a)
                .ok_or_else(|| MissingAtom((**a).clone()))?
                .clone(),
        ),
        Canon::Sum(a, b) => &node_poly(a, w)? + &node_poly(b, w)?,
        Canon::Prod(a, b) => &node_poly(a, w)? * &node_poly(b, w)?,
    })
}

pub fn atom_equiv(a: &Atom, b: &Atom) -> bool {
    Equiv::new().atom_equiv(a, b)
}

pub fn canon_equiv(c: &Canon, d: &Canon) -> bool {
    Equiv::new().canon_equiv(c, d)
}

/// True iff `e = e2` is provable.
pub fn decide(e: &Expr, e2: &Expr) -> bool {
    canon_equiv(&canonicalize(e), &canonicalize(e2))
}
