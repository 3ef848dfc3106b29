//! Substitutions, most general unifiers and matchers, and the arrows of the
//! Lawvere theory acting on atoms by substitution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::syntax::{parse_indexed_bindings, Atom, Clause, Term, Var};

/// A finite substitution. Variables outside the domain map to themselves.
/// Identity bindings are dropped, except in substitutions built with
/// [`Substitution::total`].
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (Var, Term)>) -> Substitution {
        let mut s = Substitution::identity();
        for (v, t) in bindings {
            s.insert(v, t);
        }
        s
    }

    /// Keeps every binding as given, identities included. Clause
    /// instantiations use this so that the whole clause context is recorded.
    pub fn total(bindings: impl IntoIterator<Item = (Var, Term)>) -> Substitution {
        Substitution { bindings: bindings.into_iter().collect() }
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        if t == Term::Var(v) {
            self.bindings.remove(&v);
        } else {
            self.bindings.insert(v, t);
        }
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.bindings.get(&v)
    }

    pub fn is_identity(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Term)> {
        self.bindings.iter().map(|(v, t)| (*v, t))
    }

    pub fn domain(&self) -> impl Iterator<Item = Var> + '_ {
        self.bindings.keys().copied()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        if self.is_identity() {
            return t.clone();
        }
        t.map_vars(&mut |v| self.bindings.get(&v).cloned().unwrap_or(Term::Var(v)))
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply_term(t)).collect() }
    }

    pub fn apply_atoms(&self, atoms: &[Atom]) -> Vec<Atom> {
        atoms.iter().map(|a| self.apply_atom(a)).collect()
    }

    /// Keeps only the bindings of the given variables.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, t)| (*v, t.clone()))
                .collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        compose(self, self) == *self
    }

    /// Largest variable index mentioned on either side of a binding.
    pub fn max_var(&self) -> u32 {
        self.bindings.iter().map(|(v, t)| v.0.max(t.max_var())).max().unwrap_or(0)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for Substitution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Substitution> {
        Ok(Substitution::from_bindings(parse_indexed_bindings(s)?))
    }
}

/// The substitution `s1 . s2`: applying it equals applying `s2`, then `s1`.
pub fn compose(s1: &Substitution, s2: &Substitution) -> Substitution {
    let mut out = Substitution::identity();
    for (v, t) in s2.iter() {
        out.insert(v, s1.apply_term(t));
    }
    for (v, t) in s1.iter() {
        if s2.get(v).is_none() {
            out.insert(v, t.clone());
        }
    }
    out
}

pub fn apply(s: &Substitution, a: &Atom) -> Atom {
    s.apply_atom(a)
}

fn walk<'a>(t: &'a Term, bind: &'a BTreeMap<Var, Term>) -> &'a Term {
    let mut t = t;
    while let Term::Var(v) = t {
        match bind.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn occurs(v: Var, t: &Term, bind: &BTreeMap<Var, Term>) -> bool {
    match walk(t, bind) {
        Term::Var(w) => *w == v,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, bind)),
    }
}

fn resolve(t: &Term, bind: &BTreeMap<Var, Term>) -> Term {
    match walk(t, bind) {
        Term::Var(v) => Term::Var(*v),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| resolve(a, bind)).collect()),
    }
}

/// Most general unifier of two atoms, with occurs check.
///
/// The result is idempotent and normalized: when two variables are identified
/// the larger index is bound to the smaller one, so every class of
/// variables left unbound is represented by its least member.
pub fn mgu(t: &Atom, u: &Atom) -> Option<Substitution> {
    if t.pred != u.pred || t.arity() != u.arity() {
        return None;
    }
    let mut bind: BTreeMap<Var, Term> = BTreeMap::new();
    let mut todo: Vec<(Term, Term)> = t.args.iter().cloned().zip(u.args.iter().cloned()).rev().collect();
    while let Some((a, b)) = todo.pop() {
        let a = walk(&a, &bind).clone();
        let b = walk(&b, &bind).clone();
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                if x != y {
                    bind.insert(x.max(y), Term::Var(x.min(y)));
                }
            }
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if occurs(x, &other, &bind) {
                    return None;
                }
                bind.insert(x, other);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                todo.extend(fa.into_iter().zip(ga).rev());
            }
        }
    }
    let keys: Vec<Var> = bind.keys().copied().collect();
    Some(Substitution::from_bindings(keys.into_iter().map(|v| (v, resolve(&Term::Var(v), &bind)))))
}

/// Most general matcher of `pattern` against `target`: the unique `s` with
/// `s(pattern) == target` binding only pattern variables. Variables of the
/// target are inert constants.
pub fn mgm(pattern: &Atom, target: &Atom) -> Option<Substitution> {
    if pattern.pred != target.pred || pattern.arity() != target.arity() {
        return None;
    }
    let mut bind: BTreeMap<Var, Term> = BTreeMap::new();
    let mut todo: Vec<(&Term, &Term)> = pattern.args.iter().zip(target.args.iter()).collect();
    while let Some((p, t)) = todo.pop() {
        match p {
            Term::Var(v) => match bind.get(v) {
                Some(bound) if bound != t => return None,
                Some(_) => {}
                None => {
                    bind.insert(*v, t.clone());
                }
            },
            Term::App(f, pa) => match t {
                Term::App(g, ta) if f == g && pa.len() == ta.len() => {
                    todo.extend(pa.iter().zip(ta.iter()));
                }
                _ => return None,
            },
        }
    }
    Some(Substitution::from_bindings(bind))
}

/// Shifts every variable of the clause up by `avoid`.
pub fn rename_apart(c: &Clause, avoid: u32) -> Clause {
    if avoid == 0 {
        return c.clone();
    }
    let mut shift = |v: Var| Term::var(v.0 + avoid);
    Clause {
        head: c.head.map_vars(&mut shift),
        body: c.body.iter().map(|b| b.map_vars(&mut shift)).collect(),
        head_arity: c.head_arity,
        total_arity: c.total_arity,
        var_names: c.var_names.clone(),
    }
}

/// An arrow `n -> m` of the Lawvere theory: an `m`-tuple of terms over
/// `x1..xn`. It acts contravariantly on atoms, sending an atom over `m`
/// variables to one over `n` by substituting the `i`-th component for `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    source: usize,
    tuple: Vec<Term>,
}

impl Arrow {
    pub fn new(source: usize, tuple: Vec<Term>) -> Result<Arrow> {
        if let Some(bad) = tuple.iter().map(Term::max_var).find(|&v| v as usize > source) {
            return Err(Error::VariableOutOfRange { var: bad, arity: source });
        }
        Ok(Arrow { source, tuple })
    }

    pub fn identity(n: usize) -> Arrow {
        Arrow { source: n, tuple: (1..=n as u32).map(Term::var).collect() }
    }

    /// The arrow picking out variables `x_{indices[0]}, ...` of `source`.
    pub fn from_vars(source: usize, indices: &[u32]) -> Result<Arrow> {
        Arrow::new(source, indices.iter().map(|&i| Term::var(i)).collect())
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.tuple.len()
    }

    pub fn tuple(&self) -> &[Term] {
        &self.tuple
    }

    /// True when the tuple consists of pairwise distinct variables.
    pub fn is_injection(&self) -> bool {
        let mut seen = Vec::new();
        self.tuple.iter().all(|t| match t {
            Term::Var(v) if !seen.contains(v) => {
                seen.push(*v);
                true
            }
            _ => false,
        })
    }

    pub fn as_substitution(&self) -> Substitution {
        Substitution::from_bindings(
            self.tuple.iter().enumerate().map(|(i, t)| (Var(i as u32 + 1), t.clone())),
        )
    }

    fn check(&self, atom: &Atom) -> Result<()> {
        let v = atom.max_var();
        if v as usize > self.target() {
            return Err(Error::VariableOutOfRange { var: v, arity: self.target() });
        }
        Ok(())
    }

    pub fn apply_atom(&self, atom: &Atom) -> Result<Atom> {
        self.check(atom)?;
        Ok(atom.map_vars(&mut |v| self.tuple[v.index() - 1].clone()))
    }

    /// Applies `f + k` for every `k`: base variables go through the tuple and
    /// variables above the target arity are shifted to sit above the source.
    pub fn apply_extended_term(&self, t: &Term) -> Term {
        let (n, m) = (self.source as u32, self.target() as u32);
        t.map_vars(&mut |v| {
            if v.0 <= m {
                self.tuple[v.index() - 1].clone()
            } else {
                Term::var(v.0 - m + n)
            }
        })
    }

    pub fn apply_extended_atom(&self, atom: &Atom) -> Atom {
        Atom {
            pred: atom.pred.clone(),
            args: atom.args.iter().map(|t| self.apply_extended_term(t)).collect(),
        }
    }

    /// Composite `self . first`, where `first: n -> m` and `self: m -> k`.
    /// Acting on atoms, `after(g, f)` applies `g` first and then `f`.
    pub fn after(&self, first: &Arrow) -> Result<Arrow> {
        if self.source != first.target() {
            return Err(Error::ArrowMismatch { source_arity: self.source, found: first.target() });
        }
        let s = first.as_substitution();
        Ok(Arrow { source: first.source, tuple: self.tuple.iter().map(|t| s.apply_term(t)).collect() })
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.tuple.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "):{}->{}", self.source, self.target())
    }
}

pub fn arrow_apply(f: &Arrow, a: &Atom) -> Result<Atom> {
    f.apply_atom(a)
}
