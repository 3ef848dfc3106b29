//! Logic programs as coalgebras.
//!
//! Ground programs are exactly `P_f P_f`-coalgebras on a finite set of atoms;
//! their cofree-comonad unfoldings are computed level by level as
//! [`Approximant`]s. First-order programs send an atom over `n` variables to
//! a [`PffElement`]: a finite set of clause bodies over `n` variables plus
//! some fresh ones, taken up to renaming of the fresh variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::cotree::{build_tree, check_goal, instantiate, AndNode};
use crate::error::{Error, Result};
use crate::subst::{arrow_apply, Arrow};
use crate::syntax::{Atom, Clause, Program, Term, Var};

pub type Body = BTreeSet<Atom>;
pub type Bodies = BTreeSet<Body>;

/// A variable-free program viewed as a map from atoms to sets of bodies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundCoalgebra {
    pub universe: BTreeSet<Atom>,
    pub map: BTreeMap<Atom, Bodies>,
}

/// Builds the coalgebra of a ground program over its atoms plus `extra`.
pub fn ground_coalgebra(program: &Program, extra: &[Atom]) -> Result<GroundCoalgebra> {
    if let Some(i) = program.clauses.iter().position(|c| !c.is_ground()) {
        return Err(Error::NotGround { clause: i });
    }
    let mut universe = program.atoms();
    for a in extra {
        if !a.is_ground() {
            return Err(Error::UnknownAtom(a.to_string()));
        }
        universe.insert(a.clone());
    }
    let mut map: BTreeMap<Atom, Bodies> = universe.iter().map(|a| (a.clone(), Bodies::new())).collect();
    for c in &program.clauses {
        map.get_mut(&c.head).expect("heads are in the universe").insert(c.body.iter().cloned().collect());
    }
    Ok(GroundCoalgebra { universe, map })
}

impl GroundCoalgebra {
    pub fn bodies(&self, atom: &Atom) -> Result<&Bodies> {
        self.map.get(atom).ok_or_else(|| Error::UnknownAtom(atom.to_string()))
    }

    /// The program with one clause per (atom, body) pair, in atom order.
    /// Bodies list their atoms in sorted order.
    pub fn to_program(&self) -> Program {
        let clauses = self
            .map
            .iter()
            .flat_map(|(h, bodies)| {
                bodies.iter().map(move |b| Clause::new(h.clone(), b.iter().cloned().collect()))
            })
            .collect();
        Program::new(clauses).expect("atoms of a coalgebra have consistent arities")
    }
}

/// An element of the `level`-th stage of the cofree comonad: at level 0 an
/// atom, at level `n + 1` an atom with a set of sets of level-`n` elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Approximant {
    pub level: usize,
    pub atom: Atom,
    /// Empty at level 0.
    pub branches: BTreeSet<BTreeSet<Approximant>>,
}

impl Approximant {
    pub fn leaf(atom: Atom) -> Approximant {
        Approximant { level: 0, atom, branches: BTreeSet::new() }
    }

    /// Drops the deepest layer, giving the level below.
    pub fn project(&self) -> Option<Approximant> {
        match self.level {
            0 => None,
            1 => Some(Approximant::leaf(self.atom.clone())),
            _ => Some(Approximant {
                level: self.level - 1,
                atom: self.atom.clone(),
                branches: self
                    .branches
                    .iter()
                    .map(|s| s.iter().filter_map(Approximant::project).collect())
                    .collect(),
            }),
        }
    }
}

impl fmt::Display for Approximant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            return write!(f, "{}", self.atom);
        }
        write!(f, "({}, ", self.atom)?;
        write_sets(f, &self.branches)?;
        f.write_str(")")
    }
}

fn write_set<T: fmt::Display>(f: &mut fmt::Formatter<'_>, set: &BTreeSet<T>) -> fmt::Result {
    f.write_str("{")?;
    for (i, x) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("}")
}

/// Outer empty set prints as `∅`, inner empty sets as `{}`.
fn write_sets<T: fmt::Display>(f: &mut fmt::Formatter<'_>, sets: &BTreeSet<BTreeSet<T>>) -> fmt::Result {
    if sets.is_empty() {
        return f.write_str("∅");
    }
    f.write_str("{")?;
    for (i, s) in sets.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write_set(f, s)?;
    }
    f.write_str("}")
}

struct Sets<'a, T>(&'a BTreeSet<BTreeSet<T>>);

impl<T: fmt::Display> fmt::Display for Sets<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, self.0)
    }
}

pub fn format_bodies(bodies: &Bodies) -> String {
    Sets(bodies).to_string()
}

/// `p_0(a) = a`, `p_{n+1}(a) = (a, p(a) with p_n applied elementwise)`.
pub fn unfold(g: &GroundCoalgebra, atom: &Atom, level: usize) -> Result<Approximant> {
    let bodies = g.bodies(atom)?;
    if level == 0 {
        return Ok(Approximant::leaf(atom.clone()));
    }
    let branches = bodies
        .iter()
        .map(|b| b.iter().map(|x| unfold(g, x, level - 1)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    Ok(Approximant { level, atom: atom.clone(), branches })
}

/// Reads a coinductive tree cut at `level` or-layers as an approximant:
/// and-nodes give the first component, the or-children the outer set and
/// each or-node's children an inner set.
pub fn tree_to_approximant(node: &AndNode, level: usize) -> Approximant {
    if level == 0 {
        return Approximant::leaf(node.atom.clone());
    }
    Approximant {
        level,
        atom: node.atom.clone(),
        branches: node
            .children
            .iter()
            .map(|o| o.children.iter().map(|c| tree_to_approximant(c, level - 1)).collect())
            .collect(),
    }
}

/// Whether the level-`n` unfolding of `atom` carries the same information
/// as its coinductive tree cut at or-depth `n`.
pub fn approximant_matches_tree(g: &GroundCoalgebra, atom: &Atom, level: usize) -> Result<bool> {
    let tree = build_tree(&g.to_program(), atom, 0, level)?;
    Ok(unfold(g, atom, level)? == tree_to_approximant(&tree.root, level))
}

/// An element of `P_ff(At)(n)`: a set of bodies over `x1..xn` and `k` fresh
/// variables `x(n+1)..x(n+k)`, kept in a canonical representative of its
/// class under renaming of the fresh variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PffElement {
    base: usize,
    fresh: usize,
    body: Bodies,
}

/// Above this many fresh variables the exhaustive search over orderings is
/// replaced by a first-occurrence pass.
const MAX_PERMUTED: usize = 8;

impl PffElement {
    /// Canonicalises `body`, whose variables above `base` are fresh.
    pub fn new(base: usize, body: Bodies) -> PffElement {
        let mut used: Vec<Var> = Vec::new();
        body.iter().flatten().for_each(|a| a.collect_vars(&mut used));
        used.retain(|v| v.index() > base);
        used.sort();
        used.dedup();
        let rename = |order: &[Var]| -> Bodies {
            let mut f = |v: Var| match order.iter().position(|w| *w == v) {
                Some(i) => Term::var((base + 1 + i) as u32),
                None => Term::Var(v),
            };
            body.iter().map(|s| s.iter().map(|a| a.map_vars(&mut f)).collect()).collect()
        };
        let canonical = if used.len() <= MAX_PERMUTED {
            permutations(&used).iter().map(|p| rename(p)).min().unwrap_or_default()
        } else {
            let mut current = body.clone();
            for _ in 0..used.len() {
                let mut order: Vec<Var> = Vec::new();
                current.iter().flatten().for_each(|a| a.collect_vars(&mut order));
                order.retain(|v| v.index() > base);
                let mut seen = Vec::new();
                order.retain(|v| {
                    !seen.contains(v) && {
                        seen.push(*v);
                        true
                    }
                });
                let next: Bodies = {
                    let mut f = |v: Var| match order.iter().position(|w| *w == v) {
                        Some(i) => Term::var((base + 1 + i) as u32),
                        None => Term::Var(v),
                    };
                    current.iter().map(|s| s.iter().map(|a| a.map_vars(&mut f)).collect()).collect()
                };
                if next == current {
                    break;
                }
                current = next;
            }
            current
        };
        PffElement { base, fresh: used.len(), body: canonical }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn fresh(&self) -> usize {
        self.fresh
    }

    pub fn body(&self) -> &Bodies {
        &self.body
    }
}

impl fmt::Display for PffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, &self.body)
    }
}

fn permutations(items: &[Var]) -> Vec<Vec<Var>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

/// One unfolding step at arity `n`: the bodies of the clauses whose head
/// matches `atom`, body-only variables becoming fresh variables above `n`.
pub fn pff_step(program: &Program, atom: &Atom, arity: usize) -> Result<PffElement> {
    check_goal(program, atom, arity)?;
    let body = program
        .clauses
        .iter()
        .filter_map(|c| instantiate(c, atom, arity as u32))
        .map(|inst| inst.body.into_iter().collect())
        .collect();
    Ok(PffElement::new(arity, body))
}

/// Action of `f: n -> m` on an element over `m`: `f` on `x1..xm`, fresh
/// variables shifted to sit above `n`.
pub fn pff_map(f: &Arrow, e: &PffElement) -> Result<PffElement> {
    if f.target() != e.base {
        return Err(Error::ArrowMismatch { source_arity: e.base, found: f.target() });
    }
    let body = e.body.iter().map(|s| s.iter().map(|a| f.apply_extended_atom(a)).collect()).collect();
    Ok(PffElement::new(f.source(), body))
}

/// `a <= b` in the doubled subset order: every set of `a` is contained in
/// some set of `b`.
pub fn pp_leq(a: &Bodies, b: &Bodies) -> bool {
    a.iter().all(|s| b.iter().any(|t| s.is_subset(t)))
}

/// The order on elements over the same base: some injective renaming of the
/// fresh variables of `a` into those of `b` makes `pp_leq` hold.
pub fn pff_leq(a: &PffElement, b: &PffElement) -> bool {
    if a.base != b.base || a.fresh > b.fresh {
        return false;
    }
    let base = a.base as u32;
    let targets: Vec<u32> = (1..=b.fresh as u32).map(|i| base + i).collect();
    let mut chosen = Vec::with_capacity(a.fresh);
    injections(a.fresh, &targets, &mut chosen, &mut |rho| {
        let mut f = |v: Var| match v.0.checked_sub(base + 1) {
            Some(i) => Term::var(rho[i as usize]),
            None => Term::Var(v),
        };
        let renamed: Bodies = a.body.iter().map(|s| s.iter().map(|x| x.map_vars(&mut f)).collect()).collect();
        pp_leq(&renamed, &b.body)
    })
}

fn injections(
    k: usize,
    targets: &[u32],
    chosen: &mut Vec<u32>,
    test: &mut impl FnMut(&[u32]) -> bool,
) -> bool {
    if chosen.len() == k {
        return test(chosen);
    }
    for &t in targets {
        if !chosen.contains(&t) {
            chosen.push(t);
            if injections(k, targets, chosen, test) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// One instance of the naturality square for `f: n -> m` at an atom over `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareRecord {
    pub arrow: Arrow,
    pub atom: Atom,
    /// `f` applied after one step at `m`.
    pub lhs: PffElement,
    /// One step at `n` after `f`.
    pub rhs: PffElement,
    pub lax_ok: bool,
    pub strict_ok: bool,
}

#[derive(Serialize)]
struct RecordJson {
    arrow: String,
    atom: String,
    lhs: String,
    rhs: String,
    lax_ok: bool,
    strict_ok: bool,
}

impl SquareRecord {
    pub fn lax_line(&self) -> String {
        self.line(if self.lax_ok { "LAX OK" } else { "LAX FAIL" })
    }

    pub fn strict_line(&self) -> String {
        self.line(if self.strict_ok { "STRICT OK" } else { "STRICT FAIL" })
    }

    fn line(&self, tag: &str) -> String {
        format!("{tag}  f={}  A={}  lhs={} rhs={}", self.arrow, self.atom, self.lhs, self.rhs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RecordJson {
            arrow: self.arrow.to_string(),
            atom: self.atom.to_string(),
            lhs: self.lhs.to_string(),
            rhs: self.rhs.to_string(),
            lax_ok: self.lax_ok,
            strict_ok: self.strict_ok,
        })
        .expect("record serializes")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SquareReport {
    pub records: Vec<SquareRecord>,
}

impl SquareReport {
    pub fn lax_failures(&self) -> impl Iterator<Item = &SquareRecord> {
        self.records.iter().filter(|r| !r.lax_ok)
    }

    pub fn strict_failures(&self) -> impl Iterator<Item = &SquareRecord> {
        self.records.iter().filter(|r| !r.strict_ok)
    }

    pub fn extend(&mut self, other: SquareReport) {
        self.records.extend(other.records);
    }
}

/// Compares `f` after one step with one step after `f`, for each atom over
/// `m = f.target()` variables.
pub fn check_lax_square(program: &Program, f: &Arrow, atoms: &[Atom]) -> Result<SquareReport> {
    let mut records = Vec::with_capacity(atoms.len());
    for a in atoms {
        let lhs = pff_map(f, &pff_step(program, a, f.target())?)?;
        let rhs = pff_step(program, &arrow_apply(f, a)?, f.source())?;
        records.push(SquareRecord {
            arrow: f.clone(),
            atom: a.clone(),
            lax_ok: pff_leq(&lhs, &rhs),
            strict_ok: lhs == rhs,
            lhs,
            rhs,
        });
    }
    Ok(SquareReport { records })
}
