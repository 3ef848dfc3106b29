//! Coinductive (and-or) trees, truncated at a finite or-depth.
//!
//! An and-node carries an atom; its or-children are the clauses whose head
//! matches the atom (by matching, never by unification), in program order.
//! An or-node's and-children are the instantiated body atoms. Body-only
//! variables of a clause become fresh variables numbered just above the
//! variables in scope on the path from the root.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subst::{mgm, Arrow, Substitution};
use crate::syntax::{parse_indexed_atom, Atom, Clause, Program, Sym, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoTree {
    /// Base arity: the root atom lives in `At(arity)`.
    pub arity: usize,
    pub root: AndNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AndNode {
    pub atom: Atom,
    /// Set when the node sits at the depth bound and was not expanded.
    pub truncated: bool,
    /// Set when no clause of the program defines the atom's predicate.
    /// Such a node has no children and is neither proved nor refuted.
    pub open: bool,
    pub children: Vec<OrNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrNode {
    /// Zero-based index of the clause in the program.
    pub clause: usize,
    /// Clause instantiation: the head matcher extended with the fresh
    /// variables chosen for the body-only variables. Every clause variable
    /// is bound, identities included.
    pub matcher: Substitution,
    pub children: Vec<AndNode>,
}

/// One application of a clause to an atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub matcher: Substitution,
    pub body: Vec<Atom>,
    /// Highest variable index in scope below this clause application.
    pub bound: u32,
}

/// Applies `clause` to `atom` if its head matches, allocating body-only
/// variables as `bound + 1, bound + 2, ...`. The atom must only use
/// variables up to `bound`.
pub fn instantiate(clause: &Clause, atom: &Atom, bound: u32) -> Option<Instance> {
    let head = mgm(&clause.head, atom)?;
    let mut next = bound;
    let mut bindings: Vec<(Var, Term)> =
        (1..=clause.head_arity as u32).map(|v| (Var(v), head.apply_term(&Term::var(v)))).collect();
    for v in clause.existential_vars() {
        next += 1;
        bindings.push((v, Term::var(next)));
    }
    let matcher = Substitution::total(bindings);
    Some(Instance { body: matcher.apply_atoms(&clause.body), matcher, bound: next })
}

pub(crate) fn check_goal(program: &Program, goal: &Atom, arity: usize) -> Result<()> {
    program.signature.check_atom(goal)?;
    let v = goal.max_var();
    if v as usize > arity {
        return Err(Error::VariableOutOfRange { var: v, arity });
    }
    Ok(())
}

/// Builds the coinductive tree of `goal` (an atom over `arity` variables),
/// cut after `depth` layers of or-nodes.
pub fn build_tree(program: &Program, goal: &Atom, arity: usize, depth: usize) -> Result<CoTree> {
    check_goal(program, goal, arity)?;
    let defined = program.defined_predicates();
    Ok(CoTree { arity, root: expand(program, &defined, goal.clone(), arity as u32, depth) })
}

fn expand(program: &Program, defined: &BTreeSet<Sym>, atom: Atom, bound: u32, depth: usize) -> AndNode {
    if depth == 0 {
        return AndNode { atom, truncated: true, open: false, children: Vec::new() };
    }
    if !defined.contains(&atom.pred) {
        return AndNode { atom, truncated: false, open: true, children: Vec::new() };
    }
    let children = program
        .clauses
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let inst = instantiate(c, &atom, bound)?;
            Some(OrNode {
                clause: i,
                children: inst
                    .body
                    .into_iter()
                    .map(|b| expand(program, defined, b, inst.bound, depth - 1))
                    .collect(),
                matcher: inst.matcher,
            })
        })
        .collect();
    AndNode { atom, truncated: false, open: false, children }
}

impl CoTree {
    /// Or-depth of the deepest or-node.
    pub fn depth(&self) -> usize {
        fn go(n: &AndNode) -> usize {
            n.children.iter().map(|o| 1 + o.children.iter().map(go).max().unwrap_or(0)).max().unwrap_or(0)
        }
        go(&self.root)
    }

    /// Cuts the tree after `depth` or-layers.
    pub fn truncate(&self, depth: usize) -> CoTree {
        fn go(n: &AndNode, depth: usize) -> AndNode {
            if depth == 0 {
                return AndNode { atom: n.atom.clone(), truncated: true, open: false, children: Vec::new() };
            }
            AndNode {
                atom: n.atom.clone(),
                truncated: n.truncated,
                open: n.open,
                children: n
                    .children
                    .iter()
                    .map(|o| OrNode {
                        clause: o.clause,
                        matcher: o.matcher.clone(),
                        children: o.children.iter().map(|c| go(c, depth - 1)).collect(),
                    })
                    .collect(),
            }
        }
        CoTree { arity: self.arity, root: go(&self.root, depth) }
    }

    pub fn and_nodes(&self) -> Vec<&AndNode> {
        fn go<'a>(n: &'a AndNode, out: &mut Vec<&'a AndNode>) {
            out.push(n);
            n.children.iter().flat_map(|o| &o.children).for_each(|c| go(c, out));
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }
}

/// A proof: a subtree choosing one clause at every atom, with every branch
/// closed by a fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub arity: usize,
    pub root: ProofNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub atom: Atom,
    pub clause: usize,
    pub matcher: Substitution,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn clauses_preorder(&self) -> Vec<usize> {
        let mut out = vec![self.clause];
        self.children.iter().for_each(|c| out.extend(c.clauses_preorder()));
        out
    }

    fn to_and_node(&self) -> AndNode {
        AndNode {
            atom: self.atom.clone(),
            truncated: false,
            open: false,
            children: vec![OrNode {
                clause: self.clause,
                matcher: self.matcher.clone(),
                children: self.children.iter().map(ProofNode::to_and_node).collect(),
            }],
        }
    }
}

impl ProofTree {
    pub fn to_cotree(&self) -> CoTree {
        CoTree { arity: self.arity, root: self.root.to_and_node() }
    }

    /// Replays the proof through the resolution rule: each node's matcher must
    /// send its clause head to the node's atom and the clause body to the
    /// children, with body-only variables sent to distinct fresh variables.
    pub fn validate(&self, program: &Program) -> std::result::Result<(), String> {
        fn go(p: &Program, n: &ProofNode, bound: u32) -> std::result::Result<(), String> {
            let c = p.clauses.get(n.clause).ok_or_else(|| format!("no clause {}", n.clause))?;
            if n.matcher.apply_atom(&c.head) != n.atom {
                return Err(format!("clause {} head does not match {}", n.clause, n.atom));
            }
            let body = n.matcher.apply_atoms(&c.body);
            let atoms: Vec<&Atom> = n.children.iter().map(|c| &c.atom).collect();
            if body.iter().collect::<Vec<_>>() != atoms {
                return Err(format!("children of {} are not the clause {} body", n.atom, n.clause));
            }
            let mut fresh = Vec::new();
            for v in c.existential_vars() {
                match n.matcher.get(v).cloned().unwrap_or(Term::Var(v)) {
                    Term::Var(w) if w.0 > bound && !fresh.contains(&w) => fresh.push(w),
                    other => return Err(format!("body-only variable {v} sent to {other}, not fresh")),
                }
            }
            let next = bound + fresh.len() as u32;
            n.children.iter().try_for_each(|ch| go(p, ch, next))
        }
        go(program, &self.root, self.arity.max(self.root.atom.max_var() as usize) as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Proved,
    Failed,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Proved => "Proved",
            Status::Failed => "Failed",
            Status::Unknown => "Unknown",
        })
    }
}

/// Result of searching for a proof within a depth bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Proved(ProofTree),
    /// No proof exists at any depth.
    Failed,
    /// The bound was hit before the question was settled.
    Unknown,
}

impl Outcome {
    pub fn status(&self) -> Status {
        match self {
            Outcome::Proved(_) => Status::Proved,
            Outcome::Failed => Status::Failed,
            Outcome::Unknown => Status::Unknown,
        }
    }
}

enum Partial<T> {
    Proved(T),
    Failed,
    Unknown,
}

/// Extracts the first proof (leftmost or-choice) contained in the tree.
pub fn success_subtree(tree: &CoTree) -> Outcome {
    fn and(n: &AndNode) -> Partial<ProofNode> {
        if n.truncated || n.open {
            return Partial::Unknown;
        }
        let mut unknown = false;
        for o in &n.children {
            match or(o) {
                Partial::Proved(children) => {
                    return Partial::Proved(ProofNode {
                        atom: n.atom.clone(),
                        clause: o.clause,
                        matcher: o.matcher.clone(),
                        children,
                    })
                }
                Partial::Unknown => unknown = true,
                Partial::Failed => {}
            }
        }
        if unknown {
            Partial::Unknown
        } else {
            Partial::Failed
        }
    }
    fn or(o: &OrNode) -> Partial<Vec<ProofNode>> {
        let mut proved = Vec::new();
        let mut unknown = false;
        for c in &o.children {
            match and(c) {
                Partial::Proved(p) => proved.push(p),
                Partial::Failed => return Partial::Failed,
                Partial::Unknown => unknown = true,
            }
        }
        if unknown {
            Partial::Unknown
        } else {
            Partial::Proved(proved)
        }
    }
    match and(&tree.root) {
        Partial::Proved(root) => Outcome::Proved(ProofTree { arity: tree.arity, root }),
        Partial::Failed => Outcome::Failed,
        Partial::Unknown => Outcome::Unknown,
    }
}

/// Applies `f: n -> m` to every node of a tree rooted in `At(m)`. Fresh
/// variables above `m` are shifted to sit above `n`; the shape, clause
/// indices and truncation flags are unchanged.
pub fn map_tree(f: &Arrow, tree: &CoTree) -> Result<CoTree> {
    if f.target() != tree.arity {
        return Err(Error::ArrowMismatch { source_arity: tree.arity, found: f.target() });
    }
    fn and(f: &Arrow, n: &AndNode) -> AndNode {
        AndNode {
            atom: f.apply_extended_atom(&n.atom),
            truncated: n.truncated,
            open: n.open,
            children: n
                .children
                .iter()
                .map(|o| OrNode {
                    clause: o.clause,
                    matcher: Substitution::total(
                        o.matcher.iter().map(|(v, t)| (v, f.apply_extended_term(t))),
                    ),
                    children: o.children.iter().map(|c| and(f, c)).collect(),
                })
                .collect(),
        }
    }
    Ok(CoTree { arity: f.source(), root: and(f, &tree.root) })
}

/// Embedding order: every and-node of `small` has the same atom as its
/// image, every or-node of `small` maps to an or-node of the same clause,
/// and `big` may have extra or-children.
pub fn tree_leq(small: &CoTree, big: &CoTree) -> bool {
    fn and(s: &AndNode, b: &AndNode) -> bool {
        s.atom == b.atom
            && s.children.iter().all(|so| {
                b.children.iter().find(|bo| bo.clause == so.clause).is_some_and(|bo| {
                    so.children.len() == bo.children.len()
                        && so.children.iter().zip(&bo.children).all(|(x, y)| and(x, y))
                })
            })
    }
    and(&small.root, &big.root)
}

struct Renaming {
    arity: u32,
    fwd: HashMap<u32, u32>,
    bwd: HashMap<u32, u32>,
}

impl Renaming {
    fn var(&mut self, a: Var, b: Var) -> bool {
        if a.0 <= self.arity || b.0 <= self.arity {
            return a == b;
        }
        match (self.fwd.get(&a.0), self.bwd.get(&b.0)) {
            (None, None) => {
                self.fwd.insert(a.0, b.0);
                self.bwd.insert(b.0, a.0);
                true
            }
            (Some(&x), Some(&y)) => x == b.0 && y == a.0,
            _ => false,
        }
    }

    fn term(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => self.var(*x, *y),
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            _ => false,
        }
    }

    fn atom(&mut self, a: &Atom, b: &Atom) -> bool {
        a.pred == b.pred
            && a.args.len() == b.args.len()
            && a.args.iter().zip(&b.args).all(|(x, y)| self.term(x, y))
    }

    /// Matchers are compared as total maps: a clause variable missing from
    /// the domain is sent to the tree variable with the same index.
    fn matcher(&mut self, a: &Substitution, b: &Substitution) -> bool {
        let mut domain: Vec<Var> = a.domain().chain(b.domain()).collect();
        domain.sort();
        domain.dedup();
        domain.into_iter().all(|v| {
            let s = a.get(v).cloned().unwrap_or(Term::Var(v));
            let t = b.get(v).cloned().unwrap_or(Term::Var(v));
            self.term(&s, &t)
        })
    }

    fn and(&mut self, a: &AndNode, b: &AndNode) -> bool {
        a.truncated == b.truncated
            && a.open == b.open
            && self.atom(&a.atom, &b.atom)
            && a.children.len() == b.children.len()
            && a.children.iter().zip(&b.children).all(|(x, y)| {
                x.clause == y.clause
                    && self.matcher(&x.matcher, &y.matcher)
                    && x.children.len() == y.children.len()
                    && x.children.iter().zip(&y.children).all(|(p, q)| self.and(p, q))
            })
    }
}

/// Structural equality up to a bijective renaming of the variables above
/// the base arity.
pub fn tree_equal_upto_renaming(a: &CoTree, b: &CoTree) -> bool {
    a.arity == b.arity
        && Renaming { arity: a.arity as u32, fwd: HashMap::new(), bwd: HashMap::new() }.and(&a.root, &b.root)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Dot,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "ascii" => Ok(Format::Ascii),
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidBound(format!("unknown format `{other}`"))),
        }
    }
}

pub fn render(tree: &CoTree, format: Format) -> String {
    match format {
        Format::Ascii => render_ascii(tree),
        Format::Dot => render_dot(tree),
        Format::Json => render_json(tree),
    }
}

enum View<'a> {
    And(&'a AndNode),
    Or(&'a OrNode),
    Closed,
}

impl View<'_> {
    fn label(&self) -> String {
        match self {
            View::And(n) if n.truncated => format!("{} …", n.atom),
            View::And(n) if n.open => format!("{} ?", n.atom),
            View::And(n) => n.atom.to_string(),
            View::Or(o) => format!("• {}", o.clause),
            View::Closed => "[ ]".to_string(),
        }
    }

    fn children(&self) -> Vec<View<'_>> {
        match self {
            View::And(n) => n.children.iter().map(View::Or).collect(),
            View::Or(o) if o.children.is_empty() => vec![View::Closed],
            View::Or(o) => o.children.iter().map(View::And).collect(),
            View::Closed => Vec::new(),
        }
    }
}

/// Box-drawing rendering. Or-nodes print as `• <clause>`, a closed branch
/// as `[ ]`, a node cut by the depth bound is suffixed with `…` and an atom
/// of an undefined predicate with `?`.
pub fn render_ascii(tree: &CoTree) -> String {
    fn draw(v: &View<'_>, prefix: &str, out: &mut String) {
        let kids = v.children();
        for (i, k) in kids.iter().enumerate() {
            let last = i + 1 == kids.len();
            let _ = writeln!(out, "{prefix}{}{}", if last { "└─" } else { "├─" }, k.label());
            draw(k, &format!("{prefix}{}", if last { "  " } else { "│ " }), out);
        }
    }
    let root = View::And(&tree.root);
    let mut out = format!("{}\n", root.label());
    draw(&root, "", &mut out);
    out
}

pub fn render_dot(tree: &CoTree) -> String {
    fn go(v: &View<'_>, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        let attrs = match v {
            View::And(n) if n.truncated => {
                format!("shape=box, style=dashed, label=\"{} …\"", n.atom)
            }
            View::And(n) if n.open => format!("shape=box, style=dotted, label=\"{} ?\"", n.atom),
            View::And(n) => format!("shape=box, label=\"{}\"", n.atom),
            View::Or(o) => format!("shape=point, style=filled, xlabel=\"{}\"", o.clause),
            View::Closed => "shape=plaintext, label=\"[ ]\"".to_string(),
        };
        let _ = writeln!(out, "  n{id} [{attrs}];");
        for k in v.children() {
            let kid = go(&k, next, out);
            let _ = writeln!(out, "  n{id} -> n{kid};");
        }
        id
    }
    let mut out = String::from("digraph cotree {\n  rankdir=TB;\n");
    go(&View::And(&tree.root), &mut 0, &mut out);
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum JsonNode {
    And {
        atom: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arity: Option<usize>,
        truncated: bool,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        open: bool,
        children: Vec<JsonNode>,
    },
    Or {
        clause: usize,
        matcher: String,
        children: Vec<JsonNode>,
    },
}

fn to_json(n: &AndNode, arity: Option<usize>) -> JsonNode {
    JsonNode::And {
        atom: n.atom.to_string(),
        arity,
        truncated: n.truncated,
        open: n.open,
        children: n
            .children
            .iter()
            .map(|o| JsonNode::Or {
                clause: o.clause,
                matcher: o.matcher.to_string(),
                children: o.children.iter().map(|c| to_json(c, None)).collect(),
            })
            .collect(),
    }
}

/// JSON document whose root is the root and-node, carrying the base arity.
pub fn render_json(tree: &CoTree) -> String {
    serde_json::to_string(&to_json(&tree.root, Some(tree.arity))).expect("tree serializes")
}

pub fn parse_json_tree(source: &str) -> Result<CoTree> {
    fn and(n: JsonNode) -> Result<(AndNode, Option<usize>)> {
        match n {
            JsonNode::And { atom, arity, truncated, open, children } => Ok((
                AndNode {
                    atom: parse_indexed_atom(&atom)?,
                    truncated,
                    open,
                    children: children.into_iter().map(or).collect::<Result<_>>()?,
                },
                arity,
            )),
            JsonNode::Or { .. } => Err(Error::Json("expected an and-node".into())),
        }
    }
    fn or(n: JsonNode) -> Result<OrNode> {
        match n {
            JsonNode::Or { clause, matcher, children } => Ok(OrNode {
                clause,
                matcher: Substitution::total(crate::syntax::parse_indexed_bindings(&matcher)?),
                children: children.into_iter().map(|c| and(c).map(|(n, _)| n)).collect::<Result<_>>()?,
            }),
            JsonNode::And { .. } => Err(Error::Json("expected an or-node".into())),
        }
    }
    let doc: JsonNode = serde_json::from_str(source).map_err(|e| Error::Json(e.to_string()))?;
    let (root, arity) = and(doc)?;
    let arity = arity.unwrap_or(root.atom.max_var() as usize);
    Ok(CoTree { arity, root })
}
