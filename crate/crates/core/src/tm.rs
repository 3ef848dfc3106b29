//! Term-matching resolution: depth-bounded proof search that only ever
//! matches clause heads against goals, never instantiating goal variables.
//!
//! This walks the search space directly instead of materialising the
//! coinductive tree, memoising verdicts per goal variant.

use std::collections::{BTreeSet, HashMap};

use crate::cotree::{check_goal, instantiate, Outcome, ProofNode, ProofTree, Status};
use crate::error::Result;
use crate::syntax::{Atom, Program, Sym};

#[derive(Debug, Default, Clone, Copy)]
struct Known {
    failed: bool,
    /// Smallest depth at which a proof was found.
    proved_at: Option<usize>,
    /// Largest depth at which the search was inconclusive.
    unknown_at: Option<usize>,
}

struct Search<'p> {
    program: &'p Program,
    defined: BTreeSet<Sym>,
    memo: HashMap<Atom, Known>,
}

impl Search<'_> {
    fn status(&mut self, atom: &Atom, bound: u32, depth: usize) -> Status {
        if depth == 0 || !self.defined.contains(&atom.pred) {
            return Status::Unknown;
        }
        let key = atom.canonical().0;
        if let Some(k) = self.memo.get(&key) {
            if k.failed {
                return Status::Failed;
            }
            if k.proved_at.is_some_and(|p| p <= depth) {
                return Status::Proved;
            }
            if k.unknown_at.is_some_and(|u| u >= depth) {
                return Status::Unknown;
            }
        }
        let mut verdict = Status::Failed;
        for clause in &self.program.clauses {
            let Some(inst) = instantiate(clause, atom, bound) else { continue };
            let mut branch = Status::Proved;
            for b in &inst.body {
                match self.status(b, inst.bound, depth - 1) {
                    Status::Failed => {
                        branch = Status::Failed;
                        break;
                    }
                    Status::Unknown => branch = Status::Unknown,
                    Status::Proved => {}
                }
            }
            match branch {
                Status::Proved => {
                    verdict = Status::Proved;
                    break;
                }
                Status::Unknown => verdict = Status::Unknown,
                Status::Failed => {}
            }
        }
        let k = self.memo.entry(key).or_default();
        match verdict {
            Status::Failed => k.failed = true,
            Status::Proved => k.proved_at = Some(k.proved_at.map_or(depth, |p| p.min(depth))),
            Status::Unknown => k.unknown_at = Some(k.unknown_at.map_or(depth, |u| u.max(depth))),
        }
        verdict
    }

    /// Rebuilds the leftmost proof of an atom already known to be provable.
    fn extract(&mut self, atom: &Atom, bound: u32, depth: usize) -> ProofNode {
        for (i, clause) in self.program.clauses.iter().enumerate() {
            let Some(inst) = instantiate(clause, atom, bound) else { continue };
            if inst.body.iter().all(|b| self.status(b, inst.bound, depth - 1) == Status::Proved) {
                let children = inst.body.iter().map(|b| self.extract(b, inst.bound, depth - 1)).collect();
                return ProofNode { atom: atom.clone(), clause: i, matcher: inst.matcher, children };
            }
        }
        unreachable!("extract called on an atom without a proof")
    }
}

/// Searches for a term-matching proof of `goal` (over `arity` variables)
/// using at most `depth` resolution layers on every branch.
pub fn tm_prove(program: &Program, goal: &Atom, arity: usize, depth: usize) -> Result<Outcome> {
    check_goal(program, goal, arity)?;
    let mut search = Search { program, defined: program.defined_predicates(), memo: HashMap::new() };
    let bound = arity as u32;
    Ok(match search.status(goal, bound, depth) {
        Status::Proved => Outcome::Proved(ProofTree { arity, root: search.extract(goal, bound, depth) }),
        Status::Failed => Outcome::Failed,
        Status::Unknown => Outcome::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_indexed_atom, parse_program};

    fn atom(s: &str) -> Atom {
        parse_indexed_atom(s).unwrap()
    }

    #[test]
    fn listnat_goals() {
        let p = parse_program(include_str!("../corpus/listnat.lp")).unwrap();
        let o = tm_prove(&p, &atom("list(cons(0,nil))"), 0, 3).unwrap();
        let Outcome::Proved(proof) = o else { panic!("{o:?}") };
        assert_eq!(proof.root.clauses_preorder(), [3, 0, 2]);
        proof.validate(&p).unwrap();
        assert_eq!(tm_prove(&p, &atom("list(cons(0,nil))"), 0, 1).unwrap(), Outcome::Unknown);
        assert_eq!(tm_prove(&p, &atom("list(cons(X1,X2))"), 2, 6).unwrap(), Outcome::Failed);
        assert_eq!(tm_prove(&p, &atom("nat(s(s(0)))"), 0, 3).unwrap().status(), Status::Proved);
    }

    #[test]
    fn depth_zero_is_unknown() {
        let p = parse_program("p.").unwrap();
        assert_eq!(tm_prove(&p, &atom("p"), 0, 0).unwrap(), Outcome::Unknown);
        assert_eq!(tm_prove(&p, &atom("p"), 0, 1).unwrap().status(), Status::Proved);
    }

    #[test]
    fn loops_stay_unknown() {
        let p = parse_program(include_str!("../corpus/bad.lp")).unwrap();
        for d in 0..20 {
            assert_eq!(tm_prove(&p, &atom("bad(X1)"), 1, d).unwrap(), Outcome::Unknown);
        }
    }

    #[test]
    fn undefined_predicates_are_open() {
        let gc = parse_program(include_str!("../corpus/gc.lp")).unwrap();
        assert_eq!(tm_prove(&gc, &atom("connected(X1,X2)"), 2, 50).unwrap(), Outcome::Unknown);
        assert_eq!(tm_prove(&gc, &atom("edge(X1,X2)"), 2, 5).unwrap(), Outcome::Unknown);
        // a defined predicate with no matching clause fails
        let p = parse_program("p(a). q :- p(b), r.").unwrap();
        assert_eq!(tm_prove(&p, &atom("q"), 0, 5).unwrap(), Outcome::Failed);
    }

    #[test]
    fn leftmost_proof_depends_on_depth() {
        // With depth 1 only the fact closes; with depth 3 the first clause does.
        let p = parse_program("q :- r. q. r :- s. s.").unwrap();
        let Outcome::Proved(shallow) = tm_prove(&p, &atom("q"), 0, 1).unwrap() else { panic!() };
        assert_eq!(shallow.root.clauses_preorder(), [1]);
        let Outcome::Proved(deep) = tm_prove(&p, &atom("q"), 0, 3).unwrap() else { panic!() };
        assert_eq!(deep.root.clauses_preorder(), [0, 2, 3]);
    }
}
