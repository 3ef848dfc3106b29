//! SLD resolution: leftmost selection, clauses in program order, unification
//! against clauses renamed apart from the current resolvent.

use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use crate::cotree::{check_goal, Status};
use crate::error::{Error, Result};
use crate::subst::{compose, mgu, rename_apart, Substitution};
use crate::syntax::{max_var_of, Atom, Program, Term, Var};
use crate::tm::tm_prove;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    DepthFirst,
    #[default]
    IterativeDeepening,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "dfs" => Ok(Strategy::DepthFirst),
            "iddfs" => Ok(Strategy::IterativeDeepening),
            other => Err(Error::InvalidBound(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SldLimits {
    /// Maximum length of a single derivation.
    pub max_steps: usize,
    pub max_answers: usize,
    pub strategy: Strategy,
}

impl Default for SldLimits {
    fn default() -> SldLimits {
        SldLimits { max_steps: 10_000, max_answers: 1, strategy: Strategy::default() }
    }
}

impl SldLimits {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::InvalidBound("max_steps must be at least 1".into()));
        }
        if self.max_answers == 0 {
            return Err(Error::InvalidBound("max_answers must be at least 1".into()));
        }
        Ok(())
    }
}

/// A computed answer substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    /// Bindings of the goal variables. Variables introduced during the
    /// derivation are renumbered canonically just above the goal variables.
    pub subst: Substitution,
    pub steps: usize,
    /// Zero-based index of the clause used at each step.
    pub trace: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SldResult {
    pub answers: Vec<Answer>,
    /// True when the step bound cut off part of the search before
    /// `max_answers` answers were found.
    pub exhausted: bool,
}

/// Variable bindings shared by the whole search, undone on backtracking
/// through a trail.
#[derive(Default)]
struct Store {
    bindings: Vec<Option<Term>>,
    trail: Vec<u32>,
}

impl Store {
    fn lookup(&self, v: Var) -> Option<&Term> {
        self.bindings.get(v.index()).and_then(Option::as_ref)
    }

    fn deref<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.lookup(*v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn bind(&mut self, v: Var, t: Term) {
        if self.bindings.len() <= v.index() {
            self.bindings.resize(v.index() + 1, None);
        }
        self.bindings[v.index()] = Some(t);
        self.trail.push(v.0);
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.bindings[v as usize] = None;
        }
    }

    fn occurs(&self, v: Var, t: &Term) -> bool {
        match self.deref(t) {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    /// Unifies two atoms, binding the larger of two variables to the
    /// smaller. On failure the bindings made so far stay on the trail.
    fn unify(&mut self, a: &Atom, b: &Atom) -> bool {
        if a.pred != b.pred || a.args.len() != b.args.len() {
            return false;
        }
        let mut todo: Vec<(Term, Term)> = a.args.iter().cloned().zip(b.args.iter().cloned()).collect();
        while let Some((x, y)) = todo.pop() {
            let x = self.deref(&x).clone();
            let y = self.deref(&y).clone();
            match (x, y) {
                (Term::Var(u), Term::Var(w)) => {
                    if u != w {
                        self.bind(u.max(w), Term::Var(u.min(w)));
                    }
                }
                (Term::Var(u), t) | (t, Term::Var(u)) => {
                    if self.occurs(u, &t) {
                        return false;
                    }
                    self.bind(u, t);
                }
                (Term::App(f, xs), Term::App(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    todo.extend(xs.into_iter().zip(ys));
                }
            }
        }
        true
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.deref(t) {
            Term::Var(v) => Term::Var(*v),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.resolve(a)).collect()),
        }
    }
}

/// Resolvent as a shared list, leftmost atom first.
type Goals = Option<Rc<GoalNode>>;

struct GoalNode {
    atom: Atom,
    next: Goals,
}

fn push_goals(atoms: impl DoubleEndedIterator<Item = Atom>, rest: Goals) -> Goals {
    atoms.rev().fold(rest, |next, atom| Some(Rc::new(GoalNode { atom, next })))
}

struct Frame {
    goals: Goals,
    /// Clause used by the step that produced this resolvent.
    clause: Option<usize>,
    /// Trail length when the frame was created.
    mark: usize,
    next_var: u32,
    depth: usize,
    next_clause: usize,
}

struct Solver<'a> {
    program: &'a Program,
    goal_vars: Vec<Var>,
    arity: u32,
    max_answers: usize,
    answers: Vec<Answer>,
    seen: HashSet<Substitution>,
    store: Store,
}

impl Solver<'_> {
    fn record(&mut self, branch: &[Frame]) {
        let acc = Substitution::from_bindings(
            self.goal_vars.iter().map(|&v| (v, self.store.resolve(&Term::Var(v)))).collect::<Vec<_>>(),
        );
        let trace: Vec<usize> = branch.iter().filter_map(|f| f.clause).collect();
        let subst = canonical_answer(&acc, self.arity);
        if self.seen.insert(subst.clone()) {
            self.answers.push(Answer { subst, steps: trace.len(), trace });
        }
    }

    /// Depth-first search with derivations cut at `limit` steps; returns
    /// whether anything was cut.
    fn dfs(&mut self, start: &[Atom], limit: usize) -> bool {
        self.store = Store::default();
        let mut cut = false;
        let mut stack = vec![Frame {
            goals: push_goals(start.iter().cloned(), None),
            clause: None,
            mark: 0,
            next_var: self.arity + 1,
            depth: 0,
            next_clause: 0,
        }];
        while let Some(top) = stack.last_mut() {
            let Some(node) = top.goals.clone() else {
                self.record(&stack);
                stack.pop();
                if self.answers.len() >= self.max_answers {
                    return cut;
                }
                continue;
            };
            let avoid = top.next_var - 1;
            if top.depth >= limit {
                let mark = top.mark;
                for c in &self.program.clauses {
                    let ok = self.store.unify(&node.atom, &rename_apart(c, avoid).head);
                    self.store.undo(mark);
                    if ok {
                        cut = true;
                        break;
                    }
                }
                stack.pop();
                continue;
            }
            let mut child = None;
            while top.next_clause < self.program.len() {
                let i = top.next_clause;
                top.next_clause += 1;
                self.store.undo(top.mark);
                let clause = rename_apart(&self.program.clauses[i], avoid);
                debug_assert!(
                    (top.next_var..top.next_var + clause.total_arity as u32)
                        .all(|v| self.store.lookup(Var(v)).is_none()),
                    "renamed clause collides with bound variables"
                );
                if !self.store.unify(&node.atom, &clause.head) {
                    continue;
                }
                child = Some(Frame {
                    goals: push_goals(clause.body.into_iter(), node.next.clone()),
                    clause: Some(i),
                    mark: self.store.trail.len(),
                    next_var: top.next_var + clause.total_arity as u32,
                    depth: top.depth + 1,
                    next_clause: 0,
                });
                break;
            }
            match child {
                Some(f) => stack.push(f),
                None => {
                    let mark = top.mark;
                    self.store.undo(mark);
                    stack.pop();
                }
            }
        }
        cut
    }
}

/// Renumbers variables outside the goal in order of first occurrence,
/// starting from `arity + 1`.
fn canonical_answer(acc: &Substitution, arity: u32) -> Substitution {
    let mut map: Vec<(Var, Var)> = Vec::new();
    let mut rename = |v: Var| {
        if v.0 <= arity {
            return Term::Var(v);
        }
        let next = map.len();
        let w = map.iter().find(|(from, _)| *from == v).map(|(_, to)| *to).unwrap_or_else(|| {
            let w = Var(arity + 1 + next as u32);
            map.push((v, w));
            w
        });
        Term::Var(w)
    };
    Substitution::from_bindings(acc.iter().map(|(v, t)| (v, t.map_vars(&mut rename))).collect::<Vec<_>>())
}

/// Enumerates computed answers for a conjunctive goal.
pub fn sld_solve(program: &Program, goal: &[Atom], limits: &SldLimits) -> Result<SldResult> {
    limits.validate()?;
    for g in goal {
        program.signature.check_atom(g)?;
    }
    let arity = max_var_of(goal);
    let mut goal_vars: Vec<Var> = Vec::new();
    goal.iter().for_each(|g| g.collect_vars(&mut goal_vars));
    goal_vars.sort();
    goal_vars.dedup();
    let mut solver = Solver {
        program,
        goal_vars,
        arity,
        max_answers: limits.max_answers,
        answers: Vec::new(),
        seen: HashSet::new(),
        store: Store::default(),
    };
    let cut = match limits.strategy {
        Strategy::DepthFirst => solver.dfs(goal, limits.max_steps),
        Strategy::IterativeDeepening => {
            let mut limit = 1;
            loop {
                let cut = solver.dfs(goal, limit);
                if !cut || solver.answers.len() >= limits.max_answers || limit == limits.max_steps {
                    break cut;
                }
                limit = (limit * 2).min(limits.max_steps);
            }
        }
    };
    let exhausted = cut && solver.answers.len() < limits.max_answers;
    solver.answers.truncate(limits.max_answers);
    Ok(SldResult { answers: solver.answers, exhausted })
}

/// Re-runs the recorded clause sequence on the instantiated goal. It must
/// reach the empty goal while instantiating the goal only up to renaming.
pub fn replay(program: &Program, goal: &[Atom], answer: &Answer) -> bool {
    let start: Vec<Atom> = goal.iter().map(|g| answer.subst.apply_atom(g)).collect();
    let mut vars: Vec<Var> = Vec::new();
    start.iter().for_each(|g| g.collect_vars(&mut vars));
    vars.sort();
    vars.dedup();
    let mut goals: Vec<Atom> = start.iter().rev().cloned().collect();
    let mut acc = Substitution::identity();
    let mut next_var = max_var_of(&start) + 1;
    for &i in &answer.trace {
        let (Some(selected), Some(clause)) = (goals.pop(), program.clauses.get(i)) else {
            return false;
        };
        let clause = rename_apart(clause, next_var - 1);
        let Some(theta) = mgu(&selected, &clause.head) else { return false };
        goals = goals.iter().map(|g| theta.apply_atom(g)).collect();
        goals.extend(clause.body.iter().rev().map(|b| theta.apply_atom(b)));
        acc = compose(&theta, &acc).restrict(&vars);
        next_var += clause.total_arity as u32;
    }
    let mut images = HashSet::new();
    goals.is_empty()
        && acc.iter().all(|(_, t)| matches!(t, Term::Var(w) if images.insert(*w)))
        && acc.iter().all(|(_, t)| matches!(t, Term::Var(w) if !vars.contains(w) || acc.get(*w).is_some()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeEntry {
    pub answer: Substitution,
    pub instance: Atom,
    pub status: Status,
}

/// Term-matching verdicts for the instances computed by SLD resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeReport {
    pub entries: Vec<BridgeEntry>,
    pub exhausted: bool,
}

impl BridgeReport {
    /// Answers whose instance term-matching resolution refutes.
    pub fn violations(&self) -> impl Iterator<Item = &BridgeEntry> {
        self.entries.iter().filter(|e| e.status == Status::Failed)
    }

    pub fn inconclusive(&self) -> impl Iterator<Item = &BridgeEntry> {
        self.entries.iter().filter(|e| e.status == Status::Unknown)
    }

    pub fn is_clean(&self) -> bool {
        self.violations().next().is_none()
    }
}

impl fmt::Display for BridgeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{}  {}  {}", e.status, e.answer, e.instance)?;
        }
        Ok(())
    }
}

/// Runs SLD on `goal`, then term-matching resolution on each computed
/// instance with depth bound `depth`.
pub fn check_bridge(
    program: &Program,
    goal: &Atom,
    limits: &SldLimits,
    depth: usize,
) -> Result<BridgeReport> {
    let result = sld_solve(program, std::slice::from_ref(goal), limits)?;
    let mut entries = Vec::new();
    for a in result.answers {
        let instance = a.subst.apply_atom(goal);
        let arity = instance.max_var() as usize;
        check_goal(program, &instance, arity)?;
        let status = tm_prove(program, &instance, arity, depth)?.status();
        entries.push(BridgeEntry { answer: a.subst, instance, status });
    }
    Ok(BridgeReport { entries, exhausted: result.exhausted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_indexed_atom, parse_program};

    fn atom(s: &str) -> Atom {
        parse_indexed_atom(s).unwrap()
    }

    fn corpus(name: &str) -> Program {
        let src = match name {
            "gc" => include_str!("../corpus/gc.lp"),
            "listnat" => include_str!("../corpus/listnat.lp"),
            "bad" => include_str!("../corpus/bad.lp"),
            _ => unreachable!(),
        };
        parse_program(src).unwrap()
    }

    #[test]
    fn gc_first_answer() {
        let r = sld_solve(&corpus("gc"), &[atom("connected(X1,X2)")], &SldLimits::default()).unwrap();
        assert_eq!(r.answers.len(), 1);
        assert_eq!(r.answers[0].subst.to_string(), "{X2 -> X1}");
        assert_eq!(r.answers[0].steps, 1);
        assert!(!r.exhausted);
    }

    #[test]
    fn listnat_first_answer() {
        let p = corpus("listnat");
        let goal = [atom("list(cons(X1,X2))")];
        for strategy in [Strategy::DepthFirst, Strategy::IterativeDeepening] {
            let limits = SldLimits { strategy, ..SldLimits::default() };
            let r = sld_solve(&p, &goal, &limits).unwrap();
            assert_eq!(r.answers[0].subst.to_string(), "{X1 -> 0, X2 -> nil}");
            assert_eq!(r.answers[0].trace, [3, 0, 2]);
            assert!(replay(&p, &goal, &r.answers[0]));
        }
    }

    #[test]
    fn bad_exhausts_the_bound() {
        let limits = SldLimits { max_steps: 100, ..SldLimits::default() };
        let r = sld_solve(&corpus("bad"), &[atom("bad(X1)")], &limits).unwrap();
        assert!(r.answers.is_empty());
        assert!(r.exhausted);
    }

    #[test]
    fn empty_goal_has_the_identity_answer() {
        let r = sld_solve(&corpus("gc"), &[], &SldLimits::default()).unwrap();
        assert_eq!(r.answers.len(), 1);
        assert!(r.answers[0].subst.is_identity());
        assert_eq!(r.answers[0].steps, 0);
    }

    #[test]
    fn limits_are_validated() {
        let p = corpus("gc");
        for limits in [
            SldLimits { max_steps: 0, ..SldLimits::default() },
            SldLimits { max_answers: 0, ..SldLimits::default() },
        ] {
            assert!(matches!(sld_solve(&p, &[], &limits), Err(Error::InvalidBound(_))));
        }
        assert!(matches!(
            sld_solve(&p, &[atom("connected(X1)")], &SldLimits::default()),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn several_answers_in_order_and_canonical() {
        let p = corpus("listnat");
        let limits = SldLimits { max_answers: 3, strategy: Strategy::DepthFirst, ..SldLimits::default() };
        let r = sld_solve(&p, &[atom("nat(X1)")], &limits).unwrap();
        let got: Vec<String> = r.answers.iter().map(|a| a.subst.to_string()).collect();
        assert_eq!(got, ["{X1 -> 0}", "{X1 -> s(0)}", "{X1 -> s(s(0))}"]);
        let r = sld_solve(&p, &[atom("list(X1)")], &SldLimits { max_answers: 2, ..limits }).unwrap();
        assert_eq!(r.answers[1].subst.to_string(), "{X1 -> cons(0,nil)}");
        let r = sld_solve(
            &corpus("gc"),
            &[atom("connected(X1,X2)")],
            &SldLimits { max_answers: 5, max_steps: 50, ..limits },
        )
        .unwrap();
        assert_eq!(r.answers.len(), 1);
        assert!(!r.exhausted);
    }

    #[test]
    fn non_goal_variables_are_renumbered() {
        let p = parse_program("p(f(X, Y)).").unwrap();
        let r = sld_solve(&p, &[atom("p(X1)")], &SldLimits::default()).unwrap();
        assert_eq!(r.answers[0].subst.to_string(), "{X1 -> f(X2,X3)}");
    }

    #[test]
    fn replay_rejects_wrong_traces() {
        let p = corpus("listnat");
        let goal = [atom("list(cons(X1,X2))")];
        let mut a = sld_solve(&p, &goal, &SldLimits::default()).unwrap().answers.remove(0);
        a.trace = vec![3, 1];
        assert!(!replay(&p, &goal, &a));
    }

    #[test]
    fn bridge_examples() {
        let r =
            check_bridge(&corpus("listnat"), &atom("list(cons(X1,X2))"), &SldLimits::default(), 9).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].status, Status::Proved);
        let r = check_bridge(&corpus("gc"), &atom("connected(X1,X2)"), &SldLimits::default(), 3).unwrap();
        assert_eq!(r.entries[0].instance, atom("connected(X1,X1)"));
        assert_eq!(r.entries[0].status, Status::Proved);
        let r = check_bridge(
            &corpus("listnat"),
            &atom("list(cons(s(X1),foo))"),
            &SldLimits { max_steps: 200, ..SldLimits::default() },
            3,
        )
        .unwrap();
        assert!(r.entries.is_empty() && r.is_clean());
    }
}
