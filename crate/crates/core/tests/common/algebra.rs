//! Strategies and properties for matching, unification, composition and
//! arrows, shared by the property tests and the acceptance run.

use coalp::subst::{compose, mgm, mgu, Arrow, Substitution};
use coalp::syntax::{Atom, Term, Var};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Check = Result<(), TestCaseError>;

pub fn arb_term(vars: u32, depth: u32) -> impl Strategy<Value = Term> {
    let leaf =
        prop_oneof![(1..=vars).prop_map(Term::var), Just(Term::constant("a")), Just(Term::constant("b")),];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app("g", vec![x, y])),
        ]
    })
}

pub fn arb_atom(vars: u32, depth: u32) -> impl Strategy<Value = Atom> {
    (arb_term(vars, depth), arb_term(vars, depth)).prop_map(|(x, y)| Atom::new("p", vec![x, y]))
}

pub fn arb_subst(vars: u32, depth: u32) -> impl Strategy<Value = Substitution> {
    prop::collection::vec(arb_term(vars, depth), vars as usize).prop_map(|ts| {
        Substitution::from_bindings(ts.into_iter().enumerate().map(|(i, t)| (Var(i as u32 + 1), t)))
    })
}

pub fn arb_arrow(source: usize, target: usize) -> impl Strategy<Value = Arrow> {
    let term = if source == 0 {
        prop_oneof![Just(Term::constant("a")), Just(Term::constant("b"))].boxed()
    } else {
        arb_term(source as u32, 2).boxed()
    };
    prop::collection::vec(term, target).prop_map(move |t| Arrow::new(source, t).unwrap())
}

/// Arrows `f: n -> m`, `g: m -> k` and an atom over `k`.
pub fn arb_composable() -> impl Strategy<Value = (Arrow, Arrow, Atom)> {
    (0usize..=3, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(n, m, k)| (arb_arrow(n, m), arb_arrow(m, k), arb_atom(k as u32, 2)))
}

/// An arrow `n -> m` and an atom with two variables above `m`.
pub fn arb_extended() -> impl Strategy<Value = (Arrow, Atom)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| (arb_arrow(n, m), arb_atom(m as u32 + 2, 2)))
}

/// Ground terms of depth at most 1 over `a, b, f/1, g/2`.
fn ground_terms() -> Vec<Term> {
    let leaves = [Term::constant("a"), Term::constant("b")];
    let mut out = leaves.to_vec();
    for x in &leaves {
        out.push(Term::app("f", vec![x.clone()]));
        for y in &leaves {
            out.push(Term::app("g", vec![x.clone(), y.clone()]));
        }
    }
    out
}

fn subterms(t: &Term, out: &mut Vec<Term>) {
    if !out.contains(t) {
        out.push(t.clone());
    }
    if let Term::App(_, args) = t {
        args.iter().for_each(|a| subterms(a, out));
    }
}

/// Every assignment of terms from `pool` to `vars`.
fn assignments(vars: &[Var], pool: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Substitution::identity()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                pool.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(v, t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

pub fn mgm_is_sound_and_unique(pattern: &Atom, s: &Substitution) -> Check {
    let target = s.apply_atom(pattern);
    let m = mgm(pattern, &target).expect("an instance is always matched");
    prop_assert_eq!(m.apply_atom(pattern), target.clone());
    // only pattern variables are bound, and they agree with `s` there
    let vars = pattern.vars();
    prop_assert!(m.domain().all(|v| vars.contains(&v)));
    for v in vars {
        prop_assert_eq!(m.apply_term(&Term::Var(v)), s.apply_term(&Term::Var(v)));
    }
    Ok(())
}

pub fn mgm_agrees_with_subterm_enumeration(pattern: &Atom, target: &Atom) -> Check {
    // any matcher sends each pattern variable to a subterm of the target
    let mut pool = Vec::new();
    target.args.iter().for_each(|t| subterms(t, &mut pool));
    let vars = pattern.vars();
    let candidates = assignments(&vars, &pool);
    let found: Vec<&Substitution> = candidates.iter().filter(|s| s.apply_atom(pattern) == *target).collect();
    match mgm(pattern, target) {
        Some(m) => {
            prop_assert_eq!(m.apply_atom(pattern), target.clone());
            prop_assert_eq!(found.len(), 1);
            for &v in &vars {
                prop_assert_eq!(m.apply_term(&Term::Var(v)), found[0].apply_term(&Term::Var(v)));
            }
        }
        None => prop_assert!(found.is_empty()),
    }
    Ok(())
}

pub fn mgu_is_sound_and_idempotent(t: &Atom, u: &Atom) -> Check {
    if let Some(s) = mgu(t, u) {
        prop_assert_eq!(s.apply_atom(t), s.apply_atom(u));
        prop_assert!(s.is_idempotent());
        prop_assert_eq!(compose(&s, &s), s);
    }
    Ok(())
}

pub fn mgu_is_most_general_by_enumeration(t: &Atom, u: &Atom) -> Check {
    let mut vars = t.vars();
    vars.extend(u.vars());
    vars.sort();
    vars.dedup();
    let sigma = mgu(t, u);
    for tau in assignments(&vars, &ground_terms()) {
        let unifies = tau.apply_atom(t) == tau.apply_atom(u);
        match &sigma {
            None => prop_assert!(!unifies, "{} unifies {} and {}", tau, t, u),
            Some(s) if unifies => {
                // tau factors through the mgu: tau = tau . s
                for &v in &vars {
                    prop_assert_eq!(
                        tau.apply_term(&s.apply_term(&Term::Var(v))),
                        tau.apply_term(&Term::Var(v))
                    );
                }
            }
            Some(_) => {}
        }
    }
    Ok(())
}

pub fn compose_applies_right_then_left(s1: &Substitution, s2: &Substitution, a: &Atom) -> Check {
    prop_assert_eq!(compose(s1, s2).apply_atom(a), s1.apply_atom(&s2.apply_atom(a)));
    Ok(())
}

pub fn compose_is_associative_with_identity(
    s1: &Substitution,
    s2: &Substitution,
    s3: &Substitution,
    a: &Atom,
) -> Check {
    let id = Substitution::identity();
    prop_assert_eq!(compose(&id, s1), s1.clone());
    prop_assert_eq!(compose(s1, &id), s1.clone());
    let left = compose(&compose(s1, s2), s3);
    let right = compose(s1, &compose(s2, s3));
    prop_assert_eq!(left.apply_atom(a), right.apply_atom(a));
    Ok(())
}

pub fn arrows_act_functorially(f: &Arrow, g: &Arrow, a: &Atom) -> Check {
    // g: m -> k acts first on an atom over k, then f: n -> m
    let composite = g.after(f).unwrap();
    prop_assert_eq!(composite.source(), f.source());
    prop_assert_eq!(composite.target(), g.target());
    prop_assert_eq!(composite.apply_atom(a).unwrap(), f.apply_atom(&g.apply_atom(a).unwrap()).unwrap());
    prop_assert_eq!(Arrow::identity(g.target()).apply_atom(a).unwrap(), a.clone());
    prop_assert_eq!(&g.after(&Arrow::identity(g.source())).unwrap(), g);
    prop_assert_eq!(&Arrow::identity(g.target()).after(g).unwrap(), g);
    Ok(())
}

pub fn extended_action_shifts_fresh_variables(f: &Arrow, a: &Atom) -> Check {
    let mapped = f.apply_extended_atom(a);
    let (n, m) = (f.source() as u32, f.target() as u32);
    // fresh variables m+j land on n+j; base variables go through f
    let expect = a.map_vars(&mut |v: Var| {
        if v.0 <= m {
            f.tuple()[v.index() - 1].clone()
        } else {
            Term::var(v.0 - m + n)
        }
    });
    prop_assert_eq!(mapped, expect);
    Ok(())
}

fn report<T: std::fmt::Debug>(
    name: &str,
    r: Result<(), proptest::test_runner::TestError<T>>,
) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

/// Runs every property for `cases` cases with a fixed seed; returns the
/// number of properties checked or the first failure.
pub fn run_all(cases: u32) -> Result<usize, String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let runner = || {
        TestRunner::new_with_rng(
            config.clone(),
            proptest::test_runner::TestRng::deterministic_rng(config.rng_algorithm),
        )
    };
    report(
        "mgm soundness",
        runner().run(&(arb_atom(3, 3), arb_subst(3, 2)), |(p, s)| mgm_is_sound_and_unique(&p, &s)),
    )?;
    report(
        "mgm uniqueness",
        runner().run(&(arb_atom(2, 2), arb_atom(3, 3)), |(p, t)| mgm_agrees_with_subterm_enumeration(&p, &t)),
    )?;
    report(
        "mgu soundness",
        runner().run(&(arb_atom(3, 3), arb_atom(3, 3)), |(t, u)| mgu_is_sound_and_idempotent(&t, &u)),
    )?;
    report(
        "mgu generality",
        runner().run(&(arb_atom(3, 3), arb_atom(3, 3)), |(t, u)| mgu_is_most_general_by_enumeration(&t, &u)),
    )?;
    report(
        "compose",
        runner().run(&(arb_subst(3, 2), arb_subst(3, 2), arb_atom(3, 2)), |(s1, s2, a)| {
            compose_applies_right_then_left(&s1, &s2, &a)
        }),
    )?;
    report(
        "compose laws",
        runner()
            .run(&(arb_subst(3, 2), arb_subst(3, 2), arb_subst(3, 2), arb_atom(3, 2)), |(s1, s2, s3, a)| {
                compose_is_associative_with_identity(&s1, &s2, &s3, &a)
            }),
    )?;
    report(
        "functoriality",
        runner().run(&arb_composable(), |(f, g, a)| arrows_act_functorially(&f, &g, &a)),
    )?;
    report(
        "extended action",
        runner().run(&arb_extended(), |(f, a)| extended_action_shifts_fresh_variables(&f, &a)),
    )?;
    Ok(8)
}
