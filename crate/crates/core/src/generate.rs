//! Deterministic enumeration of terms, atoms and arrows over a program's
//! signature, used by the checkers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::subst::Arrow;
use crate::syntax::{Atom, Signature, Sym, Term};

/// Bounds of the generated search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Space {
    /// Largest number of variables in an arrow's source or target.
    pub max_arity: usize,
    /// Depth of the sampled arrow components.
    pub term_depth: usize,
    /// Sampled arrows per (source, target) pair, on top of the exhaustive
    /// list of arrows whose components are variables or constants.
    pub samples: usize,
    /// Cap on the atoms checked per arity.
    pub max_atoms: usize,
    pub seed: u64,
}

impl Default for Space {
    fn default() -> Space {
        Space { max_arity: 3, term_depth: 2, samples: 24, max_atoms: 200, seed: 0x5eed }
    }
}

fn symbols(sig: &Signature) -> (Vec<Sym>, Vec<(Sym, usize)>) {
    let constants = sig.constants();
    let compound = sig.functors.iter().filter(|(_, &a)| a > 0).map(|(f, &a)| (f.clone(), a)).collect();
    (constants, compound)
}

/// Every term over `x1..x(vars)` and the signature's functors, up to `depth`.
pub fn terms(sig: &Signature, vars: usize, depth: usize) -> Vec<Term> {
    let (constants, compound) = symbols(sig);
    let mut level: Vec<Term> = (1..=vars as u32).map(Term::var).collect();
    level.extend(constants.iter().map(|c| Term::App(c.clone(), Vec::new())));
    for _ in 0..depth {
        let mut next = level.clone();
        for (f, arity) in &compound {
            for args in tuples(&level, *arity) {
                let t = Term::App(f.clone(), args);
                if !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        level = next;
    }
    level
}

/// All `len`-tuples of `items`, in lexicographic order.
pub fn tuples<T: Clone>(items: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, vars: usize, depth: usize) -> Option<Term> {
    let (constants, compound) = symbols(sig);
    let leaves = vars + constants.len();
    if depth > 0 && !compound.is_empty() && (leaves == 0 || rng.gen_bool(0.5)) {
        let (f, arity) = compound.choose(rng)?.clone();
        let args = (0..arity).map(|_| random_term(rng, sig, vars, depth - 1)).collect::<Option<_>>()?;
        return Some(Term::App(f, args));
    }
    if leaves == 0 {
        return None;
    }
    let i = rng.gen_range(0..leaves);
    Some(if i < vars { Term::var(i as u32 + 1) } else { Term::App(constants[i - vars].clone(), Vec::new()) })
}

/// Arrows `n -> m` for `n, m <= max_arity`: all tuples of variables and
/// constants, then a seeded sample of tuples of deeper terms.
pub fn arrows(sig: &Signature, space: &Space) -> Vec<Arrow> {
    let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
    let mut out = Vec::new();
    for n in 0..=space.max_arity {
        let shallow = terms(sig, n, 0);
        for m in 0..=space.max_arity {
            let mut pair: Vec<Arrow> = tuples(&shallow, m)
                .into_iter()
                .map(|t| Arrow::new(n, t).expect("components are over the source"))
                .collect();
            for _ in 0..space.samples {
                let tuple: Option<Vec<Term>> =
                    (0..m).map(|_| random_term(&mut rng, sig, n, space.term_depth)).collect();
                if let Some(t) = tuple {
                    let f = Arrow::new(n, t).expect("components are over the source");
                    if !pair.contains(&f) {
                        pair.push(f);
                    }
                }
            }
            out.extend(pair);
        }
    }
    out
}

/// Injective variable tuples `n -> m` for `m <= n <= max_arity`.
pub fn injections(max_arity: usize) -> Vec<Arrow> {
    let mut out = Vec::new();
    for n in 0..=max_arity {
        let vars: Vec<u32> = (1..=n as u32).collect();
        for m in 0..=n {
            for t in tuples(&vars, m) {
                let mut seen = t.clone();
                seen.sort();
                seen.dedup();
                if seen.len() == m {
                    out.push(Arrow::from_vars(n, &t).expect("variables are in range"));
                }
            }
        }
    }
    out
}

/// Atoms over `x1..x(vars)` with arguments of depth at most 1, capped at
/// `space.max_atoms` by seeded sampling.
pub fn atoms(sig: &Signature, vars: usize, space: &Space) -> Vec<Atom> {
    let args = terms(sig, vars, 1);
    let mut out: Vec<Atom> = sig
        .predicates
        .iter()
        .flat_map(|(p, &arity)| {
            tuples(&args, arity).into_iter().map(move |a| Atom { pred: p.clone(), args: a })
        })
        .collect();
    if out.len() > space.max_atoms {
        let mut rng = ChaCha8Rng::seed_from_u64(space.seed ^ vars as u64);
        out.shuffle(&mut rng);
        out.truncate(space.max_atoms);
        out.sort();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn term_enumeration() {
        let p = parse_program(include_str!("../corpus/listnat.lp")).unwrap();
        assert_eq!(terms(&p.signature, 1, 0).len(), 3);
        // x1, 0, nil; s of those; cons of pairs
        assert_eq!(terms(&p.signature, 1, 1).len(), 3 + 3 + 9);
        assert!(terms(&Signature::default(), 0, 2).is_empty());
    }

    #[test]
    fn arrows_are_deterministic_and_well_formed() {
        let p = parse_program(include_str!("../corpus/listnat.lp")).unwrap();
        let space = Space::default();
        let a = arrows(&p.signature, &space);
        assert_eq!(a, arrows(&p.signature, &space));
        assert!(a.iter().any(|f| f.to_string() == "(0):0->1"));
        assert!(a.iter().any(|f| f.tuple().iter().any(|t| t.depth() == 2)));
        // no constants in GC: nothing maps 0 variables to 1
        let gc = parse_program(include_str!("../corpus/gc.lp")).unwrap();
        assert!(arrows(&gc.signature, &space).iter().all(|f| f.source() > 0 || f.target() == 0));
    }

    #[test]
    fn injection_list() {
        let inj = injections(3);
        assert!(inj.iter().all(Arrow::is_injection));
        // sum over n of n!/(n-m)! for m <= n
        assert_eq!(inj.len(), 1 + 2 + 5 + 16);
    }

    #[test]
    fn atoms_respect_the_cap() {
        let p = parse_program(include_str!("../corpus/listnat.lp")).unwrap();
        let space = Space { max_atoms: 10, ..Space::default() };
        assert_eq!(atoms(&p.signature, 2, &space).len(), 10);
        assert!(atoms(&p.signature, 2, &space).iter().all(|a| a.max_var() <= 2));
    }
}
