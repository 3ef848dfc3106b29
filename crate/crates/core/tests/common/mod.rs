//! Helpers shared by the integration tests: corpus loading, seeded random
//! programs and an independent least-fixed-point oracle for ground programs.
#![allow(dead_code)]

pub mod algebra;

use std::collections::BTreeSet;
use std::path::PathBuf;

use coalp::syntax::{parse_indexed_atom, parse_program, Atom, Program};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const CORPUS: [&str; 5] = ["listnat", "listnat_plus", "gc", "bad", "ex33"];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.lp"))
}

pub fn corpus(name: &str) -> Program {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    parse_program(&text).expect("corpus parses")
}

pub fn atom(s: &str) -> Atom {
    parse_indexed_atom(s).expect("atom parses")
}

/// Seeded generator of small programs in surface syntax.
pub struct Gen {
    pub rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        use rand::SeedableRng;
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Variable-free program over at most `atoms` distinct atoms with at
    /// most `clauses` clauses.
    pub fn ground_source(&mut self, atoms: usize, clauses: usize) -> String {
        let pool = ["a", "b", "c", "d", "p(z)", "p(s(z))", "q(z,z)", "q(z,s(z))"];
        let mut chosen: Vec<&str> = pool.to_vec();
        chosen.shuffle(&mut self.rng);
        chosen.truncate(self.rng.gen_range(1..=atoms));
        let n = self.rng.gen_range(0..=clauses);
        let mut src = String::new();
        for _ in 0..n {
            let head = chosen.choose(&mut self.rng).unwrap();
            let len = self.rng.gen_range(0..=3);
            let body: Vec<&str> = (0..len).map(|_| *chosen.choose(&mut self.rng).unwrap()).collect();
            if body.is_empty() {
                src.push_str(&format!("{head}.\n"));
            } else {
                src.push_str(&format!("{head} :- {}.\n", body.join(", ")));
            }
        }
        src
    }

    pub fn ground_program(&mut self, atoms: usize, clauses: usize) -> Program {
        parse_program(&self.ground_source(atoms, clauses)).expect("generated program parses")
    }

    fn term(&mut self, vars: &[&str], depth: usize) -> String {
        let leaf = self.rng.gen_bool(0.5) || depth == 0;
        if leaf {
            if !vars.is_empty() && self.rng.gen_bool(0.6) {
                return vars.choose(&mut self.rng).unwrap().to_string();
            }
            return ["a", "b"].choose(&mut self.rng).unwrap().to_string();
        }
        if self.rng.gen_bool(0.5) {
            format!("f({})", self.term(vars, depth - 1))
        } else {
            format!("g({},{})", self.term(vars, depth - 1), self.term(vars, depth - 1))
        }
    }

    fn atom(&mut self, vars: &[&str], depth: usize) -> String {
        match self.rng.gen_range(0..3) {
            0 => format!("p({})", self.term(vars, depth)),
            1 => format!("q({},{})", self.term(vars, depth), self.term(vars, depth)),
            _ => format!("r({})", self.term(vars, depth)),
        }
    }

    /// First-order program over `p/1, q/2, r/1` and `a, b, f/1, g/2`. When
    /// `existential` is false, body variables are restricted to the head's.
    pub fn program_source(&mut self, clauses: usize, existential: bool) -> String {
        let mut src = String::new();
        for _ in 0..self.rng.gen_range(1..=clauses) {
            let head_vars: Vec<&str> = ["X", "Y"][..self.rng.gen_range(0..=2)].to_vec();
            let head = self.atom(&head_vars, 1);
            let mut used = Vec::new();
            for v in &head_vars {
                if head.contains(v) {
                    used.push(*v);
                }
            }
            let mut body_vars = used.clone();
            if existential {
                body_vars.push("Z");
            }
            let len = self.rng.gen_range(0..=2);
            let body: Vec<String> = (0..len).map(|_| self.atom(&body_vars, 1)).collect();
            if body.is_empty() {
                src.push_str(&format!("{head}.\n"));
            } else {
                src.push_str(&format!("{head} :- {}.\n", body.join(", ")));
            }
        }
        src
    }

    pub fn program(&mut self, clauses: usize, existential: bool) -> Program {
        parse_program(&self.program_source(clauses, existential)).expect("generated program parses")
    }

    /// Goal atom over the generated signature with variables `X1..`.
    pub fn goal(&mut self, vars: usize) -> Atom {
        let names: Vec<String> = (1..=vars).map(|i| format!("X{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let text = self.atom(&refs, 2);
        let (a, _) = atom(&text).canonical();
        a
    }
}

/// Least Herbrand model of a ground program by naive iteration.
pub fn least_model(program: &Program) -> BTreeSet<Atom> {
    let mut model = BTreeSet::new();
    loop {
        let before = model.len();
        for c in &program.clauses {
            if c.body.iter().all(|b| model.contains(b)) {
                model.insert(c.head.clone());
            }
        }
        if model.len() == before {
            return model;
        }
    }
}

/// Runs `f` on a thread with a large stack; deep derivations recurse deeply.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(1 << 28)
        .spawn(f)
        .expect("spawn test thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}
