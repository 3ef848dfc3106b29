//! Logic programs as coalgebras: coinductive and-or trees, term-matching
//! resolution, SLD resolution, and the ground and first-order coalgebraic
//! semantics of Horn-clause programs.

pub mod cli;
pub mod coalgebra;
pub mod cotree;
pub mod error;
pub mod generate;
pub mod sld;
pub mod subst;
pub mod syntax;
pub mod tm;

pub use cotree::{
    build_tree, map_tree, render, success_subtree, tree_equal_upto_renaming, tree_leq, CoTree, Format,
    Outcome, ProofTree, Status,
};
pub use error::{Error, Result};
pub use sld::{check_bridge, sld_solve, Answer, SldLimits, SldResult, Strategy};
pub use subst::{arrow_apply, compose, mgm, mgu, rename_apart, Arrow, Substitution};
pub use syntax::{
    classify_program, parse_atom, parse_program, Atom, Classification, Clause, Goal, Program, Term, Var,
};
pub use tm::tm_prove;
