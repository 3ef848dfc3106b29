//! First-order syntax: terms, atoms, Horn clauses and programs, together with
//! the Prolog-style text format used for program files and goals.
//!
//! Variables are plain positive indices. A parsed clause is numbered
//! canonically: head variables first (by first occurrence in the head), then
//! the body-only ("existential") variables by first occurrence in the body.
//! Surface names are kept on the side for diagnostics only and never take
//! part in equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result, SymbolKind};

/// Interned-ish symbol name shared between terms.
pub type Sym = Arc<str>;

/// Head and body of a clause as written.
type ParsedClause = (Atom, Vec<Atom>);

/// A variable `x_i`, `i >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// A first-order term. Constants are 0-ary applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(i: u32) -> Term {
        Term::Var(Var(i))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    /// Pushes variables in left-to-right first-occurrence order, skipping repeats.
    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn max_var(&self) -> u32 {
        match self {
            Term::Var(v) => v.0,
            Term::App(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// Height of the term tree; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::App(name, args) => Term::App(name.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) => {
                f.write_str(name)?;
                write_args(f, args)
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

/// A predicate applied to terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: pred.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn max_var(&self) -> u32 {
        self.args.iter().map(Term::max_var).max().unwrap_or(0)
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.map_vars(f)).collect() }
    }

    /// Renumbers variables `1..=n` by first occurrence. Returns the renamed
    /// atom and `n`.
    pub fn canonical(&self) -> (Atom, usize) {
        let order = self.vars();
        let renamed = self.map_vars(&mut |v| {
            let pos = order.iter().position(|w| *w == v).unwrap();
            Term::var(pos as u32 + 1)
        });
        (renamed, order.len())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        write_args(f, &self.args)
    }
}

pub fn max_var_of(atoms: &[Atom]) -> u32 {
    atoms.iter().map(Atom::max_var).max().unwrap_or(0)
}

/// A Horn clause `head :- body`.
///
/// `head_arity` is the number of distinct head variables (`x1..xn`) and
/// `total_arity` the number of distinct variables in the clause (`x1..x(n+k)`).
#[derive(Debug, Clone)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
    pub head_arity: usize,
    pub total_arity: usize,
    /// Surface name of each variable, indexed by `var - 1`.
    pub var_names: Vec<String>,
}

impl PartialEq for Clause {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head
            && self.body == other.body
            && self.head_arity == other.head_arity
            && self.total_arity == other.total_arity
    }
}

impl Eq for Clause {}

impl Hash for Clause {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.head.hash(state);
        self.body.hash(state);
    }
}

impl Clause {
    /// Builds a clause and renumbers it canonically. Variable names default to
    /// `X<i>` of the canonical index.
    pub fn new(head: Atom, body: Vec<Atom>) -> Clause {
        let names = BTreeMap::new();
        Clause::canonicalize(head, body, &names)
    }

    fn canonicalize(head: Atom, body: Vec<Atom>, names: &BTreeMap<Var, String>) -> Clause {
        let mut order = Vec::new();
        head.collect_vars(&mut order);
        let head_arity = order.len();
        body.iter().for_each(|b| b.collect_vars(&mut order));
        let total_arity = order.len();
        let mut rename = |v: Var| {
            let pos = order.iter().position(|w| *w == v).unwrap();
            Term::var(pos as u32 + 1)
        };
        let new_head = head.map_vars(&mut rename);
        let new_body = body.iter().map(|b| b.map_vars(&mut rename)).collect();
        let var_names = order
            .iter()
            .enumerate()
            .map(|(i, v)| names.get(v).cloned().unwrap_or_else(|| format!("X{}", i + 1)))
            .collect();
        Clause { head: new_head, body: new_body, head_arity, total_arity, var_names }
    }

    pub fn is_existential(&self) -> bool {
        self.total_arity > self.head_arity
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.total_arity == 0
    }

    /// Body-only variables `x(n+1)..x(n+k)`.
    pub fn existential_vars(&self) -> impl Iterator<Item = Var> {
        (self.head_arity + 1..=self.total_arity).map(|i| Var(i as u32))
    }

    pub fn var_name(&self, v: Var) -> String {
        self.var_names.get(v.index().wrapping_sub(1)).cloned().unwrap_or_else(|| v.to_string())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

/// Functor and predicate arities seen in a program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub functors: BTreeMap<Sym, usize>,
    pub predicates: BTreeMap<Sym, usize>,
}

impl Signature {
    pub fn check_atom(&self, atom: &Atom) -> Result<()> {
        check_arity(&self.predicates, SymbolKind::Predicate, &atom.pred, atom.arity())?;
        atom.args.iter().try_for_each(|t| self.check_term(t))
    }

    fn check_term(&self, term: &Term) -> Result<()> {
        if let Term::App(name, args) = term {
            check_arity(&self.functors, SymbolKind::Functor, name, args.len())?;
            args.iter().try_for_each(|t| self.check_term(t))?;
        }
        Ok(())
    }

    /// Records the symbols of `atom`, failing on a conflicting arity.
    pub fn record_atom(&mut self, atom: &Atom) -> Result<()> {
        record_arity(&mut self.predicates, SymbolKind::Predicate, &atom.pred, atom.arity())?;
        atom.args.iter().try_for_each(|t| self.record_term(t))
    }

    fn record_term(&mut self, term: &Term) -> Result<()> {
        if let Term::App(name, args) = term {
            record_arity(&mut self.functors, SymbolKind::Functor, name, args.len())?;
            args.iter().try_for_each(|t| self.record_term(t))?;
        }
        Ok(())
    }

    /// Constants (0-ary functors) in name order.
    pub fn constants(&self) -> Vec<Sym> {
        self.functors.iter().filter(|(_, &a)| a == 0).map(|(n, _)| n.clone()).collect()
    }
}

fn check_arity(table: &BTreeMap<Sym, usize>, kind: SymbolKind, name: &Sym, found: usize) -> Result<()> {
    match table.get(name) {
        Some(&expected) if expected != found => {
            Err(Error::ArityMismatch { kind, symbol: name.to_string(), expected, found })
        }
        _ => Ok(()),
    }
}

fn record_arity(table: &mut BTreeMap<Sym, usize>, kind: SymbolKind, name: &Sym, found: usize) -> Result<()> {
    check_arity(table, kind, name, found)?;
    table.insert(name.clone(), found);
    Ok(())
}

/// An ordered sequence of clauses over a shared signature.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub signature: Signature,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Result<Program> {
        let mut signature = Signature::default();
        for c in &clauses {
            signature.record_atom(&c.head)?;
            c.body.iter().try_for_each(|b| signature.record_atom(b))?;
        }
        Ok(Program { clauses, signature })
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.clauses.iter().all(Clause::is_ground)
    }

    /// Predicates with at least one clause. Atoms of any other predicate are
    /// open: the program says nothing about them either way.
    pub fn defined_predicates(&self) -> BTreeSet<Sym> {
        self.clauses.iter().map(|c| c.head.pred.clone()).collect()
    }

    /// Every atom occurring in the program, in sorted order.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.clauses.iter().flat_map(|c| std::iter::once(&c.head).chain(c.body.iter())).cloned().collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn print_atom(atom: &Atom) -> String {
    atom.to_string()
}

pub fn print_program(program: &Program) -> String {
    program.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    NonExistential,
    /// Zero-based indices of the clauses with body-only variables.
    Existential(Vec<usize>),
}

pub fn classify_program(program: &Program) -> Classification {
    let offending: Vec<usize> =
        program.clauses.iter().enumerate().filter(|(_, c)| c.is_existential()).map(|(i, _)| i).collect();
    if offending.is_empty() {
        Classification::NonExistential
    } else {
        Classification::Existential(offending)
    }
}

/// A goal atom with its variables numbered `1..=arity` by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub atom: Atom,
    pub arity: usize,
    pub var_names: Vec<String>,
}

pub fn parse_program(source: &str) -> Result<Program> {
    let mut parser = Parser::new(source)?;
    let mut signature = Signature::default();
    let mut clauses = Vec::new();
    while !parser.at_end() {
        let start = parser.pos();
        let (clause, names) = parser.clause()?;
        let located = |e: Error| e.at(start.0, start.1);
        signature.record_atom(&clause.0).map_err(located)?;
        for b in &clause.1 {
            signature.record_atom(b).map_err(located)?;
        }
        clauses.push(Clause::canonicalize(clause.0, clause.1, &names));
    }
    Ok(Program { clauses, signature })
}

/// Parses a single atom (an optional trailing `.` is accepted) and renumbers
/// its variables by first occurrence.
pub fn parse_atom(source: &str, context: &Signature) -> Result<Goal> {
    let mut parser = Parser::new(source)?;
    let atom = parser.atom()?;
    parser.eat(&Tok::Dot);
    parser.expect_end()?;
    context.check_atom(&atom)?;
    let order = atom.vars();
    let var_names = order.iter().map(|v| parser.names[v].clone()).collect();
    let (atom, arity) = atom.canonical();
    Ok(Goal { atom, arity, var_names })
}

/// Parses atom text in the printed form, where `X<i>` denotes `x_i` exactly.
/// Used to reload rendered trees and reports.
pub fn parse_indexed_atom(source: &str) -> Result<Atom> {
    let mut parser = Parser::new(source)?;
    parser.indexed = true;
    let atom = parser.atom()?;
    parser.expect_end()?;
    Ok(atom)
}

pub fn parse_indexed_term(source: &str) -> Result<Term> {
    let mut parser = Parser::new(source)?;
    parser.indexed = true;
    let term = parser.term()?;
    parser.expect_end()?;
    Ok(term)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Variable(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Arrow,
    LBrace,
    RBrace,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) | Tok::Variable(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '%' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ':' | '-' => {
                bump(&mut chars);
                let want = if c == ':' { '-' } else { '>' };
                if chars.peek() == Some(&want) {
                    bump(&mut chars);
                    out.push((if c == ':' { Tok::Neck } else { Tok::Arrow }, l, k));
                    continue;
                }
                return Err(Error::syntax(l, k, format!("unexpected character `{c}`")));
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut word = String::new();
                let numeric = c.is_ascii_digit();
                while let Some(&d) = chars.peek() {
                    let ok = if numeric { d.is_ascii_digit() } else { d.is_ascii_alphanumeric() || d == '_' };
                    if !ok {
                        break;
                    }
                    word.push(bump(&mut chars));
                }
                let tok =
                    if c.is_ascii_uppercase() || c == '_' { Tok::Variable(word) } else { Tok::Name(word) };
                out.push((tok, l, k));
                continue;
            }
            other => return Err(Error::syntax(l, k, format!("unexpected character `{other}`"))),
        };
        bump(&mut chars);
        out.push((tok, l, k));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    at: usize,
    end: (usize, usize),
    /// Surface variable name -> variable, reset per clause.
    vars: BTreeMap<String, Var>,
    names: BTreeMap<Var, String>,
    next_var: u32,
    /// When set, `X<i>` is read as `x_i` instead of numbering by occurrence.
    indexed: bool,
}

impl Parser {
    fn new(source: &str) -> Result<Parser> {
        let toks = lex(source)?;
        let end = source.lines().enumerate().last().map_or((1, 1), |(i, l)| (i + 1, l.len() + 1));
        Ok(Parser {
            toks,
            at: 0,
            end,
            vars: BTreeMap::new(),
            names: BTreeMap::new(),
            next_var: 1,
            indexed: false,
        })
    }

    fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn pos(&self) -> (usize, usize) {
        self.toks.get(self.at).map_or(self.end, |t| (t.1, t.2))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let (l, c) = self.pos();
        match self.peek() {
            Some(t) => Error::syntax(l, c, format!("expected {wanted}, found {t}")),
            None => Error::syntax(l, c, format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn clause(&mut self) -> Result<(ParsedClause, BTreeMap<Var, String>)> {
        self.vars.clear();
        self.names.clear();
        self.next_var = 1;
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.eat(&Tok::Neck) {
            body.push(self.atom()?);
            while self.eat(&Tok::Comma) {
                body.push(self.atom()?);
            }
        }
        self.expect(Tok::Dot)?;
        Ok(((head, body), std::mem::take(&mut self.names)))
    }

    fn atom(&mut self) -> Result<Atom> {
        match self.peek().cloned() {
            Some(Tok::Name(name)) if !name.starts_with(|c: char| c.is_ascii_digit()) => {
                self.at += 1;
                let args = self.args()?;
                Ok(Atom { pred: name.into(), args })
            }
            _ => Err(self.unexpected("a predicate name")),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>> {
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            args.push(self.term()?);
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Variable(name)) => {
                let (l, c) = self.pos();
                self.at += 1;
                Ok(Term::Var(self.variable(name, l, c)?))
            }
            Some(Tok::Name(name)) => {
                self.at += 1;
                let args = self.args()?;
                Ok(Term::App(name.into(), args))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn variable(&mut self, name: String, line: usize, col: usize) -> Result<Var> {
        if self.indexed {
            let index =
                name.strip_prefix('X').and_then(|d| d.parse::<u32>().ok()).filter(|&i| i >= 1).ok_or_else(
                    || Error::syntax(line, col, format!("expected an indexed variable X<n>, found `{name}`")),
                )?;
            return Ok(Var(index));
        }
        // Each `_` is a distinct anonymous variable.
        if name != "_" {
            if let Some(v) = self.vars.get(&name) {
                return Ok(*v);
            }
        }
        let v = Var(self.next_var);
        self.next_var += 1;
        if name != "_" {
            self.vars.insert(name.clone(), v);
        }
        self.names.insert(v, name);
        Ok(v)
    }
}

/// Parses `{X1 -> t, ...}` in the printed substitution form.
pub(crate) fn parse_indexed_bindings(source: &str) -> Result<Vec<(Var, Term)>> {
    let mut parser = Parser::new(source)?;
    parser.indexed = true;
    parser.expect(Tok::LBrace)?;
    let mut out = Vec::new();
    if !parser.eat(&Tok::RBrace) {
        loop {
            let (l, c) = parser.pos();
            let v = match parser.peek().cloned() {
                Some(Tok::Variable(name)) => {
                    parser.at += 1;
                    parser.variable(name, l, c)?
                }
                _ => return Err(parser.unexpected("a variable")),
            };
            parser.expect(Tok::Arrow)?;
            out.push((v, parser.term()?));
            if parser.eat(&Tok::RBrace) {
                break;
            }
            parser.expect(Tok::Comma)?;
        }
    }
    parser.expect_end()?;
    Ok(out)
}
