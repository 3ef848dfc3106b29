//! Command-line front end. [`run`] does all the work so that it can be
//! driven from tests; the binary only forwards the exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::coalgebra::{
    approximant_matches_tree, check_lax_square, ground_coalgebra, tree_to_approximant, unfold, SquareReport,
};
use crate::cotree::{build_tree, render, Format, Outcome, Status};
use crate::error::Error;
use crate::generate::{self, Space};
use crate::sld::{check_bridge, sld_solve, SldLimits, Strategy};
use crate::subst::Substitution;
use crate::syntax::{classify_program, parse_atom, parse_program, Classification, Goal, Program, Term};
use crate::tm::tm_prove;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

/// Strict failures shown without `--verbose`.
const SHOWN_STRICT_FAILURES: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "coalp", version, about = "Coinductive trees and resolution for logic programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Ascii,
    Dot,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Ascii => Format::Ascii,
            FormatArg::Dot => Format::Dot,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Dfs,
    Iddfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Lax naturality over generated arrows and atoms.
    Lax,
    /// Strict naturality along injections.
    Inj,
    /// Term-matching verdicts for SLD answers.
    Bridge,
    /// Unfoldings of a ground program against its coinductive trees.
    GroundOracle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Term-matching proof search.
    Prove {
        program: PathBuf,
        goal: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
        format: FormatArg,
    },
    /// SLD resolution: print computed answers.
    Solve {
        program: PathBuf,
        goal: String,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        max_answers: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Iddfs)]
        strategy: StrategyArg,
    },
    /// Render the coinductive tree of a goal.
    Tree {
        program: PathBuf,
        goal: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
        format: FormatArg,
    },
    /// Run a checker over generated arrows and atoms.
    Check {
        program: PathBuf,
        #[arg(long, value_enum)]
        what: Check,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        max_answers: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Iddfs)]
        strategy: StrategyArg,
        /// Print JSON records instead of report lines.
        #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
        format: FormatArg,
        /// Print every record, not only failures.
        #[arg(long)]
        verbose: bool,
    },
    /// Report clauses with body-only variables.
    Classify { program: PathBuf },
}

enum Failure {
    Io(PathBuf, std::io::Error),
    Data(Error),
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::InvalidBound(_) => Failure::Usage(e),
            other => Failure::Data(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Io(PathBuf::from("<stdout>"), e)
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Io(path, e)) => {
            let _ = writeln!(err, "coalp: {}: {e}", path.display());
            EXIT_NO_INPUT
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "coalp: {e}");
            EXIT_DATA
        }
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "coalp: {e}");
            EXIT_USAGE
        }
    }
}

fn load(path: &Path) -> Result<Program, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    Ok(parse_program(&text)?)
}

fn limits(max_steps: u64, max_answers: u64, strategy: StrategyArg) -> SldLimits {
    SldLimits {
        max_steps: max_steps as usize,
        max_answers: max_answers as usize,
        strategy: match strategy {
            StrategyArg::Dfs => Strategy::DepthFirst,
            StrategyArg::Iddfs => Strategy::IterativeDeepening,
        },
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Prove { program, goal, depth, format } => {
            let p = load(&program)?;
            let g = parse_atom(&goal, &p.signature)?;
            match tm_prove(&p, &g.atom, g.arity, depth)? {
                Outcome::Proved(proof) => {
                    writeln!(out, "Proved")?;
                    write_rendering(out, &render(&proof.to_cotree(), format.into()))?;
                    Ok(EXIT_OK)
                }
                Outcome::Failed => {
                    writeln!(out, "Failed")?;
                    Ok(EXIT_FAILED)
                }
                Outcome::Unknown => {
                    writeln!(out, "Unknown")?;
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::Solve { program, goal, max_steps, max_answers, strategy } => {
            let p = load(&program)?;
            let g = parse_atom(&goal, &p.signature)?;
            let r = sld_solve(&p, std::slice::from_ref(&g.atom), &limits(max_steps, max_answers, strategy))?;
            for a in &r.answers {
                writeln!(out, "{}", surface_subst(&a.subst, &g))?;
            }
            if r.exhausted {
                writeln!(out, "%% bound reached")?;
            }
            Ok(EXIT_OK)
        }
        Command::Tree { program, goal, depth, format } => {
            let p = load(&program)?;
            let g = parse_atom(&goal, &p.signature)?;
            let t = build_tree(&p, &g.atom, g.arity, depth)?;
            write_rendering(out, &render(&t, format.into()))?;
            Ok(EXIT_OK)
        }
        Command::Check {
            program,
            what,
            levels,
            depth,
            max_steps,
            max_answers,
            strategy,
            format,
            verbose,
        } => {
            let p = load(&program)?;
            let json = format == FormatArg::Json;
            match what {
                Check::Lax => check_squares(
                    &p,
                    &generate::arrows(&p.signature, &Space::default()),
                    true,
                    json,
                    verbose,
                    out,
                ),
                Check::Inj => check_squares(
                    &p,
                    &generate::injections(Space::default().max_arity),
                    false,
                    json,
                    verbose,
                    out,
                ),
                Check::Bridge => {
                    check_bridge_cmd(&p, &limits(max_steps, max_answers, strategy), depth, verbose, out)
                }
                Check::GroundOracle => check_ground(&p, levels, verbose, out),
            }
        }
        Command::Classify { program } => {
            let p = load(&program)?;
            out.write_all(classification_report(&p).as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

/// `non-existential`, or one `existential: clause i of n (variable Z)` line
/// per offending clause, with one-based clause ordinals.
pub fn classification_report(p: &Program) -> String {
    match classify_program(p) {
        Classification::NonExistential => "non-existential\n".to_string(),
        Classification::Existential(clauses) => clauses
            .into_iter()
            .map(|i| {
                let c = &p.clauses[i];
                let names: Vec<String> = c.existential_vars().map(|v| c.var_name(v)).collect();
                let noun = if names.len() == 1 { "variable" } else { "variables" };
                format!("existential: clause {} of {} ({noun} {})\n", i + 1, p.len(), names.join(", "))
            })
            .collect(),
    }
}

fn write_rendering(out: &mut dyn Write, text: &str) -> std::io::Result<()> {
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn check_squares(
    p: &Program,
    arrows: &[crate::subst::Arrow],
    lax: bool,
    json: bool,
    verbose: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let space = Space::default();
    let atoms_by_arity: Vec<_> =
        (0..=space.max_arity).map(|m| generate::atoms(&p.signature, m, &space)).collect();
    let mut report = SquareReport::default();
    for f in arrows {
        report.extend(check_lax_square(p, f, &atoms_by_arity[f.target()])?);
    }
    let lax_failures = report.lax_failures().count();
    let strict_failures = report.strict_failures().count();
    if json {
        for r in &report.records {
            if verbose || !r.lax_ok || !r.strict_ok {
                writeln!(out, "{}", r.to_json())?;
            }
        }
    } else {
        let n = report.records.len();
        if lax {
            writeln!(out, "lax: {n} squares, {lax_failures} failures")?;
        }
        writeln!(out, "strict: {n} squares, {strict_failures} failures")?;
        for r in &report.records {
            if lax && (verbose || !r.lax_ok) {
                writeln!(out, "{}", r.lax_line())?;
            }
        }
        let mut shown = 0;
        for r in &report.records {
            if verbose || (!r.strict_ok && shown < SHOWN_STRICT_FAILURES) {
                writeln!(out, "{}", r.strict_line())?;
                shown += usize::from(!r.strict_ok);
            }
        }
        if !verbose && strict_failures > shown {
            writeln!(out, "%% {} more strict failures (use --verbose)", strict_failures - shown)?;
        }
    }
    let clean = if lax { lax_failures == 0 } else { strict_failures == 0 };
    Ok(if clean { EXIT_OK } else { EXIT_FAILED })
}

fn check_bridge_cmd(
    p: &Program,
    limits: &SldLimits,
    depth: usize,
    verbose: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let space = Space::default();
    let mut violations = 0;
    let mut inconclusive = 0;
    let mut total = 0;
    let mut lines = Vec::new();
    for m in 0..=2 {
        for goal in generate::atoms(&p.signature, m, &space) {
            // one goal per variable pattern
            if goal.canonical() != (goal.clone(), m) {
                continue;
            }
            let report = check_bridge(p, &goal, limits, depth)?;
            for e in &report.entries {
                total += 1;
                match e.status {
                    Status::Failed => violations += 1,
                    Status::Unknown => inconclusive += 1,
                    Status::Proved => {}
                }
                if verbose || e.status == Status::Failed {
                    lines.push(format!(
                        "{}  goal={}  answer={}  instance={}",
                        e.status, goal, e.answer, e.instance
                    ));
                }
            }
        }
    }
    writeln!(out, "bridge: {total} answers, {violations} violations, {inconclusive} inconclusive")?;
    for l in lines {
        writeln!(out, "{l}")?;
    }
    Ok(if violations == 0 { EXIT_OK } else { EXIT_FAILED })
}

fn check_ground(p: &Program, levels: usize, verbose: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = ground_coalgebra(p, &[])?;
    let mut checks = 0;
    let mut mismatches = Vec::new();
    for a in &g.universe {
        for n in 0..=levels {
            checks += 1;
            // against the tree of the program as written, and of the program
            // read back from the coalgebra
            let direct = build_tree(p, a, 0, n)?;
            let ok = approximant_matches_tree(&g, a, n)?
                && unfold(&g, a, n)? == tree_to_approximant(&direct.root, n);
            if verbose {
                writeln!(out, "{}  {a}  level {n}", if ok { "MATCH" } else { "MISMATCH" })?;
            }
            if !ok {
                mismatches.push((a.clone(), n));
            }
        }
    }
    writeln!(out, "ground-oracle: {checks} checks, {} mismatches", mismatches.len())?;
    if !verbose {
        for (a, n) in &mismatches {
            writeln!(out, "MISMATCH  {a}  level {n}")?;
        }
    }
    Ok(if mismatches.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

fn surface_term(t: &Term, goal: &Goal) -> String {
    match t {
        Term::Var(v) if v.index() <= goal.arity => goal.var_names[v.index() - 1].clone(),
        Term::Var(v) => format!("_{}", v.index() - goal.arity),
        Term::App(f, args) if args.is_empty() => f.to_string(),
        Term::App(f, args) => {
            let args: Vec<String> = args.iter().map(|a| surface_term(a, goal)).collect();
            format!("{f}({})", args.join(","))
        }
    }
}

/// Prints an answer using the goal's own variable names.
pub fn surface_subst(s: &Substitution, goal: &Goal) -> String {
    let parts: Vec<String> = s
        .iter()
        .map(|(v, t)| format!("{} -> {}", surface_term(&Term::Var(v), goal), surface_term(t, goal)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}
