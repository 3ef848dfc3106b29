mod common;

use coalp::cli::{run, EXIT_DATA, EXIT_FAILED, EXIT_NO_INPUT, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE};
use common::{corpus_path, with_big_stack};

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn coalp(args: &[&str]) -> Output {
    let args: Vec<String> = std::iter::once("coalp".to_string())
        .chain(args.iter().map(|a| match a.strip_prefix('@') {
            Some(name) => corpus_path(name).display().to_string(),
            None => a.to_string(),
        }))
        .collect();
    with_big_stack(move || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(args, &mut out, &mut err);
        Output { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
    })
}

#[test]
fn prove_exit_codes() {
    let r = coalp(&["prove", "@listnat", "list(cons(0,nil))", "--depth", "8"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("Proved\n"));
    assert!(r.out.contains("└─• 3"));
    assert_eq!(coalp(&["prove", "@gc", "connected(X,Y)", "--depth", "50"]).code, EXIT_UNKNOWN);
    let r = coalp(&["prove", "@listnat", "list(cons(X,Y))", "--depth", "8"]);
    assert_eq!((r.code, r.out.trim()), (EXIT_FAILED, "Failed"));
    assert_eq!(coalp(&["prove", "@gc", "connected(X,X)"]).code, EXIT_OK);
}

#[test]
fn solve_prints_surface_names() {
    let r = coalp(&["solve", "@gc", "connected(X,Y)", "--max-answers", "1"]);
    assert_eq!((r.code, r.out.as_str()), (EXIT_OK, "{Y -> X}\n"));
    let r = coalp(&["solve", "@listnat", "list(cons(X,Y))", "--max-answers", "1"]);
    assert_eq!(r.out, "{X -> 0, Y -> nil}\n");
    let r = coalp(&["solve", "@bad", "bad(X)", "--max-steps", "100"]);
    assert_eq!(r.out, "%% bound reached\n");
    let r = coalp(&["solve", "@listnat", "list(Y)", "--max-answers", "2", "--strategy", "dfs"]);
    assert_eq!(r.out.lines().next(), Some("{Y -> nil}"));
}

#[test]
fn tree_formats() {
    let r = coalp(&["tree", "@listnat_plus", "list(cons(0,nil))", "--depth", "3"]);
    assert_eq!(r.out, include_str!("golden/fig1_left.txt"));
    let r = coalp(&["tree", "@gc", "connected(X,Y)", "--depth", "2", "--format", "dot"]);
    assert!(r.out.starts_with("digraph cotree {"));
    assert!(r.out.contains("shape=point"));
    let r = coalp(&["tree", "@gc", "connected(X,Y)", "--depth", "2", "--format", "json"]);
    assert!(coalp::cotree::parse_json_tree(&r.out).is_ok());
    let r = coalp(&["tree", "@ex33", "g", "--depth", "0"]);
    assert_eq!((r.code, r.out.as_str()), (EXIT_OK, "g …\n"));
}

#[test]
fn checks() {
    let r = coalp(&["check", "@listnat", "--what", "lax"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("STRICT FAIL  f=(0):0->1  A=nat(X1)  lhs=∅ rhs={{}}"), "{}", r.out);
    assert!(r.out.contains(", 0 failures"));
    let r = coalp(&["check", "@gc", "--what", "inj"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(!r.out.contains("FAIL"));
    let r = coalp(&["check", "@ex33", "--what", "ground-oracle", "--levels", "4"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("0 mismatches"));
    assert_eq!(coalp(&["check", "@gc", "--what", "ground-oracle"]).code, EXIT_DATA);
    assert_eq!(coalp(&["check", "@gc", "--what", "bridge"]).code, EXIT_OK);
}

#[test]
fn classify() {
    assert_eq!(coalp(&["classify", "@gc"]).out, "existential: clause 2 of 2 (variable Z)\n");
    assert_eq!(coalp(&["classify", "@listnat"]).out, "non-existential\n");
    let empty = std::env::temp_dir().join(format!("coalp-empty-{}.lp", std::process::id()));
    std::fs::write(&empty, "").unwrap();
    let r = coalp(&["classify", empty.to_str().unwrap()]);
    std::fs::remove_file(&empty).unwrap();
    assert_eq!((r.code, r.out.as_str()), (EXIT_OK, "non-existential\n"));
}

#[test]
fn errors() {
    assert_eq!(coalp(&[]).code, EXIT_USAGE);
    assert_eq!(coalp(&["prove", "@gc"]).code, EXIT_USAGE);
    assert_eq!(coalp(&["solve", "@gc", "connected(X,Y)", "--max-steps", "0"]).code, EXIT_USAGE);
    assert_eq!(coalp(&["tree", "@gc", "a", "--format", "svg"]).code, EXIT_USAGE);
    let r = coalp(&["prove", "@gc", "connected(X"]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.err.contains("syntax error"));
    assert_eq!(coalp(&["prove", "@gc", "connected(X)"]).code, EXIT_DATA);
    assert_eq!(coalp(&["prove", "/nonexistent/x.lp", "a"]).code, EXIT_NO_INPUT);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["check", "@listnat_plus", "--what", "lax", "--format", "json"][..],
        &["solve", "@listnat", "list(X)", "--max-answers", "5"][..],
        &["tree", "@gc", "connected(X,Y)", "--depth", "4", "--format", "dot"][..],
    ] {
        let a = coalp(args);
        let b = coalp(args);
        assert_eq!(a.out, b.out);
        assert_eq!(a.code, b.code);
    }
}
