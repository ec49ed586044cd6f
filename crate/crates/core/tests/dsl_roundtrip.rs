mod common;

use std::fs;

use regnet::checker::{resolve_formula, Formula};
use regnet::diag::Severity;
use regnet::dsl::{
    load_network, parse_formula, parse_network, parse_query, pretty_formula, pretty_network,
    pretty_query, StripSpans,
};

use common::*;

fn assert_round_trip(text: &str) {
    let ast = parse_network(text).unwrap_or_else(|d| panic!("{d:?}\n{text}"));
    let printed = pretty_network(&ast);
    let again = parse_network(&printed).unwrap_or_else(|d| panic!("{d:?}\n{printed}"));
    assert_eq!(again.strip_spans(), ast.strip_spans(), "\n{text}\n---\n{printed}");
    assert_eq!(pretty_network(&again), printed, "printing is not idempotent");
}

#[test]
fn fixtures_round_trip() {
    let mut seen = 0;
    for entry in fs::read_dir(fixture_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "grn") {
            assert_round_trip(&fs::read_to_string(&path).unwrap());
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn random_models_round_trip() {
    let mut r = rng(7);
    for _ in 0..200 {
        let text = random_network_text(&mut r, 4, 3);
        assert_round_trip(&text);
        let (net, _) = load_network(&text).unwrap();
        let printed = pretty_network(&parse_network(&text).unwrap());
        let (net2, _) = load_network(&printed).unwrap();
        for s in net.all_states() {
            assert_eq!(net.successors(&s), net2.successors(&s));
        }
        assert_eq!(net.initial(), net2.initial());
    }
}

#[test]
fn random_formulas_round_trip() {
    let mut r = rng(8);
    for _ in 0..300 {
        let net = load(&random_network_text(&mut r, 4, 3));
        let f: Formula = random_formula(&mut r, &net, 4);
        let text = f.to_text(&net);
        let back = resolve_formula(&parse_formula(&text).unwrap(), &net).unwrap();
        assert_eq!(back, f, "{text}");
        let q = format!("check {text}");
        assert_eq!(pretty_query(&parse_query(&q).unwrap()), q);
    }
}

#[test]
fn query_forms() {
    for q in ["stable", "stable where a = 1", "count reachable", "check EF deadlock"] {
        let ast = parse_query(q).unwrap();
        assert_eq!(pretty_query(&ast), q);
    }
    let f = parse_formula("not not EX (a >= 1 or b < 2) and deadlock").unwrap();
    let back = parse_formula(&pretty_formula(&f)).unwrap();
    assert_eq!(back.strip_spans(), f.strip_spans());
}

#[test]
fn malformed_corpus_reports_in_bounds_spans() {
    let dir = fixture_dir().join("malformed");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let code = name[..4].to_uppercase();
        let text = fs::read_to_string(&path).unwrap();
        let diags = load_network(&text).expect_err(&name);
        assert!(diags.iter().any(|d| d.code.as_str() == code), "{name}: {diags:?}");
        assert!(diags.iter().any(|d| d.severity == Severity::Error));
        let lines: Vec<&str> = text.split('\n').collect();
        for d in &diags {
            let line = d.span.line as usize;
            assert!(line >= 1 && line <= lines.len().max(1), "{name}: {d}");
            let width = lines.get(line - 1).map_or(0, |l| l.chars().count());
            assert!(d.span.column >= 1 && d.span.column as usize <= width + 1, "{name}: {d}");
        }
        seen += 1;
    }
    assert!(seen >= 15);
}
