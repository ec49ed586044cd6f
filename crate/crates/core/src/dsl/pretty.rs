//! Canonical formatting of network and query syntax trees.
//!
//! Binary operators are printed left-associatively with parentheses only
//! where the tree shape requires them. Operands of prefix operators are
//! parenthesized unless they are `deadlock` or another prefix form, so
//! `EF(a=1)` prints as `EF (a = 1)`.

use std::fmt::Write;

use crate::model::Sign;

use super::ast::*;

pub fn pretty_network(ast: &NetworkAst) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "network {}", ast.name.name);
    for d in &ast.decls {
        match d {
            Decl::Gene(g) => {
                let _ = writeln!(out, "gene {} levels 0..{}", g.name.name, g.max_level.value);
            }
            Decl::Edge(e) => {
                let arrow = match e.sign {
                    Sign::Activator => "->",
                    Sign::Inhibitor => "-|",
                };
                let _ = writeln!(
                    out,
                    "{} {} {} threshold {}",
                    e.source.name, arrow, e.target.name, e.threshold.value
                );
            }
            Decl::Rule(r) => {
                let _ = write!(out, "rule {}:", r.gene.name);
                for (i, c) in r.clauses.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, " when {} -> {}", cond(&c.condition), c.target.value);
                }
                let _ = writeln!(out, " default {}", r.default.value);
            }
            Decl::Init(i) => {
                let parts: Vec<String> = i
                    .assignments
                    .iter()
                    .map(|(g, v)| format!("{} = {}", g.name, v.value))
                    .collect();
                let _ = writeln!(out, "init {}", parts.join(", "));
            }
        }
    }
    out
}

pub fn pretty_query(ast: &QueryAst) -> String {
    match ast {
        QueryAst::Check { formula, .. } => format!("check {}", pretty_formula(formula)),
        QueryAst::Stable { filter: None, .. } => "stable".to_string(),
        QueryAst::Stable {
            filter: Some(f), ..
        } => format!("stable where {}", pretty_formula(f)),
        QueryAst::CountReachable { .. } => "count reachable".to_string(),
    }
}

/// Precedence levels: or < and < prefix/atom.
fn cond_prec(c: &CondAst) -> u8 {
    match c {
        CondAst::Or { .. } => 0,
        CondAst::And { .. } => 1,
        _ => 2,
    }
}

fn cond(c: &CondAst) -> String {
    match c {
        CondAst::Atom {
            gene, cmp, value, ..
        } => format!("{} {} {}", gene.name, cmp, value.value),
        CondAst::Not { inner, .. } => match &**inner {
            CondAst::Not { .. } => format!("not {}", cond(inner)),
            _ => format!("not ({})", cond(inner)),
        },
        CondAst::And { lhs, rhs, .. } => binary_cond(lhs, rhs, "and", 1),
        CondAst::Or { lhs, rhs, .. } => binary_cond(lhs, rhs, "or", 0),
    }
}

fn binary_cond(lhs: &CondAst, rhs: &CondAst, op: &str, prec: u8) -> String {
    let l = if cond_prec(lhs) < prec {
        format!("({})", cond(lhs))
    } else {
        cond(lhs)
    };
    let r = if cond_prec(rhs) <= prec {
        format!("({})", cond(rhs))
    } else {
        cond(rhs)
    };
    format!("{l} {op} {r}")
}

fn formula_prec(f: &FormulaAst) -> u8 {
    match f {
        FormulaAst::Or { .. } => 0,
        FormulaAst::And { .. } => 1,
        _ => 2,
    }
}

pub fn pretty_formula(f: &FormulaAst) -> String {
    match f {
        FormulaAst::Atom {
            gene, cmp, value, ..
        } => format!("{} {} {}", gene.name, cmp, value.value),
        FormulaAst::Deadlock { .. } => "deadlock".to_string(),
        FormulaAst::Not { inner, .. } => format!("not {}", prefix_operand(inner)),
        FormulaAst::Temporal { op, inner, .. } => {
            format!("{} {}", op.as_str(), prefix_operand(inner))
        }
        FormulaAst::And { lhs, rhs, .. } => binary_formula(lhs, rhs, "and", 1),
        FormulaAst::Or { lhs, rhs, .. } => binary_formula(lhs, rhs, "or", 0),
    }
}

fn prefix_operand(f: &FormulaAst) -> String {
    match f {
        FormulaAst::Deadlock { .. } | FormulaAst::Not { .. } | FormulaAst::Temporal { .. } => {
            pretty_formula(f)
        }
        _ => format!("({})", pretty_formula(f)),
    }
}

fn binary_formula(lhs: &FormulaAst, rhs: &FormulaAst, op: &str, prec: u8) -> String {
    let l = if formula_prec(lhs) < prec {
        format!("({})", pretty_formula(lhs))
    } else {
        pretty_formula(lhs)
    };
    let r = if formula_prec(rhs) <= prec {
        format!("({})", pretty_formula(rhs))
    } else {
        pretty_formula(rhs)
    };
    format!("{l} {op} {r}")
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_network, parse_query};
    use super::*;

    #[test]
    fn canonical_query_spacing() {
        let q = parse_query("check EF(a=1)").unwrap();
        assert_eq!(pretty_query(&q), "check EF (a = 1)");
        let q = parse_query("check   AG not   deadlock").unwrap();
        assert_eq!(pretty_query(&q), "check AG not deadlock");
        let q = parse_query("check EF EF a>=1").unwrap();
        assert_eq!(pretty_query(&q), "check EF EF (a >= 1)");
    }

    #[test]
    fn parentheses_only_where_needed() {
        let q = parse_query("check (a = 1 or b = 1) and c = 0 and (d = 1 and e = 1)").unwrap();
        assert_eq!(
            pretty_query(&q),
            "check (a = 1 or b = 1) and c = 0 and (d = 1 and e = 1)"
        );
        let q = parse_query("check ((a = 1) or (b = 1))").unwrap();
        assert_eq!(pretty_query(&q), "check a = 1 or b = 1");
    }

    #[test]
    fn network_round_trip() {
        let text = "network   N # c\n\ngene a levels 0..2\ngene b levels 0..1\n\
                    a -> b threshold 2\nb -| a threshold 1\n\
                    rule a: when not(b>=1) and (b<1 or b=0) -> 2, when b = 1 -> 0 default 1\n\
                    rule b: default 0\ninit a=1\n";
        let ast = parse_network(text).unwrap();
        let printed = pretty_network(&ast);
        assert_eq!(
            printed.lines().nth(5).unwrap(),
            "rule a: when not (b >= 1) and (b < 1 or b = 0) -> 2, when b = 1 -> 0 default 1"
        );
        let again = parse_network(&printed).unwrap();
        assert_eq!(again.strip_spans(), ast.strip_spans());
        assert_eq!(pretty_network(&again), printed);
    }
}
