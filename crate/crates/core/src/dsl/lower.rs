//! Name resolution from a [`NetworkAst`] to a validated [`Network`].

use std::collections::{HashMap, HashSet};

use crate::diag::{has_errors, Code, Diagnostic, Span};
use crate::model::{Atom, Clause, Condition, Edge, Gene, GeneId, Network, Rule, State};

use super::ast::*;

struct Scope {
    ids: HashMap<String, GeneId>,
}

impl Scope {
    fn resolve(&self, ident: &Ident, diags: &mut Vec<Diagnostic>) -> Option<GeneId> {
        let id = self.ids.get(&ident.name).copied();
        if id.is_none() {
            diags.push(Diagnostic::new(
                Code::E002,
                format!("unknown gene `{}`", ident.name),
                ident.span,
            ));
        }
        id
    }

    fn condition(&self, c: &CondAst, diags: &mut Vec<Diagnostic>) -> Option<Condition> {
        Some(match c {
            CondAst::Atom {
                gene,
                cmp,
                value,
                span,
            } => Condition::Atom(Atom {
                gene: self.resolve(gene, diags)?,
                cmp: *cmp,
                value: value.value,
                span: *span,
            }),
            CondAst::Not { inner, .. } => Condition::Not(Box::new(self.condition(inner, diags)?)),
            CondAst::And { lhs, rhs, .. } => {
                let l = self.condition(lhs, diags);
                let r = self.condition(rhs, diags);
                Condition::And(Box::new(l?), Box::new(r?))
            }
            CondAst::Or { lhs, rhs, .. } => {
                let l = self.condition(lhs, diags);
                let r = self.condition(rhs, diags);
                Condition::Or(Box::new(l?), Box::new(r?))
            }
        })
    }
}

/// Resolves names, fills unassigned initial levels with 0 and validates the
/// result. The network is returned only when no error diagnostic was raised;
/// warnings are returned either way.
pub fn lower(ast: &NetworkAst) -> (Option<Network>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let mut scope = Scope {
        ids: HashMap::new(),
    };
    let mut genes = Vec::new();
    for d in &ast.decls {
        if let Decl::Gene(g) = d {
            if scope.ids.contains_key(&g.name.name) {
                diags.push(Diagnostic::new(
                    Code::E004,
                    format!("duplicate gene `{}`", g.name.name),
                    g.name.span,
                ));
                continue;
            }
            scope.ids.insert(g.name.name.clone(), genes.len());
            genes.push(Gene {
                name: g.name.name.clone(),
                max_level: g.max_level.value,
                span: g.span,
            });
        }
    }

    let mut edges = Vec::new();
    let mut rules = Vec::new();
    // Genes whose only rule failed to resolve; their "no rule" error would
    // just repeat the E002 already reported.
    let mut unresolved_rule: HashSet<GeneId> = HashSet::new();
    let mut initial = State::zeros(genes.len());
    let mut init_spans = vec![Span::default(); genes.len()];
    let mut assigned: HashSet<GeneId> = HashSet::new();

    for d in &ast.decls {
        match d {
            Decl::Gene(_) => {}
            Decl::Edge(e) => {
                let s = scope.resolve(&e.source, &mut diags);
                let t = scope.resolve(&e.target, &mut diags);
                if let (Some(source), Some(target)) = (s, t) {
                    edges.push(Edge {
                        source,
                        target,
                        sign: e.sign,
                        threshold: e.threshold.value,
                        span: e.span,
                    });
                }
            }
            Decl::Rule(r) => {
                let Some(gene) = scope.resolve(&r.gene, &mut diags) else {
                    continue;
                };
                let clauses: Vec<Option<Clause>> = r
                    .clauses
                    .iter()
                    .map(|c| {
                        scope.condition(&c.condition, &mut diags).map(|condition| Clause {
                            condition,
                            target: c.target.value,
                            span: c.span,
                        })
                    })
                    .collect();
                match clauses.into_iter().collect::<Option<Vec<_>>>() {
                    Some(clauses) => rules.push(Rule {
                        gene,
                        clauses,
                        default: r.default.value,
                        span: r.span,
                    }),
                    None => {
                        unresolved_rule.insert(gene);
                    }
                }
            }
            Decl::Init(i) => {
                for (g, v) in &i.assignments {
                    let Some(id) = scope.resolve(g, &mut diags) else {
                        continue;
                    };
                    if !assigned.insert(id) {
                        diags.push(Diagnostic::new(
                            Code::E004,
                            format!("gene `{}` is assigned more than once in `init`", g.name),
                            g.span,
                        ));
                        continue;
                    }
                    initial = initial.with(id, v.value);
                    init_spans[id] = g.span.to(v.span);
                }
            }
        }
    }

    let gene_spans: Vec<Span> = genes.iter().map(|g| g.span).collect();
    let network = Network::new(ast.name.name.clone(), genes, edges, rules, initial)
        .with_init_spans(init_spans);
    let has_rule: HashSet<GeneId> = network.rules().iter().map(|r| r.gene).collect();
    diags.extend(network.validate().into_iter().filter(|d| {
        !(d.code == Code::E004
            && unresolved_rule
                .iter()
                .any(|g| !has_rule.contains(g) && gene_spans[*g] == d.span))
    }));
    diags.sort_by_key(|d| d.span);

    if has_errors(&diags) {
        (None, diags)
    } else {
        (Some(network), diags)
    }
}
