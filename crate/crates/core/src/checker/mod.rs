//! Query evaluation over a compiled model.
//!
//! [`SymbolicChecker`] evaluates CTL formulas as fixpoints over the full
//! potential state space and reads verdicts at the initial state.
//! [`explicit`] is an independent state-graph implementation used to
//! cross-check it on models small enough to enumerate.
//!
//! `EG` uses finite-path semantics: a path that ends in a dead state counts
//! as a maximal path, so dead states satisfying `f` also satisfy `EG f`.

pub mod explicit;
mod symbolic;

use std::ops::Not;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{Code, Diagnostic};
use crate::dsl::ast::{FormulaAst, Ident, IntLit, QueryAst, TemporalOp};
use crate::dsl::pretty_formula;
use crate::model::{Cmp, GeneId, Level, Network, State};
use crate::pn::{compile, PetriNet, StateMap};
use crate::symbolic::{EngineError, SymbolicRelation};

pub use explicit::{
    explicit_check, explicit_full_graph, explicit_reachable, explicit_stable_states, ExplicitGraph,
};
pub use symbolic::{SymbolicChecker, VarOrderKind};

/// Number of stable states listed in reports; counts are always exact.
pub const STABLE_ENUMERATION_CAP: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("explicit exploration exceeded {cap} states; use the symbolic engine")]
    CapExceeded { cap: usize },
}

impl CheckError {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            CheckError::CapExceeded { .. }
                | CheckError::Engine(EngineError::NodeLimit { .. })
                | CheckError::Engine(EngineError::Timeout { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { gene: GeneId, cmp: Cmp, value: Level },
    Deadlock,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Temporal(TemporalOp, Box<Formula>),
}

impl Formula {
    pub fn atom(gene: GeneId, cmp: Cmp, value: Level) -> Self {
        Formula::Atom { gene, cmp, value }
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn temporal(op: TemporalOp, inner: Formula) -> Self {
        Formula::Temporal(op, Box::new(inner))
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Deadlock => 0,
            Formula::Not(f) | Formula::Temporal(_, f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Back to a syntax tree, for printing.
    pub fn to_ast(&self, net: &Network) -> FormulaAst {
        let span = Default::default();
        let b = |f: &Formula| Box::new(f.to_ast(net));
        match self {
            Formula::Atom { gene, cmp, value } => FormulaAst::Atom {
                gene: Ident {
                    name: net.genes()[*gene].name.clone(),
                    span,
                },
                cmp: *cmp,
                value: IntLit {
                    value: *value,
                    span,
                },
                span,
            },
            Formula::Deadlock => FormulaAst::Deadlock { span },
            Formula::Not(f) => FormulaAst::Not { inner: b(f), span },
            Formula::And(l, r) => FormulaAst::And {
                lhs: b(l),
                rhs: b(r),
                span,
            },
            Formula::Or(l, r) => FormulaAst::Or {
                lhs: b(l),
                rhs: b(r),
                span,
            },
            Formula::Temporal(op, f) => FormulaAst::Temporal {
                op: *op,
                inner: b(f),
                span,
            },
        }
    }

    pub fn to_text(&self, net: &Network) -> String {
        pretty_formula(&self.to_ast(net))
    }
}

/// Resolves gene names and checks constants against the network.
pub fn resolve_formula(ast: &FormulaAst, net: &Network) -> Result<Formula, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let f = resolve_rec(ast, net, &mut diags);
    match f {
        Some(f) if diags.is_empty() => Ok(f),
        _ => Err(diags),
    }
}

fn resolve_rec(ast: &FormulaAst, net: &Network, diags: &mut Vec<Diagnostic>) -> Option<Formula> {
    Some(match ast {
        FormulaAst::Atom {
            gene, cmp, value, ..
        } => {
            let Some(id) = net.gene_id(&gene.name) else {
                diags.push(Diagnostic::new(
                    Code::E002,
                    format!("unknown gene `{}`", gene.name),
                    gene.span,
                ));
                return None;
            };
            let max = net.max_level(id);
            if value.value > max {
                diags.push(Diagnostic::new(
                    Code::E003,
                    format!("constant {} out of range 0..{} for `{}`", value.value, max, gene.name),
                    value.span,
                ));
                return None;
            }
            Formula::atom(id, *cmp, value.value)
        }
        FormulaAst::Deadlock { .. } => Formula::Deadlock,
        FormulaAst::Not { inner, .. } => resolve_rec(inner, net, diags)?.not(),
        FormulaAst::And { lhs, rhs, .. } => {
            let l = resolve_rec(lhs, net, diags);
            let r = resolve_rec(rhs, net, diags);
            l?.and(r?)
        }
        FormulaAst::Or { lhs, rhs, .. } => {
            let l = resolve_rec(lhs, net, diags);
            let r = resolve_rec(rhs, net, diags);
            l?.or(r?)
        }
        FormulaAst::Temporal { op, inner, .. } => {
            Formula::temporal(*op, resolve_rec(inner, net, diags)?)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Check(Formula),
    Stable(Option<Formula>),
    CountReachable,
}

pub fn resolve_query(ast: &QueryAst, net: &Network) -> Result<Query, Vec<Diagnostic>> {
    Ok(match ast {
        QueryAst::Check { formula, .. } => Query::Check(resolve_formula(formula, net)?),
        QueryAst::Stable { filter, .. } => Query::Stable(match filter {
            Some(f) => Some(resolve_formula(f, net)?),
            None => None,
        }),
        QueryAst::CountReachable { .. } => Query::CountReachable,
    })
}

/// Outcome of checking one formula at the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    /// Witness for a true `EF g`, counterexample for a false `AG g`.
    pub evidence: Option<Vec<State>>,
    pub reachable_count: BigUint,
    pub satisfying_reachable_count: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableReport {
    pub count: BigUint,
    /// At most [`STABLE_ENUMERATION_CAP`] states, lexicographic in gene order.
    pub states: Vec<State>,
}

impl StableReport {
    pub fn truncated(&self) -> bool {
        BigUint::from(self.states.len()) < self.count
    }
}

/// A validated network together with its compiled net and symbolic relation.
#[derive(Debug, Clone)]
pub struct Model {
    network: Network,
    petri: PetriNet,
    state_map: StateMap,
    relation: SymbolicRelation,
}

impl Model {
    pub fn new(network: Network) -> Self {
        let (petri, state_map) = compile(&network);
        let relation = SymbolicRelation::from_petri_net(&petri, &state_map)
            .expect("compiled transitions change exactly one gene");
        Self {
            network,
            petri,
            state_map,
            relation,
        }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn petri_net(&self) -> &PetriNet {
        &self.petri
    }

    pub fn state_map(&self) -> &StateMap {
        &self.state_map
    }

    pub fn relation(&self) -> &SymbolicRelation {
        &self.relation
    }
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}
