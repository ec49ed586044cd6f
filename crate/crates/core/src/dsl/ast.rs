//! Syntax trees for network files and queries. Every node carries the span
//! of the source text it was parsed from.

use crate::diag::Span;
use crate::model::{Cmp, Sign};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntLit {
    pub value: u32,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkAst {
    pub name: Ident,
    pub decls: Vec<Decl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Gene(GeneDecl),
    Edge(EdgeDecl),
    Rule(RuleDecl),
    Init(InitDecl),
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Gene(d) => d.span,
            Decl::Edge(d) => d.span,
            Decl::Rule(d) => d.span,
            Decl::Init(d) => d.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneDecl {
    pub name: Ident,
    pub max_level: IntLit,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecl {
    pub source: Ident,
    pub sign: Sign,
    pub target: Ident,
    pub threshold: IntLit,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDecl {
    pub gene: Ident,
    pub clauses: Vec<ClauseAst>,
    pub default: IntLit,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseAst {
    pub condition: CondAst,
    pub target: IntLit,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CondAst {
    Atom {
        gene: Ident,
        cmp: Cmp,
        value: IntLit,
        span: Span,
    },
    Not {
        inner: Box<CondAst>,
        span: Span,
    },
    And {
        lhs: Box<CondAst>,
        rhs: Box<CondAst>,
        span: Span,
    },
    Or {
        lhs: Box<CondAst>,
        rhs: Box<CondAst>,
        span: Span,
    },
}

impl CondAst {
    pub fn span(&self) -> Span {
        match self {
            CondAst::Atom { span, .. }
            | CondAst::Not { span, .. }
            | CondAst::And { span, .. }
            | CondAst::Or { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitDecl {
    pub assignments: Vec<(Ident, IntLit)>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemporalOp {
    EX,
    EF,
    EG,
    AX,
    AF,
    AG,
}

impl TemporalOp {
    pub fn as_str(self) -> &'static str {
        match self {
            TemporalOp::EX => "EX",
            TemporalOp::EF => "EF",
            TemporalOp::EG => "EG",
            TemporalOp::AX => "AX",
            TemporalOp::AF => "AF",
            TemporalOp::AG => "AG",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAst {
    Check { formula: FormulaAst, span: Span },
    Stable { filter: Option<FormulaAst>, span: Span },
    CountReachable { span: Span },
}

impl QueryAst {
    pub fn span(&self) -> Span {
        match self {
            QueryAst::Check { span, .. }
            | QueryAst::Stable { span, .. }
            | QueryAst::CountReachable { span } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaAst {
    Atom {
        gene: Ident,
        cmp: Cmp,
        value: IntLit,
        span: Span,
    },
    Deadlock {
        span: Span,
    },
    Not {
        inner: Box<FormulaAst>,
        span: Span,
    },
    And {
        lhs: Box<FormulaAst>,
        rhs: Box<FormulaAst>,
        span: Span,
    },
    Or {
        lhs: Box<FormulaAst>,
        rhs: Box<FormulaAst>,
        span: Span,
    },
    Temporal {
        op: TemporalOp,
        inner: Box<FormulaAst>,
        span: Span,
    },
}

impl FormulaAst {
    pub fn span(&self) -> Span {
        match self {
            FormulaAst::Atom { span, .. }
            | FormulaAst::Deadlock { span }
            | FormulaAst::Not { span, .. }
            | FormulaAst::And { span, .. }
            | FormulaAst::Or { span, .. }
            | FormulaAst::Temporal { span, .. } => *span,
        }
    }

    /// Nesting depth; atoms and `deadlock` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            FormulaAst::Atom { .. } | FormulaAst::Deadlock { .. } => 0,
            FormulaAst::Not { inner, .. } | FormulaAst::Temporal { inner, .. } => 1 + inner.depth(),
            FormulaAst::And { lhs, rhs, .. } | FormulaAst::Or { lhs, rhs, .. } => {
                1 + lhs.depth().max(rhs.depth())
            }
        }
    }
}

/// Replaces every span in a tree with [`Span::default`], so that trees parsed
/// from differently formatted text can be compared structurally.
pub trait StripSpans {
    fn strip_spans(&self) -> Self;
}

fn id(i: &Ident) -> Ident {
    Ident {
        name: i.name.clone(),
        span: Span::default(),
    }
}

fn int(i: &IntLit) -> IntLit {
    IntLit {
        value: i.value,
        span: Span::default(),
    }
}

impl StripSpans for NetworkAst {
    fn strip_spans(&self) -> Self {
        NetworkAst {
            name: id(&self.name),
            decls: self.decls.iter().map(StripSpans::strip_spans).collect(),
            span: Span::default(),
        }
    }
}

impl StripSpans for Decl {
    fn strip_spans(&self) -> Self {
        let span = Span::default();
        match self {
            Decl::Gene(g) => Decl::Gene(GeneDecl {
                name: id(&g.name),
                max_level: int(&g.max_level),
                span,
            }),
            Decl::Edge(e) => Decl::Edge(EdgeDecl {
                source: id(&e.source),
                sign: e.sign,
                target: id(&e.target),
                threshold: int(&e.threshold),
                span,
            }),
            Decl::Rule(r) => Decl::Rule(RuleDecl {
                gene: id(&r.gene),
                clauses: r
                    .clauses
                    .iter()
                    .map(|c| ClauseAst {
                        condition: c.condition.strip_spans(),
                        target: int(&c.target),
                        span,
                    })
                    .collect(),
                default: int(&r.default),
                span,
            }),
            Decl::Init(i) => Decl::Init(InitDecl {
                assignments: i.assignments.iter().map(|(g, v)| (id(g), int(v))).collect(),
                span,
            }),
        }
    }
}

impl StripSpans for CondAst {
    fn strip_spans(&self) -> Self {
        let span = Span::default();
        match self {
            CondAst::Atom {
                gene, cmp, value, ..
            } => CondAst::Atom {
                gene: id(gene),
                cmp: *cmp,
                value: int(value),
                span,
            },
            CondAst::Not { inner, .. } => CondAst::Not {
                inner: Box::new(inner.strip_spans()),
                span,
            },
            CondAst::And { lhs, rhs, .. } => CondAst::And {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span,
            },
            CondAst::Or { lhs, rhs, .. } => CondAst::Or {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span,
            },
        }
    }
}

impl StripSpans for QueryAst {
    fn strip_spans(&self) -> Self {
        let span = Span::default();
        match self {
            QueryAst::Check { formula, .. } => QueryAst::Check {
                formula: formula.strip_spans(),
                span,
            },
            QueryAst::Stable { filter, .. } => QueryAst::Stable {
                filter: filter.as_ref().map(StripSpans::strip_spans),
                span,
            },
            QueryAst::CountReachable { .. } => QueryAst::CountReachable { span },
        }
    }
}

impl StripSpans for FormulaAst {
    fn strip_spans(&self) -> Self {
        let span = Span::default();
        match self {
            FormulaAst::Atom {
                gene, cmp, value, ..
            } => FormulaAst::Atom {
                gene: id(gene),
                cmp: *cmp,
                value: int(value),
                span,
            },
            FormulaAst::Deadlock { .. } => FormulaAst::Deadlock { span },
            FormulaAst::Not { inner, .. } => FormulaAst::Not {
                inner: Box::new(inner.strip_spans()),
                span,
            },
            FormulaAst::And { lhs, rhs, .. } => FormulaAst::And {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span,
            },
            FormulaAst::Or { lhs, rhs, .. } => FormulaAst::Or {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span,
            },
            FormulaAst::Temporal { op, inner, .. } => FormulaAst::Temporal {
                op: *op,
                inner: Box::new(inner.strip_spans()),
                span,
            },
        }
    }
}
