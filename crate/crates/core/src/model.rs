//! Multivalued logical regulatory networks and their asynchronous unit-step
//! semantics.
//!
//! A [`Network`] is a set of genes with bounded levels `0..=max_level`, signed
//! threshold edges, one rule per gene and a single initial [`State`]. A rule is
//! an ordered list of `(condition, target)` clauses plus a default target; the
//! first clause whose condition holds gives the gene's target level. In every
//! state each gene whose level differs from its target may move one level
//! towards it, one gene at a time.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{Code, Diagnostic, Span};

/// Index of a gene in declaration order.
pub type GeneId = usize;
pub type Level = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("reference to undeclared gene #{0}")]
    UnresolvedGene(GeneId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gene {
    pub name: String,
    pub max_level: Level,
    pub span: Span,
}

impl Gene {
    pub fn new(name: impl Into<String>, max_level: Level) -> Self {
        Self {
            name: name.into(),
            max_level,
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Activator,
    Inhibitor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: GeneId,
    pub target: GeneId,
    pub sign: Sign,
    pub threshold: Level,
    pub span: Span,
}

impl Edge {
    pub fn new(source: GeneId, target: GeneId, sign: Sign, threshold: Level) -> Self {
        Self {
            source,
            target,
            sign,
            threshold,
            span: Span::default(),
        }
    }
}

/// Comparison operator of an atom `gene cmp constant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    Ge,
    Le,
    Eq,
    Gt,
    Lt,
}

impl Cmp {
    pub fn holds(self, level: Level, constant: Level) -> bool {
        match self {
            Cmp::Ge => level >= constant,
            Cmp::Le => level <= constant,
            Cmp::Eq => level == constant,
            Cmp::Gt => level > constant,
            Cmp::Lt => level < constant,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Ge => ">=",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Gt => ">",
            Cmp::Lt => "<",
        }
    }

    /// Levels `k` at which the truth value of `x cmp constant` differs
    /// between `x = k - 1` and `x = k`.
    pub fn cut_points(self, constant: Level) -> Vec<Level> {
        match self {
            Cmp::Ge | Cmp::Lt => vec![constant],
            Cmp::Gt | Cmp::Le => vec![constant + 1],
            Cmp::Eq => vec![constant, constant + 1],
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub gene: GeneId,
    pub cmp: Cmp,
    pub value: Level,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Atom(Atom),
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn atom(gene: GeneId, cmp: Cmp, value: Level) -> Self {
        Condition::Atom(Atom {
            gene,
            cmp,
            value,
            span: Span::default(),
        })
    }

    pub fn and(self, other: Condition) -> Self {
        Condition::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Condition) -> Self {
        Condition::Or(Box::new(self), Box::new(other))
    }

    /// All atoms, left to right.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Condition::Atom(a) => out.push(a),
            Condition::Not(c) => c.collect_atoms(out),
            Condition::And(l, r) | Condition::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn eval(&self, s: &State) -> Result<bool, ModelError> {
        Ok(match self {
            Condition::Atom(a) => {
                let level = s.levels.get(a.gene).ok_or(ModelError::UnresolvedGene(a.gene))?;
                a.cmp.holds(*level, a.value)
            }
            Condition::Not(c) => !c.eval(s)?,
            Condition::And(l, r) => l.eval(s)? && r.eval(s)?,
            Condition::Or(l, r) => l.eval(s)? || r.eval(s)?,
        })
    }
}

/// Evaluates a rule condition in a state.
pub fn eval_condition(cond: &Condition, s: &State) -> Result<bool, ModelError> {
    cond.eval(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub condition: Condition,
    pub target: Level,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub gene: GeneId,
    pub clauses: Vec<Clause>,
    pub default: Level,
    pub span: Span,
}

impl Rule {
    pub fn new(gene: GeneId, clauses: Vec<(Condition, Level)>, default: Level) -> Self {
        Self {
            gene,
            clauses: clauses
                .into_iter()
                .map(|(condition, target)| Clause {
                    condition,
                    target,
                    span: Span::default(),
                })
                .collect(),
            default,
            span: Span::default(),
        }
    }

    /// Genes read by the rule's conditions, sorted and deduplicated.
    pub fn regulators(&self) -> Vec<GeneId> {
        let mut regs: Vec<GeneId> = self
            .clauses
            .iter()
            .flat_map(|c| c.condition.atoms())
            .map(|a| a.gene)
            .collect();
        regs.sort_unstable();
        regs.dedup();
        regs
    }

    /// First matching clause's target, or the default.
    pub fn evaluate(&self, s: &State) -> Result<Level, ModelError> {
        for clause in &self.clauses {
            if clause.condition.eval(s)? {
                return Ok(clause.target);
            }
        }
        Ok(self.default)
    }
}

/// A total assignment of levels to genes, indexed by [`GeneId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State {
    levels: Vec<Level>,
}

impl State {
    pub fn new(levels: Vec<Level>) -> Self {
        Self { levels }
    }

    pub fn zeros(n: usize) -> Self {
        Self { levels: vec![0; n] }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn get(&self, g: GeneId) -> Level {
        self.levels[g]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Copy of this state with gene `g` set to `level`.
    pub fn with(&self, g: GeneId, level: Level) -> State {
        let mut levels = self.levels.clone();
        levels[g] = level;
        State { levels }
    }
}

impl From<Vec<Level>> for State {
    fn from(levels: Vec<Level>) -> Self {
        State::new(levels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    name: String,
    genes: Vec<Gene>,
    edges: Vec<Edge>,
    rules: Vec<Rule>,
    initial: State,
    init_spans: Vec<Span>,
    rule_of: Vec<Option<usize>>,
}

impl Network {
    pub fn new(
        name: impl Into<String>,
        genes: Vec<Gene>,
        edges: Vec<Edge>,
        rules: Vec<Rule>,
        initial: State,
    ) -> Self {
        let mut rule_of = vec![None; genes.len()];
        for (i, r) in rules.iter().enumerate() {
            if let Some(slot) = rule_of.get_mut(r.gene) {
                slot.get_or_insert(i);
            }
        }
        let init_spans = vec![Span::default(); genes.len()];
        Self {
            name: name.into(),
            genes,
            edges,
            rules,
            initial,
            init_spans,
            rule_of,
        }
    }

    /// Attaches the source positions of the init assignments, one per gene.
    pub fn with_init_spans(mut self, spans: Vec<Span>) -> Self {
        debug_assert_eq!(spans.len(), self.genes.len());
        self.init_spans = spans;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    pub fn gene_count(&self) -> usize {
        self.genes.len()
    }

    pub fn gene_id(&self, name: &str) -> Option<GeneId> {
        self.genes.iter().position(|g| g.name == name)
    }

    pub fn max_level(&self, g: GeneId) -> Level {
        self.genes[g].max_level
    }

    pub fn rule(&self, g: GeneId) -> Option<&Rule> {
        self.rule_of.get(g).copied().flatten().map(|i| &self.rules[i])
    }

    /// Number of potential states, saturating at `u128::MAX`.
    pub fn state_space_size(&self) -> u128 {
        self.genes
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.max_level as u128 + 1))
    }

    /// The level gene `g` tends towards in state `s`.
    ///
    /// Panics if `g` has no rule; validated networks always have one.
    pub fn target_level(&self, g: GeneId, s: &State) -> Level {
        let rule = self
            .rule(g)
            .unwrap_or_else(|| panic!("gene `{}` has no rule", self.genes[g].name));
        rule.evaluate(s).expect("condition references an undeclared gene")
    }

    /// One-step asynchronous successors, tagged with the gene that moved.
    pub fn successors(&self, s: &State) -> Vec<(GeneId, State)> {
        let mut out = Vec::new();
        for g in 0..self.genes.len() {
            let t = self.target_level(g, s);
            let cur = s.get(g);
            if t > cur {
                out.push((g, s.with(g, cur + 1)));
            } else if t < cur {
                out.push((g, s.with(g, cur - 1)));
            }
        }
        out
    }

    pub fn is_stable(&self, s: &State) -> bool {
        (0..self.genes.len()).all(|g| self.target_level(g, s) == s.get(g))
    }

    /// Whether `s` assigns an in-range level to every gene.
    pub fn is_valid_state(&self, s: &State) -> bool {
        s.len() == self.genes.len()
            && s.levels().iter().zip(&self.genes).all(|(l, g)| *l <= g.max_level)
    }

    /// Iterates over all potential states in lexicographic order.
    pub fn all_states(&self) -> impl Iterator<Item = State> + '_ {
        let maxes: Vec<Level> = self.genes.iter().map(|g| g.max_level).collect();
        let mut next = Some(State::zeros(maxes.len()));
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut levels = cur.levels.clone();
            let mut i = levels.len();
            while i > 0 {
                i -= 1;
                if levels[i] < maxes[i] {
                    levels[i] += 1;
                    next = Some(State::new(levels));
                    break;
                }
                levels[i] = 0;
            }
            Some(cur)
        })
    }

    /// `a=0 b=1` rendering of a state.
    pub fn format_state(&self, s: &State) -> String {
        self.genes
            .iter()
            .zip(s.levels())
            .map(|(g, l)| format!("{}={}", g.name, l))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Checks every structural invariant, returning errors (E002..E005) and
    /// warnings (W001, W002).
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let n = self.genes.len();
        let name_of = |g: GeneId| -> &str { &self.genes[g].name };

        let mut seen = HashSet::new();
        for g in &self.genes {
            if g.max_level < 1 {
                diags.push(Diagnostic::new(
                    Code::E003,
                    format!("gene `{}` must have at least two levels", g.name),
                    g.span,
                ));
            }
            if !seen.insert(g.name.as_str()) {
                diags.push(Diagnostic::new(
                    Code::E004,
                    format!("duplicate gene `{}`", g.name),
                    g.span,
                ));
            }
        }

        let mut edge_of: HashMap<(GeneId, GeneId), &Edge> = HashMap::new();
        for e in &self.edges {
            if e.source >= n || e.target >= n {
                diags.push(Diagnostic::new(Code::E002, "edge references an unknown gene", e.span));
                continue;
            }
            let max = self.genes[e.source].max_level;
            if e.threshold < 1 || e.threshold > max {
                diags.push(Diagnostic::new(
                    Code::E003,
                    format!(
                        "threshold {} out of range 1..{} for `{}`",
                        e.threshold,
                        max,
                        name_of(e.source)
                    ),
                    e.span,
                ));
            }
            if edge_of.insert((e.source, e.target), e).is_some() {
                diags.push(Diagnostic::new(
                    Code::E004,
                    format!("duplicate edge `{}` -> `{}`", name_of(e.source), name_of(e.target)),
                    e.span,
                ));
            }
        }

        let mut has_rule = vec![false; n];
        let mut referenced: HashSet<(GeneId, GeneId)> = HashSet::new();
        for r in &self.rules {
            if r.gene >= n {
                diags.push(Diagnostic::new(Code::E002, "rule for an unknown gene", r.span));
                continue;
            }
            let gname = name_of(r.gene);
            if std::mem::replace(&mut has_rule[r.gene], true) {
                diags.push(Diagnostic::new(
                    Code::E004,
                    format!("duplicate rule for `{gname}`"),
                    r.span,
                ));
            }
            let max = self.genes[r.gene].max_level;
            for c in &r.clauses {
                if c.target > max {
                    diags.push(Diagnostic::new(
                        Code::E003,
                        format!("target level {} out of range 0..{} for `{gname}`", c.target, max),
                        c.span,
                    ));
                }
                for a in c.condition.atoms() {
                    if a.gene >= n {
                        diags.push(Diagnostic::new(
                            Code::E002,
                            "condition references an unknown gene",
                            a.span,
                        ));
                        continue;
                    }
                    let aname = name_of(a.gene);
                    let amax = self.genes[a.gene].max_level;
                    if a.value > amax {
                        diags.push(Diagnostic::new(
                            Code::E003,
                            format!("constant {} out of range 0..{} for `{aname}`", a.value, amax),
                            a.span,
                        ));
                    }
                    referenced.insert((a.gene, r.gene));
                    match edge_of.get(&(a.gene, r.gene)) {
                        None => diags.push(Diagnostic::new(
                            Code::E005,
                            format!(
                                "rule for `{gname}` reads `{aname}` but no edge `{aname}` -> `{gname}` is declared"
                            ),
                            a.span,
                        )),
                        Some(e) if !a.cmp.cut_points(a.value).contains(&e.threshold) => {
                            diags.push(Diagnostic::new(
                                Code::W002,
                                format!(
                                    "comparison `{aname} {} {}` does not match the edge threshold {}",
                                    a.cmp, a.value, e.threshold
                                ),
                                a.span,
                            ))
                        }
                        Some(_) => {}
                    }
                }
            }
            if r.default > max {
                diags.push(Diagnostic::new(
                    Code::E003,
                    format!("default level {} out of range 0..{} for `{gname}`", r.default, max),
                    r.span,
                ));
            }
        }
        for (g, present) in has_rule.iter().enumerate() {
            if !present {
                diags.push(Diagnostic::new(
                    Code::E004,
                    format!("gene `{}` has no rule", name_of(g)),
                    self.genes[g].span,
                ));
            }
        }

        for e in &self.edges {
            if e.source < n && e.target < n && !referenced.contains(&(e.source, e.target)) {
                diags.push(Diagnostic::new(
                    Code::W001,
                    format!(
                        "edge `{}` -> `{}` is not used by the rule for `{}`",
                        name_of(e.source),
                        name_of(e.target),
                        name_of(e.target)
                    ),
                    e.span,
                ));
            }
        }

        if self.initial.len() != n {
            diags.push(Diagnostic::new(
                Code::E003,
                format!("initial state assigns {} genes, expected {}", self.initial.len(), n),
                Span::default(),
            ));
        } else {
            for (g, level) in self.initial.levels().iter().enumerate() {
                if *level > self.genes[g].max_level {
                    diags.push(Diagnostic::new(
                        Code::E003,
                        format!(
                            "initial level {} out of range 0..{} for `{}`",
                            level,
                            self.genes[g].max_level,
                            name_of(g)
                        ),
                        self.init_spans.get(g).copied().unwrap_or_default(),
                    ));
                }
            }
        }
        diags
    }
}

impl std::ops::Not for Condition {
    type Output = Condition;

    fn not(self) -> Condition {
        Condition::Not(Box::new(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ops::Not;

    fn toggle() -> Network {
        let genes = vec![Gene::new("a", 1), Gene::new("b", 1)];
        let edges = vec![
            Edge::new(0, 1, Sign::Inhibitor, 1),
            Edge::new(1, 0, Sign::Inhibitor, 1),
        ];
        let rules = vec![
            Rule::new(0, vec![(Condition::atom(1, Cmp::Ge, 1), 0)], 1),
            Rule::new(1, vec![(Condition::atom(0, Cmp::Ge, 1), 0)], 1),
        ];
        Network::new("Toggle", genes, edges, rules, State::zeros(2))
    }

    fn st(v: &[Level]) -> State {
        State::new(v.to_vec())
    }

    #[test]
    fn condition_examples() {
        let b_ge_1 = Condition::atom(1, Cmp::Ge, 1);
        assert!(!eval_condition(&b_ge_1, &st(&[0, 0])).unwrap());
        let c = Condition::atom(0, Cmp::Eq, 1).not().and(Condition::atom(1, Cmp::Lt, 1));
        assert!(eval_condition(&c, &st(&[0, 0])).unwrap());
        let c = Condition::atom(0, Cmp::Ge, 1).or(Condition::atom(1, Cmp::Ge, 1));
        assert!(eval_condition(&c, &st(&[1, 0])).unwrap());
    }

    #[test]
    fn unresolved_atom_is_an_error() {
        let c = Condition::atom(5, Cmp::Ge, 1);
        assert_eq!(c.eval(&st(&[0, 0])), Err(ModelError::UnresolvedGene(5)));
    }

    #[test]
    fn toggle_targets_and_successors() {
        let n = toggle();
        assert_eq!(n.target_level(0, &st(&[0, 0])), 1);
        assert_eq!(n.target_level(0, &st(&[0, 1])), 0);
        assert_eq!(
            n.successors(&st(&[0, 0])),
            vec![(0, st(&[1, 0])), (1, st(&[0, 1]))]
        );
        assert!(n.successors(&st(&[1, 0])).is_empty());
        assert!(n.is_stable(&st(&[1, 0])));
        assert!(!n.is_stable(&st(&[0, 0])));
        assert!(n.validate().is_empty());
    }

    #[test]
    fn default_only_rules() {
        let n = Network::new(
            "G",
            vec![Gene::new("g", 2)],
            vec![],
            vec![Rule::new(0, vec![], 2)],
            State::zeros(1),
        );
        assert_eq!(n.successors(&st(&[0])), vec![(0, st(&[1]))]);
        let n = Network::new(
            "G",
            vec![Gene::new("g", 1)],
            vec![],
            vec![Rule::new(0, vec![], 0)],
            State::zeros(1),
        );
        assert_eq!(n.target_level(0, &st(&[1])), 0);
        assert!(n.is_stable(&st(&[0])));
    }

    #[test]
    fn first_matching_clause_wins() {
        let always = || Condition::atom(0, Cmp::Ge, 0);
        let n = Network::new(
            "G",
            vec![Gene::new("g", 1)],
            vec![Edge::new(0, 0, Sign::Activator, 1)],
            vec![Rule::new(0, vec![(always(), 1), (always(), 0)], 0)],
            State::zeros(1),
        );
        for s in n.all_states() {
            assert_eq!(n.target_level(0, &s), 1);
        }
    }

    #[test]
    fn missing_edge_is_e005() {
        let mut n = toggle();
        n.edges.remove(0);
        let d = n.validate();
        assert!(d.iter().any(|d| d.code == Code::E005), "{d:?}");
    }

    #[test]
    fn threshold_mismatch_is_w002() {
        let genes = vec![Gene::new("a", 2), Gene::new("b", 1)];
        let n = Network::new(
            "W",
            genes,
            vec![Edge::new(0, 1, Sign::Activator, 2)],
            vec![
                Rule::new(0, vec![], 0),
                Rule::new(1, vec![(Condition::atom(0, Cmp::Ge, 1), 1)], 0),
            ],
            State::zeros(2),
        );
        let d = n.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::W002);
        assert!(!d[0].is_error());
    }

    #[test]
    fn unused_edge_is_w001() {
        let mut n = toggle();
        n.edges.push(Edge::new(0, 0, Sign::Activator, 1));
        let d = n.validate();
        assert_eq!(d.iter().map(|d| d.code).collect::<Vec<_>>(), vec![Code::W001]);
    }

    #[test]
    fn range_and_duplicate_errors() {
        let n = Network::new(
            "R",
            vec![Gene::new("a", 1), Gene::new("a", 0)],
            vec![Edge::new(0, 1, Sign::Activator, 3)],
            vec![Rule::new(0, vec![], 4), Rule::new(0, vec![], 0)],
            State::new(vec![5, 0]),
        );
        let codes: Vec<Code> = n.validate().iter().map(|d| d.code).collect();
        assert!(codes.contains(&Code::E003));
        assert!(codes.contains(&Code::E004));
        assert!(codes.iter().filter(|c| **c == Code::E003).count() >= 4, "{codes:?}");
    }

    #[test]
    fn all_states_enumerates_the_product() {
        let n = Network::new(
            "P",
            vec![Gene::new("a", 2), Gene::new("b", 1)],
            vec![],
            vec![Rule::new(0, vec![], 0), Rule::new(1, vec![], 0)],
            State::zeros(2),
        );
        let all: Vec<State> = n.all_states().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], st(&[0, 1]));
        assert_eq!(all[5], st(&[2, 1]));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
