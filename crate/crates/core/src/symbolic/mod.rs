//! Multi-valued decision diagrams over bounded gene levels.
//!
//! The engine keeps quasi-reduced ordered MDDs in a shared node store with a
//! unique table, so two [`StateSet`] handles are equal exactly when they
//! denote the same set. Transition relations are lists of
//! [`GuardedUpdate`]s (an interval guard per variable plus at most one
//! `±1` effect), derived from the compiled Petri net.

mod engine;
mod store;

use std::fmt;

use thiserror::Error;

use crate::model::{GeneId, Level};
use crate::pn::{PetriNet, StateMap};

pub use engine::{Engine, EngineStats, Limits, StateSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("node limit of {limit} exceeded (peak {peak} nodes)")]
    NodeLimit { limit: usize, peak: usize },
    #[error("timeout after {seconds:.1}s (peak {peak} nodes)")]
    Timeout { seconds: f64, peak: usize },
    #[error("state set belongs to a different engine instance")]
    ForeignHandle,
    #[error("value {value} outside the domain 0..{max} of variable #{var}")]
    Domain { var: GeneId, value: Level, max: Level },
    #[error("unknown variable #{0}")]
    UnknownVariable(GeneId),
    #[error("invalid variable order: {0}")]
    BadOrder(String),
    #[error("transition `{0}` changes more than one gene")]
    MultiEffect(String),
}

/// Variable order: `levels[k]` is the variable tested at depth `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarOrder {
    domains: Vec<u32>,
    levels: Vec<GeneId>,
    level_of: Vec<usize>,
}

impl VarOrder {
    /// `domains[v]` is the number of values of variable `v`; `levels` lists
    /// the variables from the root downwards.
    pub fn new(domains: Vec<u32>, levels: Vec<GeneId>) -> Result<Self, EngineError> {
        if levels.len() != domains.len() {
            return Err(EngineError::BadOrder(format!(
                "{} variables ordered, {} declared",
                levels.len(),
                domains.len()
            )));
        }
        let mut level_of = vec![usize::MAX; domains.len()];
        for (k, &v) in levels.iter().enumerate() {
            if v >= domains.len() || level_of[v] != usize::MAX {
                return Err(EngineError::BadOrder(format!("variable #{v} repeated or unknown")));
            }
            level_of[v] = k;
        }
        if let Some(v) = domains.iter().position(|&d| d == 0) {
            return Err(EngineError::BadOrder(format!("variable #{v} has an empty domain")));
        }
        Ok(Self {
            domains,
            levels,
            level_of,
        })
    }

    pub fn declaration(domains: Vec<u32>) -> Self {
        let levels = (0..domains.len()).collect();
        Self::new(domains, levels).expect("identity order")
    }

    pub fn reverse(domains: Vec<u32>) -> Self {
        let levels = (0..domains.len()).rev().collect();
        Self::new(domains, levels).expect("reverse order")
    }

    pub fn var_count(&self) -> usize {
        self.domains.len()
    }

    pub fn domain(&self, var: GeneId) -> u32 {
        self.domains[var]
    }

    pub fn var_at(&self, level: usize) -> GeneId {
        self.levels[level]
    }

    pub fn level_of(&self, var: GeneId) -> usize {
        self.level_of[var]
    }
}

/// One guarded `±1` update of at most one variable.
///
/// `guards` holds inclusive level intervals, sorted by variable, for every
/// constrained variable; unconstrained variables are absent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GuardedUpdate {
    pub guards: Vec<(GeneId, Level, Level)>,
    pub effect: Option<(GeneId, i32)>,
}

impl GuardedUpdate {
    pub fn guard_of(&self, var: GeneId) -> Option<(Level, Level)> {
        self.guards
            .iter()
            .find(|(v, _, _)| *v == var)
            .map(|&(_, lo, hi)| (lo, hi))
    }

    pub fn allows(&self, levels: &[Level]) -> bool {
        self.guards
            .iter()
            .all(|&(v, lo, hi)| levels[v] >= lo && levels[v] <= hi)
    }
}

impl fmt::Display for GuardedUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let guards: Vec<String> = self
            .guards
            .iter()
            .map(|(v, lo, hi)| format!("#{v}∈{lo}..{hi}"))
            .collect();
        write!(f, "[{}]", guards.join(" "))?;
        if let Some((v, d)) = self.effect {
            write!(f, " #{v}{:+}", d)?;
        }
        Ok(())
    }
}

/// A transition relation as a union of guarded updates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicRelation {
    pub updates: Vec<GuardedUpdate>,
}

impl SymbolicRelation {
    /// Collapses each transition's arcs on `P_g`/`Q_g` into a level interval
    /// for gene `g` plus the net change of `P_g`.
    pub fn from_petri_net(net: &PetriNet, map: &StateMap) -> Result<Self, EngineError> {
        let n = map.gene_count();
        let mut updates = Vec::with_capacity(net.transitions().len());
        for t in net.transitions() {
            let mut guards = Vec::new();
            let mut effect = None;
            for g in 0..n {
                let (p, q, max) = (map.level_place(g), map.complement_place(g), map.max_level(g));
                let lo = t.consumes(p);
                let hi = max.saturating_sub(t.consumes(q));
                let delta = t.produces(p) as i64 - t.consumes(p) as i64;
                let (lo, hi) = match delta {
                    0 => (lo, hi),
                    // Trim so the update never leaves the domain.
                    1 => (lo, hi.min(max - 1)),
                    -1 => (lo.max(1), hi),
                    _ => return Err(EngineError::MultiEffect(t.name.clone())),
                };
                if delta != 0 {
                    if effect.is_some() {
                        return Err(EngineError::MultiEffect(t.name.clone()));
                    }
                    effect = Some((g, delta as i32));
                }
                if lo > 0 || hi < max {
                    guards.push((g, lo, hi));
                }
            }
            updates.push(GuardedUpdate { guards, effect });
        }
        Ok(Self { updates })
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }
}
