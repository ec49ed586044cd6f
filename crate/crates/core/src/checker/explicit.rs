//! Explicit-state oracle: breadth-first exploration with a hash set and
//! direct CTL evaluation on the reachable state graph.
//!
//! Nothing here touches the Petri net or the MDD engine; successors come
//! straight from [`Network::successors`].

use std::collections::VecDeque;
use std::hash::Hash;

use num_bigint::BigUint;
use rustc_hash::FxHashMap;

use super::{CheckError, Formula, StableReport, Verdict, STABLE_ENUMERATION_CAP};
use crate::dsl::TemporalOp;
use crate::model::{GeneId, Network, State};

/// A state graph with a distinguished root (the initial state), with
/// adjacency in compressed-row form.
#[derive(Debug, Clone)]
pub struct ExplicitGraph {
    pub root: usize,
    pub states: Vec<State>,
    succ_off: Vec<usize>,
    succ: Vec<u32>,
    pred_off: Vec<usize>,
    pred: Vec<u32>,
}

impl ExplicitGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[self.succ_off[i]..self.succ_off[i + 1]]
            .iter()
            .map(|&t| t as usize)
    }

    pub fn predecessors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred[self.pred_off[i]..self.pred_off[i + 1]]
            .iter()
            .map(|&t| t as usize)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.succ_off[i + 1] - self.succ_off[i]
    }

    pub fn position(&self, s: &State) -> Option<usize> {
        self.states.iter().position(|t| t == s)
    }

    /// Shortest path from the root to any state in `target`.
    pub fn shortest_path(&self, target: &[bool]) -> Option<Vec<State>> {
        let mut parent = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([self.root]);
        parent[self.root] = self.root;
        while let Some(s) = queue.pop_front() {
            if target[s] {
                let mut path = vec![self.states[s].clone()];
                let mut cur = s;
                while cur != self.root {
                    cur = parent[cur];
                    path.push(self.states[cur].clone());
                }
                path.reverse();
                return Some(path);
            }
            for t in self.successors(s) {
                if parent[t] == usize::MAX {
                    parent[t] = s;
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// BFS distance from the root to every state (`usize::MAX` if unreachable).
    pub fn distances(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[self.root] = 0;
        let mut queue = VecDeque::from([self.root]);
        while let Some(s) = queue.pop_front() {
            for t in self.successors(s) {
                if dist[t] == usize::MAX {
                    dist[t] = dist[s] + 1;
                    queue.push_back(t);
                }
            }
        }
        dist
    }

    /// Truth value of `f` at every graph state.
    pub fn eval(&self, f: &Formula) -> Vec<bool> {
        let n = self.len();
        match f {
            Formula::Atom { gene, cmp, value } => self
                .states
                .iter()
                .map(|s| cmp.holds(s.get(*gene), *value))
                .collect(),
            Formula::Deadlock => (0..n).map(|s| self.out_degree(s) == 0).collect(),
            Formula::Not(g) => self.eval(g).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
            }
            Formula::Temporal(op, g) => {
                let sat = self.eval(g);
                match op {
                    TemporalOp::EX => (0..n).map(|s| self.successors(s).any(|t| sat[t])).collect(),
                    TemporalOp::AX => (0..n).map(|s| self.successors(s).all(|t| sat[t])).collect(),
                    TemporalOp::EF => self.backward_closure(sat),
                    TemporalOp::AG => self.always(sat),
                    TemporalOp::EG => self.exists_always(sat),
                    TemporalOp::AF => self.inevitably(sat),
                }
            }
        }
    }

    /// States that can reach a `sat` state (backward BFS).
    fn backward_closure(&self, sat: Vec<bool>) -> Vec<bool> {
        let mut out = sat;
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&s| out[s]).collect();
        while let Some(s) = queue.pop_front() {
            for p in self.predecessors(s) {
                if !out[p] {
                    out[p] = true;
                    queue.push_back(p);
                }
            }
        }
        out
    }

    /// States all of whose descendants (themselves included) satisfy `sat`.
    fn always(&self, sat: Vec<bool>) -> Vec<bool> {
        let mut out = sat;
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&s| !out[s]).collect();
        while let Some(s) = queue.pop_front() {
            for p in self.predecessors(s) {
                if out[p] {
                    out[p] = false;
                    queue.push_back(p);
                }
            }
        }
        out
    }

    /// States with a maximal path (infinite, or ending in a dead state) along
    /// which `sat` holds everywhere.
    fn exists_always(&self, sat: Vec<bool>) -> Vec<bool> {
        let mut out = sat;
        let mut live: Vec<usize> = (0..self.len())
            .map(|s| self.successors(s).filter(|&t| out[t]).count())
            .collect();
        let mut queue: VecDeque<usize> = (0..self.len())
            .filter(|&s| out[s] && self.out_degree(s) > 0 && live[s] == 0)
            .collect();
        for &s in &queue {
            out[s] = false;
        }
        while let Some(s) = queue.pop_front() {
            for p in self.predecessors(s) {
                if out[p] {
                    live[p] -= 1;
                    if live[p] == 0 {
                        out[p] = false;
                        queue.push_back(p);
                    }
                }
            }
        }
        out
    }

    /// States from which every maximal path reaches a `sat` state.
    fn inevitably(&self, sat: Vec<bool>) -> Vec<bool> {
        let mut out = sat;
        let mut pending: Vec<usize> = (0..self.len()).map(|s| self.out_degree(s)).collect();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&s| out[s]).collect();
        while let Some(s) = queue.pop_front() {
            for p in self.predecessors(s) {
                if !out[p] {
                    pending[p] -= 1;
                    if pending[p] == 0 {
                        out[p] = true;
                        queue.push_back(p);
                    }
                }
            }
        }
        out
    }
}

/// Maps states to hash keys and computes a successor's key from its
/// predecessor's without building the successor.
trait Keyer {
    type Key: Hash + Eq + Clone;
    fn key(&self, s: &State) -> Self::Key;
    fn step(&self, key: &Self::Key, s: &State, gene: GeneId, up: bool) -> Self::Key;
}

/// Mixed-radix packing, usable when the potential space fits in a `u128`.
struct Packed {
    strides: Vec<u128>,
}

impl Packed {
    fn new(net: &Network) -> Option<Self> {
        let mut strides = vec![0u128; net.gene_count()];
        let mut acc: u128 = 1;
        for g in (0..net.gene_count()).rev() {
            strides[g] = acc;
            acc = acc.checked_mul(net.max_level(g) as u128 + 1)?;
        }
        Some(Packed { strides })
    }
}

impl Keyer for Packed {
    type Key = u128;

    fn key(&self, s: &State) -> u128 {
        s.levels()
            .iter()
            .zip(&self.strides)
            .map(|(&l, &k)| l as u128 * k)
            .sum()
    }

    fn step(&self, key: &u128, _: &State, gene: GeneId, up: bool) -> u128 {
        if up {
            key + self.strides[gene]
        } else {
            key - self.strides[gene]
        }
    }
}

struct Plain;

impl Keyer for Plain {
    type Key = State;

    fn key(&self, s: &State) -> State {
        s.clone()
    }

    fn step(&self, _: &State, s: &State, gene: GeneId, up: bool) -> State {
        let l = s.get(gene);
        s.with(gene, if up { l + 1 } else { l - 1 })
    }
}

/// Breadth-first exploration from the initial state, failing once more than
/// `cap` states have been discovered.
pub fn explicit_reachable(net: &Network, cap: usize) -> Result<ExplicitGraph, CheckError> {
    match Packed::new(net) {
        Some(p) => explore(net, cap, &p),
        None => explore(net, cap, &Plain),
    }
}

fn explore<K: Keyer>(net: &Network, cap: usize, keyer: &K) -> Result<ExplicitGraph, CheckError> {
    if cap == 0 {
        return Err(CheckError::CapExceeded { cap });
    }
    let limit = cap.min(u32::MAX as usize);
    let init = net.initial().clone();
    let mut index: FxHashMap<K::Key, u32> = FxHashMap::default();
    index.insert(keyer.key(&init), 0);
    let mut keys = vec![keyer.key(&init)];
    let mut states = vec![init];
    let mut succ_off = vec![0usize];
    let mut succ = Vec::new();
    let mut next = 0;
    while next < states.len() {
        let s = &states[next];
        let mut found = Vec::new();
        for g in 0..net.gene_count() {
            let (target, cur) = (net.target_level(g, s), s.get(g));
            if target == cur {
                continue;
            }
            let up = target > cur;
            let k = keyer.step(&keys[next], s, g, up);
            let id = match index.get(&k) {
                Some(&id) => id,
                None => {
                    if states.len() + found.len() >= limit {
                        return Err(CheckError::CapExceeded { cap });
                    }
                    let id = (states.len() + found.len()) as u32;
                    index.insert(k.clone(), id);
                    found.push((g, up, k));
                    id
                }
            };
            succ.push(id);
        }
        let base = states[next].clone();
        for (g, up, k) in found {
            let l = base.get(g);
            states.push(base.with(g, if up { l + 1 } else { l - 1 }));
            keys.push(k);
        }
        succ_off.push(succ.len());
        next += 1;
    }
    Ok(ExplicitGraph::assemble(0, states, succ_off, succ))
}

/// The graph over the whole potential state space, rooted at the initial
/// state. Fails if the space is larger than `cap`.
pub fn explicit_full_graph(net: &Network, cap: usize) -> Result<ExplicitGraph, CheckError> {
    if net.state_space_size() > cap.min(u32::MAX as usize) as u128 {
        return Err(CheckError::CapExceeded { cap });
    }
    let packed = Packed::new(net).expect("space fits the cap");
    let states: Vec<State> = net.all_states().collect();
    // Lexicographic enumeration makes the packed key equal to the position.
    let mut succ_off = vec![0usize];
    let mut succ = Vec::new();
    for s in &states {
        for (_, t) in net.successors(s) {
            succ.push(packed.key(&t) as u32);
        }
        succ_off.push(succ.len());
    }
    let root = packed.key(net.initial()) as usize;
    Ok(ExplicitGraph::assemble(root, states, succ_off, succ))
}

impl ExplicitGraph {
    fn assemble(root: usize, states: Vec<State>, succ_off: Vec<usize>, succ: Vec<u32>) -> Self {
        let n = states.len();
        let mut pred_off = vec![0usize; n + 1];
        for &t in &succ {
            pred_off[t as usize + 1] += 1;
        }
        for i in 0..n {
            pred_off[i + 1] += pred_off[i];
        }
        let mut fill = pred_off.clone();
        let mut pred = vec![0u32; succ.len()];
        for s in 0..n {
            for &t in &succ[succ_off[s]..succ_off[s + 1]] {
                pred[fill[t as usize]] = s as u32;
                fill[t as usize] += 1;
            }
        }
        ExplicitGraph {
            root,
            states,
            succ_off,
            succ,
            pred_off,
            pred,
        }
    }
}

/// Checks `f` at the initial state, with the same witness policy as the
/// symbolic checker (shortest paths, though ties may break differently).
pub fn explicit_check(net: &Network, f: &Formula, cap: usize) -> Result<Verdict, CheckError> {
    let graph = explicit_reachable(net, cap)?;
    let sat = graph.eval(f);
    let holds = sat[graph.root];
    let evidence = match f {
        Formula::Temporal(TemporalOp::EF, g) if holds => graph.shortest_path(&graph.eval(g)),
        Formula::Temporal(TemporalOp::AG, g) if !holds => {
            let bad: Vec<bool> = graph.eval(g).into_iter().map(|b| !b).collect();
            graph.shortest_path(&bad)
        }
        _ => None,
    };
    Ok(Verdict {
        holds,
        evidence,
        reachable_count: BigUint::from(graph.len()),
        satisfying_reachable_count: BigUint::from(sat.iter().filter(|b| **b).count()),
    })
}

/// Stable states of the whole potential state space by enumeration,
/// optionally restricted to those satisfying `filter`.
pub fn explicit_stable_states(
    net: &Network,
    filter: Option<&Formula>,
    cap: usize,
) -> Result<StableReport, CheckError> {
    let graph = explicit_full_graph(net, cap)?;
    let keep = match filter {
        Some(f) => graph.eval(f),
        None => vec![true; graph.len()],
    };
    let stable: Vec<State> = (0..graph.len())
        .filter(|&i| keep[i] && graph.out_degree(i) == 0)
        .map(|i| graph.states[i].clone())
        .collect();
    Ok(StableReport {
        count: BigUint::from(stable.len()),
        states: stable.into_iter().take(STABLE_ENUMERATION_CAP).collect(),
    })
}
