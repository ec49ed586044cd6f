//! Node store: unique table, operation cache, mark-and-sweep collection.
//!
//! Node ids are raw `u32`s. Nothing here protects intermediate results, so
//! collection only runs at operation boundaries, when every node still needed
//! is reachable from an externally referenced handle.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{EngineError, GuardedUpdate, VarOrder};
use crate::model::Level;

pub(crate) type NodeId = u32;

pub(crate) const FALSE: NodeId = 0;
pub(crate) const TRUE: NodeId = 1;

const FREE: u32 = u32::MAX;

/// Collections are attempted once this many nodes are allocated, or twice the
/// number that survived the previous collection, whichever is larger.
const MIN_GC_THRESHOLD: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Op {
    And,
    Or,
    Diff,
    Post,
    Pre,
}

#[derive(Debug)]
struct Node {
    level: u32,
    children: Box<[NodeId]>,
}

/// An update re-indexed by level.
#[derive(Debug)]
struct LevelUpdate {
    guard: Vec<(Level, Level)>,
    effect: Option<(usize, i32)>,
    /// Deepest constrained level; below it the update is the identity.
    last: usize,
}

#[derive(Debug)]
pub(crate) struct Store {
    order: VarOrder,
    nodes: Vec<Node>,
    free: Vec<NodeId>,
    unique: HashMap<(u32, Box<[NodeId]>), NodeId>,
    cache: HashMap<(Op, NodeId, NodeId), NodeId>,
    updates: Vec<LevelUpdate>,
    update_ids: HashMap<GuardedUpdate, u32>,
    /// `full[k]`: the set of all assignments to levels `k..`.
    full: Vec<NodeId>,
    allocated: usize,
    pub(crate) peak: usize,
    gc_threshold: usize,
    pub(crate) max_nodes: usize,
    pub(crate) deadline: Option<(Instant, Instant)>,
    alloc_tick: u32,
    pub(crate) cache_hits: u64,
    pub(crate) cache_misses: u64,
    pub(crate) gc_runs: u64,
}

impl Store {
    pub(crate) fn new(order: VarOrder, max_nodes: usize) -> Self {
        let n = order.var_count();
        let mut store = Store {
            order,
            nodes: vec![
                Node {
                    level: n as u32,
                    children: Box::new([]),
                },
                Node {
                    level: n as u32,
                    children: Box::new([]),
                },
            ],
            free: Vec::new(),
            unique: HashMap::new(),
            cache: HashMap::new(),
            updates: Vec::new(),
            update_ids: HashMap::new(),
            full: vec![TRUE; n + 1],
            allocated: 0,
            peak: 0,
            gc_threshold: MIN_GC_THRESHOLD,
            max_nodes: usize::MAX,
            deadline: None,
            alloc_tick: 0,
            cache_hits: 0,
            cache_misses: 0,
            gc_runs: 0,
        };
        for k in (0..n).rev() {
            let dom = store.order.domain(store.order.var_at(k)) as usize;
            let below = store.full[k + 1];
            store.full[k] = store
                .mk(k, vec![below; dom])
                .expect("no limit while building the full-space chain");
        }
        // The chain is always needed; the limit applies from here on.
        store.max_nodes = max_nodes;
        store
    }

    pub(crate) fn order(&self) -> &VarOrder {
        &self.order
    }

    pub(crate) fn levels(&self) -> usize {
        self.order.var_count()
    }

    pub(crate) fn full(&self, level: usize) -> NodeId {
        self.full[level]
    }

    pub(crate) fn allocated(&self) -> usize {
        self.allocated
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn level(&self, id: NodeId) -> usize {
        self.nodes[id as usize].level as usize
    }

    pub(crate) fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id as usize].children
    }

    pub(crate) fn check_deadline(&self) -> Result<(), EngineError> {
        if let Some((start, end)) = self.deadline {
            let now = Instant::now();
            if now >= end {
                return Err(EngineError::Timeout {
                    seconds: now.duration_since(start).as_secs_f64(),
                    peak: self.peak,
                });
            }
        }
        Ok(())
    }

    /// Finds or creates the node `(level, children)`, collapsing all-`FALSE`
    /// nodes to `FALSE`.
    pub(crate) fn mk(&mut self, level: usize, children: Vec<NodeId>) -> Result<NodeId, EngineError> {
        if children.iter().all(|&c| c == FALSE) {
            return Ok(FALSE);
        }
        let key = (level as u32, children.into_boxed_slice());
        if let Some(&id) = self.unique.get(&key) {
            return Ok(id);
        }
        if self.allocated >= self.max_nodes {
            return Err(EngineError::NodeLimit {
                limit: self.max_nodes,
                peak: self.peak.max(self.allocated),
            });
        }
        self.alloc_tick = self.alloc_tick.wrapping_add(1);
        if self.alloc_tick.is_multiple_of(4096) {
            self.check_deadline()?;
        }
        let node = Node {
            level: key.0,
            children: key.1.clone(),
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as NodeId
            }
        };
        self.unique.insert(key, id);
        self.allocated += 1;
        self.peak = self.peak.max(self.allocated);
        Ok(id)
    }

    /// Node for the set of all states whose variable at `level` satisfies
    /// `pred`, everything else unconstrained.
    pub(crate) fn literal(
        &mut self,
        level: usize,
        pred: impl Fn(Level) -> bool,
    ) -> Result<NodeId, EngineError> {
        let dom = self.order.domain(self.order.var_at(level));
        let below = self.full[level + 1];
        let children = (0..dom).map(|v| if pred(v) { below } else { FALSE }).collect();
        let mut node = self.mk(level, children)?;
        for k in (0..level).rev() {
            let dom = self.order.domain(self.order.var_at(k)) as usize;
            node = self.mk(k, vec![node; dom])?;
        }
        Ok(node)
    }

    /// Node for a single complete assignment, given as levels per variable.
    pub(crate) fn minterm(&mut self, values: &[Level]) -> Result<NodeId, EngineError> {
        let mut node = TRUE;
        for k in (0..self.levels()).rev() {
            let var = self.order.var_at(k);
            let dom = self.order.domain(var) as usize;
            let mut children = vec![FALSE; dom];
            children[values[var] as usize] = node;
            node = self.mk(k, children)?;
        }
        Ok(node)
    }

    pub(crate) fn apply(&mut self, op: Op, a: NodeId, b: NodeId) -> Result<NodeId, EngineError> {
        // Terminal and absorbing cases.
        match op {
            Op::And => {
                if a == FALSE || b == FALSE {
                    return Ok(FALSE);
                }
                if a == b {
                    return Ok(a);
                }
            }
            Op::Or => {
                if a == FALSE || a == b {
                    return Ok(b);
                }
                if b == FALSE {
                    return Ok(a);
                }
            }
            Op::Diff => {
                if a == FALSE || a == b {
                    return Ok(FALSE);
                }
                if b == FALSE {
                    return Ok(a);
                }
            }
            Op::Post | Op::Pre => unreachable!("image ops go through `image`"),
        }
        // Both operands are non-FALSE; at the terminal level both are TRUE,
        // which the `a == b` cases above have handled.
        let level = self.level(a);
        debug_assert_eq!(level, self.level(b), "quasi-reduced operands share levels");
        let full = self.full[level];
        match op {
            Op::And if a == full => return Ok(b),
            Op::And if b == full => return Ok(a),
            Op::Or if a == full || b == full => return Ok(full),
            Op::Diff if b == full => return Ok(FALSE),
            _ => {}
        }

        let key = match op {
            Op::And | Op::Or => (op, a.min(b), a.max(b)),
            _ => (op, a, b),
        };
        if let Some(&r) = self.cache.get(&key) {
            self.cache_hits += 1;
            return Ok(r);
        }
        self.cache_misses += 1;
        let dom = self.nodes[a as usize].children.len();
        let mut children = Vec::with_capacity(dom);
        for i in 0..dom {
            let ca = self.nodes[a as usize].children[i];
            let cb = self.nodes[b as usize].children[i];
            children.push(self.apply(op, ca, cb)?);
        }
        let r = self.mk(level, children)?;
        self.cache.insert(key, r);
        Ok(r)
    }

    pub(crate) fn intern_update(&mut self, u: &GuardedUpdate) -> Result<u32, EngineError> {
        if let Some(&id) = self.update_ids.get(u) {
            return Ok(id);
        }
        let n = self.levels();
        let mut guard = Vec::with_capacity(n);
        for k in 0..n {
            let dom = self.order.domain(self.order.var_at(k));
            guard.push((0, dom - 1));
        }
        let mut last = 0;
        let mut touch = |level: usize| last = last.max(level + 1);
        for &(var, lo, hi) in &u.guards {
            if var >= n {
                return Err(EngineError::UnknownVariable(var));
            }
            let k = self.order.level_of(var);
            let (glo, ghi) = guard[k];
            guard[k] = (glo.max(lo), ghi.min(hi));
            touch(k);
        }
        let mut effect = None;
        if let Some((var, delta)) = u.effect {
            if var >= n {
                return Err(EngineError::UnknownVariable(var));
            }
            let k = self.order.level_of(var);
            let (mut lo, mut hi) = guard[k];
            let max = self.order.domain(var) - 1;
            let step = delta.unsigned_abs();
            if step > max {
                (lo, hi) = (1, 0);
            } else if delta > 0 {
                hi = hi.min(max - step);
            } else {
                lo = lo.max(step);
            }
            guard[k] = (lo, hi);
            effect = Some((k, delta));
            touch(k);
        }
        let id = self.updates.len() as u32;
        self.updates.push(LevelUpdate {
            guard,
            effect,
            last,
        });
        self.update_ids.insert(u.clone(), id);
        Ok(id)
    }

    /// Post-image (`forward`) or pre-image of `node` under one update.
    pub(crate) fn image(
        &mut self,
        u: u32,
        forward: bool,
        node: NodeId,
    ) -> Result<NodeId, EngineError> {
        if node == FALSE {
            return Ok(FALSE);
        }
        let level = self.level(node);
        if level >= self.updates[u as usize].last {
            return Ok(node);
        }
        let op = if forward { Op::Post } else { Op::Pre };
        if let Some(&r) = self.cache.get(&(op, node, u)) {
            self.cache_hits += 1;
            return Ok(r);
        }
        self.cache_misses += 1;
        let upd = &self.updates[u as usize];
        let (lo, hi) = upd.guard[level];
        let delta = match upd.effect {
            Some((k, d)) if k == level => d as i64,
            _ => 0,
        };
        let dom = self.nodes[node as usize].children.len();
        let mut children = vec![FALSE; dom];
        if lo <= hi {
            for v in lo..=hi {
                let shifted = v as i64 + delta;
                if shifted < 0 || shifted >= dom as i64 {
                    continue;
                }
                let (src, dst) = if forward {
                    (v as usize, shifted as usize)
                } else {
                    (shifted as usize, v as usize)
                };
                let child = self.nodes[node as usize].children[src];
                children[dst] = self.image(u, forward, child)?;
            }
        }
        let r = self.mk(level, children)?;
        self.cache.insert((op, node, u), r);
        Ok(r)
    }

    pub(crate) fn count(&self, node: NodeId) -> BigUint {
        let mut memo: HashMap<NodeId, BigUint> = HashMap::new();
        self.count_rec(node, &mut memo)
    }

    fn count_rec(&self, node: NodeId, memo: &mut HashMap<NodeId, BigUint>) -> BigUint {
        match node {
            FALSE => return BigUint::zero(),
            TRUE => return BigUint::one(),
            _ => {}
        }
        if let Some(c) = memo.get(&node) {
            return c.clone();
        }
        let mut total = BigUint::zero();
        for &c in self.children(node).iter() {
            total += self.count_rec(c, memo);
        }
        memo.insert(node, total.clone());
        total
    }

    /// Distinct non-terminal nodes reachable from `node`.
    pub(crate) fn size(&self, node: NodeId) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![node];
        while let Some(id) = stack.pop() {
            if id <= TRUE || !seen.insert(id) {
                continue;
            }
            stack.extend(self.children(id).iter().copied());
        }
        seen.len()
    }

    /// Whether some state in `node` agrees with every fixed value in
    /// `partial` (indexed by variable).
    pub(crate) fn satisfiable_under(&self, node: NodeId, partial: &[Option<Level>]) -> bool {
        let mut memo = HashMap::new();
        self.sat_rec(node, partial, &mut memo)
    }

    fn sat_rec(
        &self,
        node: NodeId,
        partial: &[Option<Level>],
        memo: &mut HashMap<NodeId, bool>,
    ) -> bool {
        match node {
            FALSE => return false,
            TRUE => return true,
            _ => {}
        }
        if let Some(&r) = memo.get(&node) {
            return r;
        }
        let var = self.order.var_at(self.level(node));
        let r = match partial[var] {
            Some(v) => self.sat_rec(self.children(node)[v as usize], partial, memo),
            None => self
                .children(node)
                .iter()
                .any(|&c| self.sat_rec(c, partial, memo)),
        };
        memo.insert(node, r);
        r
    }

    pub(crate) fn contains(&self, node: NodeId, values: &[Level]) -> bool {
        let mut id = node;
        while id > TRUE {
            let var = self.order.var_at(self.level(id));
            match self.children(id).get(values[var] as usize) {
                Some(&c) => id = c,
                None => return false,
            }
        }
        id == TRUE
    }

    pub(crate) fn should_collect(&self) -> bool {
        self.allocated > self.gc_threshold
    }

    /// Frees every node not reachable from `roots` or the full-space chain.
    pub(crate) fn collect(&mut self, roots: impl Iterator<Item = NodeId>) {
        let mut marked = vec![false; self.nodes.len()];
        marked[FALSE as usize] = true;
        marked[TRUE as usize] = true;
        let mut stack: Vec<NodeId> = roots.chain(self.full.iter().copied()).collect();
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut marked[id as usize], true) {
                continue;
            }
            stack.extend(self.nodes[id as usize].children.iter().copied());
        }
        for (id, &live) in marked.iter().enumerate().skip(2) {
            if live || self.nodes[id].level == FREE {
                continue;
            }
            let node = std::mem::replace(
                &mut self.nodes[id],
                Node {
                    level: FREE,
                    children: Box::new([]),
                },
            );
            self.unique.remove(&(node.level, node.children));
            self.free.push(id as NodeId);
            self.allocated -= 1;
        }
        self.cache.retain(|&(op, a, b), r| {
            let ok = marked[a as usize] && marked[*r as usize];
            match op {
                Op::Post | Op::Pre => ok,
                _ => ok && marked[b as usize],
            }
        });
        self.gc_threshold = MIN_GC_THRESHOLD.max(2 * self.allocated);
        self.gc_runs += 1;
    }
}
