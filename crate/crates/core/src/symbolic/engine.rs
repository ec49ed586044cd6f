use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::store::{NodeId, Op, Store, FALSE};
use super::{EngineError, SymbolicRelation, VarOrder};
use crate::model::{Cmp, GeneId, Level, State};

struct Shared {
    store: RefCell<Store>,
    /// External handle count per node id.
    refs: RefCell<Vec<u32>>,
}

/// A handle to a canonical set of states. Handles keep their nodes alive;
/// two handles from the same engine are equal iff they denote the same set.
pub struct StateSet {
    id: NodeId,
    shared: Rc<Shared>,
}

impl StateSet {
    pub fn is_empty(&self) -> bool {
        self.id == FALSE
    }
}

impl Clone for StateSet {
    fn clone(&self) -> Self {
        self.shared.refs.borrow_mut()[self.id as usize] += 1;
        StateSet {
            id: self.id,
            shared: Rc::clone(&self.shared),
        }
    }
}

impl Drop for StateSet {
    fn drop(&mut self) {
        self.shared.refs.borrow_mut()[self.id as usize] -= 1;
    }
}

impl PartialEq for StateSet {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && Rc::ptr_eq(&self.shared, &other.shared)
    }
}

impl Eq for StateSet {}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSet(#{})", self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    pub timeout: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: 20_000_000,
            timeout: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    /// High-water mark of allocated nodes (live plus not yet collected).
    pub peak_nodes: usize,
    pub allocated_nodes: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub gc_runs: u64,
    pub fixpoint_rounds: u64,
}

/// One MDD engine instance. Single-threaded; handles must not be mixed
/// between instances.
pub struct Engine {
    shared: Rc<Shared>,
    rounds: Cell<u64>,
}

impl Engine {
    pub fn new(order: VarOrder, limits: Limits) -> Self {
        let mut store = Store::new(order, limits.max_nodes.max(1));
        if let Some(t) = limits.timeout {
            let now = Instant::now();
            store.deadline = Some((now, now + t));
        }
        let slots = store.slot_count();
        Engine {
            shared: Rc::new(Shared {
                store: RefCell::new(store),
                refs: RefCell::new(vec![0; slots]),
            }),
            rounds: Cell::new(0),
        }
    }

    pub fn order(&self) -> VarOrder {
        self.shared.store.borrow().order().clone()
    }

    pub fn var_count(&self) -> usize {
        self.shared.store.borrow().levels()
    }

    fn wrap(&self, id: NodeId) -> StateSet {
        let slots = self.shared.store.borrow().slot_count();
        let mut refs = self.shared.refs.borrow_mut();
        if refs.len() < slots {
            refs.resize(slots, 0);
        }
        refs[id as usize] += 1;
        StateSet {
            id,
            shared: Rc::clone(&self.shared),
        }
    }

    fn own(&self, s: &StateSet) -> Result<NodeId, EngineError> {
        if Rc::ptr_eq(&self.shared, &s.shared) {
            Ok(s.id)
        } else {
            Err(EngineError::ForeignHandle)
        }
    }

    /// Collects garbage if the store has grown past its threshold. Only called
    /// between operations, when every needed node is held by a handle.
    fn maybe_gc(&self) {
        let mut store = self.shared.store.borrow_mut();
        if store.should_collect() {
            let refs = self.shared.refs.borrow();
            let roots = refs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, _)| i as NodeId);
            store.collect(roots);
        }
    }

    fn run<F>(&self, f: F) -> Result<StateSet, EngineError>
    where
        F: FnOnce(&mut Store) -> Result<NodeId, EngineError>,
    {
        self.maybe_gc();
        let id = f(&mut self.shared.store.borrow_mut())?;
        Ok(self.wrap(id))
    }

    pub fn check_deadline(&self) -> Result<(), EngineError> {
        self.shared.store.borrow().check_deadline()
    }

    pub fn empty(&self) -> StateSet {
        self.wrap(FALSE)
    }

    pub fn full(&self) -> StateSet {
        let id = self.shared.store.borrow().full(0);
        self.wrap(id)
    }

    /// All states with `var cmp value`.
    pub fn from_predicate(&self, var: GeneId, cmp: Cmp, value: Level) -> Result<StateSet, EngineError> {
        let (level, max) = {
            let store = self.shared.store.borrow();
            let order = store.order();
            if var >= order.var_count() {
                return Err(EngineError::UnknownVariable(var));
            }
            (order.level_of(var), order.domain(var) - 1)
        };
        if value > max {
            return Err(EngineError::Domain { var, value, max });
        }
        self.run(|s| s.literal(level, |v| cmp.holds(v, value)))
    }

    pub fn singleton(&self, state: &State) -> Result<StateSet, EngineError> {
        {
            let store = self.shared.store.borrow();
            let order = store.order();
            if state.len() != order.var_count() {
                return Err(EngineError::BadOrder(format!(
                    "state has {} genes, engine has {} variables",
                    state.len(),
                    order.var_count()
                )));
            }
            for (var, &v) in state.levels().iter().enumerate() {
                let max = order.domain(var) - 1;
                if v > max {
                    return Err(EngineError::Domain { var, value: v, max });
                }
            }
        }
        self.run(|s| s.minterm(state.levels()))
    }

    fn binary(&self, op: Op, a: &StateSet, b: &StateSet) -> Result<StateSet, EngineError> {
        let (a, b) = (self.own(a)?, self.own(b)?);
        self.run(|s| s.apply(op, a, b))
    }

    pub fn union(&self, a: &StateSet, b: &StateSet) -> Result<StateSet, EngineError> {
        self.binary(Op::Or, a, b)
    }

    pub fn intersect(&self, a: &StateSet, b: &StateSet) -> Result<StateSet, EngineError> {
        self.binary(Op::And, a, b)
    }

    pub fn difference(&self, a: &StateSet, b: &StateSet) -> Result<StateSet, EngineError> {
        self.binary(Op::Diff, a, b)
    }

    /// Complement with respect to the full domain product.
    pub fn complement(&self, a: &StateSet) -> Result<StateSet, EngineError> {
        let a = self.own(a)?;
        self.run(|s| {
            let full = s.full(0);
            s.apply(Op::Diff, full, a)
        })
    }

    pub fn count(&self, a: &StateSet) -> BigUint {
        self.shared.store.borrow().count(a.id)
    }

    pub fn contains(&self, a: &StateSet, state: &State) -> bool {
        self.shared.store.borrow().contains(a.id, state.levels())
    }

    /// Number of decision nodes in the diagram of `a`.
    pub fn node_count(&self, a: &StateSet) -> usize {
        self.shared.store.borrow().size(a.id)
    }

    fn intern(&self, rel: &SymbolicRelation) -> Result<Vec<u32>, EngineError> {
        let mut store = self.shared.store.borrow_mut();
        rel.updates.iter().map(|u| store.intern_update(u)).collect()
    }

    fn image(&self, a: &StateSet, rel: &SymbolicRelation, forward: bool) -> Result<StateSet, EngineError> {
        let a = self.own(a)?;
        let ids = self.intern(rel)?;
        self.run(|s| {
            let mut acc = FALSE;
            for u in ids {
                let img = s.image(u, forward, a)?;
                acc = s.apply(Op::Or, acc, img)?;
            }
            Ok(acc)
        })
    }

    /// States reachable in one step from `a`.
    pub fn post_image(&self, a: &StateSet, rel: &SymbolicRelation) -> Result<StateSet, EngineError> {
        self.image(a, rel, true)
    }

    /// States with a one-step successor in `a`.
    pub fn pre_image(&self, a: &StateSet, rel: &SymbolicRelation) -> Result<StateSet, EngineError> {
        self.image(a, rel, false)
    }

    /// Least fixpoint of `X = init ∪ post(X)`.
    ///
    /// Each round applies the updates one after another to a growing working
    /// set (chaining), so a round may advance more than one BFS layer.
    pub fn reachable(&self, init: &StateSet, rel: &SymbolicRelation) -> Result<StateSet, EngineError> {
        self.own(init)?;
        let ids = self.intern(rel)?;
        let mut reached = init.clone();
        let mut frontier = init.clone();
        while !frontier.is_empty() {
            self.check_deadline()?;
            self.rounds.set(self.rounds.get() + 1);
            let mut work = frontier.clone();
            for &u in &ids {
                let w = work.id;
                work = self.run(|s| {
                    let img = s.image(u, true, w)?;
                    s.apply(Op::Or, w, img)
                })?;
            }
            let new = self.difference(&work, &reached)?;
            reached = self.union(&reached, &work)?;
            frontier = new;
        }
        Ok(reached)
    }

    /// Kleene iteration from the empty set. `f` must be monotone.
    pub fn lfp<F>(&self, f: F) -> Result<StateSet, EngineError>
    where
        F: FnMut(&StateSet) -> Result<StateSet, EngineError>,
    {
        self.iterate(self.empty(), f)
    }

    /// Kleene iteration from the full set. `f` must be monotone.
    pub fn gfp<F>(&self, f: F) -> Result<StateSet, EngineError>
    where
        F: FnMut(&StateSet) -> Result<StateSet, EngineError>,
    {
        self.iterate(self.full(), f)
    }

    fn iterate<F>(&self, mut x: StateSet, mut f: F) -> Result<StateSet, EngineError>
    where
        F: FnMut(&StateSet) -> Result<StateSet, EngineError>,
    {
        loop {
            self.check_deadline()?;
            self.rounds.set(self.rounds.get() + 1);
            let y = f(&x)?;
            if y == x {
                return Ok(x);
            }
            x = y;
        }
    }

    /// A shortest path from some state of `init` to some state of `target`,
    /// or `None` if no target state is reachable.
    ///
    /// Runs a layered BFS (no chaining) and walks back through the stored
    /// layers with pre-images, always choosing the lexicographically smallest
    /// state.
    pub fn bfs_witness(
        &self,
        init: &StateSet,
        target: &StateSet,
        rel: &SymbolicRelation,
    ) -> Result<Option<Vec<State>>, EngineError> {
        self.own(init)?;
        self.own(target)?;
        let mut layers = vec![init.clone()];
        let mut visited = init.clone();
        let hit = loop {
            self.check_deadline()?;
            let last = layers.last().expect("non-empty");
            let hit = self.intersect(last, target)?;
            if !hit.is_empty() {
                break hit;
            }
            let next = self.post_image(last, rel)?;
            let next = self.difference(&next, &visited)?;
            if next.is_empty() {
                return Ok(None);
            }
            visited = self.union(&visited, &next)?;
            layers.push(next);
        };
        let mut cur = self.pick(&hit).expect("non-empty hit");
        let mut path = vec![cur.clone()];
        for layer in layers.iter().rev().skip(1) {
            let single = self.singleton(&cur)?;
            let pred = self.pre_image(&single, rel)?;
            let pred = self.intersect(&pred, layer)?;
            cur = self.pick(&pred).expect("BFS layers are connected");
            path.push(cur.clone());
        }
        path.reverse();
        Ok(Some(path))
    }

    /// Lexicographically smallest state (in variable-id order) of `a`.
    pub fn pick(&self, a: &StateSet) -> Option<State> {
        self.enumerate(a, 1).into_iter().next()
    }

    /// Up to `cap` states of `a` in lexicographic variable-id order,
    /// independent of the diagram's variable order.
    pub fn enumerate(&self, a: &StateSet, cap: usize) -> Vec<State> {
        let store = self.shared.store.borrow();
        let n = store.levels();
        let mut partial: Vec<Option<Level>> = vec![None; n];
        let mut out = Vec::new();
        if cap == 0 || !store.satisfiable_under(a.id, &partial) {
            return out;
        }
        fn rec(
            store: &Store,
            node: NodeId,
            var: usize,
            partial: &mut Vec<Option<Level>>,
            out: &mut Vec<State>,
            cap: usize,
        ) {
            if var == partial.len() {
                out.push(State::new(partial.iter().map(|v| v.expect("assigned")).collect()));
                return;
            }
            for v in 0..store.order().domain(var) {
                if out.len() >= cap {
                    return;
                }
                partial[var] = Some(v);
                if store.satisfiable_under(node, partial) {
                    rec(store, node, var + 1, partial, out, cap);
                }
            }
            partial[var] = None;
        }
        rec(&store, a.id, 0, &mut partial, &mut out, cap);
        out
    }

    pub fn stats(&self) -> EngineStats {
        let store = self.shared.store.borrow();
        EngineStats {
            peak_nodes: store.peak,
            allocated_nodes: store.allocated(),
            cache_hits: store.cache_hits,
            cache_misses: store.cache_misses,
            gc_runs: store.gc_runs,
            fixpoint_rounds: self.rounds.get(),
        }
    }
}
