//! Place/transition nets and the compiler from regulatory networks.
//!
//! Each gene `g` with maximum level `M` becomes a pair of places: `P_g`
//! holding `level` tokens and its complement `Q_g` holding `M - level`.
//! Threshold tests become weighted self-loops, so no inhibitor arcs are
//! needed and the net's interleaving semantics matches the network's
//! asynchronous unit-step semantics state for state.

mod export;

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::model::{GeneId, Level, Network, State};

pub use export::{from_json, to_dot, to_json};

pub type PlaceId = usize;
pub type TransitionId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PnError {
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("marking has {got} places, net has {expected}")]
    MarkingSize { expected: usize, got: usize },
    #[error("transition `{transition}` references undeclared place #{place}")]
    UnknownPlace { transition: String, place: PlaceId },
    #[error("transition `{0}` has an arc of weight 0")]
    ZeroWeight(String),
    #[error("duplicate place `{0}`")]
    DuplicatePlace(String),
    #[error("invalid net description: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub name: String,
    pub capacity: u32,
}

/// A transition with its input (`consume`) and output (`produce`) arcs,
/// each sorted by place and with weights of at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub consume: Vec<(PlaceId, u32)>,
    pub produce: Vec<(PlaceId, u32)>,
}

impl Transition {
    fn weight(arcs: &[(PlaceId, u32)], p: PlaceId) -> u32 {
        arcs.iter().find(|(q, _)| *q == p).map_or(0, |(_, w)| *w)
    }

    pub fn consumes(&self, p: PlaceId) -> u32 {
        Self::weight(&self.consume, p)
    }

    pub fn produces(&self, p: PlaceId) -> u32 {
        Self::weight(&self.produce, p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn tokens(&self, p: PlaceId) -> u32 {
        self.0[p]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    pub name: String,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    initial: Marking,
}

impl PetriNet {
    pub fn new(
        name: impl Into<String>,
        places: Vec<Place>,
        mut transitions: Vec<Transition>,
        initial: Marking,
    ) -> Result<Self, PnError> {
        if initial.0.len() != places.len() {
            return Err(PnError::MarkingSize {
                expected: places.len(),
                got: initial.0.len(),
            });
        }
        let mut names = HashSet::new();
        for p in &places {
            if !names.insert(p.name.as_str()) {
                return Err(PnError::DuplicatePlace(p.name.clone()));
            }
        }
        for t in &mut transitions {
            for &(p, w) in t.consume.iter().chain(&t.produce) {
                if p >= places.len() {
                    return Err(PnError::UnknownPlace {
                        transition: t.name.clone(),
                        place: p,
                    });
                }
                if w == 0 {
                    return Err(PnError::ZeroWeight(t.name.clone()));
                }
            }
            t.consume.sort_unstable();
            t.produce.sort_unstable();
        }
        Ok(Self {
            name: name.into(),
            places,
            transitions,
            initial,
        })
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p.name == name)
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transitions.iter().position(|t| t.name == name)
    }

    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.transitions[t].consume.iter().all(|&(p, w)| m.0[p] >= w)
    }

    /// Transitions enabled at `m`, in declaration order.
    pub fn enabled(&self, m: &Marking) -> Vec<TransitionId> {
        (0..self.transitions.len())
            .filter(|&t| self.is_enabled(m, t))
            .collect()
    }

    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking, PnError> {
        if m.0.len() != self.places.len() {
            return Err(PnError::MarkingSize {
                expected: self.places.len(),
                got: m.0.len(),
            });
        }
        if !self.is_enabled(m, t) {
            return Err(PnError::NotEnabled(self.transitions[t].name.clone()));
        }
        let tr = &self.transitions[t];
        let mut next = m.clone();
        for &(p, w) in &tr.consume {
            next.0[p] -= w;
        }
        for &(p, w) in &tr.produce {
            next.0[p] += w;
        }
        Ok(next)
    }
}

/// The correspondence between network states and consistent markings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMap {
    /// `(P_g, Q_g, max_level(g))` per gene.
    genes: Vec<(PlaceId, PlaceId, Level)>,
    places: usize,
}

impl StateMap {
    pub fn level_place(&self, g: GeneId) -> PlaceId {
        self.genes[g].0
    }

    pub fn complement_place(&self, g: GeneId) -> PlaceId {
        self.genes[g].1
    }

    pub fn gene_count(&self) -> usize {
        self.genes.len()
    }

    pub fn max_level(&self, g: GeneId) -> Level {
        self.genes[g].2
    }

    pub fn to_marking(&self, s: &State) -> Marking {
        let mut m = vec![0; self.places];
        for (g, &(p, q, max)) in self.genes.iter().enumerate() {
            m[p] = s.get(g);
            m[q] = max - s.get(g);
        }
        Marking(m)
    }

    /// The state encoded by `m`, or `None` if some complement pair is
    /// inconsistent.
    pub fn to_state(&self, m: &Marking) -> Option<State> {
        if m.0.len() != self.places {
            return None;
        }
        let mut levels = Vec::with_capacity(self.genes.len());
        for &(p, q, max) in &self.genes {
            if m.0[p] + m.0[q] != max || m.0[p] > max {
                return None;
            }
            levels.push(m.0[p]);
        }
        Some(State::new(levels))
    }
}

/// Closed level interval `[lo, hi]` of a regulator.
type Interval = (Level, Level);

/// Splits `0..=max` at the levels where some atom over the regulator changes
/// truth value.
fn threshold_partition(cuts: &[Level], max: Level) -> Vec<Interval> {
    let mut bounds: Vec<Level> = cuts.iter().copied().filter(|&c| c >= 1 && c <= max).collect();
    bounds.sort_unstable();
    bounds.dedup();
    let mut out = Vec::with_capacity(bounds.len() + 1);
    let mut lo = 0;
    for b in bounds {
        out.push((lo, b - 1));
        lo = b;
    }
    out.push((lo, max));
    out
}

type Arcs = Vec<(PlaceId, u32)>;

/// Compiles a validated network into a P/T net plus the state/marking map.
pub fn compile(net: &Network) -> (PetriNet, StateMap) {
    let n = net.gene_count();
    let mut places = Vec::with_capacity(2 * n);
    let mut map = Vec::with_capacity(n);
    let mut initial = Vec::with_capacity(2 * n);
    for (g, gene) in net.genes().iter().enumerate() {
        let p = places.len();
        places.push(Place {
            name: format!("P_{}", gene.name),
            capacity: gene.max_level,
        });
        places.push(Place {
            name: format!("Q_{}", gene.name),
            capacity: gene.max_level,
        });
        map.push((p, p + 1, gene.max_level));
        initial.push(net.initial().get(g));
        initial.push(gene.max_level - net.initial().get(g));
    }
    let state_map = StateMap {
        genes: map,
        places: places.len(),
    };

    let mut transitions = Vec::new();
    let mut seen: HashSet<(Arcs, Arcs)> = HashSet::new();
    for g in 0..n {
        let rule = net.rule(g).expect("compile requires a validated network");
        let max = net.max_level(g);
        let regulators: Vec<GeneId> = rule.regulators().into_iter().filter(|&r| r != g).collect();
        let partitions: Vec<Vec<Interval>> = regulators
            .iter()
            .map(|&r| {
                let cuts: Vec<Level> = rule
                    .clauses
                    .iter()
                    .flat_map(|c| c.condition.atoms())
                    .filter(|a| a.gene == r)
                    .flat_map(|a| a.cmp.cut_points(a.value))
                    .collect();
                threshold_partition(&cuts, net.max_level(r))
            })
            .collect();

        let mut choice = vec![0usize; regulators.len()];
        loop {
            let context: Vec<(GeneId, Interval)> = regulators
                .iter()
                .zip(&choice)
                .enumerate()
                .map(|(i, (&r, &c))| (r, partitions[i][c]))
                .collect();
            let mut repr = State::zeros(n);
            for &(r, (lo, _)) in &context {
                repr = repr.with(r, lo);
            }
            for level in 0..=max {
                let s = repr.with(g, level);
                let target = rule.evaluate(&s).expect("validated rule");
                if target == level {
                    continue;
                }
                let up = target > level;
                let t = make_transition(net, &state_map, g, level, up, &context);
                if seen.insert((t.consume.clone(), t.produce.clone())) {
                    transitions.push(t);
                }
            }

            // Advance the mixed-radix context counter.
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < partitions[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
    }

    let pn = PetriNet::new(net.name(), places, transitions, Marking(initial))
        .expect("compiled arcs reference declared places");
    (pn, state_map)
}

fn make_transition(
    net: &Network,
    map: &StateMap,
    g: GeneId,
    level: Level,
    up: bool,
    context: &[(GeneId, Interval)],
) -> Transition {
    let max = map.max_level(g);
    // Minimum tokens required per place, and the net token change.
    let mut need: BTreeMap<PlaceId, u32> = BTreeMap::new();
    let mut delta: BTreeMap<PlaceId, i64> = BTreeMap::new();
    let mut require = |p: PlaceId, w: u32| {
        if w > 0 {
            let e = need.entry(p).or_insert(0);
            *e = (*e).max(w);
        }
    };
    require(map.level_place(g), level);
    require(map.complement_place(g), max - level);
    for &(r, (lo, hi)) in context {
        require(map.level_place(r), lo);
        require(map.complement_place(r), map.max_level(r) - hi);
    }
    let (from, to) = if up {
        (map.complement_place(g), map.level_place(g))
    } else {
        (map.level_place(g), map.complement_place(g))
    };
    *delta.entry(from).or_insert(0) -= 1;
    *delta.entry(to).or_insert(0) += 1;

    let mut places: Vec<PlaceId> = need.keys().chain(delta.keys()).copied().collect();
    places.sort_unstable();
    places.dedup();
    let mut consume = Vec::new();
    let mut produce = Vec::new();
    for p in places {
        let c = need.get(&p).copied().unwrap_or(0) as i64;
        let c = c.max(-delta.get(&p).copied().unwrap_or(0));
        let pr = c + delta.get(&p).copied().unwrap_or(0);
        if c > 0 {
            consume.push((p, c as u32));
        }
        if pr > 0 {
            produce.push((p, pr as u32));
        }
    }

    let gname = &net.genes()[g].name;
    let mut name = format!("{}_{}@{}", if up { "inc" } else { "dec" }, gname, level);
    if !context.is_empty() {
        let ctx: Vec<String> = context
            .iter()
            .map(|&(r, (lo, hi))| format!("{}={}..{}", net.genes()[r].name, lo, hi))
            .collect();
        name.push('[');
        name.push_str(&ctx.join(","));
        name.push(']');
    }
    Transition {
        name,
        consume,
        produce,
    }
}
