#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write;
use std::ops::Not;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regnet::checker::Formula;
use regnet::dsl::{load_network, TemporalOp};
use regnet::model::{Cmp, Network, State};

pub const GENE_NAMES: [&str; 4] = ["a", "b", "c", "d"];
pub const CMPS: [Cmp; 5] = [Cmp::Ge, Cmp::Le, Cmp::Eq, Cmp::Gt, Cmp::Lt];
pub const TEMPORAL: [TemporalOp; 6] = [
    TemporalOp::EX,
    TemporalOp::EF,
    TemporalOp::EG,
    TemporalOp::AX,
    TemporalOp::AF,
    TemporalOp::AG,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).expect("fixture exists")
}

pub fn load(text: &str) -> Network {
    match load_network(text) {
        Ok((net, _)) => net,
        Err(diags) => panic!("model does not load: {diags:?}\n{text}"),
    }
}

/// A well-formed random model with at most `max_genes` genes of maximum
/// level at most `max_level`, written in the network language.
pub fn random_network_text(rng: &mut impl Rng, max_genes: usize, max_level: u32) -> String {
    let n = rng.gen_range(1..=max_genes);
    let maxes: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_level)).collect();
    let mut text = String::new();
    writeln!(text, "network R{}", rng.gen_range(0..1000)).unwrap();
    for g in 0..n {
        writeln!(text, "gene {} levels 0..{}", GENE_NAMES[g], maxes[g]).unwrap();
    }
    let mut regulators = vec![Vec::new(); n];
    for s in 0..n {
        for t in 0..n {
            if rng.gen_bool(0.45) {
                let sign = if rng.gen_bool(0.5) { "->" } else { "-|" };
                let th = rng.gen_range(1..=maxes[s]);
                writeln!(text, "{} {} {} threshold {}", GENE_NAMES[s], sign, GENE_NAMES[t], th).unwrap();
                regulators[t].push(s);
            }
        }
    }
    for t in 0..n {
        let mut clauses = Vec::new();
        if !regulators[t].is_empty() {
            for _ in 0..rng.gen_range(0..=2) {
                let cond = random_condition(rng, &regulators[t], &maxes, 2);
                clauses.push(format!("when {} -> {}", cond, rng.gen_range(0..=maxes[t])));
            }
        }
        let mut line = format!("rule {}: ", GENE_NAMES[t]);
        if !clauses.is_empty() {
            line += &clauses.join(", ");
            line += " ";
        }
        write!(line, "default {}", rng.gen_range(0..=maxes[t])).unwrap();
        writeln!(text, "{line}").unwrap();
    }
    let mut assigned = Vec::new();
    for g in 0..n {
        if rng.gen_bool(0.6) {
            assigned.push(format!("{} = {}", GENE_NAMES[g], rng.gen_range(0..=maxes[g])));
        }
    }
    if !assigned.is_empty() {
        writeln!(text, "init {}", assigned.join(", ")).unwrap();
    }
    text
}

fn random_condition(rng: &mut impl Rng, regs: &[usize], maxes: &[u32], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.5) {
        let g = *regs.choose(rng).unwrap();
        let cmp = CMPS.choose(rng).unwrap();
        return format!("{} {} {}", GENE_NAMES[g], cmp.symbol(), rng.gen_range(0..=maxes[g]));
    }
    match rng.gen_range(0..3) {
        0 => format!("not ({})", random_condition(rng, regs, maxes, depth - 1)),
        1 => format!(
            "({}) and ({})",
            random_condition(rng, regs, maxes, depth - 1),
            random_condition(rng, regs, maxes, depth - 1)
        ),
        _ => format!(
            "({}) or ({})",
            random_condition(rng, regs, maxes, depth - 1),
            random_condition(rng, regs, maxes, depth - 1)
        ),
    }
}

/// A random formula of depth at most `depth`.
pub fn random_formula(rng: &mut impl Rng, net: &Network, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        if rng.gen_bool(0.15) {
            return Formula::Deadlock;
        }
        let g = rng.gen_range(0..net.gene_count());
        let cmp = *CMPS.choose(rng).unwrap();
        return Formula::atom(g, cmp, rng.gen_range(0..=net.max_level(g)));
    }
    match rng.gen_range(0..9) {
        0 => random_formula(rng, net, depth - 1).not(),
        1 => random_formula(rng, net, depth - 1).and(random_formula(rng, net, depth - 1)),
        2 => random_formula(rng, net, depth - 1).or(random_formula(rng, net, depth - 1)),
        k => Formula::temporal(TEMPORAL[k - 3], random_formula(rng, net, depth - 1)),
    }
}

/// `n` independent binary genes that all rise to 1 from 0.
pub fn monotone_text(n: usize) -> String {
    let mut text = format!("network M{n}\n");
    for i in 1..=n {
        writeln!(text, "gene g{i} levels 0..1").unwrap();
    }
    for i in 1..=n {
        writeln!(text, "rule g{i}: default 1").unwrap();
    }
    text
}

/// Brute-force reference computations that only use `Network::successors`.
pub struct BruteForce<'a> {
    pub net: &'a Network,
}

impl<'a> BruteForce<'a> {
    pub fn new(net: &'a Network) -> Self {
        BruteForce { net }
    }

    pub fn reachable(&self) -> BTreeSet<State> {
        let mut seen = BTreeSet::from([self.net.initial().clone()]);
        let mut queue = VecDeque::from([self.net.initial().clone()]);
        while let Some(s) = queue.pop_front() {
            for (_, t) in self.net.successors(&s) {
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Dead states of the whole space, lexicographically ordered.
    pub fn dead_states(&self) -> Vec<State> {
        self.net
            .all_states()
            .filter(|s| self.net.successors(s).is_empty())
            .collect()
    }

    /// BFS distance from the initial state to every reachable state.
    pub fn distances(&self) -> HashMap<State, usize> {
        let init = self.net.initial().clone();
        let mut dist = HashMap::from([(init.clone(), 0)]);
        let mut queue = VecDeque::from([init]);
        while let Some(s) = queue.pop_front() {
            let d = dist[&s];
            for (_, t) in self.net.successors(&s) {
                if !dist.contains_key(&t) {
                    dist.insert(t.clone(), d + 1);
                    queue.push_back(t);
                }
            }
        }
        dist
    }

    /// Length in steps of a shortest path from the initial state into
    /// `target`, if one exists.
    pub fn distance_to(&self, target: impl Fn(&State) -> bool) -> Option<usize> {
        self.distances()
            .into_iter()
            .filter(|(s, _)| target(s))
            .map(|(_, d)| d)
            .min()
    }

    /// Truth of a non-temporal formula at `s`.
    pub fn holds_locally(&self, f: &Formula, s: &State) -> bool {
        match f {
            Formula::Atom { gene, cmp, value } => cmp.holds(s.get(*gene), *value),
            Formula::Deadlock => self.net.successors(s).is_empty(),
            Formula::Not(g) => !self.holds_locally(g, s),
            Formula::And(a, b) => self.holds_locally(a, s) && self.holds_locally(b, s),
            Formula::Or(a, b) => self.holds_locally(a, s) || self.holds_locally(b, s),
            Formula::Temporal(..) => panic!("temporal operator in a state formula"),
        }
    }
}

/// Checks that `path` starts at the initial state and follows successors.
pub fn path_is_valid(net: &Network, path: &[State]) -> Result<(), String> {
    let first = path.first().ok_or("empty path")?;
    if first != net.initial() {
        return Err(format!("path starts at {} instead of the initial state", net.format_state(first)));
    }
    for w in path.windows(2) {
        if !net.successors(&w[0]).iter().any(|(_, t)| *t == w[1]) {
            return Err(format!(
                "{} is not a successor of {}",
                net.format_state(&w[1]),
                net.format_state(&w[0])
            ));
        }
    }
    Ok(())
}

pub mod suites;
