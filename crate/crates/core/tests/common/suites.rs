//! Randomized property suites shared by the integration tests and the
//! acceptance harness. Each returns the number of cases checked, or a
//! description of the first violation.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use regnet::checker::{explicit_check, explicit_full_graph, Formula, Model, SymbolicChecker, VarOrderKind};
use regnet::dsl::TemporalOp;
use regnet::model::{Network, State};
use regnet::pn::compile;
use regnet::symbolic::{Engine, Limits, StateSet, VarOrder};

use super::*;

fn random_order(rng: &mut impl Rng) -> VarOrderKind {
    if rng.gen_bool(0.5) {
        VarOrderKind::Decl
    } else {
        VarOrderKind::Reverse
    }
}

/// Symbolic and explicit verdicts and counts agree on random models and
/// formulas; reachable counts also agree with a brute-force BFS. Returns the
/// number of formulas checked and how many of them held.
pub fn oracle_equivalence(seed: u64, networks: usize, formulas: usize) -> Result<(usize, usize), String> {
    let mut r = rng(seed);
    let (mut checked, mut held) = (0, 0);
    for _ in 0..networks {
        let text = random_network_text(&mut r, 4, 3);
        let net = load(&text);
        let reach = BruteForce::new(&net).reachable().len();
        let model = Model::new(net.clone());
        let checker = SymbolicChecker::new(&model, random_order(&mut r), Limits::default());
        let sym_count = checker.count_reachable().map_err(|e| e.to_string())?;
        if sym_count != reach.into() {
            return Err(format!("reachable count {sym_count} != {reach}\n{text}"));
        }
        for _ in 0..formulas {
            let f = random_formula(&mut r, &net, 4);
            let s = checker.check(&f).map_err(|e| e.to_string())?;
            let e = explicit_check(&net, &f, 1 << 20).map_err(|e| e.to_string())?;
            if s.holds != e.holds
                || s.reachable_count != e.reachable_count
                || s.satisfying_reachable_count != e.satisfying_reachable_count
            {
                return Err(format!(
                    "discrepancy on `{}`: symbolic ({}, {}, {}) explicit ({}, {}, {})\n{text}",
                    f.to_text(&net),
                    s.holds,
                    s.reachable_count,
                    s.satisfying_reachable_count,
                    e.holds,
                    e.reachable_count,
                    e.satisfying_reachable_count
                ));
            }
            checked += 1;
            held += s.holds as usize;
        }
    }
    Ok((checked, held))
}

/// The compiled net's reachability graph, read through the state map, is the
/// network's asynchronous state graph, and `m(P_g) + m(Q_g) = max(g)` holds at
/// every reachable marking.
pub fn bisimulation(seed: u64, networks: usize) -> Result<usize, String> {
    let mut r = rng(seed);
    let mut markings = 0;
    for _ in 0..networks {
        let text = random_network_text(&mut r, 4, 3);
        let net = load(&text);
        let (pn, map) = compile(&net);

        let mut seen = HashSet::from([pn.initial().clone()]);
        let mut stack = vec![pn.initial().clone()];
        let mut pn_edges = BTreeSet::new();
        while let Some(m) = stack.pop() {
            markings += 1;
            for g in 0..net.gene_count() {
                let (p, q) = (map.level_place(g), map.complement_place(g));
                if m.tokens(p) + m.tokens(q) != net.max_level(g) {
                    return Err(format!("complement invariant broken for gene {g} at {m:?}\n{text}"));
                }
            }
            let from = map.to_state(&m).ok_or_else(|| format!("marking {m:?} has no state"))?;
            for t in pn.enabled(&m) {
                let next = pn.fire(&m, t).map_err(|e| e.to_string())?;
                let to = map
                    .to_state(&next)
                    .ok_or_else(|| format!("marking {next:?} has no state"))?;
                pn_edges.insert((from.clone(), to));
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }

        let mut net_edges = BTreeSet::new();
        for s in BruteForce::new(&net).reachable() {
            for (_, t) in net.successors(&s) {
                net_edges.insert((s.clone(), t));
            }
        }
        if pn_edges != net_edges {
            let extra: Vec<_> = pn_edges.symmetric_difference(&net_edges).take(3).collect();
            return Err(format!("edge sets differ, e.g. {extra:?}\n{text}"));
        }
        if seen.len() != BruteForce::new(&net).reachable().len() {
            return Err(format!("marking count differs from state count\n{text}"));
        }

        // Locally, on every potential state as well.
        for s in net.all_states() {
            let m = map.to_marking(&s);
            let mut via_pn: Vec<State> = pn
                .enabled(&m)
                .into_iter()
                .map(|t| map.to_state(&pn.fire(&m, t).unwrap()).unwrap())
                .collect();
            let mut direct: Vec<State> = net.successors(&s).into_iter().map(|(_, t)| t).collect();
            via_pn.sort();
            via_pn.dedup();
            direct.sort();
            if via_pn.len() != pn.enabled(&m).len() || via_pn != direct {
                return Err(format!("successors of {} differ\n{text}", net.format_state(&s)));
            }
        }
    }
    Ok(markings)
}

fn random_engine(rng: &mut impl Rng) -> (Engine, Vec<u32>) {
    let n = rng.gen_range(1..=4);
    let domains: Vec<u32> = (0..n).map(|_| rng.gen_range(2..=4)).collect();
    let mut levels: Vec<usize> = (0..n).collect();
    levels.shuffle(rng);
    let order = VarOrder::new(domains.clone(), levels).unwrap();
    (Engine::new(order, Limits::default()), domains)
}

fn all_states(domains: &[u32]) -> Vec<State> {
    let mut out = vec![Vec::new()];
    for &d in domains {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..d).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(State::new).collect()
}

fn random_set(engine: &Engine, states: &[State], rng: &mut impl Rng) -> (StateSet, Vec<bool>) {
    let density = rng.gen_range(0.0..1.0);
    let bits: Vec<bool> = states.iter().map(|_| rng.gen_bool(density)).collect();
    let mut set = engine.empty();
    for (s, &b) in states.iter().zip(&bits) {
        if b {
            set = engine.union(&set, &engine.singleton(s).unwrap()).unwrap();
        }
    }
    (set, bits)
}

/// Set-algebra laws on `count` random pairs of sets, with counts and
/// membership checked against bitmaps.
pub fn set_algebra(seed: u64, count: usize) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..count {
        let (e, domains) = random_engine(&mut r);
        let states = all_states(&domains);
        let (a, abits) = random_set(&e, &states, &mut r);
        let (b, bbits) = random_set(&e, &states, &mut r);
        let ca = e.count(&a);
        let cb = e.count(&b);
        let expect = abits.iter().filter(|x| **x).count();
        if ca != expect.into() {
            return Err(format!("case {case}: count {ca} != {expect}"));
        }
        for (s, &bit) in states.iter().zip(&abits) {
            if e.contains(&a, s) != bit {
                return Err(format!("case {case}: membership of {s:?}"));
            }
        }
        let u = e.union(&a, &b).unwrap();
        let i = e.intersect(&a, &b).unwrap();
        if e.count(&u) + e.count(&i) != ca.clone() + cb.clone() {
            return Err(format!("case {case}: inclusion-exclusion"));
        }
        let union_bits = abits.iter().zip(&bbits).filter(|(x, y)| **x || **y).count();
        if e.count(&u) != union_bits.into() {
            return Err(format!("case {case}: union count"));
        }
        let na = e.complement(&a).unwrap();
        if e.complement(&na).unwrap() != a {
            return Err(format!("case {case}: double complement"));
        }
        if e.count(&na) + ca != states.len().into() {
            return Err(format!("case {case}: complement count"));
        }
        let nb = e.complement(&b).unwrap();
        if e.complement(&u).unwrap() != e.intersect(&na, &nb).unwrap() {
            return Err(format!("case {case}: De Morgan"));
        }
        if e.difference(&a, &b).unwrap() != e.intersect(&a, &nb).unwrap() {
            return Err(format!("case {case}: difference"));
        }
        if e.union(&a, &na).unwrap() != e.full() || !e.intersect(&a, &na).unwrap().is_empty() {
            return Err(format!("case {case}: excluded middle"));
        }
    }
    Ok(count)
}

/// Which CTL duality a case exercises.
#[derive(Debug, Clone, Copy)]
pub enum Duality {
    AgEf,
    AfEg,
    AxEx,
}

/// Checks one duality on `count` random (model, formula) pairs, both as an
/// engine-level set equality and against fixpoints computed directly from
/// the engine primitives and against an explicit full-space evaluation.
pub fn duality(seed: u64, count: usize, law: Duality) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..count {
        let text = random_network_text(&mut r, 4, 3);
        let net = load(&text);
        let model = Model::new(net.clone());
        let c = SymbolicChecker::new(&model, random_order(&mut r), Limits::default());
        let e = c.engine();
        let rel = model.relation();
        let f = random_formula(&mut r, &net, 2);
        let not_f = f.clone().not();
        let sat = c.eval(&f).unwrap();
        let dead = c.deadlock().unwrap();
        let (universal, existential_dual, direct) = match law {
            Duality::AgEf => {
                let ag = c.eval(&Formula::temporal(TemporalOp::AG, f.clone())).unwrap();
                let ef = c.eval(&Formula::temporal(TemporalOp::EF, not_f)).unwrap();
                let direct = e
                    .gfp(|x| {
                        let bad = e.pre_image(&e.complement(x)?, rel)?;
                        e.difference(&sat, &bad)
                    })
                    .unwrap();
                (ag, e.complement(&ef).unwrap(), direct)
            }
            Duality::AfEg => {
                let af = c.eval(&Formula::temporal(TemporalOp::AF, f.clone())).unwrap();
                let eg = c.eval(&Formula::temporal(TemporalOp::EG, not_f)).unwrap();
                let direct = e
                    .lfp(|x| {
                        let escape = e.pre_image(&e.complement(x)?, rel)?;
                        let forced = e.difference(&e.complement(&escape)?, &dead)?;
                        e.union(&sat, &forced)
                    })
                    .unwrap();
                (af, e.complement(&eg).unwrap(), direct)
            }
            Duality::AxEx => {
                let ax = c.eval(&Formula::temporal(TemporalOp::AX, f.clone())).unwrap();
                let ex = c.eval(&Formula::temporal(TemporalOp::EX, not_f)).unwrap();
                let direct = e.complement(&e.pre_image(&e.complement(&sat).unwrap(), rel).unwrap()).unwrap();
                (ax, e.complement(&ex).unwrap(), direct)
            }
        };
        if universal != existential_dual {
            return Err(format!("case {case}: {law:?} duality fails for `{}`\n{text}", f.to_text(&net)));
        }
        if universal != direct {
            return Err(format!("case {case}: {law:?} direct fixpoint differs for `{}`\n{text}", f.to_text(&net)));
        }
        let op = match law {
            Duality::AgEf => TemporalOp::AG,
            Duality::AfEg => TemporalOp::AF,
            Duality::AxEx => TemporalOp::AX,
        };
        let graph = explicit_full_graph(&net, 1 << 16).unwrap();
        let truth = graph.eval(&Formula::temporal(op, f.clone()));
        for (i, s) in graph.states.iter().enumerate() {
            if e.contains(&universal, s) != truth[i] {
                return Err(format!(
                    "case {case}: {law:?} differs from the explicit evaluation at {} for `{}`\n{text}",
                    net.format_state(s),
                    f.to_text(&net)
                ));
            }
        }
    }
    Ok(count)
}

/// Validates an evidence path against the brute-force oracle: it starts at
/// the initial state, follows successors, ends in `target` and is as short
/// as possible.
pub fn check_evidence(
    net: &Network,
    path: &[State],
    target: &dyn Fn(&State) -> bool,
) -> Result<(), String> {
    path_is_valid(net, path)?;
    let last = path.last().expect("validated non-empty");
    if !target(last) {
        return Err(format!("path ends at {}, outside the target", net.format_state(last)));
    }
    let best = BruteForce::new(net)
        .distance_to(target)
        .ok_or("oracle finds no path")?;
    if path.len() - 1 != best {
        return Err(format!("path has {} steps, shortest is {best}", path.len() - 1));
    }
    Ok(())
}

/// Every evidence path emitted by either engine for random `EF g` and
/// `AG g` queries is valid and shortest. Returns the number of paths checked.
pub fn witnesses(seed: u64, networks: usize, formulas: usize) -> Result<usize, String> {
    let mut r = rng(seed);
    let mut paths = 0;
    for _ in 0..networks {
        let text = random_network_text(&mut r, 4, 3);
        let net = load(&text);
        let model = Model::new(net.clone());
        let c = SymbolicChecker::new(&model, random_order(&mut r), Limits::default());
        let graph = explicit_full_graph(&net, 1 << 16).unwrap();
        for _ in 0..formulas {
            let g = random_formula(&mut r, &net, 2);
            let g_truth = graph.eval(&g);
            let in_g = |s: &State| g_truth[graph.position(s).unwrap()];
            let not_g = |s: &State| !in_g(s);
            for (op, target) in [
                (TemporalOp::EF, &in_g as &dyn Fn(&State) -> bool),
                (TemporalOp::AG, &not_g as &dyn Fn(&State) -> bool),
            ] {
                let f = Formula::temporal(op, g.clone());
                let sym = c.check(&f).map_err(|e| e.to_string())?;
                let exp = explicit_check(&net, &f, 1 << 20).map_err(|e| e.to_string())?;
                let expects_path = match op {
                    TemporalOp::EF => sym.holds,
                    _ => !sym.holds,
                };
                for (engine, v) in [("symbolic", &sym), ("explicit", &exp)] {
                    match (&v.evidence, expects_path) {
                        (Some(p), true) => {
                            check_evidence(&net, p, target).map_err(|m| {
                                format!("{engine} evidence for `{}`: {m}\n{text}", f.to_text(&net))
                            })?;
                            paths += 1;
                        }
                        (None, false) => {}
                        _ => {
                            return Err(format!(
                                "{engine} evidence presence wrong for `{}`\n{text}",
                                f.to_text(&net)
                            ))
                        }
                    }
                }
            }
        }
    }
    Ok(paths)
}

fn round_trip_one(text: &str) -> Result<(), String> {
    use regnet::dsl::{parse_network, pretty_network, StripSpans};
    let ast = parse_network(text).map_err(|d| format!("{d:?}\n{text}"))?;
    let printed = pretty_network(&ast);
    let again = parse_network(&printed).map_err(|d| format!("reparse: {d:?}\n{printed}"))?;
    if again.strip_spans() != ast.strip_spans() {
        return Err(format!("round trip changed the model\n{text}\n---\n{printed}"));
    }
    Ok(())
}

/// parse, print, parse is the identity on every fixture and on `count`
/// random models. Returns the number of models checked.
pub fn round_trip(seed: u64, count: usize) -> Result<usize, String> {
    let mut n = 0;
    for entry in std::fs::read_dir(fixture_dir()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|e| e == "grn") {
            round_trip_one(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)?;
            n += 1;
        }
    }
    let mut r = rng(seed);
    for _ in 0..count {
        round_trip_one(&random_network_text(&mut r, 4, 3))?;
        n += 1;
    }
    Ok(n)
}

/// Every malformed corpus entry yields at least one error whose code matches
/// the file name prefix, all spans lie inside the text, and `bin validate`
/// exits with 2 for syntax errors and 3 for semantic ones.
pub fn malformed_corpus(bin: &str) -> Result<usize, String> {
    let mut n = 0;
    for entry in std::fs::read_dir(fixture_dir().join("malformed")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let code = name[..4].to_uppercase();
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let diags = match regnet::dsl::load_network(&text) {
            Ok(_) => return Err(format!("{name} loads without errors")),
            Err(d) => d,
        };
        if !diags.iter().any(|d| d.code.as_str() == code && d.is_error()) {
            return Err(format!("{name}: no {code} among {diags:?}"));
        }
        let lines: Vec<&str> = text.split('\n').collect();
        for d in &diags {
            let line = d.span.line as usize;
            let width = lines.get(line.wrapping_sub(1)).map(|l| l.chars().count());
            match width {
                Some(w) if line >= 1 && d.span.column >= 1 && d.span.column as usize <= w + 1 => {}
                _ => return Err(format!("{name}: span {} out of bounds", d.span)),
            }
        }
        let expected = if code == "E001" { 2 } else { 3 };
        let status = std::process::Command::new(bin)
            .arg("validate")
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status
            .code();
        if status != Some(expected) {
            return Err(format!("{name}: exit {status:?}, expected {expected}"));
        }
        n += 1;
    }
    Ok(n)
}
