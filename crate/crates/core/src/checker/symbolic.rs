use std::cell::RefCell;
use std::str::FromStr;

use super::{CheckError, Formula, Model, StableReport, Verdict, STABLE_ENUMERATION_CAP};
use crate::dsl::TemporalOp;
use crate::symbolic::{Engine, EngineError, EngineStats, Limits, StateSet, VarOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarOrderKind {
    #[default]
    Decl,
    Reverse,
}

impl FromStr for VarOrderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decl" => Ok(VarOrderKind::Decl),
            "reverse" => Ok(VarOrderKind::Reverse),
            other => Err(format!("unknown variable order `{other}` (expected decl or reverse)")),
        }
    }
}

/// CTL evaluation on one engine instance.
pub struct SymbolicChecker<'m> {
    model: &'m Model,
    engine: Engine,
    init: RefCell<Option<StateSet>>,
    reachable: RefCell<Option<StateSet>>,
    deadlock: RefCell<Option<StateSet>>,
}

impl<'m> SymbolicChecker<'m> {
    pub fn new(model: &'m Model, order: VarOrderKind, limits: Limits) -> Self {
        let domains = model
            .network()
            .genes()
            .iter()
            .map(|g| g.max_level + 1)
            .collect();
        let order = match order {
            VarOrderKind::Decl => VarOrder::declaration(domains),
            VarOrderKind::Reverse => VarOrder::reverse(domains),
        };
        Self {
            model,
            engine: Engine::new(order, limits),
            init: RefCell::new(None),
            reachable: RefCell::new(None),
            deadlock: RefCell::new(None),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn initial(&self) -> Result<StateSet, EngineError> {
        if let Some(i) = self.init.borrow().as_ref() {
            return Ok(i.clone());
        }
        let i = self.engine.singleton(self.model.network().initial())?;
        *self.init.borrow_mut() = Some(i.clone());
        Ok(i)
    }

    pub fn stats(&self) -> EngineStats {
        self.engine.stats()
    }

    pub fn reachable(&self) -> Result<StateSet, EngineError> {
        if let Some(r) = self.reachable.borrow().as_ref() {
            return Ok(r.clone());
        }
        let r = self.engine.reachable(&self.initial()?, self.model.relation())?;
        *self.reachable.borrow_mut() = Some(r.clone());
        Ok(r)
    }

    pub fn count_reachable(&self) -> Result<num_bigint::BigUint, EngineError> {
        Ok(self.engine.count(&self.reachable()?))
    }

    /// States with no successor in the full potential space.
    pub fn deadlock(&self) -> Result<StateSet, EngineError> {
        if let Some(d) = self.deadlock.borrow().as_ref() {
            return Ok(d.clone());
        }
        let full = self.engine.full();
        let live = self.engine.pre_image(&full, self.model.relation())?;
        let d = self.engine.complement(&live)?;
        *self.deadlock.borrow_mut() = Some(d.clone());
        Ok(d)
    }

    fn pre(&self, x: &StateSet) -> Result<StateSet, EngineError> {
        self.engine.pre_image(x, self.model.relation())
    }

    /// The set of states of the full space satisfying `f`.
    pub fn eval(&self, f: &Formula) -> Result<StateSet, EngineError> {
        let e = &self.engine;
        match f {
            Formula::Atom { gene, cmp, value } => e.from_predicate(*gene, *cmp, *value),
            Formula::Deadlock => self.deadlock(),
            Formula::Not(g) => e.complement(&self.eval(g)?),
            Formula::And(a, b) => e.intersect(&self.eval(a)?, &self.eval(b)?),
            Formula::Or(a, b) => e.union(&self.eval(a)?, &self.eval(b)?),
            Formula::Temporal(op, g) => {
                let sat = self.eval(g)?;
                match op {
                    TemporalOp::EX => self.pre(&sat),
                    TemporalOp::EF => self.ef(&sat),
                    TemporalOp::EG => self.eg(&sat),
                    TemporalOp::AX => {
                        let neg = e.complement(&sat)?;
                        e.complement(&self.pre(&neg)?)
                    }
                    TemporalOp::AF => {
                        let neg = e.complement(&sat)?;
                        e.complement(&self.eg(&neg)?)
                    }
                    TemporalOp::AG => {
                        let neg = e.complement(&sat)?;
                        e.complement(&self.ef(&neg)?)
                    }
                }
            }
        }
    }

    fn ef(&self, sat: &StateSet) -> Result<StateSet, EngineError> {
        self.engine
            .lfp(|x| self.engine.union(sat, &self.pre(x)?))
    }

    fn eg(&self, sat: &StateSet) -> Result<StateSet, EngineError> {
        let dead = self.deadlock()?;
        self.engine.gfp(|x| {
            let step = self.engine.union(&self.pre(x)?, &dead)?;
            self.engine.intersect(sat, &step)
        })
    }

    /// Verdict at the initial state, with evidence for a true `EF g` or a
    /// false `AG g`.
    pub fn check(&self, f: &Formula) -> Result<Verdict, CheckError> {
        let e = &self.engine;
        let sat = self.eval(f)?;
        let init = self.initial()?;
        let holds = !e.intersect(&sat, &init)?.is_empty();
        let reach = self.reachable()?;
        let satisfying = e.count(&e.intersect(&reach, &sat)?);
        let target = match f {
            Formula::Temporal(TemporalOp::EF, g) if holds => Some(self.eval(g)?),
            Formula::Temporal(TemporalOp::AG, g) if !holds => Some(e.complement(&self.eval(g)?)?),
            _ => None,
        };
        let evidence = match target {
            Some(t) => e.bfs_witness(&init, &t, self.model.relation())?,
            None => None,
        };
        Ok(Verdict {
            holds,
            evidence,
            reachable_count: e.count(&reach),
            satisfying_reachable_count: satisfying,
        })
    }

    /// Dead states of the full space, optionally filtered, with an exact
    /// count and up to `cap` states listed.
    pub fn stable_states(&self, filter: Option<&Formula>, cap: usize) -> Result<StableReport, CheckError> {
        let mut set = self.deadlock()?;
        if let Some(f) = filter {
            set = self.engine.intersect(&set, &self.eval(f)?)?;
        }
        Ok(StableReport {
            count: self.engine.count(&set),
            states: self.engine.enumerate(&set, cap),
        })
    }

    pub fn stable(&self, filter: Option<&Formula>) -> Result<StableReport, CheckError> {
        self.stable_states(filter, STABLE_ENUMERATION_CAP)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ops::Not;
    use crate::dsl::load_network;
    use crate::model::{Cmp, State};

    const TOGGLE: &str = "network Toggle\ngene a levels 0..1\ngene b levels 0..1\n\
        a -| b threshold 1\nb -| a threshold 1\n\
        rule a: when b >= 1 -> 0 default 1\nrule b: when a >= 1 -> 0 default 1\ninit a = 0, b = 0\n";

    const REPRESSILATOR: &str = "network Repressilator\n\
        gene a levels 0..1\ngene b levels 0..1\ngene c levels 0..1\n\
        a -| b threshold 1\nb -| c threshold 1\nc -| a threshold 1\n\
        rule a: when c >= 1 -> 0 default 1\nrule b: when a >= 1 -> 0 default 1\n\
        rule c: when b >= 1 -> 0 default 1\n";

    fn st(v: &[u32]) -> State {
        State::new(v.to_vec())
    }

    fn model(text: &str) -> Model {
        Model::new(load_network(text).unwrap().0)
    }

    #[test]
    fn toggle_verdicts() {
        let m = model(TOGGLE);
        for order in [VarOrderKind::Decl, VarOrderKind::Reverse] {
            let c = SymbolicChecker::new(&m, order, Limits::default());
            let dead = c.deadlock().unwrap();
            assert_eq!(c.engine().enumerate(&dead, 10), vec![st(&[0, 1]), st(&[1, 0])]);

            let target = Formula::atom(0, Cmp::Eq, 1).and(Formula::atom(1, Cmp::Eq, 0));
            let v = c.check(&Formula::temporal(TemporalOp::EF, target)).unwrap();
            assert!(v.holds);
            assert_eq!(v.evidence, Some(vec![st(&[0, 0]), st(&[1, 0])]));
            assert_eq!(v.reachable_count, 3u32.into());
            assert_eq!(v.satisfying_reachable_count, 2u32.into());

            let v = c
                .check(&Formula::temporal(TemporalOp::AG, Formula::Deadlock.not()))
                .unwrap();
            assert!(!v.holds);
            assert_eq!(v.evidence, Some(vec![st(&[0, 0]), st(&[0, 1])]));

            let r = c.stable(Some(&Formula::atom(0, Cmp::Eq, 1))).unwrap();
            assert_eq!(r.count, 1u32.into());
            assert_eq!(r.states, vec![st(&[1, 0])]);
        }
    }

    #[test]
    fn toggle_ef_set_from_single_state() {
        let m = model(TOGGLE);
        let c = SymbolicChecker::new(&m, VarOrderKind::Decl, Limits::default());
        let target = c.engine().singleton(&st(&[1, 0])).unwrap();
        let ef = c.ef(&target).unwrap();
        assert_eq!(
            c.engine().enumerate(&ef, 10),
            vec![st(&[0, 0]), st(&[1, 0]), st(&[1, 1])]
        );
    }

    #[test]
    fn repressilator_has_no_stable_state() {
        let m = model(REPRESSILATOR);
        let c = SymbolicChecker::new(&m, VarOrderKind::Decl, Limits::default());
        assert_eq!(c.stable(None).unwrap().count, 0u32.into());
        let v = c
            .check(&Formula::temporal(TemporalOp::AG, Formula::Deadlock.not()))
            .unwrap();
        assert!(v.holds);
        assert!(v.evidence.is_none());
    }

    #[test]
    fn order_names() {
        assert_eq!("reverse".parse::<VarOrderKind>(), Ok(VarOrderKind::Reverse));
        assert!("random".parse::<VarOrderKind>().is_err());
    }
}
