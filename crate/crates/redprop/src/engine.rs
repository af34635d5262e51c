//! The propagation fixpoint solver and depth-first search.
//!
//! [`fixpoint`] computes the greatest common fixpoint of a set of
//! propagators below a domain. Scheduling is a FIFO queue keyed by
//! variable-change subscriptions; since all propagators are monotone
//! decreasing the result is order independent, and FIFO keeps it
//! deterministic. Propagators are assumed idempotent (true for every
//! dsb-strength propagator and for propagation rules), so a propagator
//! is not re-queued for its own changes.
//!
//! [`search`] runs complete binary-branching DFS: `v=d` against `v≠d`
//! for integer variables (values ascending), `e∈S` against `e∉S` for
//! set variables (smallest undecided element first). A *fail* is a
//! search node whose propagation fixpoint is a false domain.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::domain::{Atom, Domain, Value, VarId, VarKind};
use crate::error::{Error, Result};
use crate::propagate::Propagator;

/// A set of propagators with a variable→watchers index.
#[derive(Clone, Debug, Default)]
pub struct PropagatorSet {
    props: Vec<Propagator>,
    watchers: Vec<Vec<usize>>,
}

impl PropagatorSet {
    pub fn new(nvars: usize) -> PropagatorSet {
        PropagatorSet { props: Vec::new(), watchers: vec![Vec::new(); nvars] }
    }

    pub fn from_props(nvars: usize, props: impl IntoIterator<Item = Propagator>) -> PropagatorSet {
        let mut ps = PropagatorSet::new(nvars);
        for p in props {
            ps.push(p);
        }
        ps
    }

    pub fn push(&mut self, p: Propagator) {
        let id = self.props.len();
        for v in p.scope() {
            let w = &mut self.watchers[v.index as usize];
            if !w.contains(&id) {
                w.push(id);
            }
        }
        self.props.push(p);
    }

    pub fn props(&self) -> &[Propagator] {
        &self.props
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    /// Union of two sets over the same variable universe.
    pub fn union(&self, other: &PropagatorSet) -> PropagatorSet {
        let mut ps = PropagatorSet::new(self.watchers.len().max(other.watchers.len()));
        for p in self.props.iter().chain(&other.props) {
            ps.push(p.clone());
        }
        ps
    }
}

/// Greatest fixpoint of all propagators below `d`. A false domain is a
/// valid (absorbing) fixpoint and is returned as soon as it appears.
pub fn fixpoint(ps: &PropagatorSet, d: &Domain) -> Domain {
    let mut cur = d.clone();
    if cur.is_false() || ps.is_empty() {
        return cur;
    }
    let mut queue: VecDeque<usize> = (0..ps.props.len()).collect();
    let mut queued = vec![true; ps.props.len()];
    while let Some(i) = queue.pop_front() {
        queued[i] = false;
        let next = ps.props[i].apply(&cur);
        if next.is_false() {
            return next;
        }
        for &v in ps.props[i].scope() {
            if !next.same_slot(&cur, v) {
                for &j in &ps.watchers[v.index as usize] {
                    if j != i && !queued[j] {
                        queued[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarOrder {
    FirstFail,
    InputOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    All,
    /// Minimize the integer objective by branch & bound.
    Minimize(VarId),
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub search_vars: Vec<VarId>,
    pub var_order: VarOrder,
    pub mode: Mode,
    /// Keep the ordered solution sequence in the stats (off for large runs).
    pub record_solutions: bool,
}

impl SearchConfig {
    pub fn new(search_vars: Vec<VarId>, var_order: VarOrder, mode: Mode) -> SearchConfig {
        SearchConfig { search_vars, var_order, mode, record_solutions: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub fails: u64,
    pub nodes: u64,
    pub solutions: u64,
    pub best_objective: Option<i32>,
    /// Ordered full assignments, one per solution found (when recorded).
    pub solution_seq: Vec<Vec<(VarId, Value)>>,
    pub elapsed: Duration,
}

impl SearchStats {
    /// Everything except wall-clock time, for determinism comparisons.
    pub fn shape(&self) -> (u64, u64, u64, Option<i32>, &[Vec<(VarId, Value)>]) {
        (self.fails, self.nodes, self.solutions, self.best_objective, &self.solution_seq)
    }
}

struct SearchCtx<'a> {
    ps: &'a PropagatorSet,
    config: &'a SearchConfig,
    all_vars: Vec<VarId>,
    stats: SearchStats,
    bound: Option<i32>,
}

impl<'a> SearchCtx<'a> {
    fn pick(&self, d: &Domain, vars: &[VarId]) -> Option<VarId> {
        let unfixed = vars.iter().copied().filter(|&v| d.slot(v).count() > 1);
        match self.config.var_order {
            VarOrder::InputOrder => unfixed.into_iter().next(),
            VarOrder::FirstFail => {
                let mut best: Option<(u128, VarId)> = None;
                for v in unfixed {
                    let c = d.slot(v).count();
                    let better = match best {
                        None => true,
                        Some((bc, bv)) => c < bc || (c == bc && v.index < bv.index),
                    };
                    if better {
                        best = Some((c, v));
                    }
                }
                best.map(|(_, v)| v)
            }
        }
    }

    /// Explore one node; returns false to stop the whole search.
    fn node(&mut self, d: &Domain) -> bool {
        self.stats.nodes += 1;
        let mut d = d.clone();
        if let Mode::Minimize(u) = self.config.mode {
            if let Some(b) = self.bound {
                d.apply_mut(&Atom::IntLeq(u, b - 1));
            }
        }
        let d = fixpoint(self.ps, &d);
        if d.is_false() {
            self.stats.fails += 1;
            return true;
        }
        let v = self
            .pick(&d, &self.config.search_vars)
            .or_else(|| self.pick(&d, &self.all_vars));
        let Some(v) = v else {
            // every variable fixed: a solution
            self.stats.solutions += 1;
            if self.config.record_solutions {
                let assign: Vec<(VarId, Value)> = d
                    .vars()
                    .map(|v| {
                        let val = match v.kind {
                            VarKind::Int => Value::Int(d.int(v).fixed_value().unwrap()),
                            VarKind::Set => Value::Set(d.set(v).lb.clone()),
                        };
                        (v, val)
                    })
                    .collect();
                self.stats.solution_seq.push(assign);
            }
            match self.config.mode {
                Mode::First => return false,
                Mode::All => {}
                Mode::Minimize(u) => {
                    let b = d.int(u).fixed_value().expect("objective fixed in solution");
                    self.bound = Some(b);
                    self.stats.best_objective =
                        Some(self.stats.best_objective.map_or(b, |cur| cur.min(b)));
                }
            }
            return true;
        };
        let (left, right) = match v.kind {
            VarKind::Int => {
                let dmin = d.int(v).min().unwrap();
                (Atom::IntEq(v, dmin), Atom::IntNeq(v, dmin))
            }
            VarKind::Set => {
                let delta = d.set(v).delta();
                let e = delta.iter().next().unwrap();
                (Atom::InSet(e, v), Atom::NotInSet(e, v))
            }
        };
        if !self.node(&d.apply(&left)) {
            return false;
        }
        self.node(&d.apply(&right))
    }
}

/// Complete DFS from `init`; deterministic for identical inputs.
pub fn search(ps: &PropagatorSet, init: &Domain, config: &SearchConfig) -> Result<SearchStats> {
    if config.search_vars.is_empty() {
        return Err(Error::NoSearchVars);
    }
    if let Mode::Minimize(u) = config.mode {
        if u.kind != VarKind::Int {
            return Err(Error::InvalidParams("objective must be an integer variable".into()));
        }
    }
    let start = Instant::now();
    let mut ctx = SearchCtx {
        ps,
        config,
        all_vars: init.vars().collect(),
        stats: SearchStats::default(),
        bound: None,
    };
    ctx.node(init);
    let mut stats = ctx.stats;
    stats.elapsed = start.elapsed();
    Ok(stats)
}

/// Branch & bound minimization; requires `Mode::Minimize`. Each solution
/// with objective `b` posts `u ≤ b−1` on the remaining tree, so the final
/// incumbent is the optimum and optimality is proved by exhaustion.
pub fn branch_and_bound(
    ps: &PropagatorSet,
    init: &Domain,
    config: &SearchConfig,
) -> Result<SearchStats> {
    if !matches!(config.mode, Mode::Minimize(_)) {
        return Err(Error::InvalidParams("branch_and_bound requires an objective".into()));
    }
    search(ps, init, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Constraint;
    use crate::domain::{IntSet, VarDomain};
    use crate::propagate::make_propagator;

    fn iv(i: u32) -> VarId {
        VarId::int(i)
    }

    fn bool_universe(n: usize) -> Domain {
        Domain::new(vec![VarDomain::Int(IntSet::range(0, 1)); n])
    }

    fn impl_prop(init: &Domain, a: Atom, b: Atom) -> Propagator {
        make_propagator(
            &Constraint::Impl(Box::new(Constraint::AtomC(a)), Box::new(Constraint::AtomC(b))),
            init,
            1 << 20,
        )
        .unwrap()
    }

    #[test]
    fn empty_set_is_identity() {
        let d = bool_universe(2);
        let ps = PropagatorSet::new(2);
        assert_eq!(fixpoint(&ps, &d), d);
    }

    #[test]
    fn chained_implications_reach_fixpoint() {
        // z0=1 → z1=0, z1=0 → z2=0
        let init = bool_universe(3);
        let ps = PropagatorSet::from_props(
            3,
            vec![
                impl_prop(&init, Atom::IntEq(iv(0), 1), Atom::IntEq(iv(1), 0)),
                impl_prop(&init, Atom::IntEq(iv(1), 0), Atom::IntEq(iv(2), 0)),
            ],
        );
        let d = init.apply(&Atom::IntEq(iv(0), 1));
        let out = fixpoint(&ps, &d);
        assert_eq!(out.int(iv(1)), &IntSet::singleton(0));
        assert_eq!(out.int(iv(2)), &IntSet::singleton(0));
        assert_eq!(fixpoint(&ps, &out), out);
    }

    #[test]
    fn fixpoint_is_order_independent() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 3)); 3]);
        let props = vec![
            make_propagator(&Constraint::Diseq { x: iv(0), y: iv(1), offset: 0 }, &init, 1 << 20)
                .unwrap(),
            make_propagator(
                &Constraint::LinearEq { terms: vec![(1, iv(1)), (-1, iv(2))], rhs: 1 },
                &init,
                1 << 20,
            )
            .unwrap(),
            make_propagator(&Constraint::AllDifferent(vec![iv(0), iv(1), iv(2)]), &init, 1 << 20)
                .unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let vars: Vec<VarId> = init.vars().collect();
        for _ in 0..50 {
            let d = crate::lattice::random_subdomain(&init, &vars, &mut rng);
            let mut shuffled = props.clone();
            shuffled.shuffle(&mut rng);
            let a = fixpoint(&PropagatorSet::from_props(3, props.clone()), &d);
            let b = fixpoint(&PropagatorSet::from_props(3, shuffled), &d);
            assert!(a.equal_semantic(&b));
        }
    }

    #[test]
    fn union_is_stronger() {
        use rand::SeedableRng;
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 3)); 3]);
        let f1 = PropagatorSet::from_props(
            3,
            vec![make_propagator(
                &Constraint::Diseq { x: iv(0), y: iv(1), offset: 0 },
                &init,
                1 << 20,
            )
            .unwrap()],
        );
        let f2 = PropagatorSet::from_props(
            3,
            vec![make_propagator(
                &Constraint::LinearEq { terms: vec![(1, iv(1)), (-1, iv(2))], rhs: 0 },
                &init,
                1 << 20,
            )
            .unwrap()],
        );
        let both = f1.union(&f2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let vars: Vec<VarId> = init.vars().collect();
        for _ in 0..100 {
            let d = crate::lattice::random_subdomain(&init, &vars, &mut rng);
            assert!(fixpoint(&both, &d).stronger_semantic(&fixpoint(&f1, &d)));
        }
    }

    #[test]
    fn search_counts_solutions_and_fails() {
        // x ≠ y over {1,2}²: 2 solutions
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 2)); 2]);
        let ps = PropagatorSet::from_props(
            2,
            vec![make_propagator(&Constraint::Diseq { x: iv(0), y: iv(1), offset: 0 }, &init, 100)
                .unwrap()],
        );
        let cfg = SearchConfig::new(vec![iv(0), iv(1)], VarOrder::FirstFail, Mode::All);
        let stats = search(&ps, &init, &cfg).unwrap();
        assert_eq!(stats.solutions, 2);
        assert!(stats.fails <= stats.nodes);
        // deterministic
        let again = search(&ps, &init, &cfg).unwrap();
        assert_eq!(stats.shape(), again.shape());
    }

    #[test]
    fn minimize_finds_optimum_and_proves_it() {
        // minimize u with u ∈ {3,4,5}, constraint u ≥ 4
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(3, 5))]);
        let ps = PropagatorSet::from_props(
            1,
            vec![make_propagator(&Constraint::AtomC(Atom::IntGeq(iv(0), 4)), &init, 100).unwrap()],
        );
        let cfg = SearchConfig::new(vec![iv(0)], VarOrder::FirstFail, Mode::Minimize(iv(0)));
        let stats = branch_and_bound(&ps, &init, &cfg).unwrap();
        assert_eq!(stats.best_objective, Some(4));
        // infeasible: no best
        let ps2 = PropagatorSet::from_props(
            1,
            vec![make_propagator(&Constraint::AtomC(Atom::IntGeq(iv(0), 9)), &init, 100).unwrap()],
        );
        let stats2 = branch_and_bound(&ps2, &init, &cfg).unwrap();
        assert_eq!(stats2.solutions, 0);
        assert_eq!(stats2.best_objective, None);
    }

    #[test]
    fn no_search_vars_is_an_error() {
        let init = bool_universe(1);
        let ps = PropagatorSet::new(1);
        let cfg = SearchConfig::new(vec![], VarOrder::FirstFail, Mode::All);
        assert!(matches!(search(&ps, &init, &cfg), Err(Error::NoSearchVars)));
    }
}
