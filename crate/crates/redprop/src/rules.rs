//! Propagation rules `C ↦ c`: a conjunction of atomic constraints firing
//! a single atomic constraint. Rules are both a propagator form and the
//! unit of redundancy reasoning.
//!
//! [`extract_rules`] computes a minimal rule representation of `dsb(c)`:
//! it enumerates, per candidate right-hand atom, the subset-minimal
//! left-hand conjunctions that exclude every solution violating the atom
//! (a minimal-hitting-set enumeration over the constraint's solutions),
//! then greedily drops rules whose firing is already reproduced by the
//! rest of the set. The drop test is exact: a rule `C ↦ c` adds nothing
//! iff the remaining rules' fixpoint from `apply(C, D_init)` entails `c`,
//! because any domain entailing `C` is below that one and fixpoints are
//! monotone.

use std::fmt;

use crate::constraint::Constraint;
use crate::domain::{Atom, Domain, IntSet, Valuation, VarId, VarKind};
use crate::error::{Error, Result};
use crate::propagate::{Propagate, Propagator};

/// A propagation rule. The left-hand side is kept sorted; the invariant
/// `⊭ (D_init ∧ lhs) → rhs` is the extractor's responsibility.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropRule {
    pub lhs: Vec<Atom>,
    pub rhs: Atom,
}

impl PropRule {
    pub fn new(mut lhs: Vec<Atom>, rhs: Atom) -> PropRule {
        lhs.sort();
        lhs.dedup();
        PropRule { lhs, rhs }
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.lhs.iter().map(|a| a.var()).collect();
        vs.push(self.rhs.var());
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn display_with(&self, name: &dyn Fn(VarId) -> String) -> String {
        let lhs = if self.lhs.is_empty() {
            "true".to_string()
        } else {
            self.lhs
                .iter()
                .map(|a| a.display_with(name))
                .collect::<Vec<_>>()
                .join(" & ")
        };
        format!("{} -> {}", lhs, self.rhs.display_with(name))
    }
}

impl fmt::Display for PropRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: VarId| match v.kind {
            VarKind::Int => format!("v{}", v.index),
            VarKind::Set => format!("S{}", v.index),
        };
        write!(f, "{}", self.display_with(&name))
    }
}

/// Apply the rule as a propagator: when every left-hand atom is entailed,
/// enforce the right-hand atom; otherwise leave the domain unchanged.
pub fn rule_propagate(r: &PropRule, d: &Domain) -> Domain {
    if d.entails_all(&r.lhs) {
        d.apply(&r.rhs)
    } else {
        d.clone()
    }
}

struct RuleProp {
    rule: PropRule,
    scope: Vec<VarId>,
}
impl Propagate for RuleProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        rule_propagate(&self.rule, d)
    }
}

/// Wrap a rule as an engine propagator.
pub fn rule_propagator(r: &PropRule) -> Propagator {
    Propagator::new(None, std::sync::Arc::new(RuleProp { rule: r.clone(), scope: r.vars() }))
}

/// Fixpoint of a plain rule list (cheap dedicated loop used by the
/// extractor and the analyzer).
pub fn solv_rules(rules: &[PropRule], d: &Domain) -> Domain {
    let mut cur = d.clone();
    if cur.is_false() {
        return cur;
    }
    loop {
        let mut changed = false;
        for r in rules {
            if cur.entails_all(&r.lhs) && cur.apply_mut(&r.rhs) {
                changed = true;
                if cur.is_false() {
                    return cur;
                }
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// Does `dsb(c)` implement the rule, i.e. `⊨ (D_init ∧ c) → (lhs → rhs)`?
/// Decided by enumerating the solutions of `c` inside the domain induced
/// by the left-hand side.
pub fn implements(c: &Constraint, r: &PropRule, init: &Domain, cap: u128) -> Result<bool> {
    let induced = init.apply_all(&r.lhs);
    if induced.is_false() {
        return Ok(true);
    }
    crate::constraint::all_solutions_satisfy(c, &induced, &[r.rhs.var()], cap, |theta| {
        theta.satisfies_atom(&r.rhs)
    })
}

/// `r1` directly subsumes `r2`: the second rule's guard implies the
/// first's, and the first's conclusion implies the second's (both
/// relative to the initial domain).
pub fn directly_subsumes(r1: &PropRule, r2: &PropRule, init: &Domain) -> bool {
    let d2 = init.apply_all(&r2.lhs);
    let lhs_ok = d2.is_false() || r1.lhs.iter().all(|a| d2.entails(a));
    let d1 = init.apply(&r1.rhs);
    let rhs_ok = d1.is_false() || d1.entails(&r2.rhs);
    lhs_ok && rhs_ok
}

/// A rule list tagged with its provenance. When `minimal` is set the set
/// is solver-equivalent to `{dsb(source)}` on every subdomain of the
/// initial domain and dropping any single rule breaks that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<PropRule>,
    pub source: Option<Constraint>,
    pub minimal: bool,
}

impl RuleSet {
    pub fn empty() -> RuleSet {
        RuleSet { rules: Vec::new(), source: None, minimal: true }
    }

    pub fn solv(&self, d: &Domain) -> Domain {
        solv_rules(&self.rules, d)
    }

    pub fn to_propagators(&self) -> Vec<Propagator> {
        self.rules.iter().map(rule_propagator).collect()
    }

    /// One rule per line: `x1=2 & x3!=1 -> y2=5`.
    pub fn to_text(&self, name: &dyn Fn(VarId) -> String) -> String {
        let mut s = String::new();
        for r in &self.rules {
            s.push_str(&r.display_with(name));
            s.push('\n');
        }
        s
    }
}

/// Budgets for rule extraction.
#[derive(Debug, Clone)]
pub struct ExtractBudget {
    /// Cap on solution enumeration of the source constraint.
    pub enum_cap: u128,
    /// Cap on the atom universe (bitmask-backed search).
    pub max_atoms: usize,
    /// Cap on hitting-set search nodes.
    pub search_nodes: u64,
}

impl Default for ExtractBudget {
    fn default() -> ExtractBudget {
        ExtractBudget { enum_cap: 1 << 21, max_atoms: 256, search_nodes: 5_000_000 }
    }
}

const MASK_WORDS: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq, Default)]
struct AtomMask([u64; MASK_WORDS]);

impl AtomMask {
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn and(&self, o: &AtomMask) -> AtomMask {
        let mut r = *self;
        for k in 0..MASK_WORDS {
            r.0[k] &= o.0[k];
        }
        r
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn iter_bits(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }
}

/// The atom universe of a scope under an initial domain: all non-trivial,
/// individually satisfiable atoms. Boolean variables (initial domain
/// {0,1}) contribute only equality atoms, since `z≠b` is `z=1−b`.
pub fn atom_universe(scope: &[VarId], init: &Domain) -> Vec<Atom> {
    let mut atoms = Vec::new();
    for &v in scope {
        match v.kind {
            VarKind::Int => {
                let dom = init.int(v);
                let boolean = dom.as_slice() == [0, 1];
                if dom.len() > 1 {
                    for d in dom.iter() {
                        atoms.push(Atom::IntEq(v, d));
                        if !boolean {
                            atoms.push(Atom::IntNeq(v, d));
                        }
                    }
                }
            }
            VarKind::Set => {
                let b = init.set(v);
                for d in b.delta().iter() {
                    atoms.push(Atom::InSet(d, v));
                    atoms.push(Atom::NotInSet(d, v));
                }
            }
        }
    }
    atoms.sort();
    atoms
}

struct Mmcs<'a> {
    bad: &'a [AtomMask],
    atoms: &'a [Atom],
    rhs: Atom,
    budget: u64,
    out: Vec<Vec<usize>>,
}

impl<'a> Mmcs<'a> {
    /// Enumerate subset-minimal hitting sets of `bad` over the atoms in
    /// `cand`, pruning branches whose induced domain is false or already
    /// entails the rule head. A branch whose last disequality collapsed an
    /// integer domain to a singleton is also cut: the guard is equivalent
    /// to the equality atom, and the equality-form rule (generated in a
    /// sibling branch) covers it.
    fn run(
        &mut self,
        cand: AtomMask,
        uncov: &[u32],
        sel: &mut Vec<usize>,
        crit: &mut Vec<Vec<u32>>,
        induced: &Domain,
        last: Option<Atom>,
    ) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::CapExceeded { needed: 1, cap: 0 });
        }
        self.budget -= 1;
        if induced.is_false() || induced.entails(&self.rhs) {
            return Ok(());
        }
        if let Some(Atom::IntNeq(v, _)) = last {
            if induced.int(v).len() == 1 {
                return Ok(());
            }
        }
        if uncov.is_empty() {
            self.out.push(sel.clone());
            return Ok(());
        }
        // branch on the uncovered row with the fewest candidates
        let pick = uncov
            .iter()
            .copied()
            .min_by_key(|&t| self.bad[t as usize].and(&cand).count())
            .unwrap();
        let opts: Vec<usize> = self.bad[pick as usize].and(&cand).iter_bits().collect();
        let mut cand = cand;
        for a in opts {
            // maintain criticality: every chosen atom must keep a row
            // only it hits, otherwise the branch only yields supersets
            let newly: Vec<u32> = uncov
                .iter()
                .copied()
                .filter(|&t| self.bad[t as usize].get(a))
                .collect();
            let mut removed: Vec<(usize, Vec<u32>)> = Vec::new();
            let mut ok = true;
            for (k, ck) in crit.iter_mut().enumerate() {
                let (keep, gone): (Vec<u32>, Vec<u32>) =
                    ck.iter().partition(|&&t| !self.bad[t as usize].get(a));
                let empty = keep.is_empty();
                removed.push((k, gone));
                *ck = keep;
                if empty {
                    ok = false;
                    break;
                }
            }
            if ok {
                let rest: Vec<u32> = uncov
                    .iter()
                    .copied()
                    .filter(|&t| !self.bad[t as usize].get(a))
                    .collect();
                sel.push(a);
                crit.push(newly);
                self.run(
                    cand,
                    &rest,
                    sel,
                    crit,
                    &induced.apply(&self.atoms[a]),
                    Some(self.atoms[a]),
                )?;
                crit.pop();
                sel.pop();
            }
            // restore criticality sets
            for (k, gone) in removed {
                crit[k].extend(gone);
            }
            cand.clear(a);
        }
        Ok(())
    }
}

/// Canonicalize Boolean disequalities to equalities (`z≠b` is `z=1−b`).
fn canon_atom(a: Atom, init: &Domain) -> Atom {
    if let Atom::IntNeq(v, b) = a {
        if init.int(v).as_slice() == [0, 1] && (b == 0 || b == 1) {
            return Atom::IntEq(v, 1 - b);
        }
    }
    a
}

/// Rules of a unary integer constraint: one guardless rule per value the
/// constraint excludes outright.
fn one_int_var_rules(
    c: &Constraint,
    init: &Domain,
    v: VarId,
    budget: &ExtractBudget,
) -> Result<Vec<PropRule>> {
    let sols = crate::constraint::solutions(c, init, budget.enum_cap)?;
    let supported: Vec<i32> = sols.iter().map(|t| t.int(v)).collect();
    Ok(init
        .int(v)
        .iter()
        .filter(|d| !supported.contains(d))
        .map(|d| PropRule::new(vec![], canon_atom(Atom::IntNeq(v, d), init)))
        .collect())
}

/// Complete minimal rules with conclusions on `q` and guards on `p`, for
/// a two-integer-variable constraint. For each conclusion the guards are
/// read off the support sets of the solution relation: a disequality
/// `q≠w` fires once no support of `w` is left in `p`'s domain, and an
/// assignment `q=w` fires once no other value of `q` has support. A guard
/// of disequalities that collapses `p` to one value is emitted in its
/// equality form.
fn two_int_var_rules(
    c: &Constraint,
    init: &Domain,
    p: VarId,
    q: VarId,
    budget: &ExtractBudget,
) -> Result<Vec<PropRule>> {
    let sols = crate::constraint::solutions(c, init, budget.enum_cap)?;
    let p0 = init.int(p).clone();
    let q0 = init.int(q).clone();
    let support = |w: i32| -> IntSet { sols.iter().filter(|t| t.int(q) == w).map(|t| t.int(p)).collect() };
    let guard = |s: &IntSet| -> Option<Vec<Atom>> {
        // guards confining p to the complement of the support set s
        let comp = p0.minus(s);
        if comp.is_empty() {
            None // only a false guard could do it: no valid rule
        } else if comp.len() == 1 {
            Some(vec![canon_atom(Atom::IntEq(p, comp.iter().next().unwrap()), init)])
        } else {
            Some(s.iter().map(|u| canon_atom(Atom::IntNeq(p, u), init)).collect())
        }
    };
    let mut out = Vec::new();
    for w in q0.iter() {
        let s_w = support(w);
        if s_w.is_empty() {
            out.push(PropRule::new(vec![], canon_atom(Atom::IntNeq(q, w), init)));
            continue;
        }
        if s_w != p0 {
            if let Some(lhs) = guard(&s_w) {
                out.push(PropRule::new(lhs, canon_atom(Atom::IntNeq(q, w), init)));
            }
        }
        // assignment conclusion: every other q value loses support
        if q0.len() >= 2 {
            let mut s_others = IntSet::empty();
            for w2 in q0.iter() {
                if w2 != w {
                    s_others = s_others.union(&support(w2));
                }
            }
            if let Some(lhs) = guard(&s_others) {
                out.push(PropRule::new(lhs, canon_atom(Atom::IntEq(q, w), init)));
            }
        }
    }
    Ok(out)
}


fn mmcs_rules(c: &Constraint, init: &Domain, budget: &ExtractBudget) -> Result<Vec<PropRule>> {
    let scope = c.scope();
    let atoms = atom_universe(&scope, init);
    if atoms.len() > budget.max_atoms.min(MASK_WORDS * 64) {
        return Err(Error::CapExceeded {
            needed: atoms.len() as u128,
            cap: budget.max_atoms.min(MASK_WORDS * 64) as u128,
        });
    }
    let sols = crate::constraint::solutions(c, init, budget.enum_cap)?;

    // falsified-atom mask per solution
    let masks: Vec<AtomMask> = sols
        .iter()
        .map(|theta| {
            let mut m = AtomMask::default();
            for (i, a) in atoms.iter().enumerate() {
                if !theta.satisfies_atom(a) {
                    m.set(i);
                }
            }
            m
        })
        .collect();

    let mut rules: Vec<PropRule> = Vec::new();
    let mut nodes_left = budget.search_nodes;
    for (ri, &rhs) in atoms.iter().enumerate() {
        // rows violating the head
        let bad: Vec<AtomMask> = sols
            .iter()
            .zip(&masks)
            .filter(|(theta, _)| !theta.satisfies_atom(&rhs))
            .map(|(_, m)| *m)
            .collect();
        let mut cand = AtomMask::default();
        for i in 0..atoms.len() {
            if i != ri {
                cand.set(i);
            }
        }
        let mut mmcs = Mmcs { bad: &bad, atoms: &atoms, rhs, budget: nodes_left, out: Vec::new() };
        let uncov: Vec<u32> = (0..bad.len() as u32).collect();
        let mut sel = Vec::new();
        let mut crit = Vec::new();
        mmcs.run(cand, &uncov, &mut sel, &mut crit, init, None)?;
        nodes_left = mmcs.budget;
        for s in mmcs.out {
            rules.push(PropRule::new(s.into_iter().map(|i| atoms[i]).collect(), rhs));
        }
    }
    Ok(rules)
}

/// Extract a minimal propagation-rule representation of `dsb(c)` relative
/// to `init`.
pub fn extract_rules(c: &Constraint, init: &Domain, budget: &ExtractBudget) -> Result<RuleSet> {
    let scope = c.scope();
    // dedicated complete generators for the easy shapes, the hitting-set
    // search for everything else
    let mut rules = match scope[..] {
        [] => Vec::new(),
        [v] if v.kind == VarKind::Int => one_int_var_rules(c, init, v, budget)?,
        [v, w] if v.kind == VarKind::Int && w.kind == VarKind::Int => {
            let mut rs = two_int_var_rules(c, init, v, w, budget)?;
            rs.extend(two_int_var_rules(c, init, w, v, budget)?);
            rs
        }
        _ => mmcs_rules(c, init, budget)?,
    };
    rules.sort();
    rules.dedup();

    // safety net: drop any non-subset-minimal survivors per head
    let mut keep = vec![true; rules.len()];
    for i in 0..rules.len() {
        for j in 0..rules.len() {
            if i != j
                && keep[i]
                && keep[j]
                && rules[i].rhs == rules[j].rhs
                && rules[j].lhs.iter().all(|a| rules[i].lhs.contains(a))
                && rules[j].lhs.len() < rules[i].lhs.len()
            {
                keep[i] = false;
            }
        }
    }
    let mut rules: Vec<PropRule> = rules
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r)
        .collect();

    // Greedy set-minimization. Drop candidates are attempted biggest
    // guard first (specific rules die in favor of general ones). Among
    // equal sizes, equality conclusions that pin down a single remaining
    // value alias a disequality rule and are tried first (the canonical
    // form is the disequality); wide assignments like `y=a ↦ y'=b` are
    // kept in preference to their fan of disequality conclusions and are
    // tried last.
    let drop_rank = |r: &PropRule| {
        let band = match r.rhs {
            Atom::IntEq(v, _) => {
                let width = init.apply_all(&r.lhs).int(v).len().saturating_sub(1);
                if width <= 1 {
                    0
                } else {
                    2
                }
            }
            _ => 1,
        };
        let neq_guards =
            r.lhs.iter().filter(|a| matches!(a, Atom::IntNeq(..) | Atom::NotInSet(..))).count();
        (std::cmp::Reverse(r.lhs.len()), band, std::cmp::Reverse(neq_guards))
    };
    let mut order: Vec<usize> = (0..rules.len()).collect();
    order.sort_by(|&a, &b| {
        drop_rank(&rules[a]).cmp(&drop_rank(&rules[b])).then_with(|| rules[a].cmp(&rules[b]))
    });
    let mut alive = vec![true; rules.len()];
    for &i in &order {
        alive[i] = false;
        let rest: Vec<PropRule> = rules
            .iter()
            .zip(&alive)
            .filter(|(_, a)| **a)
            .map(|(r, _)| r.clone())
            .collect();
        let from = init.apply_all(&rules[i].lhs);
        let reached = solv_rules(&rest, &from);
        let covered = reached.is_false() || reached.entails(&rules[i].rhs);
        if !covered {
            alive[i] = true;
        }
    }
    rules = rules.into_iter().zip(alive).filter(|(_, a)| *a).map(|(r, _)| r).collect();
    rules.sort();

    Ok(RuleSet { rules, source: Some(c.clone()), minimal: true })
}

/// Build a valuation from integer bindings (test and analyzer helper).
pub fn int_valuation(bindings: &[(VarId, i32)]) -> Valuation {
    let mut theta = Valuation::new();
    for &(v, d) in bindings {
        theta.bind(v, crate::domain::Value::Int(d));
    }
    theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{SetBounds, VarDomain};
    use crate::lattice;

    fn iv(i: u32) -> VarId {
        VarId::int(i)
    }

    fn bool_universe(n: usize) -> Domain {
        Domain::new(vec![VarDomain::Int(IntSet::range(0, 1)); n])
    }

    #[test]
    fn rule_propagate_fires_only_when_guard_entailed() {
        let init = bool_universe(3);
        let r = PropRule::new(vec![Atom::IntEq(iv(0), 1)], Atom::IntEq(iv(1), 0));
        let d = init.apply(&Atom::IntEq(iv(0), 1));
        let out = rule_propagate(&r, &d);
        assert_eq!(out.int(iv(1)), &IntSet::singleton(0));
        // guard not entailed: unchanged
        assert_eq!(rule_propagate(&r, &init), init);
        // conclusion contradicting the domain: false
        let d2 = d.apply(&Atom::IntEq(iv(1), 1));
        assert!(rule_propagate(&r, &d2).is_false());
    }

    #[test]
    fn implements_matches_lemma_semantics() {
        let init = bool_universe(3);
        let c = Constraint::LinearEq {
            terms: vec![(1, iv(0)), (1, iv(1)), (1, iv(2))],
            rhs: 1,
        };
        let good = PropRule::new(vec![Atom::IntEq(iv(1), 1)], Atom::IntEq(iv(0), 0));
        assert!(implements(&c, &good, &init, 1 << 16).unwrap());
        let bad = PropRule::new(vec![Atom::IntEq(iv(0), 1)], Atom::IntEq(iv(1), 0));
        assert!(!implements(&Constraint::True, &bad, &init, 1 << 16).unwrap());
        // equality definition
        let init2 = Domain::new(vec![VarDomain::Int(IntSet::range(1, 3)); 2]);
        let eqc = Constraint::LinearEq { terms: vec![(1, iv(0)), (-1, iv(1))], rhs: 0 };
        let r = PropRule::new(vec![Atom::IntEq(iv(0), 3)], Atom::IntEq(iv(1), 3));
        assert!(implements(&eqc, &r, &init2, 1 << 16).unwrap());
    }

    #[test]
    fn boolean_sum_rules_are_the_classic_six_lines() {
        // z0+z1+z2 = 1: six displayed rule lines, nine atomic rules
        let init = bool_universe(3);
        let c = Constraint::LinearEq {
            terms: vec![(1, iv(0)), (1, iv(1)), (1, iv(2))],
            rhs: 1,
        };
        let rs = extract_rules(&c, &init, &ExtractBudget::default()).unwrap();
        let mut expect = Vec::new();
        for one in 0..3u32 {
            for other in 0..3u32 {
                if one != other {
                    expect.push(PropRule::new(
                        vec![Atom::IntEq(iv(one), 1)],
                        Atom::IntEq(iv(other), 0),
                    ));
                }
            }
        }
        for target in 0..3u32 {
            let others: Vec<Atom> = (0..3u32)
                .filter(|&k| k != target)
                .map(|k| Atom::IntEq(iv(k), 0))
                .collect();
            expect.push(PropRule::new(others, Atom::IntEq(iv(target), 1)));
        }
        expect.sort();
        assert_eq!(rs.rules, expect);
    }

    #[test]
    fn diseq_rules_over_two_values() {
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 2)); 2]);
        let c = Constraint::Diseq { x: iv(0), y: iv(1), offset: 0 };
        let rs = extract_rules(&c, &init, &ExtractBudget::default()).unwrap();
        let mut expect = vec![
            PropRule::new(vec![Atom::IntEq(iv(0), 1)], Atom::IntNeq(iv(1), 1)),
            PropRule::new(vec![Atom::IntEq(iv(0), 2)], Atom::IntNeq(iv(1), 2)),
            PropRule::new(vec![Atom::IntEq(iv(1), 1)], Atom::IntNeq(iv(0), 1)),
            PropRule::new(vec![Atom::IntEq(iv(1), 2)], Atom::IntNeq(iv(0), 2)),
        ];
        expect.sort();
        assert_eq!(rs.rules, expect);
    }

    #[test]
    fn true_has_no_rules() {
        let init = bool_universe(2);
        let rs = extract_rules(&Constraint::True, &init, &ExtractBudget::default()).unwrap();
        assert!(rs.rules.is_empty());
    }

    #[test]
    fn extracted_sets_are_solver_equivalent_and_minimal() {
        // sweep structured constraints: equivalence with dsb on all
        // subdomains, every rule implemented, rule invariant holds
        let init = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 3)),
            VarDomain::Int(IntSet::range(1, 3)),
            VarDomain::Set(SetBounds::free(IntSet::range(1, 2))),
        ]);
        let cs = vec![
            Constraint::Diseq { x: iv(0), y: iv(1), offset: 1 },
            Constraint::OffsetBiImpl { x: iv(0), a: 2, y: iv(1), b: 3 },
            Constraint::SetCard { s: VarId::set(2), rhs: crate::constraint::Rhs::Var(iv(0)) },
            Constraint::Impl(
                Box::new(Constraint::AtomC(Atom::IntEq(iv(0), 1))),
                Box::new(Constraint::AtomC(Atom::InSet(1, VarId::set(2)))),
            ),
        ];
        for c in &cs {
            let rs = extract_rules(c, &init, &ExtractBudget::default()).unwrap();
            for r in &rs.rules {
                assert!(implements(c, r, &init, 1 << 20).unwrap(), "{r} not implemented");
                let induced = init.apply_all(&r.lhs);
                assert!(
                    induced.is_false() || !induced.entails(&r.rhs),
                    "{r} violates the rule invariant"
                );
            }
            let vars = c.scope();
            lattice::for_each_subdomain(&init, &vars, 1 << 22, |d| {
                let via_rules = rs.solv(d);
                let via_dsb = crate::propagate::dsb_propagate(c, d, 1 << 20).unwrap();
                assert!(
                    via_rules.equal_semantic(&via_dsb),
                    "rule set diverges from dsb for {c:?} at {d:?}"
                );
                true
            })
            .unwrap();
            // minimality: dropping any rule breaks equivalence somewhere
            for k in 0..rs.rules.len() {
                let mut rest = rs.rules.clone();
                rest.remove(k);
                let mut equal = true;
                lattice::for_each_subdomain(&init, &vars, 1 << 22, |d| {
                    let via_rules = solv_rules(&rest, d);
                    let via_dsb = crate::propagate::dsb_propagate(c, d, 1 << 20).unwrap();
                    if !via_rules.equal_semantic(&via_dsb) {
                        equal = false;
                        return false;
                    }
                    true
                })
                .unwrap();
                assert!(!equal, "rule {} is removable from {c:?}", rs.rules[k]);
            }
        }
    }

    #[test]
    fn direct_subsumption_examples() {
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 3)); 3]);
        let r = PropRule::new(vec![Atom::IntEq(iv(0), 1)], Atom::IntEq(iv(1), 2));
        assert!(directly_subsumes(&r, &r, &init));
        // stronger guard, weaker head (pseudo head, relative to init)
        let r1 = PropRule::new(vec![Atom::IntEq(iv(0), 1)], Atom::IntLeq(iv(1), 2));
        let r2 = PropRule::new(
            vec![Atom::IntEq(iv(0), 1), Atom::IntEq(iv(2), 1)],
            Atom::IntNeq(iv(1), 3),
        );
        assert!(directly_subsumes(&r1, &r2, &init));
        let r3 = PropRule::new(vec![Atom::IntEq(iv(0), 2)], Atom::IntEq(iv(1), 2));
        assert!(!directly_subsumes(&r, &r3, &init));
    }

    #[test]
    fn rule_text_format() {
        let r = PropRule::new(
            vec![Atom::IntEq(iv(0), 2), Atom::IntNeq(iv(2), 1)],
            Atom::IntEq(iv(1), 5),
        );
        let name = |v: VarId| format!("x{}", v.index + 1);
        assert_eq!(r.display_with(&name), "x1=2 & x3!=1 -> x2=5");
        let rs = PropRule::new(vec![], Atom::NotInSet(3, VarId::set(0)));
        let sname = |_: VarId| "S1".to_string();
        assert_eq!(rs.display_with(&sname), "true -> 3 notin S1");
    }
}
