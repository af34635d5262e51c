//! The redundancy analyzer: decides which constraints of a channeled
//! combined model add no propagation and can be dropped without changing
//! search behavior.
//!
//! The decision ladder per constraint: channel built-ins (the channel
//! rules alone subsume disequalities under permutation channels, row
//! sums under Boolean channels, and pairwise disjointness under set
//! channels), then logical consequence through an unrestrictive channel,
//! then rule-level reasoning (every extracted rule of the constraint is
//! reproduced, through the channel bijection, by one witness constraint
//! of the other viewpoint — or by per-rule witnesses, allowing pairwise
//! conjunctions that share at most one integer variable). Removal is
//! sequential against the *remaining* set: a constraint that has been
//! removed is never used as a witness, which keeps the final kept set
//! sound by induction.

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;

use crate::channel::{ChannelFunction, ChannelKind, Restrictiveness, Side};
use crate::constraint::{conjoin, Constraint};
use crate::domain::{Atom, Domain, Value, VarId, VarKind};
use crate::engine::{fixpoint, PropagatorSet};
use crate::error::{Error, Result};
use crate::lattice;
use crate::models::{ConstraintSide, Model, NamedConstraint};
use crate::rules::{extract_rules, ExtractBudget, PropRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Redundant,
    NotProven,
    Counterexample,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Redundant => "redundant",
            Status::NotProven => "not_proven",
            Status::Counterexample => "counterexample",
        };
        write!(f, "{s}")
    }
}

/// How a redundancy verdict was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Plain logical consequence of a single other constraint.
    LogicalImplication,
    /// Permutation channel rules subsume within-viewpoint disequalities.
    PermutationDiseq,
    /// Boolean channel rules subsume the per-row "exactly one" sums.
    BooleanRowSum,
    /// Set channel rules subsume pairwise disjointness of the sets.
    SetDisjointness,
    /// Logical consequence through an unrestrictive channel.
    UnrestrictiveConsequence,
    /// Every extracted rule is reproduced by one witness constraint.
    RuleWitnessSingle,
    /// Every extracted rule has its own witness constraint.
    RuleWitnessMulti,
    OracleExhaustive,
    OracleSampled,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::LogicalImplication => "logical-implication",
            Method::PermutationDiseq => "permutation-diseq",
            Method::BooleanRowSum => "boolean-row-sum",
            Method::SetDisjointness => "set-disjointness",
            Method::UnrestrictiveConsequence => "unrestrictive-consequence",
            Method::RuleWitnessSingle => "rule-witness-single",
            Method::RuleWitnessMulti => "rule-witness-multi",
            Method::OracleExhaustive => "oracle-exhaustive",
            Method::OracleSampled => "oracle-sampled",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub method: Option<Method>,
    /// Rule → witness-constraint id, for per-rule justifications.
    pub witnesses: Vec<(PropRule, String)>,
    pub counterexample: Option<Domain>,
    pub note: String,
}

impl Verdict {
    fn redundant(method: Method) -> Verdict {
        Verdict {
            status: Status::Redundant,
            method: Some(method),
            witnesses: vec![],
            counterexample: None,
            note: String::new(),
        }
    }

    fn not_proven(note: impl Into<String>) -> Verdict {
        Verdict {
            status: Status::NotProven,
            method: None,
            witnesses: vec![],
            counterexample: None,
            note: note.into(),
        }
    }

    /// Distinct witness ids, in first-use order.
    pub fn witness_ids(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (_, id) in &self.witnesses {
            if !out.contains(id) {
                out.push(id.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub enum OracleMode {
    Exhaustive { cap: u128 },
    Sampled { seed: u64, trials: u32 },
}

/// Is `solv(F1, D) ⊑ solv(F2, D)` for all `D ⊑ init`? Exhaustive mode
/// sweeps the whole sub-domain lattice (and a found violation is a
/// definitive counterexample); sampled mode can only refute.
pub fn oracle_stronger(
    f1: &PropagatorSet,
    f2: &PropagatorSet,
    init: &Domain,
    mode: OracleMode,
) -> Result<Verdict> {
    let vars: Vec<VarId> = init.vars().collect();
    let check = |d: &Domain| -> bool { fixpoint(f1, d).stronger_semantic(&fixpoint(f2, d)) };
    match mode {
        OracleMode::Exhaustive { cap } => {
            let mut counter = None;
            lattice::for_each_subdomain(init, &vars, cap, |d| {
                if check(d) {
                    true
                } else {
                    counter = Some(d.clone());
                    false
                }
            })?;
            Ok(match counter {
                None => Verdict::redundant(Method::OracleExhaustive),
                Some(d) => Verdict {
                    status: Status::Counterexample,
                    method: Some(Method::OracleExhaustive),
                    witnesses: vec![],
                    counterexample: Some(d),
                    note: String::new(),
                },
            })
        }
        OracleMode::Sampled { seed, trials } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let d = lattice::random_subdomain(init, &vars, &mut rng);
                if !check(&d) {
                    return Ok(Verdict {
                        status: Status::Counterexample,
                        method: Some(Method::OracleSampled),
                        witnesses: vec![],
                        counterexample: Some(d),
                        note: String::new(),
                    });
                }
            }
            Ok(Verdict::not_proven("sampling found no violation; confirmation needs exhaustion"))
        }
    }
}

/// `⊨ (D_init ∧ c1) → c2`: every solution of `c1` inside the initial
/// domain satisfies `c2`. Implies that `c1`'s propagator makes `c2`'s
/// redundant.
pub fn is_logically_redundant(
    c2: &Constraint,
    c1: &Constraint,
    init: &Domain,
    cap: u128,
) -> Result<bool> {
    crate::constraint::all_solutions_satisfy(c1, init, &c2.scope(), cap, |theta| {
        c2.satisfied(theta)
    })
}

/// Map an atom to the other viewpoint: through its covering channel, or
/// identically when its variable is shared (covered by no channel).
pub fn map_atom_across(channels: &[ChannelFunction], a: &Atom) -> Result<Atom> {
    for ch in channels {
        if ch.covers(a.var()) {
            return ch.map_atom(a);
        }
    }
    Ok(*a)
}

fn map_rule_across(channels: &[ChannelFunction], r: &PropRule) -> Result<PropRule> {
    let lhs = r.lhs.iter().map(|a| map_atom_across(channels, a)).collect::<Result<Vec<_>>>()?;
    let rhs = map_atom_across(channels, &r.rhs)?;
    Ok(PropRule::new(lhs, rhs))
}

/// The rule-level channel test: map the rule's atoms to the witness side
/// and check that the witness constraint entails the conclusion whenever
/// the mapped guard holds. True means the witness plus the channel rules
/// reproduce the rule's propagation.
pub fn rule_redundant_via_channel(
    r: &PropRule,
    c_w: &Constraint,
    channels: &[ChannelFunction],
    init: &Domain,
    cap: u128,
) -> Result<bool> {
    let mapped = map_rule_across(channels, r)?;
    mapped_rule_entailed(&mapped, c_w, init, cap)
}

fn mapped_rule_entailed(
    mapped: &PropRule,
    c_w: &Constraint,
    init: &Domain,
    cap: u128,
) -> Result<bool> {
    let induced = init.apply_all(&mapped.lhs);
    if induced.is_false() {
        return Ok(true);
    }
    crate::constraint::all_solutions_satisfy(c_w, &induced, &[mapped.rhs.var()], cap, |theta| {
        theta.satisfies_atom(&mapped.rhs)
    })
}

/// Single-witness form: every rule of `c`'s extracted set is reproduced
/// by the same witness constraint through the channels.
pub fn constraint_redundant_via_channel(
    c: &Constraint,
    c_w: &Constraint,
    channels: &[ChannelFunction],
    init: &Domain,
    extract: &ExtractBudget,
    cap: u128,
) -> Result<bool> {
    let rules = extract_rules(c, init, extract)?;
    for r in &rules.rules {
        if !rule_redundant_via_channel(r, c_w, channels, init, cap)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The variables on the witness side whose atoms map to atoms on `w`.
fn preimage_vars(channels: &[ChannelFunction], w: VarId) -> Vec<VarId> {
    for ch in channels {
        if ch.side_of(w).is_none() {
            continue;
        }
        // reconstruct from the atom universe: cheap at our sizes
        let mut out = BTreeSet::new();
        for a in ch.atoms_x() {
            let img = ch.map_atom(&a).expect("universe atom");
            if img.var() == w {
                out.insert(a.var());
            }
            if a.var() == w {
                out.insert(img.var());
            }
        }
        return out.into_iter().collect();
    }
    vec![w] // shared variable: its own preimage
}

/// Value of a channeled variable under a witness-side valuation.
fn value_through_channels(
    channels: &[ChannelFunction],
    w: VarId,
    theta: &crate::domain::Valuation,
) -> Option<Value> {
    for ch in channels {
        if !ch.covers(w) {
            continue;
        }
        let mut int_val: Option<i32> = None;
        let mut denied: Vec<i32> = Vec::new();
        let mut elems: Vec<i32> = Vec::new();
        for a in ch.atoms_x() {
            let img = ch.map_atom(&a).expect("universe atom");
            let (on_w, holds) = if img.var() == w {
                (img, theta.satisfies_atom(&a))
            } else if a.var() == w {
                (a, theta.satisfies_atom(&img))
            } else {
                continue;
            };
            match on_w {
                Atom::IntEq(_, d) => {
                    if holds {
                        if int_val.is_some_and(|x| x != d) {
                            return None;
                        }
                        int_val = Some(d);
                    } else {
                        denied.push(d);
                    }
                }
                Atom::IntNeq(_, d) => {
                    if holds {
                        denied.push(d);
                    } else {
                        if int_val.is_some_and(|x| x != d) {
                            return None;
                        }
                        int_val = Some(d);
                    }
                }
                Atom::InSet(e, _) => {
                    if holds {
                        elems.push(e);
                    }
                }
                Atom::NotInSet(e, _) => {
                    if !holds {
                        elems.push(e);
                    }
                }
                _ => return None,
            }
        }
        return match w.kind {
            VarKind::Int => {
                let v = int_val?;
                if denied.contains(&v) {
                    return None;
                }
                Some(Value::Int(v))
            }
            VarKind::Set => Some(Value::Set(crate::domain::IntSet::from_values(elems))),
        };
    }
    theta.get(w).cloned()
}

/// The unrestrictive-channel shortcut: when every valuation of the
/// witness side extends through the channels, logical consequence of the
/// witness through the channel constraint already makes `dsb(c)`
/// propagation redundant. Errors when a relevant channel is restrictive
/// on the witness side, where the shortcut is unsound.
pub fn redundant_unrestrictive(
    c: &Constraint,
    c_w: &Constraint,
    channels: &[ChannelFunction],
    init: &Domain,
    cap: u128,
) -> Result<bool> {
    for v in c.scope() {
        for ch in channels {
            if let Some(side) = ch.side_of(v) {
                let witness_side = match side {
                    Side::X => Side::Y,
                    Side::Y => Side::X,
                };
                if ch.classify_restrictive(witness_side) == Restrictiveness::Restrictive {
                    return Err(Error::RestrictiveChannel);
                }
            }
        }
    }
    // enumerate the witness side: the witness scope, the preimages of
    // c's channeled variables, and c's shared variables
    let mut vars: Vec<VarId> = c_w.scope();
    for v in c.scope() {
        vars.extend(preimage_vars(channels, v));
    }
    vars.sort();
    vars.dedup();
    crate::constraint::all_solutions_satisfy(c_w, init, &vars, cap, |theta| {
        let mut full = theta.clone();
        for v in c.scope() {
            match value_through_channels(channels, v, theta) {
                Some(val) => {
                    if full.get(v).is_none() {
                        full.bind(v, val);
                    }
                }
                None => return false,
            }
        }
        c.satisfied(&full)
    })
}

/// Channel built-ins: constraints subsumed by the channel rules alone.
pub fn builtin_channel_redundancy(c: &Constraint, channels: &[ChannelFunction]) -> Option<Method> {
    match c {
        Constraint::Diseq { x, y, offset: 0 } => {
            for ch in channels {
                if ch.kind == ChannelKind::Permutation {
                    if let (Some(sx), Some(sy)) = (ch.side_of(*x), ch.side_of(*y)) {
                        if sx == sy {
                            return Some(Method::PermutationDiseq);
                        }
                    }
                }
            }
            None
        }
        Constraint::LinearEq { terms, rhs: 1 } => {
            // a full Boolean channel row summing to one
            if !terms.iter().all(|&(a, _)| a == 1) {
                return None;
            }
            let vars: BTreeSet<VarId> = terms.iter().map(|&(_, v)| v).collect();
            for ch in channels {
                if ch.kind != ChannelKind::Boolean {
                    continue;
                }
                let rows = ch.x_vars.len();
                let per_row = ch.y_vars.len() / rows.max(1);
                for i in 1..=rows {
                    let row: BTreeSet<VarId> = (1..=per_row).map(|j| ch.bool_var(i, j)).collect();
                    if row == vars {
                        return Some(Method::BooleanRowSum);
                    }
                }
            }
            None
        }
        Constraint::SetInterEmpty { s, t } => {
            for ch in channels {
                if ch.kind == ChannelKind::SetChannel && ch.covers(*s) && ch.covers(*t) {
                    return Some(Method::SetDisjointness);
                }
            }
            None
        }
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisBudget {
    /// Enumeration cap for the implication tests.
    pub enum_cap: u128,
    pub extract: ExtractBudget,
    /// Cap on conjunction-pair witnesses tried per rule.
    pub max_pairs: usize,
}

impl Default for AnalysisBudget {
    fn default() -> AnalysisBudget {
        AnalysisBudget { enum_cap: 1 << 21, extract: ExtractBudget::default(), max_pairs: 4096 }
    }
}

#[derive(Debug, Clone)]
pub struct RedundancyReport {
    pub verdicts: Vec<(String, Verdict)>,
    pub kept: Vec<String>,
    pub removed: Vec<String>,
}

impl RedundancyReport {
    pub fn verdict(&self, id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|(i, _)| i == id).map(|(_, v)| v)
    }

    /// One machine-readable line per analyzed constraint:
    /// `<id> <status> <method> [witnesses]`.
    pub fn machine_lines(&self) -> String {
        let mut s = String::new();
        for (id, v) in &self.verdicts {
            s.push_str(id);
            s.push(' ');
            s.push_str(&v.status.to_string());
            s.push(' ');
            match v.method {
                Some(m) => s.push_str(&m.to_string()),
                None => s.push('-'),
            }
            let ws = v.witness_ids();
            if !ws.is_empty() {
                s.push(' ');
                s.push_str(&ws.join(","));
            }
            s.push('\n');
        }
        s
    }

    /// Family-level summary table.
    pub fn family_table(&self, model: &Model) -> String {
        let mut fams: Vec<String> = Vec::new();
        for nc in &model.constraints {
            if !fams.contains(&nc.family) {
                fams.push(nc.family.clone());
            }
        }
        let mut s =
            format!("{:<8} {:>6} {:>8} {:>6}   method\n", "family", "total", "removed", "kept");
        for fam in fams {
            let ids: Vec<&String> = self
                .verdicts
                .iter()
                .map(|(id, _)| id)
                .filter(|id| {
                    model.constraint(id).map_or(false, |nc| nc.family == fam)
                })
                .collect();
            let all: Vec<&NamedConstraint> =
                model.constraints.iter().filter(|nc| nc.family == fam).collect();
            let removed = ids.iter().filter(|id| self.removed.contains(**id)).count();
            let method = ids
                .iter()
                .filter(|id| self.removed.contains(**id))
                .filter_map(|id| self.verdict(id).and_then(|v| v.method))
                .map(|m| m.to_string())
                .next()
                .unwrap_or_else(|| "-".into());
            s.push_str(&format!(
                "{:<8} {:>6} {:>8} {:>6}   {}\n",
                fam,
                all.len(),
                removed,
                all.len() - removed,
                method,
            ));
        }
        s
    }
}

/// Analyze a combined model: walk its removal order, prove what can be
/// proven against the remaining constraints, and remove it. Budget
/// exhaustion yields `not_proven`, never a removal.
pub fn analyze_model(model: &Model, budget: &AnalysisBudget) -> Result<RedundancyReport> {
    let mut removed: BTreeSet<String> = BTreeSet::new();
    let mut verdicts: Vec<(String, Verdict)> = Vec::new();

    for id in &model.removal_order {
        let Some(nc) = model.constraint(id) else { continue };
        let verdict = judge(model, nc, &removed, budget)?;
        if verdict.status == Status::Redundant {
            removed.insert(id.clone());
        }
        verdicts.push((id.clone(), verdict));
    }
    // constraints outside the removal order (objective definitions) stay
    let kept: Vec<String> = model
        .constraints
        .iter()
        .map(|nc| nc.id.clone())
        .filter(|id| !removed.contains(id))
        .collect();
    Ok(RedundancyReport { verdicts, kept, removed: removed.into_iter().collect() })
}

fn opposite(side: ConstraintSide) -> Vec<ConstraintSide> {
    match side {
        ConstraintSide::X => vec![ConstraintSide::Y, ConstraintSide::Common],
        ConstraintSide::Y => vec![ConstraintSide::X, ConstraintSide::Common],
        ConstraintSide::Common => {
            vec![ConstraintSide::X, ConstraintSide::Y, ConstraintSide::Common]
        }
        ConstraintSide::Def => vec![],
    }
}

fn judge(
    model: &Model,
    nc: &NamedConstraint,
    removed: &BTreeSet<String>,
    budget: &AnalysisBudget,
) -> Result<Verdict> {
    let init = &model.init;
    let channels = &model.channels;

    // channel built-ins first
    if let Some(method) = builtin_channel_redundancy(&nc.c, channels) {
        return Ok(Verdict::redundant(method));
    }

    // witness candidates: remaining constraints of the other viewpoint
    let sides = opposite(nc.side);
    let candidates: Vec<&NamedConstraint> = model
        .constraints
        .iter()
        .filter(|w| w.id != nc.id && !removed.contains(&w.id) && sides.contains(&w.side))
        .collect();

    // relevance: witnesses sharing variables with the preimage of nc
    let mut relevant_vars: BTreeSet<VarId> = BTreeSet::new();
    for v in nc.c.scope() {
        relevant_vars.extend(preimage_vars(channels, v));
    }
    let relevant: Vec<&NamedConstraint> = candidates
        .iter()
        .copied()
        .filter(|w| w.c.scope().iter().any(|v| relevant_vars.contains(v)))
        .collect();

    // logical consequence through unrestrictive channels
    for w in &relevant {
        match redundant_unrestrictive(&nc.c, &w.c, channels, init, budget.enum_cap) {
            Ok(true) => {
                let mut v = Verdict::redundant(Method::UnrestrictiveConsequence);
                v.note = format!("implied by {} through the channels", w.id);
                return Ok(v);
            }
            Ok(false) => {}
            Err(Error::RestrictiveChannel) => break,
            Err(Error::CapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    // rule-level reasoning
    let rules = match extract_rules(&nc.c, init, &budget.extract) {
        Ok(rs) => rs,
        Err(Error::CapExceeded { .. }) => {
            return Ok(Verdict::not_proven("rule extraction exceeded its budget"))
        }
        Err(e) => return Err(e),
    };
    if rules.rules.is_empty() {
        // no propagation at all: trivially redundant
        return Ok(Verdict::redundant(Method::RuleWitnessSingle));
    }
    let mapped: Vec<PropRule> = rules
        .rules
        .iter()
        .map(|r| map_rule_across(channels, r))
        .collect::<Result<Vec<_>>>()?;

    // one witness for all rules
    'single: for w in &relevant {
        for m in &mapped {
            if !mapped_rule_entailed(m, &w.c, init, budget.enum_cap)? {
                continue 'single;
            }
        }
        let mut v = Verdict::redundant(Method::RuleWitnessSingle);
        v.witnesses = rules.rules.iter().map(|r| (r.clone(), w.id.clone())).collect();
        return Ok(v);
    }

    // per-rule witnesses, allowing pairwise conjunctions sharing at most
    // one integer variable and no set variable
    let mut witnesses: Vec<(PropRule, String)> = Vec::new();
    for (r, m) in rules.rules.iter().zip(&mapped) {
        let mut found: Option<String> = None;
        for w in &relevant {
            if mapped_rule_entailed(m, &w.c, init, budget.enum_cap)? {
                found = Some(w.id.clone());
                break;
            }
        }
        if found.is_none() {
            let mut tried = 0usize;
            'pairs: for (i, w1) in relevant.iter().enumerate() {
                for w2 in relevant.iter().skip(i + 1) {
                    let s1 = w1.c.scope();
                    let s2 = w2.c.scope();
                    let shared_int =
                        s1.iter().filter(|v| v.kind == VarKind::Int && s2.contains(v)).count();
                    let shared_set =
                        s1.iter().filter(|v| v.kind == VarKind::Set && s2.contains(v)).count();
                    if shared_int > 1 || shared_set > 0 {
                        continue;
                    }
                    tried += 1;
                    if tried > budget.max_pairs {
                        break 'pairs;
                    }
                    let both = conjoin(&w1.c, &w2.c);
                    if mapped_rule_entailed(m, &both, init, budget.enum_cap)? {
                        found = Some(format!("{}+{}", w1.id, w2.id));
                        break 'pairs;
                    }
                }
            }
        }
        match found {
            Some(id) => witnesses.push((r.clone(), id)),
            None => return Ok(Verdict::not_proven(format!("no witness reproduces rule {r}"))),
        }
    }
    let mut v = Verdict::redundant(Method::RuleWitnessMulti);
    v.witnesses = witnesses;
    Ok(v)
}

/// Exact decision of "the kept set is at least as strong as `dsb(c)`"
/// through the rule decomposition: for every extracted rule `C ↦ c'`,
/// the kept set's fixpoint from `apply(C, D_init)` must entail `c'`.
/// This is equivalent to checking every subdomain: a domain entails `C`
/// exactly when it lies below `apply(C, D_init)`, and fixpoints are
/// monotone, so coverage at the weakest firing domain covers them all.
pub fn stronger_rulewise(
    kept: &PropagatorSet,
    c: &Constraint,
    init: &Domain,
    extract: &ExtractBudget,
) -> Result<bool> {
    let rules = extract_rules(c, init, extract)?;
    for r in &rules.rules {
        let from = init.apply_all(&r.lhs);
        let reached = fixpoint(kept, &from);
        if !(reached.is_false() || reached.entails(&r.rhs)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{IntSet, SetBounds, VarDomain};
    use crate::models::{build, build_analysis, BacpInstance, Problem, Variant};
    use crate::propagate::make_propagator;
    use crate::rules::rule_propagator;

    fn iv(i: u32) -> VarId {
        VarId::int(i)
    }

    #[test]
    fn oracle_on_conjunction_versus_parts() {
        // the conjunction propagator is always at least as strong
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 3)); 3]);
        let c1 = Constraint::Diseq { x: iv(0), y: iv(1), offset: 0 };
        let c2 = Constraint::LinearEq { terms: vec![(1, iv(1)), (-1, iv(2))], rhs: 1 };
        let both = conjoin(&c1, &c2);
        let f1 =
            PropagatorSet::from_props(3, vec![make_propagator(&both, &init, 1 << 20).unwrap()]);
        let f2 = PropagatorSet::from_props(
            3,
            vec![
                make_propagator(&c1, &init, 1 << 20).unwrap(),
                make_propagator(&c2, &init, 1 << 20).unwrap(),
            ],
        );
        let v = oracle_stronger(&f1, &f2, &init, OracleMode::Exhaustive { cap: 1 << 22 }).unwrap();
        assert_eq!(v.status, Status::Redundant);
    }

    #[test]
    fn oracle_detects_shared_set_variable_counterexample() {
        // two set-membership tables over one shared set variable: each is
        // individually at fixpoint at the top, their conjunction is false
        let s = VarId::set(0);
        let init = Domain::new(vec![VarDomain::Set(SetBounds::free(IntSet::range(1, 3)))]);
        let t = |fam: Vec<Vec<i32>>| Constraint::Table {
            vars: vec![s],
            tuples: fam.into_iter().map(|a| vec![Value::Set(IntSet::from_values(a))]).collect(),
        };
        let c1 = t(vec![vec![1], vec![2, 3]]);
        let c2 = t(vec![vec![2], vec![1, 3]]);
        let both = conjoin(&c1, &c2);
        let f1 = PropagatorSet::from_props(
            1,
            vec![
                make_propagator(&c1, &init, 1 << 20).unwrap(),
                make_propagator(&c2, &init, 1 << 20).unwrap(),
            ],
        );
        let f2 =
            PropagatorSet::from_props(1, vec![make_propagator(&both, &init, 1 << 20).unwrap()]);
        let v = oracle_stronger(&f1, &f2, &init, OracleMode::Exhaustive { cap: 1 << 22 }).unwrap();
        assert_eq!(v.status, Status::Counterexample);
        let d = v.counterexample.unwrap();
        assert_eq!(d.set(s), init.set(s), "strictness witness is the full range");
    }

    #[test]
    fn logical_redundancy_examples() {
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 4)); 3]);
        let lt = Constraint::LinearLeq { terms: vec![(1, iv(0)), (-1, iv(1))], rhs: -1 };
        let ne = Constraint::Diseq { x: iv(0), y: iv(1), offset: 0 };
        assert!(is_logically_redundant(&ne, &lt, &init, 1 << 20).unwrap());
        assert!(!is_logically_redundant(&ne, &Constraint::True, &init, 1 << 20).unwrap());
        let ad = Constraint::AllDifferent(vec![iv(0), iv(1), iv(2)]);
        assert!(is_logically_redundant(&ne, &ad, &init, 1 << 20).unwrap());
    }

    #[test]
    fn permutation_channel_subsumes_disequalities() {
        let mut slots = Vec::new();
        for _ in 0..6 {
            slots.push(VarDomain::Int(IntSet::range(1, 3)));
        }
        let init = Domain::new(slots);
        let xs: Vec<VarId> = (0..3).map(iv).collect();
        let ys: Vec<VarId> = (3..6).map(iv).collect();
        let ch = ChannelFunction::permutation(xs.clone(), ys, &init).unwrap();
        let f1 = PropagatorSet::from_props(6, ch.propagator_rules().to_propagators());
        let diseq = Constraint::Diseq { x: xs[0], y: xs[1], offset: 0 };
        let f2 =
            PropagatorSet::from_props(6, vec![make_propagator(&diseq, &init, 1 << 20).unwrap()]);
        let v = oracle_stronger(&f1, &f2, &init, OracleMode::Exhaustive { cap: 1 << 24 }).unwrap();
        assert_eq!(v.status, Status::Redundant);
        assert!(builtin_channel_redundancy(&diseq.normalize(), &[ch]).is_some());
    }

    #[test]
    fn direct_subsumption_through_channel_implies_redundancy() {
        // random small rule pairs: when a witness-side rule directly
        // subsumes the preimage of a second-side rule, the latter is
        // redundant with respect to the witness rule plus the channel
        use rand::Rng;
        let mut slots = Vec::new();
        for _ in 0..6 {
            slots.push(VarDomain::Int(IntSet::range(1, 3)));
        }
        let init = Domain::new(slots);
        let xs: Vec<VarId> = (0..3).map(iv).collect();
        let ys: Vec<VarId> = (3..6).map(iv).collect();
        let ch = ChannelFunction::permutation(xs.clone(), ys.clone(), &init).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let universe = crate::rules::atom_universe(&ys, &init);
        let x_universe = crate::rules::atom_universe(&xs, &init);
        let mut checked = 0;
        while checked < 12 {
            let ry = PropRule::new(
                vec![universe[rng.gen_range(0..universe.len())]],
                universe[rng.gen_range(0..universe.len())],
            );
            if ry.lhs[0] == ry.rhs || ry.lhs[0].var() == ry.rhs.var() {
                continue;
            }
            let pre = map_rule_across(&[ch.clone()], &ry).unwrap();
            let rx = PropRule::new(
                vec![pre.lhs[0], x_universe[rng.gen_range(0..x_universe.len())]],
                pre.rhs,
            );
            if !crate::rules::directly_subsumes(&rx, &pre, &init) {
                continue;
            }
            checked += 1;
            let mut props = ch.propagator_rules().to_propagators();
            props.push(rule_propagator(&rx));
            let f1 = PropagatorSet::from_props(6, props);
            let f2 = PropagatorSet::from_props(6, vec![rule_propagator(&ry)]);
            let v =
                oracle_stronger(&f1, &f2, &init, OracleMode::Exhaustive { cap: 1 << 24 }).unwrap();
            assert_eq!(v.status, Status::Redundant, "{rx} should subsume {ry}");
        }
    }

    #[test]
    fn langford_analysis_matches_published_reduction() {
        let model = build_analysis(&Problem::Langford { m: 3, n: 9 }).unwrap();
        let report = analyze_model(&model, &AnalysisBudget::default()).unwrap();
        for nc in &model.constraints {
            let removed = report.removed.contains(&nc.id);
            let expect = matches!(nc.family.as_str(), "LX1" | "LY1" | "LY2.1" | "LY2.2" | "LY3");
            assert_eq!(removed, expect, "{}", nc.id);
        }
        // the kept set matches the optimized variant
        let opt = build(&Problem::Langford { m: 3, n: 9 }, Variant::Opt).unwrap();
        let opt_ids: Vec<String> = opt.constraints.iter().map(|c| c.id.clone()).collect();
        assert_eq!(report.kept.len(), opt_ids.len());
        for id in &report.kept {
            assert!(opt_ids.contains(id));
        }
    }

    #[test]
    fn bacp_analysis_matches_published_reduction() {
        let model = build_analysis(&Problem::Bacp(BacpInstance::desk())).unwrap();
        let report = analyze_model(&model, &AnalysisBudget::default()).unwrap();
        for nc in &model.constraints {
            let removed = report.removed.contains(&nc.id);
            let expect = matches!(nc.family.as_str(), "BS1" | "BX1" | "BX2" | "BS4");
            assert_eq!(removed, expect, "{}", nc.id);
        }
    }

    #[test]
    fn rulewise_audit_confirms_langford_removals() {
        let model = build_analysis(&Problem::Langford { m: 2, n: 3 }).unwrap();
        let report = analyze_model(&model, &AnalysisBudget::default()).unwrap();
        let kept =
            model.propagators_for(&|nc| report.kept.contains(&nc.id), 1 << 21).unwrap();
        for id in &report.removed {
            let c = &model.constraint(id).unwrap().c;
            assert!(
                stronger_rulewise(&kept, c, &model.init, &ExtractBudget::default()).unwrap(),
                "removed {id} is not reproduced by the kept set"
            );
        }
    }
}
