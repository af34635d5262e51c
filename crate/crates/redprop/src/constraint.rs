//! The constraint AST, its solution semantics, and solution enumeration.
//!
//! Constraints are immutable values with structural identity on a
//! normalized form (sorted scopes, canonical term order). The
//! [`solutions`] enumerator is the reference semantics everything else is
//! measured against: propagators must agree with it pointwise.

use std::fmt;

use crate::domain::{Atom, Domain, IntSet, Valuation, Value, VarId, VarKind};
use crate::error::{Error, Result};

/// Right-hand side of counting forms: a fixed constant or an integer variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rhs {
    Const(i32),
    Var(VarId),
}

impl Rhs {
    pub fn value(&self, theta: &Valuation) -> i32 {
        match *self {
            Rhs::Const(c) => c,
            Rhs::Var(v) => theta.int(v),
        }
    }

    pub fn var(&self) -> Option<VarId> {
        match *self {
            Rhs::Var(v) => Some(v),
            Rhs::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetOpKind {
    Union,
    Inter,
    Diff,
}

/// Intensional constraint forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    True,
    /// A single (possibly pseudo) atomic constraint.
    AtomC(Atom),
    /// Extensional relation over mixed integer/set variables.
    Table { vars: Vec<VarId>, tuples: Vec<Vec<Value>> },
    /// Σ coeff·var = rhs
    LinearEq { terms: Vec<(i32, VarId)>, rhs: i32 },
    /// Σ coeff·var ≤ rhs
    LinearLeq { terms: Vec<(i32, VarId)>, rhs: i32 },
    /// x ≠ y + offset
    Diseq { x: VarId, y: VarId, offset: i32 },
    /// u = |x − y|
    AbsDiff { u: VarId, x: VarId, y: VarId },
    /// Σ weight_i · [var_i = value] = rhs
    ReifSumEq { value: i32, items: Vec<(VarId, i32)>, rhs: Rhs },
    /// x = a ⇔ y = b
    OffsetBiImpl { x: VarId, a: i32, y: VarId, b: i32 },
    AllDifferent(Vec<VarId>),
    /// m = max(vars)
    MaxEq { m: VarId, vars: Vec<VarId> },
    /// S = ∅
    SetEmpty(VarId),
    /// S ⊆ T
    SetSubset { s: VarId, t: VarId },
    /// S ∩ T = ∅
    SetInterEmpty { s: VarId, t: VarId },
    /// a = b ∪ c, a = b ∩ c, a = b ∖ c
    SetOp { op: SetOpKind, a: VarId, b: VarId, c: VarId },
    /// |S| = rhs
    SetCard { s: VarId, rhs: Rhs },
    /// |S ∩ T| ≤ k
    SetInterCardLeq { s: VarId, t: VarId, k: i32 },
    /// Σ_{e ∈ S} weight(e) = rhs
    SetWeightedSum { s: VarId, weights: Vec<(i32, i32)>, rhs: Rhs },
    Conj(Vec<Constraint>),
    Neg(Box<Constraint>),
    Impl(Box<Constraint>, Box<Constraint>),
}

impl Constraint {
    /// Variables mentioned by the constraint, sorted and deduplicated.
    pub fn scope(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Constraint::True => {}
            Constraint::AtomC(a) => out.push(a.var()),
            Constraint::Table { vars, .. } => out.extend(vars.iter().copied()),
            Constraint::LinearEq { terms, .. } | Constraint::LinearLeq { terms, .. } => {
                out.extend(terms.iter().map(|&(_, v)| v))
            }
            Constraint::Diseq { x, y, .. } => {
                out.push(*x);
                out.push(*y);
            }
            Constraint::AbsDiff { u, x, y } => {
                out.push(*u);
                out.push(*x);
                out.push(*y);
            }
            Constraint::ReifSumEq { items, rhs, .. } => {
                out.extend(items.iter().map(|&(v, _)| v));
                if let Some(v) = rhs.var() {
                    out.push(v);
                }
            }
            Constraint::OffsetBiImpl { x, y, .. } => {
                out.push(*x);
                out.push(*y);
            }
            Constraint::AllDifferent(vs) => out.extend(vs.iter().copied()),
            Constraint::MaxEq { m, vars } => {
                out.push(*m);
                out.extend(vars.iter().copied());
            }
            Constraint::SetEmpty(s) => out.push(*s),
            Constraint::SetSubset { s, t }
            | Constraint::SetInterEmpty { s, t }
            | Constraint::SetInterCardLeq { s, t, .. } => {
                out.push(*s);
                out.push(*t);
            }
            Constraint::SetOp { a, b, c, .. } => {
                out.push(*a);
                out.push(*b);
                out.push(*c);
            }
            Constraint::SetCard { s, rhs } => {
                out.push(*s);
                if let Some(v) = rhs.var() {
                    out.push(v);
                }
            }
            Constraint::SetWeightedSum { s, rhs, .. } => {
                out.push(*s);
                if let Some(v) = rhs.var() {
                    out.push(v);
                }
            }
            Constraint::Conj(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
            Constraint::Neg(c) => c.collect_vars(out),
            Constraint::Impl(p, q) => {
                p.collect_vars(out);
                q.collect_vars(out);
            }
        }
    }

    /// Evaluate under a valuation binding at least the whole scope.
    pub fn satisfied(&self, theta: &Valuation) -> bool {
        match self {
            Constraint::True => true,
            Constraint::AtomC(a) => theta.satisfies_atom(a),
            Constraint::Table { vars, tuples } => tuples.iter().any(|t| {
                vars.iter().zip(t).all(|(v, val)| theta.get(*v) == Some(val))
            }),
            Constraint::LinearEq { terms, rhs } => {
                terms.iter().map(|&(a, v)| a as i64 * theta.int(v) as i64).sum::<i64>()
                    == *rhs as i64
            }
            Constraint::LinearLeq { terms, rhs } => {
                terms.iter().map(|&(a, v)| a as i64 * theta.int(v) as i64).sum::<i64>()
                    <= *rhs as i64
            }
            Constraint::Diseq { x, y, offset } => theta.int(*x) != theta.int(*y) + offset,
            Constraint::AbsDiff { u, x, y } => {
                theta.int(*u) == (theta.int(*x) - theta.int(*y)).abs()
            }
            Constraint::ReifSumEq { value, items, rhs } => {
                let sum: i64 = items
                    .iter()
                    .map(|&(v, w)| if theta.int(v) == *value { w as i64 } else { 0 })
                    .sum();
                sum == rhs.value(theta) as i64
            }
            Constraint::OffsetBiImpl { x, a, y, b } => {
                (theta.int(*x) == *a) == (theta.int(*y) == *b)
            }
            Constraint::AllDifferent(vs) => {
                let mut seen: Vec<i32> = vs.iter().map(|&v| theta.int(v)).collect();
                seen.sort_unstable();
                seen.windows(2).all(|w| w[0] != w[1])
            }
            Constraint::MaxEq { m, vars } => {
                let mx = vars.iter().map(|&v| theta.int(v)).max().expect("non-empty max scope");
                theta.int(*m) == mx
            }
            Constraint::SetEmpty(s) => theta.set(*s).is_empty(),
            Constraint::SetSubset { s, t } => theta.set(*s).is_subset(theta.set(*t)),
            Constraint::SetInterEmpty { s, t } => {
                theta.set(*s).intersect(theta.set(*t)).is_empty()
            }
            Constraint::SetOp { op, a, b, c } => {
                let bv = theta.set(*b);
                let cv = theta.set(*c);
                let expect = match op {
                    SetOpKind::Union => bv.union(cv),
                    SetOpKind::Inter => bv.intersect(cv),
                    SetOpKind::Diff => bv.minus(cv),
                };
                theta.set(*a) == &expect
            }
            Constraint::SetCard { s, rhs } => theta.set(*s).len() as i32 == rhs.value(theta),
            Constraint::SetInterCardLeq { s, t, k } => {
                theta.set(*s).intersect(theta.set(*t)).len() as i32 <= *k
            }
            Constraint::SetWeightedSum { s, weights, rhs } => {
                let sum: i64 = theta
                    .set(*s)
                    .iter()
                    .map(|e| weights.iter().find(|&&(el, _)| el == e).map_or(0, |&(_, w)| w) as i64)
                    .sum();
                sum == rhs.value(theta) as i64
            }
            Constraint::Conj(cs) => cs.iter().all(|c| c.satisfied(theta)),
            Constraint::Neg(c) => !c.satisfied(theta),
            Constraint::Impl(p, q) => !p.satisfied(theta) || q.satisfied(theta),
        }
    }

    /// Canonical form: sorted commutative parts, ordered variable pairs.
    /// Structural equality of normalized constraints is the identity used
    /// to deduplicate symmetric postings.
    pub fn normalize(&self) -> Constraint {
        match self {
            Constraint::LinearEq { terms, rhs } => {
                let (t, r) = normalize_terms(terms, *rhs);
                let (t, r) = if t.first().map_or(false, |&(a, _)| a < 0) {
                    (t.into_iter().map(|(a, v)| (-a, v)).collect(), -r)
                } else {
                    (t, r)
                };
                Constraint::LinearEq { terms: t, rhs: r }
            }
            Constraint::LinearLeq { terms, rhs } => {
                let (t, r) = normalize_terms(terms, *rhs);
                Constraint::LinearLeq { terms: t, rhs: r }
            }
            Constraint::Diseq { x, y, offset } => {
                if x.index > y.index {
                    Constraint::Diseq { x: *y, y: *x, offset: -offset }
                } else {
                    self.clone()
                }
            }
            Constraint::OffsetBiImpl { x, a, y, b } => {
                if x.index > y.index {
                    Constraint::OffsetBiImpl { x: *y, a: *b, y: *x, b: *a }
                } else {
                    self.clone()
                }
            }
            Constraint::AllDifferent(vs) => {
                let mut vs = vs.clone();
                vs.sort();
                Constraint::AllDifferent(vs)
            }
            Constraint::MaxEq { m, vars } => {
                let mut vars = vars.clone();
                vars.sort();
                Constraint::MaxEq { m: *m, vars }
            }
            Constraint::SetInterEmpty { s, t } => {
                let (s, t) = if s.index > t.index { (*t, *s) } else { (*s, *t) };
                Constraint::SetInterEmpty { s, t }
            }
            Constraint::SetInterCardLeq { s, t, k } => {
                let (s, t) = if s.index > t.index { (*t, *s) } else { (*s, *t) };
                Constraint::SetInterCardLeq { s, t, k: *k }
            }
            Constraint::ReifSumEq { value, items, rhs } => {
                let mut items = items.clone();
                items.sort();
                Constraint::ReifSumEq { value: *value, items, rhs: *rhs }
            }
            Constraint::SetWeightedSum { s, weights, rhs } => {
                let mut weights = weights.clone();
                weights.sort();
                Constraint::SetWeightedSum { s: *s, weights, rhs: *rhs }
            }
            Constraint::Table { vars, tuples } => {
                // sort columns by variable, permuting tuples accordingly
                let mut order: Vec<usize> = (0..vars.len()).collect();
                order.sort_by_key(|&i| vars[i]);
                let vars2: Vec<VarId> = order.iter().map(|&i| vars[i]).collect();
                let mut tuples2: Vec<Vec<Value>> = tuples
                    .iter()
                    .map(|t| order.iter().map(|&i| t[i].clone()).collect())
                    .collect();
                tuples2.sort();
                tuples2.dedup();
                Constraint::Table { vars: vars2, tuples: tuples2 }
            }
            Constraint::Conj(cs) => {
                let mut flat = Vec::new();
                for c in cs {
                    match c.normalize() {
                        Constraint::Conj(inner) => flat.extend(inner),
                        Constraint::True => {}
                        other => flat.push(other),
                    }
                }
                flat.sort();
                flat.dedup();
                match flat.len() {
                    0 => Constraint::True,
                    1 => flat.pop().unwrap(),
                    _ => Constraint::Conj(flat),
                }
            }
            Constraint::Neg(c) => Constraint::Neg(Box::new(c.normalize())),
            Constraint::Impl(p, q) => {
                Constraint::Impl(Box::new(p.normalize()), Box::new(q.normalize()))
            }
            other => other.clone(),
        }
    }
}

fn normalize_terms(terms: &[(i32, VarId)], rhs: i32) -> (Vec<(i32, VarId)>, i32) {
    let mut merged: Vec<(i32, VarId)> = Vec::new();
    let mut sorted = terms.to_vec();
    sorted.sort_by_key(|&(_, v)| v);
    for (a, v) in sorted {
        if let Some(last) = merged.last_mut() {
            if last.1 == v {
                last.0 += a;
                continue;
            }
        }
        merged.push((a, v));
    }
    merged.retain(|&(a, _)| a != 0);
    (merged, rhs)
}

/// Conjunction of two constraints; solutions are the join of the
/// conjuncts' solutions.
pub fn conjoin(c1: &Constraint, c2: &Constraint) -> Constraint {
    Constraint::Conj(vec![c1.clone(), c2.clone()]).normalize()
}

/// Visit every valuation of `vars` inside `d`. Returns `Ok(false)` when
/// the visitor stopped early.
pub fn for_each_valuation(
    d: &Domain,
    vars: &[VarId],
    cap: u128,
    mut f: impl FnMut(&Valuation) -> bool,
) -> Result<bool> {
    let mut needed: u128 = 1;
    for &v in vars {
        needed = needed.saturating_mul(d.slot(v).count());
    }
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    if needed == 0 {
        return Ok(true); // false domain: nothing to visit
    }
    // Per-variable choice tables.
    enum Choices {
        Int(Vec<i32>),
        Set { lb: IntSet, delta: Vec<i32> },
    }
    let choices: Vec<(VarId, Choices, u128)> = vars
        .iter()
        .map(|&v| match v.kind {
            VarKind::Int => {
                let vals: Vec<i32> = d.int(v).iter().collect();
                let n = vals.len() as u128;
                (v, Choices::Int(vals), n)
            }
            VarKind::Set => {
                let b = d.set(v);
                let delta: Vec<i32> = b.delta().iter().collect();
                let n = 1u128 << delta.len();
                (v, Choices::Set { lb: b.lb.clone(), delta }, n)
            }
        })
        .collect();
    let mut idx = vec![0u128; vars.len()];
    loop {
        let mut theta = Valuation::new();
        for (k, (v, ch, _)) in choices.iter().enumerate() {
            match ch {
                Choices::Int(vals) => theta.bind(*v, Value::Int(vals[idx[k] as usize])),
                Choices::Set { lb, delta } => {
                    let mut a = lb.clone();
                    for (bit, &e) in delta.iter().enumerate() {
                        if idx[k] >> bit & 1 == 1 {
                            a = a.with(e);
                        }
                    }
                    theta.bind(*v, Value::Set(a));
                }
            }
        }
        if !f(&theta) {
            return Ok(false);
        }
        // lexicographic order: last variable advances fastest
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Ok(true);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].2 {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Exactly the solutions of `c` within `d`, over `vars(c)`.
pub fn solutions(c: &Constraint, d: &Domain, cap: u128) -> Result<Vec<Valuation>> {
    let scope = c.scope();
    let mut out = Vec::new();
    for_each_valuation(d, &scope, cap, |theta| {
        if c.satisfied(theta) {
            out.push(theta.clone());
        }
        true
    })?;
    Ok(out)
}

/// Does `pred` hold for every solution of `c` within `d`, enumerating over
/// `scope(c) ∪ extra`?
pub fn all_solutions_satisfy(
    c: &Constraint,
    d: &Domain,
    extra: &[VarId],
    cap: u128,
    mut pred: impl FnMut(&Valuation) -> bool,
) -> Result<bool> {
    let mut vars = c.scope();
    vars.extend(extra.iter().copied());
    vars.sort();
    vars.dedup();
    for_each_valuation(d, &vars, cap, |theta| !c.satisfied(theta) || pred(theta))
}

/// Textual extensional format: a `vars` header then one tuple per line,
/// integers space-separated and sets written `{1,3}`.
pub fn table_to_text(c: &Constraint, name: &dyn Fn(VarId) -> String) -> Result<String> {
    let Constraint::Table { vars, tuples } = c else {
        return Err(Error::Unsupported("not a table constraint".into()));
    };
    let mut s = String::from("vars");
    for v in vars {
        s.push(' ');
        s.push_str(&name(*v));
    }
    s.push('\n');
    for t in tuples {
        let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    Ok(s)
}

/// Parse the textual extensional format back into a table constraint.
pub fn table_from_text(
    text: &str,
    lookup: &dyn Fn(&str) -> Option<VarId>,
) -> Result<Constraint> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty table".into()))?;
    let mut hd = header.split_whitespace();
    if hd.next() != Some("vars") {
        return Err(Error::Parse("missing `vars` header".into()));
    }
    let vars: Vec<VarId> = hd
        .map(|tok| lookup(tok).ok_or_else(|| Error::Parse(format!("unknown variable {tok}"))))
        .collect::<Result<_>>()?;
    let mut tuples = Vec::new();
    for line in lines {
        let mut row = Vec::new();
        for (tok, v) in line.split_whitespace().zip(&vars) {
            let val = if tok.starts_with('{') {
                let inner = tok.trim_start_matches('{').trim_end_matches('}');
                let elems: Vec<i32> = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|e| e.parse().map_err(|_| Error::Parse(format!("bad set {tok}"))))
                        .collect::<Result<_>>()?
                };
                Value::Set(IntSet::from_values(elems))
            } else {
                Value::Int(tok.parse().map_err(|_| Error::Parse(format!("bad int {tok}")))?)
            };
            if matches!((&val, v.kind), (Value::Int(_), VarKind::Set) | (Value::Set(_), VarKind::Int))
            {
                return Err(Error::Parse(format!("kind mismatch in tuple element {tok}")));
            }
            row.push(val);
        }
        if row.len() != vars.len() {
            return Err(Error::Parse("short tuple".into()));
        }
        tuples.push(row);
    }
    Ok(Constraint::Table { vars, tuples }.normalize())
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::VarDomain;

    fn v(i: u32) -> VarId {
        VarId::int(i)
    }

    #[test]
    fn linear_solutions_match_hand_enumeration() {
        // x1 = 3·x2 + 5·x3 over D(x1)={2..7}, D(x2)={0,1,2}, D(x3)={-1..2}
        let d = Domain::new(vec![
            VarDomain::Int(IntSet::range(2, 7)),
            VarDomain::Int(IntSet::range(0, 2)),
            VarDomain::Int(IntSet::range(-1, 2)),
        ]);
        let c = Constraint::LinearEq {
            terms: vec![(1, v(0)), (-3, v(1)), (-5, v(2))],
            rhs: 0,
        };
        let sols = solutions(&c, &d, 1 << 20).unwrap();
        let triples: Vec<(i32, i32, i32)> =
            sols.iter().map(|t| (t.int(v(0)), t.int(v(1)), t.int(v(2)))).collect();
        assert_eq!(triples, vec![(3, 1, 0), (5, 0, 1), (6, 2, 0)]);
    }

    #[test]
    fn true_and_unsat_edges() {
        let d = Domain::new(vec![VarDomain::Int(IntSet::from_values(vec![1, 2]))]);
        assert_eq!(solutions(&Constraint::True, &d, 10).unwrap().len(), 1); // empty scope: one empty valuation
        let c = Constraint::Diseq { x: v(0), y: v(0), offset: 0 };
        assert!(solutions(&c, &d, 10).unwrap().is_empty());
    }

    #[test]
    fn conjoin_solutions_join() {
        let d = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 3)),
            VarDomain::Int(IntSet::range(1, 3)),
        ]);
        let c1 = Constraint::LinearEq { terms: vec![(1, v(1)), (-1, v(0))], rhs: 1 }; // y = x+1
        let c = conjoin(&c1, &Constraint::True);
        assert_eq!(solutions(&c, &d, 100).unwrap(), solutions(&c1, &d, 100).unwrap());
    }

    #[test]
    fn set_table_example() {
        // S ∈ {{1},{2,3}} as an extensional constraint
        let s = VarId::set(0);
        let d = Domain::new(vec![VarDomain::Set(crate::domain::SetBounds::free(
            IntSet::range(1, 3),
        ))]);
        let c = Constraint::Table {
            vars: vec![s],
            tuples: vec![
                vec![Value::Set(IntSet::singleton(1))],
                vec![Value::Set(IntSet::from_values(vec![2, 3]))],
            ],
        };
        assert_eq!(solutions(&c, &d, 100).unwrap().len(), 2);
    }

    #[test]
    fn normalization_dedupes_symmetries() {
        let a = Constraint::Diseq { x: v(3), y: v(1), offset: 2 };
        let b = Constraint::Diseq { x: v(1), y: v(3), offset: -2 };
        assert_eq!(a.normalize(), b.normalize());

        let c1 = Constraint::Conj(vec![a.clone(), Constraint::True, b.clone()]);
        assert_eq!(c1.normalize(), b.normalize());
    }

    #[test]
    fn table_text_round_trip() {
        let s = VarId::set(2);
        let c = Constraint::Table {
            vars: vec![v(0), v(1), s],
            tuples: vec![
                vec![Value::Int(1), Value::Int(2), Value::Set(IntSet::from_values(vec![1, 3]))],
                vec![Value::Int(2), Value::Int(1), Value::Set(IntSet::empty())],
            ],
        }
        .normalize();
        let names = |u: VarId| match u.index {
            0 => "x1".to_string(),
            1 => "x2".to_string(),
            _ => "S1".to_string(),
        };
        let text = table_to_text(&c, &names).unwrap();
        let lookup = |tok: &str| match tok {
            "x1" => Some(v(0)),
            "x2" => Some(v(1)),
            "S1" => Some(s),
            _ => None,
        };
        let back = table_from_text(&text, &lookup).unwrap();
        assert_eq!(back, c);
    }
}
