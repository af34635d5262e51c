//! Propagators: monotone decreasing functions on domains.
//!
//! [`dsb_propagate`] is the reference implementation: it enumerates the
//! solutions of a constraint and projects them back, applying domain
//! consistency to integer variables and set-bounds consistency to set
//! variables. Every specialized propagator built by [`make_propagator`]
//! must be pointwise equal to it (modulo the representation of false
//! domains); the tests sweep small sub-domain lattices to enforce that.

use std::sync::Arc;

use crate::constraint::{Constraint, Rhs};
use crate::domain::{Atom, Domain, IntSet, SetBounds, Value, VarId, VarKind};
use crate::error::{Error, Result};

/// Implementation side of a propagator: a pure, idempotent, monotone
/// decreasing function on domains that narrows only its scope variables.
pub trait Propagate: Send + Sync {
    fn scope(&self) -> &[VarId];
    fn apply(&self, d: &Domain) -> Domain;
}

/// A shareable propagator, optionally tied to the constraint it implements.
#[derive(Clone)]
pub struct Propagator {
    pub constraint: Option<Constraint>,
    imp: Arc<dyn Propagate>,
}

impl Propagator {
    pub fn new(constraint: Option<Constraint>, imp: Arc<dyn Propagate>) -> Propagator {
        Propagator { constraint, imp }
    }

    pub fn scope(&self) -> &[VarId] {
        self.imp.scope()
    }

    pub fn apply(&self, d: &Domain) -> Domain {
        self.imp.apply(d)
    }
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.constraint {
            Some(c) => write!(f, "Propagator({c:?})"),
            None => write!(f, "Propagator(<anon>)"),
        }
    }
}

/// Per-variable projection of a constraint's solution set. Set variables
/// project to a family of sets, which is generally not a range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Int(IntSet),
    SetFamily(Vec<IntSet>),
}

/// Raw solution projection `{θ(v) | θ ∈ D ∧ θ ∈ solns(c)}` per scope
/// variable. This is what the domain propagator computes before set
/// variables are rounded back to ranges.
pub fn dom_projection(c: &Constraint, d: &Domain, cap: u128) -> Result<Vec<(VarId, Projection)>> {
    let scope = c.scope();
    let mut ints: Vec<Vec<i32>> = vec![Vec::new(); scope.len()];
    let mut sets: Vec<Vec<IntSet>> = vec![Vec::new(); scope.len()];
    crate::constraint::for_each_valuation(d, &scope, cap, |theta| {
        if c.satisfied(theta) {
            for (k, &v) in scope.iter().enumerate() {
                match theta.get(v).unwrap() {
                    Value::Int(x) => ints[k].push(*x),
                    Value::Set(a) => sets[k].push(a.clone()),
                }
            }
        }
        true
    })?;
    Ok(scope
        .iter()
        .enumerate()
        .map(|(k, &v)| match v.kind {
            VarKind::Int => (v, Projection::Int(IntSet::from_values(ints[k].clone()))),
            VarKind::Set => {
                let mut fam = sets[k].clone();
                fam.sort();
                fam.dedup();
                (v, Projection::SetFamily(fam))
            }
        })
        .collect())
}

fn falsify(d: &mut Domain, vars: &[VarId]) {
    for &v in vars {
        match v.kind {
            VarKind::Int => {
                d.set_int(v, IntSet::empty());
            }
            VarKind::Set => {
                d.set_bounds(v, SetBounds::new(IntSet::singleton(0), IntSet::empty()));
            }
        }
    }
}

/// The domain and set bounds propagator, by solution enumeration:
/// integer variables get the exact solution projection, set variables get
/// the smallest range containing theirs.
pub fn dsb_propagate(c: &Constraint, d: &Domain, cap: u128) -> Result<Domain> {
    let proj = dom_projection(c, d, cap)?;
    let mut out = d.clone();
    let scope = c.scope();
    for (v, p) in proj {
        match p {
            Projection::Int(s) => {
                if s.is_empty() {
                    falsify(&mut out, &scope);
                    return Ok(out);
                }
                out.set_int(v, s);
            }
            Projection::SetFamily(fam) => {
                if fam.is_empty() {
                    falsify(&mut out, &scope);
                    return Ok(out);
                }
                let mut lb = fam[0].clone();
                let mut ub = fam[0].clone();
                for a in &fam[1..] {
                    lb = lb.intersect(a);
                    ub = ub.union(a);
                }
                out.set_bounds(v, SetBounds::new(lb, ub));
            }
        }
    }
    Ok(out)
}

/// The domain propagator. Integer variables are projected exactly; set
/// variables are kept as ranges (the raw, possibly non-range projection
/// is available through [`dom_projection`]), so on mixed scopes this
/// coincides with [`dsb_propagate`].
pub fn dom_propagate(c: &Constraint, d: &Domain, cap: u128) -> Result<Domain> {
    dsb_propagate(c, d, cap)
}

/// The set bounds propagator; the scope must contain only set variables.
pub fn sb_propagate(c: &Constraint, d: &Domain, cap: u128) -> Result<Domain> {
    if c.scope().iter().any(|v| v.kind != VarKind::Set) {
        return Err(Error::Unsupported(
            "set bounds propagator over non-set variables".into(),
        ));
    }
    dsb_propagate(c, d, cap)
}

// ---------------------------------------------------------------------------
// Reach-set machinery shared by the linear and counting propagators.
// ---------------------------------------------------------------------------

/// Bitset over an integer interval `[lo..lo+width)`.
#[derive(Clone)]
struct BitRow {
    lo: i64,
    width: usize,
    words: Vec<u64>,
}

impl BitRow {
    fn new(lo: i64, hi: i64) -> BitRow {
        let width = (hi - lo + 1).max(1) as usize;
        BitRow { lo, width, words: vec![0; (width + 63) / 64] }
    }

    fn set(&mut self, v: i64) {
        let i = v - self.lo;
        assert!(i >= 0 && (i as usize) < self.width, "sum outside allocated range");
        let i = i as usize;
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, v: i64) -> bool {
        let i = v - self.lo;
        if i < 0 || i as usize >= self.width {
            return false;
        }
        let i = i as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn iter_values<'a>(&'a self) -> impl Iterator<Item = i64> + 'a {
        self.words.iter().enumerate().flat_map(move |(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(self.lo + (i * 64 + b) as i64)
                }
            })
        })
    }

    /// self |= { v + delta : v ∈ other }. Callers allocate ranges so that
    /// nothing ever falls outside; `set` asserts it.
    fn or_shifted(&mut self, other: &BitRow, delta: i64) {
        for v in other.iter_values() {
            self.set(v + delta);
        }
    }

    /// Exists q ∈ other with q + delta ∈ self?
    fn intersects_shifted(&self, other: &BitRow, delta: i64) -> bool {
        other.iter_values().any(|q| self.get(q + delta))
    }
}

/// A cell contributes one of a finite set of integers to a sum; the DP
/// computes, per cell, which contributions take part in a full assignment
/// whose total lies in `targets`. This is exactly domain consistency for
/// separable sum constraints.
fn reach_supported(cells: &[Vec<i64>], targets: &[i64]) -> Option<Vec<Vec<bool>>> {
    if cells.iter().any(|c| c.is_empty()) || targets.is_empty() {
        return None;
    }
    let lo: i64 = cells.iter().map(|c| c.iter().copied().min().unwrap().min(0)).sum::<i64>();
    let hi: i64 = cells.iter().map(|c| c.iter().copied().max().unwrap().max(0)).sum::<i64>();
    assert!(hi - lo < 4_000_000, "sum range too wide for reach DP");
    let n = cells.len();
    let mut fwd: Vec<BitRow> = Vec::with_capacity(n + 1);
    let mut row = BitRow::new(lo, hi);
    row.set(0);
    fwd.push(row);
    for cell in cells {
        let mut next = BitRow::new(lo, hi);
        for &c in cell {
            next.or_shifted(&fwd.last().unwrap(), c);
        }
        fwd.push(next);
    }
    let mut bwd: Vec<BitRow> = vec![BitRow::new(lo, hi); n + 1];
    bwd[n].set(0);
    for i in (0..n).rev() {
        let mut row = BitRow::new(lo, hi);
        for &c in &cells[i] {
            row.or_shifted(&bwd[i + 1], c);
        }
        bwd[i] = row;
    }
    // No full assignment reaches a target: wipeout.
    if !targets.iter().any(|&t| fwd[n].get(t)) {
        return None;
    }
    let tmin = *targets.iter().min().unwrap();
    let tmax = *targets.iter().max().unwrap();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Ti = { t - s : t in targets, s in bwd[i+1] }
        let mut ti = BitRow::new(tmin - hi, tmax - lo);
        let mut neg = BitRow::new(-hi, -lo);
        for s in bwd[i + 1].iter_values() {
            neg.set(-s);
        }
        for &t in targets {
            ti.or_shifted(&neg, t);
        }
        // contribution c is supported iff some prefix sum p has p + c ∈ Ti
        let sup: Vec<bool> = cells[i]
            .iter()
            .map(|&c| ti.intersects_shifted(&fwd[i], c))
            .collect();
        out.push(sup);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Specialized propagators.
// ---------------------------------------------------------------------------

struct NoOpProp {
    scope: Vec<VarId>,
}
impl Propagate for NoOpProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        d.clone()
    }
}

struct FalsifyProp {
    scope: Vec<VarId>,
}
impl Propagate for FalsifyProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        falsify(&mut out, &self.scope);
        out
    }
}

struct AtomProp {
    atom: Atom,
    scope: Vec<VarId>,
}
impl Propagate for AtomProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        d.apply(&self.atom)
    }
}

struct EnumDsbProp {
    c: Constraint,
    scope: Vec<VarId>,
    cap: u128,
}
impl Propagate for EnumDsbProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        // cap was validated against the initial domain at construction;
        // every reachable domain is smaller.
        dsb_propagate(&self.c, d, self.cap).expect("enumeration within validated cap")
    }
}

struct TableProp {
    vars: Vec<VarId>,
    tuples: Vec<Vec<Value>>,
    scope: Vec<VarId>,
}
impl Propagate for TableProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let live: Vec<&Vec<Value>> = self
            .tuples
            .iter()
            .filter(|t| {
                self.vars.iter().zip(t.iter()).all(|(&v, val)| match val {
                    Value::Int(x) => d.int(v).contains(*x),
                    Value::Set(a) => d.set(v).contains(a),
                })
            })
            .collect();
        let mut out = d.clone();
        if live.is_empty() {
            falsify(&mut out, &self.scope);
            return out;
        }
        for (k, &v) in self.vars.iter().enumerate() {
            match v.kind {
                VarKind::Int => {
                    let s: IntSet = live.iter().map(|t| t[k].as_int()).collect();
                    out.set_int(v, s);
                }
                VarKind::Set => {
                    let mut lb = live[0][k].as_set().clone();
                    let mut ub = lb.clone();
                    for t in &live[1..] {
                        lb = lb.intersect(t[k].as_set());
                        ub = ub.union(t[k].as_set());
                    }
                    out.set_bounds(v, SetBounds::new(lb, ub));
                }
            }
        }
        out
    }
}

struct LinearEqProp {
    terms: Vec<(i32, VarId)>,
    rhs: i32,
    scope: Vec<VarId>,
}
impl Propagate for LinearEqProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let cells: Vec<Vec<i64>> = self
            .terms
            .iter()
            .map(|&(a, v)| d.int(v).iter().map(|x| a as i64 * x as i64).collect())
            .collect();
        match reach_supported(&cells, &[self.rhs as i64]) {
            None => falsify(&mut out, &self.scope),
            Some(sup) => {
                for (k, &(_, v)) in self.terms.iter().enumerate() {
                    let vals: Vec<i32> = d
                        .int(v)
                        .iter()
                        .zip(&sup[k])
                        .filter(|&(_, &s)| s)
                        .map(|(x, _)| x)
                        .collect();
                    out.set_int(v, IntSet::from_values(vals));
                }
            }
        }
        out
    }
}

struct LinearLeqProp {
    terms: Vec<(i32, VarId)>,
    rhs: i32,
    scope: Vec<VarId>,
}
impl Propagate for LinearLeqProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let mins: Vec<i64> = self
            .terms
            .iter()
            .map(|&(a, v)| d.int(v).iter().map(|x| a as i64 * x as i64).min().unwrap_or(i64::MAX))
            .collect();
        if mins.iter().any(|&m| m == i64::MAX) {
            falsify(&mut out, &self.scope);
            return out;
        }
        let total: i64 = mins.iter().sum();
        for (k, &(a, v)) in self.terms.iter().enumerate() {
            let budget = self.rhs as i64 - (total - mins[k]);
            let vals: Vec<i32> =
                d.int(v).iter().filter(|&x| a as i64 * x as i64 <= budget).collect();
            out.set_int(v, IntSet::from_values(vals));
        }
        out
    }
}

struct DiseqProp {
    x: VarId,
    y: VarId,
    offset: i32,
    scope: Vec<VarId>,
}
impl Propagate for DiseqProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        // x ≠ y + offset
        let mut out = d.clone();
        if let Some(b) = d.int(self.y).fixed_value() {
            let s = out.int(self.x).without(b + self.offset);
            out.set_int(self.x, s);
        }
        if let Some(a) = d.int(self.x).fixed_value() {
            let s = out.int(self.y).without(a - self.offset);
            out.set_int(self.y, s);
        }
        out
    }
}

struct AbsDiffProp {
    u: VarId,
    x: VarId,
    y: VarId,
    scope: Vec<VarId>,
}
impl Propagate for AbsDiffProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let (du, dx, dy) = (d.int(self.u), d.int(self.x), d.int(self.y));
        let su = du.retain(|w| dx.iter().any(|a| dy.contains(a - w) || dy.contains(a + w)));
        let sx = dx.retain(|a| du.iter().any(|w| dy.contains(a - w) || dy.contains(a + w)));
        let sy = dy.retain(|b| du.iter().any(|w| dx.contains(b + w) || dx.contains(b - w)));
        let mut out = d.clone();
        out.set_int(self.u, su);
        out.set_int(self.x, sx);
        out.set_int(self.y, sy);
        out
    }
}

struct ReifSumProp {
    value: i32,
    items: Vec<(VarId, i32)>,
    rhs: Rhs,
    scope: Vec<VarId>,
}
impl Propagate for ReifSumProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        // indicator cells: contribution w when var = value, 0 otherwise
        let mut cells: Vec<Vec<i64>> = Vec::with_capacity(self.items.len() + 1);
        for &(v, w) in &self.items {
            let dom = d.int(v);
            let mut cell = Vec::new();
            if dom.iter().any(|x| x != self.value) {
                cell.push(0);
            }
            if dom.contains(self.value) {
                cell.push(w as i64);
            }
            cell.sort_unstable();
            cell.dedup();
            cells.push(cell);
        }
        let targets: Vec<i64> = match self.rhs {
            Rhs::Const(c) => vec![c as i64],
            Rhs::Var(q) => {
                cells.push(d.int(q).iter().map(|t| -(t as i64)).collect());
                vec![0]
            }
        };
        match reach_supported(&cells, &targets) {
            None => falsify(&mut out, &self.scope),
            Some(sup) => {
                for (k, &(v, w)) in self.items.iter().enumerate() {
                    let dom = d.int(v);
                    let cell = &cells[k];
                    // which contributions survive
                    let zero_ok = cell
                        .iter()
                        .zip(&sup[k])
                        .any(|(&c, &s)| c == 0 && s);
                    let w_ok = cell
                        .iter()
                        .zip(&sup[k])
                        .any(|(&c, &s)| c == w as i64 && s);
                    let vals: Vec<i32> = dom
                        .iter()
                        .filter(|&x| {
                            if x == self.value {
                                // taking the value contributes w (or 0 when w=0)
                                if w == 0 { zero_ok } else { w_ok }
                            } else {
                                zero_ok
                            }
                        })
                        .collect();
                    out.set_int(v, IntSet::from_values(vals));
                }
                if let Rhs::Var(q) = self.rhs {
                    let cell = cells.last().unwrap();
                    let supq = sup.last().unwrap();
                    let vals: Vec<i32> = cell
                        .iter()
                        .zip(supq)
                        .filter(|&(_, &s)| s)
                        .map(|(&c, _)| (-c) as i32)
                        .collect();
                    out.set_int(q, IntSet::from_values(vals));
                }
            }
        }
        out
    }
}

struct BiImplProp {
    x: VarId,
    a: i32,
    y: VarId,
    b: i32,
    scope: Vec<VarId>,
}
impl Propagate for BiImplProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        // x = a ⇔ y = b
        let mut out = d.clone();
        let dx = d.int(self.x);
        let dy = d.int(self.y);
        if dx.fixed_value() == Some(self.a) {
            let s = out.int(self.y).intersect(&IntSet::singleton(self.b));
            out.set_int(self.y, s);
        } else if !dx.contains(self.a) {
            let s = out.int(self.y).without(self.b);
            out.set_int(self.y, s);
        }
        if dy.fixed_value() == Some(self.b) {
            let s = out.int(self.x).intersect(&IntSet::singleton(self.a));
            out.set_int(self.x, s);
        } else if !dy.contains(self.b) {
            let s = out.int(self.x).without(self.a);
            out.set_int(self.x, s);
        }
        out
    }
}

/// Regin's matching-based filtering; equal to the domain propagator of a
/// single alldifferent constraint.
struct AllDiffProp {
    vars: Vec<VarId>,
    scope: Vec<VarId>,
}

impl AllDiffProp {
    fn filter(&self, d: &Domain) -> Option<Vec<IntSet>> {
        let n = self.vars.len();
        let mut values: Vec<i32> = Vec::new();
        for &v in &self.vars {
            values.extend(d.int(v).iter());
        }
        values.sort_unstable();
        values.dedup();
        let m = values.len();
        if m < n {
            return None;
        }
        let vidx = |x: i32| values.binary_search(&x).unwrap();
        let adj: Vec<Vec<usize>> = self
            .vars
            .iter()
            .map(|&v| d.int(v).iter().map(vidx).collect())
            .collect();

        // Kuhn's augmenting paths: match every variable to a value.
        let mut val_of_var = vec![usize::MAX; n];
        let mut var_of_val = vec![usize::MAX; m];
        fn augment(
            x: usize,
            adj: &[Vec<usize>],
            var_of_val: &mut [usize],
            val_of_var: &mut [usize],
            seen: &mut [bool],
        ) -> bool {
            for &w in &adj[x] {
                if !seen[w] {
                    seen[w] = true;
                    if var_of_val[w] == usize::MAX
                        || augment(var_of_val[w], adj, var_of_val, val_of_var, seen)
                    {
                        var_of_val[w] = x;
                        val_of_var[x] = w;
                        return true;
                    }
                }
            }
            false
        }
        for x in 0..n {
            let mut seen = vec![false; m];
            if !augment(x, &adj, &mut var_of_val, &mut val_of_var, &mut seen) {
                return None;
            }
        }

        // Residual digraph on nodes [vars 0..n) ++ [values n..n+m):
        // matched edge var→value, other edges value→var.
        let total = n + m;
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); total];
        for x in 0..n {
            for &w in &adj[x] {
                if val_of_var[x] == w {
                    succ[x].push(n + w);
                } else {
                    succ[n + w].push(x);
                }
            }
        }
        // Reachability from free values.
        let mut reach = vec![false; total];
        let mut stack: Vec<usize> = (0..m)
            .filter(|&w| var_of_val[w] == usize::MAX)
            .map(|w| n + w)
            .collect();
        for &s in &stack {
            reach[s] = true;
        }
        while let Some(u) = stack.pop() {
            for &v in &succ[u] {
                if !reach[v] {
                    reach[v] = true;
                    stack.push(v);
                }
            }
        }
        // Tarjan SCC.
        let mut index = vec![usize::MAX; total];
        let mut low = vec![0usize; total];
        let mut on = vec![false; total];
        let mut comp = vec![usize::MAX; total];
        let mut st: Vec<usize> = Vec::new();
        let mut counter = 0usize;
        let mut ncomp = 0usize;
        // iterative Tarjan
        enum Frame {
            Enter(usize),
            Resume(usize, usize),
        }
        for root in 0..total {
            if index[root] != usize::MAX {
                continue;
            }
            let mut frames = vec![Frame::Enter(root)];
            while let Some(fr) = frames.pop() {
                match fr {
                    Frame::Enter(u) => {
                        index[u] = counter;
                        low[u] = counter;
                        counter += 1;
                        st.push(u);
                        on[u] = true;
                        frames.push(Frame::Resume(u, 0));
                    }
                    Frame::Resume(u, k) => {
                        if k < succ[u].len() {
                            let w = succ[u][k];
                            frames.push(Frame::Resume(u, k + 1));
                            if index[w] == usize::MAX {
                                frames.push(Frame::Enter(w));
                            } else if on[w] {
                                low[u] = low[u].min(index[w]);
                            }
                        } else {
                            if low[u] == index[u] {
                                loop {
                                    let w = st.pop().unwrap();
                                    on[w] = false;
                                    comp[w] = ncomp;
                                    if w == u {
                                        break;
                                    }
                                }
                                ncomp += 1;
                            }
                            if let Some(Frame::Resume(p, _)) = frames.last() {
                                let p = *p;
                                low[p] = low[p].min(low[u]);
                            }
                        }
                    }
                }
            }
        }

        let mut out = Vec::with_capacity(n);
        for x in 0..n {
            let vals: Vec<i32> = adj[x]
                .iter()
                .filter(|&&w| val_of_var[x] == w || comp[x] == comp[n + w] || reach[n + w])
                .map(|&w| values[w])
                .collect();
            out.push(IntSet::from_values(vals));
        }
        Some(out)
    }
}

impl Propagate for AllDiffProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        if self.vars.iter().any(|&v| d.int(v).is_empty()) {
            falsify(&mut out, &self.scope);
            return out;
        }
        match self.filter(d) {
            None => falsify(&mut out, &self.scope),
            Some(doms) => {
                for (&v, s) in self.vars.iter().zip(doms) {
                    out.set_int(v, s);
                }
            }
        }
        out
    }
}

struct MaxProp {
    m: VarId,
    vars: Vec<VarId>,
    scope: Vec<VarId>,
}
impl Propagate for MaxProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        if self.vars.iter().any(|&v| d.int(v).is_empty()) || d.int(self.m).is_empty() {
            falsify(&mut out, &self.scope);
            return out;
        }
        let mins: Vec<i32> = self.vars.iter().map(|&v| d.int(v).min().unwrap()).collect();
        let floor = *mins.iter().max().unwrap();
        // achievable maxima
        let dm = d.int(self.m).retain(|a| {
            a >= floor && self.vars.iter().any(|&v| d.int(v).contains(a))
        });
        if dm.is_empty() {
            falsify(&mut out, &self.scope);
            return out;
        }
        out.set_int(self.m, dm.clone());
        for (j, &v) in self.vars.iter().enumerate() {
            let others_floor = mins
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &x)| x)
                .max()
                .unwrap_or(i32::MIN);
            let s = d.int(v).retain(|b| {
                dm.iter().any(|a| {
                    a >= b
                        && others_floor <= a
                        && (a == b
                            || self
                                .vars
                                .iter()
                                .enumerate()
                                .any(|(k, &w)| k != j && d.int(w).contains(a)))
                })
            });
            out.set_int(v, s);
        }
        out
    }
}

struct SetEmptyProp {
    s: VarId,
    scope: Vec<VarId>,
}
impl Propagate for SetEmptyProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let b = d.set(self.s);
        out.set_bounds(self.s, SetBounds::new(b.lb.clone(), IntSet::empty()));
        out
    }
}

struct SetSubsetProp {
    s: VarId,
    t: VarId,
    scope: Vec<VarId>,
}
impl Propagate for SetSubsetProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let bs = d.set(self.s);
        let bt = d.set(self.t);
        out.set_bounds(self.s, SetBounds::new(bs.lb.clone(), bs.ub.intersect(&bt.ub)));
        out.set_bounds(self.t, SetBounds::new(bt.lb.union(&bs.lb), bt.ub.clone()));
        out
    }
}

struct SetInterEmptyProp {
    s: VarId,
    t: VarId,
    scope: Vec<VarId>,
}
impl Propagate for SetInterEmptyProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let bs = d.set(self.s);
        let bt = d.set(self.t);
        out.set_bounds(self.s, SetBounds::new(bs.lb.clone(), bs.ub.minus(&bt.lb)));
        out.set_bounds(self.t, SetBounds::new(bt.lb.clone(), bt.ub.minus(&bs.lb)));
        out
    }
}

struct SetCardProp {
    s: VarId,
    rhs: Rhs,
    scope: Vec<VarId>,
}
impl Propagate for SetCardProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let b = d.set(self.s);
        if !b.valid() {
            return out;
        }
        let (nlb, nub) = (b.lb.len() as i32, b.ub.len() as i32);
        let feasible: Vec<i32> = match self.rhs {
            Rhs::Const(c) => vec![c],
            Rhs::Var(q) => d.int(q).iter().collect(),
        }
        .into_iter()
        .filter(|&k| k >= nlb && k <= nub)
        .collect();
        if feasible.is_empty() {
            falsify(&mut out, &self.scope);
            return out;
        }
        if let Rhs::Var(q) = self.rhs {
            out.set_int(q, IntSet::from_values(feasible.clone()));
        }
        let kmin = *feasible.iter().min().unwrap();
        let kmax = *feasible.iter().max().unwrap();
        let mut lb = b.lb.clone();
        let mut ub = b.ub.clone();
        if kmin == nub {
            lb = ub.clone(); // every element forced in
        }
        if kmax == nlb {
            ub = lb.clone(); // every undecided element forced out
        }
        out.set_bounds(self.s, SetBounds::new(lb, ub));
        out
    }
}

struct SetInterCardLeqProp {
    s: VarId,
    t: VarId,
    k: i32,
    scope: Vec<VarId>,
}
impl Propagate for SetInterCardLeqProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let bs = d.set(self.s);
        let bt = d.set(self.t);
        if !bs.valid() || !bt.valid() {
            return out;
        }
        let overlap = bs.lb.intersect(&bt.lb);
        if overlap.len() as i32 > self.k {
            falsify(&mut out, &self.scope);
            return out;
        }
        if overlap.len() as i32 == self.k {
            out.set_bounds(
                self.s,
                SetBounds::new(bs.lb.clone(), bs.ub.minus(&bt.lb.minus(&overlap))),
            );
            out.set_bounds(
                self.t,
                SetBounds::new(bt.lb.clone(), bt.ub.minus(&bs.lb.minus(&overlap))),
            );
        }
        out
    }
}

struct SetWeightedSumProp {
    s: VarId,
    weights: Vec<(i32, i32)>,
    rhs: Rhs,
    scope: Vec<VarId>,
}
impl SetWeightedSumProp {
    fn weight(&self, e: i32) -> i64 {
        self.weights.iter().find(|&&(el, _)| el == e).map_or(0, |&(_, w)| w as i64)
    }
}
impl Propagate for SetWeightedSumProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        let b = d.set(self.s);
        if !b.valid() {
            return out;
        }
        let base: i64 = b.lb.iter().map(|e| self.weight(e)).sum();
        let delta: Vec<i32> = b.delta().iter().collect();
        let mut cells: Vec<Vec<i64>> = delta
            .iter()
            .map(|&e| {
                let mut c = vec![0, self.weight(e)];
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        let targets: Vec<i64> = match self.rhs {
            Rhs::Const(c) => vec![c as i64 - base],
            Rhs::Var(q) => {
                cells.push(d.int(q).iter().map(|t| -(t as i64)).collect());
                vec![-base]
            }
        };
        match reach_supported(&cells, &targets) {
            None => falsify(&mut out, &self.scope),
            Some(sup) => {
                let mut lb = b.lb.clone();
                let mut ub = b.ub.clone();
                for (i, &e) in delta.iter().enumerate() {
                    let w = self.weight(e);
                    let cell = &cells[i];
                    let out_ok =
                        cell.iter().zip(&sup[i]).any(|(&c, &s)| c == 0 && s);
                    let in_ok = cell.iter().zip(&sup[i]).any(|(&c, &s)| c == w && s);
                    if w == 0 {
                        // both choices share the same contribution
                        if !out_ok {
                            falsify(&mut out, &self.scope);
                            return out;
                        }
                        continue;
                    }
                    match (in_ok, out_ok) {
                        (true, true) => {}
                        (true, false) => lb = lb.with(e),
                        (false, true) => ub = ub.without(e),
                        (false, false) => {
                            falsify(&mut out, &self.scope);
                            return out;
                        }
                    }
                }
                out.set_bounds(self.s, SetBounds::new(lb, ub));
                if let Rhs::Var(q) = self.rhs {
                    let cell = cells.last().unwrap();
                    let supq = sup.last().unwrap();
                    let vals: Vec<i32> = cell
                        .iter()
                        .zip(supq)
                        .filter(|&(_, &s)| s)
                        .map(|(&c, _)| (-c) as i32)
                        .collect();
                    out.set_int(q, IntSet::from_values(vals));
                }
            }
        }
        out
    }
}

struct AtomImplProp {
    lhs: Atom,
    rhs: Atom,
    scope: Vec<VarId>,
}
impl Propagate for AtomImplProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        if d.entails(&self.lhs) {
            out.apply_mut(&self.rhs);
        }
        if d.entails(&self.rhs.negation()) {
            out.apply_mut(&self.lhs.negation());
        }
        out
    }
}

/// Build the propagator for a constraint: pointwise equal to
/// [`dsb_propagate`] on every domain below `init`. Structured forms get
/// dedicated filtering; anything else falls back to enumeration, which
/// requires the scope's value-space to fit under `cap`.
pub fn make_propagator(c: &Constraint, init: &Domain, cap: u128) -> Result<Propagator> {
    let scope = c.scope();
    let wrap = |imp: Arc<dyn Propagate>| Propagator::new(Some(c.clone()), imp);
    let prop = match c {
        Constraint::True => wrap(Arc::new(NoOpProp { scope })),
        Constraint::AtomC(a) => wrap(Arc::new(AtomProp { atom: *a, scope })),
        Constraint::Table { vars, tuples } => wrap(Arc::new(TableProp {
            vars: vars.clone(),
            tuples: tuples.clone(),
            scope,
        })),
        Constraint::LinearEq { terms, rhs } => wrap(Arc::new(LinearEqProp {
            terms: terms.clone(),
            rhs: *rhs,
            scope,
        })),
        Constraint::LinearLeq { terms, rhs } => wrap(Arc::new(LinearLeqProp {
            terms: terms.clone(),
            rhs: *rhs,
            scope,
        })),
        Constraint::Diseq { x, y, offset } => {
            if x == y {
                if *offset == 0 {
                    wrap(Arc::new(FalsifyProp { scope }))
                } else {
                    wrap(Arc::new(NoOpProp { scope }))
                }
            } else {
                wrap(Arc::new(DiseqProp { x: *x, y: *y, offset: *offset, scope }))
            }
        }
        Constraint::AbsDiff { u, x, y } => {
            wrap(Arc::new(AbsDiffProp { u: *u, x: *x, y: *y, scope }))
        }
        Constraint::ReifSumEq { value, items, rhs } => wrap(Arc::new(ReifSumProp {
            value: *value,
            items: items.clone(),
            rhs: *rhs,
            scope,
        })),
        Constraint::OffsetBiImpl { x, a, y, b } => {
            wrap(Arc::new(BiImplProp { x: *x, a: *a, y: *y, b: *b, scope }))
        }
        Constraint::AllDifferent(vars) => {
            wrap(Arc::new(AllDiffProp { vars: vars.clone(), scope }))
        }
        Constraint::MaxEq { m, vars } => {
            wrap(Arc::new(MaxProp { m: *m, vars: vars.clone(), scope }))
        }
        Constraint::SetEmpty(s) => wrap(Arc::new(SetEmptyProp { s: *s, scope })),
        Constraint::SetSubset { s, t } => {
            wrap(Arc::new(SetSubsetProp { s: *s, t: *t, scope }))
        }
        Constraint::SetInterEmpty { s, t } => {
            wrap(Arc::new(SetInterEmptyProp { s: *s, t: *t, scope }))
        }
        Constraint::SetCard { s, rhs } => {
            wrap(Arc::new(SetCardProp { s: *s, rhs: *rhs, scope }))
        }
        Constraint::SetInterCardLeq { s, t, k } => {
            wrap(Arc::new(SetInterCardLeqProp { s: *s, t: *t, k: *k, scope }))
        }
        Constraint::SetWeightedSum { s, weights, rhs } => wrap(Arc::new(SetWeightedSumProp {
            s: *s,
            weights: weights.clone(),
            rhs: *rhs,
            scope,
        })),
        Constraint::Impl(p, q) => match (p.as_ref(), q.as_ref()) {
            (Constraint::AtomC(a), Constraint::AtomC(b)) if !a.is_pseudo() && !b.is_pseudo() => {
                wrap(Arc::new(AtomImplProp { lhs: *a, rhs: *b, scope }))
            }
            _ => enum_fallback(c, init, cap)?,
        },
        Constraint::SetOp { .. } | Constraint::Conj(_) | Constraint::Neg(_) => {
            enum_fallback(c, init, cap)?
        }
    };
    Ok(prop)
}

fn enum_fallback(c: &Constraint, init: &Domain, cap: u128) -> Result<Propagator> {
    let scope = c.scope();
    let mut needed: u128 = 1;
    for &v in &scope {
        needed = needed.saturating_mul(init.slot(v).count());
    }
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(Propagator::new(
        Some(c.clone()),
        Arc::new(EnumDsbProp { c: c.clone(), scope, cap }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::VarDomain;
    use crate::lattice;

    fn iv(i: u32) -> VarId {
        VarId::int(i)
    }
    fn sv(i: u32) -> VarId {
        VarId::set(i)
    }

    /// Sweep every subdomain of `init` and insist the specialized
    /// propagator equals enumeration dsb (false domains identified).
    fn assert_equals_dsb(c: &Constraint, init: &Domain) {
        let prop = make_propagator(c, init, 1 << 24).unwrap();
        let vars: Vec<VarId> = init.vars().collect();
        lattice::for_each_subdomain(init, &vars, 1 << 22, |d| {
            let fast = prop.apply(d);
            let slow = dsb_propagate(c, d, 1 << 24).unwrap();
            assert!(
                fast.equal_semantic(&slow),
                "propagator disagrees with dsb for {c:?} at {d:?}\n fast={fast:?}\n slow={slow:?}"
            );
            true
        })
        .unwrap();
    }

    #[test]
    fn dom_reference_values() {
        // x1 = 3x2 + 5x3; projections {3,5,6}, {0,1,2}, {0,1}
        let d = Domain::new(vec![
            VarDomain::Int(IntSet::range(2, 7)),
            VarDomain::Int(IntSet::range(0, 2)),
            VarDomain::Int(IntSet::range(-1, 2)),
        ]);
        let c = Constraint::LinearEq { terms: vec![(1, iv(0)), (-3, iv(1)), (-5, iv(2))], rhs: 0 };
        let out = dom_propagate(&c, &d, 1 << 20).unwrap();
        assert_eq!(out.int(iv(0)), &IntSet::from_values(vec![3, 5, 6]));
        assert_eq!(out.int(iv(1)), &IntSet::from_values(vec![0, 1, 2]));
        assert_eq!(out.int(iv(2)), &IntSet::from_values(vec![0, 1]));
        // already consistent: fixpoint
        assert_eq!(dom_propagate(&c, &out, 1 << 20).unwrap(), out);
    }

    #[test]
    fn sb_reference_values() {
        // S1 ⊆ S2 with D(S1)=[{1}..{1,2,3,4}], D(S2)=[∅..{1,2,3}]
        let d = Domain::new(vec![
            VarDomain::Set(SetBounds::new(IntSet::singleton(1), IntSet::range(1, 4))),
            VarDomain::Set(SetBounds::new(IntSet::empty(), IntSet::range(1, 3))),
        ]);
        let c = Constraint::SetSubset { s: sv(0), t: sv(1) };
        let out = sb_propagate(&c, &d, 1 << 20).unwrap();
        let want = SetBounds::new(IntSet::singleton(1), IntSet::range(1, 3));
        assert_eq!(out.set(sv(0)), &want);
        assert_eq!(out.set(sv(1)), &want);
    }

    #[test]
    fn dsb_cardinality_no_propagation() {
        // |S| = x with D(x)={2}, D(S)=[∅..{1,5,8}]: dom projects the three
        // 2-subsets, the set bounds round back to the original range.
        let d = Domain::new(vec![
            VarDomain::Int(IntSet::singleton(2)),
            VarDomain::Set(SetBounds::free(IntSet::from_values(vec![1, 5, 8]))),
        ]);
        let c = Constraint::SetCard { s: sv(1), rhs: Rhs::Var(iv(0)) };
        let proj = dom_projection(&c, &d, 1 << 20).unwrap();
        let fam = proj
            .iter()
            .find_map(|(v, p)| if *v == sv(1) { Some(p.clone()) } else { None })
            .unwrap();
        assert_eq!(
            fam,
            Projection::SetFamily(vec![
                IntSet::from_values(vec![1, 5]),
                IntSet::from_values(vec![1, 8]),
                IntSet::from_values(vec![5, 8]),
            ])
        );
        let out = dsb_propagate(&c, &d, 1 << 20).unwrap();
        assert_eq!(out, d);
        // but an empty upper bound determines x
        let d2 = Domain::new(vec![
            VarDomain::Int(IntSet::from_values(vec![0, 1])),
            VarDomain::Set(SetBounds::free(IntSet::empty())),
        ]);
        let out2 = dsb_propagate(&c, &d2, 1 << 20).unwrap();
        assert_eq!(out2.int(iv(0)), &IntSet::singleton(0));
    }

    #[test]
    fn unsat_set_membership_conjunction() {
        // S ∈ {{1},{2,3}} and S ∈ {{2},{1,3}}: individually at fixpoint,
        // conjunction false.
        let s = sv(0);
        let d = Domain::new(vec![VarDomain::Set(SetBounds::free(IntSet::range(1, 3)))]);
        let t1 = Constraint::Table {
            vars: vec![s],
            tuples: vec![
                vec![Value::Set(IntSet::singleton(1))],
                vec![Value::Set(IntSet::from_values(vec![2, 3]))],
            ],
        };
        let t2 = Constraint::Table {
            vars: vec![s],
            tuples: vec![
                vec![Value::Set(IntSet::singleton(2))],
                vec![Value::Set(IntSet::from_values(vec![1, 3]))],
            ],
        };
        assert_eq!(dsb_propagate(&t1, &d, 1 << 20).unwrap(), d);
        assert_eq!(dsb_propagate(&t2, &d, 1 << 20).unwrap(), d);
        let both = crate::constraint::conjoin(&t1, &t2);
        assert!(dsb_propagate(&both, &d, 1 << 20).unwrap().is_false());
    }

    #[test]
    fn subset_cardinality_blind_spot() {
        // S1 ⊆ S2, |S1|=2, |S2|=1 over {1,2,3}: each propagator alone is
        // at fixpoint even though the conjunction is unsatisfiable.
        let d = Domain::new(vec![
            VarDomain::Set(SetBounds::free(IntSet::range(1, 3))),
            VarDomain::Set(SetBounds::free(IntSet::range(1, 3))),
        ]);
        let cs = [
            Constraint::SetSubset { s: sv(0), t: sv(1) },
            Constraint::SetCard { s: sv(0), rhs: Rhs::Const(2) },
            Constraint::SetCard { s: sv(1), rhs: Rhs::Const(1) },
        ];
        for c in &cs {
            assert_eq!(dsb_propagate(c, &d, 1 << 20).unwrap(), d, "{c:?} should not propagate");
        }
    }

    #[test]
    fn specialized_props_equal_dsb_small_sweeps() {
        let init2 = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 4)),
            VarDomain::Int(IntSet::range(1, 4)),
        ]);
        assert_equals_dsb(&Constraint::Diseq { x: iv(0), y: iv(1), offset: 1 }, &init2);
        assert_equals_dsb(
            &Constraint::LinearEq { terms: vec![(1, iv(0)), (-1, iv(1))], rhs: 2 },
            &init2,
        );
        assert_equals_dsb(
            &Constraint::LinearLeq { terms: vec![(1, iv(0)), (1, iv(1))], rhs: 4 },
            &init2,
        );
        assert_equals_dsb(&Constraint::OffsetBiImpl { x: iv(0), a: 2, y: iv(1), b: 3 }, &init2);

        let init3 = Domain::new(vec![
            VarDomain::Int(IntSet::range(0, 3)),
            VarDomain::Int(IntSet::range(1, 3)),
            VarDomain::Int(IntSet::range(1, 3)),
        ]);
        assert_equals_dsb(&Constraint::AbsDiff { u: iv(0), x: iv(1), y: iv(2) }, &init3);
        assert_equals_dsb(&Constraint::MaxEq { m: iv(0), vars: vec![iv(1), iv(2)] }, &init3);
        assert_equals_dsb(
            &Constraint::ReifSumEq {
                value: 2,
                items: vec![(iv(1), 1), (iv(2), 1)],
                rhs: Rhs::Var(iv(0)),
            },
            &init3,
        );
        assert_equals_dsb(
            &Constraint::ReifSumEq {
                value: 1,
                items: vec![(iv(1), 2), (iv(2), 3)],
                rhs: Rhs::Const(3),
            },
            &init3,
        );
        assert_equals_dsb(&Constraint::AllDifferent(vec![iv(0), iv(1), iv(2)]), &init3);
    }

    #[test]
    fn specialized_set_props_equal_dsb_small_sweeps() {
        let u2 = IntSet::range(1, 2);
        let init = Domain::new(vec![
            VarDomain::Set(SetBounds::free(u2.clone())),
            VarDomain::Set(SetBounds::free(u2.clone())),
            VarDomain::Int(IntSet::range(0, 2)),
        ]);
        assert_equals_dsb(&Constraint::SetSubset { s: sv(0), t: sv(1) }, &init);
        assert_equals_dsb(&Constraint::SetInterEmpty { s: sv(0), t: sv(1) }, &init);
        assert_equals_dsb(&Constraint::SetInterCardLeq { s: sv(0), t: sv(1), k: 1 }, &init);
        assert_equals_dsb(&Constraint::SetEmpty(sv(0)), &init);
        assert_equals_dsb(&Constraint::SetCard { s: sv(0), rhs: Rhs::Var(iv(2)) }, &init);
        assert_equals_dsb(&Constraint::SetCard { s: sv(1), rhs: Rhs::Const(1) }, &init);
        assert_equals_dsb(
            &Constraint::SetWeightedSum {
                s: sv(0),
                weights: vec![(1, 2), (2, 3)],
                rhs: Rhs::Var(iv(2)),
            },
            &init,
        );
        assert_equals_dsb(
            &Constraint::Impl(
                Box::new(Constraint::AtomC(Atom::InSet(1, sv(0)))),
                Box::new(Constraint::AtomC(Atom::NotInSet(2, sv(1)))),
            ),
            &init,
        );

        let u3 = IntSet::range(1, 3);
        let init3 = Domain::new(vec![
            VarDomain::Set(SetBounds::free(u3.clone())),
            VarDomain::Set(SetBounds::free(u3.clone())),
            VarDomain::Int(IntSet::range(0, 3)),
        ]);
        assert_equals_dsb(&Constraint::SetCard { s: sv(0), rhs: Rhs::Var(iv(2)) }, &init3);
        assert_equals_dsb(&Constraint::SetInterCardLeq { s: sv(0), t: sv(1), k: 1 }, &init3);
        assert_equals_dsb(
            &Constraint::SetWeightedSum {
                s: sv(0),
                weights: vec![(1, 1), (2, 1), (3, 1)],
                rhs: Rhs::Var(iv(2)),
            },
            &init3,
        );
    }

    #[test]
    fn diseq_matches_enumeration_on_all_two_var_domains() {
        // exhaustive comparison against dsb on all 2-var subdomains of size ≤ 4
        let init = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 4)),
            VarDomain::Int(IntSet::range(1, 4)),
        ]);
        assert_equals_dsb(&Constraint::Diseq { x: iv(0), y: iv(1), offset: 0 }, &init);
        assert_equals_dsb(&Constraint::Diseq { x: iv(0), y: iv(1), offset: -2 }, &init);
    }

    #[test]
    fn alldifferent_forces_last_value() {
        let d = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 2)),
            VarDomain::Int(IntSet::range(1, 2)),
            VarDomain::Int(IntSet::range(1, 3)),
        ]);
        let c = Constraint::AllDifferent(vec![iv(0), iv(1), iv(2)]);
        let p = make_propagator(&c, &d, 1 << 20).unwrap();
        let out = p.apply(&d);
        assert_eq!(out.int(iv(2)), &IntSet::singleton(3));
    }

    #[test]
    fn alldifferent_infeasible_wipes_out() {
        let d = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 2)),
            VarDomain::Int(IntSet::range(1, 2)),
            VarDomain::Int(IntSet::range(1, 2)),
        ]);
        let c = Constraint::AllDifferent(vec![iv(0), iv(1), iv(2)]);
        let p = make_propagator(&c, &d, 1 << 20).unwrap();
        assert!(p.apply(&d).is_false());
    }

    #[test]
    fn true_is_identity_and_unsat_diseq_falsifies() {
        let d = Domain::new(vec![VarDomain::Int(IntSet::range(1, 3))]);
        let p = make_propagator(&Constraint::True, &d, 10).unwrap();
        assert_eq!(p.apply(&d), d);
        let c = Constraint::Diseq { x: iv(0), y: iv(0), offset: 0 };
        let p = make_propagator(&c, &d, 10).unwrap();
        assert!(p.apply(&d).is_false());
    }

    #[test]
    fn dsb_is_idempotent_and_monotone_on_random_subdomains() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let init = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 3)),
            VarDomain::Set(SetBounds::free(IntSet::range(1, 2))),
            VarDomain::Int(IntSet::range(1, 3)),
        ]);
        let c = Constraint::SetWeightedSum {
            s: sv(1),
            weights: vec![(1, 1), (2, 2)],
            rhs: Rhs::Var(iv(2)),
        };
        let vars: Vec<VarId> = init.vars().collect();
        for _ in 0..200 {
            let d1 = lattice::random_subdomain(&init, &vars, &mut rng);
            let d2 = lattice::random_subdomain(&init, &vars, &mut rng);
            let f1 = dsb_propagate(&c, &d1, 1 << 20).unwrap();
            assert!(f1.equal_semantic(&dsb_propagate(&c, &f1, 1 << 20).unwrap()));
            let m = d1.meet(&d2);
            let fm = dsb_propagate(&c, &m, 1 << 20).unwrap();
            assert!(fm.stronger_semantic(&f1));
        }
    }

    #[test]
    fn enum_fallback_respects_cap() {
        let init = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 100)),
            VarDomain::Int(IntSet::range(1, 100)),
            VarDomain::Int(IntSet::range(1, 100)),
        ]);
        let c = Constraint::Neg(Box::new(Constraint::Conj(vec![
            Constraint::LinearEq { terms: vec![(1, iv(0)), (-1, iv(1))], rhs: 0 },
            Constraint::LinearEq { terms: vec![(1, iv(1)), (-1, iv(2))], rhs: 0 },
        ])));
        let r = make_propagator(&c, &init, 1000);
        assert!(matches!(r, Err(Error::CapExceeded { .. })));
    }
}
