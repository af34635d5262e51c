//! Channel functions: bijections between the atomic-constraint universes
//! of two viewpoints. A channel induces the rule set
//! `F = { a ↦ ⋄(a), ⋄(a) ↦ a }`, which is the propagator form studied by
//! the redundancy analyzer, and (for the engine) an equivalent fused
//! propagator that plays all those rules to a local fixpoint.

use std::sync::Arc;

use crate::constraint::{Constraint, Rhs, SetOpKind};
use crate::domain::{Atom, Domain, IntSet, VarId, VarKind};
use crate::error::{Error, Result};
use crate::propagate::{Propagate, Propagator};
use crate::rules::{PropRule, RuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// x_i = j ⇔ y_j = i over two n-permutation viewpoints.
    Permutation,
    /// x_i = j ⇔ z_ij = 1 between n integer variables over [1..k] and
    /// n·k Booleans.
    Boolean,
    /// x_i = j ⇔ i ∈ S_j between n integer variables over [1..k] and k
    /// set variables over [∅..{1..n}].
    SetChannel,
    /// j ∈ S_i ⇔ z_ij = 1 between k set variables over [∅..{1..n}] and
    /// k·n Booleans.
    SetToBool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restrictiveness {
    Restrictive,
    Unrestrictive,
}

/// A channel function between the atom universes of two variable groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelFunction {
    pub kind: ChannelKind,
    /// First-viewpoint variables (layout depends on `kind`).
    pub x_vars: Vec<VarId>,
    /// Second-viewpoint variables (row-major for the Boolean layouts).
    pub y_vars: Vec<VarId>,
    n: usize,
    k: usize,
    flipped: bool,
}

impl ChannelFunction {
    pub fn permutation(x_vars: Vec<VarId>, y_vars: Vec<VarId>, init: &Domain) -> Result<Self> {
        let n = x_vars.len();
        if y_vars.len() != n || n == 0 {
            return Err(Error::InvalidParams("permutation channel needs equal sides".into()));
        }
        for &v in x_vars.iter().chain(&y_vars) {
            if v.kind != VarKind::Int || init.int(v) != &IntSet::range(1, n as i32) {
                return Err(Error::InvalidParams(format!(
                    "permutation channel variable {v:?} must range over 1..{n}"
                )));
            }
        }
        Ok(ChannelFunction { kind: ChannelKind::Permutation, x_vars, y_vars, n, k: n, flipped: false })
    }

    pub fn boolean(x_vars: Vec<VarId>, z_vars: Vec<VarId>, k: usize, init: &Domain) -> Result<Self> {
        let n = x_vars.len();
        if z_vars.len() != n * k || n == 0 || k == 0 {
            return Err(Error::InvalidParams("boolean channel needs n·k Booleans".into()));
        }
        for &v in &x_vars {
            if v.kind != VarKind::Int || init.int(v) != &IntSet::range(1, k as i32) {
                return Err(Error::InvalidParams(format!("{v:?} must range over 1..{k}")));
            }
        }
        for &z in &z_vars {
            if z.kind != VarKind::Int || init.int(z) != &IntSet::range(0, 1) {
                return Err(Error::InvalidParams(format!("{z:?} must be Boolean")));
            }
        }
        Ok(ChannelFunction { kind: ChannelKind::Boolean, x_vars, y_vars: z_vars, n, k, flipped: false })
    }

    pub fn set_channel(x_vars: Vec<VarId>, s_vars: Vec<VarId>, init: &Domain) -> Result<Self> {
        let n = x_vars.len();
        let k = s_vars.len();
        if n == 0 || k == 0 {
            return Err(Error::InvalidParams("set channel needs both sides".into()));
        }
        for &v in &x_vars {
            if v.kind != VarKind::Int || init.int(v) != &IntSet::range(1, k as i32) {
                return Err(Error::InvalidParams(format!("{v:?} must range over 1..{k}")));
            }
        }
        for &s in &s_vars {
            let b = init.set(s);
            if s.kind != VarKind::Set
                || !b.lb.is_empty()
                || b.ub != IntSet::range(1, n as i32)
            {
                return Err(Error::InvalidParams(format!("{s:?} must range over [∅..1..{n}]")));
            }
        }
        Ok(ChannelFunction { kind: ChannelKind::SetChannel, x_vars, y_vars: s_vars, n, k, flipped: false })
    }

    pub fn set_to_bool(s_vars: Vec<VarId>, z_vars: Vec<VarId>, n: usize, init: &Domain) -> Result<Self> {
        let k = s_vars.len();
        if z_vars.len() != k * n || n == 0 || k == 0 {
            return Err(Error::InvalidParams("set2bool channel needs k·n Booleans".into()));
        }
        for &s in &s_vars {
            let b = init.set(s);
            if s.kind != VarKind::Set || !b.lb.is_empty() || b.ub != IntSet::range(1, n as i32) {
                return Err(Error::InvalidParams(format!("{s:?} must range over [∅..1..{n}]")));
            }
        }
        for &z in &z_vars {
            if z.kind != VarKind::Int || init.int(z) != &IntSet::range(0, 1) {
                return Err(Error::InvalidParams(format!("{z:?} must be Boolean")));
            }
        }
        Ok(ChannelFunction { kind: ChannelKind::SetToBool, x_vars: s_vars, y_vars: z_vars, n: k, k: n, flipped: false })
    }

    /// The inverse channel function: sides swapped, same bijection.
    pub fn inverse(&self) -> ChannelFunction {
        let mut ch = self.clone();
        ch.flipped = !ch.flipped;
        ch
    }

    /// Which side (of the possibly inverted function) holds this variable?
    pub fn side_of(&self, v: VarId) -> Option<Side> {
        let raw = if self.x_vars.contains(&v) {
            Some(Side::X)
        } else if self.y_vars.contains(&v) {
            Some(Side::Y)
        } else {
            None
        };
        raw.map(|s| if self.flipped { flip(s) } else { s })
    }

    pub fn covers(&self, v: VarId) -> bool {
        self.side_of(v).is_some()
    }

    fn xpos(&self, v: VarId) -> Option<usize> {
        self.x_vars.iter().position(|&u| u == v)
    }
    fn ypos(&self, v: VarId) -> Option<usize> {
        self.y_vars.iter().position(|&u| u == v)
    }

    fn bad(&self, a: &Atom) -> Error {
        Error::AtomOutOfUniverse(format!("{a}"))
    }

    /// The Boolean variable z_ij for the row-major Boolean layouts
    /// (1-based row i, column j).
    pub fn bool_var(&self, i: usize, j: usize) -> VarId {
        debug_assert!(matches!(self.kind, ChannelKind::Boolean | ChannelKind::SetToBool));
        self.y_vars[(i - 1) * self.k + (j - 1)]
    }

    /// Map an atom to its image on the other side; works in both
    /// directions (the side is determined by the atom's variable).
    pub fn map_atom(&self, a: &Atom) -> Result<Atom> {
        // canonicalize Boolean disequalities to equalities first
        let a = self.canon(a);
        match self.kind {
            ChannelKind::Permutation => match a {
                Atom::IntEq(v, j) | Atom::IntNeq(v, j) => {
                    let (list, to) = if let Some(i) = self.xpos(v) {
                        (i, &self.y_vars)
                    } else if let Some(i) = self.ypos(v) {
                        (i, &self.x_vars)
                    } else {
                        return Err(self.bad(&a));
                    };
                    let i = (list + 1) as i32;
                    if j < 1 || j as usize > self.n {
                        return Err(self.bad(&a));
                    }
                    let img = to[(j - 1) as usize];
                    Ok(match a {
                        Atom::IntEq(..) => Atom::IntEq(img, i),
                        _ => Atom::IntNeq(img, i),
                    })
                }
                _ => Err(self.bad(&a)),
            },
            ChannelKind::Boolean => match a {
                Atom::IntEq(v, j) if self.xpos(v).is_some() => {
                    let i = self.xpos(v).unwrap() + 1;
                    if j < 1 || j as usize > self.k {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::IntEq(self.bool_var(i, j as usize), 1))
                }
                Atom::IntNeq(v, j) if self.xpos(v).is_some() => {
                    let i = self.xpos(v).unwrap() + 1;
                    if j < 1 || j as usize > self.k {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::IntEq(self.bool_var(i, j as usize), 0))
                }
                Atom::IntEq(z, b) if self.ypos(z).is_some() => {
                    let pos = self.ypos(z).unwrap();
                    let (i, j) = (pos / self.k, pos % self.k);
                    let x = self.x_vars[i];
                    match b {
                        1 => Ok(Atom::IntEq(x, (j + 1) as i32)),
                        0 => Ok(Atom::IntNeq(x, (j + 1) as i32)),
                        _ => Err(self.bad(&a)),
                    }
                }
                _ => Err(self.bad(&a)),
            },
            ChannelKind::SetChannel => match a {
                Atom::IntEq(v, j) if self.xpos(v).is_some() => {
                    let i = (self.xpos(v).unwrap() + 1) as i32;
                    if j < 1 || j as usize > self.k {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::InSet(i, self.y_vars[(j - 1) as usize]))
                }
                Atom::IntNeq(v, j) if self.xpos(v).is_some() => {
                    let i = (self.xpos(v).unwrap() + 1) as i32;
                    if j < 1 || j as usize > self.k {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::NotInSet(i, self.y_vars[(j - 1) as usize]))
                }
                Atom::InSet(i, s) if self.ypos(s).is_some() => {
                    let j = (self.ypos(s).unwrap() + 1) as i32;
                    if i < 1 || i as usize > self.n {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::IntEq(self.x_vars[(i - 1) as usize], j))
                }
                Atom::NotInSet(i, s) if self.ypos(s).is_some() => {
                    let j = (self.ypos(s).unwrap() + 1) as i32;
                    if i < 1 || i as usize > self.n {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::IntNeq(self.x_vars[(i - 1) as usize], j))
                }
                _ => Err(self.bad(&a)),
            },
            ChannelKind::SetToBool => match a {
                Atom::InSet(j, s) if self.xpos(s).is_some() => {
                    let i = self.xpos(s).unwrap() + 1;
                    if j < 1 || j as usize > self.k {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::IntEq(self.bool_var(i, j as usize), 1))
                }
                Atom::NotInSet(j, s) if self.xpos(s).is_some() => {
                    let i = self.xpos(s).unwrap() + 1;
                    if j < 1 || j as usize > self.k {
                        return Err(self.bad(&a));
                    }
                    Ok(Atom::IntEq(self.bool_var(i, j as usize), 0))
                }
                Atom::IntEq(z, b) if self.ypos(z).is_some() => {
                    let pos = self.ypos(z).unwrap();
                    let (i, j) = (pos / self.k, pos % self.k);
                    let s = self.x_vars[i];
                    match b {
                        1 => Ok(Atom::InSet((j + 1) as i32, s)),
                        0 => Ok(Atom::NotInSet((j + 1) as i32, s)),
                        _ => Err(self.bad(&a)),
                    }
                }
                _ => Err(self.bad(&a)),
            },
        }
    }

    /// Boolean disequalities are equivalent to equalities on 0/1 domains.
    fn canon(&self, a: &Atom) -> Atom {
        if let Atom::IntNeq(v, b) = *a {
            let on_bool_side = match self.kind {
                ChannelKind::Boolean | ChannelKind::SetToBool => self.ypos(v).is_some(),
                _ => false,
            };
            if on_bool_side && (b == 0 || b == 1) {
                return Atom::IntEq(v, 1 - b);
            }
        }
        *a
    }

    /// The atom universe of the first viewpoint.
    pub fn atoms_x(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        match self.kind {
            ChannelKind::Permutation => {
                for &x in &self.x_vars {
                    for j in 1..=self.n as i32 {
                        out.push(Atom::IntEq(x, j));
                        out.push(Atom::IntNeq(x, j));
                    }
                }
            }
            ChannelKind::Boolean | ChannelKind::SetChannel => {
                for &x in &self.x_vars {
                    for j in 1..=self.k as i32 {
                        out.push(Atom::IntEq(x, j));
                        out.push(Atom::IntNeq(x, j));
                    }
                }
            }
            ChannelKind::SetToBool => {
                for &s in &self.x_vars {
                    for j in 1..=self.k as i32 {
                        out.push(Atom::InSet(j, s));
                        out.push(Atom::NotInSet(j, s));
                    }
                }
            }
        }
        out
    }

    /// The induced rule set `{ a ↦ ⋄(a), ⋄(a) ↦ a | a ∈ A_X }`.
    pub fn propagator_rules(&self) -> RuleSet {
        let mut rules = Vec::new();
        for a in self.atoms_x() {
            let img = self.map_atom(&a).expect("universe atom maps");
            rules.push(PropRule::new(vec![a], img));
            rules.push(PropRule::new(vec![img], a));
        }
        rules.sort();
        rules.dedup();
        RuleSet { rules, source: None, minimal: false }
    }

    /// A fused engine propagator equivalent to the rule set's fixpoint.
    pub fn fused_propagator(&self, init: &Domain) -> Propagator {
        let scope: Vec<VarId> = {
            let mut vs: Vec<VarId> = self.x_vars.iter().chain(&self.y_vars).copied().collect();
            vs.sort();
            vs.dedup();
            vs
        };
        Propagator::new(
            None,
            Arc::new(ChannelProp { ch: self.clone(), init: init.clone(), scope }),
        )
    }

    /// Closed-form restrictiveness per channel kind: is every valuation of
    /// the given side extensible to a solution of the channel constraint?
    pub fn classify_restrictive(&self, side: Side) -> Restrictiveness {
        let side = if self.flipped { flip(side) } else { side };
        use ChannelKind::*;
        use Restrictiveness::*;
        match (self.kind, side) {
            (Permutation, _) => Restrictive,
            (Boolean, Side::X) => Unrestrictive,
            (Boolean, Side::Y) => Restrictive,
            (SetChannel, Side::X) => Unrestrictive,
            (SetChannel, Side::Y) => Restrictive,
            (SetToBool, _) => Unrestrictive,
        }
    }

    /// Brute-force restrictiveness check: enumerate all valuations of the
    /// side and test extensibility through the channel rules.
    pub fn classify_restrictive_brute(
        &self,
        init: &Domain,
        side: Side,
        cap: u128,
    ) -> Result<Restrictiveness> {
        let raw = if self.flipped { flip(side) } else { side };
        let vars = match raw {
            Side::X => self.x_vars.clone(),
            Side::Y => self.y_vars.clone(),
        };
        let rules = self.propagator_rules();
        let mut all_extend = true;
        crate::constraint::for_each_valuation(init, &vars, cap, |theta| {
            let mut d = init.clone();
            for (v, val) in theta.iter() {
                match val {
                    crate::domain::Value::Int(x) => {
                        d.set_int(v, IntSet::singleton(*x));
                    }
                    crate::domain::Value::Set(a) => {
                        d.set_bounds(v, crate::domain::SetBounds::fixed(a.clone()));
                    }
                }
            }
            // with one side fully fixed, the rule fixpoint decides every
            // atom on the other side, so non-false means extensible
            if rules.solv(&d).is_false() {
                all_extend = false;
                return false;
            }
            true
        })?;
        Ok(if all_extend { Restrictiveness::Unrestrictive } else { Restrictiveness::Restrictive })
    }

    /// Map a set constraint over channeled set variables to its Boolean
    /// constraint set (set2bool channels only).
    pub fn bool_decompose(&self, c: &Constraint) -> Result<Vec<Constraint>> {
        if self.kind != ChannelKind::SetToBool {
            return Err(Error::Unsupported("bool_decompose needs a set2bool channel".into()));
        }
        let row = |s: VarId| -> Result<usize> {
            self.xpos(s)
                .map(|i| i + 1)
                .ok_or_else(|| Error::Unsupported(format!("{s:?} not channeled")))
        };
        let univ = 1..=self.k;
        let z = |i: usize, j: usize| self.bool_var(i, j);
        let leq = |terms: Vec<(i32, VarId)>, rhs: i32| Constraint::LinearLeq { terms, rhs };
        match c {
            Constraint::SetEmpty(s) => {
                let i = row(*s)?;
                Ok(univ.map(|j| Constraint::AtomC(Atom::IntEq(z(i, j), 0))).collect())
            }
            Constraint::SetSubset { s, t } => {
                let (a, b) = (row(*s)?, row(*t)?);
                Ok(univ.map(|j| leq(vec![(1, z(a, j)), (-1, z(b, j))], 0)).collect())
            }
            Constraint::SetInterEmpty { s, t } => {
                let (a, b) = (row(*s)?, row(*t)?);
                Ok(univ.map(|j| leq(vec![(1, z(a, j)), (1, z(b, j))], 1)).collect())
            }
            Constraint::SetOp { op, a, b, c } => {
                let (ra, rb, rc) = (row(*a)?, row(*b)?, row(*c)?);
                let mut out = Vec::new();
                for j in univ {
                    match op {
                        SetOpKind::Union => {
                            out.push(leq(vec![(1, z(rb, j)), (-1, z(ra, j))], 0));
                            out.push(leq(vec![(1, z(rc, j)), (-1, z(ra, j))], 0));
                            out.push(leq(vec![(1, z(ra, j)), (-1, z(rb, j)), (-1, z(rc, j))], 0));
                        }
                        SetOpKind::Inter => {
                            out.push(leq(vec![(1, z(ra, j)), (-1, z(rb, j))], 0));
                            out.push(leq(vec![(1, z(ra, j)), (-1, z(rc, j))], 0));
                            out.push(leq(vec![(1, z(rb, j)), (1, z(rc, j)), (-1, z(ra, j))], 1));
                        }
                        SetOpKind::Diff => {
                            out.push(leq(vec![(1, z(ra, j)), (-1, z(rb, j))], 0));
                            out.push(leq(vec![(1, z(ra, j)), (1, z(rc, j))], 1));
                            out.push(leq(vec![(1, z(rb, j)), (-1, z(rc, j)), (-1, z(ra, j))], 0));
                        }
                    }
                }
                Ok(out)
            }
            Constraint::SetCard { s, rhs } => {
                let i = row(*s)?;
                let mut terms: Vec<(i32, VarId)> = (1..=self.k).map(|j| (1, z(i, j))).collect();
                let rhs = match rhs {
                    Rhs::Const(m) => *m,
                    Rhs::Var(x) => {
                        terms.push((-1, *x));
                        0
                    }
                };
                Ok(vec![Constraint::LinearEq { terms, rhs }])
            }
            _ => Err(Error::Unsupported(format!("no Boolean mapping for {c:?}"))),
        }
    }
}

fn flip(s: Side) -> Side {
    match s {
        Side::X => Side::Y,
        Side::Y => Side::X,
    }
}

/// Event-driven equivalent of the channel rule set: every call plays all
/// channel rules to a local fixpoint, which keeps the global fixpoint
/// identical to posting the individual rules.
struct ChannelProp {
    ch: ChannelFunction,
    init: Domain,
    scope: Vec<VarId>,
}

impl ChannelProp {
    fn sweep(&self, d: &mut Domain) -> bool {
        let mut changed = false;
        // first-viewpoint entailments pushed through the bijection
        match self.ch.kind {
            ChannelKind::SetToBool => {
                for &s in &self.ch.x_vars {
                    let b = d.set(s).clone();
                    if !b.valid() {
                        return changed;
                    }
                    for e in b.lb.iter() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::InSet(e, s)).unwrap());
                    }
                    for e in self.init.set(s).ub.minus(&b.ub).iter() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::NotInSet(e, s)).unwrap());
                    }
                }
            }
            _ => {
                for &x in &self.ch.x_vars {
                    let cur = d.int(x).clone();
                    if cur.is_empty() {
                        return changed;
                    }
                    for j in self.init.int(x).minus(&cur).iter() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::IntNeq(x, j)).unwrap());
                    }
                    if let Some(j) = cur.fixed_value() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::IntEq(x, j)).unwrap());
                    }
                }
            }
        }
        // second-viewpoint entailments pulled back
        match self.ch.kind {
            ChannelKind::Permutation => {
                for &y in &self.ch.y_vars {
                    let cur = d.int(y).clone();
                    if cur.is_empty() {
                        return changed;
                    }
                    for j in self.init.int(y).minus(&cur).iter() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::IntNeq(y, j)).unwrap());
                    }
                    if let Some(j) = cur.fixed_value() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::IntEq(y, j)).unwrap());
                    }
                }
            }
            ChannelKind::Boolean | ChannelKind::SetToBool => {
                for &zv in &self.ch.y_vars {
                    if let Some(b) = d.int(zv).fixed_value() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::IntEq(zv, b)).unwrap());
                    } else if d.int(zv).is_empty() {
                        return changed;
                    }
                }
            }
            ChannelKind::SetChannel => {
                for &s in &self.ch.y_vars {
                    let b = d.set(s).clone();
                    if !b.valid() {
                        return changed;
                    }
                    for e in b.lb.iter() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::InSet(e, s)).unwrap());
                    }
                    for e in self.init.set(s).ub.minus(&b.ub).iter() {
                        changed |= d.apply_mut(&self.ch.map_atom(&Atom::NotInSet(e, s)).unwrap());
                    }
                }
            }
        }
        changed
    }
}

impl Propagate for ChannelProp {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }
    fn apply(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        if out.is_false() {
            return out;
        }
        while self.sweep(&mut out) {
            if out.is_false() {
                return out;
            }
        }
        out
    }
}
