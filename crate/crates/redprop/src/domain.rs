//! Variables, domains, valuations and atomic constraints.
//!
//! A [`Domain`] maps every variable either to a finite set of integers
//! (integer variables) or to a set-interval `[lb..ub]` (set variables).
//! Domains form a lattice under [`Domain::meet`] / [`Domain::stronger`];
//! a domain is *false* when some integer variable is empty or some set
//! variable has `lb ⊄ ub`. False domains are ordinary values: propagation
//! and search treat them as absorbing fixpoints, never as errors.
//!
//! Domains are persistent: every slot is behind an `Arc`, so cloning a
//! domain is cheap and narrowing copies only the touched slot. All values
//! here are immutable once built and safe to share across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Variable kind, fixed at creation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Int,
    Set,
}

/// A typed variable handle. `index` is unique within a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub index: u32,
    pub kind: VarKind,
}

impl VarId {
    pub fn int(index: u32) -> VarId {
        VarId { index, kind: VarKind::Int }
    }
    pub fn set(index: u32) -> VarId {
        VarId { index, kind: VarKind::Set }
    }
}

/// A finite set of integers, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IntSet(Vec<i32>);

impl IntSet {
    pub fn empty() -> IntSet {
        IntSet(Vec::new())
    }

    pub fn singleton(d: i32) -> IntSet {
        IntSet(vec![d])
    }

    pub fn range(lo: i32, hi: i32) -> IntSet {
        IntSet((lo..=hi).collect())
    }

    pub fn from_values(mut vals: Vec<i32>) -> IntSet {
        vals.sort_unstable();
        vals.dedup();
        IntSet(vals)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, d: i32) -> bool {
        self.0.binary_search(&d).is_ok()
    }

    pub fn min(&self) -> Option<i32> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<i32> {
        self.0.last().copied()
    }

    /// The single value, if the set has exactly one element.
    pub fn fixed_value(&self) -> Option<i32> {
        if self.0.len() == 1 {
            Some(self.0[0])
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn without(&self, d: i32) -> IntSet {
        IntSet(self.0.iter().copied().filter(|&v| v != d).collect())
    }

    pub fn with(&self, d: i32) -> IntSet {
        if self.contains(d) {
            self.clone()
        } else {
            let mut v = self.0.clone();
            v.push(d);
            v.sort_unstable();
            IntSet(v)
        }
    }

    pub fn retain(&self, mut keep: impl FnMut(i32) -> bool) -> IntSet {
        IntSet(self.0.iter().copied().filter(|&v| keep(v)).collect())
    }

    pub fn intersect(&self, other: &IntSet) -> IntSet {
        IntSet(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        let mut v = self.0.clone();
        v.extend(other.iter());
        IntSet::from_values(v)
    }

    pub fn minus(&self, other: &IntSet) -> IntSet {
        IntSet(self.0.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<i32> for IntSet {
    fn from_iter<T: IntoIterator<Item = i32>>(iter: T) -> Self {
        IntSet::from_values(iter.into_iter().collect())
    }
}

/// A set variable domain: the interval of sets `{A | lb ⊆ A ⊆ ub}`.
/// When `lb ⊄ ub` the interval is empty, which makes the whole domain false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetBounds {
    pub lb: IntSet,
    pub ub: IntSet,
}

impl SetBounds {
    pub fn new(lb: IntSet, ub: IntSet) -> SetBounds {
        SetBounds { lb, ub }
    }

    pub fn free(universe: IntSet) -> SetBounds {
        SetBounds { lb: IntSet::empty(), ub: universe }
    }

    pub fn fixed(a: IntSet) -> SetBounds {
        SetBounds { lb: a.clone(), ub: a }
    }

    pub fn valid(&self) -> bool {
        self.lb.is_subset(&self.ub)
    }

    pub fn is_fixed(&self) -> bool {
        self.valid() && self.lb == self.ub
    }

    /// Elements not yet decided either way.
    pub fn delta(&self) -> IntSet {
        self.ub.minus(&self.lb)
    }

    /// Number of sets in the interval (0 when invalid).
    pub fn count(&self) -> u128 {
        if !self.valid() {
            0
        } else {
            1u128 << self.delta().len().min(127)
        }
    }

    /// Does the interval contain this set?
    pub fn contains(&self, a: &IntSet) -> bool {
        self.lb.is_subset(a) && a.is_subset(&self.ub)
    }

    /// Range containment: every member of `self` is a member of `other`.
    pub fn within(&self, other: &SetBounds) -> bool {
        if !self.valid() {
            return true;
        }
        other.lb.is_subset(&self.lb) && self.ub.is_subset(&other.ub)
    }
}

impl fmt::Display for SetBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}..{}]", self.lb, self.ub)
    }
}

/// Domain of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarDomain {
    Int(IntSet),
    Set(SetBounds),
}

impl VarDomain {
    pub fn kind(&self) -> VarKind {
        match self {
            VarDomain::Int(_) => VarKind::Int,
            VarDomain::Set(_) => VarKind::Set,
        }
    }

    pub fn as_int(&self) -> &IntSet {
        match self {
            VarDomain::Int(s) => s,
            VarDomain::Set(_) => panic!("integer domain requested for a set variable"),
        }
    }

    pub fn as_set(&self) -> &SetBounds {
        match self {
            VarDomain::Set(b) => b,
            VarDomain::Int(_) => panic!("set domain requested for an integer variable"),
        }
    }

    /// Number of values the variable can still take.
    pub fn count(&self) -> u128 {
        match self {
            VarDomain::Int(s) => s.len() as u128,
            VarDomain::Set(b) => b.count(),
        }
    }

    pub fn is_fixed(&self) -> bool {
        match self {
            VarDomain::Int(s) => s.len() == 1,
            VarDomain::Set(b) => b.is_fixed(),
        }
    }
}

/// A complete mapping from variables to finite value sets.
#[derive(Debug, Clone)]
pub struct Domain {
    slots: Vec<Arc<VarDomain>>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.slots.len() == other.slots.len()
            && self
                .slots
                .iter()
                .zip(&other.slots)
                .all(|(a, b)| Arc::ptr_eq(a, b) || a == b)
    }
}
impl Eq for Domain {}

impl Domain {
    pub fn new(slots: Vec<VarDomain>) -> Domain {
        Domain { slots: slots.into_iter().map(Arc::new).collect() }
    }

    pub fn var_count(&self) -> usize {
        self.slots.len()
    }

    /// All variables of the universe, in index order.
    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, s)| VarId { index: i as u32, kind: s.kind() })
    }

    pub fn slot(&self, v: VarId) -> &VarDomain {
        let s = &self.slots[v.index as usize];
        debug_assert_eq!(s.kind(), v.kind, "variable kind mismatch");
        s
    }

    pub fn int(&self, v: VarId) -> &IntSet {
        self.slot(v).as_int()
    }

    pub fn set(&self, v: VarId) -> &SetBounds {
        self.slot(v).as_set()
    }

    /// Cheap change detection between two domains that share history.
    pub fn same_slot(&self, other: &Domain, v: VarId) -> bool {
        let a = &self.slots[v.index as usize];
        let b = &other.slots[v.index as usize];
        Arc::ptr_eq(a, b) || a == b
    }

    /// Replace an integer slot; returns true when the value actually changed.
    pub fn set_int(&mut self, v: VarId, s: IntSet) -> bool {
        debug_assert_eq!(v.kind, VarKind::Int);
        if self.int(v) == &s {
            return false;
        }
        self.slots[v.index as usize] = Arc::new(VarDomain::Int(s));
        true
    }

    /// Replace a set slot; returns true when the value actually changed.
    pub fn set_bounds(&mut self, v: VarId, b: SetBounds) -> bool {
        debug_assert_eq!(v.kind, VarKind::Set);
        if self.set(v) == &b {
            return false;
        }
        self.slots[v.index as usize] = Arc::new(VarDomain::Set(b));
        true
    }

    pub fn is_false(&self) -> bool {
        self.slots.iter().any(|s| match s.as_ref() {
            VarDomain::Int(d) => d.is_empty(),
            VarDomain::Set(b) => !b.valid(),
        })
    }

    pub fn is_singleton(&self) -> bool {
        self.slots.iter().all(|s| s.is_fixed())
    }

    /// Pointwise intersection `D1 ⊓ D2` (for sets: `(lb1 ∪ lb2, ub1 ∩ ub2)`).
    pub fn meet(&self, other: &Domain) -> Domain {
        assert_eq!(self.var_count(), other.var_count(), "different variable universes");
        let mut out = self.clone();
        for v in self.vars() {
            match (self.slot(v), other.slot(v)) {
                (VarDomain::Int(a), VarDomain::Int(b)) => {
                    out.set_int(v, a.intersect(b));
                }
                (VarDomain::Set(a), VarDomain::Set(b)) => {
                    out.set_bounds(v, SetBounds::new(a.lb.union(&b.lb), a.ub.intersect(&b.ub)));
                }
                _ => panic!("variable kind mismatch in meet"),
            }
        }
        out
    }

    /// Pointwise order `D1 ⊑ D2`: every variable's value set is contained.
    pub fn stronger(&self, other: &Domain) -> bool {
        assert_eq!(self.var_count(), other.var_count(), "different variable universes");
        self.vars().all(|v| match (self.slot(v), other.slot(v)) {
            (VarDomain::Int(a), VarDomain::Int(b)) => a.is_subset(b),
            (VarDomain::Set(a), VarDomain::Set(b)) => a.within(b),
            _ => panic!("variable kind mismatch in stronger"),
        })
    }

    /// Semantic order: false domains are interchangeable bottoms.
    pub fn stronger_semantic(&self, other: &Domain) -> bool {
        if self.is_false() {
            return true;
        }
        if other.is_false() {
            return false;
        }
        self.stronger(other)
    }

    /// Semantic equality: all false domains are identified.
    pub fn equal_semantic(&self, other: &Domain) -> bool {
        match (self.is_false(), other.is_false()) {
            (true, true) => true,
            (false, false) => self == other,
            _ => false,
        }
    }

    /// Does every valuation in the domain satisfy the atom?
    pub fn entails(&self, a: &Atom) -> bool {
        match *a {
            Atom::IntEq(v, d) => self.int(v).fixed_value() == Some(d),
            Atom::IntNeq(v, d) => !self.int(v).contains(d),
            Atom::InSet(d, v) => self.set(v).lb.contains(d),
            Atom::NotInSet(d, v) => !self.set(v).ub.contains(d),
            Atom::IntLeq(v, d) => self.int(v).max().map_or(true, |m| m <= d),
            Atom::IntGeq(v, d) => self.int(v).min().map_or(true, |m| m >= d),
        }
    }

    /// Strongest domain below `self` entailing the atom; only the atom's
    /// variable changes. May produce a false domain.
    pub fn apply(&self, a: &Atom) -> Domain {
        let mut out = self.clone();
        out.apply_mut(a);
        out
    }

    /// In-place [`Domain::apply`]; returns true when something changed.
    pub fn apply_mut(&mut self, a: &Atom) -> bool {
        match *a {
            Atom::IntEq(v, d) => {
                let s = if self.int(v).contains(d) { IntSet::singleton(d) } else { IntSet::empty() };
                self.set_int(v, s)
            }
            Atom::IntNeq(v, d) => {
                let s = self.int(v).without(d);
                self.set_int(v, s)
            }
            Atom::InSet(d, v) => {
                let b = self.set(v);
                let nb = SetBounds::new(b.lb.with(d), b.ub.clone());
                self.set_bounds(v, nb)
            }
            Atom::NotInSet(d, v) => {
                let b = self.set(v);
                let nb = SetBounds::new(b.lb.clone(), b.ub.without(d));
                self.set_bounds(v, nb)
            }
            Atom::IntLeq(v, d) => {
                let s = self.int(v).retain(|x| x <= d);
                self.set_int(v, s)
            }
            Atom::IntGeq(v, d) => {
                let s = self.int(v).retain(|x| x >= d);
                self.set_int(v, s)
            }
        }
    }

    /// Apply a conjunction of atoms.
    pub fn apply_all<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Domain {
        let mut out = self.clone();
        for a in atoms {
            out.apply_mut(a);
        }
        out
    }

    /// Does every valuation in the domain satisfy the whole conjunction?
    pub fn entails_all<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
        atoms.into_iter().all(|a| self.entails(a))
    }
}

/// A concrete value for one variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i32),
    Set(IntSet),
}

impl Value {
    pub fn as_int(&self) -> i32 {
        match self {
            Value::Int(d) => *d,
            Value::Set(_) => panic!("integer value requested for a set"),
        }
    }

    pub fn as_set(&self) -> &IntSet {
        match self {
            Value::Set(a) => a,
            Value::Int(_) => panic!("set value requested for an integer"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(d) => write!(f, "{d}"),
            Value::Set(a) => write!(f, "{a}"),
        }
    }
}

/// A partial assignment of variables to values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Valuation(BTreeMap<VarId, Value>);

impl Valuation {
    pub fn new() -> Valuation {
        Valuation(BTreeMap::new())
    }

    pub fn bind(&mut self, v: VarId, val: Value) {
        debug_assert!(matches!(
            (&val, v.kind),
            (Value::Int(_), VarKind::Int) | (Value::Set(_), VarKind::Set)
        ));
        self.0.insert(v, val);
    }

    pub fn get(&self, v: VarId) -> Option<&Value> {
        self.0.get(&v)
    }

    pub fn int(&self, v: VarId) -> i32 {
        self.0[&v].as_int()
    }

    pub fn set(&self, v: VarId) -> &IntSet {
        self.0[&v].as_set()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Value)> + '_ {
        self.0.iter().map(|(v, val)| (*v, val))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// θ ∈ D for the variables bound by θ.
    pub fn in_domain(&self, d: &Domain) -> bool {
        self.0.iter().all(|(v, val)| match val {
            Value::Int(x) => d.int(*v).contains(*x),
            Value::Set(a) => d.set(*v).contains(a),
        })
    }

    pub fn satisfies_atom(&self, a: &Atom) -> bool {
        match *a {
            Atom::IntEq(v, d) => self.int(v) == d,
            Atom::IntNeq(v, d) => self.int(v) != d,
            Atom::InSet(d, v) => self.set(v).contains(d),
            Atom::NotInSet(d, v) => !self.set(v).contains(d),
            Atom::IntLeq(v, d) => self.int(v) <= d,
            Atom::IntGeq(v, d) => self.int(v) >= d,
        }
    }
}

/// An atomic constraint: the basic unit of domain change.
///
/// The four primitive forms are `x=d`, `x≠d`, `d∈S`, `d∉S`. The pseudo
/// forms `x≤d` / `x≥d` are macros over conjunctions of `x≠d` atoms
/// relative to an initial domain; [`Atom::expand_pseudo`] unfolds them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    IntEq(VarId, i32),
    IntNeq(VarId, i32),
    InSet(i32, VarId),
    NotInSet(i32, VarId),
    IntLeq(VarId, i32),
    IntGeq(VarId, i32),
}

impl Atom {
    pub fn var(&self) -> VarId {
        match *self {
            Atom::IntEq(v, _)
            | Atom::IntNeq(v, _)
            | Atom::IntLeq(v, _)
            | Atom::IntGeq(v, _) => v,
            Atom::InSet(_, v) | Atom::NotInSet(_, v) => v,
        }
    }

    pub fn is_pseudo(&self) -> bool {
        matches!(self, Atom::IntLeq(..) | Atom::IntGeq(..))
    }

    /// Logical negation. For pseudo atoms the negation is the complementary
    /// bound; primitive forms negate to primitive forms.
    pub fn negation(&self) -> Atom {
        match *self {
            Atom::IntEq(v, d) => Atom::IntNeq(v, d),
            Atom::IntNeq(v, d) => Atom::IntEq(v, d),
            Atom::InSet(d, v) => Atom::NotInSet(d, v),
            Atom::NotInSet(d, v) => Atom::InSet(d, v),
            Atom::IntLeq(v, d) => Atom::IntGeq(v, d + 1),
            Atom::IntGeq(v, d) => Atom::IntLeq(v, d - 1),
        }
    }

    /// Unfold a pseudo atom into the equivalent `x≠d` conjunction
    /// relative to `init`.
    pub fn expand_pseudo(&self, init: &Domain) -> Result<Vec<Atom>> {
        match *self {
            Atom::IntLeq(v, d) => {
                Ok(init.int(v).iter().filter(|&e| e > d).map(|e| Atom::IntNeq(v, e)).collect())
            }
            Atom::IntGeq(v, d) => {
                Ok(init.int(v).iter().filter(|&e| e < d).map(|e| Atom::IntNeq(v, e)).collect())
            }
            a => Err(Error::NotPseudo(format!("{a:?}"))),
        }
    }

    /// Expand pseudo forms, pass primitives through.
    pub fn expand_or_self(&self, init: &Domain) -> Vec<Atom> {
        if self.is_pseudo() {
            self.expand_pseudo(init).expect("pseudo atom")
        } else {
            vec![*self]
        }
    }

    /// Render with caller-provided variable names (`x1=2`, `3 in S1`, ...).
    pub fn display_with(&self, name: &dyn Fn(VarId) -> String) -> String {
        match *self {
            Atom::IntEq(v, d) => format!("{}={}", name(v), d),
            Atom::IntNeq(v, d) => format!("{}!={}", name(v), d),
            Atom::InSet(d, v) => format!("{} in {}", d, name(v)),
            Atom::NotInSet(d, v) => format!("{} notin {}", d, name(v)),
            Atom::IntLeq(v, d) => format!("{}<={}", name(v), d),
            Atom::IntGeq(v, d) => format!("{}>={}", name(v), d),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: VarId| match v.kind {
            VarKind::Int => format!("v{}", v.index),
            VarKind::Set => format!("S{}", v.index),
        };
        write!(f, "{}", self.display_with(&name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d2(x: &[i32], y: &[i32]) -> Domain {
        Domain::new(vec![
            VarDomain::Int(IntSet::from_values(x.to_vec())),
            VarDomain::Int(IntSet::from_values(y.to_vec())),
        ])
    }

    #[test]
    fn meet_is_pointwise_intersection() {
        let a = d2(&[1, 2, 3], &[1]);
        let b = d2(&[2, 3, 4], &[1]);
        let m = a.meet(&b);
        assert_eq!(m.int(VarId::int(0)), &IntSet::from_values(vec![2, 3]));
        assert_eq!(a.meet(&a), a);
        let c = d2(&[1], &[1]);
        let d = d2(&[2], &[1]);
        assert!(c.meet(&d).is_false());
    }

    #[test]
    fn meet_on_set_bounds() {
        let a = Domain::new(vec![VarDomain::Set(SetBounds::new(
            IntSet::singleton(1),
            IntSet::from_values(vec![1, 2, 3, 4]),
        ))]);
        let b = Domain::new(vec![VarDomain::Set(SetBounds::new(
            IntSet::empty(),
            IntSet::from_values(vec![1, 2, 3]),
        ))]);
        let m = a.meet(&b);
        let sb = m.set(VarId::set(0));
        assert_eq!(sb.lb, IntSet::singleton(1));
        assert_eq!(sb.ub, IntSet::from_values(vec![1, 2, 3]));
    }

    #[test]
    fn stronger_is_reflexive_and_checks_ranges() {
        let a = d2(&[2], &[1, 2]);
        let b = d2(&[1, 2, 3], &[1, 2]);
        assert!(a.stronger(&b));
        assert!(!b.stronger(&a));
        assert!(a.stronger(&a));

        let s1 = Domain::new(vec![VarDomain::Set(SetBounds::new(
            IntSet::singleton(1),
            IntSet::from_values(vec![1, 2]),
        ))]);
        let s2 = Domain::new(vec![VarDomain::Set(SetBounds::new(
            IntSet::empty(),
            IntSet::from_values(vec![1, 2, 3]),
        ))]);
        assert!(s1.stronger(&s2));
        assert!(!s2.stronger(&s1));
    }

    #[test]
    fn entails_atom_forms() {
        let x = VarId::int(0);
        let d = Domain::new(vec![VarDomain::Int(IntSet::singleton(3))]);
        assert!(d.entails(&Atom::IntEq(x, 3)));

        let d = Domain::new(vec![VarDomain::Int(IntSet::from_values(vec![1, 2]))]);
        assert!(d.entails(&Atom::IntNeq(x, 3)));
        assert!(!d.entails(&Atom::IntEq(x, 1)));

        let s = VarId::set(0);
        let d = Domain::new(vec![VarDomain::Set(SetBounds::new(
            IntSet::singleton(1),
            IntSet::from_values(vec![1, 2]),
        ))]);
        assert!(d.entails(&Atom::InSet(1, s)));
        assert!(!d.entails(&Atom::InSet(2, s)));
        assert!(d.entails(&Atom::NotInSet(3, s)));
    }

    #[test]
    fn apply_atom_narrows_one_variable() {
        let x = VarId::int(0);
        let d = Domain::new(vec![VarDomain::Int(IntSet::from_values(vec![1, 2, 3]))]);
        let d2 = d.apply(&Atom::IntNeq(x, 2));
        assert_eq!(d2.int(x), &IntSet::from_values(vec![1, 3]));
        assert!(d2.entails(&Atom::IntNeq(x, 2)));

        let s = VarId::set(0);
        let d = Domain::new(vec![VarDomain::Set(SetBounds::new(
            IntSet::empty(),
            IntSet::from_values(vec![1, 3]),
        ))]);
        let d2 = d.apply(&Atom::InSet(3, s));
        assert_eq!(d2.set(s).lb, IntSet::singleton(3));
        assert_eq!(d2.set(s).ub, IntSet::from_values(vec![1, 3]));

        let d = Domain::new(vec![VarDomain::Int(IntSet::from_values(vec![1, 2]))]);
        assert!(d.apply(&Atom::IntEq(x, 5)).is_false());
    }

    #[test]
    fn apply_is_meet_with_atom_domain() {
        // apply(D, a) == meet(D, apply(D_top, a)) on the atom's variable.
        let x = VarId::int(0);
        let top = Domain::new(vec![VarDomain::Int(IntSet::range(1, 4))]);
        let d = Domain::new(vec![VarDomain::Int(IntSet::from_values(vec![2, 3]))]);
        let a = Atom::IntNeq(x, 3);
        assert_eq!(d.apply(&a), d.meet(&top.apply(&a)));
    }

    #[test]
    fn expand_pseudo_forms() {
        let x = VarId::int(0);
        let init = Domain::new(vec![VarDomain::Int(IntSet::from_values(vec![1, 2, 3, 4]))]);
        assert_eq!(
            Atom::IntLeq(x, 2).expand_pseudo(&init).unwrap(),
            vec![Atom::IntNeq(x, 3), Atom::IntNeq(x, 4)]
        );
        let init3 = Domain::new(vec![VarDomain::Int(IntSet::from_values(vec![1, 2, 3]))]);
        assert_eq!(Atom::IntGeq(x, 1).expand_pseudo(&init3).unwrap(), vec![]);
        assert_eq!(Atom::IntLeq(x, 3).expand_pseudo(&init3).unwrap(), vec![]);
        assert!(Atom::IntEq(x, 1).expand_pseudo(&init3).is_err());
    }

    #[test]
    fn set_bounds_stay_ranges_or_false() {
        let s = VarId::set(0);
        let d = Domain::new(vec![VarDomain::Set(SetBounds::new(
            IntSet::singleton(1),
            IntSet::from_values(vec![1, 2]),
        ))]);
        // Forcing an element outside ub produces a false domain, not junk.
        let bad = d.apply(&Atom::InSet(5, s));
        assert!(bad.is_false());
        let ok = d.apply(&Atom::NotInSet(2, s));
        assert!(ok.set(s).valid());
    }
}
