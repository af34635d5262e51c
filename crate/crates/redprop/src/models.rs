//! Benchmark model generators: Langford sequences, all-interval series,
//! n-queens, social golfers and balanced curriculum design, each in two
//! viewpoints joined by channels, with the combined/optimized variants
//! used by the redundancy experiments.

use crate::channel::ChannelFunction;
use crate::constraint::{Constraint, Rhs};
use crate::domain::{
    Atom, Domain, IntSet, SetBounds, Valuation, Value, VarDomain, VarId, VarKind,
};
use crate::engine::{Mode, PropagatorSet, SearchConfig, VarOrder};
use crate::error::{Error, Result};
use crate::propagate::make_propagator;

/// Which viewpoint a constraint belongs to. `Common` constraints mention
/// only shared variables; `Def` constraints define derived quantities
/// (the optimization objective) and are never removal candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSide {
    X,
    Y,
    Common,
    Def,
}

#[derive(Debug, Clone)]
pub struct NamedConstraint {
    pub id: String,
    pub family: String,
    pub side: ConstraintSide,
    pub c: Constraint,
}

#[derive(Debug, Clone)]
pub struct SearchGroup {
    pub vars: Vec<VarId>,
    pub order: VarOrder,
}

/// A (possibly combined) model: variables with initial domains, named
/// constraints, channels, and the designated search-variable groups.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub var_names: Vec<String>,
    pub init: Domain,
    pub constraints: Vec<NamedConstraint>,
    pub channels: Vec<ChannelFunction>,
    pub shared_vars: Vec<VarId>,
    pub x_search: Option<SearchGroup>,
    pub y_search: Option<SearchGroup>,
    pub objective: Option<VarId>,
    pub default_mode: Mode,
    /// Order in which the analyzer attempts removals.
    pub removal_order: Vec<String>,
}

/// Which group of variables drives the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchVars {
    X,
    Y,
    Both,
}

impl std::fmt::Display for SearchVars {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SearchVars::X => "x",
            SearchVars::Y => "y",
            SearchVars::Both => "both",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for SearchVars {
    type Err = Error;
    fn from_str(s: &str) -> Result<SearchVars> {
        match s {
            "x" => Ok(SearchVars::X),
            "y" => Ok(SearchVars::Y),
            "both" => Ok(SearchVars::Both),
            _ => Err(Error::InvalidParams(format!("unknown search-vars selector {s}"))),
        }
    }
}

impl Model {
    pub fn var_name(&self, v: VarId) -> String {
        self.var_names[v.index as usize].clone()
    }

    pub fn lookup_var(&self, name: &str) -> Option<VarId> {
        let idx = self.var_names.iter().position(|n| n == name)?;
        self.init.vars().nth(idx)
    }

    pub fn constraint(&self, id: &str) -> Option<&NamedConstraint> {
        self.constraints.iter().find(|nc| nc.id == id)
    }

    /// Propagators for all constraints plus the fused channel propagators.
    pub fn propagators(&self, cap: u128) -> Result<PropagatorSet> {
        self.propagators_for(&|_| true, cap)
    }

    /// Propagators for a subset of constraints plus channels.
    pub fn propagators_for(
        &self,
        keep: &dyn Fn(&NamedConstraint) -> bool,
        cap: u128,
    ) -> Result<PropagatorSet> {
        let mut ps = PropagatorSet::new(self.init.var_count());
        for nc in &self.constraints {
            if keep(nc) {
                ps.push(make_propagator(&nc.c, &self.init, cap)?);
            }
        }
        for ch in &self.channels {
            ps.push(ch.fused_propagator(&self.init));
        }
        Ok(ps)
    }

    pub fn search_config(&self, sel: SearchVars, mode: Option<Mode>) -> Result<SearchConfig> {
        let missing = || Error::InvalidParams(format!("search variables {sel} not in this variant"));
        let (vars, order) = match sel {
            SearchVars::X => {
                let g = self.x_search.as_ref().ok_or_else(missing)?;
                (g.vars.clone(), g.order)
            }
            SearchVars::Y => {
                let g = self.y_search.as_ref().ok_or_else(missing)?;
                (g.vars.clone(), g.order)
            }
            SearchVars::Both => {
                let gx = self.x_search.as_ref().ok_or_else(missing)?;
                let gy = self.y_search.as_ref().ok_or_else(missing)?;
                let mut vs = gx.vars.clone();
                vs.extend(gy.vars.iter().copied());
                (vs, gx.order)
            }
        };
        Ok(SearchConfig::new(vars, order, mode.unwrap_or(self.default_mode)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// First viewpoint alone.
    Mx,
    /// Second viewpoint alone.
    My,
    /// Both viewpoints plus channels.
    Full,
    /// The optimized combined model (redundant propagators removed).
    Opt,
    /// All-interval series: alldifferent instead of disequalities.
    Pr,
    PrFull,
    PrOpt,
    /// Queens: opt with the column sums split, keeping only the ≥ half.
    Part,
}

impl Variant {
    fn wants_x(self) -> bool {
        !matches!(self, Variant::My)
    }
    fn wants_y(self) -> bool {
        !matches!(self, Variant::Mx | Variant::Pr)
    }
    fn combined(self) -> bool {
        self.wants_x() && self.wants_y()
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "mx" => Ok(Variant::Mx),
            "my" => Ok(Variant::My),
            "full" => Ok(Variant::Full),
            "opt" => Ok(Variant::Opt),
            "pr" => Ok(Variant::Pr),
            "pr_full" | "pr-full" => Ok(Variant::PrFull),
            "pr_opt" | "pr-opt" => Ok(Variant::PrOpt),
            "part" => Ok(Variant::Part),
            _ => Err(Error::InvalidParams(format!("unknown variant {s}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Variant::Mx => "mx",
            Variant::My => "my",
            Variant::Full => "full",
            Variant::Opt => "opt",
            Variant::Pr => "pr",
            Variant::PrFull => "pr_full",
            Variant::PrOpt => "pr_opt",
            Variant::Part => "part",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Problem {
    Langford { m: usize, n: usize },
    AllInterval { n: usize },
    Queens { n: usize },
    Golfers { g: usize, s: usize, w: usize },
    Bacp(BacpInstance),
}

impl Problem {
    pub fn key(&self) -> &'static str {
        match self {
            Problem::Langford { .. } => "langford",
            Problem::AllInterval { .. } => "all_interval",
            Problem::Queens { .. } => "queens",
            Problem::Golfers { .. } => "golfers",
            Problem::Bacp(_) => "bacp",
        }
    }

    pub fn params(&self) -> String {
        match self {
            Problem::Langford { m, n } => format!("{m}x{n}"),
            Problem::AllInterval { n } => format!("n{n}"),
            Problem::Queens { n } => format!("n{n}"),
            Problem::Golfers { g, s, w } => format!("{g}-{s}-{w}"),
            Problem::Bacp(inst) => format!("m{}n{}", inst.m, inst.n),
        }
    }
}

/// Variable/constraint accumulation helper.
struct Build {
    names: Vec<String>,
    slots: Vec<VarDomain>,
    constraints: Vec<NamedConstraint>,
}

impl Build {
    fn new() -> Build {
        Build { names: Vec::new(), slots: Vec::new(), constraints: Vec::new() }
    }

    fn int(&mut self, name: String, lo: i32, hi: i32) -> VarId {
        let v = VarId::int(self.slots.len() as u32);
        self.names.push(name);
        self.slots.push(VarDomain::Int(IntSet::range(lo, hi)));
        v
    }

    fn setvar(&mut self, name: String, universe: IntSet) -> VarId {
        let v = VarId::set(self.slots.len() as u32);
        self.names.push(name);
        self.slots.push(VarDomain::Set(SetBounds::free(universe)));
        v
    }

    fn post(&mut self, id: String, family: &str, side: ConstraintSide, c: Constraint) {
        self.constraints.push(NamedConstraint {
            id,
            family: family.to_string(),
            side,
            c: c.normalize(),
        });
    }

    fn init(&self) -> Domain {
        Domain::new(self.slots.clone())
    }
}

fn keep_families(all: &[NamedConstraint], keep: &[&str]) -> Vec<NamedConstraint> {
    all.iter().filter(|nc| keep.contains(&nc.family.as_str())).cloned().collect()
}

fn removal_order_by_family(constraints: &[NamedConstraint], families: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    for f in families {
        for nc in constraints {
            if nc.family == *f {
                out.push(nc.id.clone());
            }
        }
    }
    out
}

/// Build a benchmark model in the requested variant.
pub fn build(problem: &Problem, variant: Variant) -> Result<Model> {
    match problem {
        Problem::Langford { m, n } => langford(*m, *n, variant),
        Problem::AllInterval { n } => all_interval(*n, variant),
        Problem::Queens { n } => queens(*n, variant, false),
        Problem::Golfers { g, s, w } => golfers(*g, *s, *w, variant),
        Problem::Bacp(inst) => bacp(inst, variant),
    }
}

/// The combined model as consumed by the redundancy analyzer: the full
/// variant, except that queens' column sums are split into their ≤ and ≥
/// halves so the removable half can be judged on its own.
pub fn build_analysis(problem: &Problem) -> Result<Model> {
    match problem {
        Problem::Queens { n } => queens(*n, Variant::Full, true),
        _ => build(problem, Variant::Full),
    }
}

fn langford(m: usize, n: usize, variant: Variant) -> Result<Model> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidParams("langford needs m ≥ 2, n ≥ 1".into()));
    }
    if matches!(variant, Variant::Pr | Variant::PrFull | Variant::PrOpt | Variant::Part) {
        return Err(Error::InvalidParams(format!("langford has no variant {variant}")));
    }
    let len = m * n;
    let mut b = Build::new();
    let xs: Vec<VarId> = if variant.wants_x() {
        (1..=len).map(|i| b.int(format!("x{i}"), 1, len as i32)).collect()
    } else {
        vec![]
    };
    let ys: Vec<VarId> = if variant.wants_y() {
        (1..=len).map(|i| b.int(format!("y{i}"), 1, len as i32)).collect()
    } else {
        vec![]
    };
    // item index of digit i (1-based), occurrence k (1-based)
    let item = |i: usize, k: usize| (m * (i - 1) + k) as i32;

    if variant.wants_x() {
        for a in 0..len {
            for c in a + 1..len {
                b.post(
                    format!("LX1[{},{}]", a + 1, c + 1),
                    "LX1",
                    ConstraintSide::X,
                    Constraint::Diseq { x: xs[a], y: xs[c], offset: 0 },
                );
            }
        }
        for k in 1..m {
            for i in 1..=n {
                let lo = item(i, k) as usize - 1;
                let hi = item(i, k + 1) as usize - 1;
                b.post(
                    format!("LX2.{k}[i{i}]"),
                    &format!("LX2.{k}"),
                    ConstraintSide::X,
                    Constraint::LinearEq {
                        terms: vec![(1, xs[hi]), (-1, xs[lo])],
                        rhs: (i + 1) as i32,
                    },
                );
            }
        }
    }
    if variant.wants_y() {
        for a in 0..len {
            for c in a + 1..len {
                b.post(
                    format!("LY1[{},{}]", a + 1, c + 1),
                    "LY1",
                    ConstraintSide::Y,
                    Constraint::Diseq { x: ys[a], y: ys[c], offset: 0 },
                );
            }
        }
        for k in 1..m {
            for i in 1..=n {
                let gap = k * (i + 1);
                let jmax = len as i64 - ((m - 1) * (i + 1)) as i64;
                for j in 1..=jmax.max(0) as usize {
                    b.post(
                        format!("LY2.{k}[i{i},j{j}]"),
                        &format!("LY2.{k}"),
                        ConstraintSide::Y,
                        Constraint::OffsetBiImpl {
                            x: ys[j - 1],
                            a: item(i, 1),
                            y: ys[j + gap - 1],
                            b: item(i, k + 1),
                        },
                    );
                }
            }
        }
        for i in 1..=n {
            let start = (len as i64 + 1 - ((m - 1) * (i + 1)) as i64).max(1) as usize;
            for j in start..=len {
                b.post(
                    format!("LY3[i{i},j{j}]"),
                    "LY3",
                    ConstraintSide::Y,
                    Constraint::AtomC(Atom::IntNeq(ys[j - 1], item(i, 1))),
                );
            }
        }
    }

    let init = b.init();
    let channels = if variant.combined() {
        vec![ChannelFunction::permutation(xs.clone(), ys.clone(), &init)?]
    } else {
        vec![]
    };
    let sep_x: Vec<String> = (1..m).map(|k| format!("LX2.{k}")).collect();
    let constraints = match variant {
        Variant::Opt => {
            let keep: Vec<&str> = sep_x.iter().map(|s| s.as_str()).collect();
            keep_families(&b.constraints, &keep)
        }
        _ => b.constraints.clone(),
    };
    let mut order_fams: Vec<String> = vec!["LX1".into(), "LY1".into()];
    order_fams.extend((1..m).map(|k| format!("LY2.{k}")));
    order_fams.push("LY3".into());
    order_fams.extend(sep_x.iter().cloned());
    let removal_order = removal_order_by_family(
        &b.constraints,
        &order_fams.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
    );
    Ok(Model {
        name: format!("langford-{m}x{n}-{variant}"),
        var_names: b.names,
        init,
        constraints,
        channels,
        shared_vars: vec![],
        x_search: variant
            .wants_x()
            .then(|| SearchGroup { vars: xs, order: VarOrder::FirstFail }),
        y_search: variant
            .wants_y()
            .then(|| SearchGroup { vars: ys, order: VarOrder::FirstFail }),
        objective: None,
        default_mode: Mode::All,
        removal_order,
    })
}

fn all_interval(n: usize, variant: Variant) -> Result<Model> {
    if n < 3 {
        return Err(Error::InvalidParams("all-interval needs n ≥ 3".into()));
    }
    if variant == Variant::Part {
        return Err(Error::InvalidParams("all-interval has no variant part".into()));
    }
    let pr = matches!(variant, Variant::Pr | Variant::PrFull | Variant::PrOpt);
    let mut b = Build::new();
    let (mut xs, mut us, mut ys, mut vs) = (vec![], vec![], vec![], vec![]);
    if variant.wants_x() {
        xs = (1..=n).map(|i| b.int(format!("x{i}"), 1, n as i32)).collect();
        us = (1..=n - 1).map(|i| b.int(format!("u{i}"), 1, n as i32 - 1)).collect();
    }
    if variant.wants_y() {
        ys = (1..=n).map(|i| b.int(format!("y{i}"), 1, n as i32)).collect();
        vs = (1..=n - 1).map(|i| b.int(format!("v{i}"), 1, n as i32 - 1)).collect();
    }

    if variant.wants_x() {
        if pr {
            b.post("IX1.1p".into(), "IX1.1p", ConstraintSide::X, Constraint::AllDifferent(xs.clone()));
            b.post("IX1.2p".into(), "IX1.2p", ConstraintSide::X, Constraint::AllDifferent(us.clone()));
        } else {
            for a in 0..n {
                for c in a + 1..n {
                    b.post(
                        format!("IX1.1[{},{}]", a + 1, c + 1),
                        "IX1.1",
                        ConstraintSide::X,
                        Constraint::Diseq { x: xs[a], y: xs[c], offset: 0 },
                    );
                }
            }
            for a in 0..n - 1 {
                for c in a + 1..n - 1 {
                    b.post(
                        format!("IX1.2[{},{}]", a + 1, c + 1),
                        "IX1.2",
                        ConstraintSide::X,
                        Constraint::Diseq { x: us[a], y: us[c], offset: 0 },
                    );
                }
            }
        }
        for i in 0..n - 1 {
            b.post(
                format!("IX2[{}]", i + 1),
                "IX2",
                ConstraintSide::X,
                Constraint::AbsDiff { u: us[i], x: xs[i], y: xs[i + 1] },
            );
        }
    }
    if variant.wants_y() {
        for a in 0..n {
            for c in a + 1..n {
                b.post(
                    format!("IY1.1[{},{}]", a + 1, c + 1),
                    "IY1.1",
                    ConstraintSide::Y,
                    Constraint::Diseq { x: ys[a], y: ys[c], offset: 0 },
                );
            }
        }
        for a in 0..n - 1 {
            for c in a + 1..n - 1 {
                b.post(
                    format!("IY1.2[{},{}]", a + 1, c + 1),
                    "IY1.2",
                    ConstraintSide::Y,
                    Constraint::Diseq { x: vs[a], y: vs[c], offset: 0 },
                );
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let d = j - i;
                b.post(
                    format!("IY2.1[{},{}]", i + 1, j + 1),
                    "IY2.1",
                    ConstraintSide::Y,
                    Constraint::Impl(
                        Box::new(Constraint::LinearEq { terms: vec![(1, ys[i]), (-1, ys[j])], rhs: 1 }),
                        Box::new(Constraint::LinearEq { terms: vec![(1, vs[d - 1]), (-1, ys[j])], rhs: 0 }),
                    ),
                );
                b.post(
                    format!("IY2.2[{},{}]", i + 1, j + 1),
                    "IY2.2",
                    ConstraintSide::Y,
                    Constraint::Impl(
                        Box::new(Constraint::LinearEq { terms: vec![(1, ys[j]), (-1, ys[i])], rhs: 1 }),
                        Box::new(Constraint::LinearEq { terms: vec![(1, vs[d - 1]), (-1, ys[i])], rhs: 0 }),
                    ),
                );
            }
        }
        // only the extremes 1 and n give difference n−1, so their
        // positions must be adjacent with the difference at the smaller
        let mut tuples = Vec::new();
        for a in 1..=n as i32 {
            for bb in 1..=n as i32 {
                if (a - bb).abs() == 1 {
                    tuples.push(vec![Value::Int(a), Value::Int(bb), Value::Int(a.min(bb))]);
                }
            }
        }
        b.post(
            "IY3".into(),
            "IY3",
            ConstraintSide::Y,
            Constraint::Table { vars: vec![ys[0], ys[n - 1], vs[n - 2]], tuples },
        );
    }

    let init = b.init();
    let channels = if variant.combined() {
        vec![
            ChannelFunction::permutation(xs.clone(), ys.clone(), &init)?,
            ChannelFunction::permutation(us.clone(), vs.clone(), &init)?,
        ]
    } else {
        vec![]
    };
    let constraints = match variant {
        Variant::Opt => keep_families(&b.constraints, &["IX2", "IY3"]),
        Variant::PrOpt => keep_families(&b.constraints, &["IX1.1p", "IX1.2p", "IX2", "IY3"]),
        _ => b.constraints.clone(),
    };
    let removal_order = removal_order_by_family(
        &b.constraints,
        &["IX1.1", "IX1.2", "IY1.1", "IY1.2", "IY2.1", "IY2.2", "IY3", "IX2"],
    );
    Ok(Model {
        name: format!("all-interval-{n}-{variant}"),
        var_names: b.names,
        init,
        constraints,
        channels,
        shared_vars: vec![],
        x_search: variant
            .wants_x()
            .then(|| SearchGroup { vars: xs, order: VarOrder::FirstFail }),
        y_search: variant
            .wants_y()
            .then(|| SearchGroup { vars: ys, order: VarOrder::FirstFail }),
        objective: None,
        default_mode: Mode::All,
        removal_order,
    })
}

fn queens(n: usize, variant: Variant, analysis: bool) -> Result<Model> {
    if n < 2 {
        return Err(Error::InvalidParams("queens needs n ≥ 2".into()));
    }
    if matches!(variant, Variant::Pr | Variant::PrFull | Variant::PrOpt) {
        return Err(Error::InvalidParams(format!("queens has no variant {variant}")));
    }
    // the part model only exists in split form
    let split = analysis || variant == Variant::Part;
    let mut b = Build::new();
    let xs: Vec<VarId> = if variant.wants_x() {
        (1..=n).map(|i| b.int(format!("x{i}"), 1, n as i32)).collect()
    } else {
        vec![]
    };
    let mut zs = Vec::new();
    if variant.wants_y() {
        for i in 1..=n {
            for j in 1..=n {
                zs.push(b.int(format!("z{i}_{j}"), 0, 1));
            }
        }
    }
    let z = |i: usize, j: usize| zs[(i - 1) * n + (j - 1)];

    if variant.wants_x() {
        for i in 0..n {
            for j in i + 1..n {
                b.post(
                    format!("QX1[{},{}]", i + 1, j + 1),
                    "QX1",
                    ConstraintSide::X,
                    Constraint::Diseq { x: xs[i], y: xs[j], offset: 0 },
                );
                // x_i − i ≠ x_j − j and x_i + i ≠ x_j + j
                b.post(
                    format!("QX2.1[{},{}]", i + 1, j + 1),
                    "QX2.1",
                    ConstraintSide::X,
                    Constraint::Diseq { x: xs[i], y: xs[j], offset: i as i32 - j as i32 },
                );
                b.post(
                    format!("QX2.2[{},{}]", i + 1, j + 1),
                    "QX2.2",
                    ConstraintSide::X,
                    Constraint::Diseq { x: xs[i], y: xs[j], offset: j as i32 - i as i32 },
                );
            }
        }
    }
    let unit = |vars: Vec<VarId>| -> Vec<(i32, VarId)> { vars.into_iter().map(|v| (1, v)).collect() };
    if variant.wants_y() {
        for i in 1..=n {
            b.post(
                format!("QZ1[{i}]"),
                "QZ1",
                ConstraintSide::Y,
                Constraint::LinearEq { terms: unit((1..=n).map(|j| z(i, j)).collect()), rhs: 1 },
            );
        }
        for j in 1..=n {
            let col: Vec<VarId> = (1..=n).map(|i| z(i, j)).collect();
            if split {
                b.post(
                    format!("QZ2.le[{j}]"),
                    "QZ2.le",
                    ConstraintSide::Y,
                    Constraint::LinearLeq { terms: unit(col.clone()), rhs: 1 },
                );
                b.post(
                    format!("QZ2.ge[{j}]"),
                    "QZ2.ge",
                    ConstraintSide::Y,
                    Constraint::LinearLeq { terms: col.iter().map(|&v| (-1, v)).collect(), rhs: -1 },
                );
            } else {
                b.post(
                    format!("QZ2[{j}]"),
                    "QZ2",
                    ConstraintSide::Y,
                    Constraint::LinearEq { terms: unit(col), rhs: 1 },
                );
            }
        }
        b.post(
            "QZ3.1".into(),
            "QZ3.1",
            ConstraintSide::Y,
            Constraint::LinearLeq { terms: unit((1..=n).map(|i| z(i, i)).collect()), rhs: 1 },
        );
        b.post(
            "QZ3.2".into(),
            "QZ3.2",
            ConstraintSide::Y,
            Constraint::LinearLeq { terms: unit((1..=n).map(|i| z(i, n - i + 1)).collect()), rhs: 1 },
        );
        for k in 1..n {
            b.post(
                format!("QZ4.1[{k}]"),
                "QZ4.1",
                ConstraintSide::Y,
                Constraint::LinearLeq { terms: unit((1..=n - k).map(|j| z(j, j + k)).collect()), rhs: 1 },
            );
            b.post(
                format!("QZ4.2[{k}]"),
                "QZ4.2",
                ConstraintSide::Y,
                Constraint::LinearLeq { terms: unit((1..=n - k).map(|j| z(j + k, j)).collect()), rhs: 1 },
            );
            b.post(
                format!("QZ4.3[{k}]"),
                "QZ4.3",
                ConstraintSide::Y,
                Constraint::LinearLeq {
                    terms: unit((1..=n - k).map(|j| z(j, n - j - k + 1)).collect()),
                    rhs: 1,
                },
            );
            b.post(
                format!("QZ4.4[{k}]"),
                "QZ4.4",
                ConstraintSide::Y,
                Constraint::LinearLeq {
                    terms: unit((1..=n - k).map(|j| z(j + k, n - j + 1)).collect()),
                    rhs: 1,
                },
            );
        }
    }

    let init = b.init();
    let channels = if variant.combined() {
        vec![ChannelFunction::boolean(xs.clone(), zs.clone(), n, &init)?]
    } else {
        vec![]
    };
    let x_fams = &["QX1", "QX2.1", "QX2.2"][..];
    let constraints = match variant {
        Variant::Opt => keep_families(
            &b.constraints,
            &[x_fams, &["QZ2", "QZ2.le", "QZ2.ge"][..]].concat(),
        ),
        Variant::Part => keep_families(&b.constraints, &[x_fams, &["QZ2.ge"][..]].concat()),
        _ => b.constraints.clone(),
    };
    let removal_order = removal_order_by_family(
        &b.constraints,
        &[
            "QZ1", "QZ2.le", "QZ3.1", "QZ3.2", "QZ4.1", "QZ4.2", "QZ4.3", "QZ4.4", "QZ2.ge",
            "QX1", "QX2.1", "QX2.2",
        ],
    );
    Ok(Model {
        name: format!("queens-{n}-{variant}"),
        var_names: b.names,
        init,
        constraints,
        channels,
        shared_vars: vec![],
        x_search: variant
            .wants_x()
            .then(|| SearchGroup { vars: xs, order: VarOrder::FirstFail }),
        y_search: variant
            .wants_y()
            .then(|| SearchGroup { vars: zs, order: VarOrder::FirstFail }),
        objective: None,
        default_mode: Mode::All,
        removal_order,
    })
}

fn golfers(g: usize, s: usize, w: usize, variant: Variant) -> Result<Model> {
    if g < 1 || s < 1 || w < 1 {
        return Err(Error::InvalidParams("golfers needs positive g, s, w".into()));
    }
    if matches!(variant, Variant::Pr | Variant::PrFull | Variant::PrOpt | Variant::Part) {
        return Err(Error::InvalidParams(format!("golfers has no variant {variant}")));
    }
    let n = g * s;
    let mut b = Build::new();
    // players by weeks: x{l}_{k} is the group of player l in week k
    let mut xs = Vec::new();
    if variant.wants_x() {
        for l in 1..=n {
            for k in 1..=w {
                xs.push(b.int(format!("x{l}_{k}"), 1, g as i32));
            }
        }
    }
    let x = |l: usize, k: usize| xs[(l - 1) * w + (k - 1)];
    // weeks by groups: S{i}_{k} is the set of players in group i, week k
    let mut ss = Vec::new();
    if variant.wants_y() {
        for k in 1..=w {
            for i in 1..=g {
                ss.push(b.setvar(format!("S{i}_{k}"), IntSet::range(1, n as i32)));
            }
        }
    }
    let sv = |i: usize, k: usize| ss[(k - 1) * g + (i - 1)];

    if variant.wants_x() {
        for i in 1..=g {
            for k in 1..=w {
                b.post(
                    format!("GX1[g{i},w{k}]"),
                    "GX1",
                    ConstraintSide::X,
                    Constraint::ReifSumEq {
                        value: i as i32,
                        items: (1..=n).map(|l| (x(l, k), 1)).collect(),
                        rhs: Rhs::Const(s as i32),
                    },
                );
            }
        }
        for l1 in 1..=n {
            for l2 in l1 + 1..=n {
                for k1 in 1..=w {
                    for k2 in k1 + 1..=w {
                        b.post(
                            format!("GX2[p{l1},{l2};w{k1},{k2}]"),
                            "GX2",
                            ConstraintSide::X,
                            Constraint::Neg(Box::new(Constraint::Conj(vec![
                                Constraint::LinearEq {
                                    terms: vec![(1, x(l1, k1)), (-1, x(l2, k1))],
                                    rhs: 0,
                                },
                                Constraint::LinearEq {
                                    terms: vec![(1, x(l1, k2)), (-1, x(l2, k2))],
                                    rhs: 0,
                                },
                            ]))),
                        );
                    }
                }
            }
        }
    }
    if variant.wants_y() {
        for k in 1..=w {
            for i1 in 1..=g {
                for i2 in i1 + 1..=g {
                    b.post(
                        format!("GS1[w{k};g{i1},{i2}]"),
                        "GS1",
                        ConstraintSide::Y,
                        Constraint::SetInterEmpty { s: sv(i1, k), t: sv(i2, k) },
                    );
                }
            }
        }
        for i in 1..=g {
            for k in 1..=w {
                b.post(
                    format!("GS2[g{i},w{k}]"),
                    "GS2",
                    ConstraintSide::Y,
                    Constraint::SetCard { s: sv(i, k), rhs: Rhs::Const(s as i32) },
                );
            }
        }
        for k1 in 1..=w {
            for k2 in k1 + 1..=w {
                for i1 in 1..=g {
                    for i2 in 1..=g {
                        if i1 != i2 {
                            b.post(
                                format!("GS3[g{i1}w{k1};g{i2}w{k2}]"),
                                "GS3",
                                ConstraintSide::Y,
                                Constraint::SetInterCardLeq { s: sv(i1, k1), t: sv(i2, k2), k: 1 },
                            );
                        }
                    }
                }
            }
        }
    }

    let init = b.init();
    // one set channel per week: x_{l,k} = i ⇔ l ∈ S_{i,k}
    let channels = if variant.combined() {
        (1..=w)
            .map(|k| {
                let col_x: Vec<VarId> = (1..=n).map(|l| x(l, k)).collect();
                let col_s: Vec<VarId> = (1..=g).map(|i| sv(i, k)).collect();
                ChannelFunction::set_channel(col_x, col_s, &init)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![]
    };
    let constraints = match variant {
        Variant::Opt => keep_families(&b.constraints, &["GX1", "GX2"]),
        _ => b.constraints.clone(),
    };
    let removal_order =
        removal_order_by_family(&b.constraints, &["GS1", "GS2", "GS3", "GX1", "GX2"]);
    Ok(Model {
        name: format!("golfers-{g}-{s}-{w}-{variant}"),
        var_names: b.names,
        init,
        constraints,
        channels,
        shared_vars: vec![],
        x_search: variant
            .wants_x()
            .then(|| SearchGroup { vars: xs, order: VarOrder::InputOrder }),
        y_search: variant
            .wants_y()
            .then(|| SearchGroup { vars: ss, order: VarOrder::InputOrder }),
        objective: None,
        default_mode: Mode::First,
        removal_order,
    })
}

/// Curriculum instance data: `m` courses over `n` periods, per-period
/// load bounds `[a..b]`, course-count bounds `[c..d]`, per-course credits
/// and prerequisite pairs (course i before course j; 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacpInstance {
    pub m: usize,
    pub n: usize,
    pub a: i32,
    pub b: i32,
    pub c: i32,
    pub d: i32,
    pub credits: Vec<i32>,
    pub prereqs: Vec<(usize, usize)>,
}

impl BacpInstance {
    /// The desk-scale instance shipped with the repository.
    pub fn desk() -> BacpInstance {
        BacpInstance {
            m: 6,
            n: 3,
            a: 1,
            b: 3,
            c: 1,
            d: 3,
            credits: vec![1; 6],
            prereqs: vec![(1, 4), (2, 5)],
        }
    }

    /// Text format: line 1 `m n a b c d`; line 2 the m credits; one
    /// prerequisite pair `i j` per following line. `#` lines are comments.
    pub fn parse(text: &str) -> Result<BacpInstance> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let head: Vec<i64> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty instance".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t}"))))
            .collect::<Result<_>>()?;
        let [m, n, a, b, c, d] = head[..] else {
            return Err(Error::Parse("header must be `m n a b c d`".into()));
        };
        let credits: Vec<i32> = lines
            .next()
            .ok_or_else(|| Error::Parse("missing credits line".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad credit {t}"))))
            .collect::<Result<_>>()?;
        if credits.len() != m as usize {
            return Err(Error::Parse("credit count differs from m".into()));
        }
        let mut prereqs = Vec::new();
        for line in lines {
            let pair: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad course {t}"))))
                .collect::<Result<_>>()?;
            let [i, j] = pair[..] else {
                return Err(Error::Parse("prerequisite lines are `i j`".into()));
            };
            if i == 0 || j == 0 || i > m as usize || j > m as usize {
                return Err(Error::Parse(format!("course out of range in `{line}`")));
            }
            prereqs.push((i, j));
        }
        Ok(BacpInstance {
            m: m as usize,
            n: n as usize,
            a: a as i32,
            b: b as i32,
            c: c as i32,
            d: d as i32,
            credits,
            prereqs,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {} {} {}\n", self.m, self.n, self.a, self.b, self.c, self.d);
        s.push_str(&self.credits.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
        s.push('\n');
        for (i, j) in &self.prereqs {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }
}

fn bacp(inst: &BacpInstance, variant: Variant) -> Result<Model> {
    let (m, n) = (inst.m, inst.n);
    if m == 0 || n == 0 || inst.credits.len() != m {
        return Err(Error::InvalidParams("bad curriculum instance".into()));
    }
    if matches!(variant, Variant::Pr | Variant::PrFull | Variant::PrOpt | Variant::Part) {
        return Err(Error::InvalidParams(format!("bacp has no variant {variant}")));
    }
    let total: i32 = inst.credits.iter().sum();
    let mut b = Build::new();
    let xs: Vec<VarId> = if variant.wants_x() {
        (1..=m).map(|i| b.int(format!("x{i}"), 1, n as i32)).collect()
    } else {
        vec![]
    };
    let ss: Vec<VarId> = if variant.wants_y() {
        (1..=n).map(|j| b.setvar(format!("S{j}"), IntSet::range(1, m as i32))).collect()
    } else {
        vec![]
    };
    let ls: Vec<VarId> = (1..=n).map(|j| b.int(format!("l{j}"), 0, total)).collect();
    let qs: Vec<VarId> = (1..=n).map(|j| b.int(format!("q{j}"), 1, m as i32)).collect();
    let u = b.int("u".into(), 0, total);

    for j in 0..n {
        b.post(
            format!("B1.1[{}]", j + 1),
            "B1.1",
            ConstraintSide::Common,
            Constraint::Conj(vec![
                Constraint::AtomC(Atom::IntGeq(ls[j], inst.a)),
                Constraint::AtomC(Atom::IntLeq(ls[j], inst.b)),
            ]),
        );
        b.post(
            format!("B1.2[{}]", j + 1),
            "B1.2",
            ConstraintSide::Common,
            Constraint::Conj(vec![
                Constraint::AtomC(Atom::IntGeq(qs[j], inst.c)),
                Constraint::AtomC(Atom::IntLeq(qs[j], inst.d)),
            ]),
        );
    }
    b.post(
        "B2.1".into(),
        "B2.1",
        ConstraintSide::Common,
        Constraint::LinearEq { terms: ls.iter().map(|&v| (1, v)).collect(), rhs: total },
    );
    b.post(
        "B2.2".into(),
        "B2.2",
        ConstraintSide::Common,
        Constraint::LinearEq { terms: qs.iter().map(|&v| (1, v)).collect(), rhs: m as i32 },
    );
    if variant.wants_x() {
        for j in 0..n {
            b.post(
                format!("BX1[{}]", j + 1),
                "BX1",
                ConstraintSide::X,
                Constraint::ReifSumEq {
                    value: (j + 1) as i32,
                    items: xs.iter().zip(&inst.credits).map(|(&x, &t)| (x, t)).collect(),
                    rhs: Rhs::Var(ls[j]),
                },
            );
            b.post(
                format!("BX2[{}]", j + 1),
                "BX2",
                ConstraintSide::X,
                Constraint::ReifSumEq {
                    value: (j + 1) as i32,
                    items: xs.iter().map(|&x| (x, 1)).collect(),
                    rhs: Rhs::Var(qs[j]),
                },
            );
        }
        for &(i, j) in &inst.prereqs {
            b.post(
                format!("BX3[{i},{j}]"),
                "BX3",
                ConstraintSide::X,
                Constraint::LinearLeq { terms: vec![(1, xs[i - 1]), (-1, xs[j - 1])], rhs: -1 },
            );
        }
    }
    if variant.wants_y() {
        for i in 0..n {
            for j in i + 1..n {
                b.post(
                    format!("BS1[{},{}]", i + 1, j + 1),
                    "BS1",
                    ConstraintSide::Y,
                    Constraint::SetInterEmpty { s: ss[i], t: ss[j] },
                );
            }
        }
        for j in 0..n {
            b.post(
                format!("BS2[{}]", j + 1),
                "BS2",
                ConstraintSide::Y,
                Constraint::SetWeightedSum {
                    s: ss[j],
                    weights: (1..=m).map(|i| (i as i32, inst.credits[i - 1])).collect(),
                    rhs: Rhs::Var(ls[j]),
                },
            );
            b.post(
                format!("BS3[{}]", j + 1),
                "BS3",
                ConstraintSide::Y,
                Constraint::SetCard { s: ss[j], rhs: Rhs::Var(qs[j]) },
            );
        }
        for &(i, j) in &inst.prereqs {
            for k in 1..n {
                for kp in 1..=k {
                    b.post(
                        format!("BS4[{i},{j};k{k},{kp}]"),
                        "BS4",
                        ConstraintSide::Y,
                        Constraint::Impl(
                            Box::new(Constraint::AtomC(Atom::InSet(i as i32, ss[k - 1]))),
                            Box::new(Constraint::AtomC(Atom::NotInSet(j as i32, ss[kp - 1]))),
                        ),
                    );
                }
            }
        }
    }
    // the objective is the maximum period load
    b.post("OBJ".into(), "OBJ", ConstraintSide::Def, Constraint::MaxEq { m: u, vars: ls.clone() });

    let init = b.init();
    let channels = if variant.combined() {
        vec![ChannelFunction::set_channel(xs.clone(), ss.clone(), &init)?]
    } else {
        vec![]
    };
    let common = &["B1.1", "B1.2", "B2.1", "B2.2", "OBJ"][..];
    let constraints = match variant {
        Variant::Opt => keep_families(
            &b.constraints,
            &[common, &["BX3", "BS2", "BS3"][..]].concat(),
        ),
        _ => b.constraints.clone(),
    };
    let removal_order = removal_order_by_family(
        &b.constraints,
        &["BS1", "BX1", "BX2", "BS4", "B1.1", "B1.2", "B2.1", "B2.2", "BX3", "BS2", "BS3"],
    );
    let mut shared = ls.clone();
    shared.extend(qs.iter().copied());
    shared.push(u);
    Ok(Model {
        name: format!("bacp-m{m}n{n}-{variant}"),
        var_names: b.names,
        init,
        constraints,
        channels,
        shared_vars: shared,
        x_search: variant
            .wants_x()
            .then(|| SearchGroup { vars: xs, order: VarOrder::FirstFail }),
        y_search: variant
            .wants_y()
            .then(|| SearchGroup { vars: ss, order: VarOrder::InputOrder }),
        objective: Some(u),
        default_mode: Mode::Minimize(u),
        removal_order,
    })
}

/// Exhaustive solution enumeration by plain backtracking with
/// scope-complete constraint checking; entirely independent of the
/// propagator machinery. The cap bounds visited assignments.
pub fn enumerate_brute(model: &Model, cap: u64) -> Result<Vec<Valuation>> {
    let vars: Vec<VarId> = model.init.vars().collect();
    // a constraint becomes checkable once its last variable is assigned
    let mut check_at: Vec<Vec<&Constraint>> = vec![Vec::new(); vars.len()];
    for nc in &model.constraints {
        if let Some(last) = nc.c.scope().iter().map(|v| v.index).max() {
            check_at[last as usize].push(&nc.c);
        }
    }
    fn channel_ok(ch: &ChannelFunction, theta: &Valuation) -> bool {
        ch.atoms_x().iter().all(|a| {
            let img = ch.map_atom(a).expect("universe atom");
            theta.satisfies_atom(a) == theta.satisfies_atom(&img)
        })
    }
    struct Ctx<'a> {
        vars: &'a [VarId],
        model: &'a Model,
        check_at: &'a [Vec<&'a Constraint>],
        visited: u64,
        cap: u64,
        out: Vec<Valuation>,
    }
    fn rec(k: usize, theta: &mut Valuation, cx: &mut Ctx) -> Result<()> {
        cx.visited += 1;
        if cx.visited > cx.cap {
            return Err(Error::CapExceeded { needed: cx.visited as u128, cap: cx.cap as u128 });
        }
        if k == cx.vars.len() {
            if cx.model.channels.iter().all(|ch| channel_ok(ch, theta)) {
                cx.out.push(theta.clone());
            }
            return Ok(());
        }
        let v = cx.vars[k];
        match v.kind {
            VarKind::Int => {
                for d in cx.model.init.int(v).iter() {
                    theta.bind(v, Value::Int(d));
                    if cx.check_at[k].iter().all(|c| c.satisfied(theta)) {
                        rec(k + 1, theta, cx)?;
                    }
                }
            }
            VarKind::Set => {
                let b = cx.model.init.set(v);
                let delta: Vec<i32> = b.delta().iter().collect();
                for mask in 0..(1u64 << delta.len()) {
                    let mut a = b.lb.clone();
                    for (bit, &e) in delta.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            a = a.with(e);
                        }
                    }
                    theta.bind(v, Value::Set(a));
                    if cx.check_at[k].iter().all(|c| c.satisfied(theta)) {
                        rec(k + 1, theta, cx)?;
                    }
                }
            }
        }
        Ok(())
    }
    let mut cx = Ctx { vars: &vars, model, check_at: &check_at, visited: 0, cap, out: Vec::new() };
    rec(0, &mut Valuation::new(), &mut cx)?;
    Ok(cx.out)
}

/// Run the model's default search for a given selector.
pub fn solve(
    model: &Model,
    sel: SearchVars,
    mode: Option<Mode>,
    cap: u128,
) -> Result<crate::engine::SearchStats> {
    let ps = model.propagators(cap)?;
    let cfg = model.search_config(sel, mode)?;
    crate::engine::search(&ps, &model.init, &cfg)
}

/// Extend a first-viewpoint solution through a channel, returning the
/// induced second-viewpoint values (or nothing when it cannot extend).
pub fn extend_through_channel(
    ch: &ChannelFunction,
    theta: &Valuation,
) -> Option<Vec<(VarId, Value)>> {
    // decide every second-side atom from the first side and reassemble
    let mut by_var: std::collections::BTreeMap<VarId, Vec<(Atom, bool)>> = Default::default();
    for a in ch.atoms_x() {
        let img = ch.map_atom(&a).ok()?;
        by_var.entry(img.var()).or_default().push((img, theta.satisfies_atom(&a)));
    }
    let mut out = Vec::new();
    for (v, facts) in by_var {
        match v.kind {
            VarKind::Int => {
                let asserted: Vec<i32> = facts
                    .iter()
                    .filter_map(|(a, h)| match a {
                        Atom::IntEq(_, d) if *h => Some(*d),
                        _ => None,
                    })
                    .collect();
                let denied: Vec<i32> = facts
                    .iter()
                    .filter_map(|(a, h)| match a {
                        Atom::IntEq(_, d) if !*h => Some(*d),
                        Atom::IntNeq(_, d) if *h => Some(*d),
                        _ => None,
                    })
                    .collect();
                let mut vals = asserted;
                vals.sort_unstable();
                vals.dedup();
                match vals[..] {
                    [one] if !denied.contains(&one) => out.push((v, Value::Int(one))),
                    _ => return None,
                }
            }
            VarKind::Set => {
                let mut elems = Vec::new();
                for (atom, holds) in &facts {
                    match atom {
                        Atom::InSet(e, _) if *holds => elems.push(*e),
                        Atom::NotInSet(e, _) if !*holds => elems.push(*e),
                        _ => {}
                    }
                }
                out.push((v, Value::Set(IntSet::from_values(elems))));
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn langford_counts_match_quantifiers() {
        let m = build(&Problem::Langford { m: 3, n: 9 }, Variant::Mx).unwrap();
        assert_eq!(m.init.var_count(), 27);
        let lx1 = m.constraints.iter().filter(|c| c.family == "LX1").count();
        assert_eq!(lx1, 27 * 26 / 2);
        let sep = m.constraints.iter().filter(|c| c.family.starts_with("LX2")).count();
        assert_eq!(sep, 18);
        let full = build(&Problem::Langford { m: 3, n: 9 }, Variant::Full).unwrap();
        assert_eq!(full.init.var_count(), 54);
        let ly2 = full.constraints.iter().filter(|c| c.family.starts_with("LY2")).count();
        let expect: usize = (1..=9).map(|i| 27 - 2 * (i + 1)).sum();
        assert_eq!(ly2, 2 * expect);
        let ly3 = full.constraints.iter().filter(|c| c.family == "LY3").count();
        assert_eq!(ly3, (1..=9).map(|i| 2 * (i + 1)).sum::<usize>());
    }

    #[test]
    fn queens_families_match_description() {
        let m = build(&Problem::Queens { n: 6 }, Variant::Full).unwrap();
        assert_eq!(m.init.var_count(), 6 + 36);
        for fam in ["QZ1", "QZ2"] {
            assert_eq!(m.constraints.iter().filter(|c| c.family == fam).count(), 6);
        }
        for fam in ["QZ4.1", "QZ4.2", "QZ4.3", "QZ4.4"] {
            assert_eq!(m.constraints.iter().filter(|c| c.family == fam).count(), 5);
        }
        let part = build(&Problem::Queens { n: 6 }, Variant::Part).unwrap();
        assert!(part.constraints.iter().any(|c| c.family == "QZ2.ge"));
        assert!(!part.constraints.iter().any(|c| c.family == "QZ2.le"));
        assert!(!part.constraints.iter().any(|c| c.family == "QZ1"));
    }

    #[test]
    fn brute_force_reference_counts() {
        let queens4 = build(&Problem::Queens { n: 4 }, Variant::Mx).unwrap();
        assert_eq!(enumerate_brute(&queens4, 10_000_000).unwrap().len(), 2);

        let lf = build(&Problem::Langford { m: 2, n: 3 }, Variant::Mx).unwrap();
        let sols = enumerate_brute(&lf, 10_000_000).unwrap();
        // the classic sequence 312132 has digit positions (3,5),(1,4),(2,6);
        // 231213 is its reversal
        let xsv = lf.x_search.as_ref().unwrap().vars.clone();
        let as_positions: Vec<Vec<i32>> =
            sols.iter().map(|t| xsv.iter().map(|&v| t.int(v)).collect()).collect();
        assert_eq!(sols.len(), 2);
        assert!(as_positions.contains(&vec![3, 5, 1, 4, 2, 6]));
        assert!(as_positions.contains(&vec![2, 4, 3, 6, 1, 5]));

        // a contradictory model has no solutions
        let mut broken = build(&Problem::Queens { n: 2 }, Variant::Mx).unwrap();
        let x1 = broken.x_search.as_ref().unwrap().vars[0];
        broken.constraints.push(NamedConstraint {
            id: "never".into(),
            family: "never".into(),
            side: ConstraintSide::X,
            c: Constraint::Diseq { x: x1, y: x1, offset: 0 },
        });
        assert!(enumerate_brute(&broken, 1_000_000).unwrap().is_empty());
    }

    #[test]
    fn search_matches_brute_on_tiny_instances() {
        for (problem, variants) in [
            (Problem::Queens { n: 4 }, vec![Variant::Mx, Variant::My, Variant::Full]),
            (Problem::Langford { m: 2, n: 3 }, vec![Variant::Mx, Variant::My]),
            (Problem::AllInterval { n: 4 }, vec![Variant::Mx, Variant::My]),
            (Problem::Golfers { g: 2, s: 2, w: 2 }, vec![Variant::Mx]),
        ] {
            for variant in variants {
                let m = build(&problem, variant).unwrap();
                let brute = enumerate_brute(&m, 100_000_000).unwrap().len() as u64;
                let sel = match variant {
                    Variant::My => SearchVars::Y,
                    _ => SearchVars::X,
                };
                let stats = solve(&m, sel, Some(Mode::All), 1 << 22).unwrap();
                assert_eq!(stats.solutions, brute, "{} {variant}", m.name);
            }
        }
    }

    #[test]
    fn viewpoint_solutions_are_in_bijection() {
        let mx = build(&Problem::Langford { m: 2, n: 3 }, Variant::Mx).unwrap();
        let my = build(&Problem::Langford { m: 2, n: 3 }, Variant::My).unwrap();
        let full = build(&Problem::Langford { m: 2, n: 3 }, Variant::Full).unwrap();
        let xsols = enumerate_brute(&mx, 100_000_000).unwrap();
        let ysols = enumerate_brute(&my, 100_000_000).unwrap();
        assert_eq!(xsols.len(), ysols.len());
        let ch = &full.channels[0];
        for theta in &xsols {
            let ext = extend_through_channel(ch, theta).expect("permutation solutions extend");
            let mut full_theta = theta.clone();
            for (v, val) in ext {
                full_theta.bind(v, val);
            }
            for nc in &full.constraints {
                if nc.side == ConstraintSide::Y {
                    assert!(nc.c.satisfied(&full_theta), "{} fails on the extension", nc.id);
                }
            }
        }
    }

    #[test]
    fn queens_two_is_infeasible_and_six_has_four_solutions() {
        let m2 = build(&Problem::Queens { n: 2 }, Variant::Mx).unwrap();
        let s2 = solve(&m2, SearchVars::X, Some(Mode::All), 1 << 22).unwrap();
        assert_eq!(s2.solutions, 0);
        assert!(s2.fails >= 1);

        let m6 = build(&Problem::Queens { n: 6 }, Variant::Mx).unwrap();
        let s6 = solve(&m6, SearchVars::X, Some(Mode::All), 1 << 22).unwrap();
        assert_eq!(s6.solutions, 4);
    }

    #[test]
    fn bacp_desk_instance_round_trips_and_optimizes() {
        let inst = BacpInstance::desk();
        let parsed = BacpInstance::parse(&inst.to_text()).unwrap();
        assert_eq!(parsed, inst);

        let m = build(&Problem::Bacp(inst), Variant::Mx).unwrap();
        let stats = solve(&m, SearchVars::X, None, 1 << 22).unwrap();
        assert_eq!(stats.best_objective, Some(2));
    }

    #[test]
    fn bacp_identity_constraint_present_in_every_variant() {
        let inst = BacpInstance::desk();
        for variant in [Variant::Mx, Variant::My, Variant::Full, Variant::Opt] {
            let m = build(&Problem::Bacp(inst.clone()), variant).unwrap();
            assert!(m.constraints.iter().any(|c| c.family == "B2.1"), "{variant}");
        }
    }
}
