//! Enumeration and sampling of the sub-domain lattice below an initial
//! domain. Integer variables range over all non-empty subsets of their
//! initial set; set variables range over all sub-ranges `[lb..ub]` with
//! `init.lb ⊆ lb ⊆ ub ⊆ init.ub` (each undecided element is in, out, or
//! still undecided).

use rand::Rng;

use crate::domain::{Domain, IntSet, SetBounds, VarDomain, VarId, VarKind};
use crate::error::{Error, Result};

/// Number of subdomains of `init` when the listed variables vary and all
/// others stay fixed at their initial domain.
pub fn subdomain_count(init: &Domain, vars: &[VarId]) -> u128 {
    let mut total: u128 = 1;
    for &v in vars {
        let per: u128 = match v.kind {
            VarKind::Int => (1u128 << init.int(v).len().min(126)) - 1,
            VarKind::Set => 3u128.checked_pow(init.set(v).delta().len() as u32).unwrap_or(u128::MAX),
        };
        total = total.saturating_mul(per);
    }
    total
}

/// Visit every subdomain `D ⊑ init` over `vars`. The visitor returns
/// `false` to stop early; the function then returns `Ok(false)`.
pub fn for_each_subdomain(
    init: &Domain,
    vars: &[VarId],
    cap: u128,
    mut f: impl FnMut(&Domain) -> bool,
) -> Result<bool> {
    let needed = subdomain_count(init, vars);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    // Odometer over per-variable choice indices.
    let sizes: Vec<u128> = vars
        .iter()
        .map(|&v| match v.kind {
            VarKind::Int => (1u128 << init.int(v).len()) - 1,
            VarKind::Set => 3u128.pow(init.set(v).delta().len() as u32),
        })
        .collect();
    let mut idx = vec![0u128; vars.len()];
    loop {
        let mut d = init.clone();
        for (k, &v) in vars.iter().enumerate() {
            assign_choice(&mut d, init, v, idx[k]);
        }
        if !f(&d) {
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
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn assign_choice(d: &mut Domain, init: &Domain, v: VarId, choice: u128) {
    match v.kind {
        VarKind::Int => {
            // choice+1 is a non-empty bitmask over the sorted initial values
            let mask = choice + 1;
            let vals: Vec<i32> = init
                .int(v)
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, val)| val)
                .collect();
            d.set_int(v, IntSet::from_values(vals));
        }
        VarKind::Set => {
            let b0 = init.set(v);
            let mut lb = b0.lb.clone();
            let mut ub = b0.ub.clone();
            let mut c = choice;
            for e in b0.delta().iter() {
                match c % 3 {
                    0 => {}                       // still undecided
                    1 => lb = lb.with(e),         // forced in
                    _ => ub = ub.without(e),      // forced out
                }
                c /= 3;
            }
            d.set_bounds(v, SetBounds::new(lb, ub));
        }
    }
}

/// Draw one random subdomain of `init` over `vars` (never false by
/// construction: integer subsets are non-empty, set ranges stay valid).
pub fn random_subdomain(init: &Domain, vars: &[VarId], rng: &mut impl Rng) -> Domain {
    let mut d = init.clone();
    for &v in vars {
        match v.kind {
            VarKind::Int => {
                let vals: Vec<i32> = init.int(v).iter().filter(|_| rng.gen_bool(0.5)).collect();
                let s = if vals.is_empty() {
                    let all: Vec<i32> = init.int(v).iter().collect();
                    IntSet::singleton(all[rng.gen_range(0..all.len())])
                } else {
                    IntSet::from_values(vals)
                };
                d.set_int(v, s);
            }
            VarKind::Set => {
                let b0 = init.set(v);
                let mut lb = b0.lb.clone();
                let mut ub = b0.ub.clone();
                for e in b0.delta().iter() {
                    match rng.gen_range(0..3) {
                        0 => {}
                        1 => lb = lb.with(e),
                        _ => ub = ub.without(e),
                    }
                }
                d.set_bounds(v, SetBounds::new(lb, ub));
            }
        }
    }
    d
}

/// All variables of a domain, convenience for full-lattice sweeps.
pub fn all_vars(init: &Domain) -> Vec<VarId> {
    init.vars().collect()
}

/// Build a domain universe from per-variable descriptions.
pub fn universe(slots: Vec<VarDomain>) -> Domain {
    Domain::new(slots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_enumeration() {
        let init = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 3)),
            VarDomain::Set(SetBounds::free(IntSet::range(1, 2))),
        ]);
        let vars = all_vars(&init);
        let expected = subdomain_count(&init, &vars);
        assert_eq!(expected, 7 * 9);
        let mut n = 0u128;
        for_each_subdomain(&init, &vars, 1 << 20, |_| {
            n += 1;
            true
        })
        .unwrap();
        assert_eq!(n, expected);
    }

    #[test]
    fn every_generated_domain_is_below_init() {
        let init = Domain::new(vec![
            VarDomain::Int(IntSet::range(1, 2)),
            VarDomain::Set(SetBounds::new(IntSet::singleton(9), IntSet::from_values(vec![7, 9]))),
        ]);
        let vars = all_vars(&init);
        for_each_subdomain(&init, &vars, 1 << 20, |d| {
            assert!(d.stronger(&init));
            assert!(!d.is_false());
            true
        })
        .unwrap();
    }

    #[test]
    fn cap_is_enforced() {
        let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, 10))]);
        let vars = all_vars(&init);
        let r = for_each_subdomain(&init, &vars, 10, |_| true);
        assert!(matches!(r, Err(Error::CapExceeded { .. })));
    }
}
