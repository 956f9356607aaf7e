//! Exhaustive solvers. Exponential in the worst case, so each search checks
//! its candidate-subset count against a cap first and refuses instances that
//! would blow past it.

use std::time::Instant;

use itertools::Itertools;

use crate::cascade::{cascade, kill_set, HardeningPlan};
use crate::error::{Error, Result};
use crate::instance::{EnhInstance, SolveReport, TehInstance};
use crate::system::{EntityId, EntitySet, System};

/// Default bound on how many candidate subsets a search may enumerate.
pub const DEFAULT_SUBSET_CAP: u64 = 1 << 26;

/// Binomial coefficient, saturating; good enough for cap comparisons.
fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u128::MAX / 2 {
            return u128::MAX / 2;
        }
    }
    acc
}

fn subsets_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |a, i| a.saturating_add(binom(n, i)))
}

fn set_of(system: &System, members: &[&EntityId]) -> EntitySet {
    let mut s = system.empty_set();
    for e in members {
        s.insert(**e);
    }
    s
}

/// Best hardening plan within the budget, by full enumeration.
///
/// Candidates come from the kill set of the initial failures: hardening an
/// entity that never fails changes nothing. Maximizes the protected count;
/// ties go to the lexicographically smallest label set. A budget covering
/// every initially failing entity trivially protects everything.
pub fn solve_enh_exact(inst: &EnhInstance) -> Result<SolveReport> {
    solve_enh_exact_capped(inst, DEFAULT_SUBSET_CAP)
}

pub fn solve_enh_exact_capped(inst: &EnhInstance, cap: u64) -> Result<SolveReport> {
    let start = Instant::now();
    let sys = inst.system;
    if inst.budget >= inst.initial.len() {
        let plan = HardeningPlan::of(inst.initial.clone());
        return Ok(SolveReport::build(
            sys,
            &inst.initial,
            plan,
            "exact",
            start.elapsed(),
        ));
    }
    let baseline = kill_set(sys, &inst.initial);
    let candidates: Vec<EntityId> = baseline.iter().collect();
    let depth = inst.budget.min(candidates.len());
    let total = subsets_up_to(candidates.len(), depth);
    if total > cap as u128 {
        return Err(Error::InstanceTooLarge {
            subsets: total,
            cap,
        });
    }
    let mut best: Option<(usize, EntitySet)> = None;
    for size in 0..=depth {
        for combo in candidates.iter().combinations(size) {
            let h = set_of(sys, &combo);
            let plan = HardeningPlan::of(h.clone());
            let failed = cascade(sys, &inst.initial, &plan).final_failed().len();
            let protected = baseline.len() - failed;
            let replace = match &best {
                None => true,
                Some((p, h0)) => protected > *p || (protected == *p && h.lex_cmp(h0).is_lt()),
            };
            if replace {
                best = Some((protected, h));
            }
        }
    }
    let (_, hardened) = best.expect("size-0 subset always evaluated");
    Ok(SolveReport::build(
        sys,
        &inst.initial,
        HardeningPlan::of(hardened),
        "exact",
        start.elapsed(),
    ))
}

/// Minimum-cardinality hardening that keeps every protected entity alive,
/// by increasing-size enumeration.
///
/// Hardening the initial failures themselves always works, so a solution
/// exists; searching sizes in increasing order and subsets of each size in
/// lexicographic label order returns the smallest, lexicographically first
/// feasible plan.
pub fn solve_teh_exact(inst: &TehInstance) -> Result<SolveReport> {
    solve_teh_exact_capped(inst, DEFAULT_SUBSET_CAP)
}

pub fn solve_teh_exact_capped(inst: &TehInstance, cap: u64) -> Result<SolveReport> {
    let start = Instant::now();
    let sys = inst.system;
    let baseline = kill_set(sys, &inst.initial);
    let candidates: Vec<EntityId> = baseline.iter().collect();
    let mut examined: u128 = 0;
    for size in 0..=candidates.len() {
        examined = examined.saturating_add(binom(candidates.len(), size));
        if examined > cap as u128 {
            return Err(Error::InstanceTooLarge {
                subsets: examined,
                cap,
            });
        }
        for combo in candidates.iter().combinations(size) {
            let h = set_of(sys, &combo);
            let plan = HardeningPlan::of(h);
            let survives = cascade(sys, &inst.initial, &plan);
            if !survives.final_failed().intersects(&inst.protect) {
                return Ok(SolveReport::build(
                    sys,
                    &inst.initial,
                    plan,
                    "exact",
                    start.elapsed(),
                ));
            }
        }
    }
    unreachable!("hardening every doomed entity is always feasible")
}

/// Result of a most-damaging-seed search.
#[derive(Debug, Clone)]
pub struct VulnerabilityReport {
    pub seeds: EntitySet,
    pub kill_count: usize,
    /// False when the subset space exceeded the cap and a greedy
    /// marginal-growth search was used instead.
    pub exhaustive: bool,
}

/// Seed set of size `k` with the largest kill set.
///
/// Exhaustive when C(n, k) fits under `cap`, ties broken by
/// lexicographically smallest label set. Otherwise falls back to a greedy
/// search that grows the seed one entity at a time by marginal kill-set
/// gain; the report records which search ran.
pub fn k_most_vulnerable(system: &System, k: usize, cap: u64) -> VulnerabilityReport {
    let n = system.len();
    let k = k.min(n);
    let candidates: Vec<EntityId> = system.entities().collect();
    if binom(n, k) <= cap as u128 {
        let mut best: Option<(usize, EntitySet)> = None;
        for combo in candidates.iter().combinations(k) {
            let seed = set_of(system, &combo);
            let count = kill_set(system, &seed).len();
            if best.as_ref().is_none_or(|(c, _)| count > *c) {
                best = Some((count, seed));
            }
        }
        let (kill_count, seeds) = best.expect("k <= n always yields one subset");
        VulnerabilityReport {
            seeds,
            kill_count,
            exhaustive: true,
        }
    } else {
        let mut seeds = system.empty_set();
        for _ in 0..k {
            let mut pick: Option<(usize, EntityId)> = None;
            for e in &candidates {
                if seeds.contains(*e) {
                    continue;
                }
                let mut trial = seeds.clone();
                trial.insert(*e);
                let count = kill_set(system, &trial).len();
                if pick.is_none_or(|(c, _)| count > c) {
                    pick = Some((count, *e));
                }
            }
            match pick {
                Some((_, e)) => seeds.insert(e),
                None => break,
            }
        }
        let kill_count = kill_set(system, &seeds).len();
        VulnerabilityReport {
            seeds,
            kill_count,
            exhaustive: false,
        }
    }
}
