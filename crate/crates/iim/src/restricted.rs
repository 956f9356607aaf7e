//! Polynomial solvers for restricted rule shapes.
//!
//! With every minterm a single entity, protected sets decompose: a plan
//! protects exactly the union of its members' protection sets. When each
//! rule is additionally a single minterm, the protection-set family is
//! laminar, and the greedy plans below are optimal rather than approximate.

use std::time::Instant;

use crate::cascade::{kill_set, protection_set, prune_system, HardeningPlan};
use crate::error::{Error, Result};
use crate::instance::{EnhInstance, SolveReport, TehInstance};
use crate::system::{EntityId, EntitySet, System};

/// How constrained a system's rules are. Each variant admits everything the
/// previous one does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdrClass {
    /// Every rule is one minterm of one entity.
    SingleDependency,
    /// Every minterm is one entity; rules may have several.
    Disjunctive,
    General,
}

impl IdrClass {
    pub fn name(self) -> &'static str {
        match self {
            IdrClass::SingleDependency => "single-dependency",
            IdrClass::Disjunctive => "disjunctive",
            IdrClass::General => "general",
        }
    }
}

/// Most restrictive class the system fits. A system without rules is
/// trivially single-dependency.
pub fn classify(system: &System) -> IdrClass {
    let mut class = IdrClass::SingleDependency;
    for idr in system.idrs() {
        if idr.minterms.iter().any(|m| m.size() > 1) {
            return IdrClass::General;
        }
        if idr.minterms.len() > 1 {
            class = IdrClass::Disjunctive;
        }
    }
    class
}

fn require(system: &System, required: IdrClass) -> Result<()> {
    let found = classify(system);
    let ok = match required {
        IdrClass::SingleDependency => found == IdrClass::SingleDependency,
        IdrClass::Disjunctive => found != IdrClass::General,
        IdrClass::General => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::WrongClass {
            required: required.name(),
            found: found.name(),
        })
    }
}

/// Budgeted greedy: repeatedly harden the entity with the largest protection
/// set (smaller label on ties), then treat the saved entities as
/// never-failing. Thanks to the union property this maximizes coverage
/// round by round.
fn greedy_budget(sys: &System, initial: &EntitySet, budget: usize) -> EntitySet {
    if budget >= initial.len() {
        return initial.clone();
    }
    let mut hardened = sys.empty_set();
    let (mut work, _) = prune_system(sys, initial);
    let mut seed = initial.clone();
    while hardened.len() < budget {
        let killed = kill_set(&work, &seed);
        if killed.is_empty() {
            break;
        }
        let mut best: Option<(usize, EntityId, EntitySet)> = None;
        for e in killed.iter() {
            let ps = protection_set(&work, e, &seed);
            if best.as_ref().is_none_or(|(l, _, _)| ps.len() > *l) {
                best = Some((ps.len(), e, ps));
            }
        }
        let (_, e, ps) = best.expect("killed set is non-empty");
        hardened.insert(e);
        seed.remove(e);
        let (next, _) = work.strip_never_failing(&ps, &seed);
        work = next;
    }
    hardened
}

/// Cover greedy: repeatedly harden the entity saving the most
/// still-unprotected priority entities (smaller label on ties).
fn greedy_cover(sys: &System, initial: &EntitySet, protect: &EntitySet) -> EntitySet {
    let mut hardened = sys.empty_set();
    let (mut work, _) = prune_system(sys, initial);
    let mut seed = initial.clone();
    let mut remaining = protect.clone();
    while !remaining.is_empty() {
        let killed = kill_set(&work, &seed);
        let mut best: Option<(usize, EntityId, EntitySet)> = None;
        for e in killed.iter() {
            let ps = protection_set(&work, e, &seed);
            let cover = ps.intersection_len(&remaining);
            if cover == 0 {
                continue;
            }
            if best.as_ref().is_none_or(|(c, _, _)| cover > *c) {
                best = Some((cover, e, ps));
            }
        }
        let Some((_, e, ps)) = best else {
            // Unreachable: a remaining priority entity still fails and its
            // own protection set covers it. Kept as a safety net.
            hardened.union_with(&remaining);
            break;
        };
        hardened.insert(e);
        seed.remove(e);
        remaining.subtract(&ps);
        let (next, _) = work.strip_never_failing(&ps, &seed);
        work = next;
    }
    hardened
}

/// Budgeted hardening for single-dependency systems. The protection-set
/// family is laminar there, which makes the greedy plan optimal.
pub fn solve_enh_case1(inst: &EnhInstance) -> Result<SolveReport> {
    let start = Instant::now();
    require(inst.system, IdrClass::SingleDependency)?;
    let hardened = greedy_budget(inst.system, &inst.initial, inst.budget);
    Ok(SolveReport::build(
        inst.system,
        &inst.initial,
        HardeningPlan::of(hardened),
        "case1",
        start.elapsed(),
    ))
}

/// Minimum hardening keeping the priority set alive, for single-dependency
/// systems. Laminarity again makes the greedy cover optimal.
pub fn solve_teh_case1(inst: &TehInstance) -> Result<SolveReport> {
    let start = Instant::now();
    require(inst.system, IdrClass::SingleDependency)?;
    let hardened = greedy_cover(inst.system, &inst.initial, &inst.protect);
    Ok(SolveReport::build(
        inst.system,
        &inst.initial,
        HardeningPlan::of(hardened),
        "case1",
        start.elapsed(),
    ))
}

/// Budgeted hardening for disjunctive systems: maximum-coverage greedy,
/// within 1 - 1/e of optimal by the union property.
pub fn solve_enh_case2_maxcov(inst: &EnhInstance) -> Result<SolveReport> {
    let start = Instant::now();
    require(inst.system, IdrClass::Disjunctive)?;
    let hardened = greedy_budget(inst.system, &inst.initial, inst.budget);
    Ok(SolveReport::build(
        inst.system,
        &inst.initial,
        HardeningPlan::of(hardened),
        "case2",
        start.elapsed(),
    ))
}

/// Priority-set hardening for disjunctive systems: set-cover greedy, within
/// a logarithmic factor of the minimum.
pub fn solve_teh_case2_setcover(inst: &TehInstance) -> Result<SolveReport> {
    let start = Instant::now();
    require(inst.system, IdrClass::Disjunctive)?;
    let hardened = greedy_cover(inst.system, &inst.initial, &inst.protect);
    Ok(SolveReport::build(
        inst.system,
        &inst.initial,
        HardeningPlan::of(hardened),
        "case2",
        start.elapsed(),
    ))
}

/// One member of the family inspected by [`check_laminar_protection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySet {
    /// Protection set of an entity the cascade would claim.
    Protection(EntityId),
    /// Kill set of a single seed entity.
    SeedKill(EntityId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaminarViolation {
    pub first: FamilySet,
    pub second: FamilySet,
}

/// Checks that protection sets (and per-seed kill sets) are pairwise nested
/// or disjoint under `seed`, returning a crossing pair if not. Guaranteed to
/// return `None` on single-dependency systems; elsewhere it documents when
/// the optimality argument happens to carry over.
pub fn check_laminar_protection(system: &System, seed: &EntitySet) -> Option<LaminarViolation> {
    let mut family: Vec<(FamilySet, EntitySet)> = Vec::new();
    for e in kill_set(system, seed).iter() {
        family.push((FamilySet::Protection(e), protection_set(system, e, seed)));
    }
    for s in seed.iter() {
        let mut only = system.empty_set();
        only.insert(s);
        family.push((FamilySet::SeedKill(s), kill_set(system, &only)));
    }
    for (i, (fa, sa)) in family.iter().enumerate() {
        for (fb, sb) in family.iter().skip(i + 1) {
            if sa.intersects(sb) && !sa.is_subset(sb) && !sb.is_subset(sa) {
                return Some(LaminarViolation {
                    first: *fa,
                    second: *fb,
                });
            }
        }
    }
    None
}
