//! Greedy hardening planners.
//!
//! Both planners run on a pruned copy of the system. Each round hardens the
//! candidate whose protection set is most valuable, then shrinks the problem
//! by treating the saved entities as never-failing, so later rounds score
//! only what is still at risk.

use std::time::Instant;

use crate::cascade::{kill_set, protection_set, prune_system, HardeningPlan};
use crate::error::Result;
use crate::instance::{EnhInstance, SolveReport, TehInstance};
use crate::metrics::{cfmhv, pcfmhv};
use crate::system::{EntityId, EntitySet, System};

fn pick_enh(work: &System, seed: &EntitySet, killed: &EntitySet) -> (EntityId, EntitySet) {
    let mut tied: Vec<(EntityId, EntitySet)> = Vec::new();
    let mut best_len = 0;
    for e in killed.iter() {
        let ps = protection_set(work, e, seed);
        if tied.is_empty() || ps.len() > best_len {
            best_len = ps.len();
            tied = vec![(e, ps)];
        } else if ps.len() == best_len {
            tied.push((e, ps));
        }
    }
    if tied.len() == 1 {
        return tied.pop().unwrap();
    }
    // Size tie: higher cumulative influence wins, then the smaller label.
    // Candidates arrive in ascending label order, so strict improvement
    // keeps the first of a tie.
    let mut winner = None;
    let mut top = None;
    for (e, ps) in tied {
        let score = cfmhv(work, e, seed);
        if top.as_ref().is_none_or(|t| score > *t) {
            top = Some(score);
            winner = Some((e, ps));
        }
    }
    winner.expect("killed set is non-empty")
}

/// Budgeted hardening by greedy protection-set growth.
///
/// Each round hardens the entity saving the most, preferring higher
/// cumulative influence and then the smaller label on ties. A budget
/// covering every initial failure stops the cascade outright, so that plan
/// is returned without searching.
pub fn solve_enh_heuristic(inst: &EnhInstance) -> Result<SolveReport> {
    let start = Instant::now();
    let sys = inst.system;
    if inst.budget >= inst.initial.len() {
        let plan = HardeningPlan::of(inst.initial.clone());
        return Ok(SolveReport::build(
            sys,
            &inst.initial,
            plan,
            "heuristic",
            start.elapsed(),
        ));
    }
    let mut hardened = sys.empty_set();
    let (mut work, _) = prune_system(sys, &inst.initial);
    let mut seed = inst.initial.clone();
    while hardened.len() < inst.budget {
        let killed = kill_set(&work, &seed);
        if killed.is_empty() {
            break;
        }
        let (e, ps) = pick_enh(&work, &seed, &killed);
        hardened.insert(e);
        seed.remove(e);
        let (next, _) = work.strip_never_failing(&ps, &seed);
        work = next;
    }
    Ok(SolveReport::build(
        sys,
        &inst.initial,
        HardeningPlan::of(hardened),
        "heuristic",
        start.elapsed(),
    ))
}

fn pick_teh(
    work: &System,
    seed: &EntitySet,
    killed: &EntitySet,
    remaining: &EntitySet,
) -> Option<(EntityId, EntitySet)> {
    let mut tied: Vec<(EntityId, EntitySet)> = Vec::new();
    let mut best_cover = 0;
    for e in killed.iter() {
        let ps = protection_set(work, e, seed);
        let cover = ps.intersection_len(remaining);
        if cover == 0 {
            continue;
        }
        if tied.is_empty() || cover > best_cover {
            best_cover = cover;
            tied = vec![(e, ps)];
        } else if cover == best_cover {
            tied.push((e, ps));
        }
    }
    if tied.len() <= 1 {
        return tied.pop();
    }
    let mut winner = None;
    let mut top = None;
    for (e, ps) in tied {
        let score = pcfmhv(work, e, seed, remaining);
        if top.as_ref().is_none_or(|t| score > *t) {
            top = Some(score);
            winner = Some((e, ps));
        }
    }
    winner
}

/// Priority-set hardening by greedy cover.
///
/// Each round hardens the entity saving the most still-unprotected priority
/// entities, preferring higher priority-scoped influence and then the
/// smaller label on ties. Should the accumulated plan ever reach the size of
/// the initial-failure set, hardening that set (always feasible, stops the
/// cascade at the source) is used instead.
pub fn solve_teh_heuristic(inst: &TehInstance) -> Result<SolveReport> {
    let start = Instant::now();
    let sys = inst.system;
    let mut hardened = sys.empty_set();
    let (mut work, _) = prune_system(sys, &inst.initial);
    let mut seed = inst.initial.clone();
    let mut remaining = inst.protect.clone();
    while !remaining.is_empty() {
        if hardened.len() >= inst.initial.len() {
            hardened = inst.initial.clone();
            break;
        }
        let killed = kill_set(&work, &seed);
        let Some((e, ps)) = pick_teh(&work, &seed, &killed, &remaining) else {
            // Every remaining priority entity still fails and saves at least
            // itself when hardened, so no candidate covering zero can be the
            // whole field. Kept as a safety net.
            hardened.union_with(&remaining);
            break;
        };
        hardened.insert(e);
        seed.remove(e);
        remaining.subtract(&ps);
        let (next, _) = work.strip_never_failing(&ps, &seed);
        work = next;
    }
    Ok(SolveReport::build(
        sys,
        &inst.initial,
        HardeningPlan::of(hardened),
        "heuristic",
        start.elapsed(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;

    fn t1() -> System {
        parse_system(crate::cascade::tests::DEMO).unwrap()
    }

    #[test]
    fn enh_matches_exact_on_small_example() {
        let s = t1();
        let inst = EnhInstance::new(&s, s.set_from_labels(["a2", "a3"]).unwrap(), 1);
        let r = solve_enh_heuristic(&inst).unwrap();
        assert_eq!(s.label_vec(&r.plan.hardened), ["a2"]);
        assert_eq!(r.protected, 5);
    }

    #[test]
    fn enh_budget_covering_seeds_protects_everything() {
        let s = t1();
        let inst = EnhInstance::new(&s, s.set_from_labels(["a2", "a3"]).unwrap(), 2);
        let r = solve_enh_heuristic(&inst).unwrap();
        assert_eq!(s.label_vec(&r.plan.hardened), ["a2", "a3"]);
        assert_eq!(r.failed_with_plan, 0);
    }

    #[test]
    fn enh_influence_breaks_size_ties() {
        // e1 and e2 both save two entities, but x2 feeds two doomed rules
        // where x1 feeds one, so e2 carries more influence than e1.
        let s = parse_system("x1 <- e1\nx2 <- e2\ny1 <- x1 x2\ny2 <- x2 y1\n").unwrap();
        let inst = EnhInstance::new(&s, s.set_from_labels(["e1", "e2"]).unwrap(), 1);
        let r = solve_enh_heuristic(&inst).unwrap();
        assert_eq!(s.label_vec(&r.plan.hardened), ["e2"]);
        assert_eq!(r.protected, 2);
    }

    #[test]
    fn enh_spends_budget_across_rounds() {
        let s =
            parse_system("p1 <- s1\np2 <- p1\np3 <- p2\nq1 <- s2\nq2 <- q1\nr1 <- s3\n").unwrap();
        let seed = s.set_from_labels(["s1", "s2", "s3"]).unwrap();
        let inst = EnhInstance::new(&s, seed, 2);
        let r = solve_enh_heuristic(&inst).unwrap();
        assert_eq!(s.label_vec(&r.plan.hardened), ["s1", "s2"]);
        assert_eq!(r.protected, 7);
        assert_eq!(r.failed_with_plan, 2);
    }

    #[test]
    fn teh_single_protect() {
        let s = t1();
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        let protect = s.set_from_labels(["b4"]).unwrap();
        let (inst, _) = TehInstance::new(&s, initial, protect);
        let r = solve_teh_heuristic(&inst).unwrap();
        assert_eq!(s.label_vec(&r.plan.hardened), ["a3"]);
        assert_eq!(r.protected, 2);
    }

    #[test]
    fn teh_two_protects() {
        let s = t1();
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        let protect = s.set_from_labels(["a1", "b4"]).unwrap();
        let (inst, _) = TehInstance::new(&s, initial, protect);
        let r = solve_teh_heuristic(&inst).unwrap();
        assert_eq!(s.label_vec(&r.plan.hardened), ["a1", "a3"]);
        let tr = crate::cascade::cascade(&s, &inst.initial, &r.plan);
        assert!(!tr.final_failed().intersects(&inst.protect));
    }

    #[test]
    fn teh_empty_protect_is_empty_plan() {
        let s = t1();
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        let (inst, _) = TehInstance::new(&s, initial, s.empty_set());
        let r = solve_teh_heuristic(&inst).unwrap();
        assert!(r.plan.hardened.is_empty());
    }

    #[test]
    fn teh_falls_back_to_hardening_all_seeds() {
        // Three mid-layer entities each shield one priority entity, and each
        // fails when either seed does. The greedy would harden all three
        // mids; hardening the two seeds is smaller and stops everything.
        let s =
            parse_system("m1 <- s1 s2\nm2 <- s1 s2\nm3 <- s1 s2\nq1 <- m1\nq2 <- m2\nq3 <- m3\n")
                .unwrap();
        let initial = s.set_from_labels(["s1", "s2"]).unwrap();
        let protect = s.set_from_labels(["q1", "q2", "q3"]).unwrap();
        let (inst, _) = TehInstance::new(&s, initial, protect);
        let r = solve_teh_heuristic(&inst).unwrap();
        assert_eq!(s.label_vec(&r.plan.hardened), ["s1", "s2"]);
        assert_eq!(r.failed_with_plan, 0);
    }
}
