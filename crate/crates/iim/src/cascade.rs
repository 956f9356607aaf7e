//! Synchronous failure propagation and the sets derived from it.
//!
//! Failure spreads in unit time steps. The failed set at step t is evaluated
//! against the failed set at step t-1 only, so within one step the order of
//! rule evaluation is irrelevant. Failed entities stay failed; hardened
//! entities never fail at all. A system with m entities reaches its fixed
//! point within m-1 steps because each step before the fixed point fails at
//! least one new entity.

use crate::system::{EntityId, EntitySet, System};

/// Cumulative failed set at one time step.
pub type FailureState = EntitySet;

/// Entities made resistant to both initial and induced failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardeningPlan {
    pub hardened: EntitySet,
}

impl HardeningPlan {
    pub fn none(system: &System) -> Self {
        HardeningPlan {
            hardened: system.empty_set(),
        }
    }

    pub fn of(hardened: EntitySet) -> Self {
        HardeningPlan { hardened }
    }

    pub fn from_labels<I, S>(system: &System, labels: I) -> crate::error::Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Ok(HardeningPlan {
            hardened: system.set_from_labels(labels)?,
        })
    }
}

/// Step-by-step record of one cascade. `steps[t]` is the cumulative failed
/// set after t steps; the last entry is the fixed point and is reached at
/// `fixed_point_time` (the first step whose extension would change nothing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeTrace {
    pub steps: Vec<FailureState>,
    pub fixed_point_time: usize,
}

impl CascadeTrace {
    pub fn final_failed(&self) -> &FailureState {
        self.steps.last().expect("trace has at least one step")
    }

    /// Step at which `e` first appears failed, if it ever does.
    pub fn first_failure_time(&self, e: EntityId) -> Option<usize> {
        self.steps.iter().position(|s| s.contains(e))
    }

    /// Failed set at step t, saturating past the fixed point.
    pub fn failed_at(&self, t: usize) -> &FailureState {
        &self.steps[t.min(self.fixed_point_time)]
    }
}

/// Runs the cascade for `initial` failures under `plan`.
///
/// Hardened entities are excluded from the initial set and skipped when
/// rules fire. An entity with a rule fails at step t exactly when it was
/// failed at t-1, or it is not hardened and every minterm of its rule
/// contained a failed entity at t-1.
pub fn cascade(system: &System, initial: &EntitySet, plan: &HardeningPlan) -> CascadeTrace {
    let mut current = initial.difference(&plan.hardened);
    let mut steps = vec![current.clone()];
    loop {
        let mut next = current.clone();
        for idr in system.idrs() {
            if next.contains(idr.target) || plan.hardened.contains(idr.target) {
                continue;
            }
            if idr.fires(&current) {
                next.insert(idr.target);
            }
        }
        if next == current {
            break;
        }
        steps.push(next.clone());
        current = next;
    }
    CascadeTrace {
        fixed_point_time: steps.len() - 1,
        steps,
    }
}

/// Every entity that fails, initially or by induction, when `seed` fails
/// with no hardening in place. Always a superset of `seed`.
pub fn kill_set(system: &System, seed: &EntitySet) -> EntitySet {
    cascade(system, seed, &HardeningPlan::none(system))
        .final_failed()
        .clone()
}

/// Entities saved by hardening `candidate` alone against `seed`: the
/// baseline kill set minus what still fails with the candidate hardened.
/// Contains the candidate itself exactly when the candidate was doomed.
pub fn protection_set(system: &System, candidate: EntityId, seed: &EntitySet) -> EntitySet {
    let mut plan = HardeningPlan::none(system);
    plan.hardened.insert(candidate);
    let saved = cascade(system, seed, &plan);
    kill_set(system, seed).difference(saved.final_failed())
}

/// Removes everything irrelevant to the cascade from `seed`.
///
/// Entities outside the kill set never fail under any hardening plan, so
/// their rules are dead and their appearances in minterms are vacuous
/// conjuncts. Stripping them can empty a minterm, which makes that rule
/// unable to fire and its target in turn never-failing (unless seeded, in
/// which case the target merely degrades to a failing source). Iterates to
/// a fixpoint and returns the reduced system together with the final
/// never-failing set. The entity table is kept intact so indices and sets
/// remain interchangeable between the two systems.
pub fn prune_system(system: &System, seed: &EntitySet) -> (System, EntitySet) {
    let killed = kill_set(system, seed);
    let never = system.full_set().difference(&killed);
    system.strip_never_failing(&never, seed)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::system::parse_system;

    pub(crate) const DEMO: &str = "\
a1 <- b2
a2 <- b2
a3 <- b4
b1 <- a1 + a2
b2 <- a1 a2
b3 <- a2 + a1 a3
b4 <- a3
";

    fn t1() -> System {
        parse_system(DEMO).unwrap()
    }

    fn set(s: &System, labels: &[&str]) -> EntitySet {
        s.set_from_labels(labels).unwrap()
    }

    #[test]
    fn two_seed_cascade_timing() {
        let s = t1();
        let tr = cascade(&s, &set(&s, &["a2", "a3"]), &HardeningPlan::none(&s));
        assert_eq!(tr.fixed_point_time, 3);
        assert_eq!(tr.steps.len(), 4);
        let at = |l: &str| tr.first_failure_time(s.entity(l).unwrap());
        assert_eq!(at("a1"), Some(2));
        assert_eq!(at("a2"), Some(0));
        assert_eq!(at("a3"), Some(0));
        assert_eq!(at("b1"), Some(3));
        assert_eq!(at("b2"), Some(1));
        assert_eq!(at("b3"), Some(1));
        assert_eq!(at("b4"), Some(1));
        assert_eq!(tr.final_failed().len(), 7);
    }

    #[test]
    fn hardening_single_entities() {
        let s = t1();
        let seed = set(&s, &["a2", "a3"]);
        let run = |h: &str| {
            let plan = HardeningPlan::from_labels(&s, [h]).unwrap();
            let tr = cascade(&s, &seed, &plan);
            s.label_vec(tr.final_failed())
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(run("a1"), ["a2", "a3", "b2", "b3", "b4"]);
        assert_eq!(run("a2"), ["a3", "b4"]);
        assert_eq!(run("a3"), ["a1", "a2", "b1", "b2", "b3"]);
    }

    #[test]
    fn empty_seed_fixed_point_immediately() {
        let s = t1();
        let tr = cascade(&s, &s.empty_set(), &HardeningPlan::none(&s));
        assert_eq!(tr.fixed_point_time, 0);
        assert!(tr.final_failed().is_empty());
    }

    #[test]
    fn sources_fail_only_when_seeded() {
        let s = parse_system("a <- b\nc\n").unwrap();
        let killed = kill_set(&s, &set(&s, &["c"]));
        assert_eq!(s.label_vec(&killed), ["c"]);
    }

    #[test]
    fn kill_set_of_isolated_entity() {
        let s = t1();
        let killed = kill_set(&s, &set(&s, &["b1"]));
        assert_eq!(s.label_vec(&killed), ["b1"]);
    }

    #[test]
    fn protection_sets_on_two_seed_example() {
        let s = t1();
        let seed = set(&s, &["a2", "a3"]);
        let ps = |l: &str| {
            let p = protection_set(&s, s.entity(l).unwrap(), &seed);
            s.label_vec(&p)
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(ps("a1"), ["a1", "b1"]);
        assert_eq!(ps("a2"), ["a1", "a2", "b1", "b2", "b3"]);
        assert_eq!(ps("a3"), ["a3", "b4"]);
        assert_eq!(ps("b1"), ["b1"]);
        assert_eq!(ps("b2"), ["a1", "b1", "b2"]);
        assert_eq!(ps("b3"), ["b3"]);
        assert_eq!(ps("b4"), ["b4"]);
    }

    #[test]
    fn protection_set_contains_candidate_iff_doomed() {
        let s = t1();
        let seed = set(&s, &["b1"]);
        // b1 is isolated: hardening anything else protects nothing.
        let ps_b1 = protection_set(&s, s.entity("b1").unwrap(), &seed);
        assert_eq!(s.label_vec(&ps_b1), ["b1"]);
        let ps_a1 = protection_set(&s, s.entity("a1").unwrap(), &seed);
        assert!(ps_a1.is_empty());
    }

    #[test]
    fn prune_keeps_live_cycle_only() {
        let s = t1();
        let seed = set(&s, &["a3"]);
        let (reduced, never) = prune_system(&s, &seed);
        assert_eq!(s.label_vec(&never), ["a1", "a2", "b1", "b2", "b3"]);
        assert_eq!(reduced.idr_count(), 2);
        let a3 = reduced.entity("a3").unwrap();
        let b4 = reduced.entity("b4").unwrap();
        let a3_rule = reduced.idr(a3).unwrap();
        assert_eq!(a3_rule.minterms.len(), 1);
        assert!(a3_rule.minterms[0].contains(b4));
        let b4_rule = reduced.idr(b4).unwrap();
        assert_eq!(b4_rule.minterms.len(), 1);
        assert!(b4_rule.minterms[0].contains(a3));
        // Reduced cascade agrees with the original on surviving entities.
        assert_eq!(kill_set(&reduced, &seed), kill_set(&s, &seed));
    }

    #[test]
    fn prune_keeps_seeded_source_after_rule_goes_vacuous() {
        // q never fails, so a's only minterm empties out; a stays a failing
        // source because it is seeded.
        let s = parse_system("a <- q\n").unwrap();
        let seed = set(&s, &["a"]);
        let (reduced, never) = prune_system(&s, &seed);
        assert_eq!(s.label_vec(&never), ["q"]);
        assert_eq!(reduced.idr_count(), 0);
        assert_eq!(kill_set(&reduced, &seed), kill_set(&s, &seed));
    }

    #[test]
    fn prune_cascades_vacuous_rules() {
        // q never fails; stripping it empties a's rule, then a never fails,
        // then b's rule empties too.
        let s = parse_system("a <- q\nb <- a\nc <- z\nz\n").unwrap();
        let seed = set(&s, &["z"]);
        let (reduced, never) = prune_system(&s, &seed);
        assert_eq!(s.label_vec(&never), ["a", "b", "q"]);
        assert_eq!(reduced.idr_count(), 1);
        assert_eq!(kill_set(&reduced, &seed), kill_set(&s, &seed));
    }
}
