//! Problem instances, solver reports, and the instance file format.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cascade::{cascade, kill_set, HardeningPlan};
use crate::error::Result;
use crate::system::{EntitySet, System};

/// Hardening under a budget: harden at most `budget` entities so that as few
/// entities as possible are lost to the cascade seeded by `initial`.
#[derive(Debug, Clone)]
pub struct EnhInstance<'a> {
    pub system: &'a System,
    /// Initially failing entities.
    pub initial: EntitySet,
    /// Maximum number of entities that may be hardened.
    pub budget: usize,
    /// Optional decision bound: acceptable number of failed entities.
    pub failure_threshold: Option<usize>,
}

impl<'a> EnhInstance<'a> {
    pub fn new(system: &'a System, initial: EntitySet, budget: usize) -> Self {
        EnhInstance {
            system,
            initial,
            budget,
            failure_threshold: None,
        }
    }
}

/// Hardening for a priority set: find a minimum set of entities to harden so
/// that nothing in `protect` fails.
#[derive(Debug, Clone)]
pub struct TehInstance<'a> {
    pub system: &'a System,
    pub initial: EntitySet,
    /// Entities that must survive. Only entities that would actually fail
    /// belong here; the constructor drops the rest.
    pub protect: EntitySet,
}

impl<'a> TehInstance<'a> {
    /// Builds the instance, dropping protect entries that never fail anyway.
    /// Returns the dropped labels so callers can warn about them.
    pub fn new(system: &'a System, initial: EntitySet, protect: EntitySet) -> (Self, Vec<String>) {
        let killed = kill_set(system, &initial);
        let keep = protect.intersection(&killed);
        let dropped = protect
            .difference(&killed)
            .iter()
            .map(|e| system.label(e).to_string())
            .collect();
        (
            TehInstance {
                system,
                initial,
                protect: keep,
            },
            dropped,
        )
    }
}

/// Outcome of one solve. `protected` counts entities that fail in the
/// unhardened baseline but survive under the plan, so it is never negative
/// (hardening cannot enlarge the failed set).
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub plan: HardeningPlan,
    pub baseline_failed: usize,
    pub failed_with_plan: usize,
    pub protected: usize,
    pub method: String,
    pub wall_time: Duration,
}

impl SolveReport {
    /// Runs the baseline and planned cascades and fills in the counts.
    pub(crate) fn build(
        system: &System,
        initial: &EntitySet,
        plan: HardeningPlan,
        method: &str,
        wall_time: Duration,
    ) -> SolveReport {
        let baseline_failed = kill_set(system, initial).len();
        let failed_with_plan = cascade(system, initial, &plan).final_failed().len();
        SolveReport {
            plan,
            baseline_failed,
            failed_with_plan,
            protected: baseline_failed - failed_with_plan,
            method: method.to_string(),
            wall_time,
        }
    }

    /// Decision form of the budgeted problem: does the plan keep the number
    /// of failed entities within `bound`?
    pub fn meets_failure_threshold(&self, bound: usize) -> bool {
        self.failed_with_plan <= bound
    }
}

/// On-disk instance description, complementing a system file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub initial_failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protect: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardened: Option<Vec<String>>,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance spec serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;

    #[test]
    fn teh_instance_drops_never_failing_protects() {
        let s = parse_system("a <- b\nc\n").unwrap();
        let initial = s.set_from_labels(["b"]).unwrap();
        let protect = s.set_from_labels(["a", "c"]).unwrap();
        let (inst, dropped) = TehInstance::new(&s, initial, protect);
        assert_eq!(s.label_vec(&inst.protect), ["a"]);
        assert_eq!(dropped, ["c"]);
    }

    #[test]
    fn instance_spec_round_trip() {
        let spec = InstanceSpec {
            initial_failures: vec!["a2".into(), "a3".into()],
            budget: Some(1),
            protect: None,
            hardened: Some(vec![]),
        };
        let back = InstanceSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back.initial_failures, spec.initial_failures);
        assert_eq!(back.budget, Some(1));
        assert!(back.protect.is_none());
        assert_eq!(back.hardened.as_deref(), Some(&[][..]));
    }

    #[test]
    fn report_counts_protected_against_baseline() {
        let s = parse_system(crate::cascade::tests::DEMO).unwrap();
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        let plan = HardeningPlan::from_labels(&s, ["a2"]).unwrap();
        let r = SolveReport::build(&s, &initial, plan, "probe", Duration::ZERO);
        assert_eq!(r.baseline_failed, 7);
        assert_eq!(r.failed_with_plan, 2);
        assert_eq!(r.protected, 5);
        assert!(r.meets_failure_threshold(2));
        assert!(!r.meets_failure_threshold(1));
    }
}
