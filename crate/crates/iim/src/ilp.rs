//! Integer-program encodings of the hardening problems.
//!
//! The cascade is unrolled over time steps d in [0, n-1], enough for any
//! fixed point on n entities. All variables are binary and all coefficients
//! integer. The encodings are written to CPLEX LP text for external
//! solvers; no solver is bundled. What ships instead is a checker that
//! evaluates a cascade trace against every constraint, which keeps the
//! encoding honest.

use std::collections::HashMap;
use std::fmt;

use crate::cascade::{CascadeTrace, HardeningPlan};
use crate::instance::{EnhInstance, TehInstance};
use crate::system::{EntityId, EntitySet, System};

/// Binary decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// x: entity has failed at or before a step.
    Failed { entity: EntityId, step: usize },
    /// q: entity is hardened.
    Hardened { entity: EntityId },
    /// g: entity is an initial failure. Pinned by equality rows.
    Seeded { entity: EntityId },
    /// c: some member of a multi-entity minterm has failed before a step.
    MintermHit { aux: usize, step: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// One linear row: `terms relation rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(i64, Var)>,
    pub relation: Relation,
    pub rhs: i64,
}

/// A fully unrolled instance. Build with [`encode_enh_ilp`] or
/// [`encode_teh_ilp`].
#[derive(Debug, Clone)]
pub struct IlpEncoding {
    labels: Vec<String>,
    seed: EntitySet,
    aux_members: Vec<EntitySet>,
    steps: usize,
    pub objective: Vec<(i64, Var)>,
    pub constraints: Vec<Constraint>,
}

enum Mode {
    /// Minimize final failures under a hardening budget.
    Budget(usize),
    /// Minimize hardenings while the given entities must survive.
    Keep(EntitySet),
}

/// Multi-entity minterms in entity order, each getting one indicator chain.
fn collect_aux(system: &System) -> (Vec<EntitySet>, HashMap<(u32, usize), usize>) {
    let mut members = Vec::new();
    let mut index = HashMap::new();
    for e in system.entities() {
        let Some(idr) = system.idr(e) else { continue };
        for (mi, m) in idr.minterms.iter().enumerate() {
            if m.size() > 1 {
                index.insert((e.0, mi), members.len());
                members.push(m.members().clone());
            }
        }
    }
    (members, index)
}

fn encode(system: &System, seed: &EntitySet, mode: Mode) -> IlpEncoding {
    let n = system.len();
    let (aux_members, aux_index) = collect_aux(system);
    let mut rows: Vec<Constraint> = Vec::new();

    for e in system.entities() {
        rows.push(Constraint {
            name: format!("seed_{}", system.label(e)),
            terms: vec![(1, Var::Seeded { entity: e })],
            relation: Relation::Eq,
            rhs: seed.contains(e) as i64,
        });
    }

    let objective = match &mode {
        Mode::Budget(k) => {
            rows.push(Constraint {
                name: "budget".to_string(),
                terms: system
                    .entities()
                    .map(|e| (1, Var::Hardened { entity: e }))
                    .collect(),
                relation: Relation::Le,
                rhs: *k as i64,
            });
            system
                .entities()
                .map(|e| {
                    (
                        1,
                        Var::Failed {
                            entity: e,
                            step: n - 1,
                        },
                    )
                })
                .collect()
        }
        Mode::Keep(protect) => {
            for p in protect.iter() {
                rows.push(Constraint {
                    name: format!("keep_{}", system.label(p)),
                    terms: vec![(
                        1,
                        Var::Failed {
                            entity: p,
                            step: n - 1,
                        },
                    )],
                    relation: Relation::Eq,
                    rhs: 0,
                });
            }
            system
                .entities()
                .map(|e| (1, Var::Hardened { entity: e }))
                .collect()
        }
    };

    // Step 0 pins the surviving seed: failed iff seeded and not hardened.
    for e in system.entities() {
        rows.push(Constraint {
            name: format!("t0_lo_{}", system.label(e)),
            terms: vec![
                (1, Var::Failed { entity: e, step: 0 }),
                (-1, Var::Seeded { entity: e }),
                (1, Var::Hardened { entity: e }),
            ],
            relation: Relation::Ge,
            rhs: 0,
        });
        rows.push(Constraint {
            name: format!("t0_hi_{}", system.label(e)),
            terms: vec![
                (1, Var::Failed { entity: e, step: 0 }),
                (-1, Var::Seeded { entity: e }),
            ],
            relation: Relation::Le,
            rhs: 0,
        });
    }

    // Failure is cumulative.
    for e in system.entities() {
        for d in 1..n {
            rows.push(Constraint {
                name: format!("mono_{}_{}", system.label(e), d),
                terms: vec![
                    (1, Var::Failed { entity: e, step: d }),
                    (
                        -1,
                        Var::Failed {
                            entity: e,
                            step: d - 1,
                        },
                    ),
                ],
                relation: Relation::Ge,
                rhs: 0,
            });
        }
    }

    // A minterm indicator must rise once any member has failed.
    for (a, members) in aux_members.iter().enumerate() {
        let size = members.len() as i64;
        for d in 1..n {
            let mut terms = vec![(size, Var::MintermHit { aux: a, step: d })];
            for j in members.iter() {
                terms.push((
                    -1,
                    Var::Failed {
                        entity: j,
                        step: d - 1,
                    },
                ));
            }
            rows.push(Constraint {
                name: format!("hit_{a}_{d}"),
                terms,
                relation: Relation::Ge,
                rhs: 0,
            });
        }
    }

    // Rule propagation. A rule with one minterm bounds its target straight
    // from the members; a rule with several works through the indicators
    // (single-entity minterms stand for themselves). Hardening relieves the
    // lower bounds, seeding relieves the upper ones.
    for e in system.entities() {
        let Some(idr) = system.idr(e) else { continue };
        let label = system.label(e);
        for d in 1..n {
            if let [only] = idr.minterms.as_slice() {
                let size = only.size() as i64;
                let mut lo = vec![(size, Var::Failed { entity: e, step: d })];
                let mut hi = vec![(1, Var::Failed { entity: e, step: d })];
                for j in only.members().iter() {
                    lo.push((
                        -1,
                        Var::Failed {
                            entity: j,
                            step: d - 1,
                        },
                    ));
                    hi.push((
                        -1,
                        Var::Failed {
                            entity: j,
                            step: d - 1,
                        },
                    ));
                }
                lo.push((size, Var::Hardened { entity: e }));
                hi.push((-1, Var::Seeded { entity: e }));
                rows.push(Constraint {
                    name: format!("fire_lo_{label}_{d}"),
                    terms: lo,
                    relation: Relation::Ge,
                    rhs: 0,
                });
                rows.push(Constraint {
                    name: format!("fire_hi_{label}_{d}"),
                    terms: hi,
                    relation: Relation::Le,
                    rhs: 0,
                });
            } else {
                let m = idr.minterms.len() as i64;
                let ind = |mi: usize, minterm: &crate::system::Minterm| -> Var {
                    if minterm.size() == 1 {
                        let entity = minterm.members().iter().next().unwrap();
                        Var::Failed {
                            entity,
                            step: d - 1,
                        }
                    } else {
                        Var::MintermHit {
                            aux: aux_index[&(e.0, mi)],
                            step: d - 1,
                        }
                    }
                };
                let mut lo = vec![(1, Var::Failed { entity: e, step: d })];
                let mut hi = vec![(m, Var::Failed { entity: e, step: d })];
                for (mi, minterm) in idr.minterms.iter().enumerate() {
                    lo.push((-1, ind(mi, minterm)));
                    hi.push((-1, ind(mi, minterm)));
                }
                lo.push((1, Var::Hardened { entity: e }));
                hi.push((-m, Var::Seeded { entity: e }));
                rows.push(Constraint {
                    name: format!("fire_lo_{label}_{d}"),
                    terms: lo,
                    relation: Relation::Ge,
                    rhs: -(m - 1),
                });
                rows.push(Constraint {
                    name: format!("fire_hi_{label}_{d}"),
                    terms: hi,
                    relation: Relation::Le,
                    rhs: 0,
                });
            }
        }
    }

    IlpEncoding {
        labels: system
            .entities()
            .map(|e| system.label(e).to_string())
            .collect(),
        seed: seed.clone(),
        aux_members,
        steps: n,
        objective,
        constraints: rows,
    }
}

/// Budgeted-hardening encoding: minimize the final failure count subject to
/// the budget row.
pub fn encode_enh_ilp(inst: &EnhInstance) -> IlpEncoding {
    encode(inst.system, &inst.initial, Mode::Budget(inst.budget))
}

/// Priority-set encoding: minimize the number of hardenings subject to the
/// protected entities never failing.
pub fn encode_teh_ilp(inst: &TehInstance) -> IlpEncoding {
    encode(inst.system, &inst.initial, Mode::Keep(inst.protect.clone()))
}

impl IlpEncoding {
    /// Time indices 0..steps.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn aux_count(&self) -> usize {
        self.aux_members.len()
    }

    /// Members of one indicator's minterm, as labels.
    pub fn aux_labels(&self, aux: usize) -> Vec<&str> {
        self.aux_members[aux]
            .iter()
            .map(|e| self.labels[e.index()].as_str())
            .collect()
    }

    /// Every variable of the encoding, in declaration order.
    pub fn variables(&self) -> Vec<Var> {
        let n = self.labels.len();
        let mut vars = Vec::new();
        for i in 0..n as u32 {
            vars.push(Var::Seeded {
                entity: EntityId(i),
            });
        }
        for i in 0..n as u32 {
            vars.push(Var::Hardened {
                entity: EntityId(i),
            });
        }
        for i in 0..n as u32 {
            for d in 0..self.steps {
                vars.push(Var::Failed {
                    entity: EntityId(i),
                    step: d,
                });
            }
        }
        for a in 0..self.aux_members.len() {
            for d in 0..self.steps {
                vars.push(Var::MintermHit { aux: a, step: d });
            }
        }
        vars
    }

    fn var_name(&self, v: Var) -> String {
        match v {
            Var::Failed { entity, step } => format!("x_{}_{}", self.labels[entity.index()], step),
            Var::Hardened { entity } => format!("q_{}", self.labels[entity.index()]),
            Var::Seeded { entity } => format!("g_{}", self.labels[entity.index()]),
            Var::MintermHit { aux, step } => format!("c_{aux}_{step}"),
        }
    }

    fn expr(&self, terms: &[(i64, Var)]) -> String {
        let mut s = String::new();
        for (i, (coeff, var)) in terms.iter().enumerate() {
            if *coeff < 0 {
                s.push_str(" -");
            } else if i > 0 {
                s.push_str(" +");
            }
            let mag = coeff.unsigned_abs();
            if mag == 1 {
                s.push_str(&format!(" {}", self.var_name(*var)));
            } else {
                s.push_str(&format!(" {} {}", mag, self.var_name(*var)));
            }
        }
        s
    }

    /// CPLEX LP text. Deterministic: encoding the same instance twice gives
    /// identical bytes.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        out.push_str("Minimize\n obj:");
        out.push_str(&self.expr(&self.objective));
        out.push('\n');
        out.push_str("Subject To\n");
        for c in &self.constraints {
            out.push_str(&format!(
                " {}:{} {} {}\n",
                c.name,
                self.expr(&c.terms),
                c.relation.symbol(),
                c.rhs
            ));
        }
        out.push_str("Binary\n");
        for v in self.variables() {
            out.push(' ');
            out.push_str(&self.var_name(v));
            out.push('\n');
        }
        out.push_str("End\n");
        out
    }

    /// Variable value induced by a cascade trace: x from the failure state
    /// at each (clamped) step, c from minterm membership in that state, q
    /// from the plan, g from the encoded seed.
    fn value(&self, v: Var, trace: &CascadeTrace, plan: &HardeningPlan) -> i64 {
        match v {
            Var::Failed { entity, step } => trace.failed_at(step).contains(entity) as i64,
            Var::Hardened { entity } => plan.hardened.contains(entity) as i64,
            Var::Seeded { entity } => self.seed.contains(entity) as i64,
            Var::MintermHit { aux, step } => {
                self.aux_members[aux].intersects(trace.failed_at(step)) as i64
            }
        }
    }

    /// First constraint the trace-induced assignment violates, if any. A
    /// trace produced by the cascade under `plan` from the encoded seed
    /// satisfies every row.
    pub fn first_violation(
        &self,
        trace: &CascadeTrace,
        plan: &HardeningPlan,
    ) -> Option<&Constraint> {
        self.constraints.iter().find(|c| {
            let lhs: i64 = c
                .terms
                .iter()
                .map(|(coeff, var)| coeff * self.value(*var, trace, plan))
                .sum();
            !c.relation.holds(lhs, c.rhs)
        })
    }

    /// Objective under the trace-induced assignment. For the budgeted
    /// encoding this is the final failure count; for the priority-set
    /// encoding it is the plan size.
    pub fn objective_value(&self, trace: &CascadeTrace, plan: &HardeningPlan) -> i64 {
        self.objective
            .iter()
            .map(|(coeff, var)| coeff * self.value(*var, trace, plan))
            .sum()
    }
}

impl fmt::Display for IlpEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::cascade;
    use crate::system::parse_system;

    fn t1() -> System {
        parse_system(crate::cascade::tests::DEMO).unwrap()
    }

    fn enh(system: &System, budget: usize) -> IlpEncoding {
        let initial = system.set_from_labels(["a2", "a3"]).unwrap();
        encode_enh_ilp(&EnhInstance::new(system, initial, budget))
    }

    #[test]
    fn variable_inventory() {
        let s = t1();
        let e = enh(&s, 1);
        assert_eq!(e.steps(), 7);
        assert_eq!(e.aux_count(), 2);
        assert_eq!(e.aux_labels(0), ["a1", "a2"]);
        assert_eq!(e.aux_labels(1), ["a1", "a3"]);
        // 7 g + 7 q + 49 x + 14 c
        assert_eq!(e.variables().len(), 77);
    }

    #[test]
    fn budget_row_lists_every_entity() {
        let s = t1();
        let lp = enh(&s, 1).to_lp();
        assert!(lp.contains("budget: q_a1 + q_a2 + q_a3 + q_b1 + q_b2 + q_b3 + q_b4 <= 1"));
        assert!(lp.contains("seed_a2: g_a2 = 1"));
        assert!(lp.contains("seed_b1: g_b1 = 0"));
    }

    #[test]
    fn export_is_deterministic() {
        let s = t1();
        let a = enh(&s, 1).to_lp();
        let b = enh(&s, 1).to_lp();
        assert_eq!(a, b);
        assert!(a.starts_with("Minimize\n"));
        assert!(a.ends_with("End\n"));
    }

    #[test]
    fn genuine_traces_satisfy_budget_encoding() {
        let s = t1();
        let e = enh(&s, 2);
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        for plan in [
            HardeningPlan::none(&s),
            HardeningPlan::from_labels(&s, ["a2"]).unwrap(),
            HardeningPlan::from_labels(&s, ["b2"]).unwrap(),
            HardeningPlan::from_labels(&s, ["a2", "a3"]).unwrap(),
        ] {
            let tr = cascade(&s, &initial, &plan);
            assert!(
                e.first_violation(&tr, &plan).is_none(),
                "violated: {:?}",
                e.first_violation(&tr, &plan).map(|c| &c.name)
            );
            assert_eq!(
                e.objective_value(&tr, &plan),
                tr.final_failed().len() as i64
            );
        }
    }

    #[test]
    fn genuine_traces_satisfy_priority_encoding() {
        let s = t1();
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        let protect = s.set_from_labels(["b4"]).unwrap();
        let (inst, _) = TehInstance::new(&s, initial.clone(), protect);
        let e = encode_teh_ilp(&inst);
        let plan = HardeningPlan::from_labels(&s, ["a3"]).unwrap();
        let tr = cascade(&s, &initial, &plan);
        assert!(e.first_violation(&tr, &plan).is_none());
        assert_eq!(e.objective_value(&tr, &plan), 1);

        // Without hardening, b4 falls and the survival row catches it.
        let none = HardeningPlan::none(&s);
        let tr = cascade(&s, &initial, &none);
        let hit = e.first_violation(&tr, &none).unwrap();
        assert_eq!(hit.name, "keep_b4");
    }

    #[test]
    fn mismatched_plan_is_caught() {
        let s = t1();
        let e = enh(&s, 1);
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        let plan = HardeningPlan::from_labels(&s, ["a2"]).unwrap();
        let tr = cascade(&s, &initial, &plan);
        let hit = e.first_violation(&tr, &HardeningPlan::none(&s)).unwrap();
        assert_eq!(hit.name, "t0_lo_a2");
    }

    #[test]
    fn truncated_trace_is_caught() {
        let s = t1();
        let e = enh(&s, 1);
        let initial = s.set_from_labels(["a2", "a3"]).unwrap();
        let fake = CascadeTrace {
            steps: vec![initial],
            fixed_point_time: 0,
        };
        let plan = HardeningPlan::none(&s);
        let hit = e.first_violation(&fake, &plan).unwrap();
        assert!(hit.name.starts_with("fire_lo_"), "caught by {}", hit.name);
    }
}
