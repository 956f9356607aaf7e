//! Influence metrics used by the greedy planners.
//!
//! All scores are exact rationals so greedy tie-breaking is deterministic;
//! no floating point is involved.

use num_rational::Ratio;

use crate::cascade::protection_set;
use crate::system::{EntityId, EntitySet, System};

pub type Score = Ratio<u64>;

/// Sum of 1/|minterm| over minterms containing `e`, restricted to rules
/// whose target satisfies `keep`.
fn weighted_occurrences(system: &System, e: EntityId, keep: impl Fn(EntityId) -> bool) -> Score {
    let mut total = Score::from_integer(0);
    for idr in system.idrs() {
        if !keep(idr.target) {
            continue;
        }
        for m in &idr.minterms {
            if m.contains(e) {
                total += Ratio::new(1, m.size() as u64);
            }
        }
    }
    total
}

/// Immediate influence of `e`: how strongly rules lean on it. Each minterm
/// containing `e` contributes the reciprocal of its size; rules whose target
/// is in `excluded` are skipped.
pub fn fmhv(system: &System, e: EntityId, excluded: &EntitySet) -> Score {
    weighted_occurrences(system, e, |t| !excluded.contains(t))
}

/// Influence accumulated over everything hardening `e` would save: for each
/// member of the protection set of `e` under `seed`, the member's influence
/// on rules outside its own protection set.
pub fn cfmhv(system: &System, e: EntityId, seed: &EntitySet) -> Score {
    let mut total = Score::from_integer(0);
    for x in protection_set(system, e, seed).iter() {
        let ps_x = protection_set(system, x, seed);
        total += fmhv(system, x, &ps_x);
    }
    total
}

/// Like [`fmhv`] but counting only rules whose target lies in `scope`.
pub fn pfmhv(system: &System, e: EntityId, scope: &EntitySet) -> Score {
    weighted_occurrences(system, e, |t| scope.contains(t))
}

/// Like [`cfmhv`] but counting only rules whose target lies in `scope`.
/// A scope covering every entity reduces this to [`cfmhv`]; an empty scope
/// gives zero.
pub fn pcfmhv(system: &System, e: EntityId, seed: &EntitySet, scope: &EntitySet) -> Score {
    let mut total = Score::from_integer(0);
    for x in protection_set(system, e, seed).iter() {
        let ps_x = protection_set(system, x, seed);
        total += weighted_occurrences(system, x, |t| scope.contains(t) && !ps_x.contains(t));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;

    fn t1() -> System {
        parse_system(crate::cascade::tests::DEMO).unwrap()
    }

    fn score(n: u64, d: u64) -> Score {
        Ratio::new(n, d)
    }

    #[test]
    fn fmhv_counts_weighted_minterm_memberships() {
        let s = t1();
        let a1 = s.entity("a1").unwrap();
        let b1 = s.entity("b1").unwrap();
        // a1 appears alone for b1, paired for b2 and in one of b3's terms.
        assert_eq!(fmhv(&s, a1, &s.empty_set()), score(2, 1));
        assert_eq!(fmhv(&s, b1, &s.empty_set()), score(0, 1));
        let excl = s.set_from_labels(["b1", "b2", "b3"]).unwrap();
        assert_eq!(fmhv(&s, a1, &excl), score(0, 1));
    }

    #[test]
    fn pfmhv_restricts_to_scope_targets() {
        let s = t1();
        let a3 = s.entity("a3").unwrap();
        let b2 = s.entity("b2").unwrap();
        let scope = s.set_from_labels(["b4"]).unwrap();
        assert_eq!(pfmhv(&s, a3, &scope), score(1, 1));
        assert_eq!(pfmhv(&s, b2, &scope), score(0, 1));
    }

    #[test]
    fn fmhv_splits_by_target_membership() {
        let s = t1();
        for e in s.entities() {
            for x in [
                s.empty_set(),
                s.set_from_labels(["b1", "b2", "b3"]).unwrap(),
                s.full_set(),
            ] {
                assert_eq!(
                    fmhv(&s, e, &x) + pfmhv(&s, e, &x),
                    fmhv(&s, e, &s.empty_set()),
                );
            }
        }
    }

    #[test]
    fn cfmhv_accumulates_over_protection_set() {
        let s = t1();
        let seed = s.set_from_labels(["a2", "a3"]).unwrap();
        let a3 = s.entity("a3").unwrap();
        // PS(a3) = {a3, b4}; a3 keeps its b3 term, b4 keeps its a3 term.
        assert_eq!(cfmhv(&s, a3, &seed), score(3, 2));
    }

    #[test]
    fn cfmhv_on_two_cycle() {
        let s = parse_system("a <- b\nb <- a\n").unwrap();
        let seed = s.set_from_labels(["a"]).unwrap();
        let a = s.entity("a").unwrap();
        assert_eq!(cfmhv(&s, a, &seed), score(1, 1));
    }

    #[test]
    fn pcfmhv_scope_extremes() {
        let s = t1();
        let seed = s.set_from_labels(["a2", "a3"]).unwrap();
        for e in s.entities() {
            assert_eq!(pcfmhv(&s, e, &seed, &s.full_set()), cfmhv(&s, e, &seed));
            assert_eq!(pcfmhv(&s, e, &seed, &s.empty_set()), score(0, 1));
        }
    }
}
