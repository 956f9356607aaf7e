//! Entities, dependency rules, and the text format they are stored in.
//!
//! A system is a set of named entities plus at most one dependency rule per
//! entity. A rule is a two-level disjunction of conjunctions ("minterms"):
//! the target stays operational while at least one minterm has all members
//! operational, and fails once every minterm contains a failed entity.
//! Entities without a rule are sources; they fail only when seeded.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index into a [`System`]'s entity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense bit set over one system's entity indices.
///
/// Every set derived from a system shares that system's universe size; the
/// word-wise operations assume equal sizes and panic on mismatch.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EntitySet {
    nbits: usize,
    words: Vec<u64>,
}

impl EntitySet {
    pub fn new(nbits: usize) -> Self {
        EntitySet {
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    pub fn universe(&self) -> usize {
        self.nbits
    }

    pub fn insert(&mut self, e: EntityId) {
        assert!(e.index() < self.nbits, "entity out of range");
        self.words[e.index() / 64] |= 1 << (e.index() % 64);
    }

    pub fn remove(&mut self, e: EntityId) {
        assert!(e.index() < self.nbits, "entity out of range");
        self.words[e.index() / 64] &= !(1 << (e.index() % 64));
    }

    pub fn contains(&self, e: EntityId) -> bool {
        e.index() < self.nbits && self.words[e.index() / 64] >> (e.index() % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    fn check(&self, other: &EntitySet) {
        assert_eq!(self.nbits, other.nbits, "sets from different systems");
    }

    pub fn union_with(&mut self, other: &EntitySet) {
        self.check(other);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn subtract(&mut self, other: &EntitySet) {
        self.check(other);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
    }

    pub fn intersect_with(&mut self, other: &EntitySet) {
        self.check(other);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
    }

    pub fn union(&self, other: &EntitySet) -> EntitySet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &EntitySet) -> EntitySet {
        let mut s = self.clone();
        s.subtract(other);
        s
    }

    pub fn intersection(&self, other: &EntitySet) -> EntitySet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn intersects(&self, other: &EntitySet) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).any(|(w, o)| w & o != 0)
    }

    pub fn intersection_len(&self, other: &EntitySet) -> usize {
        self.check(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(w, o)| (w & o).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &EntitySet) -> bool {
        self.check(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(w, o)| w & !o == 0)
    }

    pub fn is_disjoint(&self, other: &EntitySet) -> bool {
        !self.intersects(other)
    }

    /// Ascending index order, which for sets built from one system is also
    /// ascending label order (the entity table is sorted).
    pub fn iter(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros();
                w &= w - 1;
                Some(EntityId(wi as u32 * 64 + bit))
            })
        })
    }

    /// Lexicographic order on the ascending member sequence. With a sorted
    /// entity table this is the lexicographic order on label sequences.
    pub fn lex_cmp(&self, other: &EntitySet) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for EntitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

impl FromIterator<EntityId> for EntitySet {
    /// Collects into a set sized just past the largest member; callers that
    /// need a specific universe should start from [`System::empty_set`].
    fn from_iter<I: IntoIterator<Item = EntityId>>(iter: I) -> Self {
        let ids: Vec<EntityId> = iter.into_iter().collect();
        let max = ids.iter().map(|e| e.index() + 1).max().unwrap_or(0);
        let mut s = EntitySet::new(max);
        for e in ids {
            s.insert(e);
        }
        s
    }
}

/// Conjunction of entities inside a rule. Non-empty by construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Minterm {
    members: EntitySet,
}

impl Minterm {
    pub fn new(members: EntitySet) -> Self {
        assert!(!members.is_empty(), "minterm must be non-empty");
        Minterm { members }
    }

    pub fn members(&self) -> &EntitySet {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, e: EntityId) -> bool {
        self.members.contains(e)
    }

    /// True once at least one member has failed; the conjunction is then no
    /// longer a working support for the target.
    pub fn hit_by(&self, failed: &EntitySet) -> bool {
        self.members.intersects(failed)
    }
}

impl fmt::Debug for Minterm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Minterm({:?})", self.members)
    }
}

/// Dependency rule for one target entity.
#[derive(Clone, PartialEq, Eq)]
pub struct Idr {
    pub target: EntityId,
    pub minterms: Vec<Minterm>,
}

impl Idr {
    /// The rule induces failure once every minterm contains a failed entity.
    pub fn fires(&self, failed: &EntitySet) -> bool {
        self.minterms.iter().all(|m| m.hit_by(failed))
    }
}

impl fmt::Debug for Idr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Idr({} <- {:?})", self.target.0, self.minterms)
    }
}

/// Entity table plus rules. The table is sorted by label, so entity indices
/// depend only on the label set, not on declaration order.
#[derive(Clone, PartialEq)]
pub struct System {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    idrs: Vec<Option<Idr>>,
}

impl System {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn entity(&self, label: &str) -> Option<EntityId> {
        self.index.get(label).map(|i| EntityId(*i))
    }

    pub fn require_entity(&self, label: &str) -> Result<EntityId> {
        self.entity(label)
            .ok_or_else(|| Error::UnknownEntity(label.to_string()))
    }

    pub fn label(&self, e: EntityId) -> &str {
        &self.labels[e.index()]
    }

    pub fn entities(&self) -> impl Iterator<Item = EntityId> + '_ {
        (0..self.labels.len() as u32).map(EntityId)
    }

    pub fn idr(&self, e: EntityId) -> Option<&Idr> {
        self.idrs[e.index()].as_ref()
    }

    pub fn idrs(&self) -> impl Iterator<Item = &Idr> {
        self.idrs.iter().filter_map(|i| i.as_ref())
    }

    pub fn idr_count(&self) -> usize {
        self.idrs().count()
    }

    pub fn empty_set(&self) -> EntitySet {
        EntitySet::new(self.len())
    }

    pub fn full_set(&self) -> EntitySet {
        let mut s = self.empty_set();
        for e in self.entities() {
            s.insert(e);
        }
        s
    }

    pub fn set_from_labels<I, S>(&self, labels: I) -> Result<EntitySet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut s = self.empty_set();
        for l in labels {
            s.insert(self.require_entity(l.as_ref())?);
        }
        Ok(s)
    }

    /// Labels of the set's members in ascending label order.
    pub fn label_vec(&self, set: &EntitySet) -> Vec<&str> {
        set.iter().map(|e| self.label(e)).collect()
    }

    /// Clone with `never` treated as never-failing: their rules are dropped
    /// and they disappear from remaining minterms (a conjunct that cannot
    /// fail is vacuous). A rule whose minterm empties out can itself never
    /// fire, so its target joins the never-failing pool unless it is seeded,
    /// in which case it simply becomes a failing source. Runs to a fixpoint
    /// and returns the reduced system with the final never-failing set.
    pub(crate) fn strip_never_failing(
        &self,
        never: &EntitySet,
        seed: &EntitySet,
    ) -> (System, EntitySet) {
        let mut sys = self.clone();
        let mut never = never.clone();
        loop {
            let mut grew = false;
            for i in 0..sys.idrs.len() {
                let target = EntityId(i as u32);
                let Some(idr) = sys.idrs[i].as_mut() else {
                    continue;
                };
                if never.contains(target) {
                    sys.idrs[i] = None;
                    continue;
                }
                let mut vacuous = false;
                for m in &mut idr.minterms {
                    m.members.subtract(&never);
                    if m.members.is_empty() {
                        vacuous = true;
                    }
                }
                if vacuous {
                    sys.idrs[i] = None;
                    if !seed.contains(target) {
                        never.insert(target);
                        grew = true;
                    }
                }
            }
            if !grew {
                return (sys, never);
            }
        }
    }

    /// Canonical text form: one line per entity in table order, rules with
    /// label-sorted members and minterms, bare labels for sources. Parsing
    /// the output reproduces the same table and the same text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in self.entities() {
            match self.idr(e) {
                Some(idr) => {
                    let mut terms: Vec<Vec<&str>> = idr
                        .minterms
                        .iter()
                        .map(|m| self.label_vec(m.members()))
                        .collect();
                    terms.sort();
                    let body = terms
                        .iter()
                        .map(|t| t.join(" "))
                        .collect::<Vec<_>>()
                        .join(" + ");
                    out.push_str(&format!("{} <- {}\n", self.label(e), body));
                }
                None => {
                    out.push_str(self.label(e));
                    out.push('\n');
                }
            }
        }
        out
    }
}

impl fmt::Debug for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "System[{} entities, {} rules]",
            self.len(),
            self.idr_count()
        )
    }
}

pub(crate) fn valid_label(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct RawRule {
    target: String,
    minterms: Vec<Vec<String>>,
    line: usize,
}

/// Incremental construction used by the parser and the generators. Labels
/// may be declared in any order; `finish` sorts the table.
pub struct SystemBuilder {
    declared: Vec<String>,
    rules: Vec<RawRule>,
    rule_lines: HashMap<String, usize>,
}

impl SystemBuilder {
    pub fn new() -> Self {
        SystemBuilder {
            declared: Vec::new(),
            rules: Vec::new(),
            rule_lines: HashMap::new(),
        }
    }

    pub fn declare(&mut self, label: &str) {
        self.declared.push(label.to_string());
    }

    /// Adds a rule; `line` feeds error messages (generators pass 0).
    pub fn rule<S: AsRef<str>>(
        &mut self,
        target: &str,
        minterms: Vec<Vec<S>>,
        line: usize,
    ) -> Result<()> {
        if let Some(prev) = self.rule_lines.get(target) {
            let _ = prev;
            return Err(Error::DuplicateTarget {
                label: target.to_string(),
                line,
            });
        }
        if minterms.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "rule needs at least one minterm".to_string(),
            });
        }
        let mut mts = Vec::with_capacity(minterms.len());
        for m in minterms {
            let members: Vec<String> = m.iter().map(|s| s.as_ref().to_string()).collect();
            if members.is_empty() {
                return Err(Error::Parse {
                    line,
                    msg: "empty minterm".to_string(),
                });
            }
            if members.iter().any(|l| l == target) {
                return Err(Error::SelfDependent {
                    label: target.to_string(),
                    line,
                });
            }
            mts.push(members);
        }
        self.rule_lines.insert(target.to_string(), line);
        self.rules.push(RawRule {
            target: target.to_string(),
            minterms: mts,
            line,
        });
        Ok(())
    }

    pub fn finish(self) -> Result<System> {
        let mut labels: Vec<String> = self.declared;
        for r in &self.rules {
            labels.push(r.target.clone());
            for m in &r.minterms {
                labels.extend(m.iter().cloned());
            }
        }
        labels.sort();
        labels.dedup();
        let index: HashMap<String, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        let mut idrs: Vec<Option<Idr>> = vec![None; labels.len()];
        for r in self.rules {
            let target = EntityId(index[&r.target]);
            let minterms = r
                .minterms
                .iter()
                .map(|m| {
                    let mut set = EntitySet::new(labels.len());
                    for l in m {
                        set.insert(EntityId(index[l]));
                    }
                    Minterm::new(set)
                })
                .collect();
            let _ = r.line;
            idrs[target.index()] = Some(Idr { target, minterms });
        }
        Ok(System {
            labels,
            index,
            idrs,
        })
    }
}

impl Default for SystemBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// Parses the line-oriented system format:
///
/// ```text
/// # comment
/// b3 <- a2 + a1 a3      # rule: two minterms
/// T9                    # bare label: source entity
/// ```
///
/// Labels match `[A-Za-z_][A-Za-z0-9_]*` and every label seen on either side
/// of a rule is registered as an entity.
pub fn parse_system(text: &str) -> Result<System> {
    let mut b = SystemBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        for t in &toks {
            if *t != "<-" && *t != "+" && !valid_label(t) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("invalid label `{t}`"),
                });
            }
        }
        if toks.len() == 1 {
            if !valid_label(toks[0]) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("invalid label `{}`", toks[0]),
                });
            }
            b.declare(toks[0]);
            continue;
        }
        if toks[1] != "<-" {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected `<-` after target label".to_string(),
            });
        }
        if !valid_label(toks[0]) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("invalid label `{}`", toks[0]),
            });
        }
        let mut minterms: Vec<Vec<&str>> = vec![Vec::new()];
        for t in &toks[2..] {
            if *t == "+" {
                if minterms.last().unwrap().is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "empty minterm".to_string(),
                    });
                }
                minterms.push(Vec::new());
            } else if *t == "<-" {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "unexpected `<-`".to_string(),
                });
            } else {
                minterms.last_mut().unwrap().push(t);
            }
        }
        if minterms.last().unwrap().is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "empty minterm".to_string(),
            });
        }
        b.rule(toks[0], minterms, line_no)?;
    }
    b.finish()
}
