//! Cross-infrastructure rules from shared geometry.
//!
//! Communications assets draw power from nearby generators; generators in
//! turn need cell coverage and a fiber-lit control point. Pairings come
//! from planar nearest-neighbor search with label order breaking ties.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{valid_label, System, SystemBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetKind {
    Generator,
    Load,
    TransmissionLine,
    CellTower,
    FiberLitBuilding,
    FiberLink,
}

impl AssetKind {
    pub fn is_edge(self) -> bool {
        matches!(self, AssetKind::TransmissionLine | AssetKind::FiberLink)
    }
}

/// One row of a geo input file. Point assets carry coordinates; lines and
/// links carry endpoint labels instead and sit at the endpoint midpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeoAsset {
    pub label: String,
    pub kind: AssetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
}

impl GeoAsset {
    pub fn point(label: &str, kind: AssetKind, x: f64, y: f64) -> Self {
        GeoAsset {
            label: label.to_string(),
            kind,
            x: Some(x),
            y: Some(y),
            from: None,
            to: None,
        }
    }

    pub fn edge(label: &str, kind: AssetKind, from: &str, to: &str) -> Self {
        GeoAsset {
            label: label.to_string(),
            kind,
            x: None,
            y: None,
            from: Some(from.to_string()),
            to: Some(to.to_string()),
        }
    }
}

pub fn assets_from_json(text: &str) -> Result<Vec<GeoAsset>> {
    Ok(serde_json::from_str(text)?)
}

pub fn assets_to_json(assets: &[GeoAsset]) -> String {
    serde_json::to_string_pretty(assets).expect("assets serialize")
}

struct Site {
    label: String,
    kind: AssetKind,
    pos: (f64, f64),
}

struct Span {
    label: String,
    kind: AssetKind,
    ends: (usize, usize),
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn midpoint(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
}

/// Nearest-rank upper quartile of an ascending slice.
fn percentile_75(sorted: &[f64]) -> f64 {
    let rank = ((0.75 * sorted.len() as f64).ceil() as usize).max(1);
    sorted[rank - 1]
}

fn nearest(sites: &[Site], candidates: &[usize], p: (f64, f64)) -> usize {
    *candidates
        .iter()
        .min_by(|&&a, &&b| {
            dist(sites[a].pos, p)
                .total_cmp(&dist(sites[b].pos, p))
                .then_with(|| sites[a].label.cmp(&sites[b].label))
        })
        .expect("candidate set is non-empty")
}

/// Derives the interdependency rules implied by asset positions:
///
/// * generator g needs its nearest cell tower, or its nearest fiber-lit
///   building together with the fiber link connecting them (synthesized
///   when the input has none);
/// * every cell tower, fiber-lit building and long fiber link needs one of
///   its two nearest generators, each paired with that generator's
///   transmission line closest to the consumer (again synthesized per
///   generator/consumer pair when the generator has no line);
/// * loads, transmission lines and short fiber links impose nothing.
///
/// A fiber link is long when its length reaches `long_threshold`; by
/// default that is the upper quartile of all fiber link lengths. Every
/// rule has at most two minterms of at most two entities.
pub fn gen_interdep_idrs(assets: &[GeoAsset], long_threshold: Option<f64>) -> Result<System> {
    let mut used: HashSet<String> = HashSet::new();
    let mut sites: Vec<Site> = Vec::new();
    let mut raw_edges: Vec<(String, AssetKind, String, String)> = Vec::new();
    for a in assets {
        if !valid_label(&a.label) {
            return Err(Error::InvalidInput(format!("invalid label `{}`", a.label)));
        }
        if !used.insert(a.label.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate label `{}`",
                a.label
            )));
        }
        if a.kind.is_edge() {
            let (Some(from), Some(to)) = (&a.from, &a.to) else {
                return Err(Error::InvalidInput(format!(
                    "asset `{}` needs `from` and `to` endpoints",
                    a.label
                )));
            };
            raw_edges.push((a.label.clone(), a.kind, from.clone(), to.clone()));
        } else {
            let (Some(x), Some(y)) = (a.x, a.y) else {
                return Err(Error::InvalidInput(format!(
                    "asset `{}` needs coordinates",
                    a.label
                )));
            };
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "asset `{}` has non-finite coordinates",
                    a.label
                )));
            }
            if a.from.is_some() || a.to.is_some() {
                return Err(Error::InvalidInput(format!(
                    "asset `{}` is not a line or link and cannot have endpoints",
                    a.label
                )));
            }
            sites.push(Site {
                label: a.label.clone(),
                kind: a.kind,
                pos: (x, y),
            });
        }
    }

    // sorting up front makes the output independent of input order
    sites.sort_by(|a, b| a.label.cmp(&b.label));
    let index: HashMap<String, usize> = sites
        .iter()
        .enumerate()
        .map(|(i, s)| (s.label.clone(), i))
        .collect();
    raw_edges.sort_by(|a, b| a.0.cmp(&b.0));
    let mut spans: Vec<Span> = Vec::new();
    for (label, kind, from, to) in raw_edges {
        let ends: Vec<usize> = [&from, &to]
            .into_iter()
            .map(|e| {
                index.get(e).copied().ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "asset `{label}` endpoint `{e}` is not a point asset"
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if ends[0] == ends[1] {
            return Err(Error::InvalidInput(format!(
                "asset `{label}` connects `{from}` to itself"
            )));
        }
        spans.push(Span {
            label,
            kind,
            ends: (ends[0], ends[1]),
        });
    }

    let of_kind = |k: AssetKind| -> Vec<usize> {
        sites
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == k)
            .map(|(i, _)| i)
            .collect()
    };
    let generators = of_kind(AssetKind::Generator);
    let towers = of_kind(AssetKind::CellTower);
    let buildings = of_kind(AssetKind::FiberLitBuilding);
    if generators.len() < 2 || towers.is_empty() || buildings.is_empty() {
        return Err(Error::InsufficientAssets(format!(
            "need at least two generators, one cell tower and one fiber-lit building; \
             found {} generator(s), {} cell tower(s), {} fiber-lit building(s)",
            generators.len(),
            towers.len(),
            buildings.len()
        )));
    }

    let synthesize = |used: &mut HashSet<String>, planned: String| -> Result<String> {
        if !used.insert(planned.clone()) {
            return Err(Error::InvalidInput(format!(
                "cannot synthesize `{planned}`: the label is already in use"
            )));
        }
        Ok(planned)
    };

    // generator rules, synthesizing one fiber link per unlinked pairing
    let mut gen_rules: Vec<(usize, usize, usize, String)> = Vec::new();
    for &g in &generators {
        let t = nearest(&sites, &towers, sites[g].pos);
        let f = nearest(&sites, &buildings, sites[g].pos);
        let existing = spans
            .iter()
            .filter(|sp| {
                sp.kind == AssetKind::FiberLink && (sp.ends == (f, g) || sp.ends == (g, f))
            })
            .map(|sp| sp.label.clone())
            .min();
        let link = match existing {
            Some(l) => l,
            None => {
                let planned = synthesize(
                    &mut used,
                    format!("fl__{}__{}", sites[f].label, sites[g].label),
                )?;
                spans.push(Span {
                    label: planned.clone(),
                    kind: AssetKind::FiberLink,
                    ends: (f, g),
                });
                planned
            }
        };
        gen_rules.push((g, t, f, link));
    }

    // long links join towers and buildings as powered consumers
    let mut lens: Vec<f64> = spans
        .iter()
        .filter(|sp| sp.kind == AssetKind::FiberLink)
        .map(|sp| dist(sites[sp.ends.0].pos, sites[sp.ends.1].pos))
        .collect();
    lens.sort_by(f64::total_cmp);
    let threshold = long_threshold.unwrap_or_else(|| percentile_75(&lens));

    let mut consumers: Vec<(String, (f64, f64))> = Vec::new();
    for &i in towers.iter().chain(buildings.iter()) {
        consumers.push((sites[i].label.clone(), sites[i].pos));
    }
    for sp in &spans {
        if sp.kind != AssetKind::FiberLink {
            continue;
        }
        let (a, b) = (sites[sp.ends.0].pos, sites[sp.ends.1].pos);
        if dist(a, b) >= threshold {
            consumers.push((sp.label.clone(), midpoint(a, b)));
        }
    }
    consumers.sort_by(|a, b| a.0.cmp(&b.0));

    let input_lines: Vec<usize> = spans
        .iter()
        .enumerate()
        .filter(|(_, sp)| sp.kind == AssetKind::TransmissionLine)
        .map(|(i, _)| i)
        .collect();
    let mut extra_lines: Vec<String> = Vec::new();
    let mut consumer_rules: Vec<(String, [(String, String); 2])> = Vec::new();
    for (label, pos) in &consumers {
        let mut by_dist = generators.clone();
        by_dist.sort_by(|&a, &b| {
            dist(sites[a].pos, *pos)
                .total_cmp(&dist(sites[b].pos, *pos))
                .then_with(|| sites[a].label.cmp(&sites[b].label))
        });
        let mut pairs = Vec::with_capacity(2);
        for &g in &by_dist[..2] {
            let line = input_lines
                .iter()
                .filter(|&&i| spans[i].ends.0 == g || spans[i].ends.1 == g)
                .min_by(|&&a, &&b| {
                    let ma = midpoint(sites[spans[a].ends.0].pos, sites[spans[a].ends.1].pos);
                    let mb = midpoint(sites[spans[b].ends.0].pos, sites[spans[b].ends.1].pos);
                    dist(ma, *pos)
                        .total_cmp(&dist(mb, *pos))
                        .then_with(|| spans[a].label.cmp(&spans[b].label))
                });
            let line = match line {
                Some(&i) => spans[i].label.clone(),
                None => {
                    let planned =
                        synthesize(&mut used, format!("tl__{}__{}", sites[g].label, label))?;
                    extra_lines.push(planned.clone());
                    planned
                }
            };
            pairs.push((sites[g].label.clone(), line));
        }
        let [p1, p2]: [(String, String); 2] = pairs.try_into().expect("two pairings");
        consumer_rules.push((label.clone(), [p1, p2]));
    }

    let mut b = SystemBuilder::new();
    for s in &sites {
        b.declare(&s.label);
    }
    for sp in &spans {
        b.declare(&sp.label);
    }
    for l in &extra_lines {
        b.declare(l);
    }
    for (g, t, f, link) in &gen_rules {
        b.rule(
            &sites[*g].label,
            vec![
                vec![sites[*t].label.as_str()],
                vec![sites[*f].label.as_str(), link.as_str()],
            ],
            0,
        )?;
    }
    for (target, pairs) in &consumer_rules {
        b.rule(
            target,
            pairs
                .iter()
                .map(|(g, t)| vec![g.as_str(), t.as_str()])
                .collect(),
            0,
        )?;
    }
    b.finish()
}
