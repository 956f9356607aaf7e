//! Power-network rules from a flow-directed topology.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{valid_label, System, SystemBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BusKind {
    Generator,
    Load,
    Neutral,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bus {
    pub label: String,
    pub kind: BusKind,
}

/// Which way power flows over a line, relative to its `from`/`to` fields.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowDirection {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Line {
    pub label: String,
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub direction: FlowDirection,
}

/// Buses and directed transmission lines, as read from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerTopology {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
}

impl PowerTopology {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("topology serializes")
    }
}

/// Derives dependency rules from the topology: a bus stays operational
/// while at least one line feeding it and that line's source bus are both
/// up, so each inflow becomes one two-entity minterm. Generator buses and
/// the lines themselves are sources. Non-generator buses without inflow
/// stay sources too and are reported in the warning list.
pub fn gen_power_idrs(topo: &PowerTopology) -> Result<(System, Vec<String>)> {
    let mut kinds: HashMap<&str, BusKind> = HashMap::new();
    let mut labels: HashSet<&str> = HashSet::new();
    for bus in &topo.buses {
        if !valid_label(&bus.label) {
            return Err(Error::InvalidInput(format!(
                "invalid label `{}`",
                bus.label
            )));
        }
        if !labels.insert(&bus.label) {
            return Err(Error::InvalidInput(format!(
                "duplicate label `{}`",
                bus.label
            )));
        }
        kinds.insert(&bus.label, bus.kind);
    }
    for line in &topo.lines {
        if !valid_label(&line.label) {
            return Err(Error::InvalidInput(format!(
                "invalid label `{}`",
                line.label
            )));
        }
        if !labels.insert(&line.label) {
            return Err(Error::InvalidInput(format!(
                "duplicate label `{}`",
                line.label
            )));
        }
        for end in [&line.from, &line.to] {
            if !kinds.contains_key(end.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "line `{}` references unknown bus `{}`",
                    line.label, end
                )));
            }
        }
        if line.from == line.to {
            return Err(Error::InvalidInput(format!(
                "line `{}` connects `{}` to itself",
                line.label, line.from
            )));
        }
    }

    let mut inflows: HashMap<&str, Vec<(&str, &str)>> = HashMap::new();
    for line in &topo.lines {
        let (source, sink) = match line.direction {
            FlowDirection::Forward => (&line.from, &line.to),
            FlowDirection::Reverse => (&line.to, &line.from),
        };
        inflows
            .entry(sink.as_str())
            .or_default()
            .push((line.label.as_str(), source.as_str()));
    }

    let mut b = SystemBuilder::new();
    let mut warnings = Vec::new();
    for bus in &topo.buses {
        b.declare(&bus.label);
        if bus.kind == BusKind::Generator {
            continue;
        }
        match inflows.get(bus.label.as_str()) {
            Some(feeds) => {
                let minterms = feeds.iter().map(|(l, s)| vec![*l, *s]).collect();
                b.rule(&bus.label, minterms, 0)?;
            }
            None => warnings.push(format!(
                "bus `{}` has no inflow and is not a generator; it can fail only as an initial failure",
                bus.label
            )),
        }
    }
    for line in &topo.lines {
        b.declare(&line.label);
    }
    Ok((b.finish()?, warnings))
}
