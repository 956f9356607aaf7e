//! Batch comparison runs across planners.
//!
//! A benchmark grid is methods x sweep values on one dataset. Sweep values
//! are hardening budgets in ENH mode and protection set sizes in TEH mode;
//! protection sets are sampled from the kill set with a fixed RNG seed so
//! every method at a sweep point answers the same question.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cascade::kill_set;
use crate::error::{Error, Result};
use crate::exact::{k_most_vulnerable, solve_enh_exact, solve_teh_exact, DEFAULT_SUBSET_CAP};
use crate::heuristic::{solve_enh_heuristic, solve_teh_heuristic};
use crate::ilp::{encode_enh_ilp, encode_teh_ilp};
use crate::instance::{EnhInstance, TehInstance};
use crate::restricted::{
    solve_enh_case1, solve_enh_case2_maxcov, solve_teh_case1, solve_teh_case2_setcover,
};
use crate::system::{EntityId, EntitySet, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMode {
    Enh,
    Teh,
}

impl BenchMode {
    pub fn name(self) -> &'static str {
        match self {
            BenchMode::Enh => "enh",
            BenchMode::Teh => "teh",
        }
    }
}

/// How the initially failing set is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum SeedSelection {
    Explicit {
        labels: Vec<String>,
    },
    MostVulnerable {
        k: usize,
    },
    /// Smallest k whose k-most-vulnerable seed kills at least half the
    /// entities.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Heuristic,
    Case1,
    Case2,
    IlpExport,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Heuristic => "heuristic",
            Method::Case1 => "case1",
            Method::Case2 => "case2",
            Method::IlpExport => "ilp-export",
        }
    }
}

/// Description of one benchmark run, usually read from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    /// Name used in the `dataset` column; defaults to the system file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    /// Path of the system file, in the line-oriented text format.
    pub system: String,
    pub mode: BenchMode,
    pub seed_selection: SeedSelection,
    /// Budgets (enh) or protection set sizes (teh). Defaults to five values
    /// evenly spread over what the instance admits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<Vec<usize>>,
    pub methods: Vec<Method>,
    /// Seed for protection set sampling.
    #[serde(default)]
    pub rng_seed: u64,
}

impl BenchmarkSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn dataset_name(&self) -> String {
        match &self.dataset {
            Some(d) => d.clone(),
            None => std::path::Path::new(&self.system)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.system.clone()),
        }
    }
}

/// One grid cell. Either `quality` and `seconds` are present or `skipped`
/// says why the cell has no result.
#[derive(Debug, Clone, Serialize)]
pub struct BenchCell {
    pub dataset: String,
    pub mode: String,
    pub method: String,
    pub sweep: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchMetadata {
    pub tool_version: String,
    pub dataset: String,
    pub mode: String,
    pub rng_seed: u64,
    /// Resolved initially-failing entities.
    pub seed_entities: Vec<String>,
    pub sweeps: Vec<usize>,
    /// Cells whose search space exceeded the exhaustive-solver cap.
    pub caps_hit: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub metadata: BenchMetadata,
    pub rows: Vec<BenchCell>,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat table for plotting; skipped cells keep their row with empty
    /// quality and seconds columns.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["dataset", "mode", "method", "sweep", "quality", "seconds"])
            .expect("csv header");
        for r in &self.rows {
            w.write_record([
                r.dataset.clone(),
                r.mode.clone(),
                r.method.clone(),
                r.sweep.to_string(),
                r.quality.map(|q| q.to_string()).unwrap_or_default(),
                r.seconds.map(|s| format!("{s:.6}")).unwrap_or_default(),
            ])
            .expect("csv row");
        }
        let bytes = w.into_inner().expect("csv buffer");
        String::from_utf8(bytes).expect("csv is utf-8")
    }
}

pub fn resolve_seeds(system: &System, sel: &SeedSelection) -> Result<EntitySet> {
    match sel {
        SeedSelection::Explicit { labels } => system.set_from_labels(labels.iter()),
        SeedSelection::MostVulnerable { k } => {
            Ok(k_most_vulnerable(system, *k, DEFAULT_SUBSET_CAP).seeds)
        }
        SeedSelection::Auto => {
            let n = system.len();
            if n == 0 {
                return Err(Error::InvalidInput(
                    "cannot pick seeds in an empty system".to_string(),
                ));
            }
            let need = n.div_ceil(2);
            for k in 1..=n {
                let rep = k_most_vulnerable(system, k, DEFAULT_SUBSET_CAP);
                if rep.kill_count >= need {
                    return Ok(rep.seeds);
                }
            }
            unreachable!("seeding every entity kills every entity")
        }
    }
}

/// Five sweep values evenly spread over `[1, upper]`, deduplicated.
fn default_sweeps(upper: usize) -> Vec<usize> {
    let hi = upper.max(1);
    let mut vals: Vec<usize> = (0..5).map(|t| 1 + (t * (hi - 1) + 2) / 4).collect();
    vals.dedup();
    vals
}

fn sample_protect(
    system: &System,
    killed: &EntitySet,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EntitySet> {
    let pool: Vec<EntityId> = killed.iter().collect();
    if size > pool.len() {
        return Err(Error::InvalidInput(format!(
            "sweep {size} exceeds the {} entities the seed kills",
            pool.len()
        )));
    }
    let mut set = system.empty_set();
    for idx in rand::seq::index::sample(rng, pool.len(), size).iter() {
        set.insert(pool[idx]);
    }
    Ok(set)
}

struct CellCtx<'a> {
    system: &'a System,
    dataset: &'a str,
    mode: BenchMode,
    initial: &'a EntitySet,
}

fn run_cell(
    ctx: &CellCtx,
    method: Method,
    sweep: usize,
    protect: Option<&EntitySet>,
    caps_hit: &mut Vec<String>,
) -> BenchCell {
    let outcome: Result<(u64, f64)> = (|| match ctx.mode {
        BenchMode::Enh => {
            let inst = EnhInstance::new(ctx.system, ctx.initial.clone(), sweep);
            if method == Method::IlpExport {
                let start = Instant::now();
                let enc = encode_enh_ilp(&inst);
                return Ok((enc.constraints.len() as u64, start.elapsed().as_secs_f64()));
            }
            let r = match method {
                Method::Exact => solve_enh_exact(&inst)?,
                Method::Heuristic => solve_enh_heuristic(&inst)?,
                Method::Case1 => solve_enh_case1(&inst)?,
                Method::Case2 => solve_enh_case2_maxcov(&inst)?,
                Method::IlpExport => unreachable!(),
            };
            Ok((r.protected as u64, r.wall_time.as_secs_f64()))
        }
        BenchMode::Teh => {
            let protect = protect.expect("teh cell needs a protection set");
            let (inst, _) = TehInstance::new(ctx.system, ctx.initial.clone(), protect.clone());
            if method == Method::IlpExport {
                let start = Instant::now();
                let enc = encode_teh_ilp(&inst);
                return Ok((enc.constraints.len() as u64, start.elapsed().as_secs_f64()));
            }
            let r = match method {
                Method::Exact => solve_teh_exact(&inst)?,
                Method::Heuristic => solve_teh_heuristic(&inst)?,
                Method::Case1 => solve_teh_case1(&inst)?,
                Method::Case2 => solve_teh_case2_setcover(&inst)?,
                Method::IlpExport => unreachable!(),
            };
            Ok((r.plan.hardened.len() as u64, r.wall_time.as_secs_f64()))
        }
    })();
    let mut cell = BenchCell {
        dataset: ctx.dataset.to_string(),
        mode: ctx.mode.name().to_string(),
        method: method.name().to_string(),
        sweep,
        quality: None,
        seconds: None,
        skipped: None,
    };
    match outcome {
        Ok((quality, seconds)) => {
            cell.quality = Some(quality);
            cell.seconds = Some(seconds);
        }
        Err(e) => {
            if matches!(e, Error::InstanceTooLarge { .. }) {
                caps_hit.push(format!(
                    "{}/{} sweep {}: {e}",
                    ctx.mode.name(),
                    method.name(),
                    sweep
                ));
            }
            cell.skipped = Some(e.to_string());
        }
    }
    cell
}

/// Runs the whole grid. Per-cell failures (cap overruns, class mismatches)
/// are recorded as skipped cells and the run continues; an approximate
/// method outperforming the exhaustive one is impossible, so that aborts
/// the run instead.
pub fn run_benchmark(system: &System, spec: &BenchmarkSpec) -> Result<BenchmarkReport> {
    let dataset = spec.dataset_name();
    let initial = resolve_seeds(system, &spec.seed_selection)?;
    let killed = kill_set(system, &initial);
    let sweeps: Vec<usize> = match &spec.sweeps {
        Some(v) if v.is_empty() => {
            return Err(Error::InvalidInput("sweep list is empty".to_string()))
        }
        Some(v) => v.clone(),
        None => default_sweeps(match spec.mode {
            BenchMode::Enh => initial.len(),
            BenchMode::Teh => killed.len(),
        }),
    };

    let ctx = CellCtx {
        system,
        dataset: &dataset,
        mode: spec.mode,
        initial: &initial,
    };
    let mut caps_hit = Vec::new();
    let mut rows: Vec<BenchCell> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    for &sweep in &sweeps {
        let protect = match spec.mode {
            BenchMode::Enh => None,
            BenchMode::Teh => match sample_protect(system, &killed, sweep, &mut rng) {
                Ok(p) => Some(p),
                Err(e) => {
                    for &method in &spec.methods {
                        rows.push(BenchCell {
                            dataset: dataset.clone(),
                            mode: spec.mode.name().to_string(),
                            method: method.name().to_string(),
                            sweep,
                            quality: None,
                            seconds: None,
                            skipped: Some(e.to_string()),
                        });
                    }
                    continue;
                }
            },
        };
        let first = rows.len();
        for &method in &spec.methods {
            let cell = run_cell(&ctx, method, sweep, protect.as_ref(), &mut caps_hit);
            rows.push(cell);
        }
        let batch = &rows[first..];
        if let Some(exact) = batch
            .iter()
            .find(|c| c.method == Method::Exact.name())
            .and_then(|c| c.quality)
        {
            for c in batch {
                if c.method == Method::Exact.name() || c.method == Method::IlpExport.name() {
                    continue;
                }
                let Some(q) = c.quality else { continue };
                let beats = match spec.mode {
                    BenchMode::Enh => q > exact,
                    BenchMode::Teh => q < exact,
                };
                if beats {
                    return Err(Error::BoundViolation(format!(
                        "{} on {} at sweep {}: quality {} beats the exhaustive answer {}",
                        c.method, dataset, sweep, q, exact
                    )));
                }
            }
        }
    }

    Ok(BenchmarkReport {
        metadata: BenchMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            dataset,
            mode: spec.mode.name().to_string(),
            rng_seed: spec.rng_seed,
            seed_entities: initial
                .iter()
                .map(|e| system.label(e).to_string())
                .collect(),
            sweeps,
            caps_hit,
        },
        rows,
    })
}
