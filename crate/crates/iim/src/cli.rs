//! Command line interface.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when an
//! exhaustive search refuses to start because the subset space exceeds
//! its cap.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{run_benchmark, BenchmarkSpec};
use crate::cascade::{cascade, kill_set, protection_set, HardeningPlan};
use crate::error::{Error, Result};
use crate::exact::{k_most_vulnerable, solve_enh_exact, solve_teh_exact, DEFAULT_SUBSET_CAP};
use crate::gen::geo::{assets_from_json, gen_interdep_idrs};
use crate::gen::power::{gen_power_idrs, PowerTopology};
use crate::gen::random::{gen_random, RandomParams};
use crate::heuristic::{solve_enh_heuristic, solve_teh_heuristic};
use crate::ilp::{encode_enh_ilp, encode_teh_ilp};
use crate::instance::{EnhInstance, SolveReport, TehInstance};
use crate::restricted::{
    solve_enh_case1, solve_enh_case2_maxcov, solve_teh_case1, solve_teh_case2_setcover, IdrClass,
};
use crate::system::{parse_system, EntitySet, System};

#[derive(Parser)]
#[command(
    name = "iim",
    version,
    about = "Cascade analysis and hardening planners for interdependent infrastructure"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliMethod {
    Exact,
    Heuristic,
    Case1,
    Case2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliClass {
    Case1,
    Case2,
    General,
}

impl From<CliClass> for IdrClass {
    fn from(c: CliClass) -> IdrClass {
        match c {
            CliClass::Case1 => IdrClass::SingleDependency,
            CliClass::Case2 => IdrClass::Disjunctive,
            CliClass::General => IdrClass::General,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay the cascade started by a set of initial failures.
    Cascade {
        #[arg(long)]
        system: PathBuf,
        /// Comma-separated labels failing at t=0.
        #[arg(long, default_value = "")]
        fail: String,
        /// Comma-separated labels hardened beforehand.
        #[arg(long, default_value = "")]
        harden: String,
    },
    /// Print every entity doomed by the initial failures.
    Killset {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value = "")]
        fail: String,
    },
    /// Print what hardening one entity would save.
    Protset {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value = "")]
        fail: String,
        /// Candidate entity to harden.
        #[arg(long)]
        entity: String,
    },
    /// Pick at most k entities to harden, maximizing how many survive.
    SolveEnh {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value = "")]
        fail: String,
        /// Hardening budget.
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = CliMethod::Exact)]
        method: CliMethod,
    },
    /// Find a smallest hardening set that keeps the listed entities alive.
    SolveTeh {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value = "")]
        fail: String,
        /// Comma-separated labels that must survive.
        #[arg(long, default_value = "")]
        protect: String,
        #[arg(long, value_enum, default_value_t = CliMethod::Exact)]
        method: CliMethod,
    },
    /// Write the step-indexed 0/1 program in LP format.
    ExportLp {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value = "")]
        fail: String,
        /// Budget mode: maximize survivors under at most k hardenings.
        #[arg(long)]
        k: Option<usize>,
        /// Keep mode: minimize hardenings keeping these labels alive.
        #[arg(long)]
        protect: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the seed set of a given size with the largest kill set.
    Vulnerable {
        #[arg(long)]
        system: PathBuf,
        /// Seed set size.
        #[arg(long = "K")]
        k: usize,
    },
    /// Derive a system from a topology, from asset geometry, or at random.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Run a methods-by-sweeps comparison grid.
    Bench {
        /// JSON benchmark description; its `system` path is resolved
        /// relative to this file.
        #[arg(long)]
        spec: PathBuf,
        /// Write the flat CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Bus/line topology to rules, one minterm per inflow.
    Power {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geographic asset list to cross-infrastructure rules.
    Geo {
        #[arg(long)]
        assets: PathBuf,
        /// Fiber links at least this long need power; default is the upper
        /// quartile of link lengths.
        #[arg(long)]
        long_threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random system in a structural class.
    Random {
        #[arg(long, value_enum)]
        class: CliClass,
        /// Number of entities.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chance that an entity gets a rule.
        #[arg(long, default_value_t = 0.8)]
        idr_prob: f64,
        #[arg(long, default_value_t = 3)]
        max_minterms: usize,
        #[arg(long, default_value_t = 3)]
        max_minterm_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e @ Error::InstanceTooLarge { .. }) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<System> {
    parse_system(&read_file(path)?)
}

fn labels_of(spec: &str) -> impl Iterator<Item = &str> {
    spec.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn set_of(system: &System, spec: &str) -> Result<EntitySet> {
    system.set_from_labels(labels_of(spec))
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn listing(prefix: String, labels: &[&str]) -> String {
    if labels.is_empty() {
        format!("{prefix}:\n")
    } else {
        format!("{prefix}: {}\n", labels.join(" "))
    }
}

// timings stay off stdout so outputs are byte-stable
fn render_solve(system: &System, r: &SolveReport) -> String {
    let mut out = format!("method: {}\n", r.method);
    out += &listing(
        format!("hardened ({})", r.plan.hardened.len()),
        &system.label_vec(&r.plan.hardened),
    );
    out += &format!("baseline failed: {}\n", r.baseline_failed);
    out += &format!("failed with plan: {}\n", r.failed_with_plan);
    out += &format!("protected: {}\n", r.protected);
    out
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Cascade {
            system,
            fail,
            harden,
        } => {
            let s = load_system(&system)?;
            let seed = set_of(&s, &fail)?;
            let plan = HardeningPlan::of(set_of(&s, &harden)?);
            let tr = cascade(&s, &seed, &plan);
            let mut out = String::new();
            let mut prev = s.empty_set();
            for (t, st) in tr.steps.iter().enumerate() {
                let new = st.difference(&prev);
                out += &listing(format!("t={t}"), &s.label_vec(&new));
                prev = st.clone();
            }
            out += &format!("fixed point: t={}\n", tr.fixed_point_time);
            out += &format!("failed: {} of {}\n", tr.final_failed().len(), s.len());
            print!("{out}");
            Ok(())
        }
        Cmd::Killset { system, fail } => {
            let s = load_system(&system)?;
            let killed = kill_set(&s, &set_of(&s, &fail)?);
            print!(
                "{}",
                listing(
                    format!("kill set ({})", killed.len()),
                    &s.label_vec(&killed)
                )
            );
            Ok(())
        }
        Cmd::Protset {
            system,
            fail,
            entity,
        } => {
            let s = load_system(&system)?;
            let seed = set_of(&s, &fail)?;
            let e = s.require_entity(&entity)?;
            let ps = protection_set(&s, e, &seed);
            print!(
                "{}",
                listing(
                    format!("protection set of {entity} ({})", ps.len()),
                    &s.label_vec(&ps)
                )
            );
            Ok(())
        }
        Cmd::SolveEnh {
            system,
            fail,
            k,
            method,
        } => {
            let s = load_system(&system)?;
            let inst = EnhInstance::new(&s, set_of(&s, &fail)?, k);
            let r = match method {
                CliMethod::Exact => solve_enh_exact(&inst)?,
                CliMethod::Heuristic => solve_enh_heuristic(&inst)?,
                CliMethod::Case1 => solve_enh_case1(&inst)?,
                CliMethod::Case2 => solve_enh_case2_maxcov(&inst)?,
            };
            print!("{}", render_solve(&s, &r));
            Ok(())
        }
        Cmd::SolveTeh {
            system,
            fail,
            protect,
            method,
        } => {
            let s = load_system(&system)?;
            let (inst, dropped) = TehInstance::new(&s, set_of(&s, &fail)?, set_of(&s, &protect)?);
            for d in &dropped {
                eprintln!("note: `{d}` never fails; dropped from the protect set");
            }
            let r = match method {
                CliMethod::Exact => solve_teh_exact(&inst)?,
                CliMethod::Heuristic => solve_teh_heuristic(&inst)?,
                CliMethod::Case1 => solve_teh_case1(&inst)?,
                CliMethod::Case2 => solve_teh_case2_setcover(&inst)?,
            };
            print!("{}", render_solve(&s, &r));
            Ok(())
        }
        Cmd::ExportLp {
            system,
            fail,
            k,
            protect,
            out,
        } => {
            let s = load_system(&system)?;
            let seed = set_of(&s, &fail)?;
            let enc = match (k, protect) {
                (Some(k), None) => encode_enh_ilp(&EnhInstance::new(&s, seed, k)),
                (None, Some(p)) => {
                    let (inst, _) = TehInstance::new(&s, seed, set_of(&s, &p)?);
                    encode_teh_ilp(&inst)
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "pass exactly one of --k (budget mode) or --protect (keep mode)"
                            .to_string(),
                    ))
                }
            };
            emit(out, &enc.to_lp())
        }
        Cmd::Vulnerable { system, k } => {
            let s = load_system(&system)?;
            let rep = k_most_vulnerable(&s, k, DEFAULT_SUBSET_CAP);
            let mut text = listing(
                format!("seeds ({})", rep.seeds.len()),
                &s.label_vec(&rep.seeds),
            );
            text += &format!("kills: {} of {}\n", rep.kill_count, s.len());
            text += &format!(
                "exhaustive: {}\n",
                if rep.exhaustive { "yes" } else { "no" }
            );
            print!("{text}");
            Ok(())
        }
        Cmd::Gen { what } => match what {
            GenCmd::Power { topology, out } => {
                let topo = PowerTopology::from_json(&read_file(&topology)?)?;
                let (s, warnings) = gen_power_idrs(&topo)?;
                for w in &warnings {
                    eprintln!("warning: {w}");
                }
                emit(out, &s.to_text())
            }
            GenCmd::Geo {
                assets,
                long_threshold,
                out,
            } => {
                let a = assets_from_json(&read_file(&assets)?)?;
                let s = gen_interdep_idrs(&a, long_threshold)?;
                emit(out, &s.to_text())
            }
            GenCmd::Random {
                class,
                n,
                seed,
                idr_prob,
                max_minterms,
                max_minterm_size,
                out,
            } => {
                if n == 0 {
                    return Err(Error::InvalidInput("n must be at least 1".to_string()));
                }
                if !(0.0..=1.0).contains(&idr_prob) {
                    return Err(Error::InvalidInput(
                        "idr-prob must lie in [0, 1]".to_string(),
                    ));
                }
                let params = RandomParams {
                    idr_prob,
                    max_minterms,
                    max_minterm_size,
                };
                let s = gen_random(class.into(), n, seed, &params);
                emit(out, &s.to_text())
            }
        },
        Cmd::Bench { spec, csv, report } => {
            let bspec = BenchmarkSpec::from_json(&read_file(&spec)?)?;
            let sys_path = {
                let p = Path::new(&bspec.system);
                if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    spec.parent().unwrap_or(Path::new(".")).join(p)
                }
            };
            let s = load_system(&sys_path)?;
            let rep = run_benchmark(&s, &bspec)?;
            match csv {
                Some(p) => fs::write(p, rep.to_csv())?,
                None => print!("{}", rep.to_csv()),
            }
            if let Some(p) = report {
                fs::write(p, rep.to_json())?;
            }
            Ok(())
        }
    }
}
