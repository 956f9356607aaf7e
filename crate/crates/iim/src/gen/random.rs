//! Seeded random systems in each structural class.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::restricted::IdrClass;
use crate::system::{System, SystemBuilder};

/// Density knobs for [`gen_random`].
#[derive(Debug, Clone, Copy)]
pub struct RandomParams {
    /// Chance that an entity gets a rule at all.
    pub idr_prob: f64,
    /// Upper bound on minterms per rule; only the single-dependency class
    /// ignores it.
    pub max_minterms: usize,
    /// Upper bound on entities per minterm; only the general class uses it.
    pub max_minterm_size: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            idr_prob: 0.8,
            max_minterms: 3,
            max_minterm_size: 3,
        }
    }
}

/// Builds a random system of `n` entities in the requested class. The same
/// `(class, n, seed, params)` always yields the same system. Entities are
/// labeled `e000`, `e001`, ... and never depend on themselves.
pub fn gen_random(class: IdrClass, n: usize, seed: u64, params: &RandomParams) -> System {
    assert!(n >= 1, "a system needs at least one entity");
    assert!(
        (0.0..=1.0).contains(&params.idr_prob),
        "idr_prob must be a probability"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.saturating_sub(1).to_string().len().max(3);
    let labels: Vec<String> = (0..n).map(|i| format!("e{i:0width$}")).collect();
    let mut b = SystemBuilder::new();
    for l in &labels {
        b.declare(l);
    }
    if n >= 2 {
        let max_m = params.max_minterms.max(1);
        let max_sz = params.max_minterm_size.max(1).min(n - 1);
        for i in 0..n {
            if !rng.gen_bool(params.idr_prob) {
                continue;
            }
            let minterms: Vec<Vec<&str>> = match class {
                IdrClass::SingleDependency => vec![vec![pick_other(&mut rng, &labels, i)]],
                IdrClass::Disjunctive => {
                    let m = rng.gen_range(1..=max_m).min(n - 1);
                    sample(&mut rng, n - 1, m)
                        .iter()
                        .map(|j| vec![skip_self(&labels, i, j)])
                        .collect()
                }
                IdrClass::General => {
                    let m = rng.gen_range(1..=max_m);
                    (0..m)
                        .map(|_| {
                            let size = rng.gen_range(1..=max_sz);
                            sample(&mut rng, n - 1, size)
                                .iter()
                                .map(|j| skip_self(&labels, i, j))
                                .collect()
                        })
                        .collect()
                }
            };
            b.rule(&labels[i], minterms, 0)
                .expect("generated rules are well-formed");
        }
    }
    b.finish().expect("generated systems are well-formed")
}

fn pick_other<'a>(rng: &mut ChaCha8Rng, labels: &'a [String], i: usize) -> &'a str {
    let j = rng.gen_range(0..labels.len() - 1);
    skip_self(labels, i, j)
}

// draws from [0, n-1) land on [0, n) minus the target
fn skip_self(labels: &[String], target: usize, j: usize) -> &str {
    labels[if j >= target { j + 1 } else { j }].as_str()
}
