//! Trial simulation: draw `u ▷ σ` and report every alternative's welfare.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::{DistributionSpec, FiniteDiscrete};
use crate::error::{Error, Result};
use crate::model::Electorate;
use crate::rng::RandomStream;

use super::EstimationConfig;

/// Trials evaluated between two in-order reductions.
const WAVE: u64 = 256;

enum Sampler<'a> {
    Discrete(FiniteDiscrete),
    Continuous(&'a DistributionSpec),
}

impl<'a> Sampler<'a> {
    fn new(d: &'a DistributionSpec) -> Self {
        match d.to_discrete() {
            Some(fd) => Sampler::Discrete(fd),
            None => Sampler::Continuous(d),
        }
    }
}

struct Workspace {
    draws: Vec<f64>,
    rank_sum: Vec<f64>,
    atom_counts: Vec<usize>,
    // Per atom, a difference array over ranks: +1 where its run starts.
    runs: Vec<i64>,
}

impl Workspace {
    fn new(m: usize, atoms: usize) -> Self {
        Workspace {
            draws: vec![0.0; m],
            rank_sum: vec![0.0; m],
            atom_counts: vec![0; atoms],
            runs: vec![0; atoms * (m + 1)],
        }
    }
}

/// Welfare of every alternative in one trial, written into `sw`.
fn trial_welfare<E: Electorate + ?Sized>(
    sigma: &E,
    sampler: &Sampler<'_>,
    stream: &RandomStream,
    ws: &mut Workspace,
    sw: &mut [f64],
) {
    let m = sigma.num_alternatives();
    sw.fill(0.0);
    let mut rng: ChaCha8Rng = stream.base().clone();
    let mut voter = 0u64;
    for g in 0..sigma.group_count() {
        let (ranking, count) = sigma.group(g);
        match sampler {
            Sampler::Continuous(d) => {
                ws.rank_sum.fill(0.0);
                for _ in 0..count {
                    RandomStream::seek(&mut rng, voter);
                    for x in ws.draws.iter_mut() {
                        *x = d.sample(&mut rng);
                    }
                    ws.draws.sort_unstable_by(|a, b| b.total_cmp(a));
                    for (s, x) in ws.rank_sum.iter_mut().zip(&ws.draws) {
                        *s += x;
                    }
                    voter += 1;
                }
            }
            Sampler::Discrete(fd) => {
                let atoms = fd.len();
                ws.runs.fill(0);
                for _ in 0..count {
                    RandomStream::seek(&mut rng, voter);
                    ws.atom_counts.fill(0);
                    for _ in 0..m {
                        let u: f64 = rng.gen();
                        ws.atom_counts[fd.atom_index(u)] += 1;
                    }
                    let mut start = 0;
                    for a in (0..atoms).rev() {
                        let c = ws.atom_counts[a];
                        if c > 0 {
                            ws.runs[a * (m + 1) + start] += 1;
                            ws.runs[a * (m + 1) + start + c] -= 1;
                            start += c;
                        }
                    }
                    voter += 1;
                }
                ws.rank_sum.fill(0.0);
                for a in 0..atoms {
                    let value = fd.atoms()[a];
                    let row = &ws.runs[a * (m + 1)..(a + 1) * (m + 1)];
                    let mut open = 0i64;
                    for (s, delta) in ws.rank_sum.iter_mut().zip(row) {
                        open += delta;
                        if open != 0 {
                            *s += open as f64 * value;
                        }
                    }
                }
            }
        }
        for (s, &a) in ws.rank_sum.iter().zip(ranking.order()) {
            sw[a as usize - 1] += s;
        }
    }
}

/// Runs `cfg.trials` trials and hands each welfare vector to `consume` in
/// ascending trial order, whatever the worker count.
pub(crate) fn for_each_trial<E, F>(
    sigma: &E,
    d: &DistributionSpec,
    cfg: &EstimationConfig,
    mut consume: F,
) -> Result<()>
where
    E: Electorate + ?Sized,
    F: FnMut(&[f64]),
{
    cfg.validate()?;
    let m = sigma.num_alternatives();
    let sampler = Sampler::new(d);
    let atoms = match &sampler {
        Sampler::Discrete(fd) => fd.len(),
        Sampler::Continuous(_) => 0,
    };
    if cfg.workers == 1 {
        let mut ws = Workspace::new(m, atoms);
        let mut sw = vec![0.0; m];
        for t in 0..cfg.trials {
            let stream = RandomStream::new(cfg.master_seed, t);
            trial_welfare(sigma, &sampler, &stream, &mut ws, &mut sw);
            consume(&sw);
        }
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    let mut start = 0;
    while start < cfg.trials {
        let end = (start + WAVE).min(cfg.trials);
        let wave: Vec<Vec<f64>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(
                    || Workspace::new(m, atoms),
                    |ws, t| {
                        let mut sw = vec![0.0; m];
                        trial_welfare(sigma, &sampler, &RandomStream::new(cfg.master_seed, t), ws, &mut sw);
                        sw
                    },
                )
                .collect()
        });
        for sw in &wave {
            consume(sw);
        }
        start = end;
    }
    Ok(())
}

/// Welfare vectors of every trial, in trial order.
pub fn trial_welfares<E: Electorate + ?Sized>(
    sigma: &E,
    d: &DistributionSpec,
    cfg: &EstimationConfig,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(cfg.trials as usize);
    for_each_trial(sigma, d, cfg, |sw| out.push(sw.to_vec()))?;
    Ok(out)
}
