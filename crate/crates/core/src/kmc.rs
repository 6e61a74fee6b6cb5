//! Continuous-time kinetic Monte Carlo for all kernels: exact-event
//! simulation with exponential waiting times, hitting-time estimators,
//! and empirical trace statistics.
//!
//! Replica i draws from an independent counter-based stream derived from
//! (seed, i), so runs reproduce bit-for-bit and replica order is
//! irrelevant to the aggregate.

use crate::chain::{exponent_fit, ExponentFit};
use crate::dynamics::{outgoing_rates, DynamicsSpec};
use crate::error::ChainError;
use crate::lattice::{hamiltonian, LatticeDims, SpinConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Precomputed-rate fast path is used at or below this many states.
const TABLE_LIMIT: u64 = 100_000;

#[derive(Debug, Clone)]
pub enum TargetSet {
    /// The monochromatic configuration of one spin.
    Ground(u8),
    /// Any monochromatic configuration other than the given spin.
    AnyGroundExcept(u8),
    Codes(Vec<u64>),
}

impl TargetSet {
    fn contains(&self, dims: LatticeDims, q: u8, code: u64, cfg: &SpinConfig) -> bool {
        match self {
            TargetSet::Ground(a) => code == SpinConfig::monochromatic(dims, q, *a).encode(),
            TargetSet::AnyGroundExcept(a) => {
                cfg.is_monochromatic().is_some_and(|s| s != *a)
            }
            TargetSet::Codes(codes) => codes.contains(&code),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimRun {
    pub spec: DynamicsSpec,
    pub dims: LatticeDims,
    pub beta: f64,
    pub seed: u64,
    pub start: SpinConfig,
    pub target: TargetSet,
    /// Optional time horizon; reaching it flags the sample as censored.
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct HittingSample {
    pub time: f64,
    pub events: u64,
    pub hit: bool,
    /// Visit counts per energy level.
    pub energy_visits: BTreeMap<u32, u64>,
}

fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

fn exp_variate<R: Rng>(rng: &mut R, total_rate: f64) -> f64 {
    let u: f64 = rng.gen::<f64>();
    -(1.0 - u).ln() / total_rate
}

/// Per-state transition table: cumulative rates in shifted-exponent space.
struct RateTable {
    targets: Vec<Vec<u32>>,
    cumrate: Vec<Vec<f64>>,
    /// true total exit rate = shifted total * exp(-beta * shift)
    total: Vec<f64>,
    energy: Vec<u32>,
}

fn build_table(dims: LatticeDims, q: u8, spec: &DynamicsSpec, beta: f64) -> RateTable {
    let n = SpinConfig::space_size(dims, q, TABLE_LIMIT).expect("guarded") as usize;
    let mut targets = Vec::with_capacity(n);
    let mut cumrate = Vec::with_capacity(n);
    let mut total = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    for code in 0..n as u64 {
        let cfg = SpinConfig::decode(dims, q, code);
        energy.push(hamiltonian(&cfg));
        let terms = outgoing_rates(&cfg, spec);
        let shift = terms
            .iter()
            .map(|t| t.exponent)
            .fold(f64::INFINITY, f64::min);
        let mut tg = Vec::with_capacity(terms.len());
        let mut cr = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        for t in &terms {
            acc += t.prefactor * (-beta * (t.exponent - shift)).exp();
            tg.push(t.apply(&cfg).encode() as u32);
            cr.push(acc);
        }
        targets.push(tg);
        cumrate.push(cr);
        total.push(acc * (-beta * shift).exp());
    }
    RateTable {
        targets,
        cumrate,
        total,
        energy,
    }
}

/// Exact-event simulation of one replica until the target set or horizon.
pub fn simulate_hitting(run: &SimRun, replica: u64) -> HittingSample {
    let mut rng = replica_rng(run.seed, replica);
    let dims = run.dims;
    let q = run.spec.q;
    let fast = SpinConfig::space_size(dims, q, TABLE_LIMIT).is_ok();
    let mut energy_visits: BTreeMap<u32, u64> = BTreeMap::new();
    let mut time = 0.0f64;
    let mut events = 0u64;

    if fast {
        let table = build_table(dims, q, &run.spec, run.beta);
        let mut code = run.start.encode() as usize;
        loop {
            let cfg_hit = {
                let cfg = SpinConfig::decode(dims, q, code as u64);
                run.target.contains(dims, q, code as u64, &cfg)
            };
            if cfg_hit {
                return HittingSample {
                    time,
                    events,
                    hit: true,
                    energy_visits,
                };
            }
            *energy_visits.entry(table.energy[code]).or_insert(0) += 1;
            time += exp_variate(&mut rng, table.total[code]);
            if run.horizon.is_some_and(|h| time > h) {
                return HittingSample {
                    time,
                    events,
                    hit: false,
                    energy_visits,
                };
            }
            let cr = &table.cumrate[code];
            let pick: f64 = rng.gen::<f64>() * cr.last().unwrap();
            let j = cr.partition_point(|&c| c < pick).min(cr.len() - 1);
            code = table.targets[code][j] as usize;
            events += 1;
        }
    }

    // general path: rates recomputed per event
    let mut cfg = run.start.clone();
    loop {
        let code = cfg.encode();
        if run.target.contains(dims, q, code, &cfg) {
            return HittingSample {
                time,
                events,
                hit: true,
                energy_visits,
            };
        }
        *energy_visits.entry(hamiltonian(&cfg)).or_insert(0) += 1;
        let terms = outgoing_rates(&cfg, &run.spec);
        let shift = terms
            .iter()
            .map(|t| t.exponent)
            .fold(f64::INFINITY, f64::min);
        let mut acc = 0.0;
        let cum: Vec<f64> = terms
            .iter()
            .map(|t| {
                acc += t.prefactor * (-run.beta * (t.exponent - shift)).exp();
                acc
            })
            .collect();
        let total = acc * (-run.beta * shift).exp();
        time += exp_variate(&mut rng, total);
        if run.horizon.is_some_and(|h| time > h) {
            return HittingSample {
                time,
                events,
                hit: false,
                energy_visits,
            };
        }
        let pick: f64 = rng.gen::<f64>() * acc;
        let j = cum.partition_point(|&c| c < pick).min(cum.len() - 1);
        cfg = terms[j].apply(&cfg);
        events += 1;
    }
}

#[derive(Debug, Clone)]
pub struct HittingEstimate {
    pub replicas: usize,
    pub mean: f64,
    /// None when fewer than 2 replicas.
    pub stderr: Option<f64>,
    pub times: Vec<f64>,
    pub censored: usize,
}

/// Replicated hitting-time estimate; replicas run in parallel on
/// independent streams, aggregation is order-free.
pub fn estimate_hitting(run: &SimRun, replicas: usize) -> HittingEstimate {
    let samples: Vec<HittingSample> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| simulate_hitting(run, r))
        .collect();
    let censored = samples.iter().filter(|s| !s.hit).count();
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    let mean = times.iter().sum::<f64>() / times.len().max(1) as f64;
    let stderr = (times.len() >= 2).then(|| {
        let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>()
            / (times.len() - 1) as f64;
        (var / times.len() as f64).sqrt()
    });
    HittingEstimate {
        replicas,
        mean,
        stderr,
        times,
        censored,
    }
}

#[derive(Debug, Clone)]
pub struct EkEstimate {
    /// (beta, mean, stderr)
    pub per_beta: Vec<(f64, f64, f64)>,
    pub fit: ExponentFit,
}

/// Hitting means over a beta grid plus the exponent fit of their decay.
pub fn estimate_ek(
    run: &SimRun,
    beta_grid: &[f64],
    replicas: usize,
) -> Result<EkEstimate, ChainError> {
    let mut per_beta = Vec::with_capacity(beta_grid.len());
    for (i, &beta) in beta_grid.iter().enumerate() {
        let mut r = run.clone();
        r.beta = beta;
        r.seed = run.seed.wrapping_add((i as u64) << 32);
        let est = estimate_hitting(&r, replicas);
        per_beta.push((beta, est.mean, est.stderr.unwrap_or(f64::NAN)));
    }
    let samples: Vec<(f64, f64)> = per_beta.iter().map(|&(b, m, _)| (b, m)).collect();
    let fit = exponent_fit(&samples)?;
    Ok(EkEstimate { per_beta, fit })
}

#[derive(Debug, Clone)]
pub struct TraceStats {
    pub total_time: f64,
    /// Occupation time per ground state (index spin-1).
    pub time_in_ground: Vec<f64>,
    pub fraction_outside: f64,
    /// Jump counts between ground states (from, to).
    pub jumps: Vec<Vec<u64>>,
    /// jumps / occupation time of the source ground state.
    pub empirical_rates: Vec<Vec<f64>>,
}

/// Long-trajectory estimate of the inter-ground-state trace statistics.
pub fn empirical_trace(
    spec: &DynamicsSpec,
    dims: LatticeDims,
    beta: f64,
    horizon: f64,
    seed: u64,
) -> TraceStats {
    let q = spec.q;
    let run = SimRun {
        spec: *spec,
        dims,
        beta,
        seed,
        start: SpinConfig::monochromatic(dims, q, 1),
        target: TargetSet::Codes(Vec::new()),
        horizon: None,
    };
    let mut rng = replica_rng(seed, 0);
    let table = build_table(dims, q, spec, beta);
    let ground_codes: Vec<usize> = (1..=q)
        .map(|a| SpinConfig::monochromatic(dims, q, a).encode() as usize)
        .collect();
    let mut code = run.start.encode() as usize;
    let mut time = 0.0f64;
    let mut time_in_ground = vec![0.0f64; q as usize];
    let mut jumps = vec![vec![0u64; q as usize]; q as usize];
    let mut last_ground: Option<usize> = None;
    while time < horizon {
        let wait = exp_variate(&mut rng, table.total[code]);
        let dwell = wait.min(horizon - time);
        if let Some(g) = ground_codes.iter().position(|&gc| gc == code) {
            time_in_ground[g] += dwell;
            if last_ground != Some(g) {
                if let Some(prev) = last_ground {
                    jumps[prev][g] += 1;
                }
                last_ground = Some(g);
            }
        }
        time += wait;
        if time >= horizon {
            break;
        }
        let cr = &table.cumrate[code];
        let pick: f64 = rng.gen::<f64>() * cr.last().unwrap();
        let j = cr.partition_point(|&c| c < pick).min(cr.len() - 1);
        code = table.targets[code][j] as usize;
    }
    let total_in: f64 = time_in_ground.iter().sum();
    let empirical_rates = jumps
        .iter()
        .enumerate()
        .map(|(a, row)| {
            row.iter()
                .map(|&c| {
                    if time_in_ground[a] > 0.0 {
                        c as f64 / time_in_ground[a]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    TraceStats {
        total_time: horizon,
        time_in_ground,
        fraction_outside: 1.0 - total_in / horizon,
        jumps,
        empirical_rates,
    }
}

/// Batched occupation fractions of the ground states, with batch-mean
/// standard errors, for Gibbs-agreement checks.
#[derive(Debug, Clone)]
pub struct OccupationReport {
    pub fractions: Vec<f64>,
    pub stderr: Vec<f64>,
}

pub fn occupation_fractions(
    spec: &DynamicsSpec,
    dims: LatticeDims,
    beta: f64,
    horizon: f64,
    batches: usize,
    seed: u64,
) -> OccupationReport {
    let q = spec.q as usize;
    let mut rng = replica_rng(seed, 1);
    let table = build_table(dims, spec.q, spec, beta);
    let ground_codes: Vec<usize> = (1..=spec.q)
        .map(|a| SpinConfig::monochromatic(dims, spec.q, a).encode() as usize)
        .collect();
    let batch_len = horizon / batches as f64;
    let mut per_batch = vec![vec![0.0f64; q]; batches];
    let mut code = ground_codes[0];
    let mut time = 0.0f64;
    while time < horizon {
        let wait = exp_variate(&mut rng, table.total[code]);
        let end = (time + wait).min(horizon);
        if let Some(g) = ground_codes.iter().position(|&gc| gc == code) {
            // spread the dwell over the batches it covers
            let mut t0 = time;
            while t0 < end {
                let b = ((t0 / batch_len) as usize).min(batches - 1);
                let b_end = ((b + 1) as f64 * batch_len).min(end);
                per_batch[b][g] += b_end - t0;
                t0 = b_end;
            }
        }
        time += wait;
        if time >= horizon {
            break;
        }
        let cr = &table.cumrate[code];
        let pick: f64 = rng.gen::<f64>() * cr.last().unwrap();
        let j = cr.partition_point(|&c| c < pick).min(cr.len() - 1);
        code = table.targets[code][j] as usize;
    }
    let mut fractions = vec![0.0f64; q];
    let mut stderr = vec![0.0f64; q];
    for g in 0..q {
        let means: Vec<f64> = per_batch.iter().map(|b| b[g] / batch_len).collect();
        let mean = means.iter().sum::<f64>() / batches as f64;
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
            / (batches - 1).max(1) as f64;
        fractions[g] = mean;
        stderr[g] = (var / batches as f64).sqrt();
    }
    OccupationReport { fractions, stderr }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims33() -> LatticeDims {
        LatticeDims::new(3, 3).unwrap()
    }

    #[test]
    fn fixed_seed_replays_identically() {
        let run = SimRun {
            spec: DynamicsSpec::mh(2),
            dims: dims33(),
            beta: 1.5,
            seed: 42,
            start: SpinConfig::monochromatic(dims33(), 2, 1),
            target: TargetSet::Ground(2),
            horizon: None,
        };
        let a = simulate_hitting(&run, 3);
        let b = simulate_hitting(&run, 3);
        assert_eq!(a.time, b.time);
        assert_eq!(a.events, b.events);
        let c = simulate_hitting(&run, 4);
        assert_ne!(a.time, c.time);
    }

    #[test]
    fn beta_zero_exit_rate() {
        // at beta = 0 every site/spin move has rate 1: total = KL (q-1)
        let d = dims33();
        let spec = DynamicsSpec::mh(3);
        let table = build_table(d, 3, &spec, 0.0);
        for code in [0usize, 1, 100] {
            assert!((table.total[code] - 18.0).abs() < 1e-12);
        }
    }

    #[test]
    fn waiting_time_mean_matches_total_rate() {
        let d = dims33();
        let spec = DynamicsSpec::mh(2);
        let beta = 1.0;
        let table = build_table(d, 2, &spec, beta);
        let code = 5usize;
        let mut rng = replica_rng(7, 0);
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|_| exp_variate(&mut rng, table.total[code]))
            .sum::<f64>()
            / n as f64;
        let expect = 1.0 / table.total[code];
        let stderr = expect / (n as f64).sqrt();
        assert!((mean - expect).abs() < 3.0 * stderr);
    }

    #[test]
    fn replica_order_does_not_change_times() {
        let run = SimRun {
            spec: DynamicsSpec::mh(2),
            dims: dims33(),
            beta: 1.2,
            seed: 11,
            start: SpinConfig::monochromatic(dims33(), 2, 1),
            target: TargetSet::Ground(2),
            horizon: None,
        };
        let fwd: Vec<f64> = (0..8u64).map(|r| simulate_hitting(&run, r).time).collect();
        let mut rev: Vec<f64> = (0..8u64)
            .rev()
            .map(|r| simulate_hitting(&run, r).time)
            .collect();
        rev.reverse();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn horizon_censors_sample() {
        let run = SimRun {
            spec: DynamicsSpec::mh(2),
            dims: dims33(),
            beta: 4.0,
            seed: 1,
            start: SpinConfig::monochromatic(dims33(), 2, 1),
            target: TargetSet::Ground(2),
            horizon: Some(0.5),
        };
        let s = simulate_hitting(&run, 0);
        assert!(!s.hit);
    }
}
