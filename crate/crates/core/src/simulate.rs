//! Monte Carlo cross-check of the mean-field referral formulas on explicit
//! configuration-model networks.
//!
//! Networks are built by uniform stub matching; self-loops and multi-edges
//! are kept and count toward degree. Every random draw comes from a
//! ChaCha8 stream derived from the configured seed: stream 0 builds the
//! social network, stream 1 the job network, and trial `t` uses stream
//! `t + 2`, so results do not depend on thread scheduling.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, Zeta};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::DegreeDistribution;
use crate::error::{domain, Error, Result};
use crate::model::referral_arrival;

const SOCIAL_STREAM: u64 = 0;
const JOB_STREAM: u64 = 1;
const FIRST_TRIAL_STREAM: u64 = 2;
const MAX_PARITY_RESAMPLES: usize = 10_000;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Undirected multigraph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Neighbors of `node`, with multiplicity; a self-loop lists the node twice.
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adjacency[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.len() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        self.adjacency.len() as f64 / self.node_count() as f64
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.degree(i)).collect()
    }
}

fn sample_degree<R: Rng>(dist: &DegreeDistribution, cap: u32, rng: &mut R) -> Result<u32> {
    let draw = match *dist {
        DegreeDistribution::Degenerate { k } => return Ok(k),
        DegreeDistribution::Poisson { lambda } => Poisson::new(lambda)
            .map_err(|e| Error::Domain(e.to_string()))?
            .sample(rng),
        DegreeDistribution::Zipf { alpha } => Zeta::new(alpha)
            .map_err(|e| Error::Domain(e.to_string()))?
            .sample(rng),
    };
    Ok(draw.min(cap as f64) as u32)
}

/// Largest degree a node may receive in an `n`-node network.
pub fn degree_cap(dist: &DegreeDistribution, n: usize) -> u32 {
    let structural = (n as f64 * dist.mean()).sqrt().ceil();
    structural.min((n - 1) as f64).max(1.0) as u32
}

/// Configuration-model network on `n` nodes with i.i.d. degrees from `dist`.
///
/// Poisson and Zipf draws are capped at the structural cutoff
/// `min(n − 1, ⌈√(n E[k])⌉)`, above which stub matching concentrates many
/// parallel edges on a few hubs. If the stub total is odd the last node's
/// degree is redrawn until it is even.
pub fn build_configuration_network(dist: &DegreeDistribution, n: usize, seed: u64) -> Result<Network> {
    build_with_rng(dist, n, &mut stream_rng(seed, SOCIAL_STREAM))
}

fn build_with_rng(dist: &DegreeDistribution, n: usize, rng: &mut ChaCha8Rng) -> Result<Network> {
    dist.validate()?;
    if n < 2 || n > u32::MAX as usize {
        return domain(format!("network needs between 2 and 2^32 - 1 nodes, got {n}"));
    }
    let cap = degree_cap(dist, n);
    let mut degrees = (0..n).map(|_| sample_degree(dist, cap, rng)).collect::<Result<Vec<_>>>()?;
    let mut total: u64 = degrees.iter().map(|&d| d as u64).sum();
    let mut attempts = 0;
    while total % 2 == 1 {
        if matches!(dist, DegreeDistribution::Degenerate { .. }) || attempts >= MAX_PARITY_RESAMPLES {
            return domain(format!("cannot make the stub count even for {dist:?} on {n} nodes"));
        }
        total -= degrees[n - 1] as u64;
        degrees[n - 1] = sample_degree(dist, cap, rng)?;
        total += degrees[n - 1] as u64;
        attempts += 1;
    }

    let mut stubs: Vec<u32> = Vec::with_capacity(total as usize);
    for (node, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(node as u32, d as usize));
    }
    stubs.shuffle(rng);

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    for &d in &degrees {
        offsets.push(offsets.last().unwrap() + d as usize);
    }
    let mut fill = offsets[..n].to_vec();
    let mut adjacency = vec![0u32; total as usize];
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0] as usize, pair[1] as usize);
        adjacency[fill[a]] = b as u32;
        fill[a] += 1;
        adjacency[fill[b]] = a as u32;
        fill[b] += 1;
    }
    Ok(Network { offsets, adjacency })
}

/// Snapshot experiment for the referral channel of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_workers: usize,
    /// Size of the random `d_f`-regular job network.
    pub n_jobs: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub dist: DegreeDistribution,
    pub d_f: u32,
    /// Probability that a contact is employed, `1 − u_i`.
    pub employment_rate: f64,
    /// Probability that an adjacent job is vacant, `v / (1 − u + v)`.
    pub vacancy_share: f64,
    pub phi: f64,
}

impl SimConfig {
    /// Experiment matching the equilibrium context `(u_i, u, v, φ, d_f)`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_context(
        dist: DegreeDistribution,
        u_i: f64,
        u: f64,
        v: f64,
        phi: f64,
        d_f: u32,
        n_workers: usize,
        n_trials: usize,
        seed: u64,
    ) -> Self {
        SimConfig {
            n_workers,
            n_jobs: 100_000,
            n_trials,
            seed,
            dist,
            d_f,
            employment_rate: 1.0 - u_i,
            vacancy_share: v / (1.0 - u + v),
            phi,
        }
    }

    /// Mean-field information probability implied by this configuration.
    pub fn info_probability(&self) -> f64 {
        let any_vacant = 1.0 - (1.0 - self.vacancy_share).powi(self.d_f as i32);
        self.phi * self.employment_rate * any_vacant
    }

    fn validate(&self) -> Result<()> {
        if self.n_workers < 2 || self.n_trials == 0 {
            return domain("simulation needs at least two workers and one trial");
        }
        for (name, p) in [
            ("employment rate", self.employment_rate),
            ("vacancy share", self.vacancy_share),
            ("phi", self.phi),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return domain(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.d_f > 0 && (self.n_jobs <= self.d_f as usize || (self.n_jobs * self.d_f as usize) % 2 == 1) {
            return domain("job network needs n_jobs > d_f and an even stub count");
        }
        if self.employment_rate >= 1.0 {
            return domain("no unemployed workers to act as focal job seekers");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferralEstimate {
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 − rate) / trials)`.
    pub std_error: f64,
    pub successes: u64,
    pub trials: u64,
    /// Mean-field referral arrival for the same configuration.
    pub mean_field: f64,
}

impl ReferralEstimate {
    /// Whether the mean-field value lies within `k` standard errors.
    pub fn agrees_within(&self, k: f64) -> bool {
        (self.rate - self.mean_field).abs() <= k * self.std_error
    }
}

/// Empirical probability that an unemployed worker hears of at least one
/// vacancy from a contact.
///
/// Each trial draws a focal worker uniformly (employment is independent of
/// the network, so this is a uniform draw among the unemployed) and marks
/// the focal's distinct contacts: each is employed with probability
/// `employment_rate`, searches for contacts with probability `phi`, holds a
/// uniformly random job, and sees each vacant neighbor of that job in the
/// job network. Job vacancy states are drawn once per trial.
pub fn estimate_referral_rate(cfg: &SimConfig) -> Result<ReferralEstimate> {
    cfg.validate()?;
    let mean_field = referral_arrival(&cfg.dist, cfg.info_probability())?;
    let trials = cfg.n_trials as u64;
    if cfg.phi == 0.0 || cfg.d_f == 0 {
        return Ok(ReferralEstimate { rate: 0.0, std_error: 0.0, successes: 0, trials, mean_field });
    }
    let social = build_with_rng(&cfg.dist, cfg.n_workers, &mut stream_rng(cfg.seed, SOCIAL_STREAM))?;
    let jobs = build_with_rng(
        &DegreeDistribution::degenerate(cfg.d_f),
        cfg.n_jobs,
        &mut stream_rng(cfg.seed, JOB_STREAM),
    )?;

    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(cfg.seed, FIRST_TRIAL_STREAM + t);
            referral_trial(cfg, &social, &jobs, &mut rng) as u64
        })
        .sum();
    let rate = successes as f64 / trials as f64;
    Ok(ReferralEstimate {
        rate,
        std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
        successes,
        trials,
        mean_field,
    })
}

fn referral_trial(cfg: &SimConfig, social: &Network, jobs: &Network, rng: &mut ChaCha8Rng) -> bool {
    let focal = rng.random_range(0..social.node_count());
    let mut contacts: Vec<u32> = social.neighbors(focal).to_vec();
    contacts.sort_unstable();
    contacts.dedup();
    let mut vacancy: HashMap<u32, bool> = HashMap::new();
    for &contact in &contacts {
        if contact as usize == focal {
            // self-loop: the focal worker is unemployed
            continue;
        }
        if !rng.random_bool(cfg.employment_rate) || !rng.random_bool(cfg.phi) {
            continue;
        }
        let held = rng.random_range(0..jobs.node_count()) as u32;
        vacancy.insert(held, false);
        for &adjacent in jobs.neighbors(held as usize) {
            let vacant = *vacancy
                .entry(adjacent)
                .or_insert_with(|| rng.random_bool(cfg.vacancy_share));
            if vacant {
                return true;
            }
        }
    }
    false
}

/// Discrete-time labour-market dynamics on a fixed social network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub delta: f64,
    /// Per-period probability of a market offer.
    pub p_market: f64,
    /// Per-period probability that an employed contact holds vacancy information.
    pub info_given_employed: f64,
    pub burn_in: usize,
    pub periods: usize,
    pub seed: u64,
}

/// Fraction of the recorded periods each worker spent unemployed.
///
/// Each period employed workers separate with probability `delta`; an
/// unemployed worker is hired if a market offer arrives or if any contact
/// employed at the start of the period holds vacancy information.
pub fn simulate_unemployment(net: &Network, cfg: &DynamicsConfig) -> Result<Vec<f64>> {
    for p in [cfg.delta, cfg.p_market, cfg.info_given_employed] {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("per-period probabilities must lie in [0, 1], got {p}"));
        }
    }
    if cfg.periods == 0 {
        return domain("need at least one recorded period");
    }
    let n = net.node_count();
    let mut rng = stream_rng(cfg.seed, SOCIAL_STREAM);
    let mut employed: Vec<bool> = (0..n).map(|_| rng.random_bool(0.95)).collect();
    let mut unemployed_time = vec![0u32; n];
    for period in 0..cfg.burn_in + cfg.periods {
        let informed: Vec<bool> = employed
            .iter()
            .map(|&e| e && rng.random_bool(cfg.info_given_employed))
            .collect();
        for i in 0..n {
            if employed[i] {
                employed[i] = !rng.random_bool(cfg.delta);
            } else {
                let market = rng.random_bool(cfg.p_market);
                employed[i] = market || net.neighbors(i).iter().any(|&j| informed[j as usize]);
            }
            if period >= cfg.burn_in && !employed[i] {
                unemployed_time[i] += 1;
            }
        }
    }
    Ok(unemployed_time.into_iter().map(|t| t as f64 / cfg.periods as f64).collect())
}

/// `(degree, workers, mean unemployment)` for every degree class present.
pub fn degree_unemployment_profile(net: &Network, unemployment: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut classes: std::collections::BTreeMap<usize, (usize, f64)> = Default::default();
    for (i, &u) in unemployment.iter().enumerate() {
        let e = classes.entry(net.degree(i)).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += u;
    }
    classes.into_iter().map(|(d, (count, sum))| (d, count, sum / count as f64)).collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    sxy / (sxx * syy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}
