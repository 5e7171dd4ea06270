//! Simulation driver: seeding, synchronous decision ticks, ensembles.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use super::decision::{local_shares, state_probabilities, AgentState};
use super::network::{build_watts_strogatz, Network};
use crate::bass::MarketState;
use crate::{Error, Result};

/// Pinned generator: ChaCha8, seeded from a `u64`. Replicate `r` of an
/// ensemble uses `base_seed + r`.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Simulation configuration.
///
/// `gamma1`/`gamma2` are absolute per-tick seeding counts; their fractions
/// `gamma / n_agents` play the role of the Bass innovation parameters.
/// Seeded agents are drawn spatially uniformly at random.
#[derive(Debug, Clone, PartialEq)]
pub struct AbmConfig {
    pub n_agents: usize,
    /// Even neighbor count of the base ring lattice.
    pub k: usize,
    pub p_rewire: f64,
    /// Intrinsic utilities of (brand 1, brand 2, non-adoption).
    pub utilities: [f64; 3],
    pub gamma1: usize,
    pub gamma2: usize,
    pub max_ticks: usize,
    pub rng_seed: u64,
}

impl Default for AbmConfig {
    fn default() -> Self {
        // Utility gap 0.6 between adopting and not, regular lattice of
        // degree 8, seeding fraction ~0.011 per tick.
        Self {
            n_agents: 10_000,
            k: 8,
            p_rewire: 0.0,
            utilities: [0.6, 0.6, 0.0],
            gamma1: 109,
            gamma2: 239,
            max_ticks: 200,
            rng_seed: 1,
        }
    }
}

impl AbmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents <= self.k {
            return Err(Error::InvalidConfig("n_agents must exceed k"));
        }
        if self.k % 2 != 0 || self.k < 2 {
            return Err(Error::InvalidConfig("k must be even and >= 2"));
        }
        if !(0.0..=1.0).contains(&self.p_rewire) {
            return Err(Error::InvalidConfig("p_rewire must lie in [0, 1]"));
        }
        if self.utilities.iter().any(|u| u.is_nan()) {
            return Err(Error::InvalidConfig("utilities must not be NaN"));
        }
        Ok(())
    }

    pub fn seed_fraction1(&self) -> f64 {
        self.gamma1 as f64 / self.n_agents as f64
    }

    pub fn seed_fraction2(&self) -> f64 {
        self.gamma2 as f64 / self.n_agents as f64
    }
}

/// Per-tick brand shares of the whole population; 1 tick = 1 time unit.
#[derive(Debug, Clone, PartialEq)]
pub struct AbmTrajectory {
    samples: Vec<MarketState>,
}

impl AbmTrajectory {
    pub fn samples(&self) -> &[MarketState] {
        &self.samples
    }

    pub fn final_state(&self) -> MarketState {
        *self.samples.last().expect("at least the initial sample")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// One running simulation; owned state is mutated tick by tick.
pub struct Simulation {
    config: AbmConfig,
    net: Network,
    states: Vec<AgentState>,
    rng: SimRng,
    tick: usize,
}

impl Simulation {
    pub fn new(config: AbmConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = SimRng::seed_from_u64(config.rng_seed);
        let net = build_watts_strogatz(config.n_agents, config.k, config.p_rewire, &mut rng)?;
        let states = vec![AgentState::NonAdopter; config.n_agents];
        Ok(Self { config, net, states, rng, tick: 0 })
    }

    pub fn states(&self) -> &[AgentState] {
        &self.states
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn tick(&self) -> usize {
        self.tick
    }

    pub fn shares(&self) -> (f64, f64) {
        let mut counts = [0usize; 3];
        for s in &self.states {
            counts[s.slot()] += 1;
        }
        let n = self.config.n_agents as f64;
        (counts[0] as f64 / n, counts[1] as f64 / n)
    }

    pub fn all_adopted(&self) -> bool {
        self.states.iter().all(|s| s.is_adopter())
    }

    /// One tick: seed `gamma1`/`gamma2` uniformly chosen non-adopters, then
    /// let every remaining non-adopter sample its next state against the
    /// pre-tick snapshot. Adopters are never re-evaluated.
    pub fn step(&mut self) {
        let snapshot = self.states.clone();
        self.seed();
        for agent in 0..self.config.n_agents {
            if self.states[agent].is_adopter() {
                continue;
            }
            // Isolated agents can only be seeded.
            let Ok(nu) = local_shares(agent, &self.net, &snapshot) else { continue };
            let p = state_probabilities(&nu, &self.config.utilities);
            let draw: f64 = self.rng.gen();
            self.states[agent] = if draw < p[0] {
                AgentState::Brand1
            } else if draw < p[0] + p[1] {
                AgentState::Brand2
            } else {
                AgentState::NonAdopter
            };
        }
        self.tick += 1;
    }

    fn seed(&mut self) {
        let (g1, g2) = (self.config.gamma1, self.config.gamma2);
        if g1 + g2 == 0 {
            return;
        }
        let mut pool: Vec<u32> = (0..self.config.n_agents as u32)
            .filter(|&i| !self.states[i as usize].is_adopter())
            .collect();
        let (take1, take2) = if pool.len() >= g1 + g2 {
            (g1, g2)
        } else {
            // Not enough non-adopters left: seed them all, split
            // proportionally to gamma1:gamma2, remainder by random draw.
            let r = pool.len();
            let mut s1 = r * g1 / (g1 + g2);
            let mut s2 = r * g2 / (g1 + g2);
            while s1 + s2 < r {
                if self.rng.gen_bool(g1 as f64 / (g1 + g2) as f64) {
                    s1 += 1;
                } else {
                    s2 += 1;
                }
            }
            (s1, s2)
        };
        // Partial Fisher-Yates over the pool.
        for pick in 0..take1 + take2 {
            let j = self.rng.gen_range(pick..pool.len());
            pool.swap(pick, j);
            let agent = pool[pick] as usize;
            self.states[agent] =
                if pick < take1 { AgentState::Brand1 } else { AgentState::Brand2 };
        }
    }
}

/// Runs one simulation until all agents adopted or `max_ticks`, recording
/// shares each tick (including the all-non-adopter initial state at t = 0).
pub fn run(config: &AbmConfig) -> Result<AbmTrajectory> {
    let mut sim = Simulation::new(config.clone())?;
    let mut samples = Vec::with_capacity(config.max_ticks + 1);
    let (n1, n2) = sim.shares();
    samples.push(MarketState::new(0.0, n1, n2));
    while sim.tick() < config.max_ticks && !sim.all_adopted() {
        sim.step();
        let (n1, n2) = sim.shares();
        samples.push(MarketState::new(sim.tick() as f64, n1, n2));
    }
    Ok(AbmTrajectory { samples })
}

/// Per-tick ensemble mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSample {
    pub t: f64,
    pub n1: f64,
    pub n2: f64,
    pub n1_sd: f64,
    pub n2_sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTrajectory {
    samples: Vec<EnsembleSample>,
}

impl EnsembleTrajectory {
    pub fn samples(&self) -> &[EnsembleSample] {
        &self.samples
    }

    /// Mean curve as plain market states.
    pub fn mean_curve(&self) -> Vec<MarketState> {
        self.samples.iter().map(|s| MarketState::new(s.t, s.n1, s.n2)).collect()
    }
}

/// Arithmetic mean over independent replicates; replicate `r` uses seed
/// `config.rng_seed + r`. Replicates that saturate early are extended by
/// holding their final (constant) shares.
pub fn ensemble(config: &AbmConfig, replicates: usize) -> Result<EnsembleTrajectory> {
    if replicates == 0 {
        return Err(Error::InvalidConfig("replicates must be >= 1"));
    }
    let mut runs = Vec::with_capacity(replicates);
    for r in 0..replicates as u64 {
        let mut cfg = config.clone();
        cfg.rng_seed = config.rng_seed + r;
        runs.push(run(&cfg)?);
    }
    let len = runs.iter().map(AbmTrajectory::len).max().unwrap();
    let m = replicates as f64;
    let mut samples = Vec::with_capacity(len);
    for i in 0..len {
        let at = |run: &AbmTrajectory| -> MarketState {
            run.samples().get(i).copied().unwrap_or_else(|| {
                let mut last = run.final_state();
                last.t = i as f64;
                last
            })
        };
        let (mut sum1, mut sum2) = (0.0, 0.0);
        for run in &runs {
            let s = at(run);
            sum1 += s.n1;
            sum2 += s.n2;
        }
        let (mean1, mean2) = (sum1 / m, sum2 / m);
        let (mut var1, mut var2) = (0.0, 0.0);
        for run in &runs {
            let s = at(run);
            var1 += (s.n1 - mean1) * (s.n1 - mean1);
            var2 += (s.n2 - mean2) * (s.n2 - mean2);
        }
        let denom = if replicates > 1 { m - 1.0 } else { 1.0 };
        samples.push(EnsembleSample {
            t: i as f64,
            n1: mean1,
            n2: mean2,
            n1_sd: libm::sqrt(var1 / denom),
            n2_sd: libm::sqrt(var2 / denom),
        });
    }
    Ok(EnsembleTrajectory { samples })
}
