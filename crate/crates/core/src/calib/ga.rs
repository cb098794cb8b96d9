//! Seeded genetic algorithm over bounded real genes.
//!
//! Every random draw for individual `idx` of generation `gen` comes from its
//! own ChaCha8 stream `(gen << 32) | idx` under the run seed, so the
//! population is independent of how fitness evaluations are scheduled.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::genes::GeneBound;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub max_generations: usize,
    pub mutation_prob: f64,
    pub crossover_prob: f64,
    pub elitism_ratio: f64,
    pub seeds: Vec<u64>,
    /// Per-gene `[lo, hi]` overrides keyed by gene name.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub bounds: BTreeMap<String, [f64; 2]>,
    pub stall_generations: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            max_generations: 1000,
            mutation_prob: 0.1,
            crossover_prob: 0.5,
            elitism_ratio: 0.1,
            seeds: (0..10).collect(),
            bounds: BTreeMap::new(),
            stall_generations: 100,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("mutation_prob", self.mutation_prob),
            ("crossover_prob", self.crossover_prob),
            ("elitism_ratio", self.elitism_ratio),
        ] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {r}")));
            }
        }
        if self.population < 4 {
            return Err(Error::Config(format!("population must be >= 4, got {}", self.population)));
        }
        if self.max_generations == 0 {
            return Err(Error::Config("max_generations must be >= 1".into()));
        }
        if self.stall_generations == 0 {
            return Err(Error::Config("stall_generations must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        Ok(())
    }

    /// Individuals copied unchanged into each new generation.
    pub fn elite_count(&self) -> usize {
        ((self.elitism_ratio * self.population as f64).round() as usize).clamp(1, self.population - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaOutcome {
    pub best_genes: Vec<f64>,
    pub fitness: f64,
    /// Best fitness after each generation, the initial population first.
    pub trace: Vec<f64>,
    /// Generations bred after the initial population.
    pub generations_run: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub fitness: f64,
}

fn rng_for(seed: u64, gen: usize, idx: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((gen as u64) << 32) | idx as u64);
    rng
}

fn random_gene(rng: &mut ChaCha8Rng, b: &GeneBound) -> f64 {
    rng.gen_range(b.lo..=b.hi)
}

fn tournament<'a>(rng: &mut ChaCha8Rng, pop: &'a [Individual]) -> &'a Individual {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if b.fitness < a.fitness {
        b
    } else {
        a
    }
}

fn breed(rng: &mut ChaCha8Rng, pop: &[Individual], bounds: &[GeneBound], config: &GaConfig) -> Vec<f64> {
    let p1 = tournament(rng, pop);
    let p2 = tournament(rng, pop);
    let mut child: Vec<f64> = p1
        .genes
        .iter()
        .zip(&p2.genes)
        .map(|(&g1, &g2)| if rng.gen_bool(config.crossover_prob) { g2 } else { g1 })
        .collect();
    for (g, b) in child.iter_mut().zip(bounds) {
        if rng.gen_bool(config.mutation_prob) {
            *g = random_gene(rng, b);
        }
    }
    child
}

fn evaluate<F>(objective: &F, genes: Vec<Vec<f64>>) -> Vec<Individual>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let fitness: Vec<f64> = genes.par_iter().map(|g| sanitize(objective(g))).collect();
    genes
        .into_iter()
        .zip(fitness)
        .map(|(genes, fitness)| Individual { genes, fitness })
        .collect()
}

/// NaN fitness would poison the ordering.
fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

fn sort_population(pop: &mut [Individual]) {
    pop.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

/// Minimises `objective` over the box `bounds`.
pub fn evolve<F>(objective: F, bounds: &[GeneBound], config: &GaConfig, seed: u64) -> Result<GaOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    evolve_observed(objective, bounds, config, seed, |_, _| {})
}

/// As [`evolve`], calling `observer(generation, population)` after each
/// generation is evaluated and ranked.
pub fn evolve_observed<F, O>(
    objective: F,
    bounds: &[GeneBound],
    config: &GaConfig,
    seed: u64,
    mut observer: O,
) -> Result<GaOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
    O: FnMut(usize, &[Individual]),
{
    config.validate()?;
    if bounds.is_empty() {
        return Err(Error::Config("no genes to optimise".into()));
    }
    if let Some(b) = bounds.iter().find(|b| !(b.lo < b.hi) || !b.lo.is_finite() || !b.hi.is_finite()) {
        return Err(Error::Config(format!("infeasible gene bounds [{}, {}]", b.lo, b.hi)));
    }

    let initial: Vec<Vec<f64>> = (0..config.population)
        .map(|idx| {
            let mut rng = rng_for(seed, 0, idx);
            bounds.iter().map(|b| random_gene(&mut rng, b)).collect()
        })
        .collect();
    let mut pop = evaluate(&objective, initial);
    sort_population(&mut pop);
    observer(0, &pop);

    let elites = config.elite_count();
    let mut trace = vec![pop[0].fitness];
    let mut since_improvement = 0;
    let mut gen = 0;
    while gen < config.max_generations && since_improvement < config.stall_generations {
        gen += 1;
        let children: Vec<Vec<f64>> = (elites..config.population)
            .map(|idx| breed(&mut rng_for(seed, gen, idx), &pop, bounds, config))
            .collect();
        let mut next: Vec<Individual> = pop[..elites].to_vec();
        next.extend(evaluate(&objective, children));
        sort_population(&mut next);
        pop = next;
        observer(gen, &pop);

        let best = pop[0].fitness;
        if best < *trace.last().unwrap() {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        trace.push(best);
    }

    let best = pop.swap_remove(0);
    Ok(GaOutcome {
        best_genes: best.genes,
        fitness: best.fitness,
        trace,
        generations_run: gen,
    })
}
