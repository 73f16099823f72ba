//! Genetic search over feature subsets.
//!
//! Each generation: evaluate, carry the best chromosome over unchanged, then
//! fill the rest of the next population with fitness-proportional parent
//! pairs recombined by single-point crossover and per-bit mutation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FeatureSubset;
use crate::dataset::FeatureId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover: f64,
    pub mutation: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 20,
            generations: 20,
            crossover: 0.6,
            mutation: 0.033,
            seed: 1,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 || self.population % 2 != 0 {
            return Err(Error::InvalidGaConfig(format!(
                "population must be even and >= 2, got {}",
                self.population
            )));
        }
        for (name, p) in [("crossover", self.crossover), ("mutation", self.mutation)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidGaConfig(format!(
                    "{name} probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub genes: Vec<bool>,
    pub fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(genes: Vec<bool>) -> Chromosome {
        Chromosome {
            genes,
            fitness: None,
        }
    }

    pub fn decode(&self, pool: &[FeatureId]) -> FeatureSubset {
        FeatureSubset::new(
            self.genes
                .iter()
                .zip(pool)
                .filter(|(g, _)| **g)
                .map(|(_, f)| *f)
                .collect(),
            "genetic",
        )
    }

    fn repair(&mut self, rng: &mut impl Rng) {
        if !self.genes.iter().any(|g| *g) {
            let i = rng.random_range(0..self.genes.len());
            self.genes[i] = true;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub subset: FeatureSubset,
    pub best_fitness: f64,
    /// Best fitness seen so far, after the initial population and after each
    /// generation.
    pub trace: Vec<f64>,
    /// Distinct chromosomes evaluated.
    pub evaluations: usize,
}

/// Runs the search over `pool` starting from a random population.
pub fn genetic_search<F>(pool: &[FeatureId], cfg: &GaConfig, fitness: F) -> Result<GaOutcome>
where
    F: FnMut(&FeatureSubset) -> Result<f64>,
{
    cfg.validate()?;
    if pool.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial = (0..cfg.population)
        .map(|_| {
            let mut c = Chromosome::new((0..pool.len()).map(|_| rng.random_bool(0.5)).collect());
            c.repair(&mut rng);
            c
        })
        .collect();
    evolve(pool, cfg, initial, fitness, rng)
}

/// Runs the search from a caller-supplied initial population.
pub fn genetic_search_from<F>(
    pool: &[FeatureId],
    cfg: &GaConfig,
    initial: Vec<Chromosome>,
    fitness: F,
) -> Result<GaOutcome>
where
    F: FnMut(&FeatureSubset) -> Result<f64>,
{
    cfg.validate()?;
    if pool.is_empty() {
        return Err(Error::EmptySubset);
    }
    if initial.len() != cfg.population || initial.iter().any(|c| c.genes.len() != pool.len()) {
        return Err(Error::InvalidGaConfig(
            "initial population does not match population size or pool width".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial = initial
        .into_iter()
        .map(|mut c| {
            c.repair(&mut rng);
            c
        })
        .collect();
    evolve(pool, cfg, initial, fitness, rng)
}

fn roulette(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn selection_weights(pop: &[Chromosome]) -> Vec<f64> {
    let fit: Vec<f64> = pop.iter().map(|c| c.fitness.expect("evaluated")).collect();
    let min = fit.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        fit
    } else {
        const EPS: f64 = 1e-6;
        fit.iter().map(|f| f - min + EPS).collect()
    }
}

fn evolve<F>(
    pool: &[FeatureId],
    cfg: &GaConfig,
    mut pop: Vec<Chromosome>,
    mut fitness: F,
    mut rng: ChaCha8Rng,
) -> Result<GaOutcome>
where
    F: FnMut(&FeatureSubset) -> Result<f64>,
{
    let width = pool.len();
    let mut memo: HashMap<Vec<bool>, f64> = HashMap::new();
    let mut evaluate = |pop: &mut [Chromosome]| -> Result<()> {
        for c in pop.iter_mut().filter(|c| c.fitness.is_none()) {
            let f = match memo.get(&c.genes) {
                Some(f) => *f,
                None => {
                    let f = fitness(&c.decode(pool))?;
                    memo.insert(c.genes.clone(), f);
                    f
                }
            };
            c.fitness = Some(f);
        }
        Ok(())
    };

    let best_of = |pop: &[Chromosome]| -> Chromosome {
        let mut best = &pop[0];
        for c in &pop[1..] {
            if c.fitness > best.fitness {
                best = c;
            }
        }
        best.clone()
    };

    evaluate(&mut pop)?;
    let mut best = best_of(&pop);
    let mut trace = vec![best.fitness.unwrap()];

    for _ in 0..cfg.generations {
        let weights = selection_weights(&pop);
        let mut next = Vec::with_capacity(cfg.population);
        next.push(best_of(&pop));
        while next.len() < cfg.population {
            let mut x = pop[roulette(&weights, &mut rng)].genes.clone();
            let mut y = pop[roulette(&weights, &mut rng)].genes.clone();
            if width >= 2 && rng.random_bool(cfg.crossover) {
                let point = rng.random_range(1..width);
                for i in point..width {
                    std::mem::swap(&mut x[i], &mut y[i]);
                }
            }
            for genes in [&mut x, &mut y] {
                for g in genes.iter_mut() {
                    if rng.random_bool(cfg.mutation) {
                        *g = !*g;
                    }
                }
            }
            for genes in [x, y] {
                if next.len() < cfg.population {
                    let mut c = Chromosome::new(genes);
                    c.repair(&mut rng);
                    next.push(c);
                }
            }
        }
        pop = next;
        evaluate(&mut pop)?;
        let gen_best = best_of(&pop);
        if gen_best.fitness > best.fitness {
            best = gen_best;
        }
        trace.push(best.fitness.unwrap());
    }

    Ok(GaOutcome {
        subset: best.decode(pool),
        best_fitness: best.fitness.unwrap(),
        trace,
        evaluations: memo.len(),
    })
}
