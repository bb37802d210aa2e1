//! Bounded derivative-free minimizers: DE, jDE, SAMDE and DEPSO.
//!
//! All algorithms are generation-synchronous. A single seeded RNG draws
//! every random quantity of a generation in individual order before any
//! trial is evaluated, so evaluating trials in parallel cannot change the
//! result. The evaluation budget is never exceeded: in the last
//! generation only as many trials as the budget allows are evaluated, in
//! index order, and the remaining individuals keep their parents.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A box-constrained minimization problem.
pub struct OptProblem<F> {
    lower: Vec<f64>,
    upper: Vec<f64>,
    objective: F,
    initial_guess: Option<Vec<f64>>,
}

impl<F: Fn(&[f64]) -> f64 + Sync> OptProblem<F> {
    pub fn new(bounds: &[(f64, f64)], objective: F) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::param("bounds", "dimension must be at least 1"));
        }
        if let Some((lo, hi)) = bounds
            .iter()
            .find(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::param(
                "bounds",
                format!("need finite lower < upper, got [{lo}, {hi}]"),
            ));
        }
        Ok(Self {
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
            objective,
            initial_guess: None,
        })
    }

    /// Seed one member of the initial population with `x`.
    pub fn with_initial_guess(mut self, x: Vec<f64>) -> Result<Self> {
        if x.len() != self.dim() {
            return Err(Error::param("initial_guess", "wrong dimension"));
        }
        let x = (0..x.len())
            .map(|j| reflect(x[j], self.lower[j], self.upper[j]))
            .collect();
        self.initial_guess = Some(x);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = (self.objective)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dim())
            .map(|j| self.lower[j] + rng.random::<f64>() * (self.upper[j] - self.lower[j]))
            .collect()
    }

    fn initial_population(&self, np: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let mut pop: Vec<Vec<f64>> = (0..np).map(|_| self.random_point(rng)).collect();
        if let Some(x) = &self.initial_guess {
            pop[0] = x.clone();
        }
        pop
    }

    /// Evaluate `xs[..n]`, in parallel if asked.
    fn eval_batch(&self, xs: &[Vec<f64>], parallel: bool) -> Vec<f64> {
        if parallel {
            xs.par_iter().map(|x| self.eval(x)).collect()
        } else {
            xs.iter().map(|x| self.eval(x)).collect()
        }
    }
}

/// Fold `v` back into `[lo, hi]` by mirror reflection at the bounds.
#[inline]
pub fn reflect(v: f64, lo: f64, hi: f64) -> f64 {
    if (lo..=hi).contains(&v) {
        return v;
    }
    if !v.is_finite() {
        return lo;
    }
    let w = hi - lo;
    let t = (v - lo).rem_euclid(2.0 * w);
    lo + if t <= w { t } else { 2.0 * w - t }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub generation: usize,
    pub evaluations: usize,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub generations: usize,
    pub seed: u64,
    /// Best-so-far after initialization (generation 0) and each generation.
    pub trace: Vec<TraceEntry>,
}

/// Mutation scheme of the DE family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `x_best + F (x_r1 − x_r2)`.
    Best1,
    /// `x_i + F (x_best − x_i) + F (x_r1 − x_r2)`.
    CurrentToBest1,
    /// `x_r1 + F (x_r2 − x_r3)`.
    Rand1,
}

impl Strategy {
    /// Strategies 1, 2, 3.
    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Strategy::Best1),
            2 => Ok(Strategy::CurrentToBest1),
            3 => Ok(Strategy::Rand1),
            _ => Err(Error::param(
                "strategy",
                format!("unknown strategy id {id}; expected 1, 2 or 3"),
            )),
        }
    }
}

pub fn default_population(dim: usize) -> usize {
    (5 * dim).max(20)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeConfig {
    /// Population size; `None` means `max(5·dim, 20)`.
    pub np: Option<usize>,
    pub f: f64,
    pub cr: f64,
    pub max_evals: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            np: None,
            f: 0.5,
            cr: 0.9,
            max_evals: 20_000,
            seed: 0,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JdeConfig {
    #[serde(flatten)]
    pub de: DeConfig,
    pub tau1: f64,
    pub tau2: f64,
    pub f_min: f64,
    pub f_max: f64,
}

impl Default for JdeConfig {
    fn default() -> Self {
        Self {
            de: DeConfig::default(),
            tau1: 0.1,
            tau2: 0.1,
            f_min: 0.1,
            f_max: 1.0,
        }
    }
}

/// One steppable DE/jDE population.
struct Population {
    x: Vec<Vec<f64>>,
    fx: Vec<f64>,
    f: Vec<f64>,
    cr: Vec<f64>,
    best: usize,
    evals: usize,
    budget: usize,
    generation: usize,
    rng: ChaCha8Rng,
}

impl Population {
    fn new<F: Fn(&[f64]) -> f64 + Sync>(
        p: &OptProblem<F>,
        np: usize,
        cfg: &JdeConfig,
        budget: usize,
        seed: u64,
    ) -> Result<Self> {
        if np < 4 {
            return Err(Error::param("np", format!("population must be at least 4, got {np}")));
        }
        if budget < np {
            return Err(Error::param(
                "max_evals",
                format!("budget {budget} is smaller than the population {np}"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = p.initial_population(np, &mut rng);
        let fx = p.eval_batch(&x, cfg.de.parallel);
        let best = argmin(&fx);
        Ok(Self {
            x,
            fx,
            f: vec![cfg.de.f; np],
            cr: vec![cfg.de.cr; np],
            best,
            evals: np,
            budget,
            generation: 0,
            rng,
        })
    }

    fn done(&self) -> bool {
        self.evals >= self.budget
    }

    /// Advance one generation. Returns false when the budget is spent.
    fn step<F: Fn(&[f64]) -> f64 + Sync>(&mut self, p: &OptProblem<F>, strategy: Strategy, cfg: &JdeConfig) -> bool {
        if self.done() {
            return false;
        }
        let np = self.x.len();
        let dim = p.dim();
        let best = self.best;
        let mut trials = Vec::with_capacity(np);
        let mut params = Vec::with_capacity(np);
        for i in 0..np {
            let rng = &mut self.rng;
            let mut fi = self.f[i];
            let mut cri = self.cr[i];
            if cfg.tau1 > 0.0 && rng.random::<f64>() < cfg.tau1 {
                fi = cfg.f_min + rng.random::<f64>() * (cfg.f_max - cfg.f_min);
            }
            if cfg.tau2 > 0.0 && rng.random::<f64>() < cfg.tau2 {
                cri = rng.random::<f64>();
            }
            let [r1, r2, r3] = distinct3(rng, np, i);
            let xi = &self.x[i];
            let mut v = vec![0.0; dim];
            for j in 0..dim {
                v[j] = match strategy {
                    Strategy::Rand1 => self.x[r1][j] + fi * (self.x[r2][j] - self.x[r3][j]),
                    Strategy::Best1 => self.x[best][j] + fi * (self.x[r1][j] - self.x[r2][j]),
                    Strategy::CurrentToBest1 => {
                        xi[j] + fi * (self.x[best][j] - xi[j]) + fi * (self.x[r1][j] - self.x[r2][j])
                    }
                };
            }
            let jrand = rng.random_range(0..dim);
            for j in 0..dim {
                let take = j == jrand || rng.random::<f64>() < cri;
                let u = if take { v[j] } else { xi[j] };
                v[j] = reflect(u, p.lower[j], p.upper[j]);
            }
            trials.push(v);
            params.push((fi, cri));
        }

        let n_eval = np.min(self.budget - self.evals);
        let ft = p.eval_batch(&trials[..n_eval], cfg.de.parallel);
        self.evals += n_eval;
        for (i, (trial, fv)) in trials.into_iter().zip(ft).enumerate() {
            if fv <= self.fx[i] {
                self.x[i] = trial;
                self.fx[i] = fv;
                self.f[i] = params[i].0;
                self.cr[i] = params[i].1;
                if fv < self.fx[self.best] {
                    self.best = i;
                }
            }
        }
        self.generation += 1;
        true
    }

    fn best_value(&self) -> f64 {
        self.fx[self.best]
    }

    fn worst(&self) -> usize {
        let mut w = 0;
        for i in 1..self.fx.len() {
            if self.fx[i] > self.fx[w] {
                w = i;
            }
        }
        w
    }

    fn entry(&self) -> TraceEntry {
        TraceEntry {
            generation: self.generation,
            evaluations: self.evals,
            best: self.best_value(),
        }
    }
}

fn argmin(v: &[f64]) -> usize {
    let mut b = 0;
    for i in 1..v.len() {
        if v[i] < v[b] {
            b = i;
        }
    }
    b
}

/// Three distinct indices in `0..n`, all different from `i`.
fn distinct3(rng: &mut ChaCha8Rng, n: usize, i: usize) -> [usize; 3] {
    let mut out = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let r = rng.random_range(0..n);
            if r != i && !out[..k].contains(&r) {
                out[k] = r;
                break;
            }
        }
    }
    out
}

fn run_population<F: Fn(&[f64]) -> f64 + Sync>(
    p: &OptProblem<F>,
    strategy: Strategy,
    cfg: &JdeConfig,
) -> Result<OptResult> {
    let np = cfg.de.np.unwrap_or_else(|| default_population(p.dim()));
    let mut pop = Population::new(p, np, cfg, cfg.de.max_evals, cfg.de.seed)?;
    let mut trace = vec![pop.entry()];
    while pop.step(p, strategy, cfg) {
        trace.push(pop.entry());
    }
    Ok(OptResult {
        best: pop.x[pop.best].clone(),
        value: pop.best_value(),
        evaluations: pop.evals,
        generations: pop.generation,
        seed: cfg.de.seed,
        trace,
    })
}

/// Classic DE/rand/1/bin with fixed `F` and `CR`.
pub fn de_minimize<F: Fn(&[f64]) -> f64 + Sync>(p: &OptProblem<F>, cfg: &DeConfig) -> Result<OptResult> {
    let jde = JdeConfig {
        de: cfg.clone(),
        tau1: 0.0,
        tau2: 0.0,
        ..JdeConfig::default()
    };
    run_population(p, Strategy::Rand1, &jde)
}

/// Self-adaptive DE: each individual carries its own `F` and `CR`, which
/// are resampled with probabilities `τ1`, `τ2` and kept when the trial
/// they produced survives.
pub fn jde_minimize<F: Fn(&[f64]) -> f64 + Sync>(
    p: &OptProblem<F>,
    strategy: Strategy,
    cfg: &JdeConfig,
) -> Result<OptResult> {
    run_population(p, strategy, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamdeConfig {
    /// Settings shared by every island; `np` is per island and
    /// `max_evals` is the total budget, split evenly.
    pub jde: JdeConfig,
    pub islands: usize,
    /// Generations between ring migrations; `None` disables migration.
    pub migration_interval: Option<usize>,
}

impl Default for SamdeConfig {
    fn default() -> Self {
        Self {
            jde: JdeConfig::default(),
            islands: 3,
            migration_interval: Some(10),
        }
    }
}

/// Seed of island `i` derived from the run seed.
pub fn island_seed(seed: u64, i: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Share of the total budget given to island `i`; the remainder goes to
/// the first islands.
pub fn island_budget(total: usize, islands: usize, i: usize) -> usize {
    total / islands + usize::from(i < total % islands)
}

/// Mutation strategy of island `i`: the three jDE strategies in turn.
pub fn island_strategy(i: usize) -> Strategy {
    [Strategy::Best1, Strategy::CurrentToBest1, Strategy::Rand1][i % 3]
}

/// Island-model jDE: independent populations on a ring exchange their
/// best member every `migration_interval` generations, replacing the
/// receiver's worst. Island `i` runs strategy `(i mod 3) + 1`.
pub fn samde_minimize<F: Fn(&[f64]) -> f64 + Sync>(p: &OptProblem<F>, cfg: &SamdeConfig) -> Result<OptResult> {
    if cfg.islands < 2 {
        return Err(Error::param("islands", "at least 2 islands are required"));
    }
    if cfg.migration_interval == Some(0) {
        return Err(Error::param("migration_interval", "must be at least 1"));
    }
    let np = cfg.jde.de.np.unwrap_or_else(|| default_population(p.dim()));
    let mut islands = (0..cfg.islands)
        .map(|i| {
            Population::new(
                p,
                np,
                &cfg.jde,
                island_budget(cfg.jde.de.max_evals, cfg.islands, i),
                island_seed(cfg.jde.de.seed, i),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = |isl: &[Population], generation: usize| {
        let k = argmin(&isl.iter().map(Population::best_value).collect::<Vec<_>>());
        TraceEntry {
            generation,
            evaluations: isl.iter().map(|s| s.evals).sum(),
            best: isl[k].best_value(),
        }
    };
    let mut trace = vec![summary(&islands, 0)];
    let mut generation = 0;
    loop {
        let mut any = false;
        for (i, isl) in islands.iter_mut().enumerate() {
            any |= isl.step(p, island_strategy(i), &cfg.jde);
        }
        if !any {
            break;
        }
        generation += 1;
        if let Some(every) = cfg.migration_interval {
            if generation % every == 0 {
                migrate(&mut islands);
            }
        }
        trace.push(summary(&islands, generation));
    }

    let k = argmin(&islands.iter().map(Population::best_value).collect::<Vec<_>>());
    let best = &islands[k];
    Ok(OptResult {
        best: best.x[best.best].clone(),
        value: best.best_value(),
        evaluations: islands.iter().map(|s| s.evals).sum(),
        generations: generation,
        seed: cfg.jde.de.seed,
        trace,
    })
}

fn migrate(islands: &mut [Population]) {
    let m = islands.len();
    let migrants: Vec<_> = islands
        .iter()
        .map(|s| (s.x[s.best].clone(), s.fx[s.best], s.f[s.best], s.cr[s.best]))
        .collect();
    for (i, (x, fx, f, cr)) in migrants.into_iter().enumerate() {
        let dst = &mut islands[(i + 1) % m];
        let w = dst.worst();
        if fx < dst.fx[w] {
            dst.x[w] = x;
            dst.fx[w] = fx;
            dst.f[w] = f;
            dst.cr[w] = cr;
            if fx < dst.fx[dst.best] {
                dst.best = w;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DepsoConfig {
    pub np: Option<usize>,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub f: f64,
    pub cr: f64,
    /// Velocity limit as a fraction of each bound range.
    pub max_velocity: f64,
    pub max_evals: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for DepsoConfig {
    fn default() -> Self {
        Self {
            np: None,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            f: 0.5,
            cr: 0.9,
            max_velocity: 0.2,
            max_evals: 20_000,
            seed: 0,
            parallel: false,
        }
    }
}

/// PSO and DE generations in alternation. Odd generations move the swarm;
/// even generations apply a DE step to the personal bests,
/// `pbest_i + F (pbest_r1 − pbest_r2)` with binomial crossover, keeping
/// trials that are no worse.
pub fn depso_minimize<F: Fn(&[f64]) -> f64 + Sync>(p: &OptProblem<F>, cfg: &DepsoConfig) -> Result<OptResult> {
    let np = cfg.np.unwrap_or_else(|| default_population(p.dim()));
    if np < 4 {
        return Err(Error::param("np", format!("population must be at least 4, got {np}")));
    }
    if cfg.max_evals < np {
        return Err(Error::param("max_evals", "budget is smaller than the population"));
    }
    let dim = p.dim();
    let vmax: Vec<f64> = (0..dim).map(|j| cfg.max_velocity * (p.upper[j] - p.lower[j])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = p.initial_population(np, &mut rng);
    let mut vel: Vec<Vec<f64>> = (0..np)
        .map(|_| (0..dim).map(|j| vmax[j] * (2.0 * rng.random::<f64>() - 1.0)).collect())
        .collect();
    let fx = p.eval_batch(&x, cfg.parallel);
    let mut pbest = x.clone();
    let mut pbest_f = fx;
    let mut g = argmin(&pbest_f);
    let mut evals = np;
    let mut generation = 0;
    let mut trace = vec![TraceEntry {
        generation,
        evaluations: evals,
        best: pbest_f[g],
    }];

    while evals < cfg.max_evals {
        generation += 1;
        let candidates: Vec<Vec<f64>> = if generation % 2 == 1 {
            for i in 0..np {
                for j in 0..dim {
                    let (r1, r2) = (rng.random::<f64>(), rng.random::<f64>());
                    let v = cfg.inertia * vel[i][j]
                        + cfg.cognitive * r1 * (pbest[i][j] - x[i][j])
                        + cfg.social * r2 * (pbest[g][j] - x[i][j]);
                    vel[i][j] = v.clamp(-vmax[j], vmax[j]);
                    x[i][j] = reflect(x[i][j] + vel[i][j], p.lower[j], p.upper[j]);
                }
            }
            x.clone()
        } else {
            (0..np)
                .map(|i| {
                    let [r1, r2, _] = distinct3(&mut rng, np, i);
                    let jrand = rng.random_range(0..dim);
                    (0..dim)
                        .map(|j| {
                            let take = j == jrand || rng.random::<f64>() < cfg.cr;
                            let u = if take {
                                pbest[i][j] + cfg.f * (pbest[r1][j] - pbest[r2][j])
                            } else {
                                pbest[i][j]
                            };
                            reflect(u, p.lower[j], p.upper[j])
                        })
                        .collect()
                })
                .collect()
        };

        let n_eval = np.min(cfg.max_evals - evals);
        let fc = p.eval_batch(&candidates[..n_eval], cfg.parallel);
        evals += n_eval;
        for (i, fv) in fc.into_iter().enumerate() {
            if fv <= pbest_f[i] {
                pbest[i] = candidates[i].clone();
                pbest_f[i] = fv;
                if fv < pbest_f[g] {
                    g = i;
                }
            }
        }
        trace.push(TraceEntry {
            generation,
            evaluations: evals,
            best: pbest_f[g],
        });
    }

    Ok(OptResult {
        best: pbest[g].clone(),
        value: pbest_f[g],
        evaluations: evals,
        generations: generation,
        seed: cfg.seed,
        trace,
    })
}

/// The six optimizer configurations offered for path control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    De,
    Jde1,
    Jde2,
    Jde3,
    Samde,
    Depso,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 6] = [
        OptimizerKind::De,
        OptimizerKind::Jde1,
        OptimizerKind::Jde2,
        OptimizerKind::Jde3,
        OptimizerKind::Samde,
        OptimizerKind::Depso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::De => "de",
            OptimizerKind::Jde1 => "jde1",
            OptimizerKind::Jde2 => "jde2",
            OptimizerKind::Jde3 => "jde3",
            OptimizerKind::Samde => "samde",
            OptimizerKind::Depso => "depso",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OptimizerKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            Error::param(
                "optimizer",
                format!("unknown optimizer `{s}`; expected de|jde1|jde2|jde3|samde|depso"),
            )
        })
    }
}

/// Optimizer choice with the knobs shared by all kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSpec {
    pub kind: OptimizerKind,
    /// Population size (per island for SAMDE); `None` uses the default.
    pub population: Option<usize>,
    /// Evaluation budget; `None` means `400·dim`.
    pub max_evals: Option<usize>,
    pub parallel: bool,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        Self {
            kind: OptimizerKind::Depso,
            population: None,
            max_evals: None,
            parallel: false,
        }
    }
}

impl OptimizerSpec {
    pub fn new(kind: OptimizerKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn budget(&self, dim: usize) -> usize {
        self.max_evals.unwrap_or(400 * dim)
    }

    /// Population size used for a problem of dimension `dim`.
    pub fn population_for(&self, dim: usize) -> usize {
        self.population.unwrap_or_else(|| match self.kind {
            OptimizerKind::Samde => default_population(dim).div_ceil(3).max(8),
            _ => default_population(dim),
        })
    }

    pub fn run<F: Fn(&[f64]) -> f64 + Sync>(&self, p: &OptProblem<F>, seed: u64) -> Result<OptResult> {
        let dim = p.dim();
        let np = self.population_for(dim);
        let max_evals = self.budget(dim).max(match self.kind {
            OptimizerKind::Samde => 3 * np,
            _ => np,
        });
        let de = DeConfig {
            np: Some(np),
            max_evals,
            seed,
            parallel: self.parallel,
            ..DeConfig::default()
        };
        let jde = JdeConfig {
            de: de.clone(),
            ..JdeConfig::default()
        };
        match self.kind {
            OptimizerKind::De => de_minimize(p, &de),
            OptimizerKind::Jde1 => jde_minimize(p, Strategy::Best1, &jde),
            OptimizerKind::Jde2 => jde_minimize(p, Strategy::CurrentToBest1, &jde),
            OptimizerKind::Jde3 => jde_minimize(p, Strategy::Rand1, &jde),
            OptimizerKind::Samde => samde_minimize(
                p,
                &SamdeConfig {
                    jde,
                    ..SamdeConfig::default()
                },
            ),
            OptimizerKind::Depso => depso_minimize(
                p,
                &DepsoConfig {
                    np: Some(np),
                    max_evals,
                    seed,
                    parallel: self.parallel,
                    ..DepsoConfig::default()
                },
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    fn sphere_problem() -> OptProblem<fn(&[f64]) -> f64> {
        OptProblem::new(&[(-5.0, 5.0); 10], sphere as fn(&[f64]) -> f64).unwrap()
    }

    fn check_trace(r: &OptResult, budget: usize) {
        assert!(r.evaluations <= budget);
        for w in r.trace.windows(2) {
            assert!(w[1].best <= w[0].best);
        }
        assert_eq!(r.trace.last().unwrap().best, r.value);
    }

    #[test]
    fn reflection() {
        assert_eq!(reflect(1.5, 0.0, 1.0), 0.5);
        assert_eq!(reflect(-0.25, 0.0, 1.0), 0.25);
        assert_eq!(reflect(2.5, 0.0, 1.0), 0.5);
        assert_eq!(reflect(0.3, 0.0, 1.0), 0.3);
        assert_eq!(reflect(-120.0, -100.0, 100.0), -80.0);
    }

    #[test]
    fn strategy_ids() {
        assert_eq!(Strategy::from_id(2).unwrap(), Strategy::CurrentToBest1);
        assert!(Strategy::from_id(4).is_err());
    }

    #[test]
    fn de_sphere() {
        let p = sphere_problem();
        let r = de_minimize(&p, &DeConfig::default()).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
        check_trace(&r, 20_000);
        assert_eq!(p.eval(&r.best), r.value);
        assert!(r.best.iter().all(|v| (-5.0..=5.0).contains(v)));
    }

    #[test]
    fn jde_sphere_all_strategies() {
        let p = sphere_problem();
        for id in 1..=3 {
            let cfg = JdeConfig {
                de: DeConfig::default(),
                ..JdeConfig::default()
            };
            let r = jde_minimize(&p, Strategy::from_id(id).unwrap(), &cfg).unwrap();
            assert!(r.value < 1e-6, "strategy {id}: {}", r.value);
            check_trace(&r, 20_000);
        }
    }

    #[test]
    fn jde_without_adaptation_is_de() {
        let p = sphere_problem();
        let de = DeConfig {
            np: Some(12),
            max_evals: 3000,
            seed: 5,
            ..DeConfig::default()
        };
        let jde = JdeConfig {
            de: de.clone(),
            tau1: 0.0,
            tau2: 0.0,
            ..JdeConfig::default()
        };
        assert_eq!(
            de_minimize(&p, &de).unwrap(),
            jde_minimize(&p, Strategy::Rand1, &jde).unwrap()
        );
    }

    #[test]
    fn samde_sphere_and_degenerate_cases() {
        let p = sphere_problem();
        let cfg = SamdeConfig {
            jde: JdeConfig {
                de: DeConfig {
                    np: Some(12),
                    max_evals: 20_000,
                    seed: 3,
                    ..DeConfig::default()
                },
                ..JdeConfig::default()
            },
            ..SamdeConfig::default()
        };
        let r = samde_minimize(&p, &cfg).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
        check_trace(&r, 20_000);

        let one = SamdeConfig {
            islands: 1,
            ..cfg.clone()
        };
        assert!(samde_minimize(&p, &one).is_err());

        // Without migration the result is the best of the independent runs.
        let iso = SamdeConfig {
            migration_interval: None,
            ..cfg.clone()
        };
        let joint = samde_minimize(&p, &iso).unwrap();
        let runs: Vec<OptResult> = (0..3)
            .map(|i| {
                let mut c = cfg.jde.clone();
                c.de.seed = island_seed(3, i);
                c.de.max_evals = island_budget(20_000, 3, i);
                jde_minimize(&p, island_strategy(i), &c).unwrap()
            })
            .collect();
        let best = runs.iter().min_by(|a, b| a.value.total_cmp(&b.value)).unwrap();
        assert_eq!(joint.value, best.value);
        assert_eq!(joint.best, best.best);
        assert_eq!(joint.evaluations, runs.iter().map(|r| r.evaluations).sum::<usize>());
    }

    #[test]
    fn depso_sphere_and_stationary() {
        let p = sphere_problem();
        let r = depso_minimize(&p, &DepsoConfig::default()).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
        check_trace(&r, 20_000);

        let frozen = DepsoConfig {
            np: Some(10),
            inertia: 0.0,
            cognitive: 0.0,
            social: 0.0,
            f: 0.0,
            max_evals: 500,
            ..DepsoConfig::default()
        };
        let r = depso_minimize(&p, &frozen).unwrap();
        assert_eq!(r.trace[0].best, r.value);
        assert!(r.trace.iter().all(|e| e.best == r.value));
    }

    #[test]
    fn constant_objective_and_budget() {
        let p = OptProblem::new(&[(0.0, 1.0); 3], |_x: &[f64]| 7.0).unwrap();
        for kind in OptimizerKind::ALL {
            let spec = OptimizerSpec {
                max_evals: Some(257),
                ..OptimizerSpec::new(kind)
            };
            let r = spec.run(&p, 1).unwrap();
            assert_eq!(r.value, 7.0);
            assert_eq!(r.evaluations, 257, "{kind}");
            assert!(r.best.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn determinism_and_parallel_equivalence() {
        let p = OptProblem::new(&[(-2.0, 2.0); 4], rosenbrock).unwrap();
        for kind in OptimizerKind::ALL {
            let a = OptimizerSpec {
                max_evals: Some(2000),
                ..OptimizerSpec::new(kind)
            };
            let b = OptimizerSpec {
                parallel: true,
                ..a.clone()
            };
            let ra = a.run(&p, 42).unwrap();
            assert_eq!(ra, a.run(&p, 42).unwrap());
            assert_eq!(ra, b.run(&p, 42).unwrap());
            assert_ne!(ra.trace, a.run(&p, 43).unwrap().trace);
        }
    }

    #[test]
    fn initial_guess_is_kept_when_optimal() {
        let p = OptProblem::new(&[(-100.0, 100.0); 5], sphere)
            .unwrap()
            .with_initial_guess(vec![0.0; 5])
            .unwrap();
        for kind in OptimizerKind::ALL {
            let r = OptimizerSpec::new(kind).run(&p, 9).unwrap();
            assert_eq!(r.value, 0.0, "{kind}");
        }
    }

    #[test]
    fn best1_beats_rand1_on_rosenbrock() {
        let p = OptProblem::new(&[(-2.048, 2.048); 5], rosenbrock).unwrap();
        let evals_to = |s: Strategy, seed: u64| {
            let cfg = JdeConfig {
                de: DeConfig {
                    np: Some(25),
                    max_evals: 60_000,
                    seed,
                    ..DeConfig::default()
                },
                ..JdeConfig::default()
            };
            let r = jde_minimize(&p, s, &cfg).unwrap();
            r.trace
                .iter()
                .find(|e| e.best < 1e-6)
                .map_or(usize::MAX, |e| e.evaluations)
        };
        let median = |s: Strategy| {
            let mut v: Vec<usize> = (0..20).map(|seed| evals_to(s, seed)).collect();
            v.sort_unstable();
            (v[9] + v[10]) / 2
        };
        let (b, r) = (median(Strategy::Best1), median(Strategy::Rand1));
        assert!(b < r, "best/1 {b} vs rand/1 {r}");
    }

    #[test]
    fn parse_kinds() {
        for k in OptimizerKind::ALL {
            assert_eq!(k.name().parse::<OptimizerKind>().unwrap(), k);
        }
        assert!("pso".parse::<OptimizerKind>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn candidates_respect_bounds(seed in 0u64..1000, kind in 0usize..6) {
            let bounds = [(-1.0, 3.0), (10.0, 10.5), (-7.0, -6.0)];
            let p = OptProblem::new(&bounds, |x: &[f64]| {
                assert!(bounds.iter().zip(x).all(|((lo, hi), v)| lo <= v && v <= hi));
                x.iter().map(|v| (v - 2.0).powi(2)).sum()
            }).unwrap();
            let spec = OptimizerSpec { max_evals: Some(600), ..OptimizerSpec::new(OptimizerKind::ALL[kind]) };
            let r = spec.run(&p, seed).unwrap();
            prop_assert!(r.evaluations <= 600);
            for w in r.trace.windows(2) {
                prop_assert!(w[1].best <= w[0].best);
            }
        }

        #[test]
        fn reflect_lands_in_bounds(v in -1e3..1e3f64, lo in -10.0..0.0f64, w in 0.1..10.0f64) {
            let r = reflect(v, lo, lo + w);
            prop_assert!(r >= lo && r <= lo + w);
        }
    }
}
