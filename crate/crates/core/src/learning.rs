//! Potential-based rewards, weight updates, episode execution and the
//! generation training loop.
//!
//! Reward for a transition `s -> s'` is `beta * dC` with
//! `dC = (rho(s) - rho(s')) / rho(s0)`. The potentials differ only in which
//! map `rho` is measured on:
//!
//! * `Supervised`: the true domain.
//! * `Classical`: the accumulated map at decision time (unknown cells free).
//! * `Retrospective`: the accumulated map `M` steps later; evaluation of a
//!   step is held in a buffer until then (or until the episode ends).

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridworld::{
    step, Action, DomainEnsemble, FullObservation, GridDomain, ObservationMap, Pos, RobotState, VisionConfig,
};
use crate::lcs::{fuse, populate, select, Credit, FusionRule, GeneId, GeneSet, LcsConfig};
use crate::pathfind::{DistanceField, GridView, MapFields, PathError, UnknownMode};
use crate::predicates::{ObservationContext, PredicateRegistry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearningError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("registry lacks the naive-action predicates needed for seed genes")]
    NoSeedPredicates,
    #[error("gene dimension {genes} does not match registry size {registry}")]
    DimensionMismatch { genes: usize, registry: usize },
    #[error("domain {0}x{1} does not match ensemble")]
    Domain(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Potential {
    Supervised,
    Classical,
    Retrospective,
}

impl Potential {
    pub const ALL: [Potential; 3] = [Potential::Supervised, Potential::Classical, Potential::Retrospective];

    pub fn name(self) -> &'static str {
        match self {
            Potential::Supervised => "supervised",
            Potential::Classical => "classical",
            Potential::Retrospective => "retrospective",
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Potential {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "supervised" => Ok(Potential::Supervised),
            "classical" => Ok(Potential::Classical),
            "retrospective" => Ok(Potential::Retrospective),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningConfig {
    /// Learning-rate coefficient; reward is `beta * dC`.
    pub beta: f64,
    pub potential: Potential,
    /// Retrospective hold at generation 0, in steps.
    pub m_initial: usize,
    /// Hold increment applied after every generation.
    pub m_increment: usize,
    /// Episodes stop after `ceil(step_limit_factor * W * H)` commands.
    pub step_limit_factor: f64,
    pub fusion: FusionRule,
}

impl Default for LearningConfig {
    fn default() -> Self {
        LearningConfig {
            beta: 1.0,
            potential: Potential::Supervised,
            m_initial: 0,
            m_increment: 2,
            step_limit_factor: 2.0,
            fusion: FusionRule::Rule2,
        }
    }
}

pub fn step_limit(domain: &GridDomain, factor: f64) -> usize {
    (factor * (domain.width() * domain.height()) as f64).ceil().max(1.0) as usize
}

// ---------------------------------------------------------------------------
// Potentials

/// True shortest-path distance field of a domain.
pub fn true_field(domain: &GridDomain) -> DistanceField {
    DistanceField::compute(&GridView::of_domain(domain), domain.goal())
}

fn delta_from(field: &DistanceField, s: RobotState, s2: RobotState, s0: RobotState) -> Option<f64> {
    let (a, b, z) = (field.get(s)?, field.get(s2)?, field.get(s0)?);
    Some((a as f64 - b as f64) / z as f64)
}

/// `(rho(s) - rho(s')) / rho(s0)` on the fully known domain.
pub fn delta_c_supervised(domain: &GridDomain, s: RobotState, s2: RobotState, s0: RobotState) -> f64 {
    let field = true_field(domain);
    assert!(field.get(s0).is_some_and(|d| d > 0), "rho(s0) must be positive");
    delta_from(&field, s, s2, s0).expect("admitted domains reach the goal from every visited state")
}

/// Same as [`delta_c_supervised`] with distances on the accumulated map,
/// unknown cells free. Returns `None` when some distance is unreachable
/// (the map is inconsistent with a solvable domain).
pub fn delta_c_estimated(
    map: &ObservationMap,
    goal: Pos,
    s: RobotState,
    s2: RobotState,
    s0: RobotState,
) -> Option<f64> {
    let field = DistanceField::compute(&GridView::of_map(map, UnknownMode::AsFree), goal);
    delta_from(&field, s, s2, s0)
}

/// One transition awaiting evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingEvaluation {
    /// Episode-local step index.
    pub step: usize,
    pub before: RobotState,
    pub after: RobotState,
    pub credit: Credit,
}

/// FIFO of transitions held for `hold` steps.
#[derive(Debug, Clone, Default)]
pub struct RetrospectiveBuffer {
    hold: usize,
    entries: VecDeque<PendingEvaluation>,
}

/// A flushed evaluation: `delta_c` is `None` for inconsistent maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Flushed {
    pub entry: PendingEvaluation,
    pub delta_c: Option<f64>,
}

impl RetrospectiveBuffer {
    pub fn new(hold: usize) -> Self {
        RetrospectiveBuffer {
            hold,
            entries: VecDeque::new(),
        }
    }

    pub fn hold(&self) -> usize {
        self.hold
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn schedule(&mut self, entry: PendingEvaluation) {
        debug_assert!(self.entries.back().is_none_or(|e| e.step < entry.step));
        self.entries.push_back(entry);
    }

    /// Evaluates, in order, every entry due at `now` (all of them when
    /// `at_end`) against `field`, the optimistic distance field of the
    /// current accumulated map.
    pub fn flush(&mut self, field: &DistanceField, s0: RobotState, now: usize, at_end: bool) -> Vec<Flushed> {
        let mut out = Vec::new();
        while let Some(e) = self.entries.front() {
            if !at_end && e.step + self.hold > now {
                break;
            }
            let entry = self.entries.pop_front().unwrap();
            let delta_c = delta_from(field, entry.before, entry.after, s0);
            out.push(Flushed { entry, delta_c });
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Weight updates

/// `w(winner) += beta * dC`. Returns the total weight change.
pub fn apply_reward_rule1(genes: &mut GeneSet, winner: GeneId, delta_c: f64, beta: f64) -> f64 {
    match genes.get_mut(winner) {
        Some(g) => {
            g.weight += beta * delta_c;
            beta * delta_c
        }
        None => 0.0,
    }
}

/// Shares `beta * dC` among the voters of the performed action in
/// proportion to their condition values. Returns the total weight change.
pub fn apply_reward_rule2(genes: &mut GeneSet, contributions: &[(GeneId, f64)], delta_c: f64, beta: f64) -> f64 {
    let z: f64 = contributions.iter().map(|(_, c)| c).sum();
    if !(z > 0.0) {
        return 0.0;
    }
    let r = beta * delta_c;
    let mut total = 0.0;
    for &(id, c) in contributions {
        if let Some(g) = genes.get_mut(id) {
            let dw = r / z * c;
            g.weight += dw;
            total += dw;
        }
    }
    total
}

fn apply_credit(genes: &mut GeneSet, credit: &Credit, delta_c: f64, beta: f64) -> f64 {
    match credit {
        Credit::Winner(id) => apply_reward_rule1(genes, *id, delta_c, beta),
        Credit::Shared(c) => apply_reward_rule2(genes, c, delta_c, beta),
        Credit::None => 0.0,
    }
}

// ---------------------------------------------------------------------------
// Episodes

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub before: RobotState,
    pub action: Action,
    pub after: RobotState,
    /// Potential change once evaluated (learning episodes only).
    pub delta_c: Option<f64>,
    /// Total weight change caused by this step's evaluation.
    pub credited: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub commands: Vec<Action>,
    pub reached: bool,
    /// `|p| / |p*|` when reached, else `step_limit / |p*|`.
    pub cost: f64,
    pub optimal_length: u32,
    pub final_state: RobotState,
    /// Set when an estimated distance was unreachable during learning.
    pub inconsistent: bool,
    pub trace: Option<Vec<StepRecord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOptions {
    pub learn: bool,
    /// Retrospective hold used by this episode.
    pub hold: usize,
    /// Global step counter at episode start (gene ages are measured on it).
    pub clock: u64,
    pub record_trace: bool,
    /// Start with the whole domain already revealed.
    pub prerevealed: bool,
}

impl EpisodeOptions {
    pub fn evaluation() -> Self {
        EpisodeOptions {
            learn: false,
            hold: 0,
            clock: 0,
            record_trace: false,
            prerevealed: false,
        }
    }

    pub fn learning(hold: usize, clock: u64) -> Self {
        EpisodeOptions {
            learn: true,
            hold,
            clock,
            ..Self::evaluation()
        }
    }
}

/// Runs one episode from the domain's start. With `opts.learn` the gene
/// weights are updated in place and the active zone is refreshed after
/// every step; otherwise `genes` is not modified.
pub fn run_episode(
    domain: &GridDomain,
    genes: &mut GeneSet,
    registry: &PredicateRegistry,
    vision: &VisionConfig,
    cfg: &LearningConfig,
    opts: &EpisodeOptions,
) -> Result<EpisodeResult, LearningError> {
    if genes.genes().first().is_some_and(|g| g.alpha().len() != registry.len()) {
        return Err(LearningError::DimensionMismatch {
            genes: genes.genes()[0].alpha().len(),
            registry: registry.len(),
        });
    }
    let truth = true_field(domain);
    let s0 = domain.start();
    let goal = domain.goal();
    let optimal = truth.get(s0).ok_or(PathError::Unreachable(goal))?;
    let limit = step_limit(domain, cfg.step_limit_factor);
    let hold = match cfg.potential {
        Potential::Retrospective => opts.hold,
        _ => 0,
    };

    let mut map = if opts.prerevealed {
        ObservationMap::revealed(domain)
    } else {
        ObservationMap::unknown(domain.width(), domain.height())
    };
    map.observe(domain, s0.pos, vision);
    let mut obs = FullObservation::new(s0, map, goal);
    let with_pessimistic = registry.needs_pessimistic();
    let mut fields = MapFields::compute(&obs.map, goal, with_pessimistic);

    let mut buffer = RetrospectiveBuffer::new(hold);
    let mut commands = Vec::new();
    let mut trace: Vec<StepRecord> = Vec::new();
    let mut inconsistent = false;
    let mut t = 0usize;

    let settle = |flushed: Vec<Flushed>, genes: &mut GeneSet, trace: &mut Vec<StepRecord>, inconsistent: &mut bool| {
        for f in flushed {
            let dc = f.delta_c.unwrap_or_else(|| {
                *inconsistent = true;
                0.0
            });
            let credited = apply_credit(genes, &f.entry.credit, dc, cfg.beta);
            if let Some(rec) = trace.get_mut(f.entry.step) {
                rec.delta_c = Some(dc);
                rec.credited = credited;
            }
        }
    };

    let reached = loop {
        if opts.learn && cfg.potential != Potential::Supervised {
            let due = buffer.flush(&fields.optimistic, s0, t, false);
            settle(due, genes, &mut trace, &mut inconsistent);
        }
        if obs.robot.pos == goal {
            break true;
        }
        if t >= limit {
            break false;
        }
        let now = opts.clock + t as u64;
        if opts.learn {
            genes.refresh_active(now);
        }

        let ctx = ObservationContext::new(&obs, &fields);
        let naive = ctx.naive.ok_or(PathError::Unreachable(goal))?;
        let values = registry.evaluate_with(&obs, &ctx);
        let decision = match fuse(cfg.fusion, genes, &values) {
            Ok(d) => d,
            Err(_) => crate::lcs::Decision {
                action: naive,
                credit: Credit::None,
            },
        };
        let before = obs.robot;
        let after = step(domain, before, decision.action);
        commands.push(decision.action);
        if opts.record_trace || opts.learn {
            trace.push(StepRecord {
                before,
                action: decision.action,
                after,
                delta_c: None,
                credited: 0.0,
            });
        }

        if opts.learn {
            let entry = PendingEvaluation {
                step: t,
                before,
                after,
                credit: decision.credit,
            };
            if cfg.potential == Potential::Supervised {
                let dc = delta_from(&truth, before, after, s0).expect("true distances are finite");
                settle(
                    vec![Flushed {
                        entry,
                        delta_c: Some(dc),
                    }],
                    genes,
                    &mut trace,
                    &mut inconsistent,
                );
            } else {
                buffer.schedule(entry);
                let due = buffer.flush(&fields.optimistic, s0, t, false);
                settle(due, genes, &mut trace, &mut inconsistent);
            }
        }

        obs.robot = after;
        if obs.map.observe(domain, after.pos, vision) > 0 {
            fields = MapFields::compute(&obs.map, goal, with_pessimistic);
        }
        t += 1;
    };

    if opts.learn && cfg.potential != Potential::Supervised {
        let rest = buffer.flush(&fields.optimistic, s0, t, true);
        settle(rest, genes, &mut trace, &mut inconsistent);
    }

    let cost = if reached {
        commands.len() as f64 / optimal as f64
    } else {
        limit as f64 / optimal as f64
    };
    Ok(EpisodeResult {
        commands,
        reached,
        cost,
        optimal_length: optimal,
        final_state: obs.robot,
        inconsistent,
        trace: (opts.record_trace).then_some(trace),
    })
}

/// Replays the naive policy alone (no genes involved).
pub fn run_naive_episode(
    domain: &GridDomain,
    vision: &VisionConfig,
    step_limit_factor: f64,
) -> Result<EpisodeResult, LearningError> {
    let s0 = domain.start();
    let goal = domain.goal();
    let optimal = true_field(domain).get(s0).ok_or(PathError::Unreachable(goal))?;
    let limit = step_limit(domain, step_limit_factor);
    let mut map = ObservationMap::unknown(domain.width(), domain.height());
    map.observe(domain, s0.pos, vision);
    let mut obs = FullObservation::new(s0, map, goal);
    let mut fields = MapFields::compute(&obs.map, goal, false);
    let mut commands = Vec::new();
    let reached = loop {
        if obs.robot.pos == goal {
            break true;
        }
        if commands.len() >= limit {
            break false;
        }
        let a = crate::pathfind::naive_action(&fields.optimistic, &obs.map, obs.robot)?;
        commands.push(a);
        obs.robot = step(domain, obs.robot, a);
        if obs.map.observe(domain, obs.robot.pos, vision) > 0 {
            fields = MapFields::compute(&obs.map, goal, false);
        }
    };
    let cost = if reached {
        commands.len() as f64 / optimal as f64
    } else {
        limit as f64 / optimal as f64
    };
    Ok(EpisodeResult {
        commands,
        reached,
        cost,
        optimal_length: optimal,
        final_state: obs.robot,
        inconsistent: false,
        trace: None,
    })
}

// ---------------------------------------------------------------------------
// Reports and the training loop

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    /// Prior-weighted mean cost.
    pub mean: f64,
    /// `(domain index, cost)` in domain order.
    pub per_domain: Vec<(usize, f64)>,
    /// Prior-weighted standard deviation.
    pub stddev: f64,
    pub failures: usize,
}

impl CostReport {
    pub fn from_costs(costs: &[f64], weights: &[f64], failures: usize) -> Self {
        let mean: f64 = costs.iter().zip(weights).map(|(c, w)| c * w).sum();
        let var: f64 = costs
            .iter()
            .zip(weights)
            .map(|(c, w)| w * (c - mean) * (c - mean))
            .sum();
        CostReport {
            mean,
            per_domain: costs.iter().copied().enumerate().collect(),
            stddev: var.sqrt(),
            failures,
        }
    }
}

/// Learning-free evaluation of a gene set over an ensemble. Episodes run in
/// parallel; results are combined in domain order.
pub fn evaluate_policy(
    ensemble: &DomainEnsemble,
    genes: &GeneSet,
    registry: &PredicateRegistry,
    vision: &VisionConfig,
    cfg: &LearningConfig,
) -> Result<CostReport, LearningError> {
    let results: Vec<EpisodeResult> = ensemble
        .domains()
        .par_iter()
        .map(|d| {
            let mut local = genes.clone();
            run_episode(d, &mut local, registry, vision, cfg, &EpisodeOptions::evaluation())
        })
        .collect::<Result<_, _>>()?;
    let costs: Vec<f64> = results.iter().map(|r| r.cost).collect();
    let failures = results.iter().filter(|r| !r.reached).count();
    Ok(CostReport::from_costs(&costs, ensemble.weights(), failures))
}

/// Naive-policy cost over an ensemble.
pub fn evaluate_naive(
    ensemble: &DomainEnsemble,
    vision: &VisionConfig,
    step_limit_factor: f64,
) -> Result<CostReport, LearningError> {
    let results: Vec<EpisodeResult> = ensemble
        .domains()
        .par_iter()
        .map(|d| run_naive_episode(d, vision, step_limit_factor))
        .collect::<Result<_, _>>()?;
    let costs: Vec<f64> = results.iter().map(|r| r.cost).collect();
    let failures = results.iter().filter(|r| !r.reached).count();
    Ok(CostReport::from_costs(&costs, ensemble.weights(), failures))
}

/// Owns the evolving gene set and every source of randomness of a run.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub genes: GeneSet,
    registry: PredicateRegistry,
    vision: VisionConfig,
    learning: LearningConfig,
    lcs: LcsConfig,
    rng: ChaCha8Rng,
    clock: u64,
    hold: usize,
    generation: usize,
}

impl Trainer {
    /// Seed genes plus `capacity - 3` fresh genes in incubation.
    pub fn new(
        registry: PredicateRegistry,
        vision: VisionConfig,
        learning: LearningConfig,
        lcs: LcsConfig,
        seed: u64,
    ) -> Result<Self, LearningError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut genes = GeneSet::with_naive_seeds(&lcs, &registry).ok_or(LearningError::NoSeedPredicates)?;
        let fresh = lcs.capacity.saturating_sub(genes.len());
        populate(&mut genes, fresh, registry.len(), 0, &mut rng, &lcs);
        genes.refresh_active(0);
        Ok(Self::with_genes(genes, registry, vision, learning, lcs, rng))
    }

    /// Resumes from an existing gene set.
    pub fn with_genes(
        genes: GeneSet,
        registry: PredicateRegistry,
        vision: VisionConfig,
        learning: LearningConfig,
        lcs: LcsConfig,
        rng: ChaCha8Rng,
    ) -> Self {
        let hold = learning.m_initial;
        Trainer {
            genes,
            registry,
            vision,
            learning,
            lcs,
            rng,
            clock: 0,
            hold,
            generation: 0,
        }
    }

    pub fn registry(&self) -> &PredicateRegistry {
        &self.registry
    }

    pub fn vision(&self) -> &VisionConfig {
        &self.vision
    }

    pub fn learning(&self) -> &LearningConfig {
        &self.learning
    }

    pub fn lcs(&self) -> &LcsConfig {
        &self.lcs
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Retrospective hold of the next generation.
    pub fn hold(&self) -> usize {
        match self.learning.potential {
            Potential::Retrospective => self.hold,
            _ => 0,
        }
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// One learning episode; advances the step clock.
    pub fn train_episode(&mut self, domain: &GridDomain, record_trace: bool) -> Result<EpisodeResult, LearningError> {
        let mut opts = EpisodeOptions::learning(self.hold(), self.clock);
        opts.record_trace = record_trace;
        let result = run_episode(
            domain,
            &mut self.genes,
            &self.registry,
            &self.vision,
            &self.learning,
            &opts,
        )?;
        self.clock += result.commands.len() as u64;
        Ok(result)
    }

    /// Every domain once in shuffled order, selection after each episode,
    /// then the hold schedule advances.
    pub fn run_generation(&mut self, ensemble: &DomainEnsemble) -> Result<CostReport, LearningError> {
        let mut order: Vec<usize> = (0..ensemble.len()).collect();
        order.shuffle(&mut self.rng);
        let mut costs = vec![0.0; ensemble.len()];
        let mut failures = 0;
        for i in order {
            let r = self.train_episode(&ensemble.domains()[i], false)?;
            costs[i] = r.cost;
            failures += usize::from(!r.reached);
            select(&mut self.genes, self.clock, &mut self.rng, &self.lcs);
        }
        if self.learning.potential == Potential::Retrospective {
            self.hold += self.learning.m_increment;
        }
        self.generation += 1;
        Ok(CostReport::from_costs(&costs, ensemble.weights(), failures))
    }

    pub fn evaluate(&self, ensemble: &DomainEnsemble) -> Result<CostReport, LearningError> {
        evaluate_policy(ensemble, &self.genes, &self.registry, &self.vision, &self.learning)
    }
}
