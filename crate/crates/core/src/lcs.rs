//! Genes, the two fusion rules, genetic operators and weight-based
//! selection with an active zone and an incubation zone.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridworld::Action;
use crate::predicates::{convolve_normalized, Predicate, PredicateRegistry, PredicateVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FusionError {
    #[error("no active gene can vote")]
    NoActiveGenes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionRule {
    /// Single weighted winner.
    Rule1,
    /// Weighted mean vote per action.
    Rule2,
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionRule::Rule1 => "rule1",
            FusionRule::Rule2 => "rule2",
        })
    }
}

impl FromStr for FusionRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule1" => Ok(FusionRule::Rule1),
            "rule2" => Ok(FusionRule::Rule2),
            _ => Err(format!("unknown fusion rule {s:?}")),
        }
    }
}

pub type GeneId = u64;

/// Condition-action pair. The condition is the normalized convolution of
/// `alpha` with the predicate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Gene {
    pub id: GeneId,
    alpha: Vec<f64>,
    l1: f64,
    pub action: Action,
    pub weight: f64,
    pub birth_step: u64,
    /// Seed genes survive culling.
    pub permanent: bool,
}

impl Gene {
    /// Returns `None` when `alpha` is all zeros (or not finite).
    pub fn new(id: GeneId, alpha: Vec<f64>, action: Action, weight: f64, birth_step: u64) -> Option<Self> {
        let l1: f64 = alpha.iter().map(|a| a.abs()).sum();
        if !(l1 > 0.0) || !l1.is_finite() {
            return None;
        }
        Some(Gene {
            id,
            alpha,
            l1,
            action,
            weight,
            birth_step,
            permanent: false,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn age(&self, now: u64) -> u64 {
        now.saturating_sub(self.birth_step)
    }
}

pub fn eval_condition(gene: &Gene, values: &PredicateVector) -> f64 {
    convolve_normalized(&gene.alpha, gene.l1, values.values())
}

/// Genetic-operator and zone parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LcsConfig {
    /// Population size that `select` refills to (seed genes included).
    pub capacity: usize,
    /// Active zone size N.
    pub active_size: usize,
    /// Steps a gene spends in incubation before it may become active.
    pub min_lifetime: u64,
    /// Cull threshold: genes with weight at or below `max(0, w_min)` die.
    pub w_min: f64,
    /// Standard deviation of fresh coefficients.
    pub init_spread: f64,
    /// Probability that a fresh coefficient is zeroed. Very sparse genes reach
    /// `c = 1` easily and out-vote the naive seeds into Forward deadlocks.
    pub init_sparsity: f64,
    /// Per-coordinate mutation probability.
    pub mutation_rate: f64,
    /// Standard deviation of mutation noise.
    pub mutation_scale: f64,
    /// Probability that mutation redraws the action.
    pub action_flip: f64,
    /// Fraction of refilled slots given to fresh random genes.
    pub fresh_fraction: f64,
    /// Initial weight of the permanent naive seed genes.
    pub seed_weight: f64,
    /// Rule-2 credit also reaches incubating genes that would have voted
    /// for the performed action; only active genes decide.
    pub credit_incubating: bool,
}

impl Default for LcsConfig {
    fn default() -> Self {
        LcsConfig {
            capacity: 200,
            active_size: 50,
            min_lifetime: 200,
            w_min: 0.05,
            init_spread: 1.0,
            init_sparsity: 0.3,
            mutation_rate: 0.1,
            mutation_scale: 0.3,
            action_flip: 0.05,
            fresh_fraction: 0.3,
            seed_weight: 1.0,
            credit_incubating: true,
        }
    }
}

/// Population with its active-zone bookkeeping. Ids are assigned in
/// insertion order; vector order is insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneSet {
    genes: Vec<Gene>,
    active: Vec<bool>,
    next_id: GeneId,
    dim: Option<usize>,
    pub active_size: usize,
    pub min_lifetime: u64,
    pub w_min: f64,
    pub credit_incubating: bool,
}

impl GeneSet {
    pub fn new(active_size: usize, min_lifetime: u64, w_min: f64) -> Self {
        GeneSet {
            genes: Vec::new(),
            active: Vec::new(),
            next_id: 0,
            dim: None,
            active_size: active_size.max(1),
            min_lifetime,
            w_min,
            credit_incubating: false,
        }
    }

    pub fn from_config(cfg: &LcsConfig) -> Self {
        GeneSet {
            credit_incubating: cfg.credit_incubating,
            ..Self::new(cfg.active_size, cfg.min_lifetime, cfg.w_min)
        }
    }

    /// Three permanent one-hot genes on the naive-action predicates: the
    /// naive policy expressed as genes.
    pub fn with_naive_seeds(cfg: &LcsConfig, registry: &PredicateRegistry) -> Option<Self> {
        let mut set = Self::from_config(cfg);
        for a in Action::ALL {
            let idx = registry.index_of(Predicate::NaiveAction(a))?;
            let mut alpha = vec![0.0; registry.len()];
            alpha[idx] = 1.0;
            let id = set.push(alpha, a, cfg.seed_weight, 0)?;
            set.get_mut(id).unwrap().permanent = true;
        }
        set.refresh_active(0);
        Some(set)
    }

    /// Adds a gene in incubation; returns its id, or `None` for a zero `alpha`.
    pub fn push(&mut self, alpha: Vec<f64>, action: Action, weight: f64, birth_step: u64) -> Option<GeneId> {
        let gene = Gene::new(self.next_id, alpha, action, weight, birth_step)?;
        debug_assert!(self.dim.is_none_or(|d| d == gene.alpha.len()));
        self.dim = Some(gene.alpha.len());
        self.next_id += 1;
        self.genes.push(gene);
        self.active.push(false);
        Some(self.next_id - 1)
    }

    /// Inserts a gene keeping its id (used by policy loading).
    pub fn insert(&mut self, gene: Gene, active: bool) {
        self.next_id = self.next_id.max(gene.id + 1);
        self.dim = Some(gene.alpha.len());
        self.genes.push(gene);
        self.active.push(active);
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn is_active(&self, index: usize) -> bool {
        self.active[index]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn get(&self, id: GeneId) -> Option<&Gene> {
        self.index_of(id).map(|i| &self.genes[i])
    }

    pub fn get_mut(&mut self, id: GeneId) -> Option<&mut Gene> {
        self.index_of(id).map(move |i| &mut self.genes[i])
    }

    pub fn index_of(&self, id: GeneId) -> Option<usize> {
        // ids increase with insertion order
        self.genes.binary_search_by_key(&id, |g| g.id).ok()
    }

    pub fn total_weight(&self) -> f64 {
        self.genes.iter().map(|g| g.weight).sum()
    }

    /// Marks as active every permanent gene plus the heaviest aged genes, up
    /// to `active_size` in total. Ties keep insertion order.
    pub fn refresh_active(&mut self, now: u64) {
        let mut slots = self.active_size;
        for (flag, g) in self.active.iter_mut().zip(&self.genes) {
            *flag = g.permanent;
        }
        slots = slots.saturating_sub(self.genes.iter().filter(|g| g.permanent).count());
        let mut eligible: Vec<usize> = (0..self.genes.len())
            .filter(|&i| {
                let g = &self.genes[i];
                !g.permanent && g.age(now) >= self.min_lifetime && g.weight > 0.0
            })
            .collect();
        eligible.sort_by(|&a, &b| self.genes[b].weight.total_cmp(&self.genes[a].weight).then(a.cmp(&b)));
        for &i in eligible.iter().take(slots) {
            self.active[i] = true;
        }
    }

    fn voters(&self) -> impl Iterator<Item = (usize, &Gene)> {
        self.genes
            .iter()
            .enumerate()
            .filter(move |(i, g)| self.active[*i] && g.weight > 0.0)
    }
}

/// Who receives credit for a decision.
#[derive(Debug, Clone, PartialEq)]
pub enum Credit {
    /// Rule 1: the single winning gene.
    Winner(GeneId),
    /// Rule 2: every gene that voted for the performed action with its
    /// condition value `c > 0`.
    Shared(Vec<(GeneId, f64)>),
    /// No gene decided (caller fell back to the naive policy).
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: Action,
    pub credit: Credit,
}

/// `argmax_g w(g) c(g)` over active genes; ties go to the smaller action,
/// then to the earlier gene.
pub fn fuse_rule1(set: &GeneSet, values: &PredicateVector) -> Result<Decision, FusionError> {
    let mut best: Option<(f64, Action, usize, GeneId)> = None;
    for (i, g) in set.voters() {
        let score = g.weight * eval_condition(g, values);
        let better = match best {
            None => true,
            Some((s, a, j, _)) => score > s || (score == s && (g.action, i) < (a, j)),
        };
        if better {
            best = Some((score, g.action, i, g.id));
        }
    }
    best.map(|(_, action, _, id)| Decision {
        action,
        credit: Credit::Winner(id),
    })
    .ok_or(FusionError::NoActiveGenes)
}

/// Per-action weighted mean of positive conditions over the active zone.
/// Falls back to [`fuse_rule1`] when no active gene has `c > 0`. The credit
/// lists the active voters for the chosen action, followed (with
/// `credit_incubating`) by the incubating genes that would have voted for it.
pub fn fuse_rule2(set: &GeneSet, values: &PredicateVector) -> Result<Decision, FusionError> {
    let mut num = [0.0f64; 3];
    let mut den = [0.0f64; 3];
    let mut votes: [Vec<(GeneId, f64)>; 3] = Default::default();
    for (_, g) in set.voters() {
        let c = eval_condition(g, values);
        if c > 0.0 {
            let a = g.action.index();
            num[a] += g.weight * c;
            den[a] += g.weight;
            votes[a].push((g.id, c));
        }
    }
    let mut best: Option<(f64, Action)> = None;
    for a in Action::ALL {
        let i = a.index();
        if den[i] > 0.0 {
            let score = num[i] / den[i];
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, a));
            }
        }
    }
    match best {
        Some((_, action)) => {
            let mut credit = std::mem::take(&mut votes[action.index()]);
            if set.credit_incubating {
                credit.extend(
                    set.genes
                        .iter()
                        .zip(&set.active)
                        .filter(|(g, &on)| !on && g.action == action && g.weight > 0.0)
                        .filter_map(|(g, _)| {
                            let c = eval_condition(g, values);
                            (c > 0.0).then_some((g.id, c))
                        }),
                );
            }
            Ok(Decision {
                action,
                credit: Credit::Shared(credit),
            })
        }
        None => fuse_rule1(set, values),
    }
}

pub fn fuse(rule: FusionRule, set: &GeneSet, values: &PredicateVector) -> Result<Decision, FusionError> {
    match rule {
        FusionRule::Rule1 => fuse_rule1(set, values),
        FusionRule::Rule2 => fuse_rule2(set, values),
    }
}

/// Per-action scores of rule 2 (`None` where no gene votes).
pub fn rule2_scores(set: &GeneSet, values: &PredicateVector) -> [Option<f64>; 3] {
    let mut num = [0.0f64; 3];
    let mut den = [0.0f64; 3];
    for (_, g) in set.voters() {
        let c = eval_condition(g, values);
        if c > 0.0 {
            num[g.action.index()] += g.weight * c;
            den[g.action.index()] += g.weight;
        }
    }
    [0, 1, 2].map(|i| (den[i] > 0.0).then(|| num[i] / den[i]))
}

fn random_action<R: Rng + ?Sized>(rng: &mut R) -> Action {
    Action::ALL[rng.random_range(0..3)]
}

fn sparse_alpha<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &LcsConfig) -> Vec<f64> {
    let normal = Normal::new(0.0, cfg.init_spread.max(f64::MIN_POSITIVE)).unwrap();
    let keep = (1.0 - cfg.init_sparsity).clamp(0.0, 1.0);
    loop {
        let alpha: Vec<f64> = (0..n)
            .map(|_| {
                let v = normal.sample(rng);
                if rng.random_bool(keep) {
                    v
                } else {
                    0.0
                }
            })
            .collect();
        if alpha.iter().any(|&a| a != 0.0) {
            return alpha;
        }
    }
}

/// Fresh gene: zero-centred normal coefficients, sparsified; uniform action;
/// weight 1. `id` is assigned when the gene enters a set.
pub fn random_gene<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &LcsConfig) -> Gene {
    assert!(n >= 1);
    let alpha = sparse_alpha(rng, n, cfg);
    let action = random_action(rng);
    Gene::new(0, alpha, action, 1.0, 0).unwrap()
}

/// Coefficient-wise Gaussian perturbation plus an occasional action redraw.
/// The weight resets to 1.
pub fn mutate<R: Rng + ?Sized>(gene: &Gene, rng: &mut R, cfg: &LcsConfig) -> Gene {
    let rate = cfg.mutation_rate.clamp(0.0, 1.0);
    let normal = Normal::new(0.0, cfg.mutation_scale.max(0.0)).unwrap();
    loop {
        let alpha: Vec<f64> = gene
            .alpha
            .iter()
            .map(|&a| {
                if rng.random_bool(rate) {
                    a + normal.sample(rng)
                } else {
                    a
                }
            })
            .collect();
        let action = if rng.random_bool(cfg.action_flip.clamp(0.0, 1.0)) {
            random_action(rng)
        } else {
            gene.action
        };
        if let Some(mut child) = Gene::new(gene.id, alpha, action, 1.0, gene.birth_step) {
            child.permanent = false;
            return child;
        }
    }
}

/// Uniform crossover; the action comes from a randomly chosen parent.
pub fn crossover<R: Rng + ?Sized>(g1: &Gene, g2: &Gene, rng: &mut R) -> Gene {
    assert_eq!(g1.alpha.len(), g2.alpha.len());
    loop {
        let alpha: Vec<f64> = g1
            .alpha
            .iter()
            .zip(&g2.alpha)
            .map(|(&a, &b)| if rng.random_bool(0.5) { a } else { b })
            .collect();
        let action = if rng.random_bool(0.5) { g1.action } else { g2.action };
        if let Some(child) = Gene::new(0, alpha, action, 1.0, 0) {
            return child;
        }
    }
}

/// Culls weak genes, refills to capacity with offspring and fresh genes,
/// then refreshes the active zone.
pub fn select<R: Rng + ?Sized>(set: &mut GeneSet, now: u64, rng: &mut R, cfg: &LcsConfig) {
    let threshold = set.w_min.max(0.0);
    let mut keep = Vec::with_capacity(set.genes.len());
    for (g, a) in set.genes.drain(..).zip(set.active.drain(..)) {
        if g.permanent || g.weight > threshold {
            keep.push((g, a));
        }
    }
    for (g, a) in keep {
        set.genes.push(g);
        set.active.push(a);
    }

    let n = match set.dim {
        Some(n) => n,
        None => {
            set.refresh_active(now);
            return;
        }
    };
    let deficit = cfg.capacity.saturating_sub(set.genes.len());
    let parents: Vec<(usize, f64)> = set
        .genes
        .iter()
        .enumerate()
        .filter(|(_, g)| g.weight > 0.0)
        .map(|(i, g)| (i, g.weight))
        .collect();
    let fresh = if parents.is_empty() {
        deficit
    } else {
        ((deficit as f64) * cfg.fresh_fraction.clamp(0.0, 1.0)).round() as usize
    };
    let mut born = Vec::with_capacity(deficit);
    for k in 0..deficit {
        let child = if k < deficit - fresh {
            let p1 = &set.genes[pick_weighted(&parents, rng)];
            let p2 = &set.genes[pick_weighted(&parents, rng)];
            mutate(&crossover(p1, p2, rng), rng, cfg)
        } else {
            random_gene(rng, n, cfg)
        };
        born.push(child);
    }
    for child in born {
        set.push(child.alpha, child.action, 1.0, now);
    }
    for g in set.genes.iter_mut().filter(|g| g.permanent) {
        if g.weight < threshold.max(f64::MIN_POSITIVE) {
            g.weight = threshold.max(f64::MIN_POSITIVE);
        }
    }
    set.refresh_active(now);
}

fn pick_weighted<R: Rng + ?Sized>(items: &[(usize, f64)], rng: &mut R) -> usize {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut x = rng.random_range(0.0..total);
    for &(i, w) in items {
        if x < w {
            return i;
        }
        x -= w;
    }
    items.last().unwrap().0
}

/// Draws `count` fresh genes into `set` at step `now`.
pub fn populate<R: Rng + ?Sized>(set: &mut GeneSet, count: usize, n: usize, now: u64, rng: &mut R, cfg: &LcsConfig) {
    for _ in 0..count {
        let g = random_gene(rng, n, cfg);
        set.push(g.alpha, g.action, 1.0, now);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Gene whose condition equals `c` on the one-element predicate vector `[1]`.
    fn set_with(specs: &[(f64, Action, f64)]) -> (GeneSet, PredicateVector) {
        // predicate vector [1, -1]; alpha = (1+c, 1-c)/2 gives condition c
        let mut set = GeneSet::new(100, 0, 0.05);
        for &(c, a, w) in specs {
            set.push(vec![(1.0 + c) / 2.0, (1.0 - c) / 2.0], a, w, 0).unwrap();
        }
        set.refresh_active(0);
        (set, PredicateVector(vec![1.0, -1.0]))
    }

    #[test]
    fn condition_is_projection() {
        let g = Gene::new(0, vec![1.0, 0.0, 0.0], Action::Forward, 1.0, 0).unwrap();
        assert_eq!(eval_condition(&g, &PredicateVector(vec![0.3, 0.9, -1.0])), 0.3);
        assert!(Gene::new(0, vec![0.0; 3], Action::Forward, 1.0, 0).is_none());
    }

    #[test]
    fn rule1_weighted_argmax() {
        let (set, v) = set_with(&[(0.5, Action::Forward, 2.0), (0.8, Action::TurnLeft, 1.0)]);
        let d = fuse_rule1(&set, &v).unwrap();
        assert_eq!(d.action, Action::Forward);
        assert_eq!(d.credit, Credit::Winner(0));

        let (set, v) = set_with(&[(0.2, Action::TurnRight, 1.0)]);
        assert_eq!(fuse_rule1(&set, &v).unwrap().action, Action::TurnRight);

        let (set, v) = set_with(&[(0.5, Action::TurnLeft, 1.0), (0.5, Action::Forward, 1.0)]);
        assert_eq!(fuse_rule1(&set, &v).unwrap().action, Action::Forward);
    }

    #[test]
    fn rule2_weighted_mean() {
        let (set, v) = set_with(&[
            (0.6, Action::Forward, 1.0),
            (0.2, Action::Forward, 3.0),
            (0.25, Action::TurnLeft, 1.0),
        ]);
        let scores = rule2_scores(&set, &v);
        assert!((scores[0].unwrap() - 0.3).abs() < 1e-12);
        assert!((scores[1].unwrap() - 0.25).abs() < 1e-12);
        let d = fuse_rule2(&set, &v).unwrap();
        assert_eq!(d.action, Action::Forward);
        match d.credit {
            Credit::Shared(c) => {
                assert_eq!(c.len(), 2);
                assert!((c[0].1 - 0.6).abs() < 1e-12 && (c[1].1 - 0.2).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rule2_indicator_and_ties() {
        let (set, v) = set_with(&[(-0.9, Action::Forward, 5.0), (0.3, Action::TurnRight, 1.0)]);
        assert_eq!(fuse_rule2(&set, &v).unwrap().action, Action::TurnRight);
        let (set, v) = set_with(&[(0.5, Action::TurnLeft, 1.0), (0.5, Action::Forward, 2.0)]);
        assert_eq!(fuse_rule2(&set, &v).unwrap().action, Action::Forward);
    }

    #[test]
    fn rule2_falls_back_to_rule1() {
        let (set, v) = set_with(&[(-0.9, Action::TurnLeft, 1.0), (-0.2, Action::TurnRight, 1.0)]);
        let d = fuse_rule2(&set, &v).unwrap();
        assert_eq!(d.action, Action::TurnRight);
        assert_eq!(d.credit, Credit::Winner(1));
        let empty = GeneSet::new(10, 0, 0.05);
        assert_eq!(fuse_rule2(&empty, &v), Err(FusionError::NoActiveGenes));
        assert_eq!(fuse_rule1(&empty, &v), Err(FusionError::NoActiveGenes));
    }

    #[test]
    fn operators_are_deterministic_and_valid() {
        let cfg = LcsConfig::default();
        let a = random_gene(&mut ChaCha8Rng::seed_from_u64(3), 20, &cfg);
        let b = random_gene(&mut ChaCha8Rng::seed_from_u64(3), 20, &cfg);
        assert_eq!(a, b);
        let m1 = mutate(&a, &mut ChaCha8Rng::seed_from_u64(4), &cfg);
        let m2 = mutate(&a, &mut ChaCha8Rng::seed_from_u64(4), &cfg);
        assert_eq!(m1, m2);
        let c1 = crossover(&a, &m1, &mut ChaCha8Rng::seed_from_u64(5));
        let c2 = crossover(&a, &m1, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(c1, c2);
        for (i, x) in c1.alpha().iter().enumerate() {
            assert!(*x == a.alpha()[i] || *x == m1.alpha()[i]);
        }
        let same = crossover(&a, &a, &mut ChaCha8Rng::seed_from_u64(6));
        assert_eq!(same.alpha(), a.alpha());
        assert_eq!(same.action, a.action);
    }

    #[test]
    fn mutation_identity_limit() {
        let cfg = LcsConfig {
            mutation_scale: 0.0,
            action_flip: 0.0,
            mutation_rate: 1.0,
            ..LcsConfig::default()
        };
        let mut g = Gene::new(7, vec![0.5, -0.25], Action::TurnLeft, 3.0, 0).unwrap();
        g.weight = 3.0;
        let m = mutate(&g, &mut ChaCha8Rng::seed_from_u64(1), &cfg);
        assert_eq!(m.alpha(), g.alpha());
        assert_eq!(m.action, g.action);
        assert_eq!(m.weight, 1.0);
    }

    #[test]
    fn incubation_blocks_young_genes() {
        let mut set = GeneSet::new(2, 10, 0.05);
        set.push(vec![1.0], Action::Forward, 1.0, 0).unwrap();
        let young = set.push(vec![1.0], Action::TurnLeft, 50.0, 5).unwrap();
        set.refresh_active(12);
        assert!(set.is_active(0));
        assert!(!set.is_active(set.index_of(young).unwrap()));
        set.refresh_active(15);
        assert!(set.is_active(1));
    }

    #[test]
    fn select_culls_and_refills() {
        let cfg = LcsConfig {
            capacity: 20,
            active_size: 5,
            min_lifetime: 0,
            ..LcsConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut set = GeneSet::from_config(&cfg);
        for i in 0..10 {
            set.push(vec![1.0, 0.5, 0.0], Action::Forward, if i < 5 { -1.0 } else { 2.0 }, 0);
        }
        select(&mut set, 1, &mut rng, &cfg);
        assert_eq!(set.len(), 20);
        assert!(set.genes().iter().all(|g| g.weight > 0.0));
        assert!(set.active_count() <= 5);
        assert!(set.active_count() >= 1);

        // all weights non-positive: everything is culled and refilled fresh
        let mut set = GeneSet::from_config(&cfg);
        for _ in 0..4 {
            set.push(vec![1.0, 0.0, 0.0], Action::TurnRight, 0.0, 0);
        }
        select(&mut set, 1, &mut rng, &cfg);
        assert_eq!(set.len(), 20);
        assert!(set.genes().iter().all(|g| g.birth_step == 1 && g.weight == 1.0));
    }
}
