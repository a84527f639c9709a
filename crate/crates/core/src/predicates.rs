//! Fuzzy predicate basis and the normalized convolution that turns a
//! coefficient vector into a gene condition.
//!
//! Every predicate maps a [`FullObservation`] into `[-1, 1]`: `-1` is false,
//! `1` true, `0` maximal uncertainty.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridworld::{Action, Dir, FullObservation, Pos, FREE, OCCUPIED, UNKNOWN};
use crate::pathfind::{naive_action, MapFields};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("registry configuration selects no predicates")]
    Empty,
    #[error("invalid registry configuration: {0}")]
    Invalid(String),
}

/// How the elementary vision predicates index cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum VisionMode {
    None,
    /// Robot-centred window `(2k+1)^2`, rotated so that "forward" is the
    /// robot's heading.
    Relative(u32),
    /// One predicate per absolute cell of a `W x H` grid.
    Absolute(u32, u32),
}

impl fmt::Display for VisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VisionMode::None => f.write_str("none"),
            VisionMode::Relative(k) => write!(f, "relative:{k}"),
            VisionMode::Absolute(w, h) => write!(f, "absolute:{w}x{h}"),
        }
    }
}

impl FromStr for VisionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad vision mode {s:?}");
        if s == "none" {
            return Ok(VisionMode::None);
        }
        if let Some(k) = s.strip_prefix("relative:") {
            return k.parse().map(VisionMode::Relative).map_err(|_| bad());
        }
        if let Some(wh) = s.strip_prefix("absolute:") {
            let (w, h) = wh.split_once('x').ok_or_else(bad)?;
            return Ok(VisionMode::Absolute(
                w.parse().map_err(|_| bad())?,
                h.parse().map_err(|_| bad())?,
            ));
        }
        Err(bad())
    }
}

impl TryFrom<String> for VisionMode {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<VisionMode> for String {
    fn from(v: VisionMode) -> String {
        v.to_string()
    }
}

/// Which predicate families a registry contains, and their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegistryConfig {
    pub vision: VisionMode,
    /// Anchor coordinates as fractions of W (or H); `0` and `1` are the grid
    /// edges.
    pub anchors: Vec<f64>,
    pub position: bool,
    pub goal: bool,
    pub direction: bool,
    pub distance: bool,
    pub naive: bool,
    pub predictive: bool,
    pub dead_end: bool,
    pub obstacles: bool,
    pub obstacle_range: f64,
}

impl Default for RegistryConfig {
    fn default() -> Self {
        RegistryConfig {
            vision: VisionMode::Relative(5),
            anchors: vec![0.0, 1.0],
            position: true,
            goal: true,
            direction: true,
            distance: true,
            naive: true,
            predictive: true,
            dead_end: true,
            obstacles: true,
            obstacle_range: 5.0,
        }
    }
}

impl RegistryConfig {
    /// No families selected; a starting point for builders.
    pub fn empty() -> Self {
        RegistryConfig {
            vision: VisionMode::None,
            anchors: vec![0.0, 1.0],
            position: false,
            goal: false,
            direction: false,
            distance: false,
            naive: false,
            predictive: false,
            dead_end: false,
            obstacles: false,
            obstacle_range: 5.0,
        }
    }

    /// Elementary predicates only, vision in absolute cells.
    pub fn elementary_absolute(width: u32, height: u32) -> Self {
        RegistryConfig {
            vision: VisionMode::Absolute(width, height),
            position: true,
            goal: true,
            direction: true,
            ..Self::empty()
        }
    }
}

fn flag(b: bool) -> u8 {
    b as u8
}

impl fmt::Display for RegistryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let anchors: Vec<String> = self.anchors.iter().map(|a| a.to_string()).collect();
        write!(
            f,
            "vision={} anchors={} position={} goal={} direction={} distance={} naive={} \
             predictive={} dead_end={} obstacles={} obstacle_range={}",
            self.vision,
            anchors.join(","),
            flag(self.position),
            flag(self.goal),
            flag(self.direction),
            flag(self.distance),
            flag(self.naive),
            flag(self.predictive),
            flag(self.dead_end),
            flag(self.obstacles),
            self.obstacle_range
        )
    }
}

impl FromStr for RegistryConfig {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = |m: String| RegistryError::Invalid(m);
        let mut cfg = RegistryConfig::empty();
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, got {token:?}")))?;
            let bool_of = |v: &str| match v {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(invalid(format!("{key}: expected 0 or 1"))),
            };
            match key {
                "vision" => cfg.vision = value.parse().map_err(invalid)?,
                "anchors" => {
                    cfg.anchors = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|a| a.parse::<f64>())
                            .collect::<Result<_, _>>()
                            .map_err(|_| invalid(format!("bad anchors {value:?}")))?
                    }
                }
                "position" => cfg.position = bool_of(value)?,
                "goal" => cfg.goal = bool_of(value)?,
                "direction" => cfg.direction = bool_of(value)?,
                "distance" => cfg.distance = bool_of(value)?,
                "naive" => cfg.naive = bool_of(value)?,
                "predictive" => cfg.predictive = bool_of(value)?,
                "dead_end" => cfg.dead_end = bool_of(value)?,
                "obstacles" => cfg.obstacles = bool_of(value)?,
                "obstacle_range" => {
                    cfg.obstacle_range = value
                        .parse()
                        .map_err(|_| invalid(format!("bad obstacle_range {value:?}")))?
                }
                other => return Err(invalid(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Ahead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predicate {
    /// Cell at `forward` steps along the heading and `lateral` steps to the
    /// right of the robot.
    VisionRelative {
        forward: i32,
        lateral: i32,
    },
    VisionAbsolute {
        x: i32,
        y: i32,
    },
    PositionX(f64),
    PositionY(f64),
    GoalX(f64),
    GoalY(f64),
    Direction(Dir),
    GoalDistance,
    NaiveAction(Action),
    PredictiveForward,
    DeadEnd,
    Obstacle(Side),
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::VisionRelative { forward, lateral } => write!(f, "v[{forward},{lateral}]"),
            Predicate::VisionAbsolute { x, y } => write!(f, "v@{x},{y}"),
            Predicate::PositionX(a) => write!(f, "px:{a}"),
            Predicate::PositionY(a) => write!(f, "py:{a}"),
            Predicate::GoalX(a) => write!(f, "gx:{a}"),
            Predicate::GoalY(a) => write!(f, "gy:{a}"),
            Predicate::Direction(d) => write!(f, "dir:{d:?}"),
            Predicate::GoalDistance => f.write_str("goal_distance"),
            Predicate::NaiveAction(a) => write!(f, "naive:{a}"),
            Predicate::PredictiveForward => f.write_str("predict_forward"),
            Predicate::DeadEnd => f.write_str("dead_end"),
            Predicate::Obstacle(s) => write!(f, "obstacle:{s:?}"),
        }
    }
}

/// Predicate values at one observation, in registry order.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateVector(pub Vec<f64>);

impl PredicateVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Per-observation data shared by the heuristic predicates.
pub struct ObservationContext<'a> {
    pub fields: &'a MapFields,
    /// Naive policy action at the observation; `None` if the goal is
    /// unreachable even optimistically.
    pub naive: Option<Action>,
}

impl<'a> ObservationContext<'a> {
    pub fn new(obs: &FullObservation, fields: &'a MapFields) -> Self {
        let naive = naive_action(&fields.optimistic, &obs.map, obs.robot).ok();
        ObservationContext { fields, naive }
    }
}

/// Ordered, immutable predicate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateRegistry {
    config: RegistryConfig,
    predicates: Vec<Predicate>,
}

pub fn build_registry(cfg: &RegistryConfig) -> Result<PredicateRegistry, RegistryError> {
    if cfg.anchors.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(RegistryError::Invalid("anchors must lie in [0, 1]".into()));
    }
    if cfg.obstacles && !(cfg.obstacle_range >= 1.0) {
        return Err(RegistryError::Invalid("obstacle_range must be >= 1".into()));
    }
    let mut p = Vec::new();
    match cfg.vision {
        VisionMode::None => {}
        VisionMode::Relative(k) => {
            let k = k as i32;
            for forward in -k..=k {
                for lateral in -k..=k {
                    p.push(Predicate::VisionRelative { forward, lateral });
                }
            }
        }
        VisionMode::Absolute(w, h) => {
            for y in 0..h as i32 {
                for x in 0..w as i32 {
                    p.push(Predicate::VisionAbsolute { x, y });
                }
            }
        }
    }
    if cfg.position {
        p.extend(cfg.anchors.iter().map(|&a| Predicate::PositionX(a)));
        p.extend(cfg.anchors.iter().map(|&a| Predicate::PositionY(a)));
    }
    if cfg.goal {
        p.extend(cfg.anchors.iter().map(|&a| Predicate::GoalX(a)));
        p.extend(cfg.anchors.iter().map(|&a| Predicate::GoalY(a)));
    }
    if cfg.direction {
        p.extend(Dir::ALL.map(Predicate::Direction));
    }
    if cfg.distance {
        p.push(Predicate::GoalDistance);
    }
    if cfg.naive {
        p.extend(Action::ALL.map(Predicate::NaiveAction));
    }
    if cfg.predictive {
        p.push(Predicate::PredictiveForward);
    }
    if cfg.dead_end {
        p.push(Predicate::DeadEnd);
    }
    if cfg.obstacles {
        p.extend([Side::Left, Side::Right, Side::Ahead].map(Predicate::Obstacle));
    }
    if p.is_empty() {
        return Err(RegistryError::Empty);
    }
    Ok(PredicateRegistry {
        config: cfg.clone(),
        predicates: p,
    })
}

impl PredicateRegistry {
    pub fn config(&self) -> &RegistryConfig {
        &self.config
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.predicates.iter().map(|p| p.to_string()).collect()
    }

    pub fn index_of(&self, predicate: Predicate) -> Option<usize> {
        self.predicates.iter().position(|&p| p == predicate)
    }

    /// Whether evaluation needs the pessimistic distance field.
    pub fn needs_pessimistic(&self) -> bool {
        self.config.predictive
    }

    pub fn evaluate(&self, obs: &FullObservation) -> PredicateVector {
        let fields = MapFields::compute(&obs.map, obs.goal, self.needs_pessimistic());
        self.evaluate_with(obs, &ObservationContext::new(obs, &fields))
    }

    pub fn evaluate_with(&self, obs: &FullObservation, ctx: &ObservationContext<'_>) -> PredicateVector {
        let w = obs.map.width() as f64;
        let h = obs.map.height() as f64;
        let robot = obs.robot;
        let right = robot.dir.turn_right().vector();
        let fwd = robot.dir.vector();
        let naive = ctx.naive.unwrap_or(Action::Forward);
        let mut dead_end = None;

        let values = self
            .predicates
            .iter()
            .map(|&pred| match pred {
                Predicate::VisionRelative { forward, lateral } => {
                    let p = robot
                        .pos
                        .offset(forward * fwd.0 + lateral * right.0, forward * fwd.1 + lateral * right.1);
                    obs.map.get(p) as f64
                }
                Predicate::VisionAbsolute { x, y } => obs.map.get(Pos::new(x, y)) as f64,
                Predicate::PositionX(a) => robot.pos.x as f64 / w - a,
                Predicate::PositionY(a) => robot.pos.y as f64 / h - a,
                Predicate::GoalX(a) => obs.goal.x as f64 / w - a,
                Predicate::GoalY(a) => obs.goal.y as f64 / h - a,
                Predicate::Direction(d) => robot.dir.dot(d) as f64,
                Predicate::GoalDistance => goal_distance(obs),
                Predicate::NaiveAction(a) => {
                    if a == naive {
                        1.0
                    } else {
                        -1.0
                    }
                }
                Predicate::PredictiveForward => predictive_forward(obs, ctx.fields),
                Predicate::DeadEnd => *dead_end.get_or_insert_with(|| dead_end_value(obs)),
                Predicate::Obstacle(side) => {
                    let dir = match side {
                        Side::Ahead => robot.dir,
                        Side::Left => robot.dir.turn_left(),
                        Side::Right => robot.dir.turn_right(),
                    };
                    obstacle_ray(obs, dir, self.config.obstacle_range)
                }
            })
            .collect();
        PredicateVector(values)
    }
}

/// `1 - 2 |p - g| / sqrt(W^2 + H^2)`.
fn goal_distance(obs: &FullObservation) -> f64 {
    let dx = (obs.robot.pos.x - obs.goal.x) as f64;
    let dy = (obs.robot.pos.y - obs.goal.y) as f64;
    let diag = ((obs.map.width() * obs.map.width() + obs.map.height() * obs.map.height()) as f64).sqrt();
    (1.0 - 2.0 * (dx * dx + dy * dy).sqrt() / diag).clamp(-1.0, 1.0)
}

/// `1` if Forward provably lengthens the true distance, `-1` if it provably
/// shortens it, else `0`. Proof comes from the optimistic/pessimistic bound
/// sandwich; an unknown or blocked cell ahead always yields `0` because the
/// robot might not move.
fn predictive_forward(obs: &FullObservation, fields: &MapFields) -> f64 {
    let Some(pessimistic) = fields.pessimistic.as_ref() else {
        return 0.0;
    };
    let s = obs.robot;
    let ahead = s.pos.step(s.dir);
    if !(ahead == obs.goal || obs.map.get(ahead) == FREE) {
        return 0.0;
    }
    let moved = crate::gridworld::RobotState::new(ahead, s.dir);
    let (Some(lo_before), hi_before) = (fields.optimistic.get(s), pessimistic.get(s)) else {
        return 0.0;
    };
    let lo_after = fields.optimistic.get(moved);
    let hi_after = pessimistic.get(moved);
    if let (Some(lo_a), Some(hi_b)) = (lo_after, hi_before) {
        if lo_a > hi_b {
            return 1.0;
        }
    }
    if let Some(hi_a) = hi_after {
        if hi_a < lo_before {
            return -1.0;
        }
    }
    0.0
}

/// Pocket detector: flood-fill known-free cells from the robot with the cell
/// behind it removed. `1` if the pocket holds neither the goal nor a frontier
/// cell, `-1` if it does, `0` if the cell behind is not known free.
fn dead_end_value(obs: &FullObservation) -> f64 {
    let map = &obs.map;
    let s = obs.robot;
    let (dx, dy) = s.dir.vector();
    let behind = s.pos.offset(-dx, -dy);
    if map.get(behind) != FREE {
        return 0.0;
    }
    let w = map.width();
    let mut seen = vec![false; w * map.height()];
    let idx = |p: Pos| p.y as usize * w + p.x as usize;
    seen[idx(behind)] = true;
    seen[idx(s.pos)] = true;
    let mut stack = vec![s.pos];
    while let Some(p) = stack.pop() {
        if p == obs.goal {
            return -1.0;
        }
        for d in Dir::ALL {
            let q = p.step(d);
            if !map.in_bounds(q) {
                continue;
            }
            match map.get(q) {
                UNKNOWN => return -1.0,
                FREE if !seen[idx(q)] => {
                    seen[idx(q)] = true;
                    stack.push(q);
                }
                _ => {}
            }
        }
    }
    1.0
}

/// Ray of length `range` from the robot; the grid boundary counts as an
/// obstacle.
fn obstacle_ray(obs: &FullObservation, dir: Dir, range: f64) -> f64 {
    let mut all_free = true;
    for k in 1..=range.floor() as i32 {
        let (dx, dy) = dir.vector();
        let p = obs.robot.pos.offset(k * dx, k * dy);
        if !obs.map.in_bounds(p) {
            return 1.0;
        }
        match obs.map.get(p) {
            OCCUPIED => return 1.0,
            FREE => {}
            _ => all_free = false,
        }
    }
    if all_free {
        -1.0
    } else {
        0.0
    }
}

/// `sum(alpha_i * b_i) / |alpha|_1`. Panics if `alpha` is all zeros.
pub fn convolve(alpha: &[f64], values: &PredicateVector) -> f64 {
    let l1: f64 = alpha.iter().map(|a| a.abs()).sum();
    assert!(l1 > 0.0, "condition coefficients must not all be zero");
    convolve_normalized(alpha, l1, values.values())
}

/// [`convolve`] with a precomputed L1 norm.
pub fn convolve_normalized(alpha: &[f64], l1: f64, values: &[f64]) -> f64 {
    debug_assert_eq!(alpha.len(), values.len());
    let dot: f64 = alpha.iter().zip(values).map(|(a, b)| a * b).sum();
    (dot / l1).clamp(-1.0, 1.0)
}
