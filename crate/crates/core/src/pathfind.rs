//! Turn-aware shortest paths over the `(position, direction)` state graph.
//!
//! Every command costs one step. Distances are computed backward from the
//! goal, so one breadth-first sweep answers the distance of every state; the
//! first action of a shortest path is the smallest action (in `Action`
//! order) whose successor is one step closer.

use thiserror::Error;

use crate::gridworld::{Action, Dir, FullObservation, GridDomain, ObservationMap, Pos, RobotState, FREE, UNKNOWN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("goal ({}, {}) unreachable even with unknown cells treated as free", .0.x, .0.y)]
    Unreachable(Pos),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownMode {
    AsFree,
    AsOccupied,
}

/// Read-only three-valued grid with a policy for unknown cells.
#[derive(Debug, Clone, Copy)]
pub struct GridView<'a> {
    width: usize,
    height: usize,
    cells: &'a [i8],
    mode: UnknownMode,
}

impl<'a> GridView<'a> {
    pub fn new(width: usize, height: usize, cells: &'a [i8], mode: UnknownMode) -> Self {
        assert_eq!(cells.len(), width * height);
        GridView {
            width,
            height,
            cells,
            mode,
        }
    }

    /// A domain has no unknown cells, so the mode is irrelevant.
    pub fn of_domain(domain: &'a GridDomain) -> Self {
        Self::new(domain.width(), domain.height(), domain.cells(), UnknownMode::AsFree)
    }

    pub fn of_map(map: &'a ObservationMap, mode: UnknownMode) -> Self {
        Self::new(map.width(), map.height(), map.cells(), mode)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    pub fn traversable(&self, p: Pos) -> bool {
        if !self.in_bounds(p) {
            return false;
        }
        match self.cells[p.y as usize * self.width + p.x as usize] {
            FREE => true,
            UNKNOWN => self.mode == UnknownMode::AsFree,
            _ => false,
        }
    }
}

/// Shortest-path length from every state to a goal cell. `None` = unreachable.
///
/// The goal cell itself is always treated as traversable: its location is
/// part of every observation and every admitted domain keeps it free.
#[derive(Debug, Clone)]
pub struct DistanceField {
    width: usize,
    height: usize,
    goal: Pos,
    dist: Vec<u32>,
}

const UNREACHED: u32 = u32::MAX;

impl DistanceField {
    pub fn compute(view: &GridView<'_>, goal: Pos) -> Self {
        let (w, h) = (view.width, view.height);
        let mut dist = vec![UNREACHED; w * h * 4];
        let mut queue = std::collections::VecDeque::with_capacity(w * h);
        if view.in_bounds(goal) {
            for d in Dir::ALL {
                dist[state_index(w, goal, d)] = 0;
                queue.push_back((goal, d));
            }
        }
        while let Some((p, d)) = queue.pop_front() {
            let next = dist[state_index(w, p, d)] + 1;
            // TurnLeft from d.turn_right() and TurnRight from d.turn_left() land on d.
            for pd in [d.turn_right(), d.turn_left()] {
                let i = state_index(w, p, pd);
                if dist[i] == UNREACHED {
                    dist[i] = next;
                    queue.push_back((p, pd));
                }
            }
            let (dx, dy) = d.vector();
            let q = p.offset(-dx, -dy);
            if view.traversable(q) {
                let i = state_index(w, q, d);
                if dist[i] == UNREACHED {
                    dist[i] = next;
                    queue.push_back((q, d));
                }
            }
        }
        DistanceField {
            width: w,
            height: h,
            goal,
            dist,
        }
    }

    pub fn goal(&self) -> Pos {
        self.goal
    }

    pub fn get(&self, s: RobotState) -> Option<u32> {
        if s.pos.x < 0 || s.pos.y < 0 || s.pos.x as usize >= self.width || s.pos.y as usize >= self.height {
            return None;
        }
        match self.dist[state_index(self.width, s.pos, s.dir)] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    /// First action of the tie-broken shortest path from `s`, if any.
    pub fn best_action(&self, view: &GridView<'_>, s: RobotState) -> Option<Action> {
        let here = self.get(s)?;
        if here == 0 {
            return None;
        }
        Action::ALL.into_iter().find(|&a| {
            let t = transition(view, self.goal, s, a);
            t != s && self.get(t).is_some_and(|d| d + 1 == here)
        })
    }
}

fn state_index(width: usize, p: Pos, d: Dir) -> usize {
    (p.y as usize * width + p.x as usize) * 4 + d.index()
}

/// Kinematics inside a view; the goal cell is always enterable.
pub fn transition(view: &GridView<'_>, goal: Pos, s: RobotState, a: Action) -> RobotState {
    match a {
        Action::TurnLeft => RobotState::new(s.pos, s.dir.turn_left()),
        Action::TurnRight => RobotState::new(s.pos, s.dir.turn_right()),
        Action::Forward => {
            let n = s.pos.step(s.dir);
            if n == goal || view.traversable(n) {
                RobotState::new(n, s.dir)
            } else {
                s
            }
        }
    }
}

/// Result of a single shortest-path query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathResult {
    /// Number of commands; `None` when the goal is unreachable.
    pub length: Option<u32>,
    /// Present iff `length > 0`.
    pub first_action: Option<Action>,
}

pub fn shortest_path(view: &GridView<'_>, from: RobotState, goal: Pos) -> PathResult {
    let field = DistanceField::compute(view, goal);
    query(&field, view, from)
}

pub fn query(field: &DistanceField, view: &GridView<'_>, from: RobotState) -> PathResult {
    let length = field.get(from);
    let first_action = match length {
        Some(0) | None => None,
        Some(_) => field.best_action(view, from),
    };
    PathResult { length, first_action }
}

/// Distance fields of an accumulated map under both unknown-cell readings.
#[derive(Debug, Clone)]
pub struct MapFields {
    pub optimistic: DistanceField,
    pub pessimistic: Option<DistanceField>,
}

impl MapFields {
    pub fn compute(map: &ObservationMap, goal: Pos, with_pessimistic: bool) -> Self {
        let optimistic = DistanceField::compute(&GridView::of_map(map, UnknownMode::AsFree), goal);
        let pessimistic =
            with_pessimistic.then(|| DistanceField::compute(&GridView::of_map(map, UnknownMode::AsOccupied), goal));
        MapFields {
            optimistic,
            pessimistic,
        }
    }
}

/// Replanning policy that follows the shortest path with unknown cells
/// treated as free. Returns `Forward` at the goal.
pub fn naive_policy(obs: &FullObservation) -> Result<Action, PathError> {
    let fields = MapFields::compute(&obs.map, obs.goal, false);
    naive_action(&fields.optimistic, &obs.map, obs.robot)
}

pub fn naive_action(optimistic: &DistanceField, map: &ObservationMap, robot: RobotState) -> Result<Action, PathError> {
    if robot.pos == optimistic.goal() {
        return Ok(Action::Forward);
    }
    let view = GridView::of_map(map, UnknownMode::AsFree);
    optimistic
        .best_action(&view, robot)
        .ok_or(PathError::Unreachable(optimistic.goal()))
}

/// `(lower, upper)` bounds on the true distance from `state` over every
/// completion of the unknown cells. `upper` may be unreachable (`None`).
pub fn distance_bounds(obs: &FullObservation, state: RobotState) -> (Option<u32>, Option<u32>) {
    let fields = MapFields::compute(&obs.map, obs.goal, true);
    (
        fields.optimistic.get(state),
        fields.pessimistic.as_ref().and_then(|f| f.get(state)),
    )
}
