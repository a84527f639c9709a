//! Static cellular environments, robot kinematics and radius-limited vision.
//!
//! Coordinates: `x` grows to the right, `y` grows downward (row index in the
//! map text format). Cell knowledge is three-valued and stored as `i8`:
//! [`FREE`] (-1), [`UNKNOWN`] (0) and [`OCCUPIED`] (1).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pathfind::{shortest_path, GridView};

pub const FREE: i8 = -1;
pub const UNKNOWN: i8 = 0;
pub const OCCUPIED: i8 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("line {line}: expected header \"W H\"")]
    BadHeader { line: usize },
    #[error("line {line}, column {col}: unexpected character {ch:?}")]
    BadChar { line: usize, col: usize, ch: char },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowLength { line: usize, expected: usize, found: usize },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("missing start marker 'S'")]
    MissingStart,
    #[error("line {line}, column {col}: duplicate start marker 'S'")]
    DuplicateStart { line: usize, col: usize },
    #[error("missing goal marker 'G'")]
    MissingGoal,
    #[error("line {line}, column {col}: duplicate goal marker 'G'")]
    DuplicateGoal { line: usize, col: usize },
    #[error("grid dimensions must be positive")]
    EmptyGrid,
    #[error("start and goal must be distinct free cells")]
    BadEndpoints,
    #[error("goal is unreachable from start")]
    Unsolvable,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("observation contradicts map at ({x}, {y})")]
    Contradiction { x: i32, y: i32 },
    #[error("office generator: {0}")]
    Generator(String),
    #[error("vision radius must be >= 1, got {0}")]
    BadRadius(f64),
    #[error("ensemble: {0}")]
    Ensemble(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Self {
        Pos { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Pos::new(self.x + dx, self.y + dy)
    }

    pub fn step(self, dir: Dir) -> Self {
        let (dx, dy) = dir.vector();
        self.offset(dx, dy)
    }
}

/// One of the four unit axis steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    East,
    South,
    West,
    North,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::South, Dir::West, Dir::North];

    pub fn vector(self) -> (i32, i32) {
        match self {
            Dir::East => (1, 0),
            Dir::South => (0, 1),
            Dir::West => (-1, 0),
            Dir::North => (0, -1),
        }
    }

    pub fn from_vector(dx: i32, dy: i32) -> Option<Dir> {
        match (dx, dy) {
            (1, 0) => Some(Dir::East),
            (0, 1) => Some(Dir::South),
            (-1, 0) => Some(Dir::West),
            (0, -1) => Some(Dir::North),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Counter-clockwise on screen (y down): East -> North.
    pub fn turn_left(self) -> Dir {
        let (dx, dy) = self.vector();
        Dir::from_vector(dy, -dx).unwrap()
    }

    /// Clockwise on screen (y down): East -> South.
    pub fn turn_right(self) -> Dir {
        let (dx, dy) = self.vector();
        Dir::from_vector(-dy, dx).unwrap()
    }

    pub fn dot(self, other: Dir) -> i32 {
        let (a, b) = self.vector();
        let (c, d) = other.vector();
        a * c + b * d
    }
}

/// Robot command. The derived order `Forward < TurnLeft < TurnRight` is
/// used for every tie-break in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Forward,
    TurnLeft,
    TurnRight,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Forward, Action::TurnLeft, Action::TurnRight];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Forward => "Forward",
            Action::TurnLeft => "TurnLeft",
            Action::TurnRight => "TurnRight",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Forward" => Ok(Action::Forward),
            "TurnLeft" => Ok(Action::TurnLeft),
            "TurnRight" => Ok(Action::TurnRight),
            other => Err(format!("unknown action {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RobotState {
    pub pos: Pos,
    pub dir: Dir,
}

impl RobotState {
    pub const fn new(pos: Pos, dir: Dir) -> Self {
        RobotState { pos, dir }
    }
}

/// Initial heading of every episode: toward the goal side (row `H - 1`).
pub const START_DIR: Dir = Dir::South;

/// A static, solvable occupancy grid with start and goal cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridDomain {
    width: usize,
    height: usize,
    cells: Vec<i8>,
    start: RobotState,
    goal: Pos,
}

impl GridDomain {
    /// `occupied` is row-major, `width * height` long.
    pub fn new(width: usize, height: usize, occupied: &[bool], start: Pos, goal: Pos) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::EmptyGrid);
        }
        if occupied.len() != width * height {
            return Err(GridError::DimensionMismatch(width, height, occupied.len(), 1));
        }
        let cells = occupied.iter().map(|&o| if o { OCCUPIED } else { FREE }).collect();
        let domain = GridDomain {
            width,
            height,
            cells,
            start: RobotState::new(start, START_DIR),
            goal,
        };
        if start == goal || !domain.is_free(start) || !domain.is_free(goal) {
            return Err(GridError::BadEndpoints);
        }
        if shortest_path(&GridView::of_domain(&domain), domain.start, goal)
            .length
            .is_none()
        {
            return Err(GridError::Unsolvable);
        }
        Ok(domain)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> RobotState {
        self.start
    }

    pub fn goal(&self) -> Pos {
        self.goal
    }

    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    /// `FREE` or `OCCUPIED`; panics out of bounds.
    pub fn cell(&self, p: Pos) -> i8 {
        self.cells[p.y as usize * self.width + p.x as usize]
    }

    pub fn is_free(&self, p: Pos) -> bool {
        self.in_bounds(p) && self.cell(p) == FREE
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == OCCUPIED).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisionConfig {
    radius: f64,
}

impl VisionConfig {
    pub fn new(radius: f64) -> Result<Self, GridError> {
        if !(radius >= 1.0) || !radius.is_finite() {
            return Err(GridError::BadRadius(radius));
        }
        Ok(VisionConfig { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Integer half-width of the bounding square of the vision disc.
    pub fn reach(&self) -> i32 {
        self.radius.floor() as i32
    }

    pub fn covers(&self, dx: i32, dy: i32) -> bool {
        ((dx * dx + dy * dy) as f64) <= self.radius * self.radius
    }
}

/// Accumulated three-valued knowledge of a domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMap {
    width: usize,
    height: usize,
    cells: Vec<i8>,
}

impl ObservationMap {
    pub fn unknown(width: usize, height: usize) -> Self {
        ObservationMap {
            width,
            height,
            cells: vec![UNKNOWN; width * height],
        }
    }

    /// The fully revealed map of a domain.
    pub fn revealed(domain: &GridDomain) -> Self {
        ObservationMap {
            width: domain.width,
            height: domain.height,
            cells: domain.cells.clone(),
        }
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<i8>) -> Self {
        assert_eq!(cells.len(), width * height);
        assert!(cells.iter().all(|c| (-1..=1).contains(c)));
        ObservationMap { width, height, cells }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    /// Knowledge at `p`; `UNKNOWN` outside the grid.
    pub fn get(&self, p: Pos) -> i8 {
        if self.in_bounds(p) {
            self.cells[p.y as usize * self.width + p.x as usize]
        } else {
            UNKNOWN
        }
    }

    pub fn set(&mut self, p: Pos, value: i8) {
        let w = self.width;
        self.cells[p.y as usize * w + p.x as usize] = value;
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != UNKNOWN).count()
    }

    /// Imposes the vision disc at `pos` directly; returns the number of newly
    /// revealed cells. Equivalent to `accumulate(self, visible_patch(..))`.
    pub fn observe(&mut self, domain: &GridDomain, pos: Pos, cfg: &VisionConfig) -> usize {
        let reach = cfg.reach();
        let mut revealed = 0;
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let p = pos.offset(dx, dy);
                if !cfg.covers(dx, dy) || !domain.in_bounds(p) {
                    continue;
                }
                let idx = p.y as usize * self.width + p.x as usize;
                if self.cells[idx] == UNKNOWN {
                    self.cells[idx] = domain.cells[idx];
                    revealed += 1;
                }
            }
        }
        revealed
    }
}

/// Cells within Euclidean distance `r` of `position`, revealed; all else unknown.
/// Walls do not occlude.
pub fn visible_patch(domain: &GridDomain, position: Pos, cfg: &VisionConfig) -> ObservationMap {
    let mut patch = ObservationMap::unknown(domain.width, domain.height);
    patch.observe(domain, position, cfg);
    patch
}

/// Imposes `patch` on `map`. Known entries are never erased; a sign
/// disagreement means the two do not describe the same static world.
pub fn accumulate(map: &ObservationMap, patch: &ObservationMap) -> Result<ObservationMap, GridError> {
    if map.width != patch.width || map.height != patch.height {
        return Err(GridError::DimensionMismatch(
            map.width,
            map.height,
            patch.width,
            patch.height,
        ));
    }
    let mut out = map.clone();
    for (i, (&old, &new)) in map.cells.iter().zip(&patch.cells).enumerate() {
        if new == UNKNOWN {
            continue;
        }
        if old != UNKNOWN && old != new {
            return Err(GridError::Contradiction {
                x: (i % map.width) as i32,
                y: (i / map.width) as i32,
            });
        }
        out.cells[i] = new;
    }
    Ok(out)
}

/// Kinematics. A blocked or out-of-bounds Forward leaves the state unchanged.
pub fn step(domain: &GridDomain, state: RobotState, action: Action) -> RobotState {
    match action {
        Action::TurnLeft => RobotState::new(state.pos, state.dir.turn_left()),
        Action::TurnRight => RobotState::new(state.pos, state.dir.turn_right()),
        Action::Forward => {
            let next = state.pos.step(state.dir);
            if domain.is_free(next) {
                RobotState::new(next, state.dir)
            } else {
                state
            }
        }
    }
}

/// Robot state, accumulated knowledge and goal at one decision point.
#[derive(Debug, Clone)]
pub struct FullObservation {
    pub robot: RobotState,
    pub map: ObservationMap,
    pub goal: Pos,
}

impl FullObservation {
    pub fn new(robot: RobotState, map: ObservationMap, goal: Pos) -> Self {
        debug_assert_eq!(map.get(robot.pos), FREE, "robot cell must be known free");
        FullObservation { robot, map, goal }
    }
}

/// Domains with prior weights (the support of the prior only).
#[derive(Debug, Clone)]
pub struct DomainEnsemble {
    domains: Vec<GridDomain>,
    weights: Vec<f64>,
}

impl DomainEnsemble {
    pub fn uniform(domains: Vec<GridDomain>) -> Result<Self, GridError> {
        let n = domains.len();
        Self::weighted(domains, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn weighted(domains: Vec<GridDomain>, weights: Vec<f64>) -> Result<Self, GridError> {
        if domains.is_empty() {
            return Err(GridError::Ensemble("no domains".into()));
        }
        if weights.len() != domains.len() {
            return Err(GridError::Ensemble("weight count mismatch".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(GridError::Ensemble("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(GridError::Ensemble(format!("weights sum to {total}")));
        }
        Ok(DomainEnsemble { domains, weights })
    }

    pub fn domains(&self) -> &[GridDomain] {
        &self.domains
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Map text format

pub fn load_map(text: &str) -> Result<GridDomain, GridError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(GridError::BadHeader { line: 1 })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| GridError::BadHeader { line: 1 })?;
    let (width, height) = match dims.as_slice() {
        [w, h] if *w > 0 && *h > 0 => (*w, *h),
        [_, _] => return Err(GridError::EmptyGrid),
        _ => return Err(GridError::BadHeader { line: 1 }),
    };

    let mut occupied = Vec::with_capacity(width * height);
    let mut start = None;
    let mut goal = None;
    let mut rows = 0;
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        if rows == height {
            if row.trim().is_empty() {
                continue;
            }
            return Err(GridError::RowCount {
                expected: height,
                found: rows + 1,
            });
        }
        let chars: Vec<char> = row.chars().collect();
        if chars.len() != width {
            return Err(GridError::RowLength {
                line,
                expected: width,
                found: chars.len(),
            });
        }
        for (x, &ch) in chars.iter().enumerate() {
            let col = x + 1;
            let p = Pos::new(x as i32, rows as i32);
            match ch {
                '.' => occupied.push(false),
                '#' => occupied.push(true),
                'S' => {
                    if start.replace(p).is_some() {
                        return Err(GridError::DuplicateStart { line, col });
                    }
                    occupied.push(false);
                }
                'G' => {
                    if goal.replace(p).is_some() {
                        return Err(GridError::DuplicateGoal { line, col });
                    }
                    occupied.push(false);
                }
                _ => return Err(GridError::BadChar { line, col, ch }),
            }
        }
        rows += 1;
    }
    if rows != height {
        return Err(GridError::RowCount {
            expected: height,
            found: rows,
        });
    }
    let start = start.ok_or(GridError::MissingStart)?;
    let goal = goal.ok_or(GridError::MissingGoal)?;
    GridDomain::new(width, height, &occupied, start, goal)
}

pub fn save_map(domain: &GridDomain) -> String {
    let mut out = String::with_capacity((domain.width + 1) * (domain.height + 1) + 16);
    out.push_str(&format!("{} {}\n", domain.width, domain.height));
    for y in 0..domain.height as i32 {
        for x in 0..domain.width as i32 {
            let p = Pos::new(x, y);
            let ch = if p == domain.start.pos {
                'S'
            } else if p == domain.goal {
                'G'
            } else if domain.cell(p) == OCCUPIED {
                '#'
            } else {
                '.'
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Office-like map generator

/// Layout parameters for [`generate_office_map`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfficeParams {
    /// Rooms are not split further below this side length.
    pub min_room: usize,
    /// Probability that a splittable region becomes a corridor-flanked split.
    pub corridor_prob: f64,
    /// Corridor width in cells.
    pub corridor_width: usize,
    /// Door gap width in cells.
    pub door_width: usize,
    /// Probability of a second door in a dividing wall.
    pub extra_door_prob: f64,
    /// Fraction of room interior covered by furniture blocks.
    pub clutter: f64,
    pub max_retries: usize,
}

impl Default for OfficeParams {
    fn default() -> Self {
        OfficeParams {
            min_room: 12,
            corridor_prob: 0.35,
            corridor_width: 3,
            door_width: 2,
            extra_door_prob: 1.0,
            clutter: 0.03,
            max_retries: 32,
        }
    }
}

#[derive(Clone, Copy)]
struct Rect {
    x0: usize,
    y0: usize,
    x1: usize, // exclusive
    y1: usize,
}

impl Rect {
    fn w(&self) -> usize {
        self.x1 - self.x0
    }
    fn h(&self) -> usize {
        self.y1 - self.y0
    }
}

struct OfficeBuilder<'a> {
    width: usize,
    occupied: Vec<bool>,
    params: &'a OfficeParams,
    rng: ChaCha8Rng,
    rooms: Vec<Rect>,
}

impl OfficeBuilder<'_> {
    fn set(&mut self, x: usize, y: usize, v: bool) {
        self.occupied[y * self.width + x] = v;
    }

    /// Vertical wall at column `x` over rows `y0..y1` with door gaps.
    fn vwall(&mut self, x: usize, y0: usize, y1: usize) {
        for y in y0..y1 {
            self.set(x, y, true);
        }
        self.doors(y0, y1, |b, t| b.set(x, t, false));
    }

    fn hwall(&mut self, y: usize, x0: usize, x1: usize) {
        for x in x0..x1 {
            self.set(x, y, true);
        }
        self.doors(x0, x1, |b, t| b.set(t, y, false));
    }

    fn doors(&mut self, lo: usize, hi: usize, mut open: impl FnMut(&mut Self, usize)) {
        let len = hi - lo;
        let dw = self.params.door_width.clamp(1, len);
        let count = if self.rng.random_bool(self.params.extra_door_prob.clamp(0.0, 1.0)) {
            2
        } else {
            1
        };
        for _ in 0..count {
            let at = lo + self.rng.random_range(0..=len - dw);
            for t in at..at + dw {
                open(self, t);
            }
        }
    }

    fn split(&mut self, r: Rect, depth: usize) {
        let min = self.params.min_room.max(3);
        let can_v = r.w() > 2 * min;
        let can_h = r.h() > 2 * min;
        if !(can_v || can_h) || depth > 12 {
            self.rooms.push(r);
            return;
        }
        let vertical = match (can_v, can_h) {
            (true, false) => true,
            (false, true) => false,
            _ => {
                if r.w() == r.h() {
                    self.rng.random_bool(0.5)
                } else {
                    r.w() > r.h()
                }
            }
        };
        let cw = self.params.corridor_width.max(1);
        let corridor = self.rng.random_bool(self.params.corridor_prob.clamp(0.0, 1.0))
            && (if vertical { r.w() } else { r.h() }) >= 2 * min + cw + 2;
        if vertical {
            if corridor {
                let x = r.x0 + self.rng.random_range(min..=r.w() - min - cw - 1);
                // walls on both sides of the corridor
                self.vwall(x, r.y0, r.y1);
                self.vwall(x + cw + 1, r.y0, r.y1);
                self.split(Rect { x1: x, ..r }, depth + 1);
                self.split(Rect { x0: x + cw + 2, ..r }, depth + 1);
            } else {
                let x = r.x0 + self.rng.random_range(min..=r.w() - min - 1);
                self.vwall(x, r.y0, r.y1);
                self.split(Rect { x1: x, ..r }, depth + 1);
                self.split(Rect { x0: x + 1, ..r }, depth + 1);
            }
        } else if corridor {
            let y = r.y0 + self.rng.random_range(min..=r.h() - min - cw - 1);
            self.hwall(y, r.x0, r.x1);
            self.hwall(y + cw + 1, r.x0, r.x1);
            self.split(Rect { y1: y, ..r }, depth + 1);
            self.split(Rect { y0: y + cw + 2, ..r }, depth + 1);
        } else {
            let y = r.y0 + self.rng.random_range(min..=r.h() - min - 1);
            self.hwall(y, r.x0, r.x1);
            self.split(Rect { y1: y, ..r }, depth + 1);
            self.split(Rect { y0: y + 1, ..r }, depth + 1);
        }
    }

    /// Small rectangular blocks inside rooms, kept off the room border so
    /// doors stay reachable.
    fn furnish(&mut self) {
        let rooms = std::mem::take(&mut self.rooms);
        for r in &rooms {
            if r.w() < 6 || r.h() < 6 {
                continue;
            }
            let area = (r.w() - 4) * (r.h() - 4);
            let mut budget = (area as f64 * self.params.clutter).round() as usize;
            while budget > 0 {
                let bw = self.rng.random_range(1..=3usize).min(r.w() - 4);
                let bh = self.rng.random_range(1..=2usize).min(r.h() - 4);
                let x = r.x0 + 2 + self.rng.random_range(0..=r.w() - 4 - bw);
                let y = r.y0 + 2 + self.rng.random_range(0..=r.h() - 4 - bh);
                for yy in y..y + bh {
                    for xx in x..x + bw {
                        self.set(xx, yy, true);
                    }
                }
                budget = budget.saturating_sub(bw * bh);
            }
        }
        self.rooms = rooms;
    }
}

/// Procedural office-like map: recursive room division with door gaps and
/// corridors. Start is a random free cell on row 0, goal a random free cell on
/// row `H - 1`. Deterministic in `(seed, width, height, params)`.
pub fn generate_office_map(
    seed: u64,
    width: usize,
    height: usize,
    params: &OfficeParams,
) -> Result<GridDomain, GridError> {
    if width < 16 || height < 16 {
        return Err(GridError::Generator(format!("size {width}x{height} below 16x16")));
    }
    let mut last_err = GridError::Generator("no attempts".into());
    for attempt in 0..params.max_retries.max(1) {
        let rng = ChaCha8Rng::seed_from_u64(seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut b = OfficeBuilder {
            width,
            occupied: vec![false; width * height],
            params,
            rng,
            rooms: Vec::new(),
        };
        b.split(
            Rect {
                x0: 0,
                y0: 0,
                x1: width,
                y1: height,
            },
            0,
        );
        b.furnish();

        let free_in_row =
            |occ: &[bool], y: usize| -> Vec<usize> { (0..width).filter(|&x| !occ[y * width + x]).collect() };
        let top = free_in_row(&b.occupied, 0);
        let bottom = free_in_row(&b.occupied, height - 1);
        if top.is_empty() || bottom.is_empty() {
            last_err = GridError::Generator("no free cell on start/goal row".into());
            continue;
        }
        let sx = top[b.rng.random_range(0..top.len())];
        let gx = bottom[b.rng.random_range(0..bottom.len())];
        match GridDomain::new(
            width,
            height,
            &b.occupied,
            Pos::new(sx as i32, 0),
            Pos::new(gx as i32, height as i32 - 1),
        ) {
            Ok(d) => return Ok(d),
            Err(e) => last_err = e,
        }
    }
    Err(GridError::Generator(format!(
        "no solvable map after {} attempts: {last_err}",
        params.max_retries
    )))
}
