//! Discrete 2-D grid environment: obstacles, mines, robot occupancy and
//! visit bookkeeping, with 8-connected neighborhood queries.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

pub type RobotId = u32;
pub type MineId = u32;

/// A cell position on the grid. `x` is the column, `y` the row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellCoord {
    pub x: i32,
    pub y: i32,
}

impl CellCoord {
    pub fn new(x: i32, y: i32) -> Self {
        CellCoord { x, y }
    }

    /// Euclidean distance between cell centers.
    pub fn dist(self, other: CellCoord) -> f64 {
        let dx = (self.x - other.x) as f64;
        let dy = (self.y - other.y) as f64;
        (dx * dx + dy * dy).sqrt()
    }

    /// Chebyshev (8-connected hop) distance.
    pub fn chebyshev(self, other: CellCoord) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

impl std::fmt::Display for CellCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Mine lifecycle. Transitions are forward-only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MineStatus {
    Hidden,
    Detected,
    Disarming,
    Disarmed,
}

#[derive(Clone, Debug)]
pub struct Mine {
    pub id: MineId,
    pub location: CellCoord,
    pub status: MineStatus,
    /// Robots counted toward the disarming team (coordinator included).
    pub assigned: BTreeSet<RobotId>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WorldError {
    #[error("cell {0} is out of bounds")]
    OutOfBounds(CellCoord),
    #[error("mine at {0} overlaps an obstacle")]
    MineOnObstacle(CellCoord),
    #[error("cell {0} is already occupied")]
    Occupied(CellCoord),
    #[error("robot start {0} overlaps an obstacle")]
    StartOnObstacle(CellCoord),
}

/// The grid: static obstacles, mines, robot occupancy and visit counts.
#[derive(Clone, Debug)]
pub struct GridWorld {
    pub width: u32,
    pub height: u32,
    obstacles: HashSet<CellCoord>,
    pub mines: Vec<Mine>,
    occupancy: HashMap<CellCoord, RobotId>,
    visited: BTreeMap<CellCoord, u32>,
}

impl GridWorld {
    pub fn new(width: u32, height: u32) -> Self {
        GridWorld {
            width,
            height,
            obstacles: HashSet::new(),
            mines: Vec::new(),
            occupancy: HashMap::new(),
            visited: BTreeMap::new(),
        }
    }

    pub fn in_bounds(&self, c: CellCoord) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as u32) < self.width && (c.y as u32) < self.height
    }

    pub fn add_obstacle(&mut self, c: CellCoord) -> Result<(), WorldError> {
        if !self.in_bounds(c) {
            return Err(WorldError::OutOfBounds(c));
        }
        self.obstacles.insert(c);
        Ok(())
    }

    pub fn is_obstacle(&self, c: CellCoord) -> bool {
        self.obstacles.contains(&c)
    }

    pub fn obstacle_count(&self) -> usize {
        self.obstacles.len()
    }

    pub fn add_mine(&mut self, location: CellCoord) -> Result<MineId, WorldError> {
        if !self.in_bounds(location) {
            return Err(WorldError::OutOfBounds(location));
        }
        if self.obstacles.contains(&location) {
            return Err(WorldError::MineOnObstacle(location));
        }
        let id = self.mines.len() as MineId;
        self.mines.push(Mine {
            id,
            location,
            status: MineStatus::Hidden,
            assigned: BTreeSet::new(),
        });
        Ok(id)
    }

    pub fn mine(&self, id: MineId) -> &Mine {
        &self.mines[id as usize]
    }

    pub fn mine_mut(&mut self, id: MineId) -> &mut Mine {
        &mut self.mines[id as usize]
    }

    /// Advance a mine's status. Forward-only; backwards moves are an engine bug.
    pub fn set_mine_status(&mut self, id: MineId, status: MineStatus) {
        let mine = &mut self.mines[id as usize];
        assert!(
            status >= mine.status,
            "mine {} status would move backwards: {:?} -> {:?}",
            id,
            mine.status,
            status
        );
        mine.status = status;
    }

    pub fn occupant(&self, c: CellCoord) -> Option<RobotId> {
        self.occupancy.get(&c).copied()
    }

    /// Place a robot on a fresh cell, marking it visited.
    pub fn place_robot(&mut self, r: RobotId, c: CellCoord) -> Result<(), WorldError> {
        if !self.in_bounds(c) {
            return Err(WorldError::OutOfBounds(c));
        }
        if self.obstacles.contains(&c) {
            return Err(WorldError::StartOnObstacle(c));
        }
        if self.occupancy.contains_key(&c) {
            return Err(WorldError::Occupied(c));
        }
        self.occupancy.insert(c, r);
        self.mark_visited(c, r);
        Ok(())
    }

    /// In-bounds 8-neighbors of `c`, excluding obstacles and occupied cells,
    /// in deterministic row-major order.
    pub fn neighbors(&self, c: CellCoord) -> Vec<CellCoord> {
        let mut out = Vec::with_capacity(8);
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let n = CellCoord::new(c.x + dx, c.y + dy);
                if self.in_bounds(n)
                    && !self.obstacles.contains(&n)
                    && !self.occupancy.contains_key(&n)
                {
                    out.push(n);
                }
            }
        }
        out
    }

    /// If a Hidden mine sits at `c`, mark it Detected and return its id.
    /// Already-detected mines are never re-detected.
    pub fn detect_mine(&mut self, c: CellCoord) -> Option<MineId> {
        for mine in &mut self.mines {
            if mine.location == c && mine.status == MineStatus::Hidden {
                mine.status = MineStatus::Detected;
                return Some(mine.id);
            }
        }
        None
    }

    /// Increment the visit counter for `c`. Obstacle cells are unreachable;
    /// marking one signals an engine bug.
    pub fn mark_visited(&mut self, c: CellCoord, _r: RobotId) {
        assert!(self.in_bounds(c), "visit out of bounds: {c}");
        assert!(!self.obstacles.contains(&c), "visit on obstacle: {c}");
        *self.visited.entry(c).or_insert(0) += 1;
    }

    /// Move a robot between cells, updating occupancy and visits.
    pub fn move_robot(&mut self, r: RobotId, from: CellCoord, to: CellCoord) {
        debug_assert_eq!(self.occupancy.get(&from), Some(&r));
        self.occupancy.remove(&from);
        let prev = self.occupancy.insert(to, r);
        assert!(prev.is_none(), "two robots on {to}");
        self.mark_visited(to, r);
    }

    pub fn visit_count(&self, c: CellCoord) -> u32 {
        self.visited.get(&c).copied().unwrap_or(0)
    }

    pub fn visited_cells(&self) -> usize {
        self.visited.len()
    }

    pub fn visit_counts(&self) -> &BTreeMap<CellCoord, u32> {
        &self.visited
    }

    /// Fraction of non-obstacle cells visited at least once.
    pub fn coverage(&self) -> f64 {
        let free = (self.width as usize * self.height as usize) - self.obstacles.len();
        if free == 0 {
            return 1.0;
        }
        self.visited.len() as f64 / free as f64
    }
}
