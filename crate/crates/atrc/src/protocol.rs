//! The distributed recruitment protocol: packet definitions, probabilistic
//! routing tables updated by evaporation + reinforcement, duplicate
//! suppression and the coordinator's task bookkeeping.
//!
//! Packet *handling* (who replies, who forwards) lives in the engine's agent
//! loop; everything here is pure state.

use std::collections::{BTreeMap, BTreeSet};

use crate::world::{CellCoord, MineId, RobotId};

pub type TaskId = u32;
pub type FantId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PacketKind {
    Hello,
    RtFant,
    RtBant,
    RFant,
    RBant,
    Lp,
}

impl PacketKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PacketKind::Hello => "HELLO",
            PacketKind::RtFant => "RT-FANT",
            PacketKind::RtBant => "RT-BANT",
            PacketKind::RFant => "R-FANT",
            PacketKind::RBant => "R-BANT",
            PacketKind::Lp => "LP",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TaskType {
    Recruiting,
    Disarming,
    Discovery,
}

/// One protocol message. A single struct covers all six kinds; unused fields
/// stay at their defaults.
#[derive(Clone, Debug)]
pub struct Packet {
    pub kind: PacketKind,
    pub coordinator: RobotId,
    pub task_id: TaskId,
    pub fant_id: FantId,
    pub task_type: TaskType,
    /// Link quality carried by BANTs: 1 / (1 + distance to target).
    pub path_degree: f64,
    /// FANTs: ids crossed so far, coordinator first.
    /// BANTs: the reverse route to walk, coordinator last.
    pub crossed_path: Vec<RobotId>,
    /// Index of the next hop in `crossed_path` (BANTs only).
    pub hop: usize,
    pub target_cell: CellCoord,
    pub needed_robots: u32,
    /// Creator of the packet (replier for BANTs).
    pub origin: RobotId,
}

impl Packet {
    fn base(kind: PacketKind, origin: RobotId) -> Self {
        Packet {
            kind,
            coordinator: 0,
            task_id: 0,
            fant_id: 0,
            task_type: TaskType::Recruiting,
            path_degree: 0.0,
            crossed_path: Vec::new(),
            hop: 0,
            target_cell: CellCoord::new(0, 0),
            needed_robots: 0,
            origin,
        }
    }

    pub fn hello(origin: RobotId) -> Self {
        Packet::base(PacketKind::Hello, origin)
    }

    pub fn rt_fant(
        coordinator: RobotId,
        task_id: TaskId,
        fant_id: FantId,
        target_cell: CellCoord,
        needed_robots: u32,
    ) -> Self {
        Packet {
            kind: PacketKind::RtFant,
            coordinator,
            task_id,
            fant_id,
            task_type: TaskType::Recruiting,
            crossed_path: vec![coordinator],
            target_cell,
            needed_robots,
            ..Packet::base(PacketKind::RtFant, coordinator)
        }
    }

    /// Key identifying a FANT for duplicate suppression.
    pub fn fant_key(&self) -> (PacketKind, RobotId, TaskId, FantId) {
        (self.kind, self.coordinator, self.task_id, self.fant_id)
    }

    pub fn task_key(&self) -> (RobotId, TaskId) {
        (self.coordinator, self.task_id)
    }
}

/// Routing-row key: each (coordinator, task, type) gets its own probability
/// row over neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowKey {
    pub coordinator: RobotId,
    pub task_id: TaskId,
    pub task_type: TaskType,
}

/// Probabilistic routing table. Each row's probabilities sum to 1.
#[derive(Clone, Debug, Default)]
pub struct RoutingTable {
    rows: BTreeMap<RowKey, BTreeMap<RobotId, f64>>,
}

impl RoutingTable {
    /// Creates the row with a balanced distribution over `neighbors` if it
    /// does not exist yet.
    pub fn ensure_row<I: IntoIterator<Item = RobotId>>(&mut self, key: RowKey, neighbors: I) {
        self.rows.entry(key).or_insert_with(|| {
            let ids: Vec<RobotId> = neighbors.into_iter().collect();
            if ids.is_empty() {
                return BTreeMap::new();
            }
            let p = 1.0 / ids.len() as f64;
            ids.into_iter().map(|id| (id, p)).collect()
        });
    }

    pub fn row(&self, key: &RowKey) -> Option<&BTreeMap<RobotId, f64>> {
        self.rows.get(key)
    }

    /// Evaporation on every link, reinforcement of the link the BANT arrived
    /// on, then renormalization. `q` in (0, 1] is the link quality.
    pub fn update(&mut self, key: RowKey, link: RobotId, q: f64, gamma_e: f64, gamma_r: f64) {
        let row = self.rows.entry(key).or_default();
        row.entry(link).or_insert(0.0);
        for p in row.values_mut() {
            *p *= 1.0 - gamma_e;
        }
        *row.get_mut(&link).unwrap() += gamma_r * q;
        let total: f64 = row.values().sum();
        if total > 0.0 {
            for p in row.values_mut() {
                *p /= total;
            }
        }
    }

    /// Highest-probability link of the row, optionally excluding one
    /// neighbor. Ties resolve to the lowest robot id.
    pub fn argmax_link(&self, key: &RowKey, exclude: Option<RobotId>) -> Option<RobotId> {
        let row = self.rows.get(key)?;
        let mut best: Option<(RobotId, f64)> = None;
        for (&id, &p) in row {
            if Some(id) == exclude {
                continue;
            }
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((id, p)),
            }
        }
        best.map(|(id, _)| id)
    }

    pub fn purge_task(&mut self, coordinator: RobotId, task_id: TaskId) {
        self.rows
            .retain(|k, _| !(k.coordinator == coordinator && k.task_id == task_id));
    }

    pub fn row_sum(&self, key: &RowKey) -> Option<f64> {
        self.rows.get(key).map(|r| r.values().sum())
    }
}

/// FANTs already processed, for duplicate suppression. Purged per task when
/// the task completes.
#[derive(Clone, Debug, Default)]
pub struct SeenFantCache {
    seen: BTreeSet<(PacketKind, RobotId, TaskId, FantId)>,
}

impl SeenFantCache {
    /// Records the FANT; returns false if it was already processed.
    pub fn insert(&mut self, key: (PacketKind, RobotId, TaskId, FantId)) -> bool {
        self.seen.insert(key)
    }

    pub fn contains(&self, key: &(PacketKind, RobotId, TaskId, FantId)) -> bool {
        self.seen.contains(key)
    }

    pub fn purge_task(&mut self, coordinator: RobotId, task_id: TaskId) {
        self.seen.retain(|k| !(k.1 == coordinator && k.2 == task_id));
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Per-task reply throttling counters for a forager.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReplyStats {
    pub fants_seen: u32,
    pub bants_sent: u32,
}

impl ReplyStats {
    /// Probability of answering the next request for this task:
    /// clamp(1 - bants_sent / fants_seen, 0, 1).
    pub fn reply_probability(&self) -> f64 {
        if self.fants_seen == 0 {
            return 1.0;
        }
        (1.0 - self.bants_sent as f64 / self.fants_seen as f64).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordPhase {
    Requesting,
    Recruiting,
    Waiting,
    Disarming,
}

/// The coordinator's view of one recruitment task.
#[derive(Clone, Debug)]
pub struct CoordinatorState {
    pub task_id: TaskId,
    pub mine: MineId,
    pub target: CellCoord,
    pub phase: CoordPhase,
    /// Steps remaining on the current timer (reply wait or arrival wait).
    pub timer: u64,
    /// RT-BANT replies: replier id -> distance to target. Deduplicated.
    pub replies: BTreeMap<RobotId, f64>,
    /// Robots that confirmed recruitment with an R-BANT.
    pub confirmed: BTreeSet<RobotId>,
    /// Recruits that physically arrived at the mine's vicinity.
    pub arrived: BTreeSet<RobotId>,
    pub t_start: u64,
    /// fant id of the most recent RT-FANT for this task.
    pub current_fant: FantId,
    /// Consecutive request rounds that drew zero replies.
    pub empty_rounds: u32,
}

impl CoordinatorState {
    pub fn new(task_id: TaskId, mine: MineId, target: CellCoord, t_start: u64, reply_wait: u64) -> Self {
        CoordinatorState {
            task_id,
            mine,
            target,
            phase: CoordPhase::Requesting,
            timer: reply_wait,
            replies: BTreeMap::new(),
            confirmed: BTreeSet::new(),
            arrived: BTreeSet::new(),
            t_start,
            current_fant: 0,
            empty_rounds: 0,
        }
    }
}

/// Everything a robot remembers for the protocol.
#[derive(Clone, Debug, Default)]
pub struct ProtocolMemory {
    pub routing: RoutingTable,
    pub seen: SeenFantCache,
    pub reply_stats: BTreeMap<(RobotId, TaskId), ReplyStats>,
    pub next_task_id: TaskId,
    pub next_fant_id: FantId,
}

impl ProtocolMemory {
    pub fn fresh_task_id(&mut self) -> TaskId {
        let id = self.next_task_id;
        self.next_task_id += 1;
        id
    }

    pub fn fresh_fant_id(&mut self) -> FantId {
        let id = self.next_fant_id;
        self.next_fant_id += 1;
        id
    }

    pub fn stats_mut(&mut self, task: (RobotId, TaskId)) -> &mut ReplyStats {
        self.reply_stats.entry(task).or_default()
    }
}

/// Link quality from the replier's Euclidean distance to the target.
pub fn link_quality(distance: f64) -> f64 {
    1.0 / (1.0 + distance)
}
