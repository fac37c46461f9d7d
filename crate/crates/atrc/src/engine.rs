//! Deterministic discrete-time scheduler: the per-step pipeline, seeded
//! randomness, termination detection and run-log emission.
//!
//! Step pipeline: (1) the medium delivers in-flight packets, (2) robots
//! handle packets and timers in id order, (3) robots deposit pheromone,
//! (4) the fields evaporate and absorb this step's deposits, (5) robots
//! select and execute moves in id order, (6) detections, arrivals and state
//! transitions, (7) termination check.

use std::collections::BTreeMap;

use rand::Rng;

use crate::agent::{CurrentTask, Robot, RobotState};
use crate::netsim::{Delivery, Medium};
use crate::pheromone::{FieldKind, PheromoneField, PheromoneParams};
use crate::policy::{
    choose_exploration_cell, choose_recruitment_cell, move_scores, sample_exploration_cell,
    MoveScoreParams,
};
use crate::protocol::{
    link_quality, CoordPhase, CoordinatorState, Packet, PacketKind, RowKey, TaskId, TaskType,
};
use crate::rng::{substream, Stream};
use crate::world::{CellCoord, GridWorld, MineId, MineStatus, RobotId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exploration only.
    Oe,
    /// Exploration + stigmergy recruitment (attractive pheromone).
    Ers,
    /// Exploration + wireless protocol recruitment.
    Erp,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Oe => "oe",
            Mode::Ers => "ers",
            Mode::Erp => "erp",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PolicyParams {
    pub score: MoveScoreParams,
    /// Sample the inverted distribution instead of taking the argmin.
    pub stochastic: bool,
    /// Ignore pheromone entirely: uniform random walk baseline.
    pub random_walk: bool,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            score: MoveScoreParams::default(),
            stochastic: false,
            random_walk: false,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProtocolParams {
    /// Robots needed to disarm one mine (coordinator included by default).
    pub r_min: u32,
    /// Transmission radius in cells.
    pub r_t: f64,
    /// Steps a coordinator waits for RT-BANT replies.
    pub reply_wait: u64,
    /// Steps a coordinator waits for recruits to arrive; None derives
    /// 4 * max(m, n).
    pub arrival_timeout: Option<u64>,
    /// Steps the assembled team spends disarming.
    pub disarm_time: u32,
    /// Routing evaporation factor.
    pub gamma_e: f64,
    /// Routing reinforcement factor.
    pub gamma_r: f64,
    pub hello_period: u64,
    /// Neighbor entries expire after this many hello periods of silence.
    pub hello_timeout: u64,
    /// Independent per-delivery drop probability.
    pub loss_prob: f64,
    /// A recruit gives up once its distance to target exceeds this factor
    /// times the distance at recruitment time.
    pub abandon_factor: f64,
    /// A coordinator disbands after this many consecutive zero-reply rounds.
    pub abandon_rounds: u32,
    /// Whether the coordinator counts toward the R_min team.
    pub coordinator_counts: bool,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            r_min: 4,
            r_t: 9.0,
            reply_wait: 10,
            arrival_timeout: None,
            disarm_time: 5,
            gamma_e: 0.1,
            gamma_r: 0.3,
            hello_period: 1,
            hello_timeout: 3,
            loss_prob: 0.0,
            abandon_factor: 2.0,
            abandon_rounds: 3,
            coordinator_counts: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub width: u32,
    pub height: u32,
    pub obstacles: Vec<CellCoord>,
    pub mines: Vec<CellCoord>,
    pub robot_count: u32,
    /// Explicit start cells; empty means random placement.
    pub robot_starts: Vec<CellCoord>,
    pub mode: Mode,
    pub seed: u64,
    pub max_steps: u64,
    pub pheromone: PheromoneParams,
    pub policy: PolicyParams,
    pub protocol: ProtocolParams,
    /// Recruited robots keep depositing repellent in protocol mode.
    pub erp_recruited_deposit: bool,
    /// Attractive amounts below this are treated as absent in stigmergy mode.
    pub theta_threshold: f64,
}

impl SimConfig {
    pub fn new(width: u32, height: u32) -> Self {
        SimConfig {
            width,
            height,
            obstacles: Vec::new(),
            mines: Vec::new(),
            robot_count: 1,
            robot_starts: Vec::new(),
            mode: Mode::Oe,
            seed: 0,
            max_steps: 50_000,
            pheromone: PheromoneParams::default(),
            policy: PolicyParams::default(),
            protocol: ProtocolParams::default(),
            erp_recruited_deposit: true,
            theta_threshold: 0.05,
        }
    }

    pub fn arrival_timeout(&self) -> u64 {
        self.protocol
            .arrival_timeout
            .unwrap_or(4 * self.width.max(self.height) as u64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.width == 0 || self.height == 0 {
            return Err(ConfigError::EmptyGrid);
        }
        if self.robot_count == 0 {
            return Err(ConfigError::NoRobots);
        }
        if self.max_steps == 0 {
            return Err(ConfigError::ZeroSteps);
        }
        let cells = self.width as usize * self.height as usize;
        if self.obstacles.len() + self.robot_count as usize > cells {
            return Err(ConfigError::TooCrowded);
        }
        for &c in self.obstacles.iter().chain(&self.mines) {
            if !in_bounds(c, self.width, self.height) {
                return Err(ConfigError::OutOfBounds(c));
            }
        }
        for &m in &self.mines {
            if self.obstacles.contains(&m) {
                return Err(ConfigError::MineOnObstacle(m));
            }
        }
        if !self.robot_starts.is_empty() {
            if self.robot_starts.len() != self.robot_count as usize {
                return Err(ConfigError::StartCountMismatch);
            }
            let mut seen = std::collections::BTreeSet::new();
            for &s in &self.robot_starts {
                if !in_bounds(s, self.width, self.height) {
                    return Err(ConfigError::OutOfBounds(s));
                }
                if self.obstacles.contains(&s) {
                    return Err(ConfigError::StartOnObstacle(s));
                }
                if !seen.insert(s) {
                    return Err(ConfigError::DuplicateStart(s));
                }
            }
        }
        // the team-size requirement only binds when there are mines to disarm
        if self.mode != Mode::Oe && !self.mines.is_empty() && self.protocol.r_min > self.robot_count
        {
            return Err(ConfigError::TeamLargerThanSwarm {
                r_min: self.protocol.r_min,
                robots: self.robot_count,
            });
        }
        let p = &self.pheromone;
        if p.delta_tau0 <= 0.0 || p.a1 <= 0.0 || p.a2 <= 0.0 || !(0.0..=1.0).contains(&p.rho) || p.rs <= 0.0
        {
            return Err(ConfigError::BadPheromoneParams);
        }
        Ok(())
    }
}

fn in_bounds(c: CellCoord, w: u32, h: u32) -> bool {
    c.x >= 0 && c.y >= 0 && (c.x as u32) < w && (c.y as u32) < h
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("grid has zero cells")]
    EmptyGrid,
    #[error("no robots configured")]
    NoRobots,
    #[error("max_steps must be positive")]
    ZeroSteps,
    #[error("more robots and obstacles than cells")]
    TooCrowded,
    #[error("cell {0} out of bounds")]
    OutOfBounds(CellCoord),
    #[error("mine at {0} overlaps an obstacle")]
    MineOnObstacle(CellCoord),
    #[error("robot start at {0} overlaps an obstacle")]
    StartOnObstacle(CellCoord),
    #[error("duplicate robot start {0}")]
    DuplicateStart(CellCoord),
    #[error("start list does not match robot count")]
    StartCountMismatch,
    #[error("R_min = {r_min} exceeds swarm size {robots}")]
    TeamLargerThanSwarm { r_min: u32, robots: u32 },
    #[error("pheromone parameters out of range")]
    BadPheromoneParams,
}

/// One per-step occurrence, in pipeline order.
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Move {
        step: u64,
        robot: RobotId,
        from: CellCoord,
        to: CellCoord,
    },
    State {
        step: u64,
        robot: RobotId,
        from: RobotState,
        to: RobotState,
    },
    Deposit {
        step: u64,
        robot: RobotId,
        kind: FieldKind,
        cell: CellCoord,
    },
    Detect {
        step: u64,
        robot: RobotId,
        mine: MineId,
    },
    Send {
        step: u64,
        kind: PacketKind,
        sender: RobotId,
        receiver: Option<RobotId>,
        coordinator: RobotId,
        task_id: TaskId,
    },
    TaskStart {
        step: u64,
        coordinator: RobotId,
        task_id: TaskId,
        mine: MineId,
    },
    TaskAbandon {
        step: u64,
        coordinator: RobotId,
        task_id: TaskId,
    },
    Recruit {
        step: u64,
        robot: RobotId,
        coordinator: RobotId,
        task_id: TaskId,
    },
    Arrive {
        step: u64,
        robot: RobotId,
        coordinator: RobotId,
        task_id: TaskId,
    },
    Disarm {
        step: u64,
        mine: MineId,
    },
}

#[derive(Clone, Debug)]
pub struct RecruitRecord {
    pub robot: RobotId,
    pub t_start: u64,
    pub t_end: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct TaskRecord {
    pub coordinator: RobotId,
    pub task_id: TaskId,
    pub mine: MineId,
    pub t_start: u64,
    /// Step at which the mine finished disarming under this task.
    pub t_end: Option<u64>,
    pub recruits: Vec<RecruitRecord>,
}

/// Complete record of one run. Replaying the same config reproduces the
/// identical log byte-for-byte (`to_bytes`).
#[derive(Clone, Debug)]
pub struct RunLog {
    pub mode: Mode,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub robot_count: u32,
    pub mine_count: u32,
    pub events: Vec<Event>,
    pub total_steps: u64,
    pub capped: bool,
    pub coverage: f64,
    /// Distinct (robot, cell) visit pairs.
    pub visited_pairs: u64,
    pub visit_counts: BTreeMap<CellCoord, u32>,
    /// Transmissions per kind, as counted by the medium.
    pub packet_counts: BTreeMap<PacketKind, u64>,
    pub tasks: Vec<TaskRecord>,
    pub mines_disarmed: u32,
    /// Team size recorded per mine at disarm time.
    pub mine_teams: Vec<(MineId, u32)>,
}

impl RunLog {
    /// Deterministic byte serialization, for replay comparison and storage.
    pub fn to_bytes(&self) -> Vec<u8> {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(
            out,
            "atrc-runlog v1 mode={} seed={} m={} n={} robots={} mines={}",
            self.mode.as_str(),
            self.seed,
            self.width,
            self.height,
            self.robot_count,
            self.mine_count
        )
        .unwrap();
        for e in &self.events {
            match *e {
                Event::Move { step, robot, from, to } => {
                    writeln!(out, "M {step} {robot} {} {} {} {}", from.x, from.y, to.x, to.y)
                }
                Event::State { step, robot, from, to } => {
                    writeln!(out, "S {step} {robot} {} {}", from.as_str(), to.as_str())
                }
                Event::Deposit { step, robot, kind, cell } => {
                    let k = match kind {
                        FieldKind::Repellent => "tau",
                        FieldKind::Attractive => "theta",
                    };
                    writeln!(out, "D {step} {robot} {k} {} {}", cell.x, cell.y)
                }
                Event::Detect { step, robot, mine } => writeln!(out, "X {step} {robot} {mine}"),
                Event::Send { step, kind, sender, receiver, coordinator, task_id } => {
                    let rx = receiver.map(|r| r as i64).unwrap_or(-1);
                    writeln!(out, "P {step} {} {sender} {rx} {coordinator} {task_id}", kind.as_str())
                }
                Event::TaskStart { step, coordinator, task_id, mine } => {
                    writeln!(out, "T {step} {coordinator} {task_id} {mine}")
                }
                Event::TaskAbandon { step, coordinator, task_id } => {
                    writeln!(out, "A {step} {coordinator} {task_id}")
                }
                Event::Recruit { step, robot, coordinator, task_id } => {
                    writeln!(out, "R {step} {robot} {coordinator} {task_id}")
                }
                Event::Arrive { step, robot, coordinator, task_id } => {
                    writeln!(out, "V {step} {robot} {coordinator} {task_id}")
                }
                Event::Disarm { step, mine } => writeln!(out, "Z {step} {mine}"),
            }
            .unwrap();
        }
        for (c, n) in &self.visit_counts {
            writeln!(out, "C {} {} {n}", c.x, c.y).unwrap();
        }
        for (k, n) in &self.packet_counts {
            writeln!(out, "K {} {n}", k.as_str()).unwrap();
        }
        writeln!(
            out,
            "END steps={} capped={} coverage={:.12} pairs={} disarmed={}",
            self.total_steps, self.capped, self.coverage, self.visited_pairs, self.mines_disarmed
        )
        .unwrap();
        out.into_bytes()
    }
}

/// Observer hook for per-step field dumps.
pub type FieldObserver<'a> = &'a mut dyn FnMut(u64, &PheromoneField);

pub fn run(config: &SimConfig) -> Result<RunLog, ConfigError> {
    run_with_observer(config, None)
}

pub fn run_with_observer(
    config: &SimConfig,
    mut observer: Option<FieldObserver<'_>>,
) -> Result<RunLog, ConfigError> {
    config.validate()?;
    let mut sim = Sim::new(config)?;
    sim.initial_detections();
    let mut capped = true;
    let mut steps = 0;
    for step in 1..=config.max_steps {
        sim.step(step);
        if let Some(obs) = observer.as_mut() {
            obs(step, &sim.field);
        }
        steps = step;
        if sim.terminated() {
            capped = false;
            break;
        }
    }
    Ok(sim.finish(steps, capped))
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    world: GridWorld,
    field: PheromoneField,
    medium: Medium,
    robots: Vec<Robot>,
    events: Vec<Event>,
    tasks: Vec<TaskRecord>,
    task_index: BTreeMap<(RobotId, TaskId), usize>,
    /// Mine -> robot currently coordinating it.
    active_coordinator: BTreeMap<MineId, RobotId>,
    /// Countdown per mine in Disarming status.
    disarm_remaining: BTreeMap<MineId, u32>,
    visited_pairs: std::collections::BTreeSet<(RobotId, CellCoord)>,
    mine_teams: Vec<(MineId, u32)>,
    arrival_timeout: u64,
}

impl<'a> Sim<'a> {
    fn new(cfg: &'a SimConfig) -> Result<Self, ConfigError> {
        let mut world = GridWorld::new(cfg.width, cfg.height);
        for &c in &cfg.obstacles {
            world.add_obstacle(c).map_err(|_| ConfigError::OutOfBounds(c))?;
        }
        for &m in &cfg.mines {
            world.add_mine(m).map_err(|_| ConfigError::MineOnObstacle(m))?;
        }
        let starts = if cfg.robot_starts.is_empty() {
            random_placement(cfg, &world)
        } else {
            cfg.robot_starts.clone()
        };
        let mut robots = Vec::with_capacity(starts.len());
        let mut visited_pairs = std::collections::BTreeSet::new();
        for (i, &s) in starts.iter().enumerate() {
            let id = i as RobotId;
            world
                .place_robot(id, s)
                .map_err(|_| ConfigError::DuplicateStart(s))?;
            visited_pairs.insert((id, s));
            robots.push(Robot::new(id, s));
        }
        Ok(Sim {
            cfg,
            world,
            field: PheromoneField::new(cfg.width, cfg.height, cfg.pheromone),
            medium: Medium::new(cfg.protocol.r_t, cfg.protocol.loss_prob),
            robots,
            events: Vec::new(),
            tasks: Vec::new(),
            task_index: BTreeMap::new(),
            active_coordinator: BTreeMap::new(),
            disarm_remaining: BTreeMap::new(),
            visited_pairs,
            mine_teams: Vec::new(),
            arrival_timeout: cfg.arrival_timeout(),
        })
    }

    fn positions(&self) -> BTreeMap<RobotId, CellCoord> {
        self.robots.iter().map(|r| (r.id, r.pos)).collect()
    }

    fn set_state(&mut self, idx: usize, to: RobotState, step: u64) {
        let from = self.robots[idx].state;
        if from == to {
            return;
        }
        debug_assert!(
            Robot::transition_allowed(from, to),
            "illegal transition {from:?} -> {to:?}"
        );
        self.robots[idx].state = to;
        self.events.push(Event::State {
            step,
            robot: self.robots[idx].id,
            from,
            to,
        });
    }

    fn log_send(&mut self, step: u64, pkt: &Packet, sender: RobotId, receiver: Option<RobotId>) {
        self.events.push(Event::Send {
            step,
            kind: pkt.kind,
            sender,
            receiver,
            coordinator: pkt.coordinator,
            task_id: pkt.task_id,
        });
    }

    fn broadcast(&mut self, step: u64, idx: usize, pkt: Packet) {
        let sender = self.robots[idx].id;
        let pos = self.robots[idx].pos;
        self.log_send(step, &pkt, sender, None);
        self.medium.broadcast(sender, pos, pkt, step);
    }

    /// Unicast guarded by the sender's neighbor table; silently drops on an
    /// unknown receiver (broken reverse path).
    fn unicast(&mut self, step: u64, idx: usize, to: RobotId, pkt: Packet) -> bool {
        if !self.robots[idx].neighbors.contains(to) {
            return false;
        }
        let sender = self.robots[idx].id;
        let pos = self.robots[idx].pos;
        self.log_send(step, &pkt, sender, Some(to));
        self.medium.unicast(sender, pos, to, pkt, step).is_ok()
    }

    /// Detection pass for initial placements: a robot starting on a Hidden
    /// mine coordinates it from step 0.
    fn initial_detections(&mut self) {
        if self.cfg.mode == Mode::Oe {
            // detections are still recorded in exploration-only runs
            for idx in 0..self.robots.len() {
                let pos = self.robots[idx].pos;
                if let Some(mine) = self.world.detect_mine(pos) {
                    let robot = self.robots[idx].id;
                    self.events.push(Event::Detect { step: 0, robot, mine });
                }
            }
            return;
        }
        for idx in 0..self.robots.len() {
            let pos = self.robots[idx].pos;
            if let Some(mine) = self.world.detect_mine(pos) {
                let robot = self.robots[idx].id;
                self.events.push(Event::Detect { step: 0, robot, mine });
                self.become_coordinator(idx, mine, 0);
            }
        }
    }

    fn step(&mut self, step: u64) {
        if self.cfg.mode == Mode::Erp {
            self.deliver_and_handle(step);
            self.tick_coordinators(step);
            self.emit_hellos(step);
        }
        self.deposit_phase(step);
        self.move_phase(step);
        self.detection_phase(step);
        self.team_phase(step);
        self.disarm_phase(step);
    }

    // ---- phase 1 + 2: packet delivery and handling -------------------------

    fn deliver_and_handle(&mut self, step: u64) {
        let positions = self.positions();
        let mut loss_rng = substream(self.cfg.seed, Stream::Loss, 0, step);
        let (deliveries, _drops) = self.medium.deliver(step, &positions, &mut loss_rng);
        // group per receiver, preserving arrival order
        let mut per_robot: BTreeMap<RobotId, Vec<Delivery>> = BTreeMap::new();
        for d in deliveries {
            per_robot.entry(d.to).or_default().push(d);
        }
        for idx in 0..self.robots.len() {
            let id = self.robots[idx].id;
            let Some(batch) = per_robot.remove(&id) else {
                continue;
            };
            for d in batch {
                self.robots[idx].neighbors.refresh(d.from, step);
                self.handle_packet(idx, d, step);
            }
        }
        // expire stale neighbor entries
        let timeout = self.cfg.protocol.hello_timeout * self.cfg.protocol.hello_period;
        for r in &mut self.robots {
            r.neighbors.expire(step, timeout);
        }
    }

    fn handle_packet(&mut self, idx: usize, d: Delivery, step: u64) {
        match d.packet.kind {
            PacketKind::Hello => {}
            PacketKind::RtFant => self.handle_rt_fant(idx, d, step),
            PacketKind::RtBant => self.handle_bant(idx, d, step),
            PacketKind::RFant => self.handle_r_fant(idx, d, step),
            PacketKind::RBant => self.handle_bant(idx, d, step),
            PacketKind::Lp => self.handle_lp(idx, d, step),
        }
    }

    fn handle_rt_fant(&mut self, idx: usize, d: Delivery, step: u64) {
        let pkt = d.packet;
        let me = self.robots[idx].id;
        if pkt.coordinator == me {
            return; // own flood echo
        }
        if !self.robots[idx].mem.seen.insert(pkt.fant_key()) {
            return; // duplicate
        }
        let row = RowKey {
            coordinator: pkt.coordinator,
            task_id: pkt.task_id,
            task_type: pkt.task_type,
        };
        let neighbor_ids: Vec<RobotId> = self.robots[idx].neighbors.ids().collect();
        self.robots[idx].mem.routing.ensure_row(row, neighbor_ids);
        let stats = self.robots[idx].mem.stats_mut(pkt.task_key());
        stats.fants_seen += 1;
        let p_reply = stats.reply_probability();
        if self.robots[idx].state == RobotState::Forager {
            let mut rng = substream(self.cfg.seed, Stream::Reply, me as u64, step);
            if rng.gen::<f64>() < p_reply {
                let dist = self.robots[idx].pos.dist(pkt.target_cell);
                let mut route: Vec<RobotId> = pkt.crossed_path.clone();
                route.reverse();
                let bant = Packet {
                    kind: PacketKind::RtBant,
                    coordinator: pkt.coordinator,
                    task_id: pkt.task_id,
                    fant_id: pkt.fant_id,
                    task_type: pkt.task_type,
                    path_degree: link_quality(dist),
                    crossed_path: route.clone(),
                    hop: 0,
                    target_cell: pkt.target_cell,
                    needed_robots: 0,
                    origin: me,
                };
                if self.unicast(step, idx, route[0], bant) {
                    self.robots[idx].mem.stats_mut(pkt.task_key()).bants_sent += 1;
                }
            }
        }
        // rebroadcast regardless of reply, with ourselves appended
        let mut fwd = pkt;
        fwd.crossed_path.push(me);
        self.broadcast(step, idx, fwd);
    }

    /// RT-BANT and R-BANT share the reverse-path walk and the routing update.
    fn handle_bant(&mut self, idx: usize, d: Delivery, step: u64) {
        let pkt = d.packet;
        let me = self.robots[idx].id;
        if pkt.crossed_path.get(pkt.hop) != Some(&me) {
            return; // stale or misrouted
        }
        let row = RowKey {
            coordinator: pkt.coordinator,
            task_id: pkt.task_id,
            task_type: pkt.task_type,
        };
        self.robots[idx].mem.routing.update(
            row,
            d.from,
            pkt.path_degree,
            self.cfg.protocol.gamma_e,
            self.cfg.protocol.gamma_r,
        );
        if me == pkt.coordinator {
            // consume
            if let Some(state) = self.robots[idx].coord.as_mut() {
                if state.task_id == pkt.task_id {
                    match pkt.kind {
                        PacketKind::RtBant => {
                            let dist = 1.0 / pkt.path_degree - 1.0;
                            state.replies.entry(pkt.origin).or_insert(dist);
                        }
                        PacketKind::RBant => {
                            state.confirmed.insert(pkt.origin);
                        }
                        _ => {}
                    }
                }
            }
            return;
        }
        let next_hop = pkt.hop + 1;
        if next_hop < pkt.crossed_path.len() {
            let to = pkt.crossed_path[next_hop];
            let mut fwd = pkt;
            fwd.hop = next_hop;
            self.unicast(step, idx, to, fwd);
        }
    }

    fn handle_r_fant(&mut self, idx: usize, d: Delivery, step: u64) {
        let mut pkt = d.packet;
        let me = self.robots[idx].id;
        if !self.robots[idx].mem.seen.insert(pkt.fant_key()) {
            return;
        }
        pkt.crossed_path.push(me);
        let my_dist = self.robots[idx].pos.dist(pkt.target_cell);
        let accept = match self.robots[idx].state {
            RobotState::Forager => true,
            RobotState::Recruited => {
                // serve the nearer target
                let cur = self.robots[idx]
                    .task
                    .map(|t| self.robots[idx].pos.dist(t.target))
                    .unwrap_or(f64::INFINITY);
                my_dist < cur
            }
            _ => false,
        };
        let mut remaining = pkt.needed_robots;
        if accept {
            if self.robots[idx].state == RobotState::Forager {
                self.set_state(idx, RobotState::Recruited, step);
            }
            self.robots[idx].task = Some(CurrentTask {
                coordinator: pkt.coordinator,
                task_id: pkt.task_id,
                target: pkt.target_cell,
            });
            self.robots[idx].recruit_t_start = step;
            self.robots[idx].recruit_initial_dist = my_dist;
            self.events.push(Event::Recruit {
                step,
                robot: me,
                coordinator: pkt.coordinator,
                task_id: pkt.task_id,
            });
            if let Some(&ti) = self.task_index.get(&(pkt.coordinator, pkt.task_id)) {
                self.tasks[ti].recruits.push(RecruitRecord {
                    robot: me,
                    t_start: step,
                    t_end: None,
                });
            }
            remaining = remaining.saturating_sub(1);
            // recruitment confirmation back along the reversed path
            let mut route: Vec<RobotId> = pkt.crossed_path[..pkt.crossed_path.len() - 1].to_vec();
            route.reverse();
            if !route.is_empty() {
                let bant = Packet {
                    kind: PacketKind::RBant,
                    coordinator: pkt.coordinator,
                    task_id: pkt.task_id,
                    fant_id: pkt.fant_id,
                    task_type: pkt.task_type,
                    path_degree: link_quality(my_dist),
                    crossed_path: route.clone(),
                    hop: 0,
                    target_cell: pkt.target_cell,
                    needed_robots: 0,
                    origin: me,
                };
                self.unicast(step, idx, route[0], bant);
            }
        }
        if remaining > 0 {
            // forward a new R-FANT on our best link, avoiding already-crossed
            // robots and the arrival link
            let row = RowKey {
                coordinator: pkt.coordinator,
                task_id: pkt.task_id,
                task_type: pkt.task_type,
            };
            let neighbor_ids: Vec<RobotId> = self.robots[idx].neighbors.ids().collect();
            self.robots[idx].mem.routing.ensure_row(row, neighbor_ids);
            let link = self.best_uncrossed_link(idx, &row, &pkt.crossed_path, d.from, step);
            if let Some(to) = link {
                let fwd = Packet {
                    fant_id: pkt.fant_id + 1,
                    needed_robots: remaining,
                    ..pkt
                };
                self.unicast(step, idx, to, fwd);
            }
        }
    }

    /// Highest-probability link that is neither the arrival link nor already
    /// on the crossed path. Only links heard from in the previous step count:
    /// older entries are usually robots that moved out of range, and a
    /// recruitment chain dies on the first lost hop.
    fn best_uncrossed_link(
        &self,
        idx: usize,
        row: &RowKey,
        crossed: &[RobotId],
        arrival: RobotId,
        step: u64,
    ) -> Option<RobotId> {
        let table = self.robots[idx].mem.routing.row(row)?;
        let mut best: Option<(RobotId, f64)> = None;
        for (&id, &p) in table {
            if id == arrival || crossed.contains(&id) {
                continue;
            }
            match self.robots[idx].neighbors.heard_at(id) {
                Some(last) if last + 1 >= step => {}
                _ => continue,
            }
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((id, p)),
            }
        }
        best.map(|(id, _)| id)
    }

    fn handle_lp(&mut self, idx: usize, d: Delivery, step: u64) {
        let pkt = d.packet;
        if !self.robots[idx].mem.seen.insert(pkt.fant_key()) {
            return;
        }
        if self.robots[idx].state == RobotState::Recruited {
            if let Some(task) = self.robots[idx].task {
                if task.coordinator == pkt.coordinator && task.task_id == pkt.task_id {
                    self.robots[idx].task = None;
                    self.set_state(idx, RobotState::Forager, step);
                }
            }
        }
        self.broadcast(step, idx, pkt); // flood onwards
    }

    // ---- phase 2b: coordinator timers --------------------------------------

    fn tick_coordinators(&mut self, step: u64) {
        for idx in 0..self.robots.len() {
            if self.robots[idx].state != RobotState::Coordinator {
                continue;
            }
            let Some(state) = self.robots[idx].coord.clone() else {
                continue;
            };
            match state.phase {
                CoordPhase::Requesting => {
                    if state.timer > 1 {
                        self.robots[idx].coord.as_mut().unwrap().timer -= 1;
                        continue;
                    }
                    self.coordinator_timeout(idx, step);
                }
                CoordPhase::Waiting => {
                    // once every confirmed recruit has arrived (or none ever
                    // confirmed), waiting longer is pointless; give the
                    // confirmations reply_wait steps to trickle back first
                    let outstanding = state.confirmed.difference(&state.arrived).count();
                    let waited = self.arrival_timeout.saturating_sub(state.timer);
                    if state.timer <= 1
                        || (outstanding == 0 && waited >= self.cfg.protocol.reply_wait)
                    {
                        self.arrival_timeout_expired(idx, step);
                        continue;
                    }
                    self.robots[idx].coord.as_mut().unwrap().timer -= 1;
                }
                CoordPhase::Recruiting | CoordPhase::Disarming => {}
            }
        }
    }

    fn needed_recruits(&self) -> u32 {
        if self.cfg.protocol.coordinator_counts {
            self.cfg.protocol.r_min - 1
        } else {
            self.cfg.protocol.r_min
        }
    }

    fn coordinator_timeout(&mut self, idx: usize, step: u64) {
        let state = self.robots[idx].coord.as_ref().unwrap();
        let replies = state.replies.len();
        let task_id = state.task_id;
        let mine = state.mine;
        // seats actually still open, not the initial team size: part of the
        // team may already be waiting at the mine
        let assigned = self.world.mine(mine).assigned.len() as u32;
        let needed = self.cfg.protocol.r_min.saturating_sub(assigned) as usize;
        if replies == 0 {
            let empty = self.robots[idx].coord.as_ref().unwrap().empty_rounds + 1;
            if empty >= self.cfg.protocol.abandon_rounds {
                // nobody reachable for several rounds: give up and disband,
                // leaving the mine Detected for later rediscovery; waiting
                // team members are released too, or they would idle there
                // forever
                self.events.push(Event::TaskAbandon {
                    step,
                    coordinator: self.robots[idx].id,
                    task_id,
                });
                self.active_coordinator.remove(&mine);
                let me = self.robots[idx].id;
                let team: Vec<RobotId> =
                    self.world.mine(mine).assigned.iter().copied().collect();
                for &member in &team {
                    let i = member as usize;
                    if member != me && self.robots[i].state == RobotState::Waiting {
                        self.robots[i].joined_mine = None;
                        self.set_state(i, RobotState::Forager, step);
                    }
                }
                self.world.mine_mut(mine).assigned.clear();
                self.robots[idx].coord = None;
                self.set_state(idx, RobotState::Forager, step);
                return;
            }
            self.robots[idx].coord.as_mut().unwrap().empty_rounds = empty;
        } else {
            self.robots[idx].coord.as_mut().unwrap().empty_rounds = 0;
        }
        if replies < needed {
            // partial response: re-request with a fresh FANT id
            let fant_id = self.robots[idx].mem.fresh_fant_id();
            let target = self.robots[idx].coord.as_ref().unwrap().target;
            let me = self.robots[idx].id;
            let pkt = Packet::rt_fant(me, task_id, fant_id, target, needed as u32);
            {
                let st = self.robots[idx].coord.as_mut().unwrap();
                st.current_fant = fant_id;
                st.timer = self.cfg.protocol.reply_wait;
            }
            self.broadcast(step, idx, pkt);
            return;
        }
        // enough replies: recruit over the strongest link
        self.send_recruitment(idx, step);
    }

    fn send_recruitment(&mut self, idx: usize, step: u64) {
        let me = self.robots[idx].id;
        let (task_id, target, mine) = {
            let st = self.robots[idx].coord.as_ref().unwrap();
            (st.task_id, st.target, st.mine)
        };
        let assigned = self.world.mine(mine).assigned.len() as u32;
        let needed = self.cfg.protocol.r_min.saturating_sub(assigned);
        let row = RowKey {
            coordinator: me,
            task_id,
            task_type: TaskType::Recruiting,
        };
        let link = self.best_uncrossed_link(idx, &row, &[me], me, step);
        match link {
            Some(to) => {
                let fant_id = self.robots[idx].mem.fresh_fant_id();
                let pkt = Packet {
                    kind: PacketKind::RFant,
                    coordinator: me,
                    task_id,
                    fant_id,
                    task_type: TaskType::Recruiting,
                    path_degree: 0.0,
                    crossed_path: vec![me],
                    hop: 0,
                    target_cell: target,
                    needed_robots: needed,
                    origin: me,
                };
                self.unicast(step, idx, to, pkt);
                let st = self.robots[idx].coord.as_mut().unwrap();
                st.phase = CoordPhase::Waiting;
                st.timer = self.arrival_timeout;
            }
            None => {
                // no usable link despite replies: fall back to re-requesting
                let fant_id = self.robots[idx].mem.fresh_fant_id();
                let pkt = Packet::rt_fant(me, task_id, fant_id, target, needed);
                let st = self.robots[idx].coord.as_mut().unwrap();
                st.current_fant = fant_id;
                st.timer = self.cfg.protocol.reply_wait;
                self.broadcast(step, idx, pkt);
            }
        }
    }

    /// Recruits did not all arrive in time: reopen the request round for the
    /// still-missing seats. The task stays the same, so stragglers remain
    /// useful and the reply throttle damps robots that already answered.
    fn arrival_timeout_expired(&mut self, idx: usize, step: u64) {
        let me = self.robots[idx].id;
        let (task_id, mine, target) = {
            let st = self.robots[idx].coord.as_ref().unwrap();
            (st.task_id, st.mine, st.target)
        };
        let assigned = self.world.mine(mine).assigned.len() as u32;
        let still_needed = self.cfg.protocol.r_min.saturating_sub(assigned);
        let fant_id = self.robots[idx].mem.fresh_fant_id();
        let pkt = Packet::rt_fant(me, task_id, fant_id, target, still_needed);
        {
            let st = self.robots[idx].coord.as_mut().unwrap();
            st.current_fant = fant_id;
            st.phase = CoordPhase::Requesting;
            st.timer = self.cfg.protocol.reply_wait;
            st.replies.clear();
            st.confirmed.clear();
        }
        self.broadcast(step, idx, pkt);
    }

    fn emit_hellos(&mut self, step: u64) {
        if step % self.cfg.protocol.hello_period != 0 {
            return;
        }
        for idx in 0..self.robots.len() {
            let me = self.robots[idx].id;
            self.broadcast(step, idx, Packet::hello(me));
        }
    }

    // ---- phases 3 + 4: deposits and field update ---------------------------

    fn deposit_phase(&mut self, step: u64) {
        let mut deposits: Vec<(FieldKind, CellCoord, RobotId)> = Vec::new();
        for r in &self.robots {
            match r.state {
                RobotState::Forager => {
                    deposits.push((FieldKind::Repellent, r.pos, r.id));
                }
                RobotState::Recruited => {
                    if self.cfg.mode == Mode::Erp && self.cfg.erp_recruited_deposit {
                        deposits.push((FieldKind::Repellent, r.pos, r.id));
                    }
                }
                RobotState::Coordinator => {
                    if self.cfg.mode == Mode::Ers {
                        deposits.push((FieldKind::Attractive, r.pos, r.id));
                    }
                }
                RobotState::Waiting | RobotState::Execution => {}
            }
        }
        self.field.evaporate();
        for &(kind, cell, robot) in &deposits {
            let mut rng = substream(self.cfg.seed, Stream::Epsilon, robot as u64, step);
            let mut draw = move || rng.gen::<f64>();
            self.field.deposit_radial_with(kind, cell, &mut draw);
            self.events.push(Event::Deposit {
                step,
                robot,
                kind,
                cell,
            });
        }
    }

    // ---- phase 5: movement --------------------------------------------------

    fn move_phase(&mut self, step: u64) {
        for idx in 0..self.robots.len() {
            match self.robots[idx].state {
                RobotState::Forager | RobotState::Recruited => {}
                _ => continue,
            }
            let me = self.robots[idx].id;
            let pos = self.robots[idx].pos;
            let candidates = self.world.neighbors(pos);
            if candidates.is_empty() {
                continue;
            }
            // stigmergy recruitment trigger: a forager smelling attractive
            // pheromone switches to following it
            if self.cfg.mode == Mode::Ers && self.robots[idx].state == RobotState::Forager {
                let smells = candidates
                    .iter()
                    .any(|&c| self.field.sense(FieldKind::Attractive, c) > self.cfg.theta_threshold);
                if smells {
                    self.set_state(idx, RobotState::Recruited, step);
                    self.robots[idx].recruit_t_start = step;
                }
            }
            // a stigmergy recruit that lost the scent goes back to exploring
            if self.cfg.mode == Mode::Ers && self.robots[idx].state == RobotState::Recruited {
                let any_theta = candidates
                    .iter()
                    .any(|&c| self.field.sense(FieldKind::Attractive, c) > self.cfg.theta_threshold)
                    || self.field.sense(FieldKind::Attractive, pos) > self.cfg.theta_threshold;
                if !any_theta {
                    self.set_state(idx, RobotState::Forager, step);
                }
            }
            // protocol recruit give-up rule
            if self.cfg.mode == Mode::Erp && self.robots[idx].state == RobotState::Recruited {
                if let Some(task) = self.robots[idx].task {
                    let d = pos.dist(task.target);
                    if d > self.cfg.protocol.abandon_factor * self.robots[idx].recruit_initial_dist
                        && self.robots[idx].recruit_initial_dist > 0.0
                    {
                        self.robots[idx].task = None;
                        self.set_state(idx, RobotState::Forager, step);
                    }
                }
            }

            let mut rng = substream(self.cfg.seed, Stream::TieBreak, me as u64, step);
            let target = match self.robots[idx].state {
                RobotState::Forager => {
                    if self.cfg.policy.random_walk {
                        candidates[rng.gen_range(0..candidates.len())]
                    } else {
                        let scores = move_scores(
                            &self.field,
                            FieldKind::Repellent,
                            &candidates,
                            &self.cfg.policy.score,
                        );
                        if self.cfg.policy.stochastic {
                            let mut srng =
                                substream(self.cfg.seed, Stream::Stochastic, me as u64, step);
                            sample_exploration_cell(&scores, &mut srng)
                        } else {
                            choose_exploration_cell(&scores, &mut rng)
                        }
                    }
                }
                RobotState::Recruited => match self.cfg.mode {
                    Mode::Ers => {
                        let scores = move_scores(
                            &self.field,
                            FieldKind::Attractive,
                            &candidates,
                            &self.cfg.policy.score,
                        );
                        choose_recruitment_cell(&scores, &mut rng)
                    }
                    Mode::Erp => {
                        let goal = self.robots[idx].task.map(|t| t.target).unwrap_or(pos);
                        let best = candidates
                            .iter()
                            .map(|&c| c.chebyshev(goal))
                            .min()
                            .unwrap();
                        let tied: Vec<CellCoord> = candidates
                            .iter()
                            .copied()
                            .filter(|&c| c.chebyshev(goal) == best)
                            .collect();
                        tied[rng.gen_range(0..tied.len())]
                    }
                    Mode::Oe => unreachable!("no recruits in exploration-only mode"),
                },
                _ => unreachable!(),
            };
            self.world.move_robot(me, pos, target);
            self.robots[idx].pos = target;
            self.visited_pairs.insert((me, target));
            self.events.push(Event::Move {
                step,
                robot: me,
                from: pos,
                to: target,
            });
        }
    }

    // ---- phase 6: detections, arrivals, team assembly ----------------------

    fn detection_phase(&mut self, step: u64) {
        for idx in 0..self.robots.len() {
            let state = self.robots[idx].state;
            if state != RobotState::Forager && state != RobotState::Recruited {
                continue;
            }
            let pos = self.robots[idx].pos;
            if let Some(mine) = self.world.detect_mine(pos) {
                let robot = self.robots[idx].id;
                self.events.push(Event::Detect { step, robot, mine });
                if self.cfg.mode != Mode::Oe {
                    self.become_coordinator(idx, mine, step);
                }
                continue;
            }
            if self.cfg.mode == Mode::Oe {
                continue;
            }
            // an abandoned (Detected, uncoordinated) mine can be re-adopted
            // by any robot stepping onto it
            let readopt = self.world.mines.iter().find(|m| {
                m.location == pos
                    && m.status == MineStatus::Detected
                    && !self.active_coordinator.contains_key(&m.id)
            });
            if let Some(mine) = readopt.map(|m| m.id) {
                self.become_coordinator(idx, mine, step);
            }
        }
        // recruit arrivals
        if self.cfg.mode != Mode::Oe {
            for idx in 0..self.robots.len() {
                if self.robots[idx].state == RobotState::Recruited {
                    self.check_arrival(idx, step);
                }
            }
        }
    }

    fn become_coordinator(&mut self, idx: usize, mine: MineId, step: u64) {
        let me = self.robots[idx].id;
        self.robots[idx].task = None;
        self.set_state(idx, RobotState::Coordinator, step);
        self.active_coordinator.insert(mine, me);
        let task_id = self.robots[idx].mem.fresh_task_id();
        let target = self.world.mine(mine).location;
        if self.cfg.protocol.coordinator_counts {
            self.world.mine_mut(mine).assigned.insert(me);
        }
        let mut state = CoordinatorState::new(task_id, mine, target, step, self.cfg.protocol.reply_wait);
        let ti = self.tasks.len();
        self.tasks.push(TaskRecord {
            coordinator: me,
            task_id,
            mine,
            t_start: step,
            t_end: None,
            recruits: Vec::new(),
        });
        self.task_index.insert((me, task_id), ti);
        self.events.push(Event::TaskStart {
            step,
            coordinator: me,
            task_id,
            mine,
        });
        if self.cfg.mode == Mode::Erp {
            let fant_id = self.robots[idx].mem.fresh_fant_id();
            state.current_fant = fant_id;
            let pkt = Packet::rt_fant(me, task_id, fant_id, target, self.needed_recruits());
            self.robots[idx].coord = Some(state);
            self.broadcast(step, idx, pkt);
        } else {
            // stigmergy mode: no packets, spray until the team assembles
            state.phase = CoordPhase::Waiting;
            state.timer = u64::MAX;
            self.robots[idx].coord = Some(state);
        }
    }

    fn check_arrival(&mut self, idx: usize, step: u64) {
        let pos = self.robots[idx].pos;
        let me = self.robots[idx].id;
        let r_min = self.cfg.protocol.r_min as usize;
        // which mine are we arriving at?
        let mine_here: Option<MineId> = match self.cfg.mode {
            Mode::Erp => {
                let Some(task) = self.robots[idx].task else {
                    self.set_state(idx, RobotState::Forager, step);
                    return;
                };
                if pos.chebyshev(task.target) > 1 {
                    return;
                }
                self.world
                    .mines
                    .iter()
                    .find(|m| m.location == task.target)
                    .map(|m| m.id)
            }
            Mode::Ers => self
                .world
                .mines
                .iter()
                .find(|m| {
                    pos.chebyshev(m.location) <= 1
                        && self.active_coordinator.contains_key(&m.id)
                        && m.status != MineStatus::Disarmed
                })
                .map(|m| m.id),
            Mode::Oe => None,
        };
        let Some(mine) = mine_here else {
            return;
        };
        let Some(&coord_id) = self.active_coordinator.get(&mine) else {
            // nobody coordinates this mine anymore
            self.robots[idx].task = None;
            self.set_state(idx, RobotState::Forager, step);
            return;
        };
        let m = self.world.mine(mine);
        if m.status == MineStatus::Disarming || m.status == MineStatus::Disarmed {
            self.robots[idx].task = None;
            self.set_state(idx, RobotState::Forager, step);
            return;
        }
        if m.assigned.len() >= r_min {
            // surplus: the team is already full
            self.robots[idx].task = None;
            self.set_state(idx, RobotState::Forager, step);
            return;
        }
        self.world.mine_mut(mine).assigned.insert(me);
        self.robots[idx].joined_mine = Some(mine);
        self.set_state(idx, RobotState::Waiting, step);
        // T_End bookkeeping
        let coord_idx = coord_id as usize;
        let task_id = self.robots[coord_idx]
            .coord
            .as_ref()
            .map(|s| s.task_id)
            .unwrap_or(0);
        if let Some(s) = self.robots[coord_idx].coord.as_mut() {
            s.arrived.insert(me);
        }
        self.events.push(Event::Arrive {
            step,
            robot: me,
            coordinator: coord_id,
            task_id,
        });
        let t_start = self.robots[idx].recruit_t_start;
        if let Some(&ti) = self.task_index.get(&(coord_id, task_id)) {
            let rec = self.tasks[ti].recruits.iter_mut().find(|r| r.robot == me);
            match rec {
                Some(r) => r.t_end = Some(step),
                None => self.tasks[ti].recruits.push(RecruitRecord {
                    robot: me,
                    t_start,
                    t_end: Some(step),
                }),
            }
        }
        self.robots[idx].task = None;
    }

    fn team_phase(&mut self, step: u64) {
        let r_min = self.cfg.protocol.r_min as usize;
        let mines: Vec<MineId> = self.active_coordinator.keys().copied().collect();
        for mine in mines {
            let status = self.world.mine(mine).status;
            if status != MineStatus::Detected {
                continue;
            }
            if self.world.mine(mine).assigned.len() < r_min {
                continue;
            }
            // team complete: start disarming
            let coord_id = self.active_coordinator[&mine];
            self.world.set_mine_status(mine, MineStatus::Disarming);
            self.disarm_remaining.insert(mine, self.cfg.protocol.disarm_time);
            let team: Vec<RobotId> = self.world.mine(mine).assigned.iter().copied().collect();
            for &member in &team {
                let idx = member as usize;
                match self.robots[idx].state {
                    RobotState::Waiting | RobotState::Coordinator => {
                        self.set_state(idx, RobotState::Execution, step);
                    }
                    _ => {}
                }
            }
            let coord_idx = coord_id as usize;
            if let Some(s) = self.robots[coord_idx].coord.as_mut() {
                s.phase = CoordPhase::Disarming;
            }
            // release anyone still traveling toward this task
            if self.cfg.mode == Mode::Erp {
                let task_id = self.robots[coord_idx]
                    .coord
                    .as_ref()
                    .map(|s| s.task_id)
                    .unwrap_or(0);
                let lp_fant = self.robots[coord_idx].mem.fresh_fant_id();
                let lp = Packet {
                    kind: PacketKind::Lp,
                    coordinator: coord_id,
                    task_id,
                    fant_id: lp_fant,
                    ..Packet::hello(coord_id)
                };
                self.broadcast(step, coord_idx, lp);
            }
        }
    }

    fn disarm_phase(&mut self, step: u64) {
        let mines: Vec<MineId> = self.disarm_remaining.keys().copied().collect();
        for mine in mines {
            let left = self.disarm_remaining.get_mut(&mine).unwrap();
            *left -= 1;
            if *left > 0 {
                continue;
            }
            self.disarm_remaining.remove(&mine);
            self.world.set_mine_status(mine, MineStatus::Disarmed);
            self.events.push(Event::Disarm { step, mine });
            let team: Vec<RobotId> = self.world.mine(mine).assigned.iter().copied().collect();
            self.mine_teams.push((mine, team.len() as u32));
            let coord_id = self.active_coordinator.remove(&mine);
            for &member in &team {
                let idx = member as usize;
                if self.robots[idx].state == RobotState::Execution {
                    self.set_state(idx, RobotState::Forager, step);
                }
                self.robots[idx].joined_mine = None;
                self.robots[idx].task = None;
            }
            if let Some(cid) = coord_id {
                let cidx = cid as usize;
                let task_id = self.robots[cidx].coord.as_ref().map(|s| s.task_id);
                if let Some(tid) = task_id {
                    // close every record of this coordinator for this mine
                    for t in self.tasks.iter_mut() {
                        if t.coordinator == cid && t.mine == mine && t.t_end.is_none() {
                            t.t_end = Some(step);
                        }
                    }
                    for &member in &team {
                        let idx = member as usize;
                        self.robots[idx].mem.seen.purge_task(cid, tid);
                        self.robots[idx].mem.routing.purge_task(cid, tid);
                    }
                }
                self.robots[cidx].coord = None;
            }
        }
    }

    fn terminated(&self) -> bool {
        if self.world.coverage() < 1.0 {
            return false;
        }
        if self.cfg.mode == Mode::Oe {
            return true;
        }
        self.world
            .mines
            .iter()
            .all(|m| m.status == MineStatus::Disarmed)
    }

    fn finish(self, total_steps: u64, capped: bool) -> RunLog {
        RunLog {
            mode: self.cfg.mode,
            seed: self.cfg.seed,
            width: self.cfg.width,
            height: self.cfg.height,
            robot_count: self.cfg.robot_count,
            mine_count: self.cfg.mines.len() as u32,
            coverage: self.world.coverage(),
            visited_pairs: self.visited_pairs.len() as u64,
            visit_counts: self.world.visit_counts().clone(),
            packet_counts: self.medium.sent_count.clone(),
            mines_disarmed: self
                .world
                .mines
                .iter()
                .filter(|m| m.status == MineStatus::Disarmed)
                .count() as u32,
            mine_teams: self.mine_teams,
            tasks: self.tasks,
            events: self.events,
            total_steps,
            capped,
        }
    }
}

fn random_placement(cfg: &SimConfig, world: &GridWorld) -> Vec<CellCoord> {
    let mut free: Vec<CellCoord> = Vec::new();
    for y in 0..cfg.height as i32 {
        for x in 0..cfg.width as i32 {
            let c = CellCoord::new(x, y);
            if !world.is_obstacle(c) && !cfg.mines.contains(&c) {
                free.push(c);
            }
        }
    }
    let mut rng = substream(cfg.seed, Stream::Placement, 0, 0);
    let mut starts = Vec::with_capacity(cfg.robot_count as usize);
    for _ in 0..cfg.robot_count {
        let i = rng.gen_range(0..free.len());
        starts.push(free.swap_remove(i));
    }
    starts
}
