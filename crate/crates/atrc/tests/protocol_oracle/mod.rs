//! Independent replay of the recruitment protocol for small instances.
//!
//! Consumes only the simulator's configuration and per-step position trace
//! (Move events), then re-derives every packet transmission from scratch:
//! neighbor discovery, flood forwarding, reply throttling, routing table
//! reinforcement, coordinator timers, team assembly and release. The output
//! is the exact ordered send sequence the simulator should have produced.
//!
//! Shares only the seeded RNG plumbing with the crate under test; all
//! protocol state machines are re-implemented here.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use atrc::engine::{Event, Mode, RunLog, SimConfig};
use atrc::protocol::PacketKind;
use atrc::rng::{substream, Stream};
use atrc::world::{CellCoord, RobotId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Send {
    pub step: u64,
    pub kind: PacketKind,
    pub sender: RobotId,
    pub receiver: Option<RobotId>,
    pub coordinator: RobotId,
    pub task_id: u32,
}

#[derive(Clone, Debug)]
struct OPacket {
    kind: PacketKind,
    coordinator: RobotId,
    task_id: u32,
    fant_id: u32,
    path_degree: f64,
    crossed_path: Vec<RobotId>,
    hop: usize,
    target: CellCoord,
    needed: u32,
    origin: RobotId,
}

#[derive(Clone, Debug)]
struct InFlight {
    pkt: OPacket,
    sender: RobotId,
    sender_pos: CellCoord,
    receiver: Option<RobotId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum St {
    Forager,
    Coordinator,
    Recruited,
    Waiting,
    Execution,
}

#[derive(Clone, Debug)]
struct OCoord {
    task_id: u32,
    target: CellCoord,
    /// 0 = requesting replies, 1 = waiting for arrivals, 2 = disarming.
    phase: u8,
    timer: u64,
    replies: BTreeMap<RobotId, f64>,
    confirmed: BTreeSet<RobotId>,
    arrived: BTreeSet<RobotId>,
    empty_rounds: u32,
}

#[derive(Clone, Debug)]
struct ORobot {
    pos: CellCoord,
    neighbors: BTreeMap<RobotId, u64>,
    seen: BTreeSet<(PacketKind, RobotId, u32, u32)>,
    routing: BTreeMap<(RobotId, u32), BTreeMap<RobotId, f64>>,
    stats: BTreeMap<(RobotId, u32), (u32, u32)>,
    next_task: u32,
    next_fant: u32,
    task: Option<(RobotId, u32, CellCoord)>,
    initial_dist: f64,
}

struct Oracle {
    seed: u64,
    rt: f64,
    r_min: usize,
    reply_wait: u64,
    arrival_timeout: u64,
    abandon_rounds: u32,
    disarm_time: u32,
    mine_loc: CellCoord,
    robots: Vec<ORobot>,
    states: Vec<St>,
    coords: Vec<Option<OCoord>>,
    queue: Vec<InFlight>,
    mine_detected: bool,
    mine_status: u8, // 0 hidden, 1 detected, 2 disarming, 3 disarmed
    assigned: BTreeSet<RobotId>,
    active_coord: Option<RobotId>,
    disarm_left: u32,
    trace: Vec<Send>,
}

pub fn replay(cfg: &SimConfig, log: &RunLog) -> Vec<Send> {
    assert_eq!(cfg.mode, Mode::Erp);
    assert_eq!(cfg.mines.len(), 1, "oracle handles single-mine scenarios");
    assert!(cfg.protocol.coordinator_counts);
    assert_eq!(cfg.protocol.loss_prob, 0.0);
    assert_eq!(cfg.protocol.hello_period, 1);

    let n = cfg.robot_count as usize;
    let mut o = Oracle {
        seed: cfg.seed,
        rt: cfg.protocol.r_t,
        r_min: cfg.protocol.r_min as usize,
        reply_wait: cfg.protocol.reply_wait,
        arrival_timeout: cfg.arrival_timeout(),
        abandon_rounds: cfg.protocol.abandon_rounds,
        disarm_time: cfg.protocol.disarm_time,
        mine_loc: cfg.mines[0],
        robots: (0..n)
            .map(|i| ORobot {
                pos: cfg.robot_starts[i],
                neighbors: BTreeMap::new(),
                seen: BTreeSet::new(),
                routing: BTreeMap::new(),
                stats: BTreeMap::new(),
                next_task: 0,
                next_fant: 0,
                task: None,
                initial_dist: 0.0,
            })
            .collect(),
        states: vec![St::Forager; n],
        coords: vec![None; n],
        queue: Vec::new(),
        mine_detected: false,
        mine_status: 0,
        assigned: BTreeSet::new(),
        active_coord: None,
        disarm_left: 0,
        trace: Vec::new(),
    };

    // moves grouped by step, in event order
    let mut moves: BTreeMap<u64, Vec<(RobotId, CellCoord)>> = BTreeMap::new();
    for e in &log.events {
        if let Event::Move { step, robot, to, .. } = e {
            moves.entry(*step).or_default().push((*robot, *to));
        }
    }

    // initial detection pass
    for i in 0..n {
        if o.robots[i].pos == o.mine_loc && o.mine_status == 0 {
            o.mine_status = 1;
            o.mine_detected = true;
            o.become_coordinator(i, 0);
        }
    }

    for step in 1..=log.total_steps {
        o.deliver_and_handle(step);
        o.tick_coordinators(step);
        o.emit_hellos(step);
        o.apply_moves(step, moves.get(&step).map(|v| v.as_slice()).unwrap_or(&[]));
        o.detections_and_arrivals(step);
        o.team_phase(step);
        o.disarm_phase(step);
    }
    o.trace
}

impl Oracle {
    fn log(&mut self, s: Send) {
        self.trace.push(s);
    }

    fn broadcast(&mut self, step: u64, sender: usize, pkt: OPacket) {
        self.log(Send {
            step,
            kind: pkt.kind,
            sender: sender as RobotId,
            receiver: None,
            coordinator: pkt.coordinator,
            task_id: pkt.task_id,
        });
        self.queue.push(InFlight {
            sender: sender as RobotId,
            sender_pos: self.robots[sender].pos,
            receiver: None,
            pkt,
        });
    }

    /// Guarded like the simulator: silently dropped when the receiver is not
    /// in the sender's neighbor table.
    fn unicast(&mut self, step: u64, sender: usize, to: RobotId, pkt: OPacket) -> bool {
        if !self.robots[sender].neighbors.contains_key(&to) {
            return false;
        }
        self.log(Send {
            step,
            kind: pkt.kind,
            sender: sender as RobotId,
            receiver: Some(to),
            coordinator: pkt.coordinator,
            task_id: pkt.task_id,
        });
        self.queue.push(InFlight {
            sender: sender as RobotId,
            sender_pos: self.robots[sender].pos,
            receiver: Some(to),
            pkt,
        });
        true
    }

    fn needed_recruits(&self) -> u32 {
        self.r_min as u32 - 1
    }

    fn become_coordinator(&mut self, i: usize, step: u64) {
        self.states[i] = St::Coordinator;
        self.robots[i].task = None;
        self.active_coord = Some(i as RobotId);
        self.assigned.insert(i as RobotId);
        let task_id = self.robots[i].next_task;
        self.robots[i].next_task += 1;
        let fant_id = self.robots[i].next_fant;
        self.robots[i].next_fant += 1;
        self.coords[i] = Some(OCoord {
            task_id,
            target: self.mine_loc,
            phase: 0,
            timer: self.reply_wait,
            replies: BTreeMap::new(),
            confirmed: BTreeSet::new(),
            arrived: BTreeSet::new(),
            empty_rounds: 0,
        });
        let pkt = OPacket {
            kind: PacketKind::RtFant,
            coordinator: i as RobotId,
            task_id,
            fant_id,
            path_degree: 0.0,
            crossed_path: vec![i as RobotId],
            hop: 0,
            target: self.mine_loc,
            needed: self.needed_recruits(),
            origin: i as RobotId,
        };
        self.broadcast(step, i, pkt);
    }

    fn deliver_and_handle(&mut self, step: u64) {
        let queue = std::mem::take(&mut self.queue);
        let mut per_robot: BTreeMap<RobotId, Vec<(RobotId, OPacket)>> = BTreeMap::new();
        for msg in queue {
            match msg.receiver {
                Some(rx) => {
                    if self.robots[rx as usize].pos.dist(msg.sender_pos) <= self.rt {
                        per_robot.entry(rx).or_default().push((msg.sender, msg.pkt));
                    }
                }
                None => {
                    for rx in 0..self.robots.len() as RobotId {
                        if rx == msg.sender {
                            continue;
                        }
                        if self.robots[rx as usize].pos.dist(msg.sender_pos) <= self.rt {
                            per_robot
                                .entry(rx)
                                .or_default()
                                .push((msg.sender, msg.pkt.clone()));
                        }
                    }
                }
            }
        }
        for rx in 0..self.robots.len() {
            let Some(batch) = per_robot.remove(&(rx as RobotId)) else {
                continue;
            };
            for (from, pkt) in batch {
                self.robots[rx].neighbors.insert(from, step);
                match pkt.kind {
                    PacketKind::Hello => {}
                    PacketKind::RtFant => self.handle_rt_fant(rx, from, pkt, step),
                    PacketKind::RtBant | PacketKind::RBant => {
                        self.handle_bant(rx, from, pkt, step)
                    }
                    PacketKind::RFant => self.handle_r_fant(rx, from, pkt, step),
                    PacketKind::Lp => self.handle_lp(rx, pkt, step),
                }
            }
        }
        for r in &mut self.robots {
            r.neighbors.retain(|_, last| *last + 3 >= step);
        }
    }

    fn ensure_row(&mut self, i: usize, key: (RobotId, u32)) {
        let ids: Vec<RobotId> = self.robots[i].neighbors.keys().copied().collect();
        self.robots[i].routing.entry(key).or_insert_with(|| {
            if ids.is_empty() {
                BTreeMap::new()
            } else {
                let p = 1.0 / ids.len() as f64;
                ids.into_iter().map(|id| (id, p)).collect()
            }
        });
    }

    fn routing_update(&mut self, i: usize, key: (RobotId, u32), link: RobotId, q: f64) {
        let row = self.robots[i].routing.entry(key).or_default();
        row.entry(link).or_insert(0.0);
        for p in row.values_mut() {
            *p *= 0.9;
        }
        *row.get_mut(&link).unwrap() += 0.3 * q;
        let total: f64 = row.values().sum();
        if total > 0.0 {
            for p in row.values_mut() {
                *p /= total;
            }
        }
    }

    /// Best link of the row that is a live neighbor, not the arrival link and
    /// not already crossed. Ties go to the lowest id.
    fn best_link(
        &self,
        i: usize,
        key: (RobotId, u32),
        crossed: &[RobotId],
        arrival: RobotId,
        step: u64,
    ) -> Option<RobotId> {
        let row = self.robots[i].routing.get(&key)?;
        let mut best: Option<(RobotId, f64)> = None;
        for (&id, &p) in row {
            if id == arrival || crossed.contains(&id) {
                continue;
            }
            match self.robots[i].neighbors.get(&id) {
                Some(&last) if last + 1 >= step => {}
                _ => continue,
            }
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((id, p)),
            }
        }
        best.map(|(id, _)| id)
    }

    fn handle_rt_fant(&mut self, i: usize, _from: RobotId, pkt: OPacket, step: u64) {
        let me = i as RobotId;
        if pkt.coordinator == me {
            return;
        }
        if !self.robots[i]
            .seen
            .insert((PacketKind::RtFant, pkt.coordinator, pkt.task_id, pkt.fant_id))
        {
            return;
        }
        let key = (pkt.coordinator, pkt.task_id);
        self.ensure_row(i, key);
        let stats = self.robots[i].stats.entry(key).or_insert((0, 0));
        stats.0 += 1;
        let p_reply = (1.0 - stats.1 as f64 / stats.0 as f64).clamp(0.0, 1.0);
        if self.states[i] == St::Forager {
            let mut rng = substream(self.seed, Stream::Reply, me as u64, step);
            if rng.gen::<f64>() < p_reply {
                let dist = self.robots[i].pos.dist(pkt.target);
                let mut route = pkt.crossed_path.clone();
                route.reverse();
                let bant = OPacket {
                    kind: PacketKind::RtBant,
                    coordinator: pkt.coordinator,
                    task_id: pkt.task_id,
                    fant_id: pkt.fant_id,
                    path_degree: 1.0 / (1.0 + dist),
                    crossed_path: route.clone(),
                    hop: 0,
                    target: pkt.target,
                    needed: 0,
                    origin: me,
                };
                if self.unicast(step, i, route[0], bant) {
                    self.robots[i].stats.get_mut(&key).unwrap().1 += 1;
                }
            }
        }
        let mut fwd = pkt;
        fwd.crossed_path.push(me);
        self.broadcast(step, i, fwd);
    }

    fn handle_bant(&mut self, i: usize, from: RobotId, pkt: OPacket, step: u64) {
        let me = i as RobotId;
        if pkt.crossed_path.get(pkt.hop) != Some(&me) {
            return;
        }
        let key = (pkt.coordinator, pkt.task_id);
        self.routing_update(i, key, from, pkt.path_degree);
        if me == pkt.coordinator {
            if let Some(coord) = self.coords[i].as_mut() {
                if coord.task_id == pkt.task_id {
                    match pkt.kind {
                        PacketKind::RtBant => {
                            let dist = 1.0 / pkt.path_degree - 1.0;
                            coord.replies.entry(pkt.origin).or_insert(dist);
                        }
                        PacketKind::RBant => {
                            coord.confirmed.insert(pkt.origin);
                        }
                        _ => {}
                    }
                }
            }
            return;
        }
        let next = pkt.hop + 1;
        if next < pkt.crossed_path.len() {
            let to = pkt.crossed_path[next];
            let mut fwd = pkt;
            fwd.hop = next;
            self.unicast(step, i, to, fwd);
        }
    }

    fn handle_r_fant(&mut self, i: usize, from: RobotId, pkt: OPacket, step: u64) {
        let me = i as RobotId;
        if !self.robots[i]
            .seen
            .insert((PacketKind::RFant, pkt.coordinator, pkt.task_id, pkt.fant_id))
        {
            return;
        }
        let mut pkt = pkt;
        pkt.crossed_path.push(me);
        let my_dist = self.robots[i].pos.dist(pkt.target);
        let accept = match self.states[i] {
            St::Forager => true,
            St::Recruited => {
                let cur = self.robots[i]
                    .task
                    .map(|(_, _, t)| self.robots[i].pos.dist(t))
                    .unwrap_or(f64::INFINITY);
                my_dist < cur
            }
            _ => false,
        };
        let mut remaining = pkt.needed;
        if accept {
            self.states[i] = St::Recruited;
            self.robots[i].task = Some((pkt.coordinator, pkt.task_id, pkt.target));
            self.robots[i].initial_dist = my_dist;
            remaining = remaining.saturating_sub(1);
            let mut route: Vec<RobotId> = pkt.crossed_path[..pkt.crossed_path.len() - 1].to_vec();
            route.reverse();
            if !route.is_empty() {
                let bant = OPacket {
                    kind: PacketKind::RBant,
                    coordinator: pkt.coordinator,
                    task_id: pkt.task_id,
                    fant_id: pkt.fant_id,
                    path_degree: 1.0 / (1.0 + my_dist),
                    crossed_path: route.clone(),
                    hop: 0,
                    target: pkt.target,
                    needed: 0,
                    origin: me,
                };
                self.unicast(step, i, route[0], bant);
            }
        }
        if remaining > 0 {
            let key = (pkt.coordinator, pkt.task_id);
            self.ensure_row(i, key);
            if let Some(to) = self.best_link(i, key, &pkt.crossed_path, from, step) {
                let mut fwd = pkt;
                fwd.fant_id += 1;
                fwd.needed = remaining;
                self.unicast(step, i, to, fwd);
            }
        }
    }

    fn handle_lp(&mut self, i: usize, pkt: OPacket, step: u64) {
        if !self.robots[i]
            .seen
            .insert((PacketKind::Lp, pkt.coordinator, pkt.task_id, pkt.fant_id))
        {
            return;
        }
        if self.states[i] == St::Recruited {
            if let Some((coord, task, _)) = self.robots[i].task {
                if coord == pkt.coordinator && task == pkt.task_id {
                    self.robots[i].task = None;
                    self.states[i] = St::Forager;
                }
            }
        }
        self.broadcast(step, i, pkt);
    }

    fn tick_coordinators(&mut self, step: u64) {
        for i in 0..self.robots.len() {
            if self.states[i] != St::Coordinator {
                continue;
            }
            let Some(coord) = self.coords[i].clone() else {
                continue;
            };
            match coord.phase {
                0 => {
                    if coord.timer > 1 {
                        self.coords[i].as_mut().unwrap().timer -= 1;
                    } else {
                        self.request_timeout(i, step);
                    }
                }
                1 => {
                    let outstanding = coord.confirmed.difference(&coord.arrived).count();
                    let waited = self.arrival_timeout.saturating_sub(coord.timer);
                    if coord.timer <= 1 || (outstanding == 0 && waited >= self.reply_wait) {
                        self.arrival_timeout(i, step);
                    } else {
                        self.coords[i].as_mut().unwrap().timer -= 1;
                    }
                }
                _ => {}
            }
        }
    }

    fn request_timeout(&mut self, i: usize, step: u64) {
        let me = i as RobotId;
        let needed = self.r_min.saturating_sub(self.assigned.len());
        let coord = self.coords[i].as_ref().unwrap();
        let replies = coord.replies.len();
        let task_id = coord.task_id;
        let target = coord.target;
        if replies == 0 {
            let empty = self.coords[i].as_ref().unwrap().empty_rounds + 1;
            if empty >= self.abandon_rounds {
                self.active_coord = None;
                let team: Vec<RobotId> = self.assigned.iter().copied().collect();
                for &member in &team {
                    let m = member as usize;
                    if member != me && self.states[m] == St::Waiting {
                        self.states[m] = St::Forager;
                    }
                }
                self.assigned.clear();
                self.coords[i] = None;
                self.states[i] = St::Forager;
                return;
            }
            self.coords[i].as_mut().unwrap().empty_rounds = empty;
        } else {
            self.coords[i].as_mut().unwrap().empty_rounds = 0;
        }
        if replies < needed {
            let fant_id = self.robots[i].next_fant;
            self.robots[i].next_fant += 1;
            self.coords[i].as_mut().unwrap().timer = self.reply_wait;
            let pkt = OPacket {
                kind: PacketKind::RtFant,
                coordinator: me,
                task_id,
                fant_id,
                path_degree: 0.0,
                crossed_path: vec![me],
                hop: 0,
                target,
                needed: needed as u32,
                origin: me,
            };
            self.broadcast(step, i, pkt);
            return;
        }
        // enough availability replies: recruit on the strongest link
        let key = (me, task_id);
        match self.best_link(i, key, &[me], me, step) {
            Some(to) => {
                let fant_id = self.robots[i].next_fant;
                self.robots[i].next_fant += 1;
                let pkt = OPacket {
                    kind: PacketKind::RFant,
                    coordinator: me,
                    task_id,
                    fant_id,
                    path_degree: 0.0,
                    crossed_path: vec![me],
                    hop: 0,
                    target,
                    needed: needed as u32,
                    origin: me,
                };
                self.unicast(step, i, to, pkt);
                let coord = self.coords[i].as_mut().unwrap();
                coord.phase = 1;
                coord.timer = self.arrival_timeout;
            }
            None => {
                let fant_id = self.robots[i].next_fant;
                self.robots[i].next_fant += 1;
                self.coords[i].as_mut().unwrap().timer = self.reply_wait;
                let pkt = OPacket {
                    kind: PacketKind::RtFant,
                    coordinator: me,
                    task_id,
                    fant_id,
                    path_degree: 0.0,
                    crossed_path: vec![me],
                    hop: 0,
                    target,
                    needed: needed as u32,
                    origin: me,
                };
                self.broadcast(step, i, pkt);
            }
        }
    }

    fn arrival_timeout(&mut self, i: usize, step: u64) {
        let me = i as RobotId;
        let (task_id, target) = {
            let coord = self.coords[i].as_ref().unwrap();
            (coord.task_id, coord.target)
        };
        let still_needed = self.r_min as u32 - self.assigned.len() as u32;
        let fant_id = self.robots[i].next_fant;
        self.robots[i].next_fant += 1;
        {
            let coord = self.coords[i].as_mut().unwrap();
            coord.phase = 0;
            coord.timer = self.reply_wait;
            coord.replies.clear();
            coord.confirmed.clear();
        }
        let pkt = OPacket {
            kind: PacketKind::RtFant,
            coordinator: me,
            task_id,
            fant_id,
            path_degree: 0.0,
            crossed_path: vec![me],
            hop: 0,
            target,
            needed: still_needed,
            origin: me,
        };
        self.broadcast(step, i, pkt);
    }

    fn emit_hellos(&mut self, step: u64) {
        for i in 0..self.robots.len() {
            let pkt = OPacket {
                kind: PacketKind::Hello,
                coordinator: 0,
                task_id: 0,
                fant_id: 0,
                path_degree: 0.0,
                crossed_path: Vec::new(),
                hop: 0,
                target: CellCoord::new(0, 0),
                needed: 0,
                origin: i as RobotId,
            };
            self.broadcast(step, i, pkt);
        }
    }

    fn apply_moves(&mut self, _step: u64, moves: &[(RobotId, CellCoord)]) {
        // recruited robots that strayed too far give up before moving; a robot
        // without a move event this step was boxed in and skips the check
        for &(robot, to) in moves {
            let i = robot as usize;
            if self.states[i] == St::Recruited {
                if let Some((_, _, target)) = self.robots[i].task {
                    let d = self.robots[i].pos.dist(target);
                    if self.robots[i].initial_dist > 0.0
                        && d > 2.0 * self.robots[i].initial_dist
                    {
                        self.robots[i].task = None;
                        self.states[i] = St::Forager;
                    }
                }
            }
            self.robots[i].pos = to;
        }
    }

    fn detections_and_arrivals(&mut self, step: u64) {
        for i in 0..self.robots.len() {
            if self.states[i] != St::Forager && self.states[i] != St::Recruited {
                continue;
            }
            if self.robots[i].pos == self.mine_loc {
                if self.mine_status == 0 {
                    self.mine_status = 1;
                    self.become_coordinator(i, step);
                    continue;
                }
                if self.mine_status == 1 && self.active_coord.is_none() {
                    self.become_coordinator(i, step);
                }
            }
        }
        for i in 0..self.robots.len() {
            if self.states[i] != St::Recruited {
                continue;
            }
            let Some((_, _, target)) = self.robots[i].task else {
                self.states[i] = St::Forager;
                continue;
            };
            if self.robots[i].pos.chebyshev(target) > 1 {
                continue;
            }
            if self.active_coord.is_none()
                || self.mine_status >= 2
                || self.assigned.len() >= self.r_min
            {
                self.robots[i].task = None;
                self.states[i] = St::Forager;
                continue;
            }
            self.assigned.insert(i as RobotId);
            self.states[i] = St::Waiting;
            self.robots[i].task = None;
            if let Some(cid) = self.active_coord {
                if let Some(c) = self.coords[cid as usize].as_mut() {
                    c.arrived.insert(i as RobotId);
                }
            }
        }
    }

    fn team_phase(&mut self, step: u64) {
        let Some(cid) = self.active_coord else { return };
        if self.mine_status != 1 || self.assigned.len() < self.r_min {
            return;
        }
        self.mine_status = 2;
        self.disarm_left = self.disarm_time;
        let team: Vec<RobotId> = self.assigned.iter().copied().collect();
        for &m in &team {
            let i = m as usize;
            if self.states[i] == St::Waiting || self.states[i] == St::Coordinator {
                self.states[i] = St::Execution;
            }
        }
        let ci = cid as usize;
        let task_id = self.coords[ci].as_ref().map(|c| c.task_id).unwrap_or(0);
        self.coords[ci].as_mut().unwrap().phase = 2;
        let lp_fant = self.robots[ci].next_fant;
        self.robots[ci].next_fant += 1;
        let lp = OPacket {
            kind: PacketKind::Lp,
            coordinator: cid,
            task_id,
            fant_id: lp_fant,
            path_degree: 0.0,
            crossed_path: Vec::new(),
            hop: 0,
            target: CellCoord::new(0, 0),
            needed: 0,
            origin: cid,
        };
        self.broadcast(step, ci, lp);
    }

    fn disarm_phase(&mut self, _step: u64) {
        if self.mine_status != 2 {
            return;
        }
        self.disarm_left -= 1;
        if self.disarm_left > 0 {
            return;
        }
        self.mine_status = 3;
        let team: Vec<RobotId> = self.assigned.iter().copied().collect();
        let cid = self.active_coord.take();
        for &m in &team {
            let i = m as usize;
            if self.states[i] == St::Execution {
                self.states[i] = St::Forager;
            }
            self.robots[i].task = None;
        }
        if let Some(cid) = cid {
            let ci = cid as usize;
            if let Some(task_id) = self.coords[ci].as_ref().map(|c| c.task_id) {
                for &m in &team {
                    let i = m as usize;
                    self.robots[i]
                        .seen
                        .retain(|k| !(k.1 == cid && k.2 == task_id));
                    self.robots[i].routing.remove(&(cid, task_id));
                }
            }
            self.coords[ci] = None;
        }
    }
}
