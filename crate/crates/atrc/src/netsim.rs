//! Idealized wireless medium: range-limited disk-model broadcast and unicast
//! with one-hop-per-step delivery, plus HELLO-based neighbor tables.

use std::collections::BTreeMap;

use rand::Rng;

use crate::protocol::{Packet, PacketKind};
use crate::world::{CellCoord, RobotId};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SendError {
    #[error("receiver {0} not in sender's neighbor table")]
    UnknownReceiver(RobotId),
    #[error("send to self")]
    SelfSend,
}

#[derive(Clone, Debug)]
struct InFlight {
    packet: Packet,
    sender: RobotId,
    sender_pos: CellCoord,
    send_step: u64,
    /// None = broadcast.
    receiver: Option<RobotId>,
}

/// A delivered packet, handed to the protocol layer.
#[derive(Clone, Debug)]
pub struct Delivery {
    pub to: RobotId,
    pub from: RobotId,
    pub packet: Packet,
}

/// A unicast that failed at delivery time (link broke).
#[derive(Clone, Debug)]
pub struct DropNotice {
    pub sender: RobotId,
    pub receiver: RobotId,
    pub packet: Packet,
}

/// Range-limited broadcast medium. Every queued packet is delivered (or
/// dropped) exactly one step after it was sent; transmission counts are kept
/// per packet kind, once per send regardless of receiver count.
#[derive(Clone, Debug)]
pub struct Medium {
    pub rt: f64,
    pub loss_prob: f64,
    inflight: Vec<InFlight>,
    pub sent_count: BTreeMap<PacketKind, u64>,
}

impl Medium {
    pub fn new(rt: f64, loss_prob: f64) -> Self {
        Medium {
            rt,
            loss_prob,
            inflight: Vec::new(),
            sent_count: BTreeMap::new(),
        }
    }

    fn record_send(&mut self, kind: PacketKind) {
        *self.sent_count.entry(kind).or_insert(0) += 1;
    }

    pub fn broadcast(&mut self, sender: RobotId, sender_pos: CellCoord, packet: Packet, step: u64) {
        self.record_send(packet.kind);
        self.inflight.push(InFlight {
            packet,
            sender,
            sender_pos,
            send_step: step,
            receiver: None,
        });
    }

    pub fn unicast(
        &mut self,
        sender: RobotId,
        sender_pos: CellCoord,
        receiver: RobotId,
        packet: Packet,
        step: u64,
    ) -> Result<(), SendError> {
        if receiver == sender {
            return Err(SendError::SelfSend);
        }
        self.record_send(packet.kind);
        self.inflight.push(InFlight {
            packet,
            sender,
            sender_pos,
            send_step: step,
            receiver: Some(receiver),
        });
        Ok(())
    }

    /// Delivers everything sent at `step - 1`. Receivers are whatever robots
    /// are within `rt` of the sender's send-time position at delivery time.
    /// Deliveries come out in a deterministic order (send sequence, then
    /// receiver id).
    pub fn deliver<R: Rng>(
        &mut self,
        step: u64,
        positions: &BTreeMap<RobotId, CellCoord>,
        loss_rng: &mut R,
    ) -> (Vec<Delivery>, Vec<DropNotice>) {
        let mut deliveries = Vec::new();
        let mut drops = Vec::new();
        let mut remaining = Vec::new();
        let inflight = std::mem::take(&mut self.inflight);
        for msg in inflight {
            if msg.send_step + 1 > step {
                remaining.push(msg);
                continue;
            }
            debug_assert_eq!(msg.send_step + 1, step, "packet missed its delivery step");
            match msg.receiver {
                Some(rx) => {
                    let reachable = positions
                        .get(&rx)
                        .map(|p| p.dist(msg.sender_pos) <= self.rt)
                        .unwrap_or(false);
                    let lost = self.loss_prob > 0.0 && loss_rng.gen::<f64>() < self.loss_prob;
                    if reachable && !lost {
                        deliveries.push(Delivery {
                            to: rx,
                            from: msg.sender,
                            packet: msg.packet,
                        });
                    } else {
                        drops.push(DropNotice {
                            sender: msg.sender,
                            receiver: rx,
                            packet: msg.packet,
                        });
                    }
                }
                None => {
                    for (&rx, &pos) in positions {
                        if rx == msg.sender {
                            continue;
                        }
                        if pos.dist(msg.sender_pos) > self.rt {
                            continue;
                        }
                        if self.loss_prob > 0.0 && loss_rng.gen::<f64>() < self.loss_prob {
                            continue;
                        }
                        deliveries.push(Delivery {
                            to: rx,
                            from: msg.sender,
                            packet: msg.packet.clone(),
                        });
                    }
                }
            }
        }
        self.inflight = remaining;
        (deliveries, drops)
    }

    /// Total transmissions of the given kind.
    pub fn sent(&self, kind: PacketKind) -> u64 {
        self.sent_count.get(&kind).copied().unwrap_or(0)
    }

    /// Control-packet transmissions, HELLO excluded.
    pub fn control_overhead(&self) -> u64 {
        self.sent_count
            .iter()
            .filter(|(k, _)| **k != PacketKind::Hello)
            .map(|(_, v)| *v)
            .sum()
    }
}

/// Per-robot table of one-hop neighbors, refreshed by HELLO (and any other
/// reception) and expired after `hello_timeout` steps of silence.
#[derive(Clone, Debug, Default)]
pub struct NeighborTable {
    entries: BTreeMap<RobotId, u64>,
}

impl NeighborTable {
    pub fn refresh(&mut self, neighbor: RobotId, step: u64) {
        self.entries.insert(neighbor, step);
    }

    pub fn expire(&mut self, step: u64, timeout: u64) {
        self.entries.retain(|_, last| *last + timeout >= step);
    }

    pub fn contains(&self, id: RobotId) -> bool {
        self.entries.contains_key(&id)
    }

    pub fn heard_at(&self, id: RobotId) -> Option<u64> {
        self.entries.get(&id).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = RobotId> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
