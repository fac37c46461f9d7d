//! Per-robot behavioral state and protocol memory. The transition logic
//! itself is driven by the engine's step loop.

use crate::netsim::NeighborTable;
use crate::protocol::{CoordinatorState, ProtocolMemory, TaskId};
use crate::world::{CellCoord, MineId, RobotId};

/// The five behavioral states. Forager is the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RobotState {
    Forager,
    Coordinator,
    Recruited,
    Waiting,
    Execution,
}

impl RobotState {
    pub fn as_str(self) -> &'static str {
        match self {
            RobotState::Forager => "F",
            RobotState::Coordinator => "C",
            RobotState::Recruited => "R",
            RobotState::Waiting => "W",
            RobotState::Execution => "E",
        }
    }
}

/// The recruitment task a Recruited/Waiting/Execution robot serves.
#[derive(Clone, Copy, Debug)]
pub struct CurrentTask {
    pub coordinator: RobotId,
    pub task_id: TaskId,
    pub target: CellCoord,
}

#[derive(Clone, Debug)]
pub struct Robot {
    pub id: RobotId,
    pub pos: CellCoord,
    pub state: RobotState,
    /// Set while Recruited/Waiting/Execution in protocol mode.
    pub task: Option<CurrentTask>,
    pub mem: ProtocolMemory,
    pub neighbors: NeighborTable,
    /// Set while this robot coordinates a mine.
    pub coord: Option<CoordinatorState>,
    /// Step at which this robot was recruited (T_Start of its Eq.-4 summand).
    pub recruit_t_start: u64,
    /// Distance to target when recruited, for the give-up rule.
    pub recruit_initial_dist: f64,
    /// Mine joined while Waiting/Execution.
    pub joined_mine: Option<MineId>,
}

impl Robot {
    pub fn new(id: RobotId, pos: CellCoord) -> Self {
        Robot {
            id,
            pos,
            state: RobotState::Forager,
            task: None,
            mem: ProtocolMemory::default(),
            neighbors: NeighborTable::default(),
            coord: None,
            recruit_t_start: 0,
            recruit_initial_dist: 0.0,
            joined_mine: None,
        }
    }

    /// Allowed transitions of the state machine. Anything outside this set is
    /// an engine bug.
    pub fn transition_allowed(from: RobotState, to: RobotState) -> bool {
        use RobotState::*;
        matches!(
            (from, to),
            (Forager, Coordinator)
                | (Forager, Recruited)
                | (Recruited, Forager)
                | (Recruited, Coordinator)
                | (Recruited, Waiting)
                | (Waiting, Forager)
                | (Waiting, Execution)
                | (Coordinator, Forager)
                | (Coordinator, Execution)
                | (Execution, Forager)
        )
    }
}
