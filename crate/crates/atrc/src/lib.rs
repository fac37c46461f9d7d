//! Discrete-time simulator of a mine-clearing robot swarm that coordinates
//! through repellent/attractive pheromone fields and an ant-inspired wireless
//! recruitment protocol, plus the experiment harness built on top of it.

pub mod agent;
pub mod config;
pub mod engine;
pub mod metrics;
pub mod netsim;
pub mod pheromone;
pub mod policy;
pub mod protocol;
pub mod rng;
pub mod world;
