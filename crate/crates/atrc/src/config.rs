//! Text formats: the scenario file describing one simulation setup and the
//! sweep file describing a parameter study, plus the built-in experiment
//! presets. The parsers are fuzzed (see fuzz/).
//!
//! Format: INI-like sections with `key = value` lines, `#` comments,
//! repeatable keys for obstacles, mines and robot starts.

use crate::engine::{Mode, SimConfig};
use crate::pheromone::NoiseMode;
use crate::world::CellCoord;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error("line {0}: expected `key = value`")]
    BadLine(usize),
    #[error("line {0}: unterminated section header")]
    BadSection(usize),
    #[error("line {0}: unknown section `{1}`")]
    UnknownSection(usize, String),
    #[error("line {0}: unknown key `{1}`")]
    UnknownKey(usize, String),
    #[error("line {0}: key `{1}` outside any section")]
    KeyOutsideSection(usize, String),
    #[error("line {0}: bad value for `{1}`: {2}")]
    BadValue(usize, String, String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("sweep file has no [sweep] section")]
    MissingSweep,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

fn parse_cell(line: usize, key: &str, v: &str) -> Result<CellCoord, ParseError> {
    let bad = || ParseError::BadValue(line, key.to_string(), v.to_string());
    let (x, y) = v.split_once(',').ok_or_else(bad)?;
    Ok(CellCoord::new(
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ParseError> {
    v.parse()
        .map_err(|_| ParseError::BadValue(line, key.to_string(), v.to_string()))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ParseError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ParseError::BadValue(line, key.to_string(), v.to_string())),
    }
}

fn parse_mode(line: usize, v: &str) -> Result<Mode, ParseError> {
    match v.to_ascii_lowercase().as_str() {
        "oe" => Ok(Mode::Oe),
        "ers" => Ok(Mode::Ers),
        "erp" => Ok(Mode::Erp),
        _ => Err(ParseError::BadValue(line, "mode".to_string(), v.to_string())),
    }
}

/// Iterates `(line_number, section, key, value)` over an INI-ish document.
fn lines(text: &str) -> impl Iterator<Item = Result<(usize, String, String, String), ParseError>> + '_ {
    let mut section = String::new();
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let n = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            return None;
        }
        if let Some(rest) = line.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) => {
                    section = name.trim().to_ascii_lowercase();
                    return None;
                }
                None => return Some(Err(ParseError::BadSection(n))),
            }
        }
        let Some((k, v)) = line.split_once('=') else {
            return Some(Err(ParseError::BadLine(n)));
        };
        let key = k.trim().to_ascii_lowercase();
        if section.is_empty() {
            return Some(Err(ParseError::KeyOutsideSection(n, key)));
        }
        Some(Ok((n, section.clone(), key, v.trim().to_string())))
    })
}

/// Parses a scenario document into a validated simulation config.
pub fn parse_scenario(text: &str) -> Result<SimConfig, ParseError> {
    let (cfg, _) = parse_scenario_inner(text, false)?;
    Ok(cfg)
}

#[derive(Clone, Debug, Copy, PartialEq, Eq)]
pub enum Axis {
    Robots,
    Mines,
    GridSize,
    A1,
    A2,
    Rho,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Robots => "robots",
            Axis::Mines => "mines",
            Axis::GridSize => "gridSize",
            Axis::A1 => "a1",
            Axis::A2 => "a2",
            Axis::Rho => "rho",
        }
    }
}

/// One parameter study: a base scenario plus an axis swept over values, run
/// for a seed range in one or more modes.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub name: String,
    pub base: SimConfig,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub seeds: std::ops::Range<u64>,
    pub modes: Vec<Mode>,
}

impl SweepSpec {
    /// Every (mode, axis value, seed) combination as a runnable config.
    /// Mines and robot starts are re-randomized per seed when the axis
    /// changes their count, so sweep points stay comparable.
    pub fn expand(&self) -> Vec<SimConfig> {
        let mut out = Vec::new();
        for &mode in &self.modes {
            for &v in &self.values {
                for seed in self.seeds.clone() {
                    let mut cfg = self.base.clone();
                    cfg.mode = mode;
                    cfg.seed = seed;
                    apply_axis(&mut cfg, self.axis, v);
                    out.push(cfg);
                }
            }
        }
        out
    }
}

pub fn apply_axis(cfg: &mut SimConfig, axis: Axis, v: f64) {
    match axis {
        Axis::Robots => {
            cfg.robot_count = v as u32;
            cfg.robot_starts.clear();
        }
        Axis::Mines => {
            let n = v as usize;
            cfg.mines = spread_mines(cfg.width, cfg.height, n);
        }
        Axis::GridSize => {
            cfg.width = v as u32;
            cfg.height = v as u32;
            let n = cfg.mines.len();
            cfg.mines = spread_mines(cfg.width, cfg.height, n);
            cfg.robot_starts.clear();
            cfg.obstacles.clear();
        }
        Axis::A1 => cfg.pheromone.a1 = v,
        Axis::A2 => cfg.pheromone.a2 = v,
        Axis::Rho => cfg.pheromone.rho = v,
    }
}

/// Deterministic well-spread mine placement: n cells on a coarse diagonal
/// lattice of the grid interior.
pub fn spread_mines(width: u32, height: u32, n: usize) -> Vec<CellCoord> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let w = width as i64;
    let h = height as i64;
    for i in 0..n as i64 {
        let x = ((2 * i + 1) * w / (2 * n as i64)).clamp(0, w - 1);
        let y = (((2 * i + 1) * h / (2 * n as i64)) + (i * h / 3)) % h;
        let mut c = CellCoord::new(x as i32, y as i32);
        // nudge off collisions (tiny grids)
        while out.contains(&c) {
            c = CellCoord::new(c.x, ((c.y as i64 + 1) % h) as i32);
        }
        out.push(c);
    }
    out
}

/// Parses a sweep document: a scenario plus a `[sweep]` section.
pub fn parse_sweep(text: &str) -> Result<SweepSpec, ParseError> {
    let (base, sweep_lines) = parse_scenario_inner(text, true)?;
    if sweep_lines.is_empty() {
        return Err(ParseError::MissingSweep);
    }
    let mut axis = None;
    let mut values: Vec<f64> = Vec::new();
    let mut seeds = 0..30u64;
    let mut modes = vec![base.mode];
    for (n, key, v) in sweep_lines {
        match key.as_str() {
            "axis" => {
                axis = Some(match v.as_str() {
                    "robots" => Axis::Robots,
                    "mines" => Axis::Mines,
                    "gridsize" | "grid_size" => Axis::GridSize,
                    "a1" => Axis::A1,
                    "a2" => Axis::A2,
                    "rho" => Axis::Rho,
                    _ => return Err(ParseError::BadValue(n, key, v)),
                })
            }
            "values" => {
                values = v
                    .split(',')
                    .map(|s| parse_num::<f64>(n, "values", s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "seeds" => {
                // either `a..b` or a count `k` meaning 0..k
                if let Some((a, b)) = v.split_once("..") {
                    let lo: u64 = parse_num(n, "seeds", a.trim())?;
                    let hi: u64 = parse_num(n, "seeds", b.trim())?;
                    seeds = lo..hi;
                } else {
                    let k: u64 = parse_num(n, "seeds", &v)?;
                    seeds = 0..k;
                }
            }
            "modes" => {
                modes = v
                    .split(',')
                    .map(|s| parse_mode(n, s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            _ => return Err(ParseError::UnknownKey(n, key)),
        }
    }
    let axis = axis.ok_or(ParseError::MissingKey("axis"))?;
    if values.is_empty() {
        return Err(ParseError::MissingKey("values"));
    }
    Ok(SweepSpec {
        name: "custom".to_string(),
        base,
        axis,
        values,
        seeds,
        modes,
    })
}

fn parse_scenario_inner(
    text: &str,
    allow_sweep: bool,
) -> Result<(SimConfig, Vec<(usize, String, String)>), ParseError> {
    let mut width: Option<u32> = None;
    let mut height: Option<u32> = None;
    let mut cfg = SimConfig::new(1, 1);
    let mut sweep_lines = Vec::new();
    for item in lines(text) {
        let (n, section, key, v) = item?;
        match section.as_str() {
            "grid" => match key.as_str() {
                "width" => width = Some(parse_num(n, &key, &v)?),
                "height" => height = Some(parse_num(n, &key, &v)?),
                "obstacle" => cfg.obstacles.push(parse_cell(n, &key, &v)?),
                _ => return Err(ParseError::UnknownKey(n, key)),
            },
            "mines" => match key.as_str() {
                "at" => cfg.mines.push(parse_cell(n, &key, &v)?),
                _ => return Err(ParseError::UnknownKey(n, key)),
            },
            "robots" => match key.as_str() {
                "count" => cfg.robot_count = parse_num(n, &key, &v)?,
                "start" => cfg.robot_starts.push(parse_cell(n, &key, &v)?),
                _ => return Err(ParseError::UnknownKey(n, key)),
            },
            "run" => match key.as_str() {
                "mode" => cfg.mode = parse_mode(n, &v)?,
                "seed" => cfg.seed = parse_num(n, &key, &v)?,
                "max_steps" => cfg.max_steps = parse_num(n, &key, &v)?,
                _ => return Err(ParseError::UnknownKey(n, key)),
            },
            "pheromone" => match key.as_str() {
                "delta_tau0" => cfg.pheromone.delta_tau0 = parse_num(n, &key, &v)?,
                "a1" => cfg.pheromone.a1 = parse_num(n, &key, &v)?,
                "a2" => cfg.pheromone.a2 = parse_num(n, &key, &v)?,
                "rho" => cfg.pheromone.rho = parse_num(n, &key, &v)?,
                "rs" => cfg.pheromone.rs = parse_num(n, &key, &v)?,
                "noise" => {
                    cfg.pheromone.noise_mode = match v.as_str() {
                        "per_cell" => NoiseMode::PerCell,
                        "per_deposit" => NoiseMode::PerDeposit,
                        _ => return Err(ParseError::BadValue(n, key, v)),
                    }
                }
                _ => return Err(ParseError::UnknownKey(n, key)),
            },
            "policy" => match key.as_str() {
                "phi" => cfg.policy.score.phi = parse_num(n, &key, &v)?,
                "lambda" => cfg.policy.score.lambda = parse_num(n, &key, &v)?,
                "eta" => cfg.policy.score.eta = parse_num(n, &key, &v)?,
                "stochastic" => cfg.policy.stochastic = parse_bool(n, &key, &v)?,
                "random_walk" => cfg.policy.random_walk = parse_bool(n, &key, &v)?,
                _ => return Err(ParseError::UnknownKey(n, key)),
            },
            "protocol" => match key.as_str() {
                "r_min" => cfg.protocol.r_min = parse_num(n, &key, &v)?,
                "r_t" => cfg.protocol.r_t = parse_num(n, &key, &v)?,
                "reply_wait" => cfg.protocol.reply_wait = parse_num(n, &key, &v)?,
                "arrival_timeout" => {
                    cfg.protocol.arrival_timeout = Some(parse_num(n, &key, &v)?)
                }
                "disarm_time" => cfg.protocol.disarm_time = parse_num(n, &key, &v)?,
                "gamma_e" => cfg.protocol.gamma_e = parse_num(n, &key, &v)?,
                "gamma_r" => cfg.protocol.gamma_r = parse_num(n, &key, &v)?,
                "hello_period" => cfg.protocol.hello_period = parse_num(n, &key, &v)?,
                "hello_timeout" => cfg.protocol.hello_timeout = parse_num(n, &key, &v)?,
                "loss_prob" => cfg.protocol.loss_prob = parse_num(n, &key, &v)?,
                "abandon_factor" => cfg.protocol.abandon_factor = parse_num(n, &key, &v)?,
                "coordinator_counts" => {
                    cfg.protocol.coordinator_counts = parse_bool(n, &key, &v)?
                }
                _ => return Err(ParseError::UnknownKey(n, key)),
            },
            "sweep" if allow_sweep => sweep_lines.push((n, key, v)),
            other => return Err(ParseError::UnknownSection(n, other.to_string())),
        }
    }
    cfg.width = width.ok_or(ParseError::MissingKey("width"))?;
    cfg.height = height.ok_or(ParseError::MissingKey("height"))?;
    Ok((cfg, sweep_lines))
}

fn base_grid(size: u32, robots: u32, mines: usize) -> SimConfig {
    let mut cfg = SimConfig::new(size, size);
    cfg.robot_count = robots;
    cfg.mines = spread_mines(size, size, mines);
    cfg
}

const ROBOT_AXIS: &[f64] = &[4.0, 8.0, 12.0, 16.0, 20.0, 24.0];

/// Built-in parameter studies mirroring the published trend experiments.
pub fn preset(name: &str) -> Result<SweepSpec, ParseError> {
    let spec = match name {
        // coverage effort vs swarm size, exploration only
        "fig14" => SweepSpec {
            name: name.to_string(),
            base: base_grid(30, 16, 0),
            axis: Axis::Robots,
            values: ROBOT_AXIS.to_vec(),
            seeds: 0..30,
            modes: vec![Mode::Oe],
        },
        // objective vs mine count, both recruitment variants
        "fig15" => SweepSpec {
            name: name.to_string(),
            base: base_grid(30, 16, 1),
            axis: Axis::Mines,
            values: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            seeds: 0..30,
            modes: vec![Mode::Ers, Mode::Erp],
        },
        // objective vs grid size
        "fig16" => SweepSpec {
            name: name.to_string(),
            base: base_grid(20, 16, 3),
            axis: Axis::GridSize,
            values: vec![20.0, 30.0, 40.0, 50.0],
            seeds: 0..30,
            modes: vec![Mode::Ers, Mode::Erp],
        },
        // objective vs swarm size at fixed mines
        "fig17" => SweepSpec {
            name: name.to_string(),
            base: base_grid(30, 16, 3),
            axis: Axis::Robots,
            values: ROBOT_AXIS.to_vec(),
            seeds: 0..30,
            modes: vec![Mode::Ers, Mode::Erp],
        },
        // control overhead vs swarm size
        "fig18" => SweepSpec {
            name: name.to_string(),
            base: base_grid(30, 16, 3),
            axis: Axis::Robots,
            values: vec![8.0, 16.0, 24.0],
            seeds: 0..30,
            modes: vec![Mode::Erp],
        },
        // control overhead vs grid size
        "fig19" => SweepSpec {
            name: name.to_string(),
            base: base_grid(20, 16, 3),
            axis: Axis::GridSize,
            values: vec![20.0, 30.0, 40.0, 50.0],
            seeds: 0..30,
            modes: vec![Mode::Erp],
        },
        // same exploration task under a steeper, weaker deposit kernel,
        // for side-by-side comparison against the defaults
        "ias_ss_compare" => {
            let mut base = base_grid(30, 16, 0);
            base.pheromone.a1 = 0.25;
            base.pheromone.a2 = 1.0;
            SweepSpec {
                name: name.to_string(),
                base,
                axis: Axis::Robots,
                values: ROBOT_AXIS.to_vec(),
                seeds: 0..30,
                modes: vec![Mode::Oe],
            }
        }
        _ => return Err(ParseError::UnknownPreset(name.to_string())),
    };
    Ok(spec)
}

pub const PRESET_NAMES: &[&str] = &[
    "fig14", "fig15", "fig16", "fig17", "fig18", "fig19", "ias_ss_compare",
];
