//! The two scalar pheromone fields: repellent (exploration) and attractive
//! (recruitment), with radial noisy deposit, evaporation and superposition.

use crate::world::CellCoord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FieldKind {
    Repellent,
    Attractive,
}

/// How deposit noise is drawn: one value per affected cell, or one value
/// shared by the whole deposit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    PerCell,
    PerDeposit,
}

#[derive(Clone, Copy, Debug)]
pub struct PheromoneParams {
    /// Peak deposit at the depositing cell.
    pub delta_tau0: f64,
    /// Distance-decay constant.
    pub a1: f64,
    /// Noise-scale constant.
    pub a2: f64,
    /// Evaporation rate in [0, 1].
    pub rho: f64,
    /// Sensing/diffusion radius in cells.
    pub rs: f64,
    pub noise_mode: NoiseMode,
}

impl Default for PheromoneParams {
    fn default() -> Self {
        PheromoneParams {
            delta_tau0: 2.0,
            a1: 0.5,
            a2: 0.5,
            rho: 0.2,
            rs: 4.0,
            noise_mode: NoiseMode::PerCell,
        }
    }
}

/// Deposit contribution at distance `r_kc` with noise draw `eps`.
/// Zero beyond the sensing radius; clamped at zero so the field stays a
/// concentration.
pub fn deposit_kernel(params: &PheromoneParams, r_kc: f64, eps: f64) -> f64 {
    debug_assert!(r_kc >= 0.0);
    debug_assert!((0.0..1.0).contains(&eps));
    if r_kc > params.rs {
        return 0.0;
    }
    (params.delta_tau0 * (-r_kc / params.a1).exp() - eps / params.a2).max(0.0)
}

/// Dense per-grid storage of both fields.
#[derive(Clone, Debug)]
pub struct PheromoneField {
    width: u32,
    height: u32,
    tau: Vec<f64>,
    theta: Vec<f64>,
    pub params: PheromoneParams,
}

impl PheromoneField {
    pub fn new(width: u32, height: u32, params: PheromoneParams) -> Self {
        let n = (width as usize) * (height as usize);
        PheromoneField {
            width,
            height,
            tau: vec![0.0; n],
            theta: vec![0.0; n],
            params,
        }
    }

    fn idx(&self, c: CellCoord) -> usize {
        debug_assert!(c.x >= 0 && c.y >= 0);
        (c.y as usize) * (self.width as usize) + (c.x as usize)
    }

    fn in_bounds(&self, c: CellCoord) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as u32) < self.width && (c.y as u32) < self.height
    }

    fn field(&self, kind: FieldKind) -> &Vec<f64> {
        match kind {
            FieldKind::Repellent => &self.tau,
            FieldKind::Attractive => &self.theta,
        }
    }

    fn field_mut(&mut self, kind: FieldKind) -> &mut Vec<f64> {
        match kind {
            FieldKind::Repellent => &mut self.tau,
            FieldKind::Attractive => &mut self.theta,
        }
    }

    /// Current stored amount at `c`. Pure read.
    pub fn sense(&self, kind: FieldKind, c: CellCoord) -> f64 {
        self.field(kind)[self.idx(c)]
    }

    /// Adds one radial deposit centered at `center`. Cells within the sensing
    /// radius are visited in row-major order; `draw_eps` supplies the noise
    /// draws (one per cell, or one total, per `noise_mode`).
    pub fn deposit_radial_with(
        &mut self,
        kind: FieldKind,
        center: CellCoord,
        draw_eps: &mut dyn FnMut() -> f64,
    ) {
        let params = self.params;
        let r = params.rs.floor() as i32;
        let shared = match params.noise_mode {
            NoiseMode::PerDeposit => Some(draw_eps()),
            NoiseMode::PerCell => None,
        };
        for dy in -r..=r {
            for dx in -r..=r {
                let c = CellCoord::new(center.x + dx, center.y + dy);
                if !self.in_bounds(c) {
                    continue;
                }
                let dist = center.dist(c);
                if dist > params.rs {
                    continue;
                }
                let eps = shared.unwrap_or_else(|| draw_eps());
                let add = deposit_kernel(&params, dist, eps);
                let i = self.idx(c);
                self.field_mut(kind)[i] += add;
            }
        }
    }

    /// Multiplies every stored amount (both fields) by `1 - rho`.
    pub fn evaporate(&mut self) {
        let keep = 1.0 - self.params.rho;
        for v in self.tau.iter_mut().chain(self.theta.iter_mut()) {
            *v *= keep;
        }
    }

    /// One field update: evaporate the previous-step amounts, then apply this
    /// step's deposits.
    pub fn step_update(
        &mut self,
        deposits: &[(FieldKind, CellCoord)],
        draw_eps: &mut dyn FnMut() -> f64,
    ) {
        self.evaporate();
        for &(kind, center) in deposits {
            self.deposit_radial_with(kind, center, draw_eps);
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }
}
