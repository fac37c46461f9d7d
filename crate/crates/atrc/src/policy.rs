//! Per-robot movement decisions: exploration follows the minimum normalized
//! pheromone score, recruitment approach follows the maximum.

use rand::Rng;

use crate::pheromone::{FieldKind, PheromoneField};
use crate::world::CellCoord;

#[derive(Clone, Copy, Debug)]
pub struct MoveScoreParams {
    /// Pheromone exponent.
    pub phi: f64,
    /// Heuristic exponent.
    pub lambda: f64,
    /// Heuristic value per cell (constant by default).
    pub eta: f64,
}

impl Default for MoveScoreParams {
    fn default() -> Self {
        MoveScoreParams {
            phi: 1.0,
            lambda: 1.0,
            eta: 0.9,
        }
    }
}

/// Normalized score per candidate: p(c) = x_c^phi * eta^lambda / sum over
/// candidates. If every numerator is zero (untouched field), scores fall back
/// to uniform.
pub fn move_scores(
    field: &PheromoneField,
    kind: FieldKind,
    candidates: &[CellCoord],
    params: &MoveScoreParams,
) -> Vec<(CellCoord, f64)> {
    assert!(!candidates.is_empty(), "move_scores needs candidates");
    let numerators: Vec<f64> = candidates
        .iter()
        .map(|&c| field.sense(kind, c).powf(params.phi) * params.eta.powf(params.lambda))
        .collect();
    let total: f64 = numerators.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        let uniform = 1.0 / candidates.len() as f64;
        return candidates.iter().map(|&c| (c, uniform)).collect();
    }
    candidates
        .iter()
        .zip(numerators)
        .map(|(&c, n)| (c, n / total))
        .collect()
}

fn pick_tied<R: Rng>(tied: &[CellCoord], rng: &mut R) -> CellCoord {
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.gen_range(0..tied.len())]
    }
}

/// Minimum pheromone following: a candidate with minimal score, ties broken
/// uniformly at random.
pub fn choose_exploration_cell<R: Rng>(scores: &[(CellCoord, f64)], rng: &mut R) -> CellCoord {
    assert!(!scores.is_empty());
    let min = scores.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    let tied: Vec<CellCoord> = scores
        .iter()
        .filter(|&&(_, s)| s == min)
        .map(|&(c, _)| c)
        .collect();
    pick_tied(&tied, rng)
}

/// Maximum pheromone following: a candidate with maximal score, ties broken
/// uniformly at random.
pub fn choose_recruitment_cell<R: Rng>(scores: &[(CellCoord, f64)], rng: &mut R) -> CellCoord {
    assert!(!scores.is_empty());
    let max = scores
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<CellCoord> = scores
        .iter()
        .filter(|&&(_, s)| s == max)
        .map(|&(c, _)| c)
        .collect();
    pick_tied(&tied, rng)
}

/// Optional stochastic exploration: sample with weight proportional to the
/// inverted score (1 - p), so low-pheromone cells are likelier. Off by
/// default; the deterministic argmin above is the written rule.
pub fn sample_exploration_cell<R: Rng>(scores: &[(CellCoord, f64)], rng: &mut R) -> CellCoord {
    assert!(!scores.is_empty());
    if scores.len() == 1 {
        return scores[0].0;
    }
    let weights: Vec<f64> = scores.iter().map(|&(_, s)| 1.0 - s).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return scores[rng.gen_range(0..scores.len())].0;
    }
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return scores[i].0;
        }
    }
    scores[scores.len() - 1].0
}
