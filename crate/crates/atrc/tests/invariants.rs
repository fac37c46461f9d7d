//! Property tests for the numeric core: fields stay physical, scores stay
//! normalized, routing rows stay a distribution, parsers never panic.

use proptest::prelude::*;

use atrc::config::{parse_scenario, parse_sweep};
use atrc::pheromone::{deposit_kernel, FieldKind, PheromoneField, PheromoneParams};
use atrc::policy::{move_scores, MoveScoreParams};
use atrc::protocol::{RoutingTable, RowKey, TaskType};
use atrc::world::CellCoord;

fn cell_strategy(w: i32, h: i32) -> impl Strategy<Value = CellCoord> {
    (0..w, 0..h).prop_map(|(x, y)| CellCoord::new(x, y))
}

proptest! {
    #[test]
    fn kernel_is_nonnegative_and_dies_beyond_radius(
        r in 0.0f64..12.0,
        eps in 0.0f64..1.0,
    ) {
        let params = PheromoneParams::default();
        let v = deposit_kernel(&params, r, eps);
        prop_assert!(v >= 0.0);
        if r > params.rs {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn kernel_does_not_grow_with_distance(
        r1 in 0.0f64..6.0,
        dr in 0.0f64..6.0,
        eps in 0.0f64..1.0,
    ) {
        let params = PheromoneParams::default();
        prop_assert!(deposit_kernel(&params, r1 + dr, eps) <= deposit_kernel(&params, r1, eps));
    }

    #[test]
    fn field_stays_nonnegative(
        centers in prop::collection::vec(cell_strategy(12, 12), 1..20),
        eps_seed in any::<u64>(),
        evaporations in 0usize..5,
    ) {
        let mut field = PheromoneField::new(12, 12, PheromoneParams::default());
        let mut state = eps_seed;
        let mut draw = move || {
            // splitmix-style scramble, mapped into [0, 1)
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for (i, &c) in centers.iter().enumerate() {
            let kind = if i % 2 == 0 { FieldKind::Repellent } else { FieldKind::Attractive };
            field.deposit_radial_with(kind, c, &mut draw);
            if i < evaporations {
                field.evaporate();
            }
        }
        for y in 0..12 {
            for x in 0..12 {
                let c = CellCoord::new(x, y);
                prop_assert!(field.sense(FieldKind::Repellent, c) >= 0.0);
                prop_assert!(field.sense(FieldKind::Attractive, c) >= 0.0);
            }
        }
    }

    #[test]
    fn deposit_only_touches_cells_within_radius(
        center in cell_strategy(20, 20),
        eps in 0.0f64..1.0,
    ) {
        let params = PheromoneParams::default();
        let mut field = PheromoneField::new(20, 20, params);
        let mut draw = move || eps;
        field.deposit_radial_with(FieldKind::Repellent, center, &mut draw);
        for y in 0..20 {
            for x in 0..20 {
                let c = CellCoord::new(x, y);
                if center.dist(c) > params.rs {
                    prop_assert_eq!(field.sense(FieldKind::Repellent, c), 0.0);
                }
            }
        }
    }

    #[test]
    fn deposits_superpose(
        a in cell_strategy(15, 15),
        b in cell_strategy(15, 15),
        eps_a in 0.0f64..1.0,
        eps_b in 0.0f64..1.0,
    ) {
        let params = PheromoneParams::default();
        let mut only_a = PheromoneField::new(15, 15, params);
        let mut only_b = PheromoneField::new(15, 15, params);
        let mut both = PheromoneField::new(15, 15, params);
        only_a.deposit_radial_with(FieldKind::Repellent, a, &mut || eps_a);
        only_b.deposit_radial_with(FieldKind::Repellent, b, &mut || eps_b);
        both.deposit_radial_with(FieldKind::Repellent, a, &mut || eps_a);
        both.deposit_radial_with(FieldKind::Repellent, b, &mut || eps_b);
        for y in 0..15 {
            for x in 0..15 {
                let c = CellCoord::new(x, y);
                let sum = only_a.sense(FieldKind::Repellent, c) + only_b.sense(FieldKind::Repellent, c);
                prop_assert!((both.sense(FieldKind::Repellent, c) - sum).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn move_scores_form_a_distribution(
        centers in prop::collection::vec(cell_strategy(10, 10), 0..8),
        candidates in prop::collection::vec(cell_strategy(10, 10), 1..8),
        eps in 0.0f64..1.0,
    ) {
        let mut field = PheromoneField::new(10, 10, PheromoneParams::default());
        for &c in &centers {
            field.deposit_radial_with(FieldKind::Repellent, c, &mut || eps);
        }
        let scores = move_scores(&field, FieldKind::Repellent, &candidates, &MoveScoreParams::default());
        let total: f64 = scores.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for (_, p) in scores {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn routing_rows_stay_normalized(
        neighbors in prop::collection::btree_set(0u32..12, 1..8),
        updates in prop::collection::vec((0u32..12, 0.0f64..1.0), 0..30),
    ) {
        let mut table = RoutingTable::default();
        let key = RowKey { coordinator: 0, task_id: 0, task_type: TaskType::Recruiting };
        table.ensure_row(key, neighbors.iter().copied());
        for (link, q) in updates {
            table.update(key, link, q, 0.1, 0.3);
        }
        let row = table.row(&key).unwrap();
        let sum: f64 = row.values().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
        for &p in row.values() {
            prop_assert!(p >= 0.0);
        }
    }

    #[test]
    fn scenario_parser_never_panics(input in ".{0,400}") {
        let _ = parse_scenario(&input);
    }

    #[test]
    fn parser_accepts_noise_around_valid_text(
        prefix in "[ \t#a-z=\\[\\]\n]{0,40}",
        suffix in "[ \t#a-z=\\[\\]\n]{0,40}",
    ) {
        let text = format!("{prefix}[grid]\nwidth=5\nheight=5\n{suffix}");
        let _ = parse_scenario(&text);
    }

    #[test]
    fn sweep_parser_never_panics(input in ".{0,400}") {
        let _ = parse_sweep(&input);
    }
}

/// The checked-in fuzz corpus must stay parseable, or the fuzzers start from
/// dead seeds.
#[test]
fn fuzz_corpus_seeds_parse() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fuzz/corpus");
    for entry in std::fs::read_dir(format!("{root}/fuzz_scenario_config")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = parse_scenario(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        cfg.validate().unwrap_or_else(|e| panic!("{path:?}: {e}"));
    }
    for entry in std::fs::read_dir(format!("{root}/fuzz_sweep_spec")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let spec = parse_sweep(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        assert!(!spec.expand().is_empty(), "{path:?} expands to nothing");
    }
}
