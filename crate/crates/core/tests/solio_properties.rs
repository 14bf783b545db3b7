mod common;

use common::{c, names};
use num_complex::Complex64;
use proptest::prelude::*;

use helios::solio::{format_solution, format_solutions, parse_solution, parse_solutions, to_json};
use helios::solver::SolveReport;
use helios::tracker::Solution;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -1e6..1e6f64, (-300i32..300, 1.0..10.0f64).prop_map(|(e, m)| m * 10f64.powi(e))]
}

fn positive() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), (-200i32..1, 1.0..10.0f64).prop_map(|(e, m)| m * 10f64.powi(e))]
}

fn solution() -> impl Strategy<Value = Solution> {
    (1usize..=4)
        .prop_flat_map(|n| (prop::collection::vec((finite(), finite()), n), 1usize..4, positive(), positive(), positive()))
        .prop_map(|(coords, m, err, rco, res)| Solution {
            t: c(1.0, 0.0),
            m,
            variables: names(coords.len()),
            coordinates: coords.into_iter().map(|(a, b)| c(a, b)).collect(),
            err,
            rco,
            res,
        })
}

fn close(a: f64, b: f64, digits: i32) -> bool {
    (a - b).abs() <= 10f64.powi(-digits) * a.abs().max(b.abs()) * 1.0000001 + f64::MIN_POSITIVE
}

fn close_c(a: Complex64, b: Complex64) -> bool {
    close(a.re, b.re, 14) && close(a.im, b.im, 14)
}

proptest! {
    #[test]
    fn block_round_trip_keeps_printed_digits(s in solution()) {
        let back = parse_solution(&format_solution(&s)).unwrap();
        prop_assert_eq!(&back.variables, &s.variables);
        prop_assert_eq!(back.m, s.m);
        prop_assert!(close_c(back.t, s.t));
        for (a, b) in back.coordinates.iter().zip(&s.coordinates) {
            prop_assert!(close_c(*a, *b), "{a} vs {b}");
        }
        prop_assert!(close(back.err, s.err, 3) && close(back.rco, s.rco, 3) && close(back.res, s.res, 3));
        prop_assert_eq!(format_solution(&back), format_solution(&s));
    }

    #[test]
    fn lists_round_trip(sols in prop::collection::vec(solution(), 0..4)) {
        prop_assert_eq!(parse_solutions(&format_solutions(&sols)).unwrap().len(), sols.len());
    }

    #[test]
    fn json_keys_are_sorted(sols in prop::collection::vec(solution(), 1..3), seed in any::<u64>()) {
        let report = SolveReport { solutions: sols, paths_tracked: 4, diverged: 1, stalled: 0, seed, root_count_used: 4 };
        let text = to_json(&report);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(value["seed"].as_u64(), Some(seed));
        let keys: Vec<String> = value["solutions"][0].as_object().unwrap().keys().cloned().collect();
        prop_assert_eq!(keys, ["coords", "err", "m", "rco", "res", "t"].map(String::from).to_vec());
        let mut positions: Vec<usize> = ["\"diverged\"", "\"paths\"", "\"seed\"", "\"solutions\""].iter().map(|k| text.find(k).unwrap()).collect();
        let sorted = { let mut p = positions.clone(); p.sort(); p };
        positions.dedup();
        prop_assert_eq!(positions, sorted);
    }
}
