//! The scripting surface, exercised through the gateway only.

use std::process::Command;
use std::sync::Mutex;

use num_complex::Complex64;

use helios::gateway::{Gateway, Request, Response};
use helios::poly::variables;
use helios::solio::{format_solution, parse_solution, parse_solutions, RecordValue};
use helios::tracker::{Solution, TrackSettings};

/// The seed is process-wide state.
static SEED: Mutex<()> = Mutex::new(());

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn demo() -> Vec<String> {
    strings(&["x**2*y**2 + x + y;", "x*y + x + y + 1;"])
}

#[test]
fn demo_transcript() {
    let _lock = SEED.lock().unwrap();
    let mut g = Gateway::new();
    assert_eq!(g.dispatch(Request::SetSeed(21320)).unwrap(), Response::Code(0));
    assert_eq!(g.dispatch(Request::GetSeed).unwrap(), Response::Seed(21320));
    let Response::Solutions(sols) = g.dispatch(Request::Solve { polynomials: demo(), silent: true }).unwrap() else {
        panic!("expected solutions")
    };
    assert_eq!(sols.len(), 4);
    let first = parse_solution(&sols[0]).unwrap();
    assert_eq!(first.m, 1);
    assert_eq!(first.variables.to_vec(), ["x", "y"]);
    assert!(first.res <= 1e-10);
    assert_eq!(format_solution(&first), sols[0]);
    assert_eq!(g.dispatch(Request::MixedVolume { polynomials: demo() }).unwrap(), Response::Count(4));
}

#[test]
fn linear_equation() {
    let _lock = SEED.lock().unwrap();
    let mut g = Gateway::new();
    g.dispatch(Request::SetSeed(1)).unwrap();
    let Response::Solutions(sols) = g.dispatch(Request::Solve { polynomials: strings(&["x-1;"]), silent: true }).unwrap()
    else {
        panic!("expected solutions")
    };
    assert_eq!(sols.len(), 1);
    assert!((parse_solution(&sols[0]).unwrap().coordinates[0] - 1.0).norm() < 1e-14);
}

#[test]
fn errors_carry_core_diagnostics() {
    let mut g = Gateway::new();
    let e = g.dispatch(Request::Solve { polynomials: strings(&["x + ;"]), silent: true }).unwrap_err();
    assert!(e.0.contains("line 1"), "{e}");
    assert!(g.dispatch(Request::TrackerNext { handle: 7 }).is_err());
}

fn start_solution(x: Complex64, y: f64) -> String {
    format_solution(&Solution {
        t: Complex64::new(0.0, 0.0),
        m: 1,
        variables: variables(&["x", "y"]).unwrap(),
        coordinates: vec![x, Complex64::new(y, 0.0)],
        err: 0.0,
        rco: 1.0,
        res: 0.0,
    })
}

#[test]
fn generator_endpoints_match_cli_track() {
    let _lock = SEED.lock().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let starts: Vec<String> = (0..4)
        .flat_map(|k| {
            let x = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * k as f64);
            [start_solution(x, 1.0), start_solution(x, -1.0)]
        })
        .collect();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let target = write("demo.sys", "2\nx**2*y**2 + x + y;\nx*y + x + y + 1;\n");
    let start = write("start.sys", "2\nx**4 - 1;\ny**2 - 1;\n");
    let sols = write("start.sols", &(starts.join("\n\n") + "\n"));
    let out = Command::new(env!("CARGO_BIN_EXE_helios"))
        .args(["track", "--target", &target, "--start", &start, "--sols", &sols, "--seed", "11"])
        .output()
        .unwrap();
    let cli_ends = parse_solutions(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cli_ends.len(), 4);

    let mut g = Gateway::new();
    g.dispatch(Request::SetSeed(11)).unwrap();
    let mut ends = Vec::new();
    for s in &starts {
        let Response::Tracker(handle) = g
            .dispatch(Request::TrackerInit { target: demo(), start: strings(&["x**4 - 1;", "y**2 - 1;"]), solution: s.clone() })
            .unwrap()
        else {
            panic!("expected a tracker")
        };
        assert!(g.dispatch(Request::TrackerEndpoint { handle }).is_err());
        let mut last = 0.0;
        while let Response::Point(Some(p)) = g.dispatch(Request::TrackerNext { handle }).unwrap() {
            let RecordValue::Real(t) = p["t"] else { panic!("t is real") };
            assert!(t > last);
            last = t;
            assert!(p.contains_key("x") && p.contains_key("y") && p.contains_key("corrector_iterations"));
        }
        if let Response::Endpoint(Some(text)) = g.dispatch(Request::TrackerEndpoint { handle }).unwrap() {
            ends.push(parse_solution(&text).unwrap());
        }
        assert_eq!(g.dispatch(Request::TrackerDrop { handle }).unwrap(), Response::Code(0));
    }
    assert_eq!(ends.len(), cli_ends.len());
    for (a, b) in ends.iter().zip(&cli_ends) {
        for (x, y) in a.coordinates.iter().zip(&b.coordinates) {
            assert!((x - y).norm() <= 1e-8);
        }
    }
}

#[test]
fn tune_validates_settings() {
    let _lock = SEED.lock().unwrap();
    let mut g = Gateway::new();
    g.dispatch(Request::SetSeed(2)).unwrap();
    let Response::Tracker(handle) = g
        .dispatch(Request::TrackerInit {
            target: strings(&["x**2 - 4;"]),
            start: strings(&["x**2 - 1;"]),
            solution: start_solution(Complex64::new(1.0, 0.0), 0.0).replace(" y :  0.00000000000000E+00  0.00000000000000E+00\n", ""),
        })
        .unwrap()
    else {
        panic!("expected a tracker")
    };
    let bad = TrackSettings { min_step: 1.0, max_step: 0.1, ..Default::default() };
    assert!(g.dispatch(Request::TrackerTune { handle, settings: bad }).is_err());
    let fine = TrackSettings { max_step: 0.01, ..Default::default() };
    assert_eq!(g.dispatch(Request::TrackerTune { handle, settings: fine }).unwrap(), Response::Code(0));
    let Response::Point(Some(p)) = g.dispatch(Request::TrackerNext { handle }).unwrap() else { panic!("expected a point") };
    assert_eq!(p["step_used"], RecordValue::Real(0.01));
    while let Response::Point(Some(_)) = g.dispatch(Request::TrackerNext { handle }).unwrap() {}
    let Response::Endpoint(Some(text)) = g.dispatch(Request::TrackerEndpoint { handle }).unwrap() else { panic!("converged") };
    assert!((parse_solution(&text).unwrap().coordinates[0].norm() - 2.0).abs() < 1e-10);
}

#[test]
fn solve_strings_match_cli_output() {
    let _lock = SEED.lock().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("demo.sys");
    std::fs::write(&file, "2\nx**2*y**2 + x + y;\nx*y + x + y + 1;\n").unwrap();
    let run = |json: bool| {
        let mut args = vec!["solve", file.to_str().unwrap(), "--seed", "21320", "--quiet"];
        if json {
            args.push("--json");
        }
        Command::new(env!("CARGO_BIN_EXE_helios")).args(args).output().unwrap().stdout
    };
    let mut g = Gateway::new();
    g.dispatch(Request::SetSeed(21320)).unwrap();
    let Response::Solutions(sols) = g.dispatch(Request::Solve { polynomials: demo(), silent: true }).unwrap() else {
        panic!("expected solutions")
    };
    let joined: String = sols.iter().map(|s| s.clone() + "\n").collect::<Vec<_>>().join("\n");
    assert_eq!(joined.as_bytes(), &run(false)[..]);
    let v: serde_json::Value = serde_json::from_slice(&run(true)).unwrap();
    for (s, j) in sols.iter().zip(v["solutions"].as_array().unwrap()) {
        let parsed = parse_solution(s).unwrap();
        assert_eq!(parsed.m as u64, j["m"].as_u64().unwrap());
        let x = &j["coords"]["x"];
        assert!((parsed.coordinates[0].re - x[0].as_f64().unwrap()).abs() <= 1e-14 * x[0].as_f64().unwrap().abs().max(1e-300));
    }
}
