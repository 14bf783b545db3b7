//! Solution text blocks, key-value records and JSON reports.
//!
//! A block reads
//!
//! ```text
//! t :  1.00000000000000E+00  0.00000000000000E+00
//! m : 1
//! the solution for t :
//!  x : -1.00000000000000E+00  0.00000000000000E+00
//!  y : -1.61803398874989E+00  0.00000000000000E+00
//! == err :  2.143E-101 = rco :  4.775E-02 = res :  2.220E-16 =
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::poly::{variables, PolyError, Variables};
use crate::solver::SolveReport;
use crate::tracker::Solution;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct SolutionParseError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, SolutionParseError> {
    Err(SolutionParseError { line, message: message.into() })
}

/// Scientific notation with `digits` fractional digits, a signed exponent of
/// at least two digits, and a leading blank in place of a plus sign.
pub fn scientific(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{}{v}", if v.is_sign_negative() { "" } else { " " });
    }
    let raw = format!("{v:.digits$e}");
    let (mantissa, exp) = raw.split_once('e').unwrap_or((&raw, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let sign = if mantissa.starts_with('-') { "" } else { " " };
    format!("{sign}{mantissa}E{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

fn pair(z: Complex64) -> String {
    format!("{} {}", scientific(z.re, 14), scientific(z.im, 14))
}

pub fn format_solution(sol: &Solution) -> String {
    let mut out = format!("t : {}\nm : {}\nthe solution for t :\n", pair(sol.t), sol.m);
    for (name, z) in sol.variables.iter().zip(&sol.coordinates) {
        out.push_str(&format!(" {name} : {}\n", pair(*z)));
    }
    out.push_str(&format!(
        "== err : {} = rco : {} = res : {} =",
        scientific(sol.err, 3),
        scientific(sol.rco, 3),
        scientific(sol.res, 3)
    ));
    out
}

/// Blocks separated by blank lines, with a final newline.
pub fn format_solutions(sols: &[Solution]) -> String {
    sols.iter().map(|s| format_solution(s) + "\n").collect::<Vec<_>>().join("\n")
}

fn number(line: usize, token: &str) -> Result<f64, SolutionParseError> {
    token.parse::<f64>().or_else(|_| fail(line, format!("bad number `{token}`")))
}

fn complex_after_colon(line: usize, text: &str, key: &str) -> Result<Complex64, SolutionParseError> {
    let Some((name, rest)) = text.split_once(':') else { return fail(line, format!("expected `{key} :`")) };
    if name.trim() != key {
        return fail(line, format!("expected `{key} :`, found `{}`", name.trim()));
    }
    let parts: Vec<&str> = rest.split_whitespace().collect();
    if parts.len() != 2 {
        return fail(line, format!("expected two numbers after `{key} :`"));
    }
    Ok(Complex64::new(number(line, parts[0])?, number(line, parts[1])?))
}

/// Parses one block of numbered lines.
fn parse_block(lines: &[(usize, &str)]) -> Result<Solution, SolutionParseError> {
    let end = lines.last().map_or(0, |l| l.0);
    let mut it = lines.iter();
    let mut next = |what: &str| it.next().copied().ok_or(SolutionParseError { line: end, message: format!("missing {what}") });

    let (n, l) = next("`t :` line")?;
    let t = complex_after_colon(n, l, "t")?;
    let (n, l) = next("`m :` line")?;
    let m = match l.split_once(':') {
        Some((k, v)) if k.trim() == "m" => v.trim().parse::<usize>().or_else(|_| fail(n, "bad multiplicity"))?,
        _ => return fail(n, "expected `m :`"),
    };
    let (n, l) = next("`the solution for t :` line")?;
    if l.split_whitespace().collect::<Vec<_>>() != ["the", "solution", "for", "t", ":"] {
        return fail(n, "expected `the solution for t :`");
    }
    let mut names = Vec::new();
    let mut coordinates = Vec::new();
    loop {
        let (n, l) = next("`== err :` line")?;
        if l.trim_start().starts_with("==") {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let shape = ["==", "err", ":", "", "=", "rco", ":", "", "=", "res", ":", "", "="];
            if fields.len() != shape.len() || fields.iter().zip(shape).any(|(f, s)| !s.is_empty() && *f != s) {
                return fail(n, "malformed quality line");
            }
            if names.is_empty() {
                return fail(n, "solution has no coordinates");
            }
            let vars = variables(&names).map_err(|e: PolyError| SolutionParseError { line: n, message: e.to_string() })?;
            return Ok(Solution {
                t,
                m,
                variables: vars,
                coordinates,
                err: number(n, fields[3])?,
                rco: number(n, fields[7])?,
                res: number(n, fields[11])?,
            });
        }
        let Some((name, _)) = l.split_once(':') else { return fail(n, "expected `name : re im`") };
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return fail(n, "bad variable name");
        }
        coordinates.push(complex_after_colon(n, l, name)?);
        names.push(name.to_string());
    }
}

pub fn parse_solution(text: &str) -> Result<Solution, SolutionParseError> {
    let mut sols = parse_solutions(text)?;
    match sols.len() {
        1 => Ok(sols.remove(0)),
        0 => fail(1, "no solution block"),
        k => fail(1, format!("expected one solution block, found {k}")),
    }
}

/// Parses blocks separated by blank lines.
pub fn parse_solutions(text: &str) -> Result<Vec<Solution>, SolutionParseError> {
    let mut sols = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !block.is_empty() {
                sols.push(parse_block(&block)?);
                block.clear();
            }
        } else {
            block.push((i + 1, line));
        }
    }
    if !block.is_empty() {
        sols.push(parse_block(&block)?);
    }
    Ok(sols)
}

/// Coordinates of `sol` listed in the order of `vars`, matched by name.
pub fn coordinates_over(sol: &Solution, vars: &Variables) -> Result<Vec<Complex64>, SolutionParseError> {
    if sol.variables.len() != vars.len() {
        return fail(1, format!("solution has {} coordinates, expected {}", sol.variables.len(), vars.len()));
    }
    vars.iter()
        .map(|name| match sol.variables.iter().position(|v| v == name) {
            Some(i) => Ok(sol.coordinates[i]),
            None => fail(1, format!("solution has no coordinate `{name}`")),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecordValue {
    Complex(Complex64),
    Integer(usize),
    Real(f64),
}

/// Flat view: `t`, `m`, `err`, `rco`, `res` and one entry per variable.
pub type SolutionRecord = BTreeMap<String, RecordValue>;

pub fn to_record(sol: &Solution) -> SolutionRecord {
    let mut r = SolutionRecord::new();
    for (name, z) in sol.variables.iter().zip(&sol.coordinates) {
        r.insert(name.clone(), RecordValue::Complex(*z));
    }
    r.insert("t".into(), RecordValue::Complex(sol.t));
    r.insert("m".into(), RecordValue::Integer(sol.m));
    r.insert("err".into(), RecordValue::Real(sol.err));
    r.insert("rco".into(), RecordValue::Real(sol.rco));
    r.insert("res".into(), RecordValue::Real(sol.res));
    r
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn solution_json(sol: &Solution) -> Value {
    let coords: serde_json::Map<String, Value> =
        sol.variables.iter().zip(&sol.coordinates).map(|(n, z)| (n.clone(), complex_json(*z))).collect();
    json!({
        "t": complex_json(sol.t),
        "m": sol.m,
        "err": sol.err,
        "rco": sol.rco,
        "res": sol.res,
        "coords": coords,
    })
}

/// Report as JSON with sorted keys and shortest round-trip floats.
pub fn to_json(report: &SolveReport) -> String {
    let v = json!({
        "seed": report.seed,
        "solutions": report.solutions.iter().map(solution_json).collect::<Vec<_>>(),
        "paths": report.paths_tracked,
        "diverged": report.diverged,
    });
    v.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEMO_BLOCK: &str = "t :  1.00000000000000E+00  0.00000000000000E+00
m : 1
the solution for t :
 x : -1.00000000000000E+00  0.00000000000000E+00
 y : -1.61803398874989E+00  0.00000000000000E+00
== err :  2.143E-101 = rco :  4.775E-02 = res :  2.220E-16 =";

    fn sample() -> Solution {
        Solution {
            t: Complex64::new(1.0, 0.0),
            m: 1,
            variables: variables(&["x", "y"]).unwrap(),
            coordinates: vec![Complex64::new(-1.0, 0.0), Complex64::new(-1.61803398874989, 0.0)],
            err: 2.143e-101,
            rco: 4.775e-2,
            res: 2.220e-16,
        }
    }

    #[test]
    fn scientific_layout() {
        assert_eq!(scientific(1.0, 14), " 1.00000000000000E+00");
        assert_eq!(scientific(-1.61803398874989, 14), "-1.61803398874989E+00");
        assert_eq!(scientific(0.0, 14), " 0.00000000000000E+00");
        assert_eq!(scientific(2.143e-101, 3), " 2.143E-101");
        assert_eq!(scientific(4.775e-2, 3), " 4.775E-02");
    }

    #[test]
    fn demo_block_is_reproduced() {
        assert_eq!(format_solution(&sample()), DEMO_BLOCK);
    }

    #[test]
    fn demo_block_parses() {
        let s = parse_solution(DEMO_BLOCK).unwrap();
        assert_eq!(s, sample());
        let r = to_record(&s);
        assert_eq!(r.keys().map(String::as_str).collect::<Vec<_>>(), ["err", "m", "rco", "res", "t", "x", "y"]);
        assert_eq!(r["m"], RecordValue::Integer(1));
    }

    #[test]
    fn simple_block() {
        let s = Solution {
            variables: variables(&["x"]).unwrap(),
            coordinates: vec![Complex64::new(2.0, 0.0)],
            err: 0.0,
            rco: 1.0,
            res: 0.0,
            ..sample()
        };
        assert!(format_solution(&s).contains("\n x :  2.00000000000000E+00  0.00000000000000E+00\n"));
    }

    #[test]
    fn malformed_blocks_report_lines() {
        let bad = DEMO_BLOCK.replace("m : 1", "m : one");
        assert_eq!(parse_solution(&bad).unwrap_err().line, 2);
        let bad = DEMO_BLOCK.replace(" y : -1.61803398874989E+00", " y : -1.6180339887q989E+00");
        assert_eq!(parse_solution(&bad).unwrap_err().line, 5);
        let truncated: String = DEMO_BLOCK.lines().take(4).collect::<Vec<_>>().join("\n");
        assert!(parse_solution(&truncated).is_err());
    }

    #[test]
    fn several_blocks() {
        let text = format_solutions(&[sample(), sample()]);
        assert_eq!(parse_solutions(&text).unwrap().len(), 2);
        assert!(parse_solution(&text).is_err());
    }

    #[test]
    fn json_schema() {
        let report = SolveReport {
            solutions: vec![sample()],
            paths_tracked: 8,
            diverged: 4,
            stalled: 0,
            seed: 21320,
            root_count_used: 8,
        };
        let text = to_json(&report);
        assert!(text.starts_with("{\"diverged\":4,\"paths\":8,\"seed\":21320,\"solutions\":[{\"coords\":{\"x\":[-1.0,0.0]"));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["solutions"][0]["rco"], json!(0.04775));
    }
}
