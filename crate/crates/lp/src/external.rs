//! Hook for delegating float solves to an external executable.
//!
//! The executable is called as `<solver> <model.mps> <solution.txt>` and must
//! write a solution file of the form
//!
//! ```text
//! status optimal
//! objective 0.75
//! x0 0.5
//! x1 0.25
//! ```
//!
//! Variables missing from the file are taken to be zero. Accepted status words
//! are `optimal`, `infeasible`, `unbounded` and `iteration-limit`.

use crate::error::LpError;
use crate::mps::write_mps;
use crate::problem::LinearProgram;
use crate::solve::{LpSolution, LpStatus};
use std::path::Path;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

static COUNTER: AtomicUsize = AtomicUsize::new(0);

pub fn solve_external(lp: &LinearProgram<f64>, solver: &Path) -> Result<LpSolution, LpError> {
    let dir = std::env::temp_dir();
    let tag = format!("nsmac-{}-{}", std::process::id(), COUNTER.fetch_add(1, Ordering::Relaxed));
    let model = dir.join(format!("{}.mps", tag));
    let solution = dir.join(format!("{}.sol", tag));
    std::fs::write(&model, write_mps(lp))?;
    let output = Command::new(solver).arg(&model).arg(&solution).output();
    let _ = std::fs::remove_file(&model);
    let output = output.map_err(|e| LpError::External(format!("cannot run {}: {}", solver.display(), e)))?;
    if !output.status.success() {
        let _ = std::fs::remove_file(&solution);
        return Err(LpError::External(format!(
            "{} exited with {}: {}",
            solver.display(),
            output.status,
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    let text = std::fs::read_to_string(&solution);
    let _ = std::fs::remove_file(&solution);
    let mut sol = parse_solution(&text?, lp.num_vars())?;
    sol.backend = format!("external:{}", solver.display());
    Ok(sol)
}

pub fn parse_solution(text: &str, num_vars: usize) -> Result<LpSolution, LpError> {
    let err = |line: usize, msg: &str| LpError::Parse { line: line + 1, msg: msg.to_string() };
    let mut status = None;
    let mut value = f64::NAN;
    let mut primal = vec![0.0; num_vars];
    for (ln, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["status", s] => {
                status = Some(match *s {
                    "optimal" => LpStatus::Optimal,
                    "infeasible" => LpStatus::Infeasible,
                    "unbounded" => LpStatus::Unbounded,
                    "iteration-limit" => LpStatus::IterationLimit,
                    _ => return Err(err(ln, "unknown status")),
                })
            }
            ["objective", v] => value = v.parse().map_err(|_| err(ln, "bad objective"))?,
            [name, v] => {
                let j: usize = name
                    .strip_prefix('x')
                    .and_then(|s| s.parse().ok())
                    .filter(|&j| j < num_vars)
                    .ok_or_else(|| err(ln, "unknown variable"))?;
                primal[j] = v.parse().map_err(|_| err(ln, "bad value"))?;
            }
            _ => return Err(err(ln, "expected two fields")),
        }
    }
    let status = status.ok_or_else(|| err(0, "missing status line"))?;
    Ok(LpSolution { status, value, primal, iterations: 0, exact: None, backend: "external".into() })
}
