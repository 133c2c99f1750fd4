//! Solving the orbit programs and working with the resulting strategies.

use super::program::{build_ns_lp_orbit, build_relaxed_lp_orbit, Formulation, NsObjective, OrbitSystem};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::orbit::orbit_channel_value;
use nsmac_lp::{format_rational, parse_rational, solve_with, BigRational, LpStatus, SolveMode, SolverOptions};
use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub struct NsOptions {
    pub objective: NsObjective,
    pub form: Formulation,
    pub solver: SolverOptions,
}

impl Default for NsOptions {
    fn default() -> Self {
        NsOptions { objective: NsObjective::Joint, form: Formulation::Compact, solver: SolverOptions::default() }
    }
}

impl NsOptions {
    pub fn exact() -> Self {
        NsOptions { solver: SolverOptions::with_mode(SolveMode::Exact), ..Default::default() }
    }
}

/// Orbit-aggregated strategy variables for `n` uses (element-indexed when `n = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct NsCode {
    pub channel_hash: String,
    pub n: usize,
    pub k1: usize,
    pub k2: usize,
    pub value: f64,
    pub exact_value: Option<BigRational>,
    pub r: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub p: Vec<f64>,
}

fn status_error(status: LpStatus) -> Error {
    Error::Solver(format!("solver finished with status {status:?}"))
}

/// `S^NS(W^n, k1, k2)` and an optimal strategy.
pub fn solve_ns(w: &Channel, n: usize, k1: usize, k2: usize) -> Result<(f64, NsCode)> {
    let sys = OrbitSystem::new(w, n)?;
    solve_ns_with(w, &sys, k1, k2, &NsOptions::default())
}

pub fn solve_ns_with(w: &Channel, sys: &OrbitSystem, k1: usize, k2: usize, opts: &NsOptions) -> Result<(f64, NsCode)> {
    let (sol, layout) = match opts.solver.mode {
        SolveMode::Float => {
            let prog = build_ns_lp_orbit::<f64>(w, sys, k1, k2, opts.objective, opts.form)?;
            (solve_with(&prog.lp, &opts.solver)?, prog.layout)
        }
        SolveMode::Exact => {
            let prog = build_ns_lp_orbit::<BigRational>(w, sys, k1, k2, opts.objective, opts.form)?;
            (solve_with(&prog.lp, &opts.solver)?, prog.layout)
        }
    };
    if !sol.is_optimal() {
        return Err(status_error(sol.status));
    }
    let (r, r1, r2, p) = layout.unpack(&sol.primal);
    let code = NsCode {
        channel_hash: w.hash(),
        n: sys.n,
        k1,
        k2,
        value: sol.value,
        exact_value: sol.exact.map(|e| e.value),
        r,
        r1,
        r2,
        p,
    };
    Ok((sol.value, code))
}

/// `S^NSbar(W^n, k1, k2)`.
pub fn solve_relaxed(w: &Channel, sys: &OrbitSystem, k1: usize, k2: usize, solver: &SolverOptions) -> Result<f64> {
    let sol = match solver.mode {
        SolveMode::Float => solve_with(&build_relaxed_lp_orbit::<f64>(w, sys, k1, k2)?.lp, solver)?,
        SolveMode::Exact => solve_with(&build_relaxed_lp_orbit::<BigRational>(w, sys, k1, k2)?.lp, solver)?,
    };
    if !sol.is_optimal() {
        return Err(status_error(sol.status));
    }
    Ok(sol.value)
}

/// Largest violation of the orbit program constraints (standard form) by a code.
pub fn code_residual(w: &Channel, sys: &OrbitSystem, code: &NsCode) -> Result<f64> {
    let prog = build_ns_lp_orbit::<f64>(w, sys, code.k1, code.k2, NsObjective::Joint, Formulation::Standard)?;
    let mut x = Vec::with_capacity(prog.layout.num_vars());
    x.extend_from_slice(&code.r);
    x.extend_from_slice(&code.r1);
    x.extend_from_slice(&code.r2);
    x.extend_from_slice(&code.p);
    Ok(prog.lp.max_violation(&x))
}

/// `(1/k1k2) sum_w W(w) r_w`.
pub fn code_success(w: &Channel, sys: &OrbitSystem, code: &NsCode) -> Result<f64> {
    let mut total = 0.0;
    for (wi, &r) in code.r.iter().enumerate() {
        total += orbit_channel_value::<f64>(w, sys.triples.get(wi))? * r;
    }
    Ok(total / (code.k1 * code.k2) as f64)
}

fn write_list(out: &mut String, name: &str, v: &[f64]) {
    let _ = write!(out, "{name}");
    for x in v {
        let _ = write!(out, " {x:?}");
    }
    out.push('\n');
}

impl NsCode {
    pub fn to_text(&self) -> String {
        let mut out = String::from("nscode 1\n");
        let _ = writeln!(out, "channel {}", self.channel_hash);
        let _ = writeln!(out, "n {}\nk1 {}\nk2 {}", self.n, self.k1, self.k2);
        let _ = writeln!(out, "value {:?}", self.value);
        if let Some(e) = &self.exact_value {
            let _ = writeln!(out, "exact {}", format_rational(e));
        }
        let _ = writeln!(out, "triples {}\npairs {}", self.r.len(), self.p.len());
        write_list(&mut out, "r", &self.r);
        write_list(&mut out, "r1", &self.r1);
        write_list(&mut out, "r2", &self.r2);
        write_list(&mut out, "p", &self.p);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut code = NsCode {
            channel_hash: String::new(),
            n: 0,
            k1: 0,
            k2: 0,
            value: f64::NAN,
            exact_value: None,
            r: Vec::new(),
            r1: Vec::new(),
            r2: Vec::new(),
            p: Vec::new(),
        };
        let (mut triples, mut pairs) = (None, None);
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == "nscode 1" => {}
            _ => return Err(Error::Parse { line: 1, msg: "expected header `nscode 1`".into() }),
        }
        for (i, line) in lines {
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let mut tok = line.split_whitespace();
            let key = tok.next().unwrap_or_default();
            let rest: Vec<&str> = tok.collect();
            let one = || rest.first().copied().ok_or_else(|| bad("missing value"));
            let int = || one()?.parse::<usize>().map_err(|_| bad("expected an integer"));
            let floats = || -> Result<Vec<f64>> {
                rest.iter().map(|t| t.parse::<f64>().map_err(|_| bad("expected a number"))).collect()
            };
            match key {
                "channel" => code.channel_hash = one()?.to_string(),
                "n" => code.n = int()?,
                "k1" => code.k1 = int()?,
                "k2" => code.k2 = int()?,
                "value" => code.value = one()?.parse().map_err(|_| bad("expected a number"))?,
                "exact" => code.exact_value = Some(parse_rational(one()?).ok_or_else(|| bad("expected a rational"))?),
                "triples" => triples = Some(int()?),
                "pairs" => pairs = Some(int()?),
                "r" => code.r = floats()?,
                "r1" => code.r1 = floats()?,
                "r2" => code.r2 = floats()?,
                "p" => code.p = floats()?,
                _ => return Err(bad("unknown key")),
            }
        }
        let t = triples.ok_or(Error::Parse { line: 0, msg: "missing `triples`".into() })?;
        let p = pairs.ok_or(Error::Parse { line: 0, msg: "missing `pairs`".into() })?;
        if code.r.len() != t || code.r1.len() != t || code.r2.len() != t || code.p.len() != p {
            return Err(Error::Parse { line: 0, msg: "value lists do not match the declared orbit counts".into() });
        }
        if code.k1 == 0 || code.k2 == 0 || code.n == 0 {
            return Err(Error::Parse { line: 0, msg: "n, k1 and k2 must be positive".into() });
        }
        Ok(code)
    }

    /// Errors unless the code was produced for `w` at a matching size.
    pub fn check_against(&self, w: &Channel, sys: &OrbitSystem) -> Result<()> {
        if self.channel_hash != w.hash() || self.n != sys.n {
            return Err(Error::ChannelMismatch);
        }
        if self.r.len() != sys.triples.len() || self.p.len() != sys.pairs.len() {
            return Err(Error::ChannelMismatch);
        }
        Ok(())
    }
}
