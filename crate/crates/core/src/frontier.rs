//! Zero-error rate pairs certified by the assisted programs.

use crate::capacity::{Frontier, RatePoint, RateSource};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::ns::{build_ns_lp_orbit, build_relaxed_lp_orbit, Formulation, NsObjective, OrbitSystem};
use nsmac_lp::{solve_with, BigRational, LinearProgram, Scalar, SolveMode, SolverOptions};
use serde::Serialize;
use std::ops::RangeInclusive;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProgramKind {
    Ns,
    Relaxed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certify {
    /// Float optimum at least `1 - tol`.
    Float(f64),
    /// Rational optimum exactly one.
    Exact,
}

impl Certify {
    /// Exact up to four uses, float `1e-7` beyond.
    pub fn default_for(n: usize) -> Self {
        if n <= 4 {
            Certify::Exact
        } else {
            Certify::Float(1e-7)
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Certify::Exact);
        }
        let tol = s
            .strip_prefix("float:")
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| Error::InvalidArgument(format!("certification `{s}` is not `exact` or `float:<tol>`")))?;
        Ok(Certify::Float(tol))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanConfig {
    pub n: usize,
    pub mode: ProgramKind,
    pub certify: Certify,
    pub k1: RangeInclusive<usize>,
    /// Largest `k2` tried; defaults to the counting bound.
    pub k2_max: Option<usize>,
}

impl ScanConfig {
    pub fn new(n: usize, mode: ProgramKind, k1: RangeInclusive<usize>) -> Self {
        ScanConfig { n, mode, certify: Certify::default_for(n), k1, k2_max: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if self.k1.is_empty() || *self.k1.start() == 0 {
            return Err(Error::InvalidArgument("k1 range must be nonempty and start at 1 or more".into()));
        }
        if let Certify::Float(tol) = self.certify {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(Error::InvalidArgument("certification tolerance must lie in (0, 1e-3]".into()));
            }
        }
        if self.k2_max == Some(0) {
            return Err(Error::InvalidArgument("k2 range must be nonempty".into()));
        }
        Ok(())
    }
}

/// Verdict for one `(k1, k2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub k1: usize,
    pub k2: usize,
    pub value: f64,
    pub certified: bool,
}

fn optimum<T: Scalar>(lp: &LinearProgram<T>, solver: &SolverOptions) -> Result<(f64, Option<BigRational>)> {
    let sol = solve_with(lp, solver)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!("solver finished with status {:?}", sol.status)));
    }
    Ok((sol.value, sol.exact.map(|e| e.value)))
}

/// Solves one program and decides whether its value is one.
pub fn certify_one(w: &Channel, sys: &OrbitSystem, k1: usize, k2: usize, mode: ProgramKind, certify: Certify) -> Result<Verdict> {
    let (value, exact) = match certify {
        Certify::Exact => {
            if !w.is_exact() {
                return Err(Error::NotExact);
            }
            let solver = SolverOptions::with_mode(SolveMode::Exact);
            match mode {
                ProgramKind::Ns => optimum(
                    &build_ns_lp_orbit::<BigRational>(w, sys, k1, k2, NsObjective::Joint, Formulation::Compact)?.lp,
                    &solver,
                )?,
                ProgramKind::Relaxed => optimum(&build_relaxed_lp_orbit::<BigRational>(w, sys, k1, k2)?.lp, &solver)?,
            }
        }
        Certify::Float(_) => {
            let solver = SolverOptions::default();
            match mode {
                ProgramKind::Ns => optimum(
                    &build_ns_lp_orbit::<f64>(w, sys, k1, k2, NsObjective::Joint, Formulation::Compact)?.lp,
                    &solver,
                )?,
                ProgramKind::Relaxed => optimum(&build_relaxed_lp_orbit::<f64>(w, sys, k1, k2)?.lp, &solver)?,
            }
        }
    };
    let certified = match (certify, exact) {
        (Certify::Exact, Some(e)) => e == BigRational::one(),
        (Certify::Exact, None) => false,
        (Certify::Float(tol), _) => value >= 1.0 - tol,
    };
    Ok(Verdict { k1, k2, value, certified })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroErrorRow {
    pub k1: usize,
    /// Largest certified `k2`, or 0 when even `k2 = 1` fails.
    pub max_k2: usize,
    pub verdicts: Vec<Verdict>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroErrorScan {
    pub config: ScanConfig,
    pub rows: Vec<ZeroErrorRow>,
    pub points: Vec<RatePoint>,
    pub frontier: Frontier,
}

/// For each `k1`, the largest `k2` whose program value is certified to be one.
///
/// Binary search is sound because the value is nonincreasing in `k2`, and the
/// bound for the next `k1` is the answer for the current one.
pub fn zero_error_frontier(w: &Channel, cfg: &ScanConfig) -> Result<ZeroErrorScan> {
    cfg.validate()?;
    let sys = OrbitSystem::new(w, cfg.n)?;
    let pow = |a: usize| a.checked_pow(cfg.n as u32).unwrap_or(usize::MAX);
    let (nx1, nx2, ny) = (pow(w.nx1()), pow(w.nx2()), pow(w.ny()));
    let source = match cfg.mode {
        ProgramKind::Ns => RateSource::ZeroErrorNs,
        ProgramKind::Relaxed => RateSource::ZeroErrorRelaxed,
    };
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut ceiling = cfg.k2_max.unwrap_or(nx2).min(nx2);
    for k1 in cfg.k1.clone() {
        let mut row = ZeroErrorRow { k1, max_k2: 0, verdicts: Vec::new(), error: None };
        // Value one needs k1 <= |X1|^n and k1 k2 <= |Y|^n.
        let hi = if k1 > nx1 { 0 } else { ceiling.min(ny / k1) };
        let (mut lo, mut hi) = (0usize, hi);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            match certify_one(w, &sys, k1, mid, cfg.mode, cfg.certify) {
                Ok(v) => {
                    log::info!("k1={k1} k2={mid} value {} certified {}", v.value, v.certified);
                    let ok = v.certified;
                    row.verdicts.push(v);
                    if ok {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                Err(e) => {
                    row.error = Some(e.to_string());
                    break;
                }
            }
        }
        if row.error.is_none() {
            row.max_k2 = lo;
            ceiling = lo;
            if lo > 0 {
                let n = cfg.n as f64;
                points.push(
                    RatePoint::new((k1 as f64).log2() / n, (lo as f64).log2() / n, source)
                        .with("k1", k1 as f64)
                        .with("k2", lo as f64),
                );
            }
        }
        rows.push(row);
    }
    Ok(ZeroErrorScan { frontier: Frontier::from_points(&points), config: cfg.clone(), rows, points })
}
