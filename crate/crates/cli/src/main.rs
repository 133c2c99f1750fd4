//! `nsmac`: assisted and unassisted coding over two-sender channels.

mod output;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nsmac::capacity::{
    bac_classical_closed_form_region, bac_relaxed_closed_form_region, classical_region, one_shot_converse, relaxed_region,
    Frontier, JointDist, RegionConfig,
};
use nsmac::classical::{brute_force_success, Objective, DEFAULT_BUDGET};
use nsmac::concat::{concat_scan, diagonal_cells, grid_cells};
use nsmac::frontier::{certify_one, zero_error_frontier, Certify, ProgramKind, ScanConfig};
use nsmac::ns::{
    build_ns_lp_element, build_ns_lp_orbit, build_relaxed_lp_element, build_relaxed_lp_orbit, check_nssr_inequality,
    indep_ns_sum, solve_ns_with, solve_relaxed, Formulation, NsObjective, NsOptions, OrbitSystem,
};
use nsmac::{Channel, Error};
use nsmac_lp::{mps::write_mps, parse_rational, BigRational, SolverOptions};
use output::Output;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_NOT_CERTIFIED: u8 = 4;

/// Largest blocklength run without `--tier long`.
const DEFAULT_TIER_MAX_N: usize = 5;

#[derive(Parser)]
#[command(name = "nsmac", version, about = "Coding over two-sender channels with and without non-signaling assistance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// `bac`, `noisy-bac:<e>` or `noisy-bac:<e1>,<e2>`, `trivial`, or a channel file
    #[arg(long, default_value = "bac")]
    channel: String,
    /// Directory for CSV/JSON results and the run manifest
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow blocklengths above the default tier
    #[arg(long, value_enum, default_value_t = Tier::Default)]
    tier: Tier,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
enum Tier {
    Default,
    Long,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
enum Mode {
    Ns,
    NsSum,
    Relaxed,
    Classical,
    ClassicalSum,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
enum RegionKind {
    Classical,
    Relaxed,
    ClassicalClosedForm,
    #[value(alias = "bac-closed-form")]
    RelaxedClosedForm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LpKind {
    Ns,
    NsElement,
    Relaxed,
    RelaxedElement,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Standard,
    Compact,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal success probability of one program
    Success {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long, value_enum, default_value_t = Mode::Ns)]
        mode: Mode,
        /// `exact` or `float:<tol>`; defaults to exact up to n = 4
        #[arg(long)]
        certify: Option<String>,
    },
    /// Zero-error frontier: the largest certified k2 for each k1
    Frontier {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Ns)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        k1_min: usize,
        /// Defaults to |X1|^n
        #[arg(long)]
        k1_max: Option<usize>,
        #[arg(long)]
        k2_max: Option<usize>,
        #[arg(long)]
        certify: Option<String>,
    },
    /// Single-letter rate regions
    Region {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: RegionKind,
        /// Grid steps per unit of probability
        #[arg(long)]
        resolution: Option<usize>,
        /// Sample the CSV at this many evenly spaced rates instead of listing vertices
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Rates of concatenated codes built from optimal assisted codes
    Concat {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n')]
        n: usize,
        /// Largest message count; defaults to 2^n
        #[arg(long)]
        kmax: Option<usize>,
        /// Scan |k1 - k2| <= radius; omit for the full grid
        #[arg(long)]
        radius: Option<usize>,
    },
    /// One-shot converse bounds on the message sizes
    Converse {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: f64,
        /// `uniform` or comma-separated joint law over (x1, x2)
        #[arg(long, default_value = "uniform")]
        law: String,
    },
    /// Independent assistance heuristic and its comparison with list sizes l1, l2
    Indep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        l1: Option<usize>,
        #[arg(long)]
        l2: Option<usize>,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
    },
    /// Decide whether a program value equals one
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long, value_enum, default_value_t = Mode::Ns)]
        mode: Mode,
        #[arg(long, default_value = "exact")]
        certify: String,
    },
    /// Write a program in free MPS format
    DumpLp {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long, value_enum, default_value_t = LpKind::Ns)]
        program: LpKind,
        #[arg(long, value_enum, default_value_t = Form::Standard)]
        form: Form,
        /// Exact rational coefficients
        #[arg(long)]
        exact: bool,
    },
}

fn load_channel(arg: &str) -> anyhow::Result<Channel> {
    let bad = |msg: String| anyhow::Error::from(Error::InvalidArgument(msg));
    let parse = |s: &str| parse_rational(s.trim()).ok_or_else(|| bad(format!("`{s}` is not a number")));
    Ok(match arg {
        "bac" => Channel::bac(),
        "trivial" => Channel::trivial(),
        _ => {
            if let Some(rest) = arg.strip_prefix("noisy-bac:") {
                let (e1, e2) = match rest.split_once(',') {
                    Some((a, b)) => (parse(a)?, parse(b)?),
                    None => (parse(rest)?, parse(rest)?),
                };
                Channel::noisy_bac_exact(&e1, &e2)?
            } else {
                let path = PathBuf::from(arg.strip_prefix("file:").unwrap_or(arg));
                if !path.is_file() {
                    return Err(bad(format!("unknown channel `{arg}`")));
                }
                Channel::from_text(&std::fs::read_to_string(&path)?)?
            }
        }
    })
}

fn check_tier(common: &Common, n: usize) -> anyhow::Result<()> {
    if n > DEFAULT_TIER_MAX_N && common.tier != Tier::Long {
        return Err(Error::InvalidArgument(format!("n = {n} needs `--tier long`")).into());
    }
    Ok(())
}

fn certify_mode(flag: &Option<String>, n: usize) -> anyhow::Result<Certify> {
    Ok(match flag {
        Some(s) => Certify::parse(s)?,
        None => Certify::default_for(n),
    })
}

fn program_kind(mode: Mode) -> nsmac::Result<ProgramKind> {
    match mode {
        Mode::Ns => Ok(ProgramKind::Ns),
        Mode::Relaxed => Ok(ProgramKind::Relaxed),
        _ => Err(Error::InvalidArgument("certification applies to `ns` and `relaxed` only".into())),
    }
}

fn certify_label(c: Certify) -> String {
    match c {
        Certify::Exact => "exact".to_string(),
        Certify::Float(t) => format!("float:{t}"),
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Success { common, n, k1, k2, mode, certify } => {
            check_tier(&common, n)?;
            let w = load_channel(&common.channel)?;
            let mut out = Output::new("success", &common.out);
            out.config(json!({ "channel": common.channel, "n": n, "k1": k1, "k2": k2, "mode": mode }));
            let value = match mode {
                Mode::Classical | Mode::ClassicalSum => {
                    let objective = if mode == Mode::Classical { Objective::Joint } else { Objective::Sum };
                    let (v, table) = out.time("solve", || brute_force_success(&w.power(n), k1, k2, objective, DEFAULT_BUDGET))?;
                    out.result(json!({ "value": v, "enc1": table.enc1, "enc2": table.enc2 }));
                    v
                }
                Mode::Ns | Mode::NsSum | Mode::Relaxed => {
                    let sys = OrbitSystem::new(&w, n)?;
                    let v = match mode {
                        Mode::Relaxed => out.time("solve", || solve_relaxed(&w, &sys, k1, k2, &SolverOptions::default()))?,
                        _ => {
                            let objective = if mode == Mode::Ns { NsObjective::Joint } else { NsObjective::Sum };
                            let opts = NsOptions { objective, ..Default::default() };
                            out.time("solve", || solve_ns_with(&w, &sys, k1, k2, &opts))?.0
                        }
                    };
                    out.result(json!({ "value": v }));
                    if mode != Mode::NsSum {
                        let cert = certify_mode(&certify, n)?;
                        let cert = if cert == Certify::Exact && !w.is_exact() { Certify::Float(1e-7) } else { cert };
                        let verdict = out.time("certify", || certify_one(&w, &sys, k1, k2, program_kind(mode)?, cert))?;
                        println!("certification ({}): value one {}", certify_label(cert), if verdict.certified { "certified" } else { "not certified" });
                        out.result(json!({ "certify": certify_label(cert), "certified": verdict.certified }));
                    }
                    v
                }
            };
            println!("value {value:?}");
            out.csv("success.csv", format!("n,k1,k2,value\n{n},{k1},{k2},{value:?}\n"));
            out.finish()?;
            Ok(0)
        }
        Command::Frontier { common, n, mode, k1_min, k1_max, k2_max, certify } => {
            check_tier(&common, n)?;
            let w = load_channel(&common.channel)?;
            let kind = program_kind(mode)?;
            let k1_max = k1_max.unwrap_or_else(|| w.nx1().saturating_pow(n as u32));
            let mut cfg = ScanConfig::new(n, kind, k1_min..=k1_max);
            cfg.certify = certify_mode(&certify, n)?;
            cfg.k2_max = k2_max;
            let mut out = Output::new("frontier", &common.out);
            out.config(json!({ "channel": common.channel, "scan": &cfg }));
            let scan = out.time("scan", || zero_error_frontier(&w, &cfg))?;
            let mut csv = String::from("k1,k2,R1,R2\n");
            for row in &scan.rows {
                if let Some(e) = &row.error {
                    eprintln!("k1 = {}: {e}", row.k1);
                }
                println!("k1 {:>4}  max k2 {:>4}", row.k1, row.max_k2);
            }
            for p in &scan.points {
                let k = |name: &str| p.params.iter().find(|(n, _)| n == name).map_or(0.0, |x| x.1);
                csv.push_str(&format!("{},{},{:?},{:?}\n", k("k1"), k("k2"), p.r1, p.r2));
            }
            println!("max sum-rate {:.6}", scan.frontier.max_sum_rate());
            out.csv("frontier.csv", scan.frontier.to_csv());
            out.csv("points.csv", csv);
            out.result(serde_json::to_value(&scan.rows)?);
            out.finish()?;
            Ok(if scan.rows.iter().any(|r| r.error.is_some()) { EXIT_SOLVER } else { 0 })
        }
        Command::Region { common, kind, resolution, samples } => {
            let w = load_channel(&common.channel)?;
            let mut out = Output::new("region", &common.out);
            out.config(json!({ "channel": common.channel, "kind": kind, "resolution": resolution }));
            let is_bac = w == Channel::bac();
            let frontier: Frontier = match kind {
                RegionKind::Classical => {
                    let mut cfg = RegionConfig::classical();
                    cfg.resolution = resolution.unwrap_or(cfg.resolution);
                    out.time("grid", || classical_region(&w, &cfg))
                }
                RegionKind::Relaxed => {
                    let mut cfg = RegionConfig::relaxed();
                    cfg.resolution = resolution.unwrap_or(cfg.resolution);
                    out.time("grid", || relaxed_region(&w, &cfg))
                }
                RegionKind::ClassicalClosedForm | RegionKind::RelaxedClosedForm if !is_bac => {
                    bail!(Error::InvalidArgument("closed forms exist for the binary adder channel only".into()))
                }
                RegionKind::ClassicalClosedForm => bac_classical_closed_form_region(),
                RegionKind::RelaxedClosedForm => bac_relaxed_closed_form_region(resolution.unwrap_or(4096)),
            };
            let corner = frontier.sum_rate_corner().map(|p| (p.r1, p.r2));
            println!("max sum-rate {:.6}", frontier.max_sum_rate());
            if let Some((a, b)) = corner {
                println!("sum-rate corner ({a:.6}, {b:.6})");
            }
            out.result(json!({ "max_sum_rate": frontier.max_sum_rate(), "corner": corner }));
            let csv = match samples {
                Some(s) => frontier.to_sampled_csv(s),
                None => frontier.to_csv(),
            };
            out.csv("region.csv", csv);
            out.finish()?;
            Ok(0)
        }
        Command::Concat { common, n, kmax, radius } => {
            check_tier(&common, n)?;
            let w = load_channel(&common.channel)?;
            let kmax = kmax.unwrap_or(1 << n.min(20));
            let cells = match radius {
                Some(r) => diagonal_cells(kmax, r),
                None => grid_cells(1..=kmax, 1..=kmax),
            };
            let mut out = Output::new("concat", &common.out);
            out.config(json!({ "channel": common.channel, "n": n, "kmax": kmax, "radius": radius }));
            let scan = out.time("scan", || concat_scan(&w, n, &cells, &NsOptions::default()))?;
            let failed = scan.cells.iter().filter(|c| c.error.is_some()).count();
            println!("cells {} (failed {failed})", scan.cells.len());
            println!("best sum-rate {:.6}", scan.best_sum_rate());
            out.result(json!({ "best_sum_rate": scan.best_sum_rate(), "failed_cells": failed }));
            out.csv("concat.csv", scan.frontier.to_csv());
            out.csv("concat_points.csv", scan.points_csv());
            out.csv("concat.json", scan.sidecar_json());
            out.finish()?;
            Ok(if failed > 0 { EXIT_SOLVER } else { 0 })
        }
        Command::Converse { common, eps, law } => {
            let w = load_channel(&common.channel)?;
            let p = if law == "uniform" {
                JointDist::uniform_product(w.nx1(), w.nx2())
            } else {
                let probs = law
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().with_context(|| format!("`{s}` is not a probability")))
                    .collect::<anyhow::Result<Vec<f64>>>()?;
                JointDist::new(w.nx1(), w.nx2(), probs)?
            };
            let (a, b, c) = one_shot_converse(&w, &p, eps)?;
            println!("log2 k1   <= {a:.6}\nlog2 k2   <= {b:.6}\nlog2 k1k2 <= {c:.6}");
            let mut out = Output::new("converse", &common.out);
            out.config(json!({ "channel": common.channel, "eps": eps, "law": p.probs }));
            out.result(json!({ "log_k1": a, "log_k2": b, "log_k1k2": c }));
            out.csv("converse.csv", format!("eps,log_k1,log_k2,log_k1k2\n{eps:?},{a:?},{b:?},{c:?}\n"));
            out.finish()?;
            Ok(0)
        }
        Command::Indep { common, k1, k2, l1, l2, restarts } => {
            let w = load_channel(&common.channel)?;
            let mut out = Output::new("indep", &common.out);
            out.config(json!({ "channel": common.channel, "k1": k1, "k2": k2, "l1": l1, "l2": l2, "restarts": restarts }));
            let (v, _) = out.time("heuristic", || indep_ns_sum(&w, k1, k2, restarts, 1e-9))?;
            println!("independent assistance, sum objective: at least {v:.9}");
            out.result(json!({ "indep_lower_bound": v }));
            if let (Some(l1), Some(l2)) = (l1, l2) {
                let rep = out.time("check", || check_nssr_inequality(&w, k1, k2, l1, l2))?;
                println!(
                    "factor {:.6} x {:.9} = {:.9} <= classical sum success {:.9}: {}",
                    rep.factor,
                    rep.indep_value,
                    rep.left,
                    rep.right,
                    if rep.holds { "holds" } else { "VIOLATED" }
                );
                out.result(json!({ "factor": rep.factor, "left": rep.left, "right": rep.right, "holds": rep.holds }));
            }
            out.finish()?;
            Ok(0)
        }
        Command::Certify { common, n, k1, k2, mode, certify } => {
            check_tier(&common, n)?;
            let w = load_channel(&common.channel)?;
            let cert = Certify::parse(&certify)?;
            let sys = OrbitSystem::new(&w, n)?;
            let mut out = Output::new("certify", &common.out);
            out.config(json!({ "channel": common.channel, "n": n, "k1": k1, "k2": k2, "mode": mode, "certify": certify_label(cert) }));
            let v = out.time("certify", || certify_one(&w, &sys, k1, k2, program_kind(mode)?, cert))?;
            println!("value {:?}: {}", v.value, if v.certified { "certified one" } else { "not one" });
            out.result(json!({ "value": v.value, "certified": v.certified }));
            out.finish()?;
            Ok(if v.certified { 0 } else { EXIT_NOT_CERTIFIED })
        }
        Command::DumpLp { common, n, k1, k2, program, form, exact } => {
            check_tier(&common, n)?;
            let w = load_channel(&common.channel)?;
            let form = if form == Form::Standard { Formulation::Standard } else { Formulation::Compact };
            let text = if exact { dump::<BigRational>(&w, n, k1, k2, program, form)? } else { dump::<f64>(&w, n, k1, k2, program, form)? };
            match &common.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("program.mps"), text)?;
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn dump<T: nsmac_lp::Scalar>(w: &Channel, n: usize, k1: usize, k2: usize, kind: LpKind, form: Formulation) -> anyhow::Result<String> {
    let lp = match kind {
        LpKind::Ns => build_ns_lp_orbit::<T>(w, &OrbitSystem::new(w, n)?, k1, k2, NsObjective::Joint, form)?.lp,
        LpKind::Relaxed => build_relaxed_lp_orbit::<T>(w, &OrbitSystem::new(w, n)?, k1, k2)?.lp,
        LpKind::NsElement => build_ns_lp_element::<T>(&w.power(n), k1, k2, NsObjective::Joint)?.lp,
        LpKind::RelaxedElement => build_relaxed_lp_element::<T>(&w.power(n), k1, k2)?.lp,
    };
    Ok(write_mps(&lp))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Solver(_) | Error::Lp(_)) => EXIT_SOLVER,
        Some(Error::InvalidArgument(_) | Error::InvalidChannel(_) | Error::Parse { .. } | Error::NotExact) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
