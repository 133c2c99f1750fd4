//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Long-tier criteria only run with `NSMAC_LONG=1`; otherwise they print SKIP.
//! Criterion numbers given as arguments restrict the run to those criteria.
//! The process fails when any criterion that ran did not pass.

mod common;

use common::{random_channel, random_dist};
use nsmac::capacity::*;
use nsmac::classical::{brute_force_success, Objective, DEFAULT_BUDGET};
use nsmac::concat::{concat_scan, diagonal_cells};
use nsmac::frontier::{zero_error_frontier, ProgramKind, ScanConfig};
use nsmac::ns::*;
use nsmac::Channel;
use nsmac_lp::{solve, BigRational, LinearProgram, SolveMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e <= limit, format!("took {:.1} s, limit {:.0} s", e.as_secs_f64(), limit.as_secs_f64()))
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn value(lp: &LinearProgram<f64>) -> Result<f64, String> {
    let sol = solve(lp, SolveMode::Float).map_err(|e| e.to_string())?;
    ensure(sol.is_optimal(), format!("status {:?}", sol.status))?;
    Ok(sol.value)
}

fn ns(w: &Channel, sys: &OrbitSystem, k1: usize, k2: usize) -> Result<f64, String> {
    value(&build_ns_lp_orbit::<f64>(w, sys, k1, k2, NsObjective::Joint, Formulation::Compact).map_err(|e| e.to_string())?.lp)
}

fn relaxed(w: &Channel, sys: &OrbitSystem, k1: usize, k2: usize) -> Result<f64, String> {
    value(&build_relaxed_lp_orbit::<f64>(w, sys, k1, k2).map_err(|e| e.to_string())?.lp)
}

fn sys(w: &Channel, n: usize) -> Result<OrbitSystem, String> {
    OrbitSystem::new(w, n).map_err(|e| e.to_string())
}

fn shapes() -> Check {
    let w = Channel::bac();
    let mut out = Vec::new();
    for (n, vars, rows, limit) in [(2, 244, 480, 1), (3, 1112, 2054, 1), (7, 95592, 162324, 30)] {
        let t = Instant::now();
        let s = sys(&w, n)?;
        let p = build_ns_lp_orbit::<f64>(&w, &s, 42, 42, NsObjective::Joint, Formulation::Standard).map_err(|e| e.to_string())?;
        within(t, secs(limit))?;
        let got = (p.lp.num_vars(), p.lp.num_rows());
        ensure(got == (vars, rows), format!("n={n}: {got:?}, expected ({vars}, {rows})"))?;
        out.push(format!("n={n} {vars}/{rows} in {:.2} s", t.elapsed().as_secs_f64()));
    }
    Ok(out.join(", "))
}

fn adder_four_five() -> Check {
    let t = Instant::now();
    let w = Channel::bac();
    let s = sys(&w, 3)?;
    let (_, code) = solve_ns_with(&w, &s, 4, 5, &NsOptions::exact()).map_err(|e| e.to_string())?;
    within(t, secs(60))?;
    let exact = code.exact_value.ok_or("no exact value")?;
    ensure(exact == BigRational::from_integer(1.into()), format!("exact value {exact}"))?;
    let (r1, r2) = (4f64.log2() / 3.0, 5f64.log2() / 3.0);
    Ok(format!("exact 1 in {:.2} s, point ({r1:.4}, {r2:.4}), sum-rate {:.4}", t.elapsed().as_secs_f64(), r1 + r2))
}

fn adder_two_two() -> Check {
    let t = Instant::now();
    let w = Channel::bac();
    let s = sys(&w, 1)?;
    let v = ns(&w, &s, 2, 2)?;
    ensure((v - 0.75).abs() <= 1e-9, format!("float value {v}"))?;
    let (_, code) = solve_ns_with(&w, &s, 2, 2, &NsOptions::exact()).map_err(|e| e.to_string())?;
    let exact = code.exact_value.ok_or("no exact value")?;
    ensure(exact == BigRational::new(3.into(), 4.into()), format!("exact value {exact}"))?;
    within(t, secs(1))?;
    Ok(format!("float {v:.12}, exact {exact}"))
}

fn adder_regions() -> Check {
    let t = Instant::now();
    let w = Channel::bac();
    let classical = classical_region(&w, &RegionConfig::classical());
    let rel = relaxed_region(&w, &RegionConfig::relaxed());
    let c = classical.max_sum_rate();
    let r = rel.max_sum_rate();
    ensure((c - 1.5).abs() <= 1e-3, format!("classical max sum-rate {c}"))?;
    ensure((r - 3f64.log2()).abs() <= 1e-4, format!("relaxed max sum-rate {r}"))?;
    let dc = classical.distance(&bac_classical_closed_form_region(), 400);
    let dr = rel.distance(&bac_relaxed_closed_form_region(4096), 400);
    ensure(dc <= 1e-3 && dr <= 1e-3, format!("closed-form distances {dc:.2e}, {dr:.2e}"))?;
    within(t, secs(60))?;
    Ok(format!(
        "classical {c:.6}, relaxed {r:.6}, closed-form gaps {dc:.1e}/{dr:.1e}, {:.1} s",
        t.elapsed().as_secs_f64()
    ))
}

fn noisy_classical() -> Check {
    let t = Instant::now();
    let w = Channel::noisy_bac(1e-3, 1e-3).map_err(|e| e.to_string())?;
    let f = classical_region(&w, &RegionConfig::classical());
    let corner = f.sum_rate_corner().ok_or("empty region")?;
    let s = f.max_sum_rate();
    ensure(
        (corner.r1 - 0.4943).abs() <= 2e-3 && (corner.r2 - 0.9839).abs() <= 2e-3,
        format!("corner ({:.4}, {:.4})", corner.r1, corner.r2),
    )?;
    ensure((s - 1.478).abs() <= 2e-3, format!("max sum-rate {s}"))?;
    within(t, secs(300))?;
    Ok(format!("corner ({:.4}, {:.4}), sum-rate {s:.4}, {:.1} s", corner.r1, corner.r2, t.elapsed().as_secs_f64()))
}

fn noisy_zero_error() -> Check {
    let t = Instant::now();
    let e = BigRational::new(1.into(), 1000.into());
    let w = Channel::noisy_bac_exact(&e, &e).map_err(|e| e.to_string())?;
    for n in 1..=2 {
        let cfg = ScanConfig::new(n, ProgramKind::Ns, 1..=2usize.pow(n as u32));
        let scan = zero_error_frontier(&w, &cfg).map_err(|e| e.to_string())?;
        let pts: Vec<(f64, f64)> = scan.points.iter().map(|p| (p.r1, p.r2)).collect();
        ensure(pts == vec![(0.0, 0.0)], format!("n={n}: points {pts:?}"))?;
    }
    within(t, secs(120))?;
    Ok(format!("only (0,0) for n = 1, 2 in {:.1} s", t.elapsed().as_secs_f64()))
}

fn long_block_seven() -> Check {
    let t = Instant::now();
    let w = Channel::bac();
    let s = sys(&w, 7)?;
    let a = ns(&w, &s, 42, 42)?;
    let b = ns(&w, &s, 44, 44)?;
    let c = relaxed(&w, &s, 44, 44)?;
    let detail = format!("S(42,42) = {a:.9}, S(44,44) = {b:.6}, relaxed(44,44) = {c:.9}, {:.0} s", t.elapsed().as_secs_f64());
    ensure(a >= 1.0 - 1e-7 && (b - 0.9581).abs() <= 1e-3 && c >= 1.0 - 1e-7, detail.clone())?;
    within(t, secs(7200))?;
    Ok(detail)
}

fn long_concat_scan() -> Check {
    let t = Instant::now();
    let w = Channel::noisy_bac(1e-3, 1e-3).map_err(|e| e.to_string())?;
    let cells: Vec<(usize, usize)> = diagonal_cells(CONCAT_KMAX, 2).into_iter().filter(|&(a, b)| a * b >= CONCAT_MIN_PRODUCT).collect();
    let scan = concat_scan(&w, 5, &cells, &NsOptions::default()).map_err(|e| e.to_string())?;
    let best = scan.best_sum_rate();
    let failed = scan.cells.iter().filter(|c| c.error.is_some()).count();
    let detail = format!("{} cells ({failed} failed), best sum-rate {best:.4}, {:.0} s", scan.cells.len(), t.elapsed().as_secs_f64());
    ensure(best >= 1.49, detail.clone())?;
    within(t, secs(7200))?;
    Ok(detail)
}

/// Cells of the n = 5 scan: |k1 - k2| <= 2, k1, k2 <= 16, k1 k2 >= 100.
const CONCAT_KMAX: usize = 16;
const CONCAT_MIN_PRODUCT: usize = 100;

fn orbit_vs_element() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let ny = rng.gen_range(2..=3);
        let w = random_channel(&mut rng, 2, 2, ny);
        let n = rng.gen_range(1..=2);
        let (k1, k2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let s = sys(&w, n)?;
        let wn = w.power(n);
        let el = value(&build_ns_lp_element::<f64>(&wn, k1, k2, NsObjective::Joint).map_err(|e| e.to_string())?.lp)?;
        let rel_el = value(&build_relaxed_lp_element::<f64>(&wn, k1, k2).map_err(|e| e.to_string())?.lp)?;
        worst = worst.max((ns(&w, &s, k1, k2)? - el).abs()).max((relaxed(&w, &s, k1, k2)? - rel_el).abs());
    }
    ensure(worst <= 1e-7, format!("largest gap {worst:.2e}"))?;
    Ok(format!("20 channels, largest gap {worst:.1e}"))
}

fn invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7);
    let mut count = 0;
    for _ in 0..100 {
        let (nx1, nx2, ny) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let n = if nx1 * nx2 * ny <= 8 { rng.gen_range(1..=2) } else { 1 };
        let (k1, k2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let w = random_channel(&mut rng, nx1, nx2, ny);
        let s = sys(&w, n)?;
        let v = ns(&w, &s, k1, k2)?;
        let pow = |a: usize| a.pow(n as u32) as f64;
        let (f1, f2) = (k1 as f64, k2 as f64);
        let upper = (pow(nx1) / f1).min(pow(nx2) / f2).min(pow(ny) / (f1 * f2)).min(1.0);
        ensure(v >= 1.0 / (f1 * f2) - 1e-9 && v <= upper + 1e-9, format!("sandwich broken: {v} for ({k1},{k2})"))?;
        ensure(relaxed(&w, &s, k1, k2)? >= v - 1e-9, "relaxed below NS")?;
        ensure(ns(&w, &s, k1 + 1, k2)? <= v + 1e-9 && ns(&w, &s, k1, k2 + 1)? <= v + 1e-9, "not monotone")?;
        count += 1;
    }
    for _ in 0..10 {
        let a = random_channel(&mut rng, 2, 2, 2);
        let b = random_channel(&mut rng, 2, 2, 2);
        let (k1, k2, l1, l2) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
        let sa = ns(&a, &sys(&a, 1)?, k1, k2)?;
        let sb = ns(&b, &sys(&b, 1)?, l1, l2)?;
        let ab = a.tensor(&b);
        let sab = ns(&ab, &sys(&ab, 1)?, k1 * l1, k2 * l2)?;
        ensure(sab >= sa * sb - 1e-9, format!("supermultiplicativity: {sab} < {sa} * {sb}"))?;
        count += 1;
    }
    Ok(format!("{count} instances"))
}

fn error_sandwich() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe55);
    for _ in 0..25 {
        let (nx1, nx2, ny) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(2..=3));
        let (k1, k2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let w = random_channel(&mut rng, nx1, nx2, ny);
        let (j, _) = brute_force_success(&w, k1, k2, Objective::Joint, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let (s, _) = brute_force_success(&w, k1, k2, Objective::Sum, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let (e, es) = (1.0 - j, 1.0 - s);
        ensure(es <= e + 1e-12 && e <= 2.0 * es + 1e-12, format!("E = {e}, E_sum = {es}"))?;
    }
    Ok("25 instances".into())
}

fn boxes() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0c5);
    let mut cases: Vec<(Channel, usize, usize, usize)> = vec![(Channel::bac(), 1, 2, 2), (Channel::bac(), 1, 3, 2)];
    for _ in 0..15 {
        let ny = rng.gen_range(2..=3);
        cases.push((random_channel(&mut rng, 2, 2, ny), 1, rng.gen_range(1..=3), rng.gen_range(1..=3)));
    }
    for _ in 0..4 {
        cases.push((random_channel(&mut rng, 2, 2, 3), 2, rng.gen_range(2..=3), rng.gen_range(2..=3)));
    }
    let mut worst = 0.0f64;
    for (w, n, k1, k2) in &cases {
        let s = sys(w, *n)?;
        let (v, code) = solve_ns_with(w, &s, *k1, *k2, &NsOptions::default()).map_err(|e| e.to_string())?;
        let bx = reconstruct_box(&s, &code, DEFAULT_BOX_LIMIT).map_err(|e| e.to_string())?;
        let wn = w.power(*n);
        if *n == 1 {
            let rep = check_box(&bx, &wn);
            let gap = rep.non_signaling.max(rep.normalization).max((rep.success - v).abs()).max(-rep.min_entry);
            worst = worst.max(gap);
        }
        let stats = nsmac::concat::induced_stats(w, &s, &code).map_err(|e| e.to_string())?;
        let explicit = induced_channel_explicit(&bx, &wn).map_err(|e| e.to_string())?;
        let structured = stats.structured_channel().map_err(|e| e.to_string())?;
        let diff = explicit.probs().iter().zip(structured.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(diff <= 1e-7, format!("structured vs explicit differ by {diff:.2e} at n={n}"))?;
    }
    ensure(worst <= 1e-9, format!("box residual {worst:.2e}"))?;
    Ok(format!("{} codes, largest n=1 residual {worst:.1e}", cases.len()))
}

fn hypothesis_tests() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe7a);
    for _ in 0..20 {
        let size = rng.gen_range(1..=6);
        let p = random_dist(&mut rng, size);
        let eps = rng.gen_range(0.0..1.0);
        let b = beta_hypothesis(&p, &p, eps).map_err(|e| e.to_string())?;
        ensure((b - (1.0 - eps)).abs() <= 1e-9, format!("beta {b} vs {}", 1.0 - eps))?;
    }
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let w = random_channel(&mut rng, 2, 2, 3);
        let law = JointDist::product(&random_dist(&mut rng, 2), &random_dist(&mut rng, 2)).map_err(|e| e.to_string())?;
        let (a, b, c) = mutual_informations(&w, &law);
        let (x, y, z) = one_shot_converse(&w, &law, 1e-13).map_err(|e| e.to_string())?;
        worst = worst.max((x - a).abs()).max((y - b).abs()).max((z - c).abs());
    }
    ensure(worst <= 1e-10, format!("converse gap {worst:.2e}"))?;
    Ok(format!("20 beta checks, converse gap {worst:.1e}"))
}

fn nssr() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x55a);
    let mut channels = vec![Channel::bac()];
    for _ in 0..10 {
        channels.push(random_channel(&mut rng, 2, 2, 3));
    }
    let mut count = 0;
    for w in &channels {
        for (k1, k2, l1, l2) in [(2, 2, 1, 1), (2, 2, 2, 2), (3, 3, 2, 2), (3, 2, 1, 2), (2, 3, 3, 3), (3, 3, 3, 3), (1, 3, 1, 2)] {
            let rep = check_nssr_inequality(w, k1, k2, l1, l2).map_err(|e| e.to_string())?;
            ensure(rep.holds, format!("({k1},{k2},{l1},{l2}): {} > {}", rep.left, rep.right))?;
            count += 1;
        }
    }
    Ok(format!("{count} comparisons on {} channels", channels.len()))
}

enum Tier {
    Default,
    Long,
}

fn main() {
    let long = std::env::var("NSMAC_LONG").is_ok_and(|v| v == "1");
    // Numeric arguments pick criteria, e.g. `-- 7 8`; other arguments from the test runner are ignored.
    let picked: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: Vec<(u32, &str, Tier, fn() -> Check)> = vec![
        (1, "orbit program shapes", Tier::Default, shapes),
        (2, "adder n=3 (4,5) exact one", Tier::Default, adder_four_five),
        (3, "adder (2,2) three quarters", Tier::Default, adder_two_two),
        (4, "adder classical and relaxed regions", Tier::Default, adder_regions),
        (5, "noisy adder classical region", Tier::Default, noisy_classical),
        (6, "noisy adder zero-error frontier", Tier::Default, noisy_zero_error),
        (7, "adder n=7 long tier", Tier::Long, long_block_seven),
        (8, "noisy adder n=5 concatenated codes", Tier::Long, long_concat_scan),
        (9, "orbit vs element programs", Tier::Default, orbit_vs_element),
        (10, "program invariants", Tier::Default, invariants),
        (11, "classical error sandwich", Tier::Default, error_sandwich),
        (12, "reconstructed boxes", Tier::Default, boxes),
        (13, "hypothesis testing and converse", Tier::Default, hypothesis_tests),
        (14, "independent assistance comparison", Tier::Default, nssr),
    ];
    let mut failed = 0;
    for (id, name, tier, f) in criteria {
        if !picked.is_empty() && !picked.contains(&id) {
            continue;
        }
        if matches!(tier, Tier::Long) && !long {
            println!("criterion {id:>2} SKIP {name}: long tier, set NSMAC_LONG=1");
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
