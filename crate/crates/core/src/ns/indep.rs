//! Independent non-signaling assistance between each sender and the receiver.
//!
//! The sum-success program is bilinear in the two sides. Fixing one side
//! leaves an LP in the other, so we alternate, starting from a few seeds.

use crate::channel::Channel;
use crate::classical::{brute_force_success, Decoder, Objective, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use nsmac_lp::{solve_with, LinearProgram, Relation, Sense, SolverOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One sender's share: `r[x * ny + y]` and `p[x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Side {
    pub r: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndepNsStrategy {
    pub first: Side,
    pub second: Side,
    pub value: f64,
}

const MAX_ROUNDS: usize = 500;
const SEED: u64 = 0x5eed;

/// Sum-success objective of a strategy.
pub fn indep_value(w: &Channel, k1: usize, k2: usize, s1: &Side, s2: &Side) -> f64 {
    let ny = w.ny();
    let mut total = 0.0;
    for x1 in 0..w.nx1() {
        for x2 in 0..w.nx2() {
            for y in 0..ny {
                let v = w.get(x1, x2, y);
                total += v * (s2.p[x2] * s1.r[x1 * ny + y] + s1.p[x1] * s2.r[x2 * ny + y]);
            }
        }
    }
    total / (2 * k1 * k2) as f64
}

/// Largest violation of the side constraints.
pub fn side_violation(s: &Side, k: usize, ny: usize) -> f64 {
    let nx = s.p.len();
    let mut worst = (s.p.iter().sum::<f64>() - k as f64).abs();
    for y in 0..ny {
        worst = worst.max(((0..nx).map(|x| s.r[x * ny + y]).sum::<f64>() - 1.0).abs());
    }
    for x in 0..nx {
        for y in 0..ny {
            let r = s.r[x * ny + y];
            worst = worst.max(-r).max(r - s.p[x]);
        }
    }
    worst
}

/// `(gain on r[x*ny+y], gain on p[x])` for the first side given the second;
/// `swap` exchanges the roles of the senders.
fn linear_gains(w: &Channel, other: &Side, swap: bool) -> (Vec<f64>, Vec<f64>) {
    let ny = w.ny();
    let (nx, nz) = if swap { (w.nx2(), w.nx1()) } else { (w.nx1(), w.nx2()) };
    let get = |x: usize, z: usize, y: usize| if swap { w.get(z, x, y) } else { w.get(x, z, y) };
    let mut gr = vec![0.0; nx * ny];
    let mut gp = vec![0.0; nx];
    for x in 0..nx {
        for z in 0..nz {
            for y in 0..ny {
                let v = get(x, z, y);
                gr[x * ny + y] += v * other.p[z];
                gp[x] += v * other.r[z * ny + y];
            }
        }
    }
    (gr, gp)
}

fn best_response(w: &Channel, k: usize, other: &Side, swap: bool, solver: &SolverOptions) -> Result<Side> {
    let ny = w.ny();
    let (gr, gp) = linear_gains(w, other, swap);
    let nx = gp.len();
    let mut lp = LinearProgram::<f64>::new(Sense::Maximize).with_name("indep_side");
    lp.add_vars(nx * ny + nx);
    for (j, g) in gr.iter().enumerate() {
        lp.set_objective(j, *g);
    }
    for (x, g) in gp.iter().enumerate() {
        lp.set_objective(nx * ny + x, *g);
    }
    for y in 0..ny {
        lp.add_row((0..nx).map(|x| (x * ny + y, 1.0)).collect(), Relation::Eq, 1.0);
    }
    lp.add_row((0..nx).map(|x| (nx * ny + x, 1.0)).collect(), Relation::Eq, k as f64);
    for x in 0..nx {
        for y in 0..ny {
            lp.add_row(vec![(x * ny + y, 1.0), (nx * ny + x, -1.0)], Relation::Le, 0.0);
        }
    }
    let sol = solve_with(&lp, solver)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!("side program finished with status {:?}", sol.status)));
    }
    let x = sol.primal;
    Ok(Side { r: x[..nx * ny].iter().map(|v| v.max(0.0)).collect(), p: x[nx * ny..].to_vec() })
}

fn uniform_side(nx: usize, ny: usize, k: usize) -> Side {
    Side { r: vec![1.0 / nx as f64; nx * ny], p: vec![k as f64 / nx as f64; nx] }
}

fn random_side(nx: usize, ny: usize, k: usize, rng: &mut ChaCha8Rng) -> Side {
    let weights: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let p: Vec<f64> = weights.iter().map(|v| k as f64 * v / total).collect();
    // r proportional to p keeps r <= p whenever k >= 1.
    let r = (0..nx * ny).map(|j| p[j / ny] / k as f64).collect();
    Side { r, p }
}

/// Deterministic code as a feasible point: `p[x]` counts messages sent as `x`,
/// `r[x, y] = 1` for the codeword of the decoded message.
fn classical_side(enc: &[usize], dec: &[usize], nx: usize, ny: usize) -> Side {
    let mut p = vec![0.0; nx];
    for &x in enc {
        p[x] += 1.0;
    }
    let mut r = vec![0.0; nx * ny];
    for (y, &m) in dec.iter().enumerate() {
        r[enc[m] * ny + y] = 1.0;
    }
    Side { r, p }
}

fn alternate(w: &Channel, k1: usize, k2: usize, mut s1: Side, mut s2: Side, tol: f64, solver: &SolverOptions) -> Result<IndepNsStrategy> {
    let mut value = indep_value(w, k1, k2, &s1, &s2);
    for _ in 0..MAX_ROUNDS {
        let n1 = best_response(w, k1, &s2, false, solver)?;
        let n2 = best_response(w, k2, &n1, true, solver)?;
        let v = indep_value(w, k1, k2, &n1, &n2);
        if v > value {
            s1 = n1;
            s2 = n2;
        }
        let improved = v - value;
        value = value.max(v);
        if improved < tol {
            break;
        }
    }
    Ok(IndepNsStrategy { first: s1, second: s2, value })
}

/// Lower bound on `S_sum^{NS_SR}(W, k1, k2)` from alternating maximization.
///
/// Seeds, in order: uniform, the classical sum-optimal code (when brute force
/// fits the default budget), then `restarts - 2` pseudo-random points.
pub fn indep_ns_sum(w: &Channel, k1: usize, k2: usize, restarts: usize, tol: f64) -> Result<(f64, IndepNsStrategy)> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::InvalidArgument("message counts must be positive".into()));
    }
    let solver = SolverOptions::default().internal();
    let ny = w.ny();
    let mut seeds = vec![(uniform_side(w.nx1(), ny, k1), uniform_side(w.nx2(), ny, k2))];
    if let Ok((_, table)) = brute_force_success(w, k1, k2, Objective::Sum, DEFAULT_BUDGET) {
        if let Decoder::Separate(d1, d2) = &table.decoder {
            seeds.push((classical_side(&table.enc1, d1, w.nx1(), ny), classical_side(&table.enc2, d2, w.nx2(), ny)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    while seeds.len() < restarts.max(1) {
        seeds.push((random_side(w.nx1(), ny, k1, &mut rng), random_side(w.nx2(), ny, k2, &mut rng)));
    }
    let mut best: Option<IndepNsStrategy> = None;
    for (s1, s2) in seeds {
        let start = indep_value(w, k1, k2, &s1, &s2);
        let mut run = alternate(w, k1, k2, s1.clone(), s2.clone(), tol, &solver)?;
        if run.value < start {
            run = IndepNsStrategy { first: s1, second: s2, value: start };
        }
        if best.as_ref().map_or(true, |b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one seed");
    Ok((best.value, best))
}

/// `(k / l) (1 - (1 - 1/k)^l)`
pub fn nssr_factor(k: usize, l: usize) -> f64 {
    let k = k as f64;
    (k / l as f64) * (1.0 - (1.0 - 1.0 / k).powi(l as i32))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NssrReport {
    pub factor: f64,
    /// Heuristic lower bound on the assisted sum success.
    pub indep_value: f64,
    pub left: f64,
    /// Classical `S_sum(W, l1, l2)`.
    pub right: f64,
    pub holds: bool,
}

/// Compares `factor * S_sum^{NS_SR}(W,k1,k2)` (lower bound) with `S_sum(W,l1,l2)`.
pub fn check_nssr_inequality(w: &Channel, k1: usize, k2: usize, l1: usize, l2: usize) -> Result<NssrReport> {
    if l1 == 0 || l2 == 0 {
        return Err(Error::InvalidArgument("list sizes must be positive".into()));
    }
    let (right, _) = brute_force_success(w, l1, l2, Objective::Sum, DEFAULT_BUDGET)?;
    let (indep_value, _) = indep_ns_sum(w, k1, k2, 4, 1e-9)?;
    let factor = nssr_factor(k1, l1).min(nssr_factor(k2, l2));
    let left = factor * indep_value;
    Ok(NssrReport { factor, indep_value, left, right, holds: left <= right + 1e-12 })
}
