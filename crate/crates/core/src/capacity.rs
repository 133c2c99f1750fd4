//! Single-letter rate regions, mutual informations, and one-shot converses.

use crate::channel::Channel;
use crate::error::{Error, Result};
use nsmac_lp::{solve_with, LinearProgram, Relation, Sense, SolverOptions};
use serde::Serialize;
use std::fmt::Write as _;

/// `0 log 0 = 0`, base 2.
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

pub fn entropy(dist: &[f64]) -> f64 {
    dist.iter().map(|&p| plogp(p)).sum()
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// Input law `P(x1, x2)`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointDist {
    pub nx1: usize,
    pub nx2: usize,
    pub probs: Vec<f64>,
    /// Factors when the law is a product.
    pub product: Option<(Vec<f64>, Vec<f64>)>,
}

impl JointDist {
    pub fn new(nx1: usize, nx2: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != nx1 * nx2 || probs.iter().any(|&p| !(p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("joint law must be a distribution on X1 x X2".into()));
        }
        Ok(JointDist { nx1, nx2, probs, product: None })
    }

    pub fn product(p1: &[f64], p2: &[f64]) -> Result<Self> {
        for p in [p1, p2] {
            if p.iter().any(|&v| !(v >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument("marginal must be a distribution".into()));
            }
        }
        let probs = p1.iter().flat_map(|&a| p2.iter().map(move |&b| a * b)).collect();
        Ok(JointDist { nx1: p1.len(), nx2: p2.len(), probs, product: Some((p1.to_vec(), p2.to_vec())) })
    }

    pub fn uniform_product(nx1: usize, nx2: usize) -> Self {
        JointDist::product(&vec![1.0 / nx1 as f64; nx1], &vec![1.0 / nx2 as f64; nx2]).expect("uniform law")
    }
}

/// `(I(X1:Y|X2), I(X2:Y|X1), I(X1X2:Y))` in bits.
pub fn mutual_informations(w: &Channel, p: &JointDist) -> (f64, f64, f64) {
    mi_raw(w, p.nx1, p.nx2, &p.probs)
}

fn mi_raw(w: &Channel, nx1: usize, nx2: usize, probs: &[f64]) -> (f64, f64, f64) {
    assert_eq!((nx1, nx2), (w.nx1(), w.nx2()));
    let ny = w.ny();
    let mut y_marg = vec![0.0; ny];
    let mut h_y_given_x = 0.0;
    let mut h_y_given_x2 = 0.0;
    let mut h_y_given_x1 = 0.0;
    let mut col = vec![0.0; ny];
    for x2 in 0..nx2 {
        col.iter_mut().for_each(|c| *c = 0.0);
        let mut mass = 0.0;
        for x1 in 0..nx1 {
            let q = probs[x1 * nx2 + x2];
            mass += q;
            for y in 0..ny {
                col[y] += q * w.get(x1, x2, y);
            }
        }
        h_y_given_x2 += mass_entropy(&col, mass);
    }
    for x1 in 0..nx1 {
        col.iter_mut().for_each(|c| *c = 0.0);
        let mut mass = 0.0;
        for x2 in 0..nx2 {
            let q = probs[x1 * nx2 + x2];
            mass += q;
            let mut h = 0.0;
            for y in 0..ny {
                let v = w.get(x1, x2, y);
                col[y] += q * v;
                y_marg[y] += q * v;
                h += plogp(v);
            }
            h_y_given_x += q * h;
        }
        h_y_given_x1 += mass_entropy(&col, mass);
    }
    let h_y = entropy(&y_marg);
    (
        (h_y_given_x2 - h_y_given_x).max(0.0),
        (h_y_given_x1 - h_y_given_x).max(0.0),
        (h_y - h_y_given_x).max(0.0),
    )
}

/// `mass * H(col / mass)` for an unnormalized slice.
fn mass_entropy(col: &[f64], mass: f64) -> f64 {
    if mass <= 0.0 {
        return 0.0;
    }
    col.iter().map(|&c| plogp(c)).sum::<f64>() + mass * mass.log2()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateSource {
    Classical,
    Relaxed,
    ClosedForm,
    ZeroErrorNs,
    ZeroErrorRelaxed,
    Concat,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    pub source: RateSource,
    pub params: Vec<(String, f64)>,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64, source: RateSource) -> Self {
        RatePoint { r1, r2, source, params: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Upper-right boundary of the convex, down-closed hull of a set of rate pairs.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Frontier {
    /// Vertices ordered by increasing `r1` (and so nonincreasing `r2`).
    pub vertices: Vec<RatePoint>,
}

fn cross(o: &RatePoint, a: &RatePoint, b: &RatePoint) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

impl Frontier {
    pub fn from_points(points: &[RatePoint]) -> Self {
        let pts: Vec<&RatePoint> = points.iter().filter(|p| p.r1.is_finite() && p.r2.is_finite()).collect();
        if pts.is_empty() {
            return Frontier::default();
        }
        let source = pts[0].source;
        let xmax = pts.iter().map(|p| p.r1).fold(0.0, f64::max);
        let ymax = pts.iter().map(|p| p.r2).fold(0.0, f64::max);
        let mut all: Vec<RatePoint> = pts.into_iter().cloned().collect();
        all.push(RatePoint::new(0.0, ymax, source));
        all.push(RatePoint::new(xmax, 0.0, source));
        all.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(b.r2.total_cmp(&a.r2)));
        // Upper hull, left to right.
        let mut hull: Vec<RatePoint> = Vec::new();
        for p in all {
            if hull.last().is_some_and(|l| l.r1 == p.r1) {
                continue;
            }
            while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) >= -1e-15 {
                hull.pop();
            }
            hull.push(p);
        }
        // The hull starts at (0, ymax), so only the nonincreasing part remains.
        let mut vertices: Vec<RatePoint> = Vec::new();
        for p in hull {
            if vertices.last().map_or(true, |l| p.r2 <= l.r2) {
                vertices.push(p);
            }
        }
        Frontier { vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn max_sum_rate(&self) -> f64 {
        self.vertices.iter().map(RatePoint::sum).fold(0.0, f64::max)
    }

    /// Vertex achieving the largest sum rate with the smallest `r1`.
    pub fn sum_rate_corner(&self) -> Option<&RatePoint> {
        let best = self.max_sum_rate();
        self.vertices.iter().find(|p| p.sum() >= best - 1e-9)
    }

    /// Largest `r2` in the region at rate `r1` (`None` beyond the region).
    pub fn value_at(&self, r1: f64) -> Option<f64> {
        let v = &self.vertices;
        if v.is_empty() || r1 < 0.0 || r1 > v[v.len() - 1].r1 + 1e-12 {
            return None;
        }
        if r1 <= v[0].r1 {
            return Some(v[0].r2);
        }
        for pair in v.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if r1 <= b.r1 {
                if b.r1 == a.r1 {
                    return Some(a.r2);
                }
                let t = (r1 - a.r1) / (b.r1 - a.r1);
                return Some(a.r2 + t * (b.r2 - a.r2));
            }
        }
        Some(v[v.len() - 1].r2)
    }

    pub fn max_r1(&self) -> f64 {
        self.vertices.last().map_or(0.0, |p| p.r1)
    }

    /// Largest gap between the two boundaries, sampled at `samples + 1` rates.
    pub fn distance(&self, other: &Frontier, samples: usize) -> f64 {
        let top = self.max_r1().max(other.max_r1());
        let mut worst = 0.0f64;
        for i in 0..=samples {
            let x = top * i as f64 / samples as f64;
            let a = self.value_at(x).unwrap_or(0.0);
            let b = other.value_at(x).unwrap_or(0.0);
            worst = worst.max((a - b).abs());
        }
        worst
    }

    /// `R1,R2` vertices with shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R1,R2\n");
        for p in &self.vertices {
            let _ = writeln!(out, "{:?},{:?}", p.r1, p.r2);
        }
        out
    }

    /// `R1,R2` at `samples + 1` evenly spaced rates.
    pub fn to_sampled_csv(&self, samples: usize) -> String {
        let mut out = String::from("R1,R2\n");
        let top = self.max_r1();
        for i in 0..=samples {
            let x = top * i as f64 / samples as f64;
            if let Some(y) = self.value_at(x) {
                let _ = writeln!(out, "{x:.6},{y:.6}");
            }
        }
        out
    }
}

/// The two nontrivial corners of the pentagon of `(a, b, c)` bounds.
pub fn pentagon_corners(a: f64, b: f64, c: f64) -> [(f64, f64); 2] {
    let (a, b) = (a.min(c), b.min(c));
    [(a, b.min(c - a).max(0.0)), (a.min(c - b).max(0.0), b)]
}

fn pentagon_points(mi: (f64, f64, f64), source: RateSource, out: &mut Vec<RatePoint>, tag: &[(String, f64)]) {
    for (r1, r2) in pentagon_corners(mi.0, mi.1, mi.2) {
        let mut p = RatePoint::new(r1, r2, source);
        p.params = tag.to_vec();
        out.push(p);
    }
}

/// Compositions of `total` into `parts` nonnegative parts, lexicographic.
fn compositions(total: usize, parts: usize, mut f: impl FnMut(&[usize])) {
    let mut cur = vec![0usize; parts];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            f(cur);
            return;
        }
        for c in 0..=left {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, f);
        }
    }
    rec(0, total, &mut cur, &mut f);
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionConfig {
    /// Grid steps per unit of probability.
    pub resolution: usize,
    /// Finer grid around the best laws; 0 disables refinement.
    pub refine: usize,
}

impl RegionConfig {
    pub fn classical() -> Self {
        RegionConfig { resolution: 512, refine: 16 }
    }

    pub fn relaxed() -> Self {
        RegionConfig { resolution: 128, refine: 32 }
    }
}

/// Laws on the grid of step `1/resolution` (mass spread over `parts` cells).
fn simplex_grid(parts: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    compositions(resolution, parts, |c| out.push(c.iter().map(|&v| v as f64 / resolution as f64).collect()));
    out
}

/// Laws within `radius` of `center` on a grid of step `step`, clipped to the simplex.
fn local_grid(center: &[f64], radius: f64, steps: usize) -> Vec<Vec<f64>> {
    let n = center.len();
    if n == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    let offsets: Vec<f64> = (0..=2 * steps).map(|i| -radius + radius * i as f64 / steps as f64).collect();
    let mut idx = vec![0usize; n - 1];
    loop {
        let mut law: Vec<f64> = (0..n - 1).map(|i| center[i] + offsets[idx[i]]).collect();
        let last = 1.0 - law.iter().sum::<f64>();
        law.push(last);
        if law.iter().all(|&v| v >= 0.0) {
            out.push(law);
        }
        let Some(pos) = (0..n - 1).rev().find(|&i| idx[i] + 1 < offsets.len()) else { break };
        idx[pos] += 1;
        for v in &mut idx[pos + 1..] {
            *v = 0;
        }
    }
    out
}

/// Tracks the laws giving the best sum rate and best corners.
struct Leaders {
    best: [(f64, Vec<f64>); 3],
}

impl Leaders {
    fn new() -> Self {
        Leaders { best: [(f64::NEG_INFINITY, Vec::new()), (f64::NEG_INFINITY, Vec::new()), (f64::NEG_INFINITY, Vec::new())] }
    }

    fn offer(&mut self, mi: (f64, f64, f64), law: &[f64]) {
        let [c1, c2] = pentagon_corners(mi.0, mi.1, mi.2);
        // Sum rate, then corners weighted toward each axis.
        let scores = [mi.2.min(mi.0 + mi.1), c1.0 + 1e-3 * c1.1, c2.1 + 1e-3 * c2.0];
        for (slot, s) in self.best.iter_mut().zip(scores) {
            if s > slot.0 {
                *slot = (s, law.to_vec());
            }
        }
    }
}

/// Union of pentagons over product input laws, as a frontier.
pub fn classical_region(w: &Channel, cfg: &RegionConfig) -> Frontier {
    let g1 = simplex_grid(w.nx1(), cfg.resolution);
    let g2 = simplex_grid(w.nx2(), cfg.resolution);
    let mut points = Vec::new();
    let mut leaders = Leaders::new();
    let mut probs = vec![0.0; w.nx1() * w.nx2()];
    let mut eval = |p1: &[f64], p2: &[f64], points: &mut Vec<RatePoint>, leaders: &mut Leaders| {
        for (i, a) in p1.iter().enumerate() {
            for (j, b) in p2.iter().enumerate() {
                probs[i * p2.len() + j] = a * b;
            }
        }
        let mi = mi_raw(w, w.nx1(), w.nx2(), &probs);
        let law: Vec<f64> = p1.iter().chain(p2.iter()).copied().collect();
        leaders.offer(mi, &law);
        for (r1, r2) in pentagon_corners(mi.0, mi.1, mi.2) {
            points.push(RatePoint::new(r1, r2, RateSource::Classical));
        }
    };
    for p1 in &g1 {
        for p2 in &g2 {
            eval(p1, p2, &mut points, &mut leaders);
        }
    }
    if cfg.refine > 0 {
        let radius = 1.0 / cfg.resolution as f64;
        for (_, law) in leaders.best.clone() {
            let (c1, c2) = law.split_at(w.nx1());
            let l1 = local_grid(c1, radius, cfg.refine);
            let l2 = local_grid(c2, radius, cfg.refine);
            for p1 in &l1 {
                for p2 in &l2 {
                    eval(p1, p2, &mut points, &mut leaders);
                }
            }
        }
    }
    Frontier::from_points(&points)
}

/// Union of pentagons over all joint input laws, as a frontier.
pub fn relaxed_region(w: &Channel, cfg: &RegionConfig) -> Frontier {
    let (nx1, nx2) = (w.nx1(), w.nx2());
    let mut points = Vec::new();
    let mut leaders = Leaders::new();
    let eval = |law: &[f64], points: &mut Vec<RatePoint>, leaders: &mut Leaders| {
        let mi = mi_raw(w, nx1, nx2, law);
        leaders.offer(mi, law);
        pentagon_points(mi, RateSource::Relaxed, points, &[]);
    };
    compositions(cfg.resolution, nx1 * nx2, |c| {
        let law: Vec<f64> = c.iter().map(|&v| v as f64 / cfg.resolution as f64).collect();
        eval(&law, &mut points, &mut leaders);
    });
    if cfg.refine > 0 {
        let radius = 1.0 / cfg.resolution as f64;
        for (_, law) in leaders.best.clone() {
            for l in local_grid(&law, radius, cfg.refine.min(8)) {
                eval(&l, &mut points, &mut leaders);
            }
        }
    }
    Frontier::from_points(&points)
}

/// Relaxed-region bounds of the adder channel for the correlation parameter `q`.
pub fn bac_relaxed_closed_form(q: f64) -> Result<(f64, f64, f64)> {
    if !(0.5..=2.0 / 3.0 + 1e-15).contains(&q) {
        return Err(Error::InvalidArgument("q must lie in [1/2, 2/3]".into()));
    }
    let h = h2(q);
    Ok((h, h, q + h))
}

/// Frontier of the closed-form relaxed region sampled at `samples + 1` values of `q`.
pub fn bac_relaxed_closed_form_region(samples: usize) -> Frontier {
    let mut points = Vec::new();
    for i in 0..=samples {
        let q = 0.5 + (2.0 / 3.0 - 0.5) * i as f64 / samples as f64;
        let (a, b, c) = bac_relaxed_closed_form(q).expect("q in range");
        for (r1, r2) in pentagon_corners(a, b, c) {
            points.push(RatePoint::new(r1, r2, RateSource::ClosedForm).with("q", q));
        }
    }
    Frontier::from_points(&points)
}

/// Classical region of the adder channel: the uniform-input pentagon `(1, 1, 3/2)`.
pub fn bac_classical_closed_form_region() -> Frontier {
    let points: Vec<RatePoint> =
        pentagon_corners(1.0, 1.0, 1.5).iter().map(|&(a, b)| RatePoint::new(a, b, RateSource::ClosedForm)).collect();
    Frontier::from_points(&points)
}

/// `beta_{1-eps}(P0, P1)`: least `P1` mass of a test accepting `P0` with probability at least `1 - eps`.
pub fn beta_hypothesis(p0: &[f64], p1: &[f64], eps: f64) -> Result<f64> {
    if p0.len() != p1.len() || !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument("need equal supports and eps in [0, 1]".into()));
    }
    let n = p0.len();
    let mut lp = LinearProgram::<f64>::new(Sense::Minimize).with_name("beta");
    for j in 0..n {
        lp.add_var(Some(0.0), Some(1.0));
        lp.set_objective(j, p1[j]);
    }
    lp.add_row((0..n).map(|j| (j, p0[j])).collect(), Relation::Ge, 1.0 - eps);
    let sol = solve_with(&lp, &SolverOptions::default().internal())?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!("test program finished with status {:?}", sol.status)));
    }
    Ok(sol.value.max(0.0))
}

/// Caps on `log2 k1`, `log2 k2`, `log2 k1k2` for codes with error at most `eps` under law `p`.
pub fn one_shot_converse(w: &Channel, p: &JointDist, eps: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidArgument("eps must lie in [0, 1)".into()));
    }
    let (a, b, c) = mutual_informations(w, p);
    if eps == 0.0 {
        return Ok((a, b, c));
    }
    let h = h2(eps);
    let s = 1.0 - eps;
    Ok(((a + h) / s, (b + h) / s, (c + h) / s))
}
