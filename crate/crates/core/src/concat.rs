//! Achievable rates from concatenating an outer classical code with a
//! non-signaling inner code.
//!
//! The reconstructed box only looks at whether each decoded message equals
//! the sent one, so the induced message channel has four distinct entries:
//! `a` (both right), `b` (first wrong), `c` (second wrong), `d` (both wrong).

use crate::capacity::{Frontier, RatePoint, RateSource};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::ns::{solve_ns_with, NsCode, NsOptions, OrbitSystem};
use crate::orbit::orbit_channel_value;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedChannelStats {
    pub k1: usize,
    pub k2: usize,
    /// Success mass.
    pub big_a: f64,
    /// Mass where the second message is right.
    pub big_b1: f64,
    /// Mass where the first message is right.
    pub big_b2: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

const ROW_TOLERANCE: f64 = 1e-6;

/// Aggregates a code into the four transition values of its induced channel.
///
/// Each of the four masses is summed from nonnegative parts, so solver noise
/// cannot make an entry negative; the row is then renormalized.
pub fn induced_stats(w: &Channel, sys: &OrbitSystem, code: &NsCode) -> Result<InducedChannelStats> {
    code.check_against(w, sys)?;
    let (k1, k2) = (code.k1, code.k2);
    let norm = (k1 * k2) as f64;
    let (mut same, mut e1, mut e2, mut both) = (0.0, 0.0, 0.0, 0.0);
    for wi in 0..code.r.len() {
        let v = orbit_channel_value::<f64>(w, sys.triples.get(wi))?;
        if v == 0.0 {
            continue;
        }
        let (r, r1, r2) = (code.r[wi].max(0.0), code.r1[wi], code.r2[wi]);
        let c = sys.triples.size_f64(wi) / sys.pairs.size_f64(sys.w_pair[wi]);
        let p = c * code.p[sys.w_pair[wi]];
        same += v * r;
        e1 += v * (r1 - r).max(0.0);
        e2 += v * (r2 - r).max(0.0);
        both += v * (p - r1 - r2 + r).max(0.0);
    }
    let total = (same + e1 + e2 + both) / norm;
    if (total - 1.0).abs() > ROW_TOLERANCE {
        return Err(Error::InvalidArgument(format!("code does not induce a channel (row mass {total})")));
    }
    let scale = norm * total;
    let (same, e1, e2, both) = (same / scale, e1 / scale, e2 / scale, both / scale);
    let div = |x: f64, m: usize| if m == 0 { 0.0 } else { x / m as f64 };
    Ok(InducedChannelStats {
        k1,
        k2,
        big_a: same,
        big_b1: same + e1,
        big_b2: same + e2,
        a: same,
        b: div(e1, k1 - 1),
        c: div(e2, k2 - 1),
        d: div(both, (k1 - 1) * (k2 - 1)),
    })
}

impl InducedChannelStats {
    pub fn row_sum(&self) -> f64 {
        let (m1, m2) = ((self.k1 - 1) as f64, (self.k2 - 1) as f64);
        self.a + m1 * self.b + m2 * self.c + m1 * m2 * self.d
    }

    /// The induced channel as a MAC from message pairs to decoded pairs `j1 * k2 + j2`.
    pub fn structured_channel(&self) -> Result<Channel> {
        let (k1, k2) = (self.k1, self.k2);
        let mut probs = Vec::with_capacity(k1 * k2 * k1 * k2);
        for i1 in 0..k1 {
            for i2 in 0..k2 {
                for j1 in 0..k1 {
                    for j2 in 0..k2 {
                        probs.push(match (j1 == i1, j2 == i2) {
                            (true, true) => self.a,
                            (false, true) => self.b,
                            (true, false) => self.c,
                            (false, false) => self.d,
                        });
                    }
                }
            }
        }
        Channel::new(k1, k2, k1 * k2, probs)
    }
}

/// `-sum count * v log2 v` over `(value, multiplicity)` pairs.
fn weighted_entropy(parts: &[(f64, usize)]) -> f64 {
    parts
        .iter()
        .filter(|(v, m)| *v > 0.0 && *m > 0)
        .map(|&(v, m)| -(m as f64) * v * v.log2())
        .sum()
}

/// Informations of the induced channel under uniform messages, in bits per block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedInformations {
    pub h_j: f64,
    /// `I(I1:J|I2)`
    pub first_given_second: f64,
    /// `I(I2:J)`
    pub second: f64,
    /// `I(I1:J)`
    pub first: f64,
    /// `I(I2:J|I1)`
    pub second_given_first: f64,
    /// `I(I1 I2:J)`
    pub joint: f64,
}

pub fn induced_informations(s: &InducedChannelStats) -> InducedInformations {
    let (k1, k2) = (s.k1, s.k2);
    let (f1, f2) = (k1 as f64, k2 as f64);
    let h_j = (f1 * f2).log2();
    let h_noise = weighted_entropy(&[(s.a, 1), (s.b, k1 - 1), (s.c, k2 - 1), (s.d, (k1 - 1) * (k2 - 1))]);
    let alpha = (s.a + (f1 - 1.0) * s.b) / f1;
    let beta = (s.c + (f1 - 1.0) * s.d) / f1;
    let h_given_i2 = weighted_entropy(&[(alpha, k1), (beta, k1 * (k2 - 1))]);
    let gamma = (s.a + (f2 - 1.0) * s.c) / f2;
    let delta = (s.b + (f2 - 1.0) * s.d) / f2;
    let h_given_i1 = weighted_entropy(&[(gamma, k2), (delta, k2 * (k1 - 1))]);
    let clamp = |v: f64| if v > -1e-10 { v.max(0.0) } else { v };
    InducedInformations {
        h_j,
        first_given_second: clamp(h_given_i2 - h_noise),
        second: clamp(h_j - h_given_i2),
        first: clamp(h_j - h_given_i1),
        second_given_first: clamp(h_given_i1 - h_noise),
        joint: clamp(h_j - h_noise),
    }
}

/// The two corners of the induced channel's uniform-input pentagon, per channel use.
pub fn corner_rates(s: &InducedChannelStats, n: usize) -> [RatePoint; 2] {
    let inf = induced_informations(s);
    let n = n as f64;
    let tag = |p: RatePoint| p.with("n", n).with("k1", s.k1 as f64).with("k2", s.k2 as f64);
    [
        tag(RatePoint::new(inf.first_given_second / n, inf.second / n, RateSource::Concat)),
        tag(RatePoint::new(inf.first / n, inf.second_given_first / n, RateSource::Concat)),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcatCell {
    pub n: usize,
    pub k1: usize,
    pub k2: usize,
    pub value: Option<f64>,
    pub stats: Option<InducedChannelStats>,
    pub corners: Vec<RatePoint>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcatScan {
    pub cells: Vec<ConcatCell>,
    pub frontier: Frontier,
}

impl ConcatScan {
    pub fn best_sum_rate(&self) -> f64 {
        self.cells.iter().flat_map(|c| &c.corners).map(RatePoint::sum).fold(0.0, f64::max)
    }

    /// Per-cell metadata for the CSV sidecar.
    pub fn sidecar_json(&self) -> String {
        let cells: Vec<serde_json::Value> = self
            .cells
            .iter()
            .map(|c| {
                serde_json::json!({
                    "n": c.n,
                    "k1": c.k1,
                    "k2": c.k2,
                    "value": c.value,
                    "A": c.stats.as_ref().map(|s| s.big_a),
                    "B1": c.stats.as_ref().map(|s| s.big_b1),
                    "B2": c.stats.as_ref().map(|s| s.big_b2),
                    "corners": c.corners.iter().map(|p| [p.r1, p.r2]).collect::<Vec<_>>(),
                    "error": c.error,
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "cells": cells })).expect("json")
    }

    /// Every corner as `R1,R2,k1,k2`.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("R1,R2,k1,k2\n");
        for c in &self.cells {
            for p in &c.corners {
                let _ = writeln!(out, "{:?},{:?},{},{}", p.r1, p.r2, c.k1, c.k2);
            }
        }
        out
    }
}

/// Solves every `(k1, k2)` cell (k1 outer), turning optimal codes into corner rates.
pub fn concat_scan(w: &Channel, n: usize, cells: &[(usize, usize)], opts: &NsOptions) -> Result<ConcatScan> {
    let sys = OrbitSystem::new(w, n)?;
    let mut order = cells.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut out = Vec::with_capacity(order.len());
    for (k1, k2) in order {
        let mut cell = ConcatCell { n, k1, k2, value: None, stats: None, corners: Vec::new(), error: None };
        match solve_ns_with(w, &sys, k1, k2, opts).and_then(|(v, code)| Ok((v, induced_stats(w, &sys, &code)?))) {
            Ok((v, stats)) => {
                cell.value = Some(v);
                cell.corners = corner_rates(&stats, n).to_vec();
                cell.stats = Some(stats);
            }
            Err(e) => {
                log::warn!("cell ({k1}, {k2}) failed: {e}");
                cell.error = Some(e.to_string());
            }
        }
        log::info!("concat n={n} ({k1},{k2}) value {:?}", cell.value);
        out.push(cell);
    }
    let points: Vec<RatePoint> = out.iter().flat_map(|c| c.corners.iter().cloned()).collect();
    Ok(ConcatScan { frontier: Frontier::from_points(&points), cells: out })
}

/// `(k1, k2)` with `k1 <= kmax` and `|k1 - k2| <= radius`.
pub fn diagonal_cells(kmax: usize, radius: usize) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for k1 in 1..=kmax {
        for k2 in k1.saturating_sub(radius).max(1)..=(k1 + radius).min(kmax) {
            cells.push((k1, k2));
        }
    }
    cells
}

/// Every `(k1, k2)` in the two ranges.
pub fn grid_cells(k1s: std::ops::RangeInclusive<usize>, k2s: std::ops::RangeInclusive<usize>) -> Vec<(usize, usize)> {
    k1s.flat_map(|a| k2s.clone().map(move |b| (a, b))).collect()
}
