//! Exhaustive classical success probabilities for tiny instances.
//!
//! For fixed encoders the best decoder is a pointwise argmax, so only encoders
//! are enumerated. Relabeling messages does not change the value, so each
//! encoder is taken up to order (a nondecreasing codeword list).

use crate::channel::{Channel, P2pChannel};
use crate::error::{Error, Result};
use num_integer::binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Both messages decoded correctly.
    Joint,
    /// Average of the two per-message success probabilities.
    Sum,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decoder {
    /// Output `y` decodes to the message pair `pairs[y]`.
    Joint(Vec<(usize, usize)>),
    /// Independent guesses `first[y]`, `second[y]`.
    Separate(Vec<usize>, Vec<usize>),
}

/// Deterministic encoders and decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeTable {
    pub enc1: Vec<usize>,
    pub enc2: Vec<usize>,
    pub decoder: Decoder,
}

pub const DEFAULT_BUDGET: u128 = 10_000_000;

fn multisets(alphabet: usize, k: usize) -> u128 {
    binomial((alphabet + k - 1) as u128, k as u128)
}

/// Nondecreasing sequences of length `k` over `0..alphabet`, in lexicographic order.
fn for_each_multiset(alphabet: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; k];
    loop {
        f(&seq);
        let Some(pos) = (0..k).rev().find(|&i| seq[i] + 1 < alphabet) else { return };
        let v = seq[pos] + 1;
        for s in &mut seq[pos..] {
            *s = v;
        }
    }
}

/// Success probability of a fixed table.
pub fn table_success(w: &Channel, table: &CodeTable) -> f64 {
    let (k1, k2) = (table.enc1.len(), table.enc2.len());
    let mut total = 0.0;
    for (i1, &x1) in table.enc1.iter().enumerate() {
        for (i2, &x2) in table.enc2.iter().enumerate() {
            for y in 0..w.ny() {
                let p = w.get(x1, x2, y);
                total += match &table.decoder {
                    Decoder::Joint(d) => p * f64::from(d[y] == (i1, i2)),
                    Decoder::Separate(d1, d2) => 0.5 * p * (f64::from(d1[y] == i1) + f64::from(d2[y] == i2)),
                };
            }
        }
    }
    total / (k1 * k2) as f64
}

/// Best decoder for fixed encoders, with its success probability.
fn best_decoder(w: &Channel, e1: &[usize], e2: &[usize], objective: Objective) -> (f64, Decoder) {
    let (k1, k2) = (e1.len(), e2.len());
    let norm = (k1 * k2) as f64;
    match objective {
        Objective::Joint => {
            let mut total = 0.0;
            let mut dec = Vec::with_capacity(w.ny());
            for y in 0..w.ny() {
                let mut best = (f64::NEG_INFINITY, (0, 0));
                for (i1, &x1) in e1.iter().enumerate() {
                    for (i2, &x2) in e2.iter().enumerate() {
                        let p = w.get(x1, x2, y);
                        if p > best.0 {
                            best = (p, (i1, i2));
                        }
                    }
                }
                total += best.0;
                dec.push(best.1);
            }
            (total / norm, Decoder::Joint(dec))
        }
        Objective::Sum => {
            let mut total = 0.0;
            let mut d1 = Vec::with_capacity(w.ny());
            let mut d2 = Vec::with_capacity(w.ny());
            for y in 0..w.ny() {
                let mut best1 = (f64::NEG_INFINITY, 0);
                for (i1, &x1) in e1.iter().enumerate() {
                    let s: f64 = e2.iter().map(|&x2| w.get(x1, x2, y)).sum();
                    if s > best1.0 {
                        best1 = (s, i1);
                    }
                }
                let mut best2 = (f64::NEG_INFINITY, 0);
                for (i2, &x2) in e2.iter().enumerate() {
                    let s: f64 = e1.iter().map(|&x1| w.get(x1, x2, y)).sum();
                    if s > best2.0 {
                        best2 = (s, i2);
                    }
                }
                total += 0.5 * (best1.0 + best2.0);
                d1.push(best1.1);
                d2.push(best2.1);
            }
            (total / norm, Decoder::Separate(d1, d2))
        }
    }
}

/// Exact classical optimum of the joint or sum success probability.
pub fn brute_force_success(
    w: &Channel,
    k1: usize,
    k2: usize,
    objective: Objective,
    budget: u128,
) -> Result<(f64, CodeTable)> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::InvalidArgument("message counts must be positive".into()));
    }
    let needed = multisets(w.nx1(), k1).saturating_mul(multisets(w.nx2(), k2));
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut best: Option<(f64, CodeTable)> = None;
    for_each_multiset(w.nx1(), k1, |e1| {
        for_each_multiset(w.nx2(), k2, |e2| {
            let (v, decoder) = best_decoder(w, e1, e2, objective);
            if best.as_ref().map_or(true, |b| v > b.0 + 1e-15) {
                best = Some((v, CodeTable { enc1: e1.to_vec(), enc2: e2.to_vec(), decoder }));
            }
        });
    });
    Ok(best.expect("at least one encoder pair"))
}

/// `(1/k) max_{|S| <= k} sum_y max_{x in S} W(y|x)`.
pub fn p2p_success(w: &P2pChannel, k: usize, budget: u128) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("message count must be positive".into()));
    }
    let size = k.min(w.nx);
    let needed = binomial(w.nx as u128, size as u128);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut best = 0.0f64;
    let mut subset: Vec<usize> = (0..size).collect();
    loop {
        let f: f64 = (0..w.ny).map(|y| subset.iter().map(|&x| w.get(x, y)).fold(0.0, f64::max)).sum();
        best = best.max(f);
        let Some(pos) = (0..size).rev().find(|&i| subset[i] < w.nx - size + i) else { break };
        subset[pos] += 1;
        for i in pos + 1..size {
            subset[i] = subset[i - 1] + 1;
        }
    }
    Ok(best / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adder_two_by_two() {
        let (v, table) = brute_force_success(&Channel::bac(), 2, 2, Objective::Joint, DEFAULT_BUDGET).unwrap();
        assert_eq!(v, 0.75);
        assert_eq!(table.enc1, vec![0, 1]);
        assert_eq!(table.enc2, vec![0, 1]);
        assert_eq!(table_success(&Channel::bac(), &table), 0.75);
        let (one, _) = brute_force_success(&Channel::bac(), 1, 1, Objective::Joint, DEFAULT_BUDGET).unwrap();
        assert_eq!(one, 1.0);
    }

    #[test]
    fn sum_objective_sandwiches_joint() {
        let w = Channel::bac();
        let (s, _) = brute_force_success(&w, 2, 2, Objective::Joint, DEFAULT_BUDGET).unwrap();
        let (ss, t) = brute_force_success(&w, 2, 2, Objective::Sum, DEFAULT_BUDGET).unwrap();
        assert!(ss >= 0.75);
        assert!(1.0 - ss <= 1.0 - s + 1e-12 && 1.0 - s <= 2.0 * (1.0 - ss) + 1e-12);
        assert!((table_success(&w, &t) - ss).abs() < 1e-12);
    }

    #[test]
    fn multiset_enumeration_is_lexicographic() {
        let mut seen = Vec::new();
        for_each_multiset(3, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]]);
        assert_eq!(multisets(3, 2), 6);
    }

    #[test]
    fn refuses_over_budget() {
        let w = Channel::bac().power(3);
        assert!(matches!(
            brute_force_success(&w, 8, 8, Objective::Joint, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn point_to_point_examples() {
        for m in 1..5 {
            for k in 1..=m {
                assert_eq!(p2p_success(&P2pChannel::identity(m), k, DEFAULT_BUDGET).unwrap(), 1.0);
            }
        }
        let constant = P2pChannel::new(3, 1, vec![1.0; 3]).unwrap();
        assert_eq!(p2p_success(&constant, 2, DEFAULT_BUDGET).unwrap(), 0.5);
        assert!((p2p_success(&P2pChannel::bsc(0.1), 2, DEFAULT_BUDGET).unwrap() - 0.9).abs() < 1e-15);
    }
}
