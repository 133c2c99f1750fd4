#![allow(dead_code)]

use nsmac::Channel;
use rand::Rng;

/// Channel with independent random rows; about one entry in four is zero.
pub fn random_channel(rng: &mut impl Rng, nx1: usize, nx2: usize, ny: usize) -> Channel {
    let mut probs = Vec::with_capacity(nx1 * nx2 * ny);
    for _ in 0..nx1 * nx2 {
        let mut row: Vec<f64> = (0..ny).map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.01..1.0) }).collect();
        if row.iter().all(|&v| v == 0.0) {
            row[rng.gen_range(0..ny)] = 1.0;
        }
        let total: f64 = row.iter().sum();
        probs.extend(row.iter().map(|v| v / total));
    }
    Channel::new(nx1, nx2, ny, probs).unwrap()
}

pub fn random_dist(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = v.iter().sum();
    v.iter().map(|x| x / total).collect()
}
