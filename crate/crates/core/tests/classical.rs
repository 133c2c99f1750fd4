mod common;

use common::random_channel;
use nsmac::classical::*;
use nsmac::{Channel, P2pChannel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every encoder function (not just sorted lists) with argmax decoding.
fn naive(w: &Channel, k1: usize, k2: usize) -> (f64, f64) {
    let (mut joint, mut sum) = (0.0f64, 0.0f64);
    let total1 = w.nx1().pow(k1 as u32);
    let total2 = w.nx2().pow(k2 as u32);
    for c1 in 0..total1 {
        let e1: Vec<usize> = (0..k1).map(|i| c1 / w.nx1().pow(i as u32) % w.nx1()).collect();
        for c2 in 0..total2 {
            let e2: Vec<usize> = (0..k2).map(|i| c2 / w.nx2().pow(i as u32) % w.nx2()).collect();
            let (mut j, mut s) = (0.0, 0.0);
            for y in 0..w.ny() {
                let mut m = 0.0f64;
                for &a in &e1 {
                    for &b in &e2 {
                        m = m.max(w.get(a, b, y));
                    }
                }
                j += m;
                let m1 = e1.iter().map(|&a| e2.iter().map(|&b| w.get(a, b, y)).sum::<f64>()).fold(0.0, f64::max);
                let m2 = e2.iter().map(|&b| e1.iter().map(|&a| w.get(a, b, y)).sum::<f64>()).fold(0.0, f64::max);
                s += 0.5 * (m1 + m2);
            }
            joint = joint.max(j / (k1 * k2) as f64);
            sum = sum.max(s / (k1 * k2) as f64);
        }
    }
    (joint, sum)
}

#[test]
fn brute_force_matches_naive_enumeration_and_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut instances = 0;
    for _ in 0..30 {
        let (nx1, nx2, ny) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(2..=3));
        let (k1, k2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let w = random_channel(&mut rng, nx1, nx2, ny);
        let (joint, jt) = brute_force_success(&w, k1, k2, Objective::Joint, DEFAULT_BUDGET).unwrap();
        let (sum, st) = brute_force_success(&w, k1, k2, Objective::Sum, DEFAULT_BUDGET).unwrap();
        let (nj, ns) = naive(&w, k1, k2);
        assert!((joint - nj).abs() < 1e-12 && (sum - ns).abs() < 1e-12);
        assert!((table_success(&w, &jt) - joint).abs() < 1e-12);
        assert!((table_success(&w, &st) - sum).abs() < 1e-12);
        let (e, e_sum) = (1.0 - joint, 1.0 - sum);
        assert!(e_sum <= e + 1e-12 && e <= 2.0 * e_sum + 1e-12, "E = {e}, E_sum = {e_sum}");
        instances += 1;
    }
    assert!(instances >= 20);
}

#[test]
fn adder_channel_values() {
    let w = Channel::bac();
    assert_eq!(brute_force_success(&w, 2, 2, Objective::Joint, DEFAULT_BUDGET).unwrap().0, 0.75);
    assert_eq!(brute_force_success(&w, 1, 2, Objective::Joint, DEFAULT_BUDGET).unwrap().0, 1.0);
    assert_eq!(brute_force_success(&w, 1, 1, Objective::Joint, DEFAULT_BUDGET).unwrap().0, 1.0);
}

#[test]
fn budget_and_arguments() {
    let w = Channel::bac().power(3);
    assert!(brute_force_success(&w, 8, 8, Objective::Joint, 1000).is_err());
    assert!(brute_force_success(&Channel::bac(), 0, 2, Objective::Joint, DEFAULT_BUDGET).is_err());
}

#[test]
fn point_to_point() {
    assert_eq!(p2p_success(&P2pChannel::identity(4), 3, DEFAULT_BUDGET).unwrap(), 1.0);
    assert!((p2p_success(&P2pChannel::identity(3), 6, DEFAULT_BUDGET).unwrap() - 0.5).abs() < 1e-12);
    assert!((p2p_success(&P2pChannel::bsc(0.1), 2, DEFAULT_BUDGET).unwrap() - 0.9).abs() < 1e-12);
}
