mod common;

use common::{random_channel, random_dist};
use nsmac::capacity::*;
use nsmac::Channel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `H(Y) - H(Y|X2)` straight from the joint law.
fn info_second(w: &Channel, p: &JointDist) -> f64 {
    let ny = w.ny();
    let mut y = vec![0.0; ny];
    let mut x2y = vec![0.0; w.nx2() * ny];
    let mut x2 = vec![0.0; w.nx2()];
    for a in 0..w.nx1() {
        for b in 0..w.nx2() {
            let q = p.probs[a * w.nx2() + b];
            x2[b] += q;
            for c in 0..ny {
                y[c] += q * w.get(a, b, c);
                x2y[b * ny + c] += q * w.get(a, b, c);
            }
        }
    }
    entropy(&y) + entropy(&x2) - entropy(&x2y)
}

#[test]
fn chain_rule_and_corner_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let (nx1, nx2, ny) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(2..=4));
        let w = random_channel(&mut rng, nx1, nx2, ny);
        let p = JointDist::product(&random_dist(&mut rng, nx1), &random_dist(&mut rng, nx2)).unwrap();
        let (a, b, c) = mutual_informations(&w, &p);
        assert!(a >= -1e-12 && b >= -1e-12 && c >= -1e-12);
        let i2 = info_second(&w, &p);
        assert!((c - a - i2).abs() < 1e-10, "chain rule: {c} - {a} != {i2}");
        assert!(i2 <= b + 1e-12, "I(X2:Y) = {i2} above I(X2:Y|X1) = {b}");
    }
}

#[test]
fn uniform_adder_pentagon_is_the_classical_region() {
    let f = classical_region(&Channel::bac(), &RegionConfig { resolution: 64, refine: 0 });
    assert!((f.max_sum_rate() - 1.5).abs() < 1e-12);
    let c = f.sum_rate_corner().unwrap();
    assert!((c.r1 - 0.5).abs() < 1e-12 && (c.r2 - 1.0).abs() < 1e-12);
    assert!((f.value_at(1.0).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn relaxed_region_contains_classical_region() {
    let w = Channel::bac();
    let classical = classical_region(&w, &RegionConfig { resolution: 64, refine: 0 });
    let relaxed = relaxed_region(&w, &RegionConfig { resolution: 48, refine: 8 });
    for i in 0..=100 {
        let x = classical.max_r1() * i as f64 / 100.0;
        assert!(relaxed.value_at(x).unwrap() >= classical.value_at(x).unwrap() - 1e-12);
    }
    let cf = bac_relaxed_closed_form_region(1000);
    assert!((cf.max_sum_rate() - 3f64.log2()).abs() < 1e-9);
    assert!(relaxed.distance(&cf, 200) < 5e-3);
}

#[test]
fn frontier_of_nothing_is_empty() {
    assert!(Frontier::from_points(&[]).is_empty());
    let single = Frontier::from_points(&[RatePoint::new(0.3, 0.2, RateSource::Classical)]);
    let xy: Vec<(f64, f64)> = single.vertices.iter().map(|p| (p.r1, p.r2)).collect();
    assert_eq!(xy, vec![(0.0, 0.2), (0.3, 0.2)]);
}

/// Neyman-Pearson: fill the test with outcomes of least `P1/P0` ratio first.
fn beta_oracle(p0: &[f64], p1: &[f64], eps: f64) -> f64 {
    let mut idx: Vec<usize> = (0..p0.len()).collect();
    idx.sort_by(|&a, &b| (p1[a] * p0[b]).total_cmp(&(p1[b] * p0[a])));
    let mut need = 1.0 - eps;
    let mut cost = 0.0;
    // Outcomes with no P0 mass never help.
    for j in idx {
        if need <= 0.0 {
            break;
        }
        if p0[j] == 0.0 {
            continue;
        }
        let t = (need / p0[j]).min(1.0);
        cost += t * p1[j];
        need -= t * p0[j];
    }
    cost
}

#[test]
fn hypothesis_testing_matches_neyman_pearson() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let p0 = random_dist(&mut rng, n);
        let p1 = random_dist(&mut rng, n);
        let eps = rng.gen_range(0.0..1.0);
        let b = beta_hypothesis(&p0, &p1, eps).unwrap();
        assert!((b - beta_oracle(&p0, &p1, eps)).abs() < 1e-9);
        let b2 = beta_hypothesis(&p0, &p1, (eps + 0.1).min(1.0)).unwrap();
        assert!(b2 <= b + 1e-12);
    }
}

#[test]
fn identical_hypotheses() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let size = rng.gen_range(1..=5);
        let p = random_dist(&mut rng, size);
        let eps = rng.gen_range(0.0..1.0);
        assert!((beta_hypothesis(&p, &p, eps).unwrap() - (1.0 - eps)).abs() < 1e-9);
    }
    assert_eq!(beta_hypothesis(&[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0], 0.0).unwrap(), 0.0);
    assert!(beta_hypothesis(&[1.0], &[1.0, 0.0], 0.1).is_err());
}

#[test]
fn converse_limits_and_growth() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10 {
        let w = random_channel(&mut rng, 2, 2, 3);
        let p = JointDist::new(2, 2, random_dist(&mut rng, 4)).unwrap();
        let (a, b, c) = mutual_informations(&w, &p);
        let (x, y, z) = one_shot_converse(&w, &p, 1e-13).unwrap();
        assert!((x - a).abs() < 1e-10 && (y - b).abs() < 1e-10 && (z - c).abs() < 1e-10);
        let mut last = (0.0, 0.0, 0.0);
        for i in 1..=50 {
            let caps = one_shot_converse(&w, &p, 0.5 * i as f64 / 50.0).unwrap();
            assert!(caps.0 >= last.0 && caps.1 >= last.1 && caps.2 >= last.2);
            last = caps;
        }
    }
    assert!(one_shot_converse(&Channel::bac(), &JointDist::uniform_product(2, 2), 1.0).is_err());
}

#[test]
fn region_csv_is_deterministic() {
    let cfg = RegionConfig { resolution: 32, refine: 4 };
    let a = classical_region(&Channel::noisy_bac(0.05, 0.05).unwrap(), &cfg).to_csv();
    let b = classical_region(&Channel::noisy_bac(0.05, 0.05).unwrap(), &cfg).to_csv();
    assert_eq!(a, b);
    assert!(a.starts_with("R1,R2\n"));
}
