//! Joint types of length-`n` sequences: the orbits of coordinate permutations.

use crate::channel::Channel;
use crate::error::{Error, Result};
use nsmac_lp::{BigRational, Scalar};
use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, ToPrimitive};
use std::collections::HashMap;
use std::fmt::Write as _;

pub const DEFAULT_ORBIT_LIMIT: u128 = 20_000_000;

/// All types of length-`n` sequences over an alphabet of `alphabet` symbols.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    pub alphabet: usize,
    pub n: usize,
    types: Vec<Vec<u32>>,
    sizes: Vec<BigUint>,
    index: HashMap<Vec<u32>, usize>,
}

pub fn orbit_count(alphabet: usize, n: usize) -> u128 {
    if alphabet == 0 {
        return u128::from(n == 0);
    }
    binomial((n + alphabet - 1) as u128, (alphabet - 1) as u128)
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n! / prod t_s!`
pub fn multinomial(t: &[u32]) -> BigUint {
    let n: u32 = t.iter().sum();
    t.iter().fold(factorial(n), |acc, &c| acc / factorial(c))
}

impl OrbitTable {
    pub fn new(alphabet: usize, n: usize) -> Result<Self> {
        Self::with_limit(alphabet, n, DEFAULT_ORBIT_LIMIT)
    }

    /// Compositions in lexicographic order with the first part largest first,
    /// e.g. `(3,0), (2,1), (1,2), (0,3)`.
    pub fn with_limit(alphabet: usize, n: usize, limit: u128) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        let count = orbit_count(alphabet, n);
        if count > limit {
            return Err(Error::TooLarge { needed: count, limit });
        }
        let mut types = Vec::with_capacity(count as usize);
        let mut cur = vec![0u32; alphabet];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(cur.clone());
                return;
            }
            for c in (0..=left).rev() {
                cur[pos] = c;
                rec(pos + 1, left - c, cur, out);
            }
        }
        rec(0, n as u32, &mut cur, &mut types);
        let sizes = types.iter().map(|t| multinomial(t)).collect();
        let index = types.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(OrbitTable { alphabet, n, types, sizes, index })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[Vec<u32>] {
        &self.types
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.types[i]
    }

    pub fn size(&self, i: usize) -> &BigUint {
        &self.sizes[i]
    }

    pub fn size_f64(&self, i: usize) -> f64 {
        self.sizes[i].to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn find(&self, t: &[u32]) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Type of a sequence of symbols.
    pub fn type_of(&self, seq: &[usize]) -> Vec<u32> {
        let mut t = vec![0u32; self.alphabet];
        for &s in seq {
            t[s] += 1;
        }
        t
    }

    /// For each orbit here, the index in `target` of its image under the
    /// symbol map `map` (source symbol -> target symbol).
    pub fn project(&self, target: &OrbitTable, map: &[usize]) -> Vec<usize> {
        assert_eq!(map.len(), self.alphabet);
        assert_eq!(target.n, self.n);
        let mut buf = vec![0u32; target.alphabet];
        self.types
            .iter()
            .map(|t| {
                buf.iter_mut().for_each(|b| *b = 0);
                for (s, &c) in t.iter().enumerate() {
                    buf[map[s]] += c;
                }
                target.index[&buf]
            })
            .collect()
    }

    /// One line per orbit: index, type vector, size.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# alphabet {} n {} orbits {}", self.alphabet, self.n, self.len());
        for (i, (t, s)) in self.types.iter().zip(&self.sizes).enumerate() {
            let parts: Vec<String> = t.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{} ({}) {}", i, parts.join(","), s);
        }
        out
    }
}

/// `W^{(x) n}(y|x1 x2)` for any sequence of triples of type `t`.
pub fn orbit_channel_value<T: Scalar>(w: &Channel, t: &[u32]) -> Result<T> {
    let mut v = T::one();
    for (s, &c) in t.iter().enumerate() {
        if c > 0 {
            let e: T = w.entry(s)?;
            for _ in 0..c {
                v = v.mul(&e);
            }
        }
    }
    Ok(v)
}

/// `|a| / |b|` as an exact rational.
pub fn size_ratio(a: &BigUint, b: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(a.clone()), BigInt::from(b.clone()))
}

/// Symbol maps from the `(x1,x2,y)` triple alphabet to its marginals.
#[derive(Clone, Debug)]
pub struct TripleMaps {
    pub to_pair: Vec<usize>,
    pub to_x2y: Vec<usize>,
    pub to_x1y: Vec<usize>,
    pub to_y: Vec<usize>,
    pub pair_to_x1: Vec<usize>,
    pub pair_to_x2: Vec<usize>,
    pub x2y_to_x2: Vec<usize>,
    pub x1y_to_x1: Vec<usize>,
}

impl TripleMaps {
    pub fn new(nx1: usize, nx2: usize, ny: usize) -> Self {
        let mut m = TripleMaps {
            to_pair: Vec::new(),
            to_x2y: Vec::new(),
            to_x1y: Vec::new(),
            to_y: Vec::new(),
            pair_to_x1: Vec::new(),
            pair_to_x2: Vec::new(),
            x2y_to_x2: (0..nx2 * ny).map(|s| s / ny).collect(),
            x1y_to_x1: (0..nx1 * ny).map(|s| s / ny).collect(),
        };
        for x1 in 0..nx1 {
            for x2 in 0..nx2 {
                m.pair_to_x1.push(x1);
                m.pair_to_x2.push(x2);
                for y in 0..ny {
                    m.to_pair.push(x1 * nx2 + x2);
                    m.to_x2y.push(x2 * ny + y);
                    m.to_x1y.push(x1 * ny + y);
                    m.to_y.push(y);
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn binary_length_three() {
        let t = OrbitTable::new(2, 3).unwrap();
        assert_eq!(t.types(), &[vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        let sizes: Vec<u32> = (0..4).map(|i| t.size(i).to_u32().unwrap()).collect();
        assert_eq!(sizes, vec![1, 3, 3, 1]);
    }

    #[test]
    fn counts_for_the_triple_alphabet() {
        assert_eq!(OrbitTable::new(12, 3).unwrap().len(), 364);
        assert_eq!(orbit_count(12, 7), 31824);
        assert_eq!(orbit_count(4, 7), 120);
    }

    #[test]
    fn sizes_sum_to_all_sequences() {
        for (a, n) in [(2, 5), (3, 4), (12, 3), (4, 6)] {
            let t = OrbitTable::new(a, n).unwrap();
            let total = (0..t.len()).fold(BigUint::zero(), |acc, i| acc + t.size(i));
            assert_eq!(total, BigUint::from(a).pow(n as u32));
            assert_eq!(t.len() as u128, orbit_count(a, n));
        }
    }

    #[test]
    fn projection_aggregates_sizes() {
        // Brute force over all sequences: the mass landing in each projected
        // orbit equals size(target) times the number of completions.
        let (nx1, nx2, ny, n) = (2, 2, 3, 2);
        let maps = TripleMaps::new(nx1, nx2, ny);
        let triples = OrbitTable::new(12, n).unwrap();
        let pairs = OrbitTable::new(4, n).unwrap();
        let proj = triples.project(&pairs, &maps.to_pair);
        let mut mass = vec![BigUint::zero(); pairs.len()];
        for (w, &u) in proj.iter().enumerate() {
            mass[u] += triples.size(w);
        }
        for u in 0..pairs.len() {
            assert_eq!(mass[u], pairs.size(u) * BigUint::from(ny).pow(n as u32));
        }
        let mut seen = vec![0u32; pairs.len()];
        for a in 0..12 {
            for b in 0..12 {
                let w = triples.find(&triples.type_of(&[a, b])).unwrap();
                let u = pairs.find(&pairs.type_of(&[maps.to_pair[a], maps.to_pair[b]])).unwrap();
                assert_eq!(proj[w], u);
                seen[u] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c > 0));
    }

    #[test]
    fn projection_example() {
        let maps = TripleMaps::new(2, 2, 3);
        let triples = OrbitTable::new(12, 3).unwrap();
        let pairs = OrbitTable::new(4, 3).unwrap();
        let mut t = vec![0u32; 12];
        t[0] = 2; // (0,0,0)
        t[(1 * 2 + 1) * 3 + 2] = 1; // (1,1,2)
        let w = triples.find(&t).unwrap();
        let u = triples.project(&pairs, &maps.to_pair)[w];
        assert_eq!(pairs.get(u), &[2, 0, 0, 1]);
        let ys = OrbitTable::new(3, 3).unwrap();
        for (w, v) in triples.project(&ys, &maps.to_y).into_iter().enumerate() {
            assert_eq!(ys.get(v).iter().sum::<u32>(), 3);
            let _ = w;
        }
    }

    #[test]
    fn refuses_huge_tables() {
        assert!(OrbitTable::with_limit(12, 9, 1000).is_err());
    }
}
