//! Two-sender multiple-access channels `W(y | x1 x2)`.
//!
//! Entries are stored row-major in `(x1, x2, y)` order. A channel may also
//! carry exact rational entries, which the certification path needs.

use crate::error::{Error, Result};
use nsmac_lp::{format_rational, parse_rational, rational_to_f64, BigRational};
use num_traits::{One, Signed, Zero};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    nx1: usize,
    nx2: usize,
    ny: usize,
    probs: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

/// `n / d` as an exact rational.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl Channel {
    pub fn new(nx1: usize, nx2: usize, ny: usize, probs: Vec<f64>) -> Result<Self> {
        let c = Channel { nx1, nx2, ny, probs, exact: None };
        c.check(1e-9)?;
        Ok(c)
    }

    pub fn from_exact(nx1: usize, nx2: usize, ny: usize, exact: Vec<BigRational>) -> Result<Self> {
        let probs = exact.iter().map(rational_to_f64).collect();
        let c = Channel { nx1, nx2, ny, probs, exact: Some(exact) };
        c.check(0.0)?;
        Ok(c)
    }

    fn check(&self, tol: f64) -> Result<()> {
        if self.nx1 == 0 || self.nx2 == 0 || self.ny == 0 {
            return Err(Error::InvalidChannel("alphabets must be nonempty".into()));
        }
        let len = self.nx1 * self.nx2 * self.ny;
        if self.probs.len() != len {
            return Err(Error::InvalidChannel(format!("expected {} entries, got {}", len, self.probs.len())));
        }
        if let Some(p) = self.probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidChannel(format!("entry {} is not a probability", p)));
        }
        for (row, chunk) in self.probs.chunks(self.ny).enumerate() {
            let s: f64 = chunk.iter().sum();
            if (s - 1.0).abs() > tol.max(1e-12) {
                return Err(Error::InvalidChannel(format!("row {} sums to {}", row, s)));
            }
        }
        if let Some(ex) = &self.exact {
            if ex.iter().any(|v| v.is_negative()) {
                return Err(Error::InvalidChannel("negative rational entry".into()));
            }
            for (row, chunk) in ex.chunks(self.ny).enumerate() {
                let s: BigRational = chunk.iter().sum();
                if !s.is_one() {
                    return Err(Error::InvalidChannel(format!("rational row {} sums to {}", row, s)));
                }
            }
        }
        Ok(())
    }

    /// Binary adder channel: `y = x1 + x2` over `{0,1} x {0,1} -> {0,1,2}`.
    pub fn bac() -> Self {
        let mut exact = vec![BigRational::zero(); 12];
        for x1 in 0..2 {
            for x2 in 0..2 {
                exact[(x1 * 2 + x2) * 3 + x1 + x2] = BigRational::one();
            }
        }
        Channel::from_exact(2, 2, 3, exact).expect("adder channel is stochastic")
    }

    /// Adder channel with independent input bit flips of probability `e1`, `e2`.
    pub fn noisy_bac(e1: f64, e2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&e1) || !(0.0..=1.0).contains(&e2) {
            return Err(Error::InvalidArgument("flip probabilities must lie in [0, 1]".into()));
        }
        let mut probs = vec![0.0; 12];
        for x1 in 0..2 {
            for x2 in 0..2 {
                for (f1, w1) in [(0, 1.0 - e1), (1, e1)] {
                    for (f2, w2) in [(0, 1.0 - e2), (1, e2)] {
                        let y = (x1 ^ f1) + (x2 ^ f2);
                        probs[(x1 * 2 + x2) * 3 + y] += w1 * w2;
                    }
                }
            }
        }
        Channel::new(2, 2, 3, probs)
    }

    /// Exact-rational version of [`Channel::noisy_bac`].
    pub fn noisy_bac_exact(e1: &BigRational, e2: &BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if *e1 < zero || *e1 > one || *e2 < zero || *e2 > one {
            return Err(Error::InvalidArgument("flip probabilities must lie in [0, 1]".into()));
        }
        let mut exact = vec![zero; 12];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for (f1, w1) in [(0usize, &one - e1), (1, e1.clone())] {
                    for (f2, w2) in [(0usize, &one - e2), (1, e2.clone())] {
                        let y = (x1 ^ f1) + (x2 ^ f2);
                        exact[(x1 * 2 + x2) * 3 + y] += &w1 * &w2;
                    }
                }
            }
        }
        Channel::from_exact(2, 2, 3, exact)
    }

    /// Channel whose output ignores both inputs and is always `0` (ny = 1).
    pub fn trivial() -> Self {
        Channel::from_exact(1, 1, 1, vec![BigRational::one()]).expect("point channel")
    }

    pub fn nx1(&self) -> usize {
        self.nx1
    }
    pub fn nx2(&self) -> usize {
        self.nx2
    }
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn index(&self, x1: usize, x2: usize, y: usize) -> usize {
        (x1 * self.nx2 + x2) * self.ny + y
    }

    #[inline]
    pub fn get(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.probs[self.index(x1, x2, y)]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Entry `idx` (row-major) in the requested scalar type.
    pub fn entry<T: nsmac_lp::Scalar>(&self, idx: usize) -> Result<T> {
        if T::EXACT {
            let ex = self.exact.as_ref().ok_or(Error::NotExact)?;
            Ok(T::from_rational(&ex[idx]))
        } else {
            Ok(T::from_f64(self.probs[idx]))
        }
    }

    /// `(W (x) W')(y y' | x1 x1', x2 x2')` with combined symbols `a * |A'| + a'`.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let (nx1, nx2, ny) = (self.nx1 * other.nx1, self.nx2 * other.nx2, self.ny * other.ny);
        let mut probs = vec![0.0; nx1 * nx2 * ny];
        let mut exact = match (&self.exact, &other.exact) {
            (Some(_), Some(_)) => Some(vec![BigRational::zero(); probs.len()]),
            _ => None,
        };
        for a1 in 0..self.nx1 {
            for b1 in 0..other.nx1 {
                for a2 in 0..self.nx2 {
                    for b2 in 0..other.nx2 {
                        for ya in 0..self.ny {
                            for yb in 0..other.ny {
                                let x1 = a1 * other.nx1 + b1;
                                let x2 = a2 * other.nx2 + b2;
                                let y = ya * other.ny + yb;
                                let idx = (x1 * nx2 + x2) * ny + y;
                                let i = self.index(a1, a2, ya);
                                let j = other.index(b1, b2, yb);
                                probs[idx] = self.probs[i] * other.probs[j];
                                if let (Some(e), Some(sa), Some(sb)) = (&mut exact, &self.exact, &other.exact) {
                                    e[idx] = &sa[i] * &sb[j];
                                }
                            }
                        }
                    }
                }
            }
        }
        Channel { nx1, nx2, ny, probs, exact }
    }

    /// `W^{(x) n}`; `n = 0` gives the point channel.
    pub fn power(&self, n: usize) -> Channel {
        (0..n).fold(Channel::trivial(), |acc, _| acc.tensor(self))
    }

    /// Text form; fractions when rational entries are known.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nx1 {}\nnx2 {}\nny {}\nentries", self.nx1, self.nx2, self.ny);
        for row in 0..self.nx1 * self.nx2 {
            let cells: Vec<String> = (0..self.ny)
                .map(|y| {
                    let idx = row * self.ny + y;
                    match &self.exact {
                        Some(ex) => format_rational(&ex[idx]),
                        None => format!("{}", self.probs[idx]),
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }

    /// Parses the text form. Entries after `entries` are read in `(x1,x2,y)`
    /// order and missing trailing ones are zero; `at x1 x2 y value` lines set a
    /// single entry. When every entry is a fraction or decimal the channel is
    /// kept exact.
    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
        let (mut nx1, mut nx2, mut ny) = (None, None, None);
        let mut dense: Vec<(usize, String)> = Vec::new();
        let mut sparse: Vec<(usize, [usize; 3], String)> = Vec::new();
        let mut in_entries = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let count = |s: &str| s.parse::<usize>().map_err(|_| err(ln, "expected a count"));
            match toks[0] {
                "nx1" if toks.len() == 2 => nx1 = Some(count(toks[1])?),
                "nx2" if toks.len() == 2 => nx2 = Some(count(toks[1])?),
                "ny" if toks.len() == 2 => ny = Some(count(toks[1])?),
                "entries" if toks.len() == 1 => in_entries = true,
                "at" => {
                    if toks.len() != 5 {
                        return Err(err(ln, "expected `at x1 x2 y value`"));
                    }
                    let idx = [count(toks[1])?, count(toks[2])?, count(toks[3])?];
                    sparse.push((ln, idx, toks[4].to_string()));
                }
                _ if in_entries => dense.extend(toks.iter().map(|t| (ln, t.to_string()))),
                _ => return Err(err(ln, "unexpected line")),
            }
        }
        let (nx1, nx2, ny) = match (nx1, nx2, ny) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(err(0, "missing nx1, nx2 or ny")),
        };
        let len = nx1 * nx2 * ny;
        if dense.len() > len {
            return Err(err(dense[len].0, "too many entries"));
        }
        let mut cells: Vec<Option<(usize, String)>> = vec![None; len];
        for (k, cell) in dense.into_iter().enumerate() {
            cells[k] = Some(cell);
        }
        for (ln, [a, b, c], v) in sparse {
            if a >= nx1 || b >= nx2 || c >= ny {
                return Err(err(ln, "index out of range"));
            }
            cells[(a * nx2 + b) * ny + c] = Some((ln, v));
        }
        let mut exact = Vec::with_capacity(len);
        for cell in &cells {
            match cell {
                None => exact.push(BigRational::zero()),
                Some((ln, s)) => exact.push(parse_rational(s).ok_or_else(|| err(*ln, "bad number"))?),
            }
        }
        let as_float: Vec<f64> = exact.iter().map(rational_to_f64).collect();
        let all_sum_to_one = exact.chunks(ny.max(1)).all(|c| c.iter().sum::<BigRational>().is_one());
        if all_sum_to_one {
            Channel::from_exact(nx1, nx2, ny, exact)
        } else {
            Channel::new(nx1, nx2, ny, as_float)
        }
    }

    /// SHA-256 of the canonical float text, hex encoded.
    pub fn hash(&self) -> String {
        let mut text = format!("{} {} {}\n", self.nx1, self.nx2, self.ny);
        for p in &self.probs {
            let _ = write!(text, "{:016x}\n", p.to_bits());
        }
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{:02x}", b)).collect()
    }
}

/// Point-to-point channel `W(y | x)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct P2pChannel {
    pub nx: usize,
    pub ny: usize,
    pub probs: Vec<f64>,
}

impl P2pChannel {
    pub fn new(nx: usize, ny: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != nx * ny || nx == 0 || ny == 0 {
            return Err(Error::InvalidChannel("shape mismatch".into()));
        }
        for (x, row) in probs.chunks(ny).enumerate() {
            let s: f64 = row.iter().sum();
            if row.iter().any(|p| *p < 0.0) || (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidChannel(format!("row {} is not a distribution", x)));
            }
        }
        Ok(P2pChannel { nx, ny, probs })
    }

    pub fn identity(m: usize) -> Self {
        let mut probs = vec![0.0; m * m];
        for i in 0..m {
            probs[i * m + i] = 1.0;
        }
        P2pChannel { nx: m, ny: m, probs }
    }

    pub fn bsc(p: f64) -> Self {
        P2pChannel { nx: 2, ny: 2, probs: vec![1.0 - p, p, p, 1.0 - p] }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.ny + y]
    }

    /// The channel seen by sender 1 when sender 2 sends through `d2` fixed at `x2`.
    pub fn from_mac_slice(w: &Channel, x2: usize) -> Self {
        let mut probs = Vec::with_capacity(w.nx1() * w.ny());
        for x1 in 0..w.nx1() {
            for y in 0..w.ny() {
                probs.push(w.get(x1, x2, y));
            }
        }
        P2pChannel { nx: w.nx1(), ny: w.ny(), probs }
    }
}
