//! Explicit non-signaling boxes rebuilt from orbit-level strategies.

use super::code::NsCode;
use super::program::OrbitSystem;
use crate::channel::Channel;
use crate::error::{Error, Result};

/// Default cap on the number of box entries.
pub const DEFAULT_BOX_LIMIT: u128 = 50_000_000;

/// `P(x1 x2 (j1 j2) | i1 i2 y)` over `n` channel uses.
#[derive(Clone, Debug)]
pub struct ExplicitBox {
    pub k1: usize,
    pub k2: usize,
    /// Alphabet sizes of `n`-letter input and output sequences.
    pub nx1: usize,
    pub nx2: usize,
    pub ny: usize,
    pub probs: Vec<f64>,
}

impl ExplicitBox {
    #[allow(clippy::too_many_arguments)]
    pub fn index(&self, i1: usize, i2: usize, y: usize, x1: usize, x2: usize, j1: usize, j2: usize) -> usize {
        (((((i1 * self.k2 + i2) * self.ny + y) * self.nx1 + x1) * self.nx2 + x2) * self.k1 + j1) * self.k2 + j2
    }
}

/// Worst deviations found by [`check_box`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoxReport {
    pub normalization: f64,
    /// Max over the three single-party marginal conditions.
    pub non_signaling: f64,
    pub min_entry: f64,
    pub success: f64,
}

fn sequence_type(sys: &OrbitSystem, x1: usize, x2: usize, y: usize, buf: &mut [u32]) {
    let (mut a, mut b, mut c) = (x1, x2, y);
    buf.iter_mut().for_each(|t| *t = 0);
    for _ in 0..sys.n {
        let s = ((a % sys.nx1) * sys.nx2 + b % sys.nx2) * sys.ny + c % sys.ny;
        buf[s] += 1;
        a /= sys.nx1;
        b /= sys.nx2;
        c /= sys.ny;
    }
}

/// Per-element values `(r, r1, r2, p)` of the symmetric strategy, indexed like `W^n`.
pub fn element_values(sys: &OrbitSystem, code: &NsCode) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let nx1 = sys.nx1.pow(sys.n as u32);
    let nx2 = sys.nx2.pow(sys.n as u32);
    let ny = sys.ny.pow(sys.n as u32);
    let total = nx1 * nx2 * ny;
    let (mut r, mut r1, mut r2) = (vec![0.0; total], vec![0.0; total], vec![0.0; total]);
    let mut p = vec![0.0; nx1 * nx2];
    let mut buf = vec![0u32; sys.triples.alphabet];
    for x1 in 0..nx1 {
        for x2 in 0..nx2 {
            for y in 0..ny {
                sequence_type(sys, x1, x2, y, &mut buf);
                let w = sys.triples.find(&buf).expect("type of a sequence");
                let size = sys.triples.size_f64(w);
                let e = (x1 * nx2 + x2) * ny + y;
                r[e] = code.r[w] / size;
                r1[e] = code.r1[w] / size;
                r2[e] = code.r2[w] / size;
                if y == 0 {
                    let u = sys.w_pair[w];
                    p[x1 * nx2 + x2] = code.p[u] / sys.pairs.size_f64(u);
                }
            }
        }
    }
    (r, r1, r2, p)
}

/// Rebuilds an explicit box achieving the code's success probability.
pub fn reconstruct_box(sys: &OrbitSystem, code: &NsCode, limit: u128) -> Result<ExplicitBox> {
    let (k1, k2) = (code.k1, code.k2);
    let nx1 = sys.nx1.pow(sys.n as u32);
    let nx2 = sys.nx2.pow(sys.n as u32);
    let ny = sys.ny.pow(sys.n as u32);
    let needed = ((k1 * k2) as u128).pow(2) * (nx1 * nx2 * ny) as u128;
    if needed > limit {
        return Err(Error::TooLarge { needed, limit });
    }
    let (r, r1, r2, p) = element_values(sys, code);
    let mut bx = ExplicitBox { k1, k2, nx1, nx2, ny, probs: vec![0.0; needed as usize] };
    let norm = (k1 * k2) as f64;
    let (d1, d2) = ((k1.max(2) - 1) as f64, (k2.max(2) - 1) as f64);
    for x1 in 0..nx1 {
        for x2 in 0..nx2 {
            let pv = p[x1 * nx2 + x2];
            for y in 0..ny {
                let e = (x1 * nx2 + x2) * ny + y;
                let same = r[e] / norm;
                let other1 = (r1[e] - r[e]) / (norm * d1);
                let other2 = (r2[e] - r[e]) / (norm * d2);
                let both = (pv - r1[e] - r2[e] + r[e]) / (norm * d1 * d2);
                for i1 in 0..k1 {
                    for i2 in 0..k2 {
                        for j1 in 0..k1 {
                            for j2 in 0..k2 {
                                let v = match (j1 == i1, j2 == i2) {
                                    (true, true) => same,
                                    (false, true) => other1,
                                    (true, false) => other2,
                                    (false, false) => both,
                                };
                                let idx = bx.index(i1, i2, y, x1, x2, j1, j2);
                                bx.probs[idx] = v;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(bx)
}

/// Normalization, non-signaling residuals, and success probability of a box over `w` (already tensored).
pub fn check_box(bx: &ExplicitBox, w: &Channel) -> BoxReport {
    assert_eq!((w.nx1(), w.nx2(), w.ny()), (bx.nx1, bx.nx2, bx.ny));
    let (k1, k2) = (bx.k1, bx.k2);
    let mut rep = BoxReport { min_entry: f64::INFINITY, ..Default::default() };
    for &v in &bx.probs {
        rep.min_entry = rep.min_entry.min(v);
    }
    for i1 in 0..k1 {
        for i2 in 0..k2 {
            for y in 0..bx.ny {
                let mut total = 0.0;
                for x1 in 0..bx.nx1 {
                    for x2 in 0..bx.nx2 {
                        for j1 in 0..k1 {
                            for j2 in 0..k2 {
                                total += bx.probs[bx.index(i1, i2, y, x1, x2, j1, j2)];
                            }
                        }
                    }
                }
                rep.normalization = rep.normalization.max((total - 1.0).abs());
            }
        }
    }
    let mut worst = 0.0f64;
    // Sum over x1 must not depend on i1.
    for i2 in 0..k2 {
        for y in 0..bx.ny {
            for x2 in 0..bx.nx2 {
                for j1 in 0..k1 {
                    for j2 in 0..k2 {
                        let m = |i1| (0..bx.nx1).map(|x1| bx.probs[bx.index(i1, i2, y, x1, x2, j1, j2)]).sum::<f64>();
                        let base = m(0);
                        for i1 in 1..k1 {
                            worst = worst.max((m(i1) - base).abs());
                        }
                    }
                }
            }
        }
    }
    // Sum over x2 must not depend on i2.
    for i1 in 0..k1 {
        for y in 0..bx.ny {
            for x1 in 0..bx.nx1 {
                for j1 in 0..k1 {
                    for j2 in 0..k2 {
                        let m = |i2| (0..bx.nx2).map(|x2| bx.probs[bx.index(i1, i2, y, x1, x2, j1, j2)]).sum::<f64>();
                        let base = m(0);
                        for i2 in 1..k2 {
                            worst = worst.max((m(i2) - base).abs());
                        }
                    }
                }
            }
        }
    }
    // Sum over the decoder output must not depend on y.
    for i1 in 0..k1 {
        for i2 in 0..k2 {
            for x1 in 0..bx.nx1 {
                for x2 in 0..bx.nx2 {
                    let m = |y| {
                        let mut s = 0.0;
                        for j1 in 0..k1 {
                            for j2 in 0..k2 {
                                s += bx.probs[bx.index(i1, i2, y, x1, x2, j1, j2)];
                            }
                        }
                        s
                    };
                    let base = m(0);
                    for y in 1..bx.ny {
                        worst = worst.max((m(y) - base).abs());
                    }
                }
            }
        }
    }
    rep.non_signaling = worst;
    let mut success = 0.0;
    for i1 in 0..k1 {
        for i2 in 0..k2 {
            for x1 in 0..bx.nx1 {
                for x2 in 0..bx.nx2 {
                    for y in 0..bx.ny {
                        success += w.get(x1, x2, y) * bx.probs[bx.index(i1, i2, y, x1, x2, i1, i2)];
                    }
                }
            }
        }
    }
    rep.success = success / (k1 * k2) as f64;
    rep
}

/// `W[P](j1 j2 | i1 i2)`, the channel seen by the messages, as a MAC with output `j1 * k2 + j2`.
pub fn induced_channel_explicit(bx: &ExplicitBox, w: &Channel) -> Result<Channel> {
    let (k1, k2) = (bx.k1, bx.k2);
    let mut probs = vec![0.0; k1 * k2 * k1 * k2];
    for i1 in 0..k1 {
        for i2 in 0..k2 {
            for x1 in 0..bx.nx1 {
                for x2 in 0..bx.nx2 {
                    for y in 0..bx.ny {
                        let wv = w.get(x1, x2, y);
                        if wv == 0.0 {
                            continue;
                        }
                        for j1 in 0..k1 {
                            for j2 in 0..k2 {
                                probs[(i1 * k2 + i2) * k1 * k2 + j1 * k2 + j2] +=
                                    wv * bx.probs[bx.index(i1, i2, y, x1, x2, j1, j2)];
                            }
                        }
                    }
                }
            }
        }
    }
    // Box entries carry solver noise around zero.
    for p in probs.iter_mut().filter(|p| **p < 0.0 && **p >= -1e-9) {
        *p = 0.0;
    }
    Channel::new(k1, k2, k1 * k2, probs)
}
