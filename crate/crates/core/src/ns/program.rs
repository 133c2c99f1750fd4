//! Linear programs for non-signaling assisted coding.
//!
//! The element programs index variables by `(x1, x2, y)` triples and `(x1, x2)`
//! pairs of a single channel use. The orbit programs index them by joint types
//! of `n` uses, which is exact because the optimum of a symmetric program is
//! attained by a symmetric point.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::orbit::{orbit_channel_value, size_ratio, OrbitTable, TripleMaps};
use nsmac_lp::{BigRational, LinearProgram, Relation, Scalar, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Variables `r, r1, r2, p` with five inequalities per triple.
    Standard,
    /// Variables `r, a = r1 - r, b = r2 - r, p`; one inequality per triple.
    Compact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NsObjective {
    /// Probability that both messages are decoded.
    Joint,
    /// Average per-message success probability.
    Sum,
}

/// Where each family of variables lives in the LP column space.
#[derive(Clone, Debug, PartialEq)]
pub struct NsLayout {
    pub triples: usize,
    pub pairs: usize,
    pub form: Formulation,
    pub relaxed: bool,
}

impl NsLayout {
    pub fn r(&self, w: usize) -> usize {
        w
    }
    /// `r1` (standard) or `a` (compact).
    pub fn second(&self, w: usize) -> usize {
        self.triples + w
    }
    /// `r2` (standard) or `b` (compact).
    pub fn third(&self, w: usize) -> usize {
        2 * self.triples + w
    }
    pub fn p(&self, u: usize) -> usize {
        if self.relaxed {
            self.triples + u
        } else {
            3 * self.triples + u
        }
    }
    pub fn num_vars(&self) -> usize {
        if self.relaxed {
            self.triples + self.pairs
        } else {
            3 * self.triples + self.pairs
        }
    }

    /// `(r, r1, r2, p)` per orbit from an LP point.
    pub fn unpack(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        assert!(!self.relaxed);
        let t = self.triples;
        let r = x[..t].to_vec();
        let (mut r1, mut r2) = (x[t..2 * t].to_vec(), x[2 * t..3 * t].to_vec());
        if self.form == Formulation::Compact {
            for w in 0..t {
                r1[w] += r[w];
                r2[w] += r[w];
            }
        }
        (r, r1, r2, x[3 * t..3 * t + self.pairs].to_vec())
    }
}

#[derive(Clone, Debug)]
pub struct NsProgram<T> {
    pub lp: LinearProgram<T>,
    pub layout: NsLayout,
}

/// Orbit tables for `n` uses of a channel shape and the marginal maps between them.
#[derive(Clone, Debug)]
pub struct OrbitSystem {
    pub n: usize,
    pub nx1: usize,
    pub nx2: usize,
    pub ny: usize,
    pub triples: OrbitTable,
    pub pairs: OrbitTable,
    pub x2y: OrbitTable,
    pub x1y: OrbitTable,
    pub ys: OrbitTable,
    pub x1s: OrbitTable,
    pub x2s: OrbitTable,
    pub w_pair: Vec<usize>,
    pub w_x2y: Vec<usize>,
    pub w_x1y: Vec<usize>,
    pub w_y: Vec<usize>,
    pub u_x1: Vec<usize>,
    pub u_x2: Vec<usize>,
    pub v2_x2: Vec<usize>,
    pub v1_x1: Vec<usize>,
}

impl OrbitSystem {
    pub fn new(w: &Channel, n: usize) -> Result<Self> {
        let (nx1, nx2, ny) = (w.nx1(), w.nx2(), w.ny());
        let maps = TripleMaps::new(nx1, nx2, ny);
        let triples = OrbitTable::new(nx1 * nx2 * ny, n)?;
        let pairs = OrbitTable::new(nx1 * nx2, n)?;
        let x2y = OrbitTable::new(nx2 * ny, n)?;
        let x1y = OrbitTable::new(nx1 * ny, n)?;
        let ys = OrbitTable::new(ny, n)?;
        let x1s = OrbitTable::new(nx1, n)?;
        let x2s = OrbitTable::new(nx2, n)?;
        Ok(OrbitSystem {
            n,
            nx1,
            nx2,
            ny,
            w_pair: triples.project(&pairs, &maps.to_pair),
            w_x2y: triples.project(&x2y, &maps.to_x2y),
            w_x1y: triples.project(&x1y, &maps.to_x1y),
            w_y: triples.project(&ys, &maps.to_y),
            u_x1: pairs.project(&x1s, &maps.pair_to_x1),
            u_x2: pairs.project(&x2s, &maps.pair_to_x2),
            v2_x2: x2y.project(&x2s, &maps.x2y_to_x2),
            v1_x1: x1y.project(&x1s, &maps.x1y_to_x1),
            triples,
            pairs,
            x2y,
            x1y,
            ys,
            x1s,
            x2s,
        })
    }

    /// `|w| / |w_{X1X2}|`, the number of output sequences per input pair in `w`.
    pub fn fiber(&self, w: usize) -> BigRational {
        size_ratio(self.triples.size(w), self.pairs.size(self.w_pair[w]))
    }
}

fn group(keys: &[usize], buckets: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); buckets];
    for (i, &k) in keys.iter().enumerate() {
        out[k].push(i);
    }
    out
}

fn count<T: Scalar>(k: usize) -> T {
    T::from_i64(k as i64)
}

fn check_sizes(k1: usize, k2: usize) -> Result<()> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::InvalidArgument("message counts must be positive".into()));
    }
    Ok(())
}

/// Non-signaling program over one channel use, indexed by elements.
pub fn build_ns_lp_element<T: Scalar>(w: &Channel, k1: usize, k2: usize, objective: NsObjective) -> Result<NsProgram<T>> {
    check_sizes(k1, k2)?;
    let (nx1, nx2, ny) = (w.nx1(), w.nx2(), w.ny());
    let t = nx1 * nx2 * ny;
    let layout = NsLayout { triples: t, pairs: nx1 * nx2, form: Formulation::Standard, relaxed: false };
    let mut lp = LinearProgram::<T>::new(Sense::Maximize).with_name("ns_element");
    lp.add_vars(layout.num_vars());
    let s = |x1: usize, x2: usize, y: usize| (x1 * nx2 + x2) * ny + y;
    let pair = |x1: usize, x2: usize| x1 * nx2 + x2;
    let norm = count::<T>(k1 * k2);
    let half = T::from_i64(2).mul(&norm);
    for x1 in 0..nx1 {
        for x2 in 0..nx2 {
            for y in 0..ny {
                let e: T = w.entry(s(x1, x2, y))?;
                match objective {
                    NsObjective::Joint => lp.set_objective(layout.r(s(x1, x2, y)), e.div(&norm)),
                    NsObjective::Sum => {
                        lp.set_objective(layout.second(s(x1, x2, y)), e.div(&half));
                        lp.set_objective(layout.third(s(x1, x2, y)), e.div(&half));
                    }
                }
            }
        }
    }
    let (k1t, k2t) = (count::<T>(k1), count::<T>(k2));
    let one = T::one();
    let neg = one.neg();
    for y in 0..ny {
        let row = (0..nx1).flat_map(|x1| (0..nx2).map(move |x2| (s(x1, x2, y), T::one()))).collect();
        lp.add_row(row, Relation::Eq, T::one());
    }
    for x2 in 0..nx2 {
        for y in 0..ny {
            let mut row = Vec::new();
            for x1 in 0..nx1 {
                row.push((layout.second(s(x1, x2, y)), one.clone()));
                row.push((layout.r(s(x1, x2, y)), k1t.neg()));
            }
            lp.add_row(row, Relation::Eq, T::zero());
        }
    }
    for x1 in 0..nx1 {
        for y in 0..ny {
            let mut row = Vec::new();
            for x2 in 0..nx2 {
                row.push((layout.third(s(x1, x2, y)), one.clone()));
                row.push((layout.r(s(x1, x2, y)), k2t.neg()));
            }
            lp.add_row(row, Relation::Eq, T::zero());
        }
    }
    for x2 in 0..nx2 {
        for y in 0..ny {
            let mut row = Vec::new();
            for x1 in 0..nx1 {
                row.push((layout.p(pair(x1, x2)), one.clone()));
                row.push((layout.third(s(x1, x2, y)), k1t.neg()));
            }
            lp.add_row(row, Relation::Eq, T::zero());
        }
    }
    for x1 in 0..nx1 {
        for y in 0..ny {
            let mut row = Vec::new();
            for x2 in 0..nx2 {
                row.push((layout.p(pair(x1, x2)), one.clone()));
                row.push((layout.second(s(x1, x2, y)), k2t.neg()));
            }
            lp.add_row(row, Relation::Eq, T::zero());
        }
    }
    for x1 in 0..nx1 {
        for x2 in 0..nx2 {
            for y in 0..ny {
                let (r, r1, r2, p) =
                    (layout.r(s(x1, x2, y)), layout.second(s(x1, x2, y)), layout.third(s(x1, x2, y)), layout.p(pair(x1, x2)));
                lp.add_row(vec![(r, one.clone()), (r1, neg.clone())], Relation::Le, T::zero());
                lp.add_row(vec![(r, one.clone()), (r2, neg.clone())], Relation::Le, T::zero());
                lp.add_row(vec![(r1, one.clone()), (p, neg.clone())], Relation::Le, T::zero());
                lp.add_row(vec![(r2, one.clone()), (p, neg.clone())], Relation::Le, T::zero());
                lp.add_row(
                    vec![(p, one.clone()), (r1, neg.clone()), (r2, neg.clone()), (r, one.clone())],
                    Relation::Ge,
                    T::zero(),
                );
            }
        }
    }
    Ok(NsProgram { lp, layout })
}

/// Non-signaling program for `n` uses, indexed by joint types.
pub fn build_ns_lp_orbit<T: Scalar>(
    w: &Channel,
    sys: &OrbitSystem,
    k1: usize,
    k2: usize,
    objective: NsObjective,
    form: Formulation,
) -> Result<NsProgram<T>> {
    check_sizes(k1, k2)?;
    if (w.nx1(), w.nx2(), w.ny()) != (sys.nx1, sys.nx2, sys.ny) {
        return Err(Error::InvalidArgument("orbit tables were built for another channel shape".into()));
    }
    let nt = sys.triples.len();
    let layout = NsLayout { triples: nt, pairs: sys.pairs.len(), form, relaxed: false };
    let mut lp = LinearProgram::<T>::new(Sense::Maximize).with_name("ns_orbit");
    lp.add_vars(layout.num_vars());
    let compact = form == Formulation::Compact;

    let norm = count::<T>(k1 * k2);
    let half = T::from_i64(2).mul(&norm);
    for wi in 0..nt {
        let v: T = orbit_channel_value(w, sys.triples.get(wi))?;
        if v.eq_zero() {
            continue;
        }
        match (objective, compact) {
            (NsObjective::Joint, _) => lp.set_objective(layout.r(wi), v.div(&norm)),
            (NsObjective::Sum, false) => {
                lp.set_objective(layout.second(wi), v.div(&half));
                lp.set_objective(layout.third(wi), v.div(&half));
            }
            (NsObjective::Sum, true) => {
                lp.set_objective(layout.r(wi), v.div(&norm));
                lp.set_objective(layout.second(wi), v.div(&half));
                lp.set_objective(layout.third(wi), v.div(&half));
            }
        }
    }

    let by_y = group(&sys.w_y, sys.ys.len());
    let by_x2y = group(&sys.w_x2y, sys.x2y.len());
    let by_x1y = group(&sys.w_x1y, sys.x1y.len());
    let pairs_by_x2 = group(&sys.u_x2, sys.x2s.len());
    let pairs_by_x1 = group(&sys.u_x1, sys.x1s.len());
    let (k1t, k2t) = (count::<T>(k1), count::<T>(k2));
    let one = T::one();
    let neg = one.neg();

    for (v, members) in by_y.iter().enumerate() {
        let rhs = T::from_rational(&size_ratio(sys.ys.size(v), &1u32.into()));
        lp.add_row(members.iter().map(|&wi| (layout.r(wi), one.clone())).collect(), Relation::Eq, rhs);
    }
    // r1 (resp. r2) mass is k1 (resp. k2) times the r mass on each (x2,y) (resp. (x1,y)) class.
    let (k1m, k2m) = if compact { (count::<T>(k1 - 1), count::<T>(k2 - 1)) } else { (k1t.clone(), k2t.clone()) };
    for members in &by_x2y {
        let mut row = Vec::with_capacity(2 * members.len());
        for &wi in members {
            row.push((layout.second(wi), one.clone()));
            row.push((layout.r(wi), k1m.neg()));
        }
        lp.add_row(row, Relation::Eq, T::zero());
    }
    for members in &by_x1y {
        let mut row = Vec::with_capacity(2 * members.len());
        for &wi in members {
            row.push((layout.third(wi), one.clone()));
            row.push((layout.r(wi), k2m.neg()));
        }
        lp.add_row(row, Relation::Eq, T::zero());
    }
    for (v2, members) in by_x2y.iter().enumerate() {
        let tau = sys.v2_x2[v2];
        let coef = T::from_rational(&size_ratio(sys.x2s.size(tau), sys.x2y.size(v2))).mul(&k1t);
        let mut row: Vec<(usize, T)> = pairs_by_x2[tau].iter().map(|&u| (layout.p(u), one.clone())).collect();
        for &wi in members {
            row.push((layout.third(wi), coef.neg()));
            if compact {
                row.push((layout.r(wi), coef.neg()));
            }
        }
        lp.add_row(row, Relation::Eq, T::zero());
    }
    for (v1, members) in by_x1y.iter().enumerate() {
        let tau = sys.v1_x1[v1];
        let coef = T::from_rational(&size_ratio(sys.x1s.size(tau), sys.x1y.size(v1))).mul(&k2t);
        let mut row: Vec<(usize, T)> = pairs_by_x1[tau].iter().map(|&u| (layout.p(u), one.clone())).collect();
        for &wi in members {
            row.push((layout.second(wi), coef.neg()));
            if compact {
                row.push((layout.r(wi), coef.neg()));
            }
        }
        lp.add_row(row, Relation::Eq, T::zero());
    }
    for wi in 0..nt {
        let c = T::from_rational(&sys.fiber(wi));
        let (r, s2, s3, p) = (layout.r(wi), layout.second(wi), layout.third(wi), layout.p(sys.w_pair[wi]));
        if compact {
            lp.add_row(
                vec![(p, c), (r, neg.clone()), (s2, neg.clone()), (s3, neg.clone())],
                Relation::Ge,
                T::zero(),
            );
        } else {
            lp.add_row(vec![(r, one.clone()), (s2, neg.clone())], Relation::Le, T::zero());
            lp.add_row(vec![(r, one.clone()), (s3, neg.clone())], Relation::Le, T::zero());
            lp.add_row(vec![(s2, one.clone()), (p, c.neg())], Relation::Le, T::zero());
            lp.add_row(vec![(s3, one.clone()), (p, c.neg())], Relation::Le, T::zero());
            lp.add_row(
                vec![(p, c), (s2, neg.clone()), (s3, neg.clone()), (r, one.clone())],
                Relation::Ge,
                T::zero(),
            );
        }
    }
    Ok(NsProgram { lp, layout })
}

/// Relaxed program over one channel use, indexed by elements.
pub fn build_relaxed_lp_element<T: Scalar>(w: &Channel, k1: usize, k2: usize) -> Result<NsProgram<T>> {
    check_sizes(k1, k2)?;
    let (nx1, nx2, ny) = (w.nx1(), w.nx2(), w.ny());
    let layout = NsLayout { triples: nx1 * nx2 * ny, pairs: nx1 * nx2, form: Formulation::Standard, relaxed: true };
    let mut lp = LinearProgram::<T>::new(Sense::Maximize).with_name("relaxed_element");
    lp.add_vars(layout.num_vars());
    let s = |x1: usize, x2: usize, y: usize| (x1 * nx2 + x2) * ny + y;
    let pair = |x1: usize, x2: usize| x1 * nx2 + x2;
    let norm = count::<T>(k1 * k2);
    for idx in 0..layout.triples {
        let e: T = w.entry(idx)?;
        lp.set_objective(layout.r(idx), e.div(&norm));
    }
    let one = T::one();
    for y in 0..ny {
        let row = (0..nx1).flat_map(|x1| (0..nx2).map(move |x2| (s(x1, x2, y), T::one()))).collect();
        lp.add_row(row, Relation::Le, T::one());
    }
    lp.add_row((0..layout.pairs).map(|u| (layout.p(u), one.clone())).collect(), Relation::Eq, norm.clone());
    for x2 in 0..nx2 {
        for y in 0..ny {
            let mut row = Vec::new();
            for x1 in 0..nx1 {
                row.push((layout.p(pair(x1, x2)), one.clone()));
                row.push((layout.r(s(x1, x2, y)), count::<T>(k1).neg()));
            }
            lp.add_row(row, Relation::Ge, T::zero());
        }
    }
    for x1 in 0..nx1 {
        for y in 0..ny {
            let mut row = Vec::new();
            for x2 in 0..nx2 {
                row.push((layout.p(pair(x1, x2)), one.clone()));
                row.push((layout.r(s(x1, x2, y)), count::<T>(k2).neg()));
            }
            lp.add_row(row, Relation::Ge, T::zero());
        }
    }
    for x1 in 0..nx1 {
        for x2 in 0..nx2 {
            for y in 0..ny {
                lp.add_row(
                    vec![(layout.r(s(x1, x2, y)), one.clone()), (layout.p(pair(x1, x2)), one.neg())],
                    Relation::Le,
                    T::zero(),
                );
            }
        }
    }
    Ok(NsProgram { lp, layout })
}

/// Relaxed program for `n` uses, indexed by joint types.
pub fn build_relaxed_lp_orbit<T: Scalar>(w: &Channel, sys: &OrbitSystem, k1: usize, k2: usize) -> Result<NsProgram<T>> {
    check_sizes(k1, k2)?;
    let nt = sys.triples.len();
    let layout = NsLayout { triples: nt, pairs: sys.pairs.len(), form: Formulation::Standard, relaxed: true };
    let mut lp = LinearProgram::<T>::new(Sense::Maximize).with_name("relaxed_orbit");
    lp.add_vars(layout.num_vars());
    let norm = count::<T>(k1 * k2);
    for wi in 0..nt {
        let v: T = orbit_channel_value(w, sys.triples.get(wi))?;
        if !v.eq_zero() {
            lp.set_objective(layout.r(wi), v.div(&norm));
        }
    }
    let by_y = group(&sys.w_y, sys.ys.len());
    let by_x2y = group(&sys.w_x2y, sys.x2y.len());
    let by_x1y = group(&sys.w_x1y, sys.x1y.len());
    let pairs_by_x2 = group(&sys.u_x2, sys.x2s.len());
    let pairs_by_x1 = group(&sys.u_x1, sys.x1s.len());
    let one = T::one();
    for (v, members) in by_y.iter().enumerate() {
        let rhs = T::from_rational(&size_ratio(sys.ys.size(v), &1u32.into()));
        lp.add_row(members.iter().map(|&wi| (layout.r(wi), one.clone())).collect(), Relation::Le, rhs);
    }
    lp.add_row((0..layout.pairs).map(|u| (layout.p(u), one.clone())).collect(), Relation::Eq, norm);
    for (v2, members) in by_x2y.iter().enumerate() {
        let tau = sys.v2_x2[v2];
        let coef = T::from_rational(&size_ratio(sys.x2y.size(v2), sys.x2s.size(tau)));
        let mut row: Vec<(usize, T)> = pairs_by_x2[tau].iter().map(|&u| (layout.p(u), coef.clone())).collect();
        row.extend(members.iter().map(|&wi| (layout.r(wi), count::<T>(k1).neg())));
        lp.add_row(row, Relation::Ge, T::zero());
    }
    for (v1, members) in by_x1y.iter().enumerate() {
        let tau = sys.v1_x1[v1];
        let coef = T::from_rational(&size_ratio(sys.x1y.size(v1), sys.x1s.size(tau)));
        let mut row: Vec<(usize, T)> = pairs_by_x1[tau].iter().map(|&u| (layout.p(u), coef.clone())).collect();
        row.extend(members.iter().map(|&wi| (layout.r(wi), count::<T>(k2).neg())));
        lp.add_row(row, Relation::Ge, T::zero());
    }
    for wi in 0..nt {
        let c = T::from_rational(&sys.fiber(wi));
        lp.add_row(vec![(layout.r(wi), one.clone()), (layout.p(sys.w_pair[wi]), c.neg())], Relation::Le, T::zero());
    }
    Ok(NsProgram { lp, layout })
}
