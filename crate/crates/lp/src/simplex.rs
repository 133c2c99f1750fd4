//! Bounded primal revised simplex over a generic field.
//!
//! Rows are written as `a_i . x - s_i = 0` with the row bounds moved onto the
//! logical `s_i`, so every row owns a column of `-I` and the all-logical basis
//! is always available. Infeasible starts are handled by a composite phase 1
//! that minimizes the sum of bound violations of the basic variables.

use crate::lu::Factor;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Zero,
}

/// Basis over structural columns `0..n` followed by logicals `n..n+m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    pub basic: Vec<usize>,
    pub status: Vec<VarStatus>,
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub primal: f64,
    pub dual: f64,
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { primal: 1e-9, dual: 1e-9, pivot: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexParams {
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_limit: usize,
    pub refactor_interval: usize,
    pub tol: Tolerances,
}

/// Presolved program in column-compressed form, minimization sense.
#[derive(Clone, Debug)]
pub struct StandardForm<T> {
    pub m: usize,
    pub n: usize,
    pub col_start: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub vals: Vec<T>,
    pub cost: Vec<T>,
    pub lower: Vec<Option<T>>,
    pub upper: Vec<Option<T>>,
}

impl<T: Scalar> StandardForm<T> {
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StandardForm<U> {
        StandardForm {
            m: self.m,
            n: self.n,
            col_start: self.col_start.clone(),
            row_idx: self.row_idx.clone(),
            vals: self.vals.iter().map(&f).collect(),
            cost: self.cost.iter().map(&f).collect(),
            lower: self.lower.iter().map(|b| b.as_ref().map(&f)).collect(),
            upper: self.upper.iter().map(|b| b.as_ref().map(&f)).collect(),
        }
    }

    fn column(&self, j: usize) -> Vec<(usize, T)> {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|k| (self.row_idx[k], self.vals[k].clone()))
                .collect()
        } else {
            vec![(j - self.n, T::one().neg())]
        }
    }

    /// `y . a_j`
    fn dot_column(&self, y: &[T], j: usize) -> T {
        if j < self.n {
            let mut v = T::zero();
            for k in self.col_start[j]..self.col_start[j + 1] {
                v.add_mul_assign(&self.vals[k], &y[self.row_idx[k]]);
            }
            v
        } else {
            y[j - self.n].neg()
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        matches!((&self.lower[j], &self.upper[j]), (Some(l), Some(u)) if l == u)
    }

    fn resting_status(&self, j: usize) -> VarStatus {
        if self.lower[j].is_some() {
            VarStatus::AtLower
        } else if self.upper[j].is_some() {
            VarStatus::AtUpper
        } else {
            VarStatus::Zero
        }
    }

    fn resting_value(&self, status: VarStatus, j: usize) -> T {
        match status {
            VarStatus::AtLower => self.lower[j].clone().unwrap_or_else(T::zero),
            VarStatus::AtUpper => self.upper[j].clone().unwrap_or_else(T::zero),
            _ => T::zero(),
        }
    }

    pub fn slack_basis(&self) -> Basis {
        let mut status: Vec<VarStatus> = (0..self.n).map(|j| self.resting_status(j)).collect();
        status.extend(std::iter::repeat(VarStatus::Basic).take(self.m));
        Basis { basic: (self.n..self.n + self.m).collect(), status }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

pub struct SimplexResult<T> {
    pub outcome: Outcome,
    pub x: Vec<T>,
    pub basis: Basis,
    pub iterations: usize,
}

struct State<'a, T: Scalar> {
    sf: &'a StandardForm<T>,
    params: &'a SimplexParams,
    basis: Basis,
    x: Vec<T>,
    factor: Option<Factor<T>>,
}

impl<'a, T: Scalar> State<'a, T> {
    fn refactor(&mut self) {
        let sf = self.sf;
        loop {
            let cols: Vec<Vec<(usize, T)>> = self.basis.basic.iter().map(|&j| sf.column(j)).collect();
            match Factor::new(sf.m, &cols) {
                Ok(f) => {
                    self.factor = Some(f);
                    break;
                }
                Err(s) => {
                    log::debug!("singular basis, patching {} columns", s.positions.len());
                    for (pos, row) in s.positions.into_iter().zip(s.rows) {
                        let out = self.basis.basic[pos];
                        let st = sf.resting_status(out);
                        self.basis.status[out] = st;
                        self.x[out] = sf.resting_value(st, out);
                        let logical = sf.n + row;
                        self.basis.basic[pos] = logical;
                        self.basis.status[logical] = VarStatus::Basic;
                    }
                }
            }
        }
        self.recompute_basics();
    }

    /// `x_B = -B^{-1} N x_N`
    fn recompute_basics(&mut self) {
        let sf = self.sf;
        let mut rhs = vec![T::zero(); sf.m];
        for j in 0..sf.n {
            if self.basis.status[j] != VarStatus::Basic && !self.x[j].eq_zero() {
                for k in sf.col_start[j]..sf.col_start[j + 1] {
                    rhs[sf.row_idx[k]].sub_mul_assign(&sf.vals[k], &self.x[j]);
                }
            }
        }
        for i in 0..sf.m {
            let j = sf.n + i;
            if self.basis.status[j] != VarStatus::Basic {
                rhs[i] = rhs[i].add(&self.x[j]);
            }
        }
        let xb = self.factor.as_ref().unwrap().ftran(rhs);
        for (pos, v) in xb.into_iter().enumerate() {
            self.x[self.basis.basic[pos]] = v;
        }
    }

    /// Phase-1 gradient on the basic variables; `None` when primal feasible.
    fn infeasibility_costs(&self) -> Option<Vec<T>> {
        let sf = self.sf;
        let tol = self.params.tol.primal;
        let mut any = false;
        let costs = self
            .basis
            .basic
            .iter()
            .map(|&j| {
                let v = &self.x[j];
                if matches!(&sf.lower[j], Some(l) if l.sub(v).is_pos(tol)) {
                    any = true;
                    T::one().neg()
                } else if matches!(&sf.upper[j], Some(u) if v.sub(u).is_pos(tol)) {
                    any = true;
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        any.then_some(costs)
    }
}

/// Row-major copy of the structural matrix.
struct RowWise<T> {
    start: Vec<usize>,
    col: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> RowWise<T> {
    fn new(sf: &StandardForm<T>) -> Self {
        let mut start = vec![0usize; sf.m + 1];
        for &i in &sf.row_idx {
            start[i + 1] += 1;
        }
        for i in 0..sf.m {
            start[i + 1] += start[i];
        }
        let mut next = start.clone();
        let mut col = vec![0usize; sf.row_idx.len()];
        let mut vals = vec![T::zero(); sf.row_idx.len()];
        for j in 0..sf.n {
            for k in sf.col_start[j]..sf.col_start[j + 1] {
                let i = sf.row_idx[k];
                col[next[i]] = j;
                vals[next[i]] = sf.vals[k].clone();
                next[i] += 1;
            }
        }
        RowWise { start, col, vals }
    }

    /// Accumulates `rho . a_j` into `out` for every column touched by a nonzero of `rho`.
    fn pivot_row(&self, sf: &StandardForm<T>, rho: &[T], out: &mut [T], touched: &mut Vec<usize>, seen: &mut [bool]) {
        for (i, r) in rho.iter().enumerate() {
            if r.eq_zero() {
                continue;
            }
            for k in self.start[i]..self.start[i + 1] {
                let j = self.col[k];
                out[j].add_mul_assign(&self.vals[k], r);
                if !seen[j] {
                    seen[j] = true;
                    touched.push(j);
                }
            }
            let logical = sf.n + i;
            out[logical] = r.neg();
            if !seen[logical] {
                seen[logical] = true;
                touched.push(logical);
            }
        }
    }
}

/// Runs the simplex from `start` (or the all-logical basis).
pub fn run<T: Scalar>(sf: &StandardForm<T>, start: Option<&Basis>, params: &SimplexParams) -> SimplexResult<T> {
    let basis = match start {
        Some(b) if b.basic.len() == sf.m && b.status.len() == sf.n + sf.m => b.clone(),
        _ => sf.slack_basis(),
    };
    let x = (0..sf.n + sf.m)
        .map(|j| if basis.status[j] == VarStatus::Basic { T::zero() } else { sf.resting_value(basis.status[j], j) })
        .collect();
    let mut st = State { sf, params, basis, x, factor: None };
    st.refactor();

    let tol = params.tol;
    let mut iterations = 0usize;
    let mut stalled = 0usize;
    let mut bland = false;
    let mut fresh = true;
    // Float solves price with Devex reference weights and carry phase-2
    // reduced costs forward through pivots; exact solves use plain Dantzig.
    let devex = !T::EXACT;
    let mut weights = vec![1.0f64; sf.n + sf.m];
    let mut reduced: Option<Vec<T>> = None;
    let rowwise = if devex { Some(RowWise::new(sf)) } else { None };
    let mut arow = vec![T::zero(); sf.n + sf.m];
    let mut touched: Vec<usize> = Vec::new();
    let mut seen = vec![false; sf.n + sf.m];

    let finish = |st: State<'_, T>, outcome, iterations| SimplexResult { outcome, x: st.x, basis: st.basis, iterations };

    loop {
        if iterations >= params.max_iterations {
            return finish(st, Outcome::IterationLimit, iterations);
        }
        if st.factor.as_ref().unwrap().num_updates() >= params.refactor_interval {
            st.refactor();
            fresh = true;
            reduced = None;
        }
        let phase1 = st.infeasibility_costs();
        let d = match (&phase1, reduced.take()) {
            (None, Some(d)) => d,
            _ => {
                let cb = match &phase1 {
                    Some(c) => c.clone(),
                    None => st.basis.basic.iter().map(|&j| if j < sf.n { sf.cost[j].clone() } else { T::zero() }).collect(),
                };
                let y = st.factor.as_ref().unwrap().btran(cb);
                (0..sf.n + sf.m)
                    .map(|j| {
                        if st.basis.status[j] == VarStatus::Basic {
                            return T::zero();
                        }
                        let cj = if phase1.is_none() && j < sf.n { sf.cost[j].clone() } else { T::zero() };
                        cj.sub(&sf.dot_column(&y, j))
                    })
                    .collect::<Vec<T>>()
            }
        };

        // Pricing.
        let mut entering: Option<(usize, bool)> = None;
        let mut best = 0.0f64;
        for j in 0..sf.n + sf.m {
            let status = st.basis.status[j];
            if status == VarStatus::Basic || sf.is_fixed(j) {
                continue;
            }
            let dj = &d[j];
            let increase = match status {
                VarStatus::AtLower if dj.is_neg(tol.dual) => true,
                VarStatus::AtUpper if dj.is_pos(tol.dual) => false,
                VarStatus::Zero if dj.is_neg(tol.dual) => true,
                VarStatus::Zero if dj.is_pos(tol.dual) => false,
                _ => continue,
            };
            if bland {
                entering = Some((j, increase));
                break;
            }
            let m = dj.mag();
            let score = if devex { m * m / weights[j] } else { m };
            if score > best {
                best = score;
                entering = Some((j, increase));
            }
        }

        let Some((q, increase)) = entering else {
            if !fresh {
                st.refactor();
                fresh = true;
                continue;
            }
            let outcome = if phase1.is_some() { Outcome::Infeasible } else { Outcome::Optimal };
            return finish(st, outcome, iterations);
        };

        let mut colq = vec![T::zero(); sf.m];
        for (i, v) in sf.column(q) {
            colq[i] = v;
        }
        let alpha = st.factor.as_ref().unwrap().ftran(colq);

        // Ratio test. `rate` is the change of a basic variable per unit step.
        let ratio = |pos: usize| -> Option<(T, bool)> {
            let a = &alpha[pos];
            if a.mag() <= tol.pivot && !(T::EXACT && !a.eq_zero()) {
                return None;
            }
            let rate = if increase { a.neg() } else { a.clone() };
            let j = st.basis.basic[pos];
            let v = &st.x[j];
            let below = matches!(&sf.lower[j], Some(l) if l.sub(v).is_pos(tol.primal));
            let above = matches!(&sf.upper[j], Some(u) if v.sub(u).is_pos(tol.primal));
            let (bound, to_upper) = if rate.is_neg(0.0) {
                if above {
                    (sf.upper[j].as_ref()?, true)
                } else if below {
                    return None;
                } else {
                    (sf.lower[j].as_ref()?, false)
                }
            } else if below {
                (sf.lower[j].as_ref()?, false)
            } else if above {
                return None;
            } else {
                (sf.upper[j].as_ref()?, true)
            };
            let mut t = bound.sub(v).div(&rate);
            if t.is_neg(0.0) {
                t = T::zero();
            }
            Some((t, to_upper))
        };
        // Float solves use a Harris test: bounds are relaxed by the primal
        // tolerance to find the step limit, then the largest pivot within it wins.
        let mut tmin: Option<T> = None;
        let mut candidates: Vec<(usize, T, bool)> = Vec::new();
        for pos in 0..sf.m {
            if let Some((t, up)) = ratio(pos) {
                let relaxed = if T::EXACT { t.clone() } else { t.add(&T::from_f64(tol.primal / alpha[pos].mag())) };
                if tmin.as_ref().map_or(true, |m| relaxed < *m) {
                    tmin = Some(relaxed);
                }
                candidates.push((pos, t, up));
            }
        }
        let flip = match (&sf.lower[q], &sf.upper[q]) {
            (Some(l), Some(u)) => Some(u.sub(l)),
            _ => None,
        };
        let mut leave: Option<(usize, T, bool)> = None;
        if let Some(tm) = &tmin {
            let limit = tm.clone();
            for (pos, t, up) in candidates {
                if t > limit {
                    continue;
                }
                let better = match &leave {
                    None => true,
                    Some((p, _, _)) => {
                        if bland {
                            st.basis.basic[pos] < st.basis.basic[*p]
                        } else {
                            alpha[pos].mag() > alpha[*p].mag()
                        }
                    }
                };
                if better {
                    leave = Some((pos, t, up));
                }
            }
        }

        let step_is_flip = match (&flip, &leave) {
            (Some(f), Some((_, t, _))) => f <= t,
            (Some(_), None) => true,
            _ => false,
        };
        if leave.is_none() && !step_is_flip {
            if !fresh {
                st.refactor();
                fresh = true;
                continue;
            }
            let outcome = if phase1.is_some() { Outcome::NumericalFailure } else { Outcome::Unbounded };
            return finish(st, outcome, iterations);
        }

        let theta = if step_is_flip { flip.clone().unwrap() } else { leave.as_ref().unwrap().1.clone() };
        let signed = if increase { theta.clone() } else { theta.neg() };
        if !signed.eq_zero() {
            for (pos, a) in alpha.iter().enumerate() {
                if !a.eq_zero() {
                    let j = st.basis.basic[pos];
                    st.x[j].sub_mul_assign(a, &signed);
                }
            }
            st.x[q] = st.x[q].add(&signed);
        }
        if step_is_flip {
            st.basis.status[q] = if increase { VarStatus::AtUpper } else { VarStatus::AtLower };
            st.x[q] = sf.resting_value(st.basis.status[q], q);
            if devex && phase1.is_none() {
                reduced = Some(d);
            }
        } else {
            let (r, _, to_upper) = leave.unwrap();
            let out = st.basis.basic[r];
            if devex {
                let mut e = vec![T::zero(); sf.m];
                e[r] = T::one();
                let rho = st.factor.as_ref().unwrap().btran(e);
                let pivot = alpha[r].clone();
                let ratio_q = d[q].div(&pivot);
                let wq = weights[q];
                let pm = pivot.mag();
                let keep = phase1.is_none();
                let mut d = d;
                rowwise.as_ref().unwrap().pivot_row(sf, &rho, &mut arow, &mut touched, &mut seen);
                for &j in &touched {
                    seen[j] = false;
                    let arj = std::mem::replace(&mut arow[j], T::zero());
                    if j == q || st.basis.status[j] == VarStatus::Basic || arj.eq_zero() {
                        continue;
                    }
                    let g = arj.mag() / pm;
                    weights[j] = weights[j].max(g * g * wq);
                    if keep {
                        d[j].sub_mul_assign(&arj, &ratio_q);
                    }
                }
                touched.clear();
                weights[out] = (wq / (pm * pm)).max(1.0);
                if wq > 1e6 {
                    weights.iter_mut().for_each(|w| *w = 1.0);
                }
                if keep {
                    d[q] = T::zero();
                    d[out] = ratio_q.neg();
                    reduced = Some(d);
                }
            }
            st.basis.status[out] = if to_upper { VarStatus::AtUpper } else { VarStatus::AtLower };
            st.x[out] = sf.resting_value(st.basis.status[out], out);
            st.basis.basic[r] = q;
            st.basis.status[q] = VarStatus::Basic;
            st.factor.as_mut().unwrap().update(r, &alpha);
            fresh = false;
        }
        iterations += 1;

        if theta.is_pos(tol.primal) {
            stalled = 0;
            bland = false;
        } else {
            stalled += 1;
            if stalled > params.stall_limit && !bland {
                log::debug!("switching to Bland's rule after {} degenerate pivots", stalled);
                bland = true;
            }
        }
    }
}
