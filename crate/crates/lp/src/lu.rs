//! Sparse LU factorization of simplex bases with product-form updates.
//!
//! Pivots are chosen by a Markowitz search over the sparsest columns,
//! restricted by a relative threshold in floating point. Column and row
//! counts live in bucketed linked lists so singletons are found in O(1).

use crate::scalar::Scalar;

const NONE: usize = usize::MAX;
const SEARCH_COLUMNS: usize = 4;

struct Buckets {
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    bucket: Vec<usize>,
}

impl Buckets {
    fn new(items: usize, max_count: usize) -> Self {
        Buckets {
            head: vec![NONE; max_count + 1],
            next: vec![NONE; items],
            prev: vec![NONE; items],
            bucket: vec![NONE; items],
        }
    }

    fn insert(&mut self, item: usize, count: usize) {
        let h = self.head[count];
        self.next[item] = h;
        self.prev[item] = NONE;
        if h != NONE {
            self.prev[h] = item;
        }
        self.head[count] = item;
        self.bucket[item] = count;
    }

    fn remove(&mut self, item: usize) {
        let b = self.bucket[item];
        if b == NONE {
            return;
        }
        let (p, n) = (self.prev[item], self.next[item]);
        if p != NONE {
            self.next[p] = n;
        } else {
            self.head[b] = n;
        }
        if n != NONE {
            self.prev[n] = p;
        }
        self.bucket[item] = NONE;
    }

    fn first(&self, count: usize) -> Option<usize> {
        match self.head.get(count) {
            Some(&h) if h != NONE => Some(h),
            _ => None,
        }
    }
}

/// Positions and rows left unpivoted when the basis is singular.
#[derive(Debug, Clone)]
pub struct Singular {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

struct Eta<T> {
    pos: usize,
    pivot: T,
    others: Vec<(usize, T)>,
}

pub struct Factor<T> {
    m: usize,
    prow: Vec<usize>,
    pcol: Vec<usize>,
    lcols: Vec<Vec<(usize, T)>>,
    urows: Vec<Vec<(usize, T)>>,
    udiag: Vec<T>,
    etas: Vec<Eta<T>>,
}

fn find<T>(row: &[(usize, T)], col: usize) -> usize {
    row.iter().position(|e| e.0 == col).expect("pattern out of sync")
}

fn remove_item(v: &mut Vec<usize>, item: usize) {
    if let Some(k) = v.iter().position(|&x| x == item) {
        v.swap_remove(k);
    }
}

impl<T: Scalar> Factor<T> {
    /// Factorizes the `m x m` matrix whose column `pos` is `cols[pos]` (row, value).
    pub fn new(m: usize, cols: &[Vec<(usize, T)>]) -> Result<Self, Singular> {
        let threshold = if T::EXACT { 0.0 } else { 0.1 };
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); m];
        let mut colpat: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (pos, col) in cols.iter().enumerate() {
            for (i, v) in col {
                if !v.negligible() {
                    rows[*i].push((pos, v.clone()));
                    colpat[pos].push(*i);
                }
            }
        }
        let mut colb = Buckets::new(m, m);
        let mut rowb = Buckets::new(m, m);
        for j in 0..m {
            colb.insert(j, colpat[j].len());
            rowb.insert(j, rows[j].len());
        }
        let mut col_done = vec![false; m];
        let mut row_done = vec![false; m];
        let mut mark = vec![NONE; m];
        let mut f = Factor {
            m,
            prow: Vec::with_capacity(m),
            pcol: Vec::with_capacity(m),
            lcols: Vec::with_capacity(m),
            urows: Vec::with_capacity(m),
            udiag: Vec::with_capacity(m),
            etas: Vec::new(),
        };

        for _ in 0..m {
            let choice = Self::choose_pivot(&rows, &colpat, &colb, &rowb, threshold, m);
            let Some((p, q)) = choice else { break };

            let prow_entries = std::mem::take(&mut rows[p]);
            let pivot = prow_entries[find(&prow_entries, q)].1.clone();
            rowb.remove(p);
            colb.remove(q);
            row_done[p] = true;
            col_done[q] = true;
            for (j, _) in &prow_entries {
                if *j != q {
                    remove_item(&mut colpat[*j], p);
                }
            }
            let others: Vec<usize> = std::mem::take(&mut colpat[q]).into_iter().filter(|&i| i != p).collect();
            let mut lcol = Vec::with_capacity(others.len());
            for i in others {
                let row = &mut rows[i];
                let a = row.swap_remove(find(row, q)).1;
                let l = a.div(&pivot);
                for (t, (j, _)) in row.iter().enumerate() {
                    mark[*j] = t;
                }
                for (j, apj) in &prow_entries {
                    if *j == q {
                        continue;
                    }
                    if mark[*j] != NONE {
                        row[mark[*j]].1.sub_mul_assign(&l, apj);
                    } else {
                        row.push((*j, l.mul(apj).neg()));
                        mark[*j] = row.len() - 1;
                        colpat[*j].push(i);
                    }
                }
                for (j, _) in row.iter() {
                    mark[*j] = NONE;
                }
                let mut dropped = Vec::new();
                row.retain(|(j, v)| {
                    if v.negligible() {
                        dropped.push(*j);
                        false
                    } else {
                        true
                    }
                });
                for j in dropped {
                    remove_item(&mut colpat[j], i);
                }
                rowb.remove(i);
                rowb.insert(i, rows[i].len());
                lcol.push((i, l));
            }
            for (j, _) in &prow_entries {
                if *j != q {
                    colb.remove(*j);
                    colb.insert(*j, colpat[*j].len());
                }
            }
            f.prow.push(p);
            f.pcol.push(q);
            f.udiag.push(pivot);
            f.urows.push(prow_entries.into_iter().filter(|(j, _)| *j != q).collect());
            f.lcols.push(lcol);
        }

        if f.prow.len() < m {
            return Err(Singular {
                positions: (0..m).filter(|&j| !col_done[j]).collect(),
                rows: (0..m).filter(|&i| !row_done[i]).collect(),
            });
        }
        Ok(f)
    }

    fn choose_pivot(
        rows: &[Vec<(usize, T)>],
        colpat: &[Vec<usize>],
        colb: &Buckets,
        rowb: &Buckets,
        threshold: f64,
        m: usize,
    ) -> Option<(usize, usize)> {
        if let Some(q) = colb.first(1) {
            return Some((colpat[q][0], q));
        }
        let col_max = |q: usize| {
            colpat[q]
                .iter()
                .map(|&i| rows[i][find(&rows[i], q)].1.mag())
                .fold(0.0f64, f64::max)
        };
        if let Some(p) = rowb.first(1) {
            let (q, v) = &rows[p][0];
            if v.mag() >= threshold * col_max(*q) {
                return Some((p, *q));
            }
        }
        let mut best: Option<(usize, usize, usize)> = None;
        let mut examined = 0;
        for c in 2..=m {
            let mut q = colb.head[c];
            while q != NONE {
                let cmax = col_max(q);
                for &i in &colpat[q] {
                    let v = &rows[i][find(&rows[i], q)].1;
                    if v.mag() >= threshold * cmax {
                        let cost = (rows[i].len() - 1) * (c - 1);
                        if best.map_or(true, |b| cost < b.0) {
                            best = Some((cost, i, q));
                        }
                    }
                }
                examined += 1;
                if best.is_some() && examined >= SEARCH_COLUMNS {
                    return best.map(|b| (b.1, b.2));
                }
                q = colb.next[q];
            }
            if let Some(b) = best {
                if b.0 <= (c - 1) * (c - 1) {
                    return Some((b.1, b.2));
                }
            }
        }
        best.map(|b| (b.1, b.2))
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B x = b`; `b` is indexed by row, the result by basis position.
    pub fn ftran(&self, mut w: Vec<T>) -> Vec<T> {
        for k in 0..self.m {
            let wp = w[self.prow[k]].clone();
            if wp.eq_zero() {
                continue;
            }
            for (i, l) in &self.lcols[k] {
                w[*i].sub_mul_assign(l, &wp);
            }
        }
        let mut x = vec![T::zero(); self.m];
        for k in (0..self.m).rev() {
            let mut v = std::mem::replace(&mut w[self.prow[k]], T::zero());
            for (q, u) in &self.urows[k] {
                v.sub_mul_assign(u, &x[*q]);
            }
            x[self.pcol[k]] = v.div(&self.udiag[k]);
        }
        for eta in &self.etas {
            let xr = x[eta.pos].div(&eta.pivot);
            if !xr.eq_zero() {
                for (i, a) in &eta.others {
                    x[*i].sub_mul_assign(a, &xr);
                }
            }
            x[eta.pos] = xr;
        }
        x
    }

    /// Solves `B^T y = c`; `c` is indexed by basis position, the result by row.
    pub fn btran(&self, mut c: Vec<T>) -> Vec<T> {
        for eta in self.etas.iter().rev() {
            let mut v = c[eta.pos].clone();
            for (i, a) in &eta.others {
                v.sub_mul_assign(a, &c[*i]);
            }
            c[eta.pos] = v.div(&eta.pivot);
        }
        let mut y = vec![T::zero(); self.m];
        for k in 0..self.m {
            let z = c[self.pcol[k]].div(&self.udiag[k]);
            if !z.eq_zero() {
                for (q, u) in &self.urows[k] {
                    c[*q].sub_mul_assign(u, &z);
                }
            }
            y[self.prow[k]] = z;
        }
        for k in (0..self.m).rev() {
            let mut v = y[self.prow[k]].clone();
            for (i, l) in &self.lcols[k] {
                v.sub_mul_assign(l, &y[*i]);
            }
            y[self.prow[k]] = v;
        }
        y
    }

    /// Replaces the column at `pos` given `alpha = B^{-1} a_new`.
    pub fn update(&mut self, pos: usize, alpha: &[T]) {
        let others = alpha
            .iter()
            .enumerate()
            .filter(|(i, a)| *i != pos && !a.eq_zero())
            .map(|(i, a)| (i, a.clone()))
            .collect();
        self.etas.push(Eta { pos, pivot: alpha[pos].clone(), others });
    }
}
