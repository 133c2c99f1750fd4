use crate::error::LpError;
use crate::scalar::Scalar;
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row<T> {
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

/// Sparse linear program with per-variable bounds.
///
/// Variables default to `[0, +inf)`. `None` in a bound slot means infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T = f64> {
    pub name: String,
    pub sense: Sense,
    objective: Vec<T>,
    pub objective_constant: T,
    rows: Vec<Row<T>>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
}

/// Rational-coefficient program, the input accepted by exact mode.
pub type ExactProgram = LinearProgram<BigRational>;

impl<T: Scalar> LinearProgram<T> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            name: "lp".to_string(),
            sense,
            objective: Vec::new(),
            objective_constant: T::zero(),
            rows: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
        }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Adds `count` nonnegative variables and returns the first index.
    pub fn add_vars(&mut self, count: usize) -> usize {
        let first = self.objective.len();
        self.objective.resize(first + count, T::zero());
        self.lower.resize(first + count, Some(T::zero()));
        self.upper.resize(first + count, None);
        first
    }

    pub fn add_var(&mut self, lower: Option<T>, upper: Option<T>) -> usize {
        let j = self.add_vars(1);
        self.lower[j] = lower;
        self.upper[j] = upper;
        j
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<T>, upper: Option<T>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_objective(&mut self, var: usize, coeff: T) {
        self.objective[var] = coeff;
    }

    /// Appends a row. Repeated variable indices are summed.
    pub fn add_row(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) -> usize {
        let mut coeffs = coeffs;
        coeffs.sort_by_key(|c| c.0);
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(coeffs.len());
        for (j, v) in coeffs {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 = last.1.add(&v),
                _ => merged.push((j, v)),
            }
        }
        merged.retain(|(_, v)| !v.eq_zero());
        self.rows.push(Row { coeffs: merged, relation, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn lower(&self, j: usize) -> Option<&T> {
        self.lower[j].as_ref()
    }

    pub fn upper(&self, j: usize) -> Option<&T> {
        self.upper[j].as_ref()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(&(j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::BadIndex { row: i, var: j });
            }
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                if l > u {
                    return Err(LpError::EmptyBounds(j));
                }
            }
        }
        Ok(())
    }

    /// Objective value of a point, including the constant term.
    pub fn evaluate(&self, x: &[T]) -> T {
        let mut v = self.objective_constant.clone();
        for (c, xj) in self.objective.iter().zip(x) {
            v.add_mul_assign(c, xj);
        }
        v
    }

    /// Row activities `a_i . x`.
    pub fn activities(&self, x: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|r| {
                let mut v = T::zero();
                for (j, a) in &r.coeffs {
                    v.add_mul_assign(a, &x[*j]);
                }
                v
            })
            .collect()
    }

    /// Largest bound or row violation of `x` (in doubles).
    pub fn max_violation(&self, x: &[T]) -> f64 {
        let mut worst = 0.0f64;
        for (j, xj) in x.iter().enumerate() {
            if let Some(l) = &self.lower[j] {
                worst = worst.max(l.sub(xj).to_f64());
            }
            if let Some(u) = &self.upper[j] {
                worst = worst.max(xj.sub(u).to_f64());
            }
        }
        for (row, act) in self.rows.iter().zip(self.activities(x)) {
            let d = act.sub(&row.rhs).to_f64();
            let v = match row.relation {
                Relation::Le => d,
                Relation::Ge => -d,
                Relation::Eq => d.abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearProgram<U> {
        LinearProgram {
            name: self.name.clone(),
            sense: self.sense,
            objective: self.objective.iter().map(&f).collect(),
            objective_constant: f(&self.objective_constant),
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    coeffs: r.coeffs.iter().map(|(j, v)| (*j, f(v))).collect(),
                    relation: r.relation,
                    rhs: f(&r.rhs),
                })
                .collect(),
            lower: self.lower.iter().map(|b| b.as_ref().map(&f)).collect(),
            upper: self.upper.iter().map(|b| b.as_ref().map(&f)).collect(),
        }
    }

    pub fn to_f64(&self) -> LinearProgram<f64> {
        self.map(|v| v.to_f64())
    }
}
