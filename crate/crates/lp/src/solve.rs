use crate::error::LpError;
use crate::problem::{LinearProgram, Relation, Sense};
use crate::scalar::Scalar;
use crate::simplex::{self, Basis, Outcome, SimplexParams, StandardForm, Tolerances};
use num_rational::BigRational;
use num_traits::One;
use std::path::PathBuf;

/// Environment variable naming an external solver executable.
pub const EXTERNAL_SOLVER_ENV: &str = "NSMAC_LP_SOLVER";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Float,
    /// Float warm start, then rational pivots from that basis until exactly optimal.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

impl From<Outcome> for LpStatus {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Infeasible => LpStatus::Infeasible,
            Outcome::Unbounded => LpStatus::Unbounded,
            Outcome::IterationLimit => LpStatus::IterationLimit,
            Outcome::NumericalFailure => LpStatus::NumericalFailure,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub value: BigRational,
    pub primal: Vec<BigRational>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value including the constant term (NaN unless optimal).
    pub value: f64,
    pub primal: Vec<f64>,
    pub iterations: usize,
    pub exact: Option<ExactSolution>,
    pub backend: String,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn without_point(status: LpStatus, n: usize, backend: &str) -> Self {
        LpSolution {
            status,
            value: f64::NAN,
            primal: vec![0.0; n],
            iterations: 0,
            exact: None,
            backend: backend.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub mode: SolveMode,
    pub max_iterations: usize,
    /// Degenerate pivots tolerated before Bland's rule; default `5 * num_vars`.
    pub stall_limit: Option<usize>,
    pub refactor_interval: usize,
    pub tolerances: Tolerances,
    /// External solver executable used for float solves.
    pub external: Option<PathBuf>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            mode: SolveMode::Float,
            max_iterations: 5_000_000,
            stall_limit: None,
            refactor_interval: 64,
            tolerances: Tolerances::default(),
            external: std::env::var_os(EXTERNAL_SOLVER_ENV).map(PathBuf::from),
        }
    }
}

impl SolverOptions {
    pub fn with_mode(mode: SolveMode) -> Self {
        SolverOptions { mode, ..Default::default() }
    }

    /// Same options without the external solver hook.
    pub fn internal(mut self) -> Self {
        self.external = None;
        self
    }
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>, mode: SolveMode) -> Result<LpSolution, LpError> {
    solve_with(lp, &SolverOptions::with_mode(mode))
}

pub fn solve_with<T: Scalar>(lp: &LinearProgram<T>, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    match opts.mode {
        SolveMode::Float => {
            if let Some(path) = &opts.external {
                return crate::external::solve_external(&lp.to_f64(), path);
            }
            let pre = Presolved::new(&lp.to_f64());
            Ok(pre.finish_float(run_float(&pre, opts)))
        }
        SolveMode::Exact => {
            if !T::EXACT {
                return Err(LpError::NotRational);
            }
            let exact = lp.map(|v| v.to_exact().expect("exact scalar"));
            let pre = Presolved::new(&exact);
            let float = pre.map(|v| v.to_f64());
            let warm = run_float(&float, opts);
            let start = warm.as_ref().map(|r| r.basis.clone());
            let float_iters = warm.as_ref().map_or(0, |r| r.iterations);
            let result = pre.sf.as_ref().map(|sf| {
                let params = params_for(sf.n, opts);
                simplex::run(sf, start.as_ref(), &params)
            });
            let mut sol = pre.finish_exact(result);
            sol.iterations += float_iters;
            Ok(sol)
        }
    }
}

fn params_for(n: usize, opts: &SolverOptions) -> SimplexParams {
    SimplexParams {
        max_iterations: opts.max_iterations,
        stall_limit: opts.stall_limit.unwrap_or(5 * n.max(1)),
        refactor_interval: opts.refactor_interval,
        tol: opts.tolerances,
    }
}

fn run_float(pre: &Presolved<f64>, opts: &SolverOptions) -> Option<simplex::SimplexResult<f64>> {
    pre.sf.as_ref().map(|sf| simplex::run(sf, None, &params_for(sf.n, opts)))
}

/// Outcome of presolve: either a verdict or a reduced standard form.
struct Presolved<T> {
    n_orig: usize,
    sense: Sense,
    verdict: Option<LpStatus>,
    /// Values of removed columns.
    fixed: Vec<Option<T>>,
    kept: Vec<usize>,
    constant: T,
    sf: Option<StandardForm<T>>,
}

impl<T: Scalar> Presolved<T> {
    fn new(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars();
        let sign = |c: &T| if lp.sense == Sense::Maximize { c.neg() } else { c.clone() };
        let mut fixed: Vec<Option<T>> = vec![None; n];
        let mut constant = lp.objective_constant.clone();
        for j in 0..n {
            if let (Some(l), Some(u)) = (lp.lower(j), lp.upper(j)) {
                if l == u {
                    fixed[j] = Some(l.clone());
                }
            }
        }
        let mut used = vec![false; n];
        let mut rows: Vec<(Vec<(usize, T)>, Relation, T)> = Vec::new();
        let mut verdict = None;
        for row in lp.rows() {
            let mut rhs = row.rhs.clone();
            let mut coeffs = Vec::with_capacity(row.coeffs.len());
            for (j, a) in &row.coeffs {
                match &fixed[*j] {
                    Some(v) => rhs.sub_mul_assign(a, v),
                    None => coeffs.push((*j, a.clone())),
                }
            }
            if coeffs.is_empty() {
                let ok = match row.relation {
                    Relation::Le => !rhs.is_neg(1e-9),
                    Relation::Ge => !rhs.is_pos(1e-9),
                    Relation::Eq => !rhs.is_neg(1e-9) && !rhs.is_pos(1e-9),
                };
                if !ok {
                    verdict = Some(LpStatus::Infeasible);
                }
                continue;
            }
            for (j, _) in &coeffs {
                used[*j] = true;
            }
            rows.push((coeffs, row.relation, rhs));
        }
        for j in 0..n {
            if fixed[j].is_some() || used[j] {
                continue;
            }
            let c = sign(&lp.objective()[j]);
            let v = if c.is_pos(0.0) {
                lp.lower(j).cloned()
            } else if c.is_neg(0.0) {
                lp.upper(j).cloned()
            } else {
                Some(lp.lower(j).or(lp.upper(j)).cloned().unwrap_or_else(T::zero))
            };
            match v {
                Some(v) => fixed[j] = Some(v),
                None => {
                    if verdict.is_none() {
                        verdict = Some(LpStatus::Unbounded);
                    }
                    fixed[j] = Some(T::zero());
                }
            }
        }
        for j in 0..n {
            if let Some(v) = &fixed[j] {
                constant.add_mul_assign(&lp.objective()[j], v);
            }
        }
        let kept: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
        let mut index = vec![usize::MAX; n];
        for (k, &j) in kept.iter().enumerate() {
            index[j] = k;
        }
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); kept.len()];
        for (i, (coeffs, _, _)) in rows.iter().enumerate() {
            for (j, a) in coeffs {
                cols[index[*j]].push((i, a.clone()));
            }
        }
        let mut col_start = vec![0];
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        for col in cols {
            for (i, a) in col {
                row_idx.push(i);
                vals.push(a);
            }
            col_start.push(row_idx.len());
        }
        let mut lower: Vec<Option<T>> = kept.iter().map(|&j| lp.lower(j).cloned()).collect();
        let mut upper: Vec<Option<T>> = kept.iter().map(|&j| lp.upper(j).cloned()).collect();
        for (_, rel, rhs) in &rows {
            let (l, u) = match rel {
                Relation::Le => (None, Some(rhs.clone())),
                Relation::Ge => (Some(rhs.clone()), None),
                Relation::Eq => (Some(rhs.clone()), Some(rhs.clone())),
            };
            lower.push(l);
            upper.push(u);
        }
        let sf = StandardForm {
            m: rows.len(),
            n: kept.len(),
            col_start,
            row_idx,
            vals,
            cost: kept.iter().map(|&j| sign(&lp.objective()[j])).collect(),
            lower,
            upper,
        };
        Presolved {
            n_orig: n,
            sense: lp.sense,
            verdict,
            fixed,
            kept,
            constant,
            sf: if verdict.is_none() { Some(sf) } else { None },
        }
    }

    fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> Presolved<U> {
        Presolved {
            n_orig: self.n_orig,
            sense: self.sense,
            verdict: self.verdict,
            fixed: self.fixed.iter().map(|v| v.as_ref().map(f)).collect(),
            kept: self.kept.clone(),
            constant: f(&self.constant),
            sf: self.sf.as_ref().map(|sf| sf.map(f)),
        }
    }

    /// Full-length primal vector and objective value from the reduced solution.
    fn expand(&self, x: &[T]) -> (Vec<T>, T) {
        let mut full: Vec<T> = self.fixed.iter().map(|v| v.clone().unwrap_or_else(T::zero)).collect();
        let sf = self.sf.as_ref().unwrap();
        let mut value = T::zero();
        for (k, &j) in self.kept.iter().enumerate() {
            full[j] = x[k].clone();
            value.add_mul_assign(&sf.cost[k], &x[k]);
        }
        let value = if self.sense == Sense::Maximize { value.neg() } else { value };
        (full, value.add(&self.constant))
    }

    fn status(&self, result: &Option<simplex::SimplexResult<T>>) -> LpStatus {
        match (self.verdict, result) {
            (Some(v), _) => v,
            (None, Some(r)) => r.outcome.into(),
            (None, None) => unreachable!("presolve produced neither verdict nor program"),
        }
    }
}

impl Presolved<f64> {
    fn finish_float(&self, result: Option<simplex::SimplexResult<f64>>) -> LpSolution {
        let status = self.status(&result);
        let Some(r) = result.filter(|_| status == LpStatus::Optimal) else {
            let mut s = LpSolution::without_point(status, self.n_orig, "simplex");
            s.iterations = 0;
            return s;
        };
        let (primal, value) = self.expand(&r.x);
        LpSolution { status, value, primal, iterations: r.iterations, exact: None, backend: "simplex".into() }
    }
}

impl Presolved<BigRational> {
    fn finish_exact(&self, result: Option<simplex::SimplexResult<BigRational>>) -> LpSolution {
        let status = self.status(&result);
        let iterations = result.as_ref().map_or(0, |r| r.iterations);
        let Some(r) = result.filter(|_| status == LpStatus::Optimal) else {
            let mut s = LpSolution::without_point(status, self.n_orig, "simplex-exact");
            s.iterations = iterations;
            return s;
        };
        let (primal, value) = self.expand(&r.x);
        LpSolution {
            status,
            value: value.to_f64(),
            primal: primal.iter().map(|v| v.to_f64()).collect(),
            iterations,
            exact: Some(ExactSolution { value, primal }),
            backend: "simplex-exact".into(),
        }
    }
}

/// Final basis of a float solve, for callers that want to warm start.
pub fn solve_basis(lp: &LinearProgram<f64>) -> Option<Basis> {
    let pre = Presolved::new(lp);
    run_float(&pre, &SolverOptions::default().internal()).map(|r| r.basis)
}

/// Verdict of a value-equals-one check.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Float optimum within the tolerance of one.
    CertifiedOne,
    /// Optimum differs from one; carries the optimal value.
    BelowOne(f64),
    /// Rational optimum is exactly one.
    CertifiedExactOne,
}

impl Certificate {
    pub fn is_one(&self) -> bool {
        !matches!(self, Certificate::BelowOne(_))
    }
}

/// Decides whether the optimum of `lp` equals one.
pub fn check_value_is_one<T: Scalar>(lp: &LinearProgram<T>, tol: f64, mode: SolveMode) -> Result<Certificate, LpError> {
    let sol = solve(lp, mode)?;
    if !sol.is_optimal() {
        return Err(LpError::NotOptimal(sol.status));
    }
    Ok(match (&sol.exact, mode) {
        (Some(ex), SolveMode::Exact) => {
            if ex.value.is_one() {
                Certificate::CertifiedExactOne
            } else {
                Certificate::BelowOne(sol.value)
            }
        }
        _ => {
            if sol.value >= 1.0 - tol {
                Certificate::CertifiedOne
            } else {
                Certificate::BelowOne(sol.value)
            }
        }
    })
}
