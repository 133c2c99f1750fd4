//! Simplex results against brute-force vertex enumeration on small programs.

use nsmac_lp::{
    check_value_is_one, solve, solve_with, BigRational, SolverOptions, Certificate, LinearProgram, LpStatus, Relation, Sense, SolveMode,
};
use proptest::prelude::*;

/// Every feasible vertex of a box-bounded program, by solving all square
/// subsystems of active constraints.
fn vertex_optimum(lp: &LinearProgram<f64>) -> Option<f64> {
    let n = lp.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in lp.rows() {
        let mut a = vec![0.0; n];
        for (j, v) in &row.coeffs {
            a[*j] = *v;
        }
        planes.push((a, row.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if let Some(l) = lp.lower(j) {
            planes.push((e.clone(), *l));
        }
        if let Some(u) = lp.upper(j) {
            planes.push((e, *u));
        }
    }
    let mut best: Option<f64> = None;
    let k = planes.len();
    let mut pick = vec![0usize; n];
    fn rec(
        depth: usize,
        start: usize,
        k: usize,
        pick: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for i in start..k {
            pick[depth] = i;
            rec(depth + 1, i + 1, k, pick, visit);
        }
    }
    rec(0, 0, k, &mut pick, &mut |sel: &[usize]| {
        let mut m: Vec<Vec<f64>> = sel.iter().map(|&i| {
            let mut r = planes[i].0.clone();
            r.push(planes[i].1);
            r
        }).collect();
        // Gaussian elimination with partial pivoting.
        for c in 0..n {
            let p = (c..n).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap()).unwrap();
            if m[p][c].abs() < 1e-9 {
                return;
            }
            m.swap(c, p);
            for r in 0..n {
                if r != c {
                    let f = m[r][c] / m[c][c];
                    for cc in c..=n {
                        m[r][cc] -= f * m[c][cc];
                    }
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| m[i][n] / m[i][i]).collect();
        if lp.max_violation(&x) > 1e-7 {
            return;
        }
        let v = lp.evaluate(&x);
        best = Some(match best {
            None => v,
            Some(b) if lp.sense == Sense::Maximize => b.max(v),
            Some(b) => b.min(v),
        });
    });
    best
}

fn small_lp(
    sense: bool,
    obj: Vec<i32>,
    rows: Vec<(Vec<i32>, u8, i32)>,
    bounds: Vec<(i32, i32)>,
) -> LinearProgram<BigRational> {
    let q = |v: i32| BigRational::from_integer(v.into());
    let mut lp = LinearProgram::new(if sense { Sense::Maximize } else { Sense::Minimize });
    let n = obj.len();
    lp.add_vars(n);
    for (j, c) in obj.iter().enumerate() {
        lp.set_objective(j, q(*c));
        let (a, b) = bounds[j];
        lp.set_bounds(j, Some(q(a.min(b))), Some(q(a.max(b))));
    }
    for (coeffs, rel, rhs) in rows {
        let rel = match rel % 3 {
            0 => Relation::Le,
            1 => Relation::Ge,
            _ => Relation::Eq,
        };
        lp.add_row(coeffs.iter().enumerate().map(|(j, v)| (j, q(*v))).collect(), rel, q(rhs));
    }
    lp
}

fn lp_strategy() -> impl Strategy<Value = LinearProgram<BigRational>> {
    (1usize..=3, 0usize..=4).prop_flat_map(|(n, m)| {
        (
            any::<bool>(),
            prop::collection::vec(-5i32..=5, n),
            prop::collection::vec((prop::collection::vec(-4i32..=4, n), 0u8..3, -6i32..=8), m),
            prop::collection::vec((-3i32..=3, -3i32..=4), n),
        )
            .prop_map(|(s, o, r, b)| small_lp(s, o, r, b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn float_and_exact_match_vertex_enumeration(lp in lp_strategy()) {
        let flp = lp.to_f64();
        let oracle = vertex_optimum(&flp);
        let float = solve(&flp, SolveMode::Float).unwrap();
        let exact = solve(&lp, SolveMode::Exact).unwrap();
        match oracle {
            None => {
                prop_assert_eq!(float.status, LpStatus::Infeasible);
                prop_assert_eq!(exact.status, LpStatus::Infeasible);
            }
            Some(v) => {
                prop_assert_eq!(float.status, LpStatus::Optimal);
                prop_assert!((float.value - v).abs() < 1e-7, "float {} oracle {}", float.value, v);
                prop_assert!(flp.max_violation(&float.primal) < 1e-7);
                prop_assert_eq!(exact.status, LpStatus::Optimal);
                let ex = exact.exact.unwrap();
                prop_assert_eq!(lp.max_violation(&ex.primal), 0.0);
                prop_assert_eq!(lp.evaluate(&ex.primal), ex.value.clone());
                prop_assert!((nsmac_lp::rational_to_f64(&ex.value) - v).abs() < 1e-7);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn blands_rule_and_frequent_refactoring_agree(lp in lp_strategy()) {
        let flp = lp.to_f64();
        let oracle = vertex_optimum(&flp);
        for (stall, refactor) in [(0usize, 1usize), (0, 3), (2, 2)] {
            let opts = SolverOptions { stall_limit: Some(stall), refactor_interval: refactor, ..SolverOptions::default().internal() };
            let s = solve_with(&flp, &opts).unwrap();
            match oracle {
                None => prop_assert_eq!(s.status, LpStatus::Infeasible),
                Some(v) => prop_assert!((s.value - v).abs() < 1e-7),
            }
        }
    }
}

#[test]
fn detects_unbounded() {
    let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
    lp.add_vars(2);
    lp.set_objective(0, 1.0);
    lp.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
    assert_eq!(solve(&lp, SolveMode::Float).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn free_variables_and_equalities() {
    // min x + y, x - y = 3, x free, y in [-1, 2] -> x = 2, y = -1
    let mut lp = LinearProgram::<f64>::new(Sense::Minimize);
    let x = lp.add_var(None, None);
    let y = lp.add_var(Some(-1.0), Some(2.0));
    lp.set_objective(x, 1.0);
    lp.set_objective(y, 1.0);
    lp.add_row(vec![(x, 1.0), (y, -1.0)], Relation::Eq, 3.0);
    let s = solve(&lp, SolveMode::Float).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.value - 1.0).abs() < 1e-12);
    assert!((s.primal[0] - 2.0).abs() < 1e-12 && (s.primal[1] + 1.0).abs() < 1e-12);
}

#[test]
fn constant_objective_certifies_exactly() {
    let mut lp = LinearProgram::<BigRational>::new(Sense::Maximize);
    lp.add_vars(1);
    lp.objective_constant = BigRational::from_integer(1.into());
    assert_eq!(check_value_is_one(&lp, 1e-7, SolveMode::Exact).unwrap(), Certificate::CertifiedExactOne);
    assert_eq!(check_value_is_one(&lp, 1e-7, SolveMode::Float).unwrap(), Certificate::CertifiedOne);
}

#[test]
fn exact_mode_rejects_float_programs() {
    let lp = LinearProgram::<f64>::new(Sense::Maximize);
    assert!(solve(&lp, SolveMode::Exact).is_err());
}

#[test]
fn below_one_reports_value() {
    // max x, 4x <= 3
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let mut lp = LinearProgram::<BigRational>::new(Sense::Maximize);
    lp.add_vars(1);
    lp.set_objective(0, q(1, 1));
    lp.add_row(vec![(0, q(4, 1))], Relation::Le, q(3, 1));
    match check_value_is_one(&lp, 1e-7, SolveMode::Exact).unwrap() {
        Certificate::BelowOne(v) => assert_eq!(v, 0.75),
        other => panic!("unexpected {:?}", other),
    }
}
