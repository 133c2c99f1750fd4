//! Free-format MPS reading and writing.
//!
//! Coefficients are written with `Display`, which is shortest round-trip for
//! doubles and `p/q` for rationals, so a rational program reads back bit for
//! bit. Variables are named `x<j>` and rows `r<i>`.

use crate::error::LpError;
use crate::problem::{LinearProgram, Relation, Sense};
use crate::scalar::{parse_rational, Scalar};
use num_rational::BigRational;
use std::collections::HashMap;
use std::fmt::Write as _;

pub fn write_mps<T: Scalar>(lp: &LinearProgram<T>) -> String {
    let mut out = String::new();
    let n = lp.num_vars();
    let _ = writeln!(out, "NAME {}", lp.name.replace(char::is_whitespace, "_"));
    out.push_str("OBJSENSE\n");
    out.push_str(if lp.sense == Sense::Maximize { "    MAX\n" } else { "    MIN\n" });
    out.push_str("ROWS\n N  obj\n");
    for (i, row) in lp.rows().iter().enumerate() {
        let tag = match row.relation {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        let _ = writeln!(out, " {}  r{}", tag, i);
    }
    let mut cols: Vec<Vec<(usize, &T)>> = vec![Vec::new(); n];
    for (i, row) in lp.rows().iter().enumerate() {
        for (j, a) in &row.coeffs {
            cols[*j].push((i, a));
        }
    }
    out.push_str("COLUMNS\n");
    for (j, col) in cols.iter().enumerate() {
        let c = &lp.objective()[j];
        if !c.eq_zero() || col.is_empty() {
            let _ = writeln!(out, "    x{}  obj  {}", j, c);
        }
        for (i, a) in col {
            let _ = writeln!(out, "    x{}  r{}  {}", j, i, a);
        }
    }
    out.push_str("RHS\n");
    if !lp.objective_constant.eq_zero() {
        let _ = writeln!(out, "    rhs  obj  {}", lp.objective_constant.neg());
    }
    for (i, row) in lp.rows().iter().enumerate() {
        if !row.rhs.eq_zero() {
            let _ = writeln!(out, "    rhs  r{}  {}", i, row.rhs);
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..n {
        match (lp.lower(j), lp.upper(j)) {
            (None, None) => {
                let _ = writeln!(out, " FR bnd  x{}", j);
            }
            (Some(l), Some(u)) if l == u => {
                let _ = writeln!(out, " FX bnd  x{}  {}", j, l);
            }
            (l, u) => {
                match l {
                    None => {
                        let _ = writeln!(out, " MI bnd  x{}", j);
                    }
                    Some(l) if !l.eq_zero() => {
                        let _ = writeln!(out, " LO bnd  x{}  {}", j, l);
                    }
                    _ => {}
                }
                if let Some(u) = u {
                    let _ = writeln!(out, " UP bnd  x{}  {}", j, u);
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// Reads free MPS into an exact program; decimals are converted exactly.
pub fn read_mps(text: &str) -> Result<LinearProgram<BigRational>, LpError> {
    let err = |line: usize, msg: &str| LpError::Parse { line: line + 1, msg: msg.to_string() };
    let num = |line: usize, s: &str| parse_rational(s).ok_or_else(|| err(line, "bad number"));
    let mut lp = LinearProgram::<BigRational>::new(Sense::Minimize);
    let mut section = "";
    let mut obj_name = String::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut relations: Vec<Relation> = Vec::new();
    let mut row_coeffs: Vec<Vec<(usize, BigRational)>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut bounds: Vec<(usize, String, Option<BigRational>)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.trim().is_empty() || line.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !raw.starts_with(' ') {
            section = match toks[0] {
                "NAME" => {
                    lp.name = toks.get(1).unwrap_or(&"lp").to_string();
                    "NAME"
                }
                "OBJSENSE" => {
                    if let Some(s) = toks.get(1) {
                        lp.sense = if *s == "MAX" { Sense::Maximize } else { Sense::Minimize };
                    }
                    "OBJSENSE"
                }
                "ROWS" => "ROWS",
                "COLUMNS" => "COLUMNS",
                "RHS" => "RHS",
                "BOUNDS" => "BOUNDS",
                "RANGES" => return Err(err(ln, "RANGES not supported")),
                "ENDATA" => break,
                _ => return Err(err(ln, "unknown section")),
            };
            continue;
        }
        match section {
            "OBJSENSE" => {
                lp.sense = if toks[0] == "MAX" { Sense::Maximize } else { Sense::Minimize };
            }
            "ROWS" => {
                if toks.len() != 2 {
                    return Err(err(ln, "expected row type and name"));
                }
                match toks[0] {
                    "N" => obj_name = toks[1].to_string(),
                    t => {
                        let rel = match t {
                            "L" => Relation::Le,
                            "G" => Relation::Ge,
                            "E" => Relation::Eq,
                            _ => return Err(err(ln, "unknown row type")),
                        };
                        row_index.insert(toks[1].to_string(), relations.len());
                        relations.push(rel);
                        row_coeffs.push(Vec::new());
                        rhs.push(BigRational::from_integer(0.into()));
                    }
                }
            }
            "COLUMNS" => {
                if toks.len() < 3 || toks.len() % 2 == 0 {
                    return Err(err(ln, "expected column name and (row, value) pairs"));
                }
                let j = match col_index.get(toks[0]) {
                    Some(&j) => j,
                    None => {
                        let j = lp.add_vars(1);
                        col_index.insert(toks[0].to_string(), j);
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = num(ln, pair[1])?;
                    if pair[0] == obj_name {
                        lp.set_objective(j, v);
                    } else {
                        let i = *row_index.get(pair[0]).ok_or_else(|| err(ln, "unknown row"))?;
                        row_coeffs[i].push((j, v));
                    }
                }
            }
            "RHS" => {
                if toks.len() < 3 || toks.len() % 2 == 0 {
                    return Err(err(ln, "expected set name and (row, value) pairs"));
                }
                for pair in toks[1..].chunks(2) {
                    let v = num(ln, pair[1])?;
                    if pair[0] == obj_name {
                        lp.objective_constant = -v;
                    } else {
                        let i = *row_index.get(pair[0]).ok_or_else(|| err(ln, "unknown row"))?;
                        rhs[i] = v;
                    }
                }
            }
            "BOUNDS" => {
                if toks.len() < 3 {
                    return Err(err(ln, "short bound line"));
                }
                let j = *col_index.get(toks[2]).ok_or_else(|| err(ln, "unknown column"))?;
                let v = match toks.get(3) {
                    Some(s) => Some(num(ln, s)?),
                    None => None,
                };
                bounds.push((j, toks[0].to_string(), v));
            }
            _ => return Err(err(ln, "data outside a section")),
        }
    }
    for (j, kind, v) in bounds {
        let (l, u) = (lp.lower(j).cloned(), lp.upper(j).cloned());
        let (l, u) = match kind.as_str() {
            "FR" => (None, None),
            "MI" => (None, u),
            "PL" => (l, None),
            "FX" => (v.clone(), v),
            "LO" => (v, u),
            "UP" => (l, v),
            _ => return Err(LpError::Parse { line: 0, msg: format!("unknown bound type {}", kind) }),
        };
        lp.set_bounds(j, l, u);
    }
    for ((coeffs, rel), b) in row_coeffs.into_iter().zip(relations).zip(rhs) {
        lp.add_row(coeffs, rel, b);
    }
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_program_round_trips() {
        let mut lp = LinearProgram::<BigRational>::new(Sense::Maximize).with_name("demo");
        let x = lp.add_vars(3);
        lp.set_objective(x, q(1, 3));
        lp.set_objective(x + 2, q(-7, 2));
        lp.objective_constant = q(5, 9);
        lp.set_bounds(x + 1, None, Some(q(4, 1)));
        lp.set_bounds(x + 2, Some(q(1, 7)), Some(q(1, 7)));
        lp.add_row(vec![(0, q(2, 3)), (1, q(1, 1))], Relation::Le, q(10, 3));
        lp.add_row(vec![(1, q(1, 1)), (2, q(-1, 5))], Relation::Eq, q(0, 1));
        lp.add_row(vec![(0, q(1, 1))], Relation::Ge, q(-1, 2));
        let text = write_mps(&lp);
        let back = read_mps(&text).unwrap();
        assert_eq!(back, lp);
    }

    #[test]
    fn float_coefficients_keep_every_bit() {
        let mut lp = LinearProgram::<f64>::new(Sense::Minimize);
        lp.add_vars(2);
        let vals = [0.1f64, 1.0 / 3.0, 2.0f64.sqrt(), 1e-17];
        lp.set_objective(0, vals[0]);
        lp.add_row(vec![(0, vals[1]), (1, vals[2])], Relation::Le, vals[3]);
        let back = read_mps(&write_mps(&lp)).unwrap().to_f64();
        assert_eq!(back.objective()[0].to_bits(), vals[0].to_bits());
        assert_eq!(back.rows()[0].coeffs[0].1.to_bits(), vals[1].to_bits());
        assert_eq!(back.rows()[0].coeffs[1].1.to_bits(), vals[2].to_bits());
        assert_eq!(back.rows()[0].rhs.to_bits(), vals[3].to_bits());
    }
}
