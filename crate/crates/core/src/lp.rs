//! Exact dense-tableau simplex method over the rationals.
//!
//! Solves `maximize cᵀx subject to Ax ≤ b, x ≥ 0` with `b ≥ 0`, so the
//! origin is a feasible starting vertex and no phase one is needed. Bland's
//! rule (lowest index enters, lowest basic index leaves on ties) guarantees
//! termination.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Unbounded,
    /// Some right-hand side is negative.
    InfeasibleStart,
    Shape,
}

pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape);
    }
    if b.iter().any(Signed::is_negative) {
        return Err(LpError::InfeasibleStart);
    }
    let width = n + m;
    // rows 0..m: constraints [A | I | b]; objective row: [-c | 0 | 0]
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    for (i, row) in a.iter().enumerate() {
        let mut r = Vec::with_capacity(width + 1);
        r.extend(row.iter().cloned());
        r.extend((0..m).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }));
        r.push(b[i].clone());
        t.push(r);
    }
    let mut obj: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    obj.extend(std::iter::repeat_with(Rational::zero).take(m + 1));
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;
    loop {
        let Some(enter) = (0..width).find(|j| t[m][*j].is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (row, _) = leave.ok_or(LpError::Unbounded)?;
        pivot(&mut t, row, enter);
        basis[row] = enter;
        pivots += 1;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &v) in basis.iter().enumerate() {
        if v < n {
            x[v] = t[i][width].clone();
        }
    }
    Ok(LpSolution { value: t[m][width].clone(), x, pivots })
}

fn pivot(t: &mut [Vec<Rational>], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let factor = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &factor * pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let c = vec![int(3), int(5)];
        let a = vec![vec![int(1), int(0)], vec![int(0), int(2)], vec![int(3), int(2)]];
        let b = vec![int(4), int(12), int(18)];
        let s = maximize(&c, &a, &b).unwrap();
        assert_eq!(s.value, int(36));
        assert_eq!(s.x, vec![int(2), int(6)]);
    }

    #[test]
    fn fractional_optimum() {
        // max x + y, 2x + y ≤ 1, x + 3y ≤ 1 → 3/5 at (2/5, 1/5)
        let s = maximize(
            &[int(1), int(1)],
            &[vec![int(2), int(1)], vec![int(1), int(3)]],
            &[int(1), int(1)],
        )
        .unwrap();
        assert_eq!(s.value, ratio(3, 5));
        assert_eq!(s.x, vec![ratio(2, 5), ratio(1, 5)]);
    }

    #[test]
    fn unbounded_and_bad_input() {
        assert_eq!(maximize(&[int(1)], &[vec![int(-1)]], &[int(1)]).unwrap_err(), LpError::Unbounded);
        assert_eq!(maximize(&[int(1)], &[vec![int(1)]], &[int(-1)]).unwrap_err(), LpError::InfeasibleStart);
        assert_eq!(maximize(&[int(1)], &[vec![int(1), int(2)]], &[int(1)]).unwrap_err(), LpError::Shape);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // a classic cycling example for the largest-coefficient rule
        let c = vec![ratio(3, 4), int(-150), ratio(1, 50), int(-6)];
        let a = vec![
            vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)],
            vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)],
            vec![int(0), int(0), int(1), int(0)],
        ];
        let b = vec![int(0), int(0), int(1)];
        let s = maximize(&c, &a, &b).unwrap();
        assert_eq!(s.value, ratio(1, 20));
    }
}
