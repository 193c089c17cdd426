//! Exact rational feasibility for `A x = b, x >= 0` by phase-one simplex with
//! Bland's rule.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

type Q = BigRational;

/// Returns a feasible point of `{x >= 0 : A x = b}`, or `None` when empty.
pub fn feasible_point(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    if m == 0 {
        return Some(vec![Q::zero(); n]);
    }

    // Columns: n originals, m artificials, then the right-hand side.
    let width = n + m + 1;
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(m);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        assert_eq!(row.len(), n, "ragged constraint matrix");
        let flip = rhs.is_negative();
        let mut t = vec![Q::zero(); width];
        for (j, v) in row.iter().enumerate() {
            t[j] = if flip { -v } else { v.clone() };
        }
        t[n + i] = Q::from_integer(1.into());
        t[width - 1] = if flip { -rhs } else { rhs.clone() };
        rows.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![Q::zero(); width];
    for row in &rows {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<Q> = None;
        for (i, row) in rows.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width - 1] / &row[enter];
            let better = match &best {
                None => true,
                Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive pivot candidate.
        let r = leave.expect("phase-one objective is bounded");
        pivot(&mut rows, &mut cost, r, enter);
        basis[r] = enter;
    }

    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = rows[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(rows: &mut [Vec<Q>], cost: &mut [Q], r: usize, c: usize) {
    let p = rows[r][c].clone();
    for v in rows[r].iter_mut() {
        *v /= &p;
    }
    let pivot_row = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            *v -= &f * pv;
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            *v -= &f * pv;
        }
    }
}
