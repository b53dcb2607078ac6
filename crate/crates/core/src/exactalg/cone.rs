use num_traits::{One, Signed, Zero};

use super::intmatrix::Q;
use crate::error::{Error, Result};

/// Decides whether `point` is a nonnegative (or, with `strict`, positive)
/// combination of `generators`.
pub fn cone_contains(generators: &[Vec<Q>], point: &[Q], strict: bool) -> Result<bool> {
    let d = point.len();
    if let Some(g) = generators.iter().find(|g| g.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "generator of length {} in ambient dimension {d}",
            g.len()
        )));
    }
    if generators.is_empty() {
        return Ok(point.iter().all(Zero::is_zero));
    }
    let n = generators.len();
    if !strict {
        let a: Vec<Vec<Q>> = (0..d).map(|i| generators.iter().map(|g| g[i].clone()).collect()).collect();
        return Ok(feasible(a, point.to_vec()));
    }
    // a = 1 + b, scale s = 1 + c:  G b - c p = p - G 1
    let mut a = Vec::with_capacity(d);
    let mut rhs = Vec::with_capacity(d);
    for i in 0..d {
        let mut row: Vec<Q> = generators.iter().map(|g| g[i].clone()).collect();
        let row_sum: Q = row.iter().sum();
        row.push(-point[i].clone());
        a.push(row);
        rhs.push(&point[i] - row_sum);
    }
    debug_assert!(a.iter().all(|r| r.len() == n + 1));
    Ok(feasible(a, rhs))
}

/// Is {x >= 0 : A x = b} nonempty? Phase-one simplex with Bland's rule.
pub fn feasible(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> bool {
    let rows = a.len();
    if rows == 0 {
        return true;
    }
    let n = a[0].len();
    for i in 0..rows {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for x in &mut a[i] {
                *x = -x.clone();
            }
        }
    }
    // tableau columns: n originals, rows artificials, then rhs
    let width = n + rows;
    let mut t: Vec<Vec<Q>> = (0..rows)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..rows).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + rows).collect();
    // reduced costs of minimizing the sum of artificials
    let mut cost: Vec<Q> = vec![Q::zero(); width + 1];
    for row in &t {
        for j in 0..=width {
            if j < n || j == width {
                cost[j] -= &row[j];
            }
        }
    }
    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // unbounded below cannot happen for a sum of nonnegative artificials
            break;
        };
        let piv = t[pr][enter].clone();
        for x in &mut t[pr] {
            *x = &*x / &piv;
        }
        let prow = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != pr && !row[enter].is_zero() {
                let f = row[enter].clone();
                for j in 0..=width {
                    row[j] -= &f * &prow[j];
                }
            }
        }
        let f = cost[enter].clone();
        for j in 0..=width {
            cost[j] -= &f * &prow[j];
        }
        basis[pr] = enter;
    }
    cost[width].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::intmatrix::q;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    #[test]
    fn one_dimensional() {
        assert!(cone_contains(&[v(&[1]), v(&[2])], &v(&[1]), true).unwrap());
        let conifold = [v(&[1]), v(&[1]), v(&[-1]), v(&[-1])];
        assert!(cone_contains(&conifold, &v(&[1]), true).unwrap());
        assert!(!cone_contains(&[v(&[1])], &v(&[-1]), false).unwrap());
        assert!(cone_contains(&[v(&[1])], &v(&[0]), false).unwrap());
        assert!(!cone_contains(&[v(&[1])], &v(&[0]), true).unwrap());
    }

    #[test]
    fn empty_cone_is_origin() {
        assert!(cone_contains(&[], &[], true).unwrap());
        assert!(cone_contains(&[], &v(&[0]), true).unwrap());
        assert!(!cone_contains(&[], &v(&[1]), true).unwrap());
    }

    #[test]
    fn boundary_versus_interior() {
        let gens = [v(&[1, 0]), v(&[0, 1])];
        assert!(cone_contains(&gens, &v(&[1, 0]), false).unwrap());
        assert!(!cone_contains(&gens, &v(&[1, 0]), true).unwrap());
        assert!(cone_contains(&gens, &v(&[2, 3]), true).unwrap());
        assert!(cone_contains(&[v(&[1, 0]), v(&[-1, 0])], &v(&[0, 0]), true).unwrap());
        assert!(!cone_contains(&[v(&[1, 0]), v(&[1, 1])], &v(&[0, 0]), true).unwrap());
    }

    #[test]
    fn mismatch_reported() {
        assert!(cone_contains(&[v(&[1, 0])], &v(&[1]), false).is_err());
    }
}
