//! Exact integer linear algebra for gluing matrices.
//!
//! Smith normal form with its unimodular transforms, fraction-free
//! determinants, and linear solves over the integers. Gluing data is at
//! most a handful of rows, so the textbook algorithms are the right tool
//! and everything stays exact.

use rug::{Complete, Integer};

/// Dense integer matrix, row major. Rows must all have the same length.
pub type IMat = Vec<Vec<Integer>>;

pub fn mat_from_i64(rows: &[Vec<i64>]) -> IMat {
    rows.iter()
        .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
        .collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Integer::from(u32::from(i == j)))
                .collect()
        })
        .collect()
}

pub fn transpose(m: &IMat) -> IMat {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let inner = a.first().map_or(0, Vec::len);
    assert_eq!(inner, b.len(), "dimension mismatch");
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|ra| {
            (0..cols)
                .map(|j| {
                    let mut s = Integer::new();
                    for (x, rb) in ra.iter().zip(b.iter()) {
                        s += (x * &rb[j]).complete();
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(m: &IMat, x: &[Integer]) -> Vec<Integer> {
    m.iter()
        .map(|r| {
            assert_eq!(r.len(), x.len(), "dimension mismatch");
            let mut s = Integer::new();
            for (a, b) in r.iter().zip(x.iter()) {
                s += (a * b).complete();
            }
            s
        })
        .collect()
}

/// Decomposition u * m * v = d with u, v unimodular and d diagonal,
/// each diagonal entry dividing the next.
pub struct SmithForm {
    pub d: IMat,
    pub u: IMat,
    pub v: IMat,
}

/// Quotient rounded to nearest, so the remainder is at most half the divisor.
fn rounded_quot(a: &Integer, b: &Integer) -> Integer {
    a.clone().div_rem_round(b.clone()).0
}

/// row_i -= q * row_t
fn row_sub(m: &mut IMat, i: usize, t: usize, q: &Integer) {
    let rt = m[t].clone();
    for (x, y) in m[i].iter_mut().zip(rt.iter()) {
        *x -= (y * q).complete();
    }
}

/// row_t += row_i
fn row_add(m: &mut IMat, t: usize, i: usize) {
    let ri = m[i].clone();
    for (x, y) in m[t].iter_mut().zip(ri.iter()) {
        *x += y;
    }
}

/// col_j -= q * col_t
fn col_sub(m: &mut IMat, j: usize, t: usize, q: &Integer) {
    for r in m.iter_mut() {
        let s = (&r[t] * q).complete();
        r[j] -= s;
    }
}

fn swap_cols(m: &mut IMat, a: usize, b: usize) {
    for r in m.iter_mut() {
        r.swap(a, b);
    }
}

/// Smallest nonzero entry (by absolute value) of the trailing block
/// starting at (t, t), or None when the block is zero.
fn min_abs_entry(d: &IMat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in d.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if x.cmp_abs(&d[bi][bj]) == std::cmp::Ordering::Less {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

pub fn smith_form(m: &IMat) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut d: IMat = m
        .iter()
        .map(|r| {
            assert_eq!(r.len(), cols, "ragged matrix");
            r.clone()
        })
        .collect();
    let mut u = identity(rows);
    let mut v = identity(cols);
    for t in 0..rows.min(cols) {
        'pivot: loop {
            let Some((pi, pj)) = min_abs_entry(&d, t) else {
                break 'pivot;
            };
            if pi != t {
                d.swap(t, pi);
                u.swap(t, pi);
            }
            if pj != t {
                swap_cols(&mut d, t, pj);
                swap_cols(&mut v, t, pj);
            }
            // Rounded division keeps remainders at most half the pivot, so
            // repeated passes shrink the pivot until everything clears.
            let mut dirty = false;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = rounded_quot(&d[i][t], &d[t][t]);
                row_sub(&mut d, i, t, &q);
                row_sub(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = rounded_quot(&d[t][j], &d[t][t]);
                col_sub(&mut d, j, t, &q);
                col_sub(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // The pivot must divide the trailing block for the chain
            // d_1 | d_2 | ... to hold; folding an offending row in and
            // re-reducing repairs it.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !d[i][j].is_divisible(&d[t][t]) {
                        row_add(&mut d, t, i);
                        row_add(&mut u, t, i);
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
        if d[t][t] < 0 {
            for x in d[t].iter_mut() {
                *x *= -1;
            }
            for x in u[t].iter_mut() {
                *x *= -1;
            }
        }
    }
    SmithForm { d, u, v }
}

/// Nonzero diagonal of the Smith form, in divisibility order.
pub fn invariant_factors(m: &IMat) -> Vec<Integer> {
    let s = smith_form(m);
    let k = m.len().min(m.first().map_or(0, Vec::len));
    (0..k)
        .map(|t| s.d[t][t].clone())
        .filter(|x| !x.is_zero())
        .collect()
}

/// Fraction-free (Bareiss) determinant of a square matrix.
pub fn det(m: &IMat) -> Integer {
    let n = m.len();
    for r in m {
        assert_eq!(r.len(), n, "determinant of a non-square matrix");
    }
    if n == 0 {
        return Integer::from(1);
    }
    let mut a = m.to_vec();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        let rowk = a[k].clone();
        for i in k + 1..n {
            let aik = std::mem::replace(&mut a[i][k], Integer::new());
            for j in k + 1..n {
                let num = (&a[i][j] * &rowk[k]).complete() - (&aik * &rowk[j]).complete();
                // Exact by the Sylvester identity.
                a[i][j] = num / &prev;
            }
        }
        prev = rowk[k].clone();
    }
    let last = a[n - 1][n - 1].clone();
    if sign < 0 { -last } else { last }
}

/// Integer solution of m * x = rhs, or None when no integral solution
/// exists. Underdetermined systems return one particular solution.
pub fn solve_exact(m: &IMat, rhs: &[Integer]) -> Option<Vec<Integer>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    assert_eq!(rhs.len(), rows, "dimension mismatch");
    let s = smith_form(m);
    let ur = mat_vec(&s.u, rhs);
    let mut y = vec![Integer::new(); cols];
    for (i, r) in ur.iter().enumerate() {
        let di = if i < cols { s.d[i][i].clone() } else { Integer::new() };
        if di.is_zero() {
            if !r.is_zero() {
                return None;
            }
        } else {
            if !r.is_divisible(&di) {
                return None;
            }
            y[i] = (r / &di).complete();
        }
    }
    Some(mat_vec(&s.v, &y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_unimodular(m: &IMat) -> bool {
        let d = det(m);
        d == 1 || d == -1
    }

    #[test]
    fn smith_form_of_small_matrix() {
        let m = mat_from_i64(&[vec![2, 4], vec![6, 8]]);
        let s = smith_form(&m);
        assert_eq!(s.d[0][0], 2);
        assert_eq!(s.d[1][1], 4);
        assert_eq!(s.d[0][1], 0);
        assert_eq!(s.d[1][0], 0);
        assert!(is_unimodular(&s.u));
        assert!(is_unimodular(&s.v));
        assert_eq!(mat_mul(&mat_mul(&s.u, &m), &s.v), s.d);
    }

    #[test]
    fn smith_form_of_rectangular_matrix() {
        let m = mat_from_i64(&[vec![1, 2, 3], vec![4, 5, 6]]);
        let s = smith_form(&m);
        assert_eq!(mat_mul(&mat_mul(&s.u, &m), &s.v), s.d);
        assert!(is_unimodular(&s.u));
        assert!(is_unimodular(&s.v));
        // gcd of entries is 1; gcd of the 2x2 minors is 3.
        assert_eq!(invariant_factors(&m), vec![Integer::from(1), Integer::from(3)]);
    }

    #[test]
    fn invariant_factors_form_divisibility_chain() {
        let cases = [
            vec![vec![6, 4, 2], vec![4, 8, 6], vec![2, 6, 12]],
            vec![vec![-1, 3], vec![3, -1]],
            vec![vec![12, 0, 0], vec![0, 18, 0], vec![0, 0, 30]],
        ];
        for rows in cases {
            let m = mat_from_i64(&rows);
            let f = invariant_factors(&m);
            for w in f.windows(2) {
                assert!(w[1].is_divisible(&w[0]), "{f:?} not a chain");
            }
            let s = smith_form(&m);
            assert_eq!(mat_mul(&mat_mul(&s.u, &m), &s.v), s.d);
        }
    }

    #[test]
    fn determinant_of_known_matrices() {
        assert_eq!(det(&identity(4)), 1);
        assert_eq!(det(&mat_from_i64(&[vec![1, 2], vec![3, 4]])), -2);
        assert_eq!(det(&mat_from_i64(&[vec![0, 1], vec![1, 0]])), -1);
        assert_eq!(det(&mat_from_i64(&[vec![1, 2], vec![2, 4]])), 0);
        assert_eq!(det(&mat_from_i64(&[vec![-1, 3], vec![3, -1]])), -8);
        let m = mat_from_i64(&[
            vec![2, 0, 1, 3],
            vec![1, -1, 4, 0],
            vec![0, 2, 2, 1],
            vec![3, 1, 0, -2],
        ]);
        // Checked against exact elimination over the rationals.
        assert_eq!(det(&m), 136);
    }

    #[test]
    fn determinant_magnitude_matches_invariant_factors() {
        let m = mat_from_i64(&[vec![2, 4], vec![6, 8]]);
        let f = invariant_factors(&m);
        let prod: Integer = f.iter().product::<Integer>();
        assert_eq!(det(&m).abs(), prod);
    }

    #[test]
    fn exact_solve_round_trips() {
        let m = mat_from_i64(&[vec![2, 0], vec![0, 3]]);
        let rhs = [Integer::from(4), Integer::from(9)];
        let x = solve_exact(&m, &rhs).unwrap();
        assert_eq!(x, vec![Integer::from(2), Integer::from(3)]);
        let bad = [Integer::from(1), Integer::from(0)];
        assert!(solve_exact(&m, &bad).is_none());
    }

    #[test]
    fn exact_solve_underdetermined_and_inconsistent() {
        let m = mat_from_i64(&[vec![1, 2, 3]]);
        let rhs = [Integer::from(5)];
        let x = solve_exact(&m, &rhs).unwrap();
        assert_eq!(mat_vec(&m, &x), rhs.to_vec());

        let m2 = mat_from_i64(&[vec![1], vec![1]]);
        let rhs2 = [Integer::from(1), Integer::from(2)];
        assert!(solve_exact(&m2, &rhs2).is_none());
    }
}
