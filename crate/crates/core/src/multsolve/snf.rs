//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
    /// The nonzero invariant factors, in order.
    pub factors: Vec<BigInt>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free elimination (Bareiss).
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row_i -= q·row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let (src, dst) = if i < j {
                let (lo, hi) = m.split_at_mut(j);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[j], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d -= q * s;
                }
            }
        }
    }

    /// col_i -= q·col_j
    fn col_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            if !row[j].is_zero() {
                let t = q * &row[j];
                row[i] -= t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in m[i].iter_mut() {
                *x = -&*x;
            }
        }
    }
}

/// Computes the Smith normal form, pivoting on entries of least absolute
/// value to limit coefficient growth.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut w = Work { a: a.clone(), u: identity(rows), v: identity(cols) };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest(&w.a, t, t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.row_sub(i, t, &q);
                    dirty |= !w.a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.col_sub(j, t, &q);
                    dirty |= !w.a[t][j].is_zero();
                }
            }
            if dirty {
                // a smaller remainder appeared in row or column t
                let (pi, pj) = smallest_in_cross(&w.a, t);
                w.swap_rows(t, pi);
                w.swap_cols(t, pj);
                continue;
            }
            let pivot = w.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    // row_t += row_i brings a non-multiple into row t
                    w.row_sub(t, i, &BigInt::from(-1));
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let factors = (0..t).map(|k| w.a[k][k].clone()).collect();
    Snf { u: w.u, v: w.v, d: w.a, factors }
}

fn smallest(a: &IntMatrix, r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in a.iter().enumerate().skip(r0) {
        for (j, x) in row.iter().enumerate().skip(c0) {
            if !x.is_zero() {
                let m = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| m < *b) {
                    let one = m.is_one();
                    best = Some((i, j, m));
                    if one {
                        return best.map(|(i, j, _)| (i, j));
                    }
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn smallest_in_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t, a[t][t].abs());
    for (i, row) in a.iter().enumerate().skip(t + 1) {
        if !row[t].is_zero() && row[t].abs() < best.2 {
            best = (i, t, row[t].abs());
        }
    }
    for j in t + 1..a[t].len() {
        if !a[t][j].is_zero() && a[t][j].abs() < best.2 {
            best = (t, j, a[t][j].abs());
        }
    }
    (best.0, best.1)
}

/// An integer solution `x` of `A·x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let cols = a.first().map_or(0, Vec::len);
    if a.is_empty() {
        return Some(vec![BigInt::zero(); cols]);
    }
    let s = smith_normal_form(a);
    let ub: Vec<BigInt> = s
        .u
        .iter()
        .map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum())
        .collect();
    let mut y = vec![BigInt::zero(); cols];
    for (k, c) in ub.iter().enumerate() {
        if k < s.rank() {
            if !c.is_multiple_of(&s.factors[k]) {
                return None;
            }
            y[k] = c / &s.factors[k];
        } else if !c.is_zero() {
            return None;
        }
    }
    Some(s.v.iter().map(|row| row.iter().zip(&y).map(|(x, y)| x * y).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(s: &Snf) -> Vec<i64> {
        s.factors.iter().map(|f| f.try_into().unwrap()).collect()
    }

    pub(crate) fn check(a: &IntMatrix, s: &Snf) {
        assert_eq!(mat_mul(&mat_mul(&s.u, a), &s.v), s.d);
        assert!(determinant(&s.u).abs().is_one());
        assert!(determinant(&s.v).abs().is_one());
        for (i, row) in s.d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j || i >= s.rank() {
                    assert!(x.is_zero());
                }
            }
        }
        for w in s.factors.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.factors.iter().all(|f| f.is_positive()));
    }

    #[test]
    fn examples() {
        let id = identity(3);
        let s = smith_normal_form(&id);
        check(&id, &s);
        assert_eq!(diag(&s), vec![1, 1, 1]);

        let a = from_i64(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(diag(&s), vec![1, 6]);

        // rank one with coprime entries
        let a = from_i64(&[vec![4, 6], vec![6, 9]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(diag(&s), vec![1]);

        let a = from_i64(&[vec![2, 4], vec![4, 8]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(diag(&s), vec![2]);
    }

    #[test]
    fn integer_solutions() {
        let a = from_i64(&[vec![2, 4], vec![0, 3]]);
        let x = solve_integer(&a, &[BigInt::from(2), BigInt::from(3)]).unwrap();
        assert_eq!(x, vec![BigInt::from(-1), BigInt::from(1)]);
        assert!(solve_integer(&a, &[BigInt::from(1), BigInt::zero()]).is_none());
    }

    fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-20i64..21, c), r)
                .prop_map(|m| from_i64(&m))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn postconditions(a in arb_matrix()) {
            let s = smith_normal_form(&a);
            check(&a, &s);
        }
    }
}
