//! Dense exact-arithmetic matrix helpers for the lattice modules.
//!
//! Everything here runs at desk scale (d <= 8), so plain Gaussian
//! elimination over `BigRational` is both exact and fast enough.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type RatMat = Vec<Vec<BigRational>>;
pub(crate) type IntMat = Vec<Vec<BigInt>>;

pub(crate) fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn identity(d: usize) -> RatMat {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub(crate) fn transpose(m: &RatMat) -> RatMat {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

#[cfg(test)]
pub(crate) fn mat_mul(a: &RatMat, b: &RatMat) -> RatMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = &out[i][j] + &a[i][t] * &b[t][j];
            }
        }
    }
    out
}

/// Exact determinant by fraction elimination with first-nonzero pivoting.
pub(crate) fn det(m: &RatMat) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = BigRational::one();
    let mut result = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            sign = -sign;
        }
        let pivot = a[col][col].clone();
        result = result * &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            for c in col..n {
                a[r][c] = &a[r][c] - &f * &a[col][c];
            }
        }
    }
    sign * result
}

/// Exact inverse via Gauss-Jordan; `None` when singular.
pub(crate) fn invert(m: &RatMat) -> Option<RatMat> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut inv = identity(n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let pivot = a[col][col].clone();
        for c in 0..n {
            a[col][c] = &a[col][c] / &pivot;
            inv[col][c] = &inv[col][c] / &pivot;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                a[r][c] = &a[r][c] - &f * &a[col][c];
                inv[r][c] = &inv[r][c] - &f * &inv[col][c];
            }
        }
    }
    Some(inv)
}

pub(crate) fn rat_floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

#[cfg(test)]
pub(crate) fn rat_ceil(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

/// Round to nearest integer, ties toward +infinity: floor(x + 1/2).
pub(crate) fn round_nearest(x: &BigRational) -> BigInt {
    rat_floor(&(x + BigRational::new(BigInt::one(), BigInt::from(2))))
}

pub(crate) fn int_transpose(m: &IntMat) -> IntMat {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

/// Row-style Hermite normal form. Rows of `mat` generate an integer lattice;
/// the result is the unique canonical basis: pivots positive, entries above
/// each pivot reduced into [0, pivot). Two generator sets span the same
/// lattice iff their HNFs are identical.
pub(crate) fn hnf_rows(mat: &IntMat) -> IntMat {
    let mut h = mat.to_vec();
    let rows = h.len();
    if rows == 0 {
        return h;
    }
    let cols = h[0].len();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // Euclidean elimination below the pivot.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows {
                if h[i][col].is_zero() {
                    continue;
                }
                if best.map_or(true, |b| h[i][col].abs() < h[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap(pivot_row, b);
            let p = h[pivot_row][col].clone();
            let mut nonzero_below = false;
            for i in pivot_row + 1..rows {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = &h[i][col] / &p; // truncating quotient keeps |remainder| < |p|
                for c in 0..cols {
                    let t = &h[pivot_row][c] * &q;
                    h[i][c] = &h[i][c] - t;
                }
                if !h[i][col].is_zero() {
                    nonzero_below = true;
                }
            }
            if !nonzero_below {
                break;
            }
        }
        if h[pivot_row][col].is_zero() {
            continue;
        }
        if h[pivot_row][col].is_negative() {
            for c in 0..cols {
                h[pivot_row][c] = -h[pivot_row][c].clone();
            }
        }
        let p = h[pivot_row][col].clone();
        for i in 0..pivot_row {
            // reduce entries above into [0, p)
            let q = num_integer::Integer::div_floor(&h[i][col], &p);
            if q.is_zero() {
                continue;
            }
            for c in 0..cols {
                let t = &h[pivot_row][c] * &q;
                h[i][c] = &h[i][c] - t;
            }
        }
        pivot_row += 1;
    }
    h
}
