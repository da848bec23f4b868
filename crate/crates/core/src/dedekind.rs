//! Ideal-counting experiments for quadratic number fields.
//!
//! For a fundamental discriminant D the number of ideals of norm n is
//! a(n) = sum over divisors m of n of chi_D(m), with chi_D the Kronecker
//! symbol (D/.). The summatory function counts ideals of norm up to X; its
//! main term is L(1, chi_D) X and the error is compared against the
//! envelope |D|^{1/3} X^{1/3} ln X across whole families of discriminants.

use crate::error::{Error, Result};
use crate::landau::{FunctionalEquationShape, GammaFactor};

/// A quadratic field presented by its fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticField {
    pub disc: i64,
    /// Number of real embeddings (2 or 0).
    pub r1: u32,
    /// Number of complex embedding pairs (0 or 1).
    pub r2: u32,
    pub roots_of_unity: u32,
}

impl QuadraticField {
    pub fn new(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::Domain(format!(
                "{} is not a fundamental discriminant",
                disc
            )));
        }
        let (r1, r2) = if disc > 0 { (2, 0) } else { (0, 1) };
        let roots_of_unity = match disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        Ok(QuadraticField {
            disc,
            r1,
            r2,
            roots_of_unity,
        })
    }

    /// Conductor |D| of the character.
    pub fn modulus(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    /// chi_D(n), extended by periodicity to all integers.
    pub fn chi(&self, n: i64) -> i32 {
        kronecker_any(self.disc, n)
    }

    /// Functional equation shape of the ideal-count series: each real
    /// embedding contributes Gamma(s/2), each complex pair Gamma(s); the
    /// pole sits at s = 1.
    pub fn shape(&self) -> Result<FunctionalEquationShape> {
        let mut factors = Vec::new();
        for _ in 0..self.r1 {
            factors.push(GammaFactor::real(0.5, 0.0));
        }
        for _ in 0..self.r2 {
            factors.push(GammaFactor::real(1.0, 0.0));
        }
        FunctionalEquationShape::new(1.0, factors)
    }
}

fn is_squarefree(n: i64) -> bool {
    let m = n.unsigned_abs();
    if m == 0 {
        return false;
    }
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// True for discriminants of maximal orders: squarefree D = 1 mod 4, or
/// D = 4m with m squarefree and m = 2 or 3 mod 4. 0 and 1 are excluded.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Kronecker symbol (a/n) for arbitrary integers.
pub(crate) fn kronecker_any(a: i64, n: i64) -> i32 {
    let mut a = a;
    let mut n = n;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    // Pull the powers of two out of n; (a/2) depends on a mod 8.
    let mut v = 0u32;
    while n % 2 == 0 {
        v += 1;
        n /= 2;
    }
    let mut k = if v % 2 == 0 {
        1i32
    } else {
        match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0, // a even with an odd power of two in n
        }
    };
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    // Jacobi loop on odd positive n.
    loop {
        if n == 1 {
            return k;
        }
        a = a.rem_euclid(n);
        if a == 0 {
            return 0;
        }
        let mut v2 = 0u32;
        while a % 2 == 0 {
            v2 += 1;
            a /= 2;
        }
        if v2 % 2 == 1 {
            let m = n % 8;
            if m == 3 || m == 5 {
                k = -k;
            }
        }
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        std::mem::swap(&mut a, &mut n);
    }
}

/// Kronecker symbol (d/n) for a fundamental discriminant d.
pub fn kronecker(d: i64, n: i64) -> Result<i32> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::Domain(format!(
            "{} is not a fundamental discriminant",
            d
        )));
    }
    Ok(kronecker_any(d, n))
}

/// One period of chi_D: index r in 0..|D| holds chi_D(r).
pub fn chi_table(field: &QuadraticField) -> Vec<i32> {
    let q = field.modulus() as usize;
    (0..q).map(|r| field.chi(r as i64)).collect()
}

/// Ideal-count coefficients a(1), ..., a(n_max) via a divisor sieve; index
/// 0 is unused. a(n) = sum_{m | n} chi_D(m), always nonnegative.
pub fn ideal_coeffs(field: &QuadraticField, n_max: usize) -> Vec<i64> {
    let chi = chi_table(field);
    let q = chi.len();
    let mut a = vec![0i64; n_max + 1];
    for m in 1..=n_max {
        let c = chi[m % q] as i64;
        if c == 0 {
            continue;
        }
        let mut t = m;
        while t <= n_max {
            a[t] += c;
            t += m;
        }
    }
    a
}

/// Exact number of ideals of norm at most x:
/// sum_{m <= x} chi_D(m) floor(x/m), evaluated in O(sqrt x) blocks where
/// floor(x/m) is constant. Character sums over full periods vanish, so the
/// partial character sum only needs one period of prefix sums.
pub fn ideal_count(field: &QuadraticField, x: u64) -> i128 {
    let chi = chi_table(field);
    let q = chi.len() as u64;
    // prefix[r] = chi(1) + ... + chi(r) for r in 0..q; a full period sums
    // to zero for a nonprincipal character.
    let mut prefix = vec![0i64; q as usize];
    for r in 1..q as usize {
        prefix[r] = prefix[r - 1] + chi[r] as i64;
    }
    debug_assert_eq!(prefix[q as usize - 1] + chi[0] as i64, 0);
    let s = |t: u64| -> i64 { prefix[(t % q) as usize] };
    let mut total: i128 = 0;
    let mut m = 1u64;
    while m <= x {
        let v = x / m;
        let hi = x / v;
        total += v as i128 * (s(hi) - s(m - 1)) as i128;
        m = hi + 1;
    }
    total
}

/// Envelope |D|^{1/3} x^{1/3} ln x for the ideal-count error, shared by the
/// whole family of fundamental discriminants. Meaningful for x > 1.
pub fn ideal_count_envelope(field: &QuadraticField, x: f64) -> f64 {
    (field.modulus() as f64).powf(1.0 / 3.0) * x.powf(1.0 / 3.0) * x.ln()
}

/// L(1, chi_D) with rigorous absolute error at most `tol`.
///
/// The series is summed over K full periods; the tail over blocks of length
/// q is sum_{k >= K} [-m1/(kq)^2 + O(1/k^3)] with m1 = sum_r chi(r) r, and
/// sum_{k >= K} k^{-2} = 1/(K - 1/2) + O((K-1)^{-3}), so correcting by
/// -m1/(q^2 (K - 1/2)) leaves an error below 1/(K-1)^2 <= tol/2.
pub fn l_one(field: &QuadraticField, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || tol < 1e-12 {
        return Err(Error::Domain(
            "tolerance must lie in [1e-12, infinity)".into(),
        ));
    }
    let chi = chi_table(field);
    let q = chi.len() as u64;
    let k_blocks = (2.0 / tol).sqrt().ceil() as u64 + 2;
    let n_max = k_blocks * q;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_max {
        let c = chi[(n % q) as usize];
        if c == 0 {
            continue;
        }
        let v = c as f64 / n as f64;
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    let head = sum + comp;
    let m1: i64 = chi
        .iter()
        .enumerate()
        .map(|(r, &c)| c as i64 * r as i64)
        .sum();
    let tail = -(m1 as f64) / (q as f64 * q as f64) / (k_blocks as f64 - 0.5);
    Ok(head + tail)
}

/// Sum of the order-fold divisor function up to z, with its ratio to the
/// leading scale z (ln z)^{order-1}. Supported orders: 2, 3, 4.
pub fn divisor_sum_check(order: usize, z: u64) -> Result<(u64, f64)> {
    if !(2..=4).contains(&order) {
        return Err(Error::Unsupported(format!(
            "divisor order {} not supported (expected 2..4)",
            order
        )));
    }
    if z < 2 {
        return Err(Error::Domain("divisor sums need z >= 2".into()));
    }
    let n = z as usize;
    let mut cur = vec![1u64; n + 1];
    cur[0] = 0;
    for _ in 1..order {
        let mut next = vec![0u64; n + 1];
        for m in 1..=n {
            let mut t = m;
            while t <= n {
                next[t] += cur[t / m];
                t += m;
            }
        }
        cur = next;
    }
    let sum: u64 = cur[1..].iter().sum();
    let scale = z as f64 * (z as f64).ln().powi(order as i32 - 1);
    Ok((sum, sum as f64 / scale))
}

/// One (discriminant, X) cell of a family experiment. `ratio` is
/// |error| / envelope, absent where the envelope exceeds the main term and
/// the comparison would be vacuous.
#[derive(Clone, Debug)]
pub struct DedekindRow {
    pub disc: i64,
    pub x: u64,
    pub count: i128,
    pub main: f64,
    pub error: f64,
    pub envelope: f64,
    pub ratio: Option<f64>,
}

/// Runs the ideal-count experiment for every fundamental discriminant in
/// [disc_lo, disc_hi] at each x in `xs` (ascending, >= 2). `tol` is passed
/// to the L-value computation.
pub fn dedekind_experiment(
    disc_lo: i64,
    disc_hi: i64,
    xs: &[u64],
    tol: f64,
) -> Result<Vec<DedekindRow>> {
    if disc_lo > disc_hi {
        return Err(Error::Domain("empty discriminant range".into()));
    }
    if xs.is_empty() {
        return Err(Error::InsufficientData(
            "experiment needs at least one x".into(),
        ));
    }
    for w in xs.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Domain("x grid must be strictly increasing".into()));
        }
    }
    if xs[0] < 2 {
        return Err(Error::Domain("x grid must start at 2 or later".into()));
    }
    let mut rows = Vec::new();
    for disc in disc_lo..=disc_hi {
        if !is_fundamental_discriminant(disc) {
            continue;
        }
        let field = QuadraticField::new(disc)?;
        let l_val = l_one(&field, tol)?;
        for &x in xs {
            let count = ideal_count(&field, x);
            let main = l_val * x as f64;
            let error = count as f64 - main;
            let envelope = ideal_count_envelope(&field, x as f64);
            let ratio = if envelope <= main {
                Some(error.abs() / envelope)
            } else {
                None
            };
            rows.push(DedekindRow {
                disc,
                x,
                count,
                main,
                error,
                envelope,
                ratio,
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData(
            "no fundamental discriminants in range".into(),
        ));
    }
    Ok(rows)
}
