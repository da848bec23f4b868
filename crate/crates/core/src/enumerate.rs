//! Exact sphere point counts and norm spectra.
//!
//! Counting uses Fincke-Pohst style enumeration over the quadratic
//! completion of the scaled integer Gram matrix. All interval endpoints are
//! solved as integer quadratic inequalities, so strict/inclusive boundary
//! decisions are exact no matter how close a squared norm sits to the
//! threshold. At the innermost coordinate, counting takes the cardinality of
//! the admissible integer interval instead of walking it, which keeps the
//! cost proportional to the number of enumeration nodes rather than points.

use crate::error::{Error, Result};
use crate::landau::CoefficientSeries;
use crate::lattice::{lll_default_delta, lll_reduce, Lattice, LatticeProfile};
use crate::matq::RatMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Base of the dimension-dependent constant c_d = 6^d used in the
/// volumetric point bounds. The value 6 covers the worst case of the
/// standard packing argument with a comfortable margin and is fixed so that
/// empirical constants stay comparable across runs.
pub const POINT_BOUND_BASE: f64 = 6.0;

/// Boundary handling for ball counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// |v| < R, origin included.
    Strict,
    /// |v| <= R, origin included.
    Inclusive,
}

/// Quadratic completion Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2
/// of a positive-definite rational Gram matrix.
struct QuadForm {
    dim: usize,
    q: RatMat,
}

impl QuadForm {
    fn new(gram: RatMat) -> Result<Self> {
        let dim = gram.len();
        let mut q = gram;
        for i in 0..dim {
            if !q[i][i].is_positive() {
                return Err(Error::InvalidLattice(
                    "Gram matrix is not positive definite".into(),
                ));
            }
            for j in i + 1..dim {
                // The lower triangle keeps the pre-division value; the
                // rank-one update below needs it, not the original Gram
                // entry.
                q[j][i] = q[i][j].clone();
                q[i][j] = &q[i][j] / &q[i][i];
            }
            for k in i + 1..dim {
                for l in k..dim {
                    let t = &q[k][i] * &q[i][l];
                    q[k][l] = &q[k][l] - t;
                }
            }
        }
        Ok(QuadForm { dim, q })
    }

    /// Offset sum_{j>level} q[level][j] * x_j for fixed higher coordinates.
    fn shift(&self, level: usize, xs: &[BigInt]) -> BigRational {
        let mut s = BigRational::zero();
        for j in level + 1..self.dim {
            if xs[j].is_zero() {
                continue;
            }
            s = s + &self.q[level][j] * BigRational::from_integer(xs[j].clone());
        }
        s
    }
}

/// Integer range {x : qii * (x + shift)^2 REL rem}, REL being < (strict) or
/// <= (inclusive). Endpoints are found from the cleared-denominator integer
/// quadratic via an integer square root plus bounded local adjustment, so
/// the result is exact.
fn integer_range(
    qii: &BigRational,
    shift: &BigRational,
    rem: &BigRational,
    strict: bool,
) -> Option<(BigInt, BigInt)> {
    let (a, b) = (qii.numer(), qii.denom());
    let (c, e) = (shift.numer(), shift.denom());
    let (p, t) = (rem.numer(), rem.denom());
    // a*t*(e*x + c)^2 REL p*b*e^2, all integers, leading coefficient > 0.
    let at = a * t;
    let a2 = &at * e * e;
    let b2 = BigInt::from(2) * &at * e * c;
    let c2 = &at * c * c - p * b * e * e;
    let pred = |x: &BigInt| -> bool {
        let v = &a2 * x * x + &b2 * x + &c2;
        if strict {
            v.is_negative()
        } else {
            !v.is_positive()
        }
    };
    let disc = &b2 * &b2 - BigInt::from(4) * &a2 * &c2;
    if disc.is_negative() {
        return None;
    }
    let s = disc.sqrt();
    let two_a = BigInt::from(2) * &a2;
    let hi0 = (-&b2 + &s).div_floor(&two_a);
    let lo0 = (-&b2 - &s).div_ceil(&two_a);
    // Candidates are within 1 of the true roots; fix up locally.
    let mut hi = &hi0 + BigInt::one();
    let stop = &lo0 - BigInt::from(2);
    while hi > stop && !pred(&hi) {
        hi -= 1;
    }
    let mut lo = &lo0 - BigInt::one();
    while lo <= hi && !pred(&lo) {
        lo += 1;
    }
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

/// Values of [lo, hi] ordered by increasing absolute value, positive before
/// negative. This is the canonical traversal order at every enumeration
/// level.
fn zigzag(lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    let mut vals = Vec::new();
    let mut v = lo.clone();
    while v <= *hi {
        vals.push(v.clone());
        v += 1;
    }
    vals.sort_by(|a, b| (a.abs(), a.is_negative()).cmp(&(b.abs(), b.is_negative())));
    vals
}

fn count_interval(lo: &BigInt, hi: &BigInt) -> u128 {
    let width = hi - lo + BigInt::one();
    width.to_u128().expect("interval count fits in u128")
}

fn count_rec(
    form: &QuadForm,
    level: usize,
    rem: &BigRational,
    strict: bool,
    xs: &mut Vec<BigInt>,
) -> u128 {
    let s = form.shift(level, xs);
    let Some((lo, hi)) = integer_range(&form.q[level][level], &s, rem, strict) else {
        return 0;
    };
    if level == 0 {
        return count_interval(&lo, &hi);
    }
    let mut total = 0u128;
    for x in zigzag(&lo, &hi) {
        let off = BigRational::from_integer(x.clone()) + &s;
        let used = &form.q[level][level] * &off * &off;
        let rem2 = rem - used;
        xs[level] = x;
        total += count_rec(form, level - 1, &rem2, strict, xs);
    }
    xs[level] = BigInt::zero();
    total
}

fn visit_rec(
    form: &QuadForm,
    level: usize,
    used: &BigRational,
    budget: &BigRational,
    xs: &mut Vec<BigInt>,
    f: &mut dyn FnMut(BigRational, &[BigInt]),
) {
    let rem = budget - used;
    let s = form.shift(level, xs);
    let Some((lo, hi)) = integer_range(&form.q[level][level], &s, &rem, false) else {
        return;
    };
    for x in zigzag(&lo, &hi) {
        let off = BigRational::from_integer(x.clone()) + &s;
        let contrib = &form.q[level][level] * &off * &off;
        let used2 = used + &contrib;
        xs[level] = x;
        if level == 0 {
            f(used2, xs);
        } else {
            visit_rec(form, level - 1, &used2, budget, xs, f);
        }
    }
    xs[level] = BigInt::zero();
}

/// Enumeration context for one lattice: quadratic completion of the scaled
/// integer Gram matrix plus the scaling needed to map norms back.
struct Enumerator {
    form: QuadForm,
    scale_sq: BigRational,
}

impl Enumerator {
    /// `reduce` controls whether the basis is LLL-reduced first. Counting
    /// APIs reduce (the point set is unchanged and skew bases would explode
    /// the tree); coefficient-reporting callers pass an already-reduced
    /// lattice.
    fn build(lat: &Lattice, reduce: bool) -> Result<(Enumerator, Lattice)> {
        let work = if reduce {
            lll_reduce(lat, &lll_default_delta())?
        } else {
            lat.clone()
        };
        let m = work.scaled_integer_basis();
        let d = work.dim();
        let mut gram = vec![vec![BigRational::zero(); d]; d];
        for i in 0..d {
            for j in i..d {
                let mut acc = BigInt::zero();
                for k in 0..d {
                    acc += &m[k][i] * &m[k][j];
                }
                let v = BigRational::from_integer(acc);
                gram[i][j] = v.clone();
                gram[j][i] = v;
            }
        }
        let s = BigRational::from_integer(work.scale_denominator().clone());
        let scale_sq = &s * &s;
        Ok((
            Enumerator {
                form: QuadForm::new(gram)?,
                scale_sq,
            },
            work,
        ))
    }

    fn scaled_budget(&self, norm_sq_bound: &BigRational) -> BigRational {
        norm_sq_bound * &self.scale_sq
    }
}

/// Number of lattice points v with |v|^2 REL `norm_sq_bound`, the relation
/// being < for `Strict` and <= for `Inclusive`. The origin counts.
pub fn count_points_norm_sq(
    lat: &Lattice,
    norm_sq_bound: &BigRational,
    mode: CountMode,
) -> Result<u128> {
    count_points_norm_sq_threaded(lat, norm_sq_bound, mode, 1)
}

/// As `count_points_norm_sq`, with the top-level coordinate range split
/// across `threads` workers. The merged count is independent of the
/// partition.
pub fn count_points_norm_sq_threaded(
    lat: &Lattice,
    norm_sq_bound: &BigRational,
    mode: CountMode,
    threads: usize,
) -> Result<u128> {
    if !norm_sq_bound.is_positive() {
        return Err(Error::Domain("squared-norm bound must be positive".into()));
    }
    let strict = mode == CountMode::Strict;
    let (enumerator, _) = Enumerator::build(lat, true)?;
    let budget = enumerator.scaled_budget(norm_sq_bound);
    let d = enumerator.form.dim;
    let top = d - 1;
    if threads <= 1 || d == 1 {
        let mut xs = vec![BigInt::zero(); d];
        return Ok(count_rec(&enumerator.form, top, &budget, strict, &mut xs));
    }
    let Some((lo, hi)) = integer_range(
        &enumerator.form.q[top][top],
        &BigRational::zero(),
        &budget,
        strict,
    ) else {
        return Ok(0);
    };
    let width = count_interval(&lo, &hi);
    let chunks = threads
        .min(usize::try_from(width).unwrap_or(threads))
        .max(1);
    let mut bounds = Vec::with_capacity(chunks + 1);
    for i in 0..=chunks {
        // lo + round(i * width / chunks)
        let off = BigInt::from(width) * BigInt::from(i) / BigInt::from(chunks);
        bounds.push(&lo + off);
    }
    let form = &enumerator.form;
    let budget_ref = &budget;
    let totals: Vec<u128> = std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(chunks);
        for w in 0..chunks {
            let from = bounds[w].clone();
            let to = bounds[w + 1].clone();
            handles.push(scope.spawn(move || {
                let mut total = 0u128;
                let mut xs = vec![BigInt::zero(); form.dim];
                let mut x = from;
                while x < to {
                    let xr = BigRational::from_integer(x.clone());
                    let used = &form.q[form.dim - 1][form.dim - 1] * &xr * &xr;
                    let rem = budget_ref - used;
                    xs[form.dim - 1] = x.clone();
                    total += count_rec(form, form.dim - 2, &rem, strict, &mut xs);
                    x += 1;
                }
                total
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("worker"))
            .collect()
    });
    Ok(totals.into_iter().sum())
}

/// Number of lattice points in the ball of radius R: |v| < R (`Strict`,
/// origin included) or |v| <= R (`Inclusive`). R must be positive.
pub fn count_points(lat: &Lattice, radius: &BigRational, mode: CountMode) -> Result<u128> {
    count_points_threaded(lat, radius, mode, 1)
}

pub fn count_points_threaded(
    lat: &Lattice,
    radius: &BigRational,
    mode: CountMode,
    threads: usize,
) -> Result<u128> {
    if !radius.is_positive() {
        return Err(Error::Domain("radius must be positive".into()));
    }
    count_points_norm_sq_threaded(lat, &(radius * radius), mode, threads)
}

/// Multiset of squared norms of nonzero lattice vectors up to a cutoff.
/// Entries are (lambda, count) with lambda strictly increasing; every count
/// is even because v and -v share a norm.
#[derive(Clone, Debug)]
pub struct NormSpectrum {
    pub entries: Vec<(BigRational, u64)>,
    pub cutoff: BigRational,
}

impl NormSpectrum {
    pub fn total_count(&self) -> u128 {
        self.entries.iter().map(|(_, c)| *c as u128).sum()
    }

    /// Count of nonzero vectors with |v|^2 < x (strict) or <= x.
    pub fn prefix_count(&self, x: &BigRational, strict: bool) -> u128 {
        self.entries
            .iter()
            .filter(|(l, _)| if strict { l < x } else { l <= x })
            .map(|(_, c)| *c as u128)
            .sum()
    }

    /// Multiplicity of an exact squared norm, 0 when absent.
    pub fn multiplicity(&self, x: &BigRational) -> u64 {
        self.entries
            .iter()
            .find(|(l, _)| l == x)
            .map(|(_, c)| *c)
            .unwrap_or(0)
    }

    /// Floating-point coefficient series (support = squared norms,
    /// coefficients = multiplicities) for the envelope machinery.
    pub fn to_series(&self) -> Result<CoefficientSeries<f64>> {
        let support: Vec<f64> = self
            .entries
            .iter()
            .map(|(l, _)| l.to_f64().expect("finite"))
            .collect();
        let coeffs: Vec<f64> = self.entries.iter().map(|(_, c)| *c as f64).collect();
        CoefficientSeries::new(support, coeffs)
    }
}

/// Exact norm spectrum of nonzero vectors with |v|^2 <= cutoff.
pub fn norm_spectrum(lat: &Lattice, cutoff: &BigRational) -> Result<NormSpectrum> {
    if !cutoff.is_positive() {
        return Err(Error::Domain("spectrum cutoff must be positive".into()));
    }
    let (enumerator, _) = Enumerator::build(lat, true)?;
    let budget = enumerator.scaled_budget(cutoff);
    let d = enumerator.form.dim;
    let mut hist: BTreeMap<BigRational, u64> = BTreeMap::new();
    let mut xs = vec![BigInt::zero(); d];
    visit_rec(
        &enumerator.form,
        d - 1,
        &BigRational::zero(),
        &budget,
        &mut xs,
        &mut |norm_scaled, _| {
            if norm_scaled.is_zero() {
                return;
            }
            let lambda = norm_scaled / &enumerator.scale_sq;
            *hist.entry(lambda).or_insert(0) += 1;
        },
    );
    Ok(NormSpectrum {
        entries: hist.into_iter().collect(),
        cutoff: cutoff.clone(),
    })
}

/// Nonzero vectors with |v|^2 <= bound as (squared norm, coefficient vector)
/// pairs, coefficients taken in the basis of `lat` as given (no internal
/// reduction). Used by the successive-minima search.
pub(crate) fn collect_up_to(
    lat: &Lattice,
    bound: &BigRational,
) -> Result<Vec<(BigRational, Vec<BigInt>)>> {
    if !bound.is_positive() {
        return Err(Error::Domain("enumeration bound must be positive".into()));
    }
    let (enumerator, _) = Enumerator::build(lat, false)?;
    let budget = enumerator.scaled_budget(bound);
    let d = enumerator.form.dim;
    let mut out = Vec::new();
    let mut xs = vec![BigInt::zero(); d];
    visit_rec(
        &enumerator.form,
        d - 1,
        &BigRational::zero(),
        &budget,
        &mut xs,
        &mut |norm_scaled, coeffs| {
            if norm_scaled.is_zero() {
                return;
            }
            out.push((norm_scaled / &enumerator.scale_sq, coeffs.to_vec()));
        },
    );
    Ok(out)
}

/// Volumetric upper bound c_d * (1 + max_k X^k / (lambda_1 ... lambda_k))
/// for the number of lattice points with |v| <= X, with c_d = 6^d. The
/// bound dominates the exact inclusive count for every X > 0.
pub fn widmer_point_bound(profile: &LatticeProfile, x: f64) -> f64 {
    let d = profile.dim();
    let cd = POINT_BOUND_BASE.powi(d as i32);
    let mut best = 0.0f64;
    let mut denom = 1.0f64;
    for k in 1..=d {
        denom *= profile.lambda[k - 1];
        best = best.max(x.powi(k as i32) / denom);
    }
    cd * (1.0 + best)
}
