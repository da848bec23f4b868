//! Uniform error envelopes for partial sums of Dirichlet series with a
//! functional equation.
//!
//! The central object is a coefficient series A(X) = sum_{lambda <= X}
//! a(lambda) together with its Riesz means A^k and the finite difference
//! operator D_y^k. For nonnegative coefficients the sandwich
//! y^k A(X) <= D_y^k A^k(X) <= y^k A(X + k y) converts smoothed estimates
//! into sharp-cutoff ones, and the resulting two-term envelope is
//! parametrized by a smoothing exponent eta that trades the slack term
//! against the dual-sum term.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Largest smoothing order the Riesz machinery accepts. k! must stay inside
/// u64 and practical orders are tiny.
pub const MAX_SMOOTHING_ORDER: usize = 20;

/// Scalar type for coefficient series. Implemented for f64 (floating
/// experiments) and BigRational (exact sandwich checks).
pub trait SeriesValue:
    Clone
    + PartialOrd
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + Zero
    + One
{
    fn from_u64(n: u64) -> Self;
    fn abs_val(&self) -> Self;
    fn is_negative_val(&self) -> bool;
    /// Sum of an iterator. The f64 implementation compensates rounding.
    fn sum_values(values: impl Iterator<Item = Self>) -> Self {
        values.fold(Self::zero(), |a, b| a + b)
    }
}

impl SeriesValue for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_negative_val(&self) -> bool {
        *self < 0.0
    }
    fn sum_values(values: impl Iterator<Item = Self>) -> Self {
        // Neumaier compensated summation.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for v in values {
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }
}

impl SeriesValue for BigRational {
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_negative_val(&self) -> bool {
        self.is_negative()
    }
}

fn pow_usize<T: SeriesValue>(base: &T, k: usize) -> T {
    let mut acc = T::one();
    for _ in 0..k {
        acc = acc * base.clone();
    }
    acc
}

fn factorial_u64(k: usize) -> u64 {
    (1..=k as u64).product::<u64>().max(1)
}

/// Row k of Pascal's triangle.
fn binomials(k: usize) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..k {
        let mut next = vec![1u64];
        for w in row.windows(2) {
            next.push(w[0] + w[1]);
        }
        next.push(1);
        row = next;
    }
    row
}

/// One polar term of the completed series: the residue of phi(s) X^s / s at
/// s = xi is X^xi * P(ln X) with P given by `poly` (poly[j] multiplies
/// (ln X)^j). A simple pole of phi at xi != 0 with residue rho therefore
/// carries poly = [rho / xi], and a finite value phi(0) enters as the
/// datum (0, [phi(0)]).
#[derive(Clone, Debug)]
pub struct PolarDatum {
    pub xi: Complex64,
    pub poly: Vec<f64>,
}

impl PolarDatum {
    pub fn simple(xi: f64, coefficient: f64) -> Self {
        PolarDatum {
            xi: Complex64::new(xi, 0.0),
            poly: vec![coefficient],
        }
    }
}

/// One gamma factor Gamma(alpha s + beta) of the functional equation.
#[derive(Clone, Debug)]
pub struct GammaFactor {
    pub alpha: f64,
    pub beta: Complex64,
}

impl GammaFactor {
    pub fn new(alpha: f64, beta: Complex64) -> Self {
        GammaFactor { alpha, beta }
    }
    pub fn real(alpha: f64, beta: f64) -> Self {
        GammaFactor {
            alpha,
            beta: Complex64::new(beta, 0.0),
        }
    }
}

/// Analytic shape of the functional equation: abscissa delta of the
/// rightmost pole and the gamma factors, whose alpha-sum A fixes the
/// smoothing scales y = X^{1 - 1/(2A) - eta} and z = X^{2 A eta}.
#[derive(Clone, Debug)]
pub struct FunctionalEquationShape {
    pub delta: f64,
    pub factors: Vec<GammaFactor>,
    a_total: f64,
}

impl FunctionalEquationShape {
    pub fn new(delta: f64, factors: Vec<GammaFactor>) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::Domain("pole abscissa delta must be positive".into()));
        }
        if factors.is_empty() {
            return Err(Error::Domain(
                "at least one gamma factor is required".into(),
            ));
        }
        for f in &factors {
            if !(f.alpha > 0.0) {
                return Err(Error::Domain("gamma factor alpha must be positive".into()));
            }
        }
        let a_total = factors.iter().map(|f| f.alpha).sum();
        if a_total < 0.5 {
            return Err(Error::Domain(
                "total gamma weight A must be at least 1/2".into(),
            ));
        }
        Ok(FunctionalEquationShape {
            delta,
            factors,
            a_total,
        })
    }

    /// A = sum of the alpha.
    pub fn a_total(&self) -> f64 {
        self.a_total
    }

    /// Degree 2A of the functional equation.
    pub fn degree(&self) -> f64 {
        2.0 * self.a_total
    }
}

/// Power-law bound c Z^r + c' Z^{r'} for the absolute coefficient sum of
/// the dual series up to Z.
#[derive(Clone, Debug)]
pub struct DualBoundSpec {
    pub c_psi: f64,
    pub c_psi_prime: f64,
    pub r: f64,
    pub r_prime: f64,
}

impl DualBoundSpec {
    pub fn new(
        c_psi: f64,
        c_psi_prime: f64,
        r: f64,
        r_prime: f64,
        shape: &FunctionalEquationShape,
    ) -> Result<Self> {
        if c_psi < 0.0 || c_psi_prime < 0.0 {
            return Err(Error::Domain(
                "dual bound constants must be nonnegative".into(),
            ));
        }
        if r < r_prime || r_prime < 0.0 {
            return Err(Error::Domain(
                "dual bound exponents must satisfy r >= r' >= 0".into(),
            ));
        }
        let floor = shape.delta / 2.0 + 1.0 / (4.0 * shape.a_total());
        if !(r > floor) {
            return Err(Error::HypothesisViolation(format!(
                "dual growth exponent r = {} must exceed delta/2 + 1/(4A) = {}",
                r, floor
            )));
        }
        Ok(DualBoundSpec {
            c_psi,
            c_psi_prime,
            r,
            r_prime,
        })
    }

    pub fn bound(&self, z: f64) -> f64 {
        self.c_psi * z.powf(self.r) + self.c_psi_prime * z.powf(self.r_prime)
    }
}

/// Finitely supported coefficient series: support points (positive,
/// strictly increasing) with their coefficients.
#[derive(Clone, Debug)]
pub struct CoefficientSeries<T: SeriesValue = f64> {
    support: Vec<T>,
    coeffs: Vec<T>,
    prefix: Vec<T>,
    nonnegative: bool,
    polar: Vec<PolarDatum>,
}

impl<T: SeriesValue> CoefficientSeries<T> {
    pub fn new(support: Vec<T>, coeffs: Vec<T>) -> Result<Self> {
        if support.len() != coeffs.len() {
            return Err(Error::Domain(
                "support and coefficient lists differ in length".into(),
            ));
        }
        for (i, l) in support.iter().enumerate() {
            if !(l > &T::zero()) {
                return Err(Error::Domain("support points must be positive".into()));
            }
            if i > 0 && !(l > &support[i - 1]) {
                return Err(Error::Domain(
                    "support points must be strictly increasing".into(),
                ));
            }
        }
        let nonnegative = !coeffs.iter().any(|c| c.is_negative_val());
        let mut prefix = Vec::with_capacity(coeffs.len());
        let mut acc = T::zero();
        for c in &coeffs {
            acc = acc + c.clone();
            prefix.push(acc.clone());
        }
        Ok(CoefficientSeries {
            support,
            coeffs,
            prefix,
            nonnegative,
            polar: Vec::new(),
        })
    }

    pub fn with_polar_data(mut self, polar: Vec<PolarDatum>) -> Self {
        self.polar = polar;
        self
    }

    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn polar_data(&self) -> &[PolarDatum] {
        &self.polar
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// A(x) = sum_{lambda <= x} a(lambda).
    pub fn partial_sum(&self, x: &T) -> T {
        let idx = self.support.partition_point(|l| l <= x);
        if idx == 0 {
            T::zero()
        } else {
            self.prefix[idx - 1].clone()
        }
    }

    /// Riesz mean A^k(x) = (1/k!) sum_{lambda <= x} a(lambda) (x - lambda)^k.
    /// k = 0 reduces to the sharp partial sum with no division performed.
    pub fn riesz_mean(&self, x: &T, k: usize) -> Result<T> {
        if k == 0 {
            return Ok(self.partial_sum(x));
        }
        if k > MAX_SMOOTHING_ORDER {
            return Err(Error::Domain(format!(
                "smoothing order {} exceeds supported maximum {}",
                k, MAX_SMOOTHING_ORDER
            )));
        }
        let idx = self.support.partition_point(|l| l <= x);
        let total = T::sum_values((0..idx).map(|i| {
            let gap = x.clone() - self.support[i].clone();
            self.coeffs[i].clone() * pow_usize(&gap, k)
        }));
        Ok(total / T::from_u64(factorial_u64(k)))
    }

    /// Sum of |a(lambda)| over lo <= lambda <= hi (both ends inclusive).
    pub fn window_abs_sum(&self, lo: &T, hi: &T) -> T {
        let start = self.support.partition_point(|l| l < lo);
        let end = self.support.partition_point(|l| l <= hi);
        T::sum_values((start..end).map(|i| self.coeffs[i].abs_val()))
    }

    /// D_y^k A^k(x), the k-fold forward difference of the k-th Riesz mean
    /// with step y.
    pub fn riesz_difference(&self, x: &T, y: &T, k: usize) -> Result<T> {
        finite_difference(|t| self.riesz_mean(t, k), x, y, k)
    }
}

impl CoefficientSeries<f64> {
    /// Sharp main term S(x) = sum over polar data of Re(x^xi) P(ln x).
    pub fn polar_sum(&self, x: f64) -> f64 {
        let lx = x.ln();
        self.polar
            .iter()
            .map(|d| {
                let p: f64 = d
                    .poly
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * lx.powi(j as i32))
                    .sum();
                (d.xi * lx).exp().re * p
            })
            .sum()
    }

    /// Crude majorant sum over polar data of x^{Re xi} sum_j |c_j| |ln x|^j.
    pub fn abs_polar_sum(&self, x: f64) -> f64 {
        let lx = x.ln().abs();
        self.polar
            .iter()
            .map(|d| {
                let p: f64 = d
                    .poly
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c.abs() * lx.powi(j as i32))
                    .sum();
                x.powf(d.xi.re) * p
            })
            .sum()
    }

    /// Smoothed main term S^k(x): each simple real polar datum (xi, [v])
    /// contributes v x^{xi + k} / ((xi+1) ... (xi+k)), and a datum at
    /// xi = 0 contributes v x^k / k!. Complex or higher-order polar terms
    /// are not supported.
    pub fn polar_sum_riesz(&self, x: f64, k: usize) -> Result<f64> {
        if k > MAX_SMOOTHING_ORDER {
            return Err(Error::Domain(format!(
                "smoothing order {} exceeds supported maximum {}",
                k, MAX_SMOOTHING_ORDER
            )));
        }
        let mut total = 0.0f64;
        for d in &self.polar {
            if d.xi.im != 0.0 || d.poly.len() > 1 {
                return Err(Error::Unsupported(
                    "smoothed main term requires simple real polar data".into(),
                ));
            }
            let v = *d.poly.first().unwrap_or(&0.0);
            let xi = d.xi.re;
            if xi == 0.0 {
                total += v * x.powi(k as i32) / factorial_u64(k) as f64;
                continue;
            }
            let mut denom = 1.0f64;
            for j in 1..=k {
                let f = xi + j as f64;
                if f.abs() < 1e-12 {
                    return Err(Error::Unsupported(
                        "polar abscissa collides with a smoothing shift".into(),
                    ));
                }
                denom *= f;
            }
            total += v * x.powf(xi + k as f64) / denom;
        }
        Ok(total)
    }
}

/// k-fold forward difference with step y:
/// D_y^k f(x) = sum_{j=0..k} (-1)^{k-j} C(k,j) f(x + j y).
pub fn finite_difference<T, F>(f: F, x: &T, y: &T, k: usize) -> Result<T>
where
    T: SeriesValue,
    F: Fn(&T) -> Result<T>,
{
    if k > MAX_SMOOTHING_ORDER {
        return Err(Error::Domain(format!(
            "difference order {} exceeds supported maximum {}",
            k, MAX_SMOOTHING_ORDER
        )));
    }
    let coefs = binomials(k);
    let mut acc = T::zero();
    for (j, c) in coefs.iter().enumerate() {
        let mut arg = x.clone();
        for _ in 0..j {
            arg = arg + y.clone();
        }
        let term = T::from_u64(*c) * f(&arg)?;
        if (k - j) % 2 == 1 {
            acc = acc - term;
        } else {
            acc = acc + term;
        }
    }
    Ok(acc)
}

/// Smoothing scales y = x^{1 - 1/(2A) - eta} and z = x^{2 A eta}. The pair
/// always satisfies z y^{2A} = x^{2A - 1}. eta below -1/(2A) would push y
/// beyond x and is rejected.
pub fn choose_yz(x: f64, a_total: f64, eta: f64) -> Result<(f64, f64)> {
    if !(x > 1.0) {
        return Err(Error::Domain("smoothing scales need x > 1".into()));
    }
    if eta < -1.0 / (2.0 * a_total) {
        return Err(Error::Domain(format!(
            "eta = {} lies below -1/(2A) = {}",
            eta,
            -1.0 / (2.0 * a_total)
        )));
    }
    let y = x.powf(1.0 - 1.0 / (2.0 * a_total) - eta);
    let z = x.powf(2.0 * a_total * eta);
    debug_assert!({
        let lhs = z * y.powf(2.0 * a_total);
        let rhs = x.powf(2.0 * a_total - 1.0);
        (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0)
    });
    Ok((y, z))
}

fn envelope_terms(
    series: &CoefficientSeries<f64>,
    shape: &FunctionalEquationShape,
    dual: &DualBoundSpec,
    x: f64,
    eta: f64,
) -> Result<(f64, f64, f64)> {
    let a = shape.a_total();
    let (y, z) = choose_yz(x, a, eta)?;
    let term1 = x.powf(-1.0 / (2.0 * a) - eta) * series.abs_polar_sum(x);
    let term2 = x.powf(shape.delta / 2.0 - 1.0 / (4.0 * a))
        * z.powf(-shape.delta / 2.0 - 1.0 / (4.0 * a))
        * dual.bound(z);
    Ok((term1, term2, y))
}

/// Two-term envelope for |A(x) - S(x)| when the coefficients are
/// nonnegative: the smoothing slack x^{-1/(2A)-eta} |S|(x) plus the dual
/// term x^{delta/2 - 1/(4A)} z^{-delta/2 - 1/(4A)} B_psi(z). Constants are
/// absorbed into the polar data and B_psi.
pub fn uniform_error_bound(
    series: &CoefficientSeries<f64>,
    shape: &FunctionalEquationShape,
    dual: &DualBoundSpec,
    x: f64,
    eta: f64,
) -> Result<f64> {
    if !series.is_nonnegative() {
        return Err(Error::Domain(
            "series has negative coefficients; use the general bound".into(),
        ));
    }
    let (t1, t2, _) = envelope_terms(series, shape, dual, x, eta)?;
    Ok(t1 + t2)
}

/// Envelope valid without a sign condition: the two-term bound plus the
/// absolute coefficient mass in the smoothing window [x, x + k y], k being
/// the minimal admissible smoothing order.
pub fn uniform_error_bound_general(
    series: &CoefficientSeries<f64>,
    shape: &FunctionalEquationShape,
    dual: &DualBoundSpec,
    x: f64,
    eta: f64,
) -> Result<f64> {
    let k = minimal_k(shape, dual)?;
    let (t1, t2, y) = envelope_terms(series, shape, dual, x, eta)?;
    let window = series.window_abs_sum(&x, &(x + k as f64 * y));
    Ok(window + t1 + t2)
}

/// Smallest smoothing order k for which the contour shift behind the
/// envelope converges: k must clear every gamma-factor pole, the central
/// strip, and the dual growth exponent, and must leave room for a positive
/// epsilon with {k/(2A) - delta/2 - epsilon} in (0, 1/2).
pub fn minimal_k(shape: &FunctionalEquationShape, dual: &DualBoundSpec) -> Result<usize> {
    let a = shape.a_total();
    let delta = shape.delta;
    let mu_re: f64 = 0.5 + shape.factors.iter().map(|f| f.beta.re - 0.5).sum::<f64>();
    for k in 0..=MAX_SMOOTHING_ORDER {
        let base = delta / 2.0 + k as f64 / (2.0 * a);
        let slack_poles = shape
            .factors
            .iter()
            .map(|f| base + f.beta.re / f.alpha)
            .fold(f64::INFINITY, f64::min);
        let slack_central = base + mu_re / a;
        if slack_poles <= 0.0 || slack_central <= 0.0 {
            continue;
        }
        if !(base + 1.0 / (4.0 * a) > dual.r) {
            continue;
        }
        let eps_max = (1.0 / (4.0 * a)).min(slack_poles).min(slack_central);
        let f0 = (k as f64 / (2.0 * a) - delta / 2.0).rem_euclid(1.0);
        let half_line_ok = if f0 > 1e-9 && f0 <= 0.5 + 1e-12 {
            true
        } else {
            f0 > 0.5 && f0 - 0.5 < eps_max - 1e-9
        };
        if half_line_ok {
            return Ok(k);
        }
    }
    Err(Error::Domain(format!(
        "no admissible smoothing order up to {}",
        MAX_SMOOTHING_ORDER
    )))
}

/// eta equalizing the two envelope terms of a d-dimensional count with
/// leading constants delta1 (slack term) and delta1_hat (dual term):
/// eta = 2/(d+1) [ (1/2 - 1/(2d)) + log_x(delta1 / delta1_hat) ].
pub fn equalize_eta(d: usize, delta1: f64, delta1_hat: f64, x: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Unsupported(
            "equalization needs dimension >= 2".into(),
        ));
    }
    if !(x > 1.0) {
        return Err(Error::Domain("equalization needs x > 1".into()));
    }
    if !(delta1 > 0.0) || !(delta1_hat > 0.0) {
        return Err(Error::Domain("envelope constants must be positive".into()));
    }
    let df = d as f64;
    Ok(2.0 / (df + 1.0) * ((0.5 - 0.5 / df) + (delta1 / delta1_hat).ln() / x.ln()))
}

/// Value of the equalized envelope:
/// x^{(d-1)/(d+1)} delta1^{(d-1)/(d+1)} delta1_hat^{2/(d+1)}.
pub fn cn_error(d: usize, delta1: f64, delta1_hat: f64, x: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Unsupported(
            "equalization needs dimension >= 2".into(),
        ));
    }
    if !(x > 1.0) {
        return Err(Error::Domain("equalization needs x > 1".into()));
    }
    if !(delta1 > 0.0) || !(delta1_hat > 0.0) {
        return Err(Error::Domain("envelope constants must be positive".into()));
    }
    let df = d as f64;
    let e = (df - 1.0) / (df + 1.0);
    Ok(x.powf(e) * delta1.powf(e) * delta1_hat.powf(2.0 / (df + 1.0)))
}

/// Equalized envelope for a family: constants are averaged (arithmetic
/// mean) before equalization, which is how a single eta is chosen for a
/// batch of lattices.
pub fn averaged_cn_error(d: usize, delta1s: &[f64], delta1_hats: &[f64], x: f64) -> Result<f64> {
    if delta1s.is_empty() || delta1_hats.is_empty() {
        return Err(Error::InsufficientData(
            "averaged equalization needs at least one constant".into(),
        ));
    }
    let m1 = delta1s.iter().sum::<f64>() / delta1s.len() as f64;
    let m2 = delta1_hats.iter().sum::<f64>() / delta1_hats.len() as f64;
    cn_error(d, m1, m2, x)
}

/// Exact check of y^k A(x) <= D_y^k A^k(x) <= y^k A(x + k y). Refuses
/// series with negative coefficients, where the sandwich can fail.
pub fn check_monotone_sandwich(
    series: &CoefficientSeries<BigRational>,
    x: &BigRational,
    y: &BigRational,
    k: usize,
) -> Result<bool> {
    if !series.is_nonnegative() {
        return Err(Error::Domain(
            "monotone sandwich requires nonnegative coefficients".into(),
        ));
    }
    if !y.is_positive() {
        return Err(Error::Domain("step y must be positive".into()));
    }
    let yk = pow_usize(y, k);
    let lower = &yk * series.partial_sum(x);
    let mid = series.riesz_difference(x, y, k)?;
    let shift = x + BigRational::from_integer(BigInt::from(k as u64)) * y;
    let upper = &yk * series.partial_sum(&shift);
    Ok(lower <= mid && mid <= upper)
}

/// Numerical equalization: the eta in [-1/(2A), 2] where the two envelope
/// terms cross, found by bisection on their log-ratio (strictly decreasing
/// in eta). Clamps to an endpoint when there is no interior crossing.
pub fn auto_eta(
    series: &CoefficientSeries<f64>,
    shape: &FunctionalEquationShape,
    dual: &DualBoundSpec,
    x: f64,
) -> Result<f64> {
    let a = shape.a_total();
    let lo0 = -1.0 / (2.0 * a);
    let hi0 = 2.0;
    let g = |eta: f64| -> Result<f64> {
        let (t1, t2, _) = envelope_terms(series, shape, dual, x, eta)?;
        if t1 <= 0.0 || t2 <= 0.0 {
            return Err(Error::InsufficientData(
                "envelope terms vanish; equalization is undefined".into(),
            ));
        }
        Ok((t1 / t2).ln())
    };
    let mut lo = lo0;
    let mut hi = hi0;
    if g(lo)? <= 0.0 {
        return Ok(lo);
    }
    if g(hi)? >= 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn fseries(support: &[f64], coeffs: &[f64]) -> CoefficientSeries<f64> {
        CoefficientSeries::new(support.to_vec(), coeffs.to_vec()).unwrap()
    }

    fn epstein_like_shape(d: usize) -> (FunctionalEquationShape, DualBoundSpec) {
        let shape = FunctionalEquationShape::new(d as f64 / 2.0, vec![GammaFactor::real(1.0, 0.0)])
            .unwrap();
        let dual = DualBoundSpec::new(1.0, 0.0, d as f64 / 2.0, 0.0, &shape).unwrap();
        (shape, dual)
    }

    #[test]
    fn neumaier_sum_keeps_small_addends() {
        let v = [1e16f64, 1.0, -1e16];
        assert_eq!(f64::sum_values(v.iter().copied()), 1.0);
    }

    #[test]
    fn partial_sums_hit_boundaries_exactly() {
        let s = fseries(&[1.0, 2.0, 4.0], &[3.0, 5.0, 7.0]);
        assert_eq!(s.partial_sum(&0.5), 0.0);
        assert_eq!(s.partial_sum(&1.0), 3.0);
        assert_eq!(s.partial_sum(&3.9), 8.0);
        assert_eq!(s.partial_sum(&4.0), 15.0);
        assert_eq!(s.partial_sum(&100.0), 15.0);
    }

    #[test]
    fn riesz_mean_small_examples() {
        let s = fseries(&[1.0], &[2.0]);
        assert_eq!(s.riesz_mean(&3.0, 1).unwrap(), 4.0);
        let s2 = fseries(&[1.0, 2.0], &[1.0, 1.0]);
        assert_eq!(s2.riesz_mean(&3.0, 2).unwrap(), 2.5);
        assert_eq!(s2.riesz_mean(&3.0, 0).unwrap(), s2.partial_sum(&3.0));
    }

    #[test]
    fn series_validation_rejects_bad_support() {
        assert!(CoefficientSeries::new(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(CoefficientSeries::new(vec![2.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(CoefficientSeries::new(vec![0.0], vec![1.0]).is_err());
        assert!(CoefficientSeries::new(vec![1.0], vec![1.0, 2.0]).is_err());
        let empty = CoefficientSeries::<f64>::new(vec![], vec![]).unwrap();
        assert!(empty.is_nonnegative());
        assert_eq!(empty.partial_sum(&10.0), 0.0);
    }

    #[test]
    fn window_sum_is_inclusive_and_absolute() {
        let s = fseries(&[1.0, 2.0, 3.0], &[1.0, -4.0, 2.0]);
        assert!(!s.is_nonnegative());
        assert_eq!(s.window_abs_sum(&2.0, &3.0), 6.0);
        assert_eq!(s.window_abs_sum(&1.5, &2.5), 4.0);
        assert_eq!(s.window_abs_sum(&4.0, &9.0), 0.0);
    }

    #[test]
    fn difference_of_shifted_power_is_factorial_times_step_power() {
        // D_y^k (t - lambda)^k = k! y^k for every t, lambda.
        for k in 0..=5usize {
            let lambda = rat(7, 3);
            let x = rat(-5, 2);
            let y = rat(4, 5);
            let got = finite_difference(
                |t| Ok(pow_usize(&(t.clone() - lambda.clone()), k)),
                &x,
                &y,
                k,
            )
            .unwrap();
            let want = rat(factorial_u64(k) as i64, 1) * pow_usize(&y, k);
            assert_eq!(got, want);
        }
    }

    #[test]
    fn single_atom_difference_tracks_window_position() {
        let k = 3usize;
        let y = rat(1, 2);
        let a = rat(5, 1);
        let yk = pow_usize(&y, k);
        let full = &yk * &a;
        for num in 1..30i64 {
            let lambda = rat(num, 4);
            let s = CoefficientSeries::new(vec![lambda.clone()], vec![a.clone()]).unwrap();
            let x = rat(3, 1);
            let d = s.riesz_difference(&x, &y, k).unwrap();
            let window_hi = &x + rat(k as i64, 1) * &y;
            if lambda <= x {
                assert_eq!(d, full);
            } else if lambda > window_hi {
                assert_eq!(d, BigRational::zero());
            } else {
                assert!(d >= BigRational::zero() && d <= full);
            }
        }
    }

    #[test]
    fn sandwich_holds_on_random_rational_series() {
        let mut state = 0x12345678u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..30 {
            let n = 1 + (next() % 6) as usize;
            let mut support = Vec::new();
            let mut coeffs = Vec::new();
            let mut cur = rat(0, 1);
            for _ in 0..n {
                cur = cur + rat(1 + (next() % 9) as i64, 1 + (next() % 4) as i64);
                support.push(cur.clone());
                coeffs.push(rat((next() % 12) as i64, 1 + (next() % 5) as i64));
            }
            let series = CoefficientSeries::new(support, coeffs).unwrap();
            let k = (next() % 5) as usize;
            let x = rat(1 + (next() % 20) as i64, 1 + (next() % 3) as i64);
            let y = rat(1 + (next() % 7) as i64, 1 + (next() % 6) as i64);
            assert!(check_monotone_sandwich(&series, &x, &y, k).unwrap());
        }
    }

    #[test]
    fn sandwich_refuses_signed_series() {
        let series = CoefficientSeries::new(vec![rat(1, 1)], vec![rat(-1, 1)]).unwrap();
        assert!(check_monotone_sandwich(&series, &rat(2, 1), &rat(1, 1), 2).is_err());
    }

    #[test]
    fn minimal_orders_for_reference_shapes() {
        let (s2, d2) = epstein_like_shape(2);
        assert_eq!(minimal_k(&s2, &d2).unwrap(), 2);
        let (s3, d3) = epstein_like_shape(3);
        assert_eq!(minimal_k(&s3, &d3).unwrap(), 2);
        let (s4, d4) = epstein_like_shape(4);
        assert_eq!(minimal_k(&s4, &d4).unwrap(), 3);

        // Quadratic number field shapes: two real embeddings give two
        // Gamma(s/2) factors, one complex pair gives a single Gamma(s).
        let real_quad = FunctionalEquationShape::new(
            1.0,
            vec![GammaFactor::real(0.5, 0.0), GammaFactor::real(0.5, 0.0)],
        )
        .unwrap();
        let dual_rq = DualBoundSpec::new(1.0, 0.0, 1.0, 0.0, &real_quad).unwrap();
        assert_eq!(minimal_k(&real_quad, &dual_rq).unwrap(), 2);
        let imag_quad =
            FunctionalEquationShape::new(1.0, vec![GammaFactor::real(1.0, 0.0)]).unwrap();
        let dual_iq = DualBoundSpec::new(1.0, 0.0, 1.0, 0.0, &imag_quad).unwrap();
        assert_eq!(minimal_k(&imag_quad, &dual_iq).unwrap(), 2);
    }

    #[test]
    fn smoothing_scale_examples() {
        let (y, z) = choose_yz(100.0, 1.0, 0.0).unwrap();
        assert!((y - 10.0).abs() < 1e-12 && (z - 1.0).abs() < 1e-12);
        let (y2, z2) = choose_yz(100.0, 1.0, -0.5).unwrap();
        assert!((y2 - 100.0).abs() < 1e-12 && (z2 - 0.01).abs() < 1e-14);
        assert!(choose_yz(100.0, 1.0, -0.6).is_err());
        assert!(choose_yz(0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn envelope_reduces_to_power_sum_example() {
        // delta = 1, A = 1, polar mass x, dual bound z: the two terms are
        // x^{1/2 - eta} and x^{1/4 + eta/2}.
        let shape = FunctionalEquationShape::new(1.0, vec![GammaFactor::real(1.0, 0.0)]).unwrap();
        let dual = DualBoundSpec::new(1.0, 0.0, 1.0, 0.0, &shape).unwrap();
        let series = fseries(&[1.0], &[1.0]).with_polar_data(vec![PolarDatum::simple(1.0, 1.0)]);
        let b = uniform_error_bound(&series, &shape, &dual, 16.0, 0.0).unwrap();
        assert!((b - 6.0).abs() < 1e-12);

        // The general bound adds exactly the window mass: k = 2, y = 4,
        // and [16, 24] contains the atom at 17 with |a| = 3.
        let signed = CoefficientSeries::new(vec![1.0, 17.0], vec![-1.0, 3.0])
            .unwrap()
            .with_polar_data(vec![PolarDatum::simple(1.0, 1.0)]);
        assert!(uniform_error_bound(&signed, &shape, &dual, 16.0, 0.0).is_err());
        let g = uniform_error_bound_general(&signed, &shape, &dual, 16.0, 0.0).unwrap();
        assert!((g - 9.0).abs() < 1e-12);
    }

    #[test]
    fn auto_eta_equalizes_the_example() {
        let shape = FunctionalEquationShape::new(1.0, vec![GammaFactor::real(1.0, 0.0)]).unwrap();
        let dual = DualBoundSpec::new(1.0, 0.0, 1.0, 0.0, &shape).unwrap();
        let series = fseries(&[1.0], &[1.0]).with_polar_data(vec![PolarDatum::simple(1.0, 1.0)]);
        let eta = auto_eta(&series, &shape, &dual, 1e6).unwrap();
        assert!((eta - 1.0 / 6.0).abs() < 1e-6);
        let (t1, t2, _) = envelope_terms(&series, &shape, &dual, 1e6, eta).unwrap();
        assert!((t1 / t2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn equalized_eta_and_error_closed_forms() {
        for d in 2..=6usize {
            let eta = equalize_eta(d, 1.0, 1.0, 1e4).unwrap();
            let df = d as f64;
            assert!((eta - (df - 1.0) / (df * (df + 1.0))).abs() < 1e-12);
            let err = cn_error(d, 1.0, 1.0, 1e4).unwrap();
            let expo = err.ln() / 1e4f64.ln();
            assert!((expo - (df - 1.0) / (df + 1.0)).abs() < 1e-12);
        }
        let e3 = cn_error(3, 2.0, 2.0, 100.0).unwrap();
        assert!((e3 - 20.0).abs() < 1e-10);
        assert!(averaged_cn_error(3, &[], &[1.0], 100.0).is_err());
        let avg = averaged_cn_error(3, &[2.0, 2.0], &[2.0], 100.0).unwrap();
        assert!((avg - 20.0).abs() < 1e-10);
    }

    #[test]
    fn polar_sums_with_real_and_complex_abscissas() {
        let s = fseries(&[1.0], &[1.0]).with_polar_data(vec![PolarDatum {
            xi: Complex64::new(0.0, 1.0),
            poly: vec![1.0],
        }]);
        let x = std::f64::consts::PI.exp();
        assert!((s.polar_sum(x) + 1.0).abs() < 1e-12);

        let s2 = fseries(&[1.0], &[1.0]).with_polar_data(vec![PolarDatum {
            xi: Complex64::new(1.0, 0.0),
            poly: vec![-2.0, 3.0],
        }]);
        let x2 = 7.0f64;
        assert!((s2.abs_polar_sum(x2) - x2 * (2.0 + 3.0 * x2.ln())).abs() < 1e-12);
        assert!((s2.polar_sum(x2) - x2 * (-2.0 + 3.0 * x2.ln())).abs() < 1e-12);
        assert!(s2.polar_sum_riesz(2.0, 1).is_err());

        let s3 = fseries(&[1.0], &[1.0]).with_polar_data(vec![
            PolarDatum::simple(1.0, 2.0),
            PolarDatum::simple(0.0, 5.0),
        ]);
        // 2 x^2 / 2 + 5 x: smoothing order 1.
        assert!((s3.polar_sum_riesz(3.0, 1).unwrap() - (9.0 + 15.0)).abs() < 1e-12);
        // 2 x^3 / 6 + 5 x^2 / 2: order 2.
        assert!((s3.polar_sum_riesz(3.0, 2).unwrap() - (9.0 + 22.5)).abs() < 1e-12);
    }

    #[test]
    fn shape_and_dual_validation() {
        assert!(FunctionalEquationShape::new(0.0, vec![GammaFactor::real(1.0, 0.0)]).is_err());
        assert!(FunctionalEquationShape::new(1.0, vec![]).is_err());
        assert!(FunctionalEquationShape::new(1.0, vec![GammaFactor::real(-1.0, 0.0)]).is_err());
        let shape = FunctionalEquationShape::new(1.0, vec![GammaFactor::real(1.0, 0.0)]).unwrap();
        assert_eq!(shape.degree(), 2.0);
        // r must clear delta/2 + 1/(4A) = 3/4.
        assert!(DualBoundSpec::new(1.0, 0.0, 0.7, 0.0, &shape).is_err());
        assert!(DualBoundSpec::new(1.0, 0.0, 1.0, 0.0, &shape).is_ok());
        assert!(DualBoundSpec::new(-1.0, 0.0, 1.0, 0.0, &shape).is_err());
        assert!(DualBoundSpec::new(1.0, 0.0, 1.0, 1.5, &shape).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn riesz_difference_sandwich_property(
            atoms in prop::collection::vec((1u32..40, 0u32..10), 1..6),
            k in 0usize..4,
            xn in 1i64..30,
            yn in 1i64..8,
        ) {
            let mut support = Vec::new();
            let mut coeffs = Vec::new();
            let mut cur = 0i64;
            for (gap, c) in &atoms {
                cur += *gap as i64;
                support.push(rat(cur, 2));
                coeffs.push(rat(*c as i64, 3));
            }
            let series = CoefficientSeries::new(support, coeffs).unwrap();
            let x = rat(xn, 2);
            let y = rat(yn, 3);
            prop_assert!(check_monotone_sandwich(&series, &x, &y, k).unwrap());
        }
    }
}
