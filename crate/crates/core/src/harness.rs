//! Deterministic experiment scaffolding: a seeded generator for
//! reproducible random lattices, log-log slope fits, grids and the float
//! formatting shared by all CSV output.

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// How many singular draws `random_lattice` tolerates before giving up.
pub const RANDOM_LATTICE_MAX_TRIES: u32 = 1000;

/// SplitMix64: tiny, splittable, and identical across platforms, which is
/// all the experiments need.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from [lo, hi], rejection-sampled so every value is
    /// exactly equally likely.
    pub fn uniform_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > u64::MAX as u128 {
            return self.next_u64() as i64;
        }
        let span = span as u64;
        let zone = u64::MAX - u64::MAX % span;
        loop {
            let v = self.next_u64();
            if v < zone {
                return lo + (v % span) as i64;
            }
        }
    }
}

/// Random integer lattice with entries in [-entry_bound, entry_bound],
/// resampled until the basis is invertible.
pub fn random_lattice(dim: usize, entry_bound: i64, rng: &mut SplitMix64) -> Result<Lattice> {
    if dim == 0 {
        return Err(Error::Domain("lattice dimension must be positive".into()));
    }
    if entry_bound < 1 {
        return Err(Error::Domain("entry bound must be at least 1".into()));
    }
    for _ in 0..RANDOM_LATTICE_MAX_TRIES {
        let rows: Vec<Vec<i64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| rng.uniform_i64(-entry_bound, entry_bound))
                    .collect()
            })
            .collect();
        if let Ok(lat) = Lattice::from_integer_rows(&rows) {
            return Ok(lat);
        }
    }
    Err(Error::RejectionCapExceeded {
        tries: RANDOM_LATTICE_MAX_TRIES,
    })
}

/// Least-squares fit of ln y against ln x.
#[derive(Clone, Debug)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub used: usize,
    /// Points discarded because y was exactly zero.
    pub dropped: usize,
}

/// Fits ln y = slope ln x + intercept. Zero magnitudes are dropped (their
/// logarithm carries no information for an envelope); negative ones are an
/// error, as is a fit with fewer than three surviving points.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<LogFit> {
    let mut logs = Vec::with_capacity(points.len());
    let mut dropped = 0usize;
    for &(x, y) in points {
        if !(x > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!(
                "log fit needs finite points with x > 0, got ({}, {})",
                x, y
            )));
        }
        if y < 0.0 {
            return Err(Error::Domain(
                "log fit expects nonnegative magnitudes".into(),
            ));
        }
        if y == 0.0 {
            dropped += 1;
            continue;
        }
        logs.push((x.ln(), y.ln()));
    }
    if logs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "log fit needs at least 3 nonzero points, has {}",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0f64;
    let mut sxy = 0.0f64;
    for (x, y) in &logs {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain(
            "log fit needs at least two distinct x".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(LogFit {
        slope,
        intercept: my - slope * mx,
        used: logs.len(),
        dropped,
    })
}

/// Geometric grid of n points from lo to hi inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Domain("grid needs at least 2 points".into()));
    }
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Domain("grid needs 0 < lo < hi".into()));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// Canonical float formatting for CSV output: 17 significant digits, so
/// values round-trip and identical runs produce identical bytes.
pub fn fmt_float(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn splitmix_reference_vector() {
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(r.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(r.next_u64(), 0x06c45d188009454f);
        let mut r42 = SplitMix64::new(42);
        assert_eq!(r42.next_u64(), 0xbdd732262feb6e95);
    }

    #[test]
    fn uniform_draws_stay_in_range_and_hit_endpoints() {
        let mut r = SplitMix64::new(7);
        let mut seen_lo = false;
        let mut seen_hi = false;
        for _ in 0..2000 {
            let v = r.uniform_i64(-3, 3);
            assert!((-3..=3).contains(&v));
            seen_lo |= v == -3;
            seen_hi |= v == 3;
        }
        assert!(seen_lo && seen_hi);
    }

    #[test]
    fn same_seed_same_lattice() {
        let mut a = SplitMix64::new(123);
        let mut b = SplitMix64::new(123);
        let la = random_lattice(3, 5, &mut a).unwrap();
        let lb = random_lattice(3, 5, &mut b).unwrap();
        assert_eq!(la.rows(), lb.rows());
        assert!(!la.determinant().is_zero());
    }

    #[test]
    fn random_lattice_validates_arguments() {
        let mut r = SplitMix64::new(1);
        assert!(random_lattice(0, 5, &mut r).is_err());
        assert!(random_lattice(2, 0, &mut r).is_err());
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=8)
            .map(|i| (i as f64, 3.0 * (i as f64).powi(2)))
            .collect();
        let fit = fit_log_slope(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert_eq!((fit.used, fit.dropped), (8, 0));
    }

    #[test]
    fn fit_drops_zeros_and_rejects_bad_input() {
        let pts = vec![(1.0, 0.0), (2.0, 4.0), (3.0, 9.0), (4.0, 16.0)];
        let fit = fit_log_slope(&pts).unwrap();
        assert_eq!((fit.used, fit.dropped), (3, 1));
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit_log_slope(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
        assert!(fit_log_slope(&[(0.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(fit_log_slope(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_log_slope(&[(1.0, 0.0), (2.0, 0.0), (3.0, 1.0), (4.0, 2.0)]).is_err());
    }

    #[test]
    fn log_grid_endpoints_and_monotonicity() {
        let g = log_grid(10.0, 1000.0, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 10.0).abs() < 1e-9);
        assert!((g[4] - 1000.0).abs() < 1e-9);
        assert!((g[2] - 100.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_grid(0.0, 10.0, 3).is_err());
        assert!(log_grid(10.0, 5.0, 3).is_err());
        assert!(log_grid(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn float_formatting_is_fixed_width_scientific() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(-0.5), "-5.0000000000000000e-1");
        assert_eq!(fmt_float(1234.5), "1.2345000000000000e3");
    }
}
