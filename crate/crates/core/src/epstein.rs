//! Sphere-count experiments tied to the zeta function of a lattice.
//!
//! For a d-dimensional lattice the summatory function N(R) of the
//! squared-norm coefficient series is exactly the number of lattice points
//! with |v| <= R. Its main term is vol(B_d) R^d / det, and the error admits
//! an envelope det^{-1} r^{2d/(d+1)} R^{d(d-1)/(d+1)} uniform over all
//! lattices whose basis radius is below r, valid once R clears that radius.

use crate::enumerate::{self, CountMode, POINT_BOUND_BASE};
use crate::error::{Error, Result};
use crate::harness;
use crate::landau::{
    minimal_k, CoefficientSeries, DualBoundSpec, FunctionalEquationShape, GammaFactor, PolarDatum,
};
use crate::lattice::{Lattice, LatticeProfile};
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Gamma(n/2) for integer n >= 1, in closed form: integer factorials for
/// even n, sqrt(pi) (n-2)!! / 2^{(n-1)/2} for odd n.
fn gamma_half(n: u64) -> f64 {
    assert!(n >= 1);
    if n % 2 == 0 {
        let mut acc = 1.0f64;
        for j in 1..n / 2 {
            acc *= j as f64;
        }
        acc
    } else {
        let mut acc = std::f64::consts::PI.sqrt();
        let mut j = n as i64 - 2;
        while j >= 2 {
            acc *= j as f64;
            j -= 2;
        }
        acc / 2f64.powi(((n - 1) / 2) as i32)
    }
}

/// Volume of the unit ball in d dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half(d as u64 + 2)
}

/// Everything needed to run a sphere-count experiment on one lattice: the
/// exact geometry of the lattice and its dual, the analytic data of the
/// associated zeta function, and the dual coefficient bound.
#[derive(Clone, Debug)]
pub struct EpsteinSpec {
    pub lattice: Lattice,
    pub dual: Lattice,
    pub profile: LatticeProfile,
    pub dual_profile: LatticeProfile,
    /// Residue of the zeta function at s = d/2: pi^{d/2} / (Gamma(d/2) det).
    pub residue: f64,
    pub ball_volume: f64,
    /// C' = 6^d / lambda_1(dual)^d, controlling dual coefficient sums.
    pub dual_density: f64,
    pub shape: FunctionalEquationShape,
    pub dual_bound: DualBoundSpec,
}

pub fn build_spec(lattice: &Lattice) -> Result<EpsteinSpec> {
    let d = lattice.dim();
    if d < 2 {
        return Err(Error::Unsupported(
            "sphere-count envelopes need dimension >= 2".into(),
        ));
    }
    let dual = lattice.dual();
    let profile = LatticeProfile::compute(lattice)?;
    let dual_profile = LatticeProfile::compute(&dual)?;
    let det = profile.determinant.to_f64().expect("finite determinant");
    let pi_pow = std::f64::consts::PI.powf(d as f64 / 2.0);
    let residue = pi_pow / (gamma_half(d as u64) * det);
    let ball_volume = unit_ball_volume(d);
    let dual_density = POINT_BOUND_BASE.powi(d as i32) / dual_profile.lambda[0].powi(d as i32);
    let shape = FunctionalEquationShape::new(d as f64 / 2.0, vec![GammaFactor::real(1.0, 0.0)])?;
    let dual_bound = DualBoundSpec::new(dual_density / det, 0.0, d as f64 / 2.0, 0.0, &shape)?;
    Ok(EpsteinSpec {
        lattice: lattice.clone(),
        dual,
        profile,
        dual_profile,
        residue,
        ball_volume,
        dual_density,
        shape,
        dual_bound,
    })
}

impl EpsteinSpec {
    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    pub fn determinant(&self) -> f64 {
        self.profile
            .determinant
            .to_f64()
            .expect("finite determinant")
    }

    /// vol(B_d) R^d / det.
    pub fn main_term(&self, radius: f64) -> f64 {
        self.ball_volume * radius.powi(self.dim() as i32) / self.determinant()
    }

    /// Envelope det^{-1} r^{2d/(d+1)} R^{d(d-1)/(d+1)} with r the upper
    /// bracket of the basis radius. Only valid for R beyond that bracket.
    pub fn error_envelope(&self, radius: f64) -> Result<f64> {
        let r_ub = self.profile.r_bas_upper;
        if !(radius > r_ub) {
            return Err(Error::HypothesisViolation(format!(
                "radius {} must exceed the basis radius bound {}",
                radius, r_ub
            )));
        }
        let d = self.dim() as f64;
        Ok(
            r_ub.powf(2.0 * d / (d + 1.0)) * radius.powf(d * (d - 1.0) / (d + 1.0))
                / self.determinant(),
        )
    }

    /// Smoothing exponent equalizing the envelope terms at this radius:
    /// eta = (d-1)/(2(d+1)) - ln C' / ((d+1) ln R), clamped at -1/2 where
    /// the smoothing length would exceed the sum itself.
    pub fn eta_for_radius(&self, radius: f64) -> Result<f64> {
        if !(radius > 1.0) {
            return Err(Error::Domain(
                "equalized smoothing exponent needs R > 1".into(),
            ));
        }
        let d = self.dim() as f64;
        let eta =
            (d - 1.0) / (2.0 * (d + 1.0)) - self.dual_density.ln() / ((d + 1.0) * radius.ln());
        Ok(eta.max(-0.5))
    }

    /// Polar data of the coefficient series in the squared-norm variable
    /// X = R^2: the pole at d/2 carries vol(B_d)/det, and the constant term
    /// (the value of the zeta function at 0) is deliberately left at zero;
    /// experiments fit and report that constant instead of assuming it.
    pub fn polar_data(&self) -> Vec<PolarDatum> {
        vec![
            PolarDatum::simple(
                self.dim() as f64 / 2.0,
                self.ball_volume / self.determinant(),
            ),
            PolarDatum::simple(0.0, 0.0),
        ]
    }

    /// Coefficient series of the lattice up to squared norm `cutoff`,
    /// with the polar data attached.
    pub fn coefficient_series(&self, cutoff: &BigRational) -> Result<CoefficientSeries<f64>> {
        let spectrum = enumerate::norm_spectrum(&self.lattice, cutoff)?;
        Ok(spectrum.to_series()?.with_polar_data(self.polar_data()))
    }

    /// Minimal admissible smoothing order for this shape and dual bound.
    pub fn smoothing_order(&self) -> Result<usize> {
        minimal_k(&self.shape, &self.dual_bound)
    }
}

/// One grid point of a sphere-count experiment. `error` is signed
/// (exact - main); `ratio` compares |error| against the envelope.
#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub radius: f64,
    pub exact: u128,
    pub main: f64,
    pub error: f64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentSummary {
    /// Log-log fit of |error| against R, when at least three points remain.
    pub fit: Option<harness::LogFit>,
    pub max_ratio: f64,
    /// Mean signed error: the empirical value of the constant term left
    /// open in the polar data.
    pub fitted_constant: f64,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub rows: Vec<ExperimentRow>,
    pub summary: ExperimentSummary,
}

/// Counts points inclusively at every radius in `radii` (ascending, each
/// beyond the basis radius bracket) and compares against the main term and
/// the envelope.
pub fn run_experiment(
    spec: &EpsteinSpec,
    radii: &[BigRational],
    threads: usize,
) -> Result<Experiment> {
    if radii.is_empty() {
        return Err(Error::InsufficientData(
            "experiment needs at least one radius".into(),
        ));
    }
    for w in radii.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Domain("radii must be strictly increasing".into()));
        }
    }
    let mut rows = Vec::with_capacity(radii.len());
    for r in radii {
        let rf = r.to_f64().expect("finite radius");
        let envelope = spec.error_envelope(rf)?;
        let exact =
            enumerate::count_points_threaded(&spec.lattice, r, CountMode::Inclusive, threads)?;
        let main = spec.main_term(rf);
        let error = exact as f64 - main;
        rows.push(ExperimentRow {
            radius: rf,
            exact,
            main,
            error,
            envelope,
            ratio: error.abs() / envelope,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.radius, r.error.abs())).collect();
    let fit = harness::fit_log_slope(&pts).ok();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0f64, f64::max);
    let fitted_constant = rows.iter().map(|r| r.error).sum::<f64>() / rows.len() as f64;
    Ok(Experiment {
        rows,
        summary: ExperimentSummary {
            fit,
            max_ratio,
            fitted_constant,
        },
    })
}
