//! Command-line front end for the lattice counting and envelope
//! experiments. Every subcommand writes deterministic text (CSV or the
//! plain lattice format) to stdout or to --output.

use clap::{Parser, Subcommand, ValueEnum};
use lattice_landau::dedekind;
use lattice_landau::enumerate::{self, CountMode};
use lattice_landau::epstein;
use lattice_landau::error::{Error, Result};
use lattice_landau::harness::{self, SplitMix64};
use lattice_landau::landau::{
    self, CoefficientSeries, DualBoundSpec, FunctionalEquationShape, GammaFactor, PolarDatum,
};
use lattice_landau::lattice::{self, Lattice};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lattice-landau",
    version,
    about = "Exact lattice point counts and partial-sum error envelopes"
)]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for point counting (default: 1, or
    /// LATTICE_LANDAU_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for randomized experiment inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Count |v| < R.
    Strict,
    /// Count |v| <= R.
    Inclusive,
}

impl From<ModeArg> for CountMode {
    fn from(m: ModeArg) -> CountMode {
        match m {
            ModeArg::Strict => CountMode::Strict,
            ModeArg::Inclusive => CountMode::Inclusive,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count lattice points in a ball of the given radius.
    Count {
        /// Lattice file (first line d, then d rows of d rationals).
        #[arg(long)]
        lattice: PathBuf,
        /// Radius as an integer, fraction p/q, or decimal.
        #[arg(long)]
        radius: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Inclusive)]
        mode: ModeArg,
    },
    /// List squared norms and multiplicities of nonzero vectors up to a
    /// cutoff.
    Spectrum {
        #[arg(long)]
        lattice: PathBuf,
        /// Squared-norm cutoff (rational).
        #[arg(long)]
        cutoff: String,
    },
    /// LLL-reduce a basis and print it in the lattice text format.
    Reduce {
        #[arg(long)]
        lattice: PathBuf,
        /// Reduction parameter in (1/4, 1).
        #[arg(long, default_value = "3/4")]
        delta: String,
    },
    /// Print the successive minima (exact squares plus lengths).
    Minima {
        #[arg(long)]
        lattice: PathBuf,
    },
    /// Print the dual lattice in the lattice text format.
    Dual {
        #[arg(long)]
        lattice: PathBuf,
    },
    /// Compare partial sums of a coefficient series against its polar main
    /// term under the two-term envelope.
    LandauCheck {
        /// CSV of "lambda,coefficient" rows.
        #[arg(long)]
        series: PathBuf,
        /// CSV of polar data: "xi,c0[,c1,...]" per row (real xi; c_j
        /// multiplies (ln X)^j).
        #[arg(long)]
        polar: PathBuf,
        /// JSON {"delta":..., "factors":[{"alpha":..., "beta":[re,im]}]}.
        #[arg(long)]
        shape: PathBuf,
        /// JSON {"c_psi":..., "c_psi_prime":..., "r":..., "r_prime":...}.
        #[arg(long)]
        dual_bound: PathBuf,
        /// Evaluation grid lo:hi:points (geometric).
        #[arg(long)]
        xgrid: String,
        /// Smoothing exponent, or "auto" to equalize the envelope terms at
        /// the grid midpoint.
        #[arg(long, default_value = "auto")]
        eta: String,
    },
    /// Count points on a radius grid and compare against the sphere-count
    /// main term and envelope.
    EpsteinExperiment {
        /// Lattice file; mutually exclusive with --random.
        #[arg(long, conflicts_with = "random")]
        lattice: Option<PathBuf>,
        /// Random family spec "d=2,count=5,entry-bound=9" (uses --seed).
        #[arg(long)]
        random: Option<String>,
        /// Radius grid lo:hi:points (geometric).
        #[arg(long)]
        rgrid: String,
    },
    /// Ideal-count experiment over a range of fundamental discriminants.
    DedekindExperiment {
        /// Discriminant range lo:hi (inclusive); lo is usually negative.
        #[arg(long, allow_hyphen_values = true)]
        disc_range: String,
        /// Norm bound grid lo:hi:points (geometric, rounded to integers).
        #[arg(long)]
        xgrid: String,
        /// Absolute error tolerance for the L-values.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.contains('.') {
        let f: f64 = t
            .parse()
            .map_err(|_| Error::Domain(format!("invalid number {:?}", t)))?;
        return BigRational::from_float(f)
            .ok_or_else(|| Error::Domain(format!("non-finite number {:?}", t)));
    }
    t.parse()
        .map_err(|_| Error::Domain(format!("invalid rational {:?}", t)))
}

/// "lo:hi:n" into a geometric grid.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Domain(format!(
            "grid must look like lo:hi:points, got {:?}",
            s
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Domain(format!("invalid grid start {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Domain(format!("invalid grid end {:?}", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::Domain(format!("invalid grid size {:?}", parts[2])))?;
    harness::log_grid(lo, hi, n)
}

fn read_lattice(path: &PathBuf) -> Result<Lattice> {
    Lattice::parse_text(&std::fs::read_to_string(path)?)
}

fn numeric_csv_rows(path: &PathBuf) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        // A non-numeric first field is a header.
        if fields[0].parse::<f64>().is_err() {
            if line_no == 0 {
                continue;
            }
            return Err(Error::Parse {
                line: line_no + 1,
                col: 1,
                msg: format!("invalid number {:?}", fields[0]),
            });
        }
        let mut row = Vec::with_capacity(fields.len());
        for (col, f) in fields.iter().enumerate() {
            row.push(f.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no + 1,
                col: col + 1,
                msg: format!("invalid number {:?}", f),
            })?);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(serde::Deserialize)]
struct ShapeFile {
    delta: f64,
    factors: Vec<FactorFile>,
}

#[derive(serde::Deserialize)]
struct FactorFile {
    alpha: f64,
    #[serde(default)]
    beta: [f64; 2],
}

#[derive(serde::Deserialize)]
struct DualBoundFile {
    c_psi: f64,
    #[serde(default)]
    c_psi_prime: f64,
    r: f64,
    #[serde(default)]
    r_prime: f64,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        col: e.column(),
        msg: e.to_string(),
    })
}

fn thread_count(cli: &Cli) -> usize {
    cli.threads
        .or_else(|| {
            std::env::var("LATTICE_LANDAU_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1)
}

fn parse_random_family(spec: &str) -> Result<(usize, usize, i64)> {
    let mut dim = None;
    let mut count = 1usize;
    let mut entry_bound = 9i64;
    for part in spec.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("expected key=value, got {:?}", part)))?;
        let value = value.trim();
        match key.trim() {
            "d" | "dim" => {
                dim = Some(
                    value
                        .parse()
                        .map_err(|_| Error::Domain(format!("invalid dimension {:?}", value)))?,
                )
            }
            "count" => {
                count = value
                    .parse()
                    .map_err(|_| Error::Domain(format!("invalid count {:?}", value)))?
            }
            "entry-bound" | "entry_bound" => {
                entry_bound = value
                    .parse()
                    .map_err(|_| Error::Domain(format!("invalid entry bound {:?}", value)))?
            }
            other => {
                return Err(Error::Domain(format!(
                    "unknown random-family key {:?}",
                    other
                )))
            }
        }
    }
    let dim = dim.ok_or_else(|| Error::Domain("random family needs d=<dim>".into()))?;
    if count == 0 {
        return Err(Error::Domain("random family needs count >= 1".into()));
    }
    Ok((dim, count, entry_bound))
}

fn run(cli: &Cli) -> Result<String> {
    let threads = thread_count(cli);
    let mut out = String::new();
    match &cli.command {
        Command::Count {
            lattice,
            radius,
            mode,
        } => {
            let lat = read_lattice(lattice)?;
            let r = parse_rational(radius)?;
            let n = enumerate::count_points_threaded(&lat, &r, (*mode).into(), threads)?;
            writeln!(out, "{}", n).unwrap();
        }
        Command::Spectrum { lattice, cutoff } => {
            let lat = read_lattice(lattice)?;
            let cut = parse_rational(cutoff)?;
            let spec = enumerate::norm_spectrum(&lat, &cut)?;
            writeln!(out, "lambda,count").unwrap();
            for (l, c) in &spec.entries {
                writeln!(out, "{},{}", l, c).unwrap();
            }
        }
        Command::Reduce { lattice, delta } => {
            let lat = read_lattice(lattice)?;
            let d = parse_rational(delta)?;
            out.push_str(&lattice::lll_reduce(&lat, &d)?.to_text());
        }
        Command::Minima { lattice } => {
            let lat = read_lattice(lattice)?;
            let sq = lattice::successive_minima_sq(&lat)?;
            writeln!(out, "lambda_sq,lambda").unwrap();
            for v in &sq {
                let len = v.to_f64().expect("finite").sqrt();
                writeln!(out, "{},{}", v, harness::fmt_float(len)).unwrap();
            }
        }
        Command::Dual { lattice } => {
            let lat = read_lattice(lattice)?;
            out.push_str(&lat.dual().to_text());
        }
        Command::LandauCheck {
            series,
            polar,
            shape,
            dual_bound,
            xgrid,
            eta,
        } => {
            let series_rows = numeric_csv_rows(series)?;
            let mut pairs = Vec::with_capacity(series_rows.len());
            for row in &series_rows {
                if row.len() != 2 {
                    return Err(Error::Domain(
                        "series rows must be lambda,coefficient".into(),
                    ));
                }
                pairs.push((row[0], row[1]));
            }
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite support"));
            let (support, coeffs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();

            let mut polar_data = Vec::new();
            for row in numeric_csv_rows(polar)? {
                if row.len() < 2 {
                    return Err(Error::Domain("polar rows must be xi,c0[,c1,...]".into()));
                }
                polar_data.push(PolarDatum {
                    xi: Complex64::new(row[0], 0.0),
                    poly: row[1..].to_vec(),
                });
            }

            let shape_file: ShapeFile = read_json(shape)?;
            let shape = FunctionalEquationShape::new(
                shape_file.delta,
                shape_file
                    .factors
                    .iter()
                    .map(|f| GammaFactor::new(f.alpha, Complex64::new(f.beta[0], f.beta[1])))
                    .collect(),
            )?;
            let dual_file: DualBoundFile = read_json(dual_bound)?;
            let dual = DualBoundSpec::new(
                dual_file.c_psi,
                dual_file.c_psi_prime,
                dual_file.r,
                dual_file.r_prime,
                &shape,
            )?;

            let series = CoefficientSeries::new(support, coeffs)?.with_polar_data(polar_data);
            let grid = parse_grid(xgrid)?;
            let eta_val = if eta.trim() == "auto" {
                let mid = (grid[0] * grid[grid.len() - 1]).sqrt();
                landau::auto_eta(&series, &shape, &dual, mid)?
            } else {
                eta.trim()
                    .parse()
                    .map_err(|_| Error::Domain(format!("invalid eta {:?}", eta)))?
            };
            let k = landau::minimal_k(&shape, &dual)?;

            writeln!(out, "x,partial_sum,main_term,abs_error,envelope,ratio").unwrap();
            for &x in &grid {
                let a0 = series.partial_sum(&x);
                let s0 = series.polar_sum(x);
                let abs_err = (a0 - s0).abs();
                let env = if series.is_nonnegative() {
                    landau::uniform_error_bound(&series, &shape, &dual, x, eta_val)?
                } else {
                    landau::uniform_error_bound_general(&series, &shape, &dual, x, eta_val)?
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    harness::fmt_float(x),
                    harness::fmt_float(a0),
                    harness::fmt_float(s0),
                    harness::fmt_float(abs_err),
                    harness::fmt_float(env),
                    harness::fmt_float(abs_err / env)
                )
                .unwrap();
            }
            writeln!(out, "# eta={}", harness::fmt_float(eta_val)).unwrap();
            writeln!(out, "# smoothing_order={}", k).unwrap();
        }
        Command::EpsteinExperiment {
            lattice,
            random,
            rgrid,
        } => {
            let lattices: Vec<Lattice> = match (lattice, random) {
                (Some(path), None) => vec![read_lattice(path)?],
                (None, Some(spec)) => {
                    let (dim, count, entry_bound) = parse_random_family(spec)?;
                    let mut rng = SplitMix64::new(cli.seed);
                    let mut v = Vec::with_capacity(count);
                    for _ in 0..count {
                        v.push(harness::random_lattice(dim, entry_bound, &mut rng)?);
                    }
                    v
                }
                _ => {
                    return Err(Error::Domain(
                        "provide exactly one of --lattice or --random".into(),
                    ))
                }
            };
            let radii: Vec<BigRational> = parse_grid(rgrid)?
                .into_iter()
                .map(|r| {
                    BigRational::from_float(r)
                        .ok_or_else(|| Error::Domain("non-finite radius".into()))
                })
                .collect::<Result<_>>()?;

            writeln!(out, "radius,exact,main,error,envelope,ratio").unwrap();
            for (i, lat) in lattices.iter().enumerate() {
                let spec = epstein::build_spec(lat)?;
                if lattices.len() > 1 {
                    writeln!(
                        out,
                        "# lattice={} det={} r_bas_upper={}",
                        i,
                        harness::fmt_float(spec.determinant()),
                        harness::fmt_float(spec.profile.r_bas_upper)
                    )
                    .unwrap();
                }
                let exp = epstein::run_experiment(&spec, &radii, threads)?;
                for row in &exp.rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        harness::fmt_float(row.radius),
                        row.exact,
                        harness::fmt_float(row.main),
                        harness::fmt_float(row.error),
                        harness::fmt_float(row.envelope),
                        harness::fmt_float(row.ratio)
                    )
                    .unwrap();
                }
                match &exp.summary.fit {
                    Some(fit) => writeln!(
                        out,
                        "# slope={} intercept={} max_ratio={} fitted_constant={} dropped={}",
                        harness::fmt_float(fit.slope),
                        harness::fmt_float(fit.intercept),
                        harness::fmt_float(exp.summary.max_ratio),
                        harness::fmt_float(exp.summary.fitted_constant),
                        fit.dropped
                    )
                    .unwrap(),
                    None => writeln!(
                        out,
                        "# slope=nan intercept=nan max_ratio={} fitted_constant={} dropped=0",
                        harness::fmt_float(exp.summary.max_ratio),
                        harness::fmt_float(exp.summary.fitted_constant),
                    )
                    .unwrap(),
                }
            }
        }
        Command::DedekindExperiment {
            disc_range,
            xgrid,
            tol,
        } => {
            let (lo, hi) = disc_range.split_once(':').ok_or_else(|| {
                Error::Domain(format!("range must be lo:hi, got {:?}", disc_range))
            })?;
            let lo: i64 = lo
                .parse()
                .map_err(|_| Error::Domain(format!("invalid range start {:?}", lo)))?;
            let hi: i64 = hi
                .parse()
                .map_err(|_| Error::Domain(format!("invalid range end {:?}", hi)))?;
            let mut xs: Vec<u64> = parse_grid(xgrid)?
                .into_iter()
                .map(|x| x.round() as u64)
                .collect();
            xs.dedup();
            let rows = dedekind::dedekind_experiment(lo, hi, &xs, *tol)?;
            writeln!(out, "disc,x,count,main,error,envelope,ratio").unwrap();
            let mut flagged = 0usize;
            for row in &rows {
                let ratio = match row.ratio {
                    Some(r) => harness::fmt_float(r),
                    None => {
                        flagged += 1;
                        String::new()
                    }
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    row.disc,
                    row.x,
                    row.count,
                    harness::fmt_float(row.main),
                    harness::fmt_float(row.error),
                    harness::fmt_float(row.envelope),
                    ratio
                )
                .unwrap();
            }
            writeln!(out, "# flagged={}", flagged).unwrap();
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {}", e);
                    return ExitCode::FAILURE;
                }
            } else {
                print!("{}", text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}
