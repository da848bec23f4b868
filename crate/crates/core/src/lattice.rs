//! Exact lattice bases over the rationals: determinants, duals, LLL
//! reduction, successive minima, and two-sided brackets for the smallest
//! radius containing a basis.
//!
//! A `Lattice` stores a d x d invertible matrix whose *columns* are the
//! basis vectors. All derived quantities that admit exact values
//! (determinant, Gram matrix, squared minima) are computed in `BigRational`
//! arithmetic; square roots are taken only at the reporting boundary.

use crate::enumerate;
use crate::error::{Error, Result};
use crate::matq::{self, IntMat, RatMat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default dimension cap for enumeration-backed operations. The exact
/// enumerations here are verification tools, not production SVP solvers;
/// callers that need more use the `_capped` variants.
pub const ENUM_DIM_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    rows: RatMat,  // row-major; column j is the j-th basis vector
    scale: BigInt, // positive; scale * rows is integral
    det_abs: BigRational,
}

impl Lattice {
    /// Builds a lattice from the row-major matrix whose columns are the
    /// basis vectors. Rejects non-square and singular input.
    pub fn from_rows(rows: RatMat) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidLattice("empty basis".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidLattice(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    dim
                )));
            }
        }
        let det = matq::det(&rows);
        if det.is_zero() {
            return Err(Error::InvalidLattice("basis matrix is singular".into()));
        }
        let mut scale = BigInt::one();
        for row in &rows {
            for e in row {
                scale = scale.lcm(e.denom());
            }
        }
        Ok(Lattice {
            dim,
            rows,
            scale,
            det_abs: det.abs(),
        })
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| matq::rat_int(v)).collect())
                .collect(),
        )
    }

    /// Standard integer lattice Z^d.
    pub fn standard(dim: usize) -> Self {
        Self::from_rows(matq::identity(dim)).expect("identity basis is valid")
    }

    /// Lattice with orthogonal basis vectors of the given lengths.
    pub fn diagonal(entries: &[BigRational]) -> Result<Self> {
        let d = entries.len();
        let mut rows = matq::identity(d);
        for (i, e) in entries.iter().enumerate() {
            rows[i][i] = e.clone();
        }
        Self::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &RatMat {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    /// Column j as a vector (the j-th basis vector).
    pub fn basis_vector(&self, j: usize) -> Vec<BigRational> {
        (0..self.dim).map(|i| self.rows[i][j].clone()).collect()
    }

    /// |det| of the basis matrix; the covolume of the lattice.
    pub fn determinant(&self) -> &BigRational {
        &self.det_abs
    }

    /// Smallest positive integer clearing all denominators of the basis.
    pub fn scale_denominator(&self) -> &BigInt {
        &self.scale
    }

    /// scale * basis as an integer matrix (row-major).
    pub fn scaled_integer_basis(&self) -> IntMat {
        let s = BigRational::from_integer(self.scale.clone());
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        let v = e * &s;
                        debug_assert!(v.is_integer());
                        v.to_integer()
                    })
                    .collect()
            })
            .collect()
    }

    /// Gram matrix G = L^T L of exact pairwise inner products of basis
    /// vectors.
    pub fn gram(&self) -> RatMat {
        let mut g = vec![vec![BigRational::zero(); self.dim]; self.dim];
        for i in 0..self.dim {
            for j in i..self.dim {
                let mut acc = BigRational::zero();
                for k in 0..self.dim {
                    acc = acc + &self.rows[k][i] * &self.rows[k][j];
                }
                g[i][j] = acc.clone();
                g[j][i] = acc;
            }
        }
        g
    }

    /// Dual lattice with basis (L^T)^{-1}. det(dual) * det(self) = 1.
    pub fn dual(&self) -> Lattice {
        let inv = matq::invert(&matq::transpose(&self.rows)).expect("lattice basis is invertible");
        Lattice::from_rows(inv).expect("dual basis is invertible")
    }

    /// Uniformly scaled copy c * lattice, c > 0.
    pub fn scaled_by(&self, c: &BigRational) -> Result<Lattice> {
        if !c.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Lattice::from_rows(
            self.rows
                .iter()
                .map(|row| row.iter().map(|e| e * c).collect())
                .collect(),
        )
    }

    /// Point-set equality: same dimension and the scaled integer bases have
    /// identical Hermite normal forms over a common denominator.
    pub fn same_point_set(&self, other: &Lattice) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let common = self.scale.lcm(&other.scale);
        let gens = |lat: &Lattice| -> IntMat {
            let f = BigRational::from_integer(common.clone());
            let scaled: RatMat = lat
                .rows
                .iter()
                .map(|row| row.iter().map(|e| e * &f).collect())
                .collect();
            let int_rows: IntMat = scaled
                .iter()
                .map(|row| row.iter().map(|e| e.to_integer()).collect())
                .collect();
            // generators as rows: transpose so each basis vector is a row
            matq::int_transpose(&int_rows)
        };
        matq::hnf_rows(&gens(self)) == matq::hnf_rows(&gens(other))
    }

    /// Serializes to the plain text format understood by `parse_text`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the lattice text format: first line is the dimension d, the
    /// next d lines carry d whitespace-separated rationals ("p/q" or a plain
    /// integer), row by row; columns are basis vectors. Errors carry the
    /// offending line and token column.
    pub fn parse_text(src: &str) -> Result<Lattice> {
        let mut lines = src
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (dline_no, dline) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            col: 1,
            msg: "empty input".into(),
        })?;
        let dim: usize = dline.trim().parse().map_err(|_| Error::Parse {
            line: dline_no + 1,
            col: 1,
            msg: format!("expected dimension, found {:?}", dline.trim()),
        })?;
        if dim == 0 {
            return Err(Error::Parse {
                line: dline_no + 1,
                col: 1,
                msg: "dimension must be positive".into(),
            });
        }
        let mut rows: RatMat = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
                line: dline_no + 1 + rows.len() + 1,
                col: 1,
                msg: format!("expected {} basis rows, found {}", dim, rows.len()),
            })?;
            let mut row = Vec::with_capacity(dim);
            for (col, tok) in line.split_whitespace().enumerate() {
                let v: BigRational = tok.parse().map_err(|_| Error::Parse {
                    line: line_no + 1,
                    col: col + 1,
                    msg: format!("invalid rational {:?}", tok),
                })?;
                row.push(v);
            }
            if row.len() != dim {
                return Err(Error::Parse {
                    line: line_no + 1,
                    col: row.len() + 1,
                    msg: format!("expected {} entries, found {}", dim, row.len()),
                });
            }
            rows.push(row);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse {
                line: line_no + 1,
                col: 1,
                msg: "trailing data after basis rows".into(),
            });
        }
        Lattice::from_rows(rows).map_err(|e| match e {
            Error::InvalidLattice(msg) => Error::Parse {
                line: dline_no + 1,
                col: 1,
                msg,
            },
            other => other,
        })
    }

    fn columns(&self) -> Vec<Vec<BigRational>> {
        (0..self.dim).map(|j| self.basis_vector(j)).collect()
    }

    fn from_columns(cols: Vec<Vec<BigRational>>) -> Result<Lattice> {
        let d = cols.len();
        let rows = (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect();
        Lattice::from_rows(rows)
    }
}

/// Default LLL parameter delta = 3/4.
pub fn lll_default_delta() -> BigRational {
    BigRational::new(BigInt::from(3), BigInt::from(4))
}

/// LLL reduction with exact rational arithmetic. `delta` must lie in
/// (1/4, 1). The output generates the same point set; only the basis
/// changes.
pub fn lll_reduce(lat: &Lattice, delta: &BigRational) -> Result<Lattice> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    if *delta <= quarter || *delta >= BigRational::one() {
        return Err(Error::Domain(format!(
            "LLL delta must lie in (1/4, 1), got {}",
            delta
        )));
    }
    let mut cols = lat.columns();
    lll_in_place(&mut cols, delta);
    let out = Lattice::from_columns(cols)?;
    debug_assert!(out.same_point_set(lat));
    Ok(out)
}

/// Gram-Schmidt data: mu[i][j] for j < i, and squared norms of the
/// orthogonalized vectors.
fn gso_mu(cols: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = cols.len();
    let d = cols[0].len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = cols[i].clone();
        for j in 0..i {
            let mut dot = BigRational::zero();
            for k in 0..d {
                dot = dot + &cols[i][k] * &star[j][k];
            }
            let m = dot / &norms[j];
            for k in 0..d {
                v[k] = &v[k] - &m * &star[j][k];
            }
            mu[i][j] = m;
        }
        let mut nrm = BigRational::zero();
        for k in 0..d {
            nrm = nrm + &v[k] * &v[k];
        }
        star.push(v);
        norms.push(nrm);
    }
    (mu, norms)
}

fn lll_in_place(cols: &mut Vec<Vec<BigRational>>, delta: &BigRational) {
    let n = cols.len();
    if n <= 1 {
        return;
    }
    let d = cols[0].len();
    let (mut mu, mut norms) = gso_mu(cols);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let q = matq::round_nearest(&mu[k][j]);
            if q.is_zero() {
                continue;
            }
            let qr = BigRational::from_integer(q);
            for i in 0..d {
                cols[k][i] = &cols[k][i] - &qr * &cols[j][i];
            }
            for l in 0..=j {
                let adj = if l == j {
                    qr.clone() // mu[j][j] = 1
                } else {
                    &qr * &mu[j][l]
                };
                mu[k][l] = &mu[k][l] - adj;
            }
        }
        // Lovasz condition at index k.
        let gap = delta - &mu[k][k - 1] * &mu[k][k - 1];
        if norms[k] >= gap * &norms[k - 1] {
            k += 1;
        } else {
            cols.swap(k, k - 1);
            let fresh = gso_mu(cols);
            mu = fresh.0;
            norms = fresh.1;
            k = k.max(2) - 1;
        }
    }
}

/// Squared successive minima, exact. Enumerates vectors inside a ball whose
/// radius grows geometrically until d linearly independent vectors appear,
/// then selects greedily by (norm, lexicographic coefficient order).
pub fn successive_minima_sq(lat: &Lattice) -> Result<Vec<BigRational>> {
    successive_minima_sq_capped(lat, ENUM_DIM_CAP)
}

pub fn successive_minima_sq_capped(lat: &Lattice, cap: usize) -> Result<Vec<BigRational>> {
    if lat.dim() > cap {
        return Err(Error::DimensionTooLarge {
            dim: lat.dim(),
            cap,
        });
    }
    let red = lll_reduce(lat, &lll_default_delta())?;
    let gram = red.gram();
    let basis_norms: Vec<BigRational> = (0..red.dim()).map(|i| gram[i][i].clone()).collect();
    let bound_max = basis_norms.iter().max().expect("nonempty").clone();
    let mut bound = basis_norms.iter().min().expect("nonempty").clone();
    loop {
        let mut pts = enumerate::collect_up_to(&red, &bound)?;
        pts.sort();
        if let Some(sel) = greedy_independent(&pts, red.dim()) {
            return Ok(sel);
        }
        if bound >= bound_max {
            // The reduced basis vectors themselves lie within bound_max and
            // are independent, so this point is unreachable.
            return Err(Error::InvalidLattice(
                "failed to find independent vectors within basis radius".into(),
            ));
        }
        bound = (&bound * matq::rat_int(4)).min(bound_max.clone());
    }
}

/// Successive minima as lengths (floating point at the reporting boundary).
pub fn successive_minima(lat: &Lattice) -> Result<Vec<f64>> {
    Ok(successive_minima_sq(lat)?
        .iter()
        .map(|sq| sq.to_f64().expect("finite").sqrt())
        .collect())
}

/// Greedy selection of d independent coefficient vectors from a
/// (norm, coeffs)-sorted list. Returns the squared minima when d are found.
fn greedy_independent(pts: &[(BigRational, Vec<BigInt>)], d: usize) -> Option<Vec<BigRational>> {
    let mut echelon: Vec<Vec<BigRational>> = Vec::new();
    let mut minima = Vec::new();
    for (norm, coeffs) in pts {
        let mut v: Vec<BigRational> = coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        for row in &echelon {
            let pos = row.iter().position(|e| !e.is_zero()).expect("nonzero row");
            if v[pos].is_zero() {
                continue;
            }
            let f = &v[pos] / &row[pos];
            for i in 0..d {
                v[i] = &v[i] - &f * &row[i];
            }
        }
        if v.iter().any(|e| !e.is_zero()) {
            echelon.push(v);
            minima.push(norm.clone());
            if minima.len() == d {
                return Some(minima);
            }
        }
    }
    None
}

/// Exact squared bracket for the smallest radius r_bas whose open ball
/// contains some basis: lower end is the last successive minimum, upper end
/// the longest vector of an LLL-reduced basis.
pub fn r_bas_bounds_sq(lat: &Lattice) -> Result<(BigRational, BigRational)> {
    let minima = successive_minima_sq(lat)?;
    let lower = minima.last().expect("nonempty").clone();
    let red = lll_reduce(lat, &lll_default_delta())?;
    let gram = red.gram();
    let upper = (0..red.dim())
        .map(|i| gram[i][i].clone())
        .max()
        .expect("nonempty");
    debug_assert!(lower <= upper);
    Ok((lower, upper))
}

/// (lower, upper) bracket for r_bas as lengths.
pub fn r_bas_bounds(lat: &Lattice) -> Result<(f64, f64)> {
    let (lo, hi) = r_bas_bounds_sq(lat)?;
    Ok((
        lo.to_f64().expect("finite").sqrt(),
        hi.to_f64().expect("finite").sqrt(),
    ))
}

/// Summary of the exact geometry of a lattice: covolume, successive minima
/// and the r_bas bracket. Squared fields carry the exact values backing the
/// floating-point ones.
#[derive(Clone, Debug)]
pub struct LatticeProfile {
    pub determinant: BigRational,
    pub lambda: Vec<f64>,
    pub lambda_sq: Vec<BigRational>,
    pub r_bas_lower: f64,
    pub r_bas_upper: f64,
    pub r_bas_upper_sq: BigRational,
}

impl LatticeProfile {
    pub fn compute(lat: &Lattice) -> Result<Self> {
        let lambda_sq = successive_minima_sq(lat)?;
        let lambda: Vec<f64> = lambda_sq
            .iter()
            .map(|sq| sq.to_f64().expect("finite").sqrt())
            .collect();
        let (_, upper_sq) = r_bas_bounds_sq(lat)?;
        let r_bas_lower = *lambda.last().expect("nonempty");
        let r_bas_upper = upper_sq.to_f64().expect("finite").sqrt();
        Ok(LatticeProfile {
            determinant: lat.determinant().clone(),
            lambda,
            lambda_sq,
            r_bas_lower,
            r_bas_upper,
            r_bas_upper_sq: upper_sq,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }
}
