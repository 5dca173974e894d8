//! The orbit matrix of a polynomial and the triangle certificate for
//! `tau(f) <= 2 deg(f)^1.5 + 1`.
//!
//! For `f` with `f(0) = 1` and `2^(n-1) <= deg f < 2^n`, row `i` of the
//! matrix holds the coefficients of `[P^i(f)]`, highest exponent first. Rows
//! are periodic with period `2^n`, and each `T^k(f)` is a prefix of row
//! `k mod 2^n`. Every stretch of the orbit spent at one degree `j` marks a
//! vertical run of ones in column `j`; the cells to the left of that run form
//! a triangle of forced zeros. The triangles are disjoint, so their sizes add
//! up to at most `2^n deg f`, and Cauchy-Schwarz turns that into the bound.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::bitmatrix::BitMatrix;
use crate::gf2poly::Gf2Poly;
use crate::maps::{self, MapError, MapKind, StepCount};

/// Largest degree [`OrbitMatrix::build`] accepts (4096 rows of 4097 bits).
pub const MAX_BUILD_DEGREE: u64 = 4096;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("the zero polynomial has no orbit matrix")]
    ZeroInput,
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("degree {0} exceeds the orbit matrix limit {MAX_BUILD_DEGREE}")]
    DegreeTooLarge(u64),
    #[error("expected degree {expected}, matrix was built for degree {actual}")]
    ShapeMismatch { expected: u64, actual: u64 },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `A^f`: `2^n` rows, `deg f + 1` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMatrix {
    f: Gf2Poly,
    degree: u64,
    log_rows: u32,
    rows: Vec<Gf2Poly>,
}

impl OrbitMatrix {
    pub fn build(f: &Gf2Poly) -> Result<Self, OrbitError> {
        let degree = f.degree().finite().ok_or(OrbitError::ZeroInput)?;
        if !f.constant_term() {
            return Err(OrbitError::NotApplicable("orbit matrix needs f(0) = 1"));
        }
        if degree == 0 {
            return Err(OrbitError::NotApplicable("orbit matrix needs deg f >= 1"));
        }
        if degree > MAX_BUILD_DEGREE {
            return Err(OrbitError::DegreeTooLarge(degree));
        }
        let log_rows = 64 - degree.leading_zeros();
        let mut rows = Vec::with_capacity(1 << log_rows);
        let mut g = f.clone();
        for _ in 0..1u64 << log_rows {
            let next = g.suffix_parity();
            rows.push(g);
            g = next;
        }
        Ok(OrbitMatrix {
            f: f.clone(),
            degree,
            log_rows,
            rows,
        })
    }

    pub fn poly(&self) -> &Gf2Poly {
        &self.f
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// `n` with `2^(n-1) <= deg f < 2^n`.
    pub fn log_rows(&self) -> u32 {
        self.log_rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.degree as usize + 1
    }

    /// `a_{i,j}`: coefficient of `x^(deg f - j)` in `[P^i(f)]`, rows mod `2^n`.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i % self.rows.len()].coeff(self.degree - j as u64)
    }

    /// `[P^i(f)]` for `i < 2^n`.
    pub fn row_poly(&self, i: usize) -> &Gf2Poly {
        &self.rows[i]
    }

    pub fn to_bit_matrix(&self) -> BitMatrix {
        BitMatrix::from_fn(self.num_rows(), self.num_cols(), |i, j| self.entry(i, j))
    }
}

/// Cells of `Delta_j`: the stay of the orbit at degree `column` between
/// steps `first` and `last`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub column: u64,
    pub first: u64,
    pub last: u64,
}

impl Triangle {
    pub fn length(&self) -> u64 {
        self.last - self.first + 1
    }

    /// `(l mod rows, column - d)` for `first <= l <= last`, `0 <= d <= l - first`.
    /// Cells that would fall left of column 0 are dropped, which the size
    /// check in [`Decomposition::check`] then reports.
    pub fn cells(&self, rows: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in self.first..=self.last {
            for d in 0..=(l - self.first) {
                if let Some(col) = self.column.checked_sub(d) {
                    out.push(((l % rows as u64) as usize, col as usize));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub matrix: OrbitMatrix,
    /// `(k mod 2^n, deg T^k(f))` for `k < tau(f)`.
    pub marks: Vec<(usize, usize)>,
    /// One triangle per visited column, in orbit order (descending column).
    pub triangles: Vec<Triangle>,
    pub orbit: Vec<Gf2Poly>,
    pub tau: StepCount,
}

/// Outcome of every structural claim about one decomposition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureReport {
    pub row_recurrence: bool,
    pub periodic: bool,
    pub row_readout: bool,
    pub marks_are_one: bool,
    pub every_column_visited: bool,
    pub triangle_sizes: bool,
    pub interiors_zero: bool,
    pub disjoint: bool,
    pub lengths_sum_to_tau: bool,
    pub cells_fit_matrix: bool,
}

impl StructureReport {
    pub fn all_hold(&self) -> bool {
        self.row_recurrence
            && self.periodic
            && self.row_readout
            && self.marks_are_one
            && self.every_column_visited
            && self.triangle_sizes
            && self.interiors_zero
            && self.disjoint
            && self.lengths_sum_to_tau
            && self.cells_fit_matrix
    }
}

/// Marks, triangles and stopping time of `f` under `T`.
pub fn decompose(f: &Gf2Poly) -> Result<Decomposition, OrbitError> {
    let matrix = OrbitMatrix::build(f)?;
    let orbit = maps::orbit(f, MapKind::T, None)?;
    let tau = orbit.len() as StepCount - 1;
    let rows = matrix.num_rows();
    let degrees: Vec<u64> = orbit
        .iter()
        .map(|g| g.degree().finite().expect("orbit elements are non-zero"))
        .collect();
    let marks = degrees[..tau as usize]
        .iter()
        .enumerate()
        .map(|(k, &d)| (k % rows, d as usize))
        .collect();
    let mut triangles = Vec::new();
    for column in (1..=matrix.degree).rev() {
        let mut visits = degrees[..tau as usize]
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == column)
            .map(|(k, _)| k as u64);
        if let Some(first) = visits.next() {
            let last = visits.last().unwrap_or(first);
            triangles.push(Triangle {
                column,
                first,
                last,
            });
        }
    }
    Ok(Decomposition {
        matrix,
        marks,
        triangles,
        orbit,
        tau,
    })
}

impl Decomposition {
    /// Checks every structural invariant of the matrix and triangles.
    pub fn check(&self) -> StructureReport {
        let a = &self.matrix;
        let (rows, cols) = (a.num_rows(), a.num_cols());
        let deg = a.degree();

        let row_recurrence = (0..rows).all(|i| {
            (0..cols - 1).all(|j| {
                a.entry(i, j) == (a.entry(i, j + 1) ^ a.entry((i + rows - 1) % rows, j + 1))
            })
        });
        let periodic = a.row_poly(rows - 1).suffix_parity() == *a.poly();

        let row_readout = self.orbit.iter().enumerate().all(|(k, g)| {
            let dk = g.degree().finite().unwrap();
            (0..=dk).all(|j| a.entry(k % rows, j as usize) == g.coeff(dk - j))
        });

        let marks_are_one = self.marks.iter().all(|&(i, j)| a.entry(i, j));
        let every_column_visited = self.triangles.len() as u64 == deg;

        let mut triangle_sizes = true;
        let mut interiors_zero = true;
        let mut cells_fit_matrix = true;
        let mut seen = HashSet::new();
        let mut disjoint = true;
        for t in &self.triangles {
            let cells = t.cells(rows);
            let len = t.length();
            if cells.len() as u64 != len * (len + 1) / 2 {
                triangle_sizes = false;
            }
            if t.length() > rows as u64 {
                cells_fit_matrix = false;
            }
            for &(i, j) in &cells {
                if j < t.column as usize && a.entry(i, j) {
                    interiors_zero = false;
                }
                if !seen.insert((i, j)) {
                    disjoint = false;
                }
            }
        }
        let lengths_sum_to_tau =
            self.triangles.iter().map(Triangle::length).sum::<u64>() == self.tau;

        StructureReport {
            row_recurrence,
            periodic,
            row_readout,
            marks_are_one,
            every_column_visited,
            triangle_sizes,
            interiors_zero,
            disjoint,
            lengths_sum_to_tau,
            cells_fit_matrix,
        }
    }

    /// Cells lying in some triangle and holding 0.
    pub fn striped_cells(&self) -> HashSet<(usize, usize)> {
        let rows = self.matrix.num_rows();
        self.triangles
            .iter()
            .flat_map(|t| t.cells(rows))
            .filter(|&(i, j)| !self.matrix.entry(i, j))
            .collect()
    }
}

/// The Cauchy-Schwarz chain for `f(0) = 1`:
/// `tau^2 = (sum l)^2 <= deg * sum l^2 <= 2 deg * sum l(l+1)/2
///  <= 2 deg * 2^n deg <= 4 deg^3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleChain {
    pub degree: u64,
    pub log_rows: u32,
    pub tau: u64,
    pub sum_lengths: u64,
    pub sum_squares: u64,
    pub sum_cells: u64,
    /// `2^n * deg f`.
    pub capacity: u64,
}

impl TriangleChain {
    /// Each link of the chain, in order.
    pub fn links(&self) -> [(&'static str, u128, u128); 6] {
        let d = self.degree as u128;
        let tau = self.tau as u128;
        [
            ("sum of lengths = tau", self.sum_lengths as u128, tau),
            ("sum of triangle cells <= 2^n deg", self.sum_cells as u128, self.capacity as u128),
            ("tau^2 <= deg * sum l^2", tau * tau, d * self.sum_squares as u128),
            (
                "deg * sum l^2 <= 2 deg * sum cells",
                d * self.sum_squares as u128,
                2 * d * self.sum_cells as u128,
            ),
            (
                "2 deg * sum cells <= 2 deg * 2^n deg",
                2 * d * self.sum_cells as u128,
                2 * d * self.capacity as u128,
            ),
            ("2 deg * 2^n deg <= 4 deg^3", 2 * d * self.capacity as u128, 4 * d * d * d),
        ]
    }

    pub fn holds(&self) -> bool {
        let links = self.links();
        links[0].1 == links[0].2 && links[1..].iter().all(|&(_, lhs, rhs)| lhs <= rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundRoute {
    /// `f = 1`.
    One,
    /// `f(0) = 1`, `deg f >= 1`.
    Triangles(TriangleChain),
    /// `f(0) = 0`: `T^k(f)(0) = 0` for a maximal `k < tau`, then
    /// `tau(f) = k + 1 + tau(T^(k+1) f)` with `deg T^(k+1) f <= deg f - k`.
    Reduction {
        prefix_steps: u64,
        prefix_degree_drops: bool,
        inner_degree: u64,
        inner: Box<CertifiedBound>,
        /// `k + 1 + 2 (deg f - k)^1.5`.
        reduced_bound: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedBound {
    pub degree: u64,
    pub tau: StepCount,
    pub route: BoundRoute,
}

impl CertifiedBound {
    /// `2 deg^1.5 + 1`.
    pub fn bound(&self) -> f64 {
        2.0 * (self.degree as f64).powf(1.5) + 1.0
    }

    /// Whether `tau <= 2 deg^1.5 + 1` in exact integer arithmetic.
    pub fn tau_within_bound(&self) -> bool {
        let d = self.degree as u128;
        self.tau <= 1 || {
            let t = self.tau as u128 - 1;
            t * t <= 4 * d * d * d
        }
    }

    /// Whether the whole chain of inequalities holds.
    pub fn holds(&self) -> bool {
        let route_ok = match &self.route {
            BoundRoute::One => self.tau == 0,
            BoundRoute::Triangles(chain) => chain.holds(),
            BoundRoute::Reduction {
                prefix_steps,
                prefix_degree_drops,
                inner_degree,
                inner,
                reduced_bound,
            } => {
                *prefix_degree_drops
                    && *inner_degree + prefix_steps <= self.degree
                    && inner.holds()
                    && self.tau == prefix_steps + 1 + inner.tau
                    && (self.tau as f64) <= *reduced_bound + 1e-9
                    && *reduced_bound <= self.bound() + 1e-9
            }
        };
        route_ok && self.tau_within_bound()
    }
}

impl fmt::Display for CertifiedBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tau={} deg={} bound={:.3} ",
            self.tau,
            self.degree,
            self.bound()
        )?;
        match &self.route {
            BoundRoute::One => write!(f, "route=one"),
            BoundRoute::Triangles(c) => write!(
                f,
                "route=triangles sum_l={} sum_l2={} cells={} capacity={}",
                c.sum_lengths, c.sum_squares, c.sum_cells, c.capacity
            ),
            BoundRoute::Reduction {
                prefix_steps,
                inner,
                ..
            } => write!(f, "route=reduction k={prefix_steps} inner=({inner})"),
        }
    }
}

/// Certifies `tau(f) <= 2 deg(f)^1.5 + 1` with all intermediate numbers.
pub fn certify_bound(f: &Gf2Poly) -> Result<CertifiedBound, OrbitError> {
    let degree = f.degree().finite().ok_or(OrbitError::ZeroInput)?;
    if f.is_one() {
        return Ok(CertifiedBound {
            degree,
            tau: 0,
            route: BoundRoute::One,
        });
    }
    if f.constant_term() {
        let dec = decompose(f)?;
        let lengths: Vec<u64> = dec.triangles.iter().map(Triangle::length).collect();
        let chain = TriangleChain {
            degree,
            log_rows: dec.matrix.log_rows(),
            tau: dec.tau,
            sum_lengths: lengths.iter().sum(),
            sum_squares: lengths.iter().map(|l| l * l).sum(),
            sum_cells: lengths.iter().map(|l| l * (l + 1) / 2).sum(),
            capacity: (dec.matrix.num_rows() as u64) * degree,
        };
        return Ok(CertifiedBound {
            degree,
            tau: dec.tau,
            route: BoundRoute::Triangles(chain),
        });
    }
    let orbit = maps::orbit(f, MapKind::T, None)?;
    let tau = orbit.len() as u64 - 1;
    let k = orbit[..tau as usize]
        .iter()
        .rposition(|g| !g.constant_term())
        .expect("f(0) = 0 is itself such an index") as u64;
    let prefix_degree_drops = orbit[k as usize].degree() == crate::gf2poly::Degree::Finite(degree - k);
    let inner_poly = &orbit[k as usize + 1];
    let inner = certify_bound(inner_poly)?;
    let reduced_bound = k as f64 + 1.0 + 2.0 * ((degree - k) as f64).powf(1.5);
    Ok(CertifiedBound {
        degree,
        tau,
        route: BoundRoute::Reduction {
            prefix_steps: k,
            prefix_degree_drops,
            inner_degree: inner.degree,
            inner: Box::new(inner),
            reduced_bound,
        },
    })
}

/// `U(A)_{i,j} = a_{(d - i - j) mod 2^n, j}`.
pub fn u_transform(a: &OrbitMatrix, d: u64) -> Result<BitMatrix, OrbitError> {
    if d != a.degree() {
        return Err(OrbitError::ShapeMismatch {
            expected: d,
            actual: a.degree(),
        });
    }
    let rows = a.num_rows() as i64;
    Ok(BitMatrix::from_fn(a.num_rows(), a.num_cols(), |i, j| {
        let r = (d as i64 - i as i64 - j as i64).rem_euclid(rows);
        a.entry(r as usize, j)
    }))
}

/// Reads row `i` of a matrix as coefficients, column 0 the highest.
pub fn row_as_poly(m: &BitMatrix, i: usize) -> Gf2Poly {
    let top = m.cols() as u64 - 1;
    Gf2Poly::from_exponents((0..m.cols()).filter(|&j| m.get(i, j)).map(|j| top - j as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Pgm,
}

impl FromStr for ImageFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ppm" => Ok(ImageFormat::Ppm),
            "pgm" => Ok(ImageFormat::Pgm),
            _ => Err(format!("unknown image format {s:?} (expected ppm or pgm)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageSummary {
    pub width: usize,
    pub height: usize,
    pub marked: usize,
    pub striped: usize,
    pub bytes: usize,
}

const ORANGE: [u8; 3] = [255, 165, 0];
const MARK_GRAY: u8 = 200;
const STRIPE_GRAY: u8 = 128;

/// Encodes the orbit matrix image: ones white, zeros black, marked cells
/// orange (gray 200), zero cells inside a triangle striped by `(i + j)`
/// parity (gray 128).
pub fn render_bytes(f: &Gf2Poly, format: ImageFormat) -> Result<(Vec<u8>, ImageSummary), OrbitError> {
    let dec = decompose(f)?;
    let a = &dec.matrix;
    let (h, w) = (a.num_rows(), a.num_cols());
    let marks: HashSet<(usize, usize)> = dec.marks.iter().copied().collect();
    let striped = dec.striped_cells();
    let header = match format {
        ImageFormat::Ppm => format!("P6\n{w} {h}\n255\n"),
        ImageFormat::Pgm => format!("P5\n{w} {h}\n255\n"),
    };
    let mut out = header.into_bytes();
    for i in 0..h {
        for j in 0..w {
            let value = if marks.contains(&(i, j)) {
                match format {
                    ImageFormat::Ppm => ORANGE,
                    ImageFormat::Pgm => [MARK_GRAY; 3],
                }
            } else if striped.contains(&(i, j)) {
                match format {
                    ImageFormat::Ppm if (i + j) % 2 == 0 => [255; 3],
                    ImageFormat::Ppm => [0; 3],
                    ImageFormat::Pgm => [STRIPE_GRAY; 3],
                }
            } else if a.entry(i, j) {
                [255; 3]
            } else {
                [0; 3]
            };
            match format {
                ImageFormat::Ppm => out.extend_from_slice(&value),
                ImageFormat::Pgm => out.push(value[0]),
            }
        }
    }
    let summary = ImageSummary {
        width: w,
        height: h,
        marked: marks.len(),
        striped: striped.len(),
        bytes: out.len(),
    };
    Ok((out, summary))
}

pub fn render(f: &Gf2Poly, out: &Path, format: ImageFormat) -> Result<ImageSummary, OrbitError> {
    let (bytes, summary) = render_bytes(f, format)?;
    fs::write(out, bytes)?;
    Ok(summary)
}
