//! The map `T_p` on `F_p[x]` for a prime `p`:
//!
//! * `f(-1) = f(0) != 0`: `(x f + f(-1)) / (x+1)`
//! * otherwise: `(f - f(-1)) / (x+1)`
//!
//! Both numerators vanish at `-1`. `tau_p(f)` counts steps until the degree
//! reaches 0.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::StepCount;
use crate::rng::{self, Seed};

/// Above this many inputs per degree the survey samples instead of enumerating.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FpError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the zero polynomial has no T_p orbit")]
    ZeroInput,
    #[error("numerator not divisible by x+1 (remainder {remainder})")]
    InternalNotDivisible { remainder: u64 },
    #[error("no constant reached within {limit} steps")]
    LimitExceeded { limit: StepCount },
    #[error("coefficient {coeff} is not reduced mod {p}")]
    BadCoefficient { coeff: u64, p: u64 },
    #[error("survey needs max_deg >= 1")]
    NoDegrees,
    #[error("sampling needs at least one sample (degree {degree} is too large to enumerate)")]
    SamplesZero { degree: u64 },
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial over `Z/p`, `coeffs[k]` the coefficient of `x^k`, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Result<Self, FpError> {
        if !is_prime(p) {
            return Err(FpError::NotPrime(p));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= p) {
            return Err(FpError::BadCoefficient { coeff: c, p });
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(FpPoly { p, coeffs })
    }

    /// Coefficients are the base-`p` digits of `index`, lowest first.
    pub fn from_index(p: u64, mut index: u64) -> Result<Self, FpError> {
        let mut coeffs = Vec::new();
        while index > 0 {
            coeffs.push(index % p);
            index /= p;
        }
        Self::new(p, coeffs)
    }

    pub fn constant(p: u64, c: u64) -> Result<Self, FpError> {
        Self::new(p, vec![c % p])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.coeffs.len().checked_sub(1).map(|d| d as u64)
    }

    pub fn eval_at_zero(&self) -> u64 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    /// `f(-1)`, i.e. evaluation at `p - 1`.
    pub fn eval_at_minus_one(&self) -> u64 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (acc * (p - 1) + c) % p)
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly(p={}, {})", self.p, self)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, c) => write!(f, "{c}x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, c) => write!(f, "{c}x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Synthetic division by `x + 1`; the remainder must vanish.
fn div_x_plus_one(p: u64, num: &[u64]) -> Result<Vec<u64>, FpError> {
    if num.is_empty() {
        return Ok(Vec::new());
    }
    let d = num.len() - 1;
    let mut q = vec![0; d];
    let mut carry = 0;
    for k in (1..=d).rev() {
        // b_{k-1} = a_k - b_k
        carry = (num[k] + p - carry) % p;
        q[k - 1] = carry;
    }
    let remainder = (num[0] + p - carry) % p;
    if remainder != 0 {
        return Err(FpError::InternalNotDivisible { remainder });
    }
    Ok(q)
}

pub fn tp_step(f: &FpPoly) -> Result<FpPoly, FpError> {
    if f.is_zero() {
        return Err(FpError::ZeroInput);
    }
    let p = f.p;
    let at_minus_one = f.eval_at_minus_one();
    let num = if at_minus_one == f.eval_at_zero() && at_minus_one != 0 {
        let mut v = Vec::with_capacity(f.coeffs.len() + 1);
        v.push(at_minus_one);
        v.extend_from_slice(&f.coeffs);
        v
    } else {
        let mut v = f.coeffs.clone();
        v[0] = (v[0] + p - at_minus_one) % p;
        v
    };
    FpPoly::new(p, div_x_plus_one(p, &num)?)
}

/// `ceil(4 p deg^1.5) + 16`.
pub fn default_limit(p: u64, degree: u64) -> StepCount {
    (4.0 * p as f64 * (degree as f64).powf(1.5)).ceil() as StepCount + 16
}

pub fn tau_p(f: &FpPoly, limit: Option<StepCount>) -> Result<StepCount, FpError> {
    let degree = f.degree().ok_or(FpError::ZeroInput)?;
    let limit = limit.unwrap_or_else(|| default_limit(f.p, degree));
    let mut g = f.clone();
    let mut k = 0;
    while g.degree() != Some(0) {
        if k == limit {
            return Err(FpError::LimitExceeded { limit });
        }
        g = tp_step(&g)?;
        k += 1;
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub p: u64,
    pub deg: u64,
    pub count: u64,
    pub max_tau: StepCount,
    pub mean_tau: f64,
    /// `max_tau / deg^1.5` for this degree.
    pub c_hat: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Survey {
    pub rows: Vec<SurveyRow>,
    /// Largest per-degree `c_hat`.
    pub c_hat: f64,
}

/// Whether all degree-`deg` inputs (`(p-1) p^deg` of them) get enumerated.
pub fn is_exhaustive(p: u64, deg: u64) -> bool {
    p.checked_pow(deg as u32 + 1)
        .is_some_and(|n| n <= EXHAUSTIVE_LIMIT)
}

/// Max and mean `tau_p` per degree `1..=max_deg`, enumerating where
/// `p^(deg+1) <= 2^20` and drawing `samples` uniform inputs otherwise.
pub fn survey_p(p: u64, max_deg: u64, samples: u64, seed: Seed) -> Result<Survey, FpError> {
    if !is_prime(p) {
        return Err(FpError::NotPrime(p));
    }
    if max_deg == 0 {
        return Err(FpError::NoDegrees);
    }
    let mut rows = Vec::new();
    for deg in 1..=max_deg {
        let inputs: Vec<FpPoly> = if is_exhaustive(p, deg) {
            let low = p.pow(deg as u32);
            (low..low * p)
                .map(|ix| FpPoly::from_index(p, ix))
                .collect::<Result<_, _>>()?
        } else {
            if samples == 0 {
                return Err(FpError::SamplesZero { degree: deg });
            }
            let mut rng = rng::seeded(seed ^ deg.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            (0..samples)
                .map(|_| {
                    let mut c: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
                    c.push(rng.gen_range(1..p));
                    FpPoly::new(p, c)
                })
                .collect::<Result<_, _>>()?
        };
        let taus: Vec<StepCount> = inputs
            .par_iter()
            .map(|f| tau_p(f, None))
            .collect::<Result<_, _>>()?;
        let count = taus.len() as u64;
        let max_tau = taus.iter().copied().max().unwrap_or(0);
        let mean_tau = taus.iter().sum::<u64>() as f64 / count as f64;
        rows.push(SurveyRow {
            p,
            deg,
            count,
            max_tau,
            mean_tau,
            c_hat: max_tau as f64 / (deg as f64).powf(1.5),
        });
    }
    let c_hat = rows.iter().map(|r| r.c_hat).fold(0.0, f64::max);
    Ok(Survey { rows, c_hat })
}

/// Writes `p,deg,count,max_tau,mean_tau,c_hat`.
pub fn write_survey_csv<W: std::io::Write>(survey: &Survey, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in &survey.rows {
        w.serialize(row)?;
    }
    if survey.rows.is_empty() {
        w.write_record(["p", "deg", "count", "max_tau", "mean_tau", "c_hat"])?;
    }
    w.flush()?;
    Ok(())
}
