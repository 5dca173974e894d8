//! Truncated series in descending powers of `x`.
//!
//! A [`LaurentWindow`] stores the coefficients of a series
//! `sum a_z x^z` for every exponent from its `floor` up to its degree. Stored
//! coefficients are exact; coefficients below the floor are unknown. The
//! operators iterated here only ever read exponents at or above the one they
//! write (`P`) or one step above it (`P^-1`), and `S` is `P` followed by a
//! shift, so a window stays exact on its whole range under all of them.

use std::cmp::{max, Ordering};

use thiserror::Error;

use crate::gf2poly::{suffix_xor_words, Direction, Gf2Poly};
use crate::rng::{self, Seed};

/// Floor used by the randomized window tests and the verify suite.
pub const DEFAULT_FLOOR: i64 = -64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("window floor {0} is above the constant term")]
    BadFloor(i64),
    #[error("tail has {got} bits, floor {floor} needs {}", -floor)]
    BadTail { got: usize, floor: i64 },
    #[error("S is only defined on series of non-negative degree")]
    NegativeDegree,
    #[error("windows share no exactly known exponent")]
    IncomparableWindows,
}

/// Series known exactly on exponents `floor..=degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentWindow {
    floor: i64,
    // bit i is the coefficient of x^(floor + i)
    bits: Gf2Poly,
}

impl LaurentWindow {
    /// Embeds `f` with the given coefficients at exponents `-1, -2, ..., floor`.
    pub fn from_poly(f: &Gf2Poly, floor: i64, tail: &[bool]) -> Result<Self, LaurentError> {
        if floor > 0 {
            return Err(LaurentError::BadFloor(floor));
        }
        if tail.len() as i64 != -floor {
            return Err(LaurentError::BadTail {
                got: tail.len(),
                floor,
            });
        }
        let depth = (-floor) as u64;
        let mut bits = f.shl(depth);
        for (i, &b) in tail.iter().enumerate() {
            if b {
                bits.toggle(depth - 1 - i as u64);
            }
        }
        Ok(LaurentWindow { floor, bits })
    }

    /// Embeds `f` with an all-zero tail.
    pub fn from_poly_exact(f: &Gf2Poly, floor: i64) -> Result<Self, LaurentError> {
        let tail = vec![false; floor.unsigned_abs() as usize];
        LaurentWindow::from_poly(f, floor, &tail)
    }

    pub fn zero(floor: i64) -> Self {
        LaurentWindow {
            floor,
            bits: Gf2Poly::zero(),
        }
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    /// Degree of the series, `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.bits
            .degree()
            .finite()
            .map(|d| self.floor + d as i64)
    }

    /// Coefficient of `x^e`, or `None` when `e` is below the floor.
    pub fn coeff(&self, e: i64) -> Option<bool> {
        match e.cmp(&self.floor) {
            Ordering::Less => None,
            _ => Some(self.bits.coeff((e - self.floor) as u64)),
        }
    }

    /// Stored coefficients, highest exponent first.
    pub fn stored_bits(&self) -> Vec<bool> {
        match self.degree() {
            None => Vec::new(),
            Some(top) => (self.floor..=top)
                .rev()
                .map(|e| self.coeff(e).unwrap())
                .collect(),
        }
    }

    /// The polynomial part `[r]`.
    pub fn poly_part(&self) -> Result<Gf2Poly, LaurentError> {
        if self.floor > 0 {
            return Err(LaurentError::BadFloor(self.floor));
        }
        Ok(self.bits.shr((-self.floor) as u64))
    }

    /// `[r](1)`.
    pub fn parity(&self) -> Result<bool, LaurentError> {
        Ok(self.poly_part()?.parity())
    }

    /// Multiplication by `x^k`; the window moves with the series.
    pub fn mul_x_pow(&self, k: i64) -> Self {
        LaurentWindow {
            floor: self.floor + k,
            bits: self.bits.clone(),
        }
    }

    /// Adds a polynomial; every exponent of `g` must lie in the window.
    pub fn add_poly(&self, g: &Gf2Poly) -> Result<Self, LaurentError> {
        if self.floor > 0 {
            return Err(LaurentError::BadFloor(self.floor));
        }
        Ok(LaurentWindow {
            floor: self.floor,
            bits: &self.bits + &g.shl((-self.floor) as u64),
        })
    }

    /// Multiplication by `x/(x+1)` or its inverse `1 + x^-1`.
    pub fn p_step(&self, direction: Direction) -> Self {
        let bits = match direction {
            Direction::Forward => {
                let mut words = self.bits.words().to_vec();
                suffix_xor_words(&mut words);
                Gf2Poly::from_words(words)
            }
            Direction::Inverse => self.bits.adjacent_sum(),
        };
        LaurentWindow {
            floor: self.floor,
            bits,
        }
    }

    /// `S(r) = x^([r](1) - 1) P(r)`.
    pub fn s_step(&self) -> Result<Self, LaurentError> {
        match self.degree() {
            Some(d) if d >= 0 => {}
            _ => return Err(LaurentError::NegativeDegree),
        }
        let shift = if self.parity()? { 0 } else { -1 };
        Ok(self.p_step(Direction::Forward).mul_x_pow(shift))
    }

    /// `S^k(r)`.
    pub fn s_iterate(&self, k: usize) -> Result<Self, LaurentError> {
        let mut r = self.clone();
        for _ in 0..k {
            r = r.s_step()?;
        }
        Ok(r)
    }

    /// `p(r)_0 .. p(r)_{k-1}` where `p(r)_i = [S^i(r)](1)`.
    pub fn parity_prefix(&self, k: usize) -> Result<Vec<bool>, LaurentError> {
        let mut r = self.clone();
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            out.push(r.parity()?);
            r = r.s_step()?;
        }
        Ok(out)
    }

    /// Whether `s = x^n r` for some `n >= 0`, judged on the exponents where
    /// both `s` and the shifted `r` are known.
    pub fn shift_le(&self, s: &LaurentWindow) -> Result<bool, LaurentError> {
        let (dr, ds) = match (self.degree(), s.degree()) {
            (None, None) => return Ok(true),
            (Some(dr), Some(ds)) => (dr, ds),
            _ => return Err(LaurentError::IncomparableWindows),
        };
        let n = ds - dr;
        if n < 0 {
            return Ok(false);
        }
        let shifted = self.mul_x_pow(n);
        let lo = max(shifted.floor, s.floor);
        if lo > ds {
            return Err(LaurentError::IncomparableWindows);
        }
        Ok((lo..=ds).all(|e| shifted.coeff(e) == s.coeff(e)))
    }

    /// Cylinder-uniform sample of a degree-`n` series: leading coefficient 1,
    /// every stored coefficient below it a fair seeded bit.
    pub fn sample(n: u64, floor: i64, seed: Seed) -> Result<Self, LaurentError> {
        if floor > 0 {
            return Err(LaurentError::BadFloor(floor));
        }
        let free = n + floor.unsigned_abs();
        let mut rng = rng::seeded(seed);
        let mut bits = rng::random_bits(&mut rng, free);
        bits.toggle(free);
        Ok(LaurentWindow { floor, bits })
    }
}
