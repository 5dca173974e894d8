//! Polynomials over the two-element field.
//!
//! A [`Gf2Poly`] is a little-endian bitset of 64-bit words: bit `k` of the
//! packed representation is the coefficient of `x^k`. The representation is
//! canonical (no trailing zero words), so derived equality and hashing are
//! polynomial equality.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use thiserror::Error;

pub(crate) const WORD_BITS: u64 = 64;

/// Degree of a polynomial or series. The zero polynomial has degree
/// [`Degree::NegInf`], which orders below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        self == Degree::NegInf
    }
}

impl Add for Degree {
    type Output = Degree;

    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInf,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// The two factors the maps ever multiply or divide by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    X,
    XPlusOne,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::X => f.write_str("x"),
            Factor::XPlusOne => f.write_str("x+1"),
        }
    }
}

/// Which way to apply the `x/(x+1)` transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("the zero polynomial is not a valid input here")]
    ZeroInput,
    #[error("{poly} is not divisible by {divisor}")]
    NotDivisible { poly: String, divisor: Factor },
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Polynomial over GF(2) in canonical bit-packed form.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

/// Suffix parity inside one word: bit `k` of the result is the XOR of all
/// bits at positions `>= k`.
#[inline]
pub(crate) fn suffix_xor_word(mut w: u64) -> u64 {
    w ^= w >> 1;
    w ^= w >> 2;
    w ^= w >> 4;
    w ^= w >> 8;
    w ^= w >> 16;
    w ^= w >> 32;
    w
}

/// Multi-word suffix parity, high word first with a running carry.
pub(crate) fn suffix_xor_words(words: &mut [u64]) {
    let mut carry = false;
    for w in words.iter_mut().rev() {
        let parity = w.count_ones() & 1 == 1;
        let mut out = suffix_xor_word(*w);
        if carry {
            out = !out;
        }
        *w = out;
        carry ^= parity;
    }
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly::from_mask(1)
    }

    pub fn x() -> Self {
        Gf2Poly::from_mask(2)
    }

    /// `x^k`.
    pub fn monomial(k: u64) -> Self {
        let mut p = Gf2Poly::zero();
        p.toggle(k);
        p
    }

    /// Polynomial whose coefficient bits are the bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        Gf2Poly::from_words(vec![mask])
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Gf2Poly { words }
    }

    /// Sum of `x^e` over the given exponents; repeated exponents cancel.
    pub fn from_exponents<I: IntoIterator<Item = u64>>(exponents: I) -> Self {
        let mut p = Gf2Poly::zero();
        for e in exponents {
            p.toggle(e);
        }
        p
    }

    /// `(x+1)^k`, by repeated multiplication.
    pub fn x_plus_one_pow(k: u64) -> Self {
        let mut p = Gf2Poly::one();
        for _ in 0..k {
            p = p.mul_basic(Factor::XPlusOne);
        }
        p
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The coefficient mask if the polynomial fits in one word.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn degree(&self) -> Degree {
        match self.words.last() {
            None => Degree::NegInf,
            Some(top) => Degree::Finite(
                (self.words.len() as u64 - 1) * WORD_BITS + 63 - top.leading_zeros() as u64,
            ),
        }
    }

    /// Coefficient of `x^k`.
    pub fn coeff(&self, k: u64) -> bool {
        let (w, b) = ((k / WORD_BITS) as usize, k % WORD_BITS);
        self.words.get(w).is_some_and(|word| word >> b & 1 == 1)
    }

    /// Flips the coefficient of `x^k`.
    pub fn toggle(&mut self, k: u64) {
        let (w, b) = ((k / WORD_BITS) as usize, k % WORD_BITS);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1 << b;
        self.normalize();
    }

    /// Number of non-zero coefficients.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Exponents with coefficient 1, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * WORD_BITS;
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(base + b)
            })
        })
    }

    pub fn constant_term(&self) -> bool {
        self.coeff(0)
    }

    /// `f(1)`: parity of the number of terms.
    pub fn parity(&self) -> bool {
        self.weight() & 1 == 1
    }

    /// Evaluates at `0` (`false`) or `1` (`true`).
    pub fn eval_at(&self, point: bool) -> bool {
        if point {
            self.parity()
        } else {
            self.constant_term()
        }
    }

    /// Multiplication by `x^k`.
    pub fn shl(&self, k: u64) -> Self {
        if self.is_zero() {
            return Gf2Poly::zero();
        }
        let (wshift, bshift) = ((k / WORD_BITS) as usize, (k % WORD_BITS) as u32);
        let mut out = vec![0u64; self.words.len() + wshift + 1];
        for (i, &w) in self.words.iter().enumerate() {
            out[i + wshift] |= w << bshift;
            if bshift != 0 {
                out[i + wshift + 1] |= w >> (64 - bshift);
            }
        }
        Gf2Poly::from_words(out)
    }

    /// Drops the `k` lowest coefficients and divides by `x^k`.
    pub fn shr(&self, k: u64) -> Self {
        let (wshift, bshift) = ((k / WORD_BITS) as usize, (k % WORD_BITS) as u32);
        if wshift >= self.words.len() {
            return Gf2Poly::zero();
        }
        let src = &self.words[wshift..];
        let mut out = Vec::with_capacity(src.len());
        for i in 0..src.len() {
            let mut w = src[i] >> bshift;
            if bshift != 0 {
                if let Some(&next) = src.get(i + 1) {
                    w |= next << (64 - bshift);
                }
            }
            out.push(w);
        }
        Gf2Poly::from_words(out)
    }

    /// Multiplication by `x` or `x+1`.
    pub fn mul_basic(&self, factor: Factor) -> Self {
        match factor {
            Factor::X => self.shl(1),
            Factor::XPlusOne => self.shl(1) + self,
        }
    }

    /// Exact division by `x` or `x+1`; the divisibility condition is always
    /// checked.
    pub fn div_exact(&self, divisor: Factor) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroInput);
        }
        let divisible = match divisor {
            Factor::X => !self.constant_term(),
            Factor::XPlusOne => !self.parity(),
        };
        if !divisible {
            return Err(PolyError::NotDivisible {
                poly: self.to_string(),
                divisor,
            });
        }
        Ok(match divisor {
            Factor::X => self.shr(1),
            // q_k = sum of f_j over j > k
            Factor::XPlusOne => self.shr(1).suffix_parity(),
        })
    }

    /// Polynomial part of `x/(x+1) * f`: the coefficient at `x^k` becomes the
    /// parity of the coefficients at exponents `>= k`.
    pub fn suffix_parity(&self) -> Self {
        let mut words = self.words.clone();
        suffix_xor_words(&mut words);
        Gf2Poly::from_words(words)
    }

    /// Polynomial part of `(1 + x^-1) * f`, the inverse of
    /// [`suffix_parity`](Self::suffix_parity).
    pub fn adjacent_sum(&self) -> Self {
        self.shr(1) + self
    }

    /// `[P(f)]` or `[P^{-1}(f)]`, where `P` is multiplication by `x/(x+1)`.
    pub fn poly_part_p(&self, direction: Direction) -> Self {
        match direction {
            Direction::Forward => self.suffix_parity(),
            Direction::Inverse => self.adjacent_sum(),
        }
    }

    /// `f(x+1)` by Horner's rule.
    pub fn subst_x_plus_one(&self) -> Self {
        let Some(deg) = self.degree().finite() else {
            return Gf2Poly::zero();
        };
        let mut acc = Gf2Poly::zero();
        for k in (0..=deg).rev() {
            acc = acc.mul_basic(Factor::XPlusOne);
            if self.coeff(k) {
                acc.toggle(0);
            }
        }
        acc
    }

    /// Hex coefficient mask, e.g. `0x7` for `x^2+x+1`.
    pub fn to_hex(&self) -> String {
        let Some((top, rest)) = self.words.split_last() else {
            return "0x0".to_string();
        };
        let mut s = format!("0x{top:x}");
        for w in rest.iter().rev() {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    /// Parses a hex mask (`0x...`).
    pub fn from_hex(input: &str) -> Result<Self, PolyError> {
        let err = |reason: &str| PolyError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let digits = input
            .strip_prefix("0x")
            .or_else(|| input.strip_prefix("0X"))
            .ok_or_else(|| err("missing 0x prefix"))?;
        if digits.is_empty() {
            return Err(err("no hex digits"));
        }
        let mut p = Gf2Poly::zero();
        for (pos, c) in digits.chars().rev().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| err("invalid hex digit"))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    p.toggle(pos as u64 * 4 + b);
                }
            }
        }
        Ok(p)
    }

    /// Parses the pretty form, e.g. `x^3 + x + 1`. Repeated terms cancel.
    pub fn from_pretty(input: &str) -> Result<Self, PolyError> {
        let err = |reason: String| PolyError::Parse {
            input: input.to_string(),
            reason,
        };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input".into()));
        }
        if compact == "0" {
            return Ok(Gf2Poly::zero());
        }
        let mut p = Gf2Poly::zero();
        for term in compact.split('+') {
            let e = match term {
                "1" => 0,
                "x" => 1,
                t => t
                    .strip_prefix("x^")
                    .and_then(|e| e.parse::<u64>().ok())
                    .ok_or_else(|| err(format!("bad term {t:?}")))?,
            };
            p.toggle(e);
        }
        Ok(p)
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl Add<&Gf2Poly> for &Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        let (long, short) = if self.words.len() >= rhs.words.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w ^= s;
        }
        Gf2Poly::from_words(words)
    }
}

impl Add<&Gf2Poly> for Gf2Poly {
    type Output = Gf2Poly;

    fn add(mut self, rhs: &Gf2Poly) -> Gf2Poly {
        self += rhs;
        self
    }
}

impl Add for Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: Gf2Poly) -> Gf2Poly {
        self + &rhs
    }
}

impl AddAssign<&Gf2Poly> for Gf2Poly {
    fn add_assign(&mut self, rhs: &Gf2Poly) {
        if self.words.len() < rhs.words.len() {
            self.words.resize(rhs.words.len(), 0);
        }
        for (w, s) in self.words.iter_mut().zip(&rhs.words) {
            *w ^= s;
        }
        self.normalize();
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let exps: Vec<u64> = self.exponents().collect();
        for (i, e) in exps.iter().rev().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match e {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                e => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

impl FromStr for Gf2Poly {
    type Err = PolyError;

    /// Accepts either a hex mask (`0x...`) or the pretty form.
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let t = s.trim();
        if t.starts_with("0x") || t.starts_with("0X") {
            Gf2Poly::from_hex(t)
        } else {
            Gf2Poly::from_pretty(t)
        }
    }
}
