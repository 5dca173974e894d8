//! Parity sequences `p(f)_k = T^k(f)(1)` and the inverse of
//! `f -> p(f)_0..p(f)_{n-1}` on polynomials of degree below `n`.
//!
//! Adding `(x+1)^k g` with `g(1) = 1` to `f` leaves the first `k` parities
//! unchanged and flips the `k`-th. That gives both injectivity on
//! `{0} u {deg < n}` and the greedy inversion used by [`invert_parity_seq`].

use std::fmt;
use std::str::FromStr;

use crate::gf2poly::{Factor, Gf2Poly};
use crate::maps::{self, MapKind};

/// Finite bit sequence `p_0 .. p_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ParitySeq {
    bits: Vec<bool>,
}

impl ParitySeq {
    pub fn new(bits: Vec<bool>) -> Self {
        ParitySeq { bits }
    }

    /// The sequence whose bits are the low `n` bits of `mask`, bit 0 first.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        ParitySeq::new((0..n).map(|k| mask >> k & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, k: usize) -> bool {
        self.bits[k]
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Bits packed into a mask, bit 0 first. Panics past 64 bits.
    pub fn to_mask(&self) -> u64 {
        assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &b)| acc | (b as u64) << k)
    }

    /// `deg T^k(f)` for `k = 0..=len`, from `deg f` and the parity prefix sums.
    pub fn degrees_from(&self, start_degree: u64) -> Vec<i64> {
        let mut d = start_degree as i64;
        let mut out = vec![d];
        for &b in &self.bits {
            d += b as i64 - 1;
            out.push(d);
        }
        out
    }
}

impl fmt::Display for ParitySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ParitySeq {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("bad parity bit {other:?} in {s:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ParitySeq::new)
    }
}

/// The first `n` parities of the `T`-orbit of `f`. The orbit of 0 is
/// constantly 0, and an orbit that reaches 1 stays there.
pub fn parity_seq(f: &Gf2Poly, n: usize) -> ParitySeq {
    let mut bits = Vec::with_capacity(n);
    if f.is_zero() {
        bits.resize(n, false);
        return ParitySeq::new(bits);
    }
    let mut g = f.clone();
    for _ in 0..n {
        bits.push(g.parity());
        if g.is_one() {
            bits.resize(n, true);
            break;
        }
        g = maps::step(&g, MapKind::T).expect("non-zero orbit");
    }
    ParitySeq::new(bits)
}

/// The unique `f` of degree `< n` (or zero) with `parity_seq(f, n) = p`.
///
/// Walks `k = 0..n`, adding `(x+1)^k` whenever bit `k` disagrees; the
/// addition cannot disturb the bits already fixed.
pub fn invert_parity_seq(p: &ParitySeq) -> Gf2Poly {
    let mut f = Gf2Poly::zero();
    let mut power = Gf2Poly::one();
    for k in 0..p.len() {
        if parity_seq(&f, k + 1).get(k) != p.get(k) {
            f += &power;
        }
        power = power.mul_basic(Factor::XPlusOne);
    }
    f
}

/// `(x+1)^n + invert_parity_seq(p)`: a degree-`n` polynomial with parity
/// sequence `p`.
pub fn parity_class_witness(p: &ParitySeq) -> Gf2Poly {
    Gf2Poly::x_plus_one_pow(p.len() as u64) + invert_parity_seq(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    fn seq(s: &str) -> ParitySeq {
        s.parse().unwrap()
    }

    #[test]
    fn parity_seq_examples() {
        assert_eq!(parity_seq(&p("x^2"), 5), seq("11001"));
        assert_eq!(parity_seq(&Gf2Poly::zero(), 3), seq("000"));
        assert_eq!(parity_seq(&Gf2Poly::one(), 3), seq("111"));
        assert_eq!(parity_seq(&p("x^2"), 8), seq("11001111"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert_parity_seq(&seq("10")), Gf2Poly::x());
        assert!(invert_parity_seq(&seq("0000000")).is_zero());
        assert_eq!(invert_parity_seq(&seq("11")), Gf2Poly::one());
    }

    #[test]
    fn witness_examples() {
        let w = parity_class_witness(&seq("10"));
        assert_eq!(w, p("x^2+x+1"));
        assert_eq!(parity_seq(&w, 2), seq("10"));
        assert_eq!(parity_class_witness(&seq("0")), p("x+1"));
        assert_eq!(parity_seq(&p("x+1"), 1), seq("0"));
    }

    #[test]
    fn bijection_small_n() {
        for n in 0..=10usize {
            let mut seen = vec![false; 1 << n];
            for mask in 0u64..1 << n {
                let f = Gf2Poly::from_mask(mask);
                let s = parity_seq(&f, n);
                let ix = s.to_mask() as usize;
                assert!(!seen[ix], "collision at n = {n}");
                seen[ix] = true;
                assert_eq!(invert_parity_seq(&s), f);
            }
        }
    }

    #[test]
    fn binomial_law_small_n() {
        for n in 1..=12usize {
            let mut hist = vec![0u64; n + 1];
            for low in 0u64..1 << n {
                let f = Gf2Poly::from_mask(low | 1 << n);
                hist[parity_seq(&f, n).weight()] += 1;
            }
            let mut binom = 1u64;
            for (w, &h) in hist.iter().enumerate() {
                assert_eq!(h, binom, "n = {n}, w = {w}");
                binom = binom * (n - w) as u64 / (w as u64 + 1);
            }
        }
    }

    proptest! {
        #[test]
        fn degrees_from_parities(mask in 1u64..(1 << 40)) {
            let f = Gf2Poly::from_mask(mask);
            let orbit = maps::orbit(&f, MapKind::T, None).unwrap();
            let s = parity_seq(&f, orbit.len() - 1);
            let degs = s.degrees_from(f.degree().finite().unwrap());
            for (g, d) in orbit.iter().zip(degs) {
                prop_assert_eq!(g.degree().finite().unwrap() as i64, d);
            }
        }

        #[test]
        fn perturbation(mask in 0u64..(1 << 40), k in 0usize..16, g in 1u64..(1 << 16)) {
            let f = Gf2Poly::from_mask(mask);
            let mut g = Gf2Poly::from_mask(g);
            if !g.parity() {
                g.toggle(0);
            }
            for _ in 0..k {
                g = g.mul_basic(Factor::XPlusOne);
            }
            let a = parity_seq(&f, k + 1);
            let b = parity_seq(&(&f + &g), k + 1);
            prop_assert_eq!(&a.bits()[..k], &b.bits()[..k]);
            prop_assert_ne!(a.get(k), b.get(k));
        }

        #[test]
        fn witness_has_degree_n(mask in any::<u64>(), n in 1usize..40) {
            let s = ParitySeq::from_mask(mask, n);
            let w = parity_class_witness(&s);
            prop_assert_eq!(w.degree().finite(), Some(n as u64));
            prop_assert_eq!(parity_seq(&w, n), s);
        }
    }
}
