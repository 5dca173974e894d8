//! The step maps and their stopping times.
//!
//! | kind  | `f` branch                 | step                                |
//! |-------|----------------------------|-------------------------------------|
//! | T0    | `f(0) = 0` / `1`           | `f/x` / `(x+1)f + 1`                |
//! | T1    | `f(0) = 0` / `1`           | `f/x` / `((x+1)f + 1)/x`            |
//! | T     | `f(1) = 0` / `1`           | `f/(x+1)` / `(xf + 1)/(x+1)`        |
//! | TStar | `f(1) = 0` / `1`           | `xf/(x+1)` / `(f + 1)/(x+1)`        |
//! | THat  | `[P^-1 f](0) = 0` / `1`    | `(f + f(0))/x` / `((x+1)f + f(0))/x` |
//!
//! `T = sigma . T1 . sigma` with `sigma(f) = f(x+1)`, and `THat` is `T1`
//! conjugated by the polynomial part of `P`. The [`word`] submodule holds
//! branch-free single-word versions used by the exhaustive statistics.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2poly::{Factor, Gf2Poly, PolyError};

pub type StepCount = u64;

/// Largest `n` accepted by [`hat_family`] is the one with `4^n - 1` at most this.
pub const HAT_FAMILY_MAX_DEGREE: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MapKind {
    T0,
    T1,
    T,
    TStar,
    THat,
}

impl MapKind {
    pub const ALL: [MapKind; 5] = [
        MapKind::T0,
        MapKind::T1,
        MapKind::T,
        MapKind::TStar,
        MapKind::THat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::T0 => "T0",
            MapKind::T1 => "T1",
            MapKind::T => "T",
            MapKind::TStar => "Tstar",
            MapKind::THat => "That",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MapKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown map {s:?} (expected T0, T1, T, Tstar or That)"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("the zero polynomial has no stopping time")]
    ZeroInput,
    #[error("orbit did not reach 1 within {limit} steps")]
    LimitExceeded { limit: StepCount },
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("degree {degree} exceeds the configured maximum {max}")]
    DegreeTooLarge { degree: u64, max: u64 },
}

fn exact(r: Result<Gf2Poly, PolyError>) -> Gf2Poly {
    r.expect("branch condition guarantees exact division")
}

/// One application of the map.
pub fn step(f: &Gf2Poly, kind: MapKind) -> Result<Gf2Poly, MapError> {
    if f.is_zero() {
        return Err(MapError::ZeroInput);
    }
    let one = Gf2Poly::one();
    Ok(match kind {
        MapKind::T0 => {
            if f.constant_term() {
                f.mul_basic(Factor::XPlusOne) + &one
            } else {
                exact(f.div_exact(Factor::X))
            }
        }
        MapKind::T1 => {
            if f.constant_term() {
                exact((f.mul_basic(Factor::XPlusOne) + &one).div_exact(Factor::X))
            } else {
                exact(f.div_exact(Factor::X))
            }
        }
        MapKind::T => {
            if f.parity() {
                exact((f.mul_basic(Factor::X) + &one).div_exact(Factor::XPlusOne))
            } else {
                exact(f.div_exact(Factor::XPlusOne))
            }
        }
        MapKind::TStar => {
            if f.parity() {
                let num = f + &one;
                if num.is_zero() {
                    // T*(1) = 0
                    Gf2Poly::zero()
                } else {
                    exact(num.div_exact(Factor::XPlusOne))
                }
            } else {
                exact(f.mul_basic(Factor::X).div_exact(Factor::XPlusOne))
            }
        }
        MapKind::THat => {
            let c = if f.constant_term() { one } else { Gf2Poly::zero() };
            let num = if f.adjacent_sum().constant_term() {
                f.mul_basic(Factor::XPlusOne) + &c
            } else {
                f + &c
            };
            if num.is_zero() {
                Gf2Poly::zero()
            } else {
                exact(num.div_exact(Factor::X))
            }
        }
    })
}

/// `ceil(4 * deg^1.5) + 16`: twice the proven bound plus slack.
pub fn default_step_limit(degree: u64) -> StepCount {
    (4.0 * (degree as f64).powf(1.5)).ceil() as StepCount + 16
}

/// Least `k <= limit` with `step^k(f) = 1`. The default limit is
/// [`default_step_limit`].
pub fn stopping_time(
    f: &Gf2Poly,
    kind: MapKind,
    limit: Option<StepCount>,
) -> Result<StepCount, MapError> {
    let deg = f.degree().finite().ok_or(MapError::ZeroInput)?;
    if deg <= word::MAX_DEGREE {
        return word::stopping_time(f.to_mask().unwrap(), kind, limit);
    }
    let limit = limit.unwrap_or_else(|| default_step_limit(deg));
    let mut g = f.clone();
    let mut k = 0;
    while !g.is_one() {
        if k == limit {
            return Err(MapError::LimitExceeded { limit });
        }
        g = step(&g, kind)?;
        if g.is_zero() {
            return Err(MapError::LimitExceeded { limit });
        }
        k += 1;
    }
    Ok(k)
}

/// Generic-path stopping time, never dispatching to the word kernel.
pub fn stopping_time_generic(
    f: &Gf2Poly,
    kind: MapKind,
    limit: Option<StepCount>,
) -> Result<StepCount, MapError> {
    Ok(orbit_generic(f, kind, limit)?.len() as StepCount - 1)
}

/// `[f, step(f), ..., 1]`.
pub fn orbit(
    f: &Gf2Poly,
    kind: MapKind,
    limit: Option<StepCount>,
) -> Result<Vec<Gf2Poly>, MapError> {
    orbit_generic(f, kind, limit)
}

fn orbit_generic(
    f: &Gf2Poly,
    kind: MapKind,
    limit: Option<StepCount>,
) -> Result<Vec<Gf2Poly>, MapError> {
    let deg = f.degree().finite().ok_or(MapError::ZeroInput)?;
    let limit = limit.unwrap_or_else(|| default_step_limit(deg));
    let mut out = vec![f.clone()];
    while !out.last().unwrap().is_one() {
        if out.len() as StepCount > limit {
            return Err(MapError::LimitExceeded { limit });
        }
        let next = step(out.last().unwrap(), kind)?;
        if next.is_zero() {
            return Err(MapError::LimitExceeded { limit });
        }
        out.push(next);
    }
    Ok(out)
}

/// `f* = (f + 1)/x`, defined when `f(0) = 1`.
pub fn star_transform(f: &Gf2Poly) -> Result<Gf2Poly, MapError> {
    if !f.constant_term() {
        return Err(MapError::NotApplicable("f* needs f(0) = 1"));
    }
    Ok((f + &Gf2Poly::one()).shr(1))
}

/// `P_n = sum_{k < 2^n} x^(4^n - k(2^n + 1) - 1)`.
pub fn hat_family(n: u32) -> Result<Gf2Poly, MapError> {
    if n == 0 {
        return Err(MapError::NotApplicable("the family starts at n = 1"));
    }
    let degree = 4u64
        .checked_pow(n)
        .map(|d| d - 1)
        .filter(|&d| d <= HAT_FAMILY_MAX_DEGREE)
        .ok_or(MapError::DegreeTooLarge {
            degree: 4u64.saturating_pow(n).saturating_sub(1),
            max: HAT_FAMILY_MAX_DEGREE,
        })?;
    let block = (1u64 << n) + 1;
    Ok(Gf2Poly::from_exponents(
        (0..1u64 << n).map(|k| degree - k * block),
    ))
}

/// Single-word kernels for polynomials of degree at most [`word::MAX_DEGREE`].
///
/// Every map keeps intermediate degrees at most one above the input degree,
/// so a 64-bit mask suffices up to degree 62.
pub mod word {
    use super::{default_step_limit, MapError, MapKind, StepCount};
    use crate::gf2poly::suffix_xor_word;

    pub const MAX_DEGREE: u64 = 62;

    #[inline]
    fn parity(f: u64) -> u64 {
        (f.count_ones() & 1) as u64
    }

    #[inline]
    pub fn step(f: u64, kind: MapKind) -> u64 {
        match kind {
            MapKind::T0 => {
                if f & 1 == 1 {
                    (f << 1) ^ f ^ 1
                } else {
                    f >> 1
                }
            }
            MapKind::T1 => {
                if f & 1 == 1 {
                    f ^ (f >> 1)
                } else {
                    f >> 1
                }
            }
            // [x^(p-1) P(f)]
            MapKind::T => suffix_xor_word(f) >> (1 - parity(f)),
            MapKind::TStar => {
                if parity(f) == 1 {
                    suffix_xor_word((f ^ 1) >> 1)
                } else {
                    suffix_xor_word(f)
                }
            }
            MapKind::THat => {
                let c = f & 1;
                if (f ^ (f >> 1)) & 1 == 1 {
                    ((f << 1) ^ f ^ c) >> 1
                } else {
                    (f ^ c) >> 1
                }
            }
        }
    }

    pub fn stopping_time(
        f: u64,
        kind: MapKind,
        limit: Option<StepCount>,
    ) -> Result<StepCount, MapError> {
        if f == 0 {
            return Err(MapError::ZeroInput);
        }
        let deg = 63 - f.leading_zeros() as u64;
        debug_assert!(deg <= MAX_DEGREE);
        let limit = limit.unwrap_or_else(|| default_step_limit(deg));
        let mut g = f;
        let mut k = 0;
        while g != 1 {
            if k == limit || g == 0 {
                return Err(MapError::LimitExceeded { limit });
            }
            g = step(g, kind);
            k += 1;
        }
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    fn all_nonzero_up_to(deg: u64) -> impl Iterator<Item = Gf2Poly> {
        (1u64..1 << (deg + 1)).map(Gf2Poly::from_mask)
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(&p("x+1"), MapKind::T).unwrap(), Gf2Poly::one());
        assert_eq!(step(&p("x^2"), MapKind::T).unwrap(), p("x^2+x+1"));
        assert_eq!(step(&Gf2Poly::one(), MapKind::T).unwrap(), Gf2Poly::one());
        assert_eq!(step(&Gf2Poly::x(), MapKind::T1).unwrap(), Gf2Poly::one());
        assert_eq!(step(&p("x+1"), MapKind::T0).unwrap(), p("x^2"));
        assert_eq!(step(&p("x+1"), MapKind::THat).unwrap(), Gf2Poly::one());
        assert_eq!(step(&Gf2Poly::one(), MapKind::THat).unwrap(), Gf2Poly::one());
        assert_eq!(step(&Gf2Poly::zero(), MapKind::T), Err(MapError::ZeroInput));
    }

    #[test]
    fn stopping_time_examples() {
        let t = |s: &str, k| stopping_time(&p(s), k, None).unwrap();
        assert_eq!(t("1", MapKind::T), 0);
        assert_eq!(t("x", MapKind::T), 2);
        assert_eq!(t("x^2", MapKind::T), 4);
        assert_eq!(t("x^2", MapKind::T0), 2);
        assert_eq!(t("x^2", MapKind::T1), 2);
        for kind in MapKind::ALL {
            assert_eq!(t("1", kind), 0);
        }
        assert_eq!(
            stopping_time(&Gf2Poly::zero(), MapKind::T, None),
            Err(MapError::ZeroInput)
        );
        assert_eq!(
            stopping_time(&p("x^2"), MapKind::T, Some(3)),
            Err(MapError::LimitExceeded { limit: 3 })
        );
        assert_eq!(stopping_time(&p("x^2"), MapKind::T, Some(4)), Ok(4));
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit(&p("x+1"), MapKind::T, None).unwrap(), vec![p("x+1"), Gf2Poly::one()]);
        assert_eq!(orbit(&Gf2Poly::one(), MapKind::T, None).unwrap(), vec![Gf2Poly::one()]);
        let degs: Vec<_> = orbit(&p("x^2"), MapKind::T, None)
            .unwrap()
            .iter()
            .map(|g| g.degree().finite().unwrap())
            .collect();
        assert_eq!(degs, vec![2, 2, 2, 1, 0]);
        assert_eq!(
            orbit(&p("x^2"), MapKind::T, Some(2)),
            Err(MapError::LimitExceeded { limit: 2 })
        );
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_transform(&p("x^2+x+1")).unwrap(), p("x+1"));
        assert!(star_transform(&Gf2Poly::one()).unwrap().is_zero());
        assert!(matches!(star_transform(&Gf2Poly::x()), Err(MapError::NotApplicable(_))));
    }

    #[test]
    fn star_conjugacy_exhaustive() {
        for f in all_nonzero_up_to(10).filter(|f| f.constant_term()) {
            let lhs = step(&star_transform(&f).unwrap(), MapKind::TStar);
            let lhs = match lhs {
                Ok(g) => g,
                // f* = 0 only for f = 1, where both sides are 0
                Err(MapError::ZeroInput) => Gf2Poly::zero(),
                Err(e) => panic!("{e}"),
            };
            let rhs = star_transform(&step(&f, MapKind::T).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "f = {f}");
        }
    }

    #[test]
    fn hat_family_examples() {
        assert_eq!(hat_family(1).unwrap(), p("x^3+1"));
        assert_eq!(hat_family(2).unwrap(), Gf2Poly::from_exponents([15, 10, 5, 0]));
        for n in 1..=6 {
            assert_eq!(hat_family(n).unwrap().weight(), 1 << n);
        }
        assert!(matches!(hat_family(11), Err(MapError::DegreeTooLarge { .. })));
        assert!(hat_family(0).is_err());
    }

    #[test]
    fn conjugacy_and_acceleration_exhaustive() {
        for f in all_nonzero_up_to(12) {
            let deg = f.degree().finite().unwrap();
            let t1 = stopping_time(&f, MapKind::T1, None).unwrap();
            let t0 = stopping_time(&f, MapKind::T0, None).unwrap();
            let t = stopping_time(&f.subst_x_plus_one(), MapKind::T, None).unwrap();
            assert_eq!(t1, t, "f = {f}");
            assert_eq!(t0, 2 * t1 - deg, "f = {f}");
        }
    }

    #[test]
    fn hat_is_conjugate_to_t1() {
        for f in all_nonzero_up_to(10) {
            let g = f.adjacent_sum();
            assert_eq!(
                stopping_time(&f, MapKind::THat, None).unwrap(),
                stopping_time(&g, MapKind::T1, None).unwrap()
            );
        }
    }

    #[test]
    fn upper_bound_exhaustive() {
        for f in all_nonzero_up_to(16) {
            let d = f.degree().finite().unwrap() as f64;
            let tau = stopping_time(&f, MapKind::T, None).unwrap() as f64;
            assert!(tau <= 2.0 * d.powf(1.5) + 1.0, "f = {f}");
        }
    }

    #[test]
    fn constant_coefficient_absorption() {
        for f in all_nonzero_up_to(10) {
            if f.constant_term() || f.parity() {
                assert!(step(&f, MapKind::T).unwrap().constant_term());
            }
            if f.constant_term() {
                assert!(orbit(&f, MapKind::T, None).unwrap().iter().all(|g| g.constant_term()));
            }
        }
    }

    #[test]
    fn degree_never_increases_under_t() {
        for f in all_nonzero_up_to(10) {
            let g = step(&f, MapKind::T).unwrap();
            let (df, dg) = (f.degree().finite().unwrap(), g.degree().finite().unwrap());
            if f.parity() {
                assert_eq!(dg, df);
            } else {
                assert_eq!(dg + 1, df);
            }
        }
    }

    proptest! {
        #[test]
        fn word_kernel_matches_generic(mask in 1u64..(1 << 63), kind_ix in 0usize..5) {
            let kind = MapKind::ALL[kind_ix];
            let f = Gf2Poly::from_mask(mask);
            let g = step(&f, kind).unwrap();
            prop_assert_eq!(g.to_mask().unwrap(), word::step(mask, kind));
            prop_assert_eq!(
                stopping_time_generic(&f, kind, None).unwrap(),
                word::stopping_time(mask, kind, None).unwrap()
            );
        }

        #[test]
        fn generic_handles_multiword(words in prop::collection::vec(any::<u64>(), 2..4)) {
            let f = Gf2Poly::from_words(words);
            prop_assume!(!f.is_zero());
            let d = f.degree().finite().unwrap() as f64;
            let tau = stopping_time(&f, MapKind::T, None).unwrap() as f64;
            prop_assert!(tau <= 2.0 * d.powf(1.5) + 1.0);
        }
    }
}
