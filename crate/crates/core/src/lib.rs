//! Collatz-type dynamics on polynomials over GF(2).
//!
//! The central map is `T`, which sends `f` to `f/(x+1)` when `f(1) = 0` and to
//! `(x f + 1)/(x+1)` otherwise. Its stopping time `tau(f)` (steps to reach 1)
//! is at most `2 deg(f)^1.5 + 1`, and its average over degree-`n` inputs grows
//! like `2n`.
//!
//! ```
//! use gf2_collatz::gf2poly::Gf2Poly;
//! use gf2_collatz::maps::{stopping_time, MapKind};
//!
//! let f: Gf2Poly = "x^2+x+1".parse().unwrap();
//! assert_eq!(stopping_time(&f, MapKind::T, None).unwrap(), 3);
//! ```

pub mod automaton;
pub mod bitmatrix;
pub mod fpmaps;
pub mod gf2poly;
pub mod laurent;
pub mod maps;
pub mod orbitmatrix;
pub mod parity;
pub mod rng;
pub mod stats;
pub mod verify;

pub use gf2poly::Gf2Poly;
pub use maps::MapKind;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/laurent.md")]
    mod laurent {}
    #[doc = include_str!("../../../book/src/parity.md")]
    mod parity {}
    #[doc = include_str!("../../../book/src/orbit-matrix.md")]
    mod orbit_matrix {}
    #[doc = include_str!("../../../book/src/automaton.md")]
    mod automaton {}
    #[doc = include_str!("../../../book/src/prime-fields.md")]
    mod prime_fields {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
