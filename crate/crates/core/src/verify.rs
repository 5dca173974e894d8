//! Self-checks run by `gf2-collatz verify`. The quick level finishes in
//! seconds; the full level runs the exhaustive suites up to degree 16.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::automaton::{AutomatonMatrix, Cell};
use crate::fpmaps;
use crate::gf2poly::Gf2Poly;
use crate::laurent::{LaurentWindow, DEFAULT_FLOOR};
use crate::maps::{self, word, MapKind};
use crate::orbitmatrix::{self, OrbitMatrix};
use crate::parity::{invert_parity_seq, parity_seq};
use crate::rng;
use crate::stats::{self, EnumerationConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(format!("unknown level {s:?} (expected quick or full)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

struct Sizes {
    identity_deg: u64,
    bound_deg: u64,
    parity_n: usize,
    windows: u64,
    matrices: u64,
    automaton_deg: u64,
    rho_n: u64,
    fp_deg: u64,
}

fn sizes(level: Level) -> Sizes {
    match level {
        Level::Quick => Sizes {
            identity_deg: 10,
            bound_deg: 10,
            parity_n: 10,
            windows: 100,
            matrices: 40,
            automaton_deg: 8,
            rho_n: 12,
            fp_deg: 5,
        },
        Level::Full => Sizes {
            identity_deg: 16,
            bound_deg: 16,
            parity_n: 14,
            windows: 1000,
            matrices: 200,
            automaton_deg: 12,
            rho_n: 16,
            fp_deg: 6,
        },
    }
}

fn count_failures(masks: impl IntoParallelIterator<Item = u64>, bad: impl Fn(u64) -> bool + Sync + Send) -> (u64, u64) {
    masks
        .into_par_iter()
        .map(|m| (1u64, bad(m) as u64))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn outcome(name: &'static str, (checked, failed): (u64, u64), what: &str) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: failed == 0 && checked > 0,
        detail: format!("{failed} of {checked} {what} failed"),
    }
}

fn map_identities(max_deg: u64) -> CheckOutcome {
    let counts = count_failures(2u64..1 << (max_deg + 1), |mask| {
        let f = Gf2Poly::from_mask(mask);
        let deg = f.degree().finite().unwrap();
        let t = |k| word::stopping_time(mask, k, None).unwrap();
        let sigma = f.subst_x_plus_one().to_mask().unwrap();
        let t1 = t(MapKind::T1);
        t(MapKind::T0) != 2 * t1 - deg
            || t1 != word::stopping_time(sigma, MapKind::T, None).unwrap()
            || word::stopping_time(mask ^ mask >> 1, MapKind::T1, None).unwrap() != t(MapKind::THat)
    });
    outcome("map identities", counts, "polynomials")
}

fn upper_bound(max_deg: u64) -> CheckOutcome {
    let counts = count_failures(1u64..1 << (max_deg + 1), |mask| {
        let f = Gf2Poly::from_mask(mask);
        !orbitmatrix::certify_bound(&f).is_ok_and(|c| c.holds())
    });
    outcome("upper bound certificate", counts, "polynomials")
}

fn parity_bijection(max_n: usize) -> CheckOutcome {
    let mut checked = 0;
    let mut failed = 0;
    for n in 0..=max_n {
        let images: Vec<u64> = (0..1u64 << n)
            .into_par_iter()
            .map(|mask| parity_seq(&Gf2Poly::from_mask(mask), n).to_mask())
            .collect();
        let mut seen = vec![false; 1 << n];
        for (mask, &img) in images.iter().enumerate() {
            checked += 1;
            let s = crate::parity::ParitySeq::from_mask(img, n);
            if std::mem::replace(&mut seen[img as usize], true)
                || invert_parity_seq(&s) != Gf2Poly::from_mask(mask as u64)
            {
                failed += 1;
            }
        }
    }
    outcome("parity bijection", (checked, failed), "sequences")
}

fn laurent_compatibility(windows: u64) -> CheckOutcome {
    let counts = count_failures(0..windows, |seed| {
        let n = 1 + seed % 60;
        let r = LaurentWindow::sample(n, DEFAULT_FLOOR, seed).unwrap();
        let mut s = r.clone();
        let mut f = r.poly_part().unwrap();
        for _ in 0..64 {
            if f.is_one() {
                break;
            }
            s = s.s_step().unwrap();
            f = maps::step(&f, MapKind::T).unwrap();
            if s.poly_part().unwrap() != f {
                return true;
            }
        }
        false
    });
    outcome("laurent compatibility", counts, "windows")
}

fn orbit_matrix_structure(matrices: u64) -> CheckOutcome {
    let counts = count_failures(0..matrices, |seed| {
        let mut r = rng::seeded(seed);
        let deg = 8 + seed % 56;
        let mut f = rng::random_of_degree(&mut r, deg);
        if !f.constant_term() {
            f.toggle(0);
        }
        let dec = orbitmatrix::decompose(&f).unwrap();
        let u = orbitmatrix::u_transform(&dec.matrix, deg).unwrap();
        let a = AutomatonMatrix::from_bit_matrix(u.clone()).unwrap();
        !dec.check().all_hold()
            || orbitmatrix::row_as_poly(&u, u.rows() - 1) != f.subst_x_plus_one()
            || a.tau_a(Cell::new(0, deg as usize), None).unwrap() != dec.tau
    });
    outcome("orbit matrix structure", counts, "matrices")
}

fn automaton_correspondence(max_deg: u64) -> CheckOutcome {
    let counts = count_failures(1u64..1 << max_deg, |half| {
        let mask = half << 1 | 1;
        let f = Gf2Poly::from_mask(mask);
        let a = OrbitMatrix::build(&f).unwrap();
        let d = a.degree();
        let u = orbitmatrix::u_transform(&a, d).unwrap();
        let tau = word::stopping_time(mask, MapKind::T, None).unwrap();
        AutomatonMatrix::from_bit_matrix(u)
            .map(|m| m.tau_a(Cell::new(0, d as usize), None) != Ok(tau))
            .unwrap_or(true)
    });
    outcome("automaton walk", counts, "matrices")
}

fn rho_values(max_n: u64) -> CheckOutcome {
    let cfg = EnumerationConfig::default();
    let mut failed = 0;
    let small = [(1, 3u64), (2, 12)];
    for (n, sum) in small {
        if stats::rho_exhaustive(n, MapKind::T, &cfg).map(|r| r.sum_tau).ok() != Some(sum) {
            failed += 1;
        }
    }
    for n in 1..=max_n {
        let get = |k| stats::rho_exhaustive(n, k, &cfg).unwrap().sum_tau;
        let t = get(MapKind::T);
        if get(MapKind::T0) != 2 * t - (n << n) || get(MapKind::T1) != t {
            failed += 1;
        }
    }
    outcome("average stopping times", (max_n + 2, failed), "degrees")
}

fn fp_termination(max_deg: u64) -> CheckOutcome {
    match fpmaps::survey_p(3, max_deg, 0, 0) {
        Ok(s) => CheckOutcome {
            name: "prime field orbits",
            passed: s.rows.iter().all(|r| r.count > 0),
            detail: format!("p=3 up to degree {max_deg}, c_hat={:.4}", s.c_hat),
        },
        Err(e) => CheckOutcome {
            name: "prime field orbits",
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run(level: Level) -> Vec<CheckOutcome> {
    let s = sizes(level);
    vec![
        map_identities(s.identity_deg),
        upper_bound(s.bound_deg),
        parity_bijection(s.parity_n),
        laurent_compatibility(s.windows),
        orbit_matrix_structure(s.matrices),
        automaton_correspondence(s.automaton_deg),
        rho_values(s.rho_n),
        fp_termination(s.fp_deg),
    ]
}
