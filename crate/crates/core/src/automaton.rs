//! Bit matrices obeying the cyclic recurrence `a_{i,j} = a_{i,j+1} + a_{i-1,j+1}`
//! (rows mod `n`), the walk `T_A` on their ones, and searches for matrices
//! whose walk takes long to reach its final column.
//!
//! `T_A` moves `(i, j)` up to `(i-1, j)` when that cell holds 1, otherwise
//! left to `(i, j-1)`, which then holds 1 by the recurrence. On `U(A^f)` the
//! walk from `(0, deg f)` replays the `T`-orbit of `f`.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmatrix::BitMatrix;
use crate::maps::StepCount;
use crate::rng::{self, Seed};

/// Exhaustive search handles at most this many rows.
pub const MAX_EXHAUSTIVE_ROWS: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("seed column is empty")]
    EmptySeed,
    #[error("cell ({row}, {col}) is outside the domain of T_A")]
    NotInDomain { row: usize, col: usize },
    #[error("cell ({row}, {col}) is outside the {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("walk did not settle within {limit} steps")]
    LimitExceeded { limit: StepCount },
    #[error("matrix violates the cyclic recurrence at ({row}, {col})")]
    NotMember { row: usize, col: usize },
    #[error("search budget must be positive")]
    BudgetZero,
    #[error("exhaustive search supports n <= {MAX_EXHAUSTIVE_ROWS}, got {0}")]
    TooManyRows(usize),
    #[error("seed masks support 1 <= n <= 64, got {0}")]
    BadRowCount(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomatonMatrix {
    bits: BitMatrix,
}

impl AutomatonMatrix {
    /// Column `m` is `seed`; columns `m-1 .. 0` follow from the recurrence.
    pub fn from_seed(seed: &[bool], m: usize) -> Result<Self, AutomatonError> {
        let n = seed.len();
        if n == 0 {
            return Err(AutomatonError::EmptySeed);
        }
        let mut bits = BitMatrix::zeros(n, m + 1);
        for (i, &b) in seed.iter().enumerate() {
            bits.set(i, m, b);
        }
        for j in (0..m).rev() {
            for i in 0..n {
                let v = bits.get(i, j + 1) ^ bits.get((i + n - 1) % n, j + 1);
                bits.set(i, j, v);
            }
        }
        Ok(AutomatonMatrix { bits })
    }

    /// Seed column from the low `n` bits of `mask`, row `i` = bit `i`.
    pub fn from_seed_mask(mask: u64, n: usize, m: usize) -> Result<Self, AutomatonError> {
        if n == 0 || n > 64 {
            return Err(AutomatonError::BadRowCount(n));
        }
        let seed: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        Self::from_seed(&seed, m)
    }

    /// Wraps an existing matrix after checking the recurrence everywhere.
    pub fn from_bit_matrix(bits: BitMatrix) -> Result<Self, AutomatonError> {
        if bits.rows() == 0 || bits.cols() == 0 {
            return Err(AutomatonError::EmptySeed);
        }
        if let Some((row, col)) = first_violation(&bits) {
            return Err(AutomatonError::NotMember { row, col });
        }
        Ok(AutomatonMatrix { bits })
    }

    pub fn rows(&self) -> usize {
        self.bits.rows()
    }

    pub fn cols(&self) -> usize {
        self.bits.cols()
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    pub fn entry(&self, c: Cell) -> bool {
        self.bits.get(c.row, c.col)
    }

    fn above(&self, c: Cell) -> Cell {
        Cell::new((c.row + self.rows() - 1) % self.rows(), c.col)
    }

    fn check_range(&self, c: Cell) -> Result<(), AutomatonError> {
        if c.row >= self.rows() || c.col >= self.cols() {
            return Err(AutomatonError::OutOfRange {
                row: c.row,
                col: c.col,
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(())
    }

    /// `c` in `A_1^+`: entry 1, and either `j > 0` or the cell above is 1.
    pub fn in_domain(&self, c: Cell) -> bool {
        c.row < self.rows()
            && c.col < self.cols()
            && self.entry(c)
            && (c.col > 0 || self.entry(self.above(c)))
    }

    pub fn t_a_step(&self, c: Cell) -> Result<Cell, AutomatonError> {
        self.check_range(c)?;
        if !self.in_domain(c) {
            return Err(AutomatonError::NotInDomain {
                row: c.row,
                col: c.col,
            });
        }
        let up = self.above(c);
        Ok(if self.entry(up) {
            up
        } else {
            Cell::new(c.row, c.col - 1)
        })
    }

    /// The walk from `start` until it leaves `A_1^+` or has made `n`
    /// consecutive vertical moves (after which it cycles in one column).
    pub fn walk(&self, start: Cell, limit: Option<StepCount>) -> Result<Vec<Cell>, AutomatonError> {
        self.check_range(start)?;
        if !self.entry(start) {
            return Err(AutomatonError::NotInDomain {
                row: start.row,
                col: start.col,
            });
        }
        let limit = limit.unwrap_or((self.rows() * self.cols()) as StepCount + 1);
        let mut path = vec![start];
        let mut c = start;
        let mut vertical_run = 0;
        while self.in_domain(c) && vertical_run < self.rows() {
            if path.len() as StepCount > limit {
                return Err(AutomatonError::LimitExceeded { limit });
            }
            let next = self.t_a_step(c)?;
            vertical_run = if next.col == c.col { vertical_run + 1 } else { 0 };
            path.push(next);
            c = next;
        }
        Ok(path)
    }

    /// First step at which the walk reaches the smallest column it ever attains.
    ///
    /// A start in `A_1` but outside `A_1^+` has no move and gives 0.
    pub fn tau_a(&self, start: Cell, limit: Option<StepCount>) -> Result<StepCount, AutomatonError> {
        let path = self.walk(start, limit)?;
        let min_col = path.last().expect("walk is non-empty").col;
        Ok(path.iter().position(|c| c.col == min_col).unwrap() as StepCount)
    }
}

fn first_violation(bits: &BitMatrix) -> Option<(usize, usize)> {
    let n = bits.rows();
    for j in 0..bits.cols().saturating_sub(1) {
        for i in 0..n {
            if bits.get(i, j) != (bits.get(i, j + 1) ^ bits.get((i + n - 1) % n, j + 1)) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Whether `bits` satisfies the cyclic recurrence at every interior cell.
pub fn is_member(bits: &BitMatrix) -> bool {
    first_violation(bits).is_none()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    HillClimb,
    Random,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::HillClimb => "hill_climb",
            Strategy::Random => "random",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "hill_climb" | "hillclimb" => Ok(Strategy::HillClimb),
            "random" => Ok(Strategy::Random),
            _ => Err(format!(
                "unknown strategy {s:?} (expected exhaustive, hill_climb or random)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub m: usize,
    pub strategy: Strategy,
    pub seed_hex: String,
    pub tau: StepCount,
    pub evaluations: u64,
}

impl SearchResult {
    pub fn seed_mask(&self) -> u64 {
        u64::from_str_radix(self.seed_hex.trim_start_matches("0x"), 16).unwrap_or(0)
    }
}

/// `tau_A((n-1, m))` for the matrix grown from `mask`.
pub fn evaluate_seed(mask: u64, n: usize, m: usize) -> Result<StepCount, AutomatonError> {
    let a = AutomatonMatrix::from_seed_mask(mask, n, m)?;
    a.tau_a(Cell::new(n - 1, m), None)
}

fn better(a: (StepCount, u64), b: (StepCount, u64)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Searches seed columns with top bit 1 for the largest `tau_A((n-1, m))`.
///
/// `budget` caps the number of seeds evaluated for every strategy. Exhaustive
/// search walks seeds in increasing order; ties go to the lowest seed.
pub fn search_max_tau(
    n: usize,
    m: usize,
    strategy: Strategy,
    budget: u64,
    seed: Seed,
) -> Result<SearchResult, AutomatonError> {
    if budget == 0 {
        return Err(AutomatonError::BudgetZero);
    }
    if n == 0 || n > 64 {
        return Err(AutomatonError::BadRowCount(n));
    }
    let top = 1u64 << (n - 1);
    let low_mask = top - 1;
    let (best, evaluations) = match strategy {
        Strategy::Exhaustive => {
            if n > MAX_EXHAUSTIVE_ROWS {
                return Err(AutomatonError::TooManyRows(n));
            }
            let count = budget.min(top);
            let best = (0..count)
                .into_par_iter()
                .map(|low| {
                    let mask = top | low;
                    evaluate_seed(mask, n, m).map(|t| (t, mask))
                })
                .try_reduce(|| (0, u64::MAX), |a, b| Ok(if better(b, a) { b } else { a }))?;
            (best, count)
        }
        Strategy::Random => {
            let mut rng = rng::seeded(seed);
            let masks: Vec<u64> = (0..budget)
                .map(|_| top | (rng.gen::<u64>() & low_mask))
                .collect();
            let best = masks
                .par_iter()
                .map(|&mask| evaluate_seed(mask, n, m).map(|t| (t, mask)))
                .try_reduce(|| (0, u64::MAX), |a, b| Ok(if better(b, a) { b } else { a }))?;
            (best, budget)
        }
        Strategy::HillClimb => hill_climb(n, m, budget, seed)?,
    };
    Ok(SearchResult {
        n,
        m,
        strategy,
        seed_hex: format!("{:#x}", best.1),
        tau: best.0,
        evaluations,
    })
}

/// Steepest ascent over single flips of the free seed bits, restarting from
/// fresh random seeds at local optima until the budget runs out.
fn hill_climb(
    n: usize,
    m: usize,
    budget: u64,
    seed: Seed,
) -> Result<((StepCount, u64), u64), AutomatonError> {
    let top = 1u64 << (n - 1);
    let mut rng = rng::seeded(seed);
    let mut used = 0u64;
    let mut best: Option<(StepCount, u64)> = None;
    let mut visited_starts = HashSet::new();
    while used < budget {
        let start = top | (rng.gen::<u64>() & (top - 1));
        if !visited_starts.insert(start) && visited_starts.len() as u64 >= top {
            break;
        }
        let mut current = (evaluate_seed(start, n, m)?, start);
        used += 1;
        loop {
            let mut step_best = current;
            for bit in 0..n - 1 {
                if used == budget {
                    break;
                }
                let mask = current.1 ^ (1 << bit);
                let cand = (evaluate_seed(mask, n, m)?, mask);
                used += 1;
                if cand.0 > step_best.0 {
                    step_best = cand;
                }
            }
            if step_best == current || used == budget {
                current = if better(step_best, current) { step_best } else { current };
                break;
            }
            current = step_best;
        }
        if best.map_or(true, |b| better(current, b)) {
            best = Some(current);
        }
    }
    Ok((best.expect("budget is positive"), used))
}
