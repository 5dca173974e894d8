//! Average stopping times over all degree-`n` polynomials, sampled estimates
//! with Hoeffding intervals, concentration and prefix-limit experiments.
//!
//! The degree-`n` population is `{x^n + g : deg g < n}`, enumerated as the
//! masks `0 .. 2^n` of the low bits. Sums are integers over disjoint mask
//! ranges, so results do not depend on the thread count.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gf2poly::Gf2Poly;
use crate::maps::{self, word, MapError, MapKind, StepCount};
use crate::rng::{self, Seed};

pub const MAX_EXHAUSTIVE_DEGREE: u64 = 34;
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 20;
pub const THREADS_ENV: &str = "GF2_COLLATZ_THREADS";
pub const CHECKPOINT_VERSION: u32 = 1;
/// Two-sided confidence level of the sampled half-widths is `1 - ALPHA`.
pub const ALPHA: f64 = 0.05;
/// Populations this small are summed on the calling thread.
const SEQUENTIAL_CUTOFF: u64 = 1 << 12;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("degree {n} outside the exhaustive range 1..={max}")]
    DegreeTooLarge { n: u64, max: u64 },
    #[error("degree must be at least 1")]
    DegreeZero,
    #[error("sample count must be positive")]
    SamplesZero,
    #[error("checkpoint {path}: {reason}")]
    CheckpointCorrupt { path: PathBuf, reason: String },
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
    #[error("bad value {value:?} in {THREADS_ENV}")]
    BadThreadsEnv { value: String },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled => "sampled",
        })
    }
}

fn ser_map<S: Serializer>(kind: &MapKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(kind.name())
}

fn de_map<'de, D: Deserializer<'de>>(d: D) -> Result<MapKind, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoRecord {
    pub n: u64,
    #[serde(serialize_with = "ser_map", deserialize_with = "de_map")]
    pub map: MapKind,
    pub mode: Mode,
    pub count: u64,
    pub sum_tau: u64,
    pub rho: f64,
    pub rho_over_n: f64,
    pub ci_halfwidth: Option<f64>,
}

impl RhoRecord {
    fn new(n: u64, map: MapKind, mode: Mode, count: u64, sum_tau: u64, ci: Option<f64>) -> Self {
        let rho = sum_tau as f64 / count as f64;
        RhoRecord {
            n,
            map,
            mode,
            count,
            sum_tau,
            rho,
            rho_over_n: rho / n as f64,
            ci_halfwidth: ci,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnumerationConfig {
    /// `None` falls back to `GF2_COLLATZ_THREADS`, then to all cores.
    pub threads: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    /// Masks per checkpointed chunk; `None` means [`DEFAULT_CHUNK_SIZE`].
    pub chunk_size: Option<u64>,
}

impl EnumerationConfig {
    pub fn with_threads(threads: usize) -> Self {
        EnumerationConfig {
            threads: Some(threads),
            ..Default::default()
        }
    }
}

/// Explicit count, else the environment variable, else 0 (all cores).
pub fn resolve_threads(explicit: Option<usize>) -> Result<usize, StatsError> {
    if let Some(t) = explicit {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| StatsError::BadThreadsEnv { value }),
        Err(_) => Ok(0),
    }
}

fn with_pool<R: Send>(
    threads: Option<usize>,
    job: impl FnOnce() -> R + Send,
) -> Result<R, StatsError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(threads)?)
        .build()
        .map_err(|e| StatsError::ThreadPool(e.to_string()))?;
    Ok(pool.install(job))
}

fn check_degree(n: u64) -> Result<(), StatsError> {
    match n {
        0 => Err(StatsError::DegreeZero),
        n if n > MAX_EXHAUSTIVE_DEGREE => Err(StatsError::DegreeTooLarge {
            n,
            max: MAX_EXHAUSTIVE_DEGREE,
        }),
        _ => Ok(()),
    }
}

fn sum_range(n: u64, kind: MapKind, lo: u64, hi: u64) -> Result<u64, MapError> {
    let top = 1u64 << n;
    (lo..hi)
        .into_par_iter()
        .try_fold(|| 0u64, |acc, low| Ok(acc + word::stopping_time(top | low, kind, None)?))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    n: u64,
    #[serde(serialize_with = "ser_map", deserialize_with = "de_map")]
    map: MapKind,
    next_mask: u64,
    partial_sum: u64,
    chunk_size: u64,
}

fn load_checkpoint(path: &Path, expect: &Checkpoint) -> Result<Option<Checkpoint>, StatsError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let corrupt = |reason: String| StatsError::CheckpointCorrupt {
        path: path.to_path_buf(),
        reason,
    };
    let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
    if cp.version != expect.version {
        return Err(corrupt(format!("version {} (expected {})", cp.version, expect.version)));
    }
    if (cp.n, cp.map, cp.chunk_size) != (expect.n, expect.map, expect.chunk_size) {
        return Err(corrupt(format!(
            "run is n={} map={} chunk={}, checkpoint has n={} map={} chunk={}",
            expect.n, expect.map, expect.chunk_size, cp.n, cp.map, cp.chunk_size
        )));
    }
    let total = 1u64 << cp.n;
    if cp.next_mask > total || (cp.next_mask % cp.chunk_size != 0 && cp.next_mask != total) {
        return Err(corrupt(format!("next_mask {} is not a chunk boundary", cp.next_mask)));
    }
    Ok(Some(cp))
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), StatsError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_string_pretty(cp)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Exact `rho(n) = sum tau / 2^n` for `1 <= n <= 34`, resumable through a
/// JSON checkpoint written after each chunk.
pub fn rho_exhaustive(
    n: u64,
    kind: MapKind,
    config: &EnumerationConfig,
) -> Result<RhoRecord, StatsError> {
    check_degree(n)?;
    let total = 1u64 << n;
    let chunk_size = config.chunk_size.unwrap_or(DEFAULT_CHUNK_SIZE).max(1);
    let mut state = Checkpoint {
        version: CHECKPOINT_VERSION,
        n,
        map: kind,
        next_mask: 0,
        partial_sum: 0,
        chunk_size,
    };
    if let Some(path) = &config.checkpoint {
        if let Some(cp) = load_checkpoint(path, &state)? {
            state = cp;
        }
    }
    let mut work = || -> Result<(), StatsError> {
        while state.next_mask < total {
            let hi = (state.next_mask + chunk_size).min(total);
            state.partial_sum += if total <= SEQUENTIAL_CUTOFF {
                (state.next_mask..hi)
                    .map(|low| word::stopping_time(total | low, kind, None))
                    .sum::<Result<u64, _>>()?
            } else {
                sum_range(n, kind, state.next_mask, hi)?
            };
            state.next_mask = hi;
            if let Some(path) = &config.checkpoint {
                save_checkpoint(path, &state)?;
            }
        }
        Ok(())
    };
    if total <= SEQUENTIAL_CUTOFF {
        work()?;
    } else {
        with_pool(config.threads, work)??;
    }
    Ok(RhoRecord::new(n, kind, Mode::Exhaustive, total, state.partial_sum, None))
}

/// Count of degree-`n` inputs per stopping time, index = `tau`.
pub fn tau_histogram(
    n: u64,
    kind: MapKind,
    config: &EnumerationConfig,
) -> Result<Vec<u64>, StatsError> {
    check_degree(n)?;
    let top = 1u64 << n;
    let hist = with_pool(config.threads, || {
        (0..top)
            .into_par_iter()
            .try_fold(Vec::new, |mut h: Vec<u64>, low| {
                let t = word::stopping_time(top | low, kind, None)? as usize;
                if h.len() <= t {
                    h.resize(t + 1, 0);
                }
                h[t] += 1;
                Ok::<_, MapError>(h)
            })
            .try_reduce(Vec::new, |mut a, b| {
                if a.len() < b.len() {
                    a.resize(b.len(), 0);
                }
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            })
    })??;
    Ok(hist)
}

/// Proven range of `tau` on degree-`n` inputs, used for the Hoeffding width.
pub fn tau_range(n: u64, kind: MapKind) -> f64 {
    let n = n as f64;
    match kind {
        MapKind::T | MapKind::T1 | MapKind::THat => 2.0 * n.powf(1.5) + 1.0,
        MapKind::TStar => 2.0 * (n + 1.0).powf(1.5),
        MapKind::T0 => 4.0 * n.powf(1.5) + 2.0 - n,
    }
}

/// `range * sqrt(ln(2 / alpha) / (2 samples))`.
pub fn hoeffding_halfwidth(range: f64, samples: u64) -> f64 {
    range * ((2.0 / ALPHA).ln() / (2.0 * samples as f64)).sqrt()
}

/// Mean `tau` over `samples` uniform degree-`n` inputs.
pub fn rho_sample(n: u64, samples: u64, kind: MapKind, seed: Seed) -> Result<RhoRecord, StatsError> {
    if samples == 0 {
        return Err(StatsError::SamplesZero);
    }
    if n == 0 {
        return Err(StatsError::DegreeZero);
    }
    let mut rng = rng::seeded(seed);
    let sum: u64 = if n <= word::MAX_DEGREE - 1 {
        let top = 1u64 << n;
        let masks: Vec<u64> = (0..samples).map(|_| top | (rng.gen::<u64>() & (top - 1))).collect();
        masks
            .par_iter()
            .map(|&m| word::stopping_time(m, kind, None))
            .try_reduce(|| 0, |a, b| Ok(a + b))?
    } else {
        let inputs: Vec<Gf2Poly> = (0..samples)
            .map(|_| rng::random_of_degree(&mut rng, n))
            .collect();
        inputs
            .par_iter()
            .map(|f| maps::stopping_time(f, kind, None))
            .try_reduce(|| 0, |a, b| Ok(a + b))?
    };
    let ci = hoeffding_halfwidth(tau_range(n, kind), samples);
    Ok(RhoRecord::new(n, kind, Mode::Sampled, samples, sum, Some(ci)))
}

/// Fraction of degree-`n` inputs with `tau` outside `[(2-eps) n, (2+eps) n]`.
pub fn concentration(n: u64, epsilon: f64, kind: MapKind) -> Result<f64, StatsError> {
    let hist = tau_histogram(n, kind, &EnumerationConfig::default())?;
    Ok(outside_band(&hist, n, epsilon))
}

/// The band fraction from an existing histogram.
pub fn outside_band(hist: &[u64], n: u64, epsilon: f64) -> f64 {
    let lo = (2.0 - epsilon) * n as f64;
    let hi = (2.0 + epsilon) * n as f64;
    let total: u64 = hist.iter().sum();
    let outside: u64 = hist
        .iter()
        .enumerate()
        .filter(|&(t, _)| (t as f64) < lo || (t as f64) > hi)
        .map(|(_, &c)| c)
        .sum();
    outside as f64 / total as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixRow {
    pub n: u64,
    pub tau: StepCount,
    pub ratio: f64,
}

/// `tau([x^n r]) / n` for `n = 1..=n_max`, where `r = 1 + sum tail[k-1] x^-k`.
pub fn prefix_limit_from_tail(tail: &[bool], n_max: u64) -> Result<Vec<PrefixRow>, StatsError> {
    assert!(tail.len() as u64 >= n_max, "tail shorter than n_max");
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let f = Gf2Poly::from_exponents(
                std::iter::once(n).chain((1..=n).filter(|&k| tail[k as usize - 1]).map(|k| n - k)),
            );
            let tau = maps::stopping_time(&f, MapKind::T, None)?;
            Ok(PrefixRow {
                n,
                tau,
                ratio: tau as f64 / n as f64,
            })
        })
        .collect()
}

/// [`prefix_limit_from_tail`] on a tail drawn from `seed`.
pub fn prefix_limit_experiment(seed: Seed, n_max: u64) -> Result<Vec<PrefixRow>, StatsError> {
    if n_max == 0 {
        return Err(StatsError::DegreeZero);
    }
    let mut rng = rng::seeded(seed);
    let tail: Vec<bool> = (0..n_max).map(|_| rng.gen()).collect();
    prefix_limit_from_tail(&tail, n_max)
}

fn sorted(records: &[RhoRecord]) -> Vec<&RhoRecord> {
    let mut v: Vec<&RhoRecord> = records.iter().collect();
    v.sort_by(|a, b| (a.map.name(), a.n).cmp(&(b.map.name(), b.n)));
    v
}

/// Header `n,map,mode,count,sum_tau,rho,rho_over_n,ci_halfwidth`, rows by `(map, n)`.
pub fn write_csv<W: io::Write>(records: &[RhoRecord], out: W) -> Result<(), StatsError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([
        "n",
        "map",
        "mode",
        "count",
        "sum_tau",
        "rho",
        "rho_over_n",
        "ci_halfwidth",
    ])?;
    for r in sorted(records) {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[RhoRecord], out: &Path) -> Result<(), StatsError> {
    write_csv(records, fs::File::create(out)?)
}

pub fn read_csv(path: &Path) -> Result<Vec<RhoRecord>, StatsError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
