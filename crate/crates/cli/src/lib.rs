//! Argument parsing and command execution for the `gf2-collatz` binary.

use std::error::Error;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gf2_collatz::automaton::{self, Strategy};
use gf2_collatz::fpmaps;
use gf2_collatz::gf2poly::Gf2Poly;
use gf2_collatz::maps::{self, MapKind};
use gf2_collatz::orbitmatrix::{self, ImageFormat};
use gf2_collatz::parity::{self, ParitySeq};
use gf2_collatz::stats::{self, EnumerationConfig, RhoRecord};
use gf2_collatz::verify::{self, Level};

pub type CliResult = Result<(), Box<dyn Error>>;

#[derive(Debug, Parser)]
#[command(name = "gf2-collatz", version, about = "Collatz-type dynamics on GF(2)[x]")]
pub struct Cli {
    /// Print polynomials as hex masks instead of x^k sums.
    #[arg(long, global = true)]
    pub hex: bool,
    #[command(subcommand)]
    pub command: Command,
}

fn nonzero_poly(s: &str) -> Result<Gf2Poly, String> {
    let f: Gf2Poly = s.parse().map_err(|e| format!("{e}"))?;
    if f.is_zero() {
        return Err("the zero polynomial has no orbit".into());
    }
    Ok(f)
}

fn any_poly(s: &str) -> Result<Gf2Poly, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// Polynomial as a hex mask (0x7) or a sum of powers (x^2+x+1).
    #[arg(long, value_parser = nonzero_poly)]
    pub poly: Gf2Poly,
    /// T0, T1, T, Tstar or That.
    #[arg(long, default_value = "T")]
    pub map: MapKind,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stopping time of one polynomial.
    Tau(PolyArgs),
    /// The orbit down to 1.
    Orbit {
        #[command(flatten)]
        args: PolyArgs,
        /// Print only the degrees along the orbit.
        #[arg(long)]
        degrees: bool,
    },
    /// Average stopping time over all (or sampled) degree-n polynomials.
    Rho {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "T")]
        map: MapKind,
        /// Draw this many random inputs instead of enumerating.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; falls back to GF2_COLLATZ_THREADS.
        #[arg(long)]
        threads: Option<usize>,
        /// Resumable progress file for exhaustive runs.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Parity sequence of a polynomial, or the polynomial of a sequence.
    Parity {
        #[arg(long, value_parser = any_poly, requires = "len", conflicts_with = "invert")]
        poly: Option<Gf2Poly>,
        #[arg(long)]
        len: Option<usize>,
        /// Bit string such as 11001.
        #[arg(long, required_unless_present = "poly")]
        invert: Option<ParitySeq>,
    },
    /// Orbit matrix image with marks and triangles.
    MatrixImage {
        #[arg(long, value_parser = nonzero_poly)]
        poly: Gf2Poly,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "ppm")]
        format: ImageFormat,
    },
    /// Search seed columns for a long automaton walk.
    SearchAutomaton {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// exhaustive, hill_climb or random.
        #[arg(long, default_value = "exhaustive")]
        strategy: Strategy,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Stopping times of T_p over F_p.
    Fp {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        deg: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the built-in invariant checks.
    Verify {
        #[arg(long, default_value = "quick")]
        level: Level,
    },
}

pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

fn show(f: &Gf2Poly, hex: bool) -> String {
    if hex {
        f.to_hex()
    } else {
        f.to_string()
    }
}

fn rho_line(r: &RhoRecord) -> String {
    let mut line = format!(
        "n={} map={} mode={} count={} sum_tau={} rho={} rho_over_n={}",
        r.n, r.map, r.mode, r.count, r.sum_tau, r.rho, r.rho_over_n
    );
    if let Some(ci) = r.ci_halfwidth {
        line.push_str(&format!(" ci_halfwidth={ci}"));
    }
    line
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let hex = cli.hex;
    match &cli.command {
        Command::Tau(args) => {
            let tau = maps::stopping_time(&args.poly, args.map, None)?;
            writeln!(out, "tau={tau}")?;
        }
        Command::Orbit { args, degrees } => {
            let orbit = maps::orbit(&args.poly, args.map, None)?;
            if *degrees {
                let degs: Vec<String> = orbit
                    .iter()
                    .map(|g| g.degree().to_string())
                    .collect();
                writeln!(out, "{}", degs.join(" "))?;
            } else {
                for g in &orbit {
                    writeln!(out, "{}", show(g, hex))?;
                }
            }
        }
        Command::Rho {
            n,
            map,
            sample,
            seed,
            threads,
            checkpoint,
            csv,
        } => {
            let record = match sample {
                Some(k) => stats::rho_sample(*n, *k, *map, *seed)?,
                None => {
                    let config = EnumerationConfig {
                        threads: *threads,
                        checkpoint: checkpoint.clone(),
                        chunk_size: None,
                    };
                    stats::rho_exhaustive(*n, *map, &config)?
                }
            };
            writeln!(out, "{}", rho_line(&record))?;
            if let Some(path) = csv {
                stats::emit_csv(&[record], path)?;
            }
        }
        Command::Parity { poly, len, invert } => match (poly, len, invert) {
            (Some(f), Some(n), None) => {
                writeln!(out, "{}", parity::parity_seq(f, *n))?;
            }
            (None, _, Some(bits)) => {
                writeln!(out, "{}", show(&parity::invert_parity_seq(bits), hex))?;
            }
            _ => return Err("parity needs --poly with --len, or --invert".into()),
        },
        Command::MatrixImage { poly, out: path, format } => {
            let s = orbitmatrix::render(poly, path, *format)?;
            writeln!(
                out,
                "wrote {} ({}x{}, marked={}, striped={})",
                path.display(),
                s.width,
                s.height,
                s.marked,
                s.striped
            )?;
        }
        Command::SearchAutomaton {
            n,
            m,
            strategy,
            budget,
            seed,
            json,
        } => {
            let result = automaton::search_max_tau(*n, *m, *strategy, *budget, *seed)?;
            let text = serde_json::to_string_pretty(&result)?;
            match json {
                Some(path) => {
                    fs::write(path, format!("{text}\n"))?;
                    writeln!(
                        out,
                        "seed={} tau={} evaluations={}",
                        result.seed_hex, result.tau, result.evaluations
                    )?;
                }
                None => writeln!(out, "{text}")?,
            }
        }
        Command::Fp {
            p,
            deg,
            samples,
            seed,
            csv,
        } => {
            let survey = fpmaps::survey_p(*p, *deg, *samples, *seed)?;
            for r in &survey.rows {
                writeln!(
                    out,
                    "p={} deg={} count={} max_tau={} mean_tau={:.4} c_hat={:.4}",
                    r.p, r.deg, r.count, r.max_tau, r.mean_tau, r.c_hat
                )?;
            }
            writeln!(out, "c_hat={}", survey.c_hat)?;
            if let Some(path) = csv {
                fpmaps::write_survey_csv(&survey, fs::File::create(path)?)?;
            }
        }
        Command::Verify { level } => {
            let results = verify::run(*level);
            for r in &results {
                writeln!(out, "{r}")?;
            }
            let passed = results.iter().filter(|r| r.passed).count();
            writeln!(out, "passed {passed}/{}", results.len())?;
            if passed != results.len() {
                return Err(format!("{} checks failed", results.len() - passed).into());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> String {
        let cli = parse_args(std::iter::once("gf2-collatz").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        execute(&cli, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn parse_examples() {
        let cli = parse_args(["gf2-collatz", "tau", "--poly", "0x7", "--map", "T"]).unwrap();
        match cli.command {
            Command::Tau(a) => {
                assert_eq!(a.poly, "x^2+x+1".parse().unwrap());
                assert_eq!(a.map, MapKind::T);
            }
            other => panic!("{other:?}"),
        }
        let cli = parse_args(["gf2-collatz", "rho", "--n", "12", "--map", "T", "--threads", "4"]).unwrap();
        assert!(matches!(cli.command, Command::Rho { n: 12, threads: Some(4), .. }));
        let err = parse_args(["gf2-collatz", "tau", "--poly", "0x0"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(parse_args(["gf2-collatz", "tau", "--poly", "0x7", "--bogus"]).is_err());
        assert!(parse_args(["gf2-collatz", "parity"]).is_err());
        assert!(parse_args(["gf2-collatz", "parity", "--poly", "0x4"]).is_err());
    }

    #[test]
    fn execute_examples() {
        assert_eq!(run(&["tau", "--poly", "0x7", "--map", "T"]), "tau=3\n");
        assert_eq!(run(&["orbit", "--poly", "x^2+x+1", "--degrees"]), "2 2 1 0\n");
        assert_eq!(run(&["--hex", "orbit", "--poly", "x^2+x+1"]).lines().last(), Some("0x1"));
        assert_eq!(run(&["parity", "--poly", "x^2", "--len", "5"]), "11001\n");
        assert_eq!(run(&["parity", "--invert", "10"]), "x\n");
        assert!(run(&["rho", "--n", "2"]).contains("rho=3 "));
    }
}
