//! `plh`: command-line front end for exact PL homeomorphism computations.
//!
//! Every map, interval and certificate is read and written as JSON with
//! rationals as `"p/q"` strings. Arguments that take JSON accept it inline,
//! as `@path`, or as a bare path.
//!
//! Exit codes: 0 success, 1 domain error (error name on stderr), 2 usage.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use plhomeo::commutation::{bump, noncommute_witness};
use plhomeo::encoding::{category_experiment, validate_tuple, BreakTuple, SampleConfig};
use plhomeo::factorization::factor_one_break;
use plhomeo::hoelder::{
    build_escape_hoelder, verify_escape_hoelder, HoelderCertificate, HoelderExponent, PQMap,
    SeparatedFamily,
};
use plhomeo::line_circle::{embed_interval, embed_interval_circle};
use plhomeo::lipschitz::{
    build_escape_lip, verify_escape_lip, IntervalFamily, LipEscapeCertificate,
};
use plhomeo::{Error, Interval, PLMap, Point, Rational};

#[derive(Parser)]
#[command(
    name = "plh",
    version,
    about = "Exact computations with PL homeomorphisms of [0,1]"
)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// f ∘ g
    Compose {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// f⁻¹
    Invert {
        #[arg(long)]
        f: String,
    },
    /// f(x)
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
    },
    /// Right slope over left slope at an interior point.
    SlopeRatio {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
    },
    /// Factors with one break each, outermost first.
    Factor {
        #[arg(long)]
        f: String,
    },
    /// Whether a list of points is the break list of a map.
    Validate {
        #[arg(long)]
        f: String,
    },
    /// Fraction of sampled g with #B(f∘g) = #B(f) + m.
    SampleCategory {
        #[arg(long)]
        f: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1_000_000)]
        denominator_bound: u64,
    },
    /// Bi-Lipschitz escape map and its certificate.
    EscapeLip {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        intervals: String,
        /// Defaults to the identity on every interval.
        #[arg(long)]
        adversaries: Option<String>,
    },
    /// C^{1+ε} escape map and its certificate.
    EscapeHoelder {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        epsilon: HoelderExponent,
        #[arg(long)]
        intervals: String,
        /// Defaults to the identity on every interval.
        #[arg(long)]
        adversaries: Option<String>,
    },
    /// Re-checks a certificate from the inputs embedded in it.
    VerifyCert {
        #[arg(long)]
        cert: String,
    },
    /// Bump map supported on an open interval.
    Bump {
        #[arg(long)]
        u: String,
    },
    /// A subinterval W′ ⊆ W on which f and the bump of W′ do not commute.
    Witness {
        #[arg(long)]
        f: String,
        #[arg(long)]
        w: String,
    },
    /// f on [0,1] and the identity elsewhere, on the line or the circle ℝ/2ℤ.
    Embed {
        #[arg(long)]
        f: String,
        #[arg(long)]
        circle: bool,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_source(arg: &str) -> Outcome<String> {
    let trimmed = arg.trim_start();
    if let Some(path) = arg.strip_prefix('@') {
        return fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")));
    }
    if trimmed.starts_with(['{', '[', '"']) {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))
}

/// Syntax errors are usage errors; rejected content is a domain error.
fn parse<T: DeserializeOwned>(arg: &str) -> Outcome<T> {
    let text = read_source(arg)?;
    serde_json::from_str(&text).map_err(|e| {
        if e.is_data() {
            Failure::Domain(Error::Parse(e.to_string()))
        } else {
            Failure::Usage(format!("malformed JSON: {e}"))
        }
    })
}

#[derive(Deserialize)]
struct RawMap {
    breaks: Vec<Point>,
}

/// Parses a map so that chain violations keep their own error name.
fn parse_map(arg: &str) -> Outcome<PLMap> {
    let raw: RawMap = parse(arg)?;
    Ok(PLMap::new(raw.breaks)?)
}

fn parse_maps(arg: &str) -> Outcome<Vec<PLMap>> {
    let raws: Vec<RawMap> = parse(arg)?;
    raws.into_iter()
        .map(|r| PLMap::new(r.breaks).map_err(Failure::from))
        .collect()
}

fn parse_intervals(arg: &str) -> Outcome<Vec<Interval>> {
    parse(arg)
}

#[derive(Serialize)]
struct Verified {
    kind: &'static str,
    valid: bool,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn execute(command: Command) -> Outcome<String> {
    Ok(match command {
        Command::Compose { f, g } => to_json(&parse_map(&f)?.compose(&parse_map(&g)?)),
        Command::Invert { f } => to_json(&parse_map(&f)?.inverse()),
        Command::Eval { f, x } => to_json(&parse_map(&f)?.evaluate(&x)?),
        Command::SlopeRatio { f, x } => to_json(&parse_map(&f)?.slope_ratio(&x)?),
        Command::Factor { f } => to_json(&factor_one_break(&parse_map(&f)?)),
        Command::Validate { f } => {
            let tuple: BreakTuple = parse(&f)?;
            to_json(&validate_tuple(&tuple))
        }
        Command::SampleCategory {
            f,
            m,
            seed,
            trials,
            denominator_bound,
        } => {
            let cfg = SampleConfig {
                seed,
                denominator_bound,
                trials,
            };
            to_json(&category_experiment(&parse_map(&f)?, m, &cfg)?)
        }
        Command::EscapeLip {
            n,
            intervals,
            adversaries,
        } => {
            let family = IntervalFamily::new(parse_intervals(&intervals)?)?;
            let adversaries = match adversaries {
                Some(a) => parse_maps(&a)?,
                None => vec![PLMap::identity(); family.len()],
            };
            let f = build_escape_lip(n, &family, &adversaries)?;
            to_json(&verify_escape_lip(&f, n, &family, &adversaries)?)
        }
        Command::EscapeHoelder {
            n,
            epsilon,
            intervals,
            adversaries,
        } => {
            let family = SeparatedFamily::new(parse_intervals(&intervals)?)?;
            let adversaries: Vec<PQMap> = match adversaries {
                Some(a) => parse(&a)?,
                None => vec![PQMap::identity(); family.len()],
            };
            let f = build_escape_hoelder(n, epsilon, &family, &adversaries)?;
            to_json(&verify_escape_hoelder(
                &f,
                n,
                epsilon,
                &family,
                &adversaries,
            )?)
        }
        Command::VerifyCert { cert } => {
            let value: serde_json::Value = parse(&cert)?;
            let hoelder = value.get("epsilon").is_some();
            let kind = if hoelder {
                let c: HoelderCertificate = serde_json::from_value(value)
                    .map_err(|e| Failure::Domain(Error::Parse(e.to_string())))?;
                c.check()?;
                "hoelder"
            } else {
                let c: LipEscapeCertificate = serde_json::from_value(value)
                    .map_err(|e| Failure::Domain(Error::Parse(e.to_string())))?;
                c.check()?;
                "lipschitz"
            };
            to_json(&Verified { kind, valid: true })
        }
        Command::Bump { u } => to_json(&bump(&parse(&u)?)?),
        Command::Witness { f, w } => {
            let w: Interval = parse(&w)?;
            to_json(&noncommute_witness(&parse_map(&f)?, &w))
        }
        Command::Embed { f, circle } => {
            let f = parse_map(&f)?;
            if circle {
                to_json(&embed_interval_circle(&f))
            } else {
                to_json(&embed_interval(&f))
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(cli.command).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, &text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
