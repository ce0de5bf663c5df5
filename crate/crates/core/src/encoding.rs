//! Break-tuple coordinates for maps with `n` breaks, seeded sampling of
//! those coordinates, and the product experiment that measures how often
//! `#B(fg)` reaches its maximum `#B(f) + #B(g)`.
//!
//! # Randomness
//!
//! Every draw goes through [`trial_rng`]: a ChaCha8 generator seeded with
//! the configured 64-bit seed, with the trial index selecting the stream.
//! Trial `i` of any experiment therefore sees the same numbers no matter how
//! trials are scheduled across threads.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pl::{check_chain, PLMap, Point};
use crate::rational::Rational;

/// Coordinates `(z₁, …, zₙ)` of a candidate map, one point per break.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BreakTuple {
    pub points: Vec<Point>,
}

impl BreakTuple {
    pub fn new(points: Vec<Point>) -> Self {
        BreakTuple { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// True iff the tuple is increasing in both coordinates and has no three
/// consecutive collinear points, counting `(0,0)` and `(1,1)`.
pub fn validate_tuple(t: &BreakTuple) -> bool {
    check_chain(&t.points).is_ok()
}

pub fn encode(f: &PLMap) -> BreakTuple {
    BreakTuple::new(f.breaks().to_vec())
}

pub fn decode(t: &BreakTuple) -> Result<PLMap> {
    if !validate_tuple(t) {
        return Err(Error::InvalidTuple);
    }
    PLMap::new(t.points.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub denominator_bound: u64,
    pub trials: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            denominator_bound: 1_000_000,
            trials: 1000,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.denominator_bound < 2 {
            return Err(Error::InvalidConfig(
                "denominator bound must be at least 2".into(),
            ));
        }
        if self.denominator_bound > i64::MAX as u64 {
            return Err(Error::InvalidConfig("denominator bound too large".into()));
        }
        Ok(())
    }
}

/// The generator for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform draw from the reduced fractions in `(0,1)` with denominator at
/// most `bound` (`bound >= 2`).
pub fn random_fraction<R: Rng + ?Sized>(rng: &mut R, bound: u64) -> Rational {
    loop {
        let q = rng.gen_range(2..=bound);
        let p = rng.gen_range(1..q);
        if p.gcd(&q) == 1 {
            return Rational::new(p as i64, q as i64);
        }
    }
}

const MAX_REJECTIONS: usize = 100_000;

/// Draws a map with exactly `n` breaks from the given generator.
///
/// Both coordinate lists are drawn independently, sorted, and the whole
/// draw is rejected if the result is not a valid break chain.
pub fn sample_an_with<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: u64) -> Result<PLMap> {
    if n == 0 {
        return Ok(PLMap::identity());
    }
    for _ in 0..MAX_REJECTIONS {
        let mut xs: Vec<Rational> = (0..n).map(|_| random_fraction(rng, bound)).collect();
        let mut ys: Vec<Rational> = (0..n).map(|_| random_fraction(rng, bound)).collect();
        xs.sort();
        ys.sort();
        let points: Vec<Point> = xs
            .into_iter()
            .zip(ys)
            .map(|(x, y)| Point::new(x, y))
            .collect();
        if let Ok(f) = PLMap::new(points) {
            return Ok(f);
        }
    }
    Err(Error::InvalidConfig(format!(
        "no valid {n}-break map found with denominators up to {bound}"
    )))
}

/// Draws a map with exactly `n` breaks using stream 0 of `cfg.seed`.
pub fn sample_an(n: usize, cfg: &SampleConfig) -> Result<PLMap> {
    cfg.validate()?;
    sample_an_with(&mut trial_rng(cfg.seed, 0), n, cfg.denominator_bound)
}

/// A trial where `fg` lost at least one break.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficientTrial {
    pub trial: usize,
    pub g: PLMap,
    pub product_breaks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryReport {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub maximal_count: usize,
    pub deficient_examples: Vec<DeficientTrial>,
}

impl CategoryReport {
    pub fn maximal_fraction(&self) -> f64 {
        self.maximal_count as f64 / self.trials as f64
    }
}

fn check_product(f: &PLMap, trial: usize, g: &PLMap) -> Option<DeficientTrial> {
    let k = f.compose(g).break_count();
    (k < f.break_count() + g.break_count()).then(|| DeficientTrial {
        trial,
        g: g.clone(),
        product_breaks: k,
    })
}

/// Builds a report from an explicit list of right factors `g`.
pub fn tally(f: &PLMap, m: usize, gs: &[PLMap]) -> CategoryReport {
    let deficient_examples: Vec<DeficientTrial> = gs
        .iter()
        .enumerate()
        .filter_map(|(i, g)| check_product(f, i, g))
        .collect();
    CategoryReport {
        n: f.break_count(),
        m,
        trials: gs.len(),
        maximal_count: gs.len() - deficient_examples.len(),
        deficient_examples,
    }
}

/// Samples `cfg.trials` maps `g` with `m` breaks and counts how many
/// products `fg` have the full `#B(f) + m` breaks.
pub fn category_experiment(f: &PLMap, m: usize, cfg: &SampleConfig) -> Result<CategoryReport> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let outcomes: Vec<Result<Option<DeficientTrial>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let g = sample_an_with(&mut rng, m, cfg.denominator_bound)?;
            Ok(check_product(f, i, &g))
        })
        .collect();
    let mut deficient_examples = Vec::new();
    for o in outcomes {
        if let Some(d) = o? {
            deficient_examples.push(d);
        }
    }
    Ok(CategoryReport {
        n: f.break_count(),
        m,
        trials: cfg.trials,
        maximal_count: cfg.trials - deficient_examples.len(),
        deficient_examples,
    })
}

/// A break `x0` of `g` that `g` sends onto a break `a` of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub x0: Rational,
    pub a: Rational,
    /// `f*(a) · g*(x0) = 1`, so the merged break disappears entirely.
    pub cancels: bool,
}

pub fn collisions(f: &PLMap, g: &PLMap) -> Vec<Collision> {
    let fb = f.break_points();
    g.breaks()
        .iter()
        .filter(|b| fb.binary_search(&b.y).is_ok())
        .map(|b| {
            let ratio =
                f.slope_ratio(&b.y).expect("break of f") * g.slope_ratio(&b.x).expect("break of g");
            Collision {
                x0: b.x.clone(),
                a: b.y.clone(),
                cancels: ratio.is_one(),
            }
        })
        .collect()
}

/// Re-checks a deficient product independently of `compose`'s pruning.
///
/// A deficient `g` must send one of its breaks onto a break of `f`, and the
/// break count of `fg` is then `#B(f) + #B(g) − collisions − cancellations`.
pub fn reverify_deficient(f: &PLMap, g: &PLMap, product_breaks: usize) -> bool {
    let cs = collisions(f, g);
    if cs.is_empty() {
        return false;
    }
    let cancelled = cs.iter().filter(|c| c.cancels).count();
    let predicted = f.break_count() + g.break_count() - cs.len() - cancelled;
    predicted == product_breaks && product_breaks < f.break_count() + g.break_count()
}
