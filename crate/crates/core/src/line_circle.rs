//! PL homeomorphisms of the line with finitely many breaks, lifts of PL
//! circle maps to `ℝ/2ℤ`, and the copy of the interval group inside both.
//!
//! The interval group embeds as the subgroup `H` of maps fixing everything
//! outside `[0,1]`. A map lies in `H` exactly when it commutes with every map
//! fixing `[0,1]` pointwise; [`centralizer_membership_probe`] tests that with
//! bumps supported off `[0,1]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{trial_rng, SampleConfig};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::pl::{interpolate, slope, PLMap, Point};
use crate::rational::Rational;

fn check_increasing(nodes: &[Point]) -> Result<()> {
    for (i, w) in nodes.windows(2).enumerate() {
        if w[0].x >= w[1].x || w[0].y >= w[1].y {
            return Err(Error::NonMonotone { index: i + 1 });
        }
    }
    Ok(())
}

fn check_slope(s: &Rational) -> Result<()> {
    if !s.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "tail slope {s} must be positive"
        )));
    }
    Ok(())
}

/// Increasing PL bijection of `ℝ` with finitely many breaks and affine tails.
///
/// `nodes` are exactly the breaks; an affine map keeps the single anchor
/// `(0, f(0))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LineRepr", into = "LineRepr")]
pub struct PLMapLine {
    nodes: Vec<Point>,
    left_slope: Rational,
    right_slope: Rational,
}

#[derive(Serialize, Deserialize)]
struct LineRepr {
    breaks: Vec<Point>,
    left_slope: Rational,
    right_slope: Rational,
}

impl TryFrom<LineRepr> for PLMapLine {
    type Error = Error;
    fn try_from(r: LineRepr) -> Result<Self> {
        PLMapLine::new(r.breaks, r.left_slope, r.right_slope)
    }
}

impl From<PLMapLine> for LineRepr {
    fn from(f: PLMapLine) -> Self {
        LineRepr {
            breaks: f.nodes,
            left_slope: f.left_slope,
            right_slope: f.right_slope,
        }
    }
}

impl PLMapLine {
    pub fn identity() -> Self {
        PLMapLine::translation(Rational::zero())
    }

    pub fn translation(t: Rational) -> Self {
        PLMapLine {
            nodes: vec![Point::new(Rational::zero(), t)],
            left_slope: Rational::one(),
            right_slope: Rational::one(),
        }
    }

    /// Accepts redundant nodes and returns the canonical form.
    pub fn new(nodes: Vec<Point>, left_slope: Rational, right_slope: Rational) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter(
                "a line map needs at least one node".into(),
            ));
        }
        check_increasing(&nodes)?;
        check_slope(&left_slope)?;
        check_slope(&right_slope)?;
        Ok(PLMapLine::canonical(nodes, left_slope, right_slope))
    }

    fn canonical(nodes: Vec<Point>, left_slope: Rational, right_slope: Rational) -> Self {
        let mut slopes = Vec::with_capacity(nodes.len() + 1);
        slopes.push(left_slope.clone());
        slopes.extend(nodes.windows(2).map(|w| slope(&w[0], &w[1])));
        slopes.push(right_slope.clone());
        let kept: Vec<Point> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| slopes[*i] != slopes[i + 1])
            .map(|(_, p)| p.clone())
            .collect();
        let nodes = if kept.is_empty() {
            let zero = Rational::zero();
            let y = &nodes[0].y + &left_slope * (&zero - &nodes[0].x);
            vec![Point::new(zero, y)]
        } else {
            kept
        };
        PLMapLine {
            nodes,
            left_slope,
            right_slope,
        }
    }

    pub fn breaks(&self) -> &[Point] {
        &self.nodes
    }

    pub fn left_slope(&self) -> &Rational {
        &self.left_slope
    }

    pub fn right_slope(&self) -> &Rational {
        &self.right_slope
    }

    pub fn is_identity(&self) -> bool {
        *self == PLMapLine::identity()
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        let first = &self.nodes[0];
        let last = &self.nodes[self.nodes.len() - 1];
        if x <= &first.x {
            return &first.y + &self.left_slope * (x - &first.x);
        }
        if x >= &last.x {
            return &last.y + &self.right_slope * (x - &last.x);
        }
        let i = self.nodes.partition_point(|p| &p.x <= x);
        interpolate(&self.nodes[i - 1], &self.nodes[i], x)
    }

    pub fn inverse(&self) -> PLMapLine {
        PLMapLine::canonical(
            self.nodes.iter().map(Point::swapped).collect(),
            self.left_slope.recip(),
            self.right_slope.recip(),
        )
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &PLMapLine) -> PLMapLine {
        let g_inv = g.inverse();
        let mut xs: Vec<Rational> = g.nodes.iter().map(|p| p.x.clone()).collect();
        xs.extend(self.nodes.iter().map(|p| g_inv.evaluate(&p.x)));
        xs.sort();
        xs.dedup();
        let nodes = xs
            .into_iter()
            .map(|x| {
                let y = self.evaluate(&g.evaluate(&x));
                Point::new(x, y)
            })
            .collect();
        PLMapLine::canonical(
            nodes,
            &self.left_slope * &g.left_slope,
            &self.right_slope * &g.right_slope,
        )
    }

    /// Steepest slope, tails included.
    pub fn max_slope(&self) -> Rational {
        self.nodes
            .windows(2)
            .map(|w| slope(&w[0], &w[1]))
            .chain([self.left_slope.clone(), self.right_slope.clone()])
            .max()
            .expect("tails exist")
    }
}

/// `f` on `[0,1]`, the identity elsewhere.
pub fn embed_interval(f: &PLMap) -> PLMapLine {
    PLMapLine::canonical(f.nodes().to_vec(), Rational::one(), Rational::one())
}

/// Bump of the line on `(a, b)`: apex `m ↦ m + (b − a)/8`.
pub fn line_bump(u: &Interval) -> PLMapLine {
    let m = u.midpoint();
    let lift = u.length() / Rational::integer(8);
    PLMapLine::canonical(
        vec![
            Point::new(u.lo().clone(), u.lo().clone()),
            Point::new(m.clone(), &m + &lift),
            Point::new(u.hi().clone(), u.hi().clone()),
        ],
        Rational::one(),
        Rational::one(),
    )
}

fn two() -> Rational {
    Rational::integer(2)
}

/// `x − 2⌊x/2⌋ ∈ [0,2)` together with `⌊x/2⌋`.
fn reduce(x: &Rational) -> (Rational, Rational) {
    let k = Rational::from((x / two()).floor());
    (x - &k * two(), k)
}

/// Lift of a PL circle homeomorphism: `f(x + 2) = f(x) + 2`.
///
/// `nodes` cover one period, start at `x = 0`, and lie in `[0,2)`; the
/// node at 0 is kept even when it is not a break.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CircleRepr", into = "CircleRepr")]
pub struct PLMapCircle {
    nodes: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct CircleRepr {
    breaks: Vec<Point>,
    left_slope: Rational,
    right_slope: Rational,
    periodic: bool,
}

impl TryFrom<CircleRepr> for PLMapCircle {
    type Error = Error;
    fn try_from(r: CircleRepr) -> Result<Self> {
        if !r.periodic {
            return Err(Error::NotPeriodic("\"periodic\" must be true".into()));
        }
        let f = PLMapCircle::new(r.breaks)?;
        let s = f.wrap_slope();
        if r.left_slope != s || r.right_slope != s {
            return Err(Error::NotPeriodic(format!(
                "slopes around the seam must both equal {s}"
            )));
        }
        Ok(f)
    }
}

impl From<PLMapCircle> for CircleRepr {
    fn from(f: PLMapCircle) -> Self {
        let s = f.wrap_slope();
        CircleRepr {
            breaks: f.nodes,
            left_slope: s.clone(),
            right_slope: s,
            periodic: true,
        }
    }
}

impl PLMapCircle {
    pub fn identity() -> Self {
        PLMapCircle {
            nodes: vec![Point::new(Rational::zero(), Rational::zero())],
        }
    }

    pub fn new(nodes: Vec<Point>) -> Result<Self> {
        match nodes.first() {
            Some(p) if p.x.is_zero() => {}
            _ => {
                return Err(Error::NotPeriodic(
                    "the first node must sit at x = 0".into(),
                ))
            }
        }
        if let Some(p) = nodes.iter().find(|p| p.x >= two()) {
            return Err(Error::NotPeriodic(format!(
                "node at x = {} lies past one period",
                p.x
            )));
        }
        check_increasing(&nodes)?;
        let last = &nodes[nodes.len() - 1];
        if last.y >= &nodes[0].y + two() {
            return Err(Error::NotPeriodic("values exceed one period".into()));
        }
        Ok(PLMapCircle::canonical(nodes))
    }

    fn canonical(nodes: Vec<Point>) -> Self {
        let n = nodes.len();
        let end = Point::new(two(), &nodes[0].y + two());
        let mut kept = vec![nodes[0].clone()];
        for i in 1..n {
            let next = if i + 1 < n { &nodes[i + 1] } else { &end };
            if slope(&nodes[i - 1], &nodes[i]) != slope(&nodes[i], next) {
                kept.push(nodes[i].clone());
            }
        }
        PLMapCircle { nodes: kept }
    }

    /// Nodes of one period, starting with the node at 0.
    pub fn breaks(&self) -> &[Point] {
        &self.nodes
    }

    /// Nodes over `[0,2]` with the closing node `(2, f(0) + 2)`.
    fn window(&self) -> Vec<Point> {
        let mut w = self.nodes.clone();
        w.push(Point::new(two(), &self.nodes[0].y + two()));
        w
    }

    /// Slope on both sides of `x = 0`.
    fn wrap_slope(&self) -> Rational {
        let w = self.window();
        slope(&w[w.len() - 2], &w[w.len() - 1])
    }

    pub fn is_identity(&self) -> bool {
        *self == PLMapCircle::identity()
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        let (r, k) = reduce(x);
        let w = self.window();
        let i = w.partition_point(|p| p.x <= r).min(w.len() - 1);
        interpolate(&w[i - 1], &w[i], &r) + k * two()
    }

    fn evaluate_inverse(&self, y: &Rational) -> Rational {
        let y0 = &self.nodes[0].y;
        // shift y into [f(0), f(0) + 2)
        let (r, k) = reduce(&(y - y0));
        let target = y0 + &r;
        let w = self.window();
        let i = w.partition_point(|p| p.y <= target).min(w.len() - 1);
        interpolate(&w[i - 1].swapped(), &w[i].swapped(), &target) + k * two()
    }

    pub fn inverse(&self) -> PLMapCircle {
        let mut nodes: Vec<Point> = self
            .nodes
            .iter()
            .map(|p| {
                let (y, k) = reduce(&p.y);
                Point::new(y, &p.x - k * two())
            })
            .collect();
        nodes.push(Point::new(
            Rational::zero(),
            self.evaluate_inverse(&Rational::zero()),
        ));
        nodes.sort_by(|a, b| a.x.cmp(&b.x));
        nodes.dedup();
        PLMapCircle::canonical(nodes)
    }

    /// `self ∘ g`, rejected with `NotPeriodic` if the result fails to close
    /// up over one period.
    pub fn compose(&self, g: &PLMapCircle) -> Result<PLMapCircle> {
        let mut xs: Vec<Rational> = g.nodes.iter().map(|p| p.x.clone()).collect();
        xs.extend(
            self.nodes
                .iter()
                .map(|p| reduce(&g.evaluate_inverse(&p.x)).0),
        );
        xs.sort();
        xs.dedup();
        let nodes: Vec<Point> = xs
            .into_iter()
            .map(|x| {
                let y = self.evaluate(&g.evaluate(&x));
                Point::new(x, y)
            })
            .collect();
        let closing = self.evaluate(&g.evaluate(&two()));
        if closing != &nodes[0].y + two() {
            return Err(Error::NotPeriodic(format!(
                "composite sends 2 to {closing}, expected {} + 2",
                nodes[0].y
            )));
        }
        check_increasing(&nodes)?;
        Ok(PLMapCircle::canonical(nodes))
    }

    pub fn max_slope(&self) -> Rational {
        self.window()
            .windows(2)
            .map(|w| slope(&w[0], &w[1]))
            .max()
            .expect("window has two nodes")
    }
}

/// `f` on `[0,1]`, the identity on `[1,2]`, extended periodically.
pub fn embed_interval_circle(f: &PLMap) -> PLMapCircle {
    PLMapCircle::canonical(f.nodes().to_vec())
}

/// Periodized bump on `(a, b) + 2ℤ` with `0 ≤ a < b ≤ 2`.
pub fn circle_bump(u: &Interval) -> Result<PLMapCircle> {
    if u.lo().is_negative() || u.hi() > &two() {
        return Err(Error::DegenerateInterval {
            lo: u.lo().to_string(),
            hi: u.hi().to_string(),
        });
    }
    let b = line_bump(u);
    let mut nodes = vec![Point::new(Rational::zero(), Rational::zero())];
    nodes.extend(b.breaks().iter().filter(|p| p.x < two()).cloned());
    nodes.dedup_by(|b, a| a.x == b.x);
    PLMapCircle::new(nodes)
}

/// One map fixing `[0,1]` pointwise that fails to commute with `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerWitness {
    /// Support of the bump.
    pub u: Interval,
    /// A point moved by `h` at which the two orders of composition differ.
    pub x0: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerProbe {
    /// Every sampled bump commuted and the guided search found nothing.
    pub all_commute: bool,
    pub probes: usize,
    pub witness: Option<CentralizerWitness>,
}

fn random_subinterval<R: Rng + ?Sized>(
    rng: &mut R,
    lo: &Rational,
    hi: &Rational,
    bound: u64,
) -> Interval {
    let a = rng.gen_range(0..bound);
    let b = rng.gen_range(a + 1..=bound);
    let step = (hi - lo) / Rational::integer(bound as i64);
    Interval::open(
        lo + &step * Rational::integer(a as i64),
        lo + &step * Rational::integer(b as i64),
    )
    .expect("a < b")
}

/// Points at one and two thirds of each gap in `cuts`.
fn thirds(cuts: &[Rational]) -> Vec<Rational> {
    let three = Rational::integer(3);
    cuts.windows(2)
        .flat_map(|w| {
            let step = (&w[1] - &w[0]) / &three;
            [&w[0] + &step, &w[0] + &step * two()]
        })
        .collect()
}

/// A point outside `[0,1]` moved by `h`, if any.
///
/// `h − id` is linear between consecutive nodes and on each tail, so it
/// vanishes on a piece exactly when it vanishes at two of its points.
fn moved_point_line(h: &PLMapLine) -> Option<Rational> {
    let one = Rational::one();
    let xs: Vec<Rational> = h.nodes.iter().map(|p| p.x.clone()).collect();
    let lo = xs[0].clone().min(Rational::zero()) - &one;
    let hi = xs[xs.len() - 1].clone().max(one.clone()) + &one;
    let mut left = vec![lo];
    left.extend(xs.iter().filter(|x| x.is_negative()).cloned());
    left.push(Rational::zero());
    let mut right = vec![one.clone()];
    right.extend(xs.iter().filter(|x| *x > &one).cloned());
    right.push(hi);
    thirds(&left)
        .into_iter()
        .chain(thirds(&right))
        .find(|x| &h.evaluate(x) != x)
}

fn line_commutes(h: &PLMapLine, g: &PLMapLine) -> bool {
    h.compose(g) == g.compose(h)
}

/// Bump around `x0` disjoint from `[0,1]` and from its own image under `h`.
fn displaced_bump(
    x0: &Rational,
    displacement: &Rational,
    lip: &Rational,
    room: &Rational,
) -> Interval {
    let a = displacement / (two() * (Rational::one() + lip));
    let b = room / two();
    let delta = a.min(b);
    Interval::open(x0 - &delta, x0 + &delta).expect("delta > 0")
}

/// Tests `h ∈ H`: samples `cfg.trials` bumps off `[0,1]`, then runs a
/// guided search that succeeds whenever `h` moves a point outside `[0,1]`.
pub fn centralizer_membership_probe(h: &PLMapLine, cfg: &SampleConfig) -> Result<CentralizerProbe> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, 0);
    let one = Rational::one();
    let span_lo = h.nodes[0].x.clone().min(Rational::zero()) - &one;
    let span_hi = h.nodes[h.nodes.len() - 1].x.clone().max(one.clone()) + &one;
    for _ in 0..cfg.trials {
        let u = if rng.gen_bool(0.5) {
            random_subinterval(&mut rng, &span_lo, &Rational::zero(), cfg.denominator_bound)
        } else {
            random_subinterval(&mut rng, &one, &span_hi, cfg.denominator_bound)
        };
        if !line_commutes(h, &line_bump(&u)) {
            let x0 = u.midpoint();
            return Ok(CentralizerProbe {
                all_commute: false,
                probes: cfg.trials,
                witness: Some(CentralizerWitness { u, x0 }),
            });
        }
    }
    let witness = moved_point_line(h).map(|x0| {
        let displacement = (h.evaluate(&x0) - &x0).abs();
        let room = if x0.is_negative() {
            x0.abs()
        } else {
            &x0 - &one
        };
        let u = displaced_bump(&x0, &displacement, &h.max_slope(), &room);
        debug_assert!(!line_commutes(h, &line_bump(&u)));
        CentralizerWitness { u, x0 }
    });
    Ok(CentralizerProbe {
        all_commute: witness.is_none(),
        probes: cfg.trials,
        witness,
    })
}

impl CentralizerWitness {
    pub fn verify_line(&self, h: &PLMapLine) -> bool {
        let outside = self.u.hi() <= &Rational::zero() || self.u.lo() >= &Rational::one();
        outside && !line_commutes(h, &line_bump(&self.u))
    }

    pub fn verify_circle(&self, h: &PLMapCircle) -> bool {
        let inside = self.u.lo() >= &Rational::one() && self.u.hi() <= &two();
        inside
            && match circle_bump(&self.u) {
                Ok(g) => !circle_commutes(h, &g),
                Err(_) => false,
            }
    }
}

fn circle_commutes(h: &PLMapCircle, g: &PLMapCircle) -> bool {
    match (h.compose(g), g.compose(h)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Distance from `t` to the nearest even integer.
fn dist_to_even(t: &Rational) -> Rational {
    let (r, _) = reduce(t);
    r.clone().min(two() - r)
}

/// A point of `(1,2)` whose image is not congruent to it modulo 2.
fn moved_point_circle(h: &PLMapCircle) -> Option<Rational> {
    let one = Rational::one();
    let mut cuts = vec![one.clone()];
    cuts.extend(h.nodes.iter().filter(|p| p.x > one).map(|p| p.x.clone()));
    cuts.push(two());
    for w in cuts.windows(2) {
        let (s, t) = (&w[0], &w[1]);
        let vs = h.evaluate(s) - s;
        let vt = h.evaluate(t) - t;
        if vs != vt {
            // stay within the piece and short of the next even value
            let ds = dist_to_even(&vs);
            let spread = (&vt - &vs).abs();
            let eps = if ds.is_zero() {
                spread.clone().min(one.clone()) / two()
            } else {
                ds.min(spread.clone()) / two()
            };
            return Some(s + (t - s) * eps / spread);
        }
        if !dist_to_even(&vs).is_zero() {
            return Some(s + (t - s) / Rational::integer(3));
        }
    }
    None
}

/// Circle version of [`centralizer_membership_probe`]: bumps on `(1,2)`
/// periodized with period 2.
///
/// Deck translations `x ↦ x + 2k` induce the identity on `ℝ/2ℤ` and commute
/// with every periodic map, so they pass this probe.
pub fn centralizer_membership_probe_circle(
    h: &PLMapCircle,
    cfg: &SampleConfig,
) -> Result<CentralizerProbe> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, 0);
    let one = Rational::one();
    for _ in 0..cfg.trials {
        let u = random_subinterval(&mut rng, &one, &two(), cfg.denominator_bound);
        if !circle_commutes(h, &circle_bump(&u)?) {
            let x0 = u.midpoint();
            return Ok(CentralizerProbe {
                all_commute: false,
                probes: cfg.trials,
                witness: Some(CentralizerWitness { u, x0 }),
            });
        }
    }
    let witness = moved_point_circle(h).map(|x0| {
        let displacement = dist_to_even(&(h.evaluate(&x0) - &x0));
        let room = (&x0 - &one).min(two() - &x0);
        let u = displaced_bump(&x0, &displacement, &h.max_slope(), &room);
        CentralizerWitness { u, x0 }
    });
    Ok(CentralizerProbe {
        all_commute: witness.is_none(),
        probes: cfg.trials,
        witness,
    })
}
