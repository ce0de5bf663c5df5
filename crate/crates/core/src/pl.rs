//! Increasing piecewise-linear homeomorphisms of `[0,1]`.
//!
//! A [`PLMap`] is stored as the ordered list of its break points `(x, f(x))`
//! together with the two fixed endpoints `(0,0)` and `(1,1)`. The list is
//! canonical: coordinates strictly increase and no three consecutive nodes
//! are collinear, so two maps are equal exactly when their break lists are.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::Rational;

/// A point `(x, y)` of the plane with rational coordinates.
///
/// Inside a [`PLMap`] every break satisfies `0 < x < 1` and `0 < y < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(Rational, Rational)", into = "(Rational, Rational)")]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn swapped(&self) -> Point {
        Point {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

impl From<(Rational, Rational)> for Point {
    fn from((x, y): (Rational, Rational)) -> Self {
        Point { x, y }
    }
}

impl From<Point> for (Rational, Rational) {
    fn from(p: Point) -> Self {
        (p.x, p.y)
    }
}

pub(crate) fn slope(p: &Point, q: &Point) -> Rational {
    (&q.y - &p.y) / (&q.x - &p.x)
}

pub(crate) fn collinear(p: &Point, q: &Point, r: &Point) -> bool {
    (&q.y - &p.y) * (&r.x - &q.x) == (&r.y - &q.y) * (&q.x - &p.x)
}

/// Linear interpolation on the segment `p`–`q` at abscissa `x`.
pub(crate) fn interpolate(p: &Point, q: &Point, x: &Rational) -> Rational {
    &p.y + (&q.y - &p.y) * (x - &p.x) / (&q.x - &p.x)
}

/// Checks both conditions of a valid break chain: strict increase of both
/// coordinates and no collinear triple, with `(0,0)` and `(1,1)` appended.
pub(crate) fn check_chain(points: &[Point]) -> Result<()> {
    let origin = Point::new(Rational::zero(), Rational::zero());
    let corner = Point::new(Rational::one(), Rational::one());
    let chain: Vec<&Point> = std::iter::once(&origin)
        .chain(points.iter())
        .chain(std::iter::once(&corner))
        .collect();
    for (i, w) in chain.windows(2).enumerate() {
        if w[0].x >= w[1].x || w[0].y >= w[1].y {
            // w[1] is chain index i+1, i.e. given index i; the final step
            // blames the last given point
            let index = i.min(points.len().saturating_sub(1));
            return Err(Error::NonMonotone { index });
        }
    }
    for (i, w) in chain.windows(3).enumerate() {
        if collinear(w[0], w[1], w[2]) {
            return Err(Error::CollinearBreak { index: i });
        }
    }
    Ok(())
}

/// Canonical increasing PL self-homeomorphism of the unit interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct PLMap {
    // (0,0), breaks..., (1,1)
    nodes: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    breaks: Vec<Point>,
}

impl TryFrom<RawMap> for PLMap {
    type Error = Error;
    fn try_from(raw: RawMap) -> Result<Self> {
        PLMap::new(raw.breaks)
    }
}

impl From<PLMap> for RawMap {
    fn from(f: PLMap) -> Self {
        RawMap {
            breaks: f.breaks().to_vec(),
        }
    }
}

impl Default for PLMap {
    fn default() -> Self {
        Self::identity()
    }
}

impl PLMap {
    pub fn identity() -> Self {
        PLMap {
            nodes: vec![
                Point::new(Rational::zero(), Rational::zero()),
                Point::new(Rational::one(), Rational::one()),
            ],
        }
    }

    /// Validates a break list and returns the map it defines.
    pub fn new(breaks: Vec<Point>) -> Result<Self> {
        check_chain(&breaks)?;
        let mut nodes = Vec::with_capacity(breaks.len() + 2);
        nodes.push(Point::new(Rational::zero(), Rational::zero()));
        nodes.extend(breaks);
        nodes.push(Point::new(Rational::one(), Rational::one()));
        Ok(PLMap { nodes })
    }

    /// Builds a map from points on its graph that include every true break.
    ///
    /// Points may come in any order, may repeat, and may include the
    /// endpoints or points where the slope does not change; such points are
    /// dropped.
    pub fn from_graph_points(mut points: Vec<Point>) -> Result<Self> {
        points.retain(|p| p.x.is_positive() && p.x < Rational::one());
        points.sort();
        points.dedup();
        for w in points.windows(2) {
            if w[0].x == w[1].x {
                return Err(Error::NonMonotone { index: 0 });
            }
        }
        let mut chain = Vec::with_capacity(points.len() + 2);
        chain.push(Point::new(Rational::zero(), Rational::zero()));
        chain.extend(points);
        chain.push(Point::new(Rational::one(), Rational::one()));
        PLMap::new(prune_collinear(chain))
    }

    pub fn breaks(&self) -> &[Point] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// All nodes including the fixed endpoints.
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Abscissae of the break points, in increasing order.
    pub fn break_points(&self) -> Vec<Rational> {
        self.breaks().iter().map(|p| p.x.clone()).collect()
    }

    pub fn break_count(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn is_identity(&self) -> bool {
        self.nodes.len() == 2
    }

    /// Segment slopes from left to right; there are `break_count() + 1`.
    pub fn slopes(&self) -> Vec<Rational> {
        self.nodes.windows(2).map(|w| slope(&w[0], &w[1])).collect()
    }

    /// Index `i` of the segment `nodes[i]..nodes[i+1]` containing `x`,
    /// preferring the right-hand segment at a node.
    fn segment_index(&self, x: &Rational) -> usize {
        let i = self.nodes.partition_point(|p| &p.x <= x);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::OutOfDomain(x.to_string()));
        }
        if x.is_zero() || x.is_one() {
            return Ok(x.clone());
        }
        let i = self.segment_index(x);
        Ok(interpolate(&self.nodes[i], &self.nodes[i + 1], x))
    }

    /// Evaluates `f⁻¹(y)` without building the inverse.
    pub fn evaluate_inverse(&self, y: &Rational) -> Result<Rational> {
        if y.is_negative() || y > &Rational::one() {
            return Err(Error::OutOfDomain(y.to_string()));
        }
        if y.is_zero() || y.is_one() {
            return Ok(y.clone());
        }
        let i = self
            .nodes
            .partition_point(|p| &p.y <= y)
            .saturating_sub(1)
            .min(self.nodes.len() - 2);
        let (p, q) = (&self.nodes[i], &self.nodes[i + 1]);
        Ok(interpolate(&p.swapped(), &q.swapped(), y))
    }

    /// The composite `self ∘ g`, i.e. `x ↦ self(g(x))`.
    ///
    /// Candidate breaks are `B(g) ∪ g⁻¹(B(self))`; candidates where the
    /// slope does not actually change are pruned.
    pub fn compose(&self, g: &PLMap) -> PLMap {
        let mut xs: Vec<Rational> = g.break_points();
        for b in self.breaks() {
            xs.push(g.evaluate_inverse(&b.x).expect("break lies in (0,1)"));
        }
        xs.sort();
        xs.dedup();
        let mut chain = Vec::with_capacity(xs.len() + 2);
        chain.push(Point::new(Rational::zero(), Rational::zero()));
        for x in xs {
            let y = self
                .evaluate(&g.evaluate(&x).expect("x in (0,1)"))
                .expect("g(x) in (0,1)");
            chain.push(Point::new(x, y));
        }
        chain.push(Point::new(Rational::one(), Rational::one()));
        PLMap {
            nodes: prune_collinear_nodes(chain),
        }
    }

    /// The inverse map: the break list with coordinates swapped.
    pub fn inverse(&self) -> PLMap {
        PLMap {
            nodes: self.nodes.iter().map(Point::swapped).collect(),
        }
    }

    /// Slope ratio `f′₊(x) / f′₋(x)` at an interior point.
    pub fn slope_ratio(&self, x: &Rational) -> Result<Rational> {
        if !x.is_positive() || x >= &Rational::one() {
            return Err(Error::OutOfDomain(x.to_string()));
        }
        match self.nodes.binary_search_by(|p| p.x.cmp(x)) {
            Ok(j) => {
                let left = slope(&self.nodes[j - 1], &self.nodes[j]);
                let right = slope(&self.nodes[j], &self.nodes[j + 1]);
                Ok(right / left)
            }
            Err(_) => Ok(Rational::one()),
        }
    }

    /// Right derivative at `x ∈ [0,1)`.
    pub fn right_slope_at(&self, x: &Rational) -> Rational {
        let i = self.segment_index(x);
        slope(&self.nodes[i], &self.nodes[i + 1])
    }

    pub fn max_slope(&self) -> Rational {
        self.slopes()
            .into_iter()
            .max()
            .expect("at least one segment")
    }

    pub fn min_slope(&self) -> Rational {
        self.slopes()
            .into_iter()
            .min()
            .expect("at least one segment")
    }

    /// `max(max_slope(f), max_slope(f⁻¹))`, the optimal bi-Lipschitz constant.
    pub fn bilipschitz_constant(&self) -> Rational {
        let max = self.max_slope();
        let inv = self.min_slope().recip();
        max.max(inv)
    }

    /// Largest slope among segments meeting the interior of `j`.
    pub fn max_slope_on(&self, j: &Interval) -> Rational {
        self.nodes
            .windows(2)
            .filter(|w| &w[0].x < j.hi() && j.lo() < &w[1].x)
            .map(|w| slope(&w[0], &w[1]))
            .max()
            .expect("interval meets [0,1]")
    }

    /// Image of an interval inside `[0,1]`, with the same endpoint flags.
    pub fn image(&self, j: &Interval) -> Result<Interval> {
        let lo = self.evaluate(j.lo())?;
        let hi = self.evaluate(j.hi())?;
        Interval::new(lo, hi, j.lo_closed(), j.hi_closed())
    }
}

/// Drops interior nodes whose neighbouring segments have equal slopes.
fn prune_collinear_nodes(chain: Vec<Point>) -> Vec<Point> {
    if chain.len() <= 2 {
        return chain;
    }
    let slopes: Vec<Rational> = chain.windows(2).map(|w| slope(&w[0], &w[1])).collect();
    let last = chain.len() - 1;
    chain
        .into_iter()
        .enumerate()
        .filter(|(i, _)| *i == 0 || *i == last || slopes[i - 1] != slopes[*i])
        .map(|(_, p)| p)
        .collect()
}

/// Same as [`prune_collinear_nodes`] but returns only the interior points.
fn prune_collinear(chain: Vec<Point>) -> Vec<Point> {
    let mut nodes = prune_collinear_nodes(chain);
    nodes.pop();
    nodes.remove(0);
    nodes
}
