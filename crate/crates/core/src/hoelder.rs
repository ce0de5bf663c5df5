//! Diagonal construction of a `C^{1+ε}` diffeomorphism escaping every right
//! translate `B_n g_k`, where `B_n` holds the maps `f` with both `f′` and
//! `(f⁻¹)′` `n`-Hölder: `|f′(x) − f′(y)| < n|x − y|^ε`.
//!
//! Maps are carried as [`PQMap`]s: antiderivatives of positive PL derivative
//! profiles, so everything stays in exact rational arithmetic. Powers
//! `t^ε` with `ε = p/q` are never formed directly. Comparisons of the form
//! `a < c·t^ε` are decided as `a^q < c^q·t^p`, and interval lengths are
//! required to be exact `q`-th powers so that `ℓ^ε` itself is rational.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::lipschitz::{Case, Side};
use crate::pl::{collinear, interpolate, slope, Point};
use crate::rational::{integer_root_floor, Rational};

/// `ε = p/q` in lowest terms with `0 < ε < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HoelderExponent {
    p: u32,
    q: u32,
}

impl HoelderExponent {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || p >= q || p.gcd(&q) != 1 {
            return Err(Error::InvalidParameter(format!(
                "Hölder exponent {p}/{q} must be in lowest terms with 0 < p < q"
            )));
        }
        Ok(HoelderExponent { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.p as i64, self.q as i64)
    }

    /// `t^ε` when `t` is a rational `q`-th power.
    pub fn power_of(&self, t: &Rational) -> Option<Rational> {
        t.exact_root(self.q).map(|r| r.pow(self.p as i32))
    }

    /// Compares `|diff|` with `c·|dist|^ε` through `|diff|^q` vs `c^q·|dist|^p`.
    pub fn compare(&self, diff: &Rational, c: &Rational, dist: &Rational) -> Ordering {
        let lhs = diff.abs().pow(self.q as i32);
        let rhs = c.pow(self.q as i32) * dist.abs().pow(self.p as i32);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for HoelderExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for HoelderExponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("exponent {s:?} is not of the form p/q")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("malformed exponent {s:?}")))
        };
        HoelderExponent::new(parse(p)?, parse(q)?)
    }
}

impl Serialize for HoelderExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HoelderExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Increasing `C¹` diffeomorphism of `[0,1]` with PL derivative.
///
/// `nodes` are `(x, f′(x))` from `x = 0` to `x = 1` with no redundant
/// collinear node; `values[i] = f(nodes[i].x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PQRepr", into = "PQRepr")]
pub struct PQMap {
    nodes: Vec<Point>,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct PQRepr {
    derivative_breaks: Vec<Point>,
    boundary: (Rational, Rational),
}

impl TryFrom<PQRepr> for PQMap {
    type Error = Error;
    fn try_from(r: PQRepr) -> Result<Self> {
        PQMap::from_parts(r.derivative_breaks, r.boundary.0, r.boundary.1)
    }
}

impl From<PQMap> for PQRepr {
    fn from(f: PQMap) -> Self {
        let last = f.nodes.len() - 1;
        PQRepr {
            derivative_breaks: f.nodes[1..last].to_vec(),
            boundary: (f.nodes[0].y.clone(), f.nodes[last].y.clone()),
        }
    }
}

/// Exact integral of a PL profile over its whole node range.
fn trapezoid(nodes: &[Point]) -> Rational {
    nodes
        .windows(2)
        .map(|w| (&w[1].x - &w[0].x) * (&w[0].y + &w[1].y) / Rational::integer(2))
        .fold(Rational::zero(), |a, b| a + b)
}

fn check_profile(nodes: &[Point]) -> Result<()> {
    for (i, w) in nodes.windows(2).enumerate() {
        if w[0].x >= w[1].x {
            return Err(Error::NonMonotone { index: i + 1 });
        }
    }
    if let Some(bad) = nodes.iter().find(|p| !p.y.is_positive()) {
        return Err(Error::NonPositiveDerivative(bad.x.to_string()));
    }
    Ok(())
}

fn prune(nodes: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(nodes.len());
    for p in nodes {
        if out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

impl PQMap {
    pub fn identity() -> Self {
        PQMap::new(vec![
            Point::new(Rational::zero(), Rational::one()),
            Point::new(Rational::one(), Rational::one()),
        ])
        .expect("constant profile 1")
    }

    /// From a full profile with nodes at `x = 0` and `x = 1`.
    pub fn new(nodes: Vec<Point>) -> Result<Self> {
        match (nodes.first(), nodes.last()) {
            (Some(a), Some(b)) if a.x.is_zero() && b.x.is_one() && nodes.len() >= 2 => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "derivative profile must span [0,1]".into(),
                ))
            }
        }
        check_profile(&nodes)?;
        let area = trapezoid(&nodes);
        if !area.is_one() {
            return Err(Error::AreaMismatch {
                expected: "1".into(),
                actual: area.to_string(),
            });
        }
        let nodes = prune(nodes);
        let mut values = Vec::with_capacity(nodes.len());
        let mut acc = Rational::zero();
        values.push(acc.clone());
        for w in nodes.windows(2) {
            acc = acc + trapezoid(w);
            values.push(acc.clone());
        }
        Ok(PQMap { nodes, values })
    }

    /// From interior breaks plus the derivative values at 0 and 1.
    pub fn from_parts(breaks: Vec<Point>, at_zero: Rational, at_one: Rational) -> Result<Self> {
        if let Some(i) = breaks
            .iter()
            .position(|p| !p.x.is_positive() || p.x >= Rational::one())
        {
            return Err(Error::OutOfDomain(breaks[i].x.to_string()));
        }
        let mut nodes = Vec::with_capacity(breaks.len() + 2);
        nodes.push(Point::new(Rational::zero(), at_zero));
        nodes.extend(breaks);
        nodes.push(Point::new(Rational::one(), at_one));
        PQMap::new(nodes)
    }

    /// `(x, f′(x))` nodes including both ends.
    pub fn profile(&self) -> &[Point] {
        &self.nodes
    }

    pub fn is_identity(&self) -> bool {
        self.nodes.len() == 2 && self.nodes.iter().all(|p| p.y.is_one())
    }

    fn segment(&self, x: &Rational) -> Result<usize> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::OutOfDomain(x.to_string()));
        }
        let i = self.nodes.partition_point(|p| &p.x <= x);
        Ok(i.saturating_sub(1).min(self.nodes.len() - 2))
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational> {
        let i = self.segment(x)?;
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let t = x - &a.x;
        let s = slope(a, b);
        Ok(&self.values[i] + &a.y * &t + s * &t * &t / Rational::integer(2))
    }

    pub fn derivative_at(&self, x: &Rational) -> Result<Rational> {
        let i = self.segment(x)?;
        Ok(interpolate(&self.nodes[i], &self.nodes[i + 1], x))
    }

    /// `∫_J f′ = f(b) − f(a)`.
    pub fn integral_over(&self, j: &Interval) -> Rational {
        self.evaluate(j.hi()).expect("J inside [0,1]")
            - self.evaluate(j.lo()).expect("J inside [0,1]")
    }

    pub fn image(&self, j: &Interval) -> Result<Interval> {
        Interval::new(
            self.evaluate(j.lo())?,
            self.evaluate(j.hi())?,
            j.lo_closed(),
            j.hi_closed(),
        )
    }

    /// Endpoints of `J` plus every node strictly inside it.
    pub fn candidate_points(&self, j: &Interval) -> Vec<Rational> {
        let mut xs = vec![j.lo().clone()];
        xs.extend(
            self.nodes
                .iter()
                .filter(|p| &p.x > j.lo() && &p.x < j.hi())
                .map(|p| p.x.clone()),
        );
        xs.push(j.hi().clone());
        xs
    }

    /// Slopes of the derivative profile on segments meeting the interior of `J`.
    pub fn derivative_slopes_on(&self, j: &Interval) -> Vec<Rational> {
        self.nodes
            .windows(2)
            .filter(|w| &w[0].x < j.hi() && j.lo() < &w[1].x)
            .map(|w| slope(&w[0], &w[1]))
            .collect()
    }

    /// Extreme values of `f′` on the closure of `J`.
    pub fn derivative_range_on(&self, j: &Interval) -> (Rational, Rational) {
        let vals: Vec<Rational> = self
            .candidate_points(j)
            .iter()
            .map(|x| self.derivative_at(x).expect("J inside [0,1]"))
            .collect();
        (
            vals.iter().min().expect("nonempty").clone(),
            vals.iter().max().expect("nonempty").clone(),
        )
    }

    pub fn max_derivative(&self) -> Rational {
        self.nodes
            .iter()
            .map(|p| p.y.clone())
            .max()
            .expect("nonempty")
    }
}

/// Builds the map whose derivative is `profile` on `J` and 1 elsewhere.
///
/// `profile` runs from `a` to `b`; its end values must be 1 wherever `J`
/// meets the rest of `[0,1]`, and its area must equal `ℓ`.
pub fn antiderivative_map(profile: &[Point], j: &Interval) -> Result<PQMap> {
    match (profile.first(), profile.last()) {
        (Some(s), Some(e)) if &s.x == j.lo() && &e.x == j.hi() => {}
        _ => {
            return Err(Error::InvalidParameter(
                "profile must start at a and end at b".into(),
            ))
        }
    }
    check_profile(profile)?;
    let area = trapezoid(profile);
    if area != j.length() {
        return Err(Error::AreaMismatch {
            expected: j.length().to_string(),
            actual: area.to_string(),
        });
    }
    let first = &profile[0];
    let last = &profile[profile.len() - 1];
    if (first.x.is_positive() && !first.y.is_one())
        || (last.x < Rational::one() && !last.y.is_one())
    {
        return Err(Error::InvalidParameter(
            "profile must equal 1 where J meets the rest of [0,1]".into(),
        ));
    }
    let mut nodes = Vec::with_capacity(profile.len() + 2);
    if first.x.is_positive() {
        nodes.push(Point::new(Rational::zero(), Rational::one()));
    }
    nodes.extend_from_slice(profile);
    if last.x < Rational::one() {
        nodes.push(Point::new(Rational::one(), Rational::one()));
    }
    PQMap::new(nodes)
}

/// Open intervals with `dist(J_k, J_p) ≥ max(ℓ_k, ℓ_p)` for `k ≠ p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct SeparatedFamily {
    intervals: Vec<Interval>,
}

impl SeparatedFamily {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        for (i, j) in intervals.iter().enumerate() {
            if !j.within_unit() {
                return Err(Error::DegenerateInterval {
                    lo: j.lo().to_string(),
                    hi: j.hi().to_string(),
                });
            }
            for (k, other) in intervals.iter().enumerate().skip(i + 1) {
                let need = j.length().max(other.length());
                if j.overlaps(other) || j.gap(other) < need {
                    return Err(Error::SeparationViolated(i, k));
                }
            }
        }
        Ok(SeparatedFamily { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

impl TryFrom<Vec<Interval>> for SeparatedFamily {
    type Error = Error;
    fn try_from(v: Vec<Interval>) -> Result<Self> {
        SeparatedFamily::new(v)
    }
}

impl From<SeparatedFamily> for Vec<Interval> {
    fn from(f: SeparatedFamily) -> Self {
        f.intervals
    }
}

/// Two points at which a derivative breaks the `n`-Hölder bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoelderWitness {
    /// `Map`: `g′` fails on `J`. `Inverse`: `(g⁻¹)′` fails on `g(J)`.
    pub side: Side,
    /// Points of `J` (not of `g(J)`) realising the violation.
    pub points: (Rational, Rational),
    pub diff: Rational,
    pub dist: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(Box<HoelderWitness>),
    Unknown,
}

fn side_test(g: &PQMap, j: &Interval, n: &Rational, e: HoelderExponent, side: Side) -> Verdict {
    let xs = g.candidate_points(j);
    let deriv: Vec<Rational> = xs
        .iter()
        .map(|x| g.derivative_at(x).expect("in J"))
        .collect();
    let (vals, pos): (Vec<Rational>, Vec<Rational>) = match side {
        Side::Map => (deriv.clone(), xs.clone()),
        Side::Inverse => (
            deriv.iter().map(Rational::recip).collect(),
            xs.iter().map(|x| g.evaluate(x).expect("in J")).collect(),
        ),
    };
    for i in 0..xs.len() {
        for k in i + 1..xs.len() {
            let diff = (&vals[k] - &vals[i]).abs();
            let dist = &pos[k] - &pos[i];
            if e.compare(&diff, n, &dist) == Ordering::Greater {
                return Verdict::No(Box::new(HoelderWitness {
                    side,
                    points: (xs[i].clone(), xs[k].clone()),
                    diff,
                    dist,
                }));
            }
        }
    }
    let s = g
        .derivative_slopes_on(j)
        .iter()
        .map(Rational::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    // |g′(x) − g′(y)| ≤ S|x − y| < S·ℓ^{1−ε}|x − y|^ε; for the inverse,
    // |1/g′(x) − 1/g′(y)| ≤ (S/m²)|x − y| ≤ (S/m³)|g(x) − g(y)|.
    let (lip, len) = match side {
        Side::Map => (s, j.length()),
        Side::Inverse => {
            let m = deriv.iter().min().expect("nonempty");
            (s / m.pow(3), &pos[pos.len() - 1] - &pos[0])
        }
    };
    let (p, q) = (e.p as i32, e.q as i32);
    if lip.pow(q) * len.pow(q - p) <= n.pow(q) {
        Verdict::Yes
    } else {
        Verdict::Unknown
    }
}

/// Decides whether `g′` is `n`-Hölder on `J` and `(g⁻¹)′` on `g(J)`.
///
/// `Yes` only if both sides pass the sufficient bound; `No` carries an
/// exact witness from whichever side fails; otherwise `Unknown`.
pub fn hoelder_case_test(g: &PQMap, j: &Interval, n: u64, e: HoelderExponent) -> Verdict {
    let n = Rational::integer(n as i64);
    let direct = side_test(g, j, &n, e, Side::Map);
    if let Verdict::No(_) = direct {
        return direct;
    }
    let inverse = side_test(g, j, &n, e, Side::Inverse);
    match (direct, inverse) {
        (_, v @ Verdict::No(_)) => v,
        (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
        _ => Verdict::Unknown,
    }
}

/// `C = 2((n+1)⁴ + 1)(n+1)⁴`.
pub fn hoelder_constant(n: u64) -> Rational {
    let m = Rational::integer(n as i64 + 1).pow(4);
    Rational::integer(2) * (&m + Rational::one()) * m
}

/// `(w_k, x_k, y_k)`: `x_k` the midpoint, `y_k − x_k = x_k − w_k = ℓ/(2(n+1)⁴)`.
pub fn figure_b_points(j: &Interval, n: u64) -> (Rational, Rational, Rational) {
    let x = j.midpoint();
    let delta = j.length() / (Rational::integer(2) * Rational::integer(n as i64 + 1).pow(4));
    (&x - &delta, x.clone(), &x + &delta)
}

/// Derivative profile on `J` peaking at `1 + ℓ^ε(n+1)⁴` and dipping to `1 − ℓ^ε`.
pub fn figure_b_profile(j: &Interval, n: u64, l_eps: &Rational) -> Vec<Point> {
    let (w, x, y) = figure_b_points(j, n);
    let one = Rational::one();
    let low = &one - l_eps;
    let apex = &one + l_eps * Rational::integer(n as i64 + 1).pow(4);
    vec![
        Point::new(j.lo().clone(), one.clone()),
        Point::new(w, low.clone()),
        Point::new(x, apex),
        Point::new(y, low),
        Point::new(j.hi().clone(), one),
    ]
}

fn check_n(n: u64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "the Hölder class index must be at least 1".into(),
        ));
    }
    Ok(())
}

fn check_arity(family: &SeparatedFamily, adversaries: &[PQMap]) -> Result<()> {
    if family.len() != adversaries.len() {
        return Err(Error::ArityMismatch {
            expected: family.len(),
            actual: adversaries.len(),
        });
    }
    Ok(())
}

fn case_of(
    g: &PQMap,
    j: &Interval,
    k: usize,
    n: u64,
    e: HoelderExponent,
) -> Result<(Case, Option<HoelderWitness>)> {
    match hoelder_case_test(g, j, n, e) {
        Verdict::Yes => Ok((Case::Escape, None)),
        Verdict::No(w) => Ok((Case::Inherit, Some(*w))),
        Verdict::Unknown => Err(Error::CaseUndecided(k)),
    }
}

fn length_power(j: &Interval, k: usize, e: HoelderExponent) -> Result<Rational> {
    e.power_of(&j.length()).ok_or(Error::IrrationalPower(k))
}

pub fn build_escape_hoelder(
    n: u64,
    e: HoelderExponent,
    family: &SeparatedFamily,
    adversaries: &[PQMap],
) -> Result<PQMap> {
    check_n(n)?;
    check_arity(family, adversaries)?;
    let mut nodes = vec![
        Point::new(Rational::zero(), Rational::one()),
        Point::new(Rational::one(), Rational::one()),
    ];
    for (k, (j, g)) in family.intervals().iter().zip(adversaries).enumerate() {
        let l_eps = length_power(j, k, e)?;
        if case_of(g, j, k, n, e)?.0 == Case::Escape {
            let profile = figure_b_profile(j, n, &l_eps);
            antiderivative_map(&profile, j)?;
            nodes.extend(profile);
        }
    }
    nodes.sort_by(|a, b| a.x.cmp(&b.x));
    nodes.dedup();
    PQMap::new(nodes)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoelderRecord {
    pub k: usize,
    pub case: Case,
    /// `Map`: the derivative of `f ∘ g⁻¹` fails. `Inverse`: that of `g ∘ f⁻¹`.
    pub side: Side,
    /// Points of `J_k`; for case 2 these are `(a_k, x_k)`.
    pub witness: (Rational, Rational),
    pub lhs: Rational,
    pub rhs_base: Rational,
    /// `n(n+1)` for case 2, `n` for case 1; `lhs^q > factor^q·rhs_base^p`.
    pub factor: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoelderCertificate {
    pub n: u64,
    pub epsilon: HoelderExponent,
    pub f: PQMap,
    pub intervals: SeparatedFamily,
    pub adversaries: Vec<PQMap>,
    /// `f′` is `C`-Hölder on `[0,1]`.
    pub hoelder_constant: Rational,
    pub records: Vec<HoelderRecord>,
}

fn failure(k: usize, side: &str, detail: String) -> Error {
    Error::CertificateFailure {
        k,
        side: side.into(),
        detail,
    }
}

fn point_in_any(x: &Rational, family: &SeparatedFamily) -> bool {
    family
        .intervals()
        .iter()
        .any(|j| j.lo() <= x && x <= j.hi())
}

/// `f′ = 1` at every `a_k`, `b_k` and at every node outside the closures.
fn check_junctions(f: &PQMap, family: &SeparatedFamily) -> Result<()> {
    for (k, j) in family.intervals().iter().enumerate() {
        for x in [j.lo(), j.hi()] {
            let d = f.derivative_at(x)?;
            if !d.is_one() {
                return Err(failure(k, "junction", format!("f′({x}) = {d}, expected 1")));
            }
        }
    }
    if let Some(p) = f
        .profile()
        .iter()
        .find(|p| !point_in_any(&p.x, family) && !p.y.is_one())
    {
        return Err(failure(
            0,
            "junction",
            format!("f′({}) = {} outside every interval", p.x, p.y),
        ));
    }
    Ok(())
}

fn transferred_record(
    f: &PQMap,
    g: &PQMap,
    k: usize,
    w: HoelderWitness,
    n: &Rational,
    e: HoelderExponent,
) -> Result<HoelderRecord> {
    let (x, y) = &w.points;
    let (fx, fy) = (f.derivative_at(x)?, f.derivative_at(y)?);
    let (gx, gy) = (g.derivative_at(x)?, g.derivative_at(y)?);
    // (g f⁻¹)′(f(x)) = g′(x)/f′(x) and (f g⁻¹)′(g(x)) = f′(x)/g′(x)
    let (side, lhs, rhs) = match w.side {
        Side::Map => (
            Side::Inverse,
            (&gx / &fx - &gy / &fy).abs(),
            (f.evaluate(x)? - f.evaluate(y)?).abs(),
        ),
        Side::Inverse => (
            Side::Map,
            (&fx / &gx - &fy / &gy).abs(),
            (g.evaluate(x)? - g.evaluate(y)?).abs(),
        ),
    };
    if e.compare(&lhs, n, &rhs) != Ordering::Greater {
        return Err(failure(
            k,
            &side.to_string(),
            format!("transferred quotient {lhs} over {rhs}^{e} does not exceed {n}"),
        ));
    }
    Ok(HoelderRecord {
        k,
        case: Case::Inherit,
        side,
        witness: w.points,
        lhs,
        rhs_base: rhs,
        factor: n.clone(),
    })
}

pub fn verify_escape_hoelder(
    f: &PQMap,
    n: u64,
    e: HoelderExponent,
    family: &SeparatedFamily,
    adversaries: &[PQMap],
) -> Result<HoelderCertificate> {
    check_n(n)?;
    check_arity(family, adversaries)?;
    let nr = Rational::integer(n as i64);
    let factor = &nr * Rational::integer(n as i64 + 1);
    let c = hoelder_constant(n);
    let (p, q) = (e.p as i32, e.q as i32);
    let mut records = Vec::with_capacity(family.len());
    for (k, (j, g)) in family.intervals().iter().zip(adversaries).enumerate() {
        let l_eps = length_power(j, k, e)?;
        let record = match case_of(g, j, k, n, e)? {
            (Case::Escape, _) => {
                let (a, x) = (j.lo().clone(), j.midpoint());
                let lhs = (f.derivative_at(&x)? / g.derivative_at(&x)?
                    - f.derivative_at(&a)? / g.derivative_at(&a)?)
                .abs();
                let rhs = (g.evaluate(&x)? - g.evaluate(&a)?).abs();
                if e.compare(&lhs, &factor, &rhs) != Ordering::Greater {
                    return Err(failure(
                        k,
                        "map",
                        format!(
                            "lhs^{q} = {} is not above {factor}^{q}·{rhs}^{p}",
                            lhs.pow(q)
                        ),
                    ));
                }
                let area = f.integral_over(j);
                if area != j.length() {
                    return Err(failure(
                        k,
                        "area",
                        format!("∫ f′ over J = {area}, expected {}", j.length()),
                    ));
                }
                // ℓ^{ε−1} = ℓ^ε / ℓ
                let bound = &c * &l_eps / j.length();
                if let Some(s) = f
                    .derivative_slopes_on(j)
                    .into_iter()
                    .find(|s| s.abs() > bound)
                {
                    return Err(failure(
                        k,
                        "segment",
                        format!("derivative slope {s} exceeds {bound}"),
                    ));
                }
                HoelderRecord {
                    k,
                    case: Case::Escape,
                    side: Side::Map,
                    witness: (a, x),
                    lhs,
                    rhs_base: rhs,
                    factor: factor.clone(),
                }
            }
            (Case::Inherit, w) => {
                let w = w.expect("case 1 carries a witness");
                if let Some(pt) = f
                    .candidate_points(j)
                    .into_iter()
                    .find(|x| !f.derivative_at(x).expect("in J").is_one())
                {
                    return Err(failure(
                        k,
                        "identity",
                        format!("f′({pt}) ≠ 1 on a case-1 interval"),
                    ));
                }
                transferred_record(f, g, k, w, &nr, e)?
            }
        };
        records.push(record);
    }
    check_junctions(f, family)?;
    // Across intervals: |f′(x) − f′(y)| ≤ D and |x − y| ≥ gap.
    for (k, jk) in family.intervals().iter().enumerate() {
        for (m, jm) in family.intervals().iter().enumerate().skip(k + 1) {
            let (lo1, hi1) = f.derivative_range_on(jk);
            let (lo2, hi2) = f.derivative_range_on(jm);
            let d = hi1.max(hi2) - lo1.min(lo2);
            let gap = jk.gap(jm);
            if d.pow(q) > c.pow(q) * gap.pow(p) {
                return Err(failure(
                    k,
                    "cross",
                    format!("derivative spread {d} against interval {m} exceeds C·gap^ε"),
                ));
            }
        }
    }
    Ok(HoelderCertificate {
        n,
        epsilon: e,
        f: f.clone(),
        intervals: family.clone(),
        adversaries: adversaries.to_vec(),
        hoelder_constant: c,
        records,
    })
}

impl HoelderCertificate {
    /// Recomputes the certificate from its embedded inputs and compares.
    pub fn check(&self) -> Result<()> {
        let fresh = verify_escape_hoelder(
            &self.f,
            self.n,
            self.epsilon,
            &self.intervals,
            &self.adversaries,
        )?;
        if &fresh != self {
            return Err(failure(
                0,
                "map",
                "stored records differ from recomputed ones".into(),
            ));
        }
        Ok(())
    }
}

/// The point `z ∈ {x_k, y_k}` of `J_k ∋ x` that replaces `y ∈ J_p` in the
/// cross-interval argument: `y_k` when `f′(x) ≥ f′(y)`, `x_k` otherwise.
///
/// Meaningful when `J_k` and `J_p` both carry the escape profile and
/// `ℓ_k ≥ ℓ_p`.
pub fn substitute_point(
    f: &PQMap,
    jk: &Interval,
    x: &Rational,
    y: &Rational,
    n: u64,
) -> Result<Rational> {
    let (_, xk, yk) = figure_b_points(jk, n);
    Ok(if f.derivative_at(x)? >= f.derivative_at(y)? {
        yk
    } else {
        xk
    })
}

/// `false` exactly when `g′` passes the `n`-Hölder test on `[0,1]` yet
/// exceeds `n + 1` somewhere, which no genuine member can do.
pub fn sup_bound_consistent(g: &PQMap, n: u64, e: HoelderExponent) -> bool {
    let unit = Interval::open(Rational::zero(), Rational::one()).expect("nondegenerate");
    let holder = side_test(g, &unit, &Rational::integer(n as i64), e, Side::Map);
    holder != Verdict::Yes || g.max_derivative() <= Rational::integer(n as i64 + 1)
}

/// Least integer strictly above `[(n+1) + (n+1)^{1+ε}]·n`.
///
/// With `t = n(n+1)^{1+ε} = (K)^{1/q}`, `K = (n(n+1))^q (n+1)^p`, the answer
/// is `n(n+1) + ⌊t⌋ + 1` whether or not `t` is an integer.
pub fn compose_hoelder_bound(n: u64, e: HoelderExponent) -> BigInt {
    let base = BigUint::from(n) * BigUint::from(n + 1);
    let k = Pow::pow(&base, e.q) * Pow::pow(BigUint::from(n + 1), e.p);
    let t = integer_root_floor(&k, e.q);
    BigInt::from(base + t + 1u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn iv(a: Rational, b: Rational) -> Interval {
        Interval::open(a, b).unwrap()
    }

    fn half() -> HoelderExponent {
        HoelderExponent::new(1, 2).unwrap()
    }

    fn small() -> (SeparatedFamily, Interval) {
        let j = iv(r(0, 1), r(1, 16));
        (SeparatedFamily::new(vec![j.clone()]).unwrap(), j)
    }

    #[test]
    fn exponent_validation() {
        assert!(HoelderExponent::new(2, 4).is_err());
        assert!(HoelderExponent::new(1, 1).is_err());
        assert!(HoelderExponent::new(0, 3).is_err());
        let e: HoelderExponent = "1/3".parse().unwrap();
        assert_eq!(e.value(), r(1, 3));
        assert_eq!(half().power_of(&r(1, 16)), Some(r(1, 4)));
        assert_eq!(half().power_of(&r(1, 10)), None);
    }

    #[test]
    fn identity_profile() {
        let id = PQMap::identity();
        assert_eq!(id.evaluate(&r(2, 3)).unwrap(), r(2, 3));
        assert_eq!(id.derivative_at(&r(2, 3)).unwrap(), r(1, 1));
        let j = iv(r(1, 4), r(1, 2));
        let flat = vec![Point::new(r(1, 4), r(1, 1)), Point::new(r(1, 2), r(1, 1))];
        assert!(antiderivative_map(&flat, &j).unwrap().is_identity());
    }

    #[test]
    fn figure_b_area_and_values() {
        let (_, j) = small();
        let profile = figure_b_profile(&j, 1, &r(1, 4));
        assert_eq!(profile[1].x, r(15, 512));
        assert_eq!(profile[2], Point::new(r(1, 32), r(5, 1)));
        assert_eq!(profile[3], Point::new(r(17, 512), r(3, 4)));
        let f = antiderivative_map(&profile, &j).unwrap();
        assert_eq!(f.integral_over(&j), r(1, 16));
        assert_eq!(f.derivative_at(&r(1, 32)).unwrap(), r(5, 1));
        assert_eq!(f.derivative_at(&r(17, 512)).unwrap(), r(3, 4));
        assert_eq!(f.evaluate(&r(1, 16)).unwrap(), r(1, 16));
        assert_eq!(f.evaluate(&r(1, 1)).unwrap(), r(1, 1));
    }

    #[test]
    fn perturbed_apex_breaks_area() {
        let (_, j) = small();
        let mut profile = figure_b_profile(&j, 1, &r(1, 4));
        profile[2].y = r(5, 1) + r(1, 100);
        assert!(matches!(
            antiderivative_map(&profile, &j),
            Err(Error::AreaMismatch { .. })
        ));
    }

    #[test]
    fn quadratic_evaluation_matches_integral() {
        // f′ = 11/10 − x/5, so f(x) = 11x/10 − x²/10
        let g = PQMap::new(vec![
            Point::new(r(0, 1), r(11, 10)),
            Point::new(r(1, 1), r(9, 10)),
        ])
        .unwrap();
        let x = r(1, 3);
        assert_eq!(g.evaluate(&x).unwrap(), r(11, 30) - r(1, 90));
        assert_eq!(g.derivative_at(&x).unwrap(), r(11, 10) - r(1, 15));
    }

    #[test]
    fn case_test_three_values() {
        let (_, j) = small();
        assert_eq!(
            hoelder_case_test(&PQMap::identity(), &j, 1, half()),
            Verdict::Yes
        );
        // jump of 1/2 over 1/100 near 0: (1/2)² = 1/4 > 1·(1/100)
        let steep = PQMap::new(vec![
            Point::new(r(0, 1), r(3, 2)),
            Point::new(r(1, 100), r(1, 1)),
            Point::new(r(1, 1), r(197, 198)),
        ])
        .unwrap();
        assert!(matches!(
            hoelder_case_test(&steep, &j, 1, half()),
            Verdict::No(_)
        ));
        // on (0,1/4) g′ rises from 1/2 to 1: S²ℓ = 1 ≤ 9 on the direct side;
        // the inverse endpoint pair gives 1 < 9·(3/16), but the sufficient
        // bound (S/m³)²·ℓ_g = 256·3/16 = 48 exceeds 9
        let tilt = PQMap::new(vec![
            Point::new(r(0, 1), r(1, 2)),
            Point::new(r(1, 4), r(1, 1)),
            Point::new(r(1, 1), r(7, 6)),
        ])
        .unwrap();
        let quarter = iv(r(0, 1), r(1, 4));
        assert_eq!(
            hoelder_case_test(&tilt, &quarter, 3, half()),
            Verdict::Unknown
        );
        assert!(matches!(
            hoelder_case_test(&tilt, &quarter, 2, half()),
            Verdict::No(_)
        ));
    }

    #[test]
    fn escape_against_identity() {
        let (fam, _) = small();
        let ids = vec![PQMap::identity()];
        let f = build_escape_hoelder(1, half(), &fam, &ids).unwrap();
        assert_eq!(f.derivative_at(&r(1, 32)).unwrap(), r(5, 1));
        let cert = verify_escape_hoelder(&f, 1, half(), &fam, &ids).unwrap();
        let rec = &cert.records[0];
        assert_eq!(rec.lhs, r(4, 1));
        assert_eq!(rec.rhs_base, r(1, 32));
        assert_eq!(rec.factor, r(2, 1));
        assert_eq!(rec.lhs.pow(2), r(16, 1));
        assert_eq!(rec.factor.pow(2) * &rec.rhs_base, r(1, 8));
        assert_eq!(cert.hoelder_constant, r(544, 1));
        cert.check().unwrap();
    }

    #[test]
    fn case_one_is_identity_and_transfers() {
        let (fam, _) = small();
        let g = build_escape_hoelder(1, half(), &fam, &[PQMap::identity()]).unwrap();
        let f = build_escape_hoelder(1, half(), &fam, std::slice::from_ref(&g)).unwrap();
        assert!(f.is_identity());
        let cert = verify_escape_hoelder(&f, 1, half(), &fam, &[g]).unwrap();
        assert_eq!(cert.records[0].case, Case::Inherit);
    }

    #[test]
    fn tampered_apex_fails() {
        let (fam, j) = small();
        // apex 2 on J, the lost area put back in a bump on (1/2, 5/8)
        let mut nodes = figure_b_profile(&j, 1, &r(1, 4));
        nodes[2].y = r(2, 1);
        let lost = r(3, 512);
        nodes.extend([
            Point::new(r(1, 2), r(1, 1)),
            Point::new(r(9, 16), r(1, 1) + lost * r(16, 1)),
            Point::new(r(5, 8), r(1, 1)),
            Point::new(r(1, 1), r(1, 1)),
        ]);
        let f = PQMap::new(nodes).unwrap();
        assert_eq!(f.derivative_at(&r(9, 16)).unwrap(), r(1, 1) + r(3, 32));
        let err = verify_escape_hoelder(&f, 1, half(), &fam, &[PQMap::identity()]).unwrap_err();
        match err {
            Error::CertificateFailure { k: 0, side, .. } => assert_eq!(side, "area"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lowered_apex_fails_comparison() {
        let (fam, j) = small();
        let mut nodes = figure_b_profile(&j, 1, &r(1, 4));
        nodes[2].y = r(1, 1) + r(1, 4);
        // lhs = 1/4, lhs² = 1/16 < 1/8
        let missing = r(1, 16) - trapezoid(&nodes);
        let mut full = nodes;
        full.extend([
            Point::new(r(1, 2), r(1, 1)),
            Point::new(r(9, 16), r(1, 1) + missing * r(16, 1)),
            Point::new(r(5, 8), r(1, 1)),
            Point::new(r(1, 1), r(1, 1)),
        ]);
        let f = PQMap::new(full).unwrap();
        let err = verify_escape_hoelder(&f, 1, half(), &fam, &[PQMap::identity()]).unwrap_err();
        assert!(matches!(err, Error::CertificateFailure { k: 0, ref side, .. } if side == "map"));
    }

    #[test]
    fn separation_and_powers() {
        let a = iv(r(0, 1), r(1, 4));
        let b = iv(r(3, 8), r(1, 2));
        assert!(matches!(
            SeparatedFamily::new(vec![a.clone(), b]),
            Err(Error::SeparationViolated(0, 1))
        ));
        let fam = SeparatedFamily::new(vec![iv(r(0, 1), r(1, 10))]).unwrap();
        assert!(matches!(
            build_escape_hoelder(1, half(), &fam, &[PQMap::identity()]),
            Err(Error::IrrationalPower(0))
        ));
    }

    #[test]
    fn composite_bound() {
        assert_eq!(compose_hoelder_bound(1, half()), BigInt::from(5));
        assert_eq!(compose_hoelder_bound(2, half()), BigInt::from(17));
        assert_eq!(compose_hoelder_bound(0, half()), BigInt::from(1));
    }

    #[test]
    fn sup_bound() {
        assert!(sup_bound_consistent(&PQMap::identity(), 1, half()));
    }

    #[test]
    fn serde_shape() {
        let (fam, _) = small();
        let f = build_escape_hoelder(1, half(), &fam, &[PQMap::identity()]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"derivative_breaks":[["15/512","3/4"],["1/32","5"]"#));
        assert!(s.ends_with(r#""boundary":["1","1"]}"#));
        let back: PQMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
