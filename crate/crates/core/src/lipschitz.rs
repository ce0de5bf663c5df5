//! Diagonal construction of a bi-Lipschitz PL map that escapes every
//! right translate `B_n g_k` of the `n`-bi-Lipschitz class.
//!
//! `B_n` is the set of maps `f` with `|f(x) − f(y)| < n|x − y|` and the same
//! for `f⁻¹`. Given disjoint intervals `J_k = (a_k, b_k)` and adversaries
//! `g_k`, the constructed `f` is the identity on `J_k` when `g_k` already
//! fails the bound there (case 1); otherwise (case 2) it has a single break
//! at `x_k = a_k + ℓ_k/(n²+1)` sent to `b_k − ℓ_k/(n²+1)`. Either way
//! `f ∘ g_k⁻¹ ∉ B_n`, and the certificate records exactly why.

use serde::{Deserialize, Serialize};

use crate::commutation::support;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::pl::{slope, PLMap, Point};
use crate::rational::Rational;

/// Pairwise disjoint open intervals inside `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalFamily {
    intervals: Vec<Interval>,
}

impl IntervalFamily {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        for (i, j) in intervals.iter().enumerate() {
            if !j.within_unit() {
                return Err(Error::DegenerateInterval {
                    lo: j.lo().to_string(),
                    hi: j.hi().to_string(),
                });
            }
            for (k, other) in intervals.iter().enumerate().skip(i + 1) {
                if j.overlaps(other) {
                    return Err(Error::DisjointnessViolated(i, k));
                }
            }
        }
        Ok(IntervalFamily { intervals })
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

impl TryFrom<Vec<Interval>> for IntervalFamily {
    type Error = Error;
    fn try_from(v: Vec<Interval>) -> Result<Self> {
        IntervalFamily::new(v)
    }
}

impl From<IntervalFamily> for Vec<Interval> {
    fn from(f: IntervalFamily) -> Self {
        f.intervals
    }
}

/// `|f(x) − f(y)| < c|x − y|` for all `x, y ∈ J`, i.e. every segment of `f`
/// meeting `J` has slope below `c`.
pub fn is_n_lipschitz_on(f: &PLMap, j: &Interval, c: &Rational) -> bool {
    &f.max_slope_on(j) < c
}

/// Largest two-point quotient over pairs drawn from the break abscissae of
/// `f` inside `J` and the endpoints of `J`.
///
/// For PL maps this equals the steepest slope on `J`; kept separate from
/// [`PLMap::max_slope_on`] so the two can be checked against each other.
pub fn max_pair_quotient(f: &PLMap, j: &Interval) -> Rational {
    let mut xs: Vec<Rational> = vec![j.lo().clone(), j.hi().clone()];
    xs.extend(f.break_points().into_iter().filter(|x| j.contains(x)));
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| f.evaluate(x).expect("x in [0,1]"))
        .collect();
    let mut best = Rational::zero();
    for i in 0..xs.len() {
        for k in i + 1..xs.len() {
            let q = ((&ys[k] - &ys[i]) / (&xs[k] - &xs[i])).abs();
            if q > best {
                best = q;
            }
        }
    }
    best
}

/// Whether `g` is `n`-Lipschitz on `J` and `g⁻¹` is `n`-Lipschitz on `g(J)`.
pub fn adversary_case(g: &PLMap, j: &Interval, n: &Rational) -> Case {
    let image = g.image(j).expect("J inside [0,1]");
    if is_n_lipschitz_on(g, j, n) && is_n_lipschitz_on(&g.inverse(), &image, n) {
        Case::Escape
    } else {
        Case::Inherit
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Case {
    /// The adversary itself violates the bound on `J_k`; `f` is the identity there.
    Inherit,
    /// The adversary is tame on `J_k`; `f` gets a steep break there.
    Escape,
}

impl From<Case> for u8 {
    fn from(c: Case) -> u8 {
        match c {
            Case::Inherit => 1,
            Case::Escape => 2,
        }
    }
}

impl TryFrom<u8> for Case {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Case::Inherit),
            2 => Ok(Case::Escape),
            _ => Err(format!("case must be 1 or 2, got {v}")),
        }
    }
}

/// Which of `f ∘ g⁻¹` or its inverse `g ∘ f⁻¹` violates the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Map,
    Inverse,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Map => "map",
            Side::Inverse => "inverse",
        })
    }
}

fn check_n(n: u64) -> Result<Rational> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "the Lipschitz class index must be at least 2, got {n}"
        )));
    }
    Ok(Rational::integer(n as i64))
}

fn check_arity(family: &IntervalFamily, adversaries: &[PLMap]) -> Result<()> {
    if family.len() != adversaries.len() {
        return Err(Error::ArityMismatch {
            expected: family.len(),
            actual: adversaries.len(),
        });
    }
    Ok(())
}

/// `x_k = a_k + ℓ_k/(n²+1)` for `J_k`.
pub fn escape_break(j: &Interval, n: u64) -> Point {
    let step = j.length() / Rational::integer((n * n + 1) as i64);
    Point::new(j.lo() + &step, j.hi() - &step)
}

pub fn build_escape_lip(n: u64, family: &IntervalFamily, adversaries: &[PLMap]) -> Result<PLMap> {
    let bound = check_n(n)?;
    check_arity(family, adversaries)?;
    let mut points = Vec::new();
    for (j, g) in family.intervals().iter().zip(adversaries) {
        if adversary_case(g, j, &bound) == Case::Escape {
            points.push(Point::new(j.lo().clone(), j.lo().clone()));
            points.push(escape_break(j, n));
            points.push(Point::new(j.hi().clone(), j.hi().clone()));
        }
    }
    PLMap::from_graph_points(points)
}

/// Why `f ∘ g_k⁻¹` is not in `B_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipRecord {
    pub k: usize,
    pub case: Case,
    /// Two points `p < q` in the domain of the violating side.
    pub witness_points: (Rational, Rational),
    /// Difference quotient of the violating side at the witness points.
    pub quotient: Rational,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipEscapeCertificate {
    pub n: u64,
    pub f: PLMap,
    pub intervals: IntervalFamily,
    pub adversaries: Vec<PLMap>,
    pub bilipschitz_constant: Rational,
    pub records: Vec<LipRecord>,
}

fn failure(k: usize, side: Side, detail: String) -> Error {
    Error::CertificateFailure {
        k,
        side: side.to_string(),
        detail,
    }
}

/// Endpoints of the steepest segment of `h` on `J`, clipped to `J`.
fn steepest_pair(h: &PLMap, j: &Interval) -> (Rational, Rational) {
    let best = h
        .nodes()
        .windows(2)
        .filter(|w| &w[0].x < j.hi() && j.lo() < &w[1].x)
        .max_by(|a, b| slope(&a[0], &a[1]).cmp(&slope(&b[0], &b[1])))
        .expect("J meets [0,1]");
    (
        (&best[0].x).max(j.lo()).clone(),
        (&best[1].x).min(j.hi()).clone(),
    )
}

fn quotient(h: &PLMap, p: &Rational, q: &Rational) -> Rational {
    (h.evaluate(q).expect("in [0,1]") - h.evaluate(p).expect("in [0,1]")) / (q - p)
}

/// Checks `f` against every adversary and returns the certificate.
pub fn verify_escape_lip(
    f: &PLMap,
    n: u64,
    family: &IntervalFamily,
    adversaries: &[PLMap],
) -> Result<LipEscapeCertificate> {
    let bound = check_n(n)?;
    check_arity(family, adversaries)?;
    let bilip = f.bilipschitz_constant();
    let class_bound = Rational::integer((n * n + 1) as i64);
    if bilip >= class_bound {
        return Err(failure(
            0,
            Side::Map,
            format!("bi-Lipschitz constant {bilip} is not below {class_bound}"),
        ));
    }
    let f_inv = f.inverse();
    let mut records = Vec::with_capacity(family.len());
    for (k, (j, g)) in family.intervals().iter().zip(adversaries).enumerate() {
        let g_inv = g.inverse();
        let g_image = g.image(j)?;
        let record = match adversary_case(g, j, &bound) {
            Case::Escape => {
                let xk = escape_break(j, n).x;
                let p = g.evaluate(j.lo())?;
                let q = g.evaluate(&xk)?;
                let h = f.compose(&g_inv);
                let quotient = quotient(&h, &p, &q);
                if quotient <= bound {
                    return Err(failure(
                        k,
                        Side::Map,
                        format!("quotient {quotient} at ({p}, {q}) does not exceed {n}"),
                    ));
                }
                LipRecord {
                    k,
                    case: Case::Escape,
                    witness_points: (p, q),
                    quotient,
                    side: Side::Map,
                }
            }
            Case::Inherit => {
                if support(f).iter().any(|s| s.overlaps(j)) {
                    return Err(failure(
                        k,
                        Side::Map,
                        "f moves points of an interval where it must be the identity".into(),
                    ));
                }
                // g⁻¹ steep on g(J): f g⁻¹ = g⁻¹ there. Otherwise g is steep
                // on J and g f⁻¹ = g there.
                let (side, h, dom) = if !is_n_lipschitz_on(&g_inv, &g_image, &bound) {
                    (Side::Map, f.compose(&g_inv), g_image)
                } else {
                    (Side::Inverse, g.compose(&f_inv), j.clone())
                };
                let (p, q) = steepest_pair(&h, &dom);
                let quotient = quotient(&h, &p, &q);
                if quotient < bound {
                    return Err(failure(
                        k,
                        side,
                        format!("quotient {quotient} at ({p}, {q}) is below {n}"),
                    ));
                }
                LipRecord {
                    k,
                    case: Case::Inherit,
                    witness_points: (p, q),
                    quotient,
                    side,
                }
            }
        };
        records.push(record);
    }
    Ok(LipEscapeCertificate {
        n,
        f: f.clone(),
        intervals: family.clone(),
        adversaries: adversaries.to_vec(),
        bilipschitz_constant: bilip,
        records,
    })
}

impl LipEscapeCertificate {
    /// Recomputes the certificate from its embedded inputs and compares.
    pub fn check(&self) -> Result<()> {
        let fresh = verify_escape_lip(&self.f, self.n, &self.intervals, &self.adversaries)?;
        if &fresh != self {
            return Err(failure(
                0,
                Side::Map,
                "stored records differ from recomputed ones".into(),
            ));
        }
        Ok(())
    }
}
