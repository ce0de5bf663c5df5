//! Bump maps, supports, commutators, and the commutator characterisation of
//! the sets `C(U,V) = {f : f(Ū) ⊆ V̄}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{trial_rng, SampleConfig};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::pl::{PLMap, Point};
use crate::rational::Rational;

/// Non-identity map supported exactly on `U = (a,b)`, `0 ≤ a < b ≤ 1`.
///
/// The midpoint `m` of `U` is sent to `m + (b − a)/8`; the map is linear on
/// `[a,m]` and `[m,b]` and the identity elsewhere.
pub fn bump(u: &Interval) -> Result<PLMap> {
    let (a, b) = (u.lo(), u.hi());
    if a.is_negative() || b > &Rational::one() {
        return Err(Error::DegenerateInterval {
            lo: a.to_string(),
            hi: b.to_string(),
        });
    }
    let m = u.midpoint();
    let apex = &m + u.length() / Rational::integer(8);
    let mut points = Vec::with_capacity(3);
    if a.is_positive() {
        points.push(Point::new(a.clone(), a.clone()));
    }
    points.push(Point::new(m, apex));
    if b < &Rational::one() {
        points.push(Point::new(b.clone(), b.clone()));
    }
    PLMap::new(points)
}

/// `f ∘ g ∘ f⁻¹ ∘ g⁻¹`.
pub fn commutator(f: &PLMap, g: &PLMap) -> PLMap {
    f.compose(g).compose(&f.inverse()).compose(&g.inverse())
}

/// `f ∘ g ∘ f⁻¹`.
pub fn conjugate(f: &PLMap, g: &PLMap) -> PLMap {
    f.compose(g).compose(&f.inverse())
}

/// Maximal open intervals on which `f(x) ≠ x`, left to right.
pub fn support(f: &PLMap) -> Vec<Interval> {
    let nodes = f.nodes();
    // zeros of f(x) − x: fixed nodes plus sign changes inside segments
    let mut zeros: Vec<Rational> = Vec::new();
    for w in nodes.windows(2) {
        let d0 = &w[0].y - &w[0].x;
        let d1 = &w[1].y - &w[1].x;
        if d0.is_zero() {
            zeros.push(w[0].x.clone());
        }
        if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
            let t = &d0 / (&d0 - &d1);
            zeros.push(&w[0].x + t * (&w[1].x - &w[0].x));
        }
    }
    zeros.push(Rational::one());
    zeros
        .windows(2)
        .filter_map(|w| {
            let mid = w[0].midpoint(&w[1]);
            let moved = f.evaluate(&mid).expect("midpoint in [0,1]") != mid;
            moved.then(|| Interval::open(w[0].clone(), w[1].clone()).expect("sorted zeros"))
        })
        .collect()
}

/// Evidence that `f` and `g_{W′} = bump(W′)` do not commute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonCommuteWitness {
    pub w: Interval,
    pub z: Rational,
    /// `f(g(z))`
    pub left: Rational,
    /// `g(f(z))`
    pub right: Rational,
}

impl NonCommuteWitness {
    /// Recomputes both sides against `f` and checks they differ.
    pub fn verify(&self, f: &PLMap) -> bool {
        let Ok(g) = bump(&self.w) else {
            return false;
        };
        let (Ok(gz), Ok(fz)) = (g.evaluate(&self.z), f.evaluate(&self.z)) else {
            return false;
        };
        let left = f.evaluate(&gz).expect("in domain");
        let right = g.evaluate(&fz).expect("in domain");
        left == self.left && right == self.right && left != right
    }
}

/// If `f` moves a point of the open interval `w ⊆ [0,1]`, finds a
/// subinterval `W′` whose bump does not commute with `f`.
///
/// Follows the displacement argument: pick `x ∈ w` with `y = f(x) ≠ x`,
/// set `δ = |y − x|/4` and `W′ = w ∩ (x−δ, x+δ) ∩ f⁻¹(y−δ, y+δ)`. Then
/// `f(W′)` misses `W′`, so the apex `z` of the bump satisfies
/// `g(f(z)) = f(z) ≠ f(g(z))`.
pub fn noncommute_witness(f: &PLMap, w: &Interval) -> Option<NonCommuteWitness> {
    let moved = support(f).into_iter().find_map(|s| s.intersect_open(w))?;
    let x = moved.midpoint();
    let y = f.evaluate(&x).expect("x in (0,1)");
    let delta = (&y - &x).abs() / Rational::integer(4);
    let pre_lo = f
        .evaluate_inverse(&(&y - &delta).max(Rational::zero()))
        .expect("clamped into [0,1]");
    let pre_hi = f
        .evaluate_inverse(&(&y + &delta).min(Rational::one()))
        .expect("clamped into [0,1]");
    let window = Interval::open(&x - &delta, &x + &delta).expect("delta > 0");
    let preimage = Interval::open(pre_lo, pre_hi).expect("f increasing");
    // x lies in all three sets, so the intersection is never empty
    let w_prime = w.intersect_open(&window)?.intersect_open(&preimage)?;
    let g = bump(&w_prime).ok()?;
    let z = w_prime.midpoint();
    let left = f.evaluate(&g.evaluate(&z).ok()?).ok()?;
    let right = g.evaluate(&f.evaluate(&z).ok()?).ok()?;
    debug_assert_ne!(left, right);
    (left != right).then_some(NonCommuteWitness {
        w: w_prime,
        z,
        left,
        right,
    })
}

/// `f(Ū) ⊆ V̄`, decided from the images of the endpoints of `U`.
pub fn cuv_direct(f: &PLMap, u: &Interval, v: &Interval) -> Result<bool> {
    let lo = f.evaluate(u.lo())?;
    let hi = f.evaluate(u.hi())?;
    Ok(&lo >= v.lo() && &hi <= v.hi())
}

/// A pair `(U′, W′)` with `[f g_{U′} f⁻¹, g_{W′}] ≠ e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorViolation {
    pub u_prime: Interval,
    pub w_prime: Interval,
}

impl CommutatorViolation {
    pub fn verify(&self, f: &PLMap) -> bool {
        match (bump(&self.u_prime), bump(&self.w_prime)) {
            (Ok(gu), Ok(gw)) => !commutator(&conjugate(f, &gu), &gw).is_identity(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    /// Every sampled probe commuted and no guided witness was found.
    pub all_commute: bool,
    pub probes: usize,
    pub violation: Option<CommutatorViolation>,
}

/// Open components of `[0,1] ∖ V̄`.
fn complement_components(v: &Interval) -> Vec<Interval> {
    let mut out = Vec::new();
    if v.lo().is_positive() {
        out.push(Interval::open(Rational::zero(), v.lo().clone()).expect("lo > 0"));
    }
    if v.hi() < &Rational::one() {
        out.push(Interval::open(v.hi().clone(), Rational::one()).expect("hi < 1"));
    }
    out
}

/// Random open subinterval of `j` with endpoints on the grid
/// `j.lo + k·|j|/bound`.
fn grid_subinterval<R: Rng + ?Sized>(rng: &mut R, j: &Interval, bound: u64) -> Interval {
    let a = rng.gen_range(0..bound);
    let b = rng.gen_range(a + 1..=bound);
    let step = j.length() / Rational::integer(bound as i64);
    Interval::open(
        j.lo() + &step * Rational::integer(a as i64),
        j.lo() + &step * Rational::integer(b as i64),
    )
    .expect("a < b")
}

/// Tests `f ∈ C(U,V)` through commutators of bumps.
///
/// Runs `cfg.trials` probes with `U′ ⊆ U` and `W′ ⊆ [0,1] ∖ V̄` drawn on a
/// seeded grid of `cfg.denominator_bound` steps. If none of them fails, a
/// guided search takes `U′ = U ∩ f⁻¹([0,1] ∖ V̄)` and looks for a bump
/// inside `f(U′) ∖ V̄` that does not commute with `f g_{U′} f⁻¹`; it
/// succeeds whenever `f ∉ C(U,V)`.
pub fn cuv_commutator_probe(
    f: &PLMap,
    u: &Interval,
    v: &Interval,
    cfg: &SampleConfig,
) -> Result<ProbeOutcome> {
    cfg.validate()?;
    let components = complement_components(v);
    if components.is_empty() {
        return Err(Error::VacuousCase);
    }
    let mut rng = trial_rng(cfg.seed, 0);
    for _ in 0..cfg.trials {
        let u_prime = grid_subinterval(&mut rng, u, cfg.denominator_bound);
        let c = &components[rng.gen_range(0..components.len())];
        let w_prime = grid_subinterval(&mut rng, c, cfg.denominator_bound);
        let candidate = CommutatorViolation { u_prime, w_prime };
        if candidate.verify(f) {
            return Ok(ProbeOutcome {
                all_commute: false,
                probes: cfg.trials,
                violation: Some(candidate),
            });
        }
    }
    let violation = guided_violation(f, u, v)?;
    Ok(ProbeOutcome {
        all_commute: violation.is_none(),
        probes: cfg.trials,
        violation,
    })
}

/// Constructive search for a violating pair when `f(Ū) ⊄ V̄`.
pub fn guided_violation(
    f: &PLMap,
    u: &Interval,
    v: &Interval,
) -> Result<Option<CommutatorViolation>> {
    let img_lo = f.evaluate(u.lo())?;
    let img_hi = f.evaluate(u.hi())?;
    let mut attempts = Vec::new();
    if &img_lo < v.lo() {
        // part of U mapped below V̄
        let cut = f.evaluate_inverse(v.lo())?;
        let u_prime = Interval::open(u.lo().clone(), cut.min(u.hi().clone()))?;
        let outside = Interval::open(Rational::zero(), v.lo().clone())?;
        attempts.push((u_prime, outside));
    }
    if &img_hi > v.hi() {
        let cut = f.evaluate_inverse(v.hi())?;
        let u_prime = Interval::open(cut.max(u.lo().clone()), u.hi().clone())?;
        let outside = Interval::open(v.hi().clone(), Rational::one())?;
        attempts.push((u_prime, outside));
    }
    for (u_prime, outside) in attempts {
        let gu = bump(&u_prime)?;
        let h = conjugate(f, &gu);
        if let Some(wit) = noncommute_witness(&h, &outside) {
            let violation = CommutatorViolation {
                u_prime,
                w_prime: wit.w,
            };
            debug_assert!(violation.verify(f));
            return Ok(Some(violation));
        }
    }
    Ok(None)
}
