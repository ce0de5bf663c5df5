//! Factoring a map with `n` breaks into `n` maps with one break each.
//!
//! The peel step removes the least break `x₁` of `f`. With `r = f*(x₁)`, the
//! one-break map `g` through `(x₁, x₁ / (x₁ + r(1 − x₁)))` has slope ratio
//! `r` at `x₁`, so `h = f ∘ g⁻¹` has slope ratio 1 at `g(x₁)` and keeps every
//! other break of `f` (moved by `g`). Then `f = h ∘ g` and we recurse on `h`.

use serde::{Deserialize, Serialize};

use crate::pl::{PLMap, Point};
use crate::rational::Rational;

/// `f = factors[0] ∘ factors[1] ∘ … ∘ factors[last]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Factorization {
    pub factors: Vec<PLMap>,
}

impl Factorization {
    /// Composes the factors in order.
    pub fn product(&self) -> PLMap {
        self.factors
            .iter()
            .fold(PLMap::identity(), |acc, g| acc.compose(g))
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// The unique one-break map with break at `x` and slope ratio `ratio` there.
pub fn one_break_with_ratio(x: &Rational, ratio: &Rational) -> PLMap {
    let one = Rational::one();
    let y = x / (x + ratio * (&one - x));
    PLMap::new(vec![Point::new(x.clone(), y)]).expect("0 < y < 1 and ratio != 1 give a valid break")
}

/// One peel: returns `(g, h)` with `f = h ∘ g`, `g` one-break at the least
/// break of `f`, and `#B(h) = #B(f) − 1`. `None` for the identity.
pub fn peel_least_break(f: &PLMap) -> Option<(PLMap, PLMap)> {
    let x1 = &f.breaks().first()?.x;
    let ratio = f.slope_ratio(x1).expect("break is interior");
    let g = one_break_with_ratio(x1, &ratio);
    let h = f.compose(&g.inverse());
    Some((g, h))
}

pub fn factor_one_break(f: &PLMap) -> Factorization {
    let mut peeled = Vec::with_capacity(f.break_count());
    let mut rest = f.clone();
    while let Some((g, h)) = peel_least_break(&rest) {
        debug_assert_eq!(h.break_count() + 1, rest.break_count());
        peeled.push(g);
        rest = h;
    }
    // f = h_last ∘ … ∘ g_2 ∘ g_1, with the first peel applied innermost
    peeled.reverse();
    Factorization { factors: peeled }
}

/// `#B(f) ≤ n`.
pub fn is_in_bn(f: &PLMap, n: usize) -> bool {
    f.break_count() <= n
}
