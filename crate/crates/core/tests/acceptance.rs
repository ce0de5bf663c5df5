//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every oracle here is computed independently of the code paths
//! it checks wherever that is possible (pointwise evaluation instead of
//! break lists, hand formulas instead of constructors).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use plhomeo::commutation::{
    cuv_commutator_probe, cuv_direct, guided_violation, noncommute_witness, support,
};
use plhomeo::encoding::{
    category_experiment, decode, encode, random_fraction, reverify_deficient, sample_an_with,
    trial_rng, SampleConfig,
};
use plhomeo::factorization::{factor_one_break, peel_least_break};
use plhomeo::hoelder::{
    build_escape_hoelder, compose_hoelder_bound, figure_b_points, hoelder_constant,
    verify_escape_hoelder, HoelderCertificate, HoelderExponent, PQMap, SeparatedFamily,
};
use plhomeo::line_circle::{
    centralizer_membership_probe, embed_interval, embed_interval_circle, PLMapCircle, PLMapLine,
};
use plhomeo::lipschitz::{
    build_escape_lip, verify_escape_lip, Case, IntervalFamily, LipEscapeCertificate,
};
use plhomeo::{Interval, PLMap, Point, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn iv(a: Rational, b: Rational) -> Interval {
    Interval::open(a, b).unwrap()
}

fn random_map(rng: &mut ChaCha8Rng, max_breaks: usize, bound: u64) -> PLMap {
    let n = rng.gen_range(0..=max_breaks);
    sample_an_with(rng, n, bound).unwrap()
}

fn random_interval(rng: &mut ChaCha8Rng, bound: u64) -> Interval {
    loop {
        let a = random_fraction(rng, bound);
        let b = random_fraction(rng, bound);
        if a != b {
            return iv(a.clone().min(b.clone()), a.max(b));
        }
    }
}

/// Every break abscissa of the three maps, their images, and midpoints.
fn grid(maps: &[&PLMap]) -> Vec<Rational> {
    let mut xs = vec![Rational::zero(), Rational::one()];
    for f in maps {
        for p in f.breaks() {
            xs.push(p.x.clone());
            xs.push(p.y.clone());
        }
    }
    xs.sort();
    xs.dedup();
    let mids: Vec<Rational> = xs.windows(2).map(|w| w[0].midpoint(&w[1])).collect();
    xs.extend(mids);
    xs
}

/// Slope ratio computed from two chord slopes, without break lists.
fn ratio_oracle(f: &PLMap, x: &Rational) -> Rational {
    // a neighbourhood small enough to avoid every other break of f
    let mut h = Rational::one();
    for b in f.break_points() {
        let d = (&b - x).abs();
        if !d.is_zero() && d < h {
            h = d;
        }
    }
    h = h.min(x.clone()).min(Rational::one() - x) / Rational::integer(2);
    let fx = f.evaluate(x).unwrap();
    let right = (f.evaluate(&(x + &h)).unwrap() - &fx) / &h;
    let left = (&fx - f.evaluate(&(x - &h)).unwrap()) / &h;
    right / left
}

fn criterion_1() -> String {
    let mut rng = trial_rng(101, 0);
    let mut checks = 0usize;
    for _ in 0..1000 {
        let f = random_map(&mut rng, 8, 1_000_000);
        let g = random_map(&mut rng, 8, 1_000_000);
        let h = random_map(&mut rng, 8, 1_000_000);
        let fg = f.compose(&g);
        assert_eq!(fg.compose(&h), f.compose(&g.compose(&h)), "associativity");
        assert!(f.compose(&f.inverse()).is_identity(), "f f⁻¹");
        assert!(f.inverse().compose(&f).is_identity(), "f⁻¹ f");
        for x in grid(&[&f, &g]) {
            assert_eq!(
                fg.evaluate(&x).unwrap(),
                f.evaluate(&g.evaluate(&x).unwrap()).unwrap(),
                "pointwise at {x}"
            );
            checks += 1;
        }
        let mut probes: Vec<Rational> = g.break_points();
        probes.extend(
            f.break_points()
                .iter()
                .map(|b| g.evaluate_inverse(b).unwrap()),
        );
        probes.push(random_fraction(&mut rng, 1_000_000));
        for x in probes {
            let chain =
                f.slope_ratio(&g.evaluate(&x).unwrap()).unwrap() * g.slope_ratio(&x).unwrap();
            assert_eq!(fg.slope_ratio(&x).unwrap(), chain, "chain rule at {x}");
            assert_eq!(ratio_oracle(&fg, &x), chain, "chord oracle at {x}");
            checks += 1;
        }
    }
    format!("1000 triples, {checks} pointwise and chain-rule checks")
}

fn criterion_2() -> String {
    let mut rng = trial_rng(101, 0);
    let mut deficient = 0;
    for _ in 0..1000 {
        let f = random_map(&mut rng, 8, 1_000_000);
        let g = random_map(&mut rng, 8, 1_000_000);
        let fg = f.compose(&g);
        assert!(fg.break_count() <= f.break_count() + g.break_count());
        let gb = g.break_points();
        let pulled: Vec<Rational> = f
            .break_points()
            .iter()
            .map(|b| g.evaluate_inverse(b).unwrap())
            .collect();
        for b in fg.break_points() {
            assert!(gb.contains(&b) || pulled.contains(&b), "stray break {b}");
        }
        if fg.break_count() < f.break_count() + g.break_count() {
            deficient += 1;
        }
    }
    let f = PLMap::new(vec![Point::new(r(1, 2), r(1, 4))]).unwrap();
    let g = PLMap::new(vec![Point::new(r(1, 3), r(1, 2))]).unwrap();
    let fg = f.compose(&g);
    assert_eq!(fg.break_count(), 1);
    assert_eq!(fg.slope_ratio(&r(1, 3)).unwrap(), r(3, 2));
    format!(
        "bound and containment on 1000 pairs ({deficient} deficient); injected pair has 1 break"
    )
}

fn criterion_3() -> String {
    let f = PLMap::new(vec![Point::new(r(1, 2), r(1, 4))]).unwrap();
    let mut parts = Vec::new();
    for m in 1..=3 {
        let cfg = SampleConfig {
            seed: 2024 + m as u64,
            denominator_bound: 1000,
            trials: 1000,
        };
        let report = category_experiment(&f, m, &cfg).unwrap();
        let frac = report.maximal_fraction();
        assert!(frac >= 0.99, "m={m}: fraction {frac}");
        assert_eq!(report.maximal_count + report.deficient_examples.len(), 1000);
        for d in &report.deficient_examples {
            assert_eq!(d.g.break_count(), m);
            assert_eq!(f.compose(&d.g).break_count(), d.product_breaks);
            assert!(
                reverify_deficient(&f, &d.g, d.product_breaks),
                "trial {}",
                d.trial
            );
        }
        parts.push(format!(
            "m={m}: {frac:.3} ({} deficient, all re-verified)",
            report.deficient_examples.len()
        ));
    }
    parts.join("; ")
}

fn criterion_4() -> String {
    let mut rng = trial_rng(404, 0);
    let mut total = 0;
    for _ in 0..200 {
        let n = rng.gen_range(0..=20);
        let f = sample_an_with(&mut rng, n, 1_000_000).unwrap();
        let mut rest = f.clone();
        while let Some((g, h)) = peel_least_break(&rest) {
            assert_eq!(g.break_count(), 1);
            assert_eq!(h.break_count() + 1, rest.break_count());
            assert_eq!(h.compose(&g), rest);
            rest = h;
        }
        let fac = factor_one_break(&f);
        assert_eq!(fac.len(), f.break_count());
        assert!(fac.factors.iter().all(|g| g.break_count() == 1));
        assert_eq!(fac.product(), f);
        total += fac.len();
    }
    format!("200 maps, {total} one-break factors, exact reconstruction")
}

fn lip_family() -> IntervalFamily {
    IntervalFamily::new(
        (0..10)
            .map(|k| iv(r(k, 10) + r(1, 40), r(k + 1, 10) - r(1, 40)))
            .collect(),
    )
    .unwrap()
}

fn lip_certificates() -> Vec<LipEscapeCertificate> {
    let family = lip_family();
    let steep = PLMap::new(vec![Point::new(r(1, 10), r(9, 10))]).unwrap();
    let mut out = Vec::new();
    for n in [2u64, 3, 5] {
        let adversaries: Vec<PLMap> = family
            .intervals()
            .iter()
            .enumerate()
            .map(|(k, j)| match k % 3 {
                0 => PLMap::identity(),
                1 => plhomeo::commutation::bump(j).unwrap(),
                _ => steep.clone(),
            })
            .collect();
        let f = build_escape_lip(n, &family, &adversaries).unwrap();
        out.push(verify_escape_lip(&f, n, &family, &adversaries).unwrap());
    }
    out
}

fn criterion_5() -> String {
    let mut parts = Vec::new();
    for cert in lip_certificates() {
        let n = Rational::integer(cert.n as i64);
        let nn = &n * &n;
        assert!(cert.f.bilipschitz_constant() <= &nn + Rational::one());
        let mut cases = [0, 0];
        for (rec, j) in cert.records.iter().zip(cert.intervals.intervals()) {
            assert!(rec.quotient > n, "k={} quotient {}", rec.k, rec.quotient);
            // independent quotient from the stored witness points
            let (p, q) = &rec.witness_points;
            let h = match rec.side {
                plhomeo::lipschitz::Side::Map => cert.f.compose(&cert.adversaries[rec.k].inverse()),
                plhomeo::lipschitz::Side::Inverse => {
                    cert.adversaries[rec.k].compose(&cert.f.inverse())
                }
            };
            let direct = (h.evaluate(q).unwrap() - h.evaluate(p).unwrap()) / (q - p);
            assert_eq!(direct, rec.quotient);
            match rec.case {
                Case::Escape => {
                    cases[1] += 1;
                    assert_eq!(cert.f.max_slope_on(j), nn);
                    let step = j.length() / (&nn + Rational::one());
                    assert_eq!(cert.f.evaluate(&(j.lo() + &step)).unwrap(), j.hi() - &step);
                }
                Case::Inherit => {
                    cases[0] += 1;
                    assert_eq!(cert.f.max_slope_on(j), Rational::one());
                }
            }
        }
        assert!(cases[0] > 0 && cases[1] > 0, "both cases must occur");
        parts.push(format!(
            "n={}: {} case-1, {} case-2",
            cert.n, cases[0], cases[1]
        ));
    }
    let unit = IntervalFamily::new(vec![iv(r(0, 1), r(1, 1))]).unwrap();
    let f = build_escape_lip(2, &unit, &[PLMap::identity()]).unwrap();
    let cert = verify_escape_lip(&f, 2, &unit, &[PLMap::identity()]).unwrap();
    assert_eq!(cert.records[0].quotient, r(4, 1));
    parts.push("n=2 on (0,1): quotient 4".into());
    parts.join("; ")
}

/// Intervals laid out from 0, each followed by a gap equal to its length.
fn hoelder_family(lengths: &[Rational]) -> SeparatedFamily {
    let mut at = Rational::zero();
    let mut out = Vec::new();
    for l in lengths {
        out.push(iv(at.clone(), &at + l));
        at = &at + l + l;
    }
    SeparatedFamily::new(out).unwrap()
}

fn hoelder_certificates() -> Vec<HoelderCertificate> {
    let gentle = PQMap::new(vec![
        Point::new(r(0, 1), r(11, 10)),
        Point::new(r(1, 1), r(9, 10)),
    ])
    .unwrap();
    let mut out = Vec::new();
    for (n, p, q) in [(1u64, 1u32, 2u32), (2, 1, 2), (1, 1, 3)] {
        let e = HoelderExponent::new(p, q).unwrap();
        let lengths: Vec<Rational> = if q == 2 {
            [4, 5, 6, 8, 10].iter().map(|d| r(1, d * d)).collect()
        } else {
            [2, 3, 4, 5, 6].iter().map(|d| r(1, d * d * d)).collect()
        };
        let family = hoelder_family(&lengths);
        let adversaries: Vec<PQMap> = family
            .intervals()
            .iter()
            .enumerate()
            .map(|(k, j)| match k % 3 {
                0 => PQMap::identity(),
                1 => {
                    let own = SeparatedFamily::new(vec![j.clone()]).unwrap();
                    build_escape_hoelder(n, e, &own, &[PQMap::identity()]).unwrap()
                }
                _ => gentle.clone(),
            })
            .collect();
        let f = build_escape_hoelder(n, e, &family, &adversaries).unwrap();
        out.push(verify_escape_hoelder(&f, n, e, &family, &adversaries).unwrap());
    }
    out
}

fn criterion_6() -> String {
    let mut parts = Vec::new();
    for cert in hoelder_certificates() {
        let (n, e) = (cert.n, cert.epsilon);
        let (p, q) = (e.p() as i32, e.q() as i32);
        let c = Rational::integer(2)
            * (Rational::integer(n as i64 + 1).pow(4) + Rational::one())
            * Rational::integer(n as i64 + 1).pow(4);
        assert_eq!(c, hoelder_constant(n));
        let factor = Rational::integer((n * (n + 1)) as i64);
        let mut case2 = 0;
        for (rec, j) in cert.records.iter().zip(cert.intervals.intervals()) {
            let l = j.length();
            for x in [j.lo(), j.hi()] {
                assert!(cert.f.derivative_at(x).unwrap().is_one(), "junction at {x}");
            }
            match rec.case {
                Case::Escape => {
                    case2 += 1;
                    // area: excess δ·ℓ^ε((n+1)⁴ − 1) against deficit (ℓ − 2δ)ℓ^ε/2
                    let l_eps = e.power_of(&l).unwrap();
                    let m4 = Rational::integer(n as i64 + 1).pow(4);
                    let delta = &l / (Rational::integer(2) * &m4);
                    let excess = &delta * &l_eps * (&m4 - Rational::one());
                    let deficit =
                        (&l - Rational::integer(2) * &delta) * &l_eps / Rational::integer(2);
                    assert_eq!(excess, deficit);
                    assert_eq!(cert.f.integral_over(j), l);
                    let (_, xk, yk) = figure_b_points(j, n);
                    assert_eq!(
                        cert.f.derivative_at(&xk).unwrap(),
                        Rational::one() + &l_eps * &m4
                    );
                    assert_eq!(cert.f.derivative_at(&yk).unwrap(), Rational::one() - &l_eps);
                    // |s| ≤ C·ℓ^{ε−1}  ⇔  |s|^q ≤ C^q·ℓ^{p−q}
                    for s in cert.f.derivative_slopes_on(j) {
                        assert!(s.abs().pow(q) <= c.pow(q) * l.pow(p - q), "slope {s}");
                    }
                    assert_eq!(rec.factor, factor);
                    assert!(rec.lhs.pow(q) > factor.pow(q) * rec.rhs_base.pow(p));
                }
                Case::Inherit => {
                    assert!(rec.lhs.pow(q) > rec.factor.pow(q) * rec.rhs_base.pow(p));
                    let (lo, hi) = cert.f.derivative_range_on(j);
                    assert!(lo.is_one() && hi.is_one());
                }
            }
        }
        assert!(case2 > 0 && case2 < cert.records.len());
        parts.push(format!("(n={n}, ε={e}): {case2}/5 case-2"));
    }
    let e = HoelderExponent::new(1, 2).unwrap();
    let fam = SeparatedFamily::new(vec![iv(r(0, 1), r(1, 16))]).unwrap();
    let f = build_escape_hoelder(1, e, &fam, &[PQMap::identity()]).unwrap();
    let cert = verify_escape_hoelder(&f, 1, e, &fam, &[PQMap::identity()]).unwrap();
    let rec = &cert.records[0];
    assert_eq!(rec.lhs.pow(2), r(16, 1));
    assert_eq!(rec.factor.pow(2) * &rec.rhs_base, r(1, 8));
    parts.push("(1,1/2) on (0,1/16): 16 > 1/8".into());
    parts.join("; ")
}

fn criterion_7() -> String {
    let mut rng = trial_rng(707, 0);
    let bound = 1000;
    let mut witnesses = 0;
    while witnesses < 100 {
        let f = random_map(&mut rng, 5, bound);
        let w = random_interval(&mut rng, bound);
        if !support(&f).iter().any(|s| s.overlaps(&w)) {
            continue;
        }
        let wit = noncommute_witness(&f, &w).expect("f moves W");
        assert!(wit.verify(&f));
        witnesses += 1;
    }
    let (mut inside, mut outside) = (0, 0);
    let mut trial = 0u64;
    while inside + outside < 100 {
        trial += 1;
        let f = random_map(&mut rng, 5, bound);
        let u = random_interval(&mut rng, bound);
        // half the triples get V ⊇ f(Ū), the rest a random V
        let v = if trial.is_multiple_of(2) {
            let lo = f.evaluate(u.lo()).unwrap() * r(9, 10);
            let hi = f.evaluate(u.hi()).unwrap();
            let hi = &hi + (Rational::one() - &hi) / Rational::integer(2);
            iv(lo, hi)
        } else {
            random_interval(&mut rng, bound)
        };
        if v.lo().is_zero() && v.hi().is_one() {
            continue;
        }
        let cfg = SampleConfig {
            seed: trial,
            denominator_bound: 64,
            trials: 50,
        };
        let outcome = cuv_commutator_probe(&f, &u, &v, &cfg).unwrap();
        if cuv_direct(&f, &u, &v).unwrap() {
            assert!(outcome.all_commute && outcome.violation.is_none());
            inside += 1;
        } else {
            let viol = guided_violation(&f, &u, &v)
                .unwrap()
                .expect("guided search");
            assert!(viol.verify(&f));
            assert!(!outcome.all_commute);
            outside += 1;
        }
    }
    format!("100 witnesses verified; C(U,V): {inside} members, {outside} violations found")
}

fn random_circle(rng: &mut ChaCha8Rng) -> PLMapCircle {
    loop {
        let k = rng.gen_range(0..4usize);
        let mut xs: Vec<Rational> = (0..k)
            .map(|_| random_fraction(rng, 200) * Rational::integer(2))
            .collect();
        let mut ys: Vec<Rational> = (0..k)
            .map(|_| random_fraction(rng, 200) * Rational::integer(2))
            .collect();
        xs.sort();
        ys.sort();
        let y0 = random_fraction(rng, 200) - Rational::new(1, 2);
        let mut nodes = vec![Point::new(Rational::zero(), Rational::zero())];
        nodes.extend(xs.into_iter().zip(ys).map(|(x, y)| Point::new(x, y)));
        // shift values so that f(0) = y0
        let nodes: Vec<Point> = nodes
            .into_iter()
            .map(|p| Point::new(p.x, p.y + &y0))
            .collect();
        if let Ok(c) = PLMapCircle::new(nodes) {
            return c;
        }
    }
}

fn criterion_8() -> String {
    let mut rng = trial_rng(808, 0);
    for _ in 0..100 {
        let f = random_map(&mut rng, 6, 10_000);
        let g = random_map(&mut rng, 6, 10_000);
        let fg = f.compose(&g);
        assert_eq!(
            embed_interval(&fg),
            embed_interval(&f).compose(&embed_interval(&g))
        );
        assert_eq!(
            embed_interval_circle(&fg),
            embed_interval_circle(&f)
                .compose(&embed_interval_circle(&g))
                .unwrap()
        );
        let e = embed_interval(&f);
        for x in [r(-7, 3), r(-1, 5), r(13, 10), r(9, 2)] {
            assert_eq!(e.evaluate(&x), x);
        }
    }
    for _ in 0..100 {
        let a = random_circle(&mut rng);
        let b = random_circle(&mut rng);
        let ab = a.compose(&b).unwrap();
        for k in 0..5 {
            let x =
                random_fraction(&mut rng, 500) * Rational::integer(2) + Rational::integer(k - 2);
            let direct = a.evaluate(&b.evaluate(&x));
            assert_eq!(ab.evaluate(&x), direct);
            assert_eq!(
                ab.evaluate(&(&x + Rational::integer(2))),
                &direct + Rational::integer(2)
            );
        }
        assert!(ab.compose(&ab.inverse()).unwrap().is_identity());
    }
    let cfg = SampleConfig {
        seed: 8,
        denominator_bound: 100,
        trials: 50,
    };
    for _ in 0..20 {
        let e = embed_interval(&random_map(&mut rng, 6, 10_000));
        assert!(centralizer_membership_probe(&e, &cfg).unwrap().all_commute);
    }
    let t = PLMapLine::translation(r(2, 1));
    let out = centralizer_membership_probe(&t, &cfg).unwrap();
    assert!(out.witness.expect("x+2 moves points").verify_line(&t));
    "100 homomorphism pairs, 100 periodic composites, probe exact on embeds and x+2".into()
}

fn round_trip<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug>(
    v: &T,
) {
    let s = serde_json::to_string(v).unwrap();
    let back: T = serde_json::from_str(&s).unwrap();
    assert_eq!(&back, v);
    assert_eq!(serde_json::to_string(&back).unwrap(), s);
}

fn criterion_9() -> String {
    let mut rng = trial_rng(909, 0);
    for _ in 0..1000 {
        let f = random_map(&mut rng, 8, 1_000_000);
        round_trip(&f);
        assert_eq!(decode(&encode(&f)).unwrap(), f);
        round_trip(&embed_interval(&f));
    }
    let lips = lip_certificates();
    let hoelders = hoelder_certificates();
    for c in &lips {
        round_trip(c);
        c.check().unwrap();
    }
    for c in &hoelders {
        round_trip(c);
        c.check().unwrap();
    }
    // ε = 1/2: m_n − n(n+1) − 1 = ⌊n(n+1)^{3/2}⌋, bracketed by integer squares
    let half = HoelderExponent::new(1, 2).unwrap();
    for (n, expected) in [(1u64, 5u64), (2, 17)] {
        let t2 = n * n * (n + 1).pow(3);
        let s = (0..).find(|s: &u64| (s + 1) * (s + 1) > t2).unwrap();
        assert!(s * s <= t2);
        assert_eq!(n * (n + 1) + s + 1, expected);
        assert_eq!(compose_hoelder_bound(n, half), expected.into());
    }
    format!(
        "1000 maps, {} certificates byte-exact; m1=5, m2=17",
        lips.len() + hoelders.len()
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> String);
    let criteria: [Criterion; 9] = [
        ("algebra", criterion_1),
        ("break bound", criterion_2),
        ("category surrogate", criterion_3),
        ("factorization", criterion_4),
        ("Lipschitz escape", criterion_5),
        ("Hölder escape", criterion_6),
        ("commutation", criterion_7),
        ("line/circle", criterion_8),
        ("round trips", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] {}. {name} ({secs:.1}s): {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("[FAIL] {}. {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
