//! The eight acceptance criteria, run in order on one thread. Each prints a
//! single PASS/FAIL line; the process exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use unitwit::cayley_menger::{check_lemma, cm_det, Lemma};
use unitwit::density::approximate_distance;
use unitwit::trials::{prop1_suite, prop2_suite, prop4_suite, two_three_nine_triangle};
use unitwit::verifier::{check_map, generate_isometry, theorem_consistency, AffineMap, PointMap};
use unitwit::witness::{build_canonical, value};
use unitwit::{ComplexPoint, ComplexTowerElement as C, DistanceWord, TowerElement};

use common::{cm_oracle, cofactor_det, grid_search, q};

const SEED: u64 = 20_240_601;
const LEMMA_BUDGET: Duration = Duration::from_secs(1);
const PROP1_BUDGET: Duration = Duration::from_secs(30);
const PROP2_BUDGET: Duration = Duration::from_secs(30);
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(60);
const CONSISTENCY_BUDGET: Duration = Duration::from_secs(60);
const CONSISTENCY_MAPS: u64 = 10_000;
/// Distance from the density result to 2, to this many decimals.
const DENSITY_ERROR: f64 = 0.0135;
const DENSITY_TOLERANCE: f64 = 1e-4;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {:.2?}, budget {:?}", t, budget))?;
    Ok(t)
}

fn lemma_identities() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for lemma in Lemma::ALL {
        let instances = check_lemma(lemma).map_err(|e| e.to_string())?;
        ensure(instances.len() == 5, || format!("{}: {} instances", lemma, instances.len()))?;
        let mut ds: Vec<_> = instances.iter().map(|i| (i.d.clone(), i.a.clone())).collect();
        ds.dedup();
        ensure(ds.len() == 5, || format!("{}: parameters are not distinct", lemma))?;
        for inst in &instances {
            ensure(inst.passed, || {
                format!("{} at d = {}: got {:?}, want {}", lemma, inst.d, inst.polynomial, lemma.formula())
            })?;
            // the polynomial agrees with cofactor expansion at a point off the sample grid
            let t = TowerElement::from_ratio(7, 3);
            let block = lemma.matrix(&inst.d, &inst.a).substitute(&t);
            let n = block.len();
            let mut m = vec![vec![TowerElement::zero(); n + 1]; n + 1];
            for i in 0..n {
                m[0][i + 1] = TowerElement::one();
                m[i + 1][0] = TowerElement::one();
                m[i + 1][1..].clone_from_slice(&block[i]);
            }
            ensure(inst.polynomial.eval(&t) == cofactor_det(&m), || {
                format!("{} at d = {}: cofactor mismatch", lemma, inst.d)
            })?;
            count += 1;
        }
    }
    let t = within_budget(start, LEMMA_BUDGET)?;
    Ok(format!("{} factorizations exact in {:.2?}", count, t))
}

fn prop1_identity() -> Outcome {
    let start = Instant::now();
    for (n, trials) in [(2, 1000), (3, 200)] {
        let r = prop1_suite(n, trials, SEED).map_err(|e| e.to_string())?;
        ensure(r.ok(), || format!("{}: {:?}", r, r.counterexample))?;
    }
    let t = within_budget(start, PROP1_BUDGET)?;
    Ok(format!("1000 trials at n=2 and 200 at n=3 exact in {:.2?}", t))
}

fn prop2_vanishing() -> Outcome {
    let start = Instant::now();
    for (count, trials) in [(4, 1000), (5, 200)] {
        let r = prop2_suite(count, trials, SEED).map_err(|e| e.to_string())?;
        ensure(r.ok(), || format!("{}: {:?}", r, r.counterexample))?;
    }
    let t = within_budget(start, PROP2_BUDGET)?;
    Ok(format!("1000 four-point and 200 five-point determinants vanish in {:.2?}", t))
}

fn spot_values() -> Outcome {
    let (_, s3) = unitwit::field::adjoin_sqrt(&unitwit::Tower::rational(), &TowerElement::from_integer(3))
        .map_err(|e| e.to_string())?;
    let half = TowerElement::from_ratio(1, 2);
    let equilateral = [
        ComplexPoint::real(&[TowerElement::zero(), TowerElement::zero()]),
        ComplexPoint::real(&[TowerElement::one(), TowerElement::zero()]),
        ComplexPoint::real(&[half.clone(), &s3 * &half]),
    ];
    let triangle = two_three_nine_triangle();
    for (name, pts, want) in [("equilateral", &equilateral[..], -3), ("(2, 3, 9)", &triangle[..], -8)] {
        let got = cm_det(pts).map_err(|e| e.to_string())?;
        let oracle = cm_oracle(pts);
        ensure(oracle == C::from(want), || format!("{} cofactor oracle gives {}", name, oracle))?;
        ensure(got == C::from(want), || format!("{} triangle: {} != {}", name, got, want))?;
    }
    Ok("equilateral CM = -3, (2, 3, 9) CM = -8".into())
}

fn witness_soundness() -> Outcome {
    let start = Instant::now();
    let mut words: Vec<DistanceWord> =
        [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)].iter().map(|&(k, l)| DistanceWord::power(k, l)).collect();
    words.push(DistanceWord::double(DistanceWord::One));
    words.push(DistanceWord::sqrt2(DistanceWord::One));
    let mut pairs = 0;
    for w in &words {
        let s = build_canonical(w).map_err(|e| e.to_string())?;
        for p in s.pairs() {
            let (a, b) = (s.point(p.a).unwrap(), s.point(p.b).unwrap());
            let dx = &a.x - &b.x;
            let dy = &a.y - &b.y;
            ensure(&(&dx * &dx) + &(&dy * &dy) == p.dist2, || format!("{}: pair {} {} is off", w, p.a, p.b))?;
        }
        let (x, y) = s.endpoint_points();
        let v = value(w).map_err(|e| e.to_string())?;
        ensure(x.dist2(y) == v.square(), || format!("{}: endpoints are not at distance {}", w, v))?;
        pairs += s.pairs().len();
    }
    let sqrt3 = build_canonical(&DistanceWord::power(0, 1)).map_err(|e| e.to_string())?;
    let st = sqrt3.stats();
    ensure(st.point_count == 7 && st.unit_pair_count == 11, || {
        format!("(0,1) set has {} points and {} unit pairs", st.point_count, st.unit_pair_count)
    })?;
    let t = within_budget(start, SOUNDNESS_BUDGET)?;
    Ok(format!(
        "{} words, {} pairs recomputed exactly; (0,1) has 7 points, 11 unit pairs; {:.2?}",
        words.len(),
        pairs,
        t
    ))
}

fn theorem_consistency_suite() -> Outcome {
    let start = Instant::now();
    let mut non_real = 0;
    for (k, l) in [(0, 1), (1, 0)] {
        let s = build_canonical(&DistanceWord::power(k, l)).map_err(|e| e.to_string())?;
        // the example map with a = 5/4, b = 3i/4
        let fixed = AffineMap::rotation(C::gaussian(5, 0, 4), C::gaussian(0, 3, 4));
        let r = check_map(&s, &fixed.on(&s)).map_err(|e| e.to_string())?;
        ensure(r.unit_ok && r.endpoint_result.matches, || format!("({},{}): a = 5/4, b = 3i/4 not preserved", k, l))?;
        for seed in 0..CONSISTENCY_MAPS {
            let g = generate_isometry(SEED ^ seed);
            ensure(g.is_orthogonal(), || format!("seed {}: map is not orthogonal", seed))?;
            if g.m.iter().flatten().any(|c| !c.is_real()) {
                non_real += 1;
            }
            let f: PointMap = g.on(&s);
            let ok = theorem_consistency(&s, &f).map_err(|e| e.to_string())?;
            ensure(ok, || format!("({},{}) seed {}: unit pairs preserved but endpoint moved", k, l, seed))?;
            if seed < 50 {
                let r = check_map(&s, &f).map_err(|e| e.to_string())?;
                ensure(r.unit_ok, || format!("({},{}) seed {}: isometry breaks a unit pair", k, l, seed))?;
            }
        }
        let twice = AffineMap::scaling(C::from(2)).on(&s);
        let r = check_map(&s, &twice).map_err(|e| e.to_string())?;
        ensure(!r.unit_ok && r.consistent(), || format!("({},{}): scaling by 2 not flagged", k, l))?;
    }
    ensure(non_real > 0, || "no generated map had non-real parameters".into())?;
    let t = within_budget(start, CONSISTENCY_BUDGET)?;
    Ok(format!(
        "{} maps on each of (0,1), (1,0), {} with non-real entries, zero failures; scaling by 2 flagged; {:.2?}",
        CONSISTENCY_MAPS, non_real, t
    ))
}

fn density() -> Outcome {
    let target = q(2, 1);
    let eps = q(1, 20);
    let r = approximate_distance(&TowerElement::from_integer(2), &eps, 20).map_err(|e| e.to_string())?;
    let oracle = grid_search(&target, &eps, 40);
    ensure(oracle == Some((7, 2)), || format!("grid oracle found {:?}", oracle))?;
    ensure((r.k, r.l) == (7, 2), || format!("search returned ({}, {})", r.k, r.l))?;
    ensure(r.error_bound <= eps, || format!("error bound {} above 1/20", r.error_bound))?;
    let err = (r.value_exact.to_f64() - 2.0).abs();
    ensure((err - DENSITY_ERROR).abs() < DENSITY_TOLERANCE, || format!("|value - 2| = {}", err))?;
    let bound = r.error_bound.to_f64().unwrap_or(f64::NAN);
    ensure(bound >= err, || format!("bound {} below true error {}", bound, err))?;
    Ok(format!("(7, 2) minimal over k, l <= 40; |value - 2| = {:.5}, certified bound {:.5}", err, bound))
}

fn prop4_contrapositive() -> Outcome {
    let r = prop4_suite(1000, SEED).map_err(|e| e.to_string())?;
    ensure(r.ok(), || format!("{}: {:?}", r, r.counterexample))?;
    Ok("1000 trials, zero failures".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("lemma identities", lemma_identities),
        ("proposition 1 identity", prop1_identity),
        ("proposition 2 vanishing", prop2_vanishing),
        ("determinant spot values", spot_values),
        ("witness soundness", witness_soundness),
        ("theorem consistency", theorem_consistency_suite),
        ("density", density),
        ("proposition 4 contrapositive", prop4_contrapositive),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("criterion {} ({}): PASS {}", i + 1, name, msg),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({}): FAIL {}", i + 1, name, msg);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
