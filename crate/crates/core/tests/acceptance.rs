//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Oracles here are written from the closed-form conditions and do not call
//! the code paths they check.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rieszmix::decide::{decide_J, decide_T, decide_T_n1, decide_riesz_classic, problem_j, problem_t, Status};
use rieszmix::exponents::{Exponent, ExponentVector, Order, Rational};
use rieszmix::numeric::probe::{ratio_probe, Family, ProbeOptions, ProbeTarget};
use rieszmix::numeric::{minkowski_swap_check, tail_scaling_check, translation_limit_probe, Axis, GridFunction};
use rieszmix::ratlinalg::{corner_rank_equiv_check, inverse, random, schur_identity_details, RatMatrix};
use rieszmix::selftest::random_t_matrix;

const GRID: [&str; 9] = ["1", "6/5", "4/3", "3/2", "2", "3", "4", "6", "inf"];

fn rat(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// `1/p` read straight off the literal.
fn recip(s: &str) -> Rational {
    match s {
        "inf" => Rational::zero(),
        _ => match s.split_once('/') {
            Some((a, b)) => rat(b.parse().unwrap(), a.parse().unwrap()),
            None => rat(1, s.parse().unwrap()),
        },
    }
}

fn exp(s: &str) -> Exponent {
    s.parse().unwrap()
}

/// Exponent with reciprocal `r`, `0 ≤ r ≤ 1`.
fn exp_from_recip(r: &Rational) -> Exponent {
    if r.is_zero() {
        Exponent::infinity()
    } else {
        Exponent::finite(r.recip()).unwrap()
    }
}

fn order(r: &Rational) -> Order {
    Order::new(r.clone()).unwrap()
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => unreachable!(),
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn first(bad: &[String]) -> String {
    bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
}

fn within(t: Duration, limit: f64) -> bool {
    t.as_secs_f64() < limit
}

/// Bilinear line case: straight-line `1 < p2 < q < p1 ≤ ∞` plus invertibility.
fn c1_m1_grid() -> Outcome {
    let a = vec![vec![1i64, -1], vec![1, 1]];
    let inv_ok = det_i64(&a) != 0 && a[1][0] != 0 && a[1][1] != 0;
    let am = RatMatrix::from_i64(&[&[1, -1], &[1, 1]]);
    let start = Instant::now();
    let (mut combos, mut bounded, mut bad) = (0, 0, Vec::new());
    for p1 in GRID {
        for p2 in GRID {
            for k in 1..=7 {
                let lambda = rat(k, 8);
                let rq = recip(p1) + recip(p2) - (Rational::one() - &lambda);
                if rq.is_negative() || rq > Rational::one() {
                    continue;
                }
                combos += 1;
                let (r1, r2) = (recip(p1), recip(p2));
                let expect = inv_ok && r2 < Rational::one() && r2 > rq && rq > r1;
                let prob = problem_t(1, 1, am.clone(), vec![exp(p1), exp(p2)], exp_from_recip(&rq), order(&lambda)).unwrap();
                let got = decide_T(&prob).unwrap().is_bounded();
                bounded += expect as usize;
                if got != expect {
                    bad.push(format!("p=({p1},{p2}) λ={lambda}"));
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && within(t, 1.0) && bounded > 0,
        format!("{combos} admissible combos ({bounded} bounded), {} disagreements{}, {:.3} s", bad.len(), first(&bad), t.as_secs_f64()),
    )
}

/// One-block `J` with invertible `D` against the classical fractional integral.
fn c2_riesz_collapse() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut bounded = 0;
    for (n, d) in [(1usize, RatMatrix::from_i64(&[&[2]])), (2, RatMatrix::from_i64(&[&[1, 2], &[3, -1]]))] {
        let nn = rat(n as i64, 1);
        for p in GRID {
            for q in GRID {
                for k in 1..=7 {
                    let lambda = rat(k * n as i64, 8);
                    // Hardy-Littlewood-Sobolev: 1 < p < q < ∞ and 1/q = 1/p − (n − λ)/n.
                    let (rp, rq) = (recip(p), recip(q));
                    let hls = rp < Rational::one()
                        && rp > rq
                        && !rq.is_zero()
                        && rq == &rp - (&nn - &lambda) / &nn;
                    let j = decide_J(&problem_j(1, n, d.clone(), vec![exp(p)], exp(q), order(&lambda)).unwrap()).unwrap();
                    let r = decide_riesz_classic(&exp(p), &exp(q), &order(&lambda), n).unwrap();
                    checked += 1;
                    bounded += hls as usize;
                    if j.status != r.status || j.is_bounded() != hls {
                        bad.push(format!("n={n} p={p} q={q} λ={lambda}: J {:?}, riesz {:?}, oracle {hls}", j.status, r.status));
                    }
                }
            }
        }
    }
    outcome(bad.is_empty() && bounded > 0, format!("{checked} cases ({bounded} bounded), {} disagreements{}", bad.len(), first(&bad)))
}

/// General characterization specialised to `n = 1`, evaluated directly.
fn t_n1_oracle(a: &RatMatrix, m: usize, p: &[&str], rq: &Rational, lambda: &Rational) -> bool {
    let r: Vec<Rational> = p.iter().map(|s| recip(s)).collect();
    let sum: Rational = r.iter().cloned().sum();
    let homog = sum == rq + (rat(m as i64, 1) - lambda);
    // p_k for k = 2..m+1 is r[k-1]; column m+1 of A is index m.
    let ks = 2..=m + 1;
    let exists = ks.clone().any(|k| r[k - 1].is_positive() && r[k - 1] < Rational::one());
    let k0 = ks.clone().filter(|&k| r[k - 1] < Rational::one()).max();
    let k1 = ks.filter(|&k| !a.at(k - 1, m).is_zero()).max();
    let (Some(k0), Some(k1)) = (k0, k1) else { return false };
    homog
        && exists
        && r[k1 - 1] > *rq
        && r[k0 - 1] >= *rq
        && r[k1 - 1] >= *rq
        && *rq > r[0]
}

fn c3_n1_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let start = Instant::now();
    let (mut checked, mut bounded, mut bad) = (0, 0, Vec::new());
    for i in 0..200 {
        let m = 2 + i % 2;
        let a = loop {
            let a = random::matrix(&mut rng, m + 1, m + 1, 0.35);
            let minor = a.window(1, 0, m, m);
            let tail_nonzero = (1..=m).any(|r| !a.at(r, m).is_zero());
            if a.is_invertible() && minor.is_invertible() && tail_nonzero {
                break a;
            }
        };
        for _ in 0..50 {
            let p: Vec<&str> = (0..=m).map(|_| *GRID.choose(&mut rng).unwrap()).collect();
            let lambda = rat(rng.gen_range(1..4 * m as i64), 4);
            let sum: Rational = p.iter().map(|s| recip(s)).sum();
            let derived = sum - (rat(m as i64, 1) - &lambda);
            let rq = if !derived.is_negative() && derived <= Rational::one() && rng.gen_bool(0.8) {
                derived
            } else {
                recip(GRID.choose(&mut rng).unwrap())
            };
            let expect = t_n1_oracle(&a, m, &p, &rq, &lambda);
            let prob = problem_t(m, 1, a.clone(), p.iter().map(|s| exp(s)).collect(), exp_from_recip(&rq), order(&lambda)).unwrap();
            let got = decide_T_n1(&prob).unwrap();
            checked += 1;
            bounded += expect as usize;
            if got.is_bounded() != expect {
                bad.push(format!("A={a:?} p={p:?} 1/q={rq} λ={lambda}: got {:?}", got.status));
            }
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && within(t, 10.0) && bounded > 0,
        format!("{checked} instances ({bounded} bounded), {} disagreements{}, {:.2} s", bad.len(), first(&bad), t.as_secs_f64()),
    )
}

fn c4_matrix_lemmas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let (mut schur_fail, mut nonvacuous) = (0, 0);
    for _ in 0..500 {
        let size = rng.gen_range(2..=6);
        let n1 = rng.gen_range(1..size);
        let a = random::invertible(&mut rng, size, 0.3);
        // exactness sanity: A A^{-1} = I
        let inv = inverse(&a).unwrap();
        assert_eq!(&a * &inv, RatMatrix::identity(size));
        match schur_identity_details(&a, n1, size - n1) {
            Ok(c) if c.holds() => nonvacuous += (c.identity_holds == Some(true)) as usize,
            _ => schur_fail += 1,
        }
    }
    let (mut corner_fail, mut deficient) = (0, 0);
    for _ in 0..500 {
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a = random_t_matrix(&mut rng, m, n);
        deficient += !a.block(m + 1, m + 1).is_invertible() as usize;
        if corner_rank_equiv_check(&a) != Ok(true) {
            corner_fail += 1;
        }
    }
    outcome(
        schur_fail == 0 && corner_fail == 0 && nonvacuous > 0 && deficient > 0,
        format!(
            "block-inverse 500 ({nonvacuous} with the identity exercised), {schur_fail} failures; corner-rank 500 ({deficient} rank-deficient corners), {corner_fail} failures"
        ),
    )
}

fn indicator(axes: Vec<Axis>, half: f64) -> GridFunction {
    GridFunction::from_fn(axes, |x| x.iter().all(|v| v.abs() < half) as u8 as f64).unwrap()
}

fn c5_translation() -> Outcome {
    let p = ExponentVector::new(vec![exp("2"), exp("3")]).unwrap();
    let mut worst = 0.0f64;
    let mut rows = 0;
    for groups in [vec![1usize, 1], vec![2, 2]] {
        let d: usize = groups.iter().sum();
        let f = indicator(vec![Axis::new(8, 2.0).unwrap(); d], 1.0);
        let diameter = 2.0;
        for k in 1..=2 {
            let expect = 2f64.powf(1.0 / [2.0, 3.0][k - 1]);
            let shifts = [diameter, diameter + 0.5, 2.0 * diameter, 8.0];
            for (_, ratio) in translation_limit_probe(&f, &groups, &p, k, &shifts).unwrap() {
                worst = worst.max((ratio - expect).abs());
                rows += 1;
            }
        }
    }
    outcome(worst < 1e-12, format!("{rows} shifted ratios, max |ratio − 2^(1/p_k)| = {worst:.2e}"))
}

fn identity_stack(lambda: Rational, q: &str) -> rieszmix::decide::ProblemJ {
    problem_j(2, 1, RatMatrix::from_i64(&[&[1], &[1]]), vec![exp("2"), exp("2")], exp(q), order(&lambda)).unwrap()
}

fn c6_bounded_probe() -> Outcome {
    let prob = identity_stack(rat(5, 4), "4");
    let status = decide_J(&prob).unwrap().status;
    let start = Instant::now();
    let params: Vec<Rational> = [(1, 4), (1, 2), (1, 1), (2, 1), (4, 1)].iter().map(|&(a, b)| rat(a, b)).collect();
    let r = ratio_probe(ProbeTarget::J(&prob), Family::Dilation, &params, &ProbeOptions::default()).unwrap();
    let t = start.elapsed();
    let spread = r.max_over_min().unwrap_or(f64::INFINITY);
    outcome(
        status == Status::Bounded && spread <= 1.05 && r.rows.len() == 5 && within(t, 30.0),
        format!("verdict {status:?}, ratios {:?}, max/min {spread:.6}, {:.2} s", r.ratios(), t.as_secs_f64()),
    )
}

fn c7_unbounded_probe() -> Outcome {
    let prob = identity_stack(rat(3, 2), "2");
    let status = decide_J(&prob).unwrap().status;
    let start = Instant::now();
    let params: Vec<Rational> = (2..=8).map(|k| rat(1, 1 << k)).collect();
    let r = ratio_probe(ProbeTarget::J(&prob), Family::Logpower, &params, &ProbeOptions::default()).unwrap();
    let t = start.elapsed();
    let ratios = r.ratios();
    let growth = ratios.last().unwrap() / ratios[0];
    outcome(
        status == Status::Unbounded && ratios.len() == 7 && r.strictly_increasing() && growth >= 3.0 && within(t, 60.0),
        format!("verdict {status:?}, ratios {:?}, last/first {growth:.3}, {:.2} s", ratios.iter().map(|x| (x * 1e3).round() / 1e3).collect::<Vec<_>>(), t.as_secs_f64()),
    )
}

fn c8_minkowski() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let p = ExponentVector::new(vec![exp("3"), exp("2")]).unwrap();
    let (mut violations, mut mismatches) = (0, 0);
    for _ in 0..1000 {
        let groups = vec![rng.gen_range(1..=2usize), rng.gen_range(1..=2usize)];
        let axes: Vec<Axis> =
            (0..groups[0] + groups[1]).map(|_| Axis::new(rng.gen_range(2..=6), rng.gen_range(1..=4) as f64 * 0.5).unwrap()).collect();
        let f = GridFunction::from_fn(axes.clone(), |_| {
            if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() * 10f64.powi(rng.gen_range(-2..=2)) }
        })
        .unwrap();
        // group 1 axes come first and vary fastest
        let n1: usize = axes[..groups[0]].iter().map(|a| a.count).product();
        let n2: usize = axes[groups[0]..].iter().map(|a| a.count).product();
        let v1: f64 = axes[..groups[0]].iter().map(|a| a.step()).product();
        let v2: f64 = axes[groups[0]..].iter().map(|a| a.step()).product();
        let val = |i: usize, j: usize| f.values()[i + n1 * j];
        let rhs = (0..n2)
            .map(|j| ((0..n1).map(|i| val(i, j).powi(3) * v1).sum::<f64>()).powf(2.0 / 3.0) * v2)
            .sum::<f64>()
            .sqrt();
        let lhs = (0..n1)
            .map(|i| ((0..n2).map(|j| val(i, j).powi(2) * v2).sum::<f64>()).powf(1.5) * v1)
            .sum::<f64>()
            .cbrt();
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
        let c = minkowski_swap_check(&f, &groups, &p, 1).unwrap();
        if !c.holds || (c.lhs - lhs).abs() > 1e-12 * lhs || (c.rhs - rhs).abs() > 1e-12 * rhs {
            mismatches += 1;
        }
    }
    outcome(
        violations == 0 && mismatches == 0,
        format!("1000 functions, {violations} violations, {mismatches} disagreements with the direct sums"),
    )
}

fn c9_tail() -> Outcome {
    let radii: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
    let one = tail_scaling_check(&[1], &ExponentVector::new(vec![exp("2")]).unwrap(), &rat(1, 1), &radii).unwrap();
    let dev = one.iter().map(|r| (r.compensated - 2f64.sqrt()).abs()).fold(0.0, f64::max);
    let two = tail_scaling_check(&[1, 1], &ExponentVector::new(vec![exp("2"), exp("2")]).unwrap(), &rat(3, 2), &radii).unwrap();
    let c: Vec<f64> = two.iter().map(|r| r.compensated).collect();
    let spread = c.iter().cloned().fold(0.0, f64::max) / c.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        one.len() == 11 && dev < 1e-9 && two.len() == 11 && spread <= 2.0,
        format!("one group: max |c − √2| = {dev:.2e}; two groups (α = 3/2): max/min = {spread:.9}"),
    )
}

fn c10_reproducible() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_rieszmix");
    let dir = tempfile::tempdir().unwrap();
    let problems = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems");
    let mut compared = 0;
    let mut bad = Vec::new();
    let runs = [
        ("decide", "bilinear_m1.toml"),
        ("decide", "rank_deficient_j.toml"),
        ("decide", "t_m2_n2.toml"),
        ("probe", "riesz_line.toml"),
        ("probe", "bounded_j_dilation.toml"),
        ("probe", "t_m2_n2.toml"),
    ];
    for (sub, file) in runs {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let out = dir.path().join(format!("{sub}-{file}-{i}.json"));
                let status = Command::new(bin)
                    .args([sub, "--problem"])
                    .arg(problems.join(file))
                    .arg("--out")
                    .arg(&out)
                    .args(["--seed", "17"])
                    .status()
                    .unwrap();
                assert!(matches!(status.code(), Some(0 | 10 | 20)), "{sub} {file}: {status}");
                std::fs::read(out).unwrap()
            })
            .collect();
        compared += 1;
        if outs[0] != outs[1] || outs[0].is_empty() {
            bad.push(format!("{sub} {file}"));
        }
    }
    outcome(bad.is_empty(), format!("{compared} report pairs via the binary, {} differ{}", bad.len(), first(&bad)))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("bilinear grid oracle", c1_m1_grid),
        ("Riesz collapse oracle", c2_riesz_collapse),
        ("n=1 consistency", c3_n1_consistency),
        ("exact matrix lemmas", c4_matrix_lemmas),
        ("translation limit", c5_translation),
        ("bounded dilation probe", c6_bounded_probe),
        ("unbounded log-power probe", c7_unbounded_probe),
        ("Minkowski swap", c8_minkowski),
        ("tail scaling", c9_tail),
        ("reproducible reports", c10_reproducible),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += !o.pass as usize;
        println!("[{}] {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
