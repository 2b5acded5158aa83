//! Seeded property suites for the lemmas the decision procedures rest on.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exponents::{Exponent, ExponentVector, Rational};
use crate::numeric::{minkowski_swap_check, tail_scaling_check, translation_limit_probe, Axis, GridFunction};
use crate::ratlinalg::{corner_rank_equiv_check, random, schur_identity_details, BlockMatrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult { name: name.into(), cases: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Random invertible kind-`T` matrix whose last diagonal block is made
/// rank-deficient about half the time.
pub fn random_t_matrix<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> BlockMatrix {
    let size = (m + 1) * n;
    loop {
        let mut a = random::matrix(rng, size, size, 0.2);
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(0..n);
            let low = random::matrix(rng, n, r, 0.0).checked_mul(&random::matrix(rng, r, n, 0.0));
            let low = low.unwrap_or_else(|_| RatMatrix::zeros(n, n));
            for i in 0..n {
                for j in 0..n {
                    let v = if r == 0 { Rational::zero() } else { low.at(i, j).clone() };
                    a.set(m * n + i, m * n + j, v);
                }
            }
        }
        if a.is_invertible() {
            return BlockMatrix::t(m, n, a).expect("square of the right size");
        }
    }
}

/// Block-inverse identity on random invertible matrices up to 6×6.
pub fn block_inverse_suite(seed: u64, count: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 1);
    let mut out = SuiteResult::new("block-inverse");
    for _ in 0..count {
        let size = rng.gen_range(2..=6);
        let n1 = rng.gen_range(1..size);
        let a = random::invertible(&mut rng, size, 0.25);
        let res = schur_identity_details(&a, n1, size - n1);
        out.record(matches!(&res, Ok(c) if c.holds()), || format!("n1={n1}, n2={}: {res:?}\n{a}", size - n1));
    }
    out
}

/// Corner-rank equivalence on random invertible kind-`T` matrices, `m, n ≤ 3`.
pub fn corner_rank_suite(seed: u64, count: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 2);
    let mut out = SuiteResult::new("corner-rank");
    for _ in 0..count {
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a = random_t_matrix(&mut rng, m, n);
        let res = corner_rank_equiv_check(&a);
        out.record(matches!(res, Ok(true)), || format!("m={m}, n={n}: {res:?}\n{}", a.base()));
    }
    out
}

const EXPONENT_GRID: [&str; 9] = ["1", "6/5", "4/3", "3/2", "2", "3", "4", "6", "inf"];

fn random_exponent<R: Rng + ?Sized>(rng: &mut R) -> Exponent {
    EXPONENT_GRID.choose(rng).expect("nonempty").parse().expect("valid exponent")
}

/// Random box indicator on a grid of whole cells, with groups of one or two axes.
fn random_box<R: Rng + ?Sized>(rng: &mut R) -> (GridFunction, Vec<usize>) {
    let groups: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=2)).collect();
    let dims: usize = groups.iter().sum();
    let axes: Vec<Axis> = (0..dims).map(|_| Axis::new(rng.gen_range(2..=6) * 2, 2.0).expect("valid")).collect();
    let bounds: Vec<(usize, usize)> = axes
        .iter()
        .map(|a| {
            let lo = rng.gen_range(0..a.count);
            (lo, rng.gen_range(lo + 1..=a.count))
        })
        .collect();
    let mut values = Vec::new();
    let total: usize = axes.iter().map(|a| a.count).product();
    for flat in 0..total {
        let mut r = flat;
        let mut inside = true;
        for (a, (lo, hi)) in axes.iter().zip(&bounds) {
            let i = r % a.count;
            r /= a.count;
            inside &= i >= *lo && i < *hi;
        }
        values.push(inside as u8 as f64);
    }
    (GridFunction::new(axes, values).expect("valid grid"), groups)
}

/// Disjoint translates along group `k` scale the mixed norm by exactly `2^{1/p_k}`.
pub fn translation_suite(seed: u64, count: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 3);
    let mut out = SuiteResult::new("translation-limit");
    for _ in 0..count {
        let (f, groups) = random_box(&mut rng);
        let p = ExponentVector::new((0..groups.len()).map(|_| random_exponent(&mut rng)).collect()).expect("nonempty");
        let k = rng.gen_range(1..=groups.len());
        let axis: usize = groups[..k - 1].iter().sum();
        let ax = f.axes()[axis];
        let beyond = 2.0 * ax.half_width + ax.step() * rng.gen_range(0..4) as f64;
        let expect = 2f64.powf(p.get(k).reciprocal_f64());
        let res = translation_limit_probe(&f, &groups, &p, k, &[beyond]);
        out.record(matches!(&res, Ok(v) if (v[0].1 - expect).abs() < 1e-12), || {
            format!("groups {groups:?}, p {p:?}, k={k}: {res:?} vs {expect}")
        });
    }
    out
}

/// Swapping adjacent groups with `p_i ≥ p_{i+1}` never increases the norm.
pub fn minkowski_suite(seed: u64, count: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 4);
    let mut out = SuiteResult::new("minkowski-swap");
    for _ in 0..count {
        let groups: Vec<usize> = (0..rng.gen_range(2..=3)).map(|_| rng.gen_range(1..=2)).collect();
        let dims: usize = groups.iter().sum();
        let axes: Vec<Axis> = (0..dims).map(|_| Axis::new(rng.gen_range(2..=5), 1.0).expect("valid")).collect();
        let sparse = rng.gen_bool(0.3);
        let f = GridFunction::from_fn(axes, |_| {
            if sparse && rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen::<f64>() * 10f64.powi(rng.gen_range(-3..=3))
            }
        })
        .expect("valid grid");
        let i = rng.gen_range(1..groups.len());
        let mut ps: Vec<Exponent> = (0..groups.len()).map(|_| random_exponent(&mut rng)).collect();
        if ps[i - 1] < ps[i] {
            ps.swap(i - 1, i);
        }
        let p = ExponentVector::new(ps).expect("nonempty");
        let res = minkowski_swap_check(&f, &groups, &p, i);
        out.record(matches!(&res, Ok(c) if c.holds), || format!("groups {groups:?}, p {p:?}, i={i}: {res:?}"));
    }
    out
}

/// Truncated-power norms scale like `R^{Σ n_i/p_i − α}`.
pub fn tail_suite(seed: u64) -> SuiteResult {
    let mut rng = rng_for(seed, 5);
    let mut out = SuiteResult::new("tail-scaling");
    let radii: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
    let one = tail_scaling_check(&[1], &ExponentVector::new(vec![Exponent::int(2)]).expect("nonempty"), &Rational::from_integer(1.into()), &radii);
    out.record(
        matches!(&one, Ok(rows) if rows.iter().all(|r| (r.compensated - 2f64.sqrt()).abs() < 1e-9)),
        || format!("one group: {one:?}"),
    );
    for _ in 0..4 {
        let dims: Vec<usize> = (0..2).map(|_| rng.gen_range(1..=2)).collect();
        let p = ExponentVector::new((0..2).map(|_| random_exponent(&mut rng)).collect()).expect("nonempty");
        let critical: f64 = dims.iter().zip(p.iter()).map(|(&n, pi)| n as f64 * pi.reciprocal_f64()).sum();
        let alpha = Rational::new(num_bigint::BigInt::from(((critical + 0.5) * 4.0).ceil() as i64), 4.into());
        let rows = tail_scaling_check(&dims, &p, &alpha, &[1.0, 8.0, 64.0]);
        let ok = matches!(&rows, Ok(r) if {
            let c: Vec<f64> = r.iter().map(|x| x.compensated).collect();
            let hi = c.iter().cloned().fold(0.0, f64::max);
            let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
            lo > 0.0 && hi / lo <= 2.0
        });
        out.record(ok, || format!("dims {dims:?}, p {p:?}, α {alpha}: {rows:?}"));
    }
    out
}

/// All suites at their default sizes.
pub fn run(seed: u64) -> SelftestReport {
    SelftestReport {
        seed,
        suites: vec![
            block_inverse_suite(seed, 200),
            corner_rank_suite(seed, 200),
            translation_suite(seed, 200),
            minkowski_suite(seed, 200),
            tail_suite(seed),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_seed_passes() {
        let r = run(0);
        for s in &r.suites {
            assert!(s.passed(), "{s:?}");
        }
    }

    #[test]
    fn corner_generator_hits_both_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut full = [0, 0];
        for _ in 0..60 {
            let a = random_t_matrix(&mut rng, 2, 2);
            let r = crate::ratlinalg::rank(&a.block(3, 3));
            full[(r == 2) as usize] += 1;
        }
        assert!(full[0] > 0 && full[1] > 0, "{full:?}");
    }
}
