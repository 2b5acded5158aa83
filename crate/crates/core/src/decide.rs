//! Boundedness decision procedures.
//!
//! Every procedure returns a [`Verdict`] whose trace lists each checked
//! condition with a stable identifier, the characterization item it comes
//! from, whether it passed, and the witnesses used (ranks, drop positions,
//! `k_0`/`i_0`, …). The reason of a negative verdict is the first failing
//! condition in the order the characterization lists them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{
    check_homogeneity, conjugate, reciprocal_sum, Exponent, ExponentVector, Kind, Order, Rational,
};
use crate::profile::{rank_profile_J, rank_profile_T, RankProfile};
use crate::ratlinalg::{rank, submatrix, BlockMatrix, RatMatrix};

/// Stable condition identifiers used in traces and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    #[serde(rename = "HOMOG")]
    Homog,
    #[serde(rename = "A-INV")]
    AInv,
    #[serde(rename = "MINOR")]
    Minor,
    #[serde(rename = "TAILRANK")]
    TailRank,
    #[serde(rename = "EXIST-PK")]
    ExistPk,
    #[serde(rename = "MIN-DROP")]
    MinDrop,
    #[serde(rename = "MAX-DROP")]
    MaxDrop,
    #[serde(rename = "Q-LT-P1")]
    QLtP1,
    #[serde(rename = "M0-SEARCH")]
    M0Search,
    #[serde(rename = "LAMBDA-WINDOW")]
    LambdaWindow,
    #[serde(rename = "N1-INEQ")]
    N1Ineq,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::Homog => "HOMOG",
            Condition::AInv => "A-INV",
            Condition::Minor => "MINOR",
            Condition::TailRank => "TAILRANK",
            Condition::ExistPk => "EXIST-PK",
            Condition::MinDrop => "MIN-DROP",
            Condition::MaxDrop => "MAX-DROP",
            Condition::QLtP1 => "Q-LT-P1",
            Condition::M0Search => "M0-SEARCH",
            Condition::LambdaWindow => "LAMBDA-WINDOW",
            Condition::N1Ineq => "N1-INEQ",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Bounded,
    Unbounded,
    OutsideTheoremScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub id: Condition,
    /// Characterization item the condition comes from, e.g. `T-general/rank`.
    pub cites: String,
    pub passed: bool,
    pub detail: String,
    pub witnesses: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reason {
    /// Failing condition, or `None` for a bounded verdict.
    pub id: Option<Condition>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub reason: Reason,
    pub trace: Vec<TraceEntry>,
}

impl Verdict {
    pub fn is_bounded(&self) -> bool {
        self.status == Status::Bounded
    }

    pub fn entry(&self, id: Condition) -> Option<&TraceEntry> {
        self.trace.iter().find(|e| e.id == id)
    }
}

#[derive(Default)]
struct Trace {
    entries: Vec<TraceEntry>,
}

impl Trace {
    fn check(&mut self, id: Condition, cites: &str, passed: bool, detail: impl Into<String>) -> &mut TraceEntry {
        self.entries.push(TraceEntry {
            id,
            cites: cites.to_string(),
            passed,
            detail: detail.into(),
            witnesses: BTreeMap::new(),
        });
        self.entries.last_mut().expect("just pushed")
    }

    fn first_failure(&self) -> Option<&TraceEntry> {
        self.entries.iter().find(|e| !e.passed)
    }

    fn finish(self, scope_failure: Option<String>) -> Verdict {
        let (status, reason) = if let Some(text) = scope_failure {
            (Status::OutsideTheoremScope, Reason { id: Some(Condition::Minor), text })
        } else if let Some(f) = self.first_failure() {
            let text = if f.id == Condition::Homog {
                format!("scaling: {}", f.detail)
            } else {
                f.detail.clone()
            };
            (Status::Unbounded, Reason { id: Some(f.id), text })
        } else {
            (Status::Bounded, Reason { id: None, text: "all conditions hold".into() })
        };
        Verdict { status, reason, trace: self.entries }
    }
}

trait Witness {
    fn with(&mut self, key: &str, value: impl ToString) -> &mut Self;
}

impl Witness for TraceEntry {
    fn with(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.witnesses.insert(key.to_string(), value.to_string());
        self
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn check_lambda(lambda: &Order, bound: usize, what: &str) -> Result<()> {
    if *lambda.value() >= Rational::from_integer(BigInt::from(bound)) {
        return Err(Error::DomainError(format!("λ = {lambda} must lie in (0, {what} = {bound})")));
    }
    Ok(())
}

/// Problem for `T_λ` with block matrix `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemT {
    pub a: BlockMatrix,
    pub p: ExponentVector,
    pub q: Exponent,
    pub lambda: Order,
}

impl ProblemT {
    pub fn new(a: BlockMatrix, p: ExponentVector, q: Exponent, lambda: Order) -> Result<Self> {
        if a.kind() != Kind::T {
            return Err(Error::ShapeMismatch("ProblemT needs a kind-T matrix".into()));
        }
        if p.len() != a.m() + 1 {
            return Err(Error::ShapeMismatch(format!(
                "T problem with m={} needs {} exponents, got {}",
                a.m(),
                a.m() + 1,
                p.len()
            )));
        }
        Ok(ProblemT { a, p, q, lambda })
    }

    pub fn m(&self) -> usize {
        self.a.m()
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    fn homogeneous(&self) -> bool {
        check_homogeneity(&self.p, &self.q, &self.lambda, self.m(), self.n(), Kind::T)
    }
}

/// Problem for `J_{λ,D}` with stacked matrix `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemJ {
    pub d: BlockMatrix,
    pub p: ExponentVector,
    pub q: Exponent,
    pub lambda: Order,
}

impl ProblemJ {
    pub fn new(d: BlockMatrix, p: ExponentVector, q: Exponent, lambda: Order) -> Result<Self> {
        if d.kind() != Kind::J {
            return Err(Error::ShapeMismatch("ProblemJ needs a kind-J matrix".into()));
        }
        if p.len() != d.m() {
            return Err(Error::ShapeMismatch(format!(
                "J problem with m={} needs {} exponents, got {}",
                d.m(),
                d.m(),
                p.len()
            )));
        }
        Ok(ProblemJ { d, p, q, lambda })
    }

    pub fn m(&self) -> usize {
        self.d.m()
    }

    pub fn n(&self) -> usize {
        self.d.n()
    }
}

fn homog_entry(trace: &mut Trace, cites: &str, ok: bool, p: &ExponentVector, q: &Exponent, lambda: &Order) {
    trace
        .check(Condition::Homog, cites, ok, if ok {
            "Σ1/p_i = 1/q + (mn−λ)/n holds".to_string()
        } else {
            "Σ1/p_i ≠ 1/q + (mn−λ)/n; dilation breaks any bound".to_string()
        })
        .with("sum_recip_p", reciprocal_sum(p))
        .with("recip_q", q.reciprocal())
        .with("lambda", lambda);
}

/// Classical Riesz potential on `L^p(R^n) → L^q(R^n)`.
pub fn decide_riesz_classic(p: &Exponent, q: &Exponent, lambda: &Order, n: usize) -> Result<Verdict> {
    check_lambda(lambda, n, "n")?;
    let mut t = Trace::default();
    let ps = ExponentVector::new(vec![p.clone()])?;
    let ok = check_homogeneity(&ps, q, lambda, 1, n, Kind::J);
    homog_entry(&mut t, "riesz-classic/homogeneity", ok, &ps, q, lambda);
    t.check(Condition::ExistPk, "riesz-classic/range", p.is_interior(), format!("1 < p = {p} < ∞"))
        .with("p", p);
    t.check(Condition::MinDrop, "riesz-classic/range", p < q, format!("p = {p} < q = {q}"));
    t.check(Condition::MaxDrop, "riesz-classic/range", !q.is_infinite(), format!("q = {q} < ∞"));
    Ok(t.finish(None))
}

#[allow(non_snake_case)]
pub fn decide_J(prob: &ProblemJ) -> Result<Verdict> {
    let (m, n) = (prob.m(), prob.n());
    check_lambda(&prob.lambda, m * n, "mn")?;
    let mut t = Trace::default();
    let profile = rank_profile_J(&prob.d);
    j_conditions(&mut t, &profile, &prob.p, &prob.q, &prob.lambda, m, n);
    Ok(t.finish(None))
}

/// The four items of the `J_{λ,D}` characterization, appended to `t`.
fn j_conditions(
    t: &mut Trace,
    profile: &RankProfile,
    p: &ExponentVector,
    q: &Exponent,
    lambda: &Order,
    m: usize,
    n: usize,
) {
    let full = profile.is_full_rank();
    t.check(Condition::TailRank, "J/rank", full, format!("rank D = {} (need n = {n})", profile.first_rank()))
        .with("gamma", join(&profile.ranks))
        .with("drops", join(&profile.drops))
        .with("nu", profile.nu);

    let ok = check_homogeneity(p, q, lambda, m, n, Kind::J);
    homog_entry(t, "J/homogeneity", ok, p, q, lambda);

    let exists = p.iter().any(Exponent::is_interior);
    let i0 = (1..=m).rev().find(|&i| p.get(i).exceeds_one());
    let e = t.check(Condition::ExistPk, "J/exist-p", exists, "some 1 < p_i < ∞");
    if let Some(i0) = i0 {
        e.with("i0", i0);
    }

    drop_conditions(t, "J/drops", profile, p, q, i0, Some(&Exponent::infinity()));
}

/// `min{p_{k_l} : l ≥ 1} < q` and `max{p_{k_0}, p_{k_l}} ≤ q`, plus `q < upper` when given.
fn drop_conditions(
    t: &mut Trace,
    cites: &str,
    profile: &RankProfile,
    p: &ExponentVector,
    q: &Exponent,
    k0: Option<usize>,
    upper: Option<&Exponent>,
) {
    let drop_ps: Vec<&Exponent> = profile.drops.iter().map(|&k| p.get(k)).collect();
    let min = drop_ps.iter().min().copied();
    let min_ok = min.is_some_and(|x| x < q);
    t.check(
        Condition::MinDrop,
        cites,
        min_ok,
        match min {
            Some(x) => format!("min over drops p = {x} {} q = {q}", if min_ok { "<" } else { "≥" }),
            None => "no rank drops".to_string(),
        },
    )
    .with("drops", join(&profile.drops))
    .with("drop_exponents", join(&drop_ps));

    let mut maxset = drop_ps.clone();
    if let Some(k0) = k0 {
        maxset.push(p.get(k0));
    }
    let max = maxset.iter().max().copied();
    let upper_ok = upper.is_none_or(|u| q < u);
    let max_ok = max.is_none_or(|x| x <= q) && upper_ok;
    let bound = upper.map(|u| format!(" < {u}")).unwrap_or_default();
    let e = t.check(
        Condition::MaxDrop,
        cites,
        max_ok,
        match max {
            Some(x) => format!("max(p_k0, drop p) = {x} {} q = {q}{bound}", if x <= q { "≤" } else { ">" }),
            None => format!("q = {q}{bound}"),
        },
    );
    e.with("q", q);
    if let Some(k0) = k0 {
        e.with("k0", k0);
    }
}

/// Identity stack `D_1 = … = D_m = I`.
#[allow(non_snake_case)]
pub fn decide_J_identity(
    m: usize,
    n: usize,
    p: &ExponentVector,
    q: &Exponent,
    lambda: &Order,
) -> Result<Verdict> {
    if p.len() != m {
        return Err(Error::ShapeMismatch(format!("expected {m} exponents, got {}", p.len())));
    }
    check_lambda(lambda, m * n, "mn")?;
    let mut t = Trace::default();
    let ok = check_homogeneity(p, q, lambda, m, n, Kind::J);
    homog_entry(&mut t, "J-identity/homogeneity", ok, p, q, lambda);
    let exists = p.iter().any(Exponent::is_interior);
    let i0 = (1..=m).rev().find(|&i| p.get(i).exceeds_one());
    let e = t.check(Condition::ExistPk, "J-identity/exist-p", exists, "some 1 < p_i < ∞");
    if let Some(i0) = i0 {
        e.with("i0", i0);
    }
    match i0 {
        Some(i0) if i0 < m => {
            let pi0 = p.get(i0);
            let ok = pi0 <= q && !q.is_infinite();
            t.check(Condition::MaxDrop, "J-identity/case-i0<m", ok, format!("p_i0 = {pi0} ≤ q = {q} < ∞"))
                .with("i0", i0)
                .with("case", "i0<m");
        }
        Some(i0) => {
            let pm = p.get(m);
            let ok = pm < q && !q.is_infinite();
            t.check(Condition::MinDrop, "J-identity/case-i0=m", ok, format!("p_m = {pm} < q = {q} < ∞"))
                .with("i0", i0)
                .with("case", "i0=m");
        }
        None => {
            t.check(Condition::MaxDrop, "J-identity/exist-p", false, "no exponent exceeds 1");
        }
    }
    Ok(t.finish(None))
}

#[allow(non_snake_case)]
pub fn decide_T(prob: &ProblemT) -> Result<Verdict> {
    let (m, n) = (prob.m(), prob.n());
    check_lambda(&prob.lambda, m * n, "mn")?;
    if m == 1 {
        return decide_T_m1(prob);
    }
    if n == 1 {
        return decide_T_n1(prob);
    }
    let mut t = Trace::default();
    let homog = prob.homogeneous();
    homog_entry(&mut t, "T/homogeneity (dilation, extended to T)", homog, &prob.p, &prob.q, &prob.lambda);
    let a_inv = prob.a.base().is_invertible();
    t.check(Condition::AInv, "T-necessary/A-invertible", a_inv, "A is invertible");
    if !homog || !a_inv {
        return Ok(t.finish(None));
    }

    let minor_inv = prob.a.minor_1_last().is_invertible();
    t.check(Condition::Minor, "T/standing-hypothesis", minor_inv, "(1,m+1)-minor is invertible");
    if !minor_inv {
        return Ok(t.finish(Some(
            "(1,m+1)-minor is singular with m ≥ 2 and n ≥ 2; no characterization applies".into(),
        )));
    }

    let profile = rank_profile_T(&prob.a);
    let full = profile.is_full_rank();
    t.check(Condition::TailRank, "T/rank", full, format!("r_2 = {} (need n = {n})", profile.first_rank()))
        .with("ranks", join(&profile.ranks))
        .with("drops", join(&profile.drops))
        .with("nu", profile.nu);
    if full {
        assert!(profile.nu >= 1, "full tail rank forces at least one drop");
    }

    let p = &prob.p;
    let exists = (2..=m + 1).any(|k| p.get(k).is_interior());
    let k0 = (2..=m + 1).rev().find(|&k| p.get(k).exceeds_one());
    let e = t.check(Condition::ExistPk, "T/exist-p", exists, "some 2 ≤ k ≤ m+1 with 1 < p_k < ∞");
    if let Some(k0) = k0 {
        e.with("k0", k0);
    }
    let p1 = p.get(1);
    drop_conditions(&mut t, "T/drops", &profile, p, &prob.q, k0, None);
    let q_lt = &prob.q < p1;
    let e = t.check(Condition::QLtP1, "T/drops", q_lt, format!("q = {} < p_1 = {p1}", prob.q));
    if prob.q.is_infinite() {
        e.with("note", "q = ∞ cannot satisfy q < p_1 (interpretation)");
    }
    Ok(t.finish(None))
}

/// Complete characterization for `m = 1`: bounded iff `1 < p_2 < q < p_1 ≤ ∞`
/// and `A`, `A_21`, `A_22` are invertible.
#[allow(non_snake_case)]
pub fn decide_T_m1(prob: &ProblemT) -> Result<Verdict> {
    if prob.m() != 1 {
        return Err(Error::PreconditionViolated("decide_T_m1 needs m = 1".into()));
    }
    let n = prob.n();
    check_lambda(&prob.lambda, n, "n")?;
    let mut t = Trace::default();
    let homog = prob.homogeneous();
    homog_entry(&mut t, "T-m1/homogeneity", homog, &prob.p, &prob.q, &prob.lambda);
    let a = &prob.a;
    t.check(Condition::AInv, "T-m1/invertibility", a.base().is_invertible(), "A is invertible");
    t.check(Condition::Minor, "T-m1/invertibility", a.block(2, 1).is_invertible(), "A_21 is invertible");
    t.check(Condition::TailRank, "T-m1/invertibility", a.block(2, 2).is_invertible(), "A_22 is invertible")
        .with("rank_A22", rank(&a.block(2, 2)));
    let (p1, p2, q) = (prob.p.get(1), prob.p.get(2), &prob.q);
    t.check(Condition::ExistPk, "T-m1/order", p2.exceeds_one(), format!("1 < p_2 = {p2}"));
    t.check(Condition::MinDrop, "T-m1/order", p2 < q, format!("p_2 = {p2} < q = {q}"));
    let e = t.check(Condition::QLtP1, "T-m1/order", q < p1, format!("q = {q} < p_1 = {p1}"));
    if q.is_infinite() {
        e.with("note", "q = ∞ cannot satisfy q < p_1 (interpretation)");
    }
    Ok(t.finish(None))
}

/// Winner of the `m_0` subset search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct M0Result {
    pub m0: usize,
    pub subset: Vec<usize>,
    pub k1: usize,
}

/// Lexicographic `k`-subsets of `1..=m`.
fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=m {
            if m - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Largest `m̃ ≤ m` and subset `{j_1 < … < j_m̃}` making both
/// `A_{(m−m̃+2..m+1)}^{(j)}` and `A_{(m−m̃+1..m+1)}^{(j, m+1)}` invertible with
/// a nonzero last-column tail. Subsets are tried by decreasing size, then
/// lexicographically; the first hit wins.
pub fn search_m0(a: &BlockMatrix) -> Result<M0Result> {
    if a.kind() != Kind::T || a.n() != 1 {
        return Err(Error::PreconditionViolated("search_m0 needs a kind-T matrix with n = 1".into()));
    }
    let m = a.m();
    let base = a.base();
    let last = m + 1;
    for mt in (1..=m).rev() {
        let tail_rows: Vec<usize> = (m - mt + 2..=last).collect();
        if tail_rows.iter().all(|&i| base.at(i - 1, last - 1).is_zero()) {
            continue;
        }
        let big_rows: Vec<usize> = (m - mt + 1..=last).collect();
        for js in subsets(m, mt) {
            let small = submatrix(base, &tail_rows, &js)?;
            if !small.is_invertible() {
                continue;
            }
            let mut cols = js.clone();
            cols.push(last);
            if submatrix(base, &big_rows, &cols)?.is_invertible() {
                let k1 = tail_rows
                    .iter()
                    .rev()
                    .copied()
                    .find(|&i| !base.at(i - 1, last - 1).is_zero())
                    .expect("tail is nonzero");
                return Ok(M0Result { m0: mt, subset: js, k1 });
            }
        }
    }
    Err(Error::NotFound)
}

/// Complete characterization for `n = 1`.
#[allow(non_snake_case)]
pub fn decide_T_n1(prob: &ProblemT) -> Result<Verdict> {
    if prob.n() != 1 {
        return Err(Error::PreconditionViolated("decide_T_n1 needs n = 1".into()));
    }
    let m = prob.m();
    let mut t = Trace::default();
    let homog = prob.homogeneous();
    homog_entry(&mut t, "T-n1/homogeneity", homog, &prob.p, &prob.q, &prob.lambda);
    let a_inv = prob.a.base().is_invertible();
    t.check(Condition::AInv, "T-n1/A-invertible", a_inv, "A is invertible");

    let found = if a_inv { search_m0(&prob.a).ok() } else { None };
    let Some(found) = found else {
        t.check(Condition::M0Search, "T-n1/m0-subset", false, "no admissible (m̃, subset)");
        return Ok(t.finish(None));
    };
    let (m0, k1) = (found.m0, found.k1);
    t.check(Condition::M0Search, "T-n1/m0-subset", true, format!("m0 = {m0}, k1 = {k1}"))
        .with("m0", m0)
        .with("subset", join(&found.subset))
        .with("k1", k1);

    let p = &prob.p;
    let lo = m - m0 + 2;
    let k0 = (lo..=m + 1).rev().find(|&k| p.get(k).exceeds_one());
    let e = t.check(Condition::ExistPk, "T-n1/exist-p", k0.is_some(), format!("some k ≥ {lo} with p_k > 1"));
    if let Some(k0) = k0 {
        e.with("k0", k0);
    }

    let shift = (1..=m - m0).fold(Rational::zero(), |acc, i| acc + conjugate(p.get(i)).reciprocal());
    let eff = prob.lambda.value() - &shift;
    let window = eff > Rational::zero() && eff < Rational::from_integer(BigInt::from(m0));
    t.check(Condition::LambdaWindow, "T-n1/lambda-window", window, format!("0 < λ − Σ1/p'_i = {eff} < m0 = {m0}"))
        .with("lambda_eff", &eff);

    let q = &prob.q;
    let pk1 = p.get(k1);
    let pupper = p.get(m - m0 + 1);
    let ineq = match k0 {
        Some(k0) => pk1 < q && p.get(k0) <= q && q < pupper,
        None => false,
    };
    let e = t.check(
        Condition::N1Ineq,
        "T-n1/inequalities",
        ineq,
        format!("p_k1 = {pk1} < q = {q}, p_k0 ≤ q < p_(m−m0+1) = {pupper}"),
    );
    if q.is_infinite() {
        e.with("note", "q = ∞ cannot satisfy the strict upper bound (interpretation)");
    }
    Ok(t.finish(None))
}

/// Convenience: a `T` problem with `q` supplied, after checking `A` is square of the right size.
pub fn problem_t(m: usize, n: usize, a: RatMatrix, p: Vec<Exponent>, q: Exponent, lambda: Order) -> Result<ProblemT> {
    ProblemT::new(BlockMatrix::t(m, n, a)?, ExponentVector::with_arity(p, m + 1)?, q, lambda)
}

pub fn problem_j(m: usize, n: usize, d: RatMatrix, p: Vec<Exponent>, q: Exponent, lambda: Order) -> Result<ProblemJ> {
    ProblemJ::new(BlockMatrix::j(m, n, d)?, ExponentVector::with_arity(p, m)?, q, lambda)
}
