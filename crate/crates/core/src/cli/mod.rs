//! Command layer behind the `rieszmix` binary. Every command is a pure
//! function of the problem file bytes, the flags and the seed; the binary
//! only does file I/O and maps results to exit codes.
//!
//! Exit codes: 0 bounded, 10 unbounded, 20 outside the scope of the
//! characterization, 2 input error, 3 internal computation error,
//! 1 self-test failure.

pub mod format;

use serde::Serialize;

use crate::decide::{decide_J, decide_T, decide_riesz_classic, Status, Verdict};
use crate::error::{Error, Result};
use crate::exponents::{parse_rational, Rational};
use crate::numeric::probe::{ratio_probe, Family, ProbeOptions, ProbeReport, ProbeTarget};
use crate::numeric::QuadratureSettings;
use crate::profile::{pivot_index_set, rank_profile_J, rank_profile_T, reduce_kernel, Certificate, PivotIndexSet, RankProfile};
use crate::ratlinalg::{BlockMatrix, RatMatrix};
use crate::selftest::{self, SelftestReport};

pub use format::{load_problem, LoadedProblem, Problem, ProblemEcho, ProblemFile};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const EXIT_BOUNDED: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_UNBOUNDED: i32 = 10;
pub const EXIT_OUTSIDE_SCOPE: i32 = 20;

/// Flag overrides shared by all report commands. Unset fields fall back to
/// the problem file, then to built-in defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub grid_n: Option<usize>,
    pub grid_l: Option<Rational>,
    pub seed: Option<u64>,
    pub family: Option<String>,
    pub params: Option<Vec<Rational>>,
}

/// Parses a `--params` list: comma or whitespace separated rationals.
pub fn parse_params(s: &str) -> Result<Vec<Rational>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_rational(t).map_err(|e| Error::Input(format!("--params: {e}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CanonicalSummary {
    /// Kernel matrix the form was computed for (`J`: the `D` stack; `T`: the
    /// last block column below the first block).
    pub source: &'static str,
    pub selected_rows: Vec<Vec<usize>>,
    pub g: RatMatrix,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Analysis {
    pub profile: RankProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pivots: Option<PivotIndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportFile {
    pub tool_version: &'static str,
    pub command: &'static str,
    pub input_hash: String,
    pub seed: u64,
    pub problem: ProblemEcho,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<Analysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeReport>,
}

impl ReportFile {
    pub fn exit_code(&self) -> i32 {
        status_exit_code(self.verdict.status)
    }
}

pub fn status_exit_code(s: Status) -> i32 {
    match s {
        Status::Bounded => EXIT_BOUNDED,
        Status::Unbounded => EXIT_UNBOUNDED,
        Status::OutsideTheoremScope => EXIT_OUTSIDE_SCOPE,
    }
}

/// Exit code for a failed command.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_)
        | Error::InvalidExponent(_)
        | Error::InvalidRational(_)
        | Error::ShapeMismatch(_)
        | Error::DomainError(_)
        | Error::IncompatibleGrid(_)
        | Error::PreconditionViolated(_)
        | Error::NotFullRank { .. }
        | Error::SingularMatrix => EXIT_INPUT,
        _ => EXIT_COMPUTATION,
    }
}

/// Pretty JSON with struct field order, newline terminated.
pub fn render<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn verdict_of(problem: &Problem) -> Result<Verdict> {
    match problem {
        Problem::T(t) => decide_T(t),
        Problem::J(j) => decide_J(j),
        Problem::Riesz { n, p, q, lambda } => decide_riesz_classic(p, q, lambda, *n),
    }
}

fn seed_of(lp: &LoadedProblem, opts: &RunOptions) -> u64 {
    opts.seed.or_else(|| lp.file.probe.as_ref().and_then(|p| p.seed)).unwrap_or(0)
}

fn base_report(lp: &LoadedProblem, opts: &RunOptions, command: &'static str) -> Result<ReportFile> {
    Ok(ReportFile {
        tool_version: TOOL_VERSION,
        command,
        input_hash: lp.input_hash.clone(),
        seed: seed_of(lp, opts),
        problem: ProblemEcho::of(lp),
        verdict: verdict_of(&lp.problem)?,
        analysis: None,
        probe: None,
    })
}

pub fn decide_report(text: &str, opts: &RunOptions) -> Result<ReportFile> {
    let lp = load_problem(text)?;
    base_report(&lp, opts, "decide")
}

pub fn analysis_of(problem: &Problem) -> Result<Analysis> {
    let mut notes = Vec::new();
    let (profile, kernel, source) = match problem {
        Problem::T(t) => {
            let a = &t.a;
            let tail = BlockMatrix::j(a.m(), a.n(), a.tail_stack(2))?;
            (rank_profile_T(a), tail, "T-tail")
        }
        _ => {
            let j = problem.as_j().ok_or_else(|| Error::Input("riesz problem has no kernel matrix".into()))?;
            (rank_profile_J(&j.d), j.d.clone(), "J")
        }
    };
    let pivots = match pivot_index_set(&profile) {
        Ok(p) => Some(p),
        Err(e) => {
            notes.push(format!("no pivot set: {e}"));
            None
        }
    };
    let canonical = match reduce_kernel(&kernel) {
        Ok(cf) => Some(CanonicalSummary { source, selected_rows: cf.selected_rows, g: cf.g, certificate: cf.certificate }),
        Err(e) => {
            notes.push(format!("no canonical form: {e}"));
            None
        }
    };
    Ok(Analysis { profile, pivots, canonical, notes })
}

pub fn analyze_report(text: &str, opts: &RunOptions) -> Result<ReportFile> {
    let lp = load_problem(text)?;
    let mut r = base_report(&lp, opts, "analyze")?;
    r.analysis = Some(analysis_of(&lp.problem)?);
    Ok(r)
}

pub fn probe_report(text: &str, opts: &RunOptions) -> Result<ReportFile> {
    let lp = load_problem(text)?;
    let mut r = base_report(&lp, opts, "probe")?;
    let section = lp.file.probe.clone();
    let family_name = opts
        .family
        .clone()
        .or_else(|| section.as_ref().map(|s| s.family.clone()))
        .ok_or_else(|| Error::Input("probe: no [probe] section and no --family flag".into()))?;
    let family: Family = family_name.parse()?;
    let params = match (&opts.params, section.as_ref().and_then(|s| s.params.as_ref())) {
        (Some(p), _) => p.clone(),
        (None, Some(raw)) => raw
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                format::Scalar::Int(k) => Ok(Rational::from_integer((*k).into())),
                format::Scalar::Text(t) => {
                    parse_rational(t).map_err(|e| Error::Input(format!("field `probe.params[{i}]`: {e}")))
                }
                format::Scalar::Float(x) => {
                    Err(Error::Input(format!("field `probe.params[{i}]`: decimal {x} is not allowed")))
                }
            })
            .collect::<Result<_>>()?,
        (None, None) => Vec::new(),
    };
    let rat_field = |s: &Option<format::Scalar>, field: &str| -> Result<Option<Rational>> {
        match s {
            None => Ok(None),
            Some(format::Scalar::Int(k)) => Ok(Some(Rational::from_integer((*k).into()))),
            Some(format::Scalar::Text(t)) => {
                parse_rational(t).map(Some).map_err(|e| Error::Input(format!("field `{field}`: {e}")))
            }
            Some(format::Scalar::Float(x)) => Err(Error::Input(format!("field `{field}`: decimal {x} is not allowed"))),
        }
    };
    let half = match &opts.grid_l {
        Some(l) => Some(l.clone()),
        None => rat_field(&section.as_ref().and_then(|s| s.half_width.clone()), "probe.half_width")?,
    };
    let mut popts = ProbeOptions {
        cells: opts.grid_n.or_else(|| section.as_ref().and_then(|s| s.cells)),
        half_width: half.as_ref().map(rat_to_f64),
        ..ProbeOptions::default()
    };
    if let Some(eps) = rat_field(&section.as_ref().and_then(|s| s.epsilon.clone()), "probe.epsilon")? {
        popts.epsilon = eps;
    }
    let mut quad = QuadratureSettings { seed: r.seed, ..QuadratureSettings::default() };
    if let Some(s) = &section {
        if let Some(h) = s.halton_samples {
            quad.halton_samples = h;
        }
        quad.integration_cells = s.integration_cells;
    }
    popts.quadrature = quad;

    let report = match &lp.problem {
        Problem::T(t) => ratio_probe(ProbeTarget::T(t), family, &params, &popts)?,
        other => {
            let j = other.as_j().expect("J or riesz");
            ratio_probe(ProbeTarget::J(&j), family, &params, &popts)?
        }
    };
    r.probe = Some(report);
    Ok(r)
}

fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn selftest_report(seed: u64) -> SelftestReport {
    selftest::run(seed)
}

/// Human-readable summary printed by `selftest`.
pub fn selftest_summary(r: &SelftestReport) -> String {
    let mut out = format!("selftest seed={}\n", r.seed);
    for s in &r.suites {
        out.push_str(&format!(
            "{:<18} {:>5} cases  {:>3} failures  {}\n",
            s.name,
            s.cases,
            s.failures,
            if s.passed() { "ok" } else { "FAIL" }
        ));
        if let Some(f) = &s.first_failure {
            out.push_str(&format!("  first failure: {f}\n"));
        }
    }
    out.push_str(if r.passed() { "all suites passed\n" } else { "selftest FAILED\n" });
    out
}
