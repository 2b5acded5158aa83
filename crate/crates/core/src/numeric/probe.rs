//! Ratio probes: evaluate `‖op f‖_q / ‖f‖_{p⃗}` along a family of inputs.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::families::{dilation_family, logpower_counterexample, shift_cells};
use super::grid::{mixed_norm, Axis, GridFunction};
use super::quad::{eval_J, eval_T, Evaluation, Method, QuadratureSettings};
use super::{ser_sig12, ser_sig12_opt};
use crate::decide::{ProblemJ, ProblemT};
use crate::error::{Error, Result};
use crate::exponents::{format_rational, Exponent, ExponentVector, Kind, Order, Rational};
use crate::ratlinalg::BlockMatrix;

#[derive(Debug, Clone, Copy)]
pub enum ProbeTarget<'a> {
    T(&'a ProblemT),
    J(&'a ProblemJ),
}

impl ProbeTarget<'_> {
    fn matrix(&self) -> &BlockMatrix {
        match self {
            ProbeTarget::T(p) => &p.a,
            ProbeTarget::J(p) => &p.d,
        }
    }

    fn p(&self) -> &ExponentVector {
        match self {
            ProbeTarget::T(p) => &p.p,
            ProbeTarget::J(p) => &p.p,
        }
    }

    fn q(&self) -> &Exponent {
        match self {
            ProbeTarget::T(p) => &p.q,
            ProbeTarget::J(p) => &p.q,
        }
    }

    fn lambda(&self) -> &Order {
        match self {
            ProbeTarget::T(p) => &p.lambda,
            ProbeTarget::J(p) => &p.lambda,
        }
    }

    fn n(&self) -> usize {
        self.matrix().n()
    }

    fn input_dims(&self) -> usize {
        self.p().len() * self.n()
    }

    fn groups(&self) -> Vec<usize> {
        vec![self.n(); self.p().len()]
    }

    fn apply(&self, f: &GridFunction, out: &[Axis], settings: &QuadratureSettings) -> Result<Evaluation> {
        match self {
            ProbeTarget::T(p) => eval_T(&p.a, &p.lambda, f, out, settings),
            ProbeTarget::J(p) => eval_J(&p.d, &p.lambda, f, out, settings),
        }
    }

    /// Columns spanning the set where the kernel is singular, seen in input
    /// coordinates: `range D` for `J`, `A(0, …, 0, R^n)` for `T`.
    fn singular_columns(&self) -> Vec<Vec<f64>> {
        let b = self.matrix();
        let rows = b.base().rows();
        let cols = b.base().cols();
        let first = cols - b.n();
        let data = b.base().to_f64();
        (first..cols).map(|c| (0..rows).map(|r| data[r * cols + c]).collect()).collect()
    }

    /// SHA-256 over a canonical rendering of the problem.
    pub fn hash(&self) -> String {
        let b = self.matrix();
        let text = serde_json::to_string(&(
            match b.kind() {
                Kind::T => "T",
                Kind::J => "J",
            },
            b.m(),
            b.n(),
            b.base(),
            self.p(),
            self.q(),
            self.lambda(),
        ))
        .expect("problem serializes");
        hex(&Sha256::digest(text.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "dilation")]
    Dilation,
    #[serde(rename = "translation")]
    Translation,
    #[serde(rename = "logpower")]
    Logpower,
    #[serde(rename = "boxE")]
    BoxE,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Dilation => "dilation",
            Family::Translation => "translation",
            Family::Logpower => "logpower",
            Family::BoxE => "boxE",
        }
    }

    /// Dilation factors, shift lengths, support cut-offs δ, or grid sizes.
    pub fn default_params(self) -> Vec<Rational> {
        let r = |a: i64, b: i64| Rational::new(a.into(), b.into());
        match self {
            Family::Dilation => vec![r(1, 4), r(1, 2), r(1, 1), r(2, 1), r(4, 1)],
            Family::Translation => vec![r(0, 1), r(1, 1), r(2, 1), r(4, 1), r(8, 1)],
            Family::Logpower => (2..=8).map(|k| r(1, 1 << k)).collect(),
            Family::BoxE => vec![r(32, 1), r(64, 1), r(128, 1)],
        }
    }

    fn default_half_width(self) -> f64 {
        match self {
            Family::Dilation | Family::Translation => 4.0,
            Family::Logpower => 0.5,
            Family::BoxE => 1.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dilation" => Ok(Family::Dilation),
            "translation" => Ok(Family::Translation),
            "logpower" => Ok(Family::Logpower),
            "boxE" | "boxe" => Ok(Family::BoxE),
            _ => Err(Error::Input(format!("unknown probe family {s:?}"))),
        }
    }
}

/// Cells per axis used when none is given: 256 up to two input axes, 64 for
/// three, 16 beyond (where the operators switch to Halton sampling).
pub fn default_cells(dims: usize) -> usize {
    match dims {
        0..=2 => 256,
        3 => 64,
        _ => 16,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    pub cells: Option<usize>,
    pub half_width: Option<f64>,
    /// Log exponent slack for the log-power family.
    pub epsilon: Rational,
    pub quadrature: QuadratureSettings,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            cells: None,
            half_width: None,
            epsilon: Rational::new(1.into(), 10.into()),
            quadrature: QuadratureSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeRow {
    pub param: String,
    #[serde(serialize_with = "ser_sig12_opt")]
    pub output_norm: Option<f64>,
    #[serde(serialize_with = "ser_sig12_opt")]
    pub input_norm: Option<f64>,
    #[serde(serialize_with = "ser_sig12_opt")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub dropped_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GridSummary {
    pub cells: usize,
    #[serde(serialize_with = "ser_sig12")]
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeMeta {
    /// Grid of the first parameter's input, per axis.
    pub input_grid: Vec<GridSummary>,
    pub output_grid: Vec<GridSummary>,
    pub method: Option<Method>,
    pub seed: u64,
    pub problem_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeReport {
    pub family: Family,
    pub params: Vec<String>,
    pub rows: Vec<ProbeRow>,
    pub metadata: ProbeMeta,
}

impl ProbeReport {
    /// Ratios of the rows that were not skipped, in parameter order.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }

    pub fn max_over_min(&self) -> Option<f64> {
        let r = self.ratios();
        let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = r.iter().cloned().fold(0.0, f64::max);
        (!r.is_empty() && lo > 0.0).then(|| hi / lo)
    }

    pub fn strictly_increasing(&self) -> bool {
        self.ratios().windows(2).all(|w| w[1] > w[0])
    }
}

fn summary(axes: &[Axis]) -> Vec<GridSummary> {
    axes.iter().map(|a| GridSummary { cells: a.count, half_width: a.half_width }).collect()
}

fn indicator_cube(axes: Vec<Axis>, half: f64) -> Result<GridFunction> {
    GridFunction::from_fn(axes, |x| x.iter().all(|v| v.abs() < half) as u8 as f64)
}

/// Orthonormal basis (Gram-Schmidt) of the span of `cols`.
fn orthonormal(cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = c.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        if norm > 1e-10 * scale {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Euclidean distance from `y` to the span of the orthonormal `basis`.
fn distance_to_span(y: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut r: Vec<f64> = y.to_vec();
    for b in basis {
        let dot: f64 = y.iter().zip(b).map(|(x, v)| x * v).sum();
        for (x, v) in r.iter_mut().zip(b) {
            *x -= dot * v;
        }
    }
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs `family` over `params` and reports the observed ratios. The report is
/// evidence only; it never feeds back into a verdict.
pub fn ratio_probe(target: ProbeTarget<'_>, family: Family, params: &[Rational], opts: &ProbeOptions) -> Result<ProbeReport> {
    let d = target.input_dims();
    let n = target.n();
    let groups = target.groups();
    let p = target.p().clone();
    let q = ExponentVector::new(vec![target.q().clone()])?;
    let params: Vec<Rational> = if params.is_empty() { family.default_params() } else { params.to_vec() };
    let cells = opts.cells.unwrap_or_else(|| default_cells(d));
    let half = opts.half_width.unwrap_or_else(|| family.default_half_width());
    let base_axes = vec![Axis::new(cells, half)?; d];

    let mut note = String::new();
    let inputs: Vec<Option<GridFunction>> = match family {
        Family::Dilation => {
            note.push_str("input and output grids are rescaled with 1/a, so the discrete operator keeps the exact dilation symmetry");
            let base = indicator_cube(base_axes.clone(), 1.0)?;
            params.iter().map(|a| dilation_family(&base, &p, n, a).map(Some)).collect::<Result<_>>()?
        }
        Family::Translation => {
            note.push_str("f + f(· − a v) with v the image of e_1 under the last block column; shifts are whole cells");
            let dir: Vec<f64> = target.singular_columns()[0].clone();
            let base = indicator_cube(base_axes.clone(), 1.0)?;
            let shifts: Vec<Vec<isize>> = params
                .iter()
                .map(|a| {
                    let af = a.to_f64().unwrap_or(f64::NAN);
                    dir.iter().zip(&base_axes).map(|(v, ax)| shift_cells(af * v, ax.step())).collect()
                })
                .collect::<Result<_>>()?;
            let padded: Vec<Axis> = (0..d)
                .map(|k| base_axes[k].padded(shifts.iter().map(|s| s[k].unsigned_abs()).max().unwrap_or(0)))
                .collect();
            let still = base.embed(&padded, &vec![0; d])?;
            shifts
                .iter()
                .map(|s| Ok(Some(still.add(&base.embed(&padded, s)?)?)))
                .collect::<Result<_>>()?
        }
        Family::Logpower => {
            let basis = orthonormal(&target.singular_columns());
            let codim = d - basis.len();
            if codim == 0 {
                return Err(Error::DomainError("the singular set fills the input space; no transverse profile".into()));
            }
            let h = logpower_counterexample(codim, target.q(), &opts.epsilon)?;
            note.push_str(&format!(
                "f_δ(y) = h(w) χ(w ≥ δ) χ(|y|_∞ ≤ {half}), w = distance to the kernel's singular set, h = log-power profile in {codim} transverse dims"
            ));
            params
                .iter()
                .map(|delta| {
                    let df = delta.to_f64().unwrap_or(f64::NAN);
                    let f = GridFunction::from_fn(base_axes.clone(), |y| {
                        let w = distance_to_span(y, &basis);
                        if w >= df { h.eval(w) } else { 0.0 }
                    })?;
                    Ok(Some(f))
                })
                .collect::<Result<_>>()?
        }
        Family::BoxE => {
            let basis = orthonormal(&target.singular_columns());
            let delta = 1.0 / (n as f64 + 2.0);
            note.push_str(&format!(
                "indicator of {{w < {delta:.6}}} on the grid box, refined per parameter; reports growth, not divergence"
            ));
            params
                .iter()
                .map(|c| {
                    let cells = c.to_usize().filter(|&k| k >= 2 && Rational::from_integer(k.into()) == *c).ok_or_else(
                        || Error::Input(format!("boxE parameters are grid sizes ≥ 2, got {}", format_rational(c))),
                    )?;
                    let f = GridFunction::from_fn(vec![Axis::new(cells, half)?; d], |y| {
                        (distance_to_span(y, &basis) < delta) as u8 as f64
                    })?;
                    Ok(Some(f))
                })
                .collect::<Result<_>>()?
        }
    };

    let mut rows = Vec::with_capacity(params.len());
    let mut first_grid: Option<(Vec<Axis>, Vec<Axis>, Method)> = None;
    for (param, input) in params.iter().zip(inputs) {
        let label = format_rational(param);
        let Some(f) = input else { continue };
        let input_norm = mixed_norm(&f, &groups, &p)?;
        if input_norm == 0.0 {
            rows.push(ProbeRow {
                param: label,
                output_norm: None,
                input_norm: Some(0.0),
                ratio: None,
                skipped: Some("zero input: ratio undefined".into()),
                dropped_samples: 0,
            });
            continue;
        }
        let out: Vec<Axis> = f.axes()[..n].iter().map(Axis::staggered).collect();
        let ev = target.apply(&f, &out, &opts.quadrature)?;
        let output_norm = mixed_norm(&ev.output, &[n], &q)?;
        if first_grid.is_none() {
            first_grid = Some((f.axes().to_vec(), out.clone(), ev.method));
        }
        rows.push(ProbeRow {
            param: label,
            output_norm: Some(output_norm),
            input_norm: Some(input_norm),
            ratio: Some(output_norm / input_norm),
            skipped: None,
            dropped_samples: ev.dropped,
        });
    }
    let (input_grid, output_grid, method) = match first_grid {
        Some((i, o, m)) => (summary(&i), summary(&o), Some(m)),
        None => (summary(&base_axes), Vec::new(), None),
    };
    Ok(ProbeReport {
        family,
        params: params.iter().map(format_rational).collect(),
        rows,
        metadata: ProbeMeta {
            input_grid,
            output_grid,
            method,
            seed: opts.quadrature.seed,
            problem_hash: target.hash(),
            epsilon: (family == Family::Logpower).then(|| format_rational(&opts.epsilon)),
            note,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{problem_j, problem_t};
    use crate::ratlinalg::RatMatrix;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn j_problem(lambda: Order, q: &str) -> ProblemJ {
        problem_j(2, 1, RatMatrix::from_i64(&[&[1], &[1]]), vec![e("2"), e("2")], e(q), lambda).unwrap()
    }

    #[test]
    fn dilation_is_flat_for_homogeneous_exponents() {
        let prob = j_problem(Order::ratio(5, 4), "4");
        let r = ratio_probe(ProbeTarget::J(&prob), Family::Dilation, &[], &ProbeOptions::default()).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert!(r.max_over_min().unwrap() <= 1.05, "{:?}", r.ratios());
    }

    #[test]
    fn dilation_drifts_without_homogeneity() {
        // q = 3 breaks the scaling relation; the ratio then moves like a^{1/3 - 1/4}
        let prob = j_problem(Order::ratio(5, 4), "3");
        let opts = ProbeOptions { cells: Some(64), ..Default::default() };
        let r = ratio_probe(ProbeTarget::J(&prob), Family::Dilation, &[], &opts).unwrap();
        let got = r.max_over_min().unwrap();
        let expect = 16f64.powf(1.0 / 12.0);
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn zero_input_is_skipped() {
        let prob = j_problem(Order::ratio(3, 2), "2");
        let opts = ProbeOptions { cells: Some(32), ..Default::default() };
        let params = [Rational::from_integer(1.into()), Rational::new(1.into(), 4.into())];
        let r = ratio_probe(ProbeTarget::J(&prob), Family::Logpower, &params, &opts).unwrap();
        assert!(r.rows[0].skipped.is_some() && r.rows[0].ratio.is_none());
        assert!(r.rows[1].ratio.unwrap() > 0.0);
    }

    #[test]
    fn translation_and_boxe_run_for_t() {
        let prob = problem_t(
            1,
            1,
            RatMatrix::from_i64(&[&[1, -1], &[1, 1]]),
            vec![e("4"), e("4/3")],
            e("2"),
            Order::ratio(1, 2),
        )
        .unwrap();
        let opts = ProbeOptions { cells: Some(32), ..Default::default() };
        let r = ratio_probe(ProbeTarget::T(&prob), Family::Translation, &[], &opts).unwrap();
        assert!(r.ratios().iter().all(|x| x.is_finite() && *x > 0.0));
        let r = ratio_probe(ProbeTarget::T(&prob), Family::BoxE, &[Rational::from_integer(16.into())], &opts).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(ratio_probe(ProbeTarget::T(&prob), Family::Translation, &[Rational::new(1.into(), 3.into())], &opts)
            .is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in [Family::Dilation, Family::Translation, Family::Logpower, Family::BoxE] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
