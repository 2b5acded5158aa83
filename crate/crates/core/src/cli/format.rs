//! Problem files (TOML in) and reports (JSON out).
//!
//! A problem file looks like
//!
//! ```toml
//! kind = "T"            # "T", "J" or "riesz"
//! m = 1
//! n = 1
//! # T: the full (m+1)n × (m+1)n matrix A, row by row, block (i, j) in
//! #    rows (i-1)n+1..in and columns (j-1)n+1..jn.
//! # J: the mn × n stack (D_1; …; D_m). riesz: no matrix.
//! matrix = [["1", "-1"], ["1", "1"]]
//! p = ["4", "4/3"]
//! q = "2"               # optional; solved from the scaling relation if absent
//! lambda = "1/2"
//!
//! [probe]               # optional
//! family = "dilation"   # dilation | translation | logpower | boxE
//! params = ["1/4", "1/2", "1", "2", "4"]
//! cells = 256
//! half_width = "4"
//! epsilon = "1/10"
//! seed = 0
//! ```
//!
//! Numbers are integers or strings holding integers, `p/q` or `inf`;
//! decimals are rejected so every input is exact.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decide::{ProblemJ, ProblemT};
use crate::error::{Error, Result};
use crate::exponents::{homogeneous_q, parse_rational, Exponent, ExponentVector, Kind, Order, Rational};
use crate::numeric::probe::hex;
use crate::ratlinalg::{BlockMatrix, RatMatrix};

/// Largest `m` accepted for kind `T` with `n = 1`, where the subset search is exhaustive.
pub const M_CAP_N1: usize = 12;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
    Float(f64),
}

impl Scalar {
    fn text(&self, field: &str) -> Result<String> {
        match self {
            Scalar::Int(i) => Ok(i.to_string()),
            Scalar::Text(s) => Ok(s.clone()),
            Scalar::Float(x) => Err(Error::Input(format!(
                "field `{field}`: decimal {x} is not allowed; write an integer or a ratio such as \"1/2\""
            ))),
        }
    }

    fn rational(&self, field: &str) -> Result<Rational> {
        let t = self.text(field)?;
        parse_rational(&t).map_err(|e| Error::Input(format!("field `{field}`: {e}")))
    }

    fn exponent(&self, field: &str) -> Result<Exponent> {
        let t = self.text(field)?;
        t.parse().map_err(|e| Error::Input(format!("field `{field}`: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub family: String,
    pub params: Option<Vec<Scalar>>,
    pub cells: Option<usize>,
    pub half_width: Option<Scalar>,
    pub epsilon: Option<Scalar>,
    pub seed: Option<u64>,
    pub halton_samples: Option<usize>,
    pub integration_cells: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: String,
    pub m: Option<usize>,
    pub n: usize,
    pub matrix: Option<Vec<Vec<Scalar>>>,
    pub p: Vec<Scalar>,
    pub q: Option<Scalar>,
    pub lambda: Scalar,
    pub probe: Option<ProbeSection>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    T(ProblemT),
    J(ProblemJ),
    Riesz { n: usize, p: Exponent, q: Exponent, lambda: Order },
}

impl Problem {
    /// The Riesz case as a one-block `J` problem with `D = I`.
    pub fn as_j(&self) -> Option<ProblemJ> {
        match self {
            Problem::J(p) => Some(p.clone()),
            Problem::Riesz { n, p, q, lambda } => ProblemJ::new(
                BlockMatrix::j(1, *n, RatMatrix::identity(*n)).ok()?,
                ExponentVector::new(vec![p.clone()]).ok()?,
                q.clone(),
                lambda.clone(),
            )
            .ok(),
            Problem::T(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedProblem {
    pub file: ProblemFile,
    pub problem: Problem,
    pub input_hash: String,
    pub q_derived: bool,
}

/// Parses and validates a problem file. Errors name the offending field or
/// carry the TOML line and column.
pub fn load_problem(text: &str) -> Result<LoadedProblem> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| Error::Input(format!("problem file: {e}")))?;
    let input_hash = hex(&Sha256::digest(text.as_bytes()));
    let n = file.n;
    if n == 0 {
        return Err(Error::Input("field `n`: must be positive".into()));
    }
    let lambda: Order = Order::new(file.lambda.rational("lambda")?)
        .map_err(|_| Error::Input("field `lambda`: must be positive".into()))?;
    let p: Vec<Exponent> =
        file.p.iter().enumerate().map(|(i, s)| s.exponent(&format!("p[{i}]"))).collect::<Result<_>>()?;
    let kind = match file.kind.as_str() {
        "T" | "t" => Some(Kind::T),
        "J" | "j" => Some(Kind::J),
        "riesz" => None,
        other => return Err(Error::Input(format!("field `kind`: expected \"T\", \"J\" or \"riesz\", got {other:?}"))),
    };
    let m = match kind {
        None => file.m.unwrap_or(1),
        Some(_) => file.m.ok_or_else(|| Error::Input("field `m`: required for kinds T and J".into()))?,
    };
    if m == 0 {
        return Err(Error::Input("field `m`: must be positive".into()));
    }
    let arity = match kind {
        Some(k) => k.arity(m),
        None => 1,
    };
    if kind.is_none() && m != 1 {
        return Err(Error::Input("field `m`: riesz problems have m = 1".into()));
    }
    if p.len() != arity {
        return Err(Error::Input(format!("field `p`: expected {arity} exponents, got {}", p.len())));
    }
    let pv = ExponentVector::new(p)?;
    let (q, q_derived) = match &file.q {
        Some(s) => (s.exponent("q")?, false),
        None => {
            let q = homogeneous_q(&pv, &lambda, m, n).ok_or_else(|| {
                Error::Input("field `q`: absent, and the scaling relation gives no admissible q".into())
            })?;
            (q, true)
        }
    };

    let matrix = |rows: usize, cols: usize| -> Result<RatMatrix> {
        let raw = file.matrix.as_ref().ok_or_else(|| Error::Input("field `matrix`: required".into()))?;
        if raw.len() != rows {
            return Err(Error::Input(format!("field `matrix`: expected {rows} rows, got {}", raw.len())));
        }
        let mut out = Vec::with_capacity(rows);
        for (i, row) in raw.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Input(format!(
                    "field `matrix`: row {} has {} entries, expected {cols}",
                    i + 1,
                    row.len()
                )));
            }
            out.push(
                row.iter()
                    .enumerate()
                    .map(|(j, s)| s.rational(&format!("matrix[{}][{}]", i + 1, j + 1)))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        RatMatrix::from_rows(out)
    };

    let problem = match kind {
        Some(Kind::T) => {
            if n == 1 && m > M_CAP_N1 {
                return Err(Error::Input(format!("field `m`: at most {M_CAP_N1} when n = 1")));
            }
            let size = (m + 1) * n;
            Problem::T(ProblemT::new(BlockMatrix::t(m, n, matrix(size, size)?)?, pv, q, lambda)?)
        }
        Some(Kind::J) => Problem::J(ProblemJ::new(BlockMatrix::j(m, n, matrix(m * n, n)?)?, pv, q, lambda)?),
        None => {
            if file.matrix.is_some() {
                return Err(Error::Input("field `matrix`: riesz problems take no matrix".into()));
            }
            Problem::Riesz { n, p: pv.get(1).clone(), q, lambda }
        }
    };
    Ok(LoadedProblem { file, problem, input_hash, q_derived })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProblemEcho {
    pub kind: &'static str,
    pub m: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<RatMatrix>,
    pub p: ExponentVector,
    pub q: Exponent,
    pub q_derived: bool,
    pub lambda: Order,
}

impl ProblemEcho {
    pub fn of(lp: &LoadedProblem) -> Self {
        let (kind, m, n, matrix, p, q, lambda) = match &lp.problem {
            Problem::T(t) => ("T", t.m(), t.n(), Some(t.a.base().clone()), t.p.clone(), t.q.clone(), t.lambda.clone()),
            Problem::J(j) => ("J", j.m(), j.n(), Some(j.d.base().clone()), j.p.clone(), j.q.clone(), j.lambda.clone()),
            Problem::Riesz { n, p, q, lambda } => (
                "riesz",
                1,
                *n,
                None,
                ExponentVector::new(vec![p.clone()]).expect("one exponent"),
                q.clone(),
                lambda.clone(),
            ),
        };
        ProblemEcho { kind, m, n, matrix, p, q, q_derived: lp.q_derived, lambda }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BILINEAR: &str = r#"
kind = "T"
m = 1
n = 1
matrix = [["1", "-1"], ["1", "1"]]
p = ["4", "4/3"]
q = "2"
lambda = "1/2"
"#;

    #[test]
    fn parses_bilinear() {
        let lp = load_problem(BILINEAR).unwrap();
        assert!(matches!(lp.problem, Problem::T(_)));
        assert_eq!(lp.input_hash.len(), 64);
        assert!(!lp.q_derived);
    }

    #[test]
    fn derives_q_when_absent() {
        let text = "kind = \"J\"\nm = 2\nn = 1\nmatrix = [[1], [1]]\np = [\"2\", \"2\"]\nlambda = \"5/4\"\n";
        let lp = load_problem(text).unwrap();
        assert!(lp.q_derived);
        match lp.problem {
            Problem::J(j) => assert_eq!(j.q, Exponent::int(4)),
            _ => panic!(),
        }
    }

    #[test]
    fn rejects_decimals_and_bad_shapes() {
        let e = load_problem(&BILINEAR.replace("\"4/3\"", "\"0.5\"")).unwrap_err();
        assert!(e.to_string().contains("p[1]"), "{e}");
        let e = load_problem(&BILINEAR.replace("\"4/3\"", "0.75")).unwrap_err();
        assert!(e.to_string().contains("decimal"), "{e}");
        let e = load_problem(&BILINEAR.replace("[\"1\", \"1\"]]", "[\"1\"]]")).unwrap_err();
        assert!(e.to_string().contains("row 2"), "{e}");
        let e = load_problem(&BILINEAR.replace("kind = \"T\"", "kind = \"T\"\nbogus = 1")).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = load_problem("kind = \"T\"\nm = \n").unwrap_err();
        assert!(e.to_string().contains("line"), "{e}");
    }

    #[test]
    fn riesz_has_no_matrix() {
        let lp = load_problem("kind = \"riesz\"\nn = 1\np = [\"4/3\"]\nq = \"4\"\nlambda = \"1/2\"\n").unwrap();
        assert!(lp.problem.as_j().is_some());
    }
}
