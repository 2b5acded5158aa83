//! Exact rational matrices with an `(m, n)` block structure.
//!
//! Rank and determinant use fraction-free (Bareiss) elimination over the
//! integers after clearing row denominators; inverses use Gauss–Jordan with
//! rational pivots. No tolerances anywhere.

use std::fmt;
use std::ops::{Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{Kind, Rational};

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience for integer literals; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// 0-based entry access.
    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.data.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Contiguous 0-based window `[r0, r0+nr) × [c0, c0+nc)`.
    pub fn window(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> RatMatrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "window out of range");
        let mut out = Vec::with_capacity(nr * nc);
        for i in r0..r0 + nr {
            out.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + nc]);
        }
        RatMatrix { rows: nr, cols: nc, data: out }
    }

    /// Stacks matrices with equal column counts top to bottom.
    pub fn vstack(parts: &[RatMatrix]) -> Result<RatMatrix> {
        let cols = parts.first().map_or(0, |p| p.cols);
        if parts.iter().any(|p| p.cols != cols) {
            return Err(Error::ShapeMismatch("vstack column mismatch".into()));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let data = parts.iter().flat_map(|p| p.data.iter().cloned()).collect();
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Rows scaled to primitive integer vectors (same row space, same minors up to units).
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let scale = (0..self.rows).fold(Rational::one(), |acc, i| {
            let l = self.row(i).iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
            acc * Rational::from_integer(l)
        });
        let (rank, det) = bareiss(self.integer_rows(), self.cols);
        if rank < self.rows {
            return Ok(Rational::zero());
        }
        Ok(Rational::from_integer(det) / scale)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && rank(self) == self.rows
    }
}

/// Fraction-free elimination. Returns `(rank, signed last pivot)`; the second
/// component is the determinant when the input is square and nonsingular.
fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> (usize, BigInt) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            sign = -sign;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..cols {
                let num = &pivot * &row[j] - &lead * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        r += 1;
    }
    let det = if sign < 0 { -prev } else { prev };
    (r, det)
}

/// Exact rank over the rationals.
pub fn rank(m: &RatMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    bareiss(m.integer_rows(), m.cols).0
}

/// Exact inverse by Gauss–Jordan elimination.
pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = RatMatrix::identity(n);
    for col in 0..n {
        let p = (col..n).find(|&i| !a.at(i, col).is_zero()).ok_or(Error::SingularMatrix)?;
        if p != col {
            for j in 0..n {
                a.data.swap(p * n + j, col * n + j);
                inv.data.swap(p * n + j, col * n + j);
            }
        }
        let piv = a.at(col, col).recip();
        for j in 0..n {
            a.data[col * n + j] *= &piv;
            inv.data[col * n + j] *= &piv;
        }
        for i in 0..n {
            if i == col || a.at(i, col).is_zero() {
                continue;
            }
            let f = a.at(i, col).clone();
            for j in 0..n {
                let da = &f * a.at(col, j);
                let di = &f * inv.at(col, j);
                a.data[i * n + j] -= da;
                inv.data[i * n + j] -= di;
            }
        }
    }
    Ok(inv)
}

/// Selects rows and columns by strictly increasing 1-based index sets.
pub fn submatrix(m: &RatMatrix, rowset: &[usize], colset: &[usize]) -> Result<RatMatrix> {
    check_index_set(rowset, m.rows, "row")?;
    check_index_set(colset, m.cols, "column")?;
    let mut data = Vec::with_capacity(rowset.len() * colset.len());
    for &i in rowset {
        for &j in colset {
            data.push(m.at(i - 1, j - 1).clone());
        }
    }
    RatMatrix::from_vec(rowset.len(), colset.len(), data)
}

fn check_index_set(set: &[usize], bound: usize, what: &str) -> Result<()> {
    for (k, &i) in set.iter().enumerate() {
        if i == 0 || i > bound {
            return Err(Error::IndexOutOfRange(format!("{what} index {i} not in 1..={bound}")));
        }
        if k > 0 && set[k - 1] >= i {
            return Err(Error::IndexOutOfRange(format!("{what} indices must strictly increase")));
        }
    }
    Ok(())
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in subtraction");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Serialized as nested arrays of rational strings.
impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// A matrix with declared block structure: the `(m+1)n × (m+1)n` matrix `A`
/// of a `T` problem, or the `mn × n` stack `D = (D_1; …; D_m)` of a `J` problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockMatrix {
    kind: Kind,
    m: usize,
    n: usize,
    base: RatMatrix,
}

impl BlockMatrix {
    pub fn new(kind: Kind, m: usize, n: usize, base: RatMatrix) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::ShapeMismatch("m and n must be positive".into()));
        }
        let want = match kind {
            Kind::T => ((m + 1) * n, (m + 1) * n),
            Kind::J => (m * n, n),
        };
        if (base.rows, base.cols) != want {
            return Err(Error::ShapeMismatch(format!(
                "kind {kind:?} with m={m}, n={n} needs a {}x{} matrix, got {}x{}",
                want.0, want.1, base.rows, base.cols
            )));
        }
        Ok(BlockMatrix { kind, m, n, base })
    }

    pub fn t(m: usize, n: usize, base: RatMatrix) -> Result<Self> {
        Self::new(Kind::T, m, n, base)
    }

    pub fn j(m: usize, n: usize, base: RatMatrix) -> Result<Self> {
        Self::new(Kind::J, m, n, base)
    }

    /// Stacks `D_1, …, D_m` (each `n × n`).
    pub fn from_d_blocks(blocks: &[RatMatrix]) -> Result<Self> {
        let n = blocks.first().map_or(0, RatMatrix::rows);
        if blocks.iter().any(|b| b.rows != n || b.cols != n) {
            return Err(Error::ShapeMismatch("D blocks must all be n x n".into()));
        }
        Self::j(blocks.len(), n, RatMatrix::vstack(blocks)?)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &RatMatrix {
        &self.base
    }

    /// Number of block rows: `m+1` for `T`, `m` for `J`.
    pub fn block_rows(&self) -> usize {
        self.base.rows / self.n
    }

    /// The `n × n` block `A_{i,j}` (1-based). For `J`, `block(i, 1) = D_i`.
    pub fn block(&self, i: usize, j: usize) -> RatMatrix {
        let bc = self.base.cols / self.n;
        assert!(
            (1..=self.block_rows()).contains(&i) && (1..=bc).contains(&j),
            "block ({i},{j}) out of range"
        );
        self.base.window((i - 1) * self.n, (j - 1) * self.n, self.n, self.n)
    }

    /// Blocks `from..=last` of the last block column stacked vertically:
    /// `(A_{k,m+1}; …; A_{m+1,m+1})` for `T`, `(D_i; …; D_m)` for `J`.
    pub fn tail_stack(&self, from: usize) -> RatMatrix {
        let rows = self.block_rows();
        let col0 = self.base.cols - self.n;
        if from > rows {
            return RatMatrix::zeros(0, self.n);
        }
        self.base.window((from - 1) * self.n, col0, (rows - from + 1) * self.n, self.n)
    }

    /// For `T`: the `(1, m+1)`-minor `(A_{i,j})_{2≤i≤m+1, 1≤j≤m}`.
    pub fn minor_1_last(&self) -> RatMatrix {
        assert_eq!(self.kind, Kind::T, "minor is defined for kind T");
        let mn = self.m * self.n;
        self.base.window(self.n, 0, mn, mn)
    }
}

/// Outcome of checking both block-inverse claims on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchurCheck {
    pub a3_invertible: bool,
    pub inv_a3_invertible: bool,
    /// `None` when `Ã_3` is singular and claim (ii) is vacuous.
    pub identity_holds: Option<bool>,
}

impl SchurCheck {
    pub fn holds(&self) -> bool {
        self.a3_invertible == self.inv_a3_invertible && self.identity_holds != Some(false)
    }
}

/// Splits `A` (rows `n1 | n2`, columns `n2 | n1`) and `Ã = A⁻¹` (rows `n2 | n1`,
/// columns `n1 | n2`) and checks: `A_3` invertible iff `Ã_3` invertible, and when
/// `Ã_3` is invertible, `(Ã_2 − Ã_1 Ã_3⁻¹ Ã_4)⁻¹ Ã_1 Ã_3⁻¹ = −A_4`.
pub fn schur_identity_details(a: &RatMatrix, n1: usize, n2: usize) -> Result<SchurCheck> {
    if n1 == 0 || n2 == 0 || !a.is_square() || a.rows != n1 + n2 {
        return Err(Error::ShapeMismatch(format!(
            "need a square matrix of size n1+n2 = {}, got {}x{}",
            n1 + n2,
            a.rows,
            a.cols
        )));
    }
    let inv = inverse(a)?;
    let a3 = a.window(n1, 0, n2, n2);
    let a4 = a.window(n1, n2, n2, n1);
    let t1 = inv.window(0, 0, n2, n1);
    let t2 = inv.window(0, n1, n2, n2);
    let t3 = inv.window(n2, 0, n1, n1);
    let t4 = inv.window(n2, n1, n1, n2);

    let a3_invertible = a3.is_invertible();
    let inv_a3_invertible = t3.is_invertible();
    let identity_holds = if inv_a3_invertible {
        let t3_inv = inverse(&t3)?;
        let s = &t2 - &(&(&t1 * &t3_inv) * &t4);
        Some(match inverse(&s) {
            Ok(s_inv) => &(&s_inv * &t1) * &t3_inv == -&a4,
            Err(_) => false,
        })
    } else {
        None
    };
    Ok(SchurCheck { a3_invertible, inv_a3_invertible, identity_holds })
}

pub fn schur_identity_check(a: &RatMatrix, n1: usize, n2: usize) -> Result<bool> {
    schur_identity_details(a, n1, n2).map(|c| c.holds())
}

/// For invertible `A` of kind `T`: the leading `mn × mn` corner of `A⁻¹` has
/// full rank iff `A_{m+1,m+1}` has rank `n`. Returns whether that equivalence
/// holds on this instance.
pub fn corner_rank_equiv_check(a: &BlockMatrix) -> Result<bool> {
    if a.kind != Kind::T {
        return Err(Error::ShapeMismatch("corner rank check needs a kind-T matrix".into()));
    }
    let inv = inverse(&a.base)?;
    let mn = a.m * a.n;
    let corner_full = rank(&inv.window(0, 0, mn, mn)) == mn;
    let last_full = rank(&a.block(a.m + 1, a.m + 1)) == a.n;
    Ok(corner_full == last_full)
}

/// Seeded random rational matrices for property suites.
pub mod random {
    use super::*;
    use rand::Rng;

    /// Uniform numerator in `[-9, 9]`, denominator in `[1, 9]`.
    pub fn rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
        Rational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=9)))
    }

    /// Entries drawn from `rational`, with each entry zeroed with probability `zero_prob`.
    pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, zero_prob: f64) -> RatMatrix {
        let data = (0..rows * cols)
            .map(|_| if rng.gen_bool(zero_prob) { Rational::zero() } else { rational(rng) })
            .collect();
        RatMatrix { rows, cols, data }
    }

    /// Rejection-samples an invertible `n × n` matrix.
    pub fn invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_prob: f64) -> RatMatrix {
        loop {
            let m = matrix(rng, n, n, zero_prob);
            if m.is_invertible() {
                return m;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RatMatrix::from_i64(&[&[1, 0], &[0, 0]])), 1);
        assert_eq!(rank(&RatMatrix::identity(3)), 3);
        assert_eq!(rank(&RatMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&RatMatrix::zeros(2, 3)), 0);
        assert_eq!(rank(&RatMatrix::from_i64(&[&[0, 1, 2], &[0, 2, 4], &[0, 0, 1]])), 2);
    }

    #[test]
    fn inverse_examples() {
        let a = RatMatrix::from_i64(&[&[2, 0], &[0, 4]]);
        let want = RatMatrix::from_rows(vec![vec![q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 4)]]).unwrap();
        assert_eq!(inverse(&a).unwrap(), want);
        let swap = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(inverse(&swap).unwrap(), swap);
        assert_eq!(inverse(&RatMatrix::from_i64(&[&[1, 1], &[1, 1]])), Err(Error::SingularMatrix));
    }

    #[test]
    fn determinant_matches_hand_values() {
        let a = RatMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        assert_eq!(a.determinant().unwrap(), q(-1, 1));
        let b = RatMatrix::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(1, 4), q(1, 5)]]).unwrap();
        assert_eq!(b.determinant().unwrap(), q(1, 10) - q(1, 12));
        assert_eq!(RatMatrix::from_i64(&[&[0, 1], &[1, 0]]).determinant().unwrap(), q(-1, 1));
    }

    #[test]
    fn submatrix_examples() {
        let id = RatMatrix::identity(3);
        assert_eq!(submatrix(&id, &[2, 3], &[1, 2]).unwrap(), RatMatrix::from_i64(&[&[0, 1], &[0, 0]]));
        assert_eq!(submatrix(&id, &[1, 2, 3], &[1, 2, 3]).unwrap(), id);
        let m = RatMatrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(submatrix(&m, &[1], &[1, 3]).unwrap(), RatMatrix::from_i64(&[&[1, 3]]));
        assert!(matches!(submatrix(&m, &[3], &[1]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(submatrix(&m, &[1], &[2, 1]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(submatrix(&m, &[0], &[1]), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn schur_examples() {
        assert!(schur_identity_check(&RatMatrix::from_i64(&[&[0, 1], &[1, 0]]), 1, 1).unwrap());
        let a = RatMatrix::from_i64(&[&[1, 1], &[1, 2]]);
        let d = schur_identity_details(&a, 1, 1).unwrap();
        assert!(d.a3_invertible && d.inv_a3_invertible && d.identity_holds == Some(true));
        assert_eq!(inverse(&a).unwrap(), RatMatrix::from_i64(&[&[2, -1], &[-1, 1]]));
        let d = schur_identity_details(&RatMatrix::identity(2), 1, 1).unwrap();
        assert!(!d.a3_invertible && !d.inv_a3_invertible && d.identity_holds.is_none());
        assert_eq!(
            schur_identity_check(&RatMatrix::from_i64(&[&[1, 1], &[1, 1]]), 1, 1),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn corner_rank_examples() {
        let a = BlockMatrix::t(1, 1, RatMatrix::from_i64(&[&[1, 1], &[1, 2]])).unwrap();
        assert!(corner_rank_equiv_check(&a).unwrap());
        let a = BlockMatrix::t(1, 1, RatMatrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap();
        assert!(corner_rank_equiv_check(&a).unwrap());
        let a = BlockMatrix::t(1, 2, RatMatrix::identity(4)).unwrap();
        assert!(corner_rank_equiv_check(&a).unwrap());
    }

    #[test]
    fn block_accessors_are_one_based() {
        let a = RatMatrix::from_i64(&[&[1, 2, 3, 4], &[5, 6, 7, 8], &[9, 10, 11, 12], &[13, 14, 15, 16]]);
        let b = BlockMatrix::t(1, 2, a).unwrap();
        assert_eq!(b.block(2, 1), RatMatrix::from_i64(&[&[9, 10], &[13, 14]]));
        assert_eq!(b.tail_stack(2), RatMatrix::from_i64(&[&[11, 12], &[15, 16]]));
        assert_eq!(b.minor_1_last(), RatMatrix::from_i64(&[&[9, 10], &[13, 14]]));
        assert!(BlockMatrix::j(2, 2, RatMatrix::identity(4)).is_err());
    }

    #[test]
    fn random_inverses_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for _ in 0..5 {
                let m = random::invertible(&mut rng, n, 0.2);
                assert_eq!(&m * &inverse(&m).unwrap(), RatMatrix::identity(n));
            }
        }
    }
}
