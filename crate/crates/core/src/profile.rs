//! Rank profiles of the last block column, the pivot index set they induce,
//! and the row-selection canonical form of the kernel `|Dx − y|`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{Kind, Rational};
use crate::ratlinalg::{rank, BlockMatrix, RatMatrix};

/// Ranks `r_2, …, r_{m+2}` (kind `T`) or `γ_1, …, γ_{m+1}` (kind `J`) and the
/// positions where they strictly drop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankProfile {
    pub kind: Kind,
    pub n: usize,
    /// Index carried by `ranks[0]`: 2 for `T`, 1 for `J`.
    pub first_index: usize,
    pub ranks: Vec<usize>,
    /// Positions `k_l` (or `i_l`) with `rank(k_l) > rank(k_l + 1)`, increasing.
    pub drops: Vec<usize>,
    pub nu: usize,
}

impl RankProfile {
    fn from_ranks(kind: Kind, n: usize, first_index: usize, ranks: Vec<usize>) -> Self {
        let drops: Vec<usize> = ranks
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] > w[1])
            .map(|(i, _)| i + first_index)
            .collect();
        let nu = drops.len();
        RankProfile { kind, n, first_index, ranks, drops, nu }
    }

    /// Rank at a 1-based block position (`r_k` or `γ_i`).
    pub fn rank_at(&self, pos: usize) -> usize {
        self.ranks[pos - self.first_index]
    }

    pub fn first_rank(&self) -> usize {
        self.ranks[0]
    }

    /// `rank(pos) − rank(pos + 1)`.
    pub fn drop_size(&self, pos: usize) -> usize {
        self.rank_at(pos) - self.rank_at(pos + 1)
    }

    pub fn is_full_rank(&self) -> bool {
        self.first_rank() == self.n
    }
}

/// `r_k = rank(A_{k,m+1}; …; A_{m+1,m+1})` for `k = 2..m+1`, with `r_{m+2} = 0`.
#[allow(non_snake_case)]
pub fn rank_profile_T(a: &BlockMatrix) -> RankProfile {
    assert_eq!(a.kind(), Kind::T, "rank_profile_T needs a kind-T matrix");
    let mut ranks: Vec<usize> = (2..=a.m() + 1).map(|k| rank(&a.tail_stack(k))).collect();
    ranks.push(0);
    RankProfile::from_ranks(Kind::T, a.n(), 2, ranks)
}

/// `γ_i = rank(D_i; …; D_m)` for `i = 1..m`, with `γ_{m+1} = 0`.
#[allow(non_snake_case)]
pub fn rank_profile_J(d: &BlockMatrix) -> RankProfile {
    assert_eq!(d.kind(), Kind::J, "rank_profile_J needs a kind-J matrix");
    let mut ranks: Vec<usize> = (1..=d.m()).map(|i| rank(&d.tail_stack(i))).collect();
    ranks.push(0);
    RankProfile::from_ranks(Kind::J, d.n(), 1, ranks)
}

/// The `n` pairs `(block, coordinate)` coupling the output variable to the
/// input variables, ordered by block then coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PivotIndexSet {
    pub pairs: Vec<(usize, usize)>,
}

/// `∪_s {(i_s, t) : n+1−(γ_{i_s}−γ_{i_s+1}) ≤ t ≤ n}`.
pub fn pivot_index_set(profile: &RankProfile) -> Result<PivotIndexSet> {
    let n = profile.n;
    if !profile.is_full_rank() {
        return Err(Error::NotFullRank { expected: n, actual: profile.first_rank() });
    }
    let mut pairs = Vec::with_capacity(n);
    for &pos in &profile.drops {
        let size = profile.drop_size(pos);
        pairs.extend((n + 1 - size..=n).map(|t| (pos, t)));
    }
    debug_assert_eq!(pairs.len(), n);
    Ok(PivotIndexSet { pairs })
}

/// Machine-checkable facts about a `CanonicalForm`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// 1-based global rows of `P·D` that vanish.
    pub zero_rows: Vec<usize>,
    /// 1-based global rows of `P·D` that are nonzero.
    pub nonzero_rows: Vec<usize>,
    /// `P·(−I) = −P` is upper triangular with `−1` on the diagonal.
    pub unit_upper_triangular: bool,
    /// Rank of the stacked selected rows `G`.
    pub g_rank: usize,
    /// Rows selected in block `i` equal `γ_i − γ_{i+1}` for every block.
    pub counts_match_profile: bool,
}

/// Row selection `G` and the unit upper triangular `P` with
/// `P·(D, −I) = (P·D, U)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalForm {
    /// For block `i` (index `i−1`), the 1-based rows of `D_i` kept in `G`.
    pub selected_rows: Vec<Vec<usize>>,
    pub p: RatMatrix,
    pub pd: RatMatrix,
    pub g: RatMatrix,
    pub certificate: Certificate,
}

/// Greedy bottom-up selection: rows are visited from the last row of `D_m` up
/// to the first row of `D_1`, and a row is kept iff it is independent of the
/// rows already kept. Every dropped row is then a combination of kept rows
/// *below* it, so `P` is unit upper triangular.
pub fn reduce_kernel(d: &BlockMatrix) -> Result<CanonicalForm> {
    assert_eq!(d.kind(), Kind::J, "reduce_kernel needs a kind-J matrix");
    let (m, n) = (d.m(), d.n());
    let total = m * n;
    let base = d.base();
    let full = rank(base);
    if full != n {
        return Err(Error::NotFullRank { expected: n, actual: full });
    }

    let mut kept: Vec<usize> = Vec::new(); // 0-based global rows, in visit order
    let mut p = RatMatrix::identity(total);
    for r in (0..total).rev() {
        let row = base.row(r);
        match solve_combination(base, &kept, row) {
            Some(coeffs) => {
                for (&s, c) in kept.iter().zip(coeffs) {
                    p.set(r, s, -c);
                }
            }
            None => kept.push(r),
        }
    }

    let mut selected_rows = vec![Vec::new(); m];
    let mut sorted = kept.clone();
    sorted.sort_unstable();
    for &r in &sorted {
        selected_rows[r / n].push(r % n + 1);
    }
    let g_rows: Vec<RatMatrix> = sorted.iter().map(|&r| base.window(r, 0, 1, n)).collect();
    let g = RatMatrix::vstack(&g_rows)?;
    let pd = &p * base;

    let certificate = certify(d, &p, &pd, &g, &selected_rows);
    let expected_zero: Vec<usize> = (1..=total).filter(|r| !sorted.contains(&(r - 1))).collect();
    let ok = certificate.unit_upper_triangular
        && certificate.g_rank == n
        && certificate.counts_match_profile
        && certificate.zero_rows == expected_zero;
    if !ok {
        return Err(Error::PreconditionViolated(format!(
            "canonical form certificate failed: {certificate:?}"
        )));
    }
    Ok(CanonicalForm { selected_rows, p, pd, g, certificate })
}

fn certify(
    d: &BlockMatrix,
    p: &RatMatrix,
    pd: &RatMatrix,
    g: &RatMatrix,
    selected_rows: &[Vec<usize>],
) -> Certificate {
    let total = p.rows();
    let (zero_rows, nonzero_rows): (Vec<usize>, Vec<usize>) =
        (1..=total).partition(|&r| pd.row(r - 1).iter().all(Zero::is_zero));
    let unit_upper_triangular = (0..total).all(|i| {
        (0..total).all(|j| {
            let x = p.at(i, j);
            if i == j {
                x.is_one()
            } else if j < i {
                x.is_zero()
            } else {
                true
            }
        })
    });
    let profile = rank_profile_J(d);
    let counts_match_profile =
        (1..=d.m()).all(|i| selected_rows[i - 1].len() == profile.drop_size(i));
    Certificate { zero_rows, nonzero_rows, unit_upper_triangular, g_rank: rank(g), counts_match_profile }
}

/// Coefficients `c` with `Σ_k c_k · base[kept[k]] = target`, if any.
/// The kept rows are linearly independent, so a solution is unique.
fn solve_combination(base: &RatMatrix, kept: &[usize], target: &[Rational]) -> Option<Vec<Rational>> {
    let n = target.len();
    if kept.is_empty() {
        return target.iter().all(Zero::is_zero).then(Vec::new);
    }
    let k = kept.len();
    // Augmented system: n equations (columns of D), k unknowns.
    let mut sys: Vec<Vec<Rational>> = (0..n)
        .map(|col| {
            let mut eq: Vec<Rational> = kept.iter().map(|&r| base.at(r, col).clone()).collect();
            eq.push(target[col].clone());
            eq
        })
        .collect();
    let mut pivot_cols = Vec::with_capacity(k);
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..n).find(|&i| !sys[i][col].is_zero()) else { continue };
        sys.swap(p, row);
        let inv = sys[row][col].recip();
        for x in sys[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != row && !sys[i][col].is_zero() {
                let f = sys[i][col].clone();
                let pivot_row = sys[row].clone();
                for (x, y) in sys[i].iter_mut().zip(&pivot_row).take(k + 1) {
                    *x -= &f * y;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if sys[row..].iter().any(|eq| !eq[k].is_zero()) {
        return None;
    }
    let mut c = vec![Rational::zero(); k];
    for (r, &col) in pivot_cols.iter().enumerate() {
        c[col] = sys[r][k].clone();
    }
    Some(c)
}
