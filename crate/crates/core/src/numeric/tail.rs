//! Mixed norms of `χ_{Σ|x_i| ≥ R} (Σ|x_i|)^{-α}` by nested radial quadrature.
//!
//! The function depends on each group only through `r_i = |x_i|`, so after
//! integrating groups `1..j` what remains is a function `G_j(t)` of
//! `t = r_{j+1} + … + r_k`:
//!
//! `G_j(t) = (ω_{n_j} ∫_t^∞ G_{j-1}(u)^{p_j} (u − t)^{n_j − 1} du)^{1/p_j}`.
//!
//! Each integral is split at `R` (where `G_0` jumps) and the infinite piece is
//! mapped to `(0, 1]` by `u = c/s`, then integrated on dyadic panels.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::quad::gauss_legendre;
use crate::error::{Error, Result};
use crate::exponents::{ExponentVector, Rational};

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => panic!("dimension must be positive"),
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub radius: f64,
    pub norm: f64,
    /// `norm · R^{α − Σ n_i/p_i}`
    pub compensated: f64,
}

const DYADIC_PANELS: i32 = 64;
const FINITE_PANELS: usize = 8;

struct Tail {
    dims: Vec<usize>,
    /// `None` for `p = ∞`.
    p: Vec<Option<f64>>,
    alpha: f64,
    r: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Tail {
    fn g(&self, j: usize, t: f64) -> f64 {
        if j == 0 {
            return if t >= self.r { t.powf(-self.alpha) } else { 0.0 };
        }
        let n = self.dims[j - 1];
        let Some(pj) = self.p[j - 1] else {
            // every G_j is nonincreasing past R; sample the sup anyway
            let start = t.max(self.r);
            let mut best = self.g(j - 1, t);
            for k in 0..64 {
                best = best.max(self.g(j - 1, start * 2f64.powf(k as f64 / 4.0)));
            }
            return best;
        };
        let integrand = |u: f64| {
            let v = self.g(j - 1, u);
            if v == 0.0 {
                0.0
            } else {
                v.powf(pj) * (u - t).powi(n as i32 - 1)
            }
        };
        let mut total = 0.0;
        if t < self.r && j > 1 {
            total += self.finite(t, self.r, &integrand);
        }
        total += self.infinite(t.max(self.r), &integrand);
        (sphere_area(n) * total).powf(1.0 / pj)
    }

    fn finite(&self, a: f64, b: f64, f: &impl Fn(f64) -> f64) -> f64 {
        let w = (b - a) / FINITE_PANELS as f64;
        let mut s = 0.0;
        for k in 0..FINITE_PANELS {
            let (lo, hi) = (a + k as f64 * w, a + (k + 1) as f64 * w);
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                s += wt * 0.5 * (hi - lo) * f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
            }
        }
        s
    }

    /// `∫_c^∞ f = ∫_0^1 f(c/s) c/s² ds` on panels `[2^{-k-1}, 2^{-k}]`.
    fn infinite(&self, c: f64, f: &impl Fn(f64) -> f64) -> f64 {
        let mut s = 0.0;
        for k in 0..DYADIC_PANELS {
            let hi = 2f64.powi(-k);
            let lo = 0.5 * hi;
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                let v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                s += wt * 0.5 * (hi - lo) * f(c / v) * c / (v * v);
            }
        }
        s
    }
}

/// Norms of the truncated power for each radius (1 is always included) and
/// their compensated values, which the scaling law predicts to be constant.
pub fn tail_scaling_check(
    group_dims: &[usize],
    p: &ExponentVector,
    alpha: &Rational,
    radii: &[f64],
) -> Result<Vec<TailRow>> {
    if group_dims.len() != p.len() || group_dims.is_empty() || group_dims.contains(&0) {
        return Err(Error::ShapeMismatch(format!("{} groups for {} exponents", group_dims.len(), p.len())));
    }
    if group_dims.len() > 3 {
        return Err(Error::ShapeMismatch("nested radial quadrature supports at most 3 groups".into()));
    }
    let critical: Rational = group_dims
        .iter()
        .zip(p.iter())
        .map(|(&n, pi)| Rational::from_integer(n.into()) * pi.reciprocal())
        .sum();
    if *alpha <= critical {
        return Err(Error::DomainError(format!("α = {alpha} must exceed Σ n_i/p_i = {critical}")));
    }
    let mut rs: Vec<f64> = radii.to_vec();
    if !rs.contains(&1.0) {
        rs.insert(0, 1.0);
    }
    if let Some(bad) = rs.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::DomainError(format!("radius {bad} must be positive")));
    }
    let (nodes, weights) = gauss_legendre(if group_dims.len() <= 2 { 16 } else { 4 });
    let af = alpha.to_f64().expect("finite");
    let gap = (alpha - critical).to_f64().expect("finite");
    let mut rows = Vec::with_capacity(rs.len());
    for r in rs {
        let tail = Tail {
            dims: group_dims.to_vec(),
            p: p.iter().map(|x| (!x.is_infinite()).then(|| x.to_f64())).collect(),
            alpha: af,
            r,
            nodes: nodes.clone(),
            weights: weights.clone(),
        };
        let norm = tail.g(group_dims.len(), 0.0);
        rows.push(TailRow { radius: r, norm, compensated: norm * r.powf(gap) });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(xs: &[&str]) -> ExponentVector {
        ExponentVector::new(xs.iter().map(|s| s.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn one_group_closed_form() {
        let radii: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
        let rows = tail_scaling_check(&[1], &pv(&["2"]), &Rational::from_integer(1.into()), &radii).unwrap();
        for row in &rows {
            assert!((row.norm - (2.0 / row.radius).sqrt()).abs() < 1e-12);
            assert!((row.compensated - 2f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn two_groups_against_direct_integral() {
        // p = (2, 2), n = (1, 1): ‖·‖² = 4 ∫∫_{r+s≥R} (r+s)^{-2α} = 4 ∫_R^∞ t^{1-2α} dt
        let alpha = Rational::new(3.into(), 2.into());
        let rows = tail_scaling_check(&[1, 1], &pv(&["2", "2"]), &alpha, &[2.0, 8.0]).unwrap();
        for row in rows {
            let exact = (4.0 / row.radius).sqrt();
            assert!((row.norm - exact).abs() < 1e-9 * exact, "{row:?}");
        }
    }

    #[test]
    fn infinite_exponent_and_three_groups() {
        let rows =
            tail_scaling_check(&[1, 1], &pv(&["inf", "1"]), &Rational::from_integer(2.into()), &[1.0]).unwrap();
        // inner sup at u = max(s, R) then 2∫_0^∞ max(s,1)^{-2} ds = 2(1 + 1) = 4
        assert!((rows[0].norm - 4.0).abs() < 1e-9, "{rows:?}");
        let rows =
            tail_scaling_check(&[1, 2, 1], &pv(&["2", "2", "2"]), &Rational::from_integer(3.into()), &[1.0, 4.0])
                .unwrap();
        let ratio = rows[0].compensated / rows[1].compensated;
        assert!((ratio - 1.0).abs() < 1e-6, "{rows:?}");
    }

    #[test]
    fn divergent_tail_is_rejected() {
        assert!(matches!(
            tail_scaling_check(&[1], &pv(&["2"]), &Rational::new(1.into(), 2.into()), &[1.0]),
            Err(Error::DomainError(_))
        ));
    }
}
