//! Test-function families used by the probes.

use num_traits::{Signed, ToPrimitive, Zero};

use super::grid::{mixed_norm, GridFunction};
use crate::error::{Error, Result};
use crate::exponents::{conjugate, reciprocal_sum, Exponent, ExponentVector, Rational};

/// `f_a = a^{n/p_1 + … + n/p_k} f(a·)`, represented exactly by shrinking the
/// grid by `a` (every midpoint maps to a midpoint), so the mixed norm is
/// preserved up to rounding.
pub fn dilation_family(f: &GridFunction, p: &ExponentVector, n: usize, a: &Rational) -> Result<GridFunction> {
    if f.dims() != n * p.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} exponents of block size {n} need {} axes, got {}",
            p.len(),
            n * p.len(),
            f.dims()
        )));
    }
    if !a.is_positive() {
        return Err(Error::IncompatibleGrid(format!("dilation factor {a} must be positive")));
    }
    let af = a.to_f64().filter(|v| v.is_finite() && *v > 0.0).ok_or_else(|| {
        Error::IncompatibleGrid(format!("dilation factor {a} is not representable"))
    })?;
    let s = Rational::from_integer(n.into()) * reciprocal_sum(p);
    let prefactor = af.powf(s.to_f64().expect("finite exponent sum"));
    let axes = f.axes().iter().map(|ax| ax.scaled(1.0 / af)).collect();
    let mut out = GridFunction::new(axes, f.values().to_vec())?;
    out.scale_values(prefactor);
    Ok(out)
}

/// Whole-cell count for a shift of length `a` along an axis with step `h`.
pub fn shift_cells(a: f64, h: f64) -> Result<isize> {
    let t = a / h;
    if !t.is_finite() || (t - t.round()).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::IncompatibleGrid(format!("shift {a} is not a whole number of cells of width {h}")));
    }
    Ok(t.round() as isize)
}

/// Ratios `‖f(· − a e) + f‖ / ‖f‖` for shifts along the first axis of group
/// `k` (1-based), which leaves later groups untouched. Shifts must be whole
/// cells; the grid is padded so nothing falls off.
pub fn translation_limit_probe(
    f: &GridFunction,
    groups: &[usize],
    p: &ExponentVector,
    k: usize,
    shifts: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if k == 0 || k > groups.len() {
        return Err(Error::ShapeMismatch(format!("group {k} out of 1..={}", groups.len())));
    }
    let base = mixed_norm(f, groups, p)?;
    if base == 0.0 {
        return Err(Error::DomainError("translation ratio undefined for the zero function".into()));
    }
    let axis: usize = groups[..k - 1].iter().sum();
    let h = f.axes()[axis].step();
    let cells: Vec<isize> = shifts.iter().map(|&a| shift_cells(a, h)).collect::<Result<_>>()?;
    let pad = cells.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    let mut axes = f.axes().to_vec();
    axes[axis] = axes[axis].padded(pad);
    let zero = vec![0isize; f.dims()];
    let still = f.embed(&axes, &zero)?;
    let mut out = Vec::with_capacity(shifts.len());
    for (&a, &c) in shifts.iter().zip(&cells) {
        let mut off = zero.clone();
        off[axis] = c;
        let sum = still.add(&f.embed(&axes, &off)?)?;
        out.push((a, mixed_norm(&sum, groups, p)? / base));
    }
    Ok(out)
}

/// `h(x) = χ_{|x|<1/2} |x|^{-n/q'} (log 1/|x|)^{-(1+ε)/q'}` on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPower {
    pub n: usize,
    pub q: Exponent,
    pub epsilon: Rational,
    power: f64,
    log_power: f64,
}

impl LogPower {
    /// Value at radius `r = |x|`; infinite at the origin.
    pub fn eval(&self, r: f64) -> f64 {
        if r >= 0.5 {
            return 0.0;
        }
        if r <= 0.0 {
            return f64::INFINITY;
        }
        r.powf(-self.power) * (1.0 / r).ln().powf(-self.log_power)
    }

    /// `n/q'`
    pub fn power(&self) -> f64 {
        self.power
    }

    /// `(1+ε)/q'`
    pub fn log_power(&self) -> f64 {
        self.log_power
    }
}

pub fn logpower_counterexample(n: usize, q: &Exponent, epsilon: &Rational) -> Result<LogPower> {
    if !q.exceeds_one() {
        return Err(Error::DomainError(format!("log-power profile needs q > 1, got {q}")));
    }
    if !epsilon.is_positive() {
        return Err(Error::DomainError(format!("ε must be positive, got {epsilon}")));
    }
    let rq = conjugate(q).reciprocal();
    let power = Rational::from_integer(n.into()) * &rq;
    let log_power = (Rational::from_integer(1.into()) + epsilon) * &rq;
    Ok(LogPower {
        n,
        q: q.clone(),
        epsilon: epsilon.clone(),
        power: power.to_f64().expect("finite"),
        log_power: log_power.to_f64().expect("finite"),
    })
}

/// `ε = (q'/p'_{k_0} − 1)/2`, the choice that keeps `(1+ε)p'_{k_0}/q' < 1`.
pub fn default_epsilon(q: &Exponent, p_k0: &Exponent) -> Result<Rational> {
    let (rq, rp) = (conjugate(q).reciprocal(), conjugate(p_k0).reciprocal());
    if rq.is_zero() {
        return Err(Error::DomainError("q' is infinite".into()));
    }
    // q'/p'_{k0} = (1/p'_{k0}) / (1/q')
    let eps = (rp / rq - Rational::from_integer(1.into())) / Rational::from_integer(2.into());
    if !eps.is_positive() {
        return Err(Error::DomainError(format!("default ε = {eps} is not positive; needs q < p_k0")));
    }
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::grid::Axis;

    fn pv(xs: &[&str]) -> ExponentVector {
        ExponentVector::new(xs.iter().map(|s| s.parse().unwrap()).collect()).unwrap()
    }

    fn unit_box(cells: usize, l: f64) -> GridFunction {
        GridFunction::from_fn(vec![Axis::new(cells, l).unwrap(); 2], |x| {
            x.iter().all(|&v| (0.0..1.0).contains(&v)) as u8 as f64
        })
        .unwrap()
    }

    #[test]
    fn dilation_examples() {
        let f = unit_box(8, 2.0);
        let p = pv(&["2", "2"]);
        let same = dilation_family(&f, &p, 1, &Rational::from_integer(1.into())).unwrap();
        assert_eq!(same, f);
        let two = dilation_family(&f, &p, 1, &Rational::from_integer(2.into())).unwrap();
        assert_eq!(two.values().iter().cloned().fold(0.0, f64::max), 2.0);
        assert_eq!(two.axes()[0].half_width, 1.0);
        let (a, b) = (mixed_norm(&two, &[1, 1], &p).unwrap(), mixed_norm(&f, &[1, 1], &p).unwrap());
        assert!((a - b).abs() <= 4.0 * f64::EPSILON * b, "{a} vs {b}");
        let back = dilation_family(&two, &p, 1, &Rational::new(1.into(), 2.into())).unwrap();
        assert_eq!(back, f);
        assert!(matches!(
            dilation_family(&f, &p, 1, &Rational::zero()),
            Err(Error::IncompatibleGrid(_))
        ));
    }

    #[test]
    fn translation_examples() {
        let f = unit_box(4, 2.0);
        let p = pv(&["2", "3"]);
        let r = translation_limit_probe(&f, &[1, 1], &p, 2, &[0.0, 3.0]).unwrap();
        assert_eq!(r[0].1, 2.0);
        assert!((r[1].1 - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        let r = translation_limit_probe(&f, &[1, 1], &p, 1, &[3.0]).unwrap();
        assert!((r[0].1 - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            translation_limit_probe(&f, &[1, 1], &p, 1, &[0.3]),
            Err(Error::IncompatibleGrid(_))
        ));
    }

    #[test]
    fn logpower_examples() {
        let h = logpower_counterexample(1, &Exponent::int(2), &Rational::new(1.into(), 2.into())).unwrap();
        let expect = 2.0 * 4f64.ln().powf(-0.75);
        assert!((h.eval(0.25) - expect).abs() < 1e-14);
        assert_eq!(h.eval(0.5), 0.0);
        assert_eq!(h.eval(0.7), 0.0);
        assert!(matches!(
            logpower_counterexample(1, &Exponent::one(), &Rational::new(1.into(), 2.into())),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn logpower_norm_converges_to_closed_form() {
        // n = 1, q = 2: ‖h‖_2^2 = 2 ∫_0^{1/2} x^{-1} (log 1/x)^{-(1+ε)} dx = 2 (log 2)^{-ε} / ε
        let eps = Rational::new(1.into(), 2.into());
        let h = logpower_counterexample(1, &Exponent::int(2), &eps).unwrap();
        let exact = (2.0 * 2f64.ln().powf(-0.5) / 0.5).sqrt();
        let mut last = 0.0;
        for k in [10u32, 14, 18] {
            let cells = 1usize << k;
            let g = GridFunction::from_fn(vec![Axis::new(cells, 0.5).unwrap()], |x| h.eval(x[0].abs())).unwrap();
            let norm = mixed_norm(&g, &[1], &pv(&["2"])).unwrap();
            assert!(norm > last && norm < exact, "{norm} vs {exact}");
            last = norm;
        }
        // the log singularity converges slowly; the gap still shrinks
        assert!(exact - last < 0.5 * exact);
    }

    #[test]
    fn default_epsilon_rule() {
        let eps = default_epsilon(&Exponent::int(2), &Exponent::int(4)).unwrap();
        // q' = 2, p' = 4/3: (2 / (4/3) - 1)/2 = 1/4
        assert_eq!(eps, Rational::new(1.into(), 4.into()));
        assert!(default_epsilon(&Exponent::int(4), &Exponent::int(2)).is_err());
    }
}
