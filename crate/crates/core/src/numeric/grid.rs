//! Cell-centred tensor grids and nested mixed norms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{Exponent, ExponentVector};

/// One axis: `count` cells of equal width covering `[-half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub count: usize,
    pub half_width: f64,
}

impl Axis {
    pub fn new(count: usize, half_width: f64) -> Result<Self> {
        if count == 0 || !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::ShapeMismatch(format!("bad axis: {count} cells, half-width {half_width}")));
        }
        Ok(Axis { count, half_width })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.count as f64
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.step()
    }

    pub fn scaled(&self, s: f64) -> Axis {
        Axis { count: self.count, half_width: self.half_width * s }
    }

    /// Same step, `cells` extra cells on each side.
    pub fn padded(&self, cells: usize) -> Axis {
        Axis { count: self.count + 2 * cells, half_width: self.half_width + cells as f64 * self.step() }
    }

    /// Output axis whose midpoints are exactly this axis's cell boundaries,
    /// so they never coincide with its midpoints.
    pub fn staggered(&self) -> Axis {
        Axis { count: self.count + 1, half_width: self.half_width + 0.5 * self.step() }
    }

    /// Index of the cell containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let t = (x + self.half_width) / self.step();
        if t < 0.0 || !t.is_finite() {
            return None;
        }
        let i = t.floor() as usize;
        (i < self.count).then_some(i)
    }
}

/// Nonnegative samples on the midpoints of a tensor grid. The first axis
/// varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    axes: Vec<Axis>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Axis>, values: Vec<f64>) -> Result<Self> {
        let len: usize = axes.iter().map(|a| a.count).product();
        if axes.is_empty() || values.len() != len {
            return Err(Error::ShapeMismatch(format!("{} values for a grid of {len} cells", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::ShapeMismatch(format!("grid values must be finite and nonnegative, got {v}")));
        }
        Ok(GridFunction { axes, values })
    }

    pub fn zeros(axes: Vec<Axis>) -> Self {
        let len = axes.iter().map(|a| a.count).product();
        GridFunction { axes, values: vec![0.0; len] }
    }

    /// Samples `f` at every midpoint.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let len: usize = axes.iter().map(|a| a.count).product();
        let mut values = Vec::with_capacity(len);
        let mut x = vec![0.0; axes.len()];
        for flat in 0..len {
            let mut r = flat;
            for (k, a) in axes.iter().enumerate() {
                x[k] = a.midpoint(r % a.count);
                r /= a.count;
            }
            values.push(f(&x));
        }
        GridFunction::new(axes, values)
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::step).product()
    }

    pub fn cell_diameter(&self) -> f64 {
        self.axes.iter().map(|a| a.step() * a.step()).sum::<f64>().sqrt()
    }

    /// Midpoint of the cell with flat index `flat`, written into `x`.
    pub fn point_into(&self, flat: usize, x: &mut [f64]) {
        let mut r = flat;
        for (k, a) in self.axes.iter().enumerate() {
            x[k] = a.midpoint(r % a.count);
            r /= a.count;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        let mut stride = 1;
        for (a, &i) in self.axes.iter().zip(idx) {
            flat += i * stride;
            stride *= a.count;
        }
        flat
    }

    /// Piecewise-constant value at `z`; zero outside the grid.
    pub fn cell_value(&self, z: &[f64]) -> f64 {
        let mut flat = 0;
        let mut stride = 1;
        for (a, &x) in self.axes.iter().zip(z) {
            match a.locate(x) {
                Some(i) => flat += i * stride,
                None => return 0.0,
            }
            stride *= a.count;
        }
        self.values[flat]
    }

    /// Multilinear interpolation between midpoints, with zero extension
    /// outside the grid.
    pub fn interpolate(&self, z: &[f64]) -> f64 {
        let d = self.axes.len();
        let mut base = [0isize; 16];
        let mut frac = [0.0f64; 16];
        assert!(d <= 16, "interpolation supports at most 16 axes");
        for (k, (a, &x)) in self.axes.iter().zip(z).enumerate() {
            let t = (x + a.half_width) / a.step() - 0.5;
            if !(t > -1.0 && t < a.count as f64) {
                return 0.0;
            }
            let i0 = t.floor();
            base[k] = i0 as isize;
            frac[k] = t - i0;
        }
        let mut total = 0.0;
        'corner: for corner in 0..(1usize << d) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            let mut stride = 1usize;
            for k in 0..d {
                let up = (corner >> k) & 1 == 1;
                let i = base[k] + up as isize;
                if i < 0 || i >= self.axes[k].count as isize {
                    continue 'corner;
                }
                weight *= if up { frac[k] } else { 1.0 - frac[k] };
                flat += i as usize * stride;
                stride *= self.axes[k].count;
            }
            if weight != 0.0 {
                total += weight * self.values[flat];
            }
        }
        total
    }

    pub fn scale_values(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// Re-centre onto `axes`, which must contain this grid with identical steps
    /// and be shifted by `offset` whole cells per axis (positive moves the
    /// function toward larger coordinates).
    pub fn embed(&self, axes: &[Axis], offset: &[isize]) -> Result<GridFunction> {
        if axes.len() != self.dims() || offset.len() != self.dims() {
            return Err(Error::ShapeMismatch("embedding dimension mismatch".into()));
        }
        let mut start = Vec::with_capacity(axes.len());
        for ((src, dst), &o) in self.axes.iter().zip(axes).zip(offset) {
            let rel = (src.step() - dst.step()).abs() / src.step();
            let lead = (dst.half_width - src.half_width) / dst.step();
            if rel > 1e-12 || (lead - lead.round()).abs() > 1e-9 {
                return Err(Error::IncompatibleGrid("target grid is not aligned with the source".into()));
            }
            let s = lead.round() as isize + o;
            if s < 0 || s as usize + src.count > dst.count {
                return Err(Error::IncompatibleGrid("shifted function leaves the target grid".into()));
            }
            start.push(s as usize);
        }
        let mut out = GridFunction::zeros(axes.to_vec());
        let mut idx = vec![0usize; self.dims()];
        for (flat, &v) in self.values.iter().enumerate() {
            let mut r = flat;
            for (k, a) in self.axes.iter().enumerate() {
                idx[k] = r % a.count + start[k];
                r /= a.count;
            }
            let j = out.flat_index(&idx);
            out.values[j] = v;
        }
        Ok(out)
    }

    /// Pointwise sum on identical grids.
    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.axes != other.axes {
            return Err(Error::ShapeMismatch("adding functions on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(GridFunction { axes: self.axes.clone(), values })
    }
}

fn validate_groups(f: &GridFunction, groups: &[usize], p: &ExponentVector) -> Result<()> {
    if groups.iter().sum::<usize>() != f.dims() || groups.contains(&0) {
        return Err(Error::ShapeMismatch(format!(
            "group sizes {groups:?} do not partition {} axes",
            f.dims()
        )));
    }
    if groups.len() != p.len() {
        return Err(Error::ShapeMismatch(format!("{} groups but {} exponents", groups.len(), p.len())));
    }
    Ok(())
}

/// `(Σ |v|^p · vol)^{1/p}` or the max for `p = ∞`, scaled by the chunk max
/// to stay clear of overflow.
fn chunk_norm(chunk: &[f64], p: &Exponent, vol: f64) -> f64 {
    let top = chunk.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if p.is_infinite() || top == 0.0 {
        return top;
    }
    let pf = p.to_f64();
    let s: f64 = chunk.iter().map(|&v| (v.abs() / top).powf(pf)).sum();
    top * (s * vol).powf(1.0 / pf)
}

/// Reorders axes so that new axis `k` is old axis `perm[k]`.
fn permute_axes(f: &GridFunction, perm: &[usize]) -> Vec<f64> {
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return f.values.clone();
    }
    let mut old_stride = vec![1usize; f.dims()];
    for k in 1..f.dims() {
        old_stride[k] = old_stride[k - 1] * f.axes[k - 1].count;
    }
    let counts: Vec<usize> = perm.iter().map(|&p| f.axes[p].count).collect();
    let strides: Vec<usize> = perm.iter().map(|&p| old_stride[p]).collect();
    let mut out = Vec::with_capacity(f.len());
    let mut idx = vec![0usize; f.dims()];
    for _ in 0..f.len() {
        let off: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
        out.push(f.values[off]);
        for k in 0..idx.len() {
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

/// Nested norm integrating the groups in `order`, innermost first.
pub fn nested_norm(f: &GridFunction, groups: &[usize], p: &ExponentVector, order: &[usize]) -> Result<f64> {
    validate_groups(f, groups, p)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..groups.len()).collect::<Vec<_>>() {
        return Err(Error::ShapeMismatch(format!("{order:?} is not an ordering of the groups")));
    }
    let mut starts = vec![0usize; groups.len()];
    for g in 1..groups.len() {
        starts[g] = starts[g - 1] + groups[g - 1];
    }
    let perm: Vec<usize> = order.iter().flat_map(|&g| starts[g]..starts[g] + groups[g]).collect();
    let mut cur = permute_axes(f, &perm);
    for &g in order {
        let axes = &f.axes[starts[g]..starts[g] + groups[g]];
        let chunk: usize = axes.iter().map(|a| a.count).product();
        let vol: f64 = axes.iter().map(Axis::step).product();
        let pg = p.get(g + 1);
        cur = cur.chunks(chunk).map(|c| chunk_norm(c, pg, vol)).collect();
    }
    debug_assert_eq!(cur.len(), 1);
    Ok(cur[0])
}

/// `‖f‖_{L^{p⃗}}` with group 1 innermost.
pub fn mixed_norm(f: &GridFunction, groups: &[usize], p: &ExponentVector) -> Result<f64> {
    let order: Vec<usize> = (0..groups.len()).collect();
    nested_norm(f, groups, p, &order)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinkowskiCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares the norm with groups `i`, `i+1` (1-based) integrated in swapped
/// order against the standard mixed norm. Needs `p_i ≥ p_{i+1}`.
pub fn minkowski_swap_check(f: &GridFunction, groups: &[usize], p: &ExponentVector, i: usize) -> Result<MinkowskiCheck> {
    validate_groups(f, groups, p)?;
    if i == 0 || i >= groups.len() {
        return Err(Error::IndexOutOfRange(format!("swap index {i} with {} groups", groups.len())));
    }
    if p.get(i) < p.get(i + 1) {
        return Err(Error::PreconditionViolated(format!(
            "swap needs p_{i} = {} ≥ p_{} = {}",
            p.get(i),
            i + 1,
            p.get(i + 1)
        )));
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.swap(i - 1, i);
    let lhs = nested_norm(f, groups, p, &order)?;
    let rhs = mixed_norm(f, groups, p)?;
    Ok(MinkowskiCheck { lhs, rhs, holds: lhs <= rhs + 1e-12 * rhs })
}
