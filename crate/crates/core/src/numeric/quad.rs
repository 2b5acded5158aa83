//! Quadrature for the two operators, plus the Gauss-Legendre and Halton
//! building blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::{Axis, GridFunction};
use crate::error::{Error, Result};
use crate::exponents::{Kind, Order};
use crate::ratlinalg::{inverse, BlockMatrix};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k > 0);
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_k and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 1 { x } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let (mut f, mut r) = (inv, 0.0);
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton points with a seeded Cranley-Patterson rotation.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim > PRIMES.len() {
            return Err(Error::ShapeMismatch(format!("Halton sampling supports at most {} axes", PRIMES.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Halton { shift: (0..dim).map(|_| rng.gen::<f64>()).collect() })
    }

    pub fn point_into(&self, i: u64, out: &mut [f64]) {
        for (k, (o, s)) in out.iter_mut().zip(&self.shift).enumerate() {
            *o = (radical_inverse(i + 1, PRIMES[k]) + s).fract();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    Midpoint,
    Halton { samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadratureSettings {
    /// Cells per axis of the integration grid for `T` (rounded up to even);
    /// `None` uses the largest axis count of the input grid.
    pub integration_cells: Option<usize>,
    pub halton_samples: usize,
    pub seed: u64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { integration_cells: None, halton_samples: 1 << 16, seed: 0 }
    }
}

/// Tensor midpoint rule up to this many integration axes; Halton beyond.
pub const MIDPOINT_MAX_DIMS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub output: GridFunction,
    /// Samples skipped because they sat within 1e-12 cell diameters of the
    /// kernel singularity.
    pub dropped: u64,
    pub method: Method,
}

/// Integration nodes: coordinates (flattened, `dim` per node) and weights.
struct Nodes {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

/// Midpoint nodes of `f`'s nonzero cells, or Halton samples of its box.
fn input_nodes(f: &GridFunction, settings: &QuadratureSettings) -> Result<(Nodes, Method)> {
    let d = f.dims();
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut x = vec![0.0; d];
    if d <= MIDPOINT_MAX_DIMS {
        let vol = f.cell_volume();
        for (flat, &v) in f.values().iter().enumerate() {
            if v != 0.0 {
                f.point_into(flat, &mut x);
                coords.extend_from_slice(&x);
                weights.push(v * vol);
            }
        }
        return Ok((Nodes { dim: d, coords, weights }, Method::Midpoint));
    }
    let s = settings.halton_samples.max(1);
    let h = Halton::new(d, settings.seed)?;
    let box_vol: f64 = f.axes().iter().map(|a| 2.0 * a.half_width).product();
    let mut u = vec![0.0; d];
    for i in 0..s as u64 {
        h.point_into(i, &mut u);
        for (k, a) in f.axes().iter().enumerate() {
            x[k] = -a.half_width + 2.0 * a.half_width * u[k];
        }
        let v = f.cell_value(&x);
        if v != 0.0 {
            coords.extend_from_slice(&x);
            weights.push(v * box_vol / s as f64);
        }
    }
    Ok((Nodes { dim: d, coords, weights }, Method::Halton { samples: s }))
}

fn output_points(out: &[Axis]) -> Result<GridFunction> {
    for a in out {
        Axis::new(a.count, a.half_width)?;
    }
    Ok(GridFunction::zeros(out.to_vec()))
}

fn finish(out: GridFunction, results: Vec<(f64, u64)>, method: Method) -> Result<Evaluation> {
    let dropped = results.iter().map(|r| r.1).sum();
    let values = results.into_iter().map(|r| r.0).collect();
    Ok(Evaluation { output: GridFunction::new(out.axes().to_vec(), values)?, dropped, method })
}

/// `J_{λ,D} f` at the midpoints of `out`, with kernel `(Σ_i |D_i x − y_i|_2)^{−λ}`.
#[allow(non_snake_case)]
pub fn eval_J(d: &BlockMatrix, lambda: &Order, f: &GridFunction, out: &[Axis], settings: &QuadratureSettings) -> Result<Evaluation> {
    if d.kind() != Kind::J {
        return Err(Error::ShapeMismatch("eval_J needs a kind-J matrix".into()));
    }
    let (m, n) = (d.m(), d.n());
    if f.dims() != m * n || out.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "J with m={m}, n={n} maps {} input axes to {n} output axes; got {} and {}",
            m * n,
            f.dims(),
            out.len()
        )));
    }
    let dm = d.base().to_f64();
    let lam = lambda.to_f64();
    let guard = 1e-12 * f.cell_diameter();
    let (nodes, method) = input_nodes(f, settings)?;
    let grid = output_points(out)?;
    let results: Vec<(f64, u64)> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut x = vec![0.0; n];
            grid.point_into(flat, &mut x);
            let dx: Vec<f64> = (0..m * n).map(|r| (0..n).map(|c| dm[r * n + c] * x[c]).sum()).collect();
            let (mut sum, mut dropped) = (0.0, 0u64);
            for (y, w) in nodes.coords.chunks(nodes.dim).zip(&nodes.weights) {
                let mut dist = 0.0;
                for i in 0..m {
                    let mut s2 = 0.0;
                    for c in 0..n {
                        let t = dx[i * n + c] - y[i * n + c];
                        s2 += t * t;
                    }
                    dist += s2.sqrt();
                }
                if dist < guard {
                    dropped += 1;
                    continue;
                }
                sum += w * dist.powf(-lam);
            }
            (sum, dropped)
        })
        .collect();
    finish(grid, results, method)
}

/// Half-width of the integration box for `T`: the sup-norm radius of `f`'s
/// support (one cell wider, for interpolation) stretched by `‖A^{-1}‖_∞`, so
/// every `x` with `Ax` in the support is covered.
fn integration_half_width(a: &BlockMatrix, f: &GridFunction) -> Result<f64> {
    let inv = inverse(a.base())?.to_f64();
    let size = a.base().rows();
    let norm = (0..size)
        .map(|r| inv[r * size..(r + 1) * size].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut x = vec![0.0; f.dims()];
    let mut radius = 0.0f64;
    for (flat, v) in f.values().iter().enumerate() {
        if *v != 0.0 {
            f.point_into(flat, &mut x);
            for (xk, ax) in x.iter().zip(f.axes()) {
                radius = radius.max(xk.abs() + ax.step());
            }
        }
    }
    let full = f.axes().iter().map(|ax| ax.half_width).fold(0.0f64, f64::max);
    Ok(radius.min(full).max(f64::MIN_POSITIVE) * norm.max(1.0))
}

/// `T_λ f` at the midpoints of `out`: the `x_1..x_m` integral of
/// `f(Ax) / (Σ|x_i|_2)^λ`, with `f(Ax)` interpolated multilinearly.
#[allow(non_snake_case)]
pub fn eval_T(a: &BlockMatrix, lambda: &Order, f: &GridFunction, out: &[Axis], settings: &QuadratureSettings) -> Result<Evaluation> {
    if a.kind() != Kind::T {
        return Err(Error::ShapeMismatch("eval_T needs a kind-T matrix".into()));
    }
    let (m, n) = (a.m(), a.n());
    let size = (m + 1) * n;
    if f.dims() != size || out.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "T with m={m}, n={n} maps {size} input axes to {n} output axes; got {} and {}",
            f.dims(),
            out.len()
        )));
    }
    let am = a.base().to_f64();
    let lam = lambda.to_f64();
    let li = integration_half_width(a, f)?;
    let di = m * n;
    let cells = settings
        .integration_cells
        .unwrap_or_else(|| f.axes().iter().map(|ax| ax.count).max().unwrap_or(2));
    let cells = cells + cells % 2;
    let int_axes = vec![Axis::new(cells, li)?; di];
    let probe = GridFunction::zeros(int_axes.clone());
    let guard = 1e-12 * probe.cell_diameter();

    // Nodes carry the kernel weight and their image A(x, 0).
    let mut images = Vec::new();
    let mut weights = Vec::new();
    let mut dropped = 0u64;
    let mut push = |x: &[f64], w: f64, dropped: &mut u64| {
        let r: f64 = x.chunks(n).map(|b| b.iter().map(|t| t * t).sum::<f64>().sqrt()).sum();
        if r < guard {
            *dropped += 1;
            return;
        }
        images.extend((0..size).map(|row| (0..di).map(|c| am[row * size + c] * x[c]).sum::<f64>()));
        weights.push(w * r.powf(-lam));
    };
    let method = if di <= MIDPOINT_MAX_DIMS {
        let vol = probe.cell_volume();
        let mut x = vec![0.0; di];
        for flat in 0..probe.len() {
            probe.point_into(flat, &mut x);
            push(&x, vol, &mut dropped);
        }
        Method::Midpoint
    } else {
        let s = settings.halton_samples.max(1);
        let h = Halton::new(di, settings.seed)?;
        let w = (2.0 * li).powi(di as i32) / s as f64;
        let (mut u, mut x) = (vec![0.0; di], vec![0.0; di]);
        for i in 0..s as u64 {
            h.point_into(i, &mut u);
            for k in 0..di {
                x[k] = -li + 2.0 * li * u[k];
            }
            push(&x, w, &mut dropped);
        }
        Method::Halton { samples: s }
    };

    let grid = output_points(out)?;
    let results: Vec<(f64, u64)> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut xo = vec![0.0; n];
            grid.point_into(flat, &mut xo);
            let shift: Vec<f64> =
                (0..size).map(|row| (0..n).map(|c| am[row * size + di + c] * xo[c]).sum()).collect();
            let mut z = vec![0.0; size];
            let mut sum = 0.0;
            for (img, w) in images.chunks(size).zip(&weights) {
                for k in 0..size {
                    z[k] = img[k] + shift[k];
                }
                let v = f.interpolate(&z);
                if v != 0.0 {
                    sum += w * v;
                }
            }
            (sum, 0)
        })
        .collect();
    let mut ev = finish(grid, results, method)?;
    ev.dropped = dropped;
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::RatMatrix;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for k in 1..=20 {
            let (x, w) = gauss_legendre(k);
            for deg in 0..2 * k {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "k={k} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn halton_base_two_is_van_der_corput() {
        let got: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125]);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
        let h = Halton::new(2, 9).unwrap();
        let mut p = [0.0; 2];
        h.point_into(3, &mut p);
        assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
    }

    fn box1(n_cells: usize, l: f64, lo: f64, hi: f64, dims: usize) -> GridFunction {
        GridFunction::from_fn(vec![Axis::new(n_cells, l).unwrap(); dims], |x| {
            x.iter().all(|&v| v > lo && v < hi) as u8 as f64
        })
        .unwrap()
    }

    #[test]
    fn riesz_of_interval_at_origin() {
        // ∫_{-1}^{1} |y|^{-1/2} dy = 4
        let d = BlockMatrix::j(1, 1, RatMatrix::identity(1)).unwrap();
        let f = box1(2048, 1.0, -1.0, 1.0, 1);
        let out = [Axis::new(2048, 1.0).unwrap().staggered()];
        let ev = eval_J(&d, &Order::ratio(1, 2), &f, &out, &QuadratureSettings::default()).unwrap();
        let centre = ev.output.values()[1024];
        assert_eq!(ev.output.axes()[0].midpoint(1024), 0.0);
        assert!((centre - 4.0).abs() / 4.0 < 0.01, "{centre}");
        assert_eq!(ev.dropped, 0);
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let d = BlockMatrix::j(2, 1, RatMatrix::from_i64(&[&[1], &[1]])).unwrap();
        let f = GridFunction::zeros(vec![Axis::new(16, 1.0).unwrap(); 2]);
        let ev = eval_J(&d, &Order::ratio(5, 4), &f, &[Axis::new(17, 1.0).unwrap()], &QuadratureSettings::default())
            .unwrap();
        assert!(ev.output.is_zero());
        let a = BlockMatrix::t(1, 1, RatMatrix::from_i64(&[&[1, -1], &[1, 1]])).unwrap();
        let ev = eval_T(&a, &Order::ratio(1, 2), &f, &[Axis::new(9, 1.0).unwrap()], &QuadratureSettings::default())
            .unwrap();
        assert!(ev.output.is_zero());
    }

    #[test]
    fn t_bilinear_at_origin() {
        // f = χ(u)χ(v) on [-1,1]^2; Ax at x2 = 0 is (x1, x1), so Tf(0) = ∫_{-1}^{1}|t|^{-λ} = 2/(1-λ)
        let a = BlockMatrix::t(1, 1, RatMatrix::from_i64(&[&[1, -1], &[1, 1]])).unwrap();
        let f = box1(256, 2.0, -1.0, 1.0, 2);
        let settings = QuadratureSettings { integration_cells: Some(16384), ..Default::default() };
        let ev = eval_T(&a, &Order::ratio(1, 2), &f, &[Axis::new(3, 1.0).unwrap()], &settings).unwrap();
        let got = ev.output.values()[1];
        assert!((got - 4.0).abs() / 4.0 < 0.01, "{got}");
    }

    #[test]
    fn t_separable_factorizes() {
        // A = I: Tf(x2) = h(x2) ∫ g(y1)|y1|^{-1/2} dy1 with g = χ[-1,1], h = χ[-1/2,1/2]
        let a = BlockMatrix::t(1, 1, RatMatrix::identity(2)).unwrap();
        let f = GridFunction::from_fn(vec![Axis::new(512, 2.0).unwrap(); 2], |x| {
            ((x[0].abs() < 1.0) && (x[1].abs() < 0.5)) as u8 as f64
        })
        .unwrap();
        let settings = QuadratureSettings { integration_cells: Some(16384), ..Default::default() };
        let out = [Axis::new(8, 1.0).unwrap()];
        let ev = eval_T(&a, &Order::ratio(1, 2), &f, &out, &settings).unwrap();
        for (i, &v) in ev.output.values().iter().enumerate() {
            let x = out[0].midpoint(i);
            let expect = if x.abs() < 0.5 { 4.0 } else { 0.0 };
            assert!((v - expect).abs() <= 0.01 * 4.0, "x={x}: {v} vs {expect}");
        }
    }

    #[test]
    fn identity_stack_output_is_reflection_symmetric() {
        let d = BlockMatrix::j(2, 1, RatMatrix::from_i64(&[&[1], &[1]])).unwrap();
        let f = GridFunction::from_fn(vec![Axis::new(32, 1.0).unwrap(); 2], |y| (-(y[0] * y[0] + y[1] * y[1])).exp())
            .unwrap();
        let out = [Axis::new(32, 1.0).unwrap().staggered()];
        let ev = eval_J(&d, &Order::ratio(5, 4), &f, &out, &QuadratureSettings::default()).unwrap();
        let v = ev.output.values();
        for i in 0..v.len() {
            let j = v.len() - 1 - i;
            assert!((v[i] - v[j]).abs() <= 1e-12 * v[i].abs().max(v[j].abs()), "{i}");
        }
    }

    #[test]
    fn halton_path_is_deterministic_and_close_to_midpoint() {
        // mn = 4 forces Halton; compare with a separable closed form.
        let d = BlockMatrix::j(4, 1, RatMatrix::from_i64(&[&[1], &[1], &[1], &[1]])).unwrap();
        let f = GridFunction::from_fn(vec![Axis::new(8, 1.0).unwrap(); 4], |_| 1.0).unwrap();
        let out = [Axis::new(3, 3.0).unwrap()];
        let s = QuadratureSettings { halton_samples: 1 << 14, seed: 4, ..Default::default() };
        let a = eval_J(&d, &Order::ratio(1, 1), &f, &out, &s).unwrap();
        let b = eval_J(&d, &Order::ratio(1, 1), &f, &out, &s).unwrap();
        assert_eq!(a, b);
        assert!(matches!(a.method, Method::Halton { samples: 16384 }));
        // at x = 2 every |x - y_i| lies in [1, 3]; the integral of 1/Σ|x-y_i| over [-1,1]^4
        let v = a.output.values()[2];
        assert!(v > 16.0 / 12.0 && v < 16.0 / 4.0, "{v}");
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let d = BlockMatrix::j(2, 1, RatMatrix::from_i64(&[&[1], &[1]])).unwrap();
        let f = GridFunction::zeros(vec![Axis::new(4, 1.0).unwrap()]);
        assert!(matches!(
            eval_J(&d, &Order::ratio(1, 2), &f, &[Axis::new(4, 1.0).unwrap()], &QuadratureSettings::default()),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
