//! Tensor-product multivariate Bernstein polynomials and vector-valued
//! polynomials (Bézier maps).
//!
//! Coefficients are stored lexicographically with the **last index fastest**:
//! for degrees `(p_1, ..., p_m)` the flat position of multi-index
//! `(i_1, ..., i_m)` is `i_1 * prod_{j>1}(p_j+1) + ... + i_m`. All IO uses
//! this order.
//!
//! Univariate operations (derivative, antiderivative, degree raising) apply
//! along one parametric direction at a time; the multivariate product is a
//! nest of univariate weighted convolutions.

use alloc::vec;
use alloc::vec::Vec;

use crate::bernstein::{self, Poly1};

/// An `m`-variate tensor-product polynomial in Bernstein form, `m <= 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyN {
    degrees: Vec<usize>,
    coeffs: Vec<f64>,
}

fn shape_len(degrees: &[usize]) -> usize {
    degrees.iter().map(|p| p + 1).product()
}

impl PolyN {
    /// Wraps coefficients for the given per-axis degrees. Panics if the
    /// arity is not 1..=3 or the coefficient count does not match.
    pub fn new(degrees: Vec<usize>, coeffs: Vec<f64>) -> Self {
        assert!(
            (1..=3).contains(&degrees.len()),
            "PolyN arity must be 1, 2 or 3"
        );
        assert_eq!(
            coeffs.len(),
            shape_len(&degrees),
            "coefficient count does not match degrees"
        );
        assert!(
            coeffs.iter().all(|c| c.is_finite()),
            "PolyN coefficients must be finite"
        );
        PolyN { degrees, coeffs }
    }

    pub fn constant(arity: usize, value: f64) -> Self {
        PolyN::new(vec![0; arity], vec![value])
    }

    pub fn zero(degrees: Vec<usize>) -> Self {
        let len = shape_len(&degrees);
        assert!((1..=3).contains(&degrees.len()));
        PolyN {
            degrees,
            coeffs: vec![0.0; len],
        }
    }

    /// The coordinate polynomial `t_axis` (degree 1 along `axis`, 0 elsewhere).
    pub fn coordinate(arity: usize, axis: usize) -> Self {
        assert!(axis < arity);
        let mut degrees = vec![0; arity];
        degrees[axis] = 1;
        PolyN::new(degrees, vec![0.0, 1.0])
    }

    /// The monomial `prod_k t_k^{e_k}` at the minimal representation degree:
    /// `t^e` has a single unit Bernstein coefficient at the last index.
    pub fn monomial(arity: usize, exponents: &[usize]) -> Self {
        assert_eq!(exponents.len(), arity);
        let degrees = exponents.to_vec();
        let len = shape_len(&degrees);
        let mut coeffs = vec![0.0; len];
        coeffs[len - 1] = 1.0;
        PolyN::new(degrees, coeffs)
    }

    pub fn from_poly1(p: &Poly1) -> Self {
        PolyN::new(vec![p.degree()], p.coeffs().to_vec())
    }

    /// View an arity-1 polynomial as a univariate one.
    pub fn to_poly1(&self) -> Poly1 {
        assert_eq!(self.arity(), 1, "to_poly1 requires arity 1");
        Poly1::new(self.coeffs.clone())
    }

    pub fn arity(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, factor: f64) -> PolyN {
        PolyN {
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Affine transform of the function values, `a * h + b`.
    pub fn affine_values(&self, a: f64, b: f64) -> PolyN {
        PolyN {
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|c| a * c + b).collect(),
        }
    }

    fn stride(&self, axis: usize) -> usize {
        self.degrees[axis + 1..].iter().map(|p| p + 1).product()
    }

    /// Applies a univariate coefficient transform along one axis.
    fn map_axis(&self, axis: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> PolyN {
        assert!(axis < self.arity(), "axis {axis} out of range");
        let n = self.degrees[axis] + 1;
        let stride = self.stride(axis);
        let outer = self.coeffs.len() / (n * stride);

        let mut line = vec![0.0; n];
        let mut new_degrees = self.degrees.clone();
        let mut out: Vec<f64> = Vec::new();
        let mut new_n = 0;

        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                for k in 0..n {
                    line[k] = self.coeffs[base + k * stride];
                }
                let mapped = f(&line);
                if out.is_empty() {
                    new_n = mapped.len();
                    new_degrees[axis] = new_n - 1;
                    out = vec![0.0; outer * new_n * stride];
                }
                let new_base = o * new_n * stride + s;
                for (k, v) in mapped.iter().enumerate() {
                    out[new_base + k * stride] = *v;
                }
            }
        }
        PolyN {
            degrees: new_degrees,
            coeffs: out,
        }
    }

    /// Partial derivative along `dir`; a constant direction yields the zero
    /// polynomial of degree 0 along that axis.
    pub fn partial_derivative(&self, dir: usize) -> PolyN {
        self.map_axis(dir, bernstein::derivative_slice)
    }

    /// Partial antiderivative along `dir`: the result `H` satisfies
    /// `H = scale * int_0^{t_dir} self + constant` and
    /// `partial_derivative(H, dir) = scale * self`.
    pub fn partial_antiderivative(&self, dir: usize, scale: f64, constant: f64) -> PolyN {
        self.map_axis(dir, |line| {
            bernstein::antiderivative_slice(line, scale, constant)
        })
    }

    /// Raises the representation degree along each axis to `targets`.
    pub fn degree_raise(&self, targets: &[usize]) -> PolyN {
        assert_eq!(targets.len(), self.arity());
        let mut out = self.clone();
        for (axis, &t) in targets.iter().enumerate() {
            if t > out.degrees[axis] {
                out = out.map_axis(axis, |line| bernstein::raise_slice(line, t));
            } else {
                assert_eq!(t, out.degrees[axis], "degree_raise below current degree");
            }
        }
        out
    }

    /// Exact integral over the unit hypercube: coefficient average.
    pub fn integral_unit_hypercube(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().sum();
        sum / self.coeffs.len() as f64
    }

    /// Sum at the per-axis maximum degrees.
    pub fn add(&self, other: &PolyN) -> PolyN {
        self.add_scaled(other, 1.0)
    }

    pub fn sub(&self, other: &PolyN) -> PolyN {
        self.add_scaled(other, -1.0)
    }

    pub fn add_scaled(&self, other: &PolyN, factor: f64) -> PolyN {
        assert_eq!(self.arity(), other.arity(), "arity mismatch in add");
        let targets: Vec<usize> = self
            .degrees
            .iter()
            .zip(other.degrees.iter())
            .map(|(a, b)| *a.max(b))
            .collect();
        let mut a = self.degree_raise(&targets);
        let b = other.degree_raise(&targets);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += factor * y;
        }
        a
    }

    /// Product; degrees add per axis. Implemented as nested univariate
    /// weighted convolutions.
    pub fn multiply(&self, other: &PolyN) -> PolyN {
        assert_eq!(self.arity(), other.arity(), "arity mismatch in multiply");
        let degrees: Vec<usize> = self
            .degrees
            .iter()
            .zip(other.degrees.iter())
            .map(|(a, b)| a + b)
            .collect();
        let mut out = vec![0.0; shape_len(&degrees)];
        multiply_acc(
            &self.coeffs,
            &self.degrees,
            &other.coeffs,
            &other.degrees,
            &mut out,
            1.0,
        );
        PolyN {
            degrees,
            coeffs: out,
        }
    }

    /// Tensor de Casteljau evaluation at `point` (length = arity).
    pub fn eval(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.arity(), "point length mismatch");
        let mut coeffs = self.coeffs.clone();
        // collapse the last axis repeatedly; its lines are contiguous
        for axis in (0..self.arity()).rev() {
            let n = self.degrees[axis] + 1;
            coeffs = collapse_last(&coeffs, n, point[axis]);
        }
        coeffs[0]
    }

    /// Evaluates the partial derivative along `axis` at `point` without
    /// forming the derivative polynomial (evaluation-only path).
    pub fn eval_partial(&self, point: &[f64], axis: usize) -> f64 {
        assert_eq!(point.len(), self.arity());
        assert!(axis < self.arity());
        let mut coeffs = self.coeffs.clone();
        let mut shape: Vec<usize> = self.degrees.iter().map(|p| p + 1).collect();
        for ax in (0..self.arity()).rev() {
            if ax == axis {
                continue;
            }
            coeffs = collapse_axis(&coeffs, &shape, ax, point[ax]);
            shape.remove(ax);
        }
        let line = bernstein::derivative_slice(&coeffs);
        bernstein::eval_slice(&line, point[axis])
    }
}

fn collapse_last(coeffs: &[f64], n: usize, t: f64) -> Vec<f64> {
    let s = 1.0 - t;
    let chunks = coeffs.len() / n;
    let mut out = Vec::with_capacity(chunks);
    let mut b = vec![0.0; n];
    for c in 0..chunks {
        b.copy_from_slice(&coeffs[c * n..(c + 1) * n]);
        for j in 1..n {
            for k in 0..n - j {
                b[k] = s * b[k] + t * b[k + 1];
            }
        }
        out.push(b[0]);
    }
    out
}

/// Collapses `axis` of an array with the given shape by de Casteljau at `t`.
fn collapse_axis(coeffs: &[f64], shape: &[usize], axis: usize, t: f64) -> Vec<f64> {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer = coeffs.len() / (n * stride);
    let s = 1.0 - t;
    let mut out = Vec::with_capacity(outer * stride);
    let mut b = vec![0.0; n];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * n * stride + inner;
            for k in 0..n {
                b[k] = coeffs[base + k * stride];
            }
            for j in 1..n {
                for k in 0..n - j {
                    b[k] = s * b[k] + t * b[k + 1];
                }
            }
            out.push(b[0]);
        }
    }
    out
}

/// Accumulates `scale * f * g` into `out`, recursing axis by axis.
fn multiply_acc(
    f: &[f64],
    fdeg: &[usize],
    g: &[f64],
    gdeg: &[usize],
    out: &mut [f64],
    scale: f64,
) {
    if fdeg.is_empty() {
        out[0] += scale * f[0] * g[0];
        return;
    }
    let p = fdeg[0];
    let q = gdeg[0];
    let fstride: usize = fdeg[1..].iter().map(|d| d + 1).product();
    let gstride: usize = gdeg[1..].iter().map(|d| d + 1).product();
    let ostride: usize = fdeg[1..]
        .iter()
        .zip(gdeg[1..].iter())
        .map(|(a, b)| a + b + 1)
        .product();
    let mut weights = Vec::new();
    for i in 0..=(p + q) {
        bernstein::product_weights(p, q, i, &mut weights);
        let j_min = i.saturating_sub(q);
        let out_block = &mut out[i * ostride..(i + 1) * ostride];
        for (off, w) in weights.iter().enumerate() {
            let j = j_min + off;
            multiply_acc(
                &f[j * fstride..(j + 1) * fstride],
                &fdeg[1..],
                &g[(i - j) * gstride..(i - j + 1) * gstride],
                &gdeg[1..],
                out_block,
                scale * w,
            );
        }
    }
}

/// A vector-valued polynomial: `d` scalar components sharing one arity.
/// Component degrees may differ (antiderivative fields mix degrees per axis).
#[derive(Debug, Clone, PartialEq)]
pub struct VecPoly {
    components: Vec<PolyN>,
}

impl VecPoly {
    pub fn new(components: Vec<PolyN>) -> Self {
        assert!(!components.is_empty(), "VecPoly needs components");
        let arity = components[0].arity();
        assert!(
            components.iter().all(|c| c.arity() == arity),
            "VecPoly components must share arity"
        );
        VecPoly { components }
    }

    pub fn arity(&self) -> usize {
        self.components[0].arity()
    }

    /// Number of components (the target-space dimension).
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PolyN] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &PolyN {
        &self.components[k]
    }

    pub fn eval(&self, point: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    /// Componentwise partial derivative.
    pub fn partial_derivative(&self, dir: usize) -> VecPoly {
        VecPoly::new(
            self.components
                .iter()
                .map(|c| c.partial_derivative(dir))
                .collect(),
        )
    }

    /// Scalar product of two fields with the same component count.
    pub fn dot(&self, other: &VecPoly) -> PolyN {
        assert_eq!(self.dim(), other.dim(), "dot: component count mismatch");
        assert_eq!(self.arity(), other.arity(), "dot: arity mismatch");
        let mut acc: Option<PolyN> = None;
        for (u, v) in self.components.iter().zip(other.components.iter()) {
            let term = u.multiply(v);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.unwrap()
    }

    /// Cross product of two 3-component fields.
    pub fn cross(&self, other: &VecPoly) -> VecPoly {
        assert_eq!(self.dim(), 3, "cross needs 3 components");
        assert_eq!(other.dim(), 3, "cross needs 3 components");
        let u = &self.components;
        let v = &other.components;
        let comp = |a: usize, b: usize| u[a].multiply(&v[b]).sub(&u[b].multiply(&v[a]));
        VecPoly::new(vec![comp(1, 2), comp(2, 0), comp(0, 1)])
    }

    /// For a 2-component field `u`, the rotation `u x e3 = (u_2, -u_1)`.
    pub fn cross_with_e3(&self) -> VecPoly {
        assert_eq!(self.dim(), 2, "cross_with_e3 needs 2 components");
        VecPoly::new(vec![
            self.components[1].clone(),
            self.components[0].scale(-1.0),
        ])
    }

    /// Composition `self(G(t))` where `G` supplies one scalar polynomial per
    /// variable of `self`. The result has `G`'s arity and per-axis degrees
    /// `sum_k p_k * deg_axis(G_k)`.
    pub fn compose(&self, g: &VecPoly) -> VecPoly {
        let s = self.arity();
        assert_eq!(
            g.dim(),
            s,
            "compose: inner map must have one component per outer variable"
        );
        // shared power chains of G_k and 1 - G_k up to the maximum degree
        // requested along axis k by any component of self
        let mut max_deg = vec![0usize; s];
        for c in &self.components {
            for (k, d) in c.degrees().iter().enumerate() {
                max_deg[k] = max_deg[k].max(*d);
            }
        }
        let m = g.arity();
        let mut g_pow: Vec<Vec<PolyN>> = Vec::with_capacity(s);
        let mut omg_pow: Vec<Vec<PolyN>> = Vec::with_capacity(s);
        for k in 0..s {
            let gk = &g.components[k];
            let one = PolyN::constant(m, 1.0);
            let omg = one.sub(gk);
            let mut gp = vec![PolyN::constant(m, 1.0)];
            let mut op = vec![PolyN::constant(m, 1.0)];
            for i in 1..=max_deg[k] {
                gp.push(gp[i - 1].multiply(gk));
                op.push(op[i - 1].multiply(&omg));
            }
            g_pow.push(gp);
            omg_pow.push(op);
        }

        let out = self
            .components
            .iter()
            .map(|f| compose_scalar(f, &g_pow, &omg_pow))
            .collect();
        VecPoly::new(out)
    }
}

/// Composition of one scalar component against precomputed power chains:
/// builds the per-axis lists `B_i^{p_k}(G_k)` and contracts the coefficient
/// tensor axis by axis, last axis first (scalar combinations), with one
/// polynomial product per earlier-axis term.
fn compose_scalar(f: &PolyN, g_pow: &[Vec<PolyN>], omg_pow: &[Vec<PolyN>]) -> PolyN {
    let s = f.arity();
    let m = g_pow[0][0].arity();
    let mut basis: Vec<Vec<PolyN>> = Vec::with_capacity(s);
    for k in 0..s {
        let p = f.degrees()[k];
        let binom = bernstein::pascal_row(p);
        let list: Vec<PolyN> = (0..=p)
            .map(|i| g_pow[k][i].multiply(&omg_pow[k][p - i]).scale(binom[i]))
            .collect();
        basis.push(list);
    }
    // contract: start from scalar coefficients, fold the last axis in as
    // scalar-weighted sums, then one polynomial product per earlier term
    let mut table: Vec<PolyN> = f
        .coeffs()
        .iter()
        .map(|c| PolyN::constant(m, *c))
        .collect();
    for axis in (0..s).rev() {
        let n = f.degrees()[axis] + 1;
        let chunk = table.len() / n;
        let mut next: Vec<Option<PolyN>> = Vec::new();
        next.resize_with(chunk, || None);
        for (pos, entry) in table.iter().enumerate() {
            let i = pos % n;
            let dest = pos / n;
            let term = basis[axis][i].multiply(entry);
            next[dest] = Some(match next[dest].take() {
                None => term,
                Some(acc) => acc.add(&term),
            });
        }
        table = next.into_iter().map(|o| o.unwrap()).collect();
    }
    table.into_iter().next().unwrap()
}
