//! Univariate polynomials in Bernstein form.
//!
//! A polynomial of degree `p` is stored as the `p + 1` coefficients
//! multiplying the Bernstein basis `B_i^p(t) = C(p,i) t^i (1-t)^(p-i)` on
//! `[0,1]`. All operations work directly on coefficients; in particular the
//! unit-interval integral is the plain coefficient average, so no point
//! evaluations are needed anywhere in the integration pipeline.
//!
//! Binomial weights are never formed from factorials: products of binomial
//! ratios are accumulated as running products of small rational factors,
//! which stays finite and accurate for degrees well beyond 1000.

use alloc::vec;
use alloc::vec::Vec;

/// Row `n` of Pascal's triangle, `C(n, 0..=n)`, in floating point.
///
/// Exact for all entries below 2^53 (n <= 56 for the central ones); above
/// that the relative error stays at a few ulps. Callers that need ratios of
/// binomials for high degrees should use [`product_weight_row`] instead.
pub fn pascal_row(n: usize) -> Vec<f64> {
    let mut row = vec![0.0; n + 1];
    row[0] = 1.0;
    for i in 1..=n {
        row[i] = row[i - 1] * ((n + 1 - i) as f64) / (i as f64);
    }
    row
}

/// Weights `C(p,j) C(q,i-j) / C(p+q,i)` for `j = max(0,i-q) ..= min(p,i)`.
///
/// These are the Vandermonde convolution weights of the Bernstein product
/// formula; they lie in `(0, 1]` and sum to one, so the walk below never
/// overflows regardless of degree. The first weight is a product of at most
/// `min(i, p+q-i)` factors in `(0,1]`, subsequent ones are obtained by a
/// ratio update.
pub(crate) fn product_weights(p: usize, q: usize, i: usize, out: &mut Vec<f64>) {
    out.clear();
    let j_min = i.saturating_sub(q);
    let j_max = if p < i { p } else { i };
    // starting weight at j_min
    let mut w = 1.0;
    if j_min == 0 {
        // C(q,i)/C(p+q,i) = prod_{k<i} (q-k)/(p+q-k)
        for k in 0..i {
            w *= (q - k) as f64 / (p + q - k) as f64;
        }
    } else {
        // C(p,i-q)/C(p+q,i) = prod_{k<s} (p-k)/(p+q-k) with s = p+q-i
        let s = p + q - i;
        for k in 0..s {
            w *= (p - k) as f64 / (p + q - k) as f64;
        }
    }
    out.push(w);
    for j in j_min..j_max {
        w *= ((p - j) * (i - j)) as f64 / (((j + 1) * (q + j + 1 - i)) as f64);
        out.push(w);
    }
}

/// Entry `[a][b]` is the exact integral over `[0,1]` of `B_a^m B_b^n`.
///
/// Used to contract pairs of coefficient vectors into product integrals
/// without forming the product polynomial.
pub fn product_integral_matrix(m: usize, n: usize) -> Vec<Vec<f64>> {
    // int B_a^m B_b^n = C(m,a) C(n,b) / C(m+n,a+b) / (m+n+1)
    let inv_len = 1.0 / (m + n + 1) as f64;
    let mut rows = Vec::with_capacity(m + 1);
    let mut weights = Vec::new();
    // reuse the product-weight walk: for fixed sum i = a+b the weight at
    // j = a is exactly C(m,a)C(n,b)/C(m+n,i)
    let mut table = vec![vec![0.0; n + 1]; m + 1];
    for i in 0..=(m + n) {
        product_weights(m, n, i, &mut weights);
        let j_min = i.saturating_sub(n);
        for (off, w) in weights.iter().enumerate() {
            let a = j_min + off;
            let b = i - a;
            table[a][b] = w * inv_len;
        }
    }
    rows.append(&mut table);
    rows
}

// ---------------------------------------------------------------------------
// slice kernels; Poly1 and the tensor module are thin wrappers around these
// ---------------------------------------------------------------------------

/// de Casteljau evaluation; valid for any real `t` (outside `[0,1]` the
/// combinations are no longer convex but the recurrence is still correct).
pub(crate) fn eval_slice(coeffs: &[f64], t: f64) -> f64 {
    let mut b: Vec<f64> = coeffs.to_vec();
    let s = 1.0 - t;
    let n = b.len();
    for j in 1..n {
        for k in 0..n - j {
            b[k] = s * b[k] + t * b[k + 1];
        }
    }
    b[0]
}

/// Derivative coefficients `d_i = p (f_{i+1} - f_i)`; degree-0 input yields
/// the zero polynomial of degree 0.
pub(crate) fn derivative_slice(coeffs: &[f64]) -> Vec<f64> {
    let p = coeffs.len() - 1;
    if p == 0 {
        return vec![0.0];
    }
    let pf = p as f64;
    (0..p).map(|i| pf * (coeffs[i + 1] - coeffs[i])).collect()
}

/// Antiderivative coefficients: `F_j = constant + scale/(p+1) * sum_{i<j} f_i`,
/// so `F(0) = constant` and `F' = scale * f`.
pub(crate) fn antiderivative_slice(coeffs: &[f64], scale: f64, constant: f64) -> Vec<f64> {
    let p = coeffs.len() - 1;
    let factor = scale / (p + 1) as f64;
    let mut out = Vec::with_capacity(p + 2);
    let mut acc = 0.0;
    out.push(constant);
    for &c in coeffs {
        acc += c;
        out.push(constant + factor * acc);
    }
    out
}

/// One degree elevation step, `p -> p + 1`.
pub(crate) fn raise_once_slice(coeffs: &[f64]) -> Vec<f64> {
    let p = coeffs.len() - 1;
    let np = (p + 1) as f64;
    let mut out = Vec::with_capacity(p + 2);
    out.push(coeffs[0]);
    for j in 1..=p {
        let a = j as f64 / np;
        out.push(a * coeffs[j - 1] + (1.0 - a) * coeffs[j]);
    }
    out.push(coeffs[p]);
    out
}

pub(crate) fn raise_slice(coeffs: &[f64], target: usize) -> Vec<f64> {
    let p = coeffs.len() - 1;
    assert!(target >= p, "degree_raise target {target} below degree {p}");
    let mut out = coeffs.to_vec();
    for _ in p..target {
        out = raise_once_slice(&out);
    }
    out
}

pub(crate) fn add_slices(f: &[f64], g: &[f64], sign: f64) -> Vec<f64> {
    let target = (f.len() - 1).max(g.len() - 1);
    let mut a = raise_slice(f, target);
    let b = raise_slice(g, target);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x += sign * y;
    }
    a
}

/// Bernstein product: degree `p + q`, Vandermonde-weighted convolution.
pub(crate) fn multiply_slices(f: &[f64], g: &[f64]) -> Vec<f64> {
    let p = f.len() - 1;
    let q = g.len() - 1;
    let mut out = vec![0.0; p + q + 1];
    let mut weights = Vec::new();
    for i in 0..=(p + q) {
        product_weights(p, q, i, &mut weights);
        let j_min = i.saturating_sub(q);
        let mut acc = 0.0;
        for (off, w) in weights.iter().enumerate() {
            let j = j_min + off;
            acc += w * f[j] * g[i - j];
        }
        out[i] = acc;
    }
    out
}

/// de Casteljau subdivision at `t`: coefficients of the restriction to
/// `[0,t]` and `[t,1]`, each reparameterised to `[0,1]`.
pub(crate) fn subdivide_slice(coeffs: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let n = coeffs.len();
    let mut b = coeffs.to_vec();
    let s = 1.0 - t;
    let mut left = Vec::with_capacity(n);
    let mut right = vec![0.0; n];
    left.push(b[0]);
    right[n - 1] = b[n - 1];
    for j in 1..n {
        for k in 0..n - j {
            b[k] = s * b[k] + t * b[k + 1];
        }
        left.push(b[0]);
        right[n - 1 - j] = b[n - 1 - j];
    }
    (left, right)
}

/// A univariate real polynomial in Bernstein form on `[0,1]`.
///
/// Immutable after construction; all operations return new values.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1 {
    coeffs: Vec<f64>,
}

impl Poly1 {
    /// Wraps the Bernstein coefficients `f_0..f_p`; the degree is
    /// `coeffs.len() - 1`. Panics on an empty or non-finite coefficient list.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "Poly1 needs at least one coefficient");
        assert!(
            coeffs.iter().all(|c| c.is_finite()),
            "Poly1 coefficients must be finite"
        );
        Poly1 { coeffs }
    }

    pub fn constant(value: f64) -> Self {
        Poly1::new(vec![value])
    }

    /// The zero polynomial of the given degree.
    pub fn zero(degree: usize) -> Self {
        Poly1 {
            coeffs: vec![0.0; degree + 1],
        }
    }

    /// The identity map `t` (degree 1).
    pub fn identity() -> Self {
        Poly1::new(vec![0.0, 1.0])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Evaluates by the de Casteljau recurrence. The argument must lie in
    /// `[0,1]` (up to 1e-14); use [`Poly1::eval_extrapolated`] outside.
    pub fn eval(&self, t: f64) -> f64 {
        assert!(
            (-1e-14..=1.0 + 1e-14).contains(&t),
            "eval argument {t} outside [0,1]; use eval_extrapolated"
        );
        eval_slice(&self.coeffs, t)
    }

    /// de Casteljau evaluation without the domain check.
    pub fn eval_extrapolated(&self, t: f64) -> f64 {
        eval_slice(&self.coeffs, t)
    }

    /// Derivative, one degree lower; the derivative of a constant is the
    /// degree-0 zero polynomial.
    pub fn derivative(&self) -> Poly1 {
        Poly1 {
            coeffs: derivative_slice(&self.coeffs),
        }
    }

    /// Antiderivative `F` with `F(0) = constant` and `F' = scale * self`.
    pub fn antiderivative(&self, scale: f64, constant: f64) -> Poly1 {
        Poly1 {
            coeffs: antiderivative_slice(&self.coeffs, scale, constant),
        }
    }

    /// Exact integral over `[0,1]`: the coefficient average.
    pub fn integral_unit(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().sum();
        sum / self.coeffs.len() as f64
    }

    /// Re-expresses the same function at a higher degree. Panics if `target`
    /// is below the current degree.
    pub fn degree_raise(&self, target: usize) -> Poly1 {
        Poly1 {
            coeffs: raise_slice(&self.coeffs, target),
        }
    }

    /// Sum at degree `max(p, q)`; the lower-degree operand is raised first.
    pub fn add(&self, other: &Poly1) -> Poly1 {
        Poly1 {
            coeffs: add_slices(&self.coeffs, &other.coeffs, 1.0),
        }
    }

    pub fn sub(&self, other: &Poly1) -> Poly1 {
        Poly1 {
            coeffs: add_slices(&self.coeffs, &other.coeffs, -1.0),
        }
    }

    pub fn scale(&self, factor: f64) -> Poly1 {
        Poly1 {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Product, degree `p + q`.
    pub fn multiply(&self, other: &Poly1) -> Poly1 {
        Poly1 {
            coeffs: multiply_slices(&self.coeffs, &other.coeffs),
        }
    }

    /// Composition `self(g(t))`, degree `p * q`. `g` need not map into
    /// `[0,1]`; the expansion `sum_i C(p,i) g^i (1-g)^(p-i) f_i` is formally
    /// valid for any range. Powers of `g` and `1-g` are accumulated
    /// incrementally so intermediate degrees stay minimal.
    pub fn compose(&self, g: &Poly1) -> Poly1 {
        let p = self.degree();
        if p == 0 {
            return Poly1::constant(self.coeffs[0]);
        }
        let one_minus_g = Poly1::constant(1.0).sub(g);
        let mut g_pow: Vec<Poly1> = Vec::with_capacity(p + 1);
        let mut omg_pow: Vec<Poly1> = Vec::with_capacity(p + 1);
        g_pow.push(Poly1::constant(1.0));
        omg_pow.push(Poly1::constant(1.0));
        for i in 1..=p {
            g_pow.push(g_pow[i - 1].multiply(g));
            omg_pow.push(omg_pow[i - 1].multiply(&one_minus_g));
        }
        let binom = pascal_row(p);
        let mut result = Poly1::zero(p * g.degree());
        for i in 0..=p {
            let term = g_pow[i].multiply(&omg_pow[p - i]);
            result = result.add(&term.scale(binom[i] * self.coeffs[i]));
        }
        result
    }

    /// Splits at `t` into the restrictions to `[0,t]` and `[t,1]`, each
    /// reparameterised to `[0,1]`.
    pub fn subdivide(&self, t: f64) -> (Poly1, Poly1) {
        let (l, r) = subdivide_slice(&self.coeffs, t);
        (Poly1 { coeffs: l }, Poly1 { coeffs: r })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
