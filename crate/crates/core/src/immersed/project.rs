//! Element-local L2 projection of data functions onto Bernstein spaces.
//!
//! The Gram matrix is the exact Bernstein mass matrix of the full unit cell
//! (projection is over the whole element even when cut, since the basis is
//! defined on the full support); the load vector uses tensor Gauss points.

use alloc::vec;
use alloc::vec::Vec;

use crate::bernstein::product_integral_matrix;
use crate::linalg::{cholesky_solve, Mat};
use crate::oracle::gauss_nodes;
use crate::tensor::PolyN;

/// L2 projection of `f` (given in physical coordinates) onto the local
/// tensor Bernstein space of degree `q` on the cell `[lo, lo + size]`,
/// using `npts` Gauss points per axis for the load integrals. Returns the
/// coefficients as a polynomial in cell-local coordinates.
pub fn project_element(
    f: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    size: &[f64],
    q: usize,
    npts: usize,
) -> PolyN {
    let dim = lo.len();
    assert!((1..=3).contains(&dim));
    assert!(q <= 20, "projection degree capped at 20");
    let (nodes, weights) = gauss_nodes(npts);

    // per-axis Bernstein values at the Gauss nodes
    let basis = bernstein_values(q, &nodes);

    // load vector: b_k = int f(phys(t)) B_k(t) dt over the unit cell
    let n1 = q + 1;
    let len = n1.pow(dim as u32);
    let mut b = vec![0.0; len];
    let mut idx = vec![0usize; dim];
    loop {
        // Gauss point
        let mut point = vec![0.0; dim];
        let mut weight = 1.0;
        for ax in 0..dim {
            point[ax] = lo[ax] + size[ax] * nodes[idx[ax]];
            weight *= weights[idx[ax]];
        }
        let fv = weight * f(&point);
        // scatter onto the basis tensor
        let mut k = vec![0usize; dim];
        loop {
            let mut flat = 0;
            let mut bval = 1.0;
            for ax in 0..dim {
                flat = flat * n1 + k[ax];
                bval *= basis[idx[ax]][k[ax]];
            }
            b[flat] += fv * bval;
            if !advance(&mut k, n1) {
                break;
            }
        }
        if !advance_mixed(&mut idx, npts) {
            break;
        }
    }

    // Gram solve, one univariate factor per axis (the tensor Gram is the
    // Kronecker product of the univariate one)
    let gram1 = {
        let w = product_integral_matrix(q, q);
        let mut g = Mat::zeros(n1, n1);
        for i in 0..n1 {
            for j in 0..n1 {
                g.set(i, j, w[i][j]);
            }
        }
        g
    };
    let mut coeffs = b;
    for ax in 0..dim {
        coeffs = solve_along_axis(&gram1, &coeffs, dim, n1, ax);
    }
    PolyN::new(vec![q; dim], coeffs)
}

fn bernstein_values(q: usize, nodes: &[f64]) -> Vec<Vec<f64>> {
    let binom = crate::bernstein::pascal_row(q);
    nodes
        .iter()
        .map(|t| {
            (0..=q)
                .map(|i| {
                    let mut v = binom[i];
                    for _ in 0..i {
                        v *= t;
                    }
                    for _ in 0..(q - i) {
                        v *= 1.0 - t;
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn advance(idx: &mut [usize], n: usize) -> bool {
    for ax in (0..idx.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < n {
            return true;
        }
        idx[ax] = 0;
    }
    false
}

fn advance_mixed(idx: &mut [usize], n: usize) -> bool {
    advance(idx, n)
}

/// Solves `(I ⊗ .. ⊗ G ⊗ .. ⊗ I) x = b` with `G` on the given axis.
fn solve_along_axis(g: &Mat, b: &[f64], dim: usize, n1: usize, axis: usize) -> Vec<f64> {
    let stride = n1.pow((dim - 1 - axis) as u32);
    let n = n1;
    let outer = b.len() / (n * stride);
    let mut out = vec![0.0; b.len()];
    let mut line = vec![0.0; n];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for k in 0..n {
                line[k] = b[base + k * stride];
            }
            let solved = cholesky_solve(g, &line).expect("Bernstein Gram is SPD");
            for (k, v) in solved.iter().enumerate() {
                out[base + k * stride] = *v;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::VecPoly;

    #[test]
    fn reproduces_polynomials() {
        // f already a Bernstein polynomial of degree <= q on the cell
        let target = PolyN::new(vec![2, 2], vec![
            1.0, -0.5, 2.0, 0.3, 0.9, -1.2, 0.0, 0.7, 1.5,
        ]);
        let lo = [0.25, 0.5];
        let size = [0.25, 0.25];
        let f = |x: &[f64]| {
            let local = [(x[0] - lo[0]) / size[0], (x[1] - lo[1]) / size[1]];
            target.eval(&local)
        };
        let proj = project_element(&f, &lo, &size, 2, 6);
        for (a, b) in proj.coeffs().iter().zip(target.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_projection() {
        let f = |_: &[f64]| 5.0;
        let proj = project_element(&f, &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], 3, 6);
        // the tensor Gram solve amplifies roundoff by its condition number
        for c in proj.coeffs() {
            assert!((c - 5.0).abs() < 1e-11);
        }
    }

    #[test]
    fn smooth_data_converges_at_order_q_plus_one() {
        // L2 error of the projection of sin(pi x) sin(pi y) under cell
        // shrinking, fitted rate ~ q+1
        let q = 3usize;
        let f = |x: &[f64]| libm::sin(core::f64::consts::PI * x[0])
            * libm::sin(core::f64::consts::PI * x[1]);
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for level in 0..4 {
            let h = 0.25 / (1 << level) as f64;
            let lo = [0.3, 0.4];
            let size = [h, h];
            let proj = project_element(&f, &lo, &size, q, q + 4);
            // L2 error on the cell by Gauss quadrature
            let (nodes, weights) = gauss_nodes(q + 5);
            let mut err2 = 0.0;
            let field = VecPoly::new(vec![proj.clone()]);
            for (xi, wi) in nodes.iter().zip(weights.iter()) {
                for (yj, wj) in nodes.iter().zip(weights.iter()) {
                    let local = [*xi, *yj];
                    let phys = [lo[0] + size[0] * xi, lo[1] + size[1] * yj];
                    let d = field.component(0).eval(&local) - f(&phys);
                    err2 += wi * wj * d * d;
                }
            }
            errs.push(libm::sqrt(err2 * h * h));
            hs.push(h);
        }
        // least-squares slope of log(err) vs log(h)
        let n = errs.len() as f64;
        let sx: f64 = hs.iter().map(|h| libm::log(*h)).sum();
        let sy: f64 = errs.iter().map(|e| libm::log(*e)).sum();
        let sxx: f64 = hs.iter().map(|h| libm::log(*h) * libm::log(*h)).sum();
        let sxy: f64 = hs
            .iter()
            .zip(errs.iter())
            .map(|(h, e)| libm::log(*h) * libm::log(*e))
            .sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(slope > q as f64 + 0.7, "projection rate {slope}");
    }
}
