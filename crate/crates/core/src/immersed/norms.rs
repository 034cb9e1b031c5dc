//! Discretisation error norms and convergence-rate fitting.
//!
//! Interior cells are integrated with tensor Gauss rules; cut cells fall
//! back to the oracle quadrature on their local geometry (region quad tree
//! in 2D, face-pullback quadrature with a numerically accumulated
//! antiderivative in 3D). The discrete solution is evaluated per cell from
//! its Bernstein representation.

use alloc::vec;
use alloc::vec::Vec;

use crate::oracle::{gauss_nodes, RegionQuadrature};
use crate::tensor::PolyN;

use super::assemble::local_basis_polynomial;
use super::grid::{CellClassification, CellLabel, CutGeometry};
use super::space::{ActiveSet, SplineSpace};

#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    /// Quad-tree depth for cut-cell quadrature.
    pub depth: usize,
    /// Gauss points per axis on interior sub-cells of the cut-cell quadrature.
    pub n: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { depth: 8, n: 5 }
    }
}

/// The local Bernstein polynomial of the discrete solution on one cell.
pub fn cell_solution(
    space: &SplineSpace,
    active: &ActiveSet,
    coeffs: &[f64],
    cell: &[usize],
) -> PolyN {
    let dim = space.dim;
    let p = space.axes[0].degree;
    let mut acc: Option<PolyN> = None;
    let mut local = vec![0usize; dim];
    loop {
        let tensor = space.basis_index(&space.cell_function(cell, &local));
        let u = active.to_dense[tensor].map(|d| coeffs[d]).unwrap_or(0.0);
        if u != 0.0 {
            let term = local_basis_polynomial(space, cell, &local).scale(u);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        let mut ax = dim;
        let done = loop {
            if ax == 0 {
                break true;
            }
            ax -= 1;
            local[ax] += 1;
            if local[ax] <= p {
                break false;
            }
            local[ax] = 0;
            if ax == 0 {
                break true;
            }
        };
        if done {
            break;
        }
    }
    acc.unwrap_or_else(|| PolyN::zero(vec![p; dim]))
}

/// Relative L2 and H1-seminorm errors of the discrete solution against an
/// exact solution and its gradient.
#[allow(clippy::too_many_arguments)]
pub fn error_norms(
    space: &SplineSpace,
    class: &CellClassification,
    active: &ActiveSet,
    coeffs: &[f64],
    u_exact: &dyn Fn(&[f64]) -> f64,
    grad_exact: &dyn Fn(&[f64]) -> [f64; 3],
    opts: NormOptions,
) -> (f64, f64) {
    let dim = space.dim;
    let p = space.axes[0].degree;
    let grid = &class.grid;
    let h = grid.spacing;
    let cellvol = grid.cell_volume();
    let (nodes, weights) = gauss_nodes(p + 3);

    let mut err_l2 = 0.0;
    let mut err_h1 = 0.0;
    let mut ref_l2 = 0.0;
    let mut ref_h1 = 0.0;

    for flat in class.active_cells() {
        let cell = grid.cell_coords(flat);
        let lo = grid.cell_lo(&cell);
        let u_local = cell_solution(space, active, coeffs, &cell);
        let grads: Vec<PolyN> = (0..dim).map(|a| u_local.partial_derivative(a)).collect();

        // pointwise squared errors in local coordinates
        let eval_errs = |t: &[f64]| -> (f64, f64, f64, f64) {
            let phys: Vec<f64> = (0..dim).map(|ax| lo[ax] + h[ax] * t[ax]).collect();
            let ue = u_exact(&phys);
            let ge = grad_exact(&phys);
            let uh = u_local.eval(t);
            let mut g2 = 0.0;
            let mut ge2 = 0.0;
            for a in 0..dim {
                let gh = grads[a].eval(t) / h[a];
                g2 += (gh - ge[a]) * (gh - ge[a]);
                ge2 += ge[a] * ge[a];
            }
            ((uh - ue) * (uh - ue), g2, ue * ue, ge2)
        };

        match class.labels[flat] {
            CellLabel::Interior => {
                let mut sums = (0.0, 0.0, 0.0, 0.0);
                for_each_gauss(dim, &nodes, &weights, |t, w| {
                    let (a, b, c, d) = eval_errs(t);
                    sums.0 += w * a;
                    sums.1 += w * b;
                    sums.2 += w * c;
                    sums.3 += w * d;
                });
                err_l2 += cellvol * sums.0;
                err_h1 += cellvol * sums.1;
                ref_l2 += cellvol * sums.2;
                ref_h1 += cellvol * sums.3;
            }
            CellLabel::Cut => match &class.cut_cells[&flat] {
                CutGeometry::Region(region) => {
                    let quad = RegionQuadrature::build(region, opts.depth, opts.n);
                    let (a, _) = quad.integrate(|t| eval_errs(&t).0);
                    let (b, _) = quad.integrate(|t| eval_errs(&t).1);
                    let (c, _) = quad.integrate(|t| eval_errs(&t).2);
                    let (d, _) = quad.integrate(|t| eval_errs(&t).3);
                    err_l2 += cellvol * a;
                    err_h1 += cellvol * b;
                    ref_l2 += cellvol * c;
                    ref_h1 += cellvol * d;
                }
                CutGeometry::Solid(solid) => {
                    // per-face parameter quadratures, shared across integrands
                    let face_quads: Vec<(usize, RegionQuadrature)> = solid
                        .faces
                        .iter()
                        .enumerate()
                        .map(|(i, f)| {
                            (i, RegionQuadrature::build(&f.param_region(), opts.depth, opts.n))
                        })
                        .collect();
                    let (gx, gw) = gauss_nodes(2 * p + 6);
                    let mut results = [0.0; 4];
                    for (which, slot) in results.iter_mut().enumerate() {
                        let mut total = 0.0;
                        for (fi, quad) in &face_quads {
                            let face = &solid.faces[*fi];
                            let map = face.surface.map();
                            let sign = if face.outward { 1.0 } else { -1.0 };
                            let (v, _) = quad.integrate(|uv| {
                                let x = map.eval(&uv);
                                let du = [
                                    map.component(0).eval_partial(&uv, 0),
                                    map.component(1).eval_partial(&uv, 0),
                                    map.component(2).eval_partial(&uv, 0),
                                ];
                                let dv = [
                                    map.component(0).eval_partial(&uv, 1),
                                    map.component(1).eval_partial(&uv, 1),
                                    map.component(2).eval_partial(&uv, 1),
                                ];
                                let n1 = du[1] * dv[2] - du[2] * dv[1];
                                let mut e = 0.0;
                                for (xi, wi) in gx.iter().zip(gw.iter()) {
                                    let t = [x[0] * xi, x[1], x[2]];
                                    e += wi * pick(eval_errs(&t), which);
                                }
                                sign * e * x[0] * n1
                            });
                            total += v;
                        }
                        *slot = total;
                    }
                    err_l2 += cellvol * results[0];
                    err_h1 += cellvol * results[1];
                    ref_l2 += cellvol * results[2];
                    ref_h1 += cellvol * results[3];
                }
            },
            CellLabel::Exterior => unreachable!(),
        }
    }

    let l2 = libm::sqrt(err_l2.max(0.0) / ref_l2.max(1e-300));
    let h1 = libm::sqrt(err_h1.max(0.0) / ref_h1.max(1e-300));
    (l2, h1)
}

fn pick(t: (f64, f64, f64, f64), which: usize) -> f64 {
    match which {
        0 => t.0,
        1 => t.1,
        2 => t.2,
        _ => t.3,
    }
}

fn for_each_gauss(dim: usize, nodes: &[f64], weights: &[f64], mut f: impl FnMut(&[f64], f64)) {
    let n = nodes.len();
    let mut idx = vec![0usize; dim];
    loop {
        let mut t = vec![0.0; dim];
        let mut w = 1.0;
        for ax in 0..dim {
            t[ax] = nodes[idx[ax]];
            w *= weights[idx[ax]];
        }
        f(&t, w);
        let mut ax = dim;
        let done = loop {
            if ax == 0 {
                break true;
            }
            ax -= 1;
            idx[ax] += 1;
            if idx[ax] < n {
                break false;
            }
            idx[ax] = 0;
            if ax == 0 {
                break true;
            }
        };
        if done {
            break;
        }
    }
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_rate(hs: &[f64], errs: &[f64]) -> f64 {
    assert_eq!(hs.len(), errs.len());
    assert!(hs.len() >= 2);
    let n = hs.len() as f64;
    let lx: Vec<f64> = hs.iter().map(|h| libm::log(*h)).collect();
    let ly: Vec<f64> = errs.iter().map(|e| libm::log(e.max(1e-300))).collect();
    let sx: f64 = lx.iter().sum();
    let sy: f64 = ly.iter().sum();
    let sxx: f64 = lx.iter().map(|x| x * x).sum();
    let sxy: f64 = lx.iter().zip(ly.iter()).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_fit_recovers_slope() {
        let hs = [0.5, 0.25, 0.125, 0.0625];
        let errs: Vec<f64> = hs.iter().map(|h| 3.0 * h * h * h).collect();
        let rate = fit_rate(&hs, &errs);
        assert!((rate - 3.0).abs() < 1e-12);
    }
}
