//! Integral functionals as coefficient weights.
//!
//! Every stage of the reduction (antiderivative, product with a fixed
//! polynomial, composition with a fixed map, line integral) is linear in the
//! integrand's Bernstein coefficients. Moment tables need the integrals of
//! *every* basis function of a space over the same geometry, which is the
//! transpose question: instead of running the pipeline per basis function,
//! pull the final line-integral weights back through the adjoints of those
//! linear maps once. The result is a weight vector `w` with
//! `int_geometry P = <w, coeffs(P)>` for every polynomial `P` of the target
//! degrees. Results agree with the forward pipeline to roundoff, which the
//! tests assert; the betas and epsilons are taken as zero here.

use alloc::vec;
use alloc::vec::Vec;

use crate::bernstein::{self, Poly1};
use crate::brep::{surface_normal_field, BezierCurve, BezierSurface, TrimmedFace, TrimmedRegion2D};
use crate::tensor::PolyN;
use crate::GEOM_TOL;

fn shape_len(degrees: &[usize]) -> usize {
    degrees.iter().map(|d| d + 1).product()
}

/// Per-axis product weights `C(dx,a) C(df,b) / C(dx+df,a+b)` as a dense
/// `(dx+1) x (df+1)` table.
fn axis_weight_matrix(dx: usize, df: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; df + 1]; dx + 1];
    let mut weights = Vec::new();
    for i in 0..=(dx + df) {
        bernstein::product_weights(dx, df, i, &mut weights);
        let j_min = i.saturating_sub(df);
        for (off, w) in weights.iter().enumerate() {
            let a = j_min + off;
            let b = i - a;
            m[a][b] = *w;
        }
    }
    m
}

/// Adjoint of multiplication by the fixed polynomial `f`: takes weights over
/// the product space (degrees `w_deg`) to weights over the input space
/// (degrees `w_deg - deg(f)`).
fn adjoint_multiply(f: &PolyN, w: &[f64], w_deg: &[usize]) -> Vec<f64> {
    let arity = f.arity();
    assert_eq!(w_deg.len(), arity);
    let f_deg = f.degrees();
    let out_deg: Vec<usize> = w_deg.iter().zip(f_deg.iter()).map(|(a, b)| a - b).collect();
    assert_eq!(w.len(), shape_len(w_deg));

    let axis_w: Vec<Vec<Vec<f64>>> = (0..arity)
        .map(|ax| axis_weight_matrix(out_deg[ax], f_deg[ax]))
        .collect();

    let out_len = shape_len(&out_deg);
    let mut out = vec![0.0; out_len];
    // strides
    let stride = |deg: &[usize]| -> Vec<usize> {
        let mut s = vec![1usize; arity];
        for ax in (0..arity.saturating_sub(1)).rev() {
            s[ax] = s[ax + 1] * (deg[ax + 1] + 1);
        }
        s
    };
    let so = stride(&out_deg);
    let sw = stride(w_deg);

    // iterate output multi-index a and f multi-index b
    let mut a_idx = vec![0usize; arity];
    for a_flat in 0..out_len {
        // decode a
        {
            let mut rem = a_flat;
            for ax in 0..arity {
                a_idx[ax] = rem / so[ax];
                rem %= so[ax];
            }
        }
        let mut acc = 0.0;
        let mut b_idx = vec![0usize; arity];
        'b: loop {
            let mut weight = 1.0;
            let mut w_flat = 0;
            for ax in 0..arity {
                weight *= axis_w[ax][a_idx[ax]][b_idx[ax]];
                w_flat += (a_idx[ax] + b_idx[ax]) * sw[ax];
            }
            let f_flat: usize = (0..arity)
                .map(|ax| {
                    b_idx[ax]
                        * f_deg[ax + 1..]
                            .iter()
                            .map(|d| d + 1)
                            .product::<usize>()
                })
                .sum();
            acc += weight * w[w_flat] * f.coeffs()[f_flat];
            // odometer over b
            for ax in (0..arity).rev() {
                b_idx[ax] += 1;
                if b_idx[ax] <= f_deg[ax] {
                    continue 'b;
                }
                b_idx[ax] = 0;
            }
            break;
        }
        out[a_flat] = acc;
    }
    out
}

/// Adjoint of the partial antiderivative along `axis`: takes weights over
/// the raised space (degrees `w_deg`, with `w_deg[axis] = p + 1`) to weights
/// over the base space, scaled by `scale / (p + 1)`. Suffix sums along the
/// axis realise `sum_{J > i} w_J`.
fn adjoint_antiderivative(w: &[f64], w_deg: &[usize], axis: usize, scale: f64) -> Vec<f64> {
    let p = w_deg[axis] - 1;
    let factor = scale / (p + 1) as f64;
    let n_out = p + 1;
    let n_in = p + 2;
    let stride: usize = w_deg[axis + 1..].iter().map(|d| d + 1).product();
    let outer = w.len() / (n_in * stride);
    let mut out_deg = w_deg.to_vec();
    out_deg[axis] = p;
    let mut out = vec![0.0; shape_len(&out_deg)];
    for o in 0..outer {
        for s in 0..stride {
            let base_in = o * n_in * stride + s;
            let base_out = o * n_out * stride + s;
            // input index i gathers the raised indices J > i
            let mut acc = 0.0;
            for i in (0..n_out).rev() {
                acc += w[base_in + (i + 1) * stride];
                out[base_out + i * stride] = factor * acc;
            }
        }
    }
    out
}

/// Bernstein basis images `B_j^e(g)` for `j = 0..=e` via incremental powers.
fn bernstein_list_poly1(g: &Poly1, e: usize) -> Vec<Poly1> {
    if e == 0 {
        return vec![Poly1::constant(1.0)];
    }
    let omg = Poly1::constant(1.0).sub(g);
    let mut gp = vec![Poly1::constant(1.0)];
    let mut op = vec![Poly1::constant(1.0)];
    for i in 1..=e {
        gp.push(gp[i - 1].multiply(g));
        op.push(op[i - 1].multiply(&omg));
    }
    let binom = bernstein::pascal_row(e);
    (0..=e)
        .map(|j| gp[j].multiply(&op[e - j]).scale(binom[j]))
        .collect()
}

fn bernstein_list_polyn(g: &PolyN, e: usize) -> Vec<PolyN> {
    let m = g.arity();
    if e == 0 {
        return vec![PolyN::constant(m, 1.0)];
    }
    let omg = PolyN::constant(m, 1.0).sub(g);
    let mut gp = vec![PolyN::constant(m, 1.0)];
    let mut op = vec![PolyN::constant(m, 1.0)];
    for i in 1..=e {
        gp.push(gp[i - 1].multiply(g));
        op.push(op[i - 1].multiply(&omg));
    }
    let binom = bernstein::pascal_row(e);
    (0..=e)
        .map(|j| gp[j].multiply(&op[e - j]).scale(binom[j]))
        .collect()
}

/// Weights of the pullback line functional `P -> int_0^1 (P ∘ c) M_comp dt`
/// over the bivariate space of degrees `e`, one weight vector per normal
/// component.
fn curve_pullback_functional(curve: &BezierCurve, e: [usize; 2]) -> [Vec<f64>; 2] {
    let c1 = curve.component(0);
    let c2 = curve.component(1);
    let m1 = c2.derivative();
    let m2 = c1.derivative().scale(-1.0);
    let l1 = bernstein_list_poly1(&c1, e[0]);
    let l2 = bernstein_list_poly1(&c2, e[1]);
    let d1 = l1[0].degree();

    let mut out = [vec![0.0; (e[0] + 1) * (e[1] + 1)], vec![0.0; (e[0] + 1) * (e[1] + 1)]];
    for (comp, m) in [m1, m2].iter().enumerate() {
        // V[j2] = W * (l2[j2] * m), then u = l1[j1] . V[j2]
        let prods: Vec<Poly1> = l2.iter().map(|b| b.multiply(m)).collect();
        let w = bernstein::product_integral_matrix(d1, prods[0].degree());
        let v: Vec<Vec<f64>> = prods
            .iter()
            .map(|pr| {
                (0..=d1)
                    .map(|a| {
                        pr.coeffs()
                            .iter()
                            .zip(w[a].iter())
                            .map(|(c, ww)| c * ww)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        for j1 in 0..=e[0] {
            for (j2, vj) in v.iter().enumerate() {
                let u: f64 = l1[j1]
                    .coeffs()
                    .iter()
                    .zip(vj.iter())
                    .map(|(a, b)| a * b)
                    .sum();
                out[comp][j1 * (e[1] + 1) + j2] = u;
            }
        }
    }
    out
}

/// Weights of the region integral over a planar trimmed region for every
/// bivariate polynomial of degrees `target`: `int_region P = <w, coeffs(P)>`.
/// One divergence pass with the given deltas (epsilons zero).
pub fn region_functional(region: &TrimmedRegion2D, target: [usize; 2], deltas: [f64; 2]) -> Vec<f64> {
    let mut w = vec![0.0; (target[0] + 1) * (target[1] + 1)];
    for comp in 0..2 {
        if deltas[comp] == 0.0 {
            continue;
        }
        let mut field_deg = [target[0], target[1]];
        field_deg[comp] += 1;
        let mut u = vec![0.0; (field_deg[0] + 1) * (field_deg[1] + 1)];
        for curve in region.curves() {
            if curve.polygon_length() < GEOM_TOL {
                continue;
            }
            let pulled = curve_pullback_functional(curve, field_deg);
            for (acc, val) in u.iter_mut().zip(pulled[comp].iter()) {
                *acc += val;
            }
        }
        let back = adjoint_antiderivative(&u, &[field_deg[0], field_deg[1]], comp, deltas[comp]);
        for (acc, val) in w.iter_mut().zip(back.iter()) {
            *acc += val;
        }
    }
    w
}

/// Weights of the boundary flux functionals over a region's
/// domain-boundary curves: for each normal component,
/// `P -> sum_curves int (P ∘ c) M_comp dt`.
pub fn region_boundary_functional(region: &TrimmedRegion2D, target: [usize; 2]) -> [Vec<f64>; 2] {
    let len = (target[0] + 1) * (target[1] + 1);
    let mut out = [vec![0.0; len], vec![0.0; len]];
    for curve in region.curves() {
        if !curve.on_domain_boundary || curve.polygon_length() < GEOM_TOL {
            continue;
        }
        let pulled = curve_pullback_functional(curve, target);
        for comp in 0..2 {
            for (acc, val) in out[comp].iter_mut().zip(pulled[comp].iter()) {
                *acc += val;
            }
        }
    }
    out
}

/// Staged contraction of a face weight vector against the composed basis
/// `B_i ∘ S` of a trivariate space: returns `Y[i] = <z, B_i ∘ S>`.
fn contract_composed_basis(
    z: &[f64],
    z_deg: [usize; 2],
    surface: &BezierSurface,
    target: &[usize; 3],
) -> Vec<f64> {
    let lists: Vec<Vec<PolyN>> = (0..3)
        .map(|comp| bernstein_list_polyn(surface.map().component(comp), target[comp]))
        .collect();
    let mut out = Vec::with_capacity(shape_len(target));
    let deg1 = lists[0][0].degrees().to_vec();
    let deg2 = lists[1][0].degrees().to_vec();
    for t1 in &lists[0] {
        let z2 = adjoint_multiply(t1, z, &[z_deg[0], z_deg[1]]);
        let z2_deg = [z_deg[0] - deg1[0], z_deg[1] - deg1[1]];
        for t2 in &lists[1] {
            let z3 = adjoint_multiply(t2, &z2, &z2_deg);
            for t3 in &lists[2] {
                let y: f64 = z3
                    .iter()
                    .zip(t3.coeffs().iter())
                    .map(|(a, b)| a * b)
                    .sum();
                out.push(y);
            }
        }
        let _ = deg2;
    }
    out
}

/// Weights of the face contribution to a volume integral, over the
/// trivariate integrand space of degrees `r`: for every `a` of those
/// degrees, `int_face (A(a) ∘ S) · N = <w, coeffs(a)>` with the
/// antiderivative field built from `alphas` (betas zero).
pub fn face_moment_functional(
    face: &TrimmedFace,
    r: &[usize; 3],
    alphas: [f64; 3],
    deltas: [f64; 2],
) -> Vec<f64> {
    let s_deg = face.surface.degrees();
    let normal = surface_normal_field(&face.surface);
    let rsum: usize = r.iter().sum::<usize>() + 1;
    let v_deg = [
        s_deg[0] * rsum + 2 * s_deg[0] - 1,
        s_deg[1] * rsum + 2 * s_deg[1] - 1,
    ];
    let mut v = region_functional(&face.param_region(), v_deg, deltas);
    if !face.outward {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    let mut w = vec![0.0; shape_len(r)];
    for k in 0..3 {
        if alphas[k] == 0.0 {
            continue;
        }
        let n_k = normal.component(k);
        let z = adjoint_multiply(n_k, &v, &v_deg);
        let z_deg = [v_deg[0] - n_k.degrees()[0], v_deg[1] - n_k.degrees()[1]];
        let mut target = *r;
        target[k] += 1;
        let y = contract_composed_basis(&z, z_deg, &face.surface, &target);
        let mut t_deg = r.to_vec();
        t_deg[k] += 1;
        let back = adjoint_antiderivative(&y, &t_deg, k, alphas[k]);
        for (acc, val) in w.iter_mut().zip(back.iter()) {
            *acc += val;
        }
    }
    w
}

/// Weights of the face flux functionals over the trivariate space of
/// degrees `s_deg`: for each Cartesian component `k`,
/// `P -> int_face (P ∘ S) N_k`, signed by the face's outward flag.
pub fn face_flux_functional(face: &TrimmedFace, s_deg: &[usize; 3], deltas: [f64; 2]) -> [Vec<f64>; 3] {
    let surf_deg = face.surface.degrees();
    let normal = surface_normal_field(&face.surface);
    let dsum: usize = s_deg.iter().sum();
    let v_deg = [
        surf_deg[0] * dsum + 2 * surf_deg[0] - 1,
        surf_deg[1] * dsum + 2 * surf_deg[1] - 1,
    ];
    let mut v = region_functional(&face.param_region(), v_deg, deltas);
    if !face.outward {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    let len = shape_len(s_deg);
    let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for k in 0..3 {
        let n_k = normal.component(k);
        let z = adjoint_multiply(n_k, &v, &v_deg);
        let z_deg = [v_deg[0] - n_k.degrees()[0], v_deg[1] - n_k.degrees()[1]];
        out[k] = contract_composed_basis(&z, z_deg, &face.surface, s_deg);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::{LoopKind, TrimLoop};
    use crate::qfree::{
        build_planar_antiderivative_field, face_integrand, integrate_face, integrate_loops,
        integrate_region_2d, AntiderivativeConfig,
    };
    use crate::tensor::VecPoly;
    use alloc::vec;

    fn basis_polyn(degrees: &[usize], flat: usize) -> PolyN {
        let len: usize = degrees.iter().map(|d| d + 1).product();
        let mut coeffs = vec![0.0; len];
        coeffs[flat] = 1.0;
        PolyN::new(degrees.to_vec(), coeffs)
    }

    #[test]
    fn region_functional_matches_forward() {
        let region = TrimmedRegion2D::new(vec![
            TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0]),
            TrimLoop::rectangle(LoopKind::Inner, [0.2, 0.3], [0.6, 0.7]),
        ]);
        let target = [3usize, 2usize];
        let deltas = [0.4, 0.6];
        let w = region_functional(&region, target, deltas);
        for flat in 0..w.len() {
            let b = basis_polyn(&[target[0], target[1]], flat);
            let forward = integrate_region_2d(&region, &b, deltas, [0.0, 0.0]);
            assert!(
                (w[flat] - forward).abs() < 1e-13,
                "basis {flat}: {} vs {forward}",
                w[flat]
            );
        }
        // area check
        let area: f64 = basis_polyn(&[target[0], target[1]], 0)
            .degrees()
            .iter()
            .map(|_| 1.0)
            .product::<f64>()
            * 0.0
            + w.iter().sum::<f64>(); // partition of unity: sum of basis integrals
        assert!((area - (1.0 - 0.16)).abs() < 1e-13);
    }

    #[test]
    fn region_functional_curved_boundary() {
        // blob bounded by four quadratic arcs
        let arcs = [
            [[0.1, 0.2], [0.5, 0.05], [0.9, 0.25]],
            [[0.9, 0.25], [0.95, 0.55], [0.85, 0.8]],
            [[0.85, 0.8], [0.5, 0.95], [0.15, 0.85]],
            [[0.15, 0.85], [0.02, 0.5], [0.1, 0.2]],
        ];
        let curves = arcs
            .iter()
            .map(|pts| crate::brep::BezierCurve::from_points_2d(pts))
            .collect();
        let region = TrimmedRegion2D::new(vec![TrimLoop::new(LoopKind::Outer, curves)]);
        let target = [2usize, 2usize];
        let w = region_functional(&region, target, [0.5, 0.5]);
        for flat in 0..w.len() {
            let b = basis_polyn(&[2, 2], flat);
            let forward = integrate_region_2d(&region, &b, [0.5, 0.5], [0.0, 0.0]);
            assert!((w[flat] - forward).abs() < 1e-13);
        }
    }

    #[test]
    fn boundary_functional_matches_forward() {
        let mut hole = TrimLoop::rectangle(LoopKind::Inner, [0.2, 0.2], [0.7, 0.6]);
        // only the hole is domain boundary
        let outer = TrimLoop {
            kind: LoopKind::Outer,
            curves: TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0])
                .curves
                .into_iter()
                .map(|c| c.with_domain_boundary(false))
                .collect(),
        };
        for c in hole.curves.iter_mut() {
            c.on_domain_boundary = true;
        }
        let region = TrimmedRegion2D::new(vec![outer, hole.clone()]);
        let target = [2usize, 2usize];
        let w = region_boundary_functional(&region, target);
        for flat in 0..w[0].len() {
            let b = basis_polyn(&[2, 2], flat);
            // forward: per curve, (b ∘ c) · M_comp
            let mut expect = [0.0, 0.0];
            for curve in &hole.curves {
                let pulled = VecPoly::new(vec![b.clone()]).compose(curve.map());
                let m = crate::brep::curve_normal_field(curve);
                for comp in 0..2 {
                    let t = pulled.component(0).multiply(m.component(comp));
                    expect[comp] += t.to_poly1().integral_unit();
                }
            }
            for comp in 0..2 {
                assert!((w[comp][flat] - expect[comp]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn face_moment_functional_matches_forward() {
        // trimmed planar face of a cell at x3 = 1 with a corner notch
        let surface = crate::brep::BezierSurface::from_grid(
            2,
            2,
            &[
                [0.0, 0.0, 1.0],
                [0.0, 1.0, 1.0],
                [1.0, 0.0, 1.0],
                [1.0, 1.0, 1.0],
            ],
        );
        let notch = TrimLoop::new(
            LoopKind::Outer,
            vec![
                crate::brep::BezierCurve::segment_2d([0.0, 0.0], [1.0, 0.0]),
                crate::brep::BezierCurve::segment_2d([1.0, 0.0], [1.0, 0.55]),
                crate::brep::BezierCurve::from_points_2d(&[[1.0, 0.55], [0.5, 0.8], [0.0, 0.6]]),
                crate::brep::BezierCurve::segment_2d([0.0, 0.6], [0.0, 0.0]),
            ],
        );
        let face = crate::brep::TrimmedFace::trimmed(surface, vec![notch], true);
        let r = [1usize, 1, 1];
        let alphas = [0.25, 0.35, 0.4];
        let deltas = [0.5, 0.5];
        let w = face_moment_functional(&face, &r, alphas, deltas);
        let cfg = AntiderivativeConfig {
            alphas,
            betas: [0.0; 3],
            deltas,
            epsilons: [0.0; 2],
        };
        for flat in 0..w.len() {
            let b = basis_polyn(&r, flat);
            let field = crate::qfree::build_antiderivative_field(&b, &cfg);
            let rhat = face_integrand(&field, &face);
            let forward = integrate_face(&face, &rhat, deltas, [0.0, 0.0]);
            assert!(
                (w[flat] - forward).abs() < 1e-12,
                "basis {flat}: {} vs {forward}",
                w[flat]
            );
        }
    }

    #[test]
    fn face_flux_functional_matches_forward() {
        // curved face: bilinear-but-tilted patch
        let surface = crate::brep::BezierSurface::from_grid(
            2,
            2,
            &[
                [0.0, 0.0, 0.3],
                [0.0, 1.0, 0.5],
                [1.0, 0.0, 0.4],
                [1.0, 1.0, 0.9],
            ],
        );
        let lp = TrimLoop::new(
            LoopKind::Outer,
            vec![
                crate::brep::BezierCurve::segment_2d([0.0, 0.0], [1.0, 0.0]),
                crate::brep::BezierCurve::from_points_2d(&[[1.0, 0.0], [0.9, 0.5], [1.0, 1.0]]),
                crate::brep::BezierCurve::segment_2d([1.0, 1.0], [0.0, 1.0]),
                crate::brep::BezierCurve::segment_2d([0.0, 1.0], [0.0, 0.0]),
            ],
        );
        let face = crate::brep::TrimmedFace::trimmed(surface, vec![lp], false);
        let s_deg = [1usize, 1, 1];
        let deltas = [0.5, 0.5];
        let w = face_flux_functional(&face, &s_deg, deltas);
        let normal = surface_normal_field(&face.surface);
        for flat in 0..w[0].len() {
            let b = basis_polyn(&s_deg, flat);
            let pulled = VecPoly::new(vec![b]).compose(face.surface.map());
            for k in 0..3 {
                let integrand = pulled.component(0).multiply(normal.component(k)).scale(-1.0);
                // forward region integral of the product over the face loops
                let field = build_planar_antiderivative_field(&integrand, deltas, [0.0, 0.0]);
                let forward = integrate_loops(&field, &face.loops, 1e-10);
                assert!(
                    (w[k][flat] - forward).abs() < 1e-12,
                    "basis {flat} comp {k}: {} vs {forward}",
                    w[k][flat]
                );
            }
        }
    }
}
