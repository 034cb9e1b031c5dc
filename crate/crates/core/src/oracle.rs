//! Independent reference quadrature.
//!
//! Everything in this module works from point evaluations of the geometry
//! (de Casteljau) and never touches the coefficient-level pipeline of the
//! integrator, so the two paths can certify each other. Region integrals use
//! a quad tree over the bounding box: cells away from the boundary are
//! finalised with tensor Gauss rules, boundary cells at maximal depth are
//! clipped against chord polylines of the trimming curves and integrated
//! with a triangle rule. The reported error estimate tracks the chord
//! sagitta (and the sample resolution of the fallback path), so halving the
//! depth moves results by a bounded multiple of the estimate.

use alloc::vec;
use alloc::vec::Vec;

use crate::brep::{BRepSolid, BezierCurve, TrimmedRegion2D};
use crate::rootfind::{isolate_roots, RootFindError};
use crate::GEOM_TOL;

// ---------------------------------------------------------------------------
// Gauss-Legendre rules
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on `[0,1]` (Newton-iterated Legendre
/// roots). Weights sum to one. `1 <= n <= 512`.
pub fn gauss_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!((1..=512).contains(&n), "gauss_nodes supports 1..=512 points");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // initial guess on [-1,1], ascending in i
        let mut x = libm::cos(core::f64::consts::PI * ((n - i) as f64 - 0.25) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre polynomial value and derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss quadrature of a scalar function over `[0,1]`.
pub fn integrate_line_gq(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let (x, w) = gauss_nodes(n);
    x.iter().zip(w.iter()).map(|(xi, wi)| wi * f(*xi)).sum()
}

// ---------------------------------------------------------------------------
// point classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    /// Within the tolerance band of some boundary curve.
    Boundary,
}

/// Winding-number classification of a point against a trimmed region
/// (outer loops counter-clockwise, holes clockwise: material has winding 1).
/// Points within `geom_tol` of any curve report `Boundary`.
pub fn point_in_region(region: &TrimmedRegion2D, point: [f64; 2], geom_tol: f64) -> Location {
    for curve in region.curves() {
        if distance_below(curve, point, geom_tol) {
            return Location::Boundary;
        }
    }
    let w = winding_number(region, point);
    if w == 1 {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Total winding number of the region's loops around `point`, by adaptive
/// angle accumulation over subdivided curves.
pub fn winding_number(region: &TrimmedRegion2D, point: [f64; 2]) -> i64 {
    let mut total = 0.0;
    for curve in region.curves() {
        total += winding_angle(curve, point, 0);
    }
    libm::round(total / (2.0 * core::f64::consts::PI)) as i64
}

fn control_bbox(curve: &BezierCurve) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for k in 0..2 {
        for c in curve.map().component(k).coeffs() {
            lo[k] = lo[k].min(*c);
            hi[k] = hi[k].max(*c);
        }
    }
    (lo, hi)
}

fn bbox_distance(lo: [f64; 2], hi: [f64; 2], p: [f64; 2]) -> f64 {
    let dx = (lo[0] - p[0]).max(0.0).max(p[0] - hi[0]);
    let dy = (lo[1] - p[1]).max(0.0).max(p[1] - hi[1]);
    libm::sqrt(dx * dx + dy * dy)
}

fn signed_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])
}

/// Signed angle subtended at `p` by the curve; exact once the curve's hull
/// is small as seen from `p`, else subdivide.
fn winding_angle(curve: &BezierCurve, p: [f64; 2], depth: usize) -> f64 {
    let (lo, hi) = control_bbox(curve);
    let d = bbox_distance(lo, hi, p);
    let diag = libm::sqrt(
        (hi[0] - lo[0]) * (hi[0] - lo[0]) + (hi[1] - lo[1]) * (hi[1] - lo[1]),
    );
    if (d > 0.0 && diag < d) || depth >= 52 {
        let s = curve.start();
        let e = curve.end();
        return signed_angle([s[0] - p[0], s[1] - p[1]], [e[0] - p[0], e[1] - p[1]]);
    }
    let left = curve.restrict(0.0, 0.5);
    let right = curve.restrict(0.5, 1.0);
    winding_angle(&left, p, depth + 1) + winding_angle(&right, p, depth + 1)
}

/// Whether the distance from `p` to the curve is below `band`, by hull
/// pruning and chord refinement.
pub fn distance_below(curve: &BezierCurve, p: [f64; 2], band: f64) -> bool {
    fn seg_dist(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
        let ab = [b[0] - a[0], b[1] - a[1]];
        let ap = [p[0] - a[0], p[1] - a[1]];
        let denom = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if denom == 0.0 {
            0.0
        } else {
            ((ap[0] * ab[0] + ap[1] * ab[1]) / denom).clamp(0.0, 1.0)
        };
        let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
        libm::sqrt(d[0] * d[0] + d[1] * d[1])
    }
    fn go(curve: &BezierCurve, p: [f64; 2], band: f64, depth: usize) -> bool {
        let (lo, hi) = control_bbox(curve);
        if bbox_distance(lo, hi, p) > band {
            return false;
        }
        let s = curve.start();
        let e = curve.end();
        let chord = seg_dist([s[0], s[1]], [e[0], e[1]], p);
        // hull flatness: max control-point distance to the chord
        let mut flat = 0.0f64;
        for cp in curve.control_points() {
            flat = flat.max(seg_dist([s[0], s[1]], [e[0], e[1]], [cp[0], cp[1]]));
        }
        if flat < 0.25 * band || depth >= 48 {
            return chord <= band + flat;
        }
        go(&curve.restrict(0.0, 0.5), p, band, depth + 1)
            || go(&curve.restrict(0.5, 1.0), p, band, depth + 1)
    }
    go(curve, p, band, 0)
}

// ---------------------------------------------------------------------------
// region quadrature
// ---------------------------------------------------------------------------

// degree-5 symmetric triangle rule (barycentric abscissae)
const TRI_RULE: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    (
        [0.059715871789770, 0.470142064105115, 0.470142064105115],
        0.132394152788506,
    ),
    (
        [0.470142064105115, 0.059715871789770, 0.470142064105115],
        0.132394152788506,
    ),
    (
        [0.470142064105115, 0.470142064105115, 0.059715871789770],
        0.132394152788506,
    ),
    (
        [0.797426985353087, 0.101286507323456, 0.101286507323456],
        0.125939180544827,
    ),
    (
        [0.101286507323456, 0.797426985353087, 0.101286507323456],
        0.125939180544827,
    ),
    (
        [0.101286507323456, 0.101286507323456, 0.797426985353087],
        0.125939180544827,
    ),
];

#[derive(Debug, Clone)]
enum QuadCell {
    /// Fully interior rectangle: tensor Gauss.
    Full { lo: [f64; 2], hi: [f64; 2] },
    /// Boundary leaf clipped into signed triangles.
    Clipped {
        triangles: Vec<[[f64; 2]; 3]>,
        err: f64,
        rep: [f64; 2],
    },
    /// Fallback boundary leaf: inside-sampled points, each carrying an
    /// equal share of the cell area.
    Sampled {
        points: Vec<[f64; 2]>,
        weight: f64,
        err: f64,
        rep: [f64; 2],
    },
}

/// Cached quadrature decomposition of a trimmed region. Building it是 the
/// expensive part; integrating different functions against it is cheap.
#[derive(Debug, Clone)]
pub struct RegionQuadrature {
    cells: Vec<QuadCell>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Sum of per-cell geometric area uncertainty.
    pub geometry_error: f64,
}

const CHORDS_PER_FRAGMENT: usize = 6;

impl RegionQuadrature {
    pub fn build(region: &TrimmedRegion2D, depth: usize, n: usize) -> Self {
        assert!(depth <= 12, "subdivision depth capped at 12");
        let (nodes, weights) = gauss_nodes(n);
        let (blo, bhi) = region.bounding_box();
        // pad so boundary-on-bbox cases keep their curves strictly inside
        let pad = 1e-9 * ((bhi[0] - blo[0]).abs() + (bhi[1] - blo[1]).abs()).max(1e-9);
        let lo = [blo[0] - pad, blo[1] - pad];
        let hi = [bhi[0] + pad, bhi[1] + pad];
        let fragments: Vec<Fragment> = region
            .curves()
            .filter(|c| c.polygon_length() > 0.0)
            .map(|c| Fragment::whole(c))
            .collect();
        let mut cells = Vec::new();
        subdivide_region(region, lo, hi, &fragments, depth, &mut cells);
        let geometry_error = cells
            .iter()
            .map(|c| match c {
                QuadCell::Full { .. } => 0.0,
                QuadCell::Clipped { err, .. } | QuadCell::Sampled { err, .. } => *err,
            })
            .sum();
        RegionQuadrature {
            cells,
            nodes,
            weights,
            geometry_error,
        }
    }

    /// Integral of `f` over the region with an error estimate combining the
    /// geometric uncertainty of each boundary leaf with the local magnitude
    /// of `f`.
    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> (f64, f64) {
        let mut total = 0.0;
        let mut err = 0.0;
        for cell in &self.cells {
            match cell {
                QuadCell::Full { lo, hi } => {
                    let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
                    let mut acc = 0.0;
                    for (xi, wi) in self.nodes.iter().zip(self.weights.iter()) {
                        for (yj, wj) in self.nodes.iter().zip(self.weights.iter()) {
                            acc += wi * wj * f([lo[0] + w * xi, lo[1] + h * yj]);
                        }
                    }
                    total += acc * w * h;
                }
                QuadCell::Clipped { triangles, err: e, rep } => {
                    for tri in triangles {
                        let area2 = (tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1])
                            - (tri[1][1] - tri[0][1]) * (tri[2][0] - tri[0][0]);
                        let mut acc = 0.0;
                        for (bary, w) in TRI_RULE.iter() {
                            let x = bary[0] * tri[0][0] + bary[1] * tri[1][0] + bary[2] * tri[2][0];
                            let y = bary[0] * tri[0][1] + bary[1] * tri[1][1] + bary[2] * tri[2][1];
                            acc += w * f([x, y]);
                        }
                        total += acc * 0.5 * area2;
                    }
                    err += e * f(*rep).abs().max(1e-30);
                }
                QuadCell::Sampled { points, weight, err: e, rep } => {
                    for p in points {
                        total += weight * f(*p);
                    }
                    err += e * f(*rep).abs().max(1e-30);
                }
            }
        }
        (total, err)
    }

    pub fn area(&self) -> (f64, f64) {
        self.integrate(|_| 1.0)
    }

    /// (full, clipped, sampled) cell counts, for diagnostics.
    pub fn cell_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for c in &self.cells {
            match c {
                QuadCell::Full { .. } => counts.0 += 1,
                QuadCell::Clipped { .. } => counts.1 += 1,
                QuadCell::Sampled { .. } => counts.2 += 1,
            }
        }
        counts
    }
}

/// One-shot region integral; prefer [`RegionQuadrature`] when integrating
/// several functions over the same region.
pub fn integrate_region_gq(
    region: &TrimmedRegion2D,
    f: impl Fn([f64; 2]) -> f64,
    depth: usize,
    n: usize,
) -> (f64, f64) {
    RegionQuadrature::build(region, depth, n).integrate(f)
}

fn boxes_overlap(alo: [f64; 2], ahi: [f64; 2], blo: [f64; 2], bhi: [f64; 2]) -> bool {
    alo[0] <= bhi[0] && blo[0] <= ahi[0] && alo[1] <= bhi[1] && blo[1] <= ahi[1]
}

/// A parameter window of a trimming curve, restricted so its control hull
/// localises with the tree cells.
#[derive(Clone)]
struct Fragment {
    bez: BezierCurve,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Fragment {
    fn whole(curve: &BezierCurve) -> Self {
        let (lo, hi) = control_bbox(curve);
        Fragment {
            bez: curve.clone(),
            lo,
            hi,
        }
    }

    fn halves(&self) -> (Fragment, Fragment) {
        let a = self.bez.restrict(0.0, 0.5);
        let b = self.bez.restrict(0.5, 1.0);
        (Fragment::whole(&a), Fragment::whole(&b))
    }
}

fn subdivide_region(
    region: &TrimmedRegion2D,
    lo: [f64; 2],
    hi: [f64; 2],
    active: &[Fragment],
    depth_left: usize,
    out: &mut Vec<QuadCell>,
) {
    let here: Vec<&Fragment> = active
        .iter()
        .filter(|f| boxes_overlap(f.lo, f.hi, lo, hi))
        .collect();
    if here.is_empty() {
        let centre = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        if point_in_region(region, centre, GEOM_TOL) == Location::Inside {
            out.push(QuadCell::Full { lo, hi });
        }
        return;
    }
    if depth_left == 0 {
        let frags: Vec<&BezierCurve> = here.iter().map(|f| &f.bez).collect();
        out.push(clip_leaf(region, &frags, lo, hi));
        return;
    }
    // split the active fragments once per level so hulls shrink with cells
    let mut split: Vec<Fragment> = Vec::with_capacity(here.len() * 2);
    for f in here {
        let (a, b) = f.halves();
        split.push(a);
        split.push(b);
    }
    let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let quads = [
        ([lo[0], lo[1]], [mid[0], mid[1]]),
        ([mid[0], lo[1]], [hi[0], mid[1]]),
        ([lo[0], mid[1]], [mid[0], hi[1]]),
        ([mid[0], mid[1]], [hi[0], hi[1]]),
    ];
    for (qlo, qhi) in quads {
        subdivide_region(region, qlo, qhi, &split, depth_left - 1, out);
    }
}

/// Clips the active curves to the leaf cell with chord polylines and builds
/// signed fan triangles of the material part. Falls back to inside-fraction
/// sampling when the local structure cannot be resolved.
fn clip_leaf(
    region: &TrimmedRegion2D,
    fragments: &[&BezierCurve],
    lo: [f64; 2],
    hi: [f64; 2],
) -> QuadCell {
    let size = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let rep = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    match try_clip_leaf(region, fragments, lo, hi) {
        Some(cell) => cell,
        None => {
            // 16x16 inside sampling
            let mut points = Vec::new();
            let n = 16;
            for i in 0..n {
                for j in 0..n {
                    let p = [
                        lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / n as f64,
                        lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / n as f64,
                    ];
                    if point_in_region(region, p, 1e-14 * size) == Location::Inside {
                        points.push(p);
                    }
                }
            }
            let cell_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
            QuadCell::Sampled {
                points,
                weight: cell_area / (n * n) as f64,
                err: cell_area * 4.0 / n as f64,
                rep,
            }
        }
    }
}

fn try_clip_leaf(
    region: &TrimmedRegion2D,
    fragments: &[&BezierCurve],
    lo: [f64; 2],
    hi: [f64; 2],
) -> Option<QuadCell> {
    let size = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let snap = 1e-9 * size;
    // 1. windows of fragments inside the cell, as sampled polylines
    let mut chains: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut err = 0.0;
    for curve in fragments {
        let mut ts = vec![0.0, 1.0];
        for axis in 0..2 {
            for value in [lo[axis], hi[axis]] {
                let diff = curve.component(axis).add(&crate::bernstein::Poly1::constant(-value));
                if diff.max_abs_coeff() < 1e-12 * (1.0 + value.abs()) {
                    continue; // curve runs along this line
                }
                match isolate_roots(&diff) {
                    Ok(roots) => ts.extend(roots.iter().map(|r| r.t)),
                    Err(RootFindError::DegenerateInput) => continue,
                    Err(RootFindError::ClusteredRoots) => return None,
                }
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for w in ts.windows(2) {
            let (ta, tb) = (w[0], w[1]);
            if tb - ta < 1e-12 {
                continue;
            }
            let mid = curve.point_at(0.5 * (ta + tb));
            let inside_cell = mid[0] >= lo[0] - snap
                && mid[0] <= hi[0] + snap
                && mid[1] >= lo[1] - snap
                && mid[1] <= hi[1] + snap;
            if !inside_cell {
                continue;
            }
            // sampled polyline with sagitta-based error tally
            let mut pts = Vec::with_capacity(CHORDS_PER_FRAGMENT + 1);
            for k in 0..=CHORDS_PER_FRAGMENT {
                let t = ta + (tb - ta) * k as f64 / CHORDS_PER_FRAGMENT as f64;
                let p = curve.point_at(t);
                pts.push([p[0], p[1]]);
            }
            for k in 0..CHORDS_PER_FRAGMENT {
                let t = ta + (tb - ta) * (k as f64 + 0.5) / CHORDS_PER_FRAGMENT as f64;
                let p = curve.point_at(t);
                let a = pts[k];
                let b = pts[k + 1];
                let ab = [b[0] - a[0], b[1] - a[1]];
                let len = libm::sqrt(ab[0] * ab[0] + ab[1] * ab[1]);
                if len == 0.0 {
                    continue;
                }
                let sag = ((p[0] - a[0]) * ab[1] - (p[1] - a[1]) * ab[0]).abs() / len;
                err += 2.0 / 3.0 * sag * len;
            }
            chains.push(pts);
        }
    }

    let rep = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    if chains.is_empty() {
        return Some(if point_in_region(region, rep, GEOM_TOL) == Location::Inside {
            QuadCell::Full { lo, hi }
        } else {
            QuadCell::Clipped {
                triangles: Vec::new(),
                err: 0.0,
                rep,
            }
        });
    }

    // 2. stitch chains end-to-start
    let stitched = stitch_chains(chains, 4.0 * snap);
    let mut polygons: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut open: Vec<Vec<[f64; 2]>> = Vec::new();
    for ch in stitched {
        let d0 = dist2(ch[0], *ch.last().unwrap());
        if d0 < (4.0 * snap) * (4.0 * snap) {
            polygons.push(ch);
        } else {
            open.push(ch);
        }
    }

    // 3. open chains must reach the cell boundary; close them by walking the
    // perimeter counter-clockwise
    if !open.is_empty() {
        let closed = walk_perimeter(&mut open, lo, hi, 16.0 * snap)?;
        polygons.extend(closed);
    } else {
        // only interior chains: if the cell boundary itself is in material,
        // the cell rectangle is an additional outer polygon
        let corner_probe = [lo[0] + 1e-3 * size, lo[1] + 1e-3 * size];
        if point_in_region(region, corner_probe, GEOM_TOL) == Location::Inside {
            polygons.push(vec![
                [lo[0], lo[1]],
                [hi[0], lo[1]],
                [hi[0], hi[1]],
                [lo[0], hi[1]],
            ]);
        }
    }

    // 4. signed fan triangulation
    let mut triangles = Vec::new();
    for poly in &polygons {
        if poly.len() < 3 {
            continue;
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for p in poly {
            cx += p[0];
            cy += p[1];
        }
        let c = [cx / poly.len() as f64, cy / poly.len() as f64];
        for k in 0..poly.len() {
            let a = poly[k];
            let b = poly[(k + 1) % poly.len()];
            triangles.push([c, a, b]);
        }
    }
    Some(QuadCell::Clipped { triangles, err, rep })
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1])
}

fn stitch_chains(mut chains: Vec<Vec<[f64; 2]>>, tol: f64) -> Vec<Vec<[f64; 2]>> {
    let tol2 = tol * tol;
    let mut out: Vec<Vec<[f64; 2]>> = Vec::new();
    while let Some(mut chain) = chains.pop() {
        loop {
            let end = *chain.last().unwrap();
            let start = chain[0];
            let mut extended = false;
            for i in 0..chains.len() {
                if dist2(chains[i][0], end) < tol2 {
                    let next = chains.remove(i);
                    chain.extend_from_slice(&next[1..]);
                    extended = true;
                    break;
                }
                if dist2(*chains[i].last().unwrap(), start) < tol2 {
                    let mut prev = chains.remove(i);
                    prev.extend_from_slice(&chain[1..]);
                    chain = prev;
                    extended = true;
                    break;
                }
            }
            if !extended {
                break;
            }
        }
        out.push(chain);
    }
    out
}

/// Perimeter coordinate in `[0,4)` for a boundary point, counter-clockwise
/// from the lower-left corner.
fn perimeter_coord(p: [f64; 2], lo: [f64; 2], hi: [f64; 2], tol: f64) -> Option<f64> {
    let w = hi[0] - lo[0];
    let h = hi[1] - lo[1];
    if (p[1] - lo[1]).abs() < tol {
        return Some(((p[0] - lo[0]) / w).clamp(0.0, 1.0));
    }
    if (p[0] - hi[0]).abs() < tol {
        return Some(1.0 + ((p[1] - lo[1]) / h).clamp(0.0, 1.0));
    }
    if (p[1] - hi[1]).abs() < tol {
        return Some(2.0 + ((hi[0] - p[0]) / w).clamp(0.0, 1.0));
    }
    if (p[0] - lo[0]).abs() < tol {
        return Some(3.0 + ((hi[1] - p[1]) / h).clamp(0.0, 1.0));
    }
    None
}

fn wrap4(s: f64) -> f64 {
    let r = s % 4.0;
    if r < 0.0 {
        r + 4.0
    } else {
        r
    }
}

fn perimeter_point(s: f64, lo: [f64; 2], hi: [f64; 2]) -> [f64; 2] {
    let w = hi[0] - lo[0];
    let h = hi[1] - lo[1];
    let s = wrap4(s);
    if s < 1.0 {
        [lo[0] + s * w, lo[1]]
    } else if s < 2.0 {
        [hi[0], lo[1] + (s - 1.0) * h]
    } else if s < 3.0 {
        [hi[0] - (s - 2.0) * w, hi[1]]
    } else {
        [lo[0], hi[1] - (s - 3.0) * h]
    }
}

/// Closes open chains whose endpoints lie on the cell boundary by walking
/// counter-clockwise along the perimeter to the next chain start.
fn walk_perimeter(
    open: &mut Vec<Vec<[f64; 2]>>,
    lo: [f64; 2],
    hi: [f64; 2],
    tol: f64,
) -> Option<Vec<Vec<[f64; 2]>>> {
    // chain entry: (start_s, end_s, points)
    let mut entries: Vec<(f64, f64, Vec<[f64; 2]>)> = Vec::new();
    for ch in open.drain(..) {
        let s0 = perimeter_coord(ch[0], lo, hi, tol)?;
        let s1 = perimeter_coord(*ch.last().unwrap(), lo, hi, tol)?;
        entries.push((s0, s1, ch));
    }
    let mut used = vec![false; entries.len()];
    let mut polygons = Vec::new();
    for seed in 0..entries.len() {
        if used[seed] {
            continue;
        }
        let mut poly: Vec<[f64; 2]> = Vec::new();
        let mut current = seed;
        let start_s = entries[seed].0;
        for _guard in 0..entries.len() + 1 {
            used[current] = true;
            poly.extend_from_slice(&entries[current].2);
            let from_s = entries[current].1;
            // nearest unused chain start strictly ahead (cyclically); the
            // seed's own start closes the loop
            let mut best: Option<(f64, usize)> = None;
            for (i, e) in entries.iter().enumerate() {
                if used[i] && i != seed {
                    continue;
                }
                let target = if i == seed { start_s } else { e.0 };
                let ahead = wrap4(target - from_s);
                if best.is_none() || ahead < best.unwrap().0 {
                    best = Some((ahead, i));
                }
            }
            let (ahead, next) = best?;
            // insert intervening corners
            let mut corner = libm::ceil(from_s - 1e-12);
            if corner <= from_s {
                corner += 1.0;
            }
            let mut walked = corner - from_s;
            while walked < ahead - 1e-12 {
                poly.push(perimeter_point(corner, lo, hi));
                corner += 1.0;
                walked += 1.0;
            }
            if next == seed {
                break;
            }
            current = next;
        }
        if poly.len() >= 3 {
            polygons.push(poly);
        }
    }
    Some(polygons)
}

// ---------------------------------------------------------------------------
// face / solid quadrature from point evaluations
// ---------------------------------------------------------------------------

/// Surface integral of a pointwise integrand over a trimmed face: the
/// parameter-domain region quadrature applied to `g`.
pub fn integrate_face_gq(
    face: &crate::brep::TrimmedFace,
    g: impl Fn([f64; 2]) -> f64,
    depth: usize,
    n: usize,
) -> (f64, f64) {
    let region = face.param_region();
    integrate_region_gq(&region, g, depth, n)
}

/// Volume integral of a pointwise-evaluable function over a B-Rep solid.
///
/// One divergence pass along the first axis with a numerically accumulated
/// antiderivative: for each boundary face the integrand
/// `E(S(u,v)) N_1(u,v)` is integrated over the trimmed parameter domain,
/// where `E(x) = int_0^{x_1} f(s, x_2, x_3) ds` by `n_inner`-point Gauss and
/// `N` is the cross product of pointwise surface tangents. Shares no
/// coefficient arithmetic with the exact pipeline.
pub fn integrate_solid_fn_gq(
    solid: &BRepSolid,
    f: impl Fn([f64; 3]) -> f64 + Copy,
    depth: usize,
    n: usize,
    n_inner: usize,
) -> (f64, f64) {
    let (gx, gw) = gauss_nodes(n_inner);
    let mut total = 0.0;
    let mut err = 0.0;
    for face in &solid.faces {
        let map = face.surface.map();
        let sign = if face.outward { 1.0 } else { -1.0 };
        let integrand = |uv: [f64; 2]| {
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
            // inner antiderivative along x1 from 0
            let mut e = 0.0;
            for (xi, wi) in gx.iter().zip(gw.iter()) {
                e += wi * f([x[0] * xi, x[1], x[2]]);
            }
            sign * e * x[0] * n1
        };
        let (v, e) = integrate_face_gq(face, integrand, depth, n);
        total += v;
        err += e;
    }
    (total, err)
}

/// Mass and centre of mass from the pointwise path.
pub fn moments_gq(
    solid: &BRepSolid,
    density: impl Fn([f64; 3]) -> f64 + Copy,
    depth: usize,
    n: usize,
    n_inner: usize,
) -> ((f64, f64), [(f64, f64); 3]) {
    let mass = integrate_solid_fn_gq(solid, density, depth, n, n_inner);
    let mut centre = [(0.0, 0.0); 3];
    for k in 0..3 {
        let (v, e) = integrate_solid_fn_gq(
            solid,
            |x: [f64; 3]| density(x) * x[k],
            depth,
            n,
            n_inner,
        );
        centre[k] = (v / mass.0, e / mass.0.abs().max(1e-300));
    }
    (mass, centre)
}

/// Cox-de Boor point evaluation of an open-knot B-spline; the independent
/// oracle for the knot-insertion splitting in the geometry module.
pub fn bspline_eval(knots: &[f64], degree: usize, ctrl: &[Vec<f64>], u: f64) -> Vec<f64> {
    let n = ctrl.len();
    let mut k = degree;
    while k + 1 < n && knots[k + 1] <= u {
        k += 1;
    }
    let mut d: Vec<Vec<f64>> = (0..=degree).map(|j| ctrl[j + k - degree].clone()).collect();
    for r in 1..=degree {
        for j in (r..=degree).rev() {
            let i = j + k - degree;
            let denom = knots[i + 1 + degree - r] - knots[i];
            let alpha = if denom == 0.0 {
                0.0
            } else {
                (u - knots[i]) / denom
            };
            d[j] = d[j - 1]
                .iter()
                .zip(d[j].iter())
                .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
                .collect();
        }
    }
    d[degree].clone()
}
