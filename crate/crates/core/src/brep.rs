//! Geometry data model: Bézier curves and surfaces, trimmed faces bounded by
//! oriented loops, B-Rep solids, and planar trimmed regions.
//!
//! Conventions:
//! * every map is parameterised on `[0,1]` (curves) or `[0,1]^2` (surfaces);
//! * outer trimming loops run counter-clockwise, inner loops clockwise, so
//!   the enclosed material always lies to the left of the boundary;
//! * surface normals are the raw cross product of the parametric tangents;
//!   whether that points out of the solid is carried as an explicit
//!   `outward` flag on the face rather than assumed from parameterisation.
//!
//! Orientation is validated through the analytic signed-area line integral
//! `1/2 ∮ (x dy - y dx)`, evaluated from Bernstein coefficients.

use alloc::vec;
use alloc::vec::Vec;

use crate::bernstein::Poly1;
use crate::linalg::{least_squares, Mat};
use crate::tensor::{PolyN, VecPoly};

/// A polynomial curve in Bernstein form; `d = 2` for parameter-space
/// trimming curves, `d = 3` for physical curves.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierCurve {
    map: VecPoly,
    /// True when the curve lies on the trimming boundary of the domain (as
    /// opposed to closure segments introduced along grid-cell edges).
    pub on_domain_boundary: bool,
}

impl BezierCurve {
    pub fn from_map(map: VecPoly) -> Self {
        assert_eq!(map.arity(), 1, "curve maps are univariate");
        assert!(
            map.dim() == 2 || map.dim() == 3,
            "curves live in 2 or 3 dimensions"
        );
        BezierCurve {
            map,
            on_domain_boundary: true,
        }
    }

    pub fn from_points_2d(points: &[[f64; 2]]) -> Self {
        assert!(points.len() >= 2, "a curve needs at least two control points");
        let comp = |k: usize| {
            PolyN::new(
                vec![points.len() - 1],
                points.iter().map(|p| p[k]).collect(),
            )
        };
        BezierCurve::from_map(VecPoly::new(vec![comp(0), comp(1)]))
    }

    pub fn from_points_3d(points: &[[f64; 3]]) -> Self {
        assert!(points.len() >= 2, "a curve needs at least two control points");
        let comp = |k: usize| {
            PolyN::new(
                vec![points.len() - 1],
                points.iter().map(|p| p[k]).collect(),
            )
        };
        BezierCurve::from_map(VecPoly::new(vec![comp(0), comp(1), comp(2)]))
    }

    pub fn segment_2d(a: [f64; 2], b: [f64; 2]) -> Self {
        BezierCurve::from_points_2d(&[a, b])
    }

    pub fn with_domain_boundary(mut self, value: bool) -> Self {
        self.on_domain_boundary = value;
        self
    }

    pub fn map(&self) -> &VecPoly {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn degree(&self) -> usize {
        self.map
            .components()
            .iter()
            .map(|c| c.degrees()[0])
            .max()
            .unwrap()
    }

    /// Component `k` as a univariate polynomial.
    pub fn component(&self, k: usize) -> Poly1 {
        self.map.component(k).to_poly1()
    }

    pub fn control_points(&self) -> Vec<Vec<f64>> {
        let n = self.map.component(0).coeffs().len();
        // components may carry different degrees after fits; raise to common
        let max_deg = self.degree();
        let comps: Vec<Poly1> = (0..self.dim())
            .map(|k| self.component(k).degree_raise(max_deg))
            .collect();
        let _ = n;
        (0..=max_deg)
            .map(|i| comps.iter().map(|c| c.coeffs()[i]).collect())
            .collect()
    }

    pub fn point_at(&self, t: f64) -> Vec<f64> {
        self.map.eval(&[t])
    }

    pub fn start(&self) -> Vec<f64> {
        self.map
            .components()
            .iter()
            .map(|c| c.coeffs()[0])
            .collect()
    }

    pub fn end(&self) -> Vec<f64> {
        self.map
            .components()
            .iter()
            .map(|c| *c.coeffs().last().unwrap())
            .collect()
    }

    /// Restriction to `[a,b]`, reparameterised to `[0,1]`.
    pub fn restrict(&self, a: f64, b: f64) -> BezierCurve {
        assert!(a < b, "restrict needs a < b");
        let comps = self
            .map
            .components()
            .iter()
            .map(|c| {
                let p = c.to_poly1();
                let (_, right) = p.subdivide(a);
                let local_b = (b - a) / (1.0 - a);
                let (mid, _) = right.subdivide(local_b);
                PolyN::from_poly1(&mid)
            })
            .collect();
        BezierCurve {
            map: VecPoly::new(comps),
            on_domain_boundary: self.on_domain_boundary,
        }
    }

    /// Orientation reversal `t -> 1 - t` (coefficients reversed).
    pub fn reversed(&self) -> BezierCurve {
        let comps = self
            .map
            .components()
            .iter()
            .map(|c| {
                let mut coeffs = c.coeffs().to_vec();
                coeffs.reverse();
                PolyN::new(c.degrees().to_vec(), coeffs)
            })
            .collect();
        BezierCurve {
            map: VecPoly::new(comps),
            on_domain_boundary: self.on_domain_boundary,
        }
    }

    /// Overwrites the first and last control points; used to snap fragment
    /// endpoints exactly onto grid lines after splitting.
    pub fn with_endpoints(&self, start: &[f64], end: &[f64]) -> BezierCurve {
        assert_eq!(start.len(), self.dim());
        assert_eq!(end.len(), self.dim());
        let comps = self
            .map
            .components()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mut coeffs = c.coeffs().to_vec();
                coeffs[0] = start[k];
                let last = coeffs.len() - 1;
                coeffs[last] = end[k];
                PolyN::new(c.degrees().to_vec(), coeffs)
            })
            .collect();
        BezierCurve {
            map: VecPoly::new(comps),
            on_domain_boundary: self.on_domain_boundary,
        }
    }

    /// Per-axis affine image `x_k -> scale_k * x_k + offset_k`.
    pub fn transform_affine(&self, scale: &[f64], offset: &[f64]) -> BezierCurve {
        assert_eq!(scale.len(), self.dim());
        assert_eq!(offset.len(), self.dim());
        let comps = self
            .map
            .components()
            .iter()
            .enumerate()
            .map(|(k, c)| c.affine_values(scale[k], offset[k]))
            .collect();
        BezierCurve {
            map: VecPoly::new(comps),
            on_domain_boundary: self.on_domain_boundary,
        }
    }

    /// Length of the control polygon; an upper bound for the arc length.
    pub fn polygon_length(&self) -> f64 {
        let pts = self.control_points();
        let mut len = 0.0;
        for w in pts.windows(2) {
            let d2: f64 = w[0]
                .iter()
                .zip(w[1].iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            len += libm::sqrt(d2);
        }
        len
    }

    /// Splits at the given interior parameters (sorted, deduplicated).
    pub fn split_at_params(&self, params: &[f64]) -> Vec<BezierCurve> {
        let mut ts: Vec<f64> = params
            .iter()
            .copied()
            .filter(|t| *t > 1e-12 && *t < 1.0 - 1e-12)
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
        let mut out = Vec::with_capacity(ts.len() + 1);
        let mut lo = 0.0;
        for t in ts {
            out.push(self.restrict(lo, t));
            lo = t;
        }
        out.push(self.restrict(lo, 1.0));
        out
    }
}

/// The in-plane normal field of a planar curve: the tangent rotated by -90°,
/// `(c2', -c1')`. For loops with material on the left this points outward.
pub fn curve_normal_field(curve: &BezierCurve) -> VecPoly {
    assert_eq!(curve.dim(), 2, "curve normals are planar");
    curve.map().partial_derivative(0).cross_with_e3()
}

/// A polynomial surface patch mapping `[0,1]^2` into 3-space.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierSurface {
    map: VecPoly,
}

impl BezierSurface {
    pub fn from_map(map: VecPoly) -> Self {
        assert_eq!(map.arity(), 2, "surface maps are bivariate");
        assert_eq!(map.dim(), 3, "surfaces live in 3 dimensions");
        BezierSurface { map }
    }

    /// Control grid with `n1 x n2` points, index `i2` fastest.
    pub fn from_grid(n1: usize, n2: usize, points: &[[f64; 3]]) -> Self {
        assert!(n1 >= 2 && n2 >= 2, "surface needs at least 2x2 control points");
        assert_eq!(points.len(), n1 * n2);
        let comp = |k: usize| {
            PolyN::new(
                vec![n1 - 1, n2 - 1],
                points.iter().map(|p| p[k]).collect(),
            )
        };
        BezierSurface::from_map(VecPoly::new(vec![comp(0), comp(1), comp(2)]))
    }

    pub fn map(&self) -> &VecPoly {
        &self.map
    }

    pub fn degrees(&self) -> [usize; 2] {
        let d = self.map.component(0).degrees();
        [d[0], d[1]]
    }

    pub fn point_at(&self, u: f64, v: f64) -> [f64; 3] {
        let p = self.map.eval(&[u, v]);
        [p[0], p[1], p[2]]
    }

    pub fn transform_affine(&self, scale: &[f64; 3], offset: &[f64; 3]) -> BezierSurface {
        let comps = self
            .map
            .components()
            .iter()
            .enumerate()
            .map(|(k, c)| c.affine_values(scale[k], offset[k]))
            .collect();
        BezierSurface {
            map: VecPoly::new(comps),
        }
    }

    /// Restriction to `[a1,b1] x [a2,b2]`, reparameterised to `[0,1]^2`.
    pub fn restrict(&self, a1: f64, b1: f64, a2: f64, b2: f64) -> BezierSurface {
        let comps = self
            .map
            .components()
            .iter()
            .map(|c| restrict_axis(&restrict_axis(c, 0, a1, b1), 1, a2, b2))
            .collect();
        BezierSurface {
            map: VecPoly::new(comps),
        }
    }
}

/// Restriction of one axis of a PolyN to `[a,b]` via two subdivisions.
fn restrict_axis(poly: &PolyN, axis: usize, a: f64, b: f64) -> PolyN {
    assert!(a < b);
    // subdivide each coefficient line along `axis`
    let right = map_axis_subdivide(poly, axis, a, false);
    let local_b = (b - a) / (1.0 - a);
    map_axis_subdivide(&right, axis, local_b, true)
}

fn map_axis_subdivide(poly: &PolyN, axis: usize, t: f64, keep_left: bool) -> PolyN {
    if t <= 0.0 && !keep_left {
        return poly.clone();
    }
    if t >= 1.0 && keep_left {
        return poly.clone();
    }
    // build from the generic line transform in tensor via a closure
    poly_map_axis(poly, axis, |line| {
        let (l, r) = crate::bernstein::subdivide_slice(line, t);
        if keep_left {
            l
        } else {
            r
        }
    })
}

// Local re-implementation of the axis map (tensor keeps its version private).
fn poly_map_axis(poly: &PolyN, axis: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> PolyN {
    let degrees = poly.degrees();
    let n = degrees[axis] + 1;
    let stride: usize = degrees[axis + 1..].iter().map(|p| p + 1).product();
    let outer = poly.coeffs().len() / (n * stride);
    let mut line = vec![0.0; n];
    let mut out: Vec<f64> = Vec::new();
    let mut new_n = 0;
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for k in 0..n {
                line[k] = poly.coeffs()[base + k * stride];
            }
            let mapped = f(&line);
            if out.is_empty() {
                new_n = mapped.len();
                out = vec![0.0; outer * new_n * stride];
            }
            let new_base = o * new_n * stride + s;
            for (k, v) in mapped.iter().enumerate() {
                out[new_base + k * stride] = *v;
            }
        }
    }
    let mut new_degrees = degrees.to_vec();
    new_degrees[axis] = new_n - 1;
    PolyN::new(new_degrees, out)
}

/// The non-normalised normal field `N = dS/du x dS/dv`. For a surface of
/// uniform degree `s` per axis the components have degrees `(2s-1, 2s-1)`.
pub fn surface_normal_field(surface: &BezierSurface) -> VecPoly {
    let du = surface.map().partial_derivative(0);
    let dv = surface.map().partial_derivative(1);
    du.cross(&dv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    Outer,
    Inner,
}

/// An oriented chain of planar curves delimiting (part of) a trimmed region.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimLoop {
    pub kind: LoopKind,
    pub curves: Vec<BezierCurve>,
}

impl TrimLoop {
    pub fn new(kind: LoopKind, curves: Vec<BezierCurve>) -> Self {
        assert!(!curves.is_empty(), "a loop needs at least one curve");
        assert!(curves.iter().all(|c| c.dim() == 2), "trim loops are planar");
        TrimLoop { kind, curves }
    }

    /// Largest endpoint gap, including the wrap-around closure.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let n = self.curves.len();
        for j in 0..n {
            let e = self.curves[j].end();
            let s = self.curves[(j + 1) % n].start();
            let d2: f64 = e.iter().zip(s.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            worst = worst.max(libm::sqrt(d2));
        }
        worst
    }

    /// Analytic signed area `1/2 ∮ (x dy - y dx)`; positive for
    /// counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        self.curves
            .iter()
            .map(|c| {
                let x = c.component(0);
                let y = c.component(1);
                let term = x.multiply(&y.derivative()).sub(&y.multiply(&x.derivative()));
                0.5 * term.integral_unit()
            })
            .sum()
    }

    pub fn reversed(&self) -> TrimLoop {
        TrimLoop {
            kind: self.kind,
            curves: self.curves.iter().rev().map(|c| c.reversed()).collect(),
        }
    }

    pub fn transform_affine(&self, scale: &[f64], offset: &[f64]) -> TrimLoop {
        TrimLoop {
            kind: self.kind,
            curves: self
                .curves
                .iter()
                .map(|c| c.transform_affine(scale, offset))
                .collect(),
        }
    }

    /// A counter-clockwise rectangle loop of four segments.
    pub fn rectangle(kind: LoopKind, lo: [f64; 2], hi: [f64; 2]) -> TrimLoop {
        let corners = [
            [lo[0], lo[1]],
            [hi[0], lo[1]],
            [hi[0], hi[1]],
            [lo[0], hi[1]],
        ];
        let mut curves: Vec<BezierCurve> = (0..4)
            .map(|i| BezierCurve::segment_2d(corners[i], corners[(i + 1) % 4]))
            .collect();
        if kind == LoopKind::Inner {
            curves = curves.into_iter().rev().map(|c| c.reversed()).collect();
        }
        TrimLoop::new(kind, curves)
    }
}

/// A surface patch with its active parameter region delimited by loops.
/// No loops means the whole `[0,1]^2` domain is active.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimmedFace {
    pub surface: BezierSurface,
    pub loops: Vec<TrimLoop>,
    /// Whether `dS/du x dS/dv` points out of the enclosed solid.
    pub outward: bool,
    /// True when the face lies on the trimming boundary of the domain.
    pub on_domain_boundary: bool,
}

impl TrimmedFace {
    pub fn untrimmed(surface: BezierSurface, outward: bool) -> Self {
        TrimmedFace {
            surface,
            loops: Vec::new(),
            outward,
            on_domain_boundary: true,
        }
    }

    pub fn trimmed(surface: BezierSurface, loops: Vec<TrimLoop>, outward: bool) -> Self {
        TrimmedFace {
            surface,
            loops,
            outward,
            on_domain_boundary: true,
        }
    }

    pub fn is_untrimmed(&self) -> bool {
        self.loops.is_empty()
    }

    /// The face's active parameter region as a planar trimmed region.
    pub fn param_region(&self) -> TrimmedRegion2D {
        if self.is_untrimmed() {
            TrimmedRegion2D {
                loops: vec![TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0])],
            }
        } else {
            TrimmedRegion2D {
                loops: self.loops.clone(),
            }
        }
    }
}

/// A solid described by its (assumed watertight) boundary faces. Closure is
/// not checked geometrically; the divergence-consistency property of the
/// integrator is the operational watertightness test.
#[derive(Debug, Clone, PartialEq)]
pub struct BRepSolid {
    pub faces: Vec<TrimmedFace>,
}

impl BRepSolid {
    pub fn new(faces: Vec<TrimmedFace>) -> Self {
        assert!(!faces.is_empty(), "a solid needs at least one face");
        BRepSolid { faces }
    }

    /// An axis-aligned box `[lo, hi]` as six untrimmed planar faces with
    /// outward-pointing parametric normals.
    pub fn axis_box(lo: [f64; 3], hi: [f64; 3]) -> BRepSolid {
        let mut faces = Vec::with_capacity(6);
        // for each axis k, the two faces at x_k = lo\hi; the remaining axes
        // (a, b) parameterise the patch so that du x dv = +e_k
        for k in 0..3 {
            let a = (k + 1) % 3;
            let b = (k + 2) % 3;
            for (value, outward_is_plus) in [(lo[k], false), (hi[k], true)] {
                let mut pts = Vec::with_capacity(4);
                // grid with i2 (axis b) fastest
                for ia in 0..2 {
                    for ib in 0..2 {
                        let mut p = [0.0; 3];
                        p[k] = value;
                        p[a] = if ia == 0 { lo[a] } else { hi[a] };
                        p[b] = if ib == 0 { lo[b] } else { hi[b] };
                        pts.push(p);
                    }
                }
                let surface = BezierSurface::from_grid(2, 2, &pts);
                // du x dv = e_a x e_b = e_k; outward on the hi face
                faces.push(TrimmedFace::untrimmed(surface, outward_is_plus));
            }
        }
        BRepSolid::new(faces)
    }
}

/// A planar domain bounded by oriented loops (outer CCW, holes CW).
#[derive(Debug, Clone, PartialEq)]
pub struct TrimmedRegion2D {
    pub loops: Vec<TrimLoop>,
}

impl TrimmedRegion2D {
    pub fn new(loops: Vec<TrimLoop>) -> Self {
        assert!(!loops.is_empty(), "a region needs at least one loop");
        TrimmedRegion2D { loops }
    }

    pub fn unit_square() -> Self {
        TrimmedRegion2D::new(vec![TrimLoop::rectangle(
            LoopKind::Outer,
            [0.0, 0.0],
            [1.0, 1.0],
        )])
    }

    pub fn signed_area(&self) -> f64 {
        self.loops.iter().map(TrimLoop::signed_area).sum()
    }

    pub fn transform_affine(&self, scale: &[f64], offset: &[f64]) -> TrimmedRegion2D {
        TrimmedRegion2D {
            loops: self
                .loops
                .iter()
                .map(|l| l.transform_affine(scale, offset))
                .collect(),
        }
    }

    pub fn curves(&self) -> impl Iterator<Item = &BezierCurve> {
        self.loops.iter().flat_map(|l| l.curves.iter())
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in self.curves() {
            for p in c.control_points() {
                for k in 0..2 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
        }
        (lo, hi)
    }
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    LoopNotClosed {
        loop_index: usize,
        residual: f64,
    },
    OrientationMismatch {
        loop_index: usize,
        signed_area: f64,
    },
    MultipleOuterLoops {
        count: usize,
    },
    InnerLoopNotNested {
        loop_index: usize,
    },
    DegenerateCurve {
        loop_index: usize,
        curve_index: usize,
        length: f64,
    },
}

impl core::fmt::Display for Issue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Issue::LoopNotClosed { loop_index, residual } => {
                write!(f, "loop {loop_index} not closed (residual {residual:.3e})")
            }
            Issue::OrientationMismatch { loop_index, signed_area } => write!(
                f,
                "loop {loop_index} orientation does not match its kind (signed area {signed_area:.3e})"
            ),
            Issue::MultipleOuterLoops { count } => {
                write!(f, "face has {count} outer loops (expected at most one)")
            }
            Issue::InnerLoopNotNested { loop_index } => {
                write!(f, "inner loop {loop_index} lies outside the outer region")
            }
            Issue::DegenerateCurve { loop_index, curve_index, length } => write!(
                f,
                "curve {curve_index} of loop {loop_index} is degenerate (length {length:.3e})"
            ),
        }
    }
}

/// One validation finding; `face` is set when validating a solid.
#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub face: Option<usize>,
    pub issue: Issue,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub findings: Vec<Finding>,
}

impl Diagnostics {
    pub fn pass(&self) -> bool {
        self.findings.is_empty()
    }

    fn push(&mut self, face: Option<usize>, issue: Issue) {
        self.findings.push(Finding { face, issue });
    }
}

impl core::fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.findings.is_empty() {
            return write!(f, "geometry valid");
        }
        for finding in &self.findings {
            match finding.face {
                Some(i) => writeln!(f, "face {i}: {}", finding.issue)?,
                None => writeln!(f, "{}", finding.issue)?,
            }
        }
        Ok(())
    }
}

fn validate_loops(
    loops: &[TrimLoop],
    geom_tol: f64,
    face: Option<usize>,
    check_single_outer: bool,
    out: &mut Diagnostics,
) {
    // reference scale for the area threshold
    for (li, lp) in loops.iter().enumerate() {
        let residual = lp.closure_residual();
        if residual > geom_tol {
            out.push(face, Issue::LoopNotClosed { loop_index: li, residual });
        }
        for (ci, c) in lp.curves.iter().enumerate() {
            let len = c.polygon_length();
            if len < geom_tol {
                out.push(
                    face,
                    Issue::DegenerateCurve {
                        loop_index: li,
                        curve_index: ci,
                        length: len,
                    },
                );
            }
        }
        let area = lp.signed_area();
        let ok = match lp.kind {
            LoopKind::Outer => area > 0.0,
            LoopKind::Inner => area < 0.0,
        };
        if !ok {
            out.push(
                face,
                Issue::OrientationMismatch {
                    loop_index: li,
                    signed_area: area,
                },
            );
        }
    }
    if check_single_outer {
        let outer = loops.iter().filter(|l| l.kind == LoopKind::Outer).count();
        if outer > 1 {
            out.push(face, Issue::MultipleOuterLoops { count: outer });
        }
    }
    // nesting: inner-loop curve midpoints must sit inside the outer region
    let outers: Vec<&TrimLoop> = loops.iter().filter(|l| l.kind == LoopKind::Outer).collect();
    if !outers.is_empty() {
        for (li, lp) in loops.iter().enumerate() {
            if lp.kind != LoopKind::Inner {
                continue;
            }
            for c in &lp.curves {
                let mid = c.point_at(0.5);
                let w: f64 = outers
                    .iter()
                    .map(|o| winding_sampled(o, [mid[0], mid[1]], 64))
                    .sum();
                if libm::round(w) < 1.0 {
                    out.push(face, Issue::InnerLoopNotNested { loop_index: li });
                    break;
                }
            }
        }
    }
}

/// Winding number of `point` with respect to a sampled polyline of the loop.
/// Diagnostic quality only; the oracle module carries the certified version.
fn winding_sampled(lp: &TrimLoop, point: [f64; 2], samples_per_curve: usize) -> f64 {
    let mut total = 0.0;
    let mut prev: Option<[f64; 2]> = None;
    let mut first: Option<[f64; 2]> = None;
    for c in &lp.curves {
        for k in 0..samples_per_curve {
            let t = k as f64 / samples_per_curve as f64;
            let p = c.point_at(t);
            let cur = [p[0] - point[0], p[1] - point[1]];
            if let Some(pr) = prev {
                total += libm::atan2(pr[0] * cur[1] - pr[1] * cur[0], pr[0] * cur[0] + pr[1] * cur[1]);
            } else {
                first = Some(cur);
            }
            prev = Some(cur);
        }
    }
    if let (Some(pr), Some(fi)) = (prev, first) {
        total += libm::atan2(pr[0] * fi[1] - pr[1] * fi[0], pr[0] * fi[0] + pr[1] * fi[1]);
    }
    total / (2.0 * core::f64::consts::PI)
}

/// Loop-closure, orientation and nesting diagnostics for a planar region.
pub fn validate_region(region: &TrimmedRegion2D, geom_tol: f64) -> Diagnostics {
    let mut d = Diagnostics::default();
    validate_loops(&region.loops, geom_tol, None, false, &mut d);
    d
}

/// Diagnostics for a face's parameter-domain loops.
pub fn validate_face(face: &TrimmedFace, geom_tol: f64) -> Diagnostics {
    let mut d = Diagnostics::default();
    validate_loops(&face.loops, geom_tol, None, true, &mut d);
    d
}

/// Diagnostics for every face of a solid.
pub fn validate_solid(solid: &BRepSolid, geom_tol: f64) -> Diagnostics {
    let mut d = Diagnostics::default();
    for (fi, face) in solid.faces.iter().enumerate() {
        validate_loops(&face.loops, geom_tol, Some(fi), true, &mut d);
    }
    d
}

// ---------------------------------------------------------------------------
// B-spline -> Bézier splitting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum BsplineError {
    KnotCountMismatch { knots: usize, expected: usize },
    KnotsNotMonotone,
    NotOpenKnotVector,
    EmptySpan,
}

impl core::fmt::Display for BsplineError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BsplineError::KnotCountMismatch { knots, expected } => {
                write!(f, "knot vector has {knots} entries, expected {expected}")
            }
            BsplineError::KnotsNotMonotone => write!(f, "knot vector is not non-decreasing"),
            BsplineError::NotOpenKnotVector => {
                write!(f, "first/last knot multiplicity must equal degree + 1")
            }
            BsplineError::EmptySpan => write!(f, "knot vector contains no non-empty span"),
        }
    }
}

fn check_knots(knots: &[f64], degree: usize, n_ctrl: usize) -> Result<(), BsplineError> {
    let expected = n_ctrl + degree + 1;
    if knots.len() != expected {
        return Err(BsplineError::KnotCountMismatch {
            knots: knots.len(),
            expected,
        });
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(BsplineError::KnotsNotMonotone);
    }
    let first = knots[0];
    let last = *knots.last().unwrap();
    if knots[..=degree].iter().any(|k| *k != first)
        || knots[knots.len() - degree - 1..].iter().any(|k| *k != last)
    {
        return Err(BsplineError::NotOpenKnotVector);
    }
    if last <= first {
        return Err(BsplineError::EmptySpan);
    }
    Ok(())
}

/// Boehm single-knot insertion on generic control points.
fn insert_knot(knots: &mut Vec<f64>, ctrl: &mut Vec<Vec<f64>>, degree: usize, u: f64) {
    // span index: largest k with knots[k] <= u < knots[k+1]
    let mut k = degree;
    while k + 1 < knots.len() - degree && knots[k + 1] <= u {
        k += 1;
    }
    let mut new_ctrl: Vec<Vec<f64>> = Vec::with_capacity(ctrl.len() + 1);
    new_ctrl.extend_from_slice(&ctrl[..=k - degree]);
    for i in (k - degree + 1)..=k {
        let denom = knots[i + degree] - knots[i];
        let a = if denom == 0.0 { 0.0 } else { (u - knots[i]) / denom };
        let q: Vec<f64> = ctrl[i - 1]
            .iter()
            .zip(ctrl[i].iter())
            .map(|(p0, p1)| (1.0 - a) * p0 + a * p1)
            .collect();
        new_ctrl.push(q);
    }
    new_ctrl.extend_from_slice(&ctrl[k..]);
    *ctrl = new_ctrl;
    knots.insert(k + 1, u);
}

/// Splits an open-knot B-spline curve into its Bézier segments by knot
/// insertion; each segment is reparameterised to `[0,1]`. Control points are
/// generic `d`-vectors.
pub fn split_bspline_curve(
    knots: &[f64],
    degree: usize,
    control_points: &[Vec<f64>],
) -> Result<Vec<Vec<Vec<f64>>>, BsplineError> {
    check_knots(knots, degree, control_points.len())?;
    let mut k = knots.to_vec();
    let mut ctrl = control_points.to_vec();
    // raise every interior knot to full multiplicity
    let mut u_idx = degree + 1;
    while u_idx < k.len() - degree - 1 {
        let u = k[u_idx];
        let mult = k.iter().filter(|x| **x == u).count();
        for _ in mult..degree {
            insert_knot(&mut k, &mut ctrl, degree, u);
        }
        // skip the (now full-multiplicity) run
        u_idx += degree - mult.min(degree) + mult;
    }
    // distinct spans -> segments
    let mut segments = Vec::new();
    let mut start = 0usize;
    let mut span_left = k[degree];
    for i in degree + 1..k.len() - degree {
        if k[i] > span_left {
            segments.push(ctrl[start..start + degree + 1].to_vec());
            start += degree;
            span_left = k[i];
        }
    }
    Ok(segments)
}

/// Splits an open-knot B-spline surface into Bézier patches. The control net
/// is indexed `net[i1][i2]` with `d`-vector entries; returned patches keep
/// that layout.
#[allow(clippy::type_complexity)]
pub fn split_bspline_surface(
    knots_u: &[f64],
    knots_v: &[f64],
    degree_u: usize,
    degree_v: usize,
    net: &[Vec<Vec<f64>>],
) -> Result<Vec<Vec<Vec<Vec<Vec<f64>>>>>, BsplineError> {
    // split along u: treat each row-of-rows as one flattened control point
    let n2 = net[0].len();
    let d = net[0][0].len();
    let flat_u: Vec<Vec<f64>> = net
        .iter()
        .map(|row| row.iter().flat_map(|p| p.iter().copied()).collect())
        .collect();
    let segs_u = split_bspline_curve(knots_u, degree_u, &flat_u)?;
    // then along v within each u-segment
    let mut patches_rows = Vec::new();
    for seg in segs_u {
        // unflatten: seg is (degree_u+1) rows of n2*d floats
        let rows: Vec<Vec<Vec<f64>>> = seg
            .iter()
            .map(|flat| (0..n2).map(|j| flat[j * d..(j + 1) * d].to_vec()).collect())
            .collect();
        // flatten the other way for the v-split
        let flat_v: Vec<Vec<f64>> = (0..n2)
            .map(|j| {
                rows.iter()
                    .flat_map(|row| row[j].iter().copied())
                    .collect()
            })
            .collect();
        let segs_v = split_bspline_curve(knots_v, degree_v, &flat_v)?;
        let n1 = degree_u + 1;
        let mut patch_row = Vec::new();
        for seg_v in segs_v {
            // seg_v: (degree_v+1) columns of n1*d floats
            let patch: Vec<Vec<Vec<f64>>> = (0..n1)
                .map(|i| {
                    seg_v
                        .iter()
                        .map(|col| col[i * d..(i + 1) * d].to_vec())
                        .collect()
                })
                .collect();
            patch_row.push(patch);
        }
        patches_rows.push(patch_row);
    }
    Ok(patches_rows)
}

// ---------------------------------------------------------------------------
// least-squares Bézier fitting
// ---------------------------------------------------------------------------

/// Least-squares fit of a planar Bézier curve of the given degree through
/// `(t, point)` samples, with both endpoints interpolated exactly. Used to
/// replace higher-degree or non-polynomial boundary traces per element.
pub fn fit_bezier_curve_2d(
    samples: &[(f64, [f64; 2])],
    degree: usize,
    start: [f64; 2],
    end: [f64; 2],
) -> BezierCurve {
    assert!(degree >= 1);
    assert!(
        samples.len() >= degree.saturating_sub(1),
        "not enough samples for the requested degree"
    );
    if degree == 1 {
        return BezierCurve::segment_2d(start, end);
    }
    let binom = crate::bernstein::pascal_row(degree);
    let basis = |i: usize, t: f64| {
        let mut v = binom[i];
        for _ in 0..i {
            v *= t;
        }
        for _ in 0..(degree - i) {
            v *= 1.0 - t;
        }
        v
    };
    // unknowns: interior control points, one least-squares problem per axis
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|(t, _)| (1..degree).map(|i| basis(i, *t)).collect())
        .collect();
    let a = Mat::from_rows(rows);
    let mut interior: Vec<Vec<f64>> = Vec::new();
    for axis in 0..2 {
        let b: Vec<f64> = samples
            .iter()
            .map(|(t, p)| p[axis] - start[axis] * basis(0, *t) - end[axis] * basis(degree, *t))
            .collect();
        interior.push(least_squares(&a, &b).expect("fit system is SPD"));
    }
    let mut pts = Vec::with_capacity(degree + 1);
    pts.push(start);
    for i in 0..degree - 1 {
        pts.push([interior[0][i], interior[1][i]]);
    }
    pts.push(end);
    BezierCurve::from_points_2d(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Cox-de Boor point evaluation, the independent oracle for splitting.
    fn de_boor(knots: &[f64], degree: usize, ctrl: &[Vec<f64>], u: f64) -> Vec<f64> {
        let n = ctrl.len();
        // find span
        let mut k = degree;
        while k + 1 < n && knots[k + 1] <= u {
            k += 1;
        }
        let mut d: Vec<Vec<f64>> = (0..=degree).map(|j| ctrl[j + k - degree].clone()).collect();
        for r in 1..=degree {
            for j in (r..=degree).rev() {
                let i = j + k - degree;
                let denom = knots[i + 1 + degree - r] - knots[i];
                let alpha = if denom == 0.0 { 0.0 } else { (u - knots[i]) / denom };
                d[j] = d[j - 1]
                    .iter()
                    .zip(d[j].iter())
                    .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
                    .collect();
            }
        }
        d[degree].clone()
    }

    #[test]
    fn planar_square_normal_is_e3() {
        let pts = [
            [0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
        ];
        let s = BezierSurface::from_grid(2, 2, &pts);
        let n = surface_normal_field(&s);
        let v = n.eval(&[0.3, 0.7]);
        assert!((v[0]).abs() < 1e-14 && (v[1]).abs() < 1e-14 && (v[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn swapped_axes_flip_normal() {
        // swap the parameter roles: normal flips to -e3
        let pts = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
        ];
        let s = BezierSurface::from_grid(2, 2, &pts);
        let v = surface_normal_field(&s).eval(&[0.3, 0.7]);
        assert!((v[2] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn curved_surface_normal_matches_finite_differences() {
        let pts = [
            [0.0, 0.0, 0.0],
            [0.5, 0.0, 0.2],
            [1.0, 0.1, 0.0],
            [0.0, 0.5, 0.1],
            [0.5, 0.6, 0.4],
            [1.0, 0.5, 0.1],
            [0.0, 1.0, 0.0],
            [0.6, 1.0, 0.3],
            [1.0, 1.0, 0.1],
        ];
        // grid layout: i2 fastest means rows above are (i1, i2) pairs in order
        let s = BezierSurface::from_grid(3, 3, &pts);
        let n = surface_normal_field(&s);
        let eps = 1e-6;
        for i in 1..5 {
            for j in 1..5 {
                let u = i as f64 / 5.0;
                let v = j as f64 / 5.0;
                let du = [
                    (s.point_at(u + eps, v)[0] - s.point_at(u - eps, v)[0]) / (2.0 * eps),
                    (s.point_at(u + eps, v)[1] - s.point_at(u - eps, v)[1]) / (2.0 * eps),
                    (s.point_at(u + eps, v)[2] - s.point_at(u - eps, v)[2]) / (2.0 * eps),
                ];
                let dv = [
                    (s.point_at(u, v + eps)[0] - s.point_at(u, v - eps)[0]) / (2.0 * eps),
                    (s.point_at(u, v + eps)[1] - s.point_at(u, v - eps)[1]) / (2.0 * eps),
                    (s.point_at(u, v + eps)[2] - s.point_at(u, v - eps)[2]) / (2.0 * eps),
                ];
                let fd = [
                    du[1] * dv[2] - du[2] * dv[1],
                    du[2] * dv[0] - du[0] * dv[2],
                    du[0] * dv[1] - du[1] * dv[0],
                ];
                let got = n.eval(&[u, v]);
                for (a, b) in got.iter().zip(fd.iter()) {
                    assert!((a - b).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn segment_normals() {
        let c = BezierCurve::segment_2d([0.0, 0.0], [1.0, 0.0]);
        let n = curve_normal_field(&c);
        let v = n.eval(&[0.5]);
        assert!((v[0]).abs() < 1e-15 && (v[1] + 1.0).abs() < 1e-15);

        let c = BezierCurve::segment_2d([0.0, 0.0], [0.0, 1.0]);
        let v = curve_normal_field(&c).eval(&[0.5]);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1]).abs() < 1e-15);
    }

    #[test]
    fn arc_normal_perpendicular_to_tangent() {
        let c = BezierCurve::from_points_2d(&[[0.0, 0.0], [0.5, 0.8], [1.0, 0.0]]);
        let tangent = c.map().partial_derivative(0);
        let normal = curve_normal_field(&c);
        let dot = tangent.dot(&normal);
        assert!(dot.max_abs_coeff() < 1e-13);
    }

    #[test]
    fn square_loop_orientation() {
        let lp = TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0]);
        assert!((lp.signed_area() - 1.0).abs() < 1e-14);
        assert!(lp.closure_residual() < 1e-16);
        let rev = lp.reversed();
        assert!((rev.signed_area() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn validate_unit_square_passes() {
        let region = TrimmedRegion2D::unit_square();
        assert!(validate_region(&region, 1e-10).pass());
    }

    #[test]
    fn validate_reports_reversed_loop() {
        let mut lp = TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0]).reversed();
        lp.kind = LoopKind::Outer;
        let region = TrimmedRegion2D::new(vec![lp]);
        let d = validate_region(&region, 1e-10);
        assert!(!d.pass());
        assert!(d
            .findings
            .iter()
            .any(|f| matches!(f.issue, Issue::OrientationMismatch { .. })));
    }

    #[test]
    fn validate_reports_gap() {
        let curves = vec![
            BezierCurve::segment_2d([0.0, 0.0], [1.0, 0.0]),
            BezierCurve::segment_2d([1.0, 1e-6], [0.0, 1e-6]), // 1e-6 gap twice
        ];
        let region = TrimmedRegion2D::new(vec![TrimLoop::new(LoopKind::Outer, curves)]);
        let d = validate_region(&region, 1e-10);
        let gap = d.findings.iter().find_map(|f| match f.issue {
            Issue::LoopNotClosed { residual, .. } => Some(residual),
            _ => None,
        });
        assert!(gap.is_some());
        assert!((gap.unwrap() - 1e-6).abs() < 1e-9);
    }

    #[test]
    fn validate_nesting() {
        let outer = TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0]);
        let hole_inside = TrimLoop::rectangle(LoopKind::Inner, [0.3, 0.3], [0.5, 0.5]);
        let region = TrimmedRegion2D::new(vec![outer.clone(), hole_inside]);
        assert!(validate_region(&region, 1e-10).pass());

        let hole_outside = TrimLoop::rectangle(LoopKind::Inner, [2.0, 2.0], [2.5, 2.5]);
        let region = TrimmedRegion2D::new(vec![outer, hole_outside]);
        let d = validate_region(&region, 1e-10);
        assert!(d
            .findings
            .iter()
            .any(|f| matches!(f.issue, Issue::InnerLoopNotNested { .. })));
    }

    #[test]
    fn restrict_and_reverse_match_pointwise() {
        let c = BezierCurve::from_points_2d(&[[0.0, 0.0], [0.4, 1.0], [1.0, 0.2]]);
        let r = c.restrict(0.2, 0.7);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let a = r.point_at(t);
            let b = c.point_at(0.2 + 0.5 * t);
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
        let rev = c.reversed();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let a = rev.point_at(t);
            let b = c.point_at(1.0 - t);
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn single_span_bspline_is_already_bezier() {
        let knots = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let ctrl = vec![vec![0.0, 0.0], vec![0.5, 1.0], vec![1.0, 0.0]];
        let segs = split_bspline_curve(&knots, 2, &ctrl).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0], ctrl);
    }

    #[test]
    fn two_span_quadratic_split() {
        let knots = [0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0];
        let ctrl = vec![
            vec![0.0, 0.0],
            vec![0.25, 1.0],
            vec![0.75, -1.0],
            vec![1.0, 0.0],
        ];
        let segs = split_bspline_curve(&knots, 2, &ctrl).unwrap();
        assert_eq!(segs.len(), 2);
        let left = BezierCurve::from_points_2d(
            &segs[0]
                .iter()
                .map(|p| [p[0], p[1]])
                .collect::<Vec<_>>(),
        );
        let right = BezierCurve::from_points_2d(
            &segs[1]
                .iter()
                .map(|p| [p[0], p[1]])
                .collect::<Vec<_>>(),
        );
        // junction point and tangent direction must match the original
        let j_left = left.point_at(1.0);
        let j_right = right.point_at(0.0);
        let orig = de_boor(&knots, 2, &ctrl, 0.5);
        for k in 0..2 {
            assert!((j_left[k] - orig[k]).abs() < 1e-13);
            assert!((j_right[k] - orig[k]).abs() < 1e-13);
        }
        // pointwise identity against the Cox-de Boor oracle
        for k in 0..=100 {
            let u = k as f64 / 100.0;
            let expect = de_boor(&knots, 2, &ctrl, u);
            let got = if u <= 0.5 {
                left.point_at(u / 0.5)
            } else {
                right.point_at((u - 0.5) / 0.5)
            };
            for a in 0..2 {
                assert!((got[a] - expect[a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cubic_bspline_split_matches_de_boor() {
        let knots = [0.0, 0.0, 0.0, 0.0, 0.3, 0.7, 1.0, 1.0, 1.0, 1.0];
        let ctrl = vec![
            vec![0.0, 0.0],
            vec![0.2, 0.9],
            vec![0.4, -0.3],
            vec![0.7, 0.8],
            vec![0.9, 0.1],
            vec![1.0, 1.0],
        ];
        let segs = split_bspline_curve(&knots, 3, &ctrl).unwrap();
        assert_eq!(segs.len(), 3);
        let curves: Vec<BezierCurve> = segs
            .iter()
            .map(|s| {
                BezierCurve::from_points_2d(&s.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>())
            })
            .collect();
        let spans = [(0.0, 0.3), (0.3, 0.7), (0.7, 1.0)];
        for k in 0..=100 {
            let u = k as f64 / 100.0;
            let expect = de_boor(&knots, 3, &ctrl, u);
            let (idx, &(lo, hi)) = spans
                .iter()
                .enumerate()
                .find(|(_, (lo, hi))| u >= *lo && u <= *hi)
                .unwrap();
            let got = curves[idx].point_at((u - lo) / (hi - lo));
            for a in 0..2 {
                assert!((got[a] - expect[a]).abs() < 1e-12, "u={u}");
            }
        }
    }

    #[test]
    fn malformed_knots_rejected() {
        let ctrl = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(
            split_bspline_curve(&[0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2, &ctrl),
            Err(BsplineError::NotOpenKnotVector)
        ));
        assert!(matches!(
            split_bspline_curve(&[0.0, 0.0, 0.0, 1.0, 1.0], 2, &ctrl),
            Err(BsplineError::KnotCountMismatch { .. })
        ));
    }

    #[test]
    fn surface_split_matches_pointwise() {
        // bi-quadratic B-spline with one interior knot along u
        let knots_u = [0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0];
        let knots_v = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let net: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        vec![
                            i as f64 / 3.0,
                            j as f64 / 2.0,
                            ((i * 7 + j * 3) % 5) as f64 * 0.1,
                        ]
                    })
                    .collect()
            })
            .collect();
        let patches = split_bspline_surface(&knots_u, &knots_v, 2, 2, &net).unwrap();
        assert_eq!(patches.len(), 2);
        assert_eq!(patches[0].len(), 1);
        // oracle: tensor de Boor via two curve evaluations
        let eval_surface = |u: f64, v: f64| {
            // collapse v first for each control row
            let rows: Vec<Vec<f64>> = net
                .iter()
                .map(|row| de_boor(&knots_v, 2, row, v))
                .collect();
            de_boor(&knots_u, 2, &rows, u)
        };
        for (pi, patch_row) in patches.iter().enumerate() {
            let patch = &patch_row[0];
            let pts: Vec<[f64; 3]> = patch
                .iter()
                .flat_map(|row| row.iter().map(|p| [p[0], p[1], p[2]]))
                .collect();
            let s = BezierSurface::from_grid(3, 3, &pts);
            let (ulo, uhi) = if pi == 0 { (0.0, 0.5) } else { (0.5, 1.0) };
            for a in 0..=6 {
                for b in 0..=6 {
                    let uu = ulo + (uhi - ulo) * a as f64 / 6.0;
                    let vv = b as f64 / 6.0;
                    let expect = eval_surface(uu, vv);
                    let got = s.point_at((uu - ulo) / (uhi - ulo), vv);
                    for k in 0..3 {
                        assert!((got[k] - expect[k]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn fit_recovers_exact_quadratic() {
        let c = BezierCurve::from_points_2d(&[[0.0, 0.0], [0.3, 0.9], [1.0, 0.4]]);
        let samples: Vec<(f64, [f64; 2])> = (1..16)
            .map(|k| {
                let t = k as f64 / 16.0;
                let p = c.point_at(t);
                (t, [p[0], p[1]])
            })
            .collect();
        let fitted = fit_bezier_curve_2d(&samples, 2, [0.0, 0.0], [1.0, 0.4]);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let a = fitted.point_at(t);
            let b = c.point_at(t);
            assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn axis_box_faces_sane() {
        let solid = BRepSolid::axis_box([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        assert_eq!(solid.faces.len(), 6);
        assert!(validate_solid(&solid, 1e-10).pass());
        // each face normal is a unit axis vector, outward per flag
        for face in &solid.faces {
            let n = surface_normal_field(&face.surface);
            let v = n.eval(&[0.5, 0.5]);
            let mag: f64 = v.iter().map(|x| x * x).sum::<f64>();
            assert!((mag - 1.0).abs() < 1e-13);
        }
    }
}
