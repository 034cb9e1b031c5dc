//! Exact integration of polynomials over B-Rep solids and planar trimmed
//! regions without quadrature.
//!
//! A volume integral of a polynomial `a` is rewritten as `div A` for an
//! antiderivative field `A` and pushed to the boundary faces. Each face
//! integral pulls back to the surface parameter domain, where the integrand
//! `r = (A ∘ S) · N` is again polynomial (the normalisation of the unit
//! normal cancels against the surface measure). A second divergence pass
//! with a planar antiderivative field `R` pushes the face integral to the
//! trimming curves, where `t = (R ∘ c) · M` is a univariate polynomial whose
//! `[0,1]` integral is the plain Bernstein coefficient average.
//!
//! Everything stays in Bernstein form end to end; the production path never
//! evaluates a polynomial at a point.

mod functional;

pub use functional::{
    face_flux_functional, face_moment_functional, region_boundary_functional, region_functional,
};

use alloc::vec::Vec;

use crate::brep::{curve_normal_field, surface_normal_field, BRepSolid, TrimLoop, TrimmedFace, TrimmedRegion2D};
use crate::tensor::{PolyN, VecPoly};
use crate::GEOM_TOL;

/// The free constants of the two divergence passes: `A_k = alpha_k
/// int_0^{x_k} a + beta_k` for the volume stage and `R_k = delta_k
/// int_0^{x_k} r + epsilon_k` per face. The alphas must sum to one, as must
/// the deltas; betas and epsilons are free and default to zero (they cancel
/// over closed boundaries, which the consistency tests exploit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiderivativeConfig {
    pub alphas: [f64; 3],
    pub betas: [f64; 3],
    pub deltas: [f64; 2],
    pub epsilons: [f64; 2],
}

impl Default for AntiderivativeConfig {
    fn default() -> Self {
        AntiderivativeConfig {
            alphas: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            betas: [0.0; 3],
            deltas: [0.5, 0.5],
            epsilons: [0.0; 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QfreeError {
    AlphaSumViolation { sum: f64 },
    DeltaSumViolation { sum: f64 },
    DegenerateSolid { mass: f64 },
}

impl core::fmt::Display for QfreeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QfreeError::AlphaSumViolation { sum } => {
                write!(f, "alpha coefficients sum to {sum}, expected 1")
            }
            QfreeError::DeltaSumViolation { sum } => {
                write!(f, "delta coefficients sum to {sum}, expected 1")
            }
            QfreeError::DegenerateSolid { mass } => {
                write!(f, "mass {mass} is negligible against the bounding box")
            }
        }
    }
}

impl AntiderivativeConfig {
    pub fn with_alphas(alphas: [f64; 3]) -> Self {
        AntiderivativeConfig {
            alphas,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), QfreeError> {
        let sa: f64 = self.alphas.iter().sum();
        if (sa - 1.0).abs() > 1e-14 {
            return Err(QfreeError::AlphaSumViolation { sum: sa });
        }
        let sd: f64 = self.deltas.iter().sum();
        if (sd - 1.0).abs() > 1e-14 {
            return Err(QfreeError::DeltaSumViolation { sum: sd });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    /// Skip faces whose pulled-back integrand is identically negligible.
    pub skip_zero_faces: bool,
    pub geom_tol: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            skip_zero_faces: true,
            geom_tol: GEOM_TOL,
        }
    }
}

/// The antiderivative field `A` with `div A = a` as a polynomial identity.
/// Component `k` is `alpha_k int_0^{x_k} a + beta_k`, of degrees `r + 1`
/// along axis `k` and `r` along the others.
pub fn build_antiderivative_field(a: &PolyN, cfg: &AntiderivativeConfig) -> VecPoly {
    assert_eq!(a.arity(), 3, "volume integrands are trivariate");
    let comps = (0..3)
        .map(|k| a.partial_antiderivative(k, cfg.alphas[k], cfg.betas[k]))
        .collect();
    VecPoly::new(comps)
}

/// Planar analog used by the second pass and by 2D region integrals.
pub fn build_planar_antiderivative_field(
    r: &PolyN,
    deltas: [f64; 2],
    epsilons: [f64; 2],
) -> VecPoly {
    assert_eq!(r.arity(), 2, "face integrands are bivariate");
    let comps = (0..2)
        .map(|k| r.partial_antiderivative(k, deltas[k], epsilons[k]))
        .collect();
    VecPoly::new(comps)
}

/// The pulled-back face integrand `r = (A ∘ S) · N`, negated when the
/// parametric normal points into the solid. For uniform degrees this has
/// degree `3s(r+1) - 1` per axis.
pub fn face_integrand(a_field: &VecPoly, face: &TrimmedFace) -> PolyN {
    let normal = surface_normal_field(&face.surface);
    let pulled = a_field.compose(face.surface.map());
    let r = pulled.dot(&normal);
    if face.outward {
        r
    } else {
        r.scale(-1.0)
    }
}

/// Analytic integral of `r` over the face's active parameter region. An
/// untrimmed face reduces to the coefficient average; otherwise the second
/// divergence pass converts the region integral into line integrals over
/// the loop curves.
pub fn integrate_face(face: &TrimmedFace, r: &PolyN, deltas: [f64; 2], epsilons: [f64; 2]) -> f64 {
    if face.is_untrimmed() {
        return r.integral_unit_hypercube();
    }
    let field = build_planar_antiderivative_field(r, deltas, epsilons);
    integrate_loops(&field, &face.loops, GEOM_TOL)
}

/// Line integrals `int (R ∘ c) · M dt` summed over all loop curves.
/// Degenerate curves (control polygon below `geom_tol`) contribute nothing
/// and are skipped.
pub fn integrate_loops(field: &VecPoly, loops: &[TrimLoop], geom_tol: f64) -> f64 {
    let mut total = 0.0;
    for lp in loops {
        for curve in &lp.curves {
            if curve.polygon_length() < geom_tol {
                continue;
            }
            let pulled = field.compose(curve.map());
            let normal = curve_normal_field(curve);
            let t = pulled.dot(&normal);
            total += t.to_poly1().integral_unit();
        }
    }
    total
}

/// Integral of the trivariate polynomial `a` over a B-Rep solid.
pub fn integrate_brep(solid: &BRepSolid, a: &PolyN, cfg: &AntiderivativeConfig) -> Result<f64, QfreeError> {
    integrate_brep_with(solid, a, cfg, &IntegrateOptions::default())
}

pub fn integrate_brep_with(
    solid: &BRepSolid,
    a: &PolyN,
    cfg: &AntiderivativeConfig,
    opts: &IntegrateOptions,
) -> Result<f64, QfreeError> {
    cfg.validate()?;
    let a_field = build_antiderivative_field(a, cfg);
    let field_scale: f64 = a_field
        .components()
        .iter()
        .map(|c| c.max_abs_coeff())
        .fold(0.0, f64::max);
    let mut total = 0.0;
    // fixed input order keeps the accumulation bit-reproducible
    for face in &solid.faces {
        if opts.skip_zero_faces && face_is_orthogonal(&a_field, face, field_scale) {
            continue;
        }
        let r = face_integrand(&a_field, face);
        if opts.skip_zero_faces {
            let scale = face_scale(&a_field, face);
            if r.max_abs_coeff() < 1e-14 * scale {
                continue;
            }
        }
        total += integrate_face(face, &r, cfg.deltas, cfg.epsilons);
    }
    Ok(total)
}

/// Cheap pre-check: every component of `A` with non-negligible coefficients
/// meets an identically-zero normal component, so `(A ∘ S) · N == 0` without
/// composing anything. Catches axis-aligned planar faces when the matching
/// alpha is zero.
fn face_is_orthogonal(a_field: &VecPoly, face: &TrimmedFace, field_scale: f64) -> bool {
    if field_scale == 0.0 {
        return true;
    }
    let normal = surface_normal_field(&face.surface);
    let n_scale: f64 = normal
        .components()
        .iter()
        .map(|c| c.max_abs_coeff())
        .fold(0.0, f64::max);
    for k in 0..3 {
        let a_live = a_field.component(k).max_abs_coeff() > 1e-14 * field_scale;
        let n_live = normal.component(k).max_abs_coeff() > 1e-14 * n_scale;
        if a_live && n_live {
            return false;
        }
    }
    true
}

fn face_scale(a_field: &VecPoly, face: &TrimmedFace) -> f64 {
    // magnitude scale of the dot product terms: |A| coefficients times the
    // normal coefficients; coarse but adequate for a relative zero test
    let normal = surface_normal_field(&face.surface);
    let mut scale = 0.0f64;
    for k in 0..3 {
        scale += a_field.component(k).max_abs_coeff() * normal.component(k).max_abs_coeff();
    }
    scale.max(1e-300)
}

/// Integral of the bivariate polynomial `a` over a planar trimmed region:
/// one divergence pass straight to line integrals.
pub fn integrate_region_2d(
    region: &TrimmedRegion2D,
    a: &PolyN,
    deltas: [f64; 2],
    epsilons: [f64; 2],
) -> f64 {
    assert_eq!(a.arity(), 2, "region integrands are bivariate");
    let field = build_planar_antiderivative_field(a, deltas, epsilons);
    integrate_loops(&field, &region.loops, GEOM_TOL)
}

/// Mass and centre of mass of a solid under a polynomial density.
pub fn moments(
    solid: &BRepSolid,
    density: &PolyN,
    cfg: &AntiderivativeConfig,
) -> Result<(f64, [f64; 3]), QfreeError> {
    let mass = integrate_brep(solid, density, cfg)?;
    let bbox_volume = solid_bbox_volume(solid);
    if mass.abs() < 1e-12 * bbox_volume.max(1e-30) {
        return Err(QfreeError::DegenerateSolid { mass });
    }
    let mut centre = [0.0; 3];
    for (k, c) in centre.iter_mut().enumerate() {
        let weighted = density.multiply(&PolyN::coordinate(3, k));
        *c = integrate_brep(solid, &weighted, cfg)? / mass;
    }
    Ok((mass, centre))
}

/// 2D analog: mass and centre of mass of a trimmed region.
pub fn moments_region_2d(
    region: &TrimmedRegion2D,
    density: &PolyN,
    deltas: [f64; 2],
) -> Result<(f64, [f64; 2]), QfreeError> {
    let mass = integrate_region_2d(region, density, deltas, [0.0, 0.0]);
    let (lo, hi) = region.bounding_box();
    let bbox_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    if mass.abs() < 1e-12 * bbox_area.max(1e-30) {
        return Err(QfreeError::DegenerateSolid { mass });
    }
    let mut centre = [0.0; 2];
    for (k, c) in centre.iter_mut().enumerate() {
        let weighted = density.multiply(&PolyN::coordinate(2, k));
        *c = integrate_region_2d(region, &weighted, deltas, [0.0, 0.0]) / mass;
    }
    Ok((mass, centre))
}

fn solid_bbox_volume(solid: &BRepSolid) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for face in &solid.faces {
        for comp in 0..3 {
            for c in face.surface.map().component(comp).coeffs() {
                lo[comp] = lo[comp].min(*c);
                hi[comp] = hi[comp].max(*c);
            }
        }
    }
    (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2])
}

/// Picks alphas that zero out the axis met by the most axis-aligned planar
/// faces, so those face integrals vanish identically. The remaining weight
/// is split evenly; the result always sums to one.
pub fn choose_alphas(solid: &BRepSolid) -> [f64; 3] {
    let mut votes = [0usize; 3];
    for face in &solid.faces {
        let normal = surface_normal_field(&face.surface);
        let scale: f64 = normal
            .components()
            .iter()
            .map(|c| c.max_abs_coeff())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        let live: Vec<usize> = (0..3)
            .filter(|k| normal.component(*k).max_abs_coeff() > 1e-12 * scale)
            .collect();
        if live.len() == 1 {
            votes[live[0]] += 1;
        }
    }
    let best = (0..3).max_by_key(|k| votes[*k]).unwrap();
    if votes[best] == 0 {
        return [1.0 / 3.0; 3];
    }
    let mut alphas = [0.5; 3];
    alphas[best] = 0.0;
    alphas
}

/// Per-face analog for the deltas: zero the component matching the dominant
/// axis-aligned trimming-curve direction.
pub fn choose_deltas(loops: &[TrimLoop]) -> [f64; 2] {
    let mut votes = [0usize; 2];
    for lp in loops {
        for curve in &lp.curves {
            let normal = curve_normal_field(curve);
            let s0 = normal.component(0).max_abs_coeff();
            let s1 = normal.component(1).max_abs_coeff();
            let scale = s0.max(s1);
            if scale == 0.0 {
                continue;
            }
            if s0 <= 1e-12 * scale {
                // normal along e2: curve parallel to axis 0, kill R_2
                votes[1] += 1;
            } else if s1 <= 1e-12 * scale {
                votes[0] += 1;
            }
        }
    }
    if votes[0] == 0 && votes[1] == 0 {
        return [0.5, 0.5];
    }
    if votes[0] >= votes[1] {
        [0.0, 1.0]
    } else {
        [1.0, 0.0]
    }
}

/// Polynomial degrees at every stage of the reduction for inputs of uniform
/// degree `r` (integrand), `s` (surfaces) and `c` (trimming curves).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeReport {
    pub integrand: usize,
    pub surface: usize,
    pub curve: usize,
    /// Normal field per component and axis: `2s - 1`.
    pub surface_normal: usize,
    /// Planar curve normal: `c - 1`.
    pub curve_normal: usize,
    /// Antiderivative field component along its own axis: `r + 1`.
    pub volume_field: usize,
    /// `A ∘ S` per axis: `s(3r + 1)`.
    pub surface_composition: usize,
    /// Face integrand per axis: `3s(r + 1) - 1`.
    pub face_integrand: usize,
    /// Face antiderivative along its own axis: `3s(r + 1)`.
    pub face_field: usize,
    /// `R ∘ c`: `6sc(r + 1) - c`.
    pub curve_composition: usize,
    /// Line integrand: `6sc(r + 1) - 1`.
    pub line_integrand: usize,
}

pub fn degree_report(r: usize, s: usize, c: usize) -> DegreeReport {
    assert!(s >= 1 && c >= 1, "geometry degrees must be at least 1");
    DegreeReport {
        integrand: r,
        surface: s,
        curve: c,
        surface_normal: 2 * s - 1,
        curve_normal: c - 1,
        volume_field: r + 1,
        surface_composition: s * (3 * r + 1),
        face_integrand: 3 * s * (r + 1) - 1,
        face_field: 3 * s * (r + 1),
        curve_composition: 6 * s * c * (r + 1) - c,
        line_integrand: 6 * s * c * (r + 1) - 1,
    }
}
