//! Quadrature-free integration of polynomials over trimmed-spline boundary
//! representations, and an immersed isogeometric Galerkin solver built on it.
//!
//! The crate is organised in layers:
//!
//! * [`bernstein`] — univariate polynomials in Bernstein form and the basic
//!   algebra (derivative, antiderivative, product, composition, exact unit
//!   integral). Everything else is built from these kernels.
//! * [`tensor`] — tensor-product multivariate polynomials ([`tensor::PolyN`])
//!   and vector-valued polynomials ([`tensor::VecPoly`], i.e. Bézier maps).
//! * [`rootfind`] — root isolation for Bernstein polynomials by coefficient
//!   sign counting and subdivision.
//! * [`brep`] — Bézier curves/surfaces, trimmed faces, loops, solids and 2D
//!   trimmed regions, with orientation/closure validation and B-spline →
//!   Bézier splitting.
//! * [`qfree`] — the integrator: volume integrals over B-Rep solids reduced
//!   to surface and then line integrals by successive applications of the
//!   divergence theorem, evaluated analytically from Bernstein coefficients.
//! * [`oracle`] — independent reference quadrature (Gauss–Legendre rules,
//!   winding-number point classification, adaptive cell subdivision). Used
//!   by tests and cross-checks; shares no polynomial-manipulation code with
//!   the [`qfree`] pipeline.
//! * [`linalg`] — small dense matrices, Cholesky, CSR storage and a Jacobi
//!   preconditioned conjugate-gradient solver.
//! * [`immersed`] — Cartesian grids, cut-cell classification, trimmed spline
//!   spaces with Bézier extraction, moment tables, assembly, Dirichlet
//!   constraints, error norms and convergence studies.
//!
//! The crate is `no_std` (with `alloc`); all IO and file formats live in the
//! companion CLI crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bernstein;
pub mod brep;
pub mod immersed;
pub mod linalg;
pub mod oracle;
pub mod qfree;
pub mod rootfind;
pub mod tensor;

pub use bernstein::Poly1;

/// Default geometric tolerance for loop closure and orientation checks.
pub const GEOM_TOL: f64 = 1e-10;
