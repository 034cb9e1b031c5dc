//! Root isolation for univariate Bernstein polynomials.
//!
//! Roots are bracketed by recursive de Casteljau subdivision using the
//! coefficient sign-variation bound (zero variations: no root; one
//! variation: exactly one root), then polished by bisection. Used to
//! intersect trimming curves with grid lines and to count ray crossings;
//! never part of the integration pipeline itself.

use alloc::vec::Vec;

use crate::bernstein::Poly1;

/// A located root with the derivative value there, so callers can detect
/// tangential (grazing) contact.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub t: f64,
    pub derivative: f64,
}

impl Root {
    /// Grazing contact: the polynomial crosses with a near-zero slope.
    pub fn is_tangential(&self, scale: f64) -> bool {
        self.derivative.abs() < 1e-7 * scale.max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootFindError {
    /// All coefficients are negligible: the polynomial vanishes identically
    /// (or on a sub-interval), so isolated roots are meaningless.
    DegenerateInput,
    /// Sign variations persisted below the minimal window width; a cluster
    /// of nearby roots or a flat tangency that subdivision cannot separate.
    ClusteredRoots,
}

impl core::fmt::Display for RootFindError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RootFindError::DegenerateInput => write!(f, "polynomial is identically negligible"),
            RootFindError::ClusteredRoots => {
                write!(f, "unresolvable root cluster below minimal window width")
            }
        }
    }
}

const ZERO_REL: f64 = 1e-13;
const WIDTH_TOL: f64 = 1e-12;
const SHAVE: f64 = 1e-3;
const MERGE_TOL: f64 = 1e-9;

/// All roots of `f` in `[0,1]`, sorted and deduplicated.
pub fn isolate_roots(f: &Poly1) -> Result<Vec<Root>, RootFindError> {
    let scale = f.max_abs_coeff();
    if scale == 0.0 {
        return Err(RootFindError::DegenerateInput);
    }
    let zero_tol = ZERO_REL * scale;
    let mut found: Vec<f64> = Vec::new();
    recurse(f.coeffs(), 0.0, 1.0, f, zero_tol, &mut found, 0)?;
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    found.dedup_by(|a, b| (*a - *b).abs() < MERGE_TOL);
    let deriv = f.derivative();
    Ok(found
        .into_iter()
        .map(|t| Root {
            t,
            derivative: deriv.eval_extrapolated(t),
        })
        .collect())
}

fn sign_variations(coeffs: &[f64], zero_tol: f64) -> (usize, usize) {
    let mut vars = 0;
    let mut significant = 0;
    let mut last_sign = 0i8;
    for &c in coeffs {
        if c.abs() <= zero_tol {
            continue;
        }
        significant += 1;
        let s = if c > 0.0 { 1 } else { -1 };
        if last_sign != 0 && s != last_sign {
            vars += 1;
        }
        last_sign = s;
    }
    (vars, significant)
}

fn recurse(
    coeffs: &[f64],
    lo: f64,
    hi: f64,
    original: &Poly1,
    zero_tol: f64,
    found: &mut Vec<f64>,
    depth: usize,
) -> Result<(), RootFindError> {
    let (vars, significant) = sign_variations(coeffs, zero_tol);
    if significant == 0 {
        // vanishes on the whole window
        return Err(RootFindError::DegenerateInput);
    }

    // endpoint roots: record and shave the window so the recursion can
    // certify what remains
    if coeffs[0].abs() <= zero_tol {
        found.push(lo);
        let (_, right) = subdivide(coeffs, SHAVE);
        return recurse(
            &right,
            lo + SHAVE * (hi - lo),
            hi,
            original,
            zero_tol,
            found,
            depth + 1,
        );
    }
    if coeffs[coeffs.len() - 1].abs() <= zero_tol {
        found.push(hi);
        let (left, _) = subdivide(coeffs, 1.0 - SHAVE);
        return recurse(
            &left,
            lo,
            hi - SHAVE * (hi - lo),
            original,
            zero_tol,
            found,
            depth + 1,
        );
    }

    if vars == 0 {
        return Ok(());
    }
    if vars == 1 && coeffs[0] * coeffs[coeffs.len() - 1] < 0.0 {
        found.push(bisect(original, lo, hi));
        return Ok(());
    }
    if hi - lo < WIDTH_TOL || depth > 80 {
        return Err(RootFindError::ClusteredRoots);
    }

    let (left, right) = subdivide(coeffs, 0.5);
    let mid = 0.5 * (lo + hi);
    recurse(&left, lo, mid, original, zero_tol, found, depth + 1)?;
    recurse(&right, mid, hi, original, zero_tol, found, depth + 1)
}

fn subdivide(coeffs: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    crate::bernstein::subdivide_slice(coeffs, t)
}

/// Bisection on a certified sign-change bracket of the original polynomial.
fn bisect(f: &Poly1, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f.eval_extrapolated(lo);
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        let fm = f.eval_extrapolated(mid);
        if fm == 0.0 {
            return mid;
        }
        if (flo > 0.0) == (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn linear_root() {
        let f = Poly1::new(vec![-1.0, 1.0]); // 2t - 1
        let roots = isolate_roots(&f).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].t - 0.5).abs() < 1e-14);
        assert!(!roots[0].is_tangential(1.0));
    }

    #[test]
    fn no_roots() {
        let f = Poly1::new(vec![1.0, 2.0, 0.5]);
        assert!(isolate_roots(&f).unwrap().is_empty());
    }

    #[test]
    fn cubic_three_roots() {
        let mono = |t: f64| (t - 0.2) * (t - 0.5) * (t - 0.8);
        // t^3 - 1.5 t^2 + 0.66 t - 0.08
        let f = from_monomial(&[-0.08, 0.66, -1.5, 1.0]);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert!((f.eval(t) - mono(t)).abs() < 1e-14);
        }
        let roots = isolate_roots(&f).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.2, 0.5, 0.8].iter()) {
            assert!((r.t - e).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_roots() {
        // t(1 - t): roots exactly at both ends
        let f = Poly1::new(vec![0.0, 0.5, 0.0]);
        let roots = isolate_roots(&f).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].t.abs() < 1e-12 && (roots[1].t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn root_exactly_at_half() {
        // dyadic-symmetric crossing, hit by the first subdivision point
        let f = from_monomial(&[0.25, -1.25, 1.0]); // roots 0.25 and 1.0
        let g = from_monomial(&[-0.5, 1.0]); // root exactly 0.5
        let prod = f.multiply(&g);
        let roots = isolate_roots(&prod).unwrap();
        let ts: Vec<f64> = roots.iter().map(|r| r.t).collect();
        assert_eq!(ts.len(), 3);
        assert!((ts[0] - 0.25).abs() < 1e-10);
        assert!((ts[1] - 0.5).abs() < 1e-10);
        assert!((ts[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn double_root_flagged_tangential() {
        // (t - 0.5)^2
        let f = Poly1::new(vec![0.25, -0.25, 0.25]);
        let roots = isolate_roots(&f).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].t - 0.5).abs() < 1e-6);
        assert!(roots[0].is_tangential(1.0));
    }

    #[test]
    fn identically_zero_is_degenerate() {
        let f = Poly1::zero(3);
        assert_eq!(
            isolate_roots(&f).unwrap_err(),
            RootFindError::DegenerateInput
        );
    }

    fn from_monomial(mono: &[f64]) -> Poly1 {
        let p = mono.len() - 1;
        let mut acc = Poly1::zero(p);
        let t = Poly1::identity();
        let mut power = Poly1::constant(1.0);
        for (k, c) in mono.iter().enumerate() {
            let term = power.degree_raise(p).scale(*c);
            acc = acc.add(&term);
            if k < p {
                power = power.multiply(&t);
            }
        }
        acc
    }
}
