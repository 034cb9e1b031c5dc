//! Per-element lookup tables of Bernstein basis integrals over the active
//! part of each cell, plus boundary-flux weights over the trimmed boundary.
//!
//! Interior cells use the closed form (the unit-cell integral of every basis
//! function is `1 / prod(r_k + 1)` times the cell volume). Cut cells run the
//! divergence-reduction pipeline once per cell through its adjoint weight
//! form, which yields the integrals of *all* basis functions in one pass.
//! Volume tables are stored at both needed degrees directly.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::qfree::{
    choose_alphas, choose_deltas, face_flux_functional, face_moment_functional,
    region_boundary_functional, region_functional,
};

use super::grid::{CellClassification, CellLabel, CutGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphasChoice {
    Fixed([f64; 3]),
    /// Per cut cell, zero the axis hit by the most axis-aligned faces.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltasChoice {
    Fixed([f64; 2]),
    /// Per face, kill the component aligned with most trimming curves.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConfig {
    pub alphas: AlphasChoice,
    pub deltas: DeltasChoice,
}

impl Default for MomentConfig {
    fn default() -> Self {
        MomentConfig {
            alphas: AlphasChoice::Fixed([1.0 / 3.0; 3]),
            deltas: DeltasChoice::Fixed([0.5, 0.5]),
        }
    }
}

/// Physical-scaled integrals for one cell: volume moments of the local
/// Bernstein bases of degree `r` and `s`, and per-component boundary flux
/// weights of degree `s` over the domain-boundary part inside the cell.
#[derive(Debug, Clone)]
pub struct CellMoments {
    pub volume_r: Vec<f64>,
    pub volume_s: Vec<f64>,
    /// One weight vector per Cartesian component; empty when the cell does
    /// not touch the trimming boundary.
    pub boundary_s: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct MomentTable {
    pub dim: usize,
    pub r_degree: usize,
    pub s_degree: usize,
    pub interior: CellMoments,
    pub cut: BTreeMap<usize, CellMoments>,
}

impl MomentTable {
    pub fn cell(&self, flat: usize, label: CellLabel) -> &CellMoments {
        match label {
            CellLabel::Cut => &self.cut[&flat],
            CellLabel::Interior => &self.interior,
            CellLabel::Exterior => panic!("exterior cells carry no moments"),
        }
    }
}

/// Builds the moment table for degrees `r = 2p + q` and `s = p + q`.
pub fn build_moment_table(
    class: &CellClassification,
    p: usize,
    q: usize,
    cfg: &MomentConfig,
) -> MomentTable {
    let dim = class.grid.dim;
    let r = 2 * p + q;
    let s = p + q;
    let cellvol = class.grid.cell_volume();
    let h = class.grid.spacing;

    let interior = CellMoments {
        volume_r: vec![
            cellvol / (r + 1).pow(dim as u32) as f64;
            (r + 1).pow(dim as u32)
        ],
        volume_s: vec![
            cellvol / (s + 1).pow(dim as u32) as f64;
            (s + 1).pow(dim as u32)
        ],
        boundary_s: Vec::new(),
    };

    let mut cut = BTreeMap::new();
    for (flat, geom) in class.cut_cells.iter() {
        let moments = match geom {
            CutGeometry::Region(region) => {
                let deltas = match cfg.deltas {
                    DeltasChoice::Fixed(d) => d,
                    DeltasChoice::Auto => choose_deltas(&region.loops),
                };
                let volume_r: Vec<f64> = region_functional(region, [r, r], deltas)
                    .into_iter()
                    .map(|w| w * cellvol)
                    .collect();
                let volume_s: Vec<f64> = region_functional(region, [s, s], deltas)
                    .into_iter()
                    .map(|w| w * cellvol)
                    .collect();
                let has_boundary = region.curves().any(|c| c.on_domain_boundary);
                let boundary_s = if has_boundary {
                    let raw = region_boundary_functional(region, [s, s]);
                    // physical normal-times-measure: (h2 c2', -h1 c1')
                    vec![
                        raw[0].iter().map(|w| w * h[1]).collect(),
                        raw[1].iter().map(|w| w * h[0]).collect(),
                    ]
                } else {
                    Vec::new()
                };
                CellMoments {
                    volume_r,
                    volume_s,
                    boundary_s,
                }
            }
            CutGeometry::Solid(solid) => {
                let alphas = match cfg.alphas {
                    AlphasChoice::Fixed(a) => a,
                    AlphasChoice::Auto => choose_alphas(solid),
                };
                let len_r = (r + 1).pow(3);
                let len_s = (s + 1).pow(3);
                let mut volume_r = vec![0.0; len_r];
                let mut volume_s = vec![0.0; len_s];
                let mut boundary_s: Vec<Vec<f64>> = Vec::new();
                for face in &solid.faces {
                    let deltas = match cfg.deltas {
                        DeltasChoice::Fixed(d) => d,
                        DeltasChoice::Auto => choose_deltas(&face.loops),
                    };
                    let wr = face_moment_functional(face, &[r, r, r], alphas, deltas);
                    for (acc, w) in volume_r.iter_mut().zip(wr.iter()) {
                        *acc += w * cellvol;
                    }
                    let ws = face_moment_functional(face, &[s, s, s], alphas, deltas);
                    for (acc, w) in volume_s.iter_mut().zip(ws.iter()) {
                        *acc += w * cellvol;
                    }
                    if face.on_domain_boundary {
                        if boundary_s.is_empty() {
                            boundary_s = vec![vec![0.0; len_s]; 3];
                        }
                        let flux = face_flux_functional(face, &[s, s, s], deltas);
                        for comp in 0..3 {
                            // physical scale: cellvol / h_comp
                            let scale = cellvol / h[comp];
                            for (acc, w) in boundary_s[comp].iter_mut().zip(flux[comp].iter()) {
                                *acc += w * scale;
                            }
                        }
                    }
                }
                CellMoments {
                    volume_r,
                    volume_s,
                    boundary_s,
                }
            }
        };
        cut.insert(*flat, moments);
    }

    MomentTable {
        dim,
        r_degree: r,
        s_degree: s,
        interior,
        cut,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::{BRepSolid, BezierCurve, LoopKind, TrimLoop, TrimmedFace, TrimmedRegion2D};
    use crate::immersed::classify::{classification_from_cells_3d, classify_cells_2d};
    use crate::immersed::grid::CartesianGrid;
    use crate::oracle::integrate_region_gq;
    use crate::tensor::PolyN;

    #[test]
    fn interior_cells_closed_form() {
        let grid = CartesianGrid::new_2d([0.0, 0.0], [1.0, 1.0], [4, 4]);
        let region = TrimmedRegion2D::unit_square();
        let class = classify_cells_2d(&grid, &region, 1e-10).unwrap();
        let table = build_moment_table(&class, 1, 1, &MomentConfig::default());
        // r = 3: each basis integral = cellvol / 16
        let expect = grid.cell_volume() / 16.0;
        for v in &table.interior.volume_r {
            assert!((v - expect).abs() < 1e-15);
        }
        let sum: f64 = table.interior.volume_r.iter().sum();
        assert!((sum - grid.cell_volume()).abs() < 1e-14);
    }

    #[test]
    fn cut_cell_half_plane_matches_oracle() {
        // vertical cut at x = 0.43 on a single cell: left part active
        let grid = CartesianGrid::new_2d([0.0, 0.0], [1.0, 1.0], [1, 1]);
        let region = TrimmedRegion2D::new(vec![TrimLoop::rectangle(
            LoopKind::Outer,
            [0.0, 0.0],
            [0.43, 1.0],
        )]);
        let class = classify_cells_2d(&grid, &region, 1e-10).unwrap();
        let table = build_moment_table(&class, 1, 0, &MomentConfig::default());
        // basis B_0 of degree r = 2 (tensor index 0): integral over the part
        let local = class.cut_cells.get(&0).unwrap();
        let CutGeometry::Region(r) = local else { panic!() };
        let b0 = PolyN::new(vec![2, 2], {
            let mut c = vec![0.0; 9];
            c[0] = 1.0;
            c
        });
        let (oracle_val, est) = integrate_region_gq(r, |p| b0.eval(&p), 9, 4);
        let got = table.cut[&0].volume_r[0];
        assert!(
            (got - oracle_val).abs() < (est + 1e-10),
            "{got} vs oracle {oracle_val} (est {est})"
        );
        // partition of unity: sum of all entries = active area
        let sum: f64 = table.cut[&0].volume_r.iter().sum();
        assert!((sum - 0.43).abs() < 1e-11);
    }

    #[test]
    fn partition_of_unity_on_blob_cut_cells() {
        let arcs = [
            [[0.31, 0.42], [0.52, 0.33], [0.69, 0.45]],
            [[0.69, 0.45], [0.74, 0.58], [0.63, 0.69]],
            [[0.63, 0.69], [0.48, 0.77], [0.36, 0.66]],
            [[0.36, 0.66], [0.26, 0.53], [0.31, 0.42]],
        ];
        let hole: Vec<BezierCurve> = arcs
            .iter()
            .rev()
            .map(|pts| BezierCurve::from_points_2d(&[pts[2], pts[1], pts[0]]))
            .collect();
        let region = TrimmedRegion2D::new(vec![
            TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0]),
            TrimLoop::new(LoopKind::Inner, hole),
        ]);
        let grid = CartesianGrid::new_2d([0.0, 0.0], [1.0, 1.0], [8, 8]);
        let class = classify_cells_2d(&grid, &region, 1e-10).unwrap();
        let table = build_moment_table(&class, 2, 2, &MomentConfig::default());
        for (flat, m) in table.cut.iter() {
            let CutGeometry::Region(r) = &class.cut_cells[flat] else {
                panic!()
            };
            let area = r.signed_area() * grid.cell_volume();
            let sum_r: f64 = m.volume_r.iter().sum();
            let sum_s: f64 = m.volume_s.iter().sum();
            assert!((sum_r - area).abs() < 1e-11 * area.max(1e-3));
            assert!((sum_s - area).abs() < 1e-11 * area.max(1e-3));
        }
    }

    #[test]
    fn solid_cut_cell_tables() {
        // half-cell solid in local coordinates
        let grid = CartesianGrid::new_3d([0.0; 3], [2.0; 3], [2, 2, 2]);
        let solid = BRepSolid::axis_box([0.0; 3], [0.5, 1.0, 1.0]);
        let mut faces_flagged = solid.faces.clone();
        // mark the cutting plane x = 0.5 as the domain boundary
        for (i, f) in faces_flagged.iter_mut().enumerate() {
            f.on_domain_boundary = i == 1;
        }
        let solid = BRepSolid::new(faces_flagged);
        let class = classification_from_cells_3d(&grid, &[], vec![(vec![0, 0, 0], solid)], 1e-10)
            .unwrap();
        let table = build_moment_table(&class, 1, 1, &MomentConfig::default());
        let m = &table.cut[&grid.cell_index(&[0, 0, 0])];
        // active volume = half the cell volume (cell volume = 1)
        let sum: f64 = m.volume_r.iter().sum();
        assert!((sum - 0.5 * grid.cell_volume()).abs() < 1e-11);
        // boundary flux weights: normal +e1, area = h2*h3 = 1; for the
        // constant-one polynomial the flux weight sums to n_1 * area
        let total: f64 = m.boundary_s[0].iter().sum();
        assert!((total - 1.0).abs() < 1e-11, "{total}");
        let total_y: f64 = m.boundary_s[1].iter().sum();
        assert!(total_y.abs() < 1e-12);
    }

    #[test]
    fn auto_choices_match_fixed_results() {
        let grid = CartesianGrid::new_2d([0.0, 0.0], [1.0, 1.0], [2, 2]);
        let region = TrimmedRegion2D::new(vec![
            TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0]),
            TrimLoop::rectangle(LoopKind::Inner, [0.3, 0.3], [0.7, 0.7]),
        ]);
        let class = classify_cells_2d(&grid, &region, 1e-10).unwrap();
        let fixed = build_moment_table(&class, 2, 2, &MomentConfig::default());
        let auto = build_moment_table(
            &class,
            2,
            2,
            &MomentConfig {
                alphas: AlphasChoice::Auto,
                deltas: DeltasChoice::Auto,
            },
        );
        for (flat, m) in fixed.cut.iter() {
            let a = &auto.cut[flat];
            for (x, y) in m.volume_r.iter().zip(a.volume_r.iter()) {
                assert!((x - y).abs() < 1e-10 * x.abs().max(1e-6), "{x} vs {y}");
            }
        }
    }
}
