//! Cartesian background grids and cell classification containers.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::brep::{BRepSolid, TrimmedRegion2D};

/// A uniform axis-aligned grid in 2 or 3 dimensions. Unused trailing axes
/// carry count 1 and spacing 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    pub dim: usize,
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub counts: [usize; 3],
}

impl CartesianGrid {
    pub fn new_2d(origin: [f64; 2], extent: [f64; 2], counts: [usize; 2]) -> Self {
        assert!(counts[0] > 0 && counts[1] > 0);
        assert!(extent[0] > 0.0 && extent[1] > 0.0);
        CartesianGrid {
            dim: 2,
            origin: [origin[0], origin[1], 0.0],
            spacing: [
                extent[0] / counts[0] as f64,
                extent[1] / counts[1] as f64,
                1.0,
            ],
            counts: [counts[0], counts[1], 1],
        }
    }

    pub fn new_3d(origin: [f64; 3], extent: [f64; 3], counts: [usize; 3]) -> Self {
        assert!(counts.iter().all(|c| *c > 0));
        assert!(extent.iter().all(|e| *e > 0.0));
        CartesianGrid {
            dim: 3,
            origin,
            spacing: [
                extent[0] / counts[0] as f64,
                extent[1] / counts[1] as f64,
                extent[2] / counts[2] as f64,
            ],
            counts,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.counts[..self.dim].iter().product()
    }

    /// Flat cell index, last axis fastest.
    pub fn cell_index(&self, ijk: &[usize]) -> usize {
        assert_eq!(ijk.len(), self.dim);
        let mut flat = 0;
        for ax in 0..self.dim {
            assert!(ijk[ax] < self.counts[ax], "cell index out of range");
            flat = flat * self.counts[ax] + ijk[ax];
        }
        flat
    }

    pub fn cell_coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for ax in (0..self.dim).rev() {
            out[ax] = flat % self.counts[ax];
            flat /= self.counts[ax];
        }
        out
    }

    pub fn cell_lo(&self, ijk: &[usize]) -> Vec<f64> {
        (0..self.dim)
            .map(|ax| self.origin[ax] + ijk[ax] as f64 * self.spacing[ax])
            .collect()
    }

    /// Cell containing the point, clamped onto the grid.
    pub fn cell_of_point(&self, p: &[f64]) -> Vec<usize> {
        (0..self.dim)
            .map(|ax| {
                let raw = (p[ax] - self.origin[ax]) / self.spacing[ax];
                let idx = libm::floor(raw) as i64;
                idx.clamp(0, self.counts[ax] as i64 - 1) as usize
            })
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing[..self.dim].iter().product()
    }

    /// Largest cell edge, the mesh-size parameter of convergence studies.
    pub fn h_max(&self) -> f64 {
        self.spacing[..self.dim]
            .iter()
            .fold(0.0f64, |m, s| m.max(*s))
    }

    /// Grid-line coordinate `i` along `axis` (0..=counts).
    pub fn line(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellLabel {
    Interior,
    Cut,
    Exterior,
}

/// Geometry of the active part of one cut cell, in cell-local `[0,1]^dim`
/// coordinates.
#[derive(Debug, Clone)]
pub enum CutGeometry {
    Region(TrimmedRegion2D),
    Solid(BRepSolid),
}

/// Grid cell labels plus per-cut-cell geometry.
#[derive(Debug, Clone)]
pub struct CellClassification {
    pub grid: CartesianGrid,
    pub labels: Vec<CellLabel>,
    pub cut_cells: BTreeMap<usize, CutGeometry>,
}

impl CellClassification {
    pub fn label(&self, flat: usize) -> CellLabel {
        self.labels[flat]
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for l in &self.labels {
            match l {
                CellLabel::Interior => c.0 += 1,
                CellLabel::Cut => c.1 += 1,
                CellLabel::Exterior => c.2 += 1,
            }
        }
        c
    }

    /// Indices of cells contributing to the discrete problem.
    pub fn active_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != CellLabel::Exterior)
            .map(|(i, _)| i)
    }

    /// The classification invariant: one label per cell and geometry exactly
    /// for the cut ones.
    pub fn check_partition(&self) -> bool {
        if self.labels.len() != self.grid.n_cells() {
            return false;
        }
        for (i, l) in self.labels.iter().enumerate() {
            let has_geom = self.cut_cells.contains_key(&i);
            if (*l == CellLabel::Cut) != has_geom {
                return false;
            }
        }
        true
    }
}
