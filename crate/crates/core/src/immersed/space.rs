//! Tensor-product B-spline spaces on the background grid, with per-element
//! Bézier extraction.
//!
//! Extraction matrices come from knot insertion applied to identity control
//! vectors: inserting all interior knots up to full multiplicity turns the
//! spline into its Bézier segments, and the resulting "control points" of
//! basis vector `e_j` are exactly the Bernstein coefficients of `N_j` on
//! each element.

use alloc::vec;
use alloc::vec::Vec;

use crate::brep::split_bspline_curve;
use crate::linalg::Mat;

use super::grid::{CartesianGrid, CellClassification, CellLabel};

/// One parametric direction of the space.
#[derive(Debug, Clone)]
pub struct AxisSpace {
    pub degree: usize,
    pub n_cells: usize,
    /// Interior knot multiplicity; 1 gives maximal `C^{p-1}` continuity.
    pub multiplicity: usize,
    pub n_basis: usize,
    /// Per cell, the `(p+1) x (p+1)` matrix with `N_j|cell = sum_k C[j][k] B_k`
    /// for the `p+1` functions supported on the cell.
    pub extraction: Vec<Mat>,
    /// Per cell, the global index of the first supported basis function.
    pub first_basis: Vec<usize>,
}

fn build_axis(degree: usize, n_cells: usize, multiplicity: usize) -> AxisSpace {
    assert!(degree >= 1);
    assert!((1..=degree).contains(&multiplicity) || (degree == multiplicity));
    let n_basis = degree + 1 + (n_cells - 1) * multiplicity;
    // open knot vector on [0, n_cells] in parameter units of whole cells
    let mut knots = vec![0.0; degree + 1];
    for i in 1..n_cells {
        for _ in 0..multiplicity {
            knots.push(i as f64);
        }
    }
    knots.extend(vec![n_cells as f64; degree + 1]);

    // identity control vectors: the splitter returns, per segment and
    // Bernstein index, the weights of every original function
    let ctrl: Vec<Vec<f64>> = (0..n_basis)
        .map(|j| {
            let mut row = vec![0.0; n_basis];
            row[j] = 1.0;
            row
        })
        .collect();
    let segs = split_bspline_curve(&knots, degree, &ctrl).expect("open uniform knots are valid");
    assert_eq!(segs.len(), n_cells);

    let mut extraction = Vec::with_capacity(n_cells);
    let mut first_basis = Vec::with_capacity(n_cells);
    for seg in segs {
        // seg[k][j] = coefficient of original function j at Bernstein index k
        let mut support: Vec<usize> = Vec::new();
        for j in 0..n_basis {
            if seg.iter().any(|row| row[j].abs() > 1e-14) {
                support.push(j);
            }
        }
        assert_eq!(support.len(), degree + 1, "unexpected support width");
        let first = support[0];
        assert!(support.windows(2).all(|w| w[1] == w[0] + 1));
        let mut c = Mat::zeros(degree + 1, degree + 1);
        for (local, j) in support.iter().enumerate() {
            for k in 0..=degree {
                c.set(local, k, seg[k][*j]);
            }
        }
        extraction.push(c);
        first_basis.push(first);
    }
    AxisSpace {
        degree,
        n_cells,
        multiplicity,
        n_basis,
        extraction,
        first_basis,
    }
}

/// A tensor-product spline space over the whole background grid.
#[derive(Debug, Clone)]
pub struct SplineSpace {
    pub dim: usize,
    pub axes: Vec<AxisSpace>,
}

impl SplineSpace {
    /// Open uniform knots with interior continuity `degree - multiplicity`;
    /// `multiplicity = 1` is the maximal-continuity default.
    pub fn open_uniform(grid: &CartesianGrid, degree: usize, multiplicity: usize) -> Self {
        let axes = (0..grid.dim)
            .map(|ax| build_axis(degree, grid.counts[ax], multiplicity))
            .collect();
        SplineSpace {
            dim: grid.dim,
            axes,
        }
    }

    pub fn n_basis_total(&self) -> usize {
        self.axes.iter().map(|a| a.n_basis).product()
    }

    /// Flat basis index from per-axis indices, last axis fastest.
    pub fn basis_index(&self, ijk: &[usize]) -> usize {
        let mut flat = 0;
        for ax in 0..self.dim {
            flat = flat * self.axes[ax].n_basis + ijk[ax];
        }
        flat
    }

    pub fn basis_coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for ax in (0..self.dim).rev() {
            out[ax] = flat % self.axes[ax].n_basis;
            flat /= self.axes[ax].n_basis;
        }
        out
    }

    /// Number of functions supported on each cell: `(p+1)^dim`.
    pub fn functions_per_cell(&self) -> usize {
        self.axes.iter().map(|a| a.degree + 1).product()
    }

    /// Global basis multi-index of a cell-local function.
    pub fn cell_function(&self, cell: &[usize], local: &[usize]) -> Vec<usize> {
        (0..self.dim)
            .map(|ax| self.axes[ax].first_basis[cell[ax]] + local[ax])
            .collect()
    }
}

/// Map between the full tensor index set and the active (supported on the
/// physical domain) degrees of freedom, in ascending tensor order.
#[derive(Debug, Clone)]
pub struct ActiveSet {
    /// tensor index -> dense dof id
    pub to_dense: Vec<Option<usize>>,
    /// dense dof id -> tensor index
    pub to_tensor: Vec<usize>,
}

impl ActiveSet {
    /// Functions whose support touches any interior or cut cell.
    pub fn build(space: &SplineSpace, class: &CellClassification) -> ActiveSet {
        let total = space.n_basis_total();
        let mut active = vec![false; total];
        let grid = &class.grid;
        for flat in 0..grid.n_cells() {
            if class.labels[flat] == CellLabel::Exterior {
                continue;
            }
            let cell = grid.cell_coords(flat);
            mark_cell_functions(space, &cell, &mut active);
        }
        let mut to_dense = vec![None; total];
        let mut to_tensor = Vec::new();
        for (i, is_active) in active.iter().enumerate() {
            if *is_active {
                to_dense[i] = Some(to_tensor.len());
                to_tensor.push(i);
            }
        }
        ActiveSet { to_dense, to_tensor }
    }

    pub fn n_dofs(&self) -> usize {
        self.to_tensor.len()
    }
}

fn mark_cell_functions(space: &SplineSpace, cell: &[usize], active: &mut [bool]) {
    let per_axis: Vec<usize> = space.axes.iter().map(|a| a.degree + 1).collect();
    let mut local = vec![0usize; space.dim];
    loop {
        let global = space.cell_function(cell, &local);
        active[space.basis_index(&global)] = true;
        // odometer
        let mut ax = space.dim;
        loop {
            if ax == 0 {
                return;
            }
            ax -= 1;
            local[ax] += 1;
            if local[ax] < per_axis[ax] {
                break;
            }
            local[ax] = 0;
            if ax == 0 {
                return;
            }
        }
    }
}
