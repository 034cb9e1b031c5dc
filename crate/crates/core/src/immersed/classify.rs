//! Cut-cell classification.
//!
//! 2D regions are classified in-repo: trimming curves are intersected with
//! the grid lines by Bernstein root isolation, split at the crossing
//! parameters, and the fragments inside each cut cell are closed into
//! oriented loops together with cell-edge segments. 3D classifications are
//! assembled from externally supplied per-cell solids (an intersection
//! kernel is out of scope); this module validates them.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bernstein::Poly1;
use crate::brep::{
    validate_region, validate_solid, BRepSolid, BezierCurve, LoopKind, TrimLoop, TrimmedRegion2D,
};
use crate::oracle::{point_in_region, Location};
use crate::rootfind::{isolate_roots, RootFindError};

use super::grid::{CartesianGrid, CellClassification, CellLabel, CutGeometry};

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifyError {
    /// Grid-curve contact is non-transversal within tolerance.
    TangentialContact { cell: usize },
    /// Root isolation could not separate a crossing cluster.
    RootCluster { axis: usize, line: f64 },
    /// Loop assembly inside a cut cell failed.
    ChainAssembly { cell: usize },
    /// A cell centre sits on the boundary band without any crossing.
    DegenerateCenter { cell: usize },
    /// Assembled cell geometry failed validation.
    InvalidCellGeometry { cell: usize },
    /// 3D input problems (duplicate or out-of-range cells, bad solids).
    InvalidCellData { cell: usize },
}

impl core::fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ClassifyError::TangentialContact { cell } => {
                write!(f, "tangential grid contact in cell {cell}")
            }
            ClassifyError::RootCluster { axis, line } => {
                write!(f, "unresolved crossing cluster on axis-{axis} line {line}")
            }
            ClassifyError::ChainAssembly { cell } => {
                write!(f, "could not close boundary chains in cell {cell}")
            }
            ClassifyError::DegenerateCenter { cell } => {
                write!(f, "cell {cell} centre lies on the boundary band")
            }
            ClassifyError::InvalidCellGeometry { cell } => {
                write!(f, "assembled geometry of cell {cell} failed validation")
            }
            ClassifyError::InvalidCellData { cell } => {
                write!(f, "cell {cell} carries invalid classification data")
            }
        }
    }
}

const SNAP: f64 = 1e-9;

/// Classifies the cells of a 2D grid against a trimmed region. Fragments of
/// trimming curves are stored per cut cell in local `[0,1]^2` coordinates,
/// closed with cell-edge segments, outer loops counter-clockwise.
pub fn classify_cells_2d(
    grid: &CartesianGrid,
    region: &TrimmedRegion2D,
    geom_tol: f64,
) -> Result<CellClassification, ClassifyError> {
    assert_eq!(grid.dim, 2);
    let n_cells = grid.n_cells();

    // 1. split every curve at its grid-line crossings
    let mut cell_fragments: BTreeMap<usize, Vec<BezierCurve>> = BTreeMap::new();
    for curve in region.curves() {
        if curve.polygon_length() < geom_tol {
            continue;
        }
        let mut params: Vec<f64> = Vec::new();
        for axis in 0..2 {
            let comp = curve.component(axis);
            let scale = comp.max_abs_coeff().max(1.0);
            for i in 0..=grid.counts[axis] {
                let value = grid.line(axis, i);
                let diff = comp.add(&Poly1::constant(-value));
                if diff.max_abs_coeff() < 1e-12 * scale.max(value.abs()) {
                    // curve runs along this grid line; transversal crossings
                    // with the other family still split it correctly
                    continue;
                }
                match isolate_roots(&diff) {
                    Ok(roots) => params.extend(roots.iter().map(|r| r.t)),
                    Err(RootFindError::DegenerateInput) => continue,
                    Err(RootFindError::ClusteredRoots) => {
                        return Err(ClassifyError::RootCluster { axis, line: value })
                    }
                }
            }
        }
        for fragment in curve.split_at_params(&params) {
            if fragment.polygon_length() < geom_tol {
                continue;
            }
            let mid = fragment.point_at(0.5);
            let ijk = grid.cell_of_point(&mid);
            let flat = grid.cell_index(&ijk);
            // non-transversal sanity: an interior fragment midpoint sitting
            // on an interior grid line means the curve runs along it
            for axis in 0..2 {
                let rel = (mid[axis] - grid.origin[axis]) / grid.spacing[axis];
                let nearest = libm::round(rel);
                if (rel - nearest).abs() < 1e-9
                    && nearest > 0.5
                    && nearest < grid.counts[axis] as f64 - 0.5
                {
                    return Err(ClassifyError::TangentialContact { cell: flat });
                }
            }
            let lo = grid.cell_lo(&ijk);
            let local = fragment.transform_affine(
                &[1.0 / grid.spacing[0], 1.0 / grid.spacing[1]],
                &[-lo[0] / grid.spacing[0], -lo[1] / grid.spacing[1]],
            );
            cell_fragments.entry(flat).or_default().push(local);
        }
    }

    // 2. assemble loops inside every cut cell
    let mut labels = vec![CellLabel::Exterior; n_cells];
    let mut cut_cells = BTreeMap::new();
    for (flat, fragments) in cell_fragments {
        let ijk = grid.cell_coords(flat);
        let lo = grid.cell_lo(&ijk);
        let boundary_probe = |local: [f64; 2]| {
            let global = [
                lo[0] + local[0] * grid.spacing[0],
                lo[1] + local[1] * grid.spacing[1],
            ];
            point_in_region(region, global, geom_tol)
        };
        let local_region = assemble_cell_region(fragments, &boundary_probe)
            .ok_or(ClassifyError::ChainAssembly { cell: flat })?;
        let area = local_region.signed_area();
        if area > 1.0 - 1e-9 {
            labels[flat] = CellLabel::Interior;
            continue;
        }
        if area < 1e-12 {
            labels[flat] = CellLabel::Exterior;
            continue;
        }
        if !validate_region(&local_region, 100.0 * SNAP).pass() {
            return Err(ClassifyError::InvalidCellGeometry { cell: flat });
        }
        labels[flat] = CellLabel::Cut;
        cut_cells.insert(flat, CutGeometry::Region(local_region));
    }

    // 3. classify the remaining cells by their centres
    for flat in 0..n_cells {
        if labels[flat] != CellLabel::Exterior || cut_cells.contains_key(&flat) {
            continue;
        }
        let ijk = grid.cell_coords(flat);
        let lo = grid.cell_lo(&ijk);
        let centre = [lo[0] + 0.5 * grid.spacing[0], lo[1] + 0.5 * grid.spacing[1]];
        match point_in_region(region, centre, geom_tol) {
            Location::Inside => labels[flat] = CellLabel::Interior,
            Location::Outside => {}
            Location::Boundary => return Err(ClassifyError::DegenerateCenter { cell: flat }),
        }
    }

    Ok(CellClassification {
        grid: grid.clone(),
        labels,
        cut_cells,
    })
}

/// Closes curve fragments into oriented loops within the unit cell. The
/// `boundary_probe` classifies local points against the global region (used
/// when the cell boundary carries no crossing at all).
fn assemble_cell_region(
    fragments: Vec<BezierCurve>,
    boundary_probe: &dyn Fn([f64; 2]) -> Location,
) -> Option<TrimmedRegion2D> {
    // snap endpoints that belong on the cell boundary
    let snapped: Vec<BezierCurve> = fragments
        .into_iter()
        .map(|c| {
            let snap_point = |p: Vec<f64>| -> Vec<f64> {
                p.into_iter()
                    .map(|x| {
                        if x.abs() < SNAP {
                            0.0
                        } else if (x - 1.0).abs() < SNAP {
                            1.0
                        } else {
                            x
                        }
                    })
                    .collect()
            };
            let s = snap_point(c.start());
            let e = snap_point(c.end());
            c.with_endpoints(&s, &e)
        })
        .collect();

    // stitch into chains
    let mut chains: Vec<Vec<BezierCurve>> = snapped.into_iter().map(|c| vec![c]).collect();
    let tol2 = (10.0 * SNAP) * (10.0 * SNAP);
    let dist2 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
    };
    let mut stitched: Vec<Vec<BezierCurve>> = Vec::new();
    while let Some(mut chain) = chains.pop() {
        loop {
            let end = chain.last().unwrap().end();
            let start = chain[0].start();
            let mut extended = false;
            for i in 0..chains.len() {
                if dist2(&chains[i][0].start(), &end) < tol2 {
                    let mut next = chains.remove(i);
                    chain.append(&mut next);
                    extended = true;
                    break;
                }
                if dist2(&chains[i].last().unwrap().end(), &start) < tol2 {
                    let mut prev = chains.remove(i);
                    prev.append(&mut chain);
                    chain = prev;
                    extended = true;
                    break;
                }
            }
            if !extended {
                break;
            }
        }
        stitched.push(chain);
    }

    let mut loops: Vec<TrimLoop> = Vec::new();
    let mut open: Vec<Vec<BezierCurve>> = Vec::new();
    for chain in stitched {
        let gap = dist2(&chain[0].start(), &chain.last().unwrap().end());
        if gap < tol2 {
            let lp = TrimLoop::new(LoopKind::Outer, chain);
            let kind = if lp.signed_area() >= 0.0 {
                LoopKind::Outer
            } else {
                LoopKind::Inner
            };
            loops.push(TrimLoop { kind, ..lp });
        } else {
            open.push(chain);
        }
    }

    if !open.is_empty() {
        let closed = close_chains_on_unit_cell(open)?;
        loops.extend(closed);
    } else {
        // No chain crosses the cell boundary. The cell square becomes the
        // outer loop when the boundary lies in material and is not already
        // enclosed by one of the closed chains (probe several spots to dodge
        // geometry hugging one corner).
        let chain_region = TrimmedRegion2D {
            loops: loops
                .iter()
                .map(|l| TrimLoop {
                    kind: LoopKind::Outer,
                    curves: l.curves.clone(),
                })
                .collect(),
        };
        let probes = [
            [1e-3, 1e-3],
            [0.5, 1e-3],
            [1.0 - 1e-3, 0.5],
            [0.5, 1.0 - 1e-3],
            [1e-3, 0.5],
        ];
        let mut decided = false;
        let mut needs_square = false;
        for probe in probes {
            match boundary_probe(probe) {
                Location::Boundary => continue,
                Location::Outside => {
                    decided = true;
                }
                Location::Inside => {
                    decided = true;
                    let covered = !loops.is_empty()
                        && crate::oracle::winding_number(&chain_region, probe) == 1;
                    if !covered {
                        needs_square = true;
                        break;
                    }
                }
            }
        }
        if !decided {
            return None;
        }
        if needs_square {
            loops.push(
                TrimLoop::rectangle(LoopKind::Outer, [0.0, 0.0], [1.0, 1.0]).with_cell_edges(),
            );
        }
    }
    if loops.is_empty() {
        // no material in this cell after all
        return Some(empty_region());
    }
    Some(TrimmedRegion2D { loops })
}

trait CellEdgeTag {
    fn with_cell_edges(self) -> TrimLoop;
}

impl CellEdgeTag for TrimLoop {
    fn with_cell_edges(mut self) -> TrimLoop {
        for c in self.curves.iter_mut() {
            c.on_domain_boundary = false;
        }
        self
    }
}

/// A region with (numerically) zero area, used when a cell turns out empty.
fn empty_region() -> TrimmedRegion2D {
    TrimmedRegion2D {
        loops: vec![TrimLoop::new(
            LoopKind::Outer,
            vec![
                BezierCurve::segment_2d([0.0, 0.0], [0.0, 0.0]),
                BezierCurve::segment_2d([0.0, 0.0], [0.0, 0.0]),
            ],
        )],
    }
}

fn perimeter_coord_unit(p: &[f64], tol: f64) -> Option<f64> {
    if (p[1]).abs() < tol {
        return Some(p[0].clamp(0.0, 1.0));
    }
    if (p[0] - 1.0).abs() < tol {
        return Some(1.0 + p[1].clamp(0.0, 1.0));
    }
    if (p[1] - 1.0).abs() < tol {
        return Some(2.0 + (1.0 - p[0]).clamp(0.0, 1.0));
    }
    if (p[0]).abs() < tol {
        return Some(3.0 + (1.0 - p[1]).clamp(0.0, 1.0));
    }
    None
}

fn perimeter_point_unit(s: f64) -> [f64; 2] {
    let s = {
        let r = s % 4.0;
        if r < 0.0 {
            r + 4.0
        } else {
            r
        }
    };
    if s < 1.0 {
        [s, 0.0]
    } else if s < 2.0 {
        [1.0, s - 1.0]
    } else if s < 3.0 {
        [3.0 - s, 1.0]
    } else {
        [0.0, 4.0 - s]
    }
}

/// Connects open chains along the unit-cell perimeter (counter-clockwise,
/// material to the left), inserting cell-edge segments and corners.
fn close_chains_on_unit_cell(open: Vec<Vec<BezierCurve>>) -> Option<Vec<TrimLoop>> {
    let tol = 100.0 * SNAP;
    let mut entries: Vec<(f64, f64, Vec<BezierCurve>)> = Vec::new();
    for ch in open {
        let s0 = perimeter_coord_unit(&ch[0].start(), tol)?;
        let s1 = perimeter_coord_unit(&ch.last().unwrap().end(), tol)?;
        entries.push((s0, s1, ch));
    }
    let wrap4 = |s: f64| {
        let r = s % 4.0;
        if r < 0.0 {
            r + 4.0
        } else {
            r
        }
    };
    let mut used = vec![false; entries.len()];
    let mut loops = Vec::new();
    for seed in 0..entries.len() {
        if used[seed] {
            continue;
        }
        let mut curves: Vec<BezierCurve> = Vec::new();
        let mut current = seed;
        let start_s = entries[seed].0;
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > entries.len() + 2 {
                return None;
            }
            used[current] = true;
            curves.extend(entries[current].2.iter().cloned());
            let from_s = entries[current].1;
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
            // cell-edge segments from `from_s` forward by `ahead`, split at
            // corners; skip degenerate slivers
            let mut segs: Vec<f64> = Vec::new();
            let mut corner = libm::ceil(from_s - 1e-12);
            if corner - from_s < 1e-12 {
                corner += 1.0;
            }
            let mut walked = corner - from_s;
            while walked < ahead - 1e-12 {
                segs.push(corner);
                corner += 1.0;
                walked += 1.0;
            }
            let mut prev_s = from_s;
            let target_s = from_s + ahead;
            for s in segs {
                push_edge_segment(&mut curves, prev_s, s);
                prev_s = s;
            }
            push_edge_segment(&mut curves, prev_s, target_s);
            if next == seed {
                break;
            }
            current = next;
        }
        let lp = TrimLoop::new(LoopKind::Outer, curves);
        let kind = if lp.signed_area() >= 0.0 {
            LoopKind::Outer
        } else {
            LoopKind::Inner
        };
        loops.push(TrimLoop { kind, ..lp });
    }
    Some(loops)
}

fn push_edge_segment(curves: &mut Vec<BezierCurve>, s0: f64, s1: f64) {
    if s1 - s0 < 1e-9 {
        return;
    }
    let a = perimeter_point_unit(s0);
    let b = perimeter_point_unit(s1);
    curves.push(BezierCurve::segment_2d(a, b).with_domain_boundary(false));
}

/// Builds a 3D classification from externally cut cell solids: `cut` maps
/// grid coordinates to cell-local solids, `interior` lists the fully inside
/// cells, everything else is exterior. Solids are validated.
pub fn classification_from_cells_3d(
    grid: &CartesianGrid,
    interior: &[Vec<usize>],
    cut: Vec<(Vec<usize>, BRepSolid)>,
    geom_tol: f64,
) -> Result<CellClassification, ClassifyError> {
    assert_eq!(grid.dim, 3);
    let n = grid.n_cells();
    let mut labels = vec![CellLabel::Exterior; n];
    let mut cut_cells = BTreeMap::new();
    for ijk in interior {
        let flat = grid.cell_index(ijk);
        if labels[flat] != CellLabel::Exterior {
            return Err(ClassifyError::InvalidCellData { cell: flat });
        }
        labels[flat] = CellLabel::Interior;
    }
    for (ijk, solid) in cut {
        let flat = grid.cell_index(&ijk);
        if labels[flat] != CellLabel::Exterior {
            return Err(ClassifyError::InvalidCellData { cell: flat });
        }
        if !validate_solid(&solid, geom_tol).pass() {
            return Err(ClassifyError::InvalidCellGeometry { cell: flat });
        }
        labels[flat] = CellLabel::Cut;
        cut_cells.insert(flat, CutGeometry::Solid(solid));
    }
    Ok(CellClassification {
        grid: grid.clone(),
        labels,
        cut_cells,
    })
}
