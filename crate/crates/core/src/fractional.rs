//! Slice fractional integrals of order 1, their composition `T`, and the
//! singular-kernel quadrature they require.
//!
//! The kernel on a block of dimension `d` is `|x - x̄|^{-(d-1)}`: identically 1
//! for `d = 1` (the slice integral degenerates to a plain integral) and
//! `1/|x - x̄|` for `d = 2`, integrable but singular. Off-singularity cells use
//! the midpoint rule; a cell whose closure contains the target is subdivided
//! recursively into quadrants, accumulating midpoint contributions of the
//! subcells away from the target and dropping the innermost one (its kernel
//! integral is `O(2^{-depth} · h)`).

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::{Axis, AxisGrid, GridFn, Point, ProductGrid};
use crate::maximal::hl_maximal_slice;

pub const MAX_SELF_CELL_DEPTH: u32 = 8;

/// Quadrature rule for one block's kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelQuadRule {
    pub self_cell_depth: u32,
    pub block_dim: usize,
}

impl KernelQuadRule {
    pub fn new(block_dim: usize, self_cell_depth: u32) -> Result<Self> {
        if block_dim != 1 && block_dim != 2 {
            return Err(CoreError::invalid(format!("kernel rule block_dim must be 1 or 2, got {block_dim}")));
        }
        if self_cell_depth > MAX_SELF_CELL_DEPTH {
            return Err(CoreError::invalid(format!(
                "self_cell_depth bounded by {MAX_SELF_CELL_DEPTH}, got {self_cell_depth}"
            )));
        }
        Ok(KernelQuadRule { self_cell_depth, block_dim })
    }

    /// Rules matched to the two blocks of a grid.
    pub fn for_grid(grid: &ProductGrid, depth: u32) -> Result<(KernelQuadRule, KernelQuadRule)> {
        Ok((
            KernelQuadRule::new(grid.g1.cube.dim, depth)?,
            KernelQuadRule::new(grid.g2.cube.dim, depth)?,
        ))
    }
}

fn dist2(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Quadrature weight of one source cell against a target point:
/// `∫_cell k(target, x̄) dx̄` with `k ≡ 1` for `d = 1` and `1/|·|` for `d = 2`.
pub(crate) fn kernel_cell_weight(grid: &AxisGrid, cell: usize, target: Point, rule: &KernelQuadRule) -> f64 {
    if grid.cube.dim == 1 {
        return grid.h();
    }
    let h = grid.h();
    let coords = grid.cell_coords(cell);
    let lo = [
        grid.cube.lower[0] + coords[0] as f64 * h,
        grid.cube.lower[1] + coords[1] as f64 * h,
    ];
    // containment with an ulp-scale slack: targets exactly on a cell edge
    // (probe corners, or midpoints whose coordinates are not binary-exact)
    // must not slip between closed cells
    let eps = h * 1e-9;
    let inside = target[0] >= lo[0] - eps
        && target[0] <= lo[0] + h + eps
        && target[1] >= lo[1] - eps
        && target[1] <= lo[1] + h + eps;
    if inside {
        singular_cell_weight(lo, h, target, rule.self_cell_depth)
    } else {
        let mid = [lo[0] + 0.5 * h, lo[1] + 0.5 * h];
        h * h / dist2(target, mid)
    }
}

fn singular_cell_weight(lo: Point, size: f64, target: Point, depth: u32) -> f64 {
    if depth == 0 {
        return 0.0; // innermost subcell dropped; its kernel mass is O(size)
    }
    let half = size * 0.5;
    let eps = half * 1e-9;
    let mut acc = 0.0;
    let mut recursed = false;
    for iu in 0..2 {
        for iv in 0..2 {
            let slo = [lo[0] + iu as f64 * half, lo[1] + iv as f64 * half];
            let contains = !recursed
                && target[0] >= slo[0] - eps
                && target[0] <= slo[0] + half + eps
                && target[1] >= slo[1] - eps
                && target[1] <= slo[1] + half + eps;
            if contains {
                acc += singular_cell_weight(slo, half, target, depth - 1);
                recursed = true;
            } else {
                let mid = [slo[0] + 0.5 * half, slo[1] + 0.5 * half];
                acc += half * half / dist2(target, mid);
            }
        }
    }
    acc
}

/// Kernel-weight matrix from arbitrary target points to all cells of a block.
/// Row-major: `targets.len() × grid.cell_count()`.
pub fn kernel_matrix(grid: &AxisGrid, targets: &[Point], rule: &KernelQuadRule) -> Result<Vec<f64>> {
    if rule.block_dim != grid.cube.dim {
        return Err(CoreError::invalid(format!(
            "kernel rule is for dimension {} but block has dimension {}",
            rule.block_dim, grid.cube.dim
        )));
    }
    let cells = grid.cell_count();
    let rows = crate::exec::par_map_indexed(targets.len(), |t| {
        let mut row = Vec::with_capacity(cells);
        for s in 0..cells {
            row.push(kernel_cell_weight(grid, s, targets[t], rule));
        }
        row
    });
    let mut out = Vec::with_capacity(targets.len() * cells);
    for r in rows {
        out.extend(r);
    }
    Ok(out)
}

/// Slice fractional integral along one block: for each frozen complementary
/// coordinate, `(I_1 g^slice)(midpoint)` by midpoint quadrature over source
/// cells of that block, restricted to `R`.
pub fn riesz_slice(g: &GridFn, axis: Axis, rule: &KernelQuadRule) -> Result<GridFn> {
    let grid = g.grid;
    let (active, _other_cells) = match axis {
        Axis::X => (grid.g1, grid.g2.cell_count()),
        Axis::Y => (grid.g2, grid.g1.cell_count()),
    };
    let k = kernel_matrix(&active, &active.midpoints(), rule)?;
    let c1 = grid.g1.cell_count();
    let c2 = grid.g2.cell_count();
    let values = match axis {
        Axis::X => {
            // out[t, j] = Σ_s K[t, s] g[s, j]
            let cols = crate::exec::par_map_indexed(c1, |t| {
                let mut row = vec![0.0; c2];
                for s in 0..c1 {
                    let kw = k[t * c1 + s];
                    let base = s * c2;
                    for (j, r) in row.iter_mut().enumerate() {
                        *r += kw * g.values[base + j];
                    }
                }
                row
            });
            cols.concat()
        }
        Axis::Y => {
            // out[i, t] = Σ_s K[t, s] g[i, s]
            let rows = crate::exec::par_map_indexed(c1, |i| {
                let base = i * c2;
                let mut row = vec![0.0; c2];
                for (t, r) in row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for s in 0..c2 {
                        acc += k[t * c2 + s] * g.values[base + s];
                    }
                    *r = acc;
                }
                row
            });
            rows.concat()
        }
    };
    GridFn::new(grid, values)
}

/// The biparametric fractional operator `T = I_1^{(1)} ∘ I_1^{(2)}`, always
/// computed in factored form.
pub fn biparam_t(g: &GridFn, rule1: &KernelQuadRule, rule2: &KernelQuadRule) -> Result<GridFn> {
    riesz_slice(&riesz_slice(g, Axis::Y, rule2)?, Axis::X, rule1)
}

/// Evaluate `T g` at arbitrary target points `(x, y)` (tensor layout:
/// `xs.len() × ys.len()`, row-major). Targets may sit on cell boundaries; the
/// self-cell recursion handles a singularity anywhere in a closed cell.
pub fn biparam_t_at_points(
    g: &GridFn,
    xs: &[Point],
    ys: &[Point],
    rule1: &KernelQuadRule,
    rule2: &KernelQuadRule,
) -> Result<Vec<f64>> {
    let grid = g.grid;
    let c1 = grid.g1.cell_count();
    let c2 = grid.g2.cell_count();
    let k1 = kernel_matrix(&grid.g1, xs, rule1)?;
    let k2 = kernel_matrix(&grid.g2, ys, rule2)?;
    // inner = g · K2ᵀ : (c1 × ys)
    let inner = crate::exec::par_map_indexed(c1, |s1| {
        let base = s1 * c2;
        let mut row = vec![0.0; ys.len()];
        for (t, r) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for s2 in 0..c2 {
                acc += k2[t * c2 + s2] * g.values[base + s2];
            }
            *r = acc;
        }
        row
    });
    // out = K1 · inner : (xs × ys)
    let out_rows = crate::exec::par_map_indexed(xs.len(), |t1| {
        let mut row = vec![0.0; ys.len()];
        for s1 in 0..c1 {
            let kw = k1[t1 * c1 + s1];
            for (t2, r) in row.iter_mut().enumerate() {
                *r += kw * inner[s1][t2];
            }
        }
        row
    });
    Ok(out_rows.concat())
}

/// Smallest `C` with `I_1(g χ_Q) ≤ C · ℓ(Q) · M(g χ_Q)` over all midpoints
/// and all slices of the `axis` block; midpoints where the maximal function
/// vanishes (so `g ≡ 0` along the slice) are skipped.
pub fn check_maxfrac_domination(g: &GridFn, axis: Axis, rule: &KernelQuadRule) -> Result<f64> {
    if g.values.iter().any(|&v| v < 0.0) {
        return Err(CoreError::invalid("maximal/fractional domination requires g >= 0"));
    }
    let riesz = riesz_slice(g, axis, rule)?;
    let maximal = hl_maximal_slice(g, axis);
    let ell = match axis {
        Axis::X => g.grid.g1.cube.side,
        Axis::Y => g.grid.g2.cube.side,
    };
    let mut best = 0.0f64;
    for (i, m) in maximal.values.iter().enumerate() {
        if *m > 0.0 {
            best = best.max(riesz.values[i] / (ell * m));
        }
    }
    Ok(best)
}
