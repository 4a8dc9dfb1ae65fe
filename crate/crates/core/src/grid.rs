//! Cubes, product rectangles, midpoint grids and quadrature.
//!
//! Everything downstream consumes these types: a rectangle `R = I1 × I2` is a
//! product of two axis-parallel cubes (each of dimension 1 or 2), discretized
//! by a midpoint rule with a fixed number of cells per side in each block.
//! Midpoints never touch cell edges, which keeps power weights finite and
//! isolates the fractional kernel singularity in the self cell.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// A point in one block. Only the first `dim` coordinates are meaningful.
pub type Point = [f64; 2];

/// Which block of the product an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// An axis-parallel cube in dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub dim: usize,
    pub lower: Point,
    pub side: f64,
}

impl Cube {
    pub fn new(dim: usize, lower: Point, side: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(CoreError::invalid(format!("cube dim must be 1 or 2, got {dim}")));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(CoreError::invalid(format!("cube side must be positive, got {side}")));
        }
        if !lower.iter().take(dim).all(|v| v.is_finite()) {
            return Err(CoreError::invalid("cube lower corner must be finite"));
        }
        Ok(Cube { dim, lower, side })
    }

    /// Lebesgue measure `side^dim`.
    pub fn measure(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// True if `pt` lies in the closed cube.
    pub fn contains(&self, pt: Point) -> bool {
        (0..self.dim).all(|k| pt[k] >= self.lower[k] - 1e-15 && pt[k] <= self.lower[k] + self.side + 1e-15)
    }
}

/// A rectangle `R = I1 × I2` of the basis: product of two cubes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub i1: Cube,
    pub i2: Cube,
}

impl Rect {
    pub fn new(i1: Cube, i2: Cube) -> Self {
        Rect { i1, i2 }
    }

    /// Unit rectangle `[0,1] × [0,1]` with one-dimensional blocks.
    pub fn unit_square() -> Self {
        Rect {
            i1: Cube { dim: 1, lower: [0.0, 0.0], side: 1.0 },
            i2: Cube { dim: 1, lower: [0.0, 0.0], side: 1.0 },
        }
    }

    pub fn measure(&self) -> f64 {
        self.i1.measure() * self.i2.measure()
    }

    /// `ℓ(I1) · ℓ(I2)`, the geometry factor of every product inequality here.
    pub fn side_product(&self) -> f64 {
        self.i1.side * self.i2.side
    }
}

/// Midpoint discretization of one block: `cells_per_side^dim` congruent cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub cube: Cube,
    pub cells_per_side: usize,
}

impl AxisGrid {
    pub fn new(cube: Cube, cells_per_side: usize) -> Result<Self> {
        if cells_per_side < 2 {
            return Err(CoreError::invalid(format!(
                "cells_per_side must be at least 2, got {cells_per_side}"
            )));
        }
        Ok(AxisGrid { cube, cells_per_side })
    }

    /// Cell width `side / N`.
    pub fn h(&self) -> f64 {
        self.cube.side / self.cells_per_side as f64
    }

    /// Total number of cells, `N^dim`.
    pub fn cell_count(&self) -> usize {
        self.cells_per_side.pow(self.cube.dim as u32)
    }

    /// Measure of one cell, `h^dim`.
    pub fn cell_measure(&self) -> f64 {
        self.h().powi(self.cube.dim as i32)
    }

    /// Per-coordinate index of a flat cell index. `dim = 1` yields `[i, 0]`.
    pub fn cell_coords(&self, idx: usize) -> [usize; 2] {
        debug_assert!(idx < self.cell_count());
        if self.cube.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.cells_per_side, idx % self.cells_per_side]
        }
    }

    pub fn cell_index(&self, coords: [usize; 2]) -> usize {
        if self.cube.dim == 1 {
            coords[0]
        } else {
            coords[0] * self.cells_per_side + coords[1]
        }
    }

    /// Midpoint of a cell by flat index.
    pub fn midpoint(&self, idx: usize) -> Point {
        let c = self.cell_coords(idx);
        let h = self.h();
        let mut p = [0.0, 0.0];
        for k in 0..self.cube.dim {
            p[k] = self.cube.lower[k] + (c[k] as f64 + 0.5) * h;
        }
        p
    }

    /// All midpoints in flat-index order.
    pub fn midpoints(&self) -> Vec<Point> {
        (0..self.cell_count()).map(|i| self.midpoint(i)).collect()
    }
}

/// Midpoint grid on a product rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductGrid {
    pub g1: AxisGrid,
    pub g2: AxisGrid,
}

impl ProductGrid {
    pub fn rect(&self) -> Rect {
        Rect::new(self.g1.cube, self.g2.cube)
    }

    /// Measure of one product cell, `h1^{n1} · h2^{n2}`.
    pub fn cell_measure(&self) -> f64 {
        self.g1.cell_measure() * self.g2.cell_measure()
    }

    pub fn cell_count(&self) -> usize {
        self.g1.cell_count() * self.g2.cell_count()
    }

    /// Flat index of the product cell `(c1, c2)`.
    #[inline]
    pub fn index(&self, c1: usize, c2: usize) -> usize {
        c1 * self.g2.cell_count() + c2
    }
}

/// Build a midpoint product grid. Cell measures sum to `|R|` exactly up to
/// round-off.
pub fn build_product_grid(rect: Rect, n1_cells: usize, n2_cells: usize) -> Result<ProductGrid> {
    let g1 = AxisGrid::new(rect.i1, n1_cells)?;
    let g2 = AxisGrid::new(rect.i2, n2_cells)?;
    Ok(ProductGrid { g1, g2 })
}

/// Real-valued samples indexed by the product grid; the universal function
/// carrier for `f`, weights, gradients and operator outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    pub grid: ProductGrid,
    pub values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: ProductGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(CoreError::invalid(format!(
                "value count {} does not match grid cell count {}",
                values.len(),
                grid.cell_count()
            )));
        }
        Ok(GridFn { grid, values })
    }

    pub fn zeros(grid: ProductGrid) -> Self {
        GridFn { values: vec![0.0; grid.cell_count()], grid }
    }

    pub fn constant(grid: ProductGrid, c: f64) -> Self {
        GridFn { values: vec![c; grid.cell_count()], grid }
    }

    #[inline]
    pub fn at(&self, c1: usize, c2: usize) -> f64 {
        self.values[self.grid.index(c1, c2)]
    }

    #[inline]
    pub fn at_mut(&mut self, c1: usize, c2: usize) -> &mut f64 {
        let idx = self.grid.index(c1, c2);
        &mut self.values[idx]
    }

    pub fn same_grid(&self, other: &GridFn) -> bool {
        self.grid == other.grid
    }

    /// Pointwise map, preserving the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFn {
        GridFn { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip(&self, other: &GridFn, f: impl Fn(f64, f64) -> f64) -> Result<GridFn> {
        if !self.same_grid(other) {
            return Err(CoreError::GridMismatch("zip of functions on different grids".into()));
        }
        Ok(GridFn {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Serialized form of a grid function: `{rect, cells, values}` (row-major).
#[derive(Serialize, Deserialize)]
pub struct GridFnJson {
    pub rect: Rect,
    pub cells: [usize; 2],
    pub values: Vec<f64>,
}

impl From<&GridFn> for GridFnJson {
    fn from(g: &GridFn) -> Self {
        GridFnJson {
            rect: g.grid.rect(),
            cells: [g.grid.g1.cells_per_side, g.grid.g2.cells_per_side],
            values: g.values.clone(),
        }
    }
}

impl GridFnJson {
    pub fn into_grid_fn(self) -> Result<GridFn> {
        let grid = build_product_grid(self.rect, self.cells[0], self.cells[1])?;
        GridFn::new(grid, self.values)
    }
}

/// Sample a callable at every midpoint: `values[i,j] = f(m1_i, m2_j)`.
pub fn sample(f: impl Fn(Point, Point) -> f64, grid: &ProductGrid) -> Result<GridFn> {
    let c1 = grid.g1.cell_count();
    let c2 = grid.g2.cell_count();
    let mids1 = grid.g1.midpoints();
    let mids2 = grid.g2.midpoints();
    let mut values = Vec::with_capacity(c1 * c2);
    for (i1, m1) in mids1.iter().enumerate() {
        for (i2, m2) in mids2.iter().enumerate() {
            let v = f(*m1, *m2);
            if !v.is_finite() {
                return Err(CoreError::SamplingError { i1, i2, value: v });
            }
            values.push(v);
        }
    }
    Ok(GridFn { grid: *grid, values })
}

fn check_pair(g: &GridFn, w: Option<&GridFn>) -> Result<()> {
    if let Some(w) = w {
        if !g.same_grid(w) {
            return Err(CoreError::GridMismatch("integrand and weight live on different grids".into()));
        }
        if let Some(&bad) = w.values.iter().find(|v| !(**v > 0.0)) {
            return Err(CoreError::invalid(format!("weight must be positive, found {bad}")));
        }
    }
    Ok(())
}

/// `∫_R g·w dx dy` by the midpoint rule, accumulated in fixed lexicographic
/// index order so results do not depend on scheduling.
pub fn integrate(g: &GridFn, w: Option<&GridFn>) -> Result<f64> {
    check_pair(g, w)?;
    let cm = g.grid.cell_measure();
    let sum = match w {
        Some(w) => g.values.iter().zip(&w.values).fold(0.0, |acc, (&a, &b)| acc + a * b),
        None => g.values.iter().fold(0.0, |acc, &a| acc + a),
    };
    Ok(sum * cm)
}

/// `‖g‖_{L^p(R, w)} = (∫ |g|^p w)^{1/p}`, `p ≥ 1`.
pub fn lp_norm(g: &GridFn, p: f64, w: Option<&GridFn>) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(CoreError::invalid(format!("lp_norm requires p >= 1, got {p}")));
    }
    let powed = g.map(|v| v.abs().powf(p));
    Ok(integrate(&powed, w)?.powf(1.0 / p))
}

/// Weak `L^{r,∞}(R, w)` quasi-norm: `sup_t t · w({|g| > t})^{1/r}`.
///
/// On a grid the map `t ↦ t·w({|g| > t})` is linear between jumps, so the sup
/// is attained as `t` approaches a sample magnitude from below; it equals the
/// max over distinct magnitudes `v` of `v · w({|g| ≥ v})^{1/r}`.
pub fn weak_lp_norm(g: &GridFn, r: f64, w: Option<&GridFn>) -> Result<f64> {
    if !(r > 0.0) {
        return Err(CoreError::invalid(format!("weak_lp_norm requires r > 0, got {r}")));
    }
    check_pair(g, w)?;
    let cm = g.grid.cell_measure();
    let mut pairs: Vec<(f64, f64)> = g
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| (v.abs(), w.map_or(1.0, |w| w.values[i]) * cm))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut best = 0.0f64;
    let mut mass = 0.0f64;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        // accumulate the whole tie run so mass = w({|g| >= v})
        while i < pairs.len() && pairs[i].0 == v {
            mass += pairs[i].1;
            i += 1;
        }
        if v > 0.0 {
            best = best.max(v * mass.powf(1.0 / r));
        }
    }
    Ok(best)
}
