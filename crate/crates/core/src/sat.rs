//! Summed-area tables over the product cell lattice and the grid-aligned cube
//! window family.
//!
//! The lattice of a product grid is viewed as 4-dimensional, `(u1, v1, u2,
//! v2)`, with degenerate axes of extent 1 for one-dimensional blocks. Windows
//! are grid-aligned cubes per block (contiguous index ranges in dimension 1,
//! square ranges in dimension 2), so a window pair is a rectangle of the basis.

use crate::grid::{AxisGrid, GridFn};

/// A grid-aligned cube window on one block's cell lattice:
/// cells `[lo[0], lo[0]+size) × [lo[1], lo[1]+size)` (second range degenerate
/// for one-dimensional blocks).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: [usize; 2],
    pub size: usize,
}

impl Window {
    pub fn cell_count(&self, dim: usize) -> usize {
        self.size.pow(dim as u32)
    }

    pub fn contains(&self, coords: [usize; 2], dim: usize) -> bool {
        (0..dim).all(|k| coords[k] >= self.lo[k] && coords[k] < self.lo[k] + self.size)
    }
}

/// Incremental window-scan event: a cell newly covered by the growing window,
/// or the completed window itself.
#[derive(Debug, Clone, Copy)]
pub enum WindowEvent {
    AddCell(usize),
    Window(Window),
}

/// The cell lattice of one block: `n` cells per side in dimension `dim`.
#[derive(Debug, Clone, Copy)]
pub struct BlockLattice {
    pub dim: usize,
    pub n: usize,
}

impl BlockLattice {
    pub fn of(grid: &AxisGrid) -> Self {
        BlockLattice { dim: grid.cube.dim, n: grid.cells_per_side }
    }

    pub fn cell_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// All cube windows, enumerated deterministically (size, then position).
    pub fn windows(&self) -> Vec<Window> {
        let mut out = Vec::new();
        for size in 1..=self.n {
            for u in 0..=(self.n - size) {
                if self.dim == 1 {
                    out.push(Window { lo: [u, 0], size });
                } else {
                    for v in 0..=(self.n - size) {
                        out.push(Window { lo: [u, v], size });
                    }
                }
            }
        }
        out
    }

    /// Windows of size 1 (single cells), in cell-index order.
    pub fn unit_windows(&self) -> Vec<Window> {
        (0..self.cell_count()).map(|i| Window { lo: self.cell_coords(i), size: 1 }).collect()
    }

    pub fn cell_coords(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    /// Anchor points for incremental window scans: a window family member is
    /// `(anchor, size)` and grows by a rim as `size` increases.
    pub fn anchors(&self) -> Vec<[usize; 2]> {
        if self.dim == 1 {
            (0..self.n).map(|a| [a, 0]).collect()
        } else {
            let mut v = Vec::with_capacity(self.n * self.n);
            for u in 0..self.n {
                for w in 0..self.n {
                    v.push([u, w]);
                }
            }
            v
        }
    }

    pub fn max_size_at(&self, anchor: [usize; 2]) -> usize {
        if self.dim == 1 {
            self.n - anchor[0]
        } else {
            (self.n - anchor[0]).min(self.n - anchor[1])
        }
    }

    /// Visit the windows anchored at `anchor` in increasing size. Each newly
    /// covered cell is announced before the window containing it, so callers
    /// can maintain running aggregates with one pass.
    pub fn visit_anchor_incremental(&self, anchor: [usize; 2], mut f: impl FnMut(WindowEvent)) {
        if self.dim == 1 {
            let a = anchor[0];
            for s in 1..=(self.n - a) {
                f(WindowEvent::AddCell(a + s - 1));
                f(WindowEvent::Window(Window { lo: anchor, size: s }));
            }
        } else {
            let [u, v] = anchor;
            for s in 1..=self.max_size_at(anchor) {
                for b in 0..s {
                    f(WindowEvent::AddCell(self.cell_index([u + s - 1, v + b])));
                }
                for a in 0..s - 1 {
                    f(WindowEvent::AddCell(self.cell_index([u + a, v + s - 1])));
                }
                f(WindowEvent::Window(Window { lo: anchor, size: s }));
            }
        }
    }

    pub fn cell_index(&self, coords: [usize; 2]) -> usize {
        if self.dim == 1 {
            coords[0]
        } else {
            coords[0] * self.n + coords[1]
        }
    }
}

/// 4-D summed-area table over `(u1, v1, u2, v2)`.
pub struct Sat4 {
    shape: [usize; 4],
    stride: [usize; 4],
    data: Vec<f64>,
}

impl Sat4 {
    /// Lattice shape of a product grid: `(n1, n1|1, n2, n2|1)`.
    pub fn product_shape(g1: &AxisGrid, g2: &AxisGrid) -> [usize; 4] {
        let s1 = if g1.cube.dim == 2 { g1.cells_per_side } else { 1 };
        let s2 = if g2.cube.dim == 2 { g2.cells_per_side } else { 1 };
        [g1.cells_per_side, s1, g2.cells_per_side, s2]
    }

    /// Build from a grid function, applying `f` to each sample.
    pub fn from_grid_fn(g: &GridFn, f: impl Fn(f64) -> f64) -> Sat4 {
        let shape = Self::product_shape(&g.grid.g1, &g.grid.g2);
        let c2 = g.grid.g2.cell_count();
        let d1 = g.grid.g1.cube.dim;
        let d2 = g.grid.g2.cube.dim;
        let n1 = g.grid.g1.cells_per_side;
        let n2 = g.grid.g2.cells_per_side;
        Self::build(shape, |idx| {
            let c1 = if d1 == 1 { idx[0] } else { idx[0] * n1 + idx[1] };
            let c2i = if d2 == 1 { idx[2] } else { idx[2] * n2 + idx[3] };
            f(g.values[c1 * c2 + c2i])
        })
    }

    pub fn build(shape: [usize; 4], value: impl Fn([usize; 4]) -> f64) -> Sat4 {
        let dims = [shape[0] + 1, shape[1] + 1, shape[2] + 1, shape[3] + 1];
        let stride = [dims[1] * dims[2] * dims[3], dims[2] * dims[3], dims[3], 1];
        let mut data = vec![0.0; dims[0] * dims[1] * dims[2] * dims[3]];
        for a in 0..shape[0] {
            for b in 0..shape[1] {
                for c in 0..shape[2] {
                    for d in 0..shape[3] {
                        let off = (a + 1) * stride[0] + (b + 1) * stride[1] + (c + 1) * stride[2] + d + 1;
                        data[off] = value([a, b, c, d]);
                    }
                }
            }
        }
        // prefix along each axis in turn
        for axis in 0..4 {
            let st = stride[axis];
            for a in 0..dims[0] {
                for b in 0..dims[1] {
                    for c in 0..dims[2] {
                        for d in 0..dims[3] {
                            if [a, b, c, d][axis] == 0 {
                                continue;
                            }
                            let off = a * stride[0] + b * stride[1] + c * stride[2] + d;
                            data[off] += data[off - st];
                        }
                    }
                }
            }
        }
        Sat4 { shape, stride, data }
    }

    /// Sum over the half-open box `[lo, hi)`.
    ///
    /// Inclusion–exclusion only branches on axes with `lo > 0`: a prefix
    /// index of 0 contributes nothing, so degenerate axes and boxes touching
    /// the lattice boundary collapse to fewer lookups.
    pub fn box_sum(&self, lo: [usize; 4], hi: [usize; 4]) -> f64 {
        debug_assert!((0..4).all(|k| lo[k] <= hi[k] && hi[k] <= self.shape[k]));
        let mut axes = [0usize; 4];
        let mut n_axes = 0;
        let mut base = 0usize;
        for k in 0..4 {
            base += hi[k] * self.stride[k];
            if lo[k] > 0 {
                axes[n_axes] = k;
                n_axes += 1;
            }
        }
        let mut acc = 0.0;
        for mask in 0u32..(1 << n_axes) {
            let mut idx = base;
            let mut sign = 1.0;
            for (j, &k) in axes[..n_axes].iter().enumerate() {
                if mask & (1 << j) != 0 {
                    idx -= (hi[k] - lo[k]) * self.stride[k];
                    sign = -sign;
                }
            }
            acc += sign * self.data[idx];
        }
        acc
    }

    /// Sum over a window pair `(w1, w2)` on blocks of dimensions `(d1, d2)`.
    pub fn window_pair_sum(&self, w1: &Window, w2: &Window, d1: usize, d2: usize) -> f64 {
        let lo = [w1.lo[0], if d1 == 2 { w1.lo[1] } else { 0 }, w2.lo[0], if d2 == 2 { w2.lo[1] } else { 0 }];
        let hi = [
            w1.lo[0] + w1.size,
            if d1 == 2 { w1.lo[1] + w1.size } else { 1 },
            w2.lo[0] + w2.size,
            if d2 == 2 { w2.lo[1] + w2.size } else { 1 },
        ];
        self.box_sum(lo, hi)
    }

    /// Sum over `w1 × (single block-2 cell)`.
    pub fn window_cell_sum(&self, w1: &Window, d1: usize, cell2: [usize; 2], d2: usize) -> f64 {
        let w2 = Window { lo: cell2, size: 1 };
        self.window_pair_sum(w1, &w2, d1, d2)
    }
}

/// Max over all cube windows containing each cell of the window average of
/// `values` (a per-cell profile on this block's lattice).
///
/// Dimension 1 runs the start/suffix-max sweep in O(n^2); dimension 2
/// enumerates sizes and takes 2-D sliding-window maxima in O(n^3).
pub fn all_points_window_max_avg(lat: &BlockLattice, values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(values.len(), lat.cell_count());
    if lat.dim == 1 {
        let n = lat.n;
        let mut pre = vec![0.0; n + 1];
        for i in 0..n {
            pre[i + 1] = pre[i] + values[i];
        }
        let mut out = vec![f64::NEG_INFINITY; n];
        for a in 0..n {
            let mut best = f64::NEG_INFINITY;
            for b in (a..n).rev() {
                let avg = (pre[b + 1] - pre[a]) / (b + 1 - a) as f64;
                if avg > best {
                    best = avg;
                }
                if best > out[b] {
                    out[b] = best;
                }
            }
        }
        out
    } else {
        let n = lat.n;
        // 2-D prefix sums
        let mut pre = vec![0.0; (n + 1) * (n + 1)];
        for u in 0..n {
            for v in 0..n {
                pre[(u + 1) * (n + 1) + v + 1] =
                    values[u * n + v] + pre[u * (n + 1) + v + 1] + pre[(u + 1) * (n + 1) + v] - pre[u * (n + 1) + v];
            }
        }
        let box_sum = |u0: usize, v0: usize, s: usize| {
            pre[(u0 + s) * (n + 1) + v0 + s] - pre[u0 * (n + 1) + v0 + s] - pre[(u0 + s) * (n + 1) + v0]
                + pre[u0 * (n + 1) + v0]
        };
        let mut out = vec![f64::NEG_INFINITY; n * n];
        let mut avg = vec![0.0; n * n];
        let mut rowmax = vec![0.0; n * n];
        for s in 1..=n {
            let m = n - s + 1; // window starts per axis
            for u0 in 0..m {
                for v0 in 0..m {
                    avg[u0 * m + v0] = box_sum(u0, v0, s) / (s * s) as f64;
                }
            }
            // Cell (u, v) is covered by the size-s windows with
            // lo ∈ [u-s+1, u] ∩ [0, m) × [v-s+1, v] ∩ [0, m); two sliding-max
            // passes turn the m×m average grid into per-cell maxima.
            for u0 in 0..m {
                sliding_window_max(|v0| avg[u0 * m + v0], m, s, n, |v, val| rowmax[u0 * n + v] = val);
            }
            for v in 0..n {
                sliding_window_max(
                    |u0| rowmax[u0 * n + v],
                    m,
                    s,
                    n,
                    |u, val| {
                        let o = &mut out[u * n + v];
                        if val > *o {
                            *o = val;
                        }
                    },
                );
            }
        }
        out
    }
}

/// Backward-looking sliding maximum: for each query position `q in 0..n_out`,
/// emit the max of `get(i)` over `i ∈ [q-w+1, q] ∩ [0, m)` via a monotone
/// deque.
fn sliding_window_max(
    get: impl Fn(usize) -> f64,
    m: usize,
    w: usize,
    n_out: usize,
    mut set: impl FnMut(usize, f64),
) {
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut next_push = 0usize;
    for q in 0..n_out {
        while next_push <= q.min(m - 1) {
            let j = next_push;
            while let Some(&back) = deque.back() {
                if get(back) <= get(j) {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(j);
            next_push += 1;
        }
        let lo = q.saturating_sub(w - 1);
        while let Some(&front) = deque.front() {
            if front < lo {
                deque.pop_front();
            } else {
                break;
            }
        }
        set(q, get(deque.front().copied().unwrap()));
    }
}
