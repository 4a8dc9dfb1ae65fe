//! Slice Hardy–Littlewood maximal operators, the strong maximal over the
//! rectangle basis, the dual operator `M' f = M(fw)/w`, and empirical
//! operator-norm estimation.
//!
//! All suprema range over windows contained in `R`; for functions truncated to
//! `R` this agrees with the global definition (an intersecting rectangle can be
//! replaced by its intersection, which has a larger average), which is exactly
//! how the inequalities apply the operators. Norm estimates are therefore
//! declared lower bounds and carry a `localized` flag.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::{lp_norm, weak_lp_norm, Axis, GridFn, ProductGrid, Rect};
use crate::oscillation::TestFn;
use crate::sat::{all_points_window_max_avg, BlockLattice, Sat4, Window};
use crate::weights::{ap_constant_rect, WeightSpec};

/// Uncentered maximal function over grid-aligned cubes within each slice of
/// the `axis` block, the complementary coordinate frozen.
pub fn hl_maximal_slice(g: &GridFn, axis: Axis) -> GridFn {
    let c1 = g.grid.g1.cell_count();
    let c2 = g.grid.g2.cell_count();
    let (active, frozen) = match axis {
        Axis::X => (BlockLattice::of(&g.grid.g1), c2),
        Axis::Y => (BlockLattice::of(&g.grid.g2), c1),
    };
    let cols = crate::exec::par_map_indexed(frozen, |f| {
        let prof: Vec<f64> = (0..active.cell_count())
            .map(|a| match axis {
                Axis::X => g.values[a * c2 + f].abs(),
                Axis::Y => g.values[f * c2 + a].abs(),
            })
            .collect();
        all_points_window_max_avg(&active, &prof)
    });
    let mut out = GridFn::zeros(g.grid);
    for (f, col) in cols.iter().enumerate() {
        for (a, &v) in col.iter().enumerate() {
            match axis {
                Axis::X => out.values[a * c2 + f] = v,
                Axis::Y => out.values[f * c2 + a] = v,
            }
        }
    }
    out
}

fn cells_of_window(w: &Window, dim: usize, n: usize, out: &mut Vec<usize>) {
    out.clear();
    if dim == 1 {
        out.extend(w.lo[0]..w.lo[0] + w.size);
    } else {
        for u in w.lo[0]..w.lo[0] + w.size {
            for v in w.lo[1]..w.lo[1] + w.size {
                out.push(u * n + v);
            }
        }
    }
}

fn strong_maximal_fold(g: &GridFn, windows1: &[Window], out: &mut [f64]) {
    let d1 = g.grid.g1.cube.dim;
    let d2 = g.grid.g2.cube.dim;
    let n1 = g.grid.g1.cells_per_side;
    let c2 = g.grid.g2.cell_count();
    let l2 = BlockLattice::of(&g.grid.g2);
    let sat = Sat4::from_grid_fn(g, f64::abs);
    let mut prof: Vec<f64> = Vec::with_capacity(c2);
    let mut covered: Vec<usize> = Vec::new();
    for w1 in windows1 {
        let cnt1 = w1.cell_count(d1) as f64;
        prof.clear();
        for cell2 in 0..c2 {
            prof.push(sat.window_cell_sum(w1, d1, l2.cell_coords(cell2), d2) / cnt1);
        }
        let u = all_points_window_max_avg(&l2, &prof);
        cells_of_window(w1, d1, n1, &mut covered);
        for &cell1 in &covered {
            let row = cell1 * c2;
            for (j, &uv) in u.iter().enumerate() {
                if uv > out[row + j] {
                    out[row + j] = uv;
                }
            }
        }
    }
}

/// Strong maximal function: at each midpoint, the max over window pairs
/// containing it of the average of `|g|`. Sequential reference path.
pub fn strong_maximal_seq(g: &GridFn) -> GridFn {
    let windows1 = BlockLattice::of(&g.grid.g1).windows();
    let mut out = vec![f64::NEG_INFINITY; g.values.len()];
    strong_maximal_fold(g, &windows1, &mut out);
    GridFn { grid: g.grid, values: out }
}

/// Strong maximal function, parallel over block-1 windows with a pointwise
/// max-merge (order-independent, so bitwise equal to the sequential path).
#[cfg(feature = "parallel")]
pub fn strong_maximal(g: &GridFn) -> GridFn {
    use rayon::prelude::*;
    let windows1 = BlockLattice::of(&g.grid.g1).windows();
    let chunk = (windows1.len() / (4 * rayon::current_num_threads().max(1))).max(8);
    let out = windows1
        .par_chunks(chunk)
        .map(|ws| {
            let mut local = vec![f64::NEG_INFINITY; g.values.len()];
            strong_maximal_fold(g, ws, &mut local);
            local
        })
        .reduce(
            || vec![f64::NEG_INFINITY; g.values.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    if y > *x {
                        *x = y;
                    }
                }
                a
            },
        );
    GridFn { grid: g.grid, values: out }
}

#[cfg(not(feature = "parallel"))]
pub fn strong_maximal(g: &GridFn) -> GridFn {
    strong_maximal_seq(g)
}

/// Dual operator `M' g = M(g·w) / w`, `w > 0`.
pub fn dual_maximal(g: &GridFn, w: &GridFn) -> Result<GridFn> {
    if !g.same_grid(w) {
        return Err(CoreError::GridMismatch("dual_maximal: weight on a different grid".into()));
    }
    if let Some(&bad) = w.values.iter().find(|v| !(**v > 0.0)) {
        return Err(CoreError::invalid(format!("dual_maximal requires w > 0, found {bad}")));
    }
    let gw = g.zip(w, |a, b| a * b)?;
    strong_maximal(&gw).zip(w, |a, b| a / b)
}

/// Which operator an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxOp {
    Strong,
    Dual,
}

/// Which norm the ratio uses on the output side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Strong,
    Weak,
}

/// Named nonnegative test functions for operator-norm estimation.
pub struct TestFamily {
    pub members: Vec<(String, GridFn)>,
}

/// Caps on the built-in family. Estimates stay valid lower bounds for any
/// caps; larger families only tighten them.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FamilyCaps {
    pub max_cell_indicators: usize,
    pub max_rect_indicators: usize,
    pub random_fns: usize,
}

impl Default for FamilyCaps {
    fn default() -> Self {
        FamilyCaps { max_cell_indicators: 96, max_rect_indicators: 36, random_fns: 6 }
    }
}

impl TestFamily {
    /// Built-in family: single-cell indicators (strided down to the cap),
    /// dyadic sub-rectangle indicators, and seeded random bump fields. The
    /// dyadic rectangles and bump fields are resolution-independent, which
    /// keeps estimates stable under grid refinement.
    pub fn built_in(grid: &ProductGrid, caps: FamilyCaps, seed: u64) -> TestFamily {
        let mut members = Vec::new();
        let cells = grid.cell_count();
        let stride = cells.div_ceil(caps.max_cell_indicators.max(1)).max(1);
        let c2 = grid.g2.cell_count();
        let mut idx = 0;
        while idx < cells {
            let mut f = GridFn::zeros(*grid);
            f.values[idx] = 1.0;
            members.push((format!("cell_{}_{}", idx / c2, idx % c2), f));
            idx += stride;
        }
        // dyadic window-pair indicators, up to the cap
        let dy1 = dyadic_windows(&BlockLattice::of(&grid.g1));
        let dy2 = dyadic_windows(&BlockLattice::of(&grid.g2));
        let l1 = BlockLattice::of(&grid.g1);
        let l2 = BlockLattice::of(&grid.g2);
        let d1 = grid.g1.cube.dim;
        let d2 = grid.g2.cube.dim;
        let mut count = 0;
        'outer: for w1 in &dy1 {
            for w2 in &dy2 {
                if count >= caps.max_rect_indicators {
                    break 'outer;
                }
                let mut f = GridFn::zeros(*grid);
                for cell1 in 0..l1.cell_count() {
                    if !w1.contains(l1.cell_coords(cell1), d1) {
                        continue;
                    }
                    for cell2 in 0..l2.cell_count() {
                        if w2.contains(l2.cell_coords(cell2), d2) {
                            f.values[cell1 * c2 + cell2] = 1.0;
                        }
                    }
                }
                members.push((format!("rect_{:?}x{}_{:?}x{}", w1.lo, w1.size, w2.lo, w2.size), f));
                count += 1;
            }
        }
        // seeded random nonnegative bump fields (resolution-independent)
        let rect: Rect = grid.rect();
        for k in 0..caps.random_fns {
            let tf = TestFn::random_bump_sum(d1, d2, seed.wrapping_add(k as u64), 3, &rect);
            if let Ok(f) = tf.sample_on(grid) {
                members.push((format!("bump_{k}"), f));
            }
        }
        TestFamily { members }
    }

    pub fn push(&mut self, name: impl Into<String>, f: GridFn) {
        self.members.push((name.into(), f));
    }
}

fn dyadic_windows(lat: &BlockLattice) -> Vec<Window> {
    let mut out = Vec::new();
    for k in 0..3usize {
        let parts = 1usize << k;
        if lat.n < parts {
            break;
        }
        let size = lat.n / parts;
        for iu in 0..parts {
            if lat.dim == 1 {
                out.push(Window { lo: [iu * size, 0], size });
            } else {
                for iv in 0..parts {
                    out.push(Window { lo: [iu * size, iv * size], size });
                }
            }
        }
    }
    out
}

/// Empirical operator norm: max over the family of
/// `‖op g‖_{L^p(w)} / ‖g‖_{L^p(w)}` — a lower bound on the true norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpNormEstimate {
    pub value: f64,
    pub p: f64,
    pub weight_constant: f64,
    pub witness: String,
    pub op: MaxOp,
    pub norm: NormKind,
    /// Suprema are taken over windows inside `R` only; the estimate bounds the
    /// localized operator from below.
    pub localized: bool,
}

/// Estimate `‖M‖` or `‖M'‖` on `L^p(w)` over a family of test functions.
pub fn estimate_op_norm(
    op: MaxOp,
    p: f64,
    w: &WeightSpec,
    grid: &ProductGrid,
    family: &TestFamily,
) -> Result<OpNormEstimate> {
    estimate_op_norm_with(op, p, w, grid, family, NormKind::Strong)
}

pub fn estimate_op_norm_with(
    op: MaxOp,
    p: f64,
    w: &WeightSpec,
    grid: &ProductGrid,
    family: &TestFamily,
    norm: NormKind,
) -> Result<OpNormEstimate> {
    if !(p > 1.0) {
        return Err(CoreError::invalid(format!("operator-norm estimation requires p > 1, got {p}")));
    }
    if family.members.is_empty() {
        return Err(CoreError::invalid("operator-norm estimation requires a nonempty family"));
    }
    let wf = w.sample_on(grid)?;
    // For the strong operator on L^p(w) the relevant constant is [w]_{A_p};
    // for the dual operator on L^p(w) it is [w]_{A_{p'}} (w ∈ A_{p'} makes
    // M' bounded on L^p(w)).
    let p_const = match op {
        MaxOp::Strong => p,
        MaxOp::Dual => p / (p - 1.0),
    };
    let weight_constant = ap_constant_rect(w, grid, p_const)?.constant;
    let ratios: Vec<Result<Option<f64>>> = crate::exec::par_map_indexed(family.members.len(), |k| {
        let g = &family.members[k].1;
        let denom = lp_norm(g, p, Some(&wf))?;
        if denom == 0.0 {
            return Ok(None);
        }
        let mg = match op {
            MaxOp::Strong => strong_maximal(g),
            MaxOp::Dual => dual_maximal(g, &wf)?,
        };
        let num = match norm {
            NormKind::Strong => lp_norm(&mg, p, Some(&wf))?,
            NormKind::Weak => weak_lp_norm(&mg, p, Some(&wf))?,
        };
        Ok(Some(num / denom))
    });
    let mut best = f64::NEG_INFINITY;
    let mut witness = String::new();
    for (k, r) in ratios.into_iter().enumerate() {
        if let Some(ratio) = r? {
            if ratio > best {
                best = ratio;
                witness = family.members[k].0.clone();
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(CoreError::invalid("operator-norm family contained only zero functions"));
    }
    Ok(OpNormEstimate { value: best, p, weight_constant, witness, op, norm, localized: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_product_grid, sample};
    use crate::oracle;

    fn unit_grid(n: usize) -> ProductGrid {
        build_product_grid(Rect::unit_square(), n, n).unwrap()
    }

    #[test]
    fn constant_is_fixed_point() {
        let g = unit_grid(8);
        let c = GridFn::constant(g, -3.0);
        assert!(hl_maximal_slice(&c, Axis::X).values.iter().all(|&v| (v - 3.0).abs() < 1e-14));
        assert!(strong_maximal(&c).values.iter().all(|&v| (v - 3.0).abs() < 1e-14));
    }

    #[test]
    fn hl_indicator_halfline_value() {
        // χ_{[0,1]} sampled on [0,2]: at the rightmost midpoint the best
        // interval is [0, x], giving exactly 1/2 on even grids.
        let i1 = crate::grid::Cube::new(1, [0.0, 0.0], 2.0).unwrap();
        let i2 = crate::grid::Cube::new(1, [0.0, 0.0], 1.0).unwrap();
        for n in [16usize, 64, 256] {
            let grid = build_product_grid(Rect::new(i1, i2), n, 2).unwrap();
            let f = sample(|x, _| if x[0] < 1.0 { 1.0 } else { 0.0 }, &grid).unwrap();
            let m = hl_maximal_slice(&f, Axis::X);
            let got = m.at(n - 1, 0);
            assert!((got - 0.5).abs() < 1e-12, "n={n}: {got}");
        }
    }

    #[test]
    fn iterated_hl_dominates_strong() {
        let g = unit_grid(10);
        let f = sample(|x, y| (x[0] - 0.3).abs() + (7.0 * y[0]).sin(), &g).unwrap();
        let strong = strong_maximal(&f);
        let iter = hl_maximal_slice(&hl_maximal_slice(&f, Axis::X), Axis::Y);
        for (s, i) in strong.values.iter().zip(&iter.values) {
            assert!(*s <= *i + 1e-12, "strong {s} > iterated {i}");
        }
        // and M h ≥ h pointwise for h ≥ 0
        let m = hl_maximal_slice(&f.map(f64::abs), Axis::X);
        let mm = hl_maximal_slice(&m, Axis::X);
        for (a, b) in mm.values.iter().zip(&m.values) {
            assert!(*a >= *b - 1e-12);
        }
    }

    #[test]
    fn strong_matches_brute_force() {
        for (n1, n2) in [(8usize, 8usize), (12, 7)] {
            let g = build_product_grid(Rect::unit_square(), n1, n2).unwrap();
            let f = sample(|x, y| (5.0 * x[0]).cos() + y[0] * y[0] - 0.4, &g).unwrap();
            let fast = strong_maximal(&f);
            let brute = oracle::brute_strong_maximal(&f);
            for (a, b) in fast.values.iter().zip(&brute.values) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn strong_matches_brute_force_dim2() {
        let i1 = crate::grid::Cube::new(2, [0.0, 0.0], 1.0).unwrap();
        let i2 = crate::grid::Cube::new(1, [0.0, 0.0], 1.0).unwrap();
        let g = build_product_grid(Rect::new(i1, i2), 4, 6).unwrap();
        let f = sample(|x, y| x[0] + 2.0 * x[1] * y[0] + 0.3, &g).unwrap();
        let fast = strong_maximal(&f);
        let brute = oracle::brute_strong_maximal(&f);
        for (a, b) in fast.values.iter().zip(&brute.values) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let g = unit_grid(24);
        let f = sample(|x, y| (x[0] * 9.1).sin() * (y[0] * 3.7).cos() + 1.2, &g).unwrap();
        assert_eq!(strong_maximal(&f).values, strong_maximal_seq(&f).values);
    }

    #[test]
    fn single_cell_indicator_closed_form() {
        // value at (i,j) is 1 / ((|i-a|+1)(|j-b|+1)) in cell counts
        let g = unit_grid(8);
        let (a, b) = (2usize, 5usize);
        let mut f = GridFn::zeros(g);
        *f.at_mut(a, b) = 1.0;
        let m = strong_maximal(&f);
        for i in 0..8 {
            for j in 0..8 {
                let expect = 1.0 / (((i as i64 - a as i64).unsigned_abs() + 1) as f64
                    * ((j as i64 - b as i64).unsigned_abs() + 1) as f64);
                assert!((m.at(i, j) - expect).abs() < 1e-12, "cell ({i},{j})");
            }
        }
    }

    #[test]
    fn sublinear_homogeneous_monotone() {
        let g = unit_grid(9);
        let f1 = sample(|x, y| (x[0] * 4.0).sin() + 1.5 * y[0], &g).unwrap();
        let f2 = sample(|x, y| x[0] - y[0] * y[0] + 0.2, &g).unwrap();
        let m1 = strong_maximal(&f1);
        let m2 = strong_maximal(&f2);
        let msum = strong_maximal(&f1.zip(&f2, |a, b| a + b).unwrap());
        for ((s, a), b) in msum.values.iter().zip(&m1.values).zip(&m2.values) {
            assert!(*s <= a + b + 1e-12);
        }
        let mlam = strong_maximal(&f1.map(|v| 3.5 * v));
        for (a, b) in mlam.values.iter().zip(&m1.values) {
            assert!((a - 3.5 * b).abs() < 1e-12);
        }
        // monotone: |f1| <= |f1| + |f2| pointwise
        let mabs = strong_maximal(&f1.map(f64::abs).zip(&f2.map(f64::abs), |a, b| a + b).unwrap());
        for ((m, a), g) in mabs.values.iter().zip(&m1.values).zip(&f1.values) {
            assert!(*m >= *a - 1e-12);
            assert!(*a >= g.abs() - 1e-12, "op(g) >= |g| failed");
        }
    }

    #[test]
    fn localization_matches_enlarged_ambient_grid() {
        // g supported in [0,1]²; ambient grid on [-0.5, 1.5]² with matching
        // cells. Inside R the localized and ambient maximals agree.
        let inner = unit_grid(8);
        let f_in = sample(|x, y| (x[0] * 3.0).sin().abs() + y[0], &inner).unwrap();
        let m_in = oracle::brute_strong_maximal(&f_in);

        let amb_cube = crate::grid::Cube::new(1, [-0.5, 0.0], 2.0).unwrap();
        let ambient = build_product_grid(Rect::new(amb_cube, amb_cube), 16, 16).unwrap();
        let f_amb = sample(
            |x, y| {
                if x[0] > 0.0 && x[0] < 1.0 && y[0] > 0.0 && y[0] < 1.0 {
                    (x[0] * 3.0).sin().abs() + y[0]
                } else {
                    0.0
                }
            },
            &ambient,
        )
        .unwrap();
        let m_amb = oracle::brute_strong_maximal(&f_amb);
        for i in 0..8 {
            for j in 0..8 {
                let a = m_in.at(i, j);
                let b = m_amb.at(i + 4, j + 4);
                assert!((a - b).abs() < 1e-12, "({i},{j}): local {a} vs ambient {b}");
            }
        }
    }

    #[test]
    fn dual_maximal_basics() {
        let g = unit_grid(8);
        let f = sample(|x, y| 0.5 + x[0] * y[0], &g).unwrap();
        let ones = GridFn::constant(g, 1.0);
        let d = dual_maximal(&f, &ones).unwrap();
        let s = strong_maximal(&f);
        assert_eq!(d.values, s.values);

        let w = sample(|x, y| 0.3 + x[0] + y[0], &g).unwrap();
        let dm = dual_maximal(&GridFn::constant(g, 1.0), &w).unwrap();
        assert!(dm.values.iter().all(|&v| v >= 1.0 - 1e-12));
        let dd = dual_maximal(&f, &w).unwrap();
        for (a, b) in dd.values.iter().zip(&f.values) {
            assert!(*a >= *b - 1e-12, "M'(g) >= g failed for g >= 0");
        }
        let bad = GridFn::zeros(g);
        assert!(dual_maximal(&f, &bad).is_err());
    }

    #[test]
    fn op_norm_estimate_sane() {
        let g = unit_grid(12);
        let w = WeightSpec::constant();
        let fam = TestFamily::built_in(&g, FamilyCaps::default(), 5);
        let est = estimate_op_norm(MaxOp::Strong, 2.0, &w, &g, &fam).unwrap();
        assert!(est.value >= 1.0 - 1e-12);
        assert!(est.localized);
        assert!((est.weight_constant - 1.0).abs() < 1e-10);
        // the strong estimate never exceeds the iterated slice bound family-wise
        let est_dual = estimate_op_norm(MaxOp::Dual, 2.0, &w, &g, &fam).unwrap();
        assert!(est_dual.value >= 1.0 - 1e-12);
        assert!(estimate_op_norm(MaxOp::Strong, 2.0, &w, &g, &TestFamily { members: vec![] }).is_err());
    }

    #[test]
    fn buckley_scaling_slope_one_sided() {
        // 1-D Buckley check: ‖M‖_{L^p(w_a)} against [w_a]_{A_p},
        // log-log slope at most 1/(p-1) + 0.15.
        let p = 2.0;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &a in &[0.0, 0.3, 0.6, 0.8, 0.9] {
            let grid = build_product_grid(Rect::unit_square(), 64, 2).unwrap();
            let w = crate::weights::power_weight(a, 0.0, [0.0, 0.0], [0.0, 0.0]);
            let fam = TestFamily::built_in(&grid, FamilyCaps::default(), 9);
            let est = estimate_op_norm(MaxOp::Strong, p, &w, &grid, &fam).unwrap();
            xs.push(est.weight_constant.ln());
            ys.push(est.value.ln());
        }
        let slope = crate::verify::fit_slope(&xs, &ys).unwrap();
        assert!(slope <= 1.0 / (p - 1.0) + 0.15, "slope {slope}");
    }
}
