//! Brute-force reference implementations.
//!
//! These deliberately share no acceleration structure with the fast paths:
//! constants and maximal functions are computed by direct nested sums over the
//! window family, `T` by the unfactored double sum over all source cells, and
//! the weak norm by a dense threshold scan. They exist to pin the fast
//! implementations down and to generate regression fixtures; keep them simple,
//! not fast.

use crate::error::Result;
use crate::fractional::KernelQuadRule;
use crate::grid::GridFn;
use crate::sat::BlockLattice;

fn window_cells(lat: &BlockLattice, w: &crate::sat::Window) -> Vec<usize> {
    let mut out = Vec::new();
    if lat.dim == 1 {
        out.extend(w.lo[0]..w.lo[0] + w.size);
    } else {
        for u in w.lo[0]..w.lo[0] + w.size {
            for v in w.lo[1]..w.lo[1] + w.size {
                out.push(lat.cell_index([u, v]));
            }
        }
    }
    out
}

/// `[w]_{A_p}`, `p > 1`, by direct averaging over every window pair.
pub fn brute_ap_constant(w: &GridFn, p: f64) -> f64 {
    let l1 = BlockLattice::of(&w.grid.g1);
    let l2 = BlockLattice::of(&w.grid.g2);
    let c2 = w.grid.g2.cell_count();
    let mut best = f64::NEG_INFINITY;
    for w1 in l1.windows() {
        let cells1 = window_cells(&l1, &w1);
        for w2 in l2.windows() {
            let cells2 = window_cells(&l2, &w2);
            let mut sum_w = 0.0;
            let mut sum_s = 0.0;
            for &a in &cells1 {
                for &b in &cells2 {
                    let v = w.values[a * c2 + b];
                    sum_w += v;
                    sum_s += v.powf(-1.0 / (p - 1.0));
                }
            }
            let cnt = (cells1.len() * cells2.len()) as f64;
            let ratio = (sum_w / cnt) * (sum_s / cnt).powf(p - 1.0);
            best = best.max(ratio);
        }
    }
    best
}

/// `[w]_{A_1}` by direct averaging and minimization over every window pair.
pub fn brute_a1_constant(w: &GridFn) -> f64 {
    let l1 = BlockLattice::of(&w.grid.g1);
    let l2 = BlockLattice::of(&w.grid.g2);
    let c2 = w.grid.g2.cell_count();
    let mut best = f64::NEG_INFINITY;
    for w1 in l1.windows() {
        let cells1 = window_cells(&l1, &w1);
        for w2 in l2.windows() {
            let cells2 = window_cells(&l2, &w2);
            let mut sum = 0.0;
            let mut min = f64::INFINITY;
            for &a in &cells1 {
                for &b in &cells2 {
                    let v = w.values[a * c2 + b];
                    sum += v;
                    min = min.min(v);
                }
            }
            let cnt = (cells1.len() * cells2.len()) as f64;
            best = best.max(sum / cnt / min);
        }
    }
    best
}

/// Strong maximal function by exhaustive enumeration of containing window
/// pairs per midpoint.
pub fn brute_strong_maximal(g: &GridFn) -> GridFn {
    let l1 = BlockLattice::of(&g.grid.g1);
    let l2 = BlockLattice::of(&g.grid.g2);
    let d1 = l1.dim;
    let d2 = l2.dim;
    let c2 = g.grid.g2.cell_count();
    let mut out = GridFn::zeros(g.grid);
    for cell1 in 0..l1.cell_count() {
        let co1 = l1.cell_coords(cell1);
        for cell2 in 0..l2.cell_count() {
            let co2 = l2.cell_coords(cell2);
            let mut best = f64::NEG_INFINITY;
            for w1 in l1.windows() {
                if !w1.contains(co1, d1) {
                    continue;
                }
                let cells1 = window_cells(&l1, &w1);
                for w2 in l2.windows() {
                    if !w2.contains(co2, d2) {
                        continue;
                    }
                    let cells2 = window_cells(&l2, &w2);
                    let mut sum = 0.0;
                    for &a in &cells1 {
                        for &b in &cells2 {
                            sum += g.values[a * c2 + b].abs();
                        }
                    }
                    best = best.max(sum / (cells1.len() * cells2.len()) as f64);
                }
            }
            out.values[cell1 * c2 + cell2] = best;
        }
    }
    out
}

/// `T g` by the unfactored double sum over all source-cell pairs, using the
/// same per-axis kernel weights as the factored form.
pub fn brute_t_double_sum(g: &GridFn, rule1: &KernelQuadRule, rule2: &KernelQuadRule) -> Result<GridFn> {
    let grid = g.grid;
    let c1 = grid.g1.cell_count();
    let c2 = grid.g2.cell_count();
    let k1 = crate::fractional::kernel_matrix(&grid.g1, &grid.g1.midpoints(), rule1)?;
    let k2 = crate::fractional::kernel_matrix(&grid.g2, &grid.g2.midpoints(), rule2)?;
    let mut out = GridFn::zeros(grid);
    for t1 in 0..c1 {
        for t2 in 0..c2 {
            let mut acc = 0.0;
            for s1 in 0..c1 {
                for s2 in 0..c2 {
                    acc += g.values[s1 * c2 + s2] * k1[t1 * c1 + s1] * k2[t2 * c2 + s2];
                }
            }
            out.values[t1 * c2 + t2] = acc;
        }
    }
    Ok(out)
}

/// Weak norm by a dense threshold scan: max over `n_scan` thresholds `t` of
/// `t · w({|g| > t})^{1/r}`. Always a lower bound for the exact sorted-level
/// computation; approaches it as the scan refines.
pub fn brute_weak_norm_scan(g: &GridFn, r: f64, w: Option<&GridFn>, n_scan: usize) -> f64 {
    let cm = g.grid.cell_measure();
    let vmax = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if vmax == 0.0 {
        return 0.0;
    }
    let mut best = 0.0f64;
    for k in 0..n_scan {
        let t = vmax * (k as f64 + 0.5) / n_scan as f64;
        let mut mass = 0.0;
        for (i, v) in g.values.iter().enumerate() {
            if v.abs() > t {
                mass += w.map_or(1.0, |w| w.values[i]) * cm;
            }
        }
        if mass > 0.0 {
            best = best.max(t * mass.powf(1.0 / r));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_product_grid, sample, weak_lp_norm, Rect};

    #[test]
    fn weak_scan_approaches_sorted_computation() {
        let grid = build_product_grid(Rect::unit_square(), 12, 12).unwrap();
        let f = sample(|x, y| (x[0] - 0.5) * (y[0] - 0.5), &grid).unwrap();
        let w = sample(|x, y| 0.5 + x[0] + y[0] * y[0], &grid).unwrap();
        for p in [1.0, 2.0] {
            for wopt in [None, Some(&w)] {
                let exact = weak_lp_norm(&f, p, wopt).unwrap();
                let scan = brute_weak_norm_scan(&f, p, wopt, 40_000);
                assert!(scan <= exact + 1e-12, "scan exceeds exact");
                assert!((exact - scan) <= 2e-3 * exact, "p={p}: exact {exact}, scan {scan}");
            }
        }
    }

    #[test]
    fn brute_t_matches_factored_form() {
        let grid = build_product_grid(Rect::unit_square(), 8, 8).unwrap();
        let f = sample(|x, y| 0.3 + (x[0] * 5.0).sin().abs() * y[0], &grid).unwrap();
        let (r1, r2) = KernelQuadRule::for_grid(&grid, 5).unwrap();
        let fast = crate::fractional::biparam_t(&f, &r1, &r2).unwrap();
        let brute = brute_t_double_sum(&f, &r1, &r2).unwrap();
        let scale = fast.max_abs();
        for (a, b) in fast.values.iter().zip(&brute.values) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }
}
