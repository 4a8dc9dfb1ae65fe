//! The inequality checks: each assembles both sides of one estimate from the
//! operator modules and emits a `VerifyReport`.

use crate::error::{CoreError, Result};
use crate::fractional::{biparam_t_at_points, riesz_slice, KernelQuadRule};
use crate::grid::{integrate, lp_norm, weak_lp_norm, Axis, AxisGrid, GridFn, Point, ProductGrid};
use crate::oscillation::{mixed_grad_field, pi_r, GradMode, TestFn};
use crate::verify::ceilings::Ceilings;
use crate::verify::report::{GridMeta, InequalityId, VerifyReport};
use crate::weights::{a1_constant_rect, admissible_power, ap_constant_rect, WeightSpec};

/// Probe coordinates of one block: cell corners and midpoints per coordinate,
/// tensored over the block dimension. Corners matter because the pointwise
/// estimates attain their sup on `∂R` for the bilinear family.
pub fn probe_points(g: &AxisGrid) -> Vec<Point> {
    let n = g.cells_per_side;
    let h = g.h();
    let coords_1d = |lower: f64| -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * n + 1);
        for k in 0..=n {
            v.push(lower + k as f64 * h);
        }
        for k in 0..n {
            v.push(lower + (k as f64 + 0.5) * h);
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    if g.cube.dim == 1 {
        coords_1d(g.cube.lower[0]).into_iter().map(|c| [c, 0.0]).collect()
    } else {
        let cu = coords_1d(g.cube.lower[0]);
        let cv = coords_1d(g.cube.lower[1]);
        let mut out = Vec::with_capacity(cu.len() * cv.len());
        for &u in &cu {
            for &v in &cv {
                out.push([u, v]);
            }
        }
        out
    }
}

/// Denominators below this are treated as vanishing in pointwise ratios.
const DENOM_FLOOR: f64 = 1e-14;

/// An lhs at relative round-off of the input is genuinely zero: one-block
/// test functions cancel exactly in `π_R` up to float noise, and that noise
/// must not read as a failing x/0 ratio against an exactly-zero rhs.
const ZERO_SNAP_REL: f64 = 1e-12;

pub(crate) fn snap_lhs(lhs: f64, scale: f64) -> (f64, bool) {
    if lhs != 0.0 && lhs <= ZERO_SNAP_REL * scale {
        (0.0, true)
    } else {
        (lhs, false)
    }
}

/// Lemma-type pointwise check: `|f - π_R f| ≤ T(|∇_x∇_y f| χ_R)` probed on the
/// corner-and-midpoint lattice. `lhs` is the max pointwise ratio; the report
/// passes iff it stays under `1 + tol_disc(grid)`.
pub fn check_pointwise_l12(
    f: &TestFn,
    grid: &ProductGrid,
    rules: (KernelQuadRule, KernelQuadRule),
    ceilings: &Ceilings,
) -> Result<VerifyReport> {
    let samples = f.sample_on(grid)?;
    let mixed = mixed_grad_field(f, grid, GradMode::Exact)?;
    let xs = probe_points(&grid.g1);
    let ys = probe_points(&grid.g2);
    let denom = biparam_t_at_points(&mixed, &xs, &ys, &rules.0, &rules.1)?;

    let c1 = grid.g1.cell_count();
    let c2 = grid.g2.cell_count();
    let mids1 = grid.g1.midpoints();
    let mids2 = grid.g2.midpoints();
    let grid_avg = samples.values.iter().sum::<f64>() / samples.values.len() as f64;
    // x-block average of f along each probe row, and y-block average along
    // each probe column, by the midpoint rule
    let row_avg: Vec<f64> = ys
        .iter()
        .map(|&y| mids1.iter().map(|&m1| f.eval(m1, y)).sum::<f64>() / c1 as f64)
        .collect();
    let col_avg: Vec<f64> = xs
        .iter()
        .map(|&x| mids2.iter().map(|&m2| f.eval(x, m2)).sum::<f64>() / c2 as f64)
        .collect();

    let scale = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .map(|(x, y)| f.eval(x, y).abs())
        .fold(0.0f64, f64::max)
        .max(1e-30);
    let mut max_ratio = 0.0f64;
    let mut bad_zero_denom = false;
    for (ix, &x) in xs.iter().enumerate() {
        for (iy, &y) in ys.iter().enumerate() {
            let num = (f.eval(x, y) - (row_avg[iy] + col_avg[ix] - grid_avg)).abs();
            let den = denom[ix * ys.len() + iy];
            if den > DENOM_FLOOR {
                max_ratio = max_ratio.max(num / den);
            } else if num > 1e-12 * scale {
                bad_zero_denom = true;
            }
        }
    }
    let ceiling = ceilings.ceiling(InequalityId::PointwiseL12, grid);
    let mut report = VerifyReport::build(
        InequalityId::PointwiseL12,
        max_ratio,
        1.0,
        1.0,
        1.0,
        0.0,
        ceiling,
        GridMeta::from(grid),
    )
    .with_test_fn(&f.label);
    if bad_zero_denom {
        report.pass = false;
        report.push_flag("nonzero_oscillation_with_vanishing_T");
    }
    Ok(report)
}

/// Unweighted (1,1) product inequality:
/// `∫|f - π_R f| ≲ ℓ(I1) ℓ(I2) ∫|∇_x∇_y f|`.
pub fn check_poincare11(f: &TestFn, grid: &ProductGrid, ceilings: &Ceilings) -> Result<VerifyReport> {
    let samples = f.sample_on(grid)?;
    let osc = samples.zip(&pi_r(&samples), |a, b| (a - b).abs())?;
    let scale = integrate(&samples.map(f64::abs), None)?;
    let (lhs, snapped) = snap_lhs(integrate(&osc, None)?, scale);
    let mixed = mixed_grad_field(f, grid, GradMode::Exact)?;
    let rhs = integrate(&mixed, None)?;
    let ceiling = ceilings.ceiling(InequalityId::Poincare11, grid);
    let mut r = VerifyReport::build(
        InequalityId::Poincare11,
        lhs,
        rhs,
        grid.rect().side_product(),
        1.0,
        0.0,
        ceiling,
        GridMeta::from(grid),
    )
    .with_test_fn(&f.label);
    if snapped {
        r.push_flag("lhs_snapped_to_zero");
    }
    Ok(r)
}

fn power_admissible_for(w: &WeightSpec, grid: &ProductGrid, p: f64) -> bool {
    match w {
        WeightSpec::Power { a, b, .. } => {
            admissible_power(*a, grid.g1.cube.dim, p) && admissible_power(*b, grid.g2.cube.dim, p)
        }
        WeightSpec::Sampled { .. } => true,
    }
}

/// Weighted (1,1) inequality with the `ℓ(I1)ℓ(I2)·[w]²_{A1}` factor.
pub fn check_poincare11_a1(
    f: &TestFn,
    w: &WeightSpec,
    grid: &ProductGrid,
    ceilings: &Ceilings,
) -> Result<VerifyReport> {
    if !power_admissible_for(w, grid, 1.0) {
        return Err(CoreError::invalid(format!(
            "weight {} is not A_1-admissible (power exponents must lie in (-d, 0])",
            w.label()
        )));
    }
    let wf = w.sample_on(grid)?;
    let samples = f.sample_on(grid)?;
    let osc = samples.zip(&pi_r(&samples), |a, b| (a - b).abs())?;
    let scale = integrate(&samples.map(f64::abs), Some(&wf))?;
    let (lhs, snapped) = snap_lhs(integrate(&osc, Some(&wf))?, scale);
    let mixed = mixed_grad_field(f, grid, GradMode::Exact)?;
    let rhs = integrate(&mixed, Some(&wf))?;
    let wc = a1_constant_rect(w, grid)?.constant;
    let ceiling = ceilings.ceiling(InequalityId::Poincare11A1, grid);
    let mut r = VerifyReport::build(
        InequalityId::Poincare11A1,
        lhs,
        rhs,
        grid.rect().side_product(),
        wc,
        2.0,
        ceiling,
        GridMeta::from(grid),
    )
    .with_p(1.0)
    .with_weight(w)
    .with_test_fn(&f.label);
    if snapped {
        r.push_flag("lhs_snapped_to_zero");
    }
    Ok(r)
}

/// Oscillation, rhs norm, sampled weight, and the norm of `f` itself (the
/// zero-snap scale) for the (p,p)-type checks.
fn weighted_sides(
    f: &TestFn,
    w: &WeightSpec,
    p: f64,
    grid: &ProductGrid,
) -> Result<(GridFn, f64, GridFn, f64)> {
    let wf = w.sample_on(grid)?;
    let samples = f.sample_on(grid)?;
    let osc = samples.zip(&pi_r(&samples), |a, b| a - b)?;
    let mixed = mixed_grad_field(f, grid, GradMode::Exact)?;
    let rhs = lp_norm(&mixed, p, Some(&wf))?;
    let scale = lp_norm(&samples, p, Some(&wf))?;
    Ok((osc, rhs, wf, scale))
}

/// Weak-type (p,p) inequality, exponent `1/p + 1/(p-1)` on the weight
/// constant.
pub fn check_weak_pp(
    f: &TestFn,
    w: &WeightSpec,
    p: f64,
    grid: &ProductGrid,
    ceilings: &Ceilings,
) -> Result<VerifyReport> {
    require_p_weight(w, grid, p)?;
    let (osc, rhs, wf, scale) = weighted_sides(f, w, p, grid)?;
    let (lhs, snapped) = snap_lhs(weak_lp_norm(&osc, p, Some(&wf))?, scale);
    let wc = ap_constant_rect(w, grid, p)?.constant;
    let theta = 1.0 / p + 1.0 / (p - 1.0);
    let ceiling = ceilings.ceiling(InequalityId::WeakPp, grid);
    let mut r = VerifyReport::build(
        InequalityId::WeakPp,
        lhs,
        rhs,
        grid.rect().side_product(),
        wc,
        theta,
        ceiling,
        GridMeta::from(grid),
    )
    .with_p(p)
    .with_weight(w)
    .with_test_fn(&f.label);
    if snapped {
        r.push_flag("lhs_snapped_to_zero");
    }
    Ok(r)
}

fn require_p_weight(w: &WeightSpec, grid: &ProductGrid, p: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(CoreError::invalid(format!("p must exceed 1, got {p}")));
    }
    if !power_admissible_for(w, grid, p) {
        return Err(CoreError::invalid(format!(
            "weight {} is not A_p-admissible at p = {p} (need -d < a < d(p-1) per block)",
            w.label()
        )));
    }
    Ok(())
}

/// Strong (p,p) variants: plain two-factor bound vs the extrapolation bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongVariant {
    T15,
    T16,
}

pub fn strong_theory_exponent(variant: StrongVariant, p: f64) -> f64 {
    match variant {
        StrongVariant::T15 => 2.0 / (p - 1.0),
        StrongVariant::T16 => (2.0 / (p - 1.0)).min(4.0),
    }
}

/// Strong (p,p) inequality, exponent `2/(p-1)` or `min{4, 2/(p-1)}`.
pub fn check_strong_pp(
    f: &TestFn,
    w: &WeightSpec,
    p: f64,
    grid: &ProductGrid,
    variant: StrongVariant,
    ceilings: &Ceilings,
) -> Result<VerifyReport> {
    require_p_weight(w, grid, p)?;
    let (osc, rhs, wf, scale) = weighted_sides(f, w, p, grid)?;
    let (lhs, snapped) = snap_lhs(lp_norm(&osc, p, Some(&wf))?, scale);
    let wc = ap_constant_rect(w, grid, p)?.constant;
    let id = match variant {
        StrongVariant::T15 => InequalityId::StrongPpT15,
        StrongVariant::T16 => InequalityId::StrongPpT16,
    };
    let ceiling = ceilings.ceiling(id, grid);
    let mut r = VerifyReport::build(
        id,
        lhs,
        rhs,
        grid.rect().side_product(),
        wc,
        strong_theory_exponent(variant, p),
        ceiling,
        GridMeta::from(grid),
    )
    .with_p(p)
    .with_weight(w)
    .with_test_fn(&f.label);
    if snapped {
        r.push_flag("lhs_snapped_to_zero");
    }
    Ok(r)
}

/// Conjectured strong bound with exponent `1/(p-1) + 1/p`: recorded as
/// evidence, never gates a suite.
pub fn probe_conjecture(
    f: &TestFn,
    w: &WeightSpec,
    p: f64,
    grid: &ProductGrid,
    ceilings: &Ceilings,
) -> Result<VerifyReport> {
    require_p_weight(w, grid, p)?;
    let (osc, rhs, wf, scale) = weighted_sides(f, w, p, grid)?;
    let (lhs, _) = snap_lhs(lp_norm(&osc, p, Some(&wf))?, scale);
    let wc = ap_constant_rect(w, grid, p)?.constant;
    let theta = 1.0 / (p - 1.0) + 1.0 / p;
    let ceiling = ceilings.ceiling(InequalityId::ConjectureProbe, grid);
    Ok(VerifyReport::build(
        InequalityId::ConjectureProbe,
        lhs,
        rhs,
        grid.rect().side_product(),
        wc,
        theta,
        ceiling,
        GridMeta::from(grid),
    )
    .with_p(p)
    .with_weight(w)
    .with_test_fn(&f.label))
}

/// The two slice-kernel inequalities behind the weighted (1,1) proof:
/// `∫_{I2} w^x(y)/|y-ȳ|^{m-1} dy ≲ ℓ(I2) [w]_{A1} w(x, ȳ)` and its mirror.
/// `lhs` is the max over midpoints and directions of
/// `integral / (ℓ_axis · w(point))`; the ratio divides out `[w]_{A1}`.
pub fn check_slice_kernel_a1(
    w: &WeightSpec,
    grid: &ProductGrid,
    rules: (KernelQuadRule, KernelQuadRule),
    ceilings: &Ceilings,
) -> Result<VerifyReport> {
    if !power_admissible_for(w, grid, 1.0) {
        return Err(CoreError::invalid(format!("weight {} is not A_1-admissible", w.label())));
    }
    let wf = w.sample_on(grid)?;
    let wc = a1_constant_rect(w, grid)?.constant;
    let mut lhs = 0.0f64;
    for (axis, rule, ell) in [
        (Axis::Y, &rules.1, grid.g2.cube.side),
        (Axis::X, &rules.0, grid.g1.cube.side),
    ] {
        let integral = riesz_slice(&wf, axis, rule)?;
        for (i, &v) in integral.values.iter().enumerate() {
            lhs = lhs.max(v / (ell * wf.values[i]));
        }
    }
    let ceiling = ceilings.ceiling(InequalityId::SliceKernelA1, grid);
    Ok(VerifyReport::build(
        InequalityId::SliceKernelA1,
        lhs,
        1.0,
        1.0,
        wc,
        1.0,
        ceiling,
        GridMeta::from(grid),
    )
    .with_weight(w))
}

/// Lemma-2.1-style domination recorded as a report: the empirical constant
/// `C` with `I_1(g χ_Q) ≤ C ℓ(Q) M(g χ_Q)` along the given axis.
pub fn check_maxfrac_l21(
    g: &GridFn,
    axis: Axis,
    rule: &KernelQuadRule,
    ceilings: &Ceilings,
    label: &str,
) -> Result<VerifyReport> {
    let c = crate::fractional::check_maxfrac_domination(g, axis, rule)?;
    let ceiling = ceilings.ceiling(InequalityId::MaxfracL21, &g.grid);
    let mut r = VerifyReport::build(
        InequalityId::MaxfracL21,
        c,
        1.0,
        1.0,
        1.0,
        0.0,
        ceiling,
        GridMeta::from(&g.grid),
    )
    .with_test_fn(label);
    r.push_flag(format!("axis={axis:?}"));
    Ok(r)
}
