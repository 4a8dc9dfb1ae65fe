//! One-parameter calibration checks on a single cube: the classical pointwise
//! bound `|f - f_Q| ≤ c I_1(|∇f| χ_Q)` and the averaged (1,1) Poincaré
//! inequality `∫|f - f_Q| ≤ c ℓ(Q) ∫|∇f|`, with the ordinary average and the
//! full gradient. These anchor the product-rectangle machinery against the
//! known one-cube case.

use crate::error::Result;
use crate::fractional::KernelQuadRule;
use crate::grid::{AxisGrid, Point};
use crate::verify::ceilings::Ceilings;
use crate::verify::checks::probe_points;
use crate::verify::report::{GridMeta, InequalityId, VerifyReport};

/// Analytic one-block test functions with exact gradient magnitude.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalFn {
    /// `a·x₁ + b·x₂ + c`
    Affine { a: f64, b: f64, c: f64 },
    /// `Π_i sin(π k x_i)`
    SinProd { k: f64 },
    /// `|x|²`
    QuadNorm,
}

impl ClassicalFn {
    pub fn label(&self) -> &'static str {
        match self {
            ClassicalFn::Affine { .. } => "affine",
            ClassicalFn::SinProd { .. } => "sin_prod",
            ClassicalFn::QuadNorm => "quad_norm",
        }
    }

    pub fn eval(&self, p: Point, d: usize) -> f64 {
        match self {
            ClassicalFn::Affine { a, b, c } => a * p[0] + if d == 2 { b * p[1] } else { 0.0 } + c,
            ClassicalFn::SinProd { k } => {
                (0..d).map(|i| (std::f64::consts::PI * k * p[i]).sin()).product()
            }
            ClassicalFn::QuadNorm => (0..d).map(|i| p[i] * p[i]).sum(),
        }
    }

    pub fn grad_norm(&self, p: Point, d: usize) -> f64 {
        match self {
            ClassicalFn::Affine { a, b, .. } => {
                if d == 2 {
                    (a * a + b * b).sqrt()
                } else {
                    a.abs()
                }
            }
            ClassicalFn::SinProd { k } => {
                let pi = std::f64::consts::PI;
                let mut s = 0.0;
                for i in 0..d {
                    let mut g = pi * k * (pi * k * p[i]).cos();
                    for j in 0..d {
                        if j != i {
                            g *= (pi * k * p[j]).sin();
                        }
                    }
                    s += g * g;
                }
                s.sqrt()
            }
            ClassicalFn::QuadNorm => 2.0 * (0..d).map(|i| p[i] * p[i]).sum::<f64>().sqrt(),
        }
    }
}

/// Both calibration ratios on one cube. The report carries the averaged (1,1)
/// quantities; the pointwise max ratio rides along as a flag and both must
/// stay under their ceilings.
pub fn check_classical_1d(
    f: &ClassicalFn,
    grid: &AxisGrid,
    rule: &KernelQuadRule,
    ceilings: &Ceilings,
) -> Result<VerifyReport> {
    let d = grid.cube.dim;
    let cells = grid.cell_count();
    let cm = grid.cell_measure();
    let mids = grid.midpoints();
    let samples: Vec<f64> = mids.iter().map(|&m| f.eval(m, d)).collect();
    let grads: Vec<f64> = mids.iter().map(|&m| f.grad_norm(m, d)).collect();
    let f_q = samples.iter().sum::<f64>() / cells as f64;

    // averaged (1,1): ∫|f - f_Q| vs ℓ(Q) ∫|∇f|
    let lhs = samples.iter().map(|&v| (v - f_q).abs()).sum::<f64>() * cm;
    let rhs = grads.iter().sum::<f64>() * cm;

    // pointwise: |f - f_Q| ≤ c I_1(|∇f| χ_Q) on corner-and-midpoint probes
    let probes = probe_points(grid);
    let mut pointwise = 0.0f64;
    let mut bad_zero = false;
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-30);
    for &t in &probes {
        let mut riesz = 0.0;
        for (cell, &g) in grads.iter().enumerate() {
            riesz += g * crate::fractional::kernel_cell_weight(grid, cell, t, rule);
        }
        let num = (f.eval(t, d) - f_q).abs();
        if riesz > 1e-14 {
            pointwise = pointwise.max(num / riesz);
        } else if num > 1e-12 * scale {
            bad_zero = true;
        }
    }

    // reuse the product GridMeta shape: a single block, second block trivial
    let meta = GridMeta {
        n1: d,
        n2: 0,
        cells1: grid.cells_per_side,
        cells2: 0,
        side1: grid.cube.side,
        side2: 0.0,
    };
    let ceiling = ceilings
        .overrides
        .get(InequalityId::Classical1d.as_str())
        .copied()
        .unwrap_or(1.0);
    let mut report = VerifyReport::build(
        InequalityId::Classical1d,
        lhs,
        rhs,
        1.0,
        1.0,
        0.0,
        ceiling,
        meta,
    )
    .with_test_fn(f.label());
    report.geometry_factor = grid.cube.side;
    // rebuild the ratio with the geometry factor in place
    if lhs > 0.0 && rhs > 0.0 {
        report.ratio = lhs / (grid.cube.side * rhs);
        report.pass = report.ratio <= ceiling;
    }
    let pw_ceiling = 1.0 + classical_pointwise_tol(grid);
    report.push_flag(format!("pointwise_ratio={}", crate::verify::report::fmt_f64(pointwise)));
    if pointwise > pw_ceiling || bad_zero {
        report.pass = false;
        report.push_flag("pointwise_exceeded");
    }
    Ok(report)
}

fn classical_pointwise_tol(grid: &AxisGrid) -> f64 {
    let r = 1.0 / grid.cells_per_side as f64;
    crate::verify::ceilings::L12_TOL_COEFF_SECOND * r * r
        + if grid.cube.dim == 2 { crate::verify::ceilings::L12_TOL_COEFF_FIRST * r } else { 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cube;

    #[test]
    fn constant_function_passes_trivially() {
        let grid = AxisGrid::new(Cube::new(1, [0.0, 0.0], 1.0).unwrap(), 16).unwrap();
        let rule = KernelQuadRule::new(1, 6).unwrap();
        let r = check_classical_1d(&ClassicalFn::Affine { a: 0.0, b: 0.0, c: 3.0 }, &grid, &rule, &Ceilings::default())
            .unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn linear_on_unit_interval() {
        // ∫|x - 1/2| = 1/4 = ℓ(Q)/4 · ∫|f'|
        let grid = AxisGrid::new(Cube::new(1, [0.0, 0.0], 1.0).unwrap(), 32).unwrap();
        let rule = KernelQuadRule::new(1, 6).unwrap();
        let r = check_classical_1d(&ClassicalFn::Affine { a: 1.0, b: 0.0, c: 0.0 }, &grid, &rule, &Ceilings::default())
            .unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-12, "lhs {}", r.lhs);
        assert!((r.ratio - 0.25).abs() < 1e-12);
        assert!(r.pass);
        // pointwise sup |x-1/2| / ∫|f'| = 1/2, attained at the endpoints
        let pw: f64 = r
            .flags
            .iter()
            .find_map(|f| f.strip_prefix("pointwise_ratio=").map(|s| s.parse().unwrap()))
            .unwrap();
        assert!((pw - 0.5).abs() < 1e-12, "pointwise {pw}");
    }

    #[test]
    fn quadratic_on_square_matches_refined_oracle() {
        // d = 2 cube, f = |x|²: ratios match a 4x-resolution run to 1%
        let cube = Cube::new(2, [0.0, 0.0], 1.0).unwrap();
        let rule = KernelQuadRule::new(2, 6).unwrap();
        let coarse = check_classical_1d(
            &ClassicalFn::QuadNorm,
            &AxisGrid::new(cube, 12).unwrap(),
            &rule,
            &Ceilings::default(),
        )
        .unwrap();
        let fine = check_classical_1d(
            &ClassicalFn::QuadNorm,
            &AxisGrid::new(cube, 48).unwrap(),
            &rule,
            &Ceilings::default(),
        )
        .unwrap();
        assert!(coarse.pass && fine.pass);
        let rel = (coarse.ratio - fine.ratio).abs() / fine.ratio;
        assert!(rel < 0.01, "coarse {} vs fine {}", coarse.ratio, fine.ratio);
    }
}
