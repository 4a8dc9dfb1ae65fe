//! Block averages, the non-standard oscillation `π_R(f)`, mixed-gradient
//! magnitude fields, and the analytic test-function families that drive the
//! verification suites.
//!
//! `π_R(f) = f_{I1}^y + f_{I2}^x - f_{I1×I2}` projects onto sums of one-block
//! functions; `f - π_R(f)` is the oscillation controlled by the fractional
//! operator. All averages here are midpoint-rule grid averages, never
//! continuum integrals, so the operators and the inequality reports see the
//! same discrete object.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::{sample, Axis, GridFn, Point, ProductGrid, Rect};

/// One Gaussian bump `A · exp(-|x-mu|²/2σ²) · exp(-|y-nu|²/2τ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amp: f64,
    pub mu: Point,
    pub sigma: f64,
    pub nu: Point,
    pub tau: f64,
}

/// A single monomial `coeff · Π x_i^{xp_i} · Π y_j^{yp_j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub coeff: f64,
    pub xp: [u32; 2],
    pub yp: [u32; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestForm {
    /// `(a0 + a·x)(b0 + b·y)` — the bilinear family; degenerates to one-block
    /// affine when `a` or `b` vanishes.
    ProductLinear { a0: f64, a: [f64; 2], b0: f64, b: [f64; 2] },
    /// `amp · Π_i sin(π(fx_i x_i + px_i)) · Π_j sin(π(fy_j y_j + py_j))`.
    SeparableTrig { amp: f64, fx: [f64; 2], px: [f64; 2], fy: [f64; 2], py: [f64; 2] },
    /// Sum of monomials.
    Polynomial { terms: Vec<MonomialTerm> },
    /// Seeded sum of separable Gaussian bumps.
    BumpSum { seed: u64, bumps: Vec<Bump> },
}

/// Analytic test function on a product rectangle, with exact evaluators for
/// `f` and the Frobenius magnitude of the mixed-derivative block
/// `(∂²f/∂x_i∂y_j)_{i,j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFn {
    pub d1: usize,
    pub d2: usize,
    pub label: String,
    pub form: TestForm,
}

impl TestFn {
    pub fn new(d1: usize, d2: usize, label: impl Into<String>, form: TestForm) -> Self {
        TestFn { d1, d2, label: label.into(), form }
    }

    /// `f = Π x_i · Π y_j`; on (1,1) blocks this is `f(x,y) = x y`.
    pub fn bilinear(d1: usize, d2: usize) -> Self {
        let a = if d1 == 1 { [1.0, 0.0] } else { [1.0, 1.0] };
        let b = if d2 == 1 { [1.0, 0.0] } else { [1.0, 1.0] };
        TestFn::new(d1, d2, "bilinear", TestForm::ProductLinear { a0: 0.0, a, b0: 0.0, b })
    }

    /// `sin(πx)sin(πy)`-type product, one frequency per coordinate.
    pub fn separable_sin(d1: usize, d2: usize) -> Self {
        let on = |d: usize| if d == 1 { [1.0, 0.0] } else { [1.0, 1.0] };
        let off = |d: usize| if d == 1 { [0.0, 0.5] } else { [0.0, 0.0] };
        TestFn::new(
            d1,
            d2,
            "separable_sin",
            TestForm::SeparableTrig { amp: 1.0, fx: on(d1), px: off(d1), fy: on(d2), py: off(d2) },
        )
    }

    /// Polynomial depending only on the x-block (zero mixed gradient).
    pub fn one_block_x(d1: usize, d2: usize) -> Self {
        let mut terms = vec![
            MonomialTerm { coeff: 1.0, xp: [2, 0], yp: [0, 0] },
            MonomialTerm { coeff: 0.5, xp: [1, 0], yp: [0, 0] },
        ];
        if d1 == 2 {
            terms.push(MonomialTerm { coeff: 0.7, xp: [1, 1], yp: [0, 0] });
        }
        TestFn::new(d1, d2, "one_block_x", TestForm::Polynomial { terms })
    }

    /// Polynomial depending only on the y-block.
    pub fn one_block_y(d1: usize, d2: usize) -> Self {
        let mut terms = vec![
            MonomialTerm { coeff: -1.5, xp: [0, 0], yp: [2, 0] },
            MonomialTerm { coeff: 0.25, xp: [0, 0], yp: [1, 0] },
        ];
        if d2 == 2 {
            terms.push(MonomialTerm { coeff: -0.4, xp: [0, 0], yp: [1, 1] });
        }
        TestFn::new(d1, d2, "one_block_y", TestForm::Polynomial { terms })
    }

    /// `u(x) + v(y)`, still with identically-zero mixed gradient.
    pub fn one_block_sum(d1: usize, d2: usize) -> Self {
        let mut terms = Vec::new();
        if let TestForm::Polynomial { terms: t } = TestFn::one_block_x(d1, d2).form {
            terms.extend(t);
        }
        if let TestForm::Polynomial { terms: t } = TestFn::one_block_y(d1, d2).form {
            terms.extend(t);
        }
        TestFn::new(d1, d2, "one_block_sum", TestForm::Polynomial { terms })
    }

    /// Seeded sum of `n` Gaussian bumps placed inside `rect`.
    pub fn random_bump_sum(d1: usize, d2: usize, seed: u64, n: usize, rect: &Rect) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bumps = Vec::with_capacity(n);
        for _ in 0..n {
            let mut mu = [0.0, 0.0];
            for k in 0..d1 {
                mu[k] = rect.i1.lower[k] + rect.i1.side * rng.random_range(0.1..0.9);
            }
            let mut nu = [0.0, 0.0];
            for k in 0..d2 {
                nu[k] = rect.i2.lower[k] + rect.i2.side * rng.random_range(0.1..0.9);
            }
            bumps.push(Bump {
                amp: rng.random_range(0.3..1.0),
                mu,
                sigma: rect.i1.side * rng.random_range(0.15..0.4),
                nu,
                tau: rect.i2.side * rng.random_range(0.15..0.4),
            });
        }
        TestFn::new(d1, d2, format!("bump_sum_{seed}"), TestForm::BumpSum { seed, bumps })
    }

    pub fn eval(&self, x: Point, y: Point) -> f64 {
        match &self.form {
            TestForm::ProductLinear { a0, a, b0, b } => {
                let fx = a0 + (0..self.d1).map(|i| a[i] * x[i]).sum::<f64>();
                let fy = b0 + (0..self.d2).map(|j| b[j] * y[j]).sum::<f64>();
                fx * fy
            }
            TestForm::SeparableTrig { amp, fx, px, fy, py } => {
                let p: f64 = (0..self.d1)
                    .map(|i| (std::f64::consts::PI * (fx[i] * x[i] + px[i])).sin())
                    .product();
                let q: f64 = (0..self.d2)
                    .map(|j| (std::f64::consts::PI * (fy[j] * y[j] + py[j])).sin())
                    .product();
                amp * p * q
            }
            TestForm::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    let mut v = t.coeff;
                    for i in 0..self.d1 {
                        v *= x[i].powi(t.xp[i] as i32);
                    }
                    for j in 0..self.d2 {
                        v *= y[j].powi(t.yp[j] as i32);
                    }
                    v
                })
                .sum(),
            TestForm::BumpSum { bumps, .. } => bumps
                .iter()
                .map(|b| {
                    let qx: f64 = (0..self.d1).map(|k| (x[k] - b.mu[k]).powi(2)).sum();
                    let qy: f64 = (0..self.d2).map(|k| (y[k] - b.nu[k]).powi(2)).sum();
                    b.amp * (-qx / (2.0 * b.sigma * b.sigma)).exp() * (-qy / (2.0 * b.tau * b.tau)).exp()
                })
                .sum(),
        }
    }

    /// Entry `(i, j)` of the mixed-derivative matrix `∂²f/∂x_i ∂y_j`.
    pub fn mixed_entry(&self, x: Point, y: Point, i: usize, j: usize) -> f64 {
        match &self.form {
            TestForm::ProductLinear { a, b, .. } => a[i] * b[j],
            TestForm::SeparableTrig { amp, fx, px, fy, py } => {
                let pi = std::f64::consts::PI;
                let dp: f64 = (0..self.d1)
                    .map(|k| {
                        let arg = pi * (fx[k] * x[k] + px[k]);
                        if k == i {
                            pi * fx[k] * arg.cos()
                        } else {
                            arg.sin()
                        }
                    })
                    .product();
                let dq: f64 = (0..self.d2)
                    .map(|k| {
                        let arg = pi * (fy[k] * y[k] + py[k]);
                        if k == j {
                            pi * fy[k] * arg.cos()
                        } else {
                            arg.sin()
                        }
                    })
                    .product();
                amp * dp * dq
            }
            TestForm::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    if t.xp[i] == 0 || t.yp[j] == 0 {
                        return 0.0;
                    }
                    let mut v = t.coeff * t.xp[i] as f64 * t.yp[j] as f64;
                    for k in 0..self.d1 {
                        let p = if k == i { t.xp[k] - 1 } else { t.xp[k] };
                        v *= x[k].powi(p as i32);
                    }
                    for k in 0..self.d2 {
                        let p = if k == j { t.yp[k] - 1 } else { t.yp[k] };
                        v *= y[k].powi(p as i32);
                    }
                    v
                })
                .sum(),
            TestForm::BumpSum { bumps, .. } => bumps
                .iter()
                .map(|b| {
                    let qx: f64 = (0..self.d1).map(|k| (x[k] - b.mu[k]).powi(2)).sum();
                    let qy: f64 = (0..self.d2).map(|k| (y[k] - b.nu[k]).powi(2)).sum();
                    let g = (-qx / (2.0 * b.sigma * b.sigma)).exp();
                    let h = (-qy / (2.0 * b.tau * b.tau)).exp();
                    let dg = -(x[i] - b.mu[i]) / (b.sigma * b.sigma) * g;
                    let dh = -(y[j] - b.nu[j]) / (b.tau * b.tau) * h;
                    b.amp * dg * dh
                })
                .sum(),
        }
    }

    /// Frobenius norm of the mixed-derivative block at `(x, y)`.
    pub fn mixed_frobenius(&self, x: Point, y: Point) -> f64 {
        let mut s = 0.0;
        for i in 0..self.d1 {
            for j in 0..self.d2 {
                let e = self.mixed_entry(x, y, i, j);
                s += e * e;
            }
        }
        s.sqrt()
    }

    /// Sample `f` on a grid.
    pub fn sample_on(&self, grid: &ProductGrid) -> Result<GridFn> {
        if grid.g1.cube.dim != self.d1 || grid.g2.cube.dim != self.d2 {
            return Err(CoreError::GridMismatch(format!(
                "test function has block dims ({}, {}) but grid has ({}, {})",
                self.d1, self.d2, grid.g1.cube.dim, grid.g2.cube.dim
            )));
        }
        sample(|x, y| self.eval(x, y), grid)
    }
}

/// Per-y average over the x-block, broadcast back to the full grid.
pub fn avg_x(g: &GridFn) -> GridFn {
    let c1 = g.grid.g1.cell_count();
    let c2 = g.grid.g2.cell_count();
    let mut col = vec![0.0; c2];
    for i1 in 0..c1 {
        for i2 in 0..c2 {
            col[i2] += g.at(i1, i2);
        }
    }
    for v in &mut col {
        *v /= c1 as f64;
    }
    let mut out = GridFn::zeros(g.grid);
    for i1 in 0..c1 {
        for i2 in 0..c2 {
            *out.at_mut(i1, i2) = col[i2];
        }
    }
    out
}

/// Per-x average over the y-block, broadcast back to the full grid.
pub fn avg_y(g: &GridFn) -> GridFn {
    let c1 = g.grid.g1.cell_count();
    let c2 = g.grid.g2.cell_count();
    let mut out = GridFn::zeros(g.grid);
    for i1 in 0..c1 {
        let mut row = 0.0;
        for i2 in 0..c2 {
            row += g.at(i1, i2);
        }
        row /= c2 as f64;
        for i2 in 0..c2 {
            *out.at_mut(i1, i2) = row;
        }
    }
    out
}

/// Average over the whole rectangle.
pub fn avg_full(g: &GridFn) -> f64 {
    g.values.iter().sum::<f64>() / g.values.len() as f64
}

/// The non-standard oscillation projection
/// `π_R(g) = avg_x(g) + avg_y(g) - avg_full(g)`, a field of the form
/// `a(x) + b(y)`.
pub fn pi_r(g: &GridFn) -> GridFn {
    let ax = avg_x(g);
    let ay = avg_y(g);
    let af = avg_full(g);
    let values = ax
        .values
        .iter()
        .zip(&ay.values)
        .map(|(&a, &b)| a + b - af)
        .collect();
    GridFn { grid: g.grid, values }
}

/// How `mixed_grad_field` obtains the derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradMode {
    Exact,
    FiniteDifference,
}

/// Field of `|∇_x ∇_y f|` on the grid, either from the exact evaluator or by
/// second-order finite differences of the sampled values (central stencils in
/// the interior, one-sided second-order at boundary layers).
pub fn mixed_grad_field(f: &TestFn, grid: &ProductGrid, mode: GradMode) -> Result<GridFn> {
    match mode {
        GradMode::Exact => {
            if grid.g1.cube.dim != f.d1 || grid.g2.cube.dim != f.d2 {
                return Err(CoreError::GridMismatch("test function dims do not match grid".into()));
            }
            sample(|x, y| f.mixed_frobenius(x, y), grid)
        }
        GradMode::FiniteDifference => {
            if grid.g1.cells_per_side < 4 || grid.g2.cells_per_side < 4 {
                return Err(CoreError::invalid(
                    "finite-difference mixed gradient needs at least 4 cells per axis",
                ));
            }
            let samples = f.sample_on(grid)?;
            let d1 = grid.g1.cube.dim;
            let d2 = grid.g2.cube.dim;
            let mut acc = vec![0.0; samples.values.len()];
            for i in 0..d1 {
                let dx = fd_along(&samples.values, grid, Axis::X, i);
                for j in 0..d2 {
                    let dxy = fd_along(&dx, grid, Axis::Y, j);
                    for (a, &v) in acc.iter_mut().zip(&dxy) {
                        *a += v * v;
                    }
                }
            }
            GridFn::new(*grid, acc.into_iter().map(f64::sqrt).collect())
        }
    }
}

/// First derivative of grid data along one coordinate of one block.
///
/// The lattice is `(u1, v1, u2, v2)` with degenerate extents for
/// one-dimensional blocks; `coord` selects the in-block coordinate (0 or 1).
fn fd_along(values: &[f64], grid: &ProductGrid, block: Axis, coord: usize) -> Vec<f64> {
    let n1 = grid.g1.cells_per_side;
    let n2 = grid.g2.cells_per_side;
    let d1 = grid.g1.cube.dim;
    let d2 = grid.g2.cube.dim;
    let shape = [n1, if d1 == 2 { n1 } else { 1 }, n2, if d2 == 2 { n2 } else { 1 }];
    let stride = [
        shape[1] * shape[2] * shape[3],
        shape[2] * shape[3],
        shape[3],
        1,
    ];
    let axis = match (block, coord) {
        (Axis::X, c) => c,
        (Axis::Y, c) => 2 + c,
    };
    let h = match block {
        Axis::X => grid.g1.h(),
        Axis::Y => grid.g2.h(),
    };
    let len = shape[axis];
    let st = stride[axis];
    let mut out = vec![0.0; values.len()];
    // iterate over all lines along `axis`
    let mut counters = [0usize; 4];
    loop {
        if counters[axis] == 0 {
            let base: usize = (0..4).map(|k| counters[k] * stride[k]).sum();
            for k in 0..len {
                let at = |idx: usize| values[base + idx * st];
                out[base + k * st] = if k == 0 {
                    (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
                } else if k == len - 1 {
                    (3.0 * at(len - 1) - 4.0 * at(len - 2) + at(len - 3)) / (2.0 * h)
                } else {
                    (at(k + 1) - at(k - 1)) / (2.0 * h)
                };
            }
        }
        // advance the counter, skipping the derivative axis
        let mut k = 3;
        loop {
            if k == axis {
                if k == 0 {
                    return out;
                }
                k -= 1;
                continue;
            }
            counters[k] += 1;
            if counters[k] < shape[k] {
                break;
            }
            counters[k] = 0;
            if k == 0 {
                return out;
            }
            k -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_product_grid, integrate, lp_norm};

    fn unit_grid(n: usize) -> ProductGrid {
        build_product_grid(Rect::unit_square(), n, n).unwrap()
    }

    #[test]
    fn averages_of_bilinear_are_exact() {
        let grid = unit_grid(16);
        let f = TestFn::bilinear(1, 1).sample_on(&grid).unwrap();
        let ax = avg_x(&f);
        let ay = avg_y(&f);
        for i1 in 0..16 {
            for i2 in 0..16 {
                let x = (i1 as f64 + 0.5) / 16.0;
                let y = (i2 as f64 + 0.5) / 16.0;
                assert!((ax.at(i1, i2) - y / 2.0).abs() < 1e-14);
                assert!((ay.at(i1, i2) - x / 2.0).abs() < 1e-14);
            }
        }
        assert!((avg_full(&f) - 0.25).abs() < 1e-14);
        assert!((avg_full(&avg_x(&f)) - avg_full(&f)).abs() < 1e-14);
    }

    #[test]
    fn avg_x_keeps_x_constants() {
        let grid = unit_grid(8);
        let f = sample(|_, y| y[0] * y[0] + 1.0, &grid).unwrap();
        let ax = avg_x(&f);
        assert_eq!(ax.values, f.values);
        let c = GridFn::constant(grid, std::f64::consts::E);
        assert_eq!(avg_x(&c).values, c.values);
        assert_eq!(avg_y(&c).values, c.values);
    }

    #[test]
    fn pi_r_reproduces_one_block_sums_exactly() {
        let grid = unit_grid(12);
        for tf in [
            TestFn::one_block_x(1, 1),
            TestFn::one_block_y(1, 1),
            TestFn::one_block_sum(1, 1),
        ] {
            let f = tf.sample_on(&grid).unwrap();
            let p = pi_r(&f);
            let gap = f
                .values
                .iter()
                .zip(&p.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(gap < 1e-13, "{}: gap {gap}", tf.label);
        }
    }

    #[test]
    fn pi_r_of_bilinear() {
        let grid = unit_grid(32);
        let f = TestFn::bilinear(1, 1).sample_on(&grid).unwrap();
        let p = pi_r(&f);
        for i1 in 0..32 {
            for i2 in 0..32 {
                let x = (i1 as f64 + 0.5) / 32.0;
                let y = (i2 as f64 + 0.5) / 32.0;
                assert!((p.at(i1, i2) - (x / 2.0 + y / 2.0 - 0.25)).abs() < 1e-13);
                let osc = f.at(i1, i2) - p.at(i1, i2);
                assert!((osc - (x - 0.5) * (y - 0.5)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn pi_r_is_a_projection_with_mean_zero_oscillation() {
        let grid = unit_grid(16);
        let rect = grid.rect();
        for (k, tf) in [
            TestFn::bilinear(1, 1),
            TestFn::separable_sin(1, 1),
            TestFn::random_bump_sum(1, 1, 42, 3, &rect),
        ]
        .iter()
        .enumerate()
        {
            let f = tf.sample_on(&grid).unwrap();
            let p = pi_r(&f);
            let pp = pi_r(&p);
            let gap = p
                .values
                .iter()
                .zip(&pp.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(gap < 1e-12, "case {k}: projection gap {gap}");
            let osc = f.zip(&p, |a, b| a - b).unwrap();
            let mean = integrate(&osc, None).unwrap();
            let scale = lp_norm(&f, 1.0, None).unwrap().max(1e-30);
            assert!(mean.abs() <= 1e-12 * scale, "case {k}: mean {mean}");
        }
    }

    #[test]
    fn pi_r_linearity() {
        let grid = unit_grid(8);
        let f = TestFn::separable_sin(1, 1).sample_on(&grid).unwrap();
        let g = TestFn::bilinear(1, 1).sample_on(&grid).unwrap();
        let combo = f.zip(&g, |a, b| 2.5 * a - 0.75 * b).unwrap();
        let lhs = pi_r(&combo);
        let rhs = pi_r(&f).zip(&pi_r(&g), |a, b| 2.5 * a - 0.75 * b).unwrap();
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mixed_grad_exact_cases() {
        let grid = unit_grid(8);
        // one-block functions have zero mixed gradient
        for tf in [TestFn::one_block_x(1, 1), TestFn::one_block_sum(1, 1)] {
            let g = mixed_grad_field(&tf, &grid, GradMode::Exact).unwrap();
            assert!(g.max_abs() == 0.0, "{}", tf.label);
        }
        // f = xy has |∂²f/∂x∂y| = 1
        let g = mixed_grad_field(&TestFn::bilinear(1, 1), &grid, GradMode::Exact).unwrap();
        assert!(g.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        // sin(πx)sin(πy) -> π²|cos(πx)cos(πy)|
        let g = mixed_grad_field(&TestFn::separable_sin(1, 1), &grid, GradMode::Exact).unwrap();
        let pi = std::f64::consts::PI;
        for i1 in 0..8 {
            for i2 in 0..8 {
                let x = (i1 as f64 + 0.5) / 8.0;
                let y = (i2 as f64 + 0.5) / 8.0;
                let expect = pi * pi * ((pi * x).cos() * (pi * y).cos()).abs();
                assert!((g.at(i1, i2) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fd_matches_exact_at_second_order() {
        let tf = TestFn::separable_sin(1, 1);
        let mut errs = Vec::new();
        for n in [32usize, 64] {
            let grid = unit_grid(n);
            let exact = mixed_grad_field(&tf, &grid, GradMode::Exact).unwrap();
            let fd = mixed_grad_field(&tf, &grid, GradMode::FiniteDifference).unwrap();
            let gap = exact
                .values
                .iter()
                .zip(&fd.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            errs.push(gap);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order >= 1.9, "observed order {order}, errors {errs:?}");
    }

    #[test]
    fn fd_rejects_small_grids() {
        let grid = build_product_grid(Rect::unit_square(), 3, 8).unwrap();
        let tf = TestFn::bilinear(1, 1);
        assert!(mixed_grad_field(&tf, &grid, GradMode::FiniteDifference).is_err());
    }

    #[test]
    fn fd_on_dim2_blocks_matches_exact() {
        let i1 = crate::grid::Cube::new(2, [0.0, 0.0], 1.0).unwrap();
        let i2 = crate::grid::Cube::new(1, [0.0, 0.0], 1.0).unwrap();
        let rect = Rect::new(i1, i2);
        let tf = TestFn::separable_sin(2, 1);
        let mut errs = Vec::new();
        for n in [12usize, 24] {
            let grid = build_product_grid(rect, n, n).unwrap();
            let exact = mixed_grad_field(&tf, &grid, GradMode::Exact).unwrap();
            let fd = mixed_grad_field(&tf, &grid, GradMode::FiniteDifference).unwrap();
            let gap = exact
                .values
                .iter()
                .zip(&fd.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            errs.push(gap);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order >= 1.8, "observed order {order}, errors {errs:?}");
    }

    #[test]
    fn bump_sum_is_seed_deterministic() {
        let rect = Rect::unit_square();
        let a = TestFn::random_bump_sum(1, 1, 7, 4, &rect);
        let b = TestFn::random_bump_sum(1, 1, 7, 4, &rect);
        assert_eq!(a, b);
        let c = TestFn::random_bump_sum(1, 1, 8, 4, &rect);
        assert_ne!(a, c);
    }

    #[test]
    fn test_fn_serializes_with_family_tag() {
        let tf = TestFn::separable_sin(1, 1);
        let v = serde_json::to_value(&tf).unwrap();
        assert_eq!(v["form"]["family"], "separable_trig");
        let back: TestFn = serde_json::from_value(v).unwrap();
        assert_eq!(tf, back);
    }
}
