//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Ceilings, tolerances and grid sizes are pinned here; the suite is the
//! regression gate for the whole crate.

use bipoincare::extrapolation::{check_rdf_properties, check_thm31, rubio_iterate};
use bipoincare::fractional::{biparam_t, riesz_slice, KernelQuadRule};
use bipoincare::grid::{
    build_product_grid, integrate, lp_norm, sample, Axis, Cube, GridFn, ProductGrid, Rect,
};
use bipoincare::maximal::{estimate_op_norm, strong_maximal, FamilyCaps, MaxOp, TestFamily};
use bipoincare::oracle;
use bipoincare::oscillation::{mixed_grad_field, pi_r, GradMode, TestFn};
use bipoincare::verify::{
    check_pointwise_l12, check_poincare11, check_poincare11_a1, check_strong_pp, check_weak_pp,
    power_sweep_points, sweep_weights, Ceilings, InequalityId, StrongVariant, SweepSpec,
    SweepTarget, VerifyReport,
};
use bipoincare::weights::{
    a1_constant_rect, ap_constant_rect, ap_constant_slices, dual_weight_constant, power_weight,
    WeightSpec,
};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit_grid(n: usize) -> ProductGrid {
    build_product_grid(Rect::unit_square(), n, n).unwrap()
}

fn fixture_fns(rect: &Rect) -> Vec<TestFn> {
    vec![
        TestFn::bilinear(1, 1),
        TestFn::separable_sin(1, 1),
        TestFn::random_bump_sum(1, 1, 2024, 3, rect),
    ]
}

fn fixture_weights() -> Vec<WeightSpec> {
    vec![
        WeightSpec::constant(),
        power_weight(-0.45, 0.0, [0.0, 0.0], [0.0, 0.0]),
        power_weight(-0.3, -0.3, [0.0, 0.0], [0.0, 0.0]),
    ]
}

const FIXTURE_PS: [f64; 3] = [1.5, 2.0, 3.0];

fn pass(line: &str) {
    println!("ACCEPTANCE {line}: PASS");
}

#[test]
fn acc01_projection_and_mean_zero() {
    let rect = Rect::unit_square();
    let families = vec![
        TestFn::bilinear(1, 1),
        TestFn::separable_sin(1, 1),
        TestFn::one_block_sum(1, 1), // polynomial family
        TestFn::random_bump_sum(1, 1, 7, 4, &rect),
    ];
    for n in [16usize, 32, 64] {
        let grid = unit_grid(n);
        for tf in &families {
            let f = tf.sample_on(&grid).unwrap();
            let p = pi_r(&f);
            let pp = pi_r(&p);
            let proj_gap = p
                .values
                .iter()
                .zip(&pp.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(proj_gap <= 1e-12, "{} at N={n}: projection gap {proj_gap}", tf.label);
            let osc_mean = integrate(&f.zip(&p, |a, b| a - b).unwrap(), None).unwrap();
            let scale = lp_norm(&f, 1.0, None).unwrap().max(1.0);
            assert!(osc_mean.abs() <= 1e-12 * scale, "{} at N={n}: mean {osc_mean}", tf.label);
        }
    }
    pass("1 (projection idempotent, oscillation mean-zero, 1e-12, grids 16/32/64)");
}

#[test]
fn acc02_exact_bilinear_benchmark() {
    let grid = unit_grid(16);
    let ceilings = Ceilings::default();
    let f = TestFn::bilinear(1, 1);
    let r = check_poincare11(&f, &grid, &ceilings).unwrap();
    assert!((r.lhs - 1.0 / 16.0).abs() <= 1e-12, "lhs {}", r.lhs);
    assert!((r.rhs_core - 1.0).abs() <= 1e-12, "rhs {}", r.rhs_core);
    assert!((r.geometry_factor - 1.0).abs() <= 1e-12);
    let rules = KernelQuadRule::for_grid(&grid, 6).unwrap();
    let rl = check_pointwise_l12(&f, &grid, rules, &ceilings).unwrap();
    assert!((rl.lhs - 0.25).abs() <= 1e-12, "pointwise ratio {}", rl.lhs);
    pass("2 (bilinear benchmark: lhs 1/16 and pointwise ratio 1/4 exact)");
}

#[test]
fn acc03_one_block_vanishing() {
    let grid = unit_grid(16);
    let ceilings = Ceilings::default();
    let w = power_weight(-0.3, -0.3, [0.0, 0.0], [0.0, 0.0]);
    let rules = KernelQuadRule::for_grid(&grid, 6).unwrap();
    for f in [TestFn::one_block_x(1, 1), TestFn::one_block_y(1, 1), TestFn::one_block_sum(1, 1)] {
        let scale = lp_norm(&f.sample_on(&grid).unwrap(), 1.0, None).unwrap();
        let reports: Vec<VerifyReport> = vec![
            check_pointwise_l12(&f, &grid, rules, &ceilings).unwrap(),
            check_poincare11(&f, &grid, &ceilings).unwrap(),
            check_poincare11_a1(&f, &w, &grid, &ceilings).unwrap(),
            check_weak_pp(&f, &w, 2.0, &grid, &ceilings).unwrap(),
            check_strong_pp(&f, &w, 2.0, &grid, StrongVariant::T15, &ceilings).unwrap(),
            check_strong_pp(&f, &w, 2.0, &grid, StrongVariant::T16, &ceilings).unwrap(),
            bipoincare::verify::probe_conjecture(&f, &w, 2.0, &grid, &ceilings).unwrap(),
            check_thm31(&f, &w, 2.0, &grid, None, &ceilings).unwrap(),
        ];
        for r in reports {
            assert!(
                r.lhs.abs() <= 1e-12 * scale,
                "{} / {}: lhs {}",
                f.label,
                r.inequality.as_str(),
                r.lhs
            );
            assert!(r.pass, "{} / {}", f.label, r.inequality.as_str());
        }
    }
    pass("3 (one-block functions: every report lhs = 0 to 1e-12·|f|)");
}

#[test]
fn acc04_oracle_equivalence() {
    // A_p constants on 16x16
    let grid = unit_grid(16);
    let w = power_weight(0.5, -0.3, [0.5, 0.0], [0.0, 0.0]);
    let wf = w.sample_on(&grid).unwrap();
    for p in FIXTURE_PS {
        let fast = ap_constant_rect(&w, &grid, p).unwrap().constant;
        let brute = oracle::brute_ap_constant(&wf, p);
        assert!((fast - brute).abs() <= 1e-12 * brute, "A_p p={p}");
    }
    let fast = a1_constant_rect(&WeightSpec::constant(), &grid).unwrap().constant;
    assert!((fast - 1.0).abs() <= 1e-12);
    let w_neg = power_weight(-0.45, -0.2, [0.0, 0.0], [0.0, 0.0]);
    let wf_neg = w_neg.sample_on(&grid).unwrap();
    let fast = a1_constant_rect(&w_neg, &grid).unwrap().constant;
    let brute = oracle::brute_a1_constant(&wf_neg);
    assert!((fast - brute).abs() <= 1e-12 * brute);

    // strong maximal on 12x12 and a dim-2 block case
    let g12 = unit_grid(12);
    let f = sample(|x, y| (x[0] * 7.0).sin().abs() + y[0], &g12).unwrap();
    let fast = strong_maximal(&f);
    let brute = oracle::brute_strong_maximal(&f);
    for (a, b) in fast.values.iter().zip(&brute.values) {
        assert!((a - b).abs() <= 1e-12);
    }
    let i1 = Cube::new(2, [0.0, 0.0], 1.0).unwrap();
    let i2 = Cube::new(1, [0.0, 0.0], 1.0).unwrap();
    let gm = build_product_grid(Rect::new(i1, i2), 4, 8).unwrap();
    let fm = sample(|x, y| x[0] + x[1] * y[0] + 0.2, &gm).unwrap();
    let fast = strong_maximal(&fm);
    let brute = oracle::brute_strong_maximal(&fm);
    for (a, b) in fast.values.iter().zip(&brute.values) {
        assert!((a - b).abs() <= 1e-12);
    }

    // factored T vs the unfactored double sum: (1,1) on 12x12 and (2,2) on 8x8
    let rules = KernelQuadRule::for_grid(&g12, 6).unwrap();
    let t_fast = biparam_t(&f, &rules.0, &rules.1).unwrap();
    let t_brute = oracle::brute_t_double_sum(&f, &rules.0, &rules.1).unwrap();
    let scale = t_fast.max_abs();
    for (a, b) in t_fast.values.iter().zip(&t_brute.values) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
    let sq = Cube::new(2, [0.0, 0.0], 1.0).unwrap();
    let g22 = build_product_grid(Rect::new(sq, sq), 8, 8).unwrap();
    let f22 = sample(|x, y| 0.5 + x[0] * y[1] + x[1] * (3.0 * y[0]).cos().abs(), &g22).unwrap();
    let rules22 = KernelQuadRule::for_grid(&g22, 5).unwrap();
    let t_fast = biparam_t(&f22, &rules22.0, &rules22.1).unwrap();
    let t_brute = oracle::brute_t_double_sum(&f22, &rules22.0, &rules22.1).unwrap();
    let scale = t_fast.max_abs();
    for (a, b) in t_fast.values.iter().zip(&t_brute.values) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
    pass("4 (prefix-sum constants, strong maximal, factored T match brute force to 1e-12)");
}

#[test]
fn acc05_weight_algebra() {
    let grid = unit_grid(16);
    // [1]_{A_p} = 1
    for p in FIXTURE_PS {
        let c = ap_constant_rect(&WeightSpec::constant(), &grid, p).unwrap().constant;
        assert!((c - 1.0).abs() <= 1e-12);
    }
    // scale invariance
    let w = power_weight(-0.45, 0.0, [0.0, 0.0], [0.0, 0.0]);
    let wf = w.sample_on(&grid).unwrap();
    let base = ap_constant_rect(&w, &grid, 2.0).unwrap().constant;
    for lam in [1e-3, 1.0, 1e3] {
        let scaled = WeightSpec::sampled(wf.map(|v| lam * v), "scaled");
        let c = ap_constant_rect(&scaled, &grid, 2.0).unwrap().constant;
        assert!((c - base).abs() <= 1e-12 * base, "lambda {lam}");
    }
    // duality identity
    for p in FIXTURE_PS {
        let p_dual = p / (p - 1.0);
        let lhs = dual_weight_constant(&w, &grid, p).unwrap();
        let rhs = ap_constant_rect(&w, &grid, p).unwrap().constant.powf(p_dual - 1.0);
        assert!((lhs - rhs).abs() <= 1e-10 * rhs, "duality p={p}");
    }
    // slice bound, exact on the shared family
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in 0..20u64 {
        let vals: Vec<f64> = (0..grid.cell_count()).map(|_| rng.random_range(0.2..5.0)).collect();
        let wr = WeightSpec::sampled(GridFn::new(grid, vals).unwrap(), format!("r{k}"));
        for p in [1.0, 2.0] {
            let rect_c = if p > 1.0 {
                ap_constant_rect(&wr, &grid, p).unwrap().constant
            } else {
                a1_constant_rect(&wr, &grid).unwrap().constant
            };
            for axis in [Axis::X, Axis::Y] {
                let s = ap_constant_slices(&wr, &grid, p, axis).unwrap();
                assert!(s <= rect_c + 1e-12 * rect_c, "slice bound k={k} p={p}");
            }
        }
        // p-monotonicity
        let mut last = f64::INFINITY;
        for p in [1.25, 1.5, 2.0, 3.0, 5.0] {
            let c = ap_constant_rect(&wr, &grid, p).unwrap().constant;
            assert!(c <= last + 1e-10, "monotonicity k={k} p={p}");
            assert!(c >= 1.0 - 1e-10);
            last = c;
        }
    }
    pass("5 (weight algebra: unit, scaling, duality, slice bound, p-monotonicity)");
}

#[test]
fn acc06_theorem_ratio_stability() {
    let rect = Rect::unit_square();
    let ceilings = Ceilings::default();
    let fns = fixture_fns(&rect);
    let weights = fixture_weights();
    let grid_base = unit_grid(64);
    let grid_fine = unit_grid(96);
    let rules_base = KernelQuadRule::for_grid(&grid_base, 6).unwrap();
    let rules_fine = KernelQuadRule::for_grid(&grid_fine, 6).unwrap();

    // dual operator norms pinned on the base grid so that refinement drift
    // measures the discretization of lhs/rhs, not estimator evolution
    let mut opnorms = std::collections::BTreeMap::new();
    for (wi, w) in weights.iter().enumerate() {
        for &p in &FIXTURE_PS {
            let fam = TestFamily::built_in(&grid_base, FamilyCaps::default(), 2024);
            let est = estimate_op_norm(MaxOp::Dual, p / (p - 1.0), w, &grid_base, &fam).unwrap();
            opnorms.insert((wi, p.to_bits()), est.value);
        }
    }

    let run = |grid: &ProductGrid, rules: (KernelQuadRule, KernelQuadRule)| -> Vec<(String, f64, f64, bool)> {
        let mut rows = Vec::new();
        for f in &fns {
            let r = check_pointwise_l12(f, grid, rules, &ceilings).unwrap();
            rows.push((format!("L12/{}", f.label), r.ratio, r.ceiling, r.pass));
            for (wi, w) in weights.iter().enumerate() {
                let r = check_poincare11_a1(f, w, grid, &ceilings).unwrap();
                rows.push((format!("p11A1/{}/{wi}", f.label), r.ratio, r.ceiling, r.pass));
                for &p in &FIXTURE_PS {
                    let r = check_weak_pp(f, w, p, grid, &ceilings).unwrap();
                    rows.push((format!("weak/{}/{wi}/{p}", f.label), r.ratio, r.ceiling, r.pass));
                    let r = check_strong_pp(f, w, p, grid, StrongVariant::T15, &ceilings).unwrap();
                    rows.push((format!("T15/{}/{wi}/{p}", f.label), r.ratio, r.ceiling, r.pass));
                    let r = check_strong_pp(f, w, p, grid, StrongVariant::T16, &ceilings).unwrap();
                    rows.push((format!("T16/{}/{wi}/{p}", f.label), r.ratio, r.ceiling, r.pass));
                    let opn = opnorms[&(wi, p.to_bits())];
                    let r = check_thm31(f, w, p, grid, Some(opn), &ceilings).unwrap();
                    rows.push((format!("thm31/{}/{wi}/{p}", f.label), r.ratio, r.ceiling, r.pass));
                }
            }
        }
        rows
    };
    let base = run(&grid_base, rules_base);
    let fine = run(&grid_fine, rules_fine);
    assert_eq!(base.len(), fine.len());
    for ((name, r64, ceiling, pass64), (_, r96, _, pass96)) in base.iter().zip(&fine) {
        assert!(r64.is_finite() && r96.is_finite(), "{name}: ratio not finite");
        assert!(pass64 & pass96, "{name}: ratio {r64} / {r96} over ceiling {ceiling}");
        if *r64 > 0.0 {
            let drift = ((r96 - r64) / r64).abs();
            assert!(drift < 0.05, "{name}: drift {drift} ({r64} -> {r96})");
        }
    }
    pass("6 (fixture-suite ratios finite, under ceilings, <5% drift 64->96)");
}

#[test]
fn acc07_sweep_slopes() {
    let grid = unit_grid(32);
    let rules = KernelQuadRule::for_grid(&grid, 6).unwrap();
    let ceilings = Ceilings::default();
    let p = 2.0;
    for target in [SweepTarget::WeakPp, SweepTarget::StrongPpT15, SweepTarget::StrongPpT16] {
        let spec = SweepSpec {
            target,
            p,
            points: power_sweep_points(&[0.0, 0.3, 0.6, 0.9], true),
            test_fn: Some(TestFn::separable_sin(1, 1)),
            slope_tolerance: 0.2,
            seed: 2024,
        };
        let res = sweep_weights(&spec, &grid, rules, &ceilings).unwrap();
        let slope = res.fitted_slope.expect("nondegenerate");
        assert!(
            slope <= res.theory_exponent + 0.2,
            "{}: slope {slope} vs {} + 0.2",
            res.target,
            res.theory_exponent
        );
        assert!(res.pass);
    }
    // Buckley, 1-D block
    let bgrid = build_product_grid(Rect::unit_square(), 64, 2).unwrap();
    let brules = KernelQuadRule::for_grid(&bgrid, 6).unwrap();
    for (target, bound) in [
        (SweepTarget::BuckleyWeak, 1.0 / p + 0.15),
        (SweepTarget::BuckleyStrong, 1.0 / (p - 1.0) + 0.15),
    ] {
        let spec = SweepSpec {
            target,
            p,
            points: power_sweep_points(&[0.0, 0.3, 0.6, 0.8, 0.9], true),
            test_fn: None,
            slope_tolerance: 0.15,
            seed: 2024,
        };
        let res = sweep_weights(&spec, &bgrid, brules, &ceilings).unwrap();
        let slope = res.fitted_slope.expect("nondegenerate");
        assert!(slope <= bound, "{}: slope {slope} vs bound {bound}", res.target);
    }
    pass("7 (sweep slopes one-sided under theory exponents)");
}

#[test]
fn acc08_rubio_de_francia() {
    let grid = unit_grid(32);
    let k_max = 12;
    // geometric closed form for (w ≡ 1, h = χ_R)
    let h = GridFn::constant(grid, 1.0);
    let w = WeightSpec::constant();
    let res = rubio_iterate(&h, &w, 2.0, &grid, k_max, None).unwrap();
    let q = 1.0 / (2.0 * res.opnorm_used);
    let closed = (1.0 - q.powi(k_max as i32 + 1)) / (1.0 - q);
    for &v in &res.field.values {
        assert!((v - closed).abs() <= 1e-10 * closed, "closed form: {v} vs {closed}");
    }
    // random seeded h with a genuine weight
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let hr = GridFn::new(grid, (0..grid.cell_count()).map(|_| rng.random_range(0.1..1.0)).collect()).unwrap();
    let wp = power_weight(-0.5, -0.5, [0.0, 0.0], [0.0, 0.0]);
    let res = rubio_iterate(&hr, &wp, 2.0, &grid, k_max, None).unwrap();
    let reports = check_rdf_properties(&res, &hr, &wp, 2.0).unwrap();
    // (1) exact
    assert_eq!(reports[0].lhs, 0.0, "majorant property holds exactly");
    assert!(reports[0].pass);
    // (2)/(3) pass with tail allowance; the 2x-inflation column is recorded
    assert!(reports[1].pass, "norm bound: ratio {}", reports[1].ratio);
    assert!(reports[1].flags.iter().any(|f| f.starts_with("inflated2x_ratio=")));
    assert!(reports[2].pass, "A1 product: ratio {}", reports[2].ratio);
    assert!(reports[2].flags.iter().any(|f| f.starts_with("tail_allowance=")));
    assert!(res.tail_bound.is_finite() && res.tail_bound >= 0.0);
    pass("8 (Rubio de Francia: exact majorant, bounded norm and A1 product, closed form)");
}

#[test]
fn acc09a_refinement_orders() {
    // quadrature order on a smooth integrand
    let exact = 1.0 / 9.0; // ∫ x²y² over the unit square
    let mut errs = Vec::new();
    for n in [32usize, 64] {
        let grid = unit_grid(n);
        let f = sample(|x, y| x[0] * x[0] * y[0] * y[0], &grid).unwrap();
        errs.push((integrate(&f, None).unwrap() - exact).abs());
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.9, "quadrature order {order}");
    // FD mixed-gradient order
    let tf = TestFn::separable_sin(1, 1);
    let mut errs = Vec::new();
    for n in [32usize, 64] {
        let grid = unit_grid(n);
        let e = mixed_grad_field(&tf, &grid, GradMode::Exact).unwrap();
        let fd = mixed_grad_field(&tf, &grid, GradMode::FiniteDifference).unwrap();
        errs.push(
            e.values
                .iter()
                .zip(&fd.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max),
        );
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.9, "FD order {order}");
    pass("9a (quadrature and FD mixed gradient observed order >= 1.9)");
}

#[test]
fn acc09b_self_cell_depth_convergence() {
    // d = 2 self-cell refinement: the change between depths 5 and 6 must stay
    // under 1e-6 at fixed midpoints. The dropped innermost subcell carries a
    // kernel mass of order 2^{-depth}·h, so the observed change is
    // ~0.87·h·2^{-5}·|g| — reported below before the assertion.
    let i1 = Cube::new(2, [0.0, 0.0], 1.0).unwrap();
    let i2 = Cube::new(1, [0.0, 0.0], 1.0).unwrap();
    let grid = build_product_grid(Rect::new(i1, i2), 16, 4).unwrap();
    let g = TestFn::separable_sin(2, 1).sample_on(&grid).unwrap();
    let v5 = riesz_slice(&g, Axis::X, &KernelQuadRule::new(2, 5).unwrap()).unwrap();
    let v6 = riesz_slice(&g, Axis::X, &KernelQuadRule::new(2, 6).unwrap()).unwrap();
    let change = v5
        .values
        .iter()
        .zip(&v6.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    // supplementary: the change itself decays geometrically with depth
    let v7 = riesz_slice(&g, Axis::X, &KernelQuadRule::new(2, 7).unwrap()).unwrap();
    let change67 = v6
        .values
        .iter()
        .zip(&v7.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(
        change67 < 0.75 * change,
        "self-cell refinement decays geometrically: {change} then {change67}"
    );

    if change >= 1e-6 {
        eprintln!(
            "ACCEPTANCE 9b: FAIL — max |depth-6 - depth-5| = {change:.3e} (h = {:.4}); \
             the dropped-subcell mass is Θ(2^-depth · h), so 1e-6 is unreachable at any \
             desk-scale h with the depth cap of 8",
            grid.g1.h()
        );
    }
    assert!(change < 1e-6, "self-cell change between depths 5 and 6: {change:.3e}");
    pass("9b (d=2 self-cell convergence < 1e-6 between depths 5 and 6)");
}

#[test]
fn acc10_determinism_pointer() {
    // Criterion 10 (byte-identical outputs for bundled configs) runs in the
    // CLI crate's integration tests, where the binary exists:
    // `outputs_are_byte_identical_across_runs` and
    // `sweep_determinism_and_t16_fixture`. Here we pin the in-process half:
    // repeated runs of a seeded check produce identical reports.
    let grid = unit_grid(24);
    let ceilings = Ceilings::default();
    let rect = Rect::unit_square();
    let f = TestFn::random_bump_sum(1, 1, 99, 3, &rect);
    let w = power_weight(-0.45, 0.0, [0.0, 0.0], [0.0, 0.0]);
    let a = check_weak_pp(&f, &w, 2.0, &grid, &ceilings).unwrap();
    let b = check_weak_pp(&f, &w, 2.0, &grid, &ceilings).unwrap();
    assert_eq!(a.to_csv_row(), b.to_csv_row());
    assert_eq!(a.lhs.to_bits(), b.lhs.to_bits());
    assert_eq!(a.ratio.to_bits(), b.ratio.to_bits());
    pass("10 (determinism: in-process reports bit-identical; file-level in CLI tests)");
}
