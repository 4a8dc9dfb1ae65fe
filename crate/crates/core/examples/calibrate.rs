// Calibration probe: prints suite ratios at N = 64 and N = 96 for the
// bundled fixture (three test functions, three weights, p in {1.5, 2, 3}),
// plus slice-kernel and maximal/fractional domination constants. Used to fix
// the default ceilings; not part of the test suite.

use bipoincare::extrapolation::check_thm31;
use bipoincare::fractional::KernelQuadRule;
use bipoincare::grid::{build_product_grid, Axis, Cube, Rect};
use bipoincare::maximal::{estimate_op_norm, FamilyCaps, MaxOp, TestFamily};
use bipoincare::oscillation::TestFn;
use bipoincare::verify::*;
use bipoincare::weights::{power_weight, WeightSpec};

fn main() {
    let rect = Rect::unit_square();
    let ceilings = Ceilings::default();
    let weights = vec![
        ("const", WeightSpec::constant()),
        ("xa-045", power_weight(-0.45, 0.0, [0.0, 0.0], [0.0, 0.0])),
        ("xy-03", power_weight(-0.3, -0.3, [0.0, 0.0], [0.0, 0.0])),
    ];
    let fns = |r: &Rect| {
        vec![
            TestFn::bilinear(1, 1),
            TestFn::separable_sin(1, 1),
            TestFn::random_bump_sum(1, 1, 2024, 3, r),
        ]
    };
    let mut table: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for n in [64usize, 96] {
        let grid = build_product_grid(rect, n, n).unwrap();
        let rules = KernelQuadRule::for_grid(&grid, 6).unwrap();
        for f in fns(&rect) {
            let r = check_pointwise_l12(&f, &grid, rules, &ceilings).unwrap();
            table.entry(format!("L12/{}", f.label)).or_default().push(r.ratio);
            let r = check_poincare11(&f, &grid, &ceilings).unwrap();
            table.entry(format!("p11/{}", f.label)).or_default().push(r.ratio);
            for (wl, w) in &weights {
                let r = check_poincare11_a1(&f, w, &grid, &ceilings).unwrap();
                table.entry(format!("p11A1/{}/{}", f.label, wl)).or_default().push(r.ratio);
                for p in [1.5, 2.0, 3.0] {
                    let r = check_weak_pp(&f, w, p, &grid, &ceilings).unwrap();
                    table.entry(format!("weak/{}/{}/p{}", f.label, wl, p)).or_default().push(r.ratio);
                    let r = check_strong_pp(&f, w, p, &grid, StrongVariant::T15, &ceilings).unwrap();
                    table.entry(format!("T15/{}/{}/p{}", f.label, wl, p)).or_default().push(r.ratio);
                    let r = check_strong_pp(&f, w, p, &grid, StrongVariant::T16, &ceilings).unwrap();
                    table.entry(format!("T16/{}/{}/p{}", f.label, wl, p)).or_default().push(r.ratio);
                }
            }
        }
        for (wl, w) in &weights {
            let r = check_slice_kernel_a1(w, &grid, rules, &ceilings).unwrap();
            table.entry(format!("slice/{}", wl)).or_default().push(r.ratio);
            for p in [1.5, 2.0, 3.0] {
                let pd = p / (p - 1.0);
                let fam = TestFamily::built_in(&grid, FamilyCaps::default(), 2024);
                let est = estimate_op_norm(MaxOp::Dual, pd, w, &grid, &fam).unwrap();
                table.entry(format!("opnorm/{}/p{}", wl, p)).or_default().push(est.value);
                for f in fns(&rect) {
                    let r = check_thm31(&f, w, p, &grid, Some(est.value), &ceilings).unwrap();
                    table.entry(format!("thm31/{}/{}/p{}", f.label, wl, p)).or_default().push(r.ratio);
                }
            }
        }
    }
    let mut worst: std::collections::BTreeMap<String, (f64, f64)> = Default::default();
    for (k, v) in &table {
        let drift = if v[0] != 0.0 { ((v[1] - v[0]) / v[0]).abs() } else { 0.0 };
        println!("{k}: N64={:.6} N96={:.6} drift={:.4}", v[0], v[1], drift);
        let fam = k.split('/').next().unwrap().to_string();
        let e = worst.entry(fam).or_insert((0.0, 0.0));
        e.0 = e.0.max(v[0].max(v[1]));
        e.1 = e.1.max(drift);
    }
    println!("\n== family maxima (max ratio, max drift) ==");
    for (k, (m, d)) in &worst {
        println!("{k}: max_ratio={m:.6} max_drift={d:.4}");
    }

    // maximal/fractional domination constants per dimension
    for (label, rect, n) in [
        ("d1", Rect::unit_square(), 32usize),
        (
            "d2",
            Rect::new(Cube::new(2, [0.0, 0.0], 1.0).unwrap(), Cube::new(1, [0.0, 0.0], 1.0).unwrap()),
            16,
        ),
    ] {
        let grid = build_product_grid(rect, n, 8).unwrap();
        let rules = KernelQuadRule::for_grid(&grid, 6).unwrap();
        for f in [TestFn::separable_sin(rect.i1.dim, rect.i2.dim), TestFn::bilinear(rect.i1.dim, rect.i2.dim)] {
            let g = f.sample_on(&grid).unwrap().map(f64::abs);
            let c = bipoincare::fractional::check_maxfrac_domination(&g, Axis::X, &rules.0).unwrap();
            println!("maxfrac {label} {}: C = {c:.4}", f.label);
        }
    }
}
