//! Experiment configuration: a JSON file fully determines a run (no
//! positional knobs beyond the subcommand), so experiments are reproducible
//! artifacts. Validation failures carry the offending field and bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use bipoincare::grid::{build_product_grid, Cube, ProductGrid, Rect};
use bipoincare::oscillation::TestFn;
use bipoincare::verify::{Ceilings, InequalityId};
use bipoincare::weights::{admissible_power, power_weight, WeightSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub rect: RectConfig,
    /// Cells per side for (block 1, block 2), one run per entry.
    pub grids: Vec<[usize; 2]>,
    #[serde(default)]
    pub p_values: Vec<f64>,
    #[serde(default)]
    pub weights: Vec<WeightConfig>,
    #[serde(default)]
    pub test_fns: Vec<TestFnConfig>,
    #[serde(default)]
    pub inequalities: Vec<String>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_depth")]
    pub self_cell_depth: u32,
    #[serde(default)]
    pub ceilings: BTreeMap<String, f64>,
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    pub output: OutputConfig,
}

fn default_k_max() -> usize {
    12
}

fn default_depth() -> u32 {
    6
}

fn default_slope_tolerance() -> f64 {
    0.2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectConfig {
    pub n1: usize,
    pub n2: usize,
    #[serde(default)]
    pub lower1: [f64; 2],
    #[serde(default)]
    pub lower2: [f64; 2],
    pub side1: f64,
    pub side2: f64,
}

impl RectConfig {
    pub fn build(&self) -> Result<Rect, String> {
        let i1 = Cube::new(self.n1, self.lower1, self.side1).map_err(|e| format!("rect.i1: {e}"))?;
        let i2 = Cube::new(self.n2, self.lower2, self.side2).map_err(|e| format!("rect.i2: {e}"))?;
        Ok(Rect::new(i1, i2))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    Constant,
    Power {
        a: f64,
        b: f64,
        #[serde(default)]
        c1: [f64; 2],
        #[serde(default)]
        c2: [f64; 2],
    },
}

impl WeightConfig {
    pub fn build(&self) -> WeightSpec {
        match self {
            WeightConfig::Constant => WeightSpec::constant(),
            WeightConfig::Power { a, b, c1, c2 } => power_weight(*a, *b, *c1, *c2),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFnConfig {
    Bilinear,
    SeparableSin,
    OneBlockX,
    OneBlockY,
    OneBlockSum,
    RandomBumpSum {
        #[serde(default = "default_bumps")]
        bumps: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

fn default_bumps() -> usize {
    3
}

impl TestFnConfig {
    pub fn build(&self, rect: &Rect, default_seed: u64) -> TestFn {
        let d1 = rect.i1.dim;
        let d2 = rect.i2.dim;
        match self {
            TestFnConfig::Bilinear => TestFn::bilinear(d1, d2),
            TestFnConfig::SeparableSin => TestFn::separable_sin(d1, d2),
            TestFnConfig::OneBlockX => TestFn::one_block_x(d1, d2),
            TestFnConfig::OneBlockY => TestFn::one_block_y(d1, d2),
            TestFnConfig::OneBlockSum => TestFn::one_block_sum(d1, d2),
            TestFnConfig::RandomBumpSum { bumps, seed } => {
                TestFn::random_bump_sum(d1, d2, seed.unwrap_or(default_seed), *bumps, rect)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// weak_pp | strong_pp_T15 | strong_pp_T16 | conjecture_probe |
    /// buckley_strong | buckley_weak
    pub target: String,
    pub p: f64,
    /// Power-weight exponents swept on the chosen axis (center at the origin).
    pub exponents: Vec<f64>,
    #[serde(default = "default_axis")]
    pub axis: String,
    #[serde(default)]
    pub test_fn: Option<TestFnConfig>,
}

fn default_axis() -> String {
    "x".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string(), "json".to_string()]
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
        serde_json::from_str(text).map_err(|e| format!("config parse error at line {}, column {}: {e}", e.line(), e.column()))
    }

    pub fn ceilings(&self) -> Ceilings {
        Ceilings { overrides: self.ceilings.clone(), slope_tolerance: self.slope_tolerance }
    }

    pub fn inequality_ids(&self) -> Result<Vec<InequalityId>, String> {
        self.inequalities
            .iter()
            .map(|s| InequalityId::parse(s).ok_or_else(|| format!("inequalities: unknown id '{s}'")))
            .collect()
    }

    pub fn grids_on(&self, rect: Rect) -> Result<Vec<ProductGrid>, String> {
        self.grids
            .iter()
            .map(|&[a, b]| build_product_grid(rect, a, b).map_err(|e| format!("grids [{a},{b}]: {e}")))
            .collect()
    }

    /// Structural and admissibility validation; returns all diagnostics.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let rect = match self.rect.build() {
            Ok(r) => Some(r),
            Err(e) => {
                errs.push(e);
                None
            }
        };
        if self.grids.is_empty() {
            errs.push("grids: at least one grid required".to_string());
        }
        for &[a, b] in &self.grids {
            if a < 2 || b < 2 {
                errs.push(format!("grids: cells per side must be >= 2, got [{a},{b}]"));
            }
        }
        for (k, p) in self.p_values.iter().enumerate() {
            if !(*p > 1.0) {
                errs.push(format!("p_values[{k}]: p must exceed 1, got {p}"));
            }
        }
        if self.self_cell_depth > bipoincare::fractional::MAX_SELF_CELL_DEPTH {
            errs.push(format!(
                "self_cell_depth: bounded by {}, got {}",
                bipoincare::fractional::MAX_SELF_CELL_DEPTH,
                self.self_cell_depth
            ));
        }
        let ids = match self.inequality_ids() {
            Ok(ids) => ids,
            Err(e) => {
                errs.push(e);
                Vec::new()
            }
        };
        if let Some(rect) = rect {
            let needs_ap = ids.iter().any(|id| {
                matches!(
                    id,
                    InequalityId::WeakPp
                        | InequalityId::StrongPpT15
                        | InequalityId::StrongPpT16
                        | InequalityId::Thm31
                        | InequalityId::ConjectureProbe
                        | InequalityId::RdfMajorant
                        | InequalityId::RdfNormBound
                        | InequalityId::RdfA1Product
                )
            });
            let needs_a1 = ids
                .iter()
                .any(|id| matches!(id, InequalityId::Poincare11A1 | InequalityId::SliceKernelA1));
            for (k, wc) in self.weights.iter().enumerate() {
                if let WeightConfig::Power { a, b, .. } = wc {
                    if needs_ap {
                        for &p in &self.p_values {
                            if p > 1.0 && !admissible_power(*a, rect.i1.dim, p) {
                                errs.push(format!(
                                    "weights[{k}]: exponent a={a} is not A_p-admissible at p={p} on a {}-dimensional block (need -{} < a < {})",
                                    rect.i1.dim,
                                    rect.i1.dim,
                                    rect.i1.dim as f64 * (p - 1.0)
                                ));
                            }
                            if p > 1.0 && !admissible_power(*b, rect.i2.dim, p) {
                                errs.push(format!(
                                    "weights[{k}]: exponent b={b} is not A_p-admissible at p={p} on a {}-dimensional block (need -{} < b < {})",
                                    rect.i2.dim,
                                    rect.i2.dim,
                                    rect.i2.dim as f64 * (p - 1.0)
                                ));
                            }
                        }
                    }
                    if needs_a1 {
                        if !admissible_power(*a, rect.i1.dim, 1.0) {
                            errs.push(format!(
                                "weights[{k}]: exponent a={a} is not A_1-admissible (need -{} < a <= 0)",
                                rect.i1.dim
                            ));
                        }
                        if !admissible_power(*b, rect.i2.dim, 1.0) {
                            errs.push(format!(
                                "weights[{k}]: exponent b={b} is not A_1-admissible (need -{} < b <= 0)",
                                rect.i2.dim
                            ));
                        }
                    }
                }
            }
            let needs_p = needs_ap || ids.iter().any(|id| matches!(id, InequalityId::WeakPp));
            if needs_p && self.p_values.is_empty() {
                errs.push("p_values: required by the selected inequalities".to_string());
            }
            let needs_f = ids.iter().any(|id| {
                matches!(
                    id,
                    InequalityId::PointwiseL12
                        | InequalityId::Poincare11
                        | InequalityId::Poincare11A1
                        | InequalityId::WeakPp
                        | InequalityId::StrongPpT15
                        | InequalityId::StrongPpT16
                        | InequalityId::Thm31
                        | InequalityId::ConjectureProbe
                        | InequalityId::MaxfracL21
                )
            });
            if needs_f && self.test_fns.is_empty() {
                errs.push("test_fns: required by the selected inequalities".to_string());
            }
        }
        if let Some(sw) = &self.sweep {
            if !(sw.p > 1.0) {
                errs.push(format!("sweep.p: must exceed 1, got {}", sw.p));
            }
            if sw.exponents.len() < 3 {
                errs.push(format!("sweep.exponents: at least 3 values required, got {}", sw.exponents.len()));
            }
            if sw.axis != "x" && sw.axis != "y" {
                errs.push(format!("sweep.axis: expected \"x\" or \"y\", got \"{}\"", sw.axis));
            }
            if bipoincare::verify::SweepTarget::parse(&sw.target).is_none() {
                errs.push(format!("sweep.target: unknown target '{}'", sw.target));
            }
        }
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                errs.push(format!("output.formats: unknown format '{f}'"));
            }
        }
        errs
    }
}
