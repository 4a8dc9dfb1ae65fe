//! Per-inequality verification records and their CSV/JSON forms.

use serde::{Deserialize, Serialize};

use crate::grid::ProductGrid;

/// Which inequality a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    PointwiseL12,
    Poincare11,
    Poincare11A1,
    WeakPp,
    StrongPpT15,
    StrongPpT16,
    Thm31,
    ConjectureProbe,
    Classical1d,
    SliceKernelA1,
    MaxfracL21,
    Buckley,
    RdfMajorant,
    RdfNormBound,
    RdfA1Product,
}

impl InequalityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::PointwiseL12 => "pointwise_L12",
            InequalityId::Poincare11 => "poincare11",
            InequalityId::Poincare11A1 => "poincare11_A1",
            InequalityId::WeakPp => "weak_pp",
            InequalityId::StrongPpT15 => "strong_pp_T15",
            InequalityId::StrongPpT16 => "strong_pp_T16",
            InequalityId::Thm31 => "thm31",
            InequalityId::ConjectureProbe => "conjecture_probe",
            InequalityId::Classical1d => "classical_1d",
            InequalityId::SliceKernelA1 => "slice_kernel_A1",
            InequalityId::MaxfracL21 => "maxfrac_L21",
            InequalityId::Buckley => "buckley",
            InequalityId::RdfMajorant => "rdf_majorant",
            InequalityId::RdfNormBound => "rdf_norm_bound",
            InequalityId::RdfA1Product => "rdf_a1_product",
        }
    }

    pub fn parse(s: &str) -> Option<InequalityId> {
        ALL_INEQUALITIES.iter().copied().find(|id| id.as_str() == s)
    }

    /// Probes record evidence and never gate a suite. Encoded on the enum, not
    /// in configuration, so it cannot be overridden.
    pub fn is_probe(&self) -> bool {
        matches!(self, InequalityId::ConjectureProbe)
    }
}

pub const ALL_INEQUALITIES: [InequalityId; 15] = [
    InequalityId::PointwiseL12,
    InequalityId::Poincare11,
    InequalityId::Poincare11A1,
    InequalityId::WeakPp,
    InequalityId::StrongPpT15,
    InequalityId::StrongPpT16,
    InequalityId::Thm31,
    InequalityId::ConjectureProbe,
    InequalityId::Classical1d,
    InequalityId::SliceKernelA1,
    InequalityId::MaxfracL21,
    InequalityId::Buckley,
    InequalityId::RdfMajorant,
    InequalityId::RdfNormBound,
    InequalityId::RdfA1Product,
];

/// Grid geometry recorded with every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n1: usize,
    pub n2: usize,
    pub cells1: usize,
    pub cells2: usize,
    pub side1: f64,
    pub side2: f64,
}

impl From<&ProductGrid> for GridMeta {
    fn from(g: &ProductGrid) -> Self {
        GridMeta {
            n1: g.g1.cube.dim,
            n2: g.g2.cube.dim,
            cells1: g.g1.cells_per_side,
            cells2: g.g2.cells_per_side,
            side1: g.g1.cube.side,
            side2: g.g2.cube.side,
        }
    }
}

/// One verified (or probed) inequality instance. `ratio` is
/// `lhs / (geometry_factor · weight_constant^theory_exponent · rhs_core)`,
/// with 0/0 reported as ratio 0 and passing (the one-block case) and `x/0`
/// with `x > 0` reported as a failure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub inequality: InequalityId,
    pub lhs: f64,
    pub rhs_core: f64,
    pub geometry_factor: f64,
    pub weight_constant: f64,
    pub theory_exponent: f64,
    pub ratio: f64,
    pub ceiling: f64,
    pub pass: bool,
    pub probe: bool,
    pub p: Option<f64>,
    pub weight_kind: String,
    pub weight_params: String,
    pub test_fn: String,
    pub grid: GridMeta,
    pub flags: Vec<String>,
}

impl VerifyReport {
    /// Assemble ratio/pass from the raw quantities against a ceiling.
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        inequality: InequalityId,
        lhs: f64,
        rhs_core: f64,
        geometry_factor: f64,
        weight_constant: f64,
        theory_exponent: f64,
        ceiling: f64,
        grid: GridMeta,
    ) -> VerifyReport {
        let denom = geometry_factor * weight_constant.powf(theory_exponent) * rhs_core;
        let (ratio, pass, mut flags) = if lhs == 0.0 {
            (0.0, true, if denom == 0.0 { vec!["zero_over_zero".to_string()] } else { vec![] })
        } else if denom == 0.0 {
            (f64::INFINITY, false, vec!["nonzero_over_zero".to_string()])
        } else {
            let r = lhs / denom;
            (r, r.is_finite() && r <= ceiling, vec![])
        };
        let probe = inequality.is_probe();
        let pass = if probe {
            flags.push("observed".to_string());
            true
        } else {
            pass
        };
        VerifyReport {
            inequality,
            lhs,
            rhs_core,
            geometry_factor,
            weight_constant,
            theory_exponent,
            ratio,
            ceiling,
            pass,
            probe,
            p: None,
            weight_kind: String::new(),
            weight_params: String::new(),
            test_fn: String::new(),
            grid,
            flags,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_weight(mut self, w: &crate::weights::WeightSpec) -> Self {
        match w {
            crate::weights::WeightSpec::Power { a, b, c1, c2 } => {
                self.weight_kind = "power".to_string();
                self.weight_params = format!(
                    "a={};b={};c1=({} {});c2=({} {})",
                    fmt_f64(*a),
                    fmt_f64(*b),
                    fmt_f64(c1[0]),
                    fmt_f64(c1[1]),
                    fmt_f64(c2[0]),
                    fmt_f64(c2[1])
                );
            }
            crate::weights::WeightSpec::Sampled { label, .. } => {
                self.weight_kind = "sampled".to_string();
                self.weight_params = label.clone();
            }
        }
        self
    }

    pub fn with_test_fn(mut self, name: &str) -> Self {
        self.test_fn = name.to_string();
        self
    }

    pub fn push_flag(&mut self, flag: impl Into<String>) {
        self.flags.push(flag.into());
    }

    pub fn csv_header() -> &'static str {
        "inequality_id,n1,n2,N1,N2,p,weight_kind,weight_params,weight_constant,lhs,rhs_core,geometry,theory_exponent,ratio,pass"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.inequality.as_str(),
            self.grid.n1,
            self.grid.n2,
            self.grid.cells1,
            self.grid.cells2,
            self.p.map(fmt_f64).unwrap_or_default(),
            self.weight_kind,
            self.weight_params,
            fmt_f64(self.weight_constant),
            fmt_f64(self.lhs),
            fmt_f64(self.rhs_core),
            fmt_f64(self.geometry_factor),
            fmt_f64(self.theory_exponent),
            fmt_f64(self.ratio),
            self.pass
        )
    }
}

/// Deterministic shortest-round-trip float formatting for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_product_grid, Rect};

    fn meta() -> GridMeta {
        GridMeta::from(&build_product_grid(Rect::unit_square(), 4, 4).unwrap())
    }

    #[test]
    fn zero_over_zero_passes() {
        let r = VerifyReport::build(InequalityId::Poincare11, 0.0, 0.0, 1.0, 1.0, 0.0, 0.5, meta());
        assert!(r.pass);
        assert_eq!(r.ratio, 0.0);
        assert!(r.flags.iter().any(|f| f == "zero_over_zero"));
    }

    #[test]
    fn nonzero_over_zero_fails() {
        let r = VerifyReport::build(InequalityId::Poincare11, 1.0, 0.0, 1.0, 1.0, 0.0, 0.5, meta());
        assert!(!r.pass);
        assert!(r.ratio.is_infinite());
    }

    #[test]
    fn probe_never_fails() {
        let r = VerifyReport::build(InequalityId::ConjectureProbe, 10.0, 1.0, 1.0, 1.0, 0.0, 0.5, meta());
        assert!(r.pass && r.probe);
        assert!(r.ratio > r.ceiling);
    }

    #[test]
    fn csv_row_shape() {
        let r = VerifyReport::build(InequalityId::WeakPp, 0.5, 1.0, 1.0, 2.0, 1.5, 3.0, meta()).with_p(2.0);
        let row = r.to_csv_row();
        assert_eq!(row.split(',').count(), VerifyReport::csv_header().split(',').count());
        assert!(row.starts_with("weak_pp,1,1,4,4,2,"));
    }

    #[test]
    fn id_round_trip() {
        for id in ALL_INEQUALITIES {
            assert_eq!(InequalityId::parse(id.as_str()), Some(id));
        }
    }
}
