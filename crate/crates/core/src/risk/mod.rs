//! Risk-analysis payload: assets and threats with fixed taxonomies, derived
//! vulnerabilities, scored risks and treatment plans.
//!
//! Scores are `probability × impact × value` computed in decimal arithmetic,
//! where probability comes from the threat, impact from the vulnerability
//! severity and value from the asset.

mod calc;
mod ingest;
mod model;
mod plan;
mod report;
mod taxonomy;

pub use calc::{assess_band, band_of, calculate_risk, identify_risks, risk_score, Band};
pub use ingest::{
    derive_vulnerabilities, load_registers, parse_assets, parse_matrix, parse_threats, MatrixRow,
    RowDiagnostic, ASSET_COLUMNS, MATRIX_COLUMNS, THREAT_COLUMNS,
};
pub use model::{Asset, RegisterSeed, Risk, RiskRegister, Threat, Vulnerability};
pub use plan::{build_plan, Action, PlanEntry, TreatmentPlan, DEFAULT_TREAT_THRESHOLD};
pub use report::{render_register, REGISTER_COLUMNS};
pub use rust_decimal::Decimal;
pub use taxonomy::{AssetCategory, ThreatCategory, VulnerabilityCategory};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RiskError {
    #[error("{what} {value} is out of bounds")]
    OutOfBounds { what: &'static str, value: String },
    #[error("matrix row {row} references unknown id `{id}`")]
    DanglingReference { row: usize, id: String },
    #[error("unit cost {0} is negative")]
    NegativeUnitCost(String),
}
