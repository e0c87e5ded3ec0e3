use std::fmt;

use rust_decimal::Decimal;

use super::calc::{band_of, round_half_up, Band};
use super::model::Risk;
use super::RiskError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Retain,
    Treat,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Retain => "retain",
            Action::Treat => "treat",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEntry {
    pub risk: Risk,
    pub band: Band,
    pub action: Action,
    /// Money, two decimals.
    pub mitigation_cost: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreatmentPlan {
    pub entries: Vec<PlanEntry>,
    pub total_budget: Decimal,
}

impl TreatmentPlan {
    pub fn count(&self, band: Band) -> usize {
        self.entries.iter().filter(|e| e.band == band).count()
    }
}

pub const DEFAULT_TREAT_THRESHOLD: Decimal = Decimal::from_parts(20, 0, 0, false, 1);

/// Treats every risk at or above `treat_threshold`, costing `unit_cost × risk_value`
/// (half-up to cents); the rest are retained at no cost. Entries keep the input order.
pub fn build_plan(risks: &[Risk], treat_threshold: Decimal, unit_cost: Decimal) -> Result<TreatmentPlan, RiskError> {
    if unit_cost < Decimal::ZERO {
        return Err(RiskError::NegativeUnitCost(unit_cost.to_string()));
    }
    let mut entries = Vec::with_capacity(risks.len());
    let mut total = round_half_up(Decimal::ZERO, 2);
    for risk in risks {
        let band = band_of(risk.risk_value)?;
        let (action, cost) = if risk.risk_value >= treat_threshold {
            (Action::Treat, round_half_up(unit_cost * risk.risk_value, 2))
        } else {
            (Action::Retain, round_half_up(Decimal::ZERO, 2))
        };
        total += cost;
        entries.push(PlanEntry {
            risk: risk.clone(),
            band,
            action,
            mitigation_cost: cost,
        });
    }
    Ok(TreatmentPlan {
        entries,
        total_budget: total,
    })
}
