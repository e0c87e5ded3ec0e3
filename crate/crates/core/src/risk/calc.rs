use std::fmt;
use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};

use super::model::{RegisterSeed, Risk};
use super::RiskError;

/// Converts through the shortest round-trip decimal text, so `0.1` becomes exactly 0.1.
pub(crate) fn to_decimal(x: f64, what: &'static str) -> Result<Decimal, RiskError> {
    if !x.is_finite() {
        return Err(RiskError::OutOfBounds { what, value: x.to_string() });
    }
    Decimal::from_str(&format!("{x}"))
        .or_else(|_| Decimal::from_scientific(&format!("{x:e}")))
        .map_err(|_| RiskError::OutOfBounds { what, value: x.to_string() })
}

pub(crate) fn round_half_up(d: Decimal, dp: u32) -> Decimal {
    let mut r = d.round_dp_with_strategy(dp, RoundingStrategy::MidpointAwayFromZero);
    r.rescale(dp);
    r
}

fn unit_interval(d: Decimal, what: &'static str) -> Result<Decimal, RiskError> {
    if d < Decimal::ZERO || d > Decimal::ONE {
        Err(RiskError::OutOfBounds { what, value: d.to_string() })
    } else {
        Ok(d)
    }
}

/// Exact risk score: `probability × impact × value`, half-up to 3 decimals.
pub fn risk_score(probability: Decimal, impact: Decimal, value: u8) -> Result<Decimal, RiskError> {
    unit_interval(probability, "probability")?;
    unit_interval(impact, "impact")?;
    if !(1..=5).contains(&value) {
        return Err(RiskError::OutOfBounds {
            what: "value",
            value: value.to_string(),
        });
    }
    Ok(round_half_up(probability * impact * Decimal::from(value), 3))
}

/// `probability × impact × value`, rounded half-up to 3 decimals; result in `[0, 5]`.
///
/// The product form is a configuration point: it is zero when any input is zero
/// and nondecreasing in each argument.
pub fn calculate_risk(probability: f64, impact: f64, value: u8) -> Result<f64, RiskError> {
    let p = to_decimal(probability, "probability")?;
    let i = to_decimal(impact, "impact")?;
    let score = risk_score(p, i, value)?;
    Ok(score.try_into().expect("score fits in f64"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Band {
    Low,
    Medium,
    High,
    Critical,
}

impl Band {
    pub const ALL: [Band; 4] = [Band::Low, Band::Medium, Band::High, Band::Critical];

    pub fn as_str(self) -> &'static str {
        match self {
            Band::Low => "low",
            Band::Medium => "medium",
            Band::High => "high",
            Band::Critical => "critical",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bands: low `[0,1)`, medium `[1,2.5)`, high `[2.5,4)`, critical `[4,5]`.
pub fn band_of(risk_value: Decimal) -> Result<Band, RiskError> {
    let v = risk_value;
    if v < Decimal::ZERO || v > Decimal::from(5) {
        return Err(RiskError::OutOfBounds {
            what: "risk value",
            value: v.to_string(),
        });
    }
    Ok(if v < Decimal::ONE {
        Band::Low
    } else if v < Decimal::new(25, 1) {
        Band::Medium
    } else if v < Decimal::from(4) {
        Band::High
    } else {
        Band::Critical
    })
}

pub fn assess_band(risk_value: f64) -> Result<Band, RiskError> {
    band_of(to_decimal(risk_value, "risk value")?)
}

/// One risk per vulnerability: probability from the threat, impact from the
/// severity, value from the asset. Output follows vulnerability order.
pub fn identify_risks(seed: &RegisterSeed) -> Vec<Risk> {
    seed.vulnerabilities
        .iter()
        .map(|v| {
            let asset = seed.asset(&v.asset_id).expect("vulnerability references a known asset");
            let threat = seed.threat(&v.threat_id).expect("vulnerability references a known threat");
            let risk_value = risk_score(threat.probability, v.severity, asset.value)
                .expect("ingested values are within bounds");
            Risk {
                vulnerability: v.clone(),
                probability: threat.probability,
                impact: v.severity,
                value: asset.value,
                risk_value,
            }
        })
        .collect()
}
