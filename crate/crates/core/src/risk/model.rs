use rust_decimal::Decimal;

use super::taxonomy::{AssetCategory, ThreatCategory, VulnerabilityCategory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Asset {
    pub id: String,
    pub name: String,
    pub category: AssetCategory,
    /// 1 (lowest) to 5.
    pub value: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threat {
    pub id: String,
    pub name: String,
    pub category: ThreatCategory,
    /// In `[0, 1]`.
    pub probability: Decimal,
}

/// An asset exposed to a threat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vulnerability {
    pub asset_id: String,
    pub threat_id: String,
    pub category: VulnerabilityCategory,
    /// In `[0, 1]`; used as the risk's impact.
    pub severity: Decimal,
}

impl Vulnerability {
    /// `asset_id/threat_id`
    pub fn id(&self) -> String {
        format!("{}/{}", self.asset_id, self.threat_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Risk {
    pub vulnerability: Vulnerability,
    pub probability: Decimal,
    pub impact: Decimal,
    pub value: u8,
    /// `probability × impact × value`, rounded half-up to 3 decimals.
    pub risk_value: Decimal,
}

impl Risk {
    pub fn id(&self) -> String {
        self.vulnerability.id()
    }
}

/// Validated inputs before risks are scored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegisterSeed {
    pub assets: Vec<Asset>,
    pub threats: Vec<Threat>,
    pub vulnerabilities: Vec<Vulnerability>,
}

impl RegisterSeed {
    pub fn asset(&self, id: &str) -> Option<&Asset> {
        self.assets.iter().find(|a| a.id == id)
    }

    pub fn threat(&self, id: &str) -> Option<&Threat> {
        self.threats.iter().find(|t| t.id == id)
    }
}

/// Assets, threats, vulnerabilities and their scored risks, with risks sorted by
/// descending value then ascending vulnerability id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RiskRegister {
    pub assets: Vec<Asset>,
    pub threats: Vec<Threat>,
    pub vulnerabilities: Vec<Vulnerability>,
    pub risks: Vec<Risk>,
}

impl RiskRegister {
    pub fn from_seed(seed: RegisterSeed) -> Self {
        let mut risks = super::identify_risks(&seed);
        sort_risks(&mut risks);
        Self {
            assets: seed.assets,
            threats: seed.threats,
            vulnerabilities: seed.vulnerabilities,
            risks,
        }
    }
}

pub(crate) fn sort_risks(risks: &mut [Risk]) {
    risks.sort_by(|a, b| b.risk_value.cmp(&a.risk_value).then_with(|| a.id().cmp(&b.id())));
}
