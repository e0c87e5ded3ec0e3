use std::fmt::Write;

use rust_decimal::Decimal;

use super::calc::{round_half_up, Band};
use super::plan::TreatmentPlan;

pub const REGISTER_COLUMNS: [&str; 11] = [
    "vuln_id",
    "asset_id",
    "threat_id",
    "vuln_category",
    "probability",
    "impact",
    "value",
    "risk_value",
    "band",
    "action",
    "mitigation_cost",
];

fn fixed(d: Decimal, dp: u32) -> String {
    round_half_up(d, dp).to_string()
}

/// `register.out.tsv`: one row per plan entry, then a `#`-prefixed summary with
/// the count per band and the total budget.
pub fn render_register(plan: &TreatmentPlan) -> String {
    let mut out = REGISTER_COLUMNS.join("\t");
    out.push('\n');
    for e in &plan.entries {
        let r = &e.risk;
        let v = &r.vulnerability;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            v.id(),
            v.asset_id,
            v.threat_id,
            v.category,
            r.probability.normalize(),
            r.impact.normalize(),
            r.value,
            fixed(r.risk_value, 3),
            e.band,
            e.action,
            fixed(e.mitigation_cost, 2),
        )
        .unwrap();
    }
    out.push_str("# summary\n");
    for band in Band::ALL {
        writeln!(out, "# {band}\t{}", plan.count(band)).unwrap();
    }
    writeln!(out, "# total_budget\t{}", fixed(plan.total_budget, 2)).unwrap();
    out
}
