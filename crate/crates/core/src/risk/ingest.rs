//! TSV ingestion: UTF-8, tab-delimited, header row first, no quoting.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;

use super::model::{Asset, RegisterSeed, Threat, Vulnerability};
use super::taxonomy::{AssetCategory, ThreatCategory, VulnerabilityCategory};
use super::RiskError;
use crate::dsl::Severity;

pub const ASSET_COLUMNS: [&str; 4] = ["id", "name", "category", "value"];
pub const THREAT_COLUMNS: [&str; 4] = ["id", "name", "category", "probability"];
pub const MATRIX_COLUMNS: [&str; 4] = ["asset_id", "threat_id", "vuln_category", "severity"];

/// A problem tied to one row (1-based line, header is row 1) and column of an input table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDiagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub table: &'static str,
    pub row: usize,
    pub column: String,
    pub message: String,
}

impl RowDiagnostic {
    fn error(code: &'static str, table: &'static str, row: usize, column: &str, message: String) -> Self {
        Self {
            severity: Severity::Error,
            code,
            table,
            row,
            column: column.to_owned(),
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}:{} column `{}`: {}",
            self.severity, self.code, self.table, self.row, self.column, self.message
        )
    }
}

/// One matrix row after parsing; references are not yet resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRow {
    pub row: usize,
    pub asset_id: String,
    pub threat_id: String,
    pub category: VulnerabilityCategory,
    pub severity: Decimal,
}

struct Table<'a> {
    name: &'static str,
    rows: Vec<(usize, HashMap<&'static str, &'a str>)>,
}

fn read_table<'a>(
    name: &'static str,
    text: &'a str,
    columns: &[&'static str],
    diags: &mut Vec<RowDiagnostic>,
) -> Table<'a> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let mut table = Table { name, rows: Vec::new() };
    let Some((_, header)) = lines.next() else {
        diags.push(RowDiagnostic::error(
            "MissingHeader",
            name,
            1,
            "",
            format!("expected header `{}`", columns.join("\\t")),
        ));
        return table;
    };
    let found: Vec<&str> = header.split('\t').map(str::trim).collect();
    if found != columns {
        diags.push(RowDiagnostic::error(
            "BadHeader",
            name,
            1,
            "",
            format!("expected header `{}`, found `{}`", columns.join("\\t"), found.join("\\t")),
        ));
        return table;
    }
    for (row, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != columns.len() {
            diags.push(RowDiagnostic::error(
                "ColumnCount",
                name,
                row,
                "",
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
            continue;
        }
        table
            .rows
            .push((row, columns.iter().copied().zip(fields).collect()));
    }
    table
}

fn nonempty<'a>(t: &Table<'_>, row: usize, fields: &HashMap<&str, &'a str>, col: &'static str, diags: &mut Vec<RowDiagnostic>) -> Option<&'a str> {
    let v = fields[col];
    if v.is_empty() {
        diags.push(RowDiagnostic::error("EmptyField", t.name, row, col, "value is required".into()));
        None
    } else {
        Some(v)
    }
}

fn category<C: FromStr<Err = String>>(t: &Table<'_>, row: usize, fields: &HashMap<&str, &str>, col: &'static str, diags: &mut Vec<RowDiagnostic>) -> Option<C> {
    match fields[col].parse::<C>() {
        Ok(c) => Some(c),
        Err(msg) => {
            diags.push(RowDiagnostic::error("UnknownCategory", t.name, row, col, msg));
            None
        }
    }
}

fn unit_decimal(t: &Table<'_>, row: usize, fields: &HashMap<&str, &str>, col: &'static str, diags: &mut Vec<RowDiagnostic>) -> Option<Decimal> {
    let raw = fields[col];
    match Decimal::from_str(raw) {
        Ok(d) if d >= Decimal::ZERO && d <= Decimal::ONE => Some(d.normalize()),
        Ok(_) => {
            diags.push(RowDiagnostic::error(
                "ValueOutOfRange",
                t.name,
                row,
                col,
                format!("{raw} is outside [0, 1]"),
            ));
            None
        }
        Err(_) => {
            diags.push(RowDiagnostic::error("InvalidNumber", t.name, row, col, format!("`{raw}` is not a number")));
            None
        }
    }
}

fn unique_id(t: &Table<'_>, row: usize, id: &str, seen: &mut BTreeSet<String>, diags: &mut Vec<RowDiagnostic>) -> bool {
    if seen.insert(id.to_owned()) {
        true
    } else {
        diags.push(RowDiagnostic::error("DuplicateId", t.name, row, "id", format!("id `{id}` appears more than once")));
        false
    }
}

pub fn parse_assets(text: &str, diags: &mut Vec<RowDiagnostic>) -> Vec<Asset> {
    let t = read_table("assets.tsv", text, &ASSET_COLUMNS, diags);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (row, f) in &t.rows {
        let row = *row;
        let id = nonempty(&t, row, f, "id", diags);
        let name = f["name"];
        let category = category::<AssetCategory>(&t, row, f, "category", diags);
        let raw = f["value"];
        let value = match raw.parse::<i64>() {
            Ok(v) if (1..=5).contains(&v) => Some(v as u8),
            Ok(_) => {
                diags.push(RowDiagnostic::error(
                    "ValueOutOfRange",
                    t.name,
                    row,
                    "value",
                    format!("asset value {raw} is outside 1..=5"),
                ));
                None
            }
            Err(_) => {
                diags.push(RowDiagnostic::error("InvalidNumber", t.name, row, "value", format!("`{raw}` is not an integer")));
                None
            }
        };
        if let (Some(id), Some(category), Some(value)) = (id, category, value) {
            if unique_id(&t, row, id, &mut seen, diags) {
                out.push(Asset {
                    id: id.to_owned(),
                    name: name.to_owned(),
                    category,
                    value,
                });
            }
        }
    }
    out
}

pub fn parse_threats(text: &str, diags: &mut Vec<RowDiagnostic>) -> Vec<Threat> {
    let t = read_table("threats.tsv", text, &THREAT_COLUMNS, diags);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (row, f) in &t.rows {
        let row = *row;
        let id = nonempty(&t, row, f, "id", diags);
        let category = category::<ThreatCategory>(&t, row, f, "category", diags);
        let probability = unit_decimal(&t, row, f, "probability", diags);
        if let (Some(id), Some(category), Some(probability)) = (id, category, probability) {
            if unique_id(&t, row, id, &mut seen, diags) {
                out.push(Threat {
                    id: id.to_owned(),
                    name: f["name"].to_owned(),
                    category,
                    probability,
                });
            }
        }
    }
    out
}

pub fn parse_matrix(text: &str, diags: &mut Vec<RowDiagnostic>) -> Vec<MatrixRow> {
    let t = read_table("matrix.tsv", text, &MATRIX_COLUMNS, diags);
    let mut out = Vec::new();
    for (row, f) in &t.rows {
        let row = *row;
        let asset = nonempty(&t, row, f, "asset_id", diags);
        let threat = nonempty(&t, row, f, "threat_id", diags);
        let category = category::<VulnerabilityCategory>(&t, row, f, "vuln_category", diags);
        let severity = unit_decimal(&t, row, f, "severity", diags);
        if let (Some(a), Some(th), Some(category), Some(severity)) = (asset, threat, category, severity) {
            out.push(MatrixRow {
                row,
                asset_id: a.to_owned(),
                threat_id: th.to_owned(),
                category,
                severity,
            });
        }
    }
    out
}

/// Exactly the matrix-listed (asset, threat) pairs, first occurrence wins;
/// later duplicates produce a warning.
pub fn derive_vulnerabilities(
    assets: &[Asset],
    threats: &[Threat],
    matrix: &[MatrixRow],
) -> Result<(Vec<Vulnerability>, Vec<RowDiagnostic>), RiskError> {
    let asset_ids: BTreeSet<&str> = assets.iter().map(|a| a.id.as_str()).collect();
    let threat_ids: BTreeSet<&str> = threats.iter().map(|t| t.id.as_str()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for m in matrix {
        if !asset_ids.contains(m.asset_id.as_str()) {
            return Err(RiskError::DanglingReference {
                row: m.row,
                id: m.asset_id.clone(),
            });
        }
        if !threat_ids.contains(m.threat_id.as_str()) {
            return Err(RiskError::DanglingReference {
                row: m.row,
                id: m.threat_id.clone(),
            });
        }
        if !seen.insert((m.asset_id.as_str(), m.threat_id.as_str())) {
            warnings.push(RowDiagnostic {
                severity: Severity::Warning,
                code: "DuplicatePair",
                table: "matrix.tsv",
                row: m.row,
                column: "asset_id".into(),
                message: format!("pair {}/{} already listed; row ignored", m.asset_id, m.threat_id),
            });
            continue;
        }
        out.push(Vulnerability {
            asset_id: m.asset_id.clone(),
            threat_id: m.threat_id.clone(),
            category: m.category,
            severity: m.severity,
        });
    }
    Ok((out, warnings))
}

/// Parses and cross-checks the three tables. A seed is returned exactly when
/// no error-severity diagnostic was produced.
pub fn load_registers(assets: &str, threats: &str, matrix: &str) -> (Option<RegisterSeed>, Vec<RowDiagnostic>) {
    let mut diags = Vec::new();
    let assets = parse_assets(assets, &mut diags);
    let threats = parse_threats(threats, &mut diags);
    let rows = parse_matrix(matrix, &mut diags);

    let asset_ids: BTreeSet<&str> = assets.iter().map(|a| a.id.as_str()).collect();
    let threat_ids: BTreeSet<&str> = threats.iter().map(|t| t.id.as_str()).collect();
    let mut resolved = Vec::new();
    for m in rows {
        let mut ok = true;
        if !asset_ids.contains(m.asset_id.as_str()) {
            diags.push(RowDiagnostic::error(
                "DanglingReference",
                "matrix.tsv",
                m.row,
                "asset_id",
                format!("unknown asset `{}`", m.asset_id),
            ));
            ok = false;
        }
        if !threat_ids.contains(m.threat_id.as_str()) {
            diags.push(RowDiagnostic::error(
                "DanglingReference",
                "matrix.tsv",
                m.row,
                "threat_id",
                format!("unknown threat `{}`", m.threat_id),
            ));
            ok = false;
        }
        if ok {
            resolved.push(m);
        }
    }

    let (vulnerabilities, warnings) =
        derive_vulnerabilities(&assets, &threats, &resolved).expect("references resolved above");
    diags.extend(warnings);

    if diags.iter().any(RowDiagnostic::is_error) {
        (None, diags)
    } else {
        (
            Some(RegisterSeed {
                assets,
                threats,
                vulnerabilities,
            }),
            diags,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ASSETS: &str = "id\tname\tcategory\tvalue\na1\tMail server\tServers\t4\na2\tLaptops\tComputers\t2\n";
    const THREATS: &str = "id\tname\tcategory\tprobability\nth1\tFlood\tNatural\t0.1\nth2\tPhishing\tIntentional\t0.6\n";
    const MATRIX: &str = "asset_id\tthreat_id\tvuln_category\tseverity\na1\tth1\tPhysical\t0.9\na1\tth2\tHuman\t0.5\na2\tth1\tNatural\t0.3\na2\tth2\tHuman\t0.7\n";

    #[test]
    fn two_by_two() {
        let (seed, diags) = load_registers(ASSETS, THREATS, MATRIX);
        assert!(diags.is_empty(), "{diags:?}");
        let seed = seed.unwrap();
        assert_eq!(seed.assets.len(), 2);
        assert_eq!(seed.threats.len(), 2);
        assert_eq!(seed.vulnerabilities.len(), 4);
    }

    #[test]
    fn asset_value_out_of_range() {
        let assets = "id\tname\tcategory\tvalue\na1\tX\tServers\t7\n";
        let (seed, diags) = load_registers(assets, THREATS, "asset_id\tthreat_id\tvuln_category\tseverity\n");
        assert!(seed.is_none());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "ValueOutOfRange");
        assert_eq!(diags[0].row, 2);
        assert_eq!(diags[0].column, "value");
        assert_eq!(
            diags[0].to_string(),
            "error[ValueOutOfRange] assets.tsv:2 column `value`: asset value 7 is outside 1..=5"
        );
    }

    #[test]
    fn unknown_threat_category() {
        let threats = "id\tname\tcategory\tprobability\nth1\tStorm\tWeather\t0.2\n";
        let (seed, diags) = load_registers(ASSETS, threats, "asset_id\tthreat_id\tvuln_category\tseverity\n");
        assert!(seed.is_none());
        assert_eq!(diags[0].code, "UnknownCategory");
        assert_eq!(diags[0].column, "category");
    }

    #[test]
    fn structural_table_errors() {
        let mut d = Vec::new();
        assert!(parse_assets("", &mut d).is_empty());
        assert!(parse_assets("id\tname\n", &mut d).is_empty());
        assert!(parse_assets("id\tname\tcategory\tvalue\na\tb\n", &mut d).is_empty());
        let codes: Vec<_> = d.iter().map(|d| d.code).collect();
        assert_eq!(codes, ["MissingHeader", "BadHeader", "ColumnCount"]);
    }

    #[test]
    fn dangling_and_duplicates() {
        let matrix = "asset_id\tthreat_id\tvuln_category\tseverity\na9\tth1\tPhysical\t0.9\na1\tth1\tPhysical\t0.9\na1\tth1\tHuman\t0.2\n";
        let (seed, diags) = load_registers(ASSETS, THREATS, matrix);
        assert!(seed.is_none());
        assert_eq!(diags[0].code, "DanglingReference");
        assert_eq!(diags[1].code, "DuplicatePair");
        assert!(!diags[1].is_error());
    }

    #[test]
    fn derive_cases() {
        let mut d = Vec::new();
        let assets = parse_assets(ASSETS, &mut d);
        let threats = parse_threats(THREATS, &mut d);
        let (v, w) = derive_vulnerabilities(&assets, &threats, &[]).unwrap();
        assert!(v.is_empty() && w.is_empty());

        let rows = parse_matrix(MATRIX, &mut d);
        let mut doubled = rows.clone();
        doubled.push(rows[0].clone());
        let (v, w) = derive_vulnerabilities(&assets, &threats, &doubled).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(w.len(), 1);

        let mut bad = rows[0].clone();
        bad.threat_id = "nope".into();
        assert!(matches!(
            derive_vulnerabilities(&assets, &threats, &[bad]),
            Err(RiskError::DanglingReference { .. })
        ));
    }
}
