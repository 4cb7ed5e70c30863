//! CSV and JSON rendering of result tables. Output is a pure function of the
//! table, so identical inputs give identical bytes.

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticReport;
use crate::error::{Error, Result};
use crate::float_serde;
use crate::ldp::RatePoint;
use crate::mc_sim::Estimate;
use crate::ruin::{DecayFit, RuinRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub point: RatePoint,
    pub mc: Option<Estimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub replicate: u64,
    #[serde(with = "float_serde::float")]
    pub max: f64,
    #[serde(with = "float_serde::float")]
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistRow {
    #[serde(with = "float_serde::float")]
    pub x: f64,
    #[serde(with = "float_serde::float")]
    pub value: f64,
}

/// Everything a command can print.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Table {
    Rate {
        model: String,
        set: String,
        rows: Vec<RateRow>,
    },
    Ruin {
        model: String,
        beta: f64,
        rows: Vec<RuinRow>,
        summary: Option<DecayFit>,
    },
    Diagnostic {
        model: String,
        report: DiagnosticReport,
    },
    Sample {
        model: String,
        n: u64,
        rows: Vec<SampleRow>,
    },
    Dist {
        model: String,
        eval: String,
        rows: Vec<DistRow>,
    },
}

/// 17 significant digits; infinities as `inf` / `-inf`.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn csv_header_and_rows(table: &Table) -> (Vec<String>, Vec<Vec<String>>) {
    let s = |names: &[&str]| names.iter().map(|n| n.to_string()).collect::<Vec<_>>();
    match table {
        Table::Rate { rows, .. } => {
            let with_mc = rows.iter().any(|r| r.mc.is_some());
            let mut header = s(&["n", "prob", "r_n", "target", "gap"]);
            if with_mc {
                header.extend(s(&["p_hat", "mc_stderr", "ci_low", "ci_high"]));
            }
            let body = rows
                .iter()
                .map(|r| {
                    let p = &r.point;
                    let mut rec = vec![
                        p.n.to_string(),
                        fmt_float(p.prob),
                        fmt_float(p.r_n),
                        fmt_float(p.target),
                        fmt_float(p.gap),
                    ];
                    if with_mc {
                        rec.extend([
                            fmt_opt(r.mc.map(|e| e.p_hat)),
                            fmt_opt(r.mc.map(|e| e.stderr)),
                            fmt_opt(r.mc.map(|e| e.ci_low)),
                            fmt_opt(r.mc.map(|e| e.ci_high)),
                        ]);
                    }
                    rec
                })
                .collect();
            (header, body)
        }
        Table::Ruin { rows, .. } => (
            s(&["n", "premium", "rp_exact", "rp_mc", "ci_low", "ci_high"]),
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_float(r.premium),
                        fmt_float(r.rp_exact),
                        fmt_opt(r.rp_mc),
                        fmt_opt(r.ci_low),
                        fmt_opt(r.ci_high),
                    ]
                })
                .collect(),
        ),
        Table::Diagnostic { report, .. } => {
            let mut header = report.axes.clone();
            header.extend(s(&["value", "violated_bound"]));
            let body = report
                .grid
                .iter()
                .zip(&report.values)
                .map(|(point, value)| {
                    let bound = report
                        .violations
                        .iter()
                        .find(|v| &v.point == point)
                        .map(|v| v.bound);
                    let mut rec: Vec<String> = point.iter().map(|c| fmt_float(*c)).collect();
                    rec.push(fmt_float(*value));
                    rec.push(fmt_opt(bound));
                    rec
                })
                .collect();
            (header, body)
        }
        Table::Sample { rows, .. } => (
            s(&["replicate", "max", "z"]),
            rows.iter()
                .map(|r| vec![r.replicate.to_string(), fmt_float(r.max), fmt_float(r.z)])
                .collect(),
        ),
        Table::Dist { rows, .. } => (
            s(&["x", "value"]),
            rows.iter()
                .map(|r| vec![fmt_float(r.x), fmt_float(r.value)])
                .collect(),
        ),
    }
}

fn to_csv(table: &Table) -> Result<String> {
    let (header, rows) = csv_header_and_rows(table);
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn emit_table(table: &Table, format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(table),
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(table).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Reads back a table written by [`emit_table`] in JSON mode.
pub fn parse_table_json(text: &str) -> Result<Table> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.column(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldp::{self, BorelSubset};
    use crate::tail_models::TailModel;

    fn rate_table(rows: Vec<RateRow>) -> Table {
        Table::Rate {
            model: "pareto:alpha=1,xm=1".into(),
            set: "(e,inf)".into(),
            rows,
        }
    }

    #[test]
    fn empty_rows_header_only() {
        let csv = emit_table(&rate_table(vec![]), Format::Csv).unwrap();
        assert_eq!(csv, "n,prob,r_n,target,gap\n");
        let ruin = Table::Ruin {
            model: "m".into(),
            beta: 1.0,
            rows: vec![],
            summary: None,
        };
        assert_eq!(
            emit_table(&ruin, Format::Csv).unwrap(),
            "n,premium,rp_exact,rp_mc,ci_low,ci_high\n"
        );
    }

    #[test]
    fn one_rate_row_in_declared_order() {
        let m = TailModel::pareto(1.0, 1.0).unwrap();
        let p =
            ldp::normalized_log_prob(&m, 100, &BorelSubset::above(std::f64::consts::E).unwrap())
                .unwrap();
        let csv = emit_table(
            &rate_table(vec![RateRow { point: p, mc: None }]),
            Format::Csv,
        )
        .unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[0], "100");
        assert!(fields[1].starts_with("9.95066130862"), "{}", fields[1]);
        assert!(fields[2].starts_with("-1.00107402781"), "{}", fields[2]);
        assert_eq!(fields[3], "-1.0000000000000000e0");
        assert!(fields[4].starts_with("-1.07402781"), "{}", fields[4]);
        // 17 significant digits
        assert_eq!(
            fields[1]
                .split('e')
                .next()
                .unwrap()
                .replace(['.', '-'], "")
                .len(),
            17
        );
    }

    #[test]
    fn null_set_prints_sentinels() {
        let m = TailModel::pareto(1.0, 1.0).unwrap();
        let a = BorelSubset::single(ldp::Interval::point(2.0)).unwrap();
        let p = ldp::normalized_log_prob(&m, 100, &a).unwrap();
        let t = rate_table(vec![RateRow { point: p, mc: None }]);
        let csv = emit_table(&t, Format::Csv).unwrap();
        assert!(csv.contains(",-inf,-inf,"), "{csv}");
        assert!(!csv.contains("NaN") && !csv.to_lowercase().contains("nan"));
        let json = emit_table(&t, Format::Json).unwrap();
        assert!(json.contains("\"-inf\"") && !json.contains("null,"));
        assert_eq!(parse_table_json(&json).unwrap(), t);
    }

    #[test]
    fn json_round_trip() {
        let m = TailModel::burr(1.0, 2.0).unwrap();
        let a = BorelSubset::above(1.3).unwrap();
        let rows = [10u64, 1000]
            .iter()
            .map(|&n| RateRow {
                point: ldp::normalized_log_prob(&m, n, &a).unwrap(),
                mc: Some(Estimate::from_counts(3, 1000)),
            })
            .collect();
        let t = rate_table(rows);
        let json = emit_table(&t, Format::Json).unwrap();
        assert_eq!(parse_table_json(&json).unwrap(), t);
        assert_eq!(emit_table(&t, Format::Json).unwrap(), json);
    }
}
