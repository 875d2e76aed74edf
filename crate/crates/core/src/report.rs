//! CSV and JSON report files.
//!
//! ```text
//! op_table.csv          project,<M>,<M>_exact,...   3-decimal OP + exact num/den, final "avg." row
//! per_pair.csv          project,metric,pair_id,provenance,relation,preserved,repetitions
//! change_rates.csv      project,<M>,...             "+14%", "NA" where the baseline OP is 0
//! stats_matrix.csv      effect size \ p,<M>,...     p above the diagonal, delta below, "-" on it
//! overlap_regions.csv   <M>,...,count               one row per membership combination
//! consideration.csv     fault_id,<M>,...            share of repetitions preserving the fault's pair
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num::{BigInt, BigRational, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{create_dir, write_rows};
use crate::run::{op_rational, Baseline, ChangeRateTable, Evaluation, OpTable, OverlapOutcome};
use crate::stats::{format_delta, parse_decimal, StatsReport};

pub const OP_TABLE_FILE: &str = "op_table.csv";
pub const PER_PAIR_FILE: &str = "per_pair.csv";
pub const CHANGE_RATES_FILE: &str = "change_rates.csv";
pub const RUN_CONFIG_FILE: &str = "run_config.json";
pub const STATS_MATRIX_FILE: &str = "stats_matrix.csv";
pub const STATS_JSON_FILE: &str = "stats.json";
pub const OVERLAP_REGIONS_FILE: &str = "overlap_regions.csv";
pub const CONSIDERATION_FILE: &str = "consideration.csv";

pub const AVG_ROW: &str = "avg.";
const EXACT_SUFFIX: &str = "_exact";

/// Decimal rendering of an exact value, rounded half away from zero.
pub fn format_rational(value: &BigRational, places: usize) -> String {
    let scale = num::pow(BigInt::from(10), places);
    let scaled = (value * BigRational::from_integer(scale.clone())).round().to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let abs = scaled.abs();
    let int = &abs / &scale;
    let frac = &abs % &scale;
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac:0>places$}")
    }
}

fn fraction_text(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn write_op_table(path: &Path, table: &OpTable) -> Result<()> {
    let mut header = vec!["project".to_string()];
    for m in &table.metrics {
        header.push(m.name().to_string());
        header.push(format!("{}{EXACT_SUFFIX}", m.name()));
    }
    let mut rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![row.project.clone()];
            for r in &row.reports {
                let op = op_rational(r);
                cells.push(format_rational(&op, 3));
                cells.push(fraction_text(&op));
            }
            cells
        })
        .collect();
    if !table.rows.is_empty() {
        let mut avg = vec![AVG_ROW.to_string()];
        for j in 0..table.metrics.len() {
            let value = table.average(j).expect("non-empty table");
            avg.push(format_rational(&value, 3));
            avg.push(fraction_text(&value));
        }
        rows.push(avg);
    }
    write_rows(path, &header, rows)
}

pub fn write_per_pair(path: &Path, table: &OpTable) -> Result<()> {
    let header: Vec<String> = ["project", "metric", "pair_id", "provenance", "relation", "preserved", "repetitions"]
        .map(String::from)
        .to_vec();
    let rows = table.rows.iter().flat_map(|row| {
        row.reports.iter().flat_map(move |r| {
            r.per_pair.iter().map(move |o| {
                vec![
                    row.project.clone(),
                    r.metric.name().to_string(),
                    o.pair_id.clone(),
                    o.provenance.to_string(),
                    o.relation.to_string(),
                    o.preserved.to_string(),
                    r.repetitions.to_string(),
                ]
            })
        })
    });
    write_rows(path, &header, rows)
}

fn rate_cell(rate: &Option<crate::stats::ChangeRate>) -> String {
    rate.map_or_else(|| "NA".to_string(), |r| r.to_string())
}

pub fn write_change_rates(path: &Path, rates: &ChangeRateTable) -> Result<()> {
    let header: Vec<String> = std::iter::once("project".to_string())
        .chain(rates.metrics.iter().map(|m| m.name().to_string()))
        .collect();
    let mut rows: Vec<Vec<String>> = rates
        .rows
        .iter()
        .map(|(project, cells)| std::iter::once(project.clone()).chain(cells.iter().map(rate_cell)).collect())
        .collect();
    if !rates.rows.is_empty() {
        rows.push(std::iter::once(AVG_ROW.to_string()).chain(rates.average.iter().map(rate_cell)).collect());
    }
    write_rows(path, &header, rows)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// The configuration record written next to every evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub inputs: T,
    pub config: &'a crate::run::RunConfig,
}

/// Writes `op_table.csv`, `per_pair.csv`, `run_config.json` and, when present,
/// `change_rates.csv` into `dir`.
pub fn write_evaluation<T: Serialize>(dir: &Path, evaluation: &Evaluation, inputs: T) -> Result<()> {
    create_dir(dir)?;
    write_op_table(&dir.join(OP_TABLE_FILE), &evaluation.table)?;
    write_per_pair(&dir.join(PER_PAIR_FILE), &evaluation.table)?;
    if let Some(rates) = &evaluation.change_rates {
        write_change_rates(&dir.join(CHANGE_RATES_FILE), rates)?;
    }
    write_json(
        &dir.join(RUN_CONFIG_FILE),
        &RunRecord {
            tool: "assent",
            version: env!("CARGO_PKG_VERSION"),
            inputs,
            config: &evaluation.config,
        },
    )
}

/// Table-4 layout: p-values above the diagonal, Cliff's delta below.
pub fn write_stats(dir: &Path, report: &StatsReport) -> Result<()> {
    create_dir(dir)?;
    let header: Vec<String> = std::iter::once("effect size \\ p".to_string())
        .chain(report.metrics.iter().cloned())
        .collect();
    let k = report.metrics.len();
    let rows = (0..k).map(|i| {
        std::iter::once(report.metrics[i].clone())
            .chain((0..k).map(move |j| {
                if i == j {
                    "-".to_string()
                } else if i < j {
                    format!("{:.3}", report.p_values[i][j].expect("upper triangle"))
                } else {
                    format_delta(report.deltas[i][j].expect("lower triangle"))
                }
            }))
            .collect::<Vec<_>>()
    });
    write_rows(&dir.join(STATS_MATRIX_FILE), &header, rows)?;
    write_json(&dir.join(STATS_JSON_FILE), report)
}

pub fn write_overlap(dir: &Path, outcome: &OverlapOutcome) -> Result<()> {
    create_dir(dir)?;
    let report = &outcome.report;
    let header: Vec<String> = report.metrics.iter().cloned().chain(["count".to_string()]).collect();
    write_rows(
        &dir.join(OVERLAP_REGIONS_FILE),
        &header,
        report.regions.iter().map(|r| {
            r.members
                .iter()
                .map(|&m| if m { "1" } else { "0" }.to_string())
                .chain([r.count.to_string()])
                .collect::<Vec<_>>()
        }),
    )?;
    let header: Vec<String> = std::iter::once("fault_id".to_string())
        .chain(report.metrics.iter().cloned())
        .collect();
    let faults: Vec<_> = outcome.fractions.first().map(|f| f.keys().cloned().collect()).unwrap_or_default();
    write_rows(
        &dir.join(CONSIDERATION_FILE),
        &header,
        faults.into_iter().map(|fault| {
            std::iter::once(fault.to_string())
                .chain(outcome.fractions.iter().map(|m| format!("{:.3}", m[&fault])))
                .collect::<Vec<_>>()
        }),
    )
}

/// A numeric table read back from one of the reports: one column per metric,
/// one value per project (the `avg.` row is dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub metrics: Vec<String>,
    pub projects: Vec<String>,
    /// `values[metric][project]`, exact.
    pub values: Vec<Vec<BigRational>>,
}

impl MetricTable {
    pub fn samples(&self) -> Vec<Vec<f64>> {
        use num::ToPrimitive;
        self.values
            .iter()
            .map(|col| col.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn baseline(&self) -> Baseline {
        let mut values: BTreeMap<String, BTreeMap<String, BigRational>> = BTreeMap::new();
        for (m, col) in self.metrics.iter().zip(&self.values) {
            for (p, v) in self.projects.iter().zip(col) {
                values.entry(p.clone()).or_default().insert(m.clone(), v.clone());
            }
        }
        Baseline { values }
    }
}

fn parse_fraction(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

/// Parses a cell: `0.889`, `16/18`, or a change rate such as `+14%`.
fn parse_cell(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some(pct) = s.strip_suffix('%') {
        return parse_decimal(pct).ok();
    }
    parse_fraction(s).or_else(|| parse_decimal(s).ok())
}

/// Reads `op_table.csv` or `change_rates.csv`. Where an `<M>_exact` column is
/// present its fraction is used instead of the rounded cell.
pub fn read_metric_table(path: &Path) -> Result<MetricTable> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| Error::load(path, 0, 0, e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::load(path, 1, 0, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("project") {
        return Err(Error::load(path, 1, 1, "expected first header `project`"));
    }
    let mut metrics = Vec::new();
    let mut columns = Vec::new();
    for (i, name) in header.iter().enumerate().skip(1) {
        if name.ends_with(EXACT_SUFFIX) {
            continue;
        }
        let exact = header.iter().position(|h| *h == format!("{name}{EXACT_SUFFIX}"));
        metrics.push(name.clone());
        columns.push((i, exact));
    }
    let mut projects = Vec::new();
    let mut values = vec![Vec::new(); metrics.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            Error::load(path, e.position().map_or(0, |p| p.line()), 0, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let project = record.get(0).unwrap_or_default();
        if project == AVG_ROW {
            continue;
        }
        projects.push(project.to_string());
        for (k, &(col, exact)) in columns.iter().enumerate() {
            let col = exact.unwrap_or(col);
            let cell = record.get(col).unwrap_or_default();
            let value = parse_cell(cell).ok_or_else(|| {
                Error::load(path, line, col as u64 + 1, format!("not a number: `{cell}`"))
            })?;
            values[k].push(value);
        }
    }
    Ok(MetricTable {
        metrics,
        projects,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Metric;
    use crate::run::{run_rq1, RunConfig};
    use crate::synth::{generate_named, SynthSpec};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new_raw(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_rendering() {
        assert_eq!(format_rational(&r(16, 18), 3), "0.889");
        assert_eq!(format_rational(&r(12, 13), 3), "0.923");
        assert_eq!(format_rational(&r(1, 1), 3), "1.000");
        assert_eq!(format_rational(&r(0, 5), 3), "0.000");
        assert_eq!(format_rational(&r(1, 2000), 3), "0.001");
        assert_eq!(format_rational(&r(-1, 2000), 3), "-0.001");
        assert_eq!(format_rational(&r(-364, 1000), 3), "-0.364");
        assert_eq!(format_rational(&r(5, 2), 0), "3");
    }

    fn table() -> OpTable {
        let bundles: Vec<_> = [("beta", 1, 0.5), ("alpha", 2, 0.75)]
            .iter()
            .map(|(name, seed, op)| {
                generate_named(
                    &SynthSpec {
                        seed: *seed,
                        planted_ms_op: *op,
                        ..SynthSpec::default()
                    },
                    name,
                )
                .unwrap()
            })
            .collect();
        run_rq1(
            &bundles,
            &RunConfig {
                metrics: vec![Metric::Ms, Metric::Sc],
                ..RunConfig::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn op_table_layout_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(OP_TABLE_FILE);
        let t = table();
        write_op_table(&path, &t).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "project,MS,MS_exact,SC,SC_exact");
        assert_eq!(lines[1], "alpha,0.750,6/8,0.500,4/8");
        assert_eq!(lines[2], "beta,0.500,4/8,0.500,4/8");
        assert_eq!(lines[3], "avg.,0.625,5/8,0.500,1/2");
        let back = read_metric_table(&path).unwrap();
        assert_eq!(back.metrics, ["MS", "SC"]);
        assert_eq!(back.projects, ["alpha", "beta"]);
        assert_eq!(back.values[0], vec![r(3, 4), r(1, 2)]);
        assert_eq!(back.baseline(), t.baseline());
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(OP_TABLE_FILE);
        let mut t = table();
        t.rows.clear();
        write_op_table(&path, &t).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "project,MS,MS_exact,SC,SC_exact\n");
    }

    #[test]
    fn reads_change_rate_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(CHANGE_RATES_FILE);
        fs::write(&path, "project,COS,SC\nChart,+14%,-20%\navg.,+1%,+2%\n").unwrap();
        let t = read_metric_table(&path).unwrap();
        assert_eq!(t.values, vec![vec![r(14, 1)], vec![r(-20, 1)]]);

        fs::write(&path, "project,COS\nChart,NA\n").unwrap();
        match read_metric_table(&path).unwrap_err() {
            Error::Load { line, column, .. } => assert_eq!((line, column), (2, 2)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn stats_matrix_layout() {
        let dir = tempfile::tempdir().unwrap();
        let report = StatsReport {
            metrics: vec!["COS".into(), "RMS".into(), "SC".into()],
            samples: vec![],
            p_values: vec![
                vec![None, Some(0.042), Some(0.0861)],
                vec![None, None, Some(0.495)],
                vec![None, None, None],
            ],
            deltas: vec![
                vec![None, None, None],
                vec![Some(-0.227), None, None],
                vec![Some(-0.364), Some(0.1), None],
            ],
            test: "wilcoxon".into(),
            alternative: crate::stats::Alternative::TwoSided,
            adjustment: "bh".into(),
        };
        write_stats(dir.path(), &report).unwrap();
        let text = fs::read_to_string(dir.path().join(STATS_MATRIX_FILE)).unwrap();
        assert_eq!(
            text,
            "effect size \\ p,COS,RMS,SC\n\
             COS,-,0.042,0.086\n\
             RMS,-0.227(small),-,0.495\n\
             SC,-0.364(medium),0.100,-\n"
        );
    }
}
