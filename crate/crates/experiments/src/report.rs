//! Self-contained experiment reports.
//!
//! A report carries its per-trial tables together with declarative
//! aggregates and threshold checks over those tables, so every summary value
//! can be recomputed from the report alone.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ExperimentError, Result};

pub const SCHEMA: &str = "simplicial-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub experiment: String,
    pub config: Value,
    pub tables: BTreeMap<String, Table>,
    pub aggregates: Vec<Aggregate>,
    pub checks: Vec<Check>,
    /// Two-column series written as plot CSVs.
    pub plots: Vec<Plot>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    pub column: String,
    pub equals: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum AggregateOp {
    Max {
        table: String,
        column: String,
        #[serde(default)]
        filter: Vec<Condition>,
    },
    Min {
        table: String,
        column: String,
        #[serde(default)]
        filter: Vec<Condition>,
    },
    Mean {
        table: String,
        column: String,
        #[serde(default)]
        filter: Vec<Condition>,
    },
    /// Ratio of two earlier aggregates.
    Quotient {
        numerator: String,
        denominator: String,
    },
    /// An earlier aggregate times a constant.
    Scaled { of: String, factor: f64 },
    /// Least-squares fit `y = slope * x + intercept`.
    FitSlope {
        table: String,
        x: String,
        y: String,
        #[serde(default)]
        filter: Vec<Condition>,
    },
    FitIntercept {
        table: String,
        x: String,
        y: String,
        #[serde(default)]
        filter: Vec<Condition>,
    },
    /// Root-mean-square residual of the fit.
    FitResidual {
        table: String,
        x: String,
        y: String,
        #[serde(default)]
        filter: Vec<Condition>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub name: String,
    #[serde(flatten)]
    pub op: AggregateOp,
    /// `None` when undefined: an empty selection, a missing or non-finite
    /// entry, or a zero denominator.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparison {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::Lt => value < threshold,
            Comparison::Le => value <= threshold,
            Comparison::Gt => value > threshold,
            Comparison::Ge => value >= threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub aggregate: String,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plot {
    pub name: String,
    pub table: String,
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch; omitted for stable output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

impl Provenance {
    pub fn current(stable: bool) -> Self {
        let generated_unix = (!stable).then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Self {
            tool: "simplicial".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_unix,
        }
    }
}

/// A JSON number, or `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn eq(column: &str, value: impl Into<Value>) -> Condition {
    Condition {
        column: column.into(),
        equals: value.into(),
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Rows matching every condition.
    fn select<'a>(&'a self, filter: &'a [Condition]) -> Option<Vec<&'a Vec<Value>>> {
        let idx: Vec<(usize, &Value)> = filter
            .iter()
            .map(|c| Some((self.column_index(&c.column)?, &c.equals)))
            .collect::<Option<_>>()?;
        Some(
            self.rows
                .iter()
                .filter(|row| idx.iter().all(|(i, v)| &row[*i] == *v))
                .collect(),
        )
    }

    /// Values of a column over the selected rows; `None` if any is not a number.
    fn numbers(&self, column: &str, filter: &[Condition]) -> Option<Vec<f64>> {
        let c = self.column_index(column)?;
        self.select(filter)?
            .into_iter()
            .map(|row| row[c].as_f64())
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

struct Fit {
    slope: f64,
    intercept: f64,
    residual: f64,
}

fn fit(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Some(Fit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
    })
}

impl AggregateOp {
    fn evaluate(
        &self,
        tables: &BTreeMap<String, Table>,
        done: &BTreeMap<&str, Option<f64>>,
    ) -> Option<f64> {
        let column = |table: &str, column: &str, filter: &[Condition]| {
            tables
                .get(table)?
                .numbers(column, filter)
                .filter(|v| !v.is_empty() && v.iter().all(|x| x.is_finite()))
        };
        let fit_of = |table: &str, x: &str, y: &str, filter: &[Condition]| {
            fit(&column(table, x, filter)?, &column(table, y, filter)?)
        };
        match self {
            AggregateOp::Max {
                table,
                column: c,
                filter,
            } => column(table, c, filter).map(|v| v.into_iter().fold(f64::NEG_INFINITY, f64::max)),
            AggregateOp::Min {
                table,
                column: c,
                filter,
            } => column(table, c, filter).map(|v| v.into_iter().fold(f64::INFINITY, f64::min)),
            AggregateOp::Mean {
                table,
                column: c,
                filter,
            } => column(table, c, filter).map(|v| v.iter().sum::<f64>() / v.len() as f64),
            AggregateOp::Quotient {
                numerator,
                denominator,
            } => {
                let a = (*done.get(numerator.as_str())?)?;
                let b = (*done.get(denominator.as_str())?)?;
                (b != 0.0).then(|| a / b).filter(|q| q.is_finite())
            }
            AggregateOp::Scaled { of, factor } => (*done.get(of.as_str())?).map(|v| v * factor),
            AggregateOp::FitSlope {
                table,
                x,
                y,
                filter,
            } => fit_of(table, x, y, filter).map(|f| f.slope),
            AggregateOp::FitIntercept {
                table,
                x,
                y,
                filter,
            } => fit_of(table, x, y, filter).map(|f| f.intercept),
            AggregateOp::FitResidual {
                table,
                x,
                y,
                filter,
            } => fit_of(table, x, y, filter).map(|f| f.residual),
        }
    }
}

/// Assembles a report; aggregates and checks are evaluated by [`ReportBuilder::finish`].
pub struct ReportBuilder {
    experiment: String,
    config: Value,
    tables: BTreeMap<String, Table>,
    aggregates: Vec<(String, AggregateOp)>,
    checks: Vec<(String, String, Comparison, f64)>,
    plots: Vec<Plot>,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn new(experiment: &str, config: Value) -> Self {
        Self {
            experiment: experiment.into(),
            config,
            tables: BTreeMap::new(),
            aggregates: Vec::new(),
            checks: Vec::new(),
            plots: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn table(&mut self, name: &str, table: Table) -> &mut Self {
        self.tables.insert(name.into(), table);
        self
    }

    pub fn aggregate(&mut self, name: &str, op: AggregateOp) -> &mut Self {
        self.aggregates.push((name.into(), op));
        self
    }

    pub fn check(
        &mut self,
        name: &str,
        aggregate: &str,
        comparison: Comparison,
        threshold: f64,
    ) -> &mut Self {
        self.checks
            .push((name.into(), aggregate.into(), comparison, threshold));
        self
    }

    pub fn plot(&mut self, name: &str, table: &str, x: &str, y: &str) -> &mut Self {
        self.plots.push(Plot {
            name: name.into(),
            table: table.into(),
            x: x.into(),
            y: y.into(),
        });
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn finish(self, stable: bool) -> Report {
        let mut report = Report {
            schema: SCHEMA.into(),
            experiment: self.experiment,
            config: self.config,
            tables: self.tables,
            aggregates: self
                .aggregates
                .into_iter()
                .map(|(name, op)| Aggregate {
                    name,
                    op,
                    value: None,
                })
                .collect(),
            checks: self
                .checks
                .into_iter()
                .map(|(name, aggregate, comparison, threshold)| Check {
                    name,
                    aggregate,
                    comparison,
                    threshold,
                    passed: false,
                })
                .collect(),
            plots: self.plots,
            notes: self.notes,
            passed: false,
            provenance: Provenance::current(stable),
        };
        report.recompute();
        report
    }
}

/// A stored value that disagrees with its recomputation.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub name: String,
    pub stored: String,
    pub recomputed: String,
}

impl Report {
    pub fn aggregate(&self, name: &str) -> Option<f64> {
        self.aggregates.iter().find(|a| a.name == name)?.value
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Re-evaluates every aggregate and check from the tables.
    pub fn recompute(&mut self) {
        let mut done: BTreeMap<&str, Option<f64>> = BTreeMap::new();
        let mut values = Vec::with_capacity(self.aggregates.len());
        for a in &self.aggregates {
            let v = a.op.evaluate(&self.tables, &done);
            done.insert(&a.name, v);
            values.push(v);
        }
        for (a, v) in self.aggregates.iter_mut().zip(values) {
            a.value = v;
        }
        for c in &mut self.checks {
            let value = self
                .aggregates
                .iter()
                .find(|a| a.name == c.aggregate)
                .and_then(|a| a.value);
            c.passed = value.is_some_and(|v| c.comparison.holds(v, c.threshold));
        }
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    /// Differences between the stored and recomputed summary values.
    pub fn verify(&self) -> Vec<Mismatch> {
        let mut fresh = self.clone();
        fresh.recompute();
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()),
            (None, None) => true,
            _ => false,
        };
        let mut out = Vec::new();
        for (old, new) in self.aggregates.iter().zip(&fresh.aggregates) {
            if !close(old.value, new.value) {
                out.push(Mismatch {
                    name: old.name.clone(),
                    stored: format!("{:?}", old.value),
                    recomputed: format!("{:?}", new.value),
                });
            }
        }
        for (old, new) in self.checks.iter().zip(&fresh.checks) {
            if old.passed != new.passed {
                out.push(Mismatch {
                    name: old.name.clone(),
                    stored: old.passed.to_string(),
                    recomputed: new.passed.to_string(),
                });
            }
        }
        if self.passed != fresh.passed {
            out.push(Mismatch {
                name: "passed".into(),
                stored: self.passed.to_string(),
                recomputed: fresh.passed.to_string(),
            });
        }
        out
    }

    pub fn validate_schema(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(ExperimentError::config(format!(
                "unknown report schema {}",
                self.schema
            )));
        }
        for (name, t) in &self.tables {
            if let Some(i) = t.rows.iter().position(|r| r.len() != t.columns.len()) {
                return Err(ExperimentError::config(format!(
                    "table {name}: row {i} has the wrong width"
                )));
            }
        }
        for p in &self.plots {
            let ok = self
                .tables
                .get(&p.table)
                .is_some_and(|t| t.column_index(&p.x).is_some() && t.column_index(&p.y).is_some());
            if !ok {
                return Err(ExperimentError::config(format!(
                    "plot {} refers to a missing column",
                    p.name
                )));
            }
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let report: Report = serde_json::from_str(&text)
            .map_err(|e| ExperimentError::config(format!("{}: {e}", path.display())))?;
        report.validate_schema()?;
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    /// The series of a plot as `x,y` CSV.
    pub fn plot_csv(&self, plot: &Plot) -> Option<String> {
        let t = self.tables.get(&plot.table)?;
        let (xi, yi) = (t.column_index(&plot.x)?, t.column_index(&plot.y)?);
        let mut out = format!("{},{}\n", plot.x, plot.y);
        for row in &t.rows {
            out.push_str(&format!("{},{}\n", csv_cell(&row[xi]), csv_cell(&row[yi])));
        }
        Some(out)
    }

    /// Writes `<experiment>.json`, one CSV per table and one per plot.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
        let mut files = vec![(
            dir.join(format!("{}.json", self.experiment)),
            self.to_json(),
        )];
        for (name, t) in &self.tables {
            files.push((
                dir.join(format!("{}.{name}.csv", self.experiment)),
                t.to_csv(),
            ));
        }
        for p in &self.plots {
            if let Some(csv) = self.plot_csv(p) {
                files.push((
                    dir.join(format!("{}.{}.plot.csv", self.experiment, p.name)),
                    csv,
                ));
            }
        }
        for (path, body) in &files {
            write_atomic(path, body.as_bytes())?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| ExperimentError::io(dir, e))?;
    tmp.write_all(bytes)
        .map_err(|e| ExperimentError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| ExperimentError::io(path, e.error))?;
    Ok(())
}
