//! Named metric results and their table renderings.
//!
//! Every table cell is derived from a [`MetricReport`] entry; the JSON dump
//! of a [`ReportBundle`] is the machine-readable contract and the markdown
//! rendering is derived from it. Cells use the `mean±std (unique)`
//! convention at two decimals.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// One named metric value with its dataset provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub name: String,
    pub dataset: String,
    pub value: MetricValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricValue {
    Scalar {
        value: f64,
    },
    MeanStd {
        mean: f64,
        std: f64,
    },
    /// Mean and std of per-caption counts plus the corpus-global unique
    /// entity count.
    Counted {
        mean: f64,
        std: f64,
        unique: f64,
    },
    Interval {
        mean: f64,
        ci_low: f64,
        ci_high: f64,
    },
    Text {
        value: String,
    },
    /// Metric not defined or skipped for this dataset.
    Missing,
}

/// Two-decimal fixed formatting used across all tables.
pub fn fmt2(value: f64) -> String {
    format!("{value:.2}")
}

impl MetricValue {
    /// Renders the table cell for this value.
    pub fn cell(&self) -> String {
        match self {
            MetricValue::Scalar { value } => fmt2(*value),
            MetricValue::MeanStd { mean, std } => format!("{}±{}", fmt2(*mean), fmt2(*std)),
            MetricValue::Counted { mean, std, unique } => {
                format!("{}±{} ({})", fmt2(*mean), fmt2(*std), unique.round() as i64)
            }
            MetricValue::Interval { mean, ci_low, ci_high } => {
                format!("{} [{}, {}]", fmt2(*mean), fmt2(*ci_low), fmt2(*ci_high))
            }
            MetricValue::Text { value } => value.clone(),
            MetricValue::Missing => "n/a".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub cells: Vec<String>,
}

/// A rendered table: column headers plus labeled rows of pre-formatted
/// cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub id: String,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl MetricTable {
    pub fn new(id: impl Into<String>, title: impl Into<String>, columns: Vec<String>) -> Self {
        MetricTable { id: id.into(), title: title.into(), columns, rows: Vec::new() }
    }

    pub fn push_row(&mut self, label: impl Into<String>, cells: Vec<String>) {
        self.rows.push(TableRow { label: label.into(), cells });
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "### {}", self.title);
        out.push('\n');
        let _ = writeln!(out, "| | {} |", self.columns.join(" | "));
        let _ = writeln!(out, "|{}|", vec![" --- "; self.columns.len() + 1].join("|"));
        for row in &self.rows {
            let _ = writeln!(out, "| {} | {} |", row.label, row.cells.join(" | "));
        }
        out
    }
}

/// Full result of one command: the metric entries, the tables derived from
/// them, and any warnings raised along the way.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportBundle {
    pub metrics: Vec<MetricReport>,
    pub tables: Vec<MetricTable>,
    pub warnings: Vec<String>,
}

impl ReportBundle {
    pub fn record(&mut self, dataset: &str, name: &str, value: MetricValue) {
        self.metrics.push(MetricReport {
            name: name.to_string(),
            dataset: dataset.to_string(),
            value,
        });
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle json")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        for table in &self.tables {
            out.push_str(&table.to_markdown());
            out.push('\n');
        }
        if !self.warnings.is_empty() {
            out.push_str("### Warnings\n\n");
            for w in &self.warnings {
                let _ = writeln!(out, "- {w}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_cell_convention() {
        let cell = MetricValue::MeanStd { mean: 42.864, std: 52.1201 }.cell();
        assert_eq!(cell, "42.86±52.12");
    }

    #[test]
    fn counted_cell_includes_unique() {
        let cell = MetricValue::Counted { mean: 1.9651, std: 3.2049, unique: 1348.22 }.cell();
        assert_eq!(cell, "1.97±3.20 (1348)");
    }

    #[test]
    fn scalar_cells_two_decimals() {
        assert_eq!(MetricValue::Scalar { value: 484.0 }.cell(), "484.00");
        assert_eq!(MetricValue::Scalar { value: -0.041 }.cell(), "-0.04");
        assert_eq!(MetricValue::Missing.cell(), "n/a");
    }

    #[test]
    fn markdown_table_shape() {
        let mut t = MetricTable::new("t", "Things", vec!["A".into(), "B".into()]);
        t.push_row("row1", vec!["1.00".into(), "2.00".into()]);
        let md = t.to_markdown();
        assert!(md.starts_with("### Things"));
        assert!(md.contains("| | A | B |"));
        assert!(md.contains("| row1 | 1.00 | 2.00 |"));
    }

    #[test]
    fn bundle_json_is_deterministic() {
        let mut bundle = ReportBundle::default();
        bundle.record("real", "length_mean", MetricValue::Scalar { value: 42.86 });
        bundle.warn("something was skipped");
        let a = bundle.to_json_pretty();
        let b = bundle.clone().to_json_pretty();
        assert_eq!(a, b);
        assert!(a.contains("length_mean"));
    }
}
