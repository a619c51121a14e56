//! Column-oriented result tables shared by the benchmark code and the CLI.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{GqcError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl ReportTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    /// Appends a row after checking its width and that numeric cells are finite.
    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(GqcError::InvalidArgument(format!(
                "row has {} cells, table {} has {} columns",
                row.len(),
                self.name,
                self.columns.len()
            )));
        }
        if let Some((i, _)) = row
            .iter()
            .enumerate()
            .find(|(_, c)| c.as_f64().is_some_and(|x| !x.is_finite()))
        {
            return Err(GqcError::InvalidArgument(format!(
                "column {} of table {} is not finite",
                self.columns[i], self.name
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// Rows whose text cell in `column` equals `value`, as a new table.
    pub fn filter_text(&self, column: &str, value: &str) -> Option<ReportTable> {
        let i = self.column_index(column)?;
        Some(ReportTable {
            name: format!("{}_{value}", self.name),
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| r[i].as_str() == Some(value))
                .cloned()
                .collect(),
            metadata: self.metadata.clone(),
        })
    }

    /// Distinct text values of `column` in first-appearance order.
    pub fn distinct_text(&self, column: &str) -> Vec<String> {
        let Some(i) = self.column_index(column) else {
            return Vec::new();
        };
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if let Some(s) = r[i].as_str() {
                if !out.iter().any(|o| o == s) {
                    out.push(s.to_string());
                }
            }
        }
        out
    }
}
