//! Rectangular numeric tables, written as CSV or JSON.

use bergman_core::format::{g17, to_json};
use serde_json::{Map, Value};

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Run parameters echoed into the JSON form.
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), meta: Map::new() }
    }

    pub fn meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| g17(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut obj = self.meta.clone();
        obj.insert("columns".into(), self.columns.clone().into());
        let rows = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(|&x| number(x)).collect()))
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
        to_json(&Value::Object(obj))
    }
}

/// Finite floats as JSON numbers, infinities as `"inf"` / `"-inf"`.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(g17(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["r", "P_p"]);
        t.push(vec![0.0, f64::INFINITY]);
        t.push(vec![0.1, 2.5]);
        assert_eq!(t.to_csv(), "r,P_p\n0,inf\n0.10000000000000001,2.5\n");
    }

    #[test]
    fn json_marks_infinity() {
        let mut t = Table::new(&["y", "F_p"]).meta("p", 3);
        t.push(vec![0.0, f64::INFINITY]);
        let s = t.to_json().unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rows"][0][1], "inf");
        assert_eq!(v["p"], 3);
    }
}
