use std::fmt::Write as _;

use serde_json::Value;

use crate::config::{Experiment, Format};
use crate::CliError;

pub const TOOL: &str = "fockfluct";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const UNITS: &str = "hbar = k_B = 1; occupations in quanta; energies in the units of omega";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// 17 significant digits, enough to round-trip any double.
fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => real(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Real(x) if x.is_finite() => real(*x),
            Cell::Real(x) => format!("\"{}\"", real(*x)),
            Cell::Int(n) => n.to_string(),
            Cell::Text(t) => Value::String(t.clone()).to_string(),
            Cell::Missing => "null".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[Column]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }
}

/// Everything written to one output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: Experiment,
    pub seed: u64,
    /// Effective configuration after command-line overrides, without the output path.
    pub config: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => Ok(self.render_json()),
        }
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        let _ = writeln!(out, "# tool: {TOOL} {VERSION}");
        let _ = writeln!(out, "# experiment: {}", self.experiment);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# config: {}", self.config);
        let _ = writeln!(out, "# units: {UNITS}");
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# table: {}", table.name);
            let units: Vec<String> = table
                .columns
                .iter()
                .map(|c| format!("{} [{}]", c.name, c.unit))
                .collect();
            let _ = writeln!(out, "# columns: {}", units.join("; "));
            let mut writer = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
            writer
                .write_record(table.columns.iter().map(|c| c.name))
                .map_err(csv_err)?;
            for row in &table.rows {
                writer.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
            }
            let bytes = writer.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
            out.push_str(&String::from_utf8_lossy(&bytes));
        }
        Ok(out)
    }

    fn render_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"tool\": \"{TOOL}\",");
        let _ = writeln!(out, "  \"version\": \"{VERSION}\",");
        let _ = writeln!(out, "  \"experiment\": \"{}\",", self.experiment);
        let _ = writeln!(out, "  \"seed\": {},", self.seed);
        let _ = writeln!(out, "  \"config\": {},", self.config);
        let _ = writeln!(out, "  \"units\": {},", Value::String(UNITS.into()));
        out.push_str("  \"tables\": [");
        for (i, table) in self.tables.iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            let _ = writeln!(out, "    {{\n      \"name\": \"{}\",", table.name);
            let columns: Vec<String> = table
                .columns
                .iter()
                .map(|c| format!("{{\"name\": \"{}\", \"unit\": \"{}\"}}", c.name, c.unit))
                .collect();
            let _ = writeln!(out, "      \"columns\": [{}],", columns.join(", "));
            out.push_str("      \"rows\": [");
            for (j, row) in table.rows.iter().enumerate() {
                out.push_str(if j == 0 { "\n" } else { ",\n" });
                let cells: Vec<String> = row.iter().map(Cell::json).collect();
                let _ = write!(out, "        [{}]", cells.join(", "));
            }
            out.push_str(if table.rows.is_empty() {
                "]\n    }"
            } else {
                "\n      ]\n    }"
            });
        }
        out.push_str(if self.tables.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> Report {
        let mut t = Table::new("t", &[col("x", "1"), col("label", "-"), col("n", "count")]);
        t.push(vec![Cell::Real(0.1), "a,b".into(), Cell::Int(3)]);
        t.push(vec![Cell::Real(f64::INFINITY), Cell::Missing, Cell::Int(0)]);
        Report {
            experiment: Experiment::Thermal,
            seed: 7,
            config: serde_json::json!({"seed": 7}),
            tables: vec![t],
        }
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE, 5e-324] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_is_valid_and_keeps_metadata() {
        let text = report().render(Format::Json).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["seed"], 7);
        assert_eq!(v["version"], VERSION);
        let rows = &v["tables"][0]["rows"];
        assert_eq!(rows[0][0].as_f64(), Some(0.1));
        assert_eq!(rows[1][0], "inf");
        assert!(rows[1][1].is_null());
        assert_eq!(v["tables"][0]["columns"][2]["unit"], "count");
    }

    #[test]
    fn csv_quotes_and_comments() {
        let text = report().render(Format::Csv).unwrap();
        assert!(text.contains("# seed: 7\n"));
        assert!(text.contains("# columns: x [1]; label [-]; n [count]\n"));
        assert!(text.contains("x,label,n\n1.0000000000000001e-1,\"a,b\",3\ninf,,0\n"));
    }
}
