//! Deterministic CSV tables and companion gnuplot scripts.

use std::cmp::Ordering;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").expect("write to string"),
            Cell::Float(v) if v.is_nan() => out.push_str("NaN"),
            Cell::Float(v) => write!(out, "{v:.16e}").expect("write to string"),
            Cell::Text(s) => out.push_str(s),
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cell::Int(a), Cell::Int(b)) => a.cmp(b),
            (Cell::Float(a), Cell::Float(b)) => a.total_cmp(b),
            (Cell::Text(a), Cell::Text(b)) => a.cmp(b),
            (a, b) => a.rank().cmp(&b.rank()),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Cell::Int(_) => 0,
            Cell::Float(_) => 1,
            Cell::Text(_) => 2,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// A table whose first `key_columns` columns hold the parameter tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub key_columns: usize,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>, key_columns: usize) -> Self {
        assert!(key_columns <= columns.len());
        Self {
            columns,
            key_columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Float values of a column, in row order.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let c = self
            .column(name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows
            .iter()
            .map(|r| match &r[c] {
                Cell::Float(v) => *v,
                Cell::Int(v) => *v as f64,
                Cell::Text(_) => f64::NAN,
            })
            .collect()
    }

    /// Sort rows by the parameter tuple (stable).
    pub fn sort(&mut self) {
        let keys = self.key_columns;
        self.rows.sort_by(|x, y| {
            x[..keys]
                .iter()
                .zip(&y[..keys])
                .map(|(a, b)| a.cmp_key(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        });
    }

    /// Header row followed by rows sorted by their parameter tuple.
    pub fn to_csv(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        let mut out = sorted.columns.join(",");
        out.push('\n');
        for row in &sorted.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    /// Gnuplot script drawing each `y` column against `x`, one curve per
    /// distinct value of `group` when given.
    pub fn gnuplot_script(
        &self,
        csv_path: &str,
        x: &str,
        ys: &[&str],
        group: Option<&str>,
        logscale: &str,
    ) -> String {
        let col = |name: &str| self.column(name).map(|c| c + 1).unwrap_or(0);
        let mut s = String::new();
        s.push_str("set datafile separator ','\nset key outside\nset grid\n");
        if !logscale.is_empty() {
            writeln!(s, "set logscale {logscale}").expect("write to string");
        }
        writeln!(s, "set xlabel '{x}'").expect("write to string");
        let mut groups: Vec<String> = Vec::new();
        if let Some(g) = group.and_then(|g| self.column(g)) {
            for row in &self.rows {
                let mut v = String::new();
                row[g].render(&mut v);
                if !groups.contains(&v) {
                    groups.push(v);
                }
            }
            groups.sort();
        }
        let mut plots = Vec::new();
        for y in ys {
            if groups.is_empty() {
                plots.push(format!(
                    "'{csv_path}' skip 1 using {}:{} with linespoints title '{y}'",
                    col(x),
                    col(y)
                ));
            } else {
                let g = col(group.expect("group set"));
                for v in &groups {
                    plots.push(format!(
                        "'{csv_path}' skip 1 using {}:(strcol({g}) eq '{v}' ? ${} : 1/0) with linespoints title '{y} {v}'",
                        col(x),
                        col(y)
                    ));
                }
            }
        }
        writeln!(s, "plot {}", plots.join(", \\\n     ")).expect("write to string");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_sorted_rows() {
        let mut t = Table::new(vec!["name", "n", "value"], 2);
        t.push(vec!["star".into(), 10u64.into(), 0.5.into()]);
        t.push(vec!["chain".into(), 100u64.into(), f64::NAN.into()]);
        t.push(vec!["chain".into(), 10u64.into(), 1.0e-300.into()]);
        assert_eq!(
            t.to_csv(),
            "name,n,value\nchain,10,1.0000000000000000e-300\nchain,100,NaN\nstar,10,5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e200, 5e-324] {
            let mut s = String::new();
            Cell::Float(v).render(&mut s);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn script_mentions_columns() {
        let mut t = Table::new(vec!["topology", "n", "bcrb"], 2);
        t.push(vec!["chain".into(), 10u64.into(), 0.5.into()]);
        let s = t.gnuplot_script("out.csv", "n", &["bcrb"], Some("topology"), "xy");
        assert!(s.contains("using 2:(strcol(1) eq 'chain' ? $3 : 1/0)"));
        assert!(s.contains("set logscale xy"));
    }
}
