//! Periodic table layout of a window: one row per degree, one column per
//! column label, node `i` placed at column `(first_column + i) mod columns`.

use super::sequence::ExactSequence;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Lays out the node states of `seq`; a window without column labels is
    /// one column named `group`.
    pub fn from_sequence(seq: &ExactSequence) -> Self {
        Self::with_cells(seq, |i| seq.nodes[i].state.to_string())
    }

    /// Same layout with custom cell text.
    pub fn with_cells(seq: &ExactSequence, cell: impl Fn(usize) -> String) -> Self {
        let columns: Vec<String> = if seq.columns.is_empty() {
            vec!["group".to_string()]
        } else {
            seq.columns.clone()
        };
        let width = columns.len();
        let mut header = vec!["degree".to_string()];
        header.extend(columns);
        let mut rows: Vec<Vec<String>> = Vec::new();
        for i in 0..seq.nodes.len() {
            let col = seq.column_of(i);
            if i == 0 || col == 0 {
                let mut row = vec![String::new(); width + 1];
                row[0] = seq.nodes[i].degree.to_string();
                rows.push(row);
            }
            rows.last_mut().expect("row started")[col + 1] = cell(i);
        }
        Table { header, rows }
    }

    pub fn to_ascii(&self) -> String {
        let n = self.header.len();
        let mut widths = vec![0usize; n];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |row: &[String]| {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            let mut s = cells.join(" | ");
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}
