use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// Tag marking legitimate traffic rows; everything else is an attack family
/// ("scan", "combo", ...). Comparison is case-insensitive.
pub const BENIGN_TAG: &str = "benign";

/// One device's raw feature table: numeric feature rows plus the per-row
/// traffic-type tag extracted from the `type` column.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Matrix,
    pub type_tags: Vec<String>,
}

impl RawTable {
    pub fn new(header: Vec<String>, rows: Matrix, type_tags: Vec<String>) -> Result<Self> {
        if header.len() != rows.cols() {
            return Err(Error::format("header length does not match feature count"));
        }
        if type_tags.len() != rows.rows() {
            return Err(Error::format("type tag count does not match row count"));
        }
        Ok(RawTable {
            header,
            rows,
            type_tags,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.rows()
    }

    pub fn num_features(&self) -> usize {
        self.rows.cols()
    }

    pub fn is_benign(tag: &str) -> bool {
        tag.eq_ignore_ascii_case(BENIGN_TAG)
    }

    /// Row indices of benign and anomalous rows, in table order.
    pub fn partition_indices(&self) -> (Vec<usize>, Vec<usize>) {
        let mut benign = Vec::new();
        let mut anomalous = Vec::new();
        for (i, tag) in self.type_tags.iter().enumerate() {
            if Self::is_benign(tag) {
                benign.push(i);
            } else {
                anomalous.push(i);
            }
        }
        (benign, anomalous)
    }

    /// Drop rows with any non-finite cell, then exact bitwise duplicate
    /// feature rows (first occurrence kept), then optionally the leading ID
    /// column.
    pub fn clean(self, drop_id_column: bool) -> RawTable {
        let cols = self.rows.cols();
        let mut kept_rows: Vec<usize> = Vec::with_capacity(self.rows.rows());
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        for r in 0..self.rows.rows() {
            let row = self.rows.row(r);
            if !row.iter().all(|v| v.is_finite()) {
                continue;
            }
            let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                kept_rows.push(r);
            }
        }

        let keep_col_from = usize::from(drop_id_column && cols > 0);
        let header: Vec<String> = self.header[keep_col_from..].to_vec();
        let mut data = Vec::with_capacity(kept_rows.len() * (cols - keep_col_from));
        let mut tags = Vec::with_capacity(kept_rows.len());
        for &r in &kept_rows {
            data.extend_from_slice(&self.rows.row(r)[keep_col_from..]);
            tags.push(self.type_tags[r].clone());
        }
        let rows = Matrix::new(kept_rows.len(), cols - keep_col_from, data).expect("sized above");
        RawTable {
            header,
            rows,
            type_tags: tags,
        }
    }

    /// Parse a headered CSV file with one case-insensitive `type` column;
    /// every other column is a numeric feature. Cells that fail to parse
    /// become NaN and are left for [`clean`](Self::clean) to remove.
    pub fn from_csv_path(path: &Path) -> Result<RawTable> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<RawTable> {
        let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = csv_reader
            .headers()
            .map_err(|e| Error::format(format!("cannot read CSV header: {e}")))?
            .clone();
        let type_col = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case("type"))
            .ok_or_else(|| Error::format("CSV is missing a 'type' column"))?;
        let header: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != type_col)
            .map(|(_, h)| h.trim().to_string())
            .collect();

        let mut data: Vec<f64> = Vec::new();
        let mut tags: Vec<String> = Vec::new();
        for record in csv_reader.records() {
            let record = record.map_err(|e| Error::format(format!("malformed CSV record: {e}")))?;
            if record.len() != headers.len() {
                return Err(Error::format(format!(
                    "CSV record has {} fields, header has {}",
                    record.len(),
                    headers.len()
                )));
            }
            for (i, cell) in record.iter().enumerate() {
                if i == type_col {
                    tags.push(cell.trim().to_string());
                } else {
                    data.push(cell.trim().parse::<f64>().unwrap_or(f64::NAN));
                }
            }
        }
        let rows = Matrix::new(tags.len(), header.len(), data)
            .map_err(|_| Error::format("inconsistent CSV row widths"))?;
        RawTable::new(header, rows, tags)
    }

    /// Emit as CSV: feature columns in header order, `type` column last.
    /// Floats are written in shortest round-trip form, so re-ingesting
    /// reproduces the table exactly.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            out.push_str(h);
            out.push(',');
        }
        out.push_str("type\n");
        for r in 0..self.num_rows() {
            for v in self.rows.row(r) {
                out.push_str(&format!("{v}"));
                out.push(',');
            }
            out.push_str(&self.type_tags[r]);
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&[f64], &str)]) -> RawTable {
        let header: Vec<String> = (0..rows[0].0.len()).map(|i| format!("f{i}")).collect();
        let matrix = Matrix::from_rows(&rows.iter().map(|(r, _)| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let tags = rows.iter().map(|(_, t)| t.to_string()).collect();
        RawTable::new(header, matrix, tags).unwrap()
    }

    #[test]
    fn ingest_extracts_type_column() {
        let csv = "a,type,b\n1,benign,2\n3,scan,4\n5,benign,6\n";
        let t = RawTable::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.type_tags, vec!["benign", "scan", "benign"]);
        assert_eq!(t.rows.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn header_only_file_gives_empty_table() {
        let t = RawTable::from_csv_reader("x,y,type\n".as_bytes()).unwrap();
        assert_eq!(t.num_rows(), 0);
        assert_eq!(t.num_features(), 2);
    }

    #[test]
    fn missing_type_column_is_format_error() {
        let err = RawTable::from_csv_reader("a,b\n1,2\n".as_bytes());
        assert!(matches!(err, Err(Error::Format(_))));
    }

    #[test]
    fn non_numeric_cell_becomes_nan_and_clean_removes_it() {
        let csv = "a,b,type\n1,2,benign\n1,oops,benign\n3,4,scan\n";
        let t = RawTable::from_csv_reader(csv.as_bytes()).unwrap();
        assert!(t.rows.get(1, 1).is_nan());
        let cleaned = t.clean(false);
        assert_eq!(cleaned.num_rows(), 2);
        assert_eq!(cleaned.type_tags, vec!["benign", "scan"]);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let t = table(&[
            (&[0.1, -3.25e-7, 1.0 / 3.0], "benign"),
            (&[5.0, 2.0_f64.sqrt(), -0.0], "combo"),
        ]);
        let back = RawTable::from_csv_reader(t.to_csv_string().as_bytes()).unwrap();
        assert_eq!(t.header, back.header);
        assert_eq!(t.type_tags, back.type_tags);
        assert_eq!(t.rows.data(), back.rows.data());
    }

    #[test]
    fn clean_removes_nan_rows() {
        let t = table(&[
            (&[1.0, 2.0], "benign"),
            (&[f64::NAN, 2.0], "benign"),
            (&[3.0, f64::INFINITY], "scan"),
        ]);
        let cleaned = t.clean(false);
        assert_eq!(cleaned.num_rows(), 1);
        assert_eq!(cleaned.rows.row(0), &[1.0, 2.0]);
    }

    #[test]
    fn clean_dedupes_keeping_first_occurrence() {
        let t = table(&[
            (&[1.0, 2.0], "benign"),
            (&[3.0, 4.0], "scan"),
            (&[1.0, 2.0], "combo"),
            (&[1.0, 2.0], "benign"),
        ]);
        let cleaned = t.clean(false);
        assert_eq!(cleaned.num_rows(), 2);
        assert_eq!(cleaned.type_tags, vec!["benign", "scan"]);
    }

    #[test]
    fn dedupe_of_k_copies_preserves_first_occurrence_order() {
        let distinct: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let mut rows: Vec<(&[f64], &str)> = Vec::new();
        for _ in 0..3 {
            for d in &distinct {
                rows.push((d.as_slice(), "benign"));
            }
        }
        let cleaned = table(&rows).clean(false);
        assert_eq!(cleaned.num_rows(), 5);
        for (i, d) in distinct.iter().enumerate() {
            assert_eq!(cleaned.rows.row(i), d.as_slice());
        }
    }

    #[test]
    fn clean_is_idempotent() {
        let t = table(&[
            (&[1.0, 2.0], "benign"),
            (&[f64::NAN, 0.0], "scan"),
            (&[1.0, 2.0], "benign"),
        ]);
        let once = t.clean(false);
        let twice = once.clone().clean(false);
        assert_eq!(once, twice);
    }

    #[test]
    fn clean_can_drop_leading_id_column() {
        let t = table(&[(&[100.0, 1.0, 2.0], "benign"), (&[101.0, 3.0, 4.0], "scan")]);
        let cleaned = t.clean(true);
        assert_eq!(cleaned.header, vec!["f1", "f2"]);
        assert_eq!(cleaned.rows.row(0), &[1.0, 2.0]);
    }
}
