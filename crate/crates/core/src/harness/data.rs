//! CSV datasets: a header row, numeric feature columns, and one label column
//! holding 0 or 1.

use std::path::Path;

use crate::cost::{Label, LabeledDataset};
use crate::error::{Error, Result};

/// Feature columns (header order, label column removed) and their rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<Label>>,
}

fn open(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn parse_label(path: &Path, row: usize, column: &str, cell: &str) -> Result<Label> {
    match cell.parse::<f64>() {
        Ok(0.0) => Ok(0),
        Ok(1.0) => Ok(1),
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            reason: format!("label '{cell}' is not 0 or 1"),
        }),
    }
}

/// Reads every column as a feature except `label_column`, which is parsed as
/// labels when given (and must then exist). Rows are numbered from 1, the
/// header being row 0.
pub fn read_table(path: &Path, label_column: Option<&str>) -> Result<FeatureTable> {
    let mut reader = open(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = match label_column {
        Some(name) => Some(header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            row: 0,
            column: name.to_string(),
            reason: "label column not found in header".into(),
        })?),
        None => None,
    };
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = r + 1;
        if record.len() != header.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: row_no,
                column: String::new(),
                reason: format!("expected {} cells, found {}", header.len(), record.len()),
            });
        }
        let mut row = Vec::with_capacity(names.len());
        for (j, cell) in record.iter().enumerate() {
            if Some(j) == label_idx {
                let label = parse_label(path, row_no, &header[j], cell)?;
                labels.as_mut().expect("label column present").push(label);
                continue;
            }
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    row: row_no,
                    column: header[j].clone(),
                    reason: format!("'{cell}' is not a finite number"),
                })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(FeatureTable { names, rows, labels })
}

pub fn load_csv(path: &Path, label_column: &str) -> Result<LabeledDataset> {
    let table = read_table(path, Some(label_column))?;
    let labels = table.labels.expect("labels requested");
    let n_features = table.names.len();
    let features = table.rows.into_iter().flatten().collect();
    LabeledDataset::from_flat(features, labels, n_features)?.with_feature_names(table.names)
}

/// Writes `dataset` with its feature names (or `x0, x1, ...`) and a final
/// `label_column`.
pub fn write_csv(dataset: &LabeledDataset, path: &Path, label_column: &str) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header: Vec<String> = match dataset.feature_names() {
        Some(names) => names.to_vec(),
        None => (0..dataset.n_features()).map(|j| format!("x{j}")).collect(),
    };
    header.push(label_column.to_string());
    w.write_record(&header)?;
    for (i, row) in dataset.rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(dataset.labels()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}
