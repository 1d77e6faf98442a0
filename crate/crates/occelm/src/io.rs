//! CSV datasets.
//!
//! Comma separated, one optional header line (detected when a feature cell
//! of the first line is not a number), labels as `+1`/`1`/`target` or
//! `-1`/`0`/`outlier`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use occelm_core::{Dataset, Label, Matrix};

/// Which column holds the labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires a header line.
    Name(String),
    Last,
    /// The column named `label` if the file has one, otherwise unlabeled.
    Auto,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "last" => Self::Last,
            "auto" => Self::Auto,
            _ => match s.parse() {
                Ok(i) => Self::Index(i),
                Err(_) => Self::Name(s.to_string()),
            },
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty file")]
    EmptyFile,
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {col}: cannot parse {text:?} as a finite number")]
    ParseError { row: usize, col: usize, text: String },
    #[error("row {row}: unknown label {token:?}")]
    UnknownLabelToken { row: usize, token: String },
    #[error("label column {0} not found")]
    NoSuchLabelColumn(String),
    #[error(transparent)]
    Core(#[from] occelm_core::Error),
}

fn parse_cell(text: &str) -> Option<f64> {
    text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a dataset from CSV text.
pub fn read_csv<R: Read>(reader: R, label: Option<&LabelColumn>) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        records.push(rec);
    }
    let first = records.first().ok_or(DataError::EmptyFile)?;
    let width = first.len();
    let label_index = |header: Option<&csv::StringRecord>| -> Result<Option<usize>, DataError> {
        match label {
            None => Ok(None),
            Some(LabelColumn::Last) => Ok(Some(width - 1)),
            Some(LabelColumn::Index(i)) if *i < width => Ok(Some(*i)),
            Some(LabelColumn::Index(i)) => Err(DataError::NoSuchLabelColumn(i.to_string())),
            Some(LabelColumn::Auto) => Ok(header.and_then(|h| h.iter().position(|c| c == "label"))),
            Some(LabelColumn::Name(name)) => header
                .and_then(|h| h.iter().position(|c| c == name))
                .map(Some)
                .ok_or_else(|| DataError::NoSuchLabelColumn(name.clone())),
        }
    };
    // Header detection ignores the label column when it is known by position.
    let positional = match label {
        Some(LabelColumn::Name(_) | LabelColumn::Auto) => None,
        _ => label_index(None)?,
    };
    let has_header = first
        .iter()
        .enumerate()
        .any(|(j, c)| Some(j) != positional && parse_cell(c).is_none());
    let header = has_header.then(|| first.clone());
    let label_col = label_index(header.as_ref())?;
    let body = &records[usize::from(has_header)..];
    if body.is_empty() {
        return Err(DataError::EmptyFile);
    }

    let n = width - usize::from(label_col.is_some());
    let mut values = Vec::with_capacity(body.len() * n);
    let mut labels = Vec::new();
    for (k, rec) in body.iter().enumerate() {
        // 1-based line numbers as they appear in the file
        let row = k + 1 + usize::from(has_header);
        if rec.len() != width {
            return Err(DataError::RaggedRows {
                row,
                expected: width,
                found: rec.len(),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            if Some(j) == label_col {
                labels.push(Label::from_token(cell).ok_or_else(|| DataError::UnknownLabelToken {
                    row,
                    token: cell.to_string(),
                })?);
            } else {
                values.push(parse_cell(cell).ok_or_else(|| DataError::ParseError {
                    row,
                    col: j + 1,
                    text: cell.to_string(),
                })?);
            }
        }
    }
    let samples = Matrix::from_vec(body.len(), n, values)?;
    let data = Dataset::new(samples, label_col.map(|_| labels))?;
    match header {
        Some(h) => {
            let names = h
                .iter()
                .enumerate()
                .filter(|(j, _)| Some(*j) != label_col)
                .map(|(_, c)| c.to_string())
                .collect();
            Ok(data.with_feature_names(names)?)
        }
        None => Ok(data),
    }
}

pub fn load_csv(path: &Path, label: Option<&LabelColumn>) -> Result<Dataset, DataError> {
    read_csv(File::open(path)?, label)
}

/// Writes a dataset with a header line; labels, when present, go to a final
/// `label` column.
pub fn write_csv<W: Write>(writer: W, data: &Dataset) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    let n = data.feature_count();
    let mut header: Vec<String> = match data.feature_names() {
        Some(names) => names.to_vec(),
        None => (1..=n).map(|j| format!("x{j}")).collect(),
    };
    if data.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for (i, row) in data.samples().row_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(labels) = data.labels() {
            rec.push(labels[i].token().to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(path: &Path, data: &Dataset) -> Result<(), DataError> {
    write_csv(File::create(path)?, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, label: Option<LabelColumn>) -> Result<Dataset, DataError> {
        read_csv(text.as_bytes(), label.as_ref())
    }

    #[test]
    fn labeled_without_header() {
        let d = parse("1,2,+1\n3,4,+1\n5,6,-1\n", Some(LabelColumn::Last)).unwrap();
        assert_eq!((d.sample_count(), d.feature_count()), (3, 2));
        assert_eq!(d.labels().unwrap(), &[Label::Target, Label::Target, Label::Outlier]);
        assert!(d.feature_names().is_none());
    }

    #[test]
    fn header_and_named_label() {
        let d = parse("a,label,b\n1,target,2\n3,outlier,4\n", Some(LabelColumn::Name("label".into()))).unwrap();
        assert_eq!(d.feature_names().unwrap(), &["a".to_string(), "b".to_string()]);
        assert_eq!(d.samples().row(1), &[3.0, 4.0]);
        assert_eq!(d.labels().unwrap()[1], Label::Outlier);
    }

    #[test]
    fn auto_label_column() {
        let d = parse("a,b,label\n1,2,-1\n3,4,+1\n", Some(LabelColumn::Auto)).unwrap();
        assert_eq!(d.feature_count(), 2);
        assert_eq!(d.labels().unwrap(), &[Label::Outlier, Label::Target]);
        let u = parse("1,2\n3,4\n", Some(LabelColumn::Auto)).unwrap();
        assert!(u.labels().is_none());
    }

    #[test]
    fn unlabeled() {
        let d = parse("x,y\n1,2\n", None).unwrap();
        assert!(d.labels().is_none());
        assert_eq!(d.sample_count(), 1);
    }

    #[test]
    fn errors_name_the_cell() {
        match parse("1,2\n3,abc\n", None) {
            Err(DataError::ParseError { row: 2, col: 2, text }) => assert_eq!(text, "abc"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("", None), Err(DataError::EmptyFile)));
        assert!(matches!(parse("a,b\n", None), Err(DataError::EmptyFile)));
        assert!(matches!(
            parse("1,2\n3\n", None),
            Err(DataError::RaggedRows { row: 2, .. })
        ));
        assert!(matches!(
            parse("1,2,+1\n1,2,maybe\n", Some(LabelColumn::Last)),
            Err(DataError::UnknownLabelToken { row: 2, .. })
        ));
        assert!(matches!(parse("1,2\n1,nan\n", None), Err(DataError::ParseError { row: 2, col: 2, .. })));
    }

    #[test]
    fn round_trip() {
        let d = parse("1.5,-2e-3,+1\n0.1,7,-1\n", Some(LabelColumn::Last)).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &d).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x1,x2,label\n"));
        let back = parse(&text, Some(LabelColumn::Last)).unwrap();
        assert_eq!(back.samples(), d.samples());
        assert_eq!(back.labels(), d.labels());
    }
}
