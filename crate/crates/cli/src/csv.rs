//! Hand-rolled CSV ingestion for the three input formats.
//!
//! The formats are plain comma-separated values without quoting:
//!
//! - sample file: rows `example_id,label` (labels 1-based), optional
//!   literal header `example_id,label`;
//! - predictions file: required header `example_id,f1,...,fn`, then one
//!   row per example with one 1-based label column per classifier;
//! - weight files: rows `classifier_id,weight`, optional literal header
//!   `classifier_id,weight`; ids must match the predictions header in
//!   order.
//!
//! Parse failures report the file, 1-based line, and 1-based column
//! (field position).

use std::path::{Path, PathBuf};

use crate::error::CliError;

pub struct ParsedSample {
    pub ids: Vec<String>,
    /// 1-based labels exactly as written.
    pub labels: Vec<usize>,
}

pub struct ParsedPredictions {
    pub classifier_names: Vec<String>,
    pub ids: Vec<String>,
    /// `columns[j][i]` is classifier j's 1-based label on example i.
    pub columns: Vec<Vec<usize>>,
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

fn split_fields(line: &str) -> Vec<String> {
    line.split(',').map(|f| f.trim().to_string()).collect()
}

fn parse_label(
    file: &PathBuf,
    line_no: usize,
    column: usize,
    field: &str,
) -> Result<usize, CliError> {
    let value: i64 = field.parse().map_err(|_| {
        CliError::parse(
            file,
            line_no,
            column,
            format!("expected an integer class label, got '{field}'"),
        )
    })?;
    if value < 1 {
        return Err(CliError::parse(
            file,
            line_no,
            column,
            format!("class labels are 1-based positive integers, got {value}"),
        ));
    }
    Ok(value as usize)
}

/// Parse a `example_id,label` file.
pub fn parse_sample_csv(path: &Path) -> Result<ParsedSample, CliError> {
    let file = path.to_path_buf();
    let lines = read_lines(path)?;
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_fields(line);
        if idx == 0 && fields == ["example_id", "label"] {
            continue;
        }
        if fields.len() != 2 {
            return Err(CliError::parse(
                &file,
                line_no,
                fields.len().max(1),
                format!("expected 2 fields (example_id,label), got {}", fields.len()),
            ));
        }
        if fields[0].is_empty() {
            return Err(CliError::parse(&file, line_no, 1, "empty example id"));
        }
        ids.push(fields[0].clone());
        labels.push(parse_label(&file, line_no, 2, &fields[1])?);
    }
    if ids.is_empty() {
        return Err(CliError::Data(format!(
            "sample file {} contains no examples",
            file.display()
        )));
    }
    Ok(ParsedSample { ids, labels })
}

/// Parse a predictions file with header `example_id,f1,...,fn`.
pub fn parse_predictions_csv(path: &Path) -> Result<ParsedPredictions, CliError> {
    let file = path.to_path_buf();
    let lines = read_lines(path)?;
    let mut rows = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = rows.next().ok_or_else(|| {
        CliError::parse(&file, 1, 1, "missing header line 'example_id,f1,...,fn'")
    })?;
    let header_fields = split_fields(header);
    if header_fields.len() < 2 || header_fields[0] != "example_id" {
        return Err(CliError::parse(
            &file,
            1,
            1,
            "header must be 'example_id' followed by one column per classifier",
        ));
    }
    let classifier_names: Vec<String> = header_fields[1..].to_vec();
    if let Some(j) = classifier_names.iter().position(|n| n.is_empty()) {
        return Err(CliError::parse(&file, 1, j + 2, "empty classifier name in header"));
    }
    let n = classifier_names.len();

    let mut ids = Vec::new();
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, line) in rows {
        let line_no = idx + 1;
        let fields = split_fields(line);
        if fields.len() != n + 1 {
            return Err(CliError::parse(
                &file,
                line_no,
                fields.len().max(1),
                format!("expected {} fields, got {}", n + 1, fields.len()),
            ));
        }
        if fields[0].is_empty() {
            return Err(CliError::parse(&file, line_no, 1, "empty example id"));
        }
        ids.push(fields[0].clone());
        for (j, field) in fields[1..].iter().enumerate() {
            columns[j].push(parse_label(&file, line_no, j + 2, field)?);
        }
    }
    if ids.is_empty() {
        return Err(CliError::Data(format!(
            "predictions file {} contains no examples",
            file.display()
        )));
    }
    Ok(ParsedPredictions {
        classifier_names,
        ids,
        columns,
    })
}

/// Parse a `classifier_id,weight` file.
pub fn parse_weights_csv(path: &Path) -> Result<Vec<(String, f64)>, CliError> {
    let file = path.to_path_buf();
    let lines = read_lines(path)?;
    let mut weights = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_fields(line);
        if idx == 0 && fields == ["classifier_id", "weight"] {
            continue;
        }
        if fields.len() != 2 {
            return Err(CliError::parse(
                &file,
                line_no,
                fields.len().max(1),
                format!("expected 2 fields (classifier_id,weight), got {}", fields.len()),
            ));
        }
        let weight: f64 = fields[1].parse().map_err(|_| {
            CliError::parse(
                &file,
                line_no,
                2,
                format!("expected a real-valued weight, got '{}'", fields[1]),
            )
        })?;
        weights.push((fields[0].clone(), weight));
    }
    if weights.is_empty() {
        return Err(CliError::Data(format!(
            "weight file {} contains no rows",
            file.display()
        )));
    }
    Ok(weights)
}
