use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::dataset::{Dataset, RawColumn, RawDataset, Task};
use crate::error::{Error, Result};

/// Selects the response column by header name or zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    /// Digits parse as an index; anything else is a name. A header that is
    /// literally numeric still resolves by name first, see [`load_csv`].
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        })
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Name(n) => f.write_str(n),
            ColumnRef::Index(i) => write!(f, "{i}"),
        }
    }
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field == "NA"
}

/// Reads a comma-separated file with a header row.
///
/// Predictor columns where every value parses as a number are continuous,
/// all others categorical. Empty and `NA` fields are rejected.
/// Classification responses must have exactly two distinct values; they map
/// to 0 and 1 in sorted order (numeric order when both are numbers).
pub fn load_csv(path: &Path, response: &ColumnRef, task: Task) -> Result<RawDataset> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::data_at(1, format!("unreadable header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < 2 {
        return Err(Error::data_at(
            1,
            "need a response column and at least one predictor",
        ));
    }

    let response_idx = match response {
        ColumnRef::Name(name) => headers.iter().position(|h| h == name),
        ColumnRef::Index(i) => headers
            .iter()
            .position(|h| h == &i.to_string())
            .or((*i < headers.len()).then_some(*i)),
    }
    .ok_or_else(|| Error::data(format!("response column '{response}' not found")))?;

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::data_at(line, format!("unparseable row: {e}"))
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != headers.len() {
            return Err(Error::data_at(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for (j, field) in record.iter().enumerate() {
            if is_missing(field) {
                return Err(Error::data_at(
                    line,
                    format!("missing value in column '{}'", headers[j]),
                ));
            }
            cells[j].push(field.to_string());
        }
    }

    let n = cells[0].len();
    if n < 2 {
        return Err(Error::data("need at least 2 data rows"));
    }

    let response_raw = cells.remove(response_idx);
    let mut column_names = headers;
    column_names.remove(response_idx);

    let (response, class_labels) = match task {
        Task::Regression => {
            let mut y = Vec::with_capacity(n);
            for (i, v) in response_raw.iter().enumerate() {
                let parsed = v.parse::<f64>().ok().filter(|x| x.is_finite());
                y.push(parsed.ok_or_else(|| {
                    Error::data_at(i + 2, format!("non-numeric response '{v}'"))
                })?);
            }
            if y.iter().all(|&v| v == y[0]) {
                return Err(Error::data("response is constant"));
            }
            (y, None)
        }
        Task::Classification => {
            let mut distinct: Vec<&String> = response_raw.iter().collect();
            distinct.sort();
            distinct.dedup();
            if distinct.len() > 2 {
                return Err(Error::data(format!(
                    "more than two classes in response ({} distinct values)",
                    distinct.len()
                )));
            }
            if distinct.len() < 2 {
                return Err(Error::data("response is constant"));
            }
            let (mut lo, mut hi) = (distinct[0].clone(), distinct[1].clone());
            if let (Ok(a), Ok(b)) = (lo.parse::<f64>(), hi.parse::<f64>()) {
                if b < a {
                    std::mem::swap(&mut lo, &mut hi);
                }
            }
            let y = response_raw
                .iter()
                .map(|v| if *v == lo { 0.0 } else { 1.0 })
                .collect();
            (y, Some([lo, hi]))
        }
    };

    let columns = cells
        .into_iter()
        .map(|col| {
            let parsed: Option<Vec<f64>> = col
                .iter()
                .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect();
            match parsed {
                Some(values) => RawColumn::Continuous(values),
                None => RawColumn::Categorical(col),
            }
        })
        .collect();

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".to_string());

    Ok(RawDataset {
        name,
        column_names,
        columns,
        response,
        task,
        class_labels,
    })
}

/// Writes an all-continuous dataset as CSV with the response in the last
/// column named `y`. Floats use the shortest representation that parses
/// back to the same value.
pub fn write_csv<W: Write>(ds: &Dataset, out: W) -> Result<()> {
    let io_err = |e: csv::Error| Error::data(format!("csv write failed: {e}"));
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ds.column_meta().iter().map(|m| m.name.clone()).collect();
    header.push("y".to_string());
    writer.write_record(&header).map_err(io_err)?;
    let x = ds.features();
    for (i, row) in x.outer_iter().enumerate() {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(ds.response()[i].to_string());
        writer.write_record(&record).map_err(io_err)?;
    }
    writer
        .flush()
        .map_err(|e| Error::data(format!("csv write failed: {e}")))?;
    Ok(())
}
