//! Raw tabular input: CSV and sparse `label idx:val` text, plus one-hot
//! encoding of categorical columns.

use std::collections::HashMap;
use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};

use crate::error::{MlsvmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Parsed but not yet encoded table. The label column (if any) always holds
/// [`Cell::Text`] with the canonical label string.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub label_column: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    SparseText,
}

impl std::str::FromStr for Format {
    type Err = MlsvmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "sparse" | "sparse_text" | "libsvm" => Ok(Format::SparseText),
            other => Err(MlsvmError::InvalidConfig(format!(
                "unknown format `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub has_header: bool,
    /// `None` for unlabeled data.
    pub label: Option<LabelColumn>,
    /// Columns forced to categorical, by name or index.
    pub categorical: Vec<LabelColumn>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: false,
            label: Some(LabelColumn::Index(0)),
            categorical: Vec::new(),
        }
    }
}

/// Canonical spelling of a label: numeric labels go through `f64` so that
/// `+1`, `1` and `1.0` name the same class.
pub fn canonical_label(raw: &str) -> String {
    let t = raw.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => format!("{v}"),
        _ => t.to_string(),
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse<R: Read>(input: R, format: Format, csv_opts: &CsvOptions) -> Result<RawTable> {
    match format {
        Format::Csv => parse_csv(input, csv_opts),
        Format::SparseText => parse_sparse(std::io::BufReader::new(input)),
    }
}

fn resolve_column(col: &LabelColumn, names: &[String]) -> Result<usize> {
    match col {
        LabelColumn::Index(i) if *i < names.len() => Ok(*i),
        LabelColumn::Index(i) => Err(MlsvmError::InvalidConfig(format!(
            "column index {i} out of range ({} columns)",
            names.len()
        ))),
        LabelColumn::Name(n) => names
            .iter()
            .position(|c| c == n)
            .ok_or_else(|| MlsvmError::InvalidConfig(format!("no column named `{n}`"))),
    }
}

pub fn parse_csv<R: Read>(input: R, opts: &CsvOptions) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut names: Option<Vec<String>> = if opts.has_header {
        Some(reader.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut raw: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record.get(0).is_some_and(str::is_empty) {
            continue;
        }
        let expected = names.as_ref().map(Vec::len).unwrap_or(record.len());
        if record.len() != expected {
            return Err(MlsvmError::Structural {
                line,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        if names.is_none() {
            names = Some((0..record.len()).map(|i| format!("c{i}")).collect());
        }
        raw.push(record.iter().map(str::to_string).collect());
    }
    let names = names.unwrap_or_default();

    let label_column = opts
        .label
        .as_ref()
        .map(|l| resolve_column(l, &names))
        .transpose()?;
    let mut forced = vec![false; names.len()];
    for c in &opts.categorical {
        forced[resolve_column(c, &names)?] = true;
    }

    let kinds: Vec<ColumnKind> = (0..names.len())
        .map(|j| {
            if Some(j) == label_column
                || forced[j]
                || raw.iter().any(|r| parse_f64(&r[j]).is_none())
            {
                ColumnKind::Categorical
            } else {
                ColumnKind::Numeric
            }
        })
        .collect();

    let rows = raw
        .into_iter()
        .map(|r| {
            r.into_iter()
                .enumerate()
                .map(|(j, v)| {
                    if Some(j) == label_column {
                        Cell::Text(canonical_label(&v))
                    } else if kinds[j] == ColumnKind::Numeric {
                        Cell::Num(parse_f64(&v).unwrap_or_default())
                    } else {
                        Cell::Text(v)
                    }
                })
                .collect()
        })
        .collect();

    let columns = names
        .into_iter()
        .zip(kinds)
        .map(|(name, kind)| Column { name, kind })
        .collect();
    Ok(RawTable {
        columns,
        rows,
        label_column,
    })
}

/// Sparse text: `<label> <idx>:<val> ...` with 1-based strictly increasing
/// indices. A line whose first token already contains `:` is unlabeled; a
/// file must be consistently labeled or unlabeled.
pub fn parse_sparse<R: BufRead>(input: R) -> Result<RawTable> {
    let mut labels: Vec<String> = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labeled: Option<bool> = None;
    let mut dim = 0usize;

    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut tokens = t.split_whitespace().peekable();
        let has_label = !tokens.peek().is_some_and(|tok| tok.contains(':'));
        match labeled {
            None => labeled = Some(has_label),
            Some(l) if l != has_label => {
                return Err(MlsvmError::Structural {
                    line: lineno,
                    message: "mixed labeled and unlabeled lines".into(),
                })
            }
            _ => {}
        }
        if has_label {
            labels.push(canonical_label(tokens.next().unwrap_or_default()));
        }
        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| MlsvmError::Parse {
                line: lineno,
                message: format!("expected `index:value`, found `{tok}`"),
            })?;
            let idx: usize = idx.parse().map_err(|_| MlsvmError::Parse {
                line: lineno,
                message: format!("bad feature index `{idx}`"),
            })?;
            if idx == 0 || idx <= last {
                return Err(MlsvmError::Parse {
                    line: lineno,
                    message: format!(
                        "feature indices must be 1-based and increasing (`{idx}` after `{last}`)"
                    ),
                });
            }
            let val = parse_f64(val).ok_or_else(|| MlsvmError::Parse {
                line: lineno,
                message: format!("bad feature value `{val}`"),
            })?;
            last = idx;
            row.push((idx, val));
        }
        dim = dim.max(last);
        entries.push(row);
    }

    let labeled = labeled.unwrap_or(true);
    let offset = usize::from(labeled);
    let mut columns = Vec::with_capacity(dim + offset);
    if labeled {
        columns.push(Column {
            name: "label".into(),
            kind: ColumnKind::Categorical,
        });
    }
    columns.extend((1..=dim).map(|i| Column {
        name: format!("f{i}"),
        kind: ColumnKind::Numeric,
    }));

    let mut labels = labels.into_iter();
    let rows = entries
        .into_iter()
        .map(|sparse| {
            let mut row = Vec::with_capacity(dim + offset);
            if labeled {
                row.push(Cell::Text(labels.next().unwrap_or_default()));
            }
            row.extend(std::iter::repeat_n(Cell::Num(0.0), dim));
            for (idx, val) in sparse {
                row[offset + idx - 1] = Cell::Num(val);
            }
            row
        })
        .collect();

    Ok(RawTable {
        columns,
        rows,
        label_column: labeled.then_some(0),
    })
}

/// Per-column category lists, fixed at fit time so that later data is
/// encoded into the same columns.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OneHotSchema {
    /// `Some(categories)` for categorical feature columns, in first-seen order.
    pub columns: Vec<Option<Vec<String>>>,
}

impl OneHotSchema {
    pub fn fit(table: &RawTable) -> OneHotSchema {
        let columns = table
            .columns
            .iter()
            .enumerate()
            .map(|(j, col)| {
                if Some(j) == table.label_column || col.kind == ColumnKind::Numeric {
                    return None;
                }
                let mut seen: Vec<String> = Vec::new();
                let mut index: HashMap<String, usize> = HashMap::new();
                for row in &table.rows {
                    let v = row[j].text();
                    if !index.contains_key(&v) {
                        index.insert(v.clone(), seen.len());
                        seen.push(v);
                    }
                }
                Some(seen)
            })
            .collect();
        OneHotSchema { columns }
    }

    pub fn is_identity(&self) -> bool {
        self.columns.iter().all(Option::is_none)
    }

    /// Encode `table` with this schema. Categories unseen at fit time become
    /// all-zero blocks.
    pub fn apply(&self, table: &RawTable) -> Result<RawTable> {
        if table.columns.len() != self.columns.len() {
            return Err(MlsvmError::DimensionMismatch {
                expected: self.columns.len(),
                found: table.columns.len(),
            });
        }
        let lookups: Vec<Option<HashMap<&str, usize>>> = self
            .columns
            .iter()
            .map(|c| {
                c.as_ref().map(|cats| {
                    cats.iter()
                        .enumerate()
                        .map(|(i, s)| (s.as_str(), i))
                        .collect()
                })
            })
            .collect();

        let mut columns = Vec::new();
        let mut label_column = None;
        for (j, col) in table.columns.iter().enumerate() {
            if Some(j) == table.label_column {
                label_column = Some(columns.len());
            }
            match &self.columns[j] {
                Some(cats) => columns.extend(cats.iter().map(|c| Column {
                    name: format!("{}={}", col.name, c),
                    kind: ColumnKind::Numeric,
                })),
                None => columns.push(col.clone()),
            }
        }

        let rows = table
            .rows
            .iter()
            .map(|row| {
                let mut out = Vec::with_capacity(columns.len());
                for (j, cell) in row.iter().enumerate() {
                    match (&self.columns[j], &lookups[j]) {
                        (Some(cats), Some(lookup)) => {
                            let hit = lookup.get(cell.text().as_str()).copied();
                            out.extend(
                                (0..cats.len())
                                    .map(|c| Cell::Num(if Some(c) == hit { 1.0 } else { 0.0 })),
                            );
                        }
                        _ => out.push(cell.clone()),
                    }
                }
                out
            })
            .collect();

        Ok(RawTable {
            columns,
            rows,
            label_column,
        })
    }
}

/// Replace every categorical column by one indicator column per category.
pub fn one_hot_encode(table: &RawTable) -> RawTable {
    OneHotSchema::fit(table)
        .apply(table)
        .expect("schema fitted on the same table")
}
