//! Flow-record tables: schema, CSV loading, class catalog and summaries.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Identifier,
    BinaryLabel,
    AttackClass,
}

impl ColumnKind {
    pub fn is_feature(self) -> bool {
        matches!(self, ColumnKind::Numeric | ColumnKind::Categorical)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        ColumnSpec {
            name: name.into(),
            kind,
        }
    }
}

/// Ordered, validated column declarations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureSchema {
    columns: Vec<ColumnSpec>,
    #[serde(skip)]
    label: usize,
    #[serde(skip)]
    attack: usize,
}

impl FeatureSchema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column {:?}", c.name)));
            }
        }
        let find_one = |kind: ColumnKind, what: &str| -> Result<usize> {
            let hits: Vec<usize> = columns
                .iter()
                .enumerate()
                .filter(|(_, c)| c.kind == kind)
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [i] => Ok(*i),
                [] => Err(Error::Schema(format!("no {what} column declared"))),
                _ => Err(Error::Schema(format!(
                    "{} {what} columns declared, expected exactly one",
                    hits.len()
                ))),
            }
        };
        let label = find_one(ColumnKind::BinaryLabel, "binary_label")?;
        let attack = find_one(ColumnKind::AttackClass, "attack_class")?;
        if !columns.iter().any(|c| c.kind.is_feature()) {
            return Err(Error::Schema(
                "schema has no numeric or categorical feature column".into(),
            ));
        }
        Ok(FeatureSchema {
            columns,
            label,
            attack,
        })
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn label_index(&self) -> usize {
        self.label
    }

    pub fn attack_index(&self) -> usize {
        self.attack
    }

    /// Names of columns of the given kind, in schema order.
    pub fn names_of(&self, kind: ColumnKind) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| c.kind == kind)
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Renders the schema as a TOML `columns = [...]` fragment, the form the
    /// experiment config expects.
    pub fn to_toml_fragment(&self) -> String {
        columns_to_toml(&self.columns)
    }
}

/// `columns = [...]` TOML fragment for a (possibly unvalidated) column list.
pub fn columns_to_toml(columns: &[ColumnSpec]) -> String {
    let mut out = String::from("columns = [\n");
    for c in columns {
        let kind = match c.kind {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Identifier => "identifier",
            ColumnKind::BinaryLabel => "binary_label",
            ColumnKind::AttackClass => "attack_class",
        };
        out.push_str(&format!(
            "  {{ name = {}, kind = \"{kind}\" }},\n",
            toml_string(&c.name)
        ));
    }
    out.push_str("]\n");
    out
}

fn toml_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl<'de> Deserialize<'de> for FeatureSchema {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            columns: Vec<ColumnSpec>,
        }
        let raw = Raw::deserialize(d)?;
        FeatureSchema::new(raw.columns).map_err(serde::de::Error::custom)
    }
}

/// Column storage. Categorical, identifier and attack-class columns are text.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Text(Vec<String>),
    Label(Vec<u8>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Text(v) => v.len(),
            Column::Label(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Text(v) => Column::Text(rows.iter().map(|&r| v[r].clone()).collect()),
            Column::Label(v) => Column::Label(rows.iter().map(|&r| v[r]).collect()),
        }
    }

    fn cell_string(&self, row: usize) -> String {
        match self {
            Column::Numeric(v) => format!("{}", v[row]),
            Column::Text(v) => v[row].clone(),
            Column::Label(v) => v[row].to_string(),
        }
    }
}

/// Column-major flow records. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTable {
    schema: FeatureSchema,
    columns: Vec<Column>,
    benign_name: String,
    row_count: usize,
}

impl FlowTable {
    /// Builds a table and checks every structural invariant: one column per
    /// schema entry with the matching storage type, equal lengths, finite
    /// numeric cells, 0/1 labels consistent with the attack-class column.
    pub fn new(
        schema: FeatureSchema,
        columns: Vec<Column>,
        benign_name: impl Into<String>,
    ) -> Result<Self> {
        let benign_name = benign_name.into();
        if columns.len() != schema.len() {
            return Err(Error::Schema(format!(
                "{} columns supplied for a {}-column schema",
                columns.len(),
                schema.len()
            )));
        }
        let row_count = columns.first().map_or(0, Column::len);
        for (spec, col) in schema.columns().iter().zip(&columns) {
            let ok = matches!(
                (spec.kind, col),
                (ColumnKind::Numeric, Column::Numeric(_))
                    | (ColumnKind::BinaryLabel, Column::Label(_))
                    | (
                        ColumnKind::Categorical | ColumnKind::Identifier | ColumnKind::AttackClass,
                        Column::Text(_)
                    )
            );
            if !ok {
                return Err(Error::Schema(format!(
                    "column {:?} storage does not match kind {:?}",
                    spec.name, spec.kind
                )));
            }
            if col.len() != row_count {
                return Err(Error::Schema(format!(
                    "column {:?} has {} rows, expected {row_count}",
                    spec.name,
                    col.len()
                )));
            }
            if let Column::Numeric(v) = col {
                if let Some(r) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::Row {
                        row: r + 1,
                        message: format!("non-finite value in column {:?}", spec.name),
                    });
                }
            }
        }
        let table = FlowTable {
            schema,
            columns,
            benign_name,
            row_count,
        };
        for (r, (&y, class)) in table
            .labels()
            .iter()
            .zip(table.attack_classes())
            .enumerate()
        {
            check_label(y, class, &table.benign_name).map_err(|message| Error::Row {
                row: r + 1,
                message,
            })?;
        }
        Ok(table)
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.schema.index_of(name).map(|i| &self.columns[i])
    }

    pub fn benign_name(&self) -> &str {
        &self.benign_name
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn labels(&self) -> &[u8] {
        match &self.columns[self.schema.label_index()] {
            Column::Label(v) => v,
            _ => unreachable!("label column storage checked in FlowTable::new"),
        }
    }

    pub fn attack_classes(&self) -> &[String] {
        match &self.columns[self.schema.attack_index()] {
            Column::Text(v) => v,
            _ => unreachable!("attack column storage checked in FlowTable::new"),
        }
    }

    /// New table holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FlowTable {
        FlowTable {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            benign_name: self.benign_name.clone(),
            row_count: rows.len(),
        }
    }

    /// Replaces schema and columns wholesale; used by transforms that keep
    /// the row set and label columns intact.
    pub(crate) fn with_columns(&self, schema: FeatureSchema, columns: Vec<Column>) -> FlowTable {
        FlowTable {
            schema,
            columns,
            benign_name: self.benign_name.clone(),
            row_count: self.row_count,
        }
    }

    /// Writes the table as RFC-4180 CSV with a header row, schema order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.schema.columns().iter().map(|c| c.name.as_str()))?;
        for r in 0..self.row_count {
            out.write_record(self.columns.iter().map(|c| c.cell_string(r)))?;
        }
        out.flush()
            .map_err(|e| Error::io("flushing CSV output", e))?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        let f = File::create(path)
            .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        self.write_csv(io::BufWriter::new(f))
    }
}

fn check_label(y: u8, class: &str, benign: &str) -> std::result::Result<(), String> {
    let is_attack = class != benign;
    match (y, is_attack) {
        (0, false) | (1, true) => Ok(()),
        (0, true) => Err(format!("label 0 but attack class is {class:?}")),
        (1, false) => Err(format!("label 1 but attack class is the benign class {benign:?}")),
        _ => Err(format!("label {y} is not 0 or 1")),
    }
}

/// What to do with a row whose cells fail to parse or validate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowPolicy {
    #[default]
    Abort,
    DropRow,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub benign_name: String,
    pub invalid_rows: RowPolicy,
}

impl LoadOptions {
    pub fn new(benign_name: impl Into<String>) -> Self {
        LoadOptions {
            benign_name: benign_name.into(),
            invalid_rows: RowPolicy::Abort,
        }
    }
}

/// A row discarded under [`RowPolicy::DropRow`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowIssue {
    pub row: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub table: FlowTable,
    pub dropped: Vec<RowIssue>,
}

pub fn load_csv(path: &Path, schema: &FeatureSchema, opts: &LoadOptions) -> Result<Loaded> {
    // an unreadable dataset is a data problem for the caller, not a
    // runtime failure
    let f = File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    if f.metadata().map(|m| m.len() == 0).unwrap_or(false) {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    read_csv(io::BufReader::new(f), schema, opts).map_err(|e| match e {
        Error::EmptyFile { .. } => Error::EmptyFile {
            path: path.to_path_buf(),
        },
        other => other,
    })
}

/// Parses CSV from any reader. Header names must match the schema exactly,
/// in any order; rows are stored in schema column order.
pub fn read_csv<R: Read>(reader: R, schema: &FeatureSchema, opts: &LoadOptions) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyFile {
            path: "<input>".into(),
        });
    }

    // schema column -> CSV field position
    let mut positions = vec![usize::MAX; schema.len()];
    for (pos, name) in header.iter().enumerate() {
        match schema.index_of(name) {
            Some(i) if positions[i] == usize::MAX => positions[i] = pos,
            Some(_) => return Err(Error::Schema(format!("column {name:?} repeated in header"))),
            None => return Err(Error::Schema(format!("unexpected column {name:?} in header"))),
        }
    }
    if let Some(i) = positions.iter().position(|&p| p == usize::MAX) {
        return Err(Error::Schema(format!(
            "column {:?} missing from header",
            schema.columns()[i].name
        )));
    }

    let mut builders: Vec<Column> = schema
        .columns()
        .iter()
        .map(|c| match c.kind {
            ColumnKind::Numeric => Column::Numeric(Vec::new()),
            ColumnKind::BinaryLabel => Column::Label(Vec::new()),
            _ => Column::Text(Vec::new()),
        })
        .collect();
    let mut dropped = Vec::new();
    let mut row_buf: Vec<Cell> = Vec::with_capacity(schema.len());
    let label_idx = schema.label_index();
    let attack_idx = schema.attack_index();

    for (n, record) in rdr.records().enumerate() {
        let row = n + 1;
        let record = record?;
        row_buf.clear();
        let parsed = (|| -> std::result::Result<(), String> {
            for (spec, &pos) in schema.columns().iter().zip(&positions) {
                let raw = &record[pos];
                row_buf.push(parse_cell(spec, raw)?);
            }
            let y = match row_buf[label_idx] {
                Cell::Label(y) => y,
                _ => unreachable!(),
            };
            let class = match &row_buf[attack_idx] {
                Cell::Text(s) => s.as_str(),
                _ => unreachable!(),
            };
            check_label(y, class, &opts.benign_name)
        })();
        match parsed {
            Ok(()) => {
                for (col, cell) in builders.iter_mut().zip(row_buf.drain(..)) {
                    match (col, cell) {
                        (Column::Numeric(v), Cell::Num(x)) => v.push(x),
                        (Column::Text(v), Cell::Text(s)) => v.push(s),
                        (Column::Label(v), Cell::Label(y)) => v.push(y),
                        _ => unreachable!("builders mirror schema kinds"),
                    }
                }
            }
            Err(message) => match opts.invalid_rows {
                RowPolicy::Abort => return Err(Error::Row { row, message }),
                RowPolicy::DropRow => {
                    log::warn!("dropping row {row}: {message}");
                    dropped.push(RowIssue { row, message });
                }
            },
        }
    }

    let table = FlowTable::new(schema.clone(), builders, opts.benign_name.clone())?;
    Ok(Loaded { table, dropped })
}

enum Cell {
    Num(f64),
    Text(String),
    Label(u8),
}

fn parse_cell(spec: &ColumnSpec, raw: &str) -> std::result::Result<Cell, String> {
    match spec.kind {
        ColumnKind::Numeric => {
            let t = raw.trim();
            let x: f64 = t
                .parse()
                .map_err(|_| format!("column {:?}: cannot parse {raw:?} as a number", spec.name))?;
            if !x.is_finite() {
                return Err(format!("column {:?}: non-finite value {raw:?}", spec.name));
            }
            Ok(Cell::Num(x))
        }
        ColumnKind::BinaryLabel => match raw.trim() {
            "0" => Ok(Cell::Label(0)),
            "1" => Ok(Cell::Label(1)),
            other => Err(format!("column {:?}: label {other:?} is not 0 or 1", spec.name)),
        },
        ColumnKind::AttackClass => Ok(Cell::Text(raw.trim().to_string())),
        ColumnKind::Categorical | ColumnKind::Identifier => Ok(Cell::Text(raw.to_string())),
    }
}

/// Proposes a schema from a CSV header and its first `sample_rows` rows.
///
/// Columns that parse as numbers become numeric, the rest categorical;
/// well-known label, attack-category and endpoint/time/id names are
/// suggested as such. The result is meant for human review and is never
/// applied implicitly.
pub fn infer_schema<R: Read>(reader: R, sample_rows: usize) -> Result<Vec<ColumnSpec>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() {
        return Err(Error::EmptyFile {
            path: "<input>".into(),
        });
    }
    let mut numeric = vec![true; header.len()];
    for record in rdr.records().take(sample_rows) {
        let record = record?;
        for (i, field) in record.iter().enumerate() {
            if i < numeric.len() && field.trim().parse::<f64>().is_err() {
                numeric[i] = false;
            }
        }
    }
    let mut have_label = false;
    let mut have_attack = false;
    let mut out = Vec::with_capacity(header.len());
    for (i, name) in header.iter().enumerate() {
        let lower = name.to_ascii_lowercase();
        let kind = if !have_label && (lower == "label" || lower == "is_attack") {
            have_label = true;
            ColumnKind::BinaryLabel
        } else if !have_attack && (lower == "attack" || lower == "attack_cat" || lower == "attack_class") {
            have_attack = true;
            ColumnKind::AttackClass
        } else if looks_like_identifier(&lower) {
            ColumnKind::Identifier
        } else if numeric[i] {
            ColumnKind::Numeric
        } else {
            ColumnKind::Categorical
        };
        out.push(ColumnSpec::new(name, kind));
    }
    Ok(out)
}

fn looks_like_identifier(lower: &str) -> bool {
    const EXACT: &[&str] = &[
        "id", "srcip", "dstip", "sport", "dsport", "stime", "ltime", "timestamp", "flow_id",
    ];
    EXACT.contains(&lower)
        || lower.contains("_addr")
        || lower.ends_with("_port")
        || lower.ends_with("_ip")
        || lower.starts_with("src_ip")
        || lower.starts_with("dst_ip")
}

/// Benign name plus attack classes a_1..a_n in first-appearance order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassCatalog {
    benign_name: String,
    attack_names: Vec<String>,
    /// Index 0 is the benign class, `i` is `attack_names[i - 1]`.
    counts: Vec<usize>,
    #[serde(skip)]
    row_classes: Vec<u32>,
}

/// Class id of the benign class in a [`ClassCatalog`].
pub const BENIGN_ID: u32 = 0;

impl ClassCatalog {
    pub fn build(table: &FlowTable) -> Result<Self> {
        let benign = table.benign_name();
        let mut ids: HashMap<&str, u32> = HashMap::new();
        let mut attack_names = Vec::new();
        let mut counts = vec![0usize];
        let mut row_classes = Vec::with_capacity(table.row_count());
        for class in table.attack_classes() {
            let id = if class == benign {
                BENIGN_ID
            } else {
                *ids.entry(class.as_str()).or_insert_with(|| {
                    attack_names.push(class.clone());
                    counts.push(0);
                    attack_names.len() as u32
                })
            };
            counts[id as usize] += 1;
            row_classes.push(id);
        }
        if attack_names.is_empty() {
            return Err(Error::Data(
                "table has no attack classes; no zero-day scenario can be defined".into(),
            ));
        }
        Ok(ClassCatalog {
            benign_name: benign.to_string(),
            attack_names,
            counts,
            row_classes,
        })
    }

    pub fn benign_name(&self) -> &str {
        &self.benign_name
    }

    pub fn attack_names(&self) -> &[String] {
        &self.attack_names
    }

    pub fn n_attacks(&self) -> usize {
        self.attack_names.len()
    }

    /// Total class count including benign.
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn class_name(&self, id: u32) -> &str {
        if id == BENIGN_ID {
            &self.benign_name
        } else {
            &self.attack_names[id as usize - 1]
        }
    }

    pub fn class_id(&self, name: &str) -> Option<u32> {
        if name == self.benign_name {
            return Some(BENIGN_ID);
        }
        self.attack_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u32 + 1)
    }

    pub fn count(&self, id: u32) -> usize {
        self.counts[id as usize]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn row_count(&self) -> usize {
        self.row_classes.len()
    }

    /// Class id for every row of the source table.
    pub fn row_classes(&self) -> &[u32] {
        &self.row_classes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericSummary {
    pub name: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalSummary {
    pub name: String,
    pub cardinality: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSummary {
    pub row_count: usize,
    /// Every column except the binary label and attack class.
    pub feature_columns: usize,
    pub attack_rows: usize,
    pub attack_fraction: Option<f64>,
    pub class_counts: Vec<(String, usize)>,
    pub numeric: Vec<NumericSummary>,
    pub categorical: Vec<CategoricalSummary>,
    pub identifiers: Vec<String>,
}

pub fn summarize(table: &FlowTable) -> TableSummary {
    let mut class_counts: Vec<(String, usize)> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for c in table.attack_classes() {
        let i = *index.entry(c.as_str()).or_insert_with(|| {
            class_counts.push((c.clone(), 0));
            class_counts.len() - 1
        });
        class_counts[i].1 += 1;
    }
    let attack_rows = table.labels().iter().filter(|&&y| y == 1).count();
    let mut numeric = Vec::new();
    let mut categorical = Vec::new();
    let mut identifiers = Vec::new();
    for (spec, col) in table.schema().columns().iter().zip(table.columns()) {
        match (spec.kind, col) {
            (ColumnKind::Numeric, Column::Numeric(v)) => {
                let (min, max) = v.iter().fold((None, None), |(lo, hi): (Option<f64>, Option<f64>), &x| {
                    (
                        Some(lo.map_or(x, |m| m.min(x))),
                        Some(hi.map_or(x, |m| m.max(x))),
                    )
                });
                let mean = (!v.is_empty()).then(|| neumaier_sum(v) / v.len() as f64);
                numeric.push(NumericSummary {
                    name: spec.name.clone(),
                    min,
                    max,
                    mean,
                });
            }
            (ColumnKind::Categorical, Column::Text(v)) => {
                let distinct: HashSet<&str> = v.iter().map(String::as_str).collect();
                categorical.push(CategoricalSummary {
                    name: spec.name.clone(),
                    cardinality: distinct.len(),
                });
            }
            (ColumnKind::Identifier, _) => identifiers.push(spec.name.clone()),
            _ => {}
        }
    }
    let feature_columns = table
        .schema()
        .columns()
        .iter()
        .filter(|c| !matches!(c.kind, ColumnKind::BinaryLabel | ColumnKind::AttackClass))
        .count();
    TableSummary {
        row_count: table.row_count(),
        feature_columns,
        attack_rows,
        attack_fraction: (table.row_count() > 0)
            .then(|| attack_rows as f64 / table.row_count() as f64),
        class_counts,
        numeric,
        categorical,
        identifiers,
    }
}

/// Size of a published full dataset export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnownExport {
    pub name: &'static str,
    pub rows: usize,
    pub attack_rows: usize,
}

pub const KNOWN_EXPORTS: &[KnownExport] = &[
    KnownExport {
        name: "NF-UNSW-NB15-v2",
        rows: 2_390_275,
        attack_rows: 95_053,
    },
    KnownExport {
        name: "UNSW-NB15",
        rows: 2_540_044,
        attack_rows: 321_283,
    },
];

/// A warning when `rows` equals the size of a known full export but the
/// attack count does not. Loose on purpose: a mismatch usually means a
/// relabelled or differently cleaned copy, which is worth knowing but not
/// fatal.
pub fn check_known_counts(rows: usize, attack_rows: usize) -> Option<String> {
    let known = KNOWN_EXPORTS.iter().find(|k| k.rows == rows)?;
    (known.attack_rows != attack_rows).then(|| {
        format!(
            "{rows} rows matches the full {} export, which has {} attack rows; this table has {attack_rows}",
            known.name, known.attack_rows
        )
    })
}

/// Compensated (Neumaier) summation.
pub(crate) fn neumaier_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
