//! Identifier dropping, label encoding and min-max scaling.
//!
//! The default fit scope is the whole dataset, which matches the reference
//! procedure but lets test-fold statistics into the scaler. `TrainOnly`
//! fits both transforms on the training rows and clamps everything else.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowdata::{Column, ColumnKind, ColumnSpec, FeatureSchema, FlowTable, BENIGN_ID};

/// Removes every identifier-kind column. Row order and label columns are untouched.
pub fn drop_identifiers(table: &FlowTable) -> FlowTable {
    let keep: Vec<usize> = table
        .schema()
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind != ColumnKind::Identifier)
        .map(|(i, _)| i)
        .collect();
    if keep.len() == table.schema().len() {
        return table.clone();
    }
    let specs = keep
        .iter()
        .map(|&i| table.schema().columns()[i].clone())
        .collect();
    let schema = FeatureSchema::new(specs).expect("dropping identifiers keeps schema valid");
    let columns = keep.iter().map(|&i| table.columns()[i].clone()).collect();
    table.with_columns(schema, columns)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnseenPolicy {
    Error,
    /// Map unseen values to `n_codes` (one past the last fitted code).
    #[default]
    ReserveCode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedFeature {
    name: String,
    values: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl EncodedFeature {
    fn from_values(name: String, values: Vec<String>) -> Self {
        let lookup = values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i as u32))
            .collect();
        EncodedFeature {
            name,
            values,
            lookup,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn code(&self, value: &str) -> Option<u32> {
        self.lookup.get(value).copied()
    }

    pub fn n_codes(&self) -> usize {
        self.values.len()
    }

    pub fn unseen_code(&self) -> u32 {
        self.values.len() as u32
    }
}

/// Per categorical feature, value -> code assigned by first appearance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FittedEncoder {
    features: Vec<EncodedFeature>,
}

impl FittedEncoder {
    pub fn fit(table: &FlowTable) -> Self {
        Self::fit_rows(table, None)
    }

    /// Fits on a subset of rows (in the given order) or on all rows.
    pub fn fit_rows(table: &FlowTable, rows: Option<&[usize]>) -> Self {
        let mut features = Vec::new();
        for (spec, col) in table.schema().columns().iter().zip(table.columns()) {
            if spec.kind != ColumnKind::Categorical {
                continue;
            }
            let Column::Text(cells) = col else {
                unreachable!("categorical columns are text")
            };
            let mut seen: HashMap<&str, ()> = HashMap::new();
            let mut values = Vec::new();
            let mut visit = |i: usize| {
                let v = cells[i].as_str();
                if seen.insert(v, ()).is_none() {
                    values.push(v.to_string());
                }
            };
            match rows {
                Some(rows) => rows.iter().for_each(|&r| visit(r)),
                None => (0..cells.len()).for_each(visit),
            }
            features.push(EncodedFeature::from_values(spec.name.clone(), values));
        }
        FittedEncoder { features }
    }

    pub fn features(&self) -> &[EncodedFeature] {
        &self.features
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature(&self, name: &str) -> Option<&EncodedFeature> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Replaces categorical cells by their codes; the columns become numeric.
    pub fn apply(&self, table: &FlowTable, policy: UnseenPolicy) -> Result<(FlowTable, Vec<UnseenCount>)> {
        let mut specs = Vec::with_capacity(table.schema().len());
        let mut columns = Vec::with_capacity(table.schema().len());
        let mut unseen = Vec::new();
        for (spec, col) in table.schema().columns().iter().zip(table.columns()) {
            if spec.kind != ColumnKind::Categorical {
                specs.push(spec.clone());
                columns.push(col.clone());
                continue;
            }
            let feature = self.feature(&spec.name).ok_or_else(|| {
                Error::Schema(format!("encoder has no mapping for feature {:?}", spec.name))
            })?;
            let Column::Text(cells) = col else {
                unreachable!("categorical columns are text")
            };
            let mut misses: BTreeMap<&str, usize> = BTreeMap::new();
            let mut codes = Vec::with_capacity(cells.len());
            for v in cells {
                match feature.code(v) {
                    Some(c) => codes.push(f64::from(c)),
                    None => match policy {
                        UnseenPolicy::Error => {
                            return Err(Error::UnseenCategory {
                                feature: spec.name.clone(),
                                value: v.clone(),
                            })
                        }
                        UnseenPolicy::ReserveCode => {
                            *misses.entry(v.as_str()).or_default() += 1;
                            codes.push(f64::from(feature.unseen_code()));
                        }
                    },
                }
            }
            for (value, count) in misses {
                log::warn!(
                    "feature {:?}: unseen value {value:?} x{count} mapped to reserve code {}",
                    spec.name,
                    feature.unseen_code()
                );
                unseen.push(UnseenCount {
                    feature: spec.name.clone(),
                    value: value.to_string(),
                    count,
                });
            }
            specs.push(ColumnSpec::new(spec.name.clone(), ColumnKind::Numeric));
            columns.push(Column::Numeric(codes));
        }
        let schema = FeatureSchema::new(specs)?;
        Ok((table.with_columns(schema, columns), unseen))
    }
}

#[derive(Serialize, Deserialize)]
struct EncoderDoc {
    name: String,
    mapping: BTreeMap<String, u32>,
    unseen_code: u32,
}

impl Serialize for FittedEncoder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let docs: Vec<EncoderDoc> = self
            .features
            .iter()
            .map(|f| EncoderDoc {
                name: f.name.clone(),
                mapping: f.lookup.iter().map(|(k, v)| (k.clone(), *v)).collect(),
                unseen_code: f.unseen_code(),
            })
            .collect();
        docs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FittedEncoder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let docs = Vec::<EncoderDoc>::deserialize(d)?;
        let mut features = Vec::with_capacity(docs.len());
        for doc in docs {
            let mut values = vec![None; doc.mapping.len()];
            for (v, code) in doc.mapping {
                let slot = values.get_mut(code as usize).ok_or_else(|| {
                    serde::de::Error::custom(format!("feature {}: codes not contiguous", doc.name))
                })?;
                *slot = Some(v);
            }
            let values: Option<Vec<String>> = values.into_iter().collect();
            let values = values.ok_or_else(|| {
                serde::de::Error::custom(format!("feature {}: duplicate code", doc.name))
            })?;
            features.push(EncodedFeature::from_values(doc.name, values));
        }
        Ok(FittedEncoder { features })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnseenCount {
    pub feature: String,
    pub value: String,
    pub count: usize,
}

/// Dense row-major feature matrix with its label and class companions.
///
/// Class ids follow [`crate::flowdata::ClassCatalog`]: 0 is benign, attacks
/// are numbered from 1 in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    names: Vec<String>,
    encoded: Vec<bool>,
    data: Vec<f64>,
    n_rows: usize,
    labels: Vec<u8>,
    class_ids: Vec<u32>,
    class_names: Vec<String>,
}

impl FeatureMatrix {
    /// Builds a matrix from raw parts. Classes are derived from labels
    /// (benign = 0, attack = 1) when not given.
    pub fn from_rows(names: Vec<String>, data: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        let class_ids = labels.iter().map(|&y| u32::from(y)).collect();
        Self::from_parts(
            names,
            data,
            labels,
            class_ids,
            vec!["benign".into(), "attack".into()],
        )
    }

    pub fn from_parts(
        names: Vec<String>,
        data: Vec<f64>,
        labels: Vec<u8>,
        class_ids: Vec<u32>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let d = names.len();
        if d == 0 {
            return Err(Error::InvalidInput("matrix needs at least one feature".into()));
        }
        if data.len() != labels.len() * d {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * d,
                actual: data.len(),
            });
        }
        if class_ids.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                actual: class_ids.len(),
            });
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::InvalidInput("labels must be 0 or 1".into()));
        }
        if class_ids.iter().any(|&c| c as usize >= class_names.len()) {
            return Err(Error::InvalidInput("class id without a name".into()));
        }
        Ok(FeatureMatrix {
            encoded: vec![false; d],
            n_rows: labels.len(),
            names,
            data,
            labels,
            class_ids,
            class_names,
        })
    }

    /// Converts an all-numeric table (identifiers dropped, categoricals
    /// encoded) into a matrix.
    pub fn from_table(table: &FlowTable, encoder: &FittedEncoder) -> Result<Self> {
        let mut feature_cols: Vec<(&str, &[f64])> = Vec::new();
        for (spec, col) in table.schema().columns().iter().zip(table.columns()) {
            match (spec.kind, col) {
                (ColumnKind::Numeric, Column::Numeric(v)) => feature_cols.push((&spec.name, v)),
                (ColumnKind::Categorical, _) => {
                    return Err(Error::Schema(format!(
                        "categorical column {:?} must be encoded first",
                        spec.name
                    )))
                }
                (ColumnKind::Identifier, _) => {
                    return Err(Error::Schema(format!(
                        "identifier column {:?} must be dropped first",
                        spec.name
                    )))
                }
                _ => {}
            }
        }
        let n = table.row_count();
        let d = feature_cols.len();
        let mut data = vec![0.0; n * d];
        for (j, (_, col)) in feature_cols.iter().enumerate() {
            for (r, &x) in col.iter().enumerate() {
                data[r * d + j] = x;
            }
        }
        let benign = table.benign_name();
        let mut class_names = vec![benign.to_string()];
        let mut ids: HashMap<&str, u32> = HashMap::new();
        let class_ids = table
            .attack_classes()
            .iter()
            .map(|c| {
                if c == benign {
                    BENIGN_ID
                } else {
                    *ids.entry(c.as_str()).or_insert_with(|| {
                        class_names.push(c.clone());
                        class_names.len() as u32 - 1
                    })
                }
            })
            .collect();
        let names: Vec<String> = feature_cols.iter().map(|(n, _)| n.to_string()).collect();
        let encoded = names.iter().map(|n| encoder.feature(n).is_some()).collect();
        Ok(FeatureMatrix {
            names,
            encoded,
            data,
            n_rows: n,
            labels: table.labels().to_vec(),
            class_ids,
            class_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Whether each feature column holds label-encoded categorical codes.
    pub fn encoded_flags(&self) -> &[bool] {
        &self.encoded
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn class_ids(&self) -> &[u32] {
        &self.class_ids
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn view(&self) -> MatrixView<'_> {
        MatrixView {
            matrix: self,
            rows: None,
        }
    }

    pub fn view_rows<'a>(&'a self, rows: &'a [usize]) -> MatrixView<'a> {
        MatrixView {
            matrix: self,
            rows: Some(rows),
        }
    }

    fn map_values(&self, data: Vec<f64>) -> FeatureMatrix {
        FeatureMatrix {
            data,
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> FeatureMatrix {
        FeatureMatrix {
            names: self.names.clone(),
            encoded: self.encoded.clone(),
            data: Vec::new(),
            n_rows: self.n_rows,
            labels: self.labels.clone(),
            class_ids: self.class_ids.clone(),
            class_names: self.class_names.clone(),
        }
    }
}

/// A row subset of a [`FeatureMatrix`] (all rows when `rows` is `None`).
#[derive(Debug, Clone, Copy)]
pub struct MatrixView<'a> {
    matrix: &'a FeatureMatrix,
    rows: Option<&'a [usize]>,
}

impl<'a> MatrixView<'a> {
    pub fn matrix(&self) -> &'a FeatureMatrix {
        self.matrix
    }

    pub fn len(&self) -> usize {
        self.rows.map_or(self.matrix.n_rows, <[usize]>::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_features(&self) -> usize {
        self.matrix.n_features()
    }

    /// Index into the underlying matrix of the `i`-th view row.
    pub fn source_index(&self, i: usize) -> usize {
        self.rows.map_or(i, |r| r[i])
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        self.matrix.row(self.source_index(i))
    }

    pub fn label(&self, i: usize) -> u8 {
        self.matrix.labels[self.source_index(i)]
    }

    pub fn class_id(&self, i: usize) -> u32 {
        self.matrix.class_ids[self.source_index(i)]
    }

    pub fn labels(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn class_ids(&self) -> Vec<u32> {
        (0..self.len()).map(|i| self.class_id(i)).collect()
    }

    /// Values of feature `j` over the view's rows.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.row(i)[j]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedScaler {
    pub features: Vec<FeatureRange>,
}

impl FittedScaler {
    pub fn fit(view: MatrixView<'_>) -> Result<Self> {
        if view.is_empty() {
            return Err(Error::InvalidInput("cannot fit a scaler on zero rows".into()));
        }
        let d = view.n_features();
        let mut lo = view.row(0).to_vec();
        let mut hi = lo.clone();
        for i in 1..view.len() {
            for (j, &x) in view.row(i).iter().enumerate() {
                if x < lo[j] {
                    lo[j] = x;
                }
                if x > hi[j] {
                    hi[j] = x;
                }
            }
        }
        let names = view.matrix().names();
        Ok(FittedScaler {
            features: (0..d)
                .map(|j| FeatureRange {
                    name: names[j].clone(),
                    min: lo[j],
                    max: hi[j],
                })
                .collect(),
        })
    }

    /// Maps every column to `[0, 1]`. Constant features map to 0; values
    /// outside the fitted range are clamped and counted.
    pub fn apply(&self, m: &FeatureMatrix) -> Result<(FeatureMatrix, usize)> {
        if self.features.len() != m.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                actual: m.n_features(),
            });
        }
        if let Some(f) = self.features.iter().zip(m.names()).find(|(f, n)| &f.name != *n) {
            return Err(Error::Schema(format!(
                "scaler column {:?} does not match matrix column {:?}",
                f.0.name, f.1
            )));
        }
        let d = m.n_features();
        let mut clamped = 0usize;
        let mut data = Vec::with_capacity(m.data.len());
        for (k, &x) in m.data.iter().enumerate() {
            let FeatureRange { min, max, .. } = self.features[k % d];
            if x < min || x > max {
                clamped += 1;
            }
            let v = if max > min {
                ((x - min) / (max - min)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            data.push(v);
        }
        Ok((m.map_values(data), clamped))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitScope {
    #[default]
    FullDataset,
    TrainOnly,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PreprocessReport {
    pub dropped_identifiers: Vec<String>,
    pub unseen_categories: Vec<UnseenCount>,
    pub clamped_cells: usize,
}

#[derive(Debug, Clone)]
pub struct Preprocessed {
    /// Scaled matrix covering every row of the input table.
    pub matrix: FeatureMatrix,
    /// Encoded but unscaled matrix, when requested.
    pub raw: Option<FeatureMatrix>,
    pub encoder: FittedEncoder,
    pub scaler: FittedScaler,
    pub report: PreprocessReport,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    pub fit_scope: FitScope,
    pub unseen: UnseenPolicy,
    pub keep_raw: bool,
}

/// drop identifiers -> encode -> scale, returning the fitted transforms.
pub fn preprocess_pipeline(
    table: &FlowTable,
    train_indices: Option<&[usize]>,
    opts: PipelineOptions,
) -> Result<Preprocessed> {
    let fit_rows = match opts.fit_scope {
        FitScope::FullDataset => None,
        FitScope::TrainOnly => match train_indices {
            Some(rows) if !rows.is_empty() => Some(rows),
            _ => {
                return Err(Error::InvalidInput(
                    "train-only fit scope needs a nonempty training index set".into(),
                ))
            }
        },
    };
    let dropped_identifiers = table
        .schema()
        .names_of(ColumnKind::Identifier)
        .into_iter()
        .map(String::from)
        .collect();
    let stripped = drop_identifiers(table);
    let encoder = FittedEncoder::fit_rows(&stripped, fit_rows);
    let (encoded_table, unseen_categories) = encoder.apply(&stripped, opts.unseen)?;
    let raw = FeatureMatrix::from_table(&encoded_table, &encoder)?;
    let scaler = match fit_rows {
        Some(rows) => FittedScaler::fit(raw.view_rows(rows))?,
        None => FittedScaler::fit(raw.view())?,
    };
    let (matrix, clamped_cells) = scaler.apply(&raw)?;
    Ok(Preprocessed {
        matrix,
        raw: opts.keep_raw.then_some(raw),
        encoder,
        scaler,
        report: PreprocessReport {
            dropped_identifiers,
            unseen_categories,
            clamped_cells,
        },
    })
}

/// Serializable bundle of fitted transforms (`transforms.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformsDoc {
    pub fit_scope: FitScope,
    pub encoder: FittedEncoder,
    pub scaler: FittedScaler,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowdata::{read_csv, LoadOptions};

    fn schema() -> FeatureSchema {
        FeatureSchema::new(vec![
            ColumnSpec::new("srcip", ColumnKind::Identifier),
            ColumnSpec::new("dur", ColumnKind::Numeric),
            ColumnSpec::new("proto", ColumnKind::Categorical),
            ColumnSpec::new("state", ColumnKind::Categorical),
            ColumnSpec::new("label", ColumnKind::BinaryLabel),
            ColumnSpec::new("attack_cat", ColumnKind::AttackClass),
        ])
        .unwrap()
    }

    fn table() -> FlowTable {
        let csv = "srcip,dur,proto,state,label,attack_cat\n\
                   a,2,tcp,FIN,0,Normal\n\
                   b,4,udp,CON,1,DoS\n\
                   c,6,tcp,FIN,1,Exploits\n";
        read_csv(csv.as_bytes(), &schema(), &LoadOptions::new("Normal"))
            .unwrap()
            .table
    }

    fn matrix(cols: &[&[f64]]) -> FeatureMatrix {
        let n = cols[0].len();
        let d = cols.len();
        let mut data = vec![0.0; n * d];
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                data[i * d + j] = x;
            }
        }
        let names = (0..d).map(|j| format!("f{j}")).collect();
        FeatureMatrix::from_rows(names, data, vec![0; n]).unwrap()
    }

    #[test]
    fn drop_identifiers_removes_only_identifiers() {
        let t = table();
        let d = drop_identifiers(&t);
        assert!(d.schema().names_of(ColumnKind::Identifier).is_empty());
        assert_eq!(d.row_count(), 3);
        assert_eq!(d.labels(), t.labels());
        assert_eq!(d.attack_classes(), t.attack_classes());
        // no identifiers: identity
        assert_eq!(drop_identifiers(&d), d);
    }

    #[test]
    fn encoder_first_appearance_and_independent_columns() {
        let enc = FittedEncoder::fit(&table());
        let proto = enc.feature("proto").unwrap();
        assert_eq!(proto.code("tcp"), Some(0));
        assert_eq!(proto.code("udp"), Some(1));
        let state = enc.feature("state").unwrap();
        assert_eq!(state.code("FIN"), Some(0));
        assert_eq!(state.code("CON"), Some(1));
        assert_eq!(state.n_codes(), 2);

        let (encoded, unseen) = enc.apply(&table(), UnseenPolicy::Error).unwrap();
        assert!(unseen.is_empty());
        assert_eq!(encoded.column("proto"), Some(&Column::Numeric(vec![0.0, 1.0, 0.0])));
        assert_eq!(encoded.labels(), table().labels());
    }

    #[test]
    fn unseen_category_policies() {
        let t = table();
        let enc = FittedEncoder::fit_rows(&t, Some(&[0, 2]));
        assert_eq!(enc.feature("proto").unwrap().n_codes(), 1);
        match enc.apply(&t, UnseenPolicy::Error) {
            Err(Error::UnseenCategory { feature, value }) => {
                assert_eq!(feature, "proto");
                assert_eq!(value, "udp");
            }
            other => panic!("{other:?}"),
        }
        let (encoded, unseen) = enc.apply(&t, UnseenPolicy::ReserveCode).unwrap();
        assert_eq!(encoded.column("proto"), Some(&Column::Numeric(vec![0.0, 1.0, 0.0])));
        assert_eq!(unseen.len(), 2);

        // two fitted codes, unseen "icmp" -> 2
        let csv = "srcip,dur,proto,state,label,attack_cat\nz,1,icmp,FIN,0,Normal\n";
        let other = read_csv(csv.as_bytes(), &schema(), &LoadOptions::new("Normal"))
            .unwrap()
            .table;
        let full = FittedEncoder::fit(&t);
        let (enc2, unseen) = full.apply(&other, UnseenPolicy::ReserveCode).unwrap();
        assert_eq!(enc2.column("proto"), Some(&Column::Numeric(vec![2.0])));
        assert_eq!(unseen[0].value, "icmp");
    }

    #[test]
    fn encoder_on_empty_table_is_empty() {
        let empty = table().select_rows(&[]);
        let enc = FittedEncoder::fit(&table());
        let (out, _) = enc.apply(&empty, UnseenPolicy::Error).unwrap();
        assert_eq!(out.row_count(), 0);
    }

    #[test]
    fn encoder_json_round_trip() {
        let enc = FittedEncoder::fit(&table());
        let json = serde_json::to_string(&enc).unwrap();
        let back: FittedEncoder = serde_json::from_str(&json).unwrap();
        assert_eq!(back, enc);
    }

    #[test]
    fn scaler_examples() {
        let m = matrix(&[&[2.0, 4.0, 6.0], &[5.0, 5.0, 5.0]]);
        let s = FittedScaler::fit(m.view()).unwrap();
        assert_eq!((s.features[0].min, s.features[0].max), (2.0, 6.0));
        assert_eq!((s.features[1].min, s.features[1].max), (5.0, 5.0));
        let (out, clamped) = s.apply(&m).unwrap();
        assert_eq!(clamped, 0);
        assert_eq!(out.view().column(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(out.view().column(1), vec![0.0, 0.0, 0.0]);

        let single = matrix(&[&[3.0], &[7.0]]);
        let s1 = FittedScaler::fit(single.view()).unwrap();
        assert_eq!(s1.features[1].min, 7.0);
        assert_eq!(s1.features[1].max, 7.0);

        let probe = matrix(&[&[8.0], &[5.0]]);
        let (scaled, clamped) = s.apply(&probe).unwrap();
        assert_eq!(scaled.row(0)[0], 1.0);
        assert_eq!(clamped, 1);
    }

    #[test]
    fn scaler_errors() {
        let m = matrix(&[&[1.0, 2.0]]);
        assert!(FittedScaler::fit(m.view_rows(&[])).is_err());
        let s = FittedScaler::fit(m.view()).unwrap();
        let wide = matrix(&[&[1.0], &[2.0]]);
        assert!(matches!(s.apply(&wide), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pipeline_full_and_train_only() {
        let t = table();
        let full = preprocess_pipeline(&t, None, PipelineOptions::default()).unwrap();
        assert_eq!(full.matrix.names(), &["dur", "proto", "state"]);
        assert_eq!(full.matrix.encoded_flags(), &[false, true, true]);
        assert_eq!(full.report.dropped_identifiers, vec!["srcip".to_string()]);
        assert!(full.matrix.data().iter().all(|x| (0.0..=1.0).contains(x)));
        assert_eq!(full.matrix.class_names(), &["Normal", "DoS", "Exploits"]);
        assert_eq!(full.matrix.class_ids(), &[0, 1, 2]);

        let opts = PipelineOptions {
            fit_scope: FitScope::TrainOnly,
            ..Default::default()
        };
        assert!(preprocess_pipeline(&t, None, opts).is_err());
        assert!(preprocess_pipeline(&t, Some(&[]), opts).is_err());
        let tr = preprocess_pipeline(&t, Some(&[0, 1]), opts).unwrap();
        // dur fitted on {2, 4}; 6 clamps to 1
        assert_eq!(tr.scaler.features[0].min, 2.0);
        assert_eq!(tr.scaler.features[0].max, 4.0);
        assert_eq!(tr.matrix.row(2)[0], 1.0);
        assert!(tr.report.clamped_cells >= 1);
        assert!(tr.matrix.data().iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn pipeline_numeric_only_has_empty_encoder() {
        let schema = FeatureSchema::new(vec![
            ColumnSpec::new("x", ColumnKind::Numeric),
            ColumnSpec::new("label", ColumnKind::BinaryLabel),
            ColumnSpec::new("attack_cat", ColumnKind::AttackClass),
        ])
        .unwrap();
        let csv = "x,label,attack_cat\n1,0,Normal\n3,1,DoS\n";
        let t = read_csv(csv.as_bytes(), &schema, &LoadOptions::new("Normal"))
            .unwrap()
            .table;
        let p = preprocess_pipeline(&t, None, PipelineOptions::default()).unwrap();
        assert!(p.encoder.is_empty());
        assert_eq!(p.matrix.view().column(0), vec![0.0, 1.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix() -> impl Strategy<Value = FeatureMatrix> {
            (1usize..30, 1usize..5).prop_flat_map(|(n, d)| {
                proptest::collection::vec(-1e6f64..1e6, n * d).prop_map(move |data| {
                    let names = (0..d).map(|j| format!("f{j}")).collect();
                    FeatureMatrix::from_rows(names, data, vec![0; n]).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn scaled_range_and_idempotence(m in arb_matrix()) {
                let s = FittedScaler::fit(m.view()).unwrap();
                let (once, clamped) = s.apply(&m).unwrap();
                prop_assert_eq!(clamped, 0);
                prop_assert_eq!(once.n_rows(), m.n_rows());
                prop_assert!(once.data().iter().all(|x| (0.0..=1.0).contains(x)));
                let s2 = FittedScaler::fit(once.view()).unwrap();
                let (twice, _) = s2.apply(&once).unwrap();
                for (a, b) in once.data().iter().zip(twice.data()) {
                    prop_assert!((a - b).abs() <= 1e-12);
                }
                // determinism
                prop_assert_eq!(FittedScaler::fit(m.view()).unwrap(), s);
            }
        }
    }
}
