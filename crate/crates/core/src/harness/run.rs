//! The model x scenario matrix and report assembly.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, WdInput};
use crate::classifiers::{ModelKind, TrainedModel};
use crate::error::{Error, Result};
use crate::flowdata::{check_known_counts, load_csv, ClassCatalog, FlowTable, LoadOptions, BENIGN_ID};
use crate::metrics::{aggregate_folds, evaluate, AggregateReport, Evaluation, MetricStat, MetricsReport, PerClassPositives};
use crate::preprocess::{
    preprocess_pipeline, FeatureMatrix, FitScope, PipelineOptions, PreprocessReport, Preprocessed, TransformsDoc,
    UnseenCount,
};
use crate::rng;
use crate::wdanalysis::{per_feature_wd, rank_correlation, WdOptions, WdReport};
use crate::zslsplit::{make_known_scenarios, make_zero_day_scenarios, FoldPlan};

/// Version of the `run.json` layout.
pub const REPORT_FORMAT_VERSION: u32 = 1;

const SUBSAMPLE_SALT: u64 = 0x5B_5A;
const WD_SEED_SALT: u64 = 0x3D_5EED;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    /// Rows after invalid-row dropping and subsampling.
    pub rows: usize,
    /// Rows read from the source before subsampling.
    pub source_rows: usize,
    pub dropped_rows: usize,
    pub subsampled: bool,
    pub features: Vec<String>,
    pub encoded_features: Vec<String>,
    pub benign_rows: usize,
    pub attack_rows: usize,
    /// Benign rows per attack row; `None` without attack rows.
    pub imbalance_ratio: Option<f64>,
    pub class_counts: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlanInfo {
    pub k: usize,
    pub seed: u64,
    pub test_fold_sizes: Vec<usize>,
    pub sparse_classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessSummary {
    pub fit_scope: FitScope,
    pub dropped_identifiers: Vec<String>,
    /// Summed over every fitted transform.
    pub clamped_cells: usize,
    pub unseen_categories: Vec<UnseenCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDr {
    pub class: String,
    pub dr: MetricStat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownAttackSection {
    pub folds: Vec<MetricsReport>,
    pub mean: AggregateReport,
    /// Recall on each attack class's test rows when every class is trained on.
    pub per_class_dr: Vec<ClassDr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDaySection {
    pub held_out_class: String,
    pub folds: Vec<MetricsReport>,
    pub mean: AggregateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub model: ModelKind,
    pub known_attack: Option<KnownAttackSection>,
    pub zero_day: Vec<ZeroDaySection>,
    /// Spearman correlation between per-class mean WD and mean Z-DR.
    pub wd_zdr_spearman: Option<f64>,
}

impl ModelSection {
    pub fn zero_day_for(&self, class: &str) -> Option<&ZeroDaySection> {
        self.zero_day.iter().find(|z| z.held_out_class == class)
    }

    pub fn known_dr_for(&self, class: &str) -> Option<f64> {
        self.known_attack
            .as_ref()?
            .per_class_dr
            .iter()
            .find(|c| c.class == class)?
            .dr
            .mean
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWdMean {
    pub feature: String,
    pub encoded: bool,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdFold {
    pub fold: usize,
    pub mean_wd: f64,
    pub train_rows: usize,
    pub test_rows: usize,
    pub subsample_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdClassSummary {
    pub held_out_class: String,
    pub input: WdInput,
    /// Over folds of the per-scenario mean-over-features distance.
    pub mean_wd: MetricStat,
    pub features: Vec<FeatureWdMean>,
    pub folds: Vec<WdFold>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioError {
    pub model: String,
    pub held_out_class: Option<String>,
    pub fold: usize,
    pub message: String,
}

/// Non-JSON outputs produced alongside the report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    /// `transforms.json` content.
    pub transforms: serde_json::Value,
    /// `(file name, json)` under `models/`.
    pub models: Vec<(String, String)>,
    /// Per-feature distances for each zero-day scenario.
    pub wd_details: Vec<WdReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub tool_version: String,
    pub rng_algorithm: String,
    pub config: ExperimentConfig,
    pub dataset: DatasetInfo,
    pub fold_plan: FoldPlanInfo,
    pub preprocessing: PreprocessSummary,
    pub models: Vec<ModelSection>,
    pub wd: Vec<WdClassSummary>,
    pub warnings: Vec<String>,
    pub errors: Vec<ScenarioError>,
    #[serde(skip)]
    pub artifacts: Artifacts,
}

impl RunReport {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelSection> {
        self.models.iter().find(|m| m.model == kind)
    }

    pub fn wd_for(&self, class: &str) -> Option<&WdClassSummary> {
        self.wd.iter().find(|w| w.held_out_class == class)
    }

    /// Number of model trainings the report records.
    pub fn training_runs(&self) -> usize {
        self.models
            .iter()
            .map(|m| m.known_attack.as_ref().map_or(0, |k| k.folds.len()) + m.zero_day.iter().map(|z| z.folds.len()).sum::<usize>())
            .sum()
    }
}

/// Loads the configured dataset and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let ds = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Config("no [dataset] section in the config".into()))?;
    let schema = ds.schema()?;
    let opts = LoadOptions {
        benign_name: ds.benign_name.clone(),
        invalid_rows: ds.invalid_rows,
    };
    log::info!("loading {}", ds.path.display());
    let loaded = load_csv(&ds.path, &schema, &opts)?;
    let mut warnings = Vec::new();
    let attack_rows = loaded.table.labels().iter().filter(|&&y| y == 1).count();
    warnings.extend(check_known_counts(loaded.table.row_count(), attack_rows));
    if !loaded.dropped.is_empty() {
        warnings.push(format!(
            "{} invalid rows dropped (first: row {}: {})",
            loaded.dropped.len(),
            loaded.dropped[0].row,
            loaded.dropped[0].message
        ));
    }
    run_with_warnings(cfg, loaded.table, loaded.dropped.len(), warnings)
}

/// Runs the experiment on an in-memory table; `cfg.dataset` is ignored.
pub fn run_on_table(cfg: &ExperimentConfig, table: FlowTable) -> Result<RunReport> {
    cfg.validate()?;
    run_with_warnings(cfg, table, 0, Vec::new())
}

struct Job<'a> {
    held_out: Option<(&'a str, u32)>,
    fold: usize,
    train: &'a [usize],
    test: &'a [usize],
}

impl Job<'_> {
    fn class_label(&self) -> String {
        self.held_out.map_or_else(|| "known-attack".to_string(), |(c, _)| c.to_string())
    }
}

struct ModelOutcome {
    report: MetricsReport,
    per_class: Option<PerClassPositives>,
    model_json: Option<String>,
}

struct JobOutput {
    wd: Option<WdReport>,
    transforms: Option<TransformsDoc>,
    preprocess: Option<PreprocessReport>,
    models: Vec<Result<ModelOutcome>>,
    failure: Option<Error>,
}

fn scenario_error(model: &str, job: &Job<'_>, e: Error) -> Error {
    match e {
        already @ Error::Scenario { .. } => already,
        e => Error::Scenario {
            model: model.to_string(),
            class: job.class_label(),
            fold: job.fold,
            source: Box::new(e),
        },
    }
}

fn model_seed(seed: u64, kind: ModelKind, class_id: u32, fold: usize) -> u64 {
    let salt = match kind {
        ModelKind::Forest => 0xF0_2E57,
        ModelKind::Mlp => 0x3_1F,
    };
    rng::derive_seed(rng::derive_seed(seed, salt), (u64::from(class_id) << 32) | fold as u64)
}

fn wd_matrix(p: &Preprocessed, input: WdInput) -> &FeatureMatrix {
    match input {
        WdInput::Scaled => &p.matrix,
        WdInput::Raw => p.raw.as_ref().expect("raw matrix kept for raw WD input"),
    }
}

fn run_job(cfg: &ExperimentConfig, table: &FlowTable, shared: Option<&Preprocessed>, job: &Job<'_>) -> JobOutput {
    let exec = cfg.execution;
    let mut out = JobOutput {
        wd: None,
        transforms: None,
        preprocess: None,
        models: Vec::new(),
        failure: None,
    };
    let local;
    let pre = match shared {
        Some(p) => p,
        None => {
            let opts = PipelineOptions {
                fit_scope: FitScope::TrainOnly,
                unseen: cfg.unseen,
                keep_raw: cfg.wd.input == WdInput::Raw,
            };
            match preprocess_pipeline(table, Some(job.train), opts) {
                Ok(p) => {
                    local = p;
                    out.transforms = Some(TransformsDoc {
                        fit_scope: FitScope::TrainOnly,
                        encoder: local.encoder.clone(),
                        scaler: local.scaler.clone(),
                    });
                    out.preprocess = Some(local.report.clone());
                    &local
                }
                Err(e) => {
                    out.failure = Some(scenario_error("preprocess", job, e));
                    return out;
                }
            }
        }
    };

    if let Some((_, class_id)) = job.held_out {
        let wm = wd_matrix(pre, cfg.wd.input);
        let opts = WdOptions {
            max_rows: cfg.wd_max_rows(),
            seed: rng::derive_seed(cfg.seed, WD_SEED_SALT ^ ((u64::from(class_id) << 32) | job.fold as u64)),
        };
        match per_feature_wd(wm.view_rows(job.train), wm.view_rows(job.test), &opts, exec) {
            Ok(mut r) => {
                r.held_out_class = job.held_out.map(|(c, _)| c.to_string());
                r.fold_id = Some(job.fold);
                out.wd = Some(r);
            }
            Err(e) => {
                out.failure = Some(scenario_error("wd", job, e));
                return out;
            }
        }
    }

    let m = &pre.matrix;
    let train = m.view_rows(job.train);
    let test = m.view_rows(job.test);
    let y_true = test.labels();
    let class_ids = test.class_ids();
    let class_id = job.held_out.map_or(BENIGN_ID, |(_, id)| id);
    for &kind in &cfg.models {
        let result = (|| -> Result<ModelOutcome> {
            let model = TrainedModel::train(kind, train, &cfg.train, model_seed(cfg.seed, kind, class_id, job.fold), exec)?;
            let scores = model.score(test, exec)?;
            let eval = Evaluation {
                y_true: &y_true,
                class_ids: &class_ids,
                class_names: m.class_names(),
                scores: scores.as_slice(),
                threshold: cfg.threshold,
            };
            let report = evaluate(eval, job.fold, job.held_out.map(|(c, _)| c))?;
            let per_class = match job.held_out {
                Some(_) => None,
                None => {
                    let pred: Vec<u8> = scores.as_slice().iter().map(|&s| u8::from(s >= cfg.threshold)).collect();
                    Some(PerClassPositives::from_predictions(&class_ids, m.class_names(), &pred)?)
                }
            };
            let model_json = if cfg.save_models { Some(model.to_json()?) } else { None };
            log::info!(
                "{} / {} / fold {}: done",
                kind.as_str(),
                job.class_label(),
                job.fold
            );
            Ok(ModelOutcome {
                report,
                per_class,
                model_json,
            })
        })()
        .map_err(|e| scenario_error(kind.as_str(), job, e));
        out.models.push(result);
    }
    out
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn run_with_warnings(
    cfg: &ExperimentConfig,
    table: FlowTable,
    dropped_rows: usize,
    mut warnings: Vec<String>,
) -> Result<RunReport> {
    let source_rows = table.row_count() + dropped_rows;
    let loaded_rows = table.row_count();
    let table = match cfg.subsample {
        Some(cap) if cap < table.row_count() => {
            let mut r = rng::stream(rng::derive_seed(cfg.seed, SUBSAMPLE_SALT), 0);
            let mut rows = index::sample(&mut r, table.row_count(), cap).into_vec();
            rows.sort_unstable();
            warnings.push(format!("subsampled {cap} of {loaded_rows} rows"));
            table.select_rows(&rows)
        }
        _ => table,
    };
    let subsampled = table.row_count() < loaded_rows;

    let catalog = ClassCatalog::build(&table)?;
    let selected: Vec<(String, u32)> = if cfg.classes.is_empty() {
        catalog.attack_names().iter().enumerate().map(|(i, n)| (n.clone(), i as u32 + 1)).collect()
    } else {
        let mut v = Vec::new();
        for c in &cfg.classes {
            match catalog.class_id(c) {
                Some(id) if id != BENIGN_ID => v.push((c.clone(), id)),
                _ => {
                    return Err(Error::Config(format!(
                        "class {c:?} is not an attack class of the dataset (have: {})",
                        catalog.attack_names().join(", ")
                    )))
                }
            }
        }
        v.sort_by_key(|(_, id)| *id);
        v.dedup();
        v
    };

    let plan = FoldPlan::stratified(&catalog, cfg.folds, cfg.seed)?;
    for c in plan.sparse_classes() {
        warnings.push(format!("class {c:?} has fewer rows than folds"));
    }
    let zero_day: Vec<_> = make_zero_day_scenarios(&plan, &catalog)
        .into_iter()
        .filter(|s| selected.iter().any(|(_, id)| *id == s.held_out_id))
        .collect();
    let known = if cfg.models.is_empty() {
        Vec::new()
    } else {
        make_known_scenarios(&plan, &catalog)
    };
    for k in &known {
        for m in &k.missing_in_train {
            warnings.push(format!("known-attack fold {}: class {m:?} is absent from training", k.fold_id));
        }
    }

    let shared = match cfg.fit_scope {
        FitScope::FullDataset => Some(preprocess_pipeline(
            &table,
            None,
            PipelineOptions {
                fit_scope: FitScope::FullDataset,
                unseen: cfg.unseen,
                keep_raw: cfg.wd.input == WdInput::Raw,
            },
        )?),
        FitScope::TrainOnly => None,
    };

    let mut jobs: Vec<Job<'_>> = known
        .iter()
        .map(|k| Job {
            held_out: None,
            fold: k.fold_id,
            train: &k.train_indices,
            test: &k.test_indices,
        })
        .collect();
    jobs.extend(zero_day.iter().map(|z| Job {
        held_out: Some((z.held_out_class.as_str(), z.held_out_id)),
        fold: z.fold_id,
        train: &z.train_indices,
        test: &z.test_indices,
    }));
    log::info!(
        "{} rows, {} attack classes, {} scenarios x {} models",
        table.row_count(),
        catalog.n_attacks(),
        jobs.len(),
        cfg.models.len()
    );

    let exec = cfg.execution;
    let outputs: Vec<JobOutput> =
        exec.install(cfg.workers, || exec.map(&jobs, |job| run_job(cfg, &table, shared.as_ref(), job)));

    // assembly is sequential and in job order
    let mut errors = Vec::new();
    let mut first_error = None;
    let mut record = |e: Error, errors: &mut Vec<ScenarioError>| {
        if let Error::Scenario { model, class, fold, source } = &e {
            errors.push(ScenarioError {
                model: model.clone(),
                held_out_class: (class != "known-attack").then(|| class.clone()),
                fold: *fold,
                message: source.to_string(),
            });
        }
        if first_error.is_none() {
            first_error = Some(e);
        }
    };

    let mut clamped_cells = 0;
    let mut unseen: Vec<UnseenCount> = Vec::new();
    let mut transforms_per_job = Vec::new();
    let mut wd_details = Vec::new();
    let mut model_files = Vec::new();
    let n_models = cfg.models.len();
    // per model: known fold reports, per-class positives, zero-day fold reports by class
    let mut known_reports: Vec<Vec<MetricsReport>> = vec![Vec::new(); n_models];
    let mut known_per_class: Vec<Vec<PerClassPositives>> = vec![Vec::new(); n_models];
    let mut zd_reports: Vec<Vec<Vec<MetricsReport>>> = vec![vec![Vec::new(); selected.len()]; n_models];

    for (job, out) in jobs.iter().zip(outputs) {
        if let Some(p) = &out.preprocess {
            clamped_cells += p.clamped_cells;
            unseen.extend(p.unseen_categories.iter().cloned());
        }
        if let Some(t) = out.transforms {
            transforms_per_job.push(serde_json::json!({
                "held_out_class": job.held_out.map(|(c, _)| c),
                "fold": job.fold,
                "encoder": t.encoder,
                "scaler": t.scaler,
            }));
        }
        if let Some(e) = out.failure {
            record(e, &mut errors);
            continue;
        }
        if let Some(w) = out.wd {
            wd_details.push(w);
        }
        for (mi, res) in out.models.into_iter().enumerate() {
            match res {
                Ok(o) => {
                    if let Some(json) = o.model_json {
                        let scope = job.held_out.map_or_else(|| "known".to_string(), |(c, _)| slug(c));
                        model_files.push((format!("{}_{scope}_fold{}.json", cfg.models[mi].as_str(), job.fold), json));
                    }
                    match job.held_out {
                        None => {
                            known_reports[mi].push(o.report);
                            known_per_class[mi].extend(o.per_class);
                        }
                        Some((_, id)) => {
                            let ci = selected.iter().position(|(_, s)| *s == id).expect("selected class");
                            zd_reports[mi][ci].push(o.report);
                        }
                    }
                }
                Err(e) => record(e, &mut errors),
            }
        }
    }
    if let Some(e) = first_error {
        if !cfg.keep_going {
            return Err(e);
        }
        for err in &errors {
            warnings.push(format!(
                "{} / {} / fold {} failed: {}",
                err.model,
                err.held_out_class.as_deref().unwrap_or("known-attack"),
                err.fold,
                err.message
            ));
        }
    }

    // distances per held-out class
    let mut wd = Vec::new();
    for (name, _) in &selected {
        let folds: Vec<&WdReport> = wd_details.iter().filter(|w| w.held_out_class.as_deref() == Some(name)).collect();
        if folds.is_empty() {
            continue;
        }
        let d = folds[0].features.len();
        let features = (0..d)
            .map(|j| FeatureWdMean {
                feature: folds[0].features[j].feature.clone(),
                encoded: folds[0].features[j].encoded,
                mean: folds.iter().map(|w| w.features[j].distance).sum::<f64>() / folds.len() as f64,
            })
            .collect();
        wd.push(WdClassSummary {
            held_out_class: name.clone(),
            input: cfg.wd.input,
            mean_wd: MetricStat::from_values(&folds.iter().map(|w| Some(w.mean_wd)).collect::<Vec<_>>()),
            features,
            folds: folds
                .iter()
                .map(|w| WdFold {
                    fold: w.fold_id.unwrap_or(0),
                    mean_wd: w.mean_wd,
                    train_rows: w.train_rows,
                    test_rows: w.test_rows,
                    subsample_cap: w.subsample_cap,
                })
                .collect(),
        });
    }

    let mut models = Vec::with_capacity(n_models);
    for (mi, &kind) in cfg.models.iter().enumerate() {
        let known_attack = if known_reports[mi].is_empty() {
            None
        } else {
            let per_class_dr = catalog
                .attack_names()
                .iter()
                .map(|c| ClassDr {
                    class: c.clone(),
                    dr: MetricStat::from_values(
                        &known_per_class[mi]
                            .iter()
                            .map(|p| p.get(c).and_then(|x| (x.tp + x.fn_ > 0).then(|| 100.0 * x.tp as f64 / (x.tp + x.fn_) as f64)))
                            .collect::<Vec<_>>(),
                    ),
                })
                .collect();
            Some(KnownAttackSection {
                mean: aggregate_folds(&known_reports[mi])?,
                folds: std::mem::take(&mut known_reports[mi]),
                per_class_dr,
            })
        };
        let mut zero_day = Vec::new();
        for (ci, (name, _)) in selected.iter().enumerate() {
            let folds = std::mem::take(&mut zd_reports[mi][ci]);
            if folds.is_empty() {
                continue;
            }
            let mean = aggregate_folds(&folds)?;
            if let Some(z) = &mean.zdr {
                if z.undefined > 0 {
                    warnings.push(format!(
                        "{} / {name}: Z-DR undefined in {} fold(s)",
                        kind.as_str(),
                        z.undefined
                    ));
                }
            }
            if mean.auc.undefined > 0 {
                warnings.push(format!("{} / {name}: AUC undefined in {} fold(s)", kind.as_str(), mean.auc.undefined));
            }
            zero_day.push(ZeroDaySection {
                held_out_class: name.clone(),
                folds,
                mean,
            });
        }
        let pairs: Vec<(f64, f64)> = zero_day
            .iter()
            .filter_map(|z| {
                let w = wd.iter().find(|w| w.held_out_class == z.held_out_class)?.mean_wd.mean?;
                Some((w, z.mean.zdr.as_ref()?.mean?))
            })
            .collect();
        let wd_zdr_spearman = if pairs.len() >= 3 {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            match rank_correlation(&x, &y) {
                Ok(r) => Some(r),
                Err(e) => {
                    warnings.push(format!("{}: WD/Z-DR correlation undefined: {e}", kind.as_str()));
                    None
                }
            }
        } else {
            if !zero_day.is_empty() {
                warnings.push(format!(
                    "{}: WD/Z-DR correlation needs at least 3 classes with both values",
                    kind.as_str()
                ));
            }
            None
        };
        models.push(ModelSection {
            model: kind,
            known_attack,
            zero_day,
            wd_zdr_spearman,
        });
    }

    let (dropped_identifiers, encoded_features, features) = match &shared {
        Some(p) => {
            clamped_cells += p.report.clamped_cells;
            unseen.extend(p.report.unseen_categories.iter().cloned());
            (
                p.report.dropped_identifiers.clone(),
                p.encoder.features().iter().map(|f| f.name().to_string()).collect(),
                p.matrix.names().to_vec(),
            )
        }
        None => {
            let ids: Vec<String> = table
                .schema()
                .names_of(crate::flowdata::ColumnKind::Identifier)
                .into_iter()
                .map(String::from)
                .collect();
            let feats: Vec<String> = table
                .schema()
                .columns()
                .iter()
                .filter(|c| c.kind.is_feature())
                .map(|c| c.name.clone())
                .collect();
            let enc = table
                .schema()
                .names_of(crate::flowdata::ColumnKind::Categorical)
                .into_iter()
                .map(String::from)
                .collect();
            (ids, enc, feats)
        }
    };
    if clamped_cells > 0 {
        warnings.push(format!("{clamped_cells} cells fell outside the fitted scaler range and were clamped"));
    }
    let unseen_total: usize = unseen.iter().map(|u| u.count).sum();
    if unseen_total > 0 {
        warnings.push(format!("{unseen_total} categorical values were unseen at fit time"));
    }

    let transforms = match &shared {
        Some(p) => serde_json::to_value(TransformsDoc {
            fit_scope: FitScope::FullDataset,
            encoder: p.encoder.clone(),
            scaler: p.scaler.clone(),
        })?,
        None => serde_json::json!({ "fit_scope": FitScope::TrainOnly, "scenarios": transforms_per_job }),
    };

    let benign_rows = catalog.count(BENIGN_ID);
    let attack_rows = catalog.row_count() - benign_rows;
    let dataset = DatasetInfo {
        rows: table.row_count(),
        source_rows,
        dropped_rows,
        subsampled,
        features,
        encoded_features,
        benign_rows,
        attack_rows,
        imbalance_ratio: (attack_rows > 0).then(|| benign_rows as f64 / attack_rows as f64),
        class_counts: (0..catalog.n_classes())
            .map(|i| (catalog.class_name(i as u32).to_string(), catalog.count(i as u32)))
            .collect(),
    };

    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        rng_algorithm: rng::RNG_ALGORITHM.to_string(),
        config: cfg.clone(),
        dataset,
        fold_plan: FoldPlanInfo {
            k: plan.k(),
            seed: plan.seed(),
            test_fold_sizes: plan.folds().iter().map(|f| f.test.len()).collect(),
            sparse_classes: plan.sparse_classes().to_vec(),
        },
        preprocessing: PreprocessSummary {
            fit_scope: cfg.fit_scope,
            dropped_identifiers,
            clamped_cells,
            unseen_categories: unseen,
        },
        models,
        wd,
        warnings,
        errors,
        artifacts: Artifacts {
            transforms,
            models: model_files,
            wd_details,
        },
    })
}
