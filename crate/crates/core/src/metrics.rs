//! Binary detection metrics with attack as the positive class.
//!
//! Accuracy, DR, FAR and Z-DR are percentages; precision, F1 and AUC are
//! fractions. A metric whose denominator is zero is `None` (JSON `null`),
//! never 0 or 100.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowdata::BENIGN_ID;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn check_labels(y: &[u8]) -> Result<()> {
    match y.iter().find(|&&v| v > 1) {
        Some(v) => Err(Error::InvalidInput(format!("label {v} is not binary"))),
        None => Ok(()),
    }
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::InvalidInput("confusion counts of zero rows".into()));
    }
    check_labels(y_true)?;
    check_labels(y_pred)?;
    let mut c = ConfusionCounts::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => c.tp += 1,
            (1, _) => c.fn_ += 1,
            (_, 1) => c.fp += 1,
            _ => c.tn += 1,
        }
    }
    Ok(c)
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicMetrics {
    pub accuracy: Option<f64>,
    pub dr: Option<f64>,
    pub far: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
}

pub fn basic_metrics(c: &ConfusionCounts) -> BasicMetrics {
    let recall = ratio(c.tp, c.tp + c.fn_);
    let precision = ratio(c.tp, c.tp + c.fp);
    let f1 = match (recall, precision) {
        (Some(r), Some(p)) if r + p > 0.0 => Some(2.0 * r * p / (r + p)),
        // both defined but zero: no true positives at all
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    BasicMetrics {
        accuracy: ratio(c.tp + c.tn, c.total()).map(|v| v * 100.0),
        dr: recall.map(|v| v * 100.0),
        far: ratio(c.fp, c.fp + c.tn).map(|v| v * 100.0),
        precision,
        f1,
    }
}

/// Area under the ROC curve as the Mann-Whitney statistic, from rank sums
/// with tied scores sharing their average rank. `None` when only one class
/// is present.
pub fn auc(y_true: &[u8], scores: &[f64]) -> Result<Option<f64>> {
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            actual: scores.len(),
        });
    }
    check_labels(y_true)?;
    if let Some(bad) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::InvalidInput(format!("score {bad} is not a number")));
    }
    let n_pos = y_true.iter().filter(|&&y| y == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok(None);
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(y_true).filter(|(_, &y)| y == 1).map(|(r, _)| r).sum();
    let np = n_pos as f64;
    let u = rank_sum - np * (np + 1.0) / 2.0;
    Ok(Some(u / (np * n_neg as f64)))
}

/// 1-based ranks, ties replaced by the mean of the ranks they span.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j averaged
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPositives {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Detection counts restricted to the test rows of each attack class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerClassPositives {
    /// `(class name, counts)` for every attack class with test rows, in
    /// class-id order.
    pub classes: Vec<(String, ClassPositives)>,
}

impl PerClassPositives {
    /// `class_ids[i]` indexes `class_names`; id [`BENIGN_ID`] is benign.
    pub fn from_predictions(class_ids: &[u32], class_names: &[String], y_pred: &[u8]) -> Result<Self> {
        if class_ids.len() != y_pred.len() {
            return Err(Error::DimensionMismatch {
                expected: class_ids.len(),
                actual: y_pred.len(),
            });
        }
        let mut counts = vec![ClassPositives::default(); class_names.len()];
        for (&c, &p) in class_ids.iter().zip(y_pred) {
            if c == BENIGN_ID {
                continue;
            }
            let slot = counts
                .get_mut(c as usize)
                .ok_or_else(|| Error::InvalidInput(format!("class id {c} has no name")))?;
            if p == 1 {
                slot.tp += 1;
            } else {
                slot.fn_ += 1;
            }
        }
        let classes = counts
            .into_iter()
            .enumerate()
            .filter(|(id, c)| *id as u32 != BENIGN_ID && c.tp + c.fn_ > 0)
            .map(|(id, c)| (class_names[id].clone(), c))
            .collect();
        Ok(PerClassPositives { classes })
    }

    pub fn get(&self, class: &str) -> Option<ClassPositives> {
        self.classes.iter().find(|(n, _)| n == class).map(|(_, c)| *c)
    }
}

/// Zero-day detection rate: percentage of the held-out class's test rows
/// flagged as attack. `None` when the class has no test rows.
pub fn zdr(per_class: &PerClassPositives, held_out: &str) -> Option<f64> {
    per_class.get(held_out).and_then(|c| ratio(c.tp, c.tp + c.fn_)).map(|v| v * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub fold_id: usize,
    pub held_out_class: Option<String>,
    pub confusion: ConfusionCounts,
    pub accuracy: Option<f64>,
    pub dr: Option<f64>,
    pub far: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
    /// Only computed for zero-day scenarios.
    pub zdr: Option<f64>,
}

/// Everything needed to score one scenario's test fold.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation<'a> {
    pub y_true: &'a [u8],
    pub class_ids: &'a [u32],
    pub class_names: &'a [String],
    pub scores: &'a [f64],
    pub threshold: f64,
}

pub fn evaluate(e: Evaluation<'_>, fold_id: usize, held_out: Option<&str>) -> Result<MetricsReport> {
    if !(0.0..=1.0).contains(&e.threshold) {
        return Err(Error::InvalidInput(format!("threshold {} outside [0, 1]", e.threshold)));
    }
    if e.scores.len() != e.y_true.len() {
        return Err(Error::DimensionMismatch {
            expected: e.y_true.len(),
            actual: e.scores.len(),
        });
    }
    let y_pred: Vec<u8> = e.scores.iter().map(|&s| u8::from(s >= e.threshold)).collect();
    let c = confusion(e.y_true, &y_pred)?;
    let b = basic_metrics(&c);
    let zdr = match held_out {
        Some(name) => {
            let per = PerClassPositives::from_predictions(e.class_ids, e.class_names, &y_pred)?;
            zdr(&per, name)
        }
        None => None,
    };
    Ok(MetricsReport {
        fold_id,
        held_out_class: held_out.map(str::to_owned),
        confusion: c,
        accuracy: b.accuracy,
        dr: b.dr,
        far: b.far,
        precision: b.precision,
        f1: b.f1,
        auc: auc(e.y_true, e.scores)?,
        zdr,
    })
}

/// Mean and population standard deviation over the folds where a metric
/// is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub undefined: usize,
}

impl MetricStat {
    pub fn from_values(values: &[Option<f64>]) -> Self {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        let undefined = values.len() - defined.len();
        if defined.is_empty() {
            return MetricStat {
                mean: None,
                std: None,
                undefined,
            };
        }
        let n = defined.len() as f64;
        let mean = defined.iter().sum::<f64>() / n;
        let var = defined.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        MetricStat {
            mean: Some(mean),
            std: Some(var.sqrt()),
            undefined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub held_out_class: Option<String>,
    pub n_folds: usize,
    pub accuracy: MetricStat,
    pub dr: MetricStat,
    pub far: MetricStat,
    pub precision: MetricStat,
    pub f1: MetricStat,
    pub auc: MetricStat,
    /// `None` for known-attack (no held-out class) aggregates.
    pub zdr: Option<MetricStat>,
}

pub fn aggregate_folds(reports: &[MetricsReport]) -> Result<AggregateReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::InvalidInput("no fold reports to aggregate".into()))?;
    if let Some(r) = reports.iter().find(|r| r.held_out_class != first.held_out_class) {
        return Err(Error::InvalidInput(format!(
            "cannot aggregate folds of {:?} with {:?}",
            first.held_out_class, r.held_out_class
        )));
    }
    let stat = |f: fn(&MetricsReport) -> Option<f64>| {
        MetricStat::from_values(&reports.iter().map(f).collect::<Vec<_>>())
    };
    let zdr = first.held_out_class.as_ref().map(|class| {
        let s = stat(|r| r.zdr);
        if s.undefined > 0 {
            log::warn!(
                "{class}: Z-DR undefined in {} of {} folds (no held-out rows in the test fold)",
                s.undefined,
                reports.len()
            );
        }
        s
    });
    Ok(AggregateReport {
        held_out_class: first.held_out_class.clone(),
        n_folds: reports.len(),
        accuracy: stat(|r| r.accuracy),
        dr: stat(|r| r.dr),
        far: stat(|r| r.far),
        precision: stat(|r| r.precision),
        f1: stat(|r| r.f1),
        auc: stat(|r| r.auc),
        zdr,
    })
}
