//! Per-feature 1-D Wasserstein (earth mover's) distance between the
//! training and test rows of a scenario, and the rank correlation between
//! mean distance and zero-day detection rate.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::average_ranks;
use crate::par::Exec;
use crate::preprocess::MatrixView;
use crate::rng;

const WD_SALT: u64 = 0x3D_15;

fn check_sample(name: &str, s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidInput(format!("{name} sample is empty")));
    }
    if let Some(bad) = s.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} sample holds non-finite value {bad}")));
    }
    Ok(())
}

/// First Wasserstein distance between the empirical distributions of `u`
/// and `v`: the exact integral of `|F_u(t) - F_v(t)|` over the merged
/// breakpoints.
pub fn wasserstein_1d(u: &[f64], v: &[f64]) -> Result<f64> {
    check_sample("first", u)?;
    check_sample("second", v)?;
    let mut u = u.to_vec();
    let mut v = v.to_vec();
    u.sort_unstable_by(f64::total_cmp);
    v.sort_unstable_by(f64::total_cmp);
    Ok(wasserstein_sorted(&u, &v))
}

/// Same as [`wasserstein_1d`] for inputs already sorted ascending.
///
/// Between breakpoints the CDF gap is `|i/n - j/m|`; it is accumulated as
/// the integer `|i*m - j*n|` and divided by `n*m` once at the end.
pub fn wasserstein_sorted(u: &[f64], v: &[f64]) -> f64 {
    let (n, m) = (u.len(), v.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut total = 0.0f64;
    let mut prev = u[0].min(v[0]);
    while i < n || j < m {
        let next = match (u.get(i), v.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        let gap = (i as u128 * m as u128).abs_diff(j as u128 * n as u128);
        total += gap as f64 * (next - prev);
        while i < n && u[i] == next {
            i += 1;
        }
        while j < m && v[j] == next {
            j += 1;
        }
        prev = next;
    }
    total / (n as f64 * m as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WdOptions {
    /// Rows per side above which a seeded uniform subsample is used;
    /// `None` is exact mode.
    pub max_rows: Option<usize>,
    pub seed: u64,
}

impl Default for WdOptions {
    fn default() -> Self {
        WdOptions {
            max_rows: Some(100_000),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWd {
    pub feature: String,
    pub distance: f64,
    /// Distance over label-encoded codes; depends on the code order.
    pub encoded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdReport {
    pub held_out_class: Option<String>,
    pub fold_id: Option<usize>,
    pub features: Vec<FeatureWd>,
    pub mean_wd: f64,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Set when either side was subsampled to this many rows.
    pub subsample_cap: Option<usize>,
}

fn subsample(len: usize, cap: Option<usize>, seed: u64, side: u64) -> Option<Vec<usize>> {
    let cap = cap?;
    if len <= cap {
        return None;
    }
    let mut r = rng::stream(rng::derive_seed(seed, WD_SALT), side);
    let mut rows = index::sample(&mut r, len, cap).into_vec();
    rows.sort_unstable();
    Some(rows)
}

/// One distance per feature column between `train` and `test`.
pub fn per_feature_wd(train: MatrixView<'_>, test: MatrixView<'_>, opts: &WdOptions, exec: Exec) -> Result<WdReport> {
    if train.matrix().names() != test.matrix().names() {
        return Err(Error::InvalidInput("train and test feature columns differ".into()));
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::InvalidInput("wasserstein distance needs rows on both sides".into()));
    }
    if opts.max_rows == Some(0) {
        return Err(Error::Config("wd.max_rows must be positive".into()));
    }
    let tr_rows = subsample(train.len(), opts.max_rows, opts.seed, 0);
    let te_rows = subsample(test.len(), opts.max_rows, opts.seed, 1);
    let column = |view: MatrixView<'_>, rows: &Option<Vec<usize>>, j: usize| -> Vec<f64> {
        match rows {
            Some(rs) => rs.iter().map(|&i| view.row(i)[j]).collect(),
            None => view.column(j),
        }
    };
    let m = train.matrix();
    let d = train.n_features();
    let distances = exec
        .map_range(d, |j| wasserstein_1d(&column(train, &tr_rows, j), &column(test, &te_rows, j)))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let features: Vec<FeatureWd> = distances
        .iter()
        .enumerate()
        .map(|(j, &distance)| FeatureWd {
            feature: m.names()[j].clone(),
            distance,
            encoded: m.encoded_flags()[j],
        })
        .collect();
    let mean_wd = if d == 0 { 0.0 } else { distances.iter().sum::<f64>() / d as f64 };
    let sampled = tr_rows.is_some() || te_rows.is_some();
    Ok(WdReport {
        held_out_class: None,
        fold_id: None,
        features,
        mean_wd,
        train_rows: tr_rows.as_ref().map_or(train.len(), Vec::len),
        test_rows: te_rows.as_ref().map_or(test.len(), Vec::len),
        subsample_cap: if sampled { opts.max_rows } else { None },
    })
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "rank correlation needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("rank correlation over non-finite values".into()));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidInput("rank correlation is undefined when one side is constant".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
