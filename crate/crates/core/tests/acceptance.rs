//! Acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the PASS/FAIL lines show
//! up in `cargo test` output. Exits non-zero when a gating check fails.
//!
//! The full-scale NetFlow check only runs when `NF_UNSW_NB15_V2_CSV` points
//! at the dataset CSV; it never gates.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zdeval::classifiers::{DecisionTree, ForestConfig, MlpModel, ModelKind, RandomForestModel, TreeConfig};
use zdeval::flowdata::{ClassCatalog, Column, ColumnKind, ColumnSpec, FeatureSchema, FlowTable};
use zdeval::harness::{
    desk_mlp_config, emit_reports, run_experiment, run_on_table, synthesize_dataset, ExperimentConfig, RunReport,
    SyntheticSpec, WdInput,
};
use zdeval::metrics::{evaluate, Evaluation};
use zdeval::preprocess::{preprocess_pipeline, FeatureMatrix, PipelineOptions};
use zdeval::wdanalysis::wasserstein_1d;
use zdeval::zslsplit::{make_zero_day_scenarios, FoldPlan};

const DEMO_SEED: u64 = 42;
const DEMO_SHIFT: f64 = -14.0;
const ODD_CLASS: &str = "delta";

enum Status {
    Pass,
    Fail,
    Skip,
}

type Check = std::result::Result<String, String>;

/// (id, description, runtime limit, check)
type Criterion = (u8, &'static str, Option<Duration>, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Check) -> (Check, Duration) {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let (Ok(detail), Some(limit)) = (&out, limit) {
        if elapsed > limit {
            out = Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"));
        }
    }
    (out, elapsed)
}

// ---------------------------------------------------------------- metrics

struct BruteMetrics {
    accuracy: Option<f64>,
    dr: Option<f64>,
    far: Option<f64>,
    precision: Option<f64>,
    f1: Option<f64>,
    zdr: Option<f64>,
    auc: Option<f64>,
}

fn brute_metrics(y: &[u8], class_ids: &[u32], scores: &[f64], t: f64, held_out: u32) -> BruteMetrics {
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    let (mut z_hit, mut z_total) = (0usize, 0usize);
    for i in 0..y.len() {
        let flagged = scores[i] >= t;
        match (y[i], flagged) {
            (1, true) => tp += 1,
            (1, false) => fn_ += 1,
            (_, true) => fp += 1,
            (_, false) => tn += 1,
        }
        if class_ids[i] == held_out {
            z_total += 1;
            z_hit += usize::from(flagged);
        }
    }
    let pct = |a: usize, b: usize| (b > 0).then(|| 100.0 * a as f64 / b as f64);
    let mut wins = 0.0;
    let mut pairs = 0usize;
    for i in (0..y.len()).filter(|&i| y[i] == 1) {
        for j in (0..y.len()).filter(|&j| y[j] == 0) {
            pairs += 1;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    BruteMetrics {
        accuracy: pct(tp + tn, y.len()),
        dr: pct(tp, tp + fn_),
        far: pct(fp, fp + tn),
        precision: (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64),
        f1: (tp + fp > 0 && tp + fn_ > 0).then(|| 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64),
        zdr: pct(z_hit, z_total),
        auc: (pairs > 0).then(|| wins / pairs as f64),
    }
}

fn close(name: &str, got: Option<f64>, want: Option<f64>, tol: f64) -> std::result::Result<(), String> {
    match (got, want) {
        (None, None) => Ok(()),
        (Some(g), Some(w)) if (g - w).abs() <= tol => Ok(()),
        _ => Err(format!("{name}: got {got:?}, oracle {want:?}")),
    }
}

fn criterion_metrics() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let names: Vec<String> = ["Benign", "a1", "a2", "a3", "a4"].iter().map(|s| s.to_string()).collect();
    let mut undefined_seen = 0usize;
    for case in 0..1000 {
        let n = r.random_range(1..=200);
        let n_attacks = r.random_range(1..=4u32);
        let benign_share = r.random_range(0.0..=1.0);
        let class_ids: Vec<u32> = (0..n)
            .map(|_| if r.random_bool(benign_share) { 0 } else { r.random_range(1..=n_attacks) })
            .collect();
        let y: Vec<u8> = class_ids.iter().map(|&c| u8::from(c != 0)).collect();
        // coarse grid so ties are common
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..=20) as f64 / 20.0).collect();
        let t = r.random_range(0..=20) as f64 / 20.0;
        let held = r.random_range(1..=n_attacks);
        let e = Evaluation {
            y_true: &y,
            class_ids: &class_ids,
            class_names: &names,
            scores: &scores,
            threshold: t,
        };
        let got = evaluate(e, 0, Some(&names[held as usize])).map_err(|e| format!("case {case}: {e}"))?;
        let want = brute_metrics(&y, &class_ids, &scores, t, held);
        let ctx = |e: String| format!("case {case}: {e}");
        close("accuracy", got.accuracy, want.accuracy, 1e-12).map_err(ctx)?;
        close("dr", got.dr, want.dr, 1e-12).map_err(ctx)?;
        close("far", got.far, want.far, 1e-12).map_err(ctx)?;
        close("precision", got.precision, want.precision, 1e-12).map_err(ctx)?;
        close("f1", got.f1, want.f1, 1e-12).map_err(ctx)?;
        close("zdr", got.zdr, want.zdr, 1e-12).map_err(ctx)?;
        close("auc", got.auc, want.auc, 1e-12).map_err(ctx)?;
        undefined_seen += usize::from(want.dr.is_none() || want.far.is_none() || want.zdr.is_none());
    }
    Ok(format!("1000 cases agree within 1e-12 ({undefined_seen} with an undefined metric)"))
}

// ------------------------------------------------------------ wasserstein

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn sorted_difference(u: &[f64], v: &[f64]) -> f64 {
    let (u, v) = (sorted(u), sorted(v));
    u.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum::<f64>() / u.len() as f64
}

/// Integral of |F_u - F_v| with both CDFs evaluated by counting at every
/// merged breakpoint.
fn cdf_integral(u: &[f64], v: &[f64]) -> f64 {
    let (su, sv) = (sorted(u), sorted(v));
    let mut pts: Vec<f64> = su.iter().chain(&sv).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let cdf = |s: &[f64], t: f64| s.partition_point(|&x| x <= t) as f64 / s.len() as f64;
    pts.windows(2)
        .map(|w| (cdf(&su, w[0]) - cdf(&sv, w[0])).abs() * (w[1] - w[0]))
        .sum()
}

fn sample(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| r.random_range(lo..hi)).collect()
}

fn criterion_wasserstein() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let w = |a: &[f64], b: &[f64]| wasserstein_1d(a, b).map_err(|e| e.to_string());
    let mut worst_eq = 0.0f64;
    for case in 0..500 {
        let n = r.random_range(1..=1000);
        let (u, v) = (sample(&mut r, n, -5.0, 5.0), sample(&mut r, n, -5.0, 5.0));
        let err = (w(&u, &v)? - sorted_difference(&u, &v)).abs();
        ensure(err <= 1e-9, || format!("equal-size case {case}: error {err:e}"))?;
        worst_eq = worst_eq.max(err);
    }
    let mut worst_cdf = 0.0f64;
    for case in 0..200 {
        let n = r.random_range(1..=400);
        let m = loop {
            let m = r.random_range(1..=400);
            if m != n {
                break m;
            }
        };
        // some integer-valued samples so the CDFs share breakpoints
        let (u, v) = if case % 4 == 0 {
            let g = |r: &mut ChaCha8Rng, k: usize| (0..k).map(|_| r.random_range(-10..10) as f64).collect::<Vec<_>>();
            (g(&mut r, n), g(&mut r, m))
        } else {
            (sample(&mut r, n, -5.0, 5.0), sample(&mut r, m, -3.0, 7.0))
        };
        let err = (w(&u, &v)? - cdf_integral(&u, &v)).abs();
        ensure(err <= 1e-9, || format!("unequal-size case {case}: error {err:e}"))?;
        worst_cdf = worst_cdf.max(err);
    }
    let mut worst_affine = 0.0f64;
    for case in 0..200 {
        let n = |r: &mut ChaCha8Rng| r.random_range(1..=200);
        let (nu, nv, nw) = (n(&mut r), n(&mut r), n(&mut r));
        let (a, b, c) = (sample(&mut r, nu, -1.0, 1.0), sample(&mut r, nv, -1.0, 1.0), sample(&mut r, nw, -1.0, 1.0));
        let ab = w(&a, &b)?;
        ensure(ab == w(&b, &a)?, || format!("case {case}: not symmetric"))?;
        ensure(ab >= 0.0 && w(&a, &a)? == 0.0, || format!("case {case}: not a distance"))?;
        let slack = w(&a, &c)? - (ab + w(&b, &c)?);
        ensure(slack <= 1e-9, || format!("case {case}: triangle violated by {slack:e}"))?;
        let shift = r.random_range(-1.0..1.0);
        let scale = r.random_range(0.1..4.0);
        let tr = |s: &[f64]| s.iter().map(|x| x + shift).collect::<Vec<_>>();
        let sc = |s: &[f64]| s.iter().map(|x| x * scale).collect::<Vec<_>>();
        let e_t = (w(&tr(&a), &tr(&b))? - ab).abs();
        let e_s = (w(&sc(&a), &sc(&b))? - scale * ab).abs();
        ensure(e_t <= 1e-12, || format!("case {case}: translation error {e_t:e}"))?;
        ensure(e_s <= 1e-12, || format!("case {case}: scaling error {e_s:e}"))?;
        worst_affine = worst_affine.max(e_t).max(e_s);
    }
    Ok(format!(
        "max error: sorted-difference {worst_eq:.1e}, CDF integral {worst_cdf:.1e}, translation/scaling {worst_affine:.1e}"
    ))
}

// ----------------------------------------------------------------- splits

fn random_catalog_table(r: &mut ChaCha8Rng) -> FlowTable {
    let n_attacks = r.random_range(1..=6);
    let mut classes: Vec<String> = Vec::new();
    for c in 0..=n_attacks {
        let count = r.random_range(1..=60);
        let name = if c == 0 { "Benign".to_string() } else { format!("a{c}") };
        classes.extend(std::iter::repeat_n(name, count));
    }
    classes.shuffle(r);
    let n = classes.len();
    let schema = FeatureSchema::new(vec![
        ColumnSpec::new("x", ColumnKind::Numeric),
        ColumnSpec::new("label", ColumnKind::BinaryLabel),
        ColumnSpec::new("attack", ColumnKind::AttackClass),
    ])
    .unwrap();
    let labels = classes.iter().map(|c| u8::from(c != "Benign")).collect();
    let columns = vec![
        Column::Numeric((0..n).map(|i| i as f64).collect()),
        Column::Label(labels),
        Column::Text(classes),
    ];
    FlowTable::new(schema, columns, "Benign").unwrap()
}

fn criterion_splits() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut scenarios = 0usize;
    for case in 0..100 {
        let table = random_catalog_table(&mut r);
        let cat = ClassCatalog::build(&table).map_err(|e| e.to_string())?;
        let n = cat.row_count();
        let k = r.random_range(2..=10usize).min(n);
        let plan = FoldPlan::stratified(&cat, k, r.random()).map_err(|e| e.to_string())?;
        let classes = cat.row_classes();

        let mut seen = vec![0u8; n];
        for f in plan.folds() {
            f.test.iter().for_each(|&i| seen[i] += 1);
        }
        ensure(seen.iter().all(|&s| s == 1), || format!("case {case}: test folds do not partition the rows"))?;

        for c in 0..cat.n_classes() as u32 {
            let per_fold: Vec<usize> = plan
                .folds()
                .iter()
                .map(|f| f.test.iter().filter(|&&i| classes[i] == c).count())
                .collect();
            let spread = per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap();
            ensure(spread <= 1, || format!("case {case}: class {c} fold counts {per_fold:?}"))?;
        }

        for s in make_zero_day_scenarios(&plan, &cat) {
            scenarios += 1;
            ensure(s.train_indices.iter().all(|&i| classes[i] != s.held_out_id), || {
                format!("case {case}: held-out class {} in training", s.held_out_class)
            })?;
            let fold = &plan.folds()[s.fold_id];
            let expect: Vec<usize> = fold.train.iter().copied().filter(|&i| classes[i] != s.held_out_id).collect();
            ensure(s.train_indices == expect && s.test_indices == fold.test, || {
                format!("case {case}: scenario is not the fold minus the held-out class")
            })?;
        }
    }
    Ok(format!("100 catalogs, {scenarios} zero-day scenarios"))
}

// ------------------------------------------------------------- gradients

fn feature_names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("x{j}")).collect()
}

/// Worst relative error over every parameter, or `None` when some hidden
/// pre-activation sits within 1e-3 of the ReLU kink (the loss is not
/// differentiable there).
fn gradient_point(seed: u64) -> Option<f64> {
    const STEP: f64 = 1e-5;
    const FLOOR: f64 = 1e-6;
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let d = r.random_range(1..=5);
    let hidden: Vec<usize> = (0..r.random_range(1..=2)).map(|_| r.random_range(1..=4)).collect();
    let n = r.random_range(1..=6);
    let data: Vec<f64> = (0..n * d).map(|_| r.random_range(-1.0..1.0)).collect();
    let y: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
    let x = FeatureMatrix::from_rows(feature_names(d), data, y).unwrap();
    let mut m = MlpModel::zeros(d, &hidden).unwrap();
    let p0: Vec<f64> = (0..m.n_params()).map(|_| r.random_range(-1.0..1.0)).collect();
    m.set_params(&p0).unwrap();

    for i in 0..n {
        let mut h = x.row(i).to_vec();
        for layer in &m.layers()[..m.layers().len() - 1] {
            let z: Vec<f64> = (0..layer.n_out)
                .map(|o| layer.biases[o] + (0..layer.n_in).map(|k| h[k] * layer.weights[k * layer.n_out + o]).sum::<f64>())
                .collect();
            if z.iter().any(|v| v.abs() < 1e-3) {
                return None;
            }
            h = z.into_iter().map(|v| v.max(0.0)).collect();
        }
    }

    let rows: Vec<usize> = (0..n).collect();
    let (_, analytic) = m.loss_and_gradient(x.view(), &rows).unwrap();
    let mut probe = m.clone();
    let mut loss_at = |p: &[f64]| {
        probe.set_params(p).unwrap();
        probe.loss(x.view(), &rows).unwrap()
    };
    let mut worst = 0.0f64;
    for k in 0..p0.len() {
        let mut p = p0.clone();
        p[k] = p0[k] + STEP;
        let up = loss_at(&p);
        p[k] = p0[k] - STEP;
        let down = loss_at(&p);
        let numeric = (up - down) / (2.0 * STEP);
        let rel = (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(FLOOR);
        worst = worst.max(rel);
    }
    Some(worst)
}

fn criterion_gradients() -> Check {
    let (mut checked, mut skipped, mut worst) = (0usize, 0usize, 0.0f64);
    let mut seed = 0u64;
    while checked < 150 {
        match gradient_point(seed) {
            Some(e) => {
                ensure(e <= 1e-4, || format!("point {seed}: relative error {e:e}"))?;
                worst = worst.max(e);
                checked += 1;
            }
            None => skipped += 1,
        }
        seed += 1;
    }
    Ok(format!("{checked} points, max relative error {worst:.1e} ({skipped} near-kink points skipped)"))
}

// ------------------------------------------------------------ classifiers

fn desk_config(seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(seed);
    cfg.train.mlp = desk_mlp_config();
    cfg
}

fn criterion_classifiers() -> Check {
    let table = synthesize_dataset(&SyntheticSpec::separable(DEMO_SEED)).map_err(|e| e.to_string())?;
    ensure(table.row_count() == 1600, || format!("{} rows", table.row_count()))?;

    let report = run_on_table(&desk_config(DEMO_SEED), table.clone()).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for m in &report.models {
        let known = m.known_attack.as_ref().ok_or("no known-attack section")?;
        let acc = known.mean.accuracy.mean.unwrap_or(f64::NAN);
        let dr = known.mean.dr.mean.unwrap_or(f64::NAN);
        ensure(acc >= 99.0 && dr >= 99.0, || format!("{}: accuracy {acc:.2}, DR {dr:.2}", m.model.as_str()))?;
        parts.push(format!("{} acc {acc:.2} DR {dr:.2}", m.model.as_str()));
    }

    let x = preprocess_pipeline(&table, None, PipelineOptions::default()).map_err(|e| e.to_string())?.matrix;
    let cfg = ForestConfig {
        n_trees: 1,
        m_try: Some(x.n_features()),
        bootstrap: false,
        ..Default::default()
    };
    let forest = RandomForestModel::fit(x.view(), &cfg, 7).map_err(|e| e.to_string())?;
    let tree = DecisionTree::fit(x.view(), &TreeConfig::default(), &mut ChaCha8Rng::seed_from_u64(0))
        .map_err(|e| e.to_string())?;
    ensure(forest.trees() == [tree.clone()], || "1-tree forest grew a different tree".into())?;
    let scores = forest.score(x.view()).map_err(|e| e.to_string())?;
    let same = (0..x.n_rows()).all(|i| scores.as_slice()[i] == tree.score_row(x.row(i)));
    ensure(same, || "1-tree forest scores differ from the tree".into())?;
    parts.push(format!("1-tree forest == tree ({} nodes)", tree.nodes().len()));
    Ok(parts.join(", "))
}

// ---------------------------------------------- qualitative reproduction

fn demo_report() -> Result<RunReport, String> {
    let table = synthesize_dataset(&SyntheticSpec::zero_day_demo(DEMO_SEED, DEMO_SHIFT)).map_err(|e| e.to_string())?;
    run_on_table(&desk_config(DEMO_SEED), table).map_err(|e| e.to_string())
}

fn criterion_reproduction() -> Check {
    let report = demo_report()?;
    let wd: Vec<(String, f64)> = report
        .wd
        .iter()
        .map(|w| (w.held_out_class.clone(), w.mean_wd.mean.unwrap_or(f64::NAN)))
        .collect();
    ensure(wd.len() == 4, || format!("{} classes in the WD summary", wd.len()))?;
    let odd_wd = wd.iter().find(|(c, _)| c == ODD_CLASS).map(|p| p.1).ok_or("odd class missing")?;
    ensure(wd.iter().all(|(c, v)| c == ODD_CLASS || *v < odd_wd), || {
        format!("{ODD_CLASS} WD {odd_wd:.4} is not strictly largest: {wd:?}")
    })?;

    let mut parts = vec![format!("{ODD_CLASS} WD {odd_wd:.4} (largest)")];
    for kind in [ModelKind::Forest, ModelKind::Mlp] {
        let m = report.model(kind).ok_or_else(|| format!("no {} section", kind.as_str()))?;
        let zdr: Vec<(String, f64)> = m
            .zero_day
            .iter()
            .map(|z| (z.held_out_class.clone(), z.mean.zdr.and_then(|s| s.mean).unwrap_or(f64::NAN)))
            .collect();
        let odd = zdr.iter().find(|(c, _)| c == ODD_CLASS).map(|p| p.1).ok_or("odd class missing")?;
        ensure(zdr.iter().all(|(c, v)| c == ODD_CLASS || *v > odd), || {
            format!("{}: {ODD_CLASS} Z-DR {odd:.2} is not strictly lowest: {zdr:?}", kind.as_str())
        })?;
        let rho = m.wd_zdr_spearman.ok_or_else(|| format!("{}: no Spearman value", kind.as_str()))?;
        ensure(rho <= -0.5, || format!("{}: Spearman {rho:.3} > -0.5", kind.as_str()))?;
        parts.push(format!("{} {ODD_CLASS} Z-DR {odd:.2} rho {rho:.3}", kind.as_str()));
    }
    Ok(parts.join(", "))
}

/// Growing the odd class's shift should raise its distance and never raise
/// its detection rate. Distances are taken on the unscaled matrix because
/// the shift widens the min-max range, which shrinks every scaled distance.
/// Not an acceptance criterion; printed as a supplement.
fn shift_sweep() -> Check {
    let mut prev: Option<(f64, f64)> = None;
    let mut parts = Vec::new();
    for shift in [0.0, -8.0, -12.0] {
        let table = synthesize_dataset(&SyntheticSpec::zero_day_demo(DEMO_SEED, shift)).map_err(|e| e.to_string())?;
        let mut cfg = desk_config(DEMO_SEED);
        cfg.models = vec![ModelKind::Forest];
        cfg.classes = vec![ODD_CLASS.into()];
        cfg.wd.input = WdInput::Raw;
        let r = run_on_table(&cfg, table).map_err(|e| e.to_string())?;
        let wd = r.wd_for(ODD_CLASS).and_then(|w| w.mean_wd.mean).ok_or("no WD")?;
        let zdr = r.models[0].zero_day_for(ODD_CLASS).and_then(|z| z.mean.zdr?.mean).ok_or("no Z-DR")?;
        if let Some((pw, pz)) = prev {
            ensure(wd > pw && zdr <= pz, || format!("shift {shift}: WD {wd:.4} (was {pw:.4}), Z-DR {zdr:.2} (was {pz:.2})"))?;
        }
        prev = Some((wd, zdr));
        parts.push(format!("{shift}: WD {wd:.4} Z-DR {zdr:.2}"));
    }
    Ok(parts.join("; "))
}

// ------------------------------------------------------------ full scale

fn full_scale() -> Option<Check> {
    let csv = std::env::var_os("NF_UNSW_NB15_V2_CSV")?;
    Some((|| {
        let cfg_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/nf-unsw-nb15-v2.toml");
        let mut cfg = ExperimentConfig::load(&cfg_path).map_err(|e| e.to_string())?;
        cfg.dataset.as_mut().ok_or("config has no dataset")?.path = PathBuf::from(csv);
        cfg.subsample = Some(200_000);
        cfg.models = vec![ModelKind::Forest];
        let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let mut zdr: Vec<(String, f64)> = report.models[0]
            .zero_day
            .iter()
            .filter_map(|z| Some((z.held_out_class.clone(), z.mean.zdr?.mean?)))
            .collect();
        zdr.sort_by(|a, b| a.1.total_cmp(&b.1));
        let lowest: Vec<&str> = zdr.iter().take(2).map(|(c, _)| c.as_str()).collect();
        let detail = format!("two lowest Z-DR: {:?}", &zdr[..zdr.len().min(2)]);
        ensure(lowest.contains(&"Fuzzers") && lowest.contains(&"Exploits"), || detail.clone())?;
        Ok(detail)
    })())
}

// ----------------------------------------------------------- determinism

fn criterion_determinism() -> Check {
    let dirs = [tempfile::tempdir(), tempfile::tempdir()];
    let mut listings = Vec::new();
    for d in &dirs {
        let d = d.as_ref().map_err(|e| e.to_string())?;
        let out = d.path().join("out");
        let files = emit_reports(&demo_report()?, &out).map_err(|e| e.to_string())?;
        listings.push((out, files));
    }
    let (a, b) = (&listings[0], &listings[1]);
    ensure(a.1 == b.1, || "runs wrote different file sets".into())?;
    let metrics = a.1.iter().filter(|f| f.starts_with("metrics_")).count();
    ensure(metrics == 2, || format!("{metrics} metrics files"))?;
    for f in &a.1 {
        let read = |dir: &Path| std::fs::read(dir.join(f)).map_err(|e| format!("{f}: {e}"));
        ensure(read(&a.0)? == read(&b.0)?, || format!("{f} differs between runs"))?;
    }
    Ok(format!("{} files byte-identical, {metrics} of them metrics CSVs", a.1.len()))
}

fn main() {
    // `cargo test` forwards its own arguments; a filter that names none of
    // the criteria is not meaningful here, so arguments are ignored.
    let secs = Duration::from_secs;
    let gating: Vec<Criterion> = vec![
        (1, "metrics match brute-force oracles", Some(secs(10)), criterion_metrics),
        (2, "Wasserstein matches oracles and axioms", Some(secs(30)), criterion_wasserstein),
        (3, "split invariants", Some(secs(10)), criterion_splits),
        (4, "MLP gradient check", Some(secs(30)), criterion_gradients),
        (5, "classifier sanity on separable blobs", None, criterion_classifiers),
        (6, "shifted class: largest WD, lowest Z-DR, rho <= -0.5", Some(secs(120)), criterion_reproduction),
        (8, "identical runs give identical files", None, criterion_determinism),
    ];

    let mut failed = 0;
    let line = |id: &str, name: &str, status: Status, detail: &str, t: Duration| {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        println!("criterion {id:>2} {tag} [{t:>8.2?}] {name}: {detail}");
    };
    for (id, name, limit, f) in gating {
        let (out, t) = timed(limit, f);
        match out {
            Ok(d) => line(&id.to_string(), name, Status::Pass, &d, t),
            Err(d) => {
                failed += 1;
                line(&id.to_string(), name, Status::Fail, &d, t);
            }
        }
    }

    let (sweep, t) = timed(None, shift_sweep);
    let status = if sweep.is_ok() { Status::Pass } else { Status::Fail };
    failed += usize::from(sweep.is_err());
    line("6+", "shift sweep is monotone", status, &sweep.unwrap_or_else(|e| e), t);

    let name = "full-scale NetFlow ranks (not gating)";
    let start = Instant::now();
    match full_scale() {
        None => line("7", name, Status::Skip, "NF_UNSW_NB15_V2_CSV not set", Duration::ZERO),
        Some(Ok(d)) => line("7", name, Status::Pass, &d, start.elapsed()),
        Some(Err(d)) => line("7", name, Status::Fail, &d, start.elapsed()),
    }

    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
