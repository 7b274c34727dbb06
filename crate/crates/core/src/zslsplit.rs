//! Fold plans and leave-one-attack-class-out scenarios.
//!
//! The whole dataset is split once into `k` stratified folds. A zero-day
//! scenario for class `a_z` takes one fold's training rows minus every row
//! of `a_z`, and evaluates on that fold's untouched test rows, which still
//! contain `a_z` alongside the seen classes. Known-attack scenarios use the
//! same folds without any exclusion.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowdata::ClassCatalog;
use crate::rng;

const FOLD_SALT: u64 = 0xF01D;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    seed: u64,
    folds: Vec<Fold>,
    /// Classes with fewer rows than folds.
    sparse_classes: Vec<String>,
}

impl FoldPlan {
    /// Stratified k-fold split over the catalog's rows.
    ///
    /// Each class's rows are shuffled on their own random stream and dealt
    /// round-robin into folds, continuing from where the previous class
    /// stopped so fold sizes stay balanced overall. Per class, fold counts
    /// differ by at most one.
    pub fn stratified(catalog: &ClassCatalog, k: usize, seed: u64) -> Result<Self> {
        let n = catalog.row_count();
        if k < 2 {
            return Err(Error::Config(format!("fold count must be at least 2, got {k}")));
        }
        if k > n {
            return Err(Error::Data(format!("{k} folds requested for {n} rows")));
        }
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); catalog.n_classes()];
        for (row, &c) in catalog.row_classes().iter().enumerate() {
            by_class[c as usize].push(row);
        }
        let key = rng::derive_seed(seed, FOLD_SALT);
        let mut fold_of = vec![0usize; n];
        let mut offset = 0usize;
        let mut sparse_classes = Vec::new();
        for (class, rows) in by_class.iter_mut().enumerate() {
            if rows.is_empty() {
                continue;
            }
            if rows.len() < k {
                let name = catalog.class_name(class as u32).to_string();
                log::warn!("class {name:?} has {} rows for {k} folds (sparse across folds)", rows.len());
                sparse_classes.push(name);
            }
            let mut r = rng::stream(key, class as u64);
            rows.shuffle(&mut r);
            for (p, &row) in rows.iter().enumerate() {
                fold_of[row] = (offset + p) % k;
            }
            offset = (offset + rows.len()) % k;
        }
        let folds = (0..k)
            .map(|f| {
                let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of[i] == f);
                Fold { train, test }
            })
            .collect();
        Ok(FoldPlan {
            k,
            seed,
            folds,
            sparse_classes,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn folds(&self) -> &[Fold] {
        &self.folds
    }

    pub fn sparse_classes(&self) -> &[String] {
        &self.sparse_classes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroDayScenario {
    pub held_out_class: String,
    pub held_out_id: u32,
    pub fold_id: usize,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownAttackScenario {
    pub fold_id: usize,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// Classes present in the test fold but absent from training.
    pub missing_in_train: Vec<String>,
}

/// One scenario per (attack class, fold), classes in catalog order.
pub fn make_zero_day_scenarios(plan: &FoldPlan, catalog: &ClassCatalog) -> Vec<ZeroDayScenario> {
    let classes = catalog.row_classes();
    let mut out = Vec::with_capacity(catalog.n_attacks() * plan.k());
    for (a, name) in catalog.attack_names().iter().enumerate() {
        let id = a as u32 + 1;
        for (fold_id, fold) in plan.folds().iter().enumerate() {
            out.push(ZeroDayScenario {
                held_out_class: name.clone(),
                held_out_id: id,
                fold_id,
                train_indices: fold
                    .train
                    .iter()
                    .copied()
                    .filter(|&i| classes[i] != id)
                    .collect(),
                test_indices: fold.test.clone(),
            });
        }
    }
    out
}

pub fn make_known_scenarios(plan: &FoldPlan, catalog: &ClassCatalog) -> Vec<KnownAttackScenario> {
    let classes = catalog.row_classes();
    plan.folds()
        .iter()
        .enumerate()
        .map(|(fold_id, fold)| {
            let mut in_train = vec![false; catalog.n_classes()];
            fold.train.iter().for_each(|&i| in_train[classes[i] as usize] = true);
            let mut in_test = vec![false; catalog.n_classes()];
            fold.test.iter().for_each(|&i| in_test[classes[i] as usize] = true);
            let missing_in_train: Vec<String> = (0..catalog.n_classes())
                .filter(|&c| in_test[c] && !in_train[c])
                .map(|c| catalog.class_name(c as u32).to_string())
                .collect();
            for m in &missing_in_train {
                log::warn!("fold {fold_id}: class {m:?} appears in test but not in training");
            }
            KnownAttackScenario {
                fold_id,
                train_indices: fold.train.clone(),
                test_indices: fold.test.clone(),
                missing_in_train,
            }
        })
        .collect()
}

/// Run-length encoding of an ascending index list as `[start, len]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexRuns(pub Vec<[usize; 2]>);

impl IndexRuns {
    pub fn encode(indices: &[usize]) -> Self {
        let mut runs: Vec<[usize; 2]> = Vec::new();
        for &i in indices {
            match runs.last_mut() {
                Some([start, len]) if *start + *len == i => *len += 1,
                _ => runs.push([i, 1]),
            }
        }
        IndexRuns(runs)
    }

    pub fn decode(&self) -> Vec<usize> {
        self.0
            .iter()
            .flat_map(|&[start, len]| start..start + len)
            .collect()
    }
}

/// Audit/replay form of a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    /// `None` for known-attack scenarios.
    pub held_out_class: Option<String>,
    pub fold: usize,
    pub train: IndexRuns,
    pub test: IndexRuns,
}

impl From<&ZeroDayScenario> for ScenarioDoc {
    fn from(s: &ZeroDayScenario) -> Self {
        ScenarioDoc {
            held_out_class: Some(s.held_out_class.clone()),
            fold: s.fold_id,
            train: IndexRuns::encode(&s.train_indices),
            test: IndexRuns::encode(&s.test_indices),
        }
    }
}

impl From<&KnownAttackScenario> for ScenarioDoc {
    fn from(s: &KnownAttackScenario) -> Self {
        ScenarioDoc {
            held_out_class: None,
            fold: s.fold_id,
            train: IndexRuns::encode(&s.train_indices),
            test: IndexRuns::encode(&s.test_indices),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowdata::{Column, ColumnKind, ColumnSpec, FeatureSchema, FlowTable};

    pub(crate) fn catalog_from(classes: &[&str]) -> ClassCatalog {
        let schema = FeatureSchema::new(vec![
            ColumnSpec::new("x", ColumnKind::Numeric),
            ColumnSpec::new("y", ColumnKind::BinaryLabel),
            ColumnSpec::new("c", ColumnKind::AttackClass),
        ])
        .unwrap();
        let n = classes.len();
        let table = FlowTable::new(
            schema,
            vec![
                Column::Numeric(vec![0.0; n]),
                Column::Label(classes.iter().map(|c| u8::from(*c != "benign")).collect()),
                Column::Text(classes.iter().map(|c| c.to_string()).collect()),
            ],
            "benign",
        )
        .unwrap();
        ClassCatalog::build(&table).unwrap()
    }

    #[test]
    fn ten_rows_one_class_two_per_fold() {
        let mut classes = vec!["A"; 10];
        classes.push("benign");
        let cat = catalog_from(&classes);
        let plan = FoldPlan::stratified(&cat, 5, 7).unwrap();
        for fold in plan.folds() {
            let a = fold.test.iter().filter(|&&i| i < 10).count();
            assert_eq!(a, 2);
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let classes: Vec<&str> = (0..200)
            .map(|i| ["benign", "A", "B", "C"][i % 4])
            .collect();
        let cat = catalog_from(&classes);
        let a = FoldPlan::stratified(&cat, 5, 42).unwrap();
        let b = FoldPlan::stratified(&cat, 5, 42).unwrap();
        assert_eq!(a, b);
        let c = FoldPlan::stratified(&cat, 5, 43).unwrap();
        assert_ne!(a.folds(), c.folds());
    }

    #[test]
    fn sparse_class_flagged_and_errors() {
        let mut classes = vec!["benign"; 20];
        classes.extend(["Rare"; 3]);
        let cat = catalog_from(&classes);
        let plan = FoldPlan::stratified(&cat, 5, 1).unwrap();
        assert_eq!(plan.sparse_classes(), &["Rare".to_string()]);
        let known = make_known_scenarios(&plan, &cat);
        assert_eq!(known.len(), 5);
        assert!(known.iter().all(|k| k.missing_in_train.is_empty()));

        assert!(matches!(FoldPlan::stratified(&cat, 1, 1), Err(Error::Config(_))));
        assert!(matches!(FoldPlan::stratified(&cat, 24, 1), Err(Error::Data(_))));

        // a single-row class lands in one test fold and is missing from that fold's training
        let mut one = vec!["benign"; 10];
        one.push("Solo");
        let cat = catalog_from(&one);
        let plan = FoldPlan::stratified(&cat, 5, 1).unwrap();
        let known = make_known_scenarios(&plan, &cat);
        let flagged: usize = known.iter().map(|k| k.missing_in_train.len()).sum();
        assert_eq!(flagged, 1);
    }

    #[test]
    fn zero_day_counts_and_exclusion() {
        let classes: Vec<&str> = (0..90)
            .map(|i| ["benign", "Exploits", "Fuzzers", "Worms"][i % 4])
            .collect();
        let cat = catalog_from(&classes);
        let plan = FoldPlan::stratified(&cat, 5, 3).unwrap();
        let zs = make_zero_day_scenarios(&plan, &cat);
        assert_eq!(zs.len(), 3 * 5);
        let worms = cat.class_id("Worms").unwrap();
        for s in zs.iter().filter(|s| s.held_out_class == "Worms") {
            assert!(s.train_indices.iter().all(|&i| cat.row_classes()[i] != worms));
            assert!(s.test_indices.iter().any(|&i| cat.row_classes()[i] == worms));
        }
    }

    #[test]
    fn single_attack_class_trains_on_benign_only() {
        let classes: Vec<&str> = (0..12).map(|i| if i % 3 == 0 { "A" } else { "benign" }).collect();
        let cat = catalog_from(&classes);
        let plan = FoldPlan::stratified(&cat, 2, 9).unwrap();
        let zs = make_zero_day_scenarios(&plan, &cat);
        assert_eq!(zs.len(), 2);
        for s in &zs {
            assert!(s.train_indices.iter().all(|&i| cat.row_classes()[i] == 0));
        }
    }

    #[test]
    fn known_scenarios_partition_rows() {
        let classes: Vec<&str> = (0..57).map(|i| ["benign", "A", "B"][i % 3]).collect();
        let cat = catalog_from(&classes);
        let plan = FoldPlan::stratified(&cat, 5, 11).unwrap();
        let known = make_known_scenarios(&plan, &cat);
        assert_eq!(known.len(), 5);
        let mut seen = vec![0; 57];
        for k in &known {
            k.test_indices.iter().for_each(|&i| seen[i] += 1);
            assert!(k.train_indices.iter().all(|i| !k.test_indices.contains(i)));
            assert_eq!(k.train_indices.len() + k.test_indices.len(), 57);
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn scenario_doc_json() {
        let classes: Vec<&str> = (0..20).map(|i| ["benign", "A"][i % 2]).collect();
        let cat = catalog_from(&classes);
        let plan = FoldPlan::stratified(&cat, 2, 0).unwrap();
        let zs = make_zero_day_scenarios(&plan, &cat);
        let doc = ScenarioDoc::from(&zs[0]);
        let json = serde_json::to_string(&doc).unwrap();
        let back: ScenarioDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.train.decode(), zs[0].train_indices);
        assert_eq!(back.test.decode(), zs[0].test_indices);
        assert_eq!(back.held_out_class.as_deref(), Some("A"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn runs_round_trip(mut v in proptest::collection::vec(0usize..500, 0..200)) {
                v.sort_unstable();
                v.dedup();
                let runs = IndexRuns::encode(&v);
                prop_assert_eq!(runs.decode(), v);
            }

            #[test]
            fn split_invariants(
                counts in proptest::collection::vec(0usize..40, 2..6),
                k in 2usize..7,
                seed in any::<u64>(),
            ) {
                let names = ["benign", "A", "B", "C", "D", "E"];
                let mut classes = Vec::new();
                for (c, &n) in counts.iter().enumerate() {
                    classes.extend(std::iter::repeat_n(names[c], n));
                }
                prop_assume!(classes.len() >= k && classes.iter().any(|c| *c != "benign"));
                let cat = catalog_from(&classes);
                let plan = FoldPlan::stratified(&cat, k, seed).unwrap();
                for c in 0..cat.n_classes() as u32 {
                    let per_fold: Vec<usize> = plan.folds().iter()
                        .map(|f| f.test.iter().filter(|&&i| cat.row_classes()[i] == c).count())
                        .collect();
                    let lo = *per_fold.iter().min().unwrap();
                    let hi = *per_fold.iter().max().unwrap();
                    prop_assert!(hi - lo <= 1);
                }
                for s in make_zero_day_scenarios(&plan, &cat) {
                    prop_assert!(s.train_indices.iter().all(|&i| cat.row_classes()[i] != s.held_out_id));
                    prop_assert!(s.train_indices.iter().all(|i| s.test_indices.binary_search(i).is_err()));
                }
                let mut all: Vec<usize> = plan.folds().iter().flat_map(|f| f.test.clone()).collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..classes.len()).collect::<Vec<_>>());
            }
        }
    }
}
