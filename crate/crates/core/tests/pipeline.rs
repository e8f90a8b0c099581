use diabetes_core::classifiers::{
    train_decision_tree, Classifier, HyperParams, Learner, ModelKind, ModelSpec,
};
use diabetes_core::dataset::{train_test_split_masked, Preprocessor};
use diabetes_core::ensemble::{select_members, DEFAULT_MEMBER_COUNT};
use diabetes_core::metrics::{confusion_matrix, log_loss, Metric, LOG_LOSS_EPSILON};
use diabetes_core::model_selection::{
    cross_validate, grid_search, CvOptions, CvResult, FoldResult, ImputationScope, Objective,
};
use diabetes_core::synthetic::generate_synthetic_vitals;
use diabetes_core::vitals::{
    aggregate_vitals, to_dataset, Demographics, RawVitalsRecord, VisitDate,
};
use diabetes_core::{Dataset, Error, MaskedDataset, MetricReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
struct AlwaysNegative;

struct Zero(usize);

impl Classifier for Zero {
    fn n_features(&self) -> usize {
        self.0
    }

    fn proba_unchecked(&self, _: &[f64]) -> f64 {
        0.0
    }
}

impl Learner for AlwaysNegative {
    type Model = Zero;

    fn fit(&self, train: &Dataset) -> diabetes_core::Result<Zero> {
        Ok(Zero(train.n_features()))
    }
}

fn noisy_threshold_data(n: usize, noise_features: usize, flip: f64, seed: u64) -> MaskedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 1 + noise_features;
    let mut cells = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x0: f64 = rng.random_range(-1.0..1.0);
        cells.push(Some(x0));
        for _ in 0..noise_features {
            cells.push(Some(rng.random_range(-1.0..1.0)));
        }
        let y = u8::from(x0 > 0.0);
        labels.push(if rng.random_bool(flip) { 1 - y } else { y });
    }
    MaskedDataset::new(cells, labels, (0..d).map(|j| format!("x{j}")).collect()).unwrap()
}

#[test]
fn constant_predictor_scores_half_on_balanced_data() {
    let data = noisy_threshold_data(100, 1, 0.0, 1);
    let counts = data.class_counts();
    // Rebalance to exactly 50/50 by relabelling the surplus.
    let mut labels = data.labels().to_vec();
    let mut surplus = counts[1] as isize - 50;
    for y in labels.iter_mut() {
        if surplus > 0 && *y == 1 {
            *y = 0;
            surplus -= 1;
        } else if surplus < 0 && *y == 0 {
            *y = 1;
            surplus += 1;
        }
    }
    let cells: Vec<Option<f64>> = data.rows().flat_map(|r| r.to_vec()).collect();
    let data = MaskedDataset::new(cells, labels, data.feature_names().to_vec()).unwrap();
    let cv = cross_validate(&data, &AlwaysNegative, &CvOptions::default()).unwrap();
    assert_eq!(cv.folds.len(), 5);
    for fold in &cv.folds {
        assert_eq!(fold.report.accuracy, Some(0.5));
        assert_eq!(fold.report.sensitivity, Some(0.0));
    }
    assert_eq!(cv.mean(Metric::Accuracy), Some(0.5));
}

#[test]
fn fold_summaries_stay_within_fold_range() {
    let data = noisy_threshold_data(120, 2, 0.2, 8);
    let cv = cross_validate(
        &data,
        &ModelSpec::with_defaults(ModelKind::DecisionTree),
        &CvOptions::default(),
    )
    .unwrap();
    for metric in Metric::ALL {
        let values = cv.metric_values(metric);
        let (mean, _) = cv.metric_summary(metric).unwrap();
        assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= mean && mean <= hi);
    }
}

#[test]
fn validation_rows_never_reach_fold_transforms() {
    let mut data = noisy_threshold_data(80, 2, 0.1, 3);
    for i in (0..80).step_by(7) {
        data.set(i, 1, None);
    }
    let spec = ModelSpec::with_defaults(ModelKind::NaiveBayes);
    let options = CvOptions::default();
    let clean = cross_validate(&data, &spec, &options).unwrap();

    let folds = diabetes_core::model_selection::stratified_k_fold(
        data.labels(),
        options.folds,
        options.seed,
    )
    .unwrap();
    let mut poisoned = data.clone();
    for &i in &folds[0] {
        for j in 0..poisoned.n_features() {
            poisoned.set(i, j, Some(1e9));
        }
    }
    let dirty = cross_validate(&poisoned, &spec, &options).unwrap();
    assert_eq!(clean.folds[0].preprocessor, dirty.folds[0].preprocessor);

    // The check has teeth: whole-dataset imputation does see the poison.
    let whole = CvOptions {
        imputation: ImputationScope::WholeDataset,
        ..options
    };
    let a = cross_validate(&data, &spec, &whole).unwrap();
    let b = cross_validate(&poisoned, &spec, &whole).unwrap();
    assert_ne!(
        a.folds[0].preprocessor.imputer,
        b.folds[0].preprocessor.imputer
    );
}

#[test]
fn fold_failures_name_the_fold() {
    let data = noisy_threshold_data(40, 1, 0.0, 2);
    let params = HyperParams {
        knn_k: 39,
        ..Default::default()
    };
    let err = cross_validate(
        &data,
        &ModelSpec::new(ModelKind::Knn, params),
        &CvOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Fold { fold: 0, .. }), "{err:?}");
}

/// Label is `x0 > 0 && x1 > 0` (a depth-2 tree), flipped with probability
/// 0.15, plus six pure-noise features for deeper trees to overfit.
fn planted_depth_two(n: usize, seed: u64) -> MaskedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 8;
    let mut cells = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = u8::from(x[0] > 0.0 && x[1] > 0.0);
        labels.push(if rng.random_bool(0.15) { 1 - y } else { y });
        cells.extend(x.into_iter().map(Some));
    }
    MaskedDataset::new(cells, labels, (0..d).map(|j| format!("x{j}")).collect()).unwrap()
}

#[test]
fn grid_search_prefers_shallow_trees_on_shallow_signal() {
    let data = planted_depth_two(300, 17);
    let grid: Vec<ModelSpec> = (1..=8)
        .map(|depth| {
            ModelSpec::new(
                ModelKind::DecisionTree,
                HyperParams {
                    tree_max_depth: depth,
                    ..Default::default()
                },
            )
        })
        .collect();
    let found = grid_search(&data, &grid, &CvOptions::default(), Objective::default()).unwrap();
    let depth = found.best().config.params.tree_max_depth;
    assert!(depth <= 3, "selected depth {depth}");
    assert_eq!(found.results.len(), 8);

    let single = grid_search(
        &data,
        &grid[3..4],
        &CvOptions::default(),
        Objective::default(),
    )
    .unwrap();
    assert_eq!(single.best_index, 0);
    assert_eq!(
        grid_search::<ModelSpec>(&data, &[], &CvOptions::default(), Objective::default())
            .unwrap_err(),
        Error::EmptyGrid
    );
    assert_eq!(
        "nonsense".parse::<Objective>().unwrap_err(),
        Error::UnknownObjective("nonsense".into())
    );
}

#[test]
fn exact_ties_go_to_the_earliest_grid_entry() {
    let data = noisy_threshold_data(100, 1, 0.1, 5);
    let spec = ModelSpec::with_defaults(ModelKind::NaiveBayes);
    let mut other = spec.clone();
    other.params.knn_k = 7; // irrelevant to naive Bayes, so scores tie exactly
    let found = grid_search(
        &data,
        &[other.clone(), spec.clone()],
        &CvOptions::default(),
        Objective::default(),
    )
    .unwrap();
    assert_eq!(found.best_index, 0);
    let found = grid_search(
        &data,
        &[spec, other],
        &CvOptions::default(),
        Objective::default(),
    )
    .unwrap();
    assert_eq!(found.best_index, 0);
}

fn visit(id: &str, day: u8, v: [f64; 5]) -> RawVitalsRecord {
    RawVitalsRecord {
        patient_id: id.into(),
        visit_date: VisitDate {
            year: 2011,
            month: 3,
            day,
        },
        weight: v[0],
        height: v[1],
        bmi: v[2],
        systolic_bp: v[3],
        diastolic_bp: v[4],
    }
}

#[test]
fn three_patient_aggregation_matches_hand_table() {
    let records = vec![
        visit("a", 1, [80.0, 170.0, 27.7, 130.0, 85.0]),
        visit("a", 2, [0.0, 170.0, 0.0, 120.0, 75.0]),
        visit("a", 3, [86.0, 0.0, 29.8, 140.0, 80.0]),
        visit("b", 1, [55.5, 160.0, 21.7, 110.0, 70.0]),
        visit("c", 1, [0.0, 180.0, 0.0, 150.0, 95.0]),
        visit("c", 2, [0.0, 181.0, 0.0, 146.0, 91.0]),
        visit("zzz", 1, [1.0, 1.0, 1.0, 1.0, 1.0]),
    ];
    let demographics = vec![
        Demographics {
            patient_id: "a".into(),
            age: 61.0,
            gender: 0,
            label: 1,
        },
        Demographics {
            patient_id: "b".into(),
            age: 34.0,
            gender: 1,
            label: 0,
        },
        Demographics {
            patient_id: "c".into(),
            age: 47.0,
            gender: 0,
            label: 1,
        },
    ];
    let data = to_dataset(&aggregate_vitals(&records, &demographics).unwrap()).unwrap();
    let n = None;
    #[rustfmt::skip]
    let expected: [[Option<f64>; 17]; 3] = [
        [Some(61.0), Some(0.0), Some(80.0), Some(86.0), Some(83.0), Some(170.0), Some(170.0), Some(170.0),
         Some(27.7), Some(29.8), Some(28.75), Some(120.0), Some(140.0), Some(130.0), Some(75.0), Some(85.0), Some(80.0)],
        [Some(34.0), Some(1.0), Some(55.5), Some(55.5), Some(55.5), Some(160.0), Some(160.0), Some(160.0),
         Some(21.7), Some(21.7), Some(21.7), Some(110.0), Some(110.0), Some(110.0), Some(70.0), Some(70.0), Some(70.0)],
        [Some(47.0), Some(0.0), n, n, n, Some(180.0), Some(181.0), Some(180.5),
         n, n, n, Some(146.0), Some(150.0), Some(148.0), Some(91.0), Some(95.0), Some(93.0)],
    ];
    for (i, row) in expected.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            match (cell, data.row(i)[j]) {
                (Some(e), Some(g)) => assert!((e - g).abs() < 1e-12, "row {i} col {j}: {g} vs {e}"),
                (e, g) => assert_eq!(*e, g, "row {i} col {j}"),
            }
        }
    }
    assert_eq!(data.labels(), &[1, 0, 1]);
}

#[test]
fn synthetic_signal_is_learnable() {
    let (records, demographics) = generate_synthetic_vitals(2000, 3);
    let data = to_dataset(&aggregate_vitals(&records, &demographics).unwrap()).unwrap();
    assert_eq!(data.n_features(), 17);
    let (train_raw, test_raw) = train_test_split_masked(&data, 0.25, 3).unwrap();
    let pre = Preprocessor::fit(&train_raw).unwrap();
    let (train, test) = (
        pre.apply(&train_raw).unwrap(),
        pre.apply(&test_raw).unwrap(),
    );
    let tree = ModelSpec::with_defaults(ModelKind::DecisionTree)
        .fit(&train)
        .unwrap();
    let accuracy = confusion_matrix(&tree.predict_batch(&test).unwrap(), test.labels())
        .unwrap()
        .report()
        .accuracy
        .unwrap();
    assert!(accuracy > 0.6, "accuracy {accuracy}");
    // Same call through the plain training function.
    let direct = train_decision_tree(&train, 7).unwrap();
    assert_eq!(
        direct.proba(test.row(0)),
        tree.predict_proba(test.row(0)).unwrap()
    );
}

fn fake_result(kind: ModelKind, loss: f64) -> CvResult {
    let tiny = MaskedDataset::from(Dataset::from_rows(&[[0.0], [1.0]], &[0, 1]).unwrap());
    let fold = FoldResult {
        report: MetricReport::default(),
        log_loss: loss,
        train_accuracy: 1.0,
        n_train: 2,
        n_validation: 2,
        preprocessor: Preprocessor::fit(&tiny).unwrap(),
        validation_rows: vec![0, 1],
        validation_probas: vec![0.5, 0.5],
    };
    CvResult {
        config: ModelSpec::with_defaults(kind),
        folds: vec![fold],
    }
}

#[test]
fn members_are_ranked_by_validation_loss() {
    let reports: Vec<CvResult> = [0.61, 0.45, 0.52, 0.45, 0.70, 0.40, 0.30]
        .iter()
        .zip(ModelKind::ALL)
        .map(|(&l, k)| fake_result(k, l))
        .collect();
    let picked = select_members(&reports, &[ModelKind::NaiveBayes], DEFAULT_MEMBER_COUNT).unwrap();
    assert_eq!(
        picked,
        vec![
            ModelKind::NeuralNetwork,
            ModelKind::LinearSvm,
            ModelKind::RandomForest
        ]
    );
    let all = select_members(&reports, &[], 20).unwrap();
    assert_eq!(all.len(), 7);
    assert_eq!(all[0], ModelKind::NaiveBayes);
    assert_eq!(
        select_members(&reports, &ModelKind::ALL, 3).unwrap_err(),
        Error::AllExcluded
    );
}

#[test]
fn out_of_fold_probabilities_cover_every_row_once() {
    let data = planted_depth_two(120, 4);
    let spec = ModelSpec::with_defaults(ModelKind::Knn);
    let cv = cross_validate(&data, &spec, &CvOptions::default()).unwrap();
    let oof = cv.out_of_fold_probas(data.n_rows()).unwrap();
    for fold in &cv.folds {
        let probs: Vec<f64> = fold.validation_rows.iter().map(|&i| oof[i]).collect();
        let labels: Vec<u8> = fold
            .validation_rows
            .iter()
            .map(|&i| data.labels()[i])
            .collect();
        assert_eq!(
            log_loss(&probs, &labels, LOG_LOSS_EPSILON).unwrap(),
            fold.log_loss
        );
    }
    assert!(cv.out_of_fold_probas(data.n_rows() + 1).is_none());
}
