use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_diabetes-ml");

fn pima() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/pima.csv")
}

struct Run {
    dir: TempDir,
    source: Vec<String>,
}

impl Run {
    fn pima() -> Self {
        let source = vec![
            "--input".into(),
            pima().display().to_string(),
            "--zero-missing".into(),
            "Glucose,BloodPressure,SkinThickness,Insulin,BMI".into(),
        ];
        Self {
            dir: tempfile::tempdir().unwrap(),
            source,
        }
    }

    fn synthetic(n: usize) -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
            source: vec!["--synthetic".into(), n.to_string()],
        }
    }

    fn raw(&self, args: &[&str]) -> Output {
        Command::new(BIN)
            .args(["--seed", "3", "--out-dir"])
            .arg(self.dir.path())
            .args(&self.source)
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.raw(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn code(&self, args: &[&str]) -> (i32, String) {
        let out = self.raw(args);
        (
            out.status.code().unwrap(),
            String::from_utf8_lossy(&out.stderr).into_owned(),
        )
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn read(&self, rel: &str) -> String {
        std::fs::read_to_string(self.path(rel)).unwrap()
    }
}

#[test]
fn prepare_writes_splits_and_sidecar() {
    let run = Run::pima();
    let out = run.ok(&["prepare"]);
    assert!(
        out.contains("576 training and 192 test rows with 8 features"),
        "{out}"
    );
    let train = run.read("prepared/train.csv");
    assert!(train.starts_with("Pregnancies,Glucose,BloodPressure,SkinThickness,Insulin,BMI,DiabetesPedigreeFunction,Age,Outcome\n"));
    assert_eq!(train.lines().count(), 577);
    let record: serde_json::Value =
        serde_json::from_str(&run.read("prepared/prepare.json")).unwrap();
    assert_eq!(record["seed"], 3);
    assert_eq!(record["schema_version"], 1);
    assert_eq!(
        record["preprocessor"]["imputer"]["means"]
            .as_array()
            .unwrap()
            .len(),
        8
    );
}

#[test]
fn reruns_are_byte_identical() {
    let runs = [Run::pima(), Run::pima()];
    for run in &runs {
        run.ok(&["prepare"]);
        run.ok(&["train", "svm"]);
        run.ok(&["cv", "knn", "--sweep", "knn_k=5..8"]);
    }
    for rel in [
        "prepared/train.csv",
        "prepared/test.csv",
        "prepared/prepare.json",
        "models/svm.json",
        "models/svm_importance.csv",
        "cv/knn.csv",
        "cv/knn_curve_knn_k.csv",
        "reports/classifiers.csv",
    ] {
        assert_eq!(runs[0].read(rel), runs[1].read(rel), "{rel}");
    }
}

#[test]
fn vitals_input_gives_seventeen_features() {
    let run = Run::synthetic(150);
    run.ok(&["prepare"]);
    // Feed the generated raw files back in as explicit inputs.
    let from_files = Run {
        dir: tempfile::tempdir().unwrap(),
        source: vec![
            "--vitals".into(),
            run.path("raw/vitals.csv").display().to_string(),
            "--demographics".into(),
            run.path("raw/demographics.csv").display().to_string(),
        ],
    };
    let out = from_files.ok(&["prepare"]);
    assert!(out.contains("with 17 features"), "{out}");
    assert_eq!(
        from_files.read("prepared/train.csv"),
        run.read("prepared/train.csv")
    );
    assert!(from_files
        .read("prepared/train.csv")
        .starts_with("age,gender,weight_min,weight_max,weight_mean,"));
}

#[test]
fn unknown_kind_is_a_usage_error() {
    let run = Run::pima();
    run.ok(&["prepare"]);
    let (code, err) = run.code(&["train", "xgboost"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown model kind"), "{err}");
}

#[test]
fn commands_need_their_inputs() {
    let run = Run::pima();
    assert_eq!(run.code(&["train", "knn"]).0, 2);
    let (code, err) = Run {
        dir: tempfile::tempdir().unwrap(),
        source: vec![],
    }
    .code(&["prepare"]);
    assert_eq!(code, 2, "{err}");
    let bad = Run {
        dir: tempfile::tempdir().unwrap(),
        source: vec!["--input".into(), "/no/such.csv".into()],
    };
    assert_eq!(bad.code(&["prepare"]).0, 3);
    let (code, err) = run.code(&["report"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn train_appends_a_row_per_run() {
    let run = Run::pima();
    run.ok(&["prepare"]);
    run.ok(&["train", "decision_tree"]);
    run.ok(&["train", "decision_tree", "--set", "tree_max_depth=3"]);
    let report = run.read("reports/classifiers.csv");
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(
        lines[0],
        "Model,Accuracy,Precision,Negative Prediction,Sensitivity,Specificity,F1-Score,seed"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("Decision Tree,0.") && lines[1].ends_with(",3"));
    let importance = run.read("models/decision_tree_importance.csv");
    assert_eq!(importance.lines().count(), 9);
    let (code, _) = run.code(&["train", "knn", "--set", "knn_k=0"]);
    assert_eq!(code, 2);
}

#[test]
fn knn_sweep_writes_a_full_curve() {
    let run = Run::pima();
    run.ok(&["prepare"]);
    let out = run.ok(&["cv", "knn", "--sweep", "knn_k=1..60"]);
    assert!(out.starts_with("60 configurations, 5 folds"), "{out}");
    let curve = run.read("cv/knn_curve_knn_k.csv");
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines.len(), 61);
    assert_eq!(
        lines[0],
        "knn_k,train_error,validation_error,validation_error_std,seed"
    );
    assert!(lines[1].starts_with("1,0.0000,"), "{}", lines[1]);
    assert_eq!(run.read("cv/knn.csv").lines().count(), 61);
    let best: serde_json::Value = serde_json::from_str(&run.read("cv/knn_best.json")).unwrap();
    let k = best["params"]["knn_k"].as_u64().unwrap();
    assert!((1..=60).contains(&k));
    run.ok(&["train", "knn", "--use-cv"]);
    let model: serde_json::Value = serde_json::from_str(&run.read("models/knn.json")).unwrap();
    assert_eq!(model["params"]["knn_k"].as_u64(), Some(k));
}

#[test]
fn empty_sweeps_are_usage_errors() {
    let run = Run::pima();
    run.ok(&["prepare"]);
    assert_eq!(run.code(&["cv", "knn", "--sweep", "knn_k="]).0, 2);
    assert_eq!(run.code(&["cv", "knn", "--sweep", "knn_k=9..1"]).0, 2);
    assert_eq!(run.code(&["cv", "knn", "--sweep", "bogus=1,2"]).0, 2);
    assert_eq!(run.code(&["cv", "knn", "--objective", "auc"]).0, 2);
}

#[test]
fn ensemble_selection_and_weights_file() {
    let run = Run::pima();
    run.ok(&["prepare"]);
    let all = [
        "knn",
        "svm",
        "decision_tree",
        "random_forest",
        "gradient_boosting",
        "neural_network",
        "naive_bayes",
    ];
    let (code, err) = run.code(&["ensemble", "--exclude", &all.join(",")]);
    assert_eq!(code, 2);
    assert!(err.contains("excluded"), "{err}");
    run.ok(&["train", "knn"]);
    let (code, err) = run.code(&["ensemble"]);
    assert_eq!(code, 2);
    assert!(err.contains("only 1 eligible"), "{err}");

    for kind in ["svm", "decision_tree", "naive_bayes"] {
        run.ok(&["train", kind]);
    }
    run.ok(&["ensemble"]);
    let weights = run.read("ensemble/weights.csv");
    let lines: Vec<&str> = weights.lines().collect();
    assert_eq!(
        lines[0],
        "member,weight,member_log_loss,ensemble_log_loss,seed"
    );
    assert_eq!(lines.len(), 4);
    assert!(!weights.contains("naive_bayes"));
    let first = run.read("reports/ensemble.csv");

    // Supplying the fitted weights reproduces the ensemble exactly.
    let copy = run.path("weights_copy.csv");
    std::fs::write(&copy, &weights).unwrap();
    run.ok(&["ensemble", "--weights", copy.to_str().unwrap()]);
    assert_eq!(run.read("reports/ensemble.csv"), first);
    assert_eq!(run.read("ensemble/weights.csv"), weights);

    // Unnormalized weights are accepted and used verbatim.
    let custom = run.path("custom.csv");
    std::fs::write(
        &custom,
        "member,weight\nknn,3.262\nsvm,5.431\ndecision_tree,5.453\n",
    )
    .unwrap();
    run.ok(&["ensemble", "--weights", custom.to_str().unwrap()]);
    assert!(run.read("ensemble/weights.csv").contains("knn,3.262,"));
    std::fs::write(&custom, "member,weight\nknn,0\nsvm,0\n").unwrap();
    assert_eq!(
        run.code(&["ensemble", "--weights", custom.to_str().unwrap()])
            .0,
        2
    );
}

#[test]
fn report_lists_latest_rows_in_table_order() {
    let run = Run::pima();
    run.ok(&["prepare"]);
    let kinds = [
        "naive_bayes",
        "neural_network",
        "gradient_boosting",
        "random_forest",
        "decision_tree",
        "svm",
        "knn",
    ];
    for kind in kinds {
        run.ok(&[
            "train",
            kind,
            "--set",
            "forest_n_trees=40",
            "--set",
            "mlp_epochs=40",
        ]);
    }
    run.ok(&["train", "knn", "--set", "knn_k=5"]);
    let text = run.ok(&["report"]);
    assert!(text.contains("note: no ensemble results yet"), "{text}");
    let summary = run.read("reports/summary.csv");
    assert_eq!(summary.lines().count(), 8);
    let names: Vec<&str> = summary
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "K-NN",
            "SVM",
            "Decision Tree",
            "Random Forest",
            "Gradient Boosting",
            "Neural Network",
            "Naive Bayes"
        ]
    );
    let classifiers = run.read("reports/classifiers.csv");
    let knn_rows: Vec<&str> = classifiers
        .lines()
        .filter(|l| l.starts_with("K-NN"))
        .collect();
    assert_eq!(knn_rows.len(), 2);
    assert!(summary.contains(knn_rows[1]));

    run.ok(&["ensemble"]);
    let text = run.ok(&["report"]);
    assert!(!text.contains("note:"));
    let summary = run.read("reports/summary.csv");
    assert_eq!(summary.lines().count(), 9);
    assert!(summary.lines().last().unwrap().starts_with("Ensemble,"));
    assert_eq!(run.read("reports/summary.txt"), text);
}

#[test]
fn config_file_supplies_defaults() {
    let run = Run::pima();
    let cfg = run.path("run.toml");
    std::fs::write(&cfg, "folds = 3\n[params]\ntree_max_depth = 2\n[grid]\ntree_max_depth = \"1,2,3\"\nknn_k = \"1..4\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    run.ok(&["--config", c, "prepare"]);
    run.ok(&["--config", c, "train", "decision_tree"]);
    let model: serde_json::Value =
        serde_json::from_str(&run.read("models/decision_tree.json")).unwrap();
    assert_eq!(model["params"]["tree_max_depth"], 2);
    // Only the grid entries that apply to the tuned kind are swept.
    let out = run.ok(&["--config", c, "cv", "decision_tree"]);
    assert!(out.starts_with("3 configurations, 3 folds"), "{out}");
    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(run.code(&["--config", c, "prepare"]).0, 2);
}

#[test]
fn prepared_data_must_match_the_run() {
    let run = Run::pima();
    run.ok(&["prepare"]);
    let out = Command::new(BIN)
        .args(["--seed", "4", "--out-dir"])
        .arg(run.dir.path())
        .args(["train", "knn"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed 3"));
}
