mod common;

use qel::data::{fit_pca, load_mnist, split};
use qel::ensemble::{build_ensemble, BuildConfig, EnsembleModel, Strategy, StrategyConfig};
use qel::experiment::{ExperimentConfig, SeedRecord, Workbench};
use qel::qcnn::QcnnArchitecture;
use qel::trainer::{evaluate, train, TrainConfig};

fn quick_train() -> TrainConfig {
    TrainConfig {
        max_steps: 40,
        batch_size: 16,
        ..TrainConfig::default()
    }
}

#[test]
fn loader_keeps_only_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    let (images, labels) = common::write_digits(dir.path(), "d", 90, 1);
    let d = load_mnist(&images, &labels, (0, 1)).unwrap();
    assert_eq!(d.len(), 60);
    assert_eq!(d.class_counts(), (30, 30));
    assert_eq!(d.feature_dim(), 36);
    assert!(d
        .samples()
        .iter()
        .all(|s| s.features.iter().all(|&p| (0.0..=1.0).contains(&p))));
    let swapped = load_mnist(&images, &labels, (1, 7)).unwrap();
    assert_eq!(swapped.len(), 60);
}

#[test]
fn end_to_end_on_an_easy_pair() {
    let dir = tempfile::tempdir().unwrap();
    let (images, labels) = common::write_digits(dir.path(), "d", 450, 2);
    let data = load_mnist(&images, &labels, (0, 1)).unwrap();
    let (tr, te) = split(&data, 0.25, 3).unwrap();
    let pca = fit_pca(&tr, 16).unwrap();
    let arch = QcnnArchitecture::standard(4).unwrap();
    let qcnn = arch.compile().unwrap();

    let single = train(&qcnn, &tr, &pca, &quick_train()).unwrap();
    let eval = evaluate(&qcnn, &single, &te, &pca).unwrap();
    assert_eq!(eval.confusion.total() as usize, te.len());
    assert!(
        eval.accuracy > 0.9,
        "single learner accuracy {}",
        eval.accuracy
    );

    let cfg = BuildConfig {
        n_learners: 5,
        bootstrap_fraction: 0.3,
        master_seed: 4,
        train: quick_train(),
        strategy: StrategyConfig {
            similarity_sample_size: 100,
            ..StrategyConfig::default()
        },
    };
    let ens = build_ensemble(&tr, &pca, &arch, &cfg).unwrap();
    let truth: Vec<u8> = te.labels().collect();
    for s in Strategy::ALL {
        let pred = ens.predict(&te, s).unwrap();
        let acc =
            pred.iter().zip(&truth).filter(|(p, y)| p == y).count() as f64 / truth.len() as f64;
        assert!(acc > 0.9, "{s}: {acc}");
    }

    let path = dir.path().join("ens.json");
    ens.save(&path).unwrap();
    let back = EnsembleModel::load(&path).unwrap();
    assert_eq!(
        back.predict(&te, Strategy::ConfusionMatrix).unwrap(),
        ens.predict(&te, Strategy::ConfusionMatrix).unwrap()
    );
}

#[test]
fn size_one_sweep_rows_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (images, labels) = common::write_digits(dir.path(), "d", 240, 5);
    let data = load_mnist(&images, &labels, (0, 1)).unwrap();
    let (tr, te) = split(&data, 0.25, 6).unwrap();
    let mut cfg = ExperimentConfig::default();
    for (k, v) in [
        ("learners", "3"),
        ("ladder", "1,3"),
        ("steps", "10"),
        ("similarity-sample-size", "40"),
    ] {
        cfg.set(k, v).unwrap();
    }
    let wb = Workbench::from_datasets(&cfg, &tr, &te, SeedRecord::default()).unwrap();
    let ens = wb.train_ensemble().unwrap();
    let sweep = wb.size_sweep(&ens).unwrap();
    let at1: Vec<f64> = Strategy::ALL
        .iter()
        .map(|&s| sweep.accuracy(s, 1).unwrap())
        .collect();
    assert!(at1.iter().all(|&a| a == at1[0]), "{at1:?}");
    assert!(sweep.rows.iter().all(|r| (0.0..=1.0).contains(&r.accuracy)));

    // The default trial size of 1000 exceeds this 40-sample test pool.
    let single = wb.train_single().unwrap();
    assert!(wb.repeated_eval(&single, &ens).is_err());
}

#[test]
fn repeated_eval_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let (images, labels) = common::write_digits(dir.path(), "d", 300, 7);
    let data = load_mnist(&images, &labels, (0, 1)).unwrap();
    let (tr, te) = split(&data, 0.3, 8).unwrap();
    let mut cfg = ExperimentConfig::default();
    for (k, v) in [
        ("learners", "3"),
        ("ladder", "3"),
        ("steps", "10"),
        ("similarity-sample-size", "40"),
        ("trials", "5"),
        ("trial-size", "20"),
    ] {
        cfg.set(k, v).unwrap();
    }
    let wb = Workbench::from_datasets(&cfg, &tr, &te, SeedRecord::default()).unwrap();
    let single = wb.train_single().unwrap();
    let ens = wb.train_ensemble().unwrap();
    let rep = wb.repeated_eval(&single, &ens).unwrap();
    assert_eq!(rep.methods.len(), 4);
    for m in &rep.methods {
        assert_eq!(m.trial_accuracies.len(), 5);
        let mean = m.trial_accuracies.iter().sum::<f64>() / 5.0;
        let var = m
            .trial_accuracies
            .iter()
            .map(|a| (a - mean).powi(2))
            .sum::<f64>()
            / 5.0;
        assert!((m.mean - mean).abs() < 1e-12 && (m.variance - var).abs() < 1e-12);
        assert!(m.variance >= 0.0 && (0.0..=1.0).contains(&m.mean));
    }
}
