//! The `utility` command: sponsored-content classification experiments.
//!
//! Per training dataset: single-dataset evaluation on T1/T2, vocabulary
//! overlap against the disclosed and undisclosed test lexicons, and the
//! merge (augmentation) arms with a real-only size control.

use synthcap::dataset::{Dataset, Label};
use synthcap::downstream::{
    augment_experiment, train_and_evaluate, vocab_overlap, AugmentConfig, AugmentSummary,
};
use synthcap::report::{fmt2, MetricTable, MetricValue, ReportBundle};

use super::{usage, write_bundle, CliError, CmdStatus};
use crate::config::{derive_seed, RunConfig};

pub fn run(config: &RunConfig) -> Result<CmdStatus, CliError> {
    let seed = config.seed().map_err(usage)?;
    let out_dir = config.out_dir().map_err(usage)?.join("utility");
    let real = config.load_real().map_err(usage)?;
    let synthetic = config.load_synthetic().map_err(usage)?;
    let t1_path = config.t1.as_deref().ok_or_else(|| usage("config `t1` is required"))?;
    let t1 =
        synthcap::dataset::load_jsonl(t1_path).map_err(|e| usage(format!("loading t1: {e}")))?;
    let t2 = match config.t2.as_deref() {
        Some(path) => Some(
            synthcap::dataset::load_jsonl(path).map_err(|e| usage(format!("loading t2: {e}")))?,
        ),
        None => None,
    };

    let mut bundle = ReportBundle::default();
    if t2.is_none() {
        bundle.warn("no undisclosed test set configured: accuracy columns omitted".to_string());
    }
    if let Some(t2) = &t2 {
        if let Some(bad) = t2.records.iter().find(|r| r.label != Label::Sponsored) {
            return Err(usage(format!(
                "t2 must contain only sponsored records, found {:?}",
                bad.id
            )));
        }
    }

    // Training datasets: every synthetic one, then the real corpus.
    let mut training: Vec<(String, &Dataset)> =
        synthetic.iter().map(|(n, d)| (n.clone(), d)).collect();
    training.push(("Real".into(), &real));

    single_dataset_table(&mut bundle, &training, &t1, t2.as_ref(), config)?;
    vocab_overlap_table(&mut bundle, &training, &t1, t2.as_ref())?;
    augmentation_table(&mut bundle, config, seed, &synthetic, &real, &t1, t2.as_ref())?;

    write_bundle(&bundle, &out_dir)?;
    println!("utility report written to {}", out_dir.display());
    for warning in &bundle.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(if t2.is_some() { CmdStatus::Success } else { CmdStatus::Partial })
}

fn eval_columns(t2_present: bool) -> Vec<String> {
    let mut columns = vec!["P".to_string(), "R".to_string(), "F1".to_string()];
    if t2_present {
        columns.push("Acc".to_string());
    }
    columns
}

fn single_dataset_table(
    bundle: &mut ReportBundle,
    training: &[(String, &Dataset)],
    t1: &Dataset,
    t2: Option<&Dataset>,
    config: &RunConfig,
) -> Result<(), CliError> {
    let mut table =
        MetricTable::new("downstream", "Classification performance", eval_columns(t2.is_some()));
    for (name, data) in training {
        let result = train_and_evaluate(data, t1, t2, &config.train)
            .map_err(|e| usage(format!("training on {name:?}: {e}")))?;
        let mut cells = vec![fmt2(result.precision), fmt2(result.recall), fmt2(result.f1)];
        bundle.record(
            name,
            "downstream.precision",
            MetricValue::Scalar { value: result.precision },
        );
        bundle.record(name, "downstream.recall", MetricValue::Scalar { value: result.recall });
        bundle.record(name, "downstream.f1", MetricValue::Scalar { value: result.f1 });
        if let Some(acc) = result.accuracy {
            cells.push(fmt2(acc));
            bundle.record(name, "downstream.t2_accuracy", MetricValue::Scalar { value: acc });
        }
        table.push_row(name.clone(), cells);
    }
    bundle.tables.push(table);
    Ok(())
}

fn vocab_overlap_table(
    bundle: &mut ReportBundle,
    training: &[(String, &Dataset)],
    t1: &Dataset,
    t2: Option<&Dataset>,
) -> Result<(), CliError> {
    let disclosed_records: Vec<_> =
        t1.records.iter().filter(|r| r.label == Label::Sponsored).cloned().collect();
    let disclosed = Dataset::new("t1:sponsored", disclosed_records)
        .map_err(|e| usage(format!("t1 sponsored subset: {e}")))?;

    let mut columns = vec!["Disclosed".to_string()];
    if t2.is_some() {
        columns.push("Undisclosed".to_string());
    }
    let mut table = MetricTable::new("vocab_overlap", "Test-set vocabulary overlap (%)", columns);
    for (name, data) in training {
        let mut cells = Vec::new();
        let disclosed_pct = vocab_overlap(data, &disclosed)
            .map_err(|e| usage(format!("vocabulary overlap for {name:?}: {e}")))?;
        cells.push(fmt2(disclosed_pct));
        bundle.record(
            name,
            "vocab_overlap.disclosed_pct",
            MetricValue::Scalar { value: disclosed_pct },
        );
        if let Some(t2) = t2 {
            let undisclosed_pct = vocab_overlap(data, t2)
                .map_err(|e| usage(format!("vocabulary overlap for {name:?}: {e}")))?;
            cells.push(fmt2(undisclosed_pct));
            bundle.record(
                name,
                "vocab_overlap.undisclosed_pct",
                MetricValue::Scalar { value: undisclosed_pct },
            );
        }
        table.push_row(name.clone(), cells);
    }
    bundle.tables.push(table);
    Ok(())
}

fn augmentation_table(
    bundle: &mut ReportBundle,
    config: &RunConfig,
    seed: u64,
    synthetic: &[(String, Dataset)],
    real: &Dataset,
    t1: &Dataset,
    t2: Option<&Dataset>,
) -> Result<(), CliError> {
    let mut table = MetricTable::new(
        "augmentation",
        "Augmentation (merged training data)",
        eval_columns(t2.is_some()),
    );
    let base_cfg = AugmentConfig {
        sample_size: config.augment.sample_size,
        resamples: config.augment.resamples,
        confidence: config.bootstrap.confidence,
        seed: 0,
        train: config.train,
    };

    let mut record_arm = |bundle: &mut ReportBundle, label: String, summary: &AugmentSummary| {
        let mut cells =
            vec![fmt2(summary.precision.mean), fmt2(summary.recall.mean), fmt2(summary.f1.mean)];
        for (name, s) in
            [("precision", &summary.precision), ("recall", &summary.recall), ("f1", &summary.f1)]
        {
            bundle.record(
                &label,
                &format!("augment.{name}"),
                MetricValue::Interval { mean: s.mean, ci_low: s.ci_low, ci_high: s.ci_high },
            );
        }
        if let Some(acc) = &summary.accuracy {
            cells.push(fmt2(acc.mean));
            bundle.record(
                &label,
                "augment.t2_accuracy",
                MetricValue::Interval { mean: acc.mean, ci_low: acc.ci_low, ci_high: acc.ci_high },
            );
        }
        table.push_row(label, cells);
    };

    for (name, data) in synthetic {
        let cfg = AugmentConfig { seed: derive_seed(seed, &format!("augment:{name}")), ..base_cfg };
        let summary = augment_experiment(Some(data), real, t1, t2, &cfg)
            .map_err(|e| usage(format!("augmentation arm {name:?}: {e}")))?;
        record_arm(bundle, format!("Real ({}) + {name}", config.augment.sample_size), &summary);
    }

    let control_cfg = AugmentConfig {
        sample_size: config.augment.real_only_sample,
        seed: derive_seed(seed, "augment:real-only"),
        ..base_cfg
    };
    let control = augment_experiment(None, real, t1, t2, &control_cfg)
        .map_err(|e| usage(format!("real-only control arm: {e}")))?;
    record_arm(bundle, format!("Only Real ({})", config.augment.real_only_sample), &control);

    bundle.tables.push(table);
    Ok(())
}
