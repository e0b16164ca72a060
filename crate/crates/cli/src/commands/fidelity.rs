//! The `fidelity` command: composition, content, skin-tone, embedding, and
//! network comparisons of each synthetic dataset against the real corpus.
//!
//! Real-side composition, skin-tone, and network rows are averaged over
//! bootstrap resamples; content and embedding comparisons run against a
//! fixed deterministic sample of the real corpus.

use std::collections::BTreeMap;
use synthcap::composition::{composition, CompositionAverage};
use synthcap::content::{
    self, entity_diff, jaccard_ngrams, skin_tones, tag_overlap, topk_overlap, unique_caption_pct,
    EntityKind, SkinToneDistribution, TagKind,
};
use synthcap::dataset::{bootstrap_map, fixed_sample, BootstrapConfig, Dataset};
use synthcap::embedding::{cosine_distribution, topk_recall_opts, EmbeddingProvider};
use synthcap::network::{GraphKind, NetworkReport};
use synthcap::report::{fmt2, MetricTable, MetricValue, ReportBundle};
use synthcap::textfeat::SkinTone;

use super::{runtime, usage, write_bundle, CliError, CmdStatus};
use crate::config::{derive_seed, RunConfig};

pub fn run(config: &RunConfig) -> Result<CmdStatus, CliError> {
    let seed = config.seed().map_err(usage)?;
    let out_dir = config.out_dir().map_err(usage)?.join("fidelity");
    let real = config.load_real().map_err(usage)?;
    let synthetic = config.load_synthetic().map_err(usage)?;
    if real.is_empty() {
        return Err(usage("real dataset is empty"));
    }

    let mut bundle = ReportBundle::default();
    let boot = BootstrapConfig {
        sample_size: config.bootstrap.sample_size.min(10 * real.len()),
        resamples: config.bootstrap.resamples,
        confidence: config.bootstrap.confidence,
        seed: derive_seed(seed, "fidelity-bootstrap"),
    };
    // Fixed real sample for one-shot comparisons.
    let sample_n = config.bootstrap.sample_size.min(real.len());
    let real_sample = fixed_sample(&real, sample_n, derive_seed(seed, "fidelity-fixed-sample"))
        .map_err(|e| runtime(format!("sampling real dataset: {e}")))?;

    let names: Vec<String> = synthetic.iter().map(|(n, _)| n.clone()).collect();

    composition_table(&mut bundle, &synthetic, &real, &boot)?;
    content_tables(&mut bundle, config, &synthetic, &real_sample, &out_dir)?;
    skin_tone_table(&mut bundle, &synthetic, &real, &boot);
    let embeddings_ran =
        embedding_table(&mut bundle, config, seed, &synthetic, &real_sample, &names)?;
    network_table(&mut bundle, &synthetic, &real, &boot);

    write_bundle(&bundle, &out_dir)?;
    println!("fidelity report written to {}", out_dir.display());
    for warning in &bundle.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(if embeddings_ran { CmdStatus::Success } else { CmdStatus::Partial })
}

fn composition_table(
    bundle: &mut ReportBundle,
    synthetic: &[(String, Dataset)],
    real: &Dataset,
    boot: &BootstrapConfig,
) -> Result<(), CliError> {
    let columns =
        vec!["Caption Length".into(), "Hashtags".into(), "User Tags".into(), "Emojis".into()];
    let mut table = MetricTable::new("composition", "Caption composition", columns);

    let mut push = |bundle: &mut ReportBundle, label: &str, avg: &CompositionAverage| {
        let cells = vec![
            MetricValue::MeanStd { mean: avg.length_mean, std: avg.length_std }.cell(),
            MetricValue::Counted {
                mean: avg.hashtags_mean,
                std: avg.hashtags_std,
                unique: avg.hashtags_unique,
            }
            .cell(),
            MetricValue::Counted {
                mean: avg.usertags_mean,
                std: avg.usertags_std,
                unique: avg.usertags_unique,
            }
            .cell(),
            MetricValue::Counted {
                mean: avg.emojis_mean,
                std: avg.emojis_std,
                unique: avg.emojis_unique,
            }
            .cell(),
        ];
        table.push_row(label, cells);
        bundle.record(
            label,
            "composition.length",
            MetricValue::MeanStd { mean: avg.length_mean, std: avg.length_std },
        );
        bundle.record(
            label,
            "composition.max_length",
            MetricValue::Scalar { value: avg.max_length },
        );
        for (name, mean, std, unique) in [
            ("hashtags", avg.hashtags_mean, avg.hashtags_std, avg.hashtags_unique),
            ("usertags", avg.usertags_mean, avg.usertags_std, avg.usertags_unique),
            ("emojis", avg.emojis_mean, avg.emojis_std, avg.emojis_unique),
        ] {
            bundle.record(
                label,
                &format!("composition.{name}"),
                MetricValue::Counted { mean, std, unique },
            );
        }
    };

    for (name, data) in synthetic {
        let report =
            composition(data).map_err(|e| usage(format!("composition of {name:?}: {e}")))?;
        push(bundle, name, &CompositionAverage::of_single(&report));
    }
    let resampled =
        bootstrap_map(real, boot, |sample| composition(sample).expect("resample is non-empty"));
    push(bundle, "Real", &CompositionAverage::of(&resampled));

    bundle.tables.push(table);
    Ok(())
}

fn content_tables(
    bundle: &mut ReportBundle,
    config: &RunConfig,
    synthetic: &[(String, Dataset)],
    real_sample: &Dataset,
    out_dir: &std::path::Path,
) -> Result<(), CliError> {
    let names: Vec<String> = synthetic.iter().map(|(n, _)| n.clone()).collect();
    let mut overlap = MetricTable::new("content", "Content overlap", names.clone());
    let mut topk =
        MetricTable::new("topk", format!("Top-{} entity overlap (%)", config.topk), names);

    let mut rows: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let diff_dir = out_dir.join("diffs");
    std::fs::create_dir_all(&diff_dir)
        .map_err(|e| runtime(format!("creating {}: {e}", diff_dir.display())))?;

    for (name, data) in synthetic {
        let hashtag = tag_overlap(data, real_sample, TagKind::Hashtag)
            .map_err(|e| runtime(format!("{name}: {e}")))?;
        let usertag = tag_overlap(data, real_sample, TagKind::Usertag)
            .map_err(|e| runtime(format!("{name}: {e}")))?;
        if hashtag.synth_empty {
            bundle.warn(format!("{name}: no hashtags in synthetic data, overlap reported as 0"));
        }
        if usertag.synth_empty {
            bundle.warn(format!("{name}: no user tags in synthetic data, overlap reported as 0"));
        }
        rows.entry("Hashtag Overlap (%)").or_default().push(fmt2(hashtag.pct));
        rows.entry("User Tag Overlap (%)").or_default().push(fmt2(usertag.pct));
        bundle.record(
            name,
            "content.hashtag_overlap_pct",
            MetricValue::Scalar { value: hashtag.pct },
        );
        bundle.record(
            name,
            "content.usertag_overlap_pct",
            MetricValue::Scalar { value: usertag.pct },
        );

        for n in 1..=3usize {
            let sim = match jaccard_ngrams(data, real_sample, n) {
                Ok(j) => j * 100.0,
                Err(content::ContentError::EmptyGramSets { .. }) => {
                    bundle.warn(format!("{name}: {n}-gram sets empty on both sides"));
                    0.0
                }
                Err(e) => return Err(runtime(format!("{name}: {e}"))),
            };
            rows.entry(match n {
                1 => "1-gram Sim. (%)",
                2 => "2-gram Sim. (%)",
                _ => "3-gram Sim. (%)",
            })
            .or_default()
            .push(fmt2(sim));
            bundle.record(
                name,
                &format!("content.jaccard_{n}gram"),
                MetricValue::Scalar { value: sim / 100.0 },
            );
        }

        let unique = unique_caption_pct(data).map_err(|e| runtime(format!("{name}: {e}")))?;
        bundle.record(name, "content.unique_caption_pct", MetricValue::Scalar { value: unique });

        for kind in [
            EntityKind::Hashtag,
            EntityKind::Usertag,
            EntityKind::Ngram1,
            EntityKind::Ngram2,
            EntityKind::Ngram3,
        ] {
            let o = topk_overlap(data, real_sample, kind, config.topk)
                .map_err(|e| runtime(format!("{name}: {e}")))?;
            if o.clamped {
                bundle.warn(format!(
                    "{name}: top-k overlap for {} clamped to k = {}",
                    kind.as_str(),
                    o.k
                ));
            }
            rows.entry(topk_row_label(kind)).or_default().push(fmt2(o.pct));
            bundle.record(
                name,
                &format!("content.top{}_{}_overlap_pct", o.k, kind.as_str()),
                MetricValue::Scalar { value: o.pct },
            );
        }

        for kind in
            [EntityKind::Hashtag, EntityKind::Usertag, EntityKind::Ngram3, EntityKind::Emoji]
        {
            let diff = entity_diff(data, real_sample, kind, config.entity_diff_top)
                .map_err(|e| runtime(format!("{name}: {e}")))?;
            let path = diff_dir.join(format!("{}-{}.md", name, kind.as_str()));
            std::fs::write(&path, diff.to_markdown())
                .map_err(|e| runtime(format!("writing {}: {e}", path.display())))?;
            let json_path = diff_dir.join(format!("{}-{}.json", name, kind.as_str()));
            std::fs::write(&json_path, serde_json::to_string_pretty(&diff).expect("diff json"))
                .map_err(|e| runtime(format!("writing {}: {e}", json_path.display())))?;
        }
    }

    for label in [
        "Hashtag Overlap (%)",
        "User Tag Overlap (%)",
        "1-gram Sim. (%)",
        "2-gram Sim. (%)",
        "3-gram Sim. (%)",
    ] {
        overlap.push_row(label, rows.remove(label).unwrap_or_default());
    }
    for kind in [
        EntityKind::Hashtag,
        EntityKind::Usertag,
        EntityKind::Ngram1,
        EntityKind::Ngram2,
        EntityKind::Ngram3,
    ] {
        topk.push_row(topk_row_label(kind), rows.remove(topk_row_label(kind)).unwrap_or_default());
    }
    bundle.tables.push(overlap);
    bundle.tables.push(topk);
    Ok(())
}

fn topk_row_label(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Hashtag => "Hashtags",
        EntityKind::Usertag => "User Tags",
        EntityKind::Ngram1 => "1-grams",
        EntityKind::Ngram2 => "2-grams",
        EntityKind::Ngram3 => "3-grams",
        EntityKind::Emoji => "Emojis",
    }
}

fn skin_tone_table(
    bundle: &mut ReportBundle,
    synthetic: &[(String, Dataset)],
    real: &Dataset,
    boot: &BootstrapConfig,
) {
    let columns: Vec<String> = SkinTone::ALL.iter().map(|t| t.display_name().to_string()).collect();
    let mut table = MetricTable::new("skin_tones", "Emoji skin tone distribution", columns);
    let mut push = |bundle: &mut ReportBundle, label: &str, dist: &SkinToneDistribution| {
        table.push_row(label, SkinTone::ALL.iter().map(|&t| fmt2(dist.get(t))).collect());
        for tone in SkinTone::ALL {
            bundle.record(
                label,
                &format!("skin_tone.{}", tone.display_name().to_lowercase()),
                MetricValue::Scalar { value: dist.get(tone) },
            );
        }
    };
    for (name, data) in synthetic {
        push(bundle, name, &skin_tones(data));
    }
    let resampled = bootstrap_map(real, boot, skin_tones);
    push(bundle, "Real", &SkinToneDistribution::average(&resampled));
    bundle.tables.push(table);
}

/// Returns false when embedding metrics were skipped.
fn embedding_table(
    bundle: &mut ReportBundle,
    config: &RunConfig,
    seed: u64,
    synthetic: &[(String, Dataset)],
    real_sample: &Dataset,
    names: &[String],
) -> Result<bool, CliError> {
    let Some(provider) = config.embedding.clone() else {
        bundle.warn("embedding metrics skipped: no provider configured".to_string());
        return Ok(false);
    };
    let provider = match provider {
        EmbeddingProvider::Offline(mut p) => {
            p.seed = derive_seed(seed, "embedding");
            EmbeddingProvider::Offline(p)
        }
        remote => remote,
    };

    let real_matrix = match provider.embed(real_sample) {
        Ok(m) => m,
        Err(e) => {
            bundle.warn(format!("embedding metrics skipped: {e}"));
            return Ok(false);
        }
    };

    let mut table = MetricTable::new(
        "embedding",
        "Embedding similarity",
        vec!["Similarity".into(), format!("Top-{} Recall", config.topk)],
    );
    for ((name, data), _) in synthetic.iter().zip(names) {
        let matrix = match provider.embed(data) {
            Ok(m) => m,
            Err(e) => {
                bundle.warn(format!("{name}: embedding failed: {e}"));
                table.push_row(name.clone(), vec!["n/a".into(), "n/a".into()]);
                continue;
            }
        };
        let (mean, std) = cosine_distribution(&matrix, &real_matrix)
            .map_err(|e| runtime(format!("{name}: {e}")))?;
        let pool = if config.recall_pool_includes_real {
            matrix.len() + real_matrix.len() - 1
        } else {
            matrix.len()
        };
        let k = config.topk.min(pool);
        if k < config.topk {
            bundle.warn(format!("{name}: recall k clamped to candidate pool size {k}"));
        }
        let recall = topk_recall_opts(&matrix, &real_matrix, k, config.recall_pool_includes_real)
            .map_err(|e| runtime(format!("{name}: {e}")))?;
        table.push_row(name.clone(), vec![MetricValue::MeanStd { mean, std }.cell(), fmt2(recall)]);
        bundle.record(name, "embedding.cosine", MetricValue::MeanStd { mean, std });
        bundle.record(
            name,
            &format!("embedding.top{k}_recall"),
            MetricValue::Scalar { value: recall },
        );
    }
    bundle.tables.push(table);
    Ok(true)
}

fn network_table(
    bundle: &mut ReportBundle,
    synthetic: &[(String, Dataset)],
    real: &Dataset,
    boot: &BootstrapConfig,
) {
    let mut columns: Vec<String> = synthetic.iter().map(|(n, _)| n.clone()).collect();
    columns.push("Real".into());
    let mut table = MetricTable::new("network", "Network metrics", columns);

    for kind in GraphKind::ALL {
        let mut reports: Vec<(String, NetworkReport)> = synthetic
            .iter()
            .map(|(name, data)| (name.clone(), synthcap::network::network_report(data, kind)))
            .collect();
        let resampled =
            bootstrap_map(real, boot, |sample| synthcap::network::network_report(sample, kind));
        reports.push(("Real".into(), NetworkReport::average(&resampled)));

        type Field = fn(&NetworkReport) -> Option<f64>;
        let fields: [(&str, Field); 5] = [
            ("# Nodes", |r| Some(r.n_nodes)),
            ("# Edges", |r| Some(r.n_edges)),
            ("Avg. Clustering Coeff.", |r| r.avg_clustering),
            ("Avg. Degree", |r| Some(r.avg_degree)),
            ("Assortativity", |r| r.assortativity),
        ];
        for (label, value) in fields {
            if label == "Avg. Clustering Coeff." && kind == GraphKind::HU {
                continue;
            }
            let cells: Vec<String> = reports
                .iter()
                .map(|(_, r)| value(r).map(fmt2).unwrap_or_else(|| "n/a".into()))
                .collect();
            table.push_row(format!("{} {}", kind.as_str(), label), cells);
        }
        for (name, r) in &reports {
            bundle.record(
                name,
                &format!("network.{}.n_nodes", kind.as_str()),
                MetricValue::Scalar { value: r.n_nodes },
            );
            bundle.record(
                name,
                &format!("network.{}.n_edges", kind.as_str()),
                MetricValue::Scalar { value: r.n_edges },
            );
            bundle.record(
                name,
                &format!("network.{}.avg_degree", kind.as_str()),
                MetricValue::Scalar { value: r.avg_degree },
            );
            bundle.record(
                name,
                &format!("network.{}.avg_clustering", kind.as_str()),
                r.avg_clustering
                    .map(|value| MetricValue::Scalar { value })
                    .unwrap_or(MetricValue::Missing),
            );
            bundle.record(
                name,
                &format!("network.{}.assortativity", kind.as_str()),
                r.assortativity
                    .map(|value| MetricValue::Scalar { value })
                    .unwrap_or(MetricValue::Missing),
            );
        }
    }
    bundle.tables.push(table);
}
