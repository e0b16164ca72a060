//! The `sweep` command: generates base-prompt captions at each configured
//! temperature (both labels) and tabulates uniqueness, success rate, and
//! tag overlap against the real dataset per temperature.

use synthcap::content::{tag_overlap, unique_caption_pct, TagKind};
use synthcap::dataset::Strategy;
use synthcap::report::{fmt2, MetricTable, MetricValue, ReportBundle};

use super::generate::{chat_client, generate_strategy};
use super::{runtime, usage, write_bundle, CliError, CmdStatus};
use crate::config::RunConfig;

pub fn run(config: &RunConfig) -> Result<CmdStatus, CliError> {
    let seed = config.seed().map_err(usage)?;
    let out_root = config.out_dir().map_err(usage)?.join("sweep");
    let real = config.load_real().map_err(usage)?;
    if real.is_empty() {
        return Err(usage("real dataset is empty"));
    }
    let client = chat_client(config, seed)?;
    let temps = &config.generation.sweep_temperatures;
    for &t in temps {
        if !(0.0..=1.0).contains(&t) {
            return Err(usage(format!("sweep temperature {t} outside [0, 1]")));
        }
    }

    let mut bundle = ReportBundle::default();
    let columns: Vec<String> = temps.iter().map(|t| fmt2(*t)).collect();
    let mut table = MetricTable::new("temperature_sweep", "Temperature sweep", columns);
    let mut unique_row = Vec::new();
    let mut success_row = Vec::new();
    let mut hashtag_row = Vec::new();
    let mut usertag_row = Vec::new();
    let mut any_failed = false;

    for &temperature in temps {
        let dir = out_root.join(format!("temp-{temperature}"));
        std::fs::create_dir_all(&dir)
            .map_err(|e| runtime(format!("creating {}: {e}", dir.display())))?;
        match generate_strategy(config, Strategy::Base, temperature, &dir, &client) {
            Ok((merged, runs)) => {
                let requested: usize = runs.iter().map(|r| r.requested_captions).sum();
                let accepted: usize = runs.iter().map(|r| r.accepted_captions).sum();
                let success =
                    if requested == 0 { 0.0 } else { 100.0 * accepted as f64 / requested as f64 };
                let unique = if merged.is_empty() {
                    0.0
                } else {
                    unique_caption_pct(&merged).map_err(|e| runtime(e.to_string()))?
                };
                let (hashtag, usertag) = if merged.is_empty() {
                    (None, None)
                } else {
                    (
                        Some(
                            tag_overlap(&merged, &real, TagKind::Hashtag)
                                .map_err(|e| runtime(e.to_string()))?
                                .pct,
                        ),
                        Some(
                            tag_overlap(&merged, &real, TagKind::Usertag)
                                .map_err(|e| runtime(e.to_string()))?
                                .pct,
                        ),
                    )
                };
                unique_row.push(fmt2(unique));
                success_row.push(fmt2(success));
                hashtag_row.push(hashtag.map(fmt2).unwrap_or_else(|| "n/a".into()));
                usertag_row.push(usertag.map(fmt2).unwrap_or_else(|| "n/a".into()));

                let label = format!("temp {temperature}");
                bundle.record(&label, "sweep.unique_pct", MetricValue::Scalar { value: unique });
                bundle.record(&label, "sweep.success_rate", MetricValue::Scalar { value: success });
                if let Some(h) = hashtag {
                    bundle.record(
                        &label,
                        "sweep.hashtag_overlap_pct",
                        MetricValue::Scalar { value: h },
                    );
                }
                if let Some(u) = usertag {
                    bundle.record(
                        &label,
                        "sweep.usertag_overlap_pct",
                        MetricValue::Scalar { value: u },
                    );
                }
            }
            Err(e) => {
                any_failed = true;
                bundle.warn(format!("temperature {temperature} failed: {e}"));
                for row in [&mut unique_row, &mut success_row, &mut hashtag_row, &mut usertag_row] {
                    row.push("n/a".into());
                }
            }
        }
    }

    table.push_row("Unique Captions (%)", unique_row);
    table.push_row("Success Rate (%)", success_row);
    table.push_row("Hashtag Overlap (%)", hashtag_row);
    table.push_row("User Tag Overlap (%)", usertag_row);
    bundle.tables.push(table);
    write_bundle(&bundle, &out_root)?;
    println!("sweep report written to {}", out_root.display());
    Ok(if any_failed { CmdStatus::Partial } else { CmdStatus::Success })
}
