//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its number and name. Tolerances are pinned in the assertions.
//!
//! Criteria:
//! 1. metric implementations match independent brute-force oracles
//! 2. graph identities (2E/N, star assortativity, triangle clustering,
//!    bipartite part constraint)
//! 3. classifier gradient/accuracy/monotonicity/constant-predictor
//!    contracts
//! 4. top-k recall of random unit vectors sits at the 50% baseline
//! 5. bootstrap determinism and CI coverage
//! 6. end-to-end desk-scale CLI run, nine tables, byte-identical rerun
//! 7. adversarial response payloads: no crashes, replayable accounting
//! 8. cross-module consistency (graph nodes vs unique tags, tone totals)

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use synthcap::composition::composition;
use synthcap::content::{jaccard_ngrams, skin_tones, tag_overlap, topk_overlap, TagKind};
use synthcap::dataset::{bootstrap, BootstrapConfig, CaptionRecord, Dataset, Label, Source};
use synthcap::downstream::{
    evaluate, logreg_gradient, logreg_objective, train_logreg, vocab_overlap, FeatureMatrix,
    TfidfModel, TrainConfig,
};
use synthcap::embedding::{cosine_distribution, topk_recall, EmbeddingMatrix, ProviderKind};
use synthcap::genharness::{parse_response, replay_success_rate, run_generation, write_run};
use synthcap::network::{
    assortativity, avg_clustering, build_graph, CoocGraph, GraphKind, Node, NodePart,
};
use synthcap::textfeat;

fn record(id: String, text: String, label: Label) -> CaptionRecord {
    CaptionRecord { id, text, label, source: Source::Real, strategy: None, shortcode: None }
}

fn dataset(name: &str, texts: Vec<String>) -> Dataset {
    let records = texts
        .into_iter()
        .enumerate()
        .map(|(i, t)| record(format!("{name}-{i}"), t, Label::Nonsponsored))
        .collect();
    Dataset::new(name, records).unwrap()
}

/// Random corpus over a clean vocabulary (no stopwords, no punctuation),
/// so oracle tokenization is plain whitespace splitting.
fn random_corpus(rng: &mut ChaCha8Rng, name: &str) -> Dataset {
    let vocab: Vec<String> = (0..25).map(|i| format!("word{i:02}")).collect();
    let captions = rng.random_range(5..15);
    let texts = (0..captions)
        .map(|_| {
            let len = rng.random_range(1..10);
            (0..len)
                .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    dataset(name, texts)
}

fn random_tag_corpus(rng: &mut ChaCha8Rng, name: &str, sigil: char, alphabet: usize) -> Dataset {
    let captions = rng.random_range(5..20);
    let texts = (0..captions)
        .map(|_| {
            let tags = rng.random_range(1..5);
            (0..tags)
                .map(|_| format!("{sigil}t{}", rng.random_range(0..alphabet)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    dataset(name, texts)
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> CoocGraph {
    let nodes: Vec<Node> =
        (0..n).map(|i| Node { label: format!("n{i:02}"), part: NodePart::Hashtag }).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((nodes[i].clone(), nodes[j].clone(), 1));
            }
        }
    }
    CoocGraph::from_edges(GraphKind::HT, nodes, edges).unwrap()
}

fn unit_rows(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..n).map(|_| (0..dim).map(|_| normal.sample(rng)).collect()).collect()
}

fn matrix(rows: Vec<Vec<f64>>, prefix: &str) -> EmbeddingMatrix {
    let ids = (0..rows.len()).map(|i| format!("{prefix}{i:05}")).collect();
    EmbeddingMatrix::from_rows(ids, rows, ProviderKind::Offline).unwrap()
}

#[test]
fn criterion_1_metric_oracles() {
    let started = Instant::now();

    // Jaccard n-gram similarity vs naive set construction.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_corpus(&mut rng, "a");
        let b = random_corpus(&mut rng, "b");
        for n in 1..=3usize {
            let grams = |d: &Dataset| {
                let mut set = BTreeSet::new();
                for text in d.texts() {
                    let tokens: Vec<&str> = text.split_whitespace().collect();
                    if tokens.len() >= n {
                        for i in 0..=tokens.len() - n {
                            set.insert(tokens[i..i + n].join(" "));
                        }
                    }
                }
                set
            };
            let (ga, gb) = (grams(&a), grams(&b));
            let inter = ga.intersection(&gb).count() as f64;
            let union = ga.union(&gb).count() as f64;
            if union == 0.0 {
                continue;
            }
            let got = jaccard_ngrams(&a, &b, n).unwrap();
            assert!((got - inter / union).abs() < 1e-9, "jaccard seed {seed} n {n}");
        }
    }

    // Directional tag overlap vs naive unique-set scan.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let synth = random_tag_corpus(&mut rng, "s", '#', 12);
        let real = random_tag_corpus(&mut rng, "r", '#', 12);
        let unique = |d: &Dataset| -> BTreeSet<String> {
            d.texts()
                .flat_map(|t| t.split_whitespace())
                .filter_map(|w| w.strip_prefix('#'))
                .map(|w| w.to_lowercase())
                .collect()
        };
        let (us, ur) = (unique(&synth), unique(&real));
        let expected =
            100.0 * us.iter().filter(|t| ur.contains(*t)).count() as f64 / us.len() as f64;
        let got = tag_overlap(&synth, &real, TagKind::Hashtag).unwrap().pct;
        assert!((got - expected).abs() < 1e-9, "tag overlap seed {seed}");
    }

    // Top-k overlap vs naive frequency ranking.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let synth = random_tag_corpus(&mut rng, "s", '#', 15);
        let real = random_tag_corpus(&mut rng, "r", '#', 15);
        let k = rng.random_range(3..8);
        let ranked = |d: &Dataset| {
            let mut counts: std::collections::BTreeMap<String, u64> = Default::default();
            for text in d.texts() {
                for w in text.split_whitespace() {
                    if let Some(tag) = w.strip_prefix('#') {
                        *counts.entry(tag.to_lowercase()).or_insert(0) += 1;
                    }
                }
            }
            let mut v: Vec<(String, u64)> = counts.into_iter().collect();
            v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            v.into_iter().map(|(t, _)| t).collect::<Vec<_>>()
        };
        let (rs, rr) = (ranked(&synth), ranked(&real));
        let k_used = k.min(rs.len()).min(rr.len());
        let top_r: BTreeSet<&String> = rr.iter().take(k_used).collect();
        let expected = 100.0 * rs.iter().take(k_used).filter(|t| top_r.contains(t)).count() as f64
            / k_used as f64;
        let got = topk_overlap(&synth, &real, synthcap::content::EntityKind::Hashtag, k).unwrap();
        assert!((got.pct - expected).abs() < 1e-9, "topk seed {seed}");
    }

    // Pairwise cosine distribution vs double loop.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
        let dim = rng.random_range(4..16);
        let (ns, nr) = (rng.random_range(3..12), rng.random_range(3..12));
        let s = matrix(unit_rows(&mut rng, ns, dim), "s");
        let r = matrix(unit_rows(&mut rng, nr, dim), "r");
        let mut cosines = Vec::new();
        for a in &s.vectors {
            for b in &r.vectors {
                cosines.push(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>());
            }
        }
        let n = cosines.len() as f64;
        let mean = cosines.iter().sum::<f64>() / n;
        let var = cosines.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / n;
        let (got_mean, got_std) = cosine_distribution(&s, &r).unwrap();
        assert!((got_mean - mean).abs() < 1e-9, "cosine mean seed {seed}");
        assert!((got_std - var.sqrt()).abs() < 1e-9, "cosine std seed {seed}");
    }

    // Clustering coefficient vs triple enumeration.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let n = rng.random_range(8..16);
        let g = random_graph(&mut rng, n, 0.3);
        let mut triangles = vec![0usize; n];
        let adjacent = |i: usize, j: usize| {
            g.edge_list().any(|(a, b, _)| (a as usize, b as usize) == (i.min(j), i.max(j)))
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                        triangles[i] += 1;
                        triangles[j] += 1;
                        triangles[k] += 1;
                    }
                }
            }
        }
        let mut expected = 0.0;
        for i in 0..n {
            let d = g.degree(i);
            if d >= 2 {
                expected += 2.0 * triangles[i] as f64 / (d * (d - 1)) as f64;
            }
        }
        expected /= n as f64;
        assert!((avg_clustering(&g).unwrap() - expected).abs() < 1e-12, "clustering seed {seed}");
    }

    // Assortativity vs plain Pearson over the stub list.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let n = rng.random_range(8..16);
        let g = random_graph(&mut rng, n, 0.3);
        if g.n_edges() == 0 {
            continue;
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, j, _) in g.edge_list() {
            let (di, dj) = (g.degree(i as usize) as f64, g.degree(j as usize) as f64);
            xs.extend([di, dj]);
            ys.extend([dj, di]);
        }
        let m = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / m;
        let vx = xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>() / m;
        let cov = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - mx)).sum::<f64>() / m;
        let got = assortativity(&g).unwrap();
        if vx == 0.0 {
            assert_eq!(got, None, "assortativity seed {seed}");
        } else {
            assert!((got.unwrap() - cov / vx).abs() < 1e-12, "assortativity seed {seed}");
        }
    }

    // Vocabulary overlap vs naive unique-unigram sets.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + seed);
        let train = random_corpus(&mut rng, "train");
        let test = random_corpus(&mut rng, "test");
        let unique = |d: &Dataset| -> BTreeSet<String> {
            d.texts().flat_map(|t| t.split_whitespace()).map(|w| w.to_string()).collect()
        };
        let (ut, ue) = (unique(&train), unique(&test));
        let expected =
            100.0 * ue.iter().filter(|t| ut.contains(*t)).count() as f64 / ue.len() as f64;
        let got = vocab_overlap(&train, &test).unwrap();
        assert!((got - expected).abs() < 1e-9, "vocab overlap seed {seed}");
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "oracle suite took {elapsed:?}");
    println!("ACCEPTANCE 1 metric oracle suite: PASS ({elapsed:?})");
}

#[test]
fn criterion_2_graph_identities() {
    // Average-degree identity on 100 random graphs.
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..30);
        let p = rng.random_range(0.05..0.5);
        let g = random_graph(&mut rng, n, p);
        assert_eq!(g.avg_degree(), 2.0 * g.n_edges() as f64 / g.n_nodes() as f64, "seed {seed}");
    }

    // Star graphs are perfectly disassortative.
    for n in 3..=10 {
        let texts: Vec<String> = (0..n).map(|i| format!("#hub #leaf{i}")).collect();
        let g = build_graph(&dataset("star", texts), GraphKind::HT);
        assert_eq!(assortativity(&g).unwrap(), Some(-1.0), "star K(1,{n})");
    }

    // A triangle has clustering exactly 1.
    let triangle = build_graph(&dataset("tri", vec!["#a #b #c".into()]), GraphKind::HT);
    assert_eq!(avg_clustering(&triangle).unwrap(), 1.0);

    // The bipartite build never links nodes of the same part.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let texts: Vec<String> = (0..1000)
        .map(|_| {
            let hashtags = rng.random_range(0..4);
            let usertags = rng.random_range(0..3);
            let mut parts: Vec<String> =
                (0..hashtags).map(|_| format!("#h{}", rng.random_range(0..40))).collect();
            parts.extend((0..usertags).map(|_| format!("@u{}", rng.random_range(0..30))));
            if parts.is_empty() {
                parts.push("plain".into());
            }
            parts.join(" ")
        })
        .collect();
    let g = build_graph(&dataset("bip", texts), GraphKind::HU);
    assert!(g.n_edges() > 0, "fixture should induce bipartite edges");
    for (i, j, _) in g.edge_list() {
        assert_ne!(
            g.nodes()[i as usize].part,
            g.nodes()[j as usize].part,
            "within-part edge in HU graph"
        );
    }
    println!("ACCEPTANCE 2 graph identities: PASS");
}

#[test]
fn criterion_3_classifier_contracts() {
    // Analytic gradient vs central finite differences on 20 instances.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = rng.random_range(4..9);
        let cols = rng.random_range(2..6);
        let x = FeatureMatrix {
            rows: (0..rows)
                .map(|_| {
                    (0..cols as u32)
                        .filter_map(|c| {
                            rng.random_bool(0.8).then(|| (c, rng.random_range(-1.0..1.0)))
                        })
                        .collect()
                })
                .collect(),
            n_cols: cols,
        };
        let y: Vec<f64> = (0..rows).map(|i| (i % 2) as f64).collect();
        let w: Vec<f64> = (0..cols).map(|_| rng.random_range(-0.5..0.5)).collect();
        let b = rng.random_range(-0.5..0.5);
        let l2 = rng.random_range(0.0..2.0);
        let (grad_w, grad_b) = logreg_gradient(&x, &y, &w, b, l2);
        let h = 1e-5;
        for j in 0..cols {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += h;
            wm[j] -= h;
            let fd = (logreg_objective(&x, &y, &wp, b, l2) - logreg_objective(&x, &y, &wm, b, l2))
                / (2.0 * h);
            assert!((grad_w[j] - fd).abs() < 1e-6, "seed {seed} w[{j}]: {} vs {fd}", grad_w[j]);
        }
        let fd_b = (logreg_objective(&x, &y, &w, b + h, l2)
            - logreg_objective(&x, &y, &w, b - h, l2))
            / (2.0 * h);
        assert!((grad_b - fd_b).abs() < 1e-6, "seed {seed} bias");
    }

    // Separable data trains to full accuracy; loss never increases.
    let x = FeatureMatrix {
        rows: vec![
            vec![(0, -2.0)],
            vec![(0, -1.5)],
            vec![(0, -1.0)],
            vec![(0, 1.0)],
            vec![(0, 1.5)],
            vec![(0, 2.0)],
        ],
        n_cols: 1,
    };
    let y = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let model = train_logreg(&x, &y, &TrainConfig::default()).unwrap();
    for (row, &target) in x.rows.iter().zip(&y) {
        assert_eq!(model.predict(row), target == 1.0);
    }
    for pair in model.loss_trace.windows(2) {
        assert!(pair[1] <= pair[0], "loss increased {} -> {}", pair[0], pair[1]);
    }

    // Constant-sponsored predictor on a balanced T1: P = 0.5, R = 1,
    // F1 = 2/3 exactly; T2 accuracy 1.
    let t1 = Dataset::new(
        "t1",
        (0..40)
            .map(|i| {
                record(
                    format!("t1-{i}"),
                    format!("caption number {i}"),
                    if i % 2 == 0 { Label::Sponsored } else { Label::Nonsponsored },
                )
            })
            .collect(),
    )
    .unwrap();
    let t2 = Dataset::new(
        "t2",
        (0..10)
            .map(|i| record(format!("t2-{i}"), format!("undisclosed {i}"), Label::Sponsored))
            .collect(),
    )
    .unwrap();
    let tfidf = TfidfModel::fit(&t1).unwrap();
    let constant = synthcap::downstream::LogRegModel {
        weights: vec![0.0; tfidf.n_features()],
        bias: 5.0,
        l2_strength: 1.0,
        converged: true,
        iterations: 0,
        loss_trace: vec![],
    };
    let result = evaluate(&constant, &tfidf, &t1, Some(&t2)).unwrap();
    assert_eq!(result.precision, 0.5);
    assert_eq!(result.recall, 1.0);
    assert_eq!(result.f1, 2.0 / 3.0);
    assert_eq!(result.accuracy, Some(1.0));
    println!("ACCEPTANCE 3 classifier contracts: PASS");
}

#[test]
fn criterion_4_random_baseline_recall() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let synth = matrix(unit_rows(&mut rng, 1000, 256), "s");
    let real = matrix(unit_rows(&mut rng, 1000, 256), "r");
    let recall = topk_recall(&synth, &real, 100).unwrap();
    let elapsed = started.elapsed();
    assert!(
        (0.45..=0.55).contains(&recall),
        "random-baseline recall {recall} outside [0.45, 0.55]"
    );
    assert!(elapsed.as_secs_f64() < 60.0, "recall took {elapsed:?}");
    println!("ACCEPTANCE 4 random-baseline recall: PASS (recall {recall:.4}, {elapsed:?})");
}

#[test]
fn criterion_5_bootstrap_determinism_and_coverage() {
    // Byte-identical summaries for identical seeds.
    let lengths: Vec<usize> = {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        (0..100).map(|_| rng.random_range(3..60)).collect()
    };
    let texts: Vec<String> = lengths.iter().map(|&l| vec!["w"; l].join(" ")).collect();
    let fixture = dataset("fix", texts);
    let mean_len = |d: &Dataset| {
        d.texts().map(|t| t.split_whitespace().count() as f64).sum::<f64>() / d.len() as f64
    };
    let cfg = BootstrapConfig::new(100, 200, 31);
    let a = bootstrap(&fixture, &cfg, "mean_len", mean_len).unwrap();
    let b = bootstrap(&fixture, &cfg, "mean_len", mean_len).unwrap();
    assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());

    // 95% percentile CI covers the population mean in >= 90 of 100
    // independent trials.
    let population_mean = mean_len(&fixture);
    let mut covered = 0;
    for trial in 0..100u64 {
        let cfg = BootstrapConfig::new(100, 200, 1000 + trial);
        let summary = bootstrap(&fixture, &cfg, "mean_len", mean_len).unwrap();
        if summary.ci_low <= population_mean && population_mean <= summary.ci_high {
            covered += 1;
        }
    }
    assert!(covered >= 90, "CI covered the population mean in only {covered}/100 trials");
    println!("ACCEPTANCE 5 bootstrap determinism and coverage: PASS ({covered}/100 covered)");
}

/// Seeded desk-scale corpus with tags, emojis, and label-correlated but
/// overlapping vocabulary.
fn desk_fixture(rng: &mut ChaCha8Rng, name: &str, n: usize, sponsored_only: bool) -> Dataset {
    let sponsored_words =
        ["promo", "deal", "discount", "code", "shop", "brand", "launch", "partner", "sale"];
    let plain_words =
        ["sunset", "hike", "coffee", "friends", "weekend", "morning", "grateful", "cozy", "beach"];
    let shared = ["love", "this", "day", "best", "new", "little", "check", "link", "bio", "like"];
    let emojis = ["😍", "✨", "☕", "🔥", "👍🏿", "👋🏻", "💪🏽", "❤️", ""];
    let records = (0..n)
        .map(|i| {
            let sponsored = sponsored_only || i % 2 == 0;
            let pool: &[&str] = if sponsored { &sponsored_words } else { &plain_words };
            let mut words: Vec<&str> = (0..rng.random_range(2..8))
                .map(|_| pool[rng.random_range(0..pool.len())])
                .collect();
            words.extend(
                (0..rng.random_range(3..25)).map(|_| shared[rng.random_range(0..shared.len())]),
            );
            let mut text = words.join(" ");
            for _ in 0..rng.random_range(0..4) {
                text.push_str(&format!(" #tag{}", rng.random_range(0..150)));
            }
            for _ in 0..rng.random_range(0..3) {
                text.push_str(&format!(" @user{}", rng.random_range(0..80)));
            }
            let emoji = emojis[rng.random_range(0..emojis.len())];
            if !emoji.is_empty() {
                text.push(' ');
                text.push_str(emoji);
            }
            record(
                format!("{name}-{i}"),
                text,
                if sponsored { Label::Sponsored } else { Label::Nonsponsored },
            )
        })
        .collect();
    Dataset::new(name, records).unwrap()
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_synthcap")).args(args).output().expect("run synthcap binary")
}

fn assert_ok(output: &std::process::Output, what: &str) {
    assert!(
        output.status.code() == Some(0),
        "{what} failed with {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn table_ids(path: &Path) -> Vec<String> {
    let bundle: synthcap::report::ReportBundle =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    bundle.tables.iter().map(|t| t.id.clone()).collect()
}

#[test]
fn criterion_6_end_to_end_desk_scale() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    desk_fixture(&mut rng, "real", 2000, false).write_jsonl(&base.join("real.jsonl")).unwrap();
    desk_fixture(&mut rng, "t1", 2000, false).write_jsonl(&base.join("t1.jsonl")).unwrap();
    desk_fixture(&mut rng, "t2", 804, true).write_jsonl(&base.join("t2.jsonl")).unwrap();

    let config = serde_json::json!({
        "seed": 42,
        "out": base.join("out"),
        "real": base.join("real.jsonl"),
        "synthetic": {
            "base": base.join("out/generate/base/captions.jsonl"),
            "fixed_examples": base.join("out/generate/fixed_examples/captions.jsonl"),
            "random_examples": base.join("out/generate/random_examples/captions.jsonl"),
            "imitation": base.join("out/generate/imitation/captions.jsonl"),
        },
        "t1": base.join("t1.jsonl"),
        "t2": base.join("t2.jsonl"),
        "bootstrap": { "sample_size": 1000, "resamples": 100, "confidence": 0.95 },
        "embedding": { "kind": "offline", "dim": 256, "seed": 0 },
        "chat": { "kind": "mock", "seed": 9, "temperature_profile": true },
        "generation": {
            "target_count": 200,
            "n_captions_per_request": 15,
            "parallelism": 4,
            "temperature": 0.7,
            "sweep_temperatures": [0.0, 0.25, 0.5, 0.7, 1.0]
        },
        "augment": { "sample_size": 1000, "resamples": 100, "real_only_sample": 2000 },
        "train": { "l2_strength": 1.0, "tol": 1e-4, "max_iter": 1000 }
    });
    let config_path = base.join("config.json");
    std::fs::write(&config_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let cfg = config_path.to_str().unwrap();

    assert_ok(&run_cli(&["generate", "--config", cfg]), "generate");
    for strategy in ["base", "fixed_examples", "random_examples", "imitation"] {
        let captions = base.join(format!("out/generate/{strategy}/captions.jsonl"));
        let loaded = synthcap::dataset::load_jsonl(&captions).unwrap();
        assert!(loaded.len() >= 200, "{strategy}: only {} captions", loaded.len());
    }
    assert_ok(&run_cli(&["sweep", "--config", cfg]), "sweep");
    assert_ok(&run_cli(&["fidelity", "--config", cfg]), "fidelity");
    assert_ok(&run_cli(&["utility", "--config", cfg]), "utility");

    // All nine table analogues are present.
    let mut ids = Vec::new();
    ids.extend(table_ids(&base.join("out/sweep/report.json")));
    ids.extend(table_ids(&base.join("out/fidelity/report.json")));
    ids.extend(table_ids(&base.join("out/utility/report.json")));
    for expected in [
        "temperature_sweep",
        "composition",
        "content",
        "skin_tones",
        "embedding",
        "network",
        "downstream",
        "vocab_overlap",
        "augmentation",
    ] {
        assert!(ids.iter().any(|i| i == expected), "missing table {expected} in {ids:?}");
    }

    // Rerun with the same seed into a fresh directory: byte-identical
    // outputs.
    let rerun = base.join("rerun");
    let rerun_arg = rerun.to_str().unwrap();
    assert_ok(&run_cli(&["generate", "--config", cfg, "--out", rerun_arg]), "generate rerun");
    assert_ok(&run_cli(&["sweep", "--config", cfg, "--out", rerun_arg]), "sweep rerun");
    // Fidelity and utility read the synthetic datasets from the config
    // paths, which the first run produced; outputs land in the rerun dir.
    assert_ok(&run_cli(&["fidelity", "--config", cfg, "--out", rerun_arg]), "fidelity rerun");
    assert_ok(&run_cli(&["utility", "--config", cfg, "--out", rerun_arg]), "utility rerun");

    for relative in [
        "generate/base/captions.jsonl",
        "generate/imitation/captions.jsonl",
        "generate/base/sponsored/requests/0000.json",
        "sweep/report.json",
        "fidelity/report.json",
        "utility/report.json",
    ] {
        let first = std::fs::read(base.join("out").join(relative)).unwrap();
        let second = std::fs::read(rerun.join(relative)).unwrap();
        assert_eq!(first, second, "{relative} differs between reruns");
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "end-to-end run took {elapsed:?}");
    println!("ACCEPTANCE 6 end-to-end desk scale: PASS ({elapsed:?})");
}

/// Fifty adversarial payloads: truncated JSON, wrong top-level types,
/// nested schemas, wrong entry types, envelope corruptions.
fn adversarial_payloads() -> Vec<String> {
    let mut payloads: Vec<String> = vec![
        r#"{"captions":["a","#.into(),
        r#"{"captions":"#.into(),
        r#"{"captions"#.into(),
        "{".into(),
        "".into(),
        "   ".into(),
        "null".into(),
        "42".into(),
        "3.14".into(),
        "true".into(),
        r#""a bare string""#.into(),
        "[]".into(),
        r#"["a","b"]"#.into(),
        "{}".into(),
        r#"{"data":["a"]}"#.into(),
        r#"{"caption":["a"]}"#.into(),
        r#"{"captions":null}"#.into(),
        r#"{"captions":42}"#.into(),
        r#"{"captions":"not an array"}"#.into(),
        r#"{"captions":{"0":"a"}}"#.into(),
        r#"{"captions":[["nested","array"]]}"#.into(),
        r#"{"captions":[{"text":"obj"}]}"#.into(),
        r#"{"captions":[null]}"#.into(),
        r#"{"captions":[1,2,3]}"#.into(),
        r#"{"captions":[true,false]}"#.into(),
        r#"{"captions":["",""]}"#.into(),
        r#"{"captions":["ok",5,null,"fine"]}"#.into(),
        r#"{"captions":["dup","dup"]}"#.into(),
        r#"{"CAPTIONS":["wrong case"]}"#.into(),
        r#"{"choices":[]}"#.into(),
        r#"{"choices":[{}]}"#.into(),
        r#"{"choices":[{"message":{}}]}"#.into(),
        r#"{"choices":[{"message":{"content":"no tool call"}}]}"#.into(),
        r#"{"choices":[{"message":{"tool_calls":[]}}]}"#.into(),
        r#"{"choices":[{"message":{"tool_calls":[{"function":{}}]}}]}"#.into(),
        r#"{"choices":[{"message":{"tool_calls":[{"function":{"arguments":42}}]}}]}"#.into(),
        r#"{"choices":[{"message":{"tool_calls":[{"function":{"arguments":"{broken"}}]}}]}"#.into(),
        r#"{"choices":[{"message":{"tool_calls":[{"function":{"arguments":"[1,2]"}}]}}]}"#.into(),
        r#"{"choices":[{"message":{"tool_calls":[{"function":{"arguments":"{\"captions\":5}"}}]}}]}"#.into(),
        "\u{FEFF}{\"captions\":[\"bom\"]}".into(),
    ];
    // Deeply nested object.
    let mut nested = String::from("\"leaf\"");
    for _ in 0..40 {
        nested = format!("{{\"captions\":{nested}}}");
    }
    payloads.push(nested);
    // Long truncated array.
    payloads.push(format!("{{\"captions\":[{}", "\"x\",".repeat(500)));
    // Huge numbers and escapes.
    payloads.push(r#"{"captions":[1e309]}"#.into());
    payloads.push(r#"{"captions":["\ud800"]}"#.into());
    payloads.push("{\"captions\":[\"tab\tand\nnewline\"]}".into());
    // Valid payloads mixed in keep the accounting honest.
    payloads.push(r#"{"captions":["one good caption here"]}"#.into());
    payloads.push(r#"{"captions":["another","and another"]}"#.into());
    payloads.push(r#"{"captions":["with emoji 😍 and #tag"]}"#.into());
    payloads.push(r#"{"extra":"field","captions":["tolerated sibling"]}"#.into());
    payloads.push(r#"{"choices":[{"message":{"tool_calls":[{"function":{"arguments":"{\"captions\":[\"enveloped\"]}"}}]}}]}"#.into());
    payloads
}

#[test]
fn criterion_7_parse_robustness() {
    let payloads = adversarial_payloads();
    assert_eq!(payloads.len(), 50, "corpus must hold exactly 50 payloads");

    // No panics, and per-payload accounting is internally consistent.
    let mut expected_accepted = 0usize;
    for (i, payload) in payloads.iter().enumerate() {
        let outcome = parse_response(payload);
        if outcome.failure.is_some() {
            assert!(outcome.accepted.is_empty(), "payload {i}: failure with acceptances");
        }
        expected_accepted += outcome.accepted.len();
    }

    // Replaying a persisted run recomputes the exact success rate.
    struct Replay(Vec<String>);
    impl synthcap::genharness::ChatClient for Replay {
        fn complete(
            &self,
            request: &synthcap::genharness::ChatRequest,
        ) -> Result<String, synthcap::genharness::GenError> {
            Ok(self.0[request.index % self.0.len()].clone())
        }
    }
    let strategy = synthcap::genharness::PromptStrategy::new(
        synthcap::dataset::Strategy::Base,
        Label::Sponsored,
    );
    let cfg = synthcap::genharness::GenerationConfig {
        target_count: 10_000,
        seed: 3,
        request_budget: Some(50),
        parallelism: 4,
    };
    let run = run_generation(&strategy, 0.7, &cfg, &Replay(payloads)).unwrap();
    assert_eq!(run.requests.len(), 50);
    assert_eq!(run.accepted_captions, expected_accepted);
    let expected_rate = 100.0 * expected_accepted as f64 / (50.0 * 15.0);
    assert_eq!(run.success_rate, expected_rate);

    let dir = tempfile::tempdir().unwrap();
    write_run(&run, dir.path()).unwrap();
    let replayed = replay_success_rate(dir.path()).unwrap();
    assert_eq!(replayed, run.success_rate, "replayed success rate drifted");
    println!("ACCEPTANCE 7 parse robustness: PASS ({expected_accepted} captions from 50 payloads)");
}

#[test]
fn criterion_8_cross_module_consistency() {
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fixture = desk_fixture(&mut rng, "fix", 60, false);

        let graph = build_graph(&fixture, GraphKind::HT);
        let comp = composition(&fixture).unwrap();
        assert_eq!(graph.n_nodes() as u64, comp.hashtags_unique, "seed {seed}: HT nodes");

        let toned: usize = fixture
            .texts()
            .map(|t| textfeat::parse(t).emojis.iter().filter(|e| e.tone.is_some()).count())
            .sum();
        assert_eq!(skin_tones(&fixture).total(), toned as f64, "seed {seed}: tone totals");
    }
    println!("ACCEPTANCE 8 cross-module consistency: PASS");
}
