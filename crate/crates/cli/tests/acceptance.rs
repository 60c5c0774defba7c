//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use kgddi_core::gradcheck::{check_kge_gradient, check_rc_gradient, random_kge_case, random_rc_case};
use kgddi_core::kge::{self, init_params};
use kgddi_core::rc::{self, InstanceSet, KgFeatures, KgeLookup, RcDims};
use kgddi_core::synth::{fusion_task, planted_transe_graph, separable_instances};
use kgddi_core::{
    export_embeddings, import_embeddings, rank_triples, IndexedTriple, KgeConfig, KgeModel, KgeParams,
    Norm, RankMode, RcInstance, RcLabel, RcMode, RcParams, RcTrainConfig,
};
use ndarray::{Array2, Array3, Axis};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn kge_gradients() -> Outcome {
    const CONFIGS: u64 = 20;
    let start = Instant::now();
    let mut worst = (0.0f64, String::new());
    let mut checked = 0;
    for model in KgeModel::ALL {
        let norms: &[Norm] = if model.is_translational() { &[Norm::L1, Norm::L2] } else { &[Norm::L2] };
        for &norm in norms {
            for seed in 0..CONFIGS {
                let case = random_kge_case(model, norm, 8, seed);
                let r = check_kge_gradient(&case.params, &case.positives, &case.negatives, case.margin, 1e-5)
                    .expect("well-formed case");
                checked += r.checked;
                if r.max_rel_error > worst.0 {
                    worst = (r.max_rel_error, format!("{model}/{norm:?} seed {seed}: {}", r.worst));
                }
            }
        }
    }
    for seed in 0..CONFIGS {
        let case = random_rc_case(8, 4, seed);
        for (mode, lookup) in [(RcMode::Text, None), (RcMode::Fused, Some(&case.lookup as &dyn KgeLookup))] {
            let r = check_rc_gradient(&case.batch, &case.params, mode, lookup, 1e-5).expect("well-formed case");
            checked += r.checked;
            if r.max_rel_error > worst.0 {
                worst = (r.max_rel_error, format!("head/{mode} seed {seed}: {}", r.worst));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst.0 < 1e-4 && elapsed < Duration::from_secs(10),
        format!("{checked} partials, max rel. error {:.2e} ({}), {}", worst.0, worst.1, secs(elapsed)),
    )
}

fn reduction_identities() -> Outcome {
    use rand::{Rng, SeedableRng};
    let (n_ent, n_rel, dim) = (40, 3, 10);
    let graph = kgddi_core::synth::drug_graph(n_ent, n_rel);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000);
    let triples: Vec<IndexedTriple> = (0..1000)
        .map(|_| IndexedTriple::new(rng.gen_range(0..n_ent), rng.gen_range(0..n_rel), rng.gen_range(0..n_ent)))
        .collect();
    let mut worst: f64 = 0.0;
    for norm in [Norm::L1, Norm::L2] {
        let transe = init_params(&KgeConfig { dim, norm, ..KgeConfig::new(KgeModel::TransE) }, &graph, 1);
        let mut eye = Array3::zeros((n_rel, dim, dim));
        for r in 0..n_rel {
            eye.index_axis_mut(Axis(0), r).assign(&Array2::eye(dim));
        }
        let transr = KgeParams { model: KgeModel::TransR, matrices: Some(eye), ..transe.clone() };
        for &t in &triples {
            worst = worst.max((transe.score_indexed(t).unwrap() - transr.score_indexed(t).unwrap()).abs());
        }
    }
    let distmult = init_params(&KgeConfig { dim, ..KgeConfig::new(KgeModel::DistMult) }, &graph, 2);
    let mut diag = Array3::zeros((n_rel, dim, dim));
    for r in 0..n_rel {
        diag.index_axis_mut(Axis(0), r).assign(&Array2::from_diag(&distmult.relations.row(r)));
    }
    let rescal = KgeParams {
        model: KgeModel::Rescal,
        relations: Array2::zeros((n_rel, 0)),
        matrices: Some(diag),
        ..distmult.clone()
    };
    for &t in &triples {
        worst = worst.max((distmult.score_indexed(t).unwrap() - rescal.score_indexed(t).unwrap()).abs());
    }
    outcome(worst <= 1e-10, format!("1000 triples, max |difference| {worst:.2e}"))
}

fn planted_recovery() -> Outcome {
    let start = Instant::now();
    let graph = planted_transe_graph(20, 2, 16, 0);
    let config = KgeConfig {
        dim: 16,
        epochs: 300,
        learning_rate: 0.03,
        seed: 0,
        ..KgeConfig::new(KgeModel::TransE)
    };
    let trained = kge::train(&graph, &config).expect("trains");
    let report = rank_triples(&trained.params, &graph, &graph, RankMode::Filtered).expect("ranks");
    let hits = report.hits(10);
    let elapsed = start.elapsed();
    outcome(
        hits >= 0.9 && elapsed < Duration::from_secs(60),
        format!("{} triples, filtered Hits@10 {hits:.4}, MRR {:.4}, {}", graph.len(), report.mrr, secs(elapsed)),
    )
}

fn fusion_trend() -> Outcome {
    let start = Instant::now();
    let mut gaps = Vec::new();
    for seed in 0..5 {
        let task = fusion_task(8, 4, 16, 0.3, seed);
        let kge_config = KgeConfig {
            dim: 16,
            learning_rate: 0.01,
            epochs: 100,
            batch_size: 32,
            seed,
            ..KgeConfig::new(KgeModel::TransE)
        };
        let trained = kge::train(&task.graph, &kge_config).expect("trains");
        let lookup = KgFeatures::from_embeddings(kge::drug_embeddings(&trained.params, &task.graph)).expect("drugs");
        let mut f1 = [0.0; 2];
        for (i, (mode, l)) in [(RcMode::Text, None), (RcMode::Fused, Some(&lookup as &dyn KgeLookup))]
            .into_iter()
            .enumerate()
        {
            let config = RcTrainConfig { epochs: 50, learning_rate: 0.05, batch_size: 16, seed, mode, fused_dim: None };
            let head = rc::train_rc(&task.train, &config, l).expect("trains");
            f1[i] = rc::evaluate(&task.test, &head.params, mode, l).expect("evaluates").macro_f1;
        }
        gaps.push((f1[0], f1[1]));
    }
    let mean_gap = gaps.iter().map(|(t, f)| f - t).sum::<f64>() / gaps.len() as f64;
    let elapsed = start.elapsed();
    let runs: Vec<String> = gaps.iter().map(|(t, f)| format!("{t:.3}->{f:.3}")).collect();
    outcome(
        mean_gap >= 0.2 && elapsed < Duration::from_secs(120),
        format!("mean macro-F1 gain {mean_gap:.3} (text->fused: {}), {}", runs.join(" "), secs(elapsed)),
    )
}

fn head_overfit() -> Outcome {
    let (instances, embeddings) = separable_instances(50, 16, 8, 0);
    let lookup = KgFeatures::from_embeddings(embeddings).expect("drugs");
    let mut parts = Vec::new();
    let mut pass = true;
    for (mode, l) in [(RcMode::Text, None), (RcMode::Fused, Some(&lookup as &dyn KgeLookup))] {
        let config = RcTrainConfig { epochs: 300, learning_rate: 0.01, batch_size: 10, seed: 0, mode, fused_dim: None };
        let head = rc::train_rc(&instances, &config, l).expect("trains");
        let acc = rc::evaluate(&instances, &head.params, mode, l).expect("evaluates").accuracy;
        pass &= acc == 1.0;
        parts.push(format!("{mode} training accuracy {acc:.3}"));
    }
    outcome(pass, format!("50 instances, 300 epochs: {}", parts.join(", ")))
}

fn metrics_oracle() -> Outcome {
    use RcLabel::{Advice, Effect};
    // The head reads the sequence-start row through identity weights, so each
    // instance is predicted as the class whose one-hot sits in that row.
    let gold = [Advice, Advice, Effect, Effect];
    let predicted = [Advice, Effect, Effect, Effect];
    let n = RcLabel::COUNT;
    let instances: Vec<RcInstance> = (0..4)
        .map(|i| {
            let mut hidden = Array2::zeros((3, n));
            hidden[[0, predicted[i].index()]] = 3.0;
            RcInstance {
                id: format!("oracle{i}"),
                hidden,
                span1: (1, 1),
                span2: (2, 2),
                drug1: None,
                drug2: None,
                mention1: "a".into(),
                mention2: "b".into(),
                label: Some(gold[i]),
            }
        })
        .collect();
    let mut params = RcParams::zeros(RcDims::new(n, 0));
    params.w0.assign(&Array2::eye(n));
    params.w3_text.slice_mut(ndarray::s![.., ..n]).assign(&Array2::eye(n));
    let report = rc::evaluate(&instances, &params, RcMode::Text, None).expect("evaluates");
    let ok = (report.class(Advice).f1 - 2.0 / 3.0).abs() <= 1e-9
        && (report.class(Effect).f1 - 0.8).abs() <= 1e-9
        && (report.macro_f1 - (2.0 / 3.0 + 0.8) / 2.0).abs() <= 1e-9
        && (report.macro_f1 - 0.7333).abs() <= 1e-4;
    outcome(
        ok,
        format!(
            "Advice F1 {:.6}, Effect F1 {:.6}, macro {:.10}",
            report.class(Advice).f1,
            report.class(Effect).f1,
            report.macro_f1
        ),
    )
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Runs the whole fixture pipeline into `dir` and returns every stdout.
fn pipeline(dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    let f = |n: &str| fixture(n).display().to_string();
    let p = |n: &str| dir.join(n).display().to_string();
    let lookup = format!("--embeddings {} --names {} --wordvecs {}", p("embeddings.tsv"), f("names.tsv"), f("wordvecs.txt"));
    let graph = format!("--triples {} --types {}", f("kg_train.tsv"), f("kg_types.tsv"));
    let (train, test) = (f("train_instances.jsonl"), f("test_instances.jsonl"));
    // Fixture paths contain no spaces, so each step is a whitespace-split line.
    let steps = [
        format!("kg-stats --triples {} --types {}", f("kg_all.tsv"), f("kg_types.tsv")),
        format!("kge-train --model transe {graph} --dim 16 --lr 0.01 --epochs 30 --seed 5 --out {} --loss-log {}",
                p("kge.json"), p("kge_loss.tsv")),
        format!("kge-train --model transr {graph} --dim 8 --relation-dim 6 --lr 0.01 --epochs 5 --norm l1 --seed 5 --out {}",
                p("transr.json")),
        format!("kge-train --model rescal {graph} --dim 8 --lr 0.01 --epochs 5 --seed 5 --out {}", p("rescal.json")),
        format!("kge-train --model distmult {graph} --dim 8 --lr 0.01 --epochs 5 --seed 5 --out {}", p("distmult.json")),
        format!("kge-eval --params {} --test {} --all {} --filtered --report {}", p("kge.json"), f("kg_test.tsv"),
                f("kg_all.tsv"), p("lp.txt")),
        format!("kge-export --params {} --out {}", p("kge.json"), p("embeddings.tsv")),
        format!("rc-train --mode text --instances {train} --epochs 10 --seed 5 --out {}", p("rc_text.json")),
        format!("rc-train --mode fused --instances {train} {lookup} --epochs 10 --seed 5 --out {}", p("rc_fused.json")),
        format!("rc-eval --params {} --instances {test} {lookup} --report {}", p("rc_fused.json"), p("metrics.txt")),
        format!("rc-predict --params {} --instances {test} {lookup} --out {}", p("rc_fused.json"), p("predictions.tsv")),
        format!("rc-predict --params {} --instances {test}", p("rc_text.json")),
    ];
    let mut stdouts = Vec::new();
    for step in steps {
        let out = Command::new(env!("CARGO_BIN_EXE_kgddi"))
            .args(step.split_whitespace())
            .env("RUST_LOG", "warn")
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("`{step}` failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        stdouts.push(out.stdout);
    }
    Ok(stdouts)
}

fn cli_determinism() -> Outcome {
    let dirs = [tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir")];
    let mut runs = Vec::new();
    for d in &dirs {
        match pipeline(d.path()) {
            Ok(stdouts) => runs.push(stdouts),
            Err(e) => return outcome(false, e),
        }
    }
    let mut names: Vec<String> = fs::read_dir(dirs[0].path())
        .expect("readable")
        .map(|e| e.expect("entry").file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| fs::read(dirs[0].path().join(n)).ok() != fs::read(dirs[1].path().join(n)).ok())
        .collect();
    let stdout_same = runs[0] == runs[1];
    outcome(
        differing.is_empty() && stdout_same && names.len() == 11,
        format!(
            "{} output files and {} stdout streams compared, differing files {differing:?}, stdout identical {stdout_same}",
            names.len(),
            runs[0].len()
        ),
    )
}

fn format_round_trips() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    if let Err(e) = pipeline(dir.path()) {
        return outcome(false, e);
    }
    let mut notes = Vec::new();
    let mut pass = true;

    let original = fs::read(dir.path().join("embeddings.tsv")).expect("exported");
    let read = import_embeddings(original.as_slice(), "embeddings.tsv").expect("parses");
    let mut rewritten = Vec::new();
    export_embeddings(&read, &mut rewritten).expect("writes");
    let reread = import_embeddings(rewritten.as_slice(), "rewritten").expect("parses");
    let mut again = Vec::new();
    export_embeddings(&reread, &mut again).expect("writes");
    let stable = rewritten == again && original == rewritten;
    pass &= stable;
    notes.push(format!("embeddings.tsv {} rows stable {stable}", read.len()));

    let (instances, embeddings) = separable_instances(6, 4, 3, 9);
    let mut synthetic = Vec::new();
    export_embeddings(&embeddings, &mut synthetic).expect("writes");
    let mut synthetic_again = Vec::new();
    export_embeddings(&import_embeddings(synthetic.as_slice(), "synthetic").expect("parses"), &mut synthetic_again)
        .expect("writes");
    pass &= synthetic == synthetic_again;

    for name in ["train_instances.jsonl", "test_instances.jsonl"] {
        let original = fs::read(fixture(name)).expect("fixture");
        let set = rc::read_instances(original.as_slice(), name, rc::DEFAULT_MAX_SEQ_LEN).expect("parses");
        let mut rewritten = Vec::new();
        rc::write_instances(&set, &mut rewritten).expect("writes");
        let set2 = rc::read_instances(rewritten.as_slice(), name, rc::DEFAULT_MAX_SEQ_LEN).expect("parses");
        let mut again = Vec::new();
        rc::write_instances(&set2, &mut again).expect("writes");
        let stable = original == rewritten && rewritten == again && set == set2;
        pass &= stable;
        notes.push(format!("{name} {} instances stable {stable}", set.instances.len()));
    }
    let set = InstanceSet { dim: 4, classes: RcLabel::ALL.to_vec(), instances };
    let mut a = Vec::new();
    rc::write_instances(&set, &mut a).expect("writes");
    let back = rc::read_instances(a.as_slice(), "synthetic", rc::DEFAULT_MAX_SEQ_LEN).expect("parses");
    let mut b = Vec::new();
    rc::write_instances(&back, &mut b).expect("writes");
    pass &= a == b && back == set;
    outcome(pass, notes.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("KGE gradient suite", kge_gradients),
        ("model-reduction identities", reduction_identities),
        ("planted-structure recovery", planted_recovery),
        ("fusion-informativeness trend", fusion_trend),
        ("head overfit", head_overfit),
        ("metrics oracle", metrics_oracle),
        ("CLI determinism", cli_determinism),
        ("format round-trips", format_round_trips),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
