//! Regenerates the synthetic fixtures used by the CLI tests:
//!
//! ```text
//! cargo run -p kgddi-core --example make_fixtures -- crates/cli/tests/fixtures
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use kgddi_core::rc::{write_instances, InstanceSet};
use kgddi_core::synth::fusion_task;
use kgddi_core::{EntityKind, KnowledgeGraph, RcLabel};

const KG_DIM: usize = 16;

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_graph(dir: &Path, name: &str, graph: &KnowledgeGraph) -> anyhow::Result<()> {
    let mut w = create(dir, name)?;
    graph.write_triples(&mut w)?;
    w.flush()?;
    Ok(())
}

fn surface(i: usize) -> String {
    format!("Compound {}", char::from(b'A' + (i % 26) as u8)) + &"x".repeat(i / 26)
}

fn main() -> anyhow::Result<()> {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "crates/cli/tests/fixtures".into()).into();
    fs::create_dir_all(&dir)?;

    fs::write(
        dir.join("tiny_types.tsv"),
        "DB00001\tDrug\nDB00002\tDrug\nP00001\tTarget\nD00001\tDisease\n",
    )?;
    fs::write(
        dir.join("tiny_triples.tsv"),
        "DB00001\tdrug-target\tP00001\nDB00002\tdrug-target\tP00001\nDB00001\tdrug-disease\tD00001\n",
    )?;

    let task = fusion_task(4, 3, 8, 0.25, 11);
    let vocab = task.graph.vocab().clone();
    let mut w = create(&dir, "kg_types.tsv")?;
    vocab.write_types(&mut w)?;
    w.flush()?;
    write_graph(&dir, "kg_all.tsv", &task.graph)?;
    let split = task.graph.split((0.9, 0.0, 0.1), 11)?;
    write_graph(&dir, "kg_train.tsv", &split.train)?;
    write_graph(&dir, "kg_test.tsv", &split.test)?;

    let drugs = vocab.entities_of_kind(EntityKind::Drug);
    let mut names = create(&dir, "names.tsv")?;
    for (k, &i) in drugs.iter().enumerate() {
        writeln!(names, "{}\t{}", surface(k), vocab.entity(i))?;
    }
    names.flush()?;

    // a few word vectors; every other token falls back to a hashed vector
    let mut wv = create(&dir, "wordvecs.txt")?;
    let tokens = ["unknown", "agent", "inhibitor"];
    writeln!(wv, "{} {KG_DIM}", tokens.len())?;
    for (t, token) in tokens.iter().enumerate() {
        let v: Vec<String> = (0..KG_DIM).map(|j| format!("{}", ((t * KG_DIM + j) % 7) as f64 / 70.0 - 0.05)).collect();
        writeln!(wv, "{token} {}", v.join(" "))?;
    }
    wv.flush()?;

    // test instances exercise the linker: some drugs are given by surface
    // name only, one by an unlinkable mention
    let mut test = task.test.clone();
    for (n, inst) in test.iter_mut().enumerate() {
        if n % 3 == 1 {
            let id = inst.drug2.take().expect("synthetic instances carry ids");
            let k = drugs.iter().position(|&i| vocab.entity(i) == &id).expect("drug in vocabulary");
            inst.mention2 = surface(k).to_uppercase();
        }
    }
    if let Some(inst) = test.last_mut() {
        inst.drug1 = None;
        inst.mention1 = "unknown inhibitor".into();
    }

    for (name, instances) in [("train_instances.jsonl", task.train.clone()), ("test_instances.jsonl", test)] {
        let mut w = create(&dir, name)?;
        write_instances(
            &InstanceSet {
                dim: 8,
                classes: RcLabel::ALL.to_vec(),
                instances,
            },
            &mut w,
        )?;
    }
    println!("fixtures written to {}", dir.display());
    Ok(())
}
