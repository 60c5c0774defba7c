use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use kgddi_core::kge::{self, KgeModelFile};
use kgddi_core::rc::{self, InstanceSet, KgFeatures, KgeLookup, RcModelFile};
use kgddi_core::{
    export_embeddings, import_embeddings, rank_triples, DrugEmbedding, EntityKind, Error, FallbackTable, KgeConfig,
    KnowledgeGraph, Lexicon, RankMode, RcMode, RcTrainConfig, Vocabulary,
};

use crate::args::{
    KgStatsArgs, KgeEvalArgs, KgeExportArgs, KgeTrainArgs, LookupArgs, RcEvalArgs, RcPredictArgs, RcTrainArgs,
};

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

fn load_graph(triples: &Path, types: &Path) -> Result<KnowledgeGraph> {
    let graph = KnowledgeGraph::load_named(open(triples)?, &name(triples), open(types)?, &name(types))?;
    Ok(graph)
}

fn load_triples(path: &Path, vocab: &Arc<Vocabulary>) -> Result<KnowledgeGraph> {
    Ok(KnowledgeGraph::load_with_vocab(open(path)?, &name(path), vocab.clone())?)
}

fn read_model(path: &Path) -> Result<KgeModelFile> {
    KgeModelFile::read(open(path)?).with_context(|| format!("cannot read model file {}", path.display()))
}

fn read_head(path: &Path) -> Result<RcModelFile> {
    RcModelFile::read(open(path)?).with_context(|| format!("cannot read head file {}", path.display()))
}

pub fn kg_stats(args: &KgStatsArgs) -> Result<()> {
    let graph = load_graph(&args.triples, &args.types)?;
    let stats = graph.stats();
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            writeln!(w, "{stats}")?;
            w.flush()?;
        }
        None => println!("{stats}"),
    }
    Ok(())
}

pub fn kge_train(args: &KgeTrainArgs) -> Result<()> {
    let graph = load_graph(&args.triples, &args.types)?;
    let config = KgeConfig {
        model: args.model.into(),
        dim: args.dim,
        relation_dim: args.relation_dim,
        learning_rate: args.lr,
        epochs: args.epochs,
        margin: args.margin,
        negatives_per_positive: args.negatives,
        norm: args.norm.into(),
        seed: args.seed,
        batch_size: args.batch_size,
    };
    config.validate()?;
    log::info!(
        "training {} on {} triples over {} entities",
        config.model,
        graph.len(),
        graph.vocab().num_entities()
    );
    let trained = kge::train(&graph, &config)?;
    if let Some(last) = trained.epoch_losses.last() {
        log::info!("final epoch mean loss {last}");
    }
    let mut w = create(&args.out)?;
    KgeModelFile::new(config, &graph, trained.params).write(&mut w)?;
    w.flush()?;
    if let Some(path) = &args.loss_log {
        let mut w = create(path)?;
        kge::write_training_log(&trained.epoch_losses, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn kge_eval(args: &KgeEvalArgs) -> Result<()> {
    let model = read_model(&args.params)?;
    let vocab = model.vocabulary()?;
    let test = load_triples(&args.test, &vocab)?;
    let all = match &args.all {
        Some(path) => load_triples(path, &vocab)?,
        None if args.filtered => bail!(Error::Argument("--filtered requires --all".into())),
        None => test.clone(),
    };
    let mode = if args.filtered { RankMode::Filtered } else { RankMode::Raw };
    let report = rank_triples(&model.params, &test, &all, mode)?;
    println!("{report}");
    if let Some(path) = &args.report {
        let mut w = create(path)?;
        report.write_key_values(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn kge_export(args: &KgeExportArgs) -> Result<()> {
    let model = read_model(&args.params)?;
    let vocab = model.vocabulary()?;
    let embeddings = match &args.types {
        None => kge::drug_embeddings(&model.params, &KnowledgeGraph::empty(vocab)),
        Some(path) => {
            let listed = Vocabulary::parse_types(open(path)?, &name(path))?;
            let mut out = Vec::new();
            for &i in listed.entities_of_kind(EntityKind::Drug) {
                let id = listed.entity(i);
                let Some(j) = vocab.entity_index(id.as_str()) else {
                    bail!(Error::Lookup(format!("drug {id} from {} is not in the model", path.display())));
                };
                if vocab.entity_kind(j) != EntityKind::Drug {
                    bail!(Error::Validation(format!("{id} is a {} in the model", vocab.entity_kind(j))));
                }
                out.push(DrugEmbedding {
                    entity: id.clone(),
                    vector: model.params.entities.row(j).to_vec(),
                });
            }
            out
        }
    };
    let mut w = create(&args.out)?;
    let n = export_embeddings(&embeddings, &mut w)?;
    log::info!("wrote {n} drug vectors to {}", args.out.display());
    Ok(())
}

fn build_lookup(args: &LookupArgs) -> Result<Option<KgFeatures>> {
    let Some(path) = &args.embeddings else {
        if args.names.is_some() || args.wordvecs.is_some() {
            bail!(Error::Argument("--names and --wordvecs require --embeddings".into()));
        }
        return Ok(None);
    };
    let mut features = KgFeatures::from_embeddings(import_embeddings(open(path)?, &name(path))?)?;
    if let Some(path) = &args.names {
        features = features.with_lexicon(Lexicon::build(open(path)?, &name(path))?);
    }
    if let Some(path) = &args.wordvecs {
        features = features.with_fallback(FallbackTable::read_word2vec(open(path)?, &name(path))?)?;
    }
    log::info!("loaded {} drug vectors of width {}", features.len(), features.dim());
    Ok(Some(features))
}

fn read_set(path: &Path, max_seq_len: usize) -> Result<InstanceSet> {
    let set = rc::read_instances(open(path)?, &name(path), max_seq_len)?;
    log::info!("read {} instances of width {} from {}", set.instances.len(), set.dim, path.display());
    Ok(set)
}

/// The lookup a head in `mode` should see, checked against its KG width.
fn lookup_for<'a>(mode: RcMode, lookup: &'a Option<KgFeatures>, kg_dim: Option<usize>) -> Result<Option<&'a dyn KgeLookup>> {
    match (mode, lookup) {
        (RcMode::Text, _) => Ok(None),
        (RcMode::Fused, None) => bail!(Error::Precondition("fused mode requires --embeddings".into())),
        (RcMode::Fused, Some(l)) => {
            if let Some(d) = kg_dim {
                if l.dim() != d {
                    bail!(Error::Shape(format!("head expects KG vectors of width {d}, embeddings have {}", l.dim())));
                }
            }
            Ok(Some(l as &dyn KgeLookup))
        }
    }
}

pub fn rc_train(args: &RcTrainArgs) -> Result<()> {
    let set = read_set(&args.instances, args.lookup.max_seq_len)?;
    let lookup = build_lookup(&args.lookup)?;
    let mode: RcMode = args.mode.into();
    if mode == RcMode::Text && lookup.is_some() {
        log::warn!("text mode ignores the KG vector sources");
    }
    let config = RcTrainConfig {
        epochs: args.epochs,
        learning_rate: args.lr,
        batch_size: args.batch_size,
        seed: args.seed,
        mode,
        fused_dim: args.fused_dim,
    };
    let trained = rc::train_rc(&set.instances, &config, lookup_for(mode, &lookup, None)?)?;
    if let Some(last) = trained.epoch_losses.last() {
        log::info!("final epoch mean loss {last}");
    }
    let mut w = create(&args.out)?;
    RcModelFile {
        mode,
        config,
        params: trained.params,
    }
    .write(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn rc_eval(args: &RcEvalArgs) -> Result<()> {
    let head = read_head(&args.params)?;
    let set = read_set(&args.instances, args.lookup.max_seq_len)?;
    let lookup = build_lookup(&args.lookup)?;
    let l = lookup_for(head.mode, &lookup, Some(head.params.dims.kg))?;
    let report = rc::evaluate(&set.instances, &head.params, head.mode, l)?;
    println!("{report}");
    if let Some(path) = &args.report {
        let mut w = create(path)?;
        report.write_key_values(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn rc_predict(args: &RcPredictArgs) -> Result<()> {
    let head = read_head(&args.params)?;
    let set = read_set(&args.instances, args.lookup.max_seq_len)?;
    let lookup = build_lookup(&args.lookup)?;
    let l = lookup_for(head.mode, &lookup, Some(head.params.dims.kg))?;
    let n = match &args.out {
        Some(path) => rc::write_predictions(&set.instances, &head.params, head.mode, l, create(path)?)?,
        None => rc::write_predictions(&set.instances, &head.params, head.mode, l, io::stdout().lock())?,
    };
    log::info!("predicted {n} instances");
    Ok(())
}
