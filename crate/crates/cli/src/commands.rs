use std::path::Path;

use nea_core::config::PipelineConfig;
use nea_core::corpus::{ingest, load_corpus, save_corpus, split, IngestOptions};
use nea_core::eval::{
    author_tfidf, classification_report, coauthor_mrr, coauthor_sets, coherence_report, eligible_authors,
    rank_by_distance, FeatureSpec, HarnessSettings, RankingResult,
};
use nea_core::nea::{
    doc_embeddings_from_assignments, load_embeddings, load_table, save_doc_embeddings, save_embeddings,
    save_table, sg_doc_features, softmax_rows, train_nea_general, train_nea_lda, train_skipgram,
    write_text_vectors, LossLog, NamedMatrices,
};
use nea_core::topic_models::{
    as_factorized, load_model, save_model, train_atm, train_lda, train_mmsgtm, TopicModel,
};
use nea_core::{Corpus, Error, Matrix, Result};
use serde_json::json;

use crate::args::*;
use crate::settings::{apply_nea, apply_sampler, persist, sibling};

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    write(path, text + "\n")
}

fn corpus(path: &Path) -> Result<Corpus> {
    Ok(load_corpus(path)?.1)
}

fn model(path: &Path) -> Result<TopicModel> {
    Ok(load_model(path)?.1)
}

pub fn ingest_cmd(cfg: &mut PipelineConfig, a: &IngestArgs) -> Result<()> {
    if let Some(n) = a.min_count {
        cfg.tokenizer.min_count = n;
    }
    if a.keep_case {
        cfg.tokenizer.lowercase = false;
    }
    if let Some(p) = &a.stopwords {
        let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        cfg.tokenizer.stopwords = text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
    }
    let options = IngestOptions {
        tokenizer: cfg.tokenizer.clone(),
        authors: a.authors.clone(),
        labels: a.labels.clone(),
    };
    let c = ingest(&a.input, &options)?;
    save_corpus(&c, &a.output, &cfg.hash())?;
    persist(cfg, &a.output)?;
    println!("{} documents, {} words, {} tokens", c.num_docs(), c.num_words(), c.num_tokens());
    Ok(())
}

pub fn train_topic_cmd(cfg: &mut PipelineConfig, a: &TrainTopicArgs, kind: &str) -> Result<()> {
    apply_sampler(cfg, &a.sampler);
    let c = corpus(&a.corpus)?;
    let (sampler, seed) = (&cfg.sampler, cfg.seed);
    let m = match kind {
        "lda" => TopicModel::Lda(train_lda(&c, sampler, seed)?),
        "atm" => TopicModel::Atm(train_atm(&c, sampler, seed)?),
        _ => TopicModel::Mmsgtm(train_mmsgtm(&c, sampler, seed)?),
    };
    save_model(&m, &a.output, &cfg.hash(), seed)?;
    persist(cfg, &a.output)
}

/// Display names for the rows of an entity's matrix.
fn entity_names(kind: &str, rows: usize, corpus: Option<&Corpus>) -> Vec<String> {
    match (kind, corpus) {
        ("word" | "context" | "input_word" | "context_word", Some(c)) => c.vocabulary.words().to_vec(),
        ("author", Some(c)) if c.authors.is_some() => c.authors.clone().expect("checked"),
        _ => (0..rows).map(|i| format!("{kind}_{i}")).collect(),
    }
}

fn write_text_dir(dir: &Path, named: &NamedMatrices, corpus: Option<&Corpus>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, m) in named {
        let kind = name.rsplit_once('.').map_or(name.as_str(), |(k, _)| k);
        let names = entity_names(kind, m.rows(), corpus);
        write_text_vectors(&names, m, &dir.join(format!("{name}.txt")))?;
    }
    Ok(())
}

fn write_loss(output: &Path, loss: &LossLog) -> Result<()> {
    write(&sibling(output, "loss.csv"), loss.to_csv())
}

pub fn train_nea_cmd(cfg: &mut PipelineConfig, a: &TrainNeaArgs) -> Result<()> {
    apply_nea(cfg, &a.nea);
    let m = model(&a.model)?;
    let c = a.corpus.as_deref().map(corpus).transpose()?;
    let (named, loss) = match &m {
        TopicModel::Lda(p) => {
            let out = train_nea_lda(p, &cfg.nea, cfg.seed)?;
            (out.embeddings.named(), out.loss)
        }
        _ => {
            let c = c
                .as_ref()
                .ok_or_else(|| Error::config(format!("--corpus is required for {} models", m.name())))?;
            let chain = as_factorized(&m, c)?;
            let out = train_nea_general(&chain, &cfg.nea, cfg.seed)?;
            (out.embeddings.named(), out.loss)
        }
    };
    save_embeddings(&named, &a.output, &cfg.hash())?;
    write_loss(&a.output, &loss)?;
    if let Some(dir) = &a.text_output {
        write_text_dir(dir, &named, c.as_ref())?;
    }
    persist(cfg, &a.output)
}

pub fn train_sg_cmd(cfg: &mut PipelineConfig, a: &TrainSgArgs) -> Result<()> {
    apply_nea(cfg, &a.nea);
    if let Some(w) = a.window {
        cfg.sampler.window = w;
    }
    let c = corpus(&a.corpus)?;
    let out = train_skipgram(&c, cfg.sampler.window, &cfg.nea, cfg.seed)?;
    let named = out.embeddings.named();
    save_embeddings(&named, &a.output, &cfg.hash())?;
    write_loss(&a.output, &out.loss)?;
    if let Some(dir) = &a.text_output {
        write_text_dir(dir, &named, Some(&c))?;
    }
    persist(cfg, &a.output)
}

fn find<'a>(named: &'a NamedMatrices, name: &str) -> Result<&'a Matrix> {
    named
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, m)| m)
        .ok_or_else(|| Error::data(format!("embeddings have no `{name}` matrix")))
}

pub fn smooth_cmd(cfg: &mut PipelineConfig, a: &SmoothArgs) -> Result<()> {
    let (header, named) = load_embeddings(&a.embeddings)?;
    let (parent, child) = match &a.link {
        Some(link) => link
            .split_once(':')
            .map(|(p, c)| (p.to_string(), c.to_string()))
            .ok_or_else(|| Error::config("--link must look like parent:child"))?,
        None if named.iter().any(|(n, _)| n == "topic.in") && named.iter().any(|(n, _)| n == "word.out") => {
            ("topic".into(), "word".into())
        }
        None => {
            let strip = |suffix: &str| {
                let mut it = named.iter().filter_map(|(n, _)| n.strip_suffix(suffix));
                match (it.next(), it.next()) {
                    (Some(x), None) => Some(x.to_string()),
                    _ => None,
                }
            };
            strip(".in")
                .zip(strip(".out"))
                .ok_or_else(|| Error::config("several links in the file; pick one with --link"))?
        }
    };
    let table = softmax_rows(find(&named, &format!("{parent}.in"))?, find(&named, &format!("{child}.out"))?)?;
    save_table(&table, &parent, &child, &a.output, &header.config_hash)?;
    persist(cfg, &a.output)
}

pub fn doc_vectors_cmd(cfg: &mut PipelineConfig, a: &DocVectorsArgs) -> Result<()> {
    let (header, named) = load_embeddings(&a.embeddings)?;
    let docs = match (&a.model, &a.corpus) {
        (Some(path), _) => {
            let m = model(path)?;
            doc_embeddings_from_assignments(m.doc_assignments(), find(&named, "topic.in")?)?
        }
        (None, Some(path)) => sg_doc_features(&corpus(path)?, find(&named, "word.in")?)?,
        (None, None) => return Err(Error::config("give --model (topic vectors) or --corpus (word vectors)")),
    };
    save_doc_embeddings(&docs, &a.output, &header.config_hash)?;
    persist(cfg, &a.output)
}

pub fn coherence_cmd(cfg: &mut PipelineConfig, a: &CoherenceArgs) -> Result<()> {
    if let Some(t) = a.top_words {
        cfg.eval.top_words = t;
    }
    let c = corpus(&a.corpus)?;
    let m = a.model.as_deref().map(model).transpose()?;
    let phi = match (&a.table, &m) {
        (Some(path), _) => load_table(path)?.1,
        (None, Some(m)) => m.phi().clone(),
        (None, None) => return Err(Error::config("give --model or --table")),
    };
    let sizes = m.as_ref().map(TopicModel::topic_sizes).filter(|s| s.len() == phi.rows());
    let report = coherence_report(&phi, &c, cfg.eval.top_words, sizes.as_deref())?;
    write(&sibling(&a.output, "csv"), report.to_csv(&c))?;
    write_json(
        &sibling(&a.output, "json"),
        &json!({ "mean": report.mean, "top_words": report.top_n, "topics": phi.rows(), "config_hash": cfg.hash() }),
    )?;
    persist(cfg, &a.output)?;
    println!("mean coherence {}", report.mean);
    Ok(())
}

pub fn author_rank_cmd(cfg: &mut PipelineConfig, a: &AuthorRankArgs) -> Result<()> {
    if let Some(n) = a.min_papers {
        cfg.eval.min_papers = n;
    }
    let c = corpus(&a.corpus)?;
    let coauthors = coauthor_sets(&c);
    let eligible = eligible_authors(&c, cfg.eval.min_papers);
    let (method, result): (&str, RankingResult) = if a.tfidf {
        let vectors = author_tfidf(&c)?;
        let r = rank_by_distance(c.num_authors(), &coauthors, &eligible, |i, j| vectors.cosine_distance(i, j))?;
        ("tfidf", r)
    } else if let Some(path) = &a.table {
        ("table", coauthor_mrr(&load_table(path)?.1, &coauthors, &eligible)?)
    } else if let Some(path) = &a.model {
        match model(path)? {
            TopicModel::Atm(p) => ("atm", coauthor_mrr(&p.theta_author, &coauthors, &eligible)?),
            other => return Err(Error::data(format!("author ranking needs an atm model, got {}", other.name()))),
        }
    } else {
        return Err(Error::config("give --model, --table or --tfidf"));
    };
    let names = entity_names("author", c.num_authors(), Some(&c));
    write(&sibling(&a.output, "csv"), result.to_csv(&names))?;
    write_json(
        &sibling(&a.output, "json"),
        &json!({ "method": method, "mrr": result.mrr, "queries": result.queries.len(), "config_hash": cfg.hash() }),
    )?;
    persist(cfg, &a.output)?;
    println!("MRR {} over {} authors", result.mrr, result.queries.len());
    Ok(())
}

pub fn classify_cmd(cfg: &mut PipelineConfig, a: &ClassifyArgs) -> Result<()> {
    apply_sampler(cfg, &a.sampler);
    apply_nea(cfg, &a.nea);
    let e = &mut cfg.eval;
    if let Some(r) = a.split_ratio {
        e.split_ratio = r;
    }
    if let Some(n) = a.epochs {
        e.classifier.epochs = n;
    }
    if let Some(l) = a.l2_penalty {
        e.classifier.l2_penalty = l;
    }
    let specs = a.features.split(',').map(str::parse).collect::<Result<Vec<FeatureSpec>>>()?;
    let c = corpus(&a.corpus)?;
    let (train, test) = split(&c, cfg.eval.split_ratio, cfg.seed)?;
    let settings = HarnessSettings {
        sampler: cfg.sampler.clone(),
        nea: cfg.nea.clone(),
        classifier: cfg.eval.classifier.clone(),
        seed: cfg.seed,
    };
    let rows = classification_report(&train, &test, &specs, &settings)?;
    let mut csv = String::from("features,dim,train_accuracy,test_accuracy\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.features, r.dim, r.train_accuracy, r.test_accuracy));
        println!("{:<16} {:.4}", r.features, r.test_accuracy);
    }
    write(&sibling(&a.output, "csv"), csv)?;
    write_json(
        &sibling(&a.output, "json"),
        &json!({ "train_docs": train.num_docs(), "test_docs": test.num_docs(), "results": rows, "config_hash": cfg.hash() }),
    )?;
    persist(cfg, &a.output)
}

pub fn sweep_cmd(cfg: &mut PipelineConfig, a: &SweepArgs) -> Result<()> {
    apply_nea(cfg, &a.nea);
    if let Some(n) = a.iterations {
        cfg.sampler.iterations = n;
    }
    if let Some(t) = a.top_words {
        cfg.eval.top_words = t;
    }
    let c = corpus(&a.corpus)?;
    let mut csv = String::from("K,model,mean_coherence\n");
    for &k in &a.topics {
        let mut sampler = cfg.sampler.clone();
        sampler.topics = k;
        let lda = train_lda(&c, &sampler, cfg.seed)?;
        let nea = train_nea_lda(&lda, &cfg.nea, cfg.seed)?;
        let t = cfg.eval.top_words;
        let sizes = lda.topic_sizes();
        let lda_mean = coherence_report(&lda.phi, &c, t, Some(&sizes))?.mean;
        let nea_mean = coherence_report(&nea.smoothed_phi, &c, t, Some(&sizes))?.mean;
        csv.push_str(&format!("{k},lda,{lda_mean}\n{k},nea,{nea_mean}\n"));
        println!("K={k}: lda {lda_mean:.4} nea {nea_mean:.4}");
    }
    write(&a.output, csv)?;
    persist(cfg, &a.output)
}
