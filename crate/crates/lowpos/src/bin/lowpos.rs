//! Command-line front end: corpus preparation, silver annotation,
//! training, evaluation, baselines, and diagnostic reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lowpos::baselines::{
    dump_cluster_assignment, extract_type_features, fit_mixture, map_clusters_to_tags,
    ClusterTagger, MajorityBaseline,
};
use lowpos::clean::clean_corpus;
use lowpos::corpus::{parse_conllu, Corpus, Sentence, Token};
use lowpos::dict::{
    load_bilingual_dictionary, load_embeddings, load_monolingual_dictionary, DictScheme,
    EmbeddingTable, MonolingualTagDictionary,
};
use lowpos::harness::{
    assemble_inputs, evaluate, render_report, run_seeds, tag_distribution_report, train_model,
    ExperimentConfig, RunMeta, TagSource, Tagger, TrainedModel,
};
use lowpos::neural::checkpoint::{read_checkpoint, write_checkpoint};
use lowpos::silver::{compute_pos_stats, parse_silver, serialize_silver, SilverMode};
use lowpos::tags::PosTag;
use lowpos::vocab::Vocabulary;
use lowpos::{Error, Result};

#[derive(Parser)]
#[command(
    name = "lowpos",
    about = "Weakly supervised cross-lingual POS tagging toolkit",
    version
)]
struct Cli {
    /// Override the run seed (train: replaces the seed list; baseline:
    /// clustering seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for generated files
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean raw text and emit the cleaned corpus plus vocabularies
    Prepare {
        /// Raw text file, one line per paragraph or sentence
        #[arg(long)]
        raw: PathBuf,
        /// Bilingual dictionary TSV (low<TAB>high)
        #[arg(long)]
        bilingual: PathBuf,
        /// Monolingual tag dictionary TSV (word<TAB>tag)
        #[arg(long)]
        monolingual: Option<PathBuf>,
        /// Tag scheme of the monolingual dictionary
        #[arg(long, default_value = "ud")]
        scheme: String,
        /// Comma-separated script allow-list
        #[arg(long)]
        allowed_scripts: Option<String>,
        #[arg(long)]
        foreign_frac: Option<f64>,
        #[arg(long)]
        symbol_frac: Option<f64>,
        #[arg(long, default_value = "und")]
        lang: String,
    },
    /// Produce a silver-annotated training corpus
    Annotate {
        /// freq or amb
        #[arg(long)]
        strategy: String,
        /// Tokenized raw corpus, one sentence per line
        #[arg(long)]
        raw: PathBuf,
        #[arg(long)]
        bilingual: PathBuf,
        /// Gold-tagged high-resource corpus (CoNLL-U)
        #[arg(long)]
        high_resource: PathBuf,
        #[arg(long)]
        monolingual: Option<PathBuf>,
        #[arg(long, default_value = "ud")]
        scheme: String,
    },
    /// Train per the config file, evaluate every seed, write the report
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Config overrides as KEY=VALUE (same keys as the file)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Convenience override for the strategy key
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Evaluate a checkpoint against a gold CoNLL-U corpus
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// Run a reference baseline
    Baseline {
        /// cluster or majority
        #[arg(long)]
        system: String,
        /// Tokenized raw corpus, one sentence per line
        #[arg(long)]
        raw: Option<PathBuf>,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        monolingual: Option<PathBuf>,
        #[arg(long, default_value = "ud")]
        scheme: String,
        #[arg(long, default_value_t = 17)]
        clusters: usize,
        #[arg(long, default_value_t = 50)]
        iterations: usize,
        /// Constant tag for the majority system
        #[arg(long, default_value = "NOUN")]
        tag: String,
    },
    /// Tag-distribution tables over gold, silver, and prediction files
    Report {
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        freq_silver: Option<PathBuf>,
        #[arg(long)]
        amb_silver: Option<PathBuf>,
        /// Tagged CoNLL-U predictions
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))
}

/// One whitespace-tokenized sentence per non-empty line.
fn read_raw_corpus(path: &Path, lang: &str) -> Result<Corpus> {
    let text = read_text(path)?;
    let mut corpus = Corpus::new(lang);
    for line in text.lines() {
        let tokens: Vec<Token> = line.split_whitespace().map(Token::new).collect();
        if !tokens.is_empty() {
            corpus.sentences.push(Sentence::new(tokens));
        }
    }
    Ok(corpus)
}

fn load_monolingual(
    path: Option<&PathBuf>,
    scheme: &str,
) -> Result<Option<MonolingualTagDictionary>> {
    match path {
        Some(p) => {
            let scheme: DictScheme = scheme.parse()?;
            Ok(Some(load_monolingual_dictionary(&read_text(p)?, scheme)?))
        }
        None => Ok(None),
    }
}

fn write_file(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn cmd_prepare(
    out_dir: &Path,
    raw: &Path,
    bilingual: &Path,
    monolingual: Option<&PathBuf>,
    scheme: &str,
    allowed_scripts: Option<&str>,
    foreign_frac: Option<f64>,
    symbol_frac: Option<f64>,
    lang: &str,
) -> Result<()> {
    let lines: Vec<String> = read_text(raw)?.lines().map(str::to_string).collect();
    let b = load_bilingual_dictionary(&read_text(bilingual)?)?;
    let m = load_monolingual(monolingual, scheme)?;
    let mut cfg = lowpos::clean::CleaningConfig::default();
    if let Some(scripts) = allowed_scripts {
        cfg.allowed_scripts = scripts
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()?;
    }
    if let Some(f) = foreign_frac {
        cfg.foreign_frac = f;
    }
    if let Some(f) = symbol_frac {
        cfg.symbol_frac = f;
    }
    let corpus = clean_corpus(&lines, &b, m.as_ref(), &cfg, lang);
    let mut cleaned = String::new();
    for sentence in &corpus.sentences {
        let words: Vec<&str> = sentence.tokens.iter().map(|t| t.surface.as_str()).collect();
        cleaned.push_str(&words.join(" "));
        cleaned.push('\n');
    }
    write_file(out_dir, "cleaned.txt", &cleaned)?;
    let vocab = Vocabulary::build(&[&corpus], None, usize::MAX);
    write_file(out_dir, "words.txt", &(vocab.words().join("\n") + "\n"))?;
    let chars: String = vocab.chars()[3..]
        .iter()
        .map(|c| format!("{c}\n"))
        .collect();
    write_file(out_dir, "chars.txt", &chars)?;
    println!(
        "kept {} sentences, {} tokens, {} word types",
        corpus.sentence_count(),
        corpus.token_count(),
        vocab.word_count() - 1
    );
    Ok(())
}

fn cmd_annotate(
    out_dir: &Path,
    strategy: &str,
    raw: &Path,
    bilingual: &Path,
    high_resource: &Path,
    monolingual: Option<&PathBuf>,
    scheme: &str,
) -> Result<()> {
    let mode = match strategy {
        "freq" => SilverMode::Freq,
        "amb" => SilverMode::Amb,
        other => {
            return Err(Error::Config(format!(
                "unknown annotation strategy `{other}` (expected freq or amb)"
            )))
        }
    };
    let corpus = read_raw_corpus(raw, "und")?;
    let b = load_bilingual_dictionary(&read_text(bilingual)?)?;
    let d = parse_conllu(&read_text(high_resource)?, "high")?;
    let stats = compute_pos_stats(&d)?;
    let m = load_monolingual(monolingual, scheme)?;
    let silver = match mode {
        SilverMode::Freq => lowpos::silver::annotate_freq(&corpus, &b, &stats),
        SilverMode::Amb => lowpos::silver::annotate_amb(&corpus, &b, &stats, m.as_ref()),
    };
    let name = format!("silver.{strategy}.tsv");
    let path = write_file(out_dir, &name, &serialize_silver(&silver))?;
    println!(
        "wrote {} ({} sentences, {} tokens)",
        path.display(),
        silver.sentences.len(),
        silver.token_count()
    );
    Ok(())
}

fn cmd_train(
    out_dir: &Path,
    config_path: &Path,
    overrides: &[String],
    strategy: Option<&str>,
    seed: Option<u64>,
) -> Result<()> {
    let mut cfg = ExperimentConfig::parse(&read_text(config_path)?)?;
    for pair in overrides {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{pair}` is not KEY=VALUE")))?;
        cfg.set(key.trim(), value.trim())?;
    }
    if let Some(s) = strategy {
        cfg.set("strategy", s)?;
    }
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    cfg.validate_for_training()?;

    let raw = read_raw_corpus(cfg.raw.as_ref().unwrap(), &cfg.language_code)?;
    let gold = parse_conllu(&read_text(cfg.gold.as_ref().unwrap())?, &cfg.language_code)?;
    let b = load_bilingual_dictionary(&read_text(cfg.bilingual.as_ref().unwrap())?)?;
    let d = parse_conllu(&read_text(cfg.high_resource.as_ref().unwrap())?, "high")?;
    let stats = compute_pos_stats(&d)?;
    let m = match &cfg.monolingual {
        Some(p) => Some(load_monolingual_dictionary(
            &read_text(p)?,
            cfg.monolingual_scheme,
        )?),
        None => None,
    };
    let embeddings: Option<EmbeddingTable> = match &cfg.embeddings {
        Some(p) => Some(load_embeddings(&read_text(p)?)?),
        None => None,
    };

    let inputs = assemble_inputs(cfg.strategy, &raw, &b, &stats, m.as_ref())?;
    let vocab = Vocabulary::build(&[&raw], embeddings.as_ref(), cfg.max_vocab);

    fs::create_dir_all(out_dir)?;
    let mut first_model: Option<TrainedModel> = None;
    let mut report = run_seeds(&cfg.strategy.to_string(), &cfg.seeds, |run_seed| {
        let h = lowpos::neural::Hyperparams {
            seed: run_seed,
            ..cfg.hyperparams.clone()
        };
        let model = train_model(&inputs, &vocab, &h, embeddings.as_ref())?;
        let accuracy = evaluate(&model, &gold)?;
        let meta = RunMeta::from(&model.log);
        let ckpt = write_checkpoint(&model.params, &model.hyperparams, &model.vocab);
        write_file(out_dir, &format!("model.seed{run_seed}.ckpt"), &ckpt)?;
        if first_model.is_none() {
            first_model = Some(model);
        }
        Ok((accuracy, meta))
    })?;

    let mut sources = vec![("gold".to_string(), TagSource::from_gold(&gold)?)];
    let silver_name = match cfg.strategy.silver_mode() {
        SilverMode::Freq => "silver.freq",
        SilverMode::Amb => "silver.amb",
    };
    sources.push((
        silver_name.to_string(),
        TagSource::from_silver(&inputs.silver),
    ));
    if let Some(model) = &first_model {
        let mut preds = Vec::new();
        for sentence in &gold.sentences {
            let surfaces: Vec<String> =
                sentence.tokens.iter().map(|t| t.surface.clone()).collect();
            preds.extend(model.tag_sentence(&surfaces)?);
        }
        sources.push(("predictions".to_string(), TagSource::Single(preds)));
    }
    report.tag_tables = tag_distribution_report(&sources);

    let path = write_file(out_dir, "report.txt", &render_report(&report))?;
    println!(
        "strategy {} mean {:.6} std {:.6} ({})",
        report.strategy,
        report.mean,
        report.std,
        path.display()
    );
    Ok(())
}

fn cmd_eval(out_dir: &Path, model: &Path, gold: &Path) -> Result<()> {
    let (params, h, vocab) = read_checkpoint(&read_text(model)?)?;
    let gold_corpus = parse_conllu(&read_text(gold)?, "und")?;
    let trained = TrainedModel {
        params,
        hyperparams: h,
        vocab,
        log: lowpos::harness::TrainLog {
            epoch_losses: Vec::new(),
            stop_epoch: 0,
            best_epoch: 0,
            best_loss: 0.0,
        },
    };
    let accuracy = evaluate(&trained, &gold_corpus)?;
    let body = format!(
        "model {}\ngold {}\naccuracy {:.6}\nend\n",
        model.display(),
        gold.display(),
        accuracy
    );
    write_file(out_dir, "eval.txt", &body)?;
    println!("accuracy {accuracy:.6}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_baseline(
    out_dir: &Path,
    system: &str,
    raw: Option<&PathBuf>,
    gold: &Path,
    monolingual: Option<&PathBuf>,
    scheme: &str,
    clusters: usize,
    iterations: usize,
    tag: &str,
    seed: Option<u64>,
) -> Result<()> {
    let gold_corpus = parse_conllu(&read_text(gold)?, "und")?;
    let (name, accuracy, extra) = match system {
        "majority" => {
            let baseline = MajorityBaseline { tag: tag.parse()? };
            (
                format!("majority.{tag}"),
                evaluate(&baseline, &gold_corpus)?,
                None,
            )
        }
        "cluster" => {
            let raw_path = raw.ok_or_else(|| {
                Error::Config("the cluster baseline requires --raw".into())
            })?;
            let corpus = read_raw_corpus(raw_path, "und")?;
            let features = extract_type_features(&corpus, 100);
            let model = fit_mixture(&features, clusters, iterations, seed.unwrap_or(1))?;
            let m = load_monolingual(monolingual, scheme)?.unwrap_or_default();
            let map = map_clusters_to_tags(&model, &corpus, &m);
            let tagger = ClusterTagger { model, map };
            let dump = dump_cluster_assignment(&tagger);
            write_file(out_dir, "clusters.tsv", &dump)?;
            (
                format!("cluster.k{clusters}"),
                evaluate(&tagger, &gold_corpus)?,
                Some(out_dir.join("clusters.tsv")),
            )
        }
        other => {
            return Err(Error::Config(format!(
                "unknown baseline `{other}` (expected cluster or majority)"
            )))
        }
    };
    let body = format!("system {name}\naccuracy {accuracy:.6}\nend\n");
    write_file(out_dir, "baseline.txt", &body)?;
    println!("{name} accuracy {accuracy:.6}");
    if let Some(p) = extra {
        println!("cluster assignment in {}", p.display());
    }
    Ok(())
}

fn predictions_source(path: &Path) -> Result<TagSource> {
    let corpus = parse_conllu(&read_text(path)?, "und")?;
    let tags: Vec<PosTag> = corpus
        .tokens()
        .map(|t| {
            t.gold_tag
                .ok_or_else(|| Error::Data(format!("token `{}` has no tag", t.surface)))
        })
        .collect::<Result<_>>()?;
    Ok(TagSource::Single(tags))
}

fn cmd_report(
    out_dir: &Path,
    gold: Option<&PathBuf>,
    freq_silver: Option<&PathBuf>,
    amb_silver: Option<&PathBuf>,
    predictions: Option<&PathBuf>,
) -> Result<()> {
    let mut sources = Vec::new();
    if let Some(p) = gold {
        let corpus = parse_conllu(&read_text(p)?, "und")?;
        sources.push(("gold".to_string(), TagSource::from_gold(&corpus)?));
    }
    if let Some(p) = freq_silver {
        let silver = parse_silver(&read_text(p)?, SilverMode::Freq)?;
        sources.push(("silver.freq".to_string(), TagSource::from_silver(&silver)));
    }
    if let Some(p) = amb_silver {
        let silver = parse_silver(&read_text(p)?, SilverMode::Amb)?;
        sources.push(("silver.amb".to_string(), TagSource::from_silver(&silver)));
    }
    if let Some(p) = predictions {
        sources.push(("predictions".to_string(), predictions_source(p)?));
    }
    if sources.is_empty() {
        return Err(Error::Config(
            "report needs at least one of --gold, --freq-silver, --amb-silver, --predictions"
                .into(),
        ));
    }
    let tables = tag_distribution_report(&sources);
    let mut body = String::new();
    for table in &tables {
        body.push_str(&format!("tagtable {} tokens {}\n", table.name, table.tokens));
        for tag in PosTag::ALL {
            body.push_str(&format!("{} {:.2}\n", tag, table.percent[tag.index()]));
        }
    }
    body.push_str("end\n");
    let path = write_file(out_dir, "tagdist.txt", &body)?;
    print!("{body}");
    println!("written to {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Prepare {
            raw,
            bilingual,
            monolingual,
            scheme,
            allowed_scripts,
            foreign_frac,
            symbol_frac,
            lang,
        } => cmd_prepare(
            &out_dir,
            &raw,
            &bilingual,
            monolingual.as_ref(),
            &scheme,
            allowed_scripts.as_deref(),
            foreign_frac,
            symbol_frac,
            &lang,
        ),
        Command::Annotate {
            strategy,
            raw,
            bilingual,
            high_resource,
            monolingual,
            scheme,
        } => cmd_annotate(
            &out_dir,
            &strategy,
            &raw,
            &bilingual,
            &high_resource,
            monolingual.as_ref(),
            &scheme,
        ),
        Command::Train {
            config,
            overrides,
            strategy,
        } => cmd_train(&out_dir, &config, &overrides, strategy.as_deref(), cli.seed),
        Command::Eval { model, gold } => cmd_eval(&out_dir, &model, &gold),
        Command::Baseline {
            system,
            raw,
            gold,
            monolingual,
            scheme,
            clusters,
            iterations,
            tag,
        } => cmd_baseline(
            &out_dir,
            &system,
            raw.as_ref(),
            &gold,
            monolingual.as_ref(),
            &scheme,
            clusters,
            iterations,
            &tag,
            cli.seed,
        ),
        Command::Report {
            gold,
            freq_silver,
            amb_silver,
            predictions,
        } => cmd_report(
            &out_dir,
            gold.as_ref(),
            freq_silver.as_ref(),
            amb_silver.as_ref(),
            predictions.as_ref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version to stdout with success status
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("usage error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
