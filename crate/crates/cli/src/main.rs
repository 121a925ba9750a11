//! `xlingmap`: synthetic data generation, map learning, and cross-lingual
//! document clustering from the command line.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 malformed input file, 5 invalid
//! input, 6 numerical failure, 7 missing input for the chosen method.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xlingmap::corpus::{DocumentSet, Scheme, VocabMode};
use xlingmap::pipeline::{learn_map, parse_sweep, run_cluster, ClusterConfig, LearnMapConfig, Method, Resources};
use xlingmap::synth::{default_field_strengths, gen_bilingual_embeddings, gen_world, CorpusSpec, SynthConfig};
use xlingmap::{EmbeddingModel, Error, ErrorClass, Lexicon, TargetInventory, TransformMatrix, SCHEMA};

#[derive(Parser)]
#[command(
    name = "xlingmap",
    version,
    about = "Cross-lingual embedding maps, semantic fingerprints and topical clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
// parsed once per process, so variant size does not matter
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a synthetic bilingual world: models, lexicon, gold map, corpus, inventory.
    Synth(SynthArgs),
    /// Learn a source→target transformation matrix and report translation accuracy.
    LearnMap(LearnMapArgs),
    /// Cluster a bilingual document collection and score it against gold topics.
    Cluster(ClusterArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 600)]
    vocab_size: usize,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    /// Standard deviation of the target-side Gaussian noise.
    #[arg(long, default_value_t = 1.0)]
    noise_sigma: f64,
    /// Only models, lexicon and gold map, with i.i.d. source vectors.
    #[arg(long)]
    embeddings_only: bool,
    #[arg(long, default_value_t = 3)]
    topics: usize,
    #[arg(long, default_value_t = 100)]
    docs_per_topic: usize,
    #[arg(long, default_value_t = 200)]
    doc_len: usize,
    #[arg(long, default_value_t = 40)]
    vocab_per_topic: usize,
    #[arg(long, default_value_t = 30)]
    noise_vocab: usize,
    #[arg(long, default_value_t = 20)]
    reserve_per_topic: usize,
    /// Comma-separated, one per topic [default: 3 for every topic but the last, which gets 0].
    #[arg(long, value_delimiter = ',')]
    field_strengths: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.8)]
    topic_mix: f64,
    #[arg(long, default_value = "uk")]
    src_lang: String,
    #[arg(long, default_value = "ru")]
    tgt_lang: String,
}

#[derive(Args)]
struct ModelArgs {
    /// Source-language model (word2vec text format).
    #[arg(long)]
    src: Option<PathBuf>,
    /// Target-language model (word2vec text format).
    #[arg(long)]
    tgt: Option<PathBuf>,
    /// Length-normalise vectors after loading.
    #[arg(long)]
    normalize: bool,
}

impl ModelArgs {
    fn load(&self, path: &Option<PathBuf>) -> xlingmap::Result<Option<EmbeddingModel>> {
        path.as_ref()
            .map(|p| {
                let m = EmbeddingModel::load(p, None)?;
                Ok(if self.normalize { m.normalized() } else { m })
            })
            .transpose()
    }
}

#[derive(Args)]
struct LearnMapArgs {
    #[command(flatten)]
    models: ModelArgs,
    /// Bilingual lexicon, one `src<TAB>tgt` pair per line.
    #[arg(long)]
    lexicon: PathBuf,
    /// Where to write the transformation matrix (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Where to write the accuracy report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Also report accuracy for each λ in `start:stop:step`, e.g. `0:5:0.5`.
    #[arg(long)]
    lambda_sweep: Option<String>,
    #[arg(long, default_value_t = 4500)]
    train: usize,
    #[arg(long, default_value_t = 500)]
    test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,5")]
    ks: Vec<usize>,
}

#[derive(Args)]
struct ClusterArgs {
    /// Documents as JSON lines.
    #[arg(long)]
    docs: PathBuf,
    /// naive-binary | naive-count | edit | dict-edit | matrix-translate | fp-types | fp-tokens
    #[arg(long)]
    method: String,
    #[command(flatten)]
    models: ModelArgs,
    /// Transformation matrix from `learn-map`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Target inventory, `word<TAB>pos<TAB>freq` per line.
    #[arg(long)]
    inventory: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Directory for `assignments.json` and `report.json`.
    #[arg(long)]
    out_dir: PathBuf,
    /// Also write PCA coordinates to this CSV file.
    #[arg(long)]
    emit_2d: Option<PathBuf>,
    /// Number of clusters [default: number of gold topics].
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// binary | count | tfidf, for edit, dict-edit and matrix-translate [default: binary].
    #[arg(long)]
    scheme: Option<String>,
    /// Terms kept per ranking when selecting the vocabulary.
    #[arg(long, default_value_t = 500)]
    vocab_x: usize,
    /// per_topic | global
    #[arg(long, default_value = "per_topic")]
    vocab_mode: String,
    /// PoS tags replaced by edit-distance translation.
    #[arg(long, value_delimiter = ',', default_value = "S,A,V,ABBR")]
    replace_pos: Vec<String>,
    /// PoS tags removed from every document before processing.
    #[arg(long, value_delimiter = ',')]
    drop_pos: Vec<String>,
    #[arg(long, default_value = "uk")]
    src_lang: String,
    #[arg(long, default_value = "ru")]
    tgt_lang: String,
}

fn create_dir(dir: &Path) -> xlingmap::Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> xlingmap::Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn synth(args: SynthArgs) -> xlingmap::Result<()> {
    create_dir(&args.out_dir)?;
    let dir = &args.out_dir;
    let models = if args.embeddings_only {
        gen_bilingual_embeddings(args.vocab_size, args.dim, args.noise_sigma, args.seed)?
    } else {
        let cfg = SynthConfig {
            vocab_size: args.vocab_size,
            dim: args.dim,
            noise_sigma: args.noise_sigma,
            reserve_per_topic: args.reserve_per_topic,
            field_strengths: args
                .field_strengths
                .clone()
                .unwrap_or_else(|| default_field_strengths(args.topics)),
            corpus: CorpusSpec {
                topics: args.topics,
                docs_per_topic_per_lang: args.docs_per_topic,
                doc_len: args.doc_len,
                vocab_per_topic: args.vocab_per_topic,
                shared_noise_vocab: args.noise_vocab,
                topic_mix: args.topic_mix,
            },
            src_lang: args.src_lang.clone(),
            tgt_lang: args.tgt_lang.clone(),
            seed: args.seed,
        };
        let world = gen_world(&cfg)?;
        world.corpus.save(dir.join("corpus.jsonl"))?;
        world.inventory.save(dir.join("inventory.tsv"))?;
        DocumentSet::load(dir.join("corpus.jsonl"))?;
        TargetInventory::load(dir.join("inventory.tsv"))?;
        let manifest = serde_json::json!({ "schema": SCHEMA, "config": cfg });
        write(
            &dir.join("synth.json"),
            serde_json::to_string_pretty(&manifest).expect("serialisable") + "\n",
        )?;
        world.models
    };
    models.src.save(dir.join("src.vec"))?;
    models.tgt.save(dir.join("tgt.vec"))?;
    models.lexicon.save(dir.join("lexicon.tsv"))?;
    models.gold.save(dir.join("gold_matrix.json"))?;
    EmbeddingModel::load(dir.join("src.vec"), Some(args.dim))?;
    EmbeddingModel::load(dir.join("tgt.vec"), Some(args.dim))?;
    Lexicon::load(dir.join("lexicon.tsv"))?;
    TransformMatrix::load(dir.join("gold_matrix.json"))?;
    println!("wrote synthetic data to {}", dir.display());
    Ok(())
}

fn learn(args: LearnMapArgs) -> xlingmap::Result<()> {
    let missing = |what: &str| Error::MissingInput {
        method: "learn-map".into(),
        input: what.into(),
    };
    let src = args.models.load(&args.models.src)?.ok_or_else(|| missing("--src"))?;
    let tgt = args.models.load(&args.models.tgt)?.ok_or_else(|| missing("--tgt"))?;
    let lexicon = Lexicon::load(&args.lexicon)?;
    let cfg = LearnMapConfig {
        lambda: args.lambda,
        sweep: args.lambda_sweep.as_deref().map(parse_sweep).transpose()?,
        train: args.train,
        test: args.test,
        seed: args.seed,
        ks: args.ks,
    };
    let (transform, report) = learn_map(&src, &tgt, &lexicon, &cfg)?;
    transform.save(&args.out)?;
    TransformMatrix::load(&args.out)?;
    if let Some(path) = &args.report {
        write(
            path,
            serde_json::to_string_pretty(&report).expect("serialisable") + "\n",
        )?;
    }
    print!("{}", report.render_table());
    Ok(())
}

fn cluster(args: ClusterArgs) -> xlingmap::Result<()> {
    let method: Method = args.method.parse()?;
    let mut docs = DocumentSet::load(&args.docs)?;
    if !args.drop_pos.is_empty() {
        docs = docs.without_pos(&args.drop_pos.iter().cloned().collect());
    }
    let src = args.models.load(&args.models.src)?;
    let tgt = args.models.load(&args.models.tgt)?;
    let transform = args.matrix.as_ref().map(TransformMatrix::load).transpose()?;
    let inventory = args.inventory.as_ref().map(TargetInventory::load).transpose()?;
    let lexicon = args.lexicon.as_ref().map(Lexicon::load).transpose()?;
    let resources = Resources {
        src: src.as_ref(),
        tgt: tgt.as_ref(),
        transform: transform.as_ref(),
        inventory: inventory.as_ref(),
        lexicon: lexicon.as_ref(),
    };
    let cfg = ClusterConfig {
        k: args.k,
        seed: args.seed,
        restarts: args.restarts,
        max_iter: args.max_iter,
        tol: args.tol,
        scheme: args.scheme.as_deref().map(str::parse::<Scheme>).transpose()?,
        vocab_x: args.vocab_x,
        vocab_mode: args.vocab_mode.parse::<VocabMode>()?,
        replace_pos: args.replace_pos.into_iter().collect::<HashSet<_>>(),
        src_lang: args.src_lang,
        tgt_lang: args.tgt_lang,
    };
    let outcome = run_cluster(method, &docs, &resources, &cfg)?;

    create_dir(&args.out_dir)?;
    write(
        &args.out_dir.join("assignments.json"),
        outcome.assignments_json() + "\n",
    )?;
    if let Some(report) = outcome.report_json() {
        write(&args.out_dir.join("report.json"), report + "\n")?;
    }
    if let Some(path) = &args.emit_2d {
        let mut buf = Vec::new();
        outcome.write_projection_csv(&docs, &mut buf)?;
        write(path, buf)?;
    }
    println!(
        "method {} on {} ({} documents)",
        method,
        outcome.features.feature_space,
        docs.len()
    );
    match &outcome.report {
        Some(report) => print!("{}", report.render_table()),
        None => println!("no gold topics; inertia {}", outcome.result.inertia),
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Io => 3,
        ErrorClass::Format => 4,
        ErrorClass::Input => 5,
        ErrorClass::Numerical => 6,
        ErrorClass::MissingInput => 7,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::LearnMap(a) => learn(a),
        Command::Cluster(a) => cluster(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
