use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use netfair::features::FEATURE_NAMES;
use netfair::model::LogisticLearner;
use netfair::runner::{
    generate_synthetic, run_experiment, write_messages, CorpusSource, ExperimentConfig,
    MedianScope, PreparedCorpus, SyntheticConfig,
};
use netfair::Error;

#[derive(Parser)]
#[command(
    name = "netfair",
    version,
    about = "Network-centrality fairness audit for bullying detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the repeated-split audit and write report.json / report.txt.
    Audit(AuditArgs),
    /// Write a synthetic message corpus.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        synthetic: SyntheticArgs,
    },
    /// Print per-message feature vectors as TSV.
    Features {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SyntheticArgs {
    #[arg(long, default_value_t = SyntheticConfig::default().node_count)]
    node_count: usize,
    #[arg(long, default_value_t = SyntheticConfig::default().message_count)]
    message_count: usize,
    #[arg(long, default_value_t = SyntheticConfig::default().positive_rate)]
    positive_rate: f64,
    #[arg(long, default_value_t = SyntheticConfig::default().bias_strength)]
    bias_strength: f64,
    #[arg(long, default_value_t = SyntheticConfig::default().covert_rate)]
    covert_rate: f64,
    #[arg(long, default_value_t = SyntheticConfig::default().banter_rate)]
    banter_rate: f64,
    /// Generator seed.
    #[arg(long, default_value_t = SyntheticConfig::default().seed)]
    seed: u64,
}

impl SyntheticArgs {
    fn config(&self) -> SyntheticConfig {
        SyntheticConfig {
            node_count: self.node_count,
            message_count: self.message_count,
            positive_rate: self.positive_rate,
            bias_strength: self.bias_strength,
            covert_rate: self.covert_rate,
            banter_rate: self.banter_rate,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct CorpusArgs {
    /// Tab-separated messages file; a synthetic corpus is generated when omitted.
    #[arg(long)]
    messages: Option<PathBuf>,
    /// Extra `a,b` edge list merged into the message graph.
    #[arg(long, requires = "messages")]
    edges: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    smileys: Option<PathBuf>,
    #[command(flatten)]
    synthetic: SyntheticArgs,
}

impl CorpusArgs {
    fn source(&self) -> CorpusSource {
        match &self.messages {
            Some(m) => CorpusSource::Files {
                messages: m.clone(),
                edges: self.edges.clone(),
            },
            None => CorpusSource::Synthetic(self.synthetic.config()),
        }
    }
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    master_seed: u64,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, default_value_t = 5)]
    smote_k: usize,
    #[arg(long, default_value_t = 0.0)]
    undersample_fraction: f64,
    #[arg(long, default_value_t = netfair::model::DEFAULT_FOLDS)]
    fold_count: usize,
    #[arg(long, default_value_t = netfair::model::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = netfair::stats::DEFAULT_ALPHA)]
    alpha: f64,
    /// Cut groups at the median over all messages instead of the test split.
    #[arg(long)]
    global_median: bool,
    /// Run trials one after another (results are identical).
    #[arg(long)]
    serial: bool,
    #[arg(long, default_value_t = LogisticLearner::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = LogisticLearner::default().step)]
    step: f64,
    #[arg(long, default_value_t = LogisticLearner::default().l2)]
    l2: f64,
    #[command(flatten)]
    corpus: CorpusArgs,
}

fn audit(args: &AuditArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::new(args.master_seed, args.corpus.source());
    cfg.trials = args.trials;
    cfg.train_fraction = args.train_fraction;
    cfg.smote_k = args.smote_k;
    cfg.undersample_fraction = args.undersample_fraction;
    cfg.fold_count = args.fold_count;
    cfg.threshold = args.threshold;
    cfg.alpha = args.alpha;
    cfg.lexicon = args.corpus.lexicon.clone();
    cfg.smileys = args.corpus.smileys.clone();
    if args.global_median {
        cfg.median_scope = MedianScope::Global;
    }
    cfg.learner = LogisticLearner {
        epochs: args.epochs,
        step: args.step,
        l2: args.l2,
    };
    let report = run_experiment(&cfg, !args.serial)?;
    let (json, text) = report.write(&args.out_dir)?;
    print!("{}", report.to_text());
    eprintln!("wrote {} and {}", json.display(), text.display());
    Ok(())
}

fn features(corpus: &CorpusArgs, out: Option<&PathBuf>) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::new(0, corpus.source());
    cfg.lexicon = corpus.lexicon.clone();
    cfg.smileys = corpus.smileys.clone();
    let prepared = PreparedCorpus::load(&cfg)?;
    let mut text = String::from("message_id\tlabel\tdeg_out_receiver");
    for name in FEATURE_NAMES {
        text.push('\t');
        text.push_str(name);
    }
    text.push('\n');
    for x in &prepared.data.instances {
        text.push_str(&format!(
            "{}\t{}\t{:?}",
            x.message_id,
            u8::from(x.label),
            x.sensitive_value
        ));
        for v in &x.model_features {
            text.push_str(&format!("\t{v:?}"));
        }
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Audit(args) => audit(args),
        Command::Generate { out, synthetic } => {
            generate_synthetic(&synthetic.config()).and_then(|recs| write_messages(out, &recs))
        }
        Command::Features { corpus, out } => features(corpus, out.as_ref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Aborted { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
