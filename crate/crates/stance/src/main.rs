use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stance::bundle;
use stance::evaluate::{compare, comparison_csv, load_models, predict_with_models, score_rows, PairUnit};
use stance::experiment::{run_experiment, write_curves, write_overlap, write_rankings, ExperimentSpec, DEFAULT_OVERLAP_PAIRS};
use stance::io::{
    load_network_profiles, load_parallel_labels, load_predictions, load_semeval_tsv, write_manifest_csv,
    write_network_profiles, write_predictions, write_semeval_tsv, PredictionRow,
};
use stance::pipeline::{load_dataset, train_topic};
use stance::report::{format_confusion, format_table, write_confusion_csv, write_consistency_csv, write_scores_csv, TableRow};
use stance::{Error, Result};
use stance_core::analysis::{parse_field_pair, user_consistency};
use stance_core::corpus::{Dataset, LabeledInstance};
use stance_core::features::FeatureSetSelector;
use stance_core::svm::{LinearModel, Loss, Mode, TrainConfig};
use stance_core::synth::{generate, PoolSizes, StancePrior, SynthConfig};
use stance_core::StanceLabel;

/// Stance detection from tweet text and social-network features.
#[derive(Parser)]
#[command(name = "stance", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with planted homophily.
    Synth(SynthArgs),
    /// Train one model bundle per topic.
    Train(TrainCmd),
    /// Predict a tweets file with trained bundles.
    Predict(PredictCmd),
    /// Score predictions, optionally comparing two systems.
    Evaluate(EvaluateCmd),
    /// Run the selector x mode x topic matrix and its analyses.
    Experiment(ExperimentCmd),
    /// Overlap, feature-ranking and consistency analyses on existing files.
    Analyze(AnalyzeCmd),
}

#[derive(Args)]
struct SvmArgs {
    /// Penalty parameter.
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    /// Stop when the largest projected gradient of an epoch falls below this.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// hinge or squared_hinge.
    #[arg(long, default_value = "hinge", value_parser = parse_loss)]
    loss: Loss,
    /// Drop features seen in fewer training instances than this.
    #[arg(long, default_value_t = 1)]
    min_df: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SvmArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig { c: self.c, tol: self.tol, max_iter: self.max_iter, seed: self.seed, loss: self.loss }
    }
}

fn parse_loss(s: &str) -> std::result::Result<Loss, String> {
    s.parse().map_err(|e: stance_core::Error| e.to_string())
}

fn parse_selector(s: &str) -> std::result::Result<FeatureSetSelector, String> {
    s.parse().map_err(|e: stance_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: stance_core::Error| e.to_string())
}

fn parse_unit(s: &str) -> std::result::Result<PairUnit, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_prior(s: &str) -> std::result::Result<StancePrior, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad prior weight '{p}'")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [f, a, n] => Ok(StancePrior::new(f, a, n)),
        _ => Err(format!("prior '{s}' must be FAVOR:AGAINST:NONE")),
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for train.tsv, test.tsv, profiles.jsonl, manifest.csv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated topic names.
    #[arg(long, value_delimiter = ',')]
    topics: Vec<String>,
    #[arg(long)]
    users_per_topic: Option<usize>,
    #[arg(long)]
    tweets_per_user: Option<usize>,
    /// FAVOR:AGAINST:NONE weights; give once for all topics or once per topic.
    #[arg(long, value_parser = parse_prior)]
    prior: Vec<StancePrior>,
    /// Probability that a network item comes from the stance community pool.
    #[arg(long)]
    homophily: Option<f64>,
    /// Probability that a tweet carries a stance word.
    #[arg(long)]
    text_signal: Option<f64>,
    /// Fraction of users whose tweets are empty.
    #[arg(long)]
    silent_fraction: Option<f64>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Items per stance community pool, for every profile set.
    #[arg(long)]
    community_pool: Option<usize>,
    /// Items in the shared pool, for every profile set.
    #[arg(long)]
    shared_pool: Option<usize>,
    /// Items drawn per user and profile set.
    #[arg(long)]
    draws: Option<usize>,
}

#[derive(Args)]
struct TrainCmd {
    #[arg(long)]
    tweets: PathBuf,
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Feature families joined by '+', e.g. TXT+IN_AT+IN_DM or PN.
    #[arg(long, default_value = "TXT", value_parser = parse_selector)]
    selector: FeatureSetSelector,
    /// ternary or binary.
    #[arg(long, default_value = "ternary", value_parser = parse_mode)]
    mode: Mode,
    /// Train only these topics.
    #[arg(long)]
    topic: Vec<String>,
    /// Keep instances whose author has no profile (with empty network sets).
    #[arg(long)]
    keep_unprofiled: bool,
    /// Root directory; bundles go to <out>/<topic>/<selector>/<mode>.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    svm: SvmArgs,
}

#[derive(Args)]
struct PredictCmd {
    /// A bundle or a directory containing bundles.
    #[arg(long)]
    models: PathBuf,
    #[arg(long)]
    tweets: PathBuf,
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long, value_parser = parse_selector)]
    selector: Option<FeatureSetSelector>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    keep_unprofiled: bool,
    /// Prediction TSV (ID, Target, Gold, Pred).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateCmd {
    /// Bundle roots to run on --tweets; one system each.
    #[arg(long)]
    models: Vec<PathBuf>,
    #[arg(long)]
    tweets: Option<PathBuf>,
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long, value_parser = parse_selector)]
    selector: Option<FeatureSetSelector>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    keep_unprofiled: bool,
    /// Prediction TSVs (ID, Target, Gold, Pred); one system each.
    #[arg(long)]
    predictions: Vec<PathBuf>,
    /// SemEval gold file, paired with --guess files.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Labels parallel to --gold, one per line or as the last TSV column.
    #[arg(long)]
    guess: Vec<PathBuf>,
    /// With exactly two systems, add paired t-test and Mann-Whitney U p-values.
    #[arg(long)]
    compare: bool,
    /// Paired observation for --compare: topic (per-topic F_avg) or instance (0/1 correctness).
    #[arg(long, default_value = "topic", value_parser = parse_unit)]
    pair_unit: PairUnit,
    /// Directory for report.txt, scores and confusion CSVs.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentCmd {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Repeatable; defaults to the full text/network matrix.
    #[arg(long, value_parser = parse_selector)]
    selector: Vec<FeatureSetSelector>,
    /// Repeatable; defaults to both modes.
    #[arg(long, value_parser = parse_mode)]
    mode: Vec<Mode>,
    /// Cross-validate every cell on its training data with this many folds.
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    keep_unprofiled: bool,
    /// Features per class in the rankings.
    #[arg(long, default_value_t = 20)]
    top_n: usize,
    /// Largest N of the top-N overlap curves.
    #[arg(long, default_value_t = 1000)]
    curve_max: usize,
    /// Overlap histogram bin width in percentage points.
    #[arg(long, default_value_t = 5)]
    bin_width: u32,
    /// Concurrent cells; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    svm: SvmArgs,
}

#[derive(Args)]
struct AnalyzeCmd {
    /// Profiles for overlap histograms.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Field pair such as IN_AT,PN_AT; repeatable.
    #[arg(long)]
    pair: Vec<String>,
    #[arg(long, default_value_t = 5)]
    bin_width: u32,
    /// Bundle root for feature rankings and top-N overlap curves.
    #[arg(long)]
    models: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    top_n: usize,
    #[arg(long, default_value_t = 1000)]
    curve_max: usize,
    /// Tweets file giving the authors of --predictions.
    #[arg(long)]
    tweets: Option<PathBuf>,
    /// Prediction TSV for the user-consistency report.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let mut cfg = SynthConfig { seed: a.seed, ..SynthConfig::default() };
    if !a.topics.is_empty() {
        cfg.topics = a.topics.iter().map(|t| t.trim().to_string()).collect();
    }
    if !a.prior.is_empty() {
        cfg.stance_priors = a.prior;
    }
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = a.$field { cfg.$field = v; })* };
    }
    set!(users_per_topic, tweets_per_user, homophily, text_signal, silent_fraction, train_fraction);
    for pool in &mut cfg.pools {
        *pool = PoolSizes {
            community: a.community_pool.unwrap_or(pool.community),
            shared: a.shared_pool.unwrap_or(pool.shared),
            draws: a.draws.unwrap_or(pool.draws),
        };
    }
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let corpus = generate(&cfg)?;
    write_synth(&a.out, &corpus.train, &corpus.test, &corpus.manifest)?;
    println!(
        "wrote {} train and {} test tweets to {}",
        corpus.train.instances.len(),
        corpus.test.instances.len(),
        a.out.display()
    );
    Ok(())
}

fn write_synth(
    out: &Path,
    train: &Dataset,
    test: &Dataset,
    manifest: &[stance_core::synth::ManifestRow],
) -> Result<()> {
    write_semeval_tsv(&out.join("train.tsv"), &train.instances)?;
    write_semeval_tsv(&out.join("test.tsv"), &test.instances)?;
    let profiles: BTreeMap<_, _> = train.profiles.iter().chain(&test.profiles).collect();
    write_network_profiles(&out.join("profiles.jsonl"), profiles.into_values())?;
    write_manifest_csv(&out.join("manifest.csv"), manifest)
}

fn cmd_train(a: TrainCmd) -> Result<()> {
    let config = a.svm.config();
    config.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let (dataset, stats) = load_dataset(&a.tweets, a.profiles.as_deref(), &[a.selector], a.keep_unprofiled)?;
    let topics: Vec<String> = if a.topic.is_empty() {
        dataset.topics.clone()
    } else {
        for t in &a.topic {
            if !dataset.topics.contains(t) {
                return Err(Error::Usage(format!("topic '{t}' not in {}", a.tweets.display())));
            }
        }
        a.topic.clone()
    };
    if topics.is_empty() {
        return Err(Error::Data(format!("{} has no instances to train on", a.tweets.display())));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let models: Vec<Result<LinearModel>> = pool.install(|| {
        use rayon::prelude::*;
        topics
            .par_iter()
            .map(|t| train_topic(&dataset, t, a.selector, a.mode, &config, a.svm.min_df))
            .collect()
    });
    for model in models {
        let model = model?;
        let dir = bundle::bundle_dir(&a.out, model.topic(), a.selector, a.mode);
        bundle::save(&model, &dir)?;
        println!("{}: {} features -> {}", model.topic(), model.space().len(), dir.display());
    }
    if stats.dropped > 0 {
        println!("{} instances dropped for lack of a profile", stats.dropped);
    }
    Ok(())
}

fn cmd_predict(a: PredictCmd) -> Result<()> {
    let models = load_models(&a.models, a.selector, a.mode)?;
    let rows = predict_with_models(&models, &a.tweets, a.profiles.as_deref(), a.keep_unprofiled)?;
    write_predictions(&a.out, &rows)?;
    println!("wrote {} predictions to {}", rows.len(), a.out.display());
    Ok(())
}

fn gold_guess_rows(gold: &Path, guess: &Path) -> Result<Vec<PredictionRow>> {
    let gold_rows: Vec<LabeledInstance> = load_semeval_tsv(gold)?;
    let labels = load_parallel_labels(guess)?;
    if labels.len() != gold_rows.len() {
        return Err(Error::Data(format!(
            "{} has {} labels but {} has {} instances",
            guess.display(),
            labels.len(),
            gold.display(),
            gold_rows.len()
        )));
    }
    Ok(gold_rows
        .into_iter()
        .zip(labels)
        .map(|(g, p)| PredictionRow { tweet_id: g.tweet_id, topic: g.topic, gold: g.label, pred: p })
        .collect())
}

fn cmd_evaluate(a: EvaluateCmd) -> Result<()> {
    let mut systems: Vec<(String, Vec<PredictionRow>)> = Vec::new();
    if !a.models.is_empty() {
        let tweets = a.tweets.as_deref().ok_or_else(|| Error::Usage("--models needs --tweets".into()))?;
        for root in &a.models {
            let models = load_models(root, a.selector, a.mode)?;
            let rows = predict_with_models(&models, tweets, a.profiles.as_deref(), a.keep_unprofiled)?;
            systems.push((root.display().to_string(), rows));
        }
    }
    for p in &a.predictions {
        systems.push((p.display().to_string(), load_predictions(p)?));
    }
    match (&a.gold, a.guess.is_empty()) {
        (Some(gold), false) => {
            for g in &a.guess {
                systems.push((g.display().to_string(), gold_guess_rows(gold, g)?));
            }
        }
        (None, true) => {}
        _ => return Err(Error::Usage("--gold and --guess go together".into())),
    }
    if systems.is_empty() {
        return Err(Error::Usage("nothing to evaluate: give --models, --predictions or --gold/--guess".into()));
    }
    if a.compare && systems.len() != 2 {
        return Err(Error::Usage(format!("--compare needs exactly two systems, got {}", systems.len())));
    }

    let reports = systems.iter().map(|(_, rows)| score_rows(rows)).collect::<Result<Vec<_>>>()?;
    let mut topics: Vec<String> = reports.iter().flat_map(|r| r.per_topic.keys().cloned()).collect();
    topics.sort();
    topics.dedup();
    let rows: Vec<TableRow<'_>> = systems
        .iter()
        .zip(&reports)
        .map(|((name, _), r)| TableRow { label: name.clone(), report: Some(r) })
        .collect();
    let mut text = format_table("F-score (%) per topic and overall", &topics, &rows);
    for ((name, _), r) in systems.iter().zip(&reports) {
        text.push_str(&format!("\nConfusion matrix, {name}:\n{}", format_confusion(&r.confusion)));
        for (topic, class) in r.collapsed_classes() {
            text.push_str(&format!("collapse: {topic} has no correct {class} prediction\n"));
        }
    }
    let comparison = if a.compare {
        let c = compare(&systems[0].1, &systems[1].1, a.pair_unit)?;
        text.push_str(&format!("\nComparison over {} {} units:\n", c.a.len(), c.unit));
        match &c.t_test {
            Ok(t) => text.push_str(&format!("  paired t-test: t = {:.4}, dof = {}, p = {:.6}\n", t.t, t.dof, t.p_value)),
            Err(e) => text.push_str(&format!("  paired t-test: undefined ({e})\n")),
        }
        match &c.u_test {
            Ok(u) => text.push_str(&format!("  Mann-Whitney U: U = {:.1}, p = {:.6} ({:?})\n", u.u, u.p_value, u.method)),
            Err(e) => text.push_str(&format!("  Mann-Whitney U: undefined ({e})\n")),
        }
        Some(c)
    } else {
        None
    };
    print!("{text}");

    if let Some(out) = &a.out {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        fs::write(out.join("report.txt"), &text).map_err(|e| Error::io(out.join("report.txt"), e))?;
        for (k, r) in reports.iter().enumerate() {
            let suffix = if reports.len() == 1 { String::new() } else { format!("-{}", k + 1) };
            write_scores_csv(&out.join(format!("scores{suffix}.csv")), r)?;
            write_confusion_csv(&out.join(format!("confusion{suffix}.csv")), r)?;
        }
        if let Some(c) = &comparison {
            let path = out.join("comparison.csv");
            fs::write(&path, comparison_csv(c)?).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

fn cmd_experiment(a: ExperimentCmd) -> Result<()> {
    let mut spec = ExperimentSpec::new(a.train, a.test, a.out);
    if !a.selector.is_empty() {
        spec.selectors = a.selector;
    }
    if !a.mode.is_empty() {
        spec.modes = a.mode;
    }
    spec.profiles = a.profiles;
    spec.config = a.svm.config();
    spec.min_df = a.svm.min_df;
    spec.folds = a.folds;
    spec.keep_unprofiled = a.keep_unprofiled;
    spec.top_n = a.top_n;
    spec.curve_max = a.curve_max;
    spec.bin_width = a.bin_width;
    spec.jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    spec.config.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let outcome = run_experiment(&spec);
    let report = spec.out.join("report.txt");
    if let Ok(text) = fs::read_to_string(&report) {
        print!("{text}");
    }
    outcome.map(|_| ())
}

fn cmd_analyze(a: AnalyzeCmd) -> Result<()> {
    let mut did = false;
    if let Some(p) = &a.profiles {
        let pairs = if a.pair.is_empty() {
            DEFAULT_OVERLAP_PAIRS.to_vec()
        } else {
            a.pair.iter().map(|s| parse_field_pair(s).map_err(|e| Error::Usage(e.to_string()))).collect::<Result<_>>()?
        };
        let load = load_network_profiles(p)?;
        if load.profiles.is_empty() {
            return Err(Error::Data(format!("{} holds no profiles", p.display())));
        }
        if !write_overlap(&a.out.join("overlap"), load.profiles.values(), &pairs, a.bin_width)? {
            println!("every profile is empty; no overlap written");
        }
        did = true;
    }
    if let Some(root) = &a.models {
        let models = bundle::discover(root)?.iter().map(|d| bundle::load(d)).collect::<Result<Vec<_>>>()?;
        if models.is_empty() {
            return Err(Error::Data(format!("no model bundles under {}", root.display())));
        }
        let refs: Vec<&LinearModel> = models.iter().collect();
        write_rankings(&a.out.join("rankings"), &refs, a.top_n)?;
        let curves = write_curves(&a.out.join("curves"), &refs, a.curve_max)?;
        println!("rankings for {} models, {curves} overlap curves", models.len());
        did = true;
    }
    match (&a.tweets, &a.predictions) {
        (Some(tweets), Some(pred)) => {
            let instances = load_semeval_tsv(tweets)?;
            let authors: BTreeMap<&str, &LabeledInstance> =
                instances.iter().map(|i| (i.tweet_id.as_str(), i)).collect();
            let rows = load_predictions(pred)?;
            let mut kept = Vec::with_capacity(rows.len());
            let mut labels: Vec<StanceLabel> = Vec::with_capacity(rows.len());
            for r in &rows {
                let inst = authors.get(r.tweet_id.as_str()).ok_or_else(|| {
                    Error::Data(format!("prediction for unknown tweet '{}' in {}", r.tweet_id, pred.display()))
                })?;
                kept.push((*inst).clone());
                labels.push(r.pred);
            }
            let gold: Vec<StanceLabel> = kept.iter().map(|i| i.label).collect();
            let dataset = Dataset { instances: kept, ..Dataset::default() };
            let report = vec![
                ("gold".to_string(), user_consistency(&dataset, &gold)?),
                (pred.display().to_string(), user_consistency(&dataset, &labels)?),
            ];
            write_consistency_csv(&a.out.join("consistency.csv"), &report)?;
            did = true;
        }
        (None, None) => {}
        _ => return Err(Error::Usage("--tweets and --predictions go together".into())),
    }
    if !did {
        return Err(Error::Usage("nothing to analyze: give --profiles, --models or --tweets/--predictions".into()));
    }
    Ok(())
}
