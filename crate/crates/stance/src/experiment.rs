//! The experiment matrix: every (selector, mode, topic) cell trained on the
//! training file and scored on the test file, plus the analysis outputs.
//!
//! Output layout below the output directory:
//!
//! - `master.csv`: one row per (mode, selector), per-topic F_avg and
//!   pooled scores.
//! - `cells.csv`: one row per cell, with cross-validation columns.
//! - `report.txt`: text tables per mode and confusion matrices of the best
//!   model per mode.
//! - `predictions/<mode>/<selector>.tsv`, `confusion/<mode>/<selector>.csv`.
//! - `analysis/`: overlap histograms, top-N curves, feature rankings and
//!   user consistency.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use stance_core::analysis::{network_overlap, top_features, topn_overlap_curve, user_consistency};
use stance_core::corpus::{Dataset, ProfileField, UserNetworkProfile};
use stance_core::eval::{score_semeval, EvalReport, StanceScores};
use stance_core::features::{Family, FeatureSetSelector};
use stance_core::svm::{LinearModel, Mode, TrainConfig};
use stance_core::synth::slug;
use stance_core::StanceLabel;

use crate::error::{Error, Result};
use crate::io::{write_predictions, PredictionRow};
use crate::pipeline::{cross_validate, load_dataset, predict_indices, subset, train_topic};
use crate::report::{
    fmt_score, format_confusion, format_table, write_confusion_csv, write_consistency_csv, write_curve_csv,
    write_histogram_csv, write_rankings_csv, TableRow,
};

/// The feature-set rows of the default matrix, text and network
/// families alone and combined.
pub const DEFAULT_SELECTORS: [&str; 11] = [
    "TXT",
    "IN_AT",
    "IN_DM",
    "IN_AT+IN_DM",
    "PN_AT",
    "PN_DM",
    "PN_AT+PN_DM",
    "CN_FR",
    "CN_FL",
    "CN_FR+CN_FL",
    "TXT+IN_AT+IN_DM",
];

pub const DEFAULT_OVERLAP_PAIRS: [(ProfileField, ProfileField); 4] = [
    (ProfileField::InMentions, ProfileField::PnMentions),
    (ProfileField::InMentions, ProfileField::CnFriends),
    (ProfileField::PnMentions, ProfileField::CnFriends),
    (ProfileField::InDomains, ProfileField::PnDomains),
];

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub selectors: Vec<FeatureSetSelector>,
    pub modes: Vec<Mode>,
    pub train: PathBuf,
    pub test: PathBuf,
    pub profiles: Option<PathBuf>,
    /// Its seed also drives the cross-validation folds.
    pub config: TrainConfig,
    pub min_df: usize,
    pub out: PathBuf,
    pub jobs: usize,
    /// Run k-fold cross-validation on the training data of every cell.
    pub folds: Option<usize>,
    pub keep_unprofiled: bool,
    pub top_n: usize,
    pub curve_max: usize,
    pub bin_width: u32,
}

impl ExperimentSpec {
    pub fn new(train: impl Into<PathBuf>, test: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            selectors: DEFAULT_SELECTORS.iter().map(|s| s.parse().expect("valid default selector")).collect(),
            modes: vec![Mode::Ternary, Mode::Binary],
            train: train.into(),
            test: test.into(),
            profiles: None,
            config: TrainConfig::default(),
            min_df: 1,
            out: out.into(),
            jobs: 1,
            folds: None,
            keep_unprofiled: false,
            top_n: 20,
            curve_max: 1000,
            bin_width: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.selectors.is_empty() {
            return Err(Error::Usage("at least one selector is required".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Usage("at least one mode is required".into()));
        }
        if self.top_n == 0 || self.curve_max == 0 {
            return Err(Error::Usage("--top-n and --curve-max must be at least 1".into()));
        }
        if matches!(self.folds, Some(k) if k < 2) {
            return Err(Error::Usage("--folds must be at least 2".into()));
        }
        self.config.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellKey {
    pub mode: Mode,
    pub selector: FeatureSetSelector,
    pub topic: String,
}

#[derive(Debug, Clone)]
pub struct CellOk {
    pub model: LinearModel,
    /// Test indices of the cell's topic and their predictions.
    pub test_indices: Vec<usize>,
    pub predictions: Vec<StanceLabel>,
    /// Scores on the cell's own test instances.
    pub report: EvalReport,
    pub cv: Option<Vec<StanceScores>>,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub key: CellKey,
    pub n_train: usize,
    pub n_test: usize,
    pub outcome: std::result::Result<CellOk, String>,
}

/// Pooled result of one (mode, selector) row across topics.
#[derive(Debug, Clone)]
pub struct RowSummary {
    pub mode: Mode,
    pub selector: FeatureSetSelector,
    /// Present only when every topic cell succeeded.
    pub report: Option<EvalReport>,
    /// Predictions aligned with the test dataset, when `report` is present.
    pub predictions: Option<Vec<StanceLabel>>,
    pub failed_topics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Matrix {
    pub topics: Vec<String>,
    pub cells: Vec<CellResult>,
    pub rows: Vec<RowSummary>,
}

impl Matrix {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }

    pub fn row(&self, mode: Mode, selector: FeatureSetSelector) -> Option<&RowSummary> {
        self.rows.iter().find(|r| r.mode == mode && r.selector == selector)
    }
}

fn run_cell(train: &Dataset, test: &Dataset, key: &CellKey, spec: &ExperimentSpec) -> CellResult {
    let n_train = train.topic_indices(&key.topic).len();
    let test_indices = test.topic_indices(&key.topic);
    let n_test = test_indices.len();
    let outcome = (|| -> Result<CellOk> {
        let model = train_topic(train, &key.topic, key.selector, key.mode, &spec.config, spec.min_df)?;
        let cv = match spec.folds {
            Some(k) => Some(cross_validate(train, &key.topic, key.selector, key.mode, &spec.config, spec.min_df, k)?),
            None => None,
        };
        let predictions = predict_indices(&model, test, &test_indices)?;
        let gold: Vec<StanceLabel> = test_indices.iter().map(|&i| test.instances[i].label).collect();
        let report = score_semeval(&gold, &predictions, &vec![key.topic.as_str(); gold.len()])?;
        Ok(CellOk { model, test_indices, predictions, report, cv })
    })()
    .map_err(|e| {
        log::warn!("cell {} {} {} failed: {e}", key.mode, key.selector, key.topic);
        e.to_string()
    });
    CellResult { key: key.clone(), n_train, n_test, outcome }
}

/// Runs every cell on in-memory datasets. Test instances of topics absent
/// from training are ignored, so callers should pass a test set restricted
/// to training topics (see [`run_experiment`]).
pub fn run_matrix(train: &Dataset, test: &Dataset, spec: &ExperimentSpec) -> Result<Matrix> {
    spec.validate()?;
    let topics = train.topics.clone();
    let mut keys = Vec::new();
    for &mode in &spec.modes {
        for &selector in &spec.selectors {
            for topic in &topics {
                keys.push(CellKey { mode, selector, topic: topic.clone() });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {} worker threads: {e}", spec.jobs)))?;
    let cells: Vec<CellResult> = pool.install(|| keys.par_iter().map(|k| run_cell(train, test, k, spec)).collect());

    let gold = test.labels();
    let test_topics: Vec<&str> = test.instances.iter().map(|i| i.topic.as_str()).collect();
    let mut rows = Vec::new();
    for &mode in &spec.modes {
        for &selector in &spec.selectors {
            let mine: Vec<&CellResult> =
                cells.iter().filter(|c| c.key.mode == mode && c.key.selector == selector).collect();
            let failed_topics: Vec<String> =
                mine.iter().filter(|c| c.outcome.is_err()).map(|c| c.key.topic.clone()).collect();
            let (report, predictions) = if failed_topics.is_empty() {
                let mut pred = vec![StanceLabel::None; test.instances.len()];
                let mut covered = vec![false; test.instances.len()];
                for c in &mine {
                    let ok = c.outcome.as_ref().expect("checked above");
                    for (&i, &p) in ok.test_indices.iter().zip(&ok.predictions) {
                        pred[i] = p;
                        covered[i] = true;
                    }
                }
                let idx: Vec<usize> = (0..pred.len()).filter(|&i| covered[i]).collect();
                let g: Vec<StanceLabel> = idx.iter().map(|&i| gold[i]).collect();
                let p: Vec<StanceLabel> = idx.iter().map(|&i| pred[i]).collect();
                let t: Vec<&str> = idx.iter().map(|&i| test_topics[i]).collect();
                (Some(score_semeval(&g, &p, &t)?), Some(pred))
            } else {
                (None, None)
            };
            rows.push(RowSummary { mode, selector, report, predictions, failed_topics });
        }
    }
    Ok(Matrix { topics, cells, rows })
}

pub struct ExperimentOutcome {
    pub matrix: Matrix,
    pub train: Dataset,
    pub test: Dataset,
}

/// Loads the spec's files, runs the matrix and writes every output. Returns
/// [`Error::CellsFailed`] after writing when any cell failed.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let profiles = spec.profiles.as_deref();
    let (train, _) = load_dataset(&spec.train, profiles, &spec.selectors, spec.keep_unprofiled)?;
    let (test, _) = load_dataset(&spec.test, profiles, &spec.selectors, spec.keep_unprofiled)?;
    let train_topics: BTreeSet<&str> = train.topics.iter().map(String::as_str).collect();
    let keep: Vec<usize> = (0..test.instances.len())
        .filter(|&i| train_topics.contains(test.instances[i].topic.as_str()))
        .collect();
    if keep.len() < test.instances.len() {
        log::warn!("ignoring {} test instances of topics without training data", test.instances.len() - keep.len());
    }
    let test = subset(&test, &keep);
    let matrix = run_matrix(&train, &test, spec)?;
    write_outputs(spec, &train, &test, &matrix)?;
    let failed = matrix.failed();
    if failed > 0 {
        return Err(Error::CellsFailed { failed, total: matrix.cells.len() });
    }
    Ok(ExperimentOutcome { matrix, train, test })
}

fn row_label(mode: Mode, selector: FeatureSetSelector) -> String {
    format!("{mode}/{selector}")
}

fn collapsed(report: &EvalReport) -> String {
    report
        .collapsed_classes()
        .iter()
        .map(|(t, c)| format!("{t}:{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn master_csv(matrix: &Matrix) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["mode".to_string(), "selector".to_string()];
    header.extend(matrix.topics.iter().cloned());
    header.extend(["F_favor", "F_against", "F_avg", "collapsed", "status"].map(String::from));
    w.write_record(&header)?;
    for row in &matrix.rows {
        let mut rec = vec![row.mode.to_string(), row.selector.to_string()];
        for topic in &matrix.topics {
            let cell = matrix
                .cells
                .iter()
                .find(|c| c.key.mode == row.mode && c.key.selector == row.selector && &c.key.topic == topic);
            let value = match cell.map(|c| &c.outcome) {
                Some(Ok(ok)) => fmt_score(ok.report.overall.f_avg),
                _ => String::new(),
            };
            rec.push(value);
        }
        match &row.report {
            Some(rep) => {
                let o = rep.overall;
                rec.extend([fmt_score(o.f_favor), fmt_score(o.f_against), fmt_score(o.f_avg), collapsed(rep)]);
                rec.push("ok".into());
            }
            None => {
                rec.extend([String::new(), String::new(), String::new(), String::new()]);
                rec.push(format!("failed:{}", row.failed_topics.join(";")));
            }
        }
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

pub fn cells_csv(matrix: &Matrix) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "mode", "selector", "topic", "n_train", "n_test", "features", "F_favor", "F_against", "F_avg", "cv_folds",
        "cv_F_avg_mean", "cv_F_avg_sd", "collapsed", "status",
    ])?;
    for c in &matrix.cells {
        let mut rec = vec![
            c.key.mode.to_string(),
            c.key.selector.to_string(),
            c.key.topic.clone(),
            c.n_train.to_string(),
            c.n_test.to_string(),
        ];
        match &c.outcome {
            Ok(ok) => {
                let rep = &ok.report;
                let s = rep.overall;
                rec.extend([
                    ok.model.space().len().to_string(),
                    fmt_score(s.f_favor),
                    fmt_score(s.f_against),
                    fmt_score(s.f_avg),
                ]);
                match &ok.cv {
                    Some(cv) => {
                        let (m, sd) = mean_sd(&cv.iter().map(|s| s.f_avg).collect::<Vec<_>>());
                        rec.extend([cv.len().to_string(), fmt_score(m), fmt_score(sd)]);
                    }
                    None => rec.extend([String::new(), String::new(), String::new()]),
                }
                rec.push(collapsed(rep));
                rec.push("ok".into());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 8));
                rec.push(format!("failed: {e}"));
            }
        }
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

pub fn report_text(matrix: &Matrix, spec: &ExperimentSpec) -> String {
    let mut out = String::new();
    for &mode in &spec.modes {
        let rows: Vec<TableRow<'_>> = matrix
            .rows
            .iter()
            .filter(|r| r.mode == mode)
            .map(|r| TableRow { label: r.selector.to_string(), report: r.report.as_ref() })
            .collect();
        let title = match mode {
            Mode::Ternary => "F-score (%) per topic and overall, SVM trained on three classes",
            Mode::Binary => "F-score (%) per topic and overall, binary SVM (None removed from training)",
        };
        out.push_str(&format_table(title, &matrix.topics, &rows));
        out.push('\n');
    }
    for &mode in &spec.modes {
        let best = matrix
            .rows
            .iter()
            .filter(|r| r.mode == mode)
            .filter_map(|r| r.report.as_ref().map(|rep| (r, rep)))
            .fold(None::<(&RowSummary, &EvalReport)>, |acc, cur| match acc {
                Some(a) if a.1.overall.f_avg >= cur.1.overall.f_avg => Some(a),
                _ => Some(cur),
            });
        if let Some((row, rep)) = best {
            let _ = writeln!(out, "Confusion matrix of the best {mode} model ({}):", row.selector);
            out.push_str(&format_confusion(&rep.confusion));
            out.push('\n');
        }
    }
    for row in &matrix.rows {
        if let Some(rep) = &row.report {
            let c = collapsed(rep);
            if !c.is_empty() {
                let _ = writeln!(out, "Collapse: {} never recovers {c}", row_label(row.mode, row.selector));
            }
        }
    }
    out
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_outputs(spec: &ExperimentSpec, train: &Dataset, test: &Dataset, matrix: &Matrix) -> Result<()> {
    let out = &spec.out;
    write_bytes(&out.join("master.csv"), &master_csv(matrix)?)?;
    write_bytes(&out.join("cells.csv"), &cells_csv(matrix)?)?;
    write_bytes(&out.join("report.txt"), report_text(matrix, spec).as_bytes())?;
    for row in &matrix.rows {
        let (Some(rep), Some(pred)) = (&row.report, &row.predictions) else { continue };
        let name = row.selector.to_string();
        let rows: Vec<PredictionRow> = test
            .instances
            .iter()
            .zip(pred)
            .map(|(i, &p)| PredictionRow { tweet_id: i.tweet_id.clone(), topic: i.topic.clone(), gold: i.label, pred: p })
            .collect();
        write_predictions(&out.join("predictions").join(row.mode.to_string()).join(format!("{name}.tsv")), &rows)?;
        write_confusion_csv(&out.join("confusion").join(row.mode.to_string()).join(format!("{name}.csv")), rep)?;
    }
    write_analysis(spec, train, test, matrix)
}

/// Writes one histogram per field pair plus `summary.csv` into `dir`.
/// Returns false, writing nothing, when every profile is empty.
pub fn write_overlap<'a>(
    dir: &Path,
    profiles: impl IntoIterator<Item = &'a UserNetworkProfile>,
    pairs: &[(ProfileField, ProfileField)],
    bin_width: u32,
) -> Result<bool> {
    let mut by_user: BTreeMap<&str, &UserNetworkProfile> = BTreeMap::new();
    for p in profiles {
        by_user.insert(p.user_id.as_str(), p);
    }
    if by_user.values().all(|p| p.is_empty()) {
        return Ok(false);
    }
    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record(["pair", "users", "excluded", "mean_jaccard"])?;
    for &pair in pairs {
        let dist = network_overlap(by_user.values().copied(), pair)?;
        write_histogram_csv(&dir.join(format!("{}-vs-{}.csv", pair.0, pair.1)), &dist.histogram(bin_width))?;
        summary.write_record([
            dist.pair_name.clone(),
            dist.values.len().to_string(),
            dist.excluded.to_string(),
            fmt_score(dist.mean()),
        ])?;
    }
    let bytes = summary.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    write_bytes(&dir.join("summary.csv"), &bytes)?;
    Ok(true)
}

/// Top-`top_n` features per class of each model, one CSV per model at
/// `<dir>/<topic>/<mode>/<selector>.csv`.
pub fn write_rankings(dir: &Path, models: &[&LinearModel], top_n: usize) -> Result<()> {
    for model in models {
        let mut ranked = Vec::new();
        for &class in model.classes() {
            ranked.push(top_features(model, class, model.topic(), top_n)?);
        }
        let path = dir
            .join(slug(model.topic()))
            .join(model.mode().to_string())
            .join(format!("{}.csv", model.space().selector()));
        write_rankings_csv(&path, &ranked)?;
    }
    Ok(())
}

/// Network group of a selector when all its families belong to one of
/// IN, PN or CN.
pub fn network_group(selector: FeatureSetSelector) -> Option<&'static str> {
    let groups: [(&str, [Family; 2]); 3] = [
        ("IN", [Family::InAt, Family::InDm]),
        ("PN", [Family::PnAt, Family::PnDm]),
        ("CN", [Family::CnFr, Family::CnFl]),
    ];
    groups.into_iter().find(|(_, fams)| selector.families().all(|f| fams.contains(&f))).map(|(name, _)| name)
}

/// Widest model per network group, keyed by (topic, mode).
type GroupSlots<'a> = BTreeMap<(String, String), BTreeMap<&'a str, (usize, &'a LinearModel)>>;

/// Top-N overlap curves between the IN, PN and CN models of each
/// (topic, mode), one CSV per polar class at `<dir>/<topic>-<mode>-<class>.csv`.
/// Each group is represented by its widest selector, the first one winning
/// ties. Returns the number of files written.
pub fn write_curves(dir: &Path, models: &[&LinearModel], n_max: usize) -> Result<usize> {
    let mut groups: GroupSlots = BTreeMap::new();
    for model in models {
        let Some(group) = network_group(model.space().selector()) else { continue };
        let width = model.space().selector().families().count();
        let slot = groups.entry((model.topic().to_string(), model.mode().to_string())).or_default();
        if slot.get(group).is_none_or(|(w, _)| width > *w) {
            slot.insert(group, (width, model));
        }
    }
    let mut written = 0;
    for ((topic, mode), chosen) in groups {
        if chosen.len() < 2 {
            continue;
        }
        for class in [StanceLabel::Favor, StanceLabel::Against] {
            let lists: Vec<(&str, Vec<String>)> = chosen
                .iter()
                .map(|(g, (_, m))| {
                    let r = top_features(m, class, &topic, m.space().len())?;
                    Ok((*g, r.entries.into_iter().map(|(f, _)| f).collect()))
                })
                .collect::<Result<_>>()?;
            let refs: Vec<(&str, &[String])> = lists.iter().map(|(g, l)| (*g, l.as_slice())).collect();
            let curve = topn_overlap_curve(&refs, n_max)?;
            let name = format!("{}-{mode}-{}.csv", slug(&topic), class.as_str().to_ascii_lowercase());
            write_curve_csv(&dir.join(name), &curve)?;
            written += 1;
        }
    }
    Ok(written)
}

fn write_analysis(spec: &ExperimentSpec, train: &Dataset, test: &Dataset, matrix: &Matrix) -> Result<()> {
    let dir = spec.out.join("analysis");
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let profiles = train.profiles.values().chain(test.profiles.values());
    write_overlap(&dir.join("overlap"), profiles, &DEFAULT_OVERLAP_PAIRS, spec.bin_width)?;

    let models: Vec<&LinearModel> =
        matrix.cells.iter().filter_map(|c| c.outcome.as_ref().ok()).map(|ok| &ok.model).collect();
    write_rankings(&dir.join("rankings"), &models, spec.top_n)?;
    write_curves(&dir.join("curves"), &models, spec.curve_max)?;

    let mut consistency = vec![("gold".to_string(), user_consistency(test, &test.labels())?)];
    for row in &matrix.rows {
        if let Some(pred) = &row.predictions {
            consistency.push((row_label(row.mode, row.selector), user_consistency(test, pred)?));
        }
    }
    write_consistency_csv(&dir.join("consistency.csv"), &consistency)
}
