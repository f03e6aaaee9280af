//! Scoring prediction files and comparing two systems.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use stance_core::eval::{score_semeval, EvalReport};
use stance_core::features::FeatureSetSelector;
use stance_core::stats::{mann_whitney_u, paired_t_test, TTest, UTest};
use stance_core::svm::{LinearModel, Mode};

use crate::bundle;
use crate::error::{Error, Result};
use crate::io::PredictionRow;
use crate::pipeline::{load_dataset, predict_dataset};

pub fn score_rows(rows: &[PredictionRow]) -> Result<EvalReport> {
    let gold: Vec<_> = rows.iter().map(|r| r.gold).collect();
    let pred: Vec<_> = rows.iter().map(|r| r.pred).collect();
    let topics: Vec<&str> = rows.iter().map(|r| r.topic.as_str()).collect();
    Ok(score_semeval(&gold, &pred, &topics)?)
}

/// Loads the bundles under `root`, optionally keeping only one selector
/// and/or mode. Every topic must end up with exactly one model.
pub fn load_models(
    root: &Path,
    selector: Option<FeatureSetSelector>,
    mode: Option<Mode>,
) -> Result<BTreeMap<String, LinearModel>> {
    let dirs = bundle::discover(root)?;
    if dirs.is_empty() {
        return Err(Error::Data(format!("no model bundles under {}", root.display())));
    }
    let mut models = BTreeMap::new();
    let mut selectors = Vec::new();
    for dir in dirs {
        let model = bundle::load(&dir)?;
        if mode.is_some_and(|m| m != model.mode()) {
            continue;
        }
        let sel = model.space().selector();
        selectors.push(sel);
        if selector.is_some_and(|s| s != sel) {
            continue;
        }
        if let Some(prev) = models.insert(model.topic().to_string(), model) {
            return Err(Error::Usage(format!(
                "several bundles for topic '{}' under {}; narrow with --selector/--mode",
                prev.topic(),
                root.display()
            )));
        }
    }
    if models.is_empty() {
        let found: Vec<String> = selectors.iter().map(|s| s.to_string()).collect();
        return Err(Error::Data(format!(
            "feature-space mismatch: no bundle under {} matches the requested selector/mode (found {})",
            root.display(),
            found.join(", ")
        )));
    }
    Ok(models)
}

/// Predicts a tweets file with per-topic bundles.
pub fn predict_with_models(
    models: &BTreeMap<String, LinearModel>,
    tweets: &Path,
    profiles: Option<&Path>,
    keep_unprofiled: bool,
) -> Result<Vec<PredictionRow>> {
    let selectors: Vec<FeatureSetSelector> = models.values().map(|m| m.space().selector()).collect();
    let (dataset, _) = load_dataset(tweets, profiles, &selectors, keep_unprofiled)?;
    let pred = predict_dataset(models, &dataset)?;
    Ok(dataset
        .instances
        .iter()
        .zip(pred)
        .map(|(i, p)| PredictionRow { tweet_id: i.tweet_id.clone(), topic: i.topic.clone(), gold: i.label, pred: p })
        .collect())
}

/// What one paired observation is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairUnit {
    /// Per-topic F_avg.
    Topic,
    /// Per-instance correctness, 1 or 0.
    Instance,
}

impl fmt::Display for PairUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairUnit::Topic => "topic",
            PairUnit::Instance => "instance",
        })
    }
}

impl FromStr for PairUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "topic" => Ok(PairUnit::Topic),
            "instance" => Ok(PairUnit::Instance),
            other => Err(Error::Usage(format!("unknown pairing unit '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub unit: PairUnit,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Undefined tests carry the reason instead.
    pub t_test: std::result::Result<TTest, String>,
    pub u_test: std::result::Result<UTest, String>,
}

/// Pairs the two systems' per-unit scores and runs both tests.
pub fn compare(a: &[PredictionRow], b: &[PredictionRow], unit: PairUnit) -> Result<Comparison> {
    let (xa, xb) = match unit {
        PairUnit::Topic => {
            let ra = score_rows(a)?;
            let rb = score_rows(b)?;
            if ra.per_topic.keys().ne(rb.per_topic.keys()) {
                return Err(Error::Data("the two systems cover different topics".into()));
            }
            ra.per_topic
                .iter()
                .zip(&rb.per_topic)
                .map(|((_, x), (_, y))| (x.scores.f_avg, y.scores.f_avg))
                .unzip()
        }
        PairUnit::Instance => {
            let by_id: BTreeMap<&str, &PredictionRow> = b.iter().map(|r| (r.tweet_id.as_str(), r)).collect();
            if by_id.len() != a.len() || b.len() != a.len() {
                return Err(Error::Data("the two systems cover different instances".into()));
            }
            let mut xa = Vec::with_capacity(a.len());
            let mut xb = Vec::with_capacity(a.len());
            for r in a {
                let other = by_id
                    .get(r.tweet_id.as_str())
                    .ok_or_else(|| Error::Data(format!("instance '{}' missing from the second system", r.tweet_id)))?;
                if other.gold != r.gold {
                    return Err(Error::Data(format!("gold labels disagree on instance '{}'", r.tweet_id)));
                }
                xa.push(if r.pred == r.gold { 1.0 } else { 0.0 });
                xb.push(if other.pred == other.gold { 1.0 } else { 0.0 });
            }
            (xa, xb)
        }
    };
    let t_test = paired_t_test(&xa, &xb).map_err(|e| e.to_string());
    let u_test = mann_whitney_u(&xa, &xb).map_err(|e| e.to_string());
    Ok(Comparison { unit, a: xa, b: xb, t_test, u_test })
}

pub fn comparison_csv(c: &Comparison) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["test", "unit", "n", "statistic", "p_value", "note"])?;
    let n = c.a.len().to_string();
    let unit = c.unit.to_string();
    match &c.t_test {
        Ok(t) => w.write_record(["paired_t", &unit, &n, &format!("{:.6}", t.t), &format!("{:.6}", t.p_value), &format!("dof={}", t.dof)])?,
        Err(e) => w.write_record(["paired_t", &unit, &n, "", "", e])?,
    }
    match &c.u_test {
        Ok(u) => w.write_record([
            "mann_whitney_u",
            &unit,
            &n,
            &format!("{:.6}", u.u),
            &format!("{:.6}", u.p_value),
            &format!("{:?}", u.method).to_lowercase(),
        ])?,
        Err(e) => w.write_record(["mann_whitney_u", &unit, &n, "", "", e])?,
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}
