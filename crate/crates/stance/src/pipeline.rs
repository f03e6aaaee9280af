//! Loading, featurizing, training and predicting over whole datasets.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use stance_core::corpus::{join, Dataset, UserNetworkProfile};
use stance_core::eval::{kfold, score_semeval, StanceScores};
use stance_core::features::{extract_features, FeatureSetSelector, FeatureSpace, SparseBooleanVector};
use stance_core::svm::{train_ovr, LinearModel, Mode, TrainConfig};
use stance_core::StanceLabel;

use crate::error::{Error, Result};
use crate::io::{load_network_profiles, load_semeval_tsv};

/// How tweets and profiles were combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub instances: usize,
    /// Instances dropped because their author had no profile.
    pub dropped: usize,
    pub duplicate_profiles: usize,
}

/// Loads tweets and, when given, profiles.
///
/// With a profiles file, instances of unprofiled authors are dropped unless
/// `keep_unprofiled` is set, so every selector sees the same instances.
/// Without one, all authors get empty profiles; a selector that needs
/// profiles is rejected before anything is read.
pub fn load_dataset(
    tweets: &Path,
    profiles: Option<&Path>,
    selectors: &[FeatureSetSelector],
    keep_unprofiled: bool,
) -> Result<(Dataset, LoadStats)> {
    if profiles.is_none() {
        if let Some(s) = selectors.iter().find(|s| s.needs_profiles()) {
            return Err(Error::Usage(format!("selector {s} needs a --profiles file")));
        }
    }
    if let Some(p) = profiles {
        if !p.is_file() {
            return Err(Error::io(p, std::io::Error::new(std::io::ErrorKind::NotFound, "profiles file not found")));
        }
    }
    let instances = load_semeval_tsv(tweets)?;
    let n = instances.len();
    let (profiles, duplicates) = match profiles {
        Some(p) => {
            let load = load_network_profiles(p)?;
            (load.profiles, load.duplicates)
        }
        None => (BTreeMap::new(), 0),
    };
    let require = !profiles.is_empty() && !keep_unprofiled;
    let joined = join(instances, &profiles, require);
    if joined.dropped > 0 {
        log::info!("{}: dropped {} of {n} instances without a profile", tweets.display(), joined.dropped);
    }
    let stats = LoadStats { instances: joined.dataset.instances.len(), dropped: joined.dropped, duplicate_profiles: duplicates };
    Ok((joined.dataset, stats))
}

/// Feature sets of `dataset.instances[i]` for each `i` in `indices`.
pub fn featurize(dataset: &Dataset, indices: &[usize], selector: FeatureSetSelector) -> Vec<BTreeSet<String>> {
    indices
        .iter()
        .map(|&i| {
            let inst = &dataset.instances[i];
            match dataset.profile_of(inst) {
                Some(p) => extract_features(inst, p, selector),
                None => extract_features(inst, &UserNetworkProfile::empty(inst.author_id.clone()), selector),
            }
        })
        .collect()
}

/// Trains one model on the instances at `indices`.
pub fn train_on(
    dataset: &Dataset,
    indices: &[usize],
    topic: &str,
    selector: FeatureSetSelector,
    mode: Mode,
    config: &TrainConfig,
    min_df: usize,
) -> Result<LinearModel> {
    let sets = featurize(dataset, indices, selector);
    let sets_for_space: Vec<BTreeSet<String>> = match mode {
        // None instances play no part in a binary fit, so they do not get
        // to add columns either.
        Mode::Binary => sets
            .iter()
            .zip(indices)
            .filter(|(_, &i)| dataset.instances[i].label.is_polar())
            .map(|(s, _)| s.clone())
            .collect(),
        Mode::Ternary => sets.clone(),
    };
    let space = FeatureSpace::build(&sets_for_space, selector, min_df)?;
    let vectors: Vec<SparseBooleanVector> = sets.iter().map(|s| space.vectorize(s)).collect();
    let labels: Vec<StanceLabel> = indices.iter().map(|&i| dataset.instances[i].label).collect();
    Ok(train_ovr(&vectors, &labels, mode, config, &space, topic)?)
}

/// Trains the per-topic model for `topic` on all of its instances.
pub fn train_topic(
    dataset: &Dataset,
    topic: &str,
    selector: FeatureSetSelector,
    mode: Mode,
    config: &TrainConfig,
    min_df: usize,
) -> Result<LinearModel> {
    let indices = dataset.topic_indices(topic);
    if indices.is_empty() {
        return Err(Error::Data(format!("no training instances for topic '{topic}'")));
    }
    train_on(dataset, &indices, topic, selector, mode, config, min_df)
}

pub fn predict_indices(model: &LinearModel, dataset: &Dataset, indices: &[usize]) -> Result<Vec<StanceLabel>> {
    featurize(dataset, indices, model.space().selector())
        .iter()
        .map(|s| Ok(model.predict(&model.space().vectorize(s))?))
        .collect()
}

/// Predicts every instance with the model of its topic.
pub fn predict_dataset(models: &BTreeMap<String, LinearModel>, dataset: &Dataset) -> Result<Vec<StanceLabel>> {
    let mut out = vec![StanceLabel::None; dataset.instances.len()];
    for topic in &dataset.topics {
        let model = models
            .get(topic)
            .ok_or_else(|| Error::Data(format!("no model for topic '{topic}'")))?;
        let indices = dataset.topic_indices(topic);
        for (i, p) in indices.iter().zip(predict_indices(model, dataset, &indices)?) {
            out[*i] = p;
        }
    }
    Ok(out)
}

/// Scores of a `k`-fold cross-validation over one topic's training data.
pub fn cross_validate(
    dataset: &Dataset,
    topic: &str,
    selector: FeatureSetSelector,
    mode: Mode,
    config: &TrainConfig,
    min_df: usize,
    k: usize,
) -> Result<Vec<StanceScores>> {
    let indices = dataset.topic_indices(topic);
    let plan = kfold(indices.len(), k, config.seed)?;
    let mut out = Vec::with_capacity(k);
    for fold in 0..k {
        let train: Vec<usize> = plan.train_indices(fold).into_iter().map(|j| indices[j]).collect();
        let test: Vec<usize> = plan.test_indices(fold).into_iter().map(|j| indices[j]).collect();
        let model = train_on(dataset, &train, topic, selector, mode, config, min_df)?;
        let pred = predict_indices(&model, dataset, &test)?;
        let gold: Vec<StanceLabel> = test.iter().map(|&i| dataset.instances[i].label).collect();
        let topics = vec![topic; test.len()];
        out.push(score_semeval(&gold, &pred, &topics)?.overall);
    }
    Ok(out)
}

/// Copy of `dataset` restricted to the instances at `indices`.
pub fn subset(dataset: &Dataset, indices: &[usize]) -> Dataset {
    let instances: Vec<_> = indices.iter().map(|&i| dataset.instances[i].clone()).collect();
    let profiles = instances
        .iter()
        .filter_map(|i| dataset.profiles.get(&i.author_id).map(|p| (i.author_id.clone(), p.clone())))
        .collect();
    let topics: BTreeSet<String> = instances.iter().map(|i| i.topic.clone()).collect();
    Dataset { instances, profiles, topics: topics.into_iter().collect() }
}
