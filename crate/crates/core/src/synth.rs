//! Seeded synthetic corpora with planted network homophily.
//!
//! Each user gets a latent stance per topic. Every network set is filled by
//! draws that come, with probability `homophily`, from a pool owned by the
//! user's stance community and otherwise from a pool shared by everyone on the
//! topic. Users without a stance only ever draw from the shared pool. Tweets
//! are bags of generic words; with probability `text_signal` a tweet also
//! carries a stance-indicative word. Silent users post empty tweets but keep
//! their full profiles.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Dataset, LabeledInstance, ProfileField, UserNetworkProfile};
use crate::error::{Error, Result};
use crate::label::StanceLabel;

/// Relative weights of Favor, Against and None; normalized when sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancePrior {
    pub favor: f64,
    pub against: f64,
    pub none: f64,
}

impl StancePrior {
    pub fn new(favor: f64, against: f64, none: f64) -> Self {
        StancePrior { favor, against, none }
    }

    fn validate(&self) -> Result<()> {
        let parts = [self.favor, self.against, self.none];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) || parts.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidConfig(format!("invalid stance prior {self:?}")));
        }
        Ok(())
    }

    /// Normalized probability of `label`.
    pub fn probability(&self, label: StanceLabel) -> f64 {
        let total = self.favor + self.against + self.none;
        match label {
            StanceLabel::Favor => self.favor / total,
            StanceLabel::Against => self.against / total,
            StanceLabel::None => self.none / total,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> StanceLabel {
        let total = self.favor + self.against + self.none;
        let u = rng.gen::<f64>() * total;
        if u < self.favor {
            StanceLabel::Favor
        } else if u < self.favor + self.against {
            StanceLabel::Against
        } else {
            StanceLabel::None
        }
    }
}

impl Default for StancePrior {
    fn default() -> Self {
        StancePrior::new(0.4, 0.4, 0.2)
    }
}

/// Pool sizes for one network family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolSizes {
    /// Items owned by each stance community.
    pub community: usize,
    /// Items shared by all users of a topic.
    pub shared: usize,
    /// Draws per user (duplicates collapse, so sets may be smaller).
    pub draws: usize,
}

impl Default for PoolSizes {
    fn default() -> Self {
        PoolSizes { community: 30, shared: 60, draws: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub topics: Vec<String>,
    pub users_per_topic: usize,
    pub tweets_per_user: usize,
    /// One prior per topic, or a single prior used for every topic.
    pub stance_priors: Vec<StancePrior>,
    pub homophily: f64,
    pub text_signal: f64,
    pub silent_fraction: f64,
    /// Indexed like [`ProfileField::ALL`].
    pub pools: [PoolSizes; 6],
    pub generic_vocab: usize,
    pub stance_vocab: usize,
    pub words_per_tweet: usize,
    /// Fraction of each topic's users placed in the training split.
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            topics: ["Atheism", "Climate Change", "Feminist Movement", "Hillary Clinton", "Legalization of Abortion"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            users_per_topic: 200,
            tweets_per_user: 3,
            stance_priors: alloc::vec![StancePrior::default()],
            homophily: 0.9,
            text_signal: 0.5,
            silent_fraction: 0.3,
            pools: [PoolSizes::default(); 6],
            generic_vocab: 300,
            stance_vocab: 20,
            words_per_tweet: 8,
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.topics.is_empty() || self.topics.iter().any(|t| t.trim().is_empty()) {
            return bad("topics must be non-empty names");
        }
        let unique: BTreeSet<String> = self.topics.iter().map(|t| slug(t)).collect();
        if unique.len() != self.topics.len() {
            return bad("topic names must be distinct");
        }
        if self.users_per_topic < 2 || self.tweets_per_user == 0 {
            return bad("need at least two users per topic and one tweet per user");
        }
        if self.stance_priors.len() != 1 && self.stance_priors.len() != self.topics.len() {
            return bad("give one stance prior, or one per topic");
        }
        for p in &self.stance_priors {
            p.validate()?;
        }
        for (name, v) in [
            ("homophily", self.homophily),
            ("text_signal", self.text_signal),
            ("silent_fraction", self.silent_fraction),
            ("train_fraction", self.train_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        if self.pools.iter().any(|p| p.community == 0 || p.shared == 0) {
            return bad("pool sizes must be at least 1");
        }
        if self.generic_vocab == 0 || self.stance_vocab == 0 {
            return bad("vocabulary sizes must be at least 1");
        }
        Ok(())
    }

    pub fn prior_for(&self, topic_index: usize) -> StancePrior {
        if self.stance_priors.len() == 1 {
            self.stance_priors[0]
        } else {
            self.stance_priors[topic_index]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    pub user_id: String,
    pub topic: String,
    pub latent_stance: StanceLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub train: Dataset,
    pub test: Dataset,
    pub manifest: Vec<ManifestRow>,
}

/// Lowercase ASCII slug with `-` separators.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.trim().chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

fn family_tag(field: ProfileField) -> &'static str {
    match field {
        ProfileField::InMentions => "in",
        ProfileField::InDomains => "ind",
        ProfileField::PnMentions => "pn",
        ProfileField::PnDomains => "pnd",
        ProfileField::CnFriends => "fr",
        ProfileField::CnFollowers => "fl",
    }
}

fn community_tag(stance: Option<StanceLabel>) -> &'static str {
    match stance {
        Some(StanceLabel::Favor) => "fav",
        Some(StanceLabel::Against) => "ag",
        _ => "sh",
    }
}

/// Account or domain name of item `j` of a pool. `stance = None` is the
/// shared pool.
fn pool_item(topic_slug: &str, field: ProfileField, stance: Option<StanceLabel>, j: usize) -> String {
    let fam = family_tag(field);
    let com = community_tag(stance);
    if field.is_domain() {
        format!("{com}{j}.{fam}.{topic_slug}.example")
    } else {
        format!("{}_{fam}_{com}{j}", topic_slug.replace('-', "_"))
    }
}

struct User {
    id: String,
    profile: UserNetworkProfile,
    tweets: Vec<LabeledInstance>,
}

/// Generates a train/test corpus split by user.
pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut train_users = Vec::new();
    let mut test_users = Vec::new();
    let mut manifest = Vec::new();

    for (ti, topic) in config.topics.iter().enumerate() {
        let topic_slug = slug(topic);
        let prior = config.prior_for(ti);
        let mut users = Vec::with_capacity(config.users_per_topic);
        for u in 0..config.users_per_topic {
            let id = format!("{topic_slug}-u{u:04}");
            let stance = prior.sample(&mut rng);
            let silent = rng.gen::<f64>() < config.silent_fraction;
            let mut profile = UserNetworkProfile::empty(id.clone());
            for (field, pools) in ProfileField::ALL.into_iter().zip(config.pools) {
                for _ in 0..pools.draws {
                    let from_community = stance.is_polar() && rng.gen::<f64>() < config.homophily;
                    let item = if from_community {
                        pool_item(&topic_slug, field, Some(stance), rng.gen_range(0..pools.community))
                    } else {
                        pool_item(&topic_slug, field, None, rng.gen_range(0..pools.shared))
                    };
                    profile.field_mut(field).insert(item);
                }
            }
            let mut tweets = Vec::with_capacity(config.tweets_per_user);
            for k in 0..config.tweets_per_user {
                let text = if silent {
                    String::new()
                } else {
                    tweet_text(config, &topic_slug, stance, &mut rng)
                };
                tweets.push(LabeledInstance {
                    tweet_id: format!("{id}-t{k}"),
                    author_id: id.clone(),
                    topic: topic.clone(),
                    text,
                    label: stance,
                });
            }
            manifest.push(ManifestRow { user_id: id.clone(), topic: topic.clone(), latent_stance: stance });
            users.push(User { id, profile, tweets });
        }
        let mut order: Vec<usize> = (0..users.len()).collect();
        order.shuffle(&mut rng);
        let n_train = libm::round(config.train_fraction * users.len() as f64) as usize;
        let train_set: BTreeSet<usize> = order[..n_train].iter().copied().collect();
        for (i, user) in users.into_iter().enumerate() {
            if train_set.contains(&i) {
                train_users.push(user);
            } else {
                test_users.push(user);
            }
        }
    }

    Ok(SynthCorpus {
        train: into_dataset(train_users),
        test: into_dataset(test_users),
        manifest,
    })
}

fn tweet_text<R: Rng>(config: &SynthConfig, topic_slug: &str, stance: StanceLabel, rng: &mut R) -> String {
    let mut words: Vec<String> = (0..config.words_per_tweet)
        .map(|_| format!("w{:03}", rng.gen_range(0..config.generic_vocab)))
        .collect();
    if stance.is_polar() && rng.gen::<f64>() < config.text_signal {
        let side = if stance == StanceLabel::Favor { "pro" } else { "con" };
        let word = format!("{}_{side}{}", topic_slug.replace('-', "_"), rng.gen_range(0..config.stance_vocab));
        let pos = rng.gen_range(0..=words.len());
        words.insert(pos, word);
    }
    words.join(" ")
}

fn into_dataset(users: Vec<User>) -> Dataset {
    let mut instances = Vec::new();
    let mut profiles = BTreeMap::new();
    let mut topics = BTreeSet::new();
    for user in users {
        for t in &user.tweets {
            topics.insert(t.topic.clone());
        }
        instances.extend(user.tweets);
        profiles.insert(user.id, user.profile);
    }
    Dataset { instances, profiles, topics: topics.into_iter().collect() }
}
