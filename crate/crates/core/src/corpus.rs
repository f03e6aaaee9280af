//! Labeled tweets, per-user network profiles and the join between them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::label::StanceLabel;

/// One (tweet, topic, stance) record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledInstance {
    pub tweet_id: String,
    pub author_id: String,
    pub topic: String,
    pub text: String,
    pub label: StanceLabel,
}

/// The six network sets of a single user.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserNetworkProfile {
    pub user_id: String,
    /// Accounts the user retweets, replies to or mentions.
    pub in_mentions: BTreeSet<String>,
    /// Domains of links the user posts.
    pub in_domains: BTreeSet<String>,
    /// Accounts appearing in tweets the user liked.
    pub pn_mentions: BTreeSet<String>,
    /// Domains of links in tweets the user liked.
    pub pn_domains: BTreeSet<String>,
    pub cn_friends: BTreeSet<String>,
    pub cn_followers: BTreeSet<String>,
}

/// Names one of the six profile sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProfileField {
    InMentions,
    InDomains,
    PnMentions,
    PnDomains,
    CnFriends,
    CnFollowers,
}

impl ProfileField {
    pub const ALL: [ProfileField; 6] = [
        ProfileField::InMentions,
        ProfileField::InDomains,
        ProfileField::PnMentions,
        ProfileField::PnDomains,
        ProfileField::CnFriends,
        ProfileField::CnFollowers,
    ];

    /// Short feature-family name, e.g. `IN_AT`.
    pub fn name(self) -> &'static str {
        match self {
            ProfileField::InMentions => "IN_AT",
            ProfileField::InDomains => "IN_DM",
            ProfileField::PnMentions => "PN_AT",
            ProfileField::PnDomains => "PN_DM",
            ProfileField::CnFriends => "CN_FR",
            ProfileField::CnFollowers => "CN_FL",
        }
    }

    /// Key used in the line-delimited JSON profile format.
    pub fn json_key(self) -> &'static str {
        match self {
            ProfileField::InMentions => "in_mentions",
            ProfileField::InDomains => "in_domains",
            ProfileField::PnMentions => "pn_mentions",
            ProfileField::PnDomains => "pn_domains",
            ProfileField::CnFriends => "cn_friends",
            ProfileField::CnFollowers => "cn_followers",
        }
    }

    pub fn is_domain(self) -> bool {
        matches!(self, ProfileField::InDomains | ProfileField::PnDomains)
    }
}

impl fmt::Display for ProfileField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        ProfileField::ALL
            .into_iter()
            .find(|f| t.eq_ignore_ascii_case(f.name()) || t.eq_ignore_ascii_case(f.json_key()))
            .ok_or_else(|| Error::InvalidField(t.to_string()))
    }
}

impl UserNetworkProfile {
    pub fn empty(user_id: impl Into<String>) -> Self {
        UserNetworkProfile {
            user_id: user_id.into(),
            ..Default::default()
        }
    }

    pub fn field(&self, field: ProfileField) -> &BTreeSet<String> {
        match field {
            ProfileField::InMentions => &self.in_mentions,
            ProfileField::InDomains => &self.in_domains,
            ProfileField::PnMentions => &self.pn_mentions,
            ProfileField::PnDomains => &self.pn_domains,
            ProfileField::CnFriends => &self.cn_friends,
            ProfileField::CnFollowers => &self.cn_followers,
        }
    }

    pub fn field_mut(&mut self, field: ProfileField) -> &mut BTreeSet<String> {
        match field {
            ProfileField::InMentions => &mut self.in_mentions,
            ProfileField::InDomains => &mut self.in_domains,
            ProfileField::PnMentions => &mut self.pn_mentions,
            ProfileField::PnDomains => &mut self.pn_domains,
            ProfileField::CnFriends => &mut self.cn_friends,
            ProfileField::CnFollowers => &mut self.cn_followers,
        }
    }

    /// Inserts a raw account or domain string into `field`, normalizing it.
    /// Strings that normalize to nothing are ignored.
    pub fn insert_raw(&mut self, field: ProfileField, raw: &str) {
        let norm = if field.is_domain() {
            normalize_domain(raw)
        } else {
            normalize_account(raw)
        };
        if let Some(v) = norm {
            self.field_mut(field).insert(v);
        }
    }

    /// Re-normalizes every set in place.
    pub fn normalize(&mut self) {
        for field in ProfileField::ALL {
            let old = core::mem::take(self.field_mut(field));
            for raw in &old {
                self.insert_raw(field, raw);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        ProfileField::ALL.iter().all(|f| self.field(*f).is_empty())
    }
}

/// Lowercases an account handle and strips leading `@`.
pub fn normalize_account(raw: &str) -> Option<String> {
    let s = raw.trim_start_matches(|c: char| c == '@' || c.is_whitespace()).trim_end();
    if s.is_empty() {
        None
    } else {
        Some(s.to_lowercase())
    }
}

/// Reduces a URL or host to a lowercase hostname: scheme, credentials, port,
/// path, query and fragment are removed, as are leading `www.` labels.
/// Other subdomains are kept.
pub fn normalize_domain(raw: &str) -> Option<String> {
    // Stripping can expose another strippable suffix ("a.:." -> "a.:"), so
    // iterate to a fixed point.
    let mut cur = domain_step(raw)?;
    loop {
        let next = domain_step(&cur)?;
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
}

fn domain_step(raw: &str) -> Option<String> {
    let mut s = raw.trim();
    if let Some(pos) = s.find("://") {
        s = &s[pos + 3..];
    } else if let Some(rest) = s.strip_prefix("//") {
        s = rest;
    }
    let end = s.find(['/', '?', '#']).unwrap_or(s.len());
    s = &s[..end];
    if let Some(pos) = s.rfind('@') {
        s = &s[pos + 1..];
    }
    if let Some(pos) = s.rfind(':') {
        if s[pos + 1..].bytes().all(|b| b.is_ascii_digit()) {
            s = &s[..pos];
        }
    }
    let mut host = s.trim().trim_end_matches('.').to_lowercase();
    while host.starts_with("www.") {
        host.drain(..4);
    }
    let host = host.trim().trim_end_matches('.');
    if host.is_empty() || host.contains(['/', '?', '#', '@']) || host.contains("://") {
        None
    } else {
        Some(host.to_string())
    }
}

/// Instances joined with the profiles of their authors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub instances: Vec<LabeledInstance>,
    pub profiles: BTreeMap<String, UserNetworkProfile>,
    /// Sorted, deduplicated topics of `instances`.
    pub topics: Vec<String>,
}

impl Dataset {
    pub fn profile_of(&self, instance: &LabeledInstance) -> Option<&UserNetworkProfile> {
        self.profiles.get(&instance.author_id)
    }

    /// Indices of instances on `topic`, in dataset order.
    pub fn topic_indices(&self, topic: &str) -> Vec<usize> {
        self.instances
            .iter()
            .enumerate()
            .filter(|(_, inst)| inst.topic == topic)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn labels(&self) -> Vec<StanceLabel> {
        self.instances.iter().map(|i| i.label).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinOutcome {
    pub dataset: Dataset,
    /// Instances removed because their author had no profile.
    pub dropped: usize,
}

/// Joins instances with author profiles.
///
/// With `require_profile` set, instances whose author has no profile are
/// dropped. Otherwise they are kept and their author gets an all-empty
/// profile. Only profiles of authors that occur in the output are retained.
pub fn join(
    instances: Vec<LabeledInstance>,
    profiles: &BTreeMap<String, UserNetworkProfile>,
    require_profile: bool,
) -> JoinOutcome {
    let mut dropped = 0;
    let mut kept = Vec::with_capacity(instances.len());
    let mut used = BTreeMap::new();
    for inst in instances {
        match profiles.get(&inst.author_id) {
            Some(p) => {
                used.entry(inst.author_id.clone()).or_insert_with(|| p.clone());
                kept.push(inst);
            }
            None if require_profile => dropped += 1,
            None => {
                used.entry(inst.author_id.clone())
                    .or_insert_with(|| UserNetworkProfile::empty(inst.author_id.clone()));
                kept.push(inst);
            }
        }
    }
    let topics: BTreeSet<String> = kept.iter().map(|i| i.topic.clone()).collect();
    JoinOutcome {
        dataset: Dataset {
            instances: kept,
            profiles: used,
            topics: topics.into_iter().collect(),
        },
        dropped,
    }
}
