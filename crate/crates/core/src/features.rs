//! Boolean feature extraction and vectorization.
//!
//! Every feature is a namespaced string (`txtw:`, `txtc:`, `inat:`, ...), so
//! families can be concatenated into one space without collisions. A
//! [`FeatureSpace`] is built once from training data and maps feature strings
//! to dense column indices in lexicographic order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::{LabeledInstance, ProfileField, UserNetworkProfile};
use crate::error::{Error, Result};

/// Word n-gram orders used for tweet text.
pub const WORD_ORDERS: [usize; 3] = [1, 2, 3];
/// Character n-gram orders used for tweet text.
pub const CHAR_ORDERS: [usize; 4] = [2, 3, 4, 5];

pub const URL_TOKEN: &str = "<url>";

/// A feature family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Txt,
    InAt,
    InDm,
    PnAt,
    PnDm,
    CnFr,
    CnFl,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Txt,
        Family::InAt,
        Family::InDm,
        Family::PnAt,
        Family::PnDm,
        Family::CnFr,
        Family::CnFl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Txt => "TXT",
            Family::InAt => "IN_AT",
            Family::InDm => "IN_DM",
            Family::PnAt => "PN_AT",
            Family::PnDm => "PN_DM",
            Family::CnFr => "CN_FR",
            Family::CnFl => "CN_FL",
        }
    }

    /// Profile set backing a network family; `None` for text.
    pub fn profile_field(self) -> Option<ProfileField> {
        match self {
            Family::Txt => None,
            Family::InAt => Some(ProfileField::InMentions),
            Family::InDm => Some(ProfileField::InDomains),
            Family::PnAt => Some(ProfileField::PnMentions),
            Family::PnDm => Some(ProfileField::PnDomains),
            Family::CnFr => Some(ProfileField::CnFriends),
            Family::CnFl => Some(ProfileField::CnFollowers),
        }
    }

    /// Namespace prefix for network families.
    pub fn prefix(self) -> &'static str {
        match self {
            Family::Txt => "txtw:",
            Family::InAt => "inat:",
            Family::InDm => "indm:",
            Family::PnAt => "pnat:",
            Family::PnDm => "pndm:",
            Family::CnFr => "cnfr:",
            Family::CnFl => "cnfl:",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// Prefix for word n-grams.
pub const WORD_PREFIX: &str = "txtw:";
/// Prefix for character n-grams.
pub const CHAR_PREFIX: &str = "txtc:";

const ALL_PREFIXES: [&str; 8] = [
    WORD_PREFIX,
    CHAR_PREFIX,
    "inat:",
    "indm:",
    "pnat:",
    "pndm:",
    "cnfr:",
    "cnfl:",
];

/// Removes a known family prefix from a feature string.
pub fn strip_namespace(feature: &str) -> &str {
    ALL_PREFIXES
        .iter()
        .find_map(|p| feature.strip_prefix(p))
        .unwrap_or(feature)
}

/// A non-empty set of feature families.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSetSelector(u8);

impl FeatureSetSelector {
    pub fn new(families: &[Family]) -> Result<Self> {
        let bits = families.iter().fold(0u8, |acc, f| acc | f.bit());
        if bits == 0 {
            return Err(Error::InvalidSelector(String::new()));
        }
        Ok(FeatureSetSelector(bits))
    }

    pub fn single(family: Family) -> Self {
        FeatureSetSelector(family.bit())
    }

    pub fn contains(self, family: Family) -> bool {
        self.0 & family.bit() != 0
    }

    pub fn families(self) -> impl Iterator<Item = Family> {
        Family::ALL.into_iter().filter(move |f| self.contains(*f))
    }

    pub fn union(self, other: Self) -> Self {
        FeatureSetSelector(self.0 | other.0)
    }

    /// True when no text family is selected.
    pub fn is_network_only(self) -> bool {
        !self.contains(Family::Txt)
    }

    pub fn needs_profiles(self) -> bool {
        self.families().any(|f| f != Family::Txt)
    }
}

impl fmt::Display for FeatureSetSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<&str> = self.families().map(Family::name).collect();
        names.sort_unstable();
        f.write_str(&names.join("+"))
    }
}

impl fmt::Debug for FeatureSetSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureSetSelector({self})")
    }
}

impl FromStr for FeatureSetSelector {
    type Err = Error;

    /// Parses `+`-joined family names. `IN`, `PN` and `CN` expand to both
    /// sets of their network.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u8;
        for part in s.split('+') {
            let part = part.trim();
            let fams: &[Family] = if part.eq_ignore_ascii_case("IN") {
                &[Family::InAt, Family::InDm]
            } else if part.eq_ignore_ascii_case("PN") {
                &[Family::PnAt, Family::PnDm]
            } else if part.eq_ignore_ascii_case("CN") {
                &[Family::CnFr, Family::CnFl]
            } else {
                match Family::ALL.iter().find(|f| part.eq_ignore_ascii_case(f.name())) {
                    Some(f) => core::slice::from_ref(f),
                    None => return Err(Error::InvalidSelector(s.to_string())),
                }
            };
            bits |= fams.iter().fold(0, |acc, f| acc | f.bit());
        }
        if bits == 0 {
            return Err(Error::InvalidSelector(s.to_string()));
        }
        Ok(FeatureSetSelector(bits))
    }
}

/// Splits tweet text into lowercase tokens.
///
/// Leading and trailing punctuation is stripped, except a leading `@` or `#`.
/// Tokens starting with `http://` or `https://` become [`URL_TOKEN`].
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    for raw in lower.split_whitespace() {
        let lead = raw.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '@' && c != '#');
        if lead.starts_with("http://") || lead.starts_with("https://") {
            out.push(URL_TOKEN.to_string());
            continue;
        }
        let (sigil, body) = match lead.chars().next() {
            Some(c @ ('@' | '#')) => (Some(c), &lead[1..]),
            _ => (None, lead),
        };
        let body = body.trim_matches(|c: char| !c.is_alphanumeric());
        if body.is_empty() {
            continue;
        }
        let mut tok = String::with_capacity(body.len() + 1);
        if let Some(c) = sigil {
            tok.push(c);
        }
        tok.push_str(body);
        out.push(tok);
    }
    out
}

/// Space-joined contiguous token windows for each order in `orders`.
/// Orders of zero contribute nothing.
pub fn word_ngrams(tokens: &[String], orders: &[usize]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for &n in orders {
        if n == 0 {
            continue;
        }
        for w in tokens.windows(n) {
            out.insert(w.join(" "));
        }
    }
    out
}

/// Character windows over the lowercased text, spaces included.
/// Orders of zero contribute nothing.
pub fn char_ngrams(text: &str, orders: &[usize]) -> BTreeSet<String> {
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    let mut out = BTreeSet::new();
    for &n in orders {
        if n == 0 {
            continue;
        }
        for w in chars.windows(n) {
            out.insert(w.iter().collect());
        }
    }
    out
}

/// Namespaced feature set of one instance under `selector`.
pub fn extract_features(
    instance: &LabeledInstance,
    profile: &UserNetworkProfile,
    selector: FeatureSetSelector,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for family in selector.families() {
        match family.profile_field() {
            None => {
                let tokens = tokenize(&instance.text);
                for g in word_ngrams(&tokens, &WORD_ORDERS) {
                    out.insert(alloc::format!("{WORD_PREFIX}{g}"));
                }
                for g in char_ngrams(&instance.text, &CHAR_ORDERS) {
                    out.insert(alloc::format!("{CHAR_PREFIX}{g}"));
                }
            }
            Some(field) => {
                let prefix = family.prefix();
                for item in profile.field(field) {
                    out.insert(alloc::format!("{prefix}{item}"));
                }
            }
        }
    }
    out
}

/// Presence/absence vector: strictly increasing column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseBooleanVector {
    indices: Vec<usize>,
    dimension: usize,
}

impl SparseBooleanVector {
    pub fn new(indices: Vec<usize>, dimension: usize) -> Result<Self> {
        let mut prev: Option<usize> = None;
        for &i in &indices {
            if i >= dimension || prev.is_some_and(|p| p >= i) {
                return Err(Error::InvalidVector { index: i, dimension });
            }
            prev = Some(i);
        }
        Ok(SparseBooleanVector { indices, dimension })
    }

    /// Sorts and deduplicates `indices` before validating.
    pub fn from_unsorted(mut indices: Vec<usize>, dimension: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices, dimension)
    }

    pub fn zeros(dimension: usize) -> Self {
        SparseBooleanVector { indices: Vec::new(), dimension }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.indices.iter().map(|&i| dense[i]).sum()
    }
}

/// Frozen mapping between feature strings and columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpace {
    names: Vec<String>,
    index_of: BTreeMap<String, usize>,
    selector: FeatureSetSelector,
}

impl FeatureSpace {
    /// Builds the space from training feature sets, keeping features that
    /// occur in at least `min_df` sets (values below 1 are treated as 1).
    pub fn build(
        train_sets: &[BTreeSet<String>],
        selector: FeatureSetSelector,
        min_df: usize,
    ) -> Result<Self> {
        let min_df = min_df.max(1);
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for set in train_sets {
            for f in set {
                *df.entry(f.as_str()).or_insert(0) += 1;
            }
        }
        let names: Vec<String> = df
            .into_iter()
            .filter(|(_, c)| *c >= min_df)
            .map(|(f, _)| f.to_string())
            .collect();
        Self::from_names(names, selector)
    }

    /// Rebuilds a space from its column names in index order.
    pub fn from_names(names: Vec<String>, selector: FeatureSetSelector) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyFeatureSpace);
        }
        let mut index_of = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if index_of.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidConfig(alloc::format!("duplicate feature '{n}'")));
            }
        }
        Ok(FeatureSpace { names, index_of, selector })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn selector(&self) -> FeatureSetSelector {
        self.selector
    }

    pub fn index_of(&self, feature: &str) -> Option<usize> {
        self.index_of.get(feature).copied()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Maps a feature set onto the space; unknown features are dropped.
    pub fn vectorize(&self, features: &BTreeSet<String>) -> SparseBooleanVector {
        let indices: Vec<usize> = features.iter().filter_map(|f| self.index_of(f)).collect();
        // BTreeSet iteration and the lexicographic column order agree, so
        // `indices` is already strictly increasing.
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        SparseBooleanVector { indices, dimension: self.len() }
    }
}
