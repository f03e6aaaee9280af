//! Post-hoc analyses: network overlap per user, influential-feature rankings,
//! top-N overlap curves and per-author prediction consistency.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Dataset, ProfileField, UserNetworkProfile};
use crate::error::{Error, Result};
use crate::features::strip_namespace;
use crate::label::StanceLabel;
use crate::svm::LinearModel;

/// `|a ∩ b| / |a ∪ b|`, with two empty sets scoring 0.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramBin {
    /// Lower edge in percentage points (inclusive).
    pub low: u32,
    /// Upper edge in percentage points (exclusive, except for the last bin).
    pub high: u32,
    pub count: usize,
}

/// Per-user Jaccard similarity between two profile sets.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapDistribution {
    pub pair_name: String,
    /// One value per analyzed user, in user-id order.
    pub values: Vec<f64>,
    /// Users skipped because both sets were empty.
    pub excluded: usize,
}

impl OverlapDistribution {
    /// Histogram over `[0, 100]` percentage points; a value of exactly 100
    /// falls in the last bin. `bin_width` is clamped to `1..=100`.
    pub fn histogram(&self, bin_width: u32) -> Vec<HistogramBin> {
        let width = bin_width.clamp(1, 100);
        let nbins = 100u32.div_ceil(width);
        let mut bins: Vec<HistogramBin> = (0..nbins)
            .map(|i| HistogramBin { low: i * width, high: ((i + 1) * width).min(100), count: 0 })
            .collect();
        for &v in &self.values {
            let pct = v * 100.0;
            let idx = ((pct / f64::from(width)) as usize).min(nbins as usize - 1);
            bins[idx].count += 1;
        }
        bins
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }
}

/// Jaccard similarity of `pair` for every profile with at least one
/// non-empty set in the pair.
pub fn network_overlap<'a, I>(profiles: I, pair: (ProfileField, ProfileField)) -> Result<OverlapDistribution>
where
    I: IntoIterator<Item = &'a UserNetworkProfile>,
{
    let mut values = Vec::new();
    let mut excluded = 0;
    let mut seen = 0;
    for p in profiles {
        seen += 1;
        let a = p.field(pair.0);
        let b = p.field(pair.1);
        if a.is_empty() && b.is_empty() {
            excluded += 1;
        } else {
            values.push(jaccard(a, b));
        }
    }
    if seen == 0 {
        return Err(Error::EmptySample);
    }
    Ok(OverlapDistribution { pair_name: format!("{} vs {}", pair.0, pair.1), values, excluded })
}

/// Parses a `FIELD,FIELD` or `FIELD:FIELD` pair.
pub fn parse_field_pair(s: &str) -> Result<(ProfileField, ProfileField)> {
    let mut parts = s.split([',', ':']);
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::InvalidField(s.to_string()));
    };
    Ok((a.parse()?, b.parse()?))
}

/// Features ranked by weight toward a class.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeatures {
    pub class: StanceLabel,
    pub topic: String,
    /// Weight descending, then feature string ascending.
    pub entries: Vec<(String, f64)>,
}

/// The `n` features pushing hardest toward `class`.
pub fn top_features(model: &LinearModel, class: StanceLabel, topic: &str, n: usize) -> Result<RankedFeatures> {
    if n == 0 {
        return Err(Error::InvalidConfig("N must be at least 1".to_string()));
    }
    let weights = model.class_weights(class)?;
    let mut entries: Vec<(String, f64)> = weights.into_iter().collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(n);
    Ok(RankedFeatures { class, topic: topic.to_string(), entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    /// `a~b` style label; `mean` for the three-way average.
    pub pair: String,
    pub jaccard: f64,
}

fn top_n_set(list: &[String], n: usize) -> BTreeSet<&str> {
    list.iter().take(n).map(|s| strip_namespace(s)).collect()
}

/// Jaccard of the top-`N` sets for `N = 1..=n_max`, with family namespaces
/// stripped. Rankings are `(name, list)` pairs in rank order. Every pairwise
/// curve is emitted; with three rankings their mean is emitted as `mean`.
pub fn topn_overlap_curve(rankings: &[(&str, &[String])], n_max: usize) -> Result<Vec<CurvePoint>> {
    if rankings.len() < 2 || rankings.len() > 3 {
        return Err(Error::InvalidConfig(format!(
            "overlap curves need two or three rankings, got {}",
            rankings.len()
        )));
    }
    if rankings.iter().any(|(_, r)| r.is_empty()) {
        return Err(Error::EmptyRanking);
    }
    if n_max == 0 {
        return Err(Error::InvalidConfig("n_max must be at least 1".to_string()));
    }
    let mut pairs = Vec::new();
    for i in 0..rankings.len() {
        for j in i + 1..rankings.len() {
            pairs.push((i, j));
        }
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        let sets: Vec<BTreeSet<&str>> = rankings.iter().map(|(_, r)| top_n_set(r, n)).collect();
        let mut sum = 0.0;
        for &(i, j) in &pairs {
            let jac = jaccard(&sets[i], &sets[j]);
            sum += jac;
            out.push(CurvePoint { n, pair: format!("{}~{}", rankings[i].0, rankings[j].0), jaccard: jac });
        }
        if pairs.len() == 3 {
            out.push(CurvePoint { n, pair: "mean".to_string(), jaccard: sum / 3.0 });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConsistencyBucket {
    /// Every prediction carries the same label.
    Uniform,
    /// One polar label plus some None.
    PolarizedPlusNone,
    /// Both Favor and Against occur.
    Mixed,
}

impl ConsistencyBucket {
    pub fn name(self) -> &'static str {
        match self {
            ConsistencyBucket::Uniform => "uniform",
            ConsistencyBucket::PolarizedPlusNone => "polarized_plus_none",
            ConsistencyBucket::Mixed => "mixed",
        }
    }
}

pub fn classify_consistency(labels: &[StanceLabel]) -> ConsistencyBucket {
    let has = |l| labels.contains(&l);
    if has(StanceLabel::Favor) && has(StanceLabel::Against) {
        ConsistencyBucket::Mixed
    } else if labels.windows(2).all(|w| w[0] == w[1]) {
        ConsistencyBucket::Uniform
    } else {
        ConsistencyBucket::PolarizedPlusNone
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorConsistency {
    pub author_id: String,
    pub topic: String,
    pub labels: Vec<StanceLabel>,
    pub bucket: ConsistencyBucket,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub uniform: usize,
    pub polarized_plus_none: usize,
    pub mixed: usize,
    pub authors: Vec<AuthorConsistency>,
}

impl ConsistencyReport {
    pub fn analyzed(&self) -> usize {
        self.uniform + self.polarized_plus_none + self.mixed
    }

    pub fn uniform_fraction(&self) -> f64 {
        if self.analyzed() == 0 {
            1.0
        } else {
            self.uniform as f64 / self.analyzed() as f64
        }
    }
}

/// Groups `labels` (aligned with `dataset.instances`) by author and topic and
/// buckets every group with at least two instances.
pub fn user_consistency(dataset: &Dataset, labels: &[StanceLabel]) -> Result<ConsistencyReport> {
    if labels.len() != dataset.instances.len() {
        return Err(Error::LengthMismatch { left: dataset.instances.len(), right: labels.len() });
    }
    let mut groups: BTreeMap<(&str, &str), Vec<StanceLabel>> = BTreeMap::new();
    for (inst, &l) in dataset.instances.iter().zip(labels) {
        groups.entry((inst.author_id.as_str(), inst.topic.as_str())).or_default().push(l);
    }
    let mut report = ConsistencyReport::default();
    for ((author, topic), ls) in groups {
        if ls.len() < 2 {
            continue;
        }
        let bucket = classify_consistency(&ls);
        match bucket {
            ConsistencyBucket::Uniform => report.uniform += 1,
            ConsistencyBucket::PolarizedPlusNone => report.polarized_plus_none += 1,
            ConsistencyBucket::Mixed => report.mixed += 1,
        }
        report.authors.push(AuthorConsistency {
            author_id: author.to_string(),
            topic: topic.to_string(),
            labels: ls,
            bucket,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LabeledInstance;
    use crate::features::{Family, FeatureSetSelector, FeatureSpace};
    use crate::svm::{Mode, TrainConfig};
    use alloc::vec;
    use StanceLabel::{Against as A, Favor as F, None as N};

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&["x"]), &set(&["x"])), 1.0);
        assert!((jaccard(&set(&["a", "b"]), &set(&["b", "c"])) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(jaccard(&set(&[]), &set(&[])), 0.0);
    }

    fn profile(id: &str, ins: &[&str], pns: &[&str]) -> UserNetworkProfile {
        let mut p = UserNetworkProfile::empty(id);
        p.in_mentions = set(ins);
        p.pn_mentions = set(pns);
        p
    }

    #[test]
    fn overlap_examples() {
        let pair = (ProfileField::InMentions, ProfileField::PnMentions);
        let d = network_overlap(&[profile("u", &["a"], &["a"])], pair).unwrap();
        assert_eq!(d.values, vec![1.0]);
        assert_eq!(d.pair_name, "IN_AT vs PN_AT");
        let d = network_overlap(&[profile("u", &["a"], &["b"])], pair).unwrap();
        assert_eq!(d.values, vec![0.0]);
        let d = network_overlap(&[profile("u", &[], &[])], pair).unwrap();
        assert!(d.values.is_empty());
        assert_eq!(d.excluded, 1);
        assert!(network_overlap(core::iter::empty(), pair).is_err());
        assert!(parse_field_pair("IN_AT,XX").is_err());
        assert_eq!(parse_field_pair("IN_AT:CN_FR").unwrap(), (ProfileField::InMentions, ProfileField::CnFriends));
    }

    #[test]
    fn histogram_bins() {
        let d = OverlapDistribution { pair_name: "x".into(), values: vec![0.0, 0.049, 0.05, 0.5, 1.0], excluded: 0 };
        let h = d.histogram(5);
        assert_eq!(h.len(), 20);
        assert_eq!((h[0].low, h[0].high, h[0].count), (0, 5, 2));
        assert_eq!(h[1].count, 1);
        assert_eq!(h[10].count, 1);
        assert_eq!((h[19].low, h[19].high, h[19].count), (95, 100, 1));
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 5);
        assert_eq!(d.histogram(30).last().unwrap().high, 100);
    }

    fn binary_model(names: &[&str], w: Vec<f64>) -> LinearModel {
        let sp = FeatureSpace::from_names(strings(names), FeatureSetSelector::single(Family::InAt)).unwrap();
        LinearModel::from_parts("T".into(), Mode::Binary, vec![w], vec![0.0], sp, TrainConfig::default()).unwrap()
    }

    #[test]
    fn top_feature_examples() {
        let m = binary_model(&["a", "b", "c"], vec![0.5, -0.9, 0.1]);
        let r = top_features(&m, F, "T", 2).unwrap();
        assert_eq!(r.entries, vec![("a".to_string(), 0.5), ("c".to_string(), 0.1)]);
        let r = top_features(&m, A, "T", 1).unwrap();
        assert_eq!(r.entries, vec![("b".to_string(), 0.9)]);
        let r = top_features(&m, F, "T", 10).unwrap();
        assert_eq!(r.entries.len(), 3);
        assert!(top_features(&m, N, "T", 1).is_err());
        let tied = binary_model(&["b", "a"], vec![1.0, 1.0]);
        let r = top_features(&tied, F, "T", 2).unwrap();
        assert_eq!(r.entries[0].0, "a");
    }

    #[test]
    fn curve_examples() {
        let a = strings(&["inat:x", "inat:y"]);
        let b = strings(&["pnat:y", "pnat:z"]);
        let c = strings(&["cnfr:q", "cnfr:r"]);
        let curve = topn_overlap_curve(&[("IN", &a), ("PN", &b)], 2).unwrap();
        assert_eq!(curve[0].jaccard, 0.0);
        assert!((curve[1].jaccard - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(curve[1].pair, "IN~PN");

        let same = topn_overlap_curve(&[("IN", &a), ("X", &a)], 5).unwrap();
        assert!(same.iter().all(|p| p.jaccard == 1.0));
        let disjoint = topn_overlap_curve(&[("IN", &a), ("CN", &c)], 3).unwrap();
        assert!(disjoint.iter().all(|p| p.jaccard == 0.0));

        let three = topn_overlap_curve(&[("IN", &a), ("PN", &b), ("CN", &c)], 2).unwrap();
        assert_eq!(three.len(), 8);
        let mean = three.iter().find(|p| p.n == 2 && p.pair == "mean").unwrap();
        assert!((mean.jaccard - 1.0 / 9.0).abs() < 1e-12);

        assert_eq!(topn_overlap_curve(&[("IN", &a), ("PN", &[])], 2), Err(Error::EmptyRanking));
        assert!(topn_overlap_curve(&[("IN", &a)], 2).is_err());
        assert!(topn_overlap_curve(&[("IN", &a), ("PN", &b)], 0).is_err());
    }

    fn dataset(rows: &[(&str, &str)]) -> Dataset {
        let instances = rows
            .iter()
            .enumerate()
            .map(|(i, (author, topic))| LabeledInstance {
                tweet_id: format!("{i}"),
                author_id: author.to_string(),
                topic: topic.to_string(),
                text: String::new(),
                label: N,
            })
            .collect();
        Dataset { instances, profiles: BTreeMap::new(), topics: vec!["t".into()] }
    }

    #[test]
    fn consistency_buckets() {
        assert_eq!(classify_consistency(&[F, F]), ConsistencyBucket::Uniform);
        assert_eq!(classify_consistency(&[F, N, F]), ConsistencyBucket::PolarizedPlusNone);
        assert_eq!(classify_consistency(&[F, A]), ConsistencyBucket::Mixed);
        assert_eq!(classify_consistency(&[N, N]), ConsistencyBucket::Uniform);

        let ds = dataset(&[("u1", "t"), ("u1", "t"), ("u2", "t"), ("u2", "t"), ("u2", "t"), ("u3", "t"), ("u3", "t"), ("u4", "t"), ("u1", "s")]);
        let preds = [F, F, F, N, F, F, A, A, A];
        let r = user_consistency(&ds, &preds).unwrap();
        assert_eq!((r.uniform, r.polarized_plus_none, r.mixed), (1, 1, 1));
        assert_eq!(r.analyzed(), 3);
        assert!(user_consistency(&ds, &preds[1..]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn jaccard_properties(a in proptest::collection::btree_set(0u8..20, 0..10),
                              b in proptest::collection::btree_set(0u8..20, 0..10),
                              extra in 100u8..120) {
            let j = jaccard(&a, &b);
            proptest::prop_assert!((0.0..=1.0).contains(&j));
            proptest::prop_assert_eq!(j, jaccard(&b, &a));
            if !a.is_empty() {
                proptest::prop_assert_eq!(jaccard(&a, &a), 1.0);
            }
            let mut a2 = a.clone();
            let mut b2 = b.clone();
            a2.insert(extra);
            b2.insert(extra);
            proptest::prop_assert!(jaccard(&a2, &b2) >= j);
        }

        #[test]
        fn curve_in_unit_interval(a in proptest::collection::vec("[a-f]{1,2}", 1..12),
                                  b in proptest::collection::vec("[a-f]{1,2}", 1..12),
                                  n_max in 1usize..15) {
            let curve = topn_overlap_curve(&[("a", &a), ("b", &b)], n_max).unwrap();
            proptest::prop_assert_eq!(curve.len(), n_max);
            for p in curve {
                proptest::prop_assert!((0.0..=1.0).contains(&p.jaccard));
            }
        }
    }
}
