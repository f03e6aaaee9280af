//! Tweets TSV, profiles JSONL, synth manifest and prediction files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use stance_core::corpus::{LabeledInstance, ProfileField, UserNetworkProfile};
use stance_core::synth::ManifestRow;
use stance_core::StanceLabel;

use crate::error::{Error, Result};

/// Reads a file as text, replacing invalid UTF-8 rather than failing.
fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
    })
}

/// Non-blank lines with their 1-based line numbers and `\r` stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(BufWriter::new(f))
}

fn finish(mut w: BufWriter<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_semeval_tsv(path: &Path) -> Result<Vec<LabeledInstance>> {
    parse_semeval_tsv(&read_text(path)?, path)
}

/// Parses `ID, Target, Tweet, Stance[, AuthorID]` rows after a header line.
pub fn parse_semeval_tsv(text: &str, path: &Path) -> Result<Vec<LabeledInstance>> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, row) in lines(text).skip(1) {
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 4 && fields.len() != 5 {
            return Err(err(line, format!("expected 4 or 5 tab-separated fields, found {}", fields.len())));
        }
        let tweet_id = fields[0].trim();
        let topic = fields[1].trim();
        if tweet_id.is_empty() {
            return Err(err(line, "empty tweet id".into()));
        }
        if topic.is_empty() {
            return Err(err(line, "empty topic".into()));
        }
        let label: StanceLabel = fields[3]
            .parse()
            .map_err(|_| err(line, format!("unknown stance '{}'", fields[3].trim())))?;
        let author_id = match fields.get(4).map(|a| a.trim()) {
            Some(a) if !a.is_empty() => a,
            _ => tweet_id,
        };
        if !seen.insert(tweet_id.to_string()) {
            return Err(err(line, format!("duplicate tweet id '{tweet_id}'")));
        }
        out.push(LabeledInstance {
            tweet_id: tweet_id.to_string(),
            author_id: author_id.to_string(),
            topic: topic.to_string(),
            text: fields[2].to_string(),
            label,
        });
    }
    Ok(out)
}

fn flatten(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Writes instances with the author column. Tabs and newlines inside tweets
/// are replaced by spaces since the format cannot carry them.
pub fn write_semeval_tsv(path: &Path, instances: &[LabeledInstance]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "ID\tTarget\tTweet\tStance\tAuthorID").map_err(io)?;
    for i in instances {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            flatten(&i.tweet_id),
            flatten(&i.topic),
            flatten(&i.text),
            i.label,
            flatten(&i.author_id)
        )
        .map_err(io)?;
    }
    finish(w, path)
}

#[derive(Debug, Deserialize, Serialize)]
struct ProfileRecord {
    user_id: String,
    #[serde(default)]
    in_mentions: Vec<String>,
    #[serde(default)]
    in_domains: Vec<String>,
    #[serde(default)]
    pn_mentions: Vec<String>,
    #[serde(default)]
    pn_domains: Vec<String>,
    #[serde(default)]
    cn_friends: Vec<String>,
    #[serde(default)]
    cn_followers: Vec<String>,
}

impl ProfileRecord {
    fn column(&self, field: ProfileField) -> &[String] {
        match field {
            ProfileField::InMentions => &self.in_mentions,
            ProfileField::InDomains => &self.in_domains,
            ProfileField::PnMentions => &self.pn_mentions,
            ProfileField::PnDomains => &self.pn_domains,
            ProfileField::CnFriends => &self.cn_friends,
            ProfileField::CnFollowers => &self.cn_followers,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProfileLoad {
    pub profiles: BTreeMap<String, UserNetworkProfile>,
    /// Records whose user_id repeated an earlier one; the last record wins.
    pub duplicates: usize,
}

pub fn load_network_profiles(path: &Path) -> Result<ProfileLoad> {
    parse_network_profiles(&read_text(path)?, path)
}

pub fn parse_network_profiles(text: &str, path: &Path) -> Result<ProfileLoad> {
    let mut load = ProfileLoad::default();
    for (line, row) in lines(text) {
        let rec: ProfileRecord = serde_json::from_str(row).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
        let user_id = rec.user_id.trim().to_string();
        if user_id.is_empty() {
            return Err(Error::Parse { path: path.to_path_buf(), line, message: "empty user_id".into() });
        }
        let mut profile = UserNetworkProfile::empty(user_id.clone());
        for field in ProfileField::ALL {
            for raw in rec.column(field) {
                profile.insert_raw(field, raw);
            }
        }
        if load.profiles.insert(user_id, profile).is_some() {
            load.duplicates += 1;
        }
    }
    if load.duplicates > 0 {
        log::warn!("{}: {} duplicate user_id records, last one kept", path.display(), load.duplicates);
    }
    Ok(load)
}

pub fn write_network_profiles<'a>(
    path: &Path,
    profiles: impl IntoIterator<Item = &'a UserNetworkProfile>,
) -> Result<()> {
    let mut w = create(path)?;
    for p in profiles {
        let col = |f: ProfileField| p.field(f).iter().cloned().collect::<Vec<_>>();
        let rec = ProfileRecord {
            user_id: p.user_id.clone(),
            in_mentions: col(ProfileField::InMentions),
            in_domains: col(ProfileField::InDomains),
            pn_mentions: col(ProfileField::PnMentions),
            pn_domains: col(ProfileField::PnDomains),
            cn_friends: col(ProfileField::CnFriends),
            cn_followers: col(ProfileField::CnFollowers),
        };
        let json = serde_json::to_string(&rec).map_err(|e| Error::Data(e.to_string()))?;
        writeln!(w, "{json}").map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

pub fn write_manifest_csv(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["user_id", "topic", "latent_stance"])?;
    for r in rows {
        w.write_record([r.user_id.as_str(), r.topic.as_str(), r.latent_stance.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRow {
    pub tweet_id: String,
    pub topic: String,
    pub gold: StanceLabel,
    pub pred: StanceLabel,
}

pub fn write_predictions(path: &Path, rows: &[PredictionRow]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "ID\tTarget\tGold\tPred").map_err(io)?;
    for r in rows {
        writeln!(w, "{}\t{}\t{}\t{}", flatten(&r.tweet_id), flatten(&r.topic), r.gold, r.pred).map_err(io)?;
    }
    finish(w, path)
}

pub fn load_predictions(path: &Path) -> Result<Vec<PredictionRow>> {
    let text = read_text(path)?;
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut out = Vec::new();
    for (line, row) in lines(&text).skip(1) {
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(line, format!("expected 4 tab-separated fields, found {}", fields.len())));
        }
        let label = |s: &str| s.parse::<StanceLabel>().map_err(|_| err(line, format!("unknown stance '{}'", s.trim())));
        out.push(PredictionRow {
            tweet_id: fields[0].trim().to_string(),
            topic: fields[1].trim().to_string(),
            gold: label(fields[2])?,
            pred: label(fields[3])?,
        });
    }
    Ok(out)
}

/// Reads a predictions-only file parallel to a gold file. The label is the
/// last tab-separated field of each line, so both one-label-per-line files
/// and SemEval-format guess files work. A first line whose label does not
/// parse is taken as a header.
pub fn load_parallel_labels(path: &Path) -> Result<Vec<StanceLabel>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (k, (line, row)) in lines(&text).enumerate() {
        let last = row.rsplit('\t').next().unwrap_or(row);
        match last.parse::<StanceLabel>() {
            Ok(l) => out.push(l),
            Err(_) if k == 0 => continue,
            Err(_) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("unknown stance '{}'", last.trim()),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("mem.tsv")
    }

    #[test]
    fn header_only() {
        assert!(parse_semeval_tsv("ID\tTarget\tTweet\tStance\n", p()).unwrap().is_empty());
        assert!(parse_semeval_tsv("", p()).unwrap().is_empty());
    }

    #[test]
    fn five_columns_and_crlf() {
        let rows = parse_semeval_tsv("ID\tTarget\tTweet\tStance\r\n101\tAtheism\tgod is a myth\tFAVOR\tu1\r\n", p()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].author_id, "u1");
        assert_eq!(rows[0].label, StanceLabel::Favor);
        assert_eq!(rows[0].text, "god is a myth");
    }

    #[test]
    fn author_defaults_to_tweet_id() {
        let rows = parse_semeval_tsv("h\n7\tAtheism\tx\t against \n8\tAtheism\ty\tnone\t\n", p()).unwrap();
        assert_eq!(rows[0].author_id, "7");
        assert_eq!(rows[0].label, StanceLabel::Against);
        assert_eq!(rows[1].author_id, "8");
    }

    #[test]
    fn unknown_stance_names_value_and_line() {
        let e = parse_semeval_tsv("h\n1\tA\tx\tFAVOR\n2\tA\ty\tMAYBE\n", p()).unwrap_err();
        assert!(e.to_string().contains("unknown stance 'MAYBE' at line 3"), "{e}");
    }

    #[test]
    fn wrong_field_count() {
        let e = parse_semeval_tsv("h\n1\tA\tx\n", p()).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn duplicate_tweet_id_rejected() {
        assert!(parse_semeval_tsv("h\n1\tA\tx\tFAVOR\n1\tA\ty\tNONE\n", p()).is_err());
    }

    #[test]
    fn profiles_normalize_and_dedupe() {
        let text = r#"{"user_id":"u1","in_mentions":["@FoxNews","foxnews"],"in_domains":["https://www.bbc.co.uk/news/x"]}
{"user_id":"u2"}

{"user_id":"u1","cn_friends":["@A"]}
"#;
        let load = parse_network_profiles(text, p()).unwrap();
        assert_eq!(load.duplicates, 1);
        let u1 = &load.profiles["u1"];
        assert!(u1.in_mentions.is_empty());
        assert_eq!(u1.cn_friends.iter().collect::<Vec<_>>(), ["a"]);
        assert!(load.profiles["u2"].is_empty());

        let first = parse_network_profiles(text.lines().next().unwrap(), p()).unwrap();
        let u1 = &first.profiles["u1"];
        assert_eq!(u1.in_mentions.iter().collect::<Vec<_>>(), ["foxnews"]);
        assert_eq!(u1.in_domains.iter().collect::<Vec<_>>(), ["bbc.co.uk"]);
    }

    #[test]
    fn profile_errors() {
        let e = parse_network_profiles("{\"user_id\":\"a\"}\n{\"in_mentions\":[]}\n", p()).unwrap_err();
        assert!(e.to_string().contains("user_id") && e.to_string().contains("line 2"), "{e}");
        assert!(parse_network_profiles("not json\n", p()).is_err());
        assert!(parse_network_profiles("", p()).unwrap().profiles.is_empty());
    }
}
