//! Text tables and CSV writers for scores and analyses.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use stance_core::analysis::{ConsistencyReport, CurvePoint, HistogramBin, RankedFeatures};
use stance_core::eval::{ConfusionMatrix, EvalReport};
use stance_core::StanceLabel;

use crate::error::{Error, Result};

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

fn close(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn fmt_score(v: f64) -> String {
    format!("{v:.4}")
}

/// Column label for a topic: the initials of its capitalized words
/// ("Climate Change" → "CC"), or the name itself when it has none.
pub fn abbreviate(topic: &str) -> String {
    let initials: String = topic
        .split_whitespace()
        .filter_map(|w| w.chars().next())
        .filter(|c| c.is_uppercase())
        .collect();
    if initials.is_empty() {
        topic.to_string()
    } else {
        initials
    }
}

/// One table row: a model label and its report.
pub struct TableRow<'a> {
    pub label: String,
    pub report: Option<&'a EvalReport>,
}

/// Per-topic F_avg and overall F_favor / F_against / F_avg, in percent.
/// Rows without a report are printed as failed.
pub fn format_table(title: &str, topics: &[String], rows: &[TableRow<'_>]) -> String {
    let abbrevs: Vec<String> = topics.iter().map(|t| abbreviate(t)).collect();
    let label_w = rows.iter().map(|r| r.label.len()).chain([5]).max().unwrap_or(5);
    let col_w = abbrevs.iter().map(String::len).chain([7]).max().unwrap_or(7);
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let mut header = format!("{:<label_w$}", "Model");
    for a in &abbrevs {
        let _ = write!(header, " {a:>col_w$}");
    }
    let _ = write!(header, " | {:>9} {:>9} {:>9}", "F_favor", "F_against", "F_avg");
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{}", "-".repeat(header.len()));
    for row in rows {
        let _ = write!(out, "{:<label_w$}", row.label);
        match row.report {
            Some(rep) => {
                for t in topics {
                    match rep.per_topic.get(t) {
                        Some(tr) => {
                            let _ = write!(out, " {:>col_w$.2}", tr.scores.f_avg * 100.0);
                        }
                        None => {
                            let _ = write!(out, " {:>col_w$}", "-");
                        }
                    }
                }
                let o = rep.overall;
                let _ = writeln!(
                    out,
                    " | {:>9.2} {:>9.2} {:>9.2}",
                    o.f_favor * 100.0,
                    o.f_against * 100.0,
                    o.f_avg * 100.0
                );
            }
            None => {
                let _ = writeln!(out, "  failed");
            }
        }
    }
    let legend: Vec<String> = topics.iter().zip(&abbrevs).map(|(t, a)| format!("{a} = {t}")).collect();
    if !legend.is_empty() {
        let _ = writeln!(out, "{}", legend.join("; "));
    }
    out
}

/// Confusion matrix with gold rows and predicted columns.
pub fn format_confusion(m: &ConfusionMatrix) -> String {
    let mut out = format!("{:<12}", "gold\\pred");
    for p in StanceLabel::ALL {
        let _ = write!(out, " {:>8}", p.as_str());
    }
    out.push('\n');
    for g in StanceLabel::ALL {
        let _ = write!(out, "{:<12}", g.as_str());
        for p in StanceLabel::ALL {
            let _ = write!(out, " {:>8}", m.get(g, p));
        }
        out.push('\n');
    }
    out
}

/// `topic,F_favor,F_against,F_avg` with a final `ALL` row for the pooled
/// scores.
pub fn write_scores_csv(path: &Path, report: &EvalReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["topic", "F_favor", "F_against", "F_avg"])?;
    let rows = report.per_topic.iter().map(|(t, r)| (t.as_str(), r.scores)).chain([("ALL", report.overall)]);
    for (topic, s) in rows {
        w.write_record([topic, &fmt_score(s.f_favor), &fmt_score(s.f_against), &fmt_score(s.f_avg)])?;
    }
    close(w, path)
}

/// One row per (topic, gold class) with prediction counts in canonical
/// class order; topic `ALL` holds the pooled matrix.
pub fn write_confusion_csv(path: &Path, report: &EvalReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["topic", "gold", "pred_AGAINST", "pred_FAVOR", "pred_NONE"])?;
    let mats = report.per_topic.iter().map(|(t, r)| (t.as_str(), &r.confusion)).chain([("ALL", &report.confusion)]);
    for (topic, m) in mats {
        for g in StanceLabel::ALL {
            let mut rec = vec![topic.to_string(), g.as_str().to_string()];
            rec.extend(StanceLabel::ALL.iter().map(|&p| m.get(g, p).to_string()));
            w.write_record(&rec)?;
        }
    }
    close(w, path)
}

pub fn write_histogram_csv(path: &Path, bins: &[HistogramBin]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["bin_low", "bin_high", "count"])?;
    for b in bins {
        w.write_record([b.low.to_string(), b.high.to_string(), b.count.to_string()])?;
    }
    close(w, path)
}

pub fn write_curve_csv(path: &Path, points: &[CurvePoint]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["N", "pair", "jaccard"])?;
    for p in points {
        w.write_record([p.n.to_string(), p.pair.clone(), format!("{:.6}", p.jaccard)])?;
    }
    close(w, path)
}

pub fn write_rankings_csv(path: &Path, rankings: &[RankedFeatures]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["rank", "feature", "weight", "class", "topic"])?;
    for r in rankings {
        for (k, (feature, weight)) in r.entries.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                feature.clone(),
                format!("{weight:.6}"),
                r.class.as_str().to_string(),
                r.topic.clone(),
            ])?;
        }
    }
    close(w, path)
}

/// Bucket counts per labelled source (a model or the gold labels).
pub fn write_consistency_csv(path: &Path, rows: &[(String, ConsistencyReport)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["source", "authors", "uniform", "polarized_plus_none", "mixed", "uniform_fraction"])?;
    for (source, r) in rows {
        w.write_record([
            source.clone(),
            r.analyzed().to_string(),
            r.uniform.to_string(),
            r.polarized_plus_none.to_string(),
            r.mixed.to_string(),
            fmt_score(r.uniform_fraction()),
        ])?;
    }
    close(w, path)
}

/// Per-author detail behind a consistency summary.
pub fn write_consistency_detail_csv(path: &Path, report: &ConsistencyReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["author_id", "topic", "bucket", "labels"])?;
    for a in &report.authors {
        let labels: Vec<&str> = a.labels.iter().map(|l| l.as_str()).collect();
        w.write_record([a.author_id.as_str(), a.topic.as_str(), a.bucket.name(), &labels.join(" ")])?;
    }
    close(w, path)
}
