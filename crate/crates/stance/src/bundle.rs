//! Plain-text model bundles.
//!
//! A bundle is a directory holding:
//!
//! - `metadata.txt`: `key=value` lines (format, topic, mode, selector,
//!   classes, training configuration).
//! - `space.tsv`: `feature<TAB>index` in column order.
//! - `weights-<class>.tsv`: a `bias<TAB>value` line followed by
//!   `index<TAB>weight` lines for every weight that is not `+0.0`.
//!
//! Ternary bundles carry one weights file per class. Binary bundles carry
//! only `weights-favor.tsv`; Against is its negation. Floats are written in
//! Rust's shortest round-trip form, so loading reproduces every bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use stance_core::features::{FeatureSetSelector, FeatureSpace};
use stance_core::svm::{LinearModel, Loss, Mode, TrainConfig};
use stance_core::synth::slug;
use stance_core::StanceLabel;

use crate::error::{Error, Result};

pub const FORMAT: &str = "stance-bundle-1";
pub const METADATA: &str = "metadata.txt";
const SPACE: &str = "space.tsv";

/// Conventional location of a bundle below `root`.
pub fn bundle_dir(root: &Path, topic: &str, selector: FeatureSetSelector, mode: Mode) -> PathBuf {
    root.join(slug(topic)).join(selector.to_string()).join(mode.to_string())
}

fn stored_classes(mode: Mode) -> &'static [StanceLabel] {
    match mode {
        Mode::Ternary => &StanceLabel::ALL,
        Mode::Binary => &[StanceLabel::Favor],
    }
}

fn weights_file(class: StanceLabel) -> String {
    format!("weights-{}.tsv", class.as_str().to_ascii_lowercase())
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        out.push(match chars.next()? {
            '\\' => '\\',
            't' => '\t',
            'n' => '\n',
            'r' => '\r',
            _ => return None,
        });
    }
    Some(out)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn save(model: &LinearModel, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cfg = model.config();
    let classes: Vec<&str> = model.classes().iter().map(|c| c.as_str()).collect();
    let meta = format!(
        "format={FORMAT}\ntopic={}\nmode={}\nselector={}\nclasses={}\nfeatures={}\nC={:?}\ntol={:?}\nmax_iter={}\nseed={}\nloss={}\n",
        escape(model.topic()),
        model.mode(),
        model.space().selector(),
        classes.join(","),
        model.space().len(),
        cfg.c,
        cfg.tol,
        cfg.max_iter,
        cfg.seed,
        cfg.loss,
    );
    write(&dir.join(METADATA), &meta)?;

    let mut space = String::new();
    for (i, name) in model.space().names().iter().enumerate() {
        space.push_str(&format!("{}\t{i}\n", escape(name)));
    }
    write(&dir.join(SPACE), &space)?;

    for ((class, w), b) in stored_classes(model.mode()).iter().zip(model.raw_weights()).zip(model.raw_biases()) {
        let mut text = format!("bias\t{b:?}\n");
        for (i, v) in w.iter().enumerate() {
            if v.to_bits() != 0 {
                text.push_str(&format!("{i}\t{v:?}\n"));
            }
        }
        write(&dir.join(weights_file(*class)), &text)?;
    }
    Ok(())
}

pub fn load(dir: &Path) -> Result<LinearModel> {
    let bad = |message: String| Error::Bundle { path: dir.to_path_buf(), message };
    let read = |name: &str| {
        let p = dir.join(name);
        fs::read_to_string(&p).map_err(|e| Error::io(p, e))
    };

    let meta_text = read(METADATA)?;
    let mut meta = BTreeMap::new();
    for line in meta_text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("bad metadata line '{line}'")))?;
        meta.insert(k.trim(), v);
    }
    let get = |k: &str| meta.get(k).copied().ok_or_else(|| bad(format!("metadata lacks '{k}'")));
    fn parse<T: std::str::FromStr>(v: &str, key: &str, dir: &Path) -> Result<T> {
        v.trim().parse().map_err(|_| Error::Bundle {
            path: dir.to_path_buf(),
            message: format!("bad value '{v}' for '{key}'"),
        })
    }

    if get("format")? != FORMAT {
        return Err(bad(format!("unsupported format '{}'", get("format")?)));
    }
    let topic = unescape(get("topic")?).ok_or_else(|| bad("bad escape in topic".into()))?;
    let mode: Mode = parse(get("mode")?, "mode", dir)?;
    let selector: FeatureSetSelector = parse(get("selector")?, "selector", dir)?;
    let features: usize = parse(get("features")?, "features", dir)?;
    let config = TrainConfig {
        c: parse(get("C")?, "C", dir)?,
        tol: parse(get("tol")?, "tol", dir)?,
        max_iter: parse(get("max_iter")?, "max_iter", dir)?,
        seed: parse(get("seed")?, "seed", dir)?,
        loss: parse::<Loss>(get("loss")?, "loss", dir)?,
    };
    let classes: Vec<&str> = mode.classes().iter().map(|c| c.as_str()).collect();
    if get("classes")? != classes.join(",") {
        return Err(bad(format!("classes '{}' do not match mode {mode}", get("classes")?)));
    }

    let mut names = Vec::with_capacity(features);
    for (k, line) in read(SPACE)?.lines().enumerate() {
        let (name, idx) = line.rsplit_once('\t').ok_or_else(|| bad(format!("bad space line {}", k + 1)))?;
        if idx.parse::<usize>().ok() != Some(k) {
            return Err(bad(format!("space line {} has index '{idx}'", k + 1)));
        }
        names.push(unescape(name).ok_or_else(|| bad(format!("bad escape on space line {}", k + 1)))?);
    }
    if names.len() != features {
        return Err(bad(format!("space has {} features, metadata says {features}", names.len())));
    }
    let space = FeatureSpace::from_names(names, selector)?;

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for class in stored_classes(mode) {
        let file = weights_file(*class);
        let text = read(&file)?;
        let mut lines = text.lines();
        let bias = lines
            .next()
            .and_then(|l| l.strip_prefix("bias\t"))
            .ok_or_else(|| bad(format!("{file} does not start with a bias line")))?;
        biases.push(parse::<f64>(bias, "bias", dir)?);
        let mut w = vec![0.0; features];
        let mut seen = vec![false; features];
        for (k, line) in lines.enumerate() {
            let (i, v) = line.split_once('\t').ok_or_else(|| bad(format!("bad line {} in {file}", k + 2)))?;
            let i: usize = parse(i, "index", dir)?;
            if i >= features || seen[i] {
                return Err(bad(format!("index {i} out of range or repeated in {file}")));
            }
            seen[i] = true;
            w[i] = parse(v, "weight", dir)?;
        }
        weights.push(w);
    }
    Ok(LinearModel::from_parts(topic, mode, weights, biases, space, config)?)
}

/// Every bundle directory at or below `root`, sorted by path.
pub fn discover(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        if dir.join(METADATA).is_file() {
            out.push(dir);
            continue;
        }
        let entries = fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&dir, e))?;
            if entry.file_type().map_err(|e| Error::io(entry.path(), e))?.is_dir() {
                stack.push(entry.path());
            }
        }
    }
    out.sort();
    Ok(out)
}
