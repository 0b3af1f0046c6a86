//! Experiment reports and split manifests.
//!
//! A report is `key = value` header lines followed by `[section]` blocks of
//! CSV. Numbers are written in shortest round-trip form, so parsing a
//! report gives back the exact values. Nothing time-dependent is written.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use tfhog_core::eval::{EvalReport, SplitOutcome};
use tfhog_core::learn::KernelSpec;

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const FORMAT: u32 = 1;

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Train and test source ids of one split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitManifest {
    pub split_index: usize,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl SplitManifest {
    pub fn from_outcome(o: &SplitOutcome, ids: &[String]) -> Self {
        Self {
            split_index: o.split_index,
            train_ids: o.split.train.iter().map(|&i| ids[i].clone()).collect(),
            test_ids: o.split.test.iter().map(|&i| ids[i].clone()).collect(),
        }
    }
}

/// Tab-separated `split, role, id` rows after a `# seed = N` line.
pub fn manifest_text(seed: u64, manifests: &[SplitManifest]) -> String {
    let mut s = format!("# seed = {seed}\nsplit\trole\tid\n");
    for m in manifests {
        for (role, ids) in [("train", &m.train_ids), ("test", &m.test_ids)] {
            for id in ids {
                let _ = writeln!(s, "{}\t{role}\t{id}", m.split_index);
            }
        }
    }
    s
}

pub fn parse_manifest(text: &str) -> Result<(u64, Vec<SplitManifest>)> {
    let mut lines = text.lines();
    let seed = lines
        .next()
        .and_then(|l| l.strip_prefix("# seed = "))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Data("manifest must start with '# seed = N'".into()))?;
    if lines.next() != Some("split\trole\tid") {
        return Err(Error::Data("manifest column header is missing".into()));
    }
    let mut out: Vec<SplitManifest> = Vec::new();
    for (n, line) in lines.enumerate() {
        let parts: Vec<&str> = line.splitn(3, '\t').collect();
        let bad = || Error::Data(format!("manifest line {}: {line:?}", n + 3));
        if parts.len() != 3 {
            return Err(bad());
        }
        let idx: usize = parts[0].parse().map_err(|_| bad())?;
        while out.len() <= idx {
            out.push(SplitManifest {
                split_index: out.len(),
                train_ids: Vec::new(),
                test_ids: Vec::new(),
            });
        }
        match parts[1] {
            "train" => out[idx].train_ids.push(parts[2].to_string()),
            "test" => out[idx].test_ids.push(parts[2].to_string()),
            _ => return Err(bad()),
        }
    }
    Ok((seed, out))
}

/// Everything a report records besides the core evaluation results.
pub struct ReportContext<'a> {
    pub classes: &'a [String],
    pub ids: &'a [String],
    pub config: &'a RunConfig,
    pub features_hash: [u8; 32],
}

pub fn splits_hash(manifest: &str) -> String {
    hex::encode(Sha256::digest(manifest.as_bytes()))
}

pub fn render(report: &EvalReport, ctx: &ReportContext<'_>) -> String {
    let manifests: Vec<SplitManifest> = report
        .outcomes
        .iter()
        .map(|o| SplitManifest::from_outcome(o, ctx.ids))
        .collect();
    let mut s = String::from("# tfhog experiment report\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("format", FORMAT.to_string());
    kv("n_classes", report.n_classes.to_string());
    kv("n_examples", ctx.ids.len().to_string());
    kv("n_splits", report.per_split_map.len().to_string());
    kv("seed", ctx.config.seed.to_string());
    kv("map_mean", report.map_mean.to_string());
    kv("map_std", report.map_std.to_string());
    kv("map_of_confusion", report.map_of_confusion.to_string());
    kv("features_config", hex::encode(ctx.features_hash));
    kv(
        "splits_hash",
        splits_hash(&manifest_text(ctx.config.seed, &manifests)),
    );

    s.push_str("\n[config]\n");
    for (k, v) in ctx.config.entries() {
        let _ = writeln!(s, "{k} = {v}");
    }

    s.push_str("\n[classes]\nindex,name\n");
    for (i, c) in ctx.classes.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", csv_field(c));
    }

    s.push_str("\n[per_split]\nsplit,map,validation_map,c,sigma,n_train,n_test\n");
    for o in &report.outcomes {
        let sigma = match o.chosen.kernel {
            KernelSpec::Linear => String::new(),
            KernelSpec::Gaussian { sigma } => sigma.to_string(),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{sigma},{},{}",
            o.split_index,
            o.test_map,
            o.validation_map,
            o.chosen.c,
            o.split.train.len(),
            o.split.test.len()
        );
    }

    s.push_str("\n[confusion]\ntrue\\predicted");
    for c in ctx.classes {
        let _ = write!(s, ",{}", csv_field(c));
    }
    s.push('\n');
    for (i, c) in ctx.classes.iter().enumerate() {
        s.push_str(&csv_field(c));
        for j in 0..report.n_classes {
            let _ = write!(s, ",{}", report.confusion_sum.get(i, j));
        }
        s.push('\n');
    }

    let warnings: Vec<&String> = report.outcomes.iter().flat_map(|o| &o.warnings).collect();
    if !warnings.is_empty() {
        s.push_str("\n[warnings]\n");
        for w in warnings {
            let _ = writeln!(s, "{w}");
        }
    }
    s
}

/// The parts of a report needed to compare two runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub n_splits: usize,
    pub seed: u64,
    pub splits_hash: String,
    pub map_mean: f64,
    pub map_std: f64,
    pub map_of_confusion: f64,
    pub per_split_map: Vec<f64>,
}

pub fn parse_report(text: &str) -> Result<ReportSummary> {
    let mut header = std::collections::BTreeMap::new();
    let mut section = "";
    let mut per_split = Vec::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = if name == "per_split" {
                "per_split"
            } else {
                "other"
            };
            continue;
        }
        match section {
            "" => {
                let (k, v) = line
                    .split_once(" = ")
                    .ok_or_else(|| Error::Data(format!("bad report header line {line:?}")))?;
                header.insert(k.to_string(), v.to_string());
            }
            "per_split" if !line.starts_with("split,") => {
                let mut cells = line.split(',');
                let bad = || Error::Data(format!("bad per-split row {line:?}"));
                let idx: usize = cells.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
                let map: f64 = cells.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
                if idx != per_split.len() {
                    return Err(bad());
                }
                per_split.push(map);
            }
            _ => {}
        }
    }
    let get = |k: &str| {
        header
            .get(k)
            .ok_or_else(|| Error::Data(format!("report has no {k} entry")))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?
            .parse()
            .map_err(|_| Error::Data(format!("report entry {k} is not a number")))
    };
    let format: u32 = get("format")?.parse().unwrap_or(0);
    if format != FORMAT {
        return Err(Error::Data(format!("unsupported report format {format}")));
    }
    let n_splits: usize = get("n_splits")?
        .parse()
        .map_err(|_| Error::Data("report entry n_splits is not an integer".into()))?;
    if n_splits != per_split.len() {
        return Err(Error::Data(format!(
            "report declares {n_splits} splits but lists {}",
            per_split.len()
        )));
    }
    Ok(ReportSummary {
        n_splits,
        seed: get("seed")?
            .parse()
            .map_err(|_| Error::Data("report entry seed is not an integer".into()))?,
        splits_hash: get("splits_hash")?.clone(),
        map_mean: num("map_mean")?,
        map_std: num("map_std")?,
        map_of_confusion: num("map_of_confusion")?,
        per_split_map: per_split,
    })
}
