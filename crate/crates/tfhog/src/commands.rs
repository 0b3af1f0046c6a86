//! The batch commands, callable without going through the binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use tfhog_core::eval::{derive_seed, run_split, wilcoxon_signed_rank, EvalReport, WilcoxonResult};
use tfhog_core::hog::hog;
use tfhog_core::learn::{model_select, Selection, Standardizer, SvmModel};
use tfhog_core::pooling::pool;
use tfhog_core::signal::{make_toy_dataset, segment, AudioClip, ToyConfig};
use tfhog_core::tfr::{cqt, mean_filter, to_image};
use tfhog_core::Matrix;

use crate::atomic::{read_text, with_suffix, write_atomic};
use crate::config::RunConfig;
use crate::dataset::{scan_dataset, Entry};
use crate::error::{Error, Result};
use crate::features::{read_features, write_features, FeatureFile};
use crate::model::{read_model, write_model};
use crate::pgm::write_pgm;
use crate::report::{
    manifest_text, parse_report, render, ReportContext, ReportSummary, SplitManifest,
};
use crate::wav::{read_clip, write_wav_f32};

/// Two-sided p-value below which a comparison is called significant.
pub const SIGNIFICANCE_LEVEL: f64 = 0.005;

/// `purpose` for the model-selection seed of [`train`].
const TRAIN_STREAM: u64 = 3;

/// Attaches the offending file to a core error, keeping its category.
fn in_file(path: &Path, e: tfhog_core::Error) -> Error {
    match e {
        tfhog_core::Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => Error::Data(format!("{}: {other}", path.display())),
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn manifest_path(report: &Path) -> PathBuf {
    with_suffix(report, ".splits")
}

pub struct ToygenSummary {
    pub files: usize,
}

/// Writes the synthetic chirp dataset as `out/<class>/<id>.wav`.
pub fn toygen(out: &Path, seed: u64, n_per_class: usize, force: bool) -> Result<ToygenSummary> {
    let cfg = ToyConfig {
        rng_seed: seed,
        n_per_class,
        ..ToyConfig::default()
    };
    cfg.validate()?;
    if out.exists() {
        let mut items = fs::read_dir(out).map_err(|e| Error::io(out, e))?;
        if items.next().is_some() {
            if !force {
                return Err(Error::Config(format!(
                    "{} is not empty; pass --force to overwrite",
                    out.display()
                )));
            }
            for class in [
                tfhog_core::signal::TOY_POSITIVE,
                tfhog_core::signal::TOY_NEGATIVE,
            ] {
                let dir = out.join(class);
                if dir.exists() {
                    fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                }
            }
        }
    }
    let clips = make_toy_dataset(&cfg)?;
    for clip in &clips {
        let dir = out.join(clip.label().expect("toy clips are labeled"));
        create_dir(&dir)?;
        write_wav_f32(
            &dir.join(format!("{}.wav", clip.source_id())),
            clip.samples(),
            clip.sample_rate_hz(),
        )?;
    }
    Ok(ToygenSummary { files: clips.len() })
}

/// Wall time spent in each stage, summed over clips (and threads).
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimes {
    pub read: Duration,
    pub cqt: Duration,
    pub image: Duration,
    pub filter: Duration,
    pub hog: Duration,
    pub pool: Duration,
}

impl StageTimes {
    fn add(mut self, o: Self) -> Self {
        self.read += o.read;
        self.cqt += o.cqt;
        self.image += o.image;
        self.filter += o.filter;
        self.hog += o.hog;
        self.pool += o.pool;
        self
    }

    pub fn named(&self) -> [(&'static str, Duration); 6] {
        [
            ("read", self.read),
            ("cqt", self.cqt),
            ("image", self.image),
            ("filter", self.filter),
            ("hog", self.hog),
            ("pool", self.pool),
        ]
    }
}

pub struct ExtractSummary {
    pub features: FeatureFile,
    pub n_classes: usize,
    pub skipped: usize,
    pub times: StageTimes,
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    *slot += t.elapsed();
    out
}

fn image_file_name(source_id: &str) -> String {
    format!("{}.pgm", source_id.replace(['/', '#'], "_"))
}

type Rows = Vec<(String, Vec<f64>)>;

fn extract_entry(
    entry: &Entry,
    cfg: &RunConfig,
    image_dir: Option<&Path>,
) -> Result<(Rows, StageTimes)> {
    let mut t = StageTimes::default();
    let p = &cfg.pipeline;
    let clip = timed(&mut t.read, || {
        read_clip(&entry.path, Some(entry.class.clone()), &entry.source_id)
    })?;
    let clips: Vec<AudioClip> = if cfg.segment_seconds > 0.0 {
        let pieces = segment(&clip, cfg.segment_seconds).map_err(|e| in_file(&entry.path, e))?;
        if pieces.is_empty() {
            return Err(Error::Data(format!(
                "{}: shorter than one {} s segment",
                entry.path.display(),
                cfg.segment_seconds
            )));
        }
        pieces
    } else {
        vec![clip]
    };
    let mut rows = Vec::with_capacity(clips.len());
    for clip in &clips {
        let cqt_cfg = p.cqt_config(clip.sample_rate_hz());
        let spectrum =
            timed(&mut t.cqt, || cqt(clip, &cqt_cfg)).map_err(|e| in_file(&entry.path, e))?;
        let mut img = timed(&mut t.image, || {
            to_image(&spectrum.magnitude(), p.image_size, p.db_floor)
        })
        .map_err(|e| in_file(&entry.path, e))?;
        img.meta.source_id = clip.source_id().to_string();
        img.meta.config_hash = p.signature();
        let img = timed(&mut t.filter, || mean_filter(&img, p.filter_size))
            .map_err(|e| in_file(&entry.path, e))?;
        if let Some(dir) = image_dir {
            write_pgm(
                &dir.join(image_file_name(clip.source_id())),
                img.pixels(),
                1,
                true,
            )?;
        }
        let grid = timed(&mut t.hog, || hog(&img, &p.hog)).map_err(|e| in_file(&entry.path, e))?;
        let fv = timed(&mut t.pool, || pool(&grid, &p.pool_config()))
            .map_err(|e| in_file(&entry.path, e))?;
        rows.push((clip.source_id().to_string(), fv.values));
    }
    Ok((rows, t))
}

/// Scans `data`, extracts one feature row per clip (or segment) in
/// parallel, and writes the feature file. Row order follows the scan.
pub fn extract(
    data: &Path,
    cfg: &RunConfig,
    out: &Path,
    image_dir: Option<&Path>,
) -> Result<ExtractSummary> {
    cfg.validate()?;
    let dim = cfg.pipeline.feature_dim()?;
    let scan = scan_dataset(data)?;
    if let Some(dir) = image_dir {
        create_dir(dir)?;
    }
    let per_entry = scan
        .entries
        .par_iter()
        .map(|e| extract_entry(e, cfg, image_dir))
        .collect::<Result<Vec<_>>>()?;

    let mut times = StageTimes::default();
    let (mut values, mut labels, mut ids) = (Vec::new(), Vec::new(), Vec::new());
    for (entry, (rows, t)) in scan.entries.iter().zip(per_entry) {
        times = times.add(t);
        for (id, row) in rows {
            if row.len() != dim {
                return Err(Error::Core(tfhog_core::Error::Argument(format!(
                    "{id}: feature length {} differs from the configured {dim}",
                    row.len()
                ))));
            }
            values.extend(row);
            labels.push(entry.class.clone());
            ids.push(id);
        }
    }
    let matrix = Matrix::from_vec(ids.len(), dim, values)?;
    let features = FeatureFile::new(matrix, labels, ids, cfg.extraction_hash())?;
    write_features(out, &features)?;
    Ok(ExtractSummary {
        features,
        n_classes: scan.classes.len(),
        skipped: scan.skipped,
        times,
    })
}

pub struct ExperimentOutput {
    pub report: EvalReport,
    pub classes: Vec<String>,
    pub text: String,
    pub warnings: Vec<String>,
}

/// Runs the split protocol on a feature file (splits in parallel) and
/// writes the report, its split manifest and optionally a confusion heat map.
pub fn experiment(
    features: &Path,
    cfg: &RunConfig,
    report_path: &Path,
    heatmap: Option<&Path>,
) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let file = read_features(features)?;
    let mut warnings = Vec::new();
    if file.config_hash != cfg.extraction_hash() {
        warnings.push(format!(
            "{} was extracted with different feature settings than the given configuration",
            features.display()
        ));
    }
    let (classes, labels) = file.class_indices();
    let protocol = cfg.protocol();
    let outcomes = (0..protocol.n_splits)
        .into_par_iter()
        .map(|s| run_split(&file.matrix, &labels, classes.len(), &protocol, s))
        .collect::<tfhog_core::Result<Vec<_>>>()?;
    let report = EvalReport::from_outcomes(classes.len(), outcomes)?;
    let total_test: u64 = report
        .outcomes
        .iter()
        .map(|o| o.split.test.len() as u64)
        .sum();
    if report.confusion_sum.total() != total_test {
        return Err(Error::Core(tfhog_core::Error::Argument(
            "confusion counts do not match the number of test predictions".into(),
        )));
    }

    let ctx = ReportContext {
        classes: &classes,
        ids: &file.ids,
        config: cfg,
        features_hash: file.config_hash,
    };
    let text = render(&report, &ctx);
    let manifests: Vec<SplitManifest> = report
        .outcomes
        .iter()
        .map(|o| SplitManifest::from_outcome(o, &file.ids))
        .collect();
    write_atomic(report_path, text.as_bytes())?;
    write_atomic(
        &manifest_path(report_path),
        manifest_text(cfg.seed, &manifests).as_bytes(),
    )?;
    if let Some(path) = heatmap {
        write_pgm(
            path,
            &report.confusion_sum.column_normalize().values,
            32,
            false,
        )?;
    }
    warnings.extend(
        report
            .outcomes
            .iter()
            .flat_map(|o| o.warnings.iter().cloned()),
    );
    warnings.dedup();
    Ok(ExperimentOutput {
        report,
        classes,
        text,
        warnings,
    })
}

pub struct Comparison {
    pub a: ReportSummary,
    pub b: ReportSummary,
    pub test: WilcoxonResult,
    pub significant: bool,
}

/// Wilcoxon signed-rank test on the per-split MAPs of two reports that
/// used the same splits.
pub fn compare(a: &Path, b: &Path) -> Result<Comparison> {
    let ra =
        parse_report(&read_text(a)?).map_err(|e| Error::Data(format!("{}: {e}", a.display())))?;
    let rb =
        parse_report(&read_text(b)?).map_err(|e| Error::Data(format!("{}: {e}", b.display())))?;
    if ra.n_splits != rb.n_splits {
        return Err(Error::Data(format!(
            "reports have different split counts ({} vs {})",
            ra.n_splits, rb.n_splits
        )));
    }
    if ra.seed != rb.seed {
        return Err(Error::Data(format!(
            "reports used different seeds ({} vs {})",
            ra.seed, rb.seed
        )));
    }
    if ra.splits_hash != rb.splits_hash {
        return Err(Error::Data(
            "reports were evaluated on different splits".into(),
        ));
    }
    let test = wilcoxon_signed_rank(&ra.per_split_map, &rb.per_split_map)
        .map_err(|e| Error::Data(format!("cannot compare: {e}")))?;
    Ok(Comparison {
        significant: test.p_value < SIGNIFICANCE_LEVEL,
        a: ra,
        b: rb,
        test,
    })
}

pub struct TrainOutput {
    pub model: SvmModel,
    pub selection: Selection,
}

/// Selects hyperparameters on all rows of a feature file and fits one model.
pub fn train(features: &Path, cfg: &RunConfig, model_path: &Path) -> Result<TrainOutput> {
    cfg.validate()?;
    let file = read_features(features)?;
    let (classes, labels) = file.class_indices();
    let standardizer = Standardizer::fit(&file.matrix)?;
    let xs = standardizer.apply(&file.matrix)?;
    let selection = model_select(
        &xs,
        &labels,
        classes.len(),
        &cfg.model_grid(),
        cfg.n_resample,
        derive_seed(cfg.seed, TRAIN_STREAM, 0),
        cfg.tol,
    )?;
    let model = SvmModel::fit(&file.matrix, &labels, classes, selection.best, cfg.tol)?;
    write_model(model_path, &model)?;
    Ok(TrainOutput { model, selection })
}

pub struct PredictedRow {
    pub id: String,
    pub truth: String,
    pub predicted: String,
}

pub fn predict(model_path: &Path, features: &Path) -> Result<Vec<PredictedRow>> {
    let model = read_model(model_path)?;
    let file = read_features(features)?;
    if file.matrix.cols() != model.standardizer().dim() {
        return Err(Error::Data(format!(
            "features have {} dimensions, the model expects {}",
            file.matrix.cols(),
            model.standardizer().dim()
        )));
    }
    (0..file.matrix.rows())
        .map(|i| {
            let p = model.predict(file.matrix.row(i))?;
            Ok(PredictedRow {
                id: file.ids[i].clone(),
                truth: file.labels[i].clone(),
                predicted: model.classes()[p.class].clone(),
            })
        })
        .collect()
}
