use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tfhog::commands;
use tfhog::{Error, Result, RunConfig};
use tfhog_core::learn::KernelSpec;

/// Audio scene classification with HOG features of constant-Q images.
#[derive(Parser)]
#[command(name = "tfhog", version)]
struct Cli {
    /// Worker threads for extraction and experiments (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic rising/falling chirp dataset.
    Toygen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        n_per_class: usize,
        /// Replace the class folders of a non-empty output directory.
        #[arg(long)]
        force: bool,
    },
    /// Compute one feature vector per clip of a dataset.
    Extract {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also dump every filtered image as PGM into this directory.
        #[arg(long)]
        images: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the repeated-split evaluation and write a report.
    Experiment {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Column-normalized confusion matrix as PGM.
        #[arg(long)]
        heatmap: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Wilcoxon signed-rank test between the per-split MAPs of two reports.
    Compare {
        #[arg(long)]
        report_a: PathBuf,
        #[arg(long)]
        report_b: PathBuf,
    },
    /// Select hyperparameters and fit one model on a whole feature file.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Classify every row of a feature file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
    },
}

/// Settings are applied in order: preset, config file, shortcut flags, `--set`.
#[derive(Args)]
struct ConfigArgs {
    /// Starting configuration: default or toy.
    #[arg(long, default_value = "default")]
    preset: String,
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` setting (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// HOG cell side in pixels [default: 8]
    #[arg(long)]
    cell_size: Option<usize>,
    /// Unsigned orientation bins [default: 8]
    #[arg(long)]
    n_orient: Option<usize>,
    /// both, signed or unsigned [default: both]
    #[arg(long)]
    variant: Option<String>,
    /// Append the normalization factors [default: false]
    #[arg(long)]
    factors: Option<bool>,
    /// Mean filter side in pixels [default: 15]
    #[arg(long)]
    filter_size: Option<usize>,
    /// marginalized, full or grid:FxT [default: marginalized]
    #[arg(long)]
    pool: Option<String>,
    /// linear or gaussian [default: linear]
    #[arg(long)]
    kernel: Option<String>,
    /// Number of train/test splits [default: 20]
    #[arg(long)]
    n_splits: Option<usize>,
    /// Protocol seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::preset(&self.preset)?;
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let shortcuts = [
            ("hog.cell_size", self.cell_size.map(|v| v.to_string())),
            ("hog.n_orient", self.n_orient.map(|v| v.to_string())),
            ("hog.variant", self.variant.clone()),
            ("hog.factors", self.factors.map(|v| v.to_string())),
            ("image.filter_size", self.filter_size.map(|v| v.to_string())),
            ("pool.mode", self.pool.clone()),
            ("svm.kernel", self.kernel.clone()),
            ("protocol.n_splits", self.n_splits.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
        ];
        for (key, value) in shortcuts {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        for a in &self.set {
            cfg.apply_assignment(a)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sigma_text(k: &KernelSpec) -> String {
    match k {
        KernelSpec::Linear => "-".into(),
        KernelSpec::Gaussian { sigma } => sigma.to_string(),
    }
}

fn secs(d: std::time::Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Toygen {
            out,
            seed,
            n_per_class,
            force,
        } => {
            let s = commands::toygen(&out, seed, n_per_class, force)?;
            println!("files\t{}", s.files);
            println!("out\t{}", out.display());
        }
        Command::Extract {
            data,
            out,
            images,
            config,
        } => {
            let cfg = config.resolve()?;
            let s = commands::extract(&data, &cfg, &out, images.as_deref())?;
            println!("rows\t{}", s.features.matrix.rows());
            println!("dim\t{}", s.features.matrix.cols());
            println!("classes\t{}", s.n_classes);
            println!("skipped\t{}", s.skipped);
            for (stage, t) in s.times.named() {
                println!("time_{stage}_s\t{}", secs(t));
            }
        }
        Command::Experiment {
            features,
            report,
            heatmap,
            config,
        } => {
            let cfg = config.resolve()?;
            let out = commands::experiment(&features, &cfg, &report, heatmap.as_deref())?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            println!("split\tmap\tc\tsigma");
            for o in &out.report.outcomes {
                println!(
                    "{}\t{:.6}\t{}\t{}",
                    o.split_index,
                    o.test_map,
                    o.chosen.c,
                    sigma_text(&o.chosen.kernel)
                );
            }
            println!("map_mean\t{:.6}", out.report.map_mean);
            println!("map_std\t{:.6}", out.report.map_std);
            println!("map_of_confusion\t{:.6}", out.report.map_of_confusion);
            println!("report\t{}", report.display());
        }
        Command::Compare { report_a, report_b } => {
            let c = commands::compare(&report_a, &report_b)?;
            println!("n\t{}", c.test.n);
            println!("map_mean_a\t{:.6}", c.a.map_mean);
            println!("map_mean_b\t{:.6}", c.b.map_mean);
            println!("w_plus\t{}", c.test.w_plus);
            println!("w_minus\t{}", c.test.w_minus);
            println!("W\t{}", c.test.statistic);
            println!("p\t{}", c.test.p_value);
            println!("method\t{:?}", c.test.method);
            let verdict = if c.significant {
                "significant"
            } else {
                "not significant"
            };
            println!("result\t{verdict} at {}", commands::SIGNIFICANCE_LEVEL);
        }
        Command::Train {
            features,
            model,
            config,
        } => {
            let cfg = config.resolve()?;
            let out = commands::train(&features, &cfg, &model)?;
            for w in &out.selection.warnings {
                eprintln!("warning: {w}");
            }
            let h = &out.selection.best;
            println!("c\t{}", h.c);
            println!("sigma\t{}", sigma_text(&h.kernel));
            println!("validation_map\t{:.6}", out.selection.best_score);
            println!("classes\t{}", out.model.classes().len());
            println!("model\t{}", model.display());
        }
        Command::Predict { model, features } => {
            let rows = commands::predict(&model, &features)?;
            println!("id\ttruth\tpredicted");
            let mut correct = 0;
            for r in &rows {
                correct += usize::from(r.truth == r.predicted);
                println!("{}\t{}\t{}", r.id, r.truth, r.predicted);
            }
            if !rows.is_empty() {
                eprintln!("accuracy\t{:.6}", correct as f64 / rows.len() as f64);
            }
        }
    }
    Ok(())
}

fn init_threads(n: usize) -> Result<()> {
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads {n}: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads(cli.threads).and_then(|()| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
