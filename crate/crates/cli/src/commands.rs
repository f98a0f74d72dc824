use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use grn_eval::baselines::{self, BlockReport, Method, MethodConfig};
use grn_eval::data::{self, LoadOptions, MatrixFormat, PerturbDataset};
use grn_eval::eval::{self, EvalConfig, EvalReport, ReferenceNetwork};
use grn_eval::graph::{to_edge_list, EdgeList};
use grn_eval::qc::{self, QcConfig, QcReport};
use grn_eval::ranking::{self, OverlapRule, ScoreRecord, Scoreboard};
use grn_eval::rng::derive_seed;
use grn_eval::synthetic::{self, SweepResult, SyntheticSpec};
use grn_eval::ENGINE_VERSION;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data_err(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| data_err(format!("cannot create {}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| data_err(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    write_text(path, &text)
}

fn load(cfg: &RunConfig, dir: &Path) -> Result<PerturbDataset, CliError> {
    let opts = LoadOptions {
        allow_negative: cfg.allow_negative,
    };
    Ok(data::load_dataset_with(dir, opts)?)
}

fn dataset_path(cfg: &RunConfig, arg: Option<PathBuf>) -> Result<PathBuf, CliError> {
    arg.or_else(|| cfg.dataset.clone())
        .ok_or_else(|| usage("no dataset given (use --dataset or set `dataset` in the config)"))
}

fn save(ds: &PerturbDataset, dir: &Path) -> Result<(), CliError> {
    Ok(data::save_dataset(ds, dir, MatrixFormat::MatrixMarket)?)
}

fn write_timing(cfg: &RunConfig, out: &Path, value: serde_json::Value) -> Result<(), CliError> {
    if cfg.timing {
        write_json(&out.join("timing.json"), &value)?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct QcArgs {
    /// Dataset directory.
    #[arg(long, value_name = "DIR")]
    dataset: Option<PathBuf>,
    /// `label<TAB>fraction` knockdown table.
    #[arg(long, value_name = "PATH")]
    knockdown: Option<PathBuf>,
}

#[derive(Serialize)]
struct QcOutput<'a> {
    engine: &'a str,
    dataset: String,
    config: QcConfig,
    n_cells_in: usize,
    n_cells_out: usize,
    report: &'a QcReport,
}

pub fn qc(cfg: &mut RunConfig, args: QcArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let path = dataset_path(cfg, args.dataset)?;
    if let Some(k) = args.knockdown {
        cfg.qc.knockdown = Some(k);
    }
    let params = cfg.qc.params();
    params.validate()?;
    let ds = load(cfg, &path)?;
    let knockdown = cfg.qc.knockdown.as_ref().map(qc::read_knockdown_tsv).transpose()?;
    let (filtered, report) = if cfg.qc.enabled {
        qc::apply_qc(&ds, &params, knockdown.as_ref())?
    } else {
        (ds.clone(), qc::strong_perturbations(&ds, &params, knockdown.as_ref())?)
    };
    let out = cfg.out_dir();
    create_dir(&out)?;
    save(&filtered, &out.join("filtered"))?;
    write_json(
        &out.join("qc_report.json"),
        &QcOutput {
            engine: ENGINE_VERSION,
            dataset: path.display().to_string(),
            config: params,
            n_cells_in: ds.n_cells(),
            n_cells_out: filtered.n_cells(),
            report: &report,
        },
    )?;
    println!(
        "qc: {} of {} labels retained, {} -> {} cells",
        report.retained.len(),
        report.labels.len(),
        ds.n_cells(),
        filtered.n_cells()
    );
    write_timing(cfg, &out, json!({ "qc": started.elapsed().as_secs_f64() }))
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, value_name = "DIR")]
    dataset: Option<PathBuf>,
    /// Held-out fraction of every label stratum.
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Keep this fraction of training cells per stratum.
    #[arg(long)]
    cell_fraction: Option<f64>,
    /// Keep this fraction of training intervention targets.
    #[arg(long)]
    intervention_fraction: Option<f64>,
}

pub fn split(cfg: &mut RunConfig, args: SplitArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let path = dataset_path(cfg, args.dataset)?;
    let s = &mut cfg.split;
    if let Some(f) = args.test_fraction {
        s.test_fraction = f;
    }
    if args.cell_fraction.is_some() {
        s.cell_fraction = args.cell_fraction;
    }
    if args.intervention_fraction.is_some() {
        s.intervention_fraction = args.intervention_fraction;
    }
    let ds = load(cfg, &path)?;
    let seed = derive_seed(cfg.seed, "split", 0);
    let split = data::stratified_split(&ds, cfg.split.test_fraction, seed)?;
    let mut train = split.train.clone();
    if let Some(f) = cfg.split.intervention_fraction {
        train = data::subsample_interventions(&train, f, derive_seed(cfg.seed, "subsample", 0))?;
    }
    if let Some(f) = cfg.split.cell_fraction {
        train = data::subsample_cells(&train, f, derive_seed(cfg.seed, "subsample", 1))?;
    }
    let out = cfg.out_dir();
    create_dir(&out)?;
    save(&train, &out.join("train"))?;
    save(&split.test, &out.join("test"))?;
    write_json(
        &out.join("split.json"),
        &json!({
            "engine": ENGINE_VERSION,
            "dataset": path.display().to_string(),
            "master_seed": cfg.seed,
            "config": cfg.split,
            "summary": split.summary(),
            "n_train_after_subsampling": train.n_cells(),
        }),
    )?;
    println!("split: {} train / {} test cells", train.n_cells(), split.test.n_cells());
    write_timing(cfg, &out, json!({ "split": started.elapsed().as_secs_f64() }))
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Training dataset directory.
    #[arg(long, value_name = "DIR")]
    dataset: Option<PathBuf>,
    /// random, sortnregress or notears_linear.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    partition_size: Option<usize>,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    engine: &'a str,
    dataset: String,
    master_seed: u64,
    config: &'a MethodConfig,
    n_cells: usize,
    n_genes: usize,
    n_edges: usize,
    converged: bool,
    final_h: Option<f64>,
    blocks: &'a [BlockReport],
}

pub fn run(cfg: &mut RunConfig, args: RunArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let path = dataset_path(cfg, args.dataset)?;
    let m = &mut cfg.method;
    if let Some(name) = &args.method {
        m.name = name.parse::<Method>()?;
    }
    if let Some(k) = args.k {
        m.k = k;
    }
    if let Some(l) = args.lambda1 {
        m.lambda1 = l;
    }
    if args.partition_size.is_some() {
        m.partition_size = args.partition_size;
    }
    m.seed = derive_seed(cfg.seed, "method", 0);
    cfg.method.validate()?;
    let ds = load(cfg, &path)?;
    let output = baselines::run_method(&cfg.method, &ds)?;
    let final_h = output
        .blocks
        .iter()
        .filter_map(|b| b.notears.map(|d| d.h))
        .fold(None, |acc: Option<f64>, h| Some(acc.map_or(h, |a| a.max(h))));

    let out = cfg.out_dir();
    create_dir(&out)?;
    output.edges.write_tsv(out.join("network.tsv"))?;
    write_json(
        &out.join("run_metadata.json"),
        &RunMetadata {
            engine: ENGINE_VERSION,
            dataset: path.display().to_string(),
            master_seed: cfg.seed,
            config: &cfg.method,
            n_cells: ds.n_cells(),
            n_genes: ds.n_genes(),
            n_edges: output.edges.len(),
            converged: output.converged(),
            final_h,
            blocks: &output.blocks,
        },
    )?;
    if !output.converged() {
        eprintln!("warning: NOTEARS did not reach h <= {} (final h = {:?})", cfg.method.h_tolerance, final_h);
    }
    println!("run: {} produced {} edges", cfg.method.name, output.edges.len());
    write_timing(cfg, &out, json!({ "run": started.elapsed().as_secs_f64() }))
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted network TSV.
    network: PathBuf,
    /// Test split directory.
    #[arg(long, value_name = "DIR")]
    test: Option<PathBuf>,
    /// Undirected reference network TSV (repeatable).
    #[arg(long = "reference", value_name = "PATH")]
    references: Vec<PathBuf>,
    #[arg(long)]
    n_pairs: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "undefined".into())
}

pub fn eval(cfg: &mut RunConfig, args: EvalArgs) -> Result<(), CliError> {
    let e = &mut cfg.eval;
    if let Some(t) = args.test {
        e.test = Some(t);
    }
    if !args.references.is_empty() {
        e.references = args.references;
    }
    if let Some(n) = args.n_pairs {
        e.n_pairs = n;
    }
    if let Some(a) = args.alpha {
        e.alpha = a;
    }
    let test_path = cfg
        .eval
        .test
        .clone()
        .or_else(|| cfg.dataset.clone())
        .ok_or_else(|| usage("no test split given (use --test or set eval.test)"))?;
    let eval_cfg = EvalConfig {
        n_pairs: cfg.eval.n_pairs,
        alpha: cfg.eval.alpha,
        seed: derive_seed(cfg.seed, "eval", 0),
    };
    if eval_cfg.n_pairs == 0 {
        return Err(usage("n_pairs must be >= 1"));
    }
    let pred = EdgeList::read_tsv(&args.network)?;
    let test = load(cfg, &test_path)?;
    let refs = cfg
        .eval
        .references
        .iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            ReferenceNetwork::read_tsv(&name, p)
        })
        .collect::<grn_eval::Result<Vec<_>>>()?;
    let report = eval::evaluate(&pred, &test, &refs, &eval_cfg)?;

    let out = cfg.out_dir();
    create_dir(&out)?;
    let stored: EvalReport = if cfg.timing { report.clone() } else { report.without_timing() };
    write_json(&out.join("eval_report.json"), &stored)?;
    if let Some(t) = report.timing_seconds {
        write_timing(cfg, &out, serde_json::to_value(t).expect("timing serializes"))?;
    }
    let flag = if report.bio.empty_prediction { " (empty prediction)" } else { "" };
    println!(
        "mean_w={} for={} precision={:.4} recall={:.4}{flag}",
        fmt_opt(report.stat.mean_wasserstein),
        fmt_opt(report.stat.for_rate),
        report.bio.pooled.precision,
        report.bio.pooled.recall
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Only write the truth graph and datasets; skip the sweep.
    #[arg(long)]
    export_only: bool,
    /// Comma-separated regularization values.
    #[arg(long, value_delimiter = ',')]
    reg_values: Option<Vec<f64>>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Number of variables.
    #[arg(long)]
    d: Option<usize>,
}

pub fn synth(cfg: &mut RunConfig, args: SynthArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let s = &mut cfg.synth;
    if let Some(r) = args.reg_values {
        s.reg_values = r;
    }
    if let Some(r) = args.repeats {
        s.repeats = r;
    }
    if let Some(d) = args.d {
        s.spec.d = d;
    }
    s.spec.seed = derive_seed(cfg.seed, "synth", 0);
    let spec: SyntheticSpec = s.spec.clone();
    spec.validate()?;

    let out = cfg.out_dir();
    create_dir(&out)?;
    let sc = &cfg.synth.sweep;
    let dag = synthetic::gen_dag(&spec)?;
    let ds = synthetic::sample_anm(&dag, &spec, sc.n_obs_train, sc.n_obs_test, sc.n_int_per_var)?;
    to_edge_list(&dag, ds.data.genes()).write_tsv(out.join("truth.tsv"))?;
    save(&ds.data, &out.join("train"))?;
    save(&ds.test, &out.join("test"))?;

    let sweep: Option<SweepResult> = if args.export_only {
        None
    } else {
        Some(synthetic::validate_metrics(&spec, &cfg.synth.reg_values, cfg.synth.repeats, sc)?)
    };
    if let Some(res) = &sweep {
        write_text(&out.join("sweep.csv"), &synthetic::sweep_csv(&res.rows))?;
        println!(
            "synth: {} sweep cells, spearman(mean_w, shd) = {}",
            res.rows.len(),
            fmt_opt(res.spearman_w_shd)
        );
    } else {
        println!("synth: exported {} variables, {} true edges", spec.d, dag.n_edges());
    }
    write_json(
        &out.join("synth.json"),
        &json!({
            "engine": ENGINE_VERSION,
            "master_seed": cfg.seed,
            "config": cfg.synth,
            "n_true_edges": dag.n_edges(),
            "sweep": sweep,
        }),
    )?;
    write_timing(cfg, &out, json!({ "synth": started.elapsed().as_secs_f64() }))
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Score CSVs with header `model,metric,mean,std`.
    inputs: Vec<PathBuf>,
    /// Evaluation report of one run, as MODEL=PATH (repeatable).
    #[arg(long = "report", value_name = "MODEL=PATH")]
    reports: Vec<String>,
    /// Merge against the hull of the current group.
    #[arg(long)]
    hull: bool,
}

fn read_scores(path: &Path) -> Result<Vec<ScoreRecord>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::NotFound => {
            data_err(format!("missing file: {}", path.display()))
        }
        _ => data_err(format!("{}: {e}", path.display())),
    })?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| data_err(format!("{}: {e}", path.display()))))
        .collect()
}

fn read_reports(specs: &[String]) -> Result<Vec<(String, Vec<EvalReport>)>, CliError> {
    let mut grouped: Vec<(String, Vec<EvalReport>)> = Vec::new();
    for spec in specs {
        let (model, path) = spec
            .split_once('=')
            .ok_or_else(|| usage(format!("--report expects MODEL=PATH, got '{spec}'")))?;
        let text = fs::read_to_string(path).map_err(|e| data_err(format!("cannot read {path}: {e}")))?;
        let report: EvalReport =
            serde_json::from_str(&text).map_err(|e| data_err(format!("{path}: not an evaluation report: {e}")))?;
        match grouped.iter_mut().find(|(m, _)| m == model) {
            Some((_, v)) => v.push(report),
            None => grouped.push((model.to_string(), vec![report])),
        }
    }
    Ok(grouped)
}

fn scoreboard_csv(board: &Scoreboard) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["position".to_string(), "model".to_string()];
    header.extend(board.metrics.iter().map(|m| format!("rank_{m}")));
    header.push("mean_rank".into());
    for m in &board.metrics {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_std"));
    }
    let io = |e: csv::Error| data_err(e.to_string());
    w.write_record(&header).map_err(io)?;
    for (i, row) in board.rows.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string(), row.model.clone()];
        rec.extend(board.metrics.iter().map(|m| row.ranks[m].to_string()));
        rec.push(row.mean_rank.to_string());
        for m in &board.metrics {
            rec.push(row.scores[m].mean.to_string());
            rec.push(row.scores[m].std.to_string());
        }
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| data_err(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

pub fn rank(cfg: &mut RunConfig, args: RankArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if !args.inputs.is_empty() {
        cfg.rank.inputs = args.inputs;
    }
    cfg.rank.hull |= args.hull;
    let rule = if cfg.rank.hull { OverlapRule::Hull } else { OverlapRule::Anchor };

    let board = if !args.reports.is_empty() {
        if !cfg.rank.inputs.is_empty() {
            return Err(usage("give either score CSVs or --report entries, not both"));
        }
        let grouped = read_reports(&args.reports)?;
        let board = ranking::scoreboard_from_reports(&grouped)?;
        if rule == OverlapRule::Hull {
            let scores: Vec<_> = board
                .rows
                .iter()
                .map(|r| ranking::ModelScores {
                    model: r.model.clone(),
                    metrics: r.scores.clone(),
                })
                .collect();
            ranking::rank_models_with(&scores, rule)?
        } else {
            board
        }
    } else {
        if cfg.rank.inputs.is_empty() {
            return Err(usage("no score CSVs given"));
        }
        let mut records = Vec::new();
        for p in &cfg.rank.inputs {
            records.extend(read_scores(p)?);
        }
        let models = ranking::models_from_records(&records)?;
        ranking::rank_models_with(&models, rule)?
    };

    let out = cfg.out_dir();
    create_dir(&out)?;
    write_text(&out.join("scoreboard.csv"), &scoreboard_csv(&board)?)?;
    write_json(
        &out.join("scoreboard.json"),
        &json!({ "engine": ENGINE_VERSION, "scoreboard": board }),
    )?;
    for (i, row) in board.rows.iter().enumerate() {
        println!("{:>3}  {:<28} {:>5}", i + 1, row.model, row.mean_rank);
    }
    write_timing(cfg, &out, json!({ "rank": started.elapsed().as_secs_f64() }))
}
