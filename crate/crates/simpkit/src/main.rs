use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;
use simpkit::core::control_tokens::{compute_ct, prepare_training_set, quantized_values};
use simpkit::core::corpus::{make_splits, reference_key, source_key, SplitRatios};
use simpkit::core::human_eval::{
    agreement_report, assign, render_summary, sample_items, summarize, validate_records,
};
use simpkit::core::metrics::{
    evaluate_system, render_table, EmbeddingSources, EvalConfig, Metric, MetricReport,
};
use simpkit::core::search::{
    apply_best, fit_lr_predictor, source_features, CtGrid, LrPolicy, LrPredictor, SearchReport,
    SearchStrategy,
};
use simpkit::core::selection::{learning_curve, select_models, RunRecord};
use simpkit::formats::{self, read_json, read_jsonl, write_json, write_jsonl};
use simpkit::service::{serve, unblind, AppState};
use simpkit::store::RatingStore;
use simpkit::{generators, parallel, plot};

/// Split sizes reported for the PLABA corpus after dropping pairs without references.
const PUBLISHED_SPLIT: (usize, usize, usize) = (5757, 814, 814);

#[derive(Parser)]
#[command(name = "simpkit", version, about = "Biomedical text simplification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a pairs file and its sidecar resources and print a summary.
    Ingest(IngestArgs),
    /// Split pairs into train, validation and test sets.
    Split(SplitArgs),
    /// Control-token preparation, search and application.
    #[command(subcommand)]
    Ct(CtCommand),
    /// Score predictions on a split.
    Evaluate(EvaluateArgs),
    /// Aggregate run records into learning curves.
    Curve(CurveArgs),
    /// Pick the best systems on SARI and embedding F.
    Select(SelectArgs),
    /// Blinded pairwise human evaluation.
    #[command(subcommand)]
    Humeval(HumevalCommand),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    parses: Option<PathBuf>,
    #[arg(long)]
    freq: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Write the validated pairs here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value = "0.8,0.1,0.1")]
    ratios: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Receives train.jsonl, validation.jsonl, test.jsonl and split.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Resources {
    /// CoNLL-U parses keyed `<id>` for sources and `<id>:ref<j>` for references.
    #[arg(long)]
    parses: PathBuf,
    /// Frequency list, most frequent token first.
    #[arg(long)]
    freq: PathBuf,
}

#[derive(Subcommand)]
enum CtCommand {
    /// Measure the control tokens of every (source, reference).
    Compute {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        resources: Resources,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write annotated training examples, one per reference.
    PrepareTrain {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        resources: Resources,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the length-ratio predictor on training pairs.
    FitLr {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        resources: Resources,
        #[arg(long, default_value_t = 1.0)]
        ridge: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search static DTD, WR and LV values on validation pairs.
    Optimize(OptimizeArgs),
    /// Annotate test sources with the searched values and predicted LR.
    Apply {
        #[arg(long)]
        pairs: PathBuf,
        /// Search report from `ct optimize`.
        #[arg(long)]
        search: PathBuf,
        #[arg(long)]
        predictor: PathBuf,
        #[command(flatten)]
        resources: Resources,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    pairs: PathBuf,
    /// mock, mock:<dtd>, cmd:<shell command> or http:<url>.
    #[arg(long, default_value = "mock")]
    generator: String,
    /// Values tried on every axis unless overridden per axis; `all` is every token value.
    #[arg(long, default_value = "0.6,0.7,0.8,0.9,1.0")]
    grid: String,
    #[arg(long)]
    dtd: Option<String>,
    #[arg(long)]
    wr: Option<String>,
    #[arg(long)]
    lv: Option<String>,
    /// Fixed LR token value, used unless --predictor is given.
    #[arg(long, default_value_t = 1.0)]
    lr: f64,
    #[arg(long, requires_all = ["parses", "freq"])]
    predictor: Option<PathBuf>,
    #[arg(long)]
    parses: Option<PathBuf>,
    #[arg(long)]
    freq: Option<PathBuf>,
    /// Use coordinate descent with at most this many rounds instead of the full grid.
    #[arg(long)]
    coordinate_descent: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    split: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long)]
    name: String,
    #[arg(long)]
    epoch: Option<u32>,
    /// Comma-separated metric keys (bleu, rouge1, rouge2, rougeL, sari, embedding_f).
    #[arg(long)]
    metrics: Option<String>,
    #[arg(long, requires = "ref_embeddings")]
    hyp_embeddings: Option<PathBuf>,
    #[arg(long, requires = "hyp_embeddings")]
    ref_embeddings: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append a run record for learning curves.
    #[arg(long)]
    runs: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    runs: PathBuf,
    /// Receives curves.csv and one SVG chart per metric.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    /// Metric report JSON files from `evaluate --out`.
    #[arg(long, num_args = 1.., required = true)]
    reports: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum HumevalCommand {
    /// Sample test items and blind the two systems' outputs.
    Sample {
        #[arg(long)]
        test: PathBuf,
        /// NAME=PREDICTIONS, given exactly twice.
        #[arg(long = "system", num_args = 1, required = true)]
        systems: Vec<String>,
        #[arg(long, default_value_t = 80)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Deal items to annotator pairs.
    Assign {
        #[arg(long)]
        items: PathBuf,
        /// Pairs such as 0-1,0-2,1-3,2-3.
        #[arg(long)]
        schedule: String,
        /// Comma-separated annotator ids; defaults to everyone in the schedule.
        #[arg(long)]
        annotators: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the annotation API.
    Serve {
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Append-only ratings file.
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
    /// Mean scores per system and inter-annotator agreement.
    Stats {
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        ratings: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write ratings with system names attached.
    Export {
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        ratings: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Ingest(a) => ingest(a),
        Command::Split(a) => split(a),
        Command::Ct(c) => ct(c),
        Command::Evaluate(a) => evaluate(a),
        Command::Curve(a) => curve(a),
        Command::Select(a) => select(a),
        Command::Humeval(c) => humeval(c),
    }
}

fn ingest(a: IngestArgs) -> Result<()> {
    let pairs = formats::load_pairs(&a.pairs)?;
    let empty = pairs.iter().filter(|p| p.refs.is_empty()).count();
    let multi = pairs.iter().filter(|p| p.is_multi_reference()).count();
    let docs: BTreeSet<&str> = pairs.iter().map(|p| p.doc_id.as_str()).collect();
    println!("pairs              {}", pairs.len());
    println!("documents          {}", docs.len());
    println!("without references {empty}");
    println!("multi-reference    {multi}");
    if let Some(path) = &a.parses {
        let parses = formats::load_conllu(path)?;
        let expected: Vec<String> = pairs
            .iter()
            .flat_map(|p| {
                std::iter::once(source_key(&p.id))
                    .chain((0..p.refs.len()).map(|j| reference_key(&p.id, j)))
            })
            .collect();
        let missing = expected.iter().filter(|k| !parses.contains_key(*k)).count();
        println!("parses             {} ({missing} of {} sentences missing)", parses.len(), expected.len());
    }
    if let Some(path) = &a.freq {
        println!("frequency list     {} tokens", formats::load_frequency_list(path)?.len());
    }
    if let Some(path) = &a.embeddings {
        let emb = formats::load_embeddings(path)?;
        let dims: BTreeSet<usize> = emb.values().filter_map(|e| e.dim()).collect();
        ensure!(dims.len() <= 1, "{}: mixed embedding dimensions {dims:?}", path.display());
        println!("embeddings         {} sentences, dimension {:?}", emb.len(), dims.first());
    }
    if let Some(out) = &a.out {
        formats::save_pairs(out, &pairs)?;
    }
    Ok(())
}

fn parse_ratios(s: &str) -> Result<SplitRatios> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad ratios `{s}`"))?;
    ensure!(v.len() == 3, "expected three ratios, got `{s}`");
    Ok(SplitRatios::new(v[0], v[1], v[2])?)
}

#[derive(Serialize)]
struct SplitSummary {
    seed: u64,
    ratios: SplitRatios,
    input_pairs: usize,
    dropped_without_references: usize,
    sizes: [usize; 3],
    total: usize,
    published_sizes: [usize; 3],
    published_total: usize,
}

fn split(a: SplitArgs) -> Result<()> {
    let ratios = parse_ratios(&a.ratios)?;
    let pairs = formats::load_pairs(&a.pairs)?;
    let input = pairs.len();
    let set = make_splits(pairs, ratios, a.seed)?;
    fs::create_dir_all(&a.out_dir).with_context(|| a.out_dir.display().to_string())?;
    formats::save_pairs(&a.out_dir.join("train.jsonl"), &set.train)?;
    formats::save_pairs(&a.out_dir.join("validation.jsonl"), &set.validation)?;
    formats::save_pairs(&a.out_dir.join("test.jsonl"), &set.test)?;
    let (tr, va, te) = set.sizes();
    let (ptr, pva, pte) = PUBLISHED_SPLIT;
    let summary = SplitSummary {
        seed: a.seed,
        ratios,
        input_pairs: input,
        dropped_without_references: input - set.total(),
        sizes: [tr, va, te],
        total: set.total(),
        published_sizes: [ptr, pva, pte],
        published_total: ptr + pva + pte,
    };
    write_json(&a.out_dir.join("split.json"), &summary)?;
    println!("dropped {} of {input} pairs without references", summary.dropped_without_references);
    println!("{:<10} {:>8} {:>10}", "split", "ours", "published");
    for (name, ours, theirs) in [("train", tr, ptr), ("validation", va, pva), ("test", te, pte)] {
        println!("{name:<10} {ours:>8} {theirs:>10}");
    }
    println!("{:<10} {:>8} {:>10}", "total", summary.total, summary.published_total);
    if summary.total != summary.published_total {
        warn!(
            "filtered total {} differs from the published {} by {}; the corpus version may differ",
            summary.total,
            summary.published_total,
            summary.total.abs_diff(summary.published_total)
        );
    }
    Ok(())
}

fn ct(c: CtCommand) -> Result<()> {
    match c {
        CtCommand::Compute { pairs, resources, out } => {
            let pairs = formats::load_pairs(&pairs)?;
            let parses = formats::load_conllu(&resources.parses)?;
            let table = formats::load_frequency_list(&resources.freq)?;
            #[derive(Serialize)]
            struct Row {
                id: String,
                ref_index: usize,
                dtd: f64,
                wr: f64,
                lv: f64,
                lr: f64,
                quantized: simpkit::core::control_tokens::ControlTokens,
                annotated_src: String,
            }
            let mut rows = Vec::new();
            let lookup = |k: String| parses.get(&k).with_context(|| format!("no parse for `{k}`"));
            for p in &pairs {
                let src_parse = lookup(source_key(&p.id))?;
                for (j, r) in p.refs.iter().enumerate() {
                    let ct = compute_ct(&p.src, r, src_parse, lookup(reference_key(&p.id, j))?, &table)?;
                    rows.push(Row {
                        id: p.id.clone(),
                        ref_index: j,
                        dtd: ct.raw.dtd,
                        wr: ct.raw.wr,
                        lv: ct.raw.lv,
                        lr: ct.raw.lr,
                        quantized: ct.quantized,
                        annotated_src: simpkit::core::control_tokens::annotate(&p.src, &ct.quantized)?,
                    });
                }
            }
            write_jsonl(&out, &rows)?;
            info!("wrote {} rows to {}", rows.len(), out.display());
        }
        CtCommand::PrepareTrain { pairs, resources, out } => {
            let pairs = formats::load_pairs(&pairs)?;
            let parses = formats::load_conllu(&resources.parses)?;
            let table = formats::load_frequency_list(&resources.freq)?;
            let examples = prepare_training_set(&pairs, &parses, &table)?;
            #[derive(Serialize)]
            struct Row<'a> {
                id: &'a str,
                ref_index: usize,
                src: &'a str,
                tgt: &'a str,
            }
            let rows: Vec<Row> = examples
                .iter()
                .map(|e| Row {
                    id: &e.pair_id,
                    ref_index: e.ref_index,
                    src: &e.annotated_src,
                    tgt: &e.target,
                })
                .collect();
            write_jsonl(&out, &rows)?;
            info!("wrote {} training examples to {}", rows.len(), out.display());
        }
        CtCommand::FitLr { pairs, resources, ridge, out } => {
            let pairs = formats::load_pairs(&pairs)?;
            let parses = formats::load_conllu(&resources.parses)?;
            let table = formats::load_frequency_list(&resources.freq)?;
            let predictor = fit_lr_predictor(&pairs, &parses, &table, ridge)?;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for p in &pairs {
                let x = source_features(&p.src, &parses[&source_key(&p.id)], &table);
                for r in &p.refs {
                    xs.push(x);
                    ys.push(simpkit::core::control_tokens::length_ratio(&p.src, r)?);
                }
            }
            let baseline = LrPredictor::intercept_only(0.0).mse(&xs, &ys);
            println!("weights {:?}", predictor.weights);
            println!("training MSE {:.6} (zero predictor {baseline:.6})", predictor.mse(&xs, &ys));
            write_json(&out, &predictor)?;
        }
        CtCommand::Optimize(a) => optimize(a)?,
        CtCommand::Apply { pairs, search, predictor, resources, out } => {
            let pairs = formats::load_pairs(&pairs)?;
            let search: SearchReport = read_json(&search)?;
            let predictor: LrPredictor = read_json(&predictor)?;
            let parses = formats::load_conllu(&resources.parses)?;
            let table = formats::load_frequency_list(&resources.freq)?;
            let inputs = apply_best(search.best, &predictor, &pairs, &parses, &table)?;
            #[derive(Serialize)]
            struct Row<'a> {
                id: &'a str,
                input: &'a str,
            }
            let rows: Vec<Row> = pairs
                .iter()
                .zip(&inputs)
                .map(|(p, input)| Row { id: &p.id, input })
                .collect();
            write_jsonl(&out, &rows)?;
        }
    }
    Ok(())
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    if s == "all" {
        return Ok(quantized_values().collect());
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad grid value `{v}`")))
        .collect()
}

fn optimize(a: OptimizeArgs) -> Result<()> {
    let pairs = formats::load_pairs(&a.pairs)?;
    let single = pairs.iter().filter(|p| !p.is_multi_reference()).count();
    if single > 0 {
        warn!("{single} validation pairs have a single reference");
    }
    let default = parse_values(&a.grid)?;
    let axis = |v: &Option<String>| v.as_deref().map_or_else(|| Ok(default.clone()), parse_values);
    let grid = CtGrid::new(axis(&a.dtd)?, axis(&a.wr)?, axis(&a.lv)?)?;
    let generator = generators::from_spec(&a.generator, &pairs)?;
    let strategy = match a.coordinate_descent {
        Some(max_rounds) => SearchStrategy::CoordinateDescent { max_rounds },
        None => SearchStrategy::Exhaustive,
    };
    let loaded;
    let lr_policy = match &a.predictor {
        Some(path) => {
            let predictor: LrPredictor = read_json(path)?;
            predictor.validate()?;
            let parses = formats::load_conllu(a.parses.as_deref().expect("required by clap"))?;
            let table = formats::load_frequency_list(a.freq.as_deref().expect("required by clap"))?;
            loaded = (predictor, parses, table);
            LrPolicy::Predicted {
                predictor: &loaded.0,
                parses: &loaded.1,
                table: &loaded.2,
            }
        }
        None => LrPolicy::Fixed(a.lr),
    };
    info!("searching {} grid points on {} pairs", grid.len(), pairs.len());
    let report = parallel::grid_search_parallel(&*generator, &pairs, &grid, lr_policy, strategy)?;
    println!(
        "best DTD {} WR {} LV {}  SARI {:.2}  ({} points evaluated)",
        report.best.dtd,
        report.best.wr,
        report.best.lv,
        report.best_sari,
        report.points.len()
    );
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    Ok(())
}

fn parse_metrics(s: &str) -> Result<BTreeSet<Metric>> {
    s.split(',')
        .map(|k| {
            let k = k.trim();
            Metric::ALL
                .into_iter()
                .find(|m| m.key() == k)
                .with_context(|| format!("unknown metric `{k}`"))
        })
        .collect()
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let split = formats::load_pairs(&a.split)?;
    let hyps = formats::load_predictions(&a.predictions)?;
    let config = match &a.metrics {
        Some(s) => EvalConfig { metrics: parse_metrics(s)? },
        None => EvalConfig::default(),
    };
    let embeddings = match (&a.hyp_embeddings, &a.ref_embeddings) {
        (Some(h), Some(r)) => Some((formats::load_embeddings(h)?, formats::load_embeddings(r)?)),
        _ => None,
    };
    let sources = embeddings.as_ref().map(|(h, r)| EmbeddingSources {
        hypotheses: h,
        references: r,
    });
    if sources.is_none() && config.metrics.contains(&Metric::EmbeddingF) {
        info!("no embedding sidecars given; skipping embedding F");
    }
    let evaluation = evaluate_system(&a.name, &split, &hyps, sources, &config)?;
    if !evaluation.extra_ids.is_empty() {
        warn!(
            "{} predictions have ids outside the split (first: {})",
            evaluation.extra_ids.len(),
            evaluation.extra_ids[0]
        );
    }
    let report = evaluation.report;
    print!("{}", render_table(std::slice::from_ref(&report)));
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    if let Some(runs) = &a.runs {
        let record = RunRecord {
            system_name: a.name.clone(),
            epoch: a.epoch,
            predictions: a.predictions.display().to_string(),
            report,
        };
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(runs)
            .with_context(|| runs.display().to_string())?;
        writeln!(f, "{}", serde_json::to_string(&record)?)?;
    }
    Ok(())
}

fn curve(a: CurveArgs) -> Result<()> {
    let records: Vec<RunRecord> = read_jsonl(&a.runs)?.into_iter().map(|(_, r)| r).collect();
    let curves = learning_curve(&records)?;
    ensure!(!curves.is_empty(), "{}: no run records with an epoch", a.runs.display());
    fs::create_dir_all(&a.out_dir).with_context(|| a.out_dir.display().to_string())?;
    plot::write_curves_csv(&a.out_dir.join("curves.csv"), &curves)?;
    let metrics: BTreeSet<Metric> = curves.values().flat_map(|m| m.keys().copied()).collect();
    for m in metrics {
        plot::write_curve_svg(&a.out_dir.join(format!("curve_{}.svg", m.key())), &curves, m)?;
    }
    print!("{}", plot::curves_csv(&curves));
    Ok(())
}

fn select(a: SelectArgs) -> Result<()> {
    let reports: Vec<MetricReport> = a
        .reports
        .iter()
        .map(|p| read_json(p))
        .collect::<simpkit::Result<_>>()?;
    print!("{}", render_table(&reports));
    let chosen = select_models(&reports);
    println!("selected: {}", chosen.into_iter().collect::<Vec<_>>().join(", "));
    Ok(())
}

fn parse_schedule(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .map(|pair| {
            let (a, b) = pair
                .trim()
                .split_once('-')
                .with_context(|| format!("bad annotator pair `{pair}` (expected a-b)"))?;
            Ok((a.to_string(), b.to_string()))
        })
        .collect()
}

fn humeval(c: HumevalCommand) -> Result<()> {
    match c {
        HumevalCommand::Sample { test, systems, n, seed, out } => {
            let pairs = formats::load_pairs(&test)?;
            let mut outputs = BTreeMap::new();
            for s in &systems {
                let (name, path) = s
                    .split_once('=')
                    .with_context(|| format!("bad --system `{s}` (expected NAME=PATH)"))?;
                if outputs.insert(name.to_string(), formats::load_predictions(Path::new(path))?).is_some() {
                    bail!("system `{name}` given twice");
                }
            }
            let items = sample_items(&pairs, &outputs, n, seed)?;
            write_jsonl(&out, &items)?;
            info!("wrote {} items to {}", items.len(), out.display());
        }
        HumevalCommand::Assign { items, schedule, annotators, seed, out } => {
            let items = formats::load_items(&items)?;
            let schedule = parse_schedule(&schedule)?;
            let annotators: Vec<String> = match annotators {
                Some(s) => s.split(',').map(|a| a.trim().to_string()).collect(),
                None => schedule
                    .iter()
                    .flat_map(|(a, b)| [a.clone(), b.clone()])
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            };
            let plan = assign(&items, &annotators, &schedule, seed)?;
            for (annotator, load) in plan.loads() {
                println!("annotator {annotator}: {load} items");
            }
            for ((a, b), load) in plan.pair_schedule.iter().zip(plan.pair_loads()) {
                println!("pair {a}-{b}: {load} items");
            }
            write_json(&out, &plan)?;
        }
        HumevalCommand::Serve { items, plan, store, bind } => {
            let items = formats::load_items(&items)?;
            let plan = formats::load_plan(&plan)?;
            let store = RatingStore::open(&store)?;
            info!("{} ratings on record in {}", store.len(), store.path().display());
            let state = AppState::new(items, plan, store)?;
            tokio::runtime::Runtime::new()?.block_on(serve(state, &bind))?;
        }
        HumevalCommand::Stats { items, plan, ratings, out } => {
            let items = formats::load_items(&items)?;
            let plan = formats::load_plan(&plan)?;
            let records = formats::load_ratings(&ratings)?;
            validate_records(&records)?;
            print!("{}", render_summary(&summarize(&records, &items)));
            let report = agreement_report(&items, &plan, &records);
            println!();
            println!("win/lose/tie from the point of view of {}", report.canonical_order.join(" vs "));
            println!("{:<6} {:<10} {:>7} {:>7} {:>6} {:>9}", "pair", "criterion", "kappa", "alpha", "items", "excluded");
            let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
            for row in &report.rows {
                println!(
                    "{:<6} {:<10} {:>7} {:>7} {:>6} {:>9}",
                    format!("{}-{}", row.pair[0], row.pair[1]),
                    format!("{:?}", row.criterion).to_lowercase(),
                    fmt(row.kappa),
                    fmt(row.alpha),
                    row.n_items,
                    row.n_excluded
                );
            }
            if let Some(out) = &out {
                write_json(out, &report)?;
            }
        }
        HumevalCommand::Export { items, ratings, out } => {
            let items = formats::load_items(&items)?;
            let records = formats::load_ratings(&ratings)?;
            let rows = unblind(&items, &records);
            match out {
                Some(path) => write_jsonl(&path, &rows)?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    for r in &rows {
                        writeln!(stdout, "{}", serde_json::to_string(r)?)?;
                    }
                }
            }
        }
    }
    Ok(())
}
