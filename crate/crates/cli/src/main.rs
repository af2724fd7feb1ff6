use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use formval::composites::CompositeMethod;
use formval::content_validity::compute_cvr;
use formval::finding::Severity;
use formval::ingest::load_sme_ratings;
use formval::spec::{
    classify_construct, load_spec, validate_spec, Answer, Causality, ClassificationAnswers,
};
use formval::synthgen::{
    block_diagonal, equicorrelation, generate_pilot_data, Discretization, SynthConfig, SynthItem,
};
use formval::workflow::{iteration_record, load_history, run_pipeline, save_record, PipelineInputs, Report};
use formval::Config;

#[derive(Parser)]
#[command(name = "formval", version, about = "Design and pilot-test formative measurement models")]
struct Cli {
    /// TOML file with thresholds; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Pilot iteration id recorded in reports and history.
    #[arg(long, global = true)]
    iteration: Option<String>,
    /// Output directory (for `simulate`, the CSV file to write).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spec file utilities.
    Spec {
        #[command(subcommand)]
        action: SpecAction,
    },
    /// Recommend formative or reflective from the decision-guide answers.
    Classify(ClassifyArgs),
    /// Content validity ratios and the critical value for an SME panel.
    Cvr(CvrArgs),
    /// Item descriptives, outliers, correlations, VIF and alpha per construct.
    Diagnose(DataArgs),
    /// Per-respondent composite scores as CSV.
    Composite(DataArgs),
    /// PASS / REVISE / BLOCKED per construct; exits 2 unless every construct passes.
    Gate(DataArgs),
    /// Full structured (JSON) and human (markdown) iteration report.
    Report(ReportArgs),
    /// Synthetic pilot responses for the items in a spec.
    Simulate(SimulateArgs),
}

#[derive(Subcommand)]
enum SpecAction {
    /// Parse and check a spec; exits 1 on any error finding.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Args)]
struct ClassifyArgs {
    /// Classify every construct in this spec that records its answers.
    #[arg(long, required_unless_present = "causality")]
    spec: Option<PathBuf>,
    #[arg(long, value_enum, requires_all = ["interchangeable", "covariation"])]
    causality: Option<CausalityArg>,
    #[arg(long, value_enum)]
    interchangeable: Option<AnswerArg>,
    #[arg(long, value_enum)]
    covariation: Option<AnswerArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CausalityArg {
    ConstructCausesItems,
    ItemsCauseConstruct,
    Ambiguous,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnswerArg {
    Yes,
    No,
    Unsure,
}

#[derive(Args)]
struct CvrArgs {
    #[arg(long)]
    spec: PathBuf,
    /// SME CSV in `cvr3` mode.
    #[arg(long)]
    sme: PathBuf,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Pilot responses; first column `respondent_id`.
    #[arg(long)]
    pilot: PathBuf,
    /// SME judgments (`# mode=cvr3`).
    #[arg(long)]
    sme: Option<PathBuf>,
    /// Researcher ratings (`# mode=scale5`).
    #[arg(long)]
    researcher: Option<PathBuf>,
    /// Directory of earlier iteration records.
    #[arg(long)]
    history: Option<PathBuf>,
    #[arg(long, value_enum)]
    composite_method: Option<MethodArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mean,
    Median,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, required_unless_present = "replay")]
    spec: Option<PathBuf>,
    #[arg(long, required_unless_present = "replay")]
    pilot: Option<PathBuf>,
    #[arg(long)]
    sme: Option<PathBuf>,
    #[arg(long)]
    researcher: Option<PathBuf>,
    #[arg(long)]
    history: Option<PathBuf>,
    #[arg(long, value_enum)]
    composite_method: Option<MethodArg>,
    /// Re-run the inputs embedded in an earlier structured report and check
    /// the result is byte-identical (exit 3 if not).
    #[arg(long, conflicts_with_all = ["spec", "pilot", "sme", "researcher", "history"])]
    replay: Option<PathBuf>,
    /// Append this iteration to the history directory after reporting.
    #[arg(long, requires = "history")]
    record: bool,
}

impl ReportArgs {
    fn data(&self) -> Option<DataArgs> {
        Some(DataArgs {
            spec: self.spec.clone()?,
            pilot: self.pilot.clone()?,
            sme: self.sme.clone(),
            researcher: self.researcher.clone(),
            history: self.history.clone(),
            composite_method: self.composite_method,
        })
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    respondents: usize,
    /// Within-construct correlation, or a file holding the full item matrix.
    #[arg(long)]
    rho: String,
    #[arg(long, value_enum, default_value = "round-clamp")]
    discretization: DiscretizationArg,
    #[arg(long, default_value = "s")]
    prefix: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiscretizationArg {
    RoundClamp,
    Quantile,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = match &cli.config {
        Some(p) => Config::load(p).with_context(|| format!("loading config {}", p.display()))?,
        None => Config::default(),
    };
    let iteration = cli.iteration.clone().unwrap_or_else(|| "pilot".to_owned());
    let out = cli.out.as_deref();
    match cli.command {
        Command::Spec { action: SpecAction::Validate { spec } } => spec_validate(&spec, &config, out),
        Command::Classify(args) => classify(&args),
        Command::Cvr(args) => cvr(&args, &config, out),
        Command::Diagnose(args) => {
            let report = pipeline(&args, config, &iteration)?;
            let doc = serde_json::json!({
                "iteration_id": report.iteration_id,
                "content_validity": report.content_validity,
                "researcher_means": report.researcher_means,
                "constructs": report.constructs.iter().map(|c| &c.diagnostics).collect::<Vec<_>>(),
                "findings": report.spec_findings.iter().chain(&report.ingest_findings).chain(&report.history_findings).collect::<Vec<_>>(),
            });
            emit(out, "diagnostics.json", &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Composite(args) => {
            let report = pipeline(&args, config, &iteration)?;
            emit(out, "composites.csv", &composites_csv(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gate(args) => {
            let report = pipeline(&args, config, &iteration)?;
            emit(out, "gates.json", &(serde_json::to_string_pretty(&report.gates)? + "\n"))?;
            for g in &report.gates {
                eprintln!("{:<24} {:?}", g.construct_id, g.status);
            }
            Ok(if report.summary.proceed { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Report(args) => report(args, config, &iteration, out),
        Command::Simulate(args) => simulate(&args, out),
    }
}

fn emit(out: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn spec_validate(path: &Path, config: &Config, out: Option<&Path>) -> Result<ExitCode> {
    let spec = load_spec(path)?;
    let findings = validate_spec(&spec, &config.validation_options());
    for f in &findings {
        eprintln!("{f}");
    }
    let errors = findings.iter().filter(|f| f.severity == Severity::Error).count();
    eprintln!("{} construct(s), {} finding(s), {errors} error(s)", spec.constructs.len(), findings.len());
    if out.is_some() {
        emit(out, "spec_findings.json", &(serde_json::to_string_pretty(&findings)? + "\n"))?;
    }
    Ok(if errors > 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn classify(args: &ClassifyArgs) -> Result<ExitCode> {
    if let (Some(c), Some(i), Some(v)) = (args.causality, args.interchangeable, args.covariation) {
        let answers = ClassificationAnswers {
            causality: match c {
                CausalityArg::ConstructCausesItems => Causality::ConstructCausesItems,
                CausalityArg::ItemsCauseConstruct => Causality::ItemsCauseConstruct,
                CausalityArg::Ambiguous => Causality::Ambiguous,
            },
            items_interchangeable: answer(i),
            covariation_necessary: answer(v),
        };
        println!("{}", serde_json::to_string(&classify_construct(&answers))?);
        return Ok(ExitCode::SUCCESS);
    }
    let spec = load_spec(args.spec.as_ref().expect("clap enforces --spec"))?;
    for c in &spec.constructs {
        match &c.classification {
            Some(a) => println!(
                "{}\tdeclared {}\trecommended {}",
                c.id,
                serde_json::to_string(&c.model)?.trim_matches('"'),
                serde_json::to_string(&classify_construct(a))?.trim_matches('"')
            ),
            None => println!("{}\tdeclared {}\tno answers recorded", c.id, serde_json::to_string(&c.model)?.trim_matches('"')),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn answer(a: AnswerArg) -> Answer {
    match a {
        AnswerArg::Yes => Answer::Yes,
        AnswerArg::No => Answer::No,
        AnswerArg::Unsure => Answer::Unsure,
    }
}

fn cvr(args: &CvrArgs, config: &Config, out: Option<&Path>) -> Result<ExitCode> {
    let spec = load_spec(&args.spec)?;
    let ratings = load_sme_ratings(&args.sme, &spec)?;
    let report = compute_cvr::<f64>(&ratings, &config.cvr_settings()?)?;
    for f in &report.findings {
        eprintln!("{f}");
    }
    eprintln!(
        "{} raters, alpha {}, critical CVR {:.4}",
        report.critical.n_raters, report.critical.alpha, report.critical.value
    );
    for r in &report.results {
        eprintln!("{:<16} {:>3}/{:<3} {:>8.4} {}", r.item_id, r.n_essential, r.n_raters, r.cvr, if r.passed { "pass" } else { "FAIL" });
    }
    emit(out, "cvr.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn file_label(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn inputs(args: &DataArgs, mut config: Config, iteration: &str) -> Result<PipelineInputs> {
    if let Some(m) = args.composite_method {
        config.composite_method = match m {
            MethodArg::Mean => CompositeMethod::WeightedMean,
            MethodArg::Median => CompositeMethod::WeightedMedian,
        };
    }
    Ok(PipelineInputs {
        iteration_id: iteration.to_owned(),
        spec_toml: read(&args.spec)?,
        config,
        pilot_source: file_label(&args.pilot),
        pilot_csv: read(&args.pilot)?,
        sme_csv: args.sme.as_deref().map(read).transpose()?,
        researcher_csv: args.researcher.as_deref().map(read).transpose()?,
        history: match &args.history {
            Some(dir) => load_history(dir)?,
            None => Vec::new(),
        },
    })
}

fn pipeline(args: &DataArgs, config: Config, iteration: &str) -> Result<Report<f64>> {
    let report = run_pipeline(&inputs(args, config, iteration)?)?;
    for f in report.spec_findings.iter().chain(&report.ingest_findings).chain(&report.history_findings) {
        if f.severity != Severity::Info {
            eprintln!("{f}");
        }
    }
    Ok(report)
}

fn composites_csv(report: &Report<f64>) -> String {
    let scored: Vec<_> = report.constructs.iter().filter_map(|c| c.composite.as_ref()).collect();
    let mut out = String::from("respondent_id");
    for s in &scored {
        out.push(',');
        out.push_str(&s.construct_id);
    }
    out.push('\n');
    let Some(first) = scored.first() else { return out };
    for (r, id) in first.respondent_ids.iter().enumerate() {
        out.push_str(id);
        for s in &scored {
            out.push_str(&format!(",{}", s.scores[r]));
        }
        out.push('\n');
    }
    out
}

fn report(args: ReportArgs, config: Config, iteration: &str, out: Option<&Path>) -> Result<ExitCode> {
    let (inputs, previous, history_dir) = match (&args.replay, args.data()) {
        (Some(path), _) => {
            let text = read(path)?;
            let doc: serde_json::Value = serde_json::from_str(&text)?;
            let inputs: PipelineInputs = serde_json::from_value(doc.get("inputs").cloned().context("report has no `inputs`")?)?;
            (inputs, Some(text), None)
        }
        (None, Some(data)) => (self::inputs(&data, config, iteration)?, None, data.history.clone()),
        (None, None) => bail!("either --spec/--pilot or --replay is required"),
    };
    let report = run_pipeline::<f64>(&inputs)?;
    let json = report.to_json()?;
    match out {
        Some(_) => {
            emit(out, "report.json", &json)?;
            emit(out, "report.md", &report.to_markdown())?;
        }
        None => print!("{json}"),
    }
    if let Some(previous) = previous {
        if previous != json {
            eprintln!("replayed report differs from the original");
            return Ok(ExitCode::from(3));
        }
        eprintln!("replayed report is byte-identical");
    }
    if args.record {
        let dir = history_dir.expect("clap enforces --history");
        let mut record = iteration_record(&inputs)?;
        record.report_path = out.map(|d| d.join("report.json").display().to_string());
        let path = save_record(&dir, &record)?;
        eprintln!("recorded {}", path.display());
    }
    let s = &report.summary;
    eprintln!("{} pass, {} revise, {} blocked", s.pass, s.revise, s.blocked);
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: &SimulateArgs, out: Option<&Path>) -> Result<ExitCode> {
    let out = out.context("simulate needs --out <csv>")?;
    let spec = load_spec(&args.spec)?;
    let items: Vec<SynthItem> = spec
        .items()
        .map(|i| SynthItem { id: i.id.clone(), scale_min: i.scale_min, scale_max: i.scale_max })
        .collect();
    let target = match args.rho.parse::<f64>() {
        Ok(rho) => block_diagonal(
            &spec.constructs.iter().filter(|c| !c.items.is_empty()).map(|c| equicorrelation(c.items.len(), rho)).collect::<Vec<_>>(),
        ),
        Err(_) => read_matrix(Path::new(&args.rho))?,
    };
    if target.len() != items.len() {
        bail!("correlation matrix is {0}×{0} but the spec has {1} items", target.len(), items.len());
    }
    let mut cfg = SynthConfig::new(args.seed, args.respondents, items, target);
    cfg.discretization = match args.discretization {
        DiscretizationArg::RoundClamp => Discretization::RoundClamp,
        DiscretizationArg::Quantile => Discretization::Quantile,
    };
    cfg.respondent_prefix = args.prefix.clone();
    let ds = generate_pilot_data(&cfg)?;
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, ds.to_csv()).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} respondents × {} items to {}", ds.n_respondents(), ds.n_items(), out.display());
    Ok(ExitCode::SUCCESS)
}

/// Rows of numbers separated by commas or whitespace; `#` starts a comment.
fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    read(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().with_context(|| format!("bad matrix entry `{t}`")))
                .collect()
        })
        .collect()
}
