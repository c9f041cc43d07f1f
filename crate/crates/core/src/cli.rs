//! Command-line interface.
//!
//! Usage errors exit with status 2 (clap's convention), runtime errors with
//! status 1 and a `error[<module>/<command>]: <message>` line on stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::curves::{default_max_select, CurveFilter, PlotSize, Series};
use crate::dataio::{DescriptorSetSpec, Schema};
use crate::inference::read_pairwise_csv;
use crate::learners::{make_model_defaults, Method, Params};
use crate::mcs::{build_mcs, mcs_file_stem, render_mcs_svg, write_mcs_csv};
use crate::measures::{MeasureOptions, Metric};
use crate::orchestrator::{
    assess, import_into_run, load_run, run_model_train, with_threads, write_assessment, write_curves, RunConfig,
    PAIRWISE_FILE,
};
use crate::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CVBENCH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cvbench", version, about = "Repeated k-fold cross-validation benchmarking of descriptor set x method grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit every descriptor set x method combination and write a run directory.
    Fit(FitArgs),
    /// Blocked ANOVA, Tukey comparisons and MCS plot for one metric.
    Assess(AssessArgs),
    /// Accumulation curve plots.
    Curves(CurvesArgs),
    /// Re-render the MCS plot from an existing pairwise.csv.
    Mcs(McsArgs),
    /// Add externally produced predictions to a run.
    Import(ImportArgs),
    /// Print the default method parameters as JSON.
    Defaults(DefaultsArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Response column name.
    #[arg(long, required_unless_present = "schema")]
    pub response: Option<String>,
    /// ID column name.
    #[arg(long)]
    pub id: Option<String>,
    /// Descriptor sets as Name:length pairs, in column order.
    #[arg(long)]
    pub sets: Option<String>,
    /// JSON schema with id_col, response_col and sets.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub nfolds: usize,
    #[arg(long, default_value_t = 3)]
    pub nsplits: usize,
    /// Comma-separated split seeds (default 11111, 22222, ...).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Comma-separated methods (default KNN,Ridge,Tree,RF).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// JSON parameter overrides, e.g. {"KNN": {"k": 5}}.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Treat a 0/1 response as continuous.
    #[arg(long)]
    pub force_continuous: bool,
    /// Classification threshold recorded for assessment.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Tests counted by initial enhancement, recorded for assessment.
    #[arg(long, default_value_t = 300)]
    pub m: usize,
    /// Run directory.
    #[arg(long, default_value = "cvbench-run")]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    /// Run directory.
    #[arg(long)]
    pub run: PathBuf,
    /// Metric (default enhancement for binary, rmse for continuous responses).
    #[arg(long)]
    pub metric: Option<Metric>,
    /// Tests counted by initial enhancement (default from the run).
    #[arg(long)]
    pub m: Option<usize>,
    /// Classification threshold (default from the run).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeriesArg {
    Methods,
    Descriptors,
    Both,
}

impl From<SeriesArg> for Series {
    fn from(s: SeriesArg) -> Self {
        match s {
            SeriesArg::Methods => Series::Methods,
            SeriesArg::Descriptors => Series::Descriptors,
            SeriesArg::Both => Series::Both,
        }
    }
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long)]
    pub run: PathBuf,
    /// Comma-separated 1-based splits (default all).
    #[arg(long, value_delimiter = ',')]
    pub splits: Option<Vec<usize>>,
    /// Comma-separated method names (default all).
    #[arg(long, value_delimiter = ',')]
    pub meths: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "methods")]
    pub series: SeriesArg,
    /// Number of tests plotted (default min(300, n/4)).
    #[arg(long)]
    pub max_select: Option<usize>,
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    #[arg(long, default_value_t = 600.0)]
    pub height: f64,
}

#[derive(Debug, Args)]
pub struct McsArgs {
    #[arg(long)]
    pub run: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    #[arg(long)]
    pub run: PathBuf,
    /// CSV with split,descriptor_set,method,id,prediction.
    #[arg(long)]
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct DefaultsArgs {
    /// Number of observations.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of descriptors.
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    /// Defaults for a continuous response.
    #[arg(long)]
    pub continuous: bool,
    #[arg(long, default_value_t = 10)]
    pub nfolds: usize,
}

/// Effective worker count: the flag, capped by `CVBENCH_THREADS`.
fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| Error::Argument(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?,
        ),
        Err(_) => None,
    };
    Ok(match (flag, env) {
        (Some(f), Some(e)) => Some(f.min(e)),
        (Some(f), None) => Some(f),
        (None, Some(e)) => Some(e),
        (None, None) => None,
    })
}

fn cmd_fit(a: FitArgs, out: &mut dyn Write) -> Result<()> {
    let schema = a.schema.as_deref().map(Schema::from_path).transpose()?;
    let response = a
        .response
        .clone()
        .or_else(|| schema.as_ref().map(|s| s.response_col.clone()))
        .ok_or_else(|| Error::Argument("--response is required".into()))?;
    let mut config = RunConfig::new(&a.data, response, &a.out);
    config.load.id_col = a.id.clone().or_else(|| schema.as_ref().and_then(|s| s.id_col.clone()));
    config.load.spec = match (&a.sets, &schema) {
        (Some(s), _) => Some(DescriptorSetSpec::parse_pairs(s)?),
        (None, Some(s)) => s.set_spec()?,
        (None, None) => None,
    };
    config.load.force_continuous = a.force_continuous;
    if let Some(ms) = &a.methods {
        config.methods = ms.iter().map(|m| m.parse()).collect::<Result<Vec<Method>>>()?;
    }
    if let Some(p) = &a.params {
        let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        config.params = serde_json::from_str::<BTreeMap<String, Params>>(&text)?;
    }
    config.nfolds = a.nfolds;
    config.nsplits = a.nsplits;
    config.seeds = a.seeds.clone();
    config.threshold = a.threshold;
    config.m = a.m;
    config.threads = thread_count(a.threads)?;

    let start = Instant::now();
    let run = run_model_train(&config)?;
    let mf = &run.manifest;
    let _ = writeln!(
        out,
        "fit: n = {}, {} response, {} set(s) x {} method(s) x {} split(s) x {} folds = {} tasks",
        mf.n,
        mf.task.as_str(),
        mf.sets.len(),
        mf.methods.len(),
        mf.nsplits,
        mf.nfolds,
        mf.sets.len() * mf.methods.len() * mf.nsplits * mf.nfolds
    );
    let _ = writeln!(out, "seeds: {:?}", mf.seeds);
    let _ = writeln!(
        out,
        "wrote {} in {:.2} s",
        config.out_dir.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_assess(a: AssessArgs, out: &mut dyn Write) -> Result<()> {
    let run = load_run(&a.run)?;
    let metric = a.metric.unwrap_or(Metric::default_for(run.manifest.task));
    let opts = MeasureOptions {
        m: a.m.unwrap_or(run.manifest.m),
        threshold: a.threshold.unwrap_or(run.manifest.threshold),
    };
    let threads = thread_count(a.threads)?;
    let result = with_threads(threads, || assess(&run.store, metric, &opts))??;
    let _ = write!(out, "{}", result.anova.render_text());
    for p in write_assessment(&a.run, &result)? {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(())
}

fn cmd_curves(a: CurvesArgs, out: &mut dyn Write) -> Result<()> {
    let run = load_run(&a.run)?;
    let filter = CurveFilter {
        splits: a.splits,
        methods: a.meths,
    };
    let max_select = a.max_select.unwrap_or(default_max_select(run.store.n()));
    let size = PlotSize {
        width: a.width,
        height: a.height,
    };
    for p in write_curves(&a.run, &run.store, a.series.into(), &filter, max_select, size)? {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(())
}

fn cmd_mcs(a: McsArgs, out: &mut dyn Write) -> Result<()> {
    let file = read_pairwise_csv(&a.run.join(PAIRWISE_FILE))?;
    let mut means = vec![f64::NAN; file.combos.len()];
    for c in &file.comparisons {
        means[c.combo_a] = c.mean_a;
        means[c.combo_b] = c.mean_b;
    }
    let mx = build_mcs(&file.comparisons, &file.combos, &means, file.metric, file.m, file.threshold)?;
    let stem = mcs_file_stem(file.metric);
    let svg = a.run.join(format!("{stem}.svg"));
    render_mcs_svg(&mx, &svg)?;
    let csv = a.run.join(format!("{stem}.csv"));
    write_mcs_csv(&mx, &csv)?;
    let _ = writeln!(out, "wrote {}\nwrote {}", svg.display(), csv.display());
    Ok(())
}

fn cmd_import(a: ImportArgs, out: &mut dyn Write) -> Result<()> {
    let added = import_into_run(&a.run, &a.file)?;
    let names: Vec<String> = added.iter().map(|c| c.label()).collect();
    let _ = writeln!(out, "imported {} combination(s): {}", added.len(), names.join(", "));
    Ok(())
}

fn cmd_defaults(a: DefaultsArgs, out: &mut dyn Write) -> Result<()> {
    let reg = make_model_defaults(a.n, a.p, !a.continuous, a.nfolds);
    let _ = writeln!(out, "{}", reg.to_json_pretty());
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fit(_) => "fit",
        Command::Assess(_) => "assess",
        Command::Curves(_) => "curves",
        Command::Mcs(_) => "mcs",
        Command::Import(_) => "import",
        Command::Defaults(_) => "defaults",
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Fit(a) => cmd_fit(a, out),
        Command::Assess(a) => cmd_assess(a, out),
        Command::Curves(a) => cmd_curves(a, out),
        Command::Mcs(a) => cmd_mcs(a, out),
        Command::Import(a) => cmd_import(a, out),
        Command::Defaults(a) => cmd_defaults(a, out),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let name = command_name(&cli.command);
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli.command, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}/{}]: {e}", e.module(), name);
            ExitCode::from(1)
        }
    }
}
