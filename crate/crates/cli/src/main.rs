use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use chrono::NaiveDate;

use temposum_core::discretize::RangeBin;
use temposum_core::ingest::{load_cohort, load_csv, CsvOptions};
use temposum_core::model::default_health_vocabulary;
use temposum_core::pipeline::{summarize, summarize_cohort, Setup};
use temposum_core::protoforms::{parse_protoform_list, TemplateRegistry};
use temposum_core::{Goal, Granularity, GranularityKind, Guideline, RunConfig, Vocabulary, WindowMode};

mod output;

use output::{Emitter, Format};

#[derive(Parser, Debug)]
#[command(name = "temposum", version, about = "Natural-language summaries of time-series data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarize one CSV file.
    Summarize {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Summarize every file of a cohort and aggregate across users.
    Group {
        /// Directory with one CSV per user; the file stem is the user id.
        #[arg(long)]
        cohort: PathBuf,
        #[arg(long, default_value = "*.csv")]
        pattern: String,
        /// Users with fewer logged days are left out.
        #[arg(long, default_value_t = 0)]
        min_days: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GranularityArg {
    Day,
    Week,
    Month,
    None,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value = "Day")]
    date_col: String,
    /// Comma-separated columns; all non-date columns when omitted.
    #[arg(long, value_delimiter = ',')]
    attrs: Vec<String>,
    #[arg(long, value_enum, default_value = "week")]
    granularity: GranularityArg,
    /// Days per window (7 for weeks, 30 for months).
    #[arg(long)]
    tw_len: Option<usize>,
    /// Windows follow calendar weeks and months instead of runs of logged days.
    #[arg(long)]
    calendar: bool,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..=26))]
    alphabet: u64,
    #[arg(long, default_value_t = 0.2)]
    minsup: f64,
    #[arg(long, default_value_t = 0.8)]
    minconf: f64,
    /// `attr<=value:label`, `attr>=value:label` or `attr=lo..hi:label`.
    #[arg(long = "goal")]
    goals: Vec<Goal>,
    /// Guideline JSON file, or `2000-calorie-diet`.
    #[arg(long)]
    guideline: Option<String>,
    /// Vocabulary JSON file.
    #[arg(long, env = "TEMPOSUM_VOCAB")]
    vocab: Option<PathBuf>,
    /// Raw-range bins JSON file: attribute to list of {upper_bound, label}.
    #[arg(long)]
    bins: Option<PathBuf>,
    /// Sentence templates JSON file.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Comma-separated protoform types, or `all`.
    #[arg(long, default_value = "all")]
    protoforms: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Fraction of windows sampled when estimating the cluster threshold.
    #[arg(long, default_value_t = 0.2)]
    sample_fraction: f64,
    /// Multivariate if-then prefixes constrain every attribute, not just one.
    #[arg(long)]
    prefix_all_attributes: bool,
    /// Changes smaller than this count as staying the same.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Day 0 for integer date columns.
    #[arg(long)]
    epoch: Option<NaiveDate>,
    /// Use the unsquared coverage formula.
    #[arg(long)]
    literal_coverage: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    provenance_dir: Option<PathBuf>,
    /// Also write an SVG next to each chart.
    #[arg(long)]
    svg: bool,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

/// Errors in flags or configuration files (exit 2) versus in the data (exit 3).
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} {}", path.display()))
}

impl Common {
    fn granularity(&self) -> Result<Granularity, Failure> {
        let kind = match self.granularity {
            GranularityArg::Day => GranularityKind::Day,
            GranularityArg::Week => GranularityKind::Week,
            GranularityArg::Month => GranularityKind::Month,
            GranularityArg::None => GranularityKind::FullRange,
        };
        let len = match (kind, self.tw_len) {
            (GranularityKind::Day | GranularityKind::FullRange, Some(_)) => {
                return Err(usage(anyhow!("--tw-len only applies to week and month granularity")))
            }
            (GranularityKind::Day, None) => Some(1),
            (GranularityKind::FullRange, None) => None,
            (GranularityKind::Week, l) => Some(l.unwrap_or(7)),
            (GranularityKind::Month, l) => Some(l.unwrap_or(30)),
        };
        Granularity::new(kind, len).map_err(usage)
    }

    fn setup(&self) -> Result<Setup, Failure> {
        let vocab = match &self.vocab {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading vocabulary {}", p.display()))
                    .map_err(usage)?;
                Vocabulary::from_json(&text).map_err(usage)?
            }
            None => default_health_vocabulary(),
        };
        let diet_guideline = match self.guideline.as_deref() {
            None => None,
            Some("2000-calorie-diet") => Some(Guideline::two_thousand_calorie_diet()),
            Some(p) => Some(read_json::<Guideline>(Path::new(p), "guideline").map_err(usage)?),
        };
        let config = RunConfig {
            alphabet_size: self.alphabet as usize,
            granularity: self.granularity()?,
            window_mode: if self.calendar {
                WindowMode::Calendar
            } else {
                WindowMode::LoggedDays
            },
            min_support: self.minsup,
            min_confidence: self.minconf,
            squeezer_sample_fraction: self.sample_fraction,
            rng_seed: self.seed,
            goals: self.goals.clone(),
            diet_guideline,
            trend_epsilon: self.epsilon,
            literal_coverage: self.literal_coverage,
            prefix_all_attributes: self.prefix_all_attributes,
            ..RunConfig::default()
        };
        let mut setup = Setup::new(config, vocab);
        if let Some(p) = &self.templates {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading templates {}", p.display()))
                .map_err(usage)?;
            setup.templates = TemplateRegistry::from_json(&text).map_err(usage)?;
        }
        if let Some(p) = &self.bins {
            setup.bins = read_json::<BTreeMap<String, Vec<RangeBin>>>(p, "bins").map_err(usage)?;
        }
        setup.protoforms = parse_protoform_list(&self.protoforms).map_err(|e| usage(anyhow!(e)))?;
        setup.validate().map_err(usage)?;
        Ok(setup)
    }

    fn csv_options(&self) -> CsvOptions {
        let mut opts = CsvOptions::new(&self.date_col, self.attrs.clone());
        if let Some(e) = self.epoch {
            opts.epoch = e;
        }
        opts
    }

    fn emitter(&self) -> Result<Emitter, Failure> {
        let sink: Box<dyn Write> = match &self.out {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(usage)?;
                }
                Box::new(io::BufWriter::new(
                    fs::File::create(p)
                        .with_context(|| format!("creating {}", p.display()))
                        .map_err(usage)?,
                ))
            }
            None => Box::new(io::BufWriter::new(io::stdout())),
        };
        Ok(Emitter::new(sink, self.format, self.provenance_dir.clone(), self.svg))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = match &cli.command {
        Command::Summarize { common, .. } | Command::Group { common, .. } => common,
    };
    if common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global()
            .map_err(usage)?;
    }
    let setup = common.setup()?;
    match &cli.command {
        Command::Summarize { input, .. } => {
            let series = load_csv(input, &common.csv_options()).map_err(data)?;
            let frames = summarize(&series, &setup).map_err(data)?;
            let mut out = common.emitter()?;
            for f in &frames {
                for s in &f.summaries {
                    out.individual(s, &f.frame, &setup.config).map_err(data)?;
                }
            }
            out.finish().map_err(data)
        }
        Command::Group {
            cohort,
            pattern,
            min_days,
            ..
        } => {
            let load = load_cohort(cohort, pattern, &common.csv_options(), *min_days).map_err(data)?;
            for (user, days) in &load.excluded {
                eprintln!("excluded {user}: {days} logged days");
            }
            let run = summarize_cohort(&load.dataset, &setup).map_err(data)?;
            let mut out = common.emitter()?;
            for s in &run.group {
                out.group(s, &run.users).map_err(data)?;
            }
            out.finish().map_err(data)
        }
    }
}

fn main() -> ExitCode {
    // RUST_LOG=debug shows the runner-up quantifier pairs
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        // a closed stdout (e.g. piped into `head`) is not a failure
        Err(Failure::Data(e))
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
