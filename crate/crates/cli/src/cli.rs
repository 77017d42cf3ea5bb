use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use regel_core::nlp::{parse, train, Grammar, Model, ParseConfig, TrainConfig};
use regel_core::regex::is_match;
use regel_core::sketch::{HSketch, DEFAULT_DEPTH};
use regel_core::synthesis::{synthesize, Examples, SynthConfig};

use crate::bench::{run_bench, BenchConfig};
use crate::benchmark::{load_dir, ExampleFile};
use crate::e2e::{run_description, E2eConfig};
use crate::error::{self, read_file, CliError};

pub const STATE_CAP_VAR: &str = "REGEL_MAX_STATES";

#[derive(Debug, Parser)]
#[command(name = "regel", version, about = "Regex synthesis from examples and natural language")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize from a sketch and examples
    Synth {
        /// Sketch text, or @FILE
        sketch: String,
        #[command(flatten)]
        examples: ExampleArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Upper bound for inferred integer constants
        #[arg(long)]
        max_int: Option<u32>,
    },
    /// Parse a description into sketches and synthesize from each
    E2e {
        description: String,
        #[command(flatten)]
        examples: ExampleArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        parser: ParserArgs,
        #[arg(long, default_value_t = default_parallel())]
        parallel: usize,
        #[arg(long, default_value_t = 25)]
        top_sketches: usize,
    },
    /// Simulate the interactive protocol on a directory of benchmarks
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 4)]
        iterations: usize,
        #[arg(long, default_value_t = 2)]
        examples_per_iteration: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        parser: ParserArgs,
        /// Benchmarks run concurrently
        #[arg(long, default_value_t = default_parallel())]
        parallel: usize,
        #[arg(long, default_value_t = 25)]
        top_sketches: usize,
        /// Write the JSON report here
        #[arg(long)]
        json: Option<PathBuf>,
        /// Leave wall-clock times out of the report
        #[arg(long)]
        no_timing: bool,
    },
    /// Train parser weights on a JSON-lines file of {utterance, sketch}
    Train {
        dataset: PathBuf,
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(short, long, default_value = "model.txt")]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
        #[arg(long, default_value_t = 0.1)]
        learning_rate: f64,
        #[arg(long, default_value_t = regel_core::nlp::DEFAULT_BEAM)]
        beam: usize,
    },
    /// Print the ranked sketches of a description
    Parse {
        description: String,
        #[command(flatten)]
        parser: ParserArgs,
        #[arg(long, default_value_t = 25)]
        limit: usize,
    },
    /// Test strings against a regex
    Match {
        regex: String,
        strings: Vec<String>,
    },
}

fn default_parallel() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// Positive example (repeatable)
    #[arg(short = 'p', long = "pos", allow_hyphen_values = true)]
    pub positives: Vec<String>,
    /// Negative example (repeatable)
    #[arg(short = 'n', long = "neg", allow_hyphen_values = true)]
    pub negatives: Vec<String>,
    /// JSON file with `positives` and `negatives` lists
    #[arg(long)]
    pub examples: Option<PathBuf>,
}

impl ExampleArgs {
    pub fn load(&self) -> Result<Examples, CliError> {
        let mut file = ExampleFile::default();
        if let Some(path) = &self.examples {
            file = serde_json::from_str(&read_file(path)?).map_err(|source| CliError::Json { path: path.clone(), source })?;
        }
        file.positives.extend(self.positives.iter().cloned());
        file.negatives.extend(self.negatives.iter().cloned());
        Ok(Examples::new(file.positives, file.negatives)?)
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,
    /// Seconds
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 3)]
    pub top_k: usize,
    #[arg(long)]
    pub no_prune: bool,
}

impl SearchArgs {
    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout.max(0.0))
    }
}

#[derive(Debug, Args)]
pub struct ParserArgs {
    /// Grammar file; the bundled demo grammar by default
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    /// Model file; all-zero weights by default
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = regel_core::nlp::DEFAULT_BEAM)]
    pub beam: usize,
}

fn load_grammar(path: Option<&Path>) -> Result<Grammar, CliError> {
    match path {
        Some(p) => Ok(Grammar::parse(&read_file(p)?)?),
        None => Ok(Grammar::demo()),
    }
}

impl ParserArgs {
    pub fn load(&self) -> Result<(Grammar, Model), CliError> {
        let grammar = load_grammar(self.grammar.as_deref())?;
        let model = match &self.model {
            Some(p) => read_file(p)?.parse()?,
            None => Model::default(),
        };
        Ok((grammar, model))
    }
}

fn sketch_arg(text: &str) -> Result<HSketch, CliError> {
    match text.strip_prefix('@') {
        Some(path) => error::sketch(read_file(Path::new(path))?.trim()),
        None => error::sketch(text),
    }
}

/// Applies the state cap override from the environment.
pub fn apply_state_cap() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(STATE_CAP_VAR) {
        let cap = v.trim().parse().map_err(|_| CliError::Usage(format!("{STATE_CAP_VAR} must be a positive integer, got {v:?}")))?;
        regel_core::automaton::set_state_cap(cap);
    }
    Ok(())
}

/// Runs one command, writing its results to `out`. `Ok(false)` means the
/// command ran but found nothing.
pub fn run(cmd: &Command, out: &mut dyn Write) -> Result<bool, CliError> {
    let w = |e: std::io::Error| CliError::io("<stdout>", e);
    match cmd {
        Command::Synth { sketch, examples, search, max_int } => {
            let sketch = sketch_arg(sketch)?;
            let ex = examples.load()?;
            let cfg = SynthConfig {
                depth: search.depth,
                timeout: Some(search.timeout()),
                top_k: search.top_k,
                prune: !search.no_prune,
                max_int: *max_int,
                ..Default::default()
            };
            let res = synthesize(&sketch, &ex, &cfg);
            log::info!("{:?}", res.stats);
            for r in &res.regexes {
                writeln!(out, "{r}").map_err(w)?;
            }
            Ok(!res.regexes.is_empty())
        }
        Command::E2e { description, examples, search, parser, parallel, top_sketches } => {
            let ex = examples.load()?;
            let (grammar, model) = parser.load()?;
            let cfg = E2eConfig {
                parallel: *parallel,
                top_sketches: *top_sketches,
                timeout: search.timeout(),
                top_k: search.top_k,
                depth: search.depth,
                prune: !search.no_prune,
                beam: parser.beam,
            };
            let res = run_description(description, &ex, &grammar, &model, &cfg);
            if res.fallback {
                eprintln!("no sketch parsed from the description; searching from a bare hole");
            }
            for t in &res.results {
                writeln!(out, "{}\t#{} {}", t.regex, t.sketch_rank + 1, t.sketch).map_err(w)?;
            }
            Ok(!res.results.is_empty())
        }
        Command::Bench {
            dir,
            iterations,
            examples_per_iteration,
            search,
            parser,
            parallel,
            top_sketches,
            json,
            no_timing,
        } => {
            let benchmarks = load_dir(dir)?;
            let (grammar, model) = parser.load()?;
            let cfg = BenchConfig {
                iterations: *iterations,
                examples_per_iteration: *examples_per_iteration,
                e2e: E2eConfig {
                    parallel: 1,
                    top_sketches: *top_sketches,
                    timeout: search.timeout(),
                    top_k: search.top_k,
                    depth: search.depth,
                    prune: !search.no_prune,
                    beam: parser.beam,
                },
                parallel: *parallel,
                timing: !no_timing,
            };
            let report = run_bench(&benchmarks, &grammar, &model, &cfg);
            write!(out, "{}", report.table()).map_err(w)?;
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))?;
            }
            Ok(true)
        }
        Command::Train { dataset, grammar, out: model_path, epochs, learning_rate, beam } => {
            let grammar = load_grammar(grammar.as_deref())?;
            let data = load_dataset(dataset)?;
            let cfg = TrainConfig { epochs: *epochs, learning_rate: *learning_rate, beam: *beam };
            let report = train(&data, &grammar, cfg)?;
            for (i, loss) in report.epoch_loss.iter().enumerate() {
                writeln!(out, "epoch {}\tloss {loss:.4}", i + 1).map_err(w)?;
            }
            if report.skipped > 0 {
                writeln!(out, "skipped {} unreachable items", report.skipped).map_err(w)?;
            }
            std::fs::write(model_path, report.model.to_string()).map_err(|e| CliError::io(model_path, e))?;
            Ok(true)
        }
        Command::Parse { description, parser, limit } => {
            let (grammar, model) = parser.load()?;
            let cands = parse(description, &grammar, &model, ParseConfig { beam: parser.beam, limit: *limit });
            for c in &cands {
                writeln!(out, "{:.4}\t{}", c.probability, c.sketch).map_err(w)?;
            }
            Ok(!cands.is_empty())
        }
        Command::Match { regex, strings } => {
            let r = error::regex(regex)?;
            let mut any = false;
            for s in strings {
                let hit = is_match(&r, s);
                any |= hit;
                writeln!(out, "{hit}\t{s}").map_err(w)?;
            }
            Ok(any)
        }
    }
}

#[derive(serde::Deserialize)]
struct Item {
    utterance: String,
    sketch: String,
}

/// One `{"utterance", "sketch"}` object per line.
pub fn load_dataset(path: &Path) -> Result<Vec<(String, HSketch)>, CliError> {
    let text = read_file(path)?;
    let mut data = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let item: Item = serde_json::from_str(line).map_err(|source| CliError::Json { path: path.into(), source })?;
        let sketch = error::sketch(&item.sketch).map_err(|e| CliError::Benchmark { path: path.into(), msg: format!("line {}: {e}", i + 1) })?;
        data.push((item.utterance, sketch));
    }
    Ok(data)
}

/// Exit status: 0 with results, 1 without, 2 on bad input.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let result = apply_state_cap().and_then(|()| run(&cli.command, &mut stdout.lock()));
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
