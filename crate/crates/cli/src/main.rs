use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use melodic_measure::distribution::{combined_distribution, spacing_lab, Beta, SpacingLabConfig};
use melodic_measure::experiments::{
    fig3_claim, reproduce_energy_sweeps, reproduce_permutation_claims, reproduce_table1, ExperimentReport, Verdict,
};
use melodic_measure::io::{normalize_register, parse_pieces, PieceFormat, RegisterPolicy};
use melodic_measure::{
    decompose, distribution_check, energy_sweep, m_value, permutation_experiment, EnergyLevel, EntropyMode, Grouping,
    MeasureConfig, Parallelism, PermutationConfig, Piece, SearchConfig, DEFAULT_SIGNATURE,
};

mod render;

#[derive(Parser, Debug)]
#[command(name = "melodic", version, about = "Entropy-energy scoring and pattern search for short melodies")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Print one machine-readable JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Also write figure/histogram data as CSV to this path.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = EntropyArg::Cw)]
    entropy: EntropyArg,

    /// How transitions are grouped into directions before differencing.
    #[arg(long, global = true, value_enum, default_value_t = GroupingArg::Runs)]
    grouping: GroupingArg,

    /// Read delimited piece files as MIDI note numbers.
    #[arg(long, global = true)]
    midi: bool,

    /// Score frequencies as given, without octave shifting into 100-300 Hz.
    #[arg(long, global = true)]
    no_register_normalize: bool,

    /// Exit with status 2 when an experiment diverges from the published result.
    #[arg(long, global = true)]
    strict: bool,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EntropyArg {
    Cw,
    Shannon,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupingArg {
    Runs,
    Global,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-level entropy, energy, ratio and M for each piece in a file.
    Score { file: PathBuf },
    /// Show the l1 / t / w / d levels of each piece.
    Decompose { file: PathBuf },
    /// Cluster the combined level values and compare the size signature.
    Check {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIGNATURE.to_vec())]
        signature: Vec<usize>,
    },
    /// Score every distinct arrangement of each piece's transitions.
    Permute {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIGNATURE.to_vec())]
        signature: Vec<usize>,
    },
    /// Rank every grid pattern at one energy level.
    Sweep {
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 3)]
        length: usize,
        #[arg(long, default_value_t = 5.0)]
        step: f64,
        #[arg(long, default_value_t = 40.0)]
        max: f64,
        #[arg(long, default_value_t = 120.0)]
        start: f64,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIGNATURE.to_vec())]
        signature: Vec<usize>,
    },
    /// Reproduce the published M values of the five reference pieces.
    Table1,
    /// Reproduce the published permutation claim for the reference pieces.
    Permutations,
    /// Reproduce the published winners at energy levels 25, 45, 60 and 75.
    Sweeps,
    /// Rank fixed-sum spacing multisets by entropy-energy ratio.
    Fig3 {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        sum: f64,
        #[arg(long, default_value_t = 5.0)]
        step: f64,
        #[arg(long, default_value_t = 40.0)]
        max: f64,
        /// Surmise ensemble index (1, 2 or 4).
        #[arg(long, default_value_t = 2)]
        beta: u8,
    },
}

impl Global {
    fn measure(&self) -> MeasureConfig {
        MeasureConfig {
            entropy: match self.entropy {
                EntropyArg::Cw => EntropyMode::CoifmanWickerhauser,
                EntropyArg::Shannon => EntropyMode::ShannonNormalized,
            },
            grouping: match self.grouping {
                GroupingArg::Runs => Grouping::SignRuns,
                GroupingArg::Global => Grouping::GlobalSign,
            },
        }
    }

    fn parallelism(&self) -> Parallelism {
        match self.threads {
            None => Parallelism::Auto,
            Some(0 | 1) => Parallelism::Sequential,
            Some(n) => Parallelism::Threads(n),
        }
    }

    fn register(&self) -> RegisterPolicy {
        RegisterPolicy { enabled: !self.no_register_normalize, ..RegisterPolicy::default() }
    }
}

/// What a command produced, before rendering.
struct Output {
    json: Value,
    text: String,
    csv: Option<CsvTable>,
    diverged: bool,
}

struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn load_pieces(path: &Path, global: &Global) -> Result<Vec<(Piece, i32)>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let pieces = parse_pieces(&bytes, PieceFormat::from_path(path), global.midi)
        .with_context(|| format!("parsing {}", path.display()))?;
    pieces
        .iter()
        .map(|p| normalize_register(p, &global.register()).map_err(Into::into))
        .collect()
}

fn value_rows<'a>(values: impl IntoIterator<Item = &'a f64>) -> Vec<Vec<String>> {
    values.into_iter().map(|v| vec![v.to_string()]).collect()
}

fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    let measure = g.measure();
    match &cli.command {
        Command::Score { file } => {
            let mut results = Vec::new();
            let mut text = String::new();
            let mut rows = Vec::new();
            for (piece, shift) in load_pieces(file, g)? {
                let score = m_value(&piece, measure)?;
                let dec = decompose(&piece, measure.grouping);
                rows.extend(value_rows(&combined_distribution(&dec).values));
                text.push_str(&render::score(&piece, shift, &score));
                results.push(json!({
                    "label": piece.label(),
                    "frequencies": piece.frequencies(),
                    "octave_shift": shift,
                    "score": score,
                }));
            }
            Ok(Output {
                json: json!({ "command": "score", "measure": measure, "results": results }),
                text,
                csv: Some(CsvTable { header: vec!["value"], rows }),
                diverged: false,
            })
        }
        Command::Decompose { file } => {
            let mut results = Vec::new();
            let mut text = String::new();
            let mut rows = Vec::new();
            for (piece, shift) in load_pieces(file, g)? {
                let dec = decompose(&piece, measure.grouping);
                rows.extend(value_rows(&combined_distribution(&dec).values));
                text.push_str(&render::decomposition(&piece, shift, &dec));
                results.push(json!({ "label": piece.label(), "octave_shift": shift, "decomposition": dec }));
            }
            Ok(Output {
                json: json!({ "command": "decompose", "grouping": measure.grouping, "results": results }),
                text,
                csv: Some(CsvTable { header: vec!["value"], rows }),
                diverged: false,
            })
        }
        Command::Check { file, signature } => {
            let mut results = Vec::new();
            let mut text = String::new();
            let mut rows = Vec::new();
            for (piece, _) in load_pieces(file, g)? {
                let dec = decompose(&piece, measure.grouping);
                let check = distribution_check(&dec, signature)?;
                rows.extend(value_rows(&combined_distribution(&dec).values));
                text.push_str(&render::check(&piece, &check));
                results.push(json!({ "label": piece.label(), "check": check }));
            }
            Ok(Output {
                json: json!({ "command": "check", "results": results }),
                text,
                csv: Some(CsvTable { header: vec!["value"], rows }),
                diverged: false,
            })
        }
        Command::Permute { file, signature } => {
            let config = PermutationConfig { signature: signature.clone(), measure };
            let mut reports = Vec::new();
            let mut rows = Vec::new();
            let mut text = String::new();
            for (piece, _) in load_pieces(file, g)? {
                let report = permutation_experiment(&piece, &config)?;
                rows.extend(render::candidate_rows(&report.candidates));
                text.push_str(&render::permutation(&report));
                reports.push(report);
            }
            let diverged = reports.iter().any(|r| !r.original_is_argmax);
            Ok(Output {
                json: json!({ "command": "permute", "config": config, "results": reports }),
                text,
                csv: Some(CsvTable { header: vec!["pattern", "M", "passed", "rank"], rows }),
                diverged,
            })
        }
        Command::Sweep { level, length, step, max, start, signature } => {
            let config = SearchConfig {
                length: *length,
                step: *step,
                max_magnitude: *max,
                start_frequency: *start,
                target_level: EnergyLevel(*level),
                signature: signature.clone(),
                measure,
            };
            let report = energy_sweep(&config, g.parallelism())?;
            Ok(Output {
                text: render::sweep(&report),
                csv: Some(CsvTable {
                    header: vec!["pattern", "M", "passed", "rank"],
                    rows: render::candidate_rows(&report.candidates),
                }),
                json: json!({ "command": "sweep", "report": report }),
                diverged: false,
            })
        }
        Command::Table1 => {
            let report = reproduce_table1(measure)?;
            let rows = report
                .claims
                .iter()
                .map(|c| vec![c.id.clone(), c.expected.to_string(), c.computed.to_string(), verdict(c.verdict)])
                .collect();
            Ok(experiment_output(report, Some(CsvTable { header: vec!["claim", "expected", "computed", "verdict"], rows })))
        }
        Command::Permutations => {
            let report = reproduce_permutation_claims(&PermutationConfig { measure, ..PermutationConfig::default() })?;
            Ok(experiment_output(report, None))
        }
        Command::Sweeps => {
            let report = reproduce_energy_sweeps(measure, g.parallelism())?;
            let mut rows = Vec::new();
            for level in report.details["levels"].as_array().into_iter().flatten() {
                for w in level["winners"].as_array().into_iter().flatten() {
                    rows.push(vec![
                        level["level"].to_string(),
                        w["label"].as_str().unwrap_or_default().to_owned(),
                        w["pattern"].to_string(),
                        w["m"].to_string(),
                        w["passed_filter"].to_string(),
                        w["rank"].to_string(),
                    ]);
                }
            }
            let csv = CsvTable { header: vec!["level", "label", "pattern", "M", "passed", "rank"], rows };
            Ok(experiment_output(report, Some(csv)))
        }
        Command::Fig3 { count, sum, step, max, beta } => {
            let beta = Beta::try_from(*beta)?;
            let lab = spacing_lab(&SpacingLabConfig { count: *count, target_sum: *sum, step: *step, max_value: *max, beta })?;
            let claim = fig3_claim(&lab);
            let rows = lab.argmax().map(|m| value_rows(&m.values)).unwrap_or_default();
            Ok(Output {
                text: render::fig3(&lab, &claim),
                json: json!({ "command": "fig3", "report": lab, "claim": claim }),
                csv: Some(CsvTable { header: vec!["value"], rows }),
                diverged: claim.verdict == Verdict::Divergence,
            })
        }
    }
}

fn verdict(v: Verdict) -> String {
    match v {
        Verdict::Pass => "pass".into(),
        Verdict::Divergence => "divergence".into(),
    }
}

fn experiment_output(report: ExperimentReport, csv: Option<CsvTable>) -> Output {
    Output {
        text: render::experiment(&report),
        diverged: !report.all_passed(),
        json: serde_json::to_value(&report).expect("reports serialize"),
        csv,
    }
}

fn write_csv(path: &Path, table: &CsvTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli).and_then(|out| {
        let mut stdout = std::io::stdout().lock();
        if cli.global.json {
            writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json)?)?;
        } else {
            write!(stdout, "{}", out.text)?;
        }
        if let Some(path) = &cli.global.csv {
            let table = out.csv.as_ref().ok_or_else(|| anyhow!("this command has no CSV output"))?;
            write_csv(path, table)?;
        }
        Ok(out.diverged)
    });
    match result {
        Ok(true) if cli.global.strict => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
