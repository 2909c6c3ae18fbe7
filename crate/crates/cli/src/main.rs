use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use longzeta::fuzz::{run_campaign, CampaignConfig, TrajectoryReport, DEFAULT_SEED};
use longzeta::invariant::{
    certify_minimality, virtual_lower_bound, zeta, zeta_split, InvariantError,
    MinimalityCertificate,
};
use longzeta::moves::{apply, enumerate_sites, MoveKind, MoveLog, MoveSpec};
use longzeta::oracle::{raw_equal_in_t, raw_reduce, render_back, RawLaurentPQ};
use longzeta::{DiagramCode, DiagramError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const CORPUS: [(&str, &str); 4] = [
    (
        "virtual_kink",
        include_str!("../../../data/virtual_kink.gauss"),
    ),
    ("trefoil", include_str!("../../../data/trefoil.gauss")),
    ("figure8", include_str!("../../../data/figure8.gauss")),
    (
        "kink_chain_3",
        include_str!("../../../data/kink_chain_3.gauss"),
    ),
];

#[derive(Parser)]
#[command(
    name = "longzeta",
    version,
    about = "The zeta-polynomial of long virtual knot diagrams"
)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print zeta of a diagram.
    Zeta { file: PathBuf },
    /// Print the two parts zeta- and zeta+.
    Split { file: PathBuf },
    /// Check whether the diagram has minimal virtual crossing number.
    Certify { file: PathBuf },
    /// Lower bound for the virtual crossing number.
    Bound { file: PathBuf },
    /// Product of two long diagrams.
    Concat { first: PathBuf, second: PathBuf },
    /// Apply or list moves.
    Moves {
        #[command(subcommand)]
        action: MovesAction,
    },
    /// Check invariance along random move sequences.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 20)]
        steps: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Where to write the move log of the first failing trajectory.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    #[command(hide = true)]
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Built-in example diagrams.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum MovesAction {
    /// Apply moves given on the command line or in a log file.
    Apply {
        file: PathBuf,
        #[arg(long)]
        log: Option<PathBuf>,
        /// Moves such as "R1_insert 0 + OU".
        moves: Vec<String>,
    },
    /// List applicable sites.
    Sites {
        file: PathBuf,
        #[arg(long)]
        kind: Option<String>,
    },
}

#[derive(Subcommand)]
enum OracleAction {
    Selftest {
        #[arg(long, default_value_t = 1000)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
}

enum CliError {
    Input(String),
    Internal(String),
}

impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Diagram(d) => d.into(),
            InvariantError::NoClassicalCrossings => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

type Output = Result<(String, Value), CliError>;

fn read_code(path: &Path) -> Result<DiagramCode, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let code: DiagramCode = text
        .parse()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    code.validate()
        .map_err(|v| CliError::from(DiagramError::Invalid(v)))?;
    Ok(code)
}

fn certificate_json(c: &MinimalityCertificate) -> Value {
    json!({
        "k": c.k,
        "detB": c.det_b.to_string(),
        "sk_coeff": c.sk_coefficient.to_string(),
        "top_deg": c.zeta_top,
        "minimal": c.minimal,
    })
}

fn cmd_zeta(file: &Path) -> Output {
    let z = zeta(&read_code(file)?)?;
    Ok((format!("zeta = {z}"), json!({ "zeta": z.to_string() })))
}

fn cmd_split(file: &Path) -> Output {
    let (minus, plus) = zeta_split(&read_code(file)?)?;
    Ok((
        format!("zeta- = {minus}\nzeta+ = {plus}"),
        json!({ "minus": minus.to_string(), "plus": plus.to_string() }),
    ))
}

fn cmd_certify(file: &Path) -> Output {
    let code = read_code(file)?;
    let z = zeta(&code)?;
    let cert = certify_minimality(&code)?;
    Ok((format!("zeta = {z}; {cert}"), certificate_json(&cert)))
}

fn cmd_bound(file: &Path) -> Output {
    let code = read_code(file)?;
    let bound = virtual_lower_bound(&code)?;
    Ok((
        format!(
            "virtual crossing number >= {bound} (diagram has k = {})",
            code.virtual_count()
        ),
        json!({ "lower_bound": bound, "k": code.virtual_count() }),
    ))
}

fn cmd_concat(first: &Path, second: &Path) -> Output {
    let product = read_code(first)?.connect_sum(&read_code(second)?);
    Ok((product.to_string(), json!({ "code": product.to_string() })))
}

fn cmd_moves_apply(file: &Path, log: Option<&Path>, moves: &[String]) -> Output {
    let mut code = read_code(file)?;
    let mut specs = Vec::new();
    if let Some(path) = log {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let parsed: MoveLog = text
            .parse()
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        specs.extend(parsed.moves);
    }
    for m in moves {
        specs.push(
            m.parse::<MoveSpec>()
                .map_err(|e| CliError::Input(e.to_string()))?,
        );
    }
    for m in &specs {
        code = apply(&code, m).map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok((
        code.to_string(),
        json!({ "code": code.to_string(), "moves": specs.len() }),
    ))
}

fn cmd_moves_sites(file: &Path, kind: Option<&str>) -> Output {
    let code = read_code(file)?;
    let kinds: Vec<MoveKind> = match kind {
        Some(k) => vec![k
            .parse()
            .map_err(|e: longzeta::moves::MoveError| CliError::Input(e.to_string()))?],
        None => MoveKind::ALL.to_vec(),
    };
    let sites: Vec<String> = kinds
        .into_iter()
        .flat_map(|k| enumerate_sites(&code, k))
        .map(|m| m.to_string())
        .collect();
    Ok((sites.join("\n"), json!({ "sites": sites })))
}

fn replay_text(t: &TrajectoryReport) -> String {
    format!("# start: {}\n# seed: {}\n{}", t.start, t.seed, t.log)
}

fn cmd_fuzz(trials: u32, steps: u32, seed: u64, log: Option<&Path>) -> Output {
    let config = CampaignConfig {
        trials,
        steps,
        seed,
        ..Default::default()
    };
    let report = run_campaign(&config);
    let summary = report.to_string();
    let first = report.failures.first();
    let body = json!({
        "trials": report.trials,
        "passed": report.passed,
        "max_abs_r": report.max_abs_r,
        "first_failure": first.map(|t| json!({
            "seed": t.seed,
            "step": t.failure.as_ref().map(|f| f.step),
            "message": t.failure.as_ref().map(|f| f.message.clone()),
            "start": t.start.to_string(),
            "log": t.log.to_string(),
        })),
    });
    match first {
        None => Ok((summary, body)),
        Some(t) => {
            let replay = replay_text(t);
            if let Some(path) = log {
                fs::write(path, &replay)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            let failure = t.failure.as_ref().expect("failed trajectory");
            Err(CliError::Internal(format!(
                "{summary}\nfirst failure at step {}: {}\n{replay}",
                failure.step, failure.message
            )))
        }
    }
}

fn cmd_oracle_selftest(trials: u32, seed: u64) -> Output {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = || {
        (0..rng.gen_range(0..5)).fold(RawLaurentPQ::zero(), |acc, _| {
            &acc + &RawLaurentPQ::monomial(
                rng.gen_range(-3..=3),
                rng.gen_range(-3..=3),
                rng.gen_range(-4..=4),
            )
        })
    };
    let mut agree = 0;
    for _ in 0..trials {
        let (x, y) = (raw(), raw());
        let product = &raw_reduce(&x) * &raw_reduce(&y);
        if raw_equal_in_t(&render_back(&product), &(&x * &y)) {
            agree += 1;
        }
    }
    let text = format!("oracle selftest: {agree}/{trials} products agree");
    if agree == trials {
        Ok((text, json!({ "trials": trials, "agree": agree })))
    } else {
        Err(CliError::Internal(text))
    }
}

fn cmd_corpus_list() -> Output {
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    for (name, text) in CORPUS {
        let code: DiagramCode = text
            .parse()
            .map_err(|e: longzeta::diagram::ParseError| CliError::Internal(e.to_string()))?;
        lines.push(format!("{name}: {code}"));
        entries.push(json!({ "name": name, "code": code.to_string() }));
    }
    Ok((lines.join("\n"), Value::Array(entries)))
}

fn run(cli: Cli) -> Output {
    match cli.command {
        Command::Zeta { file } => cmd_zeta(&file),
        Command::Split { file } => cmd_split(&file),
        Command::Certify { file } => cmd_certify(&file),
        Command::Bound { file } => cmd_bound(&file),
        Command::Concat { first, second } => cmd_concat(&first, &second),
        Command::Moves {
            action: MovesAction::Apply { file, log, moves },
        } => cmd_moves_apply(&file, log.as_deref(), &moves),
        Command::Moves {
            action: MovesAction::Sites { file, kind },
        } => cmd_moves_sites(&file, kind.as_deref()),
        Command::Fuzz {
            trials,
            steps,
            seed,
            log,
        } => cmd_fuzz(trials, steps, seed, log.as_deref()),
        Command::Oracle {
            action: OracleAction::Selftest { trials, seed },
        } => cmd_oracle_selftest(trials, seed),
        Command::Corpus {
            action: CorpusAction::List,
        } => cmd_corpus_list(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok((text, value)) => {
            if json {
                println!("{value}");
            } else if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
