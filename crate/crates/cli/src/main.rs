mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use agm3::configuration::extract_configuration;
use agm3::fixtures;
use agm3::numkernel::{Precision, ToleranceProfile};
use agm3::quartic_theta::{alpha_class, bitangents, FlagSpec};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use commands::{Context, Failure};
use input::{configuration_spec, form_spec, parse_flag, AlphaSpec, Document};
use report::{ErrorOut, InputInfo, Recorder, RunReport, Status, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Chain {
    /// Each step consumes the previous step's dual flag.
    Dual,
    /// Every step reuses the starting flag.
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FixtureName {
    Trott,
    Random,
}

#[derive(Debug, Parser)]
#[command(name = "agm3", version, about = "Genus-3 AGM step on plane quartics, with numerical certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input document (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Flag, e.g. "pair=1,2;partition=3-4,5-6".
    #[arg(long, global = true)]
    flag: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    eps_rank: Option<f64>,
    #[arg(long, global = true)]
    eps_point: Option<f64>,
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionArg>,
    /// Number of steps for `iterate`.
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,
    /// Flag chaining for `iterate`.
    #[arg(long, global = true, value_enum, default_value_t = Chain::Dual)]
    chain: Chain,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The 28 bitangents with residuals.
    Bitangents,
    /// The 63 two-torsion classes and their pairing.
    Classes,
    /// Count pairs, partitions and flags.
    Flags,
    /// Extract (E, Q, q) and the space model; tower pattern if a flag is given.
    Extract,
    /// One AGM step.
    Step,
    /// A step followed by the step with the dual flag.
    Roundtrip,
    /// Chained steps (`--n`).
    Iterate,
    /// Every check on one input.
    Verify,
    /// Print an input document for a built-in quartic.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        /// Emit the extracted configuration instead of the quartic.
        #[arg(long)]
        extracted: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bitangents => "bitangents",
            Command::Classes => "classes",
            Command::Flags => "flags",
            Command::Extract => "extract",
            Command::Step => "step",
            Command::Roundtrip => "roundtrip",
            Command::Iterate => "iterate",
            Command::Verify => "verify",
            Command::Fixture { .. } => "fixture",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("agm3: {e}");
            ExitCode::from(1)
        }
    }
}

fn load(cli: &Cli) -> Result<(Document, Option<String>), UsageError> {
    let Some(path) = &cli.config else {
        return Ok((Document::default(), None));
    };
    let bytes = std::fs::read(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| UsageError(format!("{}: not UTF-8", path.display())))?;
    let doc = Document::parse(&text)?;
    let hash: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok((doc, Some(hash)))
}

fn profile(cli: &Cli, doc: &Document) -> Result<ToleranceProfile, UsageError> {
    let mut p = doc.profile();
    if let Some(s) = cli.seed {
        p.seed = s;
    }
    if let Some(x) = cli.eps_rank {
        p.eps_rank = x;
    }
    if let Some(x) = cli.eps_point {
        p.eps_point = x;
    }
    match cli.precision {
        Some(PrecisionArg::Double) => p.precision = Precision::Double,
        Some(PrecisionArg::Extended) => p.precision = Precision::Extended,
        None => {}
    }
    p.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(p)
}

fn run(cli: &Cli) -> Result<i32, UsageError> {
    if let Command::Fixture { name, extracted } = &cli.command {
        let doc = fixture_document(*name, *extracted, cli.seed)?;
        let text = serde_json::to_string_pretty(&doc).expect("document serializes");
        emit(cli, &text)?;
        return Ok(0);
    }
    let (doc, hash) = load(cli)?;
    let mut profile = profile(cli, &doc)?;
    let flag_text = cli.flag.clone().or_else(|| doc.flag().map(str::to_string));
    let flag = flag_text.as_deref().map(parse_flag).transpose()?;
    let mut info = InputInfo::new(
        cli.command.name(),
        cli.config.as_ref().map(|p| p.display().to_string()),
        hash,
        &profile,
        flag.map(|f| f.to_string()),
    );

    let (mut rec, mut failure) = execute(cli, &doc, &profile, flag);
    if let Some(Failure::Domain(e)) = &failure {
        if e.is_numeric() && profile.precision == Precision::Double {
            profile = profile.escalated();
            info.precision = profile.precision;
            info.escalated = true;
            (rec, failure) = execute(cli, &doc, &profile, flag);
        }
    }

    let (status, error) = match failure {
        None if rec.checks.iter().all(|c| c.pass) => (Status::Pass, None),
        None => (Status::CheckFailed, None),
        Some(Failure::Usage(u)) => {
            eprintln!("agm3: {u}");
            (Status::InvalidInput, Some(ErrorOut { stages: vec![], message: u.0 }))
        }
        Some(Failure::Domain(e)) => {
            let status = if e.is_non_generic() {
                Status::NonGeneric
            } else if e.is_numeric() {
                Status::NumericFailure
            } else {
                Status::InvalidInput
            };
            let stages = e.stages().into_iter().map(str::to_string).collect();
            (status, Some(ErrorOut { stages, message: e.to_string() }))
        }
    };
    let report = RunReport {
        input: info,
        stages: rec.stages,
        verdict: Verdict { status, checks: rec.checks, error },
        timings_ms: rec.timings_ms,
    };
    emit(cli, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok(status.exit_code())
}

fn execute(cli: &Cli, doc: &Document, profile: &ToleranceProfile, flag: Option<FlagSpec>) -> (Recorder, Option<Failure>) {
    let ctx = Context { doc, profile: profile.clone(), flag, n: cli.n, chain: cli.chain };
    let mut rec = Recorder::default();
    let result = match cli.command {
        Command::Bitangents => commands::bitangents_cmd(&ctx, &mut rec),
        Command::Classes => commands::classes_cmd(&ctx, &mut rec),
        Command::Flags => commands::flags_cmd(&ctx, &mut rec),
        Command::Extract => commands::extract_cmd(&ctx, &mut rec),
        Command::Step => commands::step_cmd(&ctx, &mut rec),
        Command::Roundtrip => commands::roundtrip_cmd(&ctx, &mut rec),
        Command::Iterate => commands::iterate_cmd(&ctx, &mut rec),
        Command::Verify => commands::verify_cmd(&ctx, &mut rec),
        Command::Fixture { .. } => unreachable!("handled before execution"),
    };
    (rec, result.err())
}

fn emit(cli: &Cli, text: &str) -> Result<(), UsageError> {
    match &cli.out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| UsageError(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

const FIXTURE_ALPHA: (usize, usize) = (2, 7);
const FIXTURE_FLAG: &str = "pair=1,2;partition=3-4,5-6";

fn fixture_document(name: FixtureName, extracted: bool, seed: Option<u64>) -> Result<Document, UsageError> {
    let c = match name {
        FixtureName::Trott => fixtures::trott(),
        FixtureName::Random => fixtures::random_quartic(seed.unwrap_or(1)),
    };
    let mut doc = Document { seed, ..Document::default() };
    if !extracted {
        doc.quartic = Some(form_spec(c.form()));
        doc.alpha = Some(AlphaSpec::Indices { indices: [FIXTURE_ALPHA.0, FIXTURE_ALPHA.1] });
        doc.flag = Some(FIXTURE_FLAG.to_string());
        return Ok(doc);
    }
    let profile = doc.profile();
    let domain = |e: agm3::Error| UsageError(format!("fixture extraction failed: {e}"));
    let bt = bitangents(&c, &profile).map_err(domain)?;
    let class = alpha_class(&bt, FIXTURE_ALPHA, &profile).map_err(domain)?;
    let (config, _) = extract_configuration(&c, &bt, &class, &profile).map_err(domain)?;
    let flag = parse_flag(FIXTURE_FLAG)?;
    doc.configuration = Some(configuration_spec(&config, Some(&flag)));
    Ok(doc)
}
