use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sonoform_client::Client;
use sonoform_core::acoustics::FEATURE_NAMES;
use sonoform_core::audio::write_wav;
use sonoform_core::catalogue::{builtin_baseline, builtin_proposed, load_manifest, CatalogueError, SoundCatalogue};
use sonoform_core::nav::NavMove;
use sonoform_core::principles::{check_discriminability, validate, LintConfig};
use sonoform_core::sonifier::{element_cue, plan_walkthrough, render_timeline, Audience, RenderProfile};
use sonoform_core::stats::{load_responses, study_report, StudyReport, DEFAULT_ALPHA};
use sonoform_core::uml::{assign_layout, parse_diagram, ClassModel};
use sonoform_service::{AppState, ServiceConfig};

const EX_VIOLATIONS: u8 = 2;
const EX_USAGE: u8 = 64;
const EX_NOINPUT: u8 = 66;
const EX_SOFTWARE: u8 = 70;

macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*)) };
}

macro_rules! outln {
    () => { emit(format_args!("\n")) };
    ($($t:tt)*) => { emit(format_args!("{}\n", format_args!($($t)*))) };
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn emit(args: std::fmt::Arguments) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().lock().write_fmt(args) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("sonoform: {e}");
        std::process::exit(i32::from(EX_SOFTWARE));
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EX_USAGE,
            CliError::Input(_) => EX_NOINPUT,
            CliError::Internal(_) => EX_SOFTWARE,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Sonify UML class diagrams with a sound catalogue, lint catalogues and
/// analyse preference studies.
#[derive(Debug, Parser)]
#[command(name = "sonoform", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lint a catalogue; exits 2 when error-severity violations are found.
    Validate {
        /// Manifest path, `builtin:proposed` or `builtin:baseline`.
        catalogue: String,
        /// Study evidence: a report from `analyze --json` or a responses CSV.
        #[arg(long)]
        evidence: Option<PathBuf>,
        /// Also check the profile-dependent principles against the default profile.
        #[arg(long)]
        with_profile: bool,
        #[arg(long)]
        json: bool,
    },
    /// Render an audio walkthrough of a model.
    Render {
        model: PathBuf,
        catalogue: String,
        #[command(flatten)]
        render: RenderArgs,
        #[arg(long, default_value = "walkthrough.wav")]
        out: PathBuf,
        #[arg(long)]
        captions: Option<PathBuf>,
    },
    /// Render the cue of one element.
    Cue {
        model: PathBuf,
        catalogue: String,
        /// Element id (e.g. `class:library.Book`) or classifier name.
        element: String,
        #[command(flatten)]
        render: RenderArgs,
        #[arg(long, default_value = "cue.wav")]
        out: PathBuf,
    },
    /// Chi-square and Holm-Bonferroni analysis of a responses CSV.
    Analyze {
        responses: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        json: bool,
    },
    /// Print the pairwise discriminability matrix of a catalogue.
    Discriminate {
        catalogue: String,
        #[arg(long)]
        json: bool,
    },
    /// Serve a model over HTTP for interactive navigation.
    Serve {
        model: PathBuf,
        catalogue: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Drive a running service: open a session and apply moves in order.
    Nav {
        /// Service root, e.g. http://127.0.0.1:8080
        url: String,
        #[arg(long, default_value = "novice")]
        audience: Audience,
        /// Moves: next, prev, into, out, follow:K, repeat, where.
        moves: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long, default_value = "expert")]
    audience: Audience,
    /// Speech command; `{text}` is replaced by the quoted caption and the
    /// command must write WAV to standard output.
    #[arg(long)]
    tts_cmd: Option<String>,
    #[arg(long)]
    no_motif: bool,
}

impl RenderArgs {
    fn profile(&self) -> RenderProfile {
        RenderProfile {
            audience: self.audience,
            tts_hook: self.tts_cmd.clone(),
            motif_enabled: !self.no_motif,
            ..RenderProfile::default()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_catalogue(arg: &str) -> Result<SoundCatalogue> {
    match arg {
        "builtin:proposed" => Ok(builtin_proposed()),
        "builtin:baseline" => Ok(builtin_baseline()),
        other if other.starts_with("builtin:") => Err(CliError::Usage(format!(
            "unknown builtin catalogue {other} (expected builtin:proposed or builtin:baseline)"
        ))),
        path => load_manifest(path).map_err(|e| match e {
            CatalogueError::Io { .. } => CliError::Input(e.to_string()),
            other => CliError::Input(format!("{path}: {other}")),
        }),
    }
}

fn load_model(path: &Path) -> Result<ClassModel> {
    let text = read(path)?;
    let model = parse_diagram(&text).map_err(|e| CliError::Input(format!("{}:{e}", path.display())))?;
    Ok(assign_layout(&model))
}

fn load_evidence(path: &Path) -> Result<StudyReport> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let data = load_responses(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok(study_report(&data, DEFAULT_ALPHA));
    }
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))
}

fn parse_move(s: &str) -> Result<NavMove> {
    Ok(match s {
        "next" => NavMove::NextSibling,
        "prev" => NavMove::PrevSibling,
        "into" => NavMove::Into,
        "out" => NavMove::Out,
        "repeat" => NavMove::RepeatCue,
        "where" => NavMove::WhereAmI,
        other => match other.strip_prefix("follow:").and_then(|k| k.parse().ok()) {
            Some(index) => NavMove::FollowRelationship { index },
            None => return Err(CliError::Usage(format!("unknown move {other}"))),
        },
    })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { catalogue, evidence, with_profile, json } => {
            let cat = load_catalogue(&catalogue)?;
            let evidence = evidence.as_deref().map(load_evidence).transpose()?;
            let profile = with_profile.then(RenderProfile::default);
            let report = validate(&cat, &LintConfig::default(), evidence.as_ref(), profile.as_ref());
            if json {
                outln!("{}", to_json(&report)?);
            } else {
                out!("{}", report.to_text());
            }
            Ok(if report.error_count() > 0 { EX_VIOLATIONS } else { 0 })
        }
        Command::Render { model, catalogue, render, out, captions } => {
            let model = load_model(&model)?;
            let cat = load_catalogue(&catalogue)?;
            let profile = render.profile();
            let timeline = plan_walkthrough(&model, &cat, &profile).map_err(|e| CliError::Input(e.to_string()))?;
            let rendered =
                render_timeline(&timeline, &cat, &profile).map_err(|e| CliError::Internal(e.to_string()))?;
            for w in &rendered.warnings {
                eprintln!("warning: {w}");
            }
            write_wav(&rendered.audio, &out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
            if let Some(path) = captions {
                std::fs::write(&path, rendered.captions.to_webvtt())
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            outln!(
                "{} events, {:.2} s, written to {}",
                timeline.events.len(),
                rendered.audio.duration_s(),
                out.display()
            );
            Ok(0)
        }
        Command::Cue { model, catalogue, element, render, out } => {
            let model = load_model(&model)?;
            let cat = load_catalogue(&catalogue)?;
            let e = model.find_element(&element).ok_or_else(|| CliError::Usage(format!("no element {element}")))?;
            let (audio, caption) =
                element_cue(&model, e, &cat, &render.profile()).map_err(|e| CliError::Input(e.to_string()))?;
            write_wav(&audio, &out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
            outln!("{caption}");
            Ok(0)
        }
        Command::Analyze { responses, alpha, json } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(CliError::Usage(format!("alpha must lie in (0, 1), got {alpha}")));
            }
            let data = load_responses(&read(&responses)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", responses.display())))?;
            let report = study_report(&data, alpha);
            if json {
                outln!("{}", to_json(&report)?);
            } else {
                out!("{}", report.to_text());
            }
            Ok(0)
        }
        Command::Discriminate { catalogue, json } => {
            let cat = load_catalogue(&catalogue)?;
            let (_, report) = check_discriminability(&cat, &LintConfig::default())
                .map_err(|e| CliError::Input(e.to_string()))?;
            if json {
                outln!("{}", to_json(&report)?);
                return Ok(0);
            }
            let labels: Vec<String> =
                report.concepts.iter().enumerate().map(|(k, name)| format!("{}.{name}", k + 1)).collect();
            let width = labels.iter().map(String::len).max().unwrap_or(0);
            out!("{:width$}", "");
            for k in 0..report.concepts.len() {
                out!(" {:>6}", k + 1);
            }
            outln!();
            for (label, row) in labels.iter().zip(&report.distances) {
                out!("{label:width$}");
                for d in row {
                    out!(" {d:>6.2}");
                }
                outln!();
            }
            outln!("threshold {} over features: {}", report.threshold, FEATURE_NAMES.join(", "));
            if !report.dropped_dimensions.is_empty() {
                outln!("constant dimensions dropped: {}", report.dropped_dimensions.join(", "));
            }
            Ok(0)
        }
        Command::Serve { model, catalogue, port, host } => {
            let model = load_model(&model)?;
            let cat = load_catalogue(&catalogue)?;
            let state = AppState::new(model, cat, ServiceConfig::default());
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port))
                    .await
                    .map_err(|e| CliError::Internal(format!("bind {host}:{port}: {e}")))?;
                let addr = listener.local_addr().map_err(|e| CliError::Internal(e.to_string()))?;
                eprintln!("listening on http://{addr}");
                sonoform_service::serve(listener, state).await.map_err(|e| CliError::Internal(e.to_string()))
            })?;
            Ok(0)
        }
        Command::Nav { url, audience, moves } => {
            let moves = moves.iter().map(|m| parse_move(m)).collect::<Result<Vec<_>>>()?;
            let client = Client::new(&url).map_err(|e| CliError::Usage(e.to_string()))?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
            rt.block_on(async {
                let created = client.create_session(audience).await.map_err(|e| CliError::Internal(e.to_string()))?;
                let id = created.session.id;
                outln!("{}\t{}\t{}", created.event.event.focus_id, created.event.cue_url, created.event.event.caption);
                for mv in moves {
                    let r = client.navigate(&id, mv).await.map_err(|e| CliError::Internal(e.to_string()))?;
                    outln!("{}\t{}\t{}", r.event.focus_id, r.cue_url, r.event.caption);
                }
                Ok::<_, CliError>(())
            })?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sonoform: {e}");
            ExitCode::from(e.code())
        }
    }
}
