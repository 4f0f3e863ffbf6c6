use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ontosymm::io::{self, ModelFile};
use ontosymm::numerics::{Mode, Tolerance};
use ontosymm::ontological::{
    reproduces, search_time_reverse_bijection, validate_model, Bijection, OntModel, SearchOptions,
    DEFAULT_CAP,
};
use ontosymm::operational::{self, check_no_signalling, validate, Experiment};
use ontosymm::quantum::{build_bb_model, build_classical_control, build_maudlin};
use ontosymm::theorems::{
    certify_time_symmetry_violation, check_preparation_noncontextuality, chsh_certificate,
    verify_measurement_independence, Certificate, Status,
};
use ontosymm::Error;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "onto-symm",
    version,
    about = "Time-symmetry checks for prepare-and-measure models"
)]
struct Cli {
    /// Scalar arithmetic: exact Q(√3) or f64.
    #[arg(long, global = true, default_value = "exact")]
    mode: ModeArg,
    /// Comparison tolerance in float mode.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest ontic space searched exhaustively.
    #[arg(long, global = true, env = "ONTOSYMM_CAP", default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a model file from a builder.
    Build {
        #[command(subcommand)]
        builder: Builder,
        /// Write to this file instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Validate a model file: normalization, no-signalling and, for an
    /// ontological model, reproduction of the table.
    Check { file: PathBuf },
    /// Produce a certificate.
    Certify {
        file: PathBuf,
        #[arg(long)]
        kind: Kind,
        /// CHSH settings `x0,x1,y0,y1`.
        #[arg(long)]
        settings: Option<String>,
        /// Partner model for the independence chain (default: the model itself).
        #[arg(long)]
        partner: Option<PathBuf>,
        /// Ontic bijection as comma-separated target indices
        /// (default: the first one found by search).
        #[arg(long)]
        bijection: Option<String>,
        /// Also write the certificate JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for time reverses of a model file, or check it against a partner.
    ReverseSearch {
        file: PathBuf,
        #[arg(long)]
        partner: Option<PathBuf>,
        /// Search all label identifications instead of positional matching.
        #[arg(long)]
        labels: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Builder {
    /// Two preparation and two measurement directions at 30° from z.
    Maudlin,
    /// Beltrametti-Bugajski model over the directions in a file.
    Bb {
        #[arg(long)]
        directions: PathBuf,
    },
    /// Perfect classical channel on k symbols.
    Classical {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    TimeSymmetry,
    #[value(alias = "lemma")]
    Independence,
    Noncontextuality,
    Chsh,
}

struct Config {
    mode: Mode,
    tol: Tolerance,
    cap: usize,
    format: Format,
}

impl Config {
    fn search(&self) -> SearchOptions {
        SearchOptions {
            tolerance: self.tol,
            cap: self.cap,
        }
    }
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let code = match e.downcast_ref::<Error>() {
            Some(
                Error::SpaceTooLarge { .. }
                | Error::NotSelfReverse(_)
                | Error::PreconditionFailed(_)
                | Error::SignallingPreparation(_)
                | Error::NonBinaryOutcomes(_)
                | Error::NotOperationalReverses(_),
            ) => EXIT_PRECONDITION,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: format!("{e:#}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let tol = Tolerance::new(cli.tol).map_err(|e| anyhow!(e).context("--tol"))?;
    if cli.cap == 0 {
        return Err(anyhow!("--cap must be at least 1").into());
    }
    let cfg = Config {
        mode: match cli.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        },
        tol,
        cap: cli.cap,
        format: cli.format,
    };
    match cli.command {
        Command::Build { builder, out } => cmd_build(&cfg, builder, out.as_deref()),
        Command::Check { file } => cmd_check(&cfg, &file),
        Command::Certify {
            file,
            kind,
            settings,
            partner,
            bijection,
            out,
        } => cmd_certify(
            &cfg,
            &file,
            kind,
            settings.as_deref(),
            partner.as_deref(),
            bijection.as_deref(),
            out.as_deref(),
        ),
        Command::ReverseSearch {
            file,
            partner,
            labels,
        } => cmd_reverse_search(&cfg, &file, partner.as_deref(), labels),
    }
}

fn load(cfg: &Config, path: &Path) -> anyhow::Result<ModelFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_model_file(&text, cfg.mode, cfg.tol)
        .map_err(anyhow::Error::new)
        .with_context(|| path.display().to_string())
}

fn require_model(file: ModelFile, path: &Path) -> anyhow::Result<OntModel> {
    file.model
        .ok_or_else(|| anyhow!("{}: no `ont_model` in file", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_build(cfg: &Config, builder: Builder, out: Option<&Path>) -> Result<u8, Failure> {
    let (e, m) = match builder {
        Builder::Maudlin => {
            let (e, m) = build_maudlin();
            if cfg.mode == Mode::Float {
                (e.to_float(), m.to_float())
            } else {
                (e, m)
            }
        }
        Builder::Bb { directions } => {
            let text = fs::read_to_string(&directions)
                .with_context(|| format!("reading {}", directions.display()))?;
            let (prep, meas) =
                io::parse_directions(&text, cfg.mode, cfg.tol).map_err(anyhow::Error::new)?;
            let m = build_bb_model(&prep, &meas, cfg.mode).map_err(anyhow::Error::new)?;
            (m.experiment().clone(), m)
        }
        Builder::Classical { k } => {
            let (e, m) = build_classical_control(k).map_err(anyhow::Error::new)?;
            if cfg.mode == Mode::Float {
                (e.to_float(), m.to_float())
            } else {
                (e, m)
            }
        }
    };
    write_or_print(out, &io::emit_model_file(&e, Some(&m)))?;
    Ok(EXIT_OK)
}

struct CheckLine {
    name: &'static str,
    passed: bool,
    detail: Option<String>,
}

fn cmd_check(cfg: &Config, path: &Path) -> Result<u8, Failure> {
    let file = load(cfg, path)?;
    let e = &file.experiment;
    let mut lines = Vec::new();
    let report = validate(e, cfg.tol);
    lines.push(CheckLine {
        name: "validate",
        passed: report.is_ok(),
        detail: (!report.is_ok()).then(|| report.to_string()),
    });
    let ns = check_no_signalling(e, cfg.tol);
    lines.push(CheckLine {
        name: "no_signalling_to_future",
        passed: ns.to_future,
        detail: ns.future_witness.as_ref().map(|w| w.to_string()),
    });
    lines.push(CheckLine {
        name: "no_signalling_to_past",
        passed: ns.to_past,
        detail: ns.past_witness.as_ref().map(|w| w.to_string()),
    });
    if let Some(m) = &file.model {
        let mr = validate_model(m, cfg.tol);
        lines.push(CheckLine {
            name: "model_valid",
            passed: mr.is_ok(),
            detail: (!mr.is_ok()).then(|| mr.problems.join("; ")),
        });
        let r = reproduces(m, cfg.tol);
        lines.push(CheckLine {
            name: "reproduces",
            passed: r.holds(),
            detail: r.mismatch().map(|mm| mm.to_string()),
        });
    }
    let all = lines.iter().all(|l| l.passed);
    match cfg.format {
        Format::Text => {
            for l in &lines {
                let status = if l.passed { "pass" } else { "FAIL" };
                match &l.detail {
                    Some(d) => println!("{}: {status} ({d})", l.name),
                    None => println!("{}: {status}", l.name),
                }
            }
        }
        Format::Json => {
            let checks: Vec<Value> = lines
                .iter()
                .map(|l| {
                    let mut v =
                        json!({"name": l.name, "status": if l.passed { "pass" } else { "fail" }});
                    if let Some(d) = &l.detail {
                        v["witness"] = json!(d);
                    }
                    v
                })
                .collect();
            print!(
                "{}",
                io::to_canonical_string(
                    &json!({"input": e.name(), "checks": checks, "passed": all})
                )
            );
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn print_certificate(cfg: &Config, cert: &Certificate) {
    match cfg.format {
        Format::Json => print!("{}", io::emit_certificate(cert)),
        Format::Text => {
            println!("kind: {}", cert.kind);
            println!("inputs: {}", cert.inputs.join(", "));
            for s in &cert.steps {
                let status = match s.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Info => "info",
                };
                match &s.witness {
                    Some(w) => println!("{}: {status}\n  witness: {w}", s.name),
                    None => println!("{}: {status}", s.name),
                }
            }
            for (k, v) in &cert.scalars {
                println!("{k} = {v}");
            }
        }
    }
}

fn parse_indices(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad index `{t}` in --bijection"))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_certify(
    cfg: &Config,
    path: &Path,
    kind: Kind,
    settings: Option<&str>,
    partner: Option<&Path>,
    bijection: Option<&str>,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let file = load(cfg, path)?;
    let cert = match kind {
        Kind::Chsh => {
            let settings =
                settings.ok_or_else(|| anyhow!("--kind chsh needs --settings x0,x1,y0,y1"))?;
            let parts: Vec<&str> = settings.split(',').map(str::trim).collect();
            let [x0, x1, y0, y1] = parts[..] else {
                return Err(anyhow!("--settings takes four comma-separated labels").into());
            };
            chsh_certificate(&file.experiment, [x0, x1, y0, y1], cfg.tol)
                .map_err(anyhow::Error::new)?
        }
        Kind::TimeSymmetry => {
            let m = require_model(file, path)?;
            certify_time_symmetry_violation(&m, cfg.search()).map_err(anyhow::Error::new)?
        }
        Kind::Noncontextuality => {
            let m = require_model(file, path)?;
            check_preparation_noncontextuality(&m, cfg.tol).map_err(anyhow::Error::new)?
        }
        Kind::Independence => {
            let m1 = require_model(file, path)?;
            let m2 = match partner {
                Some(p) => require_model(load(cfg, p)?, p)?,
                None => m1.clone(),
            };
            let f = match bijection {
                Some(text) => Bijection::new(
                    m1.lambda().clone(),
                    m2.lambda().clone(),
                    parse_indices(text)?,
                )
                .map_err(anyhow::Error::new)?,
                None => {
                    let search =
                        search_time_reverse_bijection(&m1, &m2, cfg.search()).map_err(|e| {
                            anyhow::Error::new(Error::PreconditionFailed(e.to_string()))
                        })?;
                    search.found.into_iter().next().ok_or_else(|| {
                        anyhow::Error::new(Error::PreconditionFailed(format!(
                            "no ontological time reverse among {} bijections",
                            search.total
                        )))
                    })?
                }
            };
            verify_measurement_independence(&m1, &m2, &f, cfg.tol).map_err(anyhow::Error::new)?
        }
    };
    if let Some(p) = out {
        fs::write(p, io::emit_certificate(&cert))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    print_certificate(cfg, &cert);
    Ok(EXIT_OK)
}

fn cmd_reverse_search(
    cfg: &Config,
    path: &Path,
    partner: Option<&Path>,
    labels: bool,
) -> Result<u8, Failure> {
    let file = load(cfg, path)?;
    let other = match partner {
        Some(p) => load(cfg, p)?,
        None => file.clone(),
    };
    let (e1, e2) = (&file.experiment, &other.experiment);
    let mut report = json!({"input": e1.name(), "partner": e2.name()});
    let operational_ok = if labels {
        let found = operational::search_time_reverse_labellings(e1, e2, cfg.tol, usize::MAX)
            .map_err(anyhow::Error::new)?;
        report["label_identifications"] = json!(found.len());
        if let Some(w) = found.first() {
            report["first_identification"] = identification_json(w);
        }
        !found.is_empty()
    } else {
        match operational::check_time_reverse_pair(e1, e2, cfg.tol) {
            Ok(w) => {
                report["identification"] = identification_json(&w);
                true
            }
            Err(f) => {
                report["mismatch"] = json!(f.to_string());
                false
            }
        }
    };
    report["operational_reverse"] = json!(operational_ok);

    if let (true, Some(m1), Some(m2)) = (operational_ok && !labels, &file.model, &other.model) {
        let search =
            search_time_reverse_bijection(m1, m2, cfg.search()).map_err(anyhow::Error::new)?;
        report["bijections"] = json!({
            "total": search.total.to_string(),
            "pruned": search.pruned.to_string(),
            "checked": search.checked.to_string(),
            "found": search.found.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        });
    }

    match cfg.format {
        Format::Json => print!("{}", io::to_canonical_string(&report)),
        Format::Text => print_reverse_report(e1, e2, &report),
    }
    Ok(if operational_ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn identification_json(w: &operational::TimeReverseWitness) -> Value {
    let pairs = |v: &Vec<(String, String)>| {
        v.iter()
            .map(|(l, r)| format!("{l}={r}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    json!({
        "a'=b": pairs(&w.a_prime_is_b),
        "b'=a": pairs(&w.b_prime_is_a),
        "x'=y": pairs(&w.x_prime_is_y),
        "y'=x": pairs(&w.y_prime_is_x),
    })
}

fn print_reverse_report(e1: &Experiment, e2: &Experiment, report: &Value) {
    let verdict = if report["operational_reverse"] == json!(true) {
        "is"
    } else {
        "is not"
    };
    println!(
        "{} {verdict} an operational time reverse of {}",
        e2.name(),
        e1.name()
    );
    if let Some(m) = report.get("mismatch").and_then(Value::as_str) {
        println!("  {m}");
    }
    if let Some(n) = report.get("label_identifications") {
        println!("label identifications: {n}");
    }
    if let Some(b) = report.get("bijections") {
        println!(
            "bijections: {} total, {} pruned, {} checked",
            b["total"].as_str().unwrap_or("?"),
            b["pruned"].as_str().unwrap_or("?"),
            b["checked"].as_str().unwrap_or("?")
        );
        let found: Vec<&str> = b["found"]
            .as_array()
            .map(|v| v.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        if found.is_empty() {
            println!("no ontological time reverse");
        } else {
            for f in found {
                println!("ontological time reverse: {f}");
            }
        }
    }
}
