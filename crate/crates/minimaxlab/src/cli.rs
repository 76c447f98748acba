//! Command-line front end. [`run`] returns the process exit code:
//! 0 on success, 1 when a non-vacuous theorem check fails or a certificate
//! does not verify, 2 on invalid flags or input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use minimaxlab_core::alternative::AlternativeOutcome;
use minimaxlab_core::construct::{
    GenParams, Guarantee, InstanceKind, XiVector, gen_instance_indexed, inf_convolution, lipschitz_transfer_check,
    sup_convolution,
};
use minimaxlab_core::mazur::{WindowPolicy, mazur_extract, mazur_schedule, pointwise_decay_report};
use minimaxlab_core::report::{ConvexityReport, TheoremCheck, TheoremId};
use minimaxlab_core::{BiMatrix, Tolerance};

use crate::io::{self, Body, Instance, InstanceDoc};
use crate::pool;
use crate::report::{
    AlternativeReport, AnalysisOptions, AnalysisReport, Document, GameReport, MazurReport, TOOL, VERSION, Verification,
    alternative_for, analyze, game_report, mazur_verified, verify_document,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "minimaxlab",
    version,
    about = "Minimax analysis of finite two-player instances"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Emit single-line JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Feasibility tolerance.
    #[arg(long = "tol-feas", global = true, value_name = "EPS")]
    pub tol_feas: Option<f64>,
    /// Optimality tolerance.
    #[arg(long = "tol-opt", global = true, value_name = "EPS")]
    pub tol_opt: Option<f64>,
    /// Certificate tolerance.
    #[arg(long = "tol-cert", global = true, value_name = "EPS")]
    pub tol_cert: Option<f64>,
    /// Write output to this file (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Values, convexity classification and theorem checks for an instance.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Mixing parameters for t-convexlike checks.
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        t: Vec<f64>,
        /// Mixing parameters for s-concavelike checks.
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        s: Vec<f64>,
        /// Restrict theorem checks (km1, km2, app2, cor_equic, lem2, corollary0, infsup).
        #[arg(long, value_delimiter = ',')]
        theorems: Vec<String>,
    },
    /// Decide the A1/A2 alternative for a function family.
    Alternative {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build an inf- or sup-convolution manifest from a bimatrix.
    Construct {
        #[arg(long)]
        input: PathBuf,
        /// Scalar weights (ξ for rows, η for columns).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_enum, default_value_t = ConvOp::Inf)]
        op: ConvOp,
    },
    /// Generate seeded instances.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_kind)]
        kind: InstanceKind,
        /// Rows x columns, e.g. 6x5.
        #[arg(long, value_parser = parse_shape)]
        shape: (usize, usize),
        /// Number of instances; more than one emits JSON lines.
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
    /// Minimal-norm convex combination of a sampled sequence over a window.
    Mazur {
        #[arg(long)]
        input: PathBuf,
        /// First index of the window (1-based).
        #[arg(long, default_value_t = 1)]
        tail: usize,
        /// Last index of the window (defaults to N).
        #[arg(long)]
        window: Option<usize>,
        /// Strictly decreasing norm targets for a schedule.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Policy::FixedEnd)]
        policy: Policy,
        /// Include tail sup magnitudes per point.
        #[arg(long)]
        decay: bool,
        /// Starts for the decay report (defaults to all).
        #[arg(long, value_delimiter = ',')]
        starts: Vec<usize>,
    },
    /// Solve the zero-sum game on a bimatrix.
    Game {
        #[arg(long)]
        input: PathBuf,
    },
    /// Re-verify the certificates in a previously emitted JSON document.
    Verify {
        /// The instance the document was produced from.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvOp {
    Inf,
    Sup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    FixedEnd,
    Growing,
}

fn parse_kind(s: &str) -> Result<InstanceKind, String> {
    InstanceKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = InstanceKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(['x', 'X']).ok_or("expected ROWSxCOLS")?;
    let dim = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((dim(m)?, dim(n)?))
}

/// Failure carrying its exit code and a diagnostic.
#[derive(Debug)]
struct Failure(i32, String);

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INVALID, e.to_string())
}

struct Output {
    text: String,
    code: i32,
}

impl Common {
    fn tolerance(&self) -> Result<Tolerance, Failure> {
        let d = Tolerance::default();
        Tolerance::new(
            self.tol_feas.unwrap_or(d.eps_feas),
            self.tol_opt.unwrap_or(d.eps_opt),
            self.tol_cert.unwrap_or(d.eps_cert),
        )
        .map_err(|e| invalid(format!("tolerance flags: {e}")))
    }
}

/// Parse `args` (including the program name) and execute.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_INVALID;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.common.output {
                Some(path) => {
                    io::write_atomic(path, out.text.as_bytes()).map_err(|e| format!("{}: {e}", path.display()))
                }
                None => stdout.write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_INVALID
                }
            }
        }
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn load(path: &Path, tol: &Tolerance) -> Result<Instance, Failure> {
    io::read_instance(path, tol).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let tol = cli.common.tolerance()?;
    let json = cli.common.json;
    match &cli.command {
        Command::Analyze { input, t, s, theorems } => {
            let inst = load(input, &tol)?;
            let theorems = if theorems.is_empty() {
                None
            } else {
                Some(
                    theorems
                        .iter()
                        .map(|n| {
                            serde_json::from_value::<TheoremId>(serde_json::Value::String(n.clone()))
                                .map_err(|_| invalid(format!("--theorems: unknown theorem `{n}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                )
            };
            let opts = AnalysisOptions {
                ts: t.clone(),
                ss: s.clone(),
                theorems,
            };
            let report = analyze(&inst, &opts, &tol).map_err(invalid)?;
            let code = if report.exit_ok() { EXIT_OK } else { EXIT_FAILED };
            let text = if json {
                line(&Document::Analysis(report))
            } else {
                analysis_table(&report)
            };
            Ok(Output { text, code })
        }
        Command::Alternative { input } => {
            let inst = load(input, &tol)?;
            let Body::Family(fam) = &inst.body else {
                return Err(invalid(format!(
                    "{}: expected a family instance, found {}",
                    input.display(),
                    inst.doc.kind()
                )));
            };
            let result = alternative_for(fam, &tol).map_err(invalid)?;
            let code = if result.verified { EXIT_OK } else { EXIT_FAILED };
            let report = AlternativeReport {
                tool: TOOL.into(),
                version: VERSION.into(),
                tolerance: tol,
                instance: inst.digest(),
                result,
            };
            let text = if json {
                line(&Document::Alternative(report))
            } else {
                alternative_table(&report)
            };
            Ok(Output { text, code })
        }
        Command::Construct { input, xi, k, op } => {
            let inst = load(input, &tol)?;
            let g = matrix_input(&inst, input)?;
            let weights = XiVector::new(xi.clone()).map_err(|e| invalid(format!("--xi: {e}")))?;
            let doc = construct_doc(&g, weights, *k, *op, &tol)?;
            Ok(Output {
                text: format!("{}\n", doc.to_json()),
                code: EXIT_OK,
            })
        }
        Command::Gen {
            seed,
            kind,
            shape,
            count,
            k,
        } => {
            if *count == 0 {
                return Err(invalid("--count must be positive"));
            }
            let params = GenParams {
                k: *k,
                ..GenParams::default()
            };
            let n = usize::try_from(*count).map_err(invalid)?;
            let docs = pool::map_ordered(n, pool::worker_count(), |i| {
                gen_instance_indexed(*seed, i as u64, *shape, *kind, &params).map(|g| io::generated_doc(&g).to_json())
            });
            let mut text = String::new();
            for d in docs {
                let _ = writeln!(text, "{}", d.map_err(|e| invalid(format!("gen: {e}")))?);
            }
            Ok(Output { text, code: EXIT_OK })
        }
        Command::Mazur {
            input,
            tail,
            window,
            targets,
            policy,
            decay,
            starts,
        } => {
            let inst = load(input, &tol)?;
            let Body::Sequence(seq) = &inst.body else {
                return Err(invalid(format!(
                    "{}: expected a sequence instance, found {}",
                    input.display(),
                    inst.doc.kind()
                )));
            };
            let end = window.unwrap_or(seq.funcs());
            let result = mazur_extract(seq, *tail, end, &tol).map_err(|e| invalid(format!("--tail/--window: {e}")))?;
            let policy = match policy {
                Policy::FixedEnd => WindowPolicy::FixedEnd,
                Policy::Growing => WindowPolicy::Growing,
            };
            let schedule = if targets.is_empty() {
                None
            } else {
                Some(mazur_schedule(seq, targets, policy, &tol).map_err(|e| invalid(format!("--targets: {e}")))?)
            };
            let decay = if *decay {
                Some(pointwise_decay_report(seq, starts).map_err(|e| invalid(format!("--starts: {e}")))?)
            } else {
                None
            };
            let mut report = MazurReport {
                tool: TOOL.into(),
                version: VERSION.into(),
                tolerance: tol,
                instance: inst.digest(),
                result,
                schedule,
                decay,
                verified: false,
            };
            report.verified = mazur_verified(&report.results().collect::<Vec<_>>(), seq, &tol);
            let code = if report.verified { EXIT_OK } else { EXIT_FAILED };
            let text = if json {
                line(&Document::Mazur(report))
            } else {
                mazur_table(&report)
            };
            Ok(Output { text, code })
        }
        Command::Game { input } => {
            let inst = load(input, &tol)?;
            let f = matrix_input(&inst, input)?;
            let report = game_report(&inst, &f, &tol).map_err(invalid)?;
            let code = if report.verified { EXIT_OK } else { EXIT_FAILED };
            let text = if json {
                line(&Document::Game(report))
            } else {
                game_table(&report)
            };
            Ok(Output { text, code })
        }
        Command::Verify { input, certificate } => {
            let inst = load(input, &tol)?;
            let text = io::read_text(certificate).map_err(invalid)?;
            let doc: Document =
                serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", certificate.display())))?;
            let v = verify_document(&doc, &inst);
            let code = if v.verified { EXIT_OK } else { EXIT_FAILED };
            let text = if json {
                format!("{}\n", serde_json::to_string(&v).expect("verification serializes"))
            } else {
                verification_table(&v)
            };
            Ok(Output { text, code })
        }
    }
}

fn matrix_input(inst: &Instance, path: &Path) -> Result<BiMatrix, Failure> {
    match &inst.body {
        Body::Matrix(f) => Ok(f.clone()),
        _ => Err(invalid(format!(
            "{}: expected a bimatrix instance, found {}",
            path.display(),
            inst.doc.kind()
        ))),
    }
}

fn construct_doc(g: &BiMatrix, weights: XiVector, k: f64, op: ConvOp, tol: &Tolerance) -> Result<InstanceDoc, Failure> {
    match op {
        ConvOp::Inf => {
            let inst = inf_convolution(g, &weights, k).map_err(|e| invalid(format!("--xi/--k: {e}")))?;
            let mut gs = vec![Guarantee::TConvexlike, Guarantee::InfsupConvex];
            if lipschitz_transfer_check(&inst, tol) {
                gs.push(Guarantee::LipschitzTransfer);
            }
            Ok(io::infconv_doc(&inst, &gs, None))
        }
        ConvOp::Sup => {
            let f = sup_convolution(g, &weights, k).map_err(|e| invalid(format!("--xi/--k: {e}")))?;
            Ok(InstanceDoc::Supconv {
                eta: weights.as_slice().to_vec(),
                k,
                h: g.to_rows(),
                f: f.to_rows(),
                guarantees: [Guarantee::SConcavelike, Guarantee::SupinfConcave]
                    .iter()
                    .map(|g| g.name().to_string())
                    .collect(),
            })
        }
    }
}

fn line(doc: &Document) -> String {
    format!("{}\n", doc.to_json())
}

/// Two-column fixed-width table.
#[derive(Default)]
struct Table(Vec<(String, String)>);

impl Table {
    fn row(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.0.push((key.into(), value.into()));
        self
    }

    fn render(&self) -> String {
        let width = self.0.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn header(t: &mut Table, digest: &io::InstanceDigest, tol: &Tolerance) {
    let shape: Vec<String> = digest.shape.iter().map(ToString::to_string).collect();
    t.row(
        "instance",
        format!("{} {} sha256:{}", digest.kind, shape.join("x"), &digest.sha256[..16]),
    );
    t.row(
        "tolerance",
        format!("feas={:e} opt={:e} cert={:e}", tol.eps_feas, tol.eps_opt, tol.eps_cert),
    );
}

fn convexity_row(c: &ConvexityReport) -> (String, String) {
    let key = match c.t {
        Some(t) => format!("{} t={t}", c.property.name()),
        None => c.property.name().to_string(),
    };
    let mut value = String::from(if c.holds { "holds" } else { "fails" });
    if let Some(w) = &c.witness {
        let _ = write!(value, "  pair=({},{})", w.pair.0, w.pair.1);
    }
    if let (Some(l), Some(r)) = (c.lhs_value, c.rhs_value) {
        let _ = write!(value, "  {l:.9} vs {r:.9}");
    }
    (key, value)
}

fn theorem_row(c: &TheoremCheck) -> (String, String) {
    let id = serde_json::to_value(c.theorem)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    let status = if c.vacuous {
        let missing: Vec<&str> = c
            .hypotheses
            .iter()
            .filter(|h| !h.satisfied)
            .map(|h| h.name.as_str())
            .collect();
        format!("vacuous (missing {})", missing.join(", "))
    } else if c.conclusion_holds {
        "holds".to_string()
    } else {
        "VIOLATED".to_string()
    };
    let key = match c.numbers.get("t") {
        Some(t) => format!("theorem {id} t={t}"),
        None => format!("theorem {id}"),
    };
    (key, status)
}

fn analysis_table(r: &AnalysisReport) -> String {
    let mut t = Table::default();
    header(&mut t, &r.instance, &r.tolerance);
    let v = &r.values;
    t.row("lower (max min)", format!("{:.9}", v.lower))
        .row("upper (min max)", format!("{:.9}", v.upper))
        .row("mixed value", format!("{:.9}", v.mixed))
        .row("gap", format!("{:.9}", v.gap))
        .row("row strategy", list(&v.solution.row_weights))
        .row("column strategy", list(&v.solution.col_weights));
    for c in &r.convexity {
        let (k, v) = convexity_row(c);
        t.row(k, v);
    }
    for c in &r.theorems {
        let (k, v) = theorem_row(c);
        t.row(k, v);
    }
    for g in &r.guarantees {
        t.row(
            format!("guarantee {}", g.name),
            if g.verified { "verified" } else { "FAILED" },
        );
    }
    if let Some(a) = &r.alternative {
        t.row("alternative", outcome_summary(&a.outcome));
    }
    t.row(
        "certificates",
        if r.certificates_verified { "verified" } else { "FAILED" },
    );
    t.render()
}

fn outcome_summary(o: &AlternativeOutcome) -> String {
    match o {
        AlternativeOutcome::A1 {
            combo,
            sup_value,
            margin,
        } => {
            format!("A1 combo={} sup={sup_value:.9} margin={margin:.3e}", list(combo))
        }
        AlternativeOutcome::A2 {
            measure,
            min_pairing,
            margin,
        } => format!(
            "A2 measure={} min_pairing={min_pairing:.9} margin={margin:.3e}",
            list(measure)
        ),
    }
}

fn alternative_table(r: &AlternativeReport) -> String {
    let mut t = Table::default();
    header(&mut t, &r.instance, &r.tolerance);
    t.row("outcome", outcome_summary(&r.result.outcome))
        .row("gray zone", if r.result.gray_zone { "yes" } else { "no" })
        .row("certificate", if r.result.verified { "verified" } else { "FAILED" });
    t.render()
}

fn game_table(r: &GameReport) -> String {
    let mut t = Table::default();
    header(&mut t, &r.instance, &r.tolerance);
    t.row("value", format!("{:.9}", r.solution.value))
        .row("row strategy", list(&r.solution.row_weights))
        .row("column strategy", list(&r.solution.col_weights))
        .row("certificate", if r.verified { "verified" } else { "FAILED" });
    t.render()
}

fn mazur_table(r: &MazurReport) -> String {
    let mut t = Table::default();
    header(&mut t, &r.instance, &r.tolerance);
    let m = &r.result;
    t.row("window", format!("[{}, {}]", m.tail_start, m.window_end))
        .row("norm", format!("{:.6e}", m.norm))
        .row("heaviest member", m.heaviest().to_string())
        .row("support size", m.weights.support().len().to_string());
    for e in r.schedule.iter().flatten() {
        let value = match &e.result {
            Some(res) => format!(
                "{} [{}, {}] norm={:.6e}",
                if e.met { "met" } else { "unmet" },
                res.tail_start,
                res.window_end,
                res.norm
            ),
            None => "unmet (no window left)".to_string(),
        };
        t.row(format!("target {}", e.target), value);
    }
    if let Some(d) = &r.decay {
        for (m, vals) in d.starts.iter().zip(&d.values) {
            let sup = vals.iter().copied().fold(0.0f64, f64::max);
            t.row(format!("tail sup from {m}"), format!("{sup:.6e}"));
        }
    }
    t.row("certificates", if r.verified { "verified" } else { "FAILED" });
    t.render()
}

fn verification_table(v: &Verification) -> String {
    let mut t = Table::default();
    t.row("document", v.document.clone());
    for c in &v.checks {
        t.row(c.name.clone(), if c.ok { "ok" } else { "FAILED" });
    }
    t.row("verified", if v.verified { "yes" } else { "no" });
    t.render()
}
