//! The `causeway` command line.

use std::ffi::OsString;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::approx::{check, compare_power, predictive_power, BlackBoxFunction, CausalFunction, Grade, Limits, Target};
use crate::cause::{actual_causes, CausalSituation, DEFAULT_MAX_CAUSE_SIZE};
use crate::model::{CausalModel, Valuation, Value};
use crate::opm::{audit, base_facts, datalog_closure};
use crate::provenance::{to_causal_situation, Interpretation, ProvenanceGraph};

use super::dot::{graph_to_dot, model_to_dot};
use super::workspace::{FileKind, Workspace};

/// Overrides the default bound on the size of a cause.
pub const MAX_CAUSE_SIZE_VAR: &str = "CAUSEWAY_MAX_CAUSE_SIZE";

#[derive(Parser, Debug)]
#[command(name = "causeway", version, about = "Causal semantics for provenance graphs")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Accepted for compatibility; every analysis is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a model in a context.
    Eval {
        model: PathBuf,
        /// Exogenous values, `u=v,...`; defaults to the file's context.
        #[arg(long)]
        exo: Option<String>,
    },
    /// Evaluate a model after setting endogenous variables.
    Intervene {
        model: PathBuf,
        /// Interventions, `X=v,...`.
        #[arg(long)]
        set: String,
        #[arg(long)]
        exo: Option<String>,
    },
    /// List the actual causes of an effect, with witnesses.
    Cause {
        /// A `.model` file or a `.json` graph.
        file: PathBuf,
        /// The effect, `Y=v`.
        #[arg(long)]
        effect: String,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        exo: Option<String>,
        /// Interpretation for a graph; defaults to the `.interp` beside it.
        #[arg(long)]
        interp: Option<PathBuf>,
    },
    /// Dump the Datalog closure of a graph's edges.
    Infer { graph: PathBuf },
    /// Compare the inferred edges with their causal meaning.
    Audit {
        graph: PathBuf,
        #[arg(long)]
        interp: Option<PathBuf>,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Compute the predictive-power relation of a semantics.
    Power {
        semantics: PathBuf,
        /// A `.model` or `.table` file.
        #[arg(long)]
        target: PathBuf,
        /// Quantify over interventions (needs a model target).
        #[arg(long)]
        causal: bool,
        /// Also list every related pair.
        #[arg(long)]
        pairs: bool,
        /// Compare with the relation of a second semantics.
        #[arg(long)]
        against: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Decide a grade of approximation.
    Check {
        semantics: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum)]
        grade: GradeArg,
        /// Check against the causal function of the target (implied by
        /// `--grade local`).
        #[arg(long)]
        causal: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Check that a graph is bipartite, acyclic, functional and sorted.
    Validate {
        graph: PathBuf,
        #[arg(long)]
        interp: Option<PathBuf>,
    },
    /// Render a graph or a model in Graphviz format.
    ExportDot { file: PathBuf },
}

#[derive(clap::Args, Debug)]
struct LimitArgs {
    /// Largest number of input pairs to enumerate.
    #[arg(long)]
    budget: Option<u128>,
    /// Largest intervention size.
    #[arg(long)]
    tau_cap: Option<usize>,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(b) = self.budget {
            l.pair_budget = b;
        }
        l.tau_cap = self.tau_cap;
        l
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GradeArg {
    Pointwise,
    Local,
    Global,
}

impl From<GradeArg> for Grade {
    fn from(g: GradeArg) -> Grade {
        match g {
            GradeArg::Pointwise => Grade::Pointwise,
            GradeArg::Local => Grade::Local,
            GradeArg::Global => Grade::Global,
        }
    }
}

/// What a run printed and how it ended: 0 success, 1 a property failed,
/// 2 a usage or input error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type Outcome = Result<(bool, String), Failure>;

pub fn run_cli<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            return if code == 0 {
                CliOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                CliOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match run(&cli) {
        Ok((ok, stdout)) => CliOutput {
            code: if ok { 0 } else { 1 },
            stdout,
            stderr: String::new(),
        },
        Err(Failure(msg)) => CliOutput {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Eval { model, exo } => eval(cli.json, model, exo.as_deref(), None),
        Command::Intervene { model, set, exo } => eval(cli.json, model, exo.as_deref(), Some(set)),
        Command::Cause {
            file,
            effect,
            max_size,
            exo,
            interp,
        } => cause(cli.json, file, effect, *max_size, exo.as_deref(), interp.as_deref()),
        Command::Infer { graph } => infer(cli.json, graph),
        Command::Audit { graph, interp, max_size } => run_audit(cli.json, graph, interp.as_deref(), *max_size),
        Command::Power {
            semantics,
            target,
            causal,
            pairs,
            against,
            limits,
        } => power(cli.json, semantics, target, *causal, *pairs, against.as_deref(), &limits.limits()),
        Command::Check {
            semantics,
            target,
            grade,
            causal,
            limits,
        } => run_check(cli.json, semantics, target, (*grade).into(), *causal, &limits.limits()),
        Command::Validate { graph, interp } => validate(cli.json, graph, interp.as_deref()),
        Command::ExportDot { file } => export_dot(file),
    }
}

fn parse_assignments(text: &str) -> Result<Vec<(String, Value)>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Failure(format!("`{part}` is not of the form name=value")))?;
            let v: Value = v.parse()?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn max_cause_size(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(k) = flag {
        return Ok(k);
    }
    match std::env::var(MAX_CAUSE_SIZE_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure(format!("{MAX_CAUSE_SIZE_VAR}=`{s}` is not a size"))),
        Err(_) => Ok(DEFAULT_MAX_CAUSE_SIZE),
    }
}

fn load(path: &Path, expected: &[FileKind]) -> Result<(Workspace, String), Failure> {
    let name = path.to_string_lossy().into_owned();
    match FileKind::of(&name) {
        Some(k) if expected.contains(&k) => {}
        _ => {
            let exts: Vec<&str> = expected
                .iter()
                .map(|k| match k {
                    FileKind::Model => ".model",
                    FileKind::Graph => ".json",
                    FileKind::Interpretation => ".interp",
                    FileKind::Semantics => ".sem",
                    FileKind::Table => ".table",
                })
                .collect();
            return Err(Failure(format!("{name}: expected a {} file", exts.join(" or "))));
        }
    }
    let mut ws = Workspace::new();
    ws.load_path(path)?;
    Ok((ws, name))
}

fn model_and_context(path: &Path, exo: Option<&str>) -> Result<(CausalModel, Valuation), Failure> {
    let (ws, name) = load(path, &[FileKind::Model])?;
    let file = ws.model(&name).expect("loaded").clone();
    let ctx = match exo {
        Some(text) => parse_assignments(text)?.into_iter().collect(),
        None => file
            .context
            .ok_or_else(|| Failure(format!("{name} has no context line; pass --exo")))?,
    };
    Ok((file.model, ctx))
}

fn graph_and_interp(path: &Path, interp: Option<&Path>) -> Result<(ProvenanceGraph, Interpretation), Failure> {
    let (mut ws, name) = load(path, &[FileKind::Graph])?;
    let graph = ws.graph(&name).expect("loaded").clone();
    let interp = match interp {
        Some(p) => {
            let key = ws.load_path(p)?;
            ws.interpretation(&key)
                .ok_or_else(|| Failure(format!("{key} is not an interpretation")))?
                .clone()
        }
        None => {
            let companion = path.with_extension("interp");
            if !companion.exists() {
                return Err(Failure(format!("{name}: no interpretation; pass --interp")));
            }
            let key = ws.load_path(&companion)?;
            ws.interpretation(&key).expect("loaded").clone()
        }
    };
    Ok((graph, interp))
}

fn valuation_text(v: &Valuation) -> String {
    v.iter().map(|(k, x)| format!("{k} = {x}\n")).collect()
}

fn eval(as_json: bool, path: &Path, exo: Option<&str>, set: Option<&String>) -> Outcome {
    let (model, ctx) = model_and_context(path, exo)?;
    let model = match set {
        Some(s) => {
            let sets = parse_assignments(s)?;
            model.intervene_all(sets.iter().map(|(k, v)| (k.as_str(), *v)))?
        }
        None => model,
    };
    let val = model.evaluate(&ctx)?;
    if as_json {
        return Ok((true, format!("{}\n", serde_json::to_string_pretty(&val)?)));
    }
    Ok((true, valuation_text(&val)))
}

fn cause(as_json: bool, path: &Path, effect: &str, max: Option<usize>, exo: Option<&str>, interp: Option<&Path>) -> Outcome {
    let max = max_cause_size(max)?;
    let sit = match FileKind::of(&path.to_string_lossy()) {
        Some(FileKind::Graph) => {
            let (g, i) = graph_and_interp(path, interp)?;
            to_causal_situation(&g, &i, true)?
        }
        _ => {
            let (model, ctx) = model_and_context(path, exo)?;
            CausalSituation::from_context(model, &ctx)?
        }
    };
    let mut parts = parse_assignments(effect)?;
    if parts.len() != 1 {
        return Err(Failure(format!("--effect expects one `Y=v`, got `{effect}`")));
    }
    let (y, v) = parts.remove(0);
    let causes = actual_causes(&sit, (&y, v), max)?;
    if as_json {
        let out = json!({
            "effect": { "variable": y, "value": v },
            "context": sit.context(),
            "max_size": max,
            "causes": causes,
        });
        return Ok((true, format!("{}\n", serde_json::to_string_pretty(&out)?)));
    }
    let mut s = String::new();
    writeln!(s, "context: {}", sit.context()).unwrap();
    writeln!(s, "effect: {y}={v}").unwrap();
    writeln!(s, "actual causes of size at most {max}: {}", causes.len()).unwrap();
    for c in &causes {
        writeln!(s, "  {c}").unwrap();
    }
    Ok((true, s))
}

fn infer(as_json: bool, path: &Path) -> Outcome {
    let (ws, name) = load(path, &[FileKind::Graph])?;
    let g = ws.graph(&name).expect("loaded");
    let closure = datalog_closure(&base_facts(g));
    if as_json {
        let facts: Vec<_> = closure.fact_set().into_iter().collect();
        return Ok((true, format!("{}\n", serde_json::to_string_pretty(&facts)?)));
    }
    Ok((true, closure.dump()))
}

fn run_audit(as_json: bool, path: &Path, interp: Option<&Path>, max: Option<usize>) -> Outcome {
    let max = max_cause_size(max)?;
    let (g, i) = graph_and_interp(path, interp)?;
    let report = audit(&g, &i, max)?;
    let ok = report.is_sound() && report.is_complete();
    if as_json {
        return Ok((ok, format!("{}\n", report.to_json())));
    }
    Ok((ok, report.to_string()))
}

enum LoadedTarget {
    Functional(BlackBoxFunction),
    Causal(CausalFunction),
}

impl LoadedTarget {
    fn target(&self) -> Target<'_> {
        match self {
            LoadedTarget::Functional(f) => Target::Functional(f),
            LoadedTarget::Causal(f) => Target::Causal(f),
        }
    }
}

fn semantics_and_target(
    sem_path: &Path,
    target_path: &Path,
    causal: bool,
) -> Result<(crate::approx::ProvenanceSemantics, LoadedTarget), Failure> {
    let (ws, name) = load(sem_path, &[FileKind::Semantics])?;
    let sem = ws.semantics(&name).expect("loaded").semantics.clone();
    let (tws, tname) = load(target_path, &[FileKind::Model, FileKind::Table])?;
    let target = if let Some(m) = tws.model(&tname) {
        if causal {
            LoadedTarget::Causal(CausalFunction::of_model(&m.model))
        } else {
            LoadedTarget::Functional(BlackBoxFunction::from_model(&m.model, sem.inputs(), sem.result())?)
        }
    } else {
        if causal {
            return Err(Failure(format!("{tname}: a table has no causal structure; use a .model target")));
        }
        LoadedTarget::Functional(tws.table(&tname).expect("loaded").clone())
    };
    Ok((sem, target))
}

fn tuple(u: &[Value]) -> String {
    let parts: Vec<String> = u.iter().map(Value::to_string).collect();
    format!("({})", parts.join(", "))
}

fn power(as_json: bool, sem: &Path, target: &Path, causal: bool, pairs: bool, against: Option<&Path>, limits: &Limits) -> Outcome {
    let (s, t) = semantics_and_target(sem, target, causal)?;
    let rel = predictive_power(&s, t.target(), limits)?;
    let ordering = match against {
        Some(other) => {
            let (s2, t2) = semantics_and_target(other, target, causal)?;
            Some(compare_power(&rel, &predictive_power(&s2, t2.target(), limits)?)?)
        }
        None => None,
    };
    if as_json {
        let mut out = json!({
            "inputs": s.inputs(),
            "mode": if rel.is_causal() { "causal" } else { "functional" },
            "size": rel.size(),
            "related": rel.pair_count(),
            "density": rel.density(),
            "reflexive": rel.is_reflexive(),
            "total": rel.is_total(),
        });
        if let Some(o) = ordering {
            out["ordering"] = json!(o);
        }
        if pairs {
            out["pairs"] = json!(rel.pairs().collect::<Vec<_>>());
        }
        return Ok((true, format!("{}\n", serde_json::to_string_pretty(&out)?)));
    }
    let mut out = rel.summary();
    if let Some(o) = ordering {
        writeln!(out, "ordering: {o}").unwrap();
    }
    if pairs {
        for (a, b) in rel.pairs() {
            writeln!(out, "{} ~> {}", tuple(a), tuple(b)).unwrap();
        }
    }
    Ok((true, out))
}

fn run_check(as_json: bool, sem: &Path, target: &Path, grade: Grade, causal: bool, limits: &Limits) -> Outcome {
    let (s, t) = semantics_and_target(sem, target, causal || grade == Grade::Local)?;
    let verdict = check(&s, t.target(), grade, limits)?;
    if as_json {
        return Ok((verdict.holds, format!("{}\n", serde_json::to_string_pretty(&verdict)?)));
    }
    Ok((verdict.holds, format!("{verdict}\n")))
}

fn validate(as_json: bool, path: &Path, interp: Option<&Path>) -> Outcome {
    let (mut ws, name) = load(path, &[FileKind::Graph])?;
    let g = ws.graph(&name).expect("loaded").clone();
    let interp = match interp {
        Some(p) => {
            let key = ws.load_path(p)?;
            ws.interpretation(&key).cloned()
        }
        None => {
            let companion = path.with_extension("interp");
            if companion.exists() {
                let key = ws.load_path(&companion)?;
                ws.interpretation(&key).cloned()
            } else {
                None
            }
        }
    };
    let report = g.validate(interp.as_ref());
    if as_json {
        let out = json!({
            "bipartite": report.is_bipartite,
            "acyclic": report.is_acyclic,
            "functional": report.is_functional,
            "sorted": report.is_sorted,
            "well_formed": report.well_formed,
            "diagnostics": report.diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>(),
        });
        return Ok((report.is_valid(), format!("{}\n", serde_json::to_string_pretty(&out)?)));
    }
    Ok((report.is_valid(), report.to_string()))
}

fn export_dot(path: &Path) -> Outcome {
    let (ws, name) = load(path, &[FileKind::Graph, FileKind::Model])?;
    if let Some(g) = ws.graph(&name) {
        return Ok((true, graph_to_dot(g)));
    }
    Ok((true, model_to_dot(&ws.model(&name).expect("loaded").model)))
}
