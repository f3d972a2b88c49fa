//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 property refuted, 2 usage or input error, 3 inconclusive.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::automodels::{builtin_env, AttackScenario, CompositionMode, ThreatActor, SCENARIOS};
use crate::emit::{emit_capl, emit_xml, SuiteMeta};
use crate::kernel::{build_lts, Environment, Limits, Lts, Process, Term};
use crate::lang;
use crate::refinement::{check_refinement, deadlock_free, default_sigma, Model, Verdict};
use crate::semantics::{traces_up_to, Trace};
use crate::testgen::{scenario_lts, tests_from_lts, TestgenError, DEFAULT_DEPTH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const MAX_STATES_VAR: &str = "CSPAUTO_MAX_STATES";

#[derive(Debug, Parser)]
#[command(name = "cspauto", version, about = "CSP refinement checking and attack test generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that IMPL refines SPEC
    Check {
        #[arg(long, value_enum, default_value_t = ModelArg::Failures)]
        model: ModelArg,
        /// FILE.cspa:Name or builtin:Name
        spec: String,
        /// FILE.cspa:Name or builtin:Name
        implementation: String,
    },
    /// List the traces of a process up to a length bound
    Traces {
        target: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Search for a reachable deadlock
    Deadlock { target: String },
    /// Generate test cases from an attack scenario
    Testgen {
        #[arg(long, default_value = "attack1")]
        scenario: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Literal)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long)]
        actor: Option<ThreatActor>,
        #[arg(long, value_enum, default_value_t = FormatArg::Xml)]
        format: FormatArg,
        /// Keep only traces that no other generated trace extends
        #[arg(long)]
        maximal_only: bool,
        /// Output file; standard output if absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a script in canonical form
    Fmt { file: PathBuf },
    /// Show the shipped models and scenarios
    Builtin {
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Traces,
    Failures,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Literal,
    Shared,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Xml,
    Capl,
}

/// A failed invocation: message for the error stream plus exit code.
struct Failure(i32, String);

type CliResult = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    limits: Limits,
}

impl Ctx<'_> {
    fn say(&mut self, line: impl AsRef<str>) -> Result<(), Failure> {
        writeln!(self.out, "{}", line.as_ref()).map_err(|e| Failure(EXIT_USAGE, format!("cannot write output: {e}")))
    }

    fn warn(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "warning: {}", line.as_ref());
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    let limits = match std::env::var(MAX_STATES_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Limits {
                max_states: n,
                ..Limits::default()
            },
            _ => {
                let _ = writeln!(err, "error: {MAX_STATES_VAR} must be a positive integer, got `{v}`");
                return EXIT_USAGE;
            }
        },
        Err(_) => Limits::default(),
    };
    let mut ctx = Ctx { out, err, limits };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            code
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> CliResult {
    match command {
        Command::Check {
            model,
            spec,
            implementation,
        } => check(ctx, model, &spec, &implementation),
        Command::Traces { target, depth } => traces(ctx, &target, depth),
        Command::Deadlock { target } => deadlock(ctx, &target),
        Command::Testgen {
            scenario,
            mode,
            depth,
            actor,
            format,
            maximal_only,
            out,
        } => testgen(ctx, &scenario, mode, depth, actor, format, maximal_only, out.as_deref()),
        Command::Fmt { file } => fmt(ctx, &file),
        Command::Builtin { list } => builtin(ctx, list),
    }
}

fn read_script(path: &Path) -> Result<Environment, Failure> {
    let bytes = std::fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    lang::parse_bytes(&bytes).map_err(|diags| {
        let lines: Vec<String> = diags.0.iter().map(|d| format!("{}:{d}", path.display())).collect();
        usage(lines.join("\nerror: "))
    })
}

/// Resolves `FILE.cspa:Name` or `builtin:Name` to an environment and root.
fn load_target(target: &str) -> Result<(Environment, Term), Failure> {
    let (source, name) = target
        .rsplit_once(':')
        .filter(|(s, n)| !s.is_empty() && !n.is_empty())
        .ok_or_else(|| usage(format!("`{target}` is not of the form FILE.cspa:Name or builtin:Name")))?;
    let env = if source == "builtin" {
        builtin_env()
    } else {
        read_script(Path::new(source))?
    };
    let root = match name {
        "STOP" => Process::stop(),
        "SKIP" => Process::skip(),
        _ if env.definition(name).is_some() => Process::reference(name),
        _ => return Err(usage(format!("no process `{name}` in {source}"))),
    };
    Ok((env, root))
}

fn explore(target: &str, limits: Limits) -> Result<Lts, Failure> {
    let (env, root) = load_target(target)?;
    build_lts(&root, &env, limits).map_err(|e| usage(format!("{target}: {e}")))
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Holds => EXIT_OK,
        Verdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_FAILS,
    }
}

fn check(ctx: &mut Ctx<'_>, model: ModelArg, spec: &str, implementation: &str) -> CliResult {
    let s = explore(spec, ctx.limits)?;
    let i = explore(implementation, ctx.limits)?;
    let model = match model {
        ModelArg::Traces => Model::Traces,
        ModelArg::Failures => Model::Failures,
    };
    let verdict = check_refinement(&s, &i, model, &default_sigma(&s, &i));
    ctx.say(verdict.to_string())?;
    Ok(verdict_code(&verdict))
}

fn traces(ctx: &mut Ctx<'_>, target: &str, depth: usize) -> CliResult {
    let lts = explore(target, ctx.limits)?;
    let set = traces_up_to(&lts, depth);
    for t in &set.traces {
        ctx.say(t.to_string())?;
    }
    if set.truncated {
        ctx.warn("state space truncated; the listing is a lower bound");
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(EXIT_OK)
}

fn deadlock(ctx: &mut Ctx<'_>, target: &str) -> CliResult {
    let lts = explore(target, ctx.limits)?;
    let verdict = deadlock_free(&lts);
    match &verdict {
        Verdict::Holds => ctx.say("deadlock free")?,
        other => ctx.say(other.to_string())?,
    }
    Ok(verdict_code(&verdict))
}

#[allow(clippy::too_many_arguments)]
fn testgen(
    ctx: &mut Ctx<'_>,
    scenario: &str,
    mode: ModeArg,
    depth: usize,
    actor: Option<ThreatActor>,
    format: FormatArg,
    maximal_only: bool,
    out: Option<&Path>,
) -> CliResult {
    let mode = match mode {
        ModeArg::Literal => CompositionMode::Literal,
        ModeArg::Shared => CompositionMode::SharedOnly,
    };
    let mut s = AttackScenario::builtin(scenario, mode).map_err(|e| usage(e.to_string()))?;
    if let Some(actor) = actor {
        s = s.with_actor(actor);
    }
    let lts = scenario_lts(&s, ctx.limits).map_err(|e| match e {
        TestgenError::Truncated { .. } => Failure(EXIT_INCONCLUSIVE, e.to_string()),
        other => usage(other.to_string()),
    })?;
    if deadlock_free(&lts) == (Verdict::Deadlocks { witness: Trace::empty() }) {
        ctx.warn("composition deadlocks at the empty trace");
    }
    let suite = tests_from_lts(&s, &lts, depth, maximal_only);
    let meta = SuiteMeta {
        scenario: s.name.clone(),
        actor: s.actor,
    };
    let text = match format {
        FormatArg::Xml => emit_xml(&suite, &meta),
        FormatArg::Capl => emit_capl(&suite, &meta),
    };
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => write!(ctx.out, "{text}").map_err(|e| usage(format!("cannot write output: {e}")))?,
    }
    Ok(EXIT_OK)
}

fn fmt(ctx: &mut Ctx<'_>, file: &Path) -> CliResult {
    let env = read_script(file)?;
    write!(ctx.out, "{}", lang::print(&env)).map_err(|e| usage(format!("cannot write output: {e}")))?;
    Ok(EXIT_OK)
}

fn builtin(ctx: &mut Ctx<'_>, list: bool) -> CliResult {
    if !list {
        return Err(usage("nothing to do; pass --list"));
    }
    let env = builtin_env();
    for name in env.definitions.keys() {
        ctx.say(format!("model builtin:{name}"))?;
    }
    for name in SCENARIOS {
        ctx.say(format!("scenario {name}"))?;
    }
    Ok(EXIT_OK)
}
