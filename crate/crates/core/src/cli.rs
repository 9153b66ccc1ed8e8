//! Command-line front end.
//!
//! Exit codes: 0 affirmative, 1 negative verdict, 2 usage or input error,
//! 3 enumeration bound exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::answer::{
    boxplus_translate, default_universe, enumerate_answer_streams, is_phi_answer_stream,
    is_t_answer_stream, is_t_model, is_tt_answer_stream, is_tt_model, AnswerMode, Universe,
    DEFAULT_MARKER,
};
use crate::entailment::{entails, entails3, entails_fixed, Context, Limits};
use crate::error::Error;
use crate::lang::{parse_formula, parse_program, validate_heads, HeadIssue, Program};
use crate::levelmap::{extract_level_mapping, verify_level_mapping};
use crate::operators::{partial_model, phi_dagger, tp};
use crate::stream::{Atom, AtomSet, Interval, Stream, StreamFile, ThreeValuedStream, TimePoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "streamfix", version, about = "Fixed-point reasoning over stream logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that every rule head is normal and consistent at --at.
    Validate,
    /// Evaluate a formula on --model (empty stream if omitted).
    Eval {
        formula: String,
        /// Lower bound stream for 3-valued evaluation; --model is the upper bound.
        #[arg(long)]
        lower: Option<PathBuf>,
    },
    /// Check --model against the program; with --mode, also check it is an answer stream.
    ModelCheck,
    /// Apply the van Emden-Kowalski operator to --model.
    Tp,
    /// Compute the least fixed point of the Fitting operator below --model.
    Fixpoint,
    /// Enumerate answer streams over a finite universe.
    AnswerStreams,
    /// Extract and verify a level mapping of --model.
    LevelMap,
    /// Print the program translated for a fixed interval --interval.
    TranslateBoxplus {
        /// Name of the marker atom.
        #[arg(long, default_value = DEFAULT_MARKER)]
        marker: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Flp,
    Fixpoint,
    Beck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args, Serialize)]
struct Opts {
    /// Program file.
    #[arg(long, global = true)]
    program: Option<PathBuf>,
    /// Data stream file (`t: atom ...` lines, optional `gamma: ...`).
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Stream file to check or evaluate.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Evaluation time point.
    #[arg(long, global = true, default_value_t = 1)]
    at: u32,
    /// Background atom; repeatable. Overrides a `gamma:` stanza in --data.
    #[arg(long, global = true)]
    gamma: Vec<String>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Fixed interval `[t1,t2]` for Beck semantics and the boxplus translation.
    #[arg(long, global = true)]
    interval: Option<String>,
    /// Time points of the enumeration universe.
    #[arg(long, global = true)]
    horizon: Option<String>,
    /// Comma-separated atoms of the enumeration universe.
    #[arg(long, global = true, value_delimiter = ',')]
    atoms: Option<Vec<String>>,
    /// Enumeration cap for every exhaustive search.
    #[arg(long, global = true, env = "STREAMFIX_BOUND")]
    bound: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BoundExceeded { .. } => EXIT_BOUND,
            Error::NotTModel(_) | Error::NotInterpretation => EXIT_NEGATIVE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

struct Session<'a> {
    opts: &'a Opts,
    command: &'static str,
    t: TimePoint,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Session<'_> {
    fn json(&self) -> bool {
        self.opts.format == Format::Json
    }

    fn program(&self) -> CliResult<Program> {
        let path = self
            .opts
            .program
            .as_deref()
            .ok_or_else(|| usage("--program is required"))?;
        with_path(path, parse_program(&read(path)?))
    }

    fn stream_file(path: &Path) -> CliResult<StreamFile> {
        with_path(path, StreamFile::parse(&read(path)?))
    }

    fn model(&self) -> CliResult<Stream> {
        let path = self
            .opts
            .model
            .as_deref()
            .ok_or_else(|| usage("--model is required"))?;
        Ok(Self::stream_file(path)?.stream)
    }

    fn gamma_from_flags(&self) -> CliResult<Option<AtomSet>> {
        if self.opts.gamma.is_empty() {
            return Ok(None);
        }
        let set = self
            .opts
            .gamma
            .iter()
            .map(|a| Atom::new(a))
            .collect::<crate::Result<AtomSet>>()?;
        Ok(Some(set))
    }

    fn limits(&self) -> Limits {
        self.opts.bound.map_or_else(Limits::default, Limits::uniform)
    }

    fn context(&mut self) -> CliResult<Context> {
        let file = match self.opts.data.as_deref() {
            Some(path) => Self::stream_file(path)?,
            None => StreamFile::default(),
        };
        let flags = self.gamma_from_flags()?;
        let gamma = match (flags, file.gamma) {
            (Some(flag), Some(stanza)) => {
                if flag != stanza {
                    writeln!(
                        self.err,
                        "warning: --gamma overrides the gamma stanza of the data file"
                    )?;
                }
                flag
            }
            (Some(g), None) | (None, Some(g)) => g,
            (None, None) => AtomSet::new(),
        };
        Ok(Context::new(gamma, file.stream).with_limits(self.limits()))
    }

    fn gamma_only(&mut self) -> CliResult<AtomSet> {
        Ok(self.context()?.gamma)
    }

    fn interval(&self) -> CliResult<Option<Interval>> {
        self.opts
            .interval
            .as_deref()
            .map(|s| s.parse::<Interval>().map_err(Failure::from))
            .transpose()
    }

    fn meta(&mut self) -> CliResult<()> {
        if self.json() {
            let record = json!({
                "record": "meta",
                "engine": "streamfix",
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "config": self.opts,
            });
            self.emit(record)?;
        }
        Ok(())
    }

    fn emit(&mut self, record: Value) -> CliResult<()> {
        writeln!(self.out, "{record}")?;
        Ok(())
    }

    fn text(&mut self, line: impl AsRef<str>) -> CliResult<()> {
        writeln!(self.out, "{}", line.as_ref())?;
        Ok(())
    }
}

fn verdict(yes: bool) -> i32 {
    if yes {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let command = match cli.command {
        Command::Validate => "validate",
        Command::Eval { .. } => "eval",
        Command::ModelCheck => "model-check",
        Command::Tp => "tp",
        Command::Fixpoint => "fixpoint",
        Command::AnswerStreams => "answer-streams",
        Command::LevelMap => "level-map",
        Command::TranslateBoxplus { .. } => "translate-boxplus",
    };
    let t = TimePoint::new(cli.opts.at).map_err(|_| usage("--at must be at least 1"))?;
    let mut s = Session {
        opts: &cli.opts,
        command,
        t,
        out,
        err,
    };
    if s.opts.mode == Some(Mode::Beck) && s.opts.interval.is_none() {
        return Err(usage("--mode beck requires --interval"));
    }
    if let Some(iv) = s.interval()? {
        if !iv.contains(t) {
            return Err(Error::TimeOutsideInterval {
                t: t.get(),
                interval: iv.to_string(),
            }
            .into());
        }
    }
    s.meta()?;
    match &cli.command {
        Command::Validate => validate(&mut s),
        Command::Eval { formula, lower } => eval(&mut s, formula, lower.as_deref()),
        Command::ModelCheck => model_check(&mut s),
        Command::Tp => run_tp(&mut s),
        Command::Fixpoint => fixpoint(&mut s),
        Command::AnswerStreams => answer_streams(&mut s),
        Command::LevelMap => level_map(&mut s),
        Command::TranslateBoxplus { marker } => translate(&mut s, marker),
    }
}

fn validate(s: &mut Session<'_>) -> CliResult<i32> {
    let program = s.program()?;
    let gamma = s.gamma_only()?;
    let reports = validate_heads(&program, s.t, &gamma);
    let violations = reports
        .iter()
        .filter(|r| r.issue == Some(HeadIssue::Inconsistent))
        .count();
    for r in &reports {
        if s.json() {
            s.emit(json!({"record": "head", "report": r}))?;
        } else {
            let status = match r.issue {
                None => "ok".to_string(),
                Some(HeadIssue::TrivialHead) => "ok (trivial head)".to_string(),
                Some(HeadIssue::Inconsistent) => {
                    format!("not {}-consistent", s.t)
                }
            };
            s.text(format!("rule {}: {}: {status}", r.rule, r.head))?;
        }
    }
    if s.json() {
        s.emit(json!({"record": "result", "rules": reports.len(), "violations": violations}))?;
    } else {
        s.text(format!("{} rules, {violations} violations", reports.len()))?;
    }
    Ok(verdict(violations == 0))
}

fn eval(s: &mut Session<'_>, text: &str, lower: Option<&Path>) -> CliResult<i32> {
    let formula = parse_formula(text)?;
    let gamma = s.gamma_only()?;
    let stream = match s.opts.model {
        Some(_) => s.model()?,
        None => Stream::new(),
    };
    let interval = s.interval()?;
    let holds = match (lower, interval) {
        (Some(path), None) => {
            let lo = Session::stream_file(path)?.stream;
            let p = ThreeValuedStream::new(lo, stream.clone())?;
            entails3(&p, s.t, &formula, &gamma, s.limits().three_valued)?
        }
        (Some(_), Some(_)) => return Err(usage("--lower cannot be combined with --interval")),
        (None, Some(iv)) => entails_fixed(&stream, &iv, s.t, &formula, &gamma)?,
        (None, None) => entails(&stream, s.t, &formula, &gamma),
    };
    let range = match interval {
        Some(iv) => iv,
        None => stream.support(),
    };
    let shows_range = formula.reads_support();
    if s.json() {
        let mut record = json!({"record": "result", "formula": formula.to_string(), "holds": holds});
        if shows_range {
            record["support"] = json!(range.to_string());
        }
        s.emit(record)?;
    } else {
        s.text(format!("{formula}: {holds}"))?;
        if shows_range {
            s.text(format!("support: {range}"))?;
        }
    }
    Ok(verdict(holds))
}

fn model_check(s: &mut Session<'_>) -> CliResult<i32> {
    let program = s.program()?;
    let ctx = s.context()?;
    let model = s.model()?;
    let interval = s.interval()?;
    let (model_ok, answer) = match (s.opts.mode, interval) {
        (Some(Mode::Beck), Some(iv)) => (
            is_tt_model(&program, &ctx, &iv, s.t, &model)?,
            Some(is_tt_answer_stream(&program, &ctx, &iv, s.t, &model)?),
        ),
        (Some(Mode::Flp), _) => (
            is_t_model(&program, &ctx, s.t, &model),
            Some(is_t_answer_stream(&program, &ctx, s.t, &model)?),
        ),
        (Some(Mode::Fixpoint), _) => (
            is_t_model(&program, &ctx, s.t, &model),
            Some(is_phi_answer_stream(&program, &ctx, s.t, &model)?),
        ),
        _ => (is_t_model(&program, &ctx, s.t, &model), None),
    };
    if s.json() {
        s.emit(json!({"record": "result", "stream": model, "model": model_ok, "answer": answer}))?;
    } else {
        s.text(format!("stream: {model}"))?;
        s.text(format!("{}-model: {}", s.t, yes_no(model_ok)))?;
        if let (Some(a), Some(mode)) = (answer, s.opts.mode) {
            let name = match mode {
                Mode::Flp => format!("{}-answer stream", s.t),
                Mode::Fixpoint => format!("fixpoint {}-answer stream", s.t),
                Mode::Beck => format!("({},{})-answer stream", s.t, s.opts.interval.as_deref().unwrap_or("")),
            };
            s.text(format!("{name}: {}", yes_no(a)))?;
        }
    }
    Ok(verdict(answer.unwrap_or(model_ok)))
}

fn run_tp(s: &mut Session<'_>) -> CliResult<i32> {
    let program = s.program()?;
    let ctx = s.context()?;
    let model = s.model()?;
    let result = tp(&program, &ctx, s.t, &model)?;
    let fired: Vec<_> = program
        .rules()
        .iter()
        .filter(|r| entails(&model, s.t, &r.body(), &ctx.gamma))
        .map(|r| r.head.clone())
        .collect();
    let m = partial_model(&model, s.t, &crate::lang::Formula::conj(fired), &ctx.gamma)?;
    let fixed = result == model;
    let prefixed = result.is_substream(&model);
    if s.json() {
        s.emit(json!({
            "record": "result",
            "partial": m,
            "tp": result,
            "prefixed_point": prefixed,
            "fixed_point": fixed,
        }))?;
    } else {
        s.text(format!("M: {m}"))?;
        s.text(format!("T: {result}"))?;
        s.text(format!("prefixed point: {}", yes_no(prefixed)))?;
        s.text(format!("fixed point: {}", yes_no(fixed)))?;
    }
    Ok(verdict(prefixed))
}

fn fixpoint(s: &mut Session<'_>) -> CliResult<i32> {
    let program = s.program()?;
    let ctx = s.context()?;
    let model = s.model()?;
    let trace = phi_dagger(&program, &ctx, s.t, &model)?;
    let answer = trace.lfp() == &model;
    if s.json() {
        for (i, stage) in trace.stages.iter().enumerate() {
            s.emit(json!({"record": "stage", "index": i, "stream": stage}))?;
        }
        s.emit(json!({"record": "result", "converged": trace.converged, "lfp": trace.lfp(), "answer": answer}))?;
    } else {
        for (i, stage) in trace.stages.iter().enumerate() {
            s.text(format!("K{i}: {stage}"))?;
        }
        s.text(format!("lfp: {}", trace.lfp()))?;
        s.text(format!("fixpoint {}-answer stream: {}", s.t, yes_no(answer)))?;
    }
    Ok(verdict(answer))
}

fn answer_streams(s: &mut Session<'_>) -> CliResult<i32> {
    let program = s.program()?;
    let ctx = s.context()?;
    let mode = match s.opts.mode.unwrap_or(Mode::Flp) {
        Mode::Flp => AnswerMode::Flp,
        Mode::Fixpoint => AnswerMode::Fixpoint,
        Mode::Beck => AnswerMode::Beck(s.interval()?.expect("checked above")),
    };
    let mut universe = default_universe(&program, &ctx, s.t);
    if let AnswerMode::Beck(iv) = &mode {
        universe.horizon = *iv;
    }
    if let Some(h) = &s.opts.horizon {
        universe = Universe::new(universe.atoms, h.parse()?)?;
    }
    if let Some(names) = &s.opts.atoms {
        let atoms = names
            .iter()
            .map(|n| Atom::new(n.trim()))
            .collect::<crate::Result<AtomSet>>()?;
        universe = Universe::new(atoms, universe.horizon)?;
    }
    let found = enumerate_answer_streams(&program, &ctx, s.t, &universe, &mode)?;
    if s.json() {
        s.emit(json!({"record": "universe", "mode": mode, "universe": universe}))?;
        for stream in &found {
            s.emit(json!({"record": "answer", "stream": stream}))?;
        }
        s.emit(json!({"record": "result", "count": found.len()}))?;
    } else {
        let atoms: Vec<_> = universe.atoms.iter().map(|a| a.as_str()).collect();
        s.text(format!(
            "mode: {mode}, universe: {{{}}} x {}",
            atoms.join(","),
            universe.horizon
        ))?;
        for stream in &found {
            s.text(stream.notation())?;
        }
        s.text(format!("{} answer streams", found.len()))?;
    }
    Ok(verdict(!found.is_empty()))
}

fn level_map(s: &mut Session<'_>) -> CliResult<i32> {
    let program = s.program()?;
    let ctx = s.context()?;
    let model = s.model()?;
    let Some(levels) = extract_level_mapping(&program, &ctx, s.t, &model)? else {
        if s.json() {
            s.emit(json!({"record": "result", "levels": null, "circular": true}))?;
        } else {
            s.text("no total level mapping (circular justification)")?;
        }
        return Ok(EXIT_NEGATIVE);
    };
    let report = verify_level_mapping(&levels, &program, &ctx, s.t)?;
    if s.json() {
        s.emit(json!({"record": "result", "levels": levels, "report": report}))?;
    } else {
        for (i, part) in levels.parts().iter().enumerate() {
            s.text(format!("S{i}: {part}"))?;
        }
        s.text(format!(
            "valid: {}, total: {}",
            yes_no(report.valid),
            yes_no(report.total)
        ))?;
    }
    Ok(verdict(report.valid && report.total))
}

fn translate(s: &mut Session<'_>, marker: &str) -> CliResult<i32> {
    let program = s.program()?;
    let interval = s
        .interval()?
        .ok_or_else(|| usage("translate-boxplus requires --interval"))?;
    let marker = Atom::new(marker)?;
    let translated = boxplus_translate(&program, &interval, s.t, &marker)?;
    if s.json() {
        s.emit(json!({"record": "result", "marker": marker, "program": translated.to_string()}))?;
    } else {
        write!(s.out, "{translated}")?;
    }
    Ok(EXIT_OK)
}
