//! `ratt`: type check, run and inspect programs.
//!
//! Exit status: 0 on success, 1 for type errors and runtime failures,
//! 2 for syntax and usage errors.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ratt::drivers::{has_value_type, parse_value, stream_init, transducer_init, value_to_string, Driver, Gc, StepStats};
use ratt::machine::{Store, DEFAULT_FUEL};
use ratt::surface::pretty::term_to_string;
use ratt::surface::{CompiledDef, Diagnostic, Module};
use ratt::syntax::is_value_type;
use ratt::{Term, Type};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ratt", version, about = "Type checker and interpreter for a modal FRP calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type check every definition in a file.
    Check {
        file: PathBuf,
        /// Print diagnostics as a JSON array on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Run a stream definition `NAME : Box (Str A)`.
    Run {
        file: PathBuf,
        /// Defaults to the last definition in the file.
        name: Option<String>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Run a transducer `NAME : Box (Str A -> Str B)`, one input value per line.
    Transduce {
        file: PathBuf,
        /// Defaults to the last definition in the file.
        name: Option<String>,
        /// Read inputs from this file instead of stdin.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Stop after this many steps.
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Print the core term of each definition.
    Desugar {
        file: PathBuf,
        name: Option<String>,
        /// Print the closed term with all references to other definitions
        /// inlined, as it is executed.
        #[arg(long)]
        closed: bool,
    },
}

#[derive(Args)]
struct ExecArgs {
    /// Rule applications allowed per step.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Run even if the definition does not type check.
    #[arg(long = "unsafe")]
    unsafe_: bool,
    /// Keep every heap binding instead of collecting after each step.
    #[arg(long)]
    nogc: bool,
    /// Write per-step heap statistics to this file as JSON lines.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Log every rule application to stderr.
    #[arg(long)]
    trace: bool,
}

enum Failure {
    /// Exit status 1; the details have been reported already.
    Semantic,
    /// Exit status 2.
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { file, json } => check(&file, json),
        Command::Run { file, name, steps, exec } => run(&file, name.as_deref(), steps, &exec),
        Command::Transduce { file, name, input, steps, exec } => {
            transduce(&file, name.as_deref(), input.as_deref(), steps, &exec)
        }
        Command::Desugar { file, name, closed } => desugar(&file, name.as_deref(), closed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Semantic) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("ratt: {msg}");
            ExitCode::from(2)
        }
    }
}

fn semantic(msg: impl std::fmt::Display) -> Failure {
    eprintln!("ratt: {msg}");
    Failure::Semantic
}

fn io_failure(e: io::Error) -> Failure {
    semantic(format!("i/o error: {e}"))
}

fn read_source(file: &Path) -> Result<String, Failure> {
    fs::read_to_string(file).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))
}

/// Compiles `file`, reporting syntax errors (as JSON if asked).
fn load(file: &Path, json: bool) -> Result<Module, Failure> {
    let src = read_source(file)?;
    ratt::compile(&src).map_err(|e| {
        if json {
            let report = json!([{ "def": null, "kind": "SyntaxError", "span": e.span, "msg": e.msg }]);
            println!("{report}");
        }
        Failure::Usage(format!("{}:{}: syntax error: {}", file.display(), e.span, e.msg))
    })
}

fn report(file: &Path, d: &Diagnostic) {
    eprintln!("{}:{}: {}: {}: {}", file.display(), d.span, d.def, d.kind, d.msg);
}

fn select<'m>(module: &'m Module, name: Option<&str>) -> Result<&'m CompiledDef, Failure> {
    match name {
        Some(n) => module.get(n).ok_or_else(|| Failure::Usage(format!("no definition named `{n}`"))),
        None => module.defs.last().ok_or_else(|| Failure::Usage("the file has no definitions".into())),
    }
}

fn check(file: &Path, json: bool) -> Outcome {
    let module = load(file, json)?;
    let diagnostics = module.diagnostics();
    for d in &diagnostics {
        report(file, d);
    }
    if json {
        println!("{}", serde_json::to_string(&diagnostics).expect("diagnostics serialize"));
    } else {
        for def in module.defs.iter().filter(|d| d.is_ok()) {
            println!("{} : {}", def.name, def.ty);
        }
    }
    if diagnostics.is_empty() {
        Ok(())
    } else {
        Err(Failure::Semantic)
    }
}

/// The term to execute. Without `--unsafe` the definition has to type check.
fn executable(file: &Path, module: &Module, def: &CompiledDef, unsafe_: bool) -> Result<(Term, Type), Failure> {
    if let Some(d) = def.diagnostic() {
        if !unsafe_ || def.term.is_none() {
            report(file, &d);
            return Err(Failure::Semantic);
        }
    }
    Ok(module.runnable(&def.name).expect("a definition with a term is runnable"))
}

fn value_type(ty: Option<&Type>) -> Option<&Type> {
    ty.filter(|t| is_value_type(t))
}

fn show(v: &Term, ty: Option<&Type>) -> String {
    match ty {
        Some(t) if has_value_type(v, t) => value_to_string(v, t),
        _ => term_to_string(v),
    }
}

/// Per-run plumbing shared by `run` and `transduce`.
struct Session<'a> {
    driver: Driver<'a>,
    stats: Option<BufWriter<File>>,
    out: io::StdoutLock<'static>,
    trace: bool,
}

impl<'a> Session<'a> {
    fn new(exec: &ExecArgs) -> Result<Session<'a>, Failure> {
        let gc = if exec.nogc { Gc::Off } else { Gc::On };
        let mut driver = Driver::new(exec.fuel, gc);
        if exec.trace {
            driver.machine().set_trace(Box::new(|rule: &'static str, t: &Term, store: &Store| {
                let t = ratt::surface::pretty::term_to_string_short(t);
                eprintln!("  {rule:<10} {t}  [{}]", store.digest());
            }));
        }
        let stats = match &exec.stats {
            Some(path) => Some(BufWriter::new(
                File::create(path).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?,
            )),
            None => None,
        };
        Ok(Session { driver, stats, out: io::stdout().lock(), trace: exec.trace })
    }

    fn begin_step(&self, step: usize) {
        if self.trace {
            eprintln!("step {step}");
        }
    }

    fn emit(&mut self, line: &str, stats: &StepStats) -> Outcome {
        writeln!(self.out, "{line}").and_then(|_| self.out.flush()).map_err(io_failure)?;
        if let Some(w) = &mut self.stats {
            let record = serde_json::to_string(stats).expect("stats serialize");
            writeln!(w, "{record}").and_then(|_| w.flush()).map_err(io_failure)?;
        }
        Ok(())
    }
}

fn run(file: &Path, name: Option<&str>, steps: usize, exec: &ExecArgs) -> Outcome {
    let module = load(file, false)?;
    let def = select(&module, name)?;
    let (term, ty) = executable(file, &module, def, exec.unsafe_)?;
    let elem = match &ty {
        Type::Box(inner) => inner.as_stream(),
        _ => None,
    };
    let elem = value_type(elem).cloned();
    if elem.is_none() && !exec.unsafe_ {
        return Err(semantic(format!(
            "`{}` has type {ty}; `run` expects Box (Str A) for a value type A",
            def.name
        )));
    }
    let mut session = Session::new(exec)?;
    if let (Some(t), false) = (&elem, exec.unsafe_) {
        session.driver = session.driver.output_type(t.clone());
    }
    let mut state = stream_init(&term);
    for step in 1..=steps {
        session.begin_step(step);
        match session.driver.stream_step(&state) {
            Ok((v, next, stats)) => {
                session.emit(&show(&v, elem.as_ref()), &stats)?;
                state = next;
            }
            Err(e) => return Err(semantic(format!("error: {e}"))),
        }
    }
    Ok(())
}

fn transduce(file: &Path, name: Option<&str>, input: Option<&Path>, steps: Option<usize>, exec: &ExecArgs) -> Outcome {
    let module = load(file, false)?;
    let def = select(&module, name)?;
    let (term, ty) = executable(file, &module, def, exec.unsafe_)?;
    let (a, b) = match &ty {
        Type::Box(inner) => inner.as_transducer().map(|(a, b)| (a.clone(), b.clone())),
        _ => None,
    }
    .map_or((None, None), |(a, b)| (Some(a), Some(b)));
    let (a, b) = (value_type(a.as_ref()).cloned(), value_type(b.as_ref()).cloned());
    if (a.is_none() || b.is_none()) && !exec.unsafe_ {
        return Err(semantic(format!(
            "`{}` has type {ty}; `transduce` expects Box (Str A -> Str B) for value types A and B",
            def.name
        )));
    }
    let reader: Box<dyn BufRead> = match input {
        Some(path) => Box::new(BufReader::new(
            File::open(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let mut session = Session::new(exec)?;
    if !exec.unsafe_ {
        session.driver = session.driver.output_type(b.clone().expect("checked above"));
    }
    let mut state = transducer_init(&term);
    let mut step = 0;
    for (i, line) in reader.lines().enumerate() {
        if steps.is_some_and(|n| step >= n) {
            break;
        }
        let line = line.map_err(io_failure)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let v = parse_value(line).map_err(|e| semantic(format!("input line {lineno}: {e}")))?;
        if let (Some(t), false) = (&a, exec.unsafe_) {
            if !has_value_type(&v, t) {
                return Err(semantic(format!("input line {lineno}: `{line}` does not have type {t}")));
            }
        }
        step += 1;
        session.begin_step(step);
        match session.driver.transducer_step(&state, &v) {
            Ok((out, next, stats)) => {
                session.emit(&show(&out, b.as_ref()), &stats)?;
                state = next;
            }
            Err(e) => return Err(semantic(format!("error: input line {lineno}: {e}"))),
        }
    }
    Ok(())
}

fn desugar(file: &Path, name: Option<&str>, closed: bool) -> Outcome {
    let module = load(file, false)?;
    let defs: Vec<&CompiledDef> = match name {
        Some(_) => vec![select(&module, name)?],
        None => module.defs.iter().collect(),
    };
    let mut failed = false;
    let mut out = io::stdout().lock();
    for def in defs {
        let term = if closed { def.term.as_ref().map(Term::erase_annotations) } else { def.lowered.clone() };
        match term {
            Some(t) => writeln!(out, "{} = {}", def.name, term_to_string(&t)).map_err(io_failure)?,
            None => {
                failed = true;
                if let Some(d) = def.diagnostic() {
                    report(file, &d);
                }
            }
        }
    }
    if failed {
        Err(Failure::Semantic)
    } else {
        Ok(())
    }
}
