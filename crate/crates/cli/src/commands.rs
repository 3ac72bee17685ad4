use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command as Process, Stdio};

use ramproc::bits::BitString;
use ramproc::complexity::{
    self, check_computes, input_valuation, inputs_up_to, is_of_complexity, AffineBound, ComplexityError,
    FunctionSpec, Measure, Status,
};
use ramproc::machines::{
    compile_apramp, compile_spramp, format_program, parse_program, proc_of_bbram, program_of_ramp, run_bbram,
    Kind, Program, RunResult,
};
use ramproc::memory::MemState;
use ramproc::semantics::{build_lts, depth, eventually_halts, SemError};
use ramproc::terms::{parse_term, ProcTerm, Valuation, RM};

use crate::error::{code, CliError};
use crate::{Command, Format, Input, Model};

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Compile { model, inverse, files } => compile(model, inverse, &files),
        Command::Run { input, fuel, lts, format } => run(&input, fuel, lts.as_deref(), format),
        Command::Measure { input, measure } => measure_cmd(&input, &measure),
        Command::Check { input, oracle, arity, max_len, inputs, bound, measure } => {
            check(&input, &oracle, arity, max_len, inputs.as_deref(), bound.as_deref(), measure.as_deref())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn input_error(path: &Path, msg: impl ToString) -> CliError {
    CliError::Input { path: path.to_path_buf(), msg: msg.to_string() }
}

fn program(path: &Path, kind: Kind) -> Result<Program> {
    parse_program(&read(path)?, kind).map_err(|e| input_error(path, e))
}

fn single(files: &[PathBuf], what: &str) -> Result<PathBuf> {
    match files {
        [f] => Ok(f.clone()),
        _ => Err(CliError::Usage(format!("{what} takes exactly one file"))),
    }
}

fn term_of(model: Model, files: &[PathBuf]) -> Result<ProcTerm> {
    let compiled = match model {
        Model::Term => {
            let f = single(files, "a term")?;
            return parse_term(&read(&f)?).map_err(|e| input_error(&f, e));
        }
        Model::Ramp => {
            let f = single(files, "the ramp model")?;
            proc_of_bbram(&program(&f, Kind::Bbram)?)
        }
        Model::Apramp | Model::Spramp => {
            let progs = files.iter().map(|f| program(f, Kind::Smbram)).collect::<Result<Vec<_>>>()?;
            if model == Model::Apramp {
                compile_apramp(&progs)
            } else {
                compile_spramp(&progs)
            }
        }
    };
    compiled.map_err(|e| CliError::BadInput(e.to_string()))
}

fn words(list: &str) -> Result<Vec<BitString>> {
    list.split(',')
        .map(|w| {
            let w = w.trim();
            let w = if w.is_empty() { "e" } else { w };
            w.parse().map_err(|e| CliError::Usage(format!("bad argument word `{w}`: {e}")))
        })
        .collect()
}

fn valuation(input: &Input) -> Result<Valuation> {
    let mut rho = match &input.args {
        Some(list) => input_valuation(&words(list)?),
        None => Valuation::new(),
    };
    for spec in &input.mems {
        let (var, file) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--mem expects K=FILE, got `{spec}`")))?;
        let path = Path::new(file);
        let mem = MemState::parse_file(&read(path)?).map_err(|e| input_error(path, e))?;
        rho.set(var.trim(), mem);
    }
    Ok(rho)
}

fn sem_error(e: SemError) -> CliError {
    match e {
        SemError::Exploded(_) => CliError::Exploded(format!("{e}; raise --max-states")),
        e => CliError::BadInput(e.to_string()),
    }
}

fn compile(model: Model, inverse: bool, files: &[PathBuf]) -> Result<u8> {
    if inverse {
        let f = single(files, "--inverse")?;
        let t = parse_term(&read(&f)?).map_err(|e| input_error(&f, e))?;
        let c = program_of_ramp(&t).map_err(|e| input_error(&f, e))?;
        print!("{}", format_program(&c));
        return Ok(code::OK);
    }
    if model == Model::Term {
        return Err(CliError::Usage("compile needs --model ramp, apramp or spramp".into()));
    }
    println!("{}", term_of(model, files)?);
    Ok(code::OK)
}

fn run(input: &Input, fuel: Option<u64>, lts_out: Option<&Path>, format: Format) -> Result<u8> {
    let rho = valuation(input)?;
    if let Some(fuel) = fuel {
        if input.model != Model::Ramp {
            return Err(CliError::Usage("--fuel runs a single ramp program".into()));
        }
        let f = single(&input.files, "the ramp model")?;
        let c = program(&f, Kind::Bbram)?;
        let res = run_bbram(&c, &rho.get(RM), fuel).map_err(|e| input_error(&f, e))?;
        return Ok(match res {
            RunResult::Halted { mem, steps, jumps } => {
                println!("halts: yes\nsteps: {steps}\njumps: {jumps}\nfinal: RM={mem}");
                code::OK
            }
            RunResult::Diverged => {
                println!("halts: no (no halt within {fuel} instructions)");
                code::NO_HALT
            }
        });
    }
    let t = term_of(input.model, &input.files)?;
    let l = build_lts(&t, &rho, input.max_states).map_err(sem_error)?;
    if let Some(path) = lts_out {
        let text = match format {
            Format::Json => serde_json::to_string_pretty(&l.to_json()).expect("json value"),
            Format::Dot => l.to_dot(),
        };
        fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    }
    let halts = eventually_halts(&l);
    println!("halts: {}", if halts { "yes" } else { "no" });
    println!("states: {}", l.num_states());
    println!("transitions: {}", l.num_edges());
    if let Ok(d) = depth(&l) {
        println!("depth: {d}");
    }
    let mut finals = BTreeSet::new();
    let mut deadlocks = 0;
    for s in l.terminal_states() {
        if l.success[s] {
            finals.insert(l.valuation(s).map(|v| v.to_string()).unwrap_or_default());
        } else {
            deadlocks += 1;
        }
    }
    for v in &finals {
        println!("final: {v}");
    }
    if deadlocks > 0 {
        println!("deadlocks: {deadlocks}");
    }
    if l.topo_order().is_none() {
        println!("cycles: yes");
    }
    Ok(if halts { code::OK } else { code::NO_HALT })
}

fn parse_measure(name: &str) -> Result<Measure> {
    name.parse().map_err(|e: ComplexityError| CliError::Usage(e.to_string()))
}

fn complexity_error(e: ComplexityError) -> CliError {
    match e {
        ComplexityError::Class { .. } => CliError::Usage(e.to_string()),
        ComplexityError::Undefined => CliError::Undefined(e.to_string()),
        ComplexityError::Sem(s) => sem_error(s),
        e => CliError::Usage(e.to_string()),
    }
}

fn measure_cmd(input: &Input, name: &str) -> Result<u8> {
    let m = parse_measure(name)?;
    let t = term_of(input.model, &input.files)?;
    let rho = valuation(input)?;
    let report = complexity::measure(&t, &rho, m, input.max_states).map_err(complexity_error)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
    Ok(code::OK)
}

/// Runs `sh -c cmd` with the argument words on stdin, one per line.
fn ask_oracle(cmd: &str, args: &[BitString]) -> std::result::Result<Option<BitString>, String> {
    let mut child = Process::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("cannot start oracle: {e}"))?;
    let text: String = args.iter().map(|w| format!("{w}\n")).collect();
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(text.as_bytes())
        .map_err(|e| format!("cannot write to oracle: {e}"))?;
    let out = child.wait_with_output().map_err(|e| format!("oracle failed: {e}"))?;
    if !out.status.success() {
        let err = String::from_utf8_lossy(&out.stderr);
        return Err(format!("oracle exited with {}: {}", out.status, err.trim()));
    }
    let answer = String::from_utf8_lossy(&out.stdout).trim().to_string();
    match answer.as_str() {
        "undef" => Ok(None),
        "" => Ok(Some(BitString::empty())),
        w => w.parse().map(Some).map_err(|_| format!("oracle printed `{w}`, not a bit string")),
    }
}

fn listed_inputs(path: &Path, arity: usize) -> Result<Vec<Vec<BitString>>> {
    let mut out = Vec::new();
    for (n, line) in read(path)?.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ws = words(line).map_err(|e| input_error(path, format!("line {}: {e}", n + 1)))?;
        if ws.len() != arity {
            return Err(input_error(path, format!("line {}: {} words for arity {arity}", n + 1, ws.len())));
        }
        out.push(ws);
    }
    Ok(out)
}

fn check(
    input: &Input,
    oracle: &str,
    arity: usize,
    max_len: Option<usize>,
    inputs: Option<&Path>,
    bound: Option<&str>,
    measure: Option<&str>,
) -> Result<u8> {
    if input.args.is_some() {
        return Err(CliError::Usage("check enumerates its own arguments; drop --args".into()));
    }
    let t = term_of(input.model, &input.files)?;
    let inputs = match (max_len, inputs) {
        (Some(l), None) => inputs_up_to(arity, l),
        (None, Some(p)) => listed_inputs(p, arity)?,
        _ => return Err(CliError::Usage("give either --max-len or --inputs".into())),
    };
    let bound = match bound {
        Some(b) => b.parse::<AffineBound>().map_err(|e| CliError::Usage(e.to_string()))?,
        None => AffineBound::UNBOUNDED,
    };
    let f = FunctionSpec::new(arity, |w: &[BitString]| ask_oracle(oracle, w));
    let verdict = match measure {
        Some(name) => {
            let m = parse_measure(name)?;
            is_of_complexity(&t, &f, &bound, m, &inputs, input.max_states).map_err(complexity_error)?
        }
        None => check_computes(&t, &f, &bound, &inputs, input.max_states),
    };
    if inputs.is_empty() {
        eprintln!("ramproc: warning: no inputs to check; the verdict is vacuous");
    }
    print!("{}", verdict.table());
    let failed = verdict.count(Status::Fail) + verdict.count(Status::OracleError);
    let undecided = verdict.count(Status::Undecided);
    eprintln!(
        "{} inputs: {} pass, {} fail, {} undecided, {} oracle errors",
        verdict.rows.len(),
        verdict.count(Status::Pass),
        verdict.count(Status::Fail),
        undecided,
        verdict.count(Status::OracleError)
    );
    if undecided > 0 && failed == 0 {
        eprintln!("ramproc: warning: some inputs were not decided within --max-states");
    }
    Ok(if failed > 0 { code::FAILED } else { code::OK })
}
