//! Binary RAM programs, their direct interpreter, and the translations
//! between programs and machine process terms.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::compare;
use crate::memory::MemState;
use crate::ramops::{apply_op, apply_prop, src_val, Operand, RamOp};
use crate::terms::ShapeError;

mod compile;

pub use compile::{
    alpha_equivalent, compile_apramp, compile_spramp, proc_of_bbram, proc_of_smbram_async,
    proc_of_smbram_sync, program_of_ramp,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty program")]
    Empty,
    #[error("instruction {line}: {msg}")]
    Runtime { line: usize, msg: String },
    #[error("line {line}: target {target} > length {len}")]
    TargetOutOfRange { line: usize, target: usize, len: usize },
    #[error("line {line}: jump target 0 (instructions are numbered from 1)")]
    ZeroTarget { line: usize },
    #[error("line {line}: `{instr}` is not allowed in a {kind} program")]
    IllegalForKind { line: usize, instr: String, kind: Kind },
    #[error("line {line}: last instruction must be halt or a jump that is always taken")]
    NoExit { line: usize },
    #[error("component numbers start at 1")]
    ZeroComponent,
    #[error("expected a {0} program")]
    WrongKind(Kind),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("term is not the image of any program: {0}")]
    NotInImage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Basic binary RAM: plain operations only.
    Bbram,
    /// Shared-memory binary RAM: plain operations plus load and store.
    Smbram,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Bbram => "BBRAM",
            Kind::Smbram => "SMBRAM",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instr {
    Op(RamOp),
    /// Conditional jump to a 1-based instruction index.
    Jmp(RamOp, usize),
    Halt,
}

impl Instr {
    /// A jump whose comparison holds in every memory state.
    pub fn always_jumps(&self) -> bool {
        let Instr::Jmp(RamOp::Cmp { op, s1, s2 }, _) = self else {
            return false;
        };
        match (s1, s2) {
            (Operand::Imm(_), Operand::Imm(_)) => {
                let m = MemState::empty();
                compare(*op, &src_val(&m, s1), &src_val(&m, s2))
            }
            _ => s1 == s2 && !matches!(op, crate::bits::CmpName::Gt),
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Op(o) => write!(f, "{o}"),
            Instr::Jmp(p, i) => write!(f, "jmp:{p}:{i}"),
            Instr::Halt => f.write_str("halt"),
        }
    }
}

impl FromStr for Instr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "halt" {
            return Ok(Instr::Halt);
        }
        if let Some(rest) = s.strip_prefix("jmp:") {
            let (p, target) = rest.rsplit_once(':').ok_or_else(|| format!("malformed jump `{s}`"))?;
            let p: RamOp = p.parse().map_err(|e| format!("{e}"))?;
            if !p.is_cmp() {
                return Err(format!("`{p}` is not a comparison"));
            }
            let target = target.parse().map_err(|_| format!("bad jump target `{target}`"))?;
            return Ok(Instr::Jmp(p, target));
        }
        let o: RamOp = s.parse().map_err(|e| format!("{e}"))?;
        if o.is_cmp() {
            return Err(format!("comparison `{o}` can only appear in a jump"));
        }
        Ok(Instr::Op(o))
    }
}

/// A validated program: non-empty, jump targets in range, only operations
/// allowed for its kind, and a last instruction that never falls through.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    kind: Kind,
    instrs: Vec<Instr>,
}

impl Program {
    pub fn new(kind: Kind, instrs: Vec<Instr>) -> Result<Self, MachineError> {
        if instrs.is_empty() {
            return Err(MachineError::Empty);
        }
        let len = instrs.len();
        for (k, ins) in instrs.iter().enumerate() {
            let line = k + 1;
            match ins {
                Instr::Jmp(_, 0) => return Err(MachineError::ZeroTarget { line }),
                Instr::Jmp(_, t) if *t > len => {
                    return Err(MachineError::TargetOutOfRange { line, target: *t, len })
                }
                Instr::Op(o) => {
                    let ok = match kind {
                        Kind::Bbram => o.is_plain(),
                        Kind::Smbram => o.is_plain() || o.is_shared(),
                    };
                    if !ok {
                        return Err(MachineError::IllegalForKind { line, instr: o.to_string(), kind });
                    }
                }
                _ => {}
            }
        }
        let last = &instrs[len - 1];
        if !(matches!(last, Instr::Halt) || last.always_jumps()) {
            return Err(MachineError::NoExit { line: len });
        }
        Ok(Program { kind, instrs })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One instruction per line; blank lines and `;` comments are skipped.
/// Line numbers in errors refer to the text.
pub fn parse_program(text: &str, kind: Kind) -> Result<Program, MachineError> {
    let mut instrs = Vec::new();
    let mut lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let body = raw.split(';').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let ins: Instr = body.parse().map_err(|msg| MachineError::Parse { line: k + 1, msg })?;
        instrs.push(ins);
        lines.push(k + 1);
    }
    Program::new(kind, instrs).map_err(|e| match e {
        MachineError::TargetOutOfRange { line, target, len } => {
            MachineError::TargetOutOfRange { line: lines[line - 1], target, len }
        }
        MachineError::ZeroTarget { line } => MachineError::ZeroTarget { line: lines[line - 1] },
        MachineError::IllegalForKind { line, instr, kind } => {
            MachineError::IllegalForKind { line: lines[line - 1], instr, kind }
        }
        MachineError::NoExit { line } => MachineError::NoExit { line: lines[line - 1] },
        other => other,
    })
}

pub fn format_program(c: &Program) -> String {
    c.instrs.iter().map(|i| format!("{i}\n")).collect()
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_program(self))
    }
}

/// Result of running a program directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunResult {
    /// `steps` counts executed operations and jumps; `halt` is free.
    Halted {
        mem: MemState,
        steps: u64,
        jumps: u64,
    },
    Diverged,
}

/// Program-counter interpreter for BBRAM programs. Stops with
/// `Diverged` once `fuel` instructions have run without reaching `halt`.
pub fn run_bbram(c: &Program, sigma: &MemState, fuel: u64) -> Result<RunResult, MachineError> {
    if c.kind != Kind::Bbram {
        return Err(MachineError::WrongKind(Kind::Bbram));
    }
    let mut mem = sigma.clone();
    let mut pc = 1usize;
    let (mut steps, mut jumps) = (0u64, 0u64);
    loop {
        let Some(ins) = c.instrs.get(pc - 1) else {
            return Ok(RunResult::Diverged);
        };
        if matches!(ins, Instr::Halt) {
            return Ok(RunResult::Halted { mem, steps, jumps });
        }
        if steps == fuel {
            return Ok(RunResult::Diverged);
        }
        steps += 1;
        match ins {
            Instr::Op(o) => {
                mem =
                    apply_op(o, &mem).map_err(|e| MachineError::Runtime { line: pc, msg: e.to_string() })?;
                pc += 1;
            }
            Instr::Jmp(p, target) => {
                jumps += 1;
                let taken = apply_prop(p, &mem).expect("validated comparison");
                pc = if taken { *target } else { pc + 1 };
            }
            Instr::Halt => unreachable!(),
        }
    }
}
