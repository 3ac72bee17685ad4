//! Operator descriptors for RAM programs and their interpretation on
//! memory states.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{
    bin_arith, bin_logic, bnot, bton, compare, ntob, shift, ArithOp, BitString, CmpName, LogicOp, ShiftOp,
};
use crate::memory::{MemState, Reg};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("immediate destination")]
    ImmediateDestination,
    #[error("memory numbers start at 1")]
    ZeroMemory,
    #[error("operator `{op}` cannot be used as {wanted}")]
    WrongClass { op: String, wanted: &'static str },
    #[error("cannot parse operator `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Imm(BigUint),
    Dir(Reg),
    Ind(Reg),
}

impl Operand {
    pub fn imm(n: u64) -> Self {
        Operand::Imm(BigUint::from(n))
    }
    pub fn dir(i: u64) -> Self {
        Operand::Dir(BigUint::from(i))
    }
    pub fn ind(i: u64) -> Self {
        Operand::Ind(BigUint::from(i))
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Imm(n) => write!(f, "#{n}"),
            Operand::Dir(i) => write!(f, "{i}"),
            Operand::Ind(i) => write!(f, "@{i}"),
        }
    }
}

impl FromStr for Operand {
    type Err = OpError;
    fn from_str(s: &str) -> Result<Self, OpError> {
        let num = |t: &str| -> Result<BigUint, OpError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(OpError::Parse(s.to_string()));
            }
            t.parse().map_err(|_| OpError::Parse(s.to_string()))
        };
        if let Some(r) = s.strip_prefix('#') {
            Ok(Operand::Imm(num(r)?))
        } else if let Some(r) = s.strip_prefix('@') {
            Ok(Operand::Ind(num(r)?))
        } else {
            Ok(Operand::Dir(num(s)?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinName {
    Add,
    Sub,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnName {
    Not,
    Shl,
    Shr,
    Mov,
}

/// One operator of the RAM instruction set, including the shared-memory
/// extension (`ini`, `loa`, `sto`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RamOp {
    Bin { op: BinName, s1: Operand, s2: Operand, d: Operand },
    Un { op: UnName, s1: Operand, d: Operand },
    Cmp { op: CmpName, s1: Operand, s2: Operand },
    Ini(BigUint),
    Load { addr: Reg, d: Operand },
    Store { s: Operand, addr: Reg },
}

impl RamOp {
    pub fn is_cmp(&self) -> bool {
        matches!(self, RamOp::Cmp { .. })
    }

    /// Operators that act on a single memory and are not comparisons.
    pub fn is_plain(&self) -> bool {
        matches!(self, RamOp::Bin { .. } | RamOp::Un { .. })
    }

    pub fn is_shared(&self) -> bool {
        matches!(self, RamOp::Load { .. } | RamOp::Store { .. })
    }

    /// True when no operand uses indirect addressing.
    pub fn is_direct(&self) -> bool {
        let ind = |o: &Operand| matches!(o, Operand::Ind(_));
        match self {
            RamOp::Bin { s1, s2, d, .. } => !ind(s1) && !ind(s2) && !ind(d),
            RamOp::Un { s1, d, .. } => !ind(s1) && !ind(d),
            RamOp::Cmp { s1, s2, .. } => !ind(s1) && !ind(s2),
            _ => false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RamOp::Bin { op, .. } => match op {
                BinName::Add => "add",
                BinName::Sub => "sub",
                BinName::And => "and",
                BinName::Or => "or",
            },
            RamOp::Un { op, .. } => match op {
                UnName::Not => "not",
                UnName::Shl => "shl",
                UnName::Shr => "shr",
                UnName::Mov => "mov",
            },
            RamOp::Cmp { op, .. } => match op {
                CmpName::Eq => "eq",
                CmpName::Gt => "gt",
                CmpName::Beq => "beq",
            },
            RamOp::Ini(_) => "ini",
            RamOp::Load { .. } => "loa",
            RamOp::Store { .. } => "sto",
        }
    }

    fn wrong(&self, wanted: &'static str) -> OpError {
        OpError::WrongClass { op: self.to_string(), wanted }
    }
}

impl fmt::Display for RamOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.name();
        match self {
            RamOp::Bin { s1, s2, d, .. } => write!(f, "{n}:{s1}:{s2}:{d}"),
            RamOp::Un { s1, d, .. } => write!(f, "{n}:{s1}:{d}"),
            RamOp::Cmp { s1, s2, .. } => write!(f, "{n}:{s1}:{s2}"),
            RamOp::Ini(i) => write!(f, "ini:#{i}"),
            RamOp::Load { addr, d } => write!(f, "loa:@{addr}:{d}"),
            RamOp::Store { s, addr } => write!(f, "sto:{s}:@{addr}"),
        }
    }
}

impl FromStr for RamOp {
    type Err = OpError;
    fn from_str(s: &str) -> Result<Self, OpError> {
        let bad = || OpError::Parse(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let ops = parts[1..]
            .iter()
            .map(|p| p.parse::<Operand>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let dst = |o: &Operand| -> Result<Operand, OpError> {
            match o {
                Operand::Imm(_) => Err(OpError::ImmediateDestination),
                _ => Ok(o.clone()),
            }
        };
        let bin = |op| -> Result<RamOp, OpError> {
            match ops.as_slice() {
                [a, b, d] => Ok(RamOp::Bin { op, s1: a.clone(), s2: b.clone(), d: dst(d)? }),
                _ => Err(bad()),
            }
        };
        let un = |op| -> Result<RamOp, OpError> {
            match ops.as_slice() {
                [a, d] => Ok(RamOp::Un { op, s1: a.clone(), d: dst(d)? }),
                _ => Err(bad()),
            }
        };
        let cmp = |op| -> Result<RamOp, OpError> {
            match ops.as_slice() {
                [a, b] => Ok(RamOp::Cmp { op, s1: a.clone(), s2: b.clone() }),
                _ => Err(bad()),
            }
        };
        match parts[0] {
            "add" => bin(BinName::Add),
            "sub" => bin(BinName::Sub),
            "and" => bin(BinName::And),
            "or" => bin(BinName::Or),
            "not" => un(UnName::Not),
            "shl" => un(UnName::Shl),
            "shr" => un(UnName::Shr),
            "mov" => un(UnName::Mov),
            "eq" => cmp(CmpName::Eq),
            "gt" => cmp(CmpName::Gt),
            "beq" => cmp(CmpName::Beq),
            "ini" => match ops.as_slice() {
                [Operand::Imm(i)] if i.is_zero() => Err(OpError::ZeroMemory),
                [Operand::Imm(i)] => Ok(RamOp::Ini(i.clone())),
                _ => Err(bad()),
            },
            "loa" => match ops.as_slice() {
                [Operand::Ind(a), d] => Ok(RamOp::Load { addr: a.clone(), d: dst(d)? }),
                _ => Err(bad()),
            },
            "sto" => match ops.as_slice() {
                [src, Operand::Ind(a)] => Ok(RamOp::Store { s: src.clone(), addr: a.clone() }),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

impl From<RamOp> for String {
    fn from(o: RamOp) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for RamOp {
    type Error = OpError;
    fn try_from(s: String) -> Result<Self, OpError> {
        s.parse()
    }
}

pub fn src_val(sigma: &MemState, s: &Operand) -> BitString {
    match s {
        Operand::Imm(n) => ntob(n),
        Operand::Dir(i) => sigma.get(i),
        Operand::Ind(i) => sigma.get(&bton(&sigma.get(i))),
    }
}

pub fn dst_reg(sigma: &MemState, d: &Operand) -> Result<Reg, OpError> {
    match d {
        Operand::Imm(_) => Err(OpError::ImmediateDestination),
        Operand::Dir(i) => Ok(i.clone()),
        Operand::Ind(i) => Ok(bton(&sigma.get(i))),
    }
}

pub fn apply_op(o: &RamOp, sigma: &MemState) -> Result<MemState, OpError> {
    let (value, d) = match o {
        RamOp::Bin { op, s1, s2, d } => {
            let (a, b) = (src_val(sigma, s1), src_val(sigma, s2));
            let v = match op {
                BinName::Add => bin_arith(ArithOp::Add, &a, &b),
                BinName::Sub => bin_arith(ArithOp::Sub, &a, &b),
                BinName::And => bin_logic(LogicOp::And, &a, &b),
                BinName::Or => bin_logic(LogicOp::Or, &a, &b),
            };
            (v, d)
        }
        RamOp::Un { op, s1, d } => {
            let a = src_val(sigma, s1);
            let v = match op {
                UnName::Not => bnot(&a),
                UnName::Shl => shift(ShiftOp::Shl, &a),
                UnName::Shr => shift(ShiftOp::Shr, &a),
                UnName::Mov => a,
            };
            (v, d)
        }
        _ => return Err(o.wrong("a single-memory operation")),
    };
    let r = dst_reg(sigma, d)?;
    Ok(sigma.override_reg(&r, value))
}

pub fn apply_prop(p: &RamOp, sigma: &MemState) -> Result<bool, OpError> {
    match p {
        RamOp::Cmp { op, s1, s2 } => Ok(compare(*op, &src_val(sigma, s1), &src_val(sigma, s2))),
        _ => Err(p.wrong("a comparison")),
    }
}

/// `loa` yields the new private memory, `sto` the new shared memory.
pub fn apply_shared(o: &RamOp, private: &MemState, shared: &MemState) -> Result<MemState, OpError> {
    match o {
        RamOp::Load { addr, d } => {
            let a = bton(&private.get(addr));
            let r = dst_reg(private, d)?;
            Ok(private.override_reg(&r, shared.get(&a)))
        }
        RamOp::Store { s, addr } => {
            let a = bton(&private.get(addr));
            Ok(shared.override_reg(&a, src_val(private, s)))
        }
        _ => Err(o.wrong("a shared-memory operation")),
    }
}

pub fn apply_ini(i: &BigUint) -> Result<MemState, OpError> {
    if i.is_zero() {
        return Err(OpError::ZeroMemory);
    }
    Ok(MemState::empty().override_reg(&BigUint::zero(), ntob(i)))
}

/// The single-memory operation induced by a `loa`/`sto` on the interleaving
/// of (private, shared): private register `j` lives at `2j`, shared register
/// `j` at `2j + 1`. Computed directly on the merged state by index
/// translation, so it can be compared against merging the separate results.
pub fn induced_on_merged(o: &RamOp, merged: &MemState) -> Result<MemState, OpError> {
    let two = BigUint::from(2u32);
    let p = |j: &BigUint| &two * j;
    let s = |j: &BigUint| &two * j + 1u32;
    match o {
        RamOp::Load { addr, d } => {
            let a = bton(&merged.get(&p(addr)));
            let target = match d {
                Operand::Dir(j) => p(j),
                Operand::Ind(j) => p(&bton(&merged.get(&p(j)))),
                Operand::Imm(_) => return Err(OpError::ImmediateDestination),
            };
            Ok(merged.override_reg(&target, merged.get(&s(&a))))
        }
        RamOp::Store { s: src, addr } => {
            let a = bton(&merged.get(&p(addr)));
            let v = match src {
                Operand::Imm(n) => ntob(n),
                Operand::Dir(j) => merged.get(&p(j)),
                Operand::Ind(j) => merged.get(&p(&bton(&merged.get(&p(j))))),
            };
            Ok(merged.override_reg(&s(&a), v))
        }
        _ => Err(o.wrong("a shared-memory operation")),
    }
}
