//! Bit strings, the register datatype of every machine in this crate.
//!
//! Bit strings are stored least-significant bit first: index 0 is the bit
//! with weight 1. Leading zeros (high indices) are allowed and are
//! significant for [`CmpName::Beq`] but not for the numeric view.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("invalid bit string literal `{0}` (expected a nonempty string over 0/1, or `e`)")]
    BadLiteral(String),
}

/// A finite sequence of bits, LSB first. The empty string is written `e`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Same bits without leading (high-index) zeros. `"0"` and `ε` both
    /// strip to `ε`; use [`ntob`]/[`bton`] when the canonical `"0"` is wanted.
    pub fn strip_leading_zeros(&self) -> BitString {
        let keep = self.0.iter().rposition(|&b| b).map_or(0, |i| i + 1);
        BitString(self.0[..keep].to_vec())
    }

    pub fn to_natural(&self) -> BigUint {
        bton(self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "e" {
            return Ok(BitString::empty());
        }
        if s.is_empty() {
            return Err(BitsError::BadLiteral(s.to_string()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(BitsError::BadLiteral(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = BitsError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Natural number to its shortest bit string. `ntob(0) = "0"`, never `ε`.
pub fn ntob(n: &BigUint) -> BitString {
    if n.is_zero() {
        return BitString(vec![false]);
    }
    let bits = (0..n.bits()).map(|i| n.bit(i)).collect();
    BitString(bits)
}

pub fn ntob_u64(n: u64) -> BitString {
    ntob(&BigUint::from(n))
}

/// Bit string to natural number; leading zeros are ignored, `bton(ε) = 0`.
pub fn bton(w: &BitString) -> BigUint {
    let mut n = BigUint::zero();
    for (i, &b) in w.0.iter().enumerate() {
        if b {
            n.set_bit(i as u64, true);
        }
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArithOp {
    Add,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShiftOp {
    Shl,
    Shr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpName {
    Eq,
    Gt,
    Beq,
}

/// Addition or proper subtraction; results never carry leading zeros.
pub fn bin_arith(op: ArithOp, w1: &BitString, w2: &BitString) -> BitString {
    let (a, b) = (bton(w1), bton(w2));
    let n = match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => {
            if a > b {
                a - b
            } else {
                BigUint::zero()
            }
        }
    };
    ntob(&n)
}

/// Bitwise and/or; the shorter operand is padded with zeros, so the result
/// is exactly as long as the longer operand.
pub fn bin_logic(op: LogicOp, w1: &BitString, w2: &BitString) -> BitString {
    let len = w1.len().max(w2.len());
    let at = |w: &BitString, i: usize| w.0.get(i).copied().unwrap_or(false);
    let bits = (0..len)
        .map(|i| match op {
            LogicOp::And => at(w1, i) && at(w2, i),
            LogicOp::Or => at(w1, i) || at(w2, i),
        })
        .collect();
    BitString(bits)
}

pub fn bnot(w: &BitString) -> BitString {
    BitString(w.0.iter().map(|b| !b).collect())
}

pub fn shift(op: ShiftOp, w: &BitString) -> BitString {
    if w.is_empty() {
        return BitString::empty();
    }
    match op {
        ShiftOp::Shl => {
            let mut bits = Vec::with_capacity(w.len() + 1);
            bits.push(false);
            bits.extend_from_slice(&w.0);
            BitString(bits)
        }
        ShiftOp::Shr => BitString(w.0[1..].to_vec()),
    }
}

/// `eq`/`gt` compare numeric values, `beq` compares the raw sequences.
pub fn compare(op: CmpName, w1: &BitString, w2: &BitString) -> bool {
    match op {
        CmpName::Eq => bton(w1) == bton(w2),
        CmpName::Gt => bton(w1) > bton(w2),
        CmpName::Beq => w1 == w2,
    }
}

/// `true` when the string is the shortest encoding of its value.
pub fn is_canonical(w: &BitString) -> bool {
    match w.0.last() {
        None => false,
        Some(true) => true,
        Some(false) => w.len() == 1,
    }
}
