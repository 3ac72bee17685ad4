//! RAM memory states and the n-memory interleaving.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitString, BitsError};
use crate::ramops::{Operand, RamOp};

/// Register number. Registers are addressed by unbounded naturals since an
/// indirect operand may hold an arbitrarily long bit string.
pub type Reg = BigUint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemoryError {
    #[error("need at least one memory")]
    NoMemories,
    #[error("split arity must be at least 1")]
    ZeroArity,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// A RAM memory state: every register holds a bit string, all but finitely
/// many hold `ε`. Only non-empty contents are stored, so structural equality
/// is extensional equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemState {
    regs: BTreeMap<Reg, BitString>,
}

impl MemState {
    /// The all-`ε` state (`ims`).
    pub fn empty() -> Self {
        MemState::default()
    }

    pub fn get(&self, i: &Reg) -> BitString {
        self.regs.get(i).cloned().unwrap_or_default()
    }

    pub fn get_u64(&self, i: u64) -> BitString {
        self.get(&BigUint::from(i))
    }

    pub fn override_reg(&self, i: &Reg, w: BitString) -> MemState {
        let mut out = self.clone();
        out.set(i.clone(), w);
        out
    }

    pub fn with(mut self, i: u64, w: BitString) -> MemState {
        self.set(BigUint::from(i), w);
        self
    }

    pub(crate) fn set(&mut self, i: Reg, w: BitString) {
        if w.is_empty() {
            self.regs.remove(&i);
        } else {
            self.regs.insert(i, w);
        }
    }

    /// Registers with non-empty contents, in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (&Reg, &BitString)> {
        self.regs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.regs.is_empty()
    }

    /// Registers in which the two states differ.
    pub fn diff(&self, other: &MemState) -> BTreeSet<Reg> {
        self.regs.keys().chain(other.regs.keys()).filter(|i| self.get(i) != other.get(i)).cloned().collect()
    }

    pub fn agrees_on<'a>(&self, other: &MemState, regs: impl IntoIterator<Item = &'a Reg>) -> bool {
        regs.into_iter().all(|i| self.get(i) == other.get(i))
    }

    /// Line-oriented `index=bitstring` format used by the CLI.
    pub fn to_file_format(&self) -> String {
        self.regs.iter().map(|(i, w)| format!("{i}={w}\n")).collect()
    }

    pub fn parse_file(text: &str) -> Result<MemState, MemoryError> {
        let mut mem = MemState::empty();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split(';').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| MemoryError::Parse { line: n + 1, msg: msg.to_string() };
            let (idx, val) = line.split_once('=').ok_or_else(|| err("expected `index=bitstring`"))?;
            let idx: BigUint = idx.trim().parse().map_err(|_| err("bad register index"))?;
            let val: BitString = val.trim().parse().map_err(|e: BitsError| err(&e.to_string()))?;
            mem.set(idx, val);
        }
        Ok(mem)
    }
}

impl fmt::Display for MemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("mem{")?;
        for (k, (i, w)) in self.regs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}={w}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for MemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for MemState {
    type Err = MemoryError;

    /// Parses the inline form `mem{1=11, 3=0}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MemoryError::Parse { line: 1, msg: format!("bad memory literal `{s}`") };
        let body = s.trim().strip_prefix("mem{").and_then(|r| r.strip_suffix('}')).ok_or_else(bad)?;
        MemState::parse_file(&body.replace(',', "\n"))
    }
}

impl Serialize for MemState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> =
            self.regs.iter().map(|(i, w)| (i.to_string(), w.to_string())).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MemState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(d)?;
        let mut mem = MemState::empty();
        for (i, w) in map {
            let i: BigUint = i.parse().map_err(serde::de::Error::custom)?;
            let w: BitString = w.parse().map_err(serde::de::Error::custom)?;
            mem.set(i, w);
        }
        Ok(mem)
    }
}

/// `σ[i ↦ w]`.
pub fn override_mem(sigma: &MemState, i: &Reg, w: BitString) -> MemState {
    sigma.override_reg(i, w)
}

/// Interleaves `n` memories into one: register `n·i + k − 1` of the result
/// is register `i` of the `k`-th memory (1-based `k`).
pub fn merge_n(mems: &[MemState]) -> Result<MemState, MemoryError> {
    if mems.is_empty() {
        return Err(MemoryError::NoMemories);
    }
    let n = BigUint::from(mems.len());
    let mut out = MemState::empty();
    for (k0, m) in mems.iter().enumerate() {
        for (i, w) in m.iter() {
            out.set(&n * i + BigUint::from(k0), w.clone());
        }
    }
    Ok(out)
}

/// Inverse of [`merge_n`].
pub fn split_n(sigma: &MemState, n: usize) -> Result<Vec<MemState>, MemoryError> {
    if n == 0 {
        return Err(MemoryError::ZeroArity);
    }
    let big_n = BigUint::from(n);
    let mut out = vec![MemState::empty(); n];
    for (idx, w) in sigma.iter() {
        let k0 = (idx % &big_n).to_usize().expect("remainder below n");
        out[k0].set(idx / &big_n, w.clone());
    }
    Ok(out)
}

/// A set of register numbers, either an explicit finite set or "could be
/// any register".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionInfo {
    Finite(BTreeSet<Reg>),
    Unbounded,
}

impl RegionInfo {
    fn empty() -> Self {
        RegionInfo::Finite(BTreeSet::new())
    }

    fn add(&mut self, r: Reg) {
        if let RegionInfo::Finite(s) = self {
            s.insert(r);
        }
    }

    pub fn finite(&self) -> Option<&BTreeSet<Reg>> {
        match self {
            RegionInfo::Finite(s) => Some(s),
            RegionInfo::Unbounded => None,
        }
    }

    pub fn of<I: IntoIterator<Item = u64>>(regs: I) -> Self {
        RegionInfo::Finite(regs.into_iter().map(BigUint::from).collect())
    }
}

/// Input and output regions of an operator descriptor, by syntactic
/// inspection of its operands.
///
/// Immediate sources read nothing, direct operands touch exactly their
/// register. An indirect source can read any register, an indirect
/// destination can write any register (and reads its pointer register).
/// `ini` rewrites the whole private memory; `loa`/`sto` reach into the
/// shared memory at a data-dependent address.
pub fn regions(o: &RamOp) -> (RegionInfo, RegionInfo) {
    let mut input = RegionInfo::empty();
    let mut output = RegionInfo::empty();
    let read_src = |input: &mut RegionInfo, s: &Operand| match s {
        Operand::Imm(_) => {}
        Operand::Dir(i) => input.add(i.clone()),
        Operand::Ind(_) => *input = RegionInfo::Unbounded,
    };
    let write_dst = |input: &mut RegionInfo, output: &mut RegionInfo, d: &Operand| match d {
        Operand::Dir(i) => output.add(i.clone()),
        Operand::Ind(i) => {
            input.add(i.clone());
            *output = RegionInfo::Unbounded;
        }
        // rejected when descriptors are built
        Operand::Imm(_) => {}
    };
    match o {
        RamOp::Bin { s1, s2, d, .. } => {
            read_src(&mut input, s1);
            read_src(&mut input, s2);
            write_dst(&mut input, &mut output, d);
        }
        RamOp::Un { s1, d, .. } => {
            read_src(&mut input, s1);
            write_dst(&mut input, &mut output, d);
        }
        RamOp::Cmp { s1, s2, .. } => {
            read_src(&mut input, s1);
            read_src(&mut input, s2);
        }
        RamOp::Ini(_) => output = RegionInfo::Unbounded,
        RamOp::Load { .. } => {
            input = RegionInfo::Unbounded;
            output = RegionInfo::Unbounded;
        }
        RamOp::Store { .. } => {
            input = RegionInfo::Unbounded;
            output = RegionInfo::Unbounded;
        }
    }
    (input, output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramops::{apply_op, apply_prop};
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn override_examples() {
        let ims = MemState::empty();
        let one = BigUint::from(1u32);
        let m = override_mem(&ims, &one, bs("11"));
        assert_eq!(m.get_u64(1), bs("11"));
        assert_eq!(m.get_u64(0), BitString::empty());
        let m = override_mem(&override_mem(&ims, &one, bs("1")), &one, bs("0"));
        assert_eq!(m.get_u64(1), bs("0"));
        // writing ε releases the register
        assert!(override_mem(&m, &one, BitString::empty()).is_empty());
    }

    #[test]
    fn merge_examples() {
        let s = MemState::empty().with(0, bs("1")).with(4, bs("01"));
        assert_eq!(merge_n(std::slice::from_ref(&s)).unwrap(), s);

        let s1 = MemState::empty().with(0, bs("1")).with(3, bs("11"));
        let s2 = MemState::empty().with(0, bs("0"));
        let m = merge_n(&[s1, s2]).unwrap();
        assert_eq!(m.get_u64(0), bs("1"));
        assert_eq!(m.get_u64(1), bs("0"));
        assert_eq!(m.get_u64(6), bs("11"));

        assert_eq!(merge_n(&[]), Err(MemoryError::NoMemories));
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_n(&MemState::empty(), 3).unwrap(), vec![MemState::empty(); 3]);
        let s = MemState::empty().with(5, bs("1"));
        let parts = split_n(&s, 2).unwrap();
        assert_eq!(parts[1].get_u64(2), bs("1"));
        assert!(parts[0].is_empty());
        assert_eq!(split_n(&s, 0), Err(MemoryError::ZeroArity));
    }

    #[test]
    fn region_examples() {
        let (i, o) = regions(&"add:#1:#2:5".parse().unwrap());
        assert_eq!((i, o), (RegionInfo::of([]), RegionInfo::of([5])));
        let (i, o) = regions(&"add:3:4:5".parse().unwrap());
        assert_eq!((i, o), (RegionInfo::of([3, 4]), RegionInfo::of([5])));
        let (i, o) = regions(&"mov:#1:@2".parse().unwrap());
        assert_eq!((i, o), (RegionInfo::of([2]), RegionInfo::Unbounded));
        let (i, _) = regions(&"gt:@1:2".parse().unwrap());
        assert_eq!(i, RegionInfo::Unbounded);
    }

    #[test]
    fn file_format() {
        let m = MemState::parse_file("1=11\n; comment\n\n3 = 0\n4=e\n").unwrap();
        assert_eq!(m, MemState::empty().with(1, bs("11")).with(3, bs("0")));
        assert_eq!(MemState::parse_file(&m.to_file_format()).unwrap(), m);
        assert!(matches!(MemState::parse_file("1=11\nx=1"), Err(MemoryError::Parse { line: 2, .. })));
        assert_eq!(m.to_string().parse::<MemState>().unwrap(), m);
        assert_eq!("mem{}".parse::<MemState>().unwrap(), MemState::empty());
    }

    pub(crate) fn arb_mem(max_reg: u64, max_len: usize) -> impl Strategy<Value = MemState> {
        prop::collection::btree_map(0..max_reg, prop::collection::vec(any::<bool>(), 0..=max_len), 0..6)
            .prop_map(|m| {
                m.into_iter().fold(MemState::empty(), |acc, (i, b)| acc.with(i, BitString::from_bits(b)))
            })
    }

    proptest! {
        #[test]
        fn merge_split_inverse(mems in prop::collection::vec(arb_mem(8, 4), 1..=4)) {
            let merged = merge_n(&mems).unwrap();
            prop_assert_eq!(split_n(&merged, mems.len()).unwrap(), mems.clone());
            prop_assert_eq!(merge_n(&split_n(&merged, mems.len()).unwrap()).unwrap(), merged);
        }

        #[test]
        fn ops_keep_finite_support(m in arb_mem(8, 4)) {
            let out = apply_op(&"not:1:2".parse().unwrap(), &m).unwrap();
            prop_assert!(out.iter().all(|(_, w)| !w.is_empty()));
            let _ = apply_prop(&"eq:1:2".parse().unwrap(), &m).unwrap();
        }
    }
}
