//! Random generators for property tests and benchmarks: memories,
//! operators, programs, small ground terms and instances of the equational
//! axioms.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitString;
use crate::machines::{Instr, Kind, Program};
use crate::memory::MemState;
use crate::par::Exec;
use crate::ramops::RamOp;
use crate::semantics::{build_lts_with, rb_bisim, Comm, SemError};
use crate::terms::{ActionLabel, ActionSet, Cond, DataExpr, ProcTerm, RenameMap, Valuation};

pub fn word(rng: &mut (impl Rng + ?Sized), max_len: usize) -> BitString {
    let len = rng.gen_range(0..=max_len);
    BitString::from_bits((0..len).map(|_| rng.gen()).collect())
}

/// A memory whose non-empty registers lie in `0..regs`.
pub fn memory(rng: &mut (impl Rng + ?Sized), regs: u64, max_len: usize) -> MemState {
    let mut m = MemState::empty();
    for r in 0..regs {
        if rng.gen_bool(0.6) {
            m = m.with(r, word(rng, max_len));
        }
    }
    m
}

/// Copies registers `regs` of `from` into `to`.
pub fn agree_on<'a>(
    to: MemState,
    from: &MemState,
    regs: impl IntoIterator<Item = &'a crate::memory::Reg>,
) -> MemState {
    regs.into_iter().fold(to, |m, r| m.override_reg(r, from.get(r)))
}

fn operand(rng: &mut (impl Rng + ?Sized), regs: u64, indirect: bool) -> String {
    match rng.gen_range(0..10) {
        0..=2 => format!("#{}", rng.gen_range(0..6)),
        3 if indirect => format!("@{}", rng.gen_range(0..regs)),
        _ => rng.gen_range(0..regs).to_string(),
    }
}

fn dest(rng: &mut (impl Rng + ?Sized), regs: u64, indirect: bool) -> String {
    if indirect && rng.gen_bool(0.1) {
        format!("@{}", rng.gen_range(0..regs))
    } else {
        rng.gen_range(0..regs).to_string()
    }
}

/// A plain (non-comparison) operator over registers `0..regs`.
pub fn plain_op(rng: &mut (impl Rng + ?Sized), regs: u64, indirect: bool) -> RamOp {
    const BIN: [&str; 4] = ["add", "sub", "and", "or"];
    const UN: [&str; 4] = ["not", "shl", "shr", "mov"];
    let text = if rng.gen_bool(0.5) {
        format!(
            "{}:{}:{}:{}",
            BIN.choose(rng).unwrap(),
            operand(rng, regs, indirect),
            operand(rng, regs, indirect),
            dest(rng, regs, indirect)
        )
    } else {
        format!("{}:{}:{}", UN.choose(rng).unwrap(), operand(rng, regs, indirect), dest(rng, regs, indirect))
    };
    text.parse().expect("generated operator parses")
}

pub fn cmp_op(rng: &mut (impl Rng + ?Sized), regs: u64, indirect: bool) -> RamOp {
    let name = ["eq", "gt", "beq"].choose(rng).unwrap();
    format!("{name}:{}:{}", operand(rng, regs, indirect), operand(rng, regs, indirect))
        .parse()
        .expect("generated comparison parses")
}

fn shared_op(rng: &mut (impl Rng + ?Sized), regs: u64) -> RamOp {
    let a = rng.gen_range(0..regs);
    let text = if rng.gen_bool(0.5) {
        format!("loa:@{a}:{}", dest(rng, regs, false))
    } else {
        format!("sto:{}:@{a}", operand(rng, regs, false))
    };
    text.parse().expect("generated shared operator parses")
}

fn exit(rng: &mut (impl Rng + ?Sized), len: usize) -> Instr {
    let target = rng.gen_range(1..=len);
    match rng.gen_range(0..6) {
        0 => Instr::Jmp("eq:#0:#0".parse().unwrap(), target),
        1 => Instr::Jmp(format!("beq:{0}:{0}", rng.gen_range(0..4)).parse().unwrap(), target),
        _ => Instr::Halt,
    }
}

/// A random valid program with `1..=max_len` instructions over registers
/// `0..4`.
pub fn program(rng: &mut (impl Rng + ?Sized), kind: Kind, max_len: usize) -> Program {
    let len = rng.gen_range(1..=max_len);
    let mut instrs = Vec::with_capacity(len);
    for _ in 1..len {
        let ins = match rng.gen_range(0..20) {
            0..=10 => Instr::Op(plain_op(rng, 4, true)),
            11..=14 if kind == Kind::Smbram => Instr::Op(shared_op(rng, 4)),
            11..=17 => Instr::Jmp(cmp_op(rng, 4, true), rng.gen_range(1..=len)),
            _ => Instr::Halt,
        };
        instrs.push(ins);
    }
    instrs.push(exit(rng, len));
    Program::new(kind, instrs).expect("generated program is valid")
}

/// A program of exactly `len` instructions with no jumps, ending in `halt`.
pub fn straight_line(rng: &mut (impl Rng + ?Sized), kind: Kind, len: usize) -> Program {
    assert!(len >= 1);
    let mut instrs: Vec<Instr> = (1..len)
        .map(|_| match kind {
            Kind::Smbram if rng.gen_bool(0.3) => Instr::Op(shared_op(rng, 4)),
            _ => Instr::Op(plain_op(rng, 4, false)),
        })
        .collect();
    instrs.push(Instr::Halt);
    Program::new(kind, instrs).expect("straight-line program is valid")
}

/// Vocabulary of the random terms.
pub const NAMES: [&str; 3] = ["a", "b", "c"];
pub const VARS: [&str; 2] = ["u", "v"];

/// Communication used with random terms: `a | b = c`, `c | c = a`.
pub fn comm() -> Comm {
    Comm::none().with("a", "b", "c").with("c", "c", "a")
}

fn small_mem(rng: &mut (impl Rng + ?Sized)) -> MemState {
    memory(rng, 2, 2)
}

pub fn valuation(rng: &mut (impl Rng + ?Sized)) -> Valuation {
    VARS.iter().fold(Valuation::new(), |v, x| v.with(x, small_mem(rng)))
}

pub fn data(rng: &mut (impl Rng + ?Sized), depth: usize) -> DataExpr {
    match rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
        0 => DataExpr::flex(VARS.choose(rng).unwrap()),
        1 => DataExpr::Lit(small_mem(rng)),
        2 => DataExpr::apply1(plain_op(rng, 2, false), data(rng, depth - 1)),
        _ => data(rng, depth - 1).upd(rng.gen_range(0..2), word(rng, 2)),
    }
}

pub fn cond(rng: &mut (impl Rng + ?Sized), depth: usize) -> Cond {
    match rng.gen_range(0..if depth == 0 { 4 } else { 7 }) {
        0 => Cond::True,
        1 => Cond::False,
        2 => Cond::prop(cmp_op(rng, 2, false), data(rng, 1), rng.gen()),
        3 => Cond::DataEq(data(rng, 1), data(rng, 1)),
        4 => Cond::not(cond(rng, depth - 1)),
        5 => Cond::and(cond(rng, depth - 1), cond(rng, depth - 1)),
        _ => Cond::or(cond(rng, depth - 1), cond(rng, depth - 1)),
    }
}

/// An atomic action term whose data is literal when `ground`.
pub fn atomic(rng: &mut (impl Rng + ?Sized), ground: bool) -> ProcTerm {
    let d = |rng: &mut _| {
        if ground {
            DataExpr::Lit(small_mem(rng))
        } else {
            data(rng, 1)
        }
    };
    match rng.gen_range(0..3) {
        0 => ProcTerm::act(NAMES.choose(rng).unwrap()),
        1 => {
            let n = rng.gen_range(1..=2);
            let args = (0..n).map(|_| d(rng)).collect();
            ProcTerm::DataAct(NAMES.choose(rng).unwrap().to_string(), args)
        }
        _ => ProcTerm::assign(VARS.choose(rng).unwrap(), d(rng)),
    }
}

/// Atomic action, `τ` or `δ`.
pub fn alpha(rng: &mut (impl Rng + ?Sized), ground: bool, tau: bool, dead: bool) -> ProcTerm {
    match rng.gen_range(0..8) {
        0 if tau => ProcTerm::Silent,
        1 if dead => ProcTerm::Dead,
        _ => atomic(rng, ground),
    }
}

fn ground_label(rng: &mut (impl Rng + ?Sized)) -> ActionLabel {
    match rng.gen_range(0..3) {
        0 => ActionLabel::plain(NAMES.choose(rng).unwrap()),
        1 => ActionLabel::Data(NAMES.choose(rng).unwrap().to_string(), vec![small_mem(rng)]),
        _ => ActionLabel::Assign(VARS.choose(rng).unwrap().to_string(), small_mem(rng)),
    }
}

/// An action set; `with_tau` allows the set of all actions including `τ`.
pub fn action_set(rng: &mut (impl Rng + ?Sized), with_tau: bool) -> ActionSet {
    match rng.gen_range(0..if with_tau { 6 } else { 5 }) {
        0 | 1 => {
            let n = rng.gen_range(0..4);
            ActionSet::listed((0..n).map(|_| ground_label(rng)))
        }
        2 => ActionSet::Mentioning(VARS.choose(rng).unwrap().to_string()),
        3 => ActionSet::Avoiding(VARS.choose(rng).unwrap().to_string()),
        4 => ActionSet::AllBut(NAMES.iter().filter(|_| rng.gen_bool(0.5)).map(|s| s.to_string()).collect()),
        _ => ActionSet::AllWithTau,
    }
}

pub fn renaming(rng: &mut (impl Rng + ?Sized)) -> RenameMap {
    let mut f = RenameMap::new();
    for a in NAMES {
        if rng.gen_bool(0.6) {
            f.insert(a.to_string(), NAMES.choose(rng).unwrap().to_string());
        }
    }
    f
}

/// A closed term of the given depth without recursion, evaluation or
/// synchronous merge.
pub fn term(rng: &mut (impl Rng + ?Sized), depth: usize) -> ProcTerm {
    if depth == 0 {
        return match rng.gen_range(0..10) {
            0 => ProcTerm::Empty,
            1 => ProcTerm::Dead,
            2 => ProcTerm::Silent,
            _ => atomic(rng, false),
        };
    }
    let sub = |rng: &mut _| {
        let d = rng_depth(rng, depth);
        term(rng, d)
    };
    match rng.gen_range(0..14) {
        0 | 1 => ProcTerm::alt(sub(rng), sub(rng)),
        2..=4 => ProcTerm::seq(sub(rng), sub(rng)),
        5 => ProcTerm::par(sub(rng), sub(rng)),
        6 => ProcTerm::left_merge(sub(rng), sub(rng)),
        7 => ProcTerm::comm_merge(sub(rng), sub(rng)),
        8 => ProcTerm::guard(cond(rng, 1), sub(rng)),
        9 => ProcTerm::encap(action_set(rng, true), sub(rng)),
        10 => ProcTerm::abstr(action_set(rng, false), sub(rng)),
        11 => ProcTerm::proj(rng.gen_range(0..3), sub(rng)),
        12 => ProcTerm::rename(renaming(rng), sub(rng)),
        _ => term(rng, 0),
    }
}

fn rng_depth(rng: &mut (impl Rng + ?Sized), depth: usize) -> usize {
    rng.gen_range(0..depth)
}

/// One instance of an equation. With `outer_eval` both sides are checked
/// under `eval{rho}`, otherwise as they stand.
pub struct Instance {
    pub lhs: ProcTerm,
    pub rhs: ProcTerm,
    pub rho: Valuation,
    pub outer_eval: bool,
}

pub struct Axiom {
    pub name: &'static str,
    /// 1 process core, 2 data and evaluation, 4 projection, 5 renaming.
    pub group: u8,
    pub instantiate: fn(&mut dyn rand::RngCore) -> Instance,
}

/// Label and provenance of a ground atomic action term.
fn ground_atom(t: &ProcTerm) -> Option<(ActionLabel, BTreeSet<String>)> {
    let mut prov = BTreeSet::new();
    let label = match t {
        ProcTerm::Act(a) => ActionLabel::plain(a),
        ProcTerm::DataAct(a, args) => {
            let vals = args.iter().map(|e| {
                e.collect_flex(&mut prov);
                e.eval(None).ok()
            });
            ActionLabel::Data(a.clone(), vals.collect::<Option<Vec<_>>>()?)
        }
        ProcTerm::Assign(v, e) => {
            e.collect_flex(&mut prov);
            prov.insert(v.clone());
            ActionLabel::Assign(v.clone(), e.eval(None).ok()?)
        }
        _ => return None,
    };
    Some((label, prov))
}

fn renamed(f: &RenameMap, t: &ProcTerm) -> ProcTerm {
    let g = |a: &String| f.get(a).unwrap_or(a).clone();
    match t {
        ProcTerm::Act(a) => ProcTerm::Act(g(a)),
        ProcTerm::DataAct(a, args) => ProcTerm::DataAct(g(a), args.clone()),
        other => other.clone(),
    }
}

fn eval_data(e: &DataExpr, rho: &Valuation) -> DataExpr {
    DataExpr::Lit(e.eval(Some(rho)).expect("random data evaluates"))
}

type R<'a> = &'a mut dyn rand::RngCore;

const D: usize = 2;

fn t(rng: R) -> ProcTerm {
    term(rng, D)
}

fn inst(lhs: ProcTerm, rhs: ProcTerm, rng: R) -> Instance {
    Instance { lhs, rhs, rho: valuation(rng), outer_eval: true }
}

fn plain_name(rng: R) -> String {
    NAMES.choose(rng).unwrap().to_string()
}

use ProcTerm as P;

macro_rules! axiom {
    ($name:literal, $group:literal, |$r:ident| $body:expr) => {
        Axiom { name: $name, group: $group, instantiate: |$r: R| $body }
    };
}

/// Every equation of the process algebra with projection and renaming,
/// as random-instance generators.
pub fn axioms() -> Vec<Axiom> {
    vec![
        axiom!("A1", 1, |r| {
            let (x, y) = (t(r), t(r));
            inst(P::alt(x.clone(), y.clone()), P::alt(y, x), r)
        }),
        axiom!("A2", 1, |r| {
            let (x, y, z) = (t(r), t(r), t(r));
            inst(P::alt(P::alt(x.clone(), y.clone()), z.clone()), P::alt(x, P::alt(y, z)), r)
        }),
        axiom!("A3", 1, |r| {
            let x = t(r);
            inst(P::alt(x.clone(), x.clone()), x, r)
        }),
        axiom!("A4", 1, |r| {
            let (x, y, z) = (t(r), t(r), t(r));
            inst(
                P::seq(P::alt(x.clone(), y.clone()), z.clone()),
                P::alt(P::seq(x, z.clone()), P::seq(y, z)),
                r,
            )
        }),
        axiom!("A5", 1, |r| {
            let (x, y, z) = (t(r), t(r), t(r));
            inst(P::seq(P::seq(x.clone(), y.clone()), z.clone()), P::seq(x, P::seq(y, z)), r)
        }),
        axiom!("A6", 1, |r| {
            let x = t(r);
            inst(P::alt(x.clone(), P::Dead), x, r)
        }),
        axiom!("A7", 1, |r| {
            let x = t(r);
            inst(P::seq(P::Dead, x), P::Dead, r)
        }),
        axiom!("A8", 1, |r| {
            let x = t(r);
            inst(P::seq(x.clone(), P::Empty), x, r)
        }),
        axiom!("A9", 1, |r| {
            let x = t(r);
            inst(P::seq(P::Empty, x.clone()), x, r)
        }),
        axiom!("CM1E", 1, |r| {
            let (x, y) = (t(r), t(r));
            let rhs = P::sum(vec![
                P::left_merge(x.clone(), y.clone()),
                P::left_merge(y.clone(), x.clone()),
                P::comm_merge(x.clone(), y.clone()),
                P::seq(
                    P::encap(ActionSet::AllWithTau, x.clone()),
                    P::encap(ActionSet::AllWithTau, y.clone()),
                ),
            ]);
            inst(P::par(x, y), rhs, r)
        }),
        axiom!("CM2E", 1, |r| {
            let x = t(r);
            inst(P::left_merge(P::Empty, x), P::Dead, r)
        }),
        axiom!("CM3", 1, |r| {
            let (a, x, y) = (alpha(r, false, true, true), t(r), t(r));
            inst(P::left_merge(P::seq(a.clone(), x.clone()), y.clone()), P::seq(a, P::par(x, y)), r)
        }),
        axiom!("CM4", 1, |r| {
            let (x, y, z) = (t(r), t(r), t(r));
            inst(
                P::left_merge(P::alt(x.clone(), y.clone()), z.clone()),
                P::alt(P::left_merge(x, z.clone()), P::left_merge(y, z)),
                r,
            )
        }),
        axiom!("CM5E", 1, |r| {
            let x = t(r);
            inst(P::comm_merge(P::Empty, x), P::Dead, r)
        }),
        axiom!("CM6E", 1, |r| {
            let x = t(r);
            inst(P::comm_merge(x, P::Empty), P::Dead, r)
        }),
        axiom!("CM7", 1, |r| {
            let (a, b, x, y) = (plain_name(r), plain_name(r), t(r), t(r));
            let c = comm().get(&a, &b).map(str::to_string);
            let head = c.map_or(P::Dead, |c| P::act(&c));
            inst(
                P::comm_merge(P::seq(P::act(&a), x.clone()), P::seq(P::act(&b), y.clone())),
                P::seq(head, P::par(x, y)),
                r,
            )
        }),
        axiom!("CM8", 1, |r| {
            let (x, y, z) = (t(r), t(r), t(r));
            inst(
                P::comm_merge(P::alt(x.clone(), y.clone()), z.clone()),
                P::alt(P::comm_merge(x, z.clone()), P::comm_merge(y, z)),
                r,
            )
        }),
        axiom!("CM9", 1, |r| {
            let (x, y, z) = (t(r), t(r), t(r));
            inst(
                P::comm_merge(x.clone(), P::alt(y.clone(), z.clone())),
                P::alt(P::comm_merge(x.clone(), y), P::comm_merge(x, z)),
                r,
            )
        }),
        axiom!("D0", 1, |r| {
            let h = action_set(r, true);
            inst(P::encap(h, P::Empty), P::Empty, r)
        }),
        axiom!("D1/D2", 1, |r| {
            let (a, h) = (alpha(r, true, true, true), action_set(r, true));
            let hidden = match ground_atom(&a) {
                Some((l, prov)) => h.contains(&l, &prov),
                None => a == P::Silent && h.contains(&ActionLabel::Tau, &BTreeSet::new()),
            };
            let rhs = if hidden { P::Dead } else { a.clone() };
            inst(P::encap(h, a), rhs, r)
        }),
        axiom!("D3", 1, |r| {
            let (h, x, y) = (action_set(r, true), t(r), t(r));
            inst(
                P::encap(h.clone(), P::alt(x.clone(), y.clone())),
                P::alt(P::encap(h.clone(), x), P::encap(h, y)),
                r,
            )
        }),
        axiom!("D4", 1, |r| {
            let (h, x, y) = (action_set(r, true), t(r), t(r));
            inst(
                P::encap(h.clone(), P::seq(x.clone(), y.clone())),
                P::seq(P::encap(h.clone(), x), P::encap(h, y)),
                r,
            )
        }),
        axiom!("T0", 1, |r| {
            let i = action_set(r, false);
            inst(P::abstr(i, P::Empty), P::Empty, r)
        }),
        axiom!("T1/T2", 1, |r| {
            let (a, i) = (alpha(r, true, true, true), action_set(r, false));
            let hidden = ground_atom(&a).is_some_and(|(l, prov)| i.contains(&l, &prov));
            let rhs = if hidden { P::Silent } else { a.clone() };
            inst(P::abstr(i, a), rhs, r)
        }),
        axiom!("T3", 1, |r| {
            let (i, x, y) = (action_set(r, false), t(r), t(r));
            inst(
                P::abstr(i.clone(), P::alt(x.clone(), y.clone())),
                P::alt(P::abstr(i.clone(), x), P::abstr(i, y)),
                r,
            )
        }),
        axiom!("T4", 1, |r| {
            let (i, x, y) = (action_set(r, false), t(r), t(r));
            inst(
                P::abstr(i.clone(), P::seq(x.clone(), y.clone())),
                P::seq(P::abstr(i.clone(), x), P::abstr(i, y)),
                r,
            )
        }),
        axiom!("BE", 1, |r| {
            let (a, x, y) = (alpha(r, false, true, true), t(r), t(r));
            let xy = P::alt(x.clone(), y);
            inst(P::seq(a.clone(), P::alt(P::seq(P::Silent, xy.clone()), x)), P::seq(a, xy), r)
        }),
        axiom!("GC1", 2, |r| {
            let x = t(r);
            inst(P::guard(Cond::True, x.clone()), x, r)
        }),
        axiom!("GC2", 2, |r| {
            let x = t(r);
            inst(P::guard(Cond::False, x), P::Dead, r)
        }),
        axiom!("GC3", 2, |r| {
            let phi = cond(r, 2);
            inst(P::guard(phi, P::Dead), P::Dead, r)
        }),
        axiom!("GC4", 2, |r| {
            let (phi, x, y) = (cond(r, 2), t(r), t(r));
            inst(
                P::guard(phi.clone(), P::alt(x.clone(), y.clone())),
                P::alt(P::guard(phi.clone(), x), P::guard(phi, y)),
                r,
            )
        }),
        axiom!("GC5", 2, |r| {
            let (phi, x, y) = (cond(r, 2), t(r), t(r));
            inst(P::guard(phi.clone(), P::seq(x.clone(), y.clone())), P::seq(P::guard(phi, x), y), r)
        }),
        axiom!("GC6", 2, |r| {
            let (phi, psi, x) = (cond(r, 2), cond(r, 2), t(r));
            inst(P::guard(phi.clone(), P::guard(psi.clone(), x.clone())), P::guard(Cond::and(phi, psi), x), r)
        }),
        axiom!("GC7", 2, |r| {
            let (phi, psi, x) = (cond(r, 2), cond(r, 2), t(r));
            inst(
                P::guard(Cond::or(phi.clone(), psi.clone()), x.clone()),
                P::alt(P::guard(phi, x.clone()), P::guard(psi, x)),
                r,
            )
        }),
        axiom!("GC8", 2, |r| {
            let (phi, x, y) = (cond(r, 2), t(r), t(r));
            inst(
                P::left_merge(P::guard(phi.clone(), x.clone()), y.clone()),
                P::guard(phi, P::left_merge(x, y)),
                r,
            )
        }),
        axiom!("GC9", 2, |r| {
            let (phi, x, y) = (cond(r, 2), t(r), t(r));
            inst(
                P::comm_merge(P::guard(phi.clone(), x.clone()), y.clone()),
                P::guard(phi, P::comm_merge(x, y)),
                r,
            )
        }),
        axiom!("GC10", 2, |r| {
            let (phi, x, y) = (cond(r, 2), t(r), t(r));
            inst(
                P::comm_merge(x.clone(), P::guard(phi.clone(), y.clone())),
                P::guard(phi, P::comm_merge(x, y)),
                r,
            )
        }),
        axiom!("GC11", 2, |r| {
            let (phi, h, x) = (cond(r, 2), action_set(r, true), t(r));
            inst(P::encap(h.clone(), P::guard(phi.clone(), x.clone())), P::guard(phi, P::encap(h, x)), r)
        }),
        axiom!("GC12", 2, |r| {
            let (phi, i, x) = (cond(r, 2), action_set(r, false), t(r));
            inst(P::abstr(i.clone(), P::guard(phi.clone(), x.clone())), P::guard(phi, P::abstr(i, x)), r)
        }),
        axiom!("V0", 2, |r| {
            let rho = valuation(r);
            bare(P::eval(rho, P::Empty), P::Empty)
        }),
        axiom!("V1", 2, |r| {
            let (rho, x) = (valuation(r), t(r));
            bare(P::eval(rho.clone(), P::seq(P::Silent, x.clone())), P::seq(P::Silent, P::eval(rho, x)))
        }),
        axiom!("V2", 2, |r| {
            let (rho, a, x) = (valuation(r), plain_name(r), t(r));
            bare(P::eval(rho.clone(), P::seq(P::act(&a), x.clone())), P::seq(P::act(&a), P::eval(rho, x)))
        }),
        axiom!("V3", 2, |r| {
            let (rho, a, x) = (valuation(r), plain_name(r), t(r));
            let args: Vec<DataExpr> = (0..r.gen_range(1..=2)).map(|_| data(r, 1)).collect();
            let vals = args.iter().map(|e| eval_data(e, &rho)).collect();
            bare(
                P::eval(rho.clone(), P::seq(P::DataAct(a.clone(), args), x.clone())),
                P::seq(P::DataAct(a, vals), P::eval(rho, x)),
            )
        }),
        axiom!("V4", 2, |r| {
            let (rho, x, e) = (valuation(r), t(r), data(r, 1));
            let v = VARS.choose(r).unwrap();
            let val = e.eval(Some(&rho)).unwrap();
            bare(
                P::eval(rho.clone(), P::seq(P::assign(v, e), x.clone())),
                P::seq(P::assign(v, DataExpr::Lit(val.clone())), P::eval(rho.with(v, val), x)),
            )
        }),
        axiom!("V5", 2, |r| {
            let (rho, x, y) = (valuation(r), t(r), t(r));
            bare(
                P::eval(rho.clone(), P::alt(x.clone(), y.clone())),
                P::alt(P::eval(rho.clone(), x), P::eval(rho, y)),
            )
        }),
        axiom!("V6", 2, |r| {
            let (rho, phi, x) = (valuation(r), cond(r, 2), t(r));
            let holds = if phi.eval(Some(&rho)).unwrap() { Cond::True } else { Cond::False };
            bare(P::eval(rho.clone(), P::guard(phi, x.clone())), P::guard(holds, P::eval(rho, x)))
        }),
        axiom!("CM7Da/CM7Db", 2, |r| {
            let (a, b, x, y) = (plain_name(r), plain_name(r), t(r), t(r));
            let n = r.gen_range(1..=2);
            let m = if r.gen_bool(0.8) { n } else { 3 - n };
            let es: Vec<DataExpr> = (0..n).map(|_| data(r, 1)).collect();
            let mut fs: Vec<DataExpr> = (0..m).map(|_| data(r, 1)).collect();
            if r.gen_bool(0.5) {
                for (f, e) in fs.iter_mut().zip(&es) {
                    *f = e.clone();
                }
            }
            let lhs = P::comm_merge(
                P::seq(P::DataAct(a.clone(), es.clone()), x.clone()),
                P::seq(P::DataAct(b.clone(), fs.clone()), y.clone()),
            );
            let rhs = match comm().get(&a, &b) {
                Some(c) if n == m => {
                    let eq = es
                        .iter()
                        .zip(&fs)
                        .map(|(e, f)| Cond::DataEq(e.clone(), f.clone()))
                        .reduce(Cond::and)
                        .unwrap();
                    P::guard(eq, P::seq(P::DataAct(c.to_string(), es), P::par(x, y)))
                }
                _ => P::Dead,
            };
            inst(lhs, rhs, r)
        }),
        axiom!("CM7Dc/CM7Dd", 2, |r| {
            let (a, x, y) = (plain_name(r), t(r), t(r));
            let args = vec![data(r, 1)];
            let beta = loop {
                let b = alpha(r, false, true, true);
                if !matches!(b, P::DataAct(..)) {
                    break b;
                }
            };
            let d = P::seq(P::DataAct(a, args), x);
            let other = P::seq(beta, y);
            let lhs = if r.gen_bool(0.5) { P::comm_merge(d, other) } else { P::comm_merge(other, d) };
            inst(lhs, P::Dead, r)
        }),
        axiom!("CM7De/CM7Df", 2, |r| {
            let (x, y) = (t(r), t(r));
            let v = VARS.choose(r).unwrap();
            let ass = P::seq(P::assign(v, data(r, 1)), x);
            let other = P::seq(alpha(r, false, true, true), y);
            let lhs = if r.gen_bool(0.5) { P::comm_merge(ass, other) } else { P::comm_merge(other, ass) };
            inst(lhs, P::Dead, r)
        }),
        axiom!("BED", 2, |r| {
            let (a, phi, x, y) = (alpha(r, false, true, true), cond(r, 2), t(r), t(r));
            let xy = P::alt(x.clone(), y);
            inst(
                P::seq(
                    a.clone(),
                    P::alt(P::guard(phi.clone(), P::seq(P::Silent, xy.clone())), P::guard(phi.clone(), x)),
                ),
                P::seq(a, P::guard(phi, xy)),
                r,
            )
        }),
        axiom!("PR1", 4, |r| {
            let n = r.gen_range(0..4);
            inst(P::proj(n, P::Empty), P::Empty, r)
        }),
        axiom!("PR2", 4, |r| {
            let (a, x) = (alpha(r, false, false, false), t(r));
            inst(P::proj(0, P::seq(a, x)), P::Empty, r)
        }),
        axiom!("PR3", 4, |r| {
            let (n, a, x) = (r.gen_range(0..3), alpha(r, false, false, true), t(r));
            inst(P::proj(n + 1, P::seq(a.clone(), x.clone())), P::seq(a, P::proj(n, x)), r)
        }),
        axiom!("PR4", 4, |r| {
            let (n, x, y) = (r.gen_range(0..4), t(r), t(r));
            inst(P::proj(n, P::alt(x.clone(), y.clone())), P::alt(P::proj(n, x), P::proj(n, y)), r)
        }),
        axiom!("PR5", 4, |r| {
            let (n, phi, x) = (r.gen_range(0..4), cond(r, 2), t(r));
            inst(P::proj(n, P::guard(phi.clone(), x.clone())), P::guard(phi, P::proj(n, x)), r)
        }),
        axiom!("PR6", 4, |r| {
            let (n, x) = (r.gen_range(0..4), t(r));
            inst(P::proj(n, P::seq(P::Silent, x.clone())), P::seq(P::Silent, P::proj(n, x)), r)
        }),
        axiom!("RN1", 5, |r| {
            let f = renaming(r);
            inst(P::rename(f, P::Empty), P::Empty, r)
        }),
        axiom!("RN2", 5, |r| {
            let f = renaming(r);
            inst(P::rename(f, P::Dead), P::Dead, r)
        }),
        axiom!("RN3", 5, |r| {
            let (f, a) = (renaming(r), atomic(r, false));
            let rhs = renamed(&f, &a);
            inst(P::rename(f, a), rhs, r)
        }),
        axiom!("RN4", 5, |r| {
            let (f, x, y) = (renaming(r), t(r), t(r));
            inst(
                P::rename(f.clone(), P::alt(x.clone(), y.clone())),
                P::alt(P::rename(f.clone(), x), P::rename(f, y)),
                r,
            )
        }),
        axiom!("RN5", 5, |r| {
            let (f, x, y) = (renaming(r), t(r), t(r));
            inst(
                P::rename(f.clone(), P::seq(x.clone(), y.clone())),
                P::seq(P::rename(f.clone(), x), P::rename(f, y)),
                r,
            )
        }),
        axiom!("RN6", 5, |r| {
            let (f, phi, x) = (renaming(r), cond(r, 2), t(r));
            inst(P::rename(f.clone(), P::guard(phi.clone(), x.clone())), P::guard(phi, P::rename(f, x)), r)
        }),
        axiom!("RN7", 5, |r| {
            let f = renaming(r);
            inst(P::rename(f, P::Silent), P::Silent, r)
        }),
    ]
}

impl Instance {
    /// Explores both sides and compares them by rooted branching
    /// bisimilarity.
    pub fn check(&self, max_states: usize) -> Result<bool, SemError> {
        let wrap = |t: &ProcTerm| {
            if self.outer_eval {
                ProcTerm::eval(self.rho.clone(), t.clone())
            } else {
                t.clone()
            }
        };
        let c = comm();
        let l = build_lts_with(&wrap(&self.lhs), &c, max_states, Exec::Sequential)?;
        let r = build_lts_with(&wrap(&self.rhs), &c, max_states, Exec::Sequential)?;
        Ok(rb_bisim(&l, &r))
    }
}

fn bare(lhs: ProcTerm, rhs: ProcTerm) -> Instance {
    Instance { lhs, rhs, rho: Valuation::new(), outer_eval: false }
}
