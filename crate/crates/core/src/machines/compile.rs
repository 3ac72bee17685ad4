use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use super::{Instr, Kind, MachineError, Program};
use crate::ramops::RamOp;
use crate::terms::{ramp_shapes, rm, Cond, DataExpr, EqShape, ProcTerm, RecSpec, RM, SYNC};

fn flex(v: &str) -> DataExpr {
    DataExpr::flex(v)
}

fn goto(a: ProcTerm, z: &str) -> ProcTerm {
    ProcTerm::guard(Cond::True, ProcTerm::seq(a, ProcTerm::var(z)))
}

fn test(p: &RamOp, own: &str, taken: &str, not_taken: &str) -> ProcTerm {
    let branch = |b: bool, z: &str| {
        ProcTerm::guard(
            Cond::prop(p.clone(), flex(own), b),
            ProcTerm::seq(ProcTerm::assign(own, flex(own)), ProcTerm::var(z)),
        )
    };
    ProcTerm::alt(branch(true, taken), branch(false, not_taken))
}

fn halt() -> ProcTerm {
    ProcTerm::guard(Cond::True, ProcTerm::Empty)
}

/// Work equation of one instruction for a machine with private memory
/// `own`. `next` is where control falls through to.
fn work(ins: &Instr, own: &str, next: &str, target: impl Fn(usize) -> String) -> ProcTerm {
    match ins {
        Instr::Op(o @ RamOp::Load { .. }) => {
            goto(ProcTerm::assign(own, DataExpr::apply2(o.clone(), flex(own), flex(RM))), next)
        }
        Instr::Op(o @ RamOp::Store { .. }) => {
            goto(ProcTerm::assign(RM, DataExpr::apply2(o.clone(), flex(own), flex(RM))), next)
        }
        Instr::Op(o) => goto(ProcTerm::assign(own, DataExpr::apply1(o.clone(), flex(own))), next),
        Instr::Jmp(p, t) => test(p, own, &target(*t), next),
        Instr::Halt => halt(),
    }
}

fn ini(i: usize, first: &str) -> ProcTerm {
    let own = rm(i);
    goto(ProcTerm::assign(&own, DataExpr::apply1(RamOp::Ini(i.into()), flex(&own))), first)
}

/// Compiles a BBRAM program to its RAMP term `⟨X1|E⟩`. A final jump that
/// is always taken falls through to itself.
pub fn proc_of_bbram(c: &Program) -> Result<ProcTerm, MachineError> {
    if c.kind() != Kind::Bbram {
        return Err(MachineError::WrongKind(Kind::Bbram));
    }
    let x = |k: usize| format!("X{k}");
    let n = c.len();
    let eqs = c
        .instrs()
        .iter()
        .enumerate()
        .map(|(k, ins)| {
            let j = k + 1;
            let next = x(if j < n { j + 1 } else { j });
            (x(j), work(ins, RM, &next, x))
        })
        .collect();
    Ok(ProcTerm::rec("X1", RecSpec::new(eqs)))
}

fn smbram_kind(c: &Program, i: usize) -> Result<(), MachineError> {
    if c.kind() != Kind::Smbram {
        return Err(MachineError::WrongKind(Kind::Smbram));
    }
    if i == 0 {
        return Err(MachineError::ZeroComponent);
    }
    Ok(())
}

/// Component `i` of an asynchronous parallel machine.
pub fn proc_of_smbram_async(i: usize, c: &Program) -> Result<ProcTerm, MachineError> {
    smbram_kind(c, i)?;
    let y = |k: usize| format!("Y{k}");
    let root = format!("X{i}");
    let own = rm(i);
    let n = c.len();
    let mut eqs = vec![(root.clone(), ini(i, "Y1"))];
    for (k, ins) in c.instrs().iter().enumerate() {
        let j = k + 1;
        let next = y(if j < n { j + 1 } else { j });
        eqs.push((y(j), work(ins, &own, &next, y)));
    }
    Ok(ProcTerm::rec(&root, RecSpec::new(eqs)))
}

/// Component `i` of a synchronous parallel machine: every instruction is
/// preceded by a `sync` step.
pub fn proc_of_smbram_sync(i: usize, c: &Program) -> Result<ProcTerm, MachineError> {
    smbram_kind(c, i)?;
    let y = |k: usize| format!("Y{k}");
    let entry = |j: usize| y(2 * j - 1);
    let root = format!("X{i}");
    let own = rm(i);
    let n = c.len();
    let mut eqs = vec![(root.clone(), ini(i, "Y1"))];
    for (k, ins) in c.instrs().iter().enumerate() {
        let j = k + 1;
        let next = entry(if j < n { j + 1 } else { j });
        eqs.push((entry(j), goto(ProcTerm::act(SYNC), &y(2 * j))));
        eqs.push((y(2 * j), work(ins, &own, &next, entry)));
    }
    Ok(ProcTerm::rec(&root, RecSpec::new(eqs)))
}

fn compose(
    progs: &[Program],
    one: fn(usize, &Program) -> Result<ProcTerm, MachineError>,
    op: fn(ProcTerm, ProcTerm) -> ProcTerm,
) -> Result<ProcTerm, MachineError> {
    let comps = progs.iter().enumerate().map(|(k, c)| one(k + 1, c)).collect::<Result<Vec<_>, _>>()?;
    ProcTerm::fold_left(comps, op).ok_or(MachineError::Empty)
}

/// `process_1(C_1) ∥ … ∥ process_n(C_n)`, nested to the left.
pub fn compile_apramp(progs: &[Program]) -> Result<ProcTerm, MachineError> {
    compose(progs, proc_of_smbram_async, ProcTerm::par)
}

/// The synchronous counterpart of [`compile_apramp`].
pub fn compile_spramp(progs: &[Program]) -> Result<ProcTerm, MachineError> {
    compose(progs, proc_of_smbram_sync, ProcTerm::sync_merge)
}

/// Orders names like `X2 < X10` by comparing digit runs numerically.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for k in 1..=bytes.len() {
            if k == bytes.len() || bytes[k].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..k]));
                start = k;
            }
        }
        out
    }
    let key = |s| {
        chunks(s)
            .into_iter()
            .map(|(digit, c)| {
                if digit {
                    let t = c.trim_start_matches('0');
                    (t.len(), t.to_string())
                } else {
                    (0, c.to_string())
                }
            })
            .collect::<Vec<_>>()
    };
    key(a).cmp(&key(b)).then_with(|| a.cmp(b))
}

/// Recovers the program of a RAMP term. Each equation becomes one
/// instruction; fall-through successors are laid out next to each other,
/// starting with the root's chain and then the remaining chains in
/// natural name order, except that a chain ending in an always-taken
/// jump goes last.
pub fn program_of_ramp(t: &ProcTerm) -> Result<Program, MachineError> {
    let (root, shapes) = ramp_shapes(t)?;
    let shape: BTreeMap<&str, &EqShape> = shapes.iter().map(|(x, s)| (x.as_str(), s)).collect();
    let fall = |x: &str| -> Option<String> {
        match shape[x] {
            EqShape::Op(_, z) => Some(z.clone()),
            EqShape::Test(_, _, z) => Some(z.clone()),
            _ => None,
        }
    };
    let not_in_image = |msg: String| MachineError::NotInImage(msg);

    let mut preds: HashMap<String, usize> = HashMap::new();
    for (x, _) in &shapes {
        if let Some(z) = fall(x) {
            if z != *x {
                *preds.entry(z).or_default() += 1;
            }
        }
    }
    if let Some((z, _)) = preds.iter().find(|(_, &n)| n > 1) {
        return Err(not_in_image(format!("`{z}` is the fall-through of several equations")));
    }

    let mut heads = vec![root.clone()];
    let mut rest: Vec<&str> =
        shapes.iter().map(|(x, _)| x.as_str()).filter(|x| *x != root && !preds.contains_key(*x)).collect();
    rest.sort_by(|a, b| natural_cmp(a, b));
    heads.extend(rest.into_iter().map(str::to_string));

    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut chains: Vec<(Vec<String>, bool)> = Vec::new();
    for head in heads {
        if seen.contains_key(&head) {
            continue;
        }
        let mut chain = Vec::new();
        let mut self_end = false;
        let mut cur = head;
        loop {
            if seen.insert(cur.clone(), ()).is_some() {
                return Err(not_in_image(format!("fall-through into `{cur}` is not sequential")));
            }
            chain.push(cur.clone());
            match fall(&cur) {
                None => break,
                Some(z) if z == cur => {
                    if !matches!(shape[cur.as_str()], EqShape::Test(..)) {
                        return Err(not_in_image(format!("`{cur}` loops onto itself")));
                    }
                    self_end = true;
                    break;
                }
                Some(z) => cur = z,
            }
        }
        chains.push((chain, self_end));
    }
    // the chain ending in an always-taken jump has to come last
    let ends = chains.iter().filter(|(_, e)| *e).count();
    if ends > 1 || (chains.len() > 1 && chains[0].1) {
        return Err(not_in_image("an always-taken final jump must be the last instruction".into()));
    }
    chains[1..].sort_by_key(|(_, e)| *e);
    let order: Vec<String> = chains.into_iter().flat_map(|(c, _)| c).collect();
    let pos: HashMap<String, usize> = order.iter().enumerate().map(|(k, x)| (x.clone(), k + 1)).collect();
    if order.len() != shapes.len() {
        return Err(not_in_image("fall-through cycle".into()));
    }
    let instrs = order
        .iter()
        .map(|x| match shape[x.as_str()] {
            EqShape::Op(o, _) => Instr::Op(o.clone()),
            EqShape::Test(p, z, _) => Instr::Jmp(p.clone(), pos[z]),
            _ => Instr::Halt,
        })
        .collect();
    Program::new(Kind::Bbram, instrs).map_err(|e| not_in_image(e.to_string()))
}

/// A partial bijection between the variables of two specifications.
#[derive(Clone, Default)]
struct Bij {
    fwd: HashMap<String, String>,
    bwd: HashMap<String, String>,
}

impl Bij {
    /// Records `a ↦ b`; `None` on conflict, `Some(true)` when new.
    fn bind(&mut self, a: &str, b: &str) -> Option<bool> {
        match (self.fwd.get(a), self.bwd.get(b)) {
            (Some(x), Some(y)) => (x == b && y == a).then_some(false),
            (None, None) => {
                self.fwd.insert(a.to_string(), b.to_string());
                self.bwd.insert(b.to_string(), a.to_string());
                Some(true)
            }
            _ => None,
        }
    }
}

fn body_eq(s: &ProcTerm, t: &ProcTerm, bij: &mut Bij, queue: &mut Vec<(String, String)>) -> bool {
    use ProcTerm::*;
    match (s, t) {
        (Var(a), Var(b)) => match bij.bind(a, b) {
            None => false,
            Some(fresh) => {
                if fresh {
                    queue.push((a.clone(), b.clone()));
                }
                true
            }
        },
        (Alt(a, b), Alt(c, d))
        | (Seq(a, b), Seq(c, d))
        | (Par(a, b), Par(c, d))
        | (LeftMerge(a, b), LeftMerge(c, d))
        | (CommMerge(a, b), CommMerge(c, d))
        | (SyncMerge(a, b), SyncMerge(c, d)) => body_eq(a, c, bij, queue) && body_eq(b, d, bij, queue),
        (Guard(c1, a), Guard(c2, b)) => c1 == c2 && body_eq(a, b, bij, queue),
        (Encap(h1, a), Encap(h2, b)) | (Abstr(h1, a), Abstr(h2, b)) => h1 == h2 && body_eq(a, b, bij, queue),
        (Eval(r1, a), Eval(r2, b)) => r1 == r2 && body_eq(a, b, bij, queue),
        (Proj(n1, a), Proj(n2, b)) => n1 == n2 && body_eq(a, b, bij, queue),
        (Rename(f1, a), Rename(f2, b)) => f1 == f2 && body_eq(a, b, bij, queue),
        (Rec(x, e), Rec(y, f)) => rec_alpha(x, e, y, f),
        _ => s == t,
    }
}

fn propagate(e: &RecSpec, f: &RecSpec, bij: &mut Bij, mut queue: Vec<(String, String)>) -> bool {
    while let Some((a, b)) = queue.pop() {
        let (Some(s), Some(t)) = (e.get(&a), f.get(&b)) else {
            return false;
        };
        if !body_eq(s, t, bij, &mut queue) {
            return false;
        }
    }
    true
}

fn solve(e: &RecSpec, f: &RecSpec, bij: Bij) -> bool {
    let Some(a) = e.vars().find(|x| !bij.fwd.contains_key(*x)) else {
        return true;
    };
    f.vars().filter(|y| !bij.bwd.contains_key(*y)).any(|b| {
        let mut trial = bij.clone();
        trial.bind(a, b);
        propagate(e, f, &mut trial, vec![(a.to_string(), b.to_string())]) && solve(e, f, trial)
    })
}

fn rec_alpha(x: &str, e: &RecSpec, y: &str, f: &RecSpec) -> bool {
    if e.eqs.len() != f.eqs.len() {
        return false;
    }
    let mut bij = Bij::default();
    bij.bind(x, y);
    propagate(e, f, &mut bij, vec![(x.to_string(), y.to_string())]) && solve(e, f, bij)
}

/// Structural equality up to a consistent renaming of the recursion
/// variables of each recursion constant.
pub fn alpha_equivalent(s: &ProcTerm, t: &ProcTerm) -> bool {
    body_eq(s, t, &mut Bij::default(), &mut Vec::new())
}
