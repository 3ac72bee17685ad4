//! The process term language: data expressions over RAM memories,
//! conditions, process terms, recursion specifications and action labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::memory::{MemState, Reg};
use crate::ramops::{apply_ini, apply_op, apply_prop, apply_shared, OpError, RamOp};

mod parse;
mod print;
mod validate;

pub use parse::{parse_action_set, parse_cond, parse_data, parse_term, ParseError};
pub(crate) use validate::{ramp_shapes, EqShape};
pub use validate::{
    validate_apramp, validate_guarded, validate_linear, validate_ramp, validate_spramp, ShapeError,
};

/// The shared memory of every machine.
pub const RM: &str = "RM";
/// The synchronisation action of the synchronous model and its handshake.
pub const SYNC: &str = "sync";
pub const SYNCED: &str = "synced";

/// Name of the private memory of the `i`-th parallel component.
pub fn rm(i: usize) -> String {
    format!("RM_{i}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("flexible variable `{0}` cannot be evaluated without a valuation")]
    NotEvaluable(String),
    #[error("unknown recursion variable `{0}`")]
    UnknownVariable(String),
    #[error("operator `{0}` is not allowed in this position")]
    BadApply(String),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// Terms of the data sort. Every value is a RAM memory state.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataExpr {
    Flex(String),
    Lit(MemState),
    Upd(Box<DataExpr>, Reg, BitString),
    Apply1(RamOp, Box<DataExpr>),
    Apply2(RamOp, Box<DataExpr>, Box<DataExpr>),
}

impl DataExpr {
    pub fn flex(v: &str) -> Self {
        DataExpr::Flex(v.to_string())
    }

    pub fn apply1(o: RamOp, e: DataExpr) -> Self {
        DataExpr::Apply1(o, Box::new(e))
    }

    pub fn apply2(o: RamOp, private: DataExpr, shared: DataExpr) -> Self {
        DataExpr::Apply2(o, Box::new(private), Box::new(shared))
    }

    pub fn upd(self, i: u64, w: BitString) -> Self {
        DataExpr::Upd(Box::new(self), BigUint::from(i), w)
    }

    pub fn collect_flex(&self, out: &mut BTreeSet<String>) {
        match self {
            DataExpr::Flex(v) => {
                out.insert(v.clone());
            }
            DataExpr::Lit(_) => {}
            DataExpr::Upd(b, _, _) => b.collect_flex(out),
            DataExpr::Apply1(_, e) => e.collect_flex(out),
            DataExpr::Apply2(_, a, b) => {
                a.collect_flex(out);
                b.collect_flex(out);
            }
        }
    }

    pub fn eval(&self, env: Option<&Valuation>) -> Result<MemState, TermError> {
        match self {
            DataExpr::Flex(v) => env.map(|rho| rho.get(v)).ok_or_else(|| TermError::NotEvaluable(v.clone())),
            DataExpr::Lit(m) => Ok(m.clone()),
            DataExpr::Upd(b, i, w) => Ok(b.eval(env)?.override_reg(i, w.clone())),
            DataExpr::Apply1(o, e) => match o {
                RamOp::Ini(i) => Ok(apply_ini(i)?),
                _ if o.is_plain() => Ok(apply_op(o, &e.eval(env)?)?),
                _ => Err(TermError::BadApply(o.to_string())),
            },
            DataExpr::Apply2(o, p, s) => {
                if !o.is_shared() {
                    return Err(TermError::BadApply(o.to_string()));
                }
                Ok(apply_shared(o, &p.eval(env)?, &s.eval(env)?)?)
            }
        }
    }
}

/// Quantifier-free conditions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cond {
    True,
    False,
    /// `p(e) = b` for a comparison operator `p`.
    Prop(RamOp, DataExpr, bool),
    DataEq(DataExpr, DataExpr),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Implies(Box<Cond>, Box<Cond>),
}

impl Cond {
    pub fn prop(p: RamOp, e: DataExpr, b: bool) -> Self {
        Cond::Prop(p, e, b)
    }

    pub fn not(c: Cond) -> Self {
        Cond::Not(Box::new(c))
    }

    pub fn and(a: Cond, b: Cond) -> Self {
        Cond::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Cond, b: Cond) -> Self {
        Cond::Or(Box::new(a), Box::new(b))
    }

    pub fn collect_flex(&self, out: &mut BTreeSet<String>) {
        match self {
            Cond::True | Cond::False => {}
            Cond::Prop(_, e, _) => e.collect_flex(out),
            Cond::DataEq(a, b) => {
                a.collect_flex(out);
                b.collect_flex(out);
            }
            Cond::Not(c) => c.collect_flex(out),
            Cond::And(a, b) | Cond::Or(a, b) | Cond::Implies(a, b) => {
                a.collect_flex(out);
                b.collect_flex(out);
            }
        }
    }

    pub fn eval(&self, env: Option<&Valuation>) -> Result<bool, TermError> {
        Ok(match self {
            Cond::True => true,
            Cond::False => false,
            Cond::Prop(p, e, b) => {
                if !p.is_cmp() {
                    return Err(TermError::BadApply(p.to_string()));
                }
                apply_prop(p, &e.eval(env)?)? == *b
            }
            Cond::DataEq(a, b) => a.eval(env)? == b.eval(env)?,
            Cond::Not(c) => !c.eval(env)?,
            Cond::And(a, b) => a.eval(env)? && b.eval(env)?,
            Cond::Or(a, b) => a.eval(env)? || b.eval(env)?,
            Cond::Implies(a, b) => !a.eval(env)? || b.eval(env)?,
        })
    }
}

/// Flexible variable valuation. Variables not listed hold the all-`ε`
/// memory, and such entries are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Valuation(BTreeMap<String, MemState>);

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn get(&self, v: &str) -> MemState {
        self.0.get(v).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, v: &str, m: MemState) {
        if m.is_empty() {
            self.0.remove(v);
        } else {
            self.0.insert(v.to_string(), m);
        }
    }

    pub fn with(mut self, v: &str, m: MemState) -> Self {
        self.set(v, m);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &MemState)> {
        self.0.iter()
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A transition label of the operational semantics. Data is always
/// concrete here: labels come out of stepping with all data evaluated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionLabel {
    Tau,
    Plain(String),
    Data(String, Vec<MemState>),
    Assign(String, MemState),
}

impl ActionLabel {
    pub fn plain(a: &str) -> Self {
        ActionLabel::Plain(a.to_string())
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, ActionLabel::Tau)
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            ActionLabel::Plain(n) | ActionLabel::Data(n, _) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Debug for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Action sets for encapsulation and abstraction, given extensionally or
/// by a predicate. `prov` is the set of flexible variables occurring in
/// the action term that produced a label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionSet {
    Listed(Vec<ActionLabel>),
    /// Every action including `τ`.
    AllWithTau,
    /// Every non-`τ` action whose action term mentions the variable.
    Mentioning(String),
    /// Every non-`τ` action whose action term does not mention the variable.
    Avoiding(String),
    /// Every non-`τ` action except the named (plain or data) actions.
    AllBut(Vec<String>),
}

impl ActionSet {
    pub fn listed(labels: impl IntoIterator<Item = ActionLabel>) -> Self {
        let mut v: Vec<ActionLabel> = labels.into_iter().collect();
        v.sort();
        v.dedup();
        ActionSet::Listed(v)
    }

    pub fn contains(&self, label: &ActionLabel, prov: &BTreeSet<String>) -> bool {
        match self {
            ActionSet::Listed(ls) => ls.binary_search(label).is_ok(),
            ActionSet::AllWithTau => true,
            _ if label.is_tau() => false,
            ActionSet::Mentioning(v) => prov.contains(v),
            ActionSet::Avoiding(v) => !prov.contains(v),
            ActionSet::AllBut(names) => !label.name().is_some_and(|n| names.iter().any(|m| m == n)),
        }
    }
}

impl fmt::Debug for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Renaming of action names; `τ` and assignments are always fixed.
pub type RenameMap = BTreeMap<String, String>;

pub fn rename_label(f: &RenameMap, l: &ActionLabel) -> ActionLabel {
    match l {
        ActionLabel::Plain(a) => ActionLabel::Plain(f.get(a).unwrap_or(a).clone()),
        ActionLabel::Data(a, d) => ActionLabel::Data(f.get(a).unwrap_or(a).clone(), d.clone()),
        other => other.clone(),
    }
}

/// A recursive specification: equations in a fixed order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RecSpec {
    pub eqs: Vec<(String, ProcTerm)>,
}

/// Hashes the variable names only; states of one system share their
/// specifications, so hashing the bodies again for every state is wasted.
impl std::hash::Hash for RecSpec {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        for (x, _) in &self.eqs {
            x.hash(h);
        }
    }
}

impl RecSpec {
    pub fn new(eqs: Vec<(String, ProcTerm)>) -> Arc<Self> {
        Arc::new(RecSpec { eqs })
    }

    pub fn get(&self, x: &str) -> Option<&ProcTerm> {
        self.eqs.iter().find(|(n, _)| n == x).map(|(_, t)| t)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.eqs.iter().map(|(n, _)| n.as_str())
    }

    pub fn has(&self, x: &str) -> bool {
        self.get(x).is_some()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcTerm {
    Empty,
    Dead,
    Silent,
    Act(String),
    DataAct(String, Vec<DataExpr>),
    Assign(String, DataExpr),
    Alt(Arc<ProcTerm>, Arc<ProcTerm>),
    Seq(Arc<ProcTerm>, Arc<ProcTerm>),
    Par(Arc<ProcTerm>, Arc<ProcTerm>),
    LeftMerge(Arc<ProcTerm>, Arc<ProcTerm>),
    CommMerge(Arc<ProcTerm>, Arc<ProcTerm>),
    Encap(ActionSet, Arc<ProcTerm>),
    Abstr(ActionSet, Arc<ProcTerm>),
    Guard(Cond, Arc<ProcTerm>),
    Eval(Valuation, Arc<ProcTerm>),
    Rec(String, Arc<RecSpec>),
    /// A recursion variable inside the right-hand side of an equation.
    Var(String),
    Proj(u64, Arc<ProcTerm>),
    Rename(RenameMap, Arc<ProcTerm>),
    SyncMerge(Arc<ProcTerm>, Arc<ProcTerm>),
}

impl fmt::Debug for ProcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl ProcTerm {
    pub fn act(a: &str) -> Self {
        ProcTerm::Act(a.to_string())
    }
    pub fn var(x: &str) -> Self {
        ProcTerm::Var(x.to_string())
    }
    pub fn assign(v: &str, e: DataExpr) -> Self {
        ProcTerm::Assign(v.to_string(), e)
    }
    pub fn alt(a: ProcTerm, b: ProcTerm) -> Self {
        ProcTerm::Alt(Arc::new(a), Arc::new(b))
    }
    pub fn seq(a: ProcTerm, b: ProcTerm) -> Self {
        ProcTerm::Seq(Arc::new(a), Arc::new(b))
    }
    pub fn par(a: ProcTerm, b: ProcTerm) -> Self {
        ProcTerm::Par(Arc::new(a), Arc::new(b))
    }
    pub fn left_merge(a: ProcTerm, b: ProcTerm) -> Self {
        ProcTerm::LeftMerge(Arc::new(a), Arc::new(b))
    }
    pub fn comm_merge(a: ProcTerm, b: ProcTerm) -> Self {
        ProcTerm::CommMerge(Arc::new(a), Arc::new(b))
    }
    pub fn sync_merge(a: ProcTerm, b: ProcTerm) -> Self {
        ProcTerm::SyncMerge(Arc::new(a), Arc::new(b))
    }
    pub fn guard(c: Cond, t: ProcTerm) -> Self {
        ProcTerm::Guard(c, Arc::new(t))
    }
    pub fn encap(h: ActionSet, t: ProcTerm) -> Self {
        ProcTerm::Encap(h, Arc::new(t))
    }
    pub fn abstr(i: ActionSet, t: ProcTerm) -> Self {
        ProcTerm::Abstr(i, Arc::new(t))
    }
    pub fn eval(rho: Valuation, t: ProcTerm) -> Self {
        ProcTerm::Eval(rho, Arc::new(t))
    }
    pub fn proj(n: u64, t: ProcTerm) -> Self {
        ProcTerm::Proj(n, Arc::new(t))
    }
    pub fn rename(f: RenameMap, t: ProcTerm) -> Self {
        ProcTerm::Rename(f, Arc::new(t))
    }
    pub fn rec(x: &str, spec: Arc<RecSpec>) -> Self {
        ProcTerm::Rec(x.to_string(), spec)
    }

    /// Right-nested alternative composition; the empty sum is `δ`.
    pub fn sum(terms: Vec<ProcTerm>) -> Self {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => ProcTerm::Dead,
            Some(last) => it.fold(last, |acc, t| ProcTerm::alt(t, acc)),
        }
    }

    /// Right-nested sequential composition of the given terms.
    pub fn chain(terms: Vec<ProcTerm>) -> Self {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => ProcTerm::Empty,
            Some(last) => it.fold(last, |acc, t| ProcTerm::seq(t, acc)),
        }
    }

    /// Left-nested composition with the given binary constructor.
    pub fn fold_left(terms: Vec<ProcTerm>, op: fn(ProcTerm, ProcTerm) -> ProcTerm) -> Option<Self> {
        let mut it = terms.into_iter();
        let first = it.next()?;
        Some(it.fold(first, op))
    }

    /// True for atomic actions and `τ`.
    pub fn is_atomic_or_tau(&self) -> bool {
        matches!(self, ProcTerm::Silent | ProcTerm::Act(_) | ProcTerm::DataAct(..) | ProcTerm::Assign(..))
    }
}

/// Replaces every recursion variable of `spec` occurring free in `t` by the
/// corresponding recursion constant.
pub fn subst_rec(t: &ProcTerm, spec: &Arc<RecSpec>) -> Result<ProcTerm, TermError> {
    use ProcTerm::*;
    let sub = |x: &Arc<ProcTerm>| subst_rec(x, spec).map(Arc::new);
    Ok(match t {
        Var(y) => {
            if spec.has(y) {
                Rec(y.clone(), spec.clone())
            } else {
                return Err(TermError::UnknownVariable(y.clone()));
            }
        }
        Empty | Dead | Silent | Act(_) | DataAct(..) | Assign(..) | Rec(..) => t.clone(),
        Alt(a, b) => Alt(sub(a)?, sub(b)?),
        Seq(a, b) => Seq(sub(a)?, sub(b)?),
        Par(a, b) => Par(sub(a)?, sub(b)?),
        LeftMerge(a, b) => LeftMerge(sub(a)?, sub(b)?),
        CommMerge(a, b) => CommMerge(sub(a)?, sub(b)?),
        SyncMerge(a, b) => SyncMerge(sub(a)?, sub(b)?),
        Encap(h, a) => Encap(h.clone(), sub(a)?),
        Abstr(i, a) => Abstr(i.clone(), sub(a)?),
        Guard(c, a) => Guard(c.clone(), sub(a)?),
        Eval(r, a) => Eval(r.clone(), sub(a)?),
        Proj(n, a) => Proj(*n, sub(a)?),
        Rename(f, a) => Rename(f.clone(), sub(a)?),
    })
}

/// One RDP unfolding of `⟨x|spec⟩`.
pub fn unfold(x: &str, spec: &Arc<RecSpec>) -> Result<ProcTerm, TermError> {
    let rhs = spec.get(x).ok_or_else(|| TermError::UnknownVariable(x.to_string()))?;
    subst_rec(rhs, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mem(s: &str) -> MemState {
        s.parse().unwrap()
    }

    #[test]
    fn unfolding() {
        let e = RecSpec::new(vec![("X".into(), ProcTerm::guard(Cond::True, ProcTerm::Empty))]);
        assert_eq!(unfold("X", &e).unwrap(), ProcTerm::guard(Cond::True, ProcTerm::Empty));

        let e = RecSpec::new(vec![(
            "X".into(),
            ProcTerm::guard(Cond::True, ProcTerm::seq(ProcTerm::act("a"), ProcTerm::var("X"))),
        )]);
        assert_eq!(
            unfold("X", &e).unwrap(),
            ProcTerm::guard(Cond::True, ProcTerm::seq(ProcTerm::act("a"), ProcTerm::rec("X", e.clone())))
        );

        let e = RecSpec::new(vec![
            ("X".into(), ProcTerm::guard(Cond::True, ProcTerm::seq(ProcTerm::Silent, ProcTerm::var("Y")))),
            ("Y".into(), ProcTerm::guard(Cond::True, ProcTerm::Empty)),
        ]);
        assert_eq!(
            unfold("X", &e).unwrap(),
            ProcTerm::guard(Cond::True, ProcTerm::seq(ProcTerm::Silent, ProcTerm::rec("Y", e.clone())))
        );
        assert_eq!(unfold("Z", &e), Err(TermError::UnknownVariable("Z".into())));
    }

    #[test]
    fn data_evaluation() {
        let rho = Valuation::new().with("i", mem("mem{0=1101}"));
        let e = DataExpr::apply1("add:0:#1:0".parse().unwrap(), DataExpr::flex("i"));
        assert_eq!(e.eval(Some(&rho)).unwrap(), mem("mem{0=0011}"));
        assert!(matches!(e.eval(None), Err(TermError::NotEvaluable(_))));
        let ini = DataExpr::apply1("ini:#2".parse().unwrap(), DataExpr::flex("x"));
        assert_eq!(ini.eval(Some(&rho)).unwrap(), mem("mem{0=01}"));
        let bad = DataExpr::apply1("loa:@0:1".parse().unwrap(), DataExpr::flex("x"));
        assert!(matches!(bad.eval(Some(&rho)), Err(TermError::BadApply(_))));
        // unset variables hold the empty memory
        assert_eq!(DataExpr::flex("zz").eval(Some(&rho)).unwrap(), MemState::empty());
    }

    #[test]
    fn conditions() {
        let rho = Valuation::new().with("RM", mem("mem{1=01}"));
        let c = Cond::prop("gt:1:#1".parse().unwrap(), DataExpr::flex("RM"), true);
        assert!(c.eval(Some(&rho)).unwrap());
        assert!(!Cond::not(c.clone()).eval(Some(&rho)).unwrap());
        assert!(Cond::or(Cond::False, c.clone()).eval(Some(&rho)).unwrap());
        assert!(Cond::Implies(Box::new(Cond::False), Box::new(Cond::False)).eval(None).unwrap());
        assert!(c.eval(None).is_err());
    }

    #[test]
    fn valuation_drops_empty_memories() {
        let a = Valuation::new().with("RM_1", MemState::empty());
        assert_eq!(a, Valuation::new());
    }

    #[test]
    fn action_sets() {
        let none = BTreeSet::new();
        let prov: BTreeSet<String> = ["RM_1".to_string()].into();
        let assign = ActionLabel::Assign("RM".into(), MemState::empty());
        assert!(ActionSet::Mentioning("RM_1".into()).contains(&assign, &prov));
        assert!(!ActionSet::Avoiding("RM_1".into()).contains(&assign, &prov));
        assert!(!ActionSet::Avoiding("RM_1".into()).contains(&ActionLabel::Tau, &none));
        assert!(ActionSet::AllWithTau.contains(&ActionLabel::Tau, &none));
        let all_but = ActionSet::AllBut(vec![SYNC.into()]);
        assert!(!all_but.contains(&ActionLabel::plain(SYNC), &none));
        assert!(all_but.contains(&assign, &prov));
        let listed = ActionSet::listed([ActionLabel::plain("b"), ActionLabel::plain("a")]);
        assert!(listed.contains(&ActionLabel::plain("a"), &none));
        assert!(!listed.contains(&ActionLabel::plain("c"), &none));
    }
}
