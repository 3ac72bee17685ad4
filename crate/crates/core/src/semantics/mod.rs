//! Structural operational semantics of closed process terms under an
//! optional flexible variable valuation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::terms::{
    rename_label, unfold, ActionLabel, ActionSet, ProcTerm, RenameMap, TermError, Valuation, SYNC, SYNCED,
};

mod bisim;
mod lts;

pub use bisim::{rb_bisim, rb_bisim_states};
pub use lts::{
    build_lts, build_lts_with, depth, depth_by, eventually_halts, label_term, normalize_basic, BasicTerm,
    Edge, Lts, Summand,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("condition not decidable without valuation: {0}")]
    Term(#[from] TermError),
    #[error("free recursion variable `{0}`")]
    FreeVariable(String),
    #[error("unguarded recursion through `{0}`")]
    Unguarded(String),
    #[error("exploded: more than {0} states")]
    Exploded(usize),
    #[error("depth undefined: the transition system has a cycle")]
    Cyclic,
    #[error("no finite basic form: the transition system has a cycle")]
    NoBasicForm,
}

/// The communication function: unordered pairs of action names and their
/// result. Pairs not listed communicate to `δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comm(BTreeMap<(String, String), String>);

impl Comm {
    pub fn none() -> Self {
        Comm(BTreeMap::new())
    }

    pub fn with(mut self, a: &str, b: &str, c: &str) -> Self {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.0.insert((key.0.to_string(), key.1.to_string()), c.to_string());
        self
    }

    pub fn get(&self, a: &str, b: &str) -> Option<&str> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.0.get(&(key.0.to_string(), key.1.to_string())).map(String::as_str)
    }

    /// Result of a simultaneous pair of steps, if any.
    pub fn combine(&self, l: &ActionLabel, r: &ActionLabel) -> Option<ActionLabel> {
        match (l, r) {
            (ActionLabel::Plain(a), ActionLabel::Plain(b)) => {
                self.get(a, b).map(|c| ActionLabel::Plain(c.to_string()))
            }
            (ActionLabel::Data(a, xs), ActionLabel::Data(b, ys)) if xs == ys => {
                self.get(a, b).map(|c| ActionLabel::Data(c.to_string(), xs.clone()))
            }
            _ => None,
        }
    }
}

impl Default for Comm {
    fn default() -> Self {
        Comm::none().with(SYNC, SYNC, SYNCED)
    }
}

/// One outgoing transition. `prov` holds the flexible variables mentioned
/// by the action term that produced the label; `env` is the valuation of
/// the enclosing evaluation context after the step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trans {
    pub label: ActionLabel,
    pub prov: BTreeSet<String>,
    pub next: ProcTerm,
    pub env: Option<Valuation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Steps {
    pub success: bool,
    pub trans: Vec<Trans>,
}

const UNFOLD_LIMIT: u32 = 128;

/// All transitions of `t` and whether it can terminate successfully.
pub fn step(t: &ProcTerm, env: Option<&Valuation>, comm: &Comm) -> Result<Steps, SemError> {
    let mut fuel = UNFOLD_LIMIT;
    step_in(t, env, comm, &mut fuel)
}

/// `ρ_f(∂{sync}(ρ_f(t) ∥ ρ_f(t')))` with `f(synced) = sync`.
pub fn sync_merge_expand(t: &ProcTerm, u: &ProcTerm) -> ProcTerm {
    let f: RenameMap = [(SYNCED.to_string(), SYNC.to_string())].into();
    let h = ActionSet::listed([ActionLabel::plain(SYNC)]);
    ProcTerm::rename(
        f.clone(),
        ProcTerm::encap(
            h,
            ProcTerm::par(ProcTerm::rename(f.clone(), t.clone()), ProcTerm::rename(f, u.clone())),
        ),
    )
}

fn seq_after(x: ProcTerm, y: &Arc<ProcTerm>) -> ProcTerm {
    match x {
        ProcTerm::Empty => (**y).clone(),
        x => ProcTerm::Seq(Arc::new(x), y.clone()),
    }
}

fn par_of(x: ProcTerm, y: ProcTerm) -> ProcTerm {
    match (x, y) {
        (ProcTerm::Empty, y) => y,
        (x, ProcTerm::Empty) => x,
        (x, y) => ProcTerm::par(x, y),
    }
}

/// Rebuilds a unary context around a successor; contexts around `ε` are
/// dropped since they behave as `ε`.
fn wrap(x: ProcTerm, f: impl FnOnce(Arc<ProcTerm>) -> ProcTerm) -> ProcTerm {
    match x {
        ProcTerm::Empty => ProcTerm::Empty,
        x => f(Arc::new(x)),
    }
}

fn single(label: ActionLabel, prov: BTreeSet<String>, env: Option<&Valuation>) -> Steps {
    Steps { success: false, trans: vec![Trans { label, prov, next: ProcTerm::Empty, env: env.cloned() }] }
}

fn comm_steps(l: &Steps, r: &Steps, comm: &Comm, env: Option<&Valuation>) -> Vec<Trans> {
    let mut out = Vec::new();
    for a in &l.trans {
        for b in &r.trans {
            if let Some(label) = comm.combine(&a.label, &b.label) {
                out.push(Trans {
                    label,
                    prov: a.prov.union(&b.prov).cloned().collect(),
                    next: par_of(a.next.clone(), b.next.clone()),
                    env: env.cloned(),
                });
            }
        }
    }
    out
}

fn step_in(t: &ProcTerm, env: Option<&Valuation>, comm: &Comm, fuel: &mut u32) -> Result<Steps, SemError> {
    use ProcTerm::*;
    Ok(match t {
        Empty => Steps { success: true, trans: vec![] },
        Dead => Steps::default(),
        Silent => single(ActionLabel::Tau, BTreeSet::new(), env),
        Act(a) => single(ActionLabel::Plain(a.clone()), BTreeSet::new(), env),
        DataAct(a, es) => {
            let mut prov = BTreeSet::new();
            let mut args = Vec::with_capacity(es.len());
            for e in es {
                e.collect_flex(&mut prov);
                args.push(e.eval(env)?);
            }
            single(ActionLabel::Data(a.clone(), args), prov, env)
        }
        Assign(v, e) => {
            let m = e.eval(env)?;
            let mut prov = BTreeSet::new();
            e.collect_flex(&mut prov);
            prov.insert(v.clone());
            let env2 = env.map(|rho| rho.clone().with(v, m.clone()));
            Steps {
                success: false,
                trans: vec![Trans { label: ActionLabel::Assign(v.clone(), m), prov, next: Empty, env: env2 }],
            }
        }
        Alt(x, y) => {
            let mut a = step_in(x, env, comm, fuel)?;
            let b = step_in(y, env, comm, fuel)?;
            a.success |= b.success;
            a.trans.extend(b.trans);
            a
        }
        Seq(x, y) => {
            let a = step_in(x, env, comm, fuel)?;
            let mut trans: Vec<Trans> =
                a.trans.into_iter().map(|tr| Trans { next: seq_after(tr.next, y), ..tr }).collect();
            let mut success = false;
            if a.success {
                let b = step_in(y, env, comm, fuel)?;
                success = b.success;
                trans.extend(b.trans);
            }
            Steps { success, trans }
        }
        Guard(c, x) => {
            if c.eval(env)? {
                step_in(x, env, comm, fuel)?
            } else {
                Steps::default()
            }
        }
        Par(x, y) | LeftMerge(x, y) | CommMerge(x, y) => {
            let l = step_in(x, env, comm, fuel)?;
            let r = step_in(y, env, comm, fuel)?;
            let mut trans = Vec::new();
            if !matches!(t, CommMerge(..)) {
                for tr in &l.trans {
                    trans.push(Trans { next: par_of(tr.next.clone(), (**y).clone()), ..tr.clone() });
                }
            }
            if matches!(t, Par(..)) {
                for tr in &r.trans {
                    trans.push(Trans { next: par_of((**x).clone(), tr.next.clone()), ..tr.clone() });
                }
            }
            if !matches!(t, LeftMerge(..)) {
                trans.extend(comm_steps(&l, &r, comm, env));
            }
            Steps { success: matches!(t, Par(..)) && l.success && r.success, trans }
        }
        Encap(h, x) => {
            let a = step_in(x, env, comm, fuel)?;
            Steps {
                success: a.success,
                trans: a
                    .trans
                    .into_iter()
                    .filter(|tr| !h.contains(&tr.label, &tr.prov))
                    .map(|tr| Trans { next: wrap(tr.next, |n| Encap(h.clone(), n)), ..tr })
                    .collect(),
            }
        }
        Abstr(i, x) => {
            let a = step_in(x, env, comm, fuel)?;
            Steps {
                success: a.success,
                trans: a
                    .trans
                    .into_iter()
                    .map(|tr| {
                        let next = wrap(tr.next, |n| Abstr(i.clone(), n));
                        if !tr.label.is_tau() && i.contains(&tr.label, &tr.prov) {
                            // a hidden assignment leaves the valuation alone
                            Trans { label: ActionLabel::Tau, prov: BTreeSet::new(), next, env: env.cloned() }
                        } else {
                            Trans { next, ..tr }
                        }
                    })
                    .collect(),
            }
        }
        Eval(rho, x) => {
            let a = step_in(x, Some(rho), comm, fuel)?;
            Steps {
                success: a.success,
                trans: a
                    .trans
                    .into_iter()
                    .map(|tr| Trans {
                        label: tr.label,
                        prov: tr.prov,
                        next: ProcTerm::Eval(tr.env.unwrap_or_else(|| rho.clone()), Arc::new(tr.next)),
                        env: env.cloned(),
                    })
                    .collect(),
            }
        }
        Rec(x, spec) => {
            let (mut x, mut spec) = (x, spec);
            let mut body;
            loop {
                if *fuel == 0 {
                    return Err(SemError::Unguarded(x.clone()));
                }
                *fuel -= 1;
                body = unfold(x, spec)?;
                match &body {
                    Rec(y, e) => (x, spec) = (y, e),
                    _ => break,
                }
            }
            step_in(&body, env, comm, fuel)?
        }
        Var(x) => return Err(SemError::FreeVariable(x.clone())),
        Proj(n, x) => {
            let a = step_in(x, env, comm, fuel)?;
            let n = *n;
            if n == 0 {
                let visible = a.trans.iter().any(|tr| !tr.label.is_tau());
                Steps {
                    success: a.success || visible,
                    trans: a
                        .trans
                        .into_iter()
                        .filter(|tr| tr.label.is_tau())
                        .map(|tr| Trans { next: wrap(tr.next, |m| Proj(0, m)), ..tr })
                        .collect(),
                }
            } else {
                Steps {
                    success: a.success,
                    trans: a
                        .trans
                        .into_iter()
                        .map(|tr| {
                            let k = if tr.label.is_tau() { n } else { n - 1 };
                            Trans { next: wrap(tr.next, |m| Proj(k, m)), ..tr }
                        })
                        .collect(),
                }
            }
        }
        Rename(f, x) => {
            let a = step_in(x, env, comm, fuel)?;
            Steps {
                success: a.success,
                trans: a
                    .trans
                    .into_iter()
                    .map(|tr| Trans {
                        label: rename_label(f, &tr.label),
                        next: wrap(tr.next, |m| Rename(f.clone(), m)),
                        ..tr
                    })
                    .collect(),
            }
        }
        SyncMerge(x, y) => step_in(&sync_merge_expand(x, y), env, comm, fuel)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;

    fn p(s: &str) -> ProcTerm {
        parse_term(s).unwrap()
    }

    fn labels(s: &Steps) -> Vec<String> {
        s.trans.iter().map(|t| t.label.to_string()).collect()
    }

    #[test]
    fn atoms() {
        let c = Comm::default();
        let s = step(&ProcTerm::Empty, None, &c).unwrap();
        assert!(s.success && s.trans.is_empty());
        let s = step(&ProcTerm::Dead, None, &c).unwrap();
        assert!(!s.success && s.trans.is_empty());
        let s = step(&p("a . b"), None, &c).unwrap();
        assert_eq!(labels(&s), ["a"]);
        assert_eq!(s.trans[0].next, p("b"));
    }

    #[test]
    fn assignment_under_eval() {
        let t = p("eval{i=mem{0=11}}(d := i . e)");
        let s = step(&t, None, &Comm::default()).unwrap();
        assert_eq!(s.trans.len(), 1);
        assert_eq!(s.trans[0].label.to_string(), "d := mem{0=11}");
        assert_eq!(s.trans[0].next, p("eval{d=mem{0=11}, i=mem{0=11}}(e)"));
    }

    #[test]
    fn communication_three_ways() {
        let c = Comm::none().with("a", "b", "c");
        let s = step(&p("a || b"), None, &c).unwrap();
        assert_eq!(labels(&s), ["a", "b", "c"]);
        let s = step(&p("a ||L b"), None, &c).unwrap();
        assert_eq!(labels(&s), ["a"]);
        let s = step(&p("a | b"), None, &c).unwrap();
        assert_eq!(labels(&s), ["c"]);
    }

    #[test]
    fn data_communication_needs_equal_arguments() {
        let c = Comm::none().with("s", "r", "c");
        let s = step(&p("s(mem{0=1}) || r(mem{0=1})"), None, &c).unwrap();
        assert_eq!(labels(&s).last().unwrap(), "c(mem{0=1})");
        let s = step(&p("s(mem{0=1}) || r(mem{0=0})"), None, &c).unwrap();
        assert_eq!(s.trans.len(), 2);
        let s = step(&p("s(mem{0=1}) || r"), None, &c).unwrap();
        assert_eq!(s.trans.len(), 2);
    }

    #[test]
    fn non_ground_condition_errors() {
        let e = step(&p("(eq:0:#1(RM) = 1) :-> a"), None, &Comm::default()).unwrap_err();
        assert!(e.to_string().starts_with("condition not decidable without valuation"));
    }

    #[test]
    fn sync_merge_forces_handshake() {
        let c = Comm::default();
        let s = step(&p("sync . a ||sync sync . b"), None, &c).unwrap();
        assert_eq!(labels(&s), ["sync"]);
        let s = step(&p("sync ||sync eps"), None, &c).unwrap();
        assert!(!s.success && s.trans.is_empty());
        let s = step(&p("eps ||sync eps"), None, &c).unwrap();
        assert!(s.success);
    }

    #[test]
    fn projection() {
        let c = Comm::default();
        let s = step(&p("proj[0](a . b)"), None, &c).unwrap();
        assert!(s.success && s.trans.is_empty());
        let s = step(&p("proj[0](delta)"), None, &c).unwrap();
        assert!(!s.success);
        let s = step(&p("proj[1](a . b)"), None, &c).unwrap();
        assert_eq!(s.trans[0].next, p("proj[0](b)"));
        let s = step(&p("proj[1](tau . b)"), None, &c).unwrap();
        assert_eq!(s.trans[0].next, p("proj[1](b)"));
    }

    #[test]
    fn hidden_assignment_keeps_valuation() {
        let t = p("eval{}(abstr{#mentions d}(d := mem{0=1} . e))");
        let s = step(&t, None, &Comm::default()).unwrap();
        assert_eq!(s.trans[0].label, ActionLabel::Tau);
        assert_eq!(s.trans[0].next, p("eval{}(abstr{#mentions d}(e))"));
    }

    #[test]
    fn unguarded_recursion_is_reported() {
        let e = step(&p("rec X {X = X}"), None, &Comm::default()).unwrap_err();
        assert_eq!(e, SemError::Unguarded("X".into()));
    }
}
