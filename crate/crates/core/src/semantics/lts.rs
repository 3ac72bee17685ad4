use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{step, Comm, SemError};
use crate::par::{self, Exec};
use crate::terms::{ActionLabel, Cond, DataExpr, ProcTerm, Valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub label: ActionLabel,
    pub dst: usize,
    pub prov: BTreeSet<String>,
}

/// A finite labelled transition system with a termination predicate.
/// State 0 is initial and states are numbered in breadth-first order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    pub states: Vec<ProcTerm>,
    pub success: Vec<bool>,
    pub edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

impl Lts {
    pub const INITIAL: usize = 0;

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = &Edge> {
        self.out[s].iter().map(|&e| &self.edges[e])
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.out[s].is_empty()
    }

    /// Valuation carried by a state of the form `eval{ρ}(t)`.
    pub fn valuation(&self, s: usize) -> Option<&Valuation> {
        match &self.states[s] {
            ProcTerm::Eval(rho, _) => Some(rho),
            _ => None,
        }
    }

    /// States with no outgoing transitions.
    pub fn terminal_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&s| self.is_terminal(s))
    }

    /// Topological order of the states, or `None` when there is a cycle.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let n = self.num_states();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.dst] += 1;
        }
        let mut stack: Vec<usize> = (0..n).rev().filter(|&s| indeg[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = stack.pop() {
            order.push(s);
            for e in self.outgoing(s) {
                indeg[e.dst] -= 1;
                if indeg[e.dst] == 0 {
                    stack.push(e.dst);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct State {
            id: usize,
            success: bool,
            term: String,
        }
        #[derive(Serialize)]
        struct Tr {
            src: usize,
            label: String,
            dst: usize,
        }
        #[derive(Serialize)]
        struct Doc {
            initial: usize,
            states: Vec<State>,
            edges: Vec<Tr>,
        }
        let doc = Doc {
            initial: Self::INITIAL,
            states: (0..self.num_states())
                .map(|id| State { id, success: self.success[id], term: self.states[id].to_string() })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Tr { src: e.src, label: e.label.to_string(), dst: e.dst })
                .collect(),
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph lts {\n  init [shape=point];\n  init -> 0;\n");
        for id in 0..self.num_states() {
            let shape = if self.success[id] { "doublecircle" } else { "circle" };
            s.push_str(&format!("  {id} [shape={shape}];\n"));
        }
        for e in &self.edges {
            let label = e.label.to_string().replace('\\', "\\\\").replace('"', "\\\"");
            s.push_str(&format!("  {} -> {} [label=\"{label}\"];\n", e.src, e.dst));
        }
        s.push_str("}\n");
        s
    }
}

/// Reachable transition system of `eval{ρ}(t)` with the default
/// communication function.
pub fn build_lts(t: &ProcTerm, rho: &Valuation, max_states: usize) -> Result<Lts, SemError> {
    build_lts_with(&ProcTerm::eval(rho.clone(), t.clone()), &Comm::default(), max_states, Exec::default())
}

/// Reachable transition system of `t` itself. Each breadth-first level is
/// stepped with `exec`; results are merged in frontier order so the
/// numbering does not depend on the strategy.
pub fn build_lts_with(t: &ProcTerm, comm: &Comm, max_states: usize, exec: Exec) -> Result<Lts, SemError> {
    let mut states = vec![t.clone()];
    let mut index: HashMap<ProcTerm, usize> = HashMap::from([(t.clone(), 0)]);
    let mut success = vec![false];
    let mut edges = Vec::new();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let results = par::map(exec, &frontier, |&s| step(&states[s], None, comm));
        let mut next = Vec::new();
        for (&s, res) in frontier.iter().zip(results) {
            let steps = res?;
            success[s] = steps.success;
            let mut seen = BTreeSet::new();
            for tr in steps.trans {
                let dst = match index.get(&tr.next) {
                    Some(&d) => d,
                    None => {
                        let d = states.len();
                        if d >= max_states {
                            return Err(SemError::Exploded(d));
                        }
                        index.insert(tr.next.clone(), d);
                        states.push(tr.next);
                        success.push(false);
                        out.push(Vec::new());
                        next.push(d);
                        d
                    }
                };
                if seen.insert((tr.label.clone(), dst)) {
                    out[s].push(edges.len());
                    edges.push(Edge { src: s, label: tr.label, dst, prov: tr.prov });
                }
            }
        }
        frontier = next;
    }
    Ok(Lts { states, success, edges, out })
}

/// Every maximal path is finite and ends in a successfully terminating
/// state.
pub fn eventually_halts(l: &Lts) -> bool {
    l.topo_order().is_some() && l.terminal_states().all(|s| l.success[s])
}

/// Maximum total weight of a path from the initial state.
pub fn depth_by(l: &Lts, weight: impl Fn(&Edge) -> u64) -> Result<u64, SemError> {
    let order = l.topo_order().ok_or(SemError::Cyclic)?;
    let mut d = vec![0u64; l.num_states()];
    for &s in order.iter().rev() {
        d[s] = l.outgoing(s).map(|e| weight(e) + d[e.dst]).max().unwrap_or(0);
    }
    Ok(d[Lts::INITIAL])
}

/// Maximum number of non-`τ` actions on a path.
pub fn depth(l: &Lts) -> Result<u64, SemError> {
    depth_by(l, |e| u64::from(!e.label.is_tau()))
}

/// A basic term: alternatives of `True :-> ε` and `True :-> α . t`.
/// The empty alternative is `δ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasicTerm(pub Vec<Summand>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Summand {
    Halt,
    Step(ActionLabel, Arc<BasicTerm>),
}

impl BasicTerm {
    /// The action sequence when the term is a single chain ending in `ε`.
    pub fn as_chain(&self) -> Option<Vec<ActionLabel>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur.0.as_slice() {
                [Summand::Halt] => return Some(out),
                [Summand::Step(a, rest)] => {
                    out.push(a.clone());
                    cur = rest;
                }
                _ => return None,
            }
        }
    }

    pub fn to_term(&self) -> ProcTerm {
        ProcTerm::sum(
            self.0
                .iter()
                .map(|s| match s {
                    Summand::Halt => ProcTerm::guard(Cond::True, ProcTerm::Empty),
                    Summand::Step(a, rest) => {
                        ProcTerm::guard(Cond::True, ProcTerm::seq(label_term(a), rest.to_term()))
                    }
                })
                .collect(),
        )
    }
}

impl fmt::Display for BasicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// The closed action term that performs exactly `a`.
pub fn label_term(a: &ActionLabel) -> ProcTerm {
    match a {
        ActionLabel::Tau => ProcTerm::Silent,
        ActionLabel::Plain(n) => ProcTerm::act(n),
        ActionLabel::Data(n, args) => {
            ProcTerm::DataAct(n.clone(), args.iter().cloned().map(DataExpr::Lit).collect())
        }
        ActionLabel::Assign(v, m) => ProcTerm::assign(v, DataExpr::Lit(m.clone())),
    }
}

/// Basic form of `eval{ρ}(t)`, read off its acyclic transition system.
pub fn normalize_basic(t: &ProcTerm, rho: &Valuation, bound: usize) -> Result<BasicTerm, SemError> {
    let l = build_lts(t, rho, bound)?;
    let order = l.topo_order().ok_or(SemError::NoBasicForm)?;
    let mut memo: Vec<Option<Arc<BasicTerm>>> = vec![None; l.num_states()];
    for &s in order.iter().rev() {
        let mut sums = Vec::new();
        if l.success[s] {
            sums.push(Summand::Halt);
        }
        for e in l.outgoing(s) {
            let rest = memo[e.dst].clone().expect("successors come first");
            sums.push(Summand::Step(e.label.clone(), rest));
        }
        memo[s] = Some(Arc::new(BasicTerm(sums)));
    }
    Ok((*memo[Lts::INITIAL].take().expect("initial state exists")).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;

    fn p(s: &str) -> ProcTerm {
        parse_term(s).unwrap()
    }

    fn lts(s: &str) -> Lts {
        build_lts(&p(s), &Valuation::new(), 10_000).unwrap()
    }

    #[test]
    fn empty_process() {
        let l = build_lts(&ProcTerm::Empty, &Valuation::new(), 10).unwrap();
        assert_eq!((l.num_states(), l.num_edges()), (1, 0));
        assert!(l.success[0]);
        assert!(eventually_halts(&l));
        assert_eq!(depth(&l), Ok(0));
    }

    #[test]
    fn interleaving_diamond() {
        let l = lts("x := mem{0=1} . x := mem{0=0} || y := mem{0=1} . y := mem{0=0}");
        assert_eq!((l.num_states(), l.num_edges()), (9, 12));
        assert_eq!(depth(&l), Ok(4));
    }

    #[test]
    fn halting_and_depth() {
        assert!(!eventually_halts(&lts("rec X {X = True :-> a . X}")));
        assert!(!eventually_halts(&lts("a . delta")));
        assert_eq!(depth(&lts("a . (tau . b)")), Ok(2));
        assert_eq!(depth(&lts("a + b . c")), Ok(2));
        assert_eq!(depth(&lts("rec X {X = True :-> a . X}")), Err(SemError::Cyclic));
    }

    #[test]
    fn exploded() {
        let e = build_lts(&p("a . b . c . d"), &Valuation::new(), 3).unwrap_err();
        assert_eq!(e, SemError::Exploded(3));
    }

    #[test]
    fn basic_forms() {
        let v = Valuation::new();
        assert_eq!(normalize_basic(&ProcTerm::Dead, &v, 10).unwrap(), BasicTerm(vec![]));
        assert_eq!(normalize_basic(&p("True :-> eps + delta"), &v, 10).unwrap().to_string(), "True :-> eps");
        assert_eq!(normalize_basic(&p("rec X {X = True :-> a . X}"), &v, 10), Err(SemError::NoBasicForm));
        let b = normalize_basic(&p("a . b"), &v, 10).unwrap();
        assert_eq!(b.as_chain().unwrap(), vec![ActionLabel::plain("a"), ActionLabel::plain("b")]);
    }

    #[test]
    fn strategies_agree() {
        let t = p("a . b . c || d . (e + f) || g");
        let c = Comm::default();
        let x = build_lts_with(&t, &c, 1000, Exec::Parallel).unwrap();
        let y = build_lts_with(&t, &c, 1000, Exec::Sequential).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.to_dot(), y.to_dot());
    }

    #[test]
    fn exports() {
        let l = lts("a . b");
        let j = l.to_json();
        assert_eq!(j["initial"], 0);
        assert_eq!(j["edges"][0]["label"], "a");
        assert_eq!(j["states"].as_array().unwrap().len(), 3);
        assert!(l.to_dot().contains("0 -> 1 [label=\"a\"]"));
    }
}
