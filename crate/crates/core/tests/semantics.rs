//! Operational semantics against independent reference computations.

use std::collections::HashSet;

use num_bigint::BigUint;
use ramproc::gen;
use ramproc::machines::{proc_of_bbram, Kind};
use ramproc::par::Exec;
use ramproc::samples::{abs_diff_term, division_term, ij_valuation};
use ramproc::semantics::{
    build_lts, build_lts_with, depth, eventually_halts, normalize_basic, rb_bisim, Comm, Lts, SemError,
};
use ramproc::terms::{unfold, ActionLabel, ProcTerm, Valuation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Rooted branching bisimilarity as a greatest fixpoint over pairs of
/// states, checked directly against the transfer conditions.
fn naive_rb_bisim(l1: &Lts, l2: &Lts) -> bool {
    let off = l1.num_states();
    let n = off + l2.num_states();
    let mut succ: Vec<Vec<(ActionLabel, usize)>> = vec![Vec::new(); n];
    let mut ok = vec![false; n];
    for (l, base) in [(l1, 0), (l2, off)] {
        for s in 0..l.num_states() {
            ok[base + s] = l.success[s];
            succ[base + s] = l.outgoing(s).map(|e| (e.label.clone(), e.dst + base)).collect();
        }
    }
    let tau_closure: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            let mut seen = vec![s];
            let mut k = 0;
            while k < seen.len() {
                for (a, d) in &succ[seen[k]] {
                    if a.is_tau() && !seen.contains(d) {
                        seen.push(*d);
                    }
                }
                k += 1;
            }
            seen
        })
        .collect();
    let mut rel: HashSet<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
    let simulates = |rel: &HashSet<(usize, usize)>, s: usize, t: usize| {
        let moves = succ[s].iter().all(|(a, s1)| {
            (a.is_tau() && rel.contains(&(*s1, t)))
                || tau_closure[t].iter().any(|&t0| {
                    rel.contains(&(s, t0))
                        && succ[t0].iter().any(|(b, t1)| a == b && rel.contains(&(*s1, *t1)))
                })
        });
        let term = !ok[s] || tau_closure[t].iter().any(|&t0| ok[t0] && rel.contains(&(s, t0)));
        moves && term
    };
    loop {
        let bad: Vec<_> =
            rel.iter().copied().filter(|&(s, t)| !simulates(&rel, s, t) || !simulates(&rel, t, s)).collect();
        if bad.is_empty() {
            break;
        }
        for p in bad {
            rel.remove(&p);
        }
    }
    let (r1, r2) = (0, off);
    let root = |x: usize, y: usize| {
        succ[x].iter().all(|(a, x1)| succ[y].iter().any(|(b, y1)| a == b && rel.contains(&(*x1, *y1))))
    };
    ok[r1] == ok[r2] && root(r1, r2) && root(r2, r1)
}

fn lts(t: &ProcTerm, rho: &Valuation) -> Result<Lts, SemError> {
    build_lts_with(&ProcTerm::eval(rho.clone(), t.clone()), &gen::comm(), 400, Exec::Sequential)
}

#[test]
fn bisimilarity_agrees_with_fixpoint_oracle() {
    let mut rng = StdRng::seed_from_u64(5);
    let axioms = gen::axioms();
    let (mut equal, mut total) = (0, 0);
    while total < 600 {
        let rho = gen::valuation(&mut rng);
        let (x, y) = if rng.gen_bool(0.5) {
            let inst = (axioms[rng.gen_range(0..axioms.len())].instantiate)(&mut rng);
            if !inst.outer_eval {
                continue;
            }
            (inst.lhs, inst.rhs)
        } else {
            let x = gen::term(&mut rng, 2);
            let y = match rng.gen_range(0..4) {
                0 => ProcTerm::seq(ProcTerm::Silent, x.clone()),
                1 => ProcTerm::alt(x.clone(), gen::term(&mut rng, 1)),
                2 => ProcTerm::seq(gen::alpha(&mut rng, false, true, false), x.clone()),
                _ => gen::term(&mut rng, 2),
            };
            (x, y)
        };
        let (Ok(a), Ok(b)) = (lts(&x, &rho), lts(&y, &rho)) else {
            continue;
        };
        total += 1;
        let fast = rb_bisim(&a, &b);
        equal += usize::from(fast);
        assert_eq!(fast, naive_rb_bisim(&a, &b), "{x}  vs  {y}");
    }
    assert!(equal > 100 && equal < 550, "unbalanced sample: {equal} equal");
}

#[test]
fn recursion_equals_its_unfolding() {
    let mut rng = StdRng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 100 {
        let c = gen::program(&mut rng, Kind::Bbram, 6);
        let ProcTerm::Rec(_, spec) = proc_of_bbram(&c).unwrap() else { unreachable!() };
        let rho = Valuation::new().with("RM", gen::memory(&mut rng, 4, 3));
        for x in spec.vars() {
            let rec = ProcTerm::rec(x, spec.clone());
            let unfolded = unfold(x, &spec).unwrap();
            if let (Ok(a), Ok(b)) = (build_lts(&rec, &rho, 300), build_lts(&unfolded, &rho, 300)) {
                assert!(rb_bisim(&a, &b), "{x} in {c}");
                checked += 1;
            }
        }
    }
}

#[test]
fn projection_cuts_at_depth() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 300 {
        let t = gen::term(&mut rng, 3);
        let rho = gen::valuation(&mut rng);
        let Ok(l) = lts(&t, &rho) else { continue };
        let Ok(d) = depth(&l) else { continue };
        checked += 1;
        for n in [d, d + 1] {
            let p = lts(&ProcTerm::proj(n, t.clone()), &rho).unwrap();
            assert!(rb_bisim(&p, &l), "proj[{n}]({t}) with depth {d}");
        }
        if d > 0 {
            let p = lts(&ProcTerm::proj(d - 1, t.clone()), &rho).unwrap();
            assert!(!rb_bisim(&p, &l), "proj[{}]({t})", d - 1);
            assert_eq!(depth(&p).unwrap(), d - 1);
        }
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

/// Number of paths from the initial state to a terminal state.
fn count_runs(l: &Lts) -> BigUint {
    let order = l.topo_order().expect("acyclic");
    let mut runs = vec![BigUint::from(0u32); l.num_states()];
    for &s in order.iter().rev() {
        runs[s] = if l.is_terminal(s) {
            BigUint::from(1u32)
        } else {
            l.outgoing(s).map(|e| runs[e.dst].clone()).sum()
        };
    }
    runs[Lts::INITIAL].clone()
}

#[test]
fn interleavings_are_counted_by_binomials() {
    let chain =
        |p: &str, k: u64| ProcTerm::chain((1..=k).map(|i| ProcTerm::act(&format!("{p}{i}"))).collect());
    for m in 0..=4u64 {
        for n in 0..=4u64 {
            let t = ProcTerm::par(chain("a", m), chain("b", n));
            let l = build_lts_with(&t, &Comm::none(), 1000, Exec::default()).unwrap();
            assert_eq!(count_runs(&l), binomial(m + n, m), "m={m} n={n}");
            assert_eq!(l.num_states() as u64, (m + 1) * (n + 1));
            assert_eq!(depth(&l).unwrap(), m + n);
        }
    }
}

#[test]
fn worked_examples_normalize_exactly() {
    let b = normalize_basic(&abs_diff_term(), &ij_valuation(11, 3), 100).unwrap();
    let chain: Vec<String> = b.as_chain().unwrap().iter().map(|a| a.to_string()).collect();
    assert_eq!(chain, ["d := mem{0=1101}", "d := mem{0=0001}"]);

    let b = normalize_basic(&division_term(), &ij_valuation(11, 3), 100).unwrap();
    let chain: Vec<String> = b.as_chain().unwrap().iter().map(|a| a.to_string()).collect();
    let want: Vec<String> = [("q", 0), ("r", 11), ("q", 1), ("r", 8), ("q", 2), ("r", 5), ("q", 3), ("r", 2)]
        .iter()
        .map(|(v, n)| format!("{v} := {}", ramproc::samples::nat(*n)))
        .collect();
    assert_eq!(chain, want);
    let l = build_lts(&division_term(), &ij_valuation(11, 3), 100).unwrap();
    assert!(eventually_halts(&l));
    let end = l.terminal_states().next().unwrap();
    let rho = l.valuation(end).unwrap();
    assert_eq!(rho.get("q").get_u64(0).to_string(), "11");
    assert_eq!(rho.get("r").get_u64(0).to_string(), "01");
}

#[test]
fn parallel_and_sequential_exploration_agree() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let t = ProcTerm::eval(gen::valuation(&mut rng), gen::term(&mut rng, 3));
        let a = build_lts_with(&t, &gen::comm(), 2000, Exec::Parallel);
        let b = build_lts_with(&t, &gen::comm(), 2000, Exec::Sequential);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.states, b.states);
                assert_eq!(a.edges, b.edges);
            }
            (a, b) => assert_eq!(a.err(), b.err()),
        }
    }
}
