//! Every equation instantiated with random small terms must relate
//! bisimilar processes.

use ramproc::gen::axioms;
use ramproc::semantics::SemError;
use rand::rngs::StdRng;
use rand::SeedableRng;

const INSTANCES: usize = 500;

#[test]
fn equations_hold_on_random_instances() {
    let mut failures = Vec::new();
    for (k, ax) in axioms().iter().enumerate() {
        let mut rng = StdRng::seed_from_u64(1000 + k as u64);
        let (mut done, mut tries) = (0, 0);
        while done < INSTANCES {
            tries += 1;
            assert!(tries < 4 * INSTANCES, "{}: too many oversized instances", ax.name);
            let inst = (ax.instantiate)(&mut rng);
            match inst.check(5_000) {
                Ok(true) => done += 1,
                Ok(false) => {
                    done += 1;
                    failures.push(format!("{}: {}  =  {}", ax.name, inst.lhs, inst.rhs));
                }
                Err(SemError::Exploded(_)) => {}
                Err(e) => panic!("{}: {e} on {} = {}", ax.name, inst.lhs, inst.rhs),
            }
        }
    }
    let shown: Vec<_> = failures.iter().take(20).collect();
    assert!(failures.is_empty(), "{} failures:\n{shown:#?}", failures.len());
}

/// Equations that do not hold must be caught on some instance.
#[test]
fn false_equations_are_refuted() {
    use ramproc::gen::{term, valuation, Instance};
    use ramproc::terms::ProcTerm as P;
    type Make = fn(P, P) -> (P, P);
    let wrong: [(&str, Make); 5] = [
        ("x.y = y.x", |x, y| (P::seq(x.clone(), y.clone()), P::seq(y, x))),
        ("x.(y+z) = x.y + x.z", |x, y| {
            let z = P::act("c");
            (P::seq(x.clone(), P::alt(y.clone(), z.clone())), P::alt(P::seq(x.clone(), y), P::seq(x, z)))
        }),
        ("tau.x = x", |x, _| (P::seq(P::Silent, x.clone()), x)),
        ("x || y = x ||L y", |x, y| (P::par(x.clone(), y.clone()), P::left_merge(x, y))),
        ("x + y = x", |x, y| (P::alt(x.clone(), y), x)),
    ];
    let mut rng = StdRng::seed_from_u64(99);
    for (name, make) in wrong {
        let refuted = (0..300).any(|_| {
            let (lhs, rhs) = make(term(&mut rng, 2), term(&mut rng, 2));
            let inst = Instance { lhs, rhs, rho: valuation(&mut rng), outer_eval: true };
            inst.check(5_000) == Ok(false)
        });
        assert!(refuted, "{name} was never refuted");
    }
}
