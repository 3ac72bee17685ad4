//! Relations between the complexity measures, and the computation checker
//! on the bit-serial adder.

use ramproc::bits::{bin_arith, ArithOp, BitString};
use ramproc::complexity::{
    aputm, apwm, check_computes, input_valuation, inputs_up_to, is_of_complexity, measure, sputm, spwm, sutm,
    swm, AffineBound, ComplexityError, FunctionSpec, Measure, Status,
};
use ramproc::gen;
use ramproc::machines::{compile_apramp, compile_spramp, proc_of_bbram, Kind};
use ramproc::samples::{addition_program, broken_addition_program};
use ramproc::semantics::{build_lts, eventually_halts, SemError};
use ramproc::terms::{Valuation, RM};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const MAX: usize = 50_000;

#[test]
fn sequential_time_equals_work() {
    let mut rng = StdRng::seed_from_u64(2);
    let mut defined = 0;
    for _ in 0..500 {
        let t = proc_of_bbram(&gen::program(&mut rng, Kind::Bbram, 8)).unwrap();
        let rho = Valuation::new().with(RM, gen::memory(&mut rng, 4, 3));
        let (a, b) = (sutm(&t, &rho, 500), swm(&t, &rho, 500));
        assert_eq!(a, b);
        defined += usize::from(a.is_ok());
        let halts = build_lts(&t, &rho, 500).map(|l| eventually_halts(&l));
        match halts {
            Ok(h) => assert_eq!(h, a.is_ok()),
            Err(e) => assert_eq!(a, Err(ComplexityError::Sem(e))),
        }
    }
    assert!(defined > 200);
}

#[test]
fn asynchronous_time_is_sandwiched_by_work() {
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..300 {
        let deg = rng.gen_range(1..=3);
        let progs: Vec<_> = (0..deg)
            .map(|_| {
                let len = rng.gen_range(1..=3);
                gen::straight_line(&mut rng, Kind::Smbram, len)
            })
            .collect();
        let t = compile_apramp(&progs).unwrap();
        let rho = Valuation::new();
        let r = measure(&t, &rho, Measure::Aputm, MAX).unwrap();
        let w = apwm(&t, &rho, MAX).unwrap();
        assert!(r.value <= w);
        assert!(w <= r.per_component.iter().sum::<u64>());
        for (i, c) in progs.iter().enumerate() {
            assert_eq!(r.per_component[i], c.len() as u64, "component {}", i + 1);
        }
        if deg == 1 {
            assert_eq!(r.value, w);
        }
    }
}

#[test]
fn synchronous_counts_have_closed_forms() {
    let mut rng = StdRng::seed_from_u64(6);
    for deg in 1..=3usize {
        for len in 1..=3usize {
            for _ in 0..5 {
                let progs: Vec<_> =
                    (0..deg).map(|_| gen::straight_line(&mut rng, Kind::Smbram, len)).collect();
                let t = compile_spramp(&progs).unwrap();
                let rho = Valuation::new();
                assert_eq!(sputm(&t, &rho, MAX).unwrap(), len as u64, "deg {deg} len {len}");
                assert_eq!(spwm(&t, &rho, MAX).unwrap(), (deg * len) as u64);
                if deg <= 2 {
                    let a = compile_apramp(&progs).unwrap();
                    assert_eq!(aputm(&a, &rho, MAX).unwrap(), len as u64);
                }
            }
        }
    }
}

#[test]
fn unequal_synchronous_lengths_deadlock() {
    let mut rng = StdRng::seed_from_u64(7);
    let progs =
        [gen::straight_line(&mut rng, Kind::Smbram, 1), gen::straight_line(&mut rng, Kind::Smbram, 2)];
    let t = compile_spramp(&progs).unwrap();
    assert_eq!(sputm(&t, &Valuation::new(), MAX), Err(ComplexityError::Undefined));
}

#[test]
fn measures_need_their_class() {
    let c = addition_program();
    let t = proc_of_bbram(&c).unwrap();
    for m in [Measure::Aputm, Measure::Apwm, Measure::Sputm, Measure::Spwm] {
        assert!(matches!(measure(&t, &Valuation::new(), m, MAX), Err(ComplexityError::Class { .. })));
    }
    assert!(matches!(
        measure(&t, &Valuation::new(), Measure::Sutm, 3),
        Err(ComplexityError::Sem(SemError::Exploded(3)))
    ));
}

fn addition() -> FunctionSpec<'static> {
    FunctionSpec::new(2, |w: &[BitString]| Ok(Some(bin_arith(ArithOp::Add, &w[0], &w[1]))))
}

#[test]
fn adder_computes_addition_in_linear_time() {
    let t = proc_of_bbram(&addition_program()).unwrap();
    let inputs = inputs_up_to(2, 4);
    assert_eq!(inputs.len(), 31 * 31);
    let points: Vec<(u64, u64)> = inputs
        .iter()
        .map(|inp| {
            let n = inp.iter().map(|w| w.len() as u64).sum();
            (n, sutm(&t, &input_valuation(inp), MAX).unwrap())
        })
        .collect();
    let w = AffineBound::fit(&points);
    assert!(w.a > 0, "step counts should grow with the input: {w}");
    let v = check_computes(&t, &addition(), &w, &inputs, MAX);
    assert!(v.passed(), "{}", v.table());
    let v = is_of_complexity(&t, &addition(), &w, Measure::Sutm, &inputs, MAX).unwrap();
    assert!(v.passed());

    let tight = AffineBound { a: w.a, b: w.b - 1 };
    assert!(!check_computes(&t, &addition(), &tight, &inputs, MAX).passed());

    let broken = proc_of_bbram(&broken_addition_program()).unwrap();
    let v = check_computes(&broken, &addition(), &AffineBound::UNBOUNDED, &inputs, MAX);
    assert!(v.count(Status::Fail) >= 1);
}
