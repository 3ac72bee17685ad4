//! Time and work measures of the three machine models, and checkers for
//! "computes F in W steps" and "is of complexity V".

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::memory::MemState;
use crate::par::{self, Exec};
use crate::semantics::{build_lts, depth_by, eventually_halts, Edge, Lts, SemError};
use crate::terms::{
    rm, validate_apramp, validate_ramp, validate_spramp, ActionLabel, ProcTerm, Valuation, RM, SYNC,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexityError {
    #[error("measure {measure} requires {model} class")]
    Class { measure: Measure, model: Model },
    #[error("measure undefined: the process does not eventually halt")]
    Undefined,
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error("bad bound `{0}`: expected the form a*n+b")]
    Bound(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ramp,
    Apramp,
    Spramp,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Ramp => "RAMP",
            Model::Apramp => "APRAMP",
            Model::Spramp => "SPRAMP",
        })
    }
}

impl Model {
    /// Degree of `t` when it belongs to this class.
    pub fn degree(self, t: &ProcTerm) -> Option<usize> {
        match self {
            Model::Ramp => validate_ramp(t).then_some(1),
            Model::Apramp => validate_apramp(t).ok(),
            Model::Spramp => validate_spramp(t).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Sutm,
    Swm,
    Aputm,
    Apwm,
    Sputm,
    Spwm,
}

impl Measure {
    pub const ALL: [Measure; 6] =
        [Measure::Sutm, Measure::Swm, Measure::Aputm, Measure::Apwm, Measure::Sputm, Measure::Spwm];

    pub fn model(self) -> Model {
        match self {
            Measure::Sutm | Measure::Swm => Model::Ramp,
            Measure::Aputm | Measure::Apwm => Model::Apramp,
            Measure::Sputm | Measure::Spwm => Model::Spramp,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Sutm => "sutm",
            Measure::Swm => "swm",
            Measure::Aputm => "aputm",
            Measure::Apwm => "apwm",
            Measure::Sputm => "sputm",
            Measure::Spwm => "spwm",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = ComplexityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| ComplexityError::UnknownMeasure(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: Measure,
    pub value: u64,
    /// Per-component values; only filled in for `aputm`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_component: Vec<u64>,
    pub states: usize,
    pub transitions: usize,
}

fn is_sync(e: &Edge) -> bool {
    matches!(&e.label, ActionLabel::Plain(a) if a == SYNC)
}

/// Evaluates a measure on an already explored system of `eval{ρ}(t)`.
/// `degree` is the number of components for `aputm`.
pub fn measure_on(l: &Lts, m: Measure, degree: usize) -> Result<MeasureReport, ComplexityError> {
    if !eventually_halts(l) {
        return Err(ComplexityError::Undefined);
    }
    let visible = |e: &Edge| !e.label.is_tau();
    let mut per_component = Vec::new();
    let value = match m {
        Measure::Sutm | Measure::Swm | Measure::Apwm => depth_by(l, |e| u64::from(visible(e)))?,
        Measure::Aputm => {
            for i in 1..=degree {
                let own = rm(i);
                per_component.push(depth_by(l, |e| u64::from(visible(e) && e.prov.contains(&own)))?);
            }
            per_component.iter().copied().max().unwrap_or(0)
        }
        Measure::Sputm => depth_by(l, |e| u64::from(is_sync(e)))?,
        Measure::Spwm => depth_by(l, |e| u64::from(visible(e) && !is_sync(e)))?,
    };
    Ok(MeasureReport { measure: m, value, per_component, states: l.num_states(), transitions: l.num_edges() })
}

fn class_degree(t: &ProcTerm, m: Measure) -> Result<usize, ComplexityError> {
    m.model().degree(t).ok_or(ComplexityError::Class { measure: m, model: m.model() })
}

/// `M(t, ρ)`, defined iff `eval{ρ}(t)` eventually halts.
pub fn measure(
    t: &ProcTerm,
    rho: &Valuation,
    m: Measure,
    max_states: usize,
) -> Result<MeasureReport, ComplexityError> {
    let deg = class_degree(t, m)?;
    let l = build_lts(t, rho, max_states)?;
    measure_on(&l, m, deg)
}

macro_rules! measure_fns {
    ($($name:ident => $m:expr),*) => {$(
        pub fn $name(t: &ProcTerm, rho: &Valuation, max_states: usize) -> Result<u64, ComplexityError> {
            measure(t, rho, $m, max_states).map(|r| r.value)
        }
    )*};
}

measure_fns!(
    sutm => Measure::Sutm,
    swm => Measure::Swm,
    aputm => Measure::Aputm,
    apwm => Measure::Apwm,
    sputm => Measure::Sputm,
    spwm => Measure::Spwm
);

/// An affine bound `a*n + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineBound {
    pub a: u64,
    pub b: u64,
}

impl AffineBound {
    pub const UNBOUNDED: AffineBound = AffineBound { a: 0, b: u64::MAX };

    pub fn eval(&self, n: u64) -> u64 {
        self.a.saturating_mul(n).saturating_add(self.b)
    }

    /// The smallest slope that covers every rise between observed lengths,
    /// then the smallest offset covering every observation.
    pub fn fit(points: &[(u64, u64)]) -> AffineBound {
        let mut maxima: std::collections::BTreeMap<u64, u64> = Default::default();
        for &(n, m) in points {
            let e = maxima.entry(n).or_default();
            *e = (*e).max(m);
        }
        let pts: Vec<(u64, u64)> = maxima.into_iter().collect();
        let mut a = 0;
        for (k, &(n1, m1)) in pts.iter().enumerate() {
            for &(n2, m2) in &pts[k + 1..] {
                if m2 > m1 {
                    a = a.max((m2 - m1).div_ceil(n2 - n1));
                }
            }
        }
        let b = pts.iter().map(|&(n, m)| m.saturating_sub(a * n)).max().unwrap_or(0);
        AffineBound { a, b }
    }
}

impl fmt::Display for AffineBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*n+{}", self.a, self.b)
    }
}

impl FromStr for AffineBound {
    type Err = ComplexityError;

    /// Accepts `a*n+b`, `a*n`, `n+b`, `n` and `b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ComplexityError::Bound(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (mut a, mut b) = (0u64, 0u64);
        let mut seen_n = false;
        let mut seen_b = false;
        for term in compact.split('+') {
            if let Some(coef) = term.strip_suffix('n') {
                if seen_n {
                    return Err(bad());
                }
                seen_n = true;
                a = match coef.strip_suffix('*') {
                    Some(c) => c.parse().map_err(|_| bad())?,
                    None if coef.is_empty() => 1,
                    None => return Err(bad()),
                };
            } else {
                if seen_b {
                    return Err(bad());
                }
                seen_b = true;
                b = term.parse().map_err(|_| bad())?;
            }
        }
        Ok(AffineBound { a, b })
    }
}

pub type Oracle<'a> = dyn Fn(&[BitString]) -> Result<Option<BitString>, String> + Send + Sync + 'a;

/// A partial function on bit strings. The oracle returns `Ok(None)` where
/// the function is undefined and `Err` when it cannot answer.
pub struct FunctionSpec<'a> {
    pub arity: usize,
    pub oracle: Box<Oracle<'a>>,
}

impl<'a> FunctionSpec<'a> {
    pub fn new(
        arity: usize,
        oracle: impl Fn(&[BitString]) -> Result<Option<BitString>, String> + Send + Sync + 'a,
    ) -> Self {
        FunctionSpec { arity, oracle: Box::new(oracle) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
    OracleError,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undecided => "undecided",
            Status::OracleError => "oracle error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub input: Vec<BitString>,
    /// `None` where the function is undefined or the oracle failed.
    pub expected: Option<BitString>,
    pub got: Option<BitString>,
    pub steps: Option<u64>,
    pub bound: Option<u64>,
    pub status: Status,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Verdict {
    pub rows: Vec<Row>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == Status::Pass)
    }

    pub fn count(&self, s: Status) -> usize {
        self.rows.iter().filter(|r| r.status == s).count()
    }

    pub fn table(&self) -> String {
        let show = |w: &Option<BitString>| w.as_ref().map_or("-".to_string(), |w| w.to_string());
        let num = |n: Option<u64>| n.map_or("-".to_string(), |n| n.to_string());
        let mut out = String::from("input\texpected\tgot\tsteps\tbound\tstatus\n");
        for r in &self.rows {
            let input: Vec<String> = r.input.iter().map(|w| w.to_string()).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}",
                input.join(","),
                show(&r.expected),
                show(&r.got),
                num(r.steps),
                num(r.bound),
                r.status
            ));
            if !r.note.is_empty() {
                out.push_str(&format!("\t{}", r.note));
            }
            out.push('\n');
        }
        out
    }
}

/// `ρ(RM) = ims[1 ↦ w1]…[n ↦ wn]`, every other variable all-`ε`.
pub fn input_valuation(args: &[BitString]) -> Valuation {
    let mut m = MemState::empty();
    for (k, w) in args.iter().enumerate() {
        m = m.with(k as u64 + 1, w.clone());
    }
    Valuation::new().with(RM, m)
}

/// Every bit-string tuple of the given arity with component lengths up
/// to `max_len`, shortest first.
pub fn inputs_up_to(arity: usize, max_len: usize) -> Vec<Vec<BitString>> {
    let mut words = Vec::new();
    for len in 0..=max_len {
        for code in 0u64..(1 << len) {
            words.push(BitString::from_bits((0..len).map(|i| code >> i & 1 == 1).collect()));
        }
    }
    let mut out: Vec<Vec<BitString>> = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                words.iter().map(move |w| {
                    let mut v = prefix.clone();
                    v.push(w.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn check_one(
    t: &ProcTerm,
    f: &FunctionSpec,
    w: &AffineBound,
    input: &[BitString],
    max_states: usize,
) -> (Row, Option<Lts>) {
    let mut row = Row {
        input: input.to_vec(),
        expected: None,
        got: None,
        steps: None,
        bound: None,
        status: Status::Fail,
        note: String::new(),
    };
    let expected = match (f.oracle)(input) {
        Ok(v) => v,
        Err(e) => {
            row.status = Status::OracleError;
            row.note = e;
            return (row, None);
        }
    };
    row.expected = expected.clone();
    let l = match build_lts(t, &input_valuation(input), max_states) {
        Ok(l) => l,
        Err(SemError::Exploded(n)) => {
            row.status = Status::Undecided;
            row.note = format!("undecided at this bound ({n} states)");
            return (row, None);
        }
        Err(e) => {
            row.note = e.to_string();
            return (row, None);
        }
    };
    let halts = eventually_halts(&l);
    let Some(v) = expected else {
        if halts {
            row.note = "halts where the function is undefined".into();
        } else {
            row.status = Status::Pass;
        }
        return (row, Some(l));
    };
    if !halts {
        row.note = "does not eventually halt".into();
        return (row, Some(l));
    }
    let finals: Vec<MemState> =
        l.terminal_states().map(|s| l.valuation(s).map(|r| r.get(RM)).unwrap_or_default()).collect();
    let first = finals[0].clone();
    row.got = Some(first.get_u64(0));
    let steps = depth_by(&l, |e| u64::from(!e.label.is_tau())).expect("acyclic");
    let bound = w.eval(input.iter().map(|x| x.len() as u64).sum());
    row.steps = Some(steps);
    row.bound = (*w != AffineBound::UNBOUNDED).then_some(bound);
    if finals.iter().any(|m| *m != first) {
        row.note = "final memories differ between runs".into();
    } else if first.get_u64(0) != v {
        row.note = "wrong result".into();
    } else if steps > bound {
        row.note = "too many steps".into();
    } else {
        row.status = Status::Pass;
    }
    (row, Some(l))
}

/// Checks that `t` computes `f` in `w` steps on each of `inputs`.
pub fn check_computes(
    t: &ProcTerm,
    f: &FunctionSpec,
    w: &AffineBound,
    inputs: &[Vec<BitString>],
    max_states: usize,
) -> Verdict {
    let rows = par::map(Exec::default(), inputs, |inp| check_one(t, f, w, inp, max_states).0);
    Verdict { rows }
}

/// Checks that `t` computes `f` and that measure `m` stays within `v`.
pub fn is_of_complexity(
    t: &ProcTerm,
    f: &FunctionSpec,
    v: &AffineBound,
    m: Measure,
    inputs: &[Vec<BitString>],
    max_states: usize,
) -> Result<Verdict, ComplexityError> {
    let deg = class_degree(t, m)?;
    let rows = par::map(Exec::default(), inputs, |inp| {
        let (mut row, l) = check_one(t, f, &AffineBound::UNBOUNDED, inp, max_states);
        row.steps = None;
        row.bound = None;
        if let (Status::Pass, Some(_), Some(l)) = (row.status, &row.expected, l) {
            let bound = v.eval(inp.iter().map(|x| x.len() as u64).sum());
            row.bound = Some(bound);
            match measure_on(&l, m, deg) {
                Ok(rep) => {
                    row.steps = Some(rep.value);
                    if rep.value > bound {
                        row.status = Status::Fail;
                        row.note = format!("{m} exceeds bound");
                    }
                }
                Err(e) => {
                    row.status = Status::Fail;
                    row.note = e.to_string();
                }
            }
        }
        row
    });
    Ok(Verdict { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{bin_arith, ArithOp};
    use crate::machines::{compile_apramp, compile_spramp, parse_program, proc_of_bbram, Kind};

    fn bb(s: &str) -> ProcTerm {
        proc_of_bbram(&parse_program(s, Kind::Bbram).unwrap()).unwrap()
    }

    fn sm(progs: &[&str]) -> Vec<crate::machines::Program> {
        progs.iter().map(|s| parse_program(s, Kind::Smbram).unwrap()).collect()
    }

    const N: usize = 100_000;

    #[test]
    fn sequential_measures() {
        let v = Valuation::new();
        assert_eq!(sutm(&bb("halt"), &v, N), Ok(0));
        assert_eq!(sutm(&bb("add:#1:#1:0\nhalt"), &v, N), Ok(1));
        assert_eq!(swm(&bb("add:#1:#1:0\nhalt"), &v, N), Ok(1));
        assert_eq!(sutm(&bb("jmp:eq:#0:#0:1"), &v, N), Err(ComplexityError::Undefined));
    }

    #[test]
    fn asynchronous_measures() {
        let v = Valuation::new();
        let two = compile_apramp(&sm(&["halt", "halt"])).unwrap();
        assert_eq!(aputm(&two, &v, N), Ok(1));
        assert_eq!(apwm(&two, &v, N), Ok(2));
        let t = compile_apramp(&sm(&["not:0:0\nnot:0:0\nnot:0:0\nhalt", "not:0:0\nhalt"])).unwrap();
        let r = measure(&t, &v, Measure::Aputm, N).unwrap();
        assert_eq!((r.value, r.per_component.clone()), (4, vec![4, 2]));
        assert_eq!(apwm(&t, &v, N), Ok(6));
        let one = compile_apramp(&sm(&["not:0:0\nhalt"])).unwrap();
        assert_eq!(aputm(&one, &v, N), apwm(&one, &v, N));
    }

    #[test]
    fn synchronous_measures() {
        let v = Valuation::new();
        let two = compile_spramp(&sm(&["halt", "halt"])).unwrap();
        assert_eq!(sputm(&two, &v, N), Ok(1));
        assert_eq!(spwm(&two, &v, N), Ok(2));
        let one = compile_spramp(&sm(&["halt"])).unwrap();
        assert_eq!(sputm(&one, &v, N), Ok(1));
        let adds = compile_spramp(&sm(&["add:#1:#1:0\nhalt", "add:#1:#1:0\nhalt"])).unwrap();
        assert_eq!(sputm(&adds, &v, N), Ok(2));
        assert_eq!(spwm(&adds, &v, N), Ok(4));
        let three = compile_spramp(&sm(&["halt", "halt", "halt"])).unwrap();
        assert_eq!(spwm(&three, &v, N), Ok(3));
    }

    #[test]
    fn class_check() {
        let t = compile_spramp(&sm(&["halt"])).unwrap();
        let e = sutm(&t, &Valuation::new(), N).unwrap_err();
        assert_eq!(e.to_string(), "measure sutm requires RAMP class");
    }

    #[test]
    fn bounds() {
        assert_eq!("3*n+2".parse::<AffineBound>().unwrap(), AffineBound { a: 3, b: 2 });
        assert_eq!(" n + 1 ".parse::<AffineBound>().unwrap(), AffineBound { a: 1, b: 1 });
        assert_eq!("7".parse::<AffineBound>().unwrap(), AffineBound { a: 0, b: 7 });
        assert_eq!("2*n".parse::<AffineBound>().unwrap(), AffineBound { a: 2, b: 0 });
        assert!("n*2".parse::<AffineBound>().is_err());
        assert!("n+n".parse::<AffineBound>().is_err());
        let fit = AffineBound::fit(&[(0, 1), (1, 4), (2, 6), (2, 3), (4, 11)]);
        assert_eq!(fit, AffineBound { a: 3, b: 1 });
        for (n, m) in [(0, 1), (1, 4), (2, 6), (4, 11)] {
            assert!(m <= fit.eval(n));
        }
        assert_eq!(AffineBound::fit(&[]).to_string(), "0*n+0");
    }

    #[test]
    fn computes() {
        let halt = bb("halt");
        let id1 = FunctionSpec::new(1, |w: &[BitString]| Ok(Some(w[0].clone())));
        let inputs = inputs_up_to(1, 2);
        assert_eq!(inputs.len(), 7);
        let v = check_computes(&halt, &id1, &AffineBound::UNBOUNDED, &inputs, N);
        // only ε survives: register 0 stays empty
        assert_eq!(v.count(Status::Pass), 1);
        let copy = bb("mov:1:0\nhalt");
        assert!(check_computes(&copy, &id1, &"1".parse().unwrap(), &inputs, N).passed());
        let tight = check_computes(&copy, &id1, &"0".parse().unwrap(), &inputs, N);
        assert_eq!(tight.count(Status::Fail), 7);

        let nowhere = FunctionSpec::new(1, |_: &[BitString]| Ok(None));
        let lp = bb("jmp:eq:#0:#0:1");
        assert!(check_computes(&lp, &nowhere, &AffineBound::UNBOUNDED, &inputs, N).passed());
        assert!(!check_computes(&halt, &nowhere, &AffineBound::UNBOUNDED, &inputs, N).passed());

        let broken = FunctionSpec::new(1, |_: &[BitString]| Err("boom".to_string()));
        let v = check_computes(&halt, &broken, &AffineBound::UNBOUNDED, &inputs, N);
        assert_eq!(v.count(Status::OracleError), 7);
        assert!(v.table().starts_with("input\texpected\tgot\tsteps\tbound\tstatus\n"));
    }

    #[test]
    fn complexity_verdicts() {
        let add = bb("add:1:2:0\nhalt");
        let f = FunctionSpec::new(2, |w: &[BitString]| Ok(Some(bin_arith(ArithOp::Add, &w[0], &w[1]))));
        let inputs = inputs_up_to(2, 2);
        let v = is_of_complexity(&add, &f, &"1".parse().unwrap(), Measure::Sutm, &inputs, N).unwrap();
        assert!(v.passed());
        let v = is_of_complexity(&add, &f, &"0".parse().unwrap(), Measure::Sutm, &inputs, N).unwrap();
        assert_eq!(v.count(Status::Fail), inputs.len());
        assert!(is_of_complexity(&add, &f, &"1".parse().unwrap(), Measure::Sputm, &inputs, N).is_err());
    }

    #[test]
    fn report_serializes() {
        let r = measure(&bb("add:#1:#1:0\nhalt"), &Valuation::new(), Measure::Sutm, N).unwrap();
        let j = serde_json::to_string(&r).unwrap();
        assert_eq!(j, r#"{"measure":"sutm","value":1,"states":2,"transitions":1}"#);
        let back: MeasureReport = serde_json::from_str(&j).unwrap();
        assert_eq!(back, r);
    }
}
