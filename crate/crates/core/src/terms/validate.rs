//! Shape checks: linear terms, guardedness and the three machine term
//! grammars.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use super::{rm, Cond, DataExpr, ProcTerm, RecSpec, RM, SYNC};
use crate::ramops::RamOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("expected a recursion constant")]
    NotRec,
    #[error("right-hand side of `{0}` is not linear")]
    NotLinear(String),
    #[error("equation `{var}` of component {component}: {msg}")]
    Equation { component: usize, var: String, msg: String },
}

/// Flattens a right-nested or left-nested sum into its summands.
pub(crate) fn summands(t: &ProcTerm) -> Vec<&ProcTerm> {
    match t {
        ProcTerm::Alt(a, b) => {
            let mut v = summands(a);
            v.extend(summands(b));
            v
        }
        other => vec![other],
    }
}

pub fn validate_linear(t: &ProcTerm) -> bool {
    match t {
        ProcTerm::Dead => true,
        ProcTerm::Alt(a, b) => validate_linear(a) && validate_linear(b),
        ProcTerm::Guard(_, body) => match &**body {
            ProcTerm::Empty => true,
            ProcTerm::Seq(a, x) => a.is_atomic_or_tau() && matches!(**x, ProcTerm::Var(_)),
            _ => false,
        },
        _ => false,
    }
}

/// A linear specification is guarded iff its `τ`-edges form no cycle.
pub fn validate_guarded(spec: &RecSpec) -> Result<bool, ShapeError> {
    let mut tau_edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (x, rhs) in &spec.eqs {
        if !validate_linear(rhs) {
            return Err(ShapeError::NotLinear(x.clone()));
        }
        let succ = tau_edges.entry(x.as_str()).or_default();
        for s in summands(rhs) {
            if let ProcTerm::Guard(_, body) = s {
                if let ProcTerm::Seq(a, y) = &**body {
                    if let (ProcTerm::Silent, ProcTerm::Var(y)) = (&**a, &**y) {
                        succ.push(y.as_str());
                    }
                }
            }
        }
    }
    // colour-based DFS cycle detection
    let mut colour: BTreeMap<&str, u8> = BTreeMap::new();
    fn visit<'a>(
        x: &'a str,
        edges: &BTreeMap<&'a str, Vec<&'a str>>,
        colour: &mut BTreeMap<&'a str, u8>,
    ) -> bool {
        match colour.get(x) {
            Some(1) => return false,
            Some(2) => return true,
            _ => {}
        }
        colour.insert(x, 1);
        for &y in edges.get(x).map(|v| v.as_slice()).unwrap_or(&[]) {
            if !visit(y, edges, colour) {
                return false;
            }
        }
        colour.insert(x, 2);
        true
    }
    Ok(spec.vars().all(|x| visit(x, &tau_edges, &mut colour)))
}

/// Recognised right-hand-side shapes of machine equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum EqShape {
    Ini(BigUint, String),
    Load(RamOp, String),
    Store(RamOp, String),
    Op(RamOp, String),
    Test(RamOp, String, String),
    Halt,
    Sync(String),
}

impl EqShape {
    pub(crate) fn successors(&self) -> Vec<&str> {
        match self {
            EqShape::Halt => vec![],
            EqShape::Ini(_, z)
            | EqShape::Load(_, z)
            | EqShape::Store(_, z)
            | EqShape::Op(_, z)
            | EqShape::Sync(z) => vec![z],
            EqShape::Test(_, z, z2) => vec![z, z2],
        }
    }
}

fn is_flex(e: &DataExpr, v: &str) -> bool {
    matches!(e, DataExpr::Flex(w) if w == v)
}

/// `True :-> v := e . Z`
fn true_assign(t: &ProcTerm) -> Option<(&str, &DataExpr, &str)> {
    let ProcTerm::Guard(Cond::True, body) = t else { return None };
    let ProcTerm::Seq(a, z) = &**body else { return None };
    let (ProcTerm::Assign(v, e), ProcTerm::Var(z)) = (&**a, &**z) else { return None };
    Some((v, e, z))
}

/// `(p(own) = b) :-> own := own . Z`
fn test_branch<'a>(t: &'a ProcTerm, own: &str) -> Option<(&'a RamOp, bool, &'a str)> {
    let ProcTerm::Guard(Cond::Prop(p, e, b), body) = t else { return None };
    if !p.is_cmp() || !is_flex(e, own) {
        return None;
    }
    let ProcTerm::Seq(a, z) = &**body else { return None };
    let (ProcTerm::Assign(v, e), ProcTerm::Var(z)) = (&**a, &**z) else { return None };
    (v == own && is_flex(e, own)).then_some((p, *b, z.as_str()))
}

/// Classifies an equation of a component whose private memory is `own`.
/// With `shared` false only the sequential shapes are accepted.
pub(crate) fn classify(rhs: &ProcTerm, own: &str, shared: bool, sync: bool) -> Option<EqShape> {
    match rhs {
        ProcTerm::Guard(Cond::True, body) if **body == ProcTerm::Empty => return Some(EqShape::Halt),
        ProcTerm::Guard(Cond::True, body) if sync => {
            if let ProcTerm::Seq(a, z) = &**body {
                if let (ProcTerm::Act(s), ProcTerm::Var(z)) = (&**a, &**z) {
                    if s == SYNC {
                        return Some(EqShape::Sync(z.clone()));
                    }
                }
            }
        }
        ProcTerm::Alt(a, b) => {
            let (p1, b1, z1) = test_branch(a, own)?;
            let (p2, b2, z2) = test_branch(b, own)?;
            return (p1 == p2 && b1 && !b2)
                .then(|| EqShape::Test(p1.clone(), z1.to_string(), z2.to_string()));
        }
        _ => {}
    }
    let (v, e, z) = true_assign(rhs)?;
    let z = z.to_string();
    match e {
        DataExpr::Apply1(o, arg) if v == own && is_flex(arg, own) => match o {
            RamOp::Ini(k) if shared => Some(EqShape::Ini(k.clone(), z)),
            _ if o.is_plain() => Some(EqShape::Op(o.clone(), z)),
            _ => None,
        },
        DataExpr::Apply2(o, p, s) if shared && is_flex(p, own) && is_flex(s, RM) => match o {
            RamOp::Load { .. } if v == own => Some(EqShape::Load(o.clone(), z)),
            RamOp::Store { .. } if v == RM => Some(EqShape::Store(o.clone(), z)),
            _ => None,
        },
        _ => None,
    }
}

fn eq_err(component: usize, var: &str, msg: impl Into<String>) -> ShapeError {
    ShapeError::Equation { component, var: var.to_string(), msg: msg.into() }
}

fn check_targets(component: usize, spec: &RecSpec, x: &str, shape: &EqShape) -> Result<(), ShapeError> {
    for z in shape.successors() {
        if !spec.has(z) {
            return Err(eq_err(component, x, format!("refers to unknown variable `{z}`")));
        }
    }
    Ok(())
}

pub(crate) fn ramp_shapes(t: &ProcTerm) -> Result<(String, Vec<(String, EqShape)>), ShapeError> {
    let ProcTerm::Rec(root, spec) = t else {
        return Err(ShapeError::NotRec);
    };
    let mut out = Vec::new();
    for (x, rhs) in &spec.eqs {
        let shape = classify(rhs, RM, false, false)
            .ok_or_else(|| eq_err(1, x, "not an operation, test or halt equation"))?;
        check_targets(1, spec, x, &shape)?;
        out.push((x.clone(), shape));
    }
    Ok((root.clone(), out))
}

pub fn validate_ramp(t: &ProcTerm) -> bool {
    ramp_shapes(t).is_ok()
}

fn flatten(t: &ProcTerm, sync: bool) -> Vec<&ProcTerm> {
    match (t, sync) {
        (ProcTerm::Par(a, b), false) | (ProcTerm::SyncMerge(a, b), true) => {
            let mut v = flatten(a, sync);
            v.extend(flatten(b, sync));
            v
        }
        _ => vec![t],
    }
}

pub(crate) fn parallel_shapes(
    t: &ProcTerm,
    sync: bool,
) -> Result<Vec<(String, Vec<(String, EqShape)>)>, ShapeError> {
    let mut comps = Vec::new();
    for (k, c) in flatten(t, sync).into_iter().enumerate() {
        let i = k + 1;
        let ProcTerm::Rec(root, spec) = c else {
            return Err(ShapeError::NotRec);
        };
        let own = rm(i);
        let mut shapes = BTreeMap::new();
        let mut list = Vec::new();
        for (x, rhs) in &spec.eqs {
            let shape = classify(rhs, &own, true, sync)
                .ok_or_else(|| eq_err(i, x, "does not match any equation form"))?;
            check_targets(i, spec, x, &shape)?;
            match (&shape, x == root) {
                (EqShape::Ini(n, _), true) if *n == BigUint::from(i) => {}
                (EqShape::Ini(..), true) => return Err(eq_err(i, x, format!("must initialise memory {i}"))),
                (_, true) => return Err(eq_err(i, x, "root equation must be the ini step")),
                (EqShape::Ini(..), false) => return Err(eq_err(i, x, "ini is only allowed at the root")),
                _ => {}
            }
            shapes.insert(x.as_str(), matches!(shape, EqShape::Sync(_)));
            list.push((x.clone(), shape));
        }
        if sync {
            for (x, shape) in &list {
                let here = shapes[x.as_str()];
                for z in shape.successors() {
                    if shapes[z] == here {
                        return Err(eq_err(
                            i,
                            x,
                            format!("sync and non-sync equations must alternate (successor `{z}`)"),
                        ));
                    }
                }
            }
        }
        comps.push((root.clone(), list));
    }
    Ok(comps)
}

/// Degree of an asynchronous parallel machine term.
pub fn validate_apramp(t: &ProcTerm) -> Result<usize, ShapeError> {
    parallel_shapes(t, false).map(|c| c.len())
}

/// Degree of a synchronous parallel machine term.
pub fn validate_spramp(t: &ProcTerm) -> Result<usize, ShapeError> {
    parallel_shapes(t, true).map(|c| c.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;

    fn p(s: &str) -> ProcTerm {
        parse_term(s).unwrap()
    }

    fn spec(s: &str) -> std::sync::Arc<RecSpec> {
        match p(s) {
            ProcTerm::Rec(_, e) => e,
            _ => unreachable!(),
        }
    }

    #[test]
    fn linear_terms() {
        assert!(validate_linear(&ProcTerm::Dead));
        assert!(validate_linear(&p("True :-> eps")));
        assert!(!validate_linear(&p("(True :-> eps) . delta")));
        assert!(!validate_linear(&p("rec X {X = True :-> a . X + False :-> tau . X}")));
        let e = spec("rec X {X = True :-> a . X + False :-> tau . X + delta}");
        assert!(validate_linear(e.get("X").unwrap()));
        assert!(!validate_linear(&p("True :-> a . b")));
    }

    #[test]
    fn guardedness() {
        assert_eq!(validate_guarded(&spec("rec X {X = True :-> tau . X}")), Ok(false));
        assert_eq!(validate_guarded(&spec("rec X {X = True :-> a . X}")), Ok(true));
        assert_eq!(validate_guarded(&spec("rec X {X = True :-> tau . Y, Y = True :-> a . X}")), Ok(true));
        assert_eq!(validate_guarded(&spec("rec X {X = True :-> tau . Y, Y = True :-> tau . X}")), Ok(false));
        assert_eq!(validate_guarded(&spec("rec X {X = a . X}")), Err(ShapeError::NotLinear("X".into())));
    }

    #[test]
    fn ramp_grammar() {
        assert!(validate_ramp(&p("rec X1 {X1 = True :-> eps}")));
        assert!(!validate_ramp(&p("rec X {X = True :-> tau . X}")));
        assert!(!validate_ramp(&p("rec X1 {X1 = True :-> RM_1 := ini:#1(RM_1) . Y1, Y1 = True :-> eps}")));
        assert!(validate_ramp(&p(
            "rec X1 {X1 = True :-> RM := add:#1:#1:0(RM) . X2, X2 = (eq:0:#0(RM) = 1) :-> RM := RM . X1 + (eq:0:#0(RM) = 0) :-> RM := RM . X3, X3 = True :-> eps}"
        )));
        // mismatched predicates in the two branches
        assert!(!validate_ramp(&p(
            "rec X {X = (eq:0:#0(RM) = 1) :-> RM := RM . X + (gt:0:#0(RM) = 0) :-> RM := RM . X}"
        )));
        // dangling target
        assert!(!validate_ramp(&p("rec X {X = True :-> RM := not:0:0(RM) . Y}")));
    }

    #[test]
    fn parallel_grammars() {
        let c1 = "rec X1 {X1 = True :-> RM_1 := ini:#1(RM_1) . Y1, Y1 = True :-> eps}";
        let c2 = "rec X2 {X2 = True :-> RM_2 := ini:#2(RM_2) . Y1, Y1 = True :-> eps}";
        assert_eq!(validate_apramp(&p(&format!("{c1} || {c2}"))), Ok(2));
        assert_eq!(validate_apramp(&p(c1)), Ok(1));
        assert!(validate_apramp(&p("rec X1 {X1 = True :-> eps}")).is_err());
        // components are numbered by position
        assert!(validate_apramp(&p(&format!("{c2} || {c1}"))).is_err());

        let s1 =
            "rec X1 {X1 = True :-> RM_1 := ini:#1(RM_1) . Y1, Y1 = True :-> sync . Y2, Y2 = True :-> eps}";
        let s2 =
            "rec X2 {X2 = True :-> RM_2 := ini:#2(RM_2) . Y1, Y1 = True :-> sync . Y2, Y2 = True :-> eps}";
        assert_eq!(validate_spramp(&p(&format!("{s1} ||sync {s2}"))), Ok(2));
        assert_eq!(validate_spramp(&p(s1)), Ok(1));
        let twice = "rec X1 {X1 = True :-> RM_1 := ini:#1(RM_1) . Y1, Y1 = True :-> sync . Y2, Y2 = True :-> sync . Y3, Y3 = True :-> eps}";
        assert!(matches!(validate_spramp(&p(twice)), Err(ShapeError::Equation { .. })));
        // sync is not part of the asynchronous grammar
        assert!(validate_apramp(&p(s1)).is_err());
        let store = "rec X1 {X1 = True :-> RM_1 := ini:#1(RM_1) . Y1, Y1 = True :-> RM := sto:#1:@0(RM_1, RM) . Y2, Y2 = True :-> RM_1 := loa:@0:1(RM_1, RM) . Y3, Y3 = True :-> eps}";
        assert_eq!(validate_apramp(&p(store)), Ok(1));
    }
}
