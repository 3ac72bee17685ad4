//! Canonical text form. `.` binds strongest, then the merges, then `:->`,
//! and `+` weakest; `.` and `+` nest to the right, merges to the left.

use std::fmt::{self, Display, Formatter, Write};

use super::{ActionLabel, ActionSet, Cond, DataExpr, ProcTerm, RecSpec, Valuation};

const ALT: u8 = 0;
const GUARD: u8 = 1;
const MERGE: u8 = 2;
const SEQ: u8 = 3;
const ATOM: u8 = 4;

impl Display for DataExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            DataExpr::Flex(v) => f.write_str(v),
            DataExpr::Lit(m) => write!(f, "{m}"),
            DataExpr::Upd(b, i, w) => write!(f, "{b}[{i}->{w}]"),
            DataExpr::Apply1(o, e) => write!(f, "{o}({e})"),
            DataExpr::Apply2(o, p, s) => write!(f, "{o}({p}, {s})"),
        }
    }
}

impl Display for Cond {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Cond::True => f.write_str("True"),
            Cond::False => f.write_str("False"),
            Cond::Prop(p, e, b) => write!(f, "({p}({e}) = {})", u8::from(*b)),
            Cond::DataEq(a, b) => write!(f, "({a} == {b})"),
            Cond::Not(c) => write!(f, "not({c})"),
            Cond::And(a, b) => write!(f, "and({a}, {b})"),
            Cond::Or(a, b) => write!(f, "or({a}, {b})"),
            Cond::Implies(a, b) => write!(f, "implies({a}, {b})"),
        }
    }
}

impl Display for Valuation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (k, (v, m)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={m}")?;
        }
        f.write_char('}')
    }
}

impl Display for ActionLabel {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ActionLabel::Tau => f.write_str("tau"),
            ActionLabel::Plain(a) => f.write_str(a),
            ActionLabel::Data(a, args) => {
                write!(f, "{a}(")?;
                comma_list(f, args)?;
                f.write_char(')')
            }
            ActionLabel::Assign(v, m) => write!(f, "{v} := {m}"),
        }
    }
}

impl Display for ActionSet {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        match self {
            ActionSet::Listed(ls) => comma_list(f, ls)?,
            ActionSet::AllWithTau => f.write_str("#all_tau")?,
            ActionSet::Mentioning(v) => write!(f, "#mentions {v}")?,
            ActionSet::Avoiding(v) => write!(f, "#avoids {v}")?,
            ActionSet::AllBut(names) => {
                f.write_str("#all_but ")?;
                comma_list(f, names)?;
            }
        }
        f.write_char('}')
    }
}

fn comma_list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (k, x) in items.iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl Display for RecSpec {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (k, (x, t)) in self.eqs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} = ")?;
            write_term(f, t, ALT)?;
        }
        f.write_char('}')
    }
}

impl Display for ProcTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, ALT)
    }
}

fn level(t: &ProcTerm) -> u8 {
    match t {
        ProcTerm::Alt(..) => ALT,
        ProcTerm::Guard(..) => GUARD,
        ProcTerm::Par(..) | ProcTerm::LeftMerge(..) | ProcTerm::CommMerge(..) | ProcTerm::SyncMerge(..) => {
            MERGE
        }
        ProcTerm::Seq(..) => SEQ,
        _ => ATOM,
    }
}

fn write_term(f: &mut Formatter<'_>, t: &ProcTerm, ctx: u8) -> fmt::Result {
    let parens = level(t) < ctx;
    if parens {
        f.write_char('(')?;
    }
    match t {
        ProcTerm::Empty => f.write_str("eps")?,
        ProcTerm::Dead => f.write_str("delta")?,
        ProcTerm::Silent => f.write_str("tau")?,
        ProcTerm::Act(a) | ProcTerm::Var(a) => f.write_str(a)?,
        ProcTerm::DataAct(a, args) => {
            write!(f, "{a}(")?;
            comma_list(f, args)?;
            f.write_char(')')?;
        }
        ProcTerm::Assign(v, e) => write!(f, "{v} := {e}")?,
        ProcTerm::Alt(a, b) => {
            write_term(f, a, GUARD)?;
            f.write_str(" + ")?;
            write_term(f, b, ALT)?;
        }
        ProcTerm::Guard(c, x) => {
            write!(f, "{c} :-> ")?;
            write_term(f, x, GUARD)?;
        }
        ProcTerm::Par(a, b) => merge(f, a, "||", b)?,
        ProcTerm::LeftMerge(a, b) => merge(f, a, "||L", b)?,
        ProcTerm::CommMerge(a, b) => merge(f, a, "|", b)?,
        ProcTerm::SyncMerge(a, b) => merge(f, a, "||sync", b)?,
        ProcTerm::Seq(a, b) => {
            write_term(f, a, ATOM)?;
            f.write_str(" . ")?;
            write_term(f, b, SEQ)?;
        }
        ProcTerm::Encap(h, x) => unary(f, &format!("encap{h}"), x)?,
        ProcTerm::Abstr(i, x) => unary(f, &format!("abstr{i}"), x)?,
        ProcTerm::Eval(rho, x) => unary(f, &format!("eval{rho}"), x)?,
        ProcTerm::Proj(n, x) => unary(f, &format!("proj[{n}]"), x)?,
        ProcTerm::Rename(m, x) => {
            let pairs: Vec<String> = m.iter().map(|(a, b)| format!("{a}->{b}")).collect();
            unary(f, &format!("rename[{}]", pairs.join(", ")), x)?;
        }
        ProcTerm::Rec(x, spec) => write!(f, "rec {x} {spec}")?,
    }
    if parens {
        f.write_char(')')?;
    }
    Ok(())
}

fn merge(f: &mut Formatter<'_>, a: &ProcTerm, op: &str, b: &ProcTerm) -> fmt::Result {
    write_term(f, a, MERGE)?;
    write!(f, " {op} ")?;
    write_term(f, b, SEQ)
}

fn unary(f: &mut Formatter<'_>, head: &str, x: &ProcTerm) -> fmt::Result {
    write!(f, "{head}(")?;
    write_term(f, x, ALT)?;
    f.write_char(')')
}
