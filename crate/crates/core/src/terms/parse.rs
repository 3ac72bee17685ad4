//! Recursive-descent parser for the canonical text form.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use super::{ActionLabel, ActionSet, Cond, DataExpr, ProcTerm, RecSpec, RenameMap, Valuation};
use crate::bits::BitString;
use crate::memory::MemState;
use crate::ramops::RamOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_term(src: &str) -> PResult<ProcTerm> {
    whole(src, |p| p.alt())
}

pub fn parse_data(src: &str) -> PResult<DataExpr> {
    whole(src, |p| p.data())
}

pub fn parse_cond(src: &str) -> PResult<Cond> {
    whole(src, |p| p.cond())
}

pub fn parse_action_set(src: &str) -> PResult<ActionSet> {
    whole(src, |p| p.action_set())
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let v = f(&mut p)?;
    p.ws();
    if p.pos < p.s.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, msg: &str) -> PResult<T> {
        Err(ParseError { pos: self.pos, msg: msg.to_string() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn rest(&self) -> &'a [u8] {
        &self.s[self.pos..]
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    /// Eats a keyword only when it is not a prefix of a longer identifier.
    fn eat_word(&mut self, w: &str) -> bool {
        self.ws();
        let r = self.rest();
        if r.starts_with(w.as_bytes()) && !r.get(w.len()).is_some_and(|&c| is_ident_char(c)) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.fail(&format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        self.ws();
        let start = self.pos;
        if !self.s.get(self.pos).is_some_and(|&c| is_ident_start(c)) {
            return self.fail("expected identifier");
        }
        while self.s.get(self.pos).is_some_and(|&c| is_ident_char(c)) {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> PResult<BigUint> {
        self.ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("expected number");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii digits")
            .parse()
            .expect("digits parse"))
    }

    fn bits(&mut self) -> PResult<BitString> {
        self.ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|&c| is_ident_char(c)) {
            self.pos += 1;
        }
        let text = String::from_utf8_lossy(&self.s[start..self.pos]);
        text.parse().or_else(|e: crate::bits::BitsError| {
            self.pos = start;
            self.fail(&e.to_string())
        })
    }

    /// `name:operand:...` with no interior whitespace.
    fn op_token(&mut self) -> Option<RamOp> {
        self.ws();
        let start = self.pos;
        let mut end = start;
        while self.s.get(end).is_some_and(|&c| c.is_ascii_alphabetic()) {
            end += 1;
        }
        if end == start {
            return None;
        }
        let mut parts = 0;
        loop {
            let at = |i: usize| self.s.get(i).copied();
            if at(end) != Some(b':') {
                break;
            }
            let mut j = end + 1;
            if matches!(at(j), Some(b'#') | Some(b'@')) {
                j += 1;
            }
            let digits = j;
            while at(j).is_some_and(|c| c.is_ascii_digit()) {
                j += 1;
            }
            if j == digits {
                break;
            }
            end = j;
            parts += 1;
        }
        if parts == 0 || self.s.get(end).is_some_and(|&c| is_ident_char(c)) {
            return None;
        }
        let text = std::str::from_utf8(&self.s[start..end]).ok()?;
        let op = text.parse().ok()?;
        self.pos = end;
        Some(op)
    }

    fn mem_literal(&mut self) -> PResult<MemState> {
        self.ws();
        let start = self.pos;
        if !self.eat("mem{") {
            return self.fail("expected memory literal");
        }
        while self.s.get(self.pos).is_some_and(|&c| c != b'}') {
            self.pos += 1;
        }
        self.expect("}")?;
        let text = String::from_utf8_lossy(&self.s[start..self.pos]);
        text.parse().or_else(|e: crate::memory::MemoryError| {
            self.pos = start;
            self.fail(&e.to_string())
        })
    }

    fn data(&mut self) -> PResult<DataExpr> {
        let mut e = if self.rest_is("mem{") {
            DataExpr::Lit(self.mem_literal()?)
        } else if let Some(op) = self.op_token() {
            self.expect("(")?;
            let a = self.data()?;
            if self.eat(",") {
                let b = self.data()?;
                self.expect(")")?;
                DataExpr::apply2(op, a, b)
            } else {
                self.expect(")")?;
                DataExpr::apply1(op, a)
            }
        } else {
            DataExpr::Flex(self.ident()?)
        };
        while self.eat("[") {
            let i = self.number()?;
            self.expect("->")?;
            let w = self.bits()?;
            self.expect("]")?;
            e = DataExpr::Upd(Box::new(e), i, w);
        }
        Ok(e)
    }

    fn rest_is(&mut self, tok: &str) -> bool {
        self.ws();
        self.rest().starts_with(tok.as_bytes())
    }

    fn cond(&mut self) -> PResult<Cond> {
        if self.eat_word("True") {
            return Ok(Cond::True);
        }
        if self.eat_word("False") {
            return Ok(Cond::False);
        }
        for (kw, arity) in [("not", 1), ("and", 2), ("or", 2), ("implies", 2)] {
            let save = self.pos;
            if self.eat_word(kw) && self.eat("(") {
                let a = self.cond()?;
                let c = if arity == 1 {
                    Cond::not(a)
                } else {
                    self.expect(",")?;
                    let b = self.cond()?;
                    match kw {
                        "and" => Cond::and(a, b),
                        "or" => Cond::or(a, b),
                        _ => Cond::Implies(Box::new(a), Box::new(b)),
                    }
                };
                self.expect(")")?;
                return Ok(c);
            }
            self.pos = save;
        }
        self.expect("(")?;
        let save = self.pos;
        if let Some(p) = self.op_token() {
            if p.is_cmp() {
                self.expect("(")?;
                let e = self.data()?;
                self.expect(")")?;
                self.expect("=")?;
                let b = if self.eat("1") {
                    true
                } else if self.eat("0") {
                    false
                } else {
                    return self.fail("expected bit 0 or 1");
                };
                self.expect(")")?;
                return Ok(Cond::Prop(p, e, b));
            }
        }
        self.pos = save;
        let a = self.data()?;
        self.expect("==")?;
        let b = self.data()?;
        self.expect(")")?;
        Ok(Cond::DataEq(a, b))
    }

    fn closed_data(&mut self) -> PResult<MemState> {
        let start = self.pos;
        let e = self.data()?;
        e.eval(None).or_else(|err| {
            self.pos = start;
            self.fail(&err.to_string())
        })
    }

    fn label(&mut self) -> PResult<ActionLabel> {
        if self.eat_word("tau") {
            return Ok(ActionLabel::Tau);
        }
        let name = self.ident()?;
        if self.eat(":=") {
            return Ok(ActionLabel::Assign(name, self.closed_data()?));
        }
        if self.eat("(") {
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.closed_data()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(ActionLabel::Data(name, args));
        }
        Ok(ActionLabel::Plain(name))
    }

    fn action_set(&mut self) -> PResult<ActionSet> {
        self.expect("{")?;
        let set = if self.eat("#all_tau") {
            ActionSet::AllWithTau
        } else if self.eat("#mentions") {
            ActionSet::Mentioning(self.ident()?)
        } else if self.eat("#avoids") {
            ActionSet::Avoiding(self.ident()?)
        } else if self.eat("#all_but") {
            let mut names = Vec::new();
            if self.peek() != Some(b'}') {
                names.push(self.ident()?);
                while self.eat(",") {
                    names.push(self.ident()?);
                }
            }
            ActionSet::AllBut(names)
        } else {
            let mut labels = Vec::new();
            if self.peek() != Some(b'}') {
                labels.push(self.label()?);
                while self.eat(",") {
                    labels.push(self.label()?);
                }
            }
            ActionSet::listed(labels)
        };
        self.expect("}")?;
        Ok(set)
    }

    fn valuation(&mut self) -> PResult<Valuation> {
        self.expect("{")?;
        let mut rho = Valuation::new();
        if !self.eat("}") {
            loop {
                let v = self.ident()?;
                self.expect("=")?;
                let m = self.closed_data()?;
                rho.set(&v, m);
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(rho)
    }

    fn alt(&mut self) -> PResult<ProcTerm> {
        let a = self.guard()?;
        if self.eat("+") {
            let b = self.alt()?;
            return Ok(ProcTerm::alt(a, b));
        }
        Ok(a)
    }

    fn guard(&mut self) -> PResult<ProcTerm> {
        let save = self.pos;
        if let Ok(c) = self.cond() {
            if self.eat(":->") {
                let body = self.guard()?;
                return Ok(ProcTerm::guard(c, body));
            }
        }
        self.pos = save;
        self.merge()
    }

    fn merge_op(&mut self) -> Option<fn(ProcTerm, ProcTerm) -> ProcTerm> {
        self.ws();
        let r = self.rest();
        let glued = |w: &[u8]| r.starts_with(w) && !r.get(w.len()).is_some_and(|&c| is_ident_char(c));
        let (len, op): (usize, fn(ProcTerm, ProcTerm) -> ProcTerm) = if glued(b"||sync") {
            (6, ProcTerm::sync_merge)
        } else if glued(b"||L") {
            (3, ProcTerm::left_merge)
        } else if r.starts_with(b"||") {
            (2, ProcTerm::par)
        } else if r.starts_with(b"|") {
            (1, ProcTerm::comm_merge)
        } else {
            return None;
        };
        self.pos += len;
        Some(op)
    }

    fn merge(&mut self) -> PResult<ProcTerm> {
        let mut acc = self.seq()?;
        while let Some(op) = self.merge_op() {
            let rhs = self.seq()?;
            acc = op(acc, rhs);
        }
        Ok(acc)
    }

    fn seq(&mut self) -> PResult<ProcTerm> {
        let a = self.atom()?;
        if self.eat(".") {
            let b = self.seq()?;
            return Ok(ProcTerm::seq(a, b));
        }
        Ok(a)
    }

    fn parenthesised(&mut self) -> PResult<ProcTerm> {
        self.expect("(")?;
        let t = self.alt()?;
        self.expect(")")?;
        Ok(t)
    }

    fn atom(&mut self) -> PResult<ProcTerm> {
        match self.peek() {
            None => return self.fail("unexpected end of input"),
            Some(b'(') => return self.parenthesised(),
            _ => {}
        }
        if self.eat_word("eps") {
            return Ok(ProcTerm::Empty);
        }
        if self.eat_word("delta") {
            return Ok(ProcTerm::Dead);
        }
        if self.eat_word("tau") {
            return Ok(ProcTerm::Silent);
        }
        if self.eat_word("encap") {
            let h = self.action_set()?;
            return Ok(ProcTerm::encap(h, self.parenthesised()?));
        }
        if self.eat_word("abstr") {
            let i = self.action_set()?;
            return Ok(ProcTerm::abstr(i, self.parenthesised()?));
        }
        if self.eat_word("eval") {
            let rho = self.valuation()?;
            return Ok(ProcTerm::eval(rho, self.parenthesised()?));
        }
        if self.eat("proj[") {
            let n = self.number()?;
            let n = u64::try_from(n).or_else(|_| self.fail("projection index too large"))?;
            self.expect("]")?;
            return Ok(ProcTerm::proj(n, self.parenthesised()?));
        }
        if self.eat("rename[") {
            let mut f = RenameMap::new();
            if !self.eat("]") {
                loop {
                    let a = self.ident()?;
                    self.expect("->")?;
                    let b = self.ident()?;
                    f.insert(a, b);
                    if self.eat("]") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(ProcTerm::rename(f, self.parenthesised()?));
        }
        if self.eat_word("rec") {
            return self.rec();
        }
        let name = self.ident()?;
        if self.eat(":=") {
            return Ok(ProcTerm::Assign(name, self.data()?));
        }
        if self.eat("(") {
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.data()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(ProcTerm::DataAct(name, args));
        }
        Ok(ProcTerm::Act(name))
    }

    fn rec(&mut self) -> PResult<ProcTerm> {
        let root = self.ident()?;
        self.expect("{")?;
        let mut eqs = Vec::new();
        loop {
            let x = self.ident()?;
            self.expect("=")?;
            let t = self.alt()?;
            eqs.push((x, t));
            if self.eat("}") {
                break;
            }
            self.expect(",")?;
        }
        let names: BTreeSet<String> = eqs.iter().map(|(x, _)| x.clone()).collect();
        if names.len() != eqs.len() {
            return self.fail("duplicate recursion variable");
        }
        if !names.contains(&root) {
            return self.fail(&format!("`{root}` has no equation"));
        }
        let eqs = eqs.into_iter().map(|(x, t)| (x, bind_vars(&t, &names))).collect();
        Ok(ProcTerm::Rec(root, RecSpec::new(eqs)))
    }
}

/// Turns actions named like recursion variables into variable references.
fn bind_vars(t: &ProcTerm, names: &BTreeSet<String>) -> ProcTerm {
    use ProcTerm::*;
    let b = |x: &Arc<ProcTerm>| Arc::new(bind_vars(x, names));
    match t {
        Act(a) if names.contains(a) => Var(a.clone()),
        Empty | Dead | Silent | Act(_) | DataAct(..) | Assign(..) | Rec(..) | Var(_) => t.clone(),
        Alt(x, y) => Alt(b(x), b(y)),
        Seq(x, y) => Seq(b(x), b(y)),
        Par(x, y) => Par(b(x), b(y)),
        LeftMerge(x, y) => LeftMerge(b(x), b(y)),
        CommMerge(x, y) => CommMerge(b(x), b(y)),
        SyncMerge(x, y) => SyncMerge(b(x), b(y)),
        Encap(h, x) => Encap(h.clone(), b(x)),
        Abstr(i, x) => Abstr(i.clone(), b(x)),
        Guard(c, x) => Guard(c.clone(), b(x)),
        Eval(r, x) => Eval(r.clone(), b(x)),
        Proj(n, x) => Proj(*n, b(x)),
        Rename(f, x) => Rename(f.clone(), b(x)),
    }
}
