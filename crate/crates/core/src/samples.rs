//! Ready-made terms and programs: the absolute-difference and division
//! processes over naturals held in register 0, and a bit-serial adder.

use std::sync::Arc;

use crate::bits::{ntob_u64, BitString};
use crate::machines::{parse_program, Kind, Program};
use crate::memory::MemState;
use crate::ramops::RamOp;
use crate::terms::{Cond, DataExpr, ProcTerm, RecSpec, Valuation};

fn op(s: &str) -> RamOp {
    s.parse().expect("well-formed operation")
}

/// A natural number as a memory with the value in register 0.
pub fn nat(n: u64) -> MemState {
    MemState::empty().with(0, ntob_u64(n))
}

/// `x` with register 1 set to register 0 of `y`.
fn pair(x: &str, y: &str) -> DataExpr {
    DataExpr::apply2(op("sto:0:@5"), DataExpr::flex(y).upd(5, ntob_u64(1)), DataExpr::flex(x))
}

/// `x - y` (proper subtraction), register 1 cleared again.
fn minus(x: &str, y: &str) -> DataExpr {
    DataExpr::apply1(op("sub:0:1:0"), pair(x, y)).upd(1, BitString::empty())
}

/// `x >= y = b`
fn at_least(x: &str, y: &str, b: bool) -> Cond {
    Cond::prop(op("gt:1:0"), pair(x, y), !b)
}

/// `d := i . ((d >= j = 1) :-> d := d - j + (d >= j = 0) :-> d := j - d)`
pub fn abs_diff_term() -> ProcTerm {
    let flipped = DataExpr::apply1(op("sub:1:0:0"), pair("d", "j")).upd(1, BitString::empty());
    ProcTerm::seq(
        ProcTerm::assign("d", DataExpr::flex("i")),
        ProcTerm::alt(
            ProcTerm::guard(at_least("d", "j", true), ProcTerm::assign("d", minus("d", "j"))),
            ProcTerm::guard(at_least("d", "j", false), ProcTerm::assign("d", flipped)),
        ),
    )
}

pub fn ij_valuation(i: u64, j: u64) -> Valuation {
    Valuation::new().with("i", nat(i)).with("j", nat(j))
}

/// `q := 0 . r := i . <Q|E>` with
/// `Q = (r >= j = 1) :-> q := q + 1 . R + (r >= j = 0) :-> eps` and
/// `R = True :-> r := r - j . Q`.
pub fn division_term() -> ProcTerm {
    let succ = DataExpr::apply1(op("add:0:#1:0"), DataExpr::flex("q"));
    let spec = RecSpec::new(vec![
        (
            "Q".into(),
            ProcTerm::alt(
                ProcTerm::guard(
                    at_least("r", "j", true),
                    ProcTerm::seq(ProcTerm::assign("q", succ), ProcTerm::var("R")),
                ),
                ProcTerm::guard(at_least("r", "j", false), ProcTerm::Empty),
            ),
        ),
        (
            "R".into(),
            ProcTerm::guard(
                Cond::True,
                ProcTerm::seq(ProcTerm::assign("r", minus("r", "j")), ProcTerm::var("Q")),
            ),
        ),
    ]);
    ProcTerm::chain(vec![
        ProcTerm::assign("q", DataExpr::Lit(nat(0))),
        ProcTerm::assign("r", DataExpr::flex("i")),
        ProcTerm::rec("Q", Arc::clone(&spec)),
    ])
}

/// Adds registers 1 and 2 into register 0 by carry propagation:
/// `a xor b` is computed as `(a or b) - (a and b)`.
pub const ADDITION: &str = "\
add:1:#0:0      ; a, canonical
add:2:#0:3      ; b, canonical
jmp:eq:3:#0:9   ; no carry left
and:0:3:4       ; carry bits
or:0:3:5
sub:5:4:0       ; a := a xor b
shl:4:3         ; b := carry << 1
jmp:eq:#0:#0:3
halt
";

/// Same loop with `a := a or b`; drops the carried-out bits.
pub const ADDITION_BROKEN: &str = "\
add:1:#0:0
add:2:#0:3
jmp:eq:3:#0:9
and:0:3:4
or:0:3:5
mov:5:0
shl:4:3
jmp:eq:#0:#0:3
halt
";

pub fn addition_program() -> Program {
    parse_program(ADDITION, Kind::Bbram).expect("valid program")
}

pub fn broken_addition_program() -> Program {
    parse_program(ADDITION_BROKEN, Kind::Bbram).expect("valid program")
}
