//! Process-algebraic models of RAM machines with shared memory.
pub mod bits;
pub mod complexity;
pub mod gen;
pub mod machines;
pub mod memory;
pub mod par;
pub mod ramops;
pub mod samples;
pub mod semantics;
pub mod terms;
