//! The counting register machine: 9-bit instructions over four unbounded registers.

mod isa;
mod machine;
mod witness;

pub use isa::{CrmProgram, DecodeError, Instruction, Opcode, INSTRUCTION_BITS, PROGRAMS_PER_INSTRUCTION};
pub use machine::{run, run_with_limit, MachineState, Register, RunOutcome, Step};
pub use witness::{witness, witness_runtime, witness_size_bound};

/// `floor(log2 t) + 1` for `t >= 1`.
pub fn bitlen(t: u64) -> u32 {
    64 - t.leading_zeros()
}
