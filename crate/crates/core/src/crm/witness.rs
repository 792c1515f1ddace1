//! Short programs with very long running times.

use num_bigint::BigUint;
use num_traits::One;

use super::bitlen;
use super::isa::{CrmProgram, Instruction};
use crate::error::{Error, Result};

/// A program of `O(log n)` instructions that runs for more than `2^(n+1) - 2` steps.
///
/// Layout: build `r0 = n` from its bits (`DBL r0`, plus `INC r0` on each set
/// bit), set `r1 = 1`, double `r1` while counting `r0` down to zero, then count
/// `r1` down to zero and halt.
pub fn witness(n: u64) -> Result<CrmProgram> {
    if n == 0 {
        return Err(Error::domain("witness needs n >= 1"));
    }
    let mut code = Vec::new();
    for i in (0..bitlen(n)).rev() {
        code.push(Instruction::dbl(0));
        if (n >> i) & 1 == 1 {
            code.push(Instruction::inc(0));
        }
    }
    code.push(Instruction::load(1, 1));
    code.push(Instruction::dbl(1));
    code.push(Instruction::dec(0));
    code.push(Instruction::jnz(0, -2));
    code.push(Instruction::dec(1));
    code.push(Instruction::jnz(1, -1));
    code.push(Instruction::halt());
    Ok(CrmProgram::new(code)?)
}

/// Exact step count of `witness(n)`:
/// `bitlen(n) + popcount(n) + 1 + 3n + 2^(n+1) + 1`.
pub fn witness_runtime(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("witness needs n >= 1"));
    }
    let linear = bitlen(n) as u64 + n.count_ones() as u64 + 2 + 3 * n;
    Ok((BigUint::one() << (n + 1)) + linear)
}

/// `9 * (2 * bitlen(n) + 7)`, an upper bound on the witness size in bits.
pub fn witness_size_bound(n: u64) -> u64 {
    9 * (2 * bitlen(n) as u64 + 7)
}
