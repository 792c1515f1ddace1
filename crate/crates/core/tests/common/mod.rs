#![allow(dead_code)]

//! Test-only oracles, written independently of the library's code paths.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Reference outcome of the naive interpreter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveOutcome {
    Halted(u64),
    Exhausted,
    Cycle { start: u64, period: u64 },
}

#[derive(Debug, Clone, Copy)]
struct Op {
    code: u8,
    reg: usize,
    arg: i64,
}

/// Decodes 9-bit words straight from the encoding table: 3 bits opcode,
/// 2 bits register, 4 bits argument (signed for the two jumps).
fn decode_words(words: &[u16]) -> Option<Vec<Op>> {
    words
        .iter()
        .map(|&w| {
            let code = (w >> 6) as u8;
            if code == 7 {
                return None;
            }
            let raw = (w & 15) as i64;
            let arg = if (code == 4 || code == 5) && raw >= 8 { raw - 16 } else { raw };
            Some(Op {
                code,
                reg: ((w >> 4) & 3) as usize,
                arg,
            })
        })
        .collect()
}

/// Parses an `L:hex` code by hand into 9-bit words.
pub fn words_from_code(code: &str) -> Vec<u16> {
    let (len, hex) = code.split_once(':').unwrap();
    let len: usize = len.parse().unwrap();
    let mut bits = Vec::new();
    for c in hex.chars() {
        let v = c.to_digit(16).unwrap();
        for i in (0..4).rev() {
            bits.push((v >> i) & 1);
        }
    }
    bits.truncate(len);
    bits.chunks(9).map(|c| c.iter().fold(0u16, |a, &b| (a << 1) | b as u16)).collect()
}

/// Straightforward interpreter: every configuration is remembered in a map,
/// so the first repeat is found exactly.
pub fn naive_run(words: &[u16], budget: u64, detect_cycles: bool) -> NaiveOutcome {
    let ops = decode_words(words).expect("valid program");
    let mut pc: i64 = 0;
    let mut regs: [BigUint; 4] = Default::default();
    let mut seen: HashMap<(i64, [BigUint; 4]), u64> = HashMap::new();
    let mut steps = 0u64;
    if detect_cycles {
        seen.insert((pc, regs.clone()), 0);
    }
    while steps < budget {
        let op = ops[pc as usize];
        steps += 1;
        let r = op.reg;
        let next = match op.code {
            0 => return NaiveOutcome::Halted(steps),
            1 => {
                regs[r] += 1u32;
                pc + 1
            }
            2 => {
                if !regs[r].is_zero() {
                    regs[r] -= 1u32;
                }
                pc + 1
            }
            3 => {
                regs[r] *= 2u32;
                pc + 1
            }
            4 => {
                if regs[r].is_zero() {
                    pc + op.arg
                } else {
                    pc + 1
                }
            }
            5 => {
                if !regs[r].is_zero() {
                    pc + op.arg
                } else {
                    pc + 1
                }
            }
            6 => {
                regs[r] = BigUint::from(op.arg as u64);
                pc + 1
            }
            _ => unreachable!(),
        };
        if next < 0 || next >= ops.len() as i64 {
            return NaiveOutcome::Halted(steps);
        }
        pc = next;
        if detect_cycles {
            if let Some(&first) = seen.get(&(pc, regs.clone())) {
                return NaiveOutcome::Cycle {
                    start: first,
                    period: steps - first,
                };
            }
            seen.insert((pc, regs.clone()), steps);
        }
    }
    NaiveOutcome::Exhausted
}

/// Exact `1 / (2^(e+1) - 2)`.
pub fn exact_term(e: u64) -> BigRational {
    BigRational::new(BigInt::one(), (BigInt::one() << (e + 1)) - 2)
}

pub fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

/// Exact partial sum of `terms` terms from `start`, plus the geometric
/// bracket of what remains: `[2^-(e(j)+1), 2^(1-e(j))]` at the first omitted `j`
/// (valid whenever `e(i+1) >= e(i) + 1`).
pub fn oracle_tail(exponent: impl Fn(u64) -> u64, start: u64, terms: u64) -> (BigRational, BigRational) {
    let mut partial = BigRational::zero();
    for i in start..start + terms {
        partial += exact_term(exponent(i));
    }
    let j = exponent(start + terms) as i64;
    (&partial + pow2(-(j + 1)), partial + pow2(1 - j))
}

/// `ceil(log2(n + 1))`, i.e. the bit length of n.
pub fn ceil_log2(n: u64) -> u64 {
    (64 - n.leading_zeros()) as u64
}

/// `bitlen(n) + popcount(n) + 1 + 3n + 2^(n+1) + 1`, counted per witness phase:
/// building n, loading 1, n doubling rounds of 3 steps, 2^n countdown rounds of
/// 2 steps, and the final halt.
pub fn witness_steps(n: u64) -> BigUint {
    let build = ceil_log2(n) + n.count_ones() as u64;
    let load: u64 = 1;
    let doubling = 3 * n;
    let countdown = BigUint::one() << (n + 1);
    countdown + build + load + doubling + 1u64
}
