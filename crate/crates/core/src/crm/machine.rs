use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::bitlen;
use super::isa::{CrmProgram, Opcode};

/// An unbounded non-negative register. Values that fit in 64 bits are always
/// stored `Small`, so derived equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Register {
    Small(u64),
    Big(BigUint),
}

impl Default for Register {
    fn default() -> Self {
        Register::Small(0)
    }
}

impl Register {
    pub fn is_zero(&self) -> bool {
        matches!(self, Register::Small(0))
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Register::Small(v) => BigUint::from(*v),
            Register::Big(b) => b.clone(),
        }
    }

    fn inc(&mut self) {
        match self {
            Register::Small(v) => match v.checked_add(1) {
                Some(n) => *v = n,
                None => *self = Register::Big(BigUint::from(*v) + 1u32),
            },
            Register::Big(b) => *b += 1u32,
        }
    }

    fn dec(&mut self) {
        match self {
            Register::Small(v) => *v = v.saturating_sub(1),
            Register::Big(b) => {
                *b -= 1u32;
                if let Some(v) = b.to_u64() {
                    *self = Register::Small(v);
                }
            }
        }
    }

    fn dbl(&mut self) {
        match self {
            Register::Small(v) => match v.checked_mul(2) {
                Some(n) => *v = n,
                None => *self = Register::Big(BigUint::from(*v) << 1),
            },
            Register::Big(b) => *b <<= 1,
        }
    }
}

/// Program counter, four registers, and the number of executed instructions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MachineState {
    pc: usize,
    registers: [Register; 4],
    steps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Running,
    Halted,
}

impl MachineState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pc(&self) -> usize {
        self.pc
    }

    pub fn registers(&self) -> &[Register; 4] {
        &self.registers
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Equality of pc and registers, ignoring the step count.
    pub fn same_config(&self, other: &MachineState) -> bool {
        self.pc == other.pc && self.registers == other.registers
    }

    /// Executes one instruction. Halting by `HALT` or by leaving `[0, len)`
    /// both count the final instruction as a step.
    pub fn step(&mut self, program: &CrmProgram) -> Step {
        let code = program.instructions();
        let Some(ins) = code.get(self.pc) else {
            return Step::Halted;
        };
        self.steps += 1;
        let reg = &mut self.registers[ins.reg as usize];
        let next = match ins.op {
            Opcode::Halt => return Step::Halted,
            Opcode::Inc => {
                reg.inc();
                self.pc as i64 + 1
            }
            Opcode::Dec => {
                reg.dec();
                self.pc as i64 + 1
            }
            Opcode::Dbl => {
                reg.dbl();
                self.pc as i64 + 1
            }
            Opcode::LoadC => {
                *reg = Register::Small(ins.arg as u64);
                self.pc as i64 + 1
            }
            Opcode::Jz | Opcode::Jnz => {
                let taken = reg.is_zero() == (ins.op == Opcode::Jz);
                self.pc as i64 + if taken { ins.offset() as i64 } else { 1 }
            }
        };
        if next < 0 || next >= code.len() as i64 {
            return Step::Halted;
        }
        self.pc = next as usize;
        Step::Running
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RunOutcome {
    Halted { t: u64, bitlen_t: u32 },
    BudgetExhausted { budget: u64 },
    /// The configuration after `start` steps recurs after `start + period` steps.
    CycleDetected { start: u64, period: u64 },
}

impl RunOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            RunOutcome::Halted { .. } => "halted",
            RunOutcome::BudgetExhausted { .. } => "exhausted",
            RunOutcome::CycleDetected { .. } => "cycle",
        }
    }
}

/// Runs `program` from the all-zero state for at most `budget` steps.
///
/// With `detect_cycles`, a run is reported as a cycle exactly when two of the
/// configurations after `0..=budget` steps coincide; `start` is the first
/// configuration on the cycle and `period` its length. Budgets beyond
/// `u64::MAX` are clamped.
pub fn run(program: &CrmProgram, budget: &BigUint, detect_cycles: bool) -> RunOutcome {
    run_with_limit(program, budget.to_u64().unwrap_or(u64::MAX), detect_cycles)
}

pub fn run_with_limit(program: &CrmProgram, budget: u64, detect_cycles: bool) -> RunOutcome {
    assert!(budget >= 1, "budget must be at least one step");
    let mut state = MachineState::new();

    if !detect_cycles {
        while state.steps < budget {
            if state.step(program) == Step::Halted {
                return halted(state.steps);
            }
        }
        return RunOutcome::BudgetExhausted { budget };
    }

    // Brent: compare against a saved configuration that jumps forward at
    // powers of two; the first match gives the minimal period.
    let mut saved = state.clone();
    let mut power = 1u64;
    let mut lambda = 0u64;
    while state.steps < budget {
        if state.step(program) == Step::Halted {
            return halted(state.steps);
        }
        lambda += 1;
        if state.same_config(&saved) {
            let start = cycle_start(program, lambda, budget).expect("repeat already observed");
            return RunOutcome::CycleDetected { start, period: lambda };
        }
        if lambda == power {
            saved = state.clone();
            power *= 2;
            lambda = 0;
        }
    }

    // Brent may not have caught a repeat that completes within the budget yet.
    // If one does, the configuration at `budget` lies on the cycle and recurs
    // within `budget` more steps.
    let anchor = state.clone();
    for period in 1..=budget {
        if state.step(program) == Step::Halted {
            break;
        }
        if state.same_config(&anchor) {
            if let Some(start) = cycle_start(program, period, budget) {
                return RunOutcome::CycleDetected { start, period };
            }
            break;
        }
    }
    RunOutcome::BudgetExhausted { budget }
}

fn halted(t: u64) -> RunOutcome {
    RunOutcome::Halted { t, bitlen_t: bitlen(t) }
}

/// First `mu` with config(mu) == config(mu + period), if `mu + period <= budget`.
fn cycle_start(program: &CrmProgram, period: u64, budget: u64) -> Option<u64> {
    let mut slow = MachineState::new();
    let mut fast = MachineState::new();
    for _ in 0..period {
        fast.step(program);
    }
    let mut mu = 0u64;
    while !slow.same_config(&fast) {
        if mu + period >= budget {
            return None;
        }
        slow.step(program);
        fast.step(program);
        mu += 1;
    }
    Some(mu)
}

impl MachineState {
    /// State after replaying `steps` instructions from the all-zero state.
    pub fn replay(program: &CrmProgram, steps: u64) -> MachineState {
        let mut s = MachineState::new();
        while s.steps < steps && s.step(program) == Step::Running {}
        s
    }

    pub fn register_value(&self, index: usize) -> BigUint {
        self.registers[index].to_biguint()
    }
}
