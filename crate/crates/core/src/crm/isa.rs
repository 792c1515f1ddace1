use std::fmt;

use thiserror::Error;

pub const INSTRUCTION_BITS: usize = 9;

/// Valid encodings per instruction: 7 opcodes x 4 registers x 16 arguments.
pub const PROGRAMS_PER_INSTRUCTION: u64 = 448;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("program length {0} is not a positive multiple of 9 bits")]
    InvalidLength(usize),
    #[error("instruction {index} uses the reserved opcode 111")]
    InvalidOpcode { index: usize },
    #[error("malformed program code `{0}`")]
    BadCode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Opcode {
    Halt = 0,
    Inc = 1,
    Dec = 2,
    Dbl = 3,
    Jz = 4,
    Jnz = 5,
    LoadC = 6,
}

impl Opcode {
    pub fn from_bits(bits: u8) -> Option<Opcode> {
        Some(match bits {
            0 => Opcode::Halt,
            1 => Opcode::Inc,
            2 => Opcode::Dec,
            3 => Opcode::Dbl,
            4 => Opcode::Jz,
            5 => Opcode::Jnz,
            6 => Opcode::LoadC,
            _ => return None,
        })
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Halt => "HALT",
            Opcode::Inc => "INC",
            Opcode::Dec => "DEC",
            Opcode::Dbl => "DBL",
            Opcode::Jz => "JZ",
            Opcode::Jnz => "JNZ",
            Opcode::LoadC => "LOADC",
        }
    }
}

/// One 9-bit instruction: `opcode(3) | reg(2) | arg(4)`.
///
/// `arg` is kept raw; jumps read it as a 4-bit two's complement offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub op: Opcode,
    pub reg: u8,
    pub arg: u8,
}

impl Instruction {
    pub fn new(op: Opcode, reg: u8, arg: u8) -> Instruction {
        assert!(reg < 4 && arg < 16, "register or argument out of range");
        Instruction { op, reg, arg }
    }

    pub fn halt() -> Instruction {
        Self::new(Opcode::Halt, 0, 0)
    }

    pub fn inc(reg: u8) -> Instruction {
        Self::new(Opcode::Inc, reg, 0)
    }

    pub fn dec(reg: u8) -> Instruction {
        Self::new(Opcode::Dec, reg, 0)
    }

    pub fn dbl(reg: u8) -> Instruction {
        Self::new(Opcode::Dbl, reg, 0)
    }

    pub fn load(reg: u8, imm: u8) -> Instruction {
        Self::new(Opcode::LoadC, reg, imm)
    }

    pub fn jz(reg: u8, offset: i8) -> Instruction {
        Self::new(Opcode::Jz, reg, encode_offset(offset))
    }

    pub fn jnz(reg: u8, offset: i8) -> Instruction {
        Self::new(Opcode::Jnz, reg, encode_offset(offset))
    }

    /// Signed jump offset in `-8..=7`.
    pub fn offset(&self) -> i8 {
        ((self.arg << 4) as i8) >> 4
    }

    /// The 9-bit value of this instruction; always below 448.
    pub fn to_word(self) -> u16 {
        ((self.op as u16) << 6) | ((self.reg as u16) << 4) | self.arg as u16
    }

    pub fn from_word(word: u16) -> Option<Instruction> {
        debug_assert!(word < 512);
        let op = Opcode::from_bits((word >> 6) as u8)?;
        Some(Instruction {
            op,
            reg: ((word >> 4) & 0b11) as u8,
            arg: (word & 0b1111) as u8,
        })
    }
}

fn encode_offset(offset: i8) -> u8 {
    assert!((-8..=7).contains(&offset), "jump offset {offset} out of range");
    (offset as u8) & 0x0f
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.op.mnemonic();
        match self.op {
            Opcode::Halt => write!(f, "{m}"),
            Opcode::Inc | Opcode::Dec | Opcode::Dbl => write!(f, "{m} r{}", self.reg),
            Opcode::Jz | Opcode::Jnz => write!(f, "{m} r{}, {:+}", self.reg, self.offset()),
            Opcode::LoadC => write!(f, "{m} r{}, {}", self.reg, self.arg),
        }
    }
}

/// A non-empty instruction sequence; its size is `9 * len` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrmProgram {
    instructions: Vec<Instruction>,
}

impl CrmProgram {
    pub fn new(instructions: Vec<Instruction>) -> Result<CrmProgram, DecodeError> {
        if instructions.is_empty() {
            return Err(DecodeError::InvalidLength(0));
        }
        Ok(CrmProgram { instructions })
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn size_bits(&self) -> usize {
        INSTRUCTION_BITS * self.instructions.len()
    }

    pub fn decode(bits: &[bool]) -> Result<CrmProgram, DecodeError> {
        if bits.is_empty() || !bits.len().is_multiple_of(INSTRUCTION_BITS) {
            return Err(DecodeError::InvalidLength(bits.len()));
        }
        let instructions = bits
            .chunks(INSTRUCTION_BITS)
            .enumerate()
            .map(|(index, chunk)| {
                let word = chunk.iter().fold(0u16, |w, &b| (w << 1) | b as u16);
                Instruction::from_word(word).ok_or(DecodeError::InvalidOpcode { index })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CrmProgram { instructions })
    }

    /// Decodes a string of `0`/`1` characters.
    pub fn decode_str(bits: &str) -> Result<CrmProgram, DecodeError> {
        let bits = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(DecodeError::BadCode(bits.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::decode(&bits)
    }

    pub fn encode(&self) -> Vec<bool> {
        self.instructions
            .iter()
            .flat_map(|ins| {
                let w = ins.to_word();
                (0..INSTRUCTION_BITS).rev().map(move |i| (w >> i) & 1 == 1)
            })
            .collect()
    }

    pub fn encode_str(&self) -> String {
        self.encode().iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// `L:hex`: bit length, then the bits MSB-first as lowercase hex, zero-padded
    /// to a whole nibble.
    pub fn to_code(&self) -> String {
        let bits = self.encode();
        let hex: String = bits
            .chunks(4)
            .map(|nib| {
                let v = (0..4).fold(0u32, |v, i| (v << 1) | nib.get(i).copied().unwrap_or(false) as u32);
                char::from_digit(v, 16).expect("nibble")
            })
            .collect();
        format!("{}:{}", bits.len(), hex)
    }

    pub fn from_code(code: &str) -> Result<CrmProgram, DecodeError> {
        let bad = || DecodeError::BadCode(code.to_string());
        let (len, hex) = code.split_once(':').ok_or_else(bad)?;
        let len: usize = len.parse().map_err(|_| bad())?;
        if hex.len() != len.div_ceil(4) {
            return Err(bad());
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            if c.is_ascii_uppercase() {
                return Err(bad());
            }
            let v = c.to_digit(16).ok_or_else(bad)?;
            bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(bad());
        }
        bits.truncate(len);
        Self::decode(&bits)
    }

    /// The `index`-th valid program of `len` instructions in ascending order of
    /// its bit string. Valid instruction words are exactly `0..448`, so the
    /// index is the program read as a base-448 numeral.
    pub fn from_index(len: usize, mut index: u64) -> Option<CrmProgram> {
        if len == 0 {
            return None;
        }
        let mut instructions = vec![Instruction::halt(); len];
        for slot in instructions.iter_mut().rev() {
            let word = (index % PROGRAMS_PER_INSTRUCTION) as u16;
            *slot = Instruction::from_word(word).expect("word below 448");
            index /= PROGRAMS_PER_INSTRUCTION;
        }
        (index == 0).then_some(CrmProgram { instructions })
    }

    pub fn index(&self) -> u64 {
        self.instructions
            .iter()
            .fold(0u64, |acc, ins| acc * PROGRAMS_PER_INSTRUCTION + ins.to_word() as u64)
    }
}

impl fmt::Display for CrmProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.instructions.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}
