//! Exhaustive runs of every CRM program of the configured sizes.
//!
//! Output is one JSON object per line, ordered by a global enumeration index
//! that runs through the sizes in ascending order. Work proceeds in batches of
//! contiguous indices: each batch is split into small contiguous pieces run
//! on a worker pool, the pieces are written back in index order by the
//! calling thread, and only then is the
//! checkpoint advanced (temp file + rename). The file contents never depend on
//! the worker count.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::crm::{bitlen, run_with_limit, CrmProgram, RunOutcome, INSTRUCTION_BITS, PROGRAMS_PER_INSTRUCTION};
use crate::error::{Error, Result};
use crate::horizon::budget_steps;
use crate::model::ComplexityModel;
use crate::rational::ExactRational;
use crate::report::{aggregate, SizeClassSummary};

pub const DEFAULT_BUDGET_CAP: u64 = 1_000_000;
pub const DEFAULT_CHECKPOINT_EVERY: u64 = 4096;

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub sizes: Vec<u64>,
    pub epsilon: ExactRational,
    pub budget_cap: BigUint,
    pub detect_cycles: bool,
    pub model: Arc<dyn ComplexityModel>,
    /// Bits a step counter would add to each program; shifts `k` when deriving budgets.
    pub counter_overhead_bits: u64,
    pub output_path: PathBuf,
    pub checkpoint_path: PathBuf,
    pub workers: usize,
    /// Programs per batch; the checkpoint advances once per batch.
    pub checkpoint_every: u64,
}

impl CensusConfig {
    pub fn new(
        sizes: Vec<u64>,
        epsilon: ExactRational,
        model: Arc<dyn ComplexityModel>,
        output_path: impl Into<PathBuf>,
        checkpoint_path: impl Into<PathBuf>,
    ) -> Self {
        CensusConfig {
            sizes,
            epsilon,
            budget_cap: BigUint::from(DEFAULT_BUDGET_CAP),
            detect_cycles: true,
            model,
            counter_overhead_bits: 0,
            output_path: output_path.into(),
            checkpoint_path: checkpoint_path.into(),
            workers: 1,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
        }
    }

    fn validate(&self) -> Result<Vec<u64>> {
        if self.sizes.is_empty() {
            return Err(Error::domain("census needs at least one size"));
        }
        if let Some(bad) = self.sizes.iter().find(|&&k| k == 0 || k % INSTRUCTION_BITS as u64 != 0) {
            return Err(Error::domain(format!("size {bad} is not a positive multiple of 9")));
        }
        if self.budget_cap.is_zero() {
            return Err(Error::domain("budget cap must be positive"));
        }
        if self.workers == 0 || self.checkpoint_every == 0 {
            return Err(Error::domain("workers and checkpoint interval must be positive"));
        }
        let mut sizes = self.sizes.clone();
        sizes.sort_unstable();
        sizes.dedup();
        Ok(sizes)
    }

    /// Hash of everything that determines the output file's contents.
    pub fn config_hash(&self) -> Result<String> {
        let sizes = self.validate()?;
        let canonical = format!(
            "sizes={};epsilon={};cap={};cycles={};model={};s={}",
            sizes.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            self.epsilon,
            self.budget_cap,
            self.detect_cycles,
            self.model.describe(),
            self.counter_overhead_bits,
        );
        Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
    }

    /// `min(budget_steps(model, k + s, epsilon), cap)`.
    pub fn budget_for(&self, k: u64) -> Result<BigUint> {
        let derived = budget_steps(self.model.as_ref(), k + self.counter_overhead_bits, &self.epsilon)?;
        Ok(derived.min(self.budget_cap.clone()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeTag {
    Halted,
    Exhausted,
    Cycle,
}

/// One output line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusRecord {
    pub idx: u64,
    pub k: u64,
    pub code: String,
    pub outcome: OutcomeTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitlen_t: Option<u32>,
    pub budget: String,
}

impl CensusRecord {
    pub fn new(idx: u64, k: u64, program: &CrmProgram, outcome: &RunOutcome, budget: &BigUint) -> Self {
        let (tag, t, bitlen_t) = match outcome {
            RunOutcome::Halted { t, bitlen_t } => (OutcomeTag::Halted, Some(t.to_string()), Some(*bitlen_t)),
            RunOutcome::BudgetExhausted { .. } => (OutcomeTag::Exhausted, None, None),
            RunOutcome::CycleDetected { .. } => (OutcomeTag::Cycle, None, None),
        };
        CensusRecord {
            idx,
            k,
            code: program.to_code(),
            outcome: tag,
            t,
            bitlen_t,
            budget: budget.to_string(),
        }
    }

    /// Field consistency: `t`/`bitlen_t` present iff halted, `bitlen_t` matches
    /// `t`, `t <= budget`, and `code` decodes to a `k`-bit program.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let budget: BigUint = self.budget.parse().map_err(|_| format!("bad budget `{}`", self.budget))?;
        let program = CrmProgram::from_code(&self.code).map_err(|e| e.to_string())?;
        if program.size_bits() as u64 != self.k {
            return Err(format!("code has {} bits but k = {}", program.size_bits(), self.k));
        }
        match (self.outcome, &self.t, self.bitlen_t) {
            (OutcomeTag::Halted, Some(t), Some(b)) => {
                let t: u64 = t.parse().map_err(|_| format!("bad step count `{t}`"))?;
                if t == 0 || bitlen(t) != b {
                    return Err(format!("bitlen_t {b} does not match t = {t}"));
                }
                if BigUint::from(t) > budget {
                    return Err(format!("t = {t} exceeds budget {budget}"));
                }
                Ok(())
            }
            (OutcomeTag::Halted, _, _) => Err("halted record without t and bitlen_t".into()),
            (_, None, None) => Ok(()),
            _ => Err("only halted records carry t and bitlen_t".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    pub next_idx: u64,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Option<Checkpoint>> {
        match fs::read(path) {
            Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes to a sibling temp file, syncs, then renames over `path`.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
        tmp_name.push(".tmp");
        let tmp = path.with_file_name(tmp_name);
        {
            let mut f = File::create(&tmp)?;
            serde_json::to_writer(&mut f, self)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct SizePlan {
    k: u64,
    instructions: usize,
    count: u64,
    offset: u64,
    budget: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusSummary {
    pub records: u64,
    pub per_size: Vec<SizeClassSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Complete(CensusSummary),
    /// Stopped after the requested number of batches; resumable.
    Paused { next_idx: u64 },
}

pub struct Census {
    config: CensusConfig,
    plans: Vec<SizePlan>,
    total: u64,
    hash: String,
    pool: rayon::ThreadPool,
}

impl Census {
    pub fn new(config: CensusConfig) -> Result<Census> {
        let sizes = config.validate()?;
        let hash = config.config_hash()?;
        let mut plans = Vec::with_capacity(sizes.len());
        let mut offset = 0u64;
        for k in sizes {
            let instructions = (k / INSTRUCTION_BITS as u64) as usize;
            let count = PROGRAMS_PER_INSTRUCTION
                .checked_pow(instructions as u32)
                .ok_or_else(|| Error::domain(format!("size {k} has too many programs to enumerate")))?;
            let budget = config.budget_for(k)?;
            plans.push(SizePlan {
                k,
                instructions,
                count,
                offset,
                budget,
            });
            offset = offset
                .checked_add(count)
                .ok_or_else(|| Error::domain("census too large"))?;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::internal(format!("cannot start census workers: {e}")))?;
        Ok(Census {
            config,
            plans,
            total: offset,
            hash,
            pool,
        })
    }

    pub fn total_programs(&self) -> u64 {
        self.total
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    /// Effective budget per size, in ascending size order.
    pub fn budgets(&self) -> Vec<(u64, BigUint)> {
        self.plans.iter().map(|p| (p.k, p.budget.clone())).collect()
    }

    /// Runs to completion, resuming if a matching checkpoint exists.
    pub fn run(&self) -> Result<CensusSummary> {
        match self.run_batches(usize::MAX)? {
            RunStatus::Complete(summary) => Ok(summary),
            RunStatus::Paused { .. } => unreachable!("unbounded run paused"),
        }
    }

    /// Continues from an existing checkpoint; fails if there is none.
    pub fn resume(&self) -> Result<CensusSummary> {
        if Checkpoint::load(&self.config.checkpoint_path)?.is_none() {
            return Err(Error::MissingCheckpoint(self.config.checkpoint_path.clone()));
        }
        self.run()
    }

    /// Runs at most `max_batches` batches, starting fresh or from a matching checkpoint.
    pub fn run_batches(&self, max_batches: usize) -> Result<RunStatus> {
        let mut next = self.open()?;
        let mut out = OpenOptions::new().append(true).open(&self.config.output_path)?;
        let mut done = 0usize;
        while next < self.total {
            if done == max_batches {
                return Ok(RunStatus::Paused { next_idx: next });
            }
            let end = next.saturating_add(self.config.checkpoint_every).min(self.total);
            for chunk in self.execute(next, end)? {
                out.write_all(&chunk)?;
            }
            out.sync_data()?;
            Checkpoint {
                config_hash: self.hash.clone(),
                next_idx: end,
            }
            .store(&self.config.checkpoint_path)?;
            log::debug!("census checkpoint at {end}/{}", self.total);
            next = end;
            done += 1;
        }
        Ok(RunStatus::Complete(CensusSummary {
            records: self.total,
            per_size: aggregate(&self.config.output_path)?,
        }))
    }

    /// Validates or creates the checkpoint and trims the output to the
    /// checkpointed prefix. Returns the first index still to run.
    fn open(&self) -> Result<u64> {
        let ckpt_path = &self.config.checkpoint_path;
        let out_path = &self.config.output_path;
        match Checkpoint::load(ckpt_path)? {
            Some(ck) => {
                if ck.config_hash != self.hash {
                    return Err(Error::CheckpointMismatch {
                        path: ckpt_path.clone(),
                        expected: self.hash.clone(),
                        found: ck.config_hash,
                    });
                }
                if ck.next_idx > self.total {
                    return Err(Error::internal(format!(
                        "checkpoint index {} beyond census size {}",
                        ck.next_idx, self.total
                    )));
                }
                truncate_to_lines(out_path, ck.next_idx)?;
                Ok(ck.next_idx)
            }
            None => {
                File::create(out_path)?.sync_all()?;
                Checkpoint {
                    config_hash: self.hash.clone(),
                    next_idx: 0,
                }
                .store(ckpt_path)?;
                Ok(0)
            }
        }
    }

    /// Runs `[from, to)` on the worker pool. Sub-ranges are contiguous and
    /// stolen adaptively; results come back in index order.
    fn execute(&self, from: u64, to: u64) -> Result<Vec<Vec<u8>>> {
        const GRAIN: u64 = 64;
        let pieces: Vec<(u64, u64)> = (from..to)
            .step_by(GRAIN as usize)
            .map(|a| (a, (a + GRAIN).min(to)))
            .collect();
        self.pool.install(|| {
            pieces
                .into_par_iter()
                .map(|(a, b)| self.execute_range(a, b))
                .collect()
        })
    }

    fn execute_range(&self, from: u64, to: u64) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        let detect = self.config.detect_cycles;
        for idx in from..to {
            let plan = self.plan_for(idx);
            let program = CrmProgram::from_index(plan.instructions, idx - plan.offset).expect("index within size class");
            let limit = plan.budget.to_u64().unwrap_or(u64::MAX);
            let outcome = run_with_limit(&program, limit, detect);
            let rec = CensusRecord::new(idx, plan.k, &program, &outcome, &plan.budget);
            serde_json::to_writer(&mut buf, &rec)?;
            buf.push(b'\n');
        }
        Ok(buf)
    }

    fn plan_for(&self, idx: u64) -> &SizePlan {
        let pos = self.plans.partition_point(|p| p.offset + p.count <= idx);
        &self.plans[pos]
    }
}

/// Keeps the first `lines` complete lines of `path`, dropping anything after.
fn truncate_to_lines(path: &Path, lines: u64) -> Result<()> {
    let file = OpenOptions::new().read(true).write(true).open(path)?;
    let mut reader = BufReader::new(&file);
    let mut offset = 0u64;
    let mut buf = Vec::new();
    for n in 0..lines {
        buf.clear();
        let read = reader.read_until(b'\n', &mut buf)?;
        if read == 0 || buf.last() != Some(&b'\n') {
            return Err(Error::internal(format!(
                "{} holds only {n} complete records but the checkpoint claims {lines}",
                path.display()
            )));
        }
        offset += read as u64;
    }
    drop(reader);
    let mut file = file;
    file.set_len(offset)?;
    file.seek(SeekFrom::End(0))?;
    file.sync_all()?;
    Ok(())
}

/// Convenience wrapper: build and run a census.
pub fn run_census(config: CensusConfig) -> Result<CensusSummary> {
    Census::new(config)?.run()
}

pub fn resume(config: CensusConfig) -> Result<CensusSummary> {
    Census::new(config)?.resume()
}
