//! Per-size aggregation of census records and comparison with the predicted bounds.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use num_bigint::BigUint;

use crate::census::{CensusRecord, OutcomeTag};
use crate::error::{Error, Result};
use crate::horizon::lower_bound_closed;
use crate::interval::ProbInterval;
use crate::model::ComplexityModel;
use crate::prob::below_prob;
use crate::rational::ExactRational;

/// Significant digits used for fractions at the CSV boundary.
pub const CSV_DIGITS: usize = 12;

pub const CSV_HEADER: [&str; 7] = [
    "k",
    "m",
    "halted_total",
    "halted_below_m",
    "empirical_fraction",
    "predicted_lower_bound",
    "flag",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeClassSummary {
    pub k: u64,
    pub total: u64,
    pub halted: u64,
    pub exhausted: u64,
    pub cycled: u64,
    pub bitlen_histogram: BTreeMap<u32, u64>,
}

impl SizeClassSummary {
    pub fn new(k: u64) -> Self {
        SizeClassSummary { k, ..Default::default() }
    }

    pub fn record(&mut self, outcome: OutcomeTag, bitlen_t: Option<u32>) {
        self.total += 1;
        match outcome {
            OutcomeTag::Halted => {
                self.halted += 1;
                *self.bitlen_histogram.entry(bitlen_t.expect("halted records carry bitlen_t")).or_default() += 1;
            }
            OutcomeTag::Exhausted => self.exhausted += 1,
            OutcomeTag::Cycle => self.cycled += 1,
        }
    }

    pub fn merge(&mut self, other: &SizeClassSummary) {
        debug_assert_eq!(self.k, other.k);
        self.total += other.total;
        self.halted += other.halted;
        self.exhausted += other.exhausted;
        self.cycled += other.cycled;
        for (&b, &n) in &other.bitlen_histogram {
            *self.bitlen_histogram.entry(b).or_default() += n;
        }
    }

    /// Halted programs whose step count has fewer than `m` bits.
    pub fn halted_below(&self, m: u64) -> u64 {
        self.bitlen_histogram
            .range(..m.min(u32::MAX as u64) as u32)
            .map(|(_, n)| n)
            .sum()
    }

    pub fn max_bitlen(&self) -> Option<u32> {
        self.bitlen_histogram.keys().next_back().copied()
    }
}

/// Streams a census file into one summary per size, sorted by size.
pub fn aggregate(path: impl AsRef<Path>) -> Result<Vec<SizeClassSummary>> {
    let path = path.as_ref();
    aggregate_reader(BufReader::new(File::open(path)?), path)
}

pub fn aggregate_reader<R: BufRead>(reader: R, label: &Path) -> Result<Vec<SizeClassSummary>> {
    let mut by_k: BTreeMap<u64, SizeClassSummary> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let malformed = |message: String| Error::Malformed {
            path: label.to_path_buf(),
            line: i + 1,
            message,
        };
        if line.trim().is_empty() {
            return Err(malformed("empty line".into()));
        }
        let rec: CensusRecord = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        rec.validate().map_err(malformed)?;
        by_k.entry(rec.k)
            .or_insert_with(|| SizeClassSummary::new(rec.k))
            .record(rec.outcome, rec.bitlen_t);
    }
    Ok(by_k.into_values().collect())
}

/// Combines two aggregations as if their record files had been concatenated.
pub fn merge_summaries(a: &[SizeClassSummary], b: &[SizeClassSummary]) -> Vec<SizeClassSummary> {
    let mut by_k: BTreeMap<u64, SizeClassSummary> = BTreeMap::new();
    for s in a.iter().chain(b) {
        by_k.entry(s.k).or_insert_with(|| SizeClassSummary::new(s.k)).merge(s);
    }
    by_k.into_values().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub k: u64,
    pub m: u64,
    pub halted_total: u64,
    pub halted_below_m: u64,
    /// Fraction of programs halted within budget whose step count has fewer
    /// than `m` bits; `None` when nothing halted.
    pub empirical_fraction: Option<ExactRational>,
    /// `P(size < m)` conditioned on halting at all, under the model.
    pub predicted: ProbInterval,
    pub predicted_lower_bound: ExactRational,
    pub flag: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// Compares each size's empirical distribution with the model for `m` in `[k+b+1, k+64]`.
pub fn compare(summaries: &[SizeClassSummary], model: &dyn ComplexityModel, b: u64) -> Result<ComparisonTable> {
    if summaries.is_empty() {
        return Err(Error::domain("no size classes to compare"));
    }
    let mut rows = Vec::new();
    for s in summaries {
        for m in (s.k + b + 1)..=(s.k + 64) {
            let below = s.halted_below(m);
            let empirical = (s.halted > 0).then(|| {
                ExactRational::from_ratio(BigUint::from(below), BigUint::from(s.halted)).expect("non-zero")
            });
            let bound = lower_bound_closed(s.k, m, b)?;
            let flag = empirical.as_ref().map(|f| f < &bound);
            rows.push(ComparisonRow {
                k: s.k,
                m,
                halted_total: s.halted,
                halted_below_m: below,
                empirical_fraction: empirical,
                predicted: below_prob(model, s.k, m)?,
                predicted_lower_bound: bound,
                flag,
            });
        }
    }
    Ok(ComparisonTable { rows })
}

fn flag_text(flag: Option<bool>) -> &'static str {
    match flag {
        Some(true) => "1",
        Some(false) => "0",
        None => "",
    }
}

pub fn emit_csv(table: &ComparisonTable, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for row in &table.rows {
        w.write_record([
            row.k.to_string(),
            row.m.to_string(),
            row.halted_total.to_string(),
            row.halted_below_m.to_string(),
            row.empirical_fraction
                .as_ref()
                .map(|f| f.to_significant(CSV_DIGITS))
                .unwrap_or_default(),
            row.predicted_lower_bound.to_significant(CSV_DIGITS),
            flag_text(row.flag).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Raw histograms as `k,bitlen_t,count`, plus per-size outcome counts as
/// `k,total,halted,exhausted,cycled` in a second file when requested.
pub fn emit_histogram_csv(summaries: &[SizeClassSummary], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "bitlen_t", "count"])?;
    for s in summaries {
        for (b, n) in &s.bitlen_histogram {
            w.write_record([s.k.to_string(), b.to_string(), n.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_outcome_csv(summaries: &[SizeClassSummary], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "total", "halted", "exhausted", "cycled"])?;
    for s in summaries {
        w.write_record([s.k, s.total, s.halted, s.exhausted, s.cycled].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
