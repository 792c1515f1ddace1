//! Complexity measures behind a common trait, selectable by name.
//!
//! A measure decides how output size `n` maps to an upper bound on the
//! algorithmic complexity of the output, and therefore which series the
//! probability formulas sum over. Every series has terms of the form
//! `1 / (2^(e(i) + 1) - 2)` for a strictly increasing exponent `e`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An overhead function `g` for the self-delimiting measure.
pub trait Overhead: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;
    fn eval(&self, n: u64) -> u64;
}

/// `g(n) = ceil(log2(n + 1))`, the bit length of `n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CeilLog2;

impl Overhead for CeilLog2 {
    fn name(&self) -> &str {
        "default"
    }

    fn eval(&self, n: u64) -> u64 {
        (64 - n.leading_zeros()) as u64
    }
}

/// `g(n) = 0`; the self-delimiting measure then coincides with `Plain{0}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroOverhead;

impl Overhead for ZeroOverhead {
    fn name(&self) -> &str {
        "zero"
    }

    fn eval(&self, _n: u64) -> u64 {
        0
    }
}

/// An overhead backed by a closure, for experiments with other constants.
pub struct FnOverhead<F> {
    name: String,
    f: F,
}

impl<F: Fn(u64) -> u64 + Send + Sync> FnOverhead<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnOverhead { name: name.into(), f }
    }
}

impl<F> fmt::Debug for FnOverhead<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnOverhead").field("name", &self.name).finish()
    }
}

impl<F: Fn(u64) -> u64 + Send + Sync> Overhead for FnOverhead<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, n: u64) -> u64 {
        (self.f)(n)
    }
}

/// Range over which overhead invariants are checked on construction.
const OVERHEAD_CHECK_LIMIT: u64 = 1 << 12;

fn validate_overhead(g: &dyn Overhead) -> Result<()> {
    let mut prev = g.eval(1);
    for n in 2..=OVERHEAD_CHECK_LIMIT {
        let v = g.eval(n);
        if v < prev {
            return Err(Error::domain(format!(
                "overhead `{}` decreases at n={n} ({prev} -> {v})",
                g.name()
            )));
        }
        if n >= 8 && v >= n {
            return Err(Error::domain(format!(
                "overhead `{}` has g({n}) = {v} >= {n}",
                g.name()
            )));
        }
        prev = v;
    }
    Ok(())
}

/// Largest `l >= 1` with `l + g(l) <= k`.
///
/// `l + g(l)` is strictly increasing for monotone `g`, so this is a binary
/// search; when no `l` hits `k` exactly the larger candidate is chosen, which
/// makes the denominator sums smaller.
pub fn solve_l(g: &dyn Overhead, k: u64) -> Result<u64> {
    let fits = |l: u64| l.checked_add(g.eval(l)).is_some_and(|v| v <= k);
    if k == 0 || !fits(1) {
        return Err(Error::domain(format!(
            "no l >= 1 with l + g(l) <= {k} (g(1) = {})",
            g.eval(1)
        )));
    }
    let (mut lo, mut hi) = (1u64, k);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// A complexity measure: the exponent structure of the probability series.
pub trait ComplexityModel: fmt::Debug + Send + Sync {
    /// Registry name, e.g. `plain` or `sd`.
    fn name(&self) -> &str;

    /// Canonical description including parameters; stable across runs.
    fn describe(&self) -> String;

    /// Upper bound on the complexity of an `n`-bit output (`n + c` or `n + g(n)`).
    fn complexity_bound(&self, n: u64) -> u64;

    /// Exponent `e(i)` of the series term `1 / (2^(e(i)+1) - 2)` at index `i`.
    fn term_exponent(&self, index: u64) -> u64;

    /// `L` such that `sum_{i >= j} 2^-(e(i)+1) >= 2^-L`.
    fn tail_lower_exponent(&self, index: u64) -> u64 {
        self.term_exponent(index) + 1
    }

    /// Series index of an `n`-bit output.
    fn output_index(&self, n: u64) -> u64;

    /// First series index of the Bayes denominator for complexity `k`.
    fn denominator_start(&self, k: u64) -> Result<u64>;

    /// First series index of the `P(size >= m)` numerator.
    fn numerator_start(&self, m: u64) -> Result<u64>;

    /// The additive constant, for measures that have one.
    fn constant(&self) -> Option<u64> {
        None
    }
}

/// Complexity at most `n + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plain {
    pub c: u64,
}

impl Plain {
    pub fn new(c: u64) -> Self {
        Plain { c }
    }
}

impl ComplexityModel for Plain {
    fn name(&self) -> &str {
        "plain"
    }

    fn describe(&self) -> String {
        format!("plain(c={})", self.c)
    }

    fn complexity_bound(&self, n: u64) -> u64 {
        n + self.c
    }

    // Index i plays the role of n + c.
    fn term_exponent(&self, index: u64) -> u64 {
        index
    }

    fn tail_lower_exponent(&self, index: u64) -> u64 {
        index
    }

    fn output_index(&self, n: u64) -> u64 {
        n + self.c
    }

    fn denominator_start(&self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::domain("complexity k must be positive"));
        }
        Ok(k)
    }

    fn numerator_start(&self, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::domain("threshold m must be positive"));
        }
        Ok(m + self.c)
    }

    fn constant(&self) -> Option<u64> {
        Some(self.c)
    }
}

/// Complexity at most `n + g(n)`, with `g` standing in for the logarithmic term.
#[derive(Debug, Clone)]
pub struct SelfDelimiting {
    g: Arc<dyn Overhead>,
}

impl SelfDelimiting {
    pub fn new(g: Arc<dyn Overhead>) -> Result<Self> {
        validate_overhead(g.as_ref())?;
        Ok(SelfDelimiting { g })
    }

    pub fn with_default_overhead() -> Self {
        SelfDelimiting { g: Arc::new(CeilLog2) }
    }

    pub fn overhead(&self) -> &dyn Overhead {
        self.g.as_ref()
    }

    pub fn solve_l(&self, k: u64) -> Result<u64> {
        solve_l(self.g.as_ref(), k)
    }
}

impl ComplexityModel for SelfDelimiting {
    fn name(&self) -> &str {
        "sd"
    }

    fn describe(&self) -> String {
        format!("sd(g={})", self.g.name())
    }

    fn complexity_bound(&self, n: u64) -> u64 {
        n + self.g.eval(n)
    }

    // Index i is the output size itself.
    fn term_exponent(&self, index: u64) -> u64 {
        index + self.g.eval(index)
    }

    fn output_index(&self, n: u64) -> u64 {
        n
    }

    fn denominator_start(&self, k: u64) -> Result<u64> {
        self.solve_l(k)
    }

    fn numerator_start(&self, m: u64) -> Result<u64> {
        self.solve_l(m)
    }
}

/// Parameters a model factory may consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    pub c: u64,
    pub overhead: String,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            c: 0,
            overhead: "default".to_string(),
        }
    }
}

type ModelFactory =
    Box<dyn Fn(&ModelParams, &ModelRegistry) -> Result<Arc<dyn ComplexityModel>> + Send + Sync>;

/// Name-keyed registry of complexity measures and overhead functions.
pub struct ModelRegistry {
    models: BTreeMap<String, ModelFactory>,
    overheads: BTreeMap<String, Arc<dyn Overhead>>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        ModelRegistry {
            models: BTreeMap::new(),
            overheads: BTreeMap::new(),
        }
    }

    /// `plain` (alias `p`) and `sd` (alias `self-delimiting`), with overheads `default` and `zero`.
    pub fn with_defaults() -> Self {
        let mut reg = Self::empty();
        let plain = |p: &ModelParams, _: &ModelRegistry| -> Result<Arc<dyn ComplexityModel>> {
            Ok(Arc::new(Plain::new(p.c)))
        };
        let sd = |p: &ModelParams, r: &ModelRegistry| -> Result<Arc<dyn ComplexityModel>> {
            let g = r.overhead(&p.overhead)?;
            Ok(Arc::new(SelfDelimiting::new(g)?))
        };
        reg.register_model("plain", plain);
        reg.register_model("sd", sd);
        reg.register_model("self-delimiting", sd);
        reg.register_overhead(Arc::new(CeilLog2));
        reg.register_overhead(Arc::new(ZeroOverhead));
        reg
    }

    pub fn register_model<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&ModelParams, &ModelRegistry) -> Result<Arc<dyn ComplexityModel>> + Send + Sync + 'static,
    {
        if self.models.insert(name.to_string(), Box::new(factory)).is_some() {
            log::warn!("complexity model `{name}` re-registered");
        }
    }

    pub fn register_overhead(&mut self, g: Arc<dyn Overhead>) {
        self.overheads.insert(g.name().to_string(), g);
    }

    pub fn model_names(&self) -> Vec<&str> {
        self.models.keys().map(String::as_str).collect()
    }

    pub fn overhead(&self, name: &str) -> Result<Arc<dyn Overhead>> {
        self.overheads
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "overhead",
                name: name.to_string(),
                known: self.overheads.keys().cloned().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn build(&self, name: &str, params: &ModelParams) -> Result<Arc<dyn ComplexityModel>> {
        let factory = self.models.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "complexity model",
            name: name.to_string(),
            known: self.models.keys().cloned().collect::<Vec<_>>().join(", "),
        })?;
        factory(params, self)
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Exhaustive scan, independent of the binary search.
    fn solve_l_scan(g: &dyn Overhead, k: u64) -> Option<u64> {
        (1..=k).filter(|&l| l + g.eval(l) <= k).max()
    }

    #[test]
    fn solve_l_examples() {
        assert_eq!(solve_l(&CeilLog2, 20).unwrap(), 15);
        assert_eq!(solve_l_scan(&CeilLog2, 20), Some(15));
        for k in 1..200 {
            assert_eq!(solve_l(&ZeroOverhead, k).unwrap(), k);
        }
        assert!(solve_l(&CeilLog2, 1).is_err());
        assert!(solve_l(&CeilLog2, 0).is_err());
    }

    #[test]
    fn solve_l_matches_scan() {
        for k in 1..3000 {
            assert_eq!(solve_l(&CeilLog2, k).ok(), solve_l_scan(&CeilLog2, k), "k={k}");
        }
    }

    #[test]
    fn ceil_log2_values() {
        let g = CeilLog2;
        assert_eq!(g.eval(1), 1);
        assert_eq!(g.eval(2), 2);
        assert_eq!(g.eval(3), 2);
        assert_eq!(g.eval(7), 3);
        assert_eq!(g.eval(8), 4);
        assert_eq!(g.eval(1023), 10);
        assert_eq!(g.eval(1024), 11);
    }

    #[test]
    fn rejects_bad_overheads() {
        let decreasing = Arc::new(FnOverhead::new("dec", |n| 100u64.saturating_sub(n)));
        assert!(SelfDelimiting::new(decreasing).is_err());
        let too_big = Arc::new(FnOverhead::new("big", |n| n));
        assert!(SelfDelimiting::new(too_big).is_err());
        let ok = Arc::new(FnOverhead::new("plus-one", |n| CeilLog2.eval(n) + 1));
        assert!(SelfDelimiting::new(ok).is_ok());
    }

    #[test]
    fn registry_lookup() {
        let reg = ModelRegistry::with_defaults();
        let plain = reg.build("plain", &ModelParams { c: 3, ..Default::default() }).unwrap();
        assert_eq!(plain.describe(), "plain(c=3)");
        let sd = reg.build("sd", &ModelParams::default()).unwrap();
        assert_eq!(sd.describe(), "sd(g=default)");
        assert!(matches!(
            reg.build("tm", &ModelParams::default()),
            Err(Error::UnknownStrategy { .. })
        ));
        let bad = ModelParams { overhead: "cubic".into(), ..Default::default() };
        assert!(reg.build("sd", &bad).is_err());
    }
}
