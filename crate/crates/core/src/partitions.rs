//! Integer partition enumeration with multiplicity profiles.
//!
//! The closed-form outage expression is a sum over all integer partitions
//! of small integers (bounded by the receive antenna count minus one).
//! Partitions are enumerated in descending lexicographic order of their
//! summand lists, which fixes a total, reproducible indexing; the weight of
//! each partition also needs the multiplicities of its distinct summands
//! (for the factorial correction of repeated parts).
//!
//! Enumeration is eager and cached per integer. The supported input range
//! is 0..=64; the enumeration count grows sub-exponentially (p(64) is
//! about 1.7 million) so anything beyond that is rejected up front.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

/// Largest integer this module will partition.
pub const MAX_PARTITION_INPUT: u32 = 64;

/// An integer partition: positive summands in non-increasing order.
///
/// The empty list is the unique partition of 0; every product or sum over
/// its summands is the empty product/sum.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    summands: Vec<u32>,
}

impl Partition {
    /// Build a partition from summands in any order; they are sorted
    /// non-increasing. Panics if any summand is zero.
    pub fn new(mut summands: Vec<u32>) -> Self {
        assert!(
            summands.iter().all(|&s| s > 0),
            "partition summands must be positive"
        );
        summands.sort_unstable_by(|a, b| b.cmp(a));
        Partition { summands }
    }

    /// Summands, non-increasing.
    pub fn summands(&self) -> &[u32] {
        &self.summands
    }

    /// Number of summands (zero for the empty partition of 0).
    pub fn num_summands(&self) -> usize {
        self.summands.len()
    }

    /// The partitioned integer: sum of all summands.
    pub fn total(&self) -> u32 {
        self.summands.iter().sum()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({:?})", self.summands)
    }
}

/// Distinct summands of a partition with their repeat counts, ordered as
/// they first appear in the non-increasing summand list (so summands are
/// strictly decreasing).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityProfile {
    entries: Vec<(u32, u32)>,
}

impl MultiplicityProfile {
    /// (summand, multiplicity) pairs, summands strictly decreasing.
    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Number of distinct summands.
    pub fn num_distinct(&self) -> usize {
        self.entries.len()
    }

    /// Expand each entry `multiplicity` times, reproducing the source
    /// partition.
    pub fn expand(&self) -> Partition {
        let mut summands = Vec::new();
        for &(s, m) in &self.entries {
            summands.extend(std::iter::repeat(s).take(m as usize));
        }
        Partition { summands }
    }
}

/// Distinct summands and repeat counts of `p`.
pub fn multiplicity_profile(p: &Partition) -> MultiplicityProfile {
    let mut entries: Vec<(u32, u32)> = Vec::new();
    for &s in p.summands() {
        match entries.last_mut() {
            Some((v, m)) if *v == s => *m += 1,
            _ => entries.push((s, 1)),
        }
    }
    MultiplicityProfile { entries }
}

fn generate(k: u32) -> Vec<Partition> {
    fn rec(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                summands: prefix.clone(),
            });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k.max(1), &mut Vec::new(), &mut out);
    out
}

fn cache() -> &'static RwLock<HashMap<u32, Arc<Vec<Partition>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<Partition>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// All partitions of `k`, each exactly once, in descending lexicographic
/// order of summand lists. For `k = 0` the single empty partition.
///
/// Results are cached and shared; the returned `Arc` is cheap to clone.
/// Panics if `k` exceeds [`MAX_PARTITION_INPUT`] (callers validate sizes
/// at the interface boundary).
pub fn enumerate_partitions(k: u32) -> Arc<Vec<Partition>> {
    assert!(
        k <= MAX_PARTITION_INPUT,
        "partition input {k} exceeds supported maximum {MAX_PARTITION_INPUT}"
    );
    if let Some(hit) = cache().read().expect("partition cache poisoned").get(&k) {
        return Arc::clone(hit);
    }
    let fresh = Arc::new(generate(k));
    let mut guard = cache().write().expect("partition cache poisoned");
    Arc::clone(guard.entry(k).or_insert(fresh))
}

/// Partitions of `k` with exactly `len` summands, in enumeration order.
/// Empty when no such partition exists (e.g. `len > k`).
pub fn partitions_with_length(k: u32, len: u32) -> Vec<Partition> {
    enumerate_partitions(k)
        .iter()
        .filter(|p| p.num_summands() == len as usize)
        .cloned()
        .collect()
}

/// Number of partitions of `k` (1 for `k = 0`).
pub fn partition_count(k: u32) -> u64 {
    enumerate_partitions(k).len() as u64
}
