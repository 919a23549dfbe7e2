//! Request history, sessionization and association mining.
//!
//! Each node keeps a bounded [`LogDatabase`] of its own requests. Requests
//! closer together than `zeta` seconds form one [`ServiceSession`]; each
//! session is one market-basket transaction for FP-Growth. The mined
//! [`MiningResults`] answer the correlation queries behind advertisements and
//! piggybacked replies.

mod brute;
mod fpgrowth;
pub mod text;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::domain::{ServiceId, SimTime};

pub use brute::{mine_brute_force, mine_transactions_brute_force, BRUTE_FORCE_LIMIT};
pub use fpgrowth::{mine_fp_growth, mine_transactions};

pub const DEFAULT_ZETA: f64 = 30.0;
pub const DEFAULT_LOG_CAPACITY: usize = 64;
pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MiningError {
    #[error("brute-force oracle refuses {count} distinct services (limit {limit})")]
    TooManyServices { count: usize, limit: usize },
    #[error("minimum support must be at least 1")]
    ZeroSupport,
}

/// Requests whose consecutive gaps are all below the session threshold.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ServiceSession {
    requests: Vec<(ServiceId, SimTime)>,
}

impl ServiceSession {
    pub fn requests(&self) -> &[(ServiceId, SimTime)] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Distinct services, the transaction view used for support counting.
    pub fn items(&self) -> Vec<ServiceId> {
        let set: BTreeSet<ServiceId> = self.requests.iter().map(|(s, _)| *s).collect();
        set.into_iter().collect()
    }

    fn last_time(&self) -> Option<SimTime> {
        self.requests.last().map(|(_, t)| *t)
    }
}

/// Circular history of service sessions.
#[derive(Debug, Clone)]
pub struct LogDatabase {
    sessions: VecDeque<ServiceSession>,
    capacity: usize,
    zeta: f64,
    version: u64,
}

impl Default for LogDatabase {
    fn default() -> Self {
        Self::new(DEFAULT_LOG_CAPACITY, DEFAULT_ZETA)
    }
}

impl LogDatabase {
    pub fn new(capacity: usize, zeta: f64) -> Self {
        assert!(capacity >= 1, "log capacity must be positive");
        assert!(zeta > 0.0, "session threshold must be positive");
        Self {
            sessions: VecDeque::with_capacity(capacity),
            capacity,
            zeta,
            version: 0,
        }
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Appends a request. A request arriving `zeta` or more seconds after
    /// the previous one opens a new session, overwriting the oldest session
    /// once the log is full. Times earlier than the last request are treated
    /// as simultaneous with it.
    pub fn log_request(&mut self, service: ServiceId, t: SimTime) {
        self.version += 1;
        let last = self.sessions.back().and_then(ServiceSession::last_time);
        match last {
            Some(prev) if t - prev < self.zeta => {
                let t = t.max(prev);
                self.sessions
                    .back_mut()
                    .expect("session exists")
                    .requests
                    .push((service, t));
            }
            _ => {
                if self.sessions.len() == self.capacity {
                    self.sessions.pop_front();
                }
                self.sessions.push_back(ServiceSession {
                    requests: vec![(service, t)],
                });
            }
        }
    }

    pub fn sessions(&self) -> impl Iterator<Item = &ServiceSession> {
        self.sessions.iter()
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    /// Bumped on every change; lets callers re-mine lazily.
    pub fn version(&self) -> u64 {
        self.version
    }

    /// Deduplicated, sorted transactions, oldest session first.
    pub fn transactions(&self) -> Vec<Vec<ServiceId>> {
        self.sessions.iter().map(ServiceSession::items).collect()
    }
}

/// Frequent itemsets with their supports plus pairwise correlation scores.
#[derive(Debug, Clone, PartialEq)]
pub struct MiningResults {
    /// Sorted itemset -> number of sessions containing it.
    frequent_itemsets: BTreeMap<Vec<ServiceId>, u32>,
    /// Keyed by `(low, high)`.
    pair_correlation: BTreeMap<(ServiceId, ServiceId), f64>,
    epsilon: f64,
}

impl Default for MiningResults {
    fn default() -> Self {
        Self::empty(DEFAULT_EPSILON)
    }
}

impl MiningResults {
    pub fn empty(epsilon: f64) -> Self {
        Self {
            frequent_itemsets: BTreeMap::new(),
            pair_correlation: BTreeMap::new(),
            epsilon,
        }
    }

    /// Builds results from mined itemsets. Correlation is the max-confidence
    /// score `support(ab) / min(support(a), support(b))` for every frequent
    /// pair.
    pub fn from_itemsets(frequent_itemsets: BTreeMap<Vec<ServiceId>, u32>) -> Self {
        let mut pair_correlation = BTreeMap::new();
        for (set, &support) in &frequent_itemsets {
            if let [a, b] = set.as_slice() {
                let sa = frequent_itemsets.get(&vec![*a]).copied().unwrap_or(0);
                let sb = frequent_itemsets.get(&vec![*b]).copied().unwrap_or(0);
                let denom = sa.min(sb);
                if denom > 0 {
                    pair_correlation.insert((*a, *b), f64::from(support) / f64::from(denom));
                }
            }
        }
        Self {
            frequent_itemsets,
            pair_correlation,
            epsilon: DEFAULT_EPSILON,
        }
    }

    /// Results carrying externally supplied scores and no itemsets, e.g. a
    /// ground-truth correlation matrix. Scores are symmetrized by taking the
    /// larger of the two directions.
    pub fn from_pair_scores<I>(scores: I, epsilon: f64) -> Self
    where
        I: IntoIterator<Item = ((ServiceId, ServiceId), f64)>,
    {
        let mut pair_correlation: BTreeMap<(ServiceId, ServiceId), f64> = BTreeMap::new();
        for ((a, b), rho) in scores {
            if a == b {
                continue;
            }
            let key = if a < b { (a, b) } else { (b, a) };
            let slot = pair_correlation.entry(key).or_insert(rho);
            *slot = slot.max(rho);
        }
        Self {
            frequent_itemsets: BTreeMap::new(),
            pair_correlation,
            epsilon,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn frequent_itemsets(&self) -> &BTreeMap<Vec<ServiceId>, u32> {
        &self.frequent_itemsets
    }

    pub fn support(&self, itemset: &[ServiceId]) -> Option<u32> {
        let mut key = itemset.to_vec();
        key.sort();
        key.dedup();
        self.frequent_itemsets.get(&key).copied()
    }

    /// Histogram of frequent itemsets by size (index 0 = size 1).
    pub fn counts_by_size(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for set in self.frequent_itemsets.keys() {
            let k = set.len();
            if counts.len() < k {
                counts.resize(k, 0);
            }
            counts[k - 1] += 1;
        }
        counts
    }

    pub fn correlation(&self, a: ServiceId, b: ServiceId) -> f64 {
        if a == b {
            return 1.0;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.pair_correlation.get(&key).copied().unwrap_or(0.0)
    }

    /// Every other service whose correlation with `s` strictly exceeds the
    /// threshold.
    pub fn get_related(&self, s: ServiceId) -> BTreeSet<ServiceId> {
        self.pair_correlation
            .iter()
            .filter(|(_, &rho)| rho > self.epsilon)
            .filter_map(|(&(a, b), _)| {
                if a == s {
                    Some(b)
                } else if b == s {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_correlated(&self, a: ServiceId, b: ServiceId) -> bool {
        a != b && self.correlation(a, b) > self.epsilon
    }

    pub fn pair_scores(&self) -> impl Iterator<Item = ((ServiceId, ServiceId), f64)> + '_ {
        self.pair_correlation.iter().map(|(k, v)| (*k, *v))
    }
}

/// Caches mining output for a log, re-mining only after the log changes.
#[derive(Debug, Clone)]
pub struct LazyMiner {
    min_support: u32,
    epsilon: f64,
    mined_version: Option<u64>,
    pinned: bool,
    results: MiningResults,
}

impl LazyMiner {
    pub fn new(min_support: u32, epsilon: f64) -> Self {
        Self {
            min_support: min_support.max(1),
            epsilon,
            mined_version: None,
            pinned: false,
            results: MiningResults::empty(epsilon),
        }
    }

    pub fn results(&mut self, log: &LogDatabase) -> &MiningResults {
        if !self.pinned && self.mined_version != Some(log.version()) {
            self.results = mine_fp_growth(log, self.min_support)
                .unwrap_or_else(|_| MiningResults::empty(self.epsilon))
                .with_epsilon(self.epsilon);
            self.mined_version = Some(log.version());
        }
        &self.results
    }

    /// Replaces mined output with fixed results that are never re-mined.
    pub fn pin(&mut self, results: MiningResults) {
        self.results = results;
        self.pinned = true;
    }
}
