//! Exhaustive itemset counting, kept as an oracle for FP-Growth.

use std::collections::{BTreeMap, BTreeSet};

use super::{LogDatabase, MiningError, MiningResults};
use crate::domain::ServiceId;

/// Largest number of distinct services the oracle will enumerate over.
pub const BRUTE_FORCE_LIMIT: usize = 20;

pub fn mine_brute_force(db: &LogDatabase, min_support: u32) -> Result<MiningResults, MiningError> {
    mine_transactions_brute_force(&db.transactions(), min_support)
}

/// Counts every non-empty subset of every (deduplicated) transaction and
/// keeps those reaching `min_support`.
pub fn mine_transactions_brute_force(
    transactions: &[Vec<ServiceId>],
    min_support: u32,
) -> Result<MiningResults, MiningError> {
    if min_support == 0 {
        return Err(MiningError::ZeroSupport);
    }
    let distinct: BTreeSet<ServiceId> = transactions.iter().flatten().copied().collect();
    if distinct.len() > BRUTE_FORCE_LIMIT {
        return Err(MiningError::TooManyServices {
            count: distinct.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut counts: BTreeMap<Vec<ServiceId>, u32> = BTreeMap::new();
    for t in transactions {
        let items: Vec<ServiceId> = t.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let n = items.len();
        for mask in 1u32..(1u32 << n) {
            let subset: Vec<ServiceId> = (0..n)
                .filter(|bit| mask & (1 << bit) != 0)
                .map(|bit| items[bit])
                .collect();
            *counts.entry(subset).or_insert(0) += 1;
        }
    }
    counts.retain(|_, c| *c >= min_support);
    Ok(MiningResults::from_itemsets(counts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_wide_inputs() {
        let t: Vec<ServiceId> = (0..21).map(ServiceId).collect();
        assert_eq!(
            mine_transactions_brute_force(&[t], 1),
            Err(MiningError::TooManyServices {
                count: 21,
                limit: 20
            })
        );
    }

    #[test]
    fn all_subsets_of_one_session() {
        for k in 1..=6u32 {
            let t: Vec<ServiceId> = (0..k).map(ServiceId).collect();
            let r = mine_transactions_brute_force(&[t], 1).unwrap();
            assert_eq!(r.frequent_itemsets().len(), (1usize << k) - 1);
        }
    }
}
