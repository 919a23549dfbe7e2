//! FP-Growth: frequent itemsets without candidate generation.

use std::collections::{BTreeMap, HashMap};

use super::{LogDatabase, MiningError, MiningResults};
use crate::domain::ServiceId;

type Item = ServiceId;

/// Mines the sessions of a log, one transaction per session.
pub fn mine_fp_growth(db: &LogDatabase, min_support: u32) -> Result<MiningResults, MiningError> {
    mine_transactions(&db.transactions(), min_support)
}

/// Mines raw transactions. Duplicate items inside a transaction count once.
pub fn mine_transactions(
    transactions: &[Vec<ServiceId>],
    min_support: u32,
) -> Result<MiningResults, MiningError> {
    if min_support == 0 {
        return Err(MiningError::ZeroSupport);
    }
    let weighted: Vec<(Vec<Item>, u32)> = transactions
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.sort();
            t.dedup();
            (t, 1)
        })
        .collect();
    let mut out = BTreeMap::new();
    if let Some(tree) = FpTree::build(&weighted, min_support) {
        tree.mine(&[], min_support, &mut out);
    }
    Ok(MiningResults::from_itemsets(out))
}

struct FpNode {
    item: Option<Item>,
    count: u32,
    parent: Option<usize>,
    children: Vec<(Item, usize)>,
}

struct FpTree {
    nodes: Vec<FpNode>,
    /// Frequent items, most frequent first, with their total support.
    order: Vec<(Item, u32)>,
    /// Node indices carrying each item (the node-links).
    header: HashMap<Item, Vec<usize>>,
}

impl FpTree {
    fn build(transactions: &[(Vec<Item>, u32)], min_support: u32) -> Option<Self> {
        let mut counts: BTreeMap<Item, u32> = BTreeMap::new();
        for (items, weight) in transactions {
            for item in items {
                *counts.entry(*item).or_insert(0) += weight;
            }
        }
        let mut order: Vec<(Item, u32)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_support)
            .collect();
        if order.is_empty() {
            return None;
        }
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let rank: HashMap<Item, usize> = order
            .iter()
            .enumerate()
            .map(|(i, (item, _))| (*item, i))
            .collect();

        let mut tree = FpTree {
            nodes: vec![FpNode {
                item: None,
                count: 0,
                parent: None,
                children: Vec::new(),
            }],
            order,
            header: HashMap::new(),
        };
        for (items, weight) in transactions {
            let mut path: Vec<Item> = items
                .iter()
                .copied()
                .filter(|i| rank.contains_key(i))
                .collect();
            path.sort_by_key(|i| rank[i]);
            tree.insert(&path, *weight);
        }
        Some(tree)
    }

    fn insert(&mut self, path: &[Item], weight: u32) {
        let mut at = 0;
        for &item in path {
            let existing = self.nodes[at]
                .children
                .iter()
                .find(|(i, _)| *i == item)
                .map(|&(_, idx)| idx);
            at = match existing {
                Some(idx) => idx,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(FpNode {
                        item: Some(item),
                        count: 0,
                        parent: Some(at),
                        children: Vec::new(),
                    });
                    self.nodes[at].children.push((item, idx));
                    self.header.entry(item).or_default().push(idx);
                    idx
                }
            };
            self.nodes[at].count += weight;
        }
    }

    /// Prefix paths (root side first) leading to each occurrence of `item`.
    fn conditional_base(&self, item: Item) -> Vec<(Vec<Item>, u32)> {
        let mut base = Vec::new();
        for &idx in self.header.get(&item).map(Vec::as_slice).unwrap_or(&[]) {
            let count = self.nodes[idx].count;
            let mut path = Vec::new();
            let mut cur = self.nodes[idx].parent;
            while let Some(p) = cur {
                if let Some(i) = self.nodes[p].item {
                    path.push(i);
                }
                cur = self.nodes[p].parent;
            }
            if !path.is_empty() {
                path.reverse();
                base.push((path, count));
            }
        }
        base
    }

    fn mine(&self, suffix: &[Item], min_support: u32, out: &mut BTreeMap<Vec<Item>, u32>) {
        // least frequent first, as in the classic formulation
        for &(item, support) in self.order.iter().rev() {
            let mut itemset = suffix.to_vec();
            itemset.push(item);
            let mut key = itemset.clone();
            key.sort();
            out.insert(key, support);

            let base = self.conditional_base(item);
            if let Some(cond) = FpTree::build(&base, min_support) {
                cond.mine(&itemset, min_support, out);
            }
        }
    }
}
