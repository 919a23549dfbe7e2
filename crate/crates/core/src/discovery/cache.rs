use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{ServiceId, ServiceInfo, ServiceKey, ServiceTableEntry, SimTime};

pub const DEFAULT_CACHE_SIZE: usize = 8;

/// Service table with LRU eviction of non-local entries.
///
/// Entries are ordered for eviction by `(last_used_tick, key)`, so ties on
/// time are broken by service id and then provider. Hosted services do not
/// count against capacity and are never evicted.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceCache {
    entries: BTreeMap<ServiceKey, ServiceTableEntry>,
    capacity: usize,
    cached: usize,
}

impl ServiceCache {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: BTreeMap::new(),
            capacity,
            cached: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn host(&mut self, info: ServiceInfo) {
        let key = info.key();
        if let Some(old) = self.entries.insert(key, ServiceTableEntry::hosted(info)) {
            if !old.locally_hosted {
                self.cached -= 1;
            }
        }
    }

    /// Merges an entry learned from the network. A known entry has its
    /// description refreshed but keeps its LRU position; a new one is
    /// stamped `now` and may push out the least recently used. Returns the
    /// evicted keys.
    pub fn insert(&mut self, info: ServiceInfo, now: SimTime) -> Vec<ServiceKey> {
        let key = info.key();
        if let Some(e) = self.entries.get_mut(&key) {
            if !e.locally_hosted {
                e.info = info;
            }
            return Vec::new();
        }
        if self.capacity == 0 {
            return Vec::new();
        }
        let mut evicted = Vec::new();
        while self.cached >= self.capacity {
            match self.lru_victim() {
                Some(victim) => {
                    self.entries.remove(&victim);
                    self.cached -= 1;
                    evicted.push(victim);
                }
                None => break,
            }
        }
        self.entries.insert(key, ServiceTableEntry::cached(info, now));
        self.cached += 1;
        evicted
    }

    fn lru_victim(&self) -> Option<ServiceKey> {
        self.entries
            .values()
            .filter(|e| !e.locally_hosted)
            .min_by(|a, b| {
                a.last_used_tick
                    .total_cmp(&b.last_used_tick)
                    .then(a.key().cmp(&b.key()))
            })
            .map(ServiceTableEntry::key)
    }

    /// Marks an entry as used.
    pub fn touch(&mut self, key: &ServiceKey, now: SimTime) {
        if let Some(e) = self.entries.get_mut(key) {
            if !e.locally_hosted {
                e.last_used_tick = e.last_used_tick.max(now);
            }
        }
    }

    pub fn remove(&mut self, key: &ServiceKey) -> Option<ServiceTableEntry> {
        let e = self.entries.remove(key)?;
        if !e.locally_hosted {
            self.cached -= 1;
        }
        Some(e)
    }

    pub fn get(&self, key: &ServiceKey) -> Option<&ServiceTableEntry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &ServiceKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ServiceTableEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cached_len(&self) -> usize {
        self.cached
    }

    pub fn hosts(&self, service: ServiceId) -> bool {
        self.entries
            .values()
            .any(|e| e.locally_hosted && e.info.service_id == service)
    }

    pub fn services(&self) -> BTreeSet<ServiceId> {
        self.entries.keys().map(|k| k.service).collect()
    }

    /// Non-local keys from least to most recently used.
    pub fn lru_order(&self) -> Vec<ServiceKey> {
        let mut v: Vec<_> = self.entries.values().filter(|e| !e.locally_hosted).collect();
        v.sort_by(|a, b| {
            a.last_used_tick
                .total_cmp(&b.last_used_tick)
                .then(a.key().cmp(&b.key()))
        });
        v.into_iter().map(ServiceTableEntry::key).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::NodeId;
    use proptest::prelude::*;

    fn info(id: u32) -> ServiceInfo {
        ServiceInfo {
            service_id: ServiceId(id),
            name: format!("s{id}"),
            provider: NodeId(100 + id),
            ..Default::default()
        }
    }

    #[test]
    fn evicts_three_lru_victims() {
        let mut c = ServiceCache::new(8);
        for i in 0..8 {
            c.insert(info(i), f64::from(i));
        }
        let evicted: Vec<_> = (8..11).flat_map(|i| c.insert(info(i), 20.0)).collect();
        assert_eq!(
            evicted,
            vec![info(0).key(), info(1).key(), info(2).key()]
        );
        assert_eq!(c.cached_len(), 8);
    }

    #[test]
    fn hosted_services_are_exempt() {
        let mut c = ServiceCache::new(1);
        c.host(info(0));
        c.insert(info(1), 1.0);
        c.insert(info(2), 2.0);
        assert!(c.contains(&info(0).key()));
        assert!(!c.contains(&info(1).key()));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn refresh_keeps_lru_position() {
        let mut c = ServiceCache::new(2);
        c.insert(info(1), 1.0);
        c.insert(info(2), 2.0);
        c.insert(info(1), 3.0);
        assert_eq!(c.insert(info(3), 4.0), vec![info(1).key()]);
    }

    #[test]
    fn touch_protects_from_eviction() {
        let mut c = ServiceCache::new(2);
        c.insert(info(1), 1.0);
        c.insert(info(2), 2.0);
        c.touch(&info(1).key(), 3.0);
        assert_eq!(c.insert(info(3), 4.0), vec![info(2).key()]);
    }

    #[derive(Debug, Clone)]
    enum Op {
        Insert(u32),
        Touch(u32),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![(0u32..12).prop_map(Op::Insert), (0u32..12).prop_map(Op::Touch)]
    }

    proptest! {
        // Reference model: a list ordered from least to most recently used.
        #[test]
        fn matches_reference_lru(cap in 1usize..6, ops in proptest::collection::vec(op(), 0..80)) {
            let mut c = ServiceCache::new(cap);
            let mut reference: Vec<u32> = Vec::new();
            for (t, op) in ops.into_iter().enumerate() {
                let now = t as f64;
                match op {
                    Op::Insert(id) => {
                        c.insert(info(id), now);
                        if !reference.contains(&id) {
                            if reference.len() == cap {
                                reference.remove(0);
                            }
                            reference.push(id);
                        }
                    }
                    Op::Touch(id) => {
                        c.touch(&info(id).key(), now);
                        if let Some(pos) = reference.iter().position(|&x| x == id) {
                            let x = reference.remove(pos);
                            reference.push(x);
                        }
                    }
                }
                prop_assert!(c.cached_len() <= cap);
                let got: Vec<u32> = c.lru_order().iter().map(|k| k.service.0).collect();
                prop_assert_eq!(got, reference.clone());
            }
        }
    }
}
