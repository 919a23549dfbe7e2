use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{ServiceId, SimTime};
use crate::mining::MiningResults;

pub const DEFAULT_ADV_PERIOD: SimTime = 60.0;
pub const DEFAULT_ADV_LENGTH: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdvertiseMode {
    Off,
    Random,
    #[default]
    Correlated,
}

impl AdvertiseMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "off" => Some(Self::Off),
            "random" => Some(Self::Random),
            "correlated" => Some(Self::Correlated),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Off => "off",
            Self::Random => "random",
            Self::Correlated => "correlated",
        }
    }
}

/// Chooses what goes into each periodic advertisement.
#[derive(Debug, Clone)]
pub struct Advertiser {
    mode: AdvertiseMode,
    length: usize,
    last_broadcast: BTreeMap<ServiceId, SimTime>,
}

impl Advertiser {
    pub fn new(mode: AdvertiseMode, length: usize) -> Self {
        Self {
            mode,
            length: length.max(1),
            last_broadcast: BTreeMap::new(),
        }
    }

    pub fn mode(&self) -> AdvertiseMode {
        self.mode
    }

    pub fn last_broadcast(&self, s: ServiceId) -> Option<SimTime> {
        self.last_broadcast.get(&s).copied()
    }

    /// `known` ordered from least to most recently broadcast; never-sent
    /// services first, ties by id.
    fn by_staleness(&self, known: &BTreeSet<ServiceId>) -> Vec<ServiceId> {
        let mut v: Vec<ServiceId> = known.iter().copied().collect();
        v.sort_by(|a, b| {
            let ta = self.last_broadcast.get(a).copied().unwrap_or(f64::NEG_INFINITY);
            let tb = self.last_broadcast.get(b).copied().unwrap_or(f64::NEG_INFINITY);
            ta.total_cmp(&tb).then(a.cmp(b))
        });
        v
    }

    /// Selects services for the advertisement sent at `now` and records them
    /// as broadcast. Empty when nothing is known or advertising is off.
    ///
    /// Correlated mode seeds with the stalest service and adds the services
    /// related to it, strongest first. Without any related service it falls
    /// back to the random-mode choice of the `m` stalest services.
    pub fn select(
        &mut self,
        known: &BTreeSet<ServiceId>,
        results: &MiningResults,
        now: SimTime,
    ) -> Vec<ServiceId> {
        if self.mode == AdvertiseMode::Off || known.is_empty() {
            return Vec::new();
        }
        let stale = self.by_staleness(known);
        let mut chosen = Vec::new();
        if self.mode == AdvertiseMode::Correlated {
            let seed = stale[0];
            let related = results.get_related(seed);
            let mut related: Vec<ServiceId> = stale
                .iter()
                .copied()
                .filter(|s| related.contains(s))
                .collect();
            if !related.is_empty() {
                related.sort_by(|a, b| {
                    results
                        .correlation(seed, *b)
                        .total_cmp(&results.correlation(seed, *a))
                });
                chosen.push(seed);
                chosen.extend(related.into_iter().take(self.length - 1));
            }
        }
        if chosen.is_empty() {
            chosen = stale.into_iter().take(self.length).collect();
        }
        for s in &chosen {
            self.last_broadcast.insert(*s, now);
        }
        chosen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> BTreeSet<ServiceId> {
        v.iter().copied().map(ServiceId).collect()
    }

    #[test]
    fn cold_start_falls_back_to_stalest() {
        let mut a = Advertiser::new(AdvertiseMode::Correlated, 2);
        let r = MiningResults::empty(0.5);
        let known = ids(&[1, 2, 3]);
        assert_eq!(a.select(&known, &r, 0.0), vec![ServiceId(1), ServiceId(2)]);
        assert_eq!(a.select(&known, &r, 1.0), vec![ServiceId(3), ServiceId(1)]);
    }

    #[test]
    fn single_service_advertised_alone() {
        let mut a = Advertiser::new(AdvertiseMode::Random, 5);
        let r = MiningResults::empty(0.5);
        assert_eq!(a.select(&ids(&[4]), &r, 0.0), vec![ServiceId(4)]);
        assert!(a.select(&ids(&[]), &r, 0.0).is_empty());
    }

    #[test]
    fn off_mode_sends_nothing() {
        let mut a = Advertiser::new(AdvertiseMode::Off, 5);
        assert!(a.select(&ids(&[1]), &MiningResults::empty(0.5), 0.0).is_empty());
    }

    #[test]
    fn correlated_mode_groups_related() {
        let r = MiningResults::from_pair_scores(
            [((ServiceId(2), ServiceId(5)), 1.0), ((ServiceId(2), ServiceId(3)), 0.2)],
            0.5,
        );
        let mut a = Advertiser::new(AdvertiseMode::Correlated, 4);
        a.last_broadcast.insert(ServiceId(1), 0.0);
        let got = a.select(&ids(&[1, 2, 3, 5]), &r, 1.0);
        assert_eq!(got, vec![ServiceId(2), ServiceId(5)]);
    }

    #[test]
    fn random_mode_is_fair() {
        let known = ids(&[1, 2, 3, 4, 5, 6, 7]);
        let m = 3;
        let k = 4;
        let periods = k * known.len().div_ceil(m);
        let mut a = Advertiser::new(AdvertiseMode::Random, m);
        let mut counts = BTreeMap::new();
        for p in 0..periods {
            for s in a.select(&known, &MiningResults::empty(0.5), p as f64) {
                *counts.entry(s).or_insert(0) += 1;
            }
        }
        assert!(known.iter().all(|s| counts.get(s).copied().unwrap_or(0) >= k));
    }
}
