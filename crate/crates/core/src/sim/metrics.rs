//! Per-run measurements and the one-row CSV view of them.

use std::collections::BTreeMap;

use crate::discovery::{Outcome, ProtocolEvent};
use crate::domain::{MessageKind, SimTime};
use crate::routing::RequestVerdict;

use super::energy::{EnergyLedger, RadioMode};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrafficCount {
    pub messages: u64,
    pub bytes: u64,
}

/// Ext-ontology size of every node at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct OntologySample {
    pub time: SimTime,
    pub tuples: Vec<usize>,
    pub documents: Vec<usize>,
}

/// Accumulates events during a run.
#[derive(Debug, Clone, Default)]
pub struct Collector {
    pub issued: u64,
    pub local_hits: u64,
    pub remote_hits: u64,
    pub failures: u64,
    latencies: Vec<f64>,
    remote_latencies: Vec<f64>,
    pub traffic: BTreeMap<&'static str, TrafficCount>,
    pub lost_unicasts: u64,
    pub encode_errors: u64,
    pub route_failures: u64,
    pub expired: u64,
    pub duplicates: u64,
    pub retries: u64,
    pub late_replies: u64,
    pub replies: u64,
    pub piggyback_entries: u64,
    pub piggyback_violations: u64,
    pub fetches: u64,
    pub ontology_loads: u64,
    pub timeline: Vec<OntologySample>,
}

fn kind_label(k: MessageKind) -> &'static str {
    match k {
        MessageKind::SAdv => "adv",
        MessageKind::SReq => "req",
        MessageKind::SRep => "rep",
    }
}

impl Collector {
    pub fn transmitted(&mut self, kind: MessageKind, bytes: usize) {
        let t = self.traffic.entry(kind_label(kind)).or_default();
        t.messages += 1;
        t.bytes += bytes as u64;
    }

    pub fn record(&mut self, ev: &ProtocolEvent) {
        match ev {
            ProtocolEvent::Issued { .. } => self.issued += 1,
            ProtocolEvent::Resolved { outcome, latency, .. } => match outcome {
                Outcome::LocalHit => {
                    self.local_hits += 1;
                    self.latencies.push(*latency);
                }
                Outcome::RemoteHit => {
                    self.remote_hits += 1;
                    self.latencies.push(*latency);
                    self.remote_latencies.push(*latency);
                }
                Outcome::Failure => self.failures += 1,
            },
            ProtocolEvent::Suppressed(RequestVerdict::Duplicate | RequestVerdict::Loop) => self.duplicates += 1,
            ProtocolEvent::Suppressed(_) | ProtocolEvent::Admitted { .. } => {}
            ProtocolEvent::Expired => self.expired += 1,
            ProtocolEvent::Replied { .. } => self.replies += 1,
            ProtocolEvent::RouteFailure { .. } => self.route_failures += 1,
            ProtocolEvent::FetchStarted { .. } => self.fetches += 1,
            ProtocolEvent::OntologyLoaded { .. } => self.ontology_loads += 1,
            ProtocolEvent::Piggyback { entries, violations } => {
                self.piggyback_entries += *entries as u64;
                self.piggyback_violations += *violations as u64;
            }
            ProtocolEvent::LateReply { .. } => self.late_replies += 1,
            ProtocolEvent::Retry { .. } => self.retries += 1,
        }
    }

    pub fn finish(self, labels: Vec<(String, String)>, ledgers: &[EnergyLedger], elapsed: SimTime, cached: f64) -> MetricsReport {
        let resolved = self.local_hits + self.remote_hits;
        let hit_ratio_undefined = self.issued == 0;
        let hit_ratio = if hit_ratio_undefined {
            0.0
        } else {
            self.local_hits as f64 / self.issued as f64
        };
        let mut sorted = self.latencies.clone();
        sorted.sort_by(f64::total_cmp);
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };

        let mut mode_energy = BTreeMap::new();
        for m in RadioMode::ALL {
            mode_energy.insert(m.label(), ledgers.iter().map(|l| l.energy(m)).sum::<f64>());
        }
        let node_energy: Vec<f64> = ledgers.iter().map(EnergyLedger::total_energy).collect();
        let energy_total: f64 = node_energy.iter().sum();
        let mut duration_residual: f64 = 0.0;
        let mut energy_residual: f64 = 0.0;
        for l in ledgers {
            if elapsed > 0.0 {
                duration_residual = duration_residual.max((l.total_duration() - elapsed).abs() / elapsed);
            }
            let e = l.total_energy();
            if e > 0.0 {
                energy_residual = energy_residual.max((e - l.recomputed_energy()).abs() / e);
            }
        }
        let last = self.timeline.last();
        let n = ledgers.len().max(1) as f64;
        let final_tuples = last.map_or(0.0, |s| s.tuples.iter().sum::<usize>() as f64 / n);
        let final_docs = last.map_or(0.0, |s| s.documents.iter().sum::<usize>() as f64 / n);

        MetricsReport {
            labels,
            requests: self.issued,
            local_hits: self.local_hits,
            remote_hits: self.remote_hits,
            failures: self.failures,
            unresolved: self.issued.saturating_sub(resolved + self.failures),
            hit_ratio,
            hit_ratio_undefined,
            latency_mean: mean(&self.latencies),
            latency_p50: quantile(&sorted, 0.5),
            latency_p95: quantile(&sorted, 0.95),
            remote_latency_mean: mean(&self.remote_latencies),
            energy_total,
            energy_mean: energy_total / n,
            mode_energy,
            node_energy,
            traffic: self.traffic,
            lost_unicasts: self.lost_unicasts,
            encode_errors: self.encode_errors,
            route_failures: self.route_failures,
            expired: self.expired,
            duplicates: self.duplicates,
            retries: self.retries,
            late_replies: self.late_replies,
            replies: self.replies,
            piggyback_entries: self.piggyback_entries,
            piggyback_violations: self.piggyback_violations,
            fetches: self.fetches,
            ontology_loads: self.ontology_loads,
            ext_tuples_final_mean: final_tuples,
            ext_docs_final_mean: final_docs,
            cached_final_mean: cached,
            ledger_duration_residual: duration_residual,
            ledger_energy_residual: energy_residual,
            timeline: self.timeline,
        }
    }
}

/// Nearest-rank quantile of sorted data; 0 when empty.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Identifying columns (seed, arm settings) in output order.
    pub labels: Vec<(String, String)>,
    pub requests: u64,
    pub local_hits: u64,
    pub remote_hits: u64,
    pub failures: u64,
    pub unresolved: u64,
    pub hit_ratio: f64,
    pub hit_ratio_undefined: bool,
    pub latency_mean: f64,
    pub latency_p50: f64,
    pub latency_p95: f64,
    pub remote_latency_mean: f64,
    pub energy_total: f64,
    pub energy_mean: f64,
    pub mode_energy: BTreeMap<&'static str, f64>,
    pub node_energy: Vec<f64>,
    pub traffic: BTreeMap<&'static str, TrafficCount>,
    pub lost_unicasts: u64,
    pub encode_errors: u64,
    pub route_failures: u64,
    pub expired: u64,
    pub duplicates: u64,
    pub retries: u64,
    pub late_replies: u64,
    pub replies: u64,
    pub piggyback_entries: u64,
    pub piggyback_violations: u64,
    pub fetches: u64,
    pub ontology_loads: u64,
    pub ext_tuples_final_mean: f64,
    pub ext_docs_final_mean: f64,
    pub cached_final_mean: f64,
    pub ledger_duration_residual: f64,
    pub ledger_energy_residual: f64,
    pub timeline: Vec<OntologySample>,
}

impl MetricsReport {
    fn columns(&self) -> Vec<(String, String)> {
        let mut c = self.labels.clone();
        let mut push = |k: &str, v: String| c.push((k.to_string(), v));
        push("requests", self.requests.to_string());
        push("local_hits", self.local_hits.to_string());
        push("remote_hits", self.remote_hits.to_string());
        push("failures", self.failures.to_string());
        push("unresolved", self.unresolved.to_string());
        push("hit_ratio", self.hit_ratio.to_string());
        push("hit_ratio_undefined", (self.hit_ratio_undefined as u8).to_string());
        push("latency_mean", self.latency_mean.to_string());
        push("latency_p50", self.latency_p50.to_string());
        push("latency_p95", self.latency_p95.to_string());
        push("remote_latency_mean", self.remote_latency_mean.to_string());
        push("energy_total", self.energy_total.to_string());
        push("energy_mean", self.energy_mean.to_string());
        for m in RadioMode::ALL {
            push(&format!("energy_{}", m.label()), self.mode_energy[m.label()].to_string());
        }
        for k in ["adv", "req", "rep"] {
            let t = self.traffic.get(k).copied().unwrap_or_default();
            push(&format!("msgs_{k}"), t.messages.to_string());
            push(&format!("bytes_{k}"), t.bytes.to_string());
        }
        push("lost_unicasts", self.lost_unicasts.to_string());
        push("encode_errors", self.encode_errors.to_string());
        push("route_failures", self.route_failures.to_string());
        push("expired", self.expired.to_string());
        push("duplicates", self.duplicates.to_string());
        push("retries", self.retries.to_string());
        push("late_replies", self.late_replies.to_string());
        push("replies", self.replies.to_string());
        push("piggyback_entries", self.piggyback_entries.to_string());
        push("piggyback_violations", self.piggyback_violations.to_string());
        push("fetches", self.fetches.to_string());
        push("ontology_loads", self.ontology_loads.to_string());
        push("ext_tuples_final_mean", self.ext_tuples_final_mean.to_string());
        push("ext_docs_final_mean", self.ext_docs_final_mean.to_string());
        push("cached_final_mean", self.cached_final_mean.to_string());
        push("ledger_duration_residual", self.ledger_duration_residual.to_string());
        push("ledger_energy_residual", self.ledger_energy_residual.to_string());
        c
    }

    pub fn csv_header(&self) -> Vec<String> {
        self.columns().into_iter().map(|(k, _)| k).collect()
    }

    pub fn csv_record(&self) -> Vec<String> {
        self.columns().into_iter().map(|(_, v)| v).collect()
    }

    pub fn label(&self, key: &str) -> Option<&str> {
        self.labels.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn messages(&self, kind: &str) -> u64 {
        self.traffic.get(kind).map_or(0, |t| t.messages)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ServiceId;
    use crate::sim::energy::PowerProfile;

    #[test]
    fn nearest_rank_quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.0);
        assert_eq!(quantile(&v, 0.95), 4.0);
        assert_eq!(quantile(&[], 0.5), 0.0);
    }

    #[test]
    fn empty_run_flags_undefined_hit_ratio() {
        let r = Collector::default().finish(vec![], &[], 10.0, 0.0);
        assert_eq!(r.hit_ratio, 0.0);
        assert!(r.hit_ratio_undefined);
        assert_eq!(r.csv_header().len(), r.csv_record().len());
    }

    #[test]
    fn hit_ratio_counts_local_over_issued() {
        let mut c = Collector::default();
        for k in 0..4 {
            c.record(&ProtocolEvent::Issued { session: k, service: ServiceId(1) });
        }
        let resolved = |session, outcome, latency| ProtocolEvent::Resolved {
            session,
            service: ServiceId(1),
            outcome,
            latency,
        };
        c.record(&resolved(0, Outcome::LocalHit, 0.0));
        c.record(&resolved(1, Outcome::RemoteHit, 2.0));
        c.record(&resolved(2, Outcome::Failure, 20.0));
        let mut l = EnergyLedger::new(PowerProfile::default());
        l.settle(10.0);
        let r = c.finish(vec![("seed".into(), "1".into())], &[l], 10.0, 0.0);
        assert_eq!(r.hit_ratio, 0.25);
        assert_eq!(r.latency_mean, 1.0);
        assert_eq!(r.unresolved, 1);
        assert_eq!(r.ledger_duration_residual, 0.0);
        assert_eq!(r.csv_header()[0], "seed");
    }
}
