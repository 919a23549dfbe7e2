//! Request workloads: session generators and per-node request schedules.
//!
//! Gaps are drawn uniformly so a schedule depends only on integer RNG output
//! and basic arithmetic, which keeps traces identical across platforms.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::domain::{NodeId, ServiceId, SimTime};

use super::matrix::CorrelationMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorkloadKind {
    Random,
    Correlated,
    #[default]
    YouTube,
}

impl WorkloadKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(Self::Random),
            "correlated" => Some(Self::Correlated),
            "youtube" => Some(Self::YouTube),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Correlated => "correlated",
            Self::YouTube => "youtube",
        }
    }
}

/// Draws sessions of distinct service ids from `1..=service_count`.
#[derive(Debug, Clone)]
pub struct SessionGenerator {
    service_count: u32,
    /// Symmetric neighbor structure for correlated walks; `None` for the
    /// uniform generator.
    matrix: Option<CorrelationMatrix>,
    len_range: (usize, usize),
}

impl SessionGenerator {
    pub fn uniform(service_count: u32, len_range: (usize, usize)) -> Self {
        Self {
            service_count,
            matrix: None,
            len_range,
        }
    }

    pub fn walk(service_count: u32, matrix: &CorrelationMatrix, len_range: (usize, usize)) -> Self {
        Self {
            service_count,
            matrix: Some(matrix.symmetrized()),
            len_range,
        }
    }

    pub fn for_kind<R: Rng>(
        kind: WorkloadKind,
        service_count: u32,
        eta: f64,
        len_range: (usize, usize),
        rng: &mut R,
    ) -> Self {
        match kind {
            WorkloadKind::Random => Self::uniform(service_count, len_range),
            WorkloadKind::Correlated => {
                let m = CorrelationMatrix::random(service_count as usize, eta, rng);
                Self::walk(service_count, &m, len_range)
            }
            WorkloadKind::YouTube => Self::walk(service_count, &CorrelationMatrix::youtube(), len_range),
        }
    }

    pub fn matrix(&self) -> Option<&CorrelationMatrix> {
        self.matrix.as_ref()
    }

    fn uniform_unused<R: Rng>(&self, used: &BTreeSet<ServiceId>, rng: &mut R) -> Option<ServiceId> {
        let free = self.service_count as usize - used.len();
        if free == 0 {
            return None;
        }
        // k-th unused id in ascending order
        let mut k = rng.random_range(0..free);
        for id in 1..=self.service_count {
            let s = ServiceId(id);
            if used.contains(&s) {
                continue;
            }
            if k == 0 {
                return Some(s);
            }
            k -= 1;
        }
        None
    }

    /// One session. Lengths are uniform over `len_range`, truncated to the
    /// number of services.
    pub fn session<R: Rng>(&self, rng: &mut R) -> Vec<ServiceId> {
        let (lo, hi) = self.len_range;
        let len = rng.random_range(lo..=hi.max(lo)).min(self.service_count as usize);
        let mut used = BTreeSet::new();
        let mut out = Vec::with_capacity(len);
        while out.len() < len {
            let next = match &self.matrix {
                Some(m) if !out.is_empty() => {
                    let frontier: Vec<ServiceId> = out
                        .iter()
                        .flat_map(|s| m.row(*s))
                        .filter(|s| s.0 <= self.service_count && !used.contains(s))
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    match frontier.choose(rng) {
                        Some(s) => Some(*s),
                        None => self.uniform_unused(&used, rng),
                    }
                }
                _ => self.uniform_unused(&used, rng),
            };
            let Some(s) = next else { break };
            used.insert(s);
            out.push(s);
        }
        out
    }

    pub fn sessions<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<Vec<ServiceId>> {
        (0..count).map(|_| self.session(rng)).collect()
    }
}

/// One request issue in a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledRequest {
    pub time: SimTime,
    pub node: NodeId,
    pub service: ServiceId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub zeta: SimTime,
    /// Mean of the idle time added on top of `zeta` between sessions.
    pub session_gap: SimTime,
    pub start: SimTime,
    pub end: SimTime,
}

/// Request times for one node. Requests inside a session are between 1 s
/// and `0.8 zeta` apart, sessions are separated by at least `zeta`.
pub fn node_schedule<R: Rng>(
    node: NodeId,
    generator: &SessionGenerator,
    timing: &Timing,
    rng: &mut R,
) -> Vec<ScheduledRequest> {
    let intra_hi = (0.8 * timing.zeta).max(1.0);
    let inter = |rng: &mut R| timing.zeta + rng.random_range(0.0..=2.0 * timing.session_gap.max(0.0));
    let mut out = Vec::new();
    let mut t = timing.start + rng.random_range(0.0..=timing.zeta + 2.0 * timing.session_gap.max(0.0));
    while t < timing.end {
        for (k, s) in generator.session(rng).into_iter().enumerate() {
            if k > 0 {
                t += rng.random_range(1.0..=intra_hi);
            }
            if t >= timing.end {
                break;
            }
            out.push(ScheduledRequest { time: t, node, service: s });
        }
        t += inter(rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_sessions_are_distinct() {
        let g = SessionGenerator::uniform(10, (2, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in g.sessions(500, &mut rng) {
            let set: BTreeSet<_> = s.iter().collect();
            assert_eq!(set.len(), s.len());
            assert!((2..=8).contains(&s.len()));
        }
    }

    #[test]
    fn sessions_truncate_to_catalog() {
        let g = SessionGenerator::uniform(3, (5, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(g.session(&mut rng).len(), 3);
    }

    #[test]
    fn youtube_walk_from_three_stays_in_cluster() {
        let m = CorrelationMatrix::youtube();
        let g = SessionGenerator::walk(25, &m, (2, 3));
        let sym = m.symmetrized();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = 0;
        for s in g.sessions(4000, &mut rng) {
            if s[0] != ServiceId(3) {
                continue;
            }
            seen += 1;
            let mut allowed: BTreeSet<ServiceId> = [4, 5, 7].into_iter().map(ServiceId).collect();
            for n in allowed.clone() {
                allowed.extend(sym.row(n));
            }
            assert!(s[1..].iter().all(|x| allowed.contains(x)), "{s:?}");
        }
        assert!(seen > 50);
    }

    #[test]
    fn schedule_respects_session_gaps() {
        let g = SessionGenerator::uniform(25, (2, 8));
        let timing = Timing {
            zeta: 30.0,
            session_gap: 60.0,
            start: 0.0,
            end: 5000.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let reqs = node_schedule(NodeId(0), &g, &timing, &mut rng);
        assert!(reqs.windows(2).all(|w| w[0].time < w[1].time));
        assert!(reqs.iter().all(|r| r.time < timing.end));
        assert!(reqs.len() > 50);
    }
}
