//! The discrete-event loop tying nodes, radio, mobility and energy together.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discovery::{AdvertiseMode, Effect, Node, ProtocolEvent, Timer};
use crate::domain::{wire, Message, MessageKind, NodeId, ServiceId, SimTime};
use crate::mining::MiningResults;
use crate::semantic::{OntologyStore, SemanticMode};

use super::catalog::Catalog;
use super::config::{ConfigError, CorrelationSource, SimConfig};
use super::energy::{EnergyLedger, RadioMode};
use super::metrics::{Collector, MetricsReport, OntologySample};
use super::mobility::{Mover, Point};
use super::workload::{node_schedule, ScheduledRequest, SessionGenerator, Timing, WorkloadKind};

/// Signal speed used for the propagation term, m/s.
pub const PROPAGATION_SPEED: f64 = 3.0e8;

// RNG streams, all derived from the run seed.
const STREAM_WORKLOAD: u64 = 1;
const STREAM_ADVERTISE: u64 = 2;
const STREAM_MOBILITY: u64 = 1 << 20;
const STREAM_SCHEDULE: u64 = 2 << 20;

fn stream(seed: u64, s: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(s);
    r
}

#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    Mobile,
    Fixed(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Links {
    /// Nodes hear each other iff within radio range.
    UnitDisk,
    /// Explicit undirected adjacency; positions only affect delay.
    Graph(BTreeSet<(NodeId, NodeId)>),
}

impl Links {
    pub fn graph(edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        Links::Graph(
            edges
                .into_iter()
                .map(|(a, b)| (NodeId(a.min(b)), NodeId(a.max(b))))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Generated,
    Explicit(Vec<ScheduledRequest>),
}

/// A config plus optional overrides of the generated parts.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: SimConfig,
    pub placement: Placement,
    pub links: Links,
    pub workload: Workload,
    /// Service to provider. Defaults to service `s` on node `(s - 1) mod n`.
    pub hosts: Option<Vec<(ServiceId, NodeId)>>,
}

impl Scenario {
    pub fn new(cfg: SimConfig) -> Self {
        Self {
            cfg,
            placement: Placement::Mobile,
            links: Links::UnitDisk,
            workload: Workload::Generated,
            hosts: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceKind {
    Request { service: ServiceId },
    Send { kind: MessageKind, id: u64, to: Option<NodeId>, bytes: usize, receivers: Vec<NodeId> },
    Receive { kind: MessageKind, id: u64, from: NodeId },
    Event(ProtocolEvent),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub kind: TraceKind,
}

fn kind_name(k: MessageKind) -> &'static str {
    match k {
        MessageKind::SAdv => "SADV",
        MessageKind::SReq => "SREQ",
        MessageKind::SRep => "SREP",
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} n{} ", self.time, self.node.0)?;
        match &self.kind {
            TraceKind::Request { service } => write!(f, "request s{}", service.0),
            TraceKind::Send { kind, id, to, bytes, receivers } => {
                let to = to.map_or("*".to_string(), |t| format!("n{}", t.0));
                let rx: Vec<String> = receivers.iter().map(|r| format!("n{}", r.0)).collect();
                write!(f, "send {} {:x} to={} bytes={} rx=[{}]", kind_name(*kind), id, to, bytes, rx.join(","))
            }
            TraceKind::Receive { kind, id, from } => write!(f, "recv {} {:x} from=n{}", kind_name(*kind), id, from.0),
            TraceKind::Event(e) => write!(f, "event {e:?}"),
        }
    }
}

#[derive(Debug, Clone)]
enum Event {
    Request { node: NodeId, service: ServiceId },
    Transmit { node: NodeId, to: Option<NodeId>, msg: Message },
    Receive { node: NodeId, from: NodeId, msg: Message },
    Timer { node: NodeId, timer: Timer },
    Advertise { node: NodeId },
    Sample,
}

#[derive(Debug)]
struct Queued {
    time: SimTime,
    seq: u64,
    event: Event,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // reversed so the max-heap pops the earliest event first
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.seq.cmp(&self.seq))
    }
}

pub struct Simulation {
    cfg: SimConfig,
    catalog: Catalog,
    nodes: Vec<Node>,
    movers: Vec<Mover>,
    ledgers: Vec<EnergyLedger>,
    links: Links,
    queue: BinaryHeap<Queued>,
    seq: u64,
    now: SimTime,
    processed: u64,
    metrics: Collector,
    trace: Option<Vec<TraceRecord>>,
    adv_rng: ChaCha8Rng,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: MetricsReport,
    pub trace: Vec<TraceRecord>,
    pub events: u64,
}

/// Runs `cfg` to completion.
pub fn run(cfg: &SimConfig) -> Result<MetricsReport, ConfigError> {
    Ok(Simulation::new(Scenario::new(cfg.clone()))?.run().report)
}

impl Simulation {
    pub fn new(sc: Scenario) -> Result<Self, ConfigError> {
        let cfg = sc.cfg;
        cfg.validate()?;
        let n = cfg.nodes;
        if let Placement::Fixed(p) = &sc.placement {
            if p.len() != n {
                return Err(ConfigError::InvalidValue {
                    key: "nodes".into(),
                    value: n.to_string(),
                    reason: format!("{} fixed positions given", p.len()),
                });
            }
        }
        let hosts: Vec<(ServiceId, NodeId)> = sc.hosts.clone().unwrap_or_else(|| {
            (1..=cfg.service_count)
                .map(|s| (ServiceId(s), NodeId((s - 1) % n as u32)))
                .collect()
        });
        let host_of = |s: ServiceId| {
            hosts
                .iter()
                .find(|(id, _)| *id == s)
                .map_or(NodeId(u32::MAX), |(_, h)| *h)
        };
        let catalog = Catalog::new(cfg.service_count, host_of);

        let mode = cfg.protocol_cfg.semantic;
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let id = NodeId(i as u32);
            let mut store = OntologyStore::new(catalog.core().clone()).expect("core fixture has no base");
            if mode == SemanticMode::Unified {
                for d in catalog.all_extensions() {
                    store.load(d).expect("catalog documents load in order");
                }
            }
            let mut node = Node::new(id, cfg.protocol_cfg.clone(), store);
            for &(s, h) in &hosts {
                if h != id {
                    continue;
                }
                let Some(e) = catalog.get(s) else { continue };
                if mode != SemanticMode::Off {
                    for d in catalog.chain(s) {
                        node.ontology.load(d).expect("catalog documents load in order");
                    }
                }
                node.host(e.info.clone());
            }
            nodes.push(node);
        }

        let mut wl_rng = stream(cfg.seed, STREAM_WORKLOAD);
        let generator = SessionGenerator::for_kind(
            cfg.workload,
            cfg.service_count,
            cfg.eta,
            (cfg.session_min, cfg.session_max),
            &mut wl_rng,
        );
        if cfg.correlation == CorrelationSource::Oracle {
            let results = match (cfg.workload, generator.matrix()) {
                (WorkloadKind::Random, _) | (_, None) => MiningResults::empty(cfg.protocol_cfg.epsilon),
                (_, Some(m)) => m.as_results(cfg.protocol_cfg.epsilon),
            };
            for node in &mut nodes {
                node.pin_correlations(results.clone());
            }
        }

        let movers: Vec<Mover> = match &sc.placement {
            Placement::Mobile => (0..n)
                .map(|i| Mover::new(cfg.mobility_params(), stream(cfg.seed, STREAM_MOBILITY + i as u64)))
                .collect(),
            Placement::Fixed(p) => p
                .iter()
                .enumerate()
                .map(|(i, &pt)| Mover::fixed(pt, stream(cfg.seed, STREAM_MOBILITY + i as u64)))
                .collect(),
        };

        let mut sim = Self {
            ledgers: vec![EnergyLedger::new(cfg.power); n],
            catalog,
            nodes,
            movers,
            links: sc.links,
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            processed: 0,
            metrics: Collector::default(),
            trace: None,
            adv_rng: stream(cfg.seed, STREAM_ADVERTISE),
            cfg,
        };

        let requests = match sc.workload {
            Workload::Explicit(r) => r,
            Workload::Generated => {
                let timing = Timing {
                    zeta: sim.cfg.protocol_cfg.zeta,
                    session_gap: sim.cfg.session_gap,
                    start: 0.0,
                    end: sim.cfg.sim_time - sim.cfg.drain_time(),
                };
                (0..n)
                    .flat_map(|i| {
                        let mut r = stream(sim.cfg.seed, STREAM_SCHEDULE + i as u64);
                        node_schedule(NodeId(i as u32), &generator, &timing, &mut r)
                    })
                    .collect()
            }
        };
        for r in requests {
            sim.schedule(r.time, Event::Request { node: r.node, service: r.service });
        }
        if sim.cfg.protocol_cfg.advertise != AdvertiseMode::Off {
            for i in 0..n {
                let t = sim.adv_rng.random_range(0.0..sim.cfg.adv_period);
                sim.schedule(t, Event::Advertise { node: NodeId(i as u32) });
            }
        }
        sim.schedule(0.0, Event::Sample);
        Ok(sim)
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    fn schedule(&mut self, time: SimTime, event: Event) {
        self.seq += 1;
        self.queue.push(Queued {
            time,
            seq: self.seq,
            event,
        });
    }

    fn log(&mut self, node: NodeId, kind: TraceKind) {
        if let Some(t) = &mut self.trace {
            t.push(TraceRecord {
                time: self.now,
                node,
                kind,
            });
        }
    }

    fn position(&mut self, i: usize) -> Point {
        self.movers[i].advance_to(self.now);
        self.movers[i].position()
    }

    /// Nodes that hear `i` right now, ascending.
    pub fn neighbors(&mut self, i: usize) -> Vec<usize> {
        match &self.links {
            Links::Graph(edges) => {
                let me = NodeId(i as u32);
                let mut v: Vec<usize> = edges
                    .iter()
                    .filter_map(|&(a, b)| {
                        if a == me {
                            Some(b.0 as usize)
                        } else if b == me {
                            Some(a.0 as usize)
                        } else {
                            None
                        }
                    })
                    .filter(|&j| j < self.nodes.len())
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            Links::UnitDisk => {
                let p = self.position(i);
                let range = self.cfg.radio_range;
                (0..self.nodes.len())
                    .filter(|&j| j != i)
                    .filter(|&j| self.position(j).distance(p) <= range)
                    .collect()
            }
        }
    }

    pub fn run(mut self) -> RunOutput {
        let end = self.cfg.sim_time;
        while let Some(q) = self.queue.pop() {
            if q.time > end {
                break;
            }
            debug_assert!(q.time >= self.now, "event scheduled in the past");
            self.now = q.time;
            self.processed += 1;
            self.dispatch(q.event);
        }
        self.now = end;
        self.sample();
        for l in &mut self.ledgers {
            l.settle(end);
        }
        let cached = if self.nodes.is_empty() {
            0.0
        } else {
            self.nodes.iter().map(|n| n.cache.cached_len()).sum::<usize>() as f64 / self.nodes.len() as f64
        };
        let labels = self.labels();
        let report = self.metrics.finish(labels, &self.ledgers, end, cached);
        RunOutput {
            report,
            trace: self.trace.unwrap_or_default(),
            events: self.processed,
        }
    }

    fn labels(&self) -> Vec<(String, String)> {
        let c = &self.cfg;
        let p = &c.protocol_cfg;
        [
            ("seed", c.seed.to_string()),
            ("nodes", c.nodes.to_string()),
            ("protocol", p.protocol.label().to_string()),
            ("workload", c.workload.label().to_string()),
            ("mobility", c.mobility.label().to_string()),
            ("speed_max", c.speed_max.to_string()),
            ("cache_size", p.cache_size.to_string()),
            ("advertise", p.advertise.label().to_string()),
            ("piggyback", p.piggyback.to_string()),
            ("semantic", p.semantic.label().to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    fn dispatch(&mut self, ev: Event) {
        match ev {
            Event::Request { node, service } => {
                let Some(req) = self.catalog.request(service) else { return };
                if node.0 as usize >= self.nodes.len() {
                    return;
                }
                self.log(node, TraceKind::Request { service });
                let now = self.now;
                let fx = self.nodes[node.0 as usize].request_service(now, req);
                self.apply(node, fx);
            }
            Event::Transmit { node, to, msg } => self.transmit(node, to, msg),
            Event::Receive { node, from, msg } => {
                self.log(
                    node,
                    TraceKind::Receive {
                        kind: msg.kind(),
                        id: msg.message_id(),
                        from,
                    },
                );
                let now = self.now;
                let fx = self.nodes[node.0 as usize].on_message(now, from, msg);
                self.apply(node, fx);
            }
            Event::Timer { node, timer } => {
                let now = self.now;
                let fx = self.nodes[node.0 as usize].on_timer(now, timer);
                self.apply(node, fx);
            }
            Event::Advertise { node } => {
                let now = self.now;
                let fx = self.nodes[node.0 as usize].advertise(now);
                self.apply(node, fx);
                let next = now + self.cfg.adv_period;
                self.schedule(next, Event::Advertise { node });
            }
            Event::Sample => {
                self.sample();
                let next = self.now + self.cfg.sample_interval;
                if next < self.cfg.sim_time {
                    self.schedule(next, Event::Sample);
                }
            }
        }
    }

    fn sample(&mut self) {
        if self.metrics.timeline.last().is_some_and(|s| s.time == self.now) {
            return;
        }
        let tuples = self.nodes.iter().map(|n| n.ontology.ext_tuple_count()).collect();
        let documents = self.nodes.iter().map(|n| n.ontology.ext_document_count()).collect();
        self.metrics.timeline.push(OntologySample {
            time: self.now,
            tuples,
            documents,
        });
    }

    fn apply(&mut self, node: NodeId, effects: Vec<Effect>) {
        for fx in effects {
            match fx {
                Effect::Broadcast { delay, msg } => {
                    self.schedule(self.now + delay, Event::Transmit { node, to: None, msg })
                }
                Effect::Unicast { delay, to, msg } => {
                    self.schedule(self.now + delay, Event::Transmit { node, to: Some(to), msg })
                }
                Effect::Timer { delay, timer } => self.schedule(self.now + delay, Event::Timer { node, timer }),
                Effect::Record(e) => {
                    self.metrics.record(&e);
                    self.log(node, TraceKind::Event(e));
                }
            }
        }
    }

    fn transmit(&mut self, node: NodeId, to: Option<NodeId>, msg: Message) {
        let i = node.0 as usize;
        let bytes = match wire::encoded_len(&msg) {
            Ok(b) => b,
            Err(_) => {
                self.metrics.encode_errors += 1;
                return;
            }
        };
        let airtime = bytes as f64 * 8.0 / self.cfg.bitrate;
        let start = self.now + self.cfg.sense_window;
        let end = start + airtime;
        let now = self.now;
        let l = &mut self.ledgers[i];
        l.settle(now);
        l.book(now, start, RadioMode::Sense);
        l.book(start, end, RadioMode::Transmit);
        self.metrics.transmitted(msg.kind(), bytes);

        let heard = self.neighbors(i);
        let receivers: Vec<usize> = match to {
            None => heard,
            Some(t) if heard.contains(&(t.0 as usize)) => vec![t.0 as usize],
            Some(_) => {
                self.metrics.lost_unicasts += 1;
                Vec::new()
            }
        };
        self.log(
            node,
            TraceKind::Send {
                kind: msg.kind(),
                id: msg.message_id(),
                to,
                bytes,
                receivers: receivers.iter().map(|&r| NodeId(r as u32)).collect(),
            },
        );
        let from = self.position(i);
        for r in receivers {
            let l = &mut self.ledgers[r];
            l.settle(now);
            l.book(start, end, RadioMode::Receive);
            let d = self.position(r).distance(from);
            self.schedule(
                end + d / PROPAGATION_SPEED,
                Event::Receive {
                    node: NodeId(r as u32),
                    from: node,
                    msg: msg.clone(),
                },
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::Protocol;
    use crate::sim::energy::PowerProfile;

    fn line_cfg(n: usize) -> SimConfig {
        let mut c = SimConfig {
            nodes: n,
            sim_time: 200.0,
            service_count: 1,
            ..SimConfig::default()
        };
        c.protocol_cfg.advertise = AdvertiseMode::Off;
        c
    }

    fn line(n: usize, spacing: f64) -> Placement {
        Placement::Fixed((0..n).map(|i| Point::new(i as f64 * spacing, 0.0)).collect())
    }

    /// An ontology request nobody can answer.
    fn probe(id: u64) -> Message {
        Message::Req(crate::domain::SReqMessage {
            message_id: id,
            session_id: 0,
            requested: crate::domain::Requested::Ontology { uri: "urn:none".into() },
            ontology_list: vec![],
            routing: crate::domain::RoutingHeaders::Aodv {
                source: NodeId(0),
                destination: None,
                broadcast_id: 1,
                sequence_number: 1,
                hop_count: 1,
            },
            ttl: 1,
        })
    }

    fn req(t: f64, node: u32, s: u32) -> ScheduledRequest {
        ScheduledRequest {
            time: t,
            node: NodeId(node),
            service: ServiceId(s),
        }
    }

    fn scenario(cfg: SimConfig, placement: Placement, reqs: Vec<ScheduledRequest>) -> Scenario {
        Scenario {
            placement,
            workload: Workload::Explicit(reqs),
            ..Scenario::new(cfg)
        }
    }

    #[test]
    fn out_of_range_receiver_gets_nothing() {
        let mut cfg = line_cfg(2);
        cfg.service_count = 1;
        let sc = Scenario {
            hosts: Some(vec![(ServiceId(1), NodeId(1))]),
            ..scenario(cfg, line(2, 150.0), vec![req(1.0, 0, 1)])
        };
        let out = Simulation::new(sc).unwrap().with_trace().run();
        assert!(out.trace.iter().all(|r| !matches!(r.kind, TraceKind::Receive { .. })));
        assert_eq!(out.report.failures, 1);
    }

    #[test]
    fn broadcast_charges_one_transmit_and_each_receiver() {
        let mut cfg = line_cfg(4);
        cfg.sim_time = 10.0;
        cfg.service_count = 1;
        // star: node 0 at the center, three leaves in range of it only
        let pts = vec![
            Point::new(100.0, 100.0),
            Point::new(180.0, 100.0),
            Point::new(20.0, 100.0),
            Point::new(100.0, 180.0),
        ];
        let sc = Scenario {
            hosts: Some(vec![(ServiceId(1), NodeId(0))]),
            ..scenario(cfg.clone(), Placement::Fixed(pts), vec![])
        };
        let mut sim = Simulation::new(sc).unwrap().with_trace();
        let msg = probe(7);
        let bytes = wire::encoded_len(&msg).unwrap();
        sim.schedule(1.0, Event::Transmit { node: NodeId(0), to: None, msg });
        let out = sim.run();
        let sends = out.trace.iter().filter(|r| matches!(r.kind, TraceKind::Send { .. })).count();
        let recvs = out.trace.iter().filter(|r| matches!(r.kind, TraceKind::Receive { .. })).count();
        assert_eq!((sends, recvs), (1, 3));
        let p = PowerProfile::default();
        let air = bytes as f64 * 8.0 / cfg.bitrate;
        let r = &out.report;
        assert!((r.mode_energy["transmit"] - air * p.transmit).abs() < 1e-12);
        assert!((r.mode_energy["receive"] - 3.0 * air * p.receive).abs() < 1e-12);
        assert!((r.mode_energy["sense"] - cfg.sense_window * p.sense).abs() < 1e-12);
        assert!(r.ledger_duration_residual < 1e-12);
    }

    #[test]
    fn lone_transmitter_still_pays() {
        let mut cfg = line_cfg(1);
        cfg.sim_time = 5.0;
        let mut sim = Simulation::new(scenario(cfg, line(1, 0.0), vec![])).unwrap();
        sim.schedule(1.0, Event::Transmit { node: NodeId(0), to: None, msg: probe(1) });
        let r = sim.run().report;
        assert!(r.mode_energy["transmit"] > 0.0);
        assert_eq!(r.mode_energy["receive"], 0.0);
    }

    #[test]
    fn remote_hit_over_three_hops() {
        for protocol in [Protocol::Aodv, Protocol::Dsr] {
            let mut cfg = line_cfg(4);
            cfg.protocol_cfg.protocol = protocol;
            let sc = Scenario {
                hosts: Some(vec![(ServiceId(1), NodeId(3))]),
                ..scenario(cfg, line(4, 90.0), vec![req(1.0, 0, 1), req(50.0, 0, 1)])
            };
            let r = Simulation::new(sc).unwrap().run().report;
            assert_eq!((r.remote_hits, r.local_hits, r.failures), (1, 1, 0), "{protocol:?}");
            assert!(r.latency_p95 > 0.0 && r.latency_p95 < 0.1);
        }
    }

    #[test]
    fn single_host_serves_everything_locally() {
        let mut cfg = line_cfg(1);
        cfg.service_count = 5;
        cfg.sim_time = 2000.0;
        cfg.session_gap = 60.0;
        let r = run(&cfg).unwrap();
        assert!(r.requests > 0);
        assert_eq!(r.hit_ratio, 1.0);
        assert_eq!(r.latency_mean, 0.0);
    }

    #[test]
    fn no_requests_means_undefined_ratio() {
        let cfg = line_cfg(3);
        let r = Simulation::new(scenario(cfg, line(3, 50.0), vec![])).unwrap().run().report;
        assert!(r.hit_ratio_undefined);
        assert_eq!(r.hit_ratio, 0.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SimConfig {
            nodes: 2,
            ..SimConfig::default()
        };
        assert!(Simulation::new(scenario(cfg, line(3, 10.0), vec![])).is_err());
    }

    #[test]
    fn small_mobile_run_is_deterministic_and_balanced() {
        let cfg = SimConfig {
            nodes: 12,
            sim_time: 600.0,
            ..SimConfig::default()
        };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.requests > 0);
        assert!(a.ledger_duration_residual < 1e-9);
        assert!(a.ledger_energy_residual < 1e-9);
        assert_eq!(a.piggyback_violations, 0);
        assert!(a.local_hits + a.remote_hits + a.failures <= a.requests);
    }

    #[test]
    fn unit_disk_neighbors_are_symmetric() {
        let cfg = SimConfig {
            nodes: 20,
            sim_time: 100.0,
            ..SimConfig::default()
        };
        let mut sim = Simulation::new(Scenario::new(cfg)).unwrap();
        for t in [0.0, 13.0, 57.5] {
            sim.now = t;
            let all: Vec<Vec<usize>> = (0..20).map(|i| sim.neighbors(i)).collect();
            for (a, na) in all.iter().enumerate() {
                for &b in na {
                    assert!(all[b].contains(&a));
                }
            }
        }
    }
}
