//! Scenarios shared by several test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use handy::discovery::{AdvertiseMode, Outcome, ProtocolEvent};
use handy::domain::{MessageKind, NodeId, ServiceId};
use handy::routing::Protocol;
use handy::sim::mobility::Point;
use handy::sim::{Links, Placement, Scenario, ScheduledRequest, SimConfig, Simulation, TraceKind, Workload};

pub fn connected(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let (a, b) = (a as usize, b as usize);
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn topologies(n: usize) -> Vec<Vec<(u32, u32)>> {
    let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect::<Vec<_>>())
        .filter(|e| connected(n, e))
        .collect()
}

pub struct Check {
    pub outcome: Outcome,
    pub request_path: Vec<NodeId>,
    pub reply_path: Vec<NodeId>,
}

pub fn check(n: usize, edges: &[(u32, u32)], provider: u32, protocol: Protocol) -> Check {
    let mut cfg = SimConfig {
        nodes: n,
        sim_time: 60.0,
        service_count: 1,
        ..SimConfig::default()
    };
    cfg.protocol_cfg.advertise = AdvertiseMode::Off;
    cfg.protocol_cfg.protocol = protocol;
    let sc = Scenario {
        placement: Placement::Fixed((0..n).map(|i| Point::new(10.0 * i as f64, 0.0)).collect()),
        links: Links::graph(edges.iter().copied()),
        workload: Workload::Explicit(vec![ScheduledRequest {
            time: 1.0,
            node: NodeId(0),
            service: ServiceId(1),
        }]),
        hosts: Some(vec![(ServiceId(1), NodeId(provider))]),
        ..Scenario::new(cfg)
    };
    let out = Simulation::new(sc).unwrap().with_trace().run();
    let mut reverse_hop = BTreeMap::new();
    let mut reply_path = vec![];
    let mut outcome = None;
    for r in &out.trace {
        match &r.kind {
            TraceKind::Event(ProtocolEvent::Admitted { origin, from, .. }) if *origin == NodeId(0) => {
                reverse_hop.insert(r.node, *from);
            }
            TraceKind::Send { kind: MessageKind::SRep, to: Some(to), .. } => {
                if reply_path.is_empty() {
                    reply_path.push(r.node);
                }
                reply_path.push(*to);
            }
            TraceKind::Event(ProtocolEvent::Resolved { outcome: o, .. }) if r.node == NodeId(0) => outcome = Some(*o),
            _ => {}
        }
    }
    // walk the first-arrival tree from the provider back to the origin
    let mut request_path = vec![NodeId(provider)];
    while let Some(&prev) = reverse_hop.get(request_path.last().unwrap()) {
        request_path.push(prev);
        if prev == NodeId(0) || request_path.len() > n {
            break;
        }
    }
    request_path.reverse();
    Check {
        outcome: outcome.expect("request resolved before the end of the run"),
        request_path,
        reply_path,
    }
}

/// Connected graphs on `2..=5` nodes, requester 0, every other node as
/// provider. Returns the number of cases and the first failure.
pub fn model_check(protocol: Protocol) -> (usize, Option<String>) {
    let mut cases = 0;
    if check(1, &[], 0, protocol).outcome != Outcome::LocalHit {
        return (1, Some("single node".into()));
    }
    for n in 2..=5 {
        for edges in topologies(n) {
            for provider in 1..n as u32 {
                cases += 1;
                let c = check(n, &edges, provider, protocol);
                let mut back = c.request_path.clone();
                back.reverse();
                let ok = c.outcome == Outcome::RemoteHit && c.request_path.first() == Some(&NodeId(0)) && c.reply_path == back;
                if !ok {
                    return (cases, Some(format!("{protocol:?} n={n} provider={provider} edges={edges:?}")));
                }
            }
        }
    }
    (cases + 1, None)
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/five_node.trace")
}

pub fn scenario() -> Scenario {
    let mut cfg = SimConfig {
        nodes: 5,
        sim_time: 300.0,
        seed: 7,
        service_count: 12,
        session_gap: 40.0,
        adv_period: 60.0,
        ..SimConfig::default()
    };
    cfg.protocol_cfg.cache_size = 3;
    cfg.protocol_cfg.adv_length = 2;
    cfg.protocol_cfg.route_lifetime = 50.0;
    let pts = [(0.0, 0.0), (80.0, 0.0), (160.0, 0.0), (160.0, 80.0), (240.0, 80.0)];
    Scenario {
        placement: Placement::Fixed(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()),
        ..Scenario::new(cfg)
    }
}

pub fn render() -> String {
    let out = Simulation::new(scenario()).unwrap().with_trace().run();
    let mut s: String = out.trace.iter().map(|r| format!("{r}\n")).collect();
    let r = &out.report;
    s.push_str(&format!(
        "# requests={} local={} remote={} failures={} energy={:.9}\n",
        r.requests, r.local_hits, r.remote_hits, r.failures, r.energy_total
    ));
    s
}

