use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{
    AdvEntry, Message, NodeId, OntologyRecord, QoSSpec, Requested, RouteEntry, RouteStatus,
    SAdvMessage, SRepMessage, SReqMessage, ServiceDescription, ServiceId, ServiceInfo,
    ServiceKey, ServiceTableEntry, SimTime,
};
use crate::mining::{LazyMiner, LogDatabase, MiningResults};
use crate::routing::{Protocol, ReplyArrival, RequestVerdict, RoutingAgent};
use crate::semantic::{match_service, match_syntactic, MatchOutcome, OntologyStore, SemanticMode};

use super::advertiser::{AdvertiseMode, Advertiser};
use super::cache::ServiceCache;

/// Protocol knobs shared by every node of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeConfig {
    pub protocol: Protocol,
    pub ttl: u8,
    pub route_lifetime: SimTime,
    pub cache_size: usize,
    pub advertise: AdvertiseMode,
    pub adv_length: usize,
    pub piggyback: bool,
    pub epsilon: f64,
    pub zeta: f64,
    pub log_capacity: usize,
    pub min_support: u32,
    pub request_timeout: SimTime,
    pub request_retries: u8,
    pub semantic: SemanticMode,
    pub semantic_delay: SimTime,
}

impl Default for NodeConfig {
    fn default() -> Self {
        Self {
            protocol: Protocol::Aodv,
            ttl: crate::routing::DEFAULT_TTL,
            route_lifetime: crate::routing::DEFAULT_ROUTE_LIFETIME,
            cache_size: super::cache::DEFAULT_CACHE_SIZE,
            advertise: AdvertiseMode::Correlated,
            adv_length: super::advertiser::DEFAULT_ADV_LENGTH,
            piggyback: true,
            epsilon: crate::mining::DEFAULT_EPSILON,
            zeta: crate::mining::DEFAULT_ZETA,
            log_capacity: crate::mining::DEFAULT_LOG_CAPACITY,
            min_support: 1,
            request_timeout: 10.0,
            request_retries: 1,
            semantic: SemanticMode::Off,
            semantic_delay: 0.0,
        }
    }
}

/// A consumer's request as handed to the discovery layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceRequest {
    /// Identity used for logging and correlation.
    pub service: ServiceId,
    pub description: ServiceDescription,
    pub qos: QoSSpec,
    /// Ontologies needed to interpret the request, base first.
    pub ontology: Vec<OntologyRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Timer {
    Request { session: u32, attempt: u8 },
    Fetch { uri: String, session: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    LocalHit,
    RemoteHit,
    Failure,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::LocalHit => "local",
            Outcome::RemoteHit => "remote",
            Outcome::Failure => "failure",
        }
    }
}

/// Things a node reports for metrics and traces.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolEvent {
    Issued {
        session: u32,
        service: ServiceId,
    },
    Resolved {
        session: u32,
        service: ServiceId,
        outcome: Outcome,
        latency: SimTime,
    },
    /// First arrival of another node's request; `from` is the reverse hop.
    Admitted {
        origin: NodeId,
        session: u32,
        from: NodeId,
    },
    Suppressed(RequestVerdict),
    Expired,
    Replied {
        origin: NodeId,
        session: u32,
        piggybacked: usize,
    },
    RouteFailure {
        destination: NodeId,
    },
    FetchStarted {
        uri: String,
    },
    OntologyLoaded {
        uri: String,
        ext_tuples: usize,
    },
    /// Piggybacked entries in one reply and how many of them failed the
    /// correlation threshold at emission.
    Piggyback {
        entries: usize,
        violations: usize,
    },
    LateReply {
        session: u32,
    },
    Retry {
        session: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    Broadcast { delay: SimTime, msg: Message },
    Unicast { delay: SimTime, to: NodeId, msg: Message },
    Timer { delay: SimTime, timer: Timer },
    Record(ProtocolEvent),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Waiting on an ontology fetch before the local lookup can finish.
    Local,
    Remote,
}

#[derive(Debug, Clone)]
struct Pending {
    request: ServiceRequest,
    issued: SimTime,
    attempt: u8,
    phase: Phase,
}

#[derive(Debug, Clone)]
enum Parked {
    Lookup(u32),
    Respond { from: NodeId, req: SReqMessage },
}

#[derive(Debug, Clone)]
struct Fetch {
    session: u32,
    parked: Vec<Parked>,
}

#[derive(Debug, Clone)]
pub struct Node {
    id: NodeId,
    cfg: NodeConfig,
    pub cache: ServiceCache,
    pub routing: RoutingAgent,
    pub log: LogDatabase,
    miner: LazyMiner,
    pub ontology: OntologyStore,
    advertiser: Advertiser,
    pending: BTreeMap<u32, Pending>,
    fetches: BTreeMap<String, Fetch>,
    fetch_sessions: BTreeMap<u32, String>,
    next_session: u32,
    next_message: u32,
}

impl Node {
    pub fn new(id: NodeId, cfg: NodeConfig, ontology: OntologyStore) -> Self {
        Self {
            id,
            cache: ServiceCache::new(cfg.cache_size),
            routing: RoutingAgent::new(id, cfg.protocol, cfg.ttl, cfg.route_lifetime),
            log: LogDatabase::new(cfg.log_capacity, cfg.zeta),
            miner: LazyMiner::new(cfg.min_support, cfg.epsilon),
            ontology,
            advertiser: Advertiser::new(cfg.advertise, cfg.adv_length),
            pending: BTreeMap::new(),
            fetches: BTreeMap::new(),
            fetch_sessions: BTreeMap::new(),
            next_session: 0,
            next_message: 0,
            cfg,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn config(&self) -> &NodeConfig {
        &self.cfg
    }

    pub fn host(&mut self, mut info: ServiceInfo) {
        info.provider = self.id;
        self.cache.host(info);
    }

    /// Replaces mined correlations with fixed scores.
    pub fn pin_correlations(&mut self, results: MiningResults) {
        self.miner.pin(results.with_epsilon(self.cfg.epsilon));
    }

    pub fn mining(&mut self) -> &MiningResults {
        self.miner.results(&self.log)
    }

    pub fn pending_requests(&self) -> usize {
        self.pending.len()
    }

    fn message_id(&mut self) -> u64 {
        self.next_message += 1;
        (u64::from(self.id.0) << 32) | u64::from(self.next_message)
    }

    fn session_id(&mut self) -> u32 {
        self.next_session += 1;
        self.next_session
    }

    fn semantic_delay(&self) -> SimTime {
        if self.cfg.semantic == SemanticMode::Off {
            0.0
        } else {
            self.cfg.semantic_delay
        }
    }

    fn route_to(&self, provider: NodeId, now: SimTime) -> Option<RouteEntry> {
        if provider == self.id {
            Some(self.routing.self_route())
        } else {
            self.routing.table.lookup(provider, now).cloned()
        }
    }

    /// Cache entries that can currently be reached.
    fn reachable(&self, now: SimTime) -> Vec<&ServiceTableEntry> {
        self.cache
            .iter()
            .filter(|e| e.locally_hosted || self.routing.table.lookup(e.info.provider, now).is_some())
            .collect()
    }

    /// Best reachable entry per service: hosted first, then fewest hops.
    fn reachable_by_service(&self, now: SimTime) -> BTreeMap<ServiceId, ServiceTableEntry> {
        let mut best: BTreeMap<ServiceId, (u32, ServiceTableEntry)> = BTreeMap::new();
        for e in self.cache.iter() {
            let Some(route) = self.route_to(e.info.provider, now) else {
                continue;
            };
            let hops = if e.locally_hosted { 0 } else { route.hop_count.max(1) };
            let slot = best.entry(e.info.service_id).or_insert((hops, e.clone()));
            if hops < slot.0 {
                *slot = (hops, e.clone());
            }
        }
        best.into_iter().map(|(k, (_, e))| (k, e)).collect()
    }

    fn ontology_payload(&self, uris: &[String]) -> Vec<OntologyRecord> {
        match self.cfg.semantic {
            SemanticMode::Off => Vec::new(),
            SemanticMode::MultiLevel => {
                let mut out: Vec<OntologyRecord> = Vec::new();
                for uri in uris {
                    let mut chain = Vec::new();
                    let mut cur = uri.clone();
                    while let Some(rec) = self.ontology.metadata(&cur) {
                        if rec.base_ontology.is_empty() || chain.iter().any(|r: &OntologyRecord| r.uri == cur) {
                            break;
                        }
                        chain.push(rec.metadata());
                        cur = rec.base_ontology.clone();
                    }
                    for rec in chain.into_iter().rev() {
                        if !out.iter().any(|r| r.uri == rec.uri) {
                            out.push(rec);
                        }
                    }
                }
                out
            }
            // the whole unified schema travels with every message
            SemanticMode::Unified => self
                .ontology
                .ext_documents()
                .map(|d| d.record_with_document())
                .collect(),
        }
    }

    fn adv_entry(&self, info: &ServiceInfo, now: SimTime) -> Option<AdvEntry> {
        Some(AdvEntry {
            route: self.route_to(info.provider, now)?,
            ontology: self.ontology_payload(&info.ontology_list),
            service: info.clone(),
        })
    }

    fn declare_all(&mut self, records: &[OntologyRecord]) {
        for r in records {
            self.ontology.declare(r);
        }
    }

    fn find_match(
        &self,
        now: SimTime,
        desc: &ServiceDescription,
        qos: &QoSSpec,
        required: &[String],
    ) -> MatchOutcome {
        let candidates = self.reachable(now);
        if self.cfg.semantic == SemanticMode::Off {
            return match_syntactic(candidates, desc, qos).map_or(MatchOutcome::NoMatch, MatchOutcome::Entry);
        }
        let plausible = candidates.iter().any(|e| {
            e.info.name == desc.name
                || e.info.concept == desc.concept
                || e.info.ontology_list.iter().any(|u| required.contains(u))
        });
        if !plausible {
            return MatchOutcome::NoMatch;
        }
        match_service(&self.ontology, candidates, desc, qos, required)
    }

    // ---- consumer side ----

    pub fn request_service(&mut self, now: SimTime, request: ServiceRequest) -> Vec<Effect> {
        let session = self.session_id();
        self.log.log_request(request.service, now);
        self.declare_all(&request.ontology);
        let mut out = vec![Effect::Record(ProtocolEvent::Issued {
            session,
            service: request.service,
        })];
        self.pending.insert(
            session,
            Pending {
                request,
                issued: now,
                attempt: 0,
                phase: Phase::Local,
            },
        );
        self.local_lookup(session, now, &mut out);
        out
    }

    fn local_lookup(&mut self, session: u32, now: SimTime, out: &mut Vec<Effect>) {
        let Some(p) = self.pending.get(&session) else {
            return;
        };
        let required: Vec<String> = p.request.ontology.iter().map(|r| r.uri.clone()).collect();
        match self.find_match(now, &p.request.description, &p.request.qos, &required) {
            MatchOutcome::Entry(e) => {
                let p = self.pending.remove(&session).expect("pending present");
                self.cache.touch(&e.key(), now);
                out.push(Effect::Record(ProtocolEvent::Resolved {
                    session,
                    service: p.request.service,
                    outcome: Outcome::LocalHit,
                    latency: now - p.issued + self.semantic_delay(),
                }));
            }
            MatchOutcome::NeedOntology(uri) => self.start_fetch(uri, Parked::Lookup(session), out),
            MatchOutcome::NoMatch => self.go_remote(session, out),
        }
    }

    fn go_remote(&mut self, session: u32, out: &mut Vec<Effect>) {
        let Some(p) = self.pending.get_mut(&session) else {
            return;
        };
        p.phase = Phase::Remote;
        let attempt = p.attempt;
        let requested = Requested::Service {
            description: p.request.description.clone(),
            qos: p.request.qos.clone(),
        };
        let uris: Vec<String> = p.request.ontology.iter().map(|r| r.uri.clone()).collect();
        let ontology_list = self.ontology_payload(&uris);
        self.send_request(session, requested, ontology_list, out);
        out.push(Effect::Timer {
            delay: self.cfg.request_timeout,
            timer: Timer::Request { session, attempt },
        });
    }

    fn send_request(
        &mut self,
        session: u32,
        requested: Requested,
        ontology_list: Vec<OntologyRecord>,
        out: &mut Vec<Effect>,
    ) {
        let message_id = self.message_id();
        let (routing, ttl) = self.routing.originate(message_id);
        out.push(Effect::Broadcast {
            delay: 0.0,
            msg: Message::Req(SReqMessage {
                message_id,
                session_id: session,
                requested,
                ontology_list,
                routing,
                ttl,
            }),
        });
    }

    fn start_fetch(&mut self, uri: String, parked: Parked, out: &mut Vec<Effect>) {
        if let Some(f) = self.fetches.get_mut(&uri) {
            f.parked.push(parked);
            return;
        }
        let session = self.session_id();
        let records: Vec<OntologyRecord> = self
            .ontology
            .metadata(&uri)
            .map(OntologyRecord::metadata)
            .into_iter()
            .collect();
        self.send_request(session, Requested::Ontology { uri: uri.clone() }, records, out);
        out.push(Effect::Record(ProtocolEvent::FetchStarted { uri: uri.clone() }));
        out.push(Effect::Timer {
            delay: self.cfg.request_timeout,
            timer: Timer::Fetch {
                uri: uri.clone(),
                session,
            },
        });
        self.fetch_sessions.insert(session, uri.clone());
        self.fetches.insert(
            uri,
            Fetch {
                session,
                parked: vec![parked],
            },
        );
    }

    /// Resumes work parked on a fetch, after success or timeout.
    fn resume(&mut self, parked: Vec<Parked>, loaded: bool, now: SimTime, out: &mut Vec<Effect>) {
        for p in parked {
            match p {
                Parked::Lookup(session) if loaded => self.local_lookup(session, now, out),
                Parked::Lookup(session) => self.go_remote(session, out),
                Parked::Respond { from, req } if loaded => self.serve_request(from, req, now, out),
                Parked::Respond { req, .. } => self.forward(&req, out),
            }
        }
    }

    pub fn on_timer(&mut self, now: SimTime, timer: Timer) -> Vec<Effect> {
        let mut out = Vec::new();
        match timer {
            Timer::Request { session, attempt } => {
                let Some(p) = self.pending.get_mut(&session) else {
                    return out;
                };
                if p.attempt != attempt || p.phase != Phase::Remote {
                    return out;
                }
                if attempt < self.cfg.request_retries {
                    p.attempt += 1;
                    out.push(Effect::Record(ProtocolEvent::Retry { session }));
                    self.go_remote(session, &mut out);
                } else {
                    let p = self.pending.remove(&session).expect("pending present");
                    out.push(Effect::Record(ProtocolEvent::Resolved {
                        session,
                        service: p.request.service,
                        outcome: Outcome::Failure,
                        latency: now - p.issued,
                    }));
                }
            }
            Timer::Fetch { uri, session } => {
                if self.fetches.get(&uri).is_some_and(|f| f.session == session) {
                    let f = self.fetches.remove(&uri).expect("fetch present");
                    self.fetch_sessions.remove(&session);
                    self.resume(f.parked, false, now, &mut out);
                }
            }
        }
        out
    }

    // ---- network side ----

    pub fn on_message(&mut self, now: SimTime, from: NodeId, msg: Message) -> Vec<Effect> {
        match msg {
            Message::Adv(adv) => {
                self.on_advertisement(now, from, &adv);
                Vec::new()
            }
            Message::Req(req) => self.on_request(now, from, req),
            Message::Rep(rep) => self.on_reply(now, from, rep),
        }
    }

    /// Merges advertised entries into the cache and routing table.
    pub fn on_advertisement(&mut self, now: SimTime, from: NodeId, adv: &SAdvMessage) {
        for e in &adv.entries {
            self.learn(now, from, 1, e);
        }
    }

    fn learn(&mut self, now: SimTime, from: NodeId, hops_to_sender: u32, e: &AdvEntry) {
        self.declare_all(&e.ontology);
        let provider = e.service.provider;
        if provider == self.id {
            return;
        }
        self.routing.table.update(
            RouteEntry {
                sequence_number: e.route.sequence_number,
                destination: provider,
                hop_count: hops_to_sender + e.route.hop_count,
                next_node: from,
                status: RouteStatus::Valid,
                precursors: BTreeSet::new(),
            },
            now,
        );
        self.cache.insert(e.service.clone(), now);
    }

    pub fn on_request(&mut self, now: SimTime, from: NodeId, req: SReqMessage) -> Vec<Effect> {
        let mut out = Vec::new();
        match self.routing.admit_request(from, &req, now) {
            RequestVerdict::Accept => {}
            v => {
                out.push(Effect::Record(ProtocolEvent::Suppressed(v)));
                return out;
            }
        }
        out.push(Effect::Record(ProtocolEvent::Admitted {
            origin: req.routing.source(),
            session: req.session_id,
            from,
        }));
        self.declare_all(&req.ontology_list);
        self.serve_request(from, req, now, &mut out);
        out
    }

    fn serve_request(&mut self, from: NodeId, req: SReqMessage, now: SimTime, out: &mut Vec<Effect>) {
        match &req.requested {
            Requested::Ontology { uri } => {
                if let Some(doc) = self.ontology.document(uri) {
                    let record = doc.record_with_document();
                    self.send_reply(&req, None, vec![record], Vec::new(), 0.0, now, out);
                } else {
                    self.forward(&req, out);
                }
            }
            Requested::Service { description, qos } => {
                let required: Vec<String> = req.ontology_list.iter().map(|r| r.uri.clone()).collect();
                match self.find_match(now, description, qos, &required) {
                    MatchOutcome::Entry(e) => self.reply_with(&req, &e, now, out),
                    MatchOutcome::NeedOntology(uri) => {
                        self.start_fetch(uri, Parked::Respond { from, req }, out)
                    }
                    MatchOutcome::NoMatch => self.forward(&req, out),
                }
            }
        }
    }

    fn forward(&mut self, req: &SReqMessage, out: &mut Vec<Effect>) {
        match self.routing.forward_request(req) {
            Some(fwd) => out.push(Effect::Broadcast {
                delay: 0.0,
                msg: Message::Req(fwd),
            }),
            None => out.push(Effect::Record(ProtocolEvent::Expired)),
        }
    }

    fn reply_with(&mut self, req: &SReqMessage, entry: &ServiceTableEntry, now: SimTime, out: &mut Vec<Effect>) {
        let Some(requested) = self.adv_entry(&entry.info, now) else {
            self.forward(req, out);
            return;
        };
        let mut correlated = Vec::new();
        if self.cfg.piggyback {
            let sid = entry.info.service_id;
            let related = self.miner.results(&self.log).get_related(sid);
            let reachable = self.reachable_by_service(now);
            for (s, e) in &reachable {
                if *s != sid && related.contains(s) {
                    if let Some(a) = self.adv_entry(&e.info, now) {
                        correlated.push(a);
                    }
                }
            }
            let results = self.miner.results(&self.log);
            let violations = correlated
                .iter()
                .filter(|a| !results.is_correlated(sid, a.service.service_id))
                .count();
            debug_assert_eq!(violations, 0);
            if !correlated.is_empty() {
                out.push(Effect::Record(ProtocolEvent::Piggyback {
                    entries: correlated.len(),
                    violations,
                }));
            }
        }
        let ontology_list = self.ontology_payload(&entry.info.ontology_list);
        let delay = self.semantic_delay();
        self.send_reply(req, Some(requested), ontology_list, correlated, delay, now, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn send_reply(
        &mut self,
        req: &SReqMessage,
        requested: Option<AdvEntry>,
        ontology_list: Vec<OntologyRecord>,
        correlated: Vec<AdvEntry>,
        delay: SimTime,
        now: SimTime,
        out: &mut Vec<Effect>,
    ) {
        let piggybacked = correlated.len();
        let rep = SRepMessage {
            message_id: self.message_id(),
            session_id: req.session_id,
            requested,
            ontology_list,
            routing: self.routing.reply_headers(req),
            correlated,
        };
        let origin = req.routing.source();
        match self.routing.send_upstream(&rep, now) {
            Ok(next) => {
                out.push(Effect::Record(ProtocolEvent::Replied {
                    origin,
                    session: req.session_id,
                    piggybacked,
                }));
                out.push(Effect::Unicast {
                    delay,
                    to: next,
                    msg: Message::Rep(rep),
                });
            }
            Err(_) => out.push(Effect::Record(ProtocolEvent::RouteFailure { destination: origin })),
        }
    }

    pub fn on_reply(&mut self, now: SimTime, from: NodeId, rep: SRepMessage) -> Vec<Effect> {
        let mut out = Vec::new();
        let hops = rep.routing.hop_count();
        let arrival = match self.routing.receive_reply(from, rep, now) {
            Ok(a) => a,
            Err(_) => {
                out.push(Effect::Record(ProtocolEvent::RouteFailure { destination: self.id }));
                return out;
            }
        };
        let rep = match &arrival {
            ReplyArrival::Delivered(r) | ReplyArrival::Relay(r) => r,
        };
        for e in rep.requested.iter().chain(&rep.correlated) {
            self.learn(now, from, hops, e);
        }
        self.declare_all(&rep.ontology_list);
        match arrival {
            ReplyArrival::Relay(rep) => match self.routing.send_upstream(&rep, now) {
                Ok(next) => out.push(Effect::Unicast {
                    delay: 0.0,
                    to: next,
                    msg: Message::Rep(rep),
                }),
                Err(_) => {
                    let destination = match &rep.routing {
                        crate::domain::RoutingHeaders::Aodv { destination, .. } => destination.unwrap_or(self.id),
                        crate::domain::RoutingHeaders::Dsr { hops_traversed, .. } => {
                            hops_traversed.last().copied().unwrap_or(self.id)
                        }
                    };
                    out.push(Effect::Record(ProtocolEvent::RouteFailure { destination }));
                }
            },
            ReplyArrival::Delivered(rep) => self.deliver(now, rep, &mut out),
        }
        out
    }

    fn deliver(&mut self, now: SimTime, rep: SRepMessage, out: &mut Vec<Effect>) {
        let session = rep.session_id;
        if let Some(uri) = self.fetch_sessions.remove(&session) {
            let mut loaded = false;
            for rec in &rep.ontology_list {
                if let Some(doc) = &rec.document {
                    if self.ontology.load(doc.clone()).unwrap_or(false) {
                        loaded = true;
                        out.push(Effect::Record(ProtocolEvent::OntologyLoaded {
                            uri: doc.uri.clone(),
                            ext_tuples: self.ontology.ext_tuple_count(),
                        }));
                    }
                }
            }
            if let Some(f) = self.fetches.remove(&uri) {
                let ok = loaded || self.ontology.is_loaded(&uri);
                self.resume(f.parked, ok, now, out);
            }
            return;
        }
        match self.pending.get(&session) {
            Some(p) if p.phase == Phase::Remote => {
                let p = self.pending.remove(&session).expect("pending present");
                if let Some(e) = &rep.requested {
                    self.cache.touch(&e.service.key(), now);
                }
                out.push(Effect::Record(ProtocolEvent::Resolved {
                    session,
                    service: p.request.service,
                    outcome: Outcome::RemoteHit,
                    latency: now - p.issued,
                }));
            }
            _ => out.push(Effect::Record(ProtocolEvent::LateReply { session })),
        }
    }

    /// Periodic advertisement of known services to radio neighbors.
    pub fn advertise(&mut self, now: SimTime) -> Vec<Effect> {
        if self.advertiser.mode() == AdvertiseMode::Off {
            return Vec::new();
        }
        let reachable = self.reachable_by_service(now);
        let known: BTreeSet<ServiceId> = reachable.keys().copied().collect();
        let results = self.miner.results(&self.log).clone();
        let chosen = self.advertiser.select(&known, &results, now);
        let entries: Vec<AdvEntry> = chosen
            .iter()
            .filter_map(|s| reachable.get(s))
            .filter_map(|e| self.adv_entry(&e.info, now))
            .collect();
        if entries.is_empty() {
            return Vec::new();
        }
        vec![Effect::Broadcast {
            delay: 0.0,
            msg: Message::Adv(SAdvMessage {
                message_id: self.message_id(),
                entries,
            }),
        }]
    }

    /// Cache key for a service description, if any reachable entry matches
    /// syntactically. Used by tests and diagnostics.
    pub fn cached_key(&self, name: &str, now: SimTime) -> Option<ServiceKey> {
        self.reachable(now)
            .into_iter()
            .find(|e| e.info.name == name)
            .map(ServiceTableEntry::key)
    }
}
