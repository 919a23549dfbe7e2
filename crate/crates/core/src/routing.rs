//! Minimal AODV and DSR substrates that carry discovery messages.
//!
//! Requests build reverse routes toward their originator as they flood;
//! replies travel back along them and build forward routes toward the
//! replier. DSR additionally records the traversed path in the request and
//! source-routes the reply over its reverse.

use std::collections::{BTreeMap, HashSet, VecDeque};

use thiserror::Error;

use crate::domain::{
    NodeId, RouteEntry, RouteStatus, RoutingHeaders, SRepMessage, SReqMessage, SimTime,
};

pub const DEFAULT_TTL: u8 = 8;
pub const DEFAULT_ROUTE_LIFETIME: SimTime = 300.0;
pub const DEDUP_CAPACITY: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Protocol {
    #[default]
    Aodv,
    Dsr,
}

impl Protocol {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "aodv" => Some(Self::Aodv),
            "dsr" => Some(Self::Dsr),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Aodv => "aodv",
            Self::Dsr => "dsr",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Slot {
    entry: RouteEntry,
    expires: SimTime,
}

/// One route per destination with lazy expiry.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTable {
    protocol: Protocol,
    lifetime: SimTime,
    entries: BTreeMap<NodeId, Slot>,
}

impl RoutingTable {
    pub fn new(protocol: Protocol, lifetime: SimTime) -> Self {
        Self {
            protocol,
            lifetime,
            entries: BTreeMap::new(),
        }
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    fn usable(slot: &Slot, now: SimTime) -> bool {
        slot.entry.is_valid() && slot.expires >= now
    }

    /// A valid, unexpired route.
    pub fn lookup(&self, dest: NodeId, now: SimTime) -> Option<&RouteEntry> {
        self.entries
            .get(&dest)
            .filter(|s| Self::usable(s, now))
            .map(|s| &s.entry)
    }

    /// Whatever is stored for `dest`, expired or not.
    pub fn get(&self, dest: NodeId) -> Option<&RouteEntry> {
        self.entries.get(&dest).map(|s| &s.entry)
    }

    pub fn expires_at(&self, dest: NodeId) -> Option<SimTime> {
        self.entries.get(&dest).map(|s| s.expires)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RouteEntry> {
        self.entries.values().map(|s| &s.entry)
    }

    /// Installs `entry` if it is fresher than what is held: a higher
    /// sequence number, or the same one with no usable route or a route at
    /// least as short. A lower sequence number is never accepted.
    pub fn update(&mut self, mut entry: RouteEntry, now: SimTime) -> bool {
        let expires = now + self.lifetime;
        match self.entries.get_mut(&entry.destination) {
            None => {
                self.entries.insert(entry.destination, Slot { entry, expires });
                true
            }
            Some(slot) => {
                let old = &slot.entry;
                let accept = entry.sequence_number > old.sequence_number
                    || (entry.sequence_number == old.sequence_number
                        && (!Self::usable(slot, now) || entry.hop_count <= old.hop_count));
                if accept {
                    entry.precursors.extend(old.precursors.iter().copied());
                    *slot = Slot { entry, expires };
                }
                accept
            }
        }
    }

    /// Extends the lifetime of a route that just carried traffic.
    pub fn refresh(&mut self, dest: NodeId, now: SimTime) {
        if let Some(slot) = self.entries.get_mut(&dest) {
            if Self::usable(slot, now) {
                slot.expires = slot.expires.max(now + self.lifetime);
            }
        }
    }

    pub fn add_precursor(&mut self, dest: NodeId, precursor: NodeId) {
        if let Some(slot) = self.entries.get_mut(&dest) {
            slot.entry.precursors.insert(precursor);
        }
    }

    pub fn invalidate(&mut self, dest: NodeId) {
        if let Some(slot) = self.entries.get_mut(&dest) {
            slot.entry.status = RouteStatus::Invalid;
        }
    }

    /// Forcibly removes a route, as when a node moves out of range.
    pub fn remove(&mut self, dest: NodeId) -> Option<RouteEntry> {
        self.entries.remove(&dest).map(|s| s.entry)
    }
}

/// Bounded memory of recently seen `(originator, request id)` pairs.
#[derive(Debug, Clone, Default)]
pub struct DedupCache {
    order: VecDeque<(NodeId, u64)>,
    seen: HashSet<(NodeId, u64)>,
    capacity: usize,
}

impl DedupCache {
    pub fn new(capacity: usize) -> Self {
        Self {
            order: VecDeque::with_capacity(capacity),
            seen: HashSet::with_capacity(capacity),
            capacity: capacity.max(1),
        }
    }

    /// Records `key`; returns `false` if it was already present.
    pub fn insert(&mut self, key: (NodeId, u64)) -> bool {
        if self.seen.contains(&key) {
            return false;
        }
        if self.order.len() == self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.seen.remove(&old);
            }
        }
        self.order.push_back(key);
        self.seen.insert(key);
        true
    }

    pub fn contains(&self, key: &(NodeId, u64)) -> bool {
        self.seen.contains(key)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RequestVerdict {
    Accept,
    /// Seen before under the same originator and request id.
    Duplicate,
    /// DSR route record already lists this node.
    Loop,
    /// Our own request echoed back.
    Own,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("no valid route toward {0}")]
    NoRoute(NodeId),
    #[error("source route exhausted")]
    EmptySourceRoute,
    #[error("reply not addressed to this node")]
    Misrouted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReplyArrival {
    /// This node is the originator of the request.
    Delivered(SRepMessage),
    /// Forward toward the originator, already prepared for the next link.
    Relay(SRepMessage),
}

/// Per-node routing state and the operations the discovery layer uses.
#[derive(Debug, Clone)]
pub struct RoutingAgent {
    id: NodeId,
    pub table: RoutingTable,
    dedup: DedupCache,
    sequence_number: u32,
    broadcast_id: u32,
    ttl: u8,
}

impl RoutingAgent {
    pub fn new(id: NodeId, protocol: Protocol, ttl: u8, lifetime: SimTime) -> Self {
        Self {
            id,
            table: RoutingTable::new(protocol, lifetime),
            dedup: DedupCache::new(DEDUP_CAPACITY),
            sequence_number: 0,
            broadcast_id: 0,
            ttl,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn protocol(&self) -> Protocol {
        self.table.protocol()
    }

    pub fn ttl(&self) -> u8 {
        self.ttl
    }

    pub fn sequence_number(&self) -> u32 {
        self.sequence_number
    }

    /// Zero-hop route to this node, as carried in advertisements of hosted
    /// services.
    pub fn self_route(&self) -> RouteEntry {
        RouteEntry::to_self(self.id, self.sequence_number)
    }

    fn dedup_key(headers: &RoutingHeaders, message_id: u64) -> (NodeId, u64) {
        match headers {
            RoutingHeaders::Aodv {
                source,
                broadcast_id,
                ..
            } => (*source, u64::from(*broadcast_id)),
            RoutingHeaders::Dsr { source, .. } => (*source, message_id),
        }
    }

    /// Headers for a new request originated here. The request is marked as
    /// seen so its echoes are not re-forwarded.
    pub fn originate(&mut self, message_id: u64) -> (RoutingHeaders, u8) {
        self.sequence_number += 1;
        self.broadcast_id += 1;
        let headers = match self.protocol() {
            Protocol::Aodv => RoutingHeaders::Aodv {
                source: self.id,
                destination: None,
                broadcast_id: self.broadcast_id,
                sequence_number: self.sequence_number,
                hop_count: 1,
            },
            Protocol::Dsr => RoutingHeaders::Dsr {
                source: self.id,
                sequence_number: self.sequence_number,
                hops_traversed: vec![self.id],
                hop_count: 1,
            },
        };
        self.dedup.insert(Self::dedup_key(&headers, message_id));
        (headers, self.ttl)
    }

    /// Duplicate suppression plus reverse-route creation for a request that
    /// arrived from neighbor `from`.
    pub fn admit_request(&mut self, from: NodeId, req: &SReqMessage, now: SimTime) -> RequestVerdict {
        let source = req.routing.source();
        if source == self.id {
            return RequestVerdict::Own;
        }
        if let RoutingHeaders::Dsr { hops_traversed, .. } = &req.routing {
            if hops_traversed.contains(&self.id) {
                return RequestVerdict::Loop;
            }
        }
        if !self.dedup.insert(Self::dedup_key(&req.routing, req.message_id)) {
            return RequestVerdict::Duplicate;
        }
        self.table.update(
            RouteEntry {
                sequence_number: req.routing.sequence_number(),
                destination: source,
                hop_count: req.routing.hop_count(),
                next_node: from,
                status: RouteStatus::Valid,
                precursors: Default::default(),
            },
            now,
        );
        RequestVerdict::Accept
    }

    /// The request as rebroadcast by this node, or `None` if its hop budget
    /// is spent.
    pub fn forward_request(&self, req: &SReqMessage) -> Option<SReqMessage> {
        if req.ttl <= 1 {
            return None;
        }
        let mut out = req.clone();
        out.ttl -= 1;
        match &mut out.routing {
            RoutingHeaders::Aodv { hop_count, .. } => *hop_count += 1,
            RoutingHeaders::Dsr {
                hops_traversed,
                hop_count,
                ..
            } => {
                hops_traversed.push(self.id);
                *hop_count += 1;
            }
        }
        Some(out)
    }

    /// Admission followed by forwarding. `Err` carries the reason nothing is
    /// forwarded; `Ok(None)` means the request expired here.
    pub fn propagate(
        &mut self,
        from: NodeId,
        req: &SReqMessage,
        now: SimTime,
    ) -> Result<Option<SReqMessage>, RequestVerdict> {
        match self.admit_request(from, req, now) {
            RequestVerdict::Accept => Ok(self.forward_request(req)),
            other => Err(other),
        }
    }

    /// Headers for a reply to `req` generated at this node.
    pub fn reply_headers(&mut self, req: &SReqMessage) -> RoutingHeaders {
        self.sequence_number += 1;
        match &req.routing {
            RoutingHeaders::Aodv { source, .. } => RoutingHeaders::Aodv {
                source: self.id,
                destination: Some(*source),
                broadcast_id: 0,
                sequence_number: self.sequence_number,
                hop_count: 1,
            },
            RoutingHeaders::Dsr { hops_traversed, .. } => RoutingHeaders::Dsr {
                source: self.id,
                sequence_number: self.sequence_number,
                hops_traversed: hops_traversed.iter().rev().copied().collect(),
                hop_count: 1,
            },
        }
    }

    /// Next hop for a reply leaving this node.
    pub fn send_upstream(&mut self, rep: &SRepMessage, now: SimTime) -> Result<NodeId, RouteError> {
        match &rep.routing {
            RoutingHeaders::Aodv { destination, .. } => {
                let dest = destination.ok_or(RouteError::Misrouted)?;
                let next = self
                    .table
                    .lookup(dest, now)
                    .map(|r| r.next_node)
                    .ok_or(RouteError::NoRoute(dest))?;
                self.table.refresh(dest, now);
                self.table.add_precursor(dest, next);
                Ok(next)
            }
            RoutingHeaders::Dsr { hops_traversed, .. } => {
                hops_traversed.first().copied().ok_or(RouteError::EmptySourceRoute)
            }
        }
    }

    /// Handles a reply that arrived from neighbor `from`: installs the
    /// forward route toward the replier and decides whether it ends here.
    pub fn receive_reply(
        &mut self,
        from: NodeId,
        mut rep: SRepMessage,
        now: SimTime,
    ) -> Result<ReplyArrival, RouteError> {
        let replier = rep.routing.source();
        if replier != self.id {
            self.table.update(
                RouteEntry {
                    sequence_number: rep.routing.sequence_number(),
                    destination: replier,
                    hop_count: rep.routing.hop_count(),
                    next_node: from,
                    status: RouteStatus::Valid,
                    precursors: Default::default(),
                },
                now,
            );
        }
        let delivered = match &mut rep.routing {
            RoutingHeaders::Aodv { destination, .. } => *destination == Some(self.id),
            RoutingHeaders::Dsr { hops_traversed, .. } => {
                if hops_traversed.first() != Some(&self.id) {
                    return Err(RouteError::Misrouted);
                }
                hops_traversed.remove(0);
                hops_traversed.is_empty()
            }
        };
        if delivered {
            return Ok(ReplyArrival::Delivered(rep));
        }
        match &mut rep.routing {
            RoutingHeaders::Aodv { hop_count, .. } | RoutingHeaders::Dsr { hop_count, .. } => {
                *hop_count += 1
            }
        }
        Ok(ReplyArrival::Relay(rep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{QoSSpec, Requested, ServiceDescription};

    const A: NodeId = NodeId(1);
    const B: NodeId = NodeId(2);
    const C: NodeId = NodeId(3);

    fn agent(id: NodeId, p: Protocol) -> RoutingAgent {
        RoutingAgent::new(id, p, DEFAULT_TTL, DEFAULT_ROUTE_LIFETIME)
    }

    fn request(origin: &mut RoutingAgent, id: u64) -> SReqMessage {
        let (routing, ttl) = origin.originate(id);
        SReqMessage {
            message_id: id,
            session_id: 1,
            requested: Requested::Service {
                description: ServiceDescription {
                    name: "s".into(),
                    ..Default::default()
                },
                qos: QoSSpec::new(),
            },
            ontology_list: vec![],
            routing,
            ttl,
        }
    }

    fn reply(replier: &mut RoutingAgent, req: &SReqMessage) -> SRepMessage {
        SRepMessage {
            message_id: 99,
            session_id: req.session_id,
            requested: None,
            ontology_list: vec![],
            routing: replier.reply_headers(req),
            correlated: vec![],
        }
    }

    #[test]
    fn line_request_installs_reverse_entry() {
        let mut a = agent(A, Protocol::Aodv);
        let mut b = agent(B, Protocol::Aodv);
        let req = request(&mut a, 1);
        let fwd = b.propagate(A, &req, 0.0).unwrap().unwrap();
        let rev = b.table.lookup(A, 0.0).unwrap();
        assert_eq!((rev.destination, rev.next_node, rev.hop_count), (A, A, 1));
        assert_eq!(fwd.ttl, req.ttl - 1);
        assert_eq!(fwd.routing.hop_count(), 2);
    }

    #[test]
    fn dsr_appends_self() {
        let mut a = agent(A, Protocol::Dsr);
        let mut b = agent(B, Protocol::Dsr);
        let req = request(&mut a, 1);
        assert!(matches!(&req.routing, RoutingHeaders::Dsr { hops_traversed, .. } if *hops_traversed == vec![A]));
        let fwd = b.propagate(A, &req, 0.0).unwrap().unwrap();
        assert!(matches!(&fwd.routing, RoutingHeaders::Dsr { hops_traversed, .. } if *hops_traversed == vec![A, B]));
    }

    #[test]
    fn duplicates_are_suppressed_without_table_change() {
        for p in [Protocol::Aodv, Protocol::Dsr] {
            let mut a = agent(A, p);
            let mut b = agent(B, p);
            let req = request(&mut a, 1);
            b.propagate(A, &req, 0.0).unwrap();
            let before = b.table.clone();
            assert_eq!(b.propagate(C, &req, 1.0), Err(RequestVerdict::Duplicate));
            assert_eq!(b.table, before);
        }
    }

    #[test]
    fn own_request_and_loops_are_dropped() {
        let mut a = agent(A, Protocol::Dsr);
        let b = agent(B, Protocol::Dsr);
        let req = request(&mut a, 1);
        assert_eq!(a.admit_request(B, &req, 0.0), RequestVerdict::Own);
        let fwd = b.forward_request(&req).unwrap();
        let mut fresh_b = agent(B, Protocol::Dsr);
        assert_eq!(fresh_b.admit_request(C, &fwd, 0.0), RequestVerdict::Loop);
    }

    #[test]
    fn ttl_exhaustion_stops_forwarding() {
        let mut a = agent(A, Protocol::Aodv);
        let mut b = agent(B, Protocol::Aodv);
        let mut req = request(&mut a, 1);
        req.ttl = 1;
        assert_eq!(b.propagate(A, &req, 0.0), Ok(None));
    }

    #[test]
    fn aodv_reply_walks_reverse_path() {
        let mut a = agent(A, Protocol::Aodv);
        let mut b = agent(B, Protocol::Aodv);
        let mut c = agent(C, Protocol::Aodv);
        let req = request(&mut a, 1);
        let at_c = b.propagate(A, &req, 0.0).unwrap().unwrap();
        c.admit_request(B, &at_c, 0.0);
        let rep = reply(&mut c, &at_c);
        assert_eq!(c.send_upstream(&rep, 0.0), Ok(B));
        let ReplyArrival::Relay(rep) = b.receive_reply(C, rep, 0.0).unwrap() else {
            panic!("B is not the originator")
        };
        let fwd = b.table.lookup(C, 0.0).unwrap();
        assert_eq!((fwd.next_node, fwd.hop_count), (C, 1));
        assert_eq!(b.send_upstream(&rep, 0.0), Ok(A));
        assert!(matches!(a.receive_reply(B, rep, 0.0), Ok(ReplyArrival::Delivered(_))));
        assert_eq!(a.table.lookup(C, 0.0).unwrap().hop_count, 2);
    }

    #[test]
    fn dsr_reply_pops_route_record() {
        let mut a = agent(A, Protocol::Dsr);
        let mut b = agent(B, Protocol::Dsr);
        let mut c = agent(C, Protocol::Dsr);
        let req = request(&mut a, 1);
        let at_c = b.propagate(A, &req, 0.0).unwrap().unwrap();
        c.admit_request(B, &at_c, 0.0);
        let rep = reply(&mut c, &at_c);
        assert!(matches!(&rep.routing, RoutingHeaders::Dsr { hops_traversed, .. } if *hops_traversed == vec![B, A]));
        assert_eq!(c.send_upstream(&rep, 0.0), Ok(B));
        let ReplyArrival::Relay(rep) = b.receive_reply(C, rep, 0.0).unwrap() else {
            panic!("B is not the originator")
        };
        assert_eq!(b.send_upstream(&rep, 0.0), Ok(A));
        assert!(matches!(a.receive_reply(B, rep, 0.0), Ok(ReplyArrival::Delivered(_))));
    }

    #[test]
    fn expired_reverse_entry_is_a_route_failure() {
        let mut a = agent(A, Protocol::Aodv);
        let mut b = agent(B, Protocol::Aodv);
        let req = request(&mut a, 1);
        b.admit_request(A, &req, 0.0);
        let rep = reply(&mut b, &req);
        assert_eq!(b.send_upstream(&rep, DEFAULT_ROUTE_LIFETIME + 1.0), Err(RouteError::NoRoute(A)));
        b.table.remove(A);
        assert_eq!(b.send_upstream(&rep, 0.0), Err(RouteError::NoRoute(A)));
    }

    #[test]
    fn sequence_numbers_never_decrease() {
        let mut t = RoutingTable::new(Protocol::Aodv, 10.0);
        let route = |seq, hop| RouteEntry {
            sequence_number: seq,
            destination: C,
            hop_count: hop,
            next_node: B,
            status: RouteStatus::Valid,
            precursors: Default::default(),
        };
        assert!(t.update(route(5, 3), 0.0));
        assert!(!t.update(route(4, 1), 0.0));
        assert!(!t.update(route(4, 1), 100.0));
        assert!(t.update(route(5, 2), 0.0));
        assert!(!t.update(route(5, 3), 0.0));
        assert!(t.update(route(6, 9), 0.0));
        assert_eq!(t.get(C).unwrap().sequence_number, 6);
    }

    #[test]
    fn dedup_cache_forgets_oldest() {
        let mut d = DedupCache::new(2);
        assert!(d.insert((A, 1)));
        assert!(d.insert((A, 2)));
        assert!(!d.insert((A, 1)));
        assert!(d.insert((A, 3)));
        assert!(!d.contains(&(A, 1)));
        assert_eq!(d.len(), 2);
    }
}
