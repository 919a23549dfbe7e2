//! Binary message encoding.
//!
//! Every message starts with a frame: `type tag (u8) | message id (u64) |
//! [session id (u32), SREQ/SREP only] | length (u32)`, where `length` is the
//! total encoded size in bytes including the frame. Integers are big-endian,
//! floats are IEEE-754 big-endian bit patterns, strings are a `u16` byte
//! length followed by UTF-8, lists are a `u16` element count followed by the
//! elements, and optional values are a `u8` presence flag (0 or 1) followed by
//! the value.
//!
//! Bodies, in order:
//! - SADV: entries
//! - SREQ: requested, ontology list, routing headers, ttl (u8)
//! - SREP: requested entry (optional), ontology list, routing headers,
//!   correlated entries
//!
//! An entry is `service | ontology records | route`. Service info is `id |
//! name | provider | concept | input | output | ontology uris | qos`. A route
//! is `sequence | destination | hop count | next node | status (0 valid, 1
//! invalid) | precursors`. Routing headers open with a variant byte (1 AODV,
//! 2 DSR). A requested item opens with a variant byte (1 service, 2
//! ontology).

use std::collections::BTreeSet;

use thiserror::Error;

use super::{
    AdvEntry, Message, MessageKind, NodeId, OntologyDocument, OntologyRecord, QoSSpec, Requested,
    RouteEntry, RouteStatus, RoutingHeaders, SAdvMessage, SRepMessage, SReqMessage,
    ServiceDescription, ServiceId, ServiceInfo,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("advertisement must carry at least one entry")]
    EmptyAdvertisement,
    #[error("{field} too long to encode ({len} elements)")]
    TooLong { field: &'static str, len: usize },
    #[error("input truncated while reading {0}")]
    Truncated(&'static str),
    #[error("unknown message type tag {0}")]
    UnknownType(u8),
    #[error("length field says {declared} bytes but message has {actual}")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("invalid value {value} for {field}")]
    InvalidTag { field: &'static str, value: u8 },
    #[error("string field is not valid UTF-8")]
    InvalidUtf8,
}

pub type Result<T> = std::result::Result<T, WireError>;

pub fn encode(msg: &Message) -> Result<Vec<u8>> {
    let mut w = Writer::default();
    let kind = msg.kind();
    w.u8(kind.tag());
    w.u64(msg.message_id());
    match msg {
        Message::Req(m) => w.u32(m.session_id),
        Message::Rep(m) => w.u32(m.session_id),
        Message::Adv(_) => {}
    }
    let length_at = w.buf.len();
    w.u32(0);
    match msg {
        Message::Adv(m) => {
            if m.entries.is_empty() {
                return Err(WireError::EmptyAdvertisement);
            }
            w.list("entries", &m.entries, Writer::adv_entry)?;
        }
        Message::Req(m) => {
            w.requested(&m.requested)?;
            w.list("ontology list", &m.ontology_list, Writer::ontology_record)?;
            w.routing(&m.routing)?;
            w.u8(m.ttl);
        }
        Message::Rep(m) => {
            match &m.requested {
                Some(entry) => {
                    w.u8(1);
                    w.adv_entry(entry)?;
                }
                None => w.u8(0),
            }
            w.list("ontology list", &m.ontology_list, Writer::ontology_record)?;
            w.routing(&m.routing)?;
            w.list("correlated", &m.correlated, Writer::adv_entry)?;
        }
    }
    let total = u32::try_from(w.buf.len()).map_err(|_| WireError::TooLong {
        field: "message",
        len: w.buf.len(),
    })?;
    w.buf[length_at..length_at + 4].copy_from_slice(&total.to_be_bytes());
    Ok(w.buf)
}

pub fn decode(bytes: &[u8]) -> Result<Message> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let tag = r.u8("type")?;
    let kind = MessageKind::from_tag(tag).ok_or(WireError::UnknownType(tag))?;
    let message_id = r.u64("message id")?;
    let session_id = match kind {
        MessageKind::SAdv => 0,
        _ => r.u32("session id")?,
    };
    let declared = r.u32("length")? as usize;
    if declared != bytes.len() {
        return Err(WireError::LengthMismatch {
            declared,
            actual: bytes.len(),
        });
    }
    let msg = match kind {
        MessageKind::SAdv => {
            let entries = r.list(Reader::adv_entry)?;
            if entries.is_empty() {
                return Err(WireError::EmptyAdvertisement);
            }
            Message::Adv(SAdvMessage {
                message_id,
                entries,
            })
        }
        MessageKind::SReq => {
            let requested = r.requested()?;
            let ontology_list = r.list(Reader::ontology_record)?;
            let routing = r.routing()?;
            let ttl = r.u8("ttl")?;
            Message::Req(SReqMessage {
                message_id,
                session_id,
                requested,
                ontology_list,
                routing,
                ttl,
            })
        }
        MessageKind::SRep => {
            let requested = if r.flag("requested")? {
                Some(r.adv_entry()?)
            } else {
                None
            };
            let ontology_list = r.list(Reader::ontology_record)?;
            let routing = r.routing()?;
            let correlated = r.list(Reader::adv_entry)?;
            Message::Rep(SRepMessage {
                message_id,
                session_id,
                requested,
                ontology_list,
                routing,
                correlated,
            })
        }
    };
    if r.pos != bytes.len() {
        return Err(WireError::LengthMismatch {
            declared,
            actual: r.pos,
        });
    }
    Ok(msg)
}

/// Encoded size in bytes.
pub fn encoded_len(msg: &Message) -> Result<usize> {
    encode(msg).map(|b| b.len())
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    fn count(&mut self, field: &'static str, len: usize) -> Result<()> {
        let n = u16::try_from(len).map_err(|_| WireError::TooLong { field, len })?;
        self.u16(n);
        Ok(())
    }

    fn str(&mut self, s: &str) -> Result<()> {
        self.count("string", s.len())?;
        self.buf.extend_from_slice(s.as_bytes());
        Ok(())
    }

    fn list<T>(
        &mut self,
        field: &'static str,
        items: &[T],
        mut each: impl FnMut(&mut Self, &T) -> Result<()>,
    ) -> Result<()> {
        self.count(field, items.len())?;
        for item in items {
            each(self, item)?;
        }
        Ok(())
    }

    fn qos(&mut self, q: &QoSSpec) -> Result<()> {
        self.count("qos", q.attributes().len())?;
        for (name, value) in q.attributes() {
            self.str(name)?;
            self.f64(*value);
        }
        Ok(())
    }

    fn description(&mut self, d: &ServiceDescription) -> Result<()> {
        self.str(&d.name)?;
        self.str(&d.concept)?;
        self.str(&d.input_interface)?;
        self.str(&d.output_interface)
    }

    fn service(&mut self, s: &ServiceInfo) -> Result<()> {
        self.u32(s.service_id.0);
        self.str(&s.name)?;
        self.u32(s.provider.0);
        self.str(&s.concept)?;
        self.str(&s.input_interface)?;
        self.str(&s.output_interface)?;
        self.count("ontology uris", s.ontology_list.len())?;
        for uri in &s.ontology_list {
            self.str(uri)?;
        }
        self.qos(&s.qos)
    }

    fn route(&mut self, r: &RouteEntry) -> Result<()> {
        self.u32(r.sequence_number);
        self.u32(r.destination.0);
        self.u32(r.hop_count);
        self.u32(r.next_node.0);
        self.u8(match r.status {
            RouteStatus::Valid => 0,
            RouteStatus::Invalid => 1,
        });
        self.count("precursors", r.precursors.len())?;
        for p in &r.precursors {
            self.u32(p.0);
        }
        Ok(())
    }

    fn document(&mut self, d: &OntologyDocument) -> Result<()> {
        self.str(&d.name)?;
        self.str(&d.uri)?;
        self.str(&d.base_uri)?;
        self.str(&d.author)?;
        self.count("concepts", d.concepts.len())?;
        for (concept, parent) in &d.concepts {
            self.str(concept)?;
            match parent {
                Some(p) => {
                    self.u8(1);
                    self.str(p)?;
                }
                None => self.u8(0),
            }
        }
        Ok(())
    }

    fn ontology_record(&mut self, o: &OntologyRecord) -> Result<()> {
        self.str(&o.name)?;
        self.str(&o.uri)?;
        self.str(&o.author)?;
        self.str(&o.base_ontology)?;
        match &o.document {
            Some(d) => {
                self.u8(1);
                self.document(d)
            }
            None => {
                self.u8(0);
                Ok(())
            }
        }
    }

    fn adv_entry(&mut self, e: &AdvEntry) -> Result<()> {
        self.service(&e.service)?;
        self.list("entry ontology", &e.ontology, Writer::ontology_record)?;
        self.route(&e.route)
    }

    fn routing(&mut self, h: &RoutingHeaders) -> Result<()> {
        match h {
            RoutingHeaders::Aodv {
                source,
                destination,
                broadcast_id,
                sequence_number,
                hop_count,
            } => {
                self.u8(1);
                self.u32(source.0);
                match destination {
                    Some(d) => {
                        self.u8(1);
                        self.u32(d.0);
                    }
                    None => self.u8(0),
                }
                self.u32(*broadcast_id);
                self.u32(*sequence_number);
                self.u32(*hop_count);
            }
            RoutingHeaders::Dsr {
                source,
                sequence_number,
                hops_traversed,
                hop_count,
            } => {
                self.u8(2);
                self.u32(source.0);
                self.u32(*sequence_number);
                self.count("hops traversed", hops_traversed.len())?;
                for n in hops_traversed {
                    self.u32(n.0);
                }
                self.u32(*hop_count);
            }
        }
        Ok(())
    }

    fn requested(&mut self, r: &Requested) -> Result<()> {
        match r {
            Requested::Service { description, qos } => {
                self.u8(1);
                self.description(description)?;
                self.qos(qos)
            }
            Requested::Ontology { uri } => {
                self.u8(2);
                self.str(uri)
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(WireError::Truncated(what))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N]> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N, what)?);
        Ok(out)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &'static str) -> Result<u16> {
        Ok(u16::from_be_bytes(self.array(what)?))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_be_bytes(self.array(what)?))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64> {
        Ok(u64::from_be_bytes(self.array(what)?))
    }

    fn f64(&mut self, what: &'static str) -> Result<f64> {
        Ok(f64::from_bits(self.u64(what)?))
    }

    fn flag(&mut self, field: &'static str) -> Result<bool> {
        match self.u8(field)? {
            0 => Ok(false),
            1 => Ok(true),
            value => Err(WireError::InvalidTag { field, value }),
        }
    }

    fn str(&mut self) -> Result<String> {
        let len = self.u16("string length")? as usize;
        let raw = self.take(len, "string")?;
        String::from_utf8(raw.to_vec()).map_err(|_| WireError::InvalidUtf8)
    }

    fn list<T>(&mut self, mut each: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let n = self.u16("list length")? as usize;
        let mut out = Vec::with_capacity(n.min(1024));
        for _ in 0..n {
            out.push(each(self)?);
        }
        Ok(out)
    }

    fn node(&mut self) -> Result<NodeId> {
        self.u32("node id").map(NodeId)
    }

    fn qos(&mut self) -> Result<QoSSpec> {
        let pairs = self.list(|r| Ok((r.str()?, r.f64("qos value")?)))?;
        Ok(QoSSpec::from_pairs(pairs))
    }

    fn description(&mut self) -> Result<ServiceDescription> {
        Ok(ServiceDescription {
            name: self.str()?,
            concept: self.str()?,
            input_interface: self.str()?,
            output_interface: self.str()?,
        })
    }

    fn service(&mut self) -> Result<ServiceInfo> {
        Ok(ServiceInfo {
            service_id: ServiceId(self.u32("service id")?),
            name: self.str()?,
            provider: self.node()?,
            concept: self.str()?,
            input_interface: self.str()?,
            output_interface: self.str()?,
            ontology_list: self.list(Reader::str)?,
            qos: self.qos()?,
        })
    }

    fn route(&mut self) -> Result<RouteEntry> {
        let sequence_number = self.u32("sequence number")?;
        let destination = self.node()?;
        let hop_count = self.u32("hop count")?;
        let next_node = self.node()?;
        let status = match self.u8("route status")? {
            0 => RouteStatus::Valid,
            1 => RouteStatus::Invalid,
            value => {
                return Err(WireError::InvalidTag {
                    field: "route status",
                    value,
                })
            }
        };
        let precursors: BTreeSet<NodeId> = self.list(Reader::node)?.into_iter().collect();
        Ok(RouteEntry {
            sequence_number,
            destination,
            hop_count,
            next_node,
            status,
            precursors,
        })
    }

    fn document(&mut self) -> Result<OntologyDocument> {
        Ok(OntologyDocument {
            name: self.str()?,
            uri: self.str()?,
            base_uri: self.str()?,
            author: self.str()?,
            concepts: self.list(|r| {
                let concept = r.str()?;
                let parent = if r.flag("concept parent")? {
                    Some(r.str()?)
                } else {
                    None
                };
                Ok((concept, parent))
            })?,
        })
    }

    fn ontology_record(&mut self) -> Result<OntologyRecord> {
        Ok(OntologyRecord {
            name: self.str()?,
            uri: self.str()?,
            author: self.str()?,
            base_ontology: self.str()?,
            document: if self.flag("ontology document")? {
                Some(self.document()?)
            } else {
                None
            },
        })
    }

    fn adv_entry(&mut self) -> Result<AdvEntry> {
        Ok(AdvEntry {
            service: self.service()?,
            ontology: self.list(Reader::ontology_record)?,
            route: self.route()?,
        })
    }

    fn routing(&mut self) -> Result<RoutingHeaders> {
        match self.u8("routing variant")? {
            1 => {
                let source = self.node()?;
                let destination = if self.flag("destination")? {
                    Some(self.node()?)
                } else {
                    None
                };
                Ok(RoutingHeaders::Aodv {
                    source,
                    destination,
                    broadcast_id: self.u32("broadcast id")?,
                    sequence_number: self.u32("sequence number")?,
                    hop_count: self.u32("hop count")?,
                })
            }
            2 => Ok(RoutingHeaders::Dsr {
                source: self.node()?,
                sequence_number: self.u32("sequence number")?,
                hops_traversed: self.list(Reader::node)?,
                hop_count: self.u32("hop count")?,
            }),
            value => Err(WireError::InvalidTag {
                field: "routing variant",
                value,
            }),
        }
    }

    fn requested(&mut self) -> Result<Requested> {
        match self.u8("requested variant")? {
            1 => Ok(Requested::Service {
                description: self.description()?,
                qos: self.qos()?,
            }),
            2 => Ok(Requested::Ontology { uri: self.str()? }),
            value => Err(WireError::InvalidTag {
                field: "requested variant",
                value,
            }),
        }
    }
}
