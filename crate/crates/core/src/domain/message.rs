use super::{NodeId, OntologyRecord, QoSSpec, RouteEntry, ServiceDescription, ServiceInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    SAdv,
    SReq,
    SRep,
}

impl MessageKind {
    pub fn tag(self) -> u8 {
        match self {
            MessageKind::SAdv => 1,
            MessageKind::SReq => 2,
            MessageKind::SRep => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(MessageKind::SAdv),
            2 => Some(MessageKind::SReq),
            3 => Some(MessageKind::SRep),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MessageKind::SAdv => "SADV",
            MessageKind::SReq => "SREQ",
            MessageKind::SRep => "SREP",
        }
    }
}

/// A service together with the ontology metadata and the route needed to
/// reach it, as the sender sees it.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvEntry {
    pub service: ServiceInfo,
    pub ontology: Vec<OntologyRecord>,
    pub route: RouteEntry,
}

/// Protocol-dependent headers carried by requests and replies.
///
/// `hop_count` is the number of links the message has crossed including the
/// one it is currently on. For requests `source` is the originator; for
/// replies it is the replying node and `destination`/route point back to the
/// originator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoutingHeaders {
    Aodv {
        source: NodeId,
        destination: Option<NodeId>,
        broadcast_id: u32,
        sequence_number: u32,
        hop_count: u32,
    },
    Dsr {
        source: NodeId,
        sequence_number: u32,
        /// Request: nodes traversed so far, originator first.
        /// Reply: remaining hops back to the originator, next hop first.
        hops_traversed: Vec<NodeId>,
        hop_count: u32,
    },
}

impl RoutingHeaders {
    pub fn source(&self) -> NodeId {
        match self {
            RoutingHeaders::Aodv { source, .. } | RoutingHeaders::Dsr { source, .. } => *source,
        }
    }

    pub fn hop_count(&self) -> u32 {
        match self {
            RoutingHeaders::Aodv { hop_count, .. } | RoutingHeaders::Dsr { hop_count, .. } => {
                *hop_count
            }
        }
    }

    pub fn sequence_number(&self) -> u32 {
        match self {
            RoutingHeaders::Aodv {
                sequence_number, ..
            }
            | RoutingHeaders::Dsr {
                sequence_number, ..
            } => *sequence_number,
        }
    }
}

/// What a request asks for: a service, or an ontology document treated as a
/// service.
#[derive(Debug, Clone, PartialEq)]
pub enum Requested {
    Service {
        description: ServiceDescription,
        qos: QoSSpec,
    },
    Ontology {
        uri: String,
    },
}

/// Periodic single-hop advertisement.
#[derive(Debug, Clone, PartialEq)]
pub struct SAdvMessage {
    pub message_id: u64,
    pub entries: Vec<AdvEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SReqMessage {
    pub message_id: u64,
    pub session_id: u32,
    pub requested: Requested,
    /// Ontologies needed to understand the request. Metadata only, unless
    /// the sender runs with a unified schema and ships full documents.
    pub ontology_list: Vec<OntologyRecord>,
    pub routing: RoutingHeaders,
    pub ttl: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SRepMessage {
    pub message_id: u64,
    pub session_id: u32,
    /// The matched service; `None` when the reply answers an ontology fetch.
    pub requested: Option<AdvEntry>,
    pub ontology_list: Vec<OntologyRecord>,
    pub routing: RoutingHeaders,
    /// Piggybacked services correlated with the requested one.
    pub correlated: Vec<AdvEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Adv(SAdvMessage),
    Req(SReqMessage),
    Rep(SRepMessage),
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        match self {
            Message::Adv(_) => MessageKind::SAdv,
            Message::Req(_) => MessageKind::SReq,
            Message::Rep(_) => MessageKind::SRep,
        }
    }

    pub fn message_id(&self) -> u64 {
        match self {
            Message::Adv(m) => m.message_id,
            Message::Req(m) => m.message_id,
            Message::Rep(m) => m.message_id,
        }
    }
}
