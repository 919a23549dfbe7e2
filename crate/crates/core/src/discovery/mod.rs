//! Hybrid service discovery: periodic correlated advertisements, reactive
//! request/reply over the routing substrate, piggybacked replies and the LRU
//! service cache.

mod advertiser;
mod cache;
mod node;

pub use advertiser::{AdvertiseMode, Advertiser, DEFAULT_ADV_LENGTH, DEFAULT_ADV_PERIOD};
pub use cache::{ServiceCache, DEFAULT_CACHE_SIZE};
pub use node::{Effect, Node, NodeConfig, Outcome, ProtocolEvent, ServiceRequest, Timer};
