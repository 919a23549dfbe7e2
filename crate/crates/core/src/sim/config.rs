//! Scenario configuration as flat `key = value` text.

use std::fmt::Write as _;

use thiserror::Error;

use crate::discovery::{AdvertiseMode, NodeConfig};
use crate::domain::SimTime;
use crate::routing::Protocol;
use crate::semantic::SemanticMode;

use super::energy::PowerProfile;
use super::mobility::{MobilityModel, MobilityParams};
use super::workload::WorkloadKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value'")]
    Syntax { line: usize },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("invalid value '{value}' for '{key}': {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
}

/// Where nodes take their correlation scores from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationSource {
    /// FP-Growth over each node's own request log.
    #[default]
    Mined,
    /// The workload's generating matrix, fixed for the whole run.
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub width: f64,
    pub height: f64,
    pub nodes: usize,
    pub sim_time: SimTime,
    pub seed: u64,
    pub mobility: MobilityModel,
    /// Streets per side for the grid model.
    pub street_grid: usize,
    pub speed_min: f64,
    pub speed_max: f64,
    pub radio_range: f64,
    pub bitrate: f64,
    pub sense_window: SimTime,
    pub power: PowerProfile,
    pub workload: WorkloadKind,
    pub service_count: u32,
    pub eta: f64,
    pub session_min: usize,
    pub session_max: usize,
    pub session_gap: SimTime,
    pub adv_period: SimTime,
    pub correlation: CorrelationSource,
    pub sample_interval: SimTime,
    pub protocol_cfg: NodeConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            width: 500.0,
            height: 500.0,
            nodes: 50,
            sim_time: 5000.0,
            seed: 1,
            mobility: MobilityModel::RandomWaypoint,
            street_grid: 6,
            speed_min: 1.0,
            speed_max: 20.0,
            radio_range: 100.0,
            bitrate: 2.0e6,
            sense_window: 50e-6,
            power: PowerProfile::default(),
            workload: WorkloadKind::YouTube,
            service_count: 25,
            eta: 0.5,
            session_min: 2,
            session_max: 8,
            session_gap: 1800.0,
            adv_period: crate::discovery::DEFAULT_ADV_PERIOD,
            correlation: CorrelationSource::Mined,
            sample_interval: 100.0,
            protocol_cfg: NodeConfig::default(),
        }
    }
}

/// Every key understood by [`SimConfig::set`], in file order.
pub const KEYS: &[&str] = &[
    "width",
    "height",
    "nodes",
    "sim_time",
    "seed",
    "mobility",
    "street_grid",
    "speed_min",
    "speed_max",
    "radio_range",
    "bitrate",
    "sense_window",
    "power_transmit",
    "power_receive",
    "power_idle",
    "power_sleep",
    "power_sense",
    "workload",
    "service_count",
    "eta",
    "session_min",
    "session_max",
    "session_gap",
    "zeta",
    "log_capacity",
    "min_support",
    "epsilon",
    "correlation",
    "cache_size",
    "advertise",
    "adv_period",
    "adv_length",
    "piggyback",
    "protocol",
    "ttl",
    "route_lifetime",
    "request_timeout",
    "request_retries",
    "semantic",
    "semantic_delay",
    "sample_interval",
];

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| invalid(key, value, "not a number"))
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = num(key, value)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, value, "must be a positive finite number"))
    }
}

fn non_negative(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = num(key, value)?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, value, "must be a non-negative finite number"))
    }
}

fn unit(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = num(key, value)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(invalid(key, value, "must lie in [0, 1]"))
    }
}

fn count<T: std::str::FromStr + PartialOrd + Default>(key: &str, value: &str) -> Result<T, ConfigError> {
    let v: T = num(key, value)?;
    if v > T::default() {
        Ok(v)
    } else {
        Err(invalid(key, value, "must be at least 1"))
    }
}

fn flag(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "on" | "true" | "1" | "yes" => Ok(true),
        "off" | "false" | "0" | "no" => Ok(false),
        _ => Err(invalid(key, value, "expected on or off")),
    }
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), ConfigError> {
        let (k, v) = kv.split_once('=').ok_or(ConfigError::Syntax { line: 0 })?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let p = &mut self.protocol_cfg;
        match key {
            "width" => self.width = positive(key, value)?,
            "height" => self.height = positive(key, value)?,
            "nodes" => self.nodes = count(key, value)?,
            "sim_time" => self.sim_time = positive(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "mobility" => {
                self.mobility = match value {
                    "rwp" | "random_waypoint" => MobilityModel::RandomWaypoint,
                    "street" => MobilityModel::StreetGrid {
                        grid: self.street_grid,
                    },
                    "static" => MobilityModel::Static,
                    _ => return Err(invalid(key, value, "expected rwp, street or static")),
                }
            }
            "street_grid" => {
                let grid: usize = num(key, value)?;
                if grid < 2 {
                    return Err(invalid(key, value, "grid needs at least 2 streets per side"));
                }
                self.street_grid = grid;
                if let MobilityModel::StreetGrid { .. } = self.mobility {
                    self.mobility = MobilityModel::StreetGrid { grid };
                }
            }
            "speed_min" => self.speed_min = non_negative(key, value)?,
            "speed_max" => self.speed_max = non_negative(key, value)?,
            "radio_range" => self.radio_range = positive(key, value)?,
            "bitrate" => self.bitrate = positive(key, value)?,
            "sense_window" => self.sense_window = non_negative(key, value)?,
            "power_transmit" => self.power.transmit = non_negative(key, value)?,
            "power_receive" => self.power.receive = non_negative(key, value)?,
            "power_idle" => self.power.idle = non_negative(key, value)?,
            "power_sleep" => self.power.sleep = non_negative(key, value)?,
            "power_sense" => self.power.sense = non_negative(key, value)?,
            "workload" => {
                self.workload = WorkloadKind::parse(value)
                    .ok_or_else(|| invalid(key, value, "expected random, correlated or youtube"))?
            }
            "service_count" => self.service_count = count(key, value)?,
            "eta" => self.eta = unit(key, value)?,
            "session_min" => self.session_min = count(key, value)?,
            "session_max" => self.session_max = count(key, value)?,
            "session_gap" => self.session_gap = non_negative(key, value)?,
            "zeta" => p.zeta = positive(key, value)?,
            "log_capacity" => p.log_capacity = count(key, value)?,
            "min_support" => p.min_support = count(key, value)?,
            "epsilon" => p.epsilon = unit(key, value)?,
            "correlation" => {
                self.correlation = match value {
                    "mined" => CorrelationSource::Mined,
                    "oracle" => CorrelationSource::Oracle,
                    _ => return Err(invalid(key, value, "expected mined or oracle")),
                }
            }
            "cache_size" => p.cache_size = count(key, value)?,
            "advertise" => {
                p.advertise = AdvertiseMode::parse(value)
                    .ok_or_else(|| invalid(key, value, "expected off, random or correlated"))?
            }
            "adv_period" => self.adv_period = positive(key, value)?,
            "adv_length" => p.adv_length = count(key, value)?,
            "piggyback" => p.piggyback = flag(key, value)?,
            "protocol" => {
                p.protocol = Protocol::parse(value).ok_or_else(|| invalid(key, value, "expected aodv or dsr"))?
            }
            "ttl" => p.ttl = count(key, value)?,
            "route_lifetime" => p.route_lifetime = positive(key, value)?,
            "request_timeout" => p.request_timeout = positive(key, value)?,
            "request_retries" => p.request_retries = num(key, value)?,
            "semantic" => {
                p.semantic = SemanticMode::parse(value)
                    .ok_or_else(|| invalid(key, value, "expected off, multilevel or unified"))?
            }
            "semantic_delay" => p.semantic_delay = non_negative(key, value)?,
            "sample_interval" => self.sample_interval = positive(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Cross-field checks.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.speed_max < self.speed_min {
            return Err(invalid("speed_max", &self.speed_max.to_string(), "below speed_min"));
        }
        if self.mobility != MobilityModel::Static && self.speed_min <= 0.0 {
            return Err(invalid("speed_min", &self.speed_min.to_string(), "moving nodes need a positive speed"));
        }
        if self.session_max < self.session_min {
            return Err(invalid("session_max", &self.session_max.to_string(), "below session_min"));
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let p = &self.protocol_cfg;
        let v = match key {
            "width" => self.width.to_string(),
            "height" => self.height.to_string(),
            "nodes" => self.nodes.to_string(),
            "sim_time" => self.sim_time.to_string(),
            "seed" => self.seed.to_string(),
            "mobility" => self.mobility.label().to_string(),
            "street_grid" => self.street_grid.to_string(),
            "speed_min" => self.speed_min.to_string(),
            "speed_max" => self.speed_max.to_string(),
            "radio_range" => self.radio_range.to_string(),
            "bitrate" => self.bitrate.to_string(),
            "sense_window" => self.sense_window.to_string(),
            "power_transmit" => self.power.transmit.to_string(),
            "power_receive" => self.power.receive.to_string(),
            "power_idle" => self.power.idle.to_string(),
            "power_sleep" => self.power.sleep.to_string(),
            "power_sense" => self.power.sense.to_string(),
            "workload" => self.workload.label().to_string(),
            "service_count" => self.service_count.to_string(),
            "eta" => self.eta.to_string(),
            "session_min" => self.session_min.to_string(),
            "session_max" => self.session_max.to_string(),
            "session_gap" => self.session_gap.to_string(),
            "zeta" => p.zeta.to_string(),
            "log_capacity" => p.log_capacity.to_string(),
            "min_support" => p.min_support.to_string(),
            "epsilon" => p.epsilon.to_string(),
            "correlation" => match self.correlation {
                CorrelationSource::Mined => "mined",
                CorrelationSource::Oracle => "oracle",
            }
            .to_string(),
            "cache_size" => p.cache_size.to_string(),
            "advertise" => p.advertise.label().to_string(),
            "adv_period" => self.adv_period.to_string(),
            "adv_length" => p.adv_length.to_string(),
            "piggyback" => if p.piggyback { "on" } else { "off" }.to_string(),
            "protocol" => p.protocol.label().to_string(),
            "ttl" => p.ttl.to_string(),
            "route_lifetime" => p.route_lifetime.to_string(),
            "request_timeout" => p.request_timeout.to_string(),
            "request_retries" => p.request_retries.to_string(),
            "semantic" => p.semantic.label().to_string(),
            "semantic_delay" => p.semantic_delay.to_string(),
            "sample_interval" => self.sample_interval.to_string(),
            _ => return None,
        };
        Some(v)
    }

    /// The configuration as text that [`SimConfig::parse`] reads back.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for k in KEYS {
            let _ = writeln!(out, "{k} = {}", self.get(k).unwrap_or_default());
        }
        out
    }

    pub fn mobility_params(&self) -> MobilityParams {
        MobilityParams {
            model: self.mobility,
            width: self.width,
            height: self.height,
            speed_min: self.speed_min,
            speed_max: self.speed_max,
        }
    }

    /// Requests stop this long before the end so the last ones can time out.
    pub fn drain_time(&self) -> SimTime {
        let p = &self.protocol_cfg;
        (f64::from(p.request_retries) + 1.0) * p.request_timeout
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = SimConfig::default();
        cfg.set("mobility", "street").unwrap();
        cfg.set("street_grid", "5").unwrap();
        cfg.set("advertise", "random").unwrap();
        cfg.set("piggyback", "off").unwrap();
        cfg.set("semantic_delay", "0.25").unwrap();
        assert_eq!(SimConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn field_level_errors() {
        assert_eq!(
            SimConfig::parse("nodez = 3"),
            Err(ConfigError::UnknownKey("nodez".into()))
        );
        assert!(matches!(
            SimConfig::parse("nodes = 0"),
            Err(ConfigError::InvalidValue { key, .. }) if key == "nodes"
        ));
        assert!(matches!(
            SimConfig::parse("epsilon = 2"),
            Err(ConfigError::InvalidValue { key, .. }) if key == "epsilon"
        ));
        assert_eq!(SimConfig::parse("nodes 3"), Err(ConfigError::Syntax { line: 1 }));
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = SimConfig::parse("# arm\n\nnodes = 5  # small\nprotocol = dsr\n").unwrap();
        assert_eq!(cfg.nodes, 5);
        assert_eq!(cfg.protocol_cfg.protocol, Protocol::Dsr);
    }

    #[test]
    fn cross_field_validation() {
        assert!(SimConfig::parse("speed_min = 5\nspeed_max = 2").is_err());
        assert!(SimConfig::parse("session_min = 4\nsession_max = 3").is_err());
    }
}
