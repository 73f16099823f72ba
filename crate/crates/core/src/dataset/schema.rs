//! The fixed MIB-II schema: eight traffic classes, 34 counter variables and
//! the five protocol groups that partition them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const NUM_FEATURES: usize = 34;
pub const NUM_CLASSES: usize = 8;

/// Canonical variable names, indexed by `FeatureId::index() - 1`.
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "ifInOctets",
    "ifOutOctets",
    "ifOutDiscards",
    "ifInUcastPkts",
    "ifInNUcastPkts",
    "ifInDiscards",
    "ifOutUcastPkts",
    "ifOutNUcastPkts",
    "tcpOutRsts",
    "tcpInSegs",
    "tcpOutSegs",
    "tcpPassiveOpens",
    "tcpRetransSegs",
    "tcpCurrEstab",
    "tcpEstabResets",
    "tcpActiveOpens",
    "udpInDatagrams",
    "udpOutDatagrams",
    "udpInErrors",
    "udpNoPorts",
    "ipInReceives",
    "ipInDelivers",
    "ipOutRequests",
    "ipOutDiscards",
    "ipInDiscards",
    "ipForwDatagrams",
    "ipOutNoRoutes",
    "ipInAddrErrors",
    "icmpInMsgs",
    "icmpInDestUnreachs",
    "icmpOutMsgs",
    "icmpOutDestUnreachs",
    "icmpInEchos",
    "icmpOutEchoReps",
];

/// Name of the label column in CSV files.
pub const CLASS_COLUMN: &str = "class";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrafficClass {
    Normal,
    TcpSyn,
    UdpFlood,
    IcmpEcho,
    HttpFlood,
    Slowloris,
    Slowpost,
    BruteForce,
}

impl TrafficClass {
    /// All classes in declaration order. Prediction ties resolve towards the
    /// earlier entry.
    pub const ALL: [TrafficClass; NUM_CLASSES] = [
        TrafficClass::Normal,
        TrafficClass::TcpSyn,
        TrafficClass::UdpFlood,
        TrafficClass::IcmpEcho,
        TrafficClass::HttpFlood,
        TrafficClass::Slowloris,
        TrafficClass::Slowpost,
        TrafficClass::BruteForce,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TrafficClass::Normal => "Normal",
            TrafficClass::TcpSyn => "TCP-SYN",
            TrafficClass::UdpFlood => "UDPflood",
            TrafficClass::IcmpEcho => "ICMP-ECHO",
            TrafficClass::HttpFlood => "HTTPflood",
            TrafficClass::Slowloris => "Slowloris",
            TrafficClass::Slowpost => "Slowpost",
            TrafficClass::BruteForce => "BruteForce",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<TrafficClass> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for TrafficClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn label_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

impl FromStr for TrafficClass {
    type Err = Error;

    /// Case-insensitive; spaces, dashes and underscores are ignored so that
    /// `udp-flood`, `UDP flood` and `UDPflood` all name the same class.
    fn from_str(s: &str) -> Result<Self> {
        let key = label_key(s.trim());
        Self::ALL
            .iter()
            .copied()
            .find(|c| label_key(c.as_str()) == key && !key.is_empty())
            .ok_or_else(|| Error::UnknownClass {
                label: s.to_string(),
                row: 0,
            })
    }
}

/// One of the 34 MIB variables, identified by its 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId(u8);

impl FeatureId {
    pub fn new(index: usize) -> Result<FeatureId> {
        if (1..=NUM_FEATURES).contains(&index) {
            Ok(FeatureId(index as u8))
        } else {
            Err(Error::UnknownFeature(index.to_string()))
        }
    }

    pub fn from_name(name: &str) -> Result<FeatureId> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|p| FeatureId(p as u8 + 1))
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        FEATURE_NAMES[self.index() - 1]
    }

    pub fn all() -> Vec<FeatureId> {
        (1..=NUM_FEATURES).map(|i| FeatureId(i as u8)).collect()
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MibGroup {
    If,
    Tcp,
    Udp,
    Ip,
    Icmp,
}

impl MibGroup {
    pub const ALL: [MibGroup; 5] = [
        MibGroup::If,
        MibGroup::Tcp,
        MibGroup::Udp,
        MibGroup::Ip,
        MibGroup::Icmp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MibGroup::If => "IF",
            MibGroup::Tcp => "TCP",
            MibGroup::Udp => "UDP",
            MibGroup::Ip => "IP",
            MibGroup::Icmp => "ICMP",
        }
    }

    /// Inclusive index range of the group's members.
    fn span(self) -> (usize, usize) {
        match self {
            MibGroup::If => (1, 8),
            MibGroup::Tcp => (9, 16),
            MibGroup::Udp => (17, 20),
            MibGroup::Ip => (21, 28),
            MibGroup::Icmp => (29, 34),
        }
    }

    pub fn members(self) -> Vec<FeatureId> {
        let (lo, hi) = self.span();
        (lo..=hi).map(|i| FeatureId(i as u8)).collect()
    }

    pub fn of(feature: FeatureId) -> MibGroup {
        Self::ALL
            .into_iter()
            .find(|g| {
                let (lo, hi) = g.span();
                (lo..=hi).contains(&feature.index())
            })
            .expect("groups cover 1..=34")
    }
}

impl fmt::Display for MibGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MibGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownGroup(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn index_name_bijection() {
        for id in FeatureId::all() {
            assert_eq!(FeatureId::from_name(id.name()).unwrap(), id);
        }
        let names: BTreeSet<_> = FEATURE_NAMES.iter().collect();
        assert_eq!(names.len(), NUM_FEATURES);
        assert!(FeatureId::new(0).is_err());
        assert!(FeatureId::new(35).is_err());
    }

    #[test]
    fn groups_partition_the_schema() {
        let mut seen = BTreeSet::new();
        for g in MibGroup::ALL {
            for f in g.members() {
                assert!(seen.insert(f), "{f} appears in two groups");
                assert_eq!(MibGroup::of(f), g);
            }
        }
        assert_eq!(seen.len(), NUM_FEATURES);
    }

    #[test]
    fn class_labels_parse_loosely() {
        assert_eq!("udp-flood".parse::<TrafficClass>().unwrap(), TrafficClass::UdpFlood);
        assert_eq!(" tcp-syn ".parse::<TrafficClass>().unwrap(), TrafficClass::TcpSyn);
        assert_eq!("bruteForce".parse::<TrafficClass>().unwrap(), TrafficClass::BruteForce);
        assert_eq!("HTTP flood".parse::<TrafficClass>().unwrap(), TrafficClass::HttpFlood);
        assert!("Smurf".parse::<TrafficClass>().is_err());
        assert!("".parse::<TrafficClass>().is_err());
        for c in TrafficClass::ALL {
            assert_eq!(c.as_str().parse::<TrafficClass>().unwrap(), c);
        }
    }
}
