// SPDX-License-Identifier: Apache-2.0

//! VNF kinds and their static configuration.
//!
//! Behavior (transfer functions) lives in the `vnf-models` crate; this module
//! only defines the configuration data embedded in the graph file.

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;
use crate::pc::{IntervalSet, PacketClass};

/// The catalog of function kinds a graph node can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VnfKind {
    #[serde(rename = "NAT")]
    Nat,
    #[serde(rename = "ACL_FW")]
    AclFw,
    #[serde(rename = "WEB_CACHE")]
    WebCache,
    #[serde(rename = "ANTISPAM")]
    Antispam,
    #[serde(rename = "VPN_GW")]
    VpnGw,
    #[serde(rename = "LOAD_BALANCER")]
    LoadBalancer,
    #[serde(rename = "ENDPOINT")]
    Endpoint,
}

impl VnfKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VnfKind::Nat => "NAT",
            VnfKind::AclFw => "ACL_FW",
            VnfKind::WebCache => "WEB_CACHE",
            VnfKind::Antispam => "ANTISPAM",
            VnfKind::VpnGw => "VPN_GW",
            VnfKind::LoadBalancer => "LOAD_BALANCER",
            VnfKind::Endpoint => "ENDPOINT",
        }
    }
}

impl std::fmt::Display for VnfKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AclAction {
    #[serde(rename = "PERMIT")]
    Permit,
    #[serde(rename = "DENY")]
    Deny,
}

/// One priority-ordered access-control entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AclRule {
    #[serde(rename = "match")]
    pub matches: PacketClass,
    pub action: AclAction,
}

/// Kind-specific configuration. The JSON shape of each variant is the plain
/// struct body; the surrounding node object's `kind` field selects the
/// variant (see `io`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VnfConfig {
    Nat {
        /// Source addresses subject to translation. Must be non-empty.
        internal_prefix: IntervalSet,
        /// All translated traffic leaves with this source address.
        public_ip: u32,
    },
    AclFw {
        /// Priority-ordered; first match wins.
        rules: Vec<AclRule>,
        default: AclAction,
    },
    WebCache,
    Antispam,
    VpnGw {
        tunnel_src: u32,
        tunnel_dst: u32,
        inner_prefix: IntervalSet,
    },
    LoadBalancer {
        /// Backend node ids in bucket order: the node's output port `i+1`
        /// must be wired to `backends[i]`.
        backends: Vec<NodeId>,
    },
    Endpoint,
}

impl VnfConfig {
    pub fn kind(&self) -> VnfKind {
        match self {
            VnfConfig::Nat { .. } => VnfKind::Nat,
            VnfConfig::AclFw { .. } => VnfKind::AclFw,
            VnfConfig::WebCache => VnfKind::WebCache,
            VnfConfig::Antispam => VnfKind::Antispam,
            VnfConfig::VpnGw { .. } => VnfKind::VpnGw,
            VnfConfig::LoadBalancer { .. } => VnfKind::LoadBalancer,
            VnfConfig::Endpoint => VnfKind::Endpoint,
        }
    }
}

// JSON bridging: the variant payloads as standalone shapes, selected by the
// node's `kind`. Unit kinds serialize as `{}`.

#[derive(Serialize, Deserialize)]
struct NatShape {
    internal_prefix: IntervalSet,
    public_ip: u32,
}

#[derive(Serialize, Deserialize)]
struct AclFwShape {
    rules: Vec<AclRule>,
    default: AclAction,
}

#[derive(Serialize, Deserialize)]
struct VpnGwShape {
    tunnel_src: u32,
    tunnel_dst: u32,
    inner_prefix: IntervalSet,
}

#[derive(Serialize, Deserialize)]
struct LoadBalancerShape {
    backends: Vec<NodeId>,
}

#[derive(Serialize, Deserialize)]
struct EmptyShape {}

impl VnfConfig {
    pub fn from_json(kind: VnfKind, value: serde_json::Value) -> Result<Self, serde_json::Error> {
        Ok(match kind {
            VnfKind::Nat => {
                let s: NatShape = serde_json::from_value(value)?;
                VnfConfig::Nat {
                    internal_prefix: s.internal_prefix,
                    public_ip: s.public_ip,
                }
            }
            VnfKind::AclFw => {
                let s: AclFwShape = serde_json::from_value(value)?;
                VnfConfig::AclFw {
                    rules: s.rules,
                    default: s.default,
                }
            }
            VnfKind::WebCache => {
                let _: EmptyShape = serde_json::from_value(value)?;
                VnfConfig::WebCache
            }
            VnfKind::Antispam => {
                let _: EmptyShape = serde_json::from_value(value)?;
                VnfConfig::Antispam
            }
            VnfKind::VpnGw => {
                let s: VpnGwShape = serde_json::from_value(value)?;
                VnfConfig::VpnGw {
                    tunnel_src: s.tunnel_src,
                    tunnel_dst: s.tunnel_dst,
                    inner_prefix: s.inner_prefix,
                }
            }
            VnfKind::LoadBalancer => {
                let s: LoadBalancerShape = serde_json::from_value(value)?;
                VnfConfig::LoadBalancer {
                    backends: s.backends,
                }
            }
            VnfKind::Endpoint => {
                let _: EmptyShape = serde_json::from_value(value)?;
                VnfConfig::Endpoint
            }
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            VnfConfig::Nat {
                internal_prefix,
                public_ip,
            } => serde_json::to_value(NatShape {
                internal_prefix: internal_prefix.clone(),
                public_ip: *public_ip,
            }),
            VnfConfig::AclFw { rules, default } => serde_json::to_value(AclFwShape {
                rules: rules.clone(),
                default: *default,
            }),
            VnfConfig::VpnGw {
                tunnel_src,
                tunnel_dst,
                inner_prefix,
            } => serde_json::to_value(VpnGwShape {
                tunnel_src: *tunnel_src,
                tunnel_dst: *tunnel_dst,
                inner_prefix: inner_prefix.clone(),
            }),
            VnfConfig::LoadBalancer { backends } => serde_json::to_value(LoadBalancerShape {
                backends: backends.clone(),
            }),
            VnfConfig::WebCache | VnfConfig::Antispam | VnfConfig::Endpoint => {
                serde_json::to_value(EmptyShape {})
            }
        }
        .expect("config serialization is infallible")
    }
}
