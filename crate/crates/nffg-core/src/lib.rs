// SPDX-License-Identifier: Apache-2.0

//! Forwarding-graph data model for the service-chain workbench: symbolic
//! packet classes, typed VNF nodes, chain extraction and atomic updates.

pub mod chain;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod pc;
pub mod update;
pub mod vnf;

pub use chain::{extract_chains, Chain, CyclicRouteError};
pub use graph::{EndpointRole, Link, Nffg, NodeId, PortId, Rule, Violation, VnfInstance};
pub use pc::{
    bucket_of, partition_domain, AppClass, AppClassSet, ConcretePacket, IntervalSet, PacketClass,
    Proto, ProtoSet, SpamFlag, SpamFlagSet, FIELD_MAX,
};
pub use update::{apply_batch, apply_update, GraphUpdate, RejectedUpdate};
pub use vnf::{AclAction, AclRule, VnfConfig, VnfKind};
